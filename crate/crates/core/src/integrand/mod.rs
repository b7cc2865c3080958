//! Integrands `F(y_1, .., y_m)` and kernels, parsed from expressions or
//! tabulated, plus the "vanishes on hyperplanes" hypothesis check.

mod expr;
mod kernel;

pub use expr::{parse, BinOp, EvalError, Expr, Func, ParseError, ParseErrorKind, Variables};
pub use kernel::{Interp, Kernel, KernelSpec};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::supermod::LatticeSpec;

/// Probe tolerance for `F = 0` on coordinate hyperplanes.
pub const TAU_ZERO: f64 = 1e-12;

/// Values on a tensor grid, interpolated multilinearly and held constant
/// beyond the last breakpoint of each axis.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    /// Strictly increasing breakpoints, one list per argument.
    pub axes: Vec<Vec<f64>>,
    /// Row-major values; the last axis varies fastest.
    pub values: Vec<f64>,
}

impl Grid {
    fn validate(&self) -> Result<()> {
        if self.axes.is_empty() {
            return Err(Error::InvalidInput("table needs at least one axis".into()));
        }
        let mut len = 1usize;
        for (k, axis) in self.axes.iter().enumerate() {
            if axis.is_empty() || axis.windows(2).any(|w| !(w[0] < w[1])) {
                return Err(Error::InvalidInput(format!(
                    "table axis {k} must be nonempty and strictly increasing"
                )));
            }
            len *= axis.len();
        }
        if self.values.len() != len || self.values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "table needs {len} finite values, got {}",
                self.values.len()
            )));
        }
        Ok(())
    }

    fn eval(&self, y: &[f64]) -> f64 {
        // Per axis: lower index and weight of the upper neighbour.
        let cells: Vec<(usize, f64)> = self
            .axes
            .iter()
            .zip(y)
            .map(|(axis, &v)| {
                let last = axis.len() - 1;
                if last == 0 || v <= axis[0] {
                    (0, 0.0)
                } else if v >= axis[last] {
                    (last, 0.0)
                } else {
                    let i = axis.partition_point(|&b| b <= v) - 1;
                    (i, (v - axis[i]) / (axis[i + 1] - axis[i]))
                }
            })
            .collect();
        let m = self.axes.len();
        let mut total = 0.0;
        for corner in 0..(1usize << m) {
            let mut weight = 1.0;
            let mut offset = 0;
            for (k, &(i, w)) in cells.iter().enumerate() {
                let up = corner >> k & 1 == 1;
                if up && w == 0.0 {
                    weight = 0.0;
                    break;
                }
                weight *= if up { w } else { 1.0 - w };
                offset = offset * self.axes[k].len() + i + usize::from(up);
            }
            if weight != 0.0 {
                total += weight * self.values[offset];
            }
        }
        total
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Body {
    Expression { source: String, expr: Expr },
    Table(Grid),
}

/// JSON form: `{"integrand": "x1*x2", "arity": 2}` or `{"table": {...}}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum IntegrandSpec {
    Expression { integrand: String, arity: usize },
    Table { table: Grid },
}

/// `F : [0, inf)^m -> R`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "IntegrandSpec", into = "IntegrandSpec")]
pub struct Integrand {
    arity: usize,
    body: Body,
}

impl TryFrom<IntegrandSpec> for Integrand {
    type Error = Error;

    fn try_from(spec: IntegrandSpec) -> Result<Self> {
        match spec {
            IntegrandSpec::Expression { integrand, arity } => Integrand::parse(&integrand, arity),
            IntegrandSpec::Table { table } => Integrand::tabulated(table),
        }
    }
}

impl From<Integrand> for IntegrandSpec {
    fn from(f: Integrand) -> Self {
        match f.body {
            Body::Expression { source, .. } => IntegrandSpec::Expression {
                integrand: source,
                arity: f.arity,
            },
            Body::Table(table) => IntegrandSpec::Table { table },
        }
    }
}

impl Integrand {
    pub fn parse(text: &str, arity: usize) -> Result<Self> {
        if arity == 0 {
            return Err(Error::InvalidInput(
                "integrand arity must be positive".into(),
            ));
        }
        let expr = parse(text, Variables::Indexed(arity))?;
        Ok(Integrand {
            arity,
            body: Body::Expression {
                source: text.to_string(),
                expr,
            },
        })
    }

    pub fn tabulated(grid: Grid) -> Result<Self> {
        grid.validate()?;
        Ok(Integrand {
            arity: grid.axes.len(),
            body: Body::Table(grid),
        })
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    /// Source text, or `"<table>"` for tabulated integrands.
    pub fn source(&self) -> &str {
        match &self.body {
            Body::Expression { source, .. } => source,
            Body::Table(_) => "<table>",
        }
    }

    pub fn expr(&self) -> Option<&Expr> {
        match &self.body {
            Body::Expression { expr, .. } => Some(expr),
            Body::Table(_) => None,
        }
    }

    pub fn eval(&self, y: &[f64]) -> Result<f64, EvalError> {
        if y.len() != self.arity {
            return Err(EvalError::Arity {
                expected: self.arity,
                found: y.len(),
            });
        }
        match &self.body {
            Body::Expression { expr, .. } => expr.eval(y),
            Body::Table(grid) => Ok(grid.eval(y)),
        }
    }

    /// Like [`Integrand::eval`] but attaches the point to the error.
    pub fn eval_at(&self, y: &[f64]) -> Result<f64> {
        self.eval(y).map_err(|e| Error::eval(y, e))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HyperplanePoint {
    pub point: Vec<f64>,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HyperplaneCheck {
    pub holds: bool,
    pub probes: usize,
    pub witness: Option<HyperplanePoint>,
}

/// Checks `F(y) = 0` whenever some `y_k = 0`.
///
/// The `{0, 1}` corners are probed first (in binary order with `x1` as the
/// low bit), then every lattice point with a zero coordinate. The first
/// point with `|F| > TAU_ZERO` is returned as the witness.
pub fn vanishes_on_hyperplanes(f: &Integrand, probe: &LatticeSpec) -> Result<HyperplaneCheck> {
    let m = f.arity();
    let mut probes = 0;
    let mut test = |y: &[f64]| -> Result<Option<HyperplanePoint>> {
        probes += 1;
        let value = f.eval_at(y)?;
        Ok((value.abs() > TAU_ZERO).then(|| HyperplanePoint {
            point: y.to_vec(),
            value,
        }))
    };

    if m < usize::BITS as usize - 1 && m <= 16 {
        let full = (1usize << m) - 1;
        for mask in 0..full {
            let y: Vec<f64> = (0..m).map(|l| (mask >> l & 1) as f64).collect();
            if let Some(w) = test(&y)? {
                return Ok(HyperplaneCheck {
                    holds: false,
                    probes,
                    witness: Some(w),
                });
            }
        }
    }
    for y in probe.points(m) {
        if y.iter().all(|&v| v != 0.0) {
            continue;
        }
        if let Some(w) = test(&y)? {
            return Ok(HyperplaneCheck {
                holds: false,
                probes,
                witness: Some(w),
            });
        }
    }
    Ok(HyperplaneCheck {
        holds: true,
        probes,
        witness: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integrand_examples() {
        let f = Integrand::parse("x1*x2", 2).unwrap();
        assert_eq!(f.eval(&[2.0, 3.0]).unwrap(), 6.0);
        let g = Integrand::parse("x1*x2 - x1^2*x2^2", 2).unwrap();
        assert_eq!(g.eval(&[2.0, 2.0]).unwrap(), -12.0);
        let h = Integrand::parse("min(x1,x2)", 2).unwrap();
        assert_eq!(h.eval(&[1.0, 3.0]).unwrap(), 1.0);
        assert!(matches!(
            f.eval(&[1.0]),
            Err(EvalError::Arity {
                expected: 2,
                found: 1
            })
        ));
        assert!(Integrand::parse("x1*x3", 2).is_err());
    }

    #[test]
    fn hyperplane_examples() {
        let lattice = LatticeSpec::default();
        let prod = Integrand::parse("x1*x2", 2).unwrap();
        assert!(vanishes_on_hyperplanes(&prod, &lattice).unwrap().holds);

        for text in ["x1+x2", "max(x1,x2)"] {
            let f = Integrand::parse(text, 2).unwrap();
            let check = vanishes_on_hyperplanes(&f, &lattice).unwrap();
            assert!(!check.holds);
            let w = check.witness.unwrap();
            assert_eq!(w.point, vec![1.0, 0.0]);
            assert_eq!(w.value, 1.0);
        }

        let logf = Integrand::parse("log(x1)*x2", 2).unwrap();
        assert!(matches!(
            vanishes_on_hyperplanes(&logf, &lattice),
            Err(Error::Eval { .. })
        ));
    }

    #[test]
    fn table_interpolation() {
        // F(y1, y2) = y1 * y2 sampled on {0, 1, 2}^2; bilinear is exact on the cells.
        let axis = vec![0.0, 1.0, 2.0];
        let values = (0..3)
            .flat_map(|i| (0..3).map(move |j| (i * j) as f64))
            .collect();
        let f = Integrand::tabulated(Grid {
            axes: vec![axis.clone(), axis],
            values,
        })
        .unwrap();
        assert_eq!(f.arity(), 2);
        assert_eq!(f.eval(&[1.0, 2.0]).unwrap(), 2.0);
        assert_eq!(f.eval(&[0.5, 0.5]).unwrap(), 0.25);
        // Clamped beyond the last breakpoint.
        assert_eq!(f.eval(&[5.0, 1.0]).unwrap(), 2.0);
        assert!(
            vanishes_on_hyperplanes(&f, &LatticeSpec::default())
                .unwrap()
                .holds
        );
    }

    #[test]
    fn json_forms() {
        let f: Integrand = serde_json::from_str(r#"{"integrand":"x1*x2","arity":2}"#).unwrap();
        assert_eq!(f.eval(&[2.0, 5.0]).unwrap(), 10.0);
        assert_eq!(
            serde_json::to_string(&f).unwrap(),
            r#"{"integrand":"x1*x2","arity":2}"#
        );
        let bad = serde_json::from_str::<Integrand>(r#"{"table":{"axes":[[1,0]],"values":[0,0]}}"#);
        assert!(bad.is_err());
    }
}
