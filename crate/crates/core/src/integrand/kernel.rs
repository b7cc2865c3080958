use serde::{Deserialize, Serialize};

use super::expr::{parse, EvalError, Expr, Variables};
use crate::error::{Error, Result};
use crate::regions::MAX_DIM;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Interp {
    /// Right-continuous steps: `values[i]` on `[breakpoints[i], breakpoints[i+1])`.
    #[default]
    Step,
    Linear,
}

/// JSON form of a kernel.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum KernelSpec {
    /// `j(r) = 1` for `r < R`, else 0.
    Indicator {
        #[serde(rename = "R")]
        radius: f64,
    },
    /// Expression in `r`.
    Radial { expr: String },
    Table {
        breakpoints: Vec<f64>,
        values: Vec<f64>,
        #[serde(default)]
        interp: Interp,
    },
    /// Expression in `x1..xn`, evaluated at the displacement `x - y`.
    Field { expr: String },
}

#[derive(Clone, Debug, PartialEq)]
enum Form {
    Indicator(f64),
    Radial(Expr),
    Table {
        breakpoints: Vec<f64>,
        values: Vec<f64>,
        interp: Interp,
    },
    Field(Expr),
}

/// Either a radial profile `j(|x - y|)` or a general field `h(x - y)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "KernelSpec", into = "KernelSpec")]
pub struct Kernel {
    spec: KernelSpec,
    form: Form,
}

impl TryFrom<KernelSpec> for Kernel {
    type Error = Error;

    fn try_from(spec: KernelSpec) -> Result<Self> {
        Kernel::new(spec)
    }
}

impl From<Kernel> for KernelSpec {
    fn from(k: Kernel) -> Self {
        k.spec
    }
}

impl Kernel {
    pub fn new(spec: KernelSpec) -> Result<Self> {
        let form = match &spec {
            KernelSpec::Indicator { radius } => {
                if !(radius.is_finite() && *radius > 0.0) {
                    return Err(Error::InvalidInput(format!(
                        "indicator kernel radius must be positive, got {radius}"
                    )));
                }
                Form::Indicator(*radius)
            }
            KernelSpec::Radial { expr } => Form::Radial(parse(expr, Variables::Radius)?),
            KernelSpec::Field { expr } => Form::Field(parse(expr, Variables::Indexed(MAX_DIM))?),
            KernelSpec::Table {
                breakpoints,
                values,
                interp,
            } => {
                if breakpoints.is_empty()
                    || breakpoints.len() != values.len()
                    || breakpoints.windows(2).any(|w| !(w[0] < w[1]))
                    || breakpoints[0] < 0.0
                    || values.iter().chain(breakpoints).any(|v| !v.is_finite())
                {
                    return Err(Error::InvalidInput(
                        "table kernel needs matching finite values and increasing nonnegative breakpoints"
                            .into(),
                    ));
                }
                Form::Table {
                    breakpoints: breakpoints.clone(),
                    values: values.clone(),
                    interp: *interp,
                }
            }
        };
        Ok(Kernel { spec, form })
    }

    pub fn indicator(radius: f64) -> Result<Self> {
        Self::new(KernelSpec::Indicator { radius })
    }

    pub fn radial(expr: &str) -> Result<Self> {
        Self::new(KernelSpec::Radial {
            expr: expr.to_string(),
        })
    }

    pub fn field(expr: &str) -> Result<Self> {
        Self::new(KernelSpec::Field {
            expr: expr.to_string(),
        })
    }

    pub fn spec(&self) -> &KernelSpec {
        &self.spec
    }

    pub fn is_radial(&self) -> bool {
        !matches!(self.form, Form::Field(_))
    }

    pub fn indicator_radius(&self) -> Option<f64> {
        match self.form {
            Form::Indicator(r) => Some(r),
            _ => None,
        }
    }

    /// Smallest dimension in which a field kernel can be evaluated.
    pub fn min_dim(&self) -> usize {
        match &self.form {
            Form::Field(e) => e.variable_count().max(1),
            _ => 1,
        }
    }

    /// Radii where a radial profile may be non-smooth.
    pub fn radial_breakpoints(&self) -> Vec<f64> {
        match &self.form {
            Form::Indicator(r) => vec![*r],
            Form::Table { breakpoints, .. } => breakpoints.clone(),
            _ => Vec::new(),
        }
    }

    /// `j(r)` for radial kernels.
    pub fn radial_value(&self, r: f64) -> Result<f64, EvalError> {
        match &self.form {
            Form::Indicator(radius) => Ok(if r < *radius { 1.0 } else { 0.0 }),
            Form::Radial(e) => e.eval(&[r]),
            Form::Table {
                breakpoints,
                values,
                interp,
            } => Ok(table_value(breakpoints, values, *interp, r)),
            Form::Field(_) => Err(EvalError::NotRadial),
        }
    }

    /// Kernel value at the displacement `d = x - y`.
    pub fn at(&self, d: &[f64]) -> Result<f64, EvalError> {
        match &self.form {
            Form::Field(e) => e.eval(d),
            _ => self.radial_value(d.iter().map(|v| v * v).sum::<f64>().sqrt()),
        }
    }
}

fn table_value(breakpoints: &[f64], values: &[f64], interp: Interp, r: f64) -> f64 {
    let last = breakpoints.len() - 1;
    if r <= breakpoints[0] {
        return values[0];
    }
    if r >= breakpoints[last] {
        return values[last];
    }
    let i = breakpoints.partition_point(|&b| b <= r) - 1;
    match interp {
        Interp::Step => values[i],
        Interp::Linear => {
            let w = (r - breakpoints[i]) / (breakpoints[i + 1] - breakpoints[i]);
            values[i] + w * (values[i + 1] - values[i])
        }
    }
}
