//! Supermodularity checks on a finite lattice of test quadruples.
//!
//! For an integrand `F` of arity `m >= 2`, a quadruple is a base point `y`,
//! a coordinate pair `i < j` and increments `h, k > 0`, with deficit
//!
//! ```text
//! delta = F(y + h e_i + k e_j) + F(y) - F(y + h e_i) - F(y + k e_j)
//! ```
//!
//! `F` is supermodular iff every deficit is nonnegative. A lattice pass is a
//! certificate for the probed quadruples only.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::integrand::Integrand;

/// Violation threshold for deficits.
pub const TAU: f64 = 1e-9;
/// Threshold for the mixed finite difference.
pub const TAU_FD: f64 = 1e-6;
pub const DEFAULT_FD_STEP: f64 = 1e-3;

/// Base points `{0, step, 2 step, ..} <= ymax` in every coordinate, and the
/// increments tried for `h` and `k`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LatticeSpec {
    pub ymax: f64,
    pub step: f64,
    /// Empty means `{step, 2 step}`.
    #[serde(default)]
    pub increments: Vec<f64>,
}

impl Default for LatticeSpec {
    fn default() -> Self {
        LatticeSpec {
            ymax: 4.0,
            step: 0.5,
            increments: vec![0.5, 1.0],
        }
    }
}

impl LatticeSpec {
    pub fn new(ymax: f64, step: f64, increments: Vec<f64>) -> Result<Self> {
        let spec = LatticeSpec {
            ymax,
            step,
            increments,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.step > 0.0 && self.step.is_finite() && self.ymax.is_finite()) {
            return Err(Error::InvalidInput("lattice step must be positive".into()));
        }
        if self.step > self.ymax {
            return Err(Error::InvalidInput(format!(
                "lattice step {} exceeds ymax {}",
                self.step, self.ymax
            )));
        }
        if self.increments.iter().any(|h| !(*h > 0.0 && h.is_finite())) {
            return Err(Error::InvalidInput("increments must be positive".into()));
        }
        Ok(())
    }

    pub fn increments(&self) -> Vec<f64> {
        if self.increments.is_empty() {
            vec![self.step, 2.0 * self.step]
        } else {
            self.increments.clone()
        }
    }

    /// Coordinate values along one axis.
    pub fn axis(&self) -> Vec<f64> {
        let count = (self.ymax / self.step + 1e-9).floor() as usize + 1;
        (0..count).map(|i| i as f64 * self.step).collect()
    }

    /// All lattice points in `[0, ymax]^m`, first coordinate slowest.
    pub fn points(&self, m: usize) -> impl Iterator<Item = Vec<f64>> + '_ {
        let axis = self.axis();
        let total = axis.len().pow(m as u32);
        (0..total).map(move |index| decode(index, &axis, m))
    }

    fn point_count(&self, m: usize) -> usize {
        self.axis().len().pow(m as u32)
    }
}

fn decode(mut index: usize, axis: &[f64], m: usize) -> Vec<f64> {
    let mut y = vec![0.0; m];
    for slot in y.iter_mut().rev() {
        *slot = axis[index % axis.len()];
        index /= axis.len();
    }
    y
}

/// A test quadruple together with its deficit. Indices are zero-based.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SupermodularityWitness {
    pub i: usize,
    pub j: usize,
    pub y: Vec<f64>,
    pub h: f64,
    pub k: f64,
    pub deficit: f64,
}

/// `F(y + h e_i + k e_j) + F(y) - F(y + h e_i) - F(y + k e_j)`.
pub fn deficit(f: &Integrand, i: usize, j: usize, y: &[f64], h: f64, k: f64) -> Result<f64> {
    let m = f.arity();
    if y.len() != m {
        return Err(Error::ArityMismatch {
            expected: m,
            found: y.len(),
        });
    }
    if i == j || i >= m || j >= m {
        return Err(Error::InvalidInput(format!(
            "coordinate pair ({i}, {j}) must be distinct indices below {m}"
        )));
    }
    let mut p = y.to_vec();
    let base = f.eval_at(&p)?;
    p[i] += h;
    let up_i = f.eval_at(&p)?;
    p[j] += k;
    let up_both = f.eval_at(&p)?;
    p[i] = y[i];
    let up_j = f.eval_at(&p)?;
    Ok(up_both + base - up_i - up_j)
}

impl SupermodularityWitness {
    pub fn evaluate(
        f: &Integrand,
        i: usize,
        j: usize,
        y: Vec<f64>,
        h: f64,
        k: f64,
    ) -> Result<Self> {
        if !(h > 0.0 && k > 0.0) {
            return Err(Error::InvalidInput("increments must be positive".into()));
        }
        let deficit = deficit(f, i, j, &y, h, k)?;
        Ok(SupermodularityWitness {
            i,
            j,
            y,
            h,
            k,
            deficit,
        })
    }

    pub fn recompute(&self, f: &Integrand) -> Result<f64> {
        deficit(f, self.i, self.j, &self.y, self.h, self.k)
    }

    /// The same quadruple with the roles of `(i, h)` and `(j, k)` exchanged.
    pub fn swapped(&self) -> Self {
        SupermodularityWitness {
            i: self.j,
            j: self.i,
            h: self.k,
            k: self.h,
            ..self.clone()
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "verdict")]
pub enum SupermodularVerdict {
    PassedOnLattice {
        min_deficit: f64,
        quadruples: usize,
    },
    Violation {
        witness: SupermodularityWitness,
        quadruples: usize,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "verdict")]
pub enum StrictVerdict {
    StrictOnLattice {
        min_deficit: f64,
        quadruples: usize,
    },
    NonStrict {
        witness: SupermodularityWitness,
        quadruples: usize,
    },
}

struct Scan {
    best: SupermodularityWitness,
    quadruples: usize,
}

/// Smallest deficit over the lattice; ties go to the earliest quadruple in
/// scan order (base point, then pair, then `h`, then `k`), so the result is
/// independent of how the scan is split across threads.
fn scan(f: &Integrand, lattice: &LatticeSpec) -> Result<Scan> {
    lattice.validate()?;
    let m = f.arity();
    if m < 2 {
        return Err(Error::InvalidInput(format!(
            "supermodularity needs arity >= 2, got {m}"
        )));
    }
    let axis = lattice.axis();
    let incs = lattice.increments();
    let pairs: Vec<(usize, usize)> = (0..m)
        .flat_map(|i| (i + 1..m).map(move |j| (i, j)))
        .collect();
    let bases = lattice.point_count(m);

    let per_base: Vec<Result<SupermodularityWitness>> = (0..bases)
        .into_par_iter()
        .map(|b| {
            let y = decode(b, &axis, m);
            let mut best: Option<SupermodularityWitness> = None;
            for &(i, j) in &pairs {
                for &h in &incs {
                    for &k in &incs {
                        let d = deficit(f, i, j, &y, h, k)?;
                        if best.as_ref().is_none_or(|w| d < w.deficit) {
                            best = Some(SupermodularityWitness {
                                i,
                                j,
                                y: y.clone(),
                                h,
                                k,
                                deficit: d,
                            });
                        }
                    }
                }
            }
            Ok(best.expect("at least one pair and increment"))
        })
        .collect();

    let mut best: Option<SupermodularityWitness> = None;
    for candidate in per_base {
        let candidate = candidate?;
        if best.as_ref().is_none_or(|w| candidate.deficit < w.deficit) {
            best = Some(candidate);
        }
    }
    Ok(Scan {
        best: best.expect("lattice is nonempty"),
        quadruples: bases * pairs.len() * incs.len() * incs.len(),
    })
}

pub fn check_supermodular(f: &Integrand, lattice: &LatticeSpec) -> Result<SupermodularVerdict> {
    let Scan { best, quadruples } = scan(f, lattice)?;
    Ok(if best.deficit < -TAU {
        SupermodularVerdict::Violation {
            witness: best,
            quadruples,
        }
    } else {
        SupermodularVerdict::PassedOnLattice {
            min_deficit: best.deficit,
            quadruples,
        }
    })
}

pub fn check_strict_supermodular(f: &Integrand, lattice: &LatticeSpec) -> Result<StrictVerdict> {
    let Scan { best, quadruples } = scan(f, lattice)?;
    Ok(if best.deficit <= TAU {
        StrictVerdict::NonStrict {
            witness: best,
            quadruples,
        }
    } else {
        StrictVerdict::StrictOnLattice {
            min_deficit: best.deficit,
            quadruples,
        }
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MixedDifferenceReport {
    /// Smallest mixed difference found.
    pub min: f64,
    pub at: Vec<f64>,
    pub i: usize,
    pub j: usize,
    pub fd_step: f64,
    pub points: usize,
    /// `min < -TAU_FD`.
    pub negative: bool,
}

/// Central mixed difference
/// `[F(x+he_i+he_j) - F(x+he_i-he_j) - F(x-he_i+he_j) + F(x-he_i-he_j)] / 4h^2`
/// at every interior lattice point and every pair `i < j`.
pub fn check_c2_supermodular(
    f: &Integrand,
    grid: &LatticeSpec,
    fd_step: f64,
) -> Result<MixedDifferenceReport> {
    grid.validate()?;
    let m = f.arity();
    if m < 2 {
        return Err(Error::InvalidInput(format!(
            "mixed differences need arity >= 2, got {m}"
        )));
    }
    if !(fd_step > 0.0 && fd_step < grid.step) {
        return Err(Error::InvalidInput(format!(
            "fd_step must lie in (0, step), got {fd_step}"
        )));
    }
    let axis = grid.axis();
    if axis.len() < 3 {
        return Err(Error::InvalidInput("grid has no interior points".into()));
    }
    let interior = &axis[1..axis.len() - 1];
    let count = interior.len().pow(m as u32);
    let h = fd_step;

    // (mixed difference, point, i, j)
    type Best = (f64, Vec<f64>, usize, usize);
    let per_point: Vec<Result<Best>> = (0..count)
        .into_par_iter()
        .map(|index| {
            let x = decode(index, interior, m);
            let mut best = (f64::INFINITY, x.clone(), 0, 1);
            for i in 0..m {
                for j in i + 1..m {
                    let mut p = x.clone();
                    let mut corner = |si: f64, sj: f64| {
                        p[i] = x[i] + si * h;
                        p[j] = x[j] + sj * h;
                        f.eval_at(&p)
                    };
                    let v = (corner(1.0, 1.0)? - corner(1.0, -1.0)? - corner(-1.0, 1.0)?
                        + corner(-1.0, -1.0)?)
                        / (4.0 * h * h);
                    if v < best.0 {
                        best = (v, x.clone(), i, j);
                    }
                }
            }
            Ok(best)
        })
        .collect();

    let mut best: Option<(f64, Vec<f64>, usize, usize)> = None;
    for candidate in per_point {
        let candidate = candidate?;
        if best.as_ref().is_none_or(|b| candidate.0 < b.0) {
            best = Some(candidate);
        }
    }
    let (min, at, i, j) = best.expect("interior is nonempty");
    Ok(MixedDifferenceReport {
        min,
        at,
        i,
        j,
        fd_step,
        points: count,
        negative: min < -TAU_FD,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(text: &str) -> Integrand {
        Integrand::parse(text, 2).unwrap()
    }

    #[test]
    fn product_passes() {
        let v = check_supermodular(&f("x1*x2"), &LatticeSpec::default()).unwrap();
        assert!(matches!(v, SupermodularVerdict::PassedOnLattice { .. }));
        let s = check_strict_supermodular(&f("x1*x2"), &LatticeSpec::default()).unwrap();
        // Smallest h*k on the default increments is 0.25.
        assert_eq!(
            s,
            StrictVerdict::StrictOnLattice {
                min_deficit: 0.25,
                quadruples: 81 * 4
            }
        );
    }

    #[test]
    fn max_violates_at_origin() {
        let v = check_supermodular(&f("max(x1,x2)"), &LatticeSpec::default()).unwrap();
        let SupermodularVerdict::Violation { witness, .. } = v else {
            panic!("expected violation")
        };
        assert_eq!(witness.y, vec![0.0, 0.0]);
        assert_eq!((witness.h, witness.k), (1.0, 1.0));
        assert_eq!(witness.deficit, -1.0);
    }

    #[test]
    fn polynomial_witness_on_unit_lattice() {
        // On {0,1}^2 with unit increments the deficits are 0, -2, -2, -8.
        let lattice = LatticeSpec::new(1.0, 1.0, vec![1.0]).unwrap();
        let v = check_supermodular(&f("x1*x2 - x1^2*x2^2"), &lattice).unwrap();
        let SupermodularVerdict::Violation { witness, .. } = v else {
            panic!("expected violation")
        };
        assert_eq!(witness.y, vec![1.0, 1.0]);
        assert_eq!(witness.deficit, -8.0);
    }

    #[test]
    fn min_is_not_strict() {
        let v = check_strict_supermodular(&f("min(x1,x2)"), &LatticeSpec::default()).unwrap();
        let StrictVerdict::NonStrict { witness, .. } = v else {
            panic!("expected non-strict")
        };
        assert_eq!(witness.deficit, 0.0);
        let at = deficit(&f("min(x1,x2)"), 0, 1, &[0.0, 1.0], 1.0, 1.0).unwrap();
        assert_eq!(at, 0.0);
        assert!(matches!(
            check_strict_supermodular(&f("max(x1,x2)"), &LatticeSpec::default()).unwrap(),
            StrictVerdict::NonStrict { .. }
        ));
    }

    #[test]
    fn mixed_differences() {
        let lattice = LatticeSpec::default();
        let prod = check_c2_supermodular(&f("x1*x2"), &lattice, DEFAULT_FD_STEP).unwrap();
        assert!((prod.min - 1.0).abs() < 1e-6);
        assert!(!prod.negative);

        let poly = f("x1*x2 - x1^2*x2^2");
        let unit = LatticeSpec::new(2.0, 1.0, vec![]).unwrap();
        let at_one = check_c2_supermodular(&poly, &unit, DEFAULT_FD_STEP).unwrap();
        assert_eq!(at_one.at, vec![1.0, 1.0]);
        assert!((at_one.min + 3.0).abs() < 1e-6);
        assert!(at_one.negative);

        let exp = check_c2_supermodular(&f("exp(x1+x2)"), &lattice, DEFAULT_FD_STEP).unwrap();
        assert!(exp.min > 0.0);
    }

    #[test]
    fn rejects_bad_inputs() {
        let unary = Integrand::parse("x1", 1).unwrap();
        assert!(check_supermodular(&unary, &LatticeSpec::default()).is_err());
        assert!(LatticeSpec::new(1.0, 2.0, vec![]).is_err());
        assert!(LatticeSpec::new(1.0, 0.5, vec![-1.0]).is_err());
        let logf = f("log(x1) * x2");
        assert!(matches!(
            check_supermodular(&logf, &LatticeSpec::default()),
            Err(Error::Eval { .. })
        ));
    }
}
