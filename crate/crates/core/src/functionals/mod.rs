//! The Hardy–Littlewood functional `I(u) = int F(u_1(x), .., u_m(x)) dx`,
//! the two-function Riesz functional
//! `J(f, g) = int int Psi(f(x), g(y)) k(x - y) dx dy`, and the ball integrals
//! used by the Riesz necessity construction.

mod montecarlo;
mod pair1d;
mod proof;
mod quad;

pub use proof::{
    ball_convolution_h, ball_difference_i, check_kernel_hypotheses, find_eps_t0, limit_probe,
    strict_decrease_holds, LimitProbe,
};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::integrand::{vanishes_on_hyperplanes, Integrand, Kernel};
use crate::regions::{unit_ball_volume, Region, RegionKind};
use crate::simplefn::SimpleFunction;
use crate::supermod::LatticeSpec;

/// How an [`IntegralEstimate`] was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum Method {
    /// Closed form on the line (interval arithmetic).
    #[serde(rename = "exact_1d")]
    Exact1D,
    /// Closed form in n >= 2 (ball and annulus volumes).
    #[serde(rename = "closed_form")]
    ClosedForm,
    /// Deterministic adaptive quadrature on the line, tolerance ~1e-13.
    #[serde(rename = "quadrature_1d")]
    Quadrature1D,
    #[serde(rename = "monte_carlo")]
    MonteCarlo { samples: u64, seed: u64 },
}

impl Method {
    fn rank(self) -> u8 {
        match self {
            Method::Exact1D | Method::ClosedForm => 0,
            Method::Quadrature1D => 1,
            Method::MonteCarlo { .. } => 2,
        }
    }

    /// The least exact of two methods.
    pub fn combine(self, other: Method) -> Method {
        if other.rank() > self.rank() {
            other
        } else {
            self
        }
    }

    pub fn is_stochastic(self) -> bool {
        matches!(self, Method::MonteCarlo { .. })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntegralEstimate {
    pub value: f64,
    /// Zero for deterministic methods.
    pub stderr: f64,
    pub method: Method,
}

impl IntegralEstimate {
    pub fn exact(value: f64, method: Method) -> Self {
        IntegralEstimate {
            value,
            stderr: 0.0,
            method,
        }
    }

    /// `a*self + b*other`, with independent errors added in quadrature.
    pub fn linear(a: f64, x: &IntegralEstimate, b: f64, y: &IntegralEstimate) -> Self {
        IntegralEstimate {
            value: a * x.value + b * y.value,
            stderr: (a * a * x.stderr * x.stderr + b * b * y.stderr * y.stderr).sqrt(),
            method: x.method.combine(y.method),
        }
    }
}

/// Monte Carlo settings, used only in dimension >= 2.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RieszOptions {
    /// Sample pairs per piece pair.
    pub samples: u64,
    pub seed: u64,
}

pub const DEFAULT_SAMPLES: u64 = 100_000;

impl Default for RieszOptions {
    fn default() -> Self {
        RieszOptions {
            samples: DEFAULT_SAMPLES,
            seed: 0,
        }
    }
}

fn require_vanishing(f: &Integrand) -> Result<()> {
    let check = vanishes_on_hyperplanes(f, &LatticeSpec::default())?;
    match check.witness {
        None => Ok(()),
        Some(w) => Err(Error::HypothesisViolated(format!(
            "integrand {:?} does not vanish on coordinate hyperplanes: F({:?}) = {}",
            f.source(),
            w.point,
            w.value
        ))),
    }
}

fn common_dim(fs: &[&SimpleFunction]) -> Result<usize> {
    let n = fs[0].dim();
    for f in fs {
        if f.dim() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: f.dim(),
            });
        }
    }
    Ok(n)
}

/// Exact Hardy–Littlewood functional.
///
/// In 1D the union of all breakpoints is swept and `F` is evaluated once
/// per elementary interval. In n >= 2 every piece must either belong to a
/// family of balls and annuli sharing a center, or coincide exactly with
/// the pieces it meets; families must be mutually disjoint.
pub fn eval_hl(f: &Integrand, us: &[SimpleFunction]) -> Result<IntegralEstimate> {
    if us.len() != f.arity() {
        return Err(Error::ArityMismatch {
            expected: f.arity(),
            found: us.len(),
        });
    }
    let refs: Vec<&SimpleFunction> = us.iter().collect();
    let n = common_dim(&refs)?;
    require_vanishing(f)?;
    if n == 1 {
        hl_sweep(f, us).map(|v| IntegralEstimate::exact(v, Method::Exact1D))
    } else {
        hl_families(f, us).map(|v| IntegralEstimate::exact(v, Method::ClosedForm))
    }
}

fn hl_sweep(f: &Integrand, us: &[SimpleFunction]) -> Result<f64> {
    let per_fn: Vec<Vec<(f64, f64, f64)>> = us
        .iter()
        .map(|u| {
            u.pieces()
                .iter()
                .flat_map(|p| {
                    p.region
                        .intervals_1d()
                        .unwrap_or_default()
                        .into_iter()
                        .map(move |(l, h)| (l, h, p.value))
                })
                .collect()
        })
        .collect();
    let mut breaks: Vec<f64> = per_fn
        .iter()
        .flatten()
        .flat_map(|&(l, h, _)| [l, h])
        .collect();
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();

    let mut total = 0.0;
    let mut values = vec![0.0; us.len()];
    for w in breaks.windows(2) {
        let mid = 0.5 * (w[0] + w[1]);
        for (slot, pieces) in values.iter_mut().zip(&per_fn) {
            *slot = pieces
                .iter()
                .find(|(l, h, _)| *l < mid && mid < *h)
                .map_or(0.0, |p| p.2);
        }
        if values.iter().any(|v| *v > 0.0) {
            total += f.eval_at(&values)? * (w[1] - w[0]);
        }
    }
    Ok(total)
}

enum Family {
    Radial {
        center: Vec<f64>,
        // (function index, value, r_in, r_out)
        shells: Vec<(usize, f64, f64, f64)>,
    },
    Atom {
        region: Region,
        values: Vec<f64>,
    },
}

impl Family {
    fn hull(&self) -> Region {
        match self {
            Family::Radial { center, shells } => {
                let r = shells.iter().map(|s| s.3).fold(0.0, f64::max);
                Region::ball(center.clone(), r).expect("valid radius")
            }
            Family::Atom { region, .. } => region.clone(),
        }
    }
}

fn flatten(region: &Region, out: &mut Vec<Region>) {
    match region.kind() {
        RegionKind::Union { parts } => parts.iter().for_each(|p| flatten(p, out)),
        _ => out.push(region.clone()),
    }
}

fn hl_families(f: &Integrand, us: &[SimpleFunction]) -> Result<f64> {
    let m = us.len();
    let n = us[0].dim();
    let mut families: Vec<Family> = Vec::new();
    for (idx, u) in us.iter().enumerate() {
        for piece in u.pieces() {
            let mut atoms = Vec::new();
            flatten(&piece.region, &mut atoms);
            for atom in atoms {
                if let Some((center, r_in, r_out)) = atom.radial_shell() {
                    let shell = (idx, piece.value, r_in, r_out);
                    let found = families.iter_mut().find_map(|fam| match fam {
                        Family::Radial { center: c, shells } if c.as_slice() == center => {
                            Some(shells)
                        }
                        _ => None,
                    });
                    match found {
                        Some(shells) => shells.push(shell),
                        None => families.push(Family::Radial {
                            center: center.to_vec(),
                            shells: vec![shell],
                        }),
                    }
                } else {
                    let found = families.iter_mut().find_map(|fam| match fam {
                        Family::Atom { region, values } if *region == atom => Some(values),
                        _ => None,
                    });
                    match found {
                        Some(values) => values[idx] = piece.value,
                        None => {
                            let mut values = vec![0.0; m];
                            values[idx] = piece.value;
                            families.push(Family::Atom {
                                region: atom,
                                values,
                            });
                        }
                    }
                }
            }
        }
    }

    let hulls: Vec<Region> = families.iter().map(Family::hull).collect();
    for (i, a) in hulls.iter().enumerate() {
        for b in &hulls[i + 1..] {
            if !a.disjoint_from(b) {
                return Err(Error::UnsupportedGeometry(
                    "pieces in dimension >= 2 must form disjoint concentric families or coincide"
                        .into(),
                ));
            }
        }
    }

    let omega = unit_ball_volume(n);
    let mut total = 0.0;
    let mut values = vec![0.0; m];
    for fam in &families {
        match fam {
            Family::Atom { region, values } => {
                total += f.eval_at(values)? * region.measure();
            }
            Family::Radial { shells, .. } => {
                let mut radii: Vec<f64> = std::iter::once(0.0)
                    .chain(shells.iter().flat_map(|s| [s.2, s.3]))
                    .collect();
                radii.sort_by(f64::total_cmp);
                radii.dedup();
                for w in radii.windows(2) {
                    let (ra, rb) = (w[0], w[1]);
                    values.iter_mut().for_each(|v| *v = 0.0);
                    for &(idx, value, r_in, r_out) in shells {
                        if r_in <= ra && rb <= r_out {
                            values[idx] = value;
                        }
                    }
                    if values.iter().any(|v| *v > 0.0) {
                        let shell = omega * (rb.powi(n as i32) - ra.powi(n as i32));
                        total += f.eval_at(&values)? * shell;
                    }
                }
            }
        }
    }
    Ok(total)
}

fn check_kernel_dim(k: &Kernel, n: usize) -> Result<()> {
    if k.min_dim() > n {
        return Err(Error::DimensionMismatch {
            expected: k.min_dim(),
            found: n,
        });
    }
    Ok(())
}

/// `int_A int_B k(x - y) dy dx` on a fixed Monte Carlo stream.
pub(crate) fn pair_integral_on_stream(
    a: &Region,
    b: &Region,
    k: &Kernel,
    opts: &RieszOptions,
    stream: u64,
) -> Result<IntegralEstimate> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            found: b.dim(),
        });
    }
    check_kernel_dim(k, a.dim())?;
    if a.dim() == 1 {
        let ia = a.intervals_1d().unwrap_or_default();
        let ib = b.intervals_1d().unwrap_or_default();
        let (value, exact) = pair1d::intervals_pair(&ia, &ib, k)?;
        let method = if exact {
            Method::Exact1D
        } else {
            Method::Quadrature1D
        };
        return Ok(IntegralEstimate::exact(value, method));
    }
    let (value, stderr) = montecarlo::pair_integral(a, b, k, opts.samples, opts.seed, stream)?;
    Ok(IntegralEstimate {
        value,
        stderr,
        method: Method::MonteCarlo {
            samples: opts.samples,
            seed: opts.seed,
        },
    })
}

/// `int_A int_B k(x - y) dy dx`: closed form for the indicator kernel on the
/// line, quadrature for other kernels on the line, Monte Carlo otherwise.
pub fn kernel_pair_integral(
    a: &Region,
    b: &Region,
    k: &Kernel,
    opts: &RieszOptions,
) -> Result<IntegralEstimate> {
    pair_integral_on_stream(a, b, k, opts, 0)
}

/// Two-function Riesz functional, summed over piece pairs. Pair `p * |g| + q`
/// draws from Monte Carlo stream `p * |g| + q`.
pub fn eval_riesz2(
    psi: &Integrand,
    f: &SimpleFunction,
    g: &SimpleFunction,
    k: &Kernel,
    opts: &RieszOptions,
) -> Result<IntegralEstimate> {
    if psi.arity() != 2 {
        return Err(Error::ArityMismatch {
            expected: 2,
            found: psi.arity(),
        });
    }
    let n = common_dim(&[f, g])?;
    check_kernel_dim(k, n)?;
    require_vanishing(psi)?;

    let nq = g.pieces().len();
    let mut jobs = Vec::new();
    for (pi, p) in f.pieces().iter().enumerate() {
        for (qi, q) in g.pieces().iter().enumerate() {
            let weight = psi.eval_at(&[p.value, q.value])?;
            if weight != 0.0 && p.region.measure() > 0.0 && q.region.measure() > 0.0 {
                jobs.push(((pi * nq + qi) as u64, weight, &p.region, &q.region));
            }
        }
    }
    let terms: Vec<Result<(f64, IntegralEstimate)>> = jobs
        .par_iter()
        .map(|&(stream, weight, a, b)| {
            pair_integral_on_stream(a, b, k, opts, stream).map(|est| (weight, est))
        })
        .collect();

    let base = if n == 1 {
        Method::Exact1D
    } else {
        Method::ClosedForm
    };
    let mut value = 0.0;
    let mut var = 0.0;
    let mut method = base;
    for term in terms {
        let (weight, est) = term?;
        value += weight * est.value;
        var += (weight * est.stderr).powi(2);
        method = method.combine(est.method);
    }
    Ok(IntegralEstimate {
        value,
        stderr: var.sqrt(),
        method,
    })
}
