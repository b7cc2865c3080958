//! Counterexample constructions: from a failed hypothesis, build explicit
//! simple functions whose rearrangement decreases the functional, and
//! certify the violation numerically.
//!
//! Every report carries `gap = lhs - rhs`, where `lhs` is the functional at
//! the constructed functions and `rhs` at their rearrangements. A positive
//! gap beyond the numerical error violates the rearrangement inequality.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::functionals::{
    ball_difference_i, check_kernel_hypotheses, eval_hl, eval_riesz2, find_eps_t0,
    pair_integral_on_stream, strict_decrease_holds, IntegralEstimate, LimitProbe, RieszOptions,
};
use crate::integrand::{vanishes_on_hyperplanes, Integrand, Kernel};
use crate::regions::{ball_radius_for_measure, unit_ball_volume, Region, MAX_DIM};
use crate::simplefn::SimpleFunction;
use crate::supermod::{
    check_supermodular, LatticeSpec, SupermodularVerdict, SupermodularityWitness, TAU,
};

/// Relative tolerance for agreement between a direct evaluation and its
/// analytic decomposition on deterministic paths.
pub const CROSS_CHECK_TOL: f64 = 1e-8;

/// Default radii for the Riesz construction, multiplied by `max(1, eps)`.
pub const DEFAULT_R_LIST: [f64; 4] = [2.0, 3.0, 5.0, 10.0];

/// Centers of the two unit-measure sets in dimension >= 2.
const BALL_SEPARATION: f64 = 10.0;

/// Construction parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "construction", rename_all = "snake_case")]
pub enum Construction {
    HardyLittlewood {
        dim: usize,
        witness: SupermodularityWitness,
        e1: Region,
        e2: Region,
    },
    Riesz {
        dim: usize,
        witness: SupermodularityWitness,
        eps: f64,
        t0: f64,
        z: Vec<f64>,
        rho: f64,
        r_list: Vec<f64>,
        kernel_probe: LimitProbe,
    },
    KernelMonotonicity {
        dim: usize,
        z1: Vec<f64>,
        z2: Vec<f64>,
        eps: f64,
        #[serde(rename = "R")]
        radius: f64,
        a: f64,
        b: f64,
    },
}

/// Analytic decomposition of the gap for the final configuration.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Decomposition {
    /// Deficit of the witness quadruple.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub deficit: Option<f64>,
    #[serde(rename = "I_eps", skip_serializing_if = "Option::is_none")]
    pub i_eps: Option<f64>,
    #[serde(rename = "I_R", skip_serializing_if = "Option::is_none")]
    pub i_r: Option<f64>,
    /// `Psi(a, b + b') - Psi(a, b)` for the Riesz construction, `Psi(a, b)`
    /// for the kernel construction.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub secondary: Option<f64>,
    /// Kernel integral over the near pair of small balls.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub near: Option<IntegralEstimate>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub far: Option<IntegralEstimate>,
    /// `lhs - rhs` predicted by the decomposition.
    pub predicted_gap: f64,
    /// `Psi(a, b) |B_eps|^2 (h(z2) - h(z1))`, reported for information only.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub small_eps_proxy_gap: Option<f64>,
    /// Whether the direct and decomposed gaps agree within tolerance.
    pub agrees: bool,
}

/// One CSV row: one per radius `R` or one per construction.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    #[serde(rename = "R_or_pair")]
    pub r_or_pair: String,
    pub lhs: f64,
    pub rhs: f64,
    pub gap: f64,
    #[serde(rename = "I_eps")]
    pub i_eps: Option<f64>,
    #[serde(rename = "I_R")]
    pub i_r: Option<f64>,
    pub stderr: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CounterexampleReport {
    pub construction: Construction,
    pub functions: Vec<SimpleFunction>,
    pub rearranged: Vec<SimpleFunction>,
    pub lhs: IntegralEstimate,
    pub rhs: IntegralEstimate,
    /// `lhs - rhs`.
    pub gap: f64,
    /// Combined standard error of `gap`.
    pub stderr: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub decomposition: Option<Decomposition>,
    pub rows: Vec<ReportRow>,
    /// `gap > TAU + 3 stderr`, plus agreement with the decomposition.
    pub certified: bool,
}

fn combined_stderr(lhs: &IntegralEstimate, rhs: &IntegralEstimate) -> f64 {
    lhs.stderr.hypot(rhs.stderr)
}

fn cross_check_tol(scale: f64, stderr: f64) -> f64 {
    CROSS_CHECK_TOL * scale.abs().max(1.0) + 4.0 * stderr
}

fn require_vanishing(f: &Integrand) -> Result<()> {
    let check = vanishes_on_hyperplanes(f, &LatticeSpec::default())?;
    match check.witness {
        None => Ok(()),
        Some(w) => Err(Error::HypothesisViolated(format!(
            "integrand does not vanish on coordinate hyperplanes: F({:?}) = {}",
            w.point, w.value
        ))),
    }
}

fn check_dim(n: usize) -> Result<()> {
    if n == 0 || n > MAX_DIM {
        return Err(Error::InvalidInput(format!(
            "dimension must be in 1..={MAX_DIM}, got {n}"
        )));
    }
    Ok(())
}

/// Re-evaluates the witness against `f` and validates its shape.
fn validated_witness(f: &Integrand, w: &SupermodularityWitness) -> Result<SupermodularityWitness> {
    if w.y.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
        return Err(Error::InvalidInput(format!(
            "witness point must be nonnegative, got {:?}",
            w.y
        )));
    }
    let fresh = SupermodularityWitness::evaluate(f, w.i, w.j, w.y.clone(), w.h, w.k)?;
    Ok(fresh)
}

fn unit_sets(n: usize) -> Result<(Region, Region)> {
    if n == 1 {
        return Ok((Region::interval(0.0, 1.0)?, Region::interval(1.0, 2.0)?));
    }
    let r = ball_radius_for_measure(1.0, n)?;
    let mut far = vec![0.0; n];
    far[0] = BALL_SEPARATION;
    Ok((Region::ball(vec![0.0; n], r)?, Region::ball(far, r)?))
}

/// Builds the two-set construction for any quadruple and evaluates both
/// sides, without requiring a negative deficit.
///
/// With `E1`, `E2` disjoint of unit measure, `u_i = y_i 1_E1 + (y_i + h) 1_E2`,
/// `u_j = (y_j + k) 1_E1 + y_j 1_E2` and `u_l = y_l 1_{E1 ∪ E2}` otherwise.
/// Rearranging pairs the large values together, so `gap = -deficit`.
pub fn evaluate_hl_construction(
    f: &Integrand,
    w: &SupermodularityWitness,
    n: usize,
) -> Result<CounterexampleReport> {
    check_dim(n)?;
    require_vanishing(f)?;
    let w = validated_witness(f, w)?;
    let (e1, e2) = unit_sets(n)?;
    let both = Region::union(vec![e1.clone(), e2.clone()])?;
    let functions = (0..f.arity())
        .map(|l| {
            let y = w.y[l];
            let sf = if l == w.i {
                SimpleFunction::from_pieces(n, [(y, e1.clone()), (y + w.h, e2.clone())])
            } else if l == w.j {
                SimpleFunction::from_pieces(n, [(y + w.k, e1.clone()), (y, e2.clone())])
            } else {
                SimpleFunction::from_pieces(n, [(y, both.clone())])
            };
            sf.map_err(Error::from)
        })
        .collect::<Result<Vec<_>>>()?;
    let rearranged: Vec<SimpleFunction> = functions.iter().map(SimpleFunction::rearrange).collect();

    let lhs = eval_hl(f, &functions)?;
    let rhs = eval_hl(f, &rearranged)?;
    let gap = lhs.value - rhs.value;
    let measure = e1.measure();
    let predicted = -w.deficit * measure;
    let agrees = (gap - predicted).abs() <= 1e-9 * predicted.abs().max(1.0);
    Ok(CounterexampleReport {
        construction: Construction::HardyLittlewood {
            dim: n,
            witness: w.clone(),
            e1,
            e2,
        },
        functions,
        rearranged,
        lhs,
        rhs,
        gap,
        stderr: 0.0,
        decomposition: Some(Decomposition {
            deficit: Some(w.deficit),
            predicted_gap: predicted,
            agrees,
            ..Decomposition::default()
        }),
        rows: vec![ReportRow {
            r_or_pair: "E1|E2".into(),
            lhs: lhs.value,
            rhs: rhs.value,
            gap,
            i_eps: None,
            i_r: None,
            stderr: 0.0,
        }],
        certified: gap > TAU && agrees,
    })
}

/// Hardy–Littlewood counterexample from a negative-deficit quadruple.
pub fn build_hl_counterexample(
    f: &Integrand,
    w: &SupermodularityWitness,
    n: usize,
) -> Result<CounterexampleReport> {
    require_vanishing(f)?;
    let fresh = validated_witness(f, w)?;
    if !(fresh.deficit < 0.0) {
        return Err(Error::NotAWitness {
            deficit: fresh.deficit,
        });
    }
    evaluate_hl_construction(f, &fresh, n)
}

/// Optional overrides for [`build_riesz_counterexample`].
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct RieszConstructionOptions {
    /// Use this `(eps, t0)` instead of searching; it must pass the strict
    /// decrease predicate.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps_t0: Option<(f64, f64)>,
    /// Increasing radii, all larger than `eps`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r_list: Option<Vec<f64>>,
    #[serde(default)]
    pub riesz: RieszOptions,
}

/// Riesz counterexample for a two-argument `Psi` from a negative-deficit
/// quadruple and a nonincreasing radial kernel.
///
/// With `(a, a', b, b')` the base values and increments of the first and
/// second arguments, `f = a 1_{B_R} + a' 1_{B_eps}` and
/// `g = b 1_{B_rho} + b' 1_{B_eps(z)}` with `|z| = t0`. Then
/// `rhs - lhs = deficit I(eps) + (Psi(a, b + b') - Psi(a, b)) I(R)`.
pub fn build_riesz_counterexample(
    psi: &Integrand,
    w: &SupermodularityWitness,
    k: &Kernel,
    n: usize,
    opts: &RieszConstructionOptions,
) -> Result<CounterexampleReport> {
    check_dim(n)?;
    if psi.arity() != 2 {
        return Err(Error::ArityMismatch {
            expected: 2,
            found: psi.arity(),
        });
    }
    require_vanishing(psi)?;
    let w = validated_witness(psi, w)?;
    if !(w.deficit < 0.0) {
        return Err(Error::NotAWitness { deficit: w.deficit });
    }
    if !k.is_radial() {
        return Err(Error::NotRadial);
    }

    let kernel_probe = check_kernel_hypotheses(k, n)?;
    let (eps, t0) = match opts.eps_t0 {
        Some((eps, t0)) => {
            if !strict_decrease_holds(k, eps, t0)? {
                return Err(Error::HypothesisViolated(format!(
                    "supplied (eps, t0) = ({eps}, {t0}) fails the strict decrease test"
                )));
            }
            (eps, t0)
        }
        None => find_eps_t0(k, n)?,
    };

    let r_list = match &opts.r_list {
        Some(list) => {
            if list.is_empty()
                || list.windows(2).any(|p| !(p[0] < p[1]))
                || list.iter().any(|r| !(r.is_finite() && *r > eps))
            {
                return Err(Error::InvalidInput(format!(
                    "R list must be nonempty, increasing and above eps = {eps}"
                )));
            }
            list.clone()
        }
        None => DEFAULT_R_LIST.iter().map(|r| r * eps.max(1.0)).collect(),
    };

    let (a, a_inc, b, b_inc) = if w.i == 0 {
        (w.y[0], w.h, w.y[1], w.k)
    } else {
        (w.y[0], w.k, w.y[1], w.h)
    };
    let mut z = vec![0.0; n];
    z[0] = t0;
    let rho = t0 + eps + 1.0;
    let origin = vec![0.0; n];
    let small = Region::ball(origin.clone(), eps)?;
    let shifted = Region::ball(z.clone(), eps)?;
    let g = SimpleFunction::from_pieces(
        n,
        [
            (b + b_inc, shifted.clone()),
            (
                b,
                Region::difference(Region::ball(origin.clone(), rho)?, shifted)?,
            ),
        ],
    )?;
    let g_star = g.rearrange();

    let secondary = psi.eval_at(&[a, b + b_inc])? - psi.eval_at(&[a, b])?;
    let i_eps = ball_difference_i(k, eps, &z, eps, n)?;

    let mut rows = Vec::with_capacity(r_list.len());
    let mut last = None;
    for &radius in &r_list {
        let f = SimpleFunction::from_pieces(
            n,
            [
                (a + a_inc, small.clone()),
                (a, Region::annulus(origin.clone(), eps, radius)?),
            ],
        )?;
        let f_star = f.rearrange();
        let lhs = eval_riesz2(psi, &f, &g, k, &opts.riesz)?;
        let rhs = eval_riesz2(psi, &f_star, &g_star, k, &opts.riesz)?;
        let i_r = ball_difference_i(k, eps, &z, radius, n)?;
        let gap = lhs.value - rhs.value;
        let stderr = combined_stderr(&lhs, &rhs);
        rows.push(ReportRow {
            r_or_pair: format!("{radius}"),
            lhs: lhs.value,
            rhs: rhs.value,
            gap,
            i_eps: Some(i_eps),
            i_r: Some(i_r),
            stderr,
        });
        last = Some((f, f_star, lhs, rhs, i_r));
    }
    let (f, f_star, lhs, rhs, i_r) = last.expect("R list is nonempty");

    let gap = lhs.value - rhs.value;
    let stderr = combined_stderr(&lhs, &rhs);
    let predicted = -(w.deficit * i_eps + secondary * i_r);
    let scale = lhs.value.abs().max(rhs.value.abs());
    let agrees = (gap - predicted).abs() <= cross_check_tol(scale, stderr);
    Ok(CounterexampleReport {
        construction: Construction::Riesz {
            dim: n,
            witness: w.clone(),
            eps,
            t0,
            z,
            rho,
            r_list,
            kernel_probe,
        },
        functions: vec![f, g],
        rearranged: vec![f_star, g_star],
        lhs,
        rhs,
        gap,
        stderr,
        decomposition: Some(Decomposition {
            deficit: Some(w.deficit),
            i_eps: Some(i_eps),
            i_r: Some(i_r),
            secondary: Some(secondary),
            predicted_gap: predicted,
            agrees,
            ..Decomposition::default()
        }),
        rows,
        certified: gap > TAU + 3.0 * stderr && agrees,
    })
}

fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// Monte Carlo stream indices for the two small-ball integrals, kept apart
/// from the per-piece-pair streams of [`eval_riesz2`].
const NEAR_STREAM: u64 = 1 << 32;
const FAR_STREAM: u64 = NEAR_STREAM + 1;

/// Kernel monotonicity counterexample for a field kernel `h`.
///
/// With `R = (|z1| + |z2|) / 2`, `f = a` on `(B_R \ B_eps(z1)) ∪ B_eps(z2)` and
/// `g = b 1_{B_eps}`, the rearrangement is `f* = a 1_{B_R}`, `g* = g`, and
/// `rhs - lhs = Psi(a, b) (K(B_eps(z1), B_eps) - K(B_eps(z2), B_eps))`.
#[allow(clippy::too_many_arguments)]
pub fn build_kernel_monotonicity_counterexample(
    psi: &Integrand,
    k: &Kernel,
    z1: &[f64],
    z2: &[f64],
    eps: f64,
    a: f64,
    b: f64,
    opts: &RieszOptions,
) -> Result<CounterexampleReport> {
    if psi.arity() != 2 {
        return Err(Error::ArityMismatch {
            expected: 2,
            found: psi.arity(),
        });
    }
    let n = z1.len();
    check_dim(n)?;
    if z2.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: z2.len(),
        });
    }
    if k.min_dim() > n {
        return Err(Error::DimensionMismatch {
            expected: k.min_dim(),
            found: n,
        });
    }
    require_vanishing(psi)?;
    if let SupermodularVerdict::Violation { witness, .. } =
        check_supermodular(psi, &LatticeSpec::default())?
    {
        return Err(Error::HypothesisViolated(format!(
            "integrand is not supermodular: deficit {} at y = {:?}",
            witness.deficit, witness.y
        )));
    }
    if !(a > 0.0 && b > 0.0) {
        return Err(Error::InvalidInput(format!(
            "values must be positive, got a = {a}, b = {b}"
        )));
    }
    let psi_ab = psi.eval_at(&[a, b])?;
    if !(psi_ab > 0.0) {
        return Err(Error::HypothesisViolated(format!(
            "need Psi(a, b) > 0, got Psi({a}, {b}) = {psi_ab}"
        )));
    }
    let (r1, r2) = (norm(z1), norm(z2));
    if !(r1 > 0.0 && r1 < r2 && eps > 0.0 && eps < 0.5 * (r2 - r1)) {
        return Err(Error::Geometry(format!(
            "need 0 < |z1| < |z2| and 0 < eps < (|z2| - |z1|) / 2, got |z1| = {r1}, |z2| = {r2}, eps = {eps}"
        )));
    }

    let radius = 0.5 * (r1 + r2);
    let origin = vec![0.0; n];
    let hole = Region::ball(z1.to_vec(), eps)?;
    let bump = Region::ball(z2.to_vec(), eps)?;
    let core = Region::ball(origin.clone(), eps)?;
    let support = Region::union(vec![
        Region::difference(Region::ball(origin.clone(), radius)?, hole.clone())?,
        bump.clone(),
    ])?;
    let f = SimpleFunction::from_pieces(n, [(a, support)])?;
    let g = SimpleFunction::from_pieces(n, [(b, core.clone())])?;
    let f_star = f.rearrange();
    let g_star = g.rearrange();
    let expected = SimpleFunction::from_pieces(n, [(a, Region::ball(origin, radius)?)])?;
    if !f_star.approx_eq(&expected, 1e-9) {
        return Err(Error::Geometry(
            "rearranged support does not match B_R".into(),
        ));
    }

    let lhs = eval_riesz2(psi, &f, &g, k, opts)?;
    let rhs = eval_riesz2(psi, &f_star, &g_star, k, opts)?;
    let gap = lhs.value - rhs.value;
    let stderr = combined_stderr(&lhs, &rhs);

    let near = pair_integral_on_stream(&hole, &core, k, opts, NEAR_STREAM)?;
    let far = pair_integral_on_stream(&bump, &core, k, opts, FAR_STREAM)?;
    let predicted = -psi_ab * (near.value - far.value);
    let predicted_err = psi_ab * near.stderr.hypot(far.stderr);
    let h1 = k.at(z1).map_err(|e| Error::eval(z1, e))?;
    let h2 = k.at(z2).map_err(|e| Error::eval(z2, e))?;
    let ball = unit_ball_volume(n) * eps.powi(n as i32);
    let proxy = psi_ab * ball * ball * (h2 - h1);
    let scale = lhs.value.abs().max(rhs.value.abs());
    let agrees = (gap - predicted).abs() <= cross_check_tol(scale, stderr.hypot(predicted_err));

    Ok(CounterexampleReport {
        construction: Construction::KernelMonotonicity {
            dim: n,
            z1: z1.to_vec(),
            z2: z2.to_vec(),
            eps,
            radius,
            a,
            b,
        },
        functions: vec![f, g],
        rearranged: vec![f_star, g_star],
        lhs,
        rhs,
        gap,
        stderr,
        decomposition: Some(Decomposition {
            secondary: Some(psi_ab),
            near: Some(near),
            far: Some(far),
            predicted_gap: predicted,
            small_eps_proxy_gap: Some(proxy),
            agrees,
            ..Decomposition::default()
        }),
        rows: vec![ReportRow {
            r_or_pair: format!("{z1:?}|{z2:?}"),
            lhs: lhs.value,
            rhs: rhs.value,
            gap,
            i_eps: None,
            i_r: None,
            stderr,
        }],
        certified: gap > TAU + 3.0 * stderr && agrees,
    })
}

/// `h(z1) - h(z2)`.
pub fn kernel_pair_difference(k: &Kernel, z1: &[f64], z2: &[f64]) -> Result<f64> {
    let h1 = k.at(z1).map_err(|e| Error::eval(z1, e))?;
    let h2 = k.at(z2).map_err(|e| Error::eval(z2, e))?;
    Ok(h1 - h2)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonotonePair {
    pub z1: Vec<f64>,
    pub z2: Vec<f64>,
    /// `h(z1) - h(z2)` with `|z1| <= |z2|`.
    pub difference: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RadialMonotoneVerdict {
    pub passes: bool,
    pub pairs: usize,
    pub min_difference: f64,
    pub worst: Option<MonotonePair>,
    /// Largest `|h(x) - h(Qx)|` over sampled rotations or reflections `Q`.
    pub radial_defect: f64,
}

fn random_point<R: Rng>(rng: &mut R, n: usize, radius: f64) -> Vec<f64> {
    let mut dir: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
    let len = norm(&dir).max(f64::MIN_POSITIVE);
    let r = radius * rng.random::<f64>();
    dir.iter_mut().for_each(|v| *v *= r / len);
    dir
}

/// Samples `pair_count` pairs in `B_radius` and reports the minimum of
/// `h(z1) - h(z2)` over pairs with `|z1| <= |z2|`. Radiality is probed by
/// comparing `h(x)` with `h` at a random rotation of `x` (a reflection on
/// the line). Fails if either defect exceeds `TAU`.
pub fn verify_kernel_radial_monotone(
    k: &Kernel,
    n: usize,
    pair_count: usize,
    seed: u64,
    radius: f64,
) -> Result<RadialMonotoneVerdict> {
    check_dim(n)?;
    if k.min_dim() > n {
        return Err(Error::DimensionMismatch {
            expected: k.min_dim(),
            found: n,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: Option<MonotonePair> = None;
    let mut radial_defect = 0.0f64;
    for _ in 0..pair_count {
        let mut z1 = random_point(&mut rng, n, radius);
        let mut z2 = random_point(&mut rng, n, radius);
        if norm(&z1) > norm(&z2) {
            std::mem::swap(&mut z1, &mut z2);
        }
        let difference = kernel_pair_difference(k, &z1, &z2)?;
        if worst.as_ref().is_none_or(|w| difference < w.difference) {
            worst = Some(MonotonePair { z1, z2, difference });
        }

        let x = random_point(&mut rng, n, radius);
        let r = norm(&x);
        let qx = if n == 1 {
            vec![-x[0]]
        } else {
            let mut y = random_point(&mut rng, n, 1.0);
            let len = norm(&y).max(f64::MIN_POSITIVE);
            y.iter_mut().for_each(|v| *v *= r / len);
            y
        };
        radial_defect = radial_defect.max(kernel_pair_difference(k, &x, &qx)?.abs());
    }
    let min_difference = worst.as_ref().map_or(0.0, |w| w.difference);
    Ok(RadialMonotoneVerdict {
        passes: min_difference >= -TAU && radial_defect <= TAU,
        pairs: pair_count,
        min_difference,
        worst,
        radial_defect,
    })
}
