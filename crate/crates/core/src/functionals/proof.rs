//! Ball integrals of a radial kernel and the kernel hypothesis gates used by
//! the Riesz necessity construction.
//!
//! `H(x) = int_{B_eps(0)} j(|x - y|) dy` is radial, `h(|x|) = H(x)`, and
//! `I(t) = int_{B_t(0)} H - int_{B_t(z)} H`. On the line both reduce to
//! interval-pair integrals. In dimension 2 and 3 they are computed by nested
//! radial quadrature using the measure of a sphere inside an offset ball.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::integrand::Kernel;
use crate::regions::{sphere_measure, MAX_DIM};

use super::pair1d::{interval_pair, QUAD_TOL};
use super::quad::{integrate_cos_mapped, integrate_split};

const INNER_TOL: f64 = 1e-12;
const OUTER_TOL: f64 = 1e-10;

fn j(k: &Kernel, r: f64) -> Result<f64> {
    k.radial_value(r).map_err(|e| Error::eval(&[r], e))
}

fn require_radial(k: &Kernel, n: usize) -> Result<()> {
    if !k.is_radial() {
        return Err(Error::NotRadial);
    }
    if n == 0 || n > MAX_DIM {
        return Err(Error::InvalidInput(format!(
            "dimension must be in 1..={MAX_DIM}, got {n}"
        )));
    }
    Ok(())
}

/// Measure of `{|u| = s} ∩ B_rho(d e_1)` for `n` in 2..=3.
pub(crate) fn sphere_in_ball(n: usize, s: f64, rho: f64, d: f64) -> f64 {
    if s <= 0.0 {
        return 0.0;
    }
    if s + d <= rho {
        return sphere_measure(n, s);
    }
    if s >= d + rho || s <= d - rho {
        return 0.0;
    }
    let c0 = ((s * s + d * d - rho * rho) / (2.0 * s * d)).clamp(-1.0, 1.0);
    match n {
        2 => 2.0 * s * c0.acos(),
        _ => 2.0 * std::f64::consts::PI * s * s * (1.0 - c0),
    }
}

/// `h(t) = H(x)` for `|x| = t`.
pub fn ball_convolution_h(k: &Kernel, eps: f64, n: usize, t: f64) -> Result<f64> {
    require_radial(k, n)?;
    if !(eps > 0.0 && t >= 0.0) {
        return Err(Error::InvalidInput(format!(
            "need eps > 0 and t >= 0, got eps = {eps}, t = {t}"
        )));
    }
    let kinks = k.radial_breakpoints();
    if n == 1 {
        if let Some(r) = k.indicator_radius() {
            return Ok(((t + eps).min(r) - (t - eps).max(-r)).max(0.0));
        }
        let breaks: Vec<f64> = kinks.iter().flat_map(|b| [*b, -*b]).chain([0.0]).collect();
        return integrate_split(
            &mut |u: f64| j(k, u.abs()),
            t - eps,
            t + eps,
            &breaks,
            QUAD_TOL,
        );
    }
    // Spheres of radius r < eps - t lie inside B_eps(x); the rest are caps.
    let full = integrate_split(
        &mut |r: f64| Ok(j(k, r)? * sphere_measure(n, r)),
        0.0,
        (eps - t).max(0.0),
        &kinks,
        INNER_TOL,
    )?;
    let caps = integrate_cos_mapped(
        &mut |r: f64| Ok(j(k, r)? * sphere_in_ball(n, r, eps, t)),
        (t - eps).abs(),
        t + eps,
        &kinks,
        INNER_TOL,
    )?;
    Ok(full + caps)
}

/// `I(t) = int_{B_t(0)} H - int_{B_t(z)} H`.
pub fn ball_difference_i(k: &Kernel, eps: f64, z: &[f64], t: f64, n: usize) -> Result<f64> {
    require_radial(k, n)?;
    if z.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: z.len(),
        });
    }
    let d = z.iter().map(|v| v * v).sum::<f64>().sqrt();
    if !(d > 0.0 && eps > 0.0 && t > 0.0) {
        return Err(Error::Geometry(format!(
            "need |z| > 0, eps > 0 and t > 0, got |z| = {d}, eps = {eps}, t = {t}"
        )));
    }
    if n == 1 {
        let c = z[0];
        let (near, _) = interval_pair((-t, t), (-eps, eps), k)?;
        let (far, _) = interval_pair((c - t, c + t), (-eps, eps), k)?;
        return Ok(near - far);
    }
    let mut breaks = vec![eps];
    for b in k.radial_breakpoints() {
        breaks.push((b - eps).abs());
        breaks.push(b + eps);
    }
    let h = |s: f64| ball_convolution_h(k, eps, n, s);
    // Spheres of radius s < t - d lie inside both balls and cancel; the
    // remaining shells of B_t(0) are full, those of B_t(z) are caps.
    let shells = integrate_split(
        &mut |s: f64| Ok(h(s)? * sphere_measure(n, s)),
        (t - d).max(0.0),
        t,
        &breaks,
        OUTER_TOL,
    )?;
    let caps = integrate_cos_mapped(
        &mut |s: f64| Ok(h(s)? * sphere_in_ball(n, s, t, d)),
        (t - d).abs(),
        t + d,
        &breaks,
        OUTER_TOL,
    )?;
    Ok(shells - caps)
}

/// Outcome of the finite probe of `r^(n-1) j(r) -> 0`, monotonicity and
/// non-triviality. A heuristic gate, not a proof.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LimitProbe {
    /// Max of `r^(n-1) |j(r)|` over probes in `[1, 10]`.
    pub head: f64,
    /// Max of `r^(n-1) |j(r)|` over probes in `[100, 1000]`.
    pub tail: f64,
    pub decays: bool,
    pub nonincreasing: bool,
    pub nontrivial: bool,
}

fn geometric(lo: f64, hi: f64, count: usize) -> impl Iterator<Item = f64> {
    let ratio = (hi / lo).ln() / (count - 1) as f64;
    (0..count).map(move |i| lo * (ratio * i as f64).exp())
}

pub fn limit_probe(k: &Kernel, n: usize) -> Result<LimitProbe> {
    require_radial(k, n)?;
    let weighted = |r: f64| -> Result<f64> { Ok(r.powi(n as i32 - 1) * j(k, r)?.abs()) };
    let mut head = 0.0f64;
    for r in geometric(1.0, 10.0, 16) {
        head = head.max(weighted(r)?);
    }
    let mut tail = 0.0f64;
    for r in geometric(100.0, 1000.0, 16) {
        tail = tail.max(weighted(r)?);
    }
    let mut nonincreasing = true;
    let mut nontrivial = false;
    let mut prev = j(k, 0.0)?;
    nontrivial |= prev != 0.0;
    for r in geometric(1e-3, 1e3, 241) {
        let v = j(k, r)?;
        nonincreasing &= v <= prev + 1e-12 * prev.abs().max(1.0);
        nontrivial |= v != 0.0;
        prev = v;
    }
    Ok(LimitProbe {
        head,
        tail,
        decays: tail == 0.0 || tail <= 0.5 * head,
        nonincreasing,
        nontrivial,
    })
}

/// Runs [`limit_probe`] and turns a failed probe into an error.
pub fn check_kernel_hypotheses(k: &Kernel, n: usize) -> Result<LimitProbe> {
    let probe = limit_probe(k, n)?;
    if !probe.nontrivial {
        return Err(Error::HypothesisViolated(
            "kernel vanishes on every probe".into(),
        ));
    }
    if !probe.nonincreasing {
        return Err(Error::HypothesisViolated(
            "kernel is not nonincreasing on the probe grid".into(),
        ));
    }
    if !probe.decays {
        return Err(Error::LimitViolated(format!(
            "max on [1, 10] is {}, max on [100, 1000] is {}",
            probe.head, probe.tail
        )));
    }
    Ok(probe)
}

const SAMPLES: usize = 256;

/// `t0 > 2 eps` and `sup {j(t) : |t - t0| <= eps} < inf {j(s) : 0 <= s <= eps}`,
/// both sampled on 257 evenly spaced points.
pub fn strict_decrease_holds(k: &Kernel, eps: f64, t0: f64) -> Result<bool> {
    if !k.is_radial() {
        return Err(Error::NotRadial);
    }
    if !(eps > 0.0 && t0 > 2.0 * eps) {
        return Ok(false);
    }
    let mut inf_near = f64::INFINITY;
    let mut sup_far = f64::NEG_INFINITY;
    for i in 0..=SAMPLES {
        let w = i as f64 / SAMPLES as f64;
        inf_near = inf_near.min(j(k, eps * w)?);
        sup_far = sup_far.max(j(k, t0 - eps + 2.0 * eps * w)?);
    }
    Ok(sup_far < inf_near)
}

/// Searches `eps = 0.25 / 2^a`, `t0 = eps (2 + 2^b)` for a pair satisfying
/// [`strict_decrease_holds`], after the kernel hypothesis gate.
pub fn find_eps_t0(k: &Kernel, n: usize) -> Result<(f64, f64)> {
    check_kernel_hypotheses(k, n)?;
    for a in 0..=30 {
        let eps = 0.25 / f64::powi(2.0, a);
        for b in 0..=40 {
            let t0 = eps * (2.0 + f64::powi(2.0, b));
            if strict_decrease_holds(k, eps, t0)? {
                return Ok((eps, t0));
            }
        }
    }
    Err(Error::NoStrictDecreaseFound)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn h_examples() {
        let k = Kernel::indicator(1.0).unwrap();
        assert_eq!(ball_convolution_h(&k, 0.25, 1, 0.0).unwrap(), 0.5);
        assert_eq!(ball_convolution_h(&k, 0.25, 1, 0.75).unwrap(), 0.5);
        assert_eq!(ball_convolution_h(&k, 0.25, 1, 1.25).unwrap(), 0.0);
        let smooth = Kernel::radial("exp(-r)").unwrap();
        // int_{-0.25}^{0.25} exp(-|u|) du at t = 0.
        let exact = 2.0 * (1.0 - (-0.25f64).exp());
        assert!((ball_convolution_h(&smooth, 0.25, 1, 0.0).unwrap() - exact).abs() < 1e-13);
        assert!(matches!(
            ball_convolution_h(&Kernel::field("x1").unwrap(), 0.25, 1, 0.0),
            Err(Error::NotRadial)
        ));
    }

    #[test]
    fn i_examples() {
        let k = Kernel::indicator(1.0).unwrap();
        let z = [1.5];
        assert!((ball_difference_i(&k, 0.25, &z, 0.25, 1).unwrap() - 0.25).abs() < 1e-12);
        assert!((ball_difference_i(&k, 0.25, &z, 2.0, 1).unwrap() - 0.25).abs() < 1e-12);
        assert_eq!(ball_difference_i(&k, 0.25, &z, 3.0, 1).unwrap(), 0.0);
    }

    #[test]
    fn h_in_the_plane_is_a_lens_area() {
        // Indicator kernel: H(x) = |B_eps(0) ∩ B_R(x)|. At t = 0 it is pi eps^2.
        let k = Kernel::indicator(1.0).unwrap();
        let h0 = ball_convolution_h(&k, 0.25, 2, 0.0).unwrap();
        assert!((h0 - std::f64::consts::PI * 0.0625).abs() < 1e-10);
        // Two unit disks at distance 1 overlap in 2 pi / 3 - sqrt(3) / 2.
        let lens = 2.0 * std::f64::consts::PI / 3.0 - 3f64.sqrt() / 2.0;
        assert!((ball_convolution_h(&k, 1.0, 2, 1.0).unwrap() - lens).abs() < 1e-9);
        // Balls in R^3 with radii 1 at distance 1: 5 pi / 12.
        let lens3 = 5.0 * std::f64::consts::PI / 12.0;
        assert!((ball_convolution_h(&k, 1.0, 3, 1.0).unwrap() - lens3).abs() < 1e-9);
    }

    #[test]
    fn i_in_the_plane() {
        let k = Kernel::indicator(1.0).unwrap();
        let z = [1.5, 0.0];
        let small = ball_difference_i(&k, 0.25, &z, 0.25, 2).unwrap();
        assert!(small > 0.0);
        // Both balls cover supp H once t >= |z| + 1.25.
        let big = ball_difference_i(&k, 0.25, &z, 3.0, 2).unwrap();
        assert!(big.abs() < 1e-8, "{big}");
    }

    #[test]
    fn eps_t0_search() {
        let k = Kernel::indicator(1.0).unwrap();
        assert_eq!(find_eps_t0(&k, 1).unwrap(), (0.25, 1.5));
        let e = Kernel::radial("exp(-r)").unwrap();
        assert!(strict_decrease_holds(&e, 0.1, 0.5).unwrap());
        let (eps, t0) = find_eps_t0(&e, 1).unwrap();
        assert!(strict_decrease_holds(&e, eps, t0).unwrap());
        let one = Kernel::radial("1").unwrap();
        assert!(matches!(find_eps_t0(&one, 1), Err(Error::LimitViolated(_))));
        let inv = Kernel::radial("1/(1+r)").unwrap();
        assert!(find_eps_t0(&inv, 1).is_ok());
        assert!(matches!(find_eps_t0(&inv, 2), Err(Error::LimitViolated(_))));
        let up = Kernel::radial("min(r,1)").unwrap();
        assert!(matches!(
            find_eps_t0(&up, 1),
            Err(Error::HypothesisViolated(_))
        ));
    }
}
