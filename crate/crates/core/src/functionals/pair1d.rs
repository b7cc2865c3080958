//! Kernel double integrals over pairs of intervals on the line.
//!
//! With `s = x - y`, `int_A int_B k(x - y) dy dx = int k(s) L(s) ds` where
//! `L(s) = |A ∩ (B + s)|` is a trapezoid in `s`. The indicator kernel then
//! integrates in closed form; other kernels go through adaptive quadrature
//! split at the trapezoid corners and the kernel's own breakpoints.

use crate::error::{Error, Result};
use crate::integrand::Kernel;

use super::quad::integrate_split;

/// Absolute quadrature tolerance per interval pair, scaled by `|A| |B|`.
pub(crate) const QUAD_TOL: f64 = 1e-13;

#[derive(Clone, Copy, Debug)]
struct Trapezoid {
    // Knots s1 <= s2 <= s3 <= s4 with L = 0, top, top, 0.
    knots: [f64; 4],
    top: f64,
    mass: f64,
}

impl Trapezoid {
    fn new(a: (f64, f64), b: (f64, f64)) -> Self {
        let (la, lb) = (a.1 - a.0, b.1 - b.0);
        let c1 = a.0 - b.0;
        let c2 = a.1 - b.1;
        Trapezoid {
            knots: [a.0 - b.1, c1.min(c2), c1.max(c2), a.1 - b.0],
            top: la.min(lb),
            mass: la * lb,
        }
    }

    fn value(&self, s: f64) -> f64 {
        let [s1, s2, s3, s4] = self.knots;
        if s <= s1 || s >= s4 {
            0.0
        } else if s < s2 {
            self.top * (s - s1) / (s2 - s1)
        } else if s <= s3 {
            self.top
        } else {
            self.top * (s4 - s) / (s4 - s3)
        }
    }

    /// Exact `int_lo^hi L(s) ds`.
    fn integral(&self, lo: f64, hi: f64) -> f64 {
        let [s1, s2, s3, s4] = self.knots;
        if lo <= s1 && hi >= s4 {
            return self.mass;
        }
        let mut total = 0.0;
        for (p, q) in [(s1, s2), (s2, s3), (s3, s4)] {
            let l = p.max(lo);
            let r = q.min(hi);
            if l < r {
                total += 0.5 * (r - l) * (self.value(l) + self.value(r));
            }
        }
        total
    }
}

/// Double integral over one interval pair; the flag reports whether the
/// value is closed-form.
pub(crate) fn interval_pair(a: (f64, f64), b: (f64, f64), k: &Kernel) -> Result<(f64, bool)> {
    let trap = Trapezoid::new(a, b);
    if let Some(radius) = k.indicator_radius() {
        return Ok((trap.integral(-radius, radius), true));
    }
    let [s1, s2, s3, s4] = trap.knots;
    let mut breaks = vec![s2, s3, 0.0];
    for b in k.radial_breakpoints() {
        breaks.push(b);
        breaks.push(-b);
    }
    let tol = QUAD_TOL * trap.mass.max(1.0);
    let mut integrand = |s: f64| -> Result<f64> {
        let kv = k.at(&[s]).map_err(|e| Error::eval(&[s], e))?;
        Ok(kv * trap.value(s))
    };
    let v = integrate_split(&mut integrand, s1, s4, &breaks, tol)?;
    Ok((v, false))
}

/// Sum of [`interval_pair`] over two interval lists.
pub(crate) fn intervals_pair(
    a: &[(f64, f64)],
    b: &[(f64, f64)],
    k: &Kernel,
) -> Result<(f64, bool)> {
    let mut total = 0.0;
    let mut exact = true;
    for &ia in a {
        for &ib in b {
            let (v, e) = interval_pair(ia, ib, k)?;
            total += v;
            exact &= e;
        }
    }
    Ok((total, exact))
}
