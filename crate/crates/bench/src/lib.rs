//! Fixtures shared by the criterion benches.

use rearrange_lab_core::{Integrand, Kernel, LatticeSpec, Region, SimpleFunction};

/// A 1D step function with `pieces` adjacent unit intervals carrying values
/// `1, 2, .., pieces` in a scrambled order.
pub fn staircase(pieces: usize) -> SimpleFunction {
    let parts = (0..pieces).map(|p| {
        let value = ((p * 7) % pieces + 1) as f64;
        let lo = p as f64;
        (
            value,
            Region::interval(lo, lo + 1.0).expect("valid interval"),
        )
    });
    SimpleFunction::from_pieces(1, parts).expect("disjoint pieces")
}

/// Concentric 2D annuli with values decreasing outward.
pub fn target(rings: usize) -> SimpleFunction {
    let parts = (0..rings).map(|r| {
        let value = (rings - r) as f64;
        let region = if r == 0 {
            Region::ball(vec![0.0, 0.0], 1.0)
        } else {
            Region::annulus(vec![0.0, 0.0], r as f64, r as f64 + 1.0)
        };
        (value, region.expect("valid ring"))
    });
    SimpleFunction::from_pieces(2, parts).expect("disjoint rings")
}

pub fn polynomial_integrand() -> Integrand {
    Integrand::parse("x1*x2 - x1^2*x2^2", 2).expect("valid integrand")
}

pub fn product_integrand() -> Integrand {
    Integrand::parse("x1*x2", 2).expect("valid integrand")
}

pub fn smooth_kernel() -> Kernel {
    Kernel::radial("exp(-r)").expect("valid kernel")
}

pub fn indicator_kernel() -> Kernel {
    Kernel::indicator(1.0).expect("valid kernel")
}

pub fn default_lattice() -> LatticeSpec {
    LatticeSpec::default()
}
