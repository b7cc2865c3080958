//! Adaptive Gauss–Kronrod (7, 15) quadrature. Nodes are interior, so
//! integrands undefined at the interval ends (e.g. `j(r)` at `r = 0`) are fine.

use crate::error::Result;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

const MAX_DEPTH: u32 = 48;

fn gk15<F>(f: &mut F, a: f64, b: f64) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> Result<f64>,
{
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c)?;
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for i in 0..7 {
        let dx = h * XGK[i];
        let pair = f(c - dx)? + f(c + dx)?;
        kronrod += WGK[i] * pair;
        if i % 2 == 1 {
            gauss += WG[i / 2] * pair;
        }
    }
    Ok((kronrod * h, gauss * h))
}

fn adapt<F>(f: &mut F, a: f64, b: f64, tol: f64, depth: u32) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    let (k, g) = gk15(f, a, b)?;
    let m = 0.5 * (a + b);
    if (k - g).abs() <= tol || depth == MAX_DEPTH || !(a < m && m < b) {
        return Ok(k);
    }
    Ok(adapt(f, a, m, 0.5 * tol, depth + 1)? + adapt(f, m, b, 0.5 * tol, depth + 1)?)
}

/// `int_a^b f` to absolute tolerance `tol`.
pub(crate) fn integrate<F>(f: &mut F, a: f64, b: f64, tol: f64) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    if !(a < b) {
        return Ok(0.0);
    }
    adapt(f, a, b, tol, 0)
}

/// Integral over `[lo, hi]`, split at every interior breakpoint.
pub(crate) fn integrate_split<F>(
    f: &mut F,
    lo: f64,
    hi: f64,
    breaks: &[f64],
    tol: f64,
) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    if !(lo < hi) {
        return Ok(0.0);
    }
    let mut cuts: Vec<f64> = breaks
        .iter()
        .copied()
        .filter(|b| *b > lo && *b < hi)
        .collect();
    cuts.push(lo);
    cuts.push(hi);
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let share = tol / (cuts.len() - 1) as f64;
    let mut total = 0.0;
    for w in cuts.windows(2) {
        total += integrate(f, w[0], w[1], share)?;
    }
    Ok(total)
}

/// Integral over `[lo, hi]` after the substitution
/// `s = lo + (hi - lo) (1 - cos phi) / 2`, which removes square-root
/// behaviour at both ends. Breakpoints are given in `s`.
pub(crate) fn integrate_cos_mapped<F>(
    f: &mut F,
    lo: f64,
    hi: f64,
    breaks: &[f64],
    tol: f64,
) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    if !(lo < hi) {
        return Ok(0.0);
    }
    let half = 0.5 * (hi - lo);
    let phis: Vec<f64> = breaks
        .iter()
        .filter(|b| **b > lo && **b < hi)
        .map(|b| (1.0 - (b - lo) / half).clamp(-1.0, 1.0).acos())
        .collect();
    integrate_split(
        &mut |phi: f64| Ok(f(lo + half * (1.0 - phi.cos()))? * half * phi.sin()),
        0.0,
        std::f64::consts::PI,
        &phis,
        tol,
    )
}
