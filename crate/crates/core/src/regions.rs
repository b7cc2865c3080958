//! Regions of R^n with closed-form Lebesgue measure.
//!
//! Every region is open: intervals, boxes and balls exclude their boundary,
//! and an annulus `{r_in < |x - c| < r_out}` excludes both spheres. Boundaries
//! have measure zero, so no integral in this crate depends on the choice.
//!
//! Supported dimensions are 1, 2 and 3. Disjointness and containment are
//! decided by explicit certificates (exact interval arithmetic in 1D, center
//! distance tests for balls and annuli, axis separation for boxes). When no
//! certificate applies the answer is conservatively "no", so a union whose
//! parts cannot be proven disjoint is rejected at construction.

use std::f64::consts::PI;

use rand::distr::Open01;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const MAX_DIM: usize = 3;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RegionError {
    #[error("unsupported dimension {0} (expected 1..=3)")]
    UnsupportedDimension(usize),
    #[error("non-finite coordinate or radius")]
    NonFinite,
    #[error("empty interval: lo = {lo} must be < hi = {hi}")]
    EmptyInterval { lo: f64, hi: f64 },
    #[error("negative radius {0}")]
    NegativeRadius(f64),
    #[error("annulus requires 0 <= r_in < r_out, got r_in = {r_in}, r_out = {r_out}")]
    EmptyAnnulus { r_in: f64, r_out: f64 },
    #[error("box corners must satisfy lo < hi componentwise")]
    EmptyBox,
    #[error("regions of dimensions {0} and {1} cannot be combined")]
    MixedDimensions(usize, usize),
    #[error("union is empty")]
    EmptyUnion,
    #[error("union parts {0} and {1} are not certifiably disjoint")]
    Overlap(usize, usize),
    #[error("difference requires the removed region to lie inside the outer region")]
    InnerNotContained,
    #[error("negative measure {0}")]
    NegativeMeasure(f64),
    #[error("cannot sample a region of zero measure")]
    ZeroMeasure,
}

/// Volume of the unit ball in R^n.
pub fn unit_ball_volume(n: usize) -> f64 {
    match n {
        0 => 1.0,
        1 => 2.0,
        2 => PI,
        3 => 4.0 * PI / 3.0,
        _ => 2.0 * PI / n as f64 * unit_ball_volume(n - 2),
    }
}

/// Surface area of the sphere of radius `r` in R^n, `n * omega_n * r^(n-1)`.
/// In 1D this is the counting measure of `{-r, r}`, i.e. 2.
pub fn sphere_measure(n: usize, r: f64) -> f64 {
    n as f64 * unit_ball_volume(n) * r.powi(n as i32 - 1)
}

/// Radius `r` with `omega_n * r^n = m`.
pub fn ball_radius_for_measure(m: f64, n: usize) -> Result<f64, RegionError> {
    check_dim(n)?;
    if !m.is_finite() {
        return Err(RegionError::NonFinite);
    }
    if m < 0.0 {
        return Err(RegionError::NegativeMeasure(m));
    }
    let base = m / unit_ball_volume(n);
    Ok(match n {
        1 => base,
        2 => base.sqrt(),
        _ => base.cbrt(),
    })
}

fn check_dim(n: usize) -> Result<(), RegionError> {
    if (1..=MAX_DIM).contains(&n) {
        Ok(())
    } else {
        Err(RegionError::UnsupportedDimension(n))
    }
}

fn check_finite(xs: &[f64]) -> Result<(), RegionError> {
    if xs.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(RegionError::NonFinite)
    }
}

fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Shape data of a region, also its JSON encoding.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum RegionKind {
    Interval {
        lo: f64,
        hi: f64,
    },
    Ball {
        center: Vec<f64>,
        radius: f64,
    },
    Annulus {
        center: Vec<f64>,
        r_in: f64,
        r_out: f64,
    },
    Box {
        lo: Vec<f64>,
        hi: Vec<f64>,
    },
    Union {
        parts: Vec<Region>,
    },
    /// `outer` with the closure of `inner` removed; `inner` must lie in `outer`.
    Difference {
        outer: Box<Region>,
        inner: Box<Region>,
    },
}

/// A validated, finite-measure open subset of R^n.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RegionKind", into = "RegionKind")]
pub struct Region {
    dim: usize,
    kind: RegionKind,
}

impl TryFrom<RegionKind> for Region {
    type Error = RegionError;

    fn try_from(kind: RegionKind) -> Result<Self, Self::Error> {
        Region::new(kind)
    }
}

impl From<Region> for RegionKind {
    fn from(region: Region) -> Self {
        region.kind
    }
}

/// Radial description `(center, r_in, r_out)` of a ball (r_in = 0) or annulus.
#[derive(Clone, Copy, Debug)]
struct Radial<'a> {
    center: &'a [f64],
    r_in: f64,
    r_out: f64,
}

impl Region {
    pub fn new(kind: RegionKind) -> Result<Self, RegionError> {
        let dim = match &kind {
            RegionKind::Interval { lo, hi } => {
                check_finite(&[*lo, *hi])?;
                if lo >= hi {
                    return Err(RegionError::EmptyInterval { lo: *lo, hi: *hi });
                }
                1
            }
            RegionKind::Ball { center, radius } => {
                check_dim(center.len())?;
                check_finite(center)?;
                check_finite(&[*radius])?;
                if *radius < 0.0 {
                    return Err(RegionError::NegativeRadius(*radius));
                }
                center.len()
            }
            RegionKind::Annulus {
                center,
                r_in,
                r_out,
            } => {
                check_dim(center.len())?;
                check_finite(center)?;
                check_finite(&[*r_in, *r_out])?;
                if *r_in < 0.0 || r_in >= r_out {
                    return Err(RegionError::EmptyAnnulus {
                        r_in: *r_in,
                        r_out: *r_out,
                    });
                }
                center.len()
            }
            RegionKind::Box { lo, hi } => {
                check_dim(lo.len())?;
                if lo.len() != hi.len() {
                    return Err(RegionError::MixedDimensions(lo.len(), hi.len()));
                }
                check_finite(lo)?;
                check_finite(hi)?;
                if lo.iter().zip(hi).any(|(l, h)| l >= h) {
                    return Err(RegionError::EmptyBox);
                }
                lo.len()
            }
            RegionKind::Union { parts } => {
                let first = parts.first().ok_or(RegionError::EmptyUnion)?;
                let dim = first.dim;
                for part in parts {
                    if part.dim != dim {
                        return Err(RegionError::MixedDimensions(dim, part.dim));
                    }
                }
                for (i, a) in parts.iter().enumerate() {
                    for (j, b) in parts.iter().enumerate().skip(i + 1) {
                        if !a.disjoint_from(b) {
                            return Err(RegionError::Overlap(i, j));
                        }
                    }
                }
                dim
            }
            RegionKind::Difference { outer, inner } => {
                if outer.dim != inner.dim {
                    return Err(RegionError::MixedDimensions(outer.dim, inner.dim));
                }
                if !inner.contained_in(outer) {
                    return Err(RegionError::InnerNotContained);
                }
                outer.dim
            }
        };
        Ok(Region { dim, kind })
    }

    pub fn interval(lo: f64, hi: f64) -> Result<Self, RegionError> {
        Self::new(RegionKind::Interval { lo, hi })
    }

    pub fn ball(center: Vec<f64>, radius: f64) -> Result<Self, RegionError> {
        Self::new(RegionKind::Ball { center, radius })
    }

    pub fn annulus(center: Vec<f64>, r_in: f64, r_out: f64) -> Result<Self, RegionError> {
        Self::new(RegionKind::Annulus {
            center,
            r_in,
            r_out,
        })
    }

    pub fn cuboid(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self, RegionError> {
        Self::new(RegionKind::Box { lo, hi })
    }

    pub fn union(parts: Vec<Region>) -> Result<Self, RegionError> {
        Self::new(RegionKind::Union { parts })
    }

    pub fn difference(outer: Region, inner: Region) -> Result<Self, RegionError> {
        Self::new(RegionKind::Difference {
            outer: Box::new(outer),
            inner: Box::new(inner),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> &RegionKind {
        &self.kind
    }

    /// Exact Lebesgue measure.
    pub fn measure(&self) -> f64 {
        let n = self.dim;
        match &self.kind {
            RegionKind::Interval { lo, hi } => hi - lo,
            RegionKind::Ball { radius, .. } => unit_ball_volume(n) * radius.powi(n as i32),
            RegionKind::Annulus { r_in, r_out, .. } => {
                unit_ball_volume(n) * (r_out.powi(n as i32) - r_in.powi(n as i32))
            }
            RegionKind::Box { lo, hi } => lo.iter().zip(hi).map(|(l, h)| h - l).product(),
            RegionKind::Union { parts } => parts.iter().map(Region::measure).sum(),
            RegionKind::Difference { outer, inner } => (outer.measure() - inner.measure()).max(0.0),
        }
    }

    /// Membership in the open region.
    pub fn contains(&self, x: &[f64]) -> bool {
        if x.len() != self.dim {
            return false;
        }
        match &self.kind {
            RegionKind::Interval { lo, hi } => *lo < x[0] && x[0] < *hi,
            RegionKind::Ball { center, radius } => distance(x, center) < *radius,
            RegionKind::Annulus {
                center,
                r_in,
                r_out,
            } => {
                let d = distance(x, center);
                *r_in < d && d < *r_out
            }
            RegionKind::Box { lo, hi } => x
                .iter()
                .zip(lo.iter().zip(hi))
                .all(|(v, (l, h))| l < v && v < h),
            RegionKind::Union { parts } => parts.iter().any(|p| p.contains(x)),
            RegionKind::Difference { outer, inner } => {
                outer.contains(x) && !inner.contains_closure(x)
            }
        }
    }

    fn contains_closure(&self, x: &[f64]) -> bool {
        match &self.kind {
            RegionKind::Interval { lo, hi } => *lo <= x[0] && x[0] <= *hi,
            RegionKind::Ball { center, radius } => distance(x, center) <= *radius,
            RegionKind::Annulus {
                center,
                r_in,
                r_out,
            } => {
                let d = distance(x, center);
                *r_in <= d && d <= *r_out
            }
            RegionKind::Box { lo, hi } => x
                .iter()
                .zip(lo.iter().zip(hi))
                .all(|(v, (l, h))| l <= v && v <= h),
            RegionKind::Union { parts } => parts.iter().any(|p| p.contains_closure(x)),
            RegionKind::Difference { outer, .. } => outer.contains_closure(x),
        }
    }

    /// Axis-aligned bounding box `(lo, hi)`.
    pub fn bounding_box(&self) -> (Vec<f64>, Vec<f64>) {
        match &self.kind {
            RegionKind::Interval { lo, hi } => (vec![*lo], vec![*hi]),
            RegionKind::Ball { center, radius: r }
            | RegionKind::Annulus {
                center, r_out: r, ..
            } => (
                center.iter().map(|c| c - r).collect(),
                center.iter().map(|c| c + r).collect(),
            ),
            RegionKind::Box { lo, hi } => (lo.clone(), hi.clone()),
            RegionKind::Union { parts } => {
                let mut lo = vec![f64::INFINITY; self.dim];
                let mut hi = vec![f64::NEG_INFINITY; self.dim];
                for part in parts {
                    let (pl, ph) = part.bounding_box();
                    for k in 0..self.dim {
                        lo[k] = lo[k].min(pl[k]);
                        hi[k] = hi[k].max(ph[k]);
                    }
                }
                (lo, hi)
            }
            RegionKind::Difference { outer, .. } => outer.bounding_box(),
        }
    }

    fn radial(&self) -> Option<Radial<'_>> {
        match &self.kind {
            RegionKind::Ball { center, radius } => Some(Radial {
                center,
                r_in: 0.0,
                r_out: *radius,
            }),
            RegionKind::Annulus {
                center,
                r_in,
                r_out,
            } => Some(Radial {
                center,
                r_in: *r_in,
                r_out: *r_out,
            }),
            _ => None,
        }
    }

    /// `(center, r_in, r_out)` for balls (with `r_in = 0`) and annuli.
    pub fn radial_shell(&self) -> Option<(&[f64], f64, f64)> {
        self.radial().map(|r| (r.center, r.r_in, r.r_out))
    }

    /// Decomposition of a 1D region into sorted, pairwise disjoint open
    /// intervals. `None` for n >= 2.
    pub fn intervals_1d(&self) -> Option<Vec<(f64, f64)>> {
        if self.dim != 1 {
            return None;
        }
        let mut out = match &self.kind {
            RegionKind::Interval { lo, hi } => vec![(*lo, *hi)],
            RegionKind::Ball { center, radius } => {
                if *radius > 0.0 {
                    vec![(center[0] - radius, center[0] + radius)]
                } else {
                    vec![]
                }
            }
            RegionKind::Annulus {
                center,
                r_in,
                r_out,
            } => vec![
                (center[0] - r_out, center[0] - r_in),
                (center[0] + r_in, center[0] + r_out),
            ],
            RegionKind::Box { lo, hi } => vec![(lo[0], hi[0])],
            RegionKind::Union { parts } => parts
                .iter()
                .flat_map(|p| p.intervals_1d().unwrap_or_default())
                .collect(),
            RegionKind::Difference { outer, inner } => {
                let removed = inner.intervals_1d().unwrap_or_default();
                let mut pieces = outer.intervals_1d().unwrap_or_default();
                for (rl, rh) in removed {
                    pieces = pieces
                        .into_iter()
                        .flat_map(|(l, h)| {
                            let mut kept = Vec::with_capacity(2);
                            if rh <= l || rl >= h {
                                kept.push((l, h));
                            } else {
                                if l < rl {
                                    kept.push((l, rl));
                                }
                                if rh < h {
                                    kept.push((rh, h));
                                }
                            }
                            kept
                        })
                        .collect();
                }
                pieces
            }
        };
        out.retain(|(l, h)| l < h);
        out.sort_by(|a, b| a.0.total_cmp(&b.0));
        Some(out)
    }

    /// True when the two regions are certifiably disjoint (up to a null set).
    pub fn disjoint_from(&self, other: &Region) -> bool {
        if self.dim != other.dim {
            return false;
        }
        if self.dim == 1 {
            let a = self.intervals_1d().unwrap_or_default();
            let b = other.intervals_1d().unwrap_or_default();
            return a
                .iter()
                .all(|(al, ah)| b.iter().all(|(bl, bh)| al.max(*bl) >= ah.min(*bh)));
        }
        match (&self.kind, &other.kind) {
            (RegionKind::Union { parts }, _) => parts.iter().all(|p| p.disjoint_from(other)),
            (_, RegionKind::Union { parts }) => parts.iter().all(|p| self.disjoint_from(p)),
            (RegionKind::Difference { outer, inner }, _) => {
                outer.disjoint_from(other) || other.contained_in(inner)
            }
            (_, RegionKind::Difference { outer, inner }) => {
                outer.disjoint_from(self) || self.contained_in(inner)
            }
            (RegionKind::Box { lo: l1, hi: h1 }, RegionKind::Box { lo: l2, hi: h2 }) => {
                (0..self.dim).any(|k| h1[k] <= l2[k] || h2[k] <= l1[k])
            }
            (RegionKind::Box { lo, hi }, _) => match other.radial() {
                Some(r) => box_radial_disjoint(lo, hi, r),
                None => false,
            },
            (_, RegionKind::Box { lo, hi }) => match self.radial() {
                Some(r) => box_radial_disjoint(lo, hi, r),
                None => false,
            },
            _ => match (self.radial(), other.radial()) {
                (Some(a), Some(b)) => radial_disjoint(a, b),
                _ => false,
            },
        }
    }

    /// True when `self` certifiably lies in the closure of `other`.
    pub fn contained_in(&self, other: &Region) -> bool {
        if self.dim != other.dim {
            return false;
        }
        if self.measure() == 0.0 {
            return true;
        }
        if self.dim == 1 {
            let inner = self.intervals_1d().unwrap_or_default();
            let outer = merge_touching(other.intervals_1d().unwrap_or_default());
            return inner
                .iter()
                .all(|(l, h)| outer.iter().any(|(ol, oh)| ol <= l && h <= oh));
        }
        match (&self.kind, &other.kind) {
            (RegionKind::Union { parts }, _) => parts.iter().all(|p| p.contained_in(other)),
            (RegionKind::Difference { outer, .. }, _) => outer.contained_in(other),
            (_, RegionKind::Union { parts }) => parts.iter().any(|p| self.contained_in(p)),
            (_, RegionKind::Difference { outer, inner }) => {
                self.contained_in(outer) && self.disjoint_from(inner)
            }
            (RegionKind::Box { lo: l1, hi: h1 }, RegionKind::Box { lo: l2, hi: h2 }) => {
                (0..self.dim).all(|k| l2[k] <= l1[k] && h1[k] <= h2[k])
            }
            (RegionKind::Box { lo, hi }, _) => match other.radial() {
                Some(r) => {
                    far_corner_distance(lo, hi, r.center) <= r.r_out
                        && (r.r_in == 0.0 || box_distance(lo, hi, r.center) >= r.r_in)
                }
                None => false,
            },
            (_, RegionKind::Box { lo, hi }) => match self.radial() {
                Some(r) => (0..self.dim)
                    .all(|k| lo[k] <= r.center[k] - r.r_out && r.center[k] + r.r_out <= hi[k]),
                None => false,
            },
            _ => match (self.radial(), other.radial()) {
                (Some(a), Some(b)) => {
                    let d = distance(a.center, b.center);
                    if d == 0.0 {
                        a.r_out <= b.r_out && a.r_in >= b.r_in
                    } else {
                        d + a.r_out <= b.r_out && (b.r_in == 0.0 || d >= a.r_out + b.r_in)
                    }
                }
                _ => false,
            },
        }
    }

    /// Deterministic uniform samples.
    pub fn sample_points(&self, count: usize, seed: u64) -> Result<Vec<Vec<f64>>, RegionError> {
        if !(self.measure() > 0.0) {
            return Err(RegionError::ZeroMeasure);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Ok((0..count)
            .map(|_| {
                let mut x = vec![0.0; self.dim];
                self.sample_into(&mut rng, &mut x);
                x
            })
            .collect())
    }

    /// Writes one uniform sample into `out`. The region must have positive measure.
    pub fn sample_into<R: Rng + ?Sized>(&self, rng: &mut R, out: &mut [f64]) {
        debug_assert_eq!(out.len(), self.dim);
        loop {
            self.propose(rng, out);
            if self.contains(out) {
                return;
            }
        }
    }

    fn propose<R: Rng + ?Sized>(&self, rng: &mut R, out: &mut [f64]) {
        let n = self.dim;
        match &self.kind {
            RegionKind::Interval { lo, hi } => {
                let u: f64 = rng.sample(Open01);
                out[0] = lo + u * (hi - lo);
            }
            RegionKind::Box { lo, hi } => {
                for k in 0..n {
                    let u: f64 = rng.sample(Open01);
                    out[k] = lo[k] + u * (hi[k] - lo[k]);
                }
            }
            RegionKind::Ball { center, radius } => {
                let u: f64 = rng.sample(Open01);
                let r = radius * u.powf(1.0 / n as f64);
                place_on_sphere(rng, center, r, out);
            }
            RegionKind::Annulus {
                center,
                r_in,
                r_out,
            } => {
                let u: f64 = rng.sample(Open01);
                let p = n as i32;
                let r = (r_in.powi(p) + u * (r_out.powi(p) - r_in.powi(p))).powf(1.0 / n as f64);
                place_on_sphere(rng, center, r, out);
            }
            RegionKind::Union { parts } => {
                let total = self.measure();
                let target = rng.random::<f64>() * total;
                let mut acc = 0.0;
                let mut chosen = parts.last().expect("union is nonempty");
                for part in parts {
                    let m = part.measure();
                    if m <= 0.0 {
                        continue;
                    }
                    acc += m;
                    chosen = part;
                    if target < acc {
                        break;
                    }
                }
                chosen.sample_into(rng, out);
            }
            RegionKind::Difference { outer, .. } => outer.sample_into(rng, out),
        }
    }
}

fn place_on_sphere<R: Rng + ?Sized>(rng: &mut R, center: &[f64], r: f64, out: &mut [f64]) {
    let n = center.len();
    if n == 1 {
        let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
        out[0] = center[0] + sign * r;
        return;
    }
    loop {
        let mut norm = 0.0;
        for v in out.iter_mut() {
            let g: f64 = rng.sample(StandardNormal);
            *v = g;
            norm += g * g;
        }
        let norm = norm.sqrt();
        if norm > 1e-12 {
            for (v, c) in out.iter_mut().zip(center) {
                *v = c + r * *v / norm;
            }
            return;
        }
    }
}

fn merge_touching(mut intervals: Vec<(f64, f64)>) -> Vec<(f64, f64)> {
    intervals.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut merged: Vec<(f64, f64)> = Vec::with_capacity(intervals.len());
    for (l, h) in intervals {
        match merged.last_mut() {
            Some(last) if l <= last.1 => last.1 = last.1.max(h),
            _ => merged.push((l, h)),
        }
    }
    merged
}

fn radial_disjoint(a: Radial<'_>, b: Radial<'_>) -> bool {
    if a.r_out == 0.0 || b.r_out == 0.0 {
        return true;
    }
    let d = distance(a.center, b.center);
    if d >= a.r_out + b.r_out {
        return true;
    }
    if d == 0.0 {
        return a.r_in.max(b.r_in) >= a.r_out.min(b.r_out);
    }
    d + a.r_out <= b.r_in || d + b.r_out <= a.r_in
}

/// Distance from `c` to the closed box.
fn box_distance(lo: &[f64], hi: &[f64], c: &[f64]) -> f64 {
    lo.iter()
        .zip(hi)
        .zip(c)
        .map(|((l, h), x)| {
            let gap = (l - x).max(x - h).max(0.0);
            gap * gap
        })
        .sum::<f64>()
        .sqrt()
}

fn far_corner_distance(lo: &[f64], hi: &[f64], c: &[f64]) -> f64 {
    lo.iter()
        .zip(hi)
        .zip(c)
        .map(|((l, h), x)| {
            let far = (x - l).abs().max((h - x).abs());
            far * far
        })
        .sum::<f64>()
        .sqrt()
}

fn box_radial_disjoint(lo: &[f64], hi: &[f64], r: Radial<'_>) -> bool {
    r.r_out == 0.0
        || box_distance(lo, hi, r.center) >= r.r_out
        || far_corner_distance(lo, hi, r.center) <= r.r_in
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn measures() {
        assert_eq!(Region::interval(3.0, 5.0).unwrap().measure(), 2.0);
        assert_eq!(Region::ball(vec![0.0, 0.0], 1.0).unwrap().measure(), PI);
        assert_eq!(Region::annulus(vec![0.0], 1.0, 2.0).unwrap().measure(), 2.0);
        let b = Region::cuboid(vec![0.0, 0.0, 0.0], vec![1.0, 2.0, 3.0]).unwrap();
        assert_eq!(b.measure(), 6.0);
    }

    #[test]
    fn radius_for_measure() {
        assert_eq!(ball_radius_for_measure(2.0, 1).unwrap(), 1.0);
        assert!((ball_radius_for_measure(PI, 2).unwrap() - 1.0).abs() < 1e-15);
        for n in 1..=3 {
            assert_eq!(ball_radius_for_measure(0.0, n).unwrap(), 0.0);
        }
        assert_eq!(
            ball_radius_for_measure(-1.0, 2),
            Err(RegionError::NegativeMeasure(-1.0))
        );
        assert!(ball_radius_for_measure(1.0, 4).is_err());
    }

    #[test]
    fn construction_errors() {
        assert!(Region::interval(1.0, 1.0).is_err());
        assert!(Region::ball(vec![0.0], -1.0).is_err());
        assert!(Region::annulus(vec![0.0, 0.0], 2.0, 1.0).is_err());
        assert!(Region::cuboid(vec![0.0, 1.0], vec![1.0, 1.0]).is_err());
        assert!(Region::ball(vec![0.0; 4], 1.0).is_err());
        let a = Region::interval(0.0, 2.0).unwrap();
        let b = Region::interval(1.0, 3.0).unwrap();
        assert_eq!(Region::union(vec![a, b]), Err(RegionError::Overlap(0, 1)));
    }

    #[test]
    fn union_is_additive() {
        let parts = vec![
            Region::ball(vec![0.0, 0.0], 1.0).unwrap(),
            Region::annulus(vec![0.0, 0.0], 1.0, 2.0).unwrap(),
            Region::ball(vec![5.0, 0.0], 0.5).unwrap(),
            Region::cuboid(vec![-4.0, -4.0], vec![-3.0, -3.0]).unwrap(),
        ];
        let total: f64 = parts.iter().map(Region::measure).sum();
        let u = Region::union(parts).unwrap();
        assert!((u.measure() - total).abs() < 1e-12);
    }

    #[test]
    fn disjointness_certificates() {
        let ball = Region::ball(vec![0.0, 0.0], 1.0).unwrap();
        let shell = Region::annulus(vec![0.0, 0.0], 1.0, 2.0).unwrap();
        let far = Region::ball(vec![3.0, 0.0], 1.0).unwrap();
        let near = Region::ball(vec![1.5, 0.0], 1.0).unwrap();
        let hole = Region::annulus(vec![0.0, 0.0], 3.0, 4.0).unwrap();
        assert!(ball.disjoint_from(&shell));
        assert!(ball.disjoint_from(&far));
        assert!(!ball.disjoint_from(&near));
        assert!(near.disjoint_from(&hole));
        let square = Region::cuboid(vec![2.0, 2.0], vec![3.0, 3.0]).unwrap();
        assert!(square.disjoint_from(&ball));
        assert!(!square.disjoint_from(&hole));
        let small = Region::cuboid(vec![-0.1, -0.1], vec![0.1, 0.1]).unwrap();
        assert!(small.disjoint_from(&shell));
    }

    #[test]
    fn difference_regions() {
        let outer = Region::ball(vec![0.0, 0.0], 3.0).unwrap();
        let inner = Region::ball(vec![1.5, 0.0], 0.5).unwrap();
        let d = Region::difference(outer.clone(), inner.clone()).unwrap();
        assert!((d.measure() - (9.0 * PI - 0.25 * PI)).abs() < 1e-12);
        assert!(d.disjoint_from(&inner));
        assert!(!d.contains(&[1.5, 0.0]));
        assert!(d.contains(&[-1.5, 0.0]));
        assert_eq!(
            Region::difference(inner, outer),
            Err(RegionError::InnerNotContained)
        );

        let line = Region::difference(
            Region::ball(vec![0.0], 1.0).unwrap(),
            Region::ball(vec![0.5], 0.2).unwrap(),
        )
        .unwrap();
        let iv = line.intervals_1d().unwrap();
        assert_eq!(iv.len(), 2);
        assert!((iv[0].0 + 1.0).abs() < 1e-15 && (iv[0].1 - 0.3).abs() < 1e-15);
        assert!((iv[1].0 - 0.7).abs() < 1e-15 && (iv[1].1 - 1.0).abs() < 1e-15);
    }

    #[test]
    fn sampling_is_deterministic_and_inside() {
        let iv = Region::interval(0.0, 1.0).unwrap();
        let a = iv.sample_points(3, 7).unwrap();
        assert_eq!(a, iv.sample_points(3, 7).unwrap());
        assert!(a.iter().all(|p| (0.0..1.0).contains(&p[0])));

        let shell = Region::annulus(vec![0.0], 1.0, 2.0).unwrap();
        for p in shell.sample_points(10_000, 1).unwrap() {
            assert!((1.0..2.0).contains(&p[0].abs()));
        }
        let zero = Region::ball(vec![0.0, 0.0], 0.0).unwrap();
        assert_eq!(zero.sample_points(1, 0), Err(RegionError::ZeroMeasure));
    }

    #[test]
    fn disc_samples_are_centered() {
        // Each coordinate of a uniform point in the unit disc has variance 1/4.
        let count = 10_000;
        let disc = Region::ball(vec![0.0, 0.0], 1.0).unwrap();
        let pts = disc.sample_points(count, 11).unwrap();
        let sigma = (0.25 / count as f64).sqrt();
        for k in 0..2 {
            let mean = pts.iter().map(|p| p[k]).sum::<f64>() / count as f64;
            assert!(mean.abs() < 3.0 * sigma, "coordinate {k}: mean {mean}");
        }
    }

    #[test]
    fn json_encoding() {
        let r: Region =
            serde_json::from_str(r#"{"type":"annulus","center":[0.0],"r_in":0.5,"r_out":2.0}"#)
                .unwrap();
        assert_eq!(r.measure(), 3.0);
        let back = serde_json::to_string(&r).unwrap();
        assert_eq!(
            back,
            r#"{"type":"annulus","center":[0.0],"r_in":0.5,"r_out":2.0}"#
        );
        let bad = serde_json::from_str::<Region>(
            r#"{"type":"union","parts":[{"type":"interval","lo":0.0,"hi":2.0},{"type":"interval","lo":1.0,"hi":3.0}]}"#,
        );
        assert!(bad.is_err());
    }
}
