//! Nonnegative simple functions and their Schwarz symmetrization.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::regions::{ball_radius_for_measure, Region, RegionError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimpleFnError {
    #[error(transparent)]
    Region(#[from] RegionError),
    #[error("piece value {0} must be finite and nonnegative")]
    BadValue(f64),
    #[error("piece {index} has dimension {found}, function has dimension {expected}")]
    PieceDimension {
        index: usize,
        expected: usize,
        found: usize,
    },
    #[error("pieces {0} and {1} are not certifiably disjoint")]
    Overlap(usize, usize),
    #[error("layer bounds must satisfy a < b, got a = {a}, b = {b}")]
    EmptyLayer { a: f64, b: f64 },
    #[error("point has dimension {found}, function has dimension {expected}")]
    PointDimension { expected: usize, found: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Piece {
    pub value: f64,
    pub region: Region,
}

#[derive(Deserialize)]
struct RawSimpleFunction {
    dim: usize,
    pieces: Vec<Piece>,
}

#[derive(Serialize)]
struct RawSimpleFunctionRef<'a> {
    dim: usize,
    pieces: &'a [Piece],
}

/// `sum_k value_k * 1_{region_k}` with disjoint regions and positive values,
/// zero outside. Pieces are kept sorted by descending value.
#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(try_from = "RawSimpleFunction")]
pub struct SimpleFunction {
    dim: usize,
    pieces: Vec<Piece>,
}

impl Serialize for SimpleFunction {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        RawSimpleFunctionRef {
            dim: self.dim,
            pieces: &self.pieces,
        }
        .serialize(serializer)
    }
}

impl TryFrom<RawSimpleFunction> for SimpleFunction {
    type Error = SimpleFnError;

    fn try_from(raw: RawSimpleFunction) -> Result<Self, Self::Error> {
        SimpleFunction::new(raw.dim, raw.pieces)
    }
}

impl SimpleFunction {
    pub fn new(dim: usize, pieces: Vec<Piece>) -> Result<Self, SimpleFnError> {
        if !(1..=crate::regions::MAX_DIM).contains(&dim) {
            return Err(RegionError::UnsupportedDimension(dim).into());
        }
        for (index, p) in pieces.iter().enumerate() {
            if !p.value.is_finite() || p.value < 0.0 {
                return Err(SimpleFnError::BadValue(p.value));
            }
            if p.region.dim() != dim {
                return Err(SimpleFnError::PieceDimension {
                    index,
                    expected: dim,
                    found: p.region.dim(),
                });
            }
        }
        for (i, a) in pieces.iter().enumerate() {
            for (j, b) in pieces.iter().enumerate().skip(i + 1) {
                if !a.region.disjoint_from(&b.region) {
                    return Err(SimpleFnError::Overlap(i, j));
                }
            }
        }
        let mut pieces: Vec<Piece> = pieces.into_iter().filter(|p| p.value > 0.0).collect();
        pieces.sort_by(|a, b| b.value.total_cmp(&a.value));
        Ok(SimpleFunction { dim, pieces })
    }

    /// `value * 1_region`.
    pub fn indicator(value: f64, region: Region) -> Result<Self, SimpleFnError> {
        let dim = region.dim();
        Self::new(dim, vec![Piece { value, region }])
    }

    pub fn from_pieces(
        dim: usize,
        pieces: impl IntoIterator<Item = (f64, Region)>,
    ) -> Result<Self, SimpleFnError> {
        Self::new(
            dim,
            pieces
                .into_iter()
                .map(|(value, region)| Piece { value, region })
                .collect(),
        )
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub fn is_zero(&self) -> bool {
        self.pieces.is_empty()
    }

    /// `mu{x : a < f(x) <= b}`.
    pub fn layer_measure(&self, a: f64, b: f64) -> Result<f64, SimpleFnError> {
        if !(a < b) {
            return Err(SimpleFnError::EmptyLayer { a, b });
        }
        // The zero level has infinite measure; it only enters when a < 0.
        if a < 0.0 && b >= 0.0 {
            return Ok(f64::INFINITY);
        }
        Ok(self
            .pieces
            .iter()
            .filter(|p| a < p.value && p.value <= b)
            .map(|p| p.region.measure())
            .sum())
    }

    /// `mu{x : f(x) > t}` for `t >= 0`.
    pub fn superlevel_measure(&self, t: f64) -> f64 {
        self.pieces
            .iter()
            .filter(|p| p.value > t)
            .map(|p| p.region.measure())
            .sum()
    }

    pub fn support_measure(&self) -> f64 {
        self.pieces.iter().map(|p| p.region.measure()).sum()
    }

    pub fn evaluate(&self, x: &[f64]) -> Result<f64, SimpleFnError> {
        if x.len() != self.dim {
            return Err(SimpleFnError::PointDimension {
                expected: self.dim,
                found: x.len(),
            });
        }
        Ok(self
            .pieces
            .iter()
            .find(|p| p.region.contains(x))
            .map_or(0.0, |p| p.value))
    }

    /// Distinct values in descending order with the measure each one carries.
    pub fn value_distribution(&self) -> Vec<(f64, f64)> {
        let mut out: Vec<(f64, f64)> = Vec::new();
        for p in &self.pieces {
            let m = p.region.measure();
            match out.last_mut() {
                Some((v, acc)) if *v == p.value => *acc += m,
                _ => out.push((p.value, m)),
            }
        }
        out.retain(|(_, m)| *m > 0.0);
        out
    }

    /// Schwarz symmetrization by the layer-cake construction: the largest
    /// value on a centered ball, each smaller value on the next centered
    /// annulus, with every superlevel set keeping its measure.
    pub fn rearrange(&self) -> SimpleFunction {
        let n = self.dim;
        let mut pieces = Vec::new();
        let mut cumulative = 0.0;
        let mut inner = 0.0;
        for (value, m) in self.value_distribution() {
            cumulative += m;
            let outer = ball_radius_for_measure(cumulative, n)
                .expect("cumulative measure is finite and nonnegative");
            if outer <= inner {
                continue;
            }
            let region = if inner == 0.0 {
                Region::ball(vec![0.0; n], outer)
            } else {
                Region::annulus(vec![0.0; n], inner, outer)
            }
            .expect("radii are ordered");
            pieces.push(Piece { value, region });
            inner = outer;
        }
        SimpleFunction { dim: n, pieces }
    }

    /// Piecewise comparison up to `tol` on values and region parameters.
    pub fn approx_eq(&self, other: &SimpleFunction, tol: f64) -> bool {
        self.dim == other.dim
            && self.pieces.len() == other.pieces.len()
            && self.pieces.iter().zip(&other.pieces).all(|(a, b)| {
                (a.value - b.value).abs() <= tol && regions_approx_eq(&a.region, &b.region, tol)
            })
    }
}

fn regions_approx_eq(a: &Region, b: &Region, tol: f64) -> bool {
    match (a.radial_shell(), b.radial_shell()) {
        (Some((ca, ia, oa)), Some((cb, ib, ob))) => {
            ca.iter().zip(cb).all(|(x, y)| (x - y).abs() <= tol)
                && (ia - ib).abs() <= tol
                && (oa - ob).abs() <= tol
        }
        _ => a == b,
    }
}
