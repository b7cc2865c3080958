#![allow(dead_code)]

use rand::Rng;
use rearrange_lab_core::{Region, SimpleFunction};

/// Random 1D simple function: up to `max_pieces` disjoint intervals, some of
/// them adjacent, values in (0, 10] with occasional repeats.
pub fn random_1d<R: Rng>(rng: &mut R, max_pieces: usize) -> SimpleFunction {
    let count = rng.random_range(1..=max_pieces);
    let mut pos = rng.random_range(-5.0..0.0);
    let mut pieces = Vec::with_capacity(count);
    for _ in 0..count {
        if rng.random_bool(0.7) {
            pos += rng.random_range(0.0..1.0);
        }
        let len = rng.random_range(0.05..2.0);
        let value = if rng.random_bool(0.3) {
            f64::from(rng.random_range(1..=4u8))
        } else {
            10.0 - rng.random_range(0.0..10.0)
        };
        pieces.push((value, Region::interval(pos, pos + len).unwrap()));
        pos += len;
    }
    SimpleFunction::from_pieces(1, pieces).unwrap()
}

/// Random 2D simple function built from balls, annuli and boxes placed on
/// well-separated centers.
pub fn random_2d<R: Rng>(rng: &mut R, max_pieces: usize) -> SimpleFunction {
    let count = rng.random_range(1..=max_pieces);
    let mut pieces = Vec::with_capacity(count);
    for p in 0..count {
        let c = vec![
            4.0 * p as f64 + rng.random_range(-0.5..0.5),
            rng.random_range(-0.5..0.5),
        ];
        let r = rng.random_range(0.3..1.4);
        let region = match rng.random_range(0..3) {
            0 => Region::ball(c, r).unwrap(),
            1 => Region::annulus(c, 0.5 * r, r).unwrap(),
            _ => Region::cuboid(
                vec![c[0] - r, c[1] - 0.5 * r],
                vec![c[0] + r, c[1] + 0.5 * r],
            )
            .unwrap(),
        };
        pieces.push((10.0 - rng.random_range(0.0..10.0), region));
    }
    SimpleFunction::from_pieces(2, pieces).unwrap()
}

/// Random `a < b` inside `[0, 11]`.
pub fn random_layer<R: Rng>(rng: &mut R) -> (f64, f64) {
    let a = rng.random_range(0.0..10.5);
    let b = rng.random_range(a..11.0);
    (a, b.max(a + 1e-6))
}
