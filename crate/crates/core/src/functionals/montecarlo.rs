//! Seeded Monte Carlo for kernel double integrals.
//!
//! Samples are drawn in fixed-size batches. Batch `b` of stream `s` uses a
//! ChaCha8 generator seeded with the run seed and set to stream
//! `(s << 24) | b`, and batch sums are combined in batch order. The estimate
//! is therefore bit-identical for any thread count or evaluation order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::integrand::Kernel;
use crate::regions::{Region, RegionError};

const BATCH: u64 = 8192;

/// `(mean-based estimate, standard error)` of `int_A int_B k(x - y) dy dx`.
pub(crate) fn pair_integral(
    a: &Region,
    b: &Region,
    k: &Kernel,
    samples: u64,
    seed: u64,
    stream: u64,
) -> Result<(f64, f64)> {
    let (ma, mb) = (a.measure(), b.measure());
    if !(ma > 0.0 && mb > 0.0) {
        return Err(RegionError::ZeroMeasure.into());
    }
    if samples < 2 {
        return Err(Error::InvalidInput(
            "Monte Carlo needs at least 2 samples".into(),
        ));
    }
    let n = a.dim();
    let batches = samples.div_ceil(BATCH);
    let sums: Vec<Result<(f64, f64)>> = (0..batches)
        .into_par_iter()
        .map(|batch| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream((stream << 24) | batch);
            let count = BATCH.min(samples - batch * BATCH);
            let mut x = vec![0.0; n];
            let mut y = vec![0.0; n];
            let mut d = vec![0.0; n];
            let (mut s, mut ss) = (0.0, 0.0);
            for _ in 0..count {
                a.sample_into(&mut rng, &mut x);
                b.sample_into(&mut rng, &mut y);
                for i in 0..n {
                    d[i] = x[i] - y[i];
                }
                let v = k.at(&d).map_err(|e| Error::eval(&d, e))?;
                s += v;
                ss += v * v;
            }
            Ok((s, ss))
        })
        .collect();
    let (mut s, mut ss) = (0.0, 0.0);
    for part in sums {
        let (ps, pss) = part?;
        s += ps;
        ss += pss;
    }
    let count = samples as f64;
    let mean = s / count;
    let var = ((ss - s * mean) / (count - 1.0)).max(0.0);
    let scale = ma * mb;
    Ok((scale * mean, scale * (var / count).sqrt()))
}
