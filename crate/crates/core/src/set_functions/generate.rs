//! Seeded random instance generators.

use nalgebra::DMatrix;
use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::{CoverageFunction, DesignInstance, RegressionInstance};
use crate::linalg::SymmetricMatrix;
use crate::{Error, Result};

const MAX_ATTEMPTS: usize = 10;

fn normal(rng: &mut ChaCha8Rng) -> f64 {
    rng.sample(StandardNormal)
}

/// Draws `m` samples of `n` correlated predictors and a target that is a
/// sparse linear combination of them plus Gaussian noise (standard deviation
/// `noise`), standardizes every column and returns the empirical covariances.
pub fn generate_regression_instance(n: usize, m: usize, noise: f64, seed: u64) -> Result<RegressionInstance> {
    if n == 0 {
        return Err(Error::InvalidArgument("need at least one predictor".into()));
    }
    if m < n + 1 {
        return Err(Error::InvalidArgument(format!("sample count m = {m} must be at least n + 1 = {}", n + 1)));
    }
    if !(noise >= 0.0) || !noise.is_finite() {
        return Err(Error::InvalidArgument(format!("noise = {noise} must be a nonnegative number")));
    }
    let mut last = 0;
    for attempt in 0..MAX_ATTEMPTS {
        let stream_seed = seed.wrapping_add((attempt as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
        match draw_regression(n, m, noise, stream_seed) {
            Ok(inst) => return Ok(inst),
            Err(col) => last = col,
        }
    }
    Err(Error::DegenerateSample { column: last, attempts: MAX_ATTEMPTS })
}

fn draw_regression(n: usize, m: usize, noise: f64, seed: u64) -> Result<RegressionInstance, usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // mixing = I + 0.6 G, so predictors are correlated but rarely collinear
    let mixing = DMatrix::from_fn(n, n, |i, j| if i == j { 1.0 } else { 0.0 }) + DMatrix::from_fn(n, n, |_, _| 0.6 * normal(&mut rng));
    let latent = DMatrix::from_fn(m, n, |_, _| normal(&mut rng));
    let mut x = latent * mixing;

    let support_size = n.div_ceil(2).max(1);
    let support = index::sample(&mut rng, n, support_size).into_vec();
    let mut coef = vec![0.0; n];
    for j in support {
        let c: f64 = normal(&mut rng);
        coef[j] = c.signum() * (c.abs() + 0.1);
    }
    let mut z: Vec<f64> = (0..m)
        .map(|r| (0..n).map(|j| coef[j] * x[(r, j)]).sum::<f64>() + noise * normal(&mut rng))
        .collect();

    let standardize = |v: &mut [f64]| -> bool {
        let mean = v.iter().sum::<f64>() / v.len() as f64;
        let var = v.iter().map(|a| (a - mean).powi(2)).sum::<f64>() / v.len() as f64;
        if var <= 1e-24 {
            return false;
        }
        let sd = var.sqrt();
        v.iter_mut().for_each(|a| *a = (*a - mean) / sd);
        true
    };
    for j in 0..n {
        let mut col: Vec<f64> = x.column(j).iter().copied().collect();
        if !standardize(&mut col) {
            return Err(j);
        }
        x.set_column(j, &nalgebra::DVector::from_vec(col));
    }
    if !standardize(&mut z) {
        return Err(n);
    }

    let mf = m as f64;
    let mut c = (x.transpose() * &x) / mf;
    for i in 0..n {
        c[(i, i)] = 1.0;
    }
    let b: Vec<f64> = (0..n).map(|j| x.column(j).iter().zip(&z).map(|(a, b)| a * b).sum::<f64>() / mf).collect();
    let c = SymmetricMatrix::new(c).map_err(|_| 0usize)?;
    RegressionInstance::new(c, b).map_err(|_| 0usize)
}

/// Random A-optimal design instance: Gaussian observations, a random
/// well-conditioned prior and noise variance in `[0.5, 2)`.
pub fn generate_design_instance(p: usize, n: usize, seed: u64) -> Result<DesignInstance> {
    if p == 0 || n == 0 {
        return Err(Error::InvalidArgument("design dimensions must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let x = DMatrix::from_fn(p, n, |_, _| normal(&mut rng));
    let g = DMatrix::from_fn(p, p, |_, _| normal(&mut rng));
    let lambda = (&g * g.transpose()) / p as f64 + DMatrix::identity(p, p) * 0.25;
    let sigma2 = 0.5 + 1.5 * rng.random::<f64>();
    DesignInstance::new(x, SymmetricMatrix::new(lambda)?, sigma2)
}

/// Random weighted coverage function with `n` sets over `universe` items;
/// each set covers each item with probability `0.3` and at least one item.
pub fn generate_coverage(n: usize, universe: usize, seed: u64) -> Result<CoverageFunction> {
    if universe == 0 {
        return Err(Error::InvalidArgument("universe must be non-empty".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let weights: Vec<f64> = (0..universe).map(|_| 0.5 + 1.5 * rng.random::<f64>()).collect();
    let sets = (0..n)
        .map(|_| {
            let mut s: Vec<usize> = (0..universe).filter(|_| rng.random_bool(0.3)).collect();
            if s.is_empty() {
                s.push(rng.random_range(0..universe));
            }
            s
        })
        .collect();
    CoverageFunction::new(sets, weights)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::subset::Subset;

    #[test]
    fn noiseless_target_is_explained() {
        let inst = generate_regression_instance(2, 10_000, 0.0, 7).unwrap();
        assert!(inst.r2_value(&Subset::full(2)).unwrap() >= 0.999);
    }

    #[test]
    fn deterministic_per_seed() {
        let a = generate_regression_instance(5, 50, 1.0, 1).unwrap();
        let b = generate_regression_instance(5, 50, 1.0, 1).unwrap();
        assert_eq!(a, b);
        let c = generate_regression_instance(5, 50, 1.0, 2).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn argument_checks() {
        assert!(generate_regression_instance(5, 5, 1.0, 0).is_err());
        assert!(generate_regression_instance(2, 10, -1.0, 0).is_err());
    }

    #[test]
    fn other_generators_are_valid() {
        let d = generate_design_instance(3, 6, 4).unwrap();
        assert_eq!((d.p(), d.n()), (3, 6));
        let cov = generate_coverage(8, 12, 4).unwrap();
        assert!(cov.sets().iter().all(|s| !s.is_empty()));
    }
}
