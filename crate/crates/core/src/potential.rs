//! The distorted potential `g_phi` used by the non-oblivious local searches.
//!
//! `m[a][b] = E[p^b (1-p)^(a-b)]` for `p` drawn from the density
//! `phi e^(phi p) / (e^phi - 1)` on `[0, 1]`. The potential of a set `A` is
//! `g(A) = sum_{∅ ≠ B ⊆ A} m[|A|-1][|B|-1] f(B)` and its marginal is
//! `g(e | A) = sum_{B ⊆ A} m[|A|][|B|] f(e | B)`.

use std::sync::{Arc, OnceLock};

use dashmap::DashMap;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};

use crate::par::{self, Execution};
use crate::set_functions::Oracle;
use crate::subset::{binomial, Subset};
use crate::{Error, Result};

pub const PHI_MIN: f64 = 1e-3;
pub const PHI_MAX: f64 = 100.0;
/// Largest `a` a coefficient table may hold.
pub const A_MAX_LIMIT: usize = 64;
/// Largest set whose potential is computed by full subset enumeration.
pub const EXACT_LIMIT: usize = 25;

const QUADRATURE_NODES: usize = 160;
/// Above this many samples the direct estimator splits work into seeded chunks.
const SAMPLE_CHUNK: u64 = 4096;
/// Largest `|A|` for which aggregated sampling enumerates all `2^|A|` subsets.
const AGGREGATE_LIMIT: usize = 16;

/// Nodes and weights of Gauss-Legendre quadrature mapped to `[0, 1]`.
struct Quadrature {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

fn quadrature() -> &'static Quadrature {
    static RULE: OnceLock<Quadrature> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(QUADRATURE_NODES))
}

fn gauss_legendre(n: usize) -> Quadrature {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut deriv = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for j in 2..=n {
                let jf = j as f64;
                let p2 = ((2.0 * jf - 1.0) * x * p1 - (jf - 1.0) * p0) / jf;
                p0 = p1;
                p1 = p2;
            }
            deriv = nf * (x * p1 - p0) / (x * x - 1.0);
            let step = p1 / deriv;
            x -= step;
            if step.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * deriv * deriv);
        nodes[i] = 0.5 * (1.0 - x);
        nodes[n - 1 - i] = 0.5 * (1.0 + x);
        weights[i] = 0.5 * w;
        weights[n - 1 - i] = 0.5 * w;
    }
    Quadrature { nodes, weights }
}

/// Density of the tilted distribution at `p`, written to avoid overflow.
fn density(phi: f64, p: f64) -> f64 {
    phi * (phi * (p - 1.0)).exp() / -(-phi).exp_m1()
}

/// Triangular table `m[a][b]`, `0 <= b <= a <= a_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientTable {
    phi: f64,
    a_max: usize,
    m: Vec<Vec<f64>>,
}

impl CoefficientTable {
    fn compute(phi: f64, a_max: usize) -> Self {
        let rule = quadrature();
        let mut m: Vec<Vec<f64>> = (0..=a_max).map(|a| vec![0.0; a + 1]).collect();
        for (&p, &w) in rule.nodes.iter().zip(&rule.weights) {
            let wd = w * density(phi, p);
            let q = 1.0 - p;
            for (a, row) in m.iter_mut().enumerate() {
                for (b, entry) in row.iter_mut().enumerate() {
                    *entry += wd * p.powi(b as i32) * q.powi((a - b) as i32);
                }
            }
        }
        CoefficientTable { phi, a_max, m }
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn a_max(&self) -> usize {
        self.a_max
    }

    /// `m[a][b]`; panics outside `0 <= b <= a <= a_max`.
    pub fn get(&self, a: usize, b: usize) -> f64 {
        assert!(b <= a && a <= self.a_max, "m[{a}][{b}] outside table with a_max {}", self.a_max);
        self.m[a][b]
    }

    /// `m[a][b]` with the convention that entries outside `0 <= b <= a` are `0`.
    pub fn get_signed(&self, a: i64, b: i64) -> f64 {
        if a < 0 || b < 0 || b > a {
            0.0
        } else {
            self.get(a as usize, b as usize)
        }
    }

    pub fn row(&self, a: usize) -> &[f64] {
        &self.m[a]
    }
}

fn table_cache() -> &'static DashMap<(i64, usize), Arc<CoefficientTable>> {
    static CACHE: OnceLock<DashMap<(i64, usize), Arc<CoefficientTable>>> = OnceLock::new();
    CACHE.get_or_init(DashMap::new)
}

fn check_phi(phi: f64) -> Result<()> {
    if (PHI_MIN..=PHI_MAX).contains(&phi) {
        Ok(())
    } else {
        Err(Error::InvalidPhi(phi))
    }
}

/// Coefficient table for `phi in [1e-3, 100]`, `a_max <= 64`, cached per
/// `(phi to 12 decimals, a_max)`.
pub fn coefficient_table(phi: f64, a_max: usize) -> Result<Arc<CoefficientTable>> {
    check_phi(phi)?;
    if a_max > A_MAX_LIMIT {
        return Err(Error::SetTooLarge { size: a_max, limit: A_MAX_LIMIT });
    }
    let key = ((phi * 1e12).round() as i64, a_max);
    if let Some(t) = table_cache().get(&key) {
        return Ok(Arc::clone(&t));
    }
    let table = Arc::new(CoefficientTable::compute(phi, a_max));
    table_cache().insert(key, Arc::clone(&table));
    Ok(table)
}

/// Sums `term(mask)` over all submasks of `0..2^size` in fixed chunk order.
fn subset_sum<F>(exec: Execution, size: usize, term: F) -> Result<f64>
where
    F: Fn(u64) -> Result<f64> + Sync,
{
    let low_bits = size.min(12);
    let chunks = 1usize << (size - low_bits);
    let partial = par::try_map_indexed(exec, chunks, |c| {
        let base = (c as u64) << low_bits;
        let mut acc = 0.0;
        for low in 0..(1u64 << low_bits) {
            acc += term(base | low)?;
        }
        Ok::<f64, Error>(acc)
    })?;
    Ok(partial.into_iter().sum())
}

fn check_exact_size(a: &Subset) -> Result<()> {
    if a.len() > EXACT_LIMIT {
        Err(Error::SetTooLarge { size: a.len(), limit: EXACT_LIMIT })
    } else {
        Ok(())
    }
}

/// `g_phi(A)` by enumerating every subset of `A`.
pub fn exact_g(f: &Oracle, phi: f64, a: &Subset) -> Result<f64> {
    exact_g_with(Execution::default(), f, phi, a)
}

pub fn exact_g_with(exec: Execution, f: &Oracle, phi: f64, a: &Subset) -> Result<f64> {
    check_exact_size(a)?;
    if a.is_empty() {
        check_phi(phi)?;
        return Ok(0.0);
    }
    let size = a.len();
    let table = coefficient_table(phi, size - 1)?;
    let row = table.row(size - 1);
    let members = a.as_slice();
    subset_sum(exec, size, |mask| {
        if mask == 0 {
            return Ok(0.0);
        }
        let b = Subset::from_mask_over(mask, members);
        Ok(row[b.len() - 1] * f.value(&b)?)
    })
}

/// `g_phi(e | A) = sum_{B ⊆ A} m[|A|][|B|] f(e | B)`.
pub fn exact_g_marginal(f: &Oracle, phi: f64, e: usize, a: &Subset) -> Result<f64> {
    exact_g_marginal_with(Execution::default(), f, phi, e, a)
}

pub fn exact_g_marginal_with(exec: Execution, f: &Oracle, phi: f64, e: usize, a: &Subset) -> Result<f64> {
    check_exact_size(a)?;
    if a.contains(e) {
        return Err(Error::ElementInSet(e));
    }
    let table = coefficient_table(phi, a.len())?;
    let row = table.row(a.len());
    let members = a.as_slice();
    subset_sum(exec, a.len(), |mask| {
        let b = Subset::from_mask_over(mask, members);
        Ok(row[b.len()] * f.marginal(e, &b)?)
    })
}

/// Inverse CDF of the tilted density: `ln(1 + u (e^phi - 1)) / phi`.
pub fn sample_p(phi: f64, u: f64) -> f64 {
    ((u * phi.exp_m1()).ln_1p() / phi).clamp(0.0, 1.0)
}

/// How [`estimate_g_marginal_with`] draws its samples.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SamplingMode {
    /// Aggregated whenever `|A| <= 16` and `N >= 4 * 2^|A|`, direct otherwise.
    #[default]
    Auto,
    /// One `p` and one random subset per sample.
    Direct,
    /// Multinomial sample counts over all subsets of `A`; same distribution
    /// as direct sampling at `O(2^|A|)` cost independent of `N`.
    Aggregated,
}

impl SamplingMode {
    fn resolve(self, set_size: usize, samples: u64) -> SamplingMode {
        match self {
            SamplingMode::Auto => {
                if set_size <= AGGREGATE_LIMIT && samples >= 4u64 << set_size {
                    SamplingMode::Aggregated
                } else {
                    SamplingMode::Direct
                }
            }
            other => other,
        }
    }
}

/// Monte Carlo estimate of `g_phi(e | A)` from `samples` draws of
/// `B ⊆ A` (each element kept with probability `p`, `p` tilted). Each sample
/// is charged as two oracle queries.
pub fn estimate_g_marginal<R: Rng + ?Sized>(
    f: &Oracle,
    phi: f64,
    e: usize,
    a: &Subset,
    samples: u64,
    rng: &mut R,
) -> Result<f64> {
    estimate_g_marginal_with(Execution::default(), SamplingMode::Auto, f, phi, e, a, samples, rng)
}

#[allow(clippy::too_many_arguments)]
pub fn estimate_g_marginal_with<R: Rng + ?Sized>(
    exec: Execution,
    mode: SamplingMode,
    f: &Oracle,
    phi: f64,
    e: usize,
    a: &Subset,
    samples: u64,
    rng: &mut R,
) -> Result<f64> {
    check_phi(phi)?;
    if samples == 0 {
        return Err(Error::InvalidArgument("sample count must be at least 1".into()));
    }
    if a.contains(e) {
        return Err(Error::ElementInSet(e));
    }
    if a.is_empty() {
        let with = f.value_charged(&Subset::from([e]), samples)?;
        let without = f.value_charged(&Subset::empty(), samples)?;
        return Ok(with - without);
    }
    match mode.resolve(a.len(), samples) {
        SamplingMode::Aggregated => {
            if a.len() > AGGREGATE_LIMIT {
                return Err(Error::SetTooLarge { size: a.len(), limit: AGGREGATE_LIMIT });
            }
            aggregated_estimate(f, phi, e, a, samples, rng)
        }
        _ => direct_estimate(exec, f, phi, e, a, samples, rng),
    }
}

fn draw_marginal<R: Rng + ?Sized>(f: &Oracle, phi: f64, e: usize, a: &Subset, rng: &mut R) -> Result<f64> {
    let p = sample_p(phi, rng.random::<f64>());
    let b = Subset::new(a.iter().filter(|_| rng.random::<f64>() < p));
    f.marginal(e, &b)
}

fn direct_estimate<R: Rng + ?Sized>(
    exec: Execution,
    f: &Oracle,
    phi: f64,
    e: usize,
    a: &Subset,
    samples: u64,
    rng: &mut R,
) -> Result<f64> {
    if samples <= SAMPLE_CHUNK {
        let mut total = 0.0;
        for _ in 0..samples {
            total += draw_marginal(f, phi, e, a, rng)?;
        }
        return Ok(total / samples as f64);
    }
    let seed: u64 = rng.random();
    let chunks = samples.div_ceil(SAMPLE_CHUNK);
    let partial = par::try_map_indexed(exec, chunks as usize, |c| {
        let mut sub = ChaCha8Rng::seed_from_u64(seed);
        sub.set_stream(c as u64);
        let count = SAMPLE_CHUNK.min(samples - c as u64 * SAMPLE_CHUNK);
        let mut total = 0.0;
        for _ in 0..count {
            total += draw_marginal(f, phi, e, a, &mut sub)?;
        }
        Ok::<f64, Error>(total)
    })?;
    Ok(partial.into_iter().sum::<f64>() / samples as f64)
}

fn aggregated_estimate<R: Rng + ?Sized>(
    f: &Oracle,
    phi: f64,
    e: usize,
    a: &Subset,
    samples: u64,
    rng: &mut R,
) -> Result<f64> {
    let size = a.len();
    let table = coefficient_table(phi, size)?;
    let row = table.row(size);
    // normalize so the sequential binomial split is exact
    let mass: f64 = (0..=size).map(|s| binomial(size, s) * row[s]).sum();
    let members = a.as_slice();
    let mut remaining = samples;
    let mut remaining_mass = 1.0;
    let mut total = 0.0;
    let subsets = 1u64 << size;
    for mask in 0..subsets {
        if remaining == 0 {
            break;
        }
        let prob = row[mask.count_ones() as usize] / mass;
        let count = if mask == subsets - 1 || remaining_mass <= prob {
            remaining
        } else {
            let q = (prob / remaining_mass).clamp(0.0, 1.0);
            Binomial::new(remaining, q).map_err(|err| Error::InvalidArgument(err.to_string()))?.sample(rng)
        };
        remaining_mass -= prob;
        if count == 0 {
            continue;
        }
        remaining -= count;
        let b = Subset::from_mask_over(mask, members);
        let gain = f.value_charged(&b.with(e), count)? - f.value_charged(&b, count)?;
        total += count as f64 * gain;
    }
    Ok(total / samples as f64)
}

/// `h(phi) = phi e^phi / (e^phi - 1)`, with `h(0) = 1`.
pub fn h(phi: f64) -> f64 {
    if phi == 0.0 {
        1.0
    } else {
        phi / -(-phi).exp_m1()
    }
}

/// `phi(gamma, beta) = gamma^2 + beta (1 - gamma)`.
pub fn phi_of(gamma: f64, beta: f64) -> f64 {
    gamma * gamma + beta * (1.0 - gamma)
}

/// `gamma^2 (1 - e^-phi) / phi`, continuous at `phi = 0`.
pub fn distorted_guarantee(gamma: f64, phi: f64) -> f64 {
    gamma * gamma / h(phi)
}

/// `(phi, h(phi), gamma^2 (1 - e^-phi) / phi)` for the given ratios.
pub fn phi_and_h(gamma: f64, beta: f64) -> (f64, f64, f64) {
    let phi = phi_of(gamma, beta);
    (phi, h(phi), distorted_guarantee(gamma, phi))
}

/// `H_k = 1 + 1/2 + ... + 1/k`.
pub fn harmonic(k: usize) -> f64 {
    (1..=k).map(|i| 1.0 / i as f64).sum()
}
