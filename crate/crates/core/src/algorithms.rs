//! Maximization algorithms over a matroid, the brute-force optimum and the
//! guarantee curves.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::matroids::Matroid;
use crate::par::{self, Execution};
use crate::potential::{self, coefficient_table, distorted_guarantee, h, harmonic, phi_of};
use crate::set_functions::Oracle;
use crate::subset::Subset;
use crate::{Error, Result};

/// Largest ground set accepted by exhaustive base enumeration.
pub const BRUTE_FORCE_LIMIT: usize = 16;
/// Largest ground set accepted by the exact-potential local search.
pub const EXACT_SEARCH_LIMIT: usize = 16;
/// Swap-acceptance iterations after which the exact search gives up.
pub const EXACT_ITERATION_CAP: usize = 1_000_000;

const INIT_CHUNK: usize = 1024;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub algorithm: String,
    pub seed: u64,
    pub solution: Subset,
    pub value: f64,
    /// Logical oracle queries made by this run.
    pub oracle_calls: u64,
    pub improvements: u64,
    pub phi_guesses_used: usize,
    pub guarantee_used: Option<f64>,
    pub wall_time_ms: f64,
}

/// Constants of the sampled distorted local search, derived from
/// `(epsilon, k, n)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FullLSParams {
    pub epsilon: f64,
    pub k: usize,
    pub n: usize,
    pub eps_prime: f64,
    /// Improvement threshold as a fraction of `f(S)`.
    pub threshold: f64,
    /// Sampling accuracy.
    pub delta: f64,
    /// Number of potential guesses.
    pub guesses: usize,
    /// Total improvement budget (real-valued; at most `floor` of it is used).
    pub max_improvements: f64,
    pub samples: u64,
    pub init_runs: usize,
}

impl FullLSParams {
    pub fn new(epsilon: f64, k: usize, n: usize) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon <= 1.0) {
            return Err(Error::InvalidArgument(format!("epsilon must lie in (0, 1], got {epsilon}")));
        }
        if k == 0 || n < 2 {
            return Err(Error::InvalidArgument(format!("need k >= 1 and n >= 2, got k = {k}, n = {n}")));
        }
        let kf = k as f64;
        let hk = harmonic(k);
        let h4 = h(4.0);
        let eps_prime = epsilon.min(1.0 / 128.0);
        let threshold = epsilon / kf;
        let delta = threshold / (4.0 * h4 * hk);
        // at epsilon = 1 the guess sequence collapses after its first term
        let guesses = if epsilon < 1.0 { 1 + ((3.0f64 / 16.0).ln() / (1.0 - epsilon).ln()).ceil() as usize } else { 1 };
        let max_improvements =
            (7.0 * 128.0 * (4.0 * guesses as f64 * epsilon).exp() * h4 * hk).ln() / delta.ln_1p();
        let samples = (196.0 / (delta * delta) * (max_improvements * kf * n as f64).ln()).ceil() as u64;
        let init_runs = (2.0 * (n as f64).ln() / (eps_prime * eps_prime)).ceil().max(1.0) as usize;
        Ok(FullLSParams {
            epsilon,
            k,
            n,
            eps_prime,
            threshold,
            delta,
            guesses,
            max_improvements,
            samples,
            init_runs,
        })
    }

    /// `4 (1 - epsilon)^j` for `j < guesses`.
    pub fn phi_guesses(&self) -> Vec<f64> {
        (0..self.guesses).map(|j| 4.0 * (1.0 - self.epsilon).powi(j as i32)).collect()
    }

    pub fn improvement_budget(&self) -> u64 {
        self.max_improvements.floor() as u64
    }
}

/// Times a run and fills in the bookkeeping fields.
struct Tracker<'a> {
    oracle: Oracle,
    start: Instant,
    name: &'a str,
}

impl<'a> Tracker<'a> {
    fn new(f: &Oracle, name: &'a str) -> Self {
        Tracker { oracle: f.fork(), start: Instant::now(), name }
    }

    fn finish(self, solution: Subset, improvements: u64, guesses: usize, guarantee: Option<f64>) -> Result<RunReport> {
        let value = self.oracle.value(&solution)?;
        Ok(RunReport {
            algorithm: self.name.to_string(),
            seed: 0,
            solution,
            value,
            oracle_calls: self.oracle.queries(),
            improvements,
            phi_guesses_used: guesses,
            guarantee_used: guarantee,
            wall_time_ms: self.start.elapsed().as_secs_f64() * 1e3,
        })
    }
}

/// A maximum-value base by exhaustive enumeration; ties go to the
/// lexicographically smallest base.
pub fn brute_force_opt(f: &Oracle, m: &Matroid) -> Result<(Subset, f64)> {
    brute_force_opt_with(Execution::default(), f, m)
}

pub fn brute_force_opt_with(exec: Execution, f: &Oracle, m: &Matroid) -> Result<(Subset, f64)> {
    let n = m.ground_size();
    if n > BRUTE_FORCE_LIMIT {
        return Err(Error::GroundSetTooLarge { n, limit: BRUTE_FORCE_LIMIT });
    }
    check_sizes(f, m)?;
    let bases = m.bases();
    let values = par::try_map_indexed(exec, bases.len(), |i| f.value(&bases[i]))?;
    let mut best = 0;
    for (i, v) in values.iter().enumerate() {
        if *v > values[best] {
            best = i;
        }
    }
    match bases.get(best) {
        Some(b) => Ok((b.clone(), values[best])),
        None => Ok((Subset::empty(), f.value(&Subset::empty())?)),
    }
}

fn check_sizes(f: &Oracle, m: &Matroid) -> Result<()> {
    if f.ground_size() != m.ground_size() {
        return Err(Error::DimensionMismatch(format!(
            "function over {} elements, matroid over {}",
            f.ground_size(),
            m.ground_size()
        )));
    }
    Ok(())
}

/// One residual random greedy pass. Returns the base and its value.
fn rrg_pass<R: Rng + ?Sized>(f: &Oracle, m: &Matroid, rng: &mut R) -> Result<(Subset, f64)> {
    let n = m.ground_size();
    let mut s = Subset::empty();
    let mut current = f.value(&s)?;
    let mut weights = vec![0.0; n];
    for _ in 0..m.rank() {
        for (e, w) in weights.iter_mut().enumerate() {
            *w = 0.0;
            if !s.contains(e) {
                let next = s.with(e);
                if m.is_independent(&next) {
                    *w = f.value(&next)? - current;
                }
            }
        }
        let block = m.max_weight_base_completion(&s, &weights)?;
        let pick = block.as_slice()[rng.random_range(0..block.len())];
        s.insert(pick);
        current = f.value(&s)?;
    }
    Ok((s, current))
}

/// Residual random greedy: `k` rounds, each adding an element drawn uniformly
/// from a maximum-marginal completion of the current set to a base.
pub fn residual_random_greedy<R: Rng + ?Sized>(f: &Oracle, m: &Matroid, rng: &mut R) -> Result<RunReport> {
    check_sizes(f, m)?;
    let t = Tracker::new(f, "rrg");
    let (s, _) = rrg_pass(&t.oracle, m, rng)?;
    t.finish(s, 0, 0, None)
}

/// Best (by `f`) of `runs` independent greedy passes. Pass `l` uses its own
/// stream `l` of a generator seeded from `rng`, so the result does not depend
/// on the execution mode.
pub fn best_of_runs_init<R: Rng + ?Sized>(f: &Oracle, m: &Matroid, runs: usize, rng: &mut R) -> Result<Subset> {
    best_of_runs_init_with(Execution::default(), f, m, runs, rng)
}

pub fn best_of_runs_init_with<R: Rng + ?Sized>(
    exec: Execution,
    f: &Oracle,
    m: &Matroid,
    runs: usize,
    rng: &mut R,
) -> Result<Subset> {
    if runs == 0 {
        return Err(Error::InvalidArgument("at least one initialization run is required".into()));
    }
    check_sizes(f, m)?;
    let seed: u64 = rng.random();
    let chunks = runs.div_ceil(INIT_CHUNK);
    let best = par::try_map_indexed(exec, chunks, |c| {
        let mut best: Option<(Subset, f64)> = None;
        for l in c * INIT_CHUNK..((c + 1) * INIT_CHUNK).min(runs) {
            let mut sub = run_stream(seed, l as u64);
            let (s, v) = rrg_pass(f, m, &mut sub)?;
            if best.as_ref().is_none_or(|(_, bv)| v > *bv) {
                best = Some((s, v));
            }
        }
        Ok::<_, Error>(best)
    })?;
    let mut overall: Option<(Subset, f64)> = None;
    for (s, v) in best.into_iter().flatten() {
        if overall.as_ref().is_none_or(|(_, bv)| v > *bv) {
            overall = Some((s, v));
        }
    }
    Ok(overall.map(|(s, _)| s).unwrap_or_default())
}

/// The generator used by initialization pass `l`.
pub fn run_stream(seed: u64, l: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(l);
    rng
}

/// Swap local search on `f` itself. Starts from a base containing the best
/// singleton and takes the first swap improving `f` by a factor `1 + eps/k`,
/// for at most `ceil(log_{1+eps/k} k)` improvements.
pub fn plain_local_search(f: &Oracle, m: &Matroid, epsilon: f64) -> Result<RunReport> {
    if !(epsilon > 0.0) {
        return Err(Error::InvalidArgument(format!("epsilon must be positive, got {epsilon}")));
    }
    check_sizes(f, m)?;
    let t = Tracker::new(f, "ls");
    let f = &t.oracle;
    let n = m.ground_size();
    let k = m.rank();
    if k == 0 {
        return t.finish(Subset::empty(), 0, 0, None);
    }
    let mut best_single: Option<(usize, f64)> = None;
    for e in 0..n {
        let single = Subset::from([e]);
        if m.is_independent(&single) {
            let v = f.value(&single)?;
            if best_single.is_none_or(|(_, bv)| v > bv) {
                best_single = Some((e, v));
            }
        }
    }
    let start = best_single.map(|(e, _)| Subset::from([e])).unwrap_or_default();
    let mut s = m.complete_lowest(&start)?;
    let factor = 1.0 + epsilon / k as f64;
    let cap = ((k as f64).ln() / factor.ln()).ceil() as u64;
    let mut improvements = 0;
    let mut value = f.value(&s)?;
    'search: while improvements < cap {
        for out in s.clone().iter() {
            for inn in (0..n).filter(|e| !s.contains(*e)) {
                let candidate = s.swap(out, inn);
                if !m.is_independent(&candidate) {
                    continue;
                }
                let v = f.value(&candidate)?;
                if factor * value < v {
                    s = candidate;
                    value = v;
                    improvements += 1;
                    continue 'search;
                }
            }
        }
        break;
    }
    t.finish(s, improvements, 0, None)
}

/// `sum_{B ⊆ A} m[|A|][|B|] f(e | B)` for each `e` in `elements`, from a
/// single pass over the subsets of `A`.
fn exact_marginals(f: &Oracle, row: &[f64], a: &Subset, elements: &[usize]) -> Result<Vec<f64>> {
    let members = a.as_slice();
    let mut out = vec![0.0; elements.len()];
    for mask in 0..(1u64 << members.len()) {
        let b = Subset::from_mask_over(mask, members);
        let coeff = row[b.len()];
        let base = f.value(&b)?;
        for (slot, &e) in out.iter_mut().zip(elements) {
            *slot += coeff * (f.value(&b.with(e))? - base);
        }
    }
    Ok(out)
}

/// Local search on the exact distorted potential with `phi = gamma^2 +
/// beta (1 - gamma)`. Starts from the lowest-index base; takes the first swap
/// (out ascending, then in ascending) that strictly increases the potential.
pub fn distorted_local_search_exact(f: &Oracle, m: &Matroid, gamma: f64, beta: f64) -> Result<RunReport> {
    let n = m.ground_size();
    if n > EXACT_SEARCH_LIMIT {
        return Err(Error::SetTooLarge { size: n, limit: EXACT_SEARCH_LIMIT });
    }
    if !(gamma > 0.0 && gamma <= 1.0) {
        return Err(Error::InvalidArgument(format!("gamma must lie in (0, 1], got {gamma}")));
    }
    check_sizes(f, m)?;
    let phi = phi_of(gamma, beta);
    let guarantee = distorted_guarantee(gamma, phi);
    let t = Tracker::new(f, "dls-exact");
    let f = &t.oracle;
    let k = m.rank();
    let mut s = m.complete_lowest(&Subset::empty())?;
    if k == 0 {
        return t.finish(s, 0, 0, Some(guarantee));
    }
    let table = coefficient_table(phi, k - 1)?;
    let row = table.row(k - 1);
    let mut improvements = 0u64;
    let mut iterations = 0usize;
    'search: loop {
        iterations += 1;
        if iterations > EXACT_ITERATION_CAP {
            return Err(Error::NonTermination(EXACT_ITERATION_CAP));
        }
        for out in s.clone().iter() {
            let rest = s.without(out);
            let ins: Vec<usize> = (0..n).filter(|&e| !s.contains(e) && m.is_independent(&rest.with(e))).collect();
            if ins.is_empty() {
                continue;
            }
            let mut elements = vec![out];
            elements.extend(&ins);
            let gains = exact_marginals(f, row, &rest, &elements)?;
            let g_out = gains[0];
            for (i, &inn) in ins.iter().enumerate() {
                let g_in = gains[i + 1];
                if g_in - g_out > 1e-12 * g_in.abs().max(g_out.abs()) && g_in > g_out {
                    s = rest.with(inn);
                    improvements += 1;
                    continue 'search;
                }
            }
        }
        break;
    }
    t.finish(s, improvements, 1, Some(guarantee))
}

/// Sampled distorted local search with potential guessing. Initializes from
/// the best of `init_runs` greedy passes, then for each guess of `phi`
/// (descending) searches for swaps whose estimated potential gain exceeds
/// `threshold * f(S)`, warm-starting from the previous guess. The total
/// number of swaps is capped by the improvement budget. Returns the best set
/// by `f` among the initial set and the end of each guess.
pub fn distorted_local_search_full<R: Rng + ?Sized>(
    f: &Oracle,
    m: &Matroid,
    params: &FullLSParams,
    rng: &mut R,
) -> Result<RunReport> {
    distorted_local_search_full_with(Execution::default(), f, m, params, rng)
}

pub fn distorted_local_search_full_with<R: Rng + ?Sized>(
    exec: Execution,
    f: &Oracle,
    m: &Matroid,
    params: &FullLSParams,
    rng: &mut R,
) -> Result<RunReport> {
    let n = m.ground_size();
    if n < 2 {
        return Err(Error::InvalidArgument(format!("need at least two elements, got {n}")));
    }
    check_sizes(f, m)?;
    let t = Tracker::new(f, "dls-full");
    let f = &t.oracle;
    let k = m.rank();
    if k == 0 {
        return t.finish(Subset::empty(), 0, 0, None);
    }
    let start = best_of_runs_init_with(exec, f, m, params.init_runs, rng)?;
    let mut best_value = f.value(&start)?;
    let mut best = start.clone();
    let mut s = start;
    let budget = params.improvement_budget();
    let mut improvements = 0u64;
    let mut guesses_used = 0;
    for phi in params.phi_guesses() {
        guesses_used += 1;
        'search: while improvements < budget {
            let value = f.value(&s)?;
            for out in s.clone().iter() {
                let rest = s.without(out);
                let mut g_out = None;
                for inn in (0..n).filter(|e| !s.contains(*e)) {
                    if !m.is_independent(&rest.with(inn)) {
                        continue;
                    }
                    let g_out = match g_out {
                        Some(g) => g,
                        None => *g_out.insert(potential::estimate_g_marginal(f, phi, out, &rest, params.samples, rng)?),
                    };
                    let g_in = potential::estimate_g_marginal(f, phi, inn, &rest, params.samples, rng)?;
                    if g_in > g_out + params.threshold * value {
                        s = rest.with(inn);
                        improvements += 1;
                        continue 'search;
                    }
                }
            }
            break;
        }
        let v = f.value(&s)?;
        if v > best_value {
            best_value = v;
            best = s.clone();
        }
    }
    t.finish(best, improvements, guesses_used, None)
}

/// One row of the guarantee comparison for `(gamma, 1/gamma)`-weakly
/// submodular functions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurveRow {
    pub gamma: f64,
    pub rrg_old: f64,
    pub rrg_new: f64,
    pub distorted: f64,
}

pub fn curve_row(gamma: f64) -> CurveRow {
    let beta = 1.0 / gamma;
    CurveRow {
        gamma,
        rrg_old: gamma * gamma / ((1.0 + gamma) * (1.0 + gamma)),
        rrg_new: gamma / (gamma + beta),
        distorted: distorted_guarantee(gamma, phi_of(gamma, beta)),
    }
}

pub fn guarantee_curve(gammas: &[f64]) -> Result<Vec<CurveRow>> {
    gammas
        .iter()
        .map(|&g| {
            if g > 0.0 && g <= 1.0 {
                Ok(curve_row(g))
            } else {
                Err(Error::InvalidArgument(format!("gamma must lie in (0, 1], got {g}")))
            }
        })
        .collect()
}

/// `steps` evenly spaced values from `lo` to `hi` inclusive.
pub fn uniform_grid(lo: f64, hi: f64, steps: usize) -> Result<Vec<f64>> {
    if !(lo > 0.0 && lo <= hi && hi <= 1.0) || steps < 2 {
        return Err(Error::InvalidArgument(format!("need 0 < lo <= hi <= 1 and steps >= 2, got {lo}, {hi}, {steps}")));
    }
    let span = hi - lo;
    Ok((0..steps).map(|i| if i + 1 == steps { hi } else { lo + span * i as f64 / (steps - 1) as f64 }).collect())
}

/// The `gamma` at which the distorted guarantee overtakes the residual greedy
/// one, by bisection on `[0.5, 1]`.
pub fn curve_crossing() -> f64 {
    let diff = |g: f64| {
        let r = curve_row(g);
        r.distorted - r.rrg_new
    };
    let (mut lo, mut hi) = (0.5, 1.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if diff(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Algorithm selection with its parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AlgorithmSpec {
    ResidualRandomGreedy,
    LocalSearch { epsilon: f64 },
    DistortedExact { gamma: f64, beta: f64 },
    DistortedFull { epsilon: f64 },
    BruteForce,
}

impl AlgorithmSpec {
    pub const IDS: [&'static str; 5] = ["rrg", "ls", "dls-exact", "dls-full", "brute"];

    pub fn id(&self) -> &'static str {
        match self {
            AlgorithmSpec::ResidualRandomGreedy => "rrg",
            AlgorithmSpec::LocalSearch { .. } => "ls",
            AlgorithmSpec::DistortedExact { .. } => "dls-exact",
            AlgorithmSpec::DistortedFull { .. } => "dls-full",
            AlgorithmSpec::BruteForce => "brute",
        }
    }
}

/// Runs `spec` once with a generator seeded from `seed`.
pub fn run_algorithm(spec: &AlgorithmSpec, f: &Oracle, m: &Matroid, seed: u64) -> Result<RunReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = match *spec {
        AlgorithmSpec::ResidualRandomGreedy => residual_random_greedy(f, m, &mut rng)?,
        AlgorithmSpec::LocalSearch { epsilon } => plain_local_search(f, m, epsilon)?,
        AlgorithmSpec::DistortedExact { gamma, beta } => distorted_local_search_exact(f, m, gamma, beta)?,
        AlgorithmSpec::DistortedFull { epsilon } => {
            let params = FullLSParams::new(epsilon, m.rank().max(1), m.ground_size())?;
            distorted_local_search_full(f, m, &params, &mut rng)?
        }
        AlgorithmSpec::BruteForce => {
            let t = Tracker::new(f, "brute");
            let (s, _) = brute_force_opt(&t.oracle, m)?;
            t.finish(s, 0, 0, Some(1.0))?
        }
    };
    report.seed = seed;
    Ok(report)
}

/// Runs `spec` for every seed; reports come back in seed order.
pub fn run_seeds(exec: Execution, spec: &AlgorithmSpec, f: &Oracle, m: &Matroid, seeds: &[u64]) -> Result<Vec<RunReport>> {
    par::try_map_indexed(exec, seeds.len(), |i| run_algorithm(spec, f, m, seeds[i]))
}
