//! Named property suites checked on seeded random instances against
//! brute-force references. Each suite reports the worst residual it saw.

use std::sync::Arc;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::algorithms::{self, curve_crossing, curve_row, FullLSParams};
use crate::linalg::{self, invert_pd, min_eigenvalue, sparse_min_eigenvalue, SymmetricMatrix};
use crate::matroids::Matroid;
use crate::par::{self, Execution};
use crate::potential::{self, coefficient_table, exact_g, exact_g_marginal, h, harmonic, phi_of};
use crate::ratios::{self, aopt_bound, pair_ratios, ratios_from_table, value_table, RatioReport};
use crate::set_functions::{
    generate_coverage, generate_design_instance, generate_regression_instance, ModularFunction, Oracle, RegressionInstance,
    SetFunction, WorstCaseInstance,
};
use crate::subset::{binomial, Subset};
use crate::{Error, Result};

pub const DEFAULT_SEED: u64 = 0x5EED;

pub const SUITE_IDS: [&str; 27] = [
    "example-1",
    "fig-1",
    "lemma-1.1",
    "lemma-1.2",
    "lemma-1.3",
    "lemma-1.4",
    "lemma-3",
    "lemma-e1",
    "lemma-e2",
    "lemma-e3",
    "interlacing",
    "monotone",
    "prop-1",
    "thm-1",
    "das-kempe",
    "thm-4",
    "thm-5",
    "thm-6",
    "thm-7",
    "thm-8",
    "local-search",
    "lemma-a1",
    "lemma-a2",
    "lemma-a3",
    "lemma-a4",
    "lemma-b1",
    "relations",
];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteOutcome {
    pub id: String,
    pub passed: bool,
    pub worst_residual: f64,
    pub cases: usize,
    pub detail: String,
}

/// Accumulates residuals against a tolerance.
#[derive(Debug, Default)]
struct Tally {
    worst: f64,
    cases: usize,
    failures: usize,
}

impl Tally {
    fn record(&mut self, residual: f64, tol: f64) {
        self.cases += 1;
        if residual.is_nan() || residual > tol {
            self.failures += 1;
        }
        if residual.is_nan() {
            self.worst = f64::NAN;
        } else if !self.worst.is_nan() {
            self.worst = self.worst.max(residual);
        }
    }

    /// Records `lhs <= rhs` with slack `tol`.
    fn at_most(&mut self, lhs: f64, rhs: f64, tol: f64) {
        self.record((lhs - rhs).max(0.0), tol);
    }

    fn close(&mut self, a: f64, b: f64, tol: f64) {
        self.record((a - b).abs(), tol);
    }

    fn merge(&mut self, other: Tally) {
        self.cases += other.cases;
        self.failures += other.failures;
        self.worst = if other.worst.is_nan() { f64::NAN } else { self.worst.max(other.worst) };
    }

    fn outcome(self, id: &str, detail: impl Into<String>) -> SuiteOutcome {
        SuiteOutcome {
            id: id.to_string(),
            passed: self.failures == 0 && self.cases > 0,
            worst_residual: self.worst,
            cases: self.cases,
            detail: detail.into(),
        }
    }
}

/// Independent 64-bit seed for item `i` of stream `tag`.
pub fn sub_seed(seed: u64, tag: u64, i: u64) -> u64 {
    let mut z = seed ^ tag.wrapping_mul(0xD1B5_4A32_D192_ED03) ^ i.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn rng_for(seed: u64, tag: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(sub_seed(seed, tag, u64::MAX))
}

/// A random regression instance with `n` predictors.
pub fn random_regression(n: usize, seed: u64) -> Result<RegressionInstance> {
    generate_regression_instance(n, 4 * n + 12, 0.5, seed)
}

fn random_subset<R: Rng>(n: usize, rng: &mut R) -> Subset {
    Subset::new((0..n).filter(|_| rng.random_bool(0.5)))
}

fn random_pd(n: usize, rng: &mut ChaCha8Rng) -> SymmetricMatrix {
    let g = DMatrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0));
    SymmetricMatrix::new(&g * g.transpose() / n as f64 + DMatrix::identity(n, n) * 0.3).expect("Gram plus ridge is symmetric")
}

/// Runs one suite by id.
pub fn run_suite(id: &str, seed: u64) -> Result<SuiteOutcome> {
    match id {
        "example-1" => example_1(),
        "fig-1" => fig_1(),
        "lemma-1.1" => lemma_1_1(seed),
        "lemma-1.2" => lemma_1_2(),
        "lemma-1.3" => lemma_1_3(),
        "lemma-1.4" => lemma_1_4(),
        "lemma-3" => lemma_3(seed),
        "lemma-e1" => lemma_e1(seed),
        "lemma-e2" => lemma_e2(seed),
        "lemma-e3" => lemma_e3(seed),
        "interlacing" => interlacing(seed),
        "monotone" => monotone(seed),
        "prop-1" => prop_1(seed),
        "thm-1" => thm_1(seed, false),
        "das-kempe" => thm_1(seed, true),
        "thm-4" => thm_4(seed),
        "thm-5" => thm_5(seed),
        "thm-6" => thm_6(seed),
        "thm-7" => thm_7(),
        "thm-8" => thm_8(seed),
        "local-search" => local_search(seed),
        "lemma-a1" => lemma_a1(seed),
        "lemma-a2" => lemma_a2(seed),
        "lemma-a3" => lemma_a3(seed),
        "lemma-a4" => lemma_a4(seed),
        "lemma-b1" => lemma_b1(),
        "relations" => relations(seed),
        other => Err(Error::InvalidArgument(format!("unknown suite '{other}'; valid ids: {}", SUITE_IDS.join(", ")))),
    }
}

/// Runs several suites; `["all"]` selects every suite.
pub fn run_suites(ids: &[String], seed: u64) -> Result<Vec<SuiteOutcome>> {
    let selected: Vec<String> = if ids.iter().any(|s| s == "all") {
        SUITE_IDS.iter().map(|s| s.to_string()).collect()
    } else {
        ids.to_vec()
    };
    for id in &selected {
        if !SUITE_IDS.contains(&id.as_str()) {
            return Err(Error::InvalidArgument(format!("unknown suite '{id}'; valid ids: {}", SUITE_IDS.join(", "))));
        }
    }
    selected.iter().map(|id| run_suite(id, seed)).collect()
}

fn example_1() -> Result<SuiteOutcome> {
    let inst = RegressionInstance::suppressor_example();
    let lmin_expected = 1.0 - std::f64::consts::FRAC_1_SQRT_2;
    let lmin = min_eigenvalue(inst.covariance());
    let f = Oracle::new(inst);
    let mut t = Tally::default();
    t.close(f.marginal(0, &Subset::empty())?, 0.0, 1e-10);
    t.close(f.marginal(0, &Subset::from([1]))?, 0.5, 1e-10);
    let r = ratios::empirical_ratios(&f, 2)?;
    t.close(r.gamma_hat, 0.5, 1e-10);
    t.close(r.gamma_e_hat, 0.0, 1e-10);
    t.close(lmin, lmin_expected, 1e-10);
    Ok(t.outcome("example-1", "suppressor example: marginals, ratios and eigenvalue"))
}

fn fig_1() -> Result<SuiteOutcome> {
    let mut t = Tally::default();
    let end = curve_row(1.0);
    t.close(end.rrg_old, 0.25, 1e-6);
    t.close(end.rrg_new, 0.5, 1e-6);
    t.close(end.distorted, 1.0 - (-1.0f64).exp(), 1e-6);
    t.close(curve_crossing(), 0.7217, 1e-3);
    let grid = algorithms::uniform_grid(0.05, 1.0, 200)?;
    let rows = algorithms::guarantee_curve(&grid)?;
    for w in rows.windows(2) {
        t.at_most(w[0].distorted, w[1].distorted, 0.0);
    }
    Ok(t.outcome("fig-1", "curve endpoints, crossing point and monotone distorted column"))
}

const PHI_GRID: [f64; 4] = [0.75, 1.0, 2.0, 4.0];

fn lemma_1_1(seed: u64) -> Result<SuiteOutcome> {
    let mut t = Tally::default();
    let mut rng = rng_for(seed, 11);
    for i in 0..12 {
        let f = Oracle::new(generate_coverage(9, 24, sub_seed(seed, 11, i))?);
        for &phi in &PHI_GRID {
            let a = random_subset(9, &mut rng);
            for e in (0..9).filter(|e| !a.contains(*e)) {
                let lhs = exact_g_marginal(&f, phi, e, &a)?;
                let rhs = exact_g(&f, phi, &a.with(e))? - exact_g(&f, phi, &a)?;
                t.close(lhs, rhs, 1e-9);
            }
        }
    }
    Ok(t.outcome("lemma-1.1", "potential marginal as coefficient-weighted sum of marginals"))
}

fn lemma_1_2() -> Result<SuiteOutcome> {
    let mut t = Tally::default();
    for &phi in &PHI_GRID {
        let m = coefficient_table(phi, 32)?;
        for a in 0..=32 {
            let s: f64 = (0..=a).map(|b| binomial(a, b) * m.get(a, b)).sum();
            t.close(s, 1.0, 1e-10);
        }
    }
    Ok(t.outcome("lemma-1.2", "coefficients over all subsets sum to one"))
}

fn lemma_1_3() -> Result<SuiteOutcome> {
    let mut t = Tally::default();
    for &phi in &PHI_GRID {
        let m = coefficient_table(phi, 33)?;
        for a in 0..=32 {
            for b in 0..=a {
                t.close(m.get(a, b), m.get(a + 1, b + 1) + m.get(a + 1, b), 1e-10);
            }
        }
    }
    Ok(t.outcome("lemma-1.3", "Pascal-type identity"))
}

fn lemma_1_4() -> Result<SuiteOutcome> {
    let mut t = Tally::default();
    for &phi in &PHI_GRID {
        let m = coefficient_table(phi, 32)?;
        let low = phi / phi.exp_m1();
        let high = phi / -(-phi).exp_m1();
        for a in 1..=32i64 {
            for b in 0..=a {
                let mut rhs = -(b as f64) * m.get_signed(a - 1, b - 1) + (a - b) as f64 * m.get_signed(a - 1, b);
                if b == 0 {
                    rhs -= low;
                }
                if b == a {
                    rhs += high;
                }
                t.close(phi * m.get(a as usize, b as usize), rhs, 1e-9);
            }
        }
    }
    Ok(t.outcome("lemma-1.4", "integration-by-parts recurrence"))
}

fn lemma_3(seed: u64) -> Result<SuiteOutcome> {
    let mut t = Tally::default();
    for i in 0..30 {
        let n = 3 + (i % 4) as usize;
        let inst = random_regression(n, sub_seed(seed, 3, i))?;
        let full = (1u64 << n) - 1;
        for am in 1..full {
            let a = Subset::from_mask(am);
            let res = inst.residual_instance(&a)?;
            let rest: Vec<usize> = (0..n).filter(|e| !a.contains(*e)).collect();
            let r2_a = inst.r2_value(&a)?;
            let free = full & !am;
            let mut sm = free;
            while sm != 0 {
                let s = Subset::from_mask(sm);
                let local = Subset::new(s.iter().map(|e| rest.iter().position(|&r| r == e).expect("s avoids a")));
                let lhs = inst.r2_value(&a.union(&s))?;
                let rhs = r2_a + (1.0 - r2_a) * res.r2_value(&local)?;
                t.close(lhs, rhs, 1e-8);
                sm = (sm - 1) & free;
            }
        }
    }
    Ok(t.outcome("lemma-3", "R² splits into the part explained by A plus the residual part"))
}

fn lemma_e1(seed: u64) -> Result<SuiteOutcome> {
    let mut t = Tally::default();
    let mut rng = rng_for(seed, 21);
    for _ in 0..100 {
        let n = rng.random_range(2..=7);
        let m = random_pd(n, &mut rng);
        let s = rng.random_range(1..n);
        let full = m.as_matrix();
        let b = SymmetricMatrix::new(full.view((0, 0), (s, s)).into_owned())?;
        let u = full.view((0, s), (s, n - s)).into_owned();
        let v = full.view((s, 0), (n - s, s)).into_owned();
        let a = full.view((s, s), (n - s, n - s)).into_owned();
        let b_inv = invert_pd(&b)?.into_matrix();
        let schur = invert_pd(&SymmetricMatrix::new(&a - &v * &b_inv * &u)?)?.into_matrix();
        let mut block = DMatrix::zeros(n, n);
        block.view_mut((0, 0), (s, s)).copy_from(&(&b_inv + &b_inv * &u * &schur * &v * &b_inv));
        block.view_mut((0, s), (s, n - s)).copy_from(&(-&b_inv * &u * &schur));
        block.view_mut((s, 0), (n - s, s)).copy_from(&(-&schur * &v * &b_inv));
        block.view_mut((s, s), (n - s, n - s)).copy_from(&schur);
        let direct = invert_pd(&m)?;
        t.record((block - direct.as_matrix()).amax(), 1e-9);
        let twice = invert_pd(&direct)?;
        t.record((twice.as_matrix() - full).amax(), 1e-8);
    }
    Ok(t.outcome("lemma-e1", "block inverse via the Schur complement; double inversion"))
}

fn lemma_e2(seed: u64) -> Result<SuiteOutcome> {
    let mut t = Tally::default();
    let mut rng = rng_for(seed, 22);
    for _ in 0..100 {
        let n = rng.random_range(2..=7);
        let r = rng.random_range(1..=n);
        let a = random_pd(n, &mut rng);
        let c = random_pd(r, &mut rng);
        let u = DMatrix::from_fn(n, r, |_, _| rng.random_range(-1.0..1.0));
        let v = u.transpose();
        let via = linalg::woodbury_inverse(&invert_pd(&a)?, &u, &c, &v)?;
        let direct = invert_pd(&SymmetricMatrix::new(a.as_matrix() + &u * c.as_matrix() * &v)?)?;
        t.record((via.as_matrix() - direct.as_matrix()).amax(), 1e-9);
    }
    Ok(t.outcome("lemma-e2", "Sherman-Morrison-Woodbury against direct inversion"))
}

fn lemma_e3(seed: u64) -> Result<SuiteOutcome> {
    let mut t = Tally::default();
    for i in 0..30 {
        let n = 3 + (i % 4) as usize;
        let inst = random_regression(n, sub_seed(seed, 23, i))?;
        let lmin = min_eigenvalue(inst.covariance());
        for am in 1..(1u64 << n) - 1 {
            let res = inst.residual_instance(&Subset::from_mask(am))?;
            t.at_most(lmin, min_eigenvalue(res.covariance()), 1e-8);
        }
    }
    Ok(t.outcome("lemma-e3", "residualized covariance keeps the smallest eigenvalue from dropping"))
}

fn interlacing(seed: u64) -> Result<SuiteOutcome> {
    let mut t = Tally::default();
    let mut rng = rng_for(seed, 24);
    for _ in 0..50 {
        let n = rng.random_range(2..=8);
        let m = random_pd(n, &mut rng);
        let mut prev = f64::INFINITY;
        for k in 1..=n {
            let cur = sparse_min_eigenvalue(&m, k)?;
            t.at_most(cur, prev, 1e-12);
            prev = cur;
        }
        t.close(prev, min_eigenvalue(&m), 1e-12);
    }
    Ok(t.outcome("interlacing", "sparse minimum eigenvalue is non-increasing in k"))
}

fn sample_oracles(seed: u64, tag: u64, count: u64, n: usize) -> Result<Vec<Oracle>> {
    let mut out = Vec::new();
    for i in 0..count {
        let s = sub_seed(seed, tag, i);
        let f: Arc<dyn SetFunction> = match i % 3 {
            0 => Arc::new(random_regression(n, s)?),
            1 => Arc::new(generate_coverage(n, 3 * n, s)?),
            _ => Arc::new(generate_design_instance(1 + (i as usize % 4), n, s)?),
        };
        out.push(Oracle::from_arc(f));
    }
    Ok(out)
}

fn monotone(seed: u64) -> Result<SuiteOutcome> {
    let mut t = Tally::default();
    let mut rng = rng_for(seed, 25);
    let mut oracles = sample_oracles(seed, 25, 6, 8)?;
    oracles.push(Oracle::new(WorstCaseInstance::new(8, 0.3)?));
    oracles.push(Oracle::new(ModularFunction::new((0..8).map(|i| i as f64 * 0.25).collect())?));
    for f in &oracles {
        t.close(f.value(&Subset::empty())?, 0.0, 1e-12);
        for _ in 0..1000 {
            let b = random_subset(8, &mut rng);
            let a = Subset::new(b.iter().filter(|_| rng.random_bool(0.5)));
            let (fa, fb) = (f.value(&a)?, f.value(&b)?);
            t.at_most(fa, fb, 1e-9);
            t.at_most(0.0, fa, 1e-12);
        }
    }
    Ok(t.outcome("monotone", "normalized, nonnegative and monotone under inclusion"))
}

/// Graphic matroid of a small graph given by its edge list.
pub fn graphic_matroid(vertices: usize, edges: Vec<(usize, usize)>) -> Matroid {
    let n = edges.len();
    Matroid::from_callback(
        n,
        Arc::new(move |s: &Subset| {
            let mut parent: Vec<usize> = (0..vertices).collect();
            fn root(p: &mut [usize], mut x: usize) -> usize {
                while p[x] != x {
                    p[x] = p[p[x]];
                    x = p[x];
                }
                x
            }
            for e in s.iter() {
                let (u, v) = edges[e];
                let (ru, rv) = (root(&mut parent, u), root(&mut parent, v));
                if ru == rv {
                    return false;
                }
                parent[ru] = rv;
            }
            true
        }),
    )
}

fn prop_1(seed: u64) -> Result<SuiteOutcome> {
    let mut t = Tally::default();
    let mut rng = rng_for(seed, 26);
    let matroids = [
        Matroid::uniform(9, 4),
        Matroid::partition(vec![0, 0, 0, 1, 1, 2, 2, 2, 2], vec![2, 1, 2])?,
        graphic_matroid(5, vec![(0, 1), (1, 2), (2, 3), (3, 4), (4, 0), (0, 2), (1, 3), (2, 4)]),
    ];
    for m in &matroids {
        for base in m.bases() {
            t.close(base.len() as f64, m.rank() as f64, 0.0);
        }
        for _ in 0..200 {
            let a = m.random_base(&mut rng);
            let b = m.random_base(&mut rng);
            let pi = m.exchange_bijection(&a, &b)?;
            let images = Subset::new(pi.iter().map(|p| p.1));
            let ok = pi.len() == a.len()
                && images == b
                && pi.iter().all(|&(x, y)| a.contains(x) && m.is_independent(&a.without(x).with(y)));
            t.record(if ok { 0.0 } else { 1.0 }, 0.0);
        }
    }
    Ok(t.outcome("prop-1", "exchange bijections between random bases"))
}

fn thm_1(seed: u64, lower_side: bool) -> Result<SuiteOutcome> {
    let per = par::try_map_indexed(Execution::default(), 200, |i| {
        let n = 3 + i % 6;
        let inst = random_regression(n, sub_seed(seed, 31, i as u64))?;
        let c = inst.covariance().clone();
        let f = Oracle::new(inst);
        let table = value_table(&f, Execution::Sequential)?;
        let mut t = Tally::default();
        for k in 2..=n {
            let lmin = sparse_min_eigenvalue(&c, k)?;
            let r = ratios::ratios_from_table_with(Execution::Sequential, &table, n, k);
            if lower_side {
                t.at_most(lmin, r.gamma_hat, 1e-8);
            } else {
                t.at_most(r.beta_hat, 1.0 / lmin, 1e-8);
            }
        }
        Ok::<_, Error>(t)
    })?;
    let mut t = Tally::default();
    per.into_iter().for_each(|x| t.merge(x));
    let (id, what) = if lower_side {
        ("das-kempe", "lower ratio at least the sparse minimum eigenvalue")
    } else {
        ("thm-1", "upper ratio at most the inverse sparse minimum eigenvalue")
    };
    Ok(t.outcome(id, format!("{what}, 200 regression instances")))
}

/// A mixed pool of small instances with matroids for algorithm checks.
fn algorithm_pool(seed: u64, tag: u64, count: u64) -> Result<Vec<(Oracle, Matroid)>> {
    let mut out = Vec::new();
    for i in 0..count {
        let s = sub_seed(seed, tag, i);
        let n = 7 + (i % 3) as usize;
        let f: Arc<dyn SetFunction> = match i % 3 {
            0 => Arc::new(generate_coverage(n, 3 * n, s)?),
            1 => Arc::new(random_regression(n, s)?),
            _ => Arc::new(generate_design_instance(2 + (i as usize % 3), n, s)?),
        };
        let m = if i % 2 == 0 {
            Matroid::uniform(n, 3)
        } else {
            let classes = (0..n).map(|e| e % 3).collect();
            Matroid::partition(classes, vec![1, 2, 1])?
        };
        out.push((Oracle::from_arc(f), m));
    }
    Ok(out)
}

fn full_ratios(f: &Oracle) -> Result<RatioReport> {
    ratios::empirical_ratios(f, f.ground_size())
}

fn thm_4(seed: u64) -> Result<SuiteOutcome> {
    let mut t = Tally::default();
    let pool = algorithm_pool(seed, 41, 20)?;
    let seeds: Vec<u64> = (0..2000).map(|j| sub_seed(seed, 42, j)).collect();
    for (f, m) in &pool {
        let r = full_ratios(f)?;
        let (_, opt) = algorithms::brute_force_opt(f, m)?;
        let reports = algorithms::run_seeds(Execution::default(), &algorithms::AlgorithmSpec::ResidualRandomGreedy, f, m, &seeds)?;
        let mean = reports.iter().map(|x| x.value).sum::<f64>() / reports.len() as f64;
        let bound = r.gamma_hat / (r.gamma_hat + r.beta_hat) * opt;
        t.at_most(bound - 0.02 * opt, mean, 0.0);
    }
    Ok(t.outcome("thm-4", "mean greedy value over 2000 runs against gamma/(gamma+beta) OPT"))
}

/// `h(phi) f(A) + sum_i [g(A - a_i + o_i) - g(A)]` and `gamma^2 f(O)`.
pub fn base_pair_sides(f: &Oracle, m: &Matroid, phi: f64, gamma: f64, a: &Subset, o: &Subset) -> Result<(f64, f64)> {
    let pi = m.exchange_bijection(a, o)?;
    let ga = exact_g(f, phi, a)?;
    let mut lhs = h(phi) * f.value(a)?;
    for (x, y) in pi {
        if x != y {
            lhs += exact_g(f, phi, &a.swap(x, y))? - ga;
        }
    }
    Ok((lhs, gamma * gamma * f.value(o)?))
}

fn thm_5(seed: u64) -> Result<SuiteOutcome> {
    let mut t = Tally::default();
    for i in 0..50u64 {
        let s = sub_seed(seed, 51, i);
        let n = 7 + (i % 4) as usize;
        let f = if i % 2 == 0 {
            Oracle::new(generate_coverage(n, 3 * n, s)?)
        } else {
            Oracle::new(random_regression(n.min(8), s)?)
        };
        let n = f.ground_size();
        let m = Matroid::uniform(n, 3 + (i % 2) as usize);
        let r = full_ratios(&f)?;
        let (_, opt) = algorithms::brute_force_opt(&f, &m)?;
        let run = algorithms::distorted_local_search_exact(&f, &m, r.gamma_hat, r.beta_hat)?;
        let bound = potential::distorted_guarantee(r.gamma_hat, phi_of(r.gamma_hat, r.beta_hat));
        t.at_most(bound * opt, run.value, 1e-9);
    }
    let mut rng = rng_for(seed, 52);
    for i in 0..10u64 {
        let inst = random_regression(7, sub_seed(seed, 53, i))?;
        let f = Oracle::new(inst);
        let r = full_ratios(&f)?;
        let phi = phi_of(r.gamma_hat, r.beta_hat);
        let m = if i % 2 == 0 { Matroid::uniform(7, 3) } else { Matroid::partition(vec![0, 0, 1, 1, 1, 2, 2], vec![1, 2, 1])? };
        for _ in 0..50 {
            let a = m.random_base(&mut rng);
            let o = m.random_base(&mut rng);
            let (lhs, rhs) = base_pair_sides(&f, &m, phi, r.gamma_hat, &a, &o)?;
            t.at_most(rhs, lhs, 1e-8);
        }
    }
    Ok(t.outcome("thm-5", "exact distorted local optimum guarantee on 50 instances; base-pair inequality on 500 pairs"))
}

fn thm_6(seed: u64) -> Result<SuiteOutcome> {
    let runs = 20u64;
    let bound = 1.0 - (-1.0f64).exp() - 0.25;
    let mut t = Tally::default();
    let mut hits = 0;
    for i in 0..runs {
        let f = Oracle::new(generate_coverage(10, 30, sub_seed(seed, 61, i % 4))?);
        let m = Matroid::uniform(10, 3);
        let params = FullLSParams::new(0.1, 3, 10)?;
        let (_, opt) = algorithms::brute_force_opt(&f, &m)?;
        let mut rng = ChaCha8Rng::seed_from_u64(sub_seed(seed, 62, i));
        let r = algorithms::distorted_local_search_full(&f, &m, &params, &mut rng)?;
        if r.value >= bound * opt {
            hits += 1;
        }
        t.at_most(r.improvements as f64, params.max_improvements, 0.0);
    }
    let shortfall = (0.95 - hits as f64 / runs as f64).max(0.0);
    t.record(shortfall, 0.0);
    Ok(t.outcome("thm-6", format!("sampled distorted local search: {hits}/{runs} runs above (1 - 1/e - 0.25) OPT")))
}

fn thm_7() -> Result<SuiteOutcome> {
    let mut t = Tally::default();
    for k in 3..=8 {
        for &gamma in &[0.1, 0.3, 0.5, 0.9] {
            let w = WorstCaseInstance::new(k, gamma)?;
            let levels = w.levels().to_vec();
            for i in 0..k.saturating_sub(1) {
                let step = levels[i + 1] - levels[i] - gamma * (1.0 - levels[i]) / (k - i) as f64;
                t.record(step.abs(), 1e-12);
            }
            let product: f64 = (1..k).map(|l| (l as f64 + 1.0 - gamma) / l as f64).product();
            t.close(w.beta_lower_bound(), product, 1e-12);
            let f = Oracle::new(w);
            let table = value_table(&f, Execution::default())?;
            let r = ratios_from_table(&table, k, k);
            t.close(r.gamma_hat, gamma, 1e-9);
            let beta = pair_ratios(&table, 0, (1u64 << k) - 1).1.unwrap_or(f64::NAN);
            t.close(beta, product, 1e-9);
        }
    }
    Ok(t.outcome("thm-7", "worst-case construction: lower ratio and upper ratio at (∅, X)"))
}

fn thm_8(seed: u64) -> Result<SuiteOutcome> {
    let per = par::try_map_indexed(Execution::default(), 100, |i| {
        let p = 1 + i % 4;
        let n = 3 + (i / 4) % 6;
        let inst = generate_design_instance(p, n, sub_seed(seed, 81, i as u64))?;
        let c = aopt_bound(&inst);
        let f = Oracle::new(inst);
        let table = value_table(&f, Execution::Sequential)?;
        let r = ratios::ratios_from_table_with(Execution::Sequential, &table, n, n);
        let mut t = Tally::default();
        t.at_most(1.0 / c, r.gamma_hat, 1e-8);
        t.at_most(r.beta_hat, c, 1e-8);
        Ok::<_, Error>(t)
    })?;
    let mut t = Tally::default();
    per.into_iter().for_each(|x| t.merge(x));
    Ok(t.outcome("thm-8", "A-optimal design ratios within (1/c, c) on 100 instances"))
}

fn local_search(seed: u64) -> Result<SuiteOutcome> {
    let eps = 0.01;
    let mut t = Tally::default();
    for (f, m) in algorithm_pool(seed, 71, 30)? {
        let r = full_ratios(&f)?;
        let (_, opt) = algorithms::brute_force_opt(&f, &m)?;
        let run = algorithms::plain_local_search(&f, &m, eps)?;
        let (g, b) = (r.gamma_hat, r.beta_hat);
        let bound = g * g / ((2.0 - g) * b + g * g + eps);
        t.at_most(bound * opt, run.value, 1e-9);
    }
    Ok(t.outcome("local-search", "plain local search against gamma²/((2-gamma)beta+gamma²+eps) OPT"))
}

/// Oracles with certified lower ratios, for the potential-bound suites.
fn certified_oracles(seed: u64, tag: u64, count: u64) -> Result<Vec<(Oracle, f64)>> {
    let mut out = Vec::new();
    for i in 0..count {
        let s = sub_seed(seed, tag, i);
        let f = if i % 2 == 0 { Oracle::new(generate_coverage(10, 30, s)?) } else { Oracle::new(random_regression(9, s)?) };
        let gamma = full_ratios(&f)?.gamma_hat;
        out.push((f, gamma));
    }
    Ok(out)
}

fn lemma_a1(seed: u64) -> Result<SuiteOutcome> {
    let mut t = Tally::default();
    let mut rng = rng_for(seed, 91);
    for (f, gamma) in certified_oracles(seed, 92, 8)? {
        let n = f.ground_size();
        for _ in 0..10 {
            let a = random_subset(n, &mut rng);
            if a.is_empty() {
                continue;
            }
            let fa = f.value(&a)?;
            let mut levels = vec![0.0; a.len() + 1];
            for mask in 1..(1u64 << a.len()) {
                let b = Subset::from_mask_over(mask, a.as_slice());
                levels[b.len()] += f.value(&b)?;
            }
            for (i, level) in levels.iter().enumerate().skip(1) {
                t.at_most(binomial(a.len() - 1, i - 1) * gamma * fa, *level, 1e-9);
            }
        }
    }
    Ok(t.outcome("lemma-a1", "level sums of f over subsets of A"))
}

fn lemma_a2(seed: u64) -> Result<SuiteOutcome> {
    let mut t = Tally::default();
    let mut rng = rng_for(seed, 93);
    for (f, gamma) in certified_oracles(seed, 94, 8)? {
        let n = f.ground_size();
        for _ in 0..6 {
            let a = random_subset(n, &mut rng);
            let fa = f.value(&a)?;
            for &phi in &PHI_GRID {
                let g = exact_g(&f, phi, &a)?;
                t.at_most(gamma * fa, g, 1e-9);
                t.at_most(g, h(phi) * harmonic(a.len()) * fa, 1e-9);
            }
        }
    }
    Ok(t.outcome("lemma-a2", "potential sandwiched between gamma f(A) and h(phi) H_|A| f(A)"))
}

fn lemma_a3(seed: u64) -> Result<SuiteOutcome> {
    let mut t = Tally::default();
    let mut rng = rng_for(seed, 95);
    let oracles = certified_oracles(seed, 96, 6)?;
    for &eps in &[0.01, 0.1, 0.5] {
        for &phi in &[0.75, 1.0, 4.0] {
            t.at_most(h(phi), (phi * eps).exp() * h(phi * (1.0 - eps)), 1e-12);
            for (f, _) in &oracles {
                let a = random_subset(f.ground_size(), &mut rng);
                let lower = exact_g(f, phi * (1.0 - eps), &a)?;
                t.at_most((-phi * eps).exp() * exact_g(f, phi, &a)?, lower, 1e-10);
            }
        }
    }
    Ok(t.outcome("lemma-a3", "sensitivity of the potential and of h to shrinking phi"))
}

fn lemma_a4(seed: u64) -> Result<SuiteOutcome> {
    let (samples, delta, trials) = (5000u64, 0.05, 1000);
    let f = Oracle::new(generate_coverage(10, 30, sub_seed(seed, 97, 0))?);
    let a = Subset::from([0, 2, 3, 5, 7, 8]);
    let e = 4;
    let phi = 1.0;
    let exact = exact_g_marginal(&f, phi, e, &a)?;
    let scale = f.value(&a.with(e))?;
    let mut rng = rng_for(seed, 98);
    let mut failures = 0;
    for _ in 0..trials {
        let est = potential::estimate_g_marginal(&f, phi, e, &a, samples, &mut rng)?;
        if (est - exact).abs() >= delta * scale {
            failures += 1;
        }
    }
    let rate = failures as f64 / trials as f64;
    let allowed = 2.0 * (-delta * delta * samples as f64 / 2.0).exp() + 0.01;
    let mut t = Tally::default();
    t.at_most(rate, allowed, 0.0);
    Ok(t.outcome("lemma-a4", format!("sampling failure rate {rate} against allowance {allowed:.4}")))
}

fn lemma_b1() -> Result<SuiteOutcome> {
    let mut t = Tally::default();
    for i in 1..=200 {
        let gamma = i as f64 / 200.0;
        for j in 0..=200 {
            let beta = 1.0 + 9.0 * j as f64 / 200.0;
            let phi = phi_of(gamma, beta);
            t.at_most(0.75, phi, 1e-12);
            if phi > 4.0 || gamma < 1.0 / 7.0 {
                let rrg = 1.0 / ((1.0 + 1.0 / gamma) * (1.0 + 1.0 / gamma));
                let dist = potential::distorted_guarantee(gamma, phi);
                t.record(if rrg > dist { 0.0 } else { dist - rrg }, 0.0);
            }
        }
    }
    Ok(t.outcome("lemma-b1", "potential parameter range and greedy dominance outside it"))
}

fn relations(seed: u64) -> Result<SuiteOutcome> {
    let mut t = Tally::default();
    let mut oracles = sample_oracles(seed, 99, 12, 8)?;
    oracles.push(Oracle::new(RegressionInstance::suppressor_example()));
    oracles.push(Oracle::new(WorstCaseInstance::new(5, 0.4)?));
    for f in &oracles {
        let r = full_ratios(f)?;
        t.at_most(r.gamma_e_hat, r.gamma_hat, 1e-12);
        if r.gamma_e_hat > 0.0 {
            t.at_most(r.beta_hat, 1.0 / r.gamma_e_hat, 1e-9);
        }
        t.at_most(r.beta_hat, f.ground_size() as f64, 1e-9);
        if f.kind() == "coverage" {
            t.close(r.gamma_hat, 1.0, 1e-12);
            t.close(r.beta_hat, 1.0, 1e-12);
        }
    }
    let modular = Oracle::new(ModularFunction::new(vec![3.0, 1.0, 2.0, 0.5])?);
    let r = full_ratios(&modular)?;
    t.close(r.gamma_hat, 1.0, 1e-12);
    t.close(r.beta_hat, 1.0, 1e-12);
    Ok(t.outcome("relations", "element-wise ratio bounds both ratios; submodular oracles give 1"))
}
