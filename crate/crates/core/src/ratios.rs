//! Brute-force submodularity ratios and their closed-form bounds.
//!
//! For a pair `A ⊂ B` with `D = f(B) - f(A)`:
//!
//! * lower ratio: `sum_{e in B\A} f(e | A) / D`, minimized over pairs;
//! * upper ratio: `sum_{e in B\A} f(e | B - e) / D`, maximized over pairs;
//! * element-wise ratio: `f(e | A) / f(e | B)` for `A ⊆ B`, `e ∉ B`.
//!
//! Pairs with `D <= 1e-12` never constrain the lower ratio. For the upper
//! ratio they are skipped when the numerator is also `<= 1e-12` and force
//! `beta_hat = inf` otherwise.

use serde::{Serialize, Serializer};

use crate::linalg::{self, max_eigenvalue};
use crate::par::{self, Execution};
use crate::set_functions::{DesignInstance, Oracle, RegressionInstance};
use crate::subset::Subset;
use crate::{Error, Result, TAU_PD};

/// Largest ground set for which all `2^n` values are tabulated.
pub const RATIO_ENUMERATION_LIMIT: usize = 14;

const ZERO_TOL: f64 = 1e-12;

fn serialize_extended<S: Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if v.is_infinite() {
        s.serialize_str(if *v > 0.0 { "inf" } else { "-inf" })
    } else {
        s.serialize_f64(*v)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RatioReport {
    pub gamma_hat: f64,
    #[serde(serialize_with = "serialize_extended")]
    pub beta_hat: f64,
    pub gamma_e_hat: f64,
    pub gamma_witness: Option<(Subset, Subset)>,
    pub beta_witness: Option<(Subset, Subset)>,
    pub pair_count: u64,
}

/// `f` on every subset of the ground set, indexed by bitmask.
pub fn value_table(f: &Oracle, exec: Execution) -> Result<Vec<f64>> {
    let n = f.ground_size();
    if n > RATIO_ENUMERATION_LIMIT {
        return Err(Error::GroundSetTooLarge { n, limit: RATIO_ENUMERATION_LIMIT });
    }
    par::try_map_indexed(exec, 1usize << n, |mask| f.value(&Subset::from_mask(mask as u64)))
}

/// Lower and upper ratio of one pair `a ⊂ b`, computed from a value table.
/// `None` means the pair imposes no constraint on that side.
pub fn pair_ratios(table: &[f64], a: u64, b: u64) -> (Option<f64>, Option<f64>) {
    debug_assert_eq!(a & !b, 0);
    let denom = table[b as usize] - table[a as usize];
    let (mut num_lo, mut num_up) = (0.0, 0.0);
    let mut rest = b & !a;
    while rest != 0 {
        let e = rest & rest.wrapping_neg();
        num_lo += table[(a | e) as usize] - table[a as usize];
        num_up += table[b as usize] - table[(b & !e) as usize];
        rest &= rest - 1;
    }
    if denom > ZERO_TOL {
        (Some(num_lo / denom), Some(num_up / denom))
    } else if num_up > ZERO_TOL {
        (None, Some(f64::INFINITY))
    } else {
        (None, None)
    }
}

#[derive(Clone, Copy)]
struct Extremes {
    gamma: Option<(f64, u64, u64)>,
    beta: Option<(f64, u64, u64)>,
    pairs: u64,
}

fn ratio_scan(table: &[f64], n: usize, max_b: usize, exec: Execution) -> Extremes {
    let per_b = par::map_indexed(exec, 1usize << n, |bi| {
        let b = bi as u64;
        let mut ext = Extremes { gamma: None, beta: None, pairs: 0 };
        if b == 0 || b.count_ones() as usize > max_b {
            return ext;
        }
        // proper submasks of b in increasing order
        let mut subs: Vec<u64> = Vec::with_capacity(1 << b.count_ones());
        let mut a = b;
        loop {
            a = (a.wrapping_sub(1)) & b;
            subs.push(a);
            if a == 0 {
                break;
            }
        }
        subs.reverse();
        for a in subs {
            ext.pairs += 1;
            let (lo, up) = pair_ratios(table, a, b);
            if let Some(g) = lo {
                if ext.gamma.is_none_or(|(best, _, _)| g < best) {
                    ext.gamma = Some((g, a, b));
                }
            }
            if let Some(u) = up {
                if ext.beta.is_none_or(|(best, _, _)| u > best) {
                    ext.beta = Some((u, a, b));
                }
            }
        }
        ext
    });
    per_b.into_iter().fold(Extremes { gamma: None, beta: None, pairs: 0 }, |mut acc, ext| {
        acc.pairs += ext.pairs;
        if let Some(g) = ext.gamma {
            if acc.gamma.is_none_or(|best| g.0 < best.0) {
                acc.gamma = Some(g);
            }
        }
        if let Some(u) = ext.beta {
            if acc.beta.is_none_or(|best| u.0 > best.0) {
                acc.beta = Some(u);
            }
        }
        acc
    })
}

fn elementwise_scan(table: &[f64], n: usize, exec: Execution) -> f64 {
    let full = (1u64 << n) - 1;
    let per_b = par::map_indexed(exec, 1usize << n, |bi| {
        let b = bi as u64;
        let mut best = f64::INFINITY;
        let mut outside = full & !b;
        while outside != 0 {
            let e = outside & outside.wrapping_neg();
            outside &= outside - 1;
            let upper = table[(b | e) as usize] - table[b as usize];
            if upper <= ZERO_TOL {
                continue;
            }
            let mut a = b;
            loop {
                let lower = table[(a | e) as usize] - table[a as usize];
                best = best.min(lower / upper);
                if a == 0 {
                    break;
                }
                a = (a - 1) & b;
            }
        }
        best
    });
    per_b.into_iter().fold(f64::INFINITY, f64::min).clamp(0.0, 1.0)
}

/// Empirical lower/upper/element-wise ratios over all pairs with `|B| <= max_b`.
pub fn empirical_ratios(f: &Oracle, max_b: usize) -> Result<RatioReport> {
    empirical_ratios_with(Execution::default(), f, max_b)
}

pub fn empirical_ratios_with(exec: Execution, f: &Oracle, max_b: usize) -> Result<RatioReport> {
    let n = f.ground_size();
    let table = value_table(f, exec)?;
    Ok(ratios_from_table_with(exec, &table, n, max_b))
}

/// Same as [`empirical_ratios`] for a precomputed table of `2^n` values.
pub fn ratios_from_table(table: &[f64], n: usize, max_b: usize) -> RatioReport {
    ratios_from_table_with(Execution::default(), table, n, max_b)
}

pub fn ratios_from_table_with(exec: Execution, table: &[f64], n: usize, max_b: usize) -> RatioReport {
    assert_eq!(table.len(), 1usize << n, "table must hold 2^n values");
    let ext = ratio_scan(table, n, max_b, exec);
    let witness = |w: Option<(f64, u64, u64)>| w.map(|(_, a, b)| (Subset::from_mask(a), Subset::from_mask(b)));
    RatioReport {
        // no constraining pair: every ratio is admissible, report the submodular value
        gamma_hat: ext.gamma.map_or(1.0, |g| g.0.clamp(0.0, 1.0)),
        beta_hat: ext.beta.map_or(1.0, |b| b.0),
        gamma_e_hat: elementwise_scan(table, n, exec),
        gamma_witness: witness(ext.gamma),
        beta_witness: witness(ext.beta),
        pair_count: ext.pairs,
    }
}

/// `min f(e | A) / f(e | B)` over `A ⊆ B`, `e ∉ B` with `f(e | B) > 1e-12`,
/// clamped to `[0, 1]`.
pub fn empirical_elementwise_gamma(f: &Oracle) -> Result<f64> {
    let n = f.ground_size();
    let exec = Execution::default();
    let table = value_table(f, exec)?;
    Ok(elementwise_scan(&table, n, exec))
}

/// `(lambda_min(C, k), 1 / lambda_min(C, k))`: the lower-ratio bound of Das
/// and Kempe and the matching upper-ratio bound for the R² objective.
pub fn spectral_bounds(inst: &RegressionInstance, k: usize) -> Result<(f64, f64)> {
    let lmin = linalg::sparse_min_eigenvalue(inst.covariance(), k)?;
    if lmin <= TAU_PD {
        return Err(Error::NotPositiveDefinite { pivot: lmin });
    }
    Ok((lmin, 1.0 / lmin))
}

/// `c = 1 + max_i ||x_i||^2 lambda_max(Lambda) / sigma2`; the A-optimal
/// objective is `(1/c, c)`-weakly submodular.
pub fn aopt_bound(inst: &DesignInstance) -> f64 {
    let s2 = inst.data().column_iter().map(|c| c.norm_squared()).fold(0.0, f64::max);
    1.0 + s2 / inst.sigma2() * max_eigenvalue(inst.prior())
}
