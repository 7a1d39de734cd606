//! Set-function objectives and the counting oracle used by every algorithm.

mod baseline;
mod design;
mod generate;
mod instance;
mod regression;
mod worst_case;

use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use dashmap::DashMap;

use crate::subset::{Subset, SubsetKey};
use crate::{Error, Result};

pub use baseline::{CoverageFunction, ModularFunction};
pub use design::DesignInstance;
pub use generate::{generate_coverage, generate_design_instance, generate_regression_instance};
pub use instance::Instance;
pub use regression::RegressionInstance;
pub use worst_case::WorstCaseInstance;

/// A monotone, normalized set function over the ground set `0..ground_size()`.
pub trait SetFunction: Send + Sync {
    fn ground_size(&self) -> usize;

    /// `f(set)`. Implementations return `0` for the empty set.
    fn evaluate(&self, set: &Subset) -> Result<f64>;

    /// Short identifier used in reports.
    fn kind(&self) -> &'static str;
}

/// Memoizing, call-counting wrapper around a [`SetFunction`].
///
/// Two counters are kept: `queries` counts every logical value query made by
/// an algorithm (memo hits included, and a batch of identical samples counts
/// once per sample); `evaluations` counts distinct sets actually computed.
/// Both are safe to bump from concurrent callers.
pub struct Oracle {
    func: Arc<dyn SetFunction>,
    memo: Arc<DashMap<SubsetKey, f64>>,
    queries: AtomicU64,
    evaluations: AtomicU64,
}

impl Oracle {
    pub fn new<F: SetFunction + 'static>(func: F) -> Self {
        Self::from_arc(Arc::new(func))
    }

    pub fn from_arc(func: Arc<dyn SetFunction>) -> Self {
        Oracle { func, memo: Arc::new(DashMap::new()), queries: AtomicU64::new(0), evaluations: AtomicU64::new(0) }
    }

    /// Same function, empty memo, zeroed counters.
    pub fn fresh(&self) -> Self {
        Self::from_arc(Arc::clone(&self.func))
    }

    /// Same function and shared memo, with its own zeroed counters.
    pub fn fork(&self) -> Self {
        Oracle {
            func: Arc::clone(&self.func),
            memo: Arc::clone(&self.memo),
            queries: AtomicU64::new(0),
            evaluations: AtomicU64::new(0),
        }
    }

    pub fn function(&self) -> &Arc<dyn SetFunction> {
        &self.func
    }

    pub fn ground_size(&self) -> usize {
        self.func.ground_size()
    }

    pub fn kind(&self) -> &'static str {
        self.func.kind()
    }

    pub fn value(&self, set: &Subset) -> Result<f64> {
        self.value_charged(set, 1)
    }

    /// `f(set)`, charged as `times` queries.
    pub fn value_charged(&self, set: &Subset, times: u64) -> Result<f64> {
        let n = self.ground_size();
        if let Some(e) = set.max_element() {
            if e >= n {
                return Err(Error::ElementOutOfRange { element: e, n });
            }
        }
        self.queries.fetch_add(times, Ordering::Relaxed);
        let key = set.key();
        if let Some(v) = self.memo.get(&key) {
            return Ok(*v);
        }
        let v = self.func.evaluate(set)?;
        if self.memo.insert(key, v).is_none() {
            self.evaluations.fetch_add(1, Ordering::Relaxed);
        }
        Ok(v)
    }

    /// `f(e | set) = f(set + e) - f(set)`; two queries.
    pub fn marginal(&self, e: usize, set: &Subset) -> Result<f64> {
        Ok(self.value(&set.with(e))? - self.value(set)?)
    }

    pub fn queries(&self) -> u64 {
        self.queries.load(Ordering::Relaxed)
    }

    pub fn evaluations(&self) -> u64 {
        self.evaluations.load(Ordering::Relaxed)
    }

    pub fn reset_counts(&self) {
        self.queries.store(0, Ordering::Relaxed);
        self.evaluations.store(0, Ordering::Relaxed);
    }
}

impl std::fmt::Debug for Oracle {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Oracle")
            .field("kind", &self.kind())
            .field("ground_size", &self.ground_size())
            .field("queries", &self.queries())
            .field("evaluations", &self.evaluations())
            .finish()
    }
}
