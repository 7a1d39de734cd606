use super::SetFunction;
use crate::subset::Subset;
use crate::{Error, Result};

/// Function of `|S|` only on a ground set of size `k`, with values
/// `x_0 = 0`, `x_{i+1} - x_i = gamma (1 - x_i) / (k - i)` for `i <= k - 2`,
/// and `x_k = 1`. Its lower ratio is exactly `gamma` while its upper ratio
/// grows like `k^{1 - gamma}`.
#[derive(Debug, Clone, PartialEq)]
pub struct WorstCaseInstance {
    k: usize,
    gamma: f64,
    x: Vec<f64>,
}

impl WorstCaseInstance {
    pub fn new(k: usize, gamma: f64) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidInstance("worst-case ground set size k must be at least 1".into()));
        }
        if !(gamma > 0.0 && gamma <= 1.0) {
            return Err(Error::InvalidInstance(format!("gamma = {gamma} must lie in (0, 1]")));
        }
        let mut x = vec![0.0; k + 1];
        for i in 0..k.saturating_sub(1) {
            x[i + 1] = x[i] + gamma * (1.0 - x[i]) / (k - i) as f64;
        }
        x[k] = 1.0;
        Ok(WorstCaseInstance { k, gamma, x })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// `x_0, ..., x_k`.
    pub fn levels(&self) -> &[f64] {
        &self.x
    }

    pub fn worst_case_value(&self, set: &Subset) -> f64 {
        self.x[set.len()]
    }

    /// `prod_{l=1}^{k-1} (l + 1 - gamma) / l`, the upper ratio at `(empty, X)`.
    pub fn beta_lower_bound(&self) -> f64 {
        (1..self.k).map(|l| (l as f64 + 1.0 - self.gamma) / l as f64).product()
    }
}

impl SetFunction for WorstCaseInstance {
    fn ground_size(&self) -> usize {
        self.k
    }

    fn evaluate(&self, set: &Subset) -> Result<f64> {
        Ok(self.worst_case_value(set))
    }

    fn kind(&self) -> &'static str {
        "worstcase"
    }
}
