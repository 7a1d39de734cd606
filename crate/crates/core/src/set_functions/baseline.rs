use serde::{Deserialize, Serialize};

use super::SetFunction;
use crate::subset::Subset;
use crate::{Error, Result};

/// `f(S) = sum of w_e over S`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModularFunction {
    weights: Vec<f64>,
}

impl ModularFunction {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if let Some(w) = weights.iter().find(|w| !(**w >= 0.0) || !w.is_finite()) {
            return Err(Error::InvalidInstance(format!("modular weights must be nonnegative, found {w}")));
        }
        Ok(ModularFunction { weights })
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
}

impl SetFunction for ModularFunction {
    fn ground_size(&self) -> usize {
        self.weights.len()
    }

    fn evaluate(&self, set: &Subset) -> Result<f64> {
        Ok(set.iter().map(|e| self.weights[e]).sum())
    }

    fn kind(&self) -> &'static str {
        "modular"
    }
}

/// Weighted coverage: `f(S)` is the total weight of universe items covered by
/// the union of `sets[e]` for `e` in `S`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverageFunction {
    sets: Vec<Vec<usize>>,
    weights: Vec<f64>,
}

impl CoverageFunction {
    pub fn new(sets: Vec<Vec<usize>>, weights: Vec<f64>) -> Result<Self> {
        if let Some(w) = weights.iter().find(|w| !(**w >= 0.0) || !w.is_finite()) {
            return Err(Error::InvalidInstance(format!("coverage weights must be nonnegative, found {w}")));
        }
        for (e, s) in sets.iter().enumerate() {
            if let Some(&u) = s.iter().find(|&&u| u >= weights.len()) {
                return Err(Error::InvalidInstance(format!(
                    "set {e} covers item {u} outside a universe of size {}",
                    weights.len()
                )));
            }
        }
        Ok(CoverageFunction { sets, weights })
    }

    pub fn sets(&self) -> &[Vec<usize>] {
        &self.sets
    }

    pub fn universe_weights(&self) -> &[f64] {
        &self.weights
    }
}

impl SetFunction for CoverageFunction {
    fn ground_size(&self) -> usize {
        self.sets.len()
    }

    fn evaluate(&self, set: &Subset) -> Result<f64> {
        let mut covered = vec![false; self.weights.len()];
        for e in set.iter() {
            for &u in &self.sets[e] {
                covered[u] = true;
            }
        }
        Ok(covered.iter().zip(&self.weights).filter(|(c, _)| **c).map(|(_, w)| w).sum())
    }

    fn kind(&self) -> &'static str {
        "coverage"
    }
}
