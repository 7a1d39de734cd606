use nalgebra::DMatrix;

use super::SetFunction;
use crate::linalg::{self, SymmetricMatrix};
use crate::subset::Subset;
use crate::{Error, Result};

/// Bayesian A-optimal design: `F(S) = tr(Lambda) - tr((Lambda^{-1} + X_S X_S^T / sigma2)^{-1})`.
#[derive(Debug, Clone)]
pub struct DesignInstance {
    x: DMatrix<f64>,
    lambda: SymmetricMatrix,
    lambda_inv: DMatrix<f64>,
    sigma2: f64,
}

impl DesignInstance {
    /// `x` is `p x n` with one candidate observation per column.
    pub fn new(x: DMatrix<f64>, lambda: SymmetricMatrix, sigma2: f64) -> Result<Self> {
        if x.nrows() != lambda.dim() {
            return Err(Error::InvalidInstance(format!(
                "X has {} rows but Lambda is {1}x{1}",
                x.nrows(),
                lambda.dim()
            )));
        }
        if !(sigma2 > 0.0) || !sigma2.is_finite() {
            return Err(Error::InvalidInstance(format!("noise variance sigma2 = {sigma2} must be positive")));
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInstance("X has non-finite entries".into()));
        }
        let lambda_inv = linalg::invert_pd(&lambda)
            .map_err(|e| Error::InvalidInstance(format!("prior covariance Lambda is not positive definite ({e})")))?
            .into_matrix();
        Ok(DesignInstance { x, lambda, lambda_inv, sigma2 })
    }

    pub fn p(&self) -> usize {
        self.x.nrows()
    }

    pub fn n(&self) -> usize {
        self.x.ncols()
    }

    pub fn data(&self) -> &DMatrix<f64> {
        &self.x
    }

    pub fn prior(&self) -> &SymmetricMatrix {
        &self.lambda
    }

    pub fn sigma2(&self) -> f64 {
        self.sigma2
    }

    /// Posterior precision `M_S = Lambda^{-1} + X_S X_S^T / sigma2`.
    pub fn precision(&self, set: &Subset) -> DMatrix<f64> {
        let mut m = self.lambda_inv.clone();
        for i in set.iter() {
            let col = self.x.column(i);
            m += (col * col.transpose()) / self.sigma2;
        }
        m
    }

    pub fn aopt_value(&self, set: &Subset) -> Result<f64> {
        if set.is_empty() {
            return Ok(0.0);
        }
        let post = linalg::invert_pd_dense(&self.precision(set))?;
        Ok(self.lambda.trace() - post.trace())
    }
}

impl SetFunction for DesignInstance {
    fn ground_size(&self) -> usize {
        self.n()
    }

    fn evaluate(&self, set: &Subset) -> Result<f64> {
        self.aopt_value(set)
    }

    fn kind(&self) -> &'static str {
        "aopt"
    }
}
