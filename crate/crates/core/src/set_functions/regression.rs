use nalgebra::DMatrix;

use super::SetFunction;
use crate::linalg::{self, SymmetricMatrix};
use crate::subset::Subset;
use crate::{Error, Result, TAU_PD};

const DIAGONAL_TOL: f64 = 1e-9;
const AUGMENTED_PSD_TOL: f64 = -1e-9;

/// Squared multiple correlation objective over `n` unit-variance predictors.
///
/// `c` is the predictor covariance and `b[i] = cov(X_i, Z)` for a
/// unit-variance target `Z`.
#[derive(Debug, Clone, PartialEq)]
pub struct RegressionInstance {
    c: SymmetricMatrix,
    b: Vec<f64>,
}

impl RegressionInstance {
    /// Validates unit diagonal and that `[[1, b^T], [b, C]]` is PSD (both at
    /// `1e-9`).
    pub fn new(c: SymmetricMatrix, b: Vec<f64>) -> Result<Self> {
        let n = c.dim();
        if b.len() != n {
            return Err(Error::InvalidInstance(format!(
                "target covariance vector has length {} but C is {n}x{n}",
                b.len()
            )));
        }
        if let Some(i) = (0..n).find(|&i| (c.get(i, i) - 1.0).abs() > DIAGONAL_TOL) {
            return Err(Error::InvalidInstance(format!(
                "unit diagonal violated: C[{i}][{i}] = {}",
                c.get(i, i)
            )));
        }
        if b.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInstance("target covariance vector has non-finite entries".into()));
        }
        let inst = RegressionInstance { c, b };
        let lmin = linalg::eigenvalues_dense(&inst.augmented())[0];
        if lmin < AUGMENTED_PSD_TOL {
            return Err(Error::InvalidInstance(format!(
                "augmented covariance [[1, b^T], [b, C]] is not PSD: smallest eigenvalue {lmin:.3e}"
            )));
        }
        Ok(inst)
    }

    pub(crate) fn from_parts_unchecked(c: SymmetricMatrix, b: Vec<f64>) -> Self {
        RegressionInstance { c, b }
    }

    /// Two predictors where `X_1` is uncorrelated with the target and
    /// `X_2 = (Z + X_1) / sqrt(2)`: `X_1` is a suppressor.
    pub fn suppressor_example() -> Self {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let c = SymmetricMatrix::from_rows(&[vec![1.0, r], vec![r, 1.0]]).unwrap();
        RegressionInstance::new(c, vec![0.0, r]).unwrap()
    }

    pub fn n(&self) -> usize {
        self.c.dim()
    }

    pub fn covariance(&self) -> &SymmetricMatrix {
        &self.c
    }

    pub fn target_covariance(&self) -> &[f64] {
        &self.b
    }

    /// Joint covariance of `(Z, X_1, ..., X_n)`.
    pub fn augmented(&self) -> DMatrix<f64> {
        let n = self.n();
        DMatrix::from_fn(n + 1, n + 1, |i, j| match (i, j) {
            (0, 0) => 1.0,
            (0, j) => self.b[j - 1],
            (i, 0) => self.b[i - 1],
            (i, j) => self.c.get(i - 1, j - 1),
        })
    }

    /// `b_S^T C_S^{-1} b_S`.
    pub fn r2_value(&self, set: &Subset) -> Result<f64> {
        if set.is_empty() {
            return Ok(0.0);
        }
        let idx = set.as_slice();
        let bs: Vec<f64> = idx.iter().map(|&i| self.b[i]).collect();
        let alpha = linalg::solve_pd(&self.c.principal(idx), &bs)?;
        Ok(alpha.iter().zip(&bs).map(|(a, b)| a * b).sum())
    }

    /// Conditions every predictor outside `a` (and the target) on `a` and
    /// renormalizes the residuals to unit variance. The returned instance is
    /// indexed by the complement of `a` in ascending order.
    pub fn residual_instance(&self, a: &Subset) -> Result<RegressionInstance> {
        if a.is_empty() {
            return Ok(self.clone());
        }
        let n = self.n();
        let idx = a.as_slice();
        let rest: Vec<usize> = (0..n).filter(|i| !a.contains(*i)).collect();
        let ca_inv = linalg::invert_pd(&self.c.principal_sym(idx))?;
        let ca_inv = ca_inv.as_matrix();
        let ba: Vec<f64> = idx.iter().map(|&i| self.b[i]).collect();

        // projections C_{iA} C_A^{-1} for every remaining variable
        let proj: Vec<Vec<f64>> = rest
            .iter()
            .map(|&i| {
                (0..idx.len())
                    .map(|q| (0..idx.len()).map(|p| self.c.get(i, idx[p]) * ca_inv[(p, q)]).sum())
                    .collect()
            })
            .collect();
        let dot = |u: &[f64], v: &[f64]| -> f64 { u.iter().zip(v).map(|(x, y)| x * y).sum() };

        let r2_a: f64 = {
            let w: Vec<f64> = (0..idx.len()).map(|q| (0..idx.len()).map(|p| ba[p] * ca_inv[(p, q)]).sum()).collect();
            dot(&w, &ba)
        };
        let target_var = 1.0 - r2_a;
        if target_var <= TAU_PD {
            return Err(Error::DegenerateTarget { variance: target_var });
        }

        let col = |j: usize| -> Vec<f64> { idx.iter().map(|&p| self.c.get(p, j)).collect() };
        let mut sigma = Vec::with_capacity(rest.len());
        for (r, &i) in rest.iter().enumerate() {
            let var = self.c.get(i, i) - dot(&proj[r], &col(i));
            if var <= TAU_PD {
                return Err(Error::DegenerateResidual { index: i, variance: var });
            }
            sigma.push(var.sqrt());
        }

        let m = rest.len();
        if m == 0 {
            return Err(Error::InvalidArgument("conditioning set covers every predictor".into()));
        }
        let chat = DMatrix::from_fn(m, m, |r, s| {
            if r == s {
                1.0
            } else {
                let (i, j) = (rest[r], rest[s]);
                (self.c.get(i, j) - dot(&proj[r], &col(j))) / (sigma[r] * sigma[s])
            }
        });
        let sz = target_var.sqrt();
        let bhat: Vec<f64> = rest
            .iter()
            .enumerate()
            .map(|(r, &i)| (self.b[i] - dot(&proj[r], &ba)) / (sz * sigma[r]))
            .collect();
        Ok(RegressionInstance::from_parts_unchecked(SymmetricMatrix::new(chat)?, bhat))
    }
}

impl SetFunction for RegressionInstance {
    fn ground_size(&self) -> usize {
        self.n()
    }

    fn evaluate(&self, set: &Subset) -> Result<f64> {
        self.r2_value(set)
    }

    fn kind(&self) -> &'static str {
        "regression"
    }
}
