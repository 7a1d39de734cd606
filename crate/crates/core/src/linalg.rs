//! Dense symmetric linear algebra for desk-scale instances.
//!
//! Eigenvalues come from nalgebra's symmetric eigensolver (Householder
//! tridiagonalization followed by implicit QR); positive-definite solves use
//! an explicit Cholesky factorization so that near-singular pivots can be
//! rejected at [`TAU_PD`](crate::TAU_PD).

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::par::{self, Execution};
use crate::subset::combinations;
use crate::{Error, Result, TAU_PD};

/// Largest dimension accepted by [`sparse_min_eigenvalue`].
pub const SPARSE_EIGEN_LIMIT: usize = 20;

/// A real symmetric `n x n` matrix, `n >= 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricMatrix {
    data: DMatrix<f64>,
}

impl SymmetricMatrix {
    /// Builds from a square matrix. Entries that differ from their mirror by
    /// at most `1e-9 * max(1, |m_ij|)` are averaged; larger gaps are rejected.
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        let n = m.nrows();
        if n == 0 || m.ncols() != n {
            return Err(Error::DimensionMismatch(format!(
                "expected a non-empty square matrix, got {}x{}",
                m.nrows(),
                m.ncols()
            )));
        }
        let mut data = m;
        for i in 0..n {
            for j in i + 1..n {
                let (a, b) = (data[(i, j)], data[(j, i)]);
                if !a.is_finite() || !b.is_finite() {
                    return Err(Error::InvalidArgument(format!("non-finite entry at ({i}, {j})")));
                }
                let gap = (a - b).abs();
                if gap > 1e-9 * a.abs().max(b.abs()).max(1.0) {
                    return Err(Error::NotSymmetric { i, j, gap });
                }
                let avg = 0.5 * (a + b);
                data[(i, j)] = avg;
                data[(j, i)] = avg;
            }
            if !data[(i, i)].is_finite() {
                return Err(Error::InvalidArgument(format!("non-finite entry at ({i}, {i})")));
            }
        }
        Ok(SymmetricMatrix { data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::DimensionMismatch("rows of unequal length".into()));
        }
        Self::new(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
    }

    pub fn identity(n: usize) -> Self {
        assert!(n >= 1, "dimension must be positive");
        SymmetricMatrix { data: DMatrix::identity(n, n) }
    }

    pub fn diagonal(d: &[f64]) -> Self {
        assert!(!d.is_empty(), "dimension must be positive");
        SymmetricMatrix { data: DMatrix::from_diagonal(&DVector::from_column_slice(d)) }
    }

    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[(i, j)]
    }

    pub fn as_matrix(&self) -> &DMatrix<f64> {
        &self.data
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.data
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.dim()).map(|i| self.data.row(i).iter().copied().collect()).collect()
    }

    /// Principal submatrix on `idx` (in the given order).
    pub fn principal(&self, idx: &[usize]) -> DMatrix<f64> {
        DMatrix::from_fn(idx.len(), idx.len(), |i, j| self.data[(idx[i], idx[j])])
    }

    /// Principal submatrix as a symmetric matrix; `idx` must be non-empty.
    pub fn principal_sym(&self, idx: &[usize]) -> SymmetricMatrix {
        assert!(!idx.is_empty());
        SymmetricMatrix { data: self.principal(idx) }
    }

    pub fn trace(&self) -> f64 {
        self.data.trace()
    }
}

/// Lower Cholesky factor of a symmetric matrix given as a dense block,
/// rejecting pivots `<= TAU_PD`.
pub fn cholesky(m: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = m.nrows();
    let mut l = DMatrix::<f64>::zeros(n, n);
    for j in 0..n {
        let mut d = m[(j, j)];
        for k in 0..j {
            d -= l[(j, k)] * l[(j, k)];
        }
        if !(d > TAU_PD) {
            return Err(Error::NotPositiveDefinite { pivot: d });
        }
        let d = d.sqrt();
        l[(j, j)] = d;
        for i in j + 1..n {
            let mut s = m[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)];
            }
            l[(i, j)] = s / d;
        }
    }
    Ok(l)
}

fn cholesky_solve_in_place(l: &DMatrix<f64>, x: &mut DVector<f64>) {
    let n = l.nrows();
    for i in 0..n {
        let mut s = x[i];
        for k in 0..i {
            s -= l[(i, k)] * x[k];
        }
        x[i] = s / l[(i, i)];
    }
    for i in (0..n).rev() {
        let mut s = x[i];
        for k in i + 1..n {
            s -= l[(k, i)] * x[k];
        }
        x[i] = s / l[(i, i)];
    }
}

/// Solves `m x = rhs` for a positive-definite block `m`.
pub fn solve_pd(m: &DMatrix<f64>, rhs: &[f64]) -> Result<Vec<f64>> {
    if m.nrows() != rhs.len() {
        return Err(Error::DimensionMismatch(format!(
            "matrix is {0}x{0}, right-hand side has length {1}",
            m.nrows(),
            rhs.len()
        )));
    }
    let l = cholesky(m)?;
    let mut x = DVector::from_column_slice(rhs);
    cholesky_solve_in_place(&l, &mut x);
    Ok(x.iter().copied().collect())
}

/// Inverse of a positive-definite matrix.
pub fn invert_pd(m: &SymmetricMatrix) -> Result<SymmetricMatrix> {
    let inv = invert_pd_dense(m.as_matrix())?;
    Ok(SymmetricMatrix { data: inv })
}

pub(crate) fn invert_pd_dense(m: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = m.nrows();
    let l = cholesky(m)?;
    let mut inv = DMatrix::<f64>::zeros(n, n);
    for j in 0..n {
        let mut e = DVector::<f64>::zeros(n);
        e[j] = 1.0;
        cholesky_solve_in_place(&l, &mut e);
        inv.set_column(j, &e);
    }
    // exact symmetry
    for i in 0..n {
        for j in i + 1..n {
            let avg = 0.5 * (inv[(i, j)] + inv[(j, i)]);
            inv[(i, j)] = avg;
            inv[(j, i)] = avg;
        }
    }
    Ok(inv)
}

/// All eigenvalues in ascending order.
pub fn eigenvalues(m: &SymmetricMatrix) -> Vec<f64> {
    eigenvalues_dense(m.as_matrix())
}

pub(crate) fn eigenvalues_dense(m: &DMatrix<f64>) -> Vec<f64> {
    let mut ev: Vec<f64> = SymmetricEigen::new(m.clone()).eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

pub fn min_eigenvalue(m: &SymmetricMatrix) -> f64 {
    eigenvalues(m)[0]
}

pub fn max_eigenvalue(m: &SymmetricMatrix) -> f64 {
    *eigenvalues(m).last().unwrap()
}

/// Smallest eigenvalue over all principal submatrices of size `min(k, n)`,
/// by exhaustive enumeration.
pub fn sparse_min_eigenvalue(m: &SymmetricMatrix, k: usize) -> Result<f64> {
    sparse_min_eigenvalue_with(Execution::default(), m, k)
}

pub fn sparse_min_eigenvalue_with(exec: Execution, m: &SymmetricMatrix, k: usize) -> Result<f64> {
    if k == 0 {
        return Err(Error::InvalidArgument("sparsity k must be at least 1".into()));
    }
    let n = m.dim();
    if n > SPARSE_EIGEN_LIMIT {
        return Err(Error::GroundSetTooLarge { n, limit: SPARSE_EIGEN_LIMIT });
    }
    let k = k.min(n);
    if k == n {
        return Ok(min_eigenvalue(m));
    }
    let subsets: Vec<Vec<usize>> = combinations(n, k).collect();
    let mins = par::map_indexed(exec, subsets.len(), |i| eigenvalues_dense(&m.principal(&subsets[i]))[0]);
    Ok(mins.into_iter().fold(f64::INFINITY, f64::min))
}

fn invert_general(m: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    m.clone().try_inverse().ok_or(Error::NotPositiveDefinite { pivot: 0.0 })
}

/// `(A + U C V)^{-1}` from `A^{-1}` via the Sherman-Morrison-Woodbury
/// identity `A^{-1} - A^{-1} U (C^{-1} + V A^{-1} U)^{-1} V A^{-1}`.
///
/// `u` is `n x r`, `v` is `r x n`; `r = 0` returns `a_inv` unchanged. The
/// update must keep the result symmetric (e.g. `V = U^T`).
pub fn woodbury_inverse(
    a_inv: &SymmetricMatrix,
    u: &DMatrix<f64>,
    c: &SymmetricMatrix,
    v: &DMatrix<f64>,
) -> Result<SymmetricMatrix> {
    let n = a_inv.dim();
    let r = u.ncols();
    if u.nrows() != n || v.ncols() != n || v.nrows() != r {
        return Err(Error::DimensionMismatch(format!(
            "A is {n}x{n}, U is {}x{}, V is {}x{}",
            u.nrows(),
            u.ncols(),
            v.nrows(),
            v.ncols()
        )));
    }
    if r == 0 {
        return Ok(a_inv.clone());
    }
    if c.dim() != r {
        return Err(Error::DimensionMismatch(format!("C is {0}x{0}, expected {r}x{r}", c.dim())));
    }
    let a = a_inv.as_matrix();
    let c_inv = invert_general(c.as_matrix())?;
    let au = a * u;
    let va = v * a;
    let inner = c_inv + v * &au;
    let inner_inv = match SymmetricMatrix::new(inner.clone()) {
        Ok(sym) => match invert_pd_dense(sym.as_matrix()) {
            Ok(inv) => inv,
            // indefinite but invertible inner matrices are legitimate
            Err(_) => invert_general(&inner)?,
        },
        Err(_) => invert_general(&inner)?,
    };
    SymmetricMatrix::new(a - au * inner_inv * va)
}
