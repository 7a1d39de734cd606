//! JSON instance files.
//!
//! ```json
//! {"type": "regression", "n": 2, "C": [[1, 0.7], [0.7, 1]], "b": [0, 0.7]}
//! {"type": "aopt", "p": 1, "n": 1, "X": [[1]], "Lambda": [[1]], "sigma2": 1}
//! {"type": "worstcase", "k": 3, "gamma": 0.5}
//! {"type": "modular", "weights": [3, 1, 2]}
//! {"type": "coverage", "sets": [[0, 1], [1]], "weights": [1, 2]}
//! ```
//!
//! `X` is given row-major as `p` rows of `n` entries (one column per
//! candidate observation).

use std::sync::Arc;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::{CoverageFunction, DesignInstance, ModularFunction, RegressionInstance, SetFunction, WorstCaseInstance};
use crate::linalg::SymmetricMatrix;
use crate::{Error, Result};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
enum InstanceFile {
    Regression {
        n: usize,
        #[serde(rename = "C")]
        c: Vec<Vec<f64>>,
        b: Vec<f64>,
    },
    Aopt {
        p: usize,
        n: usize,
        #[serde(rename = "X")]
        x: Vec<Vec<f64>>,
        #[serde(rename = "Lambda")]
        lambda: Vec<Vec<f64>>,
        sigma2: f64,
    },
    Worstcase {
        k: usize,
        gamma: f64,
    },
    Modular {
        weights: Vec<f64>,
    },
    Coverage {
        sets: Vec<Vec<usize>>,
        weights: Vec<f64>,
    },
}

/// A validated objective loaded from (or destined for) an instance file.
#[derive(Debug, Clone)]
pub enum Instance {
    Regression(RegressionInstance),
    Design(DesignInstance),
    WorstCase(WorstCaseInstance),
    Modular(ModularFunction),
    Coverage(CoverageFunction),
}

fn matrix_rows(rows: &[Vec<f64>], name: &str, nrows: usize, ncols: usize) -> Result<DMatrix<f64>> {
    if rows.len() != nrows || rows.iter().any(|r| r.len() != ncols) {
        return Err(Error::InvalidInstance(format!("{name} must be {nrows}x{ncols}")));
    }
    Ok(DMatrix::from_fn(nrows, ncols, |i, j| rows[i][j]))
}

fn symmetric(rows: &[Vec<f64>], name: &str, n: usize) -> Result<SymmetricMatrix> {
    if n == 0 {
        return Err(Error::InvalidInstance(format!("{name} must be at least 1x1")));
    }
    SymmetricMatrix::new(matrix_rows(rows, name, n, n)?)
        .map_err(|e| Error::InvalidInstance(format!("{name} is not a valid symmetric matrix ({e})")))
}

impl Instance {
    pub fn from_json(text: &str) -> Result<Self> {
        let file: InstanceFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        Ok(match file {
            InstanceFile::Regression { n, c, b } => {
                Instance::Regression(RegressionInstance::new(symmetric(&c, "C", n)?, b)?)
            }
            InstanceFile::Aopt { p, n, x, lambda, sigma2 } => {
                Instance::Design(DesignInstance::new(matrix_rows(&x, "X", p, n)?, symmetric(&lambda, "Lambda", p)?, sigma2)?)
            }
            InstanceFile::Worstcase { k, gamma } => Instance::WorstCase(WorstCaseInstance::new(k, gamma)?),
            InstanceFile::Modular { weights } => Instance::Modular(ModularFunction::new(weights)?),
            InstanceFile::Coverage { sets, weights } => Instance::Coverage(CoverageFunction::new(sets, weights)?),
        })
    }

    pub fn to_json(&self) -> String {
        let file = match self {
            Instance::Regression(r) => InstanceFile::Regression {
                n: r.n(),
                c: r.covariance().to_rows(),
                b: r.target_covariance().to_vec(),
            },
            Instance::Design(d) => InstanceFile::Aopt {
                p: d.p(),
                n: d.n(),
                x: (0..d.p()).map(|i| d.data().row(i).iter().copied().collect()).collect(),
                lambda: d.prior().to_rows(),
                sigma2: d.sigma2(),
            },
            Instance::WorstCase(w) => InstanceFile::Worstcase { k: w.k(), gamma: w.gamma() },
            Instance::Modular(m) => InstanceFile::Modular { weights: m.weights().to_vec() },
            Instance::Coverage(c) => InstanceFile::Coverage {
                sets: c.sets().to_vec(),
                weights: c.universe_weights().to_vec(),
            },
        };
        serde_json::to_string(&file).expect("instance serialization cannot fail")
    }

    pub fn function(&self) -> Arc<dyn SetFunction> {
        match self {
            Instance::Regression(r) => Arc::new(r.clone()),
            Instance::Design(d) => Arc::new(d.clone()),
            Instance::WorstCase(w) => Arc::new(w.clone()),
            Instance::Modular(m) => Arc::new(m.clone()),
            Instance::Coverage(c) => Arc::new(c.clone()),
        }
    }

    pub fn ground_size(&self) -> usize {
        self.function().ground_size()
    }
}
