//! Transition matrices, Perron-Frobenius data and the eigenmetric.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{GraphMap, MarkedGraph};

pub const MAX_ITERATIONS: usize = 1_000_000;
pub const RELATIVE_TOL: f64 = 1e-13;
pub const RESIDUAL_TOL: f64 = 1e-10;

/// `entries[f][e]` counts how often the image of edge `e` crosses `f` or `f'`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TransitionMatrix {
    entries: Vec<Vec<u64>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MatrixClass {
    Reducible,
    IrreducibleImprimitive,
    Primitive,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PfData {
    pub lambda: f64,
    pub edge_lengths: Vec<f64>,
    pub residual: f64,
    pub iterations: usize,
}

impl TransitionMatrix {
    pub fn new(entries: Vec<Vec<u64>>) -> Result<Self> {
        let n = entries.len();
        if entries.iter().any(|r| r.len() != n) {
            return Err(Error::Spectral("transition matrix must be square".into()));
        }
        Ok(TransitionMatrix { entries })
    }

    pub fn identity(n: usize) -> Self {
        let entries = (0..n).map(|i| (0..n).map(|j| (i == j) as u64).collect()).collect();
        TransitionMatrix { entries }
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn get(&self, row: usize, col: usize) -> u64 {
        self.entries[row][col]
    }

    pub fn rows(&self) -> &[Vec<u64>] {
        &self.entries
    }

    pub fn mul(&self, other: &TransitionMatrix) -> TransitionMatrix {
        let n = self.dim();
        let mut out = vec![vec![0u64; n]; n];
        for i in 0..n {
            for k in 0..n {
                let a = self.entries[i][k];
                if a == 0 {
                    continue;
                }
                for j in 0..n {
                    out[i][j] += a * other.entries[k][j];
                }
            }
        }
        TransitionMatrix { entries: out }
    }

    pub fn pow(&self, k: u32) -> TransitionMatrix {
        let mut out = TransitionMatrix::identity(self.dim());
        for _ in 0..k {
            out = out.mul(self);
        }
        out
    }

    fn support(&self) -> Vec<Vec<bool>> {
        self.entries.iter().map(|r| r.iter().map(|&x| x > 0).collect()).collect()
    }
}

pub fn transition_matrix(g: &GraphMap) -> TransitionMatrix {
    let n = g.domain().edge_count();
    let mut entries = vec![vec![0u64; n]; n];
    for (e, img) in g.images().iter().enumerate() {
        for f in img.edges() {
            entries[f.pair()][e] += 1;
        }
    }
    TransitionMatrix { entries }
}

fn bool_mul(a: &[Vec<bool>], b: &[Vec<bool>]) -> Vec<Vec<bool>> {
    let n = a.len();
    (0..n)
        .map(|i| (0..n).map(|j| (0..n).any(|k| a[i][k] && b[k][j])).collect())
        .collect()
}

/// Reducible / irreducible-imprimitive / primitive, using strong
/// connectivity of the support digraph and Wielandt's exponent bound.
pub fn matrix_class(m: &TransitionMatrix) -> MatrixClass {
    let n = m.dim();
    if n == 0 {
        return MatrixClass::Reducible;
    }
    let s = m.support();
    // reachability closure (Warshall)
    let mut reach = s.clone();
    for k in 0..n {
        for i in 0..n {
            if reach[i][k] {
                for j in 0..n {
                    if reach[k][j] {
                        reach[i][j] = true;
                    }
                }
            }
        }
    }
    if !reach.iter().all(|r| r.iter().all(|&x| x)) {
        return MatrixClass::Reducible;
    }
    let bound = (n - 1) * (n - 1) + 1;
    let mut p = s.clone();
    for _ in 1..=bound {
        if p.iter().all(|r| r.iter().all(|&x| x)) {
            return MatrixClass::Primitive;
        }
        p = bool_mul(&p, &s);
    }
    MatrixClass::IrreducibleImprimitive
}

/// Perron-Frobenius eigenvalue and positive left eigenvector (`M^T l = λ l`,
/// normalized to sum one) by power iteration from the uniform vector.
/// Imprimitive irreducible matrices are iterated through `I + M`, which is
/// primitive and has the same eigenvector.
pub fn pf_data(m: &TransitionMatrix) -> Result<PfData> {
    let class = matrix_class(m);
    if class == MatrixClass::Reducible {
        return Err(Error::Spectral("transition matrix is reducible".into()));
    }
    let n = m.dim();
    let shift = if class == MatrixClass::Primitive { 0.0 } else { 1.0 };
    let apply = |x: &[f64]| -> Vec<f64> {
        (0..n)
            .map(|e| shift * x[e] + (0..n).map(|f| m.entries[f][e] as f64 * x[f]).sum::<f64>())
            .collect()
    };
    let mut x = vec![1.0 / n as f64; n];
    let mut mu = 0.0;
    let mut iterations = 0;
    let mut converged = false;
    while iterations < MAX_ITERATIONS {
        iterations += 1;
        let y = apply(&x);
        let s: f64 = y.iter().sum();
        if !(s > 0.0) {
            return Err(Error::Spectral("iteration collapsed to zero".into()));
        }
        let y: Vec<f64> = y.into_iter().map(|v| v / s).collect();
        let change = x.iter().zip(&y).map(|(a, b)| (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)).fold(0.0, f64::max);
        x = y;
        mu = s;
        if change <= RELATIVE_TOL {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::Spectral(format!("power iteration did not converge in {MAX_ITERATIONS} steps")));
    }
    let lambda = mu - shift;
    let mx: Vec<f64> = (0..n).map(|e| (0..n).map(|f| m.entries[f][e] as f64 * x[f]).sum()).collect();
    let residual = mx.iter().zip(&x).map(|(a, b)| (a - lambda * b).abs()).fold(0.0, f64::max);
    if x.iter().any(|&v| !(v > 0.0)) {
        return Err(Error::Spectral("eigenvector is not strictly positive".into()));
    }
    Ok(PfData { lambda, edge_lengths: x, residual, iterations })
}

/// The domain graph carrying the eigenmetric, so that each edge image has
/// length `λ` times the edge length.
pub fn eigenmetric(g: &GraphMap) -> Result<MarkedGraph> {
    let pf = pf_data(&transition_matrix(g))?;
    g.domain().clone().with_lengths(pf.edge_lengths)
}
