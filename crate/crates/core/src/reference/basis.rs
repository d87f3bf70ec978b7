//! Bases for the total-degree space P^N on the reference triangle.

use nalgebra::DMatrix;

use super::jacobi::{jacobi, jacobi_deriv};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BasisKind {
    /// Proriol-Koornwinder-Dubiner basis, orthonormal on the reference triangle.
    Orthonormal,
    /// Monomials `x^i y^j`; only well conditioned at low degree.
    Monomial,
}

/// Evaluates a basis of P^N and its reference gradients.
#[derive(Debug, Clone)]
pub struct Basis {
    kind: BasisKind,
    degree: usize,
    indices: Vec<(usize, usize)>,
}

/// Values and reference derivatives of every basis function at a point set.
#[derive(Debug, Clone)]
pub struct BasisEval {
    pub values: DMatrix<f64>,
    pub d_dr: DMatrix<f64>,
    pub d_ds: DMatrix<f64>,
}

pub fn dimension(n: usize) -> usize {
    (n + 1) * (n + 2) / 2
}

fn rs_to_ab(r: f64, s: f64) -> (f64, f64) {
    let a = if (1.0 - s).abs() > 1e-14 {
        2.0 * (1.0 + r) / (1.0 - s) - 1.0
    } else {
        -1.0
    };
    (a, s)
}

impl Basis {
    pub fn new(kind: BasisKind, degree: usize) -> Result<Self> {
        if degree < 1 {
            return Err(Error::InvalidDegree(degree));
        }
        let mut indices = Vec::with_capacity(dimension(degree));
        for i in 0..=degree {
            for j in 0..=(degree - i) {
                indices.push((i, j));
            }
        }
        Ok(Self {
            kind,
            degree,
            indices,
        })
    }

    pub fn kind(&self) -> BasisKind {
        self.kind
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    /// Value and (d/dr, d/ds) of basis function `m` at `(r, s)`.
    pub fn eval_one(&self, m: usize, r: f64, s: f64) -> (f64, f64, f64) {
        let (i, j) = self.indices[m];
        match self.kind {
            BasisKind::Monomial => {
                let v = r.powi(i as i32) * s.powi(j as i32);
                let dr = if i > 0 {
                    i as f64 * r.powi(i as i32 - 1) * s.powi(j as i32)
                } else {
                    0.0
                };
                let ds = if j > 0 {
                    j as f64 * r.powi(i as i32) * s.powi(j as i32 - 1)
                } else {
                    0.0
                };
                (v, dr, ds)
            }
            BasisKind::Orthonormal => {
                let (a, b) = rs_to_ab(r, s);
                let alpha = 2.0 * i as f64 + 1.0;
                let fa = jacobi(a, 0.0, 0.0, i);
                let dfa = jacobi_deriv(a, 0.0, 0.0, i);
                let gb = jacobi(b, alpha, 0.0, j);
                let dgb = jacobi_deriv(b, alpha, 0.0, j);
                let half_omb = 0.5 * (1.0 - b);
                let value = 2f64.sqrt() * fa * gb * (1.0 - b).powi(i as i32);

                let mut dr = dfa * gb;
                if i > 0 {
                    dr *= half_omb.powi(i as i32 - 1);
                }
                let mut ds = dfa * (gb * (0.5 * (1.0 + a)));
                if i > 0 {
                    ds *= half_omb.powi(i as i32 - 1);
                }
                let mut tmp = dgb * half_omb.powi(i as i32);
                if i > 0 {
                    tmp -= 0.5 * i as f64 * gb * half_omb.powi(i as i32 - 1);
                }
                ds += fa * tmp;
                let scale = 2f64.powf(i as f64 + 0.5);
                (value, dr * scale, ds * scale)
            }
        }
    }

    pub fn evaluate(&self, points: &[[f64; 2]]) -> BasisEval {
        let np = self.len();
        let mut values = DMatrix::zeros(points.len(), np);
        let mut d_dr = DMatrix::zeros(points.len(), np);
        let mut d_ds = DMatrix::zeros(points.len(), np);
        for (q, p) in points.iter().enumerate() {
            for m in 0..np {
                let (v, dr, ds) = self.eval_one(m, p[0], p[1]);
                values[(q, m)] = v;
                d_dr[(q, m)] = dr;
                d_ds[(q, m)] = ds;
            }
        }
        BasisEval { values, d_dr, d_ds }
    }

    /// 2-norm condition number of the Vandermonde matrix on the
    /// equispaced interpolation nodes of degree N.
    pub fn vandermonde_condition(&self) -> f64 {
        let nodes = equispaced_nodes(self.degree);
        let v = self.evaluate(&nodes).values;
        let sv = v.singular_values();
        let max = sv.iter().cloned().fold(0.0, f64::max);
        let min = sv.iter().cloned().fold(f64::INFINITY, f64::min);
        max / min
    }
}

/// Equispaced nodes of degree `n` on the reference triangle, ordered row by
/// row from the bottom edge.
pub fn equispaced_nodes(n: usize) -> Vec<[f64; 2]> {
    let mut out = Vec::with_capacity(dimension(n));
    let h = 2.0 / n as f64;
    for j in 0..=n {
        for i in 0..=(n - j) {
            out.push([-1.0 + i as f64 * h, -1.0 + j as f64 * h]);
        }
    }
    out
}
