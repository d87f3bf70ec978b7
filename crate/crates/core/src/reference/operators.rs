//! Degree-N operator matrices on the reference triangle, including the
//! hybridized SBP operators used for flux differencing.

use std::fs;
use std::io::Write;
use std::path::Path;

use nalgebra::{DMatrix, DVector};

use super::basis::{Basis, BasisKind};
use super::quadrature::{
    build_face_quadrature, build_volume_quadrature, face_nodes_1d, QuadratureRule,
};
use crate::dense::compensated_sum;
use crate::error::{Error, Result};

/// Reference outward normals scaled by the reference face Jacobian.
pub const SCALED_NORMALS: [[f64; 2]; 3] = [[0.0, -1.0], [1.0, 1.0], [-1.0, 0.0]];

#[derive(Debug, Clone)]
pub struct ReferenceOperators {
    pub degree: usize,
    pub np: usize,
    pub nq: usize,
    /// Face points per face.
    pub nfp: usize,
    /// Stacked face points over all three faces.
    pub nfq: usize,
    pub basis: Basis,
    pub volume_rule: QuadratureRule,
    pub face_rule: QuadratureRule,
    /// 1D Gauss nodes used along every face, ascending.
    pub face_nodes: Vec<f64>,

    pub vq: DMatrix<f64>,
    pub vf: DMatrix<f64>,
    pub vh: DMatrix<f64>,
    pub mass: DMatrix<f64>,
    pub mass_inv: DMatrix<f64>,
    pub w: Vec<f64>,
    pub wf: Vec<f64>,
    /// Integrated differentiation matrices `(Qhat_i)_{jk} = int dphi_k/dx_i phi_j`.
    pub qhat: [DMatrix<f64>; 2],
    pub pq: DMatrix<f64>,
    /// Quadrature-based differentiation `Q_i = Pq^T Qhat_i Pq`.
    pub q: [DMatrix<f64>; 2],
    pub extrap: DMatrix<f64>,
    /// Diagonals of the reference boundary matrices `B_i`.
    pub b: [Vec<f64>; 2],
    pub qh: [DMatrix<f64>; 2],
    pub nhat: Vec<[f64; 2]>,
    pub jfhat: Vec<f64>,
    /// Modal coefficients of the constant function 1.
    pub ones_coeffs: Vec<f64>,
}

fn weighted_gram(a: &DMatrix<f64>, w: &[f64], b: &DMatrix<f64>) -> DMatrix<f64> {
    // (a^T W b) with compensated accumulation per entry
    DMatrix::from_fn(a.ncols(), b.ncols(), |j, k| {
        compensated_sum((0..a.nrows()).map(|q| w[q] * a[(q, j)] * b[(q, k)]))
    })
}

impl ReferenceOperators {
    pub fn new(degree: usize) -> Result<Self> {
        Self::with_basis(BasisKind::Orthonormal, degree)
    }

    pub fn with_basis(kind: BasisKind, degree: usize) -> Result<Self> {
        let basis = Basis::new(kind, degree)?;
        let volume_rule = build_volume_quadrature(degree)?;
        let face_rule = build_face_quadrature(degree)?;
        let (face_nodes, _) = face_nodes_1d(degree);
        let np = basis.len();
        let nq = volume_rule.len();
        let nfq = face_rule.len();
        let nfp = nfq / 3;

        let ev = basis.evaluate(&volume_rule.points);
        let vq = ev.values;
        let vf = basis.evaluate(&face_rule.points).values;
        let w = volume_rule.weights.clone();
        let wf = face_rule.weights.clone();

        let mass = weighted_gram(&vq, &w, &vq);
        let mass = 0.5 * (&mass + mass.transpose());
        let chol = mass
            .clone()
            .cholesky()
            .ok_or_else(|| Error::Construction("mass matrix is not positive definite".into()))?;
        let mass_inv = chol.inverse();
        let qhat = [
            weighted_gram(&vq, &w, &ev.d_dr),
            weighted_gram(&vq, &w, &ev.d_ds),
        ];

        let wdiag = DMatrix::from_diagonal(&DVector::from_vec(w.clone()));
        let pq = chol.solve(&(vq.transpose() * &wdiag));
        let q = [
            pq.transpose() * &qhat[0] * &pq,
            pq.transpose() * &qhat[1] * &pq,
        ];
        let extrap = &vf * &pq;

        let mut nhat = Vec::with_capacity(nfq);
        let mut jfhat = Vec::with_capacity(nfq);
        let mut b = [Vec::with_capacity(nfq), Vec::with_capacity(nfq)];
        for f in 0..3 {
            let sn = SCALED_NORMALS[f];
            let jf = (sn[0] * sn[0] + sn[1] * sn[1]).sqrt();
            for i in 0..nfp {
                let idx = f * nfp + i;
                nhat.push([sn[0] / jf, sn[1] / jf]);
                jfhat.push(jf);
                b[0].push(wf[idx] * sn[0]);
                b[1].push(wf[idx] * sn[1]);
            }
        }

        let nh = nq + nfq;
        let build_qh = |qi: &DMatrix<f64>, bi: &[f64]| {
            let mut qh = DMatrix::zeros(nh, nh);
            for a in 0..nq {
                for c in 0..nq {
                    if a != c {
                        qh[(a, c)] = 0.5 * (qi[(a, c)] - qi[(c, a)]);
                    }
                }
            }
            for f in 0..nfq {
                for a in 0..nq {
                    let val = 0.5 * extrap[(f, a)] * bi[f];
                    qh[(a, nq + f)] = val;
                    qh[(nq + f, a)] = -val;
                }
                qh[(nq + f, nq + f)] = 0.5 * bi[f];
            }
            qh
        };
        let qh = [build_qh(&q[0], &b[0]), build_qh(&q[1], &b[1])];

        let mut vh = DMatrix::zeros(nh, np);
        vh.rows_mut(0, nq).copy_from(&vq);
        vh.rows_mut(nq, nfq).copy_from(&vf);

        let ones = DVector::from_element(nq, 1.0);
        let mut ones_coeffs: Vec<f64> = (&pq * ones).iter().copied().collect();
        // drop roundoff so constants have an exact modal representation
        let big = ones_coeffs.iter().fold(0.0f64, |a, x| a.max(x.abs()));
        ones_coeffs
            .iter_mut()
            .filter(|c| c.abs() < 64.0 * f64::EPSILON * big)
            .for_each(|c| *c = 0.0);

        Ok(Self {
            degree,
            np,
            nq,
            nfp,
            nfq,
            basis,
            volume_rule,
            face_rule,
            face_nodes,
            vq,
            vf,
            vh,
            mass,
            mass_inv,
            w,
            wf,
            qhat,
            pq,
            q,
            extrap,
            b,
            qh,
            nhat,
            jfhat,
            ones_coeffs,
        })
    }

    /// Number of hybridized (volume + face) points.
    pub fn nh(&self) -> usize {
        self.nq + self.nfq
    }

    /// Writes every operator matrix as a row-major CSV file with 17
    /// significant digits.
    pub fn dump_csv(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir)?;
        let diag = |v: &[f64]| DMatrix::from_diagonal(&DVector::from_column_slice(v));
        let mats: Vec<(&str, DMatrix<f64>)> = vec![
            ("Vq", self.vq.clone()),
            ("Vf", self.vf.clone()),
            ("Vh", self.vh.clone()),
            ("M", self.mass.clone()),
            ("W", diag(&self.w)),
            ("Wf", diag(&self.wf)),
            ("Qhat1", self.qhat[0].clone()),
            ("Qhat2", self.qhat[1].clone()),
            ("Pq", self.pq.clone()),
            ("E", self.extrap.clone()),
            ("B1", diag(&self.b[0])),
            ("B2", diag(&self.b[1])),
            ("Qh1", self.qh[0].clone()),
            ("Qh2", self.qh[1].clone()),
        ];
        for (name, m) in mats {
            let mut f = fs::File::create(dir.join(format!("{name}.csv")))?;
            for i in 0..m.nrows() {
                let row: Vec<String> = (0..m.ncols())
                    .map(|j| format!("{:.16e}", m[(i, j)]))
                    .collect();
                writeln!(f, "{}", row.join(","))?;
            }
        }
        Ok(())
    }
}
