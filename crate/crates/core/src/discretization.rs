//! Reference operators bound to a mesh: physical quadrature points,
//! face-point connectivity and the modal solution field.

use crate::dense::{self, Row, NVAR};
use crate::error::{Error, Result};
use crate::mesh::MeshGeometry;
use crate::physics::{self, GasParams, StateVec};
use crate::reference::ReferenceOperators;

/// Degree-N operators on a fixed mesh.
#[derive(Debug, Clone)]
pub struct Discretization {
    pub ops: ReferenceOperators,
    pub mesh: MeshGeometry,
    /// Physical volume quadrature points, element-major (`K * nq`).
    pub volume_points: Vec<[f64; 2]>,
    /// Physical face quadrature points, element-major (`K * nfq`).
    pub face_points: Vec<[f64; 2]>,
    /// For every face point, the global index of the matching point on the
    /// neighbouring element (itself on boundary faces).
    pub face_map: Vec<usize>,
}

impl Discretization {
    pub fn new(ops: ReferenceOperators, mesh: MeshGeometry) -> Result<Self> {
        let (nq, nfq, nfp) = (ops.nq, ops.nfq, ops.nfp);
        let nk = mesh.num_elements();
        let mut volume_points = Vec::with_capacity(nk * nq);
        let mut face_points = Vec::with_capacity(nk * nfq);
        for k in 0..nk {
            for p in &ops.volume_rule.points {
                volume_points.push(mesh.map_point(k, p[0], p[1]));
            }
            for p in &ops.face_rule.points {
                face_points.push(mesh.map_point(k, p[0], p[1]));
            }
        }
        let mut face_map = Vec::with_capacity(nk * nfq);
        for k in 0..nk {
            for f in 0..3 {
                let (kn, fn_) = (mesh.etoe[k][f], mesh.etof[k][f]);
                let boundary = mesh.is_boundary_face(k, f);
                for q in 0..nfp {
                    if boundary {
                        face_map.push(k * nfq + f * nfp + q);
                    } else {
                        let qn = if mesh.face_reversed[k][f] {
                            nfp - 1 - q
                        } else {
                            q
                        };
                        face_map.push(kn * nfq + fn_ * nfp + qn);
                    }
                }
            }
        }
        let disc = Self {
            ops,
            mesh,
            volume_points,
            face_points,
            face_map,
        };
        disc.check_face_matching()?;
        Ok(disc)
    }

    /// Largest coordinate mismatch between paired face points.
    pub fn face_matching_error(&self) -> f64 {
        let nfq = self.ops.nfq;
        let nfp = self.ops.nfp;
        let mut worst: f64 = 0.0;
        for (i, &j) in self.face_map.iter().enumerate() {
            let k = i / nfq;
            let f = (i % nfq) / nfp;
            let s = self.mesh.face_shift[k][f];
            let p = self.face_points[i];
            let q = self.face_points[j];
            worst = worst
                .max((p[0] + s[0] - q[0]).abs())
                .max((p[1] + s[1] - q[1]).abs());
        }
        worst
    }

    fn check_face_matching(&self) -> Result<()> {
        let ext = self.mesh.extent();
        let scale = (ext.x1 - ext.x0).max(ext.y1 - ext.y0).max(1.0);
        let err = self.face_matching_error();
        if err > 1e-12 * scale {
            return Err(Error::Connectivity(format!(
                "neighbouring face points disagree by {err:e}"
            )));
        }
        Ok(())
    }

    pub fn num_elements(&self) -> usize {
        self.mesh.num_elements()
    }

    /// Element, local face and face-local index of a global face point.
    pub fn face_point_owner(&self, i: usize) -> (usize, usize, usize) {
        let nfq = self.ops.nfq;
        let nfp = self.ops.nfp;
        (i / nfq, (i % nfq) / nfp, i % nfp)
    }

    /// `wf * Jf` and outward normal at face point `i` (global index).
    pub fn face_measure(&self, i: usize) -> (f64, [f64; 2]) {
        let (k, f, _) = self.face_point_owner(i);
        let g = &self.mesh.geometry[k];
        (self.ops.wf[i % self.ops.nfq] * g.jf[f], g.normals[f])
    }

    /// L2 projection of a pointwise function onto the modal space.
    pub fn project(&self, f: impl Fn([f64; 2]) -> StateVec) -> SolutionField {
        let (nq, np) = (self.ops.nq, self.ops.np);
        let nk = self.num_elements();
        let mut coeffs = vec![[0.0; NVAR]; nk * np];
        let mut samples = vec![[0.0; NVAR]; nq];
        let mut shifted = vec![[0.0; NVAR]; nq];
        for k in 0..nk {
            for (q, s) in samples.iter_mut().enumerate() {
                *s = f(self.volume_points[k * nq + q]);
            }
            let out = &mut coeffs[k * np..(k + 1) * np];
            dense::project_shifted(
                &self.ops.pq,
                &self.ops.ones_coeffs,
                &samples,
                out,
                &mut shifted,
            );
        }
        SolutionField { np, coeffs }
    }

    /// Values of `field` at the volume quadrature points of element `k`.
    pub fn volume_values(&self, field: &SolutionField, k: usize) -> Vec<Row> {
        let mut out = vec![[0.0; NVAR]; self.ops.nq];
        dense::apply(&self.ops.vq, field.element(k), &mut out);
        out
    }

    /// Values of `field` at the face quadrature points of element `k`.
    pub fn face_values(&self, field: &SolutionField, k: usize) -> Vec<Row> {
        let mut out = vec![[0.0; NVAR]; self.ops.nfq];
        dense::apply(&self.ops.vf, field.element(k), &mut out);
        out
    }

    /// Errors with the offending element if any volume point is inadmissible.
    pub fn check_admissible(&self, field: &SolutionField, time: f64) -> Result<()> {
        for k in 0..self.num_elements() {
            for u in self.volume_values(field, k) {
                if !physics::is_admissible(&u) {
                    return Err(Error::Positivity {
                        element: k,
                        time,
                        detail: format!(
                            "rho = {:e}, rho*e = {:e}",
                            u[0],
                            physics::internal_energy_density(&u)
                        ),
                    });
                }
            }
        }
        Ok(())
    }

    /// Integral of a pointwise function of the state over the domain.
    pub fn integrate(&self, field: &SolutionField, f: impl Fn(&StateVec) -> f64) -> f64 {
        let nq = self.ops.nq;
        let mut total = Vec::with_capacity(self.num_elements() * nq);
        for k in 0..self.num_elements() {
            let j = self.mesh.geometry[k].j;
            for (q, u) in self.volume_values(field, k).iter().enumerate() {
                total.push(j * self.ops.w[q] * f(u));
            }
        }
        dense::compensated_sum(total)
    }

    /// Domain totals of the four conserved quantities.
    pub fn conserved_totals(&self, field: &SolutionField) -> Row {
        [0, 1, 2, 3].map(|c| self.integrate(field, |u| u[c]))
    }

    /// Total entropy `sum_k int S(u)`.
    pub fn total_entropy(&self, field: &SolutionField, gas: &GasParams) -> f64 {
        self.integrate(field, |u| {
            let p = physics::pressure(u, gas);
            -u[0] * (p / u[0].powf(gas.gamma)).ln()
        })
    }
}

/// Modal coefficients of the conservative variables, element-major
/// (`np` rows of 4 per element).
#[derive(Debug, Clone, PartialEq)]
pub struct SolutionField {
    pub np: usize,
    pub coeffs: Vec<Row>,
}

impl SolutionField {
    pub fn zeros(num_elements: usize, np: usize) -> Self {
        Self {
            np,
            coeffs: vec![[0.0; NVAR]; num_elements * np],
        }
    }

    pub fn from_flat(np: usize, data: &[f64]) -> Self {
        let (rows, rest) = data.as_chunks::<NVAR>();
        debug_assert!(rest.is_empty());
        Self {
            np,
            coeffs: rows.to_vec(),
        }
    }

    pub fn num_elements(&self) -> usize {
        self.coeffs.len() / self.np
    }

    pub fn element(&self, k: usize) -> &[Row] {
        &self.coeffs[k * self.np..(k + 1) * self.np]
    }

    pub fn element_mut(&mut self, k: usize) -> &mut [Row] {
        &mut self.coeffs[k * self.np..(k + 1) * self.np]
    }

    pub fn as_flat(&self) -> &[f64] {
        self.coeffs.as_flattened()
    }

    pub fn is_finite(&self) -> bool {
        self.as_flat().iter().all(|x| x.is_finite())
    }
}
