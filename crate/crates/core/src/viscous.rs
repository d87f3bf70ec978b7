//! LDG viscous terms in entropy variables.
//!
//! Per element, with `G` the scaled geometric terms and `[[v]] = v+ - v`:
//!
//! ```text
//! J M Theta_i = sum_j G_ij Qhat_j vhat + 1/2 Vf^T (wJf n_i [[v]])
//! sigma_i     = Pq (sum_j K_ij(Vq vhat) Vq Theta_j)
//! J M g       = -sum_i sum_j G_ij Qhat_j^T sigma_i + Vf^T (wJf (sum_i {sigma_i} n_i + p))
//! ```
//!
//! where `p` is the penalty flux.

use crate::dense::{self, Row, NVAR};
use crate::error::{Error, Result};
use crate::physics::{self, GasParams};
use crate::reference::ReferenceOperators;

/// Face-point measure and normal for one element, `nfq` entries.
#[derive(Debug, Clone, Copy)]
pub struct FacePoint {
    pub wjf: f64,
    pub n: [f64; 2],
}

pub fn face_points(
    ops: &ReferenceOperators,
    jf: &[f64; 3],
    normals: &[[f64; 2]; 3],
) -> Vec<FacePoint> {
    (0..ops.nfq)
        .map(|i| {
            let f = i / ops.nfp;
            FacePoint {
                wjf: ops.wf[i] * jf[f],
                n: normals[f],
            }
        })
        .collect()
}

/// Scratch rows sized for one element.
#[derive(Debug, Clone)]
pub struct Scratch {
    pub np: Vec<Row>,
    pub nq: [Vec<Row>; 4],
    pub nfq: Vec<Row>,
}

impl Scratch {
    pub fn new(ops: &ReferenceOperators) -> Self {
        let z = |n| vec![[0.0; NVAR]; n];
        Self {
            np: z(ops.np),
            nq: [z(ops.nq), z(ops.nq), z(ops.nq), z(ops.nq)],
            nfq: z(ops.nfq),
        }
    }
}

/// Solves `J M x = rhs` in place.
fn mass_solve(ops: &ReferenceOperators, j: f64, rhs: &[Row], out: &mut [Row]) {
    dense::apply(&ops.mass_inv, rhs, out);
    let s = 1.0 / j;
    for r in out.iter_mut() {
        for c in r.iter_mut() {
            *c *= s;
        }
    }
}

/// Entropy-variable gradients `Theta_1, Theta_2` of one element.
#[allow(clippy::too_many_arguments)]
pub fn compute_theta(
    ops: &ReferenceOperators,
    g: &[[f64; 2]; 2],
    j: f64,
    vhat: &[Row],
    v_face: &[Row],
    v_plus: &[Row],
    faces: &[FacePoint],
    scratch: &mut Scratch,
    theta: [&mut [Row]; 2],
) {
    let [t1, t2] = theta;
    for (i, out) in [t1, t2].into_iter().enumerate() {
        let rhs = &mut scratch.np;
        rhs.iter_mut().for_each(|r| *r = [0.0; NVAR]);
        dense::apply_add(&ops.qhat[0], g[i][0], vhat, rhs);
        dense::apply_add(&ops.qhat[1], g[i][1], vhat, rhs);
        for (q, fp) in faces.iter().enumerate() {
            let s = 0.5 * fp.wjf * fp.n[i];
            for c in 0..NVAR {
                scratch.nfq[q][c] = s * (v_plus[q][c] - v_face[q][c]);
            }
        }
        dense::apply_t_add(&ops.vf, 1.0, &scratch.nfq, rhs);
        mass_solve(ops, j, rhs, out);
    }
}

/// Viscous fluxes `sigma_i` (coefficients and face traces) for one element;
/// returns `sum_i (sum_j K_ij Theta_j, Theta_i)` on the element.
#[allow(clippy::too_many_arguments)]
pub fn compute_sigma(
    ops: &ReferenceOperators,
    gas: &GasParams,
    j: f64,
    v_volume: &[Row],
    theta: [&[Row]; 2],
    scratch: &mut Scratch,
    sigma: [&mut [Row]; 2],
    sigma_face: [&mut [Row]; 2],
    element: usize,
    time: f64,
) -> Result<f64> {
    let [tq1, tq2, sq1, sq2] = &mut scratch.nq;
    dense::apply(&ops.vq, theta[0], tq1);
    dense::apply(&ops.vq, theta[1], tq2);
    let mut dissipation = Vec::with_capacity(ops.nq);
    for q in 0..ops.nq {
        let v = &v_volume[q];
        if !(v[3] < 0.0) {
            return Err(Error::Positivity {
                element,
                time,
                detail: format!("projected v4 = {:e} at a volume point", v[3]),
            });
        }
        let k = physics::viscous_k_unchecked(v, gas);
        let s = k.apply(&[tq1[q], tq2[q]]);
        dissipation.push(j * ops.w[q] * (dense::dot(&s[0], &tq1[q]) + dense::dot(&s[1], &tq2[q])));
        sq1[q] = s[0];
        sq2[q] = s[1];
    }
    let [s1c, s2c] = sigma;
    dense::apply(&ops.pq, sq1, s1c);
    dense::apply(&ops.pq, sq2, s2c);
    let [f1, f2] = sigma_face;
    dense::apply(&ops.vf, s1c, f1);
    dense::apply(&ops.vf, s2c, f2);
    Ok(dense::compensated_sum(dissipation))
}

/// `J M g` for one element given the assembled normal face flux
/// `wJf (sum_i {sigma_i} n_i + p)` at its face points.
pub fn viscous_divergence(
    ops: &ReferenceOperators,
    g: &[[f64; 2]; 2],
    sigma: [&[Row]; 2],
    face_flux: &[Row],
    out: &mut [Row],
) {
    out.iter_mut().for_each(|r| *r = [0.0; NVAR]);
    for (i, s) in sigma.iter().enumerate() {
        dense::apply_t_add(&ops.qhat[0], -g[i][0], s, out);
        dense::apply_t_add(&ops.qhat[1], -g[i][1], s, out);
    }
    dense::apply_t_add(&ops.vf, 1.0, face_flux, out);
}

/// Interior penalty flux `tau diag(0, 1, 1, 1) [[v]]`.
#[inline]
pub fn interior_penalty(v: &Row, vp: &Row, tau: f64) -> Row {
    [
        0.0,
        tau * (vp[1] - v[1]),
        tau * (vp[2] - v[2]),
        tau * (vp[3] - v[3]),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn theta_of_linear_field_is_its_gradient() {
        // v linear in x on an affine element with exact exterior traces
        let ops = ReferenceOperators::new(2).unwrap();
        let verts = [[0.0, 0.0], [1.5, 0.2], [0.3, 1.1]];
        let mesh = crate::mesh::MeshGeometry::from_parts(verts.to_vec(), vec![[0, 1, 2]]).unwrap();
        let geo = mesh.geometry[0];
        let lin = |p: [f64; 2]| {
            [
                0.5 + p[0],
                0.2 * p[1],
                -0.3 * p[0] + p[1],
                -1.0 - 0.1 * p[0],
            ]
        };
        let samples: Vec<Row> = ops
            .volume_rule
            .points
            .iter()
            .map(|p| lin(mesh.map_point(0, p[0], p[1])))
            .collect();
        let mut vhat = vec![[0.0; NVAR]; ops.np];
        dense::apply(&ops.pq, &samples, &mut vhat);
        let mut vf = vec![[0.0; NVAR]; ops.nfq];
        dense::apply(&ops.vf, &vhat, &mut vf);
        let faces = face_points(&ops, &geo.jf, &geo.normals);
        let mut scratch = Scratch::new(&ops);
        let mut t1 = vec![[0.0; NVAR]; ops.np];
        let mut t2 = vec![[0.0; NVAR]; ops.np];
        compute_theta(
            &ops,
            &geo.g,
            geo.j,
            &vhat,
            &vf,
            &vf,
            &faces,
            &mut scratch,
            [&mut t1, &mut t2],
        );
        let mut tq = vec![[0.0; NVAR]; ops.nq];
        dense::apply(&ops.vq, &t1, &mut tq);
        for r in &tq {
            for (a, b) in r.iter().zip([1.0, 0.0, -0.3, -0.1]) {
                assert!((a - b).abs() < 1e-12);
            }
        }
        dense::apply(&ops.vq, &t2, &mut tq);
        for r in &tq {
            for (a, b) in r.iter().zip([0.0, 0.2, 1.0, 0.0]) {
                assert!((a - b).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn no_viscosity_means_no_sigma() {
        let ops = ReferenceOperators::new(2).unwrap();
        let gas = GasParams::air(10.0, 0.3).unwrap().inviscid();
        let v = vec![[0.1, 0.2, 0.3, -0.5]; ops.nq];
        let t = vec![[1.0, 2.0, 3.0, 4.0]; ops.np];
        let mut s1 = vec![[9.0; NVAR]; ops.np];
        let mut s2 = vec![[9.0; NVAR]; ops.np];
        let mut f1 = vec![[9.0; NVAR]; ops.nfq];
        let mut f2 = vec![[9.0; NVAR]; ops.nfq];
        let mut scratch = Scratch::new(&ops);
        let d = compute_sigma(
            &ops,
            &gas,
            1.0,
            &v,
            [&t, &t],
            &mut scratch,
            [&mut s1, &mut s2],
            [&mut f1, &mut f2],
            0,
            0.0,
        )
        .unwrap();
        assert_eq!(d, 0.0);
        assert!(s1.iter().chain(&s2).flatten().all(|&x| x == 0.0));
    }
}
