//! Entropy-stable inviscid terms: entropy projection, flux differencing
//! with the hybridized SBP operators, and the interface flux with optional
//! Lax-Friedrichs dissipation.

use nalgebra::DMatrix;

use crate::dense::{self, Row, NVAR};
use crate::error::{Error, Result};
use crate::physics::{self, FluxPoint, GasParams, StateVec};
use crate::reference::ReferenceOperators;

/// Per-element output of the entropy projection.
pub struct ProjectedElement<'a> {
    /// Projected entropy-variable coefficients (`np` rows).
    pub vhat: &'a mut [Row],
    /// `Vh vhat` at volume then face points (`nh` rows).
    pub vh: &'a mut [Row],
    /// Entropy-projected conservative states `u(Vh vhat)` (`nh` rows).
    pub utilde: &'a mut [Row],
}

/// `vhat = Pq v(Vq u)`, `utilde = u(Vh vhat)` for one element.
///
/// `scratch` needs `2 nq` rows. Errors name the element and time.
pub fn entropy_project(
    ops: &ReferenceOperators,
    u: &[Row],
    gas: &GasParams,
    element: usize,
    time: f64,
    scratch: &mut [Row],
    out: ProjectedElement<'_>,
) -> Result<()> {
    let positivity = |detail: String| Error::Positivity {
        element,
        time,
        detail,
    };
    let (vals, shifted) = scratch.split_at_mut(ops.nq);
    dense::apply(&ops.vq, u, vals);
    for s in vals.iter_mut() {
        *s = physics::entropy_vars(s, gas).map_err(|e| positivity(e.to_string()))?;
    }
    dense::project_shifted(&ops.pq, &ops.ones_coeffs, vals, out.vhat, shifted);
    dense::apply(&ops.vh, out.vhat, out.vh);
    for (ut, v) in out.utilde.iter_mut().zip(out.vh.iter()) {
        *ut = physics::conservative_from_entropy(v, gas).map_err(|e| positivity(e.to_string()))?;
        if !physics::is_admissible(ut) {
            return Err(positivity(format!(
                "entropy-projected state {ut:?} is inadmissible"
            )));
        }
    }
    Ok(())
}

/// Nonzero off-diagonal entries `(a, b, [Qh1[a,b], Qh2[a,b]])`, `a < b`, of
/// the hybridized operators. Face-face couplings are zero and skipped;
/// `Qh[b,a] = -Qh[a,b]` supplies the lower triangle.
#[derive(Debug, Clone)]
pub struct HybridPattern {
    pub entries: Vec<(u32, u32, [f64; 2])>,
    pub nh: usize,
}

impl HybridPattern {
    pub fn new(ops: &ReferenceOperators) -> Self {
        let nh = ops.nh();
        let mut entries = Vec::new();
        for a in 0..nh {
            for b in (a + 1)..nh {
                if a >= ops.nq && b >= ops.nq {
                    continue;
                }
                let q = [ops.qh[0][(a, b)], ops.qh[1][(a, b)]];
                debug_assert_eq!(ops.qh[0][(b, a)], -q[0]);
                if q[0] != 0.0 || q[1] != 0.0 {
                    entries.push((a as u32, b as u32, q));
                }
            }
        }
        Self { entries, nh }
    }
}

/// Physical operator weights `Q^k_{i,h}[a,b] = sum_j G_ij Qh_j[a,b]`.
#[inline]
fn physical_weights(g: &[[f64; 2]; 2], q: [f64; 2]) -> [f64; 2] {
    [
        g[0][0] * q[0] + g[0][1] * q[1],
        g[1][0] * q[0] + g[1][1] * q[1],
    ]
}

/// Accumulates `h += sum_i (2 Q^k_{i,h} o (F_i - fref_i)) 1` over off-diagonal
/// entries (`h` has `nh` rows). The diagonal face entries cancel against the
/// surface consistency term and are handled in [`surface_flux`].
///
/// Since `Qh_i 1 = 0`, subtracting a constant `fref` here and in
/// [`surface_flux`] leaves the sum unchanged. Taking `fref` from the element
/// itself keeps the products small, so constant states cancel to roundoff
/// relative to `F - fref` instead of `F`.
pub fn volume_flux_differencing(
    pattern: &HybridPattern,
    g: &[[f64; 2]; 2],
    points: &[FluxPoint],
    fref: &[Row; 2],
    gamma: f64,
    h: &mut [Row],
) {
    for &(a, b, q) in &pattern.entries {
        let (a, b) = (a as usize, b as usize);
        let w = physical_weights(g, q);
        let f = physics::ec_flux_points(&points[a], &points[b], gamma);
        let mut val = [0.0; NVAR];
        for c in 0..NVAR {
            val[c] = 2.0 * (w[0] * (f[0][c] - fref[0][c]) + w[1] * (f[1][c] - fref[1][c]));
        }
        for c in 0..NVAR {
            h[a][c] += val[c];
            h[b][c] -= val[c];
        }
    }
}

/// Literal `sum_i Vh^T (2 Q^k_{i,h} o F_i) 1` with dense matrices, used as
/// a test oracle for [`volume_flux_differencing`].
pub fn dense_volume_flux_differencing(
    ops: &ReferenceOperators,
    g: &[[f64; 2]; 2],
    utilde: &[StateVec],
    gas: &GasParams,
) -> Result<Vec<Row>> {
    let nh = ops.nh();
    let mut total = vec![[0.0; NVAR]; ops.np];
    for i in 0..2 {
        let qk: DMatrix<f64> = g[i][0] * &ops.qh[0] + g[i][1] * &ops.qh[1];
        let mut h = vec![[0.0; NVAR]; nh];
        for a in 0..nh {
            for b in 0..nh {
                let f = physics::ec_flux(&utilde[a], &utilde[b], gas)?;
                for c in 0..NVAR {
                    h[a][c] += 2.0 * qk[(a, b)] * f[i][c];
                }
            }
        }
        dense::apply_t_add(&ops.vh, 1.0, &h, &mut total);
    }
    Ok(total)
}

/// Interior-side surface contribution at one face point:
/// `wJf (sum_i n_i (f_{i,S}(u+, u) - fref_i) - lambda/2 (u+ - u))`.
#[allow(clippy::too_many_arguments)]
#[inline]
pub fn surface_flux(
    (inner, u): (&FluxPoint, &StateVec),
    (outer, up): (&FluxPoint, &StateVec),
    n: [f64; 2],
    wjf: f64,
    lambda: f64,
    fref: &[Row; 2],
    gamma: f64,
) -> Row {
    let f = physics::ec_flux_points(outer, inner, gamma);
    let mut out = [0.0; NVAR];
    for c in 0..NVAR {
        let fn_ = n[0] * (f[0][c] - fref[0][c]) + n[1] * (f[1][c] - fref[1][c]);
        out[c] = wjf * (fn_ - 0.5 * lambda * (up[c] - u[c]));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::physics::primitive_to_conservative;

    #[test]
    fn pattern_skips_face_face() {
        let ops = ReferenceOperators::new(2).unwrap();
        let p = HybridPattern::new(&ops);
        assert!(p
            .entries
            .iter()
            .all(|&(a, b, _)| (a as usize) < ops.nq || (b as usize) < ops.nq));
        assert!(p.entries.iter().all(|&(a, b, _)| a < b));
    }

    #[test]
    fn optimized_matches_dense_oracle() {
        let gas = GasParams::air(10.0, 0.5).unwrap();
        for n in 1..=3 {
            let ops = ReferenceOperators::new(n).unwrap();
            let pattern = HybridPattern::new(&ops);
            let nh = ops.nh();
            let ut: Vec<StateVec> = (0..nh)
                .map(|a| {
                    let s = |k: f64| (a as f64 * k).sin();
                    primitive_to_conservative(
                        1.0 + 0.3 * s(1.3),
                        0.2 * s(0.7),
                        -0.1 * s(2.1),
                        1.0 + 0.2 * s(0.4),
                        &gas,
                    )
                    .unwrap()
                })
                .collect();
            let g = [[0.31, -0.07], [0.05, 0.27]];
            let dense_total = dense_volume_flux_differencing(&ops, &g, &ut, &gas).unwrap();

            let fp: Vec<FluxPoint> = ut.iter().map(|u| FluxPoint::new(u, &gas)).collect();
            let mut h = vec![[0.0; NVAR]; nh];
            // any constant shift must drop out
            let fref = physics::inviscid_flux(&ut[1], &gas).unwrap();
            volume_flux_differencing(&pattern, &g, &fp, &fref, gas.gamma, &mut h);
            // restore the diagonal face terms the optimized kernel omits
            for f in 0..ops.nfq {
                let a = ops.nq + f;
                let flux = physics::inviscid_flux(&ut[a], &gas).unwrap();
                for i in 0..2 {
                    let bk = g[i][0] * ops.b[0][f] + g[i][1] * ops.b[1][f];
                    for c in 0..NVAR {
                        h[a][c] += bk * (flux[i][c] - fref[i][c]);
                    }
                }
            }
            let mut fast = vec![[0.0; NVAR]; ops.np];
            dense::apply_t_add(&ops.vh, 1.0, &h, &mut fast);
            let scale = dense_total
                .iter()
                .flatten()
                .fold(0.0f64, |m, x| m.max(x.abs()));
            for (a, b) in fast.iter().flatten().zip(dense_total.iter().flatten()) {
                assert!((a - b).abs() <= 1e-13 * scale.max(1.0), "n={n}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn projection_of_constant_state() {
        let gas = GasParams::air(10.0, 0.5).unwrap();
        let ops = ReferenceOperators::new(3).unwrap();
        let u0 = primitive_to_conservative(1.1, 0.3, -0.2, 1.4, &gas).unwrap();
        let coeffs: Vec<Row> = ops.ones_coeffs.iter().map(|&c| u0.map(|x| c * x)).collect();
        let mut scratch = vec![[0.0; NVAR]; 2 * ops.nq];
        let mut vhat = vec![[0.0; NVAR]; ops.np];
        let mut vh = vec![[0.0; NVAR]; ops.nh()];
        let mut ut = vec![[0.0; NVAR]; ops.nh()];
        entropy_project(
            &ops,
            &coeffs,
            &gas,
            0,
            0.0,
            &mut scratch,
            ProjectedElement {
                vhat: &mut vhat,
                vh: &mut vh,
                utilde: &mut ut,
            },
        )
        .unwrap();
        for u in &ut {
            for c in 0..NVAR {
                assert!((u[c] - u0[c]).abs() < 1e-12 * u0[c].abs().max(1.0));
            }
        }
        let bad: Vec<Row> = coeffs.iter().map(|r| [-r[0], r[1], r[2], r[3]]).collect();
        let err = entropy_project(
            &ops,
            &bad,
            &gas,
            7,
            0.5,
            &mut scratch,
            ProjectedElement {
                vhat: &mut vhat,
                vh: &mut vh,
                utilde: &mut ut,
            },
        )
        .unwrap_err();
        assert!(matches!(err, Error::Positivity { element: 7, .. }));
    }

    #[test]
    fn surface_flux_consistency() {
        let gas = GasParams::air(10.0, 0.5).unwrap();
        let u = primitive_to_conservative(1.0, 1.0, 0.0, 1.0, &gas).unwrap();
        let p = FluxPoint::new(&u, &gas);
        let f = physics::inviscid_flux(&u, &gas).unwrap();
        let s = surface_flux(
            (&p, &u),
            (&p, &u),
            [1.0, 0.0],
            2.0,
            3.0,
            &[[0.0; NVAR]; 2],
            gas.gamma,
        );
        for c in 0..NVAR {
            assert!((s[c] - 2.0 * f[0][c]).abs() < 1e-14);
        }
        let s = surface_flux((&p, &u), (&p, &u), [1.0, 0.0], 2.0, 3.0, &f, gas.gamma);
        assert!(s.iter().all(|x| x.abs() < 1e-14));
    }
}
