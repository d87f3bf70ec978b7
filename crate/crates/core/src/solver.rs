//! Full semi-discrete right-hand side: entropy projection, inviscid flux
//! differencing and interface terms, LDG viscous terms, boundary exterior
//! states and penalties, plus the entropy and conservation diagnostics of
//! each evaluation.

use rayon::prelude::*;

use crate::boundary::{self, BoundaryConditions, BoundaryKind, BoundarySpec};
use crate::dense::{self, Row, NVAR};
use crate::discretization::{Discretization, SolutionField};
use crate::error::{Error, Result};
use crate::inviscid::{self, HybridPattern, ProjectedElement};
use crate::physics::{self, FluxPoint, GasParams};
use crate::viscous::{self, FacePoint};

/// Lax-Friedrichs wavespeed evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Wavespeed {
    PerPoint,
    PerFace,
}

/// Viscous penalty parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Penalty {
    Off,
    /// `tau = -c / (Re v4)`.
    Scaled(f64),
    /// Fixed `tau`.
    Constant(f64),
}

impl Penalty {
    fn tau(&self, v4: f64, gas: &GasParams) -> f64 {
        match *self {
            Penalty::Off => 0.0,
            Penalty::Scaled(c) => c * boundary::entropy_tau(v4, gas),
            Penalty::Constant(t) => t,
        }
    }

    pub fn is_off(&self) -> bool {
        match *self {
            Penalty::Off => true,
            Penalty::Scaled(c) | Penalty::Constant(c) => c == 0.0,
        }
    }

    fn validate(&self) -> Result<()> {
        match *self {
            Penalty::Scaled(c) | Penalty::Constant(c) if !(c >= 0.0) => Err(Error::Config(
                format!("penalty parameter {c} must be nonnegative"),
            )),
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchemeOptions {
    pub lax_friedrichs: bool,
    pub wavespeed: Wavespeed,
    pub interior_penalty: Penalty,
    pub boundary_penalty: Penalty,
}

impl Default for SchemeOptions {
    fn default() -> Self {
        Self {
            lax_friedrichs: true,
            wavespeed: Wavespeed::PerPoint,
            interior_penalty: Penalty::Scaled(1.0),
            boundary_penalty: Penalty::Scaled(1.0),
        }
    }
}

impl SchemeOptions {
    /// Entropy-conservative interfaces and no viscous penalties: the setting
    /// in which the discrete entropy identities hold with equality.
    pub fn conservative() -> Self {
        Self {
            lax_friedrichs: false,
            wavespeed: Wavespeed::PerPoint,
            interior_penalty: Penalty::Off,
            boundary_penalty: Penalty::Off,
        }
    }

    pub fn penalties_off(&self) -> bool {
        self.interior_penalty.is_off() && self.boundary_penalty.is_off()
    }
}

/// Reductions of one right-hand side evaluation, all in fixed element order.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct RhsDiagnostics {
    pub t: f64,
    /// `sum_k (g_visc, v)`.
    pub viscous_entropy: f64,
    /// `sum_k sum_ij (K_ij Theta_j, Theta_i)`.
    pub dissipation: f64,
    /// Boundary entropy flow predicted for the active wall conditions.
    pub boundary_term: f64,
    /// Magnitude scale of the viscous entropy balance.
    pub scale: f64,
    /// `sum_k vhat^T (J M du/dt)`.
    pub entropy_rate: f64,
    pub entropy_rate_scale: f64,
    /// `1^T (J M du/dt)` per conserved field.
    pub conservation: Row,
    pub conservation_scale: Row,
}

impl RhsDiagnostics {
    /// Viscous entropy residual `r(t)`.
    pub fn r(&self) -> f64 {
        self.viscous_entropy + self.dissipation
    }

    /// `r(t) - boundary_term`.
    pub fn identity_residual(&self) -> f64 {
        self.r() - self.boundary_term
    }
}

/// Buffers for one right-hand side evaluation; they also hold the viscous
/// work arrays of the most recent evaluation.
#[derive(Debug, Clone)]
pub struct RhsWork {
    pub vhat: Vec<Row>,
    pub vh: Vec<Row>,
    pub utilde: Vec<Row>,
    pub flux_points: Vec<FluxPoint>,
    pub v_plus: Vec<Row>,
    pub theta: [Vec<Row>; 2],
    pub sigma: [Vec<Row>; 2],
    pub sigma_face: [Vec<Row>; 2],
    pub r_inviscid: Vec<Row>,
    pub r_viscous: Vec<Row>,
    pub dissipation: Vec<f64>,
    pub boundary_term: Vec<f64>,
    pub diagnostics: RhsDiagnostics,
}

/// Assembled solver for one case: discretization, gas, boundary data and
/// scheme options.
pub struct Solver {
    pub disc: Discretization,
    pub gas: GasParams,
    pub options: SchemeOptions,
    /// Boundary spec per mesh tag index.
    pub boundary: Vec<BoundarySpec>,
    pattern: HybridPattern,
    faces: Vec<FacePoint>,
}

impl Solver {
    pub fn new(
        disc: Discretization,
        gas: GasParams,
        bcs: &BoundaryConditions,
        options: SchemeOptions,
    ) -> Result<Self> {
        options.interior_penalty.validate()?;
        options.boundary_penalty.validate()?;
        let boundary = bcs.resolve(&disc.mesh)?;
        let pattern = HybridPattern::new(&disc.ops);
        let mut faces = Vec::with_capacity(disc.num_elements() * disc.ops.nfq);
        for g in &disc.mesh.geometry {
            faces.extend(viscous::face_points(&disc.ops, &g.jf, &g.normals));
        }
        Ok(Self {
            disc,
            gas,
            options,
            boundary,
            pattern,
            faces,
        })
    }

    pub fn num_elements(&self) -> usize {
        self.disc.num_elements()
    }

    /// Number of `f64` unknowns.
    pub fn num_dofs(&self) -> usize {
        self.num_elements() * self.disc.ops.np * NVAR
    }

    pub fn work(&self) -> RhsWork {
        let ops = &self.disc.ops;
        let nk = self.num_elements();
        let z = |n: usize| vec![[0.0; NVAR]; n];
        let fp0 = FluxPoint::new(&[1.0, 0.0, 0.0, 1.0], &self.gas);
        RhsWork {
            vhat: z(nk * ops.np),
            vh: z(nk * ops.nh()),
            utilde: z(nk * ops.nh()),
            flux_points: vec![fp0; nk * ops.nh()],
            v_plus: z(nk * ops.nfq),
            theta: [z(nk * ops.np), z(nk * ops.np)],
            sigma: [z(nk * ops.np), z(nk * ops.np)],
            sigma_face: [z(nk * ops.nfq), z(nk * ops.nfq)],
            r_inviscid: z(nk * ops.np),
            r_viscous: z(nk * ops.np),
            dissipation: vec![0.0; nk],
            boundary_term: vec![0.0; nk],
            diagnostics: RhsDiagnostics::default(),
        }
    }

    /// Boundary spec at a global face point, `None` for interior points.
    fn boundary_at(&self, i: usize) -> Option<&BoundarySpec> {
        let (k, f, _) = self.disc.face_point_owner(i);
        self.disc.mesh.face_tags[k][f].map(|t| &self.boundary[t])
    }

    /// Row of the neighbouring element's `nh`-blocked arrays matching face point `i`.
    fn exterior_row(&self, i: usize) -> usize {
        let ops = &self.disc.ops;
        let j = self.disc.face_map[i];
        (j / ops.nfq) * ops.nh() + ops.nq + j % ops.nfq
    }

    /// `du/dt` for modal coefficients `u`; fills `work` including its diagnostics.
    pub fn rhs(&self, t: f64, u: &[Row], du: &mut [Row], work: &mut RhsWork) -> Result<()> {
        self.project(t, u, work)?;
        self.inviscid_terms(work)?;
        if self.gas.is_viscous() {
            self.viscous_terms(t, work)?;
        } else {
            work.r_viscous.iter_mut().for_each(|r| *r = [0.0; NVAR]);
            work.dissipation.iter_mut().for_each(|d| *d = 0.0);
            work.boundary_term.iter_mut().for_each(|d| *d = 0.0);
        }
        self.finish(t, du, work);
        Ok(())
    }

    /// Convenience wrapper on a [`SolutionField`].
    pub fn evaluate(
        &self,
        t: f64,
        field: &SolutionField,
        work: &mut RhsWork,
    ) -> Result<SolutionField> {
        let mut du = SolutionField::zeros(self.num_elements(), self.disc.ops.np);
        self.rhs(t, &field.coeffs, &mut du.coeffs, work)?;
        Ok(du)
    }

    fn project(&self, t: f64, u: &[Row], w: &mut RhsWork) -> Result<()> {
        let ops = &self.disc.ops;
        let (np, nh) = (ops.np, ops.nh());
        let gas = &self.gas;
        (
            u.par_chunks(np),
            w.vhat.par_chunks_mut(np),
            w.vh.par_chunks_mut(nh),
            w.utilde.par_chunks_mut(nh),
            w.flux_points.par_chunks_mut(nh),
        )
            .into_par_iter()
            .enumerate()
            .try_for_each_init(
                || vec![[0.0; NVAR]; 2 * ops.nq],
                |scratch, (k, (uk, vhat, vh, ut, fp))| {
                    inviscid::entropy_project(
                        ops,
                        uk,
                        gas,
                        k,
                        t,
                        scratch,
                        ProjectedElement {
                            vhat,
                            vh,
                            utilde: ut,
                        },
                    )?;
                    for (p, s) in fp.iter_mut().zip(ut.iter()) {
                        *p = FluxPoint::new(s, gas);
                    }
                    Ok(())
                },
            )
    }

    fn inviscid_terms(&self, w: &mut RhsWork) -> Result<()> {
        let ops = &self.disc.ops;
        let (np, nq, nh, nfq, nfp) = (ops.np, ops.nq, ops.nh(), ops.nfq, ops.nfp);
        let gas = &self.gas;
        let opts = &self.options;
        let (utilde, fpts) = (&w.utilde, &w.flux_points);
        w.r_inviscid
            .par_chunks_mut(np)
            .enumerate()
            .try_for_each_init(
                || {
                    (
                        vec![[0.0; NVAR]; nh],
                        vec![0.0; nfq],
                        Vec::with_capacity(nfq),
                    )
                },
                |(h, lambda, ext), (k, out)| -> Result<()> {
                    let geo = &self.disc.mesh.geometry[k];
                    h.iter_mut().for_each(|r| *r = [0.0; NVAR]);
                    let base = k * nh;
                    let fref = physics::ec_flux_points(&fpts[base], &fpts[base], gas.gamma);
                    inviscid::volume_flux_differencing(
                        &self.pattern,
                        &geo.g,
                        &fpts[base..base + nh],
                        &fref,
                        gas.gamma,
                        h,
                    );
                    ext.clear();
                    for q in 0..nfq {
                        let i = k * nfq + q;
                        let u_in = utilde[base + nq + q];
                        let n = self.faces[i].n;
                        let (up, fp) = match self.boundary_at(i) {
                            Some(spec) => {
                                let up = boundary::inviscid_boundary_state(spec, &u_in, n)?;
                                (up, FluxPoint::new(&up, gas))
                            }
                            None => {
                                let row = self.exterior_row(i);
                                (utilde[row], fpts[row])
                            }
                        };
                        lambda[q] = if opts.lax_friedrichs {
                            physics::max_wavespeed_unchecked(&u_in, &up, n, gas)
                        } else {
                            0.0
                        };
                        ext.push((up, fp));
                    }
                    if opts.lax_friedrichs && opts.wavespeed == Wavespeed::PerFace {
                        for face in lambda.chunks_mut(nfp) {
                            let m = face.iter().copied().fold(0.0, f64::max);
                            face.iter_mut().for_each(|l| *l = m);
                        }
                    }
                    for q in 0..nfq {
                        let i = k * nfq + q;
                        let a = base + nq + q;
                        let (up, fp) = &ext[q];
                        let s = inviscid::surface_flux(
                            (&fpts[a], &utilde[a]),
                            (fp, up),
                            self.faces[i].n,
                            self.faces[i].wjf,
                            lambda[q],
                            &fref,
                            gas.gamma,
                        );
                        for c in 0..NVAR {
                            h[nq + q][c] += s[c];
                        }
                    }
                    dense::apply_t(&ops.vh, h, out);
                    out.iter_mut()
                        .for_each(|r| r.iter_mut().for_each(|x| *x = -*x));
                    Ok(())
                },
            )
    }

    /// Exterior entropy variables and stresses at boundary point `i`.
    fn viscous_boundary(
        &self,
        i: usize,
        spec: &BoundarySpec,
        v: &Row,
        sigma: &[Row; 2],
        t: f64,
    ) -> Result<boundary::ViscousExterior> {
        let x = self.disc.face_points[i];
        boundary::viscous_exterior(spec, v, sigma, self.faces[i].n, x, t, &self.gas)
    }

    fn viscous_terms(&self, t: f64, w: &mut RhsWork) -> Result<()> {
        let ops = &self.disc.ops;
        let (np, nq, nh, nfq) = (ops.np, ops.nq, ops.nh(), ops.nfq);
        let gas = &self.gas;
        let mesh = &self.disc.mesh;

        // gradients of the entropy variables
        {
            let (vhat, vh) = (&w.vhat, &w.vh);
            let [t1, t2] = &mut w.theta;
            (
                t1.par_chunks_mut(np),
                t2.par_chunks_mut(np),
                w.v_plus.par_chunks_mut(nfq),
            )
                .into_par_iter()
                .enumerate()
                .try_for_each_init(
                    || viscous::Scratch::new(ops),
                    |scratch, (k, (t1, t2, vplus))| -> Result<()> {
                        let vface = &vh[k * nh + nq..(k + 1) * nh];
                        for q in 0..nfq {
                            let i = k * nfq + q;
                            vplus[q] = match self.boundary_at(i) {
                                Some(spec) => {
                                    self.viscous_boundary(i, spec, &vface[q], &[[0.0; NVAR]; 2], t)?
                                        .v
                                }
                                None => vh[self.exterior_row(i)],
                            };
                        }
                        let geo = &mesh.geometry[k];
                        viscous::compute_theta(
                            ops,
                            &geo.g,
                            geo.j,
                            &vhat[k * np..(k + 1) * np],
                            vface,
                            vplus,
                            &self.faces[k * nfq..(k + 1) * nfq],
                            scratch,
                            [t1, t2],
                        );
                        Ok(())
                    },
                )?;
        }

        // viscous fluxes
        {
            let vh = &w.vh;
            let [t1, t2] = &w.theta;
            let [s1, s2] = &mut w.sigma;
            let [f1, f2] = &mut w.sigma_face;
            (
                s1.par_chunks_mut(np),
                s2.par_chunks_mut(np),
                f1.par_chunks_mut(nfq),
                f2.par_chunks_mut(nfq),
                w.dissipation.par_iter_mut(),
            )
                .into_par_iter()
                .enumerate()
                .try_for_each_init(
                    || viscous::Scratch::new(ops),
                    |scratch, (k, (s1, s2, f1, f2, d))| -> Result<()> {
                        let e = k * np..(k + 1) * np;
                        *d = viscous::compute_sigma(
                            ops,
                            gas,
                            mesh.geometry[k].j,
                            &vh[k * nh..k * nh + nq],
                            [&t1[e.clone()], &t2[e]],
                            scratch,
                            [s1, s2],
                            [f1, f2],
                            k,
                            t,
                        )?;
                        Ok(())
                    },
                )?;
        }

        // divergence of the viscous fluxes with penalties
        let (vh, vplus) = (&w.vh, &w.v_plus);
        let [s1, s2] = &w.sigma;
        let [f1, f2] = &w.sigma_face;
        let opts = &self.options;
        (
            w.r_viscous.par_chunks_mut(np),
            w.boundary_term.par_iter_mut(),
        )
            .into_par_iter()
            .enumerate()
            .try_for_each_init(
                || vec![[0.0; NVAR]; nfq],
                |flux, (k, (out, bterm))| -> Result<()> {
                    let mut bt = Vec::new();
                    for q in 0..nfq {
                        let i = k * nfq + q;
                        let FacePoint { wjf, n } = self.faces[i];
                        let v = vh[k * nh + nq + q];
                        let sig = [f1[i], f2[i]];
                        let (sp, pen) = match self.boundary_at(i) {
                            Some(spec) => {
                                let ext = self.viscous_boundary(i, spec, &v, &sig, t)?;
                                let tau = opts.boundary_penalty.tau(v[3], gas);
                                let pen = if tau == 0.0 {
                                    [0.0; NVAR]
                                } else {
                                    boundary::boundary_penalty_unchecked(&v, &ext.v, tau)
                                };
                                bt.push(
                                    wjf * self.boundary_entropy_flow(
                                        spec,
                                        &sig,
                                        n,
                                        self.disc.face_points[i],
                                        t,
                                    ),
                                );
                                (ext.sigma, pen)
                            }
                            None => {
                                let j = self.disc.face_map[i];
                                let vp = vplus[i];
                                let tau = opts.interior_penalty.tau(0.5 * (v[3] + vp[3]), gas);
                                ([f1[j], f2[j]], viscous::interior_penalty(&v, &vp, tau))
                            }
                        };
                        for c in 0..NVAR {
                            let avg = 0.5
                                * ((sig[0][c] + sp[0][c]) * n[0] + (sig[1][c] + sp[1][c]) * n[1]);
                            flux[q][c] = wjf * (avg + pen[c]);
                        }
                    }
                    *bterm = dense::compensated_sum(bt);
                    let geo = &mesh.geometry[k];
                    let e = k * np..(k + 1) * np;
                    viscous::viscous_divergence(ops, &geo.g, [&s1[e.clone()], &s2[e]], flux, out);
                    Ok(())
                },
            )
    }

    /// Pointwise boundary entropy flow density predicted by the wall
    /// identities: `c_v g` (adiabatic), `q_n / (c_v T_wall)` (isothermal),
    /// zero otherwise.
    fn boundary_entropy_flow(
        &self,
        spec: &BoundarySpec,
        sigma: &[Row; 2],
        n: [f64; 2],
        x: [f64; 2],
        t: f64,
    ) -> f64 {
        match spec.kind {
            BoundaryKind::AdiabaticNoSlip => self.gas.cv * spec.heat_flow_at(x, t),
            BoundaryKind::IsothermalNoSlip => {
                let uw = spec.u_wall;
                let qn: f64 = (0..2)
                    .map(|i| n[i] * (-sigma[i][3] + uw[0] * sigma[i][1] + uw[1] * sigma[i][2]))
                    .sum();
                qn / (self.gas.cv * spec.t_wall.unwrap_or(f64::NAN))
            }
            _ => 0.0,
        }
    }

    fn finish(&self, t: f64, du: &mut [Row], w: &mut RhsWork) {
        let ops = &self.disc.ops;
        let np = ops.np;
        let nk = self.num_elements();
        let (ri, rv) = (&w.r_inviscid, &w.r_viscous);
        du.par_chunks_mut(np).enumerate().for_each_init(
            || vec![[0.0; NVAR]; np],
            |total, (k, out)| {
                let e = k * np..(k + 1) * np;
                for ((s, a), b) in total.iter_mut().zip(&ri[e.clone()]).zip(&rv[e]) {
                    for c in 0..NVAR {
                        s[c] = a[c] + b[c];
                    }
                }
                dense::apply(&ops.mass_inv, total, out);
                let jinv = 1.0 / self.disc.mesh.geometry[k].j;
                out.iter_mut()
                    .for_each(|r| r.iter_mut().for_each(|x| *x *= jinv));
            },
        );

        let mut visc = Vec::with_capacity(nk);
        let mut ent = Vec::with_capacity(nk);
        let mut cons: [Vec<f64>; NVAR] = Default::default();
        let mut r = vec![[0.0; NVAR]; np];
        for k in 0..nk {
            let e = k * np..(k + 1) * np;
            let vhat = &w.vhat[e.clone()];
            for ((s, a), b) in r.iter_mut().zip(&ri[e.clone()]).zip(&rv[e]) {
                for c in 0..NVAR {
                    s[c] = a[c] + b[c];
                }
            }
            visc.push(dense::block_dot(vhat, &rv[k * np..(k + 1) * np]));
            ent.push(dense::block_dot(vhat, &r));
            for (c, list) in cons.iter_mut().enumerate() {
                list.push(ops.ones_coeffs.iter().zip(&r).map(|(o, x)| o * x[c]).sum());
            }
        }
        let abs_sum = |v: &[f64]| dense::compensated_sum(v.iter().map(|x| x.abs()));
        let dissipation = dense::compensated_sum(w.dissipation.iter().copied());
        let boundary_term = dense::compensated_sum(w.boundary_term.iter().copied());
        w.diagnostics = RhsDiagnostics {
            t,
            viscous_entropy: dense::compensated_sum(visc.iter().copied()),
            dissipation,
            boundary_term,
            scale: abs_sum(&visc) + dissipation.abs() + abs_sum(&w.boundary_term),
            entropy_rate: dense::compensated_sum(ent.iter().copied()),
            entropy_rate_scale: abs_sum(&ent),
            conservation: [0, 1, 2, 3].map(|c| dense::compensated_sum(cons[c].iter().copied())),
            conservation_scale: [0, 1, 2, 3].map(|c| abs_sum(&cons[c])),
        };
    }

    /// `sqrt(sum over no-slip wall faces of int |u - u_wall|^2)`, with the
    /// velocity of the modal solution at face quadrature points. `tags`
    /// restricts the walls; `None` uses every no-slip tag.
    pub fn wall_error(&self, u: &[Row], tags: Option<&[&str]>) -> Result<f64> {
        let ops = &self.disc.ops;
        let mesh = &self.disc.mesh;
        let selected: Vec<usize> = match tags {
            Some(names) => names
                .iter()
                .map(|n| {
                    mesh.tag_index(n)
                        .ok_or_else(|| Error::Boundary(format!("no boundary tag '{n}'")))
                })
                .collect::<Result<_>>()?,
            None => (0..self.boundary.len())
                .filter(|&t| self.boundary[t].kind.is_noslip())
                .collect(),
        };
        if selected.is_empty() {
            return Err(Error::Boundary(
                "wall error needs at least one wall tag".into(),
            ));
        }
        let mut terms = Vec::new();
        let mut face = vec![[0.0; NVAR]; ops.nfq];
        for k in 0..self.num_elements() {
            let tags_k = mesh.face_tags[k];
            if !tags_k
                .iter()
                .any(|t| t.is_some_and(|t| selected.contains(&t)))
            {
                continue;
            }
            dense::apply(&ops.vf, &u[k * ops.np..(k + 1) * ops.np], &mut face);
            for (q, s) in face.iter().enumerate() {
                let f = q / ops.nfp;
                let Some(tag) = tags_k[f].filter(|t| selected.contains(t)) else {
                    continue;
                };
                let uw = self.boundary[tag].u_wall;
                let du = [s[1] / s[0] - uw[0], s[2] / s[0] - uw[1]];
                terms.push(self.faces[k * ops.nfq + q].wjf * (du[0] * du[0] + du[1] * du[1]));
            }
        }
        Ok(dense::compensated_sum(terms).sqrt())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{bisected_quad_mesh, sine_grading, Rect};
    use crate::physics::primitive_to_conservative;
    use crate::reference::ReferenceOperators;

    fn periodic_square(n: usize, k1d: usize, graded: bool) -> Discretization {
        let mut m = bisected_quad_mesh(k1d, k1d, Rect::new(-1.0, 1.0, -1.0, 1.0)).unwrap();
        if graded {
            m = m.apply_grading(sine_grading(0.1)).unwrap();
        }
        m.make_periodic([2.0, 0.0]).unwrap();
        m.make_periodic([0.0, 2.0]).unwrap();
        Discretization::new(ReferenceOperators::new(n).unwrap(), m).unwrap()
    }

    fn wave(gas: &GasParams) -> impl Fn([f64; 2]) -> Row + '_ {
        move |x| {
            let rho = 1.0
                + 0.3 * (std::f64::consts::PI * x[0]).sin() * (std::f64::consts::PI * x[1]).cos();
            primitive_to_conservative(
                rho,
                0.2,
                -0.1 + 0.1 * x[0].sin(),
                1.0 + 0.1 * (2.0 * x[1]).cos(),
                gas,
            )
            .unwrap()
        }
    }

    #[test]
    fn free_stream_is_preserved() {
        let gas = GasParams::air(100.0, 0.3).unwrap();
        let d = periodic_square(3, 3, true);
        let u0 = primitive_to_conservative(1.2, 0.3, -0.4, 2.0, &gas).unwrap();
        let field = d.project(|_| u0);
        let s = Solver::new(d, gas, &BoundaryConditions::new(), SchemeOptions::default()).unwrap();
        let mut w = s.work();
        let du = s.evaluate(0.0, &field, &mut w).unwrap();
        let m = du.as_flat().iter().fold(0.0f64, |a, x| a.max(x.abs()));
        assert!(m < 1e-12, "max |du/dt| = {m:e}");
    }

    #[test]
    fn entropy_conservation_and_viscous_identity() {
        let gas = GasParams::air(50.0, 0.3).unwrap();
        let d = periodic_square(3, 2, true);
        let field = d.project(wave(&gas));
        let s = Solver::new(
            d,
            gas,
            &BoundaryConditions::new(),
            SchemeOptions::conservative(),
        )
        .unwrap();
        let mut w = s.work();
        s.evaluate(0.0, &field, &mut w).unwrap();
        let diag = w.diagnostics;
        for c in 0..NVAR {
            assert!(diag.conservation[c].abs() <= 1e-12 * diag.conservation_scale[c].max(1.0));
        }
        // inviscid part is entropy conservative, viscous part balances its dissipation
        assert!(diag.r().abs() <= 1e-11 * diag.scale, "{diag:?}");
        assert!(
            (diag.entropy_rate - diag.viscous_entropy).abs() <= 1e-10 * diag.entropy_rate_scale,
            "{diag:?}"
        );
        assert!(diag.dissipation > 0.0);
    }

    #[test]
    fn penalties_and_lax_friedrichs_dissipate() {
        let gas = GasParams::air(50.0, 0.3).unwrap();
        let d = periodic_square(2, 2, false);
        let field = d.project(wave(&gas));
        let s = Solver::new(d, gas, &BoundaryConditions::new(), SchemeOptions::default()).unwrap();
        let mut w = s.work();
        s.evaluate(0.0, &field, &mut w).unwrap();
        let diag = w.diagnostics;
        assert!(diag.r() < 0.0);
        assert!(diag.entropy_rate < diag.viscous_entropy);
    }

    #[test]
    fn wall_error_of_uniform_flow() {
        let gas = GasParams::air(50.0, 0.3).unwrap();
        let mut m = bisected_quad_mesh(4, 2, Rect::new(-2.0, 2.0, -1.0, 1.0)).unwrap();
        m.make_periodic([4.0, 0.0]).unwrap();
        m.tag_boundaries(&[("bottom", &|p| p[1] < -0.99), ("top", &|p| p[1] > 0.99)])
            .unwrap();
        let d = Discretization::new(ReferenceOperators::new(2).unwrap(), m).unwrap();
        let field = d.project(|_| primitive_to_conservative(1.0, 1.0, 0.0, 1.0, &gas).unwrap());
        let bcs = BoundaryConditions::new()
            .with("bottom", BoundarySpec::adiabatic([0.0; 2]))
            .with("top", BoundarySpec::symmetry());
        let s = Solver::new(d, gas, &bcs, SchemeOptions::default()).unwrap();
        let e = s.wall_error(&field.coeffs, None).unwrap();
        assert!((e - 2.0).abs() < 1e-12);
        assert!(s.wall_error(&field.coeffs, Some(&[])).is_err());
    }

    #[test]
    fn wall_identities_hold_without_penalties() {
        let gas = GasParams::air(200.0, 0.3).unwrap();
        let mut m = bisected_quad_mesh(3, 3, Rect::new(-1.0, 1.0, -1.0, 1.0)).unwrap();
        m.tag_boundaries(&[("lid", &|p| p[1] > 0.99), ("wall", &|p| p[1] <= 0.99)])
            .unwrap();
        let d = Discretization::new(ReferenceOperators::new(3).unwrap(), m).unwrap();
        let field = d.project(wave(&gas));
        let g: boundary::HeatFlow =
            std::sync::Arc::new(|x, _| 1e-2 * (4.0 * std::f64::consts::PI * x[0]).sin());
        let cases = [
            (
                BoundarySpec::adiabatic([1.0, 0.0]),
                BoundarySpec::adiabatic([0.0; 2]),
            ),
            (
                BoundarySpec::adiabatic_with_heat_flow([1.0, 0.0], g),
                BoundarySpec::adiabatic([0.0; 2]),
            ),
            (
                BoundarySpec::isothermal([1.0, 0.0], 1.3).unwrap(),
                BoundarySpec::isothermal([0.0; 2], 1.1).unwrap(),
            ),
            (BoundarySpec::symmetry(), BoundarySpec::symmetry()),
        ];
        for (lid, wall) in cases {
            let bcs = BoundaryConditions::new()
                .with("lid", lid.clone())
                .with("wall", wall);
            let s = Solver::new(d.clone(), gas, &bcs, SchemeOptions::conservative()).unwrap();
            let mut w = s.work();
            s.evaluate(0.0, &field, &mut w).unwrap();
            let diag = w.diagnostics;
            assert!(
                diag.identity_residual().abs() <= 1e-10 * diag.scale,
                "{lid:?}: {diag:?}"
            );
            if lid.kind == BoundaryKind::Symmetry {
                assert_eq!(diag.boundary_term, 0.0);
            }

            let mut opts = SchemeOptions::conservative();
            opts.boundary_penalty = Penalty::Scaled(1.0);
            opts.interior_penalty = Penalty::Scaled(1.0);
            let s = Solver::new(d.clone(), gas, &bcs, opts).unwrap();
            s.evaluate(0.0, &field, &mut w).unwrap();
            assert!(w.diagnostics.identity_residual() <= 1e-12 * w.diagnostics.scale);
        }
    }
}
