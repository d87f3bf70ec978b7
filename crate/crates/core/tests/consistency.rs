//! Semi-discrete right-hand side against the divergence of the physical
//! fluxes for a smooth periodic field.

use std::f64::consts::PI;

use esdg::boundary::{BoundaryConditions, BoundarySpec};
use esdg::dense;
use esdg::discretization::Discretization;
use esdg::mesh::{bisected_quad_mesh, sine_grading, Rect};
use esdg::physics::{primitive_to_conservative, GasParams};
use esdg::reference::ReferenceOperators;
use esdg::solver::{SchemeOptions, Solver};

fn primitive(x: [f64; 2]) -> [f64; 4] {
    let (sx, cx) = (PI * x[0]).sin_cos();
    let (sy, cy) = (PI * x[1]).sin_cos();
    [
        1.0 + 0.2 * sx * cy,
        0.3 + 0.2 * cx * sy,
        -0.2 + 0.1 * sx,
        1.0 + 0.2 * cy * cx,
    ]
}

fn gradient(f: impl Fn([f64; 2]) -> [f64; 4], x: [f64; 2], h: f64) -> [[f64; 4]; 2] {
    let d = |e: [f64; 2]| {
        let a = f([x[0] + h * e[0], x[1] + h * e[1]]);
        let b = f([x[0] - h * e[0], x[1] - h * e[1]]);
        [0, 1, 2, 3].map(|c| (a[c] - b[c]) / (2.0 * h))
    };
    [d([1.0, 0.0]), d([0.0, 1.0])]
}

/// Physical flux `f_i - g_i` in direction `i`.
fn flux(x: [f64; 2], i: usize, gas: &GasParams) -> [f64; 4] {
    let [rho, u, v, p] = primitive(x);
    let e_tot = p / (gas.gamma - 1.0) + 0.5 * rho * (u * u + v * v);
    let vel = [u, v];
    let inv = [
        rho * vel[i],
        rho * u * vel[i] + if i == 0 { p } else { 0.0 },
        rho * v * vel[i] + if i == 1 { p } else { 0.0 },
        vel[i] * (e_tot + p),
    ];
    let g = gradient(primitive, x, 1e-5);
    let (ux, uy, vx, vy) = (g[0][1], g[1][1], g[0][2], g[1][2]);
    let tau = [
        [
            (gas.lambda + 2.0 * gas.mu) * ux + gas.lambda * vy,
            gas.mu * (uy + vx),
        ],
        [
            gas.mu * (uy + vx),
            (gas.lambda + 2.0 * gas.mu) * vy + gas.lambda * ux,
        ],
    ];
    // e = p / ((gamma-1) rho), kappa dT = gamma mu / Pr de
    let de = |d: usize| (g[d][3] * rho - p * g[d][0]) / ((gas.gamma - 1.0) * rho * rho);
    let heat = gas.gamma * gas.mu / gas.pr * de(i);
    let visc = [
        0.0,
        tau[0][i],
        tau[1][i],
        u * tau[0][i] + v * tau[1][i] + heat,
    ];
    [0, 1, 2, 3].map(|c| inv[c] - visc[c])
}

fn exact_rate(x: [f64; 2], gas: &GasParams) -> [f64; 4] {
    let h = 1e-4;
    let d0 = {
        let (a, b) = (
            flux([x[0] + h, x[1]], 0, gas),
            flux([x[0] - h, x[1]], 0, gas),
        );
        [0, 1, 2, 3].map(|c| (a[c] - b[c]) / (2.0 * h))
    };
    let d1 = {
        let (a, b) = (
            flux([x[0], x[1] + h], 1, gas),
            flux([x[0], x[1] - h], 1, gas),
        );
        [0, 1, 2, 3].map(|c| (a[c] - b[c]) / (2.0 * h))
    };
    [0, 1, 2, 3].map(|c| -(d0[c] + d1[c]))
}

/// Relative L2 error of `du/dt` at volume quadrature points.
fn rhs_error(n: usize, k1d: usize, gas: &GasParams) -> f64 {
    let mut m = bisected_quad_mesh(k1d, k1d, Rect::new(-1.0, 1.0, -1.0, 1.0)).unwrap();
    m = m.apply_grading(sine_grading(0.05)).unwrap();
    m.make_periodic([2.0, 0.0]).unwrap();
    m.make_periodic([0.0, 2.0]).unwrap();
    let d = Discretization::new(ReferenceOperators::new(n).unwrap(), m).unwrap();
    let field = d.project(|x| {
        let [r, u, v, p] = primitive(x);
        primitive_to_conservative(r, u, v, p, gas).unwrap()
    });
    let s = Solver::new(
        d,
        *gas,
        &BoundaryConditions::new(),
        SchemeOptions::conservative(),
    )
    .unwrap();
    let du = s.evaluate(0.0, &field, &mut s.work()).unwrap();
    let d = &s.disc;
    let (mut num, mut den) = (0.0, 0.0);
    let mut vals = vec![[0.0; 4]; d.ops.nq];
    for k in 0..d.num_elements() {
        dense::apply(&d.ops.vq, du.element(k), &mut vals);
        let jk = d.mesh.geometry[k].j;
        for (q, got) in vals.iter().enumerate() {
            let want = exact_rate(d.volume_points[k * d.ops.nq + q], gas);
            let w = d.ops.w[q] * jk;
            for c in 0..4 {
                num += w * (got[c] - want[c]).powi(2);
                den += w * want[c].powi(2);
            }
        }
    }
    (num / den).sqrt()
}

#[test]
fn inviscid_rhs_converges_to_flux_divergence() {
    let gas = GasParams::air(1.0, 0.5).unwrap().inviscid();
    let (e1, e2) = (rhs_error(3, 4, &gas), rhs_error(3, 8, &gas));
    eprintln!("inviscid: {e1:.3e} -> {e2:.3e}");
    assert!(e2 < 1e-2 && e1 / e2 > 5.0, "{e1:e} {e2:e}");
}

#[test]
fn viscous_rhs_converges_to_flux_divergence() {
    let gas = GasParams::air(2.0, 0.5).unwrap();
    let (e1, e2) = (rhs_error(3, 4, &gas), rhs_error(3, 8, &gas));
    eprintln!("viscous: {e1:.3e} -> {e2:.3e}");
    assert!(e2 < 0.1 && e1 / e2 > 3.0, "{e1:e} {e2:e}");
}

/// Couette flow `u = (y, 0)`, constant pressure, with temperature balancing
/// viscous heating. `adiabatic_bottom` swaps the bottom wall for an adiabatic
/// one. Returns the relative L2 norm of `du/dt` at the projected solution.
fn couette_residual(n: usize, k1d: usize, adiabatic_bottom: bool) -> f64 {
    let gas = GasParams::air(10.0, 0.3).unwrap();
    let p0 = 1.0 / (gas.ma * gas.ma * gas.gamma);
    let e_top = p0 / (gas.gamma - 1.0);
    // (gamma mu / Pr) e'' = -mu
    let c = gas.pr / gas.gamma;
    let e = move |y: f64| {
        if adiabatic_bottom {
            e_top - 0.5 * c * (y * y - 1.0) - c * (y - 1.0)
        } else {
            e_top - 0.5 * c * (y * y - 1.0)
        }
    };
    let mut m = bisected_quad_mesh(k1d, k1d, Rect::new(-1.0, 1.0, -1.0, 1.0)).unwrap();
    m = m.apply_grading(sine_grading(0.1)).unwrap();
    m.make_periodic([2.0, 0.0]).unwrap();
    m.tag_boundaries(&[("bottom", &|x| x[1] < 0.0), ("top", &|x| x[1] > 0.0)])
        .unwrap();
    let d = Discretization::new(ReferenceOperators::new(n).unwrap(), m).unwrap();
    let t_top = e_top / gas.cv;
    let bottom = if adiabatic_bottom {
        BoundarySpec::adiabatic([-1.0, 0.0])
    } else {
        BoundarySpec::isothermal([-1.0, 0.0], t_top).unwrap()
    };
    let bcs = BoundaryConditions::new()
        .with("top", BoundarySpec::isothermal([1.0, 0.0], t_top).unwrap())
        .with("bottom", bottom);
    let field = d.project(|x| {
        let rho = p0 / ((gas.gamma - 1.0) * e(x[1]));
        primitive_to_conservative(rho, x[1], 0.0, p0, &gas).unwrap()
    });
    let s = Solver::new(d, gas, &bcs, SchemeOptions::conservative()).unwrap();
    let du = s.evaluate(0.0, &field, &mut s.work()).unwrap();
    let d = &s.disc;
    let norm = |f: &esdg::discretization::SolutionField| {
        let mut vals = vec![[0.0; 4]; d.ops.nq];
        let mut acc = 0.0;
        for k in 0..d.num_elements() {
            dense::apply(&d.ops.vq, f.element(k), &mut vals);
            let jk = d.mesh.geometry[k].j;
            for (q, v) in vals.iter().enumerate() {
                acc += d.ops.w[q] * jk * v.iter().map(|x| x * x).sum::<f64>();
            }
        }
        acc.sqrt()
    };
    norm(&du) / norm(&field)
}

#[test]
fn couette_flow_is_steady_under_refinement() {
    for adiabatic in [false, true] {
        let (e1, e2) = (
            couette_residual(3, 4, adiabatic),
            couette_residual(3, 8, adiabatic),
        );
        eprintln!("couette adiabatic={adiabatic}: {e1:.3e} -> {e2:.3e}");
        assert!(e1 / e2 > 3.0, "{e1:e} {e2:e}");
    }
}
