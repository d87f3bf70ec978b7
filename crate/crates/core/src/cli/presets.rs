//! Built-in cases: periodic convergence channel, lid-driven cavity, shock
//! channel with symmetry walls, a square-cylinder demo, and custom meshes.

use std::f64::consts::PI;
use std::sync::Arc;

use super::config::{Case, PenaltyMode, RunConfig, WallKind};
use crate::boundary::{BoundaryConditions, BoundaryKind, BoundarySpec};
use crate::discretization::{Discretization, SolutionField};
use crate::error::{Error, Result};
use crate::mesh::{self, MeshGeometry, Rect};
use crate::physics::{primitive_to_conservative, GasParams};
use crate::reference::ReferenceOperators;
use crate::solver::{Penalty, SchemeOptions, Solver};
use crate::timeloop::IntegratorConfig;

const EDGE: f64 = 1e-9;

/// A ready-to-run problem.
pub struct Problem {
    pub solver: Solver,
    pub initial: SolutionField,
}

pub fn gas(cfg: &RunConfig) -> Result<GasParams> {
    let g = GasParams::new(cfg.gamma, cfg.re, cfg.ma, cfg.pr)?;
    Ok(match cfg.lambda_bulk {
        Some(l) => g.with_lambda(l),
        None => g,
    })
}

pub fn scheme_options(cfg: &RunConfig) -> SchemeOptions {
    let penalty = |on: bool| match (on, cfg.penalty_mode) {
        (false, _) => Penalty::Off,
        (true, PenaltyMode::Scaled) => Penalty::Scaled(cfg.penalty_value),
        (true, PenaltyMode::Constant) => Penalty::Constant(cfg.penalty_value),
    };
    SchemeOptions {
        lax_friedrichs: cfg.lax_friedrichs,
        wavespeed: cfg.wavespeed,
        interior_penalty: penalty(cfg.interior_penalty),
        boundary_penalty: penalty(cfg.boundary_penalty),
    }
}

pub fn integrator_config(cfg: &RunConfig) -> IntegratorConfig {
    let mut c = IntegratorConfig::new(cfg.t_final).with_tolerances(cfg.abs_tol, cfg.rel_tol);
    c.dt_init = cfg.dt_init;
    if let Some(d) = cfg.dt_max {
        c.dt_max = d;
    }
    c.diagnostics_stride = cfg.diagnostics_stride;
    c
}

/// `[-2,2] x [-1,1]` with `2 K1D x K1D` bisected quads.
fn channel(k1d: usize) -> Result<MeshGeometry> {
    mesh::bisected_quad_mesh(2 * k1d, k1d, Rect::new(-2.0, 2.0, -1.0, 1.0))
}

/// Graded channel, periodic in x, walls tagged `bottom` and `top`.
pub fn converge_channel_mesh(k1d: usize) -> Result<MeshGeometry> {
    let mut m = channel(k1d)?.apply_grading(mesh::sine_grading(0.25))?;
    m.make_periodic([4.0, 0.0])?;
    m.tag_boundaries(&[
        ("bottom", &|p| p[1] < -1.0 + EDGE),
        ("top", &|p| p[1] > 1.0 - EDGE),
    ])?;
    Ok(m)
}

/// `[-1,1]^2` with `K1D x K1D` bisected quads, `lid` on top and `wall` elsewhere.
pub fn cavity_mesh(k1d: usize) -> Result<MeshGeometry> {
    let mut m = mesh::bisected_quad_mesh(k1d, k1d, Rect::new(-1.0, 1.0, -1.0, 1.0))?;
    m.tag_boundaries(&[
        ("lid", &|p| p[1] > 1.0 - EDGE),
        ("wall", &|p| p[1] <= 1.0 - EDGE),
    ])?;
    Ok(m)
}

/// Channel with `bottom` and `sides` (top, left, right) tags.
pub fn shock_channel_mesh(k1d: usize) -> Result<MeshGeometry> {
    let mut m = channel(k1d)?;
    m.tag_boundaries(&[
        ("bottom", &|p| p[1] < -1.0 + EDGE),
        ("sides", &|p| p[1] >= -1.0 + EDGE),
    ])?;
    Ok(m)
}

/// Structured mesh around the unit square `[-0.5,0.5]^2` in
/// `[-4.5,11.5] x [-4.5,4.5]`, `K1D` cells per unit length.
pub fn cylinder_mesh(k1d: usize) -> Result<MeshGeometry> {
    let domain = Rect::new(-4.5, 11.5, -4.5, 4.5);
    let hole = Rect::new(-0.5, 0.5, -0.5, 0.5);
    let mut m = mesh::bisected_quad_mesh_with_holes(16 * k1d, 9 * k1d, domain, &[hole])?;
    let inside = |p: [f64; 2]| p[0].abs() < 0.5 + EDGE && p[1].abs() < 0.5 + EDGE;
    m.tag_boundaries(&[
        ("cylinder", &inside),
        ("outflow", &|p| p[0] > 11.5 - EDGE),
        ("farfield", &|p| !inside(p) && p[0] <= 11.5 - EDGE),
    ])?;
    Ok(m)
}

/// Mesh of a configured case (reads the file for custom cases).
pub fn case_mesh(cfg: &RunConfig) -> Result<MeshGeometry> {
    match cfg.case {
        Case::ConvergeChannel => converge_channel_mesh(cfg.k1d),
        Case::Cavity => cavity_mesh(cfg.k1d),
        Case::ShockChannel => shock_channel_mesh(cfg.k1d),
        Case::CylinderDemo => cylinder_mesh(cfg.k1d),
        Case::Custom => {
            let path = cfg
                .mesh_file
                .as_ref()
                .ok_or_else(|| Error::Config("case = custom needs mesh_file".into()))?;
            mesh::read_trimesh(path)
        }
    }
}

/// `g = amplitude sin(4 pi x)`.
pub fn lid_heat_flow(amplitude: f64) -> crate::boundary::HeatFlow {
    Arc::new(move |x: [f64; 2], _t: f64| amplitude * (4.0 * PI * x[0]).sin())
}

pub fn build(cfg: &RunConfig) -> Result<Problem> {
    let gas = gas(cfg)?;
    let mesh = case_mesh(cfg)?;
    let ops = ReferenceOperators::new(cfg.n)?;
    let disc = Discretization::new(ops, mesh)?;
    let p_ref = 1.0 / (cfg.ma * cfg.ma * gas.gamma);
    let state =
        |rho: f64, u1: f64, u2: f64, p: f64| primitive_to_conservative(rho, u1, u2, p, &gas);

    let (bcs, initial) = match cfg.case {
        Case::ConvergeChannel => {
            let bcs = BoundaryConditions::new()
                .with("bottom", BoundarySpec::adiabatic([0.0; 2]))
                .with("top", BoundarySpec::adiabatic([0.0; 2]));
            let f = disc.project(|x| {
                let u1 = 0.1 * (PI * x[0] / 2.0).sin() * (PI * x[1] / 2.0).cos();
                let u2 = 0.1 * (PI * x[0] / 2.0).cos() * (PI * x[1]).sin();
                state(1.0, u1, u2, p_ref).expect("admissible initial state")
            });
            (bcs, f)
        }
        Case::Cavity => {
            let bcs = match cfg.wall {
                WallKind::Adiabatic => {
                    let lid = if cfg.heat_flow != 0.0 {
                        BoundarySpec::adiabatic_with_heat_flow(
                            [1.0, 0.0],
                            lid_heat_flow(cfg.heat_flow),
                        )
                    } else {
                        BoundarySpec::adiabatic([1.0, 0.0])
                    };
                    BoundaryConditions::new()
                        .with("lid", lid)
                        .with("wall", BoundarySpec::adiabatic([0.0; 2]))
                }
                WallKind::Isothermal => {
                    let t = cfg.t_wall.unwrap_or(1.0);
                    BoundaryConditions::new()
                        .with("lid", BoundarySpec::isothermal([1.0, 0.0], t)?)
                        .with("wall", BoundarySpec::isothermal([0.0; 2], t)?)
                }
            };
            let u0 = state(1.0, 0.0, 0.0, p_ref)?;
            (bcs, disc.project(|_| u0))
        }
        Case::ShockChannel => {
            let bcs = BoundaryConditions::new()
                .with("bottom", BoundarySpec::adiabatic([0.0; 2]))
                .with("sides", BoundarySpec::symmetry());
            let left = state(5.0, 0.0, 0.0, 5.0 * p_ref)?;
            let right = state(1.0, 0.0, 0.0, p_ref)?;
            (bcs, disc.project(|x| if x[0] < 0.0 { left } else { right }))
        }
        Case::CylinderDemo => {
            let u_inf = state(1.0, 1.0, 0.0, p_ref)?;
            let bcs = BoundaryConditions::new()
                .with("cylinder", BoundarySpec::adiabatic([0.0; 2]))
                .with("farfield", BoundarySpec::freestream(u_inf)?)
                .with("outflow", BoundarySpec::extrapolation());
            (bcs, disc.project(|_| u_inf))
        }
        Case::Custom => {
            let mut bcs = BoundaryConditions::new();
            for (tag, b) in &cfg.boundary {
                let spec = match BoundaryKind::parse(&b.kind)? {
                    BoundaryKind::InviscidWall => BoundarySpec::inviscid_wall(),
                    BoundaryKind::AdiabaticNoSlip => BoundarySpec::adiabatic(b.u_wall),
                    BoundaryKind::IsothermalNoSlip => {
                        let t = b.t_wall.ok_or_else(|| {
                            Error::Config(format!(
                                "bc.{tag}.T_wall is required for isothermal walls"
                            ))
                        })?;
                        BoundarySpec::isothermal(b.u_wall, t)?
                    }
                    BoundaryKind::Symmetry => BoundarySpec::symmetry(),
                    BoundaryKind::Freestream => {
                        let [r, u1, u2, p] = b.state.ok_or_else(|| {
                            Error::Config(format!("bc.{tag}.state is required for freestream"))
                        })?;
                        BoundarySpec::freestream(
                            state(r, u1, u2, p).map_err(|e| Error::Config(e.to_string()))?,
                        )?
                    }
                    BoundaryKind::Extrapolation => BoundarySpec::extrapolation(),
                };
                bcs.insert(tag, spec);
            }
            let [r, u1, u2, p] = cfg
                .initial
                .ok_or_else(|| Error::Config("custom case needs initial".into()))?;
            let u0 = state(r, u1, u2, p).map_err(|e| Error::Config(e.to_string()))?;
            (bcs, disc.project(|_| u0))
        }
    };
    let solver = Solver::new(disc, gas, &bcs, scheme_options(cfg))?;
    Ok(Problem { solver, initial })
}
