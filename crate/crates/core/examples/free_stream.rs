//! A constant state on the graded periodic channel stays constant: the full
//! right-hand side (inviscid, viscous, Lax-Friedrichs, penalty) vanishes.

use esdg::boundary::BoundaryConditions;
use esdg::discretization::Discretization;
use esdg::mesh::{bisected_quad_mesh, sine_grading, Rect};
use esdg::physics::{self, GasParams};
use esdg::reference::ReferenceOperators;
use esdg::solver::{SchemeOptions, Solver};

fn main() -> esdg::Result<()> {
    let gas = GasParams::air(50.0, 0.3)?;
    let u0 = physics::primitive_to_conservative(1.3, 0.4, -0.25, 1.0 / (0.09 * 1.4), &gas)?;
    for k1d in [2, 4, 8] {
        let mut m = bisected_quad_mesh(2 * k1d, k1d, Rect::new(-2.0, 2.0, -1.0, 1.0))?;
        m = m.apply_grading(sine_grading(0.25))?;
        m.make_periodic([4.0, 0.0])?;
        m.make_periodic([0.0, 2.0])?;
        let disc = Discretization::new(ReferenceOperators::new(3)?, m)?;
        let field = disc.project(|_| u0);
        let s = Solver::new(
            disc,
            gas,
            &BoundaryConditions::new(),
            SchemeOptions::default(),
        )?;
        let du = s.evaluate(0.0, &field, &mut s.work())?;
        let max = du.as_flat().iter().fold(0.0f64, |a, x| a.max(x.abs()));
        println!(
            "K1D = {k1d}: {} elements, max |du/dt| = {max:.1e}",
            s.num_elements()
        );
    }
    Ok(())
}
