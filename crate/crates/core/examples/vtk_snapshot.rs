//! Writes a legacy VTK snapshot of a smooth field on a small mesh.

use std::f64::consts::PI;

use esdg::cli::vtk;
use esdg::discretization::Discretization;
use esdg::mesh::{bisected_quad_mesh, Rect};
use esdg::physics::{self, GasParams};
use esdg::reference::ReferenceOperators;

fn main() -> esdg::Result<()> {
    let gas = GasParams::air(100.0, 0.3)?;
    let m = bisected_quad_mesh(4, 4, Rect::new(-1.0, 1.0, -1.0, 1.0))?;
    let disc = Discretization::new(ReferenceOperators::new(3)?, m)?;
    let field = disc.project(|x| {
        let rho = 1.0 + 0.3 * (PI * x[0]).sin() * (PI * x[1]).cos();
        physics::primitive_to_conservative(rho, 0.2, -0.1, 1.0, &gas).expect("admissible")
    });
    let path = std::env::temp_dir().join("esdg_snapshot.vtk");
    vtk::write_snapshot(&path, &disc, &field, &gas, 0.0)?;
    let text = std::fs::read_to_string(&path)?;
    for line in text
        .lines()
        .filter(|l| l.starts_with("POINTS") || l.starts_with("CELLS") || l.starts_with("SCALARS"))
    {
        println!("{line}");
    }
    println!("written to {}", path.display());
    Ok(())
}
