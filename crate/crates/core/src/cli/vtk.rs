//! Legacy VTK (ASCII) snapshots on a degree-N sub-triangulation.

use std::fmt::Write as _;
use std::path::Path;

use crate::dense::{self, NVAR};
use crate::discretization::{Discretization, SolutionField};
use crate::error::Result;
use crate::physics::{self, GasParams};
use crate::reference::basis::equispaced_nodes;

/// Local sub-triangles of the equispaced degree-`n` nodes.
pub fn sub_triangles(n: usize) -> Vec<[usize; 3]> {
    let row_start = |j: usize| (0..j).map(|r| n + 1 - r).sum::<usize>();
    let id = |i: usize, j: usize| row_start(j) + i;
    let mut out = Vec::with_capacity(n * n);
    for j in 0..n {
        for i in 0..(n - j) {
            out.push([id(i, j), id(i + 1, j), id(i, j + 1)]);
            if i + 1 < n - j {
                out.push([id(i + 1, j), id(i + 1, j + 1), id(i, j + 1)]);
            }
        }
    }
    out
}

type PointField<'a> = &'a dyn Fn(&[f64; 4]) -> f64;

pub fn format_snapshot(
    disc: &Discretization,
    field: &SolutionField,
    gas: &GasParams,
    time: f64,
) -> String {
    let n = disc.ops.degree;
    let nodes = equispaced_nodes(n);
    let interp = disc.ops.basis.evaluate(&nodes).values;
    let tris = sub_triangles(n);
    let nn = nodes.len();
    let nk = disc.num_elements();

    let mut points = Vec::with_capacity(nk * nn);
    let mut states = Vec::with_capacity(nk * nn);
    let mut vals = vec![[0.0; NVAR]; nn];
    for k in 0..nk {
        dense::apply(&interp, field.element(k), &mut vals);
        for (p, u) in nodes.iter().zip(&vals) {
            points.push(disc.mesh.map_point(k, p[0], p[1]));
            states.push(*u);
        }
    }

    let mut s = String::new();
    let _ = writeln!(s, "# vtk DataFile Version 3.0");
    let _ = writeln!(s, "esdg snapshot t = {time:.16e}");
    let _ = writeln!(s, "ASCII\nDATASET UNSTRUCTURED_GRID");
    let _ = writeln!(s, "POINTS {} double", points.len());
    for p in &points {
        let _ = writeln!(s, "{:.16e} {:.16e} 0", p[0], p[1]);
    }
    let ncells = nk * tris.len();
    let _ = writeln!(s, "CELLS {} {}", ncells, 4 * ncells);
    for k in 0..nk {
        for t in &tris {
            let o = k * nn;
            let _ = writeln!(s, "3 {} {} {}", o + t[0], o + t[1], o + t[2]);
        }
    }
    let _ = writeln!(s, "CELL_TYPES {ncells}");
    for _ in 0..ncells {
        let _ = writeln!(s, "5");
    }
    let _ = writeln!(s, "POINT_DATA {}", points.len());
    let fields: [(&str, PointField); 6] = [
        ("rho", &|u| u[0]),
        ("u1", &|u| u[1] / u[0]),
        ("u2", &|u| u[2] / u[0]),
        ("p", &|u| physics::pressure(u, gas)),
        ("speed2", &|u| (u[1] * u[1] + u[2] * u[2]) / (u[0] * u[0])),
        ("S", &|u| {
            -u[0] * (physics::pressure(u, gas) / u[0].powf(gas.gamma)).ln()
        }),
    ];
    for (name, f) in fields {
        let _ = writeln!(s, "SCALARS {name} double 1\nLOOKUP_TABLE default");
        for u in &states {
            let _ = writeln!(s, "{:.16e}", f(u));
        }
    }
    s
}

pub fn write_snapshot(
    path: &Path,
    disc: &Discretization,
    field: &SolutionField,
    gas: &GasParams,
    time: f64,
) -> Result<()> {
    std::fs::write(path, format_snapshot(disc, field, gas, time))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{bisected_quad_mesh, Rect};
    use crate::reference::ReferenceOperators;

    #[test]
    fn two_linear_elements() {
        let m = bisected_quad_mesh(1, 1, Rect::new(0.0, 1.0, 0.0, 1.0)).unwrap();
        let d = Discretization::new(ReferenceOperators::new(1).unwrap(), m).unwrap();
        let gas = GasParams::air(10.0, 0.5).unwrap();
        let u0 = physics::primitive_to_conservative(1.3, 0.2, 0.1, 2.0, &gas).unwrap();
        let f = d.project(|_| u0);
        let s = format_snapshot(&d, &f, &gas, 0.0);
        assert!(s.contains("POINTS 6 double"));
        assert!(s.contains("CELLS 2 8"));
        let rho: Vec<f64> = s
            .split("SCALARS rho double 1\nLOOKUP_TABLE default\n")
            .nth(1)
            .unwrap()
            .lines()
            .take(6)
            .map(|l| l.parse().unwrap())
            .collect();
        assert!(rho.iter().all(|r| (r - 1.3).abs() < 1e-13));
    }

    #[test]
    fn sub_triangulation_counts() {
        for n in 1..=5 {
            let t = sub_triangles(n);
            assert_eq!(t.len(), n * n);
            let np = (n + 1) * (n + 2) / 2;
            assert!(t.iter().flatten().all(|&i| i < np));
        }
    }
}
