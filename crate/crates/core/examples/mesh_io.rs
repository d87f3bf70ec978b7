//! Graded periodic channel: connectivity, geometric checks and a TRIMESH2D
//! round trip.

use esdg::mesh::{self, bisected_quad_mesh, sine_grading, Rect};

fn main() -> esdg::Result<()> {
    let mut m = bisected_quad_mesh(8, 4, Rect::new(-2.0, 2.0, -1.0, 1.0))?;
    m = m.apply_grading(sine_grading(0.25))?;
    m.tag_boundaries(&[("bottom", &|x| x[1] < 0.0), ("top", &|x| x[1] > 0.0)])?;
    let pairs = m.make_periodic([4.0, 0.0])?;
    println!(
        "elements {}  vertices {}  periodic pairs {pairs}",
        m.num_elements(),
        m.vertices.len()
    );
    println!(
        "area {:.15}  watertightness {:.1e}",
        m.total_area(),
        m.watertightness()
    );
    let (jmin, jmax) = m
        .geometry
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(a, b), g| {
            (a.min(g.j), b.max(g.j))
        });
    println!(
        "J in [{jmin:.4}, {jmax:.4}]  min edge {:.4}",
        m.min_edge_length()
    );

    let dir = std::env::temp_dir().join("esdg_mesh_io");
    std::fs::create_dir_all(&dir)?;
    let path = dir.join("channel.trimesh");
    mesh::write_trimesh(&m, &path)?;
    let back = mesh::read_trimesh(&path)?;
    let moved = m
        .vertices
        .iter()
        .zip(&back.vertices)
        .map(|(a, b)| (a[0] - b[0]).abs().max((a[1] - b[1]).abs()))
        .fold(0.0, f64::max);
    println!(
        "round trip via {}: {} elements, {} boundary faces, max vertex change {moved:.1e}",
        path.display(),
        back.num_elements(),
        back.boundary_faces().len()
    );
    Ok(())
}
