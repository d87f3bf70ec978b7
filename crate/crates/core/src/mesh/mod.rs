//! Straight-sided triangular meshes: structured generators, connectivity,
//! periodic pairing, boundary tags and affine geometric factors.

mod io;

use std::collections::{HashMap, HashSet};

use crate::error::{Error, Result};
use crate::reference::operators::SCALED_NORMALS;

pub use io::{read_trimesh, write_trimesh};

/// Axis-aligned rectangle `[x0, x1] x [y0, y1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
}

impl Rect {
    pub fn new(x0: f64, x1: f64, y0: f64, y1: f64) -> Self {
        Self { x0, x1, y0, y1 }
    }

    pub fn contains(&self, p: [f64; 2]) -> bool {
        p[0] > self.x0 && p[0] < self.x1 && p[1] > self.y0 && p[1] < self.y1
    }
}

/// Constant geometric data of one affine element.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElementGeometry {
    /// Jacobian determinant of the reference-to-physical map.
    pub j: f64,
    /// Scaled geometric terms `G[i][j] = J dr_j/dx_i`.
    pub g: [[f64; 2]; 2],
    /// Outward unit normal per face.
    pub normals: [[f64; 2]; 3],
    /// Surface Jacobian per face (physical face length / 2).
    pub jf: [f64; 3],
}

/// A matched pair of boundary faces identified by a translation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeriodicPair {
    pub a: (usize, usize),
    pub b: (usize, usize),
    /// `x_b = x_a + shift` for corresponding points.
    pub shift: [f64; 2],
}

#[derive(Debug, Clone)]
pub struct MeshGeometry {
    pub vertices: Vec<[f64; 2]>,
    pub elements: Vec<[usize; 3]>,
    /// Neighbour element across each face; boundary faces point to themselves.
    pub etoe: Vec<[usize; 3]>,
    /// Neighbour's local face index; boundary faces point to themselves.
    pub etof: Vec<[usize; 3]>,
    /// Translation from this face to its neighbour's (nonzero only for periodic faces).
    pub face_shift: Vec<[[f64; 2]; 3]>,
    /// Whether the neighbour traverses the shared face in the opposite direction.
    pub face_reversed: Vec<[bool; 3]>,
    pub geometry: Vec<ElementGeometry>,
    pub tag_names: Vec<String>,
    /// Boundary tag index per face, `None` for interior or periodic faces.
    pub face_tags: Vec<[Option<usize>; 3]>,
    pub periodic_pairs: Vec<PeriodicPair>,
}

fn element_geometry(v: [[f64; 2]; 3]) -> ElementGeometry {
    let xr = 0.5 * (v[1][0] - v[0][0]);
    let yr = 0.5 * (v[1][1] - v[0][1]);
    let xs = 0.5 * (v[2][0] - v[0][0]);
    let ys = 0.5 * (v[2][1] - v[0][1]);
    let j = xr * ys - xs * yr;
    let g = [[ys, -yr], [-xs, xr]];
    let mut normals = [[0.0; 2]; 3];
    let mut jf = [0.0; 3];
    for f in 0..3 {
        let nh = SCALED_NORMALS[f];
        let n1 = g[0][0] * nh[0] + g[0][1] * nh[1];
        let n2 = g[1][0] * nh[0] + g[1][1] * nh[1];
        let len = n1.hypot(n2);
        jf[f] = len;
        normals[f] = [n1 / len, n2 / len];
    }
    ElementGeometry { j, g, normals, jf }
}

impl MeshGeometry {
    /// Builds connectivity and geometry from raw vertices and
    /// counterclockwise element triples.
    pub fn from_parts(vertices: Vec<[f64; 2]>, elements: Vec<[usize; 3]>) -> Result<Self> {
        if elements.is_empty() {
            return Err(Error::Mesh("mesh has no elements".into()));
        }
        for (k, e) in elements.iter().enumerate() {
            if e.iter().any(|&i| i >= vertices.len()) {
                return Err(Error::Mesh(format!(
                    "element {k} references a missing vertex"
                )));
            }
        }
        let nk = elements.len();
        let mut mesh = Self {
            vertices,
            elements,
            etoe: (0..nk).map(|k| [k; 3]).collect(),
            etof: vec![[0, 1, 2]; nk],
            face_shift: vec![[[0.0; 2]; 3]; nk],
            face_reversed: vec![[false; 3]; nk],
            geometry: Vec::with_capacity(nk),
            tag_names: Vec::new(),
            face_tags: vec![[None; 3]; nk],
            periodic_pairs: Vec::new(),
        };
        mesh.rebuild_geometry()?;
        mesh.connect()?;
        Ok(mesh)
    }

    fn connect(&mut self) -> Result<()> {
        let mut seen: HashMap<(usize, usize), (usize, usize)> = HashMap::new();
        let mut paired: HashSet<(usize, usize)> = HashSet::new();
        for k in 0..self.elements.len() {
            for f in 0..3 {
                let (a, b) = self.face_vertices(k, f);
                let key = (a.min(b), a.max(b));
                if paired.contains(&key) {
                    return Err(Error::Mesh(format!(
                        "face {f} of element {k} is shared by more than two elements"
                    )));
                }
                match seen.remove(&key) {
                    Some((k2, f2)) => {
                        self.etoe[k][f] = k2;
                        self.etof[k][f] = f2;
                        self.etoe[k2][f2] = k;
                        self.etof[k2][f2] = f;
                        let (a2, _) = self.face_vertices(k2, f2);
                        let reversed = a2 != a;
                        self.face_reversed[k][f] = reversed;
                        self.face_reversed[k2][f2] = reversed;
                        paired.insert(key);
                    }
                    None => {
                        seen.insert(key, (k, f));
                    }
                }
            }
        }
        Ok(())
    }

    /// Recomputes the per-element geometric factors from the vertices.
    fn rebuild_geometry(&mut self) -> Result<()> {
        self.geometry.clear();
        for k in 0..self.elements.len() {
            let g = element_geometry(self.element_vertices(k));
            if !(g.j > 0.0) || g.jf.iter().any(|&x| !(x > 0.0)) {
                return Err(Error::Mesh(format!(
                    "element {k} is degenerate or inverted (J = {:e})",
                    g.j
                )));
            }
            self.geometry.push(g);
        }
        Ok(())
    }

    pub fn num_elements(&self) -> usize {
        self.elements.len()
    }

    pub fn element_vertices(&self, k: usize) -> [[f64; 2]; 3] {
        let e = self.elements[k];
        [
            self.vertices[e[0]],
            self.vertices[e[1]],
            self.vertices[e[2]],
        ]
    }

    /// Global vertex indices of face `f`, in traversal order.
    pub fn face_vertices(&self, k: usize, f: usize) -> (usize, usize) {
        let e = self.elements[k];
        (e[f], e[(f + 1) % 3])
    }

    /// Physical point at reference coordinates `(r, s)` of element `k`.
    pub fn map_point(&self, k: usize, r: f64, s: f64) -> [f64; 2] {
        let v = self.element_vertices(k);
        let (a, b, c) = (-0.5 * (r + s), 0.5 * (1.0 + r), 0.5 * (1.0 + s));
        [
            a * v[0][0] + b * v[1][0] + c * v[2][0],
            a * v[0][1] + b * v[1][1] + c * v[2][1],
        ]
    }

    pub fn face_centroid(&self, k: usize, f: usize) -> [f64; 2] {
        let (a, b) = self.face_vertices(k, f);
        let (pa, pb) = (self.vertices[a], self.vertices[b]);
        [0.5 * (pa[0] + pb[0]), 0.5 * (pa[1] + pb[1])]
    }

    pub fn is_boundary_face(&self, k: usize, f: usize) -> bool {
        self.etoe[k][f] == k && self.etof[k][f] == f
    }

    /// All `(element, face)` pairs on the domain boundary.
    pub fn boundary_faces(&self) -> Vec<(usize, usize)> {
        (0..self.num_elements())
            .flat_map(|k| (0..3).map(move |f| (k, f)))
            .filter(|&(k, f)| self.is_boundary_face(k, f))
            .collect()
    }

    pub fn boundary_tag(&self, k: usize, f: usize) -> Option<&str> {
        self.face_tags[k][f].map(|t| self.tag_names[t].as_str())
    }

    pub fn tag_index(&self, name: &str) -> Option<usize> {
        self.tag_names.iter().position(|t| t == name)
    }

    /// Bounding box of all vertices.
    pub fn extent(&self) -> Rect {
        let mut r = Rect::new(
            f64::INFINITY,
            f64::NEG_INFINITY,
            f64::INFINITY,
            f64::NEG_INFINITY,
        );
        for p in &self.vertices {
            r.x0 = r.x0.min(p[0]);
            r.x1 = r.x1.max(p[0]);
            r.y0 = r.y0.min(p[1]);
            r.y1 = r.y1.max(p[1]);
        }
        r
    }

    pub fn total_area(&self) -> f64 {
        // reference area is 2
        crate::dense::compensated_sum(self.geometry.iter().map(|g| 2.0 * g.j))
    }

    pub fn min_edge_length(&self) -> f64 {
        self.geometry
            .iter()
            .flat_map(|g| g.jf.iter().map(|&x| 2.0 * x))
            .fold(f64::INFINITY, f64::min)
    }

    /// Applies `map` to every vertex; edges stay straight and all geometric
    /// data is rebuilt.
    pub fn apply_grading(&self, map: impl Fn([f64; 2]) -> [f64; 2]) -> Result<Self> {
        let mut out = self.clone();
        for p in out.vertices.iter_mut() {
            *p = map(*p);
        }
        out.rebuild_geometry()?;
        for i in 0..out.periodic_pairs.len() {
            let pair = out.periodic_pairs[i];
            let ca = out.face_centroid(pair.a.0, pair.a.1);
            let cb = out.face_centroid(pair.b.0, pair.b.1);
            let shift = [cb[0] - ca[0], cb[1] - ca[1]];
            out.periodic_pairs[i].shift = shift;
            out.face_shift[pair.a.0][pair.a.1] = shift;
            out.face_shift[pair.b.0][pair.b.1] = [-shift[0], -shift[1]];
        }
        Ok(out)
    }

    /// Pairs boundary faces whose centroids differ by `shift`, turning them
    /// into interior connections. Matching uses a tolerance of
    /// `1e-10 * extent`.
    pub fn make_periodic(&mut self, shift: [f64; 2]) -> Result<usize> {
        let ext = self.extent();
        let tol = 1e-10 * (ext.x1 - ext.x0).max(ext.y1 - ext.y0);
        let faces = self.boundary_faces();
        let cents: Vec<[f64; 2]> = faces
            .iter()
            .map(|&(k, f)| self.face_centroid(k, f))
            .collect();
        let mut used = vec![false; faces.len()];
        let mut count = 0;
        for i in 0..faces.len() {
            if used[i] {
                continue;
            }
            let target = [cents[i][0] + shift[0], cents[i][1] + shift[1]];
            let hit = (0..faces.len()).find(|&j| {
                j != i
                    && !used[j]
                    && (cents[j][0] - target[0]).abs() <= tol
                    && (cents[j][1] - target[1]).abs() <= tol
            });
            let Some(j) = hit else { continue };
            let (a, b) = (faces[i], faces[j]);
            // check that the faces are translates of each other
            let (a0, a1) = self.face_vertices(a.0, a.1);
            let (b0, b1) = self.face_vertices(b.0, b.1);
            let moved = |p: [f64; 2]| [p[0] + shift[0], p[1] + shift[1]];
            let close =
                |p: [f64; 2], q: [f64; 2]| (p[0] - q[0]).abs() <= tol && (p[1] - q[1]).abs() <= tol;
            let pa0 = moved(self.vertices[a0]);
            let pa1 = moved(self.vertices[a1]);
            let reversed = if close(pa0, self.vertices[b1]) && close(pa1, self.vertices[b0]) {
                true
            } else if close(pa0, self.vertices[b0]) && close(pa1, self.vertices[b1]) {
                false
            } else {
                return Err(Error::Mesh(format!(
                    "periodic faces ({}, {}) and ({}, {}) have different extents",
                    a.0, a.1, b.0, b.1
                )));
            };
            used[i] = true;
            used[j] = true;
            self.link_periodic(a, b, shift, reversed);
            count += 1;
        }
        Ok(count)
    }

    pub(crate) fn link_periodic(
        &mut self,
        a: (usize, usize),
        b: (usize, usize),
        shift: [f64; 2],
        reversed: bool,
    ) {
        self.etoe[a.0][a.1] = b.0;
        self.etof[a.0][a.1] = b.1;
        self.etoe[b.0][b.1] = a.0;
        self.etof[b.0][b.1] = a.1;
        self.face_reversed[a.0][a.1] = reversed;
        self.face_reversed[b.0][b.1] = reversed;
        self.face_shift[a.0][a.1] = shift;
        self.face_shift[b.0][b.1] = [-shift[0], -shift[1]];
        self.face_tags[a.0][a.1] = None;
        self.face_tags[b.0][b.1] = None;
        self.periodic_pairs.push(PeriodicPair { a, b, shift });
    }

    /// Assigns a tag to every boundary face by testing its centroid against
    /// the predicates. Each face must match exactly one predicate.
    pub fn tag_boundaries(
        &mut self,
        predicates: &[(&str, &dyn Fn([f64; 2]) -> bool)],
    ) -> Result<()> {
        self.tag_names = predicates.iter().map(|(n, _)| n.to_string()).collect();
        for (k, f) in self.boundary_faces() {
            let c = self.face_centroid(k, f);
            let hits: Vec<usize> = predicates
                .iter()
                .enumerate()
                .filter(|(_, (_, p))| p(c))
                .map(|(i, _)| i)
                .collect();
            match hits.as_slice() {
                [one] => self.face_tags[k][f] = Some(*one),
                [] => {
                    return Err(Error::Tagging(format!(
                        "boundary face with centroid ({}, {}) matches no tag",
                        c[0], c[1]
                    )))
                }
                _ => {
                    return Err(Error::Tagging(format!(
                        "boundary face with centroid ({}, {}) matches tags {:?}",
                        c[0],
                        c[1],
                        hits.iter().map(|&i| predicates[i].0).collect::<Vec<_>>()
                    )))
                }
            }
        }
        Ok(())
    }

    /// Errors if any boundary face lacks a tag.
    pub fn check_tagged(&self) -> Result<()> {
        for (k, f) in self.boundary_faces() {
            if self.face_tags[k][f].is_none() {
                let c = self.face_centroid(k, f);
                return Err(Error::Tagging(format!(
                    "boundary face with centroid ({}, {}) is untagged",
                    c[0], c[1]
                )));
            }
        }
        Ok(())
    }

    /// Per-element discrete divergence theorem residual
    /// `max_i |sum_f n_i Jf |face|_ref|`.
    pub fn watertightness(&self) -> f64 {
        self.geometry
            .iter()
            .map(|g| {
                let mut s = [0.0; 2];
                for f in 0..3 {
                    // reference face rule weights sum to 2
                    for (i, si) in s.iter_mut().enumerate() {
                        *si += 2.0 * g.normals[f][i] * g.jf[f];
                    }
                }
                s[0].abs().max(s[1].abs())
            })
            .fold(0.0, f64::max)
    }
}

/// `2 Kx Ky` triangles on a rectangle, each quad split along the diagonal
/// from its lower-left to its upper-right corner.
pub fn bisected_quad_mesh(kx: usize, ky: usize, domain: Rect) -> Result<MeshGeometry> {
    bisected_quad_mesh_with_holes(kx, ky, domain, &[])
}

/// Like [`bisected_quad_mesh`] but drops every quad whose center lies inside
/// one of `holes`.
pub fn bisected_quad_mesh_with_holes(
    kx: usize,
    ky: usize,
    domain: Rect,
    holes: &[Rect],
) -> Result<MeshGeometry> {
    if kx < 1 || ky < 1 {
        return Err(Error::Mesh(format!("need Kx, Ky >= 1 (got {kx}, {ky})")));
    }
    if !(domain.x1 > domain.x0 && domain.y1 > domain.y0) {
        return Err(Error::Mesh("degenerate rectangle".into()));
    }
    let hx = (domain.x1 - domain.x0) / kx as f64;
    let hy = (domain.y1 - domain.y0) / ky as f64;
    let coord = |i: usize, j: usize| {
        let x = if i == kx {
            domain.x1
        } else {
            domain.x0 + i as f64 * hx
        };
        let y = if j == ky {
            domain.y1
        } else {
            domain.y0 + j as f64 * hy
        };
        [x, y]
    };
    let mut index = vec![usize::MAX; (kx + 1) * (ky + 1)];
    let mut vertices = Vec::new();
    let mut elements = Vec::new();
    let mut vid = |i: usize, j: usize, vertices: &mut Vec<[f64; 2]>| {
        let slot = &mut index[j * (kx + 1) + i];
        if *slot == usize::MAX {
            *slot = vertices.len();
            vertices.push(coord(i, j));
        }
        *slot
    };
    for j in 0..ky {
        for i in 0..kx {
            let c = [
                domain.x0 + (i as f64 + 0.5) * hx,
                domain.y0 + (j as f64 + 0.5) * hy,
            ];
            if holes.iter().any(|h| h.contains(c)) {
                continue;
            }
            let ll = vid(i, j, &mut vertices);
            let lr = vid(i + 1, j, &mut vertices);
            let ul = vid(i, j + 1, &mut vertices);
            let ur = vid(i + 1, j + 1, &mut vertices);
            elements.push([ll, lr, ur]);
            elements.push([ll, ur, ul]);
        }
    }
    MeshGeometry::from_parts(vertices, elements)
}

/// The vertical grading `y -> y + a sin(pi y)` used on [-1, 1] channels.
pub fn sine_grading(amplitude: f64) -> impl Fn([f64; 2]) -> [f64; 2] {
    move |p| [p[0], p[1] + amplitude * (std::f64::consts::PI * p[1]).sin()]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square() -> Rect {
        Rect::new(-1.0, 1.0, -1.0, 1.0)
    }

    #[test]
    fn unit_bisection() {
        let m = bisected_quad_mesh(1, 1, square()).unwrap();
        assert_eq!(m.num_elements(), 2);
        assert!((m.total_area() - 4.0).abs() < 1e-14);
        let m = bisected_quad_mesh(2, 1, square()).unwrap();
        assert_eq!(m.num_elements(), 4);
        for g in &m.geometry {
            assert!((2.0 * g.j - 1.0).abs() < 1e-15);
        }
        assert!(bisected_quad_mesh(1, 1, Rect::new(0.0, 0.0, 0.0, 1.0)).is_err());
        assert!(bisected_quad_mesh(0, 1, square()).is_err());
    }

    #[test]
    fn reference_element_geometry() {
        let m = MeshGeometry::from_parts(
            vec![[-1.0, -1.0], [1.0, -1.0], [-1.0, 1.0]],
            vec![[0, 1, 2]],
        )
        .unwrap();
        let g = m.geometry[0];
        assert_eq!(g.j, 1.0);
        assert_eq!(g.g, [[1.0, 0.0], [0.0, 1.0]]);
        assert_eq!(g.normals[0], [0.0, -1.0]);
        assert!((g.jf[1] - 2f64.sqrt()).abs() < 1e-15);
        // translation invariance
        let t = MeshGeometry::from_parts(vec![[2.0, 0.0], [4.0, 0.0], [2.0, 2.0]], vec![[0, 1, 2]])
            .unwrap();
        assert_eq!(t.geometry[0].j, g.j);
        assert_eq!(t.geometry[0].normals, g.normals);
    }

    #[test]
    fn legs_2h_hypotenuse() {
        let h = 0.3;
        let m = MeshGeometry::from_parts(
            vec![[0.0, 0.0], [2.0 * h, 0.0], [0.0, 2.0 * h]],
            vec![[0, 1, 2]],
        )
        .unwrap();
        assert!((m.geometry[0].jf[1] - h * 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn inverted_element_rejected() {
        let r = MeshGeometry::from_parts(vec![[0.0, 0.0], [0.0, 1.0], [1.0, 0.0]], vec![[0, 1, 2]]);
        assert!(matches!(r, Err(Error::Mesh(_))));
        let m = bisected_quad_mesh(2, 2, square()).unwrap();
        assert!(m.apply_grading(|p| [-p[0], p[1]]).is_err());
    }

    #[test]
    fn connectivity_involution_and_orientation() {
        let m = bisected_quad_mesh(3, 2, square()).unwrap();
        for k in 0..m.num_elements() {
            for f in 0..3 {
                let (k2, f2) = (m.etoe[k][f], m.etof[k][f]);
                assert_eq!((m.etoe[k2][f2], m.etof[k2][f2]), (k, f));
                if !m.is_boundary_face(k, f) {
                    assert!(m.face_reversed[k][f]);
                }
            }
        }
        assert_eq!(m.boundary_faces().len(), 2 * (3 + 2));
        assert!(m.watertightness() < 1e-14);
    }

    #[test]
    fn periodic_pairing_and_tags() {
        let m = bisected_quad_mesh(4, 2, Rect::new(-2.0, 2.0, -1.0, 1.0)).unwrap();
        let mut m = m.apply_grading(sine_grading(0.25)).unwrap();
        assert_eq!(m.make_periodic([4.0, 0.0]).unwrap(), 2);
        assert_eq!(m.boundary_faces().len(), 8);
        for p in &m.periodic_pairs {
            assert!(m.face_reversed[p.a.0][p.a.1]);
        }
        let top = |c: [f64; 2]| c[1] > 0.999;
        let bottom = |c: [f64; 2]| c[1] < -0.999;
        m.tag_boundaries(&[("top", &top), ("bottom", &bottom)])
            .unwrap();
        m.check_tagged().unwrap();
        let mut m2 = bisected_quad_mesh(2, 2, square()).unwrap();
        let err = m2.tag_boundaries(&[("top", &top)]).unwrap_err();
        assert!(matches!(err, Error::Tagging(_)));
        let any = |_: [f64; 2]| true;
        assert!(m2.tag_boundaries(&[("a", &any), ("b", &any)]).is_err());
    }

    #[test]
    fn grading_keeps_ends_and_area() {
        let m = bisected_quad_mesh(4, 4, square()).unwrap();
        let g = m.apply_grading(sine_grading(0.25)).unwrap();
        for (p, q) in m.vertices.iter().zip(&g.vertices) {
            if p[1].abs() == 1.0 {
                assert!((q[1] - p[1]).abs() < 1e-15);
            }
        }
        assert!((g.total_area() - 4.0).abs() < 1e-13);
        let same = m.apply_grading(|p| p).unwrap();
        assert_eq!(same.geometry, m.geometry);
    }

    #[test]
    fn holes_remove_quads() {
        let m = bisected_quad_mesh_with_holes(
            4,
            4,
            Rect::new(0.0, 4.0, 0.0, 4.0),
            &[Rect::new(1.0, 3.0, 1.0, 3.0)],
        )
        .unwrap();
        assert_eq!(m.num_elements(), 2 * 12);
        assert!((m.total_area() - 12.0).abs() < 1e-13);
        assert_eq!(m.boundary_faces().len(), 16 + 8);
    }
}
