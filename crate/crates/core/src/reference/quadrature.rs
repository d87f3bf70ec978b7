//! Volume and face quadrature on the bi-unit right triangle
//! with vertices (-1,-1), (1,-1), (-1,1).

use super::jacobi::{gauss_jacobi, gauss_legendre};
use crate::error::{Error, Result};

/// Points and positive weights of a quadrature rule on the reference element.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    pub points: Vec<[f64; 2]>,
    pub weights: Vec<f64>,
    pub exactness_degree: usize,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn integrate(&self, f: impl Fn(f64, f64) -> f64) -> f64 {
        crate::dense::compensated_sum(
            self.points
                .iter()
                .zip(&self.weights)
                .map(|(p, w)| w * f(p[0], p[1])),
        )
    }
}

/// Largest degree for which rules are generated.
pub const MAX_DEGREE: usize = 20;

/// Collapsed-coordinate (Duffy) rule: Gauss-Legendre in the collapsed
/// direction times Gauss-Jacobi(1,0) in the vertical one, exact to degree 2N+1.
pub fn build_volume_quadrature(n: usize) -> Result<QuadratureRule> {
    if n < 1 {
        return Err(Error::InvalidDegree(n));
    }
    if n > MAX_DEGREE {
        return Err(Error::UnsupportedDegree(n));
    }
    let npts = n + 1;
    let (a, wa) = gauss_legendre(npts);
    let (b, wb) = gauss_jacobi(npts, 1.0, 0.0);
    let mut points = Vec::with_capacity(npts * npts);
    let mut weights = Vec::with_capacity(npts * npts);
    for (bj, wbj) in b.iter().zip(&wb) {
        for (ai, wai) in a.iter().zip(&wa) {
            let r = 0.5 * (1.0 + ai) * (1.0 - bj) - 1.0;
            points.push([r, *bj]);
            weights.push(0.5 * wai * wbj);
        }
    }
    Ok(QuadratureRule {
        points,
        weights,
        exactness_degree: 2 * npts - 1,
    })
}

/// Number of Gauss points per face for degree `n`.
pub fn face_points_per_face(n: usize) -> usize {
    (2 * n + 1).div_ceil(2)
}

/// Gauss-Legendre nodes on [-1,1] in ascending order, shared by every face.
pub fn face_nodes_1d(n: usize) -> (Vec<f64>, Vec<f64>) {
    gauss_legendre(face_points_per_face(n))
}

/// Maps a face parameter `t in [-1,1]` on reference face `face` to a point.
///
/// Faces are numbered counterclockwise: 0 bottom, 1 hypotenuse, 2 left,
/// each traversed from its first vertex to its second.
pub fn face_point(face: usize, t: f64) -> [f64; 2] {
    match face {
        0 => [t, -1.0],
        1 => [-t, t],
        2 => [-1.0, -t],
        _ => panic!("reference triangle has 3 faces"),
    }
}

/// Stacked face rule: the 1D Gauss rule replicated on the three faces.
/// Weights are the 1D parameter weights (each face sums to 2).
pub fn build_face_quadrature(n: usize) -> Result<QuadratureRule> {
    if n < 1 {
        return Err(Error::InvalidDegree(n));
    }
    if n > MAX_DEGREE {
        return Err(Error::UnsupportedDegree(n));
    }
    let (t, w) = face_nodes_1d(n);
    let mut points = Vec::with_capacity(3 * t.len());
    let mut weights = Vec::with_capacity(3 * t.len());
    for face in 0..3 {
        for (ti, wi) in t.iter().zip(&w) {
            points.push(face_point(face, *ti));
            weights.push(*wi);
        }
    }
    Ok(QuadratureRule {
        points,
        weights,
        exactness_degree: 2 * face_points_per_face(n) - 1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn volume_weights_sum_to_area() {
        for n in 1..=8 {
            let q = build_volume_quadrature(n).unwrap();
            let s: f64 = q.weights.iter().sum();
            assert!((s - 2.0).abs() < 2e-13);
            assert!(q.weights.iter().all(|&w| w > 0.0));
            assert!(q.exactness_degree >= 2 * n);
            for p in &q.points {
                assert!(p[0] >= -1.0 && p[1] >= -1.0 && p[0] + p[1] <= 1e-15);
            }
        }
    }

    #[test]
    fn first_moment() {
        let q = build_volume_quadrature(2).unwrap();
        assert!((q.integrate(|x, _| x) + 2.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn face_rule_layout() {
        for n in 1..=6 {
            let q = build_face_quadrature(n).unwrap();
            assert_eq!(q.len(), 3 * (2 * n + 1).div_ceil(2));
            let nfp = q.len() / 3;
            for f in 0..3 {
                let s: f64 = q.weights[f * nfp..(f + 1) * nfp].iter().sum();
                assert!((s - 2.0).abs() < 1e-14);
            }
            // int_{-1}^{1} t^2 dt = 2/3 along the bottom face
            let s: f64 = (0..nfp)
                .map(|i| q.weights[i] * q.points[i][0].powi(2))
                .sum();
            assert!((s - 2.0 / 3.0).abs() < 1e-14);
        }
    }

    #[test]
    fn degree_zero_rejected() {
        assert!(matches!(
            build_volume_quadrature(0),
            Err(Error::InvalidDegree(0))
        ));
        assert!(matches!(
            build_face_quadrature(0),
            Err(Error::InvalidDegree(0))
        ));
    }
}
