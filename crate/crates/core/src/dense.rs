//! Small dense kernels acting on blocks of 4-component states.
//!
//! Per-element data is stored node-major as `[f64; NVAR]` rows, so every
//! operator application is a matrix times an `n x 4` block.

use nalgebra::DMatrix;

pub const NVAR: usize = 4;

pub type Row = [f64; NVAR];

/// Neumaier-compensated sum.
pub fn compensated_sum<I: IntoIterator<Item = f64>>(terms: I) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for t in terms {
        let s = sum + t;
        if sum.abs() >= t.abs() {
            comp += (sum - s) + t;
        } else {
            comp += (t - s) + sum;
        }
        sum = s;
    }
    sum + comp
}

/// `out = m * x`
pub fn apply(m: &DMatrix<f64>, x: &[Row], out: &mut [Row]) {
    let (nr, nc) = m.shape();
    debug_assert_eq!(x.len(), nc);
    debug_assert_eq!(out.len(), nr);
    out.iter_mut().for_each(|r| *r = [0.0; NVAR]);
    apply_add(m, 1.0, x, out);
}

/// `out += alpha * m * x`
pub fn apply_add(m: &DMatrix<f64>, alpha: f64, x: &[Row], out: &mut [Row]) {
    let nr = m.nrows();
    let data = m.as_slice();
    // high modes first, so small trailing coefficients are not lost against
    // the leading ones
    for (j, xj) in x.iter().enumerate().rev() {
        let col = &data[j * nr..(j + 1) * nr];
        for (o, &mij) in out.iter_mut().zip(col) {
            let a = alpha * mij;
            if a != 0.0 {
                for c in 0..NVAR {
                    o[c] += a * xj[c];
                }
            }
        }
    }
}

/// `out = p * x` for a projection `p` with `p * 1 = ones`, evaluated as
/// `p * (x - x0) + ones x0` so that constant data maps to `ones x0` exactly
/// and nearly constant data keeps its small variations.
pub fn project_shifted(
    p: &DMatrix<f64>,
    ones: &[f64],
    x: &[Row],
    out: &mut [Row],
    scratch: &mut [Row],
) {
    let x0 = x[0];
    for (s, xi) in scratch.iter_mut().zip(x) {
        *s = [0, 1, 2, 3].map(|c| xi[c] - x0[c]);
    }
    apply(p, &scratch[..x.len()], out);
    for (o, &w) in out.iter_mut().zip(ones) {
        if w != 0.0 {
            for c in 0..NVAR {
                o[c] += w * x0[c];
            }
        }
    }
}

/// `out += alpha * m^T * x`
pub fn apply_t_add(m: &DMatrix<f64>, alpha: f64, x: &[Row], out: &mut [Row]) {
    let nr = m.nrows();
    let data = m.as_slice();
    debug_assert_eq!(x.len(), nr);
    for (j, o) in out.iter_mut().enumerate() {
        let col = &data[j * nr..(j + 1) * nr];
        let mut acc = [0.0; NVAR];
        for (xi, &mij) in x.iter().zip(col) {
            for c in 0..NVAR {
                acc[c] += mij * xi[c];
            }
        }
        for c in 0..NVAR {
            o[c] += alpha * acc[c];
        }
    }
}

/// `out = m^T * x`
pub fn apply_t(m: &DMatrix<f64>, x: &[Row], out: &mut [Row]) {
    out.iter_mut().for_each(|r| *r = [0.0; NVAR]);
    apply_t_add(m, 1.0, x, out);
}

#[inline]
pub fn dot(a: &Row, b: &Row) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2] + a[3] * b[3]
}

/// Frobenius-style inner product of two blocks.
pub fn block_dot(a: &[Row], b: &[Row]) -> f64 {
    a.iter().zip(b).map(|(x, y)| dot(x, y)).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn apply_matches_nalgebra() {
        let m = DMatrix::from_fn(3, 2, |i, j| (i * 2 + j) as f64 + 0.5);
        let x = vec![[1.0, 2.0, 3.0, 4.0], [-1.0, 0.5, 0.0, 2.0]];
        let mut out = vec![[0.0; 4]; 3];
        apply(&m, &x, &mut out);
        for c in 0..4 {
            let xc = nalgebra::DVector::from_iterator(2, x.iter().map(|r| r[c]));
            let y = &m * xc;
            for i in 0..3 {
                assert!((y[i] - out[i][c]).abs() < 1e-14);
            }
        }
        let mut back = vec![[0.0; 4]; 2];
        apply_t(&m, &out, &mut back);
        let mtm = m.transpose() * &m;
        for c in 0..4 {
            let xc = nalgebra::DVector::from_iterator(2, x.iter().map(|r| r[c]));
            let y = &mtm * xc;
            for i in 0..2 {
                assert!((y[i] - back[i][c]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn compensated_sum_recovers_small_terms() {
        let terms = [1.0, 1e-16, 1e-16, -1.0];
        assert_eq!(compensated_sum(terms), 2e-16);
    }
}
