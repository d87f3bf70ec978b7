//! Orthonormal Jacobi polynomials and Gauss-Jacobi rules on [-1, 1].

use nalgebra::{DMatrix, SymmetricEigen};

fn gamma_int(n: f64) -> f64 {
    // Gamma(n) for positive integer n
    let mut g = 1.0;
    let mut k = 2.0;
    while k < n - 0.5 {
        g *= k;
        k += 1.0;
    }
    g
}

fn weight_mass(alpha: f64, beta: f64) -> f64 {
    2f64.powf(alpha + beta + 1.0) / (alpha + beta + 1.0)
        * gamma_int(alpha + 1.0)
        * gamma_int(beta + 1.0)
        / gamma_int(alpha + beta + 1.0)
}

/// Values of the orthonormal Jacobi polynomials `p_0..=p_n` at `x`
/// (orthonormal for the weight `(1-x)^alpha (1+x)^beta`).
pub fn jacobi_all(x: f64, alpha: f64, beta: f64, n: usize) -> Vec<f64> {
    let mut p = Vec::with_capacity(n + 1);
    let gamma0 = weight_mass(alpha, beta);
    p.push(1.0 / gamma0.sqrt());
    if n == 0 {
        return p;
    }
    let gamma1 = (alpha + 1.0) * (beta + 1.0) / (alpha + beta + 3.0) * gamma0;
    p.push(((alpha + beta + 2.0) * x / 2.0 + (alpha - beta) / 2.0) / gamma1.sqrt());
    let mut aold =
        2.0 / (2.0 + alpha + beta) * ((alpha + 1.0) * (beta + 1.0) / (alpha + beta + 3.0)).sqrt();
    for i in 1..n {
        let fi = i as f64;
        let h1 = 2.0 * fi + alpha + beta;
        let anew = 2.0 / (h1 + 2.0)
            * ((fi + 1.0) * (fi + 1.0 + alpha + beta) * (fi + 1.0 + alpha) * (fi + 1.0 + beta)
                / (h1 + 1.0)
                / (h1 + 3.0))
                .sqrt();
        let bnew = -(alpha * alpha - beta * beta) / h1 / (h1 + 2.0);
        let next = (-aold * p[i - 1] + (x - bnew) * p[i]) / anew;
        p.push(next);
        aold = anew;
    }
    p
}

/// Orthonormal Jacobi polynomial `p_n^{(alpha,beta)}(x)`.
pub fn jacobi(x: f64, alpha: f64, beta: f64, n: usize) -> f64 {
    jacobi_all(x, alpha, beta, n)[n]
}

/// Derivative of the orthonormal Jacobi polynomial.
pub fn jacobi_deriv(x: f64, alpha: f64, beta: f64, n: usize) -> f64 {
    if n == 0 {
        return 0.0;
    }
    let nf = n as f64;
    (nf * (nf + alpha + beta + 1.0)).sqrt() * jacobi(x, alpha + 1.0, beta + 1.0, n - 1)
}

/// Gauss-Jacobi rule with `npts` points for the weight `(1-x)^alpha (1+x)^beta`.
///
/// Golub-Welsch eigenvalues, polished by Newton on `p_npts`; weights are the
/// Christoffel numbers `1 / sum_k p_k(x)^2`.
pub fn gauss_jacobi(npts: usize, alpha: f64, beta: f64) -> (Vec<f64>, Vec<f64>) {
    assert!(npts >= 1);
    let n = npts;
    let mut jm = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        let fi = i as f64;
        let h = 2.0 * fi + alpha + beta;
        jm[(i, i)] = if (h + 2.0) * h == 0.0 {
            0.0
        } else {
            (beta * beta - alpha * alpha) / (h * (h + 2.0))
        };
        if i + 1 < n {
            let fi1 = fi + 1.0;
            let b = 2.0 / (h + 2.0)
                * (fi1 * (fi1 + alpha + beta) * (fi1 + alpha) * (fi1 + beta)
                    / ((h + 1.0) * (h + 3.0)))
                    .sqrt();
            jm[(i, i + 1)] = b;
            jm[(i + 1, i)] = b;
        }
    }
    let eig = SymmetricEigen::new(jm);
    let mut x: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    x.sort_by(|a, b| a.partial_cmp(b).unwrap());
    for xi in x.iter_mut() {
        for _ in 0..3 {
            let d = jacobi_deriv(*xi, alpha, beta, n);
            if d == 0.0 {
                break;
            }
            *xi -= jacobi(*xi, alpha, beta, n) / d;
        }
    }
    if alpha == beta {
        // symmetric rule: enforce exact mirror symmetry of the nodes
        for i in 0..n / 2 {
            let m = 0.5 * (x[n - 1 - i] - x[i]);
            x[i] = -m;
            x[n - 1 - i] = m;
        }
        if n % 2 == 1 {
            x[n / 2] = 0.0;
        }
    }
    let w = x
        .iter()
        .map(|&xi| {
            let p = jacobi_all(xi, alpha, beta, n - 1);
            1.0 / p.iter().map(|v| v * v).sum::<f64>()
        })
        .collect::<Vec<_>>();
    let mut w = w;
    if alpha == beta {
        for i in 0..n / 2 {
            let m = 0.5 * (w[i] + w[n - 1 - i]);
            w[i] = m;
            w[n - 1 - i] = m;
        }
    }
    (x, w)
}

/// Gauss-Legendre rule on [-1, 1].
pub fn gauss_legendre(npts: usize) -> (Vec<f64>, Vec<f64>) {
    gauss_jacobi(npts, 0.0, 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn legendre_rule_integrates_polynomials() {
        for n in 1..8 {
            let (x, w) = gauss_legendre(n);
            for deg in 0..(2 * n) {
                let approx: f64 = x
                    .iter()
                    .zip(&w)
                    .map(|(xi, wi)| wi * xi.powi(deg as i32))
                    .sum();
                let exact = if deg % 2 == 1 {
                    0.0
                } else {
                    2.0 / (deg as f64 + 1.0)
                };
                assert!((approx - exact).abs() < 1e-14, "n={n} deg={deg}");
            }
        }
    }

    #[test]
    fn jacobi_one_zero_rule() {
        // int (1-x) x^k dx on [-1,1]
        for n in 1..8 {
            let (x, w) = gauss_jacobi(n, 1.0, 0.0);
            for k in 0..(2 * n) {
                let approx: f64 = x
                    .iter()
                    .zip(&w)
                    .map(|(xi, wi)| wi * xi.powi(k as i32))
                    .sum();
                let kf = k as f64;
                let m_k = if k % 2 == 0 { 2.0 / (kf + 1.0) } else { 0.0 };
                let m_k1 = if (k + 1) % 2 == 0 {
                    2.0 / (kf + 2.0)
                } else {
                    0.0
                };
                assert!((approx - (m_k - m_k1)).abs() < 1e-14, "n={n} k={k}");
            }
        }
    }

    #[test]
    fn orthonormality() {
        let (x, w) = gauss_jacobi(10, 3.0, 0.0);
        for i in 0..6 {
            for j in 0..6 {
                let s: f64 = x
                    .iter()
                    .zip(&w)
                    .map(|(&xi, wi)| wi * jacobi(xi, 3.0, 0.0, i) * jacobi(xi, 3.0, 0.0, j))
                    .sum();
                let e = if i == j { 1.0 } else { 0.0 };
                assert!((s - e).abs() < 1e-13);
            }
        }
    }
}
