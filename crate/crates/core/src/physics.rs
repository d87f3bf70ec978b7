//! Pointwise gas-dynamics kernels in nondimensional form.
//!
//! States are `[rho, rho u1, rho u2, E]`. Entropy variables are the
//! gradient of `S = -rho s` with `s = ln(p / rho^gamma)`, so
//! `v = (e (gamma + 1 - s) - E/rho, u1, u2, -1) / e` in terms of the
//! specific internal energy `e`.

use crate::dense::Row;
use crate::error::{Error, Result};

pub type StateVec = Row;
pub type EntropyVec = Row;

/// Nondimensional physical constants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GasParams {
    pub gamma: f64,
    pub re: f64,
    pub ma: f64,
    pub pr: f64,
    pub mu: f64,
    pub lambda: f64,
    pub cv: f64,
    pub kappa: f64,
}

impl GasParams {
    /// Constant dimensionless viscosity `mu* = 1`, Stokes bulk viscosity.
    pub fn new(gamma: f64, re: f64, ma: f64, pr: f64) -> Result<Self> {
        if !(gamma > 1.0 && re > 0.0 && ma > 0.0 && pr > 0.0) {
            return Err(Error::Config(format!(
                "gas parameters out of range: gamma={gamma} Re={re} Ma={ma} Pr={pr}"
            )));
        }
        let mu = 1.0 / re;
        let cv = 1.0 / (gamma * (gamma - 1.0) * ma * ma);
        Ok(Self {
            gamma,
            re,
            ma,
            pr,
            mu,
            lambda: 2.0 / 3.0 * mu,
            cv,
            kappa: gamma * cv * mu / pr,
        })
    }

    /// Air defaults: gamma = 1.4, Pr = 0.72.
    pub fn air(re: f64, ma: f64) -> Result<Self> {
        Self::new(1.4, re, ma, 0.72)
    }

    /// Same constants with all transport coefficients set to zero.
    pub fn inviscid(mut self) -> Self {
        self.mu = 0.0;
        self.lambda = 0.0;
        self.kappa = 0.0;
        self
    }

    /// Overrides the bulk viscosity coefficient used in the viscous blocks.
    pub fn with_lambda(mut self, lambda: f64) -> Self {
        self.lambda = lambda;
        self
    }

    pub fn is_viscous(&self) -> bool {
        self.mu > 0.0 || self.kappa > 0.0
    }
}

fn inadmissible(u: &StateVec) -> Error {
    Error::Inadmissible(format!(
        "rho = {:e}, rho*e = {:e}",
        u[0],
        internal_energy_density(u)
    ))
}

#[inline]
pub fn internal_energy_density(u: &StateVec) -> f64 {
    u[3] - 0.5 * (u[1] * u[1] + u[2] * u[2]) / u[0]
}

#[inline]
pub fn is_admissible(u: &StateVec) -> bool {
    u[0] > 0.0 && internal_energy_density(u) > 0.0 && u.iter().all(|x| x.is_finite())
}

pub fn check_admissible(u: &StateVec) -> Result<()> {
    if is_admissible(u) {
        Ok(())
    } else {
        Err(inadmissible(u))
    }
}

#[inline]
pub fn pressure(u: &StateVec, gas: &GasParams) -> f64 {
    (gas.gamma - 1.0) * internal_energy_density(u)
}

pub fn primitive_to_conservative(
    rho: f64,
    u1: f64,
    u2: f64,
    p: f64,
    gas: &GasParams,
) -> Result<StateVec> {
    if !(rho > 0.0 && p > 0.0) {
        return Err(Error::Inadmissible(format!("rho = {rho}, p = {p}")));
    }
    Ok([
        rho,
        rho * u1,
        rho * u2,
        p / (gas.gamma - 1.0) + 0.5 * rho * (u1 * u1 + u2 * u2),
    ])
}

/// `(rho, u1, u2, p)`
pub fn conservative_to_primitive(u: &StateVec, gas: &GasParams) -> Result<[f64; 4]> {
    check_admissible(u)?;
    Ok([u[0], u[1] / u[0], u[2] / u[0], pressure(u, gas)])
}

pub fn entropy_vars(u: &StateVec, gas: &GasParams) -> Result<EntropyVec> {
    check_admissible(u)?;
    let rho_e = internal_energy_density(u);
    let p = (gas.gamma - 1.0) * rho_e;
    let s = (p / u[0].powf(gas.gamma)).ln();
    Ok([
        (rho_e * (gas.gamma + 1.0 - s) - u[3]) / rho_e,
        u[1] / rho_e,
        u[2] / rho_e,
        -u[0] / rho_e,
    ])
}

pub fn conservative_from_entropy(v: &EntropyVec, gas: &GasParams) -> Result<StateVec> {
    if !(v[3] < 0.0) || !v.iter().all(|x| x.is_finite()) {
        return Err(Error::Inadmissible(format!(
            "v4 = {:e} must be negative",
            v[3]
        )));
    }
    let g = gas.gamma;
    let vsq = v[1] * v[1] + v[2] * v[2];
    let s = g - v[0] + vsq / (2.0 * v[3]);
    let rho_e = ((g - 1.0) / (-v[3]).powf(g)).powf(1.0 / (g - 1.0)) * (-s / (g - 1.0)).exp();
    Ok([
        -rho_e * v[3],
        rho_e * v[1],
        rho_e * v[2],
        rho_e * (1.0 - vsq / (2.0 * v[3])),
    ])
}

pub fn inviscid_flux(u: &StateVec, gas: &GasParams) -> Result<[StateVec; 2]> {
    check_admissible(u)?;
    Ok(inviscid_flux_unchecked(u, gas))
}

#[inline]
pub fn inviscid_flux_unchecked(u: &StateVec, gas: &GasParams) -> [StateVec; 2] {
    let p = pressure(u, gas);
    let u1 = u[1] / u[0];
    let u2 = u[2] / u[0];
    [
        [u[1], u[1] * u1 + p, u[1] * u2, u1 * (u[3] + p)],
        [u[2], u[2] * u1, u[2] * u2 + p, u2 * (u[3] + p)],
    ]
}

/// Entropy `S = -rho s`, entropy fluxes `F_i = -rho s u_i` and potentials
/// `psi_i = (gamma - 1) rho u_i`, consistent with the entropy variables above
/// so that `F_i = v . f_i - psi_i`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntropyPotentials {
    pub s: f64,
    pub flux: [f64; 2],
    pub psi: [f64; 2],
}

pub fn entropy_and_potentials(u: &StateVec, gas: &GasParams) -> Result<EntropyPotentials> {
    check_admissible(u)?;
    let p = pressure(u, gas);
    let s = (p / u[0].powf(gas.gamma)).ln();
    Ok(EntropyPotentials {
        s: -u[0] * s,
        flux: [-s * u[1], -s * u[2]],
        psi: [(gas.gamma - 1.0) * u[1], (gas.gamma - 1.0) * u[2]],
    })
}

/// Threshold on `((a-b)/(a+b))^2` below which the series branch is used.
pub const LOG_MEAN_SERIES_THRESHOLD: f64 = 1e-4;

/// Logarithmic mean `(a - b) / (ln a - ln b)`, symmetric in its arguments.
#[inline]
pub fn log_mean(a: f64, b: f64) -> f64 {
    debug_assert!(a > 0.0 && b > 0.0);
    log_mean_with_logs(a, b, a.ln(), b.ln())
}

/// Same as [`log_mean`] with precomputed logarithms.
#[inline]
pub fn log_mean_with_logs(a: f64, b: f64, ln_a: f64, ln_b: f64) -> f64 {
    let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
    let f = (hi - lo) / (hi + lo);
    let u = f * f;
    if u < LOG_MEAN_SERIES_THRESHOLD {
        (lo + hi) / (2.0 * (1.0 + u / 3.0 + u * u / 5.0 + u * u * u / 7.0))
    } else {
        (a - b) / (ln_a - ln_b)
    }
}

pub fn checked_log_mean(a: f64, b: f64) -> Result<f64> {
    if !(a > 0.0 && b > 0.0) {
        return Err(Error::Inadmissible(format!("log mean of {a} and {b}")));
    }
    Ok(log_mean(a, b))
}

/// Per-node quantities reused by every two-point flux evaluation.
#[derive(Debug, Clone, Copy)]
pub struct FluxPoint {
    pub rho: f64,
    pub u1: f64,
    pub u2: f64,
    pub beta: f64,
    pub ln_rho: f64,
    pub ln_beta: f64,
}

impl FluxPoint {
    #[inline]
    pub fn new(u: &StateVec, gas: &GasParams) -> Self {
        let rho = u[0];
        let u1 = u[1] / rho;
        let u2 = u[2] / rho;
        let p = pressure(u, gas);
        let beta = rho / (2.0 * p);
        Self {
            rho,
            u1,
            u2,
            beta,
            ln_rho: rho.ln(),
            ln_beta: beta.ln(),
        }
    }
}

/// Entropy-conservative, kinetic-energy-preserving two-point flux in
/// both coordinate directions.
#[inline]
pub fn ec_flux_points(l: &FluxPoint, r: &FluxPoint, gamma: f64) -> [StateVec; 2] {
    let rho_ln = log_mean_with_logs(l.rho, r.rho, l.ln_rho, r.ln_rho);
    let beta_ln = log_mean_with_logs(l.beta, r.beta, l.ln_beta, r.ln_beta);
    let ua = 0.5 * (l.u1 + r.u1);
    let va = 0.5 * (l.u2 + r.u2);
    let rho_avg = 0.5 * (l.rho + r.rho);
    let beta_avg = 0.5 * (l.beta + r.beta);
    let p_hat = rho_avg / (2.0 * beta_avg);
    let vsq_avg = 0.5 * (l.u1 * l.u1 + r.u1 * r.u1) + 0.5 * (l.u2 * l.u2 + r.u2 * r.u2);
    let h = 1.0 / (2.0 * (gamma - 1.0) * beta_ln) - 0.5 * vsq_avg;

    let f1 = rho_ln * ua;
    let f2 = f1 * ua + p_hat;
    let f3 = f1 * va;
    let f4 = h * f1 + ua * f2 + va * f3;

    let g1 = rho_ln * va;
    let g2 = g1 * ua;
    let g3 = g1 * va + p_hat;
    let g4 = h * g1 + ua * g2 + va * g3;
    [[f1, f2, f3, f4], [g1, g2, g3, g4]]
}

pub fn ec_flux(ul: &StateVec, ur: &StateVec, gas: &GasParams) -> Result<[StateVec; 2]> {
    check_admissible(ul)?;
    check_admissible(ur)?;
    Ok(ec_flux_points(
        &FluxPoint::new(ul, gas),
        &FluxPoint::new(ur, gas),
        gas.gamma,
    ))
}

/// Symmetrized viscous coefficient blocks `K_11, K_12, K_21, K_22`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ViscousBlocks {
    pub k11: [[f64; 4]; 4],
    pub k12: [[f64; 4]; 4],
    pub k21: [[f64; 4]; 4],
    pub k22: [[f64; 4]; 4],
}

impl ViscousBlocks {
    pub fn block(&self, i: usize, j: usize) -> &[[f64; 4]; 4] {
        match (i, j) {
            (0, 0) => &self.k11,
            (0, 1) => &self.k12,
            (1, 0) => &self.k21,
            (1, 1) => &self.k22,
            _ => panic!("2D viscous blocks are indexed by 0 or 1"),
        }
    }

    /// Assembled symmetric 8x8 matrix `[[K11, K12], [K21, K22]]`.
    pub fn assembled(&self) -> [[f64; 8]; 8] {
        let mut k = [[0.0; 8]; 8];
        for bi in 0..2 {
            for bj in 0..2 {
                let b = self.block(bi, bj);
                for r in 0..4 {
                    for c in 0..4 {
                        k[4 * bi + r][4 * bj + c] = b[r][c];
                    }
                }
            }
        }
        k
    }

    /// `sigma_i = sum_j K_ij theta_j`
    #[inline]
    pub fn apply(&self, theta: &[Row; 2]) -> [Row; 2] {
        let mut out = [[0.0; 4]; 2];
        for (i, o) in out.iter_mut().enumerate() {
            for (j, th) in theta.iter().enumerate() {
                let b = self.block(i, j);
                for r in 1..4 {
                    o[r] += b[r][1] * th[1] + b[r][2] * th[2] + b[r][3] * th[3];
                }
            }
        }
        out
    }
}

pub fn viscous_k(v: &EntropyVec, gas: &GasParams) -> Result<ViscousBlocks> {
    if !(v[3] < 0.0) {
        return Err(Error::Inadmissible(format!(
            "v4 = {:e} must be negative",
            v[3]
        )));
    }
    Ok(viscous_k_unchecked(v, gas))
}

#[inline]
pub fn viscous_k_unchecked(v: &EntropyVec, gas: &GasParams) -> ViscousBlocks {
    let (v2, v3, v4) = (v[1], v[2], v[3]);
    let mu = gas.mu;
    let lam = gas.lambda;
    let l2m = lam + 2.0 * mu;
    let heat = gas.gamma * mu / gas.pr;
    let s = 1.0 / (v4 * v4 * v4);
    let v4sq = v4 * v4;
    let k11 = [
        [0.0; 4],
        [0.0, -l2m * v4sq * s, 0.0, l2m * v2 * v4 * s],
        [0.0, 0.0, -mu * v4sq * s, mu * v3 * v4 * s],
        [
            0.0,
            l2m * v2 * v4 * s,
            mu * v3 * v4 * s,
            -(l2m * v2 * v2 + mu * v3 * v3 - heat * v4) * s,
        ],
    ];
    let k12 = [
        [0.0; 4],
        [0.0, 0.0, -lam * v4sq * s, lam * v3 * v4 * s],
        [0.0, -mu * v4sq * s, 0.0, mu * v2 * v4 * s],
        [
            0.0,
            mu * v3 * v4 * s,
            lam * v2 * v4 * s,
            -(lam + mu) * v2 * v3 * s,
        ],
    ];
    let k21 = [
        [0.0; 4],
        [0.0, 0.0, -mu * v4sq * s, mu * v3 * v4 * s],
        [0.0, -lam * v4sq * s, 0.0, lam * v2 * v4 * s],
        [
            0.0,
            lam * v3 * v4 * s,
            mu * v2 * v4 * s,
            -(lam + mu) * v2 * v3 * s,
        ],
    ];
    let k22 = [
        [0.0; 4],
        [0.0, -mu * v4sq * s, 0.0, mu * v2 * v4 * s],
        [0.0, 0.0, -l2m * v4sq * s, l2m * v3 * v4 * s],
        [
            0.0,
            mu * v2 * v4 * s,
            l2m * v3 * v4 * s,
            -(l2m * v3 * v3 + mu * v2 * v2 - heat * v4) * s,
        ],
    ];
    ViscousBlocks { k11, k12, k21, k22 }
}

#[inline]
pub fn sound_speed(u: &StateVec, gas: &GasParams) -> f64 {
    (gas.gamma * pressure(u, gas) / u[0]).sqrt()
}

/// Largest of `|u . n| + c` over the two states.
pub fn max_wavespeed(ul: &StateVec, ur: &StateVec, n: [f64; 2], gas: &GasParams) -> Result<f64> {
    check_admissible(ul)?;
    check_admissible(ur)?;
    Ok(max_wavespeed_unchecked(ul, ur, n, gas))
}

#[inline]
pub fn max_wavespeed_unchecked(ul: &StateVec, ur: &StateVec, n: [f64; 2], gas: &GasParams) -> f64 {
    let one = |u: &StateVec| ((u[1] * n[0] + u[2] * n[1]) / u[0]).abs() + sound_speed(u, gas);
    one(ul).max(one(ur))
}
