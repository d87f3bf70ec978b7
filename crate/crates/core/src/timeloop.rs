//! Dormand-Prince 5(4) time integration and per-step diagnostics.

use std::io::Write;

use crate::dense::Row;
use crate::discretization::SolutionField;
use crate::error::{Error, Result};
use crate::solver::{RhsDiagnostics, RhsWork, Solver};

/// Semi-discrete system `y' = f(t, y)`.
pub trait OdeSystem {
    fn rhs(&mut self, t: f64, y: &[f64], dy: &mut [f64]) -> Result<()>;
}

impl<F: FnMut(f64, &[f64], &mut [f64]) -> Result<()>> OdeSystem for F {
    fn rhs(&mut self, t: f64, y: &[f64], dy: &mut [f64]) -> Result<()> {
        self(t, y, dy)
    }
}

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [&[f64]; 7] = [
    &[],
    &[1.0 / 5.0],
    &[3.0 / 40.0, 9.0 / 40.0],
    &[44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0],
    &[
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
    ],
    &[
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
    ],
    &[
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
/// Fifth-order weights minus embedded fourth-order weights.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// Initial step; estimated from the right-hand side when `None`.
    pub dt_init: Option<f64>,
    pub dt_max: f64,
    pub t_final: f64,
    pub safety: f64,
    pub diagnostics_stride: usize,
}

impl IntegratorConfig {
    pub fn new(t_final: f64) -> Self {
        Self {
            abs_tol: 1e-7,
            rel_tol: 1e-7,
            dt_init: None,
            dt_max: t_final,
            t_final,
            safety: 0.9,
            diagnostics_stride: 1,
        }
    }

    pub fn with_tolerances(mut self, abs_tol: f64, rel_tol: f64) -> Self {
        self.abs_tol = abs_tol;
        self.rel_tol = rel_tol;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("abs_tol", self.abs_tol),
            ("rel_tol", self.rel_tol),
            ("dt_max", self.dt_max),
            ("t_final", self.t_final),
            ("safety", self.safety),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Config(format!("{name} = {v} must be positive")));
            }
        }
        if let Some(dt) = self.dt_init {
            if !(dt > 0.0) {
                return Err(Error::Config(format!("dt_init = {dt} must be positive")));
            }
        }
        if self.diagnostics_stride == 0 {
            return Err(Error::Config(
                "diagnostics_stride must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

/// Outcome of one attempted step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepOutcome {
    pub accepted: bool,
    pub error_norm: f64,
    /// Suggested next step size.
    pub dt_next: f64,
}

/// Dormand-Prince stepper with first-same-as-last stage reuse.
#[derive(Debug, Clone)]
pub struct Dp54 {
    k: [Vec<f64>; 7],
    stage: Vec<f64>,
    y_new: Vec<f64>,
    fsal_valid: bool,
    pub rhs_evaluations: usize,
}

impl Dp54 {
    pub fn new(n: usize) -> Self {
        Self {
            k: std::array::from_fn(|_| vec![0.0; n]),
            stage: vec![0.0; n],
            y_new: vec![0.0; n],
            fsal_valid: false,
            rhs_evaluations: 0,
        }
    }

    /// Discards the cached first stage (after the state is modified externally).
    pub fn reset(&mut self) {
        self.fsal_valid = false;
    }

    fn eval(
        &mut self,
        sys: &mut impl OdeSystem,
        t: f64,
        stage: usize,
        from_stage_buffer: bool,
        y: &[f64],
    ) -> Result<()> {
        self.rhs_evaluations += 1;
        let input = if from_stage_buffer { &self.stage } else { y };
        sys.rhs(t, input, &mut self.k[stage])
    }

    /// `f(t, y)` into the first stage, reusing the last stage when valid.
    fn first_stage(&mut self, sys: &mut impl OdeSystem, t: f64, y: &[f64]) -> Result<()> {
        if !self.fsal_valid {
            self.eval(sys, t, 0, false, y)?;
            self.fsal_valid = true;
        }
        Ok(())
    }

    /// Fifth-order solution after `dt` and the weighted RMS error estimate.
    /// Leaves the candidate in the internal buffer.
    fn attempt(
        &mut self,
        sys: &mut impl OdeSystem,
        t: f64,
        y: &[f64],
        dt: f64,
        cfg: &IntegratorConfig,
    ) -> Result<f64> {
        self.first_stage(sys, t, y)?;
        for s in 1..7 {
            for (i, st) in self.stage.iter_mut().enumerate() {
                let mut acc = 0.0;
                for (j, a) in A[s].iter().enumerate() {
                    acc += a * self.k[j][i];
                }
                *st = y[i] + dt * acc;
            }
            self.eval(sys, t + C[s] * dt, s, true, y)?;
        }
        // stage 7 was evaluated at the fifth-order solution
        self.y_new.copy_from_slice(&self.stage);
        let n = y.len().max(1);
        let mut sum = 0.0;
        for i in 0..y.len() {
            let mut err = 0.0;
            for (s, e) in E.iter().enumerate() {
                err += e * self.k[s][i];
            }
            let w = cfg.abs_tol + cfg.rel_tol * y[i].abs().max(self.y_new[i].abs());
            let r = dt * err / w;
            sum += r * r;
        }
        Ok((sum / n as f64).sqrt())
    }

    /// One adaptive step. Accepted steps update `y` in place; rejected steps
    /// leave it untouched. Positivity failures inside a stage reject the step.
    pub fn step(
        &mut self,
        sys: &mut impl OdeSystem,
        t: f64,
        y: &mut [f64],
        dt: f64,
        cfg: &IntegratorConfig,
    ) -> Result<StepOutcome> {
        let norm = match self.attempt(sys, t, y, dt, cfg) {
            Ok(norm) => norm,
            Err(Error::Positivity { .. }) if self.fsal_valid => {
                return Ok(StepOutcome {
                    accepted: false,
                    error_norm: f64::INFINITY,
                    dt_next: 0.25 * dt,
                });
            }
            Err(e) => return Err(e),
        };
        if !norm.is_finite() {
            return Ok(StepOutcome {
                accepted: false,
                error_norm: norm,
                dt_next: 0.25 * dt,
            });
        }
        let factor = if norm == 0.0 {
            5.0
        } else {
            (cfg.safety * norm.powf(-0.2)).clamp(0.2, 5.0)
        };
        let accepted = norm <= 1.0;
        if accepted {
            y.copy_from_slice(&self.y_new);
            self.k.swap(0, 6);
        }
        Ok(StepOutcome {
            accepted,
            error_norm: norm,
            dt_next: (dt * factor).min(cfg.dt_max),
        })
    }

    /// Fixed-step integration over `steps` equal steps.
    pub fn integrate_fixed(
        &mut self,
        sys: &mut impl OdeSystem,
        t0: f64,
        t1: f64,
        steps: usize,
        y: &mut [f64],
    ) -> Result<()> {
        let dt = (t1 - t0) / steps as f64;
        let cfg = IntegratorConfig::new(t1 - t0);
        for n in 0..steps {
            let t = t0 + n as f64 * dt;
            self.attempt(sys, t, y, dt, &cfg)?;
            y.copy_from_slice(&self.y_new);
            self.k.swap(0, 6);
        }
        Ok(())
    }

    /// Starting step from the usual two-evaluation estimate.
    fn initial_step(
        &mut self,
        sys: &mut impl OdeSystem,
        t: f64,
        y: &[f64],
        cfg: &IntegratorConfig,
    ) -> Result<f64> {
        if let Some(dt) = cfg.dt_init {
            return Ok(dt.min(cfg.dt_max));
        }
        self.first_stage(sys, t, y)?;
        let n = y.len().max(1) as f64;
        let w = |i: usize| cfg.abs_tol + cfg.rel_tol * y[i].abs();
        let d0 = ((0..y.len()).map(|i| (y[i] / w(i)).powi(2)).sum::<f64>() / n).sqrt();
        let d1 = ((0..y.len())
            .map(|i| (self.k[0][i] / w(i)).powi(2))
            .sum::<f64>()
            / n)
            .sqrt();
        let h0 = if d0 < 1e-5 || d1 < 1e-5 {
            1e-6
        } else {
            0.01 * d0 / d1
        };
        let h0 = h0.min(cfg.t_final);
        for (i, s) in self.stage.iter_mut().enumerate() {
            *s = y[i] + h0 * self.k[0][i];
        }
        let mut d2 = 0.0;
        match self.eval(sys, t + h0, 1, true, y) {
            Ok(()) => {
                for i in 0..y.len() {
                    d2 += ((self.k[1][i] - self.k[0][i]) / w(i)).powi(2);
                }
                d2 = (d2 / n).sqrt() / h0;
            }
            Err(Error::Positivity { .. }) => return Ok(0.01 * h0),
            Err(e) => return Err(e),
        }
        let h1 = if d1.max(d2) <= 1e-15 {
            (h0 * 1e-3).max(1e-6)
        } else {
            (0.01 / d1.max(d2)).powf(0.2)
        };
        Ok((100.0 * h0).min(h1).min(cfg.dt_max))
    }
}

/// Statistics of a completed integration.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct IntegrationStats {
    pub accepted: usize,
    pub rejected: usize,
    pub rhs_evaluations: usize,
    pub t: f64,
}

/// Information passed to the observer after every accepted step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepInfo {
    pub t: f64,
    pub dt: f64,
    pub step: usize,
    /// Rejections since the previous accepted step.
    pub rejections: usize,
}

/// Adaptive integration from `t0` to `cfg.t_final`, calling `observer`
/// with the new state and the system after each accepted step.
pub fn integrate_adaptive<S: OdeSystem>(
    sys: &mut S,
    y: &mut [f64],
    t0: f64,
    cfg: &IntegratorConfig,
    mut observer: impl FnMut(&StepInfo, &[f64], &S) -> Result<()>,
) -> Result<IntegrationStats> {
    cfg.validate()?;
    let mut dp = Dp54::new(y.len());
    let mut t = t0;
    let mut dt = dp.initial_step(sys, t, y, cfg)?;
    let mut stats = IntegrationStats::default();
    let mut rejections = 0;
    let dt_min = 1e-14 * cfg.t_final.abs().max(f64::MIN_POSITIVE);
    while t < cfg.t_final {
        let last = t + dt >= cfg.t_final * (1.0 - 1e-14);
        let h = if last { cfg.t_final - t } else { dt };
        let out = dp.step(sys, t, y, h, cfg)?;
        if out.accepted {
            t = if last { cfg.t_final } else { t + h };
            stats.accepted += 1;
            observer(
                &StepInfo {
                    t,
                    dt: h,
                    step: stats.accepted,
                    rejections,
                },
                y,
                sys,
            )?;
            rejections = 0;
        } else {
            stats.rejected += 1;
            rejections += 1;
            if out.dt_next < dt_min {
                return Err(Error::StepUnderflow { t, dt: out.dt_next });
            }
        }
        dt = out.dt_next;
    }
    stats.rhs_evaluations = dp.rhs_evaluations;
    stats.t = t;
    Ok(stats)
}

/// One row of the diagnostics time series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiagnosticsRecord {
    pub t: f64,
    pub r: f64,
    pub boundary_term: f64,
    /// Scale of the viscous entropy balance for relative identity checks.
    pub scale: f64,
    pub entropy: f64,
    pub totals: Row,
    pub e_wall: f64,
    pub dt: f64,
    pub rejections: usize,
}

pub const CSV_HEADER: &str = "t,r,boundary_term,entropy,mass,mom1,mom2,energy,e_wall,dt,rejections";

impl DiagnosticsRecord {
    pub fn csv_row(&self) -> String {
        let f = |x: f64| format!("{x:.16e}");
        [
            f(self.t),
            f(self.r),
            f(self.boundary_term),
            f(self.entropy),
            f(self.totals[0]),
            f(self.totals[1]),
            f(self.totals[2]),
            f(self.totals[3]),
            f(self.e_wall),
            f(self.dt),
            self.rejections.to_string(),
        ]
        .join(",")
    }

    /// `r - boundary_term` relative to the balance scale.
    pub fn relative_residual(&self) -> f64 {
        let d = self.r - self.boundary_term;
        if self.scale > 0.0 {
            d / self.scale
        } else {
            d
        }
    }
}

/// Runtime check of the viscous entropy identity after every accepted step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum IdentityCheck {
    /// `|r - boundary_term| <= tol * scale`.
    Equality(f64),
    /// `r - boundary_term <= tol * scale`.
    Dissipative(f64),
}

/// The solver viewed as an ODE system on flat coefficients.
pub struct SolverSystem<'a> {
    pub solver: &'a Solver,
    pub work: RhsWork,
}

impl<'a> SolverSystem<'a> {
    pub fn new(solver: &'a Solver) -> Self {
        Self {
            solver,
            work: solver.work(),
        }
    }

    pub fn diagnostics(&self) -> &RhsDiagnostics {
        &self.work.diagnostics
    }
}

impl OdeSystem for SolverSystem<'_> {
    fn rhs(&mut self, t: f64, y: &[f64], dy: &mut [f64]) -> Result<()> {
        let (u, _) = y.as_chunks::<4>();
        let (du, _) = dy.as_chunks_mut::<4>();
        self.solver.rhs(t, u, du, &mut self.work)
    }
}

#[derive(Debug, Clone)]
pub struct RunOptions {
    pub integrator: IntegratorConfig,
    pub identity_check: Option<IdentityCheck>,
    /// Wall tags for `e_wall`; `None` uses every no-slip tag, and walls are
    /// skipped when the case has none.
    pub wall_tags: Option<Vec<String>>,
    /// Times at which `snapshot` is called (the final time always is).
    pub snapshot_times: Vec<f64>,
}

impl RunOptions {
    pub fn new(integrator: IntegratorConfig) -> Self {
        Self {
            integrator,
            identity_check: None,
            wall_tags: None,
            snapshot_times: Vec::new(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunResult {
    pub records: Vec<DiagnosticsRecord>,
    pub field: SolutionField,
    pub stats: IntegrationStats,
}

fn record(
    sys: &SolverSystem<'_>,
    y: &[f64],
    wall_tags: &Option<Vec<String>>,
    dt: f64,
    rejections: usize,
) -> Result<DiagnosticsRecord> {
    let solver = sys.solver;
    let field = SolutionField::from_flat(solver.disc.ops.np, y);
    let d = sys.diagnostics();
    let has_walls = solver.boundary.iter().any(|b| b.kind.is_noslip());
    let e_wall = match wall_tags {
        Some(tags) => {
            let tags: Vec<&str> = tags.iter().map(|s| s.as_str()).collect();
            solver.wall_error(&field.coeffs, Some(&tags))?
        }
        None if has_walls => solver.wall_error(&field.coeffs, None)?,
        None => 0.0,
    };
    Ok(DiagnosticsRecord {
        t: d.t,
        r: d.r(),
        boundary_term: d.boundary_term,
        scale: d.scale,
        entropy: solver.disc.total_entropy(&field, &solver.gas),
        totals: solver.disc.conserved_totals(&field),
        e_wall,
        dt,
        rejections,
    })
}

fn check_identity(check: Option<IdentityCheck>, rec: &DiagnosticsRecord) -> Result<()> {
    let d = rec.r - rec.boundary_term;
    let (violated, tol) = match check {
        None => return Ok(()),
        Some(IdentityCheck::Equality(tol)) => (d.abs() > tol * rec.scale, tol),
        Some(IdentityCheck::Dissipative(tol)) => (d > tol * rec.scale, tol),
    };
    if violated || !d.is_finite() {
        return Err(Error::IdentityViolation {
            t: rec.t,
            residual: d,
            bound: tol * rec.scale,
        });
    }
    Ok(())
}

/// Integrates `field` to the final time, recording diagnostics from the last
/// right-hand side evaluation of every `diagnostics_stride`-th accepted step
/// (with FSAL that evaluation is at the accepted state). Rows are also
/// streamed to `csv` when given, and `snapshot` receives the state at the
/// requested times.
pub fn run(
    solver: &Solver,
    field: &SolutionField,
    opts: &RunOptions,
    mut csv: Option<&mut dyn Write>,
    mut snapshot: impl FnMut(f64, &SolutionField) -> Result<()>,
) -> Result<RunResult> {
    let cfg = &opts.integrator;
    cfg.validate()?;
    solver.disc.check_admissible(field, 0.0)?;
    let mut sys = SolverSystem::new(solver);
    let mut y = field.as_flat().to_vec();
    let mut dy = vec![0.0; y.len()];
    sys.rhs(0.0, &y, &mut dy)?;
    let mut records = Vec::new();
    let first = record(&sys, &y, &opts.wall_tags, 0.0, 0)?;
    check_identity(opts.identity_check, &first)?;
    if let Some(w) = csv.as_deref_mut() {
        writeln!(w, "{CSV_HEADER}")?;
        writeln!(w, "{}", first.csv_row())?;
    }
    records.push(first);

    let mut pending: Vec<f64> = opts
        .snapshot_times
        .iter()
        .copied()
        .filter(|&s| s <= cfg.t_final)
        .collect();
    pending.sort_by(f64::total_cmp);
    pending.reverse();
    if pending.last() == Some(&0.0) {
        pending.pop();
        snapshot(0.0, field)?;
    }

    let mut stride_rejections = 0;
    let wall_tags = &opts.wall_tags;
    let check = opts.identity_check;
    let stride = cfg.diagnostics_stride;
    let np = solver.disc.ops.np;
    let mut last_snapshot = f64::NAN;
    let stats = integrate_adaptive(&mut sys, &mut y, 0.0, cfg, |info, y, sys| {
        stride_rejections += info.rejections;
        if info.step % stride == 0 || info.t >= cfg.t_final {
            let rec = record(sys, y, wall_tags, info.dt, stride_rejections)?;
            stride_rejections = 0;
            check_identity(check, &rec)?;
            if let Some(w) = csv.as_deref_mut() {
                writeln!(w, "{}", rec.csv_row())?;
            }
            records.push(rec);
        }
        while pending.last().is_some_and(|&s| s <= info.t) {
            pending.pop();
            last_snapshot = info.t;
            snapshot(info.t, &SolutionField::from_flat(np, y))?;
        }
        Ok(())
    })?;
    let final_field = SolutionField::from_flat(np, &y);
    if last_snapshot != cfg.t_final {
        snapshot(cfg.t_final, &final_field)?;
    }
    Ok(RunResult {
        records,
        field: final_field,
        stats,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn decay(_t: f64, y: &[f64], dy: &mut [f64]) -> Result<()> {
        dy[0] = -y[0];
        Ok(())
    }

    #[test]
    fn adaptive_exponential() {
        let cfg = IntegratorConfig::new(1.0).with_tolerances(1e-12, 1e-8);
        let mut y = [1.0];
        let stats = integrate_adaptive(&mut decay, &mut y, 0.0, &cfg, |_, _, _| Ok(())).unwrap();
        assert!((y[0] - (-1.0f64).exp()).abs() < 10.0 * 1e-8);
        assert_eq!(stats.t, 1.0);
    }

    #[test]
    fn fifth_order_in_fixed_steps() {
        let err = |n: usize| {
            let mut y = [1.0];
            Dp54::new(1)
                .integrate_fixed(&mut decay, 0.0, 1.0, n, &mut y)
                .unwrap();
            (y[0] - (-1.0f64).exp()).abs()
        };
        let rate = (err(8) / err(16)).log2();
        assert!(rate > 4.8, "rate {rate}");
    }

    #[test]
    fn six_evaluations_per_accepted_step() {
        let mut dp = Dp54::new(1);
        let mut y = [1.0];
        dp.integrate_fixed(&mut decay, 0.0, 1.0, 10, &mut y)
            .unwrap();
        assert_eq!(dp.rhs_evaluations, 1 + 6 * 10);
    }

    #[test]
    fn rejected_steps_leave_state() {
        let cfg = IntegratorConfig::new(1.0).with_tolerances(1e-14, 1e-14);
        let mut dp = Dp54::new(1);
        let mut y = [1.0];
        let out = dp.step(&mut decay, 0.0, &mut y, 0.9, &cfg).unwrap();
        assert!(!out.accepted);
        assert_eq!(y[0], 1.0);
        assert!(out.dt_next < 0.9);
    }

    #[test]
    fn positivity_failure_shrinks_step() {
        let mut sys = |_t: f64, y: &[f64], dy: &mut [f64]| {
            if y[0] < 0.5 {
                return Err(Error::Positivity {
                    element: 0,
                    time: 0.0,
                    detail: "test".into(),
                });
            }
            dy[0] = -y[0];
            Ok(())
        };
        let cfg = IntegratorConfig::new(1.0);
        let mut dp = Dp54::new(1);
        let mut y = [1.0];
        let out = dp.step(&mut sys, 0.0, &mut y, 1.0, &cfg).unwrap();
        assert!(!out.accepted);
        assert_eq!(out.dt_next, 0.25);
    }

    #[test]
    fn csv_row_has_all_columns() {
        let rec = DiagnosticsRecord {
            t: 0.5,
            r: 1e-17,
            boundary_term: 0.0,
            scale: 1.0,
            entropy: -1.0,
            totals: [1.0, 2.0, 3.0, 4.0],
            e_wall: 0.1,
            dt: 1e-3,
            rejections: 2,
        };
        let row = rec.csv_row();
        assert_eq!(row.split(',').count(), CSV_HEADER.split(',').count());
        assert!(row.starts_with("5.0000000000000000e-1,"));
    }
}
