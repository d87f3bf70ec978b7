//! Convergence study over (N, K1D) on the periodic channel.

use super::config::{Case, RunConfig};
use super::presets;
use crate::error::{Error, Result};
use crate::timeloop::{self, RunOptions};

/// Integrator tolerance used for every harness run.
pub const HARNESS_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceEntry {
    pub n: usize,
    pub k1d: usize,
    /// Wall velocity error at `t_final`, or the failure message.
    pub e_wall: std::result::Result<f64, String>,
    /// Rate against the next coarser `K1D` with the same `N`.
    pub rate: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceTable {
    pub degrees: Vec<usize>,
    pub k1d: Vec<usize>,
    /// Row-major over `k1d`, then `degrees`.
    pub entries: Vec<ConvergenceEntry>,
}

/// `ln(e_c/e_f) / ln(K_f/K_c)`, which is `log2(e_c/e_f)` for doubled meshes.
pub fn rate(e_coarse: f64, e_fine: f64, k_coarse: usize, k_fine: usize) -> f64 {
    (e_coarse / e_fine).ln() / (k_fine as f64 / k_coarse as f64).ln()
}

/// Wall velocity error at `t_final` for one configuration.
pub fn wall_error(cfg: &RunConfig) -> Result<f64> {
    let problem = presets::build(cfg)?;
    let integ = presets::integrator_config(cfg);
    let res = timeloop::run(
        &problem.solver,
        &problem.initial,
        &RunOptions::new(integ),
        None,
        |_, _| Ok(()),
    )?;
    problem.solver.wall_error(&res.field.coeffs, None)
}

impl ConvergenceTable {
    /// Runs every pair; failed runs are recorded and the study continues.
    pub fn compute(
        base: &RunConfig,
        degrees: &[usize],
        k1d: &[usize],
        mut progress: impl FnMut(&ConvergenceEntry),
    ) -> Result<Self> {
        if base.case != Case::ConvergeChannel {
            return Err(Error::Config(format!(
                "convergence study needs case = converge_channel, got {}",
                base.case.name()
            )));
        }
        if degrees.is_empty() || k1d.is_empty() {
            return Err(Error::Config(
                "convergence study needs at least one degree and one K1D".into(),
            ));
        }
        let mut ks = k1d.to_vec();
        ks.sort_unstable();
        ks.dedup();
        let mut entries = Vec::with_capacity(ks.len() * degrees.len());
        for (ik, &k) in ks.iter().enumerate() {
            for (id, &n) in degrees.iter().enumerate() {
                let mut cfg = base.clone();
                cfg.n = n;
                cfg.k1d = k;
                cfg.abs_tol = HARNESS_TOL;
                cfg.rel_tol = HARNESS_TOL;
                let e_wall = wall_error(&cfg).map_err(|e| e.to_string());
                let rate = match (ik.checked_sub(1), &e_wall) {
                    (Some(prev), Ok(ef)) => match &entries[prev * degrees.len() + id] {
                        ConvergenceEntry { e_wall: Ok(ec), .. } => {
                            Some(rate(*ec, *ef, ks[prev], k))
                        }
                        _ => None,
                    },
                    _ => None,
                };
                let entry = ConvergenceEntry {
                    n,
                    k1d: k,
                    e_wall,
                    rate,
                };
                progress(&entry);
                entries.push(entry);
            }
        }
        Ok(Self {
            degrees: degrees.to_vec(),
            k1d: ks,
            entries,
        })
    }

    pub fn get(&self, n: usize, k1d: usize) -> Option<&ConvergenceEntry> {
        self.entries.iter().find(|e| e.n == n && e.k1d == k1d)
    }

    /// One row per `K1D` with an error and a rate column per degree.
    pub fn to_csv(&self) -> String {
        let mut head = vec!["K1D".to_string()];
        for n in &self.degrees {
            head.push(format!("N={n}"));
            head.push(format!("rate_N={n}"));
        }
        let mut out = head.join(",") + "\n";
        for (ik, k) in self.k1d.iter().enumerate() {
            let mut row = vec![k.to_string()];
            for e in &self.entries[ik * self.degrees.len()..(ik + 1) * self.degrees.len()] {
                row.push(match &e.e_wall {
                    Ok(v) => format!("{v:.6e}"),
                    Err(_) => "failed".into(),
                });
                row.push(e.rate.map(|r| format!("{r:.4}")).unwrap_or_default());
            }
            out += &(row.join(",") + "\n");
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rate_of_doubling() {
        assert!((rate(1.6e-3, 1e-4, 4, 8) - 4.0).abs() < 1e-12);
        assert!((rate(9.0, 1.0, 1, 3) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn single_pair_has_no_rate() {
        let mut cfg = RunConfig::for_case(Case::ConvergeChannel);
        cfg.t_final = 0.01;
        let t = ConvergenceTable::compute(&cfg, &[1], &[1], |_| {}).unwrap();
        assert_eq!(t.entries.len(), 1);
        assert!(t.entries[0].rate.is_none());
        assert!(t.entries[0].e_wall.as_ref().unwrap().is_finite());
        let csv = t.to_csv();
        assert_eq!(csv.lines().next().unwrap(), "K1D,N=1,rate_N=1");
        assert!(csv.lines().nth(1).unwrap().ends_with(','));
    }

    #[test]
    fn failed_runs_are_marked() {
        let mut cfg = RunConfig::for_case(Case::ConvergeChannel);
        cfg.t_final = 0.01;
        // degree 0 is rejected by the operators
        let t = ConvergenceTable::compute(&cfg, &[0, 1], &[1, 2], |_| {}).unwrap();
        assert!(t.get(0, 1).unwrap().e_wall.is_err());
        assert!(t.get(0, 2).unwrap().rate.is_none());
        assert!(t.get(1, 2).unwrap().rate.is_some());
        assert!(t.to_csv().contains("failed"));
    }

    #[test]
    fn rejects_other_cases() {
        let cfg = RunConfig::for_case(Case::Cavity);
        assert!(ConvergenceTable::compute(&cfg, &[1], &[1], |_| {}).is_err());
    }
}
