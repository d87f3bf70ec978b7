//! Shock channel with symmetry walls. Writes a diagnostics CSV and a final
//! VTK snapshot to a temporary directory.

use std::fs::File;
use std::io::BufWriter;

use esdg::cli::config::{Case, RunConfig};
use esdg::cli::{presets, vtk};
use esdg::timeloop::{self, RunOptions};

fn main() -> esdg::Result<()> {
    let mut cfg = RunConfig::for_case(Case::ShockChannel);
    cfg.k1d = 4;
    cfg.t_final = 0.05;
    let p = presets::build(&cfg)?;
    let dir = std::env::temp_dir().join("esdg_shock_channel");
    std::fs::create_dir_all(&dir)?;
    let mut csv = BufWriter::new(File::create(dir.join("diagnostics.csv"))?);
    let opts = RunOptions::new(presets::integrator_config(&cfg));
    let solver = &p.solver;
    let res = timeloop::run(solver, &p.initial, &opts, Some(&mut csv), |t, f| {
        vtk::write_snapshot(&dir.join("final.vtk"), &solver.disc, f, &solver.gas, t)
    })?;
    let first = res.records.first().expect("initial record");
    let last = res.records.last().expect("final record");
    println!(
        "steps {} (rejected {}), rhs {}",
        res.stats.accepted, res.stats.rejected, res.stats.rhs_evaluations
    );
    println!("entropy {:.10e} -> {:.10e}", first.entropy, last.entropy);
    println!(
        "mass    {:.10e} -> {:.10e}",
        first.totals[0], last.totals[0]
    );
    println!(
        "max r/scale with penalty {:.3e}",
        res.records
            .iter()
            .map(|r| r.r / r.scale)
            .fold(f64::NEG_INFINITY, f64::max)
    );
    println!("output in {}", dir.display());
    Ok(())
}
