//! Command-line driver: `run`, `converge` and `mesh-info`.

pub mod config;
pub mod harness;
pub mod presets;
pub mod vtk;

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use clap::{Parser, Subcommand};

use crate::boundary::BoundaryKind;
use crate::error::{Error, Result};
use crate::mesh::MeshGeometry;
use crate::timeloop::{self, IdentityCheck, RunOptions};
use config::{IdentityMode, RunConfig};

#[derive(Debug, Parser)]
#[command(
    name = "esdg",
    version,
    about = "Entropy-stable DG solver for 2D compressible Navier-Stokes"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one case and write diagnostics, the config echo and VTK snapshots.
    Run {
        #[arg(short, long)]
        config: Option<PathBuf>,
        /// `--key value` overrides applied after the file.
        #[arg(trailing_var_arg = true, allow_hyphen_values = true)]
        overrides: Vec<String>,
    },
    /// Convergence study on the periodic channel.
    Converge {
        #[arg(short, long)]
        config: Option<PathBuf>,
        #[arg(long, value_delimiter = ',', default_value = "2,3")]
        degrees: Vec<usize>,
        #[arg(long, value_delimiter = ',', default_value = "2,4,8")]
        k1d: Vec<usize>,
        #[arg(trailing_var_arg = true, allow_hyphen_values = true)]
        overrides: Vec<String>,
    },
    /// Print mesh statistics for a case or a TRIMESH2D file.
    MeshInfo {
        #[arg(short, long)]
        config: Option<PathBuf>,
        /// Mesh file; overrides the configured case.
        #[arg(long)]
        mesh: Option<PathBuf>,
        #[arg(trailing_var_arg = true, allow_hyphen_values = true)]
        overrides: Vec<String>,
    },
}

/// Problems found before time stepping are configuration errors.
fn setup<T>(r: Result<T>) -> Result<T> {
    r.map_err(|e| match e {
        Error::Positivity { .. }
        | Error::StepUnderflow { .. }
        | Error::IdentityViolation { .. } => e,
        e if e.exit_code() == 2 => e,
        e => Error::Config(e.to_string()),
    })
}

fn identity_check(cfg: &RunConfig) -> Option<IdentityCheck> {
    match cfg.identity_check {
        IdentityMode::Off => None,
        IdentityMode::Equality => Some(IdentityCheck::Equality(cfg.identity_tol)),
        IdentityMode::Dissipative => Some(IdentityCheck::Dissipative(cfg.identity_tol)),
    }
}

pub fn run_case(cfg: &RunConfig, out: &mut dyn Write) -> Result<()> {
    let problem = setup(presets::build(cfg))?;
    let solver = &problem.solver;
    if solver
        .boundary
        .iter()
        .any(|b| b.kind == BoundaryKind::Extrapolation)
    {
        eprintln!("warning: extrapolation outflow is not provably entropy stable");
    }
    let dir = &cfg.output_dir;
    setup(std::fs::create_dir_all(dir).map_err(Error::from))?;
    std::fs::write(dir.join("config.echo"), cfg.echo())?;

    let mut opts = RunOptions::new(presets::integrator_config(cfg));
    opts.identity_check = identity_check(cfg);
    opts.snapshot_times = cfg.snapshot_times.clone();
    let mut csv = BufWriter::new(File::create(dir.join("diagnostics.csv"))?);
    let mut count = 0usize;
    let res = timeloop::run(solver, &problem.initial, &opts, Some(&mut csv), |t, f| {
        let path = dir.join(format!("snapshot_{count:04}.vtk"));
        count += 1;
        vtk::write_snapshot(&path, &solver.disc, f, &solver.gas, t)
    });
    csv.flush()?;
    let res = res?;
    let last = res.records.last().expect("run records the initial state");
    let max_res = res
        .records
        .iter()
        .map(|r| r.relative_residual().abs())
        .fold(0.0, f64::max);
    writeln!(
        out,
        "t = {:.6}  steps = {} (rejected {})  rhs = {}  max |r - b|/scale = {:.3e}  e_wall = {:.6e}",
        res.stats.t, res.stats.accepted, res.stats.rejected, res.stats.rhs_evaluations, max_res, last.e_wall
    )?;
    writeln!(out, "output written to {}", dir.display())?;
    Ok(())
}

pub fn mesh_summary(mesh: &MeshGeometry) -> String {
    let mut per_tag: BTreeMap<String, usize> = BTreeMap::new();
    let mut untagged = 0;
    for (k, f) in mesh.boundary_faces() {
        match mesh.boundary_tag(k, f) {
            Some(t) => *per_tag.entry(t.to_string()).or_default() += 1,
            None => untagged += 1,
        }
    }
    let (jmin, jmax) = mesh
        .geometry
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), g| {
            (a.min(g.j), b.max(g.j))
        });
    let mut s = format!(
        "elements: {}\nvertices: {}\nboundary faces: {}\n",
        mesh.num_elements(),
        mesh.vertices.len(),
        per_tag.values().sum::<usize>() + untagged
    );
    for (t, n) in &per_tag {
        s += &format!("  {t}: {n}\n");
    }
    if untagged > 0 {
        s += &format!("  (untagged): {untagged}\n");
    }
    s += &format!(
        "periodic face pairs: {}\nJ min: {jmin:.6e}\nJ max: {jmax:.6e}\nmin edge length: {:.6e}\n",
        mesh.periodic_pairs.len(),
        mesh.min_edge_length()
    );
    s
}

fn execute(cli: Cli, out: &mut dyn Write) -> Result<()> {
    match cli.command {
        Command::Run { config, overrides } => {
            let cfg = RunConfig::load(config.as_deref(), &overrides)?;
            run_case(&cfg, out)
        }
        Command::Converge {
            config,
            degrees,
            k1d,
            overrides,
        } => {
            let mut ov = overrides;
            if config.is_none() && !ov.iter().any(|a| a == "--case" || a.starts_with("--case=")) {
                ov.extend(["--case".to_string(), "converge_channel".to_string()]);
            }
            let cfg = RunConfig::load(config.as_deref(), &ov)?;
            let table =
                harness::ConvergenceTable::compute(&cfg, &degrees, &k1d, |e| match &e.e_wall {
                    Ok(v) => eprintln!("N={} K1D={}: e_wall = {v:.6e}", e.n, e.k1d),
                    Err(m) => eprintln!("N={} K1D={}: failed ({m})", e.n, e.k1d),
                })?;
            let csv = table.to_csv();
            std::fs::create_dir_all(&cfg.output_dir)?;
            std::fs::write(cfg.output_dir.join("convergence.csv"), &csv)?;
            write!(out, "{csv}")?;
            Ok(())
        }
        Command::MeshInfo {
            config,
            mesh,
            overrides,
        } => {
            let m = match mesh {
                Some(p) => setup(crate::mesh::read_trimesh(&p))?,
                None => {
                    let cfg = RunConfig::load(config.as_deref(), &overrides)?;
                    setup(presets::case_mesh(&cfg))?
                }
            };
            write!(out, "{}", mesh_summary(&m))?;
            Ok(())
        }
    }
}

/// Parses `args` (including the program name) and returns the exit code.
pub fn main_with_args(args: impl IntoIterator<Item = String>, out: &mut dyn Write) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli, out) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("esdg: {e}");
            e.exit_code()
        }
    }
}

pub fn main() -> i32 {
    main_with_args(std::env::args(), &mut std::io::stdout().lock())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn args(s: &str) -> Vec<String> {
        s.split_whitespace().map(String::from).collect()
    }

    #[test]
    fn trailing_overrides_are_collected() {
        let cli = Cli::try_parse_from(args("esdg run -c f.cfg --N 2 --Re=10")).unwrap();
        match cli.command {
            Command::Run { config, overrides } => {
                assert_eq!(config, Some(PathBuf::from("f.cfg")));
                assert_eq!(overrides, args("--N 2 --Re=10"));
            }
            _ => panic!(),
        }
    }

    #[test]
    fn config_errors_exit_2() {
        let mut sink = Vec::new();
        assert_eq!(main_with_args(args("esdg run"), &mut sink), 2);
        assert_eq!(
            main_with_args(args("esdg run --case cavity --bogus 1"), &mut sink),
            2
        );
        assert_eq!(main_with_args(args("esdg frobnicate"), &mut sink), 2);
    }

    #[test]
    fn mesh_info_counts() {
        let mut out = Vec::new();
        let code = main_with_args(args("esdg mesh-info --case cavity --K1D 2"), &mut out);
        assert_eq!(code, 0);
        let s = String::from_utf8(out).unwrap();
        assert!(s.contains("elements: 8\n"));
        assert!(s.contains("vertices: 9\n"));
        assert!(s.contains("  lid: 2\n"));
        assert!(s.contains("  wall: 6\n"));
        assert!(s.contains("periodic face pairs: 0\n"));
    }
}
