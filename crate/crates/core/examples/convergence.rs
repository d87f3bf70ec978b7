//! Small wall-error convergence study on the channel case.

use esdg::cli::config::{Case, RunConfig};
use esdg::cli::harness::ConvergenceTable;

fn main() -> esdg::Result<()> {
    let mut cfg = RunConfig::for_case(Case::ConvergeChannel);
    cfg.ma = 0.3;
    cfg.t_final = 0.1;
    let table = ConvergenceTable::compute(&cfg, &[1, 2], &[2, 4, 8], |e| {
        eprintln!("N={} K1D={}: {:?}", e.n, e.k1d, e.e_wall);
    })?;
    print!("{}", table.to_csv());
    Ok(())
}
