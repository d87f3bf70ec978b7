//! Builds the reference operators for N = 1..4 and checks the hybridized
//! SBP property. Pass a directory to dump the N = 2 matrices as CSV.

use esdg::reference::ReferenceOperators;

fn main() -> esdg::Result<()> {
    println!(" N  Np  Nq  Nfq  max|Qh+Qh^T - B|  max|Q 1|");
    for n in 1..=4 {
        let ops = ReferenceOperators::new(n)?;
        let nh = ops.nh();
        let mut sbp = 0.0f64;
        let mut null = 0.0f64;
        for i in 0..2 {
            let sum = &ops.qh[i] + ops.qh[i].transpose();
            for a in 0..nh {
                for b in 0..nh {
                    let want = if a == b && a >= ops.nq {
                        ops.b[i][a - ops.nq]
                    } else {
                        0.0
                    };
                    sbp = sbp.max((sum[(a, b)] - want).abs());
                }
            }
            for a in 0..ops.nq {
                null = null.max((0..ops.nq).map(|b| ops.q[i][(a, b)]).sum::<f64>().abs());
            }
        }
        println!(
            "{n:2} {:3} {:3} {:4}  {sbp:16.1e}  {null:8.1e}",
            ops.np, ops.nq, ops.nfq
        );
    }
    if let Some(dir) = std::env::args().nth(1) {
        ReferenceOperators::new(2)?.dump_csv(dir.as_ref())?;
        println!("N = 2 operators written to {dir}");
    }
    Ok(())
}
