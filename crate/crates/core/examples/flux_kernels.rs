//! Entropy-conservative flux on one state pair: consistency, the entropy
//! conservation condition and the stable logarithmic mean.

use esdg::physics::{self, GasParams};

fn main() -> esdg::Result<()> {
    let gas = GasParams::air(100.0, 0.5)?;
    let ul = physics::primitive_to_conservative(1.0, 0.3, -0.1, 2.0, &gas)?;
    let ur = physics::primitive_to_conservative(0.6, -0.2, 0.4, 0.9, &gas)?;

    let fs = physics::ec_flux(&ul, &ul, &gas)?;
    let f = physics::inviscid_flux(&ul, &gas)?;
    let cons = (0..2)
        .flat_map(|i| (0..4).map(move |c| (i, c)))
        .map(|(i, c)| (fs[i][c] - f[i][c]).abs())
        .fold(0.0, f64::max);
    println!("consistency |f_S(u,u) - f(u)| = {cons:.1e}");

    let (vl, vr) = (
        physics::entropy_vars(&ul, &gas)?,
        physics::entropy_vars(&ur, &gas)?,
    );
    let (el, er) = (
        physics::entropy_and_potentials(&ul, &gas)?,
        physics::entropy_and_potentials(&ur, &gas)?,
    );
    let fs = physics::ec_flux(&ul, &ur, &gas)?;
    for i in 0..2 {
        let jump: f64 = (0..4).map(|c| (vl[c] - vr[c]) * fs[i][c]).sum();
        let res = jump - (el.psi[i] - er.psi[i]);
        println!(
            "direction {}: (v_L - v_R) . f_S - (psi_L - psi_R) = {res:.1e}",
            i + 1
        );
    }

    println!("log mean near the series branch:");
    for eps in [1e-1f64, 1e-2, 1e-3, 1e-6] {
        let (a, b) = (1.0 + eps, 1.0 - eps);
        let naive = (a - b) / (a.ln() - b.ln());
        println!(
            "  a/b - 1 = {:.1e}: stable {:.17}  naive {naive:.17}",
            a / b - 1.0,
            physics::log_mean(a, b)
        );
    }
    Ok(())
}
