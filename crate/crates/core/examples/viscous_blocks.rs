//! Symmetrized viscous blocks K_ij at one state: symmetry, eigenvalues and
//! the recovered physical stress for a pure shear.

use esdg::physics::{self, GasParams};
use nalgebra::DMatrix;

fn main() -> esdg::Result<()> {
    let gas = GasParams::air(10.0, 0.3)?;
    let u = physics::primitive_to_conservative(1.2, 0.4, -0.3, 8.0, &gas)?;
    let v = physics::entropy_vars(&u, &gas)?;
    let k = physics::viscous_k(&v, &gas)?;
    let a = k.assembled();
    let m = DMatrix::from_fn(8, 8, |i, j| a[i][j]);
    let asym = (&m - m.transpose()).abs().max();
    let eig = m.symmetric_eigenvalues();
    println!("max |K - K^T| = {asym:.1e}");
    println!(
        "eigenvalues: {:?}",
        eig.iter().map(|e| format!("{e:.3e}")).collect::<Vec<_>>()
    );

    // x-gradient of v for du1/dx = 1 at fixed rho and p, by central differences
    let h = 1e-6;
    let shifted = |d: f64| {
        physics::primitive_to_conservative(1.2, 0.4 + d, -0.3, 8.0, &gas)
            .and_then(|u| physics::entropy_vars(&u, &gas))
    };
    let (vp, vm) = (shifted(h)?, shifted(-h)?);
    let dv = [0, 1, 2, 3].map(|c| (vp[c] - vm[c]) / (2.0 * h));
    let sigma = k.apply(&[dv, [0.0; 4]]);
    println!(
        "sigma_1 momentum-1 = {:.6} (lambda + 2 mu = {:.6})",
        sigma[0][1],
        gas.lambda + 2.0 * gas.mu
    );
    Ok(())
}
