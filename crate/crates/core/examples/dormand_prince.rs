//! Dormand-Prince 5(4): fixed-step order on y' = -y and an adaptive run on
//! a harmonic oscillator.

use esdg::timeloop::{integrate_adaptive, Dp54, IntegratorConfig};

fn main() -> esdg::Result<()> {
    let want = (-1.0f64).exp();
    let mut prev: Option<f64> = None;
    for steps in [4, 8, 16, 32] {
        let mut y = [1.0];
        let mut f = |_: f64, y: &[f64], dy: &mut [f64]| {
            dy[0] = -y[0];
            Ok(())
        };
        Dp54::new(1).integrate_fixed(&mut f, 0.0, 1.0, steps, &mut y)?;
        let err = (y[0] - want).abs();
        let order = prev
            .map(|p| (p / err).log2())
            .map(|o| format!("{o:.2}"))
            .unwrap_or_default();
        println!("steps {steps:3}: error {err:.3e} {order}");
        prev = Some(err);
    }

    let mut osc = |_: f64, y: &[f64], dy: &mut [f64]| {
        dy[0] = y[1];
        dy[1] = -y[0];
        Ok(())
    };
    let cfg = IntegratorConfig::new(10.0).with_tolerances(1e-10, 1e-10);
    let mut y = [1.0, 0.0];
    let stats = integrate_adaptive(&mut osc, &mut y, 0.0, &cfg, |_, _, _| Ok(()))?;
    println!(
        "oscillator to t = 10: y = ({:.10}, {:.10}), error {:.1e}, {} steps, {} rejected",
        y[0],
        y[1],
        ((y[0] - 10f64.cos()).powi(2) + (y[1] + 10f64.sin()).powi(2)).sqrt(),
        stats.accepted,
        stats.rejected
    );
    Ok(())
}
