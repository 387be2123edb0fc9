//! How haziness of the environment spins slows record formation: relative
//! QCB efficiency against the mixedness factor.

use std::f64::consts::PI;

use qdarwin::chernoff::{xi_bar_closed, MixednessFactor};
use qdarwin::ensembles::{haziness_to_bloch_length, make_fig4_scenario};
use qdarwin::model::realize_environment;

fn main() -> qdarwin::Result<()> {
    let n = 100_000;
    let xi = |h: f64, t: f64| -> qdarwin::Result<f64> {
        let sc = make_fig4_scenario(h, 0.5, t, n)?;
        xi_bar_closed(&realize_environment(&sc.environment)?, t)
    };
    let reference = xi(0.0, PI / 8.0)?;
    println!("h,a,lambda,efficiency_at_pi_over_8");
    for h in [0.0, 0.2, 0.4, 0.6, 0.8] {
        let a = haziness_to_bloch_length(h)?;
        let lambda = MixednessFactor::from_bloch_length(a).value();
        println!("{h},{a:.6},{lambda:.6},{:.6}", xi(h, PI / 8.0)? / reference);
    }
    Ok(())
}
