//! Quadratic growth of the redundancy for Gaussian-scaled couplings, with
//! the exact Holevo value from Monte Carlo fragment sampling alongside.

use qdarwin::chernoff::{decoherence_time, onset_time, redundancy_gaussian, redundancy_qcb, xi_bar_closed};
use qdarwin::ensembles::make_fig3_scenario;
use qdarwin::holevo::{redundancy_exact, Averaging};
use qdarwin::model::realize_environment;
use qdarwin::qmath::DenseCap;

fn main() -> qdarwin::Result<()> {
    let sc = make_fig3_scenario(2000, 7);
    let env = realize_environment(&sc.environment)?;
    let tau = decoherence_time(&env)?;
    println!("tau_D = {tau:.4}, onset t* = {:.3}", onset_time(tau, sc.delta)?);
    println!("t,r_qcb,r_quadratic,r_exact");
    let how = Averaging::MonteCarlo { samples: 2000, seed: 1 };
    for t in [2.0, 4.0, 6.0, 8.0, 10.0] {
        let q = redundancy_qcb(xi_bar_closed(&env, t)?, env.len(), sc.delta)?.r_delta;
        let quad = redundancy_gaussian(1.0, tau, t, sc.delta)?;
        let (exact, _) = redundancy_exact(&sc.system, &env, t, sc.delta, how, DenseCap::default())?;
        println!("{t},{q:.3},{quad:.3},{:.3}", exact.r_delta);
    }
    Ok(())
}
