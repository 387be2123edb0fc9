//! Redundancy of 32 spins with couplings spread over a band: the analytic
//! band average, the discretized QCB steps and exact enumeration.

use std::f64::consts::PI;

use qdarwin::chernoff::redundancy_discretized;
use qdarwin::ensembles::{band_redundancy, band_redundancy_asymptote, make_fig5_scenario, BandSpec};
use qdarwin::holevo::{redundancy_exact, Averaging};
use qdarwin::model::realize_environment;
use qdarwin::qmath::DenseCap;
use qdarwin::Error;

fn main() -> qdarwin::Result<()> {
    let sc = make_fig5_scenario(32, 0.1, 3);
    let env = realize_environment(&sc.environment)?;
    let band = BandSpec::new(1.0, 1.0, PI / 2.0)?;
    println!("asymptote = {:.3}", band_redundancy_asymptote(&band, 32, sc.delta)?);
    println!("t,r_band,r_discretized,r_exact");
    for k in 0..=20 {
        let t = k as f64;
        let analytic = band_redundancy(&band, 32, t, sc.delta)?.r_delta;
        let disc = match redundancy_discretized(&env, t, sc.delta) {
            Ok(d) => d.r_delta,
            Err(Error::ZeroInformation) => 0.0,
            Err(e) => return Err(e),
        };
        let exact = match redundancy_exact(&sc.system, &env, t, sc.delta, Averaging::Enumerate, DenseCap::default()) {
            Ok((r, _)) => format!("{:.3}", r.r_delta),
            Err(Error::TooManySubsets { .. }) => "too_many_subsets".into(),
            Err(e) => return Err(e),
        };
        println!("{t},{analytic:.3},{disc:.3},{exact}");
    }
    Ok(())
}
