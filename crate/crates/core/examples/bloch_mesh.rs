//! Chernoff information over all initial directions of a pure and a hazy
//! spin; the hazy mesh never rises above the pure one.

use std::f64::consts::PI;

use qdarwin::chernoff::bloch_mesh;
use qdarwin::model::SpinSpec;

fn main() -> qdarwin::Result<()> {
    let t = 15.0 * PI / 64.0;
    let template = SpinSpec::from_bloch(0.5, 0.0, 1.0, 0.0, 0.0)?;
    let pure = bloch_mesh(&template, t, 1.0, (31, 16))?;
    let hazy = bloch_mesh(&template, t, 11.0 / 16.0, (31, 16))?;
    let peak = pure.iter().map(|p| p.xi).fold(0.0, f64::max);
    let worst = pure
        .iter()
        .zip(&hazy)
        .map(|(p, h)| h.xi - p.xi)
        .fold(f64::NEG_INFINITY, f64::max);
    println!("pure peak xi = {peak:.4} nats");
    println!("max(hazy - pure) = {worst:.2e}");
    Ok(())
}
