//! Holevo deficit of growing fragments of hazy spins from dense matrices,
//! next to the Chernoff exponent that predicts its decay.

use std::f64::consts::PI;

use qdarwin::chernoff::xi_closed_field;
use qdarwin::ensembles::haziness_to_bloch_length;
use qdarwin::holevo::{holevo_dense, system_entropy, FragmentSelection};
use qdarwin::model::{SpinSpec, SystemSpec};
use qdarwin::qmath::DenseCap;

fn main() -> qdarwin::Result<()> {
    let t = PI / 16.0;
    let system = SystemSpec::pure(0.5);
    let h_s = system_entropy(&system)?;
    let cap = DenseCap::new(9)?;
    for h in [0.0, 0.4, 0.8] {
        let spin = SpinSpec::from_bloch(1.0, 0.0, haziness_to_bloch_length(h)?, PI / 2.0, 0.0)?;
        let env = vec![spin; 9];
        println!("h = {h}: xi_qcb = {:.4}", xi_closed_field(&spin, t));
        for f in 1..=9 {
            let frag = FragmentSelection::prefix(f, env.len())?;
            let chi = holevo_dense(&system, &env, &frag, t, cap)?;
            println!("  #F = {f}: deficit = {:.3e}", h_s - chi);
        }
    }
    Ok(())
}
