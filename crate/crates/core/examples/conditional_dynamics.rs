//! One environment spin under the two conditional Hamiltonians: Bloch
//! vectors, separation angle and the decoherence factor over time.

use std::f64::consts::PI;

use qdarwin::dynamics::{conditional_states, insensitive_axis};
use qdarwin::model::SpinSpec;

fn main() -> qdarwin::Result<()> {
    let spin = SpinSpec::from_bloch(0.5, 0.3, 1.0, PI / 2.0, 0.0)?;
    println!("t,theta_sep,abs_gamma,theta_star,phi_star");
    for k in 0..=16 {
        let t = k as f64 * PI / 16.0;
        let pair = conditional_states(&spin, t);
        let axis = insensitive_axis(&spin, t);
        println!(
            "{t:.4},{:.6},{:.6},{:.6},{:.6}",
            pair.theta_sep,
            pair.gamma.norm(),
            axis.theta_star,
            axis.phi_star
        );
    }
    Ok(())
}
