//! Conditional evolution of environment spins.
//!
//! With the system in pointer state `s` (`+1` for up, `-1` for down), spin k
//! evolves under `s g sigma_z + omega sigma_x`. Everything below is closed
//! form in the effective field `sqrt(g^2 + omega^2)`.

use crate::model::SpinSpec;
use crate::qmath::{bloch_to_density, vector_angle, Complex, Mat2, QubitState};

/// Pointer state of the system qubit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Pointer {
    Up,
    Down,
}

impl Pointer {
    pub fn sign(self) -> f64 {
        match self {
            Pointer::Up => 1.0,
            Pointer::Down => -1.0,
        }
    }
}

/// The two conditional states of one spin at a given time.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConditionalPair {
    pub up: QubitState,
    pub down: QubitState,
    /// Per-spin decoherence factor `tr[V_up rho V_down^dagger]`.
    pub gamma: Complex,
    /// Angle between the conditional Bloch vectors, in `[0, pi]`.
    pub theta_sep: f64,
}

/// Direction on the Bloch sphere whose states acquire no record at time `t`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InsensitiveAxis {
    pub theta_star: f64,
    pub phi_star: f64,
}

impl InsensitiveAxis {
    pub fn direction(&self) -> [f64; 3] {
        let (st, ct) = self.theta_star.sin_cos();
        let (sp, cp) = self.phi_star.sin_cos();
        [st * cp, st * sp, ct]
    }

    /// Pure state pointing along the axis.
    pub fn pure_state(&self) -> QubitState {
        QubitState::pure(self.theta_star, self.phi_star)
            .expect("axis angles are kept inside the Bloch chart")
    }
}

/// `exp(-i t (s g sigma_z + omega sigma_x))`.
pub fn conditional_unitary(spin: &SpinSpec, s: Pointer, t: f64) -> Mat2 {
    let w = spin.effective_field();
    if w == 0.0 || t == 0.0 {
        return Mat2::identity();
    }
    let (sn, cs) = (w * t).sin_cos();
    let k = sn / w;
    let gz = s.sign() * spin.g;
    // cos I - i k (gz sigma_z + omega sigma_x)
    Mat2::new(
        Complex::new(cs, -k * gz),
        Complex::new(0.0, -k * spin.omega),
        Complex::new(0.0, -k * spin.omega),
        Complex::new(cs, k * gz),
    )
}

fn evolve(v: &Mat2, rho: &Mat2) -> Mat2 {
    *v * *rho * v.dagger()
}

/// Bloch direction of `V n` for a unit direction `n`.
fn rotate_direction(v: &Mat2, n: [f64; 3]) -> [f64; 3] {
    let rho = bloch_to_density(&QubitState::from_bloch_vector(n).expect("unit vector"));
    let out = evolve(v, &rho);
    [
        2.0 * out.get(0, 1).re,
        -2.0 * out.get(0, 1).im,
        out.get(0, 0).re - out.get(1, 1).re,
    ]
}

fn state_along(a: f64, dir: [f64; 3]) -> QubitState {
    let norm = (dir[0] * dir[0] + dir[1] * dir[1] + dir[2] * dir[2]).sqrt();
    let theta = (dir[0].hypot(dir[1])).atan2(dir[2]);
    let phi = if dir[0] == 0.0 && dir[1] == 0.0 {
        0.0
    } else {
        dir[1].atan2(dir[0])
    };
    debug_assert!((norm - 1.0).abs() < 1e-9);
    // unitary evolution keeps the Bloch length exactly
    QubitState::new(a, theta.clamp(0.0, std::f64::consts::PI), phi)
        .expect("rotated state stays on the Bloch ball")
}

pub fn conditional_states(spin: &SpinSpec, t: f64) -> ConditionalPair {
    let v_up = conditional_unitary(spin, Pointer::Up, t);
    let v_down = conditional_unitary(spin, Pointer::Down, t);
    let init = spin.init;
    let n = init.direction();
    let n_up = rotate_direction(&v_up, n);
    let n_down = rotate_direction(&v_down, n);
    let theta_sep = if init.a() == 0.0 {
        0.0
    } else {
        vector_angle(n_up, n_down)
    };
    let rho = bloch_to_density(&init);
    let gamma = (v_down.dagger() * v_up * rho).trace();
    ConditionalPair {
        up: state_along(init.a(), n_up),
        down: state_along(init.a(), n_down),
        gamma,
        theta_sep,
    }
}

/// `gamma_k = tr[V_up rho_k(0) V_down^dagger]`.
pub fn decoherence_factor_spin(spin: &SpinSpec, t: f64) -> Complex {
    let v_up = conditional_unitary(spin, Pointer::Up, t);
    let v_down = conditional_unitary(spin, Pointer::Down, t);
    (v_down.dagger() * v_up * bloch_to_density(&spin.init)).trace()
}

/// Product of per-spin decoherence factors; 1 for an empty list.
pub fn decoherence_factor_fragment(spins: &[SpinSpec], t: f64) -> Complex {
    spins
        .iter()
        .map(|s| decoherence_factor_spin(s, t))
        .fold(Complex::new(1.0, 0.0), |acc, g| acc * g)
}

/// `ln |gamma_k|^2` for each spin, the additive form used by the fragment
/// sums in the Holevo module.
pub fn log_decoherence_sq(spins: &[SpinSpec], t: f64) -> Vec<f64> {
    spins
        .iter()
        .map(|s| decoherence_factor_spin(s, t).norm_sqr().ln())
        .collect()
}

/// The axis left invariant by `V_down^dagger V_up`, reported on the branch
/// with azimuth `pi/2` (or its continuation through the tan pole). At
/// `omega = 0` this is the z-axis.
pub fn insensitive_axis(spin: &SpinSpec, t: f64) -> InsensitiveAxis {
    let w = spin.effective_field();
    if spin.omega == 0.0 || w == 0.0 {
        return InsensitiveAxis {
            theta_star: 0.0,
            phi_star: 0.0,
        };
    }
    let (sn, cs) = (w * t).sin_cos();
    // signed angle from +z in the yz-plane, folded into (-pi/2, pi/2]; the
    // folded value is arctan(omega tan(w t) / w) wherever that is defined
    let mut signed = (spin.omega * sn).atan2(w * cs);
    let half = std::f64::consts::FRAC_PI_2;
    if signed > half {
        signed -= std::f64::consts::PI;
    } else if signed <= -half {
        signed += std::f64::consts::PI;
    }
    let (theta_star, phi_star) = if signed >= 0.0 {
        (signed, half)
    } else {
        (-signed, 3.0 * half)
    };
    InsensitiveAxis {
        theta_star,
        phi_star,
    }
}

/// Angle between the initial Bloch direction and the insensitive axis.
pub fn angle_from_axis(spin: &SpinSpec, t: f64) -> f64 {
    vector_angle(spin.init.direction(), insensitive_axis(spin, t).direction())
}

/// The record-quality factor `f(t)` multiplying `sin^2` of the axis angle.
pub fn record_factor(spin: &SpinSpec, t: f64) -> f64 {
    let w = spin.effective_field();
    if w == 0.0 {
        return 0.0;
    }
    let g2 = spin.g * spin.g;
    let (sn, cs) = (w * t).sin_cos();
    // g^4 sin^2(2wt) + 4 g^2 omega^2 sin^2(wt), over w^4; sin(2wt) = 2 sn cs
    let num = g2 * g2 * (2.0 * sn * cs).powi(2) + 4.0 * g2 * spin.omega.powi(2) * sn * sn;
    num / w.powi(4)
}

/// `sin^2(Theta/2)` for a spin, from the closed form
/// `f(t) sin^2(angle from axis)`.
pub fn separation_sin2_half(spin: &SpinSpec, t: f64) -> f64 {
    let th = angle_from_axis(spin, t);
    record_factor(spin, t) * th.sin().powi(2)
}
