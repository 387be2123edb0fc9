//! Coupling-band averages, haziness, and the ready-made scenarios for the
//! three numerical experiments (Gaussian-scaled couplings, mixed spins, and
//! a finite band of couplings).

use std::f64::consts::FRAC_PI_2;

use crate::chernoff::{redundancy_qcb, RedundancyResult};
use crate::error::{Error, Result};
use crate::model::{
    linspace, Distribution, EnvironmentKind, EnvironmentSpec, Scenario, SpinSpec, SystemSpec,
    TimeGrid,
};
use crate::qmath::{binary_entropy, QubitState};

/// Spins with couplings uniform on `[0, width]` and a shared mixedness and
/// polar angle.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BandSpec {
    width: f64,
    lambda: f64,
    theta: f64,
}

impl BandSpec {
    pub fn new(width: f64, lambda: f64, theta: f64) -> Result<Self> {
        let mut errs = Vec::new();
        if !(width > 0.0 && width.is_finite()) {
            errs.push(format!("band.width: must be positive, got {width}"));
        }
        if !(0.0..=1.0).contains(&lambda) {
            errs.push(format!("band.lambda: must lie in [0, 1], got {lambda}"));
        }
        if !theta.is_finite() {
            errs.push("band.theta: not finite".into());
        }
        if errs.is_empty() {
            Ok(BandSpec {
                width,
                lambda,
                theta,
            })
        } else {
            Err(Error::Validation(errs))
        }
    }

    pub fn width(&self) -> f64 {
        self.width
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    /// `1/tau_D^2 = <4 g^2> sin^2 theta = (4 W^2 / 3) sin^2 theta`.
    pub fn decoherence_rate_sq(&self) -> f64 {
        4.0 * self.width * self.width / 3.0 * self.theta.sin().powi(2)
    }
}

/// Bloch length `a` with `H((1 + a)/2) = h`, by bisection to 1e-12.
pub fn haziness_to_bloch_length(h: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&h) {
        return Err(Error::BadHaziness(h));
    }
    if h == 0.0 {
        return Ok(1.0);
    }
    // H((1 + a)/2) falls from 1 at a = 0 to 0 at a = 1
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    while hi - lo > 1e-13 {
        let mid = 0.5 * (lo + hi);
        if binary_entropy(0.5 * (1.0 + mid))? > h {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// `1/2 - sin(x)/(2x)`, the band average of `sin^2(2gt)` at `x = 4Wt`.
fn band_sin2_mean(x: f64) -> f64 {
    if x.abs() < 0.1 {
        // sum_{n>=1} (-1)^(n+1) x^(2n) / (2 (2n+1)!)
        let x2 = x * x;
        let mut term = x2 / 12.0;
        let mut sum = 0.0;
        for n in 1..8 {
            sum += term;
            let k = (2 * n + 2) as f64;
            term *= -x2 / (k * (k + 1.0));
        }
        sum
    } else {
        0.5 - x.sin() / (2.0 * x)
    }
}

/// `<1 - lambda sin^2(2gt) sin^2 theta>` over `g ~ U[0, W]`.
pub fn band_mean_overlap(band: &BandSpec, t: f64) -> f64 {
    1.0 - band_mean_deficit(band, t)
}

fn band_mean_deficit(band: &BandSpec, t: f64) -> f64 {
    band.lambda * band.theta.sin().powi(2) * band_sin2_mean(4.0 * band.width * t)
}

/// The `t -> infinity` centre of the band overlap, `1 - lambda sin^2 theta / 2`.
pub fn band_asymptotic_overlap(band: &BandSpec) -> f64 {
    1.0 - 0.5 * band.lambda * band.theta.sin().powi(2)
}

/// QCB redundancy of `n_env` band spins.
pub fn band_redundancy(band: &BandSpec, n_env: usize, t: f64, delta: f64) -> Result<RedundancyResult> {
    let xi = -(-band_mean_deficit(band, t)).ln_1p();
    redundancy_qcb(xi, n_env, delta)
}

/// The large-`t` level about which the band redundancy oscillates.
pub fn band_redundancy_asymptote(band: &BandSpec, n_env: usize, delta: f64) -> Result<f64> {
    let xi = -(-0.5 * band.lambda * band.theta.sin().powi(2)).ln_1p();
    Ok(redundancy_qcb(xi, n_env, delta)?.r_delta)
}

/// Gaussian-scaled couplings `G ~ U[-2, 2]`, spins on the equator, an
/// unbiased system qubit and `delta = 1e-16`.
pub fn make_fig3_scenario(n_env: usize, seed: u64) -> Scenario {
    Scenario {
        system: SystemSpec::pure(0.5),
        environment: EnvironmentSpec {
            kind: EnvironmentKind::Random {
                g: Distribution::uniform(-2.0, 2.0),
                omega: Distribution::Constant(0.0),
                theta: Distribution::Constant(FRAC_PI_2),
                phi: Distribution::Constant(0.0),
                a: Distribution::Constant(1.0),
                count: n_env,
                gaussian_scaling: true,
            },
            seed,
        },
        times: TimeGrid::Linspace {
            start: 0.0,
            stop: 20.0,
            count: 81,
        },
        delta: 1e-16,
    }
}

/// `n_env` identical equatorial spins with `g = 1/sqrt(n_env)` and Bloch
/// length set by the haziness `h`, observed at time `t`.
pub fn make_fig4_scenario(h: f64, p_up: f64, t: f64, n_env: usize) -> Result<Scenario> {
    let a = haziness_to_bloch_length(h)?;
    let g = 1.0 / (n_env.max(1) as f64).sqrt();
    let spin = SpinSpec::new(g, 0.0, QubitState::new(a, FRAC_PI_2, 0.0)?);
    Ok(Scenario {
        system: SystemSpec::pure(p_up),
        environment: EnvironmentSpec::symmetric(spin, n_env),
        times: TimeGrid::List(vec![t]),
        delta: 1e-16,
    })
}

/// 32 equatorial spins with unscaled couplings `g ~ U[0, 1]` and
/// `delta = 0.1`.
pub fn make_fig5_scenario(n_env: usize, delta: f64, seed: u64) -> Scenario {
    Scenario {
        system: SystemSpec::pure(0.5),
        environment: EnvironmentSpec {
            kind: EnvironmentKind::Random {
                g: Distribution::uniform(0.0, 1.0),
                omega: Distribution::Constant(0.0),
                theta: Distribution::Constant(FRAC_PI_2),
                phi: Distribution::Constant(0.0),
                a: Distribution::Constant(1.0),
                count: n_env,
                gaussian_scaling: false,
            },
            seed,
        },
        times: TimeGrid::List(linspace(0.0, 20.0, 100)),
        delta,
    }
}
