//! Quantum Chernoff information and the redundancy estimators built on it.
//!
//! Units: Chernoff exponents (`xi`) are in nats, entropies and Holevo
//! quantities in bits. Functions that mix the two say so.

use std::f64::consts::{LN_2, PI};

use rayon::prelude::*;
use serde::Serialize;

use crate::dynamics::{angle_from_axis, conditional_states, record_factor};
use crate::error::{Error, Result};
use crate::model::{linspace, SpinSpec, SystemSpec};
use crate::qmath::{
    binary_entropy, density_to_bloch, eig2_hermitian, fractional_power, pairwise_mean,
    trace_norm, DenseState, Mat2,
};

/// Overlaps are floored here before taking logs.
pub const OVERLAP_FLOOR: f64 = 1e-300;

/// Tolerance in `c` for the exponent search.
pub const C_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ChernoffResult {
    /// `tr[rho1^c rho2^(1-c)]` at `c_star`.
    pub overlap: f64,
    pub c_star: f64,
    /// `-ln overlap`, nats.
    pub xi: f64,
}

/// `lambda = 1 - sqrt(1 - a^2)`: how much of a record a spin of Bloch length
/// `a` can hold.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct MixednessFactor(f64);

impl MixednessFactor {
    pub fn from_bloch_length(a: f64) -> Self {
        let a = a.clamp(0.0, 1.0);
        // a^2 / (1 + sqrt(1 - a^2)) avoids cancellation at small a
        MixednessFactor(a * a / (1.0 + (1.0 - a * a).sqrt()))
    }

    pub fn new(lambda: f64) -> Result<Self> {
        if (0.0..=1.0).contains(&lambda) {
            Ok(MixednessFactor(lambda))
        } else {
            Err(Error::BadProbability(lambda))
        }
    }

    pub fn value(&self) -> f64 {
        self.0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RedundancyMethod {
    Qcb,
    Corrected,
    Discretized,
    Exact,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RedundancyResult {
    /// Typical Chernoff information, nats. NaN where it was not used.
    pub xi_bar: f64,
    /// Fragment size needed for a `(1 - delta)` record; infinite if none.
    pub f_delta: f64,
    pub r_delta: f64,
    pub method: RedundancyMethod,
    /// False when no fragment (up to the whole environment) reaches the
    /// threshold; `r_delta` is then 0.
    pub reached: bool,
}

fn check_delta(delta: f64) -> Result<()> {
    if delta > 0.0 && delta < 1.0 {
        Ok(())
    } else {
        Err(Error::BadDelta(delta))
    }
}

fn neg_ln(overlap: f64) -> f64 {
    -overlap.max(OVERLAP_FLOOR).ln()
}

/// `tr[rho1^c rho2^(1-c)]` by explicit matrix powers.
pub fn chernoff_overlap(rho1: &Mat2, rho2: &Mat2, c: f64) -> Result<f64> {
    density_to_bloch(rho1)?;
    density_to_bloch(rho2)?;
    let a = fractional_power(rho1, c)?;
    let b = fractional_power(rho2, 1.0 - c)?;
    let tr = (a * b).trace();
    if tr.im.abs() > 1e-12 {
        return Err(Error::Numerical(format!(
            "overlap has imaginary part {:e}",
            tr.im
        )));
    }
    Ok(tr.re.clamp(0.0, 1.0))
}

/// The overlap as a function of `c`, from cached eigendecompositions:
/// `sum_ij l_i^c m_j^(1-c) |<u_i|v_j>|^2`.
struct OverlapCurve {
    // (ln l_i - ln m_j, ln m_j, weight) for every pair with both eigenvalues
    // > 0; with 0^c = 0 the others never contribute
    terms: Vec<(f64, f64, f64)>,
}

impl OverlapCurve {
    fn new(rho1: &Mat2, rho2: &Mat2) -> Result<Self> {
        density_to_bloch(rho1)?;
        density_to_bloch(rho2)?;
        let e1 = eig2_hermitian(rho1)?;
        let e2 = eig2_hermitian(rho2)?;
        let mut terms = Vec::with_capacity(4);
        for i in 0..2 {
            for j in 0..2 {
                let (l, m) = (e1.values[i].max(0.0), e2.values[j].max(0.0));
                let mut ip = num_complex::Complex64::new(0.0, 0.0);
                for k in 0..2 {
                    ip += e1.vectors.get(k, i).conj() * e2.vectors.get(k, j);
                }
                let w = ip.norm_sqr();
                if l > 0.0 && m > 0.0 {
                    terms.push((l.ln() - m.ln(), m.ln(), w));
                }
            }
        }
        Ok(OverlapCurve { terms })
    }

    fn value(&self, c: f64) -> f64 {
        self.terms
            .iter()
            .map(|&(dl, lm, w)| w * (lm + c * dl).exp())
            .sum()
    }

    /// `value(x) - value(y)` without the cancellation of subtracting two
    /// nearly equal overlaps.
    fn diff(&self, x: f64, y: f64) -> f64 {
        self.terms
            .iter()
            .map(|&(dl, lm, w)| w * (lm + y * dl).exp() * ((x - y) * dl).exp_m1())
            .sum()
    }
}

/// Minimizes the overlap over `c` in `[0, 1]` by golden-section search.
/// Comparisons use an exact-difference form, and ties shrink the bracket from
/// both sides, so flat objectives settle at the bracket centre `c = 1/2`.
pub fn optimize_c(rho1: &Mat2, rho2: &Mat2) -> Result<ChernoffResult> {
    let curve = OverlapCurve::new(rho1, rho2)?;
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (0.0f64, 1.0f64);
    let mut x1 = b - inv_phi * (b - a);
    let mut x2 = a + inv_phi * (b - a);
    while b - a > C_TOLERANCE {
        let d = curve.diff(x1, x2);
        if d < 0.0 {
            b = x2;
            x2 = x1;
            x1 = b - inv_phi * (b - a);
        } else if d > 0.0 {
            a = x1;
            x1 = x2;
            x2 = a + inv_phi * (b - a);
        } else {
            a = x1;
            b = x2;
            x1 = b - inv_phi * (b - a);
            x2 = a + inv_phi * (b - a);
        }
    }
    let mut c_star = 0.5 * (a + b);
    for edge in [0.0, 1.0] {
        if curve.diff(edge, c_star) < 0.0 {
            c_star = edge;
        }
    }
    let overlap = curve.value(c_star).clamp(0.0, 1.0);
    Ok(ChernoffResult {
        overlap,
        c_star,
        xi: neg_ln(overlap),
    })
}

/// Per-spin overlap `tr[rho_up^c rho_down^(1-c)]` by the matrix route.
pub fn spin_overlap(spin: &SpinSpec, t: f64, c: f64) -> Result<f64> {
    let pair = conditional_states(spin, t);
    chernoff_overlap(&pair.up.density(), &pair.down.density(), c)
}

/// Typical Chernoff information: the per-spin overlaps are averaged first,
/// then the log is taken. Nats.
pub fn xi_bar_typical(env: &[SpinSpec], t: f64, c: f64) -> Result<f64> {
    if env.is_empty() {
        return Err(Error::EmptyEnvironment);
    }
    let deficits: Vec<f64> = env
        .par_iter()
        .map(|s| spin_overlap(s, t, c).map(|o| 1.0 - o))
        .collect::<Result<_>>()?;
    Ok(-(-pairwise_mean(&deficits)).ln_1p())
}

/// Single-spin closed form `-ln(1 - lambda sin^2(Theta/2))`.
pub fn xi_closed_mixed(lambda: MixednessFactor, theta_sep: f64) -> f64 {
    let s = (theta_sep / 2.0).sin();
    -(-lambda.value() * s * s).ln_1p()
}

/// No-field closed form `-ln(1 - lambda sin^2(2gt) sin^2(theta))`.
pub fn xi_closed_no_field(spin: &SpinSpec, t: f64) -> Result<f64> {
    if spin.omega != 0.0 {
        return Err(Error::FieldPresent(spin.omega));
    }
    let lambda = MixednessFactor::from_bloch_length(spin.init.a()).value();
    let s = (2.0 * spin.g * t).sin();
    let st = spin.init.theta().sin();
    Ok(-(-lambda * s * s * st * st).ln_1p())
}

/// `lambda f(t) sin^2(angle from the insensitive axis)`: one minus the spin's
/// overlap at `c = 1/2`.
pub fn record_deficit(spin: &SpinSpec, t: f64) -> f64 {
    let lambda = MixednessFactor::from_bloch_length(spin.init.a()).value();
    if lambda == 0.0 {
        return 0.0;
    }
    let st = angle_from_axis(spin, t).sin();
    lambda * record_factor(spin, t) * st * st
}

/// Closed form with a transverse field, valid for every spin.
pub fn xi_closed_field(spin: &SpinSpec, t: f64) -> f64 {
    -(-record_deficit(spin, t)).ln_1p()
}

/// Mean per-spin deficit `<1 - overlap>` from the closed form.
pub fn mean_record_deficit(env: &[SpinSpec], t: f64) -> Result<f64> {
    if env.is_empty() {
        return Err(Error::EmptyEnvironment);
    }
    let d: Vec<f64> = env.par_iter().map(|s| record_deficit(s, t)).collect();
    Ok(pairwise_mean(&d))
}

/// Typical Chernoff information from the closed form. Nats.
pub fn xi_bar_closed(env: &[SpinSpec], t: f64) -> Result<f64> {
    Ok(-(-mean_record_deficit(env, t)?).ln_1p())
}

/// `R = #E xi / ln(1/delta)`, capped at one spin per fragment.
pub fn redundancy_qcb(xi_bar: f64, n_env: usize, delta: f64) -> Result<RedundancyResult> {
    check_delta(delta)?;
    if n_env == 0 {
        return Err(Error::EmptyEnvironment);
    }
    let ln_inv = -delta.ln();
    let n = n_env as f64;
    if xi_bar <= 0.0 {
        return Ok(RedundancyResult {
            xi_bar: xi_bar.max(0.0),
            f_delta: f64::INFINITY,
            r_delta: 0.0,
            method: RedundancyMethod::Qcb,
            reached: false,
        });
    }
    let f = ln_inv / xi_bar;
    let (f_delta, r_delta) = if f < 1.0 {
        (1.0, n)
    } else {
        (f, n * xi_bar / ln_inv)
    };
    Ok(RedundancyResult {
        xi_bar,
        f_delta,
        r_delta,
        method: RedundancyMethod::Qcb,
        reached: f_delta <= n,
    })
}

/// The finite-`delta` constant `C = H_S (p_up - p_down) ln 2 /
/// (p_up p_down ln(p_up/p_down))`, with `C = ln 4` at `p_up = 1/2`.
pub fn correction_constant(system: &SystemSpec) -> Result<f64> {
    let p = system.p_up;
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::TrivialSystem(p));
    }
    if (p - 0.5).abs() < 1e-6 {
        return Ok(4f64.ln());
    }
    let q = 1.0 - p;
    let hs = binary_entropy(p)?;
    Ok(hs * (p - q) * LN_2 / (p * q * (p / q).ln()))
}

/// `R = #E ln<overlap> / (ln delta + ln C)` with `xi_bar = -ln<overlap>`
/// (passed as the exponent so that tiny deficits survive); approaches the
/// plain estimate from above as `delta -> 0`.
pub fn redundancy_corrected(
    xi_bar: f64,
    n_env: usize,
    delta: f64,
    system: &SystemSpec,
) -> Result<RedundancyResult> {
    check_delta(delta)?;
    if n_env == 0 {
        return Err(Error::EmptyEnvironment);
    }
    let c = correction_constant(system)?;
    let denom = delta.ln() + c.ln();
    if denom >= 0.0 {
        return Err(Error::BadDelta(delta));
    }
    let xi = xi_bar.max(0.0);
    if xi <= 0.0 {
        return Ok(RedundancyResult {
            xi_bar: 0.0,
            f_delta: f64::INFINITY,
            r_delta: 0.0,
            method: RedundancyMethod::Corrected,
            reached: false,
        });
    }
    let n = n_env as f64;
    let f = -denom / xi;
    let (f_delta, r_delta) = if f < 1.0 { (1.0, n) } else { (f, n / f) };
    Ok(RedundancyResult {
        xi_bar: xi,
        f_delta,
        r_delta,
        method: RedundancyMethod::Corrected,
        reached: f_delta <= n,
    })
}

/// Continuous fragment size `ln delta / ln<overlap>` for the realized spins.
pub fn continuous_fragment_size(env: &[SpinSpec], t: f64, delta: f64) -> Result<f64> {
    check_delta(delta)?;
    let xi = xi_bar_closed(env, t)?;
    Ok(if xi > 0.0 { -delta.ln() / xi } else { f64::INFINITY })
}

/// `R = #E / ceil(F^c)`, fragment size floored at one spin.
pub fn redundancy_discretized(env: &[SpinSpec], t: f64, delta: f64) -> Result<RedundancyResult> {
    check_delta(delta)?;
    let xi = xi_bar_closed(env, t)?;
    if xi <= 0.0 {
        return Err(Error::ZeroInformation);
    }
    let f = (-delta.ln() / xi).ceil().max(1.0);
    let n = env.len() as f64;
    Ok(RedundancyResult {
        xi_bar: xi,
        f_delta: f,
        r_delta: n / f,
        method: RedundancyMethod::Discretized,
        reached: f <= n,
    })
}

/// `max(0, H_S - H(P_e))`, bits.
pub fn fano_lower_bound(h_system: f64, p_error: f64) -> Result<f64> {
    if !(0.0..=0.5).contains(&p_error) {
        return Err(Error::BadProbability(p_error));
    }
    Ok((h_system - binary_entropy(p_error)?).max(0.0))
}

/// Minimum error probability for telling the two conditional fragment states
/// apart with priors `p_up`, `p_down`.
pub fn helstrom_error(
    system: &SystemSpec,
    frag_up: &DenseState,
    frag_down: &DenseState,
) -> Result<f64> {
    if frag_up.dim() != frag_down.dim() {
        return Err(Error::DimMismatch(frag_up.dim(), frag_down.dim()));
    }
    let diff = frag_up.weighted_sum(system.p_up, frag_down, -system.p_down());
    let norm = trace_norm(frag_up.dim(), &diff)?;
    Ok((0.5 * (1.0 - norm)).clamp(0.0, 0.5))
}

/// `tau_D` from `1/tau_D^2 = <4 G^2 sin^2 theta>` with `G^2 = #E g^2`.
/// Infinite when no spin can decohere the system.
pub fn decoherence_time(env: &[SpinSpec]) -> Result<f64> {
    if env.is_empty() {
        return Err(Error::EmptyEnvironment);
    }
    if let Some(s) = env.iter().find(|s| s.omega != 0.0) {
        return Err(Error::FieldPresent(s.omega));
    }
    let n = env.len() as f64;
    let rates: Vec<f64> = env
        .iter()
        .map(|s| 4.0 * n * s.g * s.g * s.init.theta().sin().powi(2))
        .collect();
    let rate = pairwise_mean(&rates);
    Ok(if rate > 0.0 {
        1.0 / rate.sqrt()
    } else {
        f64::INFINITY
    })
}

/// Spin receptivity `alpha = <lambda>`.
pub fn receptivity(env: &[SpinSpec]) -> Result<f64> {
    if env.is_empty() {
        return Err(Error::EmptyEnvironment);
    }
    let l: Vec<f64> = env
        .iter()
        .map(|s| MixednessFactor::from_bloch_length(s.init.a()).value())
        .collect();
    Ok(pairwise_mean(&l))
}

/// Quadratic growth `alpha t^2 / tau_D^2 / ln(1/delta)`.
pub fn redundancy_gaussian(alpha: f64, tau_d: f64, t: f64, delta: f64) -> Result<f64> {
    check_delta(delta)?;
    if !(tau_d > 0.0) {
        return Err(Error::Numerical(format!("decoherence time {tau_d}")));
    }
    Ok(alpha * (t / tau_d).powi(2) / -delta.ln())
}

/// `t* = tau_D sqrt(2 ln(1/delta))`, where the quadratic law reaches `R = 2`.
pub fn onset_time(tau_d: f64, delta: f64) -> Result<f64> {
    check_delta(delta)?;
    Ok(tau_d * (-2.0 * delta.ln()).sqrt())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MeshPoint {
    pub theta: f64,
    pub phi: f64,
    pub xi: f64,
}

/// Chernoff information over a `(theta, phi)` grid of initial directions with
/// fixed Bloch length `a`; both angles include their end points.
pub fn bloch_mesh(
    template: &SpinSpec,
    t: f64,
    a: f64,
    grid: (usize, usize),
) -> Result<Vec<MeshPoint>> {
    let (nt, np) = grid;
    if nt < 2 || np < 2 {
        return Err(Error::Validation(vec![format!(
            "mesh: grid must be at least 2x2, got {nt}x{np}"
        )]));
    }
    let thetas = linspace(0.0, PI, nt);
    let phis = linspace(0.0, 2.0 * PI, np);
    let nodes: Vec<(f64, f64)> = thetas
        .iter()
        .flat_map(|&th| phis.iter().map(move |&ph| (th, ph)))
        .collect();
    nodes
        .par_iter()
        .map(|&(theta, phi)| {
            let spin = SpinSpec::from_bloch(template.g, template.omega, a, theta, phi)?;
            Ok(MeshPoint {
                theta,
                phi,
                xi: xi_closed_field(&spin, t),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::insensitive_axis;
    use crate::qmath::{bloch_to_density, kron, DenseCap, QubitState};
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use std::f64::consts::FRAC_PI_2;

    const T_FIG2: f64 = 15.0 * PI / 64.0;

    fn spin(g: f64, omega: f64, a: f64, theta: f64, phi: f64) -> SpinSpec {
        SpinSpec::from_bloch(g, omega, a, theta, phi).unwrap()
    }

    fn matrix_xi(s: &SpinSpec, t: f64) -> ChernoffResult {
        let pair = conditional_states(s, t);
        optimize_c(&pair.up.density(), &pair.down.density()).unwrap()
    }

    #[test]
    fn overlap_examples() {
        let r = bloch_to_density(&QubitState::new(0.6, 1.0, 2.0).unwrap());
        for c in [0.0, 0.3, 0.5, 1.0] {
            assert_abs_diff_eq!(chernoff_overlap(&r, &r, c).unwrap(), 1.0, epsilon = 1e-12);
        }
        let up = Mat2::diag(1.0, 0.0);
        let dn = Mat2::diag(0.0, 1.0);
        assert_abs_diff_eq!(chernoff_overlap(&up, &dn, 0.5).unwrap(), 0.0, epsilon = 1e-15);

        // pure states: overlap is |<a|b>|^2 = cos^2(Theta/2) for every c in (0, 1)
        let a = QubitState::pure(0.4, 0.1).unwrap();
        let b = QubitState::pure(1.9, 2.5).unwrap();
        let th = crate::qmath::vector_angle(a.direction(), b.direction());
        for c in [0.1, 0.5, 0.9] {
            let o = chernoff_overlap(&a.density(), &b.density(), c).unwrap();
            assert_abs_diff_eq!(o, (th / 2.0).cos().powi(2), epsilon = 1e-12);
        }
    }

    #[test]
    fn optimizer_examples() {
        let r = bloch_to_density(&QubitState::new(0.6, 1.0, 2.0).unwrap());
        let res = optimize_c(&r, &r).unwrap();
        assert_abs_diff_eq!(res.overlap, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(res.xi, 0.0, epsilon = 1e-12);

        let s = spin(0.7, 0.4, 0.8, 1.1, 0.3);
        let res = matrix_xi(&s, 1.3);
        assert!((res.c_star - 0.5).abs() < 1e-6);
        let pair = conditional_states(&s, 1.3);
        let at_half = chernoff_overlap(&pair.up.density(), &pair.down.density(), 0.5).unwrap();
        assert!(res.overlap <= at_half + 1e-15);
    }

    #[test]
    fn optimizer_finds_asymmetric_minimum() {
        // commuting diagonal states: overlap(c) = sum p_i^c q_i^(1-c), whose
        // minimum sits away from 1/2; compare with a dense scan
        let r1 = Mat2::diag(0.9, 0.1);
        let r2 = Mat2::diag(0.4, 0.6);
        let res = optimize_c(&r1, &r2).unwrap();
        let scan = (0..=100_000)
            .map(|i| i as f64 / 100_000.0)
            .map(|c| (c, 0.9f64.powf(c) * 0.4f64.powf(1.0 - c) + 0.1f64.powf(c) * 0.6f64.powf(1.0 - c)))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap();
        assert!((res.c_star - scan.0).abs() < 2e-5);
        assert!(res.overlap <= scan.1 + 1e-15);
        assert!((res.c_star - 0.5).abs() > 0.01);
    }

    #[test]
    fn typical_xi_examples() {
        let s = spin(0.8, 0.0, 1.0, 1.0, 0.0);
        assert_eq!(xi_bar_typical(&[s], 0.0, 0.5).unwrap(), 0.0);
        let sym = vec![s; 5];
        let single = matrix_xi(&s, 0.9).xi;
        assert_abs_diff_eq!(xi_bar_typical(&sym, 0.9, 0.5).unwrap(), single, epsilon = 1e-12);

        // overlaps 0.5490 and 1: the mean is taken before the log
        let a = spin(0.5, 0.0, 1.0, FRAC_PI_2, 0.0);
        let b = spin(0.5, 0.0, 1.0, 0.0, 0.0);
        let xi = xi_bar_typical(&[a, b], T_FIG2, 0.5).unwrap();
        let o = 1.0 - T_FIG2.sin().powi(2);
        assert_abs_diff_eq!(xi, -((o + 1.0) / 2.0).ln(), epsilon = 1e-12);
        assert_abs_diff_eq!(xi, 0.2556, epsilon = 1e-4);
        assert!(matches!(xi_bar_typical(&[], 1.0, 0.5), Err(Error::EmptyEnvironment)));
    }

    #[test]
    fn closed_mixed_examples() {
        let one = MixednessFactor::new(1.0).unwrap();
        assert_eq!(xi_closed_mixed(MixednessFactor::new(0.0).unwrap(), 1.0), 0.0);
        assert_eq!(xi_closed_mixed(one, 0.0), 0.0);
        let th = conditional_states(&spin(0.5, 0.0, 1.0, FRAC_PI_2, 0.0), T_FIG2).theta_sep;
        let want = matrix_xi(&spin(0.5, 0.0, 1.0, FRAC_PI_2, 0.0), T_FIG2).xi;
        assert_abs_diff_eq!(xi_closed_mixed(one, th), want, epsilon = 1e-12);
        assert_abs_diff_eq!(want, 0.5996, epsilon = 1e-4);
    }

    #[test]
    fn closed_no_field_examples() {
        assert_eq!(xi_closed_no_field(&spin(0.5, 0.0, 1.0, 0.0, 0.0), 2.0).unwrap(), 0.0);
        let pure = spin(0.5, 0.0, 1.0, FRAC_PI_2, 0.0);
        assert_abs_diff_eq!(xi_closed_no_field(&pure, T_FIG2).unwrap(), 0.5996, epsilon = 1e-4);

        // a = 11/16: lambda = 1 - sqrt(135)/16; frozen from the matrix route
        let hazy = spin(0.5, 0.0, 11.0 / 16.0, FRAC_PI_2, 0.0);
        let lambda = MixednessFactor::from_bloch_length(11.0 / 16.0).value();
        assert_abs_diff_eq!(lambda, 1.0 - 135f64.sqrt() / 16.0, epsilon = 1e-15);
        let closed = xi_closed_no_field(&hazy, T_FIG2).unwrap();
        assert_abs_diff_eq!(closed, matrix_xi(&hazy, T_FIG2).xi, epsilon = 1e-10);
        assert_abs_diff_eq!(closed, 0.131806, epsilon = 1e-6);

        assert!(matches!(
            xi_closed_no_field(&spin(0.5, 0.1, 1.0, 1.0, 0.0), 1.0),
            Err(Error::FieldPresent(_))
        ));
    }

    #[test]
    fn closed_field_examples() {
        let s = spin(0.7, 0.0, 0.9, 1.2, 0.4);
        assert_abs_diff_eq!(
            xi_closed_field(&s, 1.7),
            xi_closed_no_field(&s, 1.7).unwrap(),
            epsilon = 1e-12
        );
        let mut fig2c = spin(0.5, FRAC_PI_2, 1.0, FRAC_PI_2, 0.0);
        assert_abs_diff_eq!(xi_closed_field(&fig2c, T_FIG2), matrix_xi(&fig2c, T_FIG2).xi, epsilon = 1e-10);
        fig2c.init = insensitive_axis(&fig2c, T_FIG2).pure_state();
        assert!(xi_closed_field(&fig2c, T_FIG2) < 1e-12);
    }

    #[test]
    fn qcb_redundancy_examples() {
        let r = redundancy_qcb(0.0, 10, 0.1).unwrap();
        assert_eq!(r.r_delta, 0.0);
        assert!(!r.reached);
        let r = redundancy_qcb(0.5996, 100, (-10f64).exp()).unwrap();
        assert_abs_diff_eq!(r.r_delta, 5.996, epsilon = 1e-9);
        let r2 = redundancy_qcb(0.5996, 200, (-10f64).exp()).unwrap();
        assert_abs_diff_eq!(r2.r_delta, 2.0 * r.r_delta, epsilon = 1e-12);
        assert!(matches!(redundancy_qcb(0.1, 10, 0.0), Err(Error::BadDelta(_))));
        // large xi saturates at one spin per fragment
        let r = redundancy_qcb(50.0, 10, 0.1).unwrap();
        assert_eq!((r.f_delta, r.r_delta), (1.0, 10.0));
    }

    #[test]
    fn corrected_redundancy_examples() {
        assert_abs_diff_eq!(
            correction_constant(&SystemSpec::pure(0.5)).unwrap(),
            4f64.ln(),
            epsilon = 1e-15
        );
        // the general expression tends to ln 4 as p -> 1/2
        let near = correction_constant(&SystemSpec::pure(0.5 + 1e-4)).unwrap();
        assert_abs_diff_eq!(near, 4f64.ln(), epsilon = 1e-7);

        let o: f64 = 0.5490;
        let r = redundancy_corrected(-o.ln(), 100, 1e-10, &SystemSpec::pure(0.5)).unwrap();
        let want = 100.0 * o.ln() / (1e-10f64.ln() + 4f64.ln().ln());
        assert_abs_diff_eq!(r.r_delta, want, epsilon = 1e-12);
        assert_abs_diff_eq!(r.r_delta, 2.642, epsilon = 1e-3);

        let mut prev = f64::INFINITY;
        for k in [4, 8, 16, 32, 64, 128, 256] {
            let delta = 10f64.powi(-k);
            let c = redundancy_corrected(-o.ln(), 100, delta, &SystemSpec::pure(0.5)).unwrap();
            let q = redundancy_qcb(-o.ln(), 100, delta).unwrap();
            let ratio = c.r_delta / q.r_delta;
            assert!(ratio > 1.0 && ratio < prev);
            prev = ratio;
        }
        assert!(prev - 1.0 < 2e-3);
        assert!(matches!(
            redundancy_corrected(-o.ln(), 10, 0.1, &SystemSpec::pure(1.0)),
            Err(Error::TrivialSystem(_))
        ));
    }

    #[test]
    fn discretized_examples() {
        // 32 spins with per-spin deficit d: choose d to land F^c in (1, 2]
        let delta = 0.1f64;
        let sym = |xi_target: f64| {
            // pure spin on the equator with sin^2(2gt) = 1 - exp(-xi)
            let s2 = 1.0 - (-xi_target).exp();
            let g = s2.sqrt().asin() / 2.0;
            vec![spin(g, 0.0, 1.0, FRAC_PI_2, 0.0); 32]
        };
        let ln_inv = -delta.ln();
        let r = redundancy_discretized(&sym(ln_inv / 1.5), 1.0, delta).unwrap();
        assert_eq!((r.f_delta, r.r_delta), (2.0, 16.0));
        let r = redundancy_discretized(&sym(ln_inv / 2.5), 1.0, delta).unwrap();
        assert_eq!(r.f_delta, 3.0);
        assert_abs_diff_eq!(r.r_delta, 32.0 / 3.0, epsilon = 1e-12);
        // delta close to 1: single-spin fragments
        let r = redundancy_discretized(&sym(0.5), 1.0, 0.999).unwrap();
        assert_eq!((r.f_delta, r.r_delta), (1.0, 32.0));
        assert!(matches!(
            redundancy_discretized(&sym(0.5), 0.0, 0.1),
            Err(Error::ZeroInformation)
        ));
    }

    #[test]
    fn fano_examples() {
        assert_eq!(fano_lower_bound(1.0, 0.5).unwrap(), 0.0);
        assert_eq!(fano_lower_bound(1.0, 0.0).unwrap(), 1.0);
        assert_abs_diff_eq!(fano_lower_bound(1.0, 0.11).unwrap(), 0.5001, epsilon = 1e-4);
        assert!(fano_lower_bound(1.0, 0.6).is_err());
    }

    #[test]
    fn helstrom_examples() {
        let sys = SystemSpec::pure(0.5);
        let r = DenseState::from_mat2(&Mat2::diag(0.3, 0.7)).unwrap();
        assert_abs_diff_eq!(helstrom_error(&sys, &r, &r).unwrap(), 0.5, epsilon = 1e-15);
        let up = DenseState::from_mat2(&Mat2::diag(1.0, 0.0)).unwrap();
        let dn = DenseState::from_mat2(&Mat2::diag(0.0, 1.0)).unwrap();
        assert_abs_diff_eq!(helstrom_error(&sys, &up, &dn).unwrap(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn helstrom_exponent_converges_to_chernoff() {
        // i.i.d. pure fragments: -ln(P_e)/F -> xi, and since
        // P_e ~ exp(-F xi)/4 for p = 1/2 the approach is from above
        let s = spin(0.5, 0.0, 1.0, FRAC_PI_2, 0.0);
        let t = 0.5;
        let xi = xi_closed_field(&s, t);
        let pair = conditional_states(&s, t);
        let sys = SystemSpec::pure(0.5);
        let mut prev_gap = f64::INFINITY;
        for f in 2..=10 {
            let up = kron(&vec![pair.up.density(); f], DenseCap::default()).unwrap();
            let dn = kron(&vec![pair.down.density(); f], DenseCap::default()).unwrap();
            let pe = helstrom_error(&sys, &up, &dn).unwrap();
            let rate = -pe.ln() / f as f64;
            let gap = rate - xi;
            assert!(gap > 0.0 && gap < prev_gap, "F = {f}: rate {rate}, xi {xi}");
            prev_gap = gap;
        }
        assert!(prev_gap < 0.15);
    }

    #[test]
    fn decoherence_time_examples() {
        let n = 100;
        let g = 1.0 / (n as f64).sqrt();
        let env = vec![spin(g, 0.0, 1.0, FRAC_PI_2, 0.0); n];
        assert_abs_diff_eq!(decoherence_time(&env).unwrap(), 0.5, epsilon = 1e-12);
        let z = vec![spin(g, 0.0, 1.0, 0.0, 0.0); n];
        assert!(decoherence_time(&z).unwrap().is_infinite());
        assert!(matches!(decoherence_time(&[]), Err(Error::EmptyEnvironment)));
    }

    #[test]
    fn gaussian_and_onset_examples() {
        let env = vec![spin(0.1, 0.0, 1.0, 1.0, 0.0); 4];
        assert_eq!(receptivity(&env).unwrap(), 1.0);
        let tau = 3f64.sqrt() / 4.0;
        let t_star = onset_time(tau, 1e-16).unwrap();
        assert_abs_diff_eq!(t_star, 3.717, epsilon = 1e-3);
        assert_abs_diff_eq!(redundancy_gaussian(1.0, tau, t_star, 1e-16).unwrap(), 2.0, epsilon = 1e-12);
        let r = redundancy_gaussian(1.0, tau, 8.0, 1e-16).unwrap();
        assert_abs_diff_eq!(r, (64.0 * 16.0 / 3.0) / (16.0 * 10f64.ln()), epsilon = 1e-12);
        assert_abs_diff_eq!(r, 9.27, epsilon = 1e-2);
        assert_abs_diff_eq!(onset_time(0.3, (-2f64).exp()).unwrap(), 0.6, epsilon = 1e-12);
    }

    #[test]
    fn mesh_examples() {
        let tmpl = spin(0.5, 0.0, 1.0, 0.0, 0.0);
        let mesh = bloch_mesh(&tmpl, T_FIG2, 1.0, (9, 7)).unwrap();
        assert_eq!(mesh.len(), 63);
        for row in mesh.chunks(7) {
            for p in row {
                assert_abs_diff_eq!(p.xi, row[0].xi, epsilon = 1e-12);
            }
        }
        // z-axis rows carry nothing; the equator carries the maximum
        assert!(mesh[0].xi < 1e-15);
        let eq = mesh.iter().find(|p| (p.theta - FRAC_PI_2).abs() < 1e-12).unwrap();
        assert_abs_diff_eq!(eq.xi, 0.5996, epsilon = 1e-4);

        let hazy = bloch_mesh(&tmpl, T_FIG2, 11.0 / 16.0, (9, 7)).unwrap();
        for (p, h) in mesh.iter().zip(&hazy) {
            assert!(h.xi <= p.xi);
        }
        assert!(bloch_mesh(&tmpl, 1.0, 1.0, (1, 5)).is_err());
    }

    fn spin_strategy() -> impl Strategy<Value = SpinSpec> {
        (-2.0..2.0f64, -2.0..2.0f64, 0.0..=1.0f64, 0.0..=PI, 0.0..(2.0 * PI))
            .prop_map(|(g, w, a, th, ph)| spin(g, w, a, th, ph))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn closed_forms_match_matrix_route(s in spin_strategy(), t in 0.0..10.0f64) {
            let m = matrix_xi(&s, t);
            prop_assert!((xi_closed_field(&s, t) - m.xi).abs() < 1e-10);
            let mut s0 = s;
            s0.omega = 0.0;
            prop_assert!((xi_closed_no_field(&s0, t).unwrap() - matrix_xi(&s0, t).xi).abs() < 1e-10);
        }

        #[test]
        fn optimum_is_half_on_conditional_pairs(s in spin_strategy(), t in 0.0..10.0f64) {
            let m = matrix_xi(&s, t);
            prop_assert!((m.c_star - 0.5).abs() < 1e-6, "c* = {}", m.c_star);
        }

        #[test]
        fn overlap_symmetric_in_c(s in spin_strategy(), t in 0.0..10.0f64, c in 0.0..=1.0f64) {
            let pair = conditional_states(&s, t);
            let (u, d) = (pair.up.density(), pair.down.density());
            let lhs = chernoff_overlap(&u, &d, c).unwrap();
            let rhs = chernoff_overlap(&u, &d, 1.0 - c).unwrap();
            prop_assert!((lhs - rhs).abs() < 1e-12);
        }

        #[test]
        fn monotone_in_mixedness(l1 in 0.0..1.0f64, dl in 1e-6..1.0f64, th in 1e-3..PI) {
            let l2 = (l1 + dl).min(1.0);
            prop_assume!(l2 > l1);
            let a = xi_closed_mixed(MixednessFactor::new(l1).unwrap(), th);
            let b = xi_closed_mixed(MixednessFactor::new(l2).unwrap(), th);
            prop_assert!(b > a);
        }

        #[test]
        fn vanishes_only_on_measure_zero(l in 0.01..=1.0f64, th in 0.01..=PI) {
            prop_assert!(xi_closed_mixed(MixednessFactor::new(l).unwrap(), th) > 0.0);
        }

        #[test]
        fn symmetric_pure_env_decoherence_identity(g in -2.0..2.0f64, th in 0.0..=PI, t in 0.0..5.0f64, n in 1usize..40) {
            let env = vec![spin(g, 0.0, 1.0, th, 0.0); n];
            let gamma = crate::dynamics::decoherence_factor_fragment(&env, t).norm_sqr();
            let xi = xi_bar_closed(&env, t).unwrap();
            let want = (-xi * n as f64).exp();
            prop_assert!((gamma - want).abs() <= 1e-12);
        }
    }
}
