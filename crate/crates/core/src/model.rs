//! Scenario description: the system qubit, the environment spins and the
//! time grid, plus the seeded realization of random environments.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qmath::QubitState;

/// One environment spin: coupling `g` to the system's `sigma_z`, transverse
/// field `omega` along x, and the initial state.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpinSpec {
    pub g: f64,
    #[serde(default)]
    pub omega: f64,
    pub init: QubitState,
}

impl SpinSpec {
    pub fn new(g: f64, omega: f64, init: QubitState) -> Self {
        SpinSpec { g, omega, init }
    }

    pub fn from_bloch(g: f64, omega: f64, a: f64, theta: f64, phi: f64) -> Result<Self> {
        Ok(SpinSpec::new(g, omega, QubitState::new(a, theta, phi)?))
    }

    /// Effective field `sqrt(g^2 + omega^2)`.
    pub fn effective_field(&self) -> f64 {
        self.g.hypot(self.omega)
    }
}

/// The system qubit in the pointer basis.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemSpec {
    pub p_up: f64,
    /// Magnitude of the initial off-diagonal element; `None` means pure.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coherence: Option<f64>,
}

impl SystemSpec {
    pub fn pure(p_up: f64) -> Self {
        SystemSpec {
            p_up,
            coherence: None,
        }
    }

    pub fn p_down(&self) -> f64 {
        1.0 - self.p_up
    }

    pub fn max_coherence(&self) -> f64 {
        (self.p_up * self.p_down()).max(0.0).sqrt()
    }

    pub fn coherence(&self) -> f64 {
        self.coherence.unwrap_or_else(|| self.max_coherence())
    }

    pub fn is_pure(&self) -> bool {
        match self.coherence {
            None => true,
            Some(c) => (c - self.max_coherence()).abs() <= 1e-12,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let mut errs = Vec::new();
        self.collect_violations("system", &mut errs);
        if errs.is_empty() {
            Ok(())
        } else {
            Err(Error::Validation(errs))
        }
    }

    fn collect_violations(&self, path: &str, errs: &mut Vec<String>) {
        if !(self.p_up > 0.0 && self.p_up < 1.0) {
            errs.push(format!("{path}.p_up: must lie in (0, 1), got {}", self.p_up));
            return;
        }
        if let Some(c) = self.coherence {
            if !(c >= 0.0 && c <= self.max_coherence() + 1e-12) {
                errs.push(format!(
                    "{path}.coherence: must lie in [0, {}], got {c}",
                    self.max_coherence()
                ));
            }
        }
    }
}

/// A scalar distribution for random environments.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Distribution {
    Constant(f64),
    Uniform { lo: f64, hi: f64 },
    Discrete(Vec<f64>),
}

impl Distribution {
    pub fn uniform(lo: f64, hi: f64) -> Self {
        Distribution::Uniform { lo, hi }
    }

    fn check(&self) -> Result<()> {
        match self {
            Distribution::Constant(v) if !v.is_finite() => {
                Err(Error::BadDistribution(format!("constant {v} is not finite")))
            }
            Distribution::Uniform { lo, hi } if !(lo.is_finite() && hi.is_finite()) => {
                Err(Error::BadDistribution(format!("uniform bounds [{lo}, {hi}]")))
            }
            Distribution::Uniform { lo, hi } if lo > hi => {
                Err(Error::BadDistribution(format!("uniform lo {lo} > hi {hi}")))
            }
            Distribution::Discrete(v) if v.is_empty() => {
                Err(Error::BadDistribution("discrete support is empty".into()))
            }
            Distribution::Discrete(v) if v.iter().any(|x| !x.is_finite()) => {
                Err(Error::BadDistribution("discrete support has non-finite values".into()))
            }
            _ => Ok(()),
        }
    }

    /// Closed interval containing every value the distribution can produce.
    pub fn support(&self) -> (f64, f64) {
        match self {
            Distribution::Constant(v) => (*v, *v),
            Distribution::Uniform { lo, hi } => (*lo, *hi),
            Distribution::Discrete(v) => v
                .iter()
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &x| (l.min(x), h.max(x))),
        }
    }

    fn sample(&self, rng: &mut impl Rng) -> f64 {
        match self {
            Distribution::Constant(v) => *v,
            Distribution::Uniform { lo, hi } => lo + (hi - lo) * rng.random::<f64>(),
            Distribution::Discrete(v) => v[rng.random_range(0..v.len())],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EnvironmentKind {
    /// `count` copies of one spin.
    Symmetric { spin: SpinSpec, count: usize },
    Explicit { spins: Vec<SpinSpec> },
    /// Every spin parameter drawn independently. With `gaussian_scaling` the
    /// drawn coupling is read as `G` and realized as `G / sqrt(count)`.
    Random {
        g: Distribution,
        #[serde(default = "zero_dist")]
        omega: Distribution,
        theta: Distribution,
        #[serde(default = "zero_dist")]
        phi: Distribution,
        #[serde(default = "one_dist")]
        a: Distribution,
        count: usize,
        #[serde(default)]
        gaussian_scaling: bool,
    },
}

fn zero_dist() -> Distribution {
    Distribution::Constant(0.0)
}

fn one_dist() -> Distribution {
    Distribution::Constant(1.0)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnvironmentSpec {
    #[serde(flatten)]
    pub kind: EnvironmentKind,
    #[serde(default)]
    pub seed: u64,
}

impl EnvironmentSpec {
    pub fn symmetric(spin: SpinSpec, count: usize) -> Self {
        EnvironmentSpec {
            kind: EnvironmentKind::Symmetric { spin, count },
            seed: 0,
        }
    }

    pub fn explicit(spins: Vec<SpinSpec>) -> Self {
        EnvironmentSpec {
            kind: EnvironmentKind::Explicit { spins },
            seed: 0,
        }
    }

    pub fn count(&self) -> usize {
        match &self.kind {
            EnvironmentKind::Symmetric { count, .. } | EnvironmentKind::Random { count, .. } => {
                *count
            }
            EnvironmentKind::Explicit { spins } => spins.len(),
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    fn collect_violations(&self, path: &str, errs: &mut Vec<String>) {
        if self.count() == 0 {
            errs.push(format!("{path}.count: environment needs at least one spin"));
        }
        match &self.kind {
            EnvironmentKind::Symmetric { spin, .. } => {
                check_spin(&format!("{path}.spin"), spin, errs);
            }
            EnvironmentKind::Explicit { spins } => {
                for (k, s) in spins.iter().enumerate() {
                    check_spin(&format!("{path}.spins[{k}]"), s, errs);
                }
            }
            EnvironmentKind::Random {
                g,
                omega,
                theta,
                phi,
                a,
                ..
            } => {
                let fields = [
                    ("g", g, None),
                    ("omega", omega, None),
                    ("theta", theta, Some((0.0, PI))),
                    ("phi", phi, None),
                    ("a", a, Some((0.0, 1.0))),
                ];
                for (name, dist, range) in fields {
                    if let Err(e) = dist.check() {
                        errs.push(format!("{path}.{name}: {e}"));
                        continue;
                    }
                    if let Some((lo, hi)) = range {
                        let (s_lo, s_hi) = dist.support();
                        if s_lo < lo || s_hi > hi {
                            errs.push(format!(
                                "{path}.{name}: support [{s_lo}, {s_hi}] leaves [{lo}, {hi}]"
                            ));
                        }
                    }
                }
            }
        }
    }
}

fn check_spin(path: &str, s: &SpinSpec, errs: &mut Vec<String>) {
    if !s.g.is_finite() {
        errs.push(format!("{path}.g: not finite"));
    }
    if !s.omega.is_finite() {
        errs.push(format!("{path}.omega: not finite"));
    }
}

/// Time points, either listed or evenly spaced (inclusive of both ends).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TimeGrid {
    List(Vec<f64>),
    Linspace { start: f64, stop: f64, count: usize },
}

impl TimeGrid {
    pub fn points(&self) -> Vec<f64> {
        match self {
            TimeGrid::List(v) => v.clone(),
            TimeGrid::Linspace { start, stop, count } => linspace(*start, *stop, *count),
        }
    }
}

pub fn linspace(start: f64, stop: f64, count: usize) -> Vec<f64> {
    match count {
        0 => vec![],
        1 => vec![start],
        n => (0..n)
            .map(|i| {
                if i == n - 1 {
                    stop
                } else {
                    start + (stop - start) * i as f64 / (n - 1) as f64
                }
            })
            .collect(),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub system: SystemSpec,
    pub environment: EnvironmentSpec,
    pub times: TimeGrid,
    /// Information deficit.
    pub delta: f64,
}

/// Checks every invariant of the scenario and reports all violations at once.
pub fn validate(sc: &Scenario) -> Result<()> {
    let mut errs = Vec::new();
    sc.system.collect_violations("system", &mut errs);
    sc.environment.collect_violations("environment", &mut errs);
    if !(sc.delta > 0.0 && sc.delta <= 0.5) {
        errs.push(format!("delta: must lie in (0, 1/2], got {}", sc.delta));
    }
    let times = sc.times.points();
    if times.is_empty() {
        errs.push("times: at least one time point is required".into());
    }
    if times.iter().any(|t| !(t.is_finite() && *t >= 0.0)) {
        errs.push("times: every time must be finite and nonnegative".into());
    }
    if times.windows(2).any(|w| w[1] < w[0]) {
        errs.push("times: must be ascending".into());
    }
    if errs.is_empty() {
        Ok(())
    } else {
        Err(Error::Validation(errs))
    }
}

/// Generator for spin `k`: a ChaCha8 stream keyed by `(seed, k)`, so every
/// spin is drawn independently of how the work is split.
pub fn spin_rng(seed: u64, k: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(k);
    rng
}

/// Turns an environment description into a concrete spin list.
/// Deterministic in `(spec, spec.seed)`.
pub fn realize_environment(spec: &EnvironmentSpec) -> Result<Vec<SpinSpec>> {
    let mut errs = Vec::new();
    spec.collect_violations("environment", &mut errs);
    if !errs.is_empty() {
        // distribution problems are the common case; keep their dedicated variant
        return Err(if errs.iter().any(|e| e.contains("bad distribution")) {
            Error::BadDistribution(errs.join("; "))
        } else {
            Error::Validation(errs)
        });
    }
    match &spec.kind {
        EnvironmentKind::Symmetric { spin, count } => Ok(vec![*spin; *count]),
        EnvironmentKind::Explicit { spins } => Ok(spins.clone()),
        EnvironmentKind::Random {
            g,
            omega,
            theta,
            phi,
            a,
            count,
            gaussian_scaling,
        } => {
            let scale = if *gaussian_scaling {
                1.0 / (*count as f64).sqrt()
            } else {
                1.0
            };
            (0..*count)
                .into_par_iter()
                .map(|k| {
                    let mut rng = spin_rng(spec.seed, k as u64);
                    let gk = g.sample(&mut rng) * scale;
                    let wk = omega.sample(&mut rng);
                    let tk = theta.sample(&mut rng);
                    let pk = phi.sample(&mut rng);
                    let ak = a.sample(&mut rng);
                    Ok(SpinSpec::new(gk, wk, QubitState::new(ak, tk, pk)?))
                })
                .collect()
        }
    }
}
