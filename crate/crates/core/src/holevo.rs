//! Exact Holevo quantities for fragments of the environment, fragment
//! averages, and the exact redundancy they define. Bits throughout.

use std::collections::HashMap;
use std::f64::consts::LN_2;
use std::sync::Mutex;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::chernoff::{record_deficit, RedundancyMethod, RedundancyResult};
use crate::dynamics::{conditional_states, ConditionalPair};
use crate::error::{Error, Result};
use crate::model::{spin_rng, SpinSpec, SystemSpec};
use crate::qmath::{binary_entropy, kron, pairwise_mean, qubit_entropy, von_neumann_entropy, DenseCap, DenseState};

/// Largest number of subsets `average_holevo` will enumerate.
pub const ENUMERATION_LIMIT: f64 = 1e7;

/// Slack allowed when checking that the fragment average grows with `#F`.
pub const MONOTONE_TOL: f64 = 1e-9;

/// Sorted, distinct spin indices into a realized environment.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FragmentSelection {
    indices: Vec<usize>,
}

impl FragmentSelection {
    pub fn new(mut indices: Vec<usize>, n_env: usize) -> Result<Self> {
        if indices.is_empty() {
            return Err(Error::BadFragment("empty fragment".into()));
        }
        indices.sort_unstable();
        if indices.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::BadFragment("repeated spin index".into()));
        }
        if let Some(&last) = indices.last() {
            if last >= n_env {
                return Err(Error::BadFragment(format!(
                    "index {last} outside an environment of {n_env} spins"
                )));
            }
        }
        Ok(FragmentSelection { indices })
    }

    /// The first `size` spins.
    pub fn prefix(size: usize, n_env: usize) -> Result<Self> {
        FragmentSelection::new((0..size).collect(), n_env)
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    /// Indices not in the fragment.
    pub fn complement(&self, n_env: usize) -> Vec<usize> {
        let mut out = Vec::with_capacity(n_env - self.indices.len());
        let mut it = self.indices.iter().peekable();
        for k in 0..n_env {
            if it.peek() == Some(&&k) {
                it.next();
            } else {
                out.push(k);
            }
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum HolevoMode {
    ClosedPure,
    Dense,
    Enumerated,
    MonteCarlo,
}

impl HolevoMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            HolevoMode::ClosedPure => "closed_pure",
            HolevoMode::Dense => "dense",
            HolevoMode::Enumerated => "enumerated",
            HolevoMode::MonteCarlo => "monte_carlo",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct HolevoEstimate {
    pub mean_chi: f64,
    /// `H_S - mean_chi`, evaluated without cancellation on the closed path.
    pub mean_deficit: f64,
    pub stderr: f64,
    pub n_samples: usize,
    pub mode: HolevoMode,
}

/// How fragments are drawn for the average.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Averaging {
    Enumerate,
    MonteCarlo { samples: usize, seed: u64 },
}

pub fn system_entropy(system: &SystemSpec) -> Result<f64> {
    binary_entropy(system.p_up)
}

// 8-point Gauss-Legendre nodes and weights on [-1, 1]
const GL_NODES: [f64; 4] = [
    0.183_434_642_495_649_8,
    0.525_532_409_916_329_0,
    0.796_666_477_413_626_7,
    0.960_289_856_497_536_3,
];
const GL_WEIGHTS: [f64; 4] = [
    0.362_683_783_378_362_0,
    0.313_706_645_877_887_3,
    0.222_381_034_453_374_5,
    0.101_228_536_290_376_3,
];

/// `H(1/2 + r0) - H(1/2 + r)` for `0 <= r0 <= r <= 1/2`, given `dr = r - r0`
/// separately so that tiny gaps keep their relative precision.
fn entropy_drop(r0: f64, dr: f64) -> f64 {
    let r = r0 + dr;
    if dr == 0.0 {
        return 0.0;
    }
    if dr <= 0.25 * (0.5 - r) {
        // dH/dr = -2 atanh(2r) / ln 2
        let (mid, half) = (r0 + 0.5 * dr, 0.5 * dr);
        let s: f64 = GL_NODES
            .iter()
            .zip(&GL_WEIGHTS)
            .map(|(&x, &w)| {
                w * ((2.0 * (mid - half * x)).atanh() + (2.0 * (mid + half * x)).atanh())
            })
            .sum();
        return 2.0 * half * s / LN_2;
    }
    let h = |m: f64| binary_entropy(m.clamp(0.0, 1.0)).unwrap_or(0.0);
    (h(0.5 + r0) - h(0.5 + r)).max(0.0)
}

/// Entropy of the system decohered by a pure fragment with
/// `|gamma_F|^2 = gamma_sq`, returned as `(chi, H_S - chi)`.
fn closed_chi_and_deficit(system: &SystemSpec, gamma_sq: f64) -> Result<(f64, f64)> {
    let (p, q) = (system.p_up, system.p_down());
    let hs = binary_entropy(p)?;
    let x2 = gamma_sq.clamp(0.0, 1.0);
    let r0 = 0.5 * (p - q).abs();
    let r = (r0 * r0 + p * q * x2).sqrt();
    let dr = p * q * x2 / (r + r0);
    let deficit = if r + r0 == 0.0 { 0.0 } else { entropy_drop(r0, dr) }.min(hs);
    // the decohered system has eigenvalues 1/2 +- r
    let chi = binary_entropy((0.5 + r).min(1.0))?;
    Ok((chi, deficit))
}

fn require_pure_system(system: &SystemSpec) -> Result<()> {
    if system.is_pure() {
        Ok(())
    } else {
        Err(Error::MixedSystem(system.coherence()))
    }
}

fn require_pure_spins(env: &[SpinSpec], idx: impl IntoIterator<Item = usize>) -> Result<()> {
    for k in idx {
        let a = env[k].init.a();
        if a != 1.0 {
            return Err(Error::MixedEnvironment(k, a));
        }
    }
    Ok(())
}

/// Holevo quantity of a pure fragment with decoherence factor `gamma_frag`:
/// the entropy of the system decohered by that fragment.
pub fn holevo_pure_closed(system: &SystemSpec, gamma_frag: crate::qmath::Complex) -> Result<f64> {
    require_pure_system(system)?;
    Ok(closed_chi_and_deficit(system, gamma_frag.norm_sqr())?.0)
}

/// `H_S - chi` for a pure fragment, accurate even when it is far below the
/// rounding error of `chi` itself.
pub fn holevo_deficit_closed(system: &SystemSpec, gamma_sq: f64) -> Result<f64> {
    require_pure_system(system)?;
    Ok(closed_chi_and_deficit(system, gamma_sq)?.1)
}

/// `chi = S(sum_s p_s rho_F|s) - sum_s p_s S(rho_F|s)` from dense matrices.
/// The conditional states are products, so their entropies are the sums of
/// the single-spin entropies.
pub fn holevo_dense(
    system: &SystemSpec,
    env: &[SpinSpec],
    frag: &FragmentSelection,
    t: f64,
    cap: DenseCap,
) -> Result<f64> {
    cap.check("dense Holevo quantity", frag.len())?;
    let pairs: Vec<ConditionalPair> = frag
        .indices()
        .iter()
        .map(|&k| conditional_states(&env[k], t))
        .collect();
    dense_from_pairs(system, &pairs, cap)
}

fn dense_from_pairs(system: &SystemSpec, pairs: &[ConditionalPair], cap: DenseCap) -> Result<f64> {
    let ups: Vec<_> = pairs.iter().map(|p| p.up.density()).collect();
    let downs: Vec<_> = pairs.iter().map(|p| p.down.density()).collect();
    let rho_up = kron(&ups, cap)?;
    let rho_down = kron(&downs, cap)?;
    let (p, q) = (system.p_up, system.p_down());
    let mix = DenseState::from_matrix(rho_up.dim(), rho_up.weighted_sum(p, &rho_down, q))?;
    let h_up: f64 = pairs.iter().map(|c| qubit_entropy(&c.up)).sum();
    let h_down: f64 = pairs.iter().map(|c| qubit_entropy(&c.down)).sum();
    let chi = von_neumann_entropy(&mix)? - p * h_up - q * h_down;
    Ok(chi.max(0.0))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MutualInformation {
    pub total: f64,
    /// `H_SdF`, the Holevo quantity of the fragment.
    pub holevo: f64,
    /// `H_SdE - H_SdEF`, the quantum discord.
    pub discord: f64,
}

/// Pure-state decomposition `I(S:F) = H_SdF + [H_SdE - H_SdEF]`, where
/// `H_SdX` is the entropy of the system decohered by `X` and `H_SdEF` uses
/// the spins outside the fragment.
pub fn mutual_information_pure(
    system: &SystemSpec,
    env: &[SpinSpec],
    frag: &FragmentSelection,
    t: f64,
) -> Result<MutualInformation> {
    require_pure_system(system)?;
    require_pure_spins(env, 0..env.len())?;
    let logs = log_gamma_sq_pure(env, t);
    let in_f: f64 = frag.indices().iter().map(|&k| logs[k]).sum();
    let all: f64 = logs.iter().sum();
    let rest: f64 = frag.complement(env.len()).iter().map(|&k| logs[k]).sum();
    let h = |l: f64| closed_chi_and_deficit(system, l.exp()).map(|x| x.0);
    let (h_f, h_e, h_ef) = (h(in_f)?, h(all)?, h(rest)?);
    Ok(MutualInformation {
        total: h_f + h_e - h_ef,
        holevo: h_f,
        discord: h_e - h_ef,
    })
}

/// `ln |gamma_k|^2 = ln(1 - sin^2(Theta_k/2))` for pure spins.
fn log_gamma_sq_pure(env: &[SpinSpec], t: f64) -> Vec<f64> {
    env.par_iter().map(|s| (-record_deficit(s, t)).ln_1p()).collect()
}

/// Per-fragment evaluation shared by the averaging and search routines.
enum Evaluator<'a> {
    Closed {
        system: &'a SystemSpec,
        logs: Vec<f64>,
    },
    Dense {
        system: &'a SystemSpec,
        /// Conditional states of one representative per class.
        pairs: Vec<ConditionalPair>,
        cap: DenseCap,
        h_s: f64,
        /// Spins with identical parameters share a class; a fragment's value
        /// depends only on its sorted class list.
        classes: Vec<u32>,
        memo: Mutex<HashMap<Vec<u32>, (f64, f64)>>,
    },
}

/// Class of every spin, and one representative spin per class.
fn spin_classes(env: &[SpinSpec]) -> (Vec<u32>, Vec<SpinSpec>) {
    let mut ids = HashMap::new();
    let mut reps = Vec::new();
    let classes = env
        .iter()
        .map(|s| {
            let key = [s.g, s.omega, s.init.a(), s.init.theta(), s.init.phi()].map(f64::to_bits);
            *ids.entry(key).or_insert_with(|| {
                reps.push(*s);
                (reps.len() - 1) as u32
            })
        })
        .collect();
    (classes, reps)
}

impl<'a> Evaluator<'a> {
    fn new(system: &'a SystemSpec, env: &[SpinSpec], t: f64, cap: DenseCap) -> Result<Self> {
        if env.is_empty() {
            return Err(Error::EmptyEnvironment);
        }
        if system.is_pure() && env.iter().all(|s| s.init.a() == 1.0) {
            Ok(Evaluator::Closed {
                system,
                logs: log_gamma_sq_pure(env, t),
            })
        } else {
            let (classes, reps) = spin_classes(env);
            Ok(Evaluator::Dense {
                system,
                pairs: reps.par_iter().map(|s| conditional_states(s, t)).collect(),
                cap,
                h_s: system_entropy(system)?,
                classes,
                memo: Mutex::new(HashMap::new()),
            })
        }
    }

    fn check_size(&self, size: usize) -> Result<()> {
        match self {
            Evaluator::Closed { .. } => Ok(()),
            Evaluator::Dense { cap, .. } => cap.check("dense Holevo quantity", size),
        }
    }

    fn is_closed(&self) -> bool {
        matches!(self, Evaluator::Closed { .. })
    }

    /// `(chi, H_S - chi)` for each prefix `sel[..k]`, `k` in `sizes`
    /// (ascending).
    fn eval_prefixes(&self, sel: &[usize], sizes: &[usize]) -> Result<Vec<(f64, f64)>> {
        match self {
            Evaluator::Closed { system, logs } => {
                let mut out = Vec::with_capacity(sizes.len());
                let (mut acc, mut i) = (0.0, 0);
                for &k in sizes {
                    while i < k {
                        acc += logs[sel[i]];
                        i += 1;
                    }
                    out.push(closed_chi_and_deficit(system, acc.exp())?);
                }
                Ok(out)
            }
            Evaluator::Dense { .. } => sizes.iter().map(|&k| self.eval(&sel[..k])).collect(),
        }
    }

    /// `(chi, H_S - chi)` for the fragment.
    fn eval(&self, idx: &[usize]) -> Result<(f64, f64)> {
        match self {
            Evaluator::Closed { system, logs } => {
                let l: f64 = idx.iter().map(|&k| logs[k]).sum();
                closed_chi_and_deficit(system, l.exp())
            }
            Evaluator::Dense {
                system,
                pairs,
                cap,
                h_s,
                classes,
                memo,
            } => {
                let mut key: Vec<u32> = idx.iter().map(|&k| classes[k]).collect();
                key.sort_unstable();
                if let Some(&hit) = memo.lock().expect("memo lock").get(&key) {
                    return Ok(hit);
                }
                // evaluate in key order so the value never depends on which
                // member of a class reached the memo first
                let sel: Vec<_> = key.iter().map(|&c| pairs[c as usize]).collect();
                let chi = dense_from_pairs(system, &sel, *cap)?;
                let value = (chi, (h_s - chi).max(0.0));
                memo.lock().expect("memo lock").insert(key, value);
                Ok(value)
            }
        }
    }
}

/// `C(n, k)` as a float, for size checks.
pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64).round()
}

fn binomial_u64(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc as u64
}

/// The `rank`-th `k`-subset of `0..n` in lexicographic order.
fn unrank_combination(n: usize, k: usize, mut rank: u64) -> Vec<usize> {
    let mut out = Vec::with_capacity(k);
    let mut x = 0;
    for j in 0..k {
        loop {
            let c = binomial_u64(n - x - 1, k - j - 1);
            if rank < c {
                break;
            }
            rank -= c;
            x += 1;
        }
        out.push(x);
        x += 1;
    }
    out
}

/// Advances to the next subset in lexicographic order; false after the last.
fn next_combination(c: &mut [usize], n: usize) -> bool {
    let k = c.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if c[i] < n - k + i {
            c[i] += 1;
            for j in i + 1..k {
                c[j] = c[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Applies the Fisher-Yates steps of draw `draw` to `perm` (the identity on
/// entry), passes the first `k` picks to `visit`, then restores the identity.
/// The picks of one draw are nested: the first `j` do not depend on `k`.
fn with_draw<R>(
    perm: &mut [usize],
    swaps: &mut Vec<usize>,
    k: usize,
    seed: u64,
    draw: u64,
    visit: impl FnOnce(&[usize]) -> R,
) -> R {
    let n = perm.len();
    let mut rng = spin_rng(seed, draw);
    swaps.clear();
    for i in 0..k {
        let j = rng.random_range(i..n);
        perm.swap(i, j);
        swaps.push(j);
    }
    let out = visit(&perm[..k]);
    for i in (0..k).rev() {
        perm.swap(i, swaps[i]);
    }
    out
}

#[cfg(test)]
fn draw_subset(n: usize, size: usize, seed: u64, draw: u64) -> Vec<usize> {
    let mut perm: Vec<usize> = (0..n).collect();
    with_draw(&mut perm, &mut Vec::new(), size, seed, draw, |s| s.to_vec())
}

/// Monte Carlo averages at several fragment sizes (ascending, each below
/// `n`) from one set of nested draws.
fn monte_carlo_many(
    ev: &Evaluator,
    n: usize,
    sizes: &[usize],
    samples: usize,
    seed: u64,
) -> Result<Vec<HolevoEstimate>> {
    const BLOCK: u64 = 64;
    let kmax = *sizes.last().expect("at least one size");
    let total = samples as u64;
    let blocks: Vec<Vec<Vec<(f64, f64)>>> = (0..total.div_ceil(BLOCK))
        .into_par_iter()
        .map(|b| {
            let mut perm: Vec<usize> = (0..n).collect();
            let mut swaps = Vec::with_capacity(kmax);
            (b * BLOCK..total.min((b + 1) * BLOCK))
                .map(|d| with_draw(&mut perm, &mut swaps, kmax, seed, d, |sel| ev.eval_prefixes(sel, sizes)))
                .collect()
        })
        .collect::<Vec<Result<Vec<_>>>>()
        .into_iter()
        .collect::<Result<_>>()?;
    let rows: Vec<Vec<(f64, f64)>> = blocks.into_iter().flatten().collect();
    Ok((0..sizes.len())
        .map(|j| {
            let col: Vec<(f64, f64)> = rows.iter().map(|r| r[j]).collect();
            summarize(&col, HolevoMode::MonteCarlo, false)
        })
        .collect())
}

fn summarize(values: &[(f64, f64)], mode: HolevoMode, exact: bool) -> HolevoEstimate {
    let chis: Vec<f64> = values.iter().map(|v| v.0).collect();
    let defs: Vec<f64> = values.iter().map(|v| v.1).collect();
    let mean_chi = pairwise_mean(&chis);
    let n = values.len();
    let stderr = if exact || n < 2 {
        0.0
    } else {
        let dev: Vec<f64> = chis.iter().map(|c| (c - mean_chi).powi(2)).collect();
        (pairwise_mean(&dev) * n as f64 / (n - 1) as f64 / n as f64).sqrt()
    };
    HolevoEstimate {
        mean_chi,
        mean_deficit: pairwise_mean(&defs),
        stderr,
        n_samples: n,
        mode,
    }
}

fn average_with(ev: &Evaluator, n: usize, size: usize, how: Averaging) -> Result<HolevoEstimate> {
    if size == 0 || size > n {
        return Err(Error::BadFragment(format!(
            "fragment size {size} for an environment of {n} spins"
        )));
    }
    ev.check_size(size)?;
    match how {
        Averaging::Enumerate => {
            let count = binomial(n, size);
            if count > ENUMERATION_LIMIT {
                return Err(Error::TooManySubsets {
                    n,
                    k: size,
                    count,
                    limit: ENUMERATION_LIMIT,
                });
            }
            const BLOCK: u64 = 4096;
            let total = count as u64;
            let blocks: Vec<Vec<(f64, f64)>> = (0..total.div_ceil(BLOCK))
                .into_par_iter()
                .map(|b| {
                    let start = b * BLOCK;
                    let len = BLOCK.min(total - start);
                    let mut comb = unrank_combination(n, size, start);
                    let mut out = Vec::with_capacity(len as usize);
                    for i in 0..len {
                        out.push(ev.eval(&comb)?);
                        if i + 1 < len {
                            next_combination(&mut comb, n);
                        }
                    }
                    Ok(out)
                })
                .collect::<Result<_>>()?;
            let values: Vec<(f64, f64)> = blocks.into_iter().flatten().collect();
            Ok(summarize(&values, HolevoMode::Enumerated, true))
        }
        Averaging::MonteCarlo { samples, seed } => {
            if samples == 0 {
                return Err(Error::Validation(vec![
                    "samples: Monte Carlo needs at least one sample".into(),
                ]));
            }
            if size == n {
                let all: Vec<usize> = (0..n).collect();
                return Ok(summarize(&[ev.eval(&all)?], HolevoMode::MonteCarlo, true));
            }
            Ok(monte_carlo_many(ev, n, &[size], samples, seed)?[0])
        }
    }
}

/// Mean Holevo quantity over fragments of `size` spins. Pure environments use
/// the closed form at any size; otherwise each fragment is built densely.
pub fn average_holevo(
    system: &SystemSpec,
    env: &[SpinSpec],
    size: usize,
    t: f64,
    how: Averaging,
    cap: DenseCap,
) -> Result<HolevoEstimate> {
    let ev = Evaluator::new(system, env, t, cap)?;
    average_with(&ev, env.len(), size, how)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum FragmentSearch {
    Reached { f_delta: usize, estimate: HolevoEstimate },
    /// Even the largest admissible fragment falls short.
    NotReached { max_f: usize, estimate: HolevoEstimate },
}

impl FragmentSearch {
    pub fn estimate(&self) -> &HolevoEstimate {
        match self {
            FragmentSearch::Reached { estimate, .. } | FragmentSearch::NotReached { estimate, .. } => {
                estimate
            }
        }
    }
}

/// Smallest fragment size whose average Holevo quantity reaches
/// `(1 - delta) H_S`. The search checks that the averages it probes grow
/// with the fragment size and fails loudly if they do not.
pub fn find_fragment_size(
    system: &SystemSpec,
    env: &[SpinSpec],
    t: f64,
    delta: f64,
    how: Averaging,
    cap: DenseCap,
) -> Result<FragmentSearch> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::BadDelta(delta));
    }
    let h_s = system_entropy(system)?;
    if h_s == 0.0 {
        return Err(Error::TrivialSystem(system.p_up));
    }
    let ev = Evaluator::new(system, env, t, cap)?;
    let n = env.len();
    let budget = delta * h_s;
    let max_f = if ev.is_closed() { n } else { n.min(cap.qubits()) };

    let mut probes: Vec<(usize, HolevoEstimate)> = Vec::new();
    let found = if !ev.is_closed() {
        // dense cost grows eightfold per spin, so scan upward and stop at
        // the first size that reaches the budget
        let mut hit = None;
        for f in 1..=max_f {
            let e = average_with(&ev, n, f, how)?;
            probes.push((f, e));
            if e.mean_deficit <= budget {
                hit = Some(f);
                break;
            }
        }
        if hit.is_none() && max_f < n {
            // a mixed environment larger than the dense cap: we cannot tell
            return Err(Error::TooLarge {
                what: "dense Holevo search",
                requested: n,
                cap: max_f,
            });
        }
        hit
    } else {
        closed_search(&ev, n, budget, how, &mut probes)?
    };

    probes.sort_by_key(|p| p.0);
    for w in probes.windows(2) {
        let ((f1, e1), (f2, e2)) = (&w[0], &w[1]);
        if e2.mean_chi < e1.mean_chi - MONOTONE_TOL {
            return Err(Error::Numerical(format!(
                "average Holevo quantity drops from {} at #F = {f1} to {} at #F = {f2}",
                e1.mean_chi, e2.mean_chi
            )));
        }
    }
    let at = |f: usize| probes.iter().find(|p| p.0 == f).map(|p| p.1);
    Ok(match found {
        Some(f) => FragmentSearch::Reached {
            f_delta: f,
            estimate: at(f).expect("probed"),
        },
        None => FragmentSearch::NotReached {
            max_f,
            estimate: at(max_f).expect("probed"),
        },
    })
}

/// Search over the closed-form evaluator, where any size is cheap. Probes
/// the full environment first so an unreachable budget costs one pass.
fn closed_search(
    ev: &Evaluator<'_>,
    n: usize,
    budget: f64,
    how: Averaging,
    probes: &mut Vec<(usize, HolevoEstimate)>,
) -> Result<Option<usize>> {
    let top = average_with(ev, n, n, how)?;
    probes.push((n, top));
    if top.mean_deficit > budget {
        return Ok(None);
    }
    match how {
        Averaging::Enumerate => {
            for f in 1..n {
                let e = average_with(ev, n, f, how)?;
                probes.push((f, e));
                if e.mean_deficit <= budget {
                    return Ok(Some(f));
                }
            }
            Ok(Some(n))
        }
        Averaging::MonteCarlo { samples, seed } => {
            if samples == 0 {
                return Err(Error::Validation(vec![
                    "samples: Monte Carlo needs at least one sample".into(),
                ]));
            }
            // rounds of up to 64 probes, all from one pass over the draws,
            // narrowing (lo, hi] until it holds a single size
            let (mut lo, mut hi) = (0usize, n);
            let mut first = true;
            while hi - lo > 1 {
                let sizes: Vec<usize> = if first {
                    std::iter::successors(Some(1usize), |f| f.checked_mul(2))
                        .take_while(|&f| f < hi)
                        .collect()
                } else if hi - lo - 1 <= 64 {
                    (lo + 1..hi).collect()
                } else {
                    let mut v: Vec<usize> = (1..=64).map(|i| lo + i * (hi - lo) / 65).collect();
                    v.dedup();
                    v
                };
                first = false;
                let est = monte_carlo_many(ev, n, &sizes, samples, seed)?;
                let mut new_hi = hi;
                for (&f, e) in sizes.iter().zip(&est) {
                    probes.push((f, *e));
                    if e.mean_deficit <= budget {
                        new_hi = f;
                        break;
                    }
                    lo = f;
                }
                hi = new_hi;
            }
            Ok(Some(hi))
        }
    }
}

/// `R = #E / #F_delta`, or 0 when no fragment reaches the threshold.
pub fn redundancy_exact(
    system: &SystemSpec,
    env: &[SpinSpec],
    t: f64,
    delta: f64,
    how: Averaging,
    cap: DenseCap,
) -> Result<(RedundancyResult, FragmentSearch)> {
    let search = find_fragment_size(system, env, t, delta, how, cap)?;
    let n = env.len() as f64;
    let res = match search {
        FragmentSearch::Reached { f_delta, .. } => RedundancyResult {
            xi_bar: f64::NAN,
            f_delta: f_delta as f64,
            r_delta: n / f_delta as f64,
            method: RedundancyMethod::Exact,
            reached: true,
        },
        FragmentSearch::NotReached { .. } => RedundancyResult {
            xi_bar: f64::NAN,
            f_delta: f64::INFINITY,
            r_delta: 0.0,
            method: RedundancyMethod::Exact,
            reached: false,
        },
    };
    Ok((res, search))
}
