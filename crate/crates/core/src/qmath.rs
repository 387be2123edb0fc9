//! Small-dimension complex linear algebra.
//!
//! Everything here is sized for a single qubit (`Mat2`, `QubitState`) except
//! [`DenseState`], which holds the full tensor product of a handful of qubits
//! and exists so exact Holevo quantities can be evaluated by brute force.
//!
//! Entropies come in bits by default (`*_bits` / unsuffixed) with explicit
//! `*_nats` variants where the natural log is wanted.

use std::f64::consts::{LN_2, PI};
use std::ops::{Add, Mul, Sub};

use faer::{Mat, Side};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Complex = Complex64;

/// Tolerance on Hermiticity and trace checks.
pub const HERMITIAN_TOL: f64 = 1e-10;
/// Eigenvalues in `[-PSD_TOL, 0)` are treated as zero; below that is an error.
pub const PSD_TOL: f64 = 1e-10;

const ZERO: Complex = Complex::new(0.0, 0.0);
const ONE: Complex = Complex::new(1.0, 0.0);
const I: Complex = Complex::new(0.0, 1.0);

/// A 2x2 complex matrix, row-major.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mat2(pub [[Complex; 2]; 2]);

impl Mat2 {
    pub const fn new(m00: Complex, m01: Complex, m10: Complex, m11: Complex) -> Self {
        Mat2([[m00, m01], [m10, m11]])
    }

    pub const fn identity() -> Self {
        Mat2([[ONE, ZERO], [ZERO, ONE]])
    }

    pub const fn zero() -> Self {
        Mat2([[ZERO, ZERO], [ZERO, ZERO]])
    }

    pub fn diag(d0: f64, d1: f64) -> Self {
        Mat2([[Complex::new(d0, 0.0), ZERO], [ZERO, Complex::new(d1, 0.0)]])
    }

    pub fn from_real(m: [[f64; 2]; 2]) -> Self {
        Mat2([
            [Complex::new(m[0][0], 0.0), Complex::new(m[0][1], 0.0)],
            [Complex::new(m[1][0], 0.0), Complex::new(m[1][1], 0.0)],
        ])
    }

    pub const fn pauli_x() -> Self {
        Mat2([[ZERO, ONE], [ONE, ZERO]])
    }

    pub fn pauli_y() -> Self {
        Mat2([[ZERO, -I], [I, ZERO]])
    }

    pub fn pauli_z() -> Self {
        Mat2::diag(1.0, -1.0)
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> Complex {
        self.0[r][c]
    }

    pub fn dagger(&self) -> Self {
        let m = &self.0;
        Mat2([[m[0][0].conj(), m[1][0].conj()], [m[0][1].conj(), m[1][1].conj()]])
    }

    pub fn trace(&self) -> Complex {
        self.0[0][0] + self.0[1][1]
    }

    pub fn scale(&self, s: Complex) -> Self {
        let m = &self.0;
        Mat2([[m[0][0] * s, m[0][1] * s], [m[1][0] * s, m[1][1] * s]])
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(Complex::new(s, 0.0))
    }

    /// Largest deviation from Hermiticity.
    pub fn hermitian_defect(&self) -> f64 {
        let m = &self.0;
        (m[0][1] - m[1][0].conj())
            .norm()
            .max(m[0][0].im.abs())
            .max(m[1][1].im.abs())
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().flatten().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Max-entry distance between two matrices.
    pub fn max_abs_diff(&self, other: &Mat2) -> f64 {
        let mut d: f64 = 0.0;
        for r in 0..2 {
            for c in 0..2 {
                d = d.max((self.0[r][c] - other.0[r][c]).norm());
            }
        }
        d
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        (*self * self.dagger()).max_abs_diff(&Mat2::identity()) <= tol
    }
}

impl Mul for Mat2 {
    type Output = Mat2;

    fn mul(self, rhs: Mat2) -> Mat2 {
        let a = &self.0;
        let b = &rhs.0;
        Mat2([
            [
                a[0][0] * b[0][0] + a[0][1] * b[1][0],
                a[0][0] * b[0][1] + a[0][1] * b[1][1],
            ],
            [
                a[1][0] * b[0][0] + a[1][1] * b[1][0],
                a[1][0] * b[0][1] + a[1][1] * b[1][1],
            ],
        ])
    }
}

impl Add for Mat2 {
    type Output = Mat2;

    fn add(self, rhs: Mat2) -> Mat2 {
        let mut out = self;
        for r in 0..2 {
            for c in 0..2 {
                out.0[r][c] += rhs.0[r][c];
            }
        }
        out
    }
}

impl Sub for Mat2 {
    type Output = Mat2;

    fn sub(self, rhs: Mat2) -> Mat2 {
        let mut out = self;
        for r in 0..2 {
            for c in 0..2 {
                out.0[r][c] -= rhs.0[r][c];
            }
        }
        out
    }
}

/// A single-qubit state in Bloch form: length `a`, polar angle `theta`,
/// azimuth `phi`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "BlochParams", into = "BlochParams")]
pub struct QubitState {
    a: f64,
    theta: f64,
    phi: f64,
}

impl QubitState {
    /// Validates `a` in `[0, 1]` and `theta` in `[0, pi]`; `phi` is reduced
    /// into `[0, 2pi)`.
    pub fn new(a: f64, theta: f64, phi: f64) -> Result<Self> {
        if !(a.is_finite() && theta.is_finite() && phi.is_finite()) {
            return Err(Error::NotAState(format!(
                "non-finite Bloch parameters ({a}, {theta}, {phi})"
            )));
        }
        if !(0.0..=1.0).contains(&a) {
            return Err(Error::NotAState(format!("Bloch length {a} outside [0, 1]")));
        }
        if !(0.0..=PI).contains(&theta) {
            return Err(Error::NotAState(format!("polar angle {theta} outside [0, pi]")));
        }
        Ok(QubitState {
            a,
            theta,
            phi: reduce_azimuth(phi),
        })
    }

    pub fn pure(theta: f64, phi: f64) -> Result<Self> {
        QubitState::new(1.0, theta, phi)
    }

    pub fn maximally_mixed() -> Self {
        QubitState {
            a: 0.0,
            theta: 0.0,
            phi: 0.0,
        }
    }

    /// Builds a state from a Cartesian Bloch vector of length at most 1
    /// (lengths up to `1 + 2e-10` are clipped).
    pub fn from_bloch_vector(r: [f64; 3]) -> Result<Self> {
        let [x, y, z] = r;
        let a = (x * x + y * y + z * z).sqrt();
        if !a.is_finite() || a > 1.0 + 2.0 * PSD_TOL {
            return Err(Error::NotAState(format!("Bloch vector length {a}")));
        }
        if a == 0.0 {
            return Ok(QubitState::maximally_mixed());
        }
        let theta = (x * x + y * y).sqrt().atan2(z);
        let phi = if x == 0.0 && y == 0.0 { 0.0 } else { y.atan2(x) };
        Ok(QubitState {
            a: a.min(1.0),
            theta,
            phi: reduce_azimuth(phi),
        })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn is_pure(&self) -> bool {
        self.a == 1.0
    }

    pub fn direction(&self) -> [f64; 3] {
        let (st, ct) = self.theta.sin_cos();
        let (sp, cp) = self.phi.sin_cos();
        [st * cp, st * sp, ct]
    }

    pub fn bloch_vector(&self) -> [f64; 3] {
        let n = self.direction();
        [self.a * n[0], self.a * n[1], self.a * n[2]]
    }

    /// Eigenvalues `((1 - a)/2, (1 + a)/2)`.
    pub fn eigenvalues(&self) -> (f64, f64) {
        ((1.0 - self.a) / 2.0, (1.0 + self.a) / 2.0)
    }

    pub fn density(&self) -> Mat2 {
        bloch_to_density(self)
    }

    /// Same Bloch length, new direction.
    pub fn with_direction(&self, theta: f64, phi: f64) -> Result<Self> {
        QubitState::new(self.a, theta, phi)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct BlochParams {
    #[serde(default = "one")]
    a: f64,
    theta: f64,
    #[serde(default)]
    phi: f64,
}

fn one() -> f64 {
    1.0
}

impl TryFrom<BlochParams> for QubitState {
    type Error = Error;

    fn try_from(p: BlochParams) -> Result<Self> {
        QubitState::new(p.a, p.theta, p.phi)
    }
}

impl From<QubitState> for BlochParams {
    fn from(q: QubitState) -> Self {
        BlochParams {
            a: q.a,
            theta: q.theta,
            phi: q.phi,
        }
    }
}

fn reduce_azimuth(phi: f64) -> f64 {
    let r = phi.rem_euclid(2.0 * PI);
    // rem_euclid can round up to exactly 2pi for tiny negative inputs
    if r >= 2.0 * PI {
        0.0
    } else {
        r
    }
}

/// `(I + a n.sigma) / 2`.
pub fn bloch_to_density(q: &QubitState) -> Mat2 {
    let [x, y, z] = q.bloch_vector();
    Mat2::new(
        Complex::new((1.0 + z) / 2.0, 0.0),
        Complex::new(x / 2.0, -y / 2.0),
        Complex::new(x / 2.0, y / 2.0),
        Complex::new((1.0 - z) / 2.0, 0.0),
    )
}

/// Inverse of [`bloch_to_density`]. Fails with `NotAState` unless `m` is
/// Hermitian, unit-trace and PSD within tolerance.
pub fn density_to_bloch(m: &Mat2) -> Result<QubitState> {
    if !m.is_finite() {
        return Err(Error::NotAState("non-finite entries".into()));
    }
    let defect = m.hermitian_defect();
    if defect > HERMITIAN_TOL {
        return Err(Error::NotAState(format!("not Hermitian (defect {defect:e})")));
    }
    let tr = m.trace().re;
    if (tr - 1.0).abs() > HERMITIAN_TOL {
        return Err(Error::NotAState(format!("trace {tr}")));
    }
    let x = 2.0 * m.get(0, 1).re;
    let y = -2.0 * m.get(0, 1).im;
    let z = m.get(0, 0).re - m.get(1, 1).re;
    QubitState::from_bloch_vector([x, y, z])
}

/// Eigen-decomposition of a 2x2 Hermitian matrix.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Eig2 {
    /// Ascending.
    pub values: [f64; 2],
    /// Columns are the eigenvectors matching `values`.
    pub vectors: Mat2,
}

impl Eig2 {
    /// `U diag(f(values)) U^dagger`.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Mat2 {
        let u = self.vectors;
        let d = Mat2::diag(f(self.values[0]), f(self.values[1]));
        u * d * u.dagger()
    }
}

pub fn eig2_hermitian(m: &Mat2) -> Result<Eig2> {
    if !m.is_finite() {
        return Err(Error::Numerical("non-finite matrix entries".into()));
    }
    let defect = m.hermitian_defect();
    if defect > HERMITIAN_TOL {
        return Err(Error::NotHermitian(defect));
    }
    let a = m.get(0, 0).re;
    let d = m.get(1, 1).re;
    // average the two off-diagonal entries to absorb sub-tolerance asymmetry
    let b = (m.get(0, 1) + m.get(1, 0).conj()) * 0.5;
    let mean = (a + d) / 2.0;
    let h = (a - d) / 2.0;
    let bn = b.norm();
    let r = h.hypot(bn);
    let beta = bn.atan2(h);
    let psi = if bn == 0.0 { 0.0 } else { b.arg() };
    let (s, c) = (beta / 2.0).sin_cos();
    let ph = Complex::from_polar(1.0, -psi);
    // columns: v- = (sin, -e^{-i psi} cos), v+ = (cos, e^{-i psi} sin)
    let vectors = Mat2::new(
        Complex::new(s, 0.0),
        Complex::new(c, 0.0),
        -ph * c,
        ph * s,
    );
    Ok(Eig2 {
        values: [mean - r, mean + r],
        vectors,
    })
}

/// Clips an eigenvalue in `[-PSD_TOL, 0)` to zero; errors below that.
fn clip_eigenvalue(l: f64) -> Result<f64> {
    if l < -PSD_TOL {
        Err(Error::NotPsd(l))
    } else {
        Ok(l.max(0.0))
    }
}

/// `m^c` in the eigenbasis. Zero eigenvalues stay zero for every `c`,
/// including `c = 0`, so `m^0` is the projector onto the support.
pub fn fractional_power(m: &Mat2, c: f64) -> Result<Mat2> {
    if !(0.0..=1.0).contains(&c) {
        return Err(Error::BadExponent(c));
    }
    let eig = eig2_hermitian(m)?;
    let l0 = clip_eigenvalue(eig.values[0])?;
    let l1 = clip_eigenvalue(eig.values[1])?;
    let pow = |l: f64| if l == 0.0 { 0.0 } else { l.powf(c) };
    let (p0, p1) = (pow(l0), pow(l1));
    let u = eig.vectors;
    Ok(u * Mat2::diag(p0, p1) * u.dagger())
}

/// `-p log2 p - (1-p) log2 (1-p)`.
pub fn binary_entropy(p: f64) -> Result<f64> {
    Ok(binary_entropy_nats(p)? / LN_2)
}

pub fn binary_entropy_nats(p: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::BadProbability(p));
    }
    Ok(xlnx(p) + xlnx(1.0 - p))
}

/// `-x ln x` with the `0 ln 0 = 0` convention.
#[inline]
pub(crate) fn xlnx(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        -x * x.ln()
    }
}

/// Entropy (bits) of a qubit from its Bloch length.
pub fn qubit_entropy(q: &QubitState) -> f64 {
    let (lm, lp) = q.eigenvalues();
    (xlnx(lm) + xlnx(lp)) / LN_2
}

/// Spectrum-based entropy in nats; eigenvalues are clipped per [`PSD_TOL`].
pub fn entropy_nats_from_spectrum(spectrum: &[f64]) -> Result<f64> {
    let mut terms = Vec::with_capacity(spectrum.len());
    for &l in spectrum {
        let l = clip_eigenvalue(l)
            .map_err(|_| Error::NotAState(format!("negative eigenvalue {l:e}")))?;
        terms.push(xlnx(l));
    }
    Ok(pairwise_sum(&terms))
}

/// Upper limit for the dense representation, in qubits.
pub const DENSE_CAP_MAX: usize = 14;
pub const DENSE_CAP_DEFAULT: usize = 12;

/// Largest number of qubits a [`DenseState`] may span.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DenseCap(usize);

impl DenseCap {
    pub fn new(qubits: usize) -> Result<Self> {
        if qubits == 0 || qubits > DENSE_CAP_MAX {
            return Err(Error::TooLarge {
                what: "dense cap override",
                requested: qubits,
                cap: DENSE_CAP_MAX,
            });
        }
        Ok(DenseCap(qubits))
    }

    pub fn qubits(&self) -> usize {
        self.0
    }

    pub fn check(&self, what: &'static str, requested: usize) -> Result<()> {
        if requested > self.0 {
            Err(Error::TooLarge {
                what,
                requested,
                cap: self.0,
            })
        } else {
            Ok(())
        }
    }
}

impl Default for DenseCap {
    fn default() -> Self {
        DenseCap(DENSE_CAP_DEFAULT)
    }
}

/// A density matrix on `log2(dim)` qubits, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseState {
    dim: usize,
    data: Vec<Complex>,
}

impl DenseState {
    /// Validates shape, finiteness, Hermiticity and unit trace. Positivity is
    /// checked lazily by the spectral operations.
    pub fn from_matrix(dim: usize, data: Vec<Complex>) -> Result<Self> {
        if !dim.is_power_of_two() || data.len() != dim * dim {
            return Err(Error::NotAState(format!(
                "dimension {dim} with {} entries",
                data.len()
            )));
        }
        if data.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::NotAState("non-finite entries".into()));
        }
        let defect = hermitian_defect(dim, &data);
        if defect > HERMITIAN_TOL {
            return Err(Error::NotAState(format!("not Hermitian (defect {defect:e})")));
        }
        let tr: f64 = (0..dim).map(|i| data[i * dim + i].re).sum();
        if (tr - 1.0).abs() > HERMITIAN_TOL {
            return Err(Error::NotAState(format!("trace {tr}")));
        }
        Ok(DenseState { dim, data })
    }

    pub fn from_mat2(m: &Mat2) -> Result<Self> {
        DenseState::from_matrix(2, m.0.iter().flatten().copied().collect())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn qubits(&self) -> usize {
        self.dim.trailing_zeros() as usize
    }

    pub fn data(&self) -> &[Complex] {
        &self.data
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> Complex {
        self.data[r * self.dim + c]
    }

    pub fn trace(&self) -> Complex {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    /// Ascending eigenvalues.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        hermitian_eigenvalues(self.dim, &self.data)
    }

    /// `w1 * self + w2 * other`, unchecked (the result need not be a state).
    pub(crate) fn weighted_sum(&self, w1: f64, other: &DenseState, w2: f64) -> Vec<Complex> {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(x, y)| x * w1 + y * w2)
            .collect()
    }
}

fn hermitian_defect(dim: usize, data: &[Complex]) -> f64 {
    let mut d: f64 = 0.0;
    for r in 0..dim {
        d = d.max(data[r * dim + r].im.abs());
        for c in (r + 1)..dim {
            d = d.max((data[r * dim + c] - data[c * dim + r].conj()).norm());
        }
    }
    d
}

/// Ascending eigenvalues of a Hermitian matrix given row-major.
pub fn hermitian_eigenvalues(dim: usize, data: &[Complex]) -> Result<Vec<f64>> {
    if data.len() != dim * dim {
        return Err(Error::DimMismatch(data.len(), dim * dim));
    }
    let defect = hermitian_defect(dim, data);
    if defect > HERMITIAN_TOL {
        return Err(Error::NotHermitian(defect));
    }
    let m = Mat::<Complex>::from_fn(dim, dim, |r, c| data[r * dim + c]);
    let mut values = m
        .self_adjoint_eigenvalues(Side::Lower)
        .map_err(|e| Error::Numerical(format!("eigensolver: {e:?}")))?;
    values.sort_by(f64::total_cmp);
    Ok(values)
}

/// Tensor product in list order (the first factor is the most significant
/// qubit).
pub fn kron(states: &[Mat2], cap: DenseCap) -> Result<DenseState> {
    if states.is_empty() {
        return Err(Error::BadFragment("empty tensor product".into()));
    }
    cap.check("tensor product", states.len())?;
    let mut dim = 1usize;
    let mut acc = vec![ONE];
    for m in states {
        let nd = dim * 2;
        let mut next = vec![ZERO; nd * nd];
        for i in 0..dim {
            for j in 0..dim {
                let x = acc[i * dim + j];
                if x == ZERO {
                    continue;
                }
                for a in 0..2 {
                    for b in 0..2 {
                        next[(2 * i + a) * nd + 2 * j + b] = x * m.0[a][b];
                    }
                }
            }
        }
        acc = next;
        dim = nd;
    }
    DenseState::from_matrix(dim, acc)
}

/// Von Neumann entropy in bits.
pub fn von_neumann_entropy(s: &DenseState) -> Result<f64> {
    Ok(von_neumann_entropy_nats(s)? / LN_2)
}

pub fn von_neumann_entropy_nats(s: &DenseState) -> Result<f64> {
    entropy_nats_from_spectrum(&s.eigenvalues()?)
}

/// Sum of absolute eigenvalues of a Hermitian matrix.
pub fn trace_norm(dim: usize, data: &[Complex]) -> Result<f64> {
    let ev = hermitian_eigenvalues(dim, data)?;
    Ok(pairwise_sum(&ev.iter().map(|l| l.abs()).collect::<Vec<_>>()))
}

/// `(1/2) ||s1 - s2||_1`.
pub fn trace_norm_distance(s1: &DenseState, s2: &DenseState) -> Result<f64> {
    if s1.dim != s2.dim {
        return Err(Error::DimMismatch(s1.dim, s2.dim));
    }
    let diff = s1.weighted_sum(1.0, s2, -1.0);
    Ok(0.5 * trace_norm(s1.dim, &diff)?)
}

/// Pairwise summation in a fixed order, so the result depends only on the
/// input sequence and never on how work was split across threads.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    const BLOCK: usize = 32;
    if xs.len() <= BLOCK {
        xs.iter().sum()
    } else {
        let mid = xs.len() / 2;
        pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
    }
}

pub fn pairwise_mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        f64::NAN
    } else {
        pairwise_sum(xs) / xs.len() as f64
    }
}

/// Angle between two 3-vectors via `atan2(|u x v|, u . v)`; accurate near 0
/// and pi. Zero vectors give 0.
pub fn vector_angle(u: [f64; 3], v: [f64; 3]) -> f64 {
    let cross = [
        u[1] * v[2] - u[2] * v[1],
        u[2] * v[0] - u[0] * v[2],
        u[0] * v[1] - u[1] * v[0],
    ];
    let cn = (cross[0] * cross[0] + cross[1] * cross[1] + cross[2] * cross[2]).sqrt();
    let dot = u[0] * v[0] + u[1] * v[1] + u[2] * v[2];
    if cn == 0.0 && dot == 0.0 {
        0.0
    } else {
        cn.atan2(dot)
    }
}
