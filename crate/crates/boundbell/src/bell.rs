//! Three-setting Bell operators and the Mermin-Klyshko ladder.
//!
//! Each observer i measures one of three settings; setting k carries a
//! phase phi_k^i through the unitary
//!
//! ```text
//! U(phi) = (1/sqrt(2)) [ 1      1     ]
//!                      [ e^(i phi)  -e^(i phi) ]
//! ```
//!
//! whose columns define the projector pair P(0), P(1) with outcome
//! values -1 and +1. The Bell operator is the coefficient-weighted sum
//!
//! ```text
//! B_n = sum_k cos(phi^1_k1 + ... + phi^n_kn)  O_1(k_1) x ... x O_n(k_n)
//! ```
//!
//! with O(phi) = P(1) - P(0). Local hidden variable models obey
//! |<B_n>| <= 2^(n-1) sqrt(3) for the standard phase family, while the
//! operator itself reaches 3^n / 2.

use ndarray::Array2;
use num_complex::Complex64;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::f64::consts::PI;

use crate::algebra::{DensityMatrix, QubitCount};
use crate::error::{Error, Result};
use crate::linalg::{c64, hermitize, kron, CMat};
use crate::tol;

/// Coefficient values allowed for phase tables aligned to pi/6.
const PI_SIX_COEFFICIENTS: [f64; 7] = [-1.0, -0.8660254037844386, -0.5, 0.0, 0.5, 0.8660254037844386, 1.0];

/// Largest observer count accepted by the strategy enumeration (8^n leaves).
pub const ENUMERATION_MAX_QUBITS: usize = 7;

/// Setting phases, three per observer.
#[derive(Debug, Clone, PartialEq)]
pub struct SettingPhaseTable {
    phases: Vec<[f64; 3]>,
}

impl SettingPhaseTable {
    /// Standard family: observer 1 uses (pi/6, pi/2, 5pi/6), every other
    /// observer uses (0, pi/3, 2pi/3).
    pub fn standard(n: QubitCount) -> Self {
        let mut phases = vec![[0.0, PI / 3.0, 2.0 * PI / 3.0]; n.get()];
        phases[0] = [PI / 6.0, PI / 2.0, 5.0 * PI / 6.0];
        SettingPhaseTable { phases }
    }

    pub fn new(phases: Vec<[f64; 3]>) -> Result<Self> {
        QubitCount::new(phases.len())?;
        Ok(SettingPhaseTable { phases })
    }

    pub fn n_observers(&self) -> usize {
        self.phases.len()
    }

    /// Phases of observer i (0-based).
    pub fn phases(&self, observer: usize) -> [f64; 3] {
        self.phases[observer]
    }

    /// True when every phase is an integer multiple of pi/6 (within the
    /// structural tolerance), which confines the coefficients to
    /// {0, +-1/2, +-sqrt(3)/2, +-1}.
    pub fn is_pi_six_aligned(&self) -> bool {
        self.phases.iter().flatten().all(|p| {
            let q = p / (PI / 6.0);
            (q - q.round()).abs() < 1e-9
        })
    }
}

/// Dense tensor of coefficients c_k = cos(sum_i phi^i_{k_i}), indexed in
/// mixed radix with observer 1 most significant.
#[derive(Debug, Clone)]
pub struct CoefficientTensor {
    n: usize,
    values: Vec<f64>,
}

impl CoefficientTensor {
    pub fn from_table(table: &SettingPhaseTable) -> Result<Self> {
        let n = table.n_observers();
        let total = 3usize.pow(n as u32);
        let mut values = vec![0.0; total];
        for (index, slot) in values.iter_mut().enumerate() {
            let mut rest = index;
            let mut sum = 0.0;
            for observer in (0..n).rev() {
                sum += table.phases(observer)[rest % 3];
                rest /= 3;
            }
            *slot = sum.cos();
        }
        let tensor = CoefficientTensor { n, values };
        if table.is_pi_six_aligned() {
            for &v in &tensor.values {
                let ok = PI_SIX_COEFFICIENTS.iter().any(|c| (v - c).abs() < tol::STRUCTURAL);
                if !ok {
                    return Err(Error::InvalidArgument(format!(
                        "coefficient {v} escapes the pi/6 value set"
                    )));
                }
            }
        }
        Ok(tensor)
    }

    pub fn n_observers(&self) -> usize {
        self.n
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Coefficient for 0-based setting digits (one per observer).
    pub fn value(&self, digits: &[usize]) -> f64 {
        let index = digits.iter().fold(0usize, |acc, &d| acc * 3 + d);
        self.values[index]
    }
}

/// Hermitian Bell operator with its local hidden variable bound.
#[derive(Debug, Clone)]
pub struct BellOperator {
    n: QubitCount,
    matrix: CMat,
    classical_bound: f64,
}

impl BellOperator {
    pub fn new(n: QubitCount, matrix: CMat, classical_bound: f64) -> Result<Self> {
        if matrix.nrows() != n.dim() || matrix.ncols() != n.dim() {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} Bell operator for {} qubits",
                matrix.nrows(),
                matrix.ncols(),
                n.get()
            )));
        }
        let matrix = hermitize(matrix, tol::STRUCTURAL)?;
        Ok(BellOperator {
            n,
            matrix,
            classical_bound,
        })
    }

    pub fn qubits(&self) -> QubitCount {
        self.n
    }

    pub fn matrix(&self) -> &CMat {
        &self.matrix
    }

    pub fn classical_bound(&self) -> f64 {
        self.classical_bound
    }
}

/// Measurement unitary U(phi); columns are the measured basis.
pub fn setting_unitary(phi: f64) -> CMat {
    let inv = std::f64::consts::FRAC_1_SQRT_2;
    let e = c64(phi.cos(), phi.sin());
    let mut u = CMat::zeros((2, 2));
    u[[0, 0]] = c64(inv, 0.0);
    u[[0, 1]] = c64(inv, 0.0);
    u[[1, 0]] = e * inv;
    u[[1, 1]] = -e * inv;
    u
}

/// Projector pair (P(0), P(1)) with P(j) = U(phi)|j><j|U(phi)^dag.
pub fn projector_pair(phi: f64) -> (CMat, CMat) {
    let u = setting_unitary(phi);
    let mut p0 = CMat::zeros((2, 2));
    let mut p1 = CMat::zeros((2, 2));
    for i in 0..2 {
        for j in 0..2 {
            p0[[i, j]] = u[[i, 0]] * u[[j, 0]].conj();
            p1[[i, j]] = u[[i, 1]] * u[[j, 1]].conj();
        }
    }
    (p0, p1)
}

/// Dichotomic observable P(1) - P(0) for the outcome map P(0) -> -1,
/// P(1) -> +1. Equals -(cos(phi) sigma_x + sin(phi) sigma_y).
pub fn setting_observable(phi: f64) -> CMat {
    let (p0, p1) = projector_pair(phi);
    &p1 - &p0
}

/// Equatorial observable sigma(a) = cos(a) sigma_x + sin(a) sigma_y.
pub fn equatorial_observable(a: f64) -> CMat {
    let mut m = CMat::zeros((2, 2));
    m[[0, 1]] = c64(a.cos(), -a.sin());
    m[[1, 0]] = c64(a.cos(), a.sin());
    m
}

/// Full correlation function E(k_1, ..., k_n) = <O_1(k_1) x ... x O_n(k_n)>
/// for 1-based setting choices.
pub fn correlation(
    rho: &DensityMatrix,
    choices: &[usize],
    table: &SettingPhaseTable,
) -> Result<f64> {
    let n = rho.qubits().get();
    if choices.len() != n || table.n_observers() != n {
        return Err(Error::DimensionMismatch(format!(
            "{} choices / {} table rows for {} qubits",
            choices.len(),
            table.n_observers(),
            n
        )));
    }
    let mut op = CMat::from_shape_fn((1, 1), |_| c64(1.0, 0.0));
    for (observer, &k) in choices.iter().enumerate() {
        if !(1..=3).contains(&k) {
            return Err(Error::BadSettingIndex(k, 3));
        }
        op = kron(&op, &setting_observable(table.phases(observer)[k - 1]));
    }
    let value = crate::algebra::expectation(&op, rho)?;
    if value.abs() > 1.0 + tol::DERIVED {
        return Err(Error::InvalidArgument(format!(
            "correlation {value} escapes [-1, 1]"
        )));
    }
    Ok(value.clamp(-1.0, 1.0))
}

/// Assembles B_n = sum_k c_k O_1(k_1) x ... x O_n(k_n) term by term.
///
/// Terms are summed in fixed blocks of ascending index, so the result is
/// bit-identical regardless of thread count. Requires n >= 2.
pub fn bell_operator_three(n: QubitCount, table: &SettingPhaseTable) -> Result<BellOperator> {
    if n.get() < 2 {
        return Err(Error::InvalidArgument(
            "bell_operator_three needs at least 2 observers".into(),
        ));
    }
    if table.n_observers() != n.get() {
        return Err(Error::DimensionMismatch(format!(
            "phase table has {} rows for {} qubits",
            table.n_observers(),
            n.get()
        )));
    }
    let tensor = CoefficientTensor::from_table(table)?;
    let dim = n.dim();
    let observables: Vec<[CMat; 3]> = (0..n.get())
        .map(|i| {
            let p = table.phases(i);
            [
                setting_observable(p[0]),
                setting_observable(p[1]),
                setting_observable(p[2]),
            ]
        })
        .collect();
    let total = 3usize.pow(n.get() as u32);
    let blocks = 32.min(total);
    let partials: Vec<CMat> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let lo = total * b / blocks;
            let hi = total * (b + 1) / blocks;
            let mut acc = CMat::zeros((dim, dim));
            let mut digits = vec![0usize; n.get()];
            for index in lo..hi {
                let mut rest = index;
                for d in digits.iter_mut().rev() {
                    *d = rest % 3;
                    rest /= 3;
                }
                let mut term = CMat::from_shape_fn((1, 1), |_| c64(1.0, 0.0));
                for (observer, &d) in digits.iter().enumerate() {
                    term = kron(&term, &observables[observer][d]);
                }
                let c = tensor.values()[index];
                acc.zip_mut_with(&term, |a, t| *a += c * t);
            }
            acc
        })
        .collect();
    let mut matrix = CMat::zeros((dim, dim));
    for p in partials {
        matrix += &p;
    }
    let bound = 2f64.powi(n.get() as i32 - 1) * 3f64.sqrt();
    BellOperator::new(n, matrix, bound)
}

/// Closed form of the standard-family operator: all entries vanish
/// except the corners (0, 2^n - 1) and (2^n - 1, 0), which carry
/// (-3)^n / 2 times e^(-+ i alpha).
pub fn bell_operator_closed_form(n: QubitCount, alpha: f64) -> BellOperator {
    let dim = n.dim();
    let corner = (-3.0f64).powi(n.get() as i32) / 2.0;
    let mut matrix = CMat::zeros((dim, dim));
    matrix[[0, dim - 1]] = corner * c64(alpha.cos(), -alpha.sin());
    matrix[[dim - 1, 0]] = corner * c64(alpha.cos(), alpha.sin());
    let bound = 2f64.powi(n.get() as i32 - 1) * 3f64.sqrt();
    BellOperator::new(n, matrix, bound).expect("corner matrix is Hermitian")
}

/// Conjugates by the local phase shift (|0><0| + e^(i alpha/n)|1><1|)^(x n):
/// entry (x, y) picks up e^(i alpha (popcount x - popcount y) / n).
/// Eigenvalues are untouched.
pub fn rotate_operator(op: &BellOperator, alpha: f64) -> BellOperator {
    let n = op.qubits();
    let step = alpha / n.get() as f64;
    let phases: Vec<Complex64> = (0..=n.get())
        .map(|p| {
            let t = step * p as f64;
            c64(t.cos(), t.sin())
        })
        .collect();
    let dim = n.dim();
    let matrix = Array2::from_shape_fn((dim, dim), |(x, y)| {
        let px = x.count_ones() as usize;
        let py = y.count_ones() as usize;
        op.matrix()[[x, y]] * phases[px] * phases[py].conj()
    });
    BellOperator::new(n, matrix, op.classical_bound()).expect("rotation preserves Hermiticity")
}

/// Exhaustive local hidden variable bound: the maximum of
/// |sum_k c_k prod_i v_i(k_i)| over all 8^n deterministic sign tables
/// v_i: {1,2,3} -> {-1,+1}. Capped at n <= 7.
pub fn lhv_bound_enumeration(n: QubitCount, table: &SettingPhaseTable) -> Result<f64> {
    if n.get() > ENUMERATION_MAX_QUBITS {
        return Err(Error::EnumerationTooLarge(
            8u64.pow(n.get() as u32),
            8u64.pow(ENUMERATION_MAX_QUBITS as u32),
        ));
    }
    let tensor = CoefficientTensor::from_table(table)?;
    Ok(enumerate_max(tensor.values()))
}

/// Recursive prefix contraction: absorbing one observer's sign vector
/// shrinks the tensor by a factor of 3; every one of the 8^n leaves is
/// an exactly evaluated deterministic strategy.
fn enumerate_max(tensor: &[f64]) -> f64 {
    if tensor.len() == 1 {
        return tensor[0].abs();
    }
    let rest = tensor.len() / 3;
    let mut best = 0.0f64;
    // Sign vectors for the last (least significant) observer.
    for signs in 0..8u32 {
        let v = [
            if signs & 4 == 0 { 1.0 } else { -1.0 },
            if signs & 2 == 0 { 1.0 } else { -1.0 },
            if signs & 1 == 0 { 1.0 } else { -1.0 },
        ];
        let contracted: Vec<f64> = (0..rest)
            .map(|j| {
                v[0] * tensor[3 * j] + v[1] * tensor[3 * j + 1] + v[2] * tensor[3 * j + 2]
            })
            .collect();
        let candidate = enumerate_max(&contracted);
        if candidate > best {
            best = candidate;
        }
    }
    best
}

/// Noise robustness report: the critical admixture below which the state
/// still violates the inequality.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseThreshold {
    /// Critical noise weight, clamped to 0 when there is no violation.
    pub value: f64,
    /// Whether the noiseless state violates the bound at all.
    pub violation: bool,
}

/// Critical noise for the three-setting test on rho_n(alpha):
/// v < 1 - 2^n (n+1) sqrt(3) / 3^n keeps the violation alive.
pub fn noise_threshold_three(n: QubitCount) -> NoiseThreshold {
    let raw = 1.0 - 2f64.powi(n.get() as i32) * (n.get() as f64 + 1.0) * 3f64.sqrt()
        / 3f64.powi(n.get() as i32);
    NoiseThreshold {
        value: raw.max(0.0),
        violation: raw > 0.0,
    }
}

/// Equatorial Mermin-Klyshko settings: one angle pair per observer.
#[derive(Debug, Clone, PartialEq)]
pub struct MkSettings {
    pairs: Vec<(f64, f64)>,
}

impl MkSettings {
    pub fn new(pairs: Vec<(f64, f64)>) -> Result<Self> {
        QubitCount::new(pairs.len())?;
        Ok(MkSettings {
            pairs: pairs
                .into_iter()
                .map(|(a, b)| (a.rem_euclid(2.0 * PI), b.rem_euclid(2.0 * PI)))
                .collect(),
        })
    }

    pub fn n_observers(&self) -> usize {
        self.pairs.len()
    }

    pub fn pairs(&self) -> &[(f64, f64)] {
        &self.pairs
    }
}

/// Mermin-Klyshko operator, normalized so every local hidden variable
/// model obeys |<M_n>| <= 1:
///
/// ```text
/// M_k = (1/2) M_(k-1) x (s_k + s'_k) + (1/2) M'_(k-1) x (s_k - s'_k)
/// ```
///
/// with s_k = sigma(a_k) and M' the primed-swapped partner. The largest
/// eigenvalue is 2^((n-1)/2).
pub fn mk_operator(n: QubitCount, settings: &MkSettings) -> Result<BellOperator> {
    if settings.n_observers() != n.get() {
        return Err(Error::DimensionMismatch(format!(
            "{} setting pairs for {} qubits",
            settings.n_observers(),
            n.get()
        )));
    }
    let (a0, b0) = settings.pairs()[0];
    let mut m = equatorial_observable(a0);
    let mut mp = equatorial_observable(b0);
    for &(a, b) in &settings.pairs()[1..] {
        let s = equatorial_observable(a);
        let sp = equatorial_observable(b);
        let sum = (&s + &sp).mapv(|z| z * 0.5);
        let diff = (&s - &sp).mapv(|z| z * 0.5);
        let next = kron(&m, &sum) + kron(&mp, &diff);
        let next_p = kron(&mp, &sum) - kron(&m, &diff);
        m = next;
        mp = next_p;
    }
    BellOperator::new(n, m, 1.0)
}

/// <x| sigma(a) |y> for basis levels x, y.
fn equatorial_element(a: f64, x: u8, y: u8) -> Complex64 {
    match (x, y) {
        (0, 1) => c64(a.cos(), -a.sin()),
        (1, 0) => c64(a.cos(), a.sin()),
        _ => c64(0.0, 0.0),
    }
}

/// <x|M_n|y> for product basis states, via the (M, M') pair recursion;
/// costs O(n) instead of building the 2^n matrix.
fn mk_matrix_element(settings: &MkSettings, x: &[u8], y: &[u8]) -> Complex64 {
    let (a0, b0) = settings.pairs()[0];
    let mut m = equatorial_element(a0, x[0], y[0]);
    let mut mp = equatorial_element(b0, x[0], y[0]);
    for (k, &(a, b)) in settings.pairs().iter().enumerate().skip(1) {
        let s = equatorial_element(a, x[k], y[k]);
        let sp = equatorial_element(b, x[k], y[k]);
        let half_sum = (s + sp) * 0.5;
        let half_diff = (s - sp) * 0.5;
        let next = m * half_sum + mp * half_diff;
        let next_p = mp * half_sum - m * half_diff;
        m = next;
        mp = next_p;
    }
    m
}

/// Tr(M_n rho_n(alpha)) evaluated through the 2n+4 nonzero entries of the
/// state; agrees with the dense route to machine precision.
pub fn mk_dur_expectation(n: QubitCount, alpha: f64, settings: &MkSettings) -> f64 {
    let nq = n.get();
    let zeros = vec![0u8; nq];
    let ones = vec![1u8; nq];
    let d00 = mk_matrix_element(settings, &zeros, &zeros);
    let d11 = mk_matrix_element(settings, &ones, &ones);
    let corner = mk_matrix_element(settings, &zeros, &ones);
    let phase = c64(alpha.cos(), alpha.sin());
    let mut acc = 0.5 * (d00.re + d11.re) + (phase * corner).re;
    for k in 0..nq {
        let mut e = zeros.clone();
        e[k] = 1;
        let mut h = ones.clone();
        h[k] = 0;
        let de = mk_matrix_element(settings, &e, &e);
        let dh = mk_matrix_element(settings, &h, &h);
        acc += 0.5 * (de.re + dh.re);
    }
    acc / (nq as f64 + 1.0)
}

const MK_OPTIMIZER_STARTS: usize = 32;
const MK_OPTIMIZER_SEED: u64 = 0x4d4b_5345;
const MK_OPTIMIZER_MAX_SWEEPS: usize = 300;

/// Maximum of Tr(M_n(s) rho_n(alpha)) over equatorial settings s.
///
/// Multi-start cyclic coordinate ascent over the 2n angles; because the
/// objective is A cos(t) + B sin(t) + C in any single angle, each
/// coordinate step is an exact maximization from three probes. A start
/// converges when a full sweep improves by less than 1e-10.
pub fn mk_dur_optimum(n: QubitCount, alpha: f64) -> Result<f64> {
    if n.get() < 4 {
        return Err(Error::InvalidArgument(format!(
            "mk_dur_optimum needs at least 4 qubits, got {}",
            n.get()
        )));
    }
    let nq = n.get();
    let results: Vec<(f64, bool)> = (0..MK_OPTIMIZER_STARTS)
        .into_par_iter()
        .map(|start| {
            let mut rng = ChaCha8Rng::seed_from_u64(MK_OPTIMIZER_SEED ^ ((nq as u64) << 32));
            rng.set_stream(start as u64);
            let mut angles: Vec<f64> = (0..2 * nq).map(|_| rng.gen_range(0.0..2.0 * PI)).collect();
            let eval = |angles: &[f64]| {
                let pairs = (0..nq).map(|k| (angles[2 * k], angles[2 * k + 1])).collect();
                let settings = MkSettings::new(pairs).expect("angle count fixed");
                mk_dur_expectation(n, alpha, &settings)
            };
            let mut value = eval(&angles);
            let mut converged = false;
            for _sweep in 0..MK_OPTIMIZER_MAX_SWEEPS {
                let before = value;
                for j in 0..2 * nq {
                    let original = angles[j];
                    angles[j] = 0.0;
                    let e0 = eval(&angles);
                    angles[j] = PI / 2.0;
                    let e1 = eval(&angles);
                    angles[j] = PI;
                    let e2 = eval(&angles);
                    let offset = 0.5 * (e0 + e2);
                    let a = e0 - offset;
                    let b = e1 - offset;
                    let amplitude = a.hypot(b);
                    if amplitude < 1e-300 {
                        angles[j] = original;
                        continue;
                    }
                    angles[j] = b.atan2(a);
                    value = offset + amplitude;
                }
                if value - before < tol::OPTIMIZER_CONVERGENCE {
                    converged = true;
                    break;
                }
            }
            (value, converged)
        })
        .collect();
    let best = results.iter().map(|r| r.0).fold(f64::NEG_INFINITY, f64::max);
    if results.iter().any(|r| !r.1) {
        return Err(Error::OptimizerNonConvergence { best });
    }
    Ok(best)
}

/// Critical noise for the Mermin-Klyshko test on rho_n(alpha) at the
/// ladder phase alpha_n = pi / (4(n-1)). The optimum is located to the
/// optimizer's convergence tolerance, so a raw threshold inside that
/// tolerance of zero is numerically indistinguishable from no violation
/// and reports as exactly zero.
pub fn noise_threshold_mk(n: QubitCount) -> Result<NoiseThreshold> {
    let alpha = PI / (4.0 * (n.get() as f64 - 1.0));
    let optimum = mk_dur_optimum(n, alpha)?;
    let raw = 1.0 - 1.0 / optimum;
    let violation = raw > tol::OPTIMIZER_CONVERGENCE;
    Ok(NoiseThreshold {
        value: if violation { raw } else { 0.0 },
        violation,
    })
}
