//! States and operators for n-qubit systems.
//!
//! Basis convention: the first qubit is the most significant bit, so the
//! assignment (l_1, ..., l_n) with l_k in {0, 1} sits at index
//! sum_k l_k 2^(n-k). The GHZ family is
//!
//! ```text
//! |psi(alpha)> = (|0...0> + e^(i alpha) |1...1>) / sqrt(2)
//! ```
//!
//! and the bound entangled family mixes the GHZ projector with the n
//! single-excitation projectors P_k and their bit-flipped partners:
//!
//! ```text
//! rho_n(alpha) = ( |psi><psi| + (1/2) sum_k (P_k + Pbar_k) ) / (n + 1)
//! ```

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{
    self, c64, is_positive_semidefinite, kron, matrix_from_json, matrix_to_json, trace,
    trace_product, CMat, CVec,
};
use crate::tol;

/// Smallest supported system size.
pub const MIN_QUBITS: usize = 1;
/// Largest supported system size (dense 4096 x 4096 operators).
pub const MAX_QUBITS: usize = 12;

/// Number of qubits, restricted to the dense-matrix range 1..=12.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QubitCount(usize);

impl QubitCount {
    pub fn new(n: usize) -> Result<Self> {
        if !(MIN_QUBITS..=MAX_QUBITS).contains(&n) {
            return Err(Error::QubitCountOutOfRange(n, MIN_QUBITS, MAX_QUBITS));
        }
        Ok(QubitCount(n))
    }

    pub fn get(self) -> usize {
        self.0
    }

    /// Hilbert space dimension 2^n.
    pub fn dim(self) -> usize {
        1 << self.0
    }
}

/// Index of the basis assignment (l_1, ..., l_n), first qubit most
/// significant.
pub fn basis_index(levels: &[u8]) -> usize {
    levels.iter().fold(0usize, |acc, &l| {
        debug_assert!(l <= 1);
        (acc << 1) | l as usize
    })
}

/// Pure n-qubit state with unit norm.
#[derive(Debug, Clone)]
pub struct StateVector {
    n: QubitCount,
    amplitudes: CVec,
}

impl StateVector {
    pub fn new(n: QubitCount, amplitudes: CVec) -> Result<Self> {
        if amplitudes.len() != n.dim() {
            return Err(Error::DimensionMismatch(format!(
                "state vector of length {} for {} qubits (expected {})",
                amplitudes.len(),
                n.get(),
                n.dim()
            )));
        }
        let norm = amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > tol::STRUCTURAL {
            return Err(Error::NotNormalized(norm));
        }
        Ok(StateVector { n, amplitudes })
    }

    pub fn qubits(&self) -> QubitCount {
        self.n
    }

    pub fn amplitudes(&self) -> &CVec {
        &self.amplitudes
    }

    pub fn overlap(&self, other: &StateVector) -> Complex64 {
        self.amplitudes
            .iter()
            .zip(other.amplitudes.iter())
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// Rank-one density matrix |psi><psi|.
    pub fn projector(&self) -> DensityMatrix {
        let d = self.amplitudes.len();
        let m = CMat::from_shape_fn((d, d), |(i, j)| {
            self.amplitudes[i] * self.amplitudes[j].conj()
        });
        DensityMatrix::new(self.n, m).expect("projector of a unit vector is a state")
    }
}

/// Mixed state: Hermitian, unit trace, eigenvalues above -1e-10.
///
/// Construction symmetrizes (A + A†)/2 when the asymmetry is below the
/// structural tolerance and rejects the matrix otherwise.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    n: QubitCount,
    matrix: CMat,
}

impl DensityMatrix {
    pub fn new(n: QubitCount, matrix: CMat) -> Result<Self> {
        if matrix.nrows() != n.dim() || matrix.ncols() != n.dim() {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} matrix for {} qubits (expected {dim}x{dim})",
                matrix.nrows(),
                matrix.ncols(),
                n.get(),
                dim = n.dim()
            )));
        }
        let matrix = linalg::hermitize(matrix, tol::STRUCTURAL)?;
        let tr = trace(&matrix);
        if (tr.re - 1.0).abs() > tol::STRUCTURAL || tr.im.abs() > tol::STRUCTURAL {
            return Err(Error::BadTrace(tr.re));
        }
        if !is_positive_semidefinite(&matrix, tol::PSD_FLOOR) {
            return Err(Error::NotPositiveSemidefinite);
        }
        Ok(DensityMatrix { n, matrix })
    }

    pub fn qubits(&self) -> QubitCount {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.n.dim()
    }

    pub fn matrix(&self) -> &CMat {
        &self.matrix
    }

    pub fn to_json(&self) -> String {
        matrix_to_json(&self.matrix)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let m = matrix_from_json(text)?;
        let dim = m.nrows();
        if !dim.is_power_of_two() {
            return Err(Error::DimensionMismatch(format!(
                "matrix dimension {dim} is not a power of two"
            )));
        }
        let n = QubitCount::new(dim.trailing_zeros() as usize)?;
        DensityMatrix::new(n, m)
    }
}

/// Product of single-qubit projectors: qubit k carries the state
/// cos(theta_k)|0> + e^(i phi_k) sin(theta_k)|1>.
#[derive(Debug, Clone)]
pub struct ProductProjectorSpec {
    angles: Vec<(f64, f64)>,
}

impl ProductProjectorSpec {
    pub fn new(angles: Vec<(f64, f64)>) -> Result<Self> {
        QubitCount::new(angles.len())?;
        Ok(ProductProjectorSpec { angles })
    }

    pub fn qubits(&self) -> QubitCount {
        QubitCount::new(self.angles.len()).expect("validated at construction")
    }

    pub fn angles(&self) -> &[(f64, f64)] {
        &self.angles
    }

    /// Single-qubit state of factor k as a length-2 vector.
    pub fn factor(&self, k: usize) -> CVec {
        let (theta, phi) = self.angles[k];
        let mut v = CVec::zeros(2);
        v[0] = c64(theta.cos(), 0.0);
        v[1] = c64(phi.cos(), phi.sin()) * theta.sin();
        v
    }
}

/// GHZ state (|0...0> + e^(i alpha)|1...1>)/sqrt(2).
pub fn ghz(n: QubitCount, alpha: f64) -> StateVector {
    let mut amplitudes = CVec::zeros(n.dim());
    let inv = std::f64::consts::FRAC_1_SQRT_2;
    amplitudes[0] = c64(inv, 0.0);
    amplitudes[n.dim() - 1] = c64(alpha.cos(), alpha.sin()) * inv;
    StateVector::new(n, amplitudes).expect("GHZ amplitudes are normalized")
}

/// Bound entangled family rho_n(alpha); requires n >= 2.
///
/// For n >= 3 exactly 2n+4 entries are nonzero: the 2n+2 diagonal
/// weights 1/(2(n+1)) and the two GHZ corners e^(-+ i alpha)/(2(n+1)).
/// At n = 2 each single-excitation state coincides with the other
/// qubit's hole state, merging the diagonal weights pairwise.
pub fn dur_state(n: QubitCount, alpha: f64) -> Result<DensityMatrix> {
    if n.get() < 2 {
        return Err(Error::InvalidArgument(format!(
            "dur_state needs at least 2 qubits, got {}",
            n.get()
        )));
    }
    let dim = n.dim();
    let top = dim - 1;
    let w = 0.5 / (n.get() as f64 + 1.0);
    let mut m = CMat::zeros((dim, dim));
    m[[0, 0]] = c64(w, 0.0);
    m[[top, top]] = c64(w, 0.0);
    m[[0, top]] = c64(alpha.cos(), -alpha.sin()) * w;
    m[[top, 0]] = c64(alpha.cos(), alpha.sin()) * w;
    for k in 1..=n.get() {
        let excited = 1usize << (n.get() - k);
        let hole = top - excited;
        m[[excited, excited]] += w;
        m[[hole, hole]] += w;
    }
    DensityMatrix::new(n, m)
}

/// White-noise admixture (1 - v) rho + v I / 2^n.
pub fn mix_with_noise(rho: &DensityMatrix, v: f64) -> Result<DensityMatrix> {
    if !(0.0..=1.0).contains(&v) || v.is_nan() {
        return Err(Error::BadNoiseWeight(v));
    }
    let dim = rho.dim();
    let uniform = v / dim as f64;
    let mut m = rho.matrix().mapv(|z| z * (1.0 - v));
    for i in 0..dim {
        m[[i, i]] += uniform;
    }
    DensityMatrix::new(rho.qubits(), m)
}

/// Projector onto the product state described by `spec`.
pub fn product_projector(spec: &ProductProjectorSpec) -> DensityMatrix {
    let n = spec.qubits();
    let mut m = CMat::from_shape_fn((1, 1), |_| c64(1.0, 0.0));
    for k in 0..n.get() {
        let v = spec.factor(k);
        let p = CMat::from_shape_fn((2, 2), |(i, j)| v[i] * v[j].conj());
        m = kron(&m, &p);
    }
    DensityMatrix::new(n, m).expect("product projector is a state")
}

/// Expectation value Tr(op rho) of a Hermitian operator.
///
/// The operator must be Hermitian within 1e-10; the imaginary part of
/// the trace is checked against 1e-9 and discarded.
pub fn expectation(op: &CMat, rho: &DensityMatrix) -> Result<f64> {
    if op.nrows() != rho.dim() || op.ncols() != rho.dim() {
        return Err(Error::DimensionMismatch(format!(
            "operator is {}x{}, state is {dim}x{dim}",
            op.nrows(),
            op.ncols(),
            dim = rho.dim()
        )));
    }
    let asym = linalg::max_asymmetry(op);
    if asym > tol::EXPECT_HERMITICITY {
        return Err(Error::NotHermitian(asym));
    }
    let value = trace_product(op, rho.matrix());
    if value.im.abs() > tol::EXPECT_IMAG {
        return Err(Error::ImaginaryResidue(value.im));
    }
    Ok(value.re)
}
