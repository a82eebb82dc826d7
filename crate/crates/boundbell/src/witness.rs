//! Entanglement witnesses generated by corner-form Bell operators.
//!
//! Both families share the shape W = I - w (e^(-i alpha)|0><m| +
//! e^(i alpha)|m><0|) with m = 2^n - 1:
//!
//! * the Bell-generated witness uses w = 3^n / (2^n sqrt(3)), inherited
//!   from the operator corner over the local hidden variable bound;
//! * the strengthened family uses w = kappa 2^(n-1) with kappa in [0, 1],
//!   the largest corner weight that keeps every product-state expectation
//!   nonnegative (the minimum over products is exactly 1 - kappa).
//!
//! A state rho is detected when Tr(W rho) < 0.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

use crate::algebra::{ProductProjectorSpec, QubitCount};
use crate::error::{Error, Result};
use crate::linalg::{c64, hermitize, kron_vec, quadratic_form, CMat, CVec};
use crate::tol;

/// Which corner family a witness belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WitnessKind {
    BellGenerated,
    Strengthened,
}

/// Hermitian witness operator with identity diagonal and two corners.
#[derive(Debug, Clone)]
pub struct WitnessOperator {
    n: QubitCount,
    kind: WitnessKind,
    alpha: f64,
    corner_magnitude: f64,
    matrix: CMat,
}

impl WitnessOperator {
    fn corner_form(n: QubitCount, kind: WitnessKind, alpha: f64, w: f64) -> Self {
        let dim = n.dim();
        let mut matrix = CMat::zeros((dim, dim));
        for i in 0..dim {
            matrix[[i, i]] = c64(1.0, 0.0);
        }
        matrix[[0, dim - 1]] = -w * c64(alpha.cos(), -alpha.sin());
        matrix[[dim - 1, 0]] = -w * c64(alpha.cos(), alpha.sin());
        let matrix = hermitize(matrix, tol::STRUCTURAL).expect("corner form is Hermitian");
        WitnessOperator {
            n,
            kind,
            alpha,
            corner_magnitude: w,
            matrix,
        }
    }

    pub fn qubits(&self) -> QubitCount {
        self.n
    }

    pub fn kind(&self) -> WitnessKind {
        self.kind
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Magnitude w of the corner entries (the entries are -w e^(-+ i alpha)).
    pub fn corner_magnitude(&self) -> f64 {
        self.corner_magnitude
    }

    pub fn matrix(&self) -> &CMat {
        &self.matrix
    }
}

/// Witness inherited from the three-setting Bell operator:
/// W = I - |corner(B(alpha))| / (2^(n-1) sqrt(3)), so w = 3^n / (2^n sqrt(3)).
pub fn witness_from_bell(n: QubitCount, alpha: f64) -> WitnessOperator {
    let w = 3f64.powi(n.get() as i32) / (2f64.powi(n.get() as i32) * 3f64.sqrt());
    WitnessOperator::corner_form(n, WitnessKind::BellGenerated, alpha, w)
}

/// Strengthened witness S(kappa, alpha) with corner weight kappa 2^(n-1).
pub fn s_witness(n: QubitCount, kappa: f64, alpha: f64) -> Result<WitnessOperator> {
    if !(0.0..=1.0).contains(&kappa) || kappa.is_nan() {
        return Err(Error::BadKappa(kappa));
    }
    let w = kappa * 2f64.powi(n.get() as i32 - 1);
    Ok(WitnessOperator::corner_form(
        n,
        WitnessKind::Strengthened,
        alpha,
        w,
    ))
}

/// Tr(S(kappa, alpha) rho_n(alpha)) = (n + 1 - kappa 2^(n-1)) / (n + 1);
/// negative exactly when kappa exceeds kappa_min(n).
pub fn detection_value(n: QubitCount, kappa: f64) -> f64 {
    let np1 = n.get() as f64 + 1.0;
    (np1 - kappa * 2f64.powi(n.get() as i32 - 1)) / np1
}

/// Smallest corner weight fraction that detects rho_n: (n + 1) / 2^(n-1).
pub fn kappa_min(n: QubitCount) -> f64 {
    (n.get() as f64 + 1.0) / 2f64.powi(n.get() as i32 - 1)
}

/// Expectation on a pure product state through the two corners alone:
///
/// ```text
/// Tr(W P) = 1 + 2^(1-n) prod_i sin(2 theta_i) Re(W_(0,m) e^(i sum phi))
/// ```
///
/// For corner weight w this is 1 - w 2^(1-n) cos(sum phi - alpha)
/// prod sin(2 theta), minimized at sum phi = alpha and theta = pi/4.
pub fn product_expectation(witness: &WitnessOperator, spec: &ProductProjectorSpec) -> Result<f64> {
    let n = witness.qubits().get();
    if spec.qubits().get() != n {
        return Err(Error::DimensionMismatch(format!(
            "{}-qubit product state against {}-qubit witness",
            spec.qubits().get(),
            n
        )));
    }
    let mut sin_prod = 1.0;
    let mut phi_sum = 0.0;
    for &(theta, phi) in spec.angles() {
        sin_prod *= (2.0 * theta).sin();
        phi_sum += phi;
    }
    let corner = witness.matrix[[0, witness.qubits().dim() - 1]];
    let phase = c64(phi_sum.cos(), phi_sum.sin());
    Ok(1.0 + 2f64.powi(1 - n as i32) * sin_prod * (corner * phase).re)
}

/// Outcome of a product-state positivity scan.
#[derive(Debug, Clone)]
pub struct PositivityScan {
    /// Smallest expectation found over all sampled and refined products.
    pub min_value: f64,
    /// (theta, phi) per qubit at the minimizer.
    pub argmin: Vec<(f64, f64)>,
    /// Number of random starts.
    pub samples: usize,
}

/// Bloch vector components of the +1 eigenstate parametrized by
/// (theta, phi): (sin 2theta cos phi, sin 2theta sin phi, cos 2theta).
fn bloch_to_angles(x: f64, y: f64, z: f64) -> (f64, f64) {
    (z.clamp(-1.0, 1.0).acos() / 2.0, y.atan2(x))
}

fn product_vector(angles: &[(f64, f64)]) -> CVec {
    let mut psi = CVec::from_elem(1, c64(1.0, 0.0));
    for &(theta, phi) in angles {
        let mut factor = CVec::zeros(2);
        factor[0] = c64(theta.cos(), 0.0);
        factor[1] = c64(phi.cos(), phi.sin()) * theta.sin();
        psi = kron_vec(&psi, &factor);
    }
    psi
}

fn dense_value(matrix: &CMat, angles: &[(f64, f64)]) -> f64 {
    quadratic_form(matrix, &product_vector(angles)).re
}

const SCAN_MAX_SWEEPS: usize = 100;

/// Minimizes Tr(W P) over pure product states by random Bloch-uniform
/// starts followed by cyclic single-qubit descent. The expectation is
/// affine in each qubit's Bloch vector, so every coordinate step is an
/// exact minimization reconstructed from four probe directions. All
/// evaluations go through the dense matrix, independent of the corner
/// closed form.
pub fn positivity_scan(
    witness: &WitnessOperator,
    samples: usize,
    seed: u64,
) -> Result<PositivityScan> {
    if samples == 0 {
        return Err(Error::InvalidArgument(
            "positivity scan needs at least one sample".into(),
        ));
    }
    let n = witness.qubits().get();
    let matrix = &witness.matrix;
    let mut best_value = f64::INFINITY;
    let mut best_angles = vec![(0.0, 0.0); n];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..samples {
        let mut angles: Vec<(f64, f64)> = (0..n)
            .map(|_| {
                let z: f64 = rng.gen_range(-1.0..=1.0);
                let phi: f64 = rng.gen_range(0.0..2.0 * PI);
                (z.acos() / 2.0, phi)
            })
            .collect();
        let mut value = dense_value(matrix, &angles);
        for _sweep in 0..SCAN_MAX_SWEEPS {
            let before = value;
            for q in 0..n {
                let saved = angles[q];
                let mut probe = |theta: f64, phi: f64| {
                    angles[q] = (theta, phi);
                    let v = dense_value(matrix, &angles);
                    angles[q] = saved;
                    v
                };
                let e_up = probe(0.0, 0.0);
                let e_down = probe(PI / 2.0, 0.0);
                let e_x = probe(PI / 4.0, 0.0);
                let e_y = probe(PI / 4.0, PI / 2.0);
                let c0 = 0.5 * (e_up + e_down);
                let (cx, cy, cz) = (e_x - c0, e_y - c0, e_up - c0);
                let norm = (cx * cx + cy * cy + cz * cz).sqrt();
                if norm < 1e-15 {
                    continue;
                }
                angles[q] = bloch_to_angles(-cx / norm, -cy / norm, -cz / norm);
                value = c0 - norm;
            }
            if before - value < tol::OPTIMIZER_CONVERGENCE {
                break;
            }
        }
        if value < best_value {
            best_value = value;
            best_angles = angles;
        }
    }
    Ok(PositivityScan {
        min_value: best_value,
        argmin: best_angles,
        samples,
    })
}
