//! Dense complex linear algebra shared by the physics modules.
//!
//! All operators are `ndarray::Array2<Complex64>` in the computational
//! basis with the first qubit in the most significant bit position, so a
//! basis assignment (l_1, ..., l_n) maps to index sum_k l_k 2^(n-k).

use ndarray::{Array1, Array2};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type CMat = Array2<Complex64>;
pub type CVec = Array1<Complex64>;

pub fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Kronecker product with the left factor in the most significant slot.
pub fn kron(a: &CMat, b: &CMat) -> CMat {
    let (ar, ac) = a.dim();
    let (br, bc) = b.dim();
    let mut out = CMat::zeros((ar * br, ac * bc));
    for i1 in 0..ar {
        for j1 in 0..ac {
            let f = a[[i1, j1]];
            if f == Complex64::new(0.0, 0.0) {
                continue;
            }
            for i2 in 0..br {
                for j2 in 0..bc {
                    out[[i1 * br + i2, j1 * bc + j2]] = f * b[[i2, j2]];
                }
            }
        }
    }
    out
}

/// Kronecker product of vectors, left factor most significant.
pub fn kron_vec(a: &CVec, b: &CVec) -> CVec {
    let mut out = CVec::zeros(a.len() * b.len());
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i * b.len() + j] = x * y;
        }
    }
    out
}

pub fn dagger(a: &CMat) -> CMat {
    let (r, c) = a.dim();
    CMat::from_shape_fn((c, r), |(i, j)| a[[j, i]].conj())
}

pub fn trace(a: &CMat) -> Complex64 {
    (0..a.nrows()).map(|i| a[[i, i]]).sum()
}

/// Tr(A B) without forming the product matrix.
pub fn trace_product(a: &CMat, b: &CMat) -> Complex64 {
    let n = a.nrows();
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            acc += a[[i, j]] * b[[j, i]];
        }
    }
    acc
}

/// v† A v without forming intermediate matrices.
pub fn quadratic_form(a: &CMat, v: &CVec) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..a.nrows() {
        let mut row = Complex64::new(0.0, 0.0);
        for j in 0..a.ncols() {
            row += a[[i, j]] * v[j];
        }
        acc += v[i].conj() * row;
    }
    acc
}

/// Largest modulus of A - A† over all entries.
pub fn max_asymmetry(a: &CMat) -> f64 {
    let n = a.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            let d = (a[[i, j]] - a[[j, i]].conj()).norm();
            if d > worst {
                worst = d;
            }
        }
    }
    worst
}

/// Symmetrizes to (A + A†)/2 when the asymmetry is below `tol`,
/// otherwise rejects the matrix.
pub fn hermitize(a: CMat, tol: f64) -> Result<CMat> {
    let asym = max_asymmetry(&a);
    if asym > tol {
        return Err(Error::NotHermitian(asym));
    }
    let ad = dagger(&a);
    Ok((&a + &ad).mapv(|z| z * 0.5))
}

pub fn max_abs_diff(a: &CMat, b: &CMat) -> f64 {
    let mut worst = 0.0f64;
    for (x, y) in a.iter().zip(b.iter()) {
        let d = (x - y).norm();
        if d > worst {
            worst = d;
        }
    }
    worst
}

/// Eigenvalues of a Hermitian matrix by cyclic complex Jacobi sweeps,
/// returned in ascending order.
pub fn hermitian_eigenvalues(a: &CMat) -> Vec<f64> {
    let n = a.nrows();
    let mut m = a.clone();
    let scale: f64 = m
        .iter()
        .map(|z| z.norm_sqr())
        .sum::<f64>()
        .sqrt()
        .max(1e-300);
    for _sweep in 0..100 {
        let mut off = 0.0f64;
        for p in 0..n {
            for q in (p + 1)..n {
                off += m[[p, q]].norm_sqr();
            }
        }
        if (2.0 * off).sqrt() <= 1e-14 * scale {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[[p, q]];
                let r = apq.norm();
                if r <= 1e-300 {
                    continue;
                }
                // Dephase so the pivot entry is real, then rotate as in the
                // symmetric Jacobi step.
                let phase = apq / r;
                let app = m[[p, p]].re;
                let aqq = m[[q, q]].re;
                let tau = (aqq - app) / (2.0 * r);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // Column transform: (col_p, col_q) <- (c col_p - s phase* col_q,
                //                                      s phase col_p + c col_q).
                for i in 0..n {
                    let aip = m[[i, p]];
                    let aiq = m[[i, q]];
                    m[[i, p]] = c * aip - s * phase.conj() * aiq;
                    m[[i, q]] = s * phase * aip + c * aiq;
                }
                for j in 0..n {
                    let apj = m[[p, j]];
                    let aqj = m[[q, j]];
                    m[[p, j]] = c * apj - s * phase * aqj;
                    m[[q, j]] = s * phase.conj() * apj + c * aqj;
                }
            }
        }
    }
    let mut eig: Vec<f64> = (0..n).map(|i| m[[i, i]].re).collect();
    eig.sort_by(|a, b| a.partial_cmp(b).unwrap());
    eig
}

/// Positive semidefiniteness test: Cholesky of A + floor*I must succeed.
/// `floor` is the modulus of the most negative eigenvalue tolerated.
pub fn is_positive_semidefinite(a: &CMat, floor: f64) -> bool {
    let n = a.nrows();
    let mut l = a.clone();
    for i in 0..n {
        l[[i, i]] += floor;
    }
    for j in 0..n {
        let mut d = l[[j, j]].re;
        for k in 0..j {
            d -= l[[j, k]].norm_sqr();
        }
        if d <= 0.0 {
            return false;
        }
        let djj = d.sqrt();
        l[[j, j]] = Complex64::new(djj, 0.0);
        for i in (j + 1)..n {
            let mut v = l[[i, j]];
            for k in 0..j {
                v -= l[[i, k]] * l[[j, k]].conj();
            }
            l[[i, j]] = v / djj;
        }
    }
    true
}

/// Flat JSON form of a square complex matrix: dimension plus row-major
/// `[re, im]` pairs.
#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct MatrixJson {
    pub dim: usize,
    pub entries: Vec<[f64; 2]>,
}

pub fn matrix_to_json(a: &CMat) -> String {
    let dim = a.nrows();
    let entries = a.iter().map(|z| [z.re, z.im]).collect();
    serde_json::to_string(&MatrixJson { dim, entries }).expect("matrix serialization")
}

pub fn matrix_from_json(text: &str) -> Result<CMat> {
    let parsed: MatrixJson = serde_json::from_str(text)?;
    if parsed.entries.len() != parsed.dim * parsed.dim {
        return Err(Error::Serialization(format!(
            "matrix JSON claims dim {} but carries {} entries",
            parsed.dim,
            parsed.entries.len()
        )));
    }
    Ok(CMat::from_shape_fn((parsed.dim, parsed.dim), |(i, j)| {
        let [re, im] = parsed.entries[i * parsed.dim + j];
        c64(re, im)
    }))
}
