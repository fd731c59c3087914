//! Dense symmetric eigendecomposition by cyclic Jacobi rotations.
//!
//! The decomposition is returned in the `M = Uᵀ diag(λ) U` convention: each
//! **row** of [`Spectrum::vectors`] is an eigenvector, so `U h` gives the
//! graph Fourier coefficients of a signal `h`.
//!
//! Results are deterministic. Rotations sweep the upper triangle in row
//! order, eigenvalues are sorted ascending (ties keep solver order), and each
//! eigenvector is signed so that its first entry with magnitude above
//! `1e-12` is positive.

use ndarray::{Array1, Array2, ArrayView1, Axis};

use crate::error::{Error, Result};
use crate::linalg::{ensure_rows, frobenius, max_asymmetry, SYMMETRY_TOL};

/// Off-diagonal Frobenius norm threshold, relative to `‖M‖_F`.
pub const CONVERGENCE_TOL: f64 = 1e-12;
pub const MAX_SWEEPS: usize = 100;
/// Eigenvalues within this distance of `ρ` count toward its multiplicity.
pub const EIGEN_TIE_TOL: f64 = 1e-9;
const SIGN_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    values: Array1<f64>,
    vectors: Array2<f64>,
    rho: f64,
    top_multiplicity: usize,
}

/// Eigendecomposition of a symmetric matrix.
pub fn eigh(m: &Array2<f64>) -> Result<Spectrum> {
    let (rows, cols) = m.dim();
    if rows != cols {
        return Err(Error::DimensionMismatch(format!(
            "eigh needs a square matrix, got {rows}x{cols}"
        )));
    }
    if rows == 0 {
        return Err(Error::DimensionMismatch(
            "eigh needs a non-empty matrix".into(),
        ));
    }
    if m.iter().any(|x| !x.is_finite()) {
        return Err(Error::OutOfRange("matrix has non-finite entries".into()));
    }
    let asymmetry = max_asymmetry(m);
    if asymmetry > SYMMETRY_TOL {
        return Err(Error::NotSymmetric { asymmetry });
    }

    let n = rows;
    let mut a = m.clone();
    // Mirror the upper triangle so rotations act on an exactly symmetric matrix.
    for i in 0..n {
        for j in (i + 1)..n {
            a[[j, i]] = a[[i, j]];
        }
    }
    let threshold = CONVERGENCE_TOL * frobenius(m);
    let mut v = Array2::<f64>::eye(n);

    let mut converged = false;
    for _ in 0..=MAX_SWEEPS {
        if off_diagonal_norm(&a) <= threshold {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
    }
    if !converged {
        return Err(Error::NoConvergence { sweeps: MAX_SWEEPS });
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[[i, i]].total_cmp(&a[[j, j]]));

    let values: Array1<f64> = order.iter().map(|&i| a[[i, i]]).collect();
    let mut vectors = Array2::<f64>::zeros((n, n));
    for (row, &col) in order.iter().enumerate() {
        let mut u = v.column(col).to_owned();
        if let Some(first) = u.iter().find(|x| x.abs() > SIGN_TOL) {
            if *first < 0.0 {
                u.mapv_inplace(|x| -x);
            }
        }
        vectors.row_mut(row).assign(&u);
    }
    Ok(Spectrum::from_parts(values, vectors))
}

fn off_diagonal_norm(a: &Array2<f64>) -> f64 {
    let n = a.nrows();
    let mut sum = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                sum += a[[i, j]] * a[[i, j]];
            }
        }
    }
    sum.sqrt()
}

/// Applies the rotation that zeroes `a[p][q]`, accumulating it into `v`.
fn rotate(a: &mut Array2<f64>, v: &mut Array2<f64>, p: usize, q: usize) {
    let apq = a[[p, q]];
    if apq == 0.0 {
        return;
    }
    let theta = (a[[q, q]] - a[[p, p]]) / (2.0 * apq);
    let t = if theta.abs() > 1e150 {
        0.5 / theta
    } else {
        theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
    };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;
    let n = a.nrows();
    for k in 0..n {
        let (akp, akq) = (a[[k, p]], a[[k, q]]);
        a[[k, p]] = c * akp - s * akq;
        a[[k, q]] = s * akp + c * akq;
    }
    for k in 0..n {
        let (apk, aqk) = (a[[p, k]], a[[q, k]]);
        a[[p, k]] = c * apk - s * aqk;
        a[[q, k]] = s * apk + c * aqk;
    }
    for k in 0..n {
        let (vkp, vkq) = (v[[k, p]], v[[k, q]]);
        v[[k, p]] = c * vkp - s * vkq;
        v[[k, q]] = s * vkp + c * vkq;
    }
}

impl Spectrum {
    fn from_parts(values: Array1<f64>, vectors: Array2<f64>) -> Self {
        let rho = values[values.len() - 1];
        let top_multiplicity = values
            .iter()
            .filter(|&&l| (rho - l).abs() <= EIGEN_TIE_TOL)
            .count();
        Self {
            values,
            vectors,
            rho,
            top_multiplicity,
        }
    }

    pub fn n(&self) -> usize {
        self.values.len()
    }

    /// Ascending eigenvalues.
    pub fn values(&self) -> &Array1<f64> {
        &self.values
    }

    /// Orthonormal eigenvectors, one per row, paired with [`Self::values`].
    pub fn vectors(&self) -> &Array2<f64> {
        &self.vectors
    }

    pub fn vector(&self, i: usize) -> ArrayView1<'_, f64> {
        self.vectors.row(i)
    }

    /// Largest eigenvalue `ρ`.
    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn top_multiplicity(&self) -> usize {
        self.top_multiplicity
    }

    /// `U H`.
    pub fn graph_fourier(&self, h: &Array2<f64>) -> Result<Array2<f64>> {
        ensure_rows(h, self.n(), "graph_fourier")?;
        Ok(self.vectors.dot(h))
    }

    /// `Uᵀ C`.
    pub fn inverse_fourier(&self, coeffs: &Array2<f64>) -> Result<Array2<f64>> {
        ensure_rows(coeffs, self.n(), "inverse_fourier")?;
        Ok(self.vectors.t().dot(coeffs))
    }

    /// `Uᵀ diag(f(λ)) U` as a dense matrix.
    pub fn spectral_matrix(&self, response: &Array1<f64>) -> Array2<f64> {
        let scaled = &self.vectors * &response.view().insert_axis(Axis(1));
        self.vectors.t().dot(&scaled)
    }

    /// `Uᵀ diag(f(λ)) U H` without forming the n×n matrix.
    pub fn apply_response(&self, response: &Array1<f64>, h: &Array2<f64>) -> Result<Array2<f64>> {
        let mut coeffs = self.graph_fourier(h)?;
        coeffs *= &response.view().insert_axis(Axis(1));
        self.inverse_fourier(&coeffs)
    }

    /// Projects every column of `h` onto the span of eigenvectors whose
    /// eigenvalue lies within [`EIGEN_TIE_TOL`] of `target`.
    pub fn eigenspace_projection(&self, target: f64, h: &Array2<f64>) -> Result<Array2<f64>> {
        let mask: Array1<f64> = self.values.mapv(|l| {
            if (l - target).abs() <= EIGEN_TIE_TOL {
                1.0
            } else {
                0.0
            }
        });
        self.apply_response(&mask, h)
    }

    /// `U diag(λ) Uᵀ` reassembled, in the `Uᵀ Λ U` orientation.
    pub fn reconstruct(&self) -> Array2<f64> {
        self.spectral_matrix(&self.values)
    }
}
