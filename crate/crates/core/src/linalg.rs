//! Small dense-matrix helpers shared across modules.

use ndarray::{Array2, ArrayBase, Data, Ix2};

use crate::error::{Error, Result};

/// Tolerance used when validating that a matrix is symmetric.
pub const SYMMETRY_TOL: f64 = 1e-12;

pub fn frobenius<S: Data<Elem = f64>>(m: &ArrayBase<S, Ix2>) -> f64 {
    m.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Frobenius inner product `tr(aᵀ b)`.
pub fn inner<S1, S2>(a: &ArrayBase<S1, Ix2>, b: &ArrayBase<S2, Ix2>) -> f64
where
    S1: Data<Elem = f64>,
    S2: Data<Elem = f64>,
{
    a.iter().zip(b.iter()).map(|(x, y)| x * y).sum()
}

/// Largest `|m_ij - m_ji|`; `f64::INFINITY` for non-square input.
pub fn max_asymmetry<S: Data<Elem = f64>>(m: &ArrayBase<S, Ix2>) -> f64 {
    let (r, c) = m.dim();
    if r != c {
        return f64::INFINITY;
    }
    let mut worst = 0.0_f64;
    for i in 0..r {
        for j in (i + 1)..c {
            worst = worst.max((m[[i, j]] - m[[j, i]]).abs());
        }
    }
    worst
}

pub fn ensure_symmetric<S: Data<Elem = f64>>(m: &ArrayBase<S, Ix2>) -> Result<()> {
    let (r, c) = m.dim();
    if r != c {
        return Err(Error::DimensionMismatch(format!(
            "expected a square matrix, got {r}x{c}"
        )));
    }
    let asymmetry = max_asymmetry(m);
    if asymmetry > SYMMETRY_TOL {
        return Err(Error::NotSymmetric { asymmetry });
    }
    Ok(())
}

pub fn ensure_rows<S: Data<Elem = f64>>(
    m: &ArrayBase<S, Ix2>,
    rows: usize,
    what: &str,
) -> Result<()> {
    if m.nrows() != rows {
        return Err(Error::DimensionMismatch(format!(
            "{what}: expected {rows} rows, got {}",
            m.nrows()
        )));
    }
    Ok(())
}

pub fn ensure_square_of<S: Data<Elem = f64>>(
    m: &ArrayBase<S, Ix2>,
    size: usize,
    what: &str,
) -> Result<()> {
    if m.dim() != (size, size) {
        let (r, c) = m.dim();
        return Err(Error::DimensionMismatch(format!(
            "{what}: expected {size}x{size}, got {r}x{c}"
        )));
    }
    Ok(())
}

/// `0.5 * (m + mᵀ)`, used where a product is symmetric in exact arithmetic.
pub fn symmetrized(m: &Array2<f64>) -> Array2<f64> {
    (m + &m.t()) * 0.5
}
