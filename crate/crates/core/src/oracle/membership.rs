use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use super::OracleConfig;
use crate::error::{Error, Result};
use crate::liegeom::{pfaffian, spectral_data, SkewMatrix};
use crate::matrix::SquareMatrix;
use crate::weights::Weight;

/// All ⌊n/2⌋ moduli of a skew matrix, descending, zeros included.
pub fn moduli(s: &SkewMatrix<f64>) -> Vec<f64> {
    let n = s.dim();
    let herm = DMatrix::<Complex64>::from_fn(n, n, |i, j| Complex64::new(0.0, s[(i, j)]));
    let mut eig: Vec<f64> = herm.symmetric_eigen().eigenvalues.iter().copied().collect();
    eig.sort_by(|a, b| b.total_cmp(a));
    eig.truncate(n / 2);
    eig.into_iter().map(|m| m.max(0.0)).collect()
}

/// Is `s` in the SO(n)-orbit of U_λ? Spectra are compared within
/// `tol_eig·(1 + radius)`; for even n with no vanishing modulus the
/// Pfaffian signs must agree as well.
pub fn orbit_membership(s: &SkewMatrix<f64>, lambda: &Weight, cfg: &OracleConfig) -> Result<bool> {
    if lambda.group().n() != s.dim() {
        return Err(Error::DimensionMismatch { expected: lambda.group().n(), got: s.dim() });
    }
    let values: Vec<f64> = lambda.entries().iter().map(|e| e.to_f64()).collect();
    orbit_membership_values(s, &values, cfg)
}

/// [`orbit_membership`] against the block matrix built from arbitrary real
/// `values` (signed, as for a weight).
pub fn orbit_membership_values(s: &SkewMatrix<f64>, values: &[f64], cfg: &OracleConfig) -> Result<bool> {
    let n = s.dim();
    if n / 2 != values.len() {
        return Err(Error::DimensionMismatch { expected: n / 2, got: values.len() });
    }
    let mut target: Vec<f64> = values.iter().map(|v| v.abs()).collect();
    target.sort_by(|a, b| b.total_cmp(a));
    let sd = spectral_data(s, cfg.tol_eig);
    let radius = target.first().copied().unwrap_or(0.0).max(sd.mus.first().copied().unwrap_or(0.0));
    let tol = cfg.tol_eig * (1.0 + radius);
    let got = moduli(s);
    if got.iter().zip(&target).any(|(a, b)| (a - b).abs() > tol) {
        return Ok(false);
    }
    if n.is_multiple_of(2) && target.iter().all(|&t| t > tol) {
        let want = values.iter().filter(|v| **v < 0.0).count() % 2 == 0;
        let pf = pfaffian(s)?;
        return Ok((pf > 0.0) == want);
    }
    Ok(true)
}

/// Haar-random element of SO(n): QR of a Gaussian matrix with sign and
/// determinant correction.
pub fn random_rotation<R: Rng + ?Sized>(n: usize, rng: &mut R) -> SquareMatrix<f64> {
    let g = DMatrix::<f64>::from_fn(n, n, |_, _| rng.sample(StandardNormal));
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..n {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    if q.determinant() < 0.0 {
        q.column_mut(0).neg_mut();
    }
    SquareMatrix::from_fn(n, |i, j| q[(i, j)])
}
