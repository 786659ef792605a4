//! Matrix realizations for G = SO(n) ⋉ ℝⁿ: the block matrices U_λ, the
//! pairing matrices W_{a,b}, the space 𝒲_u, the coadjoint action, Pfaffians
//! and the reduced characteristic polynomial of U_ν + W.
//!
//! Everything here is generic over [`Scalar`]; the exact backend is
//! `SkewMatrix<Rational>` and the floating backend `SkewMatrix<f64>`.
//! [`spectral_data`] always works in `f64` because it needs an eigensolver.

use std::ops::Deref;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::branching::{GroupPair, PairKind};
use crate::error::{Error, Result};
use crate::matrix::SquareMatrix;
use crate::poly::Poly;
use crate::scalar::Scalar;
use crate::weights::Weight;

/// Relative threshold under which a spectral modulus counts as zero.
pub const DEFAULT_ZERO_TOL: f64 = 1e-9;

/// A skew-symmetric matrix, an element of 𝔰𝔬(n) ≅ 𝔰𝔬(n)*.
#[derive(Clone, Debug, PartialEq)]
pub struct SkewMatrix<T>(SquareMatrix<T>);

impl<T: Scalar> SkewMatrix<T> {
    /// Validates skewness: exactly for rationals, within
    /// `tolerance·(1 + max|s_ij|)` for floats (the result is then re-skewed).
    pub fn new(m: SquareMatrix<T>) -> Result<Self> {
        let n = m.dim();
        let scale = 1.0 + m.max_abs();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in i..n {
                let sum = m[(i, j)].clone() + m[(j, i)].clone();
                if T::EXACT {
                    if !sum.is_zero() {
                        return Err(Error::NotSkew(sum.abs().to_f64_lossy()));
                    }
                } else {
                    worst = worst.max(sum.abs().to_f64_lossy());
                }
            }
        }
        if T::EXACT {
            return Ok(SkewMatrix(m));
        }
        if worst > T::tolerance() * scale {
            return Err(Error::NotSkew(worst));
        }
        let two = T::one() + T::one();
        let fixed = SquareMatrix::from_fn(n, |i, j| (m[(i, j)].clone() - m[(j, i)].clone()) / two.clone());
        Ok(SkewMatrix(fixed))
    }

    pub fn zeros(n: usize) -> Self {
        SkewMatrix(SquareMatrix::zeros(n))
    }

    pub fn matrix(&self) -> &SquareMatrix<T> {
        &self.0
    }

    pub fn into_matrix(self) -> SquareMatrix<T> {
        self.0
    }

    pub fn add(&self, other: &Self) -> Self {
        SkewMatrix(&self.0 + &other.0)
    }

    pub fn sub(&self, other: &Self) -> Self {
        SkewMatrix(&self.0 - &other.0)
    }

    /// A·S·Aᵗ, skew for any A.
    pub fn conjugate(&self, a: &SquareMatrix<T>) -> Self {
        SkewMatrix(self.0.conjugate_by(a))
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> SkewMatrix<U> {
        let n = self.0.dim();
        SkewMatrix(SquareMatrix::from_fn(n, |i, j| f(&self.0[(i, j)])))
    }

    pub fn to_f64(&self) -> SkewMatrix<f64> {
        self.map(|x| x.to_f64_lossy())
    }

    /// Row-major JSON (rationals as `"p/q"`).
    pub fn to_json(&self) -> serde_json::Value {
        self.0.to_json()
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        SkewMatrix::new(SquareMatrix::from_json(v)?)
    }
}

impl<T> Deref for SkewMatrix<T> {
    type Target = SquareMatrix<T>;
    fn deref(&self) -> &SquareMatrix<T> {
        &self.0
    }
}

/// A functional (U, u) ∈ 𝔤* = 𝔨* ⊕ (ℝⁿ)*.
#[derive(Clone, Debug, PartialEq)]
pub struct Functional<T> {
    pub rot: SkewMatrix<T>,
    pub trans: Vec<T>,
}

impl<T: Scalar> Functional<T> {
    pub fn new(rot: SkewMatrix<T>, trans: Vec<T>) -> Result<Self> {
        if rot.dim() != trans.len() {
            return Err(Error::DimensionMismatch { expected: rot.dim(), got: trans.len() });
        }
        Ok(Functional { rot, trans })
    }
}

/// (A, a) ∈ SO(n) ⋉ ℝⁿ.
#[derive(Clone, Debug, PartialEq)]
pub struct GroupElement<T> {
    rotation: SquareMatrix<T>,
    translation: Vec<T>,
}

impl<T: Scalar> GroupElement<T> {
    /// Checks AᵗA = I and det A = 1 (exactly, or within `T::tolerance()·n`).
    pub fn new(rotation: SquareMatrix<T>, translation: Vec<T>) -> Result<Self> {
        let n = rotation.dim();
        if translation.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: translation.len() });
        }
        let tol = T::tolerance() * n as f64;
        let gram = &rotation.transpose() * &rotation;
        let id = SquareMatrix::<T>::identity(n);
        let off = (&gram - &id).max_abs();
        let det_err = (rotation.det() - T::one()).abs().to_f64_lossy();
        if off > tol || det_err > tol {
            return Err(Error::Malformed(format!(
                "rotation is not in SO({n}): |AᵗA − I| = {off:e}, |det A − 1| = {det_err:e}"
            )));
        }
        Ok(GroupElement { rotation, translation })
    }

    pub fn identity(n: usize) -> Self {
        GroupElement { rotation: SquareMatrix::identity(n), translation: vec![T::zero(); n] }
    }

    pub fn rotation(&self) -> &SquareMatrix<T> {
        &self.rotation
    }

    pub fn translation(&self) -> &[T] {
        &self.translation
    }

    /// (A, a)·(A′, a′) = (AA′, a + Aa′)
    pub fn compose(&self, other: &Self) -> Self {
        let rot = &self.rotation * &other.rotation;
        let moved = self.rotation.mul_vec(&other.translation).expect("dimensions agree");
        let translation = self.translation.iter().zip(moved).map(|(a, b)| a.clone() + b).collect();
        GroupElement { rotation: rot, translation }
    }
}

/// Moduli μ_k of the eigenvalues ±iμ_k of a skew matrix.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralData {
    /// Nonzero moduli, descending.
    pub mus: Vec<f64>,
    pub zero_multiplicity: usize,
    /// Sign of the Pfaffian (even n only); 0 when a modulus vanishes.
    pub pfaffian_sign: Option<i8>,
}

/// Canonical form of `s` under SO(n)-conjugation. Moduli below
/// `zero_tol·(1 + spectral radius)` count as zero.
pub fn spectral_data<T: Scalar>(s: &SkewMatrix<T>, zero_tol: f64) -> SpectralData {
    let n = s.dim();
    // iS is Hermitian with eigenvalues ±μ_k
    let herm = DMatrix::<Complex64>::from_fn(n, n, |i, j| Complex64::new(0.0, s[(i, j)].to_f64_lossy()));
    let mut eig: Vec<f64> = herm.symmetric_eigen().eigenvalues.iter().copied().collect();
    eig.sort_by(|a, b| b.total_cmp(a));
    let radius = eig.first().copied().unwrap_or(0.0).max(0.0);
    let threshold = zero_tol * (1.0 + radius);
    let mus: Vec<f64> = eig.iter().take(n / 2).copied().filter(|&m| m > threshold).collect();
    let zero_multiplicity = n - 2 * mus.len();
    let pfaffian_sign = n.is_multiple_of(2).then(|| {
        if zero_multiplicity > 0 {
            0
        } else {
            let pf = pfaffian(&s.to_f64()).expect("even dimension");
            if pf > 0.0 {
                1
            } else {
                -1
            }
        }
    });
    SpectralData { mus, zero_multiplicity, pfaffian_sign }
}

/// Pf(S) by expansion along the first row, normalized so that Pf(J) = 1
/// for J = [[0, 1], [−1, 0]].
pub fn pfaffian<T: Scalar>(s: &SkewMatrix<T>) -> Result<T> {
    let n = s.dim();
    if n % 2 == 1 {
        return Err(Error::OddDimension(n));
    }
    let idx: Vec<usize> = (0..n).collect();
    Ok(pfaffian_rec(s, &idx))
}

fn pfaffian_rec<T: Scalar>(s: &SkewMatrix<T>, idx: &[usize]) -> T {
    if idx.is_empty() {
        return T::one();
    }
    let first = idx[0];
    let mut acc = T::zero();
    for k in 1..idx.len() {
        let a = &s[(first, idx[k])];
        if a.is_zero() {
            continue;
        }
        let rest: Vec<usize> = idx[1..].iter().copied().filter(|&x| x != idx[k]).collect();
        let term = a.clone() * pfaffian_rec(s, &rest);
        // position k (0-based) in the remaining list carries sign (−1)^(k+1)
        if k % 2 == 1 {
            acc = acc + term;
        } else {
            acc = acc - term;
        }
    }
    acc
}

/// Block-diagonal λ_1 J ⊕ … ⊕ λ_d J ⊕ 0 in `ambient_n` dimensions.
pub fn build_u<T: Scalar>(weight: &Weight, ambient_n: usize) -> Result<SkewMatrix<T>> {
    let d = weight.entries().len();
    if ambient_n < 2 * d {
        return Err(Error::Malformed(format!(
            "a weight with {d} entries needs ambient dimension >= {}, got {ambient_n}",
            2 * d
        )));
    }
    let mut m = SquareMatrix::zeros(ambient_n);
    for (j, e) in weight.entries().iter().enumerate() {
        let v: T = e.to_scalar();
        m[(2 * j, 2 * j + 1)] = v.clone();
        m[(2 * j + 1, 2 * j)] = -v;
    }
    Ok(SkewMatrix(m))
}

/// The unique skew W with ½tr(W Vᵗ) = bᵗVa for all skew V, namely b·aᵗ − a·bᵗ.
pub fn w_ab<T: Scalar>(a: &[T], b: &[T]) -> Result<SkewMatrix<T>> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch { expected: a.len(), got: b.len() });
    }
    let n = a.len();
    Ok(SkewMatrix(SquareMatrix::from_fn(n, |i, j| {
        b[i].clone() * a[j].clone() - a[i].clone() * b[j].clone()
    })))
}

/// The element of 𝒲_u (u = r·e_n) with last row (y_1, …, y_{n−1}, 0).
pub fn w_u_coords<T: Scalar>(r: &T, y: &[T]) -> Result<SkewMatrix<T>> {
    if *r <= T::zero() {
        return Err(Error::Malformed(format!("u = r·e_n needs r > 0, got {r}")));
    }
    let n = y.len() + 1;
    let mut m = SquareMatrix::zeros(n);
    for (i, yi) in y.iter().enumerate() {
        m[(n - 1, i)] = yi.clone();
        m[(i, n - 1)] = -yi.clone();
    }
    Ok(SkewMatrix(m))
}

/// Ad*((A, a))(U, u) = (A U Aᵗ + W_{a, Au}, Au).
pub fn coadjoint_apply<T: Scalar>(g: &GroupElement<T>, f: &Functional<T>) -> Result<Functional<T>> {
    let n = g.rotation.dim();
    if f.trans.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: f.trans.len() });
    }
    let au = g.rotation.mul_vec(&f.trans)?;
    let rot = f.rot.conjugate(&g.rotation).add(&w_ab(&g.translation, &au)?);
    Ok(Functional { rot, trans: au })
}

/// U_ν + W for W ∈ 𝒲_u with coordinates `y` (length n − 1).
pub fn shifted_matrix<T: Scalar>(pair: GroupPair, nu: &Weight, y: &[T]) -> Result<SkewMatrix<T>> {
    if y.len() != pair.n() - 1 {
        return Err(Error::DimensionMismatch { expected: pair.n() - 1, got: y.len() });
    }
    let u_nu = build_u::<T>(nu, pair.n())?;
    Ok(u_nu.add(&w_u_coords(&T::one(), y)?))
}

/// The monic polynomial P(t), t = x², with det(U_ν + W − ixI) equal to
/// i(−1)^{d+1} x P(x²) (OddK) or (−1)^{d+1} P(x²) (EvenK).
///
/// `s[j]` is y²_{2j+1} + y²_{2j+2} for the j-th pair; for EvenK the last
/// entry is the lone y²_{2d+1}.
pub fn char_poly_reduced<T: Scalar>(nu: &Weight, s: &[T], pair: GroupPair) -> Result<Poly<T>> {
    if nu.group() != pair.h() {
        return Err(Error::Malformed(format!("nu {nu:?} is not a weight of {}", pair.h())));
    }
    if s.len() != pair.num_s_vars() {
        return Err(Error::DimensionMismatch { expected: pair.num_s_vars(), got: s.len() });
    }
    let sq: Vec<T> = nu
        .entries()
        .iter()
        .map(|e| {
            let v: T = e.to_scalar();
            v.clone() * v
        })
        .collect();
    let d = sq.len();
    let base = Poly::from_roots(&sq);
    let mut pole_sum = Poly::zero();
    for j in 0..d {
        let others = Poly::from_roots(sq.iter().enumerate().filter(|(i, _)| *i != j).map(|x| x.1));
        pole_sum = &pole_sum + &others.scale(&s[j]);
    }
    let p = &base - &pole_sum;
    Ok(match pair.kind() {
        PairKind::OddK => p,
        PairKind::EvenK => {
            let t = Poly::linear_root(T::zero());
            &(&t * &p) - &base.scale(&s[d])
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weights::GroupSpec;
    use crate::Rational;

    fn so(n: usize) -> GroupSpec {
        GroupSpec::new(n).unwrap()
    }

    fn q(p: i64) -> Rational {
        Rational::from_integer(p.into())
    }

    #[test]
    fn build_u_examples() {
        let w = Weight::parse(so(2), "5/2").unwrap();
        let u: SkewMatrix<Rational> = build_u(&w, 2).unwrap();
        assert_eq!(u[(0, 1)], Rational::new(5.into(), 2.into()));
        assert_eq!(u[(1, 0)], Rational::new((-5).into(), 2.into()));
        let z: SkewMatrix<f64> = build_u(&Weight::zero(so(6)), 6).unwrap();
        assert_eq!(z, SkewMatrix::zeros(6));
        let w = Weight::parse(so(5), "2,1").unwrap();
        let sd = spectral_data(&build_u::<f64>(&w, 5).unwrap(), DEFAULT_ZERO_TOL);
        assert_eq!(sd.zero_multiplicity, 1);
        assert!((sd.mus[0] - 2.0).abs() < 1e-12 && (sd.mus[1] - 1.0).abs() < 1e-12);
        assert_eq!(sd.pfaffian_sign, None);
        assert!(build_u::<f64>(&w, 3).is_err());
    }

    #[test]
    fn f32_backend_builds_blocks() {
        let w = Weight::parse(so(4), "3,-1").unwrap();
        let u: SkewMatrix<f32> = build_u(&w, 4).unwrap();
        assert_eq!(pfaffian(&u).unwrap(), -3.0f32);
    }

    #[test]
    fn pfaffian_anchors() {
        let j = SkewMatrix::new(SquareMatrix::from_rows(vec![vec![q(0), q(1)], vec![q(-1), q(0)]]).unwrap()).unwrap();
        assert_eq!(pfaffian(&j).unwrap(), q(1));
        let w = Weight::from_ints(so(4), &[2, 3]).unwrap();
        assert_eq!(pfaffian(&build_u::<Rational>(&w, 4).unwrap()).unwrap(), q(6));
        let w = Weight::from_ints(so(6), &[3, 2, 1]).unwrap();
        let u = build_u::<f64>(&w, 6).unwrap();
        assert_eq!(pfaffian(&u).unwrap(), 6.0);
        assert_eq!(spectral_data(&u, DEFAULT_ZERO_TOL).pfaffian_sign, Some(1));
        assert!(matches!(pfaffian(&SkewMatrix::<f64>::zeros(3)), Err(Error::OddDimension(3))));
    }

    #[test]
    fn pfaffian_squares_to_determinant() {
        // a dense rational skew matrix
        let vals = [[0, 1, -2, 3, 5, 1], [0, 0, 4, -1, 2, 7], [0, 0, 0, 3, -3, 2], [0, 0, 0, 0, 1, -1], [0, 0, 0, 0, 0, 6], [0; 6]];
        let m = SquareMatrix::from_fn(6, |i, j| {
            if i < j {
                q(vals[i][j])
            } else {
                -q(vals[j][i])
            }
        });
        let s = SkewMatrix::new(m).unwrap();
        let pf = pfaffian(&s).unwrap();
        assert_eq!(pf.clone() * pf, s.det());
    }

    #[test]
    fn zero_matrix_spectrum() {
        let sd = spectral_data(&SkewMatrix::<f64>::zeros(5), DEFAULT_ZERO_TOL);
        assert!(sd.mus.is_empty());
        assert_eq!(sd.zero_multiplicity, 5);
        let sd = spectral_data(&SkewMatrix::<f64>::zeros(4), DEFAULT_ZERO_TOL);
        assert_eq!(sd.pfaffian_sign, Some(0));
    }

    #[test]
    fn non_skew_rejected() {
        let m = SquareMatrix::from_rows(vec![vec![q(0), q(1)], vec![q(1), q(0)]]).unwrap();
        assert!(matches!(SkewMatrix::new(m), Err(Error::NotSkew(_))));
        let f = SquareMatrix::from_rows(vec![vec![0.0, 1.0], vec![-1.0 + 1e-14, 0.0]]).unwrap();
        assert!(SkewMatrix::new(f).is_ok());
        let f = SquareMatrix::from_rows(vec![vec![0.0, 1.0], vec![-1.0 + 1e-6, 0.0]]).unwrap();
        assert!(SkewMatrix::new(f).is_err());
    }

    #[test]
    fn w_ab_basics() {
        let a = vec![q(1), q(2), q(3)];
        assert_eq!(w_ab(&a, &a).unwrap(), SkewMatrix::zeros(3));
        assert!(w_ab(&a, &[q(1)]).is_err());
    }

    /// ½tr(W Vᵗ) = bᵗVa on the basis E_ij − E_ji, exactly.
    #[test]
    fn w_ab_defining_relation_on_basis() {
        let a = vec![q(1), q(-2), q(3), q(5)];
        let b = vec![q(4), q(0), q(-1), q(2)];
        let w = w_ab(&a, &b).unwrap();
        let half = Rational::new(1.into(), 2.into());
        for i in 0..4 {
            for j in i + 1..4 {
                let mut v = SquareMatrix::zeros(4);
                v[(i, j)] = q(1);
                v[(j, i)] = q(-1);
                let lhs = (w.matrix() * &v.transpose()).trace() * half.clone();
                let va = v.mul_vec(&a).unwrap();
                let rhs = b.iter().zip(&va).fold(q(0), |acc, (x, y)| acc + x.clone() * y.clone());
                assert_eq!(lhs, rhs, "basis ({i},{j})");
            }
        }
    }

    #[test]
    fn w_u_coords_examples() {
        assert_eq!(w_u_coords(&q(2), &[q(0), q(0)]).unwrap(), SkewMatrix::zeros(3));
        assert!(w_u_coords(&q(0), &[q(1)]).is_err());
        assert!(w_u_coords(&q(-1), &[q(1)]).is_err());
        let w = w_u_coords(&1.0, &[0.0, 2.5]).unwrap();
        let sd = spectral_data(&w, DEFAULT_ZERO_TOL);
        assert!((sd.mus[0] - 2.5).abs() < 1e-12);
        assert_eq!(sd.zero_multiplicity, 1);
        // W = W_{a,u} with u = r e_n, a = (y/r, 0)
        let r = q(3);
        let y = vec![q(1), q(-2), q(7)];
        let mut a: Vec<Rational> = y.iter().map(|v| v.clone() / r.clone()).collect();
        a.push(q(0));
        let u = vec![q(0), q(0), q(0), r.clone()];
        assert_eq!(w_u_coords(&r, &y).unwrap(), w_ab(&a, &u).unwrap());
    }

    #[test]
    fn identity_acts_trivially() {
        let w = Weight::from_ints(so(5), &[2, 1]).unwrap();
        let f = Functional::new(build_u::<Rational>(&w, 5).unwrap(), vec![q(0), q(1), q(0), q(0), q(3)]).unwrap();
        assert_eq!(coadjoint_apply(&GroupElement::identity(5), &f).unwrap(), f);
        assert!(Functional::new(SkewMatrix::<f64>::zeros(3), vec![0.0; 2]).is_err());
    }

    #[test]
    fn exact_rotation_by_permutation() {
        // cyclic permutation of three coordinates has det +1
        let a = SquareMatrix::from_fn(3, |i, j| if (i + 1) % 3 == j { q(1) } else { q(0) });
        let g = GroupElement::new(a.clone(), vec![q(0); 3]).unwrap();
        let w = Weight::from_ints(so(3), &[2]).unwrap();
        let f = Functional::new(build_u::<Rational>(&w, 3).unwrap(), vec![q(1), q(0), q(0)]).unwrap();
        let out = coadjoint_apply(&g, &f).unwrap();
        assert_eq!(out.rot, f.rot.conjugate(&a));
        assert_eq!(out.trans, vec![q(0), q(0), q(1)]);
        let refl = SquareMatrix::from_fn(3, |i, j| if i == j { if i == 0 { q(-1) } else { q(1) } } else { q(0) });
        assert!(GroupElement::new(refl, vec![q(0); 3]).is_err());
    }

    #[test]
    fn char_poly_examples() {
        let pair: GroupPair = "so5/so4".parse().unwrap();
        let nu = Weight::from_ints(pair.h(), &[2, 1]).unwrap();
        let p = char_poly_reduced(&nu, &[q(0), q(0)], pair).unwrap();
        assert_eq!(p, Poly::from_roots(&[q(4), q(1)]));
        let p = char_poly_reduced(&nu, &[q(0), q(8)], pair).unwrap();
        // (t−4)(t−1) − 8(t−4) = (t−4)(t−9)
        assert_eq!(p, Poly::from_roots(&[q(4), q(9)]));
        assert!(char_poly_reduced(&nu, &[q(0)], pair).is_err());

        let pair: GroupPair = "so6/so5".parse().unwrap();
        let nu = Weight::from_ints(pair.h(), &[2, 1]).unwrap();
        let p = char_poly_reduced(&nu, &[q(0), q(0), q(0)], pair).unwrap();
        assert_eq!(p, Poly::from_roots(&[q(4), q(1), q(0)]));
        let p = char_poly_reduced(&nu, &[q(0), q(0), q(9)], pair).unwrap();
        assert_eq!(p, Poly::from_roots(&[q(9), q(4), q(1)]));
    }

    /// 𝔨 = 𝔥 ⊕ 𝒲_u: dimensions add up and the union spans, for n ≤ 8.
    #[test]
    fn k_splits_as_h_plus_wu() {
        for n in 3..=8usize {
            let flat = |m: &SkewMatrix<Rational>| -> Vec<Rational> {
                (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).map(|(i, j)| m[(i, j)].clone()).collect()
            };
            let mut h_basis = Vec::new();
            for i in 0..n - 1 {
                for j in i + 1..n - 1 {
                    let mut m = SquareMatrix::zeros(n);
                    m[(i, j)] = q(1);
                    m[(j, i)] = q(-1);
                    h_basis.push(flat(&SkewMatrix::new(m).unwrap()));
                }
            }
            let w_basis: Vec<_> = (0..n - 1)
                .map(|k| {
                    let y: Vec<Rational> = (0..n - 1).map(|i| if i == k { q(1) } else { q(0) }).collect();
                    flat(&w_u_coords(&q(1), &y).unwrap())
                })
                .collect();
            assert_eq!(crate::matrix::rank(&w_basis, 0.0), n - 1);
            let all: Vec<_> = h_basis.iter().chain(&w_basis).cloned().collect();
            assert_eq!(crate::matrix::rank(&all, 0.0), n * (n - 1) / 2);
        }
    }
}
