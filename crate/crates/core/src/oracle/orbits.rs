use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use super::membership::{orbit_membership, random_rotation};
use super::OracleConfig;
use crate::branching::GroupPair;
use crate::cg::{FactorAnalysis, StabilizerFactor};
use crate::error::{Error, Result};
use crate::liegeom::{build_u, shifted_matrix};
use crate::matrix::SquareMatrix;
use crate::weights::Weight;

/// Numerical orbit count for ℱ / H_ν over a finite witness sample.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrbitEstimate {
    /// Connected components after linking witnesses by explicit stabilizer elements.
    pub clusters: usize,
    pub witnesses: usize,
    /// Distinct invariant vectors (before linking).
    pub invariant_clusters: usize,
    /// Witness pairs joined by a verified element of H_ν.
    pub links_verified: usize,
    /// Random H_ν images that stayed inside ℱ, out of those tried.
    pub random_images_in_f: (usize, usize),
    pub note: String,
}

/// Complex coordinate of a pair (x, y) under the complex structure in which
/// sign(ν_j)·J is multiplication by i: z = x − i·sign·y.
fn to_complex(y: &[f64], coords: &[usize], signs: &[f64]) -> Vec<Complex64> {
    coords
        .chunks(2)
        .zip(signs)
        .map(|(c, s)| Complex64::new(y[c[0]], -s * y[c[1]]))
        .collect()
}

/// Real 2m×2m form of a complex m×m matrix acting through [`to_complex`].
fn unitary_real_block(h: &DMatrix<Complex64>, signs: &[f64]) -> DMatrix<f64> {
    let m = h.nrows();
    let mut out = DMatrix::<f64>::zeros(2 * m, 2 * m);
    for col in 0..2 * m {
        // image of the real basis vector e_col
        let mut z = vec![Complex64::new(0.0, 0.0); m];
        let k = col / 2;
        z[k] = if col % 2 == 0 { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, -signs[k]) };
        for r in 0..m {
            let w: Complex64 = (0..m).map(|c| h[(r, c)] * z[c]).sum();
            out[(2 * r, col)] = w.re;
            out[(2 * r + 1, col)] = -w.im / signs[r];
        }
    }
    out
}

/// Unitary V with first column a/|a|.
fn unitary_from(a: &[Complex64]) -> DMatrix<Complex64> {
    let m = a.len();
    let norm = a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let mut g = DMatrix::<Complex64>::identity(m, m);
    // put a in front, drop the identity column it is most aligned with
    let drop = (0..m).max_by(|&i, &j| a[i].norm().total_cmp(&a[j].norm())).unwrap_or(0);
    let mut cols: Vec<usize> = (0..m).filter(|&i| i != drop).collect();
    cols.insert(0, usize::MAX);
    for (k, &c) in cols.iter().enumerate() {
        for r in 0..m {
            g[(r, k)] = if c == usize::MAX { a[r] } else if r == c { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) };
        }
    }
    let qr = g.qr();
    let mut q = qr.q();
    let r11 = qr.r()[(0, 0)];
    let phase = r11 / norm;
    for r in 0..m {
        q[(r, 0)] *= phase;
    }
    q
}

/// A unitary mapping a to b (|a| = |b|).
fn unitary_mapping(a: &[Complex64], b: &[Complex64]) -> DMatrix<Complex64> {
    let m = a.len();
    let na = a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if na < 1e-300 {
        return DMatrix::identity(m, m);
    }
    let va = unitary_from(a);
    let vb = unitary_from(b);
    vb * va.adjoint()
}

fn random_unitary<R: Rng + ?Sized>(m: usize, rng: &mut R) -> DMatrix<Complex64> {
    let g = DMatrix::<Complex64>::from_fn(m, m, |_, _| {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..m {
        let d = r[(j, j)];
        let ph = if d.norm() > 0.0 { d / d.norm() } else { Complex64::new(1.0, 0.0) };
        for i in 0..m {
            q[(i, j)] *= ph;
        }
    }
    q
}

/// A rotation in SO(dim) mapping a to b (|a| = |b|, dim ≥ 2), as a product
/// of two reflections.
fn rotation_mapping(a: &[f64], b: &[f64]) -> DMatrix<f64> {
    let dim = a.len();
    let mut r = DMatrix::<f64>::identity(dim, dim);
    let diff: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    let dn = diff.iter().map(|x| x * x).sum::<f64>().sqrt();
    if dn < 1e-14 {
        return r;
    }
    let reflect = |v: &[f64]| {
        let n2: f64 = v.iter().map(|x| x * x).sum();
        DMatrix::<f64>::from_fn(dim, dim, |i, j| f64::from(u8::from(i == j)) - 2.0 * v[i] * v[j] / n2)
    };
    let h1 = reflect(&diff);
    // a second reflection fixing b restores det = +1
    let bn = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    let pick = (0..dim).min_by(|&i, &j| b[i].abs().total_cmp(&b[j].abs())).unwrap_or(0);
    let mut w: Vec<f64> = (0..dim).map(|i| f64::from(u8::from(i == pick))).collect();
    if bn > 0.0 {
        let proj = b[pick] / (bn * bn);
        for i in 0..dim {
            w[i] -= proj * b[i];
        }
    }
    let h2 = reflect(&w);
    r = &h2 * &h1;
    r
}

struct Layout<'a> {
    factors: &'a [FactorAnalysis],
    signs: Vec<Vec<f64>>,
    dim_y: usize,
}

impl Layout<'_> {
    fn invariants(&self, y: &[f64]) -> Vec<f64> {
        self.factors
            .iter()
            .map(|f| match f.factor {
                StabilizerFactor::SpecialOrthogonal { dim: 1 } => y[f.coords[0]],
                _ => f.coords.iter().map(|&c| y[c] * y[c]).sum(),
            })
            .collect()
    }

    /// Embeds per-factor blocks into an n×n matrix (identity on e_n).
    fn assemble(&self, blocks: &[DMatrix<f64>]) -> SquareMatrix<f64> {
        let n = self.dim_y + 1;
        let mut h = SquareMatrix::identity(n);
        for (f, b) in self.factors.iter().zip(blocks) {
            for (i, &ci) in f.coords.iter().enumerate() {
                for (j, &cj) in f.coords.iter().enumerate() {
                    h[(ci, cj)] = b[(i, j)];
                }
            }
        }
        h
    }

    /// An element of H_ν carrying `from` to `to`, if one exists factorwise.
    fn linking_element(&self, from: &[f64], to: &[f64]) -> Option<SquareMatrix<f64>> {
        let mut blocks = Vec::new();
        for (f, signs) in self.factors.iter().zip(&self.signs) {
            let a: Vec<f64> = f.coords.iter().map(|&c| from[c]).collect();
            let b: Vec<f64> = f.coords.iter().map(|&c| to[c]).collect();
            let block = match f.factor {
                StabilizerFactor::Unitary { .. } => {
                    let h = unitary_mapping(&to_complex(from, &f.coords, signs), &to_complex(to, &f.coords, signs));
                    unitary_real_block(&h, signs)
                }
                StabilizerFactor::SpecialOrthogonal { dim: 1 } => DMatrix::identity(1, 1),
                StabilizerFactor::SpecialOrthogonal { .. } => rotation_mapping(&a, &b),
            };
            blocks.push(block);
        }
        Some(self.assemble(&blocks))
    }

    fn random_element<R: Rng + ?Sized>(&self, rng: &mut R) -> SquareMatrix<f64> {
        let blocks: Vec<DMatrix<f64>> = self
            .factors
            .iter()
            .zip(&self.signs)
            .map(|(f, signs)| match f.factor {
                StabilizerFactor::Unitary { rank } => unitary_real_block(&random_unitary(rank, rng), signs),
                StabilizerFactor::SpecialOrthogonal { dim } => {
                    let r = random_rotation(dim, rng);
                    DMatrix::from_fn(dim, dim, |i, j| r[(i, j)])
                }
            })
            .collect();
        self.assemble(&blocks)
    }
}

/// Checks h ∈ H_ν: orthogonal, det 1, fixes e_n, commutes with U_ν.
fn in_stabilizer(h: &SquareMatrix<f64>, u_nu: &SquareMatrix<f64>, cfg: &OracleConfig) -> bool {
    let n = h.dim();
    let orth = (&(&h.transpose() * h) - &SquareMatrix::identity(n)).max_abs();
    let det = (h.det() - 1.0).abs();
    let fixes = (0..n).all(|i| (h[(i, n - 1)] - f64::from(u8::from(i == n - 1))).abs() <= 1e-12);
    let comm = (&(h * u_nu) - &(u_nu * h)).max_abs();
    let tol = cfg.tol_orth * 1e3 * n as f64;
    orth <= tol && det <= tol && fixes && comm <= cfg.tol_eig * (1.0 + u_nu.max_abs())
}

/// Estimates #(ℱ/H_ν) from witnesses: witnesses are clustered by the
/// invariants of the identified stabilizer factors, then linked by
/// explicitly constructed and verified elements of H_ν. Random H_ν images of
/// the witnesses are also checked to stay inside ℱ.
pub fn estimate_orbit_count<R: Rng + ?Sized>(
    witnesses: &[Vec<f64>],
    stabilizer: &[FactorAnalysis],
    nu: &Weight,
    lambda: &Weight,
    pair: GroupPair,
    cfg: &OracleConfig,
    rng: &mut R,
) -> Result<OrbitEstimate> {
    if witnesses.is_empty() {
        return Err(Error::Empty("orbit estimation needs at least one witness".into()));
    }
    let dim_y = pair.n() - 1;
    if let Some(w) = witnesses.iter().find(|w| w.len() != dim_y) {
        return Err(Error::DimensionMismatch { expected: dim_y, got: w.len() });
    }
    let signs = stabilizer
        .iter()
        .map(|f| {
            f.coords
                .chunks(2)
                .map(|c| {
                    let v = nu.entries().get(c[0] / 2).map_or(0.0, |e| e.to_f64());
                    if v < 0.0 {
                        -1.0
                    } else {
                        1.0
                    }
                })
                .collect()
        })
        .collect();
    let layout = Layout { factors: stabilizer, signs, dim_y };
    let u_nu = build_u::<f64>(nu, pair.n())?.into_matrix();

    // invariant clusters
    let inv: Vec<Vec<f64>> = witnesses.iter().map(|w| layout.invariants(w)).collect();
    let mut reps: Vec<usize> = Vec::new();
    let mut label = vec![0usize; witnesses.len()];
    for (i, v) in inv.iter().enumerate() {
        let hit = reps.iter().position(|&r| {
            inv[r].iter().zip(v).all(|(a, b)| (a - b).abs() <= cfg.cluster_tol * (1.0 + a.abs()))
        });
        label[i] = match hit {
            Some(k) => k,
            None => {
                reps.push(i);
                reps.len() - 1
            }
        };
    }

    // union-find over witnesses, linking each to its cluster representative
    let mut parent: Vec<usize> = (0..witnesses.len()).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        p[x] = r;
        r
    }
    let mut links = 0;
    for i in 0..witnesses.len() {
        let rep = reps[label[i]];
        if rep == i {
            continue;
        }
        let Some(h) = layout.linking_element(&witnesses[rep], &witnesses[i]) else { continue };
        let mapped = h.mul_vec(&extend(&witnesses[rep]))?;
        let close = mapped.iter().zip(extend(&witnesses[i])).all(|(a, b)| (a - b).abs() <= cfg.cluster_tol);
        if close && in_stabilizer(&h, &u_nu, cfg) {
            let (a, b) = (find(&mut parent, i), find(&mut parent, rep));
            parent[a] = b;
            links += 1;
        }
    }
    let mut roots: Vec<usize> = (0..witnesses.len()).map(|i| find(&mut parent, i)).collect();
    roots.sort_unstable();
    roots.dedup();

    let tries = witnesses.len().min(cfg.samples).min(32);
    let mut stayed = 0;
    for w in witnesses.iter().take(tries) {
        let h = layout.random_element(rng);
        let img = h.mul_vec(&extend(w))?;
        let y = &img[..dim_y];
        if in_stabilizer(&h, &u_nu, cfg) && orbit_membership(&shifted_matrix::<f64>(pair, nu, y)?, lambda, cfg)? {
            stayed += 1;
        }
    }

    let note = format!(
        "estimate from {} witnesses: {} invariant cluster(s), {} link(s) by verified H_nu elements, {}/{} random H_nu images stayed in F",
        witnesses.len(),
        reps.len(),
        links,
        stayed,
        tries
    );
    Ok(OrbitEstimate {
        clusters: roots.len(),
        witnesses: witnesses.len(),
        invariant_clusters: reps.len(),
        links_verified: links,
        random_images_in_f: (stayed, tries),
        note,
    })
}

fn extend(y: &[f64]) -> Vec<f64> {
    let mut v = y.to_vec();
    v.push(0.0);
    v
}
