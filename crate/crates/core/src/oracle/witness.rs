use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;

use super::membership::{moduli, orbit_membership};
use super::OracleConfig;
use crate::branching::{GroupPair, PairKind};
use crate::error::Result;
use crate::liegeom::shifted_matrix;
use crate::poly::Poly;
use crate::weights::Weight;

/// Coefficients below the leading one of ∏(t − μ_k²) for U_ν + W(y).
fn spectral_poly(pair: GroupPair, nu: &Weight, y: &[f64]) -> Result<Vec<f64>> {
    let s = shifted_matrix::<f64>(pair, nu, y)?;
    let sq: Vec<f64> = moduli(&s).into_iter().map(|m| m * m).collect();
    let mut c = Poly::from_roots(&sq).coeffs().to_vec();
    c.pop();
    Ok(c)
}

/// First coordinate carried by unknown `v` (pairs first, then the lone one).
fn anchor_coord(v: usize) -> usize {
    2 * v
}

/// Coordinates and squared ν-value per unknown.
fn unknowns(pair: GroupPair, nu: &Weight) -> Vec<(Vec<usize>, f64)> {
    let d = pair.d();
    let mut out: Vec<(Vec<usize>, f64)> =
        nu.entries().iter().enumerate().map(|(j, e)| (vec![2 * j, 2 * j + 1], e.to_f64().powi(2))).collect();
    if pair.kind() == PairKind::EvenK {
        out.push((vec![2 * d], 0.0));
    }
    out
}

/// Recovers the per-unknown sums s_v numerically: the spectral polynomial is
/// affine in s, so its columns are sampled at unit y's and the target is
/// reached by a minimum-norm least-squares solve. `None` when no real
/// nonnegative solution matches.
fn numeric_sums(nu: &Weight, lambda: &Weight, pair: GroupPair, cfg: &OracleConfig) -> Result<Option<Vec<f64>>> {
    let dim_y = pair.n() - 1;
    let nvars = pair.num_s_vars();
    let base = spectral_poly(pair, nu, &vec![0.0; dim_y])?;
    let rows = base.len();
    let mut a = DMatrix::<f64>::zeros(rows, nvars);
    for v in 0..nvars {
        let mut y = vec![0.0; dim_y];
        y[anchor_coord(v)] = 1.0;
        let c = spectral_poly(pair, nu, &y)?;
        for r in 0..rows {
            a[(r, v)] = c[r] - base[r];
        }
    }
    let lam_sq: Vec<f64> = lambda.entries().iter().map(|e| e.to_f64().powi(2)).collect();
    let mut target = Poly::from_roots(&lam_sq).coeffs().to_vec();
    target.pop();
    let rhs = DVector::from_iterator(rows, target.iter().zip(&base).map(|(t, b)| t - b));
    let scale = 1.0 + rhs.amax().max(a.amax());
    let svd = a.clone().svd(true, true);
    let eps = 1e-10 * svd.singular_values.max().max(1.0);
    let Ok(sol) = svd.solve(&rhs, eps) else {
        return Ok(None);
    };
    let resid = (&a * &sol - &rhs).amax();
    if resid > cfg.tol_eig * 100.0 * scale {
        return Ok(None);
    }
    // sums within solver noise of zero are zero: the square root would
    // otherwise blow 1e-14 up to 1e-7 in y
    let noise = cfg.tol_eig * 10.0 * (1.0 + sol.amax());
    if sol.iter().any(|&s| s < -noise) {
        return Ok(None);
    }
    Ok(Some(sol.iter().map(|&s| if s <= noise { 0.0 } else { s }).collect()))
}

/// Explicit solutions y of U_ν + W(y) ∈ 𝒪ᴷ_λ, each validated by
/// [`orbit_membership`]. Empty when the orbits do not meet, or when the spin
/// classes of ν and λ differ (no admissible pairing to test).
pub fn find_witnesses<R: Rng + ?Sized>(
    nu: &Weight,
    lambda: &Weight,
    pair: GroupPair,
    cfg: &OracleConfig,
    rng: &mut R,
) -> Result<Vec<Vec<f64>>> {
    pair.check_weights(lambda, nu)?;
    if nu.spin_class() != lambda.spin_class() {
        return Ok(Vec::new());
    }
    let Some(sums) = numeric_sums(nu, lambda, pair, cfg)? else {
        return Ok(Vec::new());
    };

    // merge unknowns whose ν² agree: only their total is pinned down
    let vars = unknowns(pair, nu);
    let mut groups: Vec<(f64, Vec<usize>, f64)> = Vec::new();
    for ((coords, q), s) in vars.iter().zip(&sums) {
        match groups.iter_mut().find(|g| (g.0 - q).abs() <= cfg.tol_eig * (1.0 + q)) {
            Some(g) => {
                g.1.extend(coords);
                g.2 += s;
            }
            None => groups.push((*q, coords.clone(), *s)),
        }
    }

    let dim_y = pair.n() - 1;
    let lone = (pair.kind() == PairKind::EvenK).then_some(2 * pair.d());
    let mut out = Vec::new();
    for k in 0..cfg.samples {
        let mut y = vec![0.0; dim_y];
        for (_, coords, sigma) in &groups {
            let r = sigma.sqrt();
            if k == 0 {
                y[coords[0]] = r;
                continue;
            }
            let dir: Vec<f64> = coords.iter().map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
            let norm = dir.iter().map(|x| x * x).sum::<f64>().sqrt().max(f64::MIN_POSITIVE);
            for (c, x) in coords.iter().zip(dir) {
                y[*c] = r * x / norm;
            }
        }
        let s = shifted_matrix::<f64>(pair, nu, &y)?;
        if orbit_membership(&s, lambda, cfg)? {
            out.push(y);
            continue;
        }
        // the two signs of the lone coordinate have opposite Pfaffians
        if let Some(c) = lone {
            if y[c] != 0.0 {
                y[c] = -y[c];
                if orbit_membership(&shifted_matrix::<f64>(pair, nu, &y)?, lambda, cfg)? {
                    out.push(y);
                }
            }
        }
    }
    Ok(out)
}
