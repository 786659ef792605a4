//! Exact Corwin–Greenleaf counts n(𝒪ᴳ_{(ν,u)}, 𝒪ᴷ_λ).
//!
//! The count equals the number of H_ν-orbits on
//! ℱ = {W ∈ 𝒲_u : U_ν + W ∈ 𝒪ᴷ_λ}. Writing W through its coordinates y,
//! membership in 𝒪ᴷ_λ only depends on the sums of y² over the coordinates
//! attached to each distinct value of ν_j² (plus the lone coordinate
//! y_{2d+1} for even K). Those group sums are solved exactly by matching the
//! reduced characteristic polynomial against ∏(t − λ_k²), and ℱ becomes a
//! product of spheres, one per group, each acted on by one factor of H_ν.

use std::fmt;
use std::str::FromStr;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::branching::{branch_multiplicity, GroupPair, PairKind};
use crate::error::{Error, Result};
use crate::liegeom::char_poly_reduced;
use crate::poly::Poly;
use crate::weights::Weight;
use crate::Rational;

/// n(𝒪ᴳ, 𝒪ᴷ) ∈ ℕ ∪ {∞}, or a lower bound when the exact analyzer cannot
/// certify the orbit structure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CGValue {
    Zero,
    One,
    /// k ≥ 2
    Finite(u64),
    Infinite,
    Undetermined { lower_bound: u64 },
}

impl CGValue {
    /// Normalizes small counts: 0 → Zero, 1 → One.
    pub fn from_count(k: u64) -> Self {
        match k {
            0 => CGValue::Zero,
            1 => CGValue::One,
            k => CGValue::Finite(k),
        }
    }

    pub fn is_zero(self) -> bool {
        self == CGValue::Zero
    }

    pub fn is_determined(self) -> bool {
        !matches!(self, CGValue::Undetermined { .. })
    }

    /// Short form used in tables: "0", "1", "k", "inf", ">=b".
    pub fn short(self) -> String {
        match self {
            CGValue::Zero => "0".into(),
            CGValue::One => "1".into(),
            CGValue::Finite(k) => k.to_string(),
            CGValue::Infinite => "inf".into(),
            CGValue::Undetermined { lower_bound } => format!(">={lower_bound}"),
        }
    }
}

impl fmt::Display for CGValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CGValue::Zero => f.write_str("Zero"),
            CGValue::One => f.write_str("One"),
            CGValue::Finite(k) => write!(f, "Finite({k})"),
            CGValue::Infinite => f.write_str("Infinite"),
            CGValue::Undetermined { lower_bound } => write!(f, "Undetermined(>={lower_bound})"),
        }
    }
}

impl FromStr for CGValue {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("not a CG value: {s:?}"));
        let inner = |prefix: &str| s.strip_prefix(prefix).and_then(|r| r.strip_suffix(')'));
        match s {
            "Zero" => Ok(CGValue::Zero),
            "One" => Ok(CGValue::One),
            "Infinite" => Ok(CGValue::Infinite),
            _ => {
                if let Some(k) = inner("Finite(") {
                    let k: u64 = k.parse().map_err(|_| bad())?;
                    if k < 2 {
                        return Err(bad());
                    }
                    Ok(CGValue::Finite(k))
                } else if let Some(b) = inner("Undetermined(>=") {
                    Ok(CGValue::Undetermined { lower_bound: b.parse().map_err(|_| bad())? })
                } else {
                    Err(bad())
                }
            }
        }
    }
}

impl Serialize for CGValue {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for CGValue {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

pub(crate) mod rational_serde {
    use super::*;

    pub fn serialize<S: Serializer>(q: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(q)
    }

    pub mod vec {
        use super::*;
        pub fn serialize<S: Serializer>(v: &[Rational], s: S) -> std::result::Result<S::Ok, S::Error> {
            s.collect_seq(v.iter().map(|q| q.to_string()))
        }
    }
}

/// One of the y²-type unknowns.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SVar {
    /// y²_{2j+1} + y²_{2j+2} (0-based j)
    Pair(usize),
    /// y²_{2d+1}, even K only
    Lone,
}

impl SVar {
    /// 0-based coordinates of y carried by this unknown.
    pub fn coords(self, d: usize) -> Vec<usize> {
        match self {
            SVar::Pair(j) => vec![2 * j, 2 * j + 1],
            SVar::Lone => vec![2 * d],
        }
    }
}

/// Unknowns sharing one value q_g of ν_j² (or 0 for the lone coordinate).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SGroup {
    #[serde(with = "rational_serde")]
    pub squared_value: Rational,
    pub multiplicity: usize,
    pub is_structural_zero: bool,
    pub members: Vec<SVar>,
    /// 0-based coordinates of y in this group.
    pub coords: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum StabilizerFactor {
    /// U(rank) acting on ℂ^rank ≅ ℝ^{2·rank}; a circle when rank = 1.
    Unitary { rank: usize },
    /// SO(dim) on the kernel coordinates of U_ν inside ℝ^{n−1}.
    SpecialOrthogonal { dim: usize },
}

impl fmt::Display for StabilizerFactor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StabilizerFactor::Unitary { rank } => write!(f, "U({rank})"),
            StabilizerFactor::SpecialOrthogonal { dim } => write!(f, "SO({dim})"),
        }
    }
}

/// How one stabilizer factor acts on its sphere of solutions.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FactorAnalysis {
    pub group: usize,
    pub factor: StabilizerFactor,
    pub coords: Vec<usize>,
    #[serde(with = "rational_serde")]
    pub radius_sq: Rational,
    pub certified_single_orbit: bool,
    pub reason: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PfaffianConstraint {
    None,
    Plus,
    Minus,
}

impl PfaffianConstraint {
    pub fn sign(self) -> Option<i8> {
        match self {
            PfaffianConstraint::None => None,
            PfaffianConstraint::Plus => Some(1),
            PfaffianConstraint::Minus => Some(-1),
        }
    }
}

impl fmt::Display for PfaffianConstraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PfaffianConstraint::None => "none",
            PfaffianConstraint::Plus => "+1",
            PfaffianConstraint::Minus => "-1",
        })
    }
}

impl Serialize for PfaffianConstraint {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

fn weight_str<S: Serializer>(w: &Weight, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(w)
}

/// Everything the exact layer derived for one (ν, λ).
#[derive(Debug, Clone, Serialize)]
pub struct CGCertificate {
    pub pair: GroupPair,
    #[serde(serialize_with = "weight_str")]
    pub nu: Weight,
    #[serde(serialize_with = "weight_str")]
    pub lambda: Weight,
    pub spin_compatible: bool,
    pub groups: Vec<SGroup>,
    /// σ_g, aligned with `groups`.
    #[serde(with = "rational_serde::vec")]
    pub sums: Vec<Rational>,
    pub feasible: bool,
    pub match_polynomial_ok: bool,
    pub pfaffian_constraint: PfaffianConstraint,
    pub stabilizer: Vec<FactorAnalysis>,
    pub orbit_count: CGValue,
    pub trace: Vec<String>,
}

impl CGCertificate {
    /// Group sums spread onto the ungrouped unknowns (σ_g on the first member).
    pub fn s_vector(&self) -> Vec<Rational> {
        let mut s = vec![Rational::zero(); self.pair.num_s_vars()];
        let d = self.pair.d();
        for (g, sigma) in self.groups.iter().zip(&self.sums) {
            let idx = match g.members[0] {
                SVar::Pair(j) => j,
                SVar::Lone => d,
            };
            s[idx] = sigma.clone();
        }
        s
    }
}

fn squares(w: &Weight) -> Vec<Rational> {
    w.entries().iter().map(|e| e.square()).collect()
}

/// Groups the unknowns by squared value, largest first (the zero group last).
fn build_groups(pair: GroupPair, nu: &Weight) -> Vec<SGroup> {
    let d = pair.d();
    let mut vars: Vec<(Rational, SVar)> = squares(nu).into_iter().enumerate().map(|(j, q)| (q, SVar::Pair(j))).collect();
    if pair.kind() == PairKind::EvenK {
        vars.push((Rational::zero(), SVar::Lone));
    }
    let mut values: Vec<Rational> = vars.iter().map(|v| v.0.clone()).collect();
    values.sort_by(|a, b| b.cmp(a));
    values.dedup();
    values
        .into_iter()
        .map(|q| {
            let members: Vec<SVar> = vars.iter().filter(|v| v.0 == q).map(|v| v.1).collect();
            let coords = members.iter().flat_map(|m| m.coords(d)).collect();
            SGroup {
                is_structural_zero: q.is_zero(),
                multiplicity: members.len(),
                squared_value: q,
                members,
                coords,
            }
        })
        .collect()
}

/// Solves for the group sums σ_g by matching the reduced characteristic
/// polynomial of U_ν + W against ∏(t − λ_k²).
///
/// The orbit count is left as `Zero` (infeasible) or `Undetermined(>=1)`
/// (nonempty, not yet analyzed); [`cg_multiplicity`] refines it.
pub fn solve_group_sums(nu: &Weight, lambda: &Weight, pair: GroupPair) -> Result<CGCertificate> {
    pair.check_weights(lambda, nu)?;
    let mut trace = Vec::new();
    let groups = build_groups(pair, nu);
    let spin_compatible = nu.spin_class() == lambda.spin_class();
    if !spin_compatible {
        trace.push(format!(
            "spin classes differ ({} vs {}): no admissible pairing, infeasible",
            nu.spin_class(),
            lambda.spin_class()
        ));
    }

    let target = Poly::from_roots(&squares(lambda));
    // P = ∏_g (t − q_g)^{m_g − 1} · R with R monic of degree #groups
    let repeated = groups.iter().fold(Poly::constant(Rational::one()), |acc, g| {
        &acc * &Poly::linear_root(g.squared_value.clone()).pow(g.multiplicity - 1)
    });
    let (reduced, rem) = target.div_rem(&repeated);
    if !rem.is_zero() {
        trace.push(format!("target not divisible by repeated factor {repeated}: spectra cannot match"));
    }
    let sums: Vec<Rational> = groups
        .iter()
        .enumerate()
        .map(|(g, grp)| {
            let q = &grp.squared_value;
            let denom = groups
                .iter()
                .enumerate()
                .filter(|(h, _)| *h != g)
                .fold(Rational::one(), |acc, (_, o)| acc * (q.clone() - o.squared_value.clone()));
            -reduced.eval(q) / denom
        })
        .collect();
    for (g, s) in groups.iter().zip(&sums) {
        trace.push(format!("group q = {} (x{}): sigma = {}", g.squared_value, g.multiplicity, s));
    }

    let mut cert = CGCertificate {
        pair,
        nu: nu.clone(),
        lambda: lambda.clone(),
        spin_compatible,
        groups,
        sums,
        feasible: false,
        match_polynomial_ok: false,
        pfaffian_constraint: PfaffianConstraint::None,
        stabilizer: Vec::new(),
        orbit_count: CGValue::Zero,
        trace,
    };

    let rebuilt = char_poly_reduced(nu, &cert.s_vector(), pair)?;
    cert.match_polynomial_ok = rem.is_zero() && rebuilt == target;
    if rem.is_zero() && !cert.match_polynomial_ok {
        cert.trace.push(format!("reconstructed polynomial {rebuilt} differs from target {target}"));
    }
    let nonneg = cert.sums.iter().all(|s| !s.is_negative());
    if !nonneg {
        cert.trace.push("a group sum is negative: no real solution".into());
    }
    cert.feasible = spin_compatible && cert.match_polynomial_ok && nonneg;

    if pair.kind() == PairKind::EvenK && lambda.entries().iter().all(|e| e.twice() != 0) {
        let negatives = lambda.entries().iter().filter(|e| e.twice() < 0).count();
        cert.pfaffian_constraint =
            if negatives % 2 == 0 { PfaffianConstraint::Plus } else { PfaffianConstraint::Minus };
        cert.trace.push(format!("Pf(U_lambda) = prod(lambda) has sign {}", cert.pfaffian_constraint));
    }

    if cert.feasible {
        cert.orbit_count = CGValue::Undetermined { lower_bound: 1 };
    }
    Ok(cert)
}

fn analyze_factor(cert: &CGCertificate, g: usize) -> FactorAnalysis {
    let grp = &cert.groups[g];
    let radius_sq = cert.sums[g].clone();
    let factor = if grp.is_structural_zero {
        StabilizerFactor::SpecialOrthogonal { dim: grp.coords.len() }
    } else {
        StabilizerFactor::Unitary { rank: grp.multiplicity }
    };
    let (certified, reason) = if radius_sq.is_zero() {
        (true, "radius 0: the sphere is a single point".to_string())
    } else {
        match factor {
            StabilizerFactor::Unitary { rank: 1 } => {
                (true, "U(1) rotates the circle of the pair transitively".to_string())
            }
            StabilizerFactor::SpecialOrthogonal { dim: 2 } => {
                (true, "SO(2) rotates the circle of the kernel block transitively".to_string())
            }
            StabilizerFactor::SpecialOrthogonal { dim: 1 } => match cert.pfaffian_constraint.sign() {
                Some(pf) => {
                    // Pf(U_ν + W) = −y_{2d+1}·∏ν_j with ∏ν_j > 0 here
                    let chosen = if pf > 0 { "-" } else { "+" };
                    (true, format!("Pfaffian sign {pf:+} selects y_{} = {chosen}sqrt({radius_sq})", 2 * cert.pair.d() + 1))
                }
                None => (false, "two sign components on the lone coordinate, no Pfaffian selection".to_string()),
            },
            StabilizerFactor::Unitary { rank } => (
                false,
                format!("U({rank}) acting on S^{}: transitivity not certified by the exact layer", 2 * rank - 1),
            ),
            StabilizerFactor::SpecialOrthogonal { dim } => (
                false,
                format!("SO({dim}) acting on S^{} of the kernel block: transitivity not certified by the exact layer", dim - 1),
            ),
        }
    };
    FactorAnalysis { group: g, factor, coords: grp.coords.clone(), radius_sq, certified_single_orbit: certified, reason }
}

/// n(𝒪ᴳ_{(ν,u)}, 𝒪ᴷ_λ) with its certificate.
pub fn cg_multiplicity(nu: &Weight, lambda: &Weight, pair: GroupPair) -> Result<(CGValue, CGCertificate)> {
    let mut cert = solve_group_sums(nu, lambda, pair)?;
    if !cert.feasible {
        cert.orbit_count = CGValue::Zero;
        cert.trace.push("infeasible: n = 0".into());
        return Ok((CGValue::Zero, cert));
    }
    cert.stabilizer = (0..cert.groups.len()).map(|g| analyze_factor(&cert, g)).collect();
    for fa in &cert.stabilizer {
        cert.trace.push(format!("factor {}: {}", fa.factor, fa.reason));
    }
    let value = if cert.stabilizer.iter().all(|f| f.certified_single_orbit) {
        cert.trace.push("every factor acts transitively on its sphere: n = 1".into());
        CGValue::One
    } else {
        cert.trace.push("solution set nonempty, orbit count not certified: see `verify`".into());
        CGValue::Undetermined { lower_bound: 1 }
    };
    cert.orbit_count = value;
    Ok((value, cert))
}

/// [m(π_{(ν,u)}, τ_λ) ≠ 0], which by the orbit correspondence is also
/// [n(𝒪ᴳ, 𝒪ᴷ) ≠ 0]; the latter equality is checked in tests, not used here.
pub fn cg_nonzero(nu: &Weight, lambda: &Weight, pair: GroupPair) -> Result<bool> {
    Ok(branch_multiplicity(pair, lambda, nu)? != 0)
}
