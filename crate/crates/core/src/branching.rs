//! Multiplicity-free branching SO(n) ↓ SO(n−1).

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::weights::{enumerate_weights, GroupSpec, HalfInt, Weight};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PairKind {
    /// K = SO(2d+1), H = SO(2d)
    OddK,
    /// K = SO(2d+2), H = SO(2d+1)
    EvenK,
}

/// The successive pair (K, H) = (SO(n), SO(n−1)), n ≥ 3.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GroupPair {
    k: GroupSpec,
    h: GroupSpec,
}

impl GroupPair {
    pub fn new(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::Malformed(format!("pair SO({n})/SO({}) needs n >= 3", n.saturating_sub(1))));
        }
        Ok(GroupPair { k: GroupSpec::new(n)?, h: GroupSpec::new(n - 1)? })
    }

    pub fn k(self) -> GroupSpec {
        self.k
    }

    pub fn h(self) -> GroupSpec {
        self.h
    }

    /// Ambient dimension n of K = SO(n).
    pub fn n(self) -> usize {
        self.k.n()
    }

    pub fn kind(self) -> PairKind {
        if self.k.is_even() {
            PairKind::EvenK
        } else {
            PairKind::OddK
        }
    }

    /// Rank of H; ν has d entries.
    pub fn d(self) -> usize {
        self.h.rank()
    }

    /// Number of y²-type unknowns: d pair sums, plus the lone coordinate for EvenK.
    pub fn num_s_vars(self) -> usize {
        match self.kind() {
            PairKind::OddK => self.d(),
            PairKind::EvenK => self.d() + 1,
        }
    }

    pub(crate) fn check_weights(self, lambda: &Weight, nu: &Weight) -> Result<()> {
        if lambda.group() != self.k {
            return Err(Error::Malformed(format!("lambda {lambda:?} is not a weight of {}", self.k)));
        }
        if nu.group() != self.h {
            return Err(Error::Malformed(format!("nu {nu:?} is not a weight of {}", self.h)));
        }
        lambda.require_dominant()?;
        nu.require_dominant()
    }
}

impl fmt::Display for GroupPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "so{}/so{}", self.k.n(), self.h.n())
    }
}

impl FromStr for GroupPair {
    type Err = Error;

    /// `"so5/so4"`; the two groups must be successive.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("pair must look like so5/so4, got {s:?}"));
        let (a, b) = s.trim().split_once('/').ok_or_else(bad)?;
        let num = |x: &str| -> Result<usize> {
            let x = x.trim().to_ascii_lowercase();
            x.strip_prefix("so").ok_or_else(bad)?.parse::<usize>().map_err(|_| bad())
        };
        let (kn, hn) = (num(a)?, num(b)?);
        if hn + 1 != kn {
            return Err(Error::Parse(format!("pair {s:?} is not of the form SO(n)/SO(n-1)")));
        }
        GroupPair::new(kn)
    }
}

impl Serialize for GroupPair {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for GroupPair {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

/// Interlacing test, ignoring spin classes.
fn interlaces(pair: GroupPair, lambda: &[HalfInt], nu: &[HalfInt]) -> bool {
    let d = pair.d();
    match pair.kind() {
        // λ_1 ≥ ν_1 ≥ λ_2 ≥ … ≥ λ_d ≥ |ν_d|
        PairKind::OddK => (0..d).all(|i| {
            let upper = lambda[i] >= nu[i];
            let lower = if i + 1 < d { nu[i] >= lambda[i + 1] } else { lambda[i] >= nu[i].abs() };
            upper && lower
        }),
        // λ_1 ≥ ν_1 ≥ λ_2 ≥ … ≥ λ_d ≥ ν_d ≥ |λ_{d+1}|
        PairKind::EvenK => (0..d).all(|i| {
            let lower = if i + 1 < d { nu[i] >= lambda[i + 1] } else { nu[i] >= lambda[d].abs() };
            lambda[i] >= nu[i] && lower
        }),
    }
}

/// mult(τ_λ|_H, σ_ν) ∈ {0, 1}.
pub fn branch_multiplicity(pair: GroupPair, lambda: &Weight, nu: &Weight) -> Result<u8> {
    pair.check_weights(lambda, nu)?;
    if lambda.spin_class() != nu.spin_class() {
        return Ok(0);
    }
    Ok(u8::from(interlaces(pair, lambda.entries(), nu.entries())))
}

/// Every ν of H occurring in τ_λ|_H, lexicographically ordered.
pub fn restriction_decomposition(pair: GroupPair, lambda: &Weight) -> Result<Vec<Weight>> {
    if lambda.group() != pair.k() {
        return Err(Error::Malformed(format!("lambda {lambda:?} is not a weight of {}", pair.k())));
    }
    lambda.require_dominant()?;
    let bound = lambda.entries()[0];
    Ok(enumerate_weights(pair.h(), bound, lambda.spin_class())
        .into_iter()
        .filter(|nu| interlaces(pair, lambda.entries(), nu.entries()))
        .collect())
}
