//! Half-integer arithmetic and the dominant weight lattices of SO(n).

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// An element of ½ℤ, stored as twice its value.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct HalfInt {
    twice: i64,
}

impl HalfInt {
    pub const ZERO: HalfInt = HalfInt { twice: 0 };

    pub const fn from_twice(twice: i64) -> Self {
        HalfInt { twice }
    }

    pub const fn from_int(v: i64) -> Self {
        HalfInt { twice: 2 * v }
    }

    pub const fn twice(self) -> i64 {
        self.twice
    }

    pub const fn is_integer(self) -> bool {
        self.twice % 2 == 0
    }

    pub fn abs(self) -> Self {
        HalfInt { twice: self.twice.abs() }
    }

    pub fn signum(self) -> i64 {
        self.twice.signum()
    }

    pub fn spin_class(self) -> SpinClass {
        if self.is_integer() {
            SpinClass::Integer
        } else {
            SpinClass::HalfInteger
        }
    }

    pub fn to_rational(self) -> BigRational {
        BigRational::new(BigInt::from(self.twice), BigInt::from(2))
    }

    /// The exact square x².
    pub fn square(self) -> BigRational {
        BigRational::new(BigInt::from(self.twice) * BigInt::from(self.twice), BigInt::from(4))
    }

    pub fn to_scalar<T: Scalar>(self) -> T {
        T::from_twice(self.twice)
    }

    pub fn to_f64(self) -> f64 {
        self.twice as f64 / 2.0
    }
}

impl Add for HalfInt {
    type Output = HalfInt;
    fn add(self, rhs: HalfInt) -> HalfInt {
        HalfInt { twice: self.twice + rhs.twice }
    }
}

impl Sub for HalfInt {
    type Output = HalfInt;
    fn sub(self, rhs: HalfInt) -> HalfInt {
        HalfInt { twice: self.twice - rhs.twice }
    }
}

impl Neg for HalfInt {
    type Output = HalfInt;
    fn neg(self) -> HalfInt {
        HalfInt { twice: -self.twice }
    }
}

impl PartialOrd for HalfInt {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for HalfInt {
    fn cmp(&self, other: &Self) -> Ordering {
        self.twice.cmp(&other.twice)
    }
}

impl fmt::Display for HalfInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.twice / 2)
        } else {
            write!(f, "{}/2", self.twice)
        }
    }
}

impl fmt::Debug for HalfInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for HalfInt {
    type Err = Error;

    /// Accepts `"3"`, `"-2"`, `"1/2"`, `"-7/2"`.
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        let bad = || Error::Parse(format!("not a half-integer: {s:?}"));
        match t.split_once('/') {
            None => t.parse::<i64>().map(HalfInt::from_int).map_err(|_| bad()),
            Some((num, den)) => {
                if den.trim() != "2" {
                    return Err(bad());
                }
                num.trim().parse::<i64>().map(HalfInt::from_twice).map_err(|_| bad())
            }
        }
    }
}

impl Serialize for HalfInt {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for HalfInt {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Whether a weight's entries are integers or half-odd-integers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SpinClass {
    #[serde(rename = "int")]
    Integer,
    #[serde(rename = "half")]
    HalfInteger,
}

impl SpinClass {
    /// Smallest nonnegative value of the class.
    pub fn base(self) -> HalfInt {
        match self {
            SpinClass::Integer => HalfInt::ZERO,
            SpinClass::HalfInteger => HalfInt::from_twice(1),
        }
    }
}

impl fmt::Display for SpinClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SpinClass::Integer => "int",
            SpinClass::HalfInteger => "half",
        })
    }
}

impl FromStr for SpinClass {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "int" | "integer" => Ok(SpinClass::Integer),
            "half" | "half-integer" => Ok(SpinClass::HalfInteger),
            other => Err(Error::Parse(format!("unknown spin class {other:?}"))),
        }
    }
}

/// SO(n) with its rank d = ⌊n/2⌋.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GroupSpec {
    n: usize,
}

impl GroupSpec {
    pub fn new(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::Malformed(format!("SO({n}) needs n >= 2")));
        }
        Ok(GroupSpec { n })
    }

    pub fn n(self) -> usize {
        self.n
    }

    pub fn rank(self) -> usize {
        self.n / 2
    }

    pub fn is_even(self) -> bool {
        self.n.is_multiple_of(2)
    }
}

impl fmt::Display for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SO({})", self.n)
    }
}

/// A highest weight (λ_1, …, λ_d) of SO(n) with entries of one spin class.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Weight {
    entries: Vec<HalfInt>,
    group: GroupSpec,
}

impl Weight {
    pub fn new(group: GroupSpec, entries: Vec<HalfInt>) -> Result<Self> {
        if entries.len() != group.rank() {
            return Err(Error::Malformed(format!(
                "{group} weights have {} entries, got {}",
                group.rank(),
                entries.len()
            )));
        }
        if let Some(first) = entries.first() {
            if entries.iter().any(|e| e.spin_class() != first.spin_class()) {
                return Err(Error::Malformed(
                    "weight mixes integer and half-integer entries".into(),
                ));
            }
        }
        Ok(Weight { entries, group })
    }

    pub fn from_twice(group: GroupSpec, twice: &[i64]) -> Result<Self> {
        Weight::new(group, twice.iter().map(|&t| HalfInt::from_twice(t)).collect())
    }

    pub fn from_ints(group: GroupSpec, vals: &[i64]) -> Result<Self> {
        Weight::new(group, vals.iter().map(|&v| HalfInt::from_int(v)).collect())
    }

    pub fn zero(group: GroupSpec) -> Self {
        Weight { entries: vec![HalfInt::ZERO; group.rank()], group }
    }

    /// Parses `"3,2,1/2"` for the given group.
    pub fn parse(group: GroupSpec, s: &str) -> Result<Self> {
        let entries = s
            .split(',')
            .map(str::parse::<HalfInt>)
            .collect::<Result<Vec<_>>>()?;
        Weight::new(group, entries)
    }

    pub fn entries(&self) -> &[HalfInt] {
        &self.entries
    }

    pub fn group(&self) -> GroupSpec {
        self.group
    }

    pub fn spin_class(&self) -> SpinClass {
        self.entries[0].spin_class()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|e| *e == HalfInt::ZERO)
    }

    pub fn require_dominant(&self) -> Result<()> {
        if is_dominant(self) {
            Ok(())
        } else {
            Err(Error::NotDominant { weight: self.to_string(), n: self.group.n() })
        }
    }
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, e) in self.entries.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{e}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({})", self.group, self)
    }
}

impl PartialOrd for Weight {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Weight {
    fn cmp(&self, other: &Self) -> Ordering {
        self.group.n.cmp(&other.group.n).then_with(|| self.entries.cmp(&other.entries))
    }
}

impl Serialize for Weight {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

fn chain_holds(w: &Weight, strict: bool) -> bool {
    let e = w.entries();
    let d = e.len();
    let cmp = |a: HalfInt, b: HalfInt| if strict { a > b } else { a >= b };
    let head_ok = (0..d.saturating_sub(1)).all(|i| {
        let next = if i + 1 == d - 1 && w.group.is_even() { e[i + 1].abs() } else { e[i + 1] };
        cmp(e[i], next)
    });
    let tail_ok = if w.group.is_even() {
        true
    } else {
        cmp(e[d - 1], HalfInt::ZERO)
    };
    head_ok && tail_ok
}

/// λ_1 ≥ … ≥ λ_{d−1} ≥ |λ_d| (n even) or λ_1 ≥ … ≥ λ_d ≥ 0 (n odd).
pub fn is_dominant(w: &Weight) -> bool {
    chain_holds(w, false)
}

/// The strict version of [`is_dominant`]. Every SO(2) weight qualifies.
pub fn is_strongly_dominant(w: &Weight) -> bool {
    chain_holds(w, true)
}

/// All dominant weights with entries of `class` and |entry| ≤ `max_entry`,
/// in lexicographic order.
pub fn enumerate_weights(group: GroupSpec, max_entry: HalfInt, class: SpinClass) -> Vec<Weight> {
    let d = group.rank();
    let mut out = Vec::new();
    if max_entry < HalfInt::ZERO {
        return out;
    }
    // candidate values of the class in [-max, max], ascending
    let base = class.base().twice();
    let mut values = Vec::new();
    let mut t = -max_entry.twice();
    while t <= max_entry.twice() {
        if (t - base).rem_euclid(2) == 0 {
            values.push(HalfInt::from_twice(t));
        }
        t += 1;
    }
    let mut prefix = Vec::with_capacity(d);
    extend_chains(group, &values, &mut prefix, &mut out);
    out
}

fn extend_chains(group: GroupSpec, values: &[HalfInt], prefix: &mut Vec<HalfInt>, out: &mut Vec<Weight>) {
    let d = group.rank();
    let i = prefix.len();
    if i == d {
        out.push(Weight { entries: prefix.clone(), group });
        return;
    }
    let last = i == d - 1;
    for &v in values {
        let ok = match prefix.last() {
            None => {
                // first entry: nonnegative unless it is also the signed last entry of SO(2k)
                if last && group.is_even() {
                    true
                } else {
                    v >= HalfInt::ZERO
                }
            }
            Some(&prev) => {
                if last && group.is_even() {
                    prev >= v.abs()
                } else {
                    v >= HalfInt::ZERO && prev >= v
                }
            }
        };
        if ok {
            prefix.push(v);
            extend_chains(group, values, prefix, out);
            prefix.pop();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn so(n: usize) -> GroupSpec {
        GroupSpec::new(n).unwrap()
    }

    fn w(n: usize, s: &str) -> Weight {
        Weight::parse(so(n), s).unwrap()
    }

    #[test]
    fn dominance_examples() {
        assert!(is_dominant(&w(7, "3,2,1")));
        assert!(is_dominant(&w(6, "2,1,-1")));
        assert!(!is_dominant(&w(7, "1,2,0")));
        assert!(!is_dominant(&w(5, "1,-1")));
        assert!(is_dominant(&w(4, "0,0")));
    }

    #[test]
    fn strong_dominance_examples() {
        assert!(is_strongly_dominant(&w(5, "2,1")));
        assert!(!is_strongly_dominant(&w(5, "2,2")));
        assert!(is_strongly_dominant(&w(4, "3,-2")));
        assert!(!is_strongly_dominant(&w(5, "1,0")));
        assert!(is_strongly_dominant(&w(6, "2,1,0")));
    }

    #[test]
    fn so2_weights_are_all_strongly_dominant() {
        for s in ["-3", "0", "5/2", "-1/2"] {
            assert!(is_strongly_dominant(&w(2, s)), "{s}");
            assert!(is_dominant(&w(2, s)));
        }
    }

    #[test]
    fn malformed_weights() {
        assert!(matches!(Weight::parse(so(5), "1,2,3"), Err(Error::Malformed(_))));
        assert!(matches!(Weight::parse(so(5), "1,1/2"), Err(Error::Malformed(_))));
        assert!(matches!(Weight::parse(so(5), "1,1/3"), Err(Error::Parse(_))));
        assert!(GroupSpec::new(1).is_err());
    }

    #[test]
    fn parse_and_print() {
        let x = w(7, "5/2,-1/2,1/2");
        assert_eq!(x.to_string(), "5/2,-1/2,1/2");
        assert_eq!(w(4, "-0,2").to_string(), "0,2");
        assert_eq!("6/2".parse::<HalfInt>().unwrap(), HalfInt::from_int(3));
    }

    #[test]
    fn enumerate_examples() {
        let list = |n, twice_max, class| {
            enumerate_weights(so(n), HalfInt::from_twice(twice_max), class)
                .iter()
                .map(|w| w.to_string())
                .collect::<Vec<_>>()
        };
        assert_eq!(list(3, 2, SpinClass::Integer), ["0", "1"]);
        assert_eq!(list(4, 2, SpinClass::Integer), ["0,0", "1,-1", "1,0", "1,1"]);
        assert_eq!(
            list(5, 3, SpinClass::HalfInteger),
            ["1/2,1/2", "3/2,1/2", "3/2,3/2"]
        );
        assert_eq!(list(2, 2, SpinClass::Integer), ["-1", "0", "1"]);
        assert!(list(5, 0, SpinClass::HalfInteger).is_empty());
        assert!(list(5, -2, SpinClass::Integer).is_empty());
    }

    /// Brute-force grid filter, independent of the chain generator.
    fn grid_filter(group: GroupSpec, twice_max: i64, class: SpinClass) -> Vec<Weight> {
        let d = group.rank();
        let vals: Vec<i64> = (-twice_max..=twice_max)
            .filter(|t| (t - class.base().twice()).rem_euclid(2) == 0)
            .collect();
        let mut out = Vec::new();
        let total = vals.len().pow(d as u32);
        for mut code in 0..total {
            let mut tw = Vec::with_capacity(d);
            for _ in 0..d {
                tw.push(vals[code % vals.len()]);
                code /= vals.len();
            }
            let cand = Weight::from_twice(group, &tw).unwrap();
            if is_dominant(&cand) {
                out.push(cand);
            }
        }
        out.sort();
        out
    }

    #[test]
    fn enumeration_matches_grid_filter() {
        for n in 2..=8 {
            for twice_max in 0..=6 {
                for class in [SpinClass::Integer, SpinClass::HalfInteger] {
                    let got = enumerate_weights(so(n), HalfInt::from_twice(twice_max), class);
                    assert!(got.iter().all(is_dominant));
                    assert!(got.windows(2).all(|p| p[0] < p[1]), "sorted, no duplicates");
                    assert_eq!(got, grid_filter(so(n), twice_max, class), "SO({n}) max {twice_max}/2");
                }
            }
        }
    }

    proptest! {
        #[test]
        fn halfint_add_sub_round_trip(a in -10_000i64..10_000, b in -10_000i64..10_000) {
            let (x, y) = (HalfInt::from_twice(a), HalfInt::from_twice(b));
            prop_assert_eq!((x + y) - y, x);
            prop_assert_eq!(x.to_string().parse::<HalfInt>().unwrap(), x);
        }

        #[test]
        fn square_is_exact(a in -10_000i64..10_000) {
            let x = HalfInt::from_twice(a);
            prop_assert_eq!(x.square(), x.to_rational() * x.to_rational());
        }

        #[test]
        fn strong_implies_weak(n in 2usize..9, seed in proptest::collection::vec(-9i64..=9, 4)) {
            let g = so(n);
            let twice: Vec<i64> = seed.iter().take(g.rank()).map(|t| 2 * t).collect();
            let cand = Weight::from_twice(g, &twice).unwrap();
            if is_strongly_dominant(&cand) {
                prop_assert!(is_dominant(&cand));
            }
        }
    }
}
