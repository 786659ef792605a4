use std::collections::BTreeMap;

use motion_cg::{branch_multiplicity, enumerate_weights, restriction_decomposition, GroupPair, GroupSpec, HalfInt, Rational, SpinClass, Weight};
use num_traits::{One, Zero};

/// Weyl dimension formula for SO(n), written out for types B and D.
fn weyl_dim(w: &Weight) -> Rational {
    let n = w.group().n();
    let d = w.entries().len();
    let half = Rational::new(1.into(), 2.into());
    let rho: Vec<Rational> = (0..d)
        .map(|i| {
            let base = Rational::from_integer(((d - i - 1) as i64).into());
            if n % 2 == 1 { base + half.clone() } else { base }
        })
        .collect();
    let l: Vec<Rational> = w.entries().iter().zip(&rho).map(|(e, r)| e.to_rational() + r.clone()).collect();
    let mut num = Rational::one();
    let mut den = Rational::one();
    for i in 0..d {
        for j in i + 1..d {
            num *= l[i].clone() * l[i].clone() - l[j].clone() * l[j].clone();
            den *= rho[i].clone() * rho[i].clone() - rho[j].clone() * rho[j].clone();
        }
        if n % 2 == 1 {
            num *= l[i].clone();
            den *= rho[i].clone();
        }
    }
    num / den
}

#[test]
fn weyl_dimension_sums_match_restriction() {
    for n in 3..=8 {
        let pair = GroupPair::new(n).unwrap();
        for class in [SpinClass::Integer, SpinClass::HalfInteger] {
            for lambda in enumerate_weights(pair.k(), HalfInt::from_int(3), class) {
                let mut total = Rational::zero();
                // every H weight up to the bound, both classes: mismatches must contribute 0
                for c in [SpinClass::Integer, SpinClass::HalfInteger] {
                    for nu in enumerate_weights(pair.h(), lambda.entries()[0], c) {
                        let m = branch_multiplicity(pair, &lambda, &nu).unwrap();
                        assert!(m <= 1);
                        if m == 1 {
                            total += weyl_dim(&nu);
                        }
                    }
                }
                assert_eq!(total, weyl_dim(&lambda), "{pair} lambda={lambda}");
            }
        }
    }
}

#[test]
fn known_dimensions() {
    let dim = |n: usize, s: &str| weyl_dim(&Weight::parse(GroupSpec::new(n).unwrap(), s).unwrap());
    assert_eq!(dim(3, "1"), Rational::from_integer(3.into()));
    assert_eq!(dim(5, "1/2,1/2"), Rational::from_integer(4.into()));
    assert_eq!(dim(5, "1,0"), Rational::from_integer(5.into()));
    assert_eq!(dim(6, "1/2,1/2,1/2"), Rational::from_integer(4.into()));
    assert_eq!(dim(7, "1,1,0"), Rational::from_integer(21.into()));
    assert_eq!(dim(8, "1/2,1/2,1/2,-1/2"), Rational::from_integer(8.into()));
}

/// SO(4) ≅ (SU(2)×SU(2))/±1: τ_(a,b) is V_{j1} ⊗ V_{j2} with j1 = (a+b)/2,
/// j2 = (a−b)/2, and SO(3) is the diagonal SU(2). Restriction is read off
/// by peeling highest weights from the tensor weight multiset.
fn so4_to_so3_by_weights(a: i64, b: i64) -> Vec<i64> {
    let (j1, j2) = ((a + b) as f64 / 2.0, (a - b) as f64 / 2.0);
    let weights = |j: f64| -> Vec<i64> { (0..=((2.0 * j) as i64)).map(|k| (2.0 * (k as f64 - j)) as i64).collect() };
    let mut mult: BTreeMap<i64, i64> = BTreeMap::new();
    for x in weights(j1) {
        for y in weights(j2) {
            *mult.entry(x + y).or_default() += 1;
        }
    }
    let mut out = Vec::new();
    while let Some((&top, _)) = mult.iter().rev().find(|(_, &c)| c > 0) {
        out.push(top / 2);
        let mut m = -top;
        while m <= top {
            *mult.get_mut(&m).unwrap() -= 1;
            m += 2;
        }
    }
    out.sort_unstable();
    out
}

#[test]
fn so4_to_so3_matches_weight_counting() {
    let pair: GroupPair = "so4/so3".parse().unwrap();
    for a in 0..=5i64 {
        for b in -a..=a {
            let lambda = Weight::from_ints(pair.k(), &[a, b]).unwrap();
            let got: Vec<i64> = restriction_decomposition(pair, &lambda)
                .unwrap()
                .iter()
                .map(|nu| nu.entries()[0].twice() / 2)
                .collect();
            assert_eq!(got, so4_to_so3_by_weights(a, b), "lambda=({a},{b})");
        }
    }
}

#[test]
fn restriction_agrees_with_multiplicity() {
    for n in 3..=7 {
        let pair = GroupPair::new(n).unwrap();
        for class in [SpinClass::Integer, SpinClass::HalfInteger] {
            for lambda in enumerate_weights(pair.k(), HalfInt::from_int(4), class) {
                let res = restriction_decomposition(pair, &lambda).unwrap();
                for nu in enumerate_weights(pair.h(), HalfInt::from_int(4), class) {
                    let m = branch_multiplicity(pair, &lambda, &nu).unwrap();
                    assert_eq!(res.contains(&nu), m == 1, "{pair} {lambda} {nu}");
                }
            }
        }
    }
}

#[test]
fn so3_to_so2_has_2l_plus_1_terms() {
    let pair: GroupPair = "so3/so2".parse().unwrap();
    for l in 0..=6 {
        let lambda = Weight::from_ints(pair.k(), &[l]).unwrap();
        assert_eq!(restriction_decomposition(pair, &lambda).unwrap().len(), (2 * l + 1) as usize);
    }
}
