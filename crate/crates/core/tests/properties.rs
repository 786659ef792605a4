use motion_cg::liegeom::{build_u, coadjoint_apply, shifted_matrix, spectral_data, w_ab, Functional, GroupElement, SkewMatrix};
use motion_cg::matrix::SquareMatrix;
use motion_cg::oracle::{find_witnesses, orbit_membership, orbit_membership_values, random_rotation, OracleConfig};
use motion_cg::{cg_multiplicity, cg_nonzero, enumerate_weights, CGValue, GroupPair, HalfInt, SpinClass, Weight};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

fn gaussian(n: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    (0..n).map(|_| StandardNormal.sample(rng)).collect()
}

fn random_skew(n: usize, rng: &mut ChaCha8Rng) -> SkewMatrix<f64> {
    let x = SquareMatrix::from_fn(n, |_, _| StandardNormal.sample(rng));
    SkewMatrix::new(&x - &x.transpose()).unwrap()
}

fn pick(pair: GroupPair, idx: (usize, usize), class: SpinClass) -> (Weight, Weight) {
    let nus = enumerate_weights(pair.h(), HalfInt::from_twice(9), class);
    let lambdas = enumerate_weights(pair.k(), HalfInt::from_twice(9), class);
    (nus[idx.0 % nus.len()].clone(), lambdas[idx.1 % lambdas.len()].clone())
}

fn class_of(b: bool) -> SpinClass {
    if b { SpinClass::HalfInteger } else { SpinClass::Integer }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn translation_moves_k_part_inside_w(seed in any::<u64>(), n in 3usize..=8) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = GroupElement::new(random_rotation(n, &mut rng), gaussian(n, &mut rng)).unwrap();
        let f = Functional::new(random_skew(n, &mut rng), gaussian(n, &mut rng)).unwrap();
        let out = coadjoint_apply(&g, &f).unwrap();
        let diff = out.rot.sub(&f.rot.conjugate(g.rotation()));
        // diff ∈ 𝒲_v with v = Au: P·diff·P = 0 for the projector P onto v^⊥
        let v = &out.trans;
        let v2: f64 = v.iter().map(|x| x * x).sum();
        let p = SquareMatrix::from_fn(n, |i, j| f64::from(u8::from(i == j)) - v[i] * v[j] / v2);
        let projected = &(&p * diff.matrix()) * &p;
        prop_assert!(projected.max_abs() < 1e-9 * (1.0 + diff.max_abs()));
    }

    #[test]
    fn pure_rotation_preserves_spectrum(seed in any::<u64>(), n in 2usize..=8) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = GroupElement::new(random_rotation(n, &mut rng), vec![0.0; n]).unwrap();
        let f = Functional::new(random_skew(n, &mut rng), gaussian(n, &mut rng)).unwrap();
        let out = coadjoint_apply(&g, &f).unwrap();
        let a = spectral_data(&f.rot, 1e-9);
        let b = spectral_data(&out.rot, 1e-9);
        prop_assert_eq!(a.zero_multiplicity, b.zero_multiplicity);
        prop_assert_eq!(a.pfaffian_sign, b.pfaffian_sign);
        for (x, y) in a.mus.iter().zip(&b.mus) {
            prop_assert!((x - y).abs() < 1e-9 * (1.0 + x));
        }
    }

    #[test]
    fn equivariance_of_w(seed in any::<u64>(), n in 2usize..=8) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_rotation(n, &mut rng);
        let (x, y) = (gaussian(n, &mut rng), gaussian(n, &mut rng));
        let lhs = w_ab(&a.mul_vec(&x).unwrap(), &a.mul_vec(&y).unwrap()).unwrap();
        let rhs = w_ab(&x, &y).unwrap().conjugate(&a);
        prop_assert!(lhs.sub(&rhs).max_abs() < 1e-12 * (1.0 + rhs.max_abs()));
    }

    #[test]
    fn membership_is_scale_invariant(
        seed in any::<u64>(),
        pi in 0usize..3,
        idx in (0usize..500, 0usize..500),
        half in any::<bool>(),
    ) {
        let pair: GroupPair = ["so5/so4", "so6/so5", "so7/so6"][pi].parse().unwrap();
        let (_, lambda) = pick(pair, idx, class_of(half));
        let cfg = OracleConfig::default();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = pair.n();
        let s = build_u::<f64>(&lambda, n).unwrap().conjugate(&random_rotation(n, &mut rng));
        let perturbed = s.add(&random_skew(n, &mut rng).map(|x| x * 1e-3));
        let vals: Vec<f64> = lambda.entries().iter().map(|e| e.to_f64()).collect();
        for c in [2.0, 0.5] {
            let scaled: Vec<f64> = vals.iter().map(|v| v * c).collect();
            for m in [&s, &perturbed] {
                let base = orbit_membership_values(m, &vals, &cfg).unwrap();
                let sm = m.map(|x| x * c);
                prop_assert_eq!(base, orbit_membership_values(&sm, &scaled, &cfg).unwrap());
            }
        }
        prop_assert!(orbit_membership_values(&s, &vals, &cfg).unwrap());
    }

    #[test]
    fn witnesses_are_members_and_agree_with_exact(
        seed in any::<u64>(),
        pi in 0usize..3,
        idx in (0usize..500, 0usize..500),
        half in any::<bool>(),
    ) {
        let pair: GroupPair = ["so5/so4", "so6/so5", "so7/so6"][pi].parse().unwrap();
        let (nu, lambda) = pick(pair, idx, class_of(half));
        let cfg = OracleConfig { samples: 8, ..OracleConfig::default() };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ws = find_witnesses(&nu, &lambda, pair, &cfg, &mut rng).unwrap();
        for y in &ws {
            prop_assert!(orbit_membership(&shifted_matrix::<f64>(pair, &nu, y).unwrap(), &lambda, &cfg).unwrap());
        }
        let (n, _) = cg_multiplicity(&nu, &lambda, pair).unwrap();
        prop_assert_eq!(ws.is_empty(), n == CGValue::Zero);
        prop_assert_eq!(cg_nonzero(&nu, &lambda, pair).unwrap(), n != CGValue::Zero);
    }

    #[test]
    fn exact_and_float_sums_agree(
        pi in 0usize..4,
        idx in (0usize..500, 0usize..500),
        half in any::<bool>(),
    ) {
        // the generic char-poly construction agrees across scalar types
        let pair: GroupPair = ["so4/so3", "so5/so4", "so6/so5", "so7/so6"][pi].parse().unwrap();
        let (nu, _) = pick(pair, idx, class_of(half));
        let s_q: Vec<motion_cg::Rational> = (0..pair.num_s_vars()).map(|k| motion_cg::Rational::from_integer((k as i64 + 1).into())).collect();
        let s_f: Vec<f64> = (0..pair.num_s_vars()).map(|k| k as f64 + 1.0).collect();
        let s_32: Vec<f32> = (0..pair.num_s_vars()).map(|k| k as f32 + 1.0).collect();
        let pq = motion_cg::liegeom::char_poly_reduced(&nu, &s_q, pair).unwrap();
        let pf = motion_cg::liegeom::char_poly_reduced(&nu, &s_f, pair).unwrap();
        let p32 = motion_cg::liegeom::char_poly_reduced(&nu, &s_32, pair).unwrap();
        for ((a, b), c) in pq.coeffs().iter().zip(pf.coeffs()).zip(p32.coeffs()) {
            let a = num_traits::ToPrimitive::to_f64(a).unwrap();
            prop_assert!((a - b).abs() <= 1e-9 * (1.0 + a.abs()));
            prop_assert!((a - f64::from(*c)).abs() <= 1e-4 * (1.0 + a.abs()));
        }
    }
}

#[test]
fn f32_backend_builds_the_same_blocks() {
    let pair: GroupPair = "so6/so5".parse().unwrap();
    let lambda = Weight::parse(pair.k(), "5/2,3/2,-1/2").unwrap();
    let a = build_u::<f32>(&lambda, 6).unwrap();
    let b = build_u::<f64>(&lambda, 6).unwrap();
    for i in 0..6 {
        for j in 0..6 {
            assert_eq!(f64::from(a[(i, j)]), b[(i, j)]);
        }
    }
    assert_eq!(motion_cg::liegeom::pfaffian(&a).unwrap(), -1.875);
}
