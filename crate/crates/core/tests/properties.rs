use std::sync::Arc;

use num_complex::{Complex, Complex64};
use num_rational::BigRational;
use num_traits::{One, Zero};
use proptest::prelude::*;
use quotient_measure::groups::{build_coset_space, generate_subgroup, parse_builtin, test_normality};
use quotient_measure::measures::{group_convolve, Density, Measure, Weight};
use quotient_measure::quotient_algebra::{
    embed_density, ideal_factorize, is_left_identity, lp_action, lp_norm, Side,
};
use quotient_measure::quotient_ops::{
    lift_to_invariant, pushforward_rh, quasi_invariant_lambda, right_invariance_defect,
};
use quotient_measure::{quotient_convolve, structure_table, QuotientSpace, RhoFunction, StructureTable};

type Exact = Complex<BigRational>;

const GROUPS: &[&str] = &["S3", "D4", "Q8", "A4", "C6", "D5", "S4", "direct_product(3)"];

/// A builtin group and a subgroup generated by up to two random elements.
fn quotient_space() -> impl Strategy<Value = QuotientSpace> {
    (0..GROUPS.len(), any::<u32>(), any::<u32>(), any::<bool>()).prop_map(|(i, a, b, two)| {
        let g = Arc::new(parse_builtin(GROUPS[i]).unwrap());
        let n = g.order() as u32;
        let mut gens = vec![(a % n) as usize];
        if two {
            gens.push((b % n) as usize);
        }
        let h = generate_subgroup(&g, &gens).unwrap();
        build_coset_space(g, h)
    })
}

fn weights(n: usize, seed: &[i8]) -> Vec<Exact> {
    (0..n)
        .map(|i| {
            let re = seed[(2 * i) % seed.len()] as i64;
            let im = seed[(2 * i + 1) % seed.len()] as i64;
            Complex::new(BigRational::from_ratio(re, 4), BigRational::from_ratio(im, 4))
        })
        .collect()
}

fn measure(q: &QuotientSpace, seed: &[i8]) -> Measure<Exact> {
    Measure::new(q.carrier(), weights(q.coset_count(), seed)).unwrap()
}

fn real(n: usize, seed: &[i8]) -> Vec<BigRational> {
    weights(n, seed).into_iter().map(|w| w.re).collect()
}

fn seed() -> impl Strategy<Value = Vec<i8>> {
    prop::collection::vec(-8i8..=8, 1..24)
}

fn rho(q: &QuotientSpace, seed: &[u8]) -> RhoFunction {
    let v = (0..q.coset_count()).map(|c| f64::from(seed[c % seed.len()]) / 2.0).collect();
    RhoFunction::from_coset_values(q, v).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn rows_are_stochastic_and_representative_free(q in quotient_space(), pick in any::<u64>()) {
        let t = structure_table(&q);
        prop_assert!(t.is_row_stochastic());
        let n = q.coset_count();
        for a in 0..n {
            for b in 0..n {
                let s = (0..n).fold(BigRational::zero(), |acc, z| acc + t.constant(a, b, z));
                prop_assert!(s.is_one());
            }
        }
        let reps: Vec<usize> = (0..n)
            .map(|c| {
                let m = q.coset_members(c);
                m[(pick as usize).wrapping_add(c) % m.len()]
            })
            .collect();
        let other = StructureTable::with_representatives(&q, &reps);
        prop_assert_eq!(t.dense(), other.dense());
    }

    #[test]
    fn convolution_is_associative_exactly(q in quotient_space(), a in seed(), b in seed(), c in seed()) {
        let t = structure_table(&q);
        let (a, b, c) = (measure(&q, &a), measure(&q, &b), measure(&q, &c));
        let conv = |x: &Measure<Exact>, y: &Measure<Exact>| quotient_convolve(&t, x, y).unwrap();
        prop_assert_eq!(conv(&conv(&a, &b), &c), conv(&a, &conv(&b, &c)));
    }

    #[test]
    fn convolution_matches_group_side(q in quotient_space(), a in seed(), b in seed()) {
        let t = structure_table(&q);
        let (a, b) = (measure(&q, &a), measure(&q, &b));
        let la = lift_to_invariant(&q, &a).unwrap();
        let lb = lift_to_invariant(&q, &b).unwrap();
        let via_g = pushforward_rh(&q, &group_convolve(q.group(), &la, &lb).unwrap()).unwrap();
        prop_assert_eq!(quotient_convolve(&t, &a, &b).unwrap(), via_g);
    }

    #[test]
    fn delta_h_is_a_right_identity(q in quotient_space(), a in seed()) {
        let t = structure_table(&q);
        let a = measure(&q, &a);
        let dh = Measure::point_mass(q.carrier(), q.base_coset()).unwrap();
        prop_assert_eq!(quotient_convolve(&t, &a, &dh).unwrap(), a);
    }

    #[test]
    fn left_identity_iff_normal(q in quotient_space()) {
        let t = structure_table(&q);
        let dh = Measure::<BigRational>::point_mass(q.carrier(), q.base_coset()).unwrap();
        let normal = test_normality(q.group(), q.subgroup());
        prop_assert_eq!(is_left_identity(&t, &dh), normal);
        prop_assert_eq!(t.is_deterministic(), normal);
    }

    #[test]
    fn lift_is_an_isometric_section(q in quotient_space(), a in seed()) {
        let a = Measure::new(q.carrier(), real(q.coset_count(), &a)).unwrap();
        let lifted = lift_to_invariant(&q, &a).unwrap();
        prop_assert_eq!(right_invariance_defect(&q, &lifted), 0.0);
        prop_assert_eq!(&pushforward_rh(&q, &lifted).unwrap(), &a);
        prop_assert_eq!(lifted.total_variation_exact(), a.total_variation_exact());
    }

    #[test]
    fn pushforward_contracts(q in quotient_space(), s in seed()) {
        let g = q.group();
        let mu = Measure::new(g.carrier(), real(g.order(), &s)).unwrap();
        let image = pushforward_rh(&q, &mu).unwrap();
        prop_assert!(image.total_variation_exact() <= mu.total_variation_exact());
    }

    #[test]
    fn ideal_density_recovers_product(
        q in quotient_space(), p in seed(), s in seed(), r in prop::collection::vec(1u8..=16, 1..8), left in any::<bool>()
    ) {
        let t = structure_table(&q);
        let rho = rho(&q, &r);
        let lambda = quasi_invariant_lambda(&q, &rho);
        let phi = Density::new(q.carrier(), weights(q.coset_count(), &p)).unwrap();
        let sigma = measure(&q, &s);
        let side = if left { Side::Left } else { Side::Right };
        let psi = ideal_factorize(&lambda, &t, side, &phi, &sigma).unwrap();
        let emb = embed_density(&lambda, &phi).unwrap();
        let product = match side {
            Side::Left => quotient_convolve(&t, &sigma, &emb),
            Side::Right => quotient_convolve(&t, &emb, &sigma),
        }.unwrap();
        prop_assert_eq!(embed_density(&lambda, &psi).unwrap(), product);
    }

    #[test]
    fn lp_action_is_contractive(
        q in quotient_space(), p in seed(), s in seed(), r in prop::collection::vec(1u8..=16, 1..8), exp in 1u32..=3, left in any::<bool>()
    ) {
        let rho = rho(&q, &r);
        let lambda = quasi_invariant_lambda(&q, &rho);
        let to_f = |w: &Exact| w.to_complex();
        let phi = Density::new(q.carrier(), weights(q.coset_count(), &p).iter().map(to_f).collect::<Vec<Complex64>>()).unwrap();
        let sigma = Measure::new(q.carrier(), weights(q.coset_count(), &s).iter().map(to_f).collect()).unwrap();
        let side = if left { Side::Left } else { Side::Right };
        let pe = f64::from(exp);
        let out = lp_action(&q, &rho, side, &sigma, &phi, pe).unwrap();
        prop_assert!(lp_norm(&lambda, &out, pe) <= sigma.total_variation() * lp_norm(&lambda, &phi, pe) + 1e-10);
    }
}
