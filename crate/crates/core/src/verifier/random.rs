//! Seeded random inputs. All draws come from `ChaCha8Rng`, whose output
//! stream is fixed across platforms.
//!
//! Float weights are uniform on `[-1, 1) × [-1, 1)`. Exact weights are drawn
//! from the grid `k/8`, `k ∈ -8..=8`, so they are dyadic and survive a round
//! trip through `f64`. Random rho values are `n / d` with `n ∈ 1..=8` and
//! `d ∈ {1, 2, 4}`, dyadic for the same reason.

use num_complex::{Complex, Complex64};
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::groups::QuotientSpace;
use crate::measures::{Carrier, Density, Measure, Weight};
use crate::quotient_ops::RhoFunction;

pub type CheckRng = ChaCha8Rng;

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn fnv1a(text: &str) -> u64 {
    text.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| {
        (h ^ b as u64).wrapping_mul(0x0000_0100_0000_01b3)
    })
}

/// Independent stream for one (check, catalog entry) pair, so results do not
/// depend on execution order or thread count.
pub fn stream(seed: u64, check: &str, entry: &str) -> CheckRng {
    let mixed = splitmix(seed ^ splitmix(fnv1a(check) ^ splitmix(fnv1a(entry))));
    ChaCha8Rng::seed_from_u64(mixed)
}

fn grid(rng: &mut CheckRng) -> BigRational {
    BigRational::from_ratio(rng.random_range(-8..=8), 8)
}

/// Weights that can be drawn at random.
pub trait Sample: Weight {
    fn sample(rng: &mut CheckRng) -> Self;
}

impl Sample for Complex64 {
    fn sample(rng: &mut CheckRng) -> Self {
        Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    }
}

impl Sample for Complex<BigRational> {
    fn sample(rng: &mut CheckRng) -> Self {
        Complex::new(grid(rng), grid(rng))
    }
}

impl Sample for BigRational {
    fn sample(rng: &mut CheckRng) -> Self {
        grid(rng)
    }
}

pub fn measure<W: Sample>(rng: &mut CheckRng, carrier: Carrier) -> Measure<W> {
    let w = (0..carrier.size()).map(|_| W::sample(rng)).collect();
    Measure::new(carrier, w).expect("sized to carrier")
}

pub fn density<W: Sample>(rng: &mut CheckRng, carrier: Carrier) -> Density<W> {
    let v = (0..carrier.size()).map(|_| W::sample(rng)).collect();
    Density::new(carrier, v).expect("sized to carrier")
}

pub fn rho(rng: &mut CheckRng, q: &QuotientSpace) -> RhoFunction {
    let values = (0..q.coset_count())
        .map(|_| {
            let n: u32 = rng.random_range(1..=8);
            let d = [1.0, 2.0, 4.0][rng.random_range(0..3)];
            n as f64 / d
        })
        .collect();
    RhoFunction::from_coset_values(q, values).expect("positive values")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let mut a = stream(42, "D6_CONV", "S3");
        let mut b = stream(42, "D6_CONV", "S3");
        let first: f64 = a.random();
        assert_eq!(first, b.random::<f64>());
        assert_ne!(first, a.random::<f64>());
        assert_ne!(stream(42, "D6_CONV", "S4").random::<f64>(), first);
        assert_ne!(stream(42, "T8_ALGEBRA", "S3").random::<f64>(), first);
        assert_ne!(stream(43, "D6_CONV", "S3").random::<f64>(), first);
    }

    #[test]
    fn exact_weights_are_dyadic() {
        let mut r = stream(1, "x", "y");
        for _ in 0..50 {
            let w = Complex::<BigRational>::sample(&mut r);
            let c = w.to_complex();
            assert_eq!(
                Complex::new(BigRational::from_f64(c.re), BigRational::from_f64(c.im)),
                w
            );
            let f = Complex64::sample(&mut r);
            assert!((-1.0..1.0).contains(&f.re) && (-1.0..1.0).contains(&f.im));
        }
    }

    #[test]
    fn random_rho_is_dyadic_and_positive() {
        let g = crate::groups::builtin_catalog(crate::groups::CatalogName::Symmetric, 3).unwrap();
        let h = crate::groups::generate_subgroup(&g, &[1]).unwrap();
        let q = crate::groups::build_coset_space(std::sync::Arc::new(g), h);
        let mut r = stream(7, "rho", "S3");
        for _ in 0..20 {
            for &v in rho(&mut r, &q).values() {
                assert!(v > 0.0 && (v * 4.0).fract() == 0.0);
            }
        }
    }
}
