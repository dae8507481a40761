//! Finitely supported measures and densities on a group or a coset space,
//! and convolution on `M(G)`.
//!
//! Weights are generic over [`Weight`] so that the same operators run in
//! double-precision complex arithmetic and in exact rational arithmetic.
//! Measures are dense: one weight per carrier point.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_complex::{Complex, Complex64};
use num_rational::BigRational;
use num_traits::{Num, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::groups::FiniteGroup;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MeasureError {
    #[error("carrier mismatch: expected {expected}, found {found}")]
    CarrierMismatch { expected: String, found: String },
    #[error("point {index} out of range for a carrier of size {size}")]
    IndexOutOfRange { index: usize, size: usize },
    #[error("expected {expected} weights, found {found}")]
    Shape { expected: usize, found: usize },
}

/// Scalar field for measure weights and density values.
pub trait Weight: Clone + PartialEq + fmt::Debug + Send + Sync + Num + 'static {
    fn from_ratio(num: i64, den: i64) -> Self;
    /// Exact for the rational implementations (every finite double is dyadic).
    fn from_f64(x: f64) -> Self;
    fn from_rational(r: &BigRational) -> Self;
    fn to_complex(&self) -> Complex64;

    fn modulus(&self) -> f64 {
        self.to_complex().norm()
    }
}

impl Weight for Complex64 {
    fn from_ratio(num: i64, den: i64) -> Self {
        Complex64::new(num as f64 / den as f64, 0.0)
    }

    fn from_f64(x: f64) -> Self {
        Complex64::new(x, 0.0)
    }

    fn from_rational(r: &BigRational) -> Self {
        Complex64::new(r.to_f64().unwrap_or(f64::NAN), 0.0)
    }

    fn to_complex(&self) -> Complex64 {
        *self
    }
}

impl Weight for BigRational {
    fn from_ratio(num: i64, den: i64) -> Self {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }

    fn from_f64(x: f64) -> Self {
        BigRational::from_float(x).expect("finite weight")
    }

    fn from_rational(r: &BigRational) -> Self {
        r.clone()
    }

    fn to_complex(&self) -> Complex64 {
        Complex64::new(self.to_f64().unwrap_or(f64::NAN), 0.0)
    }
}

impl Weight for Complex<BigRational> {
    fn from_ratio(num: i64, den: i64) -> Self {
        Complex::new(BigRational::from_ratio(num, den), BigRational::zero())
    }

    fn from_f64(x: f64) -> Self {
        Complex::new(BigRational::from_f64(x), BigRational::zero())
    }

    fn from_rational(r: &BigRational) -> Self {
        Complex::new(r.clone(), BigRational::zero())
    }

    fn to_complex(&self) -> Complex64 {
        Complex64::new(
            self.re.to_f64().unwrap_or(f64::NAN),
            self.im.to_f64().unwrap_or(f64::NAN),
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CarrierKind {
    Group,
    Quotient,
}

impl fmt::Display for CarrierKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CarrierKind::Group => "group",
            CarrierKind::Quotient => "quotient",
        })
    }
}

/// The finite set a measure lives on: the points of `G` or of `G/H`.
#[derive(Clone, Debug)]
pub struct Carrier {
    kind: CarrierKind,
    labels: Arc<[String]>,
}

impl Carrier {
    pub fn new(kind: CarrierKind, labels: Arc<[String]>) -> Self {
        Self { kind, labels }
    }

    pub fn kind(&self) -> CarrierKind {
        self.kind
    }

    pub fn size(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub(crate) fn expect(&self, other: &Carrier) -> Result<(), MeasureError> {
        if self == other {
            Ok(())
        } else {
            Err(MeasureError::CarrierMismatch {
                expected: self.to_string(),
                found: other.to_string(),
            })
        }
    }
}

impl PartialEq for Carrier {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind
            && (Arc::ptr_eq(&self.labels, &other.labels) || self.labels == other.labels)
    }
}

impl fmt::Display for Carrier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} carrier of size {}", self.kind, self.size())
    }
}

/// A measure on a finite carrier, read as the functional `μ(f) = Σ f(i) w_i`.
#[derive(Clone, Debug, PartialEq)]
pub struct Measure<W = Complex64> {
    carrier: Carrier,
    weights: Vec<W>,
}

pub type ComplexMeasure = Measure<Complex64>;
pub type RationalMeasure = Measure<BigRational>;

impl<W: Weight> Measure<W> {
    pub fn new(carrier: Carrier, weights: Vec<W>) -> Result<Self, MeasureError> {
        if weights.len() != carrier.size() {
            return Err(MeasureError::Shape {
                expected: carrier.size(),
                found: weights.len(),
            });
        }
        Ok(Self { carrier, weights })
    }

    pub fn zero(carrier: Carrier) -> Self {
        let weights = vec![W::zero(); carrier.size()];
        Self { carrier, weights }
    }

    /// Unit mass at `point`.
    pub fn point_mass(carrier: Carrier, point: usize) -> Result<Self, MeasureError> {
        if point >= carrier.size() {
            return Err(MeasureError::IndexOutOfRange {
                index: point,
                size: carrier.size(),
            });
        }
        let mut m = Self::zero(carrier);
        m.weights[point] = W::one();
        Ok(m)
    }

    pub fn carrier(&self) -> &Carrier {
        &self.carrier
    }

    pub fn weights(&self) -> &[W] {
        &self.weights
    }

    pub fn weight(&self, point: usize) -> &W {
        &self.weights[point]
    }

    pub fn into_weights(self) -> Vec<W> {
        self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.weights.iter().all(Zero::is_zero)
    }

    /// Total variation norm `Σ |w_i|`.
    pub fn total_variation(&self) -> f64 {
        self.weights.iter().map(Weight::modulus).sum()
    }

    /// Total mass `μ(1)`; differs from the total variation for signed or complex weights.
    pub fn total_mass(&self) -> W {
        self.weights.iter().cloned().fold(W::zero(), |a, b| a + b)
    }

    pub fn scale(&self, c: &W) -> Self {
        self.map_weights(|w| w.clone() * c.clone())
    }

    pub fn map_weights(&self, f: impl Fn(&W) -> W) -> Self {
        Self {
            carrier: self.carrier.clone(),
            weights: self.weights.iter().map(f).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self, MeasureError> {
        self.carrier.expect(&other.carrier)?;
        Ok(self.zip(other, |a, b| a.clone() + b.clone()))
    }

    pub fn sub(&self, other: &Self) -> Result<Self, MeasureError> {
        self.carrier.expect(&other.carrier)?;
        Ok(self.zip(other, |a, b| a.clone() - b.clone()))
    }

    fn zip(&self, other: &Self, f: impl Fn(&W, &W) -> W) -> Self {
        Self {
            carrier: self.carrier.clone(),
            weights: self
                .weights
                .iter()
                .zip(&other.weights)
                .map(|(a, b)| f(a, b))
                .collect(),
        }
    }

    /// Total variation of `self - other`, as a float.
    pub fn distance(&self, other: &Self) -> Result<f64, MeasureError> {
        Ok(self.sub(other)?.total_variation())
    }

    pub fn to_complex(&self) -> ComplexMeasure {
        Measure {
            carrier: self.carrier.clone(),
            weights: self.weights.iter().map(Weight::to_complex).collect(),
        }
    }
}

impl RationalMeasure {
    /// Exact total variation for real rational weights.
    pub fn total_variation_exact(&self) -> BigRational {
        self.weights
            .iter()
            .fold(BigRational::zero(), |acc, w| acc + w.abs())
    }
}

/// A function on a finite carrier: an element of `L¹(G)` or `L¹(G/H)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Density<W = Complex64> {
    carrier: Carrier,
    values: Vec<W>,
}

pub type DensityFunction = Density<Complex64>;

impl<W: Weight> Density<W> {
    pub fn new(carrier: Carrier, values: Vec<W>) -> Result<Self, MeasureError> {
        if values.len() != carrier.size() {
            return Err(MeasureError::Shape {
                expected: carrier.size(),
                found: values.len(),
            });
        }
        Ok(Self { carrier, values })
    }

    pub fn from_fn(carrier: Carrier, f: impl FnMut(usize) -> W) -> Self {
        let values = (0..carrier.size()).map(f).collect();
        Self { carrier, values }
    }

    pub fn constant(carrier: Carrier, value: W) -> Self {
        let values = vec![value; carrier.size()];
        Self { carrier, values }
    }

    pub fn indicator(carrier: Carrier, point: usize) -> Self {
        Self::from_fn(carrier, |i| if i == point { W::one() } else { W::zero() })
    }

    pub fn carrier(&self) -> &Carrier {
        &self.carrier
    }

    pub fn values(&self) -> &[W] {
        &self.values
    }

    pub fn value(&self, point: usize) -> &W {
        &self.values[point]
    }

    pub fn scale(&self, c: &W) -> Self {
        Self {
            carrier: self.carrier.clone(),
            values: self.values.iter().map(|v| v.clone() * c.clone()).collect(),
        }
    }

    /// Largest pointwise modulus of `self - other`.
    pub fn max_distance(&self, other: &Self) -> Result<f64, MeasureError> {
        self.carrier.expect(&other.carrier)?;
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a.clone() - b.clone()).modulus())
            .fold(0.0, f64::max))
    }
}

/// `μ(f) = Σ f(i) μ({i})`.
pub fn integrate<W: Weight>(mu: &Measure<W>, f: &Density<W>) -> Result<W, MeasureError> {
    mu.carrier.expect(&f.carrier)?;
    Ok(mu
        .weights
        .iter()
        .zip(&f.values)
        .fold(W::zero(), |acc, (w, v)| acc + w.clone() * v.clone()))
}

/// `μ_f` with `dμ_f = f dx` for counting Haar measure, so the weights are `f`.
pub fn from_density<W: Weight>(g: &FiniteGroup, f: &Density<W>) -> Result<Measure<W>, MeasureError> {
    g.carrier().expect(&f.carrier)?;
    Ok(Measure {
        carrier: f.carrier.clone(),
        weights: f.values.clone(),
    })
}

/// Convolution on `M(G)`: `(μ1 ∗ μ2)({z}) = Σ_{xy = z} μ1({x}) μ2({y})`.
pub fn group_convolve<W: Weight>(
    g: &FiniteGroup,
    mu1: &Measure<W>,
    mu2: &Measure<W>,
) -> Result<Measure<W>, MeasureError> {
    let carrier = g.carrier();
    carrier.expect(&mu1.carrier)?;
    carrier.expect(&mu2.carrier)?;
    let mut out = Measure::<W>::zero(mu1.carrier.clone());
    for (x, wx) in mu1.weights.iter().enumerate() {
        if wx.is_zero() {
            continue;
        }
        for (y, wy) in mu2.weights.iter().enumerate() {
            if wy.is_zero() {
                continue;
            }
            let z = g.mul(x, y);
            out.weights[z] = out.weights[z].clone() + wx.clone() * wy.clone();
        }
    }
    Ok(out)
}

/// Function convolution on `L¹(G)`: `(f ∗ g)(x) = Σ_y f(y) g(y⁻¹x)`.
pub fn convolve_functions<W: Weight>(
    g: &FiniteGroup,
    f: &Density<W>,
    h: &Density<W>,
) -> Result<Density<W>, MeasureError> {
    let carrier = g.carrier();
    carrier.expect(&f.carrier)?;
    carrier.expect(&h.carrier)?;
    Ok(Density::from_fn(carrier, |x| {
        (0..g.order()).fold(W::zero(), |acc, y| {
            acc + f.values[y].clone() * h.values[g.mul(g.inv(y), x)].clone()
        })
    }))
}

/// Left action of a measure on a function: `(μ ∗ F)(x) = Σ_y μ({y}) F(y⁻¹x)`.
pub fn measure_on_function<W: Weight>(
    g: &FiniteGroup,
    mu: &Measure<W>,
    f: &Density<W>,
) -> Result<Density<W>, MeasureError> {
    let carrier = g.carrier();
    carrier.expect(&mu.carrier)?;
    carrier.expect(&f.carrier)?;
    Ok(Density::from_fn(carrier, |x| {
        (0..g.order()).fold(W::zero(), |acc, y| {
            acc + mu.weights[y].clone() * f.values[g.mul(g.inv(y), x)].clone()
        })
    }))
}

/// Right action: `(F ∗ μ)(x) = Σ_y F(x y⁻¹) Δ(y⁻¹) μ({y})`, with `Δ ≡ 1`.
pub fn function_on_measure<W: Weight>(
    g: &FiniteGroup,
    f: &Density<W>,
    mu: &Measure<W>,
) -> Result<Density<W>, MeasureError> {
    let carrier = g.carrier();
    carrier.expect(&mu.carrier)?;
    carrier.expect(&f.carrier)?;
    Ok(Density::from_fn(carrier, |x| {
        (0..g.order()).fold(W::zero(), |acc, y| {
            acc + f.values[g.mul(x, g.inv(y))].clone() * mu.weights[y].clone()
        })
    }))
}

/// `‖f‖_p` for counting measure on the carrier.
pub fn counting_lp_norm<W: Weight>(f: &Density<W>, p: f64) -> f64 {
    f.values
        .iter()
        .map(|v| v.modulus().powf(p))
        .sum::<f64>()
        .powf(1.0 / p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::{builtin_catalog, CatalogName};

    fn s3() -> FiniteGroup {
        builtin_catalog(CatalogName::Symmetric, 3).unwrap()
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn point_masses() {
        let g = s3();
        let d = ComplexMeasure::point_mass(g.carrier(), g.identity()).unwrap();
        assert_eq!(d.weights(), &[c(1., 0.), c(0., 0.), c(0., 0.), c(0., 0.), c(0., 0.), c(0., 0.)]);
        assert_eq!(d.total_variation(), 1.0);
        assert!(ComplexMeasure::point_mass(g.carrier(), 6).is_err());
        let one = builtin_catalog(CatalogName::Cyclic, 1).unwrap();
        let unit = ComplexMeasure::point_mass(one.carrier(), 0).unwrap();
        assert_eq!(unit.weights(), &[c(1.0, 0.0)]);
    }

    #[test]
    fn total_variation_values() {
        let g = s3();
        let d = ComplexMeasure::point_mass(g.carrier(), 2).unwrap();
        assert_eq!(d.scale(&c(3.0, -4.0)).total_variation(), 5.0);
        let half = ComplexMeasure::new(
            g.carrier(),
            vec![c(0.5, 0.), c(0., 0.), c(0., 0.), c(0., 0.), c(0.5, 0.), c(0., 0.)],
        )
        .unwrap();
        assert_eq!(half.total_variation(), 1.0);
        assert_eq!(ComplexMeasure::zero(g.carrier()).total_variation(), 0.0);
    }

    #[test]
    fn point_mass_convolution_is_group_product() {
        let g = s3();
        for x in 0..6 {
            for y in 0..6 {
                let dx = ComplexMeasure::point_mass(g.carrier(), x).unwrap();
                let dy = ComplexMeasure::point_mass(g.carrier(), y).unwrap();
                let prod = group_convolve(&g, &dx, &dy).unwrap();
                assert_eq!(prod, ComplexMeasure::point_mass(g.carrier(), g.mul(x, y)).unwrap());
            }
        }
    }

    #[test]
    fn density_measures_convolve_like_functions() {
        let g = s3();
        let f = Density::from_fn(g.carrier(), |i| c(i as f64 - 2.0, 0.5 * i as f64));
        let h = Density::from_fn(g.carrier(), |i| c(1.0 / (i as f64 + 1.0), -(i as f64)));
        let lhs = group_convolve(&g, &from_density(&g, &f).unwrap(), &from_density(&g, &h).unwrap())
            .unwrap();
        let rhs = from_density(&g, &convolve_functions(&g, &f, &h).unwrap()).unwrap();
        assert!(lhs.distance(&rhs).unwrap() < 1e-12);
    }

    #[test]
    fn from_density_examples() {
        let g = s3();
        let ind = Density::indicator(g.carrier(), g.identity());
        assert_eq!(
            from_density(&g, &ind).unwrap(),
            ComplexMeasure::point_mass(g.carrier(), 0).unwrap()
        );
        let ones = Density::constant(g.carrier(), c(1.0, 0.0));
        assert_eq!(from_density(&g, &ones).unwrap().total_variation(), 6.0);
    }

    #[test]
    fn integrate_examples() {
        let g = s3();
        let f = Density::from_fn(g.carrier(), |i| c(i as f64, 1.0));
        let d = ComplexMeasure::point_mass(g.carrier(), 4).unwrap();
        assert_eq!(integrate(&d, &f).unwrap(), c(4.0, 1.0));
        let signed =
            ComplexMeasure::new(g.carrier(), vec![c(1., 0.), c(-1., 0.), c(2., 0.), c(0., 0.), c(0., 0.), c(0., 0.)])
                .unwrap();
        let ones = Density::constant(g.carrier(), c(1.0, 0.0));
        assert_eq!(integrate(&signed, &ones).unwrap(), c(2.0, 0.0));
        assert_eq!(signed.total_variation(), 4.0);
    }

    #[test]
    fn carrier_mismatch_is_reported() {
        let g = s3();
        let h = builtin_catalog(CatalogName::Cyclic, 6).unwrap();
        let a = ComplexMeasure::point_mass(g.carrier(), 0).unwrap();
        let b = ComplexMeasure::point_mass(h.carrier(), 0).unwrap();
        assert!(matches!(
            group_convolve(&g, &a, &b),
            Err(MeasureError::CarrierMismatch { .. })
        ));
    }

    #[test]
    fn exact_total_variation() {
        let g = s3();
        let m = RationalMeasure::new(
            g.carrier(),
            [1, -2, 3, 0, 0, -1]
                .iter()
                .map(|&k| BigRational::from_ratio(k, 3))
                .collect(),
        )
        .unwrap();
        assert_eq!(m.total_variation_exact(), BigRational::from_ratio(7, 3));
    }
}
