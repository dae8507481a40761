//! Rho-functions, the quasi-invariant measure they induce on `G/H`, and the
//! operators moving functions and measures between `G` and `G/H`.
//!
//! Normalizations: Haar measure on `G` is counting measure, Haar measure on
//! `H` has total mass one. Hence `P_H(φ ∘ π) = φ`, lifted measures spread
//! `σ({xH}) / |H|` over each coset, and `λ({xH}) = |H| ρ(xH)`.

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::groups::QuotientSpace;
use crate::linalg::{nullspace, RationalMatrix};
use crate::measures::{ComplexMeasure, Density, Measure, MeasureError, Weight};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RhoError {
    #[error("rho must be positive, found {value} at {at}")]
    NonPositive { at: String, value: f64 },
    #[error("rho is not constant on left cosets: rho({x}) != rho({x}*{h})")]
    NotCosetConstant { x: String, h: String },
    #[error("expected {expected} rho values, found {found}")]
    Shape { expected: usize, found: usize },
}

/// A rho-function for `(G, H)`, stored per coset.
///
/// On a finite group both modular functions are one, so the defining relation
/// `ρ(xh) = Δ_H(h) Δ_G(h)⁻¹ ρ(x)` says exactly that `ρ` is constant on left
/// cosets.
#[derive(Clone, Debug, PartialEq)]
pub struct RhoFunction {
    values: Vec<f64>,
}

impl RhoFunction {
    /// `ρ ≡ 1`, the `G`-invariant case.
    pub fn one(q: &QuotientSpace) -> Self {
        Self {
            values: vec![1.0; q.coset_count()],
        }
    }

    pub fn from_coset_values(q: &QuotientSpace, values: Vec<f64>) -> Result<Self, RhoError> {
        let rho = Self { values };
        validate_rho(q, &rho)?;
        Ok(rho)
    }

    /// Raw per-element input; rejected unless it is constant on cosets.
    pub fn from_element_values(q: &QuotientSpace, values: &[f64]) -> Result<Self, RhoError> {
        let g = q.group();
        if values.len() != g.order() {
            return Err(RhoError::Shape {
                expected: g.order(),
                found: values.len(),
            });
        }
        for (x, &v) in values.iter().enumerate() {
            if !(v > 0.0) || !v.is_finite() {
                return Err(RhoError::NonPositive {
                    at: g.label(x).to_string(),
                    value: v,
                });
            }
        }
        for x in 0..g.order() {
            for &h in q.subgroup().members() {
                let xh = g.mul(x, h);
                let expected = q.subgroup().modular_function(h) / g.modular_function(h) * values[x];
                if values[xh] != expected {
                    return Err(RhoError::NotCosetConstant {
                        x: g.label(x).to_string(),
                        h: g.label(h).to_string(),
                    });
                }
            }
        }
        let values = (0..q.coset_count()).map(|c| values[q.rep(c)]).collect();
        Ok(Self { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn at_coset(&self, coset: usize) -> f64 {
        self.values[coset]
    }

    /// `ρ(x)` for a group element.
    pub fn at(&self, q: &QuotientSpace, x: usize) -> f64 {
        self.values[q.coset_of(x)]
    }

    pub fn is_constant_one(&self) -> bool {
        self.values.iter().all(|&v| v == 1.0)
    }
}

/// Positivity and the rho relation, checked over every `(x, h)`.
pub fn validate_rho(q: &QuotientSpace, rho: &RhoFunction) -> Result<(), RhoError> {
    if rho.values.len() != q.coset_count() {
        return Err(RhoError::Shape {
            expected: q.coset_count(),
            found: rho.values.len(),
        });
    }
    for (c, &v) in rho.values.iter().enumerate() {
        if !(v > 0.0) || !v.is_finite() {
            return Err(RhoError::NonPositive {
                at: q.label(c).to_string(),
                value: v,
            });
        }
    }
    let g = q.group();
    for x in 0..g.order() {
        for &h in q.subgroup().members() {
            let ratio = q.subgroup().modular_function(h) / g.modular_function(h);
            if rho.at(q, g.mul(x, h)) != ratio * rho.at(q, x) {
                return Err(RhoError::NotCosetConstant {
                    x: g.label(x).to_string(),
                    h: g.label(h).to_string(),
                });
            }
        }
    }
    Ok(())
}

/// The strongly quasi-invariant measure `λ` on `G/H` attached to a rho-function.
#[derive(Clone, Debug, PartialEq)]
pub struct QuotientMeasure {
    measure: ComplexMeasure,
    weights: Vec<f64>,
}

impl QuotientMeasure {
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn weight(&self, coset: usize) -> f64 {
        self.weights[coset]
    }

    pub fn as_measure(&self) -> &ComplexMeasure {
        &self.measure
    }

    /// Exact check of `λ_x({yH}) / λ({yH}) = ρ(xy) / ρ(y)` with `λ_x(E) = λ(xE)`,
    /// over all `x, y`. Returns the first failing pair.
    pub fn check_quasi_invariance(
        &self,
        q: &QuotientSpace,
        rho: &RhoFunction,
    ) -> Result<(), (usize, usize)> {
        let g = q.group();
        let lam: Vec<BigRational> = self.weights.iter().map(|&w| BigRational::from_f64(w)).collect();
        let r: Vec<BigRational> = rho.values.iter().map(|&w| BigRational::from_f64(w)).collect();
        for x in 0..g.order() {
            for y in 0..g.order() {
                let translated = &lam[q.coset_of(g.mul(x, y))];
                let lhs = translated / &lam[q.coset_of(y)];
                let rhs = &r[q.coset_of(g.mul(x, y))] / &r[q.coset_of(y)];
                if lhs != rhs {
                    return Err((x, y));
                }
            }
        }
        Ok(())
    }
}

/// `λ({xH}) = |H| ρ(xH)`.
pub fn quasi_invariant_lambda(q: &QuotientSpace, rho: &RhoFunction) -> QuotientMeasure {
    let h = q.subgroup_order() as f64;
    let weights: Vec<f64> = rho.values.iter().map(|&r| h * r).collect();
    let measure = Measure::new(
        q.carrier(),
        weights.iter().map(|&w| Complex64::new(w, 0.0)).collect(),
    )
    .expect("one weight per coset");
    QuotientMeasure { measure, weights }
}

/// `P_H f(xH) = (1/|H|) Σ_{h ∈ H} f(xh)`.
pub fn average_ph<W: Weight>(q: &QuotientSpace, f: &Density<W>) -> Result<Density<W>, MeasureError> {
    q.group().carrier().expect(f.carrier())?;
    let inv_h = W::from_ratio(1, q.subgroup_order() as i64);
    Ok(Density::from_fn(q.carrier(), |c| {
        q.coset_members(c)
            .iter()
            .fold(W::zero(), |acc, &x| acc + f.value(x).clone())
            * inv_h.clone()
    }))
}

/// `T_H^p f(xH) = (1/|H|) Σ_h f(xh) / ρ(xh)^{1/p}`; `p = 1` is `T_H`.
pub fn weighted_average_th(
    q: &QuotientSpace,
    rho: &RhoFunction,
    p: f64,
    f: &Density<Complex64>,
) -> Result<Density<Complex64>, MeasureError> {
    q.group().carrier().expect(f.carrier())?;
    let h = q.subgroup_order() as f64;
    Ok(Density::from_fn(q.carrier(), |c| {
        let sum: Complex64 = q
            .coset_members(c)
            .iter()
            .map(|&x| f.value(x) / rho.at(q, x).powf(1.0 / p))
            .sum();
        sum / h
    }))
}

/// `φ ∘ π_H`.
pub fn compose_with_projection<W: Weight>(
    q: &QuotientSpace,
    phi: &Density<W>,
) -> Result<Density<W>, MeasureError> {
    q.carrier().expect(phi.carrier())?;
    Ok(Density::from_fn(q.group().carrier(), |x| {
        phi.value(q.coset_of(x)).clone()
    }))
}

/// `(φ ∘ π_H) · ρ^{1/p}`, the function-side lift inverted by `T_H^p`.
pub fn lift_density(
    q: &QuotientSpace,
    rho: &RhoFunction,
    p: f64,
    phi: &Density<Complex64>,
) -> Result<Density<Complex64>, MeasureError> {
    q.carrier().expect(phi.carrier())?;
    Ok(Density::from_fn(q.group().carrier(), |x| {
        phi.value(q.coset_of(x)) * rho.at(q, x).powf(1.0 / p)
    }))
}

/// Both sides of `Σ_G f = Σ_{G/H} T_H f · λ`.
pub fn quotient_integral_check(
    q: &QuotientSpace,
    rho: &RhoFunction,
    f: &Density<Complex64>,
) -> Result<(Complex64, Complex64), MeasureError> {
    let lhs: Complex64 = f.values().iter().sum();
    let th = weighted_average_th(q, rho, 1.0, f)?;
    let lambda = quasi_invariant_lambda(q, rho);
    let rhs = (0..q.coset_count())
        .map(|c| th.value(c) * lambda.weight(c))
        .sum();
    Ok((lhs, rhs))
}

/// Pushforward along `π_H`: `(R_H μ)({xH}) = Σ_{y ∈ xH} μ({y})`.
pub fn pushforward_rh<W: Weight>(
    q: &QuotientSpace,
    mu: &Measure<W>,
) -> Result<Measure<W>, MeasureError> {
    q.group().carrier().expect(mu.carrier())?;
    let weights = (0..q.coset_count())
        .map(|c| {
            q.coset_members(c)
                .iter()
                .fold(W::zero(), |acc, &y| acc + mu.weight(y).clone())
        })
        .collect();
    Measure::new(q.carrier(), weights)
}

/// `σ_{P_H} = σ ∘ P_H`: weight `σ({xH}) / |H|` on every element of `xH`.
pub fn lift_to_invariant<W: Weight>(
    q: &QuotientSpace,
    sigma: &Measure<W>,
) -> Result<Measure<W>, MeasureError> {
    q.carrier().expect(sigma.carrier())?;
    let inv_h = W::from_ratio(1, q.subgroup_order() as i64);
    let g = q.group();
    let weights = (0..g.order())
        .map(|x| sigma.weight(q.coset_of(x)).clone() * inv_h.clone())
        .collect();
    Measure::new(g.carrier(), weights)
}

/// Membership in `M(G:H)`: weights constant on every left coset, within `tol`.
pub fn membership_mgh<W: Weight>(q: &QuotientSpace, mu: &Measure<W>, tol: f64) -> bool {
    if q.group().carrier() != *mu.carrier() {
        return false;
    }
    (0..q.coset_count()).all(|c| {
        let members = q.coset_members(c);
        let first = mu.weight(members[0]);
        members
            .iter()
            .all(|&x| (mu.weight(x).clone() - first.clone()).modulus() <= tol)
    })
}

/// Exact membership in `M(G:H)`.
pub fn membership_mgh_exact<W: Weight>(q: &QuotientSpace, mu: &Measure<W>) -> bool {
    q.group().carrier() == *mu.carrier()
        && (0..q.coset_count()).all(|c| {
            let members = q.coset_members(c);
            members.iter().all(|&x| mu.weight(x) == mu.weight(members[0]))
        })
}

/// `R_h f(x) = f(xh)`.
pub fn right_translate<W: Weight>(q: &QuotientSpace, f: &Density<W>, h: usize) -> Density<W> {
    let g = q.group();
    Density::from_fn(f.carrier().clone(), |x| f.value(g.mul(x, h)).clone())
}

/// The defining functional identity of `M(G:H)`: `μ(R_h f) = μ(f)` for every
/// `h ∈ H` and every point-indicator `f`; returns the largest defect.
pub fn right_invariance_defect<W: Weight>(q: &QuotientSpace, mu: &Measure<W>) -> f64 {
    let g = q.group();
    let mut worst: f64 = 0.0;
    for x in 0..g.order() {
        let f = Density::<W>::indicator(g.carrier(), x);
        let base = crate::measures::integrate(mu, &f).expect("same carrier");
        for &h in q.subgroup().members() {
            let moved = crate::measures::integrate(mu, &right_translate(q, &f, h))
                .expect("same carrier");
            worst = worst.max((moved - base.clone()).modulus());
        }
    }
    worst
}

/// Literal solution space of `μ(f ∗ φ_{π_H}) = μ(f)`, with equations indexed
/// by point-indicators `f = δ_x` on `G` and coset indicators `φ`.
#[derive(Clone, Debug, PartialEq)]
pub struct MhgSpace {
    pub basis: Vec<Vec<BigRational>>,
    pub equations: usize,
}

impl MhgSpace {
    pub fn dimension(&self) -> usize {
        self.basis.len()
    }
}

/// Coefficient row of the equation for `(x, c)`: `(δ_x ∗ 1_c∘π)(z) − δ_x(z)`.
/// Since `(δ_x ∗ F)(z) = F(x⁻¹ z)`, the first term is `[x⁻¹z ∈ c]`.
pub fn mhg_equation_row(q: &QuotientSpace, x: usize, coset: usize) -> Vec<BigRational> {
    let g = q.group();
    let xi = g.inv(x);
    (0..g.order())
        .map(|z| {
            let conv = i64::from(q.coset_of(g.mul(xi, z)) == coset);
            let point = i64::from(z == x);
            BigRational::from_ratio(conv - point, 1)
        })
        .collect()
}

pub fn solve_mhg_space(q: &QuotientSpace) -> MhgSpace {
    let g = q.group();
    let mut rows = Vec::with_capacity(g.order() * q.coset_count());
    for x in 0..g.order() {
        for c in 0..q.coset_count() {
            rows.push(mhg_equation_row(q, x, c));
        }
    }
    let equations = rows.len();
    let a = RationalMatrix::from_rows(rows);
    MhgSpace {
        basis: nullspace(&a),
        equations,
    }
}

/// Largest violation of the literal `M_H(G)` equations by a float measure.
pub fn mhg_defect(q: &QuotientSpace, mu: &ComplexMeasure) -> f64 {
    let g = q.group();
    let mut worst: f64 = 0.0;
    for x in 0..g.order() {
        for c in 0..q.coset_count() {
            let row = mhg_equation_row(q, x, c);
            let v: Complex64 = row
                .iter()
                .zip(mu.weights())
                .filter(|(r, _)| !r.is_zero())
                .map(|(r, w)| w * if r.is_one() { 1.0 } else { -1.0 })
                .sum();
            worst = worst.max(v.norm());
        }
    }
    worst
}
