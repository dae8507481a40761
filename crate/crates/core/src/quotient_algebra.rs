//! Convolution on `M(G/H)` through hypergroup structure constants, and the
//! `L¹(G/H)` / `Lᵖ(G/H)` structures that sit inside or act on it.
//!
//! The structure constant `c(a, b → z) = (1/|H|) #{h ∈ H : rep(a) h rep(b) ∈ z}`
//! is the closed form of `R_H(σ1_{P_H} ∗ σ2_{P_H})`: lifting spreads each
//! coset uniformly, and the right factor's `H` is absorbed by the coset.

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use thiserror::Error;

use crate::groups::QuotientSpace;
use crate::linalg::{least_squares, solve, RationalMatrix};
use crate::measures::{
    function_on_measure, measure_on_function, ComplexMeasure, Density, Measure, MeasureError,
    Weight,
};
use crate::quotient_ops::{
    lift_density, lift_to_invariant, weighted_average_th, QuotientMeasure, RhoFunction,
};

/// Agreement required between the explicit and operator forms of the
/// `L¹`/`Lᵖ` products, relative to the size of the result.
pub const FORMULA_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AlgebraError {
    #[error("{op}: explicit and operator forms differ by {discrepancy:e}")]
    FormulaMismatch { op: &'static str, discrepancy: f64 },
    #[error(transparent)]
    Measure(#[from] MeasureError),
}

/// Which side the measure multiplies from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    /// `σ ∗ x`
    Left,
    /// `x ∗ σ`
    Right,
}

/// Exact structure constants of `M(G/H)`, stored sparsely.
///
/// Entry `(a, b)` lists `(z, count)` with `c(a, b → z) = count / |H|`,
/// ascending in `z`, zero counts omitted.
#[derive(Clone, Debug)]
pub struct StructureTable {
    quotient: QuotientSpace,
    denominator: u32,
    rows: Vec<Vec<(usize, u32)>>,
}

pub fn structure_table(q: &QuotientSpace) -> StructureTable {
    let reps: Vec<usize> = (0..q.coset_count()).map(|c| q.rep(c)).collect();
    StructureTable::with_representatives(q, &reps)
}

impl StructureTable {
    /// Builds the table from an arbitrary choice of coset representatives.
    pub fn with_representatives(q: &QuotientSpace, reps: &[usize]) -> Self {
        let n = q.coset_count();
        assert_eq!(reps.len(), n);
        let mut rows = Vec::with_capacity(n * n);
        let mut counts = vec![0u32; n];
        for a in 0..n {
            debug_assert_eq!(q.coset_of(reps[a]), a);
            for b in 0..n {
                rows.push(Self::count_row(q, reps[a], reps[b], &mut counts));
            }
        }
        Self {
            quotient: q.clone(),
            denominator: q.subgroup_order() as u32,
            rows,
        }
    }

    fn count_row(q: &QuotientSpace, x: usize, y: usize, counts: &mut [u32]) -> Vec<(usize, u32)> {
        let g = q.group();
        for &h in q.subgroup().members() {
            counts[q.coset_of(g.mul(g.mul(x, h), y))] += 1;
        }
        let mut row = Vec::new();
        for (z, c) in counts.iter_mut().enumerate() {
            if *c > 0 {
                row.push((z, *c));
                *c = 0;
            }
        }
        row
    }

    pub fn quotient(&self) -> &QuotientSpace {
        &self.quotient
    }

    pub fn coset_count(&self) -> usize {
        self.quotient.coset_count()
    }

    /// `|H|`, the common denominator of every constant.
    pub fn denominator(&self) -> u32 {
        self.denominator
    }

    /// Nonzero `(z, count)` entries of row `(a, b)`.
    pub fn row(&self, a: usize, b: usize) -> &[(usize, u32)] {
        &self.rows[a * self.coset_count() + b]
    }

    pub fn count(&self, a: usize, b: usize, z: usize) -> u32 {
        self.row(a, b)
            .iter()
            .find(|(zz, _)| *zz == z)
            .map_or(0, |&(_, c)| c)
    }

    pub fn constant(&self, a: usize, b: usize, z: usize) -> BigRational {
        BigRational::from_ratio(self.count(a, b, z) as i64, self.denominator as i64)
    }

    pub fn constant_f64(&self, a: usize, b: usize, z: usize) -> f64 {
        self.count(a, b, z) as f64 / self.denominator as f64
    }

    /// Dense rational tensor `c[a][b][z]`.
    pub fn dense(&self) -> Vec<Vec<Vec<BigRational>>> {
        let n = self.coset_count();
        (0..n)
            .map(|a| {
                (0..n)
                    .map(|b| (0..n).map(|z| self.constant(a, b, z)).collect())
                    .collect()
            })
            .collect()
    }

    /// `Σ_z c(a, b → z) = 1` for every row, in integer arithmetic.
    pub fn is_row_stochastic(&self) -> bool {
        self.rows
            .iter()
            .all(|row| row.iter().map(|&(_, c)| c as u64).sum::<u64>() == self.denominator as u64)
    }

    /// Recomputes every row from every pair of representatives `(x, y)` and
    /// compares with the stored table.
    pub fn is_representative_independent(&self) -> bool {
        let q = &self.quotient;
        let g = q.group();
        let mut counts = vec![0u32; self.coset_count()];
        (0..g.order()).all(|x| {
            (0..g.order()).all(|y| {
                let row = Self::count_row(q, x, y, &mut counts);
                row.as_slice() == self.row(q.coset_of(x), q.coset_of(y))
            })
        })
    }

    /// True when every row is a point mass.
    pub fn is_deterministic(&self) -> bool {
        self.rows.iter().all(|row| row.len() == 1)
    }
}

/// `(σ1 ∗ σ2)({z}) = Σ_{a,b} σ1({a}) σ2({b}) c(a, b → z)`.
pub fn quotient_convolve<W: Weight>(
    table: &StructureTable,
    sigma1: &Measure<W>,
    sigma2: &Measure<W>,
) -> Result<Measure<W>, MeasureError> {
    let carrier = table.quotient.carrier();
    carrier.expect(sigma1.carrier())?;
    carrier.expect(sigma2.carrier())?;
    let n = table.coset_count();
    let den = table.denominator as i64;
    let mut out = vec![W::zero(); n];
    for (a, wa) in sigma1.weights().iter().enumerate() {
        if wa.is_zero() {
            continue;
        }
        for (b, wb) in sigma2.weights().iter().enumerate() {
            if wb.is_zero() {
                continue;
            }
            let ab = wa.clone() * wb.clone();
            for &(z, c) in table.row(a, b) {
                out[z] = out[z].clone() + ab.clone() * W::from_ratio(c as i64, den);
            }
        }
    }
    Measure::new(carrier, out)
}

/// The left `M(G)`-module action `μ ∗ σ = R_H(μ ∗ σ_{P_H})`. Lifting spreads
/// `σ({bH})` over `rep(b) H`, which `R_H` collapses again, so this reduces to
/// `Σ_x Σ_b μ({x}) σ({b}) δ_{x rep(b) H}`.
pub fn module_action<W: Weight>(
    q: &QuotientSpace,
    mu: &Measure<W>,
    sigma: &Measure<W>,
) -> Result<Measure<W>, MeasureError> {
    let g = q.group();
    g.carrier().expect(mu.carrier())?;
    q.carrier().expect(sigma.carrier())?;
    let mut out = vec![W::zero(); q.coset_count()];
    for (x, wx) in mu.weights().iter().enumerate() {
        if wx.is_zero() {
            continue;
        }
        for (b, wb) in sigma.weights().iter().enumerate() {
            if wb.is_zero() {
                continue;
            }
            let z = q.coset_of(g.mul(x, q.rep(b)));
            out[z] = out[z].clone() + wx.clone() * wb.clone();
        }
    }
    Measure::new(q.carrier(), out)
}

fn max_abs(values: &[Complex64]) -> f64 {
    values.iter().map(|v| v.norm()).fold(0.0, f64::max)
}

fn agree(
    op: &'static str,
    explicit: &Density<Complex64>,
    operator: &Density<Complex64>,
) -> Result<(), AlgebraError> {
    let discrepancy = explicit.max_distance(operator)?;
    let scale = 1.0 + max_abs(explicit.values());
    if discrepancy > FORMULA_TOLERANCE * scale {
        return Err(AlgebraError::FormulaMismatch { op, discrepancy });
    }
    Ok(())
}

/// Convolution on `L¹(G/H, λ)`.
///
/// Evaluates the explicit double sum
/// `Σ_{yH} λ({yH}) (1/|H|) Σ_h φ(yH) ψ(h y⁻¹ x H) ρ(h y⁻¹ x) / ρ(x)`
/// and cross-checks it against `T_H(lift₁ φ ∗ lift₁ ψ)` with
/// `lift₁ φ = (φ ∘ π) ρ`.
pub fn l1_convolve(
    q: &QuotientSpace,
    rho: &RhoFunction,
    lambda: &QuotientMeasure,
    phi: &Density<Complex64>,
    psi: &Density<Complex64>,
) -> Result<Density<Complex64>, AlgebraError> {
    let carrier = q.carrier();
    carrier.expect(phi.carrier())?;
    carrier.expect(psi.carrier())?;
    let g = q.group();
    let hs = q.subgroup().members();
    let inv_h = 1.0 / q.subgroup_order() as f64;

    let explicit = Density::from_fn(carrier.clone(), |xc| {
        let x = q.rep(xc);
        let rho_x = rho.at(q, x);
        let mut acc = Complex64::zero();
        for yc in 0..q.coset_count() {
            let yi = g.inv(q.rep(yc));
            let mut inner = Complex64::zero();
            for &h in hs {
                let t = g.mul(g.mul(h, yi), x);
                inner += psi.value(q.coset_of(t)) * (rho.at(q, t) / rho_x);
            }
            acc += lambda.weight(yc) * inv_h * phi.value(yc) * inner;
        }
        acc
    });

    let f1 = lift_density(q, rho, 1.0, phi)?;
    let f2 = lift_density(q, rho, 1.0, psi)?;
    let conv = crate::measures::convolve_functions(g, &f1, &f2)?;
    let operator = weighted_average_th(q, rho, 1.0, &conv)?;
    agree("l1_convolve", &explicit, &operator)?;
    Ok(explicit)
}

/// `λ_φ`, the measure with density `φ` against `λ`.
pub fn embed_density<W: Weight>(
    lambda: &QuotientMeasure,
    phi: &Density<W>,
) -> Result<Measure<W>, MeasureError> {
    lambda.as_measure().carrier().expect(phi.carrier())?;
    let weights = phi
        .values()
        .iter()
        .zip(lambda.weights())
        .map(|(v, &l)| v.clone() * W::from_f64(l))
        .collect();
    Measure::new(phi.carrier().clone(), weights)
}

/// Density of `λ_φ ∗ σ` (or `σ ∗ λ_φ` for [`Side::Left`]) with respect to `λ`.
///
/// Every product with an embedded density is again absolutely continuous
/// with respect to `λ`; on a finite quotient with `λ > 0` the density is the
/// pointwise quotient.
pub fn ideal_factorize<W: Weight>(
    lambda: &QuotientMeasure,
    table: &StructureTable,
    side: Side,
    phi: &Density<W>,
    sigma: &Measure<W>,
) -> Result<Density<W>, MeasureError> {
    let embedded = embed_density(lambda, phi)?;
    let product = match side {
        Side::Right => quotient_convolve(table, &embedded, sigma)?,
        Side::Left => quotient_convolve(table, sigma, &embedded)?,
    };
    Density::new(
        product.carrier().clone(),
        product
            .weights()
            .iter()
            .zip(lambda.weights())
            .map(|(w, &l)| w.clone() / W::from_f64(l))
            .collect(),
    )
}

/// `σ ∗ φ` (or `φ ∗ σ`) for `φ ∈ Lᵖ(G/H)`.
///
/// Left: `Σ_{yH} σ({yH}) (1/|H|) Σ_h φ(h y⁻¹ x H) (ρ(h y⁻¹ x)/ρ(x))^{1/p}`.
/// Right: `Σ_{yH} Δ(y⁻¹) (1/|H|) Σ_h φ(x h y⁻¹ H) (ρ(x h y⁻¹)/ρ(x))^{1/p} σ({yH})`.
/// Both are checked against `T_H^p` of the group-side product of `σ_{P_H}`
/// with `lift_p φ = (φ ∘ π) ρ^{1/p}`.
pub fn lp_action(
    q: &QuotientSpace,
    rho: &RhoFunction,
    side: Side,
    sigma: &ComplexMeasure,
    phi: &Density<Complex64>,
    p: f64,
) -> Result<Density<Complex64>, AlgebraError> {
    let carrier = q.carrier();
    carrier.expect(sigma.carrier())?;
    carrier.expect(phi.carrier())?;
    let g = q.group();
    let hs = q.subgroup().members();
    let inv_h = 1.0 / q.subgroup_order() as f64;
    let exponent = 1.0 / p;

    let explicit = Density::from_fn(carrier.clone(), |xc| {
        let x = q.rep(xc);
        let rho_x = rho.at(q, x);
        let mut acc = Complex64::zero();
        for yc in 0..q.coset_count() {
            let s = sigma.weight(yc);
            if s.is_zero() {
                continue;
            }
            let y = q.rep(yc);
            let yi = g.inv(y);
            let mut inner = Complex64::zero();
            for &h in hs {
                let t = match side {
                    Side::Left => g.mul(g.mul(h, yi), x),
                    Side::Right => g.mul(g.mul(x, h), yi),
                };
                inner += phi.value(q.coset_of(t)) * (rho.at(q, t) / rho_x).powf(exponent);
            }
            let modular = match side {
                Side::Left => 1.0,
                Side::Right => g.modular_function(yi),
            };
            acc += s * inner * (modular * inv_h);
        }
        acc
    });

    let mu = lift_to_invariant(q, sigma)?;
    let f = lift_density(q, rho, p, phi)?;
    let group_side = match side {
        Side::Left => measure_on_function(g, &mu, &f)?,
        Side::Right => function_on_measure(g, &f, &mu)?,
    };
    let operator = weighted_average_th(q, rho, p, &group_side)?;
    agree("lp_action", &explicit, &operator)?;
    Ok(explicit)
}

/// `(Σ |φ|^p λ)^{1/p}`.
pub fn lp_norm(lambda: &QuotientMeasure, phi: &Density<Complex64>, p: f64) -> f64 {
    phi.values()
        .iter()
        .zip(lambda.weights())
        .map(|(v, &l)| v.norm().powf(p) * l)
        .sum::<f64>()
        .powf(1.0 / p)
}

/// Outcome of exact identity solving.
#[derive(Clone, Debug, PartialEq)]
pub struct IdentitySearch {
    /// A solution when the system is consistent.
    pub solution: Option<Vec<BigRational>>,
    /// Dimension of the solution set (zero when inconsistent).
    pub nullity: usize,
    /// Euclidean least-squares residual; exactly zero iff consistent.
    pub residual: f64,
    pub equations: usize,
}

impl IdentitySearch {
    pub fn found(&self) -> bool {
        self.solution.is_some()
    }
}

fn identity_system(table: &StructureTable, left: bool, right: bool) -> IdentitySearch {
    let n = table.coset_count();
    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    for b in 0..n {
        for z in 0..n {
            let target = BigRational::from_ratio(i64::from(b == z), 1);
            // σ ∗ δ_b = δ_b: Σ_a σ_a c(a, b → z) = [z = b]
            if left {
                rows.push((0..n).map(|a| table.constant(a, b, z)).collect());
                rhs.push(target.clone());
            }
            // δ_b ∗ σ = δ_b: Σ_a σ_a c(b, a → z) = [z = b]
            if right {
                rows.push((0..n).map(|a| table.constant(b, a, z)).collect());
                rhs.push(target);
            }
        }
    }
    let a = RationalMatrix::from_rows(rows);
    let equations = a.rows();
    match solve(&a, &rhs) {
        Some(sol) => IdentitySearch {
            solution: Some(sol.x),
            nullity: sol.nullity,
            residual: 0.0,
            equations,
        },
        None => {
            let (_, res2) = least_squares(&a, &rhs);
            IdentitySearch {
                solution: None,
                nullity: 0,
                residual: res2.to_f64().unwrap_or(f64::NAN).sqrt(),
                equations,
            }
        }
    }
}

/// Solves `σ ∗ δ_{bH} = δ_{bH}` for all `b` exactly (`n²` equations, `n`
/// unknowns).
pub fn find_left_identity(table: &StructureTable) -> IdentitySearch {
    identity_system(table, true, false)
}

/// Solves for a two-sided identity.
pub fn find_two_sided_identity(table: &StructureTable) -> IdentitySearch {
    identity_system(table, true, true)
}

/// Exact test of `σ ∗ τ = τ` on every point mass `τ`.
pub fn is_left_identity(table: &StructureTable, sigma: &Measure<BigRational>) -> bool {
    let carrier = table.quotient.carrier();
    (0..table.coset_count()).all(|b| {
        let delta = Measure::point_mass(carrier.clone(), b).expect("coset index");
        quotient_convolve(table, sigma, &delta).is_ok_and(|p| p == delta)
    })
}
