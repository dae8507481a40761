use num_complex::{Complex, Complex64};
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde_json::{json, Map, Value};

use super::random::{self, CheckRng, Sample};
use super::{CheckId, CheckSpec, Context, Mode, Status};
use crate::groups::QuotientSpace;
use crate::io::measure_to_json;
use crate::measures::{
    from_density, group_convolve, Density, Measure, RationalMeasure, Weight,
};
use crate::quotient_algebra::{
    embed_density, find_left_identity, find_two_sided_identity, ideal_factorize,
    is_left_identity, l1_convolve, lp_action, lp_norm, module_action, quotient_convolve,
    IdentitySearch, Side,
};
use crate::quotient_ops::{
    average_ph, compose_with_projection, lift_density, lift_to_invariant, membership_mgh,
    membership_mgh_exact, mhg_equation_row, pushforward_rh, quasi_invariant_lambda,
    quotient_integral_check, right_invariance_defect, solve_mhg_space, weighted_average_th,
    RhoFunction,
};

type Exact = Complex<BigRational>;

pub(super) struct Outcome {
    pub status: Status,
    pub max_residual: f64,
    pub trials: usize,
    pub tolerance: f64,
    pub counterexample: Option<Value>,
    pub notes: String,
}

struct Tracker {
    tol: f64,
    worst: f64,
    failures: usize,
    counterexample: Option<Value>,
}

impl Tracker {
    fn new(tol: f64) -> Self {
        Self {
            tol,
            worst: 0.0,
            failures: 0,
            counterexample: None,
        }
    }

    fn observe(&mut self, residual: f64, witness: impl FnOnce() -> Value) {
        let r = if residual.is_nan() { f64::INFINITY } else { residual };
        self.worst = self.worst.max(r);
        if r > self.tol {
            self.flag(witness);
        }
    }

    fn flag(&mut self, witness: impl FnOnce() -> Value) {
        self.failures += 1;
        if self.counterexample.is_none() {
            self.counterexample = Some(witness());
        }
    }

    fn verdict(self, trials: usize, notes: String) -> Outcome {
        Outcome {
            status: if self.failures > 0 { Status::Fail } else { Status::Pass },
            max_residual: self.worst,
            trials,
            tolerance: self.tol,
            counterexample: self.counterexample,
            notes,
        }
    }

    /// Probes report `info` unless a consistency condition failed.
    fn finding(self, trials: usize, notes: String) -> Outcome {
        let mut out = self.verdict(trials, notes);
        if out.status == Status::Pass {
            out.status = Status::Info;
        }
        out
    }
}

/// Built-in tolerance of each check; `--tol` may only tighten it.
fn pinned_tolerance(id: CheckId) -> Option<f64> {
    match id {
        CheckId::P3Lift
        | CheckId::P4Isometry
        | CheckId::D6Conv
        | CheckId::L11RightId
        | CheckId::P16Embed
        | CheckId::L17Compat
        | CheckId::T18Ideal => Some(1e-12),
        CheckId::T8Algebra | CheckId::P19Lp | CheckId::W0Weil => Some(1e-10),
        CheckId::C13UniqueId | CheckId::C14Involution | CheckId::P15Normality => Some(0.0),
        CheckId::P1Mhg | CheckId::P2Density => None,
    }
}

pub(super) fn run(spec: &CheckSpec, ctx: &Context, rng: &mut CheckRng) -> Outcome {
    let tol = pinned_tolerance(spec.id).map_or(spec.tolerance, |p| p.min(spec.tolerance));
    let n = spec.trials;
    let exact = spec.mode == Mode::Exact;
    match spec.id {
        CheckId::P1Mhg if exact => p1_mhg::<Exact>(ctx, n, tol, rng),
        CheckId::P1Mhg => p1_mhg::<Complex64>(ctx, n, tol, rng),
        CheckId::P2Density if exact => p2_density::<Exact>(ctx, n, tol, rng),
        CheckId::P2Density => p2_density::<Complex64>(ctx, n, tol, rng),
        CheckId::P3Lift if exact => p3_lift::<Exact>(ctx, n, tol, rng),
        CheckId::P3Lift => p3_lift::<Complex64>(ctx, n, tol, rng),
        CheckId::P4Isometry if exact => p4_isometry::<BigRational>(ctx, n, tol, rng),
        CheckId::P4Isometry => p4_isometry::<Complex64>(ctx, n, tol, rng),
        CheckId::D6Conv if exact => d6_conv::<Exact>(ctx, n, tol, rng),
        CheckId::D6Conv => d6_conv::<Complex64>(ctx, n, tol, rng),
        CheckId::T8Algebra if exact => t8_algebra::<Exact>(ctx, n, tol, rng),
        CheckId::T8Algebra => t8_algebra::<Complex64>(ctx, n, tol, rng),
        CheckId::L11RightId if exact => l11_right_id::<Exact>(ctx, n, tol, rng),
        CheckId::L11RightId => l11_right_id::<Complex64>(ctx, n, tol, rng),
        CheckId::C13UniqueId => c13_unique_id(ctx),
        CheckId::C14Involution => c14_involution(ctx),
        CheckId::P15Normality => p15_normality(ctx),
        CheckId::P16Embed if exact => p16_embed::<BigRational>(ctx, n, tol, rng),
        CheckId::P16Embed => p16_embed::<Complex64>(ctx, n, tol, rng),
        CheckId::L17Compat if exact => l17_compat::<Exact>(ctx, n, tol, rng),
        CheckId::L17Compat => l17_compat::<Complex64>(ctx, n, tol, rng),
        CheckId::T18Ideal if exact => t18_ideal::<Exact>(ctx, n, tol, rng),
        CheckId::T18Ideal => t18_ideal::<Complex64>(ctx, n, tol, rng),
        CheckId::P19Lp => p19_lp(ctx, n, tol, rng, exact),
        CheckId::W0Weil if exact => w0_weil::<Exact>(ctx, n, tol, rng),
        CheckId::W0Weil => w0_weil::<Complex64>(ctx, n, tol, rng),
    }
}

// ---- helpers ---------------------------------------------------------------

fn mjson<W: Weight>(m: &Measure<W>) -> Value {
    measure_to_json(&m.to_complex())
}

fn djson<W: Weight>(d: &Density<W>) -> Value {
    let map: Map<String, Value> = d
        .carrier()
        .labels()
        .iter()
        .zip(d.values())
        .map(|(l, v)| {
            let c = v.to_complex();
            (l.clone(), json!([c.re, c.im]))
        })
        .collect();
    Value::Object(map)
}

fn rjson(q: &QuotientSpace, rho: &RhoFunction) -> Value {
    let map: Map<String, Value> = q
        .labels()
        .iter()
        .zip(rho.values())
        .map(|(l, v)| (l.clone(), json!(v)))
        .collect();
    Value::Object(map)
}

/// Zero exactly when equal; otherwise the total-variation distance, kept
/// positive so that exact-mode inequality is never rounded away.
fn gap<W: Weight>(a: &Measure<W>, b: &Measure<W>) -> f64 {
    if a == b {
        0.0
    } else {
        a.distance(b).unwrap_or(f64::INFINITY).max(f64::MIN_POSITIVE)
    }
}

fn dgap<W: Weight>(a: &Density<W>, b: &Density<W>) -> f64 {
    if a == b {
        0.0
    } else {
        a.max_distance(b).unwrap_or(f64::INFINITY).max(f64::MIN_POSITIVE)
    }
}

/// `gap` relative to `1 + ‖b‖`, for quantities that scale with `ρ`.
fn rel_gap<W: Weight>(a: &Measure<W>, b: &Measure<W>) -> f64 {
    gap(a, b) / (1.0 + b.total_variation())
}

/// The catalog `ρ` on even trials, a fresh random `ρ` on odd ones.
fn trial_rho(ctx: &Context, t: usize, rng: &mut CheckRng) -> RhoFunction {
    if t.is_multiple_of(2) {
        ctx.rho.clone()
    } else {
        random::rho(rng, &ctx.quotient)
    }
}

fn point_masses<W: Weight>(q: &QuotientSpace) -> Vec<Measure<W>> {
    (0..q.coset_count())
        .map(|c| Measure::point_mass(q.carrier(), c).expect("coset index"))
        .collect()
}

fn describe_identity(q: &QuotientSpace, found: &IdentitySearch) -> String {
    match &found.solution {
        Some(x) => {
            let terms: Vec<String> = x
                .iter()
                .enumerate()
                .filter(|(_, v)| !v.is_zero())
                .map(|(c, v)| format!("{}*{}", v, q.label(c)))
                .collect();
            let shown = if terms.is_empty() { "0".to_string() } else { terms.join(" + ") };
            format!(
                "solution {} (solution space dimension {}, {} equations)",
                shown, found.nullity, found.equations
            )
        }
        None => format!(
            "inconsistent over {} equations, least-squares residual {:.6e}",
            found.equations, found.residual
        ),
    }
}

fn solution_measure(q: &QuotientSpace, x: &[BigRational]) -> RationalMeasure {
    Measure::new(q.carrier(), x.to_vec()).expect("one unknown per coset")
}

// ---- checks ----------------------------------------------------------------

/// Literal `M_H(G)` system and the left-ideal property of `M(G:H)`.
fn p1_mhg<W: Sample>(ctx: &Context, trials: usize, tol: f64, rng: &mut CheckRng) -> Outcome {
    let q = &ctx.quotient;
    let g = q.group();
    let space = solve_mhg_space(q);
    let rows: Vec<Vec<W>> = (0..g.order())
        .flat_map(|x| (0..q.coset_count()).map(move |c| (x, c)))
        .map(|(x, c)| mhg_equation_row(q, x, c).iter().map(W::from_rational).collect())
        .collect();
    let basis: Vec<Measure<W>> = space
        .basis
        .iter()
        .map(|v| Measure::new(g.carrier(), v.iter().map(W::from_rational).collect()).expect("|G| entries"))
        .collect();
    let defect = |mu: &Measure<W>| {
        rows.iter()
            .map(|row| {
                row.iter()
                    .zip(mu.weights())
                    .fold(W::zero(), |acc, (r, w)| acc + r.clone() * w.clone())
                    .modulus()
            })
            .fold(0.0, f64::max)
    };

    let mut tr = Tracker::new(tol);
    for b in &basis {
        tr.observe(defect(b), || json!({ "basis_vector": mjson(b) }));
    }
    for _ in 0..trials {
        let nu: Measure<W> = random::measure(rng, g.carrier());
        for b in &basis {
            let prod = group_convolve(g, &nu, b).expect("group carrier");
            tr.observe(defect(&prod), || {
                json!({ "property": "literal space closed under left convolution", "nu": mjson(&nu), "mu": mjson(b) })
            });
        }
        let sigma: Measure<W> = random::measure(rng, q.carrier());
        let mu = lift_to_invariant(q, &sigma).expect("quotient carrier");
        let prod = group_convolve(g, &nu, &mu).expect("group carrier");
        tr.observe(right_invariance_defect(q, &prod), || {
            json!({ "property": "M(G:H) closed under left convolution", "nu": mjson(&nu), "mu": mjson(&mu) })
        });
    }
    let notes = format!(
        "literal M_H(G) system: {} equations in {} unknowns, solution dimension {}; \
         M(G:H) and the literal space are closed under left convolution on {} samples",
        space.equations,
        g.order(),
        space.dimension(),
        trials
    );
    tr.finding(trials, notes)
}

/// `M(G:H)` is exactly the set of `μ_f` with `f` right `H`-invariant.
fn p2_density<W: Sample>(ctx: &Context, trials: usize, tol: f64, rng: &mut CheckRng) -> Outcome {
    let q = &ctx.quotient;
    let g = q.group();
    let exact = std::any::TypeId::of::<W>() != std::any::TypeId::of::<Complex64>();
    let member = |mu: &Measure<W>| {
        if exact {
            membership_mgh_exact(q, mu)
        } else {
            membership_mgh(q, mu, tol)
        }
    };
    let mut tr = Tracker::new(tol);
    for _ in 0..trials {
        let phi: Density<W> = random::density(rng, q.carrier());
        let f = compose_with_projection(q, &phi).expect("quotient carrier");
        let mu_f = from_density(g, &f).expect("group carrier");
        tr.observe(right_invariance_defect(q, &mu_f), || json!({ "f": djson(&f) }));
        if !member(&mu_f) {
            tr.flag(|| json!({ "property": "mu_f in M(G:H)", "f": djson(&f) }));
        }

        let sigma: Measure<W> = random::measure(rng, q.carrier());
        let mu = lift_to_invariant(q, &sigma).expect("quotient carrier");
        let dens = Density::new(g.carrier(), mu.weights().to_vec()).expect("group carrier");
        let back = compose_with_projection(q, &average_ph(q, &dens).expect("group carrier"))
            .expect("quotient carrier");
        tr.observe(dgap(&back, &dens), || {
            json!({ "property": "density of an invariant measure is invariant", "mu": mjson(&mu) })
        });
        if from_density(g, &dens).expect("group carrier") != mu {
            tr.flag(|| json!({ "property": "mu = mu_f", "mu": mjson(&mu) }));
        }

        let nu: Measure<W> = random::measure(rng, g.carrier());
        let functional = right_invariance_defect(q, &nu) <= tol;
        if member(&nu) != functional {
            tr.flag(|| json!({ "property": "predicate equivalence", "nu": mjson(&nu) }));
        }
    }
    tr.verdict(trials, String::new())
}

/// `R_H ∘ lift = id`, `lift ∘ R_H = id` on `M(G:H)`, and `lift σ = σ ∘ P_H`.
fn p3_lift<W: Sample>(ctx: &Context, trials: usize, tol: f64, rng: &mut CheckRng) -> Outcome {
    let q = &ctx.quotient;
    let g = q.group();
    let mut tr = Tracker::new(tol);
    for _ in 0..trials {
        let sigma: Measure<W> = random::measure(rng, q.carrier());
        let lifted = lift_to_invariant(q, &sigma).expect("quotient carrier");
        let back = pushforward_rh(q, &lifted).expect("group carrier");
        tr.observe(gap(&back, &sigma), || json!({ "property": "R_H(lift s) = s", "sigma": mjson(&sigma) }));
        tr.observe(right_invariance_defect(q, &lifted), || {
            json!({ "property": "lift s in M(G:H)", "sigma": mjson(&sigma) })
        });
        let relifted = lift_to_invariant(q, &back).expect("quotient carrier");
        tr.observe(gap(&relifted, &lifted), || {
            json!({ "property": "lift(R_H mu) = mu on M(G:H)", "mu": mjson(&lifted) })
        });
        let f: Density<W> = random::density(rng, g.carrier());
        let lhs = crate::measures::integrate(&lifted, &f).expect("group carrier");
        let rhs = crate::measures::integrate(&sigma, &average_ph(q, &f).expect("group carrier"))
            .expect("quotient carrier");
        let d = if lhs == rhs { 0.0 } else { (lhs - rhs).modulus().max(f64::MIN_POSITIVE) };
        tr.observe(d, || json!({ "property": "lift s (f) = s(P_H f)", "sigma": mjson(&sigma), "f": djson(&f) }));
    }
    tr.verdict(trials, String::new())
}

/// Norm comparisons that are exact for real rational weights.
trait Normed: Sample {
    /// `‖a‖ − ‖b‖`; exactly zero on equality in rational arithmetic.
    fn norm_diff(a: &Measure<Self>, b: &Measure<Self>) -> f64;
    /// `‖λ_φ‖ − Σ |φ| λ`.
    fn embed_diff(embedded: &Measure<Self>, phi: &Density<Self>, lambda: &[f64]) -> f64;
}

impl Normed for Complex64 {
    fn norm_diff(a: &Measure<Self>, b: &Measure<Self>) -> f64 {
        a.total_variation() - b.total_variation()
    }

    fn embed_diff(embedded: &Measure<Self>, phi: &Density<Self>, lambda: &[f64]) -> f64 {
        let l1: f64 = phi.values().iter().zip(lambda).map(|(v, l)| v.norm() * l).sum();
        embedded.total_variation() - l1
    }
}

impl Normed for BigRational {
    fn norm_diff(a: &Measure<Self>, b: &Measure<Self>) -> f64 {
        let d = a.total_variation_exact() - b.total_variation_exact();
        d.to_f64().unwrap_or(f64::NAN)
    }

    fn embed_diff(embedded: &Measure<Self>, phi: &Density<Self>, lambda: &[f64]) -> f64 {
        let l1 = phi
            .values()
            .iter()
            .zip(lambda)
            .fold(BigRational::zero(), |acc, (v, &l)| acc + v.abs() * BigRational::from_f64(l));
        (embedded.total_variation_exact() - l1).to_f64().unwrap_or(f64::NAN)
    }
}

/// `‖lift σ‖ = ‖σ‖`, `‖R_H μ‖ ≤ ‖μ‖`, with equality on `M(G:H)`.
fn p4_isometry<W: Normed>(ctx: &Context, trials: usize, tol: f64, rng: &mut CheckRng) -> Outcome {
    let q = &ctx.quotient;
    let g = q.group();
    let mut tr = Tracker::new(tol);
    for _ in 0..trials {
        let sigma: Measure<W> = random::measure(rng, q.carrier());
        let lifted = lift_to_invariant(q, &sigma).expect("quotient carrier");
        tr.observe(W::norm_diff(&lifted, &sigma).abs(), || {
            json!({ "property": "|lift s| = |s|", "sigma": mjson(&sigma) })
        });
        let pushed = pushforward_rh(q, &lifted).expect("group carrier");
        tr.observe(W::norm_diff(&pushed, &lifted).abs(), || {
            json!({ "property": "|R_H mu| = |mu| on M(G:H)", "mu": mjson(&lifted) })
        });
        let mu: Measure<W> = random::measure(rng, g.carrier());
        let image = pushforward_rh(q, &mu).expect("group carrier");
        tr.observe(W::norm_diff(&image, &mu).max(0.0), || {
            json!({ "property": "|R_H mu| <= |mu|", "mu": mjson(&mu) })
        });
    }
    tr.verdict(trials, String::new())
}

/// Structure-table properties, the dual formula, and the module action.
fn d6_conv<W: Sample>(ctx: &Context, trials: usize, tol: f64, rng: &mut CheckRng) -> Outcome {
    let q = &ctx.quotient;
    let g = q.group();
    let t = &ctx.table;
    let mut tr = Tracker::new(tol);
    if !t.is_row_stochastic() {
        tr.flag(|| json!({ "property": "row sums equal one" }));
    }
    if !t.is_representative_independent() {
        tr.flag(|| json!({ "property": "independent of representatives" }));
    }
    for _ in 0..trials {
        let s1: Measure<W> = random::measure(rng, q.carrier());
        let s2: Measure<W> = random::measure(rng, q.carrier());
        let direct = quotient_convolve(t, &s1, &s2).expect("quotient carrier");
        let l1 = lift_to_invariant(q, &s1).expect("quotient carrier");
        let l2 = lift_to_invariant(q, &s2).expect("quotient carrier");
        let dual = pushforward_rh(q, &group_convolve(g, &l1, &l2).expect("group carrier"))
            .expect("group carrier");
        tr.observe(gap(&direct, &dual), || {
            json!({ "property": "dual formula", "sigma1": mjson(&s1), "sigma2": mjson(&s2) })
        });
        let acted = module_action(q, &l1, &s2).expect("carriers");
        tr.observe(gap(&acted, &direct), || {
            json!({ "property": "lift(s1) * s2 = s1 * s2", "sigma1": mjson(&s1), "sigma2": mjson(&s2) })
        });
        let mu: Measure<W> = random::measure(rng, g.carrier());
        let acted = module_action(q, &mu, &s2).expect("carriers");
        let via_g = pushforward_rh(q, &group_convolve(g, &mu, &l2).expect("group carrier"))
            .expect("group carrier");
        tr.observe(gap(&acted, &via_g), || {
            json!({ "property": "mu * s = R_H(mu * lift s)", "mu": mjson(&mu), "sigma": mjson(&s2) })
        });
    }
    tr.verdict(trials, String::new())
}

/// Associativity, bilinearity, submultiplicativity; the left-identity solver
/// outcome goes into the notes.
fn t8_algebra<W: Sample>(ctx: &Context, trials: usize, tol: f64, rng: &mut CheckRng) -> Outcome {
    const SUBMULT_SLACK: f64 = 1e-12;
    let q = &ctx.quotient;
    let t = &ctx.table;
    let conv = |a: &Measure<W>, b: &Measure<W>| quotient_convolve(t, a, b).expect("quotient carrier");
    let mut tr = Tracker::new(tol);
    for _ in 0..trials {
        let a: Measure<W> = random::measure(rng, q.carrier());
        let b: Measure<W> = random::measure(rng, q.carrier());
        let c: Measure<W> = random::measure(rng, q.carrier());
        let k = W::sample(rng);
        let left = conv(&conv(&a, &b), &c);
        let right = conv(&a, &conv(&b, &c));
        tr.observe(gap(&left, &right), || {
            json!({ "property": "associativity", "sigma1": mjson(&a), "sigma2": mjson(&b), "sigma3": mjson(&c) })
        });
        let lin = conv(&a, &b.scale(&k).add(&c).expect("same carrier"));
        let expanded = conv(&a, &b).scale(&k).add(&conv(&a, &c)).expect("same carrier");
        tr.observe(gap(&lin, &expanded), || {
            json!({ "property": "bilinearity", "sigma1": mjson(&a), "sigma2": mjson(&b), "sigma3": mjson(&c) })
        });
        let excess = conv(&a, &b).total_variation() - a.total_variation() * b.total_variation();
        if excess.is_nan() || excess > SUBMULT_SLACK {
            tr.flag(|| json!({ "property": "submultiplicativity", "sigma1": mjson(&a), "sigma2": mjson(&b) }));
        }
    }
    let found = find_left_identity(t);
    let notes = format!("left identity: {}", describe_identity(q, &found));
    tr.verdict(trials, notes)
}

/// `σ ∗ δ_H = σ`: exactly on the basis, and on random measures.
fn l11_right_id<W: Sample>(ctx: &Context, trials: usize, tol: f64, rng: &mut CheckRng) -> Outcome {
    let q = &ctx.quotient;
    let t = &ctx.table;
    let mut tr = Tracker::new(tol);
    let dh_exact = RationalMeasure::point_mass(q.carrier(), q.base_coset()).expect("base coset");
    for s in point_masses::<BigRational>(q) {
        let prod = quotient_convolve(t, &s, &dh_exact).expect("quotient carrier");
        tr.observe(gap(&prod, &s), || json!({ "property": "basis", "sigma": mjson(&s) }));
    }
    let dh: Measure<W> = Measure::point_mass(q.carrier(), q.base_coset()).expect("base coset");
    for _ in 0..trials {
        let s: Measure<W> = random::measure(rng, q.carrier());
        let prod = quotient_convolve(t, &s, &dh).expect("quotient carrier");
        tr.observe(gap(&prod, &s), || json!({ "sigma": mjson(&s) }));
    }
    tr.verdict(trials, String::new())
}

/// Any two-sided identity equals `δ_H`.
fn c13_unique_id(ctx: &Context) -> Outcome {
    let q = &ctx.quotient;
    let t = &ctx.table;
    let found = find_two_sided_identity(t);
    let mut tr = Tracker::new(0.0);
    let dh = RationalMeasure::point_mass(q.carrier(), q.base_coset()).expect("base coset");
    if let Some(x) = &found.solution {
        let sigma = solution_measure(q, x);
        if found.nullity != 0 || sigma != dh {
            tr.flag(|| json!({ "property": "two-sided identity is delta_H", "identity": mjson(&sigma), "nullity": found.nullity }));
        }
        if !is_left_identity(t, &sigma) {
            tr.flag(|| json!({ "property": "solver output is a left identity", "identity": mjson(&sigma) }));
        }
    }
    let notes = match &found.solution {
        Some(_) => format!("two-sided identity is delta_H: {}", describe_identity(q, &found)),
        None => format!("no two-sided identity: {}", describe_identity(q, &found)),
    };
    tr.verdict(1, notes)
}

/// Left-identity search, the premise of non-involutivity.
fn c14_involution(ctx: &Context) -> Outcome {
    let q = &ctx.quotient;
    let t = &ctx.table;
    let found = find_left_identity(t);
    let dh = RationalMeasure::point_mass(q.carrier(), q.base_coset()).expect("base coset");
    let dh_left = is_left_identity(t, &dh);
    let mut tr = Tracker::new(0.0);
    if let Some(x) = &found.solution {
        let sigma = solution_measure(q, x);
        if !is_left_identity(t, &sigma) {
            tr.flag(|| json!({ "property": "solver output is a left identity", "identity": mjson(&sigma) }));
        }
    } else if dh_left {
        tr.flag(|| json!({ "property": "solver misses delta_H" }));
    }
    tr.worst = found.residual;
    let notes = format!(
        "H normal: {}; delta_H is a left identity: {}; left-identity system: {}",
        if ctx.normal { "yes" } else { "no" },
        if dh_left { "yes" } else { "no" },
        describe_identity(q, &found)
    );
    tr.finding(1, notes)
}

/// Normality ⟺ `δ_H` is a left identity ⟺ point masses multiply as cosets.
fn p15_normality(ctx: &Context) -> Outcome {
    let q = &ctx.quotient;
    let g = q.group();
    let t = &ctx.table;
    let dh = RationalMeasure::point_mass(q.carrier(), q.base_coset()).expect("base coset");
    let dh_left = is_left_identity(t, &dh);
    let n = q.coset_count();
    let multiplicative = (0..n).all(|a| {
        (0..n).all(|b| {
            let z = q.coset_of(g.mul(q.rep(a), q.rep(b)));
            t.row(a, b) == [(z, t.denominator())]
        })
    });
    let well_defined = q.has_well_defined_coset_product();
    let mut tr = Tracker::new(0.0);
    let facts = json!({
        "normal": ctx.normal,
        "delta_H_left_identity": dh_left,
        "point_masses_multiplicative": multiplicative,
        "coset_product_well_defined": well_defined,
    });
    let mismatches = [dh_left, multiplicative, well_defined]
        .iter()
        .filter(|&&v| v != ctx.normal)
        .count();
    tr.observe(mismatches as f64, || facts.clone());
    let notes = if ctx.normal {
        "normal: identity is delta_H and delta_xH * delta_yH = delta_xyH".to_string()
    } else {
        "not normal: delta_H is not a left identity and some delta_xH * delta_yH is spread".to_string()
    };
    tr.verdict(1, notes)
}

/// `φ ↦ λ_φ` is isometric, injective and multiplicative.
fn p16_embed<W: Normed>(ctx: &Context, trials: usize, tol: f64, rng: &mut CheckRng) -> Outcome {
    let q = &ctx.quotient;
    let t = &ctx.table;
    let mut tr = Tracker::new(tol);
    for k in 0..trials {
        let rho = trial_rho(ctx, k, rng);
        let lambda = quasi_invariant_lambda(q, &rho);
        if lambda.weights().iter().any(|&l| !(l > 0.0)) {
            tr.flag(|| json!({ "property": "lambda positive", "rho": rjson(q, &rho) }));
        }
        let phi: Density<W> = random::density(rng, q.carrier());
        let emb = embed_density(&lambda, &phi).expect("quotient carrier");
        let diff = W::embed_diff(&emb, &phi, lambda.weights()).abs() / (1.0 + emb.total_variation());
        tr.observe(diff, || json!({ "property": "isometry", "phi": djson(&phi), "rho": rjson(q, &rho) }));
        if emb.is_zero() != phi.values().iter().all(Zero::is_zero) {
            tr.flag(|| json!({ "property": "injectivity", "phi": djson(&phi), "rho": rjson(q, &rho) }));
        }
        if std::any::TypeId::of::<W>() == std::any::TypeId::of::<Complex64>() {
            let c = |d: &Density<W>| {
                Density::new(d.carrier().clone(), d.values().iter().map(Weight::to_complex).collect())
                    .expect("same carrier")
            };
            let psi: Density<W> = random::density(rng, q.carrier());
            let (fc, pc) = (c(&phi), c(&psi));
            match l1_convolve(q, &rho, &lambda, &fc, &pc) {
                Ok(prod) => {
                    let lhs = embed_density(&lambda, &prod).expect("quotient carrier");
                    let rhs = quotient_convolve(
                        t,
                        &embed_density(&lambda, &fc).expect("quotient carrier"),
                        &embed_density(&lambda, &pc).expect("quotient carrier"),
                    )
                    .expect("quotient carrier");
                    tr.observe(rel_gap(&lhs, &rhs), || {
                        json!({ "property": "multiplicative", "phi": djson(&fc), "psi": djson(&pc), "rho": rjson(q, &rho) })
                    });
                }
                Err(e) => tr.flag(|| {
                    json!({ "property": "l1 formulas agree", "error": e.to_string(), "phi": djson(&fc), "psi": djson(&pc), "rho": rjson(q, &rho) })
                }),
            }
        }
    }
    tr.verdict(trials, String::new())
}

/// Both readings of `R_H(μ_{φ_{π_H}}) = λ_φ`.
fn l17_compat<W: Sample>(ctx: &Context, trials: usize, tol: f64, rng: &mut CheckRng) -> Outcome {
    let q = &ctx.quotient;
    let g = q.group();
    let mut tr = Tracker::new(tol);
    let (mut plain_held, mut plain_held_nonunit, mut nonunit_trials) = (0usize, 0usize, 0usize);
    let mut plain_worst: f64 = 0.0;
    for k in 0..trials {
        let rho = trial_rho(ctx, k, rng);
        let lambda = quasi_invariant_lambda(q, &rho);
        let phi: Density<W> = random::density(rng, q.carrier());
        let target = embed_density(&lambda, &phi).expect("quotient carrier");
        let weighted = Density::from_fn(g.carrier(), |x| {
            phi.value(q.coset_of(x)).clone() * W::from_f64(rho.at(q, x))
        });
        let lhs = pushforward_rh(q, &from_density(g, &weighted).expect("group carrier"))
            .expect("group carrier");
        tr.observe(rel_gap(&lhs, &target), || {
            json!({ "property": "weighted lift", "phi": djson(&phi), "rho": rjson(q, &rho) })
        });
        let plain = compose_with_projection(q, &phi).expect("quotient carrier");
        let lhs = pushforward_rh(q, &from_density(g, &plain).expect("group carrier"))
            .expect("group carrier");
        let r = rel_gap(&lhs, &target);
        plain_worst = plain_worst.max(r);
        let unit = rho.is_constant_one();
        if !unit {
            nonunit_trials += 1;
        }
        if r <= tol {
            plain_held += 1;
            if !unit {
                plain_held_nonunit += 1;
            }
        }
    }
    let notes = format!(
        "weighted lift (phi o pi) * rho: holds on all {trials} trials; \
         unweighted lift phi o pi: holds on {plain_held}/{trials} trials \
         ({plain_held_nonunit} of {nonunit_trials} with rho != 1), max relative residual {plain_worst:.6e}"
    );
    tr.finding(trials, notes)
}

/// Products with an embedded density are embedded densities, on both sides.
fn t18_ideal<W: Sample>(ctx: &Context, trials: usize, tol: f64, rng: &mut CheckRng) -> Outcome {
    let q = &ctx.quotient;
    let t = &ctx.table;
    let mut tr = Tracker::new(tol);
    let dh: Measure<W> = Measure::point_mass(q.carrier(), q.base_coset()).expect("base coset");
    let zero: Density<W> = Density::constant(q.carrier(), W::zero());
    for k in 0..trials {
        let rho = trial_rho(ctx, k, rng);
        let lambda = quasi_invariant_lambda(q, &rho);
        let phi: Density<W> = random::density(rng, q.carrier());
        let sigma: Measure<W> = random::measure(rng, q.carrier());
        for side in [Side::Left, Side::Right] {
            let psi = ideal_factorize(&lambda, t, side, &phi, &sigma).expect("carriers");
            let emb = embed_density(&lambda, &phi).expect("quotient carrier");
            let product = match side {
                Side::Right => quotient_convolve(t, &emb, &sigma),
                Side::Left => quotient_convolve(t, &sigma, &emb),
            }
            .expect("quotient carrier");
            let back = embed_density(&lambda, &psi).expect("quotient carrier");
            tr.observe(rel_gap(&back, &product), || {
                json!({ "side": format!("{side:?}").to_lowercase(), "phi": djson(&phi), "sigma": mjson(&sigma), "rho": rjson(q, &rho) })
            });
        }
        let psi = ideal_factorize(&lambda, t, Side::Right, &phi, &dh).expect("carriers");
        tr.observe(dgap(&psi, &phi), || json!({ "property": "sigma = delta_H", "phi": djson(&phi), "rho": rjson(q, &rho) }));
        let psi = ideal_factorize(&lambda, t, Side::Right, &zero, &sigma).expect("carriers");
        tr.observe(dgap(&psi, &zero), || json!({ "property": "phi = 0", "sigma": mjson(&sigma) }));
    }
    tr.verdict(trials, String::new())
}

/// `‖σ ∗ φ‖_p ≤ ‖σ‖ ‖φ‖_p` and `‖φ ∗ σ‖_p ≤ ‖σ‖ ‖φ‖_p` for `p ∈ {1, 2, 3}`.
fn p19_lp(ctx: &Context, trials: usize, tol: f64, rng: &mut CheckRng, exact: bool) -> Outcome {
    let q = &ctx.quotient;
    let mut tr = Tracker::new(tol);
    let mut ratio: f64 = 0.0;
    for k in 0..trials {
        let rho = trial_rho(ctx, k, rng);
        let lambda = quasi_invariant_lambda(q, &rho);
        let sigma: Measure<Complex64> = random::measure(rng, q.carrier());
        let phi: Density<Complex64> = random::density(rng, q.carrier());
        for p in [1.0, 2.0, 3.0] {
            for side in [Side::Left, Side::Right] {
                let witness = || {
                    json!({ "p": p, "side": format!("{side:?}").to_lowercase(), "sigma": mjson(&sigma), "phi": djson(&phi), "rho": rjson(q, &rho) })
                };
                match lp_action(q, &rho, side, &sigma, &phi, p) {
                    Ok(out) => {
                        let lhs = lp_norm(&lambda, &out, p);
                        let bound = sigma.total_variation() * lp_norm(&lambda, &phi, p);
                        if bound > 0.0 {
                            ratio = ratio.max(lhs / bound);
                        }
                        tr.observe((lhs - bound).max(0.0), witness);
                    }
                    Err(e) => tr.flag(|| {
                        let mut w = witness();
                        w["error"] = json!(e.to_string());
                        w
                    }),
                }
            }
        }
    }
    let mut notes = format!("max ratio |s * phi|_p / (|s| |phi|_p) = {ratio:.6}");
    if exact {
        notes.push_str("; evaluated in floating point");
    }
    tr.verdict(trials, notes)
}

/// Quotient integral formula, quasi-invariance of `λ`, and `T_H^p ∘ lift_p = id`.
fn w0_weil<W: Sample>(ctx: &Context, trials: usize, tol: f64, rng: &mut CheckRng) -> Outcome {
    let q = &ctx.quotient;
    let g = q.group();
    let float = std::any::TypeId::of::<W>() == std::any::TypeId::of::<Complex64>();
    let mut tr = Tracker::new(tol);
    let mut quasi_checked = 0usize;
    for k in 0..trials {
        let rho = trial_rho(ctx, k, rng);
        let lambda = quasi_invariant_lambda(q, &rho);
        if let Err((x, y)) = lambda.check_quasi_invariance(q, &rho) {
            tr.flag(|| json!({ "property": "strong quasi-invariance", "x": g.label(x), "y": g.label(y), "rho": rjson(q, &rho) }));
        }
        quasi_checked += 1;

        let f: Density<W> = random::density(rng, g.carrier());
        let residual = if float {
            let fc = Density::new(g.carrier(), f.values().iter().map(Weight::to_complex).collect())
                .expect("group carrier");
            let (lhs, rhs) = quotient_integral_check(q, &rho, &fc).expect("group carrier");
            (lhs - rhs).norm()
        } else {
            let lhs = f.values().iter().fold(W::zero(), |a, v| a + v.clone());
            let inv_h = W::from_ratio(1, q.subgroup_order() as i64);
            let rhs = (0..q.coset_count()).fold(W::zero(), |acc, c| {
                let th = q
                    .coset_members(c)
                    .iter()
                    .fold(W::zero(), |a, &x| a + f.value(x).clone() / W::from_f64(rho.at(q, x)))
                    * inv_h.clone();
                acc + th * W::from_f64(lambda.weight(c))
            });
            if lhs == rhs { 0.0 } else { (lhs - rhs).modulus().max(f64::MIN_POSITIVE) }
        };
        tr.observe(residual, || json!({ "property": "quotient integral formula", "f": djson(&f), "rho": rjson(q, &rho) }));

        let phi: Density<Complex64> = random::density(rng, q.carrier());
        for p in [1.0, 2.0, 3.0] {
            let back = weighted_average_th(q, &rho, p, &lift_density(q, &rho, p, &phi).expect("quotient carrier"))
                .expect("group carrier");
            tr.observe(dgap(&back, &phi), || json!({ "property": "T_H^p inverts lift_p", "p": p, "phi": djson(&phi), "rho": rjson(q, &rho) }));
        }
    }
    let mut notes = format!("strong quasi-invariance verified exactly for {quasi_checked} rho functions");
    if !float {
        notes.push_str("; T_H^p round trips evaluated in floating point");
    }
    tr.verdict(trials, notes)
}
