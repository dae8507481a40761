//! Acceptance gate: one line per criterion, nonzero exit if any fails.

use std::sync::Arc;
use std::time::{Duration, Instant};

use num_rational::BigRational;
use num_traits::{One, Zero};
use quotient_measure::groups::{build_coset_space, parse_builtin, whole_group, Subgroup};
use quotient_measure::io::parse_subgroup;
use quotient_measure::measures::group_convolve;
use quotient_measure::quotient_algebra::{find_two_sided_identity, is_left_identity};
use quotient_measure::verifier::{
    default_catalog, exit_code, run_entries, run_suite, CatalogSpec, CheckId, CheckReport, CheckSpec,
    Entry, Mode, Status,
};
use quotient_measure::{quotient_convolve, structure_table, QuotientSpace, RationalMeasure};

type Verdict = Result<String, String>;
type Criterion = (&'static str, fn() -> Verdict);

fn entries() -> Vec<Entry> {
    default_catalog().iter().map(CatalogSpec::prepare).collect()
}

fn quotient(group: &str, subgroup: &str) -> QuotientSpace {
    let g = parse_builtin(group).unwrap();
    let h = parse_subgroup(&g, subgroup).unwrap();
    build_coset_space(Arc::new(g), h)
}

fn spec(id: CheckId, trials: usize, mode: Mode) -> CheckSpec {
    let mut s = CheckSpec::new(id);
    s.trials = trials;
    s.mode = mode;
    s
}

/// Every report passes with the expected tolerance; returns the largest residual.
fn all_pass(reports: &[CheckReport], tolerance: f64) -> Result<f64, String> {
    if reports.len() != 8 {
        return Err(format!("expected 8 reports, got {}", reports.len()));
    }
    let mut worst: f64 = 0.0;
    for r in reports {
        if r.status != Status::Pass {
            return Err(format!("{} on {}: {} ({:?})", r.id, r.entry, r.status, r.counterexample));
        }
        if r.statistics.tolerance != tolerance {
            return Err(format!("{} ran at tolerance {}", r.id, r.statistics.tolerance));
        }
        worst = worst.max(r.statistics.max_residual);
    }
    Ok(worst)
}

fn stochasticity() -> Verdict {
    let mut pairs: Vec<(String, QuotientSpace)> = default_catalog()
        .iter()
        .map(|c| {
            let e = c.prepare();
            (c.name.clone(), e.context.unwrap().quotient.clone())
        })
        .collect();
    pairs.push(("S5/<(12)>".into(), quotient("S5", "(12)")));
    pairs.push(("S5/S4".into(), quotient("S5", "(12), (1234)")));
    pairs.push(("D60/<s>".into(), quotient("D60", "s")));
    let mut slowest = Duration::ZERO;
    for (name, q) in &pairs {
        let start = Instant::now();
        let t = structure_table(q);
        let n = t.coset_count();
        for a in 0..n {
            for b in 0..n {
                let sum = (0..n).fold(BigRational::zero(), |acc, z| acc + t.constant(a, b, z));
                if !sum.is_one() {
                    return Err(format!("{name}: row ({a},{b}) sums to {sum}"));
                }
            }
        }
        if !t.is_row_stochastic() {
            return Err(format!("{name}: predicate disagrees"));
        }
        let took = start.elapsed();
        if q.group().order() <= 120 && took >= Duration::from_secs(1) {
            return Err(format!("{name}: {took:?}"));
        }
        slowest = slowest.max(took);
    }
    Ok(format!("{} pairs exact, up to order 120, slowest {:.1} ms", pairs.len(), slowest.as_secs_f64() * 1e3))
}

fn dual_formula() -> Verdict {
    let r = run_entries(&entries(), &[spec(CheckId::D6Conv, 100, Mode::Float)], None);
    all_pass(&r, 1e-12).map(|w| format!("100 pairs per entry, max residual {w:.3e} <= 1e-12"))
}

fn banach_algebra() -> Verdict {
    let r = run_entries(&entries(), &[spec(CheckId::T8Algebra, 100, Mode::Float)], None);
    all_pass(&r, 1e-10).map(|w| format!("associativity residual {w:.3e} <= 1e-10, submultiplicative within 1e-12"))
}

fn right_identity() -> Verdict {
    let r = run_entries(&entries(), &[spec(CheckId::L11RightId, 100, Mode::Exact)], None);
    let w = all_pass(&r, 1e-12)?;
    if w != 0.0 {
        return Err(format!("exact residual {w}"));
    }
    // independent basis check on the rational table
    for e in entries() {
        let ctx = e.context.unwrap();
        let q = &ctx.quotient;
        let dh = RationalMeasure::point_mass(q.carrier(), q.base_coset()).unwrap();
        for c in 0..q.coset_count() {
            let s = RationalMeasure::point_mass(q.carrier(), c).unwrap();
            if quotient_convolve(&ctx.table, &s, &dh).unwrap() != s {
                return Err(format!("{}: basis {}", e.name, q.label(c)));
            }
        }
    }
    Ok("basis and 100 random measures per entry, residual exactly 0".into())
}

fn normality() -> Verdict {
    let es = entries();
    let r = run_entries(&es, &[spec(CheckId::P15Normality, 1, Mode::Exact)], None);
    all_pass(&r, 0.0)?;
    let mut non_normal = 0;
    for e in &es {
        let ctx = e.context.as_ref().unwrap();
        let q = &ctx.quotient;
        let dh = RationalMeasure::point_mass(q.carrier(), q.base_coset()).unwrap();
        let left = is_left_identity(&ctx.table, &dh);
        let multiplicative = ctx.table.is_deterministic();
        if left != ctx.normal || multiplicative != ctx.normal {
            return Err(format!("{}: normal {} left {} multiplicative {}", e.name, ctx.normal, left, multiplicative));
        }
        non_normal += usize::from(!ctx.normal);
    }
    if non_normal < 3 {
        return Err(format!("only {non_normal} non-normal pairs"));
    }
    Ok(format!("0 discrepancies over 8 pairs, {non_normal} non-normal"))
}

fn quotient_integral() -> Verdict {
    let r = run_entries(&entries(), &[spec(CheckId::W0Weil, 100, Mode::Float)], None);
    all_pass(&r, 1e-10).map(|w| format!("100 f per entry, random dyadic rho, max residual {w:.3e}"))
}

fn isometries() -> Verdict {
    let specs = [
        spec(CheckId::P3Lift, 100, Mode::Exact),
        spec(CheckId::P4Isometry, 100, Mode::Exact),
        spec(CheckId::P16Embed, 100, Mode::Exact),
    ];
    let r = run_entries(&entries(), &specs, None);
    for chunk in r.chunks(8) {
        let w = all_pass(chunk, 1e-12)?;
        if w != 0.0 {
            return Err(format!("{}: exact residual {w}", chunk[0].id));
        }
    }
    Ok("lift, R_H and embedding norms equal in rational arithmetic".into())
}

fn ideal() -> Verdict {
    let r = run_entries(&entries(), &[spec(CheckId::T18Ideal, 100, Mode::Float)], None);
    all_pass(&r, 1e-12).map(|w| format!("both sides, max residual {w:.3e} <= 1e-12"))
}

fn lp_contraction() -> Verdict {
    let r = run_entries(&entries(), &[spec(CheckId::P19Lp, 200, Mode::Float)], None);
    let w = all_pass(&r, 1e-10)?;
    if r.iter().any(|x| x.statistics.trials != 200) {
        return Err("trial count".into());
    }
    Ok(format!("p in {{1,2,3}}, 200 trials per entry, max excess {w:.3e}"))
}

fn degenerate() -> Verdict {
    for name in ["S3", "D4", "Q8", "A4", "C6"] {
        let g = Arc::new(parse_builtin(name).unwrap());
        let trivial = Subgroup::from_members(&g, &[g.identity()]).unwrap();
        let q = build_coset_space(g.clone(), trivial);
        let t = structure_table(&q);
        let element = |c: usize| q.coset_members(c)[0];
        for a in 0..q.coset_count() {
            for b in 0..q.coset_count() {
                let qa = RationalMeasure::point_mass(q.carrier(), a).unwrap();
                let qb = RationalMeasure::point_mass(q.carrier(), b).unwrap();
                let ga = RationalMeasure::point_mass(g.carrier(), element(a)).unwrap();
                let gb = RationalMeasure::point_mass(g.carrier(), element(b)).unwrap();
                let lhs = quotient_convolve(&t, &qa, &qb).unwrap();
                let rhs = group_convolve(&g, &ga, &gb).unwrap();
                if (0..q.coset_count()).any(|c| lhs.weight(c) != rhs.weight(element(c))) {
                    return Err(format!("{name}/{{e}}: ({a},{b})"));
                }
            }
        }
        let q = build_coset_space(g.clone(), whole_group(&g));
        let t = structure_table(&q);
        let unit = find_two_sided_identity(&t);
        if q.coset_count() != 1 || unit.solution != Some(vec![BigRational::one()]) || unit.nullity != 0 {
            return Err(format!("{name}/{name}: {} cosets, identity {:?}", q.coset_count(), unit.solution));
        }
    }
    Ok("H={e} matches M(G) on all basis pairs; H=G is one-dimensional with unit delta_H".into())
}

fn probes() -> Verdict {
    let specs: Vec<CheckSpec> = [CheckId::P1Mhg, CheckId::C14Involution, CheckId::L17Compat]
        .into_iter()
        .map(|id| spec(id, 100, Mode::Float))
        .collect();
    let first = run_suite(&default_catalog(), &specs, Some(1));
    let second = run_suite(&default_catalog(), &specs, Some(4));
    let strip = |r: &[CheckReport]| -> Vec<(CheckId, String, Status, String)> {
        r.iter().map(|x| (x.id, x.entry.clone(), x.status, x.notes.clone())).collect()
    };
    if strip(&first) != strip(&second) {
        return Err("content differs between runs".into());
    }
    if first.len() != 24 || first.iter().any(|r| r.status != Status::Info || r.notes.is_empty()) {
        return Err("every probe should report info with notes".into());
    }
    let missing = |id: CheckId, needle: &str| {
        first.iter().filter(|r| r.id == id).any(|r| !r.notes.contains(needle))
    };
    if missing(CheckId::P1Mhg, "solution dimension")
        || missing(CheckId::C14Involution, "left-identity system")
        || missing(CheckId::L17Compat, "unweighted lift")
    {
        return Err("probe notes incomplete".into());
    }
    Ok("24 probe reports identical across runs and thread counts".into())
}

fn full_suite() -> Verdict {
    let specs: Vec<CheckSpec> = CheckId::ALL.iter().map(|&id| CheckSpec::new(id)).collect();
    let start = Instant::now();
    let reports = run_suite(&default_catalog(), &specs, None);
    let took = start.elapsed();
    if reports.len() != 8 * CheckId::ALL.len() {
        return Err(format!("{} reports", reports.len()));
    }
    let failed = reports.iter().filter(|r| r.status == Status::Fail).count();
    let errored = reports.iter().filter(|r| r.status == Status::Error).count();
    let code = exit_code(&reports);
    if failed + errored > 0 || code != 0 {
        return Err(format!("{failed} fail, {errored} error, exit {code}"));
    }
    if took >= Duration::from_secs(60) {
        return Err(format!("took {took:?}"));
    }
    Ok(format!("{} reports in {:.2} s, exit code {code}", reports.len(), took.as_secs_f64()))
}

fn main() {
    let criteria: [Criterion; 12] = [
        ("structure table stochasticity", stochasticity),
        ("dual formula consistency", dual_formula),
        ("Banach algebra laws", banach_algebra),
        ("right identity", right_identity),
        ("normality equivalence", normality),
        ("quotient integral formula", quotient_integral),
        ("isometries", isometries),
        ("ideal property", ideal),
        ("Lp contraction", lp_contraction),
        ("degenerate reductions", degenerate),
        ("info probes deterministic", probes),
        ("full default suite", full_suite),
    ];
    let mut failures = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail}", i + 1),
            Err(detail) => {
                failures += 1;
                println!("criterion {:>2} FAIL  {name}: {detail}", i + 1);
            }
        }
    }
    println!("{} of {} criteria pass", criteria.len() - failures, criteria.len());
    if failures > 0 {
        std::process::exit(1);
    }
}
