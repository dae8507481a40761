//! Runnable checks of the algebraic identities of `M(G/H)` over a catalog of
//! `(G, H, ρ)` triples, with structured reports.
//!
//! Each check draws its inputs from its own seeded stream, so a report
//! depends only on the seed, the check and the catalog entry. Checks marked
//! as probes report `info`: they record what the computation finds and fail
//! only when an internal consistency condition breaks.

mod checks;
pub mod random;

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Serialize, Serializer};
use serde_json::Value;
use thiserror::Error;

use crate::groups::{build_coset_space, test_normality, QuotientSpace};
use crate::io::{parse_subgroup, resolve_group};
use crate::quotient_algebra::{structure_table, StructureTable};
use crate::quotient_ops::RhoFunction;

pub const DEFAULT_TRIALS: usize = 100;
pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum VerifierError {
    #[error("unknown check id {0:?}")]
    UnknownCheckId(String),
    #[error("unknown mode {0:?} (expected float or exact)")]
    UnknownMode(String),
    #[error("invalid check spec: {0}")]
    InvalidSpec(String),
}

macro_rules! check_ids {
    ($($variant:ident => $name:literal, $probe:literal;)*) => {
        #[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
        pub enum CheckId { $($variant),* }

        impl CheckId {
            /// Every check, sorted by id.
            pub const ALL: &'static [CheckId] = &[$(CheckId::$variant),*];

            pub fn as_str(self) -> &'static str {
                match self { $(CheckId::$variant => $name),* }
            }

            /// True for checks whose outcome is a finding rather than a verdict.
            pub fn is_probe(self) -> bool {
                match self { $(CheckId::$variant => $probe),* }
            }
        }

        impl FromStr for CheckId {
            type Err = VerifierError;

            fn from_str(s: &str) -> Result<Self, Self::Err> {
                match s.trim() {
                    $($name => Ok(CheckId::$variant),)*
                    other => Err(VerifierError::UnknownCheckId(other.to_string())),
                }
            }
        }
    };
}

check_ids! {
    C13UniqueId => "C13_UNIQUE_ID", false;
    C14Involution => "C14_INVOLUTION", true;
    D6Conv => "D6_CONV", false;
    L11RightId => "L11_RIGHT_ID", false;
    L17Compat => "L17_COMPAT", true;
    P15Normality => "P15_NORMALITY", false;
    P16Embed => "P16_EMBED", false;
    P19Lp => "P19_LP", false;
    P1Mhg => "P1_MHG", true;
    P2Density => "P2_DENSITY", false;
    P3Lift => "P3_LIFT", false;
    P4Isometry => "P4_ISOMETRY", false;
    T18Ideal => "T18_IDEAL", false;
    T8Algebra => "T8_ALGEBRA", false;
    W0Weil => "W0_WEIL", false;
}

impl fmt::Display for CheckId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl Serialize for CheckId {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

/// `all` or a comma-separated list of ids.
pub fn parse_check_ids(text: &str) -> Result<Vec<CheckId>, VerifierError> {
    if text.trim() == "all" {
        return Ok(CheckId::ALL.to_vec());
    }
    let mut ids = text
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(str::parse)
        .collect::<Result<Vec<CheckId>, _>>()?;
    ids.sort();
    ids.dedup();
    Ok(ids)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Float,
    Exact,
}

impl FromStr for Mode {
    type Err = VerifierError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "float" => Ok(Mode::Float),
            "exact" => Ok(Mode::Exact),
            other => Err(VerifierError::UnknownMode(other.to_string())),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CheckSpec {
    pub id: CheckId,
    pub trials: usize,
    pub seed: u64,
    /// Upper bound on the tolerance; checks with a tighter built-in
    /// tolerance keep theirs.
    pub tolerance: f64,
    pub mode: Mode,
}

impl CheckSpec {
    pub fn new(id: CheckId) -> Self {
        Self {
            id,
            trials: DEFAULT_TRIALS,
            seed: DEFAULT_SEED,
            tolerance: DEFAULT_TOLERANCE,
            mode: Mode::Float,
        }
    }

    pub fn validate(&self) -> Result<(), VerifierError> {
        if self.trials == 0 {
            return Err(VerifierError::InvalidSpec("trials must be at least 1".into()));
        }
        if !(self.tolerance > 0.0) {
            return Err(VerifierError::InvalidSpec("tolerance must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Info,
    Error,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Info => "info",
            Status::Error => "error",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Statistics {
    pub max_residual: f64,
    pub trials: usize,
    pub tolerance: f64,
    /// Wall time; shown in text output only so that JSON stays reproducible.
    #[serde(skip)]
    pub elapsed: Duration,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckReport {
    pub id: CheckId,
    pub entry: String,
    pub mode: Mode,
    pub status: Status,
    pub statistics: Statistics,
    pub counterexample: Option<Value>,
    pub notes: String,
}

/// A prepared `(G, H, ρ)` triple with its structure table.
#[derive(Clone, Debug)]
pub struct Context {
    pub quotient: QuotientSpace,
    pub rho: RhoFunction,
    pub table: StructureTable,
    pub normal: bool,
}

impl Context {
    pub fn new(quotient: QuotientSpace, rho: RhoFunction) -> Self {
        let table = structure_table(&quotient);
        let normal = test_normality(quotient.group(), quotient.subgroup());
        Self {
            quotient,
            rho,
            table,
            normal,
        }
    }
}

/// A catalog entry as text: group source, subgroup generators, and optional
/// rho values per coset.
#[derive(Clone, Debug, PartialEq)]
pub struct CatalogSpec {
    pub name: String,
    /// `builtin:NAME(k)` or a group file path.
    pub group: String,
    pub subgroup: String,
    pub rho: Option<Vec<f64>>,
}

impl CatalogSpec {
    pub fn new(name: &str, group: &str, subgroup: &str) -> Self {
        Self {
            name: name.into(),
            group: group.into(),
            subgroup: subgroup.into(),
            rho: None,
        }
    }

    pub fn prepare(&self) -> Entry {
        let context = (|| {
            let g = resolve_group(&self.group).map_err(|e| e.to_string())?;
            let h = parse_subgroup(&g, &self.subgroup).map_err(|e| e.to_string())?;
            let q = build_coset_space(Arc::new(g), h);
            let rho = match &self.rho {
                None => RhoFunction::one(&q),
                Some(v) => RhoFunction::from_coset_values(&q, v.clone())
                    .map_err(|e| e.to_string())?,
            };
            Ok(Arc::new(Context::new(q, rho)))
        })();
        Entry {
            name: self.name.clone(),
            context,
        }
    }
}

/// A catalog entry after construction; construction errors are kept so that
/// the suite can report them per entry.
#[derive(Clone, Debug)]
pub struct Entry {
    pub name: String,
    pub context: Result<Arc<Context>, String>,
}

impl Entry {
    pub fn ready(name: impl Into<String>, context: Context) -> Self {
        Self {
            name: name.into(),
            context: Ok(Arc::new(context)),
        }
    }
}

/// Eight pairs, three of them with non-normal `H`.
pub fn default_catalog() -> Vec<CatalogSpec> {
    vec![
        CatalogSpec::new("S3/<(12)>", "builtin:S3", "(12)"),
        CatalogSpec::new("S3/A3", "builtin:S3", "(123)"),
        CatalogSpec::new("D4/<r>", "builtin:D4", "r"),
        CatalogSpec::new("D4/<s>", "builtin:D4", "s"),
        CatalogSpec::new("Q8/<i>", "builtin:Q8", "i"),
        CatalogSpec::new("A4/V4", "builtin:A4", "(12)(34), (13)(24)"),
        CatalogSpec::new("C6/C3", "builtin:C6", "a^2"),
        CatalogSpec::new("S4/S3", "builtin:S4", "(12), (123)"),
    ]
}

pub fn run_check(spec: &CheckSpec, entry: &str, ctx: &Context) -> CheckReport {
    let start = Instant::now();
    let mut rng = random::stream(spec.seed, spec.id.as_str(), entry);
    let outcome = checks::run(spec, ctx, &mut rng);
    CheckReport {
        id: spec.id,
        entry: entry.to_string(),
        mode: spec.mode,
        status: outcome.status,
        statistics: Statistics {
            max_residual: outcome.max_residual,
            trials: outcome.trials,
            tolerance: outcome.tolerance,
            elapsed: start.elapsed(),
        },
        counterexample: outcome.counterexample,
        notes: outcome.notes,
    }
}

fn error_report(spec: &CheckSpec, entry: &str, message: &str) -> CheckReport {
    CheckReport {
        id: spec.id,
        entry: entry.to_string(),
        mode: spec.mode,
        status: Status::Error,
        statistics: Statistics {
            max_residual: 0.0,
            trials: 0,
            tolerance: spec.tolerance,
            elapsed: Duration::ZERO,
        },
        counterexample: None,
        notes: message.to_string(),
    }
}

/// Runs every spec against every entry. Reports are ordered by check id and
/// then by catalog position, whatever the thread count.
pub fn run_entries(entries: &[Entry], specs: &[CheckSpec], jobs: Option<usize>) -> Vec<CheckReport> {
    let mut specs: Vec<&CheckSpec> = specs.iter().collect();
    specs.sort_by_key(|s| s.id.as_str());
    let tasks: Vec<(&CheckSpec, &Entry)> = specs
        .iter()
        .flat_map(|s| entries.iter().map(move |e| (*s, e)))
        .collect();
    let run_one = |&(spec, entry): &(&CheckSpec, &Entry)| match (&entry.context, spec.validate()) {
        (Err(msg), _) => error_report(spec, &entry.name, msg),
        (_, Err(e)) => error_report(spec, &entry.name, &e.to_string()),
        (Ok(ctx), Ok(())) => run_check(spec, &entry.name, ctx),
    };
    match jobs {
        Some(1) => tasks.iter().map(run_one).collect(),
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(|| tasks.par_iter().map(run_one).collect()),
            Err(_) => tasks.iter().map(run_one).collect(),
        },
        None => tasks.par_iter().map(run_one).collect(),
    }
}

pub fn run_suite(catalog: &[CatalogSpec], specs: &[CheckSpec], jobs: Option<usize>) -> Vec<CheckReport> {
    let entries: Vec<Entry> = catalog.iter().map(CatalogSpec::prepare).collect();
    run_entries(&entries, specs, jobs)
}

/// 1 if any check failed, otherwise 2 if an entry could not be built,
/// otherwise 0. Info never affects the code.
pub fn exit_code(reports: &[CheckReport]) -> i32 {
    if reports.iter().any(|r| r.status == Status::Fail) {
        1
    } else if reports.iter().any(|r| r.status == Status::Error) {
        2
    } else {
        0
    }
}

pub fn render_json(reports: &[CheckReport]) -> String {
    serde_json::to_string_pretty(reports).expect("reports serialize")
}

/// Fixed-width table with one row per report, followed by notes.
pub fn render_text(reports: &[CheckReport]) -> String {
    let entry_w = reports.iter().map(|r| r.entry.len()).max().unwrap_or(5).max(5);
    let mut out = format!(
        "{:<15} {:<entry_w$} {:<6} {:>12} {:>7} {:>10}\n",
        "check", "entry", "status", "residual", "trials", "ms"
    );
    for r in reports {
        out.push_str(&format!(
            "{:<15} {:<entry_w$} {:<6} {:>12.3e} {:>7} {:>10.1}\n",
            r.id.as_str(),
            r.entry,
            r.status.to_string(),
            r.statistics.max_residual,
            r.statistics.trials,
            r.statistics.elapsed.as_secs_f64() * 1e3,
        ));
    }
    let noted: Vec<_> = reports.iter().filter(|r| !r.notes.is_empty()).collect();
    if !noted.is_empty() {
        out.push('\n');
        for r in noted {
            out.push_str(&format!("{} {}: {}\n", r.id, r.entry, r.notes));
        }
    }
    let count = |s: Status| reports.iter().filter(|r| r.status == s).count();
    out.push_str(&format!(
        "\n{} pass, {} fail, {} info, {} error\n",
        count(Status::Pass),
        count(Status::Fail),
        count(Status::Info),
        count(Status::Error)
    ));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ids_round_trip_and_sort() {
        for &id in CheckId::ALL {
            assert_eq!(id.as_str().parse::<CheckId>().unwrap(), id);
        }
        let names: Vec<_> = CheckId::ALL.iter().map(|c| c.as_str()).collect();
        let mut sorted = names.clone();
        sorted.sort();
        assert_eq!(names, sorted);
        assert_eq!(CheckId::ALL.len(), 15);
        assert_eq!(
            "P99".parse::<CheckId>(),
            Err(VerifierError::UnknownCheckId("P99".into()))
        );
        assert_eq!(
            parse_check_ids("T8_ALGEBRA,D6_CONV").unwrap(),
            vec![CheckId::D6Conv, CheckId::T8Algebra]
        );
        assert_eq!(parse_check_ids("all").unwrap().len(), 15);
    }

    #[test]
    fn spec_validation() {
        let mut s = CheckSpec::new(CheckId::D6Conv);
        assert!(s.validate().is_ok());
        s.trials = 0;
        assert!(s.validate().is_err());
        s.trials = 1;
        s.tolerance = 0.0;
        assert!(s.validate().is_err());
    }

    #[test]
    fn empty_check_list_gives_empty_report() {
        assert!(run_suite(&default_catalog(), &[], Some(1)).is_empty());
    }

    #[test]
    fn bad_entry_is_isolated() {
        let catalog = vec![
            CatalogSpec::new("bad", "builtin:S3", "(1234)"),
            CatalogSpec::new("ok", "builtin:S3", "(12)"),
        ];
        let reports = run_suite(&catalog, &[CheckSpec::new(CheckId::L11RightId)], Some(1));
        assert_eq!(reports.len(), 2);
        assert_eq!(reports[0].status, Status::Error);
        assert_eq!(reports[1].status, Status::Pass);
        assert_eq!(exit_code(&reports), 2);
    }

    #[test]
    fn default_catalog_builds() {
        let entries: Vec<_> = default_catalog().iter().map(CatalogSpec::prepare).collect();
        let orders: Vec<(usize, usize)> = entries
            .iter()
            .map(|e| {
                let c = e.context.as_ref().unwrap();
                (c.quotient.group().order(), c.quotient.subgroup_order())
            })
            .collect();
        assert_eq!(
            orders,
            vec![(6, 2), (6, 3), (8, 4), (8, 2), (8, 4), (12, 4), (6, 3), (24, 6)]
        );
        let non_normal = entries
            .iter()
            .filter(|e| !e.context.as_ref().unwrap().normal)
            .count();
        assert_eq!(non_normal, 3);
    }
}
