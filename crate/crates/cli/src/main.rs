use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use quotient_measure::groups::build_coset_space;
use quotient_measure::io::{
    group_to_spec, load_measure, load_rho, measure_to_json, parse_subgroup, rational_to_string,
    resolve_group, table_to_json,
};
use quotient_measure::measures::group_convolve;
use quotient_measure::verifier::{
    default_catalog, exit_code, parse_check_ids, render_json, render_text, run_entries,
    CatalogSpec, CheckSpec, Context, Entry, Mode, DEFAULT_SEED, DEFAULT_TOLERANCE, DEFAULT_TRIALS,
};
use quotient_measure::{quotient_convolve, structure_table, CarrierKind, QuotientSpace, RhoFunction};
use serde_json::json;

const BUILTINS: &[(&str, &str)] = &[
    ("cyclic(n)", "Cn"),
    ("dihedral(n)", "Dn, order 2n"),
    ("symmetric(n)", "Sn"),
    ("alternating(n)", "An"),
    ("quaternion8()", "Q8"),
    ("direct_product(n)", "C2 x Cn"),
];

#[derive(Parser)]
#[command(name = "qmeasure", version, about = "Measure algebras on finite coset spaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List builtin groups, or describe one group and its cosets.
    Groups(GroupsArgs),
    /// Print the exact structure constants of M(G/H).
    Table(TableArgs),
    /// Convolve two measure files.
    Conv(ConvArgs),
    /// Run verification checks on one pair or on the default catalog.
    Check(CheckArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Args)]
struct GroupsArgs {
    /// `builtin:NAME(k)` or a group file.
    #[arg(long)]
    group: Option<String>,
    /// Generators of H, as labels or cycle notation.
    #[arg(long, requires = "group")]
    subgroup: Option<String>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Args)]
struct TableArgs {
    #[arg(long)]
    group: String,
    #[arg(long)]
    subgroup: String,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Args)]
struct ConvArgs {
    /// Treat the inputs as measures on G/H instead of G.
    #[arg(long, requires = "subgroup")]
    quotient: bool,
    #[arg(long)]
    m1: PathBuf,
    #[arg(long)]
    m2: PathBuf,
    #[arg(long)]
    group: String,
    #[arg(long)]
    subgroup: Option<String>,
}

#[derive(Args)]
struct CheckArgs {
    /// Group to check; the default catalog is used when absent.
    #[arg(long, requires = "subgroup")]
    group: Option<String>,
    #[arg(long, requires = "group")]
    subgroup: Option<String>,
    /// Rho file `{"values": {coset: x}}`; defaults to rho = 1.
    #[arg(long, requires = "group")]
    rho: Option<PathBuf>,
    /// Check id, comma-separated ids, or `all`.
    #[arg(long, default_value = "all")]
    prop: String,
    #[arg(long, default_value_t = DEFAULT_TRIALS)]
    trials: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_TOLERANCE, allow_negative_numbers = true)]
    tol: f64,
    #[arg(long, default_value = "float")]
    mode: Mode,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    /// Worker threads; 1 runs sequentially.
    #[arg(long)]
    jobs: Option<usize>,
}

/// A diagnostic tied to the flag that caused it.
struct Failure {
    flag: &'static str,
    message: String,
}

fn fail(flag: &'static str, e: impl ToString) -> Failure {
    Failure {
        flag,
        message: e.to_string(),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Groups(a) => groups(a),
        Command::Table(a) => table(a),
        Command::Conv(a) => conv(a),
        Command::Check(a) => check(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: --{}: {}", f.flag, f.message);
            ExitCode::from(2)
        }
    }
}

fn quotient(group: &str, subgroup: &str) -> Result<QuotientSpace, Failure> {
    let g = resolve_group(group).map_err(|e| fail("group", e))?;
    let h = parse_subgroup(&g, subgroup).map_err(|e| fail("subgroup", e))?;
    Ok(build_coset_space(Arc::new(g), h))
}

fn print_json(value: &serde_json::Value) {
    println!("{}", serde_json::to_string_pretty(value).expect("json value"));
}

fn groups(a: GroupsArgs) -> Result<u8, Failure> {
    let Some(source) = a.group else {
        match a.format {
            Format::Json => print_json(&json!(BUILTINS
                .iter()
                .map(|(name, short)| json!({ "name": name, "short": short }))
                .collect::<Vec<_>>())),
            Format::Text => {
                for (name, short) in BUILTINS {
                    println!("builtin:{name:<20} {short}");
                }
            }
        }
        return Ok(0);
    };
    let g = resolve_group(&source).map_err(|e| fail("group", e))?;
    let spec = group_to_spec(&g);
    let mut out = serde_json::to_value(&spec).expect("group spec");
    out["order"] = json!(g.order());
    if let Some(sub) = a.subgroup {
        let h = parse_subgroup(&g, &sub).map_err(|e| fail("subgroup", e))?;
        let q = build_coset_space(Arc::new(g), h);
        let g = q.group();
        let cosets: serde_json::Map<_, _> = (0..q.coset_count())
            .map(|c| {
                let members: Vec<&str> = q.coset_members(c).iter().map(|&x| g.label(x)).collect();
                (q.label(c).to_string(), json!(members))
            })
            .collect();
        out["cosets"] = json!(cosets);
    }
    match a.format {
        Format::Json => print_json(&out),
        Format::Text => {
            println!("{} (order {})", spec.name.as_deref().unwrap_or("group"), out["order"]);
            println!("elements: {}", spec.elements.join(" "));
            if let Some(cosets) = out.get("cosets").and_then(|c| c.as_object()) {
                for (label, members) in cosets {
                    let m: Vec<&str> = members.as_array().unwrap().iter().filter_map(|v| v.as_str()).collect();
                    println!("{label}: {{{}}}", m.join(", "));
                }
            }
        }
    }
    Ok(0)
}

fn table(a: TableArgs) -> Result<u8, Failure> {
    let q = quotient(&a.group, &a.subgroup)?;
    let t = structure_table(&q);
    match a.format {
        Format::Json => print_json(&table_to_json(&t)),
        Format::Text => {
            let n = t.coset_count();
            for x in 0..n {
                for y in 0..n {
                    let terms: Vec<String> = (0..n)
                        .filter(|&z| t.count(x, y, z) > 0)
                        .map(|z| format!("{} {}", rational_to_string(&t.constant(x, y, z)), q.label(z)))
                        .collect();
                    println!("{} * {} = {}", q.label(x), q.label(y), terms.join(" + "));
                }
            }
        }
    }
    Ok(0)
}

fn conv(a: ConvArgs) -> Result<u8, Failure> {
    let out = if a.quotient {
        let q = quotient(&a.group, a.subgroup.as_deref().unwrap_or_default())?;
        let load = |p: &Path, flag| load_measure(p, CarrierKind::Quotient, q.group(), Some(&q)).map_err(|e| fail(flag, e));
        let (m1, m2) = (load(&a.m1, "m1")?, load(&a.m2, "m2")?);
        quotient_convolve(&structure_table(&q), &m1, &m2).map_err(|e| fail("m2", e))?
    } else {
        let g = resolve_group(&a.group).map_err(|e| fail("group", e))?;
        let load = |p: &Path, flag| load_measure(p, CarrierKind::Group, &g, None).map_err(|e| fail(flag, e));
        let (m1, m2) = (load(&a.m1, "m1")?, load(&a.m2, "m2")?);
        group_convolve(&g, &m1, &m2).map_err(|e| fail("m2", e))?
    };
    print_json(&measure_to_json(&out));
    Ok(0)
}

fn check(a: CheckArgs) -> Result<u8, Failure> {
    let ids = parse_check_ids(&a.prop).map_err(|e| fail("prop", e))?;
    let specs = ids
        .into_iter()
        .map(|id| {
            let spec = CheckSpec {
                id,
                trials: a.trials,
                seed: a.seed,
                tolerance: a.tol,
                mode: a.mode,
            };
            spec.validate()
                .map_err(|e| fail(if a.trials == 0 { "trials" } else { "tol" }, e))?;
            Ok(spec)
        })
        .collect::<Result<Vec<_>, Failure>>()?;
    if a.jobs == Some(0) {
        return Err(fail("jobs", "must be at least 1"));
    }
    let entries: Vec<Entry> = match (a.group, a.subgroup) {
        (Some(group), Some(sub)) => {
            let q = quotient(&group, &sub)?;
            let rho = match &a.rho {
                Some(path) => load_rho(path, &q).map_err(|e| fail("rho", e))?,
                None => RhoFunction::one(&q),
            };
            let name = format!("{}/<{}>", q.group().name(), sub);
            vec![Entry::ready(name, Context::new(q, rho))]
        }
        _ => default_catalog().iter().map(CatalogSpec::prepare).collect(),
    };
    let reports = run_entries(&entries, &specs, a.jobs);
    match a.format {
        Format::Json => println!("{}", render_json(&reports)),
        Format::Text => print!("{}", render_text(&reports)),
    }
    Ok(exit_code(&reports) as u8)
}
