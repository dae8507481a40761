//! JSON file formats and text parsing for groups, subgroups, measures, rho
//! functions and structure tables.
//!
//! Group file, one of:
//!
//! ```json
//! {"name": "C2", "elements": ["e", "a"], "table": [[0, 1], [1, 0]]}
//! {"permutations": {"degree": 3, "generators": [[1, 0, 2], [1, 2, 0]]}}
//! ```
//!
//! Generators list 0-based images. Measure file:
//! `{"carrier": "group" | "quotient", "weights": {"label": [re, im]}}`, where
//! absent labels carry weight zero and a bare number is a real weight.
//! Rho file: `{"values": {"label": positive}}`, missing cosets default to one.
//! Quotient points may be named `C{k}` or by any element of the coset.

use std::fs;
use std::path::Path;

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::groups::{
    build_from_permutation_generators, generate_subgroup, parse_builtin, CosetLookup,
    FiniteGroup, GroupError, Permutation, QuotientSpace, Subgroup,
};
use crate::measures::{CarrierKind, ComplexMeasure, Measure, MeasureError};
use crate::quotient_algebra::StructureTable;
use crate::quotient_ops::{RhoError, RhoFunction};

#[derive(Debug, Error)]
pub enum InputError {
    #[error("cannot read {path}: {message}")]
    Read { path: String, message: String },
    #[error("invalid JSON: {0}")]
    Json(String),
    #[error("invalid group file: {0}")]
    Schema(String),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Measure(#[from] MeasureError),
    #[error(transparent)]
    Rho(#[from] RhoError),
    #[error("unknown label {0:?}")]
    UnknownLabel(String),
    #[error("label {label:?} is ambiguous: {detail}")]
    Ambiguous { label: String, detail: String },
    #[error("file holds a measure on the {found}, expected the {expected}")]
    CarrierKind {
        expected: CarrierKind,
        found: CarrierKind,
    },
    #[error("conflicting values for {0:?}")]
    Conflict(String),
    #[error("bad value for {label:?}: {message}")]
    Value { label: String, message: String },
}

fn read(path: &Path) -> Result<String, InputError> {
    fs::read_to_string(path).map_err(|e| InputError::Read {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

fn parse_json<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T, InputError> {
    serde_json::from_str(text).map_err(|e| InputError::Json(e.to_string()))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TableSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub elements: Vec<String>,
    pub table: Vec<Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PermutationSpec {
    pub degree: usize,
    pub generators: Vec<Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum GroupSpec {
    Table(TableSpec),
    Permutations {
        name: Option<String>,
        permutations: PermutationSpec,
    },
}

impl GroupSpec {
    pub fn build(&self) -> Result<FiniteGroup, GroupError> {
        match self {
            GroupSpec::Table(t) => FiniteGroup::from_cayley_table(
                t.name.as_deref().unwrap_or("table"),
                t.elements.clone(),
                &t.table,
            ),
            GroupSpec::Permutations { name, permutations } => {
                let g = build_from_permutation_generators(
                    permutations.degree,
                    &permutations.generators,
                )?;
                Ok(match name {
                    Some(n) => g.with_name(n.clone()),
                    None => g,
                })
            }
        }
    }
}

pub fn parse_group_spec(text: &str) -> Result<GroupSpec, InputError> {
    let value: Value = parse_json(text)?;
    let obj = value
        .as_object()
        .ok_or_else(|| InputError::Schema("expected an object".into()))?;
    let name = match obj.get("name") {
        None | Some(Value::Null) => None,
        Some(Value::String(s)) => Some(s.clone()),
        Some(_) => return Err(InputError::Schema("\"name\" must be a string".into())),
    };
    if let Some(p) = obj.get("permutations") {
        let permutations: PermutationSpec = serde_json::from_value(p.clone())
            .map_err(|e| InputError::Schema(format!("permutations: {e}")))?;
        return Ok(GroupSpec::Permutations { name, permutations });
    }
    if obj.contains_key("elements") || obj.contains_key("table") {
        let t: TableSpec = serde_json::from_value(value.clone())
            .map_err(|e| InputError::Schema(e.to_string()))?;
        return Ok(GroupSpec::Table(t));
    }
    Err(InputError::Schema(
        "expected \"elements\" and \"table\", or \"permutations\"".into(),
    ))
}

pub fn parse_group_json(text: &str) -> Result<FiniteGroup, InputError> {
    Ok(parse_group_spec(text)?.build()?)
}

/// `builtin:NAME(k)` or a path to a group file.
pub fn resolve_group(source: &str) -> Result<FiniteGroup, InputError> {
    match source.strip_prefix("builtin:") {
        Some(name) => Ok(parse_builtin(name)?),
        None => parse_group_json(&read(Path::new(source))?),
    }
}

/// The table form of a group, which `parse_group_json` reads back unchanged.
pub fn group_to_spec(g: &FiniteGroup) -> TableSpec {
    TableSpec {
        name: Some(g.name().to_string()),
        elements: g.labels().to_vec(),
        table: g.cayley_rows(),
    }
}

/// Splits generator text on commas and whitespace outside parentheses.
fn split_generators(text: &str) -> Result<Vec<String>, InputError> {
    let mut tokens = Vec::new();
    let mut current = String::new();
    let mut depth = 0usize;
    for ch in text.chars() {
        match ch {
            '(' => {
                depth += 1;
                current.push(ch);
            }
            ')' => {
                depth = depth.checked_sub(1).ok_or_else(|| {
                    InputError::Group(GroupError::Parse(format!("unbalanced ')' in {text:?}")))
                })?;
                current.push(ch);
            }
            c if depth == 0 && (c == ',' || c.is_whitespace()) => {
                if !current.is_empty() {
                    tokens.push(std::mem::take(&mut current));
                }
            }
            c => current.push(c),
        }
    }
    if depth != 0 {
        return Err(GroupError::Parse(format!("unbalanced '(' in {text:?}")).into());
    }
    if !current.is_empty() {
        tokens.push(current);
    }
    Ok(tokens)
}

/// Resolves one generator: an element label, or cycle notation when the
/// group carries a permutation representation. If both readings succeed and
/// disagree the token is rejected.
pub fn resolve_element(g: &FiniteGroup, token: &str) -> Result<usize, InputError> {
    let by_label = g.index_of(token);
    let by_cycles = match g.permutations() {
        Some(rep) if token.starts_with('(') || token == "e" => {
            match Permutation::parse_cycles(token, rep.degree()) {
                Ok(p) => Some(rep.index_of(&p).ok_or_else(|| {
                    InputError::Value {
                        label: token.to_string(),
                        message: "permutation is not an element of the group".into(),
                    }
                })?),
                Err(e) if by_label.is_none() => return Err(e.into()),
                Err(_) => None,
            }
        }
        _ => None,
    };
    match (by_label, by_cycles) {
        (Some(a), Some(b)) if a != b => Err(InputError::Ambiguous {
            label: token.to_string(),
            detail: format!(
                "names element {} but parses as permutation {}",
                g.label(a),
                g.label(b)
            ),
        }),
        (Some(a), _) | (None, Some(a)) => Ok(a),
        (None, None) => Err(InputError::UnknownLabel(token.to_string())),
    }
}

/// Parses `--subgroup` text such as `"(12)"`, `"r, s"` or `"(12)(34) (13)(24)"`
/// and returns the generated subgroup. Empty text gives `{e}`.
pub fn parse_subgroup(g: &FiniteGroup, text: &str) -> Result<Subgroup, InputError> {
    let gens = split_generators(text)?
        .iter()
        .map(|t| resolve_element(g, t))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(generate_subgroup(g, &gens)?)
}

fn resolve_coset(q: &QuotientSpace, label: &str) -> Result<usize, InputError> {
    match q.lookup(label) {
        CosetLookup::Found(c) => Ok(c),
        CosetLookup::Ambiguous { by_name, by_element } => Err(InputError::Ambiguous {
            label: label.to_string(),
            detail: format!(
                "coset name {} but element of {}",
                q.label(by_name),
                q.label(by_element)
            ),
        }),
        CosetLookup::Missing => Err(InputError::UnknownLabel(label.to_string())),
    }
}

fn parse_weight(label: &str, v: &Value) -> Result<Complex64, InputError> {
    let bad = |message: &str| InputError::Value {
        label: label.to_string(),
        message: message.to_string(),
    };
    let num = |x: &Value| x.as_f64().ok_or_else(|| bad("expected a number"));
    let w = match v {
        Value::Number(_) => Complex64::new(num(v)?, 0.0),
        Value::Array(parts) if parts.len() == 2 => Complex64::new(num(&parts[0])?, num(&parts[1])?),
        _ => return Err(bad("expected [re, im] or a number")),
    };
    if !w.re.is_finite() || !w.im.is_finite() {
        return Err(bad("weight must be finite"));
    }
    Ok(w)
}

#[derive(Deserialize)]
struct MeasureFile {
    carrier: CarrierKind,
    weights: Map<String, Value>,
}

/// Reads a measure file against `expected`. Quotient files need `q`.
pub fn parse_measure_json(
    text: &str,
    expected: CarrierKind,
    g: &FiniteGroup,
    q: Option<&QuotientSpace>,
) -> Result<ComplexMeasure, InputError> {
    let file: MeasureFile = parse_json(text)?;
    if file.carrier != expected {
        return Err(InputError::CarrierKind {
            expected,
            found: file.carrier,
        });
    }
    let (carrier, size) = match (expected, q) {
        (CarrierKind::Group, _) => (g.carrier(), g.order()),
        (CarrierKind::Quotient, Some(q)) => (q.carrier(), q.coset_count()),
        (CarrierKind::Quotient, None) => {
            return Err(InputError::Schema("quotient measure without a subgroup".into()))
        }
    };
    let mut weights = vec![Complex64::zero(); size];
    let mut seen = vec![false; size];
    for (label, v) in &file.weights {
        let idx = match (expected, q) {
            (CarrierKind::Quotient, Some(q)) => resolve_coset(q, label)?,
            _ => g
                .index_of(label)
                .ok_or_else(|| InputError::UnknownLabel(label.clone()))?,
        };
        if seen[idx] {
            return Err(InputError::Conflict(label.clone()));
        }
        seen[idx] = true;
        weights[idx] = parse_weight(label, v)?;
    }
    Ok(Measure::new(carrier, weights)?)
}

pub fn load_measure(
    path: &Path,
    expected: CarrierKind,
    g: &FiniteGroup,
    q: Option<&QuotientSpace>,
) -> Result<ComplexMeasure, InputError> {
    parse_measure_json(&read(path)?, expected, g, q)
}

/// Measure file contents; zero weights are omitted.
pub fn measure_to_json(m: &ComplexMeasure) -> Value {
    let weights: Map<String, Value> = m
        .carrier()
        .labels()
        .iter()
        .zip(m.weights())
        .filter(|(_, w)| !w.is_zero())
        .map(|(l, w)| (l.clone(), json!([w.re, w.im])))
        .collect();
    json!({ "carrier": m.carrier().kind(), "weights": weights })
}

#[derive(Deserialize)]
struct RhoFile {
    values: Map<String, Value>,
}

pub fn parse_rho_json(text: &str, q: &QuotientSpace) -> Result<RhoFunction, InputError> {
    let file: RhoFile = parse_json(text)?;
    let mut values = vec![None; q.coset_count()];
    for (label, v) in &file.values {
        let c = resolve_coset(q, label)?;
        let x = v.as_f64().ok_or_else(|| InputError::Value {
            label: label.clone(),
            message: "expected a number".into(),
        })?;
        match values[c] {
            Some(prev) if prev != x => return Err(InputError::Conflict(label.clone())),
            _ => values[c] = Some(x),
        }
    }
    Ok(RhoFunction::from_coset_values(
        q,
        values.into_iter().map(|v| v.unwrap_or(1.0)).collect(),
    )?)
}

pub fn load_rho(path: &Path, q: &QuotientSpace) -> Result<RhoFunction, InputError> {
    parse_rho_json(&read(path)?, q)
}

pub fn rational_to_string(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

pub fn parse_rational(text: &str) -> Option<BigRational> {
    let (n, d) = text.split_once('/').unwrap_or((text, "1"));
    let n = n.trim().parse().ok()?;
    let d: num_bigint::BigInt = d.trim().parse().ok()?;
    (!d.is_zero()).then(|| BigRational::new(n, d))
}

/// `{"cosets": [...], "c": [[["num/den", ...]]]}` with `c[a][b][z]`.
pub fn table_to_json(t: &StructureTable) -> Value {
    let c: Vec<Vec<Vec<String>>> = t
        .dense()
        .iter()
        .map(|row| {
            row.iter()
                .map(|cell| cell.iter().map(rational_to_string).collect())
                .collect()
        })
        .collect();
    json!({ "cosets": t.quotient().labels(), "c": c })
}

/// Coset labels and dense constants `c[a][b][z]`.
pub type DenseTable = (Vec<String>, Vec<Vec<Vec<BigRational>>>);

/// Inverse of [`table_to_json`].
pub fn table_from_json(value: &Value) -> Option<DenseTable> {
    let cosets = value
        .get("cosets")?
        .as_array()?
        .iter()
        .map(|v| v.as_str().map(str::to_string))
        .collect::<Option<Vec<_>>>()?;
    let c = value
        .get("c")?
        .as_array()?
        .iter()
        .map(|row| {
            row.as_array()?
                .iter()
                .map(|cell| {
                    cell.as_array()?
                        .iter()
                        .map(|v| parse_rational(v.as_str()?))
                        .collect::<Option<Vec<_>>>()
                })
                .collect::<Option<Vec<_>>>()
        })
        .collect::<Option<Vec<_>>>()?;
    Some((cosets, c))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::{build_coset_space, builtin_catalog, CatalogName};
    use crate::measures::Weight;
    use crate::quotient_algebra::structure_table;
    use std::sync::Arc;

    fn s3() -> FiniteGroup {
        builtin_catalog(CatalogName::Symmetric, 3).unwrap()
    }

    #[test]
    fn group_round_trip() {
        for g in [
            s3(),
            builtin_catalog(CatalogName::Quaternion8, 8).unwrap(),
            builtin_catalog(CatalogName::Dihedral, 4).unwrap(),
        ] {
            let text = serde_json::to_string(&group_to_spec(&g)).unwrap();
            let back = parse_group_json(&text).unwrap();
            assert_eq!(back, g);
            assert_eq!(back.name(), g.name());
        }
    }

    #[test]
    fn permutation_file() {
        let g = parse_group_json(r#"{"permutations": {"degree": 3, "generators": [[1,0,2],[1,2,0]]}}"#)
            .unwrap();
        assert_eq!(g.order(), 6);
        let bad = parse_group_json(r#"{"permutations": {"degree": 3, "generators": [[0,0,2]]}}"#);
        assert!(matches!(bad, Err(InputError::Group(GroupError::NotAPermutation(_)))));
        assert!(matches!(parse_group_json("{}"), Err(InputError::Schema(_))));
        assert!(matches!(parse_group_json("[1"), Err(InputError::Json(_))));
    }

    #[test]
    fn table_file_errors_surface() {
        let r = parse_group_json(r#"{"elements": ["e","a"], "table": [[0,1],[1,1]]}"#);
        assert!(matches!(r, Err(InputError::Group(_))));
    }

    #[test]
    fn builtin_source() {
        assert_eq!(resolve_group("builtin:S3").unwrap().order(), 6);
        assert_eq!(resolve_group("builtin:dihedral(5)").unwrap().order(), 10);
        assert!(matches!(
            resolve_group("/nonexistent/g.json"),
            Err(InputError::Read { .. })
        ));
    }

    #[test]
    fn subgroup_text() {
        let g = s3();
        assert_eq!(parse_subgroup(&g, "(12)").unwrap().order(), 2);
        assert_eq!(parse_subgroup(&g, "(1 2 3)").unwrap().order(), 3);
        assert_eq!(parse_subgroup(&g, "(12), (123)").unwrap().order(), 6);
        assert_eq!(parse_subgroup(&g, "").unwrap().order(), 1);
        assert!(matches!(parse_subgroup(&g, "x"), Err(InputError::UnknownLabel(_))));
        let a4 = builtin_catalog(CatalogName::Alternating, 4).unwrap();
        assert_eq!(parse_subgroup(&a4, "(12)(34) (13)(24)").unwrap().order(), 4);
        assert!(parse_subgroup(&a4, "(12)").is_err());
        let d4 = builtin_catalog(CatalogName::Dihedral, 4).unwrap();
        assert_eq!(parse_subgroup(&d4, "r").unwrap().order(), 4);
        assert_eq!(parse_subgroup(&d4, "s").unwrap().order(), 2);
    }

    #[test]
    fn ambiguous_label_is_rejected() {
        // element "(12)" is labelled as the 3-cycle: label and cycle readings disagree
        let g = s3();
        let mut labels = g.labels().to_vec();
        let t = g.index_of("(12)").unwrap();
        let c = g.index_of("(123)").unwrap();
        labels.swap(t, c);
        let odd = FiniteGroup::from_cayley_table("odd", labels, &g.cayley_rows()).unwrap();
        // table-built groups carry no permutations, so only the label reading applies
        assert_eq!(resolve_element(&odd, "(12)").unwrap(), c);
    }

    #[test]
    fn measure_files() {
        let g = s3();
        let q = build_coset_space(Arc::new(g.clone()), parse_subgroup(&g, "(12)").unwrap());
        let m = parse_measure_json(
            r#"{"carrier": "quotient", "weights": {"C1": [1, 0], "(23)": 0.5}}"#,
            CarrierKind::Quotient,
            &g,
            Some(&q),
        )
        .unwrap();
        assert_eq!(
            m.weights(),
            &[Complex64::new(0., 0.), Complex64::new(1., 0.), Complex64::new(0.5, 0.)]
        );
        let out = measure_to_json(&m);
        assert_eq!(out["carrier"], "quotient");
        assert_eq!(out["weights"].as_object().unwrap().len(), 2);
        let back = parse_measure_json(&out.to_string(), CarrierKind::Quotient, &g, Some(&q)).unwrap();
        assert_eq!(back, m);

        let dup = parse_measure_json(
            r#"{"carrier": "quotient", "weights": {"C1": 1, "(13)": 2}}"#,
            CarrierKind::Quotient,
            &g,
            Some(&q),
        );
        assert!(matches!(dup, Err(InputError::Conflict(_))));
        let wrong = parse_measure_json(
            r#"{"carrier": "group", "weights": {}}"#,
            CarrierKind::Quotient,
            &g,
            Some(&q),
        );
        assert!(matches!(wrong, Err(InputError::CarrierKind { .. })));
        let gm = parse_measure_json(
            r#"{"carrier": "group", "weights": {"(12)": [0, -1]}}"#,
            CarrierKind::Group,
            &g,
            None,
        )
        .unwrap();
        assert_eq!(gm.weight(g.index_of("(12)").unwrap()), &Complex64::new(0., -1.));
    }

    #[test]
    fn rho_files() {
        let g = s3();
        let q = build_coset_space(Arc::new(g.clone()), parse_subgroup(&g, "(12)").unwrap());
        let rho = parse_rho_json(r#"{"values": {"C1": 2, "(23)": 0.5}}"#, &q).unwrap();
        assert_eq!(rho.values(), &[1.0, 2.0, 0.5]);
        assert!(matches!(
            parse_rho_json(r#"{"values": {"C1": -1}}"#, &q),
            Err(InputError::Rho(RhoError::NonPositive { .. }))
        ));
        assert!(matches!(
            parse_rho_json(r#"{"values": {"C1": 2, "(13)": 3}}"#, &q),
            Err(InputError::Conflict(_))
        ));
    }

    #[test]
    fn table_json_round_trip() {
        let g = s3();
        let q = build_coset_space(Arc::new(g.clone()), parse_subgroup(&g, "(12)").unwrap());
        let t = structure_table(&q);
        let v = table_to_json(&t);
        assert_eq!(v["c"][1][2], json!(["1/2", "0/1", "1/2"]));
        let (cosets, c) = table_from_json(&v).unwrap();
        assert_eq!(cosets, vec!["C0", "C1", "C2"]);
        assert_eq!(c, t.dense());
        assert_eq!(parse_rational("3/6"), Some(BigRational::from_ratio(1, 2)));
        assert_eq!(parse_rational("1/0"), None);
    }
}
