//! Builtin groups with fixed labelings.
//!
//! | name            | order  | construction                 | labels                              |
//! |-----------------|--------|------------------------------|-------------------------------------|
//! | `cyclic(n)`     | n      | Cayley table, `a^i a^j = a^(i+j)` | `e`, `a`, `a^2`, ...           |
//! | `dihedral(n)`   | 2n     | Cayley table, index `k + n j` for `r^k s^j` | `e`, `r`, `r^2`, ..., `s`, `rs`, `r^2s`, ... |
//! | `symmetric(n)`  | n!     | closure of `(12)`, `(12..n)` | cycle notation                      |
//! | `alternating(n)`| n!/2   | closure of `(12k)`, k = 3..n | cycle notation                      |
//! | `quaternion8`   | 8      | Cayley table                 | `1`, `-1`, `i`, `-i`, `j`, `-j`, `k`, `-k` |
//! | `direct_product(n)` | 2n | `C2 × Cn`                    | `(x,y)` pairs                       |
//!
//! In the dihedral group `s r s = r⁻¹`.

use std::str::FromStr;

use super::perm::{closure, Permutation};
use super::{FiniteGroup, GroupError, DEFAULT_ORDER_CAP};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CatalogName {
    Cyclic,
    Dihedral,
    Symmetric,
    Alternating,
    Quaternion8,
    DirectProduct,
}

impl CatalogName {
    pub fn as_str(self) -> &'static str {
        match self {
            CatalogName::Cyclic => "cyclic",
            CatalogName::Dihedral => "dihedral",
            CatalogName::Symmetric => "symmetric",
            CatalogName::Alternating => "alternating",
            CatalogName::Quaternion8 => "quaternion8",
            CatalogName::DirectProduct => "direct_product",
        }
    }
}

impl FromStr for CatalogName {
    type Err = GroupError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "cyclic" => CatalogName::Cyclic,
            "dihedral" => CatalogName::Dihedral,
            "symmetric" => CatalogName::Symmetric,
            "alternating" => CatalogName::Alternating,
            "quaternion8" => CatalogName::Quaternion8,
            "direct_product" => CatalogName::DirectProduct,
            other => return Err(GroupError::UnknownName(other.to_string())),
        })
    }
}

pub fn builtin_catalog(name: CatalogName, parameter: usize) -> Result<FiniteGroup, GroupError> {
    builtin_catalog_capped(name, parameter, DEFAULT_ORDER_CAP)
}

pub fn builtin_catalog_capped(
    name: CatalogName,
    parameter: usize,
    cap: usize,
) -> Result<FiniteGroup, GroupError> {
    let invalid = || GroupError::InvalidParameter {
        name: name.as_str().to_string(),
        parameter,
    };
    let check_cap = |order: usize| {
        if order > cap {
            Err(GroupError::CapExceeded { cap })
        } else {
            Ok(())
        }
    };
    match name {
        CatalogName::Cyclic => {
            if parameter == 0 {
                return Err(invalid());
            }
            check_cap(parameter)?;
            Ok(cyclic(parameter))
        }
        CatalogName::Dihedral => {
            if parameter == 0 {
                return Err(invalid());
            }
            check_cap(2 * parameter)?;
            Ok(dihedral(parameter))
        }
        CatalogName::Symmetric => {
            if parameter == 0 {
                return Err(invalid());
            }
            let mut gens = Vec::new();
            if parameter >= 2 {
                gens.push(cycle(parameter, &[0, 1]));
            }
            if parameter >= 3 {
                gens.push(cycle(parameter, &(0..parameter).collect::<Vec<_>>()));
            }
            Ok(closure(&format!("S{parameter}"), parameter, &gens, cap)?)
        }
        CatalogName::Alternating => {
            if parameter == 0 {
                return Err(invalid());
            }
            let gens: Vec<_> = (2..parameter).map(|k| cycle(parameter, &[0, 1, k])).collect();
            Ok(closure(&format!("A{parameter}"), parameter, &gens, cap)?)
        }
        CatalogName::Quaternion8 => {
            check_cap(8)?;
            Ok(quaternion8())
        }
        CatalogName::DirectProduct => {
            if parameter == 0 {
                return Err(invalid());
            }
            check_cap(2 * parameter)?;
            Ok(cyclic(2)
                .direct_product(&cyclic(parameter))
                .with_name(format!("C2xC{parameter}")))
        }
    }
}

/// Parses `NAME(k)` long forms (`symmetric(3)`) and short forms (`S3`, `A4`,
/// `D4`, `C6`, `Q8`).
pub fn parse_builtin(spec: &str) -> Result<FiniteGroup, GroupError> {
    let spec = spec.trim();
    if let Some(open) = spec.find('(') {
        let name: CatalogName = spec[..open].parse()?;
        let inner = spec[open + 1..]
            .strip_suffix(')')
            .ok_or_else(|| GroupError::Parse(format!("unclosed parameter in {spec:?}")))?;
        let parameter = if inner.trim().is_empty() {
            0
        } else {
            inner
                .trim()
                .parse()
                .map_err(|_| GroupError::Parse(format!("bad parameter in {spec:?}")))?
        };
        return builtin_catalog(name, parameter);
    }
    if let Ok(name) = spec.parse::<CatalogName>() {
        return builtin_catalog(name, 0);
    }
    if spec == "Q8" {
        return builtin_catalog(CatalogName::Quaternion8, 8);
    }
    let (head, digits) = spec.split_at(spec.find(|c: char| c.is_ascii_digit()).unwrap_or(spec.len()));
    let parameter: usize = digits
        .parse()
        .map_err(|_| GroupError::UnknownName(spec.to_string()))?;
    let name = match head {
        "C" => CatalogName::Cyclic,
        "D" => CatalogName::Dihedral,
        "S" => CatalogName::Symmetric,
        "A" => CatalogName::Alternating,
        _ => return Err(GroupError::UnknownName(spec.to_string())),
    };
    builtin_catalog(name, parameter).map(|g| g.with_name(spec))
}

fn cycle(degree: usize, points: &[usize]) -> Permutation {
    let mut images: Vec<usize> = (0..degree).collect();
    for (k, &p) in points.iter().enumerate() {
        images[p] = points[(k + 1) % points.len()];
    }
    Permutation::from_images(&images).expect("cycle is a bijection")
}

fn power_label(base: &str, k: usize) -> String {
    match k {
        0 => String::new(),
        1 => base.to_string(),
        _ => format!("{base}^{k}"),
    }
}

fn cyclic(n: usize) -> FiniteGroup {
    let labels = (0..n)
        .map(|k| if k == 0 { "e".to_string() } else { power_label("a", k) })
        .collect();
    let table = (0..n)
        .flat_map(|a| (0..n).map(move |b| ((a + b) % n) as u32))
        .collect();
    let inv = (0..n).map(|a| (n - a) % n).collect();
    FiniteGroup::from_parts(format!("C{n}"), labels, table, inv, 0, None)
}

fn dihedral(n: usize) -> FiniteGroup {
    let idx = |k: usize, j: usize| k + n * j;
    let mut labels = Vec::with_capacity(2 * n);
    for j in 0..2 {
        for k in 0..n {
            labels.push(match (k, j) {
                (0, 0) => "e".to_string(),
                (_, 0) => power_label("r", k),
                (_, _) => format!("{}s", power_label("r", k)),
            });
        }
    }
    // (r^a s^b)(r^c s^d) = r^(a + (-1)^b c) s^(b + d)
    let mut table = Vec::with_capacity(4 * n * n);
    for b in 0..2 {
        for a in 0..n {
            for d in 0..2 {
                for c in 0..n {
                    let k = if b == 0 { (a + c) % n } else { (a + n - c) % n };
                    table.push(idx(k, (b + d) % 2) as u32);
                }
            }
        }
    }
    let inv = (0..2)
        .flat_map(|j| (0..n).map(move |k| if j == 0 { idx((n - k) % n, 0) } else { idx(k, 1) }))
        .collect();
    FiniteGroup::from_parts(format!("D{n}"), labels, table, inv, 0, None)
}

fn quaternion8() -> FiniteGroup {
    // units 1, i, j, k; unit products as (sign, unit)
    const UNIT: [[(bool, usize); 4]; 4] = [
        [(false, 0), (false, 1), (false, 2), (false, 3)],
        [(false, 1), (true, 0), (false, 3), (true, 2)],
        [(false, 2), (true, 3), (true, 0), (false, 1)],
        [(false, 3), (false, 2), (true, 1), (true, 0)],
    ];
    let labels = ["1", "-1", "i", "-i", "j", "-j", "k", "-k"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    let decode = |x: usize| (x % 2 == 1, x / 2);
    let encode = |neg: bool, u: usize| 2 * u + usize::from(neg);
    let mut table = Vec::with_capacity(64);
    for x in 0..8 {
        for y in 0..8 {
            let (sx, ux) = decode(x);
            let (sy, uy) = decode(y);
            let (s, u) = UNIT[ux][uy];
            table.push(encode(sx ^ sy ^ s, u) as u32);
        }
    }
    let inv = (0..8)
        .map(|x| {
            let (s, u) = decode(x);
            if u == 0 {
                x
            } else {
                encode(!s, u)
            }
        })
        .collect();
    FiniteGroup::from_parts("Q8".into(), labels, table, inv, 0, None)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Re-validates through the Cayley-table builder, which scans all axioms.
    fn revalidate(g: &FiniteGroup) {
        let h = FiniteGroup::from_cayley_table(g.name(), g.labels().to_vec(), &g.cayley_rows())
            .unwrap_or_else(|e| panic!("{} fails validation: {e}", g.name()));
        assert_eq!(h.identity(), g.identity());
        for a in 0..g.order() {
            assert_eq!(h.inv(a), g.inv(a));
        }
    }

    #[test]
    fn orders() {
        let cases = [
            (CatalogName::Cyclic, 6, 6),
            (CatalogName::Dihedral, 4, 8),
            (CatalogName::Dihedral, 1, 2),
            (CatalogName::Symmetric, 4, 24),
            (CatalogName::Symmetric, 1, 1),
            (CatalogName::Alternating, 4, 12),
            (CatalogName::Alternating, 5, 60),
            (CatalogName::Quaternion8, 0, 8),
            (CatalogName::DirectProduct, 2, 4),
        ];
        for (name, k, order) in cases {
            let g = builtin_catalog(name, k).unwrap();
            assert_eq!(g.order(), order, "{name:?}({k})");
            revalidate(&g);
        }
    }

    #[test]
    fn quaternion_has_one_involution() {
        let q = builtin_catalog(CatalogName::Quaternion8, 8).unwrap();
        let involutions: Vec<&str> = (0..8)
            .filter(|&x| q.element_order(x) == 2)
            .map(|x| q.label(x))
            .collect();
        assert_eq!(involutions, ["-1"]);
        let i = q.index_of("i").unwrap();
        let j = q.index_of("j").unwrap();
        assert_eq!(q.label(q.mul(i, j)), "k");
        assert_eq!(q.label(q.mul(j, i)), "-k");
    }

    #[test]
    fn dihedral_relations() {
        let d = builtin_catalog(CatalogName::Dihedral, 4).unwrap();
        let r = d.index_of("r").unwrap();
        let s = d.index_of("s").unwrap();
        assert_eq!(d.element_order(r), 4);
        assert_eq!(d.element_order(s), 2);
        assert_eq!(d.mul(d.mul(s, r), s), d.inv(r));
        assert_eq!(d.label(d.mul(r, s)), "rs");
    }

    #[test]
    fn short_and_long_names() {
        assert_eq!(parse_builtin("S3").unwrap().order(), 6);
        assert_eq!(parse_builtin("symmetric(3)").unwrap().order(), 6);
        assert_eq!(parse_builtin("Q8").unwrap().order(), 8);
        assert_eq!(parse_builtin("quaternion8").unwrap().order(), 8);
        assert_eq!(parse_builtin("C6").unwrap().order(), 6);
        assert_eq!(parse_builtin("direct_product(3)").unwrap().order(), 6);
        assert!(matches!(parse_builtin("Z5"), Err(GroupError::UnknownName(_))));
        assert!(matches!(
            parse_builtin("frobenius(5)"),
            Err(GroupError::UnknownName(_))
        ));
    }

    #[test]
    fn cap_applies_to_catalog() {
        assert_eq!(
            builtin_catalog_capped(CatalogName::Symmetric, 5, 100).unwrap_err(),
            GroupError::CapExceeded { cap: 100 }
        );
        assert_eq!(
            builtin_catalog_capped(CatalogName::Cyclic, 101, 100).unwrap_err(),
            GroupError::CapExceeded { cap: 100 }
        );
    }
}
