//! Finite groups given by a full multiplication table, their subgroups, and
//! left-coset spaces.

mod catalog;
mod perm;
mod quotient;

use std::collections::HashSet;
use std::sync::Arc;

use thiserror::Error;

use crate::measures::{Carrier, CarrierKind};

pub use catalog::{builtin_catalog, builtin_catalog_capped, parse_builtin, CatalogName};
pub use perm::{
    build_from_permutation_generators, build_from_permutation_generators_capped, closure,
    PermRep, Permutation,
};
pub use quotient::{build_coset_space, CosetLookup, QuotientSpace};

/// Largest group order produced by closure or the builtin catalog.
pub const DEFAULT_ORDER_CAP: usize = 10080;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GroupError {
    #[error("a group needs at least one element")]
    Empty,
    #[error("table shape: {0}")]
    Shape(String),
    #[error("duplicate element label {0:?}")]
    DuplicateLabel(String),
    #[error("table not closed: mul({a}, {b}) = {value} is outside 0..{order}")]
    NotClosed {
        a: usize,
        b: usize,
        value: usize,
        order: usize,
    },
    #[error("no two-sided identity: candidate {candidate} fails against element {witness}")]
    NoIdentity { candidate: usize, witness: usize },
    #[error("element {element} has no two-sided inverse")]
    NoInverse { element: usize },
    #[error("not associative: ({a}*{b})*{c} != {a}*({b}*{c})")]
    NotAssociative { a: usize, b: usize, c: usize },
    #[error("group order exceeds the cap of {cap}")]
    CapExceeded { cap: usize },
    #[error("not a permutation: {0}")]
    NotAPermutation(String),
    #[error("unknown catalog group {0:?}")]
    UnknownName(String),
    #[error("invalid parameter {parameter} for catalog group {name}")]
    InvalidParameter { name: String, parameter: usize },
    #[error("element index {index} out of range for a group of order {order}")]
    IndexOutOfRange { index: usize, order: usize },
    #[error("not a subgroup: {0}")]
    NotASubgroup(String),
    #[error("parse error: {0}")]
    Parse(String),
}

/// A finite group stored as its complete Cayley table.
///
/// Immutable after construction. Haar measure on the group is counting
/// measure and the modular function is identically one.
#[derive(Clone, Debug)]
pub struct FiniteGroup {
    name: String,
    labels: Arc<[String]>,
    table: Vec<u32>,
    inv: Vec<usize>,
    identity: usize,
    perms: Option<PermRep>,
}

impl FiniteGroup {
    pub(crate) fn from_parts(
        name: String,
        labels: Vec<String>,
        table: Vec<u32>,
        inv: Vec<usize>,
        identity: usize,
        perms: Option<PermRep>,
    ) -> Self {
        Self {
            name,
            labels: labels.into(),
            table,
            inv,
            identity,
            perms,
        }
    }

    /// Validates a Cayley table and builds the group.
    ///
    /// Checks run in order: shape, closure, identity, inverses, then a full
    /// triple scan for associativity. Each error names the first offending
    /// tuple in row-major order.
    pub fn from_cayley_table(
        name: &str,
        labels: Vec<String>,
        rows: &[Vec<usize>],
    ) -> Result<Self, GroupError> {
        let n = rows.len();
        if n == 0 {
            return Err(GroupError::Empty);
        }
        if labels.len() != n {
            return Err(GroupError::Shape(format!(
                "{} labels for a {n}-row table",
                labels.len()
            )));
        }
        let mut seen = HashSet::new();
        for l in &labels {
            if !seen.insert(l.as_str()) {
                return Err(GroupError::DuplicateLabel(l.clone()));
            }
        }
        let mut table = Vec::with_capacity(n * n);
        for (a, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(GroupError::Shape(format!(
                    "row {a} has {} entries, expected {n}",
                    row.len()
                )));
            }
            for (b, &value) in row.iter().enumerate() {
                if value >= n {
                    return Err(GroupError::NotClosed {
                        a,
                        b,
                        value,
                        order: n,
                    });
                }
                table.push(value as u32);
            }
        }
        let mul = |a: usize, b: usize| table[a * n + b] as usize;

        let identity = (0..n)
            .find(|&e| (0..n).all(|x| mul(e, x) == x && mul(x, e) == x))
            .ok_or_else(|| {
                let witness = (0..n)
                    .find(|&x| mul(0, x) != x || mul(x, 0) != x)
                    .unwrap_or(0);
                GroupError::NoIdentity {
                    candidate: 0,
                    witness,
                }
            })?;

        let mut inv = Vec::with_capacity(n);
        for a in 0..n {
            let b = (0..n)
                .find(|&b| mul(a, b) == identity && mul(b, a) == identity)
                .ok_or(GroupError::NoInverse { element: a })?;
            inv.push(b);
        }

        for a in 0..n {
            for b in 0..n {
                let ab = mul(a, b);
                for c in 0..n {
                    if mul(ab, c) != mul(a, mul(b, c)) {
                        return Err(GroupError::NotAssociative { a, b, c });
                    }
                }
            }
        }

        Ok(Self::from_parts(
            name.to_string(),
            labels,
            table,
            inv,
            identity,
            None,
        ))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn order(&self) -> usize {
        self.inv.len()
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a * self.order() + b] as usize
    }

    #[inline]
    pub fn inv(&self, a: usize) -> usize {
        self.inv[a]
    }

    pub fn label(&self, a: usize) -> &str {
        &self.labels[a]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// Modular function; constant one on any finite group.
    pub fn modular_function(&self, _x: usize) -> f64 {
        1.0
    }

    pub fn permutations(&self) -> Option<&PermRep> {
        self.perms.as_ref()
    }

    pub fn element_order(&self, a: usize) -> usize {
        let mut k = 1;
        let mut x = a;
        while x != self.identity {
            x = self.mul(x, a);
            k += 1;
        }
        k
    }

    /// Cayley table as nested rows, the inverse of [`Self::from_cayley_table`].
    pub fn cayley_rows(&self) -> Vec<Vec<usize>> {
        let n = self.order();
        (0..n)
            .map(|a| (0..n).map(|b| self.mul(a, b)).collect())
            .collect()
    }

    pub fn carrier(&self) -> Carrier {
        Carrier::new(CarrierKind::Group, Arc::clone(&self.labels))
    }

    pub(crate) fn check_index(&self, index: usize) -> Result<(), GroupError> {
        if index < self.order() {
            Ok(())
        } else {
            Err(GroupError::IndexOutOfRange {
                index,
                order: self.order(),
            })
        }
    }

    /// Direct product `self × other`; element `(a, b)` has index
    /// `a * |other| + b` and label `(label_a,label_b)`.
    pub fn direct_product(&self, other: &FiniteGroup) -> FiniteGroup {
        let (n, m) = (self.order(), other.order());
        let mut labels = Vec::with_capacity(n * m);
        for a in 0..n {
            for b in 0..m {
                labels.push(format!("({},{})", self.label(a), other.label(b)));
            }
        }
        let mut table = Vec::with_capacity(n * m * n * m);
        for a1 in 0..n {
            for b1 in 0..m {
                for a2 in 0..n {
                    for b2 in 0..m {
                        table.push((self.mul(a1, a2) * m + other.mul(b1, b2)) as u32);
                    }
                }
            }
        }
        let mut inv = Vec::with_capacity(n * m);
        for a in 0..n {
            for b in 0..m {
                inv.push(self.inv(a) * m + other.inv(b));
            }
        }
        FiniteGroup::from_parts(
            format!("{}x{}", self.name, other.name),
            labels,
            table,
            inv,
            self.identity * m + other.identity,
            None,
        )
    }
}

impl PartialEq for FiniteGroup {
    fn eq(&self, other: &Self) -> bool {
        self.labels == other.labels && self.table == other.table && self.identity == other.identity
    }
}

/// A subgroup, stored as the sorted list of its member indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subgroup {
    members: Vec<usize>,
    mask: Vec<bool>,
}

impl Subgroup {
    /// Checks closure under multiplication and inversion; finite groups need
    /// nothing else.
    pub fn from_members(g: &FiniteGroup, members: &[usize]) -> Result<Self, GroupError> {
        let mut mask = vec![false; g.order()];
        for &m in members {
            g.check_index(m)?;
            mask[m] = true;
        }
        if !mask[g.identity()] {
            return Err(GroupError::NotASubgroup("identity missing".into()));
        }
        let sorted: Vec<usize> = (0..g.order()).filter(|&i| mask[i]).collect();
        for &a in &sorted {
            if !mask[g.inv(a)] {
                return Err(GroupError::NotASubgroup(format!(
                    "inverse of {} missing",
                    g.label(a)
                )));
            }
            for &b in &sorted {
                if !mask[g.mul(a, b)] {
                    return Err(GroupError::NotASubgroup(format!(
                        "{} * {} leaves the set",
                        g.label(a),
                        g.label(b)
                    )));
                }
            }
        }
        Ok(Self {
            members: sorted,
            mask,
        })
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn order(&self) -> usize {
        self.members.len()
    }

    pub fn contains(&self, x: usize) -> bool {
        self.mask.get(x).copied().unwrap_or(false)
    }

    pub fn is_trivial(&self) -> bool {
        self.members.len() == 1
    }

    /// Modular function of `H`; constant one.
    pub fn modular_function(&self, _h: usize) -> f64 {
        1.0
    }
}

/// Smallest subgroup containing `generators`; the empty list gives `{e}`.
pub fn generate_subgroup(g: &FiniteGroup, generators: &[usize]) -> Result<Subgroup, GroupError> {
    for &x in generators {
        g.check_index(x)?;
    }
    let mut mask = vec![false; g.order()];
    mask[g.identity()] = true;
    let mut members = vec![g.identity()];
    let mut frontier = vec![g.identity()];
    while let Some(x) = frontier.pop() {
        for &s in generators {
            let y = g.mul(x, s);
            if !mask[y] {
                mask[y] = true;
                members.push(y);
                frontier.push(y);
            }
        }
    }
    members.sort_unstable();
    Ok(Subgroup { members, mask })
}

/// Whole group as a subgroup of itself.
pub fn whole_group(g: &FiniteGroup) -> Subgroup {
    Subgroup {
        members: (0..g.order()).collect(),
        mask: vec![true; g.order()],
    }
}

/// Brute-force conjugation scan: true iff `g h g⁻¹ ∈ H` for all `g`, `h`.
pub fn test_normality(g: &FiniteGroup, h: &Subgroup) -> bool {
    (0..g.order()).all(|x| {
        h.members()
            .iter()
            .all(|&m| h.contains(g.mul(g.mul(x, m), g.inv(x))))
    })
}
