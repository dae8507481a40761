use std::sync::Arc;

use super::{FiniteGroup, Subgroup};
use crate::measures::{Carrier, CarrierKind};

/// The left-coset space `G/H`.
///
/// Cosets are numbered in order of their smallest element index, and that
/// element is the canonical representative. Coset `c` is labelled `C{c}`.
#[derive(Clone, Debug)]
pub struct QuotientSpace {
    group: Arc<FiniteGroup>,
    subgroup: Subgroup,
    reps: Vec<usize>,
    coset_of: Vec<usize>,
    cosets: Vec<Vec<usize>>,
    labels: Arc<[String]>,
}

/// Partitions `G` into left cosets `xH`.
pub fn build_coset_space(group: Arc<FiniteGroup>, subgroup: Subgroup) -> QuotientSpace {
    let n = group.order();
    let mut coset_of = vec![usize::MAX; n];
    let mut reps = Vec::new();
    let mut cosets = Vec::new();
    for x in 0..n {
        if coset_of[x] != usize::MAX {
            continue;
        }
        let c = reps.len();
        reps.push(x);
        let mut members: Vec<usize> = subgroup.members().iter().map(|&h| group.mul(x, h)).collect();
        members.sort_unstable();
        for &y in &members {
            coset_of[y] = c;
        }
        cosets.push(members);
    }
    let labels: Vec<String> = (0..reps.len()).map(|c| format!("C{c}")).collect();
    QuotientSpace {
        group,
        subgroup,
        reps,
        coset_of,
        cosets,
        labels: labels.into(),
    }
}

/// How a textual coset reference resolved.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CosetLookup {
    Found(usize),
    Ambiguous { by_name: usize, by_element: usize },
    Missing,
}

impl QuotientSpace {
    pub fn group(&self) -> &FiniteGroup {
        &self.group
    }

    pub fn group_arc(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    pub fn subgroup(&self) -> &Subgroup {
        &self.subgroup
    }

    pub fn coset_count(&self) -> usize {
        self.reps.len()
    }

    pub fn subgroup_order(&self) -> usize {
        self.subgroup.order()
    }

    pub fn rep(&self, coset: usize) -> usize {
        self.reps[coset]
    }

    #[inline]
    pub fn coset_of(&self, x: usize) -> usize {
        self.coset_of[x]
    }

    /// Elements of a coset, ascending.
    pub fn coset_members(&self, coset: usize) -> &[usize] {
        &self.cosets[coset]
    }

    /// The base coset `H` itself.
    pub fn base_coset(&self) -> usize {
        self.coset_of[self.group.identity()]
    }

    pub fn label(&self, coset: usize) -> &str {
        &self.labels[coset]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn carrier(&self) -> Carrier {
        Carrier::new(CarrierKind::Quotient, Arc::clone(&self.labels))
    }

    /// Resolves `C{k}` or the label of any element of the coset.
    pub fn lookup(&self, text: &str) -> CosetLookup {
        let by_name = self.labels.iter().position(|l| l == text);
        let by_element = self.group.index_of(text).map(|x| self.coset_of(x));
        match (by_name, by_element) {
            (Some(a), Some(b)) if a != b => CosetLookup::Ambiguous {
                by_name: a,
                by_element: b,
            },
            (Some(a), _) | (None, Some(a)) => CosetLookup::Found(a),
            (None, None) => CosetLookup::Missing,
        }
    }

    /// True when `coset_of(x y)` depends only on the cosets of `x` and `y`,
    /// found by exhaustive scan. Holds exactly when `H` is normal.
    pub fn has_well_defined_coset_product(&self) -> bool {
        let g = &self.group;
        let n = self.coset_count();
        let mut product = vec![usize::MAX; n * n];
        for x in 0..g.order() {
            for y in 0..g.order() {
                let slot = &mut product[self.coset_of(x) * n + self.coset_of(y)];
                let z = self.coset_of(g.mul(x, y));
                if *slot == usize::MAX {
                    *slot = z;
                } else if *slot != z {
                    return false;
                }
            }
        }
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::{builtin_catalog, generate_subgroup, test_normality, CatalogName};

    fn s3_mod(generator: &str) -> QuotientSpace {
        let g = builtin_catalog(CatalogName::Symmetric, 3).unwrap();
        let h = generate_subgroup(&g, &[g.index_of(generator).unwrap()]).unwrap();
        build_coset_space(Arc::new(g), h)
    }

    #[test]
    fn s3_cosets_of_transposition() {
        let q = s3_mod("(12)");
        assert_eq!(q.coset_count(), 3);
        let names: Vec<Vec<&str>> = (0..3)
            .map(|c| q.coset_members(c).iter().map(|&x| q.group().label(x)).collect())
            .collect();
        // BFS order e,(12),(123),(23),(13),(132)
        assert_eq!(
            names,
            vec![vec!["e", "(12)"], vec!["(123)", "(13)"], vec!["(23)", "(132)"]]
        );
        assert_eq!(q.rep(0), q.group().identity());
        assert_eq!(q.base_coset(), 0);
    }

    #[test]
    fn left_coset_relation() {
        let q = s3_mod("(12)");
        let g = q.group();
        for x in 0..6 {
            for y in 0..6 {
                let same = q.subgroup().contains(g.mul(g.inv(x), y));
                assert_eq!(q.coset_of(x) == q.coset_of(y), same);
            }
        }
    }

    #[test]
    fn trivial_subgroup_gives_singletons() {
        let g = builtin_catalog(CatalogName::Dihedral, 4).unwrap();
        let h = generate_subgroup(&g, &[]).unwrap();
        let q = build_coset_space(Arc::new(g), h);
        assert_eq!(q.coset_count(), 8);
        for x in 0..8 {
            assert_eq!(q.coset_of(x), x);
        }
    }

    #[test]
    fn coset_product_well_defined_iff_normal() {
        for gen in ["(12)", "(123)"] {
            let q = s3_mod(gen);
            assert_eq!(
                q.has_well_defined_coset_product(),
                test_normality(q.group(), q.subgroup())
            );
        }
    }

    #[test]
    fn lookup_by_name_or_member() {
        let q = s3_mod("(12)");
        assert_eq!(q.lookup("C1"), CosetLookup::Found(1));
        assert_eq!(q.lookup("(13)"), CosetLookup::Found(1));
        assert_eq!(q.lookup("(132)"), CosetLookup::Found(2));
        assert_eq!(q.lookup("nope"), CosetLookup::Missing);
    }
}
