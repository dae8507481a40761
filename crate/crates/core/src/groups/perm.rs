//! Permutations on `{0, .., degree - 1}` and breadth-first closure of a
//! generating set.
//!
//! Composition follows the functional convention `(p ∘ q)(i) = p(q(i))`: the
//! right factor acts first. Points are printed 1-based in cycle notation, so
//! the images `[1, 0, 2]` print as `(12)`.

use std::collections::{HashMap, VecDeque};
use std::fmt;

use super::{FiniteGroup, GroupError, DEFAULT_ORDER_CAP};

/// A bijection of `{0, .., degree - 1}` stored as its image vector.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    images: Vec<u32>,
}

impl Permutation {
    pub fn identity(degree: usize) -> Self {
        Self {
            images: (0..degree as u32).collect(),
        }
    }

    /// Validates that `images` is a bijection and wraps it.
    pub fn from_images(images: &[usize]) -> Result<Self, GroupError> {
        let degree = images.len();
        let mut seen = vec![false; degree];
        for (i, &img) in images.iter().enumerate() {
            if img >= degree {
                return Err(GroupError::NotAPermutation(format!(
                    "image {img} of point {i} is outside 0..{degree}"
                )));
            }
            if seen[img] {
                return Err(GroupError::NotAPermutation(format!(
                    "point {img} is hit twice"
                )));
            }
            seen[img] = true;
        }
        Ok(Self {
            images: images.iter().map(|&i| i as u32).collect(),
        })
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    pub fn image(&self, point: usize) -> usize {
        self.images[point] as usize
    }

    pub fn images(&self) -> Vec<usize> {
        self.images.iter().map(|&i| i as usize).collect()
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &j)| i as u32 == j)
    }

    /// `self ∘ other`, i.e. apply `other` first.
    pub fn compose(&self, other: &Self) -> Self {
        debug_assert_eq!(self.degree(), other.degree());
        Self {
            images: other
                .images
                .iter()
                .map(|&j| self.images[j as usize])
                .collect(),
        }
    }

    pub fn inverse(&self) -> Self {
        let mut images = vec![0u32; self.degree()];
        for (i, &j) in self.images.iter().enumerate() {
            images[j as usize] = i as u32;
        }
        Self { images }
    }

    /// Disjoint cycles of length at least two, each starting at its smallest
    /// point, ordered by that point.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.degree()];
        let mut out = Vec::new();
        for start in 0..self.degree() {
            if seen[start] {
                continue;
            }
            let mut cycle = vec![start];
            seen[start] = true;
            let mut next = self.image(start);
            while next != start {
                seen[next] = true;
                cycle.push(next);
                next = self.image(next);
            }
            if cycle.len() > 1 {
                out.push(cycle);
            }
        }
        out
    }

    /// Cycle notation with 1-based points; `e` for the identity. Degrees above
    /// nine separate points with commas so that labels stay unambiguous.
    pub fn cycle_notation(&self) -> String {
        let cycles = self.cycles();
        if cycles.is_empty() {
            return "e".to_string();
        }
        let sep = if self.degree() > 9 { "," } else { "" };
        cycles
            .iter()
            .map(|c| {
                let pts: Vec<String> = c.iter().map(|p| (p + 1).to_string()).collect();
                format!("({})", pts.join(sep))
            })
            .collect()
    }

    /// Parses a product of cycles such as `(12)(34)`, `(1,2,10)` or `(1 2)`.
    ///
    /// Cycles are composed as written, so `(12)(23)` is `(12) ∘ (23)`. Inside a
    /// cycle without separators every digit is one point. `e` and `()` denote
    /// the identity.
    pub fn parse_cycles(text: &str, degree: usize) -> Result<Self, GroupError> {
        let bad = |why: &str| GroupError::Parse(format!("cycle notation {text:?}: {why}"));
        let trimmed = text.trim();
        let mut result = Self::identity(degree);
        if trimmed == "e" || trimmed == "()" || trimmed.is_empty() {
            return Ok(result);
        }
        let mut rest = trimmed;
        while !rest.is_empty() {
            let body_start = rest
                .strip_prefix('(')
                .ok_or_else(|| bad("expected '('"))?;
            let close = body_start.find(')').ok_or_else(|| bad("unclosed cycle"))?;
            let body = &body_start[..close];
            rest = body_start[close + 1..].trim_start();

            let points: Vec<usize> = if body.contains(',') || body.contains(char::is_whitespace)
            {
                body.split(|c: char| c == ',' || c.is_whitespace())
                    .filter(|s| !s.is_empty())
                    .map(|s| s.parse::<usize>().map_err(|_| bad("non-numeric point")))
                    .collect::<Result<_, _>>()?
            } else {
                body.chars()
                    .map(|c| {
                        c.to_digit(10)
                            .map(|d| d as usize)
                            .ok_or_else(|| bad("non-numeric point"))
                    })
                    .collect::<Result<_, _>>()?
            };
            let mut cycle_images: Vec<usize> = (0..degree).collect();
            let mut used = vec![false; degree];
            for (k, &p) in points.iter().enumerate() {
                if p == 0 || p > degree {
                    return Err(bad(&format!("point {p} outside 1..={degree}")));
                }
                if used[p - 1] {
                    return Err(bad(&format!("point {p} repeated in one cycle")));
                }
                used[p - 1] = true;
                let next = points[(k + 1) % points.len()];
                cycle_images[p - 1] = next - 1;
            }
            let cycle = Self::from_images(&cycle_images)?;
            result = result.compose(&cycle);
        }
        Ok(result)
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.cycle_notation())
    }
}

/// Permutation representation attached to a group built from generators.
#[derive(Clone, Debug)]
pub struct PermRep {
    pub(crate) degree: usize,
    pub(crate) elements: Vec<Permutation>,
    pub(crate) index: HashMap<Permutation, usize>,
}

impl PermRep {
    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn element(&self, i: usize) -> &Permutation {
        &self.elements[i]
    }

    pub fn index_of(&self, p: &Permutation) -> Option<usize> {
        self.index.get(p).copied()
    }
}

/// Breadth-first closure of `generators` under composition.
///
/// Element order is discovery order: identity first, then for each dequeued
/// element `x` the products `x ∘ g` for the generators in the given order.
pub fn closure(
    name: &str,
    degree: usize,
    generators: &[Permutation],
    cap: usize,
) -> Result<FiniteGroup, GroupError> {
    for (k, g) in generators.iter().enumerate() {
        if g.degree() != degree {
            return Err(GroupError::NotAPermutation(format!(
                "generator {k} has degree {} but {degree} was requested",
                g.degree()
            )));
        }
    }
    let id = Permutation::identity(degree);
    let mut elements = vec![id.clone()];
    let mut index = HashMap::from([(id, 0usize)]);
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        for g in generators {
            let p = elements[i].compose(g);
            if !index.contains_key(&p) {
                if elements.len() >= cap {
                    return Err(GroupError::CapExceeded { cap });
                }
                index.insert(p.clone(), elements.len());
                queue.push_back(elements.len());
                elements.push(p);
            }
        }
    }

    let n = elements.len();
    let mut table = Vec::with_capacity(n * n);
    for a in &elements {
        for b in &elements {
            table.push(index[&a.compose(b)] as u32);
        }
    }
    let inv = elements.iter().map(|p| index[&p.inverse()]).collect();
    let labels = elements.iter().map(Permutation::cycle_notation).collect();
    Ok(FiniteGroup::from_parts(
        name.to_string(),
        labels,
        table,
        inv,
        0,
        Some(PermRep {
            degree,
            elements,
            index,
        }),
    ))
}

/// Builds a group from generator image vectors, with the default order cap.
pub fn build_from_permutation_generators(
    degree: usize,
    generators: &[Vec<usize>],
) -> Result<FiniteGroup, GroupError> {
    build_from_permutation_generators_capped(degree, generators, DEFAULT_ORDER_CAP)
}

pub fn build_from_permutation_generators_capped(
    degree: usize,
    generators: &[Vec<usize>],
    cap: usize,
) -> Result<FiniteGroup, GroupError> {
    let gens = generators
        .iter()
        .map(|g| Permutation::from_images(g))
        .collect::<Result<Vec<_>, _>>()?;
    closure("perm", degree, &gens, cap)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(images: &[usize]) -> Permutation {
        Permutation::from_images(images).unwrap()
    }

    #[test]
    fn composition_applies_right_factor_first() {
        // (13) ∘ (12) = (123): 1 -> 2 -> 2, 2 -> 1 -> 3, 3 -> 3 -> 1.
        let t13 = p(&[2, 1, 0]);
        let t12 = p(&[1, 0, 2]);
        assert_eq!(t13.compose(&t12).cycle_notation(), "(123)");
        assert_eq!(t12.compose(&t13).cycle_notation(), "(132)");
    }

    #[test]
    fn cycle_notation_round_trip() {
        for text in ["e", "(12)", "(123)", "(12)(34)", "(1432)"] {
            let perm = Permutation::parse_cycles(text, 4).unwrap();
            assert_eq!(perm.cycle_notation(), text);
        }
        let big = Permutation::parse_cycles("(1,2,10)", 10).unwrap();
        assert_eq!(big.cycle_notation(), "(1,2,10)");
        assert_eq!(Permutation::parse_cycles("(1 2)", 3).unwrap(), p(&[1, 0, 2]));
    }

    #[test]
    fn non_disjoint_cycles_compose_as_written() {
        let prod = Permutation::parse_cycles("(12)(23)", 3).unwrap();
        let expected = p(&[1, 0, 2]).compose(&p(&[0, 2, 1]));
        assert_eq!(prod, expected);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(Permutation::from_images(&[0, 0]).is_err());
        assert!(Permutation::from_images(&[0, 2]).is_err());
        assert!(Permutation::parse_cycles("(14)", 3).is_err());
        assert!(Permutation::parse_cycles("(121)", 3).is_err());
        assert!(Permutation::parse_cycles("12", 3).is_err());
    }

    #[test]
    fn closure_of_s3_generators() {
        let g = build_from_permutation_generators(3, &[vec![1, 0, 2], vec![1, 2, 0]]).unwrap();
        assert_eq!(g.order(), 6);
        let labels: Vec<&str> = g.labels().iter().map(String::as_str).collect();
        assert_eq!(labels, ["e", "(12)", "(123)", "(23)", "(13)", "(132)"]);
    }

    #[test]
    fn closure_of_four_cycle_is_cyclic() {
        let g = build_from_permutation_generators(4, &[vec![1, 2, 3, 0]]).unwrap();
        assert_eq!(g.order(), 4);
        assert_eq!(g.element_order(1), 4);
    }

    #[test]
    fn empty_generators_give_trivial_group() {
        let g = build_from_permutation_generators(5, &[]).unwrap();
        assert_eq!(g.order(), 1);
        assert_eq!(g.label(0), "e");
    }

    #[test]
    fn cap_is_enforced() {
        let err = build_from_permutation_generators_capped(
            4,
            &[vec![1, 0, 2, 3], vec![1, 2, 3, 0]],
            10,
        )
        .unwrap_err();
        assert_eq!(err, GroupError::CapExceeded { cap: 10 });
    }
}
