//! Groups the automata live on: finite groups given by multiplication
//! tables, and the integers under addition.
//!
//! Elements are dense indices. For a finite group of order `n` the valid
//! ids are `0..n` with the identity at index `0`; for the integers the id
//! is the integer itself. Every windowed check in the rest of the crate
//! is phrased in terms of finite subsets of the group, so this module
//! also provides the subset arithmetic (products, inverses, balls) and
//! the canonical subset enumeration used to produce minimal certificates.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Errors raised while constructing or using groups.
#[derive(Debug, Error)]
pub enum GroupError {
    #[error("multiplication table is not a group: {0}")]
    NotAGroup(String),
    #[error("element {id} out of range for group of order {order}")]
    ElementOutOfRange { id: i64, order: usize },
    #[error("operation requires a finite group")]
    RequiresFiniteGroup,
    #[error("group too large for subset enumeration (order {order}, cap {cap})")]
    EnumerationTooLarge { order: usize, cap: usize },
    #[error("invalid builder argument: {0}")]
    BadBuilder(String),
}

/// An element of a [`Group`], identified by a dense index (finite groups)
/// or by the integer itself.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Element(pub i64);

impl fmt::Debug for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e{}", self.0)
    }
}

/// A finite group presented by its full multiplication table.
///
/// The table is validated at construction: index 0 must act as a two-sided
/// identity, every element must have a two-sided inverse, and the operation
/// must be associative on all triples.
#[derive(Clone, PartialEq, Eq)]
pub struct FiniteGroup {
    order: usize,
    /// Row-major `order * order` table of element indices.
    table: Vec<usize>,
    inverse: Vec<usize>,
}

impl fmt::Debug for FiniteGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FiniteGroup(order={})", self.order)
    }
}

impl FiniteGroup {
    /// Builds a finite group from a row-major multiplication table,
    /// checking all group axioms.
    pub fn from_table(order: usize, table: Vec<usize>) -> Result<Self, GroupError> {
        if order == 0 {
            return Err(GroupError::NotAGroup("empty table".into()));
        }
        if table.len() != order * order {
            return Err(GroupError::NotAGroup(format!(
                "table length {} does not match order {}",
                table.len(),
                order
            )));
        }
        if let Some(&bad) = table.iter().find(|&&v| v >= order) {
            return Err(GroupError::NotAGroup(format!(
                "table entry {bad} out of range"
            )));
        }
        let at = |a: usize, b: usize| table[a * order + b];
        for a in 0..order {
            if at(0, a) != a || at(a, 0) != a {
                return Err(GroupError::NotAGroup(format!(
                    "index 0 is not a two-sided identity at element {a}"
                )));
            }
        }
        let mut inverse = vec![usize::MAX; order];
        for (a, slot) in inverse.iter_mut().enumerate() {
            match (0..order).find(|&b| at(a, b) == 0 && at(b, a) == 0) {
                Some(b) => *slot = b,
                None => {
                    return Err(GroupError::NotAGroup(format!(
                        "element {a} has no two-sided inverse"
                    )))
                }
            }
        }
        for a in 0..order {
            for b in 0..order {
                let ab = at(a, b);
                for c in 0..order {
                    if at(ab, c) != at(a, at(b, c)) {
                        return Err(GroupError::NotAGroup(format!(
                            "associativity fails on ({a}, {b}, {c})"
                        )));
                    }
                }
            }
        }
        Ok(FiniteGroup {
            order,
            table,
            inverse,
        })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn table(&self) -> &[usize] {
        &self.table
    }

    fn mul_idx(&self, a: usize, b: usize) -> usize {
        self.table[a * self.order + b]
    }
}

/// The ambient group of a shift space: either the integers or a finite
/// group with an explicit multiplication table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Group {
    Integers,
    Finite(FiniteGroup),
}

impl Group {
    /// Cyclic group of order `n`; element `i` is the residue `i`.
    pub fn cyclic(n: usize) -> Result<Group, GroupError> {
        if n == 0 {
            return Err(GroupError::BadBuilder("cyclic group of order 0".into()));
        }
        let mut table = vec![0usize; n * n];
        for a in 0..n {
            for b in 0..n {
                table[a * n + b] = (a + b) % n;
            }
        }
        Ok(Group::Finite(FiniteGroup::from_table(n, table)?))
    }

    /// Dihedral group of order `2n`; element `i + n*j` is the rotation
    /// `r^i` composed with the reflection `s^j`.
    pub fn dihedral(n: usize) -> Result<Group, GroupError> {
        if n == 0 {
            return Err(GroupError::BadBuilder("dihedral group with n = 0".into()));
        }
        let order = 2 * n;
        let mut table = vec![0usize; order * order];
        for i in 0..n {
            for j in 0..2 {
                for k in 0..n {
                    for l in 0..2 {
                        // (r^i s^j)(r^k s^l) = r^{i + (-1)^j k} s^{j+l}
                        let rot = if j == 0 {
                            (i + k) % n
                        } else {
                            (i + n - k % n) % n
                        };
                        let refl = (j + l) % 2;
                        table[(i + n * j) * order + (k + n * l)] = rot + n * refl;
                    }
                }
            }
        }
        Ok(Group::Finite(FiniteGroup::from_table(order, table)?))
    }

    /// Symmetric group on `n` letters. Elements are indexed by the
    /// lexicographic rank of their one-line notation, so the identity
    /// permutation has index 0. The product `a * b` maps `x` to
    /// `perm_a(perm_b(x))`.
    pub fn symmetric(n: usize) -> Result<Group, GroupError> {
        if n == 0 || n > 8 {
            return Err(GroupError::BadBuilder(format!(
                "symmetric group size {n} not supported (want 1..=8)"
            )));
        }
        let order = (1..=n).product::<usize>();
        let perms: Vec<Vec<usize>> = (0..order).map(|r| unrank_permutation(r, n)).collect();
        let rank_of = |p: &[usize]| -> usize { rank_permutation(p) };
        let mut table = vec![0usize; order * order];
        let mut composed = vec![0usize; n];
        for (a, pa) in perms.iter().enumerate() {
            for (b, pb) in perms.iter().enumerate() {
                for (x, slot) in composed.iter_mut().enumerate() {
                    *slot = pa[pb[x]];
                }
                table[a * order + b] = rank_of(&composed);
            }
        }
        Ok(Group::Finite(FiniteGroup::from_table(order, table)?))
    }

    /// Direct product of two finite groups; element `i + |G1|*j` is the
    /// pair `(i, j)`.
    pub fn product(g1: &Group, g2: &Group) -> Result<Group, GroupError> {
        let (f1, f2) = match (g1, g2) {
            (Group::Finite(a), Group::Finite(b)) => (a, b),
            _ => return Err(GroupError::RequiresFiniteGroup),
        };
        let n1 = f1.order();
        let n2 = f2.order();
        let order = n1 * n2;
        let mut table = vec![0usize; order * order];
        for a1 in 0..n1 {
            for a2 in 0..n2 {
                for b1 in 0..n1 {
                    for b2 in 0..n2 {
                        let prod = f1.mul_idx(a1, b1) + n1 * f2.mul_idx(a2, b2);
                        table[(a1 + n1 * a2) * order + (b1 + n1 * b2)] = prod;
                    }
                }
            }
        }
        Ok(Group::Finite(FiniteGroup::from_table(order, table)?))
    }

    pub fn identity(&self) -> Element {
        Element(0)
    }

    /// Order of a finite group, `None` for the integers.
    pub fn order(&self) -> Option<usize> {
        match self {
            Group::Integers => None,
            Group::Finite(f) => Some(f.order()),
        }
    }

    pub fn contains(&self, el: Element) -> bool {
        match self {
            Group::Integers => true,
            Group::Finite(f) => 0 <= el.0 && (el.0 as usize) < f.order(),
        }
    }

    fn check(&self, el: Element) -> Result<usize, GroupError> {
        match self {
            Group::Integers => Ok(0),
            Group::Finite(f) => {
                if self.contains(el) {
                    Ok(el.0 as usize)
                } else {
                    Err(GroupError::ElementOutOfRange {
                        id: el.0,
                        order: f.order(),
                    })
                }
            }
        }
    }

    /// Group product. Panics on out-of-range indices; use [`Group::try_mul`]
    /// for checked composition.
    pub fn mul(&self, a: Element, b: Element) -> Element {
        self.try_mul(a, b).expect("element out of range")
    }

    pub fn try_mul(&self, a: Element, b: Element) -> Result<Element, GroupError> {
        match self {
            Group::Integers => Ok(Element(a.0 + b.0)),
            Group::Finite(f) => {
                let ai = self.check(a)?;
                let bi = self.check(b)?;
                Ok(Element(f.mul_idx(ai, bi) as i64))
            }
        }
    }

    pub fn inv(&self, a: Element) -> Element {
        match self {
            Group::Integers => Element(-a.0),
            Group::Finite(f) => {
                let ai = self.check(a).expect("element out of range");
                Element(f.inverse[ai] as i64)
            }
        }
    }

    /// All elements of a finite group in index order.
    pub fn elements(&self) -> Result<Vec<Element>, GroupError> {
        match self {
            Group::Integers => Err(GroupError::RequiresFiniteGroup),
            Group::Finite(f) => Ok((0..f.order() as i64).map(Element).collect()),
        }
    }

    /// Pointwise product set `{s * t : s in S, t in T}`.
    pub fn set_product(&self, s: &ElementSet, t: &ElementSet) -> ElementSet {
        let mut out = Vec::with_capacity(s.len() * t.len());
        for &a in s.iter() {
            for &b in t.iter() {
                out.push(self.mul(a, b));
            }
        }
        ElementSet::from_elements(out)
    }

    pub fn set_inverse(&self, s: &ElementSet) -> ElementSet {
        ElementSet::from_elements(s.iter().map(|&a| self.inv(a)).collect())
    }

    /// `S ∪ S⁻¹`.
    pub fn symmetrize(&self, s: &ElementSet) -> ElementSet {
        let mut out: Vec<Element> = s.iter().copied().collect();
        out.extend(s.iter().map(|&a| self.inv(a)));
        ElementSet::from_elements(out)
    }

    /// Ball of radius `r`: all products of at most `r` generators, always
    /// containing the identity. The generator set is symmetrized and the
    /// identity inserted before expanding, so the result is the ball of
    /// the symmetrized generating set. For the integers the generators
    /// are ignored and the ball is the interval `[-r, r]`.
    pub fn ball(&self, r: u32, generators: &ElementSet) -> ElementSet {
        match self {
            Group::Integers => {
                let r = r as i64;
                ElementSet::from_elements((-r..=r).map(Element).collect())
            }
            Group::Finite(_) => {
                let mut gens = self.symmetrize(generators);
                gens = ElementSet::from_elements(
                    gens.iter()
                        .copied()
                        .chain(std::iter::once(self.identity()))
                        .collect(),
                );
                let mut ball = ElementSet::from_elements(vec![self.identity()]);
                for _ in 0..r {
                    let next = self.set_product(&ball, &gens);
                    if next == ball {
                        break;
                    }
                    ball = next;
                }
                ball
            }
        }
    }
}

/// A sorted, duplicate-free finite subset of group elements.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ElementSet(Vec<Element>);

impl fmt::Debug for ElementSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.0.iter()).finish()
    }
}

impl ElementSet {
    pub fn empty() -> ElementSet {
        ElementSet(Vec::new())
    }

    pub fn from_elements(mut v: Vec<Element>) -> ElementSet {
        v.sort_unstable();
        v.dedup();
        ElementSet(v)
    }

    pub fn from_ids(ids: &[i64]) -> ElementSet {
        ElementSet::from_elements(ids.iter().map(|&i| Element(i)).collect())
    }

    pub fn singleton(e: Element) -> ElementSet {
        ElementSet(vec![e])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Element> {
        self.0.iter()
    }

    pub fn as_slice(&self) -> &[Element] {
        &self.0
    }

    pub fn contains(&self, e: Element) -> bool {
        self.0.binary_search(&e).is_ok()
    }

    /// Position of `e` in the sorted element order.
    pub fn index_of(&self, e: Element) -> Option<usize> {
        self.0.binary_search(&e).ok()
    }

    pub fn union(&self, other: &ElementSet) -> ElementSet {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        ElementSet::from_elements(v)
    }

    pub fn is_subset_of(&self, other: &ElementSet) -> bool {
        self.iter().all(|&e| other.contains(e))
    }

    /// Max absolute id; the radius of an integer subset. 0 for the empty set.
    pub fn radius(&self) -> i64 {
        self.0.iter().map(|e| e.0.abs()).max().unwrap_or(0)
    }
}

impl FromIterator<Element> for ElementSet {
    fn from_iter<T: IntoIterator<Item = Element>>(iter: T) -> Self {
        ElementSet::from_elements(iter.into_iter().collect())
    }
}

/// Canonical candidate-set enumeration used by every certificate search,
/// so that minimal certificates are deterministic.
///
/// Integers: by radius stratum `r = 0, 1, ...` up to `max_radius`; within
/// a stratum all subsets of `[-r, r]` whose radius is exactly `r`, ordered
/// by cardinality and then lexicographically on the sorted element vector.
/// The empty set appears once, first, in stratum 0.
///
/// Finite groups: all subsets ordered by cardinality and then
/// lexicographically on the index vector (`max_radius` is ignored — the
/// power set is finite and the enumeration complete).
pub fn canonical_subsets(
    group: &Group,
    max_radius: u32,
) -> Result<Box<dyn Iterator<Item = ElementSet>>, GroupError> {
    match group {
        Group::Integers => Ok(Box::new((0..=max_radius).flat_map(|r| {
            let mut stratum: Vec<ElementSet> = Vec::new();
            let lo = -(r as i64);
            let width = 2 * r as usize + 1;
            for mask in 0u64..(1u64 << width) {
                let els: Vec<Element> = (0..width)
                    .filter(|i| mask >> i & 1 == 1)
                    .map(|i| Element(lo + i as i64))
                    .collect();
                let set = ElementSet::from_elements(els);
                let in_stratum = if r == 0 {
                    true
                } else {
                    !set.is_empty() && set.radius() == r as i64
                };
                if in_stratum {
                    stratum.push(set);
                }
            }
            stratum.sort_by(|a, b| (a.len(), a.as_slice()).cmp(&(b.len(), b.as_slice())));
            stratum.into_iter()
        }))),
        Group::Finite(f) => {
            let n = f.order();
            if n > 16 {
                return Err(GroupError::EnumerationTooLarge { order: n, cap: 16 });
            }
            let mut all: Vec<ElementSet> = (0u32..1u32 << n)
                .map(|mask| {
                    ElementSet::from_elements(
                        (0..n)
                            .filter(|i| mask >> i & 1 == 1)
                            .map(|i| Element(i as i64))
                            .collect(),
                    )
                })
                .collect();
            all.sort_by(|a, b| (a.len(), a.as_slice()).cmp(&(b.len(), b.as_slice())));
            Ok(Box::new(all.into_iter()))
        }
    }
}

fn unrank_permutation(mut rank: usize, n: usize) -> Vec<usize> {
    let mut factorials = vec![1usize; n];
    for i in 1..n {
        factorials[i] = factorials[i - 1] * i;
    }
    let mut pool: Vec<usize> = (0..n).collect();
    let mut out = Vec::with_capacity(n);
    for i in (0..n).rev() {
        let f = factorials[i];
        let idx = rank / f;
        rank %= f;
        out.push(pool.remove(idx));
    }
    out
}

fn rank_permutation(p: &[usize]) -> usize {
    let n = p.len();
    let mut factorials = vec![1usize; n];
    for i in 1..n {
        factorials[i] = factorials[i - 1] * i;
    }
    let mut rank = 0;
    for i in 0..n {
        let smaller_later = p[i + 1..].iter().filter(|&&x| x < p[i]).count();
        rank += smaller_later * factorials[n - 1 - i];
    }
    rank
}

/// One-line notation of element `e` of a symmetric group built by
/// [`Group::symmetric`].
pub fn permutation_of(e: Element, n: usize) -> Vec<usize> {
    unrank_permutation(e.0 as usize, n)
}

/// Index of a permutation in the lexicographic order used by
/// [`Group::symmetric`].
pub fn permutation_index(p: &[usize]) -> Element {
    Element(rank_permutation(p) as i64)
}
