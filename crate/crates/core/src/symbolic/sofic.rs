//! Finite presentations of sofic shifts over the integers.
//!
//! The image of a full shift under a one-dimensional cellular automaton
//! is presented by a de Bruijn graph: vertices are the `d-1`-symbol input
//! windows, edges the `d`-symbol windows, labeled with the rule output.
//! Bi-infinite label sequences of the (trimmed) graph are exactly the
//! image configurations. All language questions asked here — is the
//! presented shift the full shift, does it equal a given subshift of
//! finite type — reduce to reachability in subset-construction products,
//! with explicit shortest missing factors as witnesses.

use std::collections::{BTreeSet, HashMap, VecDeque};

use super::{checked_pow, decode_values, CellularAutomaton, SftDescriptor, Symbol, SymbolicError};
use crate::group::Group;

/// A labeled graph presenting a sofic shift: every vertex is implicitly
/// initial and final, and the shift is the set of bi-infinite label
/// sequences along paths.
#[derive(Clone, Debug)]
pub struct SoficAutomaton {
    alphabet: usize,
    num_vertices: usize,
    edges: Vec<SoficEdge>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SoficEdge {
    pub from: usize,
    pub to: usize,
    pub label: Symbol,
}

/// An interval-memory rewrite of a rule on the integers: the automaton is
/// the original one composed with a power of the shift, which preserves
/// every property studied here. `offset` records the translation, i.e.
/// the original map equals `shift^offset ∘ normalized`.
#[derive(Clone, Debug)]
pub struct NormalizedRule {
    pub alphabet: usize,
    /// Memory diameter; the normalized memory set is `[0, diameter - 1]`.
    pub diameter: usize,
    /// Output per input word, mixed-radix coded little-endian.
    pub table: Vec<Symbol>,
    pub offset: i64,
}

impl NormalizedRule {
    pub fn from_automaton(ca: &CellularAutomaton) -> Result<NormalizedRule, SymbolicError> {
        if ca.group() != &Group::Integers {
            return Err(SymbolicError::RequiresIntegers);
        }
        let k = ca.alphabet();
        let mem = ca.memory().as_slice();
        let lo = mem[0].0;
        let hi = mem[mem.len() - 1].0;
        let diameter = (hi - lo + 1) as usize;
        let needed = checked_pow(k, diameter);
        if needed > (1u128 << 26) {
            return Err(SymbolicError::TableTooLarge {
                needed,
                cap: 1 << 26,
            });
        }
        let mut table = Vec::with_capacity(needed as usize);
        let mut window = vec![0 as Symbol; mem.len()];
        for code in 0..needed as usize {
            let values = decode_values(code, diameter, k);
            for (i, f) in mem.iter().enumerate() {
                window[i] = values[(f.0 - lo) as usize];
            }
            table.push(ca.rule().eval(&window));
        }
        Ok(NormalizedRule {
            alphabet: k,
            diameter,
            table,
            offset: lo,
        })
    }

    pub fn vertex_count(&self) -> usize {
        checked_pow(self.alphabet, self.diameter - 1) as usize
    }

    pub fn word_count(&self) -> usize {
        self.table.len()
    }

    /// Source vertex of the de Bruijn edge for input word `w`: its first
    /// `d-1` symbols.
    pub fn edge_from(&self, w: usize) -> usize {
        w % self.vertex_count()
    }

    /// Target vertex: the last `d-1` symbols of the word.
    pub fn edge_to(&self, w: usize) -> usize {
        w / self.alphabet
    }

    pub fn edge_label(&self, w: usize) -> Symbol {
        self.table[w]
    }

    /// First symbol of an input word; consecutive de Bruijn edge words
    /// spell the input configuration through these.
    pub fn word_first_symbol(&self, w: usize) -> Symbol {
        (w % self.alphabet) as Symbol
    }

    /// The de Bruijn presentation of the image shift.
    pub fn image_automaton(&self) -> SoficAutomaton {
        let edges = (0..self.word_count())
            .map(|w| SoficEdge {
                from: self.edge_from(w),
                to: self.edge_to(w),
                label: self.edge_label(w),
            })
            .collect();
        SoficAutomaton::new(self.alphabet, self.vertex_count(), edges).trimmed()
    }
}

/// De Bruijn presentation of `T[A^Z]` for an automaton on the integers.
pub fn image_automaton(ca: &CellularAutomaton) -> Result<SoficAutomaton, SymbolicError> {
    Ok(NormalizedRule::from_automaton(ca)?.image_automaton())
}

type SubsetKey = Vec<u64>;

fn empty_subset(words: usize) -> SubsetKey {
    vec![0u64; words]
}

fn full_subset(n: usize, words: usize) -> SubsetKey {
    let mut s = vec![u64::MAX; words];
    if !n.is_multiple_of(64) {
        s[words - 1] = (1u64 << (n % 64)) - 1;
    }
    s
}

fn subset_is_empty(s: &SubsetKey) -> bool {
    s.iter().all(|&w| w == 0)
}

impl SoficAutomaton {
    pub fn new(alphabet: usize, num_vertices: usize, edges: Vec<SoficEdge>) -> SoficAutomaton {
        let mut edges = edges;
        edges.sort_by_key(|e| (e.from, e.label, e.to));
        edges.dedup();
        SoficAutomaton {
            alphabet,
            num_vertices,
            edges,
        }
    }

    pub fn alphabet(&self) -> usize {
        self.alphabet
    }

    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }

    pub fn edges(&self) -> &[SoficEdge] {
        &self.edges
    }

    pub fn is_empty(&self) -> bool {
        self.num_vertices == 0
    }

    /// Restrict to vertices lying on bi-infinite paths: repeatedly drop
    /// vertices without a successor or without a predecessor.
    pub fn trimmed(&self) -> SoficAutomaton {
        let mut alive = vec![true; self.num_vertices];
        loop {
            let mut has_succ = vec![false; self.num_vertices];
            let mut has_pred = vec![false; self.num_vertices];
            for e in &self.edges {
                if alive[e.from] && alive[e.to] {
                    has_succ[e.from] = true;
                    has_pred[e.to] = true;
                }
            }
            let mut changed = false;
            for v in 0..self.num_vertices {
                if alive[v] && (!has_succ[v] || !has_pred[v]) {
                    alive[v] = false;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        let mut remap = vec![usize::MAX; self.num_vertices];
        let mut next = 0usize;
        for (v, &a) in alive.iter().enumerate() {
            if a {
                remap[v] = next;
                next += 1;
            }
        }
        let edges = self
            .edges
            .iter()
            .filter(|e| alive[e.from] && alive[e.to])
            .map(|e| SoficEdge {
                from: remap[e.from],
                to: remap[e.to],
                label: e.label,
            })
            .collect();
        SoficAutomaton::new(self.alphabet, next, edges)
    }

    fn subset_words(&self) -> usize {
        self.num_vertices.div_ceil(64)
    }

    fn step_subset(&self, s: &SubsetKey, label: Symbol) -> SubsetKey {
        let mut out = empty_subset(self.subset_words());
        for e in &self.edges {
            if e.label == label && s[e.from / 64] >> (e.from % 64) & 1 == 1 {
                out[e.to / 64] |= 1 << (e.to % 64);
            }
        }
        out
    }

    /// True when the presented shift is the whole full shift.
    pub fn is_full_shift(&self, state_cap: u64) -> Result<bool, SymbolicError> {
        Ok(self.missing_factor(state_cap)?.is_none())
    }

    /// Shortest word that is not a factor of the presented shift, or
    /// `None` when the shift is the full shift. Subset construction from
    /// the full vertex set; the shift is full iff the empty subset is
    /// unreachable.
    pub fn missing_factor(&self, state_cap: u64) -> Result<Option<Vec<Symbol>>, SymbolicError> {
        if self.is_empty() {
            return Ok(Some(Vec::new()));
        }
        let start = full_subset(self.num_vertices, self.subset_words());
        let mut seen: HashMap<SubsetKey, ()> = HashMap::new();
        seen.insert(start.clone(), ());
        let mut queue: VecDeque<(SubsetKey, Vec<Symbol>)> = VecDeque::new();
        queue.push_back((start, Vec::new()));
        while let Some((s, word)) = queue.pop_front() {
            for a in 0..self.alphabet as Symbol {
                let next = self.step_subset(&s, a);
                let mut next_word = word.clone();
                next_word.push(a);
                if subset_is_empty(&next) {
                    return Ok(Some(next_word));
                }
                if !seen.contains_key(&next) {
                    if seen.len() as u64 >= state_cap {
                        return Err(SymbolicError::StateBudget {
                            what: "full-shift subset construction",
                            cap: state_cap,
                        });
                    }
                    seen.insert(next.clone(), ());
                    queue.push_back((next, next_word));
                }
            }
        }
        Ok(None)
    }

    /// All length-`len` factors of the presented shift.
    pub fn factors(
        &self,
        len: usize,
        word_cap: u64,
    ) -> Result<BTreeSet<Vec<Symbol>>, SymbolicError> {
        let total = checked_pow(self.alphabet, len);
        if total > word_cap as u128 {
            return Err(SymbolicError::StateBudget {
                what: "factor enumeration",
                cap: word_cap,
            });
        }
        let mut out = BTreeSet::new();
        if self.is_empty() {
            return Ok(out);
        }
        let start = full_subset(self.num_vertices, self.subset_words());
        let mut stack: Vec<(SubsetKey, Vec<Symbol>)> = vec![(start, Vec::new())];
        while let Some((s, word)) = stack.pop() {
            if word.len() == len {
                out.insert(word);
                continue;
            }
            for a in 0..self.alphabet as Symbol {
                let next = self.step_subset(&s, a);
                if !subset_is_empty(&next) {
                    let mut w = word.clone();
                    w.push(a);
                    stack.push((next, w));
                }
            }
        }
        Ok(out)
    }

    /// Checks that every factor of `other` is a factor of `self`;
    /// returns a shortest missing word otherwise. Product of `other`
    /// with the subset construction of `self`.
    pub fn contains_factors_of(
        &self,
        other: &SoficAutomaton,
        state_cap: u64,
    ) -> Result<Option<Vec<Symbol>>, SymbolicError> {
        if other.is_empty() {
            return Ok(None);
        }
        if self.is_empty() {
            return Ok(Some(Vec::new()));
        }
        let full = full_subset(self.num_vertices, self.subset_words());
        let mut other_adj: Vec<Vec<(Symbol, usize)>> = vec![Vec::new(); other.num_vertices];
        for e in &other.edges {
            other_adj[e.from].push((e.label, e.to));
        }
        let mut seen: HashMap<(usize, SubsetKey), ()> = HashMap::new();
        let mut queue: VecDeque<(usize, SubsetKey, Vec<Symbol>)> = VecDeque::new();
        for v in 0..other.num_vertices {
            seen.insert((v, full.clone()), ());
            queue.push_back((v, full.clone(), Vec::new()));
        }
        while let Some((v, s, word)) = queue.pop_front() {
            for &(label, to) in &other_adj[v] {
                let next = self.step_subset(&s, label);
                let mut next_word = word.clone();
                next_word.push(label);
                if subset_is_empty(&next) {
                    return Ok(Some(next_word));
                }
                let key = (to, next.clone());
                if !seen.contains_key(&key) {
                    if seen.len() as u64 >= state_cap {
                        return Err(SymbolicError::StateBudget {
                            what: "inclusion product construction",
                            cap: state_cap,
                        });
                    }
                    seen.insert(key, ());
                    queue.push_back((to, next, next_word));
                }
            }
        }
        Ok(None)
    }
}

/// Presents an SFT over the integers as a labeled graph on the words of
/// length `width - 1` over the window's spanning interval, dropping the
/// edges whose combined word restricts to a forbidden pattern.
pub fn sft_automaton(
    sft: &SftDescriptor,
    alphabet: usize,
    state_cap: u64,
) -> Result<SoficAutomaton, SymbolicError> {
    if sft.window().is_empty() {
        // no constraints: one vertex, a self-loop per symbol
        let edges = (0..alphabet as Symbol)
            .map(|a| SoficEdge {
                from: 0,
                to: 0,
                label: a,
            })
            .collect();
        return Ok(SoficAutomaton::new(alphabet, 1, edges));
    }
    let w_lo = sft.window().as_slice()[0].0;
    let w_hi = sft.window().as_slice()[sft.window().len() - 1].0;
    let width = (w_hi - w_lo + 1) as usize;
    let vertices = checked_pow(alphabet, width - 1);
    let words = checked_pow(alphabet, width);
    if words > state_cap as u128 {
        return Err(SymbolicError::StateBudget {
            what: "SFT automaton construction",
            cap: state_cap,
        });
    }
    let offsets: Vec<usize> = sft.window().iter().map(|d| (d.0 - w_lo) as usize).collect();
    let mut edges = Vec::new();
    for w in 0..words as usize {
        let values = decode_values(w, width, alphabet);
        let restricted: Vec<Symbol> = offsets.iter().map(|&o| values[o]).collect();
        if sft.forbidden().iter().any(|f| f == &restricted) {
            continue;
        }
        edges.push(SoficEdge {
            from: w % vertices as usize,
            to: w / alphabet,
            label: values[width - 1],
        });
    }
    Ok(SoficAutomaton::new(alphabet, vertices as usize, edges).trimmed())
}

/// Language equality between a sofic shift and an SFT, both over the
/// integers: (a) every window-width factor of the automaton avoids the
/// forbidden patterns, and (b) the SFT's bi-infinite language is
/// contained in the automaton's, via product-automaton emptiness.
pub fn sofic_equals_sft(
    aut: &SoficAutomaton,
    sft: &SftDescriptor,
    state_cap: u64,
) -> Result<bool, SymbolicError> {
    let alphabet = aut.alphabet();
    if sft.window().is_empty() {
        return Ok(aut.missing_factor(state_cap)?.is_none());
    }
    let w_lo = sft.window().as_slice()[0].0;
    let w_hi = sft.window().as_slice()[sft.window().len() - 1].0;
    let width = (w_hi - w_lo + 1) as usize;
    let offsets: Vec<usize> = sft.window().iter().map(|d| (d.0 - w_lo) as usize).collect();
    for word in aut.factors(width, state_cap)? {
        let restricted: Vec<Symbol> = offsets.iter().map(|&o| word[o]).collect();
        if sft.forbidden().iter().any(|f| f == &restricted) {
            return Ok(false);
        }
    }
    let sft_aut = sft_automaton(sft, alphabet, state_cap)?;
    Ok(aut.contains_factors_of(&sft_aut, state_cap)?.is_none())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::ElementSet;
    use crate::symbolic::{LocalRule, PeriodicConfiguration};

    const CAP: u64 = 1 << 20;

    fn rule_z(memory: &[i64], k: usize, table: Vec<Symbol>) -> CellularAutomaton {
        CellularAutomaton::new(
            Group::Integers,
            LocalRule::new(k, ElementSet::from_ids(memory), table).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn identity_automaton_is_full() {
        let ca = rule_z(&[0], 2, vec![0, 1]);
        let aut = image_automaton(&ca).unwrap();
        assert_eq!(aut.num_vertices(), 1);
        assert_eq!(aut.edges().len(), 2);
        assert_eq!(aut.missing_factor(CAP).unwrap(), None);
    }

    #[test]
    fn xor_automaton_is_full() {
        let ca = rule_z(&[0, 1], 2, vec![0, 1, 1, 0]);
        let aut = image_automaton(&ca).unwrap();
        assert_eq!(aut.num_vertices(), 2);
        assert_eq!(aut.edges().len(), 4);
        assert_eq!(aut.missing_factor(CAP).unwrap(), None);
    }

    #[test]
    fn constant_zero_automaton_misses_one() {
        let ca = rule_z(&[0], 2, vec![0, 0]);
        let aut = image_automaton(&ca).unwrap();
        assert_eq!(aut.missing_factor(CAP).unwrap(), Some(vec![1]));
        let factors = aut.factors(3, CAP).unwrap();
        assert_eq!(factors.len(), 1);
        assert!(factors.contains(&vec![0, 0, 0]));
    }

    #[test]
    fn normalized_rule_translates_memory() {
        // shift rule, memory {1}: normalized to [0, 0] with offset 1
        let ca = rule_z(&[1], 2, vec![0, 1]);
        let nr = NormalizedRule::from_automaton(&ca).unwrap();
        assert_eq!(nr.diameter, 1);
        assert_eq!(nr.offset, 1);
        assert_eq!(nr.table, vec![0, 1]);
    }

    #[test]
    fn identity_equals_unconstrained_sft() {
        let ca = rule_z(&[0], 2, vec![0, 1]);
        let aut = image_automaton(&ca).unwrap();
        let sft = SftDescriptor::full_shift();
        assert!(sofic_equals_sft(&aut, &sft, CAP).unwrap());
    }

    #[test]
    fn constant_zero_equals_no_ones_sft() {
        let ca = rule_z(&[0], 2, vec![0, 0]);
        let aut = image_automaton(&ca).unwrap();
        let sft = SftDescriptor::new(ElementSet::from_ids(&[0]), vec![vec![1]]).unwrap();
        assert!(sofic_equals_sft(&aut, &sft, CAP).unwrap());
        // and it differs from the full shift
        assert!(!sofic_equals_sft(&aut, &SftDescriptor::full_shift(), CAP).unwrap());
    }

    #[test]
    fn golden_mean_sft_automaton() {
        let sft = SftDescriptor::new(ElementSet::from_ids(&[0, 1]), vec![vec![1, 1]]).unwrap();
        let aut = sft_automaton(&sft, 2, CAP).unwrap();
        // vertices 0 and 1, all edges except 1 -> 1
        assert_eq!(aut.num_vertices(), 2);
        assert_eq!(aut.edges().len(), 3);
        assert_eq!(aut.missing_factor(CAP).unwrap(), Some(vec![1, 1]));
        assert!(sofic_equals_sft(&aut, &sft, CAP).unwrap());
    }

    #[test]
    fn trim_drops_dead_vertices() {
        // 0 -> 1 -> 1 loop; vertex 2 has no incoming edge chain
        let edges = vec![
            SoficEdge {
                from: 0,
                to: 1,
                label: 0,
            },
            SoficEdge {
                from: 1,
                to: 1,
                label: 1,
            },
            SoficEdge {
                from: 2,
                to: 1,
                label: 0,
            },
        ];
        let aut = SoficAutomaton::new(2, 3, edges).trimmed();
        assert_eq!(aut.num_vertices(), 1);
        assert_eq!(aut.edges().len(), 1);
    }

    #[test]
    fn factor_language_matches_periodic_images() {
        // oracle cross-check: factors of the image automaton equal the
        // factors of images of periodic configurations of period <= 10
        let rules = [
            rule_z(&[0, 1], 2, vec![0, 1, 1, 0]),
            rule_z(&[0, 1], 2, vec![0, 0, 0, 1]),
            rule_z(&[0], 2, vec![0, 0]),
            rule_z(&[-1, 0, 1], 2, vec![0, 1, 1, 0, 1, 0, 0, 1]),
        ];
        const P: usize = 10;
        const LEN: usize = 5;
        for ca in &rules {
            let aut = image_automaton(ca).unwrap();
            let from_automaton = aut.factors(LEN, CAP).unwrap();
            let mut from_periodic: BTreeSet<Vec<Symbol>> = BTreeSet::new();
            for p in 1..=P {
                for code in 0..(1usize << p) {
                    let word = decode_values(code, p, 2);
                    let x = crate::symbolic::Configuration::Periodic(
                        PeriodicConfiguration::periodic(word).unwrap(),
                    );
                    let y = ca.apply(&x);
                    for offset in 0..p as i64 {
                        let factor: Vec<Symbol> = (0..LEN as i64)
                            .map(|i| y.get(crate::group::Element(offset + i)))
                            .collect();
                        from_periodic.insert(factor);
                    }
                }
            }
            assert_eq!(from_automaton, from_periodic);
        }
    }
}
