//! Patterns, configurations, local rules and subshifts of finite type.
//!
//! Configurations over a finite group are total maps stored as dense
//! arrays. Over the integers only eventually periodic configurations are
//! represented: a left period word, a finite center block anchored at an
//! explicit start coordinate, and a right period word. Every witness the
//! analysis module produces is of this form, so certificates stay finite
//! and re-checkable.

pub mod sofic;

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::group::{Element, ElementSet, Group, GroupError};

/// Alphabet symbols; alphabets are `0..k` with `k >= 2`.
pub type Symbol = u8;

#[derive(Debug, Error)]
pub enum SymbolicError {
    #[error("alphabet must have at least two symbols, got {0}")]
    AlphabetTooSmall(usize),
    #[error("alphabet too large: {0} (symbols are 8-bit)")]
    AlphabetTooLarge(usize),
    #[error("memory set must be nonempty")]
    EmptyMemory,
    #[error("rule table has length {got}, expected {expected}")]
    TableLength { expected: usize, got: usize },
    #[error("symbol {0} out of range for alphabet of size {1}")]
    SymbolOutOfRange(usize, usize),
    #[error("memory element not valid in the group")]
    MemoryNotInGroup,
    #[error("pattern domain and value list have different lengths")]
    PatternShape,
    #[error("configuration kind does not match the group")]
    ConfigurationKind,
    #[error("period word must be nonempty")]
    EmptyPeriod,
    #[error("pattern domain too small: missing site {0:?}")]
    DomainTooSmall(Element),
    #[error("operation is only defined over the integers")]
    RequiresIntegers,
    #[error("table would be too large: {needed} entries exceeds cap {cap}")]
    TableTooLarge { needed: u128, cap: u64 },
    #[error("state budget exhausted during {what} (cap {cap})")]
    StateBudget { what: &'static str, cap: u64 },
    #[error("alphabets differ: {0} vs {1}")]
    AlphabetMismatch(usize, usize),
    #[error(transparent)]
    Group(#[from] GroupError),
}

/// Mixed-radix pattern code: digit `i` (base `k`, little-endian) is the
/// symbol at position `i` of the ordered domain.
pub fn encode_values(values: &[Symbol], k: usize) -> usize {
    let mut code = 0usize;
    for &v in values.iter().rev() {
        code = code * k + v as usize;
    }
    code
}

/// Inverse of [`encode_values`].
pub fn decode_values(mut code: usize, len: usize, k: usize) -> Vec<Symbol> {
    let mut out = Vec::with_capacity(len);
    for _ in 0..len {
        out.push((code % k) as Symbol);
        code /= k;
    }
    out
}

/// Checked `k^len` for table sizing.
pub fn checked_pow(k: usize, len: usize) -> u128 {
    (k as u128).saturating_pow(len as u32)
}

/// A finite partial assignment of symbols to group elements. Values are
/// aligned with the sorted domain order.
#[derive(Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Pattern {
    domain: ElementSet,
    values: Vec<Symbol>,
}

impl fmt::Debug for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let entries: Vec<String> = self
            .domain
            .iter()
            .zip(&self.values)
            .map(|(e, v)| format!("{:?}:{}", e, v))
            .collect();
        write!(f, "Pattern{{{}}}", entries.join(", "))
    }
}

impl Pattern {
    pub fn new(domain: ElementSet, values: Vec<Symbol>) -> Result<Pattern, SymbolicError> {
        if domain.len() != values.len() {
            return Err(SymbolicError::PatternShape);
        }
        Ok(Pattern { domain, values })
    }

    pub fn from_code(domain: ElementSet, code: usize, k: usize) -> Pattern {
        let values = decode_values(code, domain.len(), k);
        Pattern { domain, values }
    }

    pub fn domain(&self) -> &ElementSet {
        &self.domain
    }

    pub fn values(&self) -> &[Symbol] {
        &self.values
    }

    pub fn code(&self, k: usize) -> usize {
        encode_values(&self.values, k)
    }

    pub fn get(&self, e: Element) -> Option<Symbol> {
        self.domain.index_of(e).map(|i| self.values[i])
    }
}

/// Eventually periodic configuration over the integers.
///
/// Site `n` reads the center block `center[n - start]` for
/// `start <= n < start + center.len()`, the right word tiled forward from
/// the end of the center, and the left word tiled backward from `start`
/// (so the site `start - 1` carries the last symbol of `left`).
#[derive(Clone, Serialize, Deserialize)]
pub struct PeriodicConfiguration {
    left: Vec<Symbol>,
    center: Vec<Symbol>,
    right: Vec<Symbol>,
    start: i64,
}

impl fmt::Debug for PeriodicConfiguration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let w = |v: &[Symbol]| v.iter().map(|s| s.to_string()).collect::<String>();
        write!(
            f,
            "({})^inf {}|{} ({})^inf @{}",
            w(&self.left),
            w(&self.center),
            w(&self.right),
            w(&self.right),
            self.start
        )
    }
}

impl PeriodicConfiguration {
    pub fn new(
        left: Vec<Symbol>,
        center: Vec<Symbol>,
        right: Vec<Symbol>,
        start: i64,
    ) -> Result<PeriodicConfiguration, SymbolicError> {
        if left.is_empty() || right.is_empty() {
            return Err(SymbolicError::EmptyPeriod);
        }
        Ok(PeriodicConfiguration {
            left,
            center,
            right,
            start,
        }
        .normalized())
    }

    /// Purely periodic configuration: `word` tiled over the whole line,
    /// anchored so site 0 carries `word[0]`.
    pub fn periodic(word: Vec<Symbol>) -> Result<PeriodicConfiguration, SymbolicError> {
        PeriodicConfiguration::new(word.clone(), Vec::new(), word, 0)
    }

    pub fn constant(sym: Symbol) -> PeriodicConfiguration {
        PeriodicConfiguration {
            left: vec![sym],
            center: Vec::new(),
            right: vec![sym],
            start: 0,
        }
    }

    pub fn get(&self, n: i64) -> Symbol {
        let end = self.start + self.center.len() as i64;
        if n < self.start {
            let l = self.left.len() as i64;
            self.left[(n - self.start).rem_euclid(l) as usize]
        } else if n < end {
            self.center[(n - self.start) as usize]
        } else {
            let r = self.right.len() as i64;
            self.right[(n - end).rem_euclid(r) as usize]
        }
    }

    pub fn left(&self) -> &[Symbol] {
        &self.left
    }

    pub fn center(&self) -> &[Symbol] {
        &self.center
    }

    pub fn right(&self) -> &[Symbol] {
        &self.right
    }

    pub fn start(&self) -> i64 {
        self.start
    }

    fn center_end(&self) -> i64 {
        self.start + self.center.len() as i64
    }

    /// Minimal periods and a trimmed center; the represented configuration
    /// is unchanged.
    fn normalized(mut self) -> PeriodicConfiguration {
        self.left = primitive_root(&self.left);
        self.right = primitive_root(&self.right);
        // absorb center symbols that already agree with the periodic tails
        loop {
            let mut changed = false;
            if let Some(&last) = self.center.last() {
                if last == *self.right.last().unwrap() {
                    self.center.pop();
                    self.right.rotate_right(1);
                    changed = true;
                }
            }
            if let Some(&first) = self.center.first() {
                if first == self.left[0] {
                    self.center.remove(0);
                    self.left.rotate_left(1);
                    self.start += 1;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        self.left = primitive_root(&self.left);
        self.right = primitive_root(&self.right);
        if self.center.is_empty() && self.left == self.right {
            // pure periodic: reduce the anchor modulo the period
            let p = self.left.len() as i64;
            self.start = self.start.rem_euclid(p);
        }
        self
    }

    /// Translate by `g`: the shifted configuration maps `n` to the old
    /// value at `n - g`.
    pub fn shifted(&self, g: i64) -> PeriodicConfiguration {
        let mut out = self.clone();
        out.start += g;
        out.normalized()
    }

    /// The configuration with finitely many sites overridden; the result
    /// is almost equal to `self`.
    pub fn overridden(&self, assignments: &[(i64, Symbol)]) -> PeriodicConfiguration {
        if assignments.is_empty() {
            return self.clone();
        }
        let lo = assignments
            .iter()
            .map(|a| a.0)
            .min()
            .unwrap()
            .min(self.start);
        let hi = assignments
            .iter()
            .map(|a| a.0 + 1)
            .max()
            .unwrap()
            .max(self.center_end());
        let l = self.left.len();
        let r = self.right.len();
        let left: Vec<Symbol> = (0..l).map(|j| self.get(lo - l as i64 + j as i64)).collect();
        let right: Vec<Symbol> = (0..r).map(|i| self.get(hi + i as i64)).collect();
        let mut center: Vec<Symbol> = (lo..hi).map(|n| self.get(n)).collect();
        for &(site, sym) in assignments {
            center[(site - lo) as usize] = sym;
        }
        PeriodicConfiguration::new(left, center, right, lo).expect("periods nonempty")
    }
}

fn primitive_root(word: &[Symbol]) -> Vec<Symbol> {
    let n = word.len();
    for d in 1..=n {
        if n.is_multiple_of(d) && word.iter().enumerate().all(|(i, &s)| s == word[i % d]) {
            return word[..d].to_vec();
        }
    }
    word.to_vec()
}

/// A configuration of the full shift: a total map on a finite group, or
/// an eventually periodic description over the integers.
///
/// Structural equality is not configuration equality for the periodic
/// representation; use [`delta`] or [`same_configuration`].
#[derive(Clone, Debug, Serialize, Deserialize)]
pub enum Configuration {
    Total(Vec<Symbol>),
    Periodic(PeriodicConfiguration),
}

impl Configuration {
    pub fn get(&self, site: Element) -> Symbol {
        match self {
            Configuration::Total(v) => v[site.0 as usize],
            Configuration::Periodic(p) => p.get(site.0),
        }
    }

    pub fn matches_group(&self, group: &Group) -> bool {
        match (self, group) {
            (Configuration::Total(v), Group::Finite(f)) => v.len() == f.order(),
            (Configuration::Periodic(_), Group::Integers) => true,
            _ => false,
        }
    }

    /// The shift action `g · x`, mapping `h` to `x(g⁻¹ h)`.
    pub fn shifted(&self, group: &Group, g: Element) -> Configuration {
        match (self, group) {
            (Configuration::Total(v), Group::Finite(_)) => {
                let ginv = group.inv(g);
                let out = (0..v.len() as i64)
                    .map(|h| v[group.mul(ginv, Element(h)).0 as usize])
                    .collect();
                Configuration::Total(out)
            }
            (Configuration::Periodic(p), Group::Integers) => {
                Configuration::Periodic(p.shifted(g.0))
            }
            _ => panic!("configuration kind does not match the group"),
        }
    }
}

/// Result of comparing two configurations sitewise.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Delta {
    /// The (possibly empty) finite difference set.
    Finite(ElementSet),
    /// The configurations differ at infinitely many sites.
    NotAlmostEqual,
}

impl Delta {
    pub fn finite(&self) -> Option<&ElementSet> {
        match self {
            Delta::Finite(s) => Some(s),
            Delta::NotAlmostEqual => None,
        }
    }
}

fn lcm(a: usize, b: usize) -> usize {
    fn gcd(a: usize, b: usize) -> usize {
        if b == 0 {
            a
        } else {
            gcd(b, a % b)
        }
    }
    a / gcd(a, b) * b
}

/// The difference set `Δ(x, y) = {g : x(g) != y(g)}`, or
/// [`Delta::NotAlmostEqual`] when it is infinite. Decidable for
/// eventually periodic pairs by comparing the period structures.
pub fn delta(group: &Group, x: &Configuration, y: &Configuration) -> Delta {
    match (x, y) {
        (Configuration::Total(a), Configuration::Total(b)) => {
            debug_assert_eq!(a.len(), b.len());
            Delta::Finite(ElementSet::from_elements(
                (0..a.len() as i64)
                    .map(Element)
                    .filter(|&e| a[e.0 as usize] != b[e.0 as usize])
                    .collect(),
            ))
        }
        (Configuration::Periodic(a), Configuration::Periodic(b)) => {
            debug_assert_eq!(group, &Group::Integers);
            let lo = a.start.min(b.start);
            let hi = a.center_end().max(b.center_end());
            let l = lcm(a.left.len(), b.left.len()) as i64;
            let r = lcm(a.right.len(), b.right.len()) as i64;
            // beyond these probe windows the difference pattern repeats
            if (hi..hi + r).any(|n| a.get(n) != b.get(n)) {
                return Delta::NotAlmostEqual;
            }
            if (lo - l..lo).any(|n| a.get(n) != b.get(n)) {
                return Delta::NotAlmostEqual;
            }
            Delta::Finite(ElementSet::from_elements(
                (lo..hi)
                    .filter(|&n| a.get(n) != b.get(n))
                    .map(Element)
                    .collect(),
            ))
        }
        _ => panic!("cannot compare configurations of different kinds"),
    }
}

/// True when the two descriptions denote the same configuration.
pub fn same_configuration(group: &Group, x: &Configuration, y: &Configuration) -> bool {
    matches!(delta(group, x, y), Delta::Finite(ref s) if s.is_empty())
}

/// A local rule `τ: A^F → A` with the table in mixed-radix order over the
/// sorted memory set.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalRule {
    alphabet: usize,
    memory: ElementSet,
    table: Vec<Symbol>,
}

impl LocalRule {
    pub fn new(
        alphabet: usize,
        memory: ElementSet,
        table: Vec<Symbol>,
    ) -> Result<LocalRule, SymbolicError> {
        if alphabet < 2 {
            return Err(SymbolicError::AlphabetTooSmall(alphabet));
        }
        if alphabet > 256 {
            return Err(SymbolicError::AlphabetTooLarge(alphabet));
        }
        if memory.is_empty() {
            return Err(SymbolicError::EmptyMemory);
        }
        let expected = checked_pow(alphabet, memory.len());
        if expected > u32::MAX as u128 {
            return Err(SymbolicError::TableTooLarge {
                needed: expected,
                cap: u32::MAX as u64,
            });
        }
        if table.len() as u128 != expected {
            return Err(SymbolicError::TableLength {
                expected: expected as usize,
                got: table.len(),
            });
        }
        if let Some(&bad) = table.iter().find(|&&s| s as usize >= alphabet) {
            return Err(SymbolicError::SymbolOutOfRange(bad as usize, alphabet));
        }
        Ok(LocalRule {
            alphabet,
            memory,
            table,
        })
    }

    pub fn alphabet(&self) -> usize {
        self.alphabet
    }

    pub fn memory(&self) -> &ElementSet {
        &self.memory
    }

    pub fn table(&self) -> &[Symbol] {
        &self.table
    }

    /// Evaluate on a window; `values[i]` is the symbol at the i-th memory
    /// element in sorted order.
    pub fn eval(&self, values: &[Symbol]) -> Symbol {
        self.table[encode_values(values, self.alphabet)]
    }
}

/// A cellular automaton `T: A^G → A^G` given by a group and a local rule,
/// acting by `T(x)(g) = τ(x ↾ g·F)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CellularAutomaton {
    group: Group,
    rule: LocalRule,
}

impl CellularAutomaton {
    pub fn new(group: Group, rule: LocalRule) -> Result<CellularAutomaton, SymbolicError> {
        if !rule.memory.iter().all(|&e| group.contains(e)) {
            return Err(SymbolicError::MemoryNotInGroup);
        }
        Ok(CellularAutomaton { group, rule })
    }

    pub fn group(&self) -> &Group {
        &self.group
    }

    pub fn rule(&self) -> &LocalRule {
        &self.rule
    }

    pub fn alphabet(&self) -> usize {
        self.rule.alphabet
    }

    pub fn memory(&self) -> &ElementSet {
        &self.rule.memory
    }

    /// The image value at `site`, reading `x` through the memory window.
    pub fn image_value(&self, x: &Configuration, site: Element) -> Symbol {
        let mut window = Vec::with_capacity(self.rule.memory.len());
        for &f in self.rule.memory.iter() {
            window.push(x.get(self.group.mul(site, f)));
        }
        self.rule.eval(&window)
    }

    /// Apply the automaton to a whole configuration.
    pub fn apply(&self, x: &Configuration) -> Configuration {
        debug_assert!(x.matches_group(&self.group));
        match x {
            Configuration::Total(v) => {
                let out = (0..v.len() as i64)
                    .map(|g| self.image_value(x, Element(g)))
                    .collect();
                Configuration::Total(out)
            }
            Configuration::Periodic(p) => {
                let lo = self.rule.memory.as_slice()[0].0;
                let hi = self.rule.memory.as_slice()[self.rule.memory.len() - 1].0;
                // output is left-pure below start-hi and right-pure from
                // center_end-lo on; the center grows by the memory diameter
                let out_start = p.start - hi;
                let out_end = p.center_end() - lo;
                let value = |n: i64| self.image_value(x, Element(n));
                let l = p.left.len() as i64;
                let r = p.right.len() as i64;
                let left: Vec<Symbol> = (0..l).map(|j| value(out_start - l + j)).collect();
                let center: Vec<Symbol> = (out_start..out_end).map(value).collect();
                let right: Vec<Symbol> = (0..r).map(|i| value(out_end + i)).collect();
                Configuration::Periodic(
                    PeriodicConfiguration::new(left, center, right, out_start)
                        .expect("periods stay nonempty"),
                )
            }
        }
    }

    /// Restriction of the image to `target`: applies the rule sitewise to
    /// a pattern. The pattern must cover `target · F`.
    pub fn image_pattern(
        &self,
        p: &Pattern,
        target: &ElementSet,
    ) -> Result<Pattern, SymbolicError> {
        let mut values = Vec::with_capacity(target.len());
        for &site in target.iter() {
            let mut window = Vec::with_capacity(self.rule.memory.len());
            for &f in self.rule.memory.iter() {
                let pos = self.group.mul(site, f);
                window.push(p.get(pos).ok_or(SymbolicError::DomainTooSmall(pos))?);
            }
            values.push(self.rule.eval(&window));
        }
        Pattern::new(target.clone(), values)
    }

    /// The composite automaton `self ∘ inner` (apply `inner` first), with
    /// memory `F_self · F_inner`.
    pub fn compose(
        &self,
        inner: &CellularAutomaton,
        table_cap: u64,
    ) -> Result<CellularAutomaton, SymbolicError> {
        if self.group != inner.group {
            return Err(SymbolicError::ConfigurationKind);
        }
        if self.alphabet() != inner.alphabet() {
            return Err(SymbolicError::AlphabetMismatch(
                self.alphabet(),
                inner.alphabet(),
            ));
        }
        let k = self.alphabet();
        let memory = self
            .group
            .set_product(&self.rule.memory, &inner.rule.memory);
        let needed = checked_pow(k, memory.len());
        if needed > table_cap as u128 {
            return Err(SymbolicError::TableTooLarge {
                needed,
                cap: table_cap,
            });
        }
        let mut table = Vec::with_capacity(needed as usize);
        let mut outer_window = vec![0 as Symbol; self.rule.memory.len()];
        for code in 0..needed as usize {
            let values = decode_values(code, memory.len(), k);
            for (i, &fo) in self.rule.memory.iter().enumerate() {
                let mut inner_window = Vec::with_capacity(inner.rule.memory.len());
                for &fi in inner.rule.memory.iter() {
                    let pos = self.group.mul(fo, fi);
                    let idx = memory.index_of(pos).expect("memory covers products");
                    inner_window.push(values[idx]);
                }
                outer_window[i] = inner.rule.eval(&inner_window);
            }
            table.push(self.rule.eval(&outer_window));
        }
        CellularAutomaton::new(self.group.clone(), LocalRule::new(k, memory, table)?)
    }

    /// `n`-fold composite of the automaton with itself.
    pub fn power(&self, n: u32, table_cap: u64) -> Result<CellularAutomaton, SymbolicError> {
        assert!(n >= 1, "power requires n >= 1");
        let mut out = self.clone();
        for _ in 1..n {
            out = self.compose(&out, table_cap)?;
        }
        Ok(out)
    }
}

/// Restriction `x ↾ D` of a configuration to a finite window.
pub fn restrict(x: &Configuration, domain: &ElementSet) -> Pattern {
    let values = domain.iter().map(|&e| x.get(e)).collect();
    Pattern {
        domain: domain.clone(),
        values,
    }
}

/// A subshift of finite type: configurations avoiding every translate of
/// the forbidden patterns, all of which share one window.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SftDescriptor {
    window: ElementSet,
    /// Value vectors aligned with the sorted window order.
    forbidden: Vec<Vec<Symbol>>,
}

impl SftDescriptor {
    pub fn new(
        window: ElementSet,
        forbidden: Vec<Vec<Symbol>>,
    ) -> Result<SftDescriptor, SymbolicError> {
        if forbidden.iter().any(|p| p.len() != window.len()) {
            return Err(SymbolicError::PatternShape);
        }
        let mut forbidden = forbidden;
        forbidden.sort();
        forbidden.dedup();
        Ok(SftDescriptor { window, forbidden })
    }

    pub fn full_shift() -> SftDescriptor {
        SftDescriptor {
            window: ElementSet::empty(),
            forbidden: Vec::new(),
        }
    }

    pub fn window(&self) -> &ElementSet {
        &self.window
    }

    pub fn forbidden(&self) -> &[Vec<Symbol>] {
        &self.forbidden
    }

    pub fn forbidden_patterns(&self) -> Vec<Pattern> {
        self.forbidden
            .iter()
            .map(|v| Pattern {
                domain: self.window.clone(),
                values: v.clone(),
            })
            .collect()
    }

    fn matches_at(&self, group: &Group, x: &Configuration, t: Element, values: &[Symbol]) -> bool {
        self.window
            .iter()
            .zip(values)
            .all(|(&d, &v)| x.get(group.mul(t, d)) == v)
    }

    /// Membership test: no translate of `x` hits a forbidden pattern.
    ///
    /// For eventually periodic configurations the translate range is
    /// finite: one full lcm period beyond each side of the center plus
    /// the window span suffices, by periodicity of the match predicate.
    pub fn contains(&self, group: &Group, x: &Configuration) -> bool {
        if self.forbidden.is_empty() {
            return true;
        }
        match x {
            Configuration::Total(_) => {
                let n = group.order().expect("total configuration on finite group");
                for t in 0..n as i64 {
                    for pat in &self.forbidden {
                        if self.matches_at(group, x, Element(t), pat) {
                            return false;
                        }
                    }
                }
                true
            }
            Configuration::Periodic(p) => {
                let w_lo = self.window.as_slice()[0].0;
                let w_hi = self.window.as_slice()[self.window.len() - 1].0;
                let period = lcm(p.left.len(), p.right.len()) as i64;
                let lo = p.start - w_hi - period;
                let hi = p.center_end() - w_lo + period;
                for t in lo..=hi {
                    for pat in &self.forbidden {
                        if self.matches_at(group, x, Element(t), pat) {
                            return false;
                        }
                    }
                }
                true
            }
        }
    }
}
