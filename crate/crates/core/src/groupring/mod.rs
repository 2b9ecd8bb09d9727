//! Group rings over prime fields, the convolution automata they induce,
//! and exhaustive direct-finiteness verification.
//!
//! An element `a` of `F_p[G]` acts on the full shift `F_p^G` by right
//! convolution, `T_a(f) = f ∗ a`; composition contravariantly matches the
//! ring product, `T_b ∘ T_a = T_{ab}`. A unit pair `ab = 1` therefore
//! makes `T_a` injective and `T_b` post-surjective, which is the bridge
//! between direct finiteness and the shift-space deciders: the claims are
//! checked here by running those deciders on the induced automata.
//!
//! Direct finiteness itself (`ab = 1` implies `ba = 1`) is elementary for
//! finite groups; the scan verifies it exhaustively over every pair and
//! feeds the unit pairs it finds to the certificate machinery.

pub mod norm;

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::analysis::{
    decide_injectivity, find_postsurjectivity_set, AnalysisError, Budgets, InjectivityCertificate,
    InjectivityDecision, PostSurjectivityCertificate, SearchOutcome,
};
use crate::group::{Element, ElementSet, Group, GroupError};
use crate::symbolic::{
    checked_pow, decode_values, CellularAutomaton, LocalRule, Symbol, SymbolicError,
};

#[derive(Debug, Error)]
pub enum RingError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("coefficient {0} out of range for characteristic {1}")]
    CoefficientOutOfRange(u64, u64),
    #[error("element not in the ring's group")]
    ElementOutOfGroup,
    #[error("the zero element induces no automaton")]
    ZeroElement,
    #[error("element is not in the augmentation ideal")]
    NotInIdeal,
    #[error("norm is defined on a different group")]
    NormGroupMismatch,
    #[error("norm axiom violated: {0}")]
    NormAxiom(String),
    #[error("scan requires a finite group")]
    ScanRequiresFiniteGroup,
    #[error("not a unit pair: a*b != 1")]
    NotAUnitPair,
    #[error("characteristic {0} too large for an automaton alphabet")]
    CharacteristicTooLarge(u64),
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Symbolic(#[from] SymbolicError),
}

/// The prime field `F_p`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimeField {
    p: u64,
}

impl PrimeField {
    pub fn new(p: u64) -> Result<PrimeField, RingError> {
        if p < 2
            || (2..p)
                .take_while(|d| d * d <= p)
                .any(|d| p.is_multiple_of(d))
        {
            return Err(RingError::NotPrime(p));
        }
        Ok(PrimeField { p })
    }

    pub fn characteristic(&self) -> u64 {
        self.p
    }

    pub fn add(&self, a: u64, b: u64) -> u64 {
        (a + b) % self.p
    }

    pub fn neg(&self, a: u64) -> u64 {
        (self.p - a % self.p) % self.p
    }

    pub fn mul(&self, a: u64, b: u64) -> u64 {
        a * b % self.p
    }
}

/// A finitely supported map `G → F_p` with nonzero coefficients only.
#[derive(Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RingElement {
    terms: BTreeMap<Element, u64>,
}

impl fmt::Debug for RingElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.term_string())
    }
}

impl RingElement {
    pub fn zero() -> RingElement {
        RingElement {
            terms: BTreeMap::new(),
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (Element, u64)> + '_ {
        self.terms.iter().map(|(&e, &c)| (e, c))
    }

    pub fn coefficient(&self, e: Element) -> u64 {
        self.terms.get(&e).copied().unwrap_or(0)
    }

    pub fn support(&self) -> ElementSet {
        ElementSet::from_elements(self.terms.keys().copied().collect())
    }

    /// Number of nonzero terms.
    pub fn length(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Compact text form `c*e<id>+...`, `0` for the zero element.
    pub fn term_string(&self) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        self.terms
            .iter()
            .map(|(e, c)| format!("{c}*e{}", e.0))
            .collect::<Vec<_>>()
            .join("+")
    }
}

/// The group ring `F_p[G]`: a context object carrying the group and the
/// field, with elements as plain data.
#[derive(Clone, Debug)]
pub struct GroupRing {
    group: Group,
    field: PrimeField,
}

impl GroupRing {
    pub fn new(group: Group, field: PrimeField) -> GroupRing {
        GroupRing { group, field }
    }

    pub fn group(&self) -> &Group {
        &self.group
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn element(&self, terms: &[(Element, u64)]) -> Result<RingElement, RingError> {
        let mut map = BTreeMap::new();
        for &(e, c) in terms {
            if !self.group.contains(e) {
                return Err(RingError::ElementOutOfGroup);
            }
            if c >= self.field.p {
                return Err(RingError::CoefficientOutOfRange(c, self.field.p));
            }
            let entry = map.entry(e).or_insert(0);
            *entry = self.field.add(*entry, c);
        }
        map.retain(|_, c| *c != 0);
        Ok(RingElement { terms: map })
    }

    pub fn one(&self) -> RingElement {
        RingElement {
            terms: BTreeMap::from([(self.group.identity(), 1)]),
        }
    }

    pub fn is_one(&self, f: &RingElement) -> bool {
        f.terms.len() == 1 && f.coefficient(self.group.identity()) == 1
    }

    pub fn add(&self, f: &RingElement, g: &RingElement) -> RingElement {
        let mut out = f.terms.clone();
        for (&e, &c) in &g.terms {
            let entry = out.entry(e).or_insert(0);
            *entry = self.field.add(*entry, c);
        }
        out.retain(|_, c| *c != 0);
        RingElement { terms: out }
    }

    pub fn neg(&self, f: &RingElement) -> RingElement {
        RingElement {
            terms: f
                .terms
                .iter()
                .map(|(&e, &c)| (e, self.field.neg(c)))
                .collect(),
        }
    }

    pub fn sub(&self, f: &RingElement, g: &RingElement) -> RingElement {
        self.add(f, &self.neg(g))
    }

    /// Convolution product `(f*g)(x) = Σ_y f(y) g(y⁻¹x)`.
    pub fn mul(&self, f: &RingElement, g: &RingElement) -> RingElement {
        let mut out: BTreeMap<Element, u64> = BTreeMap::new();
        for (&a, &c) in &f.terms {
            for (&b, &d) in &g.terms {
                let e = self.group.mul(a, b);
                let entry = out.entry(e).or_insert(0);
                *entry = self.field.add(*entry, self.field.mul(c, d));
            }
        }
        out.retain(|_, c| *c != 0);
        RingElement { terms: out }
    }

    /// Coefficient sum; the ring homomorphism onto `F_p`.
    pub fn augmentation(&self, f: &RingElement) -> u64 {
        f.terms.values().fold(0, |acc, &c| self.field.add(acc, c))
    }

    pub fn in_augmentation_ideal(&self, f: &RingElement) -> bool {
        self.augmentation(f) == 0
    }

    /// The convolution automaton `T_a(f) = f ∗ a` over the alphabet
    /// `F_p`, with memory `supp(a)⁻¹` and local rule
    /// `τ(pattern) = Σ_u a(u) · pattern(u⁻¹)`.
    pub fn convolution_automaton(&self, a: &RingElement) -> Result<CellularAutomaton, RingError> {
        if a.is_zero() {
            return Err(RingError::ZeroElement);
        }
        let p = self.field.p;
        if p > 251 {
            return Err(RingError::CharacteristicTooLarge(p));
        }
        let k = p as usize;
        let memory = self.group.set_inverse(&a.support());
        let table_len = checked_pow(k, memory.len());
        if table_len > (1 << 26) {
            return Err(RingError::Analysis(AnalysisError::BudgetExceeded {
                what: "convolution automaton table".into(),
                needed: table_len,
                cap: 1 << 26,
            }));
        }
        let coeffs: Vec<(usize, u64)> = a
            .terms()
            .map(|(u, c)| {
                let pos = memory
                    .index_of(self.group.inv(u))
                    .expect("memory is the inverted support");
                (pos, c)
            })
            .collect();
        let mut table = Vec::with_capacity(table_len as usize);
        for code in 0..table_len as usize {
            let values = decode_values(code, memory.len(), k);
            let mut acc = 0u64;
            for &(pos, c) in &coeffs {
                acc = self.field.add(acc, self.field.mul(c, values[pos] as u64));
            }
            table.push(acc as Symbol);
        }
        Ok(CellularAutomaton::new(
            self.group.clone(),
            LocalRule::new(k, memory, table)?,
        )?)
    }
}

/// Result of an exhaustive direct-finiteness scan over all pairs.
#[derive(Clone, Debug)]
pub struct ScanReport {
    pub characteristic: u64,
    pub group_order: usize,
    pub pairs_checked: u64,
    /// All ordered pairs `(a, b)` with `a*b = 1`.
    pub unit_pairs: Vec<(RingElement, RingElement)>,
    /// Pairs with `a*b = 1` but `b*a != 1`; always empty for finite
    /// groups, recorded rather than assumed.
    pub violations: Vec<(RingElement, RingElement)>,
}

/// Enumerates every pair of a finite-group group ring and checks
/// `ab = 1 ⟹ ba = 1`.
pub fn direct_finiteness_scan(
    ring: &GroupRing,
    budgets: &Budgets,
) -> Result<ScanReport, RingError> {
    let n = ring
        .group
        .order()
        .ok_or(RingError::ScanRequiresFiniteGroup)?;
    let p = ring.field.p;
    let element_count = checked_pow(p as usize, n);
    let pair_count = element_count.saturating_mul(element_count);
    if pair_count > budgets.enumeration as u128 {
        return Err(RingError::Analysis(AnalysisError::BudgetExceeded {
            what: "direct finiteness pair scan".into(),
            needed: pair_count,
            cap: budgets.enumeration,
        }));
    }
    let elements: Vec<RingElement> = (0..element_count as usize)
        .map(|code| {
            let coeffs = decode_dense(code, n, p);
            dense_to_element(&coeffs)
        })
        .collect();
    let mut unit_pairs = Vec::new();
    let mut violations = Vec::new();
    for a in &elements {
        for b in &elements {
            if ring.is_one(&ring.mul(a, b)) {
                unit_pairs.push((a.clone(), b.clone()));
                if !ring.is_one(&ring.mul(b, a)) {
                    violations.push((a.clone(), b.clone()));
                }
            }
        }
    }
    Ok(ScanReport {
        characteristic: p,
        group_order: n,
        pairs_checked: pair_count as u64,
        unit_pairs,
        violations,
    })
}

fn decode_dense(mut code: usize, len: usize, p: u64) -> Vec<u64> {
    let mut out = Vec::with_capacity(len);
    for _ in 0..len {
        out.push((code % p as usize) as u64);
        code /= p as usize;
    }
    out
}

fn dense_to_element(coeffs: &[u64]) -> RingElement {
    RingElement {
        terms: coeffs
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .map(|(i, &c)| (Element(i as i64), c))
            .collect(),
    }
}

/// Certificates produced for a unit pair `ab = 1`: `T_a` is injective and
/// `T_b` is post-surjective.
#[derive(Clone, Debug)]
pub struct UnitClaimReport {
    pub injectivity: InjectivityCertificate,
    pub post_surjectivity: PostSurjectivityCertificate,
}

/// Runs the shift-space deciders on the convolution automata of a unit
/// pair: `T_a` must decide injective and `T_b` must admit a verified
/// post-surjectivity set. Either failure would falsify the claim and is a
/// property violation.
pub fn verify_unit_claims(
    ring: &GroupRing,
    a: &RingElement,
    b: &RingElement,
    budgets: &Budgets,
) -> Result<UnitClaimReport, RingError> {
    if !ring.is_one(&ring.mul(a, b)) {
        return Err(RingError::NotAUnitPair);
    }
    let t_a = ring.convolution_automaton(a)?;
    let t_b = ring.convolution_automaton(b)?;
    let injectivity = match decide_injectivity(&t_a, budgets)? {
        InjectivityDecision::Injective(cert) => cert,
        InjectivityDecision::NotInjective(_) => {
            return Err(RingError::Analysis(AnalysisError::PropertyViolation(
                format!(
                    "unit pair claim failed: T_a not injective for a = {}",
                    a.term_string()
                ),
            )))
        }
    };
    let widened = Budgets {
        search_radius: budgets.radius_hard_cap,
        ..*budgets
    };
    let post_surjectivity = match find_postsurjectivity_set(&t_b, &widened)? {
        SearchOutcome::Found(cert) => cert,
        SearchOutcome::NotFound { max_radius } => {
            return Err(RingError::Analysis(AnalysisError::PropertyViolation(
                format!(
                    "unit pair claim failed: no post-surjectivity set of radius <= {max_radius} \
                     for b = {}",
                    b.term_string()
                ),
            )))
        }
    };
    Ok(UnitClaimReport {
        injectivity,
        post_surjectivity,
    })
}
