//! Decision procedures and certificate searches for cellular automata on
//! the integers and on finite groups.
//!
//! Every positive decision is backed by a finite certificate that a
//! third party can re-check by windowed enumeration alone:
//!
//! - an injectivity set `N`: whenever two configurations differ at the
//!   identity, their images differ somewhere on `N`; verified by grouping
//!   all patterns on `N·F` by their image restricted to `N`;
//! - a post-surjectivity set `M`: a single-site edit of an image can be
//!   realized by editing the preimage inside `M` only; verified over the
//!   window `M·F⁻¹·F`, which is exact because finite edits reduce to
//!   single-site edits one at a time;
//! - negative decisions carry explicit witnesses: configuration pairs,
//!   diamonds, or Garden of Eden patterns.
//!
//! On both implemented group families the full shift satisfies
//! post-surjective ⟺ injective ⟺ reversible, and the classifier checks
//! that matrix on every run, reporting a property violation if any
//! decision ever disagrees with it.

mod pairgraph;

use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::group::{canonical_subsets, Element, ElementSet, Group, GroupError};
use crate::symbolic::sofic::{image_automaton, sofic_equals_sft};
use crate::symbolic::{
    checked_pow, decode_values, delta, encode_values, same_configuration, CellularAutomaton,
    Configuration, Delta, LocalRule, Pattern, SftDescriptor, Symbol, SymbolicError,
};

/// Enumeration caps; exceeding any of them yields
/// [`AnalysisError::BudgetExceeded`], never a silent wrong answer.
#[derive(Clone, Copy, Debug)]
pub struct Budgets {
    /// Cap on windowed pattern enumerations and automaton state spaces.
    pub enumeration: u64,
    /// Cap on `|A|^|G|` full-shift enumeration over finite groups.
    pub finite_configs: u64,
    /// Candidate radius for certificate searches over the integers.
    pub search_radius: u32,
    /// Hard radius cap for searches whose success is guaranteed by a
    /// positive decision; exhausting it is a property violation.
    pub radius_hard_cap: u32,
}

impl Default for Budgets {
    fn default() -> Budgets {
        Budgets {
            enumeration: 1 << 24,
            finite_configs: 1 << 24,
            search_radius: 4,
            radius_hard_cap: 8,
        }
    }
}

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error("budget exceeded: {what} needs {needed} (cap {cap})")]
    BudgetExceeded {
        what: String,
        needed: u128,
        cap: u64,
    },
    #[error("property violation: {0}")]
    PropertyViolation(String),
    #[error("not applicable: {0}")]
    NotApplicable(String),
    #[error(transparent)]
    Symbolic(#[from] SymbolicError),
    #[error(transparent)]
    Group(#[from] GroupError),
}

impl AnalysisError {
    /// True for any resource-cap failure, including the symbolic layer's.
    pub fn is_budget(&self) -> bool {
        matches!(
            self,
            AnalysisError::BudgetExceeded { .. }
                | AnalysisError::Symbolic(SymbolicError::StateBudget { .. })
                | AnalysisError::Symbolic(SymbolicError::TableTooLarge { .. })
                | AnalysisError::Group(GroupError::EnumerationTooLarge { .. })
        )
    }
}

fn budget_check(what: &str, needed: u128, cap: u64) -> Result<(), AnalysisError> {
    if needed > cap as u128 {
        Err(AnalysisError::BudgetExceeded {
            what: what.to_string(),
            needed,
            cap,
        })
    } else {
        Ok(())
    }
}

/// Outcome of verifying a candidate certificate set.
#[derive(Clone, Debug)]
pub enum SetCheck<C> {
    Valid,
    Invalid(C),
}

impl<C> SetCheck<C> {
    pub fn is_valid(&self) -> bool {
        matches!(self, SetCheck::Valid)
    }
}

/// Two patterns on `N·F` agreeing under the rule on `N` but differing at
/// the identity.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct InjectivityCounterexample {
    pub first: Pattern,
    pub second: Pattern,
}

/// A window pattern and target symbol whose single-site image edit cannot
/// be realized by editing the candidate set.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PostSurjectivityCounterexample {
    pub pattern: Pattern,
    pub target: Symbol,
}

/// A verified injectivity set together with the window the verification
/// enumerated.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct InjectivityCertificate {
    pub set: ElementSet,
    pub checked_window: ElementSet,
    pub exhaustive: bool,
}

/// A verified post-surjectivity set together with the window the
/// verification enumerated.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PostSurjectivityCertificate {
    pub set: ElementSet,
    pub checked_window: ElementSet,
    pub exhaustive: bool,
}

/// Two distinct configurations with equal images.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct NonInjectivityWitness {
    pub first: Configuration,
    pub second: Configuration,
}

/// Two distinct almost-equal configurations with equal images.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DiamondWitness {
    pub first: Configuration,
    pub second: Configuration,
}

/// A pattern with exhaustively verified empty preimage window.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GoePattern(pub Pattern);

/// Result of a bounded certificate search.
#[derive(Clone, Debug)]
pub enum SearchOutcome<T> {
    Found(T),
    /// Inconclusive by itself; pair with the deciders.
    NotFound {
        max_radius: u32,
    },
}

impl<T> SearchOutcome<T> {
    pub fn found(self) -> Option<T> {
        match self {
            SearchOutcome::Found(t) => Some(t),
            SearchOutcome::NotFound { .. } => None,
        }
    }
}

#[derive(Clone, Debug)]
pub enum InjectivityDecision {
    Injective(InjectivityCertificate),
    NotInjective(NonInjectivityWitness),
}

#[derive(Clone, Debug)]
pub enum SurjectivityDecision {
    Surjective,
    NotSurjective(GoePattern),
}

#[derive(Clone, Debug)]
pub enum PreInjectivityDecision {
    PreInjective,
    NotPreInjective(DiamondWitness),
}

#[derive(Clone, Debug)]
pub enum PostSurjectivityDecision {
    PostSurjective(PostSurjectivityCertificate),
    NotPostSurjective {
        witness: NonInjectivityWitness,
        counterexample: Option<PostSurjectivityCounterexample>,
    },
}

struct WindowEvaluator {
    /// Per target site, the window positions of its memory translates.
    site_indices: Vec<Vec<usize>>,
}

impl WindowEvaluator {
    /// Prepares sitewise evaluation of the rule on `targets`, reading
    /// patterns on `window ⊇ targets·F`.
    fn new(ca: &CellularAutomaton, window: &ElementSet, targets: &ElementSet) -> WindowEvaluator {
        let g = ca.group();
        let site_indices = targets
            .iter()
            .map(|&s| {
                ca.memory()
                    .iter()
                    .map(|&f| {
                        window
                            .index_of(g.mul(s, f))
                            .expect("window covers targets * memory")
                    })
                    .collect()
            })
            .collect();
        WindowEvaluator { site_indices }
    }

    fn eval_into(&self, ca: &CellularAutomaton, values: &[Symbol], out: &mut Vec<Symbol>) {
        out.clear();
        let mut buf = Vec::with_capacity(ca.memory().len());
        for idxs in &self.site_indices {
            buf.clear();
            buf.extend(idxs.iter().map(|&i| values[i]));
            out.push(ca.rule().eval(&buf));
        }
    }
}

/// Verifies that `set` is an injectivity set: any two patterns on
/// `set·F` that disagree at the identity have different images on `set`.
/// By shift equivariance this single-anchor pattern check decides the
/// configuration-level property exactly. Returns the first colliding
/// pattern pair otherwise.
pub fn verify_injectivity_set(
    ca: &CellularAutomaton,
    set: &ElementSet,
    budgets: &Budgets,
) -> Result<SetCheck<InjectivityCounterexample>, AnalysisError> {
    let g = ca.group();
    let k = ca.alphabet();
    let window = g.set_product(set, ca.memory());
    let Some(id_pos) = window.index_of(g.identity()) else {
        // patterns on the window leave the identity free, so two
        // configurations may differ there while agreeing on all of the
        // set's image: any single pattern taken twice is a counterexample
        let p = Pattern::from_code(window, 0, k);
        return Ok(SetCheck::Invalid(InjectivityCounterexample {
            first: p.clone(),
            second: p,
        }));
    };
    let total = checked_pow(k, window.len());
    budget_check("injectivity window enumeration", total, budgets.enumeration)?;
    let eval = WindowEvaluator::new(ca, &window, set);
    let mut seen: HashMap<Vec<Symbol>, (Symbol, usize)> = HashMap::new();
    let mut image = Vec::with_capacity(set.len());
    for code in 0..total as usize {
        let values = decode_values(code, window.len(), k);
        eval.eval_into(ca, &values, &mut image);
        let at_id = values[id_pos];
        match seen.get(&image) {
            Some(&(prev_sym, prev_code)) if prev_sym != at_id => {
                return Ok(SetCheck::Invalid(InjectivityCounterexample {
                    first: Pattern::from_code(window.clone(), prev_code, k),
                    second: Pattern::from_code(window, code, k),
                }));
            }
            Some(_) => {}
            None => {
                seen.insert(image.clone(), (at_id, code));
            }
        }
    }
    Ok(SetCheck::Valid)
}

/// Verifies that `set` is a post-surjectivity set via the single-site
/// sufficiency check: for every pattern `q` on `W = set·F⁻¹·F` and every
/// symbol `a` differing from the image at the identity, some reassignment
/// of the sites in `set` reproduces the image on `set·F⁻¹ ∖ {1}` and
/// produces `a` at the identity. Finite image edits reduce to single-site
/// edits one translate at a time, so this check is exact.
pub fn verify_postsurjectivity_set(
    ca: &CellularAutomaton,
    set: &ElementSet,
    budgets: &Budgets,
) -> Result<SetCheck<PostSurjectivityCounterexample>, AnalysisError> {
    let g = ca.group();
    let k = ca.alphabet();
    let f_inv = g.set_inverse(ca.memory());
    let image_sites = g.set_product(set, &f_inv);
    let window = g.set_product(&image_sites, ca.memory());
    let Some(id_site) = image_sites.index_of(g.identity()) else {
        // the identity's image cannot be affected by edits inside `set`
        let p = Pattern::from_code(window, 0, k);
        return Ok(SetCheck::Invalid(PostSurjectivityCounterexample {
            pattern: p,
            target: 1,
        }));
    };
    let q_total = checked_pow(k, window.len());
    let r_total = checked_pow(k, set.len());
    budget_check(
        "post-surjectivity window enumeration",
        q_total.saturating_mul(r_total).saturating_mul(k as u128),
        budgets.enumeration,
    )?;
    let eval = WindowEvaluator::new(ca, &window, &image_sites);
    let set_positions: Vec<usize> = set
        .iter()
        .map(|&m| window.index_of(m).expect("set lies inside its window"))
        .collect();
    let mut base_image = Vec::with_capacity(image_sites.len());
    let mut edited_image = Vec::with_capacity(image_sites.len());
    for q_code in 0..q_total as usize {
        let original = decode_values(q_code, window.len(), k);
        let mut values = original.clone();
        eval.eval_into(ca, &values, &mut base_image);
        let current = base_image[id_site];
        for a in 0..k as Symbol {
            if a == current {
                continue;
            }
            let mut found = false;
            'reassign: for r_code in 0..r_total as usize {
                let reassignment = decode_values(r_code, set.len(), k);
                for (&pos, &sym) in set_positions.iter().zip(&reassignment) {
                    values[pos] = sym;
                }
                eval.eval_into(ca, &values, &mut edited_image);
                for (i, (&got, &want)) in edited_image.iter().zip(&base_image).enumerate() {
                    let target = if i == id_site { a } else { want };
                    if got != target {
                        continue 'reassign;
                    }
                }
                found = true;
                break;
            }
            // restore the original set sites for the next target symbol
            for &pos in &set_positions {
                values[pos] = original[pos];
            }
            if !found {
                return Ok(SetCheck::Invalid(PostSurjectivityCounterexample {
                    pattern: Pattern::from_code(window, q_code, k),
                    target: a,
                }));
            }
        }
    }
    Ok(SetCheck::Valid)
}

/// Searches the canonical subset enumeration for the minimal verifying
/// injectivity set. `NotFound` is inconclusive by itself.
pub fn find_injectivity_set(
    ca: &CellularAutomaton,
    budgets: &Budgets,
) -> Result<SearchOutcome<InjectivityCertificate>, AnalysisError> {
    for cand in canonical_subsets(ca.group(), budgets.search_radius)? {
        if verify_injectivity_set(ca, &cand, budgets)?.is_valid() {
            let window = ca.group().set_product(&cand, ca.memory());
            return Ok(SearchOutcome::Found(InjectivityCertificate {
                set: cand,
                checked_window: window,
                exhaustive: true,
            }));
        }
    }
    Ok(SearchOutcome::NotFound {
        max_radius: budgets.search_radius,
    })
}

/// Searches the canonical subset enumeration for the minimal verifying
/// post-surjectivity set.
pub fn find_postsurjectivity_set(
    ca: &CellularAutomaton,
    budgets: &Budgets,
) -> Result<SearchOutcome<PostSurjectivityCertificate>, AnalysisError> {
    for cand in canonical_subsets(ca.group(), budgets.search_radius)? {
        if verify_postsurjectivity_set(ca, &cand, budgets)?.is_valid() {
            let g = ca.group();
            let window = g.set_product(
                &g.set_product(&cand, &g.set_inverse(ca.memory())),
                ca.memory(),
            );
            return Ok(SearchOutcome::Found(PostSurjectivityCertificate {
                set: cand,
                checked_window: window,
                exhaustive: true,
            }));
        }
    }
    Ok(SearchOutcome::NotFound {
        max_radius: budgets.search_radius,
    })
}

/// For reversible automata, a symmetric injectivity set is a
/// post-surjectivity set: symmetrizes `set` and re-verifies it in the
/// dual role. Failure would falsify the duality and is reported as a
/// property violation with the full counterexample.
pub fn postsurjectivity_set_from_injectivity_set(
    ca: &CellularAutomaton,
    set: &ElementSet,
    budgets: &Budgets,
) -> Result<PostSurjectivityCertificate, AnalysisError> {
    let g = ca.group();
    let sym = g.symmetrize(set);
    match verify_postsurjectivity_set(ca, &sym, budgets)? {
        SetCheck::Valid => {
            let window = g.set_product(
                &g.set_product(&sym, &g.set_inverse(ca.memory())),
                ca.memory(),
            );
            Ok(PostSurjectivityCertificate {
                set: sym,
                checked_window: window,
                exhaustive: true,
            })
        }
        SetCheck::Invalid(c) => Err(AnalysisError::PropertyViolation(format!(
            "symmetrized injectivity set {:?} failed post-surjectivity verification: \
             window pattern {:?} with target {} has no confined preimage edit",
            sym, c.pattern, c.target
        ))),
    }
}

/// Dual direction: a symmetric post-surjectivity set of a reversible
/// automaton is an injectivity set.
pub fn injectivity_set_from_postsurjectivity_set(
    ca: &CellularAutomaton,
    set: &ElementSet,
    budgets: &Budgets,
) -> Result<InjectivityCertificate, AnalysisError> {
    let g = ca.group();
    let sym = g.symmetrize(set);
    match verify_injectivity_set(ca, &sym, budgets)? {
        SetCheck::Valid => {
            let window = g.set_product(&sym, ca.memory());
            Ok(InjectivityCertificate {
                set: sym,
                checked_window: window,
                exhaustive: true,
            })
        }
        SetCheck::Invalid(c) => Err(AnalysisError::PropertyViolation(format!(
            "symmetrized post-surjectivity set {:?} failed injectivity verification: \
             patterns {:?} and {:?} collide",
            sym, c.first, c.second
        ))),
    }
}

/// A local rule defined only on the image patterns; codes outside the
/// image map to symbol 0 and are flagged unreachable.
#[derive(Clone, Debug)]
pub struct PartialAutomaton {
    pub automaton: CellularAutomaton,
    pub reachable: Vec<bool>,
}

/// Builds the inverse rule on memory `set` from a verified injectivity
/// set: for every pattern `p` on `set·F`, the image of `p` restricted to
/// `set` determines `p` at the identity. A conflict is impossible for a
/// verified set and is reported as a property violation.
pub fn synthesize_inverse(
    ca: &CellularAutomaton,
    set: &ElementSet,
    budgets: &Budgets,
) -> Result<PartialAutomaton, AnalysisError> {
    let g = ca.group();
    let k = ca.alphabet();
    let window = g.set_product(set, ca.memory());
    let Some(id_pos) = window.index_of(g.identity()) else {
        return Err(AnalysisError::PropertyViolation(
            "inverse synthesis requires the identity inside set * memory".into(),
        ));
    };
    let total = checked_pow(k, window.len());
    budget_check("inverse synthesis enumeration", total, budgets.enumeration)?;
    let table_len = checked_pow(k, set.len());
    budget_check("inverse rule table", table_len, budgets.enumeration)?;
    let eval = WindowEvaluator::new(ca, &window, set);
    let mut table: Vec<Option<Symbol>> = vec![None; table_len as usize];
    let mut image = Vec::with_capacity(set.len());
    for code in 0..total as usize {
        let values = decode_values(code, window.len(), k);
        eval.eval_into(ca, &values, &mut image);
        let img_code = encode_values(&image, k);
        let preimage_sym = values[id_pos];
        match table[img_code] {
            None => table[img_code] = Some(preimage_sym),
            Some(prev) if prev == preimage_sym => {}
            Some(prev) => {
                return Err(AnalysisError::PropertyViolation(format!(
                    "inverse synthesis conflict: image pattern code {img_code} maps to both \
                     {prev} and {preimage_sym}; the provided set is not an injectivity set"
                )))
            }
        }
    }
    let reachable: Vec<bool> = table.iter().map(Option::is_some).collect();
    let full_table: Vec<Symbol> = table.into_iter().map(|v| v.unwrap_or(0)).collect();
    let rule = LocalRule::new(k, set.clone(), full_table)?;
    Ok(PartialAutomaton {
        automaton: CellularAutomaton::new(g.clone(), rule)?,
        reachable,
    })
}

/// Verifies that `set` is an injectivity set for the synthesized inverse
/// *restricted to image patterns*: only patterns arising as images of the
/// forward rule participate in the collision check.
pub fn verify_inverse_injectivity_set(
    ca: &CellularAutomaton,
    inverse: &PartialAutomaton,
    set: &ElementSet,
    budgets: &Budgets,
) -> Result<bool, AnalysisError> {
    let g = ca.group();
    let k = ca.alphabet();
    let inv_memory = inverse.automaton.memory();
    let image_window = g.set_product(set, inv_memory);
    let Some(id_pos) = image_window.index_of(g.identity()) else {
        return Ok(false);
    };
    let preimage_window = g.set_product(&image_window, ca.memory());
    let total = checked_pow(k, preimage_window.len());
    budget_check(
        "inverse injectivity enumeration",
        total,
        budgets.enumeration,
    )?;
    let forward = WindowEvaluator::new(ca, &preimage_window, &image_window);
    let backward = WindowEvaluator::new(&inverse.automaton, &image_window, set);
    let mut image_codes: HashMap<usize, ()> = HashMap::new();
    let mut groups: HashMap<Vec<Symbol>, Symbol> = HashMap::new();
    let mut image = Vec::with_capacity(image_window.len());
    let mut recovered = Vec::with_capacity(set.len());
    for code in 0..total as usize {
        let values = decode_values(code, preimage_window.len(), k);
        forward.eval_into(ca, &values, &mut image);
        let img_code = encode_values(&image, k);
        if image_codes.contains_key(&img_code) {
            continue;
        }
        image_codes.insert(img_code, ());
        backward.eval_into(&inverse.automaton, &image, &mut recovered);
        match groups.get(&recovered) {
            Some(&prev) if prev != image[id_pos] => return Ok(false),
            Some(_) => {}
            None => {
                groups.insert(recovered.clone(), image[id_pos]);
            }
        }
    }
    Ok(true)
}

/// Minimal canonical injectivity set for the inverse over the image.
pub fn find_inverse_injectivity_set(
    ca: &CellularAutomaton,
    inverse: &PartialAutomaton,
    budgets: &Budgets,
) -> Result<SearchOutcome<ElementSet>, AnalysisError> {
    for cand in canonical_subsets(ca.group(), budgets.search_radius)? {
        if verify_inverse_injectivity_set(ca, inverse, &cand, budgets)? {
            return Ok(SearchOutcome::Found(cand));
        }
    }
    Ok(SearchOutcome::NotFound {
        max_radius: budgets.search_radius,
    })
}

/// Decides injectivity with a certificate or an explicit witness pair.
///
/// Integers: pair-graph search; on a positive decision the certificate
/// search is rerun up to the hard radius cap, where success is guaranteed
/// (a finite injectivity set always exists for an injective automaton).
/// Finite groups: exhaustive comparison over the full shift.
pub fn decide_injectivity(
    ca: &CellularAutomaton,
    budgets: &Budgets,
) -> Result<InjectivityDecision, AnalysisError> {
    match ca.group() {
        Group::Integers => {
            if let Some((x, y)) = pairgraph::noninjectivity_witness(ca, budgets.enumeration)? {
                return Ok(InjectivityDecision::NotInjective(NonInjectivityWitness {
                    first: x,
                    second: y,
                }));
            }
            let widened = Budgets {
                search_radius: budgets.radius_hard_cap,
                ..*budgets
            };
            match find_injectivity_set(ca, &widened)? {
                SearchOutcome::Found(cert) => Ok(InjectivityDecision::Injective(cert)),
                SearchOutcome::NotFound { max_radius } => {
                    Err(AnalysisError::PropertyViolation(format!(
                        "automaton decided injective but no injectivity set of radius <= {max_radius} verified"
                    )))
                }
            }
        }
        Group::Finite(_) => {
            if let Some((x, y)) = finite_collision(ca, budgets)? {
                return Ok(InjectivityDecision::NotInjective(NonInjectivityWitness {
                    first: x,
                    second: y,
                }));
            }
            match find_injectivity_set(ca, budgets)? {
                SearchOutcome::Found(cert) => Ok(InjectivityDecision::Injective(cert)),
                SearchOutcome::NotFound { .. } => Err(AnalysisError::PropertyViolation(
                    "finite automaton is injective but no subset verified; \
                     the whole group should always verify"
                        .into(),
                )),
            }
        }
    }
}

/// First colliding configuration pair of a finite-group automaton, in
/// enumeration order.
fn finite_collision(
    ca: &CellularAutomaton,
    budgets: &Budgets,
) -> Result<Option<(Configuration, Configuration)>, AnalysisError> {
    let n = ca.group().order().expect("finite group");
    let k = ca.alphabet();
    let total = checked_pow(k, n);
    budget_check(
        "finite full-shift enumeration",
        total,
        budgets.finite_configs,
    )?;
    let mut seen: HashMap<usize, usize> = HashMap::new();
    for code in 0..total as usize {
        let x = Configuration::Total(decode_values(code, n, k));
        let img = match ca.apply(&x) {
            Configuration::Total(v) => encode_values(&v, k),
            Configuration::Periodic(_) => unreachable!(),
        };
        if let Some(&prev) = seen.get(&img) {
            return Ok(Some((Configuration::Total(decode_values(prev, n, k)), x)));
        }
        seen.insert(img, code);
    }
    Ok(None)
}

/// Decides surjectivity; a negative answer carries a Garden of Eden
/// pattern. Integers: subset construction on the image automaton, with a
/// shortest missing factor as the pattern. Finite groups: image
/// enumeration, with the canonically first missing window pattern.
pub fn decide_surjectivity(
    ca: &CellularAutomaton,
    budgets: &Budgets,
) -> Result<SurjectivityDecision, AnalysisError> {
    match ca.group() {
        Group::Integers => {
            let aut = image_automaton(ca)?;
            match aut.missing_factor(budgets.enumeration)? {
                None => Ok(SurjectivityDecision::Surjective),
                Some(word) => {
                    let window = ElementSet::from_ids(&(0..word.len() as i64).collect::<Vec<_>>());
                    let pattern = Pattern::new(window, word)?;
                    Ok(SurjectivityDecision::NotSurjective(GoePattern(pattern)))
                }
            }
        }
        Group::Finite(f) => {
            let n = f.order();
            let k = ca.alphabet();
            let total = checked_pow(k, n);
            budget_check(
                "finite full-shift enumeration",
                total,
                budgets.finite_configs,
            )?;
            let mut images: Vec<Configuration> = Vec::new();
            let mut covered = vec![false; total as usize];
            for code in 0..total as usize {
                let x = Configuration::Total(decode_values(code, n, k));
                let img = ca.apply(&x);
                if let Configuration::Total(v) = &img {
                    let c = encode_values(v, k);
                    if !covered[c] {
                        covered[c] = true;
                        images.push(img);
                    }
                }
            }
            if covered.iter().all(|&b| b) {
                return Ok(SurjectivityDecision::Surjective);
            }
            // canonically first GOE pattern: smallest window, then code
            for window in canonical_subsets(ca.group(), 0)? {
                let patterns = checked_pow(k, window.len());
                let mut present = vec![false; patterns as usize];
                for img in &images {
                    let p = crate::symbolic::restrict(img, &window);
                    present[p.code(k)] = true;
                }
                if let Some(code) = present.iter().position(|&b| !b) {
                    let pattern = Pattern::from_code(window, code, k);
                    return Ok(SurjectivityDecision::NotSurjective(GoePattern(pattern)));
                }
            }
            unreachable!("a non-surjective finite automaton misses a pattern on the full group")
        }
    }
}

/// Decides pre-injectivity; a negative answer carries a diamond.
pub fn decide_preinjectivity(
    ca: &CellularAutomaton,
    budgets: &Budgets,
) -> Result<PreInjectivityDecision, AnalysisError> {
    match ca.group() {
        Group::Integers => match pairgraph::diamond_witness(ca, budgets.enumeration)? {
            None => Ok(PreInjectivityDecision::PreInjective),
            Some((x, y)) => Ok(PreInjectivityDecision::NotPreInjective(DiamondWitness {
                first: x,
                second: y,
            })),
        },
        Group::Finite(_) => {
            // every pair of configurations over a finite group is
            // almost-equal, so any collision is a diamond
            match finite_collision(ca, budgets)? {
                None => Ok(PreInjectivityDecision::PreInjective),
                Some((x, y)) => Ok(PreInjectivityDecision::NotPreInjective(DiamondWitness {
                    first: x,
                    second: y,
                })),
            }
        }
    }
}

/// Decides post-surjectivity. On the implemented groups (both sofic) the
/// full shift satisfies post-surjective ⟺ reversible ⟺ injective, so the
/// decision reduces to injectivity; a positive answer must then produce
/// an explicit verified certificate, and a negative answer carries the
/// non-injectivity witness plus, when the window budget allows, a direct
/// verification counterexample for a small probe set.
pub fn decide_postsurjectivity(
    ca: &CellularAutomaton,
    budgets: &Budgets,
) -> Result<PostSurjectivityDecision, AnalysisError> {
    match decide_injectivity(ca, budgets)? {
        InjectivityDecision::Injective(_) => {
            let widened = Budgets {
                search_radius: budgets.radius_hard_cap,
                ..*budgets
            };
            match find_postsurjectivity_set(ca, &widened)? {
                SearchOutcome::Found(cert) => Ok(PostSurjectivityDecision::PostSurjective(cert)),
                SearchOutcome::NotFound { max_radius } => {
                    Err(AnalysisError::PropertyViolation(format!(
                        "automaton is reversible but no post-surjectivity set of radius <= {max_radius} verified"
                    )))
                }
            }
        }
        InjectivityDecision::NotInjective(witness) => {
            let probe = probe_set(ca.group());
            let counterexample = match verify_postsurjectivity_set(ca, &probe, budgets) {
                Ok(SetCheck::Invalid(c)) => Some(c),
                Ok(SetCheck::Valid) => {
                    return Err(AnalysisError::PropertyViolation(format!(
                        "non-injective automaton verified {probe:?} as a post-surjectivity set; \
                         this contradicts post-surjective implies injective on sofic groups"
                    )))
                }
                Err(e) if e.is_budget() => None,
                Err(e) => return Err(e),
            };
            Ok(PostSurjectivityDecision::NotPostSurjective {
                witness,
                counterexample,
            })
        }
    }
}

fn probe_set(group: &Group) -> ElementSet {
    match group {
        Group::Integers => ElementSet::from_ids(&[-1, 0, 1]),
        Group::Finite(f) => ElementSet::from_elements((0..f.order() as i64).map(Element).collect()),
    }
}

/// The image subshift of finite type on the window `M·N`: `N` an
/// injectivity set for the automaton, `M` one for its inverse over the
/// image, both taken to contain the identity (inserted if missing;
/// supersets of injectivity sets remain injectivity sets). Forbidden
/// patterns are the window patterns missing from the image.
///
/// The result is cross-checked against an independent presentation of the
/// image: automaton-language equality over the integers, exhaustive image
/// comparison over finite groups. Disagreement is a property violation.
pub fn image_sft(
    ca: &CellularAutomaton,
    n_set: &ElementSet,
    m_set: &ElementSet,
    budgets: &Budgets,
) -> Result<SftDescriptor, AnalysisError> {
    image_sft_of_power(ca, ca, n_set, m_set, 1, budgets)
}

/// Image SFT of the `power`-fold composite on the window `M·N^power`.
pub fn iterated_image_sft(
    ca: &CellularAutomaton,
    n_set: &ElementSet,
    m_set: &ElementSet,
    power: u32,
    budgets: &Budgets,
) -> Result<SftDescriptor, AnalysisError> {
    if power == 0 {
        return Err(AnalysisError::NotApplicable(
            "iterated image SFT requires power >= 1".into(),
        ));
    }
    let composed = ca.power(power, budgets.enumeration)?;
    image_sft_of_power(ca, &composed, n_set, m_set, power, budgets)
}

fn image_sft_of_power(
    ca: &CellularAutomaton,
    composed: &CellularAutomaton,
    n_set: &ElementSet,
    m_set: &ElementSet,
    power: u32,
    budgets: &Budgets,
) -> Result<SftDescriptor, AnalysisError> {
    let g = ca.group();
    let k = ca.alphabet();
    let id = ElementSet::singleton(g.identity());
    let n1 = n_set.union(&id);
    let m1 = m_set.union(&id);
    let mut n_power = id.clone();
    for _ in 0..power {
        n_power = g.set_product(&n_power, &n1);
    }
    let window = g.set_product(&m1, &n_power);
    let preimage_window = g.set_product(&window, composed.memory());
    let total = checked_pow(k, preimage_window.len());
    budget_check("image SFT enumeration", total, budgets.enumeration)?;
    let pattern_count = checked_pow(k, window.len());
    budget_check(
        "image SFT pattern table",
        pattern_count,
        budgets.enumeration,
    )?;
    let eval = WindowEvaluator::new(composed, &preimage_window, &window);
    let mut present = vec![false; pattern_count as usize];
    let mut image = Vec::with_capacity(window.len());
    for code in 0..total as usize {
        let values = decode_values(code, preimage_window.len(), k);
        eval.eval_into(composed, &values, &mut image);
        present[encode_values(&image, k)] = true;
    }
    let forbidden: Vec<Vec<Symbol>> = present
        .iter()
        .enumerate()
        .filter(|(_, &p)| !p)
        .map(|(code, _)| decode_values(code, window.len(), k))
        .collect();
    let sft = SftDescriptor::new(window, forbidden)?;
    match g {
        Group::Integers => {
            let aut = image_automaton(composed)?;
            if !sofic_equals_sft(&aut, &sft, budgets.enumeration)? {
                return Err(AnalysisError::PropertyViolation(
                    "image SFT disagrees with the image automaton language".into(),
                ));
            }
        }
        Group::Finite(f) => {
            let n = f.order();
            let total = checked_pow(k, n);
            budget_check("image SFT finite check", total, budgets.finite_configs)?;
            let mut in_image = vec![false; total as usize];
            for code in 0..total as usize {
                let x = Configuration::Total(decode_values(code, n, k));
                if let Configuration::Total(v) = composed.apply(&x) {
                    in_image[encode_values(&v, k)] = true;
                }
            }
            for (code, &expected) in in_image.iter().enumerate() {
                let x = Configuration::Total(decode_values(code, n, k));
                if sft.contains(g, &x) != expected {
                    return Err(AnalysisError::PropertyViolation(
                        "image SFT disagrees with the exhaustive image".into(),
                    ));
                }
            }
        }
    }
    Ok(sft)
}

/// All patterns on `window` with no preimage, by exhaustive scan of the
/// patterns on `window·F`.
///
/// For an injective automaton with certified sets `N` and `M`, the window
/// of interest is `M·N`: that is where a Garden of Eden pattern would
/// live if the automaton failed to be surjective. On the implemented
/// groups injectivity forces surjectivity, so that particular search
/// always comes back empty; the operation accepts arbitrary windows and
/// automata instead.
pub fn goe_search(
    ca: &CellularAutomaton,
    window: &ElementSet,
    budgets: &Budgets,
) -> Result<Vec<GoePattern>, AnalysisError> {
    let g = ca.group();
    let k = ca.alphabet();
    let preimage_window = g.set_product(window, ca.memory());
    let total = checked_pow(k, preimage_window.len());
    budget_check("GOE preimage enumeration", total, budgets.enumeration)?;
    let pattern_count = checked_pow(k, window.len());
    budget_check("GOE pattern table", pattern_count, budgets.enumeration)?;
    let eval = WindowEvaluator::new(ca, &preimage_window, window);
    let mut present = vec![false; pattern_count as usize];
    let mut image = Vec::with_capacity(window.len());
    for code in 0..total as usize {
        let values = decode_values(code, preimage_window.len(), k);
        eval.eval_into(ca, &values, &mut image);
        present[encode_values(&image, k)] = true;
    }
    Ok(present
        .iter()
        .enumerate()
        .filter(|(_, &p)| !p)
        .map(|(code, _)| GoePattern(Pattern::from_code(window.clone(), code, k)))
        .collect())
}

/// Tri-state decision flag; `Unknown` records a budget-limited decider.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Tri {
    True,
    False,
    Unknown,
}

impl Tri {
    pub fn known(self) -> Option<bool> {
        match self {
            Tri::True => Some(true),
            Tri::False => Some(false),
            Tri::Unknown => None,
        }
    }

    fn of(b: bool) -> Tri {
        if b {
            Tri::True
        } else {
            Tri::False
        }
    }
}

/// How a flag was decided.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Method {
    /// Pair-graph / subset construction over the integers.
    DeBruijn,
    /// Exhaustive enumeration over a finite full shift.
    Brute,
    /// Derived from another flag through a proved equivalence.
    Derived,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct MethodTags {
    pub injective: Method,
    pub surjective: Method,
    pub pre_injective: Method,
    pub post_surjective: Method,
}

/// Full classification of one automaton with certificates and witnesses.
#[derive(Clone, Debug, Serialize)]
pub struct Classification {
    pub injective: Tri,
    pub surjective: Tri,
    pub pre_injective: Tri,
    pub post_surjective: Tri,
    pub reversible: Tri,
    pub injectivity_certificate: Option<InjectivityCertificate>,
    pub post_surjectivity_certificate: Option<PostSurjectivityCertificate>,
    pub non_injectivity_witness: Option<NonInjectivityWitness>,
    pub diamond_witness: Option<DiamondWitness>,
    pub goe_pattern: Option<GoePattern>,
    pub post_surjectivity_counterexample: Option<PostSurjectivityCounterexample>,
    pub methods: MethodTags,
}

/// Runs all deciders and checks the coherence matrix. Budget-limited
/// deciders leave `Unknown` flags; checks involving an unknown flag are
/// skipped. Any violated implication is a property violation.
pub fn classify(
    ca: &CellularAutomaton,
    budgets: &Budgets,
) -> Result<Classification, AnalysisError> {
    let base_method = match ca.group() {
        Group::Integers => Method::DeBruijn,
        Group::Finite(_) => Method::Brute,
    };
    let mut out = Classification {
        injective: Tri::Unknown,
        surjective: Tri::Unknown,
        pre_injective: Tri::Unknown,
        post_surjective: Tri::Unknown,
        reversible: Tri::Unknown,
        injectivity_certificate: None,
        post_surjectivity_certificate: None,
        non_injectivity_witness: None,
        diamond_witness: None,
        goe_pattern: None,
        post_surjectivity_counterexample: None,
        methods: MethodTags {
            injective: base_method,
            surjective: base_method,
            pre_injective: base_method,
            post_surjective: Method::Derived,
        },
    };
    match decide_injectivity(ca, budgets) {
        Ok(InjectivityDecision::Injective(cert)) => {
            out.injective = Tri::True;
            out.injectivity_certificate = Some(cert);
        }
        Ok(InjectivityDecision::NotInjective(w)) => {
            out.injective = Tri::False;
            out.non_injectivity_witness = Some(w);
        }
        Err(e) if e.is_budget() => {}
        Err(e) => return Err(e),
    }
    match decide_surjectivity(ca, budgets) {
        Ok(SurjectivityDecision::Surjective) => out.surjective = Tri::True,
        Ok(SurjectivityDecision::NotSurjective(p)) => {
            out.surjective = Tri::False;
            out.goe_pattern = Some(p);
        }
        Err(e) if e.is_budget() => {}
        Err(e) => return Err(e),
    }
    match decide_preinjectivity(ca, budgets) {
        Ok(PreInjectivityDecision::PreInjective) => out.pre_injective = Tri::True,
        Ok(PreInjectivityDecision::NotPreInjective(w)) => {
            out.pre_injective = Tri::False;
            out.diamond_witness = Some(w);
        }
        Err(e) if e.is_budget() => {}
        Err(e) => return Err(e),
    }
    match decide_postsurjectivity(ca, budgets) {
        Ok(PostSurjectivityDecision::PostSurjective(cert)) => {
            out.post_surjective = Tri::True;
            out.post_surjectivity_certificate = Some(cert);
        }
        Ok(PostSurjectivityDecision::NotPostSurjective {
            witness,
            counterexample,
        }) => {
            out.post_surjective = Tri::False;
            out.post_surjectivity_counterexample = counterexample;
            if out.non_injectivity_witness.is_none() {
                out.non_injectivity_witness = Some(witness);
            }
        }
        Err(e) if e.is_budget() => {}
        Err(e) => return Err(e),
    }
    if let (Some(i), Some(s)) = (out.injective.known(), out.surjective.known()) {
        out.reversible = Tri::of(i && s);
    }
    check_coherence(&out)?;
    Ok(out)
}

/// The coherence matrix asserted on every classification.
fn check_coherence(c: &Classification) -> Result<(), AnalysisError> {
    let implies = |a: Tri, b: Tri| !matches!((a.known(), b.known()), (Some(true), Some(false)));
    let iff = |a: Tri, b: Tri| match (a.known(), b.known()) {
        (Some(x), Some(y)) => x == y,
        _ => true,
    };
    let both = |a: Tri, b: Tri| match (a.known(), b.known()) {
        (Some(x), Some(y)) => Tri::of(x && y),
        _ => Tri::Unknown,
    };
    let checks: [(&str, bool); 6] = [
        (
            "post-surjective and pre-injective implies injective",
            implies(both(c.post_surjective, c.pre_injective), c.injective),
        ),
        (
            "post-surjective implies surjective",
            implies(c.post_surjective, c.surjective),
        ),
        (
            "injective implies surjective",
            implies(c.injective, c.surjective),
        ),
        (
            "post-surjective implies pre-injective",
            implies(c.post_surjective, c.pre_injective),
        ),
        (
            "post-surjective iff injective",
            iff(c.post_surjective, c.injective),
        ),
        ("injective iff reversible", iff(c.injective, c.reversible)),
    ];
    for (name, ok) in checks {
        if !ok {
            return Err(AnalysisError::PropertyViolation(format!(
                "classification violates: {name} (injective={:?}, surjective={:?}, \
                 pre_injective={:?}, post_surjective={:?})",
                c.injective, c.surjective, c.pre_injective, c.post_surjective
            )));
        }
    }
    Ok(())
}

/// One classified rule of a census run.
#[derive(Clone, Debug)]
pub struct CensusRow {
    pub rule_id: u64,
    pub classification: Classification,
}

impl CensusRow {
    /// Radius of the certified injectivity set: max absolute coordinate
    /// over the integers, cardinality over a finite group.
    pub fn n_radius(&self, group: &Group) -> Option<i64> {
        self.classification
            .injectivity_certificate
            .as_ref()
            .map(|c| set_radius(group, &c.set))
    }

    pub fn m_radius(&self, group: &Group) -> Option<i64> {
        self.classification
            .post_surjectivity_certificate
            .as_ref()
            .map(|c| set_radius(group, &c.set))
    }
}

pub fn set_radius(group: &Group, set: &ElementSet) -> i64 {
    match group {
        Group::Integers => set.radius(),
        Group::Finite(_) => set.len() as i64,
    }
}

/// Classifies every rule over the given memory set, in rule-id order.
/// Rule `id` has table digits `id` in base `k`, least significant digit
/// first. Rule instances run in parallel; the row order is deterministic.
pub fn census(
    group: &Group,
    k: usize,
    memory: &ElementSet,
    budgets: &Budgets,
) -> Result<Vec<CensusRow>, AnalysisError> {
    use rayon::prelude::*;
    let table_len = checked_pow(k, memory.len());
    budget_check("census rule table", table_len, budgets.enumeration)?;
    let rule_count = checked_pow(k, table_len as usize);
    budget_check("census rule space", rule_count, budgets.enumeration)?;
    (0..rule_count as u64)
        .into_par_iter()
        .map(|rule_id| {
            let table = decode_values(rule_id as usize, table_len as usize, k);
            let rule = LocalRule::new(k, memory.clone(), table)?;
            let ca = CellularAutomaton::new(group.clone(), rule)?;
            let classification = classify(&ca, budgets)?;
            Ok(CensusRow {
                rule_id,
                classification,
            })
        })
        .collect()
}

/// Re-checks a non-injectivity witness from first principles.
pub fn validate_noninjectivity_witness(ca: &CellularAutomaton, w: &NonInjectivityWitness) -> bool {
    let g = ca.group();
    !same_configuration(g, &w.first, &w.second)
        && same_configuration(g, &ca.apply(&w.first), &ca.apply(&w.second))
}

/// Re-checks a diamond witness: almost equal, distinct, equal images.
pub fn validate_diamond_witness(ca: &CellularAutomaton, w: &DiamondWitness) -> bool {
    let g = ca.group();
    match delta(g, &w.first, &w.second) {
        Delta::Finite(s) if !s.is_empty() => {
            same_configuration(g, &ca.apply(&w.first), &ca.apply(&w.second))
        }
        _ => false,
    }
}
