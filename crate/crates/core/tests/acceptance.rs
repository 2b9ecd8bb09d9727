//! Acceptance suite: one test per criterion, each printing a PASS line
//! (run with `--nocapture` to see them).
//!
//! The oracles used here are deliberately independent of the decision
//! procedures they check: spatially periodic configurations are evaluated
//! with raw word arithmetic against the rule table, factor coverage is
//! checked by direct sliding-window enumeration, and the pseudonorm is
//! recomputed by brute force over distinct-pair decompositions.

use std::sync::LazyLock;
use std::time::{Duration, Instant};

use num_traits::Zero;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use surjunct::analysis::{
    census, image_sft, injectivity_set_from_postsurjectivity_set, iterated_image_sft,
    postsurjectivity_set_from_injectivity_set, synthesize_inverse, verify_injectivity_set,
    verify_postsurjectivity_set, Budgets, CensusRow, Tri,
};
use surjunct::group::{Element, ElementSet, Group};
use surjunct::groupring::norm::{hamming_norm, metric_probe, norm_s, ProbeConfig, Weight};
use surjunct::groupring::{
    direct_finiteness_scan, verify_unit_claims, GroupRing, PrimeField, RingElement,
};
use surjunct::symbolic::sofic::{image_automaton, sofic_equals_sft};
use surjunct::symbolic::{
    decode_values, delta, same_configuration, CellularAutomaton, Configuration, Delta, LocalRule,
    PeriodicConfiguration, Symbol,
};

fn budgets() -> Budgets {
    Budgets::default()
}

fn rule_z(memory: &[i64], k: usize, table: Vec<Symbol>) -> CellularAutomaton {
    CellularAutomaton::new(
        Group::Integers,
        LocalRule::new(k, ElementSet::from_ids(memory), table).unwrap(),
    )
    .unwrap()
}

fn rule_table(rule_id: u64, table_len: usize, k: usize) -> Vec<Symbol> {
    decode_values(rule_id as usize, table_len, k)
}

fn z_rule_from_id(memory: &[i64], rule_id: u64) -> CellularAutomaton {
    let table = rule_table(rule_id, 1 << memory.len(), 2);
    rule_z(memory, 2, table)
}

struct ZCensus {
    memory: Vec<i64>,
    rows: Vec<CensusRow>,
    elapsed: Duration,
}

fn run_z_census(memory: &[i64]) -> ZCensus {
    let start = Instant::now();
    let rows = census(
        &Group::Integers,
        2,
        &ElementSet::from_ids(memory),
        &budgets(),
    )
    .expect("census completes");
    ZCensus {
        memory: memory.to_vec(),
        rows,
        elapsed: start.elapsed(),
    }
}

static Z_CENSUS_2: LazyLock<ZCensus> = LazyLock::new(|| run_z_census(&[0, 1]));
static Z_CENSUS_3: LazyLock<ZCensus> = LazyLock::new(|| run_z_census(&[0, 1, 2]));

struct FiniteCensus {
    group: Group,
    rows: Vec<CensusRow>,
    elapsed: Duration,
}

fn run_finite_census(group: Group) -> FiniteCensus {
    let start = Instant::now();
    let n = group.order().unwrap() as i64;
    let memory = ElementSet::from_ids(&(0..n).collect::<Vec<_>>());
    let rows = census(&group, 2, &memory, &budgets()).expect("census completes");
    FiniteCensus {
        group,
        rows,
        elapsed: start.elapsed(),
    }
}

static C3_CENSUS: LazyLock<FiniteCensus> =
    LazyLock::new(|| run_finite_census(Group::cyclic(3).unwrap()));
static C4_CENSUS: LazyLock<FiniteCensus> =
    LazyLock::new(|| run_finite_census(Group::cyclic(4).unwrap()));

fn assert_coherent(rows: &[CensusRow], label: &str) {
    for row in rows {
        let c = &row.classification;
        let f = |t: Tri| {
            t.known()
                .unwrap_or_else(|| panic!("{label} rule {} budget-limited", row.rule_id))
        };
        let (inj, surj, pre, post, rev) = (
            f(c.injective),
            f(c.surjective),
            f(c.pre_injective),
            f(c.post_surjective),
            f(c.reversible),
        );
        assert_eq!(
            post, inj,
            "{label} rule {}: post_surjective iff injective",
            row.rule_id
        );
        assert_eq!(
            post, rev,
            "{label} rule {}: post_surjective iff reversible",
            row.rule_id
        );
        assert!(
            !post || surj,
            "{label} rule {}: post implies surjective",
            row.rule_id
        );
        assert!(
            !inj || surj,
            "{label} rule {}: injective implies surjective",
            row.rule_id
        );
        assert!(
            !(post && pre) || inj,
            "{label} rule {}: post and pre imply injective",
            row.rule_id
        );
        assert!(
            !post || pre,
            "{label} rule {}: post implies pre-injective",
            row.rule_id
        );
    }
}

#[test]
fn criterion_01_census_coherence_integers() {
    let c2 = &*Z_CENSUS_2;
    let c3 = &*Z_CENSUS_3;
    assert_eq!(c2.rows.len(), 16);
    assert_eq!(c3.rows.len(), 256);
    assert_coherent(&c2.rows, "Z F={0,1}");
    assert_coherent(&c3.rows, "Z F={0,1,2}");
    let total = c2.elapsed + c3.elapsed;
    assert!(
        total < Duration::from_secs(120),
        "census took {total:?}, limit 2 minutes"
    );
    println!(
        "[criterion 1] PASS - 272 rules coherent (post<=>inj<=>rev, post=>surj, inj=>surj, post&pre=>inj) in {total:?}"
    );
}

// ---- criterion 2: independent periodic/factor oracle ----------------

/// Raw rule evaluation on a p-periodic word: out[i] = tau(w[(i+f) mod p]).
fn oracle_image_word(memory: &[i64], table: &[Symbol], word: &[Symbol]) -> Vec<Symbol> {
    let p = word.len() as i64;
    (0..p)
        .map(|i| {
            let mut code = 0usize;
            for (pos, &f) in memory.iter().enumerate() {
                let sym = word[(i + f).rem_euclid(p) as usize];
                code += (sym as usize) << pos;
            }
            table[code]
        })
        .collect()
}

/// Collision search over spatially periodic configurations of common
/// period <= max_period: two distinct anchored words with equal image
/// words witness non-injectivity.
fn oracle_injective(memory: &[i64], table: &[Symbol], max_period: usize) -> bool {
    for p in 1..=max_period {
        let mut seen: std::collections::HashMap<Vec<Symbol>, usize> =
            std::collections::HashMap::new();
        for code in 0..(1usize << p) {
            let word = decode_values(code, p, 2);
            let image = oracle_image_word(memory, table, &word);
            if let Some(&prev) = seen.get(&image) {
                if prev != code {
                    return false;
                }
            } else {
                seen.insert(image, code);
            }
        }
    }
    true
}

/// Diamond collision search: two distinct periodic words with equal
/// images that also share an aligned length-(d-1) window splice into an
/// almost-equal pair with equal images, and conversely every diamond
/// periodizes. d is the memory diameter.
fn oracle_preinjective(memory: &[i64], table: &[Symbol], max_period: usize) -> bool {
    let lo = *memory.iter().min().unwrap();
    let hi = *memory.iter().max().unwrap();
    let d = (hi - lo + 1) as usize;
    for p in 1..=max_period {
        let mut seen: std::collections::HashMap<(Vec<Symbol>, usize, Vec<Symbol>), usize> =
            std::collections::HashMap::new();
        for code in 0..(1usize << p) {
            let word = decode_values(code, p, 2);
            let image = oracle_image_word(memory, table, &word);
            for pos in 0..p {
                let window: Vec<Symbol> = (0..d.saturating_sub(1))
                    .map(|j| word[(pos + j) % p])
                    .collect();
                let key = (image.clone(), pos, window);
                if let Some(&prev) = seen.get(&key) {
                    if prev != code {
                        return false;
                    }
                } else {
                    seen.insert(key, code);
                }
            }
        }
    }
    true
}

/// Factor coverage: every word of length `len` has a sliding preimage.
fn oracle_surjective(memory: &[i64], table: &[Symbol], len: usize) -> bool {
    let lo = *memory.iter().min().unwrap();
    let hi = *memory.iter().max().unwrap();
    let d = (hi - lo + 1) as usize;
    let input_len = len + d - 1;
    let mut covered = vec![false; 1 << len];
    for code in 0..(1usize << input_len) {
        let input = decode_values(code, input_len, 2);
        let mut out_code = 0usize;
        for i in 0..len {
            let mut window_code = 0usize;
            for (pos, &f) in memory.iter().enumerate() {
                let sym = input[(i as i64 + f - lo) as usize];
                window_code += (sym as usize) << pos;
            }
            out_code += (table[window_code] as usize) << i;
        }
        covered[out_code] = true;
    }
    covered.iter().all(|&b| b)
}

#[test]
fn criterion_02_oracle_equivalence() {
    let mut surjectivity_disagreements: Vec<String> = Vec::new();
    let mut checked = 0;
    for (censusz, memory) in [
        (&*Z_CENSUS_2, vec![0i64, 1]),
        (&*Z_CENSUS_3, vec![0i64, 1, 2]),
    ] {
        let table_len = 1usize << memory.len();
        for row in &censusz.rows {
            let table = rule_table(row.rule_id, table_len, 2);
            let inj = row.classification.injective.known().unwrap();
            let pre = row.classification.pre_injective.known().unwrap();
            let surj = row.classification.surjective.known().unwrap();
            checked += 1;
            // collision search at period <= 10 decides injectivity and
            // pre-injectivity exactly on this rule space
            assert_eq!(
                inj,
                oracle_injective(&memory, &table, 10),
                "injectivity disagreement on rule {} F={memory:?}",
                row.rule_id
            );
            assert_eq!(
                pre,
                oracle_preinjective(&memory, &table, 10),
                "pre-injectivity disagreement on rule {} F={memory:?}",
                row.rule_id
            );
            // sound direction of the coverage oracle: an uncovered word
            // refutes surjectivity and must agree with the decider
            let covered8 = oracle_surjective(&memory, &table, 8);
            if !covered8 {
                assert!(
                    !surj,
                    "rule {} F={memory:?}: decider claims surjective but a word of length <= 8 has no preimage",
                    row.rule_id
                );
            }
            if surj != covered8 {
                surjectivity_disagreements.push(format!(
                    "rule {} F={memory:?}: decider says {}, length-8 coverage says {}",
                    row.rule_id,
                    if surj { "surjective" } else { "not surjective" },
                    if covered8 { "covered" } else { "uncovered" },
                ));
            }
        }
    }
    // exact agreement at the stated factor bound; see the companion test
    // oracle_equivalence_holds_at_factor_length_nine for the same check
    // at the first sufficient bound
    if !surjectivity_disagreements.is_empty() {
        println!(
            "[criterion 2] FAIL - injectivity and pre-injectivity agree on all {checked} rules, \
             but {} rules are non-surjective with a shortest missing factor of length 9, which \
             length-8 factor coverage cannot detect",
            surjectivity_disagreements.len()
        );
    }
    assert!(
        surjectivity_disagreements.is_empty(),
        "{} of {checked} rules disagree with length-8 factor coverage:\n  {}",
        surjectivity_disagreements.len(),
        surjectivity_disagreements.join("\n  ")
    );
    println!("[criterion 2] PASS - {checked} rules agree with the periodic/factor oracle on all three deciders");
}

/// Companion evidence for the criterion above: the same surjectivity
/// comparison with factor coverage extended to length 9 agrees exactly on
/// all 272 rules, so the four disagreements at length 8 are a blind spot
/// of that bound, not of the decision procedure.
#[test]
fn oracle_equivalence_holds_at_factor_length_nine() {
    let mut checked = 0;
    for (censusz, memory) in [
        (&*Z_CENSUS_2, vec![0i64, 1]),
        (&*Z_CENSUS_3, vec![0i64, 1, 2]),
    ] {
        let table_len = 1usize << memory.len();
        for row in &censusz.rows {
            let table = rule_table(row.rule_id, table_len, 2);
            let surj = row.classification.surjective.known().unwrap();
            assert_eq!(
                surj,
                oracle_surjective(&memory, &table, 9),
                "surjectivity disagreement at factor length 9 on rule {} F={memory:?}",
                row.rule_id
            );
            checked += 1;
        }
    }
    println!("[companion] length-9 factor coverage agrees with the surjectivity decider on all {checked} rules");
}

#[test]
fn criterion_03_finite_group_census() {
    let c3 = &*C3_CENSUS;
    let c4 = &*C4_CENSUS;
    assert_eq!(c3.rows.len(), 256);
    assert_eq!(c4.rows.len(), 65536);
    assert_coherent(&c3.rows, "C3");
    assert_coherent(&c4.rows, "C4");
    let total = c3.elapsed + c4.elapsed;
    assert!(
        total < Duration::from_secs(300),
        "finite census took {total:?}, limit 5 minutes"
    );
    let rev3 = c3
        .rows
        .iter()
        .filter(|r| r.classification.reversible == Tri::True)
        .count();
    let rev4 = c4
        .rows
        .iter()
        .filter(|r| r.classification.reversible == Tri::True)
        .count();
    println!(
        "[criterion 3] PASS - C3 (256 rules, {rev3} reversible) and C4 (65536 rules, {rev4} reversible) coherent in {total:?}"
    );
}

/// Every reversible rule of the two integer censuses with its automaton.
fn reversible_z_rules() -> Vec<(String, CellularAutomaton, ElementSet, ElementSet)> {
    let mut out = Vec::new();
    for censusz in [&*Z_CENSUS_2, &*Z_CENSUS_3] {
        for row in &censusz.rows {
            if row.classification.reversible != Tri::True {
                continue;
            }
            let ca = z_rule_from_id(&censusz.memory, row.rule_id);
            let n = row.classification.injectivity_certificate.as_ref().unwrap();
            let m = row
                .classification
                .post_surjectivity_certificate
                .as_ref()
                .unwrap();
            out.push((
                format!("Z F={:?} rule {}", censusz.memory, row.rule_id),
                ca,
                n.set.clone(),
                m.set.clone(),
            ));
        }
    }
    out
}

fn reversible_finite_rules() -> Vec<(String, CellularAutomaton, ElementSet, ElementSet)> {
    let mut out = Vec::new();
    for censusf in [&*C3_CENSUS, &*C4_CENSUS] {
        let n = censusf.group.order().unwrap() as i64;
        let memory = ElementSet::from_ids(&(0..n).collect::<Vec<_>>());
        for row in &censusf.rows {
            if row.classification.reversible != Tri::True {
                continue;
            }
            let table = rule_table(row.rule_id, 1 << n, 2);
            let ca = CellularAutomaton::new(
                censusf.group.clone(),
                LocalRule::new(2, memory.clone(), table).unwrap(),
            )
            .unwrap();
            let ncert = row.classification.injectivity_certificate.as_ref().unwrap();
            let mcert = row
                .classification
                .post_surjectivity_certificate
                .as_ref()
                .unwrap();
            out.push((
                format!("C{n} rule {}", row.rule_id),
                ca,
                ncert.set.clone(),
                mcert.set.clone(),
            ));
        }
    }
    out
}

#[test]
fn criterion_04_set_duality() {
    let mut passes = 0;
    for (label, ca, n_set, m_set) in reversible_z_rules()
        .into_iter()
        .chain(reversible_finite_rules())
    {
        // symmetrized minimal injectivity set verifies as a
        // post-surjectivity set, and vice versa; any failure inside is a
        // property violation error
        let cert = postsurjectivity_set_from_injectivity_set(&ca, &n_set, &budgets())
            .unwrap_or_else(|e| panic!("{label}: duality N -> M failed: {e}"));
        assert!(
            verify_postsurjectivity_set(&ca, &cert.set, &budgets())
                .unwrap()
                .is_valid(),
            "{label}"
        );
        let cert = injectivity_set_from_postsurjectivity_set(&ca, &m_set, &budgets())
            .unwrap_or_else(|e| panic!("{label}: duality M -> N failed: {e}"));
        assert!(
            verify_injectivity_set(&ca, &cert.set, &budgets())
                .unwrap()
                .is_valid(),
            "{label}"
        );
        passes += 1;
    }
    println!("[criterion 4] PASS - set duality verified both ways for {passes} reversible rules");
}

fn seeded_periodic(rng: &mut ChaCha8Rng, k: usize) -> PeriodicConfiguration {
    let sym = |rng: &mut ChaCha8Rng| rng.gen_range(0..k as u8);
    let left: Vec<Symbol> = (0..rng.gen_range(1..4)).map(|_| sym(rng)).collect();
    let right: Vec<Symbol> = (0..rng.gen_range(1..4)).map(|_| sym(rng)).collect();
    let center: Vec<Symbol> = (0..rng.gen_range(0..6)).map(|_| sym(rng)).collect();
    let start = rng.gen_range(-5..5);
    PeriodicConfiguration::new(left, center, right, start).unwrap()
}

fn seeded_configuration(rng: &mut ChaCha8Rng, group: &Group, k: usize) -> Configuration {
    match group {
        Group::Integers => Configuration::Periodic(seeded_periodic(rng, k)),
        Group::Finite(f) => {
            Configuration::Total((0..f.order()).map(|_| rng.gen_range(0..k as u8)).collect())
        }
    }
}

#[test]
fn criterion_05_inverse_synthesis() {
    let mut passes = 0;
    for (label, ca, n_set, _) in reversible_z_rules()
        .into_iter()
        .chain(reversible_finite_rules())
    {
        let inverse = synthesize_inverse(&ca, &n_set, &budgets())
            .unwrap_or_else(|e| panic!("{label}: inverse synthesis failed: {e}"));
        assert!(
            inverse.automaton.memory().is_subset_of(&n_set),
            "{label}: inverse memory exceeds the certified set"
        );
        let mut rng = ChaCha8Rng::seed_from_u64(0x5EED ^ passes as u64);
        for _ in 0..100 {
            let x = seeded_configuration(&mut rng, ca.group(), ca.alphabet());
            let roundtrip = inverse.automaton.apply(&ca.apply(&x));
            assert!(
                same_configuration(ca.group(), &roundtrip, &x),
                "{label}: inverse . rule is not the identity"
            );
        }
        passes += 1;
    }
    println!("[criterion 5] PASS - synthesized inverses invert {passes} reversible rules on 100 seeded configurations each");
}

#[test]
fn criterion_06_image_sft() {
    // the two-track fixture plus every reversible integer census rule
    let mut fixtures = reversible_z_rules();
    let two_track = {
        let mut table = vec![0; 16];
        for s0 in 0..4usize {
            for s1 in 0..4usize {
                table[s0 + 4 * s1] = ((s0 >> 1) + 2 * (s1 & 1)) as Symbol;
            }
        }
        rule_z(&[0, 1], 4, table)
    };
    let n = surjunct::analysis::find_injectivity_set(&two_track, &budgets())
        .unwrap()
        .found()
        .unwrap();
    let inv = synthesize_inverse(&two_track, &n.set, &budgets()).unwrap();
    let m = surjunct::analysis::find_inverse_injectivity_set(&two_track, &inv, &budgets())
        .unwrap()
        .found()
        .unwrap();
    fixtures.push(("two-track".into(), two_track, n.set, m));

    let mut passes = 0;
    for (label, ca, n_set, _m_set) in fixtures {
        // the census M is a post-surjectivity set; the window construction
        // asks for an injectivity set of the inverse, so derive that
        // directly from the synthesized inverse
        let inverse = synthesize_inverse(&ca, &n_set, &budgets()).unwrap();
        let m_inv = surjunct::analysis::find_inverse_injectivity_set(&ca, &inverse, &budgets())
            .unwrap()
            .found()
            .unwrap_or_else(|| panic!("{label}: no inverse injectivity set"));

        // the construction hook itself enforces language equality with
        // the image automaton and errors otherwise
        let sft = image_sft(&ca, &n_set, &m_inv, &budgets())
            .unwrap_or_else(|e| panic!("{label}: image SFT failed: {e}"));
        // independent recheck of the equality at this level
        let aut = image_automaton(&ca).unwrap();
        assert!(
            sofic_equals_sft(&aut, &sft, budgets().enumeration).unwrap(),
            "{label}: image SFT not language-equivalent to the image automaton"
        );

        let sft2 = iterated_image_sft(&ca, &n_set, &m_inv, 2, &budgets())
            .unwrap_or_else(|e| panic!("{label}: iterated image SFT failed: {e}"));
        let composed = ca.power(2, budgets().enumeration).unwrap();
        let aut2 = image_automaton(&composed).unwrap();
        assert!(
            sofic_equals_sft(&aut2, &sft2, budgets().enumeration).unwrap(),
            "{label}: iterated image SFT does not match the composed rule's automaton"
        );
        passes += 1;
    }
    println!("[criterion 6] PASS - image SFTs language-equivalent to image automata (n=1 and n=2) for {passes} fixtures");
}

#[test]
fn criterion_07_confined_differences() {
    // for reversible T with post-surjectivity set M and x ~ y:
    // delta(x,y) is contained in delta(T(x),T(y)) * M
    let mut fixtures = reversible_z_rules();
    fixtures.extend(reversible_finite_rules().into_iter().take(40));
    // convolution fixture: a = g + h + gh over the Klein four-group
    let c2 = Group::cyclic(2).unwrap();
    let klein = Group::product(&c2, &c2).unwrap();
    let ring = GroupRing::new(klein, PrimeField::new(2).unwrap());
    let a = ring
        .element(&[(Element(1), 1), (Element(2), 1), (Element(3), 1)])
        .unwrap();
    let t_a = ring.convolution_automaton(&a).unwrap();
    let m_a = surjunct::analysis::find_postsurjectivity_set(&t_a, &budgets())
        .unwrap()
        .found()
        .unwrap();
    fixtures.push(("klein convolution".into(), t_a, m_a.set.clone(), m_a.set));

    let mut pair_count = 0;
    for (i, (label, ca, _, m_set)) in fixtures.iter().enumerate() {
        let g = ca.group();
        let mut rng = ChaCha8Rng::seed_from_u64(0xD1FF ^ i as u64);
        for _ in 0..200 {
            let x = seeded_configuration(&mut rng, g, ca.alphabet());
            let y = match (&x, g) {
                (Configuration::Periodic(p), Group::Integers) => {
                    let flips = (0..rng.gen_range(1..4))
                        .map(|_| (rng.gen_range(-6..6), rng.gen_range(0..ca.alphabet() as u8)))
                        .collect::<Vec<_>>();
                    Configuration::Periodic(p.overridden(&flips))
                }
                (Configuration::Total(v), Group::Finite(_)) => {
                    let mut w = v.clone();
                    let site = rng.gen_range(0..w.len());
                    w[site] = rng.gen_range(0..ca.alphabet() as u8);
                    Configuration::Total(w)
                }
                _ => unreachable!(),
            };
            let dxy = match delta(g, &x, &y) {
                Delta::Finite(s) => s,
                Delta::NotAlmostEqual => panic!("{label}: seeded pair not almost equal"),
            };
            let dio = match delta(g, &ca.apply(&x), &ca.apply(&y)) {
                Delta::Finite(s) => s,
                Delta::NotAlmostEqual => panic!("{label}: images not almost equal"),
            };
            let allowed = g.set_product(&dio, m_set);
            assert!(
                dxy.is_subset_of(&allowed),
                "{label}: delta(x,y) = {dxy:?} not within delta(Tx,Ty)*M = {allowed:?}"
            );
            pair_count += 1;
        }
    }
    println!(
        "[criterion 7] PASS - difference confinement held on {pair_count} seeded almost-equal pairs across {} fixtures",
        fixtures.len()
    );
}

#[test]
fn criterion_08_direct_finiteness() {
    let start = Instant::now();
    let c2 = Group::cyclic(2).unwrap();
    let fixtures: Vec<(&str, Group, u64)> = vec![
        ("F2[C2]", c2.clone(), 2),
        ("F2[C4]", Group::cyclic(4).unwrap(), 2),
        ("F2[C2xC2]", Group::product(&c2, &c2).unwrap(), 2),
        ("F3[C2]", c2.clone(), 3),
        ("F2[S3]", Group::symmetric(3).unwrap(), 2),
    ];
    let mut total_pairs = 0u64;
    let mut total_units = 0usize;
    for (label, group, p) in fixtures {
        let ring = GroupRing::new(group, PrimeField::new(p).unwrap());
        let report = direct_finiteness_scan(&ring, &budgets())
            .unwrap_or_else(|e| panic!("{label}: scan failed: {e}"));
        assert!(
            report.violations.is_empty(),
            "{label}: direct finiteness violated"
        );
        for (a, b) in &report.unit_pairs {
            verify_unit_claims(&ring, a, b, &budgets()).unwrap_or_else(|e| {
                panic!(
                    "{label}: unit claims failed for a={}, b={}: {e}",
                    a.term_string(),
                    b.term_string()
                )
            });
        }
        total_pairs += report.pairs_checked;
        total_units += report.unit_pairs.len();
    }
    let elapsed = start.elapsed();
    assert!(
        elapsed < Duration::from_secs(300),
        "scans took {elapsed:?}, limit 5 minutes"
    );
    println!(
        "[criterion 8] PASS - {total_pairs} pairs scanned with zero violations; unit claims verified on {total_units} unit pairs in {elapsed:?}"
    );
}

// ---- criterion 9: brute-force pseudonorm oracle ----------------------

/// Minimum cost over decompositions of `f` into distinct support pairs
/// with nonzero coefficients: enumerated directly.
fn norm_oracle(
    ring: &GroupRing,
    norm_values: &dyn Fn(Element) -> Weight,
    f: &RingElement,
) -> Option<Weight> {
    if f.is_zero() {
        return Some(Weight::zero());
    }
    let support: Vec<Element> = f.support().iter().copied().collect();
    let s = support.len();
    let p = ring.field().characteristic();
    let pairs: Vec<(usize, usize)> = (0..s)
        .flat_map(|i| (i + 1..s).map(move |j| (i, j)))
        .collect();
    let np = pairs.len();
    let target: Vec<u64> = support.iter().map(|&e| f.coefficient(e)).collect();
    let mut best: Option<Weight> = None;
    let combos = (p as u128).pow(np as u32);
    for combo in 0..combos {
        let mut c = combo;
        let mut sum = vec![0u64; s];
        let mut cost = Weight::zero();
        for (idx, &(i, j)) in pairs.iter().enumerate() {
            let q = (c % p as u128) as u64;
            c /= p as u128;
            if q == 0 {
                continue;
            }
            sum[i] = (sum[i] + q) % p;
            sum[j] = (sum[j] + p - q) % p;
            let d = ring.group().mul(ring.group().inv(support[i]), support[j]);
            cost += norm_values(d);
            let _ = idx;
        }
        if sum == target && best.is_none_or(|b| cost < b) {
            best = Some(cost);
        }
    }
    best
}

#[test]
fn criterion_09_pseudonorm_against_oracle() {
    for p in [2u64, 3] {
        let (group, norm) = hamming_norm(3).unwrap();
        let ring = GroupRing::new(group.clone(), PrimeField::new(p).unwrap());
        let order = group.order().unwrap();
        let mut checked = 0;
        // all ideal elements with support size <= 4
        let element_ids: Vec<i64> = (0..order as i64).collect();
        for size in 1..=4usize {
            for support in combinations(&element_ids, size) {
                let coeff_combos = (p - 1).pow(size as u32);
                for combo in 0..coeff_combos {
                    let mut c = combo;
                    let terms: Vec<(Element, u64)> = support
                        .iter()
                        .map(|&id| {
                            let q = 1 + c % (p - 1);
                            c /= p - 1;
                            (Element(id), q)
                        })
                        .collect();
                    let f = ring.element(&terms).unwrap();
                    if !ring.in_augmentation_ideal(&f) {
                        continue;
                    }
                    let fast = norm_s(&ring, &norm, &f).unwrap();
                    let slow = norm_oracle(&ring, &|e| norm.eval(e), &f)
                        .expect("ideal element decomposes over its support");
                    assert_eq!(fast, slow, "p={p}, f={}", f.term_string());
                    // definiteness for small supports
                    if f.length() <= 3 {
                        assert!(
                            fast > Weight::zero(),
                            "p={p}: nonzero element with zero norm"
                        );
                    }
                    checked += 1;
                }
            }
        }
        assert_eq!(
            norm_s(&ring, &norm, &RingElement::zero()).unwrap(),
            Weight::zero()
        );
        println!(
            "[criterion 9] PASS - shortest-path pseudonorm equals the decomposition oracle on {checked} ideal elements over F_{p}[S3]"
        );
    }
}

fn combinations(items: &[i64], size: usize) -> Vec<Vec<i64>> {
    if size == 0 {
        return vec![Vec::new()];
    }
    if items.len() < size {
        return Vec::new();
    }
    let mut out = Vec::new();
    for (i, &first) in items.iter().enumerate() {
        for mut rest in combinations(&items[i + 1..], size - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

#[test]
fn criterion_10_probe_reproducibility() {
    let config = ProbeConfig {
        n: 4,
        p: 2,
        length_bound: 3,
        samples: 500,
        seed: 7,
    };
    let format_csv = |run: &surjunct::groupring::norm::ProbeRun| -> String {
        let mut out = String::from("n,N,seed,index,a,b,norm_ab,norm_ba\n");
        for r in &run.records {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{}\n",
                config.n,
                config.length_bound,
                config.seed,
                r.index,
                r.a.term_string(),
                r.b.term_string(),
                r.norm_ab,
                r.norm_ba
            ));
        }
        out
    };
    let run1 = metric_probe(config).unwrap();
    let run2 = metric_probe(config).unwrap();
    let csv1 = format_csv(&run1);
    let csv2 = format_csv(&run2);
    assert_eq!(
        csv1.as_bytes(),
        csv2.as_bytes(),
        "probe CSV not reproducible"
    );
    assert_eq!(run1.records.len(), 500);

    let (group, _) = hamming_norm(4).unwrap();
    let ring = GroupRing::new(group, PrimeField::new(2).unwrap());
    let mut exact_units = 0;
    for r in &run1.records {
        let ab = ring.mul(&r.a, &r.b);
        assert_eq!(
            ring.augmentation(&ab),
            1,
            "record {} violates eps(ab)=1",
            r.index
        );
        if ring.is_one(&ab) {
            assert!(r.norm_ab.is_zero() && r.norm_ba.is_zero());
            exact_units += 1;
        }
    }
    println!(
        "[criterion 10] PASS - 500-record probe byte-identical across reruns; eps(ab)=1 everywhere; {exact_units} exact unit pairs all (0,0)"
    );
}
