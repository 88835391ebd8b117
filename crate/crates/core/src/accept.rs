//! The acceptance suite: every headline claim as a pass/fail criterion with
//! pinned expected values.
//!
//! Each criterion reports one line per sub-check carrying the expected value
//! next to the computed one; the artifact is a verification instrument, so
//! the reports are the product. The same runners back the `acceptance`
//! integration test target and the `endomon verify all` command.

use rayon::prelude::*;
use serde::Serialize;

use crate::census::{self, EnumerationMode, DEFAULT_BUDGET};
use crate::jk::{self, Element, GroupParams};
use crate::orbit::{self, OrbitMethod};
use crate::rng::SplitMix64;
use crate::structure;
use crate::tsdp::{self, CheckConfig};

pub const CRITERIA_COUNT: u32 = 12;

#[derive(Debug, Clone, Serialize)]
pub struct CriterionOutcome {
    pub id: u32,
    pub name: &'static str,
    pub pass: bool,
    /// True when a prime filter left nothing to run.
    pub skipped: bool,
    pub details: Vec<String>,
}

impl CriterionOutcome {
    pub fn summary_line(&self) -> String {
        let verdict = if self.skipped {
            "SKIP"
        } else if self.pass {
            "PASS"
        } else {
            "FAIL"
        };
        format!("criterion {:>2} {}  {}", self.id, verdict, self.name)
    }
}

struct Checker {
    lines: Vec<String>,
    ok: bool,
    ran: bool,
}

impl Checker {
    fn new() -> Self {
        Self { lines: Vec::new(), ok: true, ran: false }
    }

    fn eq<T: PartialEq + std::fmt::Debug>(&mut self, label: &str, expected: T, computed: T) {
        self.ran = true;
        let good = expected == computed;
        self.ok &= good;
        let mark = if good { "ok" } else { "FAIL" };
        self.lines.push(format!("{label}: expected {expected:?}, computed {computed:?} [{mark}]"));
    }

    fn holds(&mut self, label: &str, cond: bool) {
        self.eq(label, true, cond);
    }

    fn note(&mut self, line: String) {
        self.lines.push(line);
    }

    fn outcome(self, id: u32, name: &'static str) -> CriterionOutcome {
        CriterionOutcome {
            id,
            name,
            pass: self.ok,
            skipped: !self.ran,
            details: self.lines,
        }
    }
}

fn wants(p_filter: Option<u8>, p: u8) -> bool {
    p_filter.is_none_or(|want| want == p)
}

fn families(p_filter: Option<u8>, p: u8) -> Vec<GroupParams> {
    if wants(p_filter, p) {
        GroupParams::families(p).expect("supported prime")
    } else {
        Vec::new()
    }
}

/// Criterion 1: group order and associativity, exhaustive at p = 2 and on
/// seeded random triples at p = 3.
fn criterion_1(seed: u64, p_filter: Option<u8>) -> CriterionOutcome {
    let mut c = Checker::new();
    for params in families(p_filter, 2) {
        let label = format!("(2,{:?})", params.lambda());
        let generated = jk::Subgroup::generated_by(params, &Element::generators(params));
        c.eq(&format!("{label} |<a1,a2,b1,b2>|"), 256u64, generated.order() as u64);
        // All 256^3 triples.
        let violations: u64 = (0..params.order())
            .into_par_iter()
            .map(|xi| {
                let x = Element::from_index(params, xi);
                let mut bad = 0u64;
                for yi in 0..params.order() {
                    let y = Element::from_index(params, yi);
                    let xy = x.multiply(y);
                    for zi in 0..params.order() {
                        let z = Element::from_index(params, zi);
                        if xy.multiply(z) != x.multiply(y.multiply(z)) {
                            bad += 1;
                        }
                    }
                }
                bad
            })
            .sum();
        c.eq(&format!("{label} associativity violations over 256^3 triples"), 0u64, violations);
    }
    for params in families(p_filter, 3) {
        let label = format!("(3,{:?})", params.lambda());
        let generated = jk::Subgroup::generated_by(params, &Element::generators(params));
        c.eq(&format!("{label} |<a1,a2,b1,b2>|"), 6561u64, generated.order() as u64);
        let base = SplitMix64::new(seed ^ params.lambda().0 as u64);
        let violations: u64 = (0..1_000_000u64)
            .into_par_iter()
            .map(|k| {
                let mut rng = base.fork(k);
                let x = Element::from_index(params, rng.below(params.order()));
                let y = Element::from_index(params, rng.below(params.order()));
                let z = Element::from_index(params, rng.below(params.order()));
                u64::from(x.multiply(y).multiply(z) != x.multiply(y.multiply(z)))
            })
            .sum();
        c.eq(&format!("{label} associativity violations over 10^6 random triples"), 0u64, violations);
    }
    c.outcome(1, "group order p^8 and associativity")
}

/// Criterion 2: the closed power formula equals iterated multiplication for
/// every element and every exponent up to p^2, exhaustively at p = 2 and 3.
fn criterion_2(_seed: u64, p_filter: Option<u8>) -> CriterionOutcome {
    let mut c = Checker::new();
    for p in [2u8, 3] {
        for params in families(p_filter, p) {
            let top = (p as u64).pow(2);
            let mismatches: u64 = (0..params.order())
                .into_par_iter()
                .map(|ix| {
                    let e = Element::from_index(params, ix);
                    (0..=top).filter(|&n| e.power_formula(n) != e.power(n)).count() as u64
                })
                .sum();
            c.eq(
                &format!("({p},{:?}) power-formula mismatches for n in 0..={top}", params.lambda()),
                0u64,
                mismatches,
            );
        }
    }
    c.outcome(2, "closed power formula equals iterated powers")
}

/// Criterion 3: at p = 3, in every family with nonzero second parameter all
/// 6480 non-central elements have order exactly 9.
fn criterion_3(_seed: u64, p_filter: Option<u8>) -> CriterionOutcome {
    let mut c = Checker::new();
    if wants(p_filter, 3) {
        for lambda in [(0u8, 1u8), (1, 1), (2, 1)] {
            let params = GroupParams::new(3, lambda).expect("admissible");
            let (non_central, order9): (u64, u64) = jk::all_elements(params)
                .filter(|e| !e.is_central())
                .fold((0, 0), |(n, o), e| (n + 1, o + u64::from(e.element_order() == 9)));
            c.eq(&format!("(3,{lambda:?}) non-central elements"), 6480u64, non_central);
            c.eq(&format!("(3,{lambda:?}) of order exactly 9"), 6480u64, order9);
        }
    }
    c.outcome(3, "non-central elements have order p^2 (p = 3, lambda_2 != 0)")
}

/// Criterion 4: end-commutative families have exactly the two trivial
/// normalization classes, |End| = 2 p^16, and no commutation failures on all
/// representative pairs plus 10^6 seeded random pairs each.
fn criterion_4(seed: u64, p_filter: Option<u8>) -> CriterionOutcome {
    let mut c = Checker::new();
    let mut targets = Vec::new();
    if wants(p_filter, 2) {
        targets.push(GroupParams::new(2, (0, 1)).expect("admissible"));
    }
    if wants(p_filter, 3) {
        for lambda in [(0u8, 1u8), (1, 1), (2, 1)] {
            targets.push(GroupParams::new(3, lambda).expect("admissible"));
        }
    }
    for params in targets {
        let p = params.p();
        let label = format!("({p},{:?})", params.lambda());
        let report = census::verify_theorem1(params, seed, 1_000_000);
        c.eq(&format!("{label} normalized count"), 2, report.normalized_count);
        c.holds(&format!("{label} only trivial classes"), report.only_trivial_classes);
        c.eq(
            &format!("{label} |End(G)|"),
            2 * (p as u128).pow(16),
            report.endomorphism_count,
        );
        c.eq(
            &format!("{label} commutation failures ({} rep pairs + 10^6 random)",
                report.representative_pairs_checked),
            0,
            report.commutation_failures,
        );
        if p == 3 {
            // The full candidate sweep (about 4.3e7 maps) against the pruned
            // one, with its runtime on record.
            let t0 = std::time::Instant::now();
            let full = census::enumerate_normalized(params, EnumerationMode::Full, DEFAULT_BUDGET)
                .expect("within budget");
            let elapsed = t0.elapsed();
            let pruned = census::classes(params);
            c.holds(&format!("{label} pruned enumeration equals full sweep"), pruned == full);
            c.holds(
                &format!("{label} full sweep under 10 minutes (took {elapsed:?})"),
                elapsed.as_secs() < 600,
            );
        }
    }
    c.outcome(4, "end-commutative censuses and commutation (zero failures)")
}

/// Criterion 5: the non-end-commutative families admit a non-commuting pair,
/// and the explicit constant-map witness disagrees with the star map at a1
/// by a nontrivial central factor.
fn criterion_5(_seed: u64, p_filter: Option<u8>) -> CriterionOutcome {
    let mut c = Checker::new();
    let mut targets = Vec::new();
    if wants(p_filter, 2) {
        targets.push(GroupParams::new(2, (1, 0)).expect("admissible"));
        targets.push(GroupParams::new(2, (1, 1)).expect("admissible"));
    }
    if wants(p_filter, 3) {
        targets.push(GroupParams::new(3, (1, 0)).expect("admissible"));
    }
    for params in targets {
        let label = format!("({},{:?})", params.p(), params.lambda());
        let classes = census::classes(params);
        let pair = census::find_noncommuting_pair(params, &classes);
        c.holds(&format!("{label} non-commuting pair found"), pair.is_some());
        if let Some((x, y)) = pair {
            c.holds(&format!("{label} pair verifies"), x.compose(&y) != y.compose(&x));
        }
        let witness = census::corrected_witness(params).expect("witness family");
        c.holds(&format!("{label} witness factor is central"), witness.factor_is_central);
        c.holds(&format!("{label} witness factor nontrivial"), witness.factor_is_nontrivial);
        c.note(format!(
            "{label} witness: (phi.f*)(a1) = {}, (f*.phi)(a1) = {}, factor {}",
            witness.phi_then_star_at_a1, witness.star_then_phi_at_a1, witness.disagreement_factor
        ));
    }
    c.outcome(5, "non-commuting witnesses in the exceptional families")
}

/// Criterion 6: for lambda = (1,0) the normalized census is the identity
/// plus the p^4 maps into the cyclic representatives (17 at p = 2, 82 at
/// p = 3).
fn criterion_6(_seed: u64, p_filter: Option<u8>) -> CriterionOutcome {
    let mut c = Checker::new();
    for p in [2u8, 3] {
        if !wants(p_filter, p) {
            continue;
        }
        let params = GroupParams::new(p, (1, 0)).expect("admissible");
        let report = census::verify_exceptional_theorem(params).expect("family matches");
        c.eq(
            &format!("({p},(1,0)) normalized count"),
            (p as u64).pow(4) + 1,
            report.normalized_count,
        );
        c.holds(
            &format!("({p},(1,0)) non-identity classes map into <a1 a2^-1>"),
            report.non_identity_maps_into_cyclic,
        );
    }
    c.outcome(6, "lambda = (1,0) census is p^4 + 1 maps into the cyclic subgroup")
}

/// Criterion 7: the (2,(1,1)) tables: 23 classes, the six extra maps
/// validate, all 36 composition cells match, the shift matrices have the
/// stated column structure, the class quotient is the symmetric group on
/// three letters with phi_4 neutral, and the no-section equation has no
/// solution for any phi_i.
fn criterion_7(_seed: u64, p_filter: Option<u8>) -> CriterionOutcome {
    let mut c = Checker::new();
    if wants(p_filter, 2) {
        let params = GroupParams::new(2, (1, 1)).expect("admissible");
        c.eq("(2,(1,1)) normalization classes", 23, census::classes(params).len());
        match census::build_exceptional_table() {
            Ok(table) => {
                c.holds("all 36 composition cells match the fixed table", true);
                let m1 = crate::fp::FpMat4::parse_digits(2, &table.m1).expect("digits");
                let m2 = crate::fp::FpMat4::parse_digits(2, &table.m2).expect("digits");
                let m3 = crate::fp::FpMat4::parse_digits(2, &table.m3).expect("digits");
                c.eq("M3 = M1 + M2", m1.add(m2), m3);
                let v = crate::fp::FpVec4::new(2, [1, 1, 0, 1]).expect("mod 2");
                let cols_ok = [m1, m2, m3].iter().all(|m| {
                    (0..4).all(|j| m.col(j).is_zero() || m.col(j) == v)
                });
                c.holds("every M-column is zero or (1,1,0,1)^t", cols_ok);
                c.eq("phi_4 acts as the neutral class", [0, 1, 2], table.quotient_permutations[3]);
                let mut perms = table.quotient_permutations.to_vec();
                perms.sort_unstable();
                perms.dedup();
                c.eq("distinct class permutations (full symmetric group)", 6, perms.len());
            }
            Err(err) => c.holds(&format!("composition table verifies ({err})"), false),
        }
        let report = census::verify_no_section();
        c.eq("no-section solutions per phi_i over 2^16 candidates", [0u64; 6], report.solutions_per_phi);
    }
    c.outcome(7, "the (2,(1,1)) exceptional tables and no-section check")
}

/// Criterion 8: the monoid isomorphisms. For lambda = (1,0) the map onto
/// Mat4 |x| S_p^1, exhaustive over shifted representatives at p = 2 plus
/// seeded pairs; for the end-commutative families the map onto
/// Mat4 |x| {0,1}.
fn criterion_8(seed: u64, p_filter: Option<u8>) -> CriterionOutcome {
    let mut c = Checker::new();
    if wants(p_filter, 2) {
        let report = tsdp::verify_alpha(2, seed, 1_000_000).expect("model builds");
        c.eq("(2,(1,0)) exhaustive pairs (17 classes x 17 shifts)^2", (17u64 * 17).pow(2), report.exhaustive_pairs);
        c.eq("(2,(1,0)) isomorphism failures", 0, report.failures);
        c.eq("(2,(1,0)) round-trip failures", 0, report.round_trip_failures);
        let comm = tsdp::verify_commutative_iso(GroupParams::new(2, (0, 1)).expect("admissible"), seed, 1_000_000)
            .expect("model builds");
        c.eq("(2,(0,1)) commutative-model failures", 0, comm.failures);
    }
    if wants(p_filter, 3) {
        let report = tsdp::verify_alpha(3, seed, 100_000).expect("model builds");
        c.eq("(3,(1,0)) isomorphism failures", 0, report.failures);
        c.eq("(3,(1,0)) round-trip failures", 0, report.round_trip_failures);
        let comm = tsdp::verify_commutative_iso(GroupParams::new(3, (0, 1)).expect("admissible"), seed, 100_000)
            .expect("model builds");
        c.eq("(3,(0,1)) commutative-model failures", 0, comm.failures);
    }
    c.outcome(8, "monoid isomorphisms onto the semidirect-product models")
}

/// Criterion 9: orbit censuses of the conjugation action, with the pinned
/// histograms from the rank formula and the explicit-closure confirmation on
/// seeded random endomorphisms.
fn criterion_9(seed: u64, p_filter: Option<u8>) -> CriterionOutcome {
    let mut c = Checker::new();
    if wants(p_filter, 2) {
        let census10 = orbit::orbit_census(GroupParams::new(2, (1, 0)).expect("admissible"), OrbitMethod::RankFormula)
            .expect("mass check");
        c.eq(
            "(2,(1,0)) rank-formula histogram",
            vec![(1u64, 131072u64), (16, 61440)],
            census10.histogram.iter().map(|(&l, &n)| (l, n)).collect::<Vec<_>>(),
        );
        c.eq("(2,(1,0)) total orbits = 3*2^16 - 2^12", 192512u64, census10.total_orbits);
        let census11 = orbit::orbit_census(GroupParams::new(2, (1, 1)).expect("admissible"), OrbitMethod::RankFormula)
            .expect("mass check");
        c.eq(
            "(2,(1,1)) rank-formula histogram",
            vec![(1u64, 131072u64), (16, 61440), (256, 1536)],
            census11.histogram.iter().map(|(&l, &n)| (l, n)).collect::<Vec<_>>(),
        );
        c.eq("(2,(1,1)) rank-formula total orbits", 194048u64, census11.total_orbits);
        for lambda in GroupParams::admissible_lambdas(2) {
            let params = GroupParams::new(2, lambda).expect("admissible");
            let spot = orbit::spot_check(params, seed, 100);
            c.eq(
                &format!("(2,{lambda:?}) closure confirms rank formula on 100 random endos"),
                0,
                spot.mismatches.len(),
            );
            if !spot.mismatches.is_empty() {
                let mut lengths: Vec<(u64, u64)> = spot
                    .mismatches
                    .iter()
                    .map(|m| (m.rank_formula_length, m.closure_length))
                    .collect();
                lengths.sort_unstable();
                lengths.dedup();
                c.note(format!(
                    "(2,{lambda:?}) mismatching (formula, closure) lengths: {lengths:?}"
                ));
                let closure = orbit::orbit_census(params, OrbitMethod::ExplicitClosure)
                    .expect("mass check");
                c.note(format!(
                    "(2,{lambda:?}) explicit-closure census: {:?}, total {}",
                    closure.histogram, closure.total_orbits
                ));
            }
        }
    }
    if wants(p_filter, 3) {
        let params = GroupParams::new(3, (1, 0)).expect("admissible");
        let census = orbit::orbit_census(params, OrbitMethod::RankFormula).expect("mass check");
        let p16 = 3u64.pow(16);
        let p12 = 3u64.pow(12);
        c.eq(
            "(3,(1,0)) rank-formula histogram",
            vec![(1u64, 2 * p16), (81, 80 * p12)],
            census.histogram.iter().map(|(&l, &n)| (l, n)).collect::<Vec<_>>(),
        );
        c.eq("(3,(1,0)) total orbits = 3*3^16 - 3^12", 128608722u64, census.total_orbits);
        c.eq("identity 2*3^16 + (3^4-1)*3^12 = 3*3^16 - 3^12", 3 * p16 - p12, 2 * p16 + 80 * p12);
        for lambda in GroupParams::admissible_lambdas(3) {
            let spot = orbit::spot_check(GroupParams::new(3, lambda).expect("admissible"), seed, 20);
            c.eq(
                &format!("(3,{lambda:?}) closure confirms rank formula on 20 random endos"),
                0,
                spot.mismatches.len(),
            );
        }
    }
    c.outcome(9, "conjugation-orbit censuses")
}

/// Criterion 10: two-sided semidirect product axioms for both models:
/// identity, associativity (exhaustive where the triple space is small,
/// seeded otherwise) and action compatibility, with zero failures.
fn criterion_10(seed: u64, p_filter: Option<u8>) -> CriterionOutcome {
    let mut c = Checker::new();
    let cfg = CheckConfig { seed, samples: 1_000_000 };
    for p in [2u8, 3, 5] {
        if !wants(p_filter, p) {
            continue;
        }
        match tsdp::sp1_monoid(p, cfg) {
            Ok(m) => c.eq(&format!("S_{p}^1 monoid axioms hold; size"), (p as u128).pow(4) + 1, m.size()),
            Err(err) => c.holds(&format!("S_{p}^1 monoid axioms ({err})"), false),
        }
        if p == 5 {
            // The exceptional model exists at p = 5 as well; audited by
            // sampling only.
            match tsdp::exceptional_model(5, cfg) {
                Ok(inst) => c.eq("Mat4(F_5) |x| S_5^1 size", 626 * 5u128.pow(16), inst.size()),
                Err(err) => c.holds(&format!("Mat4(F_5) |x| S_5^1 axioms ({err})"), false),
            }
            continue;
        }
        match tsdp::commutative_model(p, cfg) {
            Ok(inst) => {
                c.eq(&format!("Mat4(F_{p}) |x| {{0,1}} size"), 2 * (p as u128).pow(16), inst.size());
                c.holds(
                    &format!("Mat4(F_{p}) |x| {{0,1}} product monoid axioms"),
                    inst.verify_product_monoid(seed, 100, 1_000_000).is_ok(),
                );
            }
            Err(err) => c.holds(&format!("Mat4(F_{p}) |x| {{0,1}} axioms ({err})"), false),
        }
        match tsdp::exceptional_model(p, cfg) {
            Ok(inst) => {
                c.eq(
                    &format!("Mat4(F_{p}) |x| S_{p}^1 size"),
                    ((p as u128).pow(4) + 1) * (p as u128).pow(16),
                    inst.size(),
                );
                c.holds(
                    &format!("Mat4(F_{p}) |x| S_{p}^1 product monoid axioms"),
                    inst.verify_product_monoid(seed, 100, 1_000_000).is_ok(),
                );
            }
            Err(err) => c.holds(&format!("Mat4(F_{p}) |x| S_{p}^1 axioms ({err})"), false),
        }
    }
    c.outcome(10, "two-sided semidirect product axioms")
}

/// Criterion 11: the nil/per split invariants on seeded random
/// endomorphisms: 10^3 per family at p = 2, 10^2 at p = 3.
fn criterion_11(seed: u64, p_filter: Option<u8>) -> CriterionOutcome {
    let mut c = Checker::new();
    for params in families(p_filter, 2) {
        let report = structure::nil_per_batch(params, seed, 1000);
        c.eq(&format!("(2,{:?}) split failures over 1000 endos", params.lambda()), 0, report.failures);
    }
    for params in families(p_filter, 3) {
        let report = structure::nil_per_batch(params, seed, 100);
        c.eq(&format!("(3,{:?}) split failures over 100 endos", params.lambda()), 0, report.failures);
    }
    c.outcome(11, "G = nil x| per for random endomorphisms")
}

/// Criterion 12: the omega-subgroup dichotomy with pinned orders.
fn criterion_12(_seed: u64, p_filter: Option<u8>) -> CriterionOutcome {
    let mut c = Checker::new();
    let expectations: [(u8, (u8, u8), u64, bool); 7] = [
        (2, (0, 1), 16, true),
        (2, (1, 0), 32, false),
        (2, (1, 1), 32, false),
        (3, (0, 1), 81, true),
        (3, (1, 1), 81, true),
        (3, (2, 1), 81, true),
        (3, (1, 0), 243, false),
    ];
    for (p, lambda, omega_order, in_center) in expectations {
        if !wants(p_filter, p) {
            continue;
        }
        let params = GroupParams::new(p, lambda).expect("admissible");
        let report = structure::omega1_report(params);
        c.eq(&format!("({p},{lambda:?}) |Omega_1|"), omega_order, report.omega1_order);
        c.eq(&format!("({p},{lambda:?}) Omega_1 <= center"), in_center, report.omega1_in_center);
    }
    c.outcome(12, "Omega_1 dichotomy across the families")
}

pub fn run_criterion(id: u32, seed: u64, p_filter: Option<u8>) -> CriterionOutcome {
    match id {
        1 => criterion_1(seed, p_filter),
        2 => criterion_2(seed, p_filter),
        3 => criterion_3(seed, p_filter),
        4 => criterion_4(seed, p_filter),
        5 => criterion_5(seed, p_filter),
        6 => criterion_6(seed, p_filter),
        7 => criterion_7(seed, p_filter),
        8 => criterion_8(seed, p_filter),
        9 => criterion_9(seed, p_filter),
        10 => criterion_10(seed, p_filter),
        11 => criterion_11(seed, p_filter),
        12 => criterion_12(seed, p_filter),
        _ => panic!("criterion ids run from 1 to {CRITERIA_COUNT}"),
    }
}

pub fn run_all(seed: u64, p_filter: Option<u8>) -> Vec<CriterionOutcome> {
    (1..=CRITERIA_COUNT).map(|id| run_criterion(id, seed, p_filter)).collect()
}
