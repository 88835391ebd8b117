//! Enumeration of normalized endomorphisms and the censuses built on it.
//!
//! Endomorphisms split into normalization classes: two endomorphisms are
//! equivalent when they differ by a center-valued endomorphism, and each
//! class has exactly one representative whose generator images carry zero
//! central part. Enumerating those representatives is a search over p^16
//! candidate generator maps; the search is pruned by checking the defining
//! relations as early as the chosen images allow and by bucketing candidate
//! images of b2 by their p-th power, which the relations determine.
//!
//! The pruner assumes nothing beyond the relations themselves. The
//! "one generator central forces all central" shortcut is *verified* per
//! parameter set (it genuinely fails for lambda = (1,0) and for (2,(1,1)))
//! and reported, but never used to skip candidates.

use std::collections::HashMap;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::endo::{CentralHom, Endo, GenImages, NormalizedEndo};
use crate::fp::{self, FpMat4};
use crate::jk::{self, Element, GroupParams};
use crate::report::SCHEMA_VERSION;
use crate::rng::SplitMix64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CensusError {
    #[error("enumeration budget exhausted: {visited} candidate visits exceed {budget}")]
    BudgetExceeded { visited: u64, budget: u64 },
    #[error("composition table mismatch at row {row}, column {col}: computed {found}")]
    TableMismatch { row: usize, col: usize, found: String },
    #[error("quotient of the exceptional classes is not the expected group: {0}")]
    QuotientMismatch(&'static str),
    #[error("this check is specific to a different parameter family")]
    WrongFamily,
}

/// How to walk the candidate space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EnumerationMode {
    /// Relation-ordered pruning with p-th-power buckets. Sound for every
    /// parameter set; the only mode that scales to p = 5.
    Pruned,
    /// Plain quadruple loop over all p^16 candidate maps. Kept as the
    /// oracle that certifies the pruning.
    Full,
}

/// Candidate-visit budget guarding the enumeration.
pub const DEFAULT_BUDGET: u64 = 2_000_000_000;

/// Per-generator relation tables over the p^4 coset representatives.
struct RepTables {
    params: GroupParams,
    reps: Vec<Element>,
    n: usize,
    /// comm[i * n + j] = coordinates of [rep_i, rep_j].
    comm: Vec<[u8; 4]>,
    /// pw[i] = coordinates of rep_i^p (always central).
    pw: Vec<[u8; 4]>,
    /// Representative indices grouped by their p-th power.
    bucket: HashMap<[u8; 4], Vec<usize>>,
}

impl RepTables {
    fn build(params: GroupParams) -> Self {
        let reps = jk::coset_reps(params);
        let n = reps.len();
        let p = params.p() as u64;
        let mut comm = vec![[0u8; 4]; n * n];
        for i in 0..n {
            for j in 0..n {
                let c = reps[i].commutator(reps[j]);
                debug_assert!(c.is_central());
                comm[i * n + j] = c.central_part();
            }
        }
        let mut pw = vec![[0u8; 4]; n];
        let mut bucket: HashMap<[u8; 4], Vec<usize>> = HashMap::new();
        for i in 0..n {
            let e = reps[i].power(p);
            debug_assert!(e.is_central());
            pw[i] = e.central_part();
            bucket.entry(pw[i]).or_default().push(i);
        }
        Self { params, reps, n, comm, pw, bucket }
    }

    #[inline]
    fn comm(&self, i: usize, j: usize) -> [u8; 4] {
        self.comm[i * self.n + j]
    }

    #[inline]
    fn relations_hold(&self, g1: usize, g2: usize, g3: usize, g4: usize) -> bool {
        let p = self.params.p();
        let (lam1, lam2) = self.params.lambda();
        self.comm(g1, g2) == [0; 4]
            && self.comm(g3, g4) == [0; 4]
            && self.pw[g1] == self.comm(g1, g3)
            && self.pw[g2]
                == vec_add(
                    scale(self.comm(g1, g3), lam1, p),
                    scale(self.comm(g1, g4), lam2, p),
                    p,
                )
            && self.pw[g3] == vec_add(self.comm(g2, g3), self.comm(g2, g4), p)
            && self.pw[g4] == self.comm(g2, g4)
    }
}

#[inline]
fn vec_add(a: [u8; 4], b: [u8; 4], p: u8) -> [u8; 4] {
    std::array::from_fn(|i| fp::add_mod(a[i], b[i], p))
}

#[inline]
fn vec_sub(a: [u8; 4], b: [u8; 4], p: u8) -> [u8; 4] {
    std::array::from_fn(|i| fp::sub_mod(a[i], b[i], p))
}

#[inline]
fn scale(a: [u8; 4], c: u8, p: u8) -> [u8; 4] {
    std::array::from_fn(|i| fp::mul_mod(a[i], c, p))
}

/// Enumerate every normalized endomorphism, in lexicographic order of the
/// image tuples. Deterministic regardless of parallelism.
pub fn enumerate_normalized(
    params: GroupParams,
    mode: EnumerationMode,
    budget: u64,
) -> Result<Vec<NormalizedEndo>, CensusError> {
    let tables = RepTables::build(params);
    let n = tables.n as u64;
    if mode == EnumerationMode::Full {
        let work = n.checked_pow(4).unwrap_or(u64::MAX);
        if work > budget {
            return Err(CensusError::BudgetExceeded { visited: work, budget });
        }
    }

    let per_g1: Vec<(Vec<[usize; 4]>, u64)> = (0..tables.n)
        .into_par_iter()
        .map(|g1| enumerate_for_g1(&tables, mode, g1))
        .collect();

    let mut visited = 0u64;
    let mut hits: Vec<[usize; 4]> = Vec::new();
    for (found, v) in per_g1 {
        visited += v;
        hits.extend(found);
    }
    if visited > budget {
        return Err(CensusError::BudgetExceeded { visited, budget });
    }
    hits.sort_unstable();
    Ok(hits
        .into_iter()
        .map(|[g1, g2, g3, g4]| {
            let images = [tables.reps[g1], tables.reps[g2], tables.reps[g3], tables.reps[g4]];
            let endo = Endo::new(GenImages::new(images).expect("same params"))
                .expect("search only keeps maps satisfying the relations");
            NormalizedEndo::new(endo).expect("representatives have zero central part")
        })
        .collect())
}

fn enumerate_for_g1(
    tables: &RepTables,
    mode: EnumerationMode,
    g1: usize,
) -> (Vec<[usize; 4]>, u64) {
    let mut found = Vec::new();
    let mut visited = 0u64;
    match mode {
        EnumerationMode::Full => {
            for g2 in 0..tables.n {
                for g3 in 0..tables.n {
                    for g4 in 0..tables.n {
                        visited += 1;
                        if tables.relations_hold(g1, g2, g3, g4) {
                            found.push([g1, g2, g3, g4]);
                        }
                    }
                }
            }
        }
        EnumerationMode::Pruned => {
            let p = tables.params.p();
            let (lam1, lam2) = tables.params.lambda();
            for g3 in 0..tables.n {
                visited += 1;
                if tables.pw[g1] != tables.comm(g1, g3) {
                    continue; // g1^p = [g1,g3]
                }
                let c13_l1 = scale(tables.comm(g1, g3), lam1, p);
                for g2 in 0..tables.n {
                    visited += 1;
                    if tables.comm(g1, g2) != [0; 4] {
                        continue; // [g1,g2] = 1
                    }
                    // g3^p = [g2,g3][g2,g4] and g4^p = [g2,g4] pin down the
                    // p-th power of any viable g4:
                    let t = vec_sub(tables.pw[g3], tables.comm(g2, g3), p);
                    let Some(candidates) = tables.bucket.get(&t) else {
                        continue;
                    };
                    for &g4 in candidates {
                        visited += 1;
                        if tables.comm(g2, g4) != t || tables.comm(g3, g4) != [0; 4] {
                            continue;
                        }
                        let rhs = vec_add(c13_l1, scale(tables.comm(g1, g4), lam2, p), p);
                        if tables.pw[g2] == rhs {
                            debug_assert!(tables.relations_hold(g1, g2, g3, g4));
                            found.push([g1, g2, g3, g4]);
                        }
                    }
                }
            }
        }
    }
    (found, visited)
}

/// Normalization-class representatives with the default pruned settings.
pub fn classes(params: GroupParams) -> Vec<NormalizedEndo> {
    enumerate_normalized(params, EnumerationMode::Pruned, DEFAULT_BUDGET)
        .expect("pruned enumeration fits the default budget at desk scale")
}

/// Kind of a normalization class, read off its representative.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ClassKind {
    /// The class of the identity, i.e. the automorphisms.
    Identity,
    /// The class of the maps into the center (normalized representative is
    /// the zero map).
    CentralImage,
    /// Anything else: a non-automorphism whose image is not central.
    Exceptional,
}

pub fn class_kind(norm: &NormalizedEndo) -> ClassKind {
    if norm.is_identity_map() {
        ClassKind::Identity
    } else if norm.is_zero_map() {
        ClassKind::CentralImage
    } else {
        ClassKind::Exceptional
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassKindCounts {
    pub identity: u64,
    pub central_image: u64,
    pub exceptional: u64,
}

/// Census of the normalization classes of one group.
#[derive(Debug, Clone, Serialize)]
pub struct CensusReport {
    pub schema_version: u32,
    pub p: u8,
    pub lambda: (u8, u8),
    pub mode: EnumerationMode,
    pub normalized_count: u64,
    pub class_kinds: ClassKindCounts,
    /// |End(G)| = (number of classes) * p^16.
    pub endomorphism_count: u128,
    /// Whether "one generator into the center forces all into it" holds;
    /// verified by enumerating the mixed candidate maps, skipped at p = 5.
    pub generator_into_center_shortcut: Option<bool>,
    /// A non-commuting pair, if one exists (canonical text forms).
    pub witnesses: Option<[String; 2]>,
    #[serde(skip)]
    pub elapsed: Duration,
}

pub fn census(
    params: GroupParams,
    mode: EnumerationMode,
    budget: u64,
) -> Result<CensusReport, CensusError> {
    let start = Instant::now();
    let normalized = enumerate_normalized(params, mode, budget)?;
    let mut counts = ClassKindCounts { identity: 0, central_image: 0, exceptional: 0 };
    for norm in &normalized {
        match class_kind(norm) {
            ClassKind::Identity => counts.identity += 1,
            ClassKind::CentralImage => counts.central_image += 1,
            ClassKind::Exceptional => counts.exceptional += 1,
        }
    }
    let p16 = (params.p() as u128).pow(16);
    let shortcut = if params.p() <= 3 { Some(center_shortcut_holds(params)) } else { None };
    let witnesses =
        find_noncommuting_pair(params, &normalized).map(|(x, y)| [x.to_string(), y.to_string()]);
    Ok(CensusReport {
        schema_version: SCHEMA_VERSION,
        p: params.p(),
        lambda: params.lambda(),
        mode,
        normalized_count: normalized.len() as u64,
        class_kinds: counts,
        endomorphism_count: normalized.len() as u128 * p16,
        generator_into_center_shortcut: shortcut,
        witnesses,
        elapsed: start.elapsed(),
    })
}

/// Does mapping one generator into the center force the whole map into the
/// center? Verified by checking that no mixed candidate map (some images
/// trivial, some not) satisfies the relations. Representative index 0 is the
/// identity element, the only central coset representative.
pub fn center_shortcut_holds(params: GroupParams) -> bool {
    let tables = RepTables::build(params);
    let n = tables.n;
    !(0..n).into_par_iter().any(|g1| {
        for g2 in 0..n {
            for g3 in 0..n {
                for g4 in 0..n {
                    let zeros =
                        (g1 == 0) as u8 + (g2 == 0) as u8 + (g3 == 0) as u8 + (g4 == 0) as u8;
                    if zeros == 0 || zeros == 4 {
                        continue;
                    }
                    if tables.relations_hold(g1, g2, g3, g4) {
                        return true;
                    }
                }
            }
        }
        false
    })
}

/// Search for endomorphisms that do not commute: class representatives
/// against the elementary central automorphisms, then representatives
/// against each other. Returns the first pair in deterministic order.
pub fn find_noncommuting_pair(
    params: GroupParams,
    normalized: &[NormalizedEndo],
) -> Option<(Endo, Endo)> {
    let p = params.p();
    for norm in normalized {
        let phi = norm.as_endo();
        for i in 0..4 {
            for j in 0..4 {
                let sf = Endo::star(params, CentralHom::elementary(p, i, j));
                if phi.compose(&sf) != sf.compose(phi) {
                    return Some((*phi, sf));
                }
            }
        }
    }
    for a in normalized {
        for b in normalized {
            let (x, y) = (a.as_endo(), b.as_endo());
            if x.compose(y) != y.compose(x) {
                return Some((*x, *y));
            }
        }
    }
    None
}

/// End-commutativity census for one group: the class structure plus
/// commutation of every representative pair and of seeded random pairs of
/// full endomorphisms.
#[derive(Debug, Clone, Serialize)]
pub struct Theorem1Report {
    pub schema_version: u32,
    pub p: u8,
    pub lambda: (u8, u8),
    pub normalized_count: u64,
    /// Every class is the identity class or the central-image class.
    pub only_trivial_classes: bool,
    pub endomorphism_count: u128,
    pub expected_endomorphism_count: u128,
    pub representative_pairs_checked: u64,
    pub random_pairs_checked: u64,
    pub commutation_failures: u64,
    pub end_commutative: bool,
    #[serde(skip)]
    pub elapsed: Duration,
}

pub fn verify_theorem1(params: GroupParams, seed: u64, random_pairs: u64) -> Theorem1Report {
    let start = Instant::now();
    let normalized = classes(params);
    let only_trivial = normalized
        .iter()
        .all(|n| matches!(class_kind(n), ClassKind::Identity | ClassKind::CentralImage));
    let p16 = (params.p() as u128).pow(16);

    let mut failures = 0u64;
    let mut rep_pairs = 0u64;
    for a in &normalized {
        for b in &normalized {
            rep_pairs += 1;
            let (x, y) = (a.as_endo(), b.as_endo());
            if x.compose(y) != y.compose(x) {
                failures += 1;
            }
        }
    }

    let base = SplitMix64::new(seed);
    let random_failures: u64 = (0..random_pairs)
        .into_par_iter()
        .map(|k| {
            let mut rng = base.fork(k);
            let x = random_endo(params, &normalized, &mut rng);
            let y = random_endo(params, &normalized, &mut rng);
            u64::from(x.compose(&y) != y.compose(&x))
        })
        .sum();
    failures += random_failures;

    Theorem1Report {
        schema_version: SCHEMA_VERSION,
        p: params.p(),
        lambda: params.lambda(),
        normalized_count: normalized.len() as u64,
        only_trivial_classes: only_trivial,
        endomorphism_count: normalized.len() as u128 * p16,
        expected_endomorphism_count: 2 * p16,
        representative_pairs_checked: rep_pairs,
        random_pairs_checked: random_pairs,
        commutation_failures: failures,
        end_commutative: only_trivial && failures == 0,
        elapsed: start.elapsed(),
    }
}

/// A uniformly random endomorphism: a uniformly random normalization class
/// representative shifted by a uniformly random central homomorphism.
pub fn random_endo(
    params: GroupParams,
    normalized: &[NormalizedEndo],
    rng: &mut SplitMix64,
) -> Endo {
    let p = params.p();
    let rep = normalized[rng.below(normalized.len() as u64) as usize];
    let mut rows = [[0i64; 4]; 4];
    for row in rows.iter_mut() {
        for v in row.iter_mut() {
            *v = rng.below(p as u64) as i64;
        }
    }
    let hom = CentralHom::new(FpMat4::new(p, rows).expect("supported modulus"));
    rep.as_endo().add_hom(hom)
}

/// The explicit witness against end-commutativity: a constant generator map
/// phi together with `f: a1 -> [a1,b1]`; composing in the two orders
/// disagrees at a1 by a nontrivial central factor.
#[derive(Debug, Clone, Serialize)]
pub struct WitnessReport {
    pub schema_version: u32,
    pub p: u8,
    pub lambda: (u8, u8),
    pub phi: String,
    pub hom_digits: String,
    pub phi_then_star_at_a1: String,
    pub star_then_phi_at_a1: String,
    /// `(f* . phi)(a1) * ((phi . f*)(a1))^-1`.
    pub disagreement_factor: String,
    pub factor_is_central: bool,
    pub factor_is_nontrivial: bool,
}

pub fn corrected_witness(params: GroupParams) -> Option<WitnessReport> {
    let [a1, a2, _, b2] = Element::generators(params);
    let target = match (params.p(), params.lambda()) {
        (_, (1, 0)) => a1.multiply(a2.inverse()),
        (2, (1, 1)) => a1.multiply(a2).multiply(b2),
        _ => return None,
    };
    let phi = Endo::new(GenImages::new([target; 4]).ok()?).ok()?;
    let f = CentralHom::elementary(params.p(), 0, 0);
    let sf = Endo::star(params, f);
    let left = phi.compose(&sf).images()[0];
    let right = sf.compose(&phi).images()[0];
    let factor = right.multiply(left.inverse());
    Some(WitnessReport {
        schema_version: SCHEMA_VERSION,
        p: params.p(),
        lambda: params.lambda(),
        phi: phi.to_string(),
        hom_digits: f.digits(),
        phi_then_star_at_a1: left.to_string(),
        star_then_phi_at_a1: right.to_string(),
        disagreement_factor: factor.to_string(),
        factor_is_central: factor.is_central(),
        factor_is_nontrivial: !factor.is_identity(),
    })
}

/// Census of the lambda = (1,0) groups: besides the identity, the normalized
/// endomorphisms are exactly the p^4 maps sending every generator to a
/// canonical representative of `<a1 a2^-1>` modulo the center, i.e. to an
/// element a1^x a2^(-x).
#[derive(Debug, Clone, Serialize)]
pub struct ExceptionalTheoremReport {
    pub schema_version: u32,
    pub p: u8,
    pub normalized_count: u64,
    pub expected_count: u64,
    pub non_identity_maps_into_cyclic: bool,
    pub holds: bool,
    #[serde(skip)]
    pub elapsed: Duration,
}

pub fn verify_exceptional_theorem(
    params: GroupParams,
) -> Result<ExceptionalTheoremReport, CensusError> {
    if params.lambda() != (1, 0) {
        return Err(CensusError::WrongFamily);
    }
    let start = Instant::now();
    let p = params.p();
    let normalized = classes(params);
    let expected = (p as u64).pow(4) + 1;
    let into_cyclic = normalized.iter().all(|n| {
        n.is_identity_map()
            || n.as_endo().images().iter().all(|img| {
                let [k1, k2, l1, l2] = img.gen_part();
                l1 == 0 && l2 == 0 && fp::add_mod(k1, k2, p) == 0
            })
    });
    Ok(ExceptionalTheoremReport {
        schema_version: SCHEMA_VERSION,
        p,
        normalized_count: normalized.len() as u64,
        expected_count: expected,
        non_identity_maps_into_cyclic: into_cyclic,
        holds: normalized.len() as u64 == expected && into_cyclic,
        elapsed: start.elapsed(),
    })
}

/// Which central shift appears in a cell of the composition table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Shift {
    Zero,
    M1,
    M2,
    M3,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompCell {
    /// 1-based index of the normalized part.
    pub phi: usize,
    pub shift: Shift,
}

/// The six extra normalization classes of G(2, (1,1)) and their composition
/// table. `comp[i][j]` holds `phi_(i+1) . phi_(j+1)` as a normalized index
/// plus a central shift. The shifts all lie in {0, M1, M2, M3}, where every
/// column of an M-matrix is either zero or (1,1,0,1)^t: M1 has exactly the
/// first two columns nonzero, M2 the first three, and M3 = M1 + M2.
#[derive(Debug, Clone, Serialize)]
pub struct ExceptionalTable {
    pub schema_version: u32,
    pub phis: Vec<String>,
    pub m1: String,
    pub m2: String,
    pub m3: String,
    pub comp: [[CompCell; 6]; 6],
    /// Permutations of the three non-identity image classes induced by the
    /// phis: the quotient of the six classes is the full symmetric group on
    /// those three classes, with phi_4 neutral.
    pub quotient_permutations: [[usize; 3]; 6],
    #[serde(skip)]
    pub phi_endos: [NormalizedEndo; 6],
    #[serde(skip)]
    pub shifts: [CentralHom; 3],
}

/// The fixed composition table (1-based phi indices).
const EXPECTED_COMP: [[(usize, Shift); 6]; 6] = [
    [(5, Shift::M1), (6, Shift::M2), (2, Shift::M3), (1, Shift::M3), (4, Shift::M2), (3, Shift::M1)],
    [(3, Shift::Zero), (4, Shift::M3), (1, Shift::Zero), (2, Shift::M3), (6, Shift::M1), (5, Shift::M1)],
    [(6, Shift::Zero), (5, Shift::M3), (4, Shift::Zero), (3, Shift::M3), (2, Shift::M1), (1, Shift::M1)],
    [(1, Shift::M1), (2, Shift::M2), (3, Shift::M3), (4, Shift::M3), (5, Shift::M2), (6, Shift::M1)],
    [(4, Shift::M1), (3, Shift::M2), (6, Shift::M3), (5, Shift::M3), (1, Shift::M2), (2, Shift::M1)],
    [(2, Shift::Zero), (1, Shift::M3), (5, Shift::Zero), (6, Shift::M3), (3, Shift::M1), (4, Shift::M1)],
];

/// Build the six exceptional endomorphisms, recompute all 36 compositions,
/// and verify them cell-for-cell against the fixed table, together with the
/// symmetric-group structure of the class quotient.
pub fn build_exceptional_table() -> Result<ExceptionalTable, CensusError> {
    let params = GroupParams::new(2, (1, 1)).expect("admissible");
    let [a1, a2, b1, b2] = Element::generators(params);
    let one = Element::identity(params);
    let img_a = a2.multiply(b1).multiply(b2);
    let img_b = a1.multiply(b2);
    let img_c = a1.multiply(a2).multiply(b1);

    let image_rows: [[Element; 4]; 6] = [
        [img_a, img_a, img_b, one],
        [img_a, img_a, img_c, one],
        [img_b, img_b, img_a, one],
        [img_b, img_b, img_c, one],
        [img_c, img_c, img_a, one],
        [img_c, img_c, img_b, one],
    ];
    let mut phis = Vec::with_capacity(6);
    for row in image_rows {
        let endo = Endo::new(GenImages::new(row).expect("same params"))
            .expect("the six exceptional maps satisfy the relations");
        phis.push(NormalizedEndo::new(endo).expect("zero central parts"));
    }
    let phis: [NormalizedEndo; 6] = phis.try_into().expect("six maps");

    // The shift matrices: columns are zero or v = (1,1,0,1)^t.
    let v = [1i64, 1, 0, 1];
    let with_cols = |on: [bool; 4]| {
        let rows: [[i64; 4]; 4] =
            std::array::from_fn(|i| std::array::from_fn(|j| if on[j] { v[i] } else { 0 }));
        FpMat4::new(2, rows).expect("mod 2 entries")
    };
    let m1 = CentralHom::new(with_cols([true, true, false, false]));
    let m2 = CentralHom::new(with_cols([true, true, true, false]));
    let m3 = m1.add(m2);
    debug_assert_eq!(m3.matrix(), with_cols([false, false, true, false]));
    let shift_hom = |s: Shift| match s {
        Shift::Zero => CentralHom::zero(2),
        Shift::M1 => m1,
        Shift::M2 => m2,
        Shift::M3 => m3,
    };

    // Recompute all 36 compositions and compare cell-for-cell.
    let mut comp = [[CompCell { phi: 1, shift: Shift::Zero }; 6]; 6];
    for i in 0..6 {
        for j in 0..6 {
            let computed = phis[i].as_endo().compose(phis[j].as_endo());
            let (phi_k, shift) = EXPECTED_COMP[i][j];
            let expected = phis[phi_k - 1].as_endo().add_hom(shift_hom(shift));
            if computed != expected {
                return Err(CensusError::TableMismatch {
                    row: i + 1,
                    col: j + 1,
                    found: computed.to_string(),
                });
            }
            comp[i][j] = CompCell { phi: phi_k, shift };
        }
    }

    // Class quotient: each phi permutes the classes of the three elements
    // a1 b2, a1 a2 b1, a2 b1 b2 (classes = images modulo the center).
    let labels = [img_b, img_c, img_a];
    let mut perms = [[0usize; 3]; 6];
    for (i, phi) in phis.iter().enumerate() {
        for (l, &x) in labels.iter().enumerate() {
            let image = phi.as_endo().apply(x);
            let target = labels.iter().position(|&lab| lab.gen_part() == image.gen_part());
            perms[i][l] =
                target.ok_or(CensusError::QuotientMismatch("image leaves the three classes"))?;
        }
    }
    // phi_4 is neutral, the permutation model is faithful onto all six
    // permutations of three letters, and composition passes to the quotient.
    if perms[3] != [0, 1, 2] {
        return Err(CensusError::QuotientMismatch("phi_4 is not neutral"));
    }
    let mut sorted = perms.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != 6 {
        return Err(CensusError::QuotientMismatch("fewer than six distinct permutations"));
    }
    for i in 0..6 {
        for j in 0..6 {
            let composed: [usize; 3] = std::array::from_fn(|l| perms[i][perms[j][l]]);
            if composed != perms[EXPECTED_COMP[i][j].0 - 1] {
                return Err(CensusError::QuotientMismatch(
                    "quotient is not compatible with composition",
                ));
            }
        }
    }
    let nonabelian =
        (0..6).any(|i| (0..6).any(|j| EXPECTED_COMP[i][j].0 != EXPECTED_COMP[j][i].0));
    if !nonabelian {
        return Err(CensusError::QuotientMismatch("quotient is abelian"));
    }

    Ok(ExceptionalTable {
        schema_version: SCHEMA_VERSION,
        phis: phis.iter().map(|p| p.to_string()).collect(),
        m1: m1.digits(),
        m2: m2.digits(),
        m3: m3.digits(),
        comp,
        quotient_permutations: perms,
        phi_endos: phis,
        shifts: [m1, m2, m3],
    })
}

impl ExceptionalTable {
    /// The two tables in markdown, mirroring the printed layout.
    pub fn to_markdown(&self) -> String {
        let mut out = String::new();
        out.push_str("| endomorphism | image of a1 | image of a2 | image of b1 | image of b2 |\n");
        out.push_str("|---|---|---|---|---|\n");
        for (i, phi) in self.phi_endos.iter().enumerate() {
            let imgs = phi.as_endo().images();
            out.push_str(&format!(
                "| phi_{} | {} | {} | {} | {} |\n",
                i + 1,
                imgs[0],
                imgs[1],
                imgs[2],
                imgs[3]
            ));
        }
        out.push('\n');
        out.push_str("| . | phi_1 | phi_2 | phi_3 | phi_4 | phi_5 | phi_6 |\n");
        out.push_str("|---|---|---|---|---|---|---|\n");
        for i in 0..6 {
            let cells: Vec<String> = (0..6)
                .map(|j| {
                    let cell = self.comp[i][j];
                    match cell.shift {
                        Shift::Zero => format!("phi_{}", cell.phi),
                        Shift::M1 => format!("phi_{}+M1", cell.phi),
                        Shift::M2 => format!("phi_{}+M2", cell.phi),
                        Shift::M3 => format!("phi_{}+M3", cell.phi),
                    }
                })
                .collect();
            out.push_str(&format!("| phi_{} | {} |\n", i + 1, cells.join(" | ")));
        }
        out
    }
}

/// Count solutions f of `f = shift + f . phi_4` over all 2^16 central
/// homomorphisms. With shift = M3 this is the neutrality constraint a
/// two-sided semidirect product presentation of End(G(2,(1,1))) would force
/// on each section candidate; it has no solutions. With shift = 0 it does
/// (f = 0), which the tests use as a negative control.
pub fn neutrality_solution_count(shift: &CentralHom) -> u64 {
    let table = build_exceptional_table().expect("table verifies");
    let abel4 = table.phi_endos[3].as_endo().abelianization_matrix();
    let shift_m = shift.matrix();
    FpMat4::iter_all(2).filter(|f| *f == shift_m.add(f.mul(abel4))).count() as u64
}

#[derive(Debug, Clone, Serialize)]
pub struct NoSectionReport {
    pub schema_version: u32,
    /// Solutions of the neutrality equation for each phi_i; all zero.
    pub solutions_per_phi: [u64; 6],
    pub candidates_per_phi: u64,
    pub holds: bool,
}

/// No choice of central shifts turns the six exceptional classes into a
/// monoid section: the neutrality equation `f_i = M3 + f_i . phi_4` has no
/// solution among the 2^16 candidates, for every i.
pub fn verify_no_section() -> NoSectionReport {
    let table = build_exceptional_table().expect("table verifies");
    let m3 = table.shifts[2];
    let solutions_per_phi = std::array::from_fn(|_| neutrality_solution_count(&m3));
    let holds = solutions_per_phi.iter().all(|&c| c == 0);
    NoSectionReport {
        schema_version: SCHEMA_VERSION,
        solutions_per_phi,
        candidates_per_phi: 1 << 16,
        holds,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(p: u8, lambda: (u8, u8)) -> GroupParams {
        GroupParams::new(p, lambda).unwrap()
    }

    #[test]
    fn census_counts_p2() {
        assert_eq!(classes(params(2, (0, 1))).len(), 2);
        assert_eq!(classes(params(2, (1, 0))).len(), 17);
        assert_eq!(classes(params(2, (1, 1))).len(), 23);
    }

    #[test]
    fn pruned_and_full_agree_at_p2() {
        for lambda in GroupParams::admissible_lambdas(2) {
            let pr = params(2, lambda);
            let pruned =
                enumerate_normalized(pr, EnumerationMode::Pruned, DEFAULT_BUDGET).unwrap();
            let full = enumerate_normalized(pr, EnumerationMode::Full, DEFAULT_BUDGET).unwrap();
            assert_eq!(pruned, full, "lambda={lambda:?}");
        }
    }

    #[test]
    fn budget_is_enforced() {
        let err = enumerate_normalized(params(2, (0, 1)), EnumerationMode::Full, 10).unwrap_err();
        assert!(matches!(err, CensusError::BudgetExceeded { .. }));
    }

    #[test]
    fn class_kind_counts_p2() {
        let report = census(params(2, (1, 1)), EnumerationMode::Pruned, DEFAULT_BUDGET).unwrap();
        assert_eq!(report.normalized_count, 23);
        assert_eq!(report.class_kinds.identity, 1);
        assert_eq!(report.class_kinds.central_image, 1);
        assert_eq!(report.class_kinds.exceptional, 21);
        assert_eq!(report.endomorphism_count, 23 * (1u128 << 16));
        assert!(report.witnesses.is_some());
    }

    #[test]
    fn shortcut_holds_exactly_for_lambda2_nonzero_at_p2() {
        assert!(center_shortcut_holds(params(2, (0, 1))));
        assert!(!center_shortcut_holds(params(2, (1, 0))));
        assert!(!center_shortcut_holds(params(2, (1, 1))));
    }

    #[test]
    fn theorem1_family_at_p2() {
        let report = verify_theorem1(params(2, (0, 1)), 0xE0, 20_000);
        assert!(report.only_trivial_classes);
        assert!(report.end_commutative);
        assert_eq!(report.normalized_count, 2);
        assert_eq!(report.endomorphism_count, report.expected_endomorphism_count);
        assert_eq!(report.commutation_failures, 0);
        assert!(find_noncommuting_pair(params(2, (0, 1)), &classes(params(2, (0, 1)))).is_none());
    }

    #[test]
    fn noncommuting_pairs_in_exceptional_families() {
        for (p, lambda) in [(2u8, (1u8, 0u8)), (2, (1, 1))] {
            let pr = params(p, lambda);
            let pair = find_noncommuting_pair(pr, &classes(pr));
            let (x, y) = pair.expect("pair must exist");
            assert_ne!(x.compose(&y), y.compose(&x));
        }
    }

    #[test]
    fn corrected_witness_disagrees_by_central_factor() {
        for (p, lambda) in [(2u8, (1u8, 0u8)), (3, (1, 0)), (2, (1, 1))] {
            let w = corrected_witness(params(p, lambda)).expect("witness exists");
            assert!(w.factor_is_central, "p={p} lambda={lambda:?}");
            assert!(w.factor_is_nontrivial, "p={p} lambda={lambda:?}");
        }
        assert!(corrected_witness(params(3, (0, 1))).is_none());
    }

    #[test]
    fn exceptional_theorem_p2() {
        let report = verify_exceptional_theorem(params(2, (1, 0))).unwrap();
        assert_eq!(report.normalized_count, 17);
        assert!(report.holds);
        assert!(verify_exceptional_theorem(params(2, (1, 1))).is_err());
    }

    #[test]
    fn every_map_into_the_cyclic_representatives_validates() {
        // All p^4 maps into the representatives of <a1 a2^-1> modulo the
        // center extend to endomorphisms.
        for p in [2u8, 3] {
            let pr = params(p, (1, 0));
            let reps: Vec<Element> = (0..p)
                .map(|x| Element::new(pr, [x, fp::sub_mod(0, x, p), 0, 0], [0; 4]).unwrap())
                .collect();
            let mut count = 0u64;
            for i0 in 0..p as usize {
                for i1 in 0..p as usize {
                    for i2 in 0..p as usize {
                        for i3 in 0..p as usize {
                            let images = [reps[i0], reps[i1], reps[i2], reps[i3]];
                            assert!(GenImages::new(images).unwrap().validate().is_ok());
                            count += 1;
                        }
                    }
                }
            }
            assert_eq!(count, (p as u64).pow(4));
        }
    }

    #[test]
    fn exceptional_table_builds_and_verifies() {
        let table = build_exceptional_table().unwrap();
        // phi_2 . phi_1 = phi_3 with no shift; column 4 is uniformly +M3.
        assert_eq!(table.comp[1][0], CompCell { phi: 3, shift: Shift::Zero });
        for i in 0..6 {
            assert_eq!(table.comp[i][3], CompCell { phi: i + 1, shift: Shift::M3 });
        }
        assert_eq!(table.comp[0][0], CompCell { phi: 5, shift: Shift::M1 });
        let md = table.to_markdown();
        assert!(md.contains("phi_5+M1"));
        assert!(md.contains("| phi_6 |"));
    }

    #[test]
    fn exceptional_classes_match_the_census() {
        // The 23 classes are exactly: identity, the 16 maps into the
        // representatives of <a1 a2 b2> (including zero), and the six
        // hard-coded maps, as sets.
        let pr = params(2, (1, 1));
        let table = build_exceptional_table().unwrap();
        let all = classes(pr);
        let u = Element::new(pr, [1, 1, 0, 1], [0; 4]).unwrap(); // a1 a2 b2
        let into_cyclic: Vec<&NormalizedEndo> = all
            .iter()
            .filter(|n| {
                n.as_endo().images().iter().all(|img| img.is_identity() || *img == u)
            })
            .collect();
        assert_eq!(into_cyclic.len(), 16);
        let mut rest: Vec<NormalizedEndo> = all
            .iter()
            .filter(|n| {
                !n.is_identity_map()
                    && !n.as_endo().images().iter().all(|img| img.is_identity() || *img == u)
            })
            .copied()
            .collect();
        let mut phis = table.phi_endos.to_vec();
        rest.sort_unstable();
        phis.sort_unstable();
        assert_eq!(rest, phis);
    }

    #[test]
    fn composition_class_depends_only_on_classes() {
        // Exhaustive at p = 2: shifting either factor by an elementary
        // central homomorphism never changes the normalized part of the
        // composition.
        for lambda in GroupParams::admissible_lambdas(2) {
            let pr = params(2, lambda);
            let reps = classes(pr);
            let mut shifts = vec![CentralHom::zero(2)];
            for i in 0..4 {
                for j in 0..4 {
                    shifts.push(CentralHom::elementary(2, i, j));
                }
            }
            for a in &reps {
                for b in &reps {
                    let (base, _) = a.as_endo().compose(b.as_endo()).normalize();
                    for &f in &shifts {
                        for &g in &shifts {
                            let x = a.as_endo().add_hom(f);
                            let y = b.as_endo().add_hom(g);
                            let (norm, _) = x.compose(&y).normalize();
                            assert_eq!(norm, base, "lambda={lambda:?}");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn no_section_check() {
        let report = verify_no_section();
        assert!(report.holds);
        assert_eq!(report.solutions_per_phi, [0; 6]);
        // Negative control: with the shift removed the equation is solvable
        // (f = 0 works).
        assert!(neutrality_solution_count(&CentralHom::zero(2)) > 0);
    }
}
