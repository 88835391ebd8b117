//! Censuses of the conjugation action of Aut(G) on End(G).
//!
//! Every automorphism is `id + f` for a central homomorphism f, with inverse
//! `id - f`, so conjugation is `e -> (id+f) . e . (id-f)` and the sixteen
//! elementary homomorphisms generate the whole action. Orbits never leave a
//! normalization class: the conjugate differs from `e` by a central
//! homomorphism that depends only on the normalized part, so one
//! representative's orbit length determines its class's entire contribution
//! to the census.
//!
//! Two routes compute that length. The explicit closure is the ground truth.
//! The rank formula predicts `p^(4 r)` with r the rank of the normalized
//! part on the central quotient (length 1 for automorphisms and
//! center-valued endomorphisms); censuses record which route they used, and
//! the spot checks compare the two.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use serde::Serialize;
use thiserror::Error;

use crate::census::{self, ClassKind};
use crate::endo::{CentralHom, Endo};
use crate::jk::GroupParams;
use crate::report::SCHEMA_VERSION;
use crate::rng::SplitMix64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OrbitError {
    #[error("orbit census mass {mass} does not match |End(G)| = {expected}")]
    MassMismatch { mass: u128, expected: u128 },
}

/// `(id + f) . e . (id + f)^-1`.
pub fn conjugate(e: &Endo, f: CentralHom) -> Endo {
    let params = e.params();
    let sf = Endo::star(params, f);
    let sf_inv = Endo::star(params, f.neg());
    sf.compose(e).compose(&sf_inv)
}

/// Explicit conjugation orbit: closure under the sixteen elementary
/// generators of the automorphism group, returned sorted.
pub fn orbit_of(e: &Endo) -> Vec<Endo> {
    let p = e.params().p();
    let mut generators = Vec::with_capacity(16);
    for i in 0..4 {
        for j in 0..4 {
            generators.push(CentralHom::elementary(p, i, j));
        }
    }
    let mut seen = std::collections::BTreeSet::new();
    seen.insert(*e);
    let mut frontier = vec![*e];
    while let Some(x) = frontier.pop() {
        for &f in &generators {
            let y = conjugate(&x, f);
            if seen.insert(y) {
                frontier.push(y);
            }
        }
    }
    seen.into_iter().collect()
}

/// Predicted orbit length: 1 for automorphisms and for endomorphisms with
/// zero normalized part, otherwise `p^(4 r)` where r is the rank of the
/// normalized part's matrix on the central quotient.
pub fn orbit_size_by_rank(e: &Endo) -> u64 {
    let p = e.params().p() as u64;
    if e.is_automorphism() {
        return 1;
    }
    let (norm, _) = e.normalize();
    if norm.is_zero_map() {
        return 1;
    }
    let r = norm.as_endo().abelianization_matrix().rank() as u32;
    p.pow(4 * r)
}

/// Which route produced the orbit lengths of a census.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum OrbitMethod {
    RankFormula,
    ExplicitClosure,
}

/// Orbit census: how many orbits of each length the conjugation action has.
#[derive(Debug, Clone, Serialize)]
pub struct OrbitCensus {
    pub schema_version: u32,
    pub p: u8,
    pub lambda: (u8, u8),
    pub method: OrbitMethod,
    /// orbit length -> number of orbits of that length.
    pub histogram: BTreeMap<u64, u64>,
    pub total_orbits: u64,
    /// Sum of length * count; always |End(G)|.
    pub mass: u128,
    #[serde(skip)]
    pub elapsed: Duration,
}

impl OrbitCensus {
    pub fn to_csv(&self) -> String {
        crate::report::histogram_csv(self.histogram.iter().map(|(&l, &c)| (l, c)))
    }

    pub fn to_markdown(&self) -> String {
        let mut out = String::from("| orbit length | orbits |\n|---|---|\n");
        for (length, count) in &self.histogram {
            out.push_str(&format!("| {length} | {count} |\n"));
        }
        out.push_str(&format!("| total | {} |\n", self.total_orbits));
        out
    }
}

/// Orbit census over all normalization classes. Each class of p^16
/// endomorphisms with orbit length s contributes `p^16 / s` orbits of that
/// length; the identity class consists of the automorphisms, which are fixed
/// points because the automorphism group is abelian, and the central-image
/// class is fixed pointwise as well.
pub fn orbit_census(params: GroupParams, method: OrbitMethod) -> Result<OrbitCensus, OrbitError> {
    let start = Instant::now();
    let p16 = (params.p() as u64).pow(16);
    let classes = census::classes(params);
    let mut histogram: BTreeMap<u64, u64> = BTreeMap::new();
    for class in &classes {
        match census::class_kind(class) {
            ClassKind::Identity | ClassKind::CentralImage => {
                *histogram.entry(1).or_default() += p16;
            }
            ClassKind::Exceptional => {
                let rep = class.as_endo();
                let s = match method {
                    OrbitMethod::RankFormula => orbit_size_by_rank(rep),
                    OrbitMethod::ExplicitClosure => orbit_of(rep).len() as u64,
                };
                debug_assert_eq!(p16 % s, 0);
                *histogram.entry(s).or_default() += p16 / s;
            }
        }
    }
    let total_orbits = histogram.values().sum();
    let mass: u128 = histogram.iter().map(|(&l, &c)| l as u128 * c as u128).sum();
    let expected = classes.len() as u128 * (params.p() as u128).pow(16);
    if mass != expected {
        return Err(OrbitError::MassMismatch { mass, expected });
    }
    Ok(OrbitCensus {
        schema_version: SCHEMA_VERSION,
        p: params.p(),
        lambda: params.lambda(),
        method,
        histogram,
        total_orbits,
        mass,
        elapsed: start.elapsed(),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct SpotCheckMismatch {
    pub endo: String,
    pub closure_length: u64,
    pub rank_formula_length: u64,
}

/// Comparison of the explicit closure against the rank formula on seeded
/// random endomorphisms.
#[derive(Debug, Clone, Serialize)]
pub struct SpotCheckReport {
    pub schema_version: u32,
    pub p: u8,
    pub lambda: (u8, u8),
    pub samples: u64,
    pub agreements: u64,
    pub mismatches: Vec<SpotCheckMismatch>,
    #[serde(skip)]
    pub elapsed: Duration,
}

pub fn spot_check(params: GroupParams, seed: u64, samples: u64) -> SpotCheckReport {
    let start = Instant::now();
    let normalized = census::classes(params);
    let mut rng = SplitMix64::new(seed);
    let mut agreements = 0u64;
    let mut mismatches = Vec::new();
    for _ in 0..samples {
        let e = census::random_endo(params, &normalized, &mut rng);
        let closure = orbit_of(&e).len() as u64;
        let predicted = orbit_size_by_rank(&e);
        if closure == predicted {
            agreements += 1;
        } else {
            mismatches.push(SpotCheckMismatch {
                endo: e.to_string(),
                closure_length: closure,
                rank_formula_length: predicted,
            });
        }
    }
    SpotCheckReport {
        schema_version: SCHEMA_VERSION,
        p: params.p(),
        lambda: params.lambda(),
        samples,
        agreements,
        mismatches,
        elapsed: start.elapsed(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::endo::GenImages;
    use crate::jk::Element;

    fn params(p: u8, lambda: (u8, u8)) -> GroupParams {
        GroupParams::new(p, lambda).unwrap()
    }

    #[test]
    fn automorphisms_and_central_endos_are_fixed_points() {
        let pr = params(2, (1, 0));
        let f = CentralHom::elementary(2, 1, 2);
        let auto = Endo::star(pr, f);
        assert_eq!(orbit_of(&auto), vec![auto]);
        assert_eq!(orbit_size_by_rank(&auto), 1);
        let central = CentralHom::elementary(2, 0, 3).to_endo(pr);
        assert_eq!(orbit_of(&central), vec![central]);
        assert_eq!(orbit_size_by_rank(&central), 1);
    }

    #[test]
    fn constant_map_orbit_has_length_16_at_p2() {
        let pr = params(2, (1, 0));
        let [a1, a2, _, _] = Element::generators(pr);
        let w = a1.multiply(a2.inverse());
        let phi = Endo::new(GenImages::new([w; 4]).unwrap()).unwrap();
        assert_eq!(orbit_of(&phi).len(), 16);
        assert_eq!(orbit_size_by_rank(&phi), 16);
    }

    #[test]
    fn census_2_10() {
        let census = orbit_census(params(2, (1, 0)), OrbitMethod::RankFormula).unwrap();
        let expected: BTreeMap<u64, u64> = [(1, 131072), (16, 61440)].into();
        assert_eq!(census.histogram, expected);
        assert_eq!(census.total_orbits, 192512);
        assert_eq!(census.total_orbits as u128, 3 * (1u128 << 16) - (1 << 12));
        let closure = orbit_census(params(2, (1, 0)), OrbitMethod::ExplicitClosure).unwrap();
        assert_eq!(closure.histogram, expected);
    }

    #[test]
    fn census_2_01_is_all_fixed_points() {
        let census = orbit_census(params(2, (0, 1)), OrbitMethod::RankFormula).unwrap();
        let expected: BTreeMap<u64, u64> = [(1, 131072)].into();
        assert_eq!(census.histogram, expected);
    }

    #[test]
    fn spot_checks_agree_where_the_normalized_part_kills_the_center() {
        for lambda in [(1u8, 0u8), (0, 1)] {
            let report = spot_check(params(2, lambda), 0x0B17, 60);
            assert_eq!(report.agreements, 60, "lambda={lambda:?}");
            assert!(report.mismatches.is_empty());
        }
    }

    #[test]
    fn exceptional_closure_lengths_at_2_11() {
        // Ground truth for the six exceptional classes, computed by explicit
        // closure: 1024, 512, 512, 256, 1024, 512. The rank formula predicts
        // 256 for each; phi_1..phi_3, phi_5, phi_6 have nonabelian image, so
        // conjugation moves them by more than the formula accounts for. The
        // acceptance suite reports the comparison against the predicted
        // census; this test guards the computed truth.
        let table = census::build_exceptional_table().unwrap();
        let lengths: Vec<usize> =
            table.phi_endos.iter().map(|phi| orbit_of(phi.as_endo()).len()).collect();
        assert_eq!(lengths, vec![1024, 512, 512, 256, 1024, 512]);
        let closure = orbit_census(params(2, (1, 1)), OrbitMethod::ExplicitClosure).unwrap();
        let expected: BTreeMap<u64, u64> =
            [(1, 131072), (16, 61440), (256, 256), (512, 384), (1024, 128)].into();
        assert_eq!(closure.histogram, expected);
        assert_eq!(closure.mass, 23 * (1u128 << 16));
    }
}
