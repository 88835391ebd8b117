//! Structural consequences of end-commutativity, checked on the groups
//! themselves: the omega-subgroup dichotomy, the nil/per decomposition
//! under an endomorphism, and full invariance of endomorphism images.

use std::collections::{BTreeSet, HashMap};
use std::time::{Duration, Instant};

use serde::Serialize;

use crate::census;
use crate::endo::{CentralHom, Endo};
use crate::fp::FpMat4;
use crate::jk::{self, GroupParams, Subgroup};
use crate::report::SCHEMA_VERSION;
use crate::rng::SplitMix64;

/// True iff every element of order dividing p is central. Holds exactly for
/// the end-commutative members of the family.
pub fn omega1_leq_center(params: GroupParams) -> bool {
    let center = jk::center(params);
    jk::omega1(params).members().iter().all(|&e| center.contains(e))
}

#[derive(Debug, Clone, Serialize)]
pub struct Omega1Report {
    pub schema_version: u32,
    pub p: u8,
    pub lambda: (u8, u8),
    pub omega1_order: u64,
    pub center_order: u64,
    pub omega1_in_center: bool,
}

pub fn omega1_report(params: GroupParams) -> Omega1Report {
    Omega1Report {
        schema_version: SCHEMA_VERSION,
        p: params.p(),
        lambda: params.lambda(),
        omega1_order: jk::omega1(params).order() as u64,
        center_order: jk::center(params).order() as u64,
        omega1_in_center: omega1_leq_center(params),
    }
}

/// The decomposition G = nil(e) x| per(e): nil(e) collects the elements some
/// iterate of `e` kills, per(e) the elements on cycles of `e`. With N an
/// exponent for which `e^N` is idempotent, nil(e) = ker(e^N) and
/// per(e) = im(e^N).
#[derive(Debug, Clone)]
pub struct NilPerSplit {
    pub endo: Endo,
    pub nil: Subgroup,
    pub per: Subgroup,
    /// Exponent N with `e^N` idempotent.
    pub idempotent_power: u64,
    /// Smallest n with `e^n` trivial, when e is nilpotent.
    pub nilpotency_index: Option<u64>,
}

/// Iterate compositions of `e` until the power sequence repeats, find the
/// idempotent power, and read the split off its kernel and image.
pub fn nil_per_split(e: &Endo) -> NilPerSplit {
    let params = e.params();
    let zero = Endo::zero(params);
    let mut seen: HashMap<Endo, u64> = HashMap::new();
    let mut powers: Vec<Endo> = vec![*e]; // powers[k] = e^(k+1)
    seen.insert(*e, 1);
    let (tail, cycle) = loop {
        let next = e.compose(powers.last().expect("nonempty"));
        let n = powers.len() as u64 + 1;
        if let Some(&first) = seen.get(&next) {
            break (first, n - first);
        }
        seen.insert(next, n);
        powers.push(next);
        assert!(powers.len() < 200_000, "power sequence failed to cycle");
    };
    // Smallest multiple of the cycle length at or past the tail; that power
    // is idempotent.
    let idempotent_power = cycle * tail.div_ceil(cycle);
    let stable = powers[(idempotent_power - 1) as usize];
    debug_assert_eq!(stable.compose(&stable), stable);

    let nil_members: Vec<_> =
        jk::all_elements(params).filter(|&x| stable.apply(x).is_identity()).collect();
    let per_members: BTreeSet<_> = jk::all_elements(params).map(|x| stable.apply(x)).collect();
    let nil = Subgroup::from_member_set(params, nil_members)
        .expect("kernel of an endomorphism is a subgroup");
    let per = Subgroup::from_member_set(params, per_members.into_iter().collect())
        .expect("image of an endomorphism is a subgroup");
    let nilpotency_index = seen.get(&zero).copied();
    NilPerSplit { endo: *e, nil, per, idempotent_power, nilpotency_index }
}

#[derive(Debug, Clone, Serialize)]
pub struct NilPerReport {
    pub schema_version: u32,
    pub p: u8,
    pub lambda: (u8, u8),
    pub endo: String,
    pub nil_order: u64,
    pub per_order: u64,
    pub idempotent_power: u64,
    pub nilpotency_index: Option<u64>,
    pub trivial_intersection: bool,
    pub nil_is_normal: bool,
    pub product_covers_group: bool,
    pub holds: bool,
}

/// Verify the three split invariants: trivial intersection, normality of
/// nil, and |nil| * |per| = |G| (with the first two this makes nil.per the
/// whole group by counting).
pub fn nil_per_report(split: &NilPerSplit) -> NilPerReport {
    let params = split.endo.params();
    let trivial_intersection =
        split.nil.members().iter().filter(|&&x| split.per.contains(x)).count() == 1;
    let nil_is_normal = split.nil.is_normal();
    let product_covers_group =
        split.nil.order() as u64 * split.per.order() as u64 == params.order();
    NilPerReport {
        schema_version: SCHEMA_VERSION,
        p: params.p(),
        lambda: params.lambda(),
        endo: split.endo.to_string(),
        nil_order: split.nil.order() as u64,
        per_order: split.per.order() as u64,
        idempotent_power: split.idempotent_power,
        nilpotency_index: split.nilpotency_index,
        trivial_intersection,
        nil_is_normal,
        product_covers_group,
        holds: trivial_intersection && nil_is_normal && product_covers_group,
    }
}

/// Batch nil/per verification over seeded random endomorphisms.
#[derive(Debug, Clone, Serialize)]
pub struct NilPerBatchReport {
    pub schema_version: u32,
    pub p: u8,
    pub lambda: (u8, u8),
    pub samples: u64,
    pub failures: u64,
    pub holds: bool,
    #[serde(skip)]
    pub elapsed: Duration,
}

pub fn nil_per_batch(params: GroupParams, seed: u64, samples: u64) -> NilPerBatchReport {
    use rayon::prelude::*;
    let start = Instant::now();
    let normalized = census::classes(params);
    let base = SplitMix64::new(seed);
    let failures: u64 = (0..samples)
        .into_par_iter()
        .map(|k| {
            let mut rng = base.fork(k);
            let e = census::random_endo(params, &normalized, &mut rng);
            u64::from(!nil_per_report(&nil_per_split(&e)).holds)
        })
        .sum();
    NilPerBatchReport {
        schema_version: SCHEMA_VERSION,
        p: params.p(),
        lambda: params.lambda(),
        samples,
        failures,
        holds: failures == 0,
        elapsed: start.elapsed(),
    }
}

/// Is im(e) invariant under every endomorphism? At p = 2 the check walks all
/// of End(G) (classes x central shifts). At p = 3 it checks the class
/// representatives and the elementary star maps, which suffices: any
/// endomorphism is rep + g with g a sum of elementary central homomorphisms,
/// star-invariance for the elementary homs gives g(im) inside im (im is a
/// subgroup), and then (rep + g)(x) = rep(x) g(x) stays in im.
pub fn image_fully_invariant(e: &Endo) -> bool {
    let params = e.params();
    let p = params.p();
    let image = e.image();
    let gens: Vec<_> = image.generators().to_vec();
    let preserved_by = |psi: &Endo| gens.iter().all(|&g| image.contains(psi.apply(g)));

    let classes = census::classes(params);
    if p == 2 {
        use rayon::prelude::*;
        classes.par_iter().all(|rep| {
            FpMat4::iter_all(2)
                .all(|mat| preserved_by(&rep.as_endo().add_hom(CentralHom::new(mat))))
        })
    } else {
        let reps_ok = classes.iter().all(|rep| preserved_by(rep.as_endo()));
        let stars_ok = (0..4).all(|i| {
            (0..4).all(|j| preserved_by(&Endo::star(params, CentralHom::elementary(p, i, j))))
        });
        reps_ok && stars_ok
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct InvarianceReport {
    pub schema_version: u32,
    pub p: u8,
    pub lambda: (u8, u8),
    pub endo: String,
    pub image_order: u64,
    pub fully_invariant: bool,
}

pub fn invariance_report(e: &Endo) -> InvarianceReport {
    let params = e.params();
    InvarianceReport {
        schema_version: SCHEMA_VERSION,
        p: params.p(),
        lambda: params.lambda(),
        endo: e.to_string(),
        image_order: e.image().order() as u64,
        fully_invariant: image_fully_invariant(e),
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
    fn omega1_dichotomy() {
        // True exactly on the end-commutative families.
        assert!(omega1_leq_center(params(2, (0, 1))));
        assert!(omega1_leq_center(params(3, (0, 1))));
        assert!(omega1_leq_center(params(3, (1, 1))));
        assert!(omega1_leq_center(params(3, (2, 1))));
        assert!(!omega1_leq_center(params(2, (1, 0))));
        assert!(!omega1_leq_center(params(2, (1, 1))));
        assert!(!omega1_leq_center(params(3, (1, 0))));
        let report = omega1_report(params(3, (1, 0)));
        assert_eq!(report.omega1_order, 243);
        assert!(!report.omega1_in_center);
    }

    #[test]
    fn nil_per_identity_and_zero() {
        let pr = params(2, (1, 1));
        let id_split = nil_per_split(&Endo::identity(pr));
        assert_eq!(id_split.nil.order(), 1);
        assert_eq!(id_split.per.order() as u64, pr.order());
        assert_eq!(id_split.nilpotency_index, None);
        assert!(nil_per_report(&id_split).holds);

        let zero_split = nil_per_split(&Endo::zero(pr));
        assert_eq!(zero_split.nil.order() as u64, pr.order());
        assert_eq!(zero_split.per.order(), 1);
        assert_eq!(zero_split.nilpotency_index, Some(1));
        assert!(nil_per_report(&zero_split).holds);
    }

    #[test]
    fn constant_map_is_nilpotent_of_index_two() {
        // lambda = (1,0), p = 2, phi: all generators -> a1 a2^-1. Already
        // phi^2 = 0.
        let pr = params(2, (1, 0));
        let [a1, a2, _, _] = Element::generators(pr);
        let w = a1.multiply(a2.inverse());
        let phi = Endo::new(GenImages::new([w; 4]).unwrap()).unwrap();
        let split = nil_per_split(&phi);
        assert_eq!(split.nilpotency_index, Some(2));
        assert_eq!(split.nil.order() as u64, pr.order());
        assert_eq!(split.per.order(), 1);
        assert!(nil_per_report(&split).holds);
    }

    #[test]
    fn exceptional_map_is_neither_automorphism_nor_nilpotent() {
        // The phi_1 class of (2,(1,1)) cycles with period divisible by 3 in
        // the class quotient, so it is not nilpotent.
        let table = census::build_exceptional_table().unwrap();
        let phi1 = table.phi_endos[0].as_endo();
        assert!(!phi1.is_automorphism());
        let split = nil_per_split(phi1);
        assert_eq!(split.nilpotency_index, None);
        assert!(split.per.order() > 1);
        assert!(split.nil.order() > 1);
        assert!(nil_per_report(&split).holds);
    }

    #[test]
    fn nil_per_batch_samples() {
        let report = nil_per_batch(params(2, (1, 1)), 0x5EED0, 50);
        assert!(report.holds);
        let report = nil_per_batch(params(3, (1, 0)), 0x5EED1, 5);
        assert!(report.holds);
    }

    #[test]
    fn center_image_is_fully_invariant() {
        // im = center via a full-rank central hom.
        let pr = params(2, (1, 0));
        let full = CentralHom::new(FpMat4::identity(2)).to_endo(pr);
        assert_eq!(full.image().order(), 16);
        assert!(image_fully_invariant(&full));
    }

    #[test]
    fn cyclic_image_in_exceptional_family_is_not_fully_invariant() {
        // im(phi) = <a1 a2^-1> is moved by star(f) when f(a1 a2^-1) is not
        // in the subgroup.
        let pr = params(2, (1, 0));
        let [a1, a2, _, _] = Element::generators(pr);
        let w = a1.multiply(a2.inverse());
        let phi = Endo::new(GenImages::new([w; 4]).unwrap()).unwrap();
        assert!(!image_fully_invariant(&phi));
        // Explicit mover: f = E11 sends a1 a2^-1 to [a1,b1], and
        // star(f)(w) = w [a1,b1] leaves <w>.
        let f = CentralHom::elementary(2, 0, 0);
        let moved = Endo::star(pr, f).apply(w);
        assert!(!jk::cyclic(w).contains(moved));
    }

    #[test]
    fn images_fully_invariant_in_end_commutative_family() {
        // Sampled representatives of both classes with a few shifts.
        let pr = params(3, (0, 1));
        let mut rng = SplitMix64::new(0xF11);
        let classes = census::classes(pr);
        for _ in 0..10 {
            let e = census::random_endo(pr, &classes, &mut rng);
            assert!(image_fully_invariant(&e), "e={e}");
        }
    }

    #[test]
    fn star_fixes_center_pointwise_and_non_autos_kill_it() {
        let pr = params(3, (1, 1));
        let center = jk::center(pr);
        let mut rng = SplitMix64::new(0xCE27E8);
        for _ in 0..20 {
            let f = CentralHom::new(crate::tsdp::random_matrix(3, &mut rng));
            let sf = Endo::star(pr, f);
            for &z in center.members().iter().step_by(7) {
                assert_eq!(sf.apply(z), z);
            }
        }
        // Every non-automorphism of an end-commutative group kills the
        // center (its normalized part is the zero map).
        for class in census::classes(pr) {
            if class.is_zero_map() {
                let e = class.as_endo().add_hom(CentralHom::elementary(3, 1, 3));
                for &z in center.members().iter().step_by(5) {
                    assert!(e.apply(z).is_identity());
                }
            }
        }
    }
}
