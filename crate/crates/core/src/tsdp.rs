//! Two-sided semidirect products of monoids and the two concrete models for
//! the endomorphism monoids of this family.
//!
//! Given monoids M1 (additive) and M2 (multiplicative), with M2 acting on M1
//! by monoid endomorphisms from the left and, contravariantly, from the
//! right, such that the actions commute, the two-sided semidirect product
//! M1 |x| M2 is the monoid on M1 x M2 with identity (0, 1) and
//!
//! ```text
//! (m1, m2) . (m1', m2') = (m1 m2' + m2 m1', m2 m2')
//! ```
//!
//! The product silently fails to be a monoid when the action axioms fail, so
//! instances audit their actions at construction time: exhaustively when the
//! triple space is small, by seeded sampling otherwise.
//!
//! Two instances matter here. For the end-commutative groups, End(G) is
//! isomorphic to Mat4(F_p) |x| {0,1} with the scalar action on both sides.
//! For lambda = (1,0), End(G) is isomorphic to Mat4(F_p) |x| S_p^1, where
//! S_p is the semigroup on F_p^4 with `x . y = (x1 - x2) y`, the adjoined
//! identity acts as the identity, every vector acts as zero from the left,
//! and the right action is `M . x = (x_j (M_i1 - M_i2))_ij`. The map
//! sending an endomorphism to (matrix of its central part, vector of its
//! normalized part) is an isomorphism of monoids onto that product.

use std::sync::Arc;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::census;
use crate::endo::{CentralHom, Endo, GenImages, NormalizedEndo};
use crate::fp::{FpMat4, FpVec4};
use crate::jk::{Element, GroupParams};
use crate::report::SCHEMA_VERSION;
use crate::rng::SplitMix64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TsdpError {
    #[error("{monoid}: {axiom} fails")]
    MonoidAxiom { monoid: String, axiom: &'static str },
    #[error("action axiom {0} fails")]
    ActionAxiom(&'static str),
    #[error("the isomorphism is defined for lambda = (1,0) only")]
    WrongFamily,
    #[error("the commutative model applies to the end-commutative families only")]
    NotCommutativeFamily,
}

/// Exhaustive associativity cutoff: |M|^3 at or below this runs the full
/// triple loop.
const ASSOC_EXHAUSTIVE_LIMIT: u128 = 10_000_000;
/// Exhaustive action-audit cutoff on |M1| * |M2|^2.
const ACTION_EXHAUSTIVE_LIMIT: u128 = 10_000_000;

/// Monoid operation behind a shared closure.
pub type MonoidOp<E> = Arc<dyn Fn(&E, &E) -> E + Send + Sync>;
/// Seeded element sampler.
pub type MonoidSampler<E> = Arc<dyn Fn(&mut SplitMix64) -> E + Send + Sync>;
/// An action of M2-elements on M1-elements.
pub type LeftAction<E1, E2> = Arc<dyn Fn(&E2, &E1) -> E1 + Send + Sync>;
pub type RightAction<E1, E2> = Arc<dyn Fn(&E1, &E2) -> E1 + Send + Sync>;

/// Seeded budgets for the sampled audits.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct CheckConfig {
    pub seed: u64,
    pub samples: u64,
}

impl Default for CheckConfig {
    fn default() -> Self {
        Self { seed: 0x75D9, samples: 1_000_000 }
    }
}

/// A finite monoid with its operation behind a closure. The element universe
/// is enumerated when small enough to be useful; larger monoids carry a
/// seeded sampler instead.
#[derive(Clone)]
pub struct FiniteMonoid<E> {
    name: String,
    size: u128,
    identity: E,
    op: MonoidOp<E>,
    sample: MonoidSampler<E>,
    elements: Option<Vec<E>>,
}

impl<E: Clone + Eq + Send + Sync> FiniteMonoid<E> {
    /// Construct and audit: the identity law is checked on every enumerated
    /// element (on samples otherwise), associativity exhaustively when
    /// |M|^3 is small enough and on seeded triples otherwise.
    pub fn validated(
        name: &str,
        size: u128,
        identity: E,
        op: MonoidOp<E>,
        sample: MonoidSampler<E>,
        elements: Option<Vec<E>>,
        cfg: CheckConfig,
    ) -> Result<Self, TsdpError> {
        let m = Self { name: name.to_string(), size, identity, op, sample, elements };
        m.check_identity(cfg)?;
        m.check_associativity(cfg)?;
        Ok(m)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn size(&self) -> u128 {
        self.size
    }

    pub fn identity(&self) -> &E {
        &self.identity
    }

    pub fn op(&self, a: &E, b: &E) -> E {
        (self.op)(a, b)
    }

    pub fn sample(&self, rng: &mut SplitMix64) -> E {
        (self.sample)(rng)
    }

    pub fn elements(&self) -> Option<&[E]> {
        self.elements.as_deref()
    }

    fn check_identity(&self, cfg: CheckConfig) -> Result<(), TsdpError> {
        let fail =
            |axiom| Err(TsdpError::MonoidAxiom { monoid: self.name.clone(), axiom });
        let ok = |x: &E| self.op(&self.identity, x) == *x && self.op(x, &self.identity) == *x;
        match &self.elements {
            Some(all) => {
                if !all.iter().all(ok) {
                    return fail("two-sided identity");
                }
            }
            None => {
                let mut rng = SplitMix64::new(cfg.seed);
                for _ in 0..cfg.samples.min(100_000) {
                    if !ok(&self.sample(&mut rng)) {
                        return fail("two-sided identity");
                    }
                }
            }
        }
        Ok(())
    }

    fn check_associativity(&self, cfg: CheckConfig) -> Result<(), TsdpError> {
        let assoc = |x: &E, y: &E, z: &E| {
            self.op(&self.op(x, y), z) == self.op(x, &self.op(y, z))
        };
        let exhaustive = self
            .elements
            .as_ref()
            .is_some_and(|all| (all.len() as u128).pow(3) <= ASSOC_EXHAUSTIVE_LIMIT);
        let holds = if exhaustive {
            let all = self.elements.as_ref().expect("checked above");
            all.par_iter().all(|x| {
                all.iter().all(|y| all.iter().all(|z| assoc(x, y, z)))
            })
        } else {
            let base = SplitMix64::new(cfg.seed);
            (0..cfg.samples).into_par_iter().all(|k| {
                let mut rng = base.fork(k);
                let x = self.sample(&mut rng);
                let y = self.sample(&mut rng);
                let z = self.sample(&mut rng);
                assoc(&x, &y, &z)
            })
        };
        if holds {
            Ok(())
        } else {
            Err(TsdpError::MonoidAxiom { monoid: self.name.clone(), axiom: "associativity" })
        }
    }
}

/// The semigroup operation on F_p^4: `x . y = (x1 - x2) y`.
pub fn sp_op(x: FpVec4, y: FpVec4) -> FpVec4 {
    assert_eq!(x.modulus(), y.modulus(), "mixed moduli");
    let p = x.modulus();
    let c = crate::fp::sub_mod(x.get(0), x.get(1), p);
    y.scale(c)
}

/// An element of S_p^1: the adjoined identity or a vector of S_p. The zero
/// vector is absorbing, not neutral, so the identity is a distinguished
/// symbol rather than an encoded vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Sp1Element {
    Identity,
    Vector(FpVec4),
}

impl Sp1Element {
    pub fn op(self, other: Sp1Element) -> Sp1Element {
        match (self, other) {
            (Sp1Element::Identity, x) => x,
            (x, Sp1Element::Identity) => x,
            (Sp1Element::Vector(x), Sp1Element::Vector(y)) => Sp1Element::Vector(sp_op(x, y)),
        }
    }
}

/// The monoid S_p^1, fully enumerated (p^4 + 1 elements).
pub fn sp1_monoid(p: u8, cfg: CheckConfig) -> Result<FiniteMonoid<Sp1Element>, TsdpError> {
    let mut elements = vec![Sp1Element::Identity];
    elements.extend(FpVec4::iter_all(p).map(Sp1Element::Vector));
    let size = elements.len() as u128;
    FiniteMonoid::validated(
        &format!("S_{p}^1"),
        size,
        Sp1Element::Identity,
        Arc::new(|a: &Sp1Element, b: &Sp1Element| a.op(*b)),
        Arc::new(move |rng: &mut SplitMix64| {
            let entries: [i64; 4] = std::array::from_fn(|_| rng.below(p as u64) as i64);
            Sp1Element::Vector(FpVec4::new(p, entries).expect("supported modulus"))
        }),
        Some(elements),
        cfg,
    )
}

/// The additive monoid of 4x4 matrices over F_p; enumerated at p = 2 only.
pub fn matrix_monoid(p: u8, cfg: CheckConfig) -> Result<FiniteMonoid<FpMat4>, TsdpError> {
    let elements = (p == 2).then(|| FpMat4::iter_all(2).collect());
    FiniteMonoid::validated(
        &format!("Mat4(F_{p})"),
        (p as u128).pow(16),
        FpMat4::zero(p),
        Arc::new(|a: &FpMat4, b: &FpMat4| a.add(*b)),
        Arc::new(move |rng: &mut SplitMix64| random_matrix(p, rng)),
        elements,
        cfg,
    )
}

pub(crate) fn random_matrix(p: u8, rng: &mut SplitMix64) -> FpMat4 {
    let rows: [[i64; 4]; 4] =
        std::array::from_fn(|_| std::array::from_fn(|_| rng.below(p as u64) as i64));
    FpMat4::new(p, rows).expect("supported modulus")
}

/// A two-sided semidirect product instance with audited actions.
#[derive(Clone)]
pub struct TsdpInstance<E1, E2> {
    m1: FiniteMonoid<E1>,
    m2: FiniteMonoid<E2>,
    left: LeftAction<E1, E2>,
    right: RightAction<E1, E2>,
}

impl<E1, E2> TsdpInstance<E1, E2>
where
    E1: Clone + Eq + Send + Sync,
    E2: Clone + Eq + Send + Sync,
{
    /// Construct and audit the action axioms: identity actions, additivity
    /// of both actions, the left action law, the contravariant right action
    /// law, and the compatibility `(m2 m1) m2' = m2 (m1 m2')`. Exhaustive
    /// when |M1| * |M2|^2 is small enough, seeded sampling otherwise.
    pub fn validated(
        m1: FiniteMonoid<E1>,
        m2: FiniteMonoid<E2>,
        left: LeftAction<E1, E2>,
        right: RightAction<E1, E2>,
        cfg: CheckConfig,
    ) -> Result<Self, TsdpError> {
        let inst = Self { m1, m2, left, right };
        inst.audit(cfg)?;
        Ok(inst)
    }

    pub fn m1(&self) -> &FiniteMonoid<E1> {
        &self.m1
    }

    pub fn m2(&self) -> &FiniteMonoid<E2> {
        &self.m2
    }

    pub fn left(&self, a: &E2, x: &E1) -> E1 {
        (self.left)(a, x)
    }

    pub fn right(&self, x: &E1, a: &E2) -> E1 {
        (self.right)(x, a)
    }

    pub fn identity(&self) -> (E1, E2) {
        (self.m1.identity().clone(), self.m2.identity().clone())
    }

    pub fn size(&self) -> u128 {
        self.m1.size() * self.m2.size()
    }

    /// `(m1, m2) . (m1', m2') = (m1 m2' + m2 m1', m2 m2')`.
    pub fn product(&self, a: &(E1, E2), b: &(E1, E2)) -> (E1, E2) {
        let first = self.m1.op(&self.right(&a.0, &b.1), &self.left(&a.1, &b.0));
        (first, self.m2.op(&a.1, &b.1))
    }

    fn axioms_hold_at(&self, x: &E1, y: &E1, a: &E2, b: &E2) -> Option<&'static str> {
        let one2 = self.m2.identity();
        let zero1 = self.m1.identity();
        if &self.left(one2, x) != x || &self.right(x, one2) != x {
            return Some("identity acts as the identity");
        }
        if self.left(a, &self.m1.op(x, y)) != self.m1.op(&self.left(a, x), &self.left(a, y))
            || &self.left(a, zero1) != zero1
        {
            return Some("left action is by monoid endomorphisms");
        }
        if self.right(&self.m1.op(x, y), a) != self.m1.op(&self.right(x, a), &self.right(y, a))
            || &self.right(zero1, a) != zero1
        {
            return Some("right action is by monoid endomorphisms");
        }
        if self.left(&self.m2.op(a, b), x) != self.left(a, &self.left(b, x)) {
            return Some("left action law");
        }
        if self.right(x, &self.m2.op(a, b)) != self.right(&self.right(x, a), b) {
            return Some("right action law");
        }
        if self.right(&self.left(a, x), b) != self.left(a, &self.right(x, b)) {
            return Some("action compatibility");
        }
        None
    }

    fn audit(&self, cfg: CheckConfig) -> Result<(), TsdpError> {
        let exhaustive = self.m1.elements().is_some()
            && self.m2.elements().is_some()
            && self.m1.size() * self.m2.size() * self.m2.size() <= ACTION_EXHAUSTIVE_LIMIT;
        if exhaustive {
            // Exhaustive in (x, a, b); the second M1 argument of the
            // additivity laws runs over a strided subsample so the audit
            // stays within the |M1| * |M2|^2 budget.
            let xs = self.m1.elements().expect("enumerated");
            let pairs = self.m2.elements().expect("enumerated");
            let bad = xs.par_iter().find_map_any(|x| {
                for y in xs.iter().step_by(97.max(xs.len() / 64)) {
                    for a in pairs {
                        for b in pairs {
                            if let Some(axiom) = self.axioms_hold_at(x, y, a, b) {
                                return Some(axiom);
                            }
                        }
                    }
                }
                None
            });
            if let Some(axiom) = bad {
                return Err(TsdpError::ActionAxiom(axiom));
            }
            Ok(())
        } else {
            let base = SplitMix64::new(cfg.seed);
            let bad = (0..cfg.samples).into_par_iter().find_map_any(|k| {
                let mut rng = base.fork(k);
                let x = self.m1.sample(&mut rng);
                let y = self.m1.sample(&mut rng);
                let a = self.m2.sample(&mut rng);
                let b = self.m2.sample(&mut rng);
                self.axioms_hold_at(&x, &y, &a, &b)
            });
            match bad {
                Some(axiom) => Err(TsdpError::ActionAxiom(axiom)),
                None => Ok(()),
            }
        }
    }

    /// Audit the product monoid itself: identity law plus associativity on
    /// every triple from a seeded random subset and on fully random triples.
    pub fn verify_product_monoid(
        &self,
        seed: u64,
        subset: usize,
        random_triples: u64,
    ) -> Result<(), TsdpError> {
        let mut rng = SplitMix64::new(seed);
        let ident = self.identity();
        let pool: Vec<(E1, E2)> = (0..subset)
            .map(|_| (self.m1.sample(&mut rng), self.m2.sample(&mut rng)))
            .collect();
        for x in &pool {
            if &self.product(x, &ident) != x || &self.product(&ident, x) != x {
                return Err(TsdpError::MonoidAxiom {
                    monoid: "tsdp product".into(),
                    axiom: "two-sided identity",
                });
            }
        }
        let assoc_fail = TsdpError::MonoidAxiom {
            monoid: "tsdp product".into(),
            axiom: "associativity",
        };
        let ok = pool.par_iter().all(|x| {
            pool.iter().all(|y| {
                pool.iter().all(|z| {
                    self.product(&self.product(x, y), z) == self.product(x, &self.product(y, z))
                })
            })
        });
        if !ok {
            return Err(assoc_fail);
        }
        let base = SplitMix64::new(seed ^ 0xD1CE);
        let ok = (0..random_triples).into_par_iter().all(|k| {
            let mut rng = base.fork(k);
            let x = (self.m1.sample(&mut rng), self.m2.sample(&mut rng));
            let y = (self.m1.sample(&mut rng), self.m2.sample(&mut rng));
            let z = (self.m1.sample(&mut rng), self.m2.sample(&mut rng));
            self.product(&self.product(&x, &y), &z) == self.product(&x, &self.product(&y, &z))
        });
        if ok {
            Ok(())
        } else {
            Err(assoc_fail)
        }
    }
}

/// Mat4(F_p) |x| {0,1} with the scalar action on both sides; the model of
/// End(G) for every end-commutative member of the family. Commutative of
/// size 2 p^16.
pub fn commutative_model(p: u8, cfg: CheckConfig) -> Result<TsdpInstance<FpMat4, u8>, TsdpError> {
    let m1 = matrix_monoid(p, cfg)?;
    let m2 = FiniteMonoid::validated(
        "{0,1}",
        2,
        1u8,
        Arc::new(|a: &u8, b: &u8| a * b),
        Arc::new(|rng: &mut SplitMix64| (rng.below(2)) as u8),
        Some(vec![0u8, 1]),
        cfg,
    )?;
    let scalar = |a: &u8, x: &FpMat4| if *a == 1 { *x } else { FpMat4::zero(x.modulus()) };
    TsdpInstance::validated(
        m1,
        m2,
        Arc::new(move |a: &u8, x: &FpMat4| scalar(a, x)),
        Arc::new(move |x: &FpMat4, a: &u8| scalar(a, x)),
        cfg,
    )
}

/// Right action of a vector on a matrix: column j of the result is
/// `x_j (col_1(M) - col_2(M))`.
pub fn matrix_dot_vector(m: FpMat4, x: FpVec4) -> FpMat4 {
    let p = m.modulus();
    let diff = m.col(0).sub(m.col(1));
    FpMat4::from_cols(p, std::array::from_fn(|j| diff.scale(x.get(j))))
}

/// Mat4(F_p) |x| S_p^1: the model of End(G) for lambda = (1,0). The
/// adjoined identity acts as the identity on both sides, every vector acts
/// as zero from the left, and from the right by [`matrix_dot_vector`]. Size
/// (p^4 + 1) p^16.
pub fn exceptional_model(
    p: u8,
    cfg: CheckConfig,
) -> Result<TsdpInstance<FpMat4, Sp1Element>, TsdpError> {
    let m1 = matrix_monoid(p, cfg)?;
    let m2 = sp1_monoid(p, cfg)?;
    TsdpInstance::validated(
        m1,
        m2,
        Arc::new(move |a: &Sp1Element, x: &FpMat4| match a {
            Sp1Element::Identity => *x,
            Sp1Element::Vector(_) => FpMat4::zero(p),
        }),
        Arc::new(move |x: &FpMat4, a: &Sp1Element| match a {
            Sp1Element::Identity => *x,
            Sp1Element::Vector(v) => matrix_dot_vector(*x, *v),
        }),
        cfg,
    )
}

/// The isomorphism End(G(p,(1,0))) -> Mat4(F_p) |x| S_p^1. The normalized
/// part of a non-automorphism maps the generators to the canonical
/// representatives a1^x a2^(-x); the corresponding section inside the
/// product is taken at the literal powers of a1 a2^-1 (a subgroup, so
/// composition never leaves it), and the matrix coordinate is the central
/// homomorphism relative to that section.
pub fn alpha(e: &Endo) -> Result<(FpMat4, Sp1Element), TsdpError> {
    let params = e.params();
    if params.lambda() != (1, 0) {
        return Err(TsdpError::WrongFamily);
    }
    let p = params.p();
    let (norm, cent) = e.normalize();
    if norm.is_identity_map() {
        return Ok((cent.matrix(), Sp1Element::Identity));
    }
    let [a1, a2, _, _] = Element::generators(params);
    let w = a1.multiply(a2.inverse());
    let mut exponents = [0u8; 4];
    let mut cols = [FpVec4::zero(p); 4];
    for j in 0..4 {
        let img = e.images()[j];
        let x = img.gen_part()[0]; // a1-exponent determines the power of w
        exponents[j] = x;
        let residue = img.multiply(w.power(x as u64).inverse());
        debug_assert!(residue.is_central(), "image must lie in <a1 a2^-1> zG");
        cols[j] = residue.central_vector();
    }
    Ok((
        FpMat4::from_cols(p, cols),
        Sp1Element::Vector(FpVec4::new(p, exponents.map(|v| v as i64)).expect("reduced")),
    ))
}

/// Inverse of [`alpha`]; used for the structural bijectivity check.
pub fn alpha_inverse(params: GroupParams, value: &(FpMat4, Sp1Element)) -> Endo {
    assert_eq!(params.lambda(), (1, 0), "defined for lambda = (1,0) only");
    let (mat, s) = value;
    match s {
        Sp1Element::Identity => Endo::star(params, CentralHom::new(*mat)),
        Sp1Element::Vector(x) => {
            let [a1, a2, _, _] = Element::generators(params);
            let w = a1.multiply(a2.inverse());
            let images = std::array::from_fn(|j| {
                let shift = Element::central(params, mat.col(j).entries()).expect("reduced");
                w.power(x.get(j) as u64).multiply(shift)
            });
            Endo::new(GenImages::new(images).expect("same params"))
                .expect("sections of the cyclic classes are endomorphisms")
        }
    }
}

/// Verification record for either monoid model.
#[derive(Debug, Clone, Serialize)]
pub struct IsoReport {
    pub schema_version: u32,
    pub p: u8,
    pub lambda: (u8, u8),
    pub model: String,
    pub exhaustive_pairs: u64,
    pub sampled_pairs: u64,
    pub failures: u64,
    pub round_trip_failures: u64,
    pub holds: bool,
    #[serde(skip)]
    pub elapsed: Duration,
}

/// Verify that [`alpha`] is a monoid isomorphism: homomorphism property on
/// (exhaustively at p = 2) all pairs of normalized representatives shifted
/// by every elementary central homomorphism on each side, plus seeded random
/// pairs; bijectivity via round trips through [`alpha_inverse`].
pub fn verify_alpha(p: u8, seed: u64, sampled_pairs: u64) -> Result<IsoReport, TsdpError> {
    let start = Instant::now();
    let params = GroupParams::new(p, (1, 0)).expect("admissible");
    let cfg = CheckConfig { seed, samples: 200_000 };
    let model = exceptional_model(p, cfg)?;
    let normalized = census::classes(params);

    let mut failures = 0u64;
    let mut round_trip_failures = 0u64;
    let mut exhaustive_pairs = 0u64;
    if p == 2 {
        let shifted = shifted_set(params, &normalized);
        for x in &shifted {
            let ax = alpha(x)?;
            if alpha_inverse(params, &ax) != *x {
                round_trip_failures += 1;
            }
            for y in &shifted {
                exhaustive_pairs += 1;
                if alpha(&x.compose(y))? != model.product(&ax, &alpha(y)?) {
                    failures += 1;
                }
            }
        }
    }

    let base = SplitMix64::new(seed);
    let sampled_failures: u64 = (0..sampled_pairs)
        .into_par_iter()
        .map(|k| {
            let mut rng = base.fork(k);
            let x = census::random_endo(params, &normalized, &mut rng);
            let y = census::random_endo(params, &normalized, &mut rng);
            let ok = alpha(&x.compose(&y)).expect("lambda checked")
                == model.product(
                    &alpha(&x).expect("lambda checked"),
                    &alpha(&y).expect("lambda checked"),
                )
                && alpha_inverse(params, &alpha(&x).expect("lambda checked")) == x;
            u64::from(!ok)
        })
        .sum();
    failures += sampled_failures;

    Ok(IsoReport {
        schema_version: SCHEMA_VERSION,
        p,
        lambda: (1, 0),
        model: format!("Mat4(F_{p}) |x| S_{p}^1"),
        exhaustive_pairs,
        sampled_pairs,
        failures,
        round_trip_failures,
        holds: failures == 0 && round_trip_failures == 0,
        elapsed: start.elapsed(),
    })
}

/// The analogous map onto Mat4(F_p) |x| {0,1} for an end-commutative family:
/// an endomorphism goes to (matrix of its central part, 1 if automorphism
/// else 0).
pub fn beta(e: &Endo) -> Result<(FpMat4, u8), TsdpError> {
    let (norm, cent) = e.normalize();
    if norm.is_identity_map() {
        Ok((cent.matrix(), 1))
    } else if norm.is_zero_map() {
        Ok((cent.matrix(), 0))
    } else {
        Err(TsdpError::NotCommutativeFamily)
    }
}

/// Verify that [`beta`] is a monoid isomorphism for an end-commutative
/// family (classes are {identity, zero}, so the shifted set is exhaustive at
/// p = 2), plus seeded random pairs and commutativity of the model.
pub fn verify_commutative_iso(
    params: GroupParams,
    seed: u64,
    sampled_pairs: u64,
) -> Result<IsoReport, TsdpError> {
    let start = Instant::now();
    let p = params.p();
    let cfg = CheckConfig { seed, samples: 200_000 };
    let model = commutative_model(p, cfg)?;
    let normalized = census::classes(params);
    if normalized.len() != 2 {
        return Err(TsdpError::NotCommutativeFamily);
    }

    let mut failures = 0u64;
    let mut exhaustive_pairs = 0u64;
    if p == 2 {
        let shifted = shifted_set(params, &normalized);
        for x in &shifted {
            let bx = beta(x)?;
            for y in &shifted {
                exhaustive_pairs += 1;
                let by = beta(y)?;
                if beta(&x.compose(y))? != model.product(&bx, &by) {
                    failures += 1;
                }
                if model.product(&bx, &by) != model.product(&by, &bx) {
                    failures += 1;
                }
            }
        }
    }

    let base = SplitMix64::new(seed);
    let sampled_failures: u64 = (0..sampled_pairs)
        .into_par_iter()
        .map(|k| {
            let mut rng = base.fork(k);
            let x = census::random_endo(params, &normalized, &mut rng);
            let y = census::random_endo(params, &normalized, &mut rng);
            let ok = beta(&x.compose(&y)).expect("trivial classes")
                == model.product(
                    &beta(&x).expect("trivial classes"),
                    &beta(&y).expect("trivial classes"),
                );
            u64::from(!ok)
        })
        .sum();
    failures += sampled_failures;

    Ok(IsoReport {
        schema_version: SCHEMA_VERSION,
        p,
        lambda: params.lambda(),
        model: format!("Mat4(F_{p}) |x| {{0,1}}"),
        exhaustive_pairs,
        sampled_pairs,
        failures,
        round_trip_failures: 0,
        holds: failures == 0,
        elapsed: start.elapsed(),
    })
}

/// Every class representative shifted by the zero and the sixteen elementary
/// central homomorphisms.
fn shifted_set(params: GroupParams, normalized: &[NormalizedEndo]) -> Vec<Endo> {
    let p = params.p();
    let mut shifts = vec![CentralHom::zero(p)];
    for i in 0..4 {
        for j in 0..4 {
            shifts.push(CentralHom::elementary(p, i, j));
        }
    }
    let mut out = Vec::with_capacity(normalized.len() * shifts.len());
    for norm in normalized {
        for &f in &shifts {
            out.push(norm.as_endo().add_hom(f));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> CheckConfig {
        CheckConfig { seed: 0x7e57, samples: 20_000 }
    }

    #[test]
    fn sp_op_examples() {
        // First two entries equal: everything is crushed to zero.
        let x = FpVec4::new(3, [2, 2, 1, 0]).unwrap();
        let y = FpVec4::new(3, [1, 2, 2, 1]).unwrap();
        assert!(sp_op(x, y).is_zero());
        // p=3: (2,1,0,0) . (1,1,1,1) = (1,1,1,1).
        let x = FpVec4::new(3, [2, 1, 0, 0]).unwrap();
        let y = FpVec4::new(3, [1, 1, 1, 1]).unwrap();
        assert_eq!(sp_op(x, y), y);
    }

    #[test]
    fn sp_associativity_exhaustive_small_p() {
        for p in [2u8, 3] {
            let all: Vec<FpVec4> = FpVec4::iter_all(p).collect();
            for &x in &all {
                for &y in &all {
                    for &z in &all {
                        assert_eq!(sp_op(sp_op(x, y), z), sp_op(x, sp_op(y, z)));
                    }
                }
            }
        }
    }

    #[test]
    fn zero_vector_is_absorbing_not_neutral() {
        let zero = FpVec4::zero(2);
        let x = FpVec4::new(2, [1, 0, 1, 0]).unwrap();
        assert!(sp_op(zero, x).is_zero());
        assert!(sp_op(x, zero).is_zero());
        // The adjoined identity is therefore genuinely new.
        assert_eq!(
            Sp1Element::Identity.op(Sp1Element::Vector(x)),
            Sp1Element::Vector(x)
        );
    }

    #[test]
    fn sp1_monoid_validates() {
        for p in [2u8, 3, 5] {
            let m = sp1_monoid(p, cfg()).unwrap();
            assert_eq!(m.size(), (p as u128).pow(4) + 1);
        }
    }

    #[test]
    fn models_validate_and_multiply() {
        let inst = commutative_model(2, cfg()).unwrap();
        assert_eq!(inst.size(), 2 * (1 << 16));
        let m = FpMat4::elementary(2, 0, 0);
        let m2 = FpMat4::elementary(2, 1, 1);
        // (M,1)(M',1) = (M+M',1); (M,1)(M',0) = (M',0); (M,0)(M',0) = (0,0).
        assert_eq!(inst.product(&(m, 1), &(m2, 1)), (m.add(m2), 1));
        assert_eq!(inst.product(&(m, 1), &(m2, 0)), (m2, 0));
        assert_eq!(inst.product(&(m, 0), &(m2, 1)), (m, 0));
        assert_eq!(inst.product(&(m, 0), &(m2, 0)), (FpMat4::zero(2), 0));
        inst.verify_product_monoid(7, 60, 20_000).unwrap();

        let exc = exceptional_model(2, cfg()).unwrap();
        assert_eq!(exc.size(), 17 * (1 << 16));
        exc.verify_product_monoid(7, 60, 20_000).unwrap();
        let ident = exc.identity();
        let v = Sp1Element::Vector(FpVec4::new(2, [1, 0, 0, 0]).unwrap());
        assert_eq!(exc.product(&(m, v), &ident), (m, v));
        assert_eq!(exc.product(&ident, &(m, v)), (m, v));
    }

    #[test]
    fn right_action_formula() {
        // Column j of M.x is x_j (col1(M) - col2(M)).
        let m = FpMat4::new(3, [[1, 2, 0, 0], [0, 1, 0, 0], [2, 0, 0, 0], [1, 1, 0, 0]]).unwrap();
        let x = FpVec4::new(3, [1, 0, 2, 1]).unwrap();
        let d = m.col(0).sub(m.col(1));
        let result = matrix_dot_vector(m, x);
        for j in 0..4 {
            assert_eq!(result.col(j), d.scale(x.get(j)));
        }
    }

    #[test]
    fn alpha_examples() {
        let params = GroupParams::new(2, (1, 0)).unwrap();
        // Identity endomorphism -> (0, identity).
        let id = Endo::identity(params);
        assert_eq!(alpha(&id).unwrap(), (FpMat4::zero(2), Sp1Element::Identity));
        // star(f) -> (mat(f), identity).
        let f = CentralHom::elementary(2, 2, 1);
        assert_eq!(alpha(&Endo::star(params, f)).unwrap(), (f.matrix(), Sp1Element::Identity));
        // Constant map onto a1 a2^-1 -> (0, (1,1,1,1)).
        let [a1, a2, _, _] = Element::generators(params);
        let w = a1.multiply(a2.inverse());
        let phi = Endo::new(GenImages::new([w; 4]).unwrap()).unwrap();
        assert_eq!(
            alpha(&phi).unwrap(),
            (FpMat4::zero(2), Sp1Element::Vector(FpVec4::new(2, [1, 1, 1, 1]).unwrap()))
        );
        // Wrong family is rejected.
        let other = GroupParams::new(2, (0, 1)).unwrap();
        assert_eq!(alpha(&Endo::identity(other)), Err(TsdpError::WrongFamily));
    }

    #[test]
    fn alpha_is_an_isomorphism_p2() {
        let report = verify_alpha(2, 0xA1FA, 20_000).unwrap();
        assert!(report.holds, "failures={} round_trips={}", report.failures, report.round_trip_failures);
        assert_eq!(report.exhaustive_pairs, (17u64 * 17).pow(2));
    }

    #[test]
    fn commutative_iso_p2() {
        let params = GroupParams::new(2, (0, 1)).unwrap();
        let report = verify_commutative_iso(params, 0xBE7A, 20_000).unwrap();
        assert!(report.holds);
        // The exceptional family is rejected.
        let bad = GroupParams::new(2, (1, 0)).unwrap();
        assert!(verify_commutative_iso(bad, 0, 10).is_err());
    }
}
