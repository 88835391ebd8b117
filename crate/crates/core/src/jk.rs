//! Normal-form arithmetic in the Jonah-Konvisser groups G(p, lambda).
//!
//! G(p, lambda) is the class-2 p-group on generators a1, a2, b1, b2 with
//!
//! ```text
//! a1^p = [a1,b1]           a2^p = [a1, b1^l1 b2^l2]
//! b1^p = [a2, b1 b2]       b2^p = [a2, b2]
//! [a1,a2] = [b1,b2] = 1
//! ```
//!
//! for lambda = (l1, l2). Every element has a unique normal form
//! `a1^k1 a2^k2 b1^l1 b2^l2 [a1,b1]^r1 [a1,b2]^r2 [a2,b1]^r3 [a2,b2]^r4`
//! with all exponents in `[0, p)`; an [`Element`] stores exactly those eight
//! exponents. The center equals the derived subgroup, is elementary abelian
//! of order p^4 with the four commutators as a basis, and the central
//! quotient is elementary abelian of order p^4 as well, so the group has
//! order p^8.
//!
//! The collection rule in [`Element::multiply`] is reconstructed from the
//! presentation: commutators are central, moving an `a`-letter left past a
//! `b`-letter costs one inverse commutator, and exponent carries past p cost
//! one p-th-power vector. The rule is deliberately quarantined behind two
//! oracles in the test suite (the closed power formula and brute-force
//! associativity) before anything downstream is trusted.
#![allow(clippy::needless_range_loop)]

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fp::{self, FpVec4, SUPPORTED_PRIMES};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroupError {
    #[error("unsupported prime {0}: expected one of 2, 3, 5")]
    UnsupportedPrime(u8),
    #[error("lambda ({0}, {1}) is not admissible: expected (1,0) or (x,1) with 0 <= x < p")]
    InadmissibleLambda(u8, u8),
    #[error("exponent {0} out of range for modulus {1}")]
    ExponentOutOfRange(u8, u8),
    #[error("malformed element literal {0:?}: expected \"k1,k2,l1,l2|r1,r2,r3,r4\"")]
    MalformedElement(String),
    #[error("member set is not closed under the group operations")]
    NotASubgroup,
}

/// The prime p and the parameter pair lambda selecting one group of the
/// family. Admissible values are (1,0) and (x,1) for 0 <= x < p, giving the
/// p+1 pairwise non-isomorphic groups of order p^8.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GroupParams {
    p: u8,
    lambda: (u8, u8),
}

impl GroupParams {
    pub fn new(p: u8, lambda: (u8, u8)) -> Result<Self, GroupError> {
        if !SUPPORTED_PRIMES.contains(&p) {
            return Err(GroupError::UnsupportedPrime(p));
        }
        let admissible = lambda == (1, 0) || (lambda.1 == 1 && lambda.0 < p);
        if !admissible {
            return Err(GroupError::InadmissibleLambda(lambda.0, lambda.1));
        }
        Ok(Self { p, lambda })
    }

    pub fn p(self) -> u8 {
        self.p
    }

    pub fn lambda(self) -> (u8, u8) {
        self.lambda
    }

    /// Group order p^8.
    pub fn order(self) -> u64 {
        (self.p as u64).pow(8)
    }

    /// The p+1 admissible parameter pairs for a prime.
    pub fn admissible_lambdas(p: u8) -> Vec<(u8, u8)> {
        let mut out = vec![(1, 0)];
        out.extend((0..p).map(|x| (x, 1)));
        out
    }

    /// All groups of the family at one prime.
    pub fn families(p: u8) -> Result<Vec<GroupParams>, GroupError> {
        Self::admissible_lambdas(p)
            .into_iter()
            .map(|lambda| GroupParams::new(p, lambda))
            .collect()
    }

    /// Coordinates of `g^p` in the commutator basis, for generator index
    /// 0..=3 (a1, a2, b1, b2). Read off the defining relations.
    pub(crate) fn pth_power_vector(self, generator: usize) -> [u8; 4] {
        match generator {
            0 => [1, 0, 0, 0],
            1 => [self.lambda.0, self.lambda.1, 0, 0],
            2 => [0, 0, 1, 1],
            3 => [0, 0, 0, 1],
            _ => unreachable!("generator index out of range"),
        }
    }

    fn assert_same(self, other: GroupParams) {
        assert_eq!(self, other, "mixed group parameters");
    }
}

/// Group element in normal form: generator exponents (k1, k2, l1, l2) and
/// central exponents (r1, r2, r3, r4) with r1 on [a1,b1], r2 on [a1,b2],
/// r3 on [a2,b1], r4 on [a2,b2]. Two elements are equal iff all eight
/// exponents agree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Element {
    params: GroupParams,
    gen: [u8; 4],
    cen: [u8; 4],
}

impl Element {
    pub fn new(params: GroupParams, gen: [u8; 4], cen: [u8; 4]) -> Result<Self, GroupError> {
        for &v in gen.iter().chain(cen.iter()) {
            if v >= params.p {
                return Err(GroupError::ExponentOutOfRange(v, params.p));
            }
        }
        Ok(Self { params, gen, cen })
    }

    pub(crate) fn from_raw(params: GroupParams, gen: [u8; 4], cen: [u8; 4]) -> Self {
        debug_assert!(gen.iter().chain(cen.iter()).all(|&v| v < params.p));
        Self { params, gen, cen }
    }

    pub fn identity(params: GroupParams) -> Self {
        Self { params, gen: [0; 4], cen: [0; 4] }
    }

    /// The four generators a1, a2, b1, b2.
    pub fn generators(params: GroupParams) -> [Element; 4] {
        let mut out = [Self::identity(params); 4];
        for (i, e) in out.iter_mut().enumerate() {
            e.gen[i] = 1;
        }
        out
    }

    /// A central element with the given commutator-basis coordinates.
    pub fn central(params: GroupParams, cen: [u8; 4]) -> Result<Self, GroupError> {
        Self::new(params, [0; 4], cen)
    }

    pub fn params(self) -> GroupParams {
        self.params
    }

    /// Generator exponents (k1, k2, l1, l2).
    pub fn gen_part(self) -> [u8; 4] {
        self.gen
    }

    /// Central exponents (r1, r2, r3, r4).
    pub fn central_part(self) -> [u8; 4] {
        self.cen
    }

    /// Image in the central quotient, as a vector over F_p.
    pub fn gen_vector(self) -> FpVec4 {
        FpVec4::from_raw(self.params.p, self.gen)
    }

    pub fn central_vector(self) -> FpVec4 {
        FpVec4::from_raw(self.params.p, self.cen)
    }

    pub fn is_identity(self) -> bool {
        self.gen == [0; 4] && self.cen == [0; 4]
    }

    /// Central iff all generator exponents vanish.
    pub fn is_central(self) -> bool {
        self.gen == [0; 4]
    }

    /// Collection product. Writing `self = A_e B_e Z_e` and
    /// `other = A_f B_f Z_f` with A the a-part, B the b-part and Z central:
    ///
    /// 1. moving A_f left past B_e multiplies in
    ///    `[a_i, b_j]^(-l_j(e) k_i(f))` for every pair (i, j), since
    ///    `b_j a_i = a_i b_j [a_i,b_j]^(-1)`;
    /// 2. generator exponents add; every carry past p adds the p-th-power
    ///    vector of that generator to the central part;
    /// 3. central exponents add (the center is elementary abelian).
    pub fn multiply(self, other: Element) -> Element {
        self.params.assert_same(other.params);
        let p = self.params.p;
        let mut cen = [0i16; 4];
        for i in 0..4 {
            cen[i] = self.cen[i] as i16 + other.cen[i] as i16;
        }
        // (1) central correction for the exchange of b-part and a-part.
        cen[0] -= self.gen[2] as i16 * other.gen[0] as i16; // [a1,b1]: l1 * K1
        cen[1] -= self.gen[3] as i16 * other.gen[0] as i16; // [a1,b2]: l2 * K1
        cen[2] -= self.gen[2] as i16 * other.gen[1] as i16; // [a2,b1]: l1 * K2
        cen[3] -= self.gen[3] as i16 * other.gen[1] as i16; // [a2,b2]: l2 * K2
        // (2) exponent sums with p-th-power carries.
        let mut gen = [0u8; 4];
        for i in 0..4 {
            let total = self.gen[i] as u16 + other.gen[i] as u16;
            gen[i] = (total % p as u16) as u8;
            if total >= p as u16 {
                let vec = self.params.pth_power_vector(i);
                for j in 0..4 {
                    cen[j] += vec[j] as i16;
                }
            }
        }
        let cen = cen.map(|v| v.rem_euclid(p as i16) as u8);
        Element { params: self.params, gen, cen }
    }

    /// Inverse via the closed formula: negate the generator exponents, then
    /// cancel whatever central residue the collection produces. Certified
    /// against an exhaustive search oracle in the tests.
    pub fn inverse(self) -> Element {
        let p = self.params.p;
        let gen = self.gen.map(|v| fp::sub_mod(0, v, p));
        let bare = Element { params: self.params, gen, cen: [0; 4] };
        let residue = self.multiply(bare);
        debug_assert!(residue.is_central());
        let cen = residue.cen.map(|v| fp::sub_mod(0, v, p));
        Element { params: self.params, gen, cen }
    }

    /// n-th power by square-and-multiply; the iterated-multiplication oracle
    /// for [`Element::power_formula`].
    pub fn power(self, n: u64) -> Element {
        let mut acc = Element::identity(self.params);
        let mut base = self;
        let mut n = n;
        while n > 0 {
            if n & 1 == 1 {
                acc = acc.multiply(base);
            }
            base = base.multiply(base);
            n >>= 1;
        }
        acc
    }

    /// Closed-form n-th power. For a coset representative the normal form of
    /// the n-th power carries the central factor `[a_i,b_j]^(-T k_i l_j)`
    /// with T the (n-1)-th triangle number; reducing the generator exponent
    /// `n k` into `[0, p)` additionally carries `floor(nk/p)` copies of the
    /// p-th-power vector, and a central factor is simply raised to the n-th
    /// power.
    pub fn power_formula(self, n: u64) -> Element {
        let params = self.params;
        let p = params.p as u64;
        if n == 0 {
            return Element::identity(params);
        }
        let triangle = ((n as u128 * (n as u128 - 1)) / 2 % p as u128) as i16;
        let mut cen = [0i16; 4];
        // central part of self, raised to the n-th power
        for i in 0..4 {
            cen[i] += ((n % p) as i16) * self.cen[i] as i16;
        }
        // triangle-number correction from collecting the n copies
        let [k1, k2, l1, l2] = self.gen.map(|v| v as i16);
        cen[0] -= triangle * k1 * l1;
        cen[1] -= triangle * k1 * l2;
        cen[2] -= triangle * k2 * l1;
        cen[3] -= triangle * k2 * l2;
        // exponent reduction with p-th-power carries
        let mut gen = [0u8; 4];
        for i in 0..4 {
            let total = n as u128 * self.gen[i] as u128;
            gen[i] = (total % p as u128) as u8;
            let carries = ((total / p as u128) % p as u128) as i16;
            let vec = params.pth_power_vector(i);
            for j in 0..4 {
                cen[j] += carries * vec[j] as i16;
            }
        }
        let cen = cen.map(|v| v.rem_euclid(params.p as i16) as u8);
        Element { params, gen, cen }
    }

    /// `[x, y] = x^-1 y^-1 x y`.
    pub fn commutator(self, other: Element) -> Element {
        self.inverse().multiply(other.inverse()).multiply(self).multiply(other)
    }

    /// Order of the element; always divides p^2.
    pub fn element_order(self) -> u64 {
        let p = self.params.p as u64;
        if self.is_identity() {
            return 1;
        }
        if self.power(p).is_identity() {
            return p;
        }
        debug_assert!(self.power(p * p).is_identity());
        p * p
    }

    /// Conjugate `other^-1 * self * other`.
    pub fn conjugate_by(self, other: Element) -> Element {
        other.inverse().multiply(self).multiply(other)
    }

    /// Canonical index in `[0, p^8)`, digits (k1,k2,l1,l2,r1..r4) base p.
    pub fn index(self) -> u64 {
        let p = self.params.p as u64;
        let mut ix = 0u64;
        for v in self.gen.iter().chain(self.cen.iter()) {
            ix = ix * p + *v as u64;
        }
        ix
    }

    pub fn from_index(params: GroupParams, ix: u64) -> Element {
        let p = params.p as u64;
        debug_assert!(ix < params.order());
        let mut digits = [0u8; 8];
        let mut rest = ix;
        for slot in (0..8).rev() {
            digits[slot] = (rest % p) as u8;
            rest /= p;
        }
        let gen = [digits[0], digits[1], digits[2], digits[3]];
        let cen = [digits[4], digits[5], digits[6], digits[7]];
        Element { params, gen, cen }
    }

    /// Parse the canonical text form with the modulus taken from `params`.
    pub fn parse(params: GroupParams, s: &str) -> Result<Element, GroupError> {
        let bad = || GroupError::MalformedElement(s.to_string());
        let (gen_s, cen_s) = s.trim().split_once('|').ok_or_else(bad)?;
        let parse4 = |part: &str| -> Result<[u8; 4], GroupError> {
            let vals: Vec<u8> = part
                .split(',')
                .map(|t| t.trim().parse::<u8>().map_err(|_| bad()))
                .collect::<Result<_, _>>()?;
            vals.try_into().map_err(|_| bad())
        };
        Element::new(params, parse4(gen_s)?, parse4(cen_s)?)
    }
}

impl fmt::Display for Element {
    /// Canonical text form `k1,k2,l1,l2|r1,r2,r3,r4`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{},{},{},{}|{},{},{},{}",
            self.gen[0], self.gen[1], self.gen[2], self.gen[3],
            self.cen[0], self.cen[1], self.cen[2], self.cen[3],
        )
    }
}

/// All p^8 elements in canonical index order.
pub fn all_elements(params: GroupParams) -> impl Iterator<Item = Element> {
    (0..params.order()).map(move |ix| Element::from_index(params, ix))
}

/// The p^4 coset representatives of the center: elements with zero central
/// part, in lexicographic order of the generator exponents.
pub fn coset_reps(params: GroupParams) -> Vec<Element> {
    FpVec4::iter_all(params.p)
        .map(|v| Element::from_raw(params, v.entries(), [0; 4]))
        .collect()
}

/// The linear map the p-th power induces on exponent tuples for odd p:
/// `(k1, k2, l1, l2) -> (k1 + l1*k2, l2*k2, l1, l1 + l2)` with
/// lambda = (l1, l2). Bijective iff lambda_2 is nonzero.
pub fn pth_power_image(params: GroupParams, v: FpVec4) -> FpVec4 {
    assert_eq!(v.modulus(), params.p, "mixed moduli");
    let p = params.p;
    let (lam1, lam2) = params.lambda;
    let [k1, k2, l1, l2] = v.entries();
    FpVec4::from_raw(
        p,
        [
            fp::add_mod(k1, fp::mul_mod(lam1, k2, p), p),
            fp::mul_mod(lam2, k2, p),
            l1,
            fp::add_mod(l1, l2, p),
        ],
    )
}

/// Commuting criterion for two coset representatives given by exponent
/// tuples (k1,k2,l1,l2) and (K1,K2,L1,L2): they commute iff
/// `k1 L1 = l1 K1, k1 L2 = l2 K1, k2 L1 = l1 K2, k2 L2 = l2 K2`.
/// Equivalent to the commutator of the representatives being trivial.
pub fn commute_criterion(params: GroupParams, v: FpVec4, w: FpVec4) -> bool {
    let p = params.p;
    let [k1, k2, l1, l2] = v.entries();
    let [uk1, uk2, ul1, ul2] = w.entries();
    fp::mul_mod(k1, ul1, p) == fp::mul_mod(l1, uk1, p)
        && fp::mul_mod(k1, ul2, p) == fp::mul_mod(l2, uk1, p)
        && fp::mul_mod(k2, ul1, p) == fp::mul_mod(l1, uk2, p)
        && fp::mul_mod(k2, ul2, p) == fp::mul_mod(l2, uk2, p)
}

/// A subgroup stored as an explicit sorted member list. The groups are tiny,
/// so clarity beats cleverness; construction always re-verifies closure.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Subgroup {
    params: GroupParams,
    members: Vec<Element>,
    generators: Vec<Element>,
}

impl Subgroup {
    /// Closure of a generating set.
    pub fn generated_by(params: GroupParams, generators: &[Element]) -> Subgroup {
        let mut members = std::collections::BTreeSet::new();
        members.insert(Element::identity(params));
        let mut frontier = vec![Element::identity(params)];
        while let Some(x) = frontier.pop() {
            for &g in generators {
                params.assert_same(g.params());
                for y in [x.multiply(g), x.multiply(g.inverse())] {
                    if members.insert(y) {
                        frontier.push(y);
                    }
                }
            }
        }
        Subgroup {
            params,
            members: members.into_iter().collect(),
            generators: generators.to_vec(),
        }
    }

    /// Wrap an explicit member set, verifying that it really is a subgroup:
    /// a greedy generating set is extracted and its closure must reproduce
    /// the set exactly.
    pub fn from_member_set(
        params: GroupParams,
        members: Vec<Element>,
    ) -> Result<Subgroup, GroupError> {
        let mut sorted = members;
        sorted.sort_unstable();
        sorted.dedup();
        let mut generators: Vec<Element> = Vec::new();
        let mut closure = Subgroup::generated_by(params, &generators);
        for &m in &sorted {
            if !closure.contains(m) {
                generators.push(m);
                closure = Subgroup::generated_by(params, &generators);
            }
        }
        if closure.members == sorted {
            Ok(Subgroup { params, members: sorted, generators })
        } else {
            Err(GroupError::NotASubgroup)
        }
    }

    pub fn params(&self) -> GroupParams {
        self.params
    }

    pub fn members(&self) -> &[Element] {
        &self.members
    }

    pub fn generators(&self) -> &[Element] {
        &self.generators
    }

    pub fn order(&self) -> usize {
        self.members.len()
    }

    pub fn contains(&self, e: Element) -> bool {
        self.members.binary_search(&e).is_ok()
    }

    pub fn is_subset_of(&self, other: &Subgroup) -> bool {
        self.members.iter().all(|&m| other.contains(m))
    }

    /// Normal iff closed under conjugation by the four generators.
    pub fn is_normal(&self) -> bool {
        let gens = Element::generators(self.params);
        self.members
            .iter()
            .all(|&m| gens.iter().all(|&g| self.contains(m.conjugate_by(g))))
    }
}

/// The center: all elements with trivial generator part, order p^4,
/// generated by the four basis commutators.
pub fn center(params: GroupParams) -> Subgroup {
    let members = FpVec4::iter_all(params.p)
        .map(|v| Element::from_raw(params, [0; 4], v.entries()))
        .collect();
    let generators = (0..4)
        .map(|i| {
            let mut cen = [0u8; 4];
            cen[i] = 1;
            Element::from_raw(params, [0; 4], cen)
        })
        .collect();
    Subgroup { params, members, generators }
}

/// The set of elements of order dividing p. For every group of the family
/// this set is already a subgroup (construction verifies it).
pub fn omega1(params: GroupParams) -> Subgroup {
    let p = params.p as u64;
    let members: Vec<Element> =
        all_elements(params).filter(|e| e.power(p).is_identity()).collect();
    Subgroup::from_member_set(params, members)
        .expect("elements of order dividing p form a subgroup in this family")
}

/// Cyclic subgroup generated by one element.
pub fn cyclic(e: Element) -> Subgroup {
    Subgroup::generated_by(e.params(), &[e])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SplitMix64;

    fn params(p: u8, lambda: (u8, u8)) -> GroupParams {
        GroupParams::new(p, lambda).unwrap()
    }

    #[test]
    fn admissible_lambdas_match_family_size() {
        for p in [2u8, 3, 5] {
            let fams = GroupParams::families(p).unwrap();
            assert_eq!(fams.len(), p as usize + 1);
        }
        assert!(GroupParams::new(3, (2, 2)).is_err());
        assert!(GroupParams::new(3, (0, 0)).is_err());
        assert!(GroupParams::new(7, (1, 0)).is_err());
    }

    #[test]
    fn multiply_examples() {
        // a1 * a1 = [a1,b1] at p = 2.
        for lambda in GroupParams::admissible_lambdas(2) {
            let pr = params(2, lambda);
            let [a1, _, _, _] = Element::generators(pr);
            assert_eq!(a1.multiply(a1), Element::central(pr, [1, 0, 0, 0]).unwrap());
        }
        // b1 * a1 = a1 b1 [a1,b1]^-1 at p = 3.
        let pr = params(3, (0, 1));
        let [a1, _, b1, _] = Element::generators(pr);
        assert_eq!(b1.multiply(a1), Element::new(pr, [1, 0, 1, 0], [2, 0, 0, 0]).unwrap());
        // e * identity = e for every element at p = 3.
        let id = Element::identity(pr);
        for e in all_elements(pr) {
            assert_eq!(e.multiply(id), e);
            assert_eq!(id.multiply(e), e);
        }
    }

    #[test]
    fn inverse_against_exhaustive_search() {
        // Find the unique right inverse by linear search and compare with
        // the closed form, for every generator at p = 2 and 3.
        for (p, lambda) in [(2u8, (0u8, 1u8)), (2, (1, 0)), (3, (0, 1)), (3, (1, 0))] {
            let pr = params(p, lambda);
            let id = Element::identity(pr);
            for g in Element::generators(pr) {
                let found: Vec<Element> =
                    all_elements(pr).filter(|&x| g.multiply(x) == id).collect();
                assert_eq!(found.len(), 1);
                assert_eq!(found[0], g.inverse());
            }
        }
        // Closed form is a two-sided inverse for every element at p = 2, 3.
        for p in [2u8, 3] {
            for lambda in GroupParams::admissible_lambdas(p) {
                let pr = params(p, lambda);
                let id = Element::identity(pr);
                for e in all_elements(pr) {
                    assert_eq!(e.multiply(e.inverse()), id);
                    assert_eq!(e.inverse().multiply(e), id);
                }
            }
        }
    }

    #[test]
    fn power_examples() {
        let pr = params(3, (0, 1));
        let [a1, _, b1, _] = Element::generators(pr);
        assert_eq!(a1.power(0), Element::identity(pr));
        // Non-central elements have order p^2 when lambda_2 != 0 and p odd.
        assert_eq!(a1.power(9), Element::identity(pr));
        assert_ne!(a1.power(3), Element::identity(pr));
        // (a1 b1)^2 = a1^2 b1^2 [a1,b1]^-1.
        let e = a1.multiply(b1);
        assert_eq!(e.power(2), Element::new(pr, [2, 0, 2, 0], [2, 0, 0, 0]).unwrap());
    }

    #[test]
    fn power_formula_matches_power() {
        // Exhaustive at p = 2 and 3 over all elements and n in [0, p^2];
        // this is the oracle that certifies the collection rule.
        for p in [2u8, 3] {
            for lambda in GroupParams::admissible_lambdas(p) {
                let pr = params(p, lambda);
                for e in all_elements(pr) {
                    for n in 0..=(p as u64 * p as u64) {
                        assert_eq!(e.power_formula(n), e.power(n), "e={e} n={n}");
                    }
                }
            }
        }
        // Seeded samples at p = 5, including exponents past p^2.
        let mut rng = SplitMix64::new(0x5EED);
        for lambda in GroupParams::admissible_lambdas(5) {
            let pr = params(5, lambda);
            for _ in 0..20_000 {
                let e = Element::from_index(pr, rng.below(pr.order()));
                let n = rng.below(60);
                assert_eq!(e.power_formula(n), e.power(n), "e={e} n={n}");
            }
        }
    }

    #[test]
    fn power_formula_examples() {
        // (a1 a2 b1 b2)^3 at p = 3, lambda = (1,1).
        let pr = params(3, (1, 1));
        let e = Element::new(pr, [1, 1, 1, 1], [0; 4]).unwrap();
        assert_eq!(e.power_formula(3), Element::central(pr, [2, 1, 1, 2]).unwrap());
        // Central elements: z^n = z^(n mod p).
        let z = Element::central(pr, [1, 2, 0, 1]).unwrap();
        for n in 0..20 {
            assert_eq!(z.power_formula(n), z.power(n % 3));
        }
    }

    #[test]
    fn pth_power_image_examples() {
        let pr = params(3, (1, 1));
        let v = FpVec4::new(3, [1, 1, 1, 1]).unwrap();
        assert_eq!(pth_power_image(pr, v), FpVec4::new(3, [2, 1, 1, 2]).unwrap());
        assert!(pth_power_image(pr, FpVec4::zero(3)).is_zero());
        // lambda = (1,0): a1 a2^2 is sent to zero, so a1 a2^-1 has order p.
        let pr10 = params(3, (1, 0));
        let v = FpVec4::new(3, [1, 2, 0, 0]).unwrap();
        assert!(pth_power_image(pr10, v).is_zero());
    }

    #[test]
    fn pth_power_image_bijective_iff_lambda2_nonzero() {
        for p in [3u8, 5] {
            for lambda in GroupParams::admissible_lambdas(p) {
                let pr = params(p, lambda);
                let images: std::collections::BTreeSet<FpVec4> =
                    FpVec4::iter_all(p).map(|v| pth_power_image(pr, v)).collect();
                let bijective = images.len() == (p as usize).pow(4);
                assert_eq!(bijective, lambda.1 != 0, "p={p} lambda={lambda:?}");
            }
        }
    }

    #[test]
    fn pth_power_image_agrees_with_actual_pth_powers_for_odd_p() {
        for p in [3u8, 5] {
            for lambda in GroupParams::admissible_lambdas(p) {
                let pr = params(p, lambda);
                for rep in coset_reps(pr) {
                    let by_formula = pth_power_image(pr, rep.gen_vector());
                    let actual = rep.power(p as u64);
                    assert!(actual.is_central());
                    assert_eq!(actual.central_vector(), by_formula);
                }
            }
        }
    }

    #[test]
    fn commutator_examples() {
        let pr = params(3, (0, 1));
        let [a1, a2, b1, b2] = Element::generators(pr);
        assert!(a1.commutator(a2).is_identity());
        assert!(b1.commutator(b2).is_identity());
        assert_eq!(a1.commutator(b1), Element::central(pr, [1, 0, 0, 0]).unwrap());
        assert_eq!(a1.commutator(b2), Element::central(pr, [0, 1, 0, 0]).unwrap());
        assert_eq!(a2.commutator(b1), Element::central(pr, [0, 0, 1, 0]).unwrap());
        assert_eq!(a2.commutator(b2), Element::central(pr, [0, 0, 0, 1]).unwrap());
        assert_eq!(Element::identity(pr).element_order(), 1);
    }

    #[test]
    fn commute_criterion_examples() {
        let pr = params(3, (0, 1));
        let v = FpVec4::new(3, [1, 0, 0, 0]).unwrap();
        assert!(commute_criterion(pr, v, v));
        let w = FpVec4::new(3, [0, 0, 1, 0]).unwrap();
        assert!(!commute_criterion(pr, v, w));
        // Proportional tuples commute.
        let x = FpVec4::new(3, [1, 1, 0, 0]).unwrap();
        let y = FpVec4::new(3, [2, 2, 0, 0]).unwrap();
        assert!(commute_criterion(pr, x, y));
    }

    #[test]
    fn commute_criterion_is_commutator_triviality() {
        // Exhaustive over all p^4 x p^4 representative pairs at p = 3.
        for lambda in GroupParams::admissible_lambdas(3) {
            let pr = params(3, lambda);
            let reps = coset_reps(pr);
            for &x in &reps {
                for &y in &reps {
                    let by_form = commute_criterion(pr, x.gen_vector(), y.gen_vector());
                    assert_eq!(by_form, x.commutator(y).is_identity());
                }
            }
        }
    }

    #[test]
    fn center_is_derived_subgroup() {
        for (p, lambda) in [(2u8, (1u8, 1u8)), (3, (1, 0)), (3, (2, 1))] {
            let pr = params(p, lambda);
            let z = center(pr);
            assert_eq!(z.order(), (p as usize).pow(4));
            // Derived subgroup: closure of the commutators of the generators.
            let gens = Element::generators(pr);
            let mut comms = Vec::new();
            for &x in &gens {
                for &y in &gens {
                    comms.push(x.commutator(y));
                }
            }
            let derived = Subgroup::generated_by(pr, &comms);
            assert_eq!(derived.members(), z.members());
            // Central elements commute with everything.
            let all: Vec<Element> = all_elements(pr).collect();
            for &c in z.members() {
                assert!(c.is_central());
                for &x in all.iter().step_by(7) {
                    assert_eq!(c.multiply(x), x.multiply(c));
                }
            }
        }
    }

    #[test]
    fn omega1_examples() {
        // lambda_2 != 0, p odd: omega1 is exactly the center.
        let pr = params(3, (0, 1));
        let om = omega1(pr);
        assert_eq!(om.order(), 81);
        assert_eq!(om.members(), center(pr).members());

        // lambda = (1,0): omega1 = <center, a1 a2^-1>, order p^5.
        let pr10 = params(3, (1, 0));
        let om10 = omega1(pr10);
        assert_eq!(om10.order(), 243);
        let [a1, a2, _, _] = Element::generators(pr10);
        let w = a1.multiply(a2.inverse());
        let mut gens = center(pr10).generators().to_vec();
        gens.push(w);
        assert_eq!(Subgroup::generated_by(pr10, &gens).members(), om10.members());

        // (2, (1,1)): omega1 = <center, a1 a2 b2>, order 32.
        let pr11 = params(2, (1, 1));
        let om11 = omega1(pr11);
        assert_eq!(om11.order(), 32);
        let [a1, a2, _, b2] = Element::generators(pr11);
        let u = a1.multiply(a2).multiply(b2);
        let mut gens = center(pr11).generators().to_vec();
        gens.push(u);
        assert_eq!(Subgroup::generated_by(pr11, &gens).members(), om11.members());
    }

    #[test]
    fn non_central_elements_have_order_p_squared_for_lambda2_nonzero() {
        // Spot version of the order lemma at one family; the acceptance
        // suite runs all three lambda families exhaustively.
        let pr = params(3, (1, 1));
        let mut non_central = 0u32;
        for e in all_elements(pr) {
            if !e.is_central() {
                non_central += 1;
                assert_eq!(e.element_order(), 9);
            }
        }
        assert_eq!(non_central, 6561 - 81);
    }

    #[test]
    fn cyclic_subgroup_and_order() {
        let pr = params(3, (1, 0));
        let [a1, a2, _, _] = Element::generators(pr);
        let w = a1.multiply(a2.inverse());
        assert_eq!(w.element_order(), 3);
        assert_eq!(cyclic(w).order(), 3);
        assert_eq!(a1.element_order(), 9);
        assert_eq!(cyclic(a1).order(), 9);
    }

    #[test]
    fn subgroup_member_set_rejects_non_subgroups() {
        let pr = params(2, (0, 1));
        let [a1, _, b1, _] = Element::generators(pr);
        let bad = vec![Element::identity(pr), a1, b1];
        assert_eq!(Subgroup::from_member_set(pr, bad), Err(GroupError::NotASubgroup));
    }

    #[test]
    fn element_text_round_trip() {
        let pr = params(5, (2, 1));
        let e = Element::new(pr, [1, 4, 0, 3], [2, 0, 1, 4]).unwrap();
        assert_eq!(e.to_string(), "1,4,0,3|2,0,1,4");
        assert_eq!(Element::parse(pr, &e.to_string()).unwrap(), e);
        assert!(Element::parse(pr, "1,2,3|0,0,0,0").is_err());
        assert!(Element::parse(pr, "9,0,0,0|0,0,0,0").is_err());
    }

    #[test]
    fn associativity_sampled() {
        // Full 256^3 exhaustion lives in the acceptance suite; here a seeded
        // sample per family guards day-to-day edits.
        let mut rng = SplitMix64::new(0xA550C);
        for p in [2u8, 3, 5] {
            for lambda in GroupParams::admissible_lambdas(p) {
                let pr = params(p, lambda);
                for _ in 0..20_000 {
                    let x = Element::from_index(pr, rng.below(pr.order()));
                    let y = Element::from_index(pr, rng.below(pr.order()));
                    let z = Element::from_index(pr, rng.below(pr.order()));
                    assert_eq!(x.multiply(y).multiply(z), x.multiply(y.multiply(z)));
                }
            }
        }
    }
}
