//! Endomorphisms of G(p, lambda), given by validated images of the four
//! generators.
//!
//! A generator map extends to an endomorphism iff the defining relators hold
//! on the images; class-2 closure is automatic because the ambient group has
//! class 2. Everything else is built from that: evaluation via the normal
//! form, composition, the pointwise sum with a center-valued endomorphism,
//! the central automorphisms `x -> x * f(x)`, and the unique decomposition of
//! an endomorphism into a normalized part plus a center-valued part.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fp::FpMat4;
use crate::jk::{Element, GroupError, GroupParams, Subgroup};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EndoError {
    #[error("generator images use mixed group parameters")]
    MixedParams,
    #[error("relation {0} fails on the generator images")]
    RelationFails(&'static str),
    #[error("pointwise sum requires a center-valued second summand")]
    NonCentralSummand,
    #[error("images carry a nonzero central part")]
    NotNormalized,
    #[error("malformed endomorphism literal {0:?}: expected four ';'-separated elements")]
    MalformedEndo(String),
    #[error(transparent)]
    Group(#[from] GroupError),
}

/// Prospective images of a1, a2, b1, b2, not yet validated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GenImages {
    pub g: [Element; 4],
}

impl GenImages {
    pub fn new(g: [Element; 4]) -> Result<Self, EndoError> {
        let params = g[0].params();
        if g.iter().any(|img| img.params() != params) {
            return Err(EndoError::MixedParams);
        }
        Ok(Self { g })
    }

    pub fn params(&self) -> GroupParams {
        self.g[0].params()
    }

    /// The six relator checks. The `g^p = [..]` instances follow the
    /// defining relations with the generators replaced by their images.
    pub fn validate(&self) -> Result<(), EndoError> {
        let params = self.params();
        let p = params.p() as u64;
        let (lam1, lam2) = params.lambda();
        let [g1, g2, g3, g4] = self.g;
        if !g1.commutator(g2).is_identity() {
            return Err(EndoError::RelationFails("[g1,g2] = 1"));
        }
        if !g3.commutator(g4).is_identity() {
            return Err(EndoError::RelationFails("[g3,g4] = 1"));
        }
        if g1.power(p) != g1.commutator(g3) {
            return Err(EndoError::RelationFails("g1^p = [g1,g3]"));
        }
        let g3l_g4l = g3.power(lam1 as u64).multiply(g4.power(lam2 as u64));
        if g2.power(p) != g1.commutator(g3l_g4l) {
            return Err(EndoError::RelationFails("g2^p = [g1, g3^l1 g4^l2]"));
        }
        if g3.power(p) != g2.commutator(g3.multiply(g4)) {
            return Err(EndoError::RelationFails("g3^p = [g2, g3 g4]"));
        }
        if g4.power(p) != g2.commutator(g4) {
            return Err(EndoError::RelationFails("g4^p = [g2, g4]"));
        }
        Ok(())
    }
}

/// A homomorphism G -> center, encoded by the 4x4 matrix whose column j
/// holds the coordinates of the image of the j-th generator in the
/// commutator basis. Every matrix is a valid central homomorphism because
/// both the center and the central quotient are elementary abelian of rank
/// four.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CentralHom {
    mat: FpMat4,
}

#[allow(clippy::should_implement_trait)]
impl CentralHom {
    pub fn new(mat: FpMat4) -> Self {
        Self { mat }
    }

    pub fn zero(p: u8) -> Self {
        Self { mat: FpMat4::zero(p) }
    }

    /// Sends generator `j` to the basis commutator numbered `i`.
    pub fn elementary(p: u8, i: usize, j: usize) -> Self {
        Self { mat: FpMat4::elementary(p, i, j) }
    }

    pub fn matrix(self) -> FpMat4 {
        self.mat
    }

    pub fn modulus(self) -> u8 {
        self.mat.modulus()
    }

    pub fn add(self, other: CentralHom) -> CentralHom {
        Self { mat: self.mat.add(other.mat) }
    }

    pub fn neg(self) -> CentralHom {
        Self { mat: self.mat.neg() }
    }

    pub fn is_zero(self) -> bool {
        self.mat.is_zero()
    }

    /// Evaluate at an arbitrary element. The central part of `x` is killed
    /// (the image is abelian and the center is the derived subgroup), so the
    /// value depends only on the image of `x` in the central quotient.
    pub fn apply(self, x: Element) -> Element {
        let coords = self.mat.mul_vec(x.gen_vector());
        Element::central(x.params(), coords.entries()).expect("reduced coordinates")
    }

    /// The endomorphism with these generator images.
    pub fn to_endo(self, params: GroupParams) -> Endo {
        assert_eq!(params.p(), self.mat.modulus(), "mixed moduli");
        let images = std::array::from_fn(|j| {
            Element::central(params, self.mat.col(j).entries()).expect("reduced coordinates")
        });
        Endo::new(GenImages { g: images }).expect("central maps always extend")
    }

    /// 16-digit row-major serialization.
    pub fn digits(self) -> String {
        self.mat.digits()
    }
}

/// A validated endomorphism. Equality is equality of generator images:
/// generators generate and normal forms are canonical.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Endo {
    images: [Element; 4],
}

impl Endo {
    pub fn new(images: GenImages) -> Result<Self, EndoError> {
        images.validate()?;
        Ok(Self { images: images.g })
    }

    /// For callers that produce images already known to satisfy the
    /// relations; still fully checked in debug builds.
    pub(crate) fn from_validated(images: [Element; 4]) -> Self {
        debug_assert!(GenImages { g: images }.validate().is_ok());
        Self { images }
    }

    pub fn identity(params: GroupParams) -> Self {
        Self { images: Element::generators(params) }
    }

    /// The trivial endomorphism, every image the identity element.
    pub fn zero(params: GroupParams) -> Self {
        Self { images: [Element::identity(params); 4] }
    }

    pub fn params(&self) -> GroupParams {
        self.images[0].params()
    }

    pub fn images(&self) -> &[Element; 4] {
        &self.images
    }

    /// Evaluate at `x` by reading off its normal form:
    /// `g1^k1 g2^k2 g3^l1 g4^l2 [g1,g3]^r1 [g1,g4]^r2 [g2,g3]^r3 [g2,g4]^r4`.
    pub fn apply(&self, x: Element) -> Element {
        let [g1, g2, g3, g4] = self.images;
        let [k1, k2, l1, l2] = x.gen_part().map(|v| v as u64);
        let [r1, r2, r3, r4] = x.central_part().map(|v| v as u64);
        let mut out = g1.power_formula(k1);
        out = out.multiply(g2.power_formula(k2));
        out = out.multiply(g3.power_formula(l1));
        out = out.multiply(g4.power_formula(l2));
        out = out.multiply(g1.commutator(g3).power_formula(r1));
        out = out.multiply(g1.commutator(g4).power_formula(r2));
        out = out.multiply(g2.commutator(g3).power_formula(r3));
        out = out.multiply(g2.commutator(g4).power_formula(r4));
        out
    }

    /// `self` after `other`: `(self . other)(x) = self(other(x))`.
    pub fn compose(&self, other: &Endo) -> Endo {
        assert_eq!(self.params(), other.params(), "mixed group parameters");
        let images = other.images.map(|img| self.apply(img));
        Endo::from_validated(images)
    }

    /// Pointwise product with a center-valued endomorphism:
    /// `(self + c)(x) = self(x) c(x)`.
    pub fn pointwise_sum(&self, central: &Endo) -> Result<Endo, EndoError> {
        if !central.is_central_valued() {
            return Err(EndoError::NonCentralSummand);
        }
        let images = std::array::from_fn(|i| self.images[i].multiply(central.images[i]));
        Ok(Endo::from_validated(images))
    }

    /// Pointwise sum with a central homomorphism given as a matrix.
    pub fn add_hom(&self, f: CentralHom) -> Endo {
        let params = self.params();
        let images = std::array::from_fn(|j| {
            let shift = Element::central(params, f.matrix().col(j).entries())
                .expect("reduced coordinates");
            self.images[j].multiply(shift)
        });
        Endo::from_validated(images)
    }

    /// The map `x -> x * f(x)` for a central homomorphism f. Always an
    /// automorphism here: f inverts nothing but the identity because the
    /// center sits inside its kernel.
    pub fn star(params: GroupParams, f: CentralHom) -> Endo {
        Endo::identity(params).add_hom(f)
    }

    /// True iff every image is central.
    pub fn is_central_valued(&self) -> bool {
        self.images.iter().all(|img| img.is_central())
    }

    /// The matrix of a center-valued endomorphism.
    pub fn central_matrix(&self) -> Option<CentralHom> {
        if !self.is_central_valued() {
            return None;
        }
        let p = self.params().p();
        let cols = std::array::from_fn(|j| self.images[j].central_vector());
        Some(CentralHom::new(FpMat4::from_cols(p, cols)))
    }

    /// Matrix induced on the central quotient: column j is the exponent
    /// vector of the j-th generator image.
    pub fn abelianization_matrix(&self) -> FpMat4 {
        let p = self.params().p();
        FpMat4::from_cols(p, std::array::from_fn(|j| self.images[j].gen_vector()))
    }

    /// Surjective (hence bijective) iff the induced map on the central
    /// quotient is invertible; the center is the Frattini subgroup of these
    /// groups, so generating modulo it is generating.
    pub fn is_automorphism(&self) -> bool {
        self.abelianization_matrix().rank() == 4
    }

    /// Unique decomposition into a normalized endomorphism plus a central
    /// homomorphism: zero out the central part of every image and record the
    /// removed coordinates columnwise.
    pub fn normalize(&self) -> (NormalizedEndo, CentralHom) {
        let params = self.params();
        let p = params.p();
        let norm_images = self.images.map(strip_central_part);
        let cols = std::array::from_fn(|j| self.images[j].central_vector());
        let hom = CentralHom::new(FpMat4::from_cols(p, cols));
        let norm = NormalizedEndo::new(Endo::from_validated(norm_images))
            .expect("stripped images have zero central part");
        (norm, hom)
    }

    /// All generator images inside a subgroup (hence the whole image, since
    /// images of products are products of images).
    pub fn maps_into(&self, sub: &Subgroup) -> bool {
        self.images.iter().all(|&img| sub.contains(img))
    }

    /// The image subgroup, generated by the four generator images.
    pub fn image(&self) -> Subgroup {
        Subgroup::generated_by(self.params(), &self.images)
    }

    /// Parse the canonical `e1;e2;e3;e4` form and validate.
    pub fn parse(params: GroupParams, s: &str) -> Result<Endo, EndoError> {
        let parts: Vec<&str> = s.trim().split(';').collect();
        if parts.len() != 4 {
            return Err(EndoError::MalformedEndo(s.to_string()));
        }
        let mut images = [Element::identity(params); 4];
        for (slot, part) in images.iter_mut().zip(parts) {
            *slot = Element::parse(params, part)?;
        }
        Endo::new(GenImages::new(images)?)
    }
}

fn strip_central_part(img: Element) -> Element {
    Element::new(img.params(), img.gen_part(), [0; 4]).expect("exponents already reduced")
}

impl fmt::Display for Endo {
    /// Canonical text form: the four generator images joined by ';'.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{};{};{};{}",
            self.images[0], self.images[1], self.images[2], self.images[3]
        )
    }
}

/// An endomorphism whose generator images all have zero central part, i.e.
/// land in the canonical coset representatives of the center.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct NormalizedEndo(Endo);

impl NormalizedEndo {
    pub fn new(endo: Endo) -> Result<Self, EndoError> {
        if endo.images.iter().any(|img| img.central_part() != [0; 4]) {
            return Err(EndoError::NotNormalized);
        }
        Ok(Self(endo))
    }

    pub fn as_endo(&self) -> &Endo {
        &self.0
    }

    pub fn into_endo(self) -> Endo {
        self.0
    }

    pub fn params(&self) -> GroupParams {
        self.0.params()
    }

    pub fn is_identity_map(&self) -> bool {
        self.0 == Endo::identity(self.0.params())
    }

    pub fn is_zero_map(&self) -> bool {
        self.0 == Endo::zero(self.0.params())
    }
}

impl fmt::Display for NormalizedEndo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}
