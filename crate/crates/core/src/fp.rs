//! Exact arithmetic over the prime fields F_p for p in {2, 3, 5}, together
//! with the 4-vectors and 4x4 matrices the endomorphism machinery runs on.
//!
//! The modulus is carried per value so one binary serves every supported
//! prime; representatives are reduced to `[0, p)` immediately after every
//! operation, so derived equality is canonical equality. Mixing moduli in a
//! binary operation is a programming error and panics.
#![allow(clippy::needless_range_loop)] // indexed loops mirror the written linear algebra

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Primes the engine supports. Everything is sized for desk-scale work.
pub const SUPPORTED_PRIMES: [u8; 3] = [2, 3, 5];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FpError {
    #[error("unsupported modulus {0}: expected one of 2, 3, 5")]
    UnsupportedModulus(u8),
    #[error("zero has no multiplicative inverse")]
    ZeroInverse,
    #[error("matrix is singular")]
    Singular,
}

fn check_modulus(p: u8) -> Result<(), FpError> {
    if SUPPORTED_PRIMES.contains(&p) {
        Ok(())
    } else {
        Err(FpError::UnsupportedModulus(p))
    }
}

/// Reduce an integer into `[0, p)`.
#[inline]
pub(crate) fn reduce(v: i64, p: u8) -> u8 {
    (v.rem_euclid(p as i64)) as u8
}

#[inline]
pub(crate) fn add_mod(a: u8, b: u8, p: u8) -> u8 {
    let s = a as u16 + b as u16;
    (s % p as u16) as u8
}

#[inline]
pub(crate) fn sub_mod(a: u8, b: u8, p: u8) -> u8 {
    let s = a as i16 - b as i16;
    s.rem_euclid(p as i16) as u8
}

#[inline]
pub(crate) fn mul_mod(a: u8, b: u8, p: u8) -> u8 {
    ((a as u16 * b as u16) % p as u16) as u8
}

/// An element of F_p.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FpScalar {
    p: u8,
    value: u8,
}

#[allow(clippy::should_implement_trait)]
impl FpScalar {
    pub fn new(p: u8, value: i64) -> Result<Self, FpError> {
        check_modulus(p)?;
        Ok(Self { p, value: reduce(value, p) })
    }

    pub fn zero(p: u8) -> Self {
        Self::new(p, 0).expect("supported modulus")
    }

    pub fn one(p: u8) -> Self {
        Self::new(p, 1).expect("supported modulus")
    }

    pub fn value(self) -> u8 {
        self.value
    }

    pub fn modulus(self) -> u8 {
        self.p
    }

    pub fn is_zero(self) -> bool {
        self.value == 0
    }

    fn same_modulus(self, other: Self) {
        assert_eq!(self.p, other.p, "mixed moduli: {} vs {}", self.p, other.p);
    }

    pub fn add(self, other: Self) -> Self {
        self.same_modulus(other);
        Self { p: self.p, value: add_mod(self.value, other.value, self.p) }
    }

    pub fn sub(self, other: Self) -> Self {
        self.same_modulus(other);
        Self { p: self.p, value: sub_mod(self.value, other.value, self.p) }
    }

    pub fn mul(self, other: Self) -> Self {
        self.same_modulus(other);
        Self { p: self.p, value: mul_mod(self.value, other.value, self.p) }
    }

    pub fn neg(self) -> Self {
        Self { p: self.p, value: sub_mod(0, self.value, self.p) }
    }

    /// Multiplicative inverse. The moduli are small enough that a scan beats
    /// any cleverness.
    pub fn inv(self) -> Result<Self, FpError> {
        if self.value == 0 {
            return Err(FpError::ZeroInverse);
        }
        for candidate in 1..self.p {
            if mul_mod(self.value, candidate, self.p) == 1 {
                return Ok(Self { p: self.p, value: candidate });
            }
        }
        unreachable!("every nonzero residue mod a prime is invertible")
    }
}

impl std::ops::Add for FpScalar {
    type Output = FpScalar;
    fn add(self, rhs: Self) -> Self {
        FpScalar::add(self, rhs)
    }
}

impl std::ops::Sub for FpScalar {
    type Output = FpScalar;
    fn sub(self, rhs: Self) -> Self {
        FpScalar::sub(self, rhs)
    }
}

impl std::ops::Mul for FpScalar {
    type Output = FpScalar;
    fn mul(self, rhs: Self) -> Self {
        FpScalar::mul(self, rhs)
    }
}

impl std::ops::Neg for FpScalar {
    type Output = FpScalar;
    fn neg(self) -> Self {
        FpScalar::neg(self)
    }
}

/// A vector in F_p^4. Used both for generator-exponent tuples and for
/// coordinates in the commutator basis of the center.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FpVec4 {
    p: u8,
    e: [u8; 4],
}

#[allow(clippy::should_implement_trait)]
impl FpVec4 {
    pub fn new(p: u8, entries: [i64; 4]) -> Result<Self, FpError> {
        check_modulus(p)?;
        Ok(Self { p, e: entries.map(|v| reduce(v, p)) })
    }

    pub(crate) fn from_raw(p: u8, e: [u8; 4]) -> Self {
        debug_assert!(e.iter().all(|&v| v < p));
        Self { p, e }
    }

    pub fn zero(p: u8) -> Self {
        Self::new(p, [0; 4]).expect("supported modulus")
    }

    /// Standard basis vector with a 1 in position `i`.
    pub fn unit(p: u8, i: usize) -> Self {
        let mut e = [0u8; 4];
        e[i] = 1;
        Self { p, e }
    }

    pub fn modulus(self) -> u8 {
        self.p
    }

    pub fn entries(self) -> [u8; 4] {
        self.e
    }

    pub fn get(self, i: usize) -> u8 {
        self.e[i]
    }

    pub fn is_zero(self) -> bool {
        self.e == [0; 4]
    }

    fn same_modulus(self, other: Self) {
        assert_eq!(self.p, other.p, "mixed moduli: {} vs {}", self.p, other.p);
    }

    pub fn add(self, other: Self) -> Self {
        self.same_modulus(other);
        let mut e = [0u8; 4];
        for i in 0..4 {
            e[i] = add_mod(self.e[i], other.e[i], self.p);
        }
        Self { p: self.p, e }
    }

    pub fn sub(self, other: Self) -> Self {
        self.same_modulus(other);
        let mut e = [0u8; 4];
        for i in 0..4 {
            e[i] = sub_mod(self.e[i], other.e[i], self.p);
        }
        Self { p: self.p, e }
    }

    pub fn neg(self) -> Self {
        Self::zero(self.p).sub(self)
    }

    pub fn scale(self, c: u8) -> Self {
        let mut e = [0u8; 4];
        for i in 0..4 {
            e[i] = mul_mod(self.e[i], c % self.p, self.p);
        }
        Self { p: self.p, e }
    }

    /// All p^4 vectors in lexicographic order.
    pub fn iter_all(p: u8) -> impl Iterator<Item = FpVec4> {
        let pe = p as u32;
        (0..pe.pow(4)).map(move |ix| {
            let mut e = [0u8; 4];
            let mut rest = ix;
            for slot in (0..4).rev() {
                e[slot] = (rest % pe) as u8;
                rest /= pe;
            }
            FpVec4 { p, e }
        })
    }
}

/// A 4x4 matrix over F_p, stored row-major. Column `j` holds the coordinates
/// of the image of the `j`-th generator wherever a matrix encodes a map.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FpMat4 {
    p: u8,
    m: [[u8; 4]; 4],
}

#[allow(clippy::should_implement_trait)]
impl FpMat4 {
    pub fn new(p: u8, rows: [[i64; 4]; 4]) -> Result<Self, FpError> {
        check_modulus(p)?;
        Ok(Self { p, m: rows.map(|row| row.map(|v| reduce(v, p))) })
    }

    pub fn zero(p: u8) -> Self {
        Self::new(p, [[0; 4]; 4]).expect("supported modulus")
    }

    pub fn identity(p: u8) -> Self {
        let mut m = Self::zero(p);
        for i in 0..4 {
            m.m[i][i] = 1;
        }
        m
    }

    /// Matrix unit E_ij: 1 in row `i`, column `j`, zero elsewhere.
    pub fn elementary(p: u8, i: usize, j: usize) -> Self {
        let mut m = Self::zero(p);
        m.m[i][j] = 1;
        m
    }

    /// The sixteen matrix units in row-major order. They generate the
    /// additive group of matrices, which is all the conjugation machinery
    /// needs.
    pub fn elementary_all(p: u8) -> Vec<FpMat4> {
        let mut out = Vec::with_capacity(16);
        for i in 0..4 {
            for j in 0..4 {
                out.push(Self::elementary(p, i, j));
            }
        }
        out
    }

    pub fn from_cols(p: u8, cols: [FpVec4; 4]) -> Self {
        let mut m = Self::zero(p);
        for (j, col) in cols.iter().enumerate() {
            assert_eq!(col.modulus(), p, "mixed moduli");
            for i in 0..4 {
                m.m[i][j] = col.e[i];
            }
        }
        m
    }

    pub fn modulus(self) -> u8 {
        self.p
    }

    pub fn entry(self, i: usize, j: usize) -> u8 {
        self.m[i][j]
    }

    pub fn col(self, j: usize) -> FpVec4 {
        let mut e = [0u8; 4];
        for i in 0..4 {
            e[i] = self.m[i][j];
        }
        FpVec4 { p: self.p, e }
    }

    pub fn is_zero(self) -> bool {
        self.m == [[0; 4]; 4]
    }

    fn same_modulus(self, other: Self) {
        assert_eq!(self.p, other.p, "mixed moduli: {} vs {}", self.p, other.p);
    }

    pub fn add(self, other: Self) -> Self {
        self.same_modulus(other);
        let mut m = [[0u8; 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                m[i][j] = add_mod(self.m[i][j], other.m[i][j], self.p);
            }
        }
        Self { p: self.p, m }
    }

    pub fn sub(self, other: Self) -> Self {
        self.same_modulus(other);
        let mut m = [[0u8; 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                m[i][j] = sub_mod(self.m[i][j], other.m[i][j], self.p);
            }
        }
        Self { p: self.p, m }
    }

    pub fn neg(self) -> Self {
        Self::zero(self.p).sub(self)
    }

    pub fn mul(self, other: Self) -> Self {
        self.same_modulus(other);
        let mut m = [[0u8; 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                let mut acc = 0u16;
                for k in 0..4 {
                    acc += self.m[i][k] as u16 * other.m[k][j] as u16;
                }
                m[i][j] = (acc % self.p as u16) as u8;
            }
        }
        Self { p: self.p, m }
    }

    pub fn mul_vec(self, v: FpVec4) -> FpVec4 {
        assert_eq!(self.p, v.p, "mixed moduli");
        let mut e = [0u8; 4];
        for i in 0..4 {
            let mut acc = 0u16;
            for j in 0..4 {
                acc += self.m[i][j] as u16 * v.e[j] as u16;
            }
            e[i] = (acc % self.p as u16) as u8;
        }
        FpVec4 { p: self.p, e }
    }

    pub fn scale(self, c: u8) -> Self {
        let mut m = [[0u8; 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                m[i][j] = mul_mod(self.m[i][j], c % self.p, self.p);
            }
        }
        Self { p: self.p, m }
    }

    /// Row reduction with first-nonzero pivot selection; returns the echelon
    /// form together with the permutation sign and the product of pivots so
    /// that rank, determinant and inverse all share one deterministic pass.
    fn eliminate(self) -> (Self, usize, u8) {
        let p = self.p;
        let mut a = self;
        let mut rank = 0;
        let mut det: u8 = 1;
        for col in 0..4 {
            let pivot_row = (rank..4).find(|&r| a.m[r][col] != 0);
            let Some(pivot_row) = pivot_row else {
                continue;
            };
            if pivot_row != rank {
                a.m.swap(pivot_row, rank);
                det = sub_mod(0, det, p); // row swap flips the sign
            }
            let pivot = a.m[rank][col];
            det = mul_mod(det, pivot, p);
            let pivot_inv = FpScalar { p, value: pivot }.inv().expect("nonzero pivot").value;
            for j in 0..4 {
                a.m[rank][j] = mul_mod(a.m[rank][j], pivot_inv, p);
            }
            for r in 0..4 {
                if r != rank && a.m[r][col] != 0 {
                    let factor = a.m[r][col];
                    for j in 0..4 {
                        let delta = mul_mod(factor, a.m[rank][j], p);
                        a.m[r][j] = sub_mod(a.m[r][j], delta, p);
                    }
                }
            }
            rank += 1;
        }
        if rank < 4 {
            det = 0;
        }
        (a, rank, det)
    }

    pub fn rank(self) -> usize {
        self.eliminate().1
    }

    pub fn det(self) -> FpScalar {
        FpScalar { p: self.p, value: self.eliminate().2 }
    }

    pub fn inverse(self) -> Result<Self, FpError> {
        let p = self.p;
        // Gauss-Jordan on [A | I].
        let mut a = self;
        let mut inv = Self::identity(p);
        let mut rank = 0;
        for col in 0..4 {
            let pivot_row = (rank..4).find(|&r| a.m[r][col] != 0);
            let Some(pivot_row) = pivot_row else {
                continue;
            };
            if pivot_row != rank {
                a.m.swap(pivot_row, rank);
                inv.m.swap(pivot_row, rank);
            }
            let pivot_inv = FpScalar { p, value: a.m[rank][col] }.inv().expect("nonzero pivot").value;
            for j in 0..4 {
                a.m[rank][j] = mul_mod(a.m[rank][j], pivot_inv, p);
                inv.m[rank][j] = mul_mod(inv.m[rank][j], pivot_inv, p);
            }
            for r in 0..4 {
                if r != rank && a.m[r][col] != 0 {
                    let factor = a.m[r][col];
                    for j in 0..4 {
                        let da = mul_mod(factor, a.m[rank][j], p);
                        a.m[r][j] = sub_mod(a.m[r][j], da, p);
                        let di = mul_mod(factor, inv.m[rank][j], p);
                        inv.m[r][j] = sub_mod(inv.m[r][j], di, p);
                    }
                }
            }
            rank += 1;
        }
        if rank < 4 {
            return Err(FpError::Singular);
        }
        Ok(inv)
    }

    /// All p^16 matrices in row-major lexicographic order. Only sensible for
    /// p = 2 (65536 matrices); exhaustive loops at larger p go through
    /// sampling instead.
    pub fn iter_all(p: u8) -> impl Iterator<Item = FpMat4> {
        let pe = p as u64;
        (0..pe.pow(16)).map(move |ix| {
            let mut m = [[0u8; 4]; 4];
            let mut rest = ix;
            for i in (0..4).rev() {
                for j in (0..4).rev() {
                    m[i][j] = (rest % pe) as u8;
                    rest /= pe;
                }
            }
            FpMat4 { p, m }
        })
    }

    /// Compact 16-digit row-major form, e.g. `1000010000100001` for the
    /// identity.
    pub fn digits(self) -> String {
        let mut s = String::with_capacity(16);
        for i in 0..4 {
            for j in 0..4 {
                s.push((b'0' + self.m[i][j]) as char);
            }
        }
        s
    }

    pub fn parse_digits(p: u8, s: &str) -> Result<Self, FpError> {
        check_modulus(p)?;
        let digits: Vec<u8> = s
            .chars()
            .filter(|c| !c.is_whitespace())
            .map(|c| c.to_digit(10).map(|d| d as u8).ok_or(FpError::UnsupportedModulus(p)))
            .collect::<Result<_, _>>()
            .map_err(|_| FpError::UnsupportedModulus(p))?;
        if digits.len() != 16 || digits.iter().any(|&d| d >= p) {
            return Err(FpError::UnsupportedModulus(p));
        }
        let mut m = [[0u8; 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                m[i][j] = digits[i * 4 + j];
            }
        }
        Ok(Self { p, m })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SplitMix64;

    fn scalars(p: u8) -> Vec<FpScalar> {
        (0..p).map(|v| FpScalar::new(p, v as i64).unwrap()).collect()
    }

    #[test]
    fn field_axioms_exhaustive() {
        for p in SUPPORTED_PRIMES {
            let all = scalars(p);
            let zero = FpScalar::zero(p);
            let one = FpScalar::one(p);
            for &a in &all {
                assert_eq!(a.add(zero), a);
                assert_eq!(a.mul(one), a);
                assert_eq!(a.add(a.neg()), zero);
                if !a.is_zero() {
                    assert_eq!(a.mul(a.inv().unwrap()), one);
                }
                for &b in &all {
                    assert_eq!(a.add(b), b.add(a));
                    assert_eq!(a.mul(b), b.mul(a));
                    for &c in &all {
                        assert_eq!(a.add(b).add(c), a.add(b.add(c)));
                        assert_eq!(a.mul(b).mul(c), a.mul(b.mul(c)));
                        assert_eq!(a.mul(b.add(c)), a.mul(b).add(a.mul(c)));
                    }
                }
            }
        }
    }

    #[test]
    fn scalar_examples() {
        // p=3: inv(2) = 2; p=5: 3*4 = 2; p=2: 1+1 = 0.
        assert_eq!(FpScalar::new(3, 2).unwrap().inv().unwrap().value(), 2);
        assert_eq!(FpScalar::new(5, 3).unwrap().mul(FpScalar::new(5, 4).unwrap()).value(), 2);
        assert_eq!(FpScalar::new(2, 1).unwrap().add(FpScalar::new(2, 1).unwrap()).value(), 0);
    }

    #[test]
    fn zero_has_no_inverse() {
        assert_eq!(FpScalar::zero(3).inv(), Err(FpError::ZeroInverse));
    }

    #[test]
    fn unsupported_modulus_rejected() {
        assert!(FpScalar::new(7, 1).is_err());
        assert!(FpVec4::new(4, [0; 4]).is_err());
    }

    #[test]
    #[should_panic(expected = "mixed moduli")]
    fn mixed_moduli_panic() {
        let _ = FpScalar::zero(2).add(FpScalar::zero(3));
    }

    #[test]
    fn determinant_of_kernel_generator_matrix() {
        // det of rows (1,0,k,0), (0,1,-1,0), (-1,0,0,k), (0,-1,0,k-1) is k^2.
        for p in [2u8, 3, 5] {
            for k in 0..p as i64 {
                let m = FpMat4::new(
                    p,
                    [[1, 0, k, 0], [0, 1, -1, 0], [-1, 0, 0, k], [0, -1, 0, k - 1]],
                )
                .unwrap();
                assert_eq!(m.det(), FpScalar::new(p, k * k).unwrap(), "p={p} k={k}");
            }
        }
    }

    #[test]
    fn rank_examples() {
        assert_eq!(FpMat4::identity(3).rank(), 4);
        // Every column equal to (1,-1,0,0)^t: rank 1.
        let col = FpVec4::new(3, [1, -1, 0, 0]).unwrap();
        let m = FpMat4::from_cols(3, [col; 4]);
        assert_eq!(m.rank(), 1);
        assert_eq!(FpMat4::zero(5).rank(), 0);
    }

    /// Brute-force kernel dimension: count solutions of A v = 0 over all p^4
    /// vectors; this is independent of the elimination path.
    fn kernel_dim(a: FpMat4) -> usize {
        let p = a.modulus();
        let solutions = FpVec4::iter_all(p).filter(|&v| a.mul_vec(v).is_zero()).count();
        // |kernel| = p^dim
        let mut dim = 0;
        let mut size = 1usize;
        while size < solutions {
            size *= p as usize;
            dim += 1;
        }
        assert_eq!(size, solutions, "kernel size must be a power of p");
        dim
    }

    #[test]
    fn rank_matches_kernel_enumeration_p2_exhaustive() {
        for m in FpMat4::iter_all(2) {
            assert_eq!(m.rank(), 4 - kernel_dim(m));
        }
    }

    #[test]
    fn rank_det_inverse_consistency() {
        // Exhaustive at p=2, seeded samples at p=3 and 5.
        for m in FpMat4::iter_all(2) {
            let invertible = m.rank() == 4;
            assert_eq!(invertible, !m.det().is_zero());
            match m.inverse() {
                Ok(inv) => {
                    assert!(invertible);
                    assert_eq!(m.mul(inv), FpMat4::identity(2));
                }
                Err(FpError::Singular) => assert!(!invertible),
                Err(other) => panic!("unexpected error {other:?}"),
            }
        }
        for p in [3u8, 5] {
            let mut rng = SplitMix64::new(0x00F1E1D);
            for _ in 0..10_000 {
                let mut rows = [[0i64; 4]; 4];
                for row in rows.iter_mut() {
                    for v in row.iter_mut() {
                        *v = rng.below(p as u64) as i64;
                    }
                }
                let m = FpMat4::new(p, rows).unwrap();
                assert_eq!(m.rank() == 4, !m.det().is_zero());
                assert_eq!(m.rank(), 4 - kernel_dim(m));
                if let Ok(inv) = m.inverse() {
                    assert_eq!(m.mul(inv), FpMat4::identity(p));
                }
            }
        }
    }

    #[test]
    fn matrix_digits_round_trip() {
        let m = FpMat4::new(3, [[1, 0, 2, 0], [0, 1, 1, 0], [2, 0, 0, 2], [0, 2, 0, 1]]).unwrap();
        assert_eq!(FpMat4::parse_digits(3, &m.digits()).unwrap(), m);
    }
}
