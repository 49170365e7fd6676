//! Arithmetic in GF(2^l) for 1 <= l <= 16.
//!
//! Elements are stored as integers whose bit `k` is the coefficient of `x^k`
//! (LSB-first). Every other module that talks about "bit i of a share" uses the
//! same convention.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported extension degree.
pub const MAX_DEGREE: u32 = 16;

/// Built-in irreducible (in fact primitive) polynomials, indexed by degree.
const DEFAULT_POLYS: [u32; 17] = [
    0, 0b11, 0b111, 0b1011, 0x13, 0x25, 0x43, 0x89, 0x11D, 0x211, 0x409, 0x805, 0x1053, 0x201B,
    0x4443, 0x8003, 0x1100B,
];

/// Degree of a GF(2) polynomial given as a bit mask, `None` for the zero polynomial.
pub fn degree(poly: u32) -> Option<u32> {
    if poly == 0 {
        None
    } else {
        Some(31 - poly.leading_zeros())
    }
}

/// Carry-less product of two GF(2) polynomials.
#[cfg(test)]
fn clmul(a: u32, b: u32) -> u64 {
    let mut acc = 0u64;
    let mut b = b;
    let mut shift = 0;
    while b != 0 {
        if b & 1 == 1 {
            acc ^= (a as u64) << shift;
        }
        b >>= 1;
        shift += 1;
    }
    acc
}

/// Remainder of `a` modulo the nonzero polynomial `m` over GF(2).
fn poly_rem(mut a: u64, m: u32) -> u64 {
    let dm = degree(m).expect("nonzero modulus");
    let m = m as u64;
    while a != 0 {
        let da = 63 - a.leading_zeros();
        if da < dm {
            break;
        }
        a ^= m << (da - dm);
    }
    a
}

/// True iff `poly` has no factor of degree in `1..=deg/2` over GF(2).
///
/// Polynomials of degree 1 are irreducible; the zero and constant polynomials
/// are not.
pub fn is_irreducible(poly: u32) -> bool {
    let d = match degree(poly) {
        Some(d) if d >= 1 => d,
        _ => return false,
    };
    for divisor_degree in 1..=d / 2 {
        let lo = 1u32 << divisor_degree;
        let hi = 1u32 << (divisor_degree + 1);
        for divisor in lo..hi {
            if poly_rem(poly as u64, divisor) == 0 {
                return false;
            }
        }
    }
    true
}

/// The field GF(2^l) defined by an irreducible polynomial of degree `l`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "FieldConfig", into = "FieldConfig")]
pub struct FieldSpec {
    l: u32,
    poly: u32,
}

/// Serialized form `{"l": int, "poly": int}`.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldConfig {
    pub l: u32,
    #[serde(default)]
    pub poly: Option<u32>,
}

impl TryFrom<FieldConfig> for FieldSpec {
    type Error = Error;

    fn try_from(c: FieldConfig) -> Result<Self> {
        match c.poly {
            Some(p) => FieldSpec::new(c.l, p),
            None => FieldSpec::with_default_poly(c.l),
        }
    }
}

impl From<FieldSpec> for FieldConfig {
    fn from(f: FieldSpec) -> Self {
        FieldConfig { l: f.l, poly: Some(f.poly) }
    }
}

impl fmt::Debug for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF(2^{}; {:#b})", self.l, self.poly)
    }
}

/// An element of some GF(2^l). Range validity is relative to a [`FieldSpec`],
/// see [`FieldSpec::element`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FieldElement(u32);

impl FieldElement {
    pub const ZERO: FieldElement = FieldElement(0);
    pub const ONE: FieldElement = FieldElement(1);

    /// Wraps a raw value without a range check.
    pub const fn new(value: u32) -> Self {
        FieldElement(value)
    }

    pub const fn value(self) -> u32 {
        self.0
    }

    pub const fn is_zero(self) -> bool {
        self.0 == 0
    }

    /// Bit `i` of the vector representation.
    pub const fn bit(self, i: u32) -> u8 {
        ((self.0 >> i) & 1) as u8
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl FieldSpec {
    /// Builds GF(2^l) from an explicit polynomial, checking degree and irreducibility.
    pub fn new(l: u32, poly: u32) -> Result<Self> {
        if l == 0 || l > MAX_DEGREE {
            return Err(Error::InvalidField(format!("extension degree {l} outside 1..={MAX_DEGREE}")));
        }
        if degree(poly) != Some(l) {
            return Err(Error::InvalidField(format!("polynomial {poly:#b} does not have degree {l}")));
        }
        if !is_irreducible(poly) {
            return Err(Error::InvalidField(format!("polynomial {poly:#b} is reducible")));
        }
        Ok(FieldSpec { l, poly })
    }

    /// Builds GF(2^l) from the built-in polynomial table.
    pub fn with_default_poly(l: u32) -> Result<Self> {
        if l == 0 || l > MAX_DEGREE {
            return Err(Error::InvalidField(format!("extension degree {l} outside 1..={MAX_DEGREE}")));
        }
        FieldSpec::new(l, DEFAULT_POLYS[l as usize])
    }

    pub fn default_poly(l: u32) -> Option<u32> {
        DEFAULT_POLYS.get(l as usize).copied().filter(|&p| p != 0)
    }

    /// Bits per element.
    pub const fn bits(&self) -> u32 {
        self.l
    }

    pub const fn poly(&self) -> u32 {
        self.poly
    }

    /// Number of elements, 2^l.
    pub const fn order(&self) -> usize {
        1usize << self.l
    }

    pub fn contains(&self, a: FieldElement) -> bool {
        a.0 < (1u32 << self.l)
    }

    /// Range-checked element constructor.
    pub fn element(&self, value: u32) -> Result<FieldElement> {
        let e = FieldElement(value);
        if self.contains(e) {
            Ok(e)
        } else {
            Err(Error::Parameter(format!("{value} is not an element of GF(2^{})", self.l)))
        }
    }

    /// Iterates over every element in increasing order.
    pub fn elements(&self) -> impl Iterator<Item = FieldElement> {
        (0..(1u32 << self.l)).map(FieldElement)
    }

    pub fn add(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        FieldElement(a.0 ^ b.0)
    }

    /// Shift-and-reduce multiplication.
    pub fn mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        FieldElement(self.mul_raw(a.0, b.0))
    }

    pub(crate) fn mul_raw(&self, a: u32, b: u32) -> u32 {
        debug_assert!(a < (1 << self.l) && b < (1 << self.l));
        let top = 1u32 << self.l;
        let mut a = a;
        let mut b = b;
        let mut acc = 0u32;
        while b != 0 {
            if b & 1 == 1 {
                acc ^= a;
            }
            b >>= 1;
            a <<= 1;
            if a & top != 0 {
                a ^= self.poly;
            }
        }
        acc
    }

    pub fn pow(&self, a: FieldElement, mut e: u64) -> FieldElement {
        let mut base = a;
        let mut acc = FieldElement::ONE;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// Multiplicative inverse via a^(2^l - 2).
    pub fn inv(&self, a: FieldElement) -> Result<FieldElement> {
        if a.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(self.pow(a, (1u64 << self.l) - 2))
    }

    pub fn div(&self, a: FieldElement, b: FieldElement) -> Result<FieldElement> {
        Ok(self.mul(a, self.inv(b)?))
    }

    /// Matrix of x -> c*x acting on LSB-first bit vectors; column j is bits(c * 2^j).
    pub fn mul_matrix(&self, c: FieldElement) -> BinaryMatrix {
        let l = self.l as usize;
        let mut rows = vec![0u32; l];
        for j in 0..l {
            let col = self.mul_raw(c.0, 1 << j);
            for (i, row) in rows.iter_mut().enumerate() {
                if (col >> i) & 1 == 1 {
                    *row |= 1 << j;
                }
            }
        }
        BinaryMatrix { size: l, rows }
    }
}

/// Square matrix over GF(2); row `i` is a bit mask whose bit `j` is entry (i, j).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BinaryMatrix {
    size: usize,
    rows: Vec<u32>,
}

impl BinaryMatrix {
    pub fn identity(size: usize) -> Self {
        BinaryMatrix { size, rows: (0..size).map(|i| 1u32 << i).collect() }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn get(&self, i: usize, j: usize) -> u8 {
        ((self.rows[i] >> j) & 1) as u8
    }

    pub fn row_mask(&self, i: usize) -> u32 {
        self.rows[i]
    }

    pub fn row_weight(&self, i: usize) -> u32 {
        self.rows[i].count_ones()
    }

    /// Rows as 0/1 vectors, LSB-first column order.
    pub fn to_rows(&self) -> Vec<Vec<u8>> {
        (0..self.size).map(|i| (0..self.size).map(|j| self.get(i, j)).collect()).collect()
    }

    /// Matrix-vector product over GF(2) on a packed bit vector.
    pub fn apply(&self, x: u32) -> u32 {
        self.rows
            .iter()
            .enumerate()
            .fold(0, |acc, (i, &r)| acc | (((r & x).count_ones() & 1) << i))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gf8() -> FieldSpec {
        FieldSpec::new(3, 0b1011).unwrap()
    }

    fn e(v: u32) -> FieldElement {
        FieldElement::new(v)
    }

    /// Independent reference: carry-less product then polynomial remainder.
    fn mul_oracle(f: &FieldSpec, a: u32, b: u32) -> u32 {
        poly_rem(clmul(a, b), f.poly()) as u32
    }

    #[test]
    fn add_is_xor() {
        let f = gf8();
        assert_eq!(f.add(e(5), e(5)), e(0));
        assert_eq!(f.add(e(7), e(6)), e(1));
        assert_eq!(f.add(e(3), e(4)), e(7));
    }

    #[test]
    fn mul_examples() {
        let f = gf8();
        assert_eq!(f.mul(e(1), e(2)), e(2));
        assert_eq!(mul_oracle(&f, 3, 3), 5);
        assert_eq!(mul_oracle(&f, 7, 7), 3);
        assert_eq!(f.mul(e(3), e(3)), e(5));
        assert_eq!(f.mul(e(7), e(7)), e(3));
    }

    #[test]
    fn mul_matches_clmul_oracle_everywhere() {
        for l in 1..=8 {
            let f = FieldSpec::with_default_poly(l).unwrap();
            for a in 0..f.order() as u32 {
                for b in 0..f.order() as u32 {
                    assert_eq!(f.mul_raw(a, b), mul_oracle(&f, a, b), "l={l} a={a} b={b}");
                }
            }
        }
    }

    #[test]
    fn inverse_examples() {
        let f = gf8();
        assert_eq!(f.inv(e(1)).unwrap(), e(1));
        assert_eq!(f.inv(e(2)).unwrap(), e(5));
        assert_eq!(f.inv(e(3)).unwrap(), e(6));
        assert_eq!(f.inv(e(0)), Err(Error::DivisionByZero));
    }

    #[test]
    fn inverse_matches_exhaustive_search() {
        let f = gf8();
        for a in 1..8 {
            let by_search = (1..8).find(|&b| mul_oracle(&f, a, b) == 1).unwrap();
            assert_eq!(f.inv(e(a)).unwrap(), e(by_search));
        }
    }

    #[test]
    fn inverse_round_trip_up_to_gf256() {
        for l in 1..=8 {
            let f = FieldSpec::with_default_poly(l).unwrap();
            for a in f.elements().skip(1) {
                assert_eq!(f.mul(a, f.inv(a).unwrap()), FieldElement::ONE);
            }
        }
    }

    #[test]
    fn field_axioms_exhaustive_small() {
        for l in 1..=4 {
            let f = FieldSpec::with_default_poly(l).unwrap();
            for a in f.elements() {
                assert_eq!(f.mul(a, FieldElement::ONE), a);
                assert_eq!(f.add(a, FieldElement::ZERO), a);
                for b in f.elements() {
                    assert_eq!(f.mul(a, b), f.mul(b, a));
                    assert_eq!(f.add(a, b), f.add(b, a));
                    for c in f.elements() {
                        assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
                        assert_eq!(f.add(f.add(a, b), c), f.add(a, f.add(b, c)));
                        assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
                    }
                }
            }
        }
    }

    #[test]
    fn mul_matrix_examples() {
        let f = gf8();
        assert_eq!(f.mul_matrix(e(1)), BinaryMatrix::identity(3));
        assert!(f.mul_matrix(e(0)).to_rows().iter().flatten().all(|&b| b == 0));
        assert_eq!(f.mul_matrix(e(3)).to_rows(), vec![vec![1, 0, 1], vec![1, 1, 1], vec![0, 1, 1]]);
    }

    #[test]
    fn mul_matrix_consistent_exhaustive() {
        for l in 1..=4 {
            let f = FieldSpec::with_default_poly(l).unwrap();
            for c in f.elements() {
                let m = f.mul_matrix(c);
                for x in f.elements() {
                    assert_eq!(m.apply(x.value()), f.mul(c, x).value());
                }
            }
        }
    }

    #[test]
    fn irreducibility_examples() {
        assert!(is_irreducible(0b1011));
        assert!(!is_irreducible(0b101));
        assert!(is_irreducible(0b10));
        assert!(is_irreducible(0b11));
        assert!(!is_irreducible(0b1));
        assert!(!is_irreducible(0));
        // x^4 + x^2 + 1 = (x^2 + x + 1)^2
        assert!(!is_irreducible(0b10101));
    }

    #[test]
    fn default_table_is_irreducible() {
        for l in 1..=MAX_DEGREE {
            assert!(FieldSpec::with_default_poly(l).is_ok(), "l={l}");
        }
    }

    #[test]
    fn rejects_bad_specs() {
        assert!(matches!(FieldSpec::new(0, 1), Err(Error::InvalidField(_))));
        assert!(matches!(FieldSpec::new(17, 1 << 17 | 0b1001), Err(Error::InvalidField(_))));
        assert!(matches!(FieldSpec::new(3, 0b10011), Err(Error::InvalidField(_))));
        assert!(matches!(FieldSpec::new(2, 0b101), Err(Error::InvalidField(_))));
    }

    #[test]
    fn serde_round_trip() {
        let f = gf8();
        let s = serde_json::to_string(&f).unwrap();
        assert_eq!(s, r#"{"l":3,"poly":11}"#);
        let back: FieldSpec = serde_json::from_str(&s).unwrap();
        assert_eq!(back, f);
        assert!(serde_json::from_str::<FieldSpec>(r#"{"l":2,"poly":5}"#).is_err());
        let d: FieldSpec = serde_json::from_str(r#"{"l":4}"#).unwrap();
        assert_eq!(d.poly(), 0x13);
    }
}
