//! Exact rationals, the truncated rings Q[H]/(H^s), and the fixed catalogue of
//! complete-intersection geometries.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use rug::Integer;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Exact rational number, always in lowest terms with a positive denominator.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rational(rug::Rational);

impl Rational {
    /// `num/den`. Panics if `den == 0`.
    pub fn new(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        Rational(rug::Rational::from((num, den)))
    }

    pub fn from_integer<T: Into<Integer>>(n: T) -> Self {
        Rational(rug::Rational::from(n.into()))
    }

    pub fn from_parts(num: Integer, den: Integer) -> Result<Self> {
        if den == 0 {
            return Err(Error::ParseRational(format!("{num}/0")));
        }
        Ok(Rational(rug::Rational::from((num, den))))
    }

    pub fn zero() -> Self {
        Rational(rug::Rational::new())
    }

    pub fn one() -> Self {
        Rational::from(1)
    }

    pub fn is_zero(&self) -> bool {
        self.0.cmp0() == std::cmp::Ordering::Equal
    }

    pub fn is_integer(&self) -> bool {
        *self.0.denom() == 1
    }

    pub fn is_negative(&self) -> bool {
        self.0.cmp0() == std::cmp::Ordering::Less
    }

    pub fn numer(&self) -> &Integer {
        self.0.numer()
    }

    pub fn denom(&self) -> &Integer {
        self.0.denom()
    }

    pub fn as_rug(&self) -> &rug::Rational {
        &self.0
    }

    pub fn abs(&self) -> Rational {
        Rational(self.0.clone().abs())
    }

    pub fn floor(&self) -> Integer {
        self.0.clone().floor().into_numer_denom().0
    }

    /// Fractional part in `[0, 1)`.
    pub fn fract(&self) -> Rational {
        self - &Rational::from_integer(self.floor())
    }

    pub fn recip(&self) -> Result<Rational> {
        if self.is_zero() {
            return Err(Error::NonUnit("0".into()));
        }
        Ok(Rational(self.0.clone().recip()))
    }

    pub fn pow(&self, exp: i32) -> Rational {
        if exp >= 0 {
            Rational(rug::Rational::from(rug::ops::Pow::pow(&self.0, exp as u32)))
        } else {
            let r = self.recip().expect("negative power of zero");
            r.pow(-exp)
        }
    }

    /// Integer value if this rational is integral.
    pub fn to_integer(&self) -> Option<Integer> {
        self.is_integer().then(|| self.0.numer().clone())
    }

    pub fn to_i64(&self) -> Option<i64> {
        self.to_integer().and_then(|n| n.to_i64())
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64()
    }

    pub fn to_float(&self, prec: u32) -> rug::Float {
        rug::Float::with_val(prec, &self.0)
    }
}

impl From<i64> for Rational {
    fn from(n: i64) -> Self {
        Rational(rug::Rational::from(n))
    }
}

impl From<i32> for Rational {
    fn from(n: i32) -> Self {
        Rational(rug::Rational::from(n))
    }
}

impl From<u64> for Rational {
    fn from(n: u64) -> Self {
        Rational(rug::Rational::from(n))
    }
}

impl From<Integer> for Rational {
    fn from(n: Integer) -> Self {
        Rational(rug::Rational::from(n))
    }
}

impl From<rug::Rational> for Rational {
    fn from(r: rug::Rational) -> Self {
        Rational(r)
    }
}

/// Canonical form is always `p/q`, including integers (`7/1`).
impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.0.numer(), self.0.denom())
    }
}

/// Accepts `p/q` or the integer shorthand `p`.
impl FromStr for Rational {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::ParseRational(s.to_string());
        let t = s.trim();
        match t.split_once('/') {
            Some((p, q)) => {
                let p: Integer = p.trim().parse().map_err(|_| bad())?;
                let q: Integer = q.trim().parse().map_err(|_| bad())?;
                if q == 0 {
                    return Err(bad());
                }
                Ok(Rational(rug::Rational::from((p, q))))
            }
            None => {
                let p: Integer = t.parse().map_err(|_| bad())?;
                Ok(Rational::from(p))
            }
        }
    }
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

macro_rules! rational_binop {
    ($Trait:ident, $method:ident, $Assign:ident, $assign:ident, $op:tt) => {
        impl $Trait<&Rational> for &Rational {
            type Output = Rational;
            fn $method(self, rhs: &Rational) -> Rational {
                Rational(rug::Rational::from(&self.0 $op &rhs.0))
            }
        }
        impl $Trait<Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational(self.0 $op rhs.0)
            }
        }
        impl $Trait<&Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: &Rational) -> Rational {
                Rational(self.0 $op &rhs.0)
            }
        }
        impl $Assign<&Rational> for Rational {
            fn $assign(&mut self, rhs: &Rational) {
                self.0 = rug::Rational::from(&self.0 $op &rhs.0);
            }
        }
    };
}

rational_binop!(Add, add, AddAssign, add_assign, +);
rational_binop!(Sub, sub, SubAssign, sub_assign, -);
rational_binop!(Mul, mul, MulAssign, mul_assign, *);

impl Div<&Rational> for &Rational {
    type Output = Rational;
    /// Panics on division by zero.
    fn div(self, rhs: &Rational) -> Rational {
        assert!(!rhs.is_zero(), "division by zero");
        Rational(rug::Rational::from(&self.0 / &rhs.0))
    }
}

impl Div<Rational> for Rational {
    type Output = Rational;
    fn div(self, rhs: Rational) -> Rational {
        &self / &rhs
    }
}

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}

impl Neg for &Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(rug::Rational::from(-&self.0))
    }
}

impl std::iter::Sum for Rational {
    fn sum<I: Iterator<Item = Rational>>(iter: I) -> Rational {
        iter.fold(Rational::zero(), |acc, x| acc + x)
    }
}

/// `n!` as an exact integer.
pub fn factorial(n: u32) -> Integer {
    Integer::from(Integer::factorial(n))
}

/// Truncated polynomial `Σ_{k<s} a_k H^k` in `Q[H]/(H^s)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct HPoly {
    coeffs: Vec<Rational>,
}

impl HPoly {
    pub fn zero(nilpotency: usize) -> Self {
        assert!(nilpotency > 0, "nilpotency must be positive");
        HPoly {
            coeffs: vec![Rational::zero(); nilpotency],
        }
    }

    pub fn constant(nilpotency: usize, c: Rational) -> Self {
        let mut p = HPoly::zero(nilpotency);
        p.coeffs[0] = c;
        p
    }

    pub fn one(nilpotency: usize) -> Self {
        HPoly::constant(nilpotency, Rational::one())
    }

    /// `c·H^k`, which is zero once `k ≥ s`.
    pub fn monomial(nilpotency: usize, k: usize, c: Rational) -> Self {
        let mut p = HPoly::zero(nilpotency);
        if k < nilpotency {
            p.coeffs[k] = c;
        }
        p
    }

    /// The hyperplane class `H`.
    pub fn generator(nilpotency: usize) -> Self {
        HPoly::monomial(nilpotency, 1, Rational::one())
    }

    /// Builds from explicit coefficients; the length fixes the nilpotency.
    pub fn from_coeffs(coeffs: Vec<Rational>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::Structural(
                "HPoly needs at least one coefficient".into(),
            ));
        }
        Ok(HPoly { coeffs })
    }

    pub fn nilpotency(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> Rational {
        self.coeffs.get(k).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Rational::is_zero)
    }

    pub fn is_unit(&self) -> bool {
        !self.coeffs[0].is_zero()
    }

    fn check(&self, other: &HPoly) -> Result<()> {
        if self.nilpotency() != other.nilpotency() {
            return Err(Error::NilpotencyMismatch {
                left: self.nilpotency(),
                right: other.nilpotency(),
            });
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &HPoly) -> Result<HPoly> {
        self.check(other)?;
        Ok(HPoly {
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn checked_sub(&self, other: &HPoly) -> Result<HPoly> {
        self.check(other)?;
        Ok(HPoly {
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a - b)
                .collect(),
        })
    }

    /// Truncated product: `c_k = Σ_{i+j=k} a_i b_j` for `k < s`.
    pub fn checked_mul(&self, other: &HPoly) -> Result<HPoly> {
        self.check(other)?;
        let s = self.nilpotency();
        let mut out = HPoly::zero(s);
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs[..s - i].iter().enumerate() {
                if !b.is_zero() {
                    out.coeffs[i + j] += &(a * b);
                }
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &Rational) -> HPoly {
        HPoly {
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
        }
    }

    /// Inverse via the finite geometric series in the nilpotent part:
    /// `a = a_0(1 + n)`, `a^{-1} = a_0^{-1} Σ_{k<s} (-n)^k`.
    pub fn invert(&self) -> Result<HPoly> {
        let a0 = &self.coeffs[0];
        if a0.is_zero() {
            return Err(Error::NonUnit(format!("{self}")));
        }
        let s = self.nilpotency();
        let inv0 = a0.recip()?;
        let mut minus_n = self.scale(&-&inv0);
        minus_n.coeffs[0] = Rational::zero();
        let mut sum = HPoly::one(s);
        let mut power = HPoly::one(s);
        for _ in 1..s {
            power = &power * &minus_n;
            sum = &sum + &power;
        }
        Ok(sum.scale(&inv0))
    }

    pub fn pow(&self, exp: u32) -> HPoly {
        let mut acc = HPoly::one(self.nilpotency());
        for _ in 0..exp {
            acc = &acc * self;
        }
        acc
    }
}

impl fmt::Display for HPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, c)| match k {
                0 => format!("{c}"),
                1 => format!("({c})H"),
                _ => format!("({c})H^{k}"),
            })
            .collect();
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

// Operator forms panic on nilpotency mismatch; use the checked_* methods at API
// boundaries.
impl Add<&HPoly> for &HPoly {
    type Output = HPoly;
    fn add(self, rhs: &HPoly) -> HPoly {
        self.checked_add(rhs).expect("HPoly nilpotency mismatch")
    }
}

impl Sub<&HPoly> for &HPoly {
    type Output = HPoly;
    fn sub(self, rhs: &HPoly) -> HPoly {
        self.checked_sub(rhs).expect("HPoly nilpotency mismatch")
    }
}

impl Mul<&HPoly> for &HPoly {
    type Output = HPoly;
    fn mul(self, rhs: &HPoly) -> HPoly {
        self.checked_mul(rhs).expect("HPoly nilpotency mismatch")
    }
}

impl Neg for &HPoly {
    type Output = HPoly;
    fn neg(self) -> HPoly {
        HPoly {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

/// The geometries this library knows about.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelCase {
    /// Two cubics in P^5.
    Cubic33,
    /// Four quadrics in P^7.
    Quadric2222,
    /// The quintic in P^4; Gromov-Witten side only.
    Quintic,
}

impl ModelCase {
    pub const ALL: [ModelCase; 3] = [
        ModelCase::Cubic33,
        ModelCase::Quadric2222,
        ModelCase::Quintic,
    ];
    pub const LG: [ModelCase; 2] = [ModelCase::Cubic33, ModelCase::Quadric2222];

    pub fn name(self) -> &'static str {
        match self {
            ModelCase::Cubic33 => "cubic33",
            ModelCase::Quadric2222 => "quadric2222",
            ModelCase::Quintic => "quintic",
        }
    }

    /// Number of homogeneous coordinates `N`.
    pub fn n_vars(self) -> usize {
        match self {
            ModelCase::Cubic33 => 6,
            ModelCase::Quadric2222 => 8,
            ModelCase::Quintic => 5,
        }
    }

    /// Number of defining polynomials `r`.
    pub fn n_polys(self) -> usize {
        match self {
            ModelCase::Cubic33 => 2,
            ModelCase::Quadric2222 => 4,
            ModelCase::Quintic => 1,
        }
    }

    /// Common degree `d` of the defining polynomials.
    pub fn degree(self) -> u32 {
        match self {
            ModelCase::Cubic33 => 3,
            ModelCase::Quadric2222 => 2,
            ModelCase::Quintic => 5,
        }
    }

    /// Degrees of the defining polynomials.
    pub fn degrees(self) -> Vec<u32> {
        vec![self.degree(); self.n_polys()]
    }

    /// Coordinate weights `c_j` (all one here).
    pub fn weights(self) -> Vec<u32> {
        vec![1; self.n_vars()]
    }

    /// Charges `q_j = c_j / d`.
    pub fn charges(self) -> Vec<Rational> {
        let d = self.degree() as i64;
        self.weights()
            .iter()
            .map(|&c| Rational::new(c as i64, d))
            .collect()
    }

    /// `d·r = Σ c_j`.
    pub fn is_calabi_yau(self) -> bool {
        let sum: u32 = self.weights().iter().sum();
        self.degree() as usize * self.n_polys() == sum as usize
    }

    /// Degree of the threefold, `∏ d_i`.
    pub fn threefold_degree(self) -> i64 {
        self.degrees().iter().map(|&d| d as i64).product()
    }

    pub fn gw_nilpotency(self) -> usize {
        4
    }

    /// Nilpotency of the sector ring `H*(P^{r-1})` on the LG side.
    pub fn lg_nilpotency(self) -> Result<usize> {
        self.ensure_lg("the hybrid model")?;
        Ok(self.n_polys())
    }

    /// Constant `A` of the Picard-Fuchs operator, `∏ d_i^{d_i}`.
    pub fn pf_constant(self) -> Rational {
        match self {
            ModelCase::Cubic33 => Rational::from(729),
            ModelCase::Quadric2222 => Rational::from(256),
            ModelCase::Quintic => Rational::from(3125),
        }
    }

    /// Fractional indices `k/d_i`, `1 ≤ k < d_i`, over all defining polynomials.
    pub fn fractional_indices(self) -> Vec<Rational> {
        let mut out = Vec::new();
        for d in self.degrees() {
            for k in 1..d {
                out.push(Rational::new(k as i64, d as i64));
            }
        }
        out.sort();
        out
    }

    /// Multiplicities `m` with no coordinate fixed by `e^{2πi m/d}`.
    pub fn narrow_sectors(self) -> Vec<u32> {
        let d = self.degree();
        (0..d)
            .filter(|&m| self.weights().iter().all(|&c| (m * c) % d != 0))
            .collect()
    }

    /// `(E, e_num, e_den)`: the `δ^{-E⌊d/δ⌋}` exponent and the numerator and
    /// denominator powers of the hybrid I-function.
    pub fn hybrid_exponents(self) -> Result<(u32, u32, u32)> {
        self.ensure_lg("the hybrid I-function")?;
        let n = self.n_vars() as u32;
        let r = self.n_polys() as u32;
        Ok((n, n - r, r))
    }

    pub fn ensure_lg(self, what: &str) -> Result<()> {
        if self == ModelCase::Quintic {
            Err(Error::UnsupportedCase {
                case: self,
                what: what.to_string(),
            })
        } else {
            Ok(())
        }
    }
}

impl fmt::Display for ModelCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ModelCase {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "cubic33" | "cubic" | "x33" => Ok(ModelCase::Cubic33),
            "quadric2222" | "quadric" | "x2222" => Ok(ModelCase::Quadric2222),
            "quintic" | "x5" => Ok(ModelCase::Quintic),
            other => Err(Error::InvalidInput(format!("unknown case {other:?}"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    fn hp(cs: &[i64]) -> HPoly {
        HPoly::from_coeffs(cs.iter().map(|&c| Rational::from(c)).collect()).unwrap()
    }

    #[test]
    fn rational_roundtrip_and_shorthand() {
        assert_eq!("-5/3".parse::<Rational>().unwrap(), q(-5, 3));
        assert_eq!("7".parse::<Rational>().unwrap().to_string(), "7/1");
        assert_eq!("6/-4".parse::<Rational>().unwrap().to_string(), "-3/2");
        assert!("1/0".parse::<Rational>().is_err());
        assert!("x".parse::<Rational>().is_err());
        assert_eq!(q(4, 6).to_string(), "2/3");
    }

    #[test]
    fn rational_fract_floor() {
        assert_eq!(q(-1, 3).fract(), q(2, 3));
        assert_eq!(q(7, 3).floor(), 2);
        assert_eq!(q(-7, 3).floor(), -3);
    }

    #[test]
    fn hpoly_mul_examples() {
        assert_eq!(&hp(&[1, 1]) * &hp(&[1, 1]), hp(&[1, 2]));
        assert_eq!(&hp(&[0, 1, 0, 0]) * &hp(&[0, 0, 0, 1]), HPoly::zero(4));
        // (1+H+H^2)(1-H) = 1 - H^3 exactly before truncation
        assert_eq!(&hp(&[1, 1, 1, 0]) * &hp(&[1, -1, 0, 0]), hp(&[1, 0, 0, -1]));
    }

    #[test]
    fn hpoly_mul_mismatch_is_structural() {
        let err = hp(&[1, 1]).checked_mul(&hp(&[1, 1, 0, 0])).unwrap_err();
        assert!(matches!(
            err,
            Error::NilpotencyMismatch { left: 2, right: 4 }
        ));
    }

    #[test]
    fn hpoly_invert_examples() {
        assert_eq!(hp(&[2, 0]).invert().unwrap(), HPoly::constant(2, q(1, 2)));
        assert_eq!(hp(&[1, 1]).invert().unwrap(), hp(&[1, -1]));
        let inv = hp(&[1, 2, 0, 0]).invert().unwrap();
        assert_eq!(inv, hp(&[1, -2, 4, -8]));
        assert_eq!(&inv * &hp(&[1, 2, 0, 0]), HPoly::one(4));
        assert!(matches!(hp(&[0, 1]).invert(), Err(Error::NonUnit(_))));
    }

    #[test]
    fn case_catalogue() {
        for case in ModelCase::ALL {
            assert!(case.is_calabi_yau(), "{case}");
            let a: i64 = case.degrees().iter().map(|&d| (d as i64).pow(d)).product();
            assert_eq!(case.pf_constant(), Rational::from(a));
        }
        assert_eq!(ModelCase::Cubic33.narrow_sectors(), vec![1, 2]);
        assert_eq!(ModelCase::Quadric2222.narrow_sectors(), vec![1]);
        assert_eq!(ModelCase::Cubic33.hybrid_exponents().unwrap(), (6, 4, 2));
        assert_eq!(
            ModelCase::Quadric2222.hybrid_exponents().unwrap(),
            (8, 4, 4)
        );
        assert!(ModelCase::Quintic.hybrid_exponents().is_err());
        assert_eq!(ModelCase::Cubic33.lg_nilpotency().unwrap(), 2);
        assert_eq!(ModelCase::Quadric2222.lg_nilpotency().unwrap(), 4);
        assert_eq!(
            ModelCase::Cubic33.fractional_indices(),
            vec![q(1, 3), q(1, 3), q(2, 3), q(2, 3)]
        );
        assert_eq!(
            "quadric2222".parse::<ModelCase>().unwrap(),
            ModelCase::Quadric2222
        );
    }

    fn arb_rational() -> impl Strategy<Value = Rational> {
        (-50i64..50, 1i64..12).prop_map(|(n, d)| Rational::new(n, d))
    }

    fn arb_hpoly(s: usize) -> impl Strategy<Value = HPoly> {
        proptest::collection::vec(arb_rational(), s).prop_map(|c| HPoly::from_coeffs(c).unwrap())
    }

    proptest! {
        #[test]
        fn rational_field_axioms(a in arb_rational(), b in arb_rational(), c in arb_rational()) {
            prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            prop_assert_eq!(&a * &b, &b * &a);
            if !a.is_zero() {
                prop_assert_eq!(&a * &a.recip().unwrap(), Rational::one());
            }
            prop_assert_eq!(a.to_string().parse::<Rational>().unwrap(), a);
        }

        #[test]
        fn hpoly_ring_axioms(a in arb_hpoly(4), b in arb_hpoly(4), c in arb_hpoly(4)) {
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            prop_assert_eq!(&a * &b, &b * &a);
            if a.is_unit() {
                prop_assert_eq!(&a * &a.invert().unwrap(), HPoly::one(4));
            }
        }
    }
}
