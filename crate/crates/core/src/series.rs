//! Laurent polynomials in `z` with `Q[H]/(H^s)` coefficients, and frequency
//! series `Σ e^{(f + H^{(h)}/z) t} c_{f,h}(z)` which carry every I- and
//! J-function in the crate.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ring::{HPoly, ModelCase, Rational};
use crate::tseries::TSeries;

/// Finite Laurent polynomial in `z` with `HPoly` coefficients.
///
/// `floor`, when set, marks the lowest exponent whose coefficient is known
/// exactly; anything below it has been truncated away. `None` means the value
/// is exact in every degree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ZLaurent {
    nilpotency: usize,
    terms: BTreeMap<i32, HPoly>,
    floor: Option<i32>,
}

impl ZLaurent {
    pub fn zero(nilpotency: usize) -> Self {
        ZLaurent {
            nilpotency,
            terms: BTreeMap::new(),
            floor: None,
        }
    }

    pub fn monomial(exp: i32, coeff: HPoly) -> Self {
        let mut out = ZLaurent::zero(coeff.nilpotency());
        out.add_at(exp, &coeff);
        out
    }

    /// `c·z^exp`.
    pub fn scalar(nilpotency: usize, exp: i32, c: Rational) -> Self {
        ZLaurent::monomial(exp, HPoly::constant(nilpotency, c))
    }

    pub fn one(nilpotency: usize) -> Self {
        ZLaurent::scalar(nilpotency, 0, Rational::one())
    }

    /// `a·H + b·z`.
    pub fn linear(nilpotency: usize, a: Rational, b: Rational) -> Self {
        let mut out = ZLaurent::zero(nilpotency);
        out.add_at(0, &HPoly::monomial(nilpotency, 1, a));
        out.add_at(1, &HPoly::constant(nilpotency, b));
        out
    }

    pub fn from_terms<I>(nilpotency: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (i32, HPoly)>,
    {
        let mut out = ZLaurent::zero(nilpotency);
        for (e, c) in terms {
            if c.nilpotency() != nilpotency {
                return Err(Error::NilpotencyMismatch {
                    left: nilpotency,
                    right: c.nilpotency(),
                });
            }
            out.add_at(e, &c);
        }
        Ok(out)
    }

    pub fn with_floor(mut self, floor: Option<i32>) -> Self {
        self.floor = floor;
        self.prune();
        self
    }

    pub fn nilpotency(&self) -> usize {
        self.nilpotency
    }

    pub fn floor(&self) -> Option<i32> {
        self.floor
    }

    pub fn is_exact(&self) -> bool {
        self.floor.is_none()
    }

    /// `(z_min, z_max)`: lowest exponent known exactly and highest exponent
    /// that can be nonzero.
    pub fn window(&self) -> (i32, i32) {
        let lo = self
            .floor
            .or_else(|| self.terms.keys().next().copied())
            .unwrap_or(0);
        let hi = self.terms.keys().next_back().copied().unwrap_or(lo);
        (lo, hi.max(lo))
    }

    pub fn terms(&self) -> impl Iterator<Item = (i32, &HPoly)> {
        self.terms.iter().map(|(e, c)| (*e, c))
    }

    pub fn coeff(&self, exp: i32) -> HPoly {
        self.terms
            .get(&exp)
            .cloned()
            .unwrap_or_else(|| HPoly::zero(self.nilpotency))
    }

    /// Coefficient of `z^exp H^k`.
    pub fn coeff_hz(&self, exp: i32, k: usize) -> Rational {
        self.terms.get(&exp).map(|c| c.coeff(k)).unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn min_exp(&self) -> Option<i32> {
        self.terms.keys().next().copied()
    }

    pub fn max_exp(&self) -> Option<i32> {
        self.terms.keys().next_back().copied()
    }

    fn add_at(&mut self, exp: i32, c: &HPoly) {
        if c.is_zero() || self.floor.is_some_and(|f| exp < f) {
            return;
        }
        let entry = self
            .terms
            .entry(exp)
            .or_insert_with(|| HPoly::zero(c.nilpotency()));
        *entry = &*entry + c;
        if entry.is_zero() {
            self.terms.remove(&exp);
        }
    }

    fn prune(&mut self) {
        if let Some(f) = self.floor {
            self.terms.retain(|e, _| *e >= f);
        }
    }

    fn check(&self, other: &ZLaurent) -> Result<()> {
        if self.nilpotency != other.nilpotency {
            return Err(Error::NilpotencyMismatch {
                left: self.nilpotency,
                right: other.nilpotency,
            });
        }
        Ok(())
    }

    fn meet_floor(a: Option<i32>, b: Option<i32>) -> Option<i32> {
        match (a, b) {
            (Some(x), Some(y)) => Some(x.max(y)),
            (x, None) => x,
            (None, y) => y,
        }
    }

    pub fn checked_add(&self, other: &ZLaurent) -> Result<ZLaurent> {
        self.check(other)?;
        let mut out = ZLaurent::zero(self.nilpotency);
        out.floor = Self::meet_floor(self.floor, other.floor);
        for (e, c) in self.terms().chain(other.terms()) {
            out.add_at(e, c);
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &ZLaurent) -> Result<ZLaurent> {
        self.checked_add(&other.neg())
    }

    pub fn neg(&self) -> ZLaurent {
        self.scale(&Rational::from(-1))
    }

    /// Exact product; a truncated factor `a` (floor `f_a`) only determines the
    /// product from `f_a + max_exp(b)` upward.
    pub fn checked_mul(&self, other: &ZLaurent) -> Result<ZLaurent> {
        self.check(other)?;
        let mut out = ZLaurent::zero(self.nilpotency);
        let from_self = self.floor.map(|f| f + other.max_exp().unwrap_or(0));
        let from_other = other.floor.map(|f| f + self.max_exp().unwrap_or(0));
        out.floor = Self::meet_floor(from_self, from_other);
        for (ea, ca) in self.terms() {
            for (eb, cb) in other.terms() {
                out.add_at(ea + eb, &(ca * cb));
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &Rational) -> ZLaurent {
        let mut out = ZLaurent::zero(self.nilpotency);
        out.floor = self.floor;
        for (e, p) in self.terms() {
            out.add_at(e, &p.scale(c));
        }
        out
    }

    /// Multiplication by `z^k`.
    pub fn shift_z(&self, k: i32) -> ZLaurent {
        ZLaurent {
            nilpotency: self.nilpotency,
            terms: self.terms.iter().map(|(e, c)| (e + k, c.clone())).collect(),
            floor: self.floor.map(|f| f + k),
        }
    }

    /// Drops everything below `z^k` and records the truncation.
    pub fn truncate_below(&self, k: i32) -> ZLaurent {
        self.clone()
            .with_floor(Self::meet_floor(self.floor, Some(k)))
    }

    pub fn pow(&self, exp: u32) -> ZLaurent {
        let mut acc = ZLaurent::one(self.nilpotency);
        for _ in 0..exp {
            acc = &acc * self;
        }
        acc
    }

    /// Inverse of an exact element with exactly one exponent carrying a
    /// nonzero `H^0` part: `a = c z^m (1 + n)` with `n` nilpotent.
    pub fn invert(&self) -> Result<ZLaurent> {
        if !self.is_exact() {
            return Err(Error::NonUnit(
                "cannot invert a truncated Laurent polynomial".into(),
            ));
        }
        let units: Vec<(i32, Rational)> = self
            .terms()
            .filter(|(_, c)| c.is_unit())
            .map(|(e, c)| (e, c.coeff(0)))
            .collect();
        let (m, c) = match units.as_slice() {
            [(m, c)] => (*m, c.clone()),
            _ => return Err(Error::NonUnit(format!("{self}"))),
        };
        let s = self.nilpotency;
        let lead_inv = ZLaurent::scalar(s, -m, c.recip()?);
        let mut minus_n = (&lead_inv * self).neg();
        minus_n.add_at(0, &HPoly::one(s));
        let mut sum = ZLaurent::one(s);
        let mut power = ZLaurent::one(s);
        for _ in 1..s {
            power = &power * &minus_n;
            sum = &sum + &power;
        }
        Ok(&sum * &lead_inv)
    }

    /// Value at `z = 1`.
    pub fn at_z_one(&self) -> HPoly {
        let mut acc = HPoly::zero(self.nilpotency);
        for (_, c) in self.terms() {
            acc = &acc + c;
        }
        acc
    }
}

impl std::ops::Add<&ZLaurent> for &ZLaurent {
    type Output = ZLaurent;
    fn add(self, rhs: &ZLaurent) -> ZLaurent {
        self.checked_add(rhs).expect("ZLaurent nilpotency mismatch")
    }
}

impl std::ops::Sub<&ZLaurent> for &ZLaurent {
    type Output = ZLaurent;
    fn sub(self, rhs: &ZLaurent) -> ZLaurent {
        self.checked_sub(rhs).expect("ZLaurent nilpotency mismatch")
    }
}

impl std::ops::Mul<&ZLaurent> for &ZLaurent {
    type Output = ZLaurent;
    fn mul(self, rhs: &ZLaurent) -> ZLaurent {
        self.checked_mul(rhs).expect("ZLaurent nilpotency mismatch")
    }
}

impl fmt::Display for ZLaurent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            write!(f, "0")?;
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .rev()
            .map(|(e, c)| format!("[{c}]z^{e}"))
            .collect();
        write!(f, "{}", parts.join(" + "))?;
        if let Some(fl) = self.floor {
            write!(f, " + O(z^{})", fl - 1)?;
        }
        Ok(())
    }
}

/// Which theory a series belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Gw,
    Hybrid,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Gw => "gw",
            Side::Hybrid => "hybrid",
        })
    }
}

impl std::str::FromStr for Side {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "gw" | "cy" => Ok(Side::Gw),
            "hybrid" | "lg" | "hyb" => Ok(Side::Hybrid),
            other => Err(Error::InvalidInput(format!("unknown side {other:?}"))),
        }
    }
}

/// `Σ_{(f,h)} e^{(f + H^{(h)}/z) t} c_{f,h}(z)`, complete for all `f ≤ f_max`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FreqSeries {
    case: ModelCase,
    side: Side,
    f_max: Rational,
    terms: BTreeMap<(Rational, u32), ZLaurent>,
}

impl FreqSeries {
    pub fn new(case: ModelCase, side: Side, f_max: Rational) -> Result<Self> {
        if side == Side::Hybrid {
            case.ensure_lg("hybrid-side series")?;
        }
        Ok(FreqSeries {
            case,
            side,
            f_max,
            terms: BTreeMap::new(),
        })
    }

    /// Nilpotency of the coefficient ring on this side.
    pub fn nilpotency(&self) -> usize {
        match self.side {
            Side::Gw => self.case.gw_nilpotency(),
            Side::Hybrid => self.case.n_polys(),
        }
    }

    pub fn case(&self) -> ModelCase {
        self.case
    }

    pub fn side(&self) -> Side {
        self.side
    }

    pub fn f_max(&self) -> &Rational {
        &self.f_max
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Rational, u32, &ZLaurent)> {
        self.terms.iter().map(|((f, h), c)| (f, *h, c))
    }

    pub fn term(&self, f: &Rational, sector: u32) -> Option<&ZLaurent> {
        self.terms.get(&(f.clone(), sector))
    }

    pub fn sectors(&self) -> Vec<u32> {
        let mut out: Vec<u32> = self.terms.keys().map(|(_, h)| *h).collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    fn check_sector(&self, sector: u32) -> Result<()> {
        let ok = match self.side {
            Side::Gw => sector == 0,
            Side::Hybrid => sector < self.case.degree(),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Structural(format!(
                "sector {sector} is not valid on the {} side of {}",
                self.side, self.case
            )))
        }
    }

    /// Adds `e^{(f + H/z)t}·c` into sector `h`. Terms above `f_max` are dropped
    /// silently; that is what truncation means.
    pub fn add_term(&mut self, f: Rational, sector: u32, c: ZLaurent) -> Result<()> {
        self.check_sector(sector)?;
        if c.nilpotency() != self.nilpotency() {
            return Err(Error::NilpotencyMismatch {
                left: self.nilpotency(),
                right: c.nilpotency(),
            });
        }
        if f > self.f_max || c.is_zero() {
            return Ok(());
        }
        let key = (f, sector);
        let sum = match self.terms.remove(&key) {
            Some(old) => &old + &c,
            None => c,
        };
        if !sum.is_zero() {
            self.terms.insert(key, sum);
        }
        Ok(())
    }

    fn empty_like(&self, f_max: Rational) -> FreqSeries {
        FreqSeries {
            case: self.case,
            side: self.side,
            f_max,
            terms: BTreeMap::new(),
        }
    }

    /// Applies `g(f, c)` to every coefficient.
    pub fn map_coeffs<F>(&self, mut g: F) -> FreqSeries
    where
        F: FnMut(&Rational, &ZLaurent) -> ZLaurent,
    {
        let mut out = self.empty_like(self.f_max.clone());
        for (f, h, c) in self.terms() {
            let v = g(f, c);
            if !v.is_zero() {
                out.terms.insert((f.clone(), h), v);
            }
        }
        out
    }

    /// `d/dt`: multiplies `c_{f,h}` by `f + H/z`.
    pub fn ddt(&self) -> FreqSeries {
        let s = self.nilpotency();
        self.map_coeffs(|f, c| &ZLaurent::linear(s, Rational::one(), f.clone()).shift_z(-1) * c)
    }

    /// Multiplication by `e^{c t}`. The truncation bound can only drop:
    /// `f_max' = min(f_max, f_max + c)`. Terms that land below the smallest
    /// frequency of the side are kept.
    pub fn shift_freq(&self, c: &Rational) -> FreqSeries {
        let new_max = (&self.f_max + c).min(self.f_max.clone());
        let mut out = self.empty_like(new_max);
        for (f, h, v) in self.terms() {
            let nf = f + c;
            if nf <= out.f_max {
                out.terms.insert((nf, h), v.clone());
            }
        }
        out
    }

    fn check_compatible(&self, other: &FreqSeries) -> Result<()> {
        if self.case != other.case || self.side != other.side {
            return Err(Error::Structural(format!(
                "cannot combine {}/{} with {}/{}",
                self.case, self.side, other.case, other.side
            )));
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &FreqSeries) -> Result<FreqSeries> {
        self.check_compatible(other)?;
        let mut out = self.empty_like(self.f_max.clone().min(other.f_max.clone()));
        for (f, h, c) in self.terms().chain(other.terms()) {
            out.add_term(f.clone(), h, c.clone())?;
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &FreqSeries) -> Result<FreqSeries> {
        self.checked_add(&other.scale_rational(&Rational::from(-1)))
    }

    /// Multiplies every coefficient by `k`.
    pub fn scale(&self, k: &ZLaurent) -> Result<FreqSeries> {
        if k.nilpotency() != self.nilpotency() {
            return Err(Error::NilpotencyMismatch {
                left: self.nilpotency(),
                right: k.nilpotency(),
            });
        }
        Ok(self.map_coeffs(|_, c| c * k))
    }

    pub fn scale_rational(&self, k: &Rational) -> FreqSeries {
        self.map_coeffs(|_, c| c.scale(k))
    }

    /// Multiplication by a `t`-free scalar series `Σ w_g e^{g t}`.
    pub fn mul_scalar_series(&self, w: &TSeries) -> Result<FreqSeries> {
        if w.max_t_power() > 0 {
            return Err(Error::Structural(
                "scalar factor must not contain powers of t".into(),
            ));
        }
        let f_max = match (self.terms.keys().next(), w.min_frequency()) {
            (Some((fa, _)), Some(gb)) => (&self.f_max + gb).min(w.f_max() + fa),
            _ => self.f_max.clone().min(w.f_max().clone()),
        };
        let mut out = self.empty_like(f_max);
        for (f, h, c) in self.terms() {
            for (g, _, wv) in w.iter() {
                out.add_term(f + g, h, c.scale(wv))?;
            }
        }
        Ok(out)
    }

    /// Keeps only frequencies `≤ bound`.
    pub fn restrict(&self, bound: &Rational) -> FreqSeries {
        let f_max = bound.clone().min(self.f_max.clone());
        let mut out = self.empty_like(f_max.clone());
        for (f, h, c) in self.terms() {
            if *f <= f_max {
                out.terms.insert((f.clone(), h), c.clone());
            }
        }
        out
    }

    /// Coefficientwise equality, ignoring the truncation bounds.
    pub fn same_terms(&self, other: &FreqSeries) -> bool {
        self.case == other.case && self.side == other.side && self.terms == other.terms
    }

    pub fn to_json_value(&self) -> FreqSeriesJson {
        FreqSeriesJson {
            side: self.side,
            case: self.case,
            f_max: self.f_max.clone(),
            terms: self
                .terms()
                .map(|(f, h, c)| TermJson {
                    f: f.clone(),
                    sector: h,
                    z: c.terms()
                        .map(|(e, p)| ZTermJson {
                            exp: e,
                            h: p.coeffs().to_vec(),
                        })
                        .collect(),
                    z_floor: c.floor(),
                })
                .collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_json_value()).expect("series serialization")
    }

    pub fn from_json_value(v: FreqSeriesJson) -> Result<FreqSeries> {
        let mut out = FreqSeries::new(v.case, v.side, v.f_max)?;
        let s = out.nilpotency();
        for t in v.terms {
            let mut c = ZLaurent::zero(s);
            for zt in t.z {
                let p = HPoly::from_coeffs(zt.h)?;
                c = c.checked_add(&ZLaurent::monomial(zt.exp, p))?;
            }
            let c = c.with_floor(t.z_floor);
            if t.f > out.f_max {
                return Err(Error::Structural(format!(
                    "term at frequency {} exceeds f_max {}",
                    t.f, out.f_max
                )));
            }
            out.add_term(t.f, t.sector, c)?;
        }
        Ok(out)
    }

    pub fn from_json(s: &str) -> Result<FreqSeries> {
        let v: FreqSeriesJson =
            serde_json::from_str(s).map_err(|e| Error::InvalidInput(e.to_string()))?;
        FreqSeries::from_json_value(v)
    }

    /// Rows `(f, sector, z_exp, H_power, value)` for every nonzero coefficient.
    pub fn coefficient_rows(&self) -> Vec<(Rational, u32, i32, usize, Rational)> {
        let mut rows = Vec::new();
        for (f, h, c) in self.terms() {
            for (e, p) in c.terms() {
                for (k, v) in p.coeffs().iter().enumerate() {
                    if !v.is_zero() {
                        rows.push((f.clone(), h, e, k, v.clone()));
                    }
                }
            }
        }
        rows
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FreqSeriesJson {
    pub side: Side,
    pub case: ModelCase,
    pub f_max: Rational,
    pub terms: Vec<TermJson>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TermJson {
    pub f: Rational,
    pub sector: u32,
    pub z: Vec<ZTermJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub z_floor: Option<i32>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZTermJson {
    pub exp: i32,
    #[serde(rename = "H")]
    pub h: Vec<Rational>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    fn cubic_hybrid(f_max: i64) -> FreqSeries {
        FreqSeries::new(ModelCase::Cubic33, Side::Hybrid, Rational::from(f_max)).unwrap()
    }

    #[test]
    fn ddt_single_term() {
        let mut s = cubic_hybrid(10);
        s.add_term(q(1, 1), 1, ZLaurent::scalar(2, 1, q(1, 1)))
            .unwrap();
        let d = s.ddt();
        let c = d.term(&q(1, 1), 1).unwrap();
        assert_eq!(c, &ZLaurent::linear(2, q(1, 1), q(1, 1)));
        assert_eq!(c.window(), (0, 1));
        assert!(cubic_hybrid(3).ddt().is_zero());
    }

    #[test]
    fn ddt_twice_nilpotent() {
        let mut s = cubic_hybrid(10);
        s.add_term(q(1, 1), 1, ZLaurent::scalar(2, 1, q(1, 1)))
            .unwrap();
        let dd = s.ddt().ddt();
        // (1 + H/z)^2 z = z + 2H when H^2 = 0
        assert_eq!(
            dd.term(&q(1, 1), 1).unwrap(),
            &ZLaurent::linear(2, q(2, 1), q(1, 1))
        );
    }

    #[test]
    fn shift_freq_examples() {
        let mut s = cubic_hybrid(10);
        let c4 = ZLaurent::linear(2, q(7, 3), q(1, 1));
        s.add_term(q(4, 1), 1, c4.clone()).unwrap();
        let sh = s.shift_freq(&q(-3, 1));
        assert_eq!(sh.term(&q(1, 1), 1), Some(&c4));
        assert_eq!(sh.f_max(), &q(7, 1));
        assert!(cubic_hybrid(5).shift_freq(&q(-3, 1)).is_zero());
        // shifting upward drops what passes f_max but keeps the bound
        let up = s.shift_freq(&q(7, 1));
        assert!(up.is_zero());
        assert_eq!(up.f_max(), &q(10, 1));
    }

    #[test]
    fn shift_keeps_terms_below_minimum_frequency() {
        let mut s = cubic_hybrid(10);
        s.add_term(q(1, 1), 1, ZLaurent::scalar(2, 1, q(1, 1)))
            .unwrap();
        let sh = s.shift_freq(&q(-3, 1));
        assert!(sh.term(&q(-2, 1), 1).is_some());
    }

    #[test]
    fn add_and_cancel() {
        let mut s = cubic_hybrid(10);
        s.add_term(q(2, 1), 2, ZLaurent::linear(2, q(1, 1), q(3, 1)))
            .unwrap();
        let z = s.checked_add(&s.scale_rational(&q(-1, 1))).unwrap();
        assert!(z.is_zero());
        let gw = FreqSeries::new(ModelCase::Cubic33, Side::Gw, q(10, 1)).unwrap();
        assert!(matches!(s.checked_add(&gw), Err(Error::Structural(_))));
    }

    #[test]
    fn z_scaling_roundtrip() {
        let mut s = cubic_hybrid(10);
        s.add_term(q(4, 1), 1, ZLaurent::linear(2, q(7, 3), q(1, 1)))
            .unwrap();
        let zs = s.scale(&ZLaurent::scalar(2, 1, q(1, 1))).unwrap();
        let back = zs.scale(&ZLaurent::scalar(2, -1, q(1, 1))).unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn truncated_product_narrows_window() {
        let a = ZLaurent::scalar(2, 1, q(1, 1))
            .checked_add(&ZLaurent::scalar(2, 0, q(2, 1)))
            .unwrap();
        let a = a.truncate_below(0);
        let b = ZLaurent::scalar(2, 2, q(1, 1));
        let p = &a * &b;
        assert_eq!(p.floor(), Some(2));
        assert_eq!(p.window(), (2, 3));
    }

    #[test]
    fn laurent_inverse() {
        // (H + 2z)^{-1} with H^4 = 0
        let x = ZLaurent::linear(4, q(1, 1), q(2, 1));
        let inv = x.invert().unwrap();
        assert_eq!(&x * &inv, ZLaurent::one(4));
        assert_eq!(inv.coeff_hz(-1, 0), q(1, 2));
        assert_eq!(inv.coeff_hz(-2, 1), q(-1, 4));
        assert_eq!(inv.coeff_hz(-4, 3), q(-1, 16));
        // z + z^{-1} has two unit exponents
        let bad = ZLaurent::scalar(4, 1, q(1, 1))
            .checked_add(&ZLaurent::scalar(4, -1, q(1, 1)))
            .unwrap();
        assert!(bad.invert().is_err());
    }

    #[test]
    fn json_shape() {
        let mut s = cubic_hybrid(4);
        s.add_term(q(1, 1), 1, ZLaurent::scalar(2, 1, q(1, 1)))
            .unwrap();
        assert_eq!(
            s.to_json(),
            r#"{"side":"hybrid","case":"cubic33","f_max":"4/1","terms":[{"f":"1/1","sector":1,"z":[{"exp":1,"H":["1/1","0/1"]}]}]}"#
        );
        let parsed = FreqSeries::from_json(r#"{"side":"hybrid","case":"cubic33","f_max":"4","terms":[{"f":"1","sector":1,"z":[{"exp":1,"H":["1","0"]}]}]}"#).unwrap();
        assert_eq!(parsed, s);
    }

    fn arb_series() -> impl Strategy<Value = FreqSeries> {
        let term = (
            0i64..8,
            0u32..1,
            -2i32..3,
            proptest::collection::vec((-20i64..20, 1i64..5), 4),
        );
        proptest::collection::vec(term, 0..6).prop_map(|ts| {
            let mut s =
                FreqSeries::new(ModelCase::Quadric2222, Side::Gw, Rational::from(8)).unwrap();
            for (f, _, e, cs) in ts {
                let p =
                    HPoly::from_coeffs(cs.into_iter().map(|(n, d)| Rational::new(n, d)).collect())
                        .unwrap();
                s.add_term(Rational::from(f), 0, ZLaurent::monomial(e, p))
                    .unwrap();
            }
            s
        })
    }

    proptest! {
        #[test]
        fn ddt_shift_commutation(s in arb_series(), c in -3i64..4) {
            let c = Rational::from(c);
            let lhs = s.shift_freq(&c).ddt();
            let rhs = s.ddt().checked_add(&s.scale_rational(&c)).unwrap().shift_freq(&c);
            prop_assert!(lhs.same_terms(&rhs));
        }

        #[test]
        fn json_roundtrip(s in arb_series()) {
            prop_assert_eq!(FreqSeries::from_json(&s.to_json()).unwrap(), s);
        }
    }
}
