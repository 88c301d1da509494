//! Dense truncated power series `Σ_{n<len} a_n x^n` over the rationals.

use crate::error::{Error, Result};
use crate::ring::Rational;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PowerSeries {
    coeffs: Vec<Rational>,
}

impl PowerSeries {
    /// Series known modulo `x^len`; missing coefficients are zero.
    pub fn new(mut coeffs: Vec<Rational>, len: usize) -> Self {
        coeffs.resize(len, Rational::zero());
        PowerSeries { coeffs }
    }

    pub fn zero(len: usize) -> Self {
        PowerSeries::new(Vec::new(), len)
    }

    pub fn one(len: usize) -> Self {
        PowerSeries::new(vec![Rational::one()], len)
    }

    /// The variable `x` itself.
    pub fn var(len: usize) -> Self {
        PowerSeries::new(vec![Rational::zero(), Rational::one()], len)
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn coeff(&self, n: usize) -> Rational {
        self.coeffs.get(n).cloned().unwrap_or_default()
    }

    fn common_len(&self, other: &PowerSeries) -> usize {
        self.len().min(other.len())
    }

    pub fn add(&self, other: &PowerSeries) -> PowerSeries {
        let n = self.common_len(other);
        PowerSeries {
            coeffs: (0..n).map(|i| &self.coeffs[i] + &other.coeffs[i]).collect(),
        }
    }

    pub fn sub(&self, other: &PowerSeries) -> PowerSeries {
        let n = self.common_len(other);
        PowerSeries {
            coeffs: (0..n).map(|i| &self.coeffs[i] - &other.coeffs[i]).collect(),
        }
    }

    pub fn scale(&self, c: &Rational) -> PowerSeries {
        PowerSeries {
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
        }
    }

    pub fn mul(&self, other: &PowerSeries) -> PowerSeries {
        let n = self.common_len(other);
        let mut out = vec![Rational::zero(); n];
        for (i, a) in self.coeffs.iter().enumerate().take(n) {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate().take(n - i) {
                out[i + j] += &(a * b);
            }
        }
        PowerSeries { coeffs: out }
    }

    pub fn pow(&self, k: u32) -> PowerSeries {
        let mut out = PowerSeries::one(self.len());
        for _ in 0..k {
            out = out.mul(self);
        }
        out
    }

    pub fn inverse(&self) -> Result<PowerSeries> {
        let a0 = self.coeff(0);
        let inv0 = a0.recip()?;
        let n = self.len();
        let mut out: Vec<Rational> = Vec::with_capacity(n);
        for k in 0..n {
            if k == 0 {
                out.push(inv0.clone());
                continue;
            }
            let mut acc = Rational::zero();
            for j in 1..=k {
                acc += &(&self.coeffs[j] * &out[k - j]);
            }
            out.push(-(acc * &inv0));
        }
        Ok(PowerSeries { coeffs: out })
    }

    /// `x·d/dx`.
    pub fn theta(&self) -> PowerSeries {
        PowerSeries {
            coeffs: self
                .coeffs
                .iter()
                .enumerate()
                .map(|(n, a)| a * &Rational::from(n as i64))
                .collect(),
        }
    }

    /// `exp` of a series without constant term, via `θE = E·θf`.
    pub fn exp(&self) -> Result<PowerSeries> {
        if !self.coeff(0).is_zero() {
            return Err(Error::InvalidInput(
                "exp needs a series without constant term".into(),
            ));
        }
        let n = self.len();
        let df = self.theta();
        let mut e = vec![Rational::zero(); n];
        if n > 0 {
            e[0] = Rational::one();
        }
        for k in 1..n {
            let mut acc = Rational::zero();
            for j in 1..=k {
                acc += &(&df.coeffs[j] * &e[k - j]);
            }
            e[k] = acc / Rational::from(k as i64);
        }
        Ok(PowerSeries { coeffs: e })
    }

    /// `self(g(x))` for `g` without constant term.
    pub fn compose(&self, g: &PowerSeries) -> Result<PowerSeries> {
        if !g.coeff(0).is_zero() {
            return Err(Error::InvalidInput("inner series must vanish at 0".into()));
        }
        let n = self.common_len(g);
        let mut out = PowerSeries::zero(n);
        // Horner from the top
        for a in self.coeffs.iter().take(n).rev() {
            out = out.mul(g);
            out.coeffs[0] += a;
        }
        Ok(out)
    }

    /// Compositional inverse of `g = x + O(x^2)`.
    pub fn reversion(&self) -> Result<PowerSeries> {
        if !self.coeff(0).is_zero() || self.coeff(1) != Rational::one() {
            return Err(Error::InvalidInput("reversion needs x + O(x^2)".into()));
        }
        let n = self.len();
        let x = PowerSeries::var(n);
        // fixed point h = x - (g(h) - h), one new coefficient per round
        let mut h = x.clone();
        for _ in 1..n {
            let gh = self.compose(&h)?;
            h = h.sub(&gh.sub(&x));
        }
        Ok(h)
    }
}
