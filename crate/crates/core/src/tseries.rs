//! Scalar exponential-polynomial series `Σ c_{f,k} t^k e^{f t}`, truncated above a
//! frequency bound. Frobenius solutions, the ω functions and mirror maps all
//! live here.

use std::collections::BTreeMap;

use rug::ops::Pow;
use rug::{Complex, Float};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ring::Rational;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TSeries {
    f_max: Rational,
    terms: BTreeMap<(Rational, u32), Rational>,
}

/// One `(f, k, c)` entry, i.e. `c·t^k·e^{f t}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TTerm {
    pub f: Rational,
    pub t_power: u32,
    pub value: Rational,
}

impl std::fmt::Display for TSeries {
    fn fmt(&self, out: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_empty() {
            return out.write_str("0");
        }
        for (n, (f, k, c)) in self.iter().enumerate() {
            if n > 0 {
                out.write_str(" + ")?;
            }
            write!(out, "({c})")?;
            match k {
                0 => {}
                1 => out.write_str("·t")?,
                _ => write!(out, "·t^{k}")?,
            }
            if !f.is_zero() {
                write!(out, "·e^({f}·t)")?;
            }
        }
        Ok(())
    }
}

/// Serialized as its list of terms.
impl Serialize for TSeries {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        self.to_terms().serialize(serializer)
    }
}

impl TSeries {
    pub fn new(f_max: Rational) -> Self {
        TSeries {
            f_max,
            terms: BTreeMap::new(),
        }
    }

    pub fn from_terms<I>(f_max: Rational, terms: I) -> Self
    where
        I: IntoIterator<Item = (Rational, u32, Rational)>,
    {
        let mut s = TSeries::new(f_max);
        for (f, k, c) in terms {
            s.add_term(f, k, c);
        }
        s
    }

    pub fn f_max(&self) -> &Rational {
        &self.f_max
    }

    /// Adds `c·t^k·e^{f t}`; terms above the truncation bound are ignored.
    pub fn add_term(&mut self, f: Rational, k: u32, c: Rational) {
        if c.is_zero() || f > self.f_max {
            return;
        }
        let key = (f, k);
        let entry = self.terms.entry(key.clone()).or_default();
        *entry += &c;
        if entry.is_zero() {
            self.terms.remove(&key);
        }
    }

    pub fn coeff(&self, f: &Rational, k: u32) -> Rational {
        self.terms.get(&(f.clone(), k)).cloned().unwrap_or_default()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Rational, u32, &Rational)> {
        self.terms.iter().map(|((f, k), c)| (f, *k, c))
    }

    pub fn to_terms(&self) -> Vec<TTerm> {
        self.iter()
            .map(|(f, k, c)| TTerm {
                f: f.clone(),
                t_power: k,
                value: c.clone(),
            })
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn min_frequency(&self) -> Option<&Rational> {
        self.terms.keys().next().map(|(f, _)| f)
    }

    pub fn max_t_power(&self) -> u32 {
        self.terms.keys().map(|(_, k)| *k).max().unwrap_or(0)
    }

    /// Frequencies present, ascending and deduplicated.
    pub fn frequencies(&self) -> Vec<Rational> {
        let mut out: Vec<Rational> = self.terms.keys().map(|(f, _)| f.clone()).collect();
        out.dedup();
        out
    }

    pub fn restrict(&self, bound: &Rational) -> TSeries {
        let f_max = bound.min(&self.f_max).clone();
        TSeries {
            terms: self
                .terms
                .iter()
                .filter(|((f, _), _)| *f <= f_max)
                .map(|(k, v)| (k.clone(), v.clone()))
                .collect(),
            f_max,
        }
    }

    pub fn scale(&self, c: &Rational) -> TSeries {
        let mut out = TSeries::new(self.f_max.clone());
        for (f, k, v) in self.iter() {
            out.add_term(f.clone(), k, v * c);
        }
        out
    }

    /// Multiplication by `e^{c t}`.
    pub fn shift(&self, c: &Rational) -> TSeries {
        let mut out = TSeries::new(&self.f_max + c);
        for (f, k, v) in self.iter() {
            out.add_term(f + c, k, v.clone());
        }
        out
    }

    pub fn add(&self, other: &TSeries) -> TSeries {
        let mut out = TSeries::new(self.f_max.clone().min(other.f_max.clone()));
        for (f, k, v) in self.iter().chain(other.iter()) {
            out.add_term(f.clone(), k, v.clone());
        }
        out
    }

    pub fn sub(&self, other: &TSeries) -> TSeries {
        self.add(&other.scale(&Rational::from(-1)))
    }

    /// Truncated product; the result is complete up to
    /// `min(f_max(a) + min(b), f_max(b) + min(a))`.
    pub fn mul(&self, other: &TSeries) -> TSeries {
        let f_max = match (self.min_frequency(), other.min_frequency()) {
            (Some(ma), Some(mb)) => (&self.f_max + mb).min(&other.f_max + ma),
            _ => self.f_max.clone().min(other.f_max.clone()),
        };
        let mut out = TSeries::new(f_max);
        for (fa, ka, va) in self.iter() {
            for (fb, kb, vb) in other.iter() {
                let f = fa + fb;
                if f > out.f_max {
                    break;
                }
                out.add_term(f, ka + kb, va * vb);
            }
        }
        out
    }

    /// Derivative in `t`: `c t^k e^{ft} ↦ c (f t^k + k t^{k-1}) e^{ft}`.
    pub fn ddt(&self) -> TSeries {
        let mut out = TSeries::new(self.f_max.clone());
        for (f, k, v) in self.iter() {
            out.add_term(f.clone(), k, v * f);
            if k > 0 {
                out.add_term(f.clone(), k - 1, v * &Rational::from(k as i64));
            }
        }
        out
    }

    /// Multiplicative inverse of a `t`-free series with a nonzero lowest term.
    pub fn inverse(&self) -> Result<TSeries> {
        if self.max_t_power() > 0 {
            return Err(Error::Structural(
                "can only invert series without powers of t".into(),
            ));
        }
        let (f0, d0) = match self.terms.iter().next() {
            Some(((f, _), c)) => (f.clone(), c.clone()),
            None => return Err(Error::NonUnit("zero series".into())),
        };
        let inv0 = d0.recip()?;
        let g_max = &self.f_max - &f0;
        // r = D/(d0 e^{f0 t}) - 1, all frequencies > 0
        let mut minus_r = TSeries::new(g_max.clone());
        for (f, _, c) in self.iter().skip(1) {
            minus_r.add_term(f - &f0, 0, -(c * &inv0));
        }
        let mut sum = TSeries::from_terms(g_max.clone(), [(Rational::zero(), 0, Rational::one())]);
        let mut power = sum.clone();
        while !minus_r.is_zero() {
            power = power.mul(&minus_r).restrict(&g_max);
            if power.is_zero() {
                break;
            }
            sum = sum.add(&power);
        }
        let mut out = TSeries::new(&g_max - &f0);
        for (f, k, c) in sum.iter() {
            out.add_term(f - &f0, k, c * &inv0);
        }
        Ok(out)
    }

    pub fn div(&self, denominator: &TSeries) -> Result<TSeries> {
        Ok(self.mul(&denominator.inverse()?))
    }

    /// Values of `d^m/dt^m` of the series at complex `t`, for `m = 0..=order`.
    pub fn eval_derivatives(&self, t: &Complex, order: usize, prec: u32) -> Vec<Complex> {
        let mut out = vec![Complex::with_val(prec, 0); order + 1];
        // powers of t up to the maximal t-power
        let kmax = self.max_t_power() as usize;
        let mut tpow = vec![Complex::with_val(prec, 1)];
        for i in 1..=kmax {
            let next = Complex::with_val(prec, &tpow[i - 1] * t);
            tpow.push(next);
        }
        for f in self.frequencies() {
            let ff = f.to_float(prec);
            let e = Complex::with_val(prec, &ff * t).exp();
            // polynomial part P(t) = Σ_k c_k t^k; derivative m of P e^{ft}
            // is e^{ft} Σ_i C(m,i) f^{m-i} P^{(i)}(t)
            let coeffs: Vec<(u32, Float)> = (0..=kmax as u32)
                .map(|k| (k, self.coeff(&f, k).to_float(prec)))
                .filter(|(_, c)| !c.is_zero())
                .collect();
            let mut pderiv = Vec::with_capacity(order + 1);
            for i in 0..=order {
                let mut acc = Complex::with_val(prec, 0);
                for (k, c) in &coeffs {
                    let k = *k as usize;
                    if k < i {
                        continue;
                    }
                    let falling: u64 = ((k - i + 1)..=k).map(|x| x as u64).product();
                    let term = Complex::with_val(prec, &tpow[k - i] * c) * falling;
                    acc += term;
                }
                pderiv.push(acc);
            }
            for (m, slot) in out.iter_mut().enumerate() {
                let mut acc = Complex::with_val(prec, 0);
                let mut binom = 1u64;
                for (i, pd) in pderiv.iter().enumerate().take(m + 1) {
                    let fp = Float::with_val(prec, ff.clone().pow((m - i) as u32));
                    acc += Complex::with_val(prec, pd * &fp) * binom;
                    binom = binom * (m - i) as u64 / (i + 1) as u64;
                }
                *slot += acc * &e;
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    #[test]
    fn inverse_of_geometric_series() {
        // 1/(1 - e^t) = Σ e^{kt}
        let d = TSeries::from_terms(q(10, 1), [(q(0, 1), 0, q(1, 1)), (q(1, 1), 0, q(-1, 1))]);
        let inv = d.inverse().unwrap();
        assert_eq!(inv.f_max(), &q(10, 1));
        for k in 0..=10 {
            assert_eq!(inv.coeff(&q(k, 1), 0), q(1, 1));
        }
        let prod = d.mul(&inv);
        assert_eq!(prod.len(), 1);
        assert_eq!(prod.coeff(&q(0, 1), 0), q(1, 1));
    }

    #[test]
    fn division_keeps_t_linear_part() {
        // (t e^t)/(e^t) = t
        let n = TSeries::from_terms(q(7, 1), [(q(1, 1), 1, q(1, 1))]);
        let d = TSeries::from_terms(q(7, 1), [(q(1, 1), 0, q(1, 1))]);
        let r = n.div(&d).unwrap();
        assert_eq!(r.len(), 1);
        assert_eq!(r.coeff(&q(0, 1), 1), q(1, 1));
        assert!(matches!(d.div(&n), Err(Error::Structural(_))));
    }

    #[test]
    fn ddt_product_rule() {
        let a = TSeries::from_terms(q(5, 1), [(q(1, 1), 1, q(2, 1)), (q(3, 1), 0, q(1, 3))]);
        let b = TSeries::from_terms(q(5, 1), [(q(0, 1), 0, q(1, 1)), (q(2, 1), 2, q(-1, 1))]);
        let lhs = a.mul(&b).ddt();
        let rhs = a.ddt().mul(&b).add(&a.mul(&b.ddt()));
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn numeric_derivatives_match_exact_ddt() {
        let prec = 200;
        let a = TSeries::from_terms(
            q(5, 1),
            [
                (q(1, 3), 1, q(2, 1)),
                (q(4, 3), 2, q(1, 7)),
                (q(0, 1), 0, q(-1, 1)),
            ],
        );
        let t = Complex::with_val(prec, (0.3, -0.7));
        let ders = a.eval_derivatives(&t, 3, prec);
        let mut exact = a.clone();
        for der in ders.iter() {
            let v = exact.eval_derivatives(&t, 0, prec).remove(0);
            let diff = Complex::with_val(prec, der - &v).abs().real().to_f64();
            assert!(diff < 1e-50, "{diff}");
            exact = exact.ddt();
        }
    }
}
