//! Explicit series: the Gromov-Witten and hybrid I-functions, the degree-`d`
//! pieces of the P^1 / P^3 J-functions, the specialised twisting factors
//! `M_Θ`, and the assembly of the hybrid I-function out of the last two.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ring::{HPoly, ModelCase, Rational};
use crate::series::{FreqSeries, Side, ZLaurent};

/// Which series to generate and how far: `order` is the largest degree index
/// `d` included.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ISeriesSpec {
    pub case: ModelCase,
    pub side: Side,
    pub order: u32,
}

impl ISeriesSpec {
    pub fn new(case: ModelCase, side: Side, order: u32) -> Self {
        ISeriesSpec { case, side, order }
    }
}

pub fn i_series(spec: &ISeriesSpec) -> Result<FreqSeries> {
    match spec.side {
        Side::Gw => i_gw(spec),
        Side::Hybrid => i_hybrid(spec),
    }
}

/// Caches `(a H + b z)^{±e}` for the linear factors that recur in products.
struct FactorCache {
    nilpotency: usize,
    cache: BTreeMap<(Rational, i64, i64), ZLaurent>,
}

impl FactorCache {
    fn new(nilpotency: usize) -> Self {
        FactorCache {
            nilpotency,
            cache: BTreeMap::new(),
        }
    }

    /// `(a H + b z)^exp`, negative powers allowed when `b ≠ 0`.
    fn get(&mut self, a: &Rational, b: i64, exp: i64) -> ZLaurent {
        let key = (a.clone(), b, exp);
        if let Some(v) = self.cache.get(&key) {
            return v.clone();
        }
        let base = ZLaurent::linear(self.nilpotency, a.clone(), Rational::from(b));
        let base = if exp < 0 {
            base.invert()
                .expect("linear factor with nonzero z part is a unit")
        } else {
            base
        };
        let v = base.pow(exp.unsigned_abs() as u32);
        self.cache.insert(key, v.clone());
        v
    }
}

/// Hybrid I-function: over `d ≥ 0`, `d ≢ -1 (mod δ)`, the term
/// `z e^{(d+1 + H/z)t} δ^{-E⌊d/δ⌋} ∏_{b≡d+1}(H+bz)^{e_num} / ∏_{b≢d+1}(H+bz)^{e_den}`
/// in sector `(d+1) mod δ`.
pub fn i_hybrid(spec: &ISeriesSpec) -> Result<FreqSeries> {
    if spec.side != Side::Hybrid {
        return Err(Error::UnsupportedCase {
            case: spec.case,
            what: "i_hybrid on the gw side".into(),
        });
    }
    let case = spec.case;
    let (big_e, e_num, e_den) = case.hybrid_exponents()?;
    let delta = case.degree() as i64;
    let s = case.lg_nilpotency()?;
    let mut out = FreqSeries::new(case, Side::Hybrid, Rational::from(spec.order as i64 + 1))?;
    let mut cache = FactorCache::new(s);
    let one = Rational::one();

    for rho in case.narrow_sectors() {
        let rho = rho as i64;
        // d runs over d ≡ rho - 1 (mod δ); keep ∏ over b ≤ d incrementally
        let mut d = rho - 1;
        let mut product = ZLaurent::scalar(s, 1, one.clone());
        let mut last_b = 0i64;
        while d <= spec.order as i64 {
            for b in (last_b + 1)..=d {
                let f = if (b - rho).rem_euclid(delta) == 0 {
                    cache.get(&one, b, e_num as i64)
                } else {
                    cache.get(&one, b, -(e_den as i64))
                };
                product = &product * &f;
            }
            last_b = d;
            let norm = Rational::from(delta).pow(-((big_e as i64 * (d / delta)) as i32));
            out.add_term(Rational::from(d + 1), rho as u32, product.scale(&norm))?;
            d += delta;
        }
    }
    Ok(out)
}

/// Gromov-Witten I-function: `Σ_d z e^{(d + H/z)t} ∏_i ∏_{k=1}^{d_i d}(d_i H + kz) / ∏_{k=1}^d (H+kz)^N`.
pub fn i_gw(spec: &ISeriesSpec) -> Result<FreqSeries> {
    if spec.side != Side::Gw {
        return Err(Error::UnsupportedCase {
            case: spec.case,
            what: "i_gw on the hybrid side".into(),
        });
    }
    let case = spec.case;
    let s = case.gw_nilpotency();
    let n = case.n_vars() as i64;
    let mut out = FreqSeries::new(case, Side::Gw, Rational::from(spec.order as i64))?;
    let mut cache = FactorCache::new(s);
    let mut product = ZLaurent::scalar(s, 1, Rational::one());
    out.add_term(Rational::zero(), 0, product.clone())?;
    for d in 1..=spec.order as i64 {
        for &di in &case.degrees() {
            let di = di as i64;
            let a = Rational::from(di);
            for k in (di * (d - 1) + 1)..=(di * d) {
                product = &product * &cache.get(&a, k, 1);
            }
        }
        product = &product * &cache.get(&Rational::one(), d, -n);
        out.add_term(Rational::from(d), 0, product.clone())?;
    }
    Ok(out)
}

/// `(δ, r)`: prefactor and denominator power of the degree-`d` J-contribution
/// of the target `P^{r-1}`.
fn j_shape(case: ModelCase) -> Result<(i64, i64)> {
    case.ensure_lg("the P^{r-1} J-function")?;
    Ok((case.degree() as i64, case.n_polys() as i64))
}

/// Degree-`d` J-contribution `δ z e^{(H/z + d)t} / ((H+z)⋯(H+dz))^r`, in sector
/// `(d+1) mod δ`.
pub fn givental_j_contribution(case: ModelCase, d: u32) -> Result<FreqSeries> {
    let (delta, r) = j_shape(case)?;
    let s = case.lg_nilpotency()?;
    let mut cache = FactorCache::new(s);
    let mut c = ZLaurent::scalar(s, 1, Rational::from(delta));
    for k in 1..=d as i64 {
        c = &c * &cache.get(&Rational::one(), k, -r);
    }
    let mut out = FreqSeries::new(case, Side::Hybrid, Rational::from(d as i64))?;
    let sector = ((d as i64 + 1) % delta) as u32;
    out.add_term(Rational::from(d as i64), sector, c)?;
    Ok(out)
}

/// `M_Θ = ∏_{0 ≤ b < (d+1)/δ, {b} = {(d+1)/δ}} (H/δ + b z)^N`.
///
/// Vanishes exactly when `d + 1 ≡ 0 (mod δ)`: the `b = 0` factor is a
/// multiple of `H` raised past the nilpotency.
pub fn m_theta(case: ModelCase, d: u32) -> Result<ZLaurent> {
    case.ensure_lg("M_Θ")?;
    let delta = case.degree() as i64;
    let s = case.lg_nilpotency()?;
    let n = case.n_vars() as u32;
    let h_coeff = Rational::new(1, delta);
    let top = Rational::new(d as i64 + 1, delta);
    let mut out = ZLaurent::one(s);
    let mut b = &top - &Rational::one();
    while !b.is_negative() {
        let factor = ZLaurent::linear(s, h_coeff.clone(), b.clone()).pow(n);
        out = &out * &factor;
        b = &b - &Rational::one();
    }
    Ok(out)
}

/// `(1/δ) e^t Σ_{d ≤ order} M_Θ(d)·J_d`.
pub fn assemble_hybrid_via_mtheta(case: ModelCase, order: u32) -> Result<FreqSeries> {
    let delta = case.degree() as i64;
    let inv_delta = Rational::new(1, delta);
    let mut out = FreqSeries::new(case, Side::Hybrid, Rational::from(order as i64 + 1))?;
    for d in 0..=order {
        let m = m_theta(case, d)?;
        if m.is_zero() {
            continue;
        }
        let j = givental_j_contribution(case, d)?;
        for (f, h, c) in j.terms() {
            out.add_term(f + &Rational::one(), h, (&m * c).scale(&inv_delta))?;
        }
    }
    Ok(out)
}

/// `H^0` part of the `z^1` coefficient at frequency `f`, a convenience for
/// tests and reports.
pub fn leading_scalar(s: &FreqSeries, f: i64, sector: u32) -> Rational {
    s.term(&Rational::from(f), sector)
        .map(|c| c.coeff_hz(1, 0))
        .unwrap_or_default()
}

/// Sector ring element `H` for the given series.
pub fn hyperplane(s: &FreqSeries) -> HPoly {
    HPoly::generator(s.nilpotency())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::factorial;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    /// Expands `z ∏ (H + b z)^{e}` for the given list of `(b, e)` by brute
    /// force: multiply out as bivariate polynomials in (H, z) with exact
    /// geometric series for negative powers, independent of `FactorCache`.
    fn brute_hybrid(s: usize, delta: i64, big_e: i64, e_num: i64, e_den: i64, d: i64) -> ZLaurent {
        // represent an element as map (H power, z power) -> coeff
        type Poly = BTreeMap<(usize, i32), Rational>;
        fn mul(a: &Poly, b: &Poly, s: usize) -> Poly {
            let mut out = Poly::new();
            for ((ha, za), ca) in a {
                for ((hb, zb), cb) in b {
                    if ha + hb < s {
                        let e = out.entry((ha + hb, za + zb)).or_default();
                        *e += &(ca * cb);
                    }
                }
            }
            out.retain(|_, v| !v.is_zero());
            out
        }
        // (H + bz)^{-1} = Σ_j (-1)^j H^j / (b z)^{j+1}
        let inv = |b: i64| -> Poly {
            (0..s)
                .map(|j| {
                    let c = q(if j % 2 == 0 { 1 } else { -1 }, 1)
                        * Rational::from(b).pow(-(j as i32 + 1));
                    ((j, -(j as i32) - 1), c)
                })
                .collect()
        };
        let lin = |b: i64| -> Poly {
            [((1, 0), q(1, 1)), ((0, 1), Rational::from(b))]
                .into_iter()
                .collect()
        };
        let mut acc: Poly = [(
            (0usize, 1i32),
            Rational::from(delta).pow(-((big_e * (d / delta)) as i32)),
        )]
        .into_iter()
        .collect();
        for b in 1..=d {
            if (b - (d + 1)).rem_euclid(delta) == 0 {
                for _ in 0..e_num {
                    acc = mul(&acc, &lin(b), s);
                }
            } else {
                for _ in 0..e_den {
                    acc = mul(&acc, &inv(b), s);
                }
            }
        }
        let mut out = ZLaurent::zero(s);
        for ((h, z), c) in acc {
            out = &out + &ZLaurent::monomial(z, HPoly::monomial(s, h, c));
        }
        out
    }

    #[test]
    fn cubic_hybrid_low_terms() {
        let s = i_hybrid(&ISeriesSpec::new(ModelCase::Cubic33, Side::Hybrid, 3)).unwrap();
        assert_eq!(
            s.term(&q(1, 1), 1).unwrap(),
            &ZLaurent::scalar(2, 1, q(1, 1))
        );
        // d = 3: (z + 7/3 H)/26244
        let c = s.term(&q(4, 1), 1).unwrap();
        assert_eq!(c, &ZLaurent::linear(2, q(7, 3 * 26244), q(1, 26244)));
        // d = 2 is absent (broad)
        assert!(s.term(&q(3, 1), 0).is_none());
        assert_eq!(s.len(), 3);
    }

    #[test]
    fn hybrid_terms_match_brute_expansion() {
        for (case, order) in [(ModelCase::Cubic33, 14), (ModelCase::Quadric2222, 10)] {
            let (e, en, ed) = case.hybrid_exponents().unwrap();
            let delta = case.degree() as i64;
            let s = i_hybrid(&ISeriesSpec::new(case, Side::Hybrid, order)).unwrap();
            for d in 0..=order as i64 {
                let sector = ((d + 1) % delta) as u32;
                if sector == 0 {
                    continue;
                }
                let want = brute_hybrid(case.n_polys(), delta, e as i64, en as i64, ed as i64, d);
                assert_eq!(
                    s.term(&Rational::from(d + 1), sector).unwrap(),
                    &want,
                    "{case} d={d}"
                );
            }
        }
    }

    #[test]
    fn quadric_hybrid_d2_leading() {
        let s = i_hybrid(&ISeriesSpec::new(ModelCase::Quadric2222, Side::Hybrid, 2)).unwrap();
        assert_eq!(leading_scalar(&s, 3, 1), q(1, 4096));
        // (2k)!^4 / (4^{8k} k!^8) at k = 1
        let k = 1u32;
        let g0 = Rational::from(factorial(2 * k)).pow(4)
            / (Rational::from(4).pow(8 * k as i32) * Rational::from(factorial(k)).pow(8));
        assert_eq!(leading_scalar(&s, 3, 1), g0);
    }

    #[test]
    fn hybrid_rejects_quintic_and_gw() {
        assert!(i_hybrid(&ISeriesSpec::new(ModelCase::Quintic, Side::Hybrid, 3)).is_err());
        assert!(i_hybrid(&ISeriesSpec::new(ModelCase::Cubic33, Side::Gw, 3)).is_err());
        assert!(i_gw(&ISeriesSpec::new(ModelCase::Cubic33, Side::Hybrid, 3)).is_err());
    }

    #[test]
    fn gw_hypergeometric_scalars() {
        for case in ModelCase::ALL {
            let s = i_gw(&ISeriesSpec::new(case, Side::Gw, 4)).unwrap();
            assert_eq!(
                s.term(&q(0, 1), 0).unwrap(),
                &ZLaurent::scalar(4, 1, q(1, 1))
            );
            for d in 0..=4u32 {
                // ∏_i (d_i d)! / (d!)^N
                let mut want = Rational::one();
                for di in case.degrees() {
                    want = want * Rational::from(factorial(di * d));
                }
                want = want / Rational::from(factorial(d)).pow(case.n_vars() as i32);
                assert_eq!(leading_scalar(&s, d as i64, 0), want, "{case} d={d}");
            }
        }
        let s = i_gw(&ISeriesSpec::new(ModelCase::Cubic33, Side::Gw, 2)).unwrap();
        assert_eq!(leading_scalar(&s, 1, 0), q(36, 1));
        assert_eq!(leading_scalar(&s, 2, 0), q(8100, 1));
    }

    #[test]
    fn gw_terms_are_homogeneous() {
        let s = i_gw(&ISeriesSpec::new(ModelCase::Quadric2222, Side::Gw, 6)).unwrap();
        for (_, _, c) in s.terms() {
            for (e, p) in c.terms() {
                for (k, v) in p.coeffs().iter().enumerate() {
                    if !v.is_zero() {
                        assert_eq!(e + k as i32, 1);
                    }
                }
            }
        }
    }

    #[test]
    fn givental_contributions() {
        let j0 = givental_j_contribution(ModelCase::Cubic33, 0).unwrap();
        assert_eq!(
            j0.term(&q(0, 1), 1).unwrap(),
            &ZLaurent::scalar(2, 1, q(3, 1))
        );
        let j0 = givental_j_contribution(ModelCase::Quadric2222, 0).unwrap();
        assert_eq!(
            j0.term(&q(0, 1), 1).unwrap(),
            &ZLaurent::scalar(4, 1, q(2, 1))
        );
        // 3z/(H+z)^2 = 3/z - 6H/z^2 with H^2 = 0
        let j1 = givental_j_contribution(ModelCase::Cubic33, 1).unwrap();
        let want = ZLaurent::scalar(2, -1, q(3, 1))
            .checked_add(&ZLaurent::monomial(-2, HPoly::monomial(2, 1, q(-6, 1))))
            .unwrap();
        assert_eq!(j1.term(&q(1, 1), 2).unwrap(), &want);
    }

    #[test]
    fn m_theta_examples() {
        assert_eq!(m_theta(ModelCase::Cubic33, 0).unwrap(), ZLaurent::one(2));
        assert!(m_theta(ModelCase::Cubic33, 2).unwrap().is_zero());
        assert!(m_theta(ModelCase::Quadric2222, 1).unwrap().is_zero());
        // (H/3 + z/3)^6 with H^2 = 0
        let want = ZLaurent::scalar(2, 6, q(1, 729))
            .checked_add(&ZLaurent::monomial(5, HPoly::monomial(2, 1, q(2, 243))))
            .unwrap();
        assert_eq!(m_theta(ModelCase::Cubic33, 3).unwrap(), want);
    }

    #[test]
    fn m_theta_matches_integer_form() {
        // δ^{-N⌊d/δ⌋} ∏_{1≤b≤d, b≡d+1} (H + bz)^N
        for case in ModelCase::LG {
            let delta = case.degree() as i64;
            let n = case.n_vars() as u32;
            let s = case.n_polys();
            for d in 0..12i64 {
                if (d + 1) % delta == 0 {
                    continue;
                }
                let mut want = ZLaurent::scalar(
                    s,
                    0,
                    Rational::from(delta).pow(-((n as i64 * (d / delta)) as i32)),
                );
                for b in 1..=d {
                    if (b - d - 1).rem_euclid(delta) == 0 {
                        want = &want * &ZLaurent::linear(s, q(1, 1), Rational::from(b)).pow(n);
                    }
                }
                assert_eq!(m_theta(case, d as u32).unwrap(), want, "{case} d={d}");
            }
        }
    }

    #[test]
    fn assembly_low_orders() {
        let a = assemble_hybrid_via_mtheta(ModelCase::Cubic33, 0).unwrap();
        let i = i_hybrid(&ISeriesSpec::new(ModelCase::Cubic33, Side::Hybrid, 0)).unwrap();
        assert_eq!(a, i);
        for case in ModelCase::LG {
            let a = assemble_hybrid_via_mtheta(case, 9).unwrap();
            let i = i_hybrid(&ISeriesSpec::new(case, Side::Hybrid, 9)).unwrap();
            assert_eq!(a, i, "{case}");
        }
    }

    #[test]
    fn hybrid_sectors_are_narrow_and_congruent() {
        for case in ModelCase::LG {
            let s = i_hybrid(&ISeriesSpec::new(case, Side::Hybrid, 20)).unwrap();
            let delta = case.degree() as i64;
            for (f, h, _) in s.terms() {
                let f = f.to_i64().unwrap();
                assert!(f > 0);
                assert_ne!(h, 0);
                assert_eq!(f.rem_euclid(delta), h as i64);
            }
        }
    }
}
