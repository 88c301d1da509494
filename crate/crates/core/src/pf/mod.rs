//! Picard-Fuchs operators `∏(D - a)^k - A·e^{c t}·∏(D - b)^k` with
//! `D = λ·d/dt`, applied exactly to frequency series.

mod frobenius;
mod yukawa;

use std::fmt;

use serde::{Deserialize, Serialize};

pub use frobenius::{frobenius_components, z_one_component, FrobeniusBasis, FrobeniusSolution};
pub use yukawa::{yukawa, YukawaReport};

use crate::error::{Error, Result};
use crate::ifunc::{i_series, ISeriesSpec};
use crate::ring::{ModelCase, Rational};
use crate::series::{FreqSeries, FreqSeriesJson, Side, ZLaurent};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PFOperator {
    /// `λ` in `D = λ·d/dt`.
    pub scale: Rational,
    /// `(a, k)` for the factors `(D - a)^k` of the unshifted part.
    pub left: Vec<(Rational, u32)>,
    pub constant: Rational,
    /// Frequency shift `c` of the second part, i.e. the factor `e^{c t}`.
    pub shift: Rational,
    /// `(b, k)` for the factors `(D - b)^k` of the shifted part.
    pub right: Vec<(Rational, u32)>,
}

fn grouped(mut roots: Vec<Rational>) -> Vec<(Rational, u32)> {
    roots.sort();
    let mut out: Vec<(Rational, u32)> = Vec::new();
    for r in roots {
        match out.last_mut() {
            Some((last, k)) if *last == r => *k += 1,
            _ => out.push((r, 1)),
        }
    }
    out
}

/// Coefficients of `∏ (x - a)^k` in ascending powers of `x`.
fn expand_roots(roots: &[(Rational, u32)]) -> Vec<Rational> {
    let mut poly = vec![Rational::one()];
    for (a, k) in roots {
        for _ in 0..*k {
            let mut next = vec![Rational::zero(); poly.len() + 1];
            for (i, c) in poly.iter().enumerate() {
                next[i + 1] += c;
                next[i] -= &(c * a);
            }
            poly = next;
        }
    }
    poly
}

/// Stirling numbers of the second kind `S(n, j)`, `0 ≤ j ≤ n ≤ max`.
fn stirling2(max: usize) -> Vec<Vec<i64>> {
    let mut s = vec![vec![0i64; max + 1]; max + 1];
    s[0][0] = 1;
    for n in 1..=max {
        for j in 1..=n {
            s[n][j] = j as i64 * s[n - 1][j] + s[n - 1][j - 1];
        }
    }
    s
}

impl PFOperator {
    /// `θ^4 - A q ∏_{i,k} (θ + k/d_i)` in `t = log q`.
    pub fn gw(case: ModelCase) -> PFOperator {
        PFOperator {
            scale: Rational::one(),
            left: vec![(Rational::zero(), 4)],
            constant: case.pf_constant(),
            shift: Rational::one(),
            right: grouped(case.fractional_indices().into_iter().map(|x| -x).collect()),
        }
    }

    /// `D_ψ^4 - A ψ^{-1} ∏ (D_ψ - k/d_i)` with `ψ = e^{δ t}`.
    pub fn hybrid(case: ModelCase) -> Result<PFOperator> {
        case.ensure_lg("the hybrid Picard-Fuchs operator")?;
        let delta = case.degree() as i64;
        Ok(PFOperator {
            scale: Rational::new(1, delta),
            left: vec![(Rational::zero(), 4)],
            constant: case.pf_constant(),
            shift: Rational::from(-delta),
            right: grouped(case.fractional_indices()),
        })
    }

    pub fn for_side(case: ModelCase, side: Side) -> Result<PFOperator> {
        match side {
            Side::Gw => Ok(PFOperator::gw(case)),
            Side::Hybrid => PFOperator::hybrid(case),
        }
    }

    pub fn order(&self) -> u32 {
        self.left.iter().map(|(_, k)| k).sum()
    }

    /// Rewrites the operator in the variable `e^{-δ t}` (so `D ↦ -D/δ`,
    /// roots change sign, the shift scales by `-δ`). Returns the operator and
    /// the sign by which the result differs from the literal substitution.
    pub fn to_inverse_variable(&self, delta: u32) -> (PFOperator, i32) {
        let d = Rational::from(delta as i64);
        let negate = |v: &[(Rational, u32)]| -> Vec<(Rational, u32)> {
            grouped(
                v.iter()
                    .flat_map(|(a, k)| std::iter::repeat(-a.clone()).take(*k as usize))
                    .collect(),
            )
        };
        let kl = self.order();
        let kr: u32 = self.right.iter().map(|(_, k)| k).sum();
        let op = PFOperator {
            scale: &self.scale / &d,
            left: negate(&self.left),
            constant: if (kl + kr) % 2 == 0 {
                self.constant.clone()
            } else {
                -self.constant.clone()
            },
            shift: -(&self.shift * &d),
            right: negate(&self.right),
        };
        let sign = if kl % 2 == 0 { 1 } else { -1 };
        (op, sign)
    }

    /// Coefficients of `∏(θ - a)^k` in powers of `θ`.
    pub fn left_polynomial(&self) -> Vec<Rational> {
        expand_roots(&self.left)
    }

    pub fn right_polynomial(&self) -> Vec<Rational> {
        expand_roots(&self.right)
    }

    /// The operator as `Σ_j Q_j(q) (d/dq)^j`; returns `Q_j` as ascending
    /// coefficient lists. Only for operators written in `θ = q d/dq`
    /// (`λ = 1`, positive integer shift).
    pub fn q_coefficients(&self) -> Result<Vec<Vec<Rational>>> {
        let shift = self
            .shift
            .to_i64()
            .filter(|s| *s > 0 && self.scale == Rational::one())
            .ok_or_else(|| {
                Error::Structural("q-form needs D = q d/dq and a positive integer shift".into())
            })? as usize;
        let l = self.left_polynomial();
        let r = self.right_polynomial();
        let order = self.order() as usize;
        let deg = order.max(r.len() - 1);
        let s = stirling2(deg);
        let mut out = vec![vec![Rational::zero(); deg + shift + 1]; deg + 1];
        for (j, qj) in out.iter_mut().enumerate() {
            for (k, lk) in l.iter().enumerate() {
                qj[j] += &(lk * &Rational::from(s[k][j]));
            }
            for (k, rk) in r.iter().enumerate() {
                qj[j + shift] -= &(&(rk * &Rational::from(s[k][j])) * &self.constant);
            }
        }
        Ok(out)
    }

    /// `∏ (λ(f + H/z) - a)^k` for one term.
    fn eigen_factor(&self, roots: &[(Rational, u32)], nilpotency: usize, f: &Rational) -> ZLaurent {
        let mut out = ZLaurent::one(nilpotency);
        for (a, k) in roots {
            let base = ZLaurent::linear(nilpotency, self.scale.clone(), &(&self.scale * f) - a)
                .shift_z(-1);
            out = &out * &base.pow(*k);
        }
        out
    }

    /// Exact application to a series; the result is complete through
    /// `f_max - |c|`.
    pub fn apply(&self, s: &FreqSeries) -> FreqSeries {
        let nil = s.nilpotency();
        let left = s.map_coeffs(|f, c| &self.eigen_factor(&self.left, nil, f) * c);
        let right = s
            .map_coeffs(|f, c| &self.eigen_factor(&self.right, nil, f) * c)
            .shift_freq(&self.shift)
            .scale_rational(&self.constant);
        left.checked_sub(&right)
            .expect("both parts come from the same series")
    }

    pub fn verified_through(&self, s: &FreqSeries) -> Rational {
        s.f_max() - &self.shift.abs()
    }

    pub fn check(&self, s: &FreqSeries) -> PfReport {
        let through = self.verified_through(s);
        let residual = self.apply(s).restrict(&through);
        PfReport {
            operator: self.to_string(),
            case: s.case(),
            side: s.side(),
            f_max: s.f_max().clone(),
            verified_through: through,
            residual_terms: residual.len(),
            zero: residual.is_zero(),
            residual: residual.to_json_value(),
        }
    }
}

fn short(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        r.to_string()
    }
}

impl fmt::Display for PFOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn factors(v: &[(Rational, u32)]) -> String {
            v.iter()
                .map(|(a, k)| {
                    let base = if a.is_zero() {
                        "D".to_string()
                    } else if a.is_negative() {
                        format!("(D + {})", short(&a.abs()))
                    } else {
                        format!("(D - {})", short(a))
                    };
                    if *k == 1 {
                        base
                    } else {
                        format!("{base}^{k}")
                    }
                })
                .collect::<Vec<_>>()
                .join("")
        }
        write!(
            f,
            "{} - {}*e^({}t)*{}, D = {}*d/dt",
            factors(&self.left),
            short(&self.constant),
            short(&self.shift),
            factors(&self.right),
            short(&self.scale)
        )
    }
}

/// Outcome of applying an operator to a truncated series.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PfReport {
    pub operator: String,
    pub case: ModelCase,
    pub side: Side,
    pub f_max: Rational,
    pub verified_through: Rational,
    pub residual_terms: usize,
    pub zero: bool,
    pub residual: FreqSeriesJson,
}

/// Applies the side's operator to its I-function of the given order.
pub fn canonical_check(case: ModelCase, side: Side, order: u32) -> Result<PfReport> {
    let op = PFOperator::for_side(case, side)?;
    let s = i_series(&ISeriesSpec::new(case, side, order))?;
    Ok(op.check(&s))
}
