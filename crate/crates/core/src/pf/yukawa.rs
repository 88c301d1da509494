use serde::{Deserialize, Serialize};

use super::{frobenius_components, PFOperator};
use crate::error::{Error, Result};
use crate::ifunc::{i_gw, ISeriesSpec};
use crate::powerseries::PowerSeries;
use crate::ring::{ModelCase, Rational};
use crate::series::Side;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct YukawaReport {
    pub case: ModelCase,
    /// `deg X`, the classical limit.
    pub degree: i64,
    /// Location `1/A` of the pole of the B-model coupling.
    pub pole: Rational,
    /// Number of `q`-coefficients carried through the pipeline.
    pub order: usize,
    /// B-model coupling `Y(q)`, coefficients in `q`.
    pub yukawa: Vec<Rational>,
    /// `Y` agrees with `deg X/(1 - A q)` coefficientwise.
    pub closed_form: bool,
    /// Mirror map `q'(q)`.
    pub mirror_map: Vec<Rational>,
    /// Normalized coupling in the mirror coordinate `q'`.
    pub normalized: Vec<Rational>,
    /// `n_1, n_2, ...`.
    pub instanton_numbers: Vec<Rational>,
    pub integral: bool,
}

/// B-model Yukawa coupling, mirror map and instanton numbers `n_1..n_{order-1}`.
///
/// `Y` solves `(1 - A q) θY = (p_3/2) A q Y`, where `p_3` is the `θ^3`
/// coefficient of the shifted part of the operator.
pub fn yukawa(case: ModelCase, order: usize) -> Result<YukawaReport> {
    if order < 2 {
        return Err(Error::InvalidInput("yukawa needs order ≥ 2".into()));
    }
    let op = PFOperator::gw(case);
    let a = op.constant.clone();
    let p = op.right_polynomial();
    let p3 = p.get(3).cloned().unwrap_or_default();
    let degree = case.threefold_degree();

    let mut y = vec![Rational::from(degree)];
    for n in 1..order {
        let num = &a * &(&Rational::from(2 * (n as i64 - 1)) + &p3);
        let next = &y[n - 1] * &num / Rational::from(2 * n as i64);
        y.push(next);
    }
    let closed_form = y
        .iter()
        .enumerate()
        .all(|(n, c)| *c == Rational::from(degree) * a.pow(n as i32));
    let y_ps = PowerSeries::new(y.clone(), order);

    let basis = frobenius_components(&i_gw(&ISeriesSpec::new(case, Side::Gw, order as u32))?)?;
    let coeffs = |k: usize| -> PowerSeries {
        let u = basis.get(0, k).expect("gw basis has four solutions");
        PowerSeries::new(
            (0..order)
                .map(|n| u.coeff(&Rational::from(n as i64), 0))
                .collect(),
            order,
        )
    };
    let u0 = coeffs(0);
    let u1_free = coeffs(1);
    let r = u1_free.mul(&u0.inverse()?);
    // q' = q exp(r)
    let mirror = PowerSeries::var(order).mul(&r.exp()?);
    let dt = PowerSeries::one(order).add(&r.theta());
    let k_q = y_ps.mul(&u0.pow(2).mul(&dt.pow(3)).inverse()?);
    let q_of_qp = mirror.reversion()?;
    let k_qp = k_q.compose(&q_of_qp)?;

    if k_qp.coeff(0) != Rational::from(degree) {
        return Err(Error::InvariantViolation(format!(
            "classical limit {} differs from deg X = {degree}",
            k_qp.coeff(0)
        )));
    }
    // a_m = Σ_{e | m} n_e e^3
    let mut n_e: Vec<Rational> = Vec::new();
    for m in 1..order {
        let mut acc = k_qp.coeff(m);
        for e in 1..m {
            if m % e == 0 {
                acc -= &(&n_e[e - 1] * &Rational::from((e as i64).pow(3)));
            }
        }
        n_e.push(acc / Rational::from((m as i64).pow(3)));
    }
    let integral = n_e.iter().all(|n| n.is_integer());
    Ok(YukawaReport {
        case,
        degree,
        pole: a.recip()?,
        order,
        yukawa: y,
        closed_form,
        mirror_map: mirror.coeffs().to_vec(),
        normalized: k_qp.coeffs().to_vec(),
        instanton_numbers: n_e,
        integral,
    })
}
