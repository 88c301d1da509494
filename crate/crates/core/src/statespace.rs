//! Sectors of the hybrid state space, their age shifts, and the comparison of
//! graded dimensions with the cohomology of the complete intersection.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ring::{HPoly, ModelCase, Rational};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SectorReport {
    pub multiplicity: u32,
    pub thetas: Vec<Rational>,
    pub age: Rational,
    pub narrow: bool,
    /// Degree (after the `2ι` shift) to dimension.
    pub poincare: BTreeMap<i64, i64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StateSpaceReport {
    pub case: ModelCase,
    pub sectors: Vec<SectorReport>,
    pub hybrid_poincare: BTreeMap<i64, i64>,
    pub euler_characteristic: i64,
    pub h11: i64,
    pub h21: i64,
    pub dim_h3: i64,
    pub cy_poincare: BTreeMap<i64, i64>,
    pub narrow_count: usize,
    #[serde(rename = "match")]
    pub matches: bool,
}

/// `Θ_j = ⟨m c_j / d⟩`.
pub fn thetas(case: ModelCase, m: u32) -> Vec<Rational> {
    let d = case.degree() as i64;
    case.weights()
        .iter()
        .map(|&c| Rational::new((m as i64 * c as i64).rem_euclid(d), d))
        .collect()
}

/// `ι(m) = Σ_j (⟨m c_j/d⟩ - q_j)`.
pub fn age_shift(case: ModelCase, m: u32) -> Result<Rational> {
    if m >= case.degree() {
        return Err(Error::InvalidInput(format!(
            "multiplicity {m} out of range for {case}"
        )));
    }
    Ok(thetas(case, m)
        .iter()
        .zip(case.charges())
        .map(|(t, q)| t - &q)
        .sum())
}

/// `χ = ∏ d_i · [h^k] (1+h)^{n+1} / ∏(1 + d_i h)` with `k = n - #degrees`.
pub fn euler_characteristic(degrees: &[u32], ambient_dim: u32) -> Result<i64> {
    let dim = ambient_dim as i64 - degrees.len() as i64;
    if dim < 0 {
        return Err(Error::InvalidInput(
            "more equations than ambient dimensions".into(),
        ));
    }
    let s = dim as usize + 1;
    let one = HPoly::one(s);
    let h = HPoly::generator(s);
    let mut c = (&one + &h).pow(ambient_dim + 1);
    for &d in degrees {
        let f = &one + &h.scale(&Rational::from(d as i64));
        c = &c * &f.invert()?;
    }
    let deg: i64 = degrees.iter().map(|&d| d as i64).product();
    let top = c.coeff(dim as usize) * Rational::from(deg);
    top.to_i64().ok_or_else(|| {
        Error::InvariantViolation(format!("non-integral Euler characteristic {top}"))
    })
}

fn add_dim(map: &mut BTreeMap<i64, i64>, deg: i64, dim: i64) {
    if dim != 0 {
        *map.entry(deg).or_default() += dim;
    }
}

pub fn correspondence_check(case: ModelCase) -> Result<StateSpaceReport> {
    case.ensure_lg("the hybrid state space")?;
    let r = case.n_polys() as i64;
    let chi = euler_characteristic(&case.degrees(), case.n_vars() as u32 - 1)?;
    let h11 = 1;
    let h21 = h11 - chi / 2;
    let dim_h3 = 2 + 2 * h21;

    let mut cy = BTreeMap::new();
    for k in 0..4 {
        add_dim(&mut cy, 2 * k, 1);
    }
    add_dim(&mut cy, 3, dim_h3);

    let mut sectors = Vec::new();
    let mut hyb = BTreeMap::new();
    for m in 0..case.degree() {
        let th = thetas(case, m);
        let age = age_shift(case, m)?;
        let narrow = th.iter().all(|t| !t.is_zero());
        let shift = (&age * &Rational::from(2)).to_i64().ok_or_else(|| {
            Error::InvariantViolation(format!("odd age shift {age} in sector {m}"))
        })?;
        let mut p = BTreeMap::new();
        if narrow {
            for k in 0..r {
                add_dim(&mut p, 2 * k + shift, 1);
            }
        } else {
            add_dim(&mut p, 3, dim_h3);
        }
        for (deg, dim) in &p {
            add_dim(&mut hyb, *deg, *dim);
        }
        sectors.push(SectorReport {
            multiplicity: m,
            thetas: th,
            age,
            narrow,
            poincare: p,
        });
    }
    let narrow_count = sectors.iter().filter(|s| s.narrow).count();
    Ok(StateSpaceReport {
        case,
        matches: hyb == cy,
        sectors,
        hybrid_poincare: hyb,
        euler_characteristic: chi,
        h11,
        h21,
        dim_h3,
        cy_poincare: cy,
        narrow_count,
    })
}
