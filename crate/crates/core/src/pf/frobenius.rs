use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ring::{factorial, ModelCase, Rational};
use crate::series::{FreqSeries, Side};
use crate::tseries::{TSeries, TTerm};

/// One scalar solution `u_k` attached to a sector.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FrobeniusSolution {
    pub sector: u32,
    pub index: usize,
    pub series: TSeries,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FrobeniusBasis {
    pub case: ModelCase,
    pub side: Side,
    pub solutions: Vec<FrobeniusSolution>,
}

#[derive(Serialize, Deserialize)]
struct SolutionJson {
    sector: u32,
    index: usize,
    f_max: Rational,
    terms: Vec<TTerm>,
}

impl FrobeniusBasis {
    pub fn get(&self, sector: u32, index: usize) -> Option<&TSeries> {
        self.solutions
            .iter()
            .find(|s| s.sector == sector && s.index == index)
            .map(|s| &s.series)
    }

    /// Lowest `(frequency, t-power)` of each solution with its coefficient.
    pub fn leading_data(&self) -> Vec<(Rational, u32, Rational)> {
        self.solutions
            .iter()
            .map(|s| {
                let f = s.series.min_frequency().cloned().unwrap_or_default();
                let k = (0..=s.series.max_t_power())
                    .rev()
                    .find(|&k| !s.series.coeff(&f, k).is_zero())
                    .unwrap_or(0);
                let c = s.series.coeff(&f, k);
                (f, k, c)
            })
            .collect()
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        let sols: Vec<SolutionJson> = self
            .solutions
            .iter()
            .map(|s| SolutionJson {
                sector: s.sector,
                index: s.index,
                f_max: s.series.f_max().clone(),
                terms: s.series.to_terms(),
            })
            .collect();
        serde_json::json!({
            "case": self.case,
            "side": self.side,
            "solutions": sols,
        })
    }
}

/// `Σ_f e^{ft} [H^k] c_f(z = 1)` restricted to one sector.
pub fn z_one_component(s: &FreqSeries, sector: u32, k: usize) -> TSeries {
    let mut out = TSeries::new(s.f_max().clone());
    for (f, h, c) in s.terms() {
        if h == sector {
            out.add_term(f.clone(), 0, c.at_z_one().coeff(k));
        }
    }
    out
}

/// Sets `z = 1` and expands `e^{H t}`:
/// `u_k = Σ_f e^{ft} Σ_{j ≤ k} t^j/j!·[H^{k-j}] c_f(1)`, for every narrow
/// sector and `0 ≤ k < s`.
pub fn frobenius_components(s: &FreqSeries) -> Result<FrobeniusBasis> {
    let nil = s.nilpotency();
    let sectors: Vec<u32> = match s.side() {
        Side::Gw => {
            if nil != 4 {
                return Err(Error::Structural(format!(
                    "gw Frobenius basis needs nilpotency 4, got {nil}"
                )));
            }
            vec![0]
        }
        Side::Hybrid => s.case().narrow_sectors(),
    };
    let mut solutions = Vec::new();
    for &h in &sectors {
        let parts: Vec<TSeries> = (0..nil).map(|k| z_one_component(s, h, k)).collect();
        for k in 0..nil {
            let mut u = TSeries::new(s.f_max().clone());
            for j in 0..=k {
                let inv_fact = Rational::from(factorial(j as u32)).recip()?;
                for (f, _, c) in parts[k - j].iter() {
                    u.add_term(f.clone(), j as u32, c * &inv_fact);
                }
            }
            solutions.push(FrobeniusSolution {
                sector: h,
                index: k,
                series: u,
            });
        }
    }
    Ok(FrobeniusBasis {
        case: s.case(),
        side: s.side(),
        solutions,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ifunc::{i_series, ISeriesSpec};

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    fn basis(case: ModelCase, side: Side, order: u32) -> FrobeniusBasis {
        frobenius_components(&i_series(&ISeriesSpec::new(case, side, order)).unwrap()).unwrap()
    }

    #[test]
    fn cubic_gw_u0() {
        let b = basis(ModelCase::Cubic33, Side::Gw, 3);
        let u0 = b.get(0, 0).unwrap();
        assert_eq!(u0.coeff(&q(0, 1), 0), q(1, 1));
        assert_eq!(u0.coeff(&q(1, 1), 0), q(36, 1));
        assert_eq!(u0.coeff(&q(2, 1), 0), q(8100, 1));
        assert_eq!(u0.max_t_power(), 0);
    }

    #[test]
    fn cubic_hybrid_sector_one() {
        let b = basis(ModelCase::Cubic33, Side::Hybrid, 6);
        assert_eq!(b.solutions.len(), 4);
        let u0 = b.get(1, 0).unwrap();
        assert_eq!(u0.coeff(&q(1, 1), 0), q(1, 1));
        assert_eq!(u0.coeff(&q(4, 1), 0), q(1, 26244));
        assert_eq!(b.get(2, 0).unwrap().min_frequency(), Some(&q(2, 1)));
    }

    #[test]
    fn single_log_structure() {
        for (case, side) in [
            (ModelCase::Cubic33, Side::Gw),
            (ModelCase::Quadric2222, Side::Hybrid),
            (ModelCase::Quintic, Side::Gw),
        ] {
            let b = basis(case, side, 5);
            let sector = b.solutions[0].sector;
            let u1 = b.get(sector, 1).unwrap();
            assert_eq!(u1.max_t_power(), 1);
            for f in u1.frequencies() {
                assert_eq!(u1.coeff(&f, 1), b.get(sector, 0).unwrap().coeff(&f, 0));
            }
        }
    }

    #[test]
    fn leading_data_is_triangular() {
        for (case, side) in [
            (ModelCase::Cubic33, Side::Gw),
            (ModelCase::Quadric2222, Side::Gw),
            (ModelCase::Cubic33, Side::Hybrid),
            (ModelCase::Quadric2222, Side::Hybrid),
        ] {
            let b = basis(case, side, 6);
            let lead = b.leading_data();
            let mut keys: Vec<(Rational, u32)> =
                lead.iter().map(|(f, k, _)| (f.clone(), *k)).collect();
            assert!(lead.iter().all(|(_, _, c)| !c.is_zero()));
            keys.sort();
            keys.dedup();
            assert_eq!(keys.len(), 4, "{case}/{side}");
        }
    }
}
