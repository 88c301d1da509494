//! Discrete data of the hybrid moduli spaces: selection rule, coarse degrees,
//! `N_Θ` and virtual dimensions.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ring::{ModelCase, Rational};

/// Genus, degree in `P^{r-1}` and multiplicities at the marked points.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TopologicalType {
    pub genus: u32,
    pub degree: u32,
    pub multiplicities: Vec<u32>,
}

impl TopologicalType {
    pub fn new(genus: u32, degree: u32, multiplicities: Vec<u32>) -> Self {
        TopologicalType {
            genus,
            degree,
            multiplicities,
        }
    }

    pub fn n(&self) -> usize {
        self.multiplicities.len()
    }

    pub fn validate(&self, case: ModelCase) -> Result<()> {
        let d = case.degree();
        if let Some(m) = self.multiplicities.iter().find(|&&m| m >= d) {
            return Err(Error::InvalidInput(format!(
                "multiplicity {m} out of range for {case} (must be < {d})"
            )));
        }
        Ok(())
    }

    /// `2g - 2 + n - β - Σ m_i`.
    fn excess(&self) -> i64 {
        2 * self.genus as i64 - 2 + self.n() as i64
            - self.degree as i64
            - self.multiplicities.iter().map(|&m| m as i64).sum::<i64>()
    }
}

pub fn selection_rule(case: ModelCase, theta: &TopologicalType) -> Result<bool> {
    theta.validate(case)?;
    Ok(theta.excess().rem_euclid(case.degree() as i64) == 0)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoarseDegree {
    pub value: Rational,
    pub integral: bool,
}

/// `deg |L_j|` for coordinate `j`; with unit weights all coordinates agree.
pub fn coarse_degree(case: ModelCase, theta: &TopologicalType, j: usize) -> Result<CoarseDegree> {
    theta.validate(case)?;
    let weights = case.weights();
    let c = *weights
        .get(j)
        .ok_or_else(|| Error::InvalidInput(format!("coordinate {j} out of range for {case}")))?;
    if c != 1 {
        return Err(Error::UnsupportedCase {
            case,
            what: "coarse degrees with non-unit weights".into(),
        });
    }
    let value = Rational::new(theta.excess(), case.degree() as i64);
    Ok(CoarseDegree {
        integral: value.is_integer(),
        value,
    })
}

/// `ī_n`: `≡ -i_n (mod d)`; for `d = 2` this is `i_n` itself.
pub fn last_bar(case: ModelCase, i_n: u32) -> u32 {
    let d = case.degree() as i64;
    (-(i_n as i64)).rem_euclid(d) as u32
}

/// `N_Θ = (-2 + n - β - Σ_{j<n} i_j)/d + ī_n/d`.
pub fn n_theta(case: ModelCase, theta: &TopologicalType) -> Result<i64> {
    theta.validate(case)?;
    let (last, rest) = theta
        .multiplicities
        .split_last()
        .ok_or_else(|| Error::InvalidInput("N_Θ needs at least one marked point".into()))?;
    if theta.genus != 0 {
        return Err(Error::InvalidInput("N_Θ is defined in genus zero".into()));
    }
    let d = case.degree() as i64;
    let num =
        -2 + theta.n() as i64 - theta.degree as i64 - rest.iter().map(|&m| m as i64).sum::<i64>()
            + last_bar(case, *last) as i64;
    let v = Rational::new(num, d);
    v.to_i64().filter(|_| v.is_integer()).ok_or_else(|| {
        Error::InvariantViolation(format!("N_Θ = {v} is not an integer for {theta:?}"))
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VirtualDimension {
    /// `(N - r - 4)(1 - g) + (r+1) n - Σ c_j m_{ij}/d`.
    pub direct: Rational,
    /// `vdim M̄_{g,n}(P^{r-1}, β) + Σ_j χ(L^{c_j})`.
    pub riemann_roch: Rational,
    /// Whether the coarse degrees entering the second route are integers.
    pub integral_degrees: bool,
}

pub fn virtual_dimension(case: ModelCase, theta: &TopologicalType) -> Result<VirtualDimension> {
    theta.validate(case)?;
    let d = case.degree() as i64;
    let n_vars = case.n_vars() as i64;
    let r = case.n_polys() as i64;
    let g = theta.genus as i64;
    let n = theta.n() as i64;
    let weights = case.weights();

    let mut sum = Rational::zero();
    for &m in &theta.multiplicities {
        for &c in &weights {
            let mij = (m as i64 * c as i64).rem_euclid(d);
            if mij == 0 {
                return Err(Error::UnsupportedCase {
                    case,
                    what: "virtual dimension with a broad marking".into(),
                });
            }
            sum += &Rational::new(c as i64 * mij, d);
        }
    }
    let direct = Rational::from((n_vars - r - 4) * (1 - g) + (r + 1) * n) - sum;

    let target = Rational::from((r - 1 - 3) * (1 - g) + r * theta.degree as i64 + n);
    let mut chi_sum = Rational::zero();
    let mut integral = true;
    for j in 0..weights.len() {
        let deg = coarse_degree(case, theta, j)?;
        integral &= deg.integral;
        chi_sum += &(&deg.value + &Rational::from(1 - g));
    }
    Ok(VirtualDimension {
        direct,
        riemann_roch: target + chi_sum,
        integral_degrees: integral,
    })
}

/// Type of the degree-`β` hybrid I-function term landing in `sector`:
/// `n - 1` insertions of multiplicity 1 and an output with `ī_n = sector`.
pub fn i_function_type(case: ModelCase, beta: u32, sector: u32, n: usize) -> TopologicalType {
    let mut m = vec![1; n.saturating_sub(1)];
    m.push(last_bar(case, sector));
    TopologicalType::new(0, beta, m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ifunc::{i_hybrid, ISeriesSpec};
    use crate::series::Side;

    fn tt(g: u32, b: u32, m: &[u32]) -> TopologicalType {
        TopologicalType::new(g, b, m.to_vec())
    }

    #[test]
    fn selection_examples() {
        let c = ModelCase::Cubic33;
        let qd = ModelCase::Quadric2222;
        assert!(!selection_rule(c, &tt(0, 0, &[1, 1, 1])).unwrap());
        assert!(selection_rule(c, &tt(0, 0, &[1, 2, 1])).unwrap());
        assert!(!selection_rule(qd, &tt(0, 1, &[1, 1])).unwrap());
        assert!(selection_rule(qd, &tt(0, 2, &[1, 1])).unwrap());
        assert!(selection_rule(c, &tt(0, 0, &[3])).is_err());
    }

    #[test]
    fn coarse_degree_examples() {
        let c = ModelCase::Cubic33;
        let d = coarse_degree(c, &tt(0, 0, &[1, 2, 1]), 0).unwrap();
        assert_eq!(d.value, Rational::from(-1));
        assert!(d.integral);
        let d = coarse_degree(c, &tt(0, 0, &[1]), 0).unwrap();
        assert_eq!(d.value, Rational::new(-2, 3));
        assert!(!d.integral);
    }

    #[test]
    fn selection_iff_integral_degree() {
        for case in ModelCase::ALL {
            let d = case.degree();
            for n in 0..=4usize {
                let total = (d as usize).pow(n as u32);
                for idx in 0..total {
                    let mut m = Vec::with_capacity(n);
                    let mut x = idx;
                    for _ in 0..n {
                        m.push((x % d as usize) as u32);
                        x /= d as usize;
                    }
                    for beta in 0..=6 {
                        for g in 0..=1 {
                            let t = tt(g, beta, &m);
                            assert_eq!(
                                selection_rule(case, &t).unwrap(),
                                coarse_degree(case, &t, 0).unwrap().integral
                            );
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn n_theta_examples() {
        let c = ModelCase::Cubic33;
        assert_eq!(n_theta(c, &tt(0, 0, &[1, 2])).unwrap(), 0);
        assert_eq!(
            n_theta(ModelCase::Quadric2222, &tt(0, 0, &[1, 1])).unwrap(),
            0
        );
        // small-J types: ī ≡ β + 1, always nonpositive
        for beta in 0..12u32 {
            for n in 1..4usize {
                let t = i_function_type(c, beta, (beta + 1) % 3, n);
                let v = n_theta(c, &t).unwrap();
                assert!(v <= 0);
                assert_eq!(v, ((beta as i64 + 1) % 3 - (beta as i64 + 1)) / 3);
            }
        }
        assert!(matches!(
            n_theta(c, &tt(0, 0, &[1, 1])),
            Err(Error::InvariantViolation(_))
        ));
    }

    #[test]
    fn n_theta_is_degree_or_degree_plus_one() {
        for case in ModelCase::LG {
            let d = case.degree();
            for beta in 0..6 {
                for a in 0..d {
                    for b in 0..d {
                        let t = tt(0, beta, &[a, b]);
                        if !selection_rule(case, &t).unwrap() {
                            continue;
                        }
                        let deg = coarse_degree(case, &t, 0).unwrap().value.to_i64().unwrap();
                        let nt = n_theta(case, &t).unwrap();
                        assert_eq!(nt, if b == 0 { deg } else { deg + 1 });
                    }
                }
            }
        }
    }

    #[test]
    fn virtual_dimensions() {
        let v = virtual_dimension(ModelCase::Cubic33, &tt(0, 1, &[1, 1, 1])).unwrap();
        assert_eq!(v.direct, Rational::from(3));
        assert_eq!(v.riemann_roch, Rational::from(3));
        assert!(v.integral_degrees);
        let v = virtual_dimension(ModelCase::Quadric2222, &tt(0, 0, &[1, 1, 1])).unwrap();
        assert_eq!(v.direct, Rational::from(3));
        assert_eq!(v.riemann_roch, Rational::from(3));
        let v = virtual_dimension(ModelCase::Cubic33, &tt(1, 0, &[])).unwrap();
        assert_eq!(v.direct, Rational::zero());
        assert!(virtual_dimension(ModelCase::Cubic33, &tt(0, 0, &[0, 1, 2])).is_err());
    }

    #[test]
    fn hybrid_terms_satisfy_selection_rule() {
        for case in ModelCase::LG {
            let s = i_hybrid(&ISeriesSpec::new(case, Side::Hybrid, 30)).unwrap();
            for (f, h, _) in s.terms() {
                let beta = f.to_i64().unwrap() as u32 - 1;
                for n in 1..4 {
                    assert!(selection_rule(case, &i_function_type(case, beta, h, n)).unwrap());
                }
            }
        }
    }
}
