//! Γ and ψ at rational arguments: shift into `[1, 2)` with the functional
//! equations, evaluate there with MPFR.

use rug::Float;

use crate::ring::Rational;

/// Bits of working precision for `digits` decimal digits plus a margin.
pub fn bits_for_digits(digits: u32) -> u32 {
    (digits as f64 * std::f64::consts::LOG2_10).ceil() as u32 + 64
}

/// Splits `x > 0` as `x = y + n` with `y ∈ [1, 2)`.
fn reduce(x: &Rational) -> (Rational, i64) {
    let n = x.floor().to_i64().expect("argument of moderate size") - 1;
    (x - &Rational::from(n), n)
}

/// `Γ(x)` for rational `x > 0`.
pub fn gamma(x: &Rational, prec: u32) -> Float {
    assert!(
        !x.is_negative() && !x.is_zero(),
        "gamma needs a positive argument"
    );
    let (y, n) = reduce(x);
    // Γ(y + n) = Γ(y) ∏_{j<n} (y + j); for n = -1, Γ(y - 1) = Γ(y)/(y - 1)
    let mut factor = Rational::one();
    if n >= 0 {
        for j in 0..n {
            factor = factor * (&y + &Rational::from(j));
        }
    } else {
        factor = (&y - &Rational::one()).recip().expect("x > 0");
    }
    let base = y.to_float(prec).gamma();
    base * factor.to_float(prec)
}

/// Digamma `ψ(x)` for rational `x > 0`.
pub fn digamma(x: &Rational, prec: u32) -> Float {
    assert!(
        !x.is_negative() && !x.is_zero(),
        "digamma needs a positive argument"
    );
    let (y, n) = reduce(x);
    // ψ(y + n) = ψ(y) + Σ_{j<n} 1/(y + j)
    let mut shift = Rational::zero();
    if n >= 0 {
        for j in 0..n {
            shift += &(&y + &Rational::from(j)).recip().expect("positive");
        }
    } else {
        shift -= &(&y - &Rational::one()).recip().expect("x > 0");
    }
    y.to_float(prec).digamma() + shift.to_float(prec)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &Float, b: &Float, tol: f64) -> bool {
        let d = Float::with_val(a.prec(), a - b).abs();
        d.to_f64() < tol
    }

    #[test]
    fn gamma_values() {
        let prec = bits_for_digits(50);
        let g = gamma(&Rational::new(5, 1), prec);
        assert!(close(&g, &Float::with_val(prec, 24), 1e-45));
        // Γ(1/2)^2 = π
        let h = gamma(&Rational::new(1, 2), prec);
        let pi = Float::with_val(prec, rug::float::Constant::Pi);
        assert!(close(&Float::with_val(prec, &h * &h), &pi, 1e-45));
        // Γ(7/3) = (4/3)(1/3)Γ(1/3)
        let a = gamma(&Rational::new(7, 3), prec);
        let b = gamma(&Rational::new(1, 3), prec) * Rational::new(4, 9).to_float(prec);
        assert!(close(&a, &b, 1e-45));
    }

    #[test]
    fn digamma_values() {
        let prec = bits_for_digits(50);
        // ψ(4) - ψ(1) = 1 + 1/2 + 1/3
        let d = digamma(&Rational::new(4, 1), prec) - digamma(&Rational::new(1, 1), prec);
        assert!(close(&d, &Rational::new(11, 6).to_float(prec), 1e-45));
        let d = digamma(&Rational::new(4, 3), prec) - digamma(&Rational::new(1, 3), prec);
        assert!(close(&d, &Float::with_val(prec, 3), 1e-45));
    }
}
