//! Analytic continuation of Picard-Fuchs solutions in the `q`-plane: Taylor
//! stepping of the fourth-order equation, monodromy around `0`, `1/A` and
//! `∞`, and the matrix relating the Frobenius bases at `q = 0` and `q = ∞`.

mod linalg;

use std::fmt;
use std::str::FromStr;

use rug::float::Constant;
use rug::ops::Pow;
use rug::{Complex, Float};
use serde::{Deserialize, Serialize};

pub use linalg::{complex_to_string, CMatrix};

use crate::error::{Error, Result};
use crate::ifunc::{i_series, ISeriesSpec};
use crate::pf::{frobenius_components, FrobeniusBasis, PFOperator};
use crate::ring::{ModelCase, Rational};
use crate::series::Side;
use crate::special::bits_for_digits;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PrecisionContext {
    /// Target decimal digits `D`.
    pub digits: u32,
    /// Extra digits carried internally.
    pub guard_digits: u32,
    /// Step length as a fraction of the distance to the nearest singular point.
    pub step_fraction: f64,
    /// Smallest allowed distance from a singular point, in units of `1/A`.
    pub min_distance: f64,
}

impl PrecisionContext {
    pub fn new(digits: u32) -> Result<Self> {
        if digits < 30 {
            return Err(Error::InvalidInput(format!(
                "need at least 30 digits, got {digits}"
            )));
        }
        Ok(PrecisionContext {
            digits,
            guard_digits: 20,
            step_fraction: 0.5,
            min_distance: 0.05,
        })
    }

    pub fn working_digits(&self) -> u32 {
        self.digits + self.guard_digits
    }

    pub fn prec(&self) -> u32 {
        bits_for_digits(self.working_digits())
    }

    /// Taylor terms per step so that `step_fraction^K` is below the working
    /// precision.
    pub fn taylor_order(&self) -> usize {
        let bits = self.working_digits() as f64 * std::f64::consts::LOG2_10;
        (bits / -self.step_fraction.log2()).ceil() as usize + 20
    }

    /// `10^{-(D-10)}`.
    pub fn tolerance(&self) -> f64 {
        10f64.powi(-(self.digits as i32 - 10))
    }
}

/// Piecewise-linear path through complex waypoints `re + im·i`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Path {
    pub waypoints: Vec<(f64, f64)>,
}

impl Path {
    pub fn new(waypoints: Vec<(f64, f64)>) -> Result<Self> {
        if waypoints.is_empty() {
            return Err(Error::InvalidInput(
                "a path needs at least one point".into(),
            ));
        }
        if waypoints
            .iter()
            .any(|(a, b)| !a.is_finite() || !b.is_finite())
        {
            return Err(Error::InvalidInput("path points must be finite".into()));
        }
        Ok(Path { waypoints })
    }

    pub fn start(&self) -> (f64, f64) {
        self.waypoints[0]
    }

    pub fn end(&self) -> (f64, f64) {
        *self.waypoints.last().expect("nonempty")
    }

    /// `q_s → q_s + iR → Q + iR → Q` with `q_s = 1/(8A)`, `R = 1/A`,
    /// `Q = 8/A`.
    pub fn default_for(case: ModelCase) -> Path {
        Path::dogleg(case, 1.0)
    }

    /// Same shape at height `h·R`; negative `h` runs below the real axis.
    pub fn dogleg(case: ModelCase, h: f64) -> Path {
        let a = case.pf_constant().to_f64();
        let qs = 1.0 / (8.0 * a);
        let r = h / a;
        let far = 8.0 / a;
        Path {
            waypoints: vec![(qs, 0.0), (qs, r), (far, r), (far, 0.0)],
        }
    }

    pub fn reversed(&self) -> Path {
        let mut w = self.waypoints.clone();
        w.reverse();
        Path { waypoints: w }
    }

    pub fn then(&self, other: &Path) -> Path {
        let mut w = self.waypoints.clone();
        w.extend(other.waypoints.iter().skip(1).copied());
        Path { waypoints: w }
    }

    pub fn to_strings(&self) -> Vec<String> {
        self.waypoints
            .iter()
            .map(|&(a, b)| {
                if b < 0.0 {
                    format!("{a}{b}j")
                } else {
                    format!("{a}+{b}j")
                }
            })
            .collect()
    }
}

impl fmt::Display for Path {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_strings().join(";"))
    }
}

/// Parses `"re+imj"`, `"re"`, or `"imj"`.
pub fn parse_complex(s: &str) -> Result<(f64, f64)> {
    let s = s.trim();
    let bad = || Error::InvalidInput(format!("cannot parse complex number {s:?}"));
    if s.is_empty() {
        return Err(bad());
    }
    let Some(body) = s.strip_suffix('j').or_else(|| s.strip_suffix('i')) else {
        return Ok((s.parse().map_err(|_| bad())?, 0.0));
    };
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    match split {
        Some(k) => {
            let re: f64 = body[..k].parse().map_err(|_| bad())?;
            let im_str = &body[k..];
            let im: f64 = match im_str {
                "+" => 1.0,
                "-" => -1.0,
                _ => im_str.parse().map_err(|_| bad())?,
            };
            Ok((re, im))
        }
        None => {
            let im: f64 = match body {
                "" | "+" => 1.0,
                "-" => -1.0,
                _ => body.parse().map_err(|_| bad())?,
            };
            Ok((0.0, im))
        }
    }
}

impl FromStr for Path {
    type Err = Error;

    fn from_str(s: &str) -> Result<Path> {
        let pts = s
            .split(';')
            .filter(|p| !p.trim().is_empty())
            .map(parse_complex)
            .collect::<Result<Vec<_>>>()?;
        Path::new(pts)
    }
}

fn cplx(prec: u32, p: (f64, f64)) -> Complex {
    Complex::with_val(prec, p)
}

fn cabs(c: &Complex) -> f64 {
    Float::with_val(c.prec().0, c.abs_ref()).to_f64()
}

/// Finite singular points `0` and `1/A` of the `q`-form equation.
fn singular_points(case: ModelCase) -> [(f64, f64); 2] {
    [(0.0, 0.0), (1.0 / case.pf_constant().to_f64(), 0.0)]
}

fn segment_distance(a: (f64, f64), b: (f64, f64), p: (f64, f64)) -> f64 {
    let (dx, dy) = (b.0 - a.0, b.1 - a.1);
    let len2 = dx * dx + dy * dy;
    let t = if len2 == 0.0 {
        0.0
    } else {
        (((p.0 - a.0) * dx + (p.1 - a.1) * dy) / len2).clamp(0.0, 1.0)
    };
    let (x, y) = (a.0 + t * dx - p.0, a.1 + t * dy - p.1);
    (x * x + y * y).sqrt()
}

fn check_path(case: ModelCase, ctx: &PrecisionContext, path: &Path) -> Result<()> {
    let min = ctx.min_distance / case.pf_constant().to_f64();
    let sing = singular_points(case);
    let names = ["0", "1/A"];
    let pts = &path.waypoints;
    let segs: Vec<((f64, f64), (f64, f64))> = if pts.len() == 1 {
        vec![(pts[0], pts[0])]
    } else {
        pts.windows(2).map(|w| (w[0], w[1])).collect()
    };
    for (a, b) in segs {
        for (p, name) in sing.iter().zip(names) {
            let d = segment_distance(a, b, *p);
            if d < min {
                return Err(Error::PathTooClose {
                    point: name.to_string(),
                    distance: d,
                    minimum: min,
                });
            }
        }
    }
    Ok(())
}

/// The equation `Σ_j Q_j(q) y^{(j)} = 0` with complex polynomial coefficients.
struct QOde {
    coeffs: Vec<Vec<Complex>>,
    prec: u32,
}

impl QOde {
    fn new(case: ModelCase, prec: u32) -> Result<Self> {
        let q = PFOperator::gw(case).q_coefficients()?;
        let coeffs = q
            .iter()
            .map(|row| {
                row.iter()
                    .map(|c| Complex::with_val(prec, c.to_float(prec)))
                    .collect()
            })
            .collect();
        Ok(QOde { coeffs, prec })
    }

    fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Coefficients of `Q_j(q0 + x)` in powers of `x`.
    fn shifted(&self, q0: &Complex) -> Vec<Vec<Complex>> {
        self.coeffs
            .iter()
            .map(|poly| {
                // repeated synthetic division by (x - q0)
                let mut p: Vec<Complex> = poly.clone();
                let n = p.len();
                let mut out = Vec::with_capacity(n);
                for _ in 0..n {
                    let mut acc = Complex::with_val(self.prec, 0);
                    let mut next = vec![Complex::with_val(self.prec, 0); p.len().saturating_sub(1)];
                    for k in (0..p.len()).rev() {
                        acc = Complex::with_val(self.prec, &acc * q0) + &p[k];
                        if k > 0 {
                            next[k - 1] = acc.clone();
                        }
                    }
                    out.push(acc);
                    p = next;
                }
                out
            })
            .collect()
    }

    /// One Taylor step from `q0` by `h` for a jet `(y, y', y'', y''')`.
    fn step(
        &self,
        q0: &Complex,
        h: &Complex,
        jets: &[Vec<Complex>],
        order: usize,
    ) -> Vec<Vec<Complex>> {
        let prec = self.prec;
        let r = self.order();
        let c = self.shifted(q0);
        let lead = &c[r][0];
        let mut hp = Vec::with_capacity(order + 1);
        hp.push(Complex::with_val(prec, 1));
        for n in 1..=order {
            hp.push(Complex::with_val(prec, &hp[n - 1] * h));
        }
        jets.iter()
            .map(|jet| {
                let mut a: Vec<Complex> = Vec::with_capacity(order + 1);
                let mut fact = 1u64;
                for (k, v) in jet.iter().enumerate() {
                    if k > 0 {
                        fact *= k as u64;
                    }
                    a.push(Complex::with_val(prec, v / fact));
                }
                for n in 0..=(order - r) {
                    let mut acc = Complex::with_val(prec, 0);
                    for (j, cj) in c.iter().enumerate() {
                        for (m, cjm) in cj.iter().enumerate() {
                            if (j == r && m == 0) || m > n || cjm.is_zero() {
                                continue;
                            }
                            let base = n - m;
                            let ff: u64 = ((base + 1)..=(base + j)).map(|x| x as u64).product();
                            acc += Complex::with_val(prec, cjm * &a[base + j]) * ff;
                        }
                    }
                    let ff: u64 = ((n + 1)..=(n + r)).map(|x| x as u64).product();
                    let denom = Complex::with_val(prec, lead * ff);
                    a.push(-(acc / denom));
                }
                // y^{(k)}(q0 + h) = Σ_n n!/(n-k)! a_n h^{n-k}
                (0..r)
                    .map(|k| {
                        let mut acc = Complex::with_val(prec, 0);
                        for n in k..=order {
                            let ff: u64 = ((n - k + 1)..=n).map(|x| x as u64).product();
                            acc += Complex::with_val(prec, &a[n] * &hp[n - k]) * ff;
                        }
                        acc
                    })
                    .collect()
            })
            .collect()
    }
}

/// Continues solution jets `(y, y', y'', y''')` (one per column of
/// `initial`) along `path`. Returns the jets at the end point and the number
/// of Taylor steps taken.
pub fn ode_continue(
    case: ModelCase,
    ctx: &PrecisionContext,
    path: &Path,
    initial: &CMatrix,
) -> Result<(CMatrix, usize)> {
    check_path(case, ctx, path)?;
    let prec = ctx.prec();
    let ode = QOde::new(case, prec)?;
    let order = ctx.taylor_order();
    let sing = singular_points(case);
    let mut jets: Vec<Vec<Complex>> = (0..initial.cols()).map(|j| initial.column(j)).collect();
    let mut steps = 0usize;
    for w in path.waypoints.windows(2) {
        let (a, b) = (w[0], w[1]);
        let seg_len = ((b.0 - a.0).powi(2) + (b.1 - a.1).powi(2)).sqrt();
        let mut s = 0.0f64;
        let mut q0 = cplx(prec, a);
        while s < seg_len {
            let here = (
                a.0 + (b.0 - a.0) * s / seg_len,
                a.1 + (b.1 - a.1) * s / seg_len,
            );
            let dist = sing
                .iter()
                .map(|p| ((here.0 - p.0).powi(2) + (here.1 - p.1).powi(2)).sqrt())
                .fold(f64::INFINITY, f64::min);
            let mut ds = ctx.step_fraction * dist;
            if s + ds >= seg_len * (1.0 - 1e-12) {
                ds = seg_len - s;
            }
            // each step starts exactly where the previous one ended
            let q1 = if s + ds >= seg_len {
                cplx(prec, b)
            } else {
                let t = (s + ds) / seg_len;
                cplx(prec, (a.0 + (b.0 - a.0) * t, a.1 + (b.1 - a.1) * t))
            };
            let h = Complex::with_val(prec, &q1 - &q0);
            jets = ode.step(&q0, &h, &jets, order);
            q0 = q1;
            steps += 1;
            if steps > 100_000 {
                return Err(Error::PathTooClose {
                    point: "path".into(),
                    distance: dist,
                    minimum: ctx.min_distance,
                });
            }
            s += ds;
        }
    }
    Ok((CMatrix::from_columns(&jets, prec), steps))
}

/// `y^{(k)}` at `q` from `θ^k y`, `k ≤ 3`.
pub fn theta_to_q_jets(theta: &[Complex], q: &Complex) -> Vec<Complex> {
    let prec = q.prec().0;
    let inv = Complex::with_val(prec, 1) / q;
    let inv2 = Complex::with_val(prec, &inv * &inv);
    let inv3 = Complex::with_val(prec, &inv2 * &inv);
    let t1 = &theta[1];
    let t2 = &theta[2];
    let t3 = &theta[3];
    vec![
        theta[0].clone(),
        Complex::with_val(prec, t1 * &inv),
        Complex::with_val(prec, Complex::with_val(prec, t2 - t1) * &inv2),
        Complex::with_val(
            prec,
            (Complex::with_val(prec, t3 - &Complex::with_val(prec, t2 * 3u32))
                + Complex::with_val(prec, t1 * 2u32))
                * &inv3,
        ),
    ]
}

/// `θ^k y` at `q` from `y^{(k)}`, `k ≤ 3`.
pub fn q_to_theta_jets(d: &[Complex], q: &Complex) -> Vec<Complex> {
    let prec = q.prec().0;
    let q2 = Complex::with_val(prec, q * q);
    let q3 = Complex::with_val(prec, &q2 * q);
    let a = Complex::with_val(prec, &d[1] * q);
    let b = Complex::with_val(prec, &d[2] * &q2);
    let c = Complex::with_val(prec, &d[3] * &q3);
    vec![
        d[0].clone(),
        a.clone(),
        Complex::with_val(prec, &b + &a),
        Complex::with_val(prec, &c + &Complex::with_val(prec, &b * 3u32)) + &a,
    ]
}

fn principal_log(q: &Complex) -> Complex {
    Complex::with_val(q.prec().0, q.ln_ref())
}

/// Number of `q`- or `ψ`-powers needed for ratio `rho` to reach the working
/// precision.
fn terms_for(ctx: &PrecisionContext, rho: f64) -> Result<u32> {
    if !(rho > 0.0 && rho < 0.5) {
        return Err(Error::InvalidInput(format!(
            "series evaluated too far out (ratio {rho:.3}); move the point closer to its expansion center"
        )));
    }
    Ok((ctx.working_digits() as f64 / -rho.log10()).ceil() as u32 + 10)
}

/// Which Frobenius basis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BasisKind {
    Gw,
    Hybrid,
}

impl fmt::Display for BasisKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BasisKind::Gw => "gw-frobenius",
            BasisKind::Hybrid => "hybrid-frobenius",
        })
    }
}

/// Numeric evaluation of a Frobenius basis: `θ`-jets `θ^k u` for `k ≤ 4`.
struct BasisEval {
    basis: FrobeniusBasis,
    /// `t = factor·log q` and `θ = (1/factor)... ` bookkeeping: `θ^k = c^k d^k/dt^k`.
    t_per_log: Rational,
}

impl BasisEval {
    fn new(
        case: ModelCase,
        kind: BasisKind,
        ctx: &PrecisionContext,
        q: (f64, f64),
    ) -> Result<Self> {
        let a = case.pf_constant().to_f64();
        let modq = (q.0 * q.0 + q.1 * q.1).sqrt();
        match kind {
            BasisKind::Gw => {
                let n = terms_for(ctx, a * modq)?;
                let s = i_series(&ISeriesSpec::new(case, Side::Gw, n))?;
                Ok(BasisEval {
                    basis: frobenius_components(&s)?,
                    t_per_log: Rational::one(),
                })
            }
            BasisKind::Hybrid => {
                case.ensure_lg("the hybrid basis")?;
                let n = terms_for(ctx, 1.0 / (a * modq))?;
                let delta = case.degree();
                let s = i_series(&ISeriesSpec::new(case, Side::Hybrid, n * delta))?;
                Ok(BasisEval {
                    basis: frobenius_components(&s)?,
                    t_per_log: Rational::new(-1, delta as i64),
                })
            }
        }
    }

    /// Columns of `θ^k u` for `k = 0..=kmax`.
    fn theta_jets(&self, q: &Complex, kmax: usize) -> Vec<Vec<Complex>> {
        let prec = q.prec().0;
        let c = self.t_per_log.to_float(prec);
        let t = Complex::with_val(prec, principal_log(q) * &c);
        self.basis
            .solutions
            .iter()
            .map(|sol| {
                let ders = sol.series.eval_derivatives(&t, kmax, prec);
                let mut scale = Float::with_val(prec, 1);
                ders.into_iter()
                    .map(|d| {
                        let v = Complex::with_val(prec, &d * &scale);
                        scale *= &c;
                        v
                    })
                    .collect()
            })
            .collect()
    }
}

/// Relative residual `|θ^4 u - A q R(θ) u| / max_k |θ^k u|` over the columns.
fn ode_residual(case: ModelCase, q: &Complex, jets: &[Vec<Complex>]) -> f64 {
    let prec = q.prec().0;
    let op = PFOperator::gw(case);
    let l = op.left_polynomial();
    let r = op.right_polynomial();
    let a = op.constant.to_float(prec);
    let aq = Complex::with_val(prec, q * &a);
    jets.iter()
        .map(|col| {
            let mut acc = Complex::with_val(prec, 0);
            for (k, c) in l.iter().enumerate() {
                acc += Complex::with_val(prec, &col[k] * &c.to_float(prec));
            }
            for (k, c) in r.iter().enumerate() {
                let t = Complex::with_val(prec, &col[k] * &c.to_float(prec));
                acc -= Complex::with_val(prec, &t * &aq);
            }
            let scale = col.iter().map(cabs).fold(0.0, f64::max);
            cabs(&acc) / scale
        })
        .fold(0.0, f64::max)
}

/// `θ`-jet matrix (rows `θ^0..θ^3`, one column per basis element) at `q`,
/// with the ODE residual of the basis there.
pub fn basis_theta_jets(
    case: ModelCase,
    kind: BasisKind,
    ctx: &PrecisionContext,
    q: (f64, f64),
) -> Result<(CMatrix, f64)> {
    let prec = ctx.prec();
    let eval = BasisEval::new(case, kind, ctx, q)?;
    let qc = cplx(prec, q);
    let jets = eval.theta_jets(&qc, 4);
    let residual = ode_residual(case, &qc, &jets);
    let cols: Vec<Vec<Complex>> = jets
        .into_iter()
        .map(|mut c| {
            c.truncate(4);
            c
        })
        .collect();
    Ok((CMatrix::from_columns(&cols, prec), residual))
}

fn theta_matrix_to_q(m: &CMatrix, q: &Complex) -> CMatrix {
    let cols: Vec<Vec<Complex>> = (0..m.cols())
        .map(|j| theta_to_q_jets(&m.column(j), q))
        .collect();
    CMatrix::from_columns(&cols, m.prec())
}

fn q_matrix_to_theta(m: &CMatrix, q: &Complex) -> CMatrix {
    let cols: Vec<Vec<Complex>> = (0..m.cols())
        .map(|j| q_to_theta_jets(&m.column(j), q))
        .collect();
    CMatrix::from_columns(&cols, m.prec())
}

/// Continues the GW Frobenius basis along `path` and returns its `θ`-jets
/// at the end.
fn continue_gw_basis(
    case: ModelCase,
    ctx: &PrecisionContext,
    path: &Path,
) -> Result<(CMatrix, f64, usize)> {
    let prec = ctx.prec();
    let (w0, res) = basis_theta_jets(case, BasisKind::Gw, ctx, path.start())?;
    let q0 = cplx(prec, path.start());
    let q1 = cplx(prec, path.end());
    let (w1, steps) = ode_continue(case, ctx, path, &theta_matrix_to_q(&w0, &q0))?;
    Ok((q_matrix_to_theta(&w1, &q1), res, steps))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    /// `‖W_hyb C - W_gw‖ / ‖W_gw‖` at the end point.
    pub solve_residual: f64,
    /// Relative ODE residual of the GW basis at the start point.
    pub ode_residual_gw: f64,
    /// Relative ODE residual of the hybrid basis at the end point.
    pub ode_residual_hybrid: f64,
    /// Relative change of the matrix when the end point is moved to `2·q_end`.
    pub endpoint_consistency: f64,
    /// Condition number of the hybrid jet matrix.
    pub condition: f64,
    pub det_abs: f64,
    pub steps: usize,
}

impl Diagnostics {
    pub fn max_residual(&self) -> f64 {
        self.solve_residual
            .max(self.ode_residual_gw)
            .max(self.ode_residual_hybrid)
            .max(self.endpoint_consistency)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConnectionResult {
    pub case: ModelCase,
    pub digits: u32,
    /// Column `j` expresses the continued `j`-th GW solution in the hybrid basis.
    pub matrix: CMatrix,
    pub source_basis: BasisKind,
    pub target_basis: BasisKind,
    pub path: Path,
    pub diagnostics: Diagnostics,
}

impl ConnectionResult {
    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::json!({
            "case": self.case,
            "digits": self.digits,
            "exact": false,
            "source_basis": self.source_basis.to_string(),
            "target_basis": self.target_basis.to_string(),
            "path": self.path.to_strings(),
            "matrix": self.matrix.to_strings(self.digits),
            "diagnostics": self.diagnostics,
        })
    }
}

fn solve_at(
    case: ModelCase,
    ctx: &PrecisionContext,
    q: (f64, f64),
    gw_theta: &CMatrix,
) -> Result<(CMatrix, f64, f64, f64)> {
    let (h, res) = basis_theta_jets(case, BasisKind::Hybrid, ctx, q)?;
    let cond = h.condition()?;
    let limit = 10f64.powi(ctx.guard_digits as i32);
    if !(cond < limit) {
        return Err(Error::IllConditioned {
            condition: cond,
            suggestion: format!("move the end point so that |1/(A q)| is smaller (now at {q:?})"),
        });
    }
    let c = h.solve(gw_theta)?;
    let solve_res = h.mul(&c).sub(gw_theta).max_abs() / gw_theta.max_abs();
    Ok((c, res, cond, solve_res))
}

/// Expresses the GW Frobenius solutions, continued along `path`, in the hybrid
/// Frobenius basis at the end of the path.
pub fn connection_matrix(
    case: ModelCase,
    ctx: &PrecisionContext,
    path: &Path,
) -> Result<ConnectionResult> {
    case.ensure_lg("the connection matrix")?;
    let a = case.pf_constant().to_f64();
    let (s, e) = (path.start(), path.end());
    let ms = (s.0 * s.0 + s.1 * s.1).sqrt();
    let me = (e.0 * e.0 + e.1 * e.1).sqrt();
    if a * ms > 0.25 {
        return Err(Error::InvalidInput(format!(
            "path must start where |A q| ≤ 1/4, got {}",
            a * ms
        )));
    }
    if 1.0 / (a * me) > 0.25 {
        return Err(Error::InvalidInput(format!(
            "path must end where |1/(A q)| ≤ 1/4, got {}",
            1.0 / (a * me)
        )));
    }
    let (gw_end, res_gw, steps) = continue_gw_basis(case, ctx, path)?;
    let (c, res_hyb, cond, solve_res) = solve_at(case, ctx, e, &gw_end)?;

    // push the end point outwards and solve again
    let further = Path::new(vec![e, (2.0 * e.0, 2.0 * e.1)])?;
    let prec = ctx.prec();
    let qe = cplx(prec, e);
    let (w2, _) = ode_continue(case, ctx, &further, &theta_matrix_to_q(&gw_end, &qe))?;
    let q2 = cplx(prec, further.end());
    let (c2, _, _, _) = solve_at(case, ctx, further.end(), &q_matrix_to_theta(&w2, &q2))?;
    let consistency = c.sub(&c2).max_abs() / c.max_abs();
    let det_abs = cabs(&c.determinant());
    if !(det_abs > ctx.tolerance()) {
        return Err(Error::IllConditioned {
            condition: f64::INFINITY,
            suggestion: "connection matrix is numerically singular".into(),
        });
    }
    Ok(ConnectionResult {
        case,
        digits: ctx.digits,
        matrix: c,
        source_basis: BasisKind::Gw,
        target_basis: BasisKind::Hybrid,
        path: path.clone(),
        diagnostics: Diagnostics {
            solve_residual: solve_res,
            ode_residual_gw: res_gw,
            ode_residual_hybrid: res_hyb,
            endpoint_consistency: consistency,
            condition: cond,
            det_abs,
            steps,
        },
    })
}

/// Which singular point a loop encircles.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Singularity {
    Zero,
    Conifold,
    Infinity,
}

impl FromStr for Singularity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "zero" | "0" => Ok(Singularity::Zero),
            "conifold" | "c" => Ok(Singularity::Conifold),
            "infinity" | "inf" => Ok(Singularity::Infinity),
            other => Err(Error::InvalidInput(format!(
                "unknown singular point {other:?}"
            ))),
        }
    }
}

impl fmt::Display for Singularity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Singularity::Zero => "zero",
            Singularity::Conifold => "conifold",
            Singularity::Infinity => "infinity",
        })
    }
}

fn circle(
    center: (f64, f64),
    radius: f64,
    start_angle: f64,
    turns: f64,
    vertices: usize,
) -> Vec<(f64, f64)> {
    (0..=vertices)
        .map(|k| {
            let th = start_angle + turns * 2.0 * std::f64::consts::PI * k as f64 / vertices as f64;
            (center.0 + radius * th.cos(), center.1 + radius * th.sin())
        })
        .collect()
}

/// Loop based at `1/(8A)` around the chosen point. The zero and conifold
/// loops run counterclockwise; the loop at infinity is the large rectangle
/// around both finite points run clockwise.
pub fn monodromy_loop(case: ModelCase, around: Singularity) -> Path {
    let a = case.pf_constant().to_f64();
    let base = 1.0 / (8.0 * a);
    let mut w = match around {
        Singularity::Zero => circle((0.0, 0.0), base, 0.0, 1.0, 12),
        Singularity::Conifold => {
            let mut w = vec![(base, 0.0)];
            w.extend(circle(
                (1.0 / a, 0.0),
                0.5 / a,
                std::f64::consts::PI,
                1.0,
                12,
            ));
            w.push((base, 0.0));
            w
        }
        Singularity::Infinity => {
            let y = 2.0 / a;
            vec![
                (base, 0.0),
                (base, -y),
                (-2.0 / a, -y),
                (-2.0 / a, y),
                (3.0 / a, y),
                (3.0 / a, -y),
                (base, -y),
                (base, 0.0),
            ]
        }
    };
    // close exactly at the base point
    w[0] = (base, 0.0);
    let last = w.len() - 1;
    w[last] = (base, 0.0);
    Path { waypoints: w }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MonodromyResult {
    pub case: ModelCase,
    pub digits: u32,
    pub around: Singularity,
    /// `W_0^{-1} W_1` in the GW Frobenius basis at the base point.
    pub matrix: CMatrix,
    pub path: Path,
    pub steps: usize,
}

impl MonodromyResult {
    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::json!({
            "case": self.case,
            "digits": self.digits,
            "exact": false,
            "around": self.around,
            "basis": BasisKind::Gw.to_string(),
            "path": self.path.to_strings(),
            "steps": self.steps,
            "matrix": self.matrix.to_strings(self.digits),
        })
    }
}

pub fn monodromy_along(
    case: ModelCase,
    ctx: &PrecisionContext,
    path: &Path,
    around: Singularity,
) -> Result<MonodromyResult> {
    if path.start() != path.end() {
        return Err(Error::InvalidInput(
            "a monodromy loop must be closed".into(),
        ));
    }
    let prec = ctx.prec();
    let q0 = cplx(prec, path.start());
    let (w0, _) = basis_theta_jets(case, BasisKind::Gw, ctx, path.start())?;
    let (w1, steps) = ode_continue(case, ctx, path, &theta_matrix_to_q(&w0, &q0))?;
    let m = w0.solve(&q_matrix_to_theta(&w1, &q0))?;
    Ok(MonodromyResult {
        case,
        digits: ctx.digits,
        around,
        matrix: m,
        path: path.clone(),
        steps,
    })
}

pub fn monodromy(
    case: ModelCase,
    ctx: &PrecisionContext,
    around: Singularity,
) -> Result<MonodromyResult> {
    monodromy_along(case, ctx, &monodromy_loop(case, around), around)
}

/// `(2πi)^{k-j}/(k-j)!` above the diagonal.
pub fn expected_zero_monodromy(prec: u32) -> CMatrix {
    let two_pi_i = Complex::with_val(prec, (0, Float::with_val(prec, Constant::Pi) * 2u32));
    let mut m = CMatrix::zeros(4, 4, prec);
    for j in 0..4 {
        for k in j..4 {
            let p = (k - j) as u32;
            let fact: u32 = (1..=p).product();
            m[(j, k)] = Complex::with_val(prec, two_pi_i.clone().pow(p)) / fact;
        }
    }
    m
}

/// Largest 2×2 minor of `M - I` relative to `|M - I|^2`, and `|(M - I)^2|`
/// relative to `|M - I|^2`.
pub fn reflection_defects(m: &CMatrix) -> (f64, f64) {
    let n = m.rows();
    let d = m.sub(&CMatrix::identity(n, m.prec()));
    let scale = d.max_abs().powi(2);
    let mut minor = 0f64;
    for i in 0..n {
        for k in (i + 1)..n {
            for j in 0..n {
                for l in (j + 1)..n {
                    let x = Complex::with_val(m.prec(), &d[(i, j)] * &d[(k, l)])
                        - Complex::with_val(m.prec(), &d[(i, l)] * &d[(k, j)]);
                    minor = minor.max(cabs(&x));
                }
            }
        }
    }
    let sq = d.mul(&d).max_abs();
    (minor / scale, sq / scale)
}
