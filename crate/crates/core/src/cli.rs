//! `lgcy` command line: argument parsing, configuration files and report
//! rendering. [`run`] returns the exit code and never panics on bad input.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::continuation::{
    connection_matrix, monodromy, monodromy_along, Path, PrecisionContext, Singularity,
};
use crate::error::{Error, Result};
use crate::ifunc::{i_series, ISeriesSpec};
use crate::mirror::{closed_form_crosscheck, mirror_data};
use crate::moduli::{coarse_degree, n_theta, selection_rule, virtual_dimension, TopologicalType};
use crate::pf::{yukawa, PFOperator};
use crate::ring::ModelCase;
use crate::series::{FreqSeries, Side};
use crate::statespace::correspondence_check;
use crate::verify;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    Pretty,
}

#[derive(Debug, Parser)]
#[command(
    name = "lgcy",
    version,
    about = "Genus-zero LG/CY computations for X_{3,3} and X_{2,2,2,2}"
)]
struct Cli {
    /// TOML file with default values; command-line flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args, Default)]
struct SeriesArgs {
    #[arg(long, value_parser = parse_case)]
    case: Option<ModelCase>,
    #[arg(long, value_parser = parse_side)]
    side: Option<Side>,
    #[arg(long)]
    order: Option<u32>,
}

#[derive(Debug, Args)]
struct TypeArgs {
    #[arg(long, value_parser = parse_case)]
    case: Option<ModelCase>,
    #[arg(long, default_value_t = 0)]
    genus: u32,
    /// Degree β.
    #[arg(long, default_value_t = 0)]
    degree: u32,
    /// Comma-separated multiplicities, e.g. `1,2,1`.
    #[arg(long, value_delimiter = ',', num_args = 0..)]
    mult: Vec<u32>,
}

#[derive(Debug, Subcommand)]
enum ModuliCommand {
    /// Selection rule `2g - 2 + n - β - Σ m ≡ 0 (mod d)`.
    Selection(TypeArgs),
    /// Coarse degree of `|L_j|`.
    Degree {
        #[command(flatten)]
        ty: TypeArgs,
        #[arg(long, default_value_t = 0)]
        coordinate: usize,
    },
    Ntheta(TypeArgs),
    Vdim(TypeArgs),
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Truncated I-function.
    Iseries(SeriesArgs),
    /// Apply the Picard-Fuchs operator to the I-function.
    PfCheck(SeriesArgs),
    /// ω₁, ω₂, mirror map and the normalized J-function.
    MirrorMap {
        #[command(flatten)]
        series: SeriesArgs,
        /// Compare ω₁, ω₂ with their Γ/ψ closed forms.
        #[arg(long)]
        numeric_check: bool,
        #[arg(long)]
        digits: Option<u32>,
    },
    /// Graded dimensions of the hybrid state space against H^*(X).
    Statespace {
        #[arg(long, value_parser = parse_case)]
        case: Option<ModelCase>,
    },
    #[command(subcommand)]
    Moduli(ModuliCommand),
    /// Connection matrix between the GW and hybrid Frobenius bases.
    Connect {
        #[arg(long, value_parser = parse_case)]
        case: Option<ModelCase>,
        #[arg(long)]
        digits: Option<u32>,
        /// Semicolon-separated waypoints `re+imj`.
        #[arg(long, allow_hyphen_values = true)]
        path: Option<String>,
    },
    /// Monodromy of the GW Frobenius basis.
    Monodromy {
        #[arg(long, value_parser = parse_case)]
        case: Option<ModelCase>,
        #[arg(long)]
        digits: Option<u32>,
        #[arg(long, value_parser = parse_singularity)]
        around: Option<Singularity>,
        /// Custom closed loop; defaults to the canonical loop for `--around`.
        #[arg(long, allow_hyphen_values = true)]
        path: Option<String>,
    },
    /// Yukawa coupling and instanton numbers.
    Yukawa {
        #[arg(long, value_parser = parse_case)]
        case: Option<ModelCase>,
        #[arg(long)]
        order: Option<u32>,
    },
    /// Run every acceptance check.
    VerifyAll,
}

fn parse_case(s: &str) -> std::result::Result<ModelCase, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_side(s: &str) -> std::result::Result<Side, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_singularity(s: &str) -> std::result::Result<Singularity, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// Values a `--config` file may set.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub case: Option<ModelCase>,
    pub side: Option<Side>,
    pub order: Option<u32>,
    pub digits: Option<u32>,
    pub path: Option<String>,
    pub around: Option<Singularity>,
    pub format: Option<Format>,
    pub output: Option<PathBuf>,
}

enum Failure {
    Usage(String),
    Compute(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Compute(e)
    }
}

/// A rendered report plus whether the computation's own checks passed.
struct Report {
    json: Value,
    csv: Option<Vec<Vec<String>>>,
    pretty: String,
    ok: bool,
}

fn series_csv(s: &FreqSeries) -> Vec<Vec<String>> {
    let mut rows = vec![vec![
        "f".into(),
        "sector".into(),
        "z_exp".into(),
        "H_power".into(),
        "value".into(),
    ]];
    for (f, h, e, k, v) in s.coefficient_rows() {
        rows.push(vec![
            f.to_string(),
            h.to_string(),
            e.to_string(),
            k.to_string(),
            v.to_string(),
        ]);
    }
    rows
}

fn series_pretty(s: &FreqSeries) -> String {
    let mut out = format!("{} {} I-function, f ≤ {}\n", s.case(), s.side(), s.f_max());
    for (f, h, c) in s.terms() {
        out += &format!("  f={f} sector={h}: {c}\n");
    }
    out
}

fn exact(mut v: Value) -> Value {
    v["exact"] = Value::Bool(true);
    v
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("report serialization")
}

struct Resolved {
    cfg: RunConfig,
}

impl Resolved {
    fn case(&self, flag: Option<ModelCase>) -> std::result::Result<ModelCase, Failure> {
        flag.or(self.cfg.case).ok_or_else(|| {
            Failure::Usage("--case is required (or set `case` in the config file)".into())
        })
    }

    fn side(&self, flag: Option<Side>) -> Side {
        flag.or(self.cfg.side).unwrap_or(Side::Gw)
    }

    fn order(&self, flag: Option<u32>, default: u32) -> u32 {
        flag.or(self.cfg.order).unwrap_or(default)
    }

    fn digits(&self, flag: Option<u32>) -> std::result::Result<u32, Failure> {
        let d = flag.or(self.cfg.digits).unwrap_or(40);
        if d < 30 {
            return Err(Failure::Usage(format!(
                "--digits must be at least 30, got {d}"
            )));
        }
        Ok(d)
    }

    fn path(&self, flag: Option<String>) -> std::result::Result<Option<Path>, Failure> {
        flag.or_else(|| self.cfg.path.clone())
            .map(|p| p.parse::<Path>().map_err(|e| Failure::Usage(e.to_string())))
            .transpose()
    }
}

fn type_report(
    r: &Resolved,
    ty: TypeArgs,
    what: &str,
    f: impl FnOnce(ModelCase, &TopologicalType) -> Result<(Value, String, bool)>,
) -> std::result::Result<Report, Failure> {
    let case = r.case(ty.case)?;
    let t = TopologicalType::new(ty.genus, ty.degree, ty.mult);
    t.validate(case)
        .map_err(|e| Failure::Usage(e.to_string()))?;
    let (value, pretty, ok) = f(case, &t)?;
    let json = json!({
        "case": case,
        "exact": true,
        "query": what,
        "type": t,
        "result": value,
    });
    Ok(Report {
        json,
        csv: None,
        pretty,
        ok,
    })
}

fn execute(cmd: Command, r: &Resolved) -> std::result::Result<Report, Failure> {
    match cmd {
        Command::Iseries(a) => {
            let case = r.case(a.case)?;
            let spec = ISeriesSpec::new(case, r.side(a.side), r.order(a.order, 10));
            let s = i_series(&spec)?;
            Ok(Report {
                json: exact(to_value(&s.to_json_value())),
                csv: Some(series_csv(&s)),
                pretty: series_pretty(&s),
                ok: true,
            })
        }
        Command::PfCheck(a) => {
            let case = r.case(a.case)?;
            let side = r.side(a.side);
            let op = PFOperator::for_side(case, side)?;
            let s = i_series(&ISeriesSpec::new(case, side, r.order(a.order, 20)))?;
            let rep = op.check(&s);
            let pretty = format!(
                "{}\n{case} {side}: residual {} through f = {} ({} nonzero terms beyond)\n",
                rep.operator,
                if rep.zero { "zero" } else { "NONZERO" },
                rep.verified_through,
                rep.residual_terms
            );
            let residual = FreqSeries::from_json_value(rep.residual.clone())?;
            Ok(Report {
                ok: rep.zero,
                json: exact(to_value(&rep)),
                csv: Some(series_csv(&residual)),
                pretty,
            })
        }
        Command::MirrorMap {
            series,
            numeric_check,
            digits,
        } => {
            let case = r.case(series.case)?;
            let side = r.side(series.side);
            let order = r.order(series.order, 10);
            let i = i_series(&ISeriesSpec::new(case, side, order))?;
            let m = mirror_data(&i)?;
            let mut json = json!({
                "case": case,
                "side": side,
                "order": order,
                "exact": true,
                "omega1": m.omega1,
                "omega2": m.omega2,
                "mirror_map": m.mirror_map,
                "j_small": m.j_small.to_json_value(),
                "cone_slice": m.cone,
                "normal_form": m.cone.is_normal_form(),
            });
            let mut pretty = format!(
                "{case} {side}, order {order}\nω₁ = {}\nω₂ = {}\nmirror map = {}\nJ normal form: {}\n",
                m.omega1,
                m.omega2,
                m.mirror_map,
                m.cone.is_normal_form()
            );
            let mut ok = m.cone.is_normal_form();
            if numeric_check {
                let d = r.digits(digits)?;
                if side != Side::Hybrid {
                    return Err(Failure::Usage(
                        "--numeric-check compares the hybrid closed forms; use --side hybrid"
                            .into(),
                    ));
                }
                let n_terms = (order / case.degree()).max(1);
                let rep = closed_form_crosscheck(case, n_terms, d)?;
                pretty += &format!(
                    "closed forms: {} terms at {d} digits, max diff {:.2e} (tolerance {:.0e}): {}\n",
                    rep.terms.len(),
                    rep.max_diff,
                    rep.tolerance,
                    if rep.pass { "ok" } else { "FAILED" }
                );
                if let Some(disc) = &rep.discrepancy {
                    pretty += &format!(
                        "displayed ω₁ at d=1: {} vs extracted {}\n",
                        disc.displayed, disc.exact
                    );
                }
                ok &= rep.pass;
                json["numeric_check"] = to_value(&rep);
                json["digits"] = json!(d);
            }
            Ok(Report {
                json,
                csv: Some(series_csv(&m.j_small)),
                pretty,
                ok,
            })
        }
        Command::Statespace { case } => {
            let case = r.case(case)?;
            let rep = correspondence_check(case)?;
            let mut pretty = format!(
                "{case}: χ = {}, h21 = {}, dim H^3 = {}\n",
                rep.euler_characteristic, rep.h21, rep.dim_h3
            );
            for s in &rep.sectors {
                pretty += &format!(
                    "  sector {} ({}), age {}: {:?}\n",
                    s.multiplicity,
                    if s.narrow { "narrow" } else { "broad" },
                    s.age,
                    s.poincare
                );
            }
            pretty += &format!(
                "hybrid {:?}\nCY     {:?}\nmatch: {}\n",
                rep.hybrid_poincare, rep.cy_poincare, rep.matches
            );
            Ok(Report {
                ok: rep.matches,
                json: exact(to_value(&rep)),
                csv: None,
                pretty,
            })
        }
        Command::Moduli(m) => match m {
            ModuliCommand::Selection(ty) => type_report(r, ty, "selection", |c, t| {
                let v = selection_rule(c, t)?;
                Ok((json!(v), format!("selection rule: {v}\n"), true))
            }),
            ModuliCommand::Degree { ty, coordinate } => type_report(r, ty, "degree", |c, t| {
                let d = coarse_degree(c, t, coordinate)?;
                Ok((
                    to_value(&d),
                    format!(
                        "deg |L_{coordinate}| = {} (integral: {})\n",
                        d.value, d.integral
                    ),
                    true,
                ))
            }),
            ModuliCommand::Ntheta(ty) => type_report(r, ty, "ntheta", |c, t| {
                let v = n_theta(c, t)?;
                Ok((json!(v), format!("N_Θ = {v}\n"), true))
            }),
            ModuliCommand::Vdim(ty) => type_report(r, ty, "vdim", |c, t| {
                let v = virtual_dimension(c, t)?;
                let agree = v.direct == v.riemann_roch;
                Ok((
                    to_value(&v),
                    format!(
                        "vdim = {} (Riemann-Roch route: {}, integral degrees: {})\n",
                        v.direct, v.riemann_roch, v.integral_degrees
                    ),
                    agree || !v.integral_degrees,
                ))
            }),
        },
        Command::Connect { case, digits, path } => {
            let case = r.case(case)?;
            let ctx = PrecisionContext::new(r.digits(digits)?)?;
            let path = r.path(path)?.unwrap_or_else(|| Path::default_for(case));
            let res = connection_matrix(case, &ctx, &path)?;
            let mut pretty = format!(
                "{case} connection matrix ({} → {}) along {}\n",
                res.source_basis, res.target_basis, res.path
            );
            for row in res.matrix.to_strings(ctx.digits.min(20)) {
                pretty += &format!("  {}\n", row.join("  "));
            }
            pretty += &format!("{:?}\n", res.diagnostics);
            Ok(Report {
                ok: res.diagnostics.max_residual() <= ctx.tolerance(),
                json: res.to_json_value(),
                csv: None,
                pretty,
            })
        }
        Command::Monodromy {
            case,
            digits,
            around,
            path,
        } => {
            let case = r.case(case)?;
            let ctx = PrecisionContext::new(r.digits(digits)?)?;
            let around = around.or(r.cfg.around).unwrap_or(Singularity::Zero);
            let res = match r.path(path)? {
                Some(p) => monodromy_along(case, &ctx, &p, around)?,
                None => monodromy(case, &ctx, around)?,
            };
            let mut pretty = format!("{case} monodromy around {around} ({} steps)\n", res.steps);
            for row in res.matrix.to_strings(ctx.digits.min(20)) {
                pretty += &format!("  {}\n", row.join("  "));
            }
            Ok(Report {
                json: res.to_json_value(),
                csv: None,
                pretty,
                ok: true,
            })
        }
        Command::Yukawa { case, order } => {
            let case = r.case(case)?;
            let rep = yukawa(case, r.order(order, 4) as usize)?;
            let ns: Vec<String> = rep
                .instanton_numbers
                .iter()
                .map(ToString::to_string)
                .collect();
            let pretty = format!(
                "{case}: Y = {}/(1 - {} q) ({}), n_d = {}, integral: {}\n",
                rep.degree,
                rep.pole.recip().map(|a| a.to_string()).unwrap_or_default(),
                if rep.closed_form {
                    "closed form ok"
                } else {
                    "closed form MISMATCH"
                },
                ns.join(", "),
                rep.integral
            );
            Ok(Report {
                ok: rep.integral && rep.closed_form,
                json: exact(to_value(&rep)),
                csv: None,
                pretty,
            })
        }
        Command::VerifyAll => {
            let results = verify::run_all();
            let pass = results.iter().all(|c| c.pass);
            let mut csv = vec![vec![
                "id".into(),
                "name".into(),
                "pass".into(),
                "seconds".into(),
                "detail".into(),
            ]];
            let mut pretty = String::new();
            for c in &results {
                csv.push(vec![
                    c.id.to_string(),
                    c.name.into(),
                    c.pass.to_string(),
                    format!("{:.3}", c.seconds),
                    c.detail.clone(),
                ]);
                pretty += &format!("{c}\n");
            }
            pretty += &format!(
                "{}/{} criteria passed\n",
                results.iter().filter(|c| c.pass).count(),
                results.len()
            );
            Ok(Report {
                json: json!({ "criteria": results, "pass": pass }),
                csv: Some(csv),
                pretty,
                ok: pass,
            })
        }
    }
}

fn render(report: &Report, format: Format) -> std::result::Result<Vec<u8>, Failure> {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&report.json).expect("json rendering");
            s.push('\n');
            Ok(s.into_bytes())
        }
        Format::Pretty => Ok(report.pretty.clone().into_bytes()),
        Format::Csv => {
            let rows = report.csv.as_ref().ok_or_else(|| {
                Failure::Usage("csv output is only available for coefficient tables".into())
            })?;
            let mut w = csv::Writer::from_writer(Vec::new());
            for row in rows {
                w.write_record(row)
                    .map_err(|e| Failure::Compute(Error::InvalidInput(e.to_string())))?;
            }
            w.into_inner()
                .map_err(|e| Failure::Compute(Error::InvalidInput(e.to_string())))
        }
    }
}

fn error_report(e: &Error) -> String {
    let v = json!({
        "error": {
            "kind": e.kind(),
            "message": e.to_string(),
        }
    });
    serde_json::to_string_pretty(&v).expect("json rendering")
}

fn load_config(path: &std::path::Path) -> std::result::Result<RunConfig, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Usage(format!("cannot read config {}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| Failure::Usage(format!("bad config {}: {e}", path.display())))
}

/// Parses `args` (including the program name), runs the command and writes
/// the report to `out` (or `--output`) and diagnostics to `err`.
/// Returns 0 on success, 1 when a computation fails or its checks do not
/// pass, 2 on usage errors.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 {
                write!(out, "{text}")
            } else {
                write!(err, "{text}")
            };
            return code;
        }
    };
    let outcome = (|| {
        let cfg = match &cli.config {
            Some(p) => load_config(p)?,
            None => RunConfig::default(),
        };
        let format = cli.format.or(cfg.format).unwrap_or(Format::Json);
        let output = cli.output.clone().or_else(|| cfg.output.clone());
        if format == Format::Csv
            && !matches!(
                cli.command,
                Command::Iseries(_)
                    | Command::PfCheck(_)
                    | Command::MirrorMap { .. }
                    | Command::VerifyAll
            )
        {
            return Err(Failure::Usage(
                "csv output is only available for coefficient tables".into(),
            ));
        }
        let resolved = Resolved { cfg };
        let report = execute(cli.command, &resolved)?;
        let bytes = render(&report, format)?;
        match output {
            Some(p) => std::fs::write(&p, &bytes).map_err(|e| {
                Failure::Compute(Error::InvalidInput(format!(
                    "cannot write {}: {e}",
                    p.display()
                )))
            })?,
            None => out
                .write_all(&bytes)
                .map_err(|e| Failure::Compute(Error::InvalidInput(e.to_string())))?,
        }
        Ok(report.ok)
    })();
    match outcome {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            2
        }
        Err(Failure::Compute(e)) => {
            let _ = writeln!(err, "{}", error_report(&e));
            1
        }
    }
}
