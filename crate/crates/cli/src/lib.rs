//! Command-line surface of `qopuc`: tables, verification reports, weight
//! samples, zeros and moments, as CSV or JSON.

use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use qopuc::chainseq::{d_coeff, ChainData};
use qopuc::families::r_poly;
use qopuc::opuc::{
    measure_moment, opuc_for, szego_function, MeasureFamily, MeasureSpec, SzegoFamily,
};
use qopuc::quadlab::auto_refine;
use qopuc::verify::run_suite;
use qopuc::QBParams;

/// Tolerance of the quadrature used by `moments`.
pub const MOMENT_QUAD_TOL: f64 = 1e-13;

#[derive(Debug, Parser)]
#[command(name = "qopuc", version, about = "OPUC from basic hypergeometric functions")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, PartialEq, Subcommand)]
pub enum Command {
    /// Verblunsky coefficients, norms and chain-sequence parameters per degree
    Tables(Common),
    /// Run every invariant check; exit 1 if any fails
    Verify(Common),
    /// Sample the weight and |D|^2 on uniform angles
    Weight {
        #[command(flatten)]
        common: Common,
        /// Number of sample angles
        #[arg(long, default_value_t = 256)]
        n: usize,
    },
    /// Zeros of the self-inversive R_1, ..., R_kmax
    Roots(Common),
    /// Closed-form measure moments against quadrature, |j| <= kmax
    Moments(Common),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Hat,
    Check,
    Pastro,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Args)]
pub struct Common {
    /// Base q in (0, 0.999]
    #[arg(long)]
    pub q: f64,
    /// Re(b) = lambda
    #[arg(long, allow_negative_numbers = true)]
    pub b_re: f64,
    /// Im(b); b = lambda - i eta, so eta = -b_im
    #[arg(long, allow_negative_numbers = true)]
    pub b_im: f64,
    /// Largest degree
    #[arg(long, default_value_t = 10)]
    pub kmax: usize,
    /// Mass at z = 1 for the check family, in [0, 1)
    #[arg(long, allow_negative_numbers = true)]
    pub t: Option<f64>,
    #[arg(long, value_enum, default_value_t = Family::Hat)]
    pub family: Family,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Truncation tolerance of the q-series and products
    #[arg(long, default_value_t = qopuc::qcore::DEFAULT_TOL)]
    pub tol: f64,
    /// Output file (stdout when absent)
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid input: {0}")]
    Invalid(qopuc::Error),
    #[error("computation failed: {0}")]
    Compute(#[from] qopuc::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Invalid(_) => 2,
            _ => 1,
        }
    }
}

fn invalid(msg: impl Into<String>) -> CliError {
    CliError::Invalid(qopuc::Error::InvalidParameter(msg.into()))
}

/// Echo of the validated run parameters, written ahead of the rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunParams {
    pub command: String,
    pub family: Family,
    pub q: f64,
    pub b_re: f64,
    pub b_im: f64,
    pub lambda: f64,
    pub eta: f64,
    pub kmax: usize,
    pub t: Option<f64>,
    pub tol: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table<R> {
    pub params: RunParams,
    pub rows: Vec<R>,
}

/// Row layout for CSV output; JSON uses the serde field names, in the same order.
pub trait CsvRow {
    const HEADER: &'static [&'static str];
    fn cells(&self) -> Vec<String>;
}

/// Row `k` holds `alpha_(k-1)` (absent for `k = 0`), `kappa_k^-2` and the
/// chain quantities with index `k + 1`: `ell_(k+1)`, `M_(k+1)`, `c_(k+1)`,
/// `d_(k+1)` (absent for `k = 0`) and, with a mass at `z = 1`, `m_(k+1)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TablesRow {
    pub k: usize,
    pub alpha_re: Option<f64>,
    pub alpha_im: Option<f64>,
    pub alpha_abs: Option<f64>,
    pub kappa_inv_sq: f64,
    pub ell: Option<f64>,
    #[serde(rename = "M")]
    pub max_param: Option<f64>,
    pub c: Option<f64>,
    pub d: Option<f64>,
    pub m: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyRow {
    pub name: String,
    /// `None` when the check could not be evaluated.
    pub residual: Option<f64>,
    pub threshold: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightRow {
    pub theta: f64,
    pub weight: f64,
    /// Absent for the Pastro weight.
    pub szego_mod_sq: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RootsRow {
    pub k: usize,
    pub j: usize,
    pub re: f64,
    pub im: f64,
    pub modulus: f64,
    pub angle: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentsRow {
    pub j: i64,
    pub closed_re: f64,
    pub closed_im: f64,
    pub quad_re: f64,
    pub quad_im: f64,
    pub abs_diff: f64,
    pub nodes: usize,
}

fn opt(x: Option<f64>) -> String {
    x.map(format_g17).unwrap_or_default()
}

impl CsvRow for TablesRow {
    const HEADER: &'static [&'static str] = &[
        "k", "alpha_re", "alpha_im", "alpha_abs", "kappa_inv_sq", "ell", "M", "c", "d", "m",
    ];
    fn cells(&self) -> Vec<String> {
        vec![
            self.k.to_string(),
            opt(self.alpha_re),
            opt(self.alpha_im),
            opt(self.alpha_abs),
            format_g17(self.kappa_inv_sq),
            opt(self.ell),
            opt(self.max_param),
            opt(self.c),
            opt(self.d),
            opt(self.m),
        ]
    }
}

impl CsvRow for VerifyRow {
    const HEADER: &'static [&'static str] = &["name", "residual", "threshold", "passed"];
    fn cells(&self) -> Vec<String> {
        vec![
            self.name.clone(),
            opt(self.residual),
            format_g17(self.threshold),
            self.passed.to_string(),
        ]
    }
}

impl CsvRow for WeightRow {
    const HEADER: &'static [&'static str] = &["theta", "weight", "szego_mod_sq"];
    fn cells(&self) -> Vec<String> {
        vec![format_g17(self.theta), format_g17(self.weight), opt(self.szego_mod_sq)]
    }
}

impl CsvRow for RootsRow {
    const HEADER: &'static [&'static str] = &["k", "j", "re", "im", "modulus", "angle"];
    fn cells(&self) -> Vec<String> {
        vec![
            self.k.to_string(),
            self.j.to_string(),
            format_g17(self.re),
            format_g17(self.im),
            format_g17(self.modulus),
            format_g17(self.angle),
        ]
    }
}

impl CsvRow for MomentsRow {
    const HEADER: &'static [&'static str] =
        &["j", "closed_re", "closed_im", "quad_re", "quad_im", "abs_diff", "nodes"];
    fn cells(&self) -> Vec<String> {
        vec![
            self.j.to_string(),
            format_g17(self.closed_re),
            format_g17(self.closed_im),
            format_g17(self.quad_re),
            format_g17(self.quad_im),
            format_g17(self.abs_diff),
            self.nodes.to_string(),
        ]
    }
}

/// C's `%.17g`: 17 significant digits, trailing zeros dropped, exponent form
/// outside `1e-4 <= |x| < 1e17`.
pub fn format_g17(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.into();
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0" } else { "0" }.into();
    }
    let sci = format!("{x:.16e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..17).contains(&exp) {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim_zeros(mantissa), exp.abs())
    } else {
        trim_zeros(&format!("{x:.*}", (16 - exp) as usize)).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

pub fn render_csv<R: CsvRow>(rows: &[R]) -> String {
    let mut out = String::new();
    out.push_str(&R::HEADER.join(","));
    out.push('\n');
    for row in rows {
        out.push_str(&row.cells().join(","));
        out.push('\n');
    }
    out
}

pub fn render<R: CsvRow + Serialize>(table: &Table<R>, format: Format) -> Result<String, CliError> {
    Ok(match format {
        Format::Csv => render_csv(&table.rows),
        Format::Json => {
            let mut s = serde_json::to_string_pretty(table)?;
            s.push('\n');
            s
        }
    })
}

/// Validated inputs shared by every command.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub params: QBParams,
    pub family: MeasureFamily,
    pub common: Common,
}

impl RunConfig {
    pub fn new(common: &Common) -> Result<Self, CliError> {
        let params = QBParams::new(common.q, common.b_re, common.b_im)
            .and_then(|p| p.with_tol(common.tol))
            .map_err(CliError::Invalid)?;
        let family = match (common.family, common.t) {
            (Family::Check, Some(t)) => {
                if !(0.0..1.0).contains(&t) {
                    return Err(invalid("t must lie in [0, 1)"));
                }
                if t > 0.0 {
                    MeasureFamily::CheckWithMass { t }
                } else {
                    MeasureFamily::Check
                }
            }
            (_, Some(_)) => return Err(invalid("t applies only to the check family")),
            (Family::Hat, None) => MeasureFamily::Hat,
            (Family::Check, None) => MeasureFamily::Check,
            (Family::Pastro, None) => MeasureFamily::Pastro,
        };
        Ok(Self {
            params,
            family,
            common: common.clone(),
        })
    }

    fn run_params(&self, command: &str) -> RunParams {
        RunParams {
            command: command.into(),
            family: self.common.family,
            q: self.params.q(),
            b_re: self.common.b_re,
            b_im: self.common.b_im,
            lambda: self.params.lambda(),
            eta: self.params.eta(),
            kmax: self.common.kmax,
            t: self.common.t,
            tol: self.params.tol(),
        }
    }

    /// Everything but Pastro needs `lambda > 0`; so do the checks of `verify`
    /// and the zeros of `R_k`.
    fn require_lambda(&self, always: bool) -> Result<(), CliError> {
        if always || self.family != MeasureFamily::Pastro {
            self.params.require_positive_lambda().map_err(CliError::Invalid)?;
        }
        Ok(())
    }

    fn t_value(&self) -> Option<f64> {
        match self.family {
            MeasureFamily::CheckWithMass { t } => Some(t),
            _ => None,
        }
    }
}

pub fn tables(cfg: &RunConfig) -> Result<Table<TablesRow>, CliError> {
    cfg.require_lambda(false)?;
    let kmax = cfg.common.kmax;
    let p = &cfg.params;
    let seq = opuc_for(cfg.family, p, kmax)?;
    let chain = match cfg.family {
        MeasureFamily::Pastro => None,
        _ => Some(ChainData::new(p, kmax, cfg.t_value())?),
    };
    let rows = (0..=kmax)
        .map(|k| {
            let alpha = (k > 0).then(|| seq.verblunsky[k - 1]);
            let chain = chain.as_ref();
            TablesRow {
                k,
                alpha_re: alpha.map(|a| a.re),
                alpha_im: alpha.map(|a| a.im),
                alpha_abs: alpha.map(|a| a.norm()),
                kappa_inv_sq: seq.kappa_inv_sq[k],
                ell: chain.map(|c| c.ell(k + 1)),
                max_param: chain.map(|c| c.max_param(k + 1)),
                c: chain.map(|c| c.c(k + 1)),
                d: chain.filter(|_| k > 0).map(|_| d_coeff(p, k)),
                m: chain.and_then(|c| c.modified()).map(|(_, m)| m[k]),
            }
        })
        .collect();
    Ok(Table {
        params: cfg.run_params("tables"),
        rows,
    })
}

pub fn verify(cfg: &RunConfig) -> Result<Table<VerifyRow>, CliError> {
    cfg.require_lambda(true)?;
    let report = run_suite(&cfg.params, cfg.common.kmax, cfg.t_value())
        .map_err(CliError::Invalid)?;
    let rows = report
        .into_iter()
        .map(|c| VerifyRow {
            name: c.name,
            residual: c.residual.is_finite().then_some(c.residual),
            threshold: c.threshold,
            passed: c.passed,
        })
        .collect();
    Ok(Table {
        params: cfg.run_params("verify"),
        rows,
    })
}

pub fn weight(cfg: &RunConfig, n: usize) -> Result<Table<WeightRow>, CliError> {
    cfg.require_lambda(false)?;
    if n == 0 {
        return Err(invalid("n must be positive"));
    }
    let spec = MeasureSpec::new(cfg.family, cfg.params)?;
    let szego = match cfg.family {
        MeasureFamily::Hat => Some(SzegoFamily::Hat),
        MeasureFamily::Check | MeasureFamily::CheckWithMass { .. } => Some(SzegoFamily::Check),
        MeasureFamily::Pastro => None,
    };
    let rows = (0..n)
        .map(|m| {
            let theta = std::f64::consts::TAU * m as f64 / n as f64;
            let szego_mod_sq = szego
                .map(|fam| {
                    let d = szego_function(fam, &cfg.params, Complex64::from_polar(1.0, theta))?;
                    Ok::<_, qopuc::Error>(spec.continuous_mass() * d.norm_sqr())
                })
                .transpose()?;
            Ok(WeightRow {
                theta,
                weight: spec.weight(theta),
                szego_mod_sq,
            })
        })
        .collect::<Result<_, qopuc::Error>>()?;
    Ok(Table {
        params: cfg.run_params("weight"),
        rows,
    })
}

pub fn roots(cfg: &RunConfig) -> Result<Table<RootsRow>, CliError> {
    cfg.require_lambda(true)?;
    let mut rows = Vec::new();
    for (k, r) in r_poly(&cfg.params, cfg.common.kmax)?.iter().enumerate().skip(1) {
        let zeros = r.roots()?;
        for (j, (z, angle)) in zeros.zeros.iter().zip(&zeros.angles).enumerate() {
            rows.push(RootsRow {
                k,
                j,
                re: z.re,
                im: z.im,
                modulus: z.norm(),
                angle: *angle,
            });
        }
    }
    Ok(Table {
        params: cfg.run_params("roots"),
        rows,
    })
}

pub fn moments(cfg: &RunConfig) -> Result<Table<MomentsRow>, CliError> {
    cfg.require_lambda(false)?;
    let spec = MeasureSpec::new(cfg.family, cfg.params)?;
    let kmax = cfg.common.kmax as i64;
    let rows = (-kmax..=kmax)
        .map(|j| {
            let closed = measure_moment(cfg.family, &cfg.params, j)?;
            let (quad, nodes) = auto_refine(&spec, |z| z.powi(-(j as i32)), MOMENT_QUAD_TOL)?;
            Ok(MomentsRow {
                j,
                closed_re: closed.re,
                closed_im: closed.im,
                quad_re: quad.re,
                quad_im: quad.im,
                abs_diff: (closed - quad).norm(),
                nodes,
            })
        })
        .collect::<Result<_, qopuc::Error>>()?;
    Ok(Table {
        params: cfg.run_params("moments"),
        rows,
    })
}

fn emit<R: CsvRow + Serialize>(table: &Table<R>, common: &Common) -> Result<(), CliError> {
    let text = render(table, common.format)?;
    match &common.out {
        Some(path) => std::fs::write(path, text)?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

/// Runs one command and returns the process exit code.
pub fn run(cli: &Cli) -> Result<ExitCode, CliError> {
    match &cli.command {
        Command::Tables(common) => emit(&tables(&RunConfig::new(common)?)?, common)?,
        Command::Verify(common) => {
            let table = verify(&RunConfig::new(common)?)?;
            emit(&table, common)?;
            if table.rows.iter().any(|r| !r.passed) {
                let mut msg = String::from("failed checks:");
                for r in table.rows.iter().filter(|r| !r.passed) {
                    let _ = write!(msg, " {}", r.name);
                }
                eprintln!("{msg}");
                return Ok(ExitCode::from(1));
            }
        }
        Command::Weight { common, n } => emit(&weight(&RunConfig::new(common)?, *n)?, common)?,
        Command::Roots(common) => emit(&roots(&RunConfig::new(common)?)?, common)?,
        Command::Moments(common) => emit(&moments(&RunConfig::new(common)?)?, common)?,
    }
    Ok(ExitCode::SUCCESS)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn g17_matches_printf() {
        let cases = [
            (0.1, "0.10000000000000001"),
            (1.0, "1"),
            (-2.5, "-2.5"),
            (1e-5, "1.0000000000000001e-05"),
            (123456.0, "123456"),
            (1e17, "1e+17"),
            (1e16, "10000000000000000"),
            (0.0001, "0.0001"),
            (std::f64::consts::PI, "3.1415926535897931"),
            (-0.0, "-0"),
            (5e-324, "4.9406564584124654e-324"),
        ];
        for (x, want) in cases {
            assert_eq!(format_g17(x), want, "{x:e}");
        }
    }

    #[test]
    fn g17_round_trips() {
        for x in [0.3, 1.0 / 3.0, 2.0f64.sqrt(), 6.02214076e23, 1.234e-7, -9.87654321e-300] {
            assert_eq!(format_g17(x).parse::<f64>().unwrap(), x);
        }
    }

    fn common(args: &[&str]) -> Common {
        let mut argv = vec!["qopuc", "tables"];
        argv.extend_from_slice(args);
        match Cli::try_parse_from(argv).unwrap().command {
            Command::Tables(c) => c,
            _ => unreachable!(),
        }
    }

    #[test]
    fn negative_imaginary_part_parses() {
        let c = common(&["--q", "0.5", "--b-re", "0.8", "--b-im", "-0.6"]);
        assert_eq!(c.b_im, -0.6);
        let cfg = RunConfig::new(&c).unwrap();
        assert_eq!(cfg.params.eta(), 0.6);
    }

    #[test]
    fn t_only_for_check() {
        let c = common(&["--q", "0.5", "--b-re", "0.8", "--b-im", "0", "--t", "0.3"]);
        assert_eq!(RunConfig::new(&c).unwrap_err().exit_code(), 2);
        let c = common(&[
            "--q", "0.5", "--b-re", "0.8", "--b-im", "0", "--t", "0.3", "--family", "check",
        ]);
        assert_eq!(
            RunConfig::new(&c).unwrap().family,
            MeasureFamily::CheckWithMass { t: 0.3 }
        );
    }

    #[test]
    fn hat_anchor_table() {
        let c = common(&["--q", "0.5", "--b-re", "1", "--b-im", "0", "--kmax", "10"]);
        let t = tables(&RunConfig::new(&c).unwrap()).unwrap();
        assert_eq!(t.rows.len(), 11);
        assert_eq!(t.rows[0].alpha_re, None);
        for row in &t.rows[1..] {
            assert!((row.alpha_re.unwrap() + 1.0 / (row.k as f64 + 1.0)).abs() < 1e-12);
        }
    }

    #[test]
    fn moments_agree() {
        let c = common(&["--q", "0.5", "--b-re", "0.8", "--b-im", "-0.6", "--kmax", "4"]);
        let t = moments(&RunConfig::new(&c).unwrap()).unwrap();
        assert!(t.rows.iter().all(|r| r.abs_diff < 1e-10));
    }
}
