//! Command-line front end. Every run emits one self-describing report.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::acceptance;
use crate::bochner::{
    psd_check, random_configuration, search_best, GramWitness, KernelSpec, PsdVerdict,
    WitnessConfig, DEFAULT_BUDGET, DEFAULT_EIG_TOL, DEFAULT_PSD_TOL, DEFAULT_RESTARTS,
};
use crate::error::{Error, Result};
use crate::gammaq::{GammaQ, GammaQEvaluator, QuadratureSpec};
use crate::measures::{
    ks_statistic, moment_growth, project_unit, random_direction, sample_gaussian, write_growth_csv,
    ReferenceCdf, KS_CRITICAL_1PCT,
};
use crate::radialft::{
    contradiction_report, delta_window, jn_direct, jn_product, parseval_check, radial_ft,
    riesz_closed_form, CaseTag, TestFunctionSpec, Verdict,
};
use crate::rng::ShiftRegisterRng;
use crate::specfun::{parseval_constant, sq_closed_form, MomentOrder, QExponent, RadialPower};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_VERIFY: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "lqpd",
    version,
    about = "Positive definiteness of exp(-||x||_q^beta): special functions, transforms, certificates and Gram tests"
)]
pub struct Cli {
    /// Report format.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    pub format: Format,
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Subcommand, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Command {
    /// gamma_q(t) = 2 int_0^inf cos(tx) exp(-x^q) dx.
    GammaQ(GammaQArgs),
    /// Moments S_q(alpha) = int |t|^alpha gamma_q(t) dt.
    Sq(SqArgs),
    /// The constant c_beta of the 1-D transform of |x|^beta.
    Cbeta(CbetaArgs),
    /// Fourier transform of ||x||_q^beta at xi.
    RadialFt(RadialFtArgs),
    /// J_n as a product of moments, optionally against direct quadrature.
    Jn(JnArgs),
    /// The delta window of a contradiction case.
    Window(WindowArgs),
    /// Sign certificate for case a, b or c.
    Certificate(CertificateArgs),
    /// Parseval-type identity for |x|^beta against a test function.
    Parseval(ParsevalArgs),
    /// Smallest Gram eigenvalue for a point set.
    BochnerCheck(BochnerArgs),
    /// Search for (or re-verify) a Gram witness.
    Witness(WitnessArgs),
    /// KS distances of Gaussian projections onto random directions.
    Project(ProjectArgs),
    /// Empirical moments of symmetric stable samples.
    Moments(MomentsArgs),
    /// Run every acceptance criterion.
    VerifyAll(VerifyAllArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::GammaQ(_) => "gamma-q",
            Command::Sq(_) => "sq",
            Command::Cbeta(_) => "cbeta",
            Command::RadialFt(_) => "radial-ft",
            Command::Jn(_) => "jn",
            Command::Window(_) => "window",
            Command::Certificate(_) => "certificate",
            Command::Parseval(_) => "parseval",
            Command::BochnerCheck(_) => "bochner-check",
            Command::Witness(_) => "witness",
            Command::Project(_) => "project",
            Command::Moments(_) => "moments",
            Command::VerifyAll(_) => "verify-all",
        }
    }

    /// Arguments that reproduce this command, long flags only.
    pub fn to_argv(&self) -> Vec<String> {
        let mut argv = vec![self.name().to_string()];
        let Value::Object(fields) = serde_json::to_value(self).expect("arguments serialize") else {
            unreachable!("commands serialize to objects")
        };
        for (key, value) in fields {
            if key == "command" {
                continue;
            }
            let flag = format!("--{}", key.replace('_', "-"));
            match value {
                Value::Null | Value::Bool(false) => {}
                Value::Bool(true) => argv.push(flag),
                Value::Array(items) => {
                    if !items.is_empty() {
                        let joined: Vec<String> = items.iter().map(scalar_text).collect();
                        argv.push(format!("{flag}={}", joined.join(",")));
                    }
                }
                other => argv.push(format!("{flag}={}", scalar_text(&other))),
            }
        }
        argv
    }
}

fn scalar_text(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// Quadrature tolerances shared by the numerical subcommands.
#[derive(Debug, Clone, Copy, Args, Serialize, Deserialize)]
pub struct QuadArgs {
    #[arg(long, default_value_t = 1e-10)]
    pub abs_tol: f64,
    #[arg(long, default_value_t = 1e-9)]
    pub rel_tol: f64,
    /// End of the non-oscillatory head of the gamma_q integral.
    #[arg(long, default_value_t = 1.0)]
    pub smooth_cut: f64,
    #[arg(long, default_value_t = 2000)]
    pub max_panels: usize,
    /// t beyond which the asymptotic series may replace quadrature.
    #[arg(long, default_value_t = 40.0)]
    pub tail_switch: f64,
    /// Minimum number of asymptotic terms.
    #[arg(long, default_value_t = 3)]
    pub asym_terms: usize,
}

impl QuadArgs {
    fn spec(&self) -> Result<QuadratureSpec> {
        let s = QuadratureSpec {
            abs_tol: self.abs_tol,
            rel_tol: self.rel_tol,
            smooth_cut: self.smooth_cut,
            max_panels: self.max_panels,
            tail_switch: self.tail_switch,
            asym_terms: self.asym_terms,
        };
        s.validate()?;
        Ok(s)
    }
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct GammaQArgs {
    #[arg(long)]
    pub q: f64,
    /// Evaluation points, comma separated.
    #[arg(
        long,
        required = true,
        value_delimiter = ',',
        allow_hyphen_values = true
    )]
    pub t: Vec<f64>,
    #[command(flatten)]
    #[serde(flatten)]
    pub quad: QuadArgs,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct SqArgs {
    #[arg(long)]
    pub q: f64,
    #[arg(
        long,
        required = true,
        value_delimiter = ',',
        allow_hyphen_values = true
    )]
    pub alpha: Vec<f64>,
    /// Also integrate numerically and compare with the closed form.
    #[arg(long)]
    pub compare: bool,
    /// Relative tolerance for --compare.
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
    #[command(flatten)]
    #[serde(flatten)]
    pub quad: QuadArgs,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct CbetaArgs {
    #[arg(
        long,
        required = true,
        value_delimiter = ',',
        allow_hyphen_values = true
    )]
    pub beta: Vec<f64>,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct RadialFtArgs {
    #[arg(long)]
    pub q: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub beta: f64,
    /// Frequency vector; its length is the dimension n.
    #[arg(
        long,
        required = true,
        value_delimiter = ',',
        allow_hyphen_values = true
    )]
    pub xi: Vec<f64>,
    /// Compare with the closed form (q = 2, or n = 1).
    #[arg(long)]
    pub compare: bool,
    #[arg(long, default_value_t = 1e-5)]
    pub tol: f64,
    #[command(flatten)]
    #[serde(flatten)]
    pub quad: QuadArgs,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct JnArgs {
    #[arg(long)]
    pub q: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub beta: f64,
    /// alpha_1..alpha_{n-1}, each in (-1, 0).
    #[arg(
        long,
        required = true,
        value_delimiter = ',',
        allow_hyphen_values = true
    )]
    pub alpha: Vec<f64>,
    /// Also evaluate the unfactorized integral (n <= 3).
    #[arg(long)]
    pub direct: bool,
    #[arg(long, default_value_t = 1e-4)]
    pub tol: f64,
    #[command(flatten)]
    #[serde(flatten)]
    pub quad: QuadArgs,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct WindowArgs {
    #[arg(long)]
    pub case: CaseTag,
    #[arg(long)]
    pub q: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub beta: f64,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct CertificateArgs {
    #[arg(long)]
    pub case: CaseTag,
    #[arg(long)]
    pub q: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub beta: f64,
    /// Defaults to the middle of the window.
    #[arg(long)]
    pub delta: Option<f64>,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct ParsevalArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub beta: f64,
    #[arg(
        long,
        default_value = "1",
        value_delimiter = ',',
        allow_hyphen_values = true
    )]
    pub xi: Vec<f64>,
    #[arg(long, default_value_t = 0.5)]
    pub inner_radius: f64,
    #[arg(long, default_value_t = 1.5)]
    pub outer_radius: f64,
    #[arg(long, default_value_t = 1 << 16)]
    pub grid_size: usize,
    #[arg(long, default_value_t = 64.0)]
    pub box_halfwidth: f64,
    #[arg(long, default_value_t = 1e-3)]
    pub tol: f64,
    #[command(flatten)]
    #[serde(flatten)]
    pub quad: QuadArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Expectation {
    Psd,
    NotPsd,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct BochnerArgs {
    #[arg(long)]
    pub q: f64,
    #[arg(long)]
    pub beta: f64,
    #[arg(long)]
    pub n: usize,
    /// Number of random points (ignored with --points).
    #[arg(long, default_value_t = 20)]
    pub m: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Random points are uniform in [-w, w]^n.
    #[arg(long, default_value_t = 2.0)]
    pub half_width: f64,
    /// JSON file holding an array of points.
    #[arg(long)]
    pub points: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_PSD_TOL)]
    pub tol: f64,
    /// Exit with status 2 unless the verdict matches.
    #[arg(long, value_enum)]
    pub expect: Option<Expectation>,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct WitnessArgs {
    #[arg(long, default_value_t = 3.0)]
    pub q: f64,
    #[arg(long, default_value_t = 3.0)]
    pub beta: f64,
    #[arg(long, default_value_t = 1)]
    pub n: usize,
    #[arg(long, default_value_t = 40)]
    pub m: usize,
    /// Eigenvalue evaluations per restart.
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    pub budget: usize,
    #[arg(long, default_value_t = DEFAULT_RESTARTS)]
    pub restarts: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, default_value_t = DEFAULT_EIG_TOL)]
    pub eig_tol: f64,
    /// Re-verify a saved witness instead of searching.
    #[arg(long)]
    pub verify: Option<PathBuf>,
    /// Save the best configuration found as JSON.
    #[arg(long)]
    pub save: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct ProjectArgs {
    #[arg(long, default_value_t = 2)]
    pub n: usize,
    #[arg(long, default_value_t = 10_000)]
    pub m: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Number of random directions (ignored with --x).
    #[arg(long, default_value_t = 20)]
    pub directions: usize,
    /// An explicit direction.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub x: Vec<f64>,
    /// Required fraction of KS statistics below 1.63/sqrt(m).
    #[arg(long, default_value_t = 0.95)]
    pub min_fraction: f64,
    /// Also export the sample as CSV.
    #[arg(long)]
    pub samples_csv: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct MomentsArgs {
    #[arg(long, default_value_t = 1.0)]
    pub beta: f64,
    #[arg(long, default_value_t = 0.5, allow_hyphen_values = true)]
    pub p: f64,
    #[arg(
        long,
        default_value = "1000,10000,100000,1000000",
        value_delimiter = ','
    )]
    pub sizes: Vec<usize>,
    #[arg(long, default_value = "1", value_delimiter = ',')]
    pub seeds: Vec<u64>,
    /// Also export the growth curves as CSV.
    #[arg(long)]
    pub growth_csv: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct VerifyAllArgs {
    /// Run only these criteria.
    #[arg(long, value_delimiter = ',')]
    pub only: Vec<usize>,
}

/// The output of one run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Report {
    pub command: String,
    pub config: Value,
    pub argv: Vec<String>,
    /// `None` for commands that verify nothing.
    pub passed: Option<bool>,
    pub results: Vec<Value>,
}

impl Report {
    fn new(command: &Command, passed: Option<bool>, results: Vec<Value>) -> Self {
        Report {
            command: command.name().to_string(),
            config: serde_json::to_value(command).expect("arguments serialize"),
            argv: command.to_argv(),
            passed,
            results,
        }
    }

    pub fn write_json(&self, mut out: impl Write) -> Result<()> {
        serde_json::to_writer_pretty(&mut out, self)?;
        writeln!(out)?;
        Ok(())
    }

    /// Header row from the first record's keys; nested values as JSON text.
    pub fn write_csv(&self, out: impl Write) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let Some(Value::Object(first)) = self.results.first() else {
            w.flush()?;
            return Ok(());
        };
        let keys: Vec<&String> = first.keys().collect();
        w.write_record(keys.iter().map(|k| k.as_str()))?;
        for r in &self.results {
            let row: Vec<String> = keys
                .iter()
                .map(|k| match r.get(k.as_str()) {
                    None | Some(Value::Null) => String::new(),
                    Some(v) => scalar_text(v),
                })
                .collect();
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }
}

fn exponent(q: f64) -> Result<QExponent> {
    QExponent::new(q)
}

fn rel(a: f64, b: f64) -> f64 {
    (a / b - 1.0).abs()
}

/// Runs a parsed command.
pub fn execute(command: &Command) -> Result<Report> {
    match command {
        Command::GammaQ(a) => {
            let g = GammaQEvaluator::new(exponent(a.q)?, a.quad.spec()?)?;
            let rows =
                a.t.iter()
                    .map(|&t| Ok(json!({"t": t, "gamma_q": g.gamma_q(t)?})))
                    .collect::<Result<Vec<_>>>()?;
            Ok(Report::new(command, None, rows))
        }
        Command::Sq(a) => {
            let q = exponent(a.q)?;
            let g = GammaQEvaluator::new(q, a.quad.spec()?)?;
            let mut ok = true;
            let mut rows = Vec::new();
            for &alpha in &a.alpha {
                let order = MomentOrder::new(alpha, q)?;
                let closed = sq_closed_form(order)?;
                let mut row = Map::new();
                row.insert("alpha".into(), json!(alpha));
                row.insert("closed_form".into(), json!(closed));
                if a.compare {
                    let numeric = g.sq_numeric(order)?;
                    let r = rel(numeric, closed);
                    ok &= r < a.tol;
                    row.insert("numeric".into(), json!(numeric));
                    row.insert("rel_err".into(), json!(r));
                }
                rows.push(Value::Object(row));
            }
            Ok(Report::new(command, a.compare.then_some(ok), rows))
        }
        Command::Cbeta(a) => {
            let rows = a
                .beta
                .iter()
                .map(|&b| Ok(json!({"beta": b, "c_beta": parseval_constant(b)?})))
                .collect::<Result<Vec<_>>>()?;
            Ok(Report::new(command, None, rows))
        }
        Command::RadialFt(a) => {
            let q = exponent(a.q)?;
            let rp = RadialPower::new(a.beta, a.xi.len())?;
            let value = radial_ft(q, rp, &a.xi, a.quad.spec()?)?;
            let mut row = Map::new();
            row.insert("xi".into(), json!(a.xi));
            row.insert("value".into(), json!(value));
            let mut passed = None;
            if a.compare {
                let oracle = if a.q == 2.0 {
                    riesz_closed_form(a.beta, &a.xi)?
                } else if a.xi.len() == 1 {
                    parseval_constant(a.beta)? * a.xi[0].abs().powf(-1.0 - a.beta)
                } else {
                    return Err(Error::domain("closed forms exist only for q = 2 or n = 1"));
                };
                let r = rel(value, oracle);
                row.insert("closed_form".into(), json!(oracle));
                row.insert("rel_err".into(), json!(r));
                passed = Some(r < a.tol);
            }
            Ok(Report::new(command, passed, vec![Value::Object(row)]))
        }
        Command::Jn(a) => {
            let q = exponent(a.q)?;
            let cert = jn_product(q, a.beta, &a.alpha)?;
            let mut row = Map::new();
            row.insert("product".into(), json!(cert.product));
            row.insert("s_factors".into(), json!(cert.s_factors));
            row.insert("residual_order".into(), json!(cert.residual_order));
            let mut passed = None;
            if a.direct {
                let direct = jn_direct(q, a.beta, &a.alpha, a.quad.spec()?)?;
                let r = rel(direct, cert.product);
                row.insert("direct".into(), json!(direct));
                row.insert("rel_err".into(), json!(r));
                passed = Some(r < a.tol);
            }
            Ok(Report::new(command, passed, vec![Value::Object(row)]))
        }
        Command::Window(a) => {
            let (lo, hi) = delta_window(a.case, exponent(a.q)?, a.beta)?;
            Ok(Report::new(
                command,
                None,
                vec![json!({"case": a.case, "lower": lo, "upper": hi})],
            ))
        }
        Command::Certificate(a) => {
            let cert = contradiction_report(a.case, exponent(a.q)?, a.beta, a.delta)?;
            let ok = cert.verdict == Verdict::Contradiction;
            Ok(Report::new(
                command,
                Some(ok),
                vec![serde_json::to_value(&cert)?],
            ))
        }
        Command::Parseval(a) => {
            let psi = TestFunctionSpec {
                inner_radius: a.inner_radius,
                outer_radius: a.outer_radius,
                grid_size: a.grid_size,
                box_halfwidth: a.box_halfwidth,
                ..TestFunctionSpec::default()
            };
            let spec = a.quad.spec()?;
            let mut ok = true;
            let mut rows = Vec::new();
            for &xi in &a.xi {
                let out = parseval_check(a.beta, &psi, xi, spec)?;
                ok &= out.rel_err < a.tol;
                rows.push(
                    json!({"xi": xi, "lhs": out.lhs, "rhs": out.rhs, "rel_err": out.rel_err}),
                );
            }
            Ok(Report::new(command, Some(ok), rows))
        }
        Command::BochnerCheck(a) => {
            let k = KernelSpec::new(exponent(a.q)?, a.beta, a.n)?;
            let points: Vec<Vec<f64>> = match &a.points {
                Some(path) => serde_json::from_reader(std::fs::File::open(path)?)?,
                None => {
                    let mut rng = ShiftRegisterRng::new(a.seed);
                    random_configuration(a.m, a.n, a.half_width, k.q, &mut rng)
                }
            };
            let r = psd_check(&points, &k, a.tol)?;
            let passed = a.expect.map(|e| match e {
                Expectation::Psd => r.verdict == PsdVerdict::Psd,
                Expectation::NotPsd => r.verdict == PsdVerdict::NotPsd,
            });
            Ok(Report::new(command, passed, vec![serde_json::to_value(r)?]))
        }
        Command::Witness(a) => {
            if let Some(path) = &a.verify {
                let w: GramWitness = serde_json::from_reader(std::fs::File::open(path)?)?;
                let (jacobi, bound) = w.recheck()?;
                let ok = w.reverify()?;
                let row = json!({
                    "file": path,
                    "m": w.points.len(),
                    "min_eigenvalue": jacobi,
                    "verified_eigenvalue": bound,
                    "eig_tol": w.eig_tol,
                    "verified": ok,
                });
                return Ok(Report::new(command, Some(ok), vec![row]));
            }
            let k = KernelSpec::new(exponent(a.q)?, a.beta, a.n)?;
            let cfg = WitnessConfig {
                m: a.m,
                budget: a.budget,
                restarts: a.restarts,
                seed: a.seed,
                eig_tol: a.eig_tol,
            };
            let w = search_best(&k, &cfg)?;
            if let Some(path) = &a.save {
                serde_json::to_writer_pretty(std::fs::File::create(path)?, &w)?;
            }
            Ok(Report::new(command, None, vec![serde_json::to_value(&w)?]))
        }
        Command::Project(a) => {
            let s = sample_gaussian(a.n, a.m, a.seed)?;
            if let Some(path) = &a.samples_csv {
                s.save_csv(path)?;
            }
            let directions: Vec<Vec<f64>> = if a.x.is_empty() {
                let mut rng = ShiftRegisterRng::stream(a.seed, 1_000 + a.n as u64);
                (0..a.directions)
                    .map(|_| random_direction(a.n, &mut rng))
                    .collect()
            } else {
                vec![a.x.clone()]
            };
            let threshold = KS_CRITICAL_1PCT / (a.m as f64).sqrt();
            let mut below = 0;
            let mut rows = Vec::new();
            for x in &directions {
                let d = ks_statistic(&project_unit(&s, x)?, ReferenceCdf::StdNormal)?;
                below += usize::from(d < threshold);
                rows.push(json!({"direction": x, "ks": d, "threshold": threshold}));
            }
            let frac = below as f64 / directions.len().max(1) as f64;
            Ok(Report::new(command, Some(frac >= a.min_fraction), rows))
        }
        Command::Moments(a) => {
            let mut rows = Vec::new();
            let mut curves = Vec::new();
            for &seed in &a.seeds {
                let curve = moment_growth(a.beta, a.p, &a.sizes, seed)?;
                for pt in &curve {
                    rows.push(json!({"seed": seed, "m": pt.m, "moment": pt.moment}));
                }
                curves.extend(curve);
            }
            if let Some(path) = &a.growth_csv {
                write_growth_csv(&curves, std::fs::File::create(path)?)?;
            }
            Ok(Report::new(command, None, rows))
        }
        Command::VerifyAll(a) => {
            let ids: Vec<usize> = if a.only.is_empty() {
                (1..=acceptance::CRITERIA).collect()
            } else {
                a.only.clone()
            };
            let mut outcomes = Vec::new();
            for id in ids {
                let o = acceptance::run_criterion(id)
                    .ok_or_else(|| Error::domain(format!("no acceptance criterion {id}")))?;
                println!("{o}");
                outcomes.push(o);
            }
            let ok = outcomes.iter().all(|o| o.passed);
            let rows = outcomes
                .iter()
                .map(serde_json::to_value)
                .collect::<std::result::Result<Vec<_>, _>>()?;
            Ok(Report::new(command, Some(ok), rows))
        }
    }
}

fn configure_threads() {
    if let Some(n) = std::env::var("LQPD_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
    {
        // a pool that already exists keeps its size
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build_global();
    }
}

fn emit(cli: &Cli, report: &Report) -> Result<()> {
    let verify_all = matches!(cli.command, Command::VerifyAll(_));
    match &cli.output {
        Some(path) => {
            let f = std::fs::File::create(path)?;
            match cli.format {
                Format::Json => report.write_json(f),
                Format::Csv => report.write_csv(f),
            }
        }
        // verify-all has already printed its table
        None if verify_all => Ok(()),
        None => {
            let out = std::io::stdout().lock();
            match cli.format {
                Format::Json => report.write_json(out),
                Format::Csv => report.write_csv(out),
            }
        }
    }
}

/// Parses `argv` (program name first), runs it and returns the exit status.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    configure_threads();
    let report = match execute(&cli.command) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_USAGE;
        }
    };
    if let Err(e) = emit(&cli, &report) {
        eprintln!("error: {e}");
        return EXIT_USAGE;
    }
    match report.passed {
        Some(false) => {
            eprintln!("verification failed");
            EXIT_VERIFY
        }
        _ => EXIT_OK,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> Cli {
        Cli::try_parse_from(std::iter::once("lqpd").chain(args.iter().copied())).unwrap()
    }

    fn round_trip(args: &[&str]) {
        let cli = parse(args);
        let argv = cli.command.to_argv();
        let again = parse(&argv.iter().map(String::as_str).collect::<Vec<_>>());
        assert_eq!(
            serde_json::to_value(&cli.command).unwrap(),
            serde_json::to_value(&again.command).unwrap(),
            "{argv:?}"
        );
    }

    #[test]
    fn argv_round_trips() {
        round_trip(&["gamma-q", "--q", "3", "--t", "0.1,1,2.5"]);
        round_trip(&[
            "sq",
            "--q",
            "2",
            "--alpha",
            "-0.5,1",
            "--compare",
            "--abs-tol",
            "1e-12",
        ]);
        round_trip(&["jn", "--q", "3", "--beta", "1", "--alpha", "-0.75,-0.75"]);
        round_trip(&["certificate", "--case", "c", "--q", "4", "--beta", "-0.5"]);
        round_trip(&["witness", "--m", "10", "--save", "/tmp/w.json"]);
        round_trip(&["moments", "--sizes", "10,100", "--seeds", "1,2"]);
        round_trip(&["verify-all", "--only", "9,10"]);
    }

    #[test]
    fn negative_values_parse() {
        let cli = parse(&["radial-ft", "--q", "3", "--beta", "-0.5", "--xi", "-1,2"]);
        match cli.command {
            Command::RadialFt(a) => {
                assert_eq!(a.beta, -0.5);
                assert_eq!(a.xi, vec![-1.0, 2.0]);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn gaussian_moment_compare() {
        let cli = parse(&["sq", "--q", "2", "--alpha", "1", "--compare"]);
        let r = execute(&cli.command).unwrap();
        assert_eq!(r.passed, Some(true));
        let closed = r.results[0]["closed_form"].as_f64().unwrap();
        assert!((closed - 4.0 * std::f64::consts::PI.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn excluded_order_is_a_domain_error() {
        assert_eq!(
            run(["lqpd", "sq", "--q", "3", "--alpha", "2.0"]),
            EXIT_USAGE
        );
        assert_eq!(run(["lqpd", "no-such-command"]), EXIT_USAGE);
    }

    #[test]
    fn csv_layout() {
        let cli = parse(&["cbeta", "--beta", "0.5,1.5"]);
        let r = execute(&cli.command).unwrap();
        let mut buf = Vec::new();
        r.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 3);
        assert_eq!(lines[0], "beta,c_beta");
    }
}
