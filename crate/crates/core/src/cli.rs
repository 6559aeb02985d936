//! Command-line front end. Every subcommand prints one JSON document on
//! stdout; diagnostics go to stderr.
//!
//! Exit codes: 0 success, 1 internal failure, 2 parse error, 3 unsupported
//! input (order, region arguments, `λ₁ = 0`), 4 not apportionable,
//! 5 apportionability unknown, 6 constant outside `K(A)`, 7 singular `M`.

use std::f64::consts::PI;
use std::fs;
use std::io::Read;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::classify::{admissible_region, certificate_at, classify, region_csv, region_svg, MatrixInput, RegionGrid,
    RegionStatus};
use crate::constructors::{apportion_3x3_template, apportion_i_oplus_o, apportion_nilpotent, ApportionCertificate,
    TemplateKind};
use crate::error::Error;
use crate::io::{bounds_value, certificate_value, matrix_value, parse_document, report_value, search_value,
    sigma_value, to_json_string, uniformity_value};
use crate::jordan::{build_jordan, JordanSpec};
use crate::matrix::{C64, ONE};
use crate::report::Bounds;
use crate::search::{find_apportioning, sigma_estimate, thread_count, SearchConfig};
use crate::uniform::{is_uniform, Tolerance};

#[derive(Debug, Parser)]
#[command(name = "apportion", version, about = "Find similarities that make every entry of a matrix the same modulus")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RegionFormat {
    Csv,
    Svg,
}

#[derive(Debug, clap::Args)]
pub struct SearchArgs {
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, default_value_t = 32)]
    pub restarts: usize,
    #[arg(long, default_value_t = 1e-8)]
    pub defect_target: f64,
    #[arg(long, default_value_t = 2000)]
    pub max_iters: usize,
    /// Include the per-restart record.
    #[arg(long)]
    pub transcript: bool,
}

impl SearchArgs {
    fn config(&self) -> SearchConfig {
        SearchConfig {
            seed: self.seed,
            restarts: self.restarts,
            defect_target: self.defect_target,
            max_iters: self.max_iters,
            ..SearchConfig::default()
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Verdict, constant set and bounds for a matrix document (`-` reads stdin).
    Classify { input: PathBuf },
    /// Build an apportioning certificate, optionally at a given constant.
    Apportion {
        input: PathBuf,
        #[arg(long)]
        kappa: Option<f64>,
    },
    /// Check whether `M A M⁻¹` is uniform.
    Verify {
        a: PathBuf,
        m: PathBuf,
        #[arg(long, default_value_t = 1e-9)]
        rel: f64,
        #[arg(long, default_value_t = 1e-12)]
        abs: f64,
    },
    /// Trace and Hadamard lower bounds on every apportionment constant.
    Bounds { input: PathBuf },
    /// Rasterize the admissible second eigenvalues of a 2×2 diagonal matrix.
    Region {
        /// Real part of λ₁.
        #[arg(long, allow_hyphen_values = true)]
        re: f64,
        /// Imaginary part of λ₁.
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        im: f64,
        /// Half width of the square box centred at the origin.
        #[arg(long = "box", default_value_t = 3.0)]
        half_width: f64,
        #[arg(long, default_value_t = 401)]
        res: usize,
        #[arg(long, value_enum, default_value_t = RegionFormat::Csv)]
        format: RegionFormat,
        #[arg(long)]
        out: PathBuf,
    },
    /// Numerical multi-start search for an apportioning matrix.
    Search {
        input: PathBuf,
        #[command(flatten)]
        args: SearchArgs,
    },
    /// Estimate how many zero blocks make the matrix apportionable.
    Sigma {
        input: PathBuf,
        #[arg(long)]
        m_max: Option<usize>,
        #[command(flatten)]
        args: SearchArgs,
    },
    /// Rebuild and verify a few reference constructions.
    Demo,
}

/// An error together with the exit code it maps to.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub error: Error,
}

impl From<Error> for Failure {
    fn from(error: Error) -> Self {
        Failure { code: exit_code(&error), error }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Parse(_) => 2,
        Error::UnsupportedOrder { .. }
        | Error::InvalidInput(_)
        | Error::NotSquare { .. }
        | Error::ShapeMismatch(_)
        | Error::OutOfScope(_)
        | Error::Budget(_) => 3,
        Error::NotApportionable(_) => 4,
        Error::Unknown(_) => 5,
        Error::ConstantNotAchievable { .. } | Error::BelowMinimum { .. } | Error::BelowThreshold { .. } => 6,
        Error::Singular { .. } | Error::SingularCompletion(_) => 7,
        Error::Precondition(_) | Error::Infeasible(_) | Error::Verification(_) => 1,
    }
}

fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::InvalidInput(_) => "InvalidInput",
        Error::NotSquare { .. } => "NotSquare",
        Error::ShapeMismatch(_) => "ShapeMismatch",
        Error::Singular { .. } => "Singular",
        Error::Precondition(_) => "Precondition",
        Error::SingularCompletion(_) => "SingularCompletion",
        Error::UnsupportedOrder { .. } => "UnsupportedOrder",
        Error::BelowMinimum { .. } => "BelowMinimum",
        Error::BelowThreshold { .. } => "BelowThreshold",
        Error::OutOfScope(_) => "OutOfScope",
        Error::Infeasible(_) => "Infeasible",
        Error::ConstantNotAchievable { .. } => "ConstantNotAchievable",
        Error::NotApportionable(_) => "NotApportionable",
        Error::Unknown(_) => "Unknown",
        Error::Budget(_) => "Budget",
        Error::Verification(_) => "Verification",
        Error::Parse(_) => "Parse",
    }
}

pub fn error_value(f: &Failure) -> Value {
    json!({ "error": { "code": f.code, "kind": error_kind(&f.error), "message": f.error.to_string() } })
}

fn read_text(path: &Path) -> Result<String, Failure> {
    let res = if path == Path::new("-") {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).map(|_| s)
    } else {
        fs::read_to_string(path)
    };
    res.map_err(|e| Failure { code: 2, error: Error::Parse(format!("{}: {e}", path.display())) })
}

fn load(path: &Path) -> Result<MatrixInput, Failure> {
    Ok(parse_document(&read_text(path)?)?)
}

fn reverified(input: &MatrixInput, cert: &ApportionCertificate) -> Result<Value, Failure> {
    let report = cert.verify(&input.matrix(), Tolerance::default())?;
    let mut v = certificate_value(cert);
    v["verification"] = uniformity_value(&report);
    Ok(v)
}

fn cmd_region(
    lambda1: C64,
    half_width: f64,
    res: usize,
    format: RegionFormat,
    out: &Path,
) -> Result<Value, Failure> {
    if !(half_width.is_finite() && half_width > 0.0) {
        return Err(Error::InvalidInput(format!("box half width must be positive, got {half_width}")).into());
    }
    let grid = RegionGrid::square(half_width, res);
    let samples = admissible_region(lambda1, &grid)?;
    let body = match format {
        RegionFormat::Csv => region_csv(&samples),
        RegionFormat::Svg => region_svg(&samples, &grid),
    };
    fs::write(out, body).map_err(|e| Error::InvalidInput(format!("{}: {e}", out.display())))?;
    let count = |s: RegionStatus| samples.iter().filter(|x| x.status == s).count();
    Ok(json!({
        "lambda1": [lambda1.re, lambda1.im],
        "box": [-half_width, half_width],
        "resolution": res,
        "format": format!("{format:?}").to_lowercase(),
        "out": out.display().to_string(),
        "admissible": count(RegionStatus::Admissible),
        "inadmissible": count(RegionStatus::Inadmissible),
        "degenerate": count(RegionStatus::Degenerate),
    }))
}

fn demo_entry(name: &str, a_spec: &JordanSpec, cert: ApportionCertificate) -> Result<Value, Failure> {
    let input = MatrixInput::Jordan(a_spec.clone());
    let mut v = reverified(&input, &cert)?;
    v["name"] = json!(name);
    v["A"] = matrix_value(&build_jordan(a_spec));
    Ok(v)
}

fn cmd_demo() -> Result<Value, Failure> {
    let nil = JordanSpec::from_real(&[(0.0, 3), (0.0, 2)])?;
    let nil_cert = apportion_nilpotent(&nil, 1.0 / 3f64.sqrt())?;
    let io = JordanSpec::from_real(&[(1.0, 1), (0.0, 1)])?;
    let io_cert = apportion_i_oplus_o(1, 0.5)?;
    let mut out = vec![
        demo_entry("nilpotent J3(0)+J2(0) at 1/sqrt(3)", &nil, nil_cert)?,
        demo_entry("I1+O1 at 1/2", &io, io_cert)?,
    ];
    let lambda = C64::new((PI / 5.0).cos(), (PI / 5.0).sin()).scale(2.0);
    for (name, kind) in [
        ("J2(lambda)+[0]", TemplateKind::LambdaJ2PlusZero),
        ("[lambda]+J2(0)", TemplateKind::LambdaPlusN2),
    ] {
        for l in [ONE, lambda] {
            let label = format!("{name}, lambda = {}{:+}i", l.re, l.im);
            out.push(demo_entry(&label, &kind.spec(l), apportion_3x3_template(kind, l)?)?);
        }
    }
    Ok(Value::Array(out))
}

/// Runs one command and returns the JSON document for stdout.
pub fn execute(cmd: &Command) -> Result<Value, Failure> {
    match cmd {
        Command::Classify { input } => Ok(report_value(&classify(&load(input)?)?)),
        Command::Apportion { input, kappa } => {
            let doc = load(input)?;
            let cert = certificate_at(&doc, *kappa)?;
            reverified(&doc, &cert)
        }
        Command::Verify { a, m, rel, abs } => {
            let a = load(a)?.matrix();
            let m = load(m)?.matrix();
            if a.rows() != m.rows() {
                return Err(Error::ShapeMismatch(format!("A is {0}×{0}, M is {1}×{1}", a.rows(), m.rows())).into());
            }
            let tol = Tolerance::new(*rel, *abs)?;
            let lu = m.lu()?;
            let rcond = lu.rcond();
            if rcond < crate::uniform::RCOND_THRESHOLD {
                return Err(Error::Singular { rcond }.into());
            }
            let m_inv = lu.inverse()?;
            let b = &(&m * &a) * &m_inv;
            let mut v = uniformity_value(&is_uniform(&b, tol)?);
            v["B"] = matrix_value(&b);
            Ok(v)
        }
        Command::Bounds { input } => Ok(bounds_value(&Bounds::of(&load(input)?.matrix())?)),
        Command::Region { re, im, half_width, res, format, out } => {
            cmd_region(C64::new(*re, *im), *half_width, *res, *format, out)
        }
        Command::Search { input, args } => {
            let outcome = find_apportioning(&load(input)?.matrix(), &args.config())?;
            Ok(search_value(&outcome, args.transcript))
        }
        Command::Sigma { input, m_max, args } => {
            let report = sigma_estimate(&load(input)?, *m_max, &args.config())?;
            Ok(sigma_value(&report, args.transcript))
        }
        Command::Demo => cmd_demo(),
    }
}

/// Parses arguments, runs, prints, and returns the process exit code.
pub fn run() -> i32 {
    let cli = Cli::parse();
    // a second initialization only fails if a pool already exists
    let _ = rayon::ThreadPoolBuilder::new().num_threads(thread_count()).build_global();
    match execute(&cli.command) {
        Ok(v) => {
            print!("{}", to_json_string(&v));
            0
        }
        Err(f) => {
            eprintln!("apportion: {}", f.error);
            print!("{}", to_json_string(&error_value(&f)));
            f.code
        }
    }
}
