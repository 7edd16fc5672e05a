//! Command-line front end: `eval`, `verify`, `subdivide`, `check-cone`, `report`.
//!
//! Exit codes: 0 success/PASS, 1 usage or parse error, 2 domain or
//! precondition error, 3 verification FAIL.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::bernoulli::{bernoulli_cone_22, bernoulli_cone_33, bernoulli_multiple};
use crate::error::Error;
use crate::generalized::{
    g1c_direct, g1c_factorized, g2c_direct, g2c_factorized, gc_lattice, modular_identity_sides,
    s2c_decomposed, s2c_factorized, s3c_decomposed, s3c_factorized, G2Variant, SamplePoint,
    VerificationReport,
};
use crate::lattice::{
    face_matrices, gorenstein_vector, is_good, subdivide_wedge, Cone, ConeSpec, IntVector,
};
use crate::qseries::{elliptic_gamma, multiple_sine, qpoch_meta, expi, theta0, EvalConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DOMAIN: i32 = 2;
pub const EXIT_FAIL: i32 = 3;

/// Environment variable naming a JSON file with default [`EvalConfig`] values.
pub const CONFIG_ENV: &str = "CONEGAMMA_CONFIG";

pub const REPORT_SCHEMA: u32 = 1;

/// Shipped example cones, by name.
pub const BUILTIN_CONES: &[(&str, &str)] = &[
    ("standard-2", include_str!("../data/cones/standard-2.json")),
    ("standard-3", include_str!("../data/cones/standard-3.json")),
    ("wedge21", include_str!("../data/cones/wedge21.json")),
    ("wedge53", include_str!("../data/cones/wedge53.json")),
    ("cone-over-square", include_str!("../data/cones/cone-over-square.json")),
    ("not-gorenstein", include_str!("../data/cones/not-gorenstein.json")),
];

#[derive(Parser, Debug)]
#[command(name = "conegamma", version, about = "Cone-generalized multiple sine and elliptic gamma functions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone, Default)]
struct ConfigArgs {
    /// JSON file with evaluation settings (overrides $CONEGAMMA_CONFIG).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Comparison tolerance for identity residuals.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Truncation tolerance for the q-factorial tails.
    #[arg(long = "tail-tol", global = true)]
    tail_tol: Option<f64>,
    /// Box radius for lattice enumerations.
    #[arg(long, global = true)]
    radius: Option<i64>,
    /// Cap on product factors per q-factorial.
    #[arg(long = "max-terms", global = true)]
    max_terms: Option<u64>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate a function at one point.
    Eval {
        target: String,
        /// Cone file or built-in cone name.
        #[arg(long)]
        cone: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        z: String,
        /// Periods ω (repeat or comma-separate).
        #[arg(long = "omega", allow_hyphen_values = true, value_delimiter = ',')]
        omegas: Vec<String>,
        /// Modulus for theta0.
        #[arg(long, allow_hyphen_values = true)]
        tau: Option<String>,
        /// Index n for Bernoulli polynomials (defaults to r).
        #[arg(long)]
        n: Option<usize>,
        #[command(flatten)]
        cfg: ConfigArgs,
    },
    /// Verify theorem identities at sampled parameters.
    Verify {
        /// Theorem id, or `all`.
        theorem: String,
        /// Cone file or built-in name; all built-in cones when omitted.
        #[arg(long)]
        cone: Option<String>,
        #[arg(long, default_value_t = 5)]
        samples: usize,
        #[arg(long, default_value_t = 20240601)]
        seed: u64,
        /// Write the JSON report here.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Record wall-clock time in the report (breaks byte-identical reruns).
        #[arg(long = "record-timing")]
        record_timing: bool,
        #[command(flatten)]
        cfg: ConfigArgs,
    },
    /// Unimodular subdivision of the wedge between two normals.
    Subdivide {
        #[arg(allow_hyphen_values = true)]
        v1: String,
        #[arg(allow_hyphen_values = true)]
        v2: String,
    },
    /// Validate a cone and print its face matrices.
    CheckCone {
        cone: String,
        /// Enumeration radius for the minimality / convexity checks.
        #[arg(long, default_value_t = 50)]
        radius: i64,
    },
    /// Summarize a verification report.
    Report {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = ReportFormat::Summary)]
        format: ReportFormat,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ReportFormat {
    Summary,
    Csv,
}

/// CLI-level failure carrying its exit code.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn usage(m: impl Into<String>) -> Self {
        CliError { code: EXIT_USAGE, message: m.into() }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError { code: EXIT_DOMAIN, message: e.to_string() }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// Parses `re+imi` style complex numbers: `0.3`, `2i`, `-i`, `0.3-0.2i`, `1e-3+2E-2i`.
pub fn parse_complex(s: &str) -> std::result::Result<Complex64, String> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || format!("cannot parse complex number {s:?}");
    if t.is_empty() {
        return Err(bad());
    }
    let Some(body) = t.strip_suffix('i') else {
        return t.parse::<f64>().map(|r| Complex64::new(r, 0.0)).map_err(|_| bad());
    };
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(k) => (&body[..k], &body[k..]),
        None => ("", body),
    };
    let re = if re.is_empty() { 0.0 } else { re.parse::<f64>().map_err(|_| bad())? };
    let im = match im {
        "" | "+" => 1.0,
        "-" => -1.0,
        x => x.parse::<f64>().map_err(|_| bad())?,
    };
    Ok(Complex64::new(re, im))
}

pub fn format_complex(v: Complex64) -> String {
    if v.im.is_sign_negative() {
        format!("{:e}-{:e}i", v.re, -v.im)
    } else {
        format!("{:e}+{:e}i", v.re, v.im)
    }
}

fn parse_int_vector(s: &str) -> CliResult<IntVector> {
    let t = s.trim().trim_start_matches(['(', '[']).trim_end_matches([')', ']']);
    t.split(',')
        .map(|p| p.trim().parse::<i64>())
        .collect::<std::result::Result<Vec<_>, _>>()
        .map(IntVector::new)
        .map_err(|_| CliError::usage(format!("cannot parse integer vector {s:?}")))
}

fn build_config(args: &ConfigArgs) -> CliResult<EvalConfig> {
    let path = args.config.clone().or_else(|| std::env::var_os(CONFIG_ENV).map(PathBuf::from));
    let mut cfg = match path {
        Some(p) => {
            let text = std::fs::read_to_string(&p)
                .map_err(|e| CliError::usage(format!("cannot read config {}: {e}", p.display())))?;
            serde_json::from_str(&text)
                .map_err(|e| CliError::usage(format!("malformed config {}: {e}", p.display())))?
        }
        None => EvalConfig::default(),
    };
    if let Some(v) = args.tol {
        cfg.comparison_tol = v;
    }
    if let Some(v) = args.tail_tol {
        cfg.tail_tol = v;
    }
    if let Some(v) = args.radius {
        cfg.oracle_radius = v;
    }
    if let Some(v) = args.max_terms {
        cfg.max_terms = v;
    }
    cfg.validate().map_err(|e| CliError::usage(e.to_string()))?;
    Ok(cfg)
}

/// Loads a cone from a file, or a built-in cone by name. Returns the cone,
/// a display name and the source text.
fn load_cone(arg: &str) -> CliResult<(Cone, String, String)> {
    let (name, text) = if let Some((n, t)) = BUILTIN_CONES.iter().find(|(n, _)| *n == arg) {
        (n.to_string(), t.to_string())
    } else {
        let p = Path::new(arg);
        let text = std::fs::read_to_string(p)
            .map_err(|e| CliError::usage(format!("cannot read cone file {arg}: {e}")))?;
        let name = p.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| arg.into());
        (name, text)
    };
    let spec: ConeSpec = serde_json::from_str(&text)
        .map_err(|e| CliError::usage(format!("malformed cone JSON in {arg}: {e}")))?;
    let cone = Cone::from_spec(&spec)?;
    Ok((cone, name, text))
}

/// Runs the CLI on `args` (including the program name).
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = if code == EXIT_OK { write!(out, "{e}") } else { write!(err, "{e}") };
            return code;
        }
    };
    let result = match cli.command {
        Command::Eval { target, cone, z, omegas, tau, n, cfg } => {
            cmd_eval(&target, cone.as_deref(), &z, &omegas, tau.as_deref(), n, &cfg, out)
        }
        Command::Verify { theorem, cone, samples, seed, out: path, record_timing, cfg } => {
            cmd_verify(&theorem, cone.as_deref(), samples, seed, path.as_deref(), record_timing, &cfg, out)
        }
        Command::Subdivide { v1, v2 } => cmd_subdivide(&v1, &v2, out),
        Command::CheckCone { cone, radius } => cmd_check_cone(&cone, radius, out),
        Command::Report { file, format } => cmd_report(&file, format, out),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {}", e.message);
            e.code
        }
    }
}

#[derive(Serialize)]
struct EvalRecord<'a> {
    schema: u32,
    target: &'a str,
    cone: Option<ConeSpec>,
    z: Complex64,
    omegas: Vec<Complex64>,
    value: Complex64,
    tail_tol: f64,
    max_terms: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    truncation: Option<crate::qseries::Truncation>,
}

#[allow(clippy::too_many_arguments)]
fn cmd_eval(
    target: &str,
    cone: Option<&str>,
    z: &str,
    omegas: &[String],
    tau: Option<&str>,
    n: Option<usize>,
    cfg_args: &ConfigArgs,
    out: &mut dyn Write,
) -> CliResult<i32> {
    let cfg = build_config(cfg_args)?;
    let z = parse_complex(z).map_err(CliError::usage)?;
    let mut w: Vec<Complex64> = omegas
        .iter()
        .map(|s| parse_complex(s))
        .collect::<std::result::Result<_, _>>()
        .map_err(CliError::usage)?;
    if let Some(t) = tau {
        w.push(parse_complex(t).map_err(CliError::usage)?);
    }
    let key = target.to_ascii_lowercase();
    let needs_cone = matches!(
        key.as_str(),
        "s2c" | "s2c-factorized" | "s3c" | "s3c-factorized" | "g1c" | "g1c-factorized" | "g1c-lattice"
            | "g2c" | "g2c-factorized" | "g2c-alternative" | "g2c-lattice" | "b22c" | "b33c"
    );
    let cone = match (needs_cone, cone) {
        (true, Some(c)) => Some(load_cone(c)?.0),
        (true, None) => return Err(CliError::usage(format!("target {target} needs --cone"))),
        (false, _) => None,
    };
    let want_r = |r: usize| -> CliResult<()> {
        if w.len() != r {
            return Err(CliError::usage(format!("{target} takes {r} period(s), got {}", w.len())));
        }
        Ok(())
    };
    let mut truncation = None;
    let value = match key.as_str() {
        "s1" | "s2" | "s3" | "s4" => {
            want_r(key[1..].parse().unwrap())?;
            multiple_sine(z, &w, &cfg)?
        }
        "s" => multiple_sine(z, &w, &cfg)?,
        "theta0" => {
            want_r(1)?;
            theta0(z, w[0], &cfg)?
        }
        "g0" | "g1" | "g2" => {
            want_r(key[1..].parse::<usize>().unwrap() + 1)?;
            elliptic_gamma(z, &w, &cfg)?
        }
        "qfactorial" => {
            let qs: Vec<Complex64> = w.iter().map(|&x| expi(x)).collect();
            let (v, t) = qpoch_meta(expi(z), &qs, &cfg)?;
            truncation = Some(t);
            v
        }
        "b" | "bernoulli" => bernoulli_multiple(n.unwrap_or(w.len()), z, &w)?,
        _ if !needs_cone => return Err(CliError::usage(format!("unknown target {target}"))),
        _ => {
            let c = cone.as_ref().expect("cone loaded for cone targets");
            match key.as_str() {
                "s2c" => s2c_decomposed(c, z, &w, &cfg)?,
                "s2c-factorized" => s2c_factorized(c, z, &w, &cfg)?,
                "s3c" => s3c_decomposed(c, z, &w, &cfg)?,
                "s3c-factorized" => s3c_factorized(c, z, &w, &cfg)?,
                "g1c" => g1c_direct(c, z, &w, &cfg)?,
                "g1c-factorized" => g1c_factorized(c, z, &w, &cfg)?,
                "g2c" => g2c_direct(c, z, &w, &cfg)?,
                "g2c-factorized" => g2c_factorized(c, z, &w, G2Variant::Primary, &cfg)?,
                "g2c-alternative" => g2c_factorized(c, z, &w, G2Variant::Alternative, &cfg)?,
                "g1c-lattice" | "g2c-lattice" => gc_lattice(c, z, &w, cfg.oracle_radius)?.value,
                "b22c" => bernoulli_cone_22(c, z, &w)?,
                "b33c" => bernoulli_cone_33(c, z, &w)?,
                _ => return Err(CliError::usage(format!("unknown target {target}"))),
            }
        }
    };
    let record = EvalRecord {
        schema: REPORT_SCHEMA,
        target,
        cone: cone.map(|c| c.spec()),
        z,
        omegas: w,
        value,
        tail_tol: cfg.tail_tol,
        max_terms: cfg.max_terms,
        truncation,
    };
    let json = serde_json::to_string(&record).expect("serializable record");
    writeln!(out, "{}", format_complex(value)).ok();
    writeln!(out, "{json}").ok();
    Ok(EXIT_OK)
}

/// Identities checked by `verify`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Theorem {
    S2cFactorization,
    S3cFactorization,
    G1cFactorization,
    G1cLattice,
    G2cFactorization,
    G2cAlternative,
    G2cLattice,
    ModularIdentity,
}

impl Theorem {
    pub const ALL: [Theorem; 8] = [
        Theorem::S2cFactorization,
        Theorem::S3cFactorization,
        Theorem::G1cFactorization,
        Theorem::G1cLattice,
        Theorem::G2cFactorization,
        Theorem::G2cAlternative,
        Theorem::G2cLattice,
        Theorem::ModularIdentity,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Theorem::S2cFactorization => "s2c-factorization",
            Theorem::S3cFactorization => "s3c-factorization",
            Theorem::G1cFactorization => "g1c-factorization",
            Theorem::G1cLattice => "g1c-lattice",
            Theorem::G2cFactorization => "g2c-factorization",
            Theorem::G2cAlternative => "g2c-alternative",
            Theorem::G2cLattice => "g2c-lattice",
            Theorem::ModularIdentity => "modular-identity",
        }
    }

    pub fn from_id(s: &str) -> Option<Theorem> {
        Theorem::ALL.into_iter().find(|t| t.id() == s)
    }

    fn dim(self) -> usize {
        match self {
            Theorem::S2cFactorization | Theorem::G1cFactorization | Theorem::G1cLattice => 2,
            _ => 3,
        }
    }

    fn damping(self) -> f64 {
        match self {
            Theorem::G1cLattice | Theorem::G2cLattice => 1.5,
            _ => 1.0,
        }
    }

    /// Hypotheses of the identity; `Err(reason)` means SKIP.
    pub fn applicable(self, c: &Cone) -> std::result::Result<(), String> {
        if c.dim() != self.dim() {
            return Err(format!("needs a {}-d cone", self.dim()));
        }
        if !is_good(c) {
            return Err("cone is not good".into());
        }
        if c.dim() == 3 && gorenstein_vector(c).is_none() {
            return Err("no Gorenstein vector".into());
        }
        Ok(())
    }

    /// Both sides of the identity at one point.
    pub fn sides(self, c: &Cone, z: Complex64, w: &[Complex64], cfg: &EvalConfig) -> crate::error::Result<(Complex64, Complex64)> {
        Ok(match self {
            Theorem::S2cFactorization => (s2c_decomposed(c, z, w, cfg)?, s2c_factorized(c, z, w, cfg)?),
            Theorem::S3cFactorization => (s3c_decomposed(c, z, w, cfg)?, s3c_factorized(c, z, w, cfg)?),
            Theorem::G1cFactorization => (g1c_direct(c, z, w, cfg)?, g1c_factorized(c, z, w, cfg)?),
            Theorem::G1cLattice => (g1c_direct(c, z, w, cfg)?, gc_lattice(c, z, w, cfg.oracle_radius)?.value),
            Theorem::G2cFactorization => {
                (g2c_direct(c, z, w, cfg)?, g2c_factorized(c, z, w, G2Variant::Primary, cfg)?)
            }
            Theorem::G2cAlternative => (
                g2c_factorized(c, z, w, G2Variant::Primary, cfg)?,
                g2c_factorized(c, z, w, G2Variant::Alternative, cfg)?,
            ),
            Theorem::G2cLattice => (g2c_direct(c, z, w, cfg)?, gc_lattice(c, z, w, cfg.oracle_radius.min(40))?.value),
            Theorem::ModularIdentity => modular_identity_sides(c, z, w, cfg)?,
        })
    }
}

/// Generic parameters with `Im ω` a positive combination of the normals
/// (so inside the open dual cone) and small `z`.
pub fn sample_parameters(c: &Cone, rng: &mut ChaCha8Rng, damping: f64) -> (Complex64, Vec<Complex64>) {
    let d = c.dim();
    let mut im = vec![0.0; d];
    for v in c.normals() {
        let t: f64 = rng.gen_range(0.4..1.0);
        for k in 0..d {
            im[k] += t * v[k] as f64;
        }
    }
    // scale up until every edge ray pairs with Im ω at least `damping` (per unit length)
    let floor = c
        .edge_rays()
        .iter()
        .map(|x| {
            let p: f64 = im.iter().zip(x.entries()).map(|(a, &b)| a * b as f64).sum();
            p / (x.norm_sq() as f64).sqrt()
        })
        .fold(f64::INFINITY, f64::min);
    let scale = (damping / floor.max(1e-12)).max(1.0);
    let w = im
        .iter()
        .map(|&y| Complex64::new(rng.gen_range(-0.5..0.5), y * scale))
        .collect();
    let z = Complex64::new(rng.gen_range(-0.4..0.4), rng.gen_range(-0.1..0.1));
    (z, w)
}

/// Draws `samples` points for `theorem` and evaluates both sides. Points
/// where the evaluation is refused for numerical reasons (budget,
/// conditioning, non-generic ratios) are redrawn.
pub fn verify_theorem(
    theorem: Theorem,
    c: &Cone,
    samples: usize,
    seed: u64,
    cfg: &EvalConfig,
) -> crate::error::Result<VerificationReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points = Vec::with_capacity(samples);
    let mut refused = 0;
    while points.len() < samples {
        let (z, w) = sample_parameters(c, &mut rng, theorem.damping());
        match theorem.sides(c, z, &w, cfg) {
            Ok((l, r)) => points.push(SamplePoint::new(z, &w, l, r)),
            Err(e @ (Error::Budget { .. } | Error::IllConditioned { .. } | Error::Precondition(_) | Error::SingularAction)) => {
                refused += 1;
                if refused > 20 * samples.max(1) {
                    return Err(e);
                }
            }
            Err(e) => return Err(e),
        }
    }
    Ok(VerificationReport::from_points(theorem.id(), c.spec(), points, cfg))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Status {
    Pass,
    Fail,
    Skip,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyItem {
    pub theorem: String,
    pub cone: String,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub report: Option<VerificationReport>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool_version: String,
    pub config: EvalConfig,
    pub seed: u64,
    pub samples: usize,
    /// SHA-256 of each cone's source text, by cone name.
    pub input_digests: BTreeMap<String, String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_clock_ms: Option<u64>,
    pub status: BTreeMap<String, Status>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub schema: u32,
    pub manifest: RunManifest,
    pub items: Vec<VerifyItem>,
}

fn sha256_hex(text: &str) -> String {
    Sha256::digest(text.as_bytes()).iter().fold(String::new(), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

#[allow(clippy::too_many_arguments)]
fn cmd_verify(
    theorem: &str,
    cone: Option<&str>,
    samples: usize,
    seed: u64,
    out_path: Option<&Path>,
    record_timing: bool,
    cfg_args: &ConfigArgs,
    out: &mut dyn Write,
) -> CliResult<i32> {
    let cfg = build_config(cfg_args)?;
    let theorems: Vec<Theorem> = if theorem == "all" {
        Theorem::ALL.to_vec()
    } else {
        vec![Theorem::from_id(theorem).ok_or_else(|| {
            let ids: Vec<&str> = Theorem::ALL.iter().map(|t| t.id()).collect();
            CliError::usage(format!("unknown theorem {theorem}; expected one of {} or all", ids.join(", ")))
        })?]
    };
    if samples == 0 {
        return Err(CliError::usage("--samples must be positive"));
    }
    let cones: Vec<(Cone, String, String)> = match cone {
        Some(c) => vec![load_cone(c)?],
        None => BUILTIN_CONES.iter().map(|(n, _)| load_cone(n)).collect::<CliResult<_>>()?,
    };
    let start = Instant::now();
    let mut items = Vec::new();
    let mut digests = BTreeMap::new();
    let mut status = BTreeMap::new();
    for (c, name, text) in &cones {
        digests.insert(name.clone(), sha256_hex(text));
        for &t in &theorems {
            let item = match t.applicable(c) {
                Err(reason) => VerifyItem {
                    theorem: t.id().into(),
                    cone: name.clone(),
                    status: Status::Skip,
                    reason: Some(reason),
                    report: None,
                },
                Ok(()) => match verify_theorem(t, c, samples, seed, &cfg) {
                    Ok(rep) => VerifyItem {
                        theorem: t.id().into(),
                        cone: name.clone(),
                        status: if rep.passed() { Status::Pass } else { Status::Fail },
                        reason: None,
                        report: Some(rep),
                    },
                    Err(e) => VerifyItem {
                        theorem: t.id().into(),
                        cone: name.clone(),
                        status: Status::Fail,
                        reason: Some(e.to_string()),
                        report: None,
                    },
                },
            };
            status.insert(format!("{}@{}", item.theorem, item.cone), item.status);
            items.push(item);
        }
    }
    let report = RunReport {
        schema: REPORT_SCHEMA,
        manifest: RunManifest {
            tool_version: env!("CARGO_PKG_VERSION").into(),
            config: cfg.clone(),
            seed,
            samples,
            input_digests: digests,
            wall_clock_ms: record_timing.then(|| start.elapsed().as_millis() as u64),
            status,
        },
        items,
    };
    write_summary(&report, out);
    if let Some(p) = out_path {
        let json = serde_json::to_string_pretty(&report).expect("serializable report");
        std::fs::write(p, json + "\n")
            .map_err(|e| CliError { code: EXIT_DOMAIN, message: format!("cannot write {}: {e}", p.display()) })?;
    }
    let failed = report.items.iter().any(|i| i.status == Status::Fail);
    Ok(if failed { EXIT_FAIL } else { EXIT_OK })
}

fn write_summary(report: &RunReport, out: &mut dyn Write) {
    writeln!(out, "{:<20} {:<18} {:<6} {:>12} {:>12}  note", "theorem", "cone", "status", "max", "median").ok();
    for i in &report.items {
        let (max, med) = match &i.report {
            Some(r) => (format!("{:.3e}", r.max_residual), format!("{:.3e}", r.median_residual)),
            None => ("-".into(), "-".into()),
        };
        let status = match i.status {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Skip => "SKIP",
        };
        writeln!(
            out,
            "{:<20} {:<18} {:<6} {:>12} {:>12}  {}",
            i.theorem,
            i.cone,
            status,
            max,
            med,
            i.reason.as_deref().unwrap_or("")
        )
        .ok();
    }
}

fn cmd_subdivide(v1: &str, v2: &str, out: &mut dyn Write) -> CliResult<i32> {
    let (a, b) = (parse_int_vector(v1)?, parse_int_vector(v2)?);
    let s = subdivide_wedge(&a, &b)?;
    let lines: Vec<String> = s.lines.iter().map(|u| u.to_string()).collect();
    writeln!(out, "lines: {}", lines.join(" ")).ok();
    let interior: Vec<String> = s.interior_lines().iter().map(|u| u.to_string()).collect();
    writeln!(out, "interior: {}", if interior.is_empty() { "none".into() } else { interior.join(" ") }).ok();
    let dets: Vec<String> = s
        .lines
        .windows(2)
        .map(|w| crate::lattice::det2(&w[0], &w[1]).to_string())
        .collect();
    writeln!(out, "dets: {}", dets.join(" ")).ok();
    Ok(EXIT_OK)
}

fn cmd_check_cone(arg: &str, radius: i64, out: &mut dyn Write) -> CliResult<i32> {
    let (c, name, _) = load_cone(arg)?;
    writeln!(out, "cone: {name} (dim {})", c.dim()).ok();
    writeln!(out, "normals: {}", c.normals().iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" ")).ok();
    writeln!(out, "primitive: yes").ok();
    writeln!(out, "edges: {}", c.edge_rays().iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" ")).ok();
    let redundant = c.redundant_normals(radius);
    writeln!(
        out,
        "minimal (radius {radius}): {}",
        if redundant.is_empty() { "yes".to_string() } else { format!("no, redundant {redundant:?}") }
    )
    .ok();
    writeln!(out, "strictly convex (radius {radius}): {}", if c.has_line_within(radius) { "no" } else { "yes" }).ok();
    let good = is_good(&c);
    writeln!(out, "good: {}", if good { "yes" } else { "no" }).ok();
    match gorenstein_vector(&c) {
        Some(xi) => writeln!(out, "gorenstein: yes, xi = {xi}").ok(),
        None => writeln!(out, "gorenstein: no").ok(),
    };
    if good {
        let fm = face_matrices(&c)?;
        writeln!(out, "face matrices: {}", fm.len()).ok();
        for f in fm {
            writeln!(out, "  edge {} n = {} det = {} K = {}", f.ray, f.complement, f.sign, f.k).ok();
        }
    }
    Ok(EXIT_OK)
}

fn cmd_report(path: &Path, format: ReportFormat, out: &mut dyn Write) -> CliResult<i32> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::usage(format!("cannot read {}: {e}", path.display())))?;
    let report: RunReport = serde_json::from_str(&text)
        .map_err(|e| CliError::usage(format!("malformed report {}: {e}", path.display())))?;
    if report.schema != REPORT_SCHEMA {
        return Err(CliError::usage(format!("unsupported report schema {}", report.schema)));
    }
    match format {
        ReportFormat::Summary => write_summary(&report, out),
        ReportFormat::Csv => {
            writeln!(out, "theorem,cone,status,samples,max_residual,median_residual").ok();
            for i in &report.items {
                let (n, max, med) = match &i.report {
                    Some(r) => (r.points.len().to_string(), format!("{:e}", r.max_residual), format!("{:e}", r.median_residual)),
                    None => ("0".into(), String::new(), String::new()),
                };
                let status = serde_json::to_value(i.status).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default();
                writeln!(out, "{},{},{},{},{},{}", i.theorem, i.cone, status, n, max, med).ok();
            }
        }
    }
    let failed = report.items.iter().any(|i| i.status == Status::Fail);
    Ok(if failed { EXIT_FAIL } else { EXIT_OK })
}
