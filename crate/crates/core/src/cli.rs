//! Command-line front end.
//!
//! Exit status: 0 when every reported result passes, 1 when a result fails
//! its tolerance, 2 on usage, parse or precondition errors.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Serialize;
use serde_json::{json, Value};

use crate::curvature::{
    flatness_detectors, is_hermite_einstein, project_to_he, random_curvature, require_hermite_einstein,
    segre_forms, chern_forms, CurvatureTensor, Kaehler11, DEFAULT_HE_TOL,
};
use crate::error::{Error, Result};
use crate::inequalities::{kl_classical, remark41_bound, surface_compare, thm12, EQUALITY_TOL, MARGIN_TOL};
use crate::io::{load_tensor, parse_omega, tensor_to_json};
use crate::kahler::primitive_split;
use crate::moments::{moment_diagonal, moment_mc, moment_wick, rational_to_f64, sphere_mc, MomentSpec};
use crate::projective::{
    lhe_check, pushforward_segre, verify_identity_8, verify_identity_8_general, verify_identity_9, Method,
};
use crate::report::{CheckResult, Criterion, Report};
use crate::sampling::{complex_normal, rng_for};

/// Environment variable overriding the default `--tol` of every command.
pub const TOL_ENV: &str = "CHERNWEIL_TOL";

#[derive(Parser, Debug)]
#[command(
    name = "chernweil",
    version,
    about = "Pointwise Chern-Weil forms, Segre pushforwards and Kobayashi-Lubke type checks"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Generate a curvature tensor as JSON.
    Gen(GenArgs),
    /// Verify an identity numerically.
    Verify(VerifyArgs),
    /// Check a Hermite-Einstein condition or inequality.
    Check(CheckArgs),
    /// Exact and sampled value of a single sphere moment.
    Moments(MomentsArgs),
}

fn parse_count(s: &str) -> std::result::Result<usize, String> {
    if let Ok(v) = s.parse::<usize>() {
        return Ok(v);
    }
    match s.parse::<f64>() {
        Ok(v) if v >= 0.0 && v.fract() == 0.0 && v <= 1e12 => Ok(v as usize),
        _ => Err(format!("{s:?} is not a nonnegative integer")),
    }
}

fn parse_index_list(s: &str) -> std::result::Result<Vec<usize>, String> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',')
        .map(|p| p.trim().parse::<usize>().map_err(|e| format!("{p:?}: {e}")))
        .collect()
}

#[derive(Args, Debug, Serialize)]
pub struct GenArgs {
    /// Base dimension.
    pub n: usize,
    /// Rank.
    pub r: usize,
    pub seed: u64,
    /// Project to Hermite-Einstein with this Einstein factor (also the factor
    /// used by --flat and --strong-flat, default 1).
    #[arg(long, value_name = "LAMBDA", allow_negative_numbers = true)]
    pub he: Option<f64>,
    /// Projectively flat Hermite-Einstein instance `(1/r) c_1 ⊗ Id`.
    #[arg(long, conflicts_with = "strong_flat")]
    pub flat: bool,
    /// The equality instance `(λ/n) ω ⊗ Id`.
    #[arg(long)]
    pub strong_flat: bool,
    #[arg(long, default_value = "euclidean")]
    pub omega: String,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug, Serialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum VerifyKind {
    Pushforward,
    Identity8,
    Identity9,
    Moments,
}

#[derive(Args, Debug, Serialize)]
pub struct VerifyArgs {
    pub kind: VerifyKind,
    /// Tensor JSON (not used by `moments`).
    #[arg(long = "in", value_name = "PATH")]
    #[serde(rename = "in")]
    pub input: Option<PathBuf>,
    #[arg(long, default_value = "euclidean")]
    pub omega: String,
    /// Single degree; all admissible degrees when omitted.
    #[arg(long)]
    pub k: Option<usize>,
    /// Monte Carlo samples (pushforward: 0 skips the sampled cross-check).
    #[arg(long, value_parser = parse_count)]
    pub samples: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Residual tolerance.
    #[arg(long, env = TOL_ENV)]
    pub tol: Option<f64>,
    /// Hermite-Einstein tolerance for `identity8`.
    #[arg(long, default_value_t = DEFAULT_HE_TOL)]
    pub he_tol: f64,
    /// Fiber directions sampled by `identity8`/`identity9`.
    #[arg(long, default_value_t = 20)]
    pub directions: usize,
    /// `identity8` with the directional γ_1 in place of the Einstein factor.
    #[arg(long)]
    pub general: bool,
    /// Rank for `moments`.
    #[arg(long)]
    pub r: Option<usize>,
    /// Largest moment degree for `moments`.
    #[arg(long, default_value_t = 3)]
    pub kmax: usize,
    /// Allowed Monte Carlo deviation in standard errors.
    #[arg(long, default_value_t = 4.0)]
    pub sigmas: f64,
    /// Symmetrize the loaded tensor instead of rejecting asymmetry.
    #[arg(long)]
    pub symmetrize: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug, Serialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum CheckKind {
    He,
    Kl,
    Thm12,
    Surface,
    Remark41,
    Lhe,
}

#[derive(Args, Debug, Serialize)]
pub struct CheckArgs {
    pub kind: CheckKind,
    #[arg(long = "in", value_name = "PATH")]
    #[serde(rename = "in")]
    pub input: PathBuf,
    #[arg(long, default_value = "euclidean")]
    pub omega: String,
    /// Margin tolerance (for `he`, the Hermite-Einstein tolerance).
    #[arg(long, env = TOL_ENV)]
    pub tol: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_HE_TOL)]
    pub he_tol: f64,
    /// `lhe`: check γ_1..γ_ell.
    #[arg(long, default_value_t = 1)]
    pub ell: usize,
    /// `lhe`: sampled directions.
    #[arg(long, value_parser = parse_count, default_value = "200")]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub symmetrize: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
pub struct MomentsArgs {
    #[arg(long)]
    pub r: usize,
    // `std::vec::Vec` keeps clap from treating the list as repeated values.
    /// Comma-separated 1-based indices of the holomorphic factors.
    #[arg(long, value_parser = parse_index_list, default_value = "")]
    pub lambdas: std::vec::Vec<usize>,
    /// Comma-separated 1-based indices of the conjugate factors.
    #[arg(long, value_parser = parse_index_list, default_value = "")]
    pub mus: std::vec::Vec<usize>,
    #[arg(long, value_parser = parse_count, default_value = "1000000")]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 4.0)]
    pub sigmas: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

const DIRECTION_STREAM: u64 = 0x6469_7273;
const FLAT_STREAM_OFFSET: u64 = 0x666c_6174;

fn sample_directions(r: usize, count: usize, seed: u64) -> Vec<Vec<Complex64>> {
    let mut rng = rng_for(seed, DIRECTION_STREAM);
    (0..count)
        .map(|_| (0..r).map(|_| complex_normal(&mut rng)).collect())
        .collect()
}

/// Instance factory behind `gen`.
pub fn generate(args: &GenArgs) -> Result<CurvatureTensor> {
    if args.n == 0 || args.r == 0 {
        return Err(Error::Invalid("n and r must be positive".into()));
    }
    let w = parse_omega(&args.omega, args.n)?;
    let lambda = args.he.unwrap_or(1.0);
    let n = args.n as f64;
    let r = args.r as f64;
    if args.strong_flat {
        return Ok(CurvatureTensor::scalar(&w.scale(lambda / n), args.r));
    }
    if args.flat {
        let beta = Kaehler11::random(args.n, args.seed.wrapping_add(FLAT_STREAM_OFFSET));
        let eta = primitive_split(&beta, &w)?.eta;
        let c1 = eta.add(&w.scale(lambda * r / n))?;
        return Ok(CurvatureTensor::scalar(&c1.scale(1.0 / r), args.r));
    }
    let t = random_curvature(args.n, args.r, args.seed);
    match args.he {
        Some(l) => project_to_he(&t, &w, l),
        None => Ok(t),
    }
}

fn load(input: &Path, omega: &str, symmetrize: bool) -> Result<(CurvatureTensor, Kaehler11)> {
    let t = load_tensor(input, symmetrize)?;
    let w = parse_omega(omega, t.n())?;
    Ok((t, w))
}

fn degrees(k: Option<usize>, lo: usize, hi: usize) -> Result<Vec<usize>> {
    match k {
        Some(k) if k < lo || k > hi => Err(Error::OutOfRange {
            what: "k",
            value: k,
            min: lo,
            max: hi,
        }),
        Some(k) => Ok(vec![k]),
        None => Ok((lo..=hi).collect()),
    }
}

fn verify_pushforward(args: &VerifyArgs, report: &mut Report) -> Result<()> {
    let input = args.input.as_deref().ok_or_else(|| Error::Invalid("--in is required".into()))?;
    let t = load_tensor(input, args.symmetrize)?;
    let tol = args.tol.unwrap_or(1e-9);
    let segre = segre_forms(&chern_forms(&t), t.n())?;
    let samples = args.samples.unwrap_or(0);
    for k in degrees(args.k, 0, t.n())? {
        let exact = pushforward_segre(&t, k, Method::Exact)?;
        let residual = exact.form.max_abs_diff(&segre[k])?;
        report.push(CheckResult::new(format!("k={k} exact residual"), residual, tol, Criterion::AbsLe));
        if samples > 0 {
            let mc = pushforward_segre(
                &t,
                k,
                Method::MonteCarlo {
                    samples,
                    seed: args.seed,
                },
            )?;
            let se = mc.stderr.expect("sampled path reports errors");
            let mut worst: f64 = 0.0;
            for (&(i, j), c) in mc.form.terms() {
                let d = c - segre[k].coeff(i, j);
                let s = se.coeff(i, j);
                for (dv, sv) in [(d.re, s.re), (d.im, s.im)] {
                    let z = if dv.abs() <= 1e-12 { 0.0 } else { dv.abs() / sv };
                    worst = worst.max(z);
                }
            }
            report.push(CheckResult::new(
                format!("k={k} monte carlo max z-score"),
                worst,
                args.sigmas,
                Criterion::Le,
            ));
        }
    }
    Ok(())
}

fn verify_identities(args: &VerifyArgs, report: &mut Report) -> Result<()> {
    let input = args.input.as_deref().ok_or_else(|| Error::Invalid("--in is required".into()))?;
    let (t, w) = load(input, &args.omega, args.symmetrize)?;
    let tol = args.tol.unwrap_or(1e-10);
    let dirs = sample_directions(t.r(), args.directions.max(1), args.seed);
    let mut data = serde_json::Map::new();
    match args.kind {
        VerifyKind::Identity8 => {
            if !args.general {
                let lambda = require_hermite_einstein(&t, &w, args.he_tol)?;
                data.insert("lambda".into(), json!(lambda));
            }
            let mut residuals = Vec::new();
            for v in &dirs {
                residuals.push(if args.general {
                    verify_identity_8_general(&t, &w, v)?
                } else {
                    verify_identity_8(&t, &w, v, args.he_tol)?
                });
            }
            let worst = residuals.iter().copied().fold(0.0, f64::max);
            report.push(CheckResult::new("max residual", worst, tol, Criterion::AbsLe));
            data.insert("residuals".into(), json!(residuals));
        }
        _ => {
            for k in degrees(args.k, 1, t.n())? {
                let mut worst: f64 = 0.0;
                for v in &dirs {
                    worst = worst.max(verify_identity_9(&t, &w, v, k)?);
                }
                report.push(CheckResult::new(format!("k={k} max residual"), worst, tol, Criterion::AbsLe));
            }
        }
    }
    data.insert("directions".into(), json!(dirs.len()));
    report.data = Value::Object(data);
    Ok(())
}

fn nondecreasing(r: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(r: usize, k: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..=r {
            cur.push(i);
            go(r, k, i, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(r, k, 1, &mut Vec::new(), &mut out);
    out
}

fn fmt_indices(v: &[usize]) -> String {
    v.iter().map(usize::to_string).collect::<Vec<_>>().join(",")
}

fn verify_moments(args: &VerifyArgs, report: &mut Report) -> Result<()> {
    let r = args.r.ok_or_else(|| Error::Invalid("--r is required for moments".into()))?;
    if r == 0 || r > 8 || args.kmax > 6 {
        return Err(Error::Invalid("moments needs 1 <= r <= 8 and kmax <= 6".into()));
    }
    let samples = args.samples.unwrap_or(1_000_000).max(1);
    let mut specs = Vec::new();
    for k in 1..=args.kmax {
        let tuples = nondecreasing(r, k);
        for l in &tuples {
            for m in &tuples {
                specs.push(MomentSpec::new(r, l.clone(), m.clone())?);
            }
        }
    }
    // one sampling pass shared by all specs
    let mc = sphere_mc(r, samples, args.seed, 2 * specs.len(), |v, out| {
        for (s, spec) in specs.iter().enumerate() {
            let mut p = Complex64::new(1.0, 0.0);
            for (&l, &m) in spec.lambdas().iter().zip(spec.mus()) {
                p *= v[l - 1] * v[m - 1].conj();
            }
            out[2 * s] = p.re;
            out[2 * s + 1] = p.im;
        }
    });
    for (s, spec) in specs.iter().enumerate() {
        let label = format!("lambda=({}) mu=({})", fmt_indices(spec.lambdas()), fmt_indices(spec.mus()));
        let exact = moment_wick(spec);
        if spec.lambdas() == spec.mus() {
            let mut mult = vec![0usize; r];
            for &l in spec.lambdas() {
                mult[l - 1] += 1;
            }
            let closed = moment_diagonal(r, &mult)?;
            let gap = rational_to_f64(&(exact.clone() - closed)).abs();
            report.push(CheckResult::new(format!("{label} closed form gap"), gap, 0.0, Criterion::AbsLe));
        }
        let est = Complex64::new(mc.mean[2 * s], mc.mean[2 * s + 1]);
        let se = mc.stderr[2 * s].hypot(mc.stderr[2 * s + 1]);
        let d = (est - rational_to_f64(&exact)).norm();
        let z = if d == 0.0 { 0.0 } else { d / se };
        report.push(CheckResult::new(format!("{label} monte carlo z-score"), z, args.sigmas, Criterion::Le));
    }
    report.data = json!({ "specs": specs.len(), "samples": samples });
    Ok(())
}

fn run_verify(args: &VerifyArgs, report: &mut Report) -> Result<()> {
    match args.kind {
        VerifyKind::Pushforward => verify_pushforward(args, report),
        VerifyKind::Identity8 | VerifyKind::Identity9 => verify_identities(args, report),
        VerifyKind::Moments => verify_moments(args, report),
    }
}

fn run_check(args: &CheckArgs, report: &mut Report) -> Result<()> {
    let (t, w) = load(&args.input, &args.omega, args.symmetrize)?;
    let tol = args.tol.unwrap_or(MARGIN_TOL);
    match args.kind {
        CheckKind::He => {
            let tol = args.tol.unwrap_or(DEFAULT_HE_TOL);
            let he = is_hermite_einstein(&t, &w, tol)?;
            report.push(CheckResult::new("max |T - lambda Id|", he.deviation, tol, Criterion::Le));
            report.data = json!({ "lambda": he.lambda, "hermite_einstein": he.hermite_einstein });
        }
        CheckKind::Kl => {
            let kl = kl_classical(&t, &w, args.he_tol)?;
            let flat = flatness_detectors(&t, &w, EQUALITY_TOL)?;
            report.push(CheckResult::new("q", kl.q, tol, Criterion::Le));
            report.data = json!({
                "q": kl.q,
                "lambda": kl.lambda,
                "equality": kl.equality,
                "projectively_flat": flat.projectively_flat,
                "equality_tolerance": EQUALITY_TOL,
            });
        }
        CheckKind::Thm12 => {
            let res = thm12(&t, &w, args.he_tol)?;
            report.push(CheckResult::new("margin", res.margin, tol, Criterion::Ge));
            report.push(CheckResult::new(
                "rhs agreement",
                res.rhs - res.rhs_trace,
                MARGIN_TOL,
                Criterion::AbsLe,
            ));
            report.data = json!({
                "lhs": res.lhs,
                "rhs": res.rhs,
                "rhs_trace": res.rhs_trace,
                "margin": res.margin,
                "lambda": res.lambda,
                "equality": res.equality,
                "equality_tolerance": EQUALITY_TOL,
            });
        }
        CheckKind::Surface => {
            require_hermite_einstein(&t, &w, args.he_tol)?;
            let s = surface_compare(&t, &w, args.he_tol)?;
            report.push(CheckResult::new("c1^2 - segre bound", s.c1_sq - s.eq4_rhs, tol, Criterion::Le));
            report.push(CheckResult::new(
                "c1^2 - classical bound",
                s.c1_sq - s.classical_rhs,
                tol,
                Criterion::Le,
            ));
            report.data = json!({
                "c1_sq": s.c1_sq,
                "c2": s.c2,
                "lambda": s.lambda,
                "classical_rhs": s.classical_rhs,
                "eq4_rhs": s.eq4_rhs,
                "stronger": s.stronger.as_str(),
                "condition11": s.condition11,
                "caveat": s.caveat,
            });
        }
        CheckKind::Remark41 => {
            let res = remark41_bound(&t, &w, args.he_tol)?;
            report.push(CheckResult::new("lhs - rhs", res.lhs - res.rhs, tol, Criterion::Le));
            report.data = json!({ "lhs": res.lhs, "rhs": res.rhs });
        }
        CheckKind::Lhe => {
            if args.ell == 0 || args.ell > t.n() {
                return Err(Error::OutOfRange {
                    what: "ell",
                    value: args.ell,
                    min: 1,
                    max: t.n(),
                });
            }
            let check = lhe_check(&t, &w, args.samples, args.seed, tol)?;
            for p in check.profiles.iter().take(args.ell) {
                report.push(CheckResult::new(format!("gamma_{} spread", p.k), p.spread, tol, Criterion::Le));
            }
            let profiles: Vec<Value> = check
                .profiles
                .iter()
                .map(|p| json!({ "k": p.k, "min": p.min, "max": p.max, "mean": p.mean, "spread": p.spread }))
                .collect();
            report.data = json!({ "profiles": profiles, "ell_max": check.ell_max });
        }
    }
    Ok(())
}

fn run_moments(args: &MomentsArgs, report: &mut Report) -> Result<()> {
    let spec = MomentSpec::new(args.r, args.lambdas.clone(), args.mus.clone())?;
    let exact = moment_wick(&spec);
    let mc = moment_mc(&spec, args.samples, args.seed);
    let d = (mc.estimate - rational_to_f64(&exact)).norm();
    let z = if d == 0.0 { 0.0 } else { d / mc.stderr };
    report.push(CheckResult::new("monte carlo z-score", z, args.sigmas, Criterion::Le));
    report.data = json!({
        "exact": exact.to_string(),
        "exact_value": rational_to_f64(&exact),
        "estimate": { "re": mc.estimate.re, "im": mc.estimate.im },
        "stderr": mc.stderr,
        "samples": mc.samples,
    });
    Ok(())
}

fn emit(text: &str, out: Option<&Path>, stdout: &mut dyn Write) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| Error::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        }),
        None => stdout.write_all(text.as_bytes()).map_err(|e| Error::Io {
            path: "<stdout>".into(),
            message: e.to_string(),
        }),
    }
}

fn finish(
    report: Report,
    outcome: Result<()>,
    out: Option<&Path>,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> i32 {
    let report = match outcome {
        Ok(()) => report,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            report.with_error(&e)
        }
    };
    if let Err(e) = emit(&report.to_json(), out, stdout) {
        let _ = writeln!(stderr, "error: {e}");
        return 2;
    }
    report.exit_code()
}

fn inputs<T: Serialize>(args: &T) -> Value {
    serde_json::to_value(args).unwrap_or(Value::Null)
}

/// Parses `argv` and executes; returns the process exit status.
pub fn run<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(stderr, "{text}");
                2
            } else {
                let _ = write!(stdout, "{text}");
                0
            };
        }
    };
    match cli.command {
        Command::Gen(args) => {
            let result = generate(&args).and_then(|t| emit(&tensor_to_json(&t), args.out.as_deref(), stdout));
            match result {
                Ok(()) => 0,
                Err(e) => {
                    let _ = writeln!(stderr, "error: {e}");
                    2
                }
            }
        }
        Command::Verify(args) => {
            let mut report = Report::new(format!("verify {}", inputs(&args.kind).as_str().unwrap_or("")), inputs(&args));
            let outcome = run_verify(&args, &mut report);
            finish(report, outcome, args.out.as_deref(), stdout, stderr)
        }
        Command::Check(args) => {
            let mut report = Report::new(format!("check {}", inputs(&args.kind).as_str().unwrap_or("")), inputs(&args));
            let outcome = run_check(&args, &mut report);
            finish(report, outcome, args.out.as_deref(), stdout, stderr)
        }
        Command::Moments(args) => {
            let mut report = Report::new("moments", inputs(&args));
            let outcome = run_moments(&args, &mut report);
            finish(report, outcome, args.out.as_deref(), stdout, stderr)
        }
    }
}
