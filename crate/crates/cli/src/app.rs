use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;

use persuasion_core::appendix_c::{self, reproduce};
use persuasion_core::construct::{
    full_information, lp_private_base, mask_match, mask_remove, optimal_private, public_prefix,
    subsample_half, subsample_rate, MaskMatchParams,
};
use persuasion_core::downstream::{
    bruteforce_optimal_responses, downstream_utility_model, scheme_best_responses, verify_responses,
    Estimate, Method, SearchMode,
};
use persuasion_core::lab::{self, Family as BoundFamily};
use persuasion_core::lp::{self, build_persuasive_lp, scheme_from_solution, Objective};
use persuasion_core::persuasive::{
    check_k_worst_case_with, check_private_with, check_public, check_two_sided,
};
use persuasion_core::report::{run_bench, BenchOptions};
use persuasion_core::{Alphabet, BestResponseMode, Error, ErrorKind, Instance, Rational, SignalingScheme};

use crate::exit;
use crate::io::{self, Meta};
use crate::model_spec::parse_model;

const EXIT_CODES: &str = "\
Exit codes:
  0  success
  1  a check or reproduction failed
  2  input error (bad flags, malformed file, invariant violated on load)
  3  size refusal (problem exceeds a documented cap)
  4  internal error

Environment:
  PERSUADE_THREADS  worker count for parallel evaluation";

#[derive(Debug, Parser)]
#[command(name = "persuade", version, about = "Exact leakage-robust Bayesian persuasion", after_help = EXIT_CODES)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write an instance file.
    Gen(GenArgs),
    /// Build a signaling scheme for an instance.
    Construct(ConstructArgs),
    /// Persuasiveness verdict; exit 1 when the scheme fails.
    Check(CheckArgs),
    /// Solve the k-worst-case persuasive LP (k = 0 is the private optimum).
    SolveLp(SolveArgs),
    /// Downstream utility of a scheme under a leakage model.
    Eval(EvalArgs),
    /// Best scheme for a fixed pattern over given alphabets.
    Bruteforce(BruteArgs),
    /// Benchmark table as CSV.
    Bench(BenchArgs),
    /// Recompute a documented worked example.
    Reproduce(ReproduceArgs),
    /// Lower-bound checks on the hard instances, as CSV.
    VerifyBounds(VerifyArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum GenFamily {
    HardSupermodular,
    HardCliqueBlocks,
    HardSubmodularPublic,
    HardSubmodularK,
    Externality,
    AppendixC,
    Random,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum RandomUtility {
    Supermodular,
    Monotone,
    Xos,
    Concave,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    pub family: GenFamily,
    #[arg(long, default_value_t = 3)]
    pub n: usize,
    #[arg(short, long, default_value_t = 1)]
    pub k: usize,
    /// Externality gap parameter, a rational in (0,1).
    #[arg(long, default_value = "1/100")]
    pub eps: String,
    #[arg(long, value_enum, default_value = "monotone")]
    pub utility: RandomUtility,
    /// Grid denominator for random theta and lambda.
    #[arg(long, default_value_t = 8)]
    pub denom: i64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Append this many dummy receivers (theta 0, no marginal value).
    #[arg(long, default_value_t = 0)]
    pub pad: usize,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum SchemeKind {
    OptimalPrivate,
    FullInformation,
    PublicPrefix,
    LpPrivate,
    SubsampleHalf,
    SubsampleRate,
    MaskRemove,
    MaskMatch,
}

#[derive(Debug, Args)]
pub struct ConstructArgs {
    pub scheme: SchemeKind,
    #[arg(short, long)]
    pub instance: PathBuf,
    #[arg(short, long, default_value_t = 1)]
    pub k: usize,
    /// Subsampling rate; defaults to 1/k.
    #[arg(long)]
    pub gamma: Option<String>,
    /// Receiver index (1-based) for public-prefix and mask-remove; the
    /// public prefix defaults to the best one.
    #[arg(long)]
    pub index: Option<usize>,
    /// Base scheme for the subsampling transforms; defaults to the LP
    /// private optimum.
    #[arg(long)]
    pub base: Option<PathBuf>,
    /// mask-match cutoff fraction, giving m = floor(alpha n) + 1.
    #[arg(long, default_value = "1/2")]
    pub alpha: String,
    /// Explicit mask-match cutoff; overrides alpha.
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long, default_value = "1/2")]
    pub c0: String,
    #[arg(long, default_value = "1/2")]
    pub c1: String,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum CheckKind {
    Private,
    Kworst,
    Public,
    Twosided,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    pub kind: CheckKind,
    #[arg(short, long)]
    pub instance: PathBuf,
    #[arg(short, long)]
    pub scheme: PathBuf,
    #[arg(short, long, default_value_t = 1)]
    pub k: usize,
    /// Receivers also need everyone else recommended 1 under w1.
    #[arg(long)]
    pub externality: bool,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ObjectiveArg {
    Full,
    Omega0,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[arg(short, long)]
    pub instance: PathBuf,
    #[arg(short, long, default_value_t = 0)]
    pub k: usize,
    #[arg(long, value_enum, default_value = "full")]
    pub objective: ObjectiveArg,
    #[arg(long)]
    pub emit_scheme: Option<PathBuf>,
    /// Write the LP in plain text.
    #[arg(long)]
    pub emit_lp: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(short, long)]
    pub instance: PathBuf,
    #[arg(short, long)]
    pub scheme: PathBuf,
    /// kstar:K | kclique:K | kbroadcast:K | ker:K | fixed:FILE | mix:FILE
    #[arg(long)]
    pub model: String,
    /// Enumerate the model's support (the default).
    #[arg(long, conflicts_with = "mc")]
    pub exact: bool,
    /// Monte Carlo with this many samples.
    #[arg(long)]
    pub mc: Option<u64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub externality: bool,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ModeArg {
    PerInformationSet,
    PerProfile,
}

#[derive(Debug, Args)]
pub struct BruteArgs {
    #[arg(short, long)]
    pub instance: PathBuf,
    #[arg(long)]
    pub pattern: PathBuf,
    /// Comma-separated symbol strings, one per receiver; binary by default.
    #[arg(long)]
    pub alphabets: Option<String>,
    #[arg(long, value_enum, default_value = "per-information-set")]
    pub mode: ModeArg,
    /// Solve only the LP for this scheme's own best responses and test the
    /// scheme against it.
    #[arg(long)]
    pub responses_from: Option<PathBuf>,
    #[arg(long)]
    pub emit_scheme: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(short, long)]
    pub instance: PathBuf,
    /// Inclusive range `a..b`, or a single k.
    #[arg(long, default_value = "1..1")]
    pub k_range: String,
    /// Comma-separated model specs.
    #[arg(long, value_delimiter = ',', default_value = "kstar:1")]
    pub models: Vec<String>,
    #[arg(long, default_value_t = 100_000)]
    pub samples: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Label for the instance_id column; defaults to the file stem.
    #[arg(long)]
    pub id: Option<String>,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ReproduceTarget {
    AppendixC,
}

#[derive(Debug, Args)]
pub struct ReproduceArgs {
    pub target: ReproduceTarget,
    /// Search one action profile per signal profile (slow).
    #[arg(long)]
    pub per_profile: bool,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Check one instance file instead of the built-in suite.
    #[arg(short, long)]
    pub instance: Option<PathBuf>,
    #[arg(short, long, default_value_t = 1)]
    pub k: usize,
    #[arg(long, value_enum, default_value = "other")]
    pub family: FamilyArg,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum FamilyArg {
    HardSupermodular,
    HardSubmodularPublic,
    Other,
}

#[derive(Debug)]
pub enum CliError {
    Core(Error),
    Io(String, String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

impl CliError {
    pub fn code(&self) -> i32 {
        match self {
            CliError::Core(e) => match e.kind() {
                ErrorKind::Input => exit::INPUT,
                ErrorKind::Size => exit::SIZE,
                ErrorKind::Internal => exit::INTERNAL,
            },
            CliError::Io(..) => exit::INPUT,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Io(path, e) => write!(f, "{path}: {e}"),
        }
    }
}

/// Text for stdout and the exit code.
#[derive(Debug)]
pub struct Outcome {
    pub stdout: String,
    pub code: i32,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Outcome { stdout, code: exit::OK }
    }

    fn verdict(stdout: String, pass: bool) -> Self {
        Outcome { stdout, code: if pass { exit::OK } else { exit::CHECK_FAILED } }
    }
}

type Res<T> = Result<T, CliError>;

pub fn run(cli: Cli) -> Res<Outcome> {
    match cli.command {
        Command::Gen(a) => gen(a),
        Command::Construct(a) => construct(a),
        Command::Check(a) => check(a),
        Command::SolveLp(a) => solve(a),
        Command::Eval(a) => eval(a),
        Command::Bruteforce(a) => bruteforce(a),
        Command::Bench(a) => bench(a),
        Command::Reproduce(a) => reproduce_cmd(a),
        Command::VerifyBounds(a) => verify_bounds(a),
    }
}

fn rational(text: &str) -> Res<Rational> {
    Ok(text.parse()?)
}

/// Writes to `output` when given and echoes a one-line note, otherwise
/// prints the artifact itself.
fn emit(output: Option<&Path>, text: String, note: &str) -> Res<Outcome> {
    match output {
        Some(p) => {
            io::write(p, &text)?;
            Ok(Outcome::ok(format!("{note} -> {}\n", p.display())))
        }
        None => Ok(Outcome::ok(text)),
    }
}

fn gen(a: GenArgs) -> Res<Outcome> {
    let mut seed = None;
    let inst = match a.family {
        GenFamily::HardSupermodular => lab::hard_supermodular(a.n)?,
        GenFamily::HardCliqueBlocks => lab::hard_clique_blocks(a.n, a.k)?,
        GenFamily::HardSubmodularPublic => lab::hard_submodular_public(a.n)?,
        GenFamily::HardSubmodularK => lab::hard_submodular_k(a.n, a.k)?,
        GenFamily::Externality => lab::externality_instance(a.n, &rational(&a.eps)?)?,
        GenFamily::AppendixC => appendix_c::appendix_c().instance,
        GenFamily::Random => {
            if a.n == 0 || a.n > persuasion_core::model::utility::TABLE_MAX_N {
                return Err(Error::Domain(format!("random instances need 1 <= n <= 12 (got {})", a.n)).into());
            }
            if a.denom < 2 {
                return Err(Error::Domain("denom must be at least 2".into()).into());
            }
            seed = Some(a.seed);
            let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
            let utility = match a.utility {
                RandomUtility::Supermodular => lab::random_supermodular(&mut rng, a.n)?,
                RandomUtility::Monotone => lab::random_monotone(&mut rng, a.n)?,
                RandomUtility::Xos => lab::random_xos(&mut rng, a.n, 3)?,
                RandomUtility::Concave => lab::random_concave(&mut rng, a.n)?,
            };
            let lambda = lab::random_lambda(&mut rng, a.denom);
            let theta = lab::random_theta(&mut rng, a.n, a.denom);
            Instance::new(a.n, lambda, theta, utility)?
        }
    };
    let inst = if a.pad > 0 { inst.pad_dummies(a.pad)? } else { inst };
    let text = io::with_meta(&inst, &Meta::new(Some(&inst), seed));
    emit(a.output.as_deref(), text, "instance")
}

fn construct(a: ConstructArgs) -> Res<Outcome> {
    let inst = io::load_instance(&a.instance)?;
    let n = inst.n();
    let base = || -> Res<SignalingScheme> {
        match &a.base {
            Some(p) => io::load_scheme(p),
            None => Ok(lp_private_base(&inst)?),
        }
    };
    let scheme = match a.scheme {
        SchemeKind::OptimalPrivate => optimal_private(&inst).to_scheme(),
        SchemeKind::FullInformation => full_information(&inst),
        SchemeKind::PublicPrefix => {
            let i = a.index.unwrap_or_else(|| persuasion_core::construct::best_public_prefix(&inst));
            public_prefix(&inst, i)?
        }
        SchemeKind::LpPrivate => lp_private_base(&inst)?,
        SchemeKind::SubsampleHalf => subsample_half(&inst, &base()?, a.k)?,
        SchemeKind::SubsampleRate => {
            let gamma = match &a.gamma {
                Some(g) => rational(g)?,
                None if a.k > 0 => Rational::new(1, a.k as i64),
                None => return Err(Error::Domain("k = 0 needs an explicit --gamma".into()).into()),
            };
            subsample_rate(&inst, &base()?, a.k, &gamma)?
        }
        SchemeKind::MaskRemove => {
            let i = a.index.ok_or_else(|| Error::Domain("mask-remove needs --index".into()))?;
            mask_remove(&inst, i, a.k)?.to_scheme()
        }
        SchemeKind::MaskMatch => {
            let mut params = MaskMatchParams::halves(n, &rational(&a.alpha)?);
            params.c0 = rational(&a.c0)?;
            params.c1 = rational(&a.c1)?;
            if let Some(m) = a.m {
                params.m = m;
            }
            mask_match(&inst, &params)?.to_scheme()
        }
    };
    let text = io::with_meta(&scheme, &Meta::new(Some(&inst), None));
    emit(a.output.as_deref(), text, "scheme")
}

fn response_mode(externality: bool) -> BestResponseMode {
    if externality {
        BestResponseMode::Externality
    } else {
        BestResponseMode::Standard
    }
}

fn check(a: CheckArgs) -> Res<Outcome> {
    let inst = io::load_instance(&a.instance)?;
    let scheme = io::load_scheme(&a.scheme)?;
    let mode = response_mode(a.externality);
    let (label, verdict) = match a.kind {
        CheckKind::Private => ("private".to_string(), check_private_with(&inst, &scheme, mode)?),
        CheckKind::Kworst => {
            (format!("{}-worst-case", a.k), check_k_worst_case_with(&inst, &scheme, a.k, mode)?)
        }
        CheckKind::Public if !a.externality => ("public".into(), check_public(&inst, &scheme)?),
        CheckKind::Public => ("public".into(), check_k_worst_case_with(&inst, &scheme, inst.n() - 1, mode)?),
        CheckKind::Twosided => {
            if a.externality {
                return Err(Error::Unsupported("two-sided check in externality mode".into()).into());
            }
            (format!("{}-two-sided", a.k), check_two_sided(&inst, &scheme, a.k)?)
        }
    };
    let view = verdict.render(&scheme);
    let body = json!({ "check": label, "verdict": view });
    let text = io::with_meta(&body, &Meta::new(Some(&inst), None));
    Ok(Outcome::verdict(text, verdict.is_ok()))
}

fn solve(a: SolveArgs) -> Res<Outcome> {
    let inst = io::load_instance(&a.instance)?;
    let objective = match a.objective {
        ObjectiveArg::Full => Objective::Full,
        ObjectiveArg::Omega0 => Objective::Omega0,
    };
    let program = build_persuasive_lp(&inst, a.k, objective)?;
    if let Some(p) = &a.emit_lp {
        io::write(p, &program.to_text())?;
    }
    let sol = lp::solve(&program)?;
    if !sol.is_optimal() {
        return Err(Error::Internal(format!("persuasive LP ended {:?}", sol.status)).into());
    }
    if let Some(p) = &a.emit_scheme {
        let scheme = scheme_from_solution(inst.n(), &sol.assignment)?;
        io::write(p, &io::with_meta(&scheme, &Meta::new(Some(&inst), None)))?;
    }
    let body = json!({
        "k": a.k,
        "objective": match objective { Objective::Full => "full", Objective::Omega0 => "omega0" },
        "value": sol.value,
        "decimal": format!("{:.6}", sol.value.to_f64()),
        "pivots": sol.pivots,
    });
    Ok(Outcome::ok(io::with_meta(&body, &Meta::new(Some(&inst), None))))
}

fn eval(a: EvalArgs) -> Res<Outcome> {
    let inst = io::load_instance(&a.instance)?;
    let scheme = io::load_scheme(&a.scheme)?;
    let model = parse_model(&a.model)?;
    let (method, seed) = match a.mc {
        Some(samples) => (Method::MonteCarlo { samples, seed: a.seed }, Some(a.seed)),
        None => (Method::Exact, None),
    };
    let est = downstream_utility_model(&inst, &scheme, &model, method, response_mode(a.externality))?;
    let body = match &est {
        Estimate::Exact { value } => json!({
            "model": model.label(),
            "value": value,
            "decimal": format!("{:.6}", value.to_f64()),
        }),
        Estimate::MonteCarlo { mean, stderr, samples, seed } => json!({
            "model": model.label(),
            "mean": mean,
            "decimal": format!("{:.6}", mean.to_f64()),
            "stderr": stderr,
            "samples": samples,
            "seed": seed,
        }),
    };
    Ok(Outcome::ok(io::with_meta(&body, &Meta::new(Some(&inst), seed))))
}

fn parse_alphabets(spec: Option<&str>, n: usize) -> Res<Vec<Alphabet>> {
    match spec {
        None => Ok(vec![Alphabet::binary(); n]),
        Some(s) => {
            let list = s
                .split(',')
                .map(|a| Alphabet::new(a.trim().chars()))
                .collect::<persuasion_core::Result<Vec<_>>>()?;
            if list.len() != n {
                return Err(Error::Domain(format!("{} alphabets for {n} receivers", list.len())).into());
            }
            Ok(list)
        }
    }
}

#[derive(Serialize)]
struct ResponseRow {
    receiver: usize,
    own: String,
    leaked: Vec<(usize, String)>,
    adopt: bool,
}

fn response_rows(scheme: &SignalingScheme, table: &persuasion_core::lp::ResponseTable) -> Vec<ResponseRow> {
    table
        .iter()
        .map(|(o, &adopt)| {
            let v = o.render(scheme);
            ResponseRow { receiver: v.receiver, own: v.own, leaked: v.leaked, adopt }
        })
        .collect()
}

fn bruteforce(a: BruteArgs) -> Res<Outcome> {
    let inst = io::load_instance(&a.instance)?;
    let pattern = io::load_pattern(&a.pattern)?;
    let meta = Meta::new(Some(&inst), None);
    if let Some(path) = &a.responses_from {
        let cand = io::load_scheme(path)?;
        let table = scheme_best_responses(&inst, &cand, &pattern)?;
        let r = verify_responses(&inst, cand.alphabets().to_vec(), &pattern, &table, Some(&cand))?;
        if let (Some(p), Some(s)) = (&a.emit_scheme, &r.scheme) {
            io::write(p, &io::with_meta(s, &meta))?;
        }
        let feasible = r.candidate_feasible == Some(true);
        let body = json!({
            "value": r.value,
            "candidate_feasible": feasible,
            "candidate_objective": r.candidate_objective,
            "responses": response_rows(&cand, &table),
        });
        return Ok(Outcome::verdict(io::with_meta(&body, &meta), feasible && r.value.is_some()));
    }
    let alphabets = parse_alphabets(a.alphabets.as_deref(), inst.n())?;
    let mode = match a.mode {
        ModeArg::PerInformationSet => SearchMode::PerInformationSet,
        ModeArg::PerProfile => SearchMode::PerProfile,
    };
    let r = bruteforce_optimal_responses(&inst, alphabets, &pattern, mode)?;
    if let Some(p) = &a.emit_scheme {
        io::write(p, &io::with_meta(&r.scheme, &meta))?;
    }
    let body = json!({
        "value": r.value,
        "decimal": format!("{:.6}", r.value.to_f64()),
        "lps_solved": r.lps_solved,
        "pruned": r.pruned,
        "index": r.index.to_string(),
        "scheme": r.scheme,
        "responses": response_rows(&r.scheme, &r.responses),
    });
    Ok(Outcome::ok(io::with_meta(&body, &meta)))
}

fn parse_k_range(s: &str) -> Res<Vec<usize>> {
    let bad = || CliError::Core(Error::Domain(format!("k range {s:?} is not a..b")));
    let num = |t: &str| t.trim().parse::<usize>().map_err(|_| bad());
    match s.split_once("..") {
        Some((a, b)) => {
            let (a, b) = (num(a)?, num(b.trim_start_matches('='))?);
            if a > b {
                return Err(bad());
            }
            Ok((a..=b).collect())
        }
        None => Ok(vec![num(s)?]),
    }
}

fn bench(a: BenchArgs) -> Res<Outcome> {
    let inst = io::load_instance(&a.instance)?;
    let ks = parse_k_range(&a.k_range)?;
    let models = a.models.iter().map(|m| parse_model(m)).collect::<persuasion_core::Result<Vec<_>>>()?;
    let id = a.id.clone().unwrap_or_else(|| {
        a.instance.file_stem().map_or("instance".into(), |s| s.to_string_lossy().into_owned())
    });
    let opts = BenchOptions { seed: a.seed, samples: a.samples, ..BenchOptions::default() };
    let report = run_bench(&inst, &id, &ks, &models, &opts)?;
    let mut out = Meta::new(Some(&inst), Some(a.seed)).csv_comment();
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in &report.rows {
        w.serialize(row).map_err(|e| Error::Internal(e.to_string()))?;
    }
    let body = w.into_inner().map_err(|e| Error::Internal(e.to_string()))?;
    out.push_str(&String::from_utf8(body).expect("csv is utf-8"));
    emit(a.output.as_deref(), out, &format!("{} rows", report.rows.len()))
}

fn reproduce_cmd(a: ReproduceArgs) -> Res<Outcome> {
    let ReproduceTarget::AppendixC = a.target;
    let mode = if a.per_profile { SearchMode::PerProfile } else { SearchMode::PerInformationSet };
    let r = reproduce(mode)?;
    let inst = appendix_c::appendix_c().instance;
    if a.json {
        return Ok(Outcome::verdict(io::with_meta(&r, &Meta::new(Some(&inst), None)), r.pass));
    }
    let mut s = String::new();
    let line = |s: &mut String, label: &str, v: &Rational| {
        let _ = writeln!(s, "{label:<44} {}", v.pretty());
    };
    line(&mut s, "private optimum (LP, k = 0)", &r.opt_private_lp);
    line(&mut s, "three-signal scheme under the 3-cycle", &r.three_signal_cycle);
    line(&mut s, "best two-signal scheme (brute force)", &r.best_two_signal_search);
    line(&mut s, "somewhat-indirect scheme under its mixture", &r.somewhat_indirect_mixture);
    let _ =
        writeln!(s, "{:<44} {} solved, {} pruned", "brute-force LPs", r.search_lps_solved, r.search_pruned);
    let _ = writeln!(
        s,
        "{:<44} {}",
        "three-signal responses LP-feasible",
        if r.three_signal_feasible { "yes" } else { "no" }
    );
    s.push_str(if r.pass { "PASS\n" } else { "FAIL\n" });
    Ok(Outcome::verdict(s, r.pass))
}

fn verify_bounds(a: VerifyArgs) -> Res<Outcome> {
    let mut cases: Vec<(String, Instance, BoundFamily, usize)> = Vec::new();
    let mut hash_of = None;
    match &a.instance {
        Some(p) => {
            let inst = io::load_instance(p)?;
            let family = match a.family {
                FamilyArg::HardSupermodular => BoundFamily::HardSupermodular,
                FamilyArg::HardSubmodularPublic => BoundFamily::HardSubmodularPublic,
                FamilyArg::Other => BoundFamily::Other,
            };
            let label = p.file_stem().map_or("instance".into(), |s| s.to_string_lossy().into_owned());
            hash_of = Some(inst.clone());
            cases.push((label, inst, family, a.k));
        }
        None => {
            for (n, k) in [(2, 1), (4, 1), (4, 2)] {
                cases.push((
                    format!("hard_supermodular_n{n}"),
                    lab::hard_supermodular(n)?,
                    BoundFamily::HardSupermodular,
                    k,
                ));
            }
            for n in [3, 4, 5] {
                cases.push((
                    format!("hard_submodular_public_n{n}"),
                    lab::hard_submodular_public(n)?,
                    BoundFamily::HardSubmodularPublic,
                    1,
                ));
            }
        }
    }
    let mut out = Meta::new(hash_of.as_ref(), None).csv_comment();
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "instance",
        "instance_hash",
        "k",
        "opt_private",
        "opt_persuasive_k",
        "opt_public",
        "powr_k",
        "checks",
        "holds",
    ])
    .map_err(|e| Error::Internal(e.to_string()))?;
    let mut all = true;
    for (label, inst, family, k) in &cases {
        let row = lab::verify_lower_bound_suite(label, inst, *family, *k)?;
        all &= row.all_hold();
        let checks: Vec<String> =
            row.checks.iter().map(|c| format!("{}: {} vs {}", c.name, c.lhs, c.bound)).collect();
        w.write_record([
            row.label.clone(),
            row.instance_hash.clone(),
            row.k.to_string(),
            row.opt_private.to_string(),
            row.opt_persuasive_k.to_string(),
            row.opt_public.to_string(),
            row.powr_k.as_ref().map_or("inf".into(), |r| r.to_string()),
            checks.join("; "),
            row.all_hold().to_string(),
        ])
        .map_err(|e| Error::Internal(e.to_string()))?;
    }
    let body = w.into_inner().map_err(|e| Error::Internal(e.to_string()))?;
    out.push_str(&String::from_utf8(body).expect("csv is utf-8"));
    let mut o = emit(a.output.as_deref(), out, &format!("{} rows", cases.len()))?;
    if !all {
        o.code = exit::CHECK_FAILED;
    }
    Ok(o)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn k_ranges() {
        assert_eq!(parse_k_range("1..3").unwrap(), vec![1, 2, 3]);
        assert_eq!(parse_k_range("2").unwrap(), vec![2]);
        assert_eq!(parse_k_range("0..=1").unwrap(), vec![0, 1]);
        assert!(parse_k_range("3..1").is_err());
    }

    #[test]
    fn cli_definition() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
