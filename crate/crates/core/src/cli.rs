//! Command-line surface.
//!
//! Every command writes a JSON report (to `--out` or stdout) and a one-line
//! summary to stderr. Exit status: 0 success, 1 verification failure,
//! 2 malformed input, 3 resource cap exceeded.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use crate::arith::rational::{format_rational, parse_rational};
use crate::arith::{make_algebraic, FieldElement, Polynomial};
use crate::construction::{
    construct_for_algebraic, ConstructOptions, ConstructionError, Stage, DEFAULT_BINARY_CAP, DEFAULT_REFINE_CAP,
};
use crate::hypermatrix::json::{element_to_json, Protocol};
use crate::hypermatrix::{check_mystery, check_robust_binary, HypermatrixError, MysteryCheck};
use crate::majority::{synthesize_with_deepening, MajorityError, DEFAULT_MAX_TRIALS};
use crate::sim::adversary::robustness_level;
use crate::sim::sampling::exact_string;
use crate::sim::{
    exact_bias_basis, exact_bias_joint, flip_sample_with, AdversaryConfig, SimError, DEFAULT_ENUMERATION_CAP,
    DEFAULT_SAMPLING_BITS,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_MALFORMED: i32 = 2;
pub const EXIT_CAP: i32 = 3;

/// Extra tree levels tried when the trial budget runs out.
const MAJORITY_EXTRA_LEVELS: usize = 2;

#[derive(Parser, Debug)]
#[command(name = "robust-coin", version, about = "Certified robust multiparty coin flipping")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Master seed for all sampling.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Build a certified protocol for a real algebraic bias.
    Construct {
        /// Minimal polynomial: "x^2 + x - 1" or coefficients "-1, 1, 1" (lowest degree first).
        #[arg(long, allow_hyphen_values = true)]
        minpoly: String,
        /// Isolating interval for the root.
        #[arg(long, num_args = 2, value_names = ["LO", "HI"], allow_hyphen_values = true)]
        interval: Vec<String>,
        #[arg(long, default_value = "rational_entries")]
        stage: Stage,
        /// Cap on entries of the binary expansion.
        #[arg(long)]
        cap_entries: Option<u128>,
        #[command(flatten)]
        common: Common,
    },
    /// Check a protocol's certificate exactly.
    Verify {
        protocol: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Seeded coin flips, optionally with a deviating coalition.
    Simulate {
        protocol: PathBuf,
        #[arg(long)]
        adversary: Option<PathBuf>,
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
        #[command(flatten)]
        common: Common,
    },
    /// Exact bias under a coalition, plus the largest robust coalition size.
    Attack {
        protocol: PathBuf,
        #[arg(long)]
        adversary: Option<PathBuf>,
        /// Also sample this many flips under the adversary.
        #[arg(long, default_value_t = 0)]
        trials: u64,
        /// Cap on enumerated coalition outcomes.
        #[arg(long)]
        cap_entries: Option<u128>,
        #[command(flatten)]
        common: Common,
    },
    /// Synthesize a p-ary majority gate from ternary gates.
    Majority {
        p: usize,
        /// Colorings tried per depth.
        #[arg(long, default_value_t = DEFAULT_MAX_TRIALS)]
        trials: u64,
        #[command(flatten)]
        common: Common,
    },
    /// Certified flip for a mixed-strategy equilibrium probability.
    DemoPoker {
        #[arg(long, default_value_t = 1)]
        trials: u64,
        #[command(flatten)]
        common: Common,
    },
}

/// A failed command: exit status and message.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    fn malformed(m: impl ToString) -> Self {
        Failure { code: EXIT_MALFORMED, message: m.to_string() }
    }
}

impl From<ConstructionError> for Failure {
    fn from(e: ConstructionError) -> Self {
        let code = match e {
            ConstructionError::SizeCapExceeded { .. } | ConstructionError::SearchBudgetExceeded => EXIT_CAP,
            ConstructionError::CertificateRejected { .. } => EXIT_FAILED,
            _ => EXIT_MALFORMED,
        };
        Failure { code, message: e.to_string() }
    }
}

impl From<SimError> for Failure {
    fn from(e: SimError) -> Self {
        let code = match e {
            SimError::EnumerationCapExceeded(_) => EXIT_CAP,
            SimError::PathsDisagree => EXIT_FAILED,
            _ => EXIT_MALFORMED,
        };
        Failure { code, message: e.to_string() }
    }
}

impl From<MajorityError> for Failure {
    fn from(e: MajorityError) -> Self {
        let code = match e {
            MajorityError::TrialsExhausted { .. } | MajorityError::EnumerationCapExceeded(_) => EXIT_CAP,
            _ => EXIT_MALFORMED,
        };
        Failure { code, message: e.to_string() }
    }
}

impl From<HypermatrixError> for Failure {
    fn from(e: HypermatrixError) -> Self {
        Failure::malformed(e)
    }
}

/// Result of a command: report, status line and exit status.
#[derive(Debug)]
pub struct Outcome {
    pub code: i32,
    pub summary: String,
    pub report: Value,
}

fn header(command: &str, seed: Option<u64>, caps: Value) -> Value {
    json!({
        "tool": env!("CARGO_PKG_NAME"),
        "version": env!("CARGO_PKG_VERSION"),
        "command": command,
        "seed": seed,
        "caps": caps,
    })
}

fn merge(mut base: Value, extra: Value) -> Value {
    if let (Some(b), Value::Object(e)) = (base.as_object_mut(), extra) {
        b.extend(e);
    }
    base
}

fn read_file(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::malformed(format!("{}: {e}", path.display())))
}

fn load_protocol(path: &Path) -> Result<Protocol, Failure> {
    Protocol::from_json_str(&read_file(path)?).map_err(|e| Failure::malformed(format!("{}: {e}", path.display())))
}

fn load_adversary(path: Option<&PathBuf>) -> Result<Option<AdversaryConfig>, Failure> {
    path.map(|p| AdversaryConfig::from_json_str(&read_file(p)?).map_err(Failure::from))
        .transpose()
}

fn certified(p: &Protocol) -> Result<&crate::hypermatrix::MysteryCertificate, Failure> {
    p.certificate
        .as_ref()
        .ok_or_else(|| Failure::malformed("protocol has no certificate"))
}

fn check_json(check: &MysteryCheck) -> Value {
    match check {
        MysteryCheck::Valid => json!({ "valid": true }),
        MysteryCheck::Invalid { axis, residual } => json!({
            "valid": false,
            "axis": axis,
            "residual": residual.iter().map(element_to_json).collect::<Vec<_>>(),
        }),
    }
}

fn construct(minpoly: &str, interval: &[String], stage: Stage, cap: Option<u128>) -> Result<Outcome, Failure> {
    let f: Polynomial = minpoly.parse().map_err(|e| Failure::malformed(format!("minpoly: {e}")))?;
    let [lo, hi] = interval else {
        return Err(Failure::malformed("--interval needs LO HI"));
    };
    let lo = parse_rational(lo).map_err(Failure::malformed)?;
    let hi = parse_rational(hi).map_err(Failure::malformed)?;
    let alpha = make_algebraic(f, lo, hi).map_err(Failure::malformed)?;
    let opts = ConstructOptions {
        binary_cap: cap.unwrap_or(DEFAULT_BINARY_CAP),
        refine_cap: DEFAULT_REFINE_CAP,
    };
    let started = std::time::Instant::now();
    let c = construct_for_algebraic(&alpha, stage, &opts)?;
    let wall_time_ms = started.elapsed().as_millis() as u64;
    let check = check_mystery(&c.a, &c.cert)?;
    let protocol = Protocol { hypermatrix: c.a, certificate: Some(c.cert) };
    let head = header(
        "construct",
        None,
        json!({ "binary_cap": opts.binary_cap.to_string(), "refine_cap": opts.refine_cap }),
    );
    let report = merge(
        serde_json::to_value(protocol.to_json()).expect("serializable"),
        json!({ "report": merge(head, json!({ "pipeline": c.report, "wall_time_ms": wall_time_ms, "check": check_json(&check) })) }),
    );
    let (code, word) = if check.is_valid() { (EXIT_OK, "valid") } else { (EXIT_FAILED, "invalid") };
    Ok(Outcome {
        code,
        summary: format!(
            "{word}: {} with format {:?}",
            alpha,
            protocol.hypermatrix.format()
        ),
        report,
    })
}

fn verify(path: &Path) -> Result<Outcome, Failure> {
    let p = load_protocol(path)?;
    let cert = certified(&p)?;
    let check = check_mystery(&p.hypermatrix, cert)?;
    let robust = if p.hypermatrix.is_binary() && check.is_valid() {
        Some(check_robust_binary(&p.hypermatrix, cert)?)
    } else {
        None
    };
    let mut report = merge(
        header("verify", None, json!({})),
        json!({
            "format": p.hypermatrix.format(),
            "alpha": exact_string(&cert.alpha),
            "stochastic_betas": cert.is_stochastic(),
            "single_axis_robust": robust,
        }),
    );
    report = merge(report, check_json(&check));
    Ok(match &check {
        MysteryCheck::Valid => Outcome { code: EXIT_OK, summary: "valid".into(), report },
        MysteryCheck::Invalid { axis, .. } => Outcome {
            code: EXIT_FAILED,
            summary: format!("invalid: nonzero residual on axis {axis}"),
            report,
        },
    })
}

fn simulate(path: &Path, adversary: Option<&PathBuf>, trials: u64, seed: u64) -> Result<Outcome, Failure> {
    let p = load_protocol(path)?;
    let cert = certified(&p)?;
    let adv = load_adversary(adversary)?;
    let check = check_mystery(&p.hypermatrix, cert)?;
    if !check.is_valid() {
        return Ok(Outcome {
            code: EXIT_FAILED,
            summary: "invalid certificate; not simulating".into(),
            report: merge(header("simulate", Some(seed), json!({})), check_json(&check)),
        });
    }
    let rep = flip_sample_with(&p.hypermatrix, cert, adv.as_ref(), trials, seed, DEFAULT_SAMPLING_BITS)?;
    let summary = format!(
        "{} heads in {} trials (empirical {}, exact {})",
        rep.heads, rep.count, rep.empirical, rep.expected
    );
    let report = merge(
        header("simulate", Some(seed), json!({ "sampling_bits": DEFAULT_SAMPLING_BITS })),
        json!({
            "alpha": exact_string(&cert.alpha),
            "adversary": adv,
            "flips": rep,
        }),
    );
    Ok(Outcome { code: EXIT_OK, summary, report })
}

fn attack(path: &Path, adversary: Option<&PathBuf>, trials: u64, cap: Option<u128>, seed: u64) -> Result<Outcome, Failure> {
    let p = load_protocol(path)?;
    let cert = certified(&p)?;
    let cap = cap.unwrap_or(DEFAULT_ENUMERATION_CAP);
    let adv = load_adversary(adversary)?;
    let level = robustness_level(&p.hypermatrix, cert, cap)?;
    let mut report = merge(
        header("attack", Some(seed), json!({ "enumeration_cap": cap.to_string() })),
        json!({
            "alpha": exact_string(&cert.alpha),
            "robust_coalition_size": level,
        }),
    );
    let mut summary = format!("every coalition of {level} axes leaves the bias at {}", exact_string(&cert.alpha));
    if let Some(adv) = &adv {
        let joint = exact_bias_joint(&p.hypermatrix, cert, adv)?;
        let basis = exact_bias_basis(&p.hypermatrix, cert, adv)?;
        if joint != basis {
            return Err(SimError::PathsDisagree.into());
        }
        let shifted = joint != cert.alpha;
        summary = format!(
            "coalition {:?} yields exact bias {} ({})",
            adv.coalition,
            exact_string(&joint),
            if shifted { "bias moved" } else { "bias unchanged" }
        );
        report = merge(
            report,
            json!({
                "adversary": adv,
                "bias_under_adversary": exact_string(&joint),
                "bias_changed": shifted,
            }),
        );
        if trials > 0 {
            let rep = flip_sample_with(&p.hypermatrix, cert, Some(adv), trials, seed, DEFAULT_SAMPLING_BITS)?;
            report = merge(report, json!({ "flips": rep }));
        }
    }
    Ok(Outcome { code: EXIT_OK, summary, report })
}

fn majority(p: usize, trials: u64, seed: u64) -> Result<Outcome, Failure> {
    let tree = synthesize_with_deepening(p, seed, trials, MAJORITY_EXTRA_LEVELS)?;
    let summary = format!("{p}-ary majority gate of depth {} ({} leaves)", tree.depth, tree.leaves());
    let report = merge(
        header("majority", Some(seed), json!({ "max_trials": trials, "extra_levels": MAJORITY_EXTRA_LEVELS })),
        json!({ "tree": tree, "verified": true }),
    );
    Ok(Outcome { code: EXIT_OK, summary, report })
}

/// A three-player bluffing game. Each player bluffs or folds; a bluffer wins
/// 1 if both others fold, a folder wins 1 if someone else bluffs. At the
/// symmetric equilibrium each bluffs with probability `x` where
/// `(1 − x)² = 1 − (1 − x)²`, i.e. `x = 1 − 1/√2`, a root of
/// `x² − 2x + 1/2`.
fn demo_poker(trials: u64, seed: u64) -> Result<Outcome, Failure> {
    let f: Polynomial = "x^2 - 2x + 1/2".parse().expect("literal polynomial");
    let alpha = make_algebraic(f, parse_rational("0").expect("0"), parse_rational("1/2").expect("1/2"))
        .map_err(Failure::malformed)?;
    let c = construct_for_algebraic(&alpha, Stage::RationalEntries, &ConstructOptions::default())?;
    let x = c.cert.alpha.clone();
    let fold_all = {
        let y = &FieldElement::one(x.field()) - &x;
        &y * &y
    };
    let bluff_payoff = fold_all.clone();
    let fold_payoff = &FieldElement::one(x.field()) - &fold_all;
    let indifferent = bluff_payoff == fold_payoff;
    let check = check_mystery(&c.a, &c.cert)?;
    let rep = flip_sample_with(&c.a, &c.cert, None, trials, seed, DEFAULT_SAMPLING_BITS)?;
    let valid = check.is_valid() && indifferent;
    let outcome = if trials == 1 {
        if rep.heads == 1 { "bluff".to_string() } else { "fold".to_string() }
    } else {
        format!("bluff in {} of {} rounds", rep.heads, trials)
    };
    let summary = format!(
        "{}: equilibrium bluff probability {} ≈ {:.6}; flip says {outcome}",
        if valid { "certified" } else { "NOT certified" },
        alpha,
        x.approx_f64()
    );
    let report = merge(
        header("demo-poker", Some(seed), json!({ "sampling_bits": DEFAULT_SAMPLING_BITS })),
        json!({
            "game": "three players each bluff or fold; a bluffer wins 1 if both others fold, a folder wins 1 if another player bluffs",
            "equilibrium": {
                "minpoly": alpha.minpoly().coeffs().iter().map(format_rational).collect::<Vec<_>>(),
                "interval": [format_rational(alpha.interval().0), format_rational(alpha.interval().1)],
                "approx": x.approx_f64(),
                "indifference_exact": indifferent,
            },
            "protocol": { "format": c.a.format(), "entries": c.a.len() },
            "check": check_json(&check),
            "flips": rep,
        }),
    );
    Ok(Outcome { code: if valid { EXIT_OK } else { EXIT_FAILED }, summary, report })
}

/// Runs a parsed command.
pub fn run(cli: &Cli) -> Result<Outcome, Failure> {
    match &cli.command {
        Command::Construct { minpoly, interval, stage, cap_entries, .. } => {
            construct(minpoly, interval, *stage, *cap_entries)
        }
        Command::Verify { protocol, .. } => verify(protocol),
        Command::Simulate { protocol, adversary, trials, common } => {
            simulate(protocol, adversary.as_ref(), *trials, common.seed)
        }
        Command::Attack { protocol, adversary, trials, cap_entries, common } => {
            attack(protocol, adversary.as_ref(), *trials, *cap_entries, common.seed)
        }
        Command::Majority { p, trials, common } => majority(*p, *trials, common.seed),
        Command::DemoPoker { trials, common } => demo_poker(*trials, common.seed),
    }
}

fn common(cli: &Cli) -> &Common {
    match &cli.command {
        Command::Construct { common, .. }
        | Command::Verify { common, .. }
        | Command::Simulate { common, .. }
        | Command::Attack { common, .. }
        | Command::Majority { common, .. }
        | Command::DemoPoker { common, .. } => common,
    }
}

/// Runs, writes the report and returns the exit status.
pub fn main_with(cli: Cli) -> i32 {
    match run(&cli) {
        Ok(outcome) => {
            let text = serde_json::to_string_pretty(&outcome.report).expect("serializable");
            match &common(&cli).out {
                Some(path) => {
                    if let Err(e) = fs::write(path, text + "\n") {
                        eprintln!("error: {}: {e}", path.display());
                        return EXIT_MALFORMED;
                    }
                }
                None => {
                    // A closed pipe (e.g. `| head`) is not an error.
                    let _ = writeln!(std::io::stdout(), "{text}");
                }
            }
            eprintln!("{}", outcome.summary);
            outcome.code
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    }
}
