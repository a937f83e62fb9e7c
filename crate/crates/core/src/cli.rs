//! The `ipkit` command line.
//!
//! Each protocol subcommand runs once by default and prints one JSON record
//! on stdout. With `--trials N > 1` it runs `N` independent sessions on
//! derived seeds and prints an [`ExperimentReport`] instead. A human summary
//! goes to stderr. Exit codes: 0 accept/equal (or a passing report), 1
//! reject/not equal (or a failing report, or detected tampering), 2 usage or
//! input errors.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::circuit::{self, evaluate, parse_circuit, product_tree, random_circuit, LayeredCircuit};
use crate::countsat::{count_models, countsat_protocol, parse_formula, random_formula, Formula};
use crate::field::{FieldElement, PrimeModulus, RandomSource, MERSENNE_61};
use crate::fingerprint::{
    equality_protocol, freivalds_verify, mat_mul, DataVector, EqualityVerdict, FreivaldsVerdict,
    SquareMatrix,
};
use crate::gkr::{gkr_prove_verify, GkrStrategy};
use crate::replay::{
    parse_gkr_strategy, parse_sumcheck_strategy, replay, resolve_oracle, ReplayVerdict,
};
use crate::residue::{is_qr, qnr_protocol, QnrProver, QrModulus};
use crate::sumcheck::{
    brute_force_sum, run_sumcheck, FinalMode, ProverStrategy, SumcheckRun, SummandOracle,
};
use crate::transcript::Transcript;

#[derive(Debug, Parser)]
#[command(
    name = "ipkit",
    version,
    about = "Run, record and replay interactive proofs"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Field modulus, decimal.
    #[arg(long, default_value_t = MERSENNE_61)]
    pub modulus: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Run this many sessions and report the acceptance rate.
    #[arg(long, default_value_t = 1)]
    pub trials: u64,
    #[arg(long, default_value = "honest")]
    pub strategy: String,
    #[arg(long)]
    pub transcript_out: Option<PathBuf>,
    #[arg(long)]
    pub report_out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sum-check over a built-in oracle or a formula.
    Sumcheck {
        #[command(flatten)]
        common: Common,
        /// product:L, linear:L, demo, constant:L:C, random:L:D:SEED
        #[arg(long, default_value = "product:3")]
        oracle: String,
        /// Use an arithmetized formula (file or inline text) as the oracle.
        #[arg(long, conflicts_with = "oracle")]
        formula: Option<String>,
        /// Claimed sum, decimal. Defaults to the true sum.
        #[arg(long)]
        claim: Option<String>,
    },
    /// GKR on a circuit file.
    Gkr {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        circuit: PathBuf,
        /// Input values: a file, or an inline comma-separated list.
        #[arg(long)]
        input: String,
        /// Claimed outputs, comma-separated. Defaults to the true outputs
        /// (shifted by one under corrupt-output).
        #[arg(long)]
        claim: Option<String>,
    },
    /// #SAT via sum-check.
    Countsat {
        #[command(flatten)]
        common: Common,
        /// Formula file, or inline formula text.
        #[arg(long)]
        formula: String,
        #[arg(long, conflicts_with = "honest", required_unless_present = "honest")]
        claim: Option<u64>,
        /// Claim the true count.
        #[arg(long)]
        honest: bool,
    },
    /// Freivalds' check of C = A B; pass A, B, C in that order.
    Freivalds {
        #[command(flatten)]
        common: Common,
        #[arg(long, num_args = 1, required = true)]
        input: Vec<String>,
    },
    /// Fingerprint equality test of two vectors.
    Equality {
        #[command(flatten)]
        common: Common,
        #[arg(long, num_args = 1, required = true)]
        input: Vec<String>,
    },
    /// Prove that A is a quadratic non-residue mod N.
    Qnr {
        /// N.
        #[arg(long)]
        modulus: u64,
        #[arg(long, value_delimiter = ',')]
        factors: Option<Vec<u64>>,
        #[arg(long)]
        a: u64,
        #[arg(long, default_value_t = 8)]
        rounds: usize,
        /// Use a prover that guesses instead of using the factors.
        #[arg(long)]
        cheat: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        trials: u64,
        #[arg(long)]
        report_out: Option<PathBuf>,
    },
    /// Check a recorded transcript.
    Replay { transcript: PathBuf },
    /// Emit circuits, formulas or input vectors.
    Generate {
        #[command(subcommand)]
        what: Generate,
        #[arg(long, global = true)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Subcommand)]
pub enum Generate {
    ProductTree {
        #[arg(long)]
        depth: usize,
        #[arg(long)]
        width: usize,
        #[arg(long, default_value_t = MERSENNE_61)]
        modulus: u64,
    },
    RandomCircuit {
        #[arg(long)]
        depth: usize,
        #[arg(long)]
        width: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = MERSENNE_61)]
        modulus: u64,
    },
    Formula {
        #[arg(long)]
        vars: usize,
        #[arg(long)]
        size: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    Input {
        #[arg(long)]
        width: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = MERSENNE_61)]
        modulus: u64,
    },
}

/// Result of a Monte-Carlo run. `event` is what was counted: `accept` for
/// soundness experiments, `reject` for completeness ones (bound 0).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub protocol: String,
    pub parameters: Value,
    pub seed: u64,
    pub trials: u64,
    pub event: String,
    pub count: u64,
    pub measured_rate: f64,
    pub theoretical_bound: f64,
    pub bound_source: String,
    pub threshold: f64,
    pub pass: bool,
}

impl ExperimentReport {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        protocol: &str,
        parameters: Value,
        seed: u64,
        trials: u64,
        event: &str,
        count: u64,
        bound: f64,
        bound_source: &str,
    ) -> Self {
        let bound = bound.clamp(0.0, 1.0);
        let rate = count as f64 / trials.max(1) as f64;
        let threshold = three_sigma_threshold(bound, trials);
        ExperimentReport {
            protocol: protocol.into(),
            parameters,
            seed,
            trials,
            event: event.into(),
            count,
            measured_rate: rate,
            theoretical_bound: bound,
            bound_source: bound_source.into(),
            threshold,
            pass: rate <= threshold,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }
}

/// `bound + 3 sqrt(bound (1 - bound) / trials)`.
pub fn three_sigma_threshold(bound: f64, trials: u64) -> f64 {
    bound + 3.0 * (bound * (1.0 - bound) / trials.max(1) as f64).sqrt()
}

/// Counts trials where `event(trial_seed)` holds, fanned out over rayon.
pub fn monte_carlo(seed: u64, trials: u64, event: impl Fn(u64) -> bool + Sync) -> u64 {
    (0..trials)
        .into_par_iter()
        .filter(|&t| event(RandomSource::trial_seed(seed, t)))
        .count() as u64
}

#[derive(Debug)]
enum CliError {
    Usage(String),
}

impl<E: std::fmt::Display> From<E> for CliError {
    fn from(e: E) -> Self {
        CliError::Usage(e.to_string())
    }
}

type CliResult = Result<i32, CliError>;

struct Io<'a> {
    out: &'a mut dyn Write,
    err: &'a mut dyn Write,
}

impl Io<'_> {
    fn record(&mut self, v: &impl Serialize, report_out: Option<&Path>) -> Result<(), CliError> {
        let line = serde_json::to_string(v)?;
        writeln!(self.out, "{line}")?;
        if let Some(p) = report_out {
            fs::write(p, format!("{line}\n"))?;
        }
        Ok(())
    }

    fn note(&mut self, msg: &str) {
        let _ = writeln!(self.err, "{msg}");
    }

    fn report(&mut self, r: &ExperimentReport, report_out: Option<&Path>) -> CliResult {
        self.note(&format!(
            "{}: {} {}/{} = {:.5} vs bound {:.5} (threshold {:.5}): {}",
            r.protocol,
            r.event,
            r.count,
            r.trials,
            r.measured_rate,
            r.theoretical_bound,
            r.threshold,
            if r.pass { "pass" } else { "FAIL" }
        ));
        self.record(r, report_out)?;
        Ok(if r.pass { 0 } else { 1 })
    }
}

/// Runs the CLI on `args` (including the program name) and returns the
/// exit code.
pub fn run_with<I, S>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 2,
            };
            let text = e.render().to_string();
            if code == 0 {
                let _ = write!(out, "{text}");
            } else {
                let _ = write!(err, "{text}");
            }
            return code;
        }
    };
    let mut io = Io { out, err };
    match dispatch(cli.command, &mut io) {
        Ok(code) => code,
        Err(CliError::Usage(msg)) => {
            io.note(&format!("error: {msg}"));
            2
        }
    }
}

pub fn run<I, S>(args: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    run_with(args, &mut std::io::stdout(), &mut std::io::stderr())
}

fn dispatch(cmd: Command, io: &mut Io<'_>) -> CliResult {
    match cmd {
        Command::Sumcheck {
            common,
            oracle,
            formula,
            claim,
        } => cmd_sumcheck(&common, &oracle, formula.as_deref(), claim.as_deref(), io),
        Command::Gkr {
            common,
            circuit,
            input,
            claim,
        } => cmd_gkr(&common, &circuit, &input, claim.as_deref(), io),
        Command::Countsat {
            common,
            formula,
            claim,
            honest,
        } => cmd_countsat(&common, &formula, claim, honest, io),
        Command::Freivalds { common, input } => cmd_freivalds(&common, &input, io),
        Command::Equality { common, input } => cmd_equality(&common, &input, io),
        Command::Qnr {
            modulus,
            factors,
            a,
            rounds,
            cheat,
            seed,
            trials,
            report_out,
        } => cmd_qnr(
            modulus,
            factors,
            a,
            rounds,
            cheat,
            seed,
            trials,
            report_out.as_deref(),
            io,
        ),
        Command::Replay { transcript } => cmd_replay(&transcript, io),
        Command::Generate { what, out } => cmd_generate(what, out.as_deref(), io),
    }
}

fn modulus(common: &Common) -> Result<PrimeModulus, CliError> {
    Ok(PrimeModulus::new(common.modulus)?)
}

fn check_trials(trials: u64) -> Result<(), CliError> {
    if trials == 0 {
        return Err(CliError::Usage("--trials must be at least 1".into()));
    }
    Ok(())
}

/// A file's contents, or the argument itself when no such file exists.
fn file_or_inline(arg: &str) -> Result<String, CliError> {
    let p = Path::new(arg);
    if p.is_file() {
        Ok(fs::read_to_string(p)?)
    } else {
        Ok(arg.to_string())
    }
}

fn parse_values(m: PrimeModulus, text: &str) -> Result<Vec<FieldElement>, CliError> {
    let vals = text
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .map(|s| m.parse_decimal(s))
        .collect::<Result<Vec<_>, _>>()?;
    if vals.is_empty() {
        return Err(CliError::Usage("no values given".into()));
    }
    Ok(vals)
}

fn read_values(m: PrimeModulus, arg: &str) -> Result<Vec<FieldElement>, CliError> {
    parse_values(m, &file_or_inline(arg)?)
}

fn read_matrix(m: PrimeModulus, arg: &str) -> Result<SquareMatrix, CliError> {
    let vals = read_values(m, arg)?;
    let n = (vals.len() as f64).sqrt().round() as usize;
    Ok(SquareMatrix::new(n, vals)?)
}

fn write_transcript(t: &Transcript, path: Option<&Path>) -> Result<(), CliError> {
    if let Some(p) = path {
        fs::write(p, t.to_jsonl())?;
    }
    Ok(())
}

fn run_record(protocol: &str, seed: u64, run: &SumcheckRun, extra: Value) -> Value {
    let s = run
        .transcript
        .summary
        .as_ref()
        .expect("finished runs have a summary");
    let mut v = json!({
        "protocol": protocol,
        "seed": seed,
        "verdict": s.verdict,
        "rounds": s.rounds,
        "field_elements": s.field_elements,
        "bytes": s.bytes,
        "prover_ops": s.prover_ops,
        "verifier_ops": s.verifier_ops,
    });
    if let Some(r) = &s.reason {
        v["reason"] = json!(r);
    }
    if let (Value::Object(a), Value::Object(b)) = (&mut v, extra) {
        a.extend(b);
    }
    v
}

fn sumcheck_bound(g: &dyn SummandOracle, strategy: &ProverStrategy) -> (f64, &'static str) {
    let p = g.modulus().value() as f64;
    let l = g.num_vars() as f64;
    let d = g.total_degree() as f64;
    match strategy {
        ProverStrategy::DeviateAtRound(i) => {
            ((l - *i as f64 + 1.0).max(0.0) * d / p, "(l-i+1)d/|F|")
        }
        ProverStrategy::WrongOracle(j) => (d.max(j.total_degree() as f64) / p, "d/|F|"),
        _ => (l * d / p, "ld/|F|"),
    }
}

fn cmd_sumcheck(
    common: &Common,
    oracle: &str,
    formula: Option<&str>,
    claim: Option<&str>,
    io: &mut Io<'_>,
) -> CliResult {
    let m = modulus(common)?;
    check_trials(common.trials)?;
    let spec = match formula {
        Some(f) => format!("formula:{}", parse_formula(file_or_inline(f)?.trim())?),
        None => oracle.to_string(),
    };
    let g = resolve_oracle(&spec, m)?;
    let strategy = parse_sumcheck_strategy(&common.strategy, m)?;
    let truth = brute_force_sum(g.as_ref())?;
    let claim = match (claim, &strategy) {
        (Some(c), _) => m.parse_decimal(c)?,
        (None, ProverStrategy::WrongOracle(j)) => brute_force_sum(j.as_ref())?,
        (None, _) => truth,
    };
    let params = json!({
        "oracle": spec,
        "strategy": strategy.label(),
        "modulus": m.value(),
        "claim": claim.value(),
        "true_sum": truth.value(),
    });
    let once = |seed| run_sumcheck(g.as_ref(), claim, seed, strategy.clone(), FinalMode::Direct);
    if common.trials == 1 {
        let run = once(common.seed)?;
        write_transcript(&run.transcript, common.transcript_out.as_deref())?;
        io.note(&format!(
            "sumcheck {spec}: claim {claim}, {} -> {}",
            strategy.label(),
            summary_text(&run.transcript)
        ));
        io.record(
            &run_record("sumcheck", common.seed, &run, params),
            common.report_out.as_deref(),
        )?;
        return Ok(if run.accepted() { 0 } else { 1 });
    }
    write_transcript(
        &once(RandomSource::trial_seed(common.seed, 0))?.transcript,
        common.transcript_out.as_deref(),
    )?;
    let completeness = strategy.is_honest() && claim == truth;
    let report = if completeness {
        let rejects = monte_carlo(common.seed, common.trials, |s| {
            !once(s).map(|r| r.accepted()).unwrap_or(false)
        });
        ExperimentReport::new(
            "sumcheck",
            params,
            common.seed,
            common.trials,
            "reject",
            rejects,
            0.0,
            "completeness",
        )
    } else {
        let accepts = monte_carlo(common.seed, common.trials, |s| {
            once(s).map(|r| r.accepted()).unwrap_or(false)
        });
        let (bound, source) = sumcheck_bound(g.as_ref(), &strategy);
        ExperimentReport::new(
            "sumcheck",
            params,
            common.seed,
            common.trials,
            "accept",
            accepts,
            bound,
            source,
        )
    };
    io.report(&report, common.report_out.as_deref())
}

fn summary_text(t: &Transcript) -> String {
    let s = t.summary.as_ref().expect("summary");
    format!(
        "{}{} ({} rounds, {} field elements, {} bytes, prover ops {}, verifier ops {})",
        s.verdict,
        s.reason
            .as_ref()
            .map(|r| format!(": {r}"))
            .unwrap_or_default(),
        s.rounds,
        s.field_elements,
        s.bytes,
        s.prover_ops,
        s.verifier_ops
    )
}

fn gkr_bound(c: &LayeredCircuit) -> f64 {
    let p = c.modulus().value() as f64;
    (0..c.depth())
        .map(|i| {
            let (si, sn) = (c.log_width(i) as f64, c.log_width(i + 1) as f64);
            2.0 * (si + 2.0 * sn) + sn
        })
        .sum::<f64>()
        / p
}

fn cmd_gkr(
    common: &Common,
    circuit_path: &Path,
    input: &str,
    claim: Option<&str>,
    io: &mut Io<'_>,
) -> CliResult {
    check_trials(common.trials)?;
    let c = parse_circuit(&fs::read_to_string(circuit_path)?)?;
    let m = c.modulus();
    if common.modulus != MERSENNE_61 && common.modulus != m.value() {
        return Err(CliError::Usage(format!(
            "--modulus {} conflicts with the circuit's modulus {}",
            common.modulus,
            m.value()
        )));
    }
    let input = DataVector::new(read_values(m, input)?)?;
    let strategy = parse_gkr_strategy(&common.strategy, m)?;
    let truth = evaluate(&c, &input)?.outputs();
    let claimed = match claim {
        Some(text) => parse_values(m, text)?,
        None if matches!(strategy, GkrStrategy::CorruptOutput) => {
            let mut v = truth.clone();
            v[0] += m.one();
            v
        }
        None => truth.clone(),
    };
    let params = json!({
        "circuit": circuit_path.display().to_string(),
        "strategy": strategy.label(),
        "modulus": m.value(),
        "depth": c.depth(),
        "claimed_outputs": claimed.iter().map(|e| e.value()).collect::<Vec<_>>(),
    });
    let once = |seed| gkr_prove_verify(&c, &input, &claimed, seed, strategy.clone());
    if common.trials == 1 {
        let run = once(common.seed)?;
        write_transcript(&run.transcript, common.transcript_out.as_deref())?;
        io.note(&format!(
            "gkr {}: {}",
            strategy.label(),
            summary_text(&run.transcript)
        ));
        let s = run.transcript.summary.clone().expect("summary");
        let mut rec = json!({
            "protocol": "gkr",
            "seed": common.seed,
            "verdict": s.verdict,
            "rounds": s.rounds,
            "field_elements": s.field_elements,
            "bytes": s.bytes,
            "prover_ops": s.prover_ops,
            "verifier_ops": s.verifier_ops,
        });
        if let Some(r) = s.reason {
            rec["reason"] = json!(r);
        }
        if let (Value::Object(a), Value::Object(b)) = (&mut rec, params) {
            a.extend(b);
        }
        io.record(&rec, common.report_out.as_deref())?;
        return Ok(if run.accepted() { 0 } else { 1 });
    }
    write_transcript(
        &once(RandomSource::trial_seed(common.seed, 0))?.transcript,
        common.transcript_out.as_deref(),
    )?;
    let completeness = matches!(strategy, GkrStrategy::Honest) && claimed == truth;
    let accepted = |s| once(s).map(|r| r.accepted()).unwrap_or(false);
    let report = if completeness {
        let rejects = monte_carlo(common.seed, common.trials, |s| !accepted(s));
        ExperimentReport::new(
            "gkr",
            params,
            common.seed,
            common.trials,
            "reject",
            rejects,
            0.0,
            "completeness",
        )
    } else {
        let accepts = monte_carlo(common.seed, common.trials, accepted);
        ExperimentReport::new(
            "gkr",
            params,
            common.seed,
            common.trials,
            "accept",
            accepts,
            gkr_bound(&c),
            "sum_i (2(s_i+2s_{i+1}) + s_{i+1})/|F|",
        )
    };
    io.report(&report, common.report_out.as_deref())
}

fn load_formula(arg: &str) -> Result<Formula, CliError> {
    Ok(parse_formula(file_or_inline(arg)?.trim())?)
}

fn cmd_countsat(
    common: &Common,
    formula: &str,
    claim: Option<u64>,
    honest: bool,
    io: &mut Io<'_>,
) -> CliResult {
    let m = modulus(common)?;
    check_trials(common.trials)?;
    let f = load_formula(formula)?;
    let strategy = parse_sumcheck_strategy(&common.strategy, m)?;
    let count = count_models(&f)?;
    let claimed = if honest {
        count
    } else {
        claim.expect("clap requires one of the two")
    };
    let params = json!({
        "formula": f.to_string(),
        "vars": f.num_vars(),
        "size": f.size(),
        "strategy": strategy.label(),
        "modulus": m.value(),
        "claim": claimed,
        "count": count,
    });
    let once = |seed| countsat_protocol(&f, claimed, m, seed, strategy.clone());
    if common.trials == 1 {
        let run = once(common.seed)?;
        write_transcript(&run.transcript, common.transcript_out.as_deref())?;
        io.note(&format!(
            "countsat {f}: claim {claimed} (true {count}) -> {}",
            summary_text(&run.transcript)
        ));
        io.record(
            &run_record("countsat", common.seed, &run, params),
            common.report_out.as_deref(),
        )?;
        return Ok(if run.accepted() { 0 } else { 1 });
    }
    write_transcript(
        &once(RandomSource::trial_seed(common.seed, 0))?.transcript,
        common.transcript_out.as_deref(),
    )?;
    let accepted = |s| once(s).map(|r| r.accepted()).unwrap_or(false);
    let report = if strategy.is_honest() && claimed % m.value() == count % m.value() {
        let rejects = monte_carlo(common.seed, common.trials, |s| !accepted(s));
        ExperimentReport::new(
            "countsat",
            params,
            common.seed,
            common.trials,
            "reject",
            rejects,
            0.0,
            "completeness",
        )
    } else {
        let accepts = monte_carlo(common.seed, common.trials, accepted);
        let g = crate::countsat::arithmetize(&f, m);
        let (bound, source) = sumcheck_bound(&g, &strategy);
        ExperimentReport::new(
            "countsat",
            params,
            common.seed,
            common.trials,
            "accept",
            accepts,
            bound,
            source,
        )
    };
    io.report(&report, common.report_out.as_deref())
}

fn cmd_freivalds(common: &Common, inputs: &[String], io: &mut Io<'_>) -> CliResult {
    let m = modulus(common)?;
    check_trials(common.trials)?;
    let [a, b, c] = inputs else {
        return Err(CliError::Usage(
            "freivalds needs --input three times: A, B, C".into(),
        ));
    };
    let (a, b, c) = (read_matrix(m, a)?, read_matrix(m, b)?, read_matrix(m, c)?);
    let n = a.dim();
    let once = |seed| freivalds_verify(&a, &b, &c, &mut RandomSource::new(seed));
    let params = json!({ "n": n, "modulus": m.value() });
    if common.trials == 1 {
        let (res, ops) = crate::field::measure(|| once(common.seed));
        let v = res?;
        let accepted = v.0 == FreivaldsVerdict::Accept;
        io.note(&format!(
            "freivalds n={n}: {}",
            if accepted { "accept" } else { "reject" }
        ));
        io.record(
            &json!({
                "protocol": "freivalds",
                "seed": common.seed,
                "verdict": if accepted { "accept" } else { "reject" },
                "challenge": v.1.value(),
                "verifier_ops": ops.total(),
                "n": n,
                "modulus": m.value(),
            }),
            common.report_out.as_deref(),
        )?;
        return Ok(if accepted { 0 } else { 1 });
    }
    let correct = mat_mul(&a, &b)? == c;
    let accepted = |s| matches!(once(s), Ok((FreivaldsVerdict::Accept, _)));
    let report = if correct {
        let rejects = monte_carlo(common.seed, common.trials, |s| !accepted(s));
        ExperimentReport::new(
            "freivalds",
            params,
            common.seed,
            common.trials,
            "reject",
            rejects,
            0.0,
            "completeness",
        )
    } else {
        let accepts = monte_carlo(common.seed, common.trials, accepted);
        let bound = n as f64 / m.value() as f64;
        ExperimentReport::new(
            "freivalds",
            params,
            common.seed,
            common.trials,
            "accept",
            accepts,
            bound,
            "n/|F|",
        )
    };
    io.report(&report, common.report_out.as_deref())
}

fn cmd_equality(common: &Common, inputs: &[String], io: &mut Io<'_>) -> CliResult {
    let m = modulus(common)?;
    check_trials(common.trials)?;
    let [a, b] = inputs else {
        return Err(CliError::Usage("equality needs --input twice".into()));
    };
    let a = DataVector::new(read_values(m, a)?)?;
    let b = DataVector::new(read_values(m, b)?)?;
    let n = a.len();
    let once = |seed| equality_protocol(&a, &b, &mut RandomSource::new(seed));
    let params = json!({ "n": n, "modulus": m.value() });
    if common.trials == 1 {
        let (verdict, r) = once(common.seed)?;
        let equal = verdict == EqualityVerdict::Equal;
        let word = if equal { "equal" } else { "not-equal" };
        io.note(&format!("equality n={n}: {word} (r = {r})"));
        io.record(
            &json!({
                "protocol": "equality",
                "seed": common.seed,
                "verdict": word,
                "challenge": r.value(),
                "field_elements": 2,
                "bytes": 2 * m.element_bytes(),
                "n": n,
                "modulus": m.value(),
            }),
            common.report_out.as_deref(),
        )?;
        return Ok(if equal { 0 } else { 1 });
    }
    once(common.seed)?;
    let said_equal = |s| matches!(once(s), Ok((EqualityVerdict::Equal, _)));
    let report = if a == b {
        let misses = monte_carlo(common.seed, common.trials, |s| !said_equal(s));
        ExperimentReport::new(
            "equality",
            params,
            common.seed,
            common.trials,
            "not-equal",
            misses,
            0.0,
            "completeness",
        )
    } else {
        let hits = monte_carlo(common.seed, common.trials, said_equal);
        let bound = n as f64 / m.value() as f64;
        ExperimentReport::new(
            "equality",
            params,
            common.seed,
            common.trials,
            "equal",
            hits,
            bound,
            "n/|F|",
        )
    };
    io.report(&report, common.report_out.as_deref())
}

#[allow(clippy::too_many_arguments)]
fn cmd_qnr(
    n: u64,
    factors: Option<Vec<u64>>,
    a: u64,
    rounds: usize,
    cheat: bool,
    seed: u64,
    trials: u64,
    report_out: Option<&Path>,
    io: &mut Io<'_>,
) -> CliResult {
    check_trials(trials)?;
    let factors = match factors.as_deref() {
        None => None,
        Some([p, q]) => Some((*p, *q)),
        Some(_) => {
            return Err(CliError::Usage(
                "--factors takes exactly two primes: p,q".into(),
            ))
        }
    };
    let qm = QrModulus::new(n, factors)?;
    let prover = if cheat {
        QnrProver::Guessing
    } else {
        QnrProver::WithFactors
    };
    let params = json!({
        "modulus": n,
        "a": a,
        "rounds": rounds,
        "prover": if cheat { "guessing" } else { "with-factors" },
    });
    if trials == 1 {
        let s = qnr_protocol(&qm, a, rounds, prover, seed)?;
        let word = if s.accepted { "accept" } else { "reject" };
        io.note(&format!("qnr a={a} N={n} k={rounds}: {word}"));
        io.record(
            &json!({
                "protocol": "qnr",
                "seed": seed,
                "verdict": word,
                "challenges": s.challenges,
                "modulus": n,
                "a": a,
                "rounds": rounds,
            }),
            report_out,
        )?;
        return Ok(if s.accepted { 0 } else { 1 });
    }
    qnr_protocol(&qm, a, rounds, prover, seed)?;
    let accepted = |s| {
        qnr_protocol(&qm, a, rounds, prover, s)
            .map(|x| x.accepted)
            .unwrap_or(false)
    };
    let truly_nonresidue = match is_qr(a, &qm) {
        Ok(q) => Some(!q),
        Err(_) => None,
    };
    let report = if !cheat && truly_nonresidue == Some(true) {
        let rejects = monte_carlo(seed, trials, |s| !accepted(s));
        ExperimentReport::new(
            "qnr",
            params,
            seed,
            trials,
            "reject",
            rejects,
            0.0,
            "completeness",
        )
    } else {
        let accepts = monte_carlo(seed, trials, accepted);
        let bound = 0.5f64.powi(rounds as i32);
        ExperimentReport::new(
            "qnr", params, seed, trials, "accept", accepts, bound, "2^-k",
        )
    };
    io.report(&report, report_out)
}

fn cmd_replay(path: &Path, io: &mut Io<'_>) -> CliResult {
    let text = fs::read_to_string(path)?;
    match replay(&text)? {
        ReplayVerdict::Verified { verdict } => {
            io.note(&format!("replay: verified, verdict {verdict}"));
            io.record(&json!({"replay": "verified", "verdict": verdict}), None)?;
            Ok(if verdict == "accept" || verdict == "deferred" {
                0
            } else {
                1
            })
        }
        ReplayVerdict::TamperDetected { reason } => {
            io.note(&format!("replay: tamper detected: {reason}"));
            io.record(
                &json!({"replay": "tamper-detected", "reason": reason}),
                None,
            )?;
            Ok(1)
        }
    }
}

fn cmd_generate(what: Generate, out: Option<&Path>, io: &mut Io<'_>) -> CliResult {
    let text = match what {
        Generate::ProductTree {
            depth,
            width,
            modulus,
        } => {
            if depth == 0 || !width.is_power_of_two() || width >> depth == 0 {
                return Err(CliError::Usage(
                    "product tree needs depth >= 1 and a power-of-two width >= 2^depth".into(),
                ));
            }
            circuit::serialize(&product_tree(PrimeModulus::new(modulus)?, depth, width))
        }
        Generate::RandomCircuit {
            depth,
            width,
            seed,
            modulus,
        } => {
            if depth == 0 || width == 0 {
                return Err(CliError::Usage("depth and width must be positive".into()));
            }
            circuit::serialize(&random_circuit(
                PrimeModulus::new(modulus)?,
                depth,
                width,
                seed,
            ))
        }
        Generate::Formula { vars, size, seed } => {
            if vars == 0 || size == 0 {
                return Err(CliError::Usage("vars and size must be positive".into()));
            }
            format!("{}\n", random_formula(vars, size, seed))
        }
        Generate::Input {
            width,
            seed,
            modulus,
        } => {
            let m = PrimeModulus::new(modulus)?;
            let vals = RandomSource::new(seed).field_elements(m, width);
            let strs: Vec<String> = vals.iter().map(|v| v.value().to_string()).collect();
            format!("{}\n", strs.join(" "))
        }
    };
    match out {
        Some(p) => fs::write(p, &text)?,
        None => write!(io.out, "{text}")?,
    }
    Ok(0)
}
