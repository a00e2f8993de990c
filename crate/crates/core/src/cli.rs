//! Command-line interface.
//!
//! JSON goes to stdout, diagnostics to stderr. Exit codes: 0 for success or a
//! solving family, 1 for a negative finding, 2 for usage, input or capacity
//! errors.

use std::ffi::OsString;
use std::fs;
use std::io::{self, Read, Write};
use std::path::PathBuf;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::Serialize;
use serde_json::{json, Value};

use crate::decoder::{decode_generic, decode_optimal, MAX_BRUTE_FORCE_N};
use crate::error::Error;
use crate::model::{answers_for, AnswerSequence, ElementSet, MultiFamily, Scenario, Verdict};
use crate::search::{all_minimal_families, min_family_size_with, SearchOptions};
use crate::strategies::{
    adaptive_no_lie_search, binary_mask_family_exactly_one, multi_round_plan,
    optimal_one_lie_family, singleton_family_no_lie, two_round_plan, MultiRoundPlan,
    TruthfulOracle,
};
use crate::verifier::{restrict, verify, VerifyMode};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Success,
    Negative,
    Refusal,
}

pub fn exit_code(outcome: Outcome) -> u8 {
    match outcome {
        Outcome::Success => 0,
        Outcome::Negative => 1,
        Outcome::Refusal => 2,
    }
}

#[derive(Debug, Parser)]
#[command(name = "liar-search", version, about = "Find one excellent element despite one lying answer")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print a strategy
    Plan(PlanArgs),
    /// Decode an answer string against a family
    Decode(DecodeArgs),
    /// Run scenarios through a family and cross-check the decoders
    Simulate(SimulateArgs),
    /// Check whether a family solves the one-lie problem
    Verify(VerifyArgs),
    /// Find the smallest solving family by exhaustive search
    SearchMin(SearchArgs),
    /// Remove an element whose singleton is asked at least twice
    Restrict(RestrictArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum PlanMode {
    OneLie,
    NoLie,
    ExactlyOne,
    Adaptive,
    TwoRound,
    RRound,
}

#[derive(Debug, Args)]
struct PlanArgs {
    #[arg(long, value_enum)]
    mode: PlanMode,
    #[arg(long)]
    n: usize,
    /// Number of rounds (r-round mode)
    #[arg(long)]
    r: Option<usize>,
    /// Hidden excellent set, e.g. "2,5"; runs adaptive and round plans
    /// against it
    #[arg(long)]
    excellent: Option<String>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum DecodeMethod {
    Optimal,
    Generic,
}

#[derive(Debug, Args)]
struct DecodeArgs {
    /// Family JSON file ("-" for stdin)
    #[arg(long)]
    family: PathBuf,
    #[arg(long)]
    answers: String,
    #[arg(long, default_value_t = 1)]
    lie_budget: usize,
    #[arg(long, value_enum, default_value = "generic")]
    method: DecodeMethod,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("which").required(true).multiple(false).args(["exhaustive", "scenario", "sample"])))]
struct SimulateArgs {
    #[arg(long)]
    family: PathBuf,
    /// Every excellent set with no lie and with a lie at every position
    #[arg(long)]
    exhaustive: bool,
    /// One scenario, e.g. "{2},none" or "{1,3},4"
    #[arg(long)]
    scenario: Option<String>,
    /// This many random scenarios
    #[arg(long)]
    sample: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    lie_budget: usize,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[arg(long)]
    family: PathBuf,
    #[arg(long, conflicts_with_all = ["lemma", "both"])]
    semantic: bool,
    #[arg(long, conflicts_with = "both")]
    lemma: bool,
    #[arg(long)]
    both: bool,
}

#[derive(Debug, Args)]
struct SearchArgs {
    #[arg(long)]
    n: usize,
    /// Largest family size to try (default 2n + 1)
    #[arg(long)]
    max_m: Option<usize>,
    #[arg(long)]
    no_prune: bool,
    /// Also list every solving family of size 2n + 1, found without pruning
    #[arg(long)]
    all_minimal: bool,
}

#[derive(Debug, Args)]
struct RestrictArgs {
    #[arg(long)]
    family: PathBuf,
    #[arg(long)]
    element: usize,
}

struct Emit {
    json: Value,
    outcome: Outcome,
}

fn emit<T: Serialize>(value: &T, outcome: Outcome) -> Result<Emit, Error> {
    let json = serde_json::to_value(value).map_err(|e| Error::Input(e.to_string()))?;
    Ok(Emit { json, outcome })
}

/// Parses arguments, runs the command and returns the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let is_info = matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion);
            let rendered = e.render().to_string();
            if is_info {
                let _ = write!(stdout, "{rendered}");
                return exit_code(Outcome::Success);
            }
            let _ = write!(stderr, "{rendered}");
            return exit_code(Outcome::Refusal);
        }
    };
    match dispatch(cli.command, stderr) {
        Ok(Emit { json, outcome }) => {
            let _ = writeln!(stdout, "{json}");
            exit_code(outcome)
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            exit_code(Outcome::Refusal)
        }
    }
}

fn dispatch(command: Command, stderr: &mut dyn Write) -> Result<Emit, Error> {
    match command {
        Command::Plan(args) => cmd_plan(args),
        Command::Decode(args) => cmd_decode(args),
        Command::Simulate(args) => cmd_simulate(args, stderr),
        Command::Verify(args) => cmd_verify(args),
        Command::SearchMin(args) => cmd_search_min(args, stderr),
        Command::Restrict(args) => cmd_restrict(args),
    }
}

fn read_family(path: &PathBuf) -> Result<MultiFamily, Error> {
    let text = if path.as_os_str() == "-" {
        let mut buf = String::new();
        io::stdin()
            .read_to_string(&mut buf)
            .map_err(|e| Error::Input(format!("reading stdin: {e}")))?;
        buf
    } else {
        fs::read_to_string(path).map_err(|e| Error::Input(format!("reading {}: {e}", path.display())))?
    };
    serde_json::from_str(&text).map_err(|e| Error::Input(format!("family JSON: {e}")))
}

/// Parses "2,5", "{2,5}" or "{}" into a set.
fn parse_set(text: &str) -> Result<ElementSet, Error> {
    let inner = text.trim().trim_start_matches('{').trim_end_matches('}');
    let elements = inner
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<usize>().map_err(|_| Error::Input(format!("bad element {s:?}"))))
        .collect::<Result<Vec<_>, _>>()?;
    ElementSet::from_elements(elements)
}

/// Parses "{T},lie" where lie is "none" or a flat position.
fn parse_scenario(text: &str) -> Result<Scenario, Error> {
    let text = text.trim();
    let (set_part, lie_part) = if text.starts_with('{') {
        let close = text
            .find('}')
            .ok_or_else(|| Error::Input(format!("unclosed set in scenario {text:?}")))?;
        let rest = text[close + 1..].trim_start();
        let rest = rest
            .strip_prefix(',')
            .ok_or_else(|| Error::Input(format!("scenario {text:?} needs \"{{T}},lie\"")))?;
        (&text[..=close], rest)
    } else {
        text.rsplit_once(',')
            .ok_or_else(|| Error::Input(format!("scenario {text:?} needs \"{{T}},lie\"")))?
    };
    let excellent = parse_set(set_part)?;
    let lie = match lie_part.trim() {
        "none" | "None" | "" => None,
        p => Some(
            p.parse::<usize>()
                .map_err(|_| Error::Input(format!("bad lie position {p:?}")))?,
        ),
    };
    Ok(Scenario { excellent, lie })
}

fn cmd_plan(args: PlanArgs) -> Result<Emit, Error> {
    let n = args.n;
    let hidden = args.excellent.as_deref().map(parse_set).transpose()?;
    if let Some(t) = hidden {
        if !t.is_subset(ElementSet::full(n.min(crate::model::MAX_UNIVERSE))) {
            return Err(Error::Input(format!("excellent set {t} is outside 1..={n}")));
        }
    }
    let nonadaptive = |mode: &str, family: MultiFamily| -> Result<Emit, Error> {
        let mut json = serde_json::to_value(&family).map_err(|e| Error::Input(e.to_string()))?;
        json["mode"] = json!(mode);
        json["m"] = json!(family.len());
        Ok(Emit {
            json,
            outcome: Outcome::Success,
        })
    };
    match args.mode {
        PlanMode::OneLie => nonadaptive("one-lie", optimal_one_lie_family(n)?),
        PlanMode::NoLie => nonadaptive("no-lie", singleton_family_no_lie(n)?),
        PlanMode::ExactlyOne => nonadaptive("exactly-one", binary_mask_family_exactly_one(n)?),
        PlanMode::Adaptive => {
            crate::model::Universe::new(n)?;
            let hidden = hidden
                .ok_or_else(|| Error::Input("adaptive mode needs --excellent".into()))?;
            let mut oracle = TruthfulOracle::new(hidden);
            let outcome = adaptive_no_lie_search(&mut oracle, n);
            let asked: Vec<Vec<usize>> = oracle.asked().iter().map(|q| q.iter().collect()).collect();
            emit(
                &json!({
                    "mode": "adaptive",
                    "n": n,
                    "worst_case": crate::strategies::adaptive_complexity(n),
                    "asked": asked,
                    "questions": outcome.questions,
                    "verdict": outcome.verdict,
                }),
                Outcome::Success,
            )
        }
        PlanMode::TwoRound => round_plan_json("two-round", two_round_plan(n)?.as_multi_round(), hidden),
        PlanMode::RRound => {
            let r = args
                .r
                .ok_or_else(|| Error::Input("r-round mode needs --r".into()))?;
            round_plan_json("r-round", &multi_round_plan(n, r)?, hidden)
        }
    }
}

fn round_plan_json(mode: &str, plan: &MultiRoundPlan, hidden: Option<ElementSet>) -> Result<Emit, Error> {
    let mut json = json!({
        "mode": mode,
        "n": plan.n(),
        "rounds": plan.rounds(),
        "branching": plan.branching(),
        "block_sizes": plan.block_sizes(),
        "length": plan.length(),
        "length_bound": plan.length_bound(),
        "round1": plan.family_for(0, plan.initial_state()),
    });
    if let Some(t) = hidden {
        let run = plan.run(&mut TruthfulOracle::new(t));
        json["run"] = serde_json::to_value(&run).map_err(|e| Error::Input(e.to_string()))?;
    }
    emit(&json, Outcome::Success)
}

fn verdict_outcome(verdict: Verdict) -> Outcome {
    if verdict.is_decisive() {
        Outcome::Success
    } else {
        Outcome::Negative
    }
}

fn cmd_decode(args: DecodeArgs) -> Result<Emit, Error> {
    let family = read_family(&args.family)?;
    let answers: AnswerSequence = args.answers.parse()?;
    let verdict = match args.method {
        DecodeMethod::Generic => decode_generic(&family, &answers, args.lie_budget)?,
        DecodeMethod::Optimal => {
            if family != optimal_one_lie_family(family.n())? {
                return Err(Error::Input(
                    "the optimal decoder needs [n] once followed by each singleton twice".into(),
                ));
            }
            if args.lie_budget != 1 {
                return Err(Error::Input("the optimal decoder assumes a lie budget of 1".into()));
            }
            decode_optimal(family.n(), &answers)?
        }
    };
    emit(&verdict, verdict_outcome(verdict))
}

#[derive(Serialize)]
struct ScenarioResult {
    excellent: Vec<usize>,
    lie: Option<usize>,
    answers: AnswerSequence,
    verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    optimal_verdict: Option<Verdict>,
    correct: bool,
}

#[derive(Serialize)]
struct SimulationReport {
    scenarios: usize,
    mismatches: usize,
    cross_checked: bool,
    results: Vec<ScenarioResult>,
}

const MAX_REPORTED: usize = 20;
const MAX_SIMULATION_WORK: u64 = 1 << 30;

fn cmd_simulate(args: SimulateArgs, stderr: &mut dyn Write) -> Result<Emit, Error> {
    let family = read_family(&args.family)?;
    let n = family.n();
    let m = family.len();
    if n > MAX_BRUTE_FORCE_N {
        return Err(Error::Capacity(format!("simulation decodes by enumeration, n <= {MAX_BRUTE_FORCE_N}")));
    }
    let lie_options = if args.lie_budget == 0 { 0 } else { m };
    let scenarios: Vec<Scenario> = if let Some(text) = &args.scenario {
        vec![parse_scenario(text)?]
    } else if let Some(count) = args.sample {
        let mut rng = StdRng::seed_from_u64(args.seed);
        (0..count)
            .map(|_| {
                let bits = if n == 0 { 0 } else { rng.gen::<u128>() & ElementSet::full(n).bits() };
                let lie = rng.gen_range(0..=lie_options);
                Scenario {
                    excellent: ElementSet::from_bits(bits),
                    lie: (lie < lie_options).then_some(lie),
                }
            })
            .collect()
    } else {
        let total = (1u64 << n).saturating_mul(lie_options as u64 + 1);
        if total.saturating_mul(1 << n) > MAX_SIMULATION_WORK {
            return Err(Error::Capacity(format!(
                "exhaustive simulation of {total} scenarios on n = {n} is too large"
            )));
        }
        family
            .universe()
            .subsets()
            .flat_map(|t| {
                std::iter::once(Scenario::truthful(t))
                    .chain((0..lie_options).map(move |p| Scenario::with_lie(t, p)))
            })
            .collect()
    };
    for s in &scenarios {
        if !family.universe().contains(s.excellent) {
            return Err(Error::Input(format!("excellent set {} is outside 1..={n}", s.excellent)));
        }
    }

    let cross_check = args.lie_budget == 1 && n > 0 && family == optimal_one_lie_family(n)?;
    let mut mismatches = 0;
    let mut results = Vec::new();
    for s in &scenarios {
        let answers = answers_for(&family, s)?;
        let verdict = decode_generic(&family, &answers, args.lie_budget)?;
        let optimal_verdict = if cross_check {
            Some(decode_optimal(n, &answers)?)
        } else {
            None
        };
        let correct =
            verdict.is_correct_for(s.excellent) && optimal_verdict.is_none_or(|v| v == verdict);
        if !correct {
            mismatches += 1;
        }
        if scenarios.len() == 1 || (!correct && results.len() < MAX_REPORTED) {
            results.push(ScenarioResult {
                excellent: s.excellent.iter().collect(),
                lie: s.lie,
                answers,
                verdict,
                optimal_verdict,
                correct,
            });
        }
    }
    if mismatches > 0 {
        let _ = writeln!(stderr, "{mismatches} of {} scenarios decoded wrongly", scenarios.len());
    }
    let report = SimulationReport {
        scenarios: scenarios.len(),
        mismatches,
        cross_checked: cross_check,
        results,
    };
    emit(
        &report,
        if mismatches == 0 {
            Outcome::Success
        } else {
            Outcome::Negative
        },
    )
}

fn cmd_verify(args: VerifyArgs) -> Result<Emit, Error> {
    let family = read_family(&args.family)?;
    let mode = if args.semantic {
        VerifyMode::Semantic
    } else if args.lemma {
        VerifyMode::Lemma
    } else {
        VerifyMode::Both
    };
    let report = verify(&family, mode)?;
    let outcome = if report.solves {
        Outcome::Success
    } else {
        Outcome::Negative
    };
    emit(&report, outcome)
}

fn cmd_search_min(args: SearchArgs, stderr: &mut dyn Write) -> Result<Emit, Error> {
    let max_m = args.max_m.unwrap_or(2 * args.n + 1);
    let report = min_family_size_with(args.n, max_m, SearchOptions { prune: !args.no_prune })?;
    let mut json = serde_json::to_value(&report).map_err(|e| Error::Input(e.to_string()))?;
    if args.all_minimal {
        json["all_minimal"] = serde_json::to_value(all_minimal_families(args.n)?)
            .map_err(|e| Error::Input(e.to_string()))?;
    }
    let outcome = match report.min_size {
        Some(_) => Outcome::Success,
        None => {
            let _ = writeln!(stderr, "no solving family with at most {max_m} questions");
            Outcome::Negative
        }
    };
    Ok(Emit { json, outcome })
}

fn cmd_restrict(args: RestrictArgs) -> Result<Emit, Error> {
    let family = read_family(&args.family)?;
    emit(&restrict(&family, args.element)?, Outcome::Success)
}
