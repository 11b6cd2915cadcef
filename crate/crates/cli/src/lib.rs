//! Command-line front end: argument parsing, file I/O and certificate
//! documents. [`run`] is the whole tool minus process exit, so it can be
//! driven from tests.

pub mod document;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

use quiverkit_core::seed::{seed_apply, seed_initial};
use quiverkit_core::sequence::{
    explore_mutation_class, search_maximal_green, search_reddening, verify_maximal_green, verify_reddening, Verdict,
};
use quiverkit_core::structure::{
    certify_banff, covering_pairs, triangular_decompositions, validate_banff, verify_class_p_tree, BanffCertificate,
    ClassPTree,
};
use quiverkit_core::synthesis::{synthesize_from_banff, synthesize_from_tree, SynthesisResult};
use quiverkit_core::{Answer, ExhaustReason, Exhausted, MutationSequence, Quiver, SearchLimits, TriState};

use document::{
    BanffPayload, CertificateDocument, ExplorationPayload, Kind, Mode, Representative, SynthesisPayload,
    SynthesisSource, TreePayload, VerdictPayload,
};

pub const EXIT_YES: i32 = 0;
pub const EXIT_NO: i32 = 1;
pub const EXIT_UNKNOWN: i32 = 2;
pub const EXIT_INPUT: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    /// A certificate or claim failed replay.
    #[error("{0}")]
    Refuted(String),
}

impl CliError {
    fn code(&self) -> i32 {
        match self {
            CliError::Input(_) => EXIT_INPUT,
            CliError::Refuted(_) => EXIT_NO,
        }
    }
}

fn input(e: quiverkit_core::Error) -> CliError {
    CliError::Input(e.to_string())
}

/// Exit code and captured output of one invocation.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

#[derive(Parser, Debug)]
#[command(name = "quiverkit", version, about = "Quiver mutation, reddening sequences and Banff certificates")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct LimitArgs {
    /// Search budget as depth,states,milliseconds
    #[arg(long, value_name = "D,S,MS")]
    limits: Option<String>,
    #[arg(long)]
    max_depth: Option<usize>,
    #[arg(long)]
    max_states: Option<usize>,
    #[arg(long)]
    max_millis: Option<u64>,
    /// Accepted for compatibility; searches run on one thread.
    #[arg(long, value_name = "N")]
    threads: Option<usize>,
}

impl LimitArgs {
    fn resolve(&self) -> Result<SearchLimits, CliError> {
        let mut lim = SearchLimits::default();
        if let Some(spec) = &self.limits {
            let parts: Vec<&str> = spec.split(',').map(str::trim).collect();
            let bad = || CliError::Input(format!("--limits expects depth,states,millis, got {spec:?}"));
            if parts.len() != 3 {
                return Err(bad());
            }
            lim.max_depth = parts[0].parse().map_err(|_| bad())?;
            lim.max_states = parts[1].parse().map_err(|_| bad())?;
            lim.max_millis = parts[2].parse().map_err(|_| bad())?;
        }
        if let Some(d) = self.max_depth {
            lim.max_depth = d;
        }
        if let Some(s) = self.max_states {
            lim.max_states = s;
        }
        if let Some(ms) = self.max_millis {
            lim.max_millis = ms;
        }
        if self.threads == Some(0) {
            return Err(CliError::Input("--threads must be positive".into()));
        }
        lim.validate().map_err(input)?;
        Ok(lim)
    }
}

#[derive(Args, Debug, Clone)]
struct SeqArgs {
    /// Comma-separated 1-based vertices, e.g. 1,3,4,2
    #[arg(long, value_name = "SEQ", allow_hyphen_values = true)]
    seq: String,
}

impl SeqArgs {
    fn parse(&self) -> Result<MutationSequence, CliError> {
        self.seq.parse().map_err(input)
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Apply a mutation sequence and print the resulting quiver
    Mutate {
        file: PathBuf,
        #[command(flatten)]
        seq: SeqArgs,
        #[arg(long)]
        json: bool,
    },
    /// Check that a sequence is maximal green
    VerifyMgs {
        file: PathBuf,
        #[command(flatten)]
        seq: SeqArgs,
        #[arg(long)]
        json: bool,
    },
    /// Check that a sequence is reddening
    VerifyRed {
        file: PathBuf,
        #[command(flatten)]
        seq: SeqArgs,
        #[arg(long)]
        json: bool,
    },
    /// Search for a maximal green sequence
    SearchMgs {
        file: PathBuf,
        #[command(flatten)]
        limits: LimitArgs,
        #[arg(long)]
        json: bool,
    },
    /// Search for a reddening sequence
    SearchRed {
        file: PathBuf,
        #[command(flatten)]
        limits: LimitArgs,
        #[arg(long)]
        json: bool,
    },
    /// Enumerate the mutation class up to isomorphism
    Explore {
        file: PathBuf,
        #[command(flatten)]
        limits: LimitArgs,
        #[arg(long)]
        json: bool,
    },
    /// List arrows lying on no bi-infinite path
    CoveringPairs {
        file: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// List splits into two parts with all cross arrows one way
    Decompose {
        file: PathBuf,
        /// Stop after this many splits
        #[arg(long, default_value_t = 64)]
        max: usize,
        #[arg(long)]
        json: bool,
    },
    /// Decide whether a quiver is Banff, with a certificate
    CertifyBanff {
        file: PathBuf,
        #[command(flatten)]
        limits: LimitArgs,
        #[arg(long)]
        json: bool,
    },
    /// Check a class-P construction tree (JSON)
    VerifyTree {
        tree: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Build a reddening sequence from a Banff certificate or a class-P tree
    Synthesize {
        /// Quiver file, or a construction tree with --tree
        file: PathBuf,
        /// Treat the input as a class-P construction tree
        #[arg(long)]
        tree: bool,
        /// Banff certificate document to use instead of certifying
        #[arg(long, value_name = "DOC")]
        certificate: Option<PathBuf>,
        #[command(flatten)]
        limits: LimitArgs,
        #[arg(long)]
        json: bool,
    },
    /// Mutate the principal-coefficient seed and print it
    SeedMutate {
        file: PathBuf,
        #[command(flatten)]
        seq: SeqArgs,
        #[arg(long)]
        json: bool,
    },
    /// Revalidate a certificate document without searching
    Check { document: PathBuf },
}

struct Output {
    code: i32,
    text: String,
}

impl Output {
    fn new(code: i32, text: impl Into<String>) -> Self {
        Output { code, text: text.into() }
    }
}

/// Parses `argv` (including the program name) and runs one command.
pub fn run<I, T>(argv: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    Outcome { code: EXIT_YES, stdout: text, stderr: String::new() }
                }
                _ => Outcome { code: EXIT_INPUT, stdout: String::new(), stderr: text },
            };
        }
    };
    match dispatch(cli.command) {
        Ok(out) => Outcome { code: out.code, stdout: ensure_newline(out.text), stderr: String::new() },
        Err(e) => Outcome { code: e.code(), stdout: String::new(), stderr: format!("error: {e}\n") },
    }
}

fn ensure_newline(mut s: String) -> String {
    if !s.ends_with('\n') {
        s.push('\n');
    }
    s
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn load_quiver(path: &Path) -> Result<Quiver, CliError> {
    Quiver::parse(&read(path)?).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn load_tree(path: &Path) -> Result<ClassPTree, CliError> {
    serde_json::from_str(&read(path)?).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn answer_code(a: Answer) -> i32 {
    match a {
        Answer::Yes => EXIT_YES,
        Answer::No => EXIT_NO,
        Answer::Unknown => EXIT_UNKNOWN,
    }
}

fn unknown_line(e: &Exhausted) -> String {
    let budget = match e.reason {
        ExhaustReason::Depth => "depth",
        ExhaustReason::States => "state",
        ExhaustReason::Time => "time",
    };
    format!("UNKNOWN: limits exhausted ({budget} budget, {} states)", e.states)
}

fn sigma(p: &[usize]) -> String {
    let parts: Vec<String> = p.iter().map(usize::to_string).collect();
    format!("[{}]", parts.join(","))
}

fn dispatch(cmd: Command) -> Result<Output, CliError> {
    match cmd {
        Command::Mutate { file, seq, json } => {
            let q = load_quiver(&file)?;
            let r = q.apply_sequence(&seq.parse()?).map_err(input)?;
            Ok(Output::new(
                EXIT_YES,
                if json { serde_json::json!({ "quiver": r.to_text() }).to_string() } else { r.to_text() },
            ))
        }
        Command::VerifyMgs { file, seq, json } => verify_cmd(&file, &seq, json, Mode::MaximalGreen),
        Command::VerifyRed { file, seq, json } => verify_cmd(&file, &seq, json, Mode::Reddening),
        Command::SearchMgs { file, limits, json } => search_cmd(&file, &limits, json, Mode::MaximalGreen),
        Command::SearchRed { file, limits, json } => search_cmd(&file, &limits, json, Mode::Reddening),
        Command::Explore { file, limits, json } => explore_cmd(&file, &limits, json),
        Command::CoveringPairs { file, json } => {
            let q = load_quiver(&file)?;
            let pairs = covering_pairs(&q);
            let code = if pairs.is_empty() { EXIT_NO } else { EXIT_YES };
            let text = if json {
                serde_json::to_string_pretty(&pairs).unwrap()
            } else if pairs.is_empty() {
                "no covering pairs".into()
            } else {
                pairs.iter().map(|p| format!("{} -> {}", p.i, p.j)).collect::<Vec<_>>().join("\n")
            };
            Ok(Output::new(code, text))
        }
        Command::Decompose { file, max, json } => {
            let q = load_quiver(&file)?;
            let splits = triangular_decompositions(&q, max);
            let code = if splits.is_empty() { EXIT_NO } else { EXIT_YES };
            let text = if json {
                let list: Vec<_> =
                    splits.iter().map(|(a, b)| serde_json::json!({ "source": a, "target": b })).collect();
                serde_json::to_string_pretty(&list).unwrap()
            } else if splits.is_empty() {
                "no triangular decompositions".into()
            } else {
                splits.iter().map(|(a, b)| format!("{a:?} -> {b:?}")).collect::<Vec<_>>().join("\n")
            };
            Ok(Output::new(code, text))
        }
        Command::CertifyBanff { file, limits, json } => banff_cmd(&file, &limits, json),
        Command::VerifyTree { tree, json } => tree_cmd(&tree, json),
        Command::Synthesize { file, tree, certificate, limits, json } => {
            synthesize_cmd(&file, tree, certificate.as_deref(), &limits, json)
        }
        Command::SeedMutate { file, seq, json } => {
            let q = load_quiver(&file)?;
            let seed = seed_apply(&seed_initial(&q).map_err(input)?, seq.parse()?.as_slice()).map_err(input)?;
            let text = if json { serde_json::to_string_pretty(&seed.report()).unwrap() } else { seed.to_string() };
            Ok(Output::new(EXIT_YES, text))
        }
        Command::Check { document } => {
            let doc = CertificateDocument::parse(&read(&document)?)?;
            let answer = document::check(&doc)?;
            let kind = serde_json::to_value(doc.kind).unwrap();
            let kind = kind.as_str().unwrap_or("unknown");
            Ok(Output::new(
                EXIT_YES,
                format!("VALID: {kind} document (answer: {})", format!("{answer:?}").to_lowercase()),
            ))
        }
    }
}

fn verdict_lines(mode: Mode, v: &Verdict) -> String {
    let name = match mode {
        Mode::MaximalGreen => "MAXIMAL GREEN",
        Mode::Reddening => "REDDENING",
    };
    if v.ok {
        let p = v.permutation.as_deref().unwrap_or_default();
        format!("{name} verified; final quiver ≅ coframe via σ\nσ = {}", sigma(p))
    } else {
        format!("NOT {name}: {}", v.failure_reason.as_deref().unwrap_or("unknown reason"))
    }
}

fn verify_cmd(file: &Path, seq: &SeqArgs, json: bool, mode: Mode) -> Result<Output, CliError> {
    let q = load_quiver(file)?;
    let s = seq.parse()?;
    let v = match mode {
        Mode::MaximalGreen => verify_maximal_green(&q, &s),
        Mode::Reddening => verify_reddening(&q, &s),
    }
    .map_err(input)?;
    let code = if v.ok { EXIT_YES } else { EXIT_NO };
    if json {
        let payload = VerdictPayload::Sequence {
            mode,
            sequence: s,
            ok: v.ok,
            permutation: v.permutation.clone(),
            failure_reason: v.failure_reason.clone(),
            failing_step: v.failing_step,
        };
        return Ok(Output::new(
            code,
            CertificateDocument::new(Kind::Verdict, &q, payload, SearchLimits::default()).to_json(),
        ));
    }
    Ok(Output::new(code, verdict_lines(mode, &v)))
}

fn search_cmd(file: &Path, limits: &LimitArgs, json: bool, mode: Mode) -> Result<Output, CliError> {
    let q = load_quiver(file)?;
    let lim = limits.resolve()?;
    let result = match mode {
        Mode::MaximalGreen => search_maximal_green(&q, &lim),
        Mode::Reddening => search_reddening(&q, &lim),
    }
    .map_err(input)?;
    let code = answer_code(result.answer());
    let (payload, text) = match result {
        TriState::Yes(w) => {
            let text = format!("FOUND {}\n{}", w.sequence, verdict_lines(mode, &w.verdict));
            (
                VerdictPayload::Search {
                    mode,
                    answer: Answer::Yes,
                    witness: Some(w.sequence),
                    closure: None,
                    exhausted: None,
                },
                text,
            )
        }
        TriState::No(c) => {
            let text = format!("NONE: search space closed after {} states", c.paths.len());
            (
                VerdictPayload::Search { mode, answer: Answer::No, witness: None, closure: Some(c), exhausted: None },
                text,
            )
        }
        TriState::Unknown(e) => {
            let text = unknown_line(&e);
            (
                VerdictPayload::Search {
                    mode,
                    answer: Answer::Unknown,
                    witness: None,
                    closure: None,
                    exhausted: Some(e),
                },
                text,
            )
        }
    };
    if json {
        return Ok(Output::new(code, CertificateDocument::new(Kind::Verdict, &q, payload, lim).to_json()));
    }
    Ok(Output::new(code, text))
}

fn explore_cmd(file: &Path, limits: &LimitArgs, json: bool) -> Result<Output, CliError> {
    let q = load_quiver(file)?;
    let lim = limits.resolve()?;
    let class = explore_mutation_class(&q, &lim).map_err(input)?;
    let code = if class.closed { EXIT_YES } else { EXIT_UNKNOWN };
    if json {
        let payload = ExplorationPayload {
            closed: class.closed,
            representatives: class
                .representatives
                .iter()
                .map(|(r, p)| Representative { path: p.clone(), quiver: r.to_text() })
                .collect(),
            exhausted: class.exhausted.clone(),
        };
        return Ok(Output::new(code, CertificateDocument::new(Kind::Exploration, &q, payload, lim).to_json()));
    }
    let mut text = String::new();
    match &class.exhausted {
        None => writeln!(text, "CLOSED: {} representatives", class.representatives.len()).unwrap(),
        Some(e) => {
            writeln!(text, "{}; {} representatives so far", unknown_line(e), class.representatives.len()).unwrap()
        }
    }
    for (r, p) in &class.representatives {
        let acyclic = if r.acyclicity().is_acyclic() { " (acyclic)" } else { "" };
        writeln!(text, "{p}{acyclic}: {}", r.to_text().lines().skip(1).collect::<Vec<_>>().join("; ")).unwrap();
    }
    Ok(Output::new(code, text))
}

fn banff_cmd(file: &Path, limits: &LimitArgs, json: bool) -> Result<Output, CliError> {
    let q = load_quiver(file)?;
    let lim = limits.resolve()?;
    let outcome = certify_banff(&q, &lim).map_err(input)?;
    let code = answer_code(outcome.answer());
    let (payload, text) = match outcome {
        TriState::Yes(c) => {
            let text = format!("BANFF\n{}", describe_banff(&c, 0));
            (BanffPayload { answer: Answer::Yes, certificate: Some(c), refutation: None, exhausted: None }, text)
        }
        TriState::No(r) => {
            let text = format!(
                "NOT BANFF: mutation class closed with {} representatives; every covering pair refuted",
                r.class.paths.len()
            );
            (BanffPayload { answer: Answer::No, certificate: None, refutation: Some(r), exhausted: None }, text)
        }
        TriState::Unknown(e) => {
            let text = unknown_line(&e);
            (BanffPayload { answer: Answer::Unknown, certificate: None, refutation: None, exhausted: Some(e) }, text)
        }
    };
    if json {
        return Ok(Output::new(code, CertificateDocument::new(Kind::Banff, &q, payload, lim).to_json()));
    }
    Ok(Output::new(code, text))
}

fn describe_banff(c: &BanffCertificate, depth: usize) -> String {
    let pad = "  ".repeat(depth);
    match c {
        BanffCertificate::AcyclicLeaf { order } => format!("{pad}acyclic, order {order}"),
        BanffCertificate::MutationAcyclicLeaf { witness } => format!("{pad}mutation-acyclic via {witness}"),
        BanffCertificate::CoveringSplit { mutations, pair, without_i, without_j } => format!(
            "{pad}after {mutations}: covering pair ({}, {})\n{pad}without {}:\n{}\n{pad}without {}:\n{}",
            pair.i,
            pair.j,
            pair.i,
            describe_banff(without_i, depth + 1),
            pair.j,
            describe_banff(without_j, depth + 1)
        ),
    }
}

fn tree_cmd(path: &Path, json: bool) -> Result<Output, CliError> {
    let tree = load_tree(path)?;
    let report = match verify_class_p_tree(&tree) {
        Ok(r) => r,
        Err(e) => return Ok(Output::new(EXIT_NO, format!("INVALID TREE: {e}"))),
    };
    if json {
        let payload = TreePayload { tree, in_p: report.in_p, in_p_prime: report.in_p_prime, min_m: report.min_m };
        return Ok(Output::new(
            EXIT_YES,
            CertificateDocument::new(Kind::ClassPTree, &report.quiver, payload, SearchLimits::default()).to_json(),
        ));
    }
    let prime = match report.min_m {
        Some(m) => format!("in P' (P'_m for m >= {m})"),
        None => "not a P' construction".into(),
    };
    Ok(Output::new(EXIT_YES, format!("VALID TREE: in P; {prime}\n{}", report.quiver.to_text())))
}

fn synthesize_cmd(
    file: &Path,
    tree: bool,
    certificate: Option<&Path>,
    limits: &LimitArgs,
    json: bool,
) -> Result<Output, CliError> {
    let lim = limits.resolve()?;
    let synthesis_error = |e: quiverkit_core::Error| match e {
        quiverkit_core::Error::SynthesisFailed(_) => CliError::Refuted(e.to_string()),
        other => input(other),
    };
    let (q, result, source): (Quiver, SynthesisResult, SynthesisSource) = if tree {
        let t = load_tree(file)?;
        let q = verify_class_p_tree(&t).map_err(input)?.quiver;
        let r = synthesize_from_tree(&t, &lim).map_err(synthesis_error)?;
        (q, r, SynthesisSource::Tree)
    } else {
        let q = load_quiver(file)?;
        let cert = match certificate {
            Some(doc_path) => {
                let doc = CertificateDocument::parse(&read(doc_path)?)?;
                if doc.kind != Kind::Banff {
                    return Err(CliError::Input("--certificate expects a banff document".into()));
                }
                let payload: BanffPayload =
                    serde_json::from_value(doc.payload).map_err(|e| CliError::Input(format!("banff payload: {e}")))?;
                let cert = payload.certificate.ok_or_else(|| CliError::Input("document has no certificate".into()))?;
                validate_banff(&q, &cert).map_err(|e| CliError::Refuted(e.to_string()))?;
                cert
            }
            None => match certify_banff(&q, &lim).map_err(input)? {
                TriState::Yes(c) => c,
                TriState::No(_) => return Ok(Output::new(EXIT_NO, "NOT BANFF: no certificate to synthesize from")),
                TriState::Unknown(e) => return Ok(Output::new(EXIT_UNKNOWN, unknown_line(&e))),
            },
        };
        let r = synthesize_from_banff(&q, &cert, &lim).map_err(synthesis_error)?;
        (q, r, SynthesisSource::Banff)
    };
    let permutation = result.verdict.permutation.clone().unwrap_or_default();
    if json {
        let payload =
            SynthesisPayload { source, sequence: result.sequence, permutation, derivation: result.derivation };
        return Ok(Output::new(EXIT_YES, CertificateDocument::new(Kind::Synthesis, &q, payload, lim).to_json()));
    }
    Ok(Output::new(
        EXIT_YES,
        format!(
            "REDDENING {} (length {}, {} derivation steps)\n{}",
            result.sequence,
            result.sequence.len(),
            result.derivation.len(),
            verdict_lines(Mode::Reddening, &result.verdict)
        ),
    ))
}
