//! The versioned JSON certificate format and its search-free checker.

use serde::{de::DeserializeOwned, Deserialize, Serialize};
use serde_json::Value;

use quiverkit_core::search::check_closure;
use quiverkit_core::sequence::{validate_no_sequence, verify_maximal_green, verify_reddening};
use quiverkit_core::structure::{
    validate_banff, validate_non_banff, verify_class_p_tree, BanffCertificate, ClassPTree, NonBanffCertificate,
};
use quiverkit_core::synthesis::DerivationStep;
use quiverkit_core::{Answer, Closure, Exhausted, MoveRule, MutationSequence, Quiver, SearchLimits};

use crate::CliError;

pub const SCHEMA_VERSION: &str = "1";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    Verdict,
    Banff,
    ClassPTree,
    Synthesis,
    Exploration,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CertificateDocument {
    pub schema_version: String,
    pub kind: Kind,
    /// The quiver in the text format.
    pub quiver: String,
    pub payload: Value,
    pub limits: SearchLimits,
    pub tool_version: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    MaximalGreen,
    Reddening,
}

/// Payload of a `verdict` document.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "claim", rename_all = "snake_case", deny_unknown_fields)]
pub enum VerdictPayload {
    /// The outcome of checking one given sequence.
    Sequence {
        mode: Mode,
        sequence: MutationSequence,
        ok: bool,
        permutation: Option<Vec<usize>>,
        failure_reason: Option<String>,
        failing_step: Option<usize>,
    },
    /// The outcome of a bounded search for any sequence.
    Search {
        mode: Mode,
        answer: Answer,
        witness: Option<MutationSequence>,
        closure: Option<Closure>,
        exhausted: Option<Exhausted>,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BanffPayload {
    pub answer: Answer,
    pub certificate: Option<BanffCertificate>,
    pub refutation: Option<NonBanffCertificate>,
    pub exhausted: Option<Exhausted>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TreePayload {
    pub tree: ClassPTree,
    pub in_p: bool,
    pub in_p_prime: bool,
    pub min_m: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SynthesisSource {
    Banff,
    Tree,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SynthesisPayload {
    pub source: SynthesisSource,
    pub sequence: MutationSequence,
    pub permutation: Vec<usize>,
    pub derivation: Vec<DerivationStep>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Representative {
    pub path: MutationSequence,
    pub quiver: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExplorationPayload {
    pub closed: bool,
    pub representatives: Vec<Representative>,
    pub exhausted: Option<Exhausted>,
}

impl CertificateDocument {
    pub fn new(kind: Kind, quiver: &Quiver, payload: impl Serialize, limits: SearchLimits) -> Self {
        CertificateDocument {
            schema_version: SCHEMA_VERSION.into(),
            kind,
            quiver: quiver.to_text(),
            payload: serde_json::to_value(payload).expect("payload serializes"),
            limits,
            tool_version: TOOL_VERSION.into(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("document serializes")
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let doc: CertificateDocument =
            serde_json::from_str(text).map_err(|e| CliError::Input(format!("certificate document: {e}")))?;
        if doc.schema_version != SCHEMA_VERSION {
            return Err(CliError::Input(format!("unsupported schema version {:?}", doc.schema_version)));
        }
        Ok(doc)
    }

    fn payload<T: DeserializeOwned>(&self) -> Result<T, CliError> {
        serde_json::from_value(self.payload.clone())
            .map_err(|e| CliError::Input(format!("{:?} payload: {e}", self.kind)))
    }
}

fn refuted(msg: impl Into<String>) -> CliError {
    CliError::Refuted(msg.into())
}

fn core(e: quiverkit_core::Error) -> CliError {
    CliError::Refuted(e.to_string())
}

fn expect(cond: bool, msg: &str) -> Result<(), CliError> {
    if cond {
        Ok(())
    } else {
        Err(refuted(msg))
    }
}

/// Revalidates a document by replaying its evidence; no search is run.
/// Returns the claimed answer on success.
pub fn check(doc: &CertificateDocument) -> Result<Answer, CliError> {
    doc.limits.validate().map_err(|e| CliError::Input(e.to_string()))?;
    let q = Quiver::parse(&doc.quiver).map_err(|e| CliError::Input(format!("document quiver: {e}")))?;
    match doc.kind {
        Kind::Verdict => check_verdict(&q, doc.payload()?),
        Kind::Banff => check_banff(&q, doc.payload()?),
        Kind::ClassPTree => check_tree(&q, doc.payload()?),
        Kind::Synthesis => check_synthesis(&q, doc.payload()?),
        Kind::Exploration => check_exploration(&q, doc.payload()?),
    }
}

fn check_verdict(q: &Quiver, p: VerdictPayload) -> Result<Answer, CliError> {
    let verify = |mode: Mode, s: &MutationSequence| match mode {
        Mode::MaximalGreen => verify_maximal_green(q, s),
        Mode::Reddening => verify_reddening(q, s),
    };
    match p {
        VerdictPayload::Sequence { mode, sequence, ok, permutation, failure_reason, failing_step } => {
            let v = verify(mode, &sequence).map_err(core)?;
            expect(v.ok == ok, "recorded outcome differs from replay")?;
            expect(v.permutation == permutation, "recorded permutation differs from replay")?;
            expect(v.failure_reason == failure_reason, "recorded failure reason differs from replay")?;
            expect(v.failing_step == failing_step, "recorded failing step differs from replay")?;
            Ok(if ok { Answer::Yes } else { Answer::No })
        }
        VerdictPayload::Search { mode, answer, witness, closure, exhausted } => {
            match (answer, witness, closure, exhausted) {
                (Answer::Yes, Some(w), None, None) => {
                    expect(verify(mode, &w).map_err(core)?.ok, "witness does not verify")?;
                }
                (Answer::No, None, Some(c), None) => {
                    validate_no_sequence(q, mode == Mode::MaximalGreen, &c).map_err(core)?;
                }
                (Answer::Unknown, None, None, Some(_)) => {}
                _ => return Err(refuted("evidence does not match the answer")),
            }
            Ok(answer)
        }
    }
}

fn check_banff(q: &Quiver, p: BanffPayload) -> Result<Answer, CliError> {
    match (p.answer, &p.certificate, &p.refutation, &p.exhausted) {
        (Answer::Yes, Some(c), None, None) => validate_banff(q, c).map_err(core)?,
        (Answer::No, None, Some(r), None) => validate_non_banff(q, r).map_err(core)?,
        (Answer::Unknown, None, None, Some(_)) => {}
        _ => return Err(refuted("evidence does not match the answer")),
    }
    Ok(p.answer)
}

fn check_tree(q: &Quiver, p: TreePayload) -> Result<Answer, CliError> {
    let report = verify_class_p_tree(&p.tree).map_err(core)?;
    expect(report.quiver == *q, "tree builds a different quiver")?;
    expect(
        report.in_p == p.in_p && report.in_p_prime == p.in_p_prime && report.min_m == p.min_m,
        "recorded class membership differs from the tree",
    )?;
    Ok(Answer::Yes)
}

fn check_synthesis(q: &Quiver, p: SynthesisPayload) -> Result<Answer, CliError> {
    let v = verify_reddening(q, &p.sequence).map_err(core)?;
    expect(v.ok, "sequence is not reddening")?;
    expect(v.permutation.as_ref() == Some(&p.permutation), "recorded permutation differs from replay")?;
    Ok(Answer::Yes)
}

fn check_exploration(q: &Quiver, p: ExplorationPayload) -> Result<Answer, CliError> {
    expect(p.closed == p.exhausted.is_none(), "closed documents carry no exhaustion record and vice versa")?;
    for r in &p.representatives {
        let reached = q.apply_sequence(&r.path).map_err(core)?;
        let listed = Quiver::parse(&r.quiver).map_err(|e| CliError::Input(e.to_string()))?;
        expect(reached == listed, &format!("path {} does not reach the listed quiver", r.path))?;
    }
    if p.closed {
        let closure = Closure { paths: p.representatives.iter().map(|r| r.path.clone()).collect() };
        check_closure(q, MoveRule::Any, &closure).map_err(core)?;
        Ok(Answer::Yes)
    } else {
        Ok(Answer::Unknown)
    }
}
