//! Command implementations behind the `realembed` binary.
//!
//! Exit codes: 0 when verification passes, 1 on unreadable or invalid
//! input, 2 when a verification or embedding validity check fails.

pub mod document;
mod render;

use std::path::{Path, PathBuf};
use std::time::SystemTime;

use serde::Serialize;

use realembed::embedding::suite::{run_algebra_suite, AlgebraReport, Fault, SuiteConfig};
use realembed::embedding::{EmbeddingConvention, MAX_FOLDS};
use realembed::matrix::DEFAULT_TOL;
use realembed::network::{
    embed_network, verify_equivalence, ComplexScenario, EmbeddingCertificate, EquivalenceReport,
};
use realembed::protocol::{
    embed_protocol, verify_protocol_equivalence, ComplexProtocol, ProtocolCertificate,
    ProtocolEquivalenceReport,
};
use realembed::witness::{evaluate_witness, WitnessInstance, WitnessReport};

pub use document::{parse, Document, Kind, ProtocolBundle, ScenarioBundle};

pub const EXIT_PASS: u8 = 0;
pub const EXIT_INPUT: u8 = 1;
pub const EXIT_FAIL: u8 = 2;

/// Seed for randomized suites when `REALEMBED_SEED` is unset.
pub const DEFAULT_SEED: u64 = 0;
pub const SEED_VAR: &str = "REALEMBED_SEED";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Text,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Command {
    CheckAlgebra,
    Verify { input: PathBuf },
    Embed { input: PathBuf },
    Witness { input: Option<PathBuf> },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::CheckAlgebra => "check-algebra",
            Command::Verify { .. } => "verify",
            Command::Embed { .. } => "embed",
            Command::Witness { .. } => "witness",
        }
    }

    fn input(&self) -> Option<&Path> {
        match self {
            Command::CheckAlgebra | Command::Witness { input: None } => None,
            Command::Verify { input }
            | Command::Embed { input }
            | Command::Witness { input: Some(input) } => Some(input),
        }
    }

    fn default_tol(&self) -> f64 {
        match self {
            Command::CheckAlgebra => SuiteConfig::default().tol,
            Command::Witness { .. } => 1e-12,
            _ => DEFAULT_TOL,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub tol: Option<f64>,
    pub out: Option<PathBuf>,
    pub format: Format,
    pub max_fold: Option<usize>,
    pub threads: Option<usize>,
    pub seed: u64,
    pub fault: Option<Fault>,
}

impl RunConfig {
    pub fn new(command: Command) -> Self {
        RunConfig {
            command,
            tol: None,
            out: None,
            format: Format::Json,
            max_fold: None,
            threads: None,
            seed: DEFAULT_SEED,
            fault: None,
        }
    }

    pub fn tol(&self) -> f64 {
        self.tol.unwrap_or_else(|| self.command.default_tol())
    }
}

/// A command that could not produce a verdict, or whose verdict is a failure
/// severe enough to stop (an invalid embedded object).
#[derive(Clone, Debug, PartialEq)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn input(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_INPUT,
            message: message.into(),
        }
    }
}

impl From<realembed::Error> for Failure {
    fn from(e: realembed::Error) -> Self {
        let code = match e {
            realembed::Error::EmbeddingValidation(_) => EXIT_FAIL,
            _ => EXIT_INPUT,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

/// What a command produced.
#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub code: u8,
    /// The report in the requested format.
    pub report: String,
    /// File written by `embed`.
    pub artifact: Option<String>,
    /// One line per failed check, for stderr.
    pub diagnostics: Vec<String>,
}

/// Common report header. Same input and flags give byte-identical JSON
/// apart from `timestamp`.
#[derive(Serialize)]
struct Envelope<'a, R: Serialize> {
    command: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    input: Option<String>,
    timestamp: String,
    tolerance: f64,
    convention: EmbeddingConvention,
    passes: bool,
    report: &'a R,
}

#[derive(Serialize)]
pub struct ScenarioVerification {
    pub certificate: EmbeddingCertificate,
    pub equivalence: EquivalenceReport,
}

#[derive(Serialize)]
pub struct ProtocolVerification {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<ProtocolCertificate>,
    pub equivalence: ProtocolEquivalenceReport,
}

fn timestamp() -> String {
    humantime::format_rfc3339_seconds(SystemTime::now()).to_string()
}

fn max_fold(cfg: &RunConfig) -> Result<usize, Failure> {
    let n = cfg.max_fold.unwrap_or(MAX_FOLDS);
    if n == 0 || n > MAX_FOLDS {
        return Err(Failure::input(format!(
            "--max-fold must be in 1..={MAX_FOLDS}, got {n}"
        )));
    }
    Ok(n)
}

fn check_folds(needed: usize, cfg: &RunConfig) -> Result<(), Failure> {
    let limit = max_fold(cfg)?;
    if needed > limit {
        return Err(Failure::input(format!(
            "input needs {needed} phase folds, above the limit of {limit}"
        )));
    }
    Ok(())
}

fn read_document(path: &Path) -> Result<Document, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
    parse(&text).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn scenario_folds(s: &ComplexScenario) -> Result<usize, Failure> {
    Ok(s.layout()?.subsystem_dims.len())
}

fn finish<R: Serialize>(
    cfg: &RunConfig,
    convention: EmbeddingConvention,
    passes: bool,
    body: &R,
    text: String,
    diagnostics: Vec<String>,
) -> Outcome {
    let report = match cfg.format {
        Format::Json => {
            let env = Envelope {
                command: cfg.command.name(),
                input: cfg.command.input().map(|p| p.display().to_string()),
                timestamp: timestamp(),
                tolerance: cfg.tol(),
                convention,
                passes,
                report: body,
            };
            serde_json::to_string_pretty(&env).expect("reports serialize") + "\n"
        }
        Format::Text => text,
    };
    Outcome {
        code: if passes { EXIT_PASS } else { EXIT_FAIL },
        report,
        artifact: None,
        diagnostics,
    }
}

fn check_algebra(cfg: &RunConfig) -> Result<Outcome, Failure> {
    let suite = SuiteConfig {
        max_fold: cfg.max_fold.unwrap_or(SuiteConfig::default().max_fold),
        seed: cfg.seed,
        tol: cfg.tol(),
        fault: cfg.fault,
        ..SuiteConfig::default()
    };
    if suite.max_fold == 0 || suite.max_fold > MAX_FOLDS {
        return Err(Failure::input(format!(
            "--max-fold must be in 1..={MAX_FOLDS}, got {}",
            suite.max_fold
        )));
    }
    let report: AlgebraReport = run_algebra_suite(&suite)?;
    let diagnostics = report
        .failures()
        .map(|c| {
            format!(
                "{} identity failed: {} (deviation {:.3e} > {:.1e})",
                c.group, c.identity, c.deviation, c.bound
            )
        })
        .collect();
    let text = render::algebra(&report);
    Ok(finish(
        cfg,
        EmbeddingConvention::new(suite.max_fold),
        report.passes,
        &report,
        text,
        diagnostics,
    ))
}

fn verify_scenario(cfg: &RunConfig, qt: &ComplexScenario) -> Result<Outcome, Failure> {
    check_folds(scenario_folds(qt)?, cfg)?;
    let (real, certificate) = embed_network(qt, cfg.tol())?;
    let equivalence = verify_equivalence(qt, &real, cfg.tol())?;
    let body = ScenarioVerification {
        certificate,
        equivalence,
    };
    finish_scenario(cfg, body)
}

fn finish_scenario(cfg: &RunConfig, body: ScenarioVerification) -> Result<Outcome, Failure> {
    let eq = &body.equivalence;
    let mut diagnostics = Vec::new();
    if !eq.passes {
        diagnostics.push(format!(
            "max deviation {:.3e} exceeds tolerance {:.1e}",
            eq.max_deviation, eq.tol
        ));
    }
    let text = render::scenario(&body);
    Ok(finish(
        cfg,
        eq.convention.clone(),
        eq.passes,
        &body,
        text,
        diagnostics,
    ))
}

fn verify_protocol(cfg: &RunConfig, qt: &ComplexProtocol) -> Result<Outcome, Failure> {
    check_folds(qt.parties(), cfg)?;
    let (real, certificate) = embed_protocol(qt, cfg.tol())?;
    let equivalence = verify_protocol_equivalence(qt, &real, cfg.tol())?;
    finish_protocol(
        cfg,
        qt.parties(),
        ProtocolVerification {
            certificate: Some(certificate),
            equivalence,
        },
    )
}

fn finish_protocol(
    cfg: &RunConfig,
    parties: usize,
    body: ProtocolVerification,
) -> Result<Outcome, Failure> {
    let eq = &body.equivalence;
    let mut diagnostics = Vec::new();
    if !eq.passes {
        diagnostics.push(format!(
            "max deviation {:.3e} exceeds tolerance {:.1e}",
            eq.max_deviation, eq.tol
        ));
    }
    let text = render::protocol(&body);
    Ok(finish(
        cfg,
        EmbeddingConvention::new(parties),
        eq.passes,
        &body,
        text,
        diagnostics,
    ))
}

fn witness_outcome(cfg: &RunConfig, w: &WitnessInstance) -> Result<Outcome, Failure> {
    let report: WitnessReport = evaluate_witness(w, cfg.tol())?;
    let mut diagnostics = Vec::new();
    if !report.passes {
        diagnostics.push(format!(
            "witness failed: local deviation {:.3e}, global deviation {:.3e}",
            report.local_max_deviation, report.global_deviation
        ));
    }
    let text = render::witness(&report);
    Ok(finish(
        cfg,
        EmbeddingConvention::new(2),
        report.passes,
        &report,
        text,
        diagnostics,
    ))
}

fn verify(cfg: &RunConfig, input: &Path) -> Result<Outcome, Failure> {
    match read_document(input)? {
        Document::Scenario(d) => verify_scenario(cfg, &d.scenario),
        Document::Protocol(d) => verify_protocol(cfg, &d.protocol),
        Document::Witness(d) => witness_outcome(cfg, &d.witness),
        Document::EmbeddedScenario(b) => {
            check_folds(scenario_folds(&b.original)?, cfg)?;
            let equivalence = verify_equivalence(&b.original, &b.embedded, cfg.tol())?;
            finish_scenario(
                cfg,
                ScenarioVerification {
                    certificate: b.certificate,
                    equivalence,
                },
            )
        }
        Document::EmbeddedProtocol(b) => {
            check_folds(b.original.parties(), cfg)?;
            b.embedded.check(cfg.tol())?;
            let equivalence = verify_protocol_equivalence(&b.original, &b.embedded, cfg.tol())?;
            finish_protocol(
                cfg,
                b.original.parties(),
                ProtocolVerification {
                    certificate: Some(b.certificate),
                    equivalence,
                },
            )
        }
    }
}

fn embed(cfg: &RunConfig, input: &Path) -> Result<Outcome, Failure> {
    let tol = cfg.tol();
    let (bundle, summary) = match read_document(input)? {
        Document::Scenario(d) => {
            check_folds(scenario_folds(&d.scenario)?, cfg)?;
            let (embedded, certificate) = embed_network(&d.scenario, tol)?;
            let summary = render::certificate(&certificate);
            let b = ScenarioBundle {
                kind: Kind::EmbeddedScenario,
                original: d.scenario,
                embedded,
                certificate,
            };
            (Document::EmbeddedScenario(b), summary)
        }
        Document::Protocol(d) => {
            check_folds(d.protocol.parties(), cfg)?;
            let (embedded, certificate) = embed_protocol(&d.protocol, tol)?;
            let summary = render::protocol_certificate(&certificate);
            let b = ProtocolBundle {
                kind: Kind::EmbeddedProtocol,
                original: d.protocol,
                embedded,
                certificate,
            };
            (Document::EmbeddedProtocol(b), summary)
        }
        other => {
            return Err(Failure::input(format!(
                "{}: embed takes a scenario or protocol file, got {:?}",
                input.display(),
                other.kind()
            )))
        }
    };
    let convention = match &bundle {
        Document::EmbeddedScenario(b) => b.certificate.convention.clone(),
        Document::EmbeddedProtocol(b) => EmbeddingConvention::new(b.original.parties()),
        _ => unreachable!("bundle kinds only"),
    };
    let mut outcome = match &bundle {
        Document::EmbeddedScenario(b) => {
            finish(cfg, convention, true, &b.certificate, summary, Vec::new())
        }
        Document::EmbeddedProtocol(b) => {
            finish(cfg, convention, true, &b.certificate, summary, Vec::new())
        }
        _ => unreachable!("bundle kinds only"),
    };
    outcome.artifact = Some(bundle.to_json());
    Ok(outcome)
}

/// Runs one command without touching stdout or the output file.
pub fn run(cfg: &RunConfig) -> Result<Outcome, Failure> {
    let tol = cfg.tol();
    if !(tol.is_finite() && tol > 0.0) {
        return Err(Failure::input(format!(
            "--tol must be a positive number, got {tol}"
        )));
    }
    match &cfg.command {
        Command::CheckAlgebra => check_algebra(cfg),
        Command::Verify { input } => verify(cfg, input),
        Command::Embed { input } => embed(cfg, input),
        Command::Witness { input: None } => witness_outcome(cfg, &WitnessInstance::standard()?),
        Command::Witness { input: Some(path) } => match read_document(path)? {
            Document::Witness(d) => witness_outcome(cfg, &d.witness),
            other => Err(Failure::input(format!(
                "{}: witness takes a witness file, got {:?}",
                path.display(),
                other.kind()
            ))),
        },
    }
}

/// Writes an outcome. Reports go to `--out` when given, otherwise stdout.
/// For `embed` the bundle takes `--out` (or stdout) and the summary moves to
/// stdout (or stderr).
pub fn emit(cfg: &RunConfig, outcome: &Outcome) -> std::io::Result<()> {
    use std::io::Write;
    let write_file = |path: &Path, text: &str| std::fs::write(path, text);
    match (&outcome.artifact, &cfg.out) {
        (Some(artifact), Some(path)) => {
            write_file(path, artifact)?;
            std::io::stdout().write_all(outcome.report.as_bytes())?;
        }
        (Some(artifact), None) => {
            std::io::stdout().write_all(artifact.as_bytes())?;
            std::io::stderr().write_all(outcome.report.as_bytes())?;
        }
        (None, Some(path)) => write_file(path, &outcome.report)?,
        (None, None) => std::io::stdout().write_all(outcome.report.as_bytes())?,
    }
    for d in &outcome.diagnostics {
        eprintln!("{d}");
    }
    Ok(())
}
