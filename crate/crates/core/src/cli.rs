//! Command-line front end.
//!
//! Exit status 0 means success, 1 a domain error (the input is well formed
//! but the requested computation does not apply), 2 a usage or parse error.
//! Every error carries a stable code string; with `--format json` the error
//! is also reported as JSON on standard error.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::Deserialize;
use serde_json::{json, Value};

use crate::bredon::{
    bredon_full, ktheory, one_relator_product_homology, BredonError, BredonOptions, BredonResult, H0Interpretation,
    KTheoryResult,
};
use crate::finite_oracle::{bredon_homology_of_cyclic_model, character_count, cyclic_resolution_report};
use crate::fox::fox_derivative;
use crate::free_group::{FreeGroupError, GeneratorId, Word};
use crate::hempel::{build_hnn, check_hempel, hnn_roundtrip_check, HempelContext, HempelError, HempelReport, Verdict};
use crate::int_linalg::{smith_normal_form, AbelianGroupInvariants, IntMatrix};
use crate::presentation::{Presentation, PresentationError, TorsionDeclaration, TorsionMode};

pub const SCHEMA: &str = "bredon-cli/1";

#[derive(Debug, Parser)]
#[command(name = "bredon", version, about = "Bredon homology and K-groups of finitely presented groups")]
pub struct Cli {
    #[command(subcommand)]
    pub verb: Verb,
}

#[derive(Debug, Subcommand)]
pub enum Verb {
    /// Parse a presentation and print it in canonical form.
    Parse(PresentationArgs),
    /// Fox derivatives of every relator.
    Fox(PresentationArgs),
    /// Root and logarithm of every relator.
    Root(PresentationArgs),
    /// Smith normal form of an integer matrix given as JSON.
    Snf(InputArgs),
    /// Check the Hempel conditions for `<x, y, z.. | [x,y]u, r>`.
    HempelCheck(PresentationArgs),
    /// HNN decomposition of a Hempel presentation.
    Hnn(PresentationArgs),
    /// Bredon homology with representation-ring coefficients.
    Bredon(BredonArgs),
    /// K-groups of the classifying space for proper actions.
    Ktheory(KTheoryArgs),
    /// Brute-force exactness check over Z/n.
    Oracle(OracleArgs),
    /// Degree-wise direct sum for a one-relator product, in degrees above 2.
    Combinator(CombinatorArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Args)]
pub struct InputArgs {
    /// Inline input.
    #[arg(long = "in", value_name = "TEXT", conflicts_with = "file", required_unless_present = "file")]
    pub inline: Option<String>,
    /// Read input from a file.
    #[arg(long, value_name = "PATH")]
    pub file: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct PresentationArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// Declare relator REL (0-based) as a torsion relator of order N.
    #[arg(long, value_name = "REL=N", value_parser = parse_torsion)]
    pub torsion: Vec<TorsionDeclaration>,
}

#[derive(Debug, Args)]
pub struct BredonArgs {
    #[command(flatten)]
    pub presentation: PresentationArgs,
    /// Treat the presentation as aspherical without verifying it.
    #[arg(long)]
    pub assert_aspherical: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum H0Choice {
    Bredon,
    Literal,
}

#[derive(Debug, Args)]
pub struct KTheoryArgs {
    #[command(flatten)]
    pub bredon: BredonArgs,
    #[arg(long, value_enum, default_value_t = H0Choice::Bredon)]
    pub h0_interpretation: H0Choice,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    /// Order of the cyclic group.
    #[arg(long, value_parser = clap::value_parser!(u64).range(2..=64))]
    pub n: u64,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct CombinatorArgs {
    /// Homology of the first factor: JSON list of groups indexed by degree.
    #[arg(long, value_name = "JSON")]
    pub a: String,
    /// Homology of the second factor.
    #[arg(long, value_name = "JSON")]
    pub b: String,
    #[arg(long)]
    pub degree: usize,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

fn parse_torsion(s: &str) -> Result<TorsionDeclaration, String> {
    let (rel, order) = s.split_once('=').ok_or_else(|| format!("expected REL=ORDER, got `{s}`"))?;
    let relator = rel.trim().parse().map_err(|_| format!("bad relator index `{rel}`"))?;
    let order = order.trim().parse().map_err(|_| format!("bad order `{order}`"))?;
    Ok(TorsionDeclaration { relator, order })
}

/// What a run produced: exit status and the two output streams.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub status: i32,
    pub stdout: String,
    pub stderr: String,
}

#[derive(Debug)]
struct CliError {
    status: i32,
    code: &'static str,
    message: String,
}

impl CliError {
    fn usage(code: &'static str, message: impl Into<String>) -> Self {
        CliError { status: 2, code, message: message.into() }
    }

    fn domain(code: &'static str, message: impl Into<String>) -> Self {
        CliError { status: 1, code, message: message.into() }
    }
}

impl From<PresentationError> for CliError {
    fn from(e: PresentationError) -> Self {
        let msg = e.to_string();
        match e {
            PresentationError::Syntax { .. } => CliError::usage("parse_error", msg),
            PresentationError::UnknownGenerator { .. } => CliError::usage("unknown_generator", msg),
            PresentationError::InvalidTorsion(_) => CliError::usage("invalid_torsion", msg),
            PresentationError::DegenerateRelator(_) => CliError::domain("degenerate_relator", msg),
            PresentationError::NotGeneratorPower(_) => CliError::domain("torsion_not_generator_power", msg),
            PresentationError::WrongMode(_) => CliError::domain("wrong_mode", msg),
            PresentationError::FreeGroup(FreeGroupError::TrivialRoot) => CliError::domain("trivial_root", msg),
            PresentationError::FreeGroup(FreeGroupError::UnknownGenerator(_)) => {
                CliError::usage("unknown_generator", msg)
            }
            PresentationError::FreeGroup(FreeGroupError::DuplicateGenerator(_)) => {
                CliError::usage("duplicate_generator", msg)
            }
        }
    }
}

impl From<HempelError> for CliError {
    fn from(e: HempelError) -> Self {
        let code = match e {
            HempelError::NotInKernel { .. } => "not_in_kernel",
            HempelError::NotHempelForm(_) => "not_hempel_form",
            HempelError::NotHempelRelator(_) => "not_hempel_relator",
            HempelError::MagnusCertificate(_) => "magnus_certificate",
        };
        CliError::domain(code, e.to_string())
    }
}

impl From<BredonError> for CliError {
    fn from(e: BredonError) -> Self {
        match e {
            BredonError::Presentation(p) => p.into(),
            BredonError::NotTwoDimensional => CliError::domain("not_two_dimensional", e.to_string()),
            BredonError::CombinatorDegree(_) => CliError::domain("combinator_degree", e.to_string()),
            BredonError::LiteralUnavailable => CliError::domain("literal_unavailable", e.to_string()),
        }
    }
}

/// A verb's result in both renderings.
struct Report {
    json: Value,
    text: String,
    /// Non-zero status with a report still printed (a failed oracle check).
    failure: Option<CliError>,
}

impl Report {
    fn ok(json: Value, text: String) -> Self {
        Report { json, text, failure: None }
    }
}

/// Parses `args` (including the program name) and runs the verb.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let status = if e.use_stderr() { 2 } else { 0 };
            let rendered = e.render().to_string();
            return if status == 0 {
                Outcome { status, stdout: rendered, stderr: String::new() }
            } else {
                Outcome { status, stdout: String::new(), stderr: format!("[usage] {rendered}") }
            };
        }
    };
    let format = cli.verb.format();
    let (report, error) = match dispatch(&cli.verb) {
        Ok(mut r) => {
            let failure = r.failure.take();
            (Some(r), failure)
        }
        Err(e) => (None, Some(e)),
    };
    let stdout = match &report {
        Some(r) => match format {
            Format::Json => {
                let mut v = r.json.clone();
                v["schema"] = Value::from(SCHEMA);
                format!("{}\n", serde_json::to_string(&v).expect("serializable"))
            }
            Format::Text => r.text.clone(),
        },
        None => String::new(),
    };
    match error {
        None => Outcome { status: 0, stdout, stderr: String::new() },
        Some(e) => {
            let stderr = match format {
                Format::Json => {
                    format!("{}\n", json!({"schema": SCHEMA, "error": {"code": e.code, "message": e.message}}))
                }
                Format::Text => format!("error[{}]: {}\n", e.code, e.message),
            };
            Outcome { status: e.status, stdout, stderr }
        }
    }
}

impl Verb {
    fn format(&self) -> Format {
        match self {
            Verb::Parse(a) | Verb::Fox(a) | Verb::Root(a) | Verb::HempelCheck(a) | Verb::Hnn(a) => a.input.format,
            Verb::Snf(a) => a.format,
            Verb::Bredon(a) => a.presentation.input.format,
            Verb::Ktheory(a) => a.bredon.presentation.input.format,
            Verb::Oracle(a) => a.format,
            Verb::Combinator(a) => a.format,
        }
    }
}

fn dispatch(verb: &Verb) -> Result<Report, CliError> {
    match verb {
        Verb::Parse(a) => cmd_parse(&load_presentation(a)?),
        Verb::Fox(a) => cmd_fox(&load_presentation(a)?),
        Verb::Root(a) => cmd_root(&load_presentation(a)?),
        Verb::Snf(a) => cmd_snf(&read_input(a)?),
        Verb::HempelCheck(a) => cmd_hempel_check(&load_presentation(a)?),
        Verb::Hnn(a) => cmd_hnn(&load_presentation(a)?),
        Verb::Bredon(a) => {
            let b = bredon_of(a)?;
            Ok(Report::ok(bredon_json(&b), bredon_text(&b)))
        }
        Verb::Ktheory(a) => cmd_ktheory(a),
        Verb::Oracle(a) => cmd_oracle(a.n),
        Verb::Combinator(a) => cmd_combinator(a),
    }
}

fn read_input(a: &InputArgs) -> Result<String, CliError> {
    match (&a.inline, &a.file) {
        (Some(s), _) => Ok(s.clone()),
        (None, Some(path)) => std::fs::read_to_string(path)
            .map_err(|e| CliError::usage("io_error", format!("cannot read {}: {e}", path.display()))),
        (None, None) => Err(CliError::usage("usage", "one of --in or --file is required")),
    }
}

fn load_presentation(a: &PresentationArgs) -> Result<Presentation, CliError> {
    let p = Presentation::parse(&read_input(&a.input)?)?;
    if a.torsion.is_empty() {
        return Ok(p);
    }
    let mut decls = p.declared_torsion().to_vec();
    decls.extend(a.torsion.iter().copied());
    Ok(p.with_declared_torsion(decls)?)
}

fn int_json(n: &BigInt) -> Value {
    match n.to_i64() {
        Some(v) => Value::from(v),
        None => Value::from(n.to_string()),
    }
}

fn group_json(g: &AbelianGroupInvariants) -> Value {
    json!({"rank": g.rank, "torsion": g.torsion.iter().map(int_json).collect::<Vec<_>>()})
}

fn cmd_parse(p: &Presentation) -> Result<Report, CliError> {
    let a = p.alphabet();
    let relators: Vec<String> = p.relators().iter().map(|r| r.display(a).to_string()).collect();
    let mode = match p.mode() {
        TorsionMode::DeriveFromRoots => "DERIVE_FROM_ROOTS",
        TorsionMode::Declared => "DECLARED",
    };
    let torsion: Vec<Value> =
        p.declared_torsion().iter().map(|d| json!({"relator": d.relator, "order": d.order})).collect();
    let json = json!({
        "generators": a.names(),
        "relators": relators,
        "mode": mode,
        "declared_torsion": torsion,
        "canonical": p.to_string(),
    });
    Ok(Report::ok(json, format!("{p}\n")))
}

fn cmd_fox(p: &Presentation) -> Result<Report, CliError> {
    let a = p.alphabet();
    let mut text = String::new();
    let mut rels = Vec::new();
    for (i, r) in p.relators().iter().enumerate() {
        let mut derivs = Vec::new();
        for g in a.generators() {
            let d = fox_derivative(r, g).display(a).to_string();
            writeln!(text, "d(r{i})/d{} = {d}", a.name(g)).unwrap();
            derivs.push(json!({"generator": a.name(g), "derivative": d}));
        }
        rels.push(json!({"relator": r.display(a).to_string(), "derivatives": derivs}));
    }
    Ok(Report::ok(json!({"relators": rels}), text))
}

fn cmd_root(p: &Presentation) -> Result<Report, CliError> {
    let a = p.alphabet();
    let mut text = String::new();
    let mut roots = Vec::new();
    for (i, r) in p.relators().iter().enumerate() {
        let (root, log) = r.root().map_err(PresentationError::from)?;
        let root = root.display(a).to_string();
        writeln!(text, "r{i}: root = {root}, log = {log}").unwrap();
        roots.push(json!({"relator": i, "root": root, "log": log}));
    }
    let mut json = json!({"roots": roots});
    if let [only] = roots.as_slice() {
        json["root"] = only["root"].clone();
        json["log"] = only["log"].clone();
    }
    Ok(Report::ok(json, text))
}

#[derive(Deserialize)]
struct MatrixInput {
    rows: usize,
    cols: usize,
    entries: Vec<serde_json::Number>,
}

fn cmd_snf(input: &str) -> Result<Report, CliError> {
    let m: MatrixInput =
        serde_json::from_str(input).map_err(|e| CliError::usage("invalid_json", format!("matrix JSON: {e}")))?;
    let entries = m
        .entries
        .iter()
        .map(|n| n.to_string().parse::<BigInt>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|_| CliError::usage("invalid_matrix", "matrix entries must be integers"))?;
    let matrix =
        IntMatrix::new(m.rows, m.cols, entries).map_err(|e| CliError::usage("invalid_matrix", e.to_string()))?;
    let snf = smith_normal_form(&matrix);
    let d = snf.d.diag();
    let rank = snf.rank();
    let text = format!("D = diag({})\nrank = {rank}\n", d.iter().map(BigInt::to_string).collect::<Vec<_>>().join(", "));
    Ok(Report::ok(json!({"D": d.iter().map(int_json).collect::<Vec<_>>(), "rank": rank}), text))
}

fn hempel_input(p: &Presentation) -> Result<(HempelContext, Word), CliError> {
    Ok(HempelContext::from_presentation(p)?)
}

fn verdict_json(v: &Verdict) -> Value {
    json!({"holds": v.holds, "detail": v.detail})
}

fn hempel_report_json(r: &HempelReport) -> Value {
    json!({
        "H1": verdict_json(&r.h1),
        "H2": verdict_json(&r.h2),
        "H3": verdict_json(&r.h3),
        "H4": verdict_json(&r.h4),
        "hempel": r.all_hold(),
        "nu": r.nu,
        "expression": r.expression.as_ref().map(|e| e.to_string()),
    })
}

fn cmd_hempel_check(p: &Presentation) -> Result<Report, CliError> {
    let (ctx, r) = hempel_input(p)?;
    let report = check_hempel(&r, &ctx);
    let mut text = String::new();
    for (name, v) in [("H1", &report.h1), ("H2", &report.h2), ("H3", &report.h3), ("H4", &report.h4)] {
        writeln!(text, "{name}: {} ({})", if v.holds { "holds" } else { "fails" }, v.detail).unwrap();
    }
    if let Some(nu) = report.nu {
        writeln!(text, "nu = {nu}").unwrap();
    }
    writeln!(text, "hempel: {}", report.all_hold()).unwrap();
    Ok(Report::ok(hempel_report_json(&report), text))
}

fn cmd_hnn(p: &Presentation) -> Result<Report, CliError> {
    let (ctx, r) = hempel_input(p)?;
    let h = build_hnn(&r, &ctx, p.alphabet())?;
    let roundtrip = hnn_roundtrip_check(&h, p);
    let a = h.alphabet();
    let full = h.presentation();
    let json = json!({
        "nu": h.nu(),
        "stable_letter": h.stable_letter(),
        "generators": a.names(),
        "relator": h.relator().display(a).to_string(),
        "conjugation_relators": h.conjugation_relators().iter().map(|w| w.display(a).to_string()).collect::<Vec<_>>(),
        "base_presentation": h.base_presentation().to_string(),
        "presentation": full.to_string(),
        "certificate": {
            "involves_top_level": h.certificate().involves_top_level,
            "involves_bottom_level": h.certificate().involves_bottom_level,
        },
        "roundtrip": roundtrip,
    });
    let text = format!(
        "{full}\n# stable letter {}, nu = {}, base {}, roundtrip {}\n",
        h.stable_letter(),
        h.nu(),
        h.base_presentation(),
        if roundtrip { "ok" } else { "FAILED" }
    );
    let mut report = Report::ok(json, text);
    if !roundtrip {
        report.failure =
            Some(CliError::domain("hnn_roundtrip_failed", "HNN presentation does not map back onto the input"));
    }
    Ok(report)
}

fn bredon_of(a: &BredonArgs) -> Result<BredonResult, CliError> {
    let p = load_presentation(&a.presentation)?;
    Ok(bredon_full(&p, BredonOptions { assert_aspherical: a.assert_aspherical })?)
}

fn bredon_json(b: &BredonResult) -> Value {
    json!({
        "H0": group_json(&b.h0),
        "H1": group_json(&b.h1),
        "H2": b.h2.as_ref().map(group_json),
        "higher": b.higher.as_str(),
        "aspherical_source": b.aspherical_source.map(|s| s.as_str()),
        "torsion": b.torsion.iter().filter(|d| d.order > 1).map(|d| json!({"relator": d.relator_index, "order": d.order})).collect::<Vec<_>>(),
        "warnings": b.warnings,
    })
}

fn bredon_text(b: &BredonResult) -> String {
    let mut text = format!("{b}\n");
    if let Some(s) = b.aspherical_source {
        writeln!(text, "aspherical: {}", s.as_str()).unwrap();
    }
    for w in &b.warnings {
        writeln!(text, "warning: {w}").unwrap();
    }
    text
}

fn cmd_ktheory(a: &KTheoryArgs) -> Result<Report, CliError> {
    let b = bredon_of(&a.bredon)?;
    let interp = match a.h0_interpretation {
        H0Choice::Bredon => H0Interpretation::BredonH0,
        H0Choice::Literal => H0Interpretation::LiteralRcG,
    };
    let k: KTheoryResult = ktheory(&b, interp)?;
    let mut json = bredon_json(&b);
    json["K0"] = group_json(&k.k0);
    json["K1"] = group_json(&k.k1);
    json["h0_interpretation"] = Value::from(k.h0_interpretation.as_str());
    let text = format!("K0 = {}\nK1 = {}\n{}", k.k0, k.k1, bredon_text(&b));
    Ok(Report::ok(json, text))
}

fn cmd_oracle(n: u64) -> Result<Report, CliError> {
    let x = Word::generator(GeneratorId(0));
    let theta = fox_derivative(&x.pow(n as i64), GeneratorId(0));
    let report = cyclic_resolution_report(n as usize, &theta).expect("n >= 2");
    let [h0, h1, h2] = bredon_homology_of_cyclic_model(n as usize).expect("n >= 2");
    let characters = character_count(n);
    let bredon_ok = h0 == AbelianGroupInvariants::free(characters as usize) && h1.is_trivial() && h2.is_trivial();
    let pass = report.exact() && bredon_ok;

    let mut text = format!("oracle Z/{n}: {}\n", if pass { "PASS" } else { "FAIL" });
    let mut stages = Vec::new();
    for s in &report.stages {
        writeln!(
            text,
            "  {:<22} kernel rank {:>3}, image rank {:>3}, composite zero {}, homology {}",
            s.name, s.kernel_rank, s.image_rank, s.composite_zero, s.homology
        )
        .unwrap();
        stages.push(json!({
            "name": s.name,
            "kernel_rank": s.kernel_rank,
            "image_rank": s.image_rank,
            "composite_zero": s.composite_zero,
            "homology": group_json(&s.homology),
        }));
    }
    writeln!(text, "  characters: {characters}").unwrap();
    writeln!(text, "  Bredon model: H0 = {h0}, H1 = {h1}, H2 = {h2}").unwrap();
    let json = json!({
        "n": n,
        "pass": pass,
        "theta_well_defined": report.theta_well_defined,
        "stages": stages,
        "characters": characters,
        "bredon_model": {"H0": group_json(&h0), "H1": group_json(&h1), "H2": group_json(&h2)},
    });
    let mut r = Report::ok(json, text);
    if !pass {
        r.failure = Some(CliError::domain("oracle_failed", format!("exactness check failed for n = {n}")));
    }
    Ok(r)
}

#[derive(Deserialize)]
struct GroupInput {
    rank: usize,
    #[serde(default)]
    torsion: Vec<serde_json::Number>,
}

fn parse_groups(s: &str) -> Result<Vec<AbelianGroupInvariants>, CliError> {
    let raw: Vec<GroupInput> =
        serde_json::from_str(s).map_err(|e| CliError::usage("invalid_json", format!("group list: {e}")))?;
    raw.into_iter()
        .map(|g| {
            let orders = g
                .torsion
                .iter()
                .map(|n| n.to_string().parse::<BigInt>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|_| CliError::usage("invalid_json", "torsion orders must be integers"))?;
            if orders.iter().any(|d| *d < BigInt::from(1)) {
                return Err(CliError::usage("invalid_json", "torsion orders must be positive"));
            }
            Ok(AbelianGroupInvariants::from_cyclic_orders(g.rank, &orders))
        })
        .collect()
}

fn cmd_combinator(a: &CombinatorArgs) -> Result<Report, CliError> {
    let ha = parse_groups(&a.a)?;
    let hb = parse_groups(&a.b)?;
    let h = one_relator_product_homology(&ha, &hb, a.degree)?;
    Ok(Report::ok(json!({"degree": a.degree, "H": group_json(&h)}), format!("H{} = {h}\n", a.degree)))
}
