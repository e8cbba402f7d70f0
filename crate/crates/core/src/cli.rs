//! Command dispatch behind the `tfkit` binary.
//!
//! Every run produces one JSON report envelope. Exit codes: 0 when the
//! operation succeeded and every check passed, 1 when a violation or
//! counterexample was found, 2 on input or validation errors.

use std::fs;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::doc::{self, JobDocument, SCHEMA_VERSION};
use crate::error::{Error, Result};
use crate::extension::{
    bound_certificate, extend_signed, lemma1_partition, norm_preservation_counterexample, series_decompose,
    verify_extension_properties, VectorExtension, DEFAULT_GROUPING_TOL,
};
use crate::measure::{mutually_singular, total_variation, total_variation_oracle, AtomSet, ORACLE_LIMIT};
use crate::ring::{empty_representation_check, extend_set_function, represent, validate_additivity, DEFAULT_MAX_TERMS};
use crate::transfunction::{check_all, operator_norm, SamplerConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

const DEFAULT_EPS: f64 = 0.01;

#[derive(Debug, Parser)]
#[command(name = "tfkit", version, about = "Transfunctions on finite measure spaces: checks, extensions and witnesses")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub options: Options,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Audit the eight properties of a transfunction
    Check,
    /// Apply the Jordan extension to a signed measure
    ExtendSigned,
    /// Extend a transfunction to a vector measure through a series
    ExtendVector,
    /// Total variation of a vector measure
    Variation,
    /// Jordan decomposition of a signed measure
    Jordan,
    /// Partition approximation of a family of positive measures
    Lemma1,
    /// Ring closure, additivity lint and representations
    Ring,
    /// Series decomposition of a vector measure
    Decompose,
    /// Built-in norm-preservation counterexample
    Counterexample,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Check => "check",
            Command::ExtendSigned => "extend-signed",
            Command::ExtendVector => "extend-vector",
            Command::Variation => "variation",
            Command::Jordan => "jordan",
            Command::Lemma1 => "lemma1",
            Command::Ring => "ring",
            Command::Decompose => "decompose",
            Command::Counterexample => "counterexample",
        }
    }

    pub fn from_name(name: &str) -> Option<Command> {
        [
            Command::Check,
            Command::ExtendSigned,
            Command::ExtendVector,
            Command::Variation,
            Command::Jordan,
            Command::Lemma1,
            Command::Ring,
            Command::Decompose,
            Command::Counterexample,
        ]
        .into_iter()
        .find(|c| c.name() == name)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Json,
}

#[derive(Debug, Clone, Default, clap::Args)]
pub struct Options {
    /// Job document (JSON)
    #[arg(long, global = true)]
    pub input: Option<PathBuf>,
    /// Write the report here instead of stdout
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true)]
    pub trials: Option<usize>,
    #[arg(long, global = true)]
    pub eps: Option<f64>,
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    #[arg(long, global = true, value_enum, default_value_t)]
    pub format: Format,
}

/// Flag values that override document parameters.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub trials: Option<usize>,
    pub eps: Option<f64>,
    pub tol: Option<f64>,
}

impl From<&Options> for Overrides {
    fn from(o: &Options) -> Self {
        Overrides {
            seed: o.seed,
            trials: o.trials,
            eps: o.eps,
            tol: o.tol,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Execution {
    pub exit_code: i32,
    pub report: Value,
}

impl Execution {
    /// Pretty JSON with a trailing newline.
    pub fn render(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.report).expect("reports are plain JSON");
        s.push('\n');
        s
    }
}

struct Settings {
    seed: u64,
    config: SamplerConfig,
    eps: Option<f64>,
    tol: Option<f64>,
}

fn settings(doc: Option<&JobDocument>, overrides: &Overrides) -> Settings {
    let params = doc.map(|d| d.params.clone()).unwrap_or_default();
    let seed = overrides.seed.or(params.seed).unwrap_or(0);
    let defaults = SamplerConfig::default();
    let config = SamplerConfig {
        trials: overrides.trials.or(params.trials).unwrap_or(defaults.trials),
        seed,
        mass_scale: params.mass_scale.unwrap_or(defaults.mass_scale),
        tolerance: overrides.tol.or(params.tol).unwrap_or(defaults.tolerance),
    };
    Settings {
        seed,
        config,
        eps: overrides.eps.or(params.eps),
        tol: overrides.tol.or(params.tol),
    }
}

fn to_value(x: impl Serialize) -> Value {
    serde_json::to_value(x).expect("reports are plain JSON")
}

fn error_value(e: &Error) -> Value {
    match e {
        Error::Document { path, message } => json!({"kind": "document", "path": path, "message": message}),
        other => json!({"kind": "validation", "message": other.to_string()}),
    }
}

fn envelope(command: Command, seed: u64, exit_code: i32, body: std::result::Result<Value, Value>) -> Execution {
    let status = match exit_code {
        EXIT_OK => "ok",
        EXIT_VIOLATION => "violation",
        _ => "error",
    };
    let (key, payload) = match body {
        Ok(v) => ("result", v),
        Err(v) => ("error", v),
    };
    let mut report = json!({
        "tool": "tfkit",
        "schema_version": SCHEMA_VERSION,
        "command": command.name(),
        "seed": seed,
        "status": status,
        "exit_code": exit_code,
    });
    report[key] = payload;
    Execution { exit_code, report }
}

/// Runs `command` on an optional document text.
pub fn execute(command: Command, input: Option<&str>, overrides: &Overrides) -> Execution {
    let doc = match input.map(doc::parse).transpose() {
        Ok(d) => d,
        Err(e) => {
            let seed = overrides.seed.unwrap_or(0);
            return envelope(command, seed, EXIT_INPUT, Err(error_value(&e)));
        }
    };
    let s = settings(doc.as_ref(), overrides);
    if let Some(named) = doc.as_ref().and_then(|d| d.command.as_deref()) {
        if named != command.name() {
            let e = Error::Document {
                path: "command".into(),
                message: format!("document is for `{named}`, not `{}`", command.name()),
            };
            return envelope(command, s.seed, EXIT_INPUT, Err(error_value(&e)));
        }
    }
    let result = match (command, doc.as_ref()) {
        (Command::Counterexample, _) => counterexample(),
        (_, None) => Err(Error::InvalidParameter(format!("`{}` needs --input", command.name()))),
        (Command::Check, Some(d)) => check(d, &s),
        (Command::ExtendSigned, Some(d)) => extend_signed_cmd(d, &s),
        (Command::ExtendVector, Some(d)) => extend_vector_cmd(d, &s),
        (Command::Variation, Some(d)) => variation(d),
        (Command::Jordan, Some(d)) => jordan(d),
        (Command::Lemma1, Some(d)) => lemma1(d, &s),
        (Command::Ring, Some(d)) => ring(d, &s),
        (Command::Decompose, Some(d)) => decompose(d, &s),
    };
    match result {
        Ok((code, value)) => envelope(command, s.seed, code, Ok(value)),
        Err(e) => envelope(command, s.seed, EXIT_INPUT, Err(error_value(&e))),
    }
}

/// Entry point for the binary: reads `--input`, writes the report, returns
/// the exit code.
pub fn run(cli: &Cli) -> i32 {
    let overrides = Overrides::from(&cli.options);
    let text = match &cli.options.input {
        Some(path) => match fs::read_to_string(path) {
            Ok(t) => Some(t),
            Err(e) => {
                let err = Error::Document {
                    path: path.display().to_string(),
                    message: e.to_string(),
                };
                let exec = envelope(cli.command, overrides.seed.unwrap_or(0), EXIT_INPUT, Err(error_value(&err)));
                return emit(&exec, cli.options.out.as_ref());
            }
        },
        None => None,
    };
    let exec = execute(cli.command, text.as_deref(), &overrides);
    emit(&exec, cli.options.out.as_ref())
}

fn emit(exec: &Execution, out: Option<&PathBuf>) -> i32 {
    let text = exec.render();
    if exec.exit_code == EXIT_INPUT {
        if let Some(msg) = exec.report["error"]["message"].as_str() {
            match exec.report["error"]["path"].as_str() {
                Some(path) => eprintln!("error at `{path}`: {msg}"),
                None => eprintln!("error: {msg}"),
            }
        }
    }
    match out {
        Some(path) => {
            if let Err(e) = fs::write(path, text) {
                eprintln!("error: cannot write {}: {e}", path.display());
                return EXIT_INPUT;
            }
        }
        None => print!("{text}"),
    }
    exec.exit_code
}

type Outcome = Result<(i32, Value)>;

fn counterexample() -> Outcome {
    let c = norm_preservation_counterexample();
    let code = if c.breaks_norm() { EXIT_VIOLATION } else { EXIT_OK };
    Ok((code, to_value(&c)))
}

fn check(d: &JobDocument, s: &Settings) -> Outcome {
    let (name, phi) = d.pick_transfunction()?;
    let report = check_all(&phi, &s.config)?;
    let norm = match operator_norm(&phi, &s.config) {
        Ok(n) => to_value(n),
        Err(e) => json!({"error": e.to_string()}),
    };
    let code = if report.mismatches().is_empty() { EXIT_OK } else { EXIT_VIOLATION };
    Ok((
        code,
        json!({
            "transfunction": name,
            "properties": report,
            "mismatches": report.mismatches(),
            "operator_norm": norm,
        }),
    ))
}

fn extend_signed_cmd(d: &JobDocument, s: &Settings) -> Outcome {
    let (tname, phi) = d.pick_transfunction()?;
    let (mname, mu) = d.pick_measure()?;
    let (pos, neg) = mu.jordan();
    let image = extend_signed(&phi, &mu)?;
    let mut result = json!({
        "transfunction": tname,
        "measure": mname,
        "input": mu,
        "positive_part_image": phi.apply(&pos)?,
        "negative_part_image": phi.apply(&neg)?,
        "image": image,
        "input_norm": mu.norm(),
        "image_norm": image.norm(),
    });
    let mut code = EXIT_OK;
    if d.params.verify {
        let report = verify_extension_properties(&phi, &s.config)?;
        if !report.findings().is_empty() {
            code = EXIT_VIOLATION;
        }
        result["findings"] = to_value(report.findings());
        result["clauses"] = to_value(&report);
    }
    Ok((code, result))
}

fn extend_vector_cmd(d: &JobDocument, s: &Settings) -> Outcome {
    let (tname, phi) = d.pick_transfunction()?;
    let (source, rep) = match d.pick_series()? {
        Some((name, rep)) => (json!({"series": name}), rep),
        None => {
            let (name, omega) = d.pick_vector_measure()?;
            let tol = s.tol.unwrap_or(DEFAULT_GROUPING_TOL);
            (json!({"vector_measure": name, "grouping_tol": tol}), series_decompose(&omega, tol)?)
        }
    };
    let ext = match VectorExtension::new(phi, &s.config) {
        Ok(ext) => ext,
        Err(e @ Error::HypothesisFailed { .. }) => {
            return Ok((
                EXIT_VIOLATION,
                json!({"transfunction": tname, "source": source, "refused": e.to_string()}),
            ))
        }
        Err(e) => return Err(e),
    };
    let image = ext.extend(&rep)?;
    let cert = bound_certificate(&ext, &rep, s.eps.unwrap_or(DEFAULT_EPS))?;
    let code = if cert.bound_holds { EXIT_OK } else { EXIT_VIOLATION };
    Ok((
        code,
        json!({
            "transfunction": tname,
            "source": source,
            "representation": rep,
            "image": image,
            "operator_norm": ext.operator_norm(),
            "hypotheses": ext.hypotheses(),
            "bound": cert,
        }),
    ))
}

fn variation(d: &JobDocument) -> Outcome {
    let (name, omega) = d.pick_vector_measure()?;
    let tv = total_variation(&omega);
    let full = AtomSet::full(omega.space().count());
    let oracle = if full.len() <= ORACLE_LIMIT {
        Some(total_variation_oracle(&omega, &full)?)
    } else {
        None
    };
    Ok((
        EXIT_OK,
        json!({
            "vector_measure": name,
            "variation": tv,
            "total": tv.total(),
            "partition_oracle_total": oracle,
        }),
    ))
}

fn jordan(d: &JobDocument) -> Outcome {
    let (name, mu) = d.pick_measure()?;
    let (pos, neg) = mu.jordan();
    Ok((
        EXIT_OK,
        json!({
            "measure": name,
            "positive": pos,
            "negative": neg,
            "norm": mu.norm(),
            "mutually_singular": mutually_singular(&pos, &neg)?,
        }),
    ))
}

fn lemma1(d: &JobDocument, s: &Settings) -> Outcome {
    let family = d.positive_family()?;
    let eps = s.eps.unwrap_or(DEFAULT_EPS);
    let measures: Vec<_> = family.iter().map(|(_, m)| m.clone()).collect();
    let approx = lemma1_partition(&measures, eps)?;
    let mut max_error: f64 = 0.0;
    for (i, mu) in measures.iter().enumerate() {
        let rebuilt = approx.reconstruct(i)?;
        max_error = max_error.max(rebuilt.to_signed().max_abs_diff(&mu.to_signed()).unwrap_or(f64::INFINITY));
    }
    let code = if approx.remainder_total < eps { EXIT_OK } else { EXIT_VIOLATION };
    let names: Vec<&str> = family.iter().map(|(n, _)| n.as_str()).collect();
    Ok((
        code,
        json!({
            "measures": names,
            "partition": approx,
            "reconstruction_error": max_error,
        }),
    ))
}

fn ring(d: &JobDocument, s: &Settings) -> Outcome {
    let (name, ring, function) = d.pick_ring()?;
    let max_terms = d.params.max_terms.unwrap_or(DEFAULT_MAX_TERMS);
    let mut representations = Vec::new();
    for target in d.represent_targets(&name) {
        target.validate(ring.ground())?;
        let rep = represent(&target, &ring, max_terms)?;
        let value = match (&rep, &function) {
            (Some(r), Some(f)) => Some(extend_set_function(f, r)?),
            _ => None,
        };
        representations.push(json!({"set": target, "representation": rep, "value": value}));
    }
    let mut result = json!({
        "ring": name,
        "members": ring.members(),
        "cells": ring.cells(),
        "representations": representations,
    });
    let mut code = EXIT_OK;
    if let Some(f) = &function {
        let violations = validate_additivity(f);
        let empty = empty_representation_check(f, s.config.trials, s.seed, max_terms);
        if !violations.is_empty() || !empty.all_zero {
            code = EXIT_VIOLATION;
        }
        result["additivity_violations"] = to_value(violations);
        result["empty_representations"] = to_value(empty);
    }
    Ok((code, result))
}

fn decompose(d: &JobDocument, s: &Settings) -> Outcome {
    let (name, omega) = d.pick_vector_measure()?;
    let tol = s.tol.unwrap_or(DEFAULT_GROUPING_TOL);
    let rep = series_decompose(&omega, tol)?;
    let error = rep.evaluate().max_abs_diff(&omega)?;
    Ok((
        EXIT_OK,
        json!({
            "vector_measure": name,
            "grouping_tol": tol,
            "representation": rep,
            "reconstruction_error": error,
        }),
    ))
}
