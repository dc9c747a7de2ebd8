//! The five subcommands, as functions from parsed arguments to a report
//! plus a process outcome.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context, Result};
use rayon::prelude::*;

use focil_tfm::analysis::{
    enumerate_simplified, min_bribes, optimal_z, simplified_thresholds,
    verify_simplified_by_enumeration, SimplifiedScenario,
};
use focil_tfm::equilibrium::{default_properties, run_checks, PropertyKind, PropertyReport, Verdict};
use focil_tfm::scenario::{generate_batch, generate_simplified_batch, Regime, Scenario};
use focil_tfm::{Money, TfmKind};

use crate::report::RunReport;

/// What the checks concluded, ranked worst-last for aggregation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Outcome {
    /// Everything held, up to hypothesis-gated inconclusives.
    Clean,
    /// Some search gave up or a hypothesis failed under strict mode.
    Inconclusive,
    /// A check found a profitable deviation or a policy divergence.
    Violation,
}

impl Outcome {
    /// The process exit code: 0 clean, 1 violation, 3 inconclusive-only.
    pub fn exit_code(self) -> u8 {
        match self {
            Outcome::Clean => 0,
            Outcome::Violation => 1,
            Outcome::Inconclusive => 3,
        }
    }
}

/// Runs property checks over one scenario file or a directory of them.
pub fn cmd_check(
    input: &Path,
    properties: &[String],
    jobs: usize,
    strict: bool,
) -> Result<(RunReport, Outcome)> {
    let started = Instant::now();
    let selected = parse_properties(properties)?;
    let files = collect_inputs(input)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .context("cannot build the worker pool")?;
    let rows = pool.install(|| {
        files
            .par_iter()
            .map(|path| {
                let begun = Instant::now();
                let bytes =
                    fs::read(path).with_context(|| format!("cannot read {}", path.display()))?;
                let scenario: Scenario = serde_json::from_slice(&bytes)
                    .with_context(|| format!("cannot parse {}", path.display()))?;
                let props = selected
                    .clone()
                    .unwrap_or_else(|| default_properties(scenario.tfm));
                let reports = run_checks(&scenario, &props)
                    .with_context(|| format!("check failed on {}", path.display()))?;
                Ok((label(path), bytes, reports, begun.elapsed().as_millis()))
            })
            .collect::<Result<Vec<_>>>()
    })?;

    let mut report = RunReport::new("check");
    let mut outcome = Outcome::Clean;
    for (name, bytes, reports, ms) in rows {
        outcome = outcome.max(classify(&reports, strict));
        eprintln!("{name}: {}", summarize(&reports));
        report.timings.per_input_ms.insert(name.clone(), ms);
        report.record(&name, &bytes, serde_json::to_value(&reports)?);
    }
    report.finish(started);
    Ok((report, outcome))
}

/// Computes the minimum omission bribes for one scenario's target.
pub fn cmd_minbribe(input: &Path) -> Result<(RunReport, Outcome)> {
    let started = Instant::now();
    let bytes = fs::read(input).with_context(|| format!("cannot read {}", input.display()))?;
    let scenario: Scenario = serde_json::from_slice(&bytes)
        .with_context(|| format!("cannot parse {}", input.display()))?;
    let bounds = min_bribes(&scenario)?;
    let mut report = RunReport::new("minbribe");
    report.record(&label(input), &bytes, serde_json::to_value(&bounds)?);
    report.finish(started);
    Ok((report, Outcome::Clean))
}

/// Optimizes the single-bid split for one market's numbers.
pub fn cmd_optz(cap: &str, burn: &str, includers: u32, size: &str) -> Result<(RunReport, Outcome)> {
    let started = Instant::now();
    let c_t0 = parse_money(cap, "--cap")?;
    let r = parse_money(burn, "--burn")?;
    let s = parse_money(size, "--size")?;
    let best = optimal_z(&c_t0, &r, includers, &s)?;
    let mut report = RunReport::new("optz");
    report.results.insert(
        "optimal_split".to_string(),
        serde_json::json!({
            "c_t0": c_t0,
            "r": r,
            "m": includers,
            "s": s,
            "z_star": best.z_star,
            "objective_at_star": best.objective_at_star,
        }),
    );
    report.finish(started);
    Ok((report, Outcome::Clean))
}

/// Evaluates the plant-free predicates and audits them by enumeration.
pub fn cmd_simplified(input: &Path) -> Result<(RunReport, Outcome)> {
    let started = Instant::now();
    let bytes = fs::read(input).with_context(|| format!("cannot read {}", input.display()))?;
    let market: SimplifiedScenario = serde_json::from_slice(&bytes)
        .with_context(|| format!("cannot parse {}", input.display()))?;
    let thresholds = simplified_thresholds(&market)?;
    let findings = enumerate_simplified(&market)?;
    let consistency = verify_simplified_by_enumeration(&market)?;
    let outcome = if consistency.verdict == Verdict::Violated {
        Outcome::Violation
    } else {
        Outcome::Clean
    };
    let mut report = RunReport::new("simplified");
    report.record(
        &label(input),
        &bytes,
        serde_json::json!({
            "thresholds": thresholds,
            "enumeration": findings,
            "consistency": consistency,
        }),
    );
    report.finish(started);
    Ok((report, outcome))
}

/// Writes seed-reproducible scenario files.
pub fn cmd_generate(
    seed: u64,
    tfm: &str,
    regime: &str,
    count: usize,
    simplified: bool,
    out: &Path,
) -> Result<(RunReport, Outcome)> {
    let started = Instant::now();
    if count == 0 {
        bail!("--count must be at least 1");
    }
    let files: Vec<(String, String)> = if simplified {
        generate_simplified_batch(seed, count)
            .iter()
            .enumerate()
            .map(|(i, sc)| Ok((format!("simplified_{i:03}.json"), render(sc)?)))
            .collect::<Result<_>>()?
    } else {
        generate_batch(seed, parse_tfm(tfm)?, parse_regime(regime)?, count)?
            .iter()
            .enumerate()
            .map(|(i, sc)| Ok((format!("scenario_{i:03}.json"), render(sc)?)))
            .collect::<Result<_>>()?
    };

    let single_file = count == 1 && out.extension().is_some_and(|e| e == "json");
    let mut report = RunReport::new("generate");
    for (name, text) in &files {
        let path = if single_file {
            out.to_path_buf()
        } else {
            fs::create_dir_all(out)
                .with_context(|| format!("cannot create {}", out.display()))?;
            out.join(name)
        };
        fs::write(&path, text).with_context(|| format!("cannot write {}", path.display()))?;
        let key = if single_file { label(out) } else { name.clone() };
        report.record(&key, text.as_bytes(), serde_json::json!({ "bytes": text.len() }));
    }
    eprintln!("wrote {} file(s) under {}", files.len(), out.display());
    report.finish(started);
    Ok((report, Outcome::Clean))
}

/// Canonical scenario-file rendering: pretty JSON plus a trailing newline.
fn render<T: serde::Serialize>(value: &T) -> Result<String> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    Ok(text)
}

/// A single file as itself, a directory as its sorted `.json` entries.
fn collect_inputs(input: &Path) -> Result<Vec<PathBuf>> {
    if input.is_file() {
        return Ok(vec![input.to_path_buf()]);
    }
    if input.is_dir() {
        let mut files: Vec<PathBuf> = fs::read_dir(input)
            .with_context(|| format!("cannot list {}", input.display()))?
            .filter_map(|entry| entry.ok().map(|e| e.path()))
            .filter(|p| p.is_file() && p.extension().is_some_and(|e| e == "json"))
            .collect();
        files.sort();
        if files.is_empty() {
            bail!("no .json scenario files under {}", input.display());
        }
        return Ok(files);
    }
    bail!("{} is neither a file nor a directory", input.display());
}

/// The report key for one input: its file name.
fn label(path: &Path) -> String {
    path.file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

/// Empty selection means each scenario's mechanism defaults.
fn parse_properties(names: &[String]) -> Result<Option<Vec<PropertyKind>>> {
    if names.is_empty() {
        return Ok(None);
    }
    let parsed = names
        .iter()
        .map(|n| {
            n.parse::<PropertyKind>()
                .with_context(|| format!("unknown property {n:?}"))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Some(parsed))
}

fn parse_money(text: &str, what: &str) -> Result<Money> {
    text.parse::<Money>()
        .with_context(|| format!("{what} wants a rational like \"3\" or \"5/4\", got {text:?}"))
}

fn parse_tfm(name: &str) -> Result<TfmKind> {
    match name.to_ascii_lowercase().replace('-', "_").as_str() {
        "double" => Ok(TfmKind::Double),
        "single" => Ok(TfmKind::Single),
        "single_prioritized" | "sp" => Ok(TfmKind::SinglePrioritized),
        other => bail!("unknown mechanism {other:?}: use double, single, or single-prioritized"),
    }
}

fn parse_regime(name: &str) -> Result<Regime> {
    match name.to_ascii_lowercase().replace('-', "_").as_str() {
        "dsic" => Ok(Regime::Dsic),
        "bribery" => Ok(Regime::Bribery),
        "congested" => Ok(Regime::Congested),
        "sp_congested" => Ok(Regime::SpCongested),
        other => bail!("unknown regime {other:?}: use dsic, bribery, congested, or sp-congested"),
    }
}

/// Violation beats inconclusive beats clean; preconditions stay clean
/// unless strict mode counts them.
fn classify(reports: &[PropertyReport], strict: bool) -> Outcome {
    let mut worst = Outcome::Clean;
    for r in reports {
        let one = match r.verdict {
            Verdict::Violated => Outcome::Violation,
            Verdict::InconclusiveAtGrid if strict || r.precondition_unmet.is_none() => {
                Outcome::Inconclusive
            }
            _ => Outcome::Clean,
        };
        worst = worst.max(one);
    }
    worst
}

/// One human line per scenario on standard error.
fn summarize(reports: &[PropertyReport]) -> String {
    reports
        .iter()
        .map(|r| format!("{} {}", r.property, r.verdict))
        .collect::<Vec<_>>()
        .join(", ")
}
