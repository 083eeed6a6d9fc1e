//! Cross-product expansion, seeded parallel execution and report output.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use opjensen_core::convex_catalog::ScalarFunction;
use opjensen_core::jensen_checks::{
    generate_trial, Branch, CheckName, CheckReport, HypothesisMode, TrialSpec,
};
use opjensen_core::linalg::random::derive_seed;
use opjensen_core::linalg::ToleranceConfig;
use opjensen_core::positive_maps::MapKind;
use opjensen_core::Error as CoreError;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::CampaignConfig;
use crate::HarnessError;

/// Draws per trial before a boundary ambiguity is reported as an error.
pub const MAX_ATTEMPTS: u64 = 16;

/// One point of the parameter cross-product.
#[derive(Debug, Clone)]
pub struct Cell {
    pub spec: TrialSpec,
    pub label: String,
    pub seed: u64,
}

impl Cell {
    fn new(spec: TrialSpec, master_seed: u64) -> Self {
        let label = cell_label(&spec);
        let seed = derive_seed(master_seed, fnv1a(label.as_bytes()));
        Self { spec, label, seed }
    }

    pub fn function_label(&self) -> String {
        self.spec.function.as_ref().map(ScalarFunction::spec_string).unwrap_or_default()
    }

    pub fn map_label(&self) -> &'static str {
        self.spec.map_kind.map(|k| k.as_str()).unwrap_or("")
    }
}

fn cell_label(spec: &TrialSpec) -> String {
    let f = spec.function.as_ref().map(ScalarFunction::spec_string).unwrap_or_default();
    let m = spec.map_kind.map(|k| k.as_str()).unwrap_or("");
    format!(
        "{}|{}x{}|{f}|{m}|{},{}|{}",
        spec.check,
        spec.d1,
        spec.d2,
        spec.weights.0,
        spec.weights.1,
        spec.branch.as_str()
    )
}

fn fnv1a(bytes: &[u8]) -> u64 {
    bytes.iter().fold(0xcbf2_9ce4_8422_2325, |h, &b| (h ^ u64::from(b)).wrapping_mul(0x0100_0000_01b3))
}

/// Expands the config into compatible cells; incompatible combinations are returned
/// separately with the reason.
pub fn expand_cells(config: &CampaignConfig) -> Result<(Vec<Cell>, Vec<String>), HarnessError> {
    let v = config.validate()?;
    let mut cells = Vec::new();
    let mut skipped = Vec::new();
    for &check in &v.checks {
        let functions: Vec<Option<&ScalarFunction>> = if check.uses_function() {
            v.functions.iter().map(Some).collect()
        } else {
            vec![None]
        };
        let maps: Vec<Option<MapKind>> = if check.uses_map() {
            v.map_kinds.iter().copied().map(Some).collect()
        } else {
            vec![None]
        };
        let weights = if check.uses_weights() { config.weights.clone() } else { vec![(1.0, 1.0)] };
        let branches = if check == CheckName::MainTracial {
            config.branches.clone()
        } else {
            vec![Branch::Normalized]
        };
        let (before, skipped_before) = (cells.len(), skipped.len());
        for dim in &config.dims {
            let (d1, d2) = dim.pair();
            for f in &functions {
                for m in &maps {
                    for &(w1, w2) in &weights {
                        for &branch in &branches {
                            let mut spec = TrialSpec::new(check, d1, d2)
                                .with_weights(w1, w2)
                                .with_branch(branch);
                            spec.function = f.cloned();
                            spec.map_kind = *m;
                            match spec.incompatibility() {
                                Some(reason) => skipped.push(format!("{}: {reason}", cell_label(&spec))),
                                None => cells.push(Cell::new(spec, config.master_seed)),
                            }
                        }
                    }
                }
            }
        }
        if cells.len() == before {
            return Err(HarnessError::Usage(format!(
                "{check} has no compatible parameter cells: {}",
                skipped[skipped_before..].join("; ")
            )));
        }
    }
    Ok((cells, skipped))
}

/// Runs trial `t` of `cell`, redrawing on boundary ambiguity. Returns the report and
/// the number of redraws.
pub fn run_trial(cell: &Cell, t: usize, tol: &ToleranceConfig) -> Result<(CheckReport, u64), CoreError> {
    let base = derive_seed(cell.seed, t as u64);
    let mut last = None;
    for k in 0..MAX_ATTEMPTS {
        let seed = if k == 0 { base } else { derive_seed(base, k) };
        let outcome = generate_trial(&cell.spec, seed)
            .and_then(|input| input.run(seed, tol, HypothesisMode::Enforce));
        match outcome {
            Ok(mut report) => {
                report.params.insert("trial".into(), serde_json::json!(t));
                report.params.insert("resamples".into(), serde_json::json!(k));
                return Ok((report, k));
            }
            Err(e @ CoreError::BoundaryAmbiguity { .. }) => last = Some(e),
            Err(e) => return Err(e),
        }
    }
    Err(last.expect("at least one attempt"))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CampaignSummary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
    /// Trials that needed at least one redraw.
    pub resampled: usize,
    pub skipped_cells: usize,
    /// Most negative gap over all trials, 0 if none is negative.
    pub max_negative_gap: f64,
}

pub struct CampaignRun {
    pub summary: CampaignSummary,
    pub cells: Vec<Cell>,
    pub skipped: Vec<String>,
    /// Reports in [`schedule`] order, each tagged with its cell index.
    pub reports: Vec<(usize, CheckReport)>,
}

/// Assigns each check's trials round-robin over its cells: trial i of a check with n
/// cells runs as trial i / n of cell i mod n. Returns (cell, trial-in-cell) pairs in
/// output order.
pub fn schedule(cells: &[Cell], trials: usize) -> Vec<(usize, usize)> {
    let mut order = Vec::new();
    let mut start = 0;
    while start < cells.len() {
        let check = cells[start].spec.check;
        let n = cells[start..].iter().take_while(|c| c.spec.check == check).count();
        order.extend((0..trials).map(|i| (start + i % n, i / n)));
        start += n;
    }
    order
}

/// Executes `trials` trials per check on `jobs` threads (all cores when `None`) and writes
/// the reports when the config names an output path.
pub fn run_campaign(config: &CampaignConfig, jobs: Option<usize>) -> Result<CampaignRun, HarnessError> {
    let (cells, skipped) = expand_cells(config)?;
    let jobs_list = schedule(&cells, config.trials);
    let tol = config.tolerances;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.unwrap_or(0))
        .build()
        .map_err(|e| HarnessError::Usage(format!("cannot start worker pool: {e}")))?;
    let outcomes: Vec<Result<(CheckReport, u64), CoreError>> = pool.install(|| {
        jobs_list
            .par_iter()
            .map(|&(ci, t)| run_trial(&cells[ci], t, &tol))
            .collect()
    });

    let mut reports = Vec::with_capacity(outcomes.len());
    let mut summary = CampaignSummary {
        total: 0,
        passed: 0,
        failed: 0,
        resampled: 0,
        skipped_cells: skipped.len(),
        max_negative_gap: 0.0,
    };
    for (&(ci, t), outcome) in jobs_list.iter().zip(outcomes) {
        let (report, redraws) = outcome.map_err(|e| {
            eprintln!("{} trial {t}: {e}", cells[ci].label);
            HarnessError::Core(e)
        })?;
        summary.total += 1;
        if report.pass {
            summary.passed += 1;
        } else {
            summary.failed += 1;
        }
        if redraws > 0 {
            summary.resampled += 1;
        }
        summary.max_negative_gap = summary.max_negative_gap.min(report.gap);
        reports.push((ci, report));
    }
    let run = CampaignRun { summary, cells, skipped, reports };
    if let Some(path) = &config.out_path {
        write_jsonl(path, run.reports.iter().map(|(_, r)| r))?;
        write_csv(&csv_path(path), &run)?;
    }
    Ok(run)
}

pub fn csv_path(jsonl: &Path) -> PathBuf {
    jsonl.with_extension("csv")
}

pub fn write_jsonl<'a>(path: &Path, reports: impl IntoIterator<Item = &'a CheckReport>) -> Result<(), HarnessError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    let mut out = BufWriter::new(File::create(path)?);
    for report in reports {
        serde_json::to_writer(&mut out, report).map_err(std::io::Error::from)?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryRow {
    pub check: String,
    pub d1: usize,
    pub d2: usize,
    pub function: String,
    pub map_kind: String,
    pub trials: usize,
    pub failures: usize,
    pub min_gap: f64,
    pub max_gap: f64,
    pub mean_gap: f64,
}

/// Per (check, d1, d2, function, map_kind) aggregates in order of first appearance.
pub fn summary_rows(run: &CampaignRun) -> Vec<SummaryRow> {
    let mut rows: Vec<SummaryRow> = Vec::new();
    let mut sums: Vec<f64> = Vec::new();
    for (ci, report) in &run.reports {
        let cell = &run.cells[*ci];
        let key = (
            cell.spec.check.as_str(),
            cell.spec.d1,
            cell.spec.d2,
            cell.function_label(),
            cell.map_label(),
        );
        let idx = match rows.iter().position(|r| {
            (r.check.as_str(), r.d1, r.d2, r.function.clone(), r.map_kind.as_str()) == key
        }) {
            Some(idx) => idx,
            None => {
                rows.push(SummaryRow {
                    check: key.0.to_string(),
                    d1: key.1,
                    d2: key.2,
                    function: key.3,
                    map_kind: key.4.to_string(),
                    trials: 0,
                    failures: 0,
                    min_gap: f64::INFINITY,
                    max_gap: f64::NEG_INFINITY,
                    mean_gap: 0.0,
                });
                sums.push(0.0);
                rows.len() - 1
            }
        };
        let row = &mut rows[idx];
        row.trials += 1;
        row.failures += usize::from(!report.pass);
        row.min_gap = row.min_gap.min(report.gap);
        row.max_gap = row.max_gap.max(report.gap);
        sums[idx] += report.gap;
    }
    for (row, sum) in rows.iter_mut().zip(sums) {
        row.mean_gap = sum / row.trials as f64;
    }
    rows
}

pub fn write_csv(path: &Path, run: &CampaignRun) -> Result<(), HarnessError> {
    let mut w = csv::Writer::from_path(path).map_err(csv_io)?;
    for row in summary_rows(run) {
        w.serialize(row).map_err(csv_io)?;
    }
    w.flush()?;
    Ok(())
}

fn csv_io(e: csv::Error) -> HarnessError {
    HarnessError::Io(std::io::Error::other(e.to_string()))
}
