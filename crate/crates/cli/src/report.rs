//! Report emission: result tables, chart data, confusion matrices and
//! the feature-dimension audit. All files are plain CSV/JSON written
//! atomically; numbers are formatted deterministically so identical
//! runs produce byte-identical files.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use microexp_core::classify::{relative_rr, EvalReport};

use crate::cache::write_atomic;
use crate::config::DIM_PRESETS;
use crate::sweep::{CellResult, SweepResults};
use crate::{CliError, CliResult};

fn fmt_rr(rr: f64) -> String {
    format!("{rr:.6}")
}

fn fmt_alpha(alpha: Option<f64>) -> String {
    alpha.map(|a| a.to_string()).unwrap_or_default()
}

fn fmt_direction(direction: Option<u8>) -> String {
    direction.map(|d| d.to_string()).unwrap_or_default()
}

fn write_file(dir: &Path, name: &str, content: &str) -> CliResult<PathBuf> {
    let path = dir.join(name);
    write_atomic(&path, content.as_bytes())
        .map_err(|e| CliError::Data(format!("write {}: {e}", path.display())))?;
    Ok(path)
}

/// Confusion matrix as a labeled square CSV.
fn confusion_csv(labels: &[String], confusion: &[Vec<u64>]) -> String {
    let mut out = String::from("label");
    for l in labels {
        let _ = write!(out, ",{l}");
    }
    out.push('\n');
    for (l, row) in labels.iter().zip(confusion) {
        let _ = write!(out, "{l}");
        for c in row {
            let _ = write!(out, ",{c}");
        }
        out.push('\n');
    }
    out
}

/// Single-run outputs: the full report as JSON, one table row in the
/// result-table shape, and the confusion matrix.
pub fn emit_eval_report(
    dir: &Path,
    report: &EvalReport,
    descriptor: &str,
    direction: Option<u8>,
    r_v: usize,
    r: usize,
    alpha: Option<f64>,
) -> CliResult<Vec<PathBuf>> {
    let mut written = Vec::new();
    let json = serde_json::to_string_pretty(report).expect("report serialization");
    written.push(write_file(dir, "report.json", &json)?);

    let mut row = String::from("descriptor,direction,r_v,r,alpha,rr,macro_rr,folds\n");
    let _ = writeln!(
        row,
        "{descriptor},{},{r_v},{r},{},{},{},{}",
        fmt_direction(direction),
        fmt_alpha(alpha),
        fmt_rr(report.overall_rr),
        fmt_rr(report.macro_rr),
        report.folds.len()
    );
    written.push(write_file(dir, "result_row.csv", &row)?);

    written.push(write_file(
        dir,
        &format!("confusion_{descriptor}.csv"),
        &confusion_csv(&report.labels, &report.confusion),
    )?);
    Ok(written)
}

/// Best cell of a group by recognition rate (first wins ties).
fn best_cell<'a>(cells: impl Iterator<Item = &'a CellResult>) -> Option<&'a CellResult> {
    let mut best: Option<&CellResult> = None;
    for c in cells {
        if best.map_or(true, |b| c.rr > b.rr) {
            best = Some(c);
        }
    }
    best
}

/// Sweep outputs: the per-cell table, the per-direction summary, chart
/// data per alpha, and confusion matrices of the best cells.
pub fn emit_sweep_reports(dir: &Path, results: &SweepResults) -> CliResult<Vec<PathBuf>> {
    if results.is_empty() {
        return Err(CliError::Data("no sweep results to report".into()));
    }
    let mut written = Vec::new();

    // (a) every cell with its relative rate against the matching
    // (r_v, alpha) baseline.
    let mut cells = String::from("descriptor,direction,r_v,r,alpha,rr,relative_rr\n");
    for c in &results.cells {
        let rel = results
            .baseline_rr(c.r_v, c.alpha)
            .map(|base| fmt_rr(relative_rr(c.rr, base)))
            .unwrap_or_default();
        let _ = writeln!(
            cells,
            "{},{},{},{},{},{},{rel}",
            c.descriptor,
            fmt_direction(c.direction),
            c.r_v,
            c.r,
            fmt_alpha(c.alpha),
            fmt_rr(c.rr)
        );
    }
    for b in &results.baselines {
        let _ = writeln!(
            cells,
            "{},,{},,{},{},",
            b.descriptor,
            b.r_v,
            fmt_alpha(b.alpha),
            fmt_rr(b.rr)
        );
    }
    written.push(write_file(dir, "cells.csv", &cells)?);

    // Distinct alphas and directions in first-seen (sweep) order.
    let mut alphas: Vec<Option<f64>> = Vec::new();
    let mut directions: Vec<u8> = Vec::new();
    for c in &results.cells {
        if !alphas.contains(&c.alpha) {
            alphas.push(c.alpha);
        }
        if let Some(d) = c.direction {
            if !directions.contains(&d) {
                directions.push(d);
            }
        }
    }

    // (b) per (alpha, direction): the best radii and rate, against the
    // best baseline at the same alpha.
    let mut summary = String::from("alpha,direction,best_rr,best_r_v,best_r,relative_rr\n");
    let mut chart = String::from("alpha,direction,rr,relative_rr\n");
    for &alpha in &alphas {
        let base = results.best_baseline_rr(alpha);
        for &d in &directions {
            let best = best_cell(
                results
                    .cells
                    .iter()
                    .filter(|c| c.alpha == alpha && c.direction == Some(d)),
            );
            let Some(best) = best else { continue };
            let rel = base
                .map(|b| fmt_rr(relative_rr(best.rr, b)))
                .unwrap_or_default();
            let _ = writeln!(
                summary,
                "{},{d},{},{},{},{rel}",
                fmt_alpha(alpha),
                fmt_rr(best.rr),
                best.r_v,
                best.r
            );
            let _ = writeln!(chart, "{},{d},{},{rel}", fmt_alpha(alpha), fmt_rr(best.rr));
        }
    }
    written.push(write_file(dir, "summary.csv", &summary)?);
    written.push(write_file(dir, "chart.csv", &chart)?);

    // (c) confusion matrices of the overall best cells per descriptor.
    if let Some(best) = best_cell(results.cells.iter()) {
        written.push(write_file(
            dir,
            &format!("confusion_{}.csv", best.descriptor),
            &confusion_csv(&best.labels, &best.confusion),
        )?);
    }
    if let Some(best) = best_cell(results.baselines.iter()) {
        written.push(write_file(
            dir,
            &format!("confusion_{}.csv", best.descriptor),
            &confusion_csv(&best.labels, &best.confusion),
        )?);
    }
    Ok(written)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DimAuditRow {
    pub preset: &'static str,
    pub descriptor: &'static str,
    pub dim: usize,
    pub reference: usize,
    pub matches: bool,
    pub blocking: bool,
}

/// Feature-dimension audit of the built-in dataset presets.
pub fn dim_audit_rows() -> Vec<DimAuditRow> {
    let mut rows = Vec::new();
    for preset in DIM_PRESETS {
        for &(descriptor, reference, blocking) in preset.reference {
            let cfg = (preset.pipeline)(descriptor);
            let dim = cfg.dimension();
            rows.push(DimAuditRow {
                preset: preset.name,
                descriptor: descriptor.tag(),
                dim,
                reference,
                matches: dim == reference,
                blocking,
            });
        }
    }
    rows
}

pub fn emit_dim_audit(path: &Path) -> CliResult<Vec<DimAuditRow>> {
    let rows = dim_audit_rows();
    let mut out = String::from("preset,descriptor,dim,reference,match,blocking\n");
    for r in &rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            r.preset,
            r.descriptor,
            r.dim,
            r.reference,
            if r.matches { "yes" } else { "no" },
            if r.blocking { "yes" } else { "no" }
        );
    }
    write_atomic(path, out.as_bytes())
        .map_err(|e| CliError::Data(format!("write {}: {e}", path.display())))?;
    Ok(rows)
}
