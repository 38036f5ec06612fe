//! Direction/radius/alpha sweeps with per-cell caching.
//!
//! Each cell is an independent pipeline run; cells execute on the rayon
//! pool and results assemble in a fixed order regardless of scheduling.
//! Completed cells persist under the config hash, so re-running an
//! interrupted sweep recomputes only what is missing.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use microexp_core::features::{Descriptor, PipelineConfig};

use crate::config::{ExperimentConfig, RadiusMode};
use crate::pipeline::Runner;
use crate::{CliError, CliResult};

/// One evaluated sweep cell.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct CellResult {
    pub descriptor: String,
    /// None for the LBP-TOP baseline.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub direction: Option<u8>,
    pub r_v: usize,
    pub r: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    pub rr: f64,
    pub macro_rr: f64,
    pub fold_count: usize,
    pub labels: Vec<String>,
    pub confusion: Vec<Vec<u64>>,
    #[serde(default)]
    pub skipped_subjects: Vec<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepResults {
    pub cells: Vec<CellResult>,
    pub baselines: Vec<CellResult>,
}

impl SweepResults {
    pub fn is_empty(&self) -> bool {
        self.cells.is_empty() && self.baselines.is_empty()
    }

    /// Baseline recognition rate for a given (r_v, alpha) pair.
    pub fn baseline_rr(&self, r_v: usize, alpha: Option<f64>) -> Option<f64> {
        self.baselines
            .iter()
            .find(|b| b.r_v == r_v && b.alpha == alpha)
            .map(|b| b.rr)
    }

    /// Best baseline over all swept r_v at one alpha.
    pub fn best_baseline_rr(&self, alpha: Option<f64>) -> Option<f64> {
        self.baselines
            .iter()
            .filter(|b| b.alpha == alpha)
            .map(|b| b.rr)
            .max_by(|a, b| a.partial_cmp(b).expect("finite rr"))
    }
}

/// Cell coordinates of the Cartesian sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
enum Cell {
    Sdg {
        direction: u8,
        r_v: usize,
        r: usize,
        alpha: Option<f64>,
    },
    Baseline {
        r_v: usize,
        alpha: Option<f64>,
    },
}

fn alpha_tag(alpha: Option<f64>) -> String {
    match alpha {
        None => "noevm".to_string(),
        Some(a) => format!("a{}", a.to_string().replace('.', "p").replace('-', "m")),
    }
}

impl Cell {
    fn name(&self) -> String {
        match self {
            Cell::Sdg {
                direction,
                r_v,
                r,
                alpha,
            } => format!("sdg_d{direction:02}_rv{r_v}_r{r}_{}", alpha_tag(*alpha)),
            Cell::Baseline { r_v, alpha } => {
                format!("top_rv{r_v}_{}", alpha_tag(*alpha))
            }
        }
    }
}

/// Patch the base pipeline with one cell's radii and direction.
fn cell_pipeline(cfg: &ExperimentConfig, cell: &Cell) -> CliResult<PipelineConfig> {
    let mut p = cfg.pipeline_config();
    let mode = cfg.sweep.radius_mode;
    let apply_rv = |p: &mut PipelineConfig, r_v: usize| {
        p.lbp.r_tv = r_v;
        if mode == RadiusMode::Uniform {
            p.lbp.r_xv = r_v;
            p.lbp.r_yv = r_v;
        }
    };
    match *cell {
        Cell::Sdg {
            direction, r_v, r, ..
        } => {
            p.descriptor = Descriptor::LbpSdg;
            apply_rv(&mut p, r_v);
            let h = p.hsdg.as_mut().ok_or_else(|| {
                CliError::Config("direction sweep requires pipeline.hsdg params".into())
            })?;
            h.direction = direction;
            h.r_t = r;
            if mode == RadiusMode::Uniform {
                h.r_x = r;
                h.r_y = r;
            }
        }
        Cell::Baseline { r_v, .. } => {
            p.descriptor = Descriptor::LbpTop;
            apply_rv(&mut p, r_v);
        }
    }
    Ok(p)
}

fn evaluate_cell(runner: &Runner, cell: &Cell) -> CliResult<CellResult> {
    let pipeline = cell_pipeline(&runner.cfg, cell)?;
    let (alpha, direction, r_v, r) = match *cell {
        Cell::Sdg {
            direction,
            r_v,
            r,
            alpha,
        } => (alpha, Some(direction), r_v, r),
        Cell::Baseline { r_v, alpha } => (alpha, None, r_v, 0),
    };
    let report = runner.evaluate(&pipeline, alpha)?;
    Ok(CellResult {
        descriptor: pipeline.descriptor.tag().to_string(),
        direction,
        r_v,
        r,
        alpha,
        rr: report.overall_rr,
        macro_rr: report.macro_rr,
        fold_count: report.folds.len(),
        labels: report.labels,
        confusion: report.confusion,
        skipped_subjects: report.skipped_subjects,
    })
}

/// Run the configured direction sweep plus its LBP-TOP baselines.
pub fn run_direction_sweep(runner: &Runner) -> CliResult<SweepResults> {
    let sweep = &runner.cfg.sweep;
    if sweep.directions.is_empty() {
        return Err(CliError::Config("sweep.directions is empty".into()));
    }
    if sweep.r_v.is_empty() || sweep.r.is_empty() {
        return Err(CliError::Config("sweep.r_v and sweep.r must be non-empty".into()));
    }
    if runner.cfg.preprocess.evm.is_none() && !sweep.alphas.is_empty() {
        return Err(CliError::Config(
            "sweep.alphas given but preprocess.evm is not configured".into(),
        ));
    }
    let alphas: Vec<Option<f64>> = if sweep.alphas.is_empty() {
        vec![None]
    } else {
        sweep.alphas.iter().copied().map(Some).collect()
    };

    let mut cells = Vec::new();
    for &alpha in &alphas {
        for &direction in &sweep.directions {
            for &r_v in &sweep.r_v {
                for &r in &sweep.r {
                    cells.push(Cell::Sdg {
                        direction,
                        r_v,
                        r,
                        alpha,
                    });
                }
            }
        }
        for &r_v in &sweep.r_v {
            cells.push(Cell::Baseline { r_v, alpha });
        }
    }

    let config_hash = runner.cfg.config_hash();
    let outcomes: Vec<CliResult<CellResult>> = cells
        .par_iter()
        .map(|cell| {
            runner
                .cache
                .cell(&config_hash, &cell.name(), || evaluate_cell(runner, cell))
        })
        .collect();

    let mut results = SweepResults {
        cells: Vec::new(),
        baselines: Vec::new(),
    };
    for (cell, outcome) in cells.iter().zip(outcomes) {
        // A failed cell aborts the sweep; completed neighbors stay cached.
        let result = outcome.map_err(|e| CliError::Data(format!("cell {}: {e}", cell.name())))?;
        match cell {
            Cell::Sdg { .. } => results.cells.push(result),
            Cell::Baseline { .. } => results.baselines.push(result),
        }
    }
    Ok(results)
}
