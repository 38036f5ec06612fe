//! End-to-end pipeline execution: load, resize, temporal normalization,
//! motion magnification, descriptor extraction, LOSO evaluation.

use rayon::prelude::*;

use microexp_core::classify::{loso_evaluate, Dataset, EvalReport, LosoOptions};
use microexp_core::features::{extract, FeatureRecord, PipelineConfig};
use microexp_core::tim::normalize_length;
use microexp_core::volume::{load_manifest, load_volume, DatasetManifest, VideoVolume};

use crate::cache::{sha256_hex, Cache};
use crate::config::ExperimentConfig;
use crate::{CliError, CliResult};

pub struct Runner {
    pub cfg: ExperimentConfig,
    pub manifest: DatasetManifest,
    pub cache: Cache,
}

impl Runner {
    pub fn new(cfg: ExperimentConfig) -> CliResult<Runner> {
        let manifest =
            load_manifest(&cfg.manifest).map_err(|e| CliError::Data(e.to_string()))?;
        if manifest.entries.is_empty() {
            return Err(CliError::Data(format!(
                "manifest {} has no entries",
                cfg.manifest.display()
            )));
        }
        let cache = Cache::for_output_dir(&cfg.output_dir);
        Ok(Runner {
            cfg,
            manifest,
            cache,
        })
    }

    /// Load and preprocess one manifest entry. `alpha` activates the
    /// config's magnification settings for this run; the result is
    /// cached by raw content hash plus the preprocessing recipe.
    pub fn preprocessed_volume(
        &self,
        entry_index: usize,
        alpha: Option<f64>,
    ) -> CliResult<VideoVolume> {
        let entry = &self.manifest.entries[entry_index];
        let data_err = |e: microexp_core::Error| {
            CliError::Data(format!("{}: {e}", entry.video_path.display()))
        };
        let raw = load_volume(&entry.video_path, self.cfg.preprocess.resize).map_err(data_err)?;
        let mut recipe = String::new();
        if let Some(tim) = &self.cfg.preprocess.tim {
            recipe.push_str(&serde_json::to_string(tim).expect("tim serialization"));
        }
        let evm_params = match (alpha, &self.cfg.preprocess.evm) {
            (Some(a), Some(settings)) => Some(settings.resolve(a, entry.frame_rate)),
            (None, _) | (_, None) => None,
        };
        if let Some(p) = &evm_params {
            recipe.push_str(&serde_json::to_string(p).expect("evm serialization"));
        }
        if recipe.is_empty() {
            return Ok(raw);
        }
        let key = sha256_hex(&[raw.to_cache_bytes(), recipe.into_bytes()].concat());
        self.cache
            .volume(&key, || {
                let mut v = raw;
                if let Some(tim) = &self.cfg.preprocess.tim {
                    v = normalize_length(&v, tim)?;
                }
                if let Some(p) = &evm_params {
                    v = microexp_core::evm::magnify(&v, p)?;
                }
                Ok(v)
            })
            .map_err(data_err)
    }

    /// Extract one feature vector per manifest entry under `pipeline`.
    pub fn dataset(&self, pipeline: &PipelineConfig, alpha: Option<f64>) -> CliResult<Dataset> {
        let rows: Vec<CliResult<Vec<f64>>> = (0..self.manifest.entries.len())
            .into_par_iter()
            .map(|i| {
                let v = self.preprocessed_volume(i, alpha)?;
                let fv = extract(&v, pipeline).map_err(|e| {
                    CliError::Data(format!(
                        "{}: {e}",
                        self.manifest.entries[i].video_path.display()
                    ))
                })?;
                Ok(fv.values)
            })
            .collect();
        let mut ds = Dataset::default();
        for (i, row) in rows.into_iter().enumerate() {
            let entry = &self.manifest.entries[i];
            ds.push(row?, entry.label.clone(), entry.subject_id.clone());
        }
        Ok(ds)
    }

    /// Full pipeline for one descriptor configuration: preprocess,
    /// extract, then LOSO.
    pub fn evaluate(&self, pipeline: &PipelineConfig, alpha: Option<f64>) -> CliResult<EvalReport> {
        let ds = self.dataset(pipeline, alpha)?;
        loso_evaluate(
            &ds,
            &self.cfg.kernel,
            &LosoOptions {
                skip_degenerate_folds: self.cfg.skip_degenerate_folds,
            },
        )
        .map_err(|e| CliError::Data(e.to_string()))
    }

    /// The config's own pipeline, with its configured alpha if EVM is on.
    pub fn run_pipeline(&self) -> CliResult<EvalReport> {
        let alpha = self.cfg.preprocess.evm.as_ref().and_then(|e| e.alpha);
        if self.cfg.preprocess.evm.is_some() && alpha.is_none() {
            return Err(CliError::Config(
                "preprocess.evm is enabled but has no alpha (set one or use a sweep)".into(),
            ));
        }
        self.evaluate(&self.cfg.pipeline_config(), alpha)
    }

    /// Feature records for the `extract` subcommand.
    pub fn feature_records(
        &self,
        pipeline: &PipelineConfig,
        alpha: Option<f64>,
    ) -> CliResult<(Vec<FeatureRecord>, Vec<microexp_core::features::LayoutSpan>)> {
        let config_hash = self.cfg.config_hash();
        let mut records = Vec::with_capacity(self.manifest.entries.len());
        let mut layout = Vec::new();
        for i in 0..self.manifest.entries.len() {
            let v = self.preprocessed_volume(i, alpha)?;
            let fv = extract(&v, pipeline).map_err(|e| {
                CliError::Data(format!(
                    "{}: {e}",
                    self.manifest.entries[i].video_path.display()
                ))
            })?;
            if layout.is_empty() {
                layout = fv.layout.clone();
            }
            let entry = &self.manifest.entries[i];
            records.push(FeatureRecord {
                manifest_index: i as u32,
                subject: entry.subject_id.clone(),
                label: entry.label.clone(),
                descriptor: pipeline.descriptor.tag().to_string(),
                config_hash: config_hash.clone(),
                values: fv.values.iter().map(|&v| v as f32).collect(),
            });
        }
        Ok((records, layout))
    }
}
