//! Experiment configuration: one JSON file drives every pipeline and
//! sweep. Defaults are resolved once at load time and the effective
//! config is echoed into the output directory, so a run can always be
//! reproduced from its artifacts.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use microexp_core::classify::{KernelKind, KernelSpec};
use microexp_core::evm::EvmParams;
use microexp_core::features::{Normalize, PipelineConfig};
use microexp_core::tim::TimParams;

use crate::{CliError, CliResult};

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct EvmSettings {
    /// Magnification factor; sweeps override it per cell.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default = "default_levels")]
    pub pyramid_levels: usize,
    #[serde(default = "default_band_low")]
    pub band_low: f64,
    #[serde(default = "default_band_high")]
    pub band_high: f64,
    /// Overrides the per-entry manifest frame rate when set.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub frame_rate: Option<f64>,
    #[serde(default)]
    pub amplify_level0: bool,
}

fn default_levels() -> usize {
    4
}
fn default_band_low() -> f64 {
    0.4
}
fn default_band_high() -> f64 {
    8.0
}

pub const DEFAULT_FRAME_RATE: f64 = 100.0;

impl EvmSettings {
    /// Concrete parameters for one video: alpha from the sweep cell or
    /// the config, frame rate from config override, then manifest,
    /// then the default.
    pub fn resolve(&self, alpha: f64, entry_frame_rate: Option<f64>) -> EvmParams {
        EvmParams {
            alpha,
            pyramid_levels: self.pyramid_levels,
            band_low: self.band_low,
            band_high: self.band_high,
            frame_rate: self
                .frame_rate
                .or(entry_frame_rate)
                .unwrap_or(DEFAULT_FRAME_RATE),
            amplify_level0: self.amplify_level0,
        }
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize, PartialEq)]
pub struct PreprocessConfig {
    /// Spatial resize (width, height) applied at load time.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub resize: Option<(usize, usize)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tim: Option<TimParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub evm: Option<EvmSettings>,
}

/// How sweep radii map onto the descriptor parameter sets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum RadiusMode {
    /// R_V sets all three LBP radii and R all three gradient radii.
    #[default]
    Uniform,
    /// R_V sets only the temporal LBP radius, R only the temporal
    /// gradient radius; spatial radii stay at their base values.
    TemporalOnly,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize, PartialEq)]
pub struct SweepConfig {
    #[serde(default)]
    pub directions: Vec<u8>,
    #[serde(default)]
    pub r_v: Vec<usize>,
    #[serde(default)]
    pub r: Vec<usize>,
    /// Empty means the sweep runs without motion magnification.
    #[serde(default)]
    pub alphas: Vec<f64>,
    #[serde(default)]
    pub radius_mode: RadiusMode,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ExperimentConfig {
    pub manifest: PathBuf,
    #[serde(default)]
    pub preprocess: PreprocessConfig,
    pub pipeline: PipelineSpec,
    pub kernel: KernelSpec,
    #[serde(default)]
    pub sweep: SweepConfig,
    pub output_dir: PathBuf,
    #[serde(default)]
    pub workers: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub skip_degenerate_folds: bool,
}

/// Pipeline section of the config file; `normalize: null` defers to the
/// kernel (L1 for chi-square, none for linear).
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct PipelineSpec {
    pub grid: microexp_core::features::BlockGrid,
    pub lbp: microexp_core::lbp::LbpTopParams,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hsdg: Option<microexp_core::hsdg::HsdgParams>,
    pub descriptor: microexp_core::features::Descriptor,
    #[serde(default)]
    pub normalize: Option<Normalize>,
}

impl PipelineSpec {
    pub fn resolve(&self, kernel: &KernelSpec) -> PipelineConfig {
        let normalize = self.normalize.unwrap_or(match kernel.kind {
            KernelKind::ChiSquare => Normalize::PerBlockL1,
            KernelKind::Linear => Normalize::None,
        });
        PipelineConfig {
            grid: self.grid,
            lbp: self.lbp,
            hsdg: self.hsdg,
            descriptor: self.descriptor,
            normalize,
        }
    }
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        let mut cfg: ExperimentConfig = serde_json::from_str(&text)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new("."));
        if cfg.manifest.is_relative() {
            cfg.manifest = base.join(&cfg.manifest);
        }
        if cfg.output_dir.is_relative() {
            cfg.output_dir = base.join(&cfg.output_dir);
        }
        cfg.resolve_defaults();
        cfg.validate()?;
        Ok(cfg)
    }

    /// Make every deferred default explicit.
    pub fn resolve_defaults(&mut self) {
        self.pipeline.normalize = Some(
            self.pipeline
                .normalize
                .unwrap_or(match self.kernel.kind {
                    KernelKind::ChiSquare => Normalize::PerBlockL1,
                    KernelKind::Linear => Normalize::None,
                }),
        );
    }

    pub fn validate(&self) -> CliResult<Self> {
        let cfg_err = |e: microexp_core::Error| CliError::Config(e.to_string());
        self.pipeline.resolve(&self.kernel).validate().map_err(cfg_err)?;
        self.kernel.validate().map_err(cfg_err)?;
        if let Some((w, h)) = self.preprocess.resize {
            if w == 0 || h == 0 {
                return Err(CliError::Config(format!("resize {w}x{h} has a zero dimension")));
            }
        }
        if let Some(tim) = &self.preprocess.tim {
            if tim.target_frames < 2 {
                return Err(CliError::Config("tim.target_frames must be >= 2".into()));
            }
        }
        if let Some(evm) = &self.preprocess.evm {
            if evm.band_low < 0.0 || evm.band_low >= evm.band_high {
                return Err(CliError::Config(format!(
                    "evm band [{}, {}] is not a valid passband",
                    evm.band_low, evm.band_high
                )));
            }
            if evm.pyramid_levels == 0 {
                return Err(CliError::Config("evm.pyramid_levels must be >= 1".into()));
            }
        }
        for &d in &self.sweep.directions {
            if !(1..=18).contains(&d) {
                return Err(CliError::Config(format!("sweep direction {d} outside [1, 18]")));
            }
        }
        for &r in self.sweep.r_v.iter().chain(&self.sweep.r) {
            if r == 0 {
                return Err(CliError::Config("sweep radii must be >= 1".into()));
            }
        }
        for &a in &self.sweep.alphas {
            if !(a.is_finite() && a >= 0.0) {
                return Err(CliError::Config(format!("sweep alpha {a} must be >= 0")));
            }
        }
        Ok(self.clone())
    }

    /// The resolved pipeline for non-sweep runs.
    pub fn pipeline_config(&self) -> PipelineConfig {
        self.pipeline.resolve(&self.kernel)
    }

    pub fn canonical_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serialization")
    }

    /// Cache key of this exact configuration: any field change changes
    /// the key.
    pub fn config_hash(&self) -> String {
        let mut hasher = Sha256::new();
        hasher.update(self.canonical_json().as_bytes());
        hex::encode(&hasher.finalize()[..16])
    }

    /// Echo the fully resolved config next to the results.
    pub fn write_effective(&self, dir: &Path) -> CliResult<()> {
        crate::cache::write_atomic(
            &dir.join("effective_config.json"),
            self.canonical_json().as_bytes(),
        )
        .map_err(|e| CliError::Data(e.to_string()))
    }
}

/// Built-in configurations with published reference dimensions, used by
/// the dimension audit.
pub struct DimPreset {
    pub name: &'static str,
    pub pipeline: fn(microexp_core::features::Descriptor) -> PipelineConfig,
    /// (descriptor, reference dimension, blocking) rows; non-blocking
    /// rows are informational.
    pub reference: &'static [(microexp_core::features::Descriptor, usize, bool)],
}

pub fn smic_hs_pipeline(descriptor: microexp_core::features::Descriptor) -> PipelineConfig {
    PipelineConfig {
        grid: microexp_core::features::BlockGrid { bx: 8, by: 8, bt: 2 },
        lbp: microexp_core::lbp::LbpTopParams::symmetric(1, 4, false),
        hsdg: Some(microexp_core::hsdg::HsdgParams {
            direction: 1,
            r_x: 1,
            r_y: 1,
            r_t: 1,
            n_quant: 2,
        }),
        descriptor,
        normalize: Normalize::None,
    }
}

pub fn casme2_pipeline(descriptor: microexp_core::features::Descriptor) -> PipelineConfig {
    PipelineConfig {
        grid: microexp_core::features::BlockGrid { bx: 5, by: 5, bt: 1 },
        lbp: microexp_core::lbp::LbpTopParams {
            r_xv: 1,
            r_yv: 1,
            r_tv: 2,
            n_xy: 8,
            n_xt: 8,
            n_yt: 8,
            uniform: true,
        },
        hsdg: Some(microexp_core::hsdg::HsdgParams {
            direction: 14,
            r_x: 1,
            r_y: 1,
            r_t: 2,
            n_quant: 2,
        }),
        descriptor,
        normalize: Normalize::None,
    }
}

pub const DIM_PRESETS: &[DimPreset] = &[
    DimPreset {
        name: "smic-hs",
        pipeline: smic_hs_pipeline,
        reference: &[
            (microexp_core::features::Descriptor::LbpTop, 6144, true),
            (microexp_core::features::Descriptor::Hsdg, 256, true),
            (microexp_core::features::Descriptor::LbpSdg, 6400, true),
            // The compact six-point layout is 20 bins per block; the
            // published 60-bin figure is listed for reference only.
            (microexp_core::features::Descriptor::LbpSip, 7680, false),
        ],
    },
    DimPreset {
        name: "casme2",
        pipeline: casme2_pipeline,
        reference: &[
            (microexp_core::features::Descriptor::LbpTop, 4425, true),
            (microexp_core::features::Descriptor::Hsdg, 50, true),
            (microexp_core::features::Descriptor::LbpSdg, 4475, true),
            (microexp_core::features::Descriptor::LbpSip, 1500, false),
        ],
    },
];
