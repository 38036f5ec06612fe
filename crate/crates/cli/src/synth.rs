//! Desk-scale synthetic dataset generator: rigid-motion clips grouped
//! into subjects, labeled by motion class, written as PGM frame
//! directories plus a manifest.

use std::path::{Path, PathBuf};

use microexp_core::volume::{
    save_manifest, synth_motion_volume, DatasetManifest, ManifestEntry, MotionKind,
};

use crate::{CliError, CliResult};

#[derive(Debug, Clone)]
pub struct SynthSpec {
    pub out_dir: PathBuf,
    pub subjects: usize,
    pub videos_per_class: usize,
    pub size: (usize, usize, usize),
    pub speed: f64,
    pub seed: u64,
    pub frame_rate: f64,
    /// (label, motion) classes; every subject records every class.
    pub classes: Vec<(String, MotionKind)>,
    pub emit_volumes: bool,
}

impl Default for SynthSpec {
    fn default() -> Self {
        SynthSpec {
            out_dir: PathBuf::from("synth"),
            subjects: 8,
            videos_per_class: 3,
            size: (32, 32, 8),
            speed: 1.0,
            seed: 7,
            frame_rate: 30.0,
            classes: vec![
                ("up".to_string(), MotionKind::TranslateUp),
                ("down".to_string(), MotionKind::TranslateDown),
            ],
            emit_volumes: false,
        }
    }
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E3779B97F4A7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D049BB133111EB);
    x ^ (x >> 31)
}

/// Generate the dataset and return the manifest path.
pub fn generate(spec: &SynthSpec) -> CliResult<PathBuf> {
    if spec.subjects == 0 || spec.videos_per_class == 0 || spec.classes.is_empty() {
        return Err(CliError::Config(
            "synth needs at least one subject, class and video".into(),
        ));
    }
    let data_err = |e: microexp_core::Error| CliError::Data(e.to_string());
    std::fs::create_dir_all(&spec.out_dir)
        .map_err(|e| CliError::Data(format!("{}: {e}", spec.out_dir.display())))?;

    let mut entries = Vec::new();
    for subject in 0..spec.subjects {
        for (class_idx, (label, kind)) in spec.classes.iter().enumerate() {
            for video in 0..spec.videos_per_class {
                // Unique texture per video, derived deterministically.
                let texture_seed = splitmix64(
                    spec.seed
                        ^ (subject as u64) << 32
                        ^ (class_idx as u64) << 16
                        ^ video as u64,
                );
                let volume =
                    synth_motion_volume(*kind, spec.size, texture_seed, spec.speed)
                        .map_err(data_err)?;
                let name = format!("s{subject:02}_{label}_{video}");
                let dir = spec.out_dir.join(&name);
                volume.write_pgm_frames(&dir).map_err(data_err)?;
                if spec.emit_volumes {
                    volume
                        .write_cache(&spec.out_dir.join(format!("{name}.mxv")))
                        .map_err(data_err)?;
                }
                entries.push(ManifestEntry {
                    video_path: PathBuf::from(&name),
                    subject_id: format!("s{subject:02}"),
                    label: label.clone(),
                    frame_rate: Some(spec.frame_rate),
                });
            }
        }
    }
    let manifest_path = spec.out_dir.join("manifest.json");
    save_manifest(&manifest_path, &DatasetManifest { entries }).map_err(data_err)?;
    Ok(manifest_path)
}

pub fn parse_classes(text: &str) -> CliResult<Vec<(String, MotionKind)>> {
    text.split(',')
        .map(|name| {
            let kind = match name.trim() {
                "up" => MotionKind::TranslateUp,
                "down" => MotionKind::TranslateDown,
                "left" => MotionKind::TranslateLeft,
                "right" => MotionKind::TranslateRight,
                "static" => MotionKind::Static,
                other => {
                    return Err(CliError::Config(format!(
                        "unknown class {other:?} (expected up, down, left, right or static)"
                    )))
                }
            };
            Ok((name.trim().to_string(), kind))
        })
        .collect()
}

/// Convenience for tests: generate into `dir` with the default
/// two-class spec and a caller-chosen seed.
pub fn generate_default_into(dir: &Path, seed: u64) -> CliResult<PathBuf> {
    generate(&SynthSpec {
        out_dir: dir.to_path_buf(),
        seed,
        ..SynthSpec::default()
    })
}
