//! Crate-wide error type.

use std::path::PathBuf;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("cannot decode image {path}: {source}")]
    Image {
        path: PathBuf,
        #[source]
        source: image::ImageError,
    },

    #[error("frame directory {0} contains no image frames")]
    EmptyFrameDir(PathBuf),

    #[error("frame {path} is {got_w}x{got_h} but earlier frames are {want_w}x{want_h}")]
    MixedFrameSizes {
        path: PathBuf,
        got_w: u32,
        got_h: u32,
        want_w: u32,
        want_h: u32,
    },

    #[error("manifest {path}: {source}")]
    ManifestParse {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },

    #[error("manifest {path}: {msg} at entry {entry}")]
    ManifestInvalid {
        path: PathBuf,
        entry: usize,
        msg: String,
    },

    #[error("volume cache {path}: {msg}")]
    BadVolumeCache { path: PathBuf, msg: String },

    #[error("feature file {path}: {msg}")]
    BadFeatureFile { path: PathBuf, msg: String },

    #[error("invalid parameter: {0}")]
    InvalidParams(String),

    #[error("volume has {got} frames but the operation requires at least {need}")]
    TooFewFrames { got: usize, need: usize },

    #[error("temporal band [{low}, {high}] Hz is outside (0, {nyquist}] Hz")]
    BandOutsideNyquist { low: f64, high: f64, nyquist: f64 },

    #[error("{levels}-level pyramid is too deep for a {width}x{height} frame")]
    PyramidTooDeep {
        levels: usize,
        width: usize,
        height: usize,
    },

    #[error("empty center region: volume {width}x{height}x{frames} cannot host margins ({mx}, {my}, {mt})")]
    EmptyRegion {
        width: usize,
        height: usize,
        frames: usize,
        mx: usize,
        my: usize,
        mt: usize,
    },

    #[error("block ({bx}, {by}, {bt}) of the partition has an empty center region")]
    EmptyBlock { bx: usize, by: usize, bt: usize },

    #[error("feature dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("chi-square kernel requires non-negative features (found {0})")]
    NegativeFeature(f64),

    #[error("training set contains a single class ({0})")]
    SingleClass(String),

    #[error("non-finite feature value in sample {0}")]
    NonFiniteFeature(usize),

    #[error("LOSO requires at least 2 distinct subjects (found {0})")]
    TooFewSubjects(usize),

    #[error("fold for subject {0} has a single-class training set")]
    DegenerateFold(String),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
