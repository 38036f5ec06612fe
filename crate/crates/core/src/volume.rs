//! Grayscale video volumes, dataset manifests and synthetic motion clips.
//!
//! A [`VideoVolume`] is a dense (x, y, t) lattice of intensities in
//! `[0, 255]`. Values are stored as `f32` so magnified volumes keep
//! sub-integer detail; frame loading and the synthetic generator produce
//! integer-valued data. The y axis increases downward (image-row
//! convention) and frames are ordered by lexicographic filename sort.

use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Coordinates within this distance of an integer are snapped before
/// interpolation.
pub const SNAP_EPS: f64 = 1e-6;

/// A dense grayscale video volume.
#[derive(Debug, Clone, PartialEq)]
pub struct VideoVolume {
    width: usize,
    height: usize,
    frames: usize,
    /// Row-major per frame: index = (t * height + y) * width + x.
    data: Vec<f32>,
}

impl VideoVolume {
    pub fn new(width: usize, height: usize, frames: usize, data: Vec<f32>) -> Result<Self> {
        if width == 0 || height == 0 || frames == 0 {
            return Err(Error::InvalidParams(format!(
                "volume dimensions must be positive, got {width}x{height}x{frames}"
            )));
        }
        if data.len() != width * height * frames {
            return Err(Error::InvalidParams(format!(
                "data length {} does not match {width}x{height}x{frames}",
                data.len()
            )));
        }
        Ok(VideoVolume {
            width,
            height,
            frames,
            data,
        })
    }

    pub fn from_fn(
        width: usize,
        height: usize,
        frames: usize,
        mut f: impl FnMut(usize, usize, usize) -> f32,
    ) -> Self {
        let mut data = Vec::with_capacity(width * height * frames);
        for t in 0..frames {
            for y in 0..height {
                for x in 0..width {
                    data.push(f(x, y, t));
                }
            }
        }
        VideoVolume {
            width,
            height,
            frames,
            data,
        }
    }

    pub fn constant(width: usize, height: usize, frames: usize, value: f32) -> Self {
        VideoVolume {
            width,
            height,
            frames,
            data: vec![value; width * height * frames],
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn frames(&self) -> usize {
        self.frames
    }

    pub fn data(&self) -> &[f32] {
        &self.data
    }

    #[inline]
    fn index(&self, x: usize, y: usize, t: usize) -> usize {
        (t * self.height + y) * self.width + x
    }

    /// Direct lattice access.
    #[inline]
    pub fn get(&self, x: usize, y: usize, t: usize) -> f32 {
        assert!(
            x < self.width && y < self.height && t < self.frames,
            "lattice access ({x}, {y}, {t}) outside {}x{}x{}",
            self.width,
            self.height,
            self.frames
        );
        self.data[self.index(x, y, t)]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, t: usize, value: f32) {
        let i = self.index(x, y, t);
        self.data[i] = value;
    }

    pub fn frame(&self, t: usize) -> &[f32] {
        assert!(t < self.frames, "frame {t} outside 0..{}", self.frames);
        let n = self.width * self.height;
        &self.data[t * n..(t + 1) * n]
    }

    /// Intensity at real-valued spatial coordinates within frame `t`.
    ///
    /// Integer coordinates return the stored value exactly; fractional
    /// coordinates interpolate bilinearly. Out-of-range coordinates are a
    /// contract violation.
    pub fn pixel(&self, x: f64, y: f64, t: usize) -> f64 {
        assert!(t < self.frames, "frame {t} outside 0..{}", self.frames);
        self.sample_t(x, y, t, 0.0)
    }

    /// Trilinear sample at real-valued (x, y, t).
    ///
    /// Each coordinate is snapped to the nearest integer when within
    /// [`SNAP_EPS`]; the remaining fractional axes interpolate linearly,
    /// so in-plane neighbor points reduce to bilinear interpolation
    /// within the respective plane.
    pub fn sample(&self, x: f64, y: f64, t: f64) -> f64 {
        self.sample_rel(x, y, t, 0.0)
    }

    /// Trilinear sample of the biased lattice (value - bias).
    ///
    /// Interpolating differences instead of subtracting afterwards keeps
    /// thresholding against `bias` exactly invariant under a constant
    /// intensity shift of integer-valued data.
    pub fn sample_rel(&self, x: f64, y: f64, t: f64, bias: f64) -> f64 {
        let t = snap(t);
        assert!(
            (0.0..=(self.frames - 1) as f64).contains(&t),
            "temporal coordinate {t} outside [0, {}]",
            self.frames - 1
        );
        let t0 = t.floor();
        let ft = t - t0;
        let t0 = t0 as usize;
        if ft == 0.0 {
            self.sample_t(x, y, t0, bias)
        } else {
            let a = self.sample_t(x, y, t0, bias);
            let b = self.sample_t(x, y, t0 + 1, bias);
            lerp(a, b, ft)
        }
    }

    fn sample_t(&self, x: f64, y: f64, t: usize, bias: f64) -> f64 {
        let x = snap(x);
        let y = snap(y);
        assert!(
            (0.0..=(self.width - 1) as f64).contains(&x),
            "x coordinate {x} outside [0, {}]",
            self.width - 1
        );
        assert!(
            (0.0..=(self.height - 1) as f64).contains(&y),
            "y coordinate {y} outside [0, {}]",
            self.height - 1
        );
        let x0 = x.floor();
        let y0 = y.floor();
        let fx = x - x0;
        let fy = y - y0;
        let (x0, y0) = (x0 as usize, y0 as usize);
        let g = |x: usize, y: usize| self.get(x, y, t) as f64 - bias;
        match (fx == 0.0, fy == 0.0) {
            (true, true) => g(x0, y0),
            (false, true) => lerp(g(x0, y0), g(x0 + 1, y0), fx),
            (true, false) => lerp(g(x0, y0), g(x0, y0 + 1), fy),
            (false, false) => {
                let top = lerp(g(x0, y0), g(x0 + 1, y0), fx);
                let bot = lerp(g(x0, y0 + 1), g(x0 + 1, y0 + 1), fx);
                lerp(top, bot, fy)
            }
        }
    }

    /// Clamp-and-round view of a frame as 8-bit pixels.
    pub fn frame_u8(&self, t: usize) -> Vec<u8> {
        self.frame(t)
            .iter()
            .map(|&v| v.clamp(0.0, 255.0).round() as u8)
            .collect()
    }

    /// True when every sample is an integer in `[0, 255]`.
    pub fn is_integral(&self) -> bool {
        self.data
            .iter()
            .all(|&v| (0.0..=255.0).contains(&v) && v.fract() == 0.0)
    }

    /// Serialize to the `MXV1` cache format.
    ///
    /// Layout: magic `MXV1`, little-endian u32 width/height/frames, one
    /// flag byte (0 = u8 payload, 1 = f32 LE payload), then pixel data
    /// with x fastest, then y, then t. Integer-valued volumes use the u8
    /// payload so a load/export round trip is bit-identical.
    pub fn to_cache_bytes(&self) -> Vec<u8> {
        let integral = self.is_integral();
        let mut out = Vec::with_capacity(17 + self.data.len() * if integral { 1 } else { 4 });
        out.extend_from_slice(b"MXV1");
        out.extend_from_slice(&(self.width as u32).to_le_bytes());
        out.extend_from_slice(&(self.height as u32).to_le_bytes());
        out.extend_from_slice(&(self.frames as u32).to_le_bytes());
        out.push(u8::from(!integral));
        if integral {
            out.extend(self.data.iter().map(|&v| v as u8));
        } else {
            for &v in &self.data {
                out.extend_from_slice(&v.to_le_bytes());
            }
        }
        out
    }

    pub fn from_cache_bytes(path: &Path, bytes: &[u8]) -> Result<Self> {
        let bad = |msg: &str| Error::BadVolumeCache {
            path: path.to_path_buf(),
            msg: msg.to_string(),
        };
        if bytes.len() < 17 || &bytes[0..4] != b"MXV1" {
            return Err(bad("missing MXV1 header"));
        }
        let u32_at = |off: usize| {
            u32::from_le_bytes([bytes[off], bytes[off + 1], bytes[off + 2], bytes[off + 3]])
                as usize
        };
        let (width, height, frames) = (u32_at(4), u32_at(8), u32_at(12));
        let flag = bytes[16];
        let n = width
            .checked_mul(height)
            .and_then(|v| v.checked_mul(frames))
            .ok_or_else(|| bad("dimension overflow"))?;
        let payload = &bytes[17..];
        let data = match flag {
            0 => {
                if payload.len() != n {
                    return Err(bad("u8 payload length mismatch"));
                }
                payload.iter().map(|&b| b as f32).collect()
            }
            1 => {
                if payload.len() != n * 4 {
                    return Err(bad("f32 payload length mismatch"));
                }
                payload
                    .chunks_exact(4)
                    .map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]]))
                    .collect()
            }
            _ => return Err(bad("unknown payload flag")),
        };
        VideoVolume::new(width, height, frames, data)
    }

    pub fn write_cache(&self, path: &Path) -> Result<()> {
        let bytes = self.to_cache_bytes();
        let mut f = fs::File::create(path).map_err(|e| Error::io(path, e))?;
        f.write_all(&bytes).map_err(|e| Error::io(path, e))
    }

    pub fn read_cache(path: &Path) -> Result<Self> {
        let mut bytes = Vec::new();
        fs::File::open(path)
            .map_err(|e| Error::io(path, e))?
            .read_to_end(&mut bytes)
            .map_err(|e| Error::io(path, e))?;
        Self::from_cache_bytes(path, &bytes)
    }

    /// Write each frame as a binary PGM (P5) file `frame_NNNN.pgm`.
    pub fn write_pgm_frames(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        for t in 0..self.frames {
            let path = dir.join(format!("frame_{t:04}.pgm"));
            let mut out = Vec::with_capacity(self.width * self.height + 32);
            out.extend_from_slice(format!("P5\n{} {}\n255\n", self.width, self.height).as_bytes());
            out.extend_from_slice(&self.frame_u8(t));
            fs::write(&path, out).map_err(|e| Error::io(&path, e))?;
        }
        Ok(())
    }
}

#[inline]
fn lerp(a: f64, b: f64, t: f64) -> f64 {
    a + t * (b - a)
}

#[inline]
fn snap(v: f64) -> f64 {
    let r = v.round();
    if (v - r).abs() < SNAP_EPS {
        r
    } else {
        v
    }
}

/// ITU-R BT.601 luma weights.
#[inline]
fn luma(r: u8, g: u8, b: u8) -> f32 {
    (0.299 * r as f32 + 0.587 * g as f32 + 0.114 * b as f32).round()
}

fn decode_gray_frame(path: &Path) -> Result<(usize, usize, Vec<f32>)> {
    let img = image::open(path).map_err(|e| Error::Image {
        path: path.to_path_buf(),
        source: e,
    })?;
    let (w, h) = (img.width() as usize, img.height() as usize);
    let data = match img {
        image::DynamicImage::ImageLuma8(g) => g.into_raw().into_iter().map(f32::from).collect(),
        other => {
            let rgb = other.into_rgb8();
            rgb.pixels().map(|p| luma(p[0], p[1], p[2])).collect()
        }
    };
    Ok((w, h, data))
}

/// Bilinear resize of one frame using the align-centers convention.
fn resize_frame(src: &[f32], sw: usize, sh: usize, dw: usize, dh: usize) -> Vec<f32> {
    let mut out = Vec::with_capacity(dw * dh);
    let sx = sw as f64 / dw as f64;
    let sy = sh as f64 / dh as f64;
    for oy in 0..dh {
        let y = ((oy as f64 + 0.5) * sy - 0.5).clamp(0.0, (sh - 1) as f64);
        let y0 = y.floor() as usize;
        let y1 = (y0 + 1).min(sh - 1);
        let fy = y - y0 as f64;
        for ox in 0..dw {
            let x = ((ox as f64 + 0.5) * sx - 0.5).clamp(0.0, (sw - 1) as f64);
            let x0 = x.floor() as usize;
            let x1 = (x0 + 1).min(sw - 1);
            let fx = x - x0 as f64;
            let top = lerp(src[y0 * sw + x0] as f64, src[y0 * sw + x1] as f64, fx);
            let bot = lerp(src[y1 * sw + x0] as f64, src[y1 * sw + x1] as f64, fx);
            out.push(lerp(top, bot, fy).round() as f32);
        }
    }
    out
}

const FRAME_EXTENSIONS: &[&str] = &["pgm", "png", "pnm"];

/// Load a frame directory as a grayscale volume.
///
/// Frames are taken in lexicographic filename order; color inputs are
/// converted with BT.601 luma weights; `target_size` resizes each frame
/// by bilinear interpolation.
pub fn load_volume(frame_dir: &Path, target_size: Option<(usize, usize)>) -> Result<VideoVolume> {
    if let Some((w, h)) = target_size {
        if w == 0 || h == 0 {
            return Err(Error::InvalidParams(format!(
                "target size {w}x{h} has a zero dimension"
            )));
        }
    }
    let mut paths: Vec<PathBuf> = fs::read_dir(frame_dir)
        .map_err(|e| Error::io(frame_dir, e))?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| {
            p.extension()
                .and_then(|e| e.to_str())
                .map(|e| FRAME_EXTENSIONS.contains(&e.to_ascii_lowercase().as_str()))
                .unwrap_or(false)
        })
        .collect();
    paths.sort();
    if paths.is_empty() {
        return Err(Error::EmptyFrameDir(frame_dir.to_path_buf()));
    }

    let mut frames_data: Vec<f32> = Vec::new();
    let mut src_size: Option<(usize, usize)> = None;
    for path in &paths {
        let (w, h, frame) = decode_gray_frame(path)?;
        match src_size {
            None => src_size = Some((w, h)),
            Some((ww, hh)) if (w, h) != (ww, hh) => {
                return Err(Error::MixedFrameSizes {
                    path: path.clone(),
                    got_w: w as u32,
                    got_h: h as u32,
                    want_w: ww as u32,
                    want_h: hh as u32,
                })
            }
            _ => {}
        }
        match target_size {
            Some((dw, dh)) if (w, h) != (dw, dh) => {
                frames_data.extend(resize_frame(&frame, w, h, dw, dh));
            }
            _ => frames_data.extend(frame),
        }
    }
    let (sw, sh) = src_size.expect("at least one frame");
    let (w, h) = target_size.unwrap_or((sw, sh));
    VideoVolume::new(w, h, paths.len(), frames_data)
}

/// One video entry of a dataset manifest.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub video_path: PathBuf,
    pub subject_id: String,
    pub label: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub frame_rate: Option<f64>,
}

/// A parsed dataset manifest: ordered video entries with subject and label.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub entries: Vec<ManifestEntry>,
}

impl DatasetManifest {
    pub fn subjects(&self) -> Vec<&str> {
        let mut subjects: Vec<&str> = self.entries.iter().map(|e| e.subject_id.as_str()).collect();
        subjects.sort_unstable();
        subjects.dedup();
        subjects
    }

    pub fn labels(&self) -> Vec<&str> {
        let mut labels: Vec<&str> = self.entries.iter().map(|e| e.label.as_str()).collect();
        labels.sort_unstable();
        labels.dedup();
        labels
    }
}

/// Load and validate a manifest file (a UTF-8 JSON array of entries).
///
/// Entry paths are resolved relative to the manifest's directory and must
/// exist. Entry order is file order.
pub fn load_manifest(path: &Path) -> Result<DatasetManifest> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut entries: Vec<ManifestEntry> =
        serde_json::from_str(&text).map_err(|e| Error::ManifestParse {
            path: path.to_path_buf(),
            source: e,
        })?;
    let base = path.parent().unwrap_or(Path::new("."));
    let invalid = |entry: usize, msg: String| Error::ManifestInvalid {
        path: path.to_path_buf(),
        entry,
        msg,
    };
    let mut seen = std::collections::BTreeSet::new();
    for (i, e) in entries.iter_mut().enumerate() {
        if e.label.is_empty() {
            return Err(invalid(i, "empty label".into()));
        }
        if e.subject_id.is_empty() {
            return Err(invalid(i, "empty subject_id".into()));
        }
        if !seen.insert(e.video_path.clone()) {
            return Err(invalid(
                i,
                format!("duplicate video_path {}", e.video_path.display()),
            ));
        }
        if e.video_path.is_relative() {
            e.video_path = base.join(&e.video_path);
        }
        if !e.video_path.exists() {
            return Err(invalid(
                i,
                format!("video_path {} does not exist", e.video_path.display()),
            ));
        }
        if let Some(fr) = e.frame_rate {
            if !(fr.is_finite() && fr > 0.0) {
                return Err(invalid(i, format!("frame_rate {fr} is not positive")));
            }
        }
    }
    Ok(DatasetManifest { entries })
}

pub fn save_manifest(path: &Path, manifest: &DatasetManifest) -> Result<()> {
    let json =
        serde_json::to_string_pretty(&manifest.entries).expect("manifest serialization");
    fs::write(path, json).map_err(|e| Error::io(path, e))
}

/// Rigid-translation kinds for the synthetic generator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MotionKind {
    TranslateUp,
    TranslateDown,
    TranslateLeft,
    TranslateRight,
    Static,
}

impl MotionKind {
    /// Per-frame sampling offset for unit speed. The texture content
    /// moves opposite to the sampling offset.
    fn sampling_step(self) -> (f64, f64) {
        match self {
            MotionKind::TranslateUp => (0.0, 1.0),
            MotionKind::TranslateDown => (0.0, -1.0),
            MotionKind::TranslateLeft => (1.0, 0.0),
            MotionKind::TranslateRight => (-1.0, 0.0),
            MotionKind::Static => (0.0, 0.0),
        }
    }
}

/// Band-limited pseudo-random base texture, integer-valued.
fn base_texture(width: usize, height: usize, seed: u64) -> Vec<f32> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut tex: Vec<f64> = (0..width * height)
        .map(|_| rng.gen_range(0.0..256.0))
        .collect();
    // Wraparound box blurs kill the high frequencies; two passes of a
    // radius-2 separable box leave a smooth texture that survives
    // bilinear shifting.
    for _ in 0..2 {
        tex = box_blur_wrap(&tex, width, height, 2);
    }
    // Stretch back to a wide range so gradients are well above noise.
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for &v in &tex {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    let span = (hi - lo).max(1e-9);
    tex.iter()
        .map(|&v| (((v - lo) / span) * 235.0 + 10.0).round() as f32)
        .collect()
}

fn box_blur_wrap(src: &[f64], width: usize, height: usize, radius: usize) -> Vec<f64> {
    let mut tmp = vec![0.0; src.len()];
    let norm = 1.0 / (2 * radius + 1) as f64;
    for y in 0..height {
        for x in 0..width {
            let mut acc = 0.0;
            for d in -(radius as isize)..=(radius as isize) {
                let xx = (x as isize + d).rem_euclid(width as isize) as usize;
                acc += src[y * width + xx];
            }
            tmp[y * width + x] = acc * norm;
        }
    }
    let mut out = vec![0.0; src.len()];
    for y in 0..height {
        for x in 0..width {
            let mut acc = 0.0;
            for d in -(radius as isize)..=(radius as isize) {
                let yy = (y as isize + d).rem_euclid(height as isize) as usize;
                acc += tmp[yy * width + x];
            }
            out[y * width + x] = acc * norm;
        }
    }
    out
}

#[inline]
fn wrap_sample(tex: &[f32], width: usize, height: usize, x: f64, y: f64) -> f64 {
    let x = snap(x);
    let y = snap(y);
    let x0 = x.floor();
    let y0 = y.floor();
    let fx = x - x0;
    let fy = y - y0;
    let xi = (x0 as i64).rem_euclid(width as i64) as usize;
    let yi = (y0 as i64).rem_euclid(height as i64) as usize;
    let xj = (xi + 1) % width;
    let yj = (yi + 1) % height;
    let top = lerp(tex[yi * width + xi] as f64, tex[yi * width + xj] as f64, fx);
    let bot = lerp(tex[yj * width + xi] as f64, tex[yj * width + xj] as f64, fx);
    lerp(top, bot, fy)
}

/// A seeded texture translated by an arbitrary per-frame displacement
/// (in sampling-offset convention) with wraparound.
pub fn synth_displaced_volume(
    size: (usize, usize, usize),
    texture_seed: u64,
    offsets: &[(f64, f64)],
) -> VideoVolume {
    let (width, height, frames) = size;
    assert_eq!(offsets.len(), frames, "one sampling offset per frame");
    let tex = base_texture(width, height, texture_seed);
    VideoVolume::from_fn(width, height, frames, |x, y, t| {
        let (dx, dy) = offsets[t];
        wrap_sample(&tex, width, height, x as f64 + dx, y as f64 + dy).round() as f32
    })
}

/// Deterministic test clip: a band-limited texture translated rigidly by
/// `speed` pixels per frame with wraparound.
pub fn synth_motion_volume(
    kind: MotionKind,
    size: (usize, usize, usize),
    texture_seed: u64,
    speed: f64,
) -> Result<VideoVolume> {
    let (width, height, frames) = size;
    if width == 0 || height == 0 || frames == 0 {
        return Err(Error::InvalidParams(format!(
            "size must be positive, got {width}x{height}x{frames}"
        )));
    }
    if !(speed.is_finite() && speed >= 0.0) {
        return Err(Error::InvalidParams(format!(
            "speed must be non-negative, got {speed}"
        )));
    }
    let (sx, sy) = kind.sampling_step();
    let offsets: Vec<(f64, f64)> = (0..frames)
        .map(|t| (sx * speed * t as f64, sy * speed * t as f64))
        .collect();
    Ok(synth_displaced_volume(size, texture_seed, &offsets))
}
