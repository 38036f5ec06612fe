//! Eulerian motion magnification.
//!
//! Linear (intensity) magnification: each frame is decomposed into a
//! Laplacian pyramid, every pyramid-level pixel signal is bandpassed
//! over time with an ideal FFT filter, and `alpha` times the bandpassed
//! signal is added back before collapsing the pyramid. The DC bin is
//! always rejected, so static content passes through untouched.

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::volume::VideoVolume;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvmParams {
    /// Magnification factor.
    pub alpha: f64,
    /// Pyramid depth, including the lowpass residual level.
    pub pyramid_levels: usize,
    /// Temporal passband in Hz.
    pub band_low: f64,
    pub band_high: f64,
    /// Sampling rate of the clip in Hz.
    pub frame_rate: f64,
    /// Amplify the finest Laplacian level too (off by default: it holds
    /// mostly sensor noise).
    pub amplify_level0: bool,
}

impl EvmParams {
    pub fn with_alpha(alpha: f64) -> Self {
        EvmParams {
            alpha,
            ..EvmParams::default()
        }
    }

    pub fn validate(&self, width: usize, height: usize) -> Result<()> {
        if !(self.alpha.is_finite() && self.alpha >= 0.0) {
            return Err(Error::InvalidParams(format!(
                "alpha must be >= 0, got {}",
                self.alpha
            )));
        }
        let nyquist = self.frame_rate / 2.0;
        if !(self.band_low >= 0.0 && self.band_low < self.band_high && self.band_high <= nyquist) {
            return Err(Error::BandOutsideNyquist {
                low: self.band_low,
                high: self.band_high,
                nyquist,
            });
        }
        let max_levels = (width.min(height) as f64).log2().floor() as usize;
        if self.pyramid_levels < 1 || self.pyramid_levels > max_levels.max(1) {
            return Err(Error::PyramidTooDeep {
                levels: self.pyramid_levels,
                width,
                height,
            });
        }
        Ok(())
    }
}

impl Default for EvmParams {
    fn default() -> Self {
        EvmParams {
            alpha: 10.0,
            pyramid_levels: 4,
            band_low: 0.4,
            band_high: 8.0,
            frame_rate: 100.0,
            amplify_level0: false,
        }
    }
}

/// One grayscale plane with explicit dimensions.
#[derive(Clone)]
struct Plane {
    w: usize,
    h: usize,
    data: Vec<f64>,
}

impl Plane {
    fn zeros(w: usize, h: usize) -> Self {
        Plane {
            w,
            h,
            data: vec![0.0; w * h],
        }
    }
}

/// Separable 5-tap binomial blur with edge replication.
fn blur(src: &Plane) -> Plane {
    const K: [f64; 5] = [1.0 / 16.0, 4.0 / 16.0, 6.0 / 16.0, 4.0 / 16.0, 1.0 / 16.0];
    let (w, h) = (src.w, src.h);
    let mut tmp = Plane::zeros(w, h);
    for y in 0..h {
        for x in 0..w {
            let mut acc = 0.0;
            for (i, k) in K.iter().enumerate() {
                let xx = (x as isize + i as isize - 2).clamp(0, w as isize - 1) as usize;
                acc += k * src.data[y * w + xx];
            }
            tmp.data[y * w + x] = acc;
        }
    }
    let mut out = Plane::zeros(w, h);
    for y in 0..h {
        for x in 0..w {
            let mut acc = 0.0;
            for (i, k) in K.iter().enumerate() {
                let yy = (y as isize + i as isize - 2).clamp(0, h as isize - 1) as usize;
                acc += k * tmp.data[yy * w + x];
            }
            out.data[y * w + x] = acc;
        }
    }
    out
}

fn downsample(src: &Plane) -> Plane {
    let blurred = blur(src);
    let (w, h) = (src.w.div_ceil(2), src.h.div_ceil(2));
    let mut out = Plane::zeros(w, h);
    for y in 0..h {
        for x in 0..w {
            out.data[y * w + x] = blurred.data[(y * 2) * src.w + x * 2];
        }
    }
    out
}

/// Bilinear upsample to an explicit target size (align-centers).
fn upsample(src: &Plane, w: usize, h: usize) -> Plane {
    let mut out = Plane::zeros(w, h);
    let sx = src.w as f64 / w as f64;
    let sy = src.h as f64 / h as f64;
    for oy in 0..h {
        let y = ((oy as f64 + 0.5) * sy - 0.5).clamp(0.0, (src.h - 1) as f64);
        let y0 = y.floor() as usize;
        let y1 = (y0 + 1).min(src.h - 1);
        let fy = y - y0 as f64;
        for ox in 0..w {
            let x = ((ox as f64 + 0.5) * sx - 0.5).clamp(0.0, (src.w - 1) as f64);
            let x0 = x.floor() as usize;
            let x1 = (x0 + 1).min(src.w - 1);
            let fx = x - x0 as f64;
            let top = src.data[y0 * src.w + x0]
                + fx * (src.data[y0 * src.w + x1] - src.data[y0 * src.w + x0]);
            let bot = src.data[y1 * src.w + x0]
                + fx * (src.data[y1 * src.w + x1] - src.data[y1 * src.w + x0]);
            out.data[oy * w + ox] = top + fy * (bot - top);
        }
    }
    out
}

/// Laplacian pyramid; the last level is the lowpass residual.
fn laplacian_pyramid(frame: Plane, levels: usize) -> Vec<Plane> {
    let mut gauss = vec![frame];
    for _ in 1..levels {
        let next = downsample(gauss.last().unwrap());
        gauss.push(next);
    }
    let mut out = Vec::with_capacity(levels);
    for l in 0..levels - 1 {
        let up = upsample(&gauss[l + 1], gauss[l].w, gauss[l].h);
        let mut lap = Plane::zeros(gauss[l].w, gauss[l].h);
        for i in 0..lap.data.len() {
            lap.data[i] = gauss[l].data[i] - up.data[i];
        }
        out.push(lap);
    }
    out.push(gauss.pop().unwrap());
    out
}

fn collapse_pyramid(mut levels: Vec<Plane>) -> Plane {
    let mut acc = levels.pop().unwrap();
    while let Some(lap) = levels.pop() {
        let up = upsample(&acc, lap.w, lap.h);
        acc = Plane::zeros(lap.w, lap.h);
        for i in 0..acc.data.len() {
            acc.data[i] = up.data[i] + lap.data[i];
        }
    }
    acc
}

/// Frequency-bin passband mask for an ideal bandpass; bin 0 (DC) is
/// always rejected.
fn band_mask(frames: usize, frame_rate: f64, low: f64, high: f64) -> Vec<bool> {
    (0..frames)
        .map(|k| {
            if k == 0 {
                return false;
            }
            let k_fold = k.min(frames - k);
            let freq = k_fold as f64 * frame_rate / frames as f64;
            low <= freq && freq <= high
        })
        .collect()
}

/// Amplify subtle in-band temporal variation of `v` by `p.alpha`.
///
/// Output dimensions equal input dimensions; values are clamped to
/// [0, 255].
pub fn magnify(v: &VideoVolume, p: &EvmParams) -> Result<VideoVolume> {
    p.validate(v.width(), v.height())?;
    if v.frames() < 4 {
        return Err(Error::TooFewFrames {
            got: v.frames(),
            need: 4,
        });
    }
    let frames = v.frames();
    let levels = p.pyramid_levels;

    // Per-frame pyramids, reorganized as pyramid[level][frame].
    let mut pyramid: Vec<Vec<Plane>> = vec![Vec::with_capacity(frames); levels];
    for t in 0..frames {
        let mut plane = Plane::zeros(v.width(), v.height());
        for (dst, &src) in plane.data.iter_mut().zip(v.frame(t)) {
            *dst = src as f64;
        }
        for (l, level) in laplacian_pyramid(plane, levels).into_iter().enumerate() {
            pyramid[l].push(level);
        }
    }

    let mask = band_mask(frames, p.frame_rate, p.band_low, p.band_high);
    let mut planner = FftPlanner::new();
    let fwd = planner.plan_fft_forward(frames);
    let inv = planner.plan_fft_inverse(frames);
    let scale = 1.0 / frames as f64;

    let first_level = if p.amplify_level0 { 0 } else { 1 };
    let mut signal = vec![Complex::new(0.0, 0.0); frames];
    for level_stack in pyramid.iter_mut().skip(first_level) {
        let n = level_stack[0].data.len();
        for i in 0..n {
            for (t, c) in signal.iter_mut().enumerate() {
                *c = Complex::new(level_stack[t].data[i], 0.0);
            }
            fwd.process(&mut signal);
            for (c, &pass) in signal.iter_mut().zip(&mask) {
                if !pass {
                    *c = Complex::new(0.0, 0.0);
                }
            }
            inv.process(&mut signal);
            for (t, c) in signal.iter().enumerate() {
                level_stack[t].data[i] += p.alpha * c.re * scale;
            }
        }
    }

    let mut data = Vec::with_capacity(v.width() * v.height() * frames);
    for t in 0..frames {
        let levels_t: Vec<Plane> = pyramid.iter().map(|stack| stack[t].clone()).collect();
        let frame = collapse_pyramid(levels_t);
        data.extend(frame.data.iter().map(|&x| x.clamp(0.0, 255.0) as f32));
    }
    VideoVolume::new(v.width(), v.height(), frames, data)
}

/// Evenly spaced alpha values centered on `optimal`, clipped to >= 1.
pub fn alpha_sweep_schedule(optimal: f64, count: usize, step: f64) -> Vec<f64> {
    assert!(count >= 1, "count must be >= 1");
    let mid = (count as f64 - 1.0) / 2.0;
    (0..count)
        .map(|i| (optimal + (i as f64 - mid) * step).max(1.0))
        .collect()
}
