//! Temporal frame-count normalization.
//!
//! Resamples a clip to a fixed number of frames by piecewise-linear
//! blending along the time axis. Output frames at integral source
//! positions (always including both endpoints) are copied bit-exactly;
//! blended frames are rounded to the integer lattice, matching the 8-bit
//! provenance of the clips this runs on.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::volume::VideoVolume;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TimParams {
    pub target_frames: usize,
}

impl TimParams {
    pub fn new(target_frames: usize) -> Result<Self> {
        if target_frames < 2 {
            return Err(Error::InvalidParams(format!(
                "target_frames must be >= 2, got {target_frames}"
            )));
        }
        Ok(TimParams { target_frames })
    }
}

/// Resample `v` to exactly `p.target_frames` frames.
pub fn normalize_length(v: &VideoVolume, p: &TimParams) -> Result<VideoVolume> {
    if p.target_frames < 2 {
        return Err(Error::InvalidParams(format!(
            "target_frames must be >= 2, got {}",
            p.target_frames
        )));
    }
    if v.frames() < 2 {
        return Err(Error::TooFewFrames {
            got: v.frames(),
            need: 2,
        });
    }
    if v.frames() == p.target_frames {
        return Ok(v.clone());
    }

    let (w, h) = (v.width(), v.height());
    let plane = w * h;
    let scale = (v.frames() - 1) as f64 / (p.target_frames - 1) as f64;
    let mut data = Vec::with_capacity(plane * p.target_frames);
    for j in 0..p.target_frames {
        let pos = j as f64 * scale;
        let i0 = pos.floor() as usize;
        let frac = pos - i0 as f64;
        if frac < 1e-9 {
            data.extend_from_slice(v.frame(i0));
        } else if frac > 1.0 - 1e-9 {
            data.extend_from_slice(v.frame(i0 + 1));
        } else {
            let a = v.frame(i0);
            let b = v.frame(i0 + 1);
            data.extend(
                a.iter()
                    .zip(b)
                    .map(|(&a, &b)| ((1.0 - frac) * a as f64 + frac * b as f64).round() as f32),
            );
        }
    }
    VideoVolume::new(w, h, p.target_frames, data)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::volume::{synth_motion_volume, MotionKind};

    fn params(n: usize) -> TimParams {
        TimParams::new(n).unwrap()
    }

    #[test]
    fn identity_resample_is_bit_exact() {
        let mut v = synth_motion_volume(MotionKind::TranslateUp, (6, 6, 10), 1, 1.0).unwrap();
        // also for real-valued data
        v.set(2, 3, 4, 101.25);
        let out = normalize_length(&v, &params(10)).unwrap();
        assert_eq!(v, out);
    }

    #[test]
    fn two_to_three_midpoint_is_rounded_average() {
        let a = VideoVolume::from_fn(3, 2, 1, |x, y, _| (x * 40 + y * 11) as f32);
        let b = VideoVolume::from_fn(3, 2, 1, |x, y, _| (x * 13 + y * 90 + 5) as f32);
        let mut data = a.data().to_vec();
        data.extend_from_slice(b.data());
        let v = VideoVolume::new(3, 2, 2, data).unwrap();

        let out = normalize_length(&v, &params(3)).unwrap();
        assert_eq!(out.frames(), 3);
        assert_eq!(out.frame(0), v.frame(0));
        assert_eq!(out.frame(2), v.frame(1));
        for i in 0..6 {
            let expect = ((v.frame(0)[i] + v.frame(1)[i]) as f64 / 2.0).round() as f32;
            assert_eq!(out.frame(1)[i], expect);
        }
    }

    #[test]
    fn endpoints_preserved_on_downsample() {
        let v = synth_motion_volume(MotionKind::TranslateLeft, (8, 8, 20), 7, 1.0).unwrap();
        let out = normalize_length(&v, &params(10)).unwrap();
        assert_eq!(out.frame(0), v.frame(0));
        assert_eq!(out.frame(9), v.frame(19));
    }

    #[test]
    fn endpoints_preserved_for_many_combinations() {
        for &(n_in, n_out) in &[(2, 7), (5, 3), (9, 16), (16, 9), (3, 11), (12, 2)] {
            let v = synth_motion_volume(MotionKind::TranslateDown, (5, 5, n_in), 13, 1.0).unwrap();
            let out = normalize_length(&v, &params(n_out)).unwrap();
            assert_eq!(out.frame(0), v.frame(0), "{n_in}->{n_out} first frame");
            assert_eq!(
                out.frame(n_out - 1),
                v.frame(n_in - 1),
                "{n_in}->{n_out} last frame"
            );
        }
    }

    #[test]
    fn blend_stays_within_bracketing_frames() {
        let v = synth_motion_volume(MotionKind::TranslateUp, (7, 7, 5), 29, 1.0).unwrap();
        let out = normalize_length(&v, &params(9)).unwrap();
        let scale = 4.0 / 8.0;
        for j in 0..9 {
            let pos = j as f64 * scale;
            let (i0, i1) = (pos.floor() as usize, pos.ceil() as usize);
            for idx in 0..v.width() * v.height() {
                let lo = v.frame(i0)[idx].min(v.frame(i1)[idx]);
                let hi = v.frame(i0)[idx].max(v.frame(i1)[idx]);
                let got = out.frame(j)[idx];
                assert!(got >= lo && got <= hi, "frame {j} pixel {idx}: {got} outside [{lo}, {hi}]");
            }
        }
    }

    #[test]
    fn up_then_down_recovers_linear_volume_within_one_level() {
        // Per-pixel linear ramps in t are reproduced by linear resampling
        // up to intermediate rounding.
        let v = VideoVolume::from_fn(4, 4, 5, |x, y, t| (10 + 3 * t + x + y) as f32);
        let up = normalize_length(&v, &params(12)).unwrap();
        let back = normalize_length(&up, &params(5)).unwrap();
        for (a, b) in v.data().iter().zip(back.data()) {
            assert!((a - b).abs() <= 1.0, "{a} vs {b}");
        }
    }

    #[test]
    fn single_frame_input_is_an_error() {
        let v = VideoVolume::constant(3, 3, 1, 4.0);
        assert!(matches!(
            normalize_length(&v, &params(5)),
            Err(Error::TooFewFrames { got: 1, need: 2 })
        ));
    }
}
