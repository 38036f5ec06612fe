//! Histogram of Single Direction Gradient.
//!
//! For one of 18 fixed spatiotemporal directions, the signed intensity
//! difference between a center point and its offset neighbor is
//! quantized into `n_quant` bins and histogrammed over the valid-center
//! region. Directions 1-9 look one temporal radius backward, directions
//! 10-18 forward, with the same spatial pattern in both halves; within a
//! half the spatial offsets walk 0, -x, (-x,+y), +y, (+x,+y), +x,
//! (+x,-y), -y, (-x,-y).
//!
//! The valid-center region is shared with the co-extracted LBP-TOP pass
//! and keeps symmetric temporal margins, so the backward and forward
//! halves sample disjoint temporal extremes and are genuinely different
//! features.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lbp::CenterRegion;
use crate::volume::VideoVolume;

pub const DIRECTION_COUNT: u8 = 18;

/// Largest quantization level with non-empty bins over the 511 possible
/// integer gradients.
pub const MAX_QUANT: usize = 511;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct HsdgParams {
    /// Direction index, 1..=18.
    pub direction: u8,
    pub r_x: usize,
    pub r_y: usize,
    pub r_t: usize,
    /// Quantization bin count N.
    pub n_quant: usize,
}

impl HsdgParams {
    pub fn validate(&self) -> Result<()> {
        if !(1..=DIRECTION_COUNT).contains(&self.direction) {
            return Err(Error::InvalidParams(format!(
                "direction must be in [1, {DIRECTION_COUNT}], got {}",
                self.direction
            )));
        }
        if self.r_x < 1 || self.r_y < 1 || self.r_t < 1 {
            return Err(Error::InvalidParams(format!(
                "radii must be >= 1, got ({}, {}, {})",
                self.r_x, self.r_y, self.r_t
            )));
        }
        if !(2..=MAX_QUANT).contains(&self.n_quant) {
            return Err(Error::InvalidParams(format!(
                "n_quant must be in [2, {MAX_QUANT}], got {}",
                self.n_quant
            )));
        }
        Ok(())
    }

    pub fn offset(&self) -> DirectionOffset {
        direction_offset(self.direction, self.r_x, self.r_y, self.r_t)
            .expect("validated direction")
    }
}

/// Integer lattice offset from a center to its sampled neighbor.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DirectionOffset {
    pub dx: i64,
    pub dy: i64,
    pub dt: i64,
}

/// Spatial sign pattern shared by both temporal halves, in direction order.
const SPATIAL_PATTERN: [(i64, i64); 9] = [
    (0, 0),
    (-1, 0),
    (-1, 1),
    (0, 1),
    (1, 1),
    (1, 0),
    (1, -1),
    (0, -1),
    (-1, -1),
];

/// The `direction`-th member of the 18-point offset set.
pub fn direction_offset(
    direction: u8,
    r_x: usize,
    r_y: usize,
    r_t: usize,
) -> Result<DirectionOffset> {
    if !(1..=DIRECTION_COUNT).contains(&direction) {
        return Err(Error::InvalidParams(format!(
            "direction must be in [1, {DIRECTION_COUNT}], got {direction}"
        )));
    }
    let idx = (direction - 1) as usize;
    let (sx, sy) = SPATIAL_PATTERN[idx % 9];
    let st = if idx < 9 { -1 } else { 1 };
    Ok(DirectionOffset {
        dx: sx * r_x as i64,
        dy: sy * r_y as i64,
        dt: st * r_t as i64,
    })
}

/// Signed gradient g(center + offset) - g(center).
pub fn sdg_gradient(v: &VideoVolume, center: (usize, usize, usize), off: &DirectionOffset) -> f64 {
    let (cx, cy, ct) = center;
    let nx = cx as i64 + off.dx;
    let ny = cy as i64 + off.dy;
    let nt = ct as i64 + off.dt;
    assert!(
        nx >= 0
            && ny >= 0
            && nt >= 0
            && (nx as usize) < v.width()
            && (ny as usize) < v.height()
            && (nt as usize) < v.frames(),
        "offset neighbor ({nx}, {ny}, {nt}) outside volume"
    );
    v.get(nx as usize, ny as usize, nt as usize) as f64 - v.get(cx, cy, ct) as f64
}

/// Lower boundary of quantization bin `k`: -255 + rounddown(511*k / n).
#[inline]
fn bin_floor(k: usize, n: usize) -> i64 {
    -255 + (511 * k as i64) / n as i64
}

/// Quantize a gradient in [-255, 255] into one of `n` bins.
///
/// Bin k covers [bin_floor(k), bin_floor(k+1)), with the last bin closed
/// at 255. Monotone and, for n <= 511, surjective onto [0, n-1].
pub fn quantize(g: f64, n: usize) -> usize {
    assert!((2..=MAX_QUANT).contains(&n), "n must be in [2, {MAX_QUANT}]");
    assert!(
        (-255.0..=255.0).contains(&g),
        "gradient {g} outside [-255, 255]"
    );
    // Largest k with bin_floor(k) <= g; boundaries are strictly
    // increasing for n <= 511 so a binary search would also do.
    let mut k = ((g + 255.0) * n as f64 / 511.0).floor() as usize;
    k = k.min(n - 1);
    while k > 0 && (bin_floor(k, n) as f64) > g {
        k -= 1;
    }
    while k + 1 < n && (bin_floor(k + 1, n) as f64) <= g {
        k += 1;
    }
    k
}

/// Histogram of quantized single-direction gradients over `region`.
///
/// The caller supplies the shared valid-center region of the pipeline;
/// it must keep every sampled neighbor in-volume.
pub fn hsdg_histogram(
    v: &VideoVolume,
    region: &CenterRegion,
    p: &HsdgParams,
) -> Result<Vec<u64>> {
    p.validate()?;
    if region.is_empty() {
        return Err(Error::EmptyRegion {
            width: v.width(),
            height: v.height(),
            frames: v.frames(),
            mx: p.r_x,
            my: p.r_y,
            mt: p.r_t,
        });
    }
    let off = p.offset();
    let fits = |c: usize, d: i64, extent: usize| {
        let n = c as i64 + d;
        n >= 0 && (n as usize) < extent
    };
    let ok = fits(region.x0, off.dx, v.width())
        && fits(region.x1, off.dx, v.width())
        && fits(region.y0, off.dy, v.height())
        && fits(region.y1, off.dy, v.height())
        && fits(region.t0, off.dt, v.frames())
        && fits(region.t1, off.dt, v.frames());
    if !ok {
        return Err(Error::InvalidParams(format!(
            "center region does not leave room for offset ({}, {}, {})",
            off.dx, off.dy, off.dt
        )));
    }
    let mut hist = vec![0u64; p.n_quant];
    for center in region.centers() {
        let g = sdg_gradient(v, center, &off);
        hist[quantize(g, p.n_quant)] += 1;
    }
    Ok(hist)
}
