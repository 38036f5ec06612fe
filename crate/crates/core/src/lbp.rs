//! LBP, LBP-TOP and LBP-SIP descriptors over video volumes.
//!
//! A center point is thresholded against an ordered circle of neighbors;
//! the resulting binary codes are histogrammed over a valid-center
//! region. LBP-TOP applies the circle on the XY, XT and YT planes with a
//! fixed sign pattern for the radii: XY uses (+r_xv, -r_yv), XT uses
//! (+r_xv, +r_tv) and YT uses (-r_yv, +r_tv). Neighbor points at
//! fractional coordinates are sampled by linear interpolation within
//! their plane.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::sync::Mutex;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::volume::VideoVolume;

/// Largest supported neighbor count; codes are table-mapped so the
/// per-plane bin count stays addressable.
pub const MAX_NEIGHBORS: usize = 16;

/// Intensity tie tolerance of the thresholding step, the counterpart of
/// the 1e-6 coordinate snap: interpolated differences this close to
/// zero are zero in exact arithmetic and count as "not darker".
pub const DIFF_EPS: f64 = 1e-9;

/// The sign step of the code: 1 when the neighbor-minus-center
/// difference is >= 0, with zero ties (up to [`DIFF_EPS`]) counting as 1.
#[inline]
pub fn threshold(diff: f64) -> bool {
    diff >= -DIFF_EPS
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LbpTopParams {
    pub r_xv: usize,
    pub r_yv: usize,
    pub r_tv: usize,
    pub n_xy: usize,
    pub n_xt: usize,
    pub n_yt: usize,
    pub uniform: bool,
}

impl LbpTopParams {
    pub fn symmetric(radius: usize, neighbors: usize, uniform: bool) -> Self {
        LbpTopParams {
            r_xv: radius,
            r_yv: radius,
            r_tv: radius,
            n_xy: neighbors,
            n_xt: neighbors,
            n_yt: neighbors,
            uniform,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.r_xv < 1 || self.r_yv < 1 || self.r_tv < 1 {
            return Err(Error::InvalidParams(format!(
                "radii must be >= 1, got ({}, {}, {})",
                self.r_xv, self.r_yv, self.r_tv
            )));
        }
        for (name, n) in [
            ("n_xy", self.n_xy),
            ("n_xt", self.n_xt),
            ("n_yt", self.n_yt),
        ] {
            if !(2..=MAX_NEIGHBORS).contains(&n) {
                return Err(Error::InvalidParams(format!(
                    "{name} must be in [2, {MAX_NEIGHBORS}], got {n}"
                )));
            }
        }
        Ok(())
    }

    /// Histogram length for a plane with `n` neighbors under these params.
    pub fn plane_bins(&self, n: usize) -> usize {
        if self.uniform {
            n * (n - 1) + 3
        } else {
            1 << n
        }
    }

    /// Total bins across the three planes.
    pub fn total_bins(&self) -> usize {
        self.plane_bins(self.n_xy) + self.plane_bins(self.n_xt) + self.plane_bins(self.n_yt)
    }
}

/// Inclusive index intervals of permissible center points.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CenterRegion {
    pub x0: usize,
    pub x1: usize,
    pub y0: usize,
    pub y1: usize,
    pub t0: usize,
    pub t1: usize,
}

impl CenterRegion {
    /// The full valid-center region of a volume under symmetric margins.
    pub fn with_margins(v: &VideoVolume, mx: usize, my: usize, mt: usize) -> Result<Self> {
        if v.width() < 2 * mx + 1 || v.height() < 2 * my + 1 || v.frames() < 2 * mt + 1 {
            return Err(Error::EmptyRegion {
                width: v.width(),
                height: v.height(),
                frames: v.frames(),
                mx,
                my,
                mt,
            });
        }
        Ok(CenterRegion {
            x0: mx,
            x1: v.width() - 1 - mx,
            y0: my,
            y1: v.height() - 1 - my,
            t0: mt,
            t1: v.frames() - 1 - mt,
        })
    }

    pub fn is_empty(&self) -> bool {
        self.x1 < self.x0 || self.y1 < self.y0 || self.t1 < self.t0
    }

    pub fn center_count(&self) -> usize {
        if self.is_empty() {
            0
        } else {
            (self.x1 - self.x0 + 1) * (self.y1 - self.y0 + 1) * (self.t1 - self.t0 + 1)
        }
    }

    pub fn centers(&self) -> impl Iterator<Item = (usize, usize, usize)> + '_ {
        let r = *self;
        (r.t0..=r.t1).flat_map(move |t| {
            (r.y0..=r.y1).flat_map(move |y| (r.x0..=r.x1).map(move |x| (x, y, t)))
        })
    }
}

/// Coordinates of the i-th of `n` circle points around (x, y) with signed
/// radii: (x + rx*sin(2*pi*i/n), y + ry*cos(2*pi*i/n)).
pub fn neighbor_coords(x: f64, y: f64, rx: f64, ry: f64, n: usize, i: usize) -> (f64, f64) {
    debug_assert!(i < n && n >= 1);
    let angle = 2.0 * PI * i as f64 / n as f64;
    (x + rx * angle.sin(), y + ry * angle.cos())
}

/// Binary code of a center against an ordered neighbor list.
///
/// Bit i is set when g(neighbor_i) - g(center) >= 0, a zero difference
/// counting as 1 (see [`threshold`]). Points may carry fractional
/// coordinates on any axis; the difference itself is interpolated so a
/// constant intensity shift cannot flip a bit.
pub fn lbp_code(v: &VideoVolume, center: (f64, f64, f64), neighbors: &[(f64, f64, f64)]) -> u32 {
    assert!(neighbors.len() <= 32, "code width limited to 32 bits");
    let g_c = v.sample(center.0, center.1, center.2);
    let mut code = 0u32;
    for (i, &(nx, ny, nt)) in neighbors.iter().enumerate() {
        if threshold(v.sample_rel(nx, ny, nt, g_c)) {
            code |= 1 << i;
        }
    }
    code
}

fn circular_transitions(code: u32, p: usize) -> u32 {
    let rotated = (code >> 1) | ((code & 1) << (p - 1));
    (code ^ rotated).count_ones()
}

/// Uniform-pattern lookup: codes with <= 2 circular transitions each get
/// a distinct bin (ordered by code value); all others share the final
/// overflow bin. Total bins = p*(p-1) + 3.
#[derive(Debug)]
pub struct UniformMap {
    table: Vec<u32>,
    bins: usize,
}

impl UniformMap {
    fn build(p: usize) -> Self {
        let size = 1usize << p;
        let uniform_count = p * (p - 1) + 2;
        let bins = uniform_count + 1;
        let mut table = vec![uniform_count as u32; size];
        let mut next = 0u32;
        for code in 0..size as u32 {
            if circular_transitions(code, p) <= 2 {
                table[code as usize] = next;
                next += 1;
            }
        }
        debug_assert_eq!(next as usize, uniform_count);
        UniformMap { table, bins }
    }

    pub fn bins(&self) -> usize {
        self.bins
    }

    pub fn map(&self, code: u32) -> u32 {
        self.table[code as usize]
    }
}

fn uniform_cache() -> &'static Mutex<BTreeMap<usize, &'static UniformMap>> {
    static CACHE: OnceLock<Mutex<BTreeMap<usize, &'static UniformMap>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(BTreeMap::new()))
}

/// Shared precomputed table for `p` neighbors (2..=16).
pub fn uniform_table(p: usize) -> &'static UniformMap {
    assert!(
        (2..=MAX_NEIGHBORS).contains(&p),
        "uniform mapping supports 2..={MAX_NEIGHBORS} neighbors, got {p}"
    );
    let mut cache = uniform_cache().lock().expect("uniform cache poisoned");
    cache
        .entry(p)
        .or_insert_with(|| Box::leak(Box::new(UniformMap::build(p))))
}

/// Bin of `code` under the uniform mapping for `p` neighbors.
pub fn uniform_map(code: u32, p: usize) -> u32 {
    assert!((code as u64) < (1u64 << p), "code {code} outside [0, 2^{p})");
    uniform_table(p).map(code)
}

/// Per-plane histograms of an LBP-TOP pass.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlaneHists {
    pub xy: Vec<u64>,
    pub xt: Vec<u64>,
    pub yt: Vec<u64>,
}

/// LBP-TOP histograms over every center of `region`.
pub fn lbp_top_histograms(
    v: &VideoVolume,
    region: &CenterRegion,
    p: &LbpTopParams,
) -> Result<PlaneHists> {
    p.validate()?;
    if region.is_empty() {
        return Err(Error::EmptyRegion {
            width: v.width(),
            height: v.height(),
            frames: v.frames(),
            mx: p.r_xv,
            my: p.r_yv,
            mt: p.r_tv,
        });
    }
    let (rx, ry, rt) = (p.r_xv as f64, p.r_yv as f64, p.r_tv as f64);
    let table_xy = p.uniform.then(|| uniform_table(p.n_xy));
    let table_xt = p.uniform.then(|| uniform_table(p.n_xt));
    let table_yt = p.uniform.then(|| uniform_table(p.n_yt));

    let mut xy = vec![0u64; p.plane_bins(p.n_xy)];
    let mut xt = vec![0u64; p.plane_bins(p.n_xt)];
    let mut yt = vec![0u64; p.plane_bins(p.n_yt)];

    let mut neighbors: Vec<(f64, f64, f64)> = Vec::with_capacity(MAX_NEIGHBORS);
    for (cx, cy, ct) in region.centers() {
        let (xf, yf, tf) = (cx as f64, cy as f64, ct as f64);

        neighbors.clear();
        for i in 0..p.n_xy {
            let (nx, ny) = neighbor_coords(xf, yf, rx, -ry, p.n_xy, i);
            neighbors.push((nx, ny, tf));
        }
        let code = lbp_code(v, (xf, yf, tf), &neighbors);
        let bin = table_xy.map_or(code, |t| t.map(code));
        xy[bin as usize] += 1;

        neighbors.clear();
        for i in 0..p.n_xt {
            let (nx, nt) = neighbor_coords(xf, tf, rx, rt, p.n_xt, i);
            neighbors.push((nx, yf, nt));
        }
        let code = lbp_code(v, (xf, yf, tf), &neighbors);
        let bin = table_xt.map_or(code, |t| t.map(code));
        xt[bin as usize] += 1;

        neighbors.clear();
        for i in 0..p.n_yt {
            let (ny, nt) = neighbor_coords(yf, tf, -ry, rt, p.n_yt, i);
            neighbors.push((xf, ny, nt));
        }
        let code = lbp_code(v, (xf, yf, tf), &neighbors);
        let bin = table_yt.map_or(code, |t| t.map(code));
        yt[bin as usize] += 1;
    }
    Ok(PlaneHists { xy, xt, yt })
}

/// Six-point LBP histograms: a 16-bin spatial part over the four axial
/// XY-plane neighbors and a 4-bin temporal part over the two temporal
/// neighbors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SipHists {
    pub spatial: Vec<u64>,
    pub temporal: Vec<u64>,
}

pub const SIP_SPATIAL_BINS: usize = 16;
pub const SIP_TEMPORAL_BINS: usize = 4;
pub const SIP_BINS: usize = SIP_SPATIAL_BINS + SIP_TEMPORAL_BINS;

/// LBP-SIP histograms over every center of `region`.
///
/// Spatial bit order: +x, +y, -x, -y. Temporal bit order: -t, +t.
pub fn lbp_sip_histogram(
    v: &VideoVolume,
    region: &CenterRegion,
    radii: (usize, usize, usize),
) -> Result<SipHists> {
    let (r_x, r_y, r_t) = radii;
    if r_x < 1 || r_y < 1 || r_t < 1 {
        return Err(Error::InvalidParams(format!(
            "radii must be >= 1, got ({r_x}, {r_y}, {r_t})"
        )));
    }
    if region.is_empty() {
        return Err(Error::EmptyRegion {
            width: v.width(),
            height: v.height(),
            frames: v.frames(),
            mx: r_x,
            my: r_y,
            mt: r_t,
        });
    }
    let mut spatial = vec![0u64; SIP_SPATIAL_BINS];
    let mut temporal = vec![0u64; SIP_TEMPORAL_BINS];
    for (cx, cy, ct) in region.centers() {
        let g_c = v.get(cx, cy, ct);
        let bit = |g: f32| u32::from(threshold((g - g_c) as f64));
        let s = bit(v.get(cx + r_x, cy, ct))
            | bit(v.get(cx, cy + r_y, ct)) << 1
            | bit(v.get(cx - r_x, cy, ct)) << 2
            | bit(v.get(cx, cy - r_y, ct)) << 3;
        let t = bit(v.get(cx, cy, ct - r_t)) | bit(v.get(cx, cy, ct + r_t)) << 1;
        spatial[s as usize] += 1;
        temporal[t as usize] += 1;
    }
    Ok(SipHists { spatial, temporal })
}
