//! Brute-force per-definition descriptor evaluators.
//!
//! Test-only reference implementations, kept deliberately independent of
//! the production code paths: sampling is an explicit 8-corner weighted
//! sum, the direction set is spelled out literally, and quantization
//! scans its bin boundaries. Histograms from these evaluators must match
//! the optimized implementations bin-exactly.

use crate::lbp::CenterRegion;
use crate::volume::VideoVolume;

/// Weighted 8-corner trilinear sample of (value - bias), with the same
/// coordinate snapping rule as production sampling (1e-6) but written as
/// an explicit corner enumeration instead of nested lerps.
pub fn oracle_sample_rel(v: &VideoVolume, x: f64, y: f64, t: f64, bias: f64) -> f64 {
    let snap = |c: f64| {
        let r = c.round();
        if (c - r).abs() < 1e-6 {
            r
        } else {
            c
        }
    };
    let (x, y, t) = (snap(x), snap(y), snap(t));
    let corner = |c: f64, hi: usize| -> Vec<(usize, f64)> {
        let c0 = c.floor();
        let f = c - c0;
        let c0 = c0 as usize;
        if f == 0.0 {
            vec![(c0, 1.0)]
        } else {
            assert!(c0 + 1 <= hi, "coordinate {c} out of range");
            vec![(c0, 1.0 - f), (c0 + 1, f)]
        }
    };
    let xs = corner(x, v.width() - 1);
    let ys = corner(y, v.height() - 1);
    let ts = corner(t, v.frames() - 1);
    let mut acc = 0.0;
    for &(xi, wx) in &xs {
        for &(yi, wy) in &ys {
            for &(ti, wt) in &ts {
                acc += wx * wy * wt * (v.get(xi, yi, ti) as f64 - bias);
            }
        }
    }
    acc
}

pub fn oracle_sample(v: &VideoVolume, x: f64, y: f64, t: f64) -> f64 {
    oracle_sample_rel(v, x, y, t, 0.0)
}

/// Thresholding step with the documented 1e-9 intensity tie tolerance.
fn step(x: f64) -> u64 {
    u64::from(x >= -1e-9)
}

/// LBP code around one center on one plane, straight from the circle
/// definition with explicit sign-carrying radii.
fn oracle_plane_code(
    v: &VideoVolume,
    center: (usize, usize, usize),
    plane: Plane,
    r1: f64,
    r2: f64,
    n: usize,
) -> u64 {
    let (cx, cy, ct) = (center.0 as f64, center.1 as f64, center.2 as f64);
    let g_center = v.get(center.0, center.1, center.2) as f64;
    let mut code = 0u64;
    for i in 0..n {
        let angle = 2.0 * std::f64::consts::PI * i as f64 / n as f64;
        let (u, w) = (r1 * angle.sin(), r2 * angle.cos());
        let (px, py, pt) = match plane {
            Plane::Xy => (cx + u, cy + w, ct),
            Plane::Xt => (cx + u, cy, ct + w),
            Plane::Yt => (cx, cy + u, ct + w),
        };
        code += step(oracle_sample_rel(v, px, py, pt, g_center)) << i;
    }
    code
}

#[derive(Clone, Copy)]
enum Plane {
    Xy,
    Xt,
    Yt,
}

fn transitions(code: u64, p: usize) -> u32 {
    let mut count = 0;
    for i in 0..p {
        let a = (code >> i) & 1;
        let b = (code >> ((i + 1) % p)) & 1;
        if a != b {
            count += 1;
        }
    }
    count
}

fn oracle_uniform_bin(code: u64, p: usize) -> usize {
    if transitions(code, p) > 2 {
        return p * (p - 1) + 2;
    }
    let mut rank = 0usize;
    for other in 0..code {
        if transitions(other, p) <= 2 {
            rank += 1;
        }
    }
    rank
}

/// Reference LBP-TOP histograms (XY, XT, YT order).
pub fn oracle_lbp_top(
    v: &VideoVolume,
    region: &CenterRegion,
    radii: (usize, usize, usize),
    neighbors: (usize, usize, usize),
    uniform: bool,
) -> [Vec<u64>; 3] {
    let (r_xv, r_yv, r_tv) = (radii.0 as f64, radii.1 as f64, radii.2 as f64);
    let (n_xy, n_xt, n_yt) = neighbors;
    let bins = |n: usize| if uniform { n * (n - 1) + 3 } else { 1usize << n };
    let mut hists = [vec![0u64; bins(n_xy)], vec![0u64; bins(n_xt)], vec![0u64; bins(n_yt)]];
    for t in region.t0..=region.t1 {
        for y in region.y0..=region.y1 {
            for x in region.x0..=region.x1 {
                let center = (x, y, t);
                let specs = [
                    (Plane::Xy, r_xv, -r_yv, n_xy),
                    (Plane::Xt, r_xv, r_tv, n_xt),
                    (Plane::Yt, -r_yv, r_tv, n_yt),
                ];
                for (h, &(plane, r1, r2, n)) in hists.iter_mut().zip(&specs) {
                    let code = oracle_plane_code(v, center, plane, r1, r2, n);
                    let bin = if uniform {
                        oracle_uniform_bin(code, n)
                    } else {
                        code as usize
                    };
                    h[bin] += 1;
                }
            }
        }
    }
    hists
}

/// Reference six-point histograms: (16-bin spatial, 4-bin temporal).
pub fn oracle_lbp_sip(
    v: &VideoVolume,
    region: &CenterRegion,
    radii: (usize, usize, usize),
) -> (Vec<u64>, Vec<u64>) {
    let (r_x, r_y, r_t) = radii;
    let mut spatial = vec![0u64; 16];
    let mut temporal = vec![0u64; 4];
    for t in region.t0..=region.t1 {
        for y in region.y0..=region.y1 {
            for x in region.x0..=region.x1 {
                let g = v.get(x, y, t) as f64;
                let points = [
                    (x + r_x, y, t),
                    (x, y + r_y, t),
                    (x - r_x, y, t),
                    (x, y - r_y, t),
                ];
                let mut s = 0u64;
                for (i, &(px, py, pt)) in points.iter().enumerate() {
                    s += step(v.get(px, py, pt) as f64 - g) << i;
                }
                let mut tt = 0u64;
                tt += step(v.get(x, y, t - r_t) as f64 - g);
                tt += step(v.get(x, y, t + r_t) as f64 - g) << 1;
                spatial[s as usize] += 1;
                temporal[tt as usize] += 1;
            }
        }
    }
    (spatial, temporal)
}

/// The 18-point offset table written out literally.
pub fn oracle_direction_offsets(r_x: i64, r_y: i64, r_t: i64) -> [(i64, i64, i64); 18] {
    [
        (0, 0, -r_t),
        (-r_x, 0, -r_t),
        (-r_x, r_y, -r_t),
        (0, r_y, -r_t),
        (r_x, r_y, -r_t),
        (r_x, 0, -r_t),
        (r_x, -r_y, -r_t),
        (0, -r_y, -r_t),
        (-r_x, -r_y, -r_t),
        (0, 0, r_t),
        (-r_x, 0, r_t),
        (-r_x, r_y, r_t),
        (0, r_y, r_t),
        (r_x, r_y, r_t),
        (r_x, 0, r_t),
        (r_x, -r_y, r_t),
        (0, -r_y, r_t),
        (-r_x, -r_y, r_t),
    ]
}

/// Quantization by scanning the rounded-down bin boundaries.
pub fn oracle_quantize(g: f64, n: usize) -> usize {
    assert!((-255.0..=255.0).contains(&g));
    for k in 0..n {
        let lo = (-255.0 + 511.0 * k as f64 / n as f64).floor();
        let hi = if k + 1 == n {
            256.0
        } else {
            (-255.0 + 511.0 * (k + 1) as f64 / n as f64).floor()
        };
        if lo <= g && g < hi {
            return k;
        }
    }
    unreachable!("gradient {g} not covered by {n} bins");
}

/// Reference single-direction gradient histogram.
pub fn oracle_hsdg(
    v: &VideoVolume,
    region: &CenterRegion,
    direction: u8,
    radii: (usize, usize, usize),
    n_quant: usize,
) -> Vec<u64> {
    let offs = oracle_direction_offsets(radii.0 as i64, radii.1 as i64, radii.2 as i64);
    let (dx, dy, dt) = offs[(direction - 1) as usize];
    let mut hist = vec![0u64; n_quant];
    for t in region.t0..=region.t1 {
        for y in region.y0..=region.y1 {
            for x in region.x0..=region.x1 {
                let nx = (x as i64 + dx) as usize;
                let ny = (y as i64 + dy) as usize;
                let nt = (t as i64 + dt) as usize;
                let g = v.get(nx, ny, nt) as f64 - v.get(x, y, t) as f64;
                hist[oracle_quantize(g, n_quant)] += 1;
            }
        }
    }
    hist
}

/// Seeded integer-valued random volume for oracle comparisons.
pub fn random_volume(width: usize, height: usize, frames: usize, seed: u64) -> VideoVolume {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    VideoVolume::from_fn(width, height, frames, |_, _, _| rng.gen_range(0..=255) as f32)
}
