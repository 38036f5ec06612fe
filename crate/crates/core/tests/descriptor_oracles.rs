//! Bin-exact equivalence of the descriptor implementations against
//! independent brute-force evaluators on random volumes.

use microexp_core::hsdg::{hsdg_histogram, quantize, HsdgParams};
use microexp_core::lbp::{lbp_sip_histogram, lbp_top_histograms, CenterRegion, LbpTopParams};
use microexp_core::oracles;

fn volume_sizes(seed: u64) -> (usize, usize, usize) {
    // Deterministic small sizes in [7, 16] x [7, 16] x [5, 9].
    let w = 7 + (seed * 13 % 10) as usize;
    let h = 7 + (seed * 7 % 10) as usize;
    let t = 5 + (seed * 5 % 5) as usize;
    (w, h, t)
}

#[test]
fn lbp_top_matches_brute_force() {
    for case in 0..12u64 {
        let (w, h, t) = volume_sizes(case);
        let v = oracles::random_volume(w, h, t, 1000 + case);
        for &r in &[1usize, 2] {
            for &n in &[4usize, 8] {
                for &uniform in &[false, true] {
                    let margin = r;
                    if w < 2 * margin + 1 || h < 2 * margin + 1 || t < 2 * margin + 1 {
                        continue;
                    }
                    let region = CenterRegion::with_margins(&v, margin, margin, margin).unwrap();
                    let p = LbpTopParams::symmetric(r, n, uniform);
                    let got = lbp_top_histograms(&v, &region, &p).unwrap();
                    let want = oracles::oracle_lbp_top(&v, &region, (r, r, r), (n, n, n), uniform);
                    assert_eq!(got.xy, want[0], "case {case} r={r} n={n} u={uniform} XY");
                    assert_eq!(got.xt, want[1], "case {case} r={r} n={n} u={uniform} XT");
                    assert_eq!(got.yt, want[2], "case {case} r={r} n={n} u={uniform} YT");
                }
            }
        }
    }
}

#[test]
fn lbp_top_matches_brute_force_with_mixed_radii() {
    let v = oracles::random_volume(14, 12, 9, 77);
    let p = LbpTopParams {
        r_xv: 2,
        r_yv: 1,
        r_tv: 2,
        n_xy: 8,
        n_xt: 4,
        n_yt: 8,
        uniform: false,
    };
    let region = CenterRegion::with_margins(&v, 2, 1, 2).unwrap();
    let got = lbp_top_histograms(&v, &region, &p).unwrap();
    let want = oracles::oracle_lbp_top(&v, &region, (2, 1, 2), (8, 4, 8), false);
    assert_eq!([got.xy, got.xt, got.yt], want);
}

#[test]
fn lbp_sip_matches_brute_force() {
    for case in 0..10u64 {
        let (w, h, t) = volume_sizes(case);
        let v = oracles::random_volume(w, h, t, 2000 + case);
        for &r in &[1usize, 2] {
            if w < 2 * r + 1 || h < 2 * r + 1 || t < 2 * r + 1 {
                continue;
            }
            let region = CenterRegion::with_margins(&v, r, r, r).unwrap();
            let got = lbp_sip_histogram(&v, &region, (r, r, r)).unwrap();
            let (spatial, temporal) = oracles::oracle_lbp_sip(&v, &region, (r, r, r));
            assert_eq!(got.spatial, spatial, "case {case} r={r}");
            assert_eq!(got.temporal, temporal, "case {case} r={r}");
        }
    }
}

#[test]
fn hsdg_matches_brute_force_in_all_directions() {
    for case in 0..6u64 {
        let (w, h, t) = volume_sizes(case);
        let v = oracles::random_volume(w, h, t, 3000 + case);
        for &r in &[1usize, 2] {
            if w < 2 * r + 1 || h < 2 * r + 1 || t < 2 * r + 1 {
                continue;
            }
            let region = CenterRegion::with_margins(&v, r, r, r).unwrap();
            for direction in 1..=18u8 {
                for &n_quant in &[2usize, 5] {
                    let p = HsdgParams {
                        direction,
                        r_x: r,
                        r_y: r,
                        r_t: r,
                        n_quant,
                    };
                    let got = hsdg_histogram(&v, &region, &p).unwrap();
                    let want = oracles::oracle_hsdg(&v, &region, direction, (r, r, r), n_quant);
                    assert_eq!(got, want, "case {case} dir={direction} r={r} n={n_quant}");
                }
            }
        }
    }
}

#[test]
fn quantize_agrees_with_boundary_scan() {
    for n in [2usize, 3, 4, 7, 10, 32, 100, 511] {
        for g in -255..=255i64 {
            assert_eq!(
                quantize(g as f64, n),
                oracles::oracle_quantize(g as f64, n),
                "n={n} g={g}"
            );
        }
        // A few fractional gradients too.
        for g in [-254.5, -0.5, -1e-9, 0.25, 127.75, 254.9] {
            assert_eq!(quantize(g, n), oracles::oracle_quantize(g, n), "n={n} g={g}");
        }
    }
}

#[test]
fn oracle_sampler_agrees_with_production_sampler() {
    let v = oracles::random_volume(9, 8, 6, 55);
    for i in 0..200u64 {
        let x = (i as f64 * 0.37) % 8.0;
        let y = (i as f64 * 0.53) % 7.0;
        let t = (i as f64 * 0.29) % 5.0;
        let a = v.sample(x, y, t);
        let b = oracles::oracle_sample(&v, x, y, t);
        assert!((a - b).abs() < 1e-9, "({x}, {y}, {t}): {a} vs {b}");
    }
}
