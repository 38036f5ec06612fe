//! Cross-cutting descriptor properties: gray-shift invariance, mass
//! conservation, temporal duality of the direction set, and dimension
//! accounting across the configuration space.

use microexp_core::features::{
    extract, BlockGrid, Descriptor, Normalize, PipelineConfig,
};
use microexp_core::hsdg::{hsdg_histogram, HsdgParams};
use microexp_core::lbp::{lbp_sip_histogram, lbp_top_histograms, CenterRegion, LbpTopParams};
use microexp_core::oracles::random_volume;
use microexp_core::volume::VideoVolume;
use proptest::prelude::*;

fn shifted(v: &VideoVolume, c: f32) -> VideoVolume {
    VideoVolume::from_fn(v.width(), v.height(), v.frames(), |x, y, t| {
        v.get(x, y, t) + c
    })
}

#[test]
fn gray_shift_leaves_every_histogram_unchanged() {
    let mut cases = 0usize;
    for seed in 0..40u64 {
        let w = 8 + (seed % 5) as usize;
        let h = 8 + (seed % 4) as usize;
        let t = 5 + (seed % 3) as usize;
        // Headroom so +50 stays within sane intensity range; codes only
        // depend on differences either way.
        let v = {
            let r = random_volume(w, h, t, 7000 + seed);
            VideoVolume::from_fn(w, h, t, |x, y, tt| (r.get(x, y, tt) * 0.8).floor())
        };
        let region = CenterRegion::with_margins(&v, 1, 1, 1).unwrap();
        let lbp_params = LbpTopParams::symmetric(1, if seed % 2 == 0 { 4 } else { 8 }, seed % 3 == 0);
        let base_top = lbp_top_histograms(&v, &region, &lbp_params).unwrap();
        let base_sip = lbp_sip_histogram(&v, &region, (1, 1, 1)).unwrap();
        let direction = (seed % 18) as u8 + 1;
        let hsdg_params = HsdgParams {
            direction,
            r_x: 1,
            r_y: 1,
            r_t: 1,
            n_quant: 2 + (seed % 7) as usize,
        };
        let base_hsdg = hsdg_histogram(&v, &region, &hsdg_params).unwrap();

        for &c in &[1.0f32, 17.0, 50.0] {
            let vs = shifted(&v, c);
            assert_eq!(
                lbp_top_histograms(&vs, &region, &lbp_params).unwrap(),
                base_top,
                "seed {seed} shift {c} lbp_top"
            );
            assert_eq!(
                lbp_sip_histogram(&vs, &region, (1, 1, 1)).unwrap(),
                base_sip,
                "seed {seed} shift {c} lbp_sip"
            );
            assert_eq!(
                hsdg_histogram(&vs, &region, &hsdg_params).unwrap(),
                base_hsdg,
                "seed {seed} shift {c} hsdg"
            );
            cases += 3;
        }
    }
    assert!(cases >= 200, "want at least 200 checked cases, got {cases}");
}

#[test]
fn mass_conservation_across_descriptors() {
    for seed in 0..25u64 {
        let v = random_volume(10 + (seed % 4) as usize, 9, 6, 8000 + seed);
        let region = CenterRegion::with_margins(&v, 1, 1, 1).unwrap();
        let m = region.center_count() as u64;

        let p = LbpTopParams::symmetric(1, 8, seed % 2 == 0);
        let h = lbp_top_histograms(&v, &region, &p).unwrap();
        assert_eq!(h.xy.iter().sum::<u64>(), m);
        assert_eq!(h.xt.iter().sum::<u64>(), m);
        assert_eq!(h.yt.iter().sum::<u64>(), m);

        let sip = lbp_sip_histogram(&v, &region, (1, 1, 1)).unwrap();
        assert_eq!(sip.spatial.iter().sum::<u64>(), m);
        assert_eq!(sip.temporal.iter().sum::<u64>(), m);

        for direction in [1u8, 5, 10, 14, 18] {
            let hp = HsdgParams {
                direction,
                r_x: 1,
                r_y: 1,
                r_t: 1,
                n_quant: 4,
            };
            assert_eq!(hsdg_histogram(&v, &region, &hp).unwrap().iter().sum::<u64>(), m);
        }
    }
}

/// With the shared symmetric center region, the backward direction k and
/// its forward twin k+9 sample disjoint temporal extremes, so their
/// histograms are genuinely different features.
#[test]
fn backward_and_forward_halves_differ_on_random_volumes() {
    let v = random_volume(14, 14, 8, 4242);
    let region = CenterRegion::with_margins(&v, 1, 1, 1).unwrap();
    let mut differing = 0;
    for d in 1..=9u8 {
        let hist = |direction: u8| {
            hsdg_histogram(
                &v,
                &region,
                &HsdgParams {
                    direction,
                    r_x: 1,
                    r_y: 1,
                    r_t: 1,
                    n_quant: 8,
                },
            )
            .unwrap()
        };
        let back = hist(d);
        let fwd = hist(d + 9);
        let m = region.center_count() as u64;
        assert_eq!(back.iter().sum::<u64>(), m);
        assert_eq!(fwd.iter().sum::<u64>(), m);
        if back != fwd {
            differing += 1;
        }
    }
    assert!(differing >= 8, "only {differing}/9 direction pairs differ");
}

/// Reversing frame order swaps each direction with its temporal twin
/// exactly, because both halves share their spatial offsets.
#[test]
fn time_reversal_maps_direction_to_its_twin() {
    let v = random_volume(11, 10, 7, 999);
    let reversed = VideoVolume::from_fn(v.width(), v.height(), v.frames(), |x, y, t| {
        v.get(x, y, v.frames() - 1 - t)
    });
    let region = CenterRegion::with_margins(&v, 1, 1, 1).unwrap();
    for d in 1..=18u8 {
        let twin = if d <= 9 { d + 9 } else { d - 9 };
        let params = |direction: u8| HsdgParams {
            direction,
            r_x: 1,
            r_y: 1,
            r_t: 1,
            n_quant: 8,
        };
        let a = hsdg_histogram(&v, &region, &params(d)).unwrap();
        let b = hsdg_histogram(&reversed, &region, &params(twin)).unwrap();
        assert_eq!(a, b, "direction {d} vs reversed twin {twin}");
    }
}

#[test]
fn dimension_formula_covers_the_config_space() {
    // Closed-form accounting over the whole sweep space.
    for bx in 1..=5usize {
        for by in 1..=5usize {
            for bt in 1..=5usize {
                for &n in &[4usize, 8] {
                    for &uniform in &[false, true] {
                        for &n_quant in &[2usize, 4, 8] {
                            let cfg = PipelineConfig {
                                grid: BlockGrid::new(bx, by, bt).unwrap(),
                                lbp: LbpTopParams::symmetric(1, n, uniform),
                                hsdg: Some(HsdgParams {
                                    direction: 14,
                                    r_x: 1,
                                    r_y: 1,
                                    r_t: 1,
                                    n_quant,
                                }),
                                descriptor: Descriptor::LbpSdg,
                                normalize: Normalize::None,
                            };
                            let blocks = bx * by * bt;
                            let plane = if uniform { n * (n - 1) + 3 } else { 1 << n };
                            assert_eq!(cfg.dimension(), blocks * (3 * plane + n_quant));
                        }
                    }
                }
            }
        }
    }

    // Extraction agrees with the formula on a sampled subset.
    let v = random_volume(25, 25, 10, 31);
    for &(bx, by, bt, n, uniform, n_quant) in &[
        (1usize, 1usize, 1usize, 4usize, false, 2usize),
        (5, 5, 1, 8, true, 2),
        (3, 4, 2, 4, true, 4),
        (2, 2, 5, 8, false, 8),
        (4, 1, 3, 4, false, 3),
    ] {
        for descriptor in [
            Descriptor::LbpTop,
            Descriptor::Hsdg,
            Descriptor::LbpSdg,
            Descriptor::LbpSip,
            Descriptor::SipSdg,
        ] {
            let cfg = PipelineConfig {
                grid: BlockGrid::new(bx, by, bt).unwrap(),
                lbp: LbpTopParams::symmetric(1, n, uniform),
                hsdg: Some(HsdgParams {
                    direction: 10,
                    r_x: 1,
                    r_y: 1,
                    r_t: 1,
                    n_quant,
                }),
                descriptor,
                normalize: Normalize::None,
            };
            let fv = extract(&v, &cfg).unwrap();
            assert_eq!(fv.dim(), cfg.dimension(), "{descriptor:?} {bx}x{by}x{bt}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn bilinear_sample_stays_within_frame_bounds(
        seed in 0u64..1000,
        xf in 0.0f64..1.0,
        yf in 0.0f64..1.0,
        tf in 0.0f64..1.0,
    ) {
        let v = random_volume(7, 6, 5, seed);
        let x = xf * 6.0;
        let y = yf * 5.0;
        let t = tf * 4.0;
        let got = v.sample(x, y, t);
        prop_assert!((0.0..=255.0).contains(&got));
    }

    #[test]
    fn l1_normalized_spans_sum_to_one(seed in 0u64..200) {
        let v = random_volume(12, 12, 6, seed);
        let cfg = PipelineConfig {
            grid: BlockGrid::new(2, 2, 1).unwrap(),
            lbp: LbpTopParams::symmetric(1, 4, false),
            hsdg: Some(HsdgParams { direction: 14, r_x: 1, r_y: 1, r_t: 1, n_quant: 2 }),
            descriptor: Descriptor::LbpSdg,
            normalize: Normalize::PerBlockL1,
        };
        let fv = extract(&v, &cfg).unwrap();
        for span in &fv.layout {
            let sum: f64 = fv.span_values(span).iter().sum();
            prop_assert!((sum - 1.0).abs() < 1e-9, "span {:?} sums to {}", span, sum);
        }
    }
}
