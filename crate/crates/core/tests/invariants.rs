use hhtalpha::emd::{emd, EmdConfig};
use hhtalpha::enhance::select_cut;
use hhtalpha::signal::{frame_grid, overlap_add, read_wav, write_wav, Window, WindowKind};
use hhtalpha::stable::{nu_alpha, quantile};
use hhtalpha::Signal;
use proptest::prelude::*;

fn samples(len: std::ops::Range<usize>) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0f64..1.0, len)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn emd_is_complete(x in samples(32..600)) {
        let s = Signal::new(x, 8000).unwrap();
        let imfs = emd(&s, &EmdConfig::default()).unwrap();
        let err = imfs.reconstruct().iter().zip(s.samples()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        prop_assert!(err <= 1e-8 * s.peak().max(f64::MIN_POSITIVE));
    }

    #[test]
    fn quantile_ratio_ignores_shift_and_power_of_two_scale(
        x in samples(100..400),
        shift in -5.0f64..5.0,
        k in -4i32..4,
    ) {
        let Ok(base) = nu_alpha(&x) else { return Ok(()) };
        let c = 2f64.powi(k);
        let scaled: Vec<f64> = x.iter().map(|v| v * c).collect();
        prop_assert_eq!(nu_alpha(&scaled).unwrap(), base);
        let shifted: Vec<f64> = x.iter().map(|v| v + shift).collect();
        prop_assert!((nu_alpha(&shifted).unwrap() - base).abs() < 1e-9 * base);
    }

    #[test]
    fn quantile_is_monotone_in_p(x in samples(1..200), p in 0.0f64..1.0, q in 0.0f64..1.0) {
        prop_assume!(p > 0.0 && q > 0.0);
        let (lo, hi) = if p <= q { (p, q) } else { (q, p) };
        prop_assert!(quantile(&x, lo).unwrap() <= quantile(&x, hi).unwrap());
    }

    #[test]
    fn cut_is_monotone_in_threshold(a in prop::collection::vec(0.5f64..2.0, 1..12), r1 in 0.5f64..2.0, r2 in 0.5f64..2.0) {
        let (lo, hi) = if r1 <= r2 { (r1, r2) } else { (r2, r1) };
        let (zl, zh) = (select_cut(&a, lo), select_cut(&a, hi));
        prop_assert!(zl <= zh);
        prop_assert!(zh <= a.len());
        if zh > 0 {
            prop_assert!(a[zh - 1] <= hi);
        }
        prop_assert!(a[zh..].iter().all(|&v| v > hi));
    }

    #[test]
    fn overlap_add_restores_constants(len in 64usize..2000, frame_pow in 5u32..8, hop_div in 1usize..5) {
        let frame = 1usize << frame_pow;
        let step = (frame / (1 << hop_div)).max(1);
        let grid = frame_grid(len, frame, step).unwrap();
        let window = Window::new(WindowKind::Hann, frame);
        let frames: Vec<Vec<f64>> = (0..grid.count()).map(|_| window.values().to_vec()).collect();
        let y = overlap_add(&frames, &grid, &window).unwrap();
        prop_assert_eq!(y.len(), len);
        prop_assert!(y.iter().all(|v| (v - 1.0).abs() < 1e-9));
    }

    #[test]
    fn wav_round_trip_is_exact_for_f32(x in prop::collection::vec(-1.0f32..1.0, 0..500)) {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("x.wav");
        let s = Signal::new(x.iter().map(|&v| v as f64).collect(), 16000).unwrap();
        write_wav(&s, &path).unwrap();
        prop_assert_eq!(read_wav(&path).unwrap(), s);
    }
}
