use erpsift::signal::{
    average_erp, bandpass_filter, baseline_correct, reject_trials, segment_epochs, ContinuousRecording, Epoch, Event,
    SamplingMeta,
};
use proptest::prelude::*;

fn meta() -> SamplingMeta {
    SamplingMeta::new(256.0, 16, 48).unwrap()
}

fn recording(values: &[f64], channels: usize, offset: f64) -> ContinuousRecording {
    let n = values.len() / channels;
    let samples: Vec<Vec<f64>> = (0..channels)
        .map(|c| values[c * n..(c + 1) * n].iter().map(|v| v + offset).collect())
        .collect();
    let events = (0..)
        .map(|i| 20 + i * 70)
        .take_while(|&s| s + 48 < n)
        .map(|s| Event {
            sample_index: s,
            condition: "word".into(),
            behavioral_correct: true,
        })
        .collect();
    let names = (0..channels).map(|c| format!("E{c}")).collect();
    ContinuousRecording::new(names, samples, 256.0, events).unwrap()
}

fn epoch_strategy() -> impl Strategy<Value = Epoch> {
    (prop::collection::vec(-200.0f64..200.0, 3 * 64), any::<bool>()).prop_map(|(v, ok)| {
        let rows = v.chunks(64).map(|c| c.to_vec()).collect();
        Epoch::new(vec!["a".into(), "b".into(), "c".into()], rows, meta(), "w", ok).unwrap()
    })
}

fn average_of(rec: &ContinuousRecording) -> Vec<Vec<f64>> {
    let seg = segment_epochs(rec, &meta()).unwrap();
    let corrected: Vec<Epoch> = seg.epochs.iter().map(|e| baseline_correct(e).unwrap()).collect();
    average_erp(&corrected).unwrap().channel_values
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn constant_offset_leaves_average_unchanged(values in prop::collection::vec(-50.0f64..50.0, 2 * 400), c in -1e3f64..1e3) {
        let a = average_of(&recording(&values, 2, 0.0));
        let b = average_of(&recording(&values, 2, c));
        for (ra, rb) in a.iter().zip(&b) {
            for (x, y) in ra.iter().zip(rb) {
                prop_assert!((x - y).abs() <= 1e-9 * (1.0 + c.abs()), "{x} vs {y}");
            }
        }
    }

    #[test]
    fn baseline_correct_is_idempotent(ep in epoch_strategy()) {
        let once = baseline_correct(&ep).unwrap();
        let twice = baseline_correct(&once).unwrap();
        for (a, b) in once.channel_values.iter().flatten().zip(twice.channel_values.iter().flatten()) {
            prop_assert!((a - b).abs() <= 1e-12);
        }
    }

    #[test]
    fn average_commutes_with_channel_permutation(eps in prop::collection::vec(epoch_strategy(), 1..5), perm in Just(vec![2usize, 0, 1]).prop_shuffle()) {
        let permute = |e: &Epoch| {
            let ch = perm.iter().map(|&i| e.channels[i].clone()).collect();
            let rows = perm.iter().map(|&i| e.channel_values[i].clone()).collect();
            Epoch::new(ch, rows, e.meta, e.condition_tag.clone(), e.behavioral_correct).unwrap()
        };
        let avg = average_erp(&eps).unwrap();
        let permuted: Vec<Epoch> = eps.iter().map(permute).collect();
        let pavg = average_erp(&permuted).unwrap();
        for (k, &i) in perm.iter().enumerate() {
            prop_assert_eq!(&pavg.channel_values[k], &avg.channel_values[i]);
            prop_assert_eq!(&pavg.channels[k], &avg.channels[i]);
        }
    }

    #[test]
    fn rejection_partitions_its_input(eps in prop::collection::vec(epoch_strategy(), 0..8), thr in 50.0f64..250.0) {
        let n = eps.len();
        let r = reject_trials(eps.clone(), thr).unwrap();
        prop_assert!(r.kept.len() <= n);
        prop_assert_eq!(r.kept.len() + r.rejected.len(), n);
        let mut kept_iter = r.kept.iter();
        for (i, e) in eps.iter().enumerate() {
            if !r.rejected.iter().any(|&(j, _)| j == i) {
                prop_assert_eq!(kept_iter.next().unwrap(), e);
            }
        }
        prop_assert_eq!(r.counts.values().sum::<usize>(), r.rejected.len());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn bandpass_is_linear(seed in any::<u64>(), a in -3.0f64..3.0, b in -3.0f64..3.0) {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let n = 9000;
        let x: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let y: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let mix: Vec<f64> = x.iter().zip(&y).map(|(p, q)| a * p + b * q).collect();
        let fx = bandpass_filter(&x, 256.0, 0.1, 20.0).unwrap();
        let fy = bandpass_filter(&y, 256.0, 0.1, 20.0).unwrap();
        let fm = bandpass_filter(&mix, 256.0, 0.1, 20.0).unwrap();
        let scale = fm.iter().map(|v| v.abs()).fold(0.0, f64::max).max(1e-300);
        for i in 0..n {
            let want = a * fx[i] + b * fy[i];
            prop_assert!((fm[i] - want).abs() <= 1e-9 * scale, "sample {i}: {} vs {want}", fm[i]);
        }
    }
}
