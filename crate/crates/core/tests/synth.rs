mod common;

use erpsift::features::{latency, TimeWindow};
use erpsift::signal::{average_erp, bandpass_filter, segment_epochs, ClassLabel, ContinuousRecording, ErpAverage};
use erpsift::synth::{
    default_dyslexia_scenario, generate_dataset, hp_only_scenario, write_dataset, Spread, SynthConfig,
    SyntheticSubject, LEFT_EFFECT_ELECTRODES,
};

fn noiseless(mut cfg: SynthConfig) -> SynthConfig {
    for class in [&mut cfg.regular, &mut cfg.dyslexic] {
        for c in [&mut class.p150, &mut class.p300] {
            c.latency_ms.sd = 0.0;
            c.amplitude_uv.sd = 0.0;
        }
        class.hp_noise.clear();
    }
    cfg.noise.pink_rms_uv = 0.0;
    cfg.noise.trial_jitter_ms = 0.0;
    cfg
}

fn small(mut cfg: SynthConfig, channels: &[&str], n: usize, trials: usize) -> SynthConfig {
    cfg.channels = channels.iter().map(|s| s.to_string()).collect();
    cfg.effect_electrodes.retain(|e| cfg.channels.contains(e));
    cfg.n_subjects_per_class = n;
    cfg.trials_per_subject = trials;
    cfg
}

fn raw_average(rec: &ContinuousRecording, cfg: &SynthConfig) -> ErpAverage {
    average_erp(&segment_epochs(rec, &cfg.meta).unwrap().epochs).unwrap()
}

fn template(cfg: &SynthConfig, label: ClassLabel, i: usize) -> f64 {
    let p = cfg.class(label);
    let t = cfg.meta.time_ms(i);
    [&p.p150, &p.p300]
        .iter()
        .map(|c| {
            let d = t - c.latency_ms.mean;
            c.amplitude_uv.mean * (-(d * d) / (2.0 * c.width_ms * c.width_ms)).exp()
        })
        .sum()
}

const MIXED: [&str; 6] = ["Fp1", "F3", "Cz", "F4", "P3", "O2"];

#[test]
fn generation_is_bit_identical() {
    let cfg = small(default_dyslexia_scenario(), &MIXED, 2, 6);
    let a = generate_dataset(&cfg).unwrap();
    let b = generate_dataset(&cfg).unwrap();
    assert_eq!(a, b);
    let (da, db) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let fa = write_dataset(&a, da.path(), Some(3)).unwrap();
    write_dataset(&b, db.path(), Some(3)).unwrap();
    for f in fa {
        let name = f.file_name().unwrap();
        assert_eq!(std::fs::read(&f).unwrap(), std::fs::read(db.path().join(name)).unwrap());
    }
    let mut other = cfg.clone();
    other.seed += 1;
    assert_ne!(generate_dataset(&other).unwrap()[0].recording, a[0].recording);
}

#[test]
fn noiseless_average_is_the_template() {
    let cfg = noiseless(small(default_dyslexia_scenario(), &MIXED, 1, 5));
    for s in generate_dataset(&cfg).unwrap() {
        let erp = raw_average(&s.recording, &cfg);
        for (ch, values) in erp.channels.iter().zip(&erp.channel_values) {
            let label = if cfg.effect_electrodes.contains(ch) {
                s.label
            } else {
                ClassLabel::Regular
            };
            for (i, v) in values.iter().enumerate() {
                assert!(
                    (v - template(&cfg, label, i)).abs() < 1e-12,
                    "{} {ch} sample {i}",
                    s.subject_id
                );
            }
        }
    }
}

#[test]
fn planted_latency_shift_only_on_masked_electrodes() {
    let mut cfg = noiseless(small(default_dyslexia_scenario(), &MIXED, 1, 4));
    cfg.dyslexic = cfg.regular.clone();
    cfg.dyslexic.p300.latency_ms = Spread::fixed(cfg.regular.p300.latency_ms.mean + 80.0);
    let subjects = generate_dataset(&cfg).unwrap();
    let (reg, dys) = (
        raw_average(&subjects[0].recording, &cfg),
        raw_average(&subjects[1].recording, &cfg),
    );
    assert_eq!(
        (subjects[0].label, subjects[1].label),
        (ClassLabel::Regular, ClassLabel::Dyslexic)
    );
    let window = TimeWindow::from([200.0, 600.0]);
    let period = cfg.meta.sample_period_ms();
    for (c, ch) in reg.channels.iter().enumerate() {
        let lr = latency(&reg.channel_values[c], &cfg.meta, window).unwrap();
        let ld = latency(&dys.channel_values[c], &cfg.meta, window).unwrap();
        if cfg.effect_electrodes.contains(ch) {
            assert!((ld - lr - 80.0).abs() <= period, "{ch}: {lr} vs {ld}");
        } else {
            assert_eq!(ld, lr, "{ch}");
            assert_eq!(reg.channel_values[c], dys.channel_values[c], "{ch}");
        }
    }
}

fn measured_p300(s: &SyntheticSubject, cfg: &SynthConfig) -> f64 {
    let mut rec = s.recording.clone();
    for x in rec.samples.iter_mut() {
        *x = bandpass_filter(x, rec.rate_hz, 0.1, 20.0).unwrap();
    }
    let erp = raw_average(&rec, cfg);
    let masked: Vec<&Vec<f64>> = erp
        .channels
        .iter()
        .zip(&erp.channel_values)
        .filter(|(ch, _)| cfg.effect_electrodes.contains(ch))
        .map(|(_, v)| v)
        .collect();
    let mean: Vec<f64> = (0..cfg.meta.epoch_len())
        .map(|i| masked.iter().map(|v| v[i]).sum::<f64>() / masked.len() as f64)
        .collect();
    latency(&mean, &cfg.meta, TimeWindow::from([220.0, 600.0])).unwrap()
}

#[test]
fn drawn_p300_latency_is_recovered_from_thirty_trials() {
    let cfg = small(default_dyslexia_scenario(), &LEFT_EFFECT_ELECTRODES, 5, 30);
    let mut worst = 0.0f64;
    for s in generate_dataset(&cfg).unwrap() {
        let err = measured_p300(&s, &cfg) - s.masked.p300.latency_ms;
        worst = worst.max(err.abs());
        assert!(err.abs() <= 20.0, "{}: off by {err:.1} ms", s.subject_id);
    }
    println!("largest P300 latency error {worst:.1} ms");
}

/// Kolmogorov survival function `P(K > lambda)`; the theta-function form
/// converges fast for small lambda, the alternating series for large.
fn kolmogorov_q(lambda: f64) -> f64 {
    use std::f64::consts::PI;
    let q = if lambda < 1e-9 {
        1.0
    } else if lambda < 1.18 {
        let y = (-PI * PI / (8.0 * lambda * lambda)).exp();
        let s: f64 = (1..=50).map(|k| y.powi((2 * k - 1) * (2 * k - 1))).sum();
        1.0 - (2.0 * PI).sqrt() / lambda * s
    } else {
        (1..=100)
            .map(|k| 2.0 * if k % 2 == 1 { 1.0 } else { -1.0 } * (-2.0 * (k * k) as f64 * lambda * lambda).exp())
            .sum()
    };
    q.clamp(0.0, 1.0)
}

/// Two-sample Kolmogorov–Smirnov statistic and asymptotic p-value.
fn ks_test(a: &[f64], b: &[f64]) -> (f64, f64) {
    let mut xa = a.to_vec();
    let mut xb = b.to_vec();
    xa.sort_by(f64::total_cmp);
    xb.sort_by(f64::total_cmp);
    let (mut i, mut j, mut d) = (0, 0, 0.0f64);
    while i < xa.len() && j < xb.len() {
        let v = xa[i].min(xb[j]);
        while i < xa.len() && xa[i] <= v {
            i += 1;
        }
        while j < xb.len() && xb[j] <= v {
            j += 1;
        }
        d = d.max((i as f64 / xa.len() as f64 - j as f64 / xb.len() as f64).abs());
    }
    let ne = (xa.len() * xb.len()) as f64 / (xa.len() + xb.len()) as f64;
    let lambda = (ne.sqrt() + 0.12 + 0.11 / ne.sqrt()) * d;
    (d, kolmogorov_q(lambda))
}

#[test]
fn ks_reference_values() {
    let a: Vec<f64> = (0..16).map(|i| i as f64).collect();
    assert_eq!(ks_test(&a, &a), (0.0, 1.0));
    // Tabulated critical values of the Kolmogorov distribution.
    assert!((kolmogorov_q(1.3581) - 0.05).abs() < 1e-4);
    assert!((kolmogorov_q(1.0727) - 0.20).abs() < 1e-4);
    assert!((kolmogorov_q(1.6276) - 0.01).abs() < 1e-4);
    let b: Vec<f64> = (0..16).map(|i| i as f64 + 100.0).collect();
    let (d, p) = ks_test(&a, &b);
    assert_eq!(d, 1.0);
    assert!(p < 1e-5);
}

/// Feature distributions on electrodes outside the effect mask do not depend
/// on the class. All unmasked electrodes of a subject share one parameter
/// draw, so their features fail or pass together; the test is run at the
/// family level, Bonferroni-corrected over the number of features.
#[test]
fn unmasked_features_do_not_separate_classes() {
    let unmasked = ["Fz", "Cz", "Pz", "F4", "C4", "P4", "O2", "T8"];
    let mut channels = unmasked.to_vec();
    channels.extend(["F3", "P3"]);
    let cfg = small(default_dyslexia_scenario(), &channels, 16, 40);
    let fm = common::feature_matrix(&cfg);
    let mut tested = 0;
    let mut below = 0;
    let mut min_p = 1.0f64;
    let mut masked_min_p = 1.0f64;
    for (f, col) in fm.columns.iter().enumerate() {
        let pick = |label| {
            fm.rows
                .iter()
                .zip(&fm.labels)
                .filter(|(_, l)| **l == Some(label))
                .map(|(r, _)| r[f])
                .collect::<Vec<_>>()
        };
        let (_, p) = ks_test(&pick(ClassLabel::Regular), &pick(ClassLabel::Dyslexic));
        if unmasked.contains(&col.electrode.as_str()) {
            tested += 1;
            below += usize::from(p <= 0.01);
            min_p = min_p.min(p);
        } else {
            masked_min_p = masked_min_p.min(p);
        }
    }
    println!("{tested} unmasked features: {below} with p <= 0.01, min p {min_p:.2e}; masked min p {masked_min_p:.2e}");
    assert!(min_p * tested as f64 > 0.01, "family-wise p {}", min_p * tested as f64);
    assert!(masked_min_p < 1e-4, "planted effect not visible on masked electrodes");
}

#[test]
fn scenarios_use_the_canonical_epoch() {
    for cfg in [default_dyslexia_scenario(), hp_only_scenario()] {
        cfg.validate().unwrap();
        assert_eq!(cfg.meta.epoch_len(), 448);
        assert_eq!(cfg.meta.pre_stimulus_samples, 64);
        assert_eq!(cfg.meta.rate_hz, 256.0);
        assert_eq!(cfg.n_subjects_per_class, 16);
        assert_eq!(cfg.trials_per_subject, 40);
        assert!(cfg
            .effect_electrodes
            .iter()
            .all(|e| e.ends_with(['1', '3', '5', '7', '9'])));
    }
    let d = default_dyslexia_scenario();
    assert_eq!(
        (d.regular.p300.latency_ms.mean, d.dyslexic.p300.latency_ms.mean),
        (300.0, 380.0)
    );
    assert_eq!(
        (d.regular.p300.amplitude_uv.mean, d.dyslexic.p300.amplitude_uv.mean),
        (10.0, 6.0)
    );
    let h = hp_only_scenario();
    assert_eq!(h.regular.p300, h.dyslexic.p300);
    assert_ne!(h.regular.hp_noise, h.dyslexic.hp_noise);
}

#[test]
fn invalid_scenario_is_rejected() {
    let mut cfg = default_dyslexia_scenario();
    cfg.trials_per_subject = 0;
    assert!(generate_dataset(&cfg).is_err());
    let mut cfg = default_dyslexia_scenario();
    cfg.channels.push("NOPE".into());
    assert!(generate_dataset(&cfg).is_err());
}
