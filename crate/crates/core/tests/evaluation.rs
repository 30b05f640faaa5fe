use proptest::prelude::*;
use swingflow::eval::{loocv, majority_baseline, repeat_loocv, round1, Dataset, Sample};
use swingflow::kinematics::SweetSpotMethod;
use swingflow::mocap::labels_for;
use swingflow::pipeline::extract_swing;
use swingflow::rbf::TrainConfig;
use swingflow::synth::{default_preset, generate_dataset};
use swingflow::FeatureVector;

fn preset_features(seed: u64) -> (Vec<FeatureVector>, Vec<swingflow::LabelRecord>) {
    let ds = generate_dataset(&default_preset(), seed).unwrap();
    let f = ds
        .swings
        .iter()
        .map(|s| extract_swing(&s.clip, &s.roi, SweetSpotMethod::Circumcenter).unwrap().features)
        .collect();
    (f, ds.labels())
}

#[test]
fn novice_majority_baseline_is_71_4() {
    let (f, l) = preset_features(0);
    let d = Dataset::from_features(&f, &labels_for(&l, "novice")).unwrap();
    assert_eq!(round1(majority_baseline(&d).unwrap().accuracy), 71.4);
    let d = Dataset::from_features(&f, &labels_for(&l, "intermediate")).unwrap();
    assert_eq!(round1(majority_baseline(&d).unwrap().accuracy), 71.4);
}

#[test]
fn repeated_report_is_consistent() {
    let (f, l) = preset_features(0);
    let d = Dataset::from_features(&f, &labels_for(&l, "intermediate")).unwrap();
    let r = repeat_loocv(&d, "intermediate", &TrainConfig::default(), 12, 0).unwrap();
    assert_eq!(r.accuracies.len(), 12);
    assert_eq!(r.seeds.len(), 12);
    let mean = r.accuracies.iter().sum::<f64>() / 12.0;
    assert!((mean - r.mean_accuracy).abs() < 1e-9);
    assert!(r.accuracies.iter().all(|a| (0.0..=100.0).contains(a)));
    assert_eq!(format!("{:.1}", r.bad_fraction), "71.4");
    assert!(r.folds.iter().all(|f| f.len() == 14));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn permuting_input_changes_no_fold(seed in any::<u64>(), perm in Just((0..14).collect::<Vec<usize>>()).prop_shuffle()) {
        let (f, l) = preset_features(seed % 4);
        let labels = labels_for(&l, "intermediate");
        let samples: Vec<Sample> = f
            .iter()
            .map(|v| Sample { id: v.swing_id.clone(), values: v.values.to_vec(), label: labels[&v.swing_id] })
            .collect();
        let shuffled: Vec<Sample> = perm.iter().map(|&i| samples[i].clone()).collect();
        let cfg = TrainConfig { hidden_units: 3, rng_seed: seed, ..Default::default() };
        let a = loocv(&Dataset::new(samples).unwrap(), &cfg).unwrap();
        let b = loocv(&Dataset::new(shuffled).unwrap(), &cfg).unwrap();
        prop_assert_eq!(a, b);
    }
}
