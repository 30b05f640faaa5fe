use std::collections::BTreeMap;

use swingflow::features::{Curve, Plane};
use swingflow::kinematics::SweetSpotMethod;
use swingflow::mocap::{load_labels, load_rois, parse_clip, ParseOptions};
use swingflow::pipeline::extract_swing;
use swingflow::synth::{default_preset, generate_dataset, generate_swing, SwingArchetype};

#[test]
fn preset_on_disk_recovers_generating_quadratics() {
    let dir = tempfile::tempdir().unwrap();
    let ds = generate_dataset(&default_preset(), 11).unwrap();
    ds.write(dir.path()).unwrap();

    let rois = load_rois(&dir.path().join("rois.json")).unwrap();
    let labels = load_labels(&dir.path().join("labels.csv")).unwrap();
    assert_eq!(rois.len(), 14);
    assert_eq!(labels.len(), 28);

    for (roi, truth) in rois.iter().zip(&ds.manifest.swings) {
        assert_eq!(roi.clip_id, truth.clip_id);
        let clip = parse_clip(&dir.path().join(&truth.clip_file), &ParseOptions::default()).unwrap();
        let generated = &ds.swings.iter().find(|s| s.clip.clip_id() == roi.clip_id).unwrap().clip;
        assert!(clip.bitwise_eq(generated));
        let k = extract_swing(&clip, roi, SweetSpotMethod::Circumcenter).unwrap();
        let noise = ds.manifest.archetypes.iter().map(|(a, _)| a.noise_amplitude).fold(0.0, f64::max);
        let tol = 10.0 * noise;
        // compared as curves in metres over the swing's own X samples
        let quad = |c: [f64; 3], x: f64| (c[0] * x + c[1]) * x + c[2];
        for (plane, want) in [(Plane::Sagittal, truth.sagittal), (Plane::Transverse, truth.transverse)] {
            let got = k.features.fit(plane, Curve::Trajectory);
            for p in &k.path.positions {
                let dev = (quad(got, p[0]) - quad(want, p[0])).abs();
                assert!(dev <= tol, "{} {plane}: {dev} m off ({got:?} vs {want:?})", roi.clip_id);
            }
        }
    }
}

#[test]
fn converted_source_frames_extract_identically() {
    let g = generate_swing(&SwingArchetype::topspin_full(), "s01", 5).unwrap();
    let mut canonical = Vec::new();
    swingflow::mocap::write_clip(&g.clip, &mut canonical).unwrap();
    let reference = extract_swing(&g.clip, &g.roi, SweetSpotMethod::Circumcenter).unwrap();

    // rewrite the clip in millimetres in the lh-xzy source frame
    let conv = swingflow::SourceConvention::LhXzy;
    let frames = g
        .clip
        .frames()
        .iter()
        .map(|f| f.iter().map(|p| conv.from_canonical(*p).map(|v| v * 1000.0)).collect())
        .collect();
    let src = swingflow::SwingClip::new("s01", 50.0, g.clip.markers().to_vec(), frames).unwrap();
    let mut text = Vec::new();
    swingflow::mocap::write_clip(&src, &mut text).unwrap();
    let opts = ParseOptions {
        convention: conv,
        scale: 0.001,
        sample_rate_hz: 50.0,
    };
    let back = swingflow::mocap::parse_clip_str("s01", text.as_slice(), &opts).unwrap();
    let k = extract_swing(&back, &g.roi, SweetSpotMethod::Circumcenter).unwrap();
    for (a, b) in k.features.values.iter().zip(reference.features.values) {
        assert!((a - b).abs() < 1e-9, "{a} vs {b}");
    }
}

#[test]
fn preset_labels_follow_archetypes() {
    let ds = generate_dataset(&default_preset(), 0).unwrap();
    let mut by_archetype: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
    for s in &ds.manifest.swings {
        by_archetype.entry(&s.archetype).or_default().push(&s.clip_id);
    }
    assert_eq!(by_archetype["topspin-full"], ["s01", "s02", "s03", "s04"]);
    assert_eq!(by_archetype["flat"], ["s11", "s12", "s13", "s14"]);
    let f3 = |id: &str| {
        let s = ds.swings.iter().find(|s| s.clip.clip_id() == id).unwrap();
        extract_swing(&s.clip, &s.roi, SweetSpotMethod::Circumcenter).unwrap().features.values[3]
    };
    assert!(by_archetype["flat"].iter().all(|id| f3(id) < 0.0));
    assert!(by_archetype["topspin-full"].iter().all(|id| f3(id) > 0.0));
}
