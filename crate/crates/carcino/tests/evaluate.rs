use carcino::cohort::{evaluate_cohort, load_cohort, EvaluateOptions, EvaluationPlan};
use carcino::report::CohortReport;
use carcino::simulate::write_cohort;
use carcino_core::evaluation::DiceAveraging;
use carcino_core::synth::{NoiseSpec, SynthSpec};
use carcino_core::ScoringConstants;

fn spec(noise: NoiseSpec) -> SynthSpec {
    SynthSpec {
        seed: 99,
        n_videos: 20,
        frames_per_video: 4,
        irrelevant_frames_per_video: 1,
        frame_width: 32,
        frame_height: 32,
        noise,
        ..SynthSpec::default()
    }
}

#[test]
fn zero_noise_report_equals_oracle_self_evaluation() {
    let dir = tempfile::tempdir().unwrap();
    let written = write_cohort(&spec(NoiseSpec::default()), dir.path()).unwrap();
    let cohort = load_cohort(&written.index_path).unwrap();
    let c = ScoringConstants::default();
    let plan = EvaluationPlan::Independent(Vec::new());
    let scored = evaluate_cohort(&cohort, &plan, &c, EvaluateOptions::default()).unwrap();
    let oracle = evaluate_cohort(
        &cohort,
        &plan,
        &c,
        EvaluateOptions {
            oracle: true,
            ..EvaluateOptions::default()
        },
    )
    .unwrap();
    let (a, b) = (&scored.runs[0], &oracle.runs[0]);
    assert_eq!(a.stations, b.stations);
    assert_eq!(a.its, b.its);
    assert_eq!(a.station_average, b.station_average);
    assert_eq!(a.rmse, Some(0.0));
    assert_eq!(a.rmse, b.rmse);
    assert!(a.failures.is_empty());
    // Segmentation and ROI are only measured on real predictions.
    assert_eq!(a.dice_pc, Some(1.0));
    assert_eq!(a.dice_organ_average, Some(1.0));
    assert_eq!(a.roi_balanced_accuracy, Some(1.0));
}

#[test]
fn evaluation_is_independent_of_thread_count() {
    let dir = tempfile::tempdir().unwrap();
    let noise = NoiseSpec {
        confidence_jitter: 0.1,
        boundary_morph: 1.0,
        false_blob_rate: 0.5,
        miss_rate: 0.3,
    };
    let written = write_cohort(&spec(noise), dir.path()).unwrap();
    let c = ScoringConstants::default();
    let run = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        pool.install(|| {
            let cohort = load_cohort(&written.index_path).unwrap();
            let folds = cohort.split(4, 1).unwrap();
            let e = evaluate_cohort(
                &cohort,
                &EvaluationPlan::CrossValidation(folds),
                &c,
                EvaluateOptions::default(),
            )
            .unwrap();
            serde_json::to_string(&CohortReport::new(&e, &c, DiceAveraging::PerFrame)).unwrap()
        })
    };
    let one = run(1);
    assert_eq!(one, run(3));
    assert_eq!(one, run(8));
}

#[test]
fn videos_without_assessable_frames_are_listed_not_fatal() {
    let dir = tempfile::tempdir().unwrap();
    let written = write_cohort(&spec(NoiseSpec::default()), dir.path()).unwrap();
    let m = dir.path().join("video_0002/manifest.json");
    let mut v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&m).unwrap()).unwrap();
    for f in v["frames"].as_array_mut().unwrap() {
        f["roi_score"] = 0.2.into();
    }
    std::fs::write(&m, serde_json::to_string(&v).unwrap()).unwrap();
    let cohort = load_cohort(&written.index_path).unwrap();
    let c = ScoringConstants::default();
    let e = evaluate_cohort(&cohort, &EvaluationPlan::Independent(Vec::new()), &c, EvaluateOptions::default()).unwrap();
    let run = &e.runs[0];
    assert_eq!(run.failures.len(), 1);
    assert_eq!(run.failures[0].0, "video_0002");
    assert_eq!(run.rmse, Some(0.0));
    assert_eq!(e.summary.failed_videos, 1);
}
