//! Seeded synthetic videos with a known ground truth.
//!
//! Organs are axis-aligned rectangles, one per cell of a 4x2 grid, so they
//! never overlap. Nodules are small blobs planted strictly inside the
//! interior of an organ rectangle (at least one pixel away from its edge),
//! which keeps nodules on different organs at least two pixels apart.
//!
//! Every random draw comes from a generator keyed on
//! `(seed, video index, frame index)`, so videos and frames can be produced
//! in any order or in parallel with identical results.
//!
//! Noise only touches the prediction rasters; ground-truth rasters and the
//! planting log are exact.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::anatomy::{station_of, OrganClass, Station, ORGAN_COUNT, STATION_COUNT};
use crate::frame::ConfidenceFrame;
use crate::pipeline::{sample_frame_times, StationVector};
use crate::raster::Raster;
use crate::score::{FagottiScore, Indication};

/// Organ confidence inside a predicted organ.
pub const ORGAN_ON: f32 = 0.95;
/// Organ confidence elsewhere.
pub const ORGAN_OFF: f32 = 0.05;
/// PC confidence on a predicted nodule or spurious blob.
pub const PC_ON: f32 = 0.97;
pub const PC_OFF: f32 = 0.02;
pub const ROI_RELEVANT: f64 = 0.9;
pub const ROI_IRRELEVANT: f64 = 0.1;
/// Seconds between consecutive synthetic frames.
pub const FRAME_SPACING_S: f64 = 5.0;

const GRID_COLS: u32 = 4;
const GRID_ROWS: u32 = 2;
const VIDEO_STREAM: u64 = u64::MAX;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SynthError {
    #[error("invalid synthetic spec: {0}")]
    InvalidSpec(String),
    #[error("video index {index} out of range for {n_videos} videos")]
    VideoOutOfRange { index: usize, n_videos: usize },
}

/// Corruption applied to prediction rasters.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct NoiseSpec {
    /// Std-dev of additive Gaussian noise on every confidence value
    /// (results are clamped to `[0, 1]`). Also perturbs ROI scores.
    pub confidence_jitter: f64,
    /// Maximum pixels of random per-organ dilation or erosion.
    pub boundary_morph: f64,
    /// Expected spurious PC blobs per frame (Poisson).
    pub false_blob_rate: f64,
    /// Probability a planted nodule is missing from the prediction in a frame.
    pub miss_rate: f64,
}

impl NoiseSpec {
    pub fn is_zero(&self) -> bool {
        *self == NoiseSpec::default()
    }

    pub fn validate(&self) -> Result<(), SynthError> {
        let fields = [
            ("confidence_jitter", self.confidence_jitter),
            ("boundary_morph", self.boundary_morph),
            ("false_blob_rate", self.false_blob_rate),
            ("miss_rate", self.miss_rate),
        ];
        for (name, v) in fields {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(SynthError::InvalidSpec(format!("{name} must be >= 0, got {v}")));
            }
        }
        if self.miss_rate > 1.0 {
            return Err(SynthError::InvalidSpec(format!(
                "miss_rate must be <= 1, got {}",
                self.miss_rate
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthSpec {
    pub seed: u64,
    pub n_videos: usize,
    pub frame_width: u32,
    pub frame_height: u32,
    /// ROI-relevant frames per video.
    pub frames_per_video: usize,
    /// Leading frames outside the ROI (no anatomy, ground-truth ROI false).
    pub irrelevant_frames_per_video: usize,
    /// Probability that each station is involved, by station code.
    pub station_prevalence: [f64; STATION_COUNT],
    /// Inclusive range of nodules per involved station.
    pub nodules_per_positive_station: (u32, u32),
    pub noise: NoiseSpec,
}

impl Default for SynthSpec {
    fn default() -> Self {
        Self {
            seed: 0,
            n_videos: 20,
            frame_width: 64,
            frame_height: 64,
            frames_per_video: 10,
            irrelevant_frames_per_video: 0,
            station_prevalence: [0.5; STATION_COUNT],
            nodules_per_positive_station: (1, 3),
            noise: NoiseSpec::default(),
        }
    }
}

impl SynthSpec {
    pub fn validate(&self) -> Result<(), SynthError> {
        let bad = |m: String| Err(SynthError::InvalidSpec(m));
        if self.frame_width < 16 || self.frame_height < 16 {
            return bad(format!(
                "frame size must be at least 16x16, got {}x{}",
                self.frame_width, self.frame_height
            ));
        }
        if self.frames_per_video == 0 {
            return bad("frames_per_video must be >= 1".into());
        }
        if self.n_videos == 0 {
            return bad("n_videos must be >= 1".into());
        }
        if let Some(p) = self
            .station_prevalence
            .iter()
            .find(|p| !(0.0..=1.0).contains(*p))
        {
            return bad(format!("station prevalence {p} outside [0, 1]"));
        }
        let (lo, hi) = self.nodules_per_positive_station;
        if lo == 0 || lo > hi {
            return bad(format!("nodules_per_positive_station ({lo}, {hi}) must satisfy 1 <= min <= max"));
        }
        self.noise.validate()
    }
}

/// A nodule as planted, before any prediction noise.
#[derive(Debug, Clone, PartialEq)]
pub struct PlantedNodule {
    pub frame_index: u64,
    pub organ: OrganClass,
    /// Row-major pixels, all strictly inside the organ rectangle.
    pub pixels: Vec<(u32, u32)>,
    /// Whether the prediction raster omits this nodule.
    pub suppressed: bool,
}

/// Inclusive pixel rectangle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Rect {
    pub top: u32,
    pub left: u32,
    pub bottom: u32,
    pub right: u32,
}

impl Rect {
    #[inline]
    pub fn contains(&self, row: u32, col: u32) -> bool {
        row >= self.top && row <= self.bottom && col >= self.left && col <= self.right
    }

    /// Pixels at least one step away from the rectangle edge.
    pub fn interior(&self) -> Option<Rect> {
        (self.bottom >= self.top + 2 && self.right >= self.left + 2).then(|| Rect {
            top: self.top + 1,
            left: self.left + 1,
            bottom: self.bottom - 1,
            right: self.right - 1,
        })
    }

    /// Grows (positive) or shrinks (negative) by `d` pixels on every side,
    /// clipped to the frame. `None` when erosion removes everything.
    fn morphed(&self, d: i64, width: u32, height: u32) -> Option<Rect> {
        let top = self.top as i64 - d;
        let left = self.left as i64 - d;
        let bottom = self.bottom as i64 + d;
        let right = self.right as i64 + d;
        (top <= bottom && left <= right).then(|| Rect {
            top: top.max(0) as u32,
            left: left.max(0) as u32,
            bottom: bottom.min(height as i64 - 1) as u32,
            right: right.min(width as i64 - 1) as u32,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthVideo {
    pub video_id: String,
    pub index: usize,
    /// True station involvement drawn from the prevalences.
    pub truth: StationVector,
    /// Frames in time order; the leading ones may lie outside the ROI.
    pub frames: Vec<ConfidenceFrame>,
    /// Organ rectangles per frame (empty for irrelevant frames).
    pub layouts: Vec<Vec<(OrganClass, Rect)>>,
    pub planting_log: Vec<PlantedNodule>,
    pub roi_segments: Vec<(f64, f64)>,
}

impl SynthVideo {
    pub fn ground_truth_fs(&self) -> FagottiScore {
        let n = self.truth.iter().filter(|&&b| b).count() as u32;
        FagottiScore::new(2 * n).expect("at most six stations")
    }

    pub fn ground_truth_its(&self) -> Indication {
        its_for(self.ground_truth_fs())
    }
}

fn its_for(fs: FagottiScore) -> Indication {
    if fs.value() >= 8 {
        Indication::SurgeryContraindicated
    } else {
        Indication::SurgeryIndicated
    }
}

/// Stations that received at least one planted nodule, read from the
/// planting log only.
pub fn oracle_stations(video: &SynthVideo) -> StationVector {
    let mut v = [false; STATION_COUNT];
    for n in &video.planting_log {
        v[station_of(n.organ) as usize] = true;
    }
    v
}

/// Twice the number of stations in the planting log.
pub fn oracle_fs(video: &SynthVideo) -> FagottiScore {
    let n = oracle_stations(video).iter().filter(|&&b| b).count() as u32;
    FagottiScore::new(2 * n).expect("at most six stations")
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Generator for one `(seed, video, frame)` counter triple.
pub fn stream_rng(seed: u64, video: u64, frame: u64) -> ChaCha8Rng {
    let a = splitmix64(seed);
    let b = splitmix64(a ^ video);
    let c = splitmix64(b ^ frame.rotate_left(32));
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&a.to_le_bytes());
    key[8..16].copy_from_slice(&b.to_le_bytes());
    key[16..24].copy_from_slice(&c.to_le_bytes());
    key[24..].copy_from_slice(&splitmix64(c).to_le_bytes());
    ChaCha8Rng::from_seed(key)
}

fn gaussian(rng: &mut ChaCha8Rng) -> f64 {
    // Box-Muller; 1 - u keeps the log argument in (0, 1].
    let u1: f64 = 1.0 - rng.gen::<f64>();
    let u2: f64 = rng.gen::<f64>();
    libm::sqrt(-2.0 * libm::log(u1)) * libm::cos(core::f64::consts::TAU * u2)
}

fn poisson(rng: &mut ChaCha8Rng, lambda: f64) -> u32 {
    if lambda <= 0.0 {
        return 0;
    }
    // Knuth's product method; rates here are small.
    let limit = libm::exp(-lambda);
    let mut k = 0;
    let mut p = rng.gen::<f64>();
    while p > limit && k < 10_000 {
        k += 1;
        p *= rng.gen::<f64>();
    }
    k
}

fn jitter(value: f32, sigma: f64, rng: &mut ChaCha8Rng) -> f32 {
    if sigma == 0.0 {
        return value;
    }
    (value as f64 + sigma * gaussian(rng)).clamp(0.0, 1.0) as f32
}

fn organ_layout(spec: &SynthSpec, rng: &mut ChaCha8Rng) -> Vec<(OrganClass, Rect)> {
    let (w, h) = (spec.frame_width, spec.frame_height);
    let cell_w = w / GRID_COLS;
    let cell_h = h / GRID_ROWS;
    let max_margin = ((cell_w.min(cell_h).saturating_sub(3)) / 2).min(2);
    let mut cells: Vec<u32> = (0..GRID_COLS * GRID_ROWS).collect();
    cells.shuffle(rng);
    OrganClass::ALL
        .iter()
        .zip(cells)
        .map(|(&organ, cell)| {
            let (cr, cc) = (cell / GRID_COLS, cell % GRID_COLS);
            let mut m = || rng.gen_range(0..=max_margin);
            let rect = Rect {
                top: cr * cell_h + m(),
                left: cc * cell_w + m(),
                bottom: (cr + 1) * cell_h - 1 - m(),
                right: (cc + 1) * cell_w - 1 - m(),
            };
            (organ, rect)
        })
        .collect()
}

/// A blob of 1x1 to 2x2 pixels placed inside `area`.
fn blob_in(area: Rect, rng: &mut ChaCha8Rng) -> Vec<(u32, u32)> {
    let bh = rng.gen_range(1..=2u32).min(area.bottom - area.top + 1);
    let bw = rng.gen_range(1..=2u32).min(area.right - area.left + 1);
    let top = rng.gen_range(area.top..=area.bottom + 1 - bh);
    let left = rng.gen_range(area.left..=area.right + 1 - bw);
    let mut px = Vec::with_capacity((bh * bw) as usize);
    for r in top..top + bh {
        for c in left..left + bw {
            px.push((r, c));
        }
    }
    px
}

struct VideoPlan {
    truth: StationVector,
    /// Organ hosting each nodule, for the whole video.
    nodule_organs: Vec<OrganClass>,
}

fn plan_video(spec: &SynthSpec, index: usize) -> VideoPlan {
    let mut rng = stream_rng(spec.seed, index as u64, VIDEO_STREAM);
    let mut truth = [false; STATION_COUNT];
    let mut nodule_organs = Vec::new();
    for station in Station::ALL {
        let p = spec.station_prevalence[station as usize];
        if rng.gen_bool(p) {
            truth[station as usize] = true;
            let (lo, hi) = spec.nodules_per_positive_station;
            for _ in 0..rng.gen_range(lo..=hi) {
                nodule_organs.push(*station.organs().choose(&mut rng).unwrap());
            }
        }
    }
    VideoPlan {
        truth,
        nodule_organs,
    }
}

pub fn video_id(index: usize) -> String {
    format!("video_{index:04}")
}

/// Generates video `index` of the cohort described by `spec`.
pub fn generate_video(spec: &SynthSpec, index: usize) -> Result<SynthVideo, SynthError> {
    spec.validate()?;
    if index >= spec.n_videos {
        return Err(SynthError::VideoOutOfRange {
            index,
            n_videos: spec.n_videos,
        });
    }
    let plan = plan_video(spec, index);
    let (w, h) = (spec.frame_width, spec.frame_height);
    let n = (w * h) as usize;
    let noise = spec.noise;

    let lead = spec.irrelevant_frames_per_video;
    let t0 = lead as f64 * FRAME_SPACING_S;
    let t1 = t0 + (spec.frames_per_video - 1) as f64 * FRAME_SPACING_S;
    let roi_segments = vec![(t0, t1)];
    let mut times: Vec<f64> = (0..lead).map(|i| i as f64 * FRAME_SPACING_S).collect();
    times.extend(sample_frame_times(&roi_segments, FRAME_SPACING_S).expect("valid segment"));

    let mut frames = Vec::with_capacity(times.len());
    let mut layouts = Vec::with_capacity(times.len());
    let mut planting_log = Vec::new();

    for (fi, &time_s) in times.iter().enumerate() {
        let frame_index = fi as u64;
        let relevant = fi >= lead;
        let mut rng = stream_rng(spec.seed, index as u64, frame_index);

        let layout = if relevant { organ_layout(spec, &mut rng) } else { Vec::new() };

        let mut labels = vec![0u8; n];
        for (organ, r) in &layout {
            for row in r.top..=r.bottom {
                for col in r.left..=r.right {
                    labels[(row * w + col) as usize] = organ.label();
                }
            }
        }

        let mut gt_pc = vec![0u8; n];
        let mut pc = vec![PC_OFF; n];
        if relevant {
            for &organ in &plan.nodule_organs {
                let rect = layout.iter().find(|(o, _)| *o == organ).unwrap().1;
                let area = rect.interior().expect("organ rectangles are at least 3x3");
                let pixels = blob_in(area, &mut rng);
                let suppressed = noise.miss_rate > 0.0 && rng.gen_bool(noise.miss_rate);
                for &(r, c) in &pixels {
                    let i = (r * w + c) as usize;
                    gt_pc[i] = 1;
                    if !suppressed {
                        pc[i] = PC_ON;
                    }
                }
                planting_log.push(PlantedNodule {
                    frame_index,
                    organ,
                    pixels,
                    suppressed,
                });
            }
        }
        let full = Rect {
            top: 0,
            left: 0,
            bottom: h - 1,
            right: w - 1,
        };
        for _ in 0..poisson(&mut rng, noise.false_blob_rate) {
            for (r, c) in blob_in(full, &mut rng) {
                pc[(r * w + c) as usize] = PC_ON;
            }
        }

        let morph = libm::round(noise.boundary_morph) as i64;
        let mut organ_conf = vec![ORGAN_OFF; n * ORGAN_COUNT];
        for (organ, rect) in &layout {
            let d = if morph > 0 { rng.gen_range(-morph..=morph) } else { 0 };
            if let Some(r) = rect.morphed(d, w, h) {
                let plane = &mut organ_conf[*organ as usize * n..(*organ as usize + 1) * n];
                for row in r.top..=r.bottom {
                    for col in r.left..=r.right {
                        plane[(row * w + col) as usize] = ORGAN_ON;
                    }
                }
            }
        }
        let sigma = noise.confidence_jitter;
        if sigma > 0.0 {
            for v in organ_conf.iter_mut().chain(pc.iter_mut()) {
                *v = jitter(*v, sigma, &mut rng);
            }
        }
        let base_roi = if relevant { ROI_RELEVANT } else { ROI_IRRELEVANT };
        let roi_score = if sigma > 0.0 {
            (base_roi + sigma * gaussian(&mut rng)).clamp(0.0, 1.0)
        } else {
            base_roi
        };

        frames.push(ConfidenceFrame {
            frame_index,
            time_s,
            organ_conf: Raster::confidence(w, h, ORGAN_COUNT as u8, organ_conf)
                .expect("generated confidences are in range"),
            pc_conf: Raster::confidence(w, h, 1, pc).expect("generated confidences are in range"),
            roi_score,
            gt_labels: Some(Raster::label(w, h, 1, labels).expect("valid labels")),
            gt_pc: Some(Raster::label(w, h, 1, gt_pc).expect("valid labels")),
            gt_roi: Some(relevant),
        });
        layouts.push(layout);
    }

    Ok(SynthVideo {
        video_id: video_id(index),
        index,
        truth: plan.truth,
        frames,
        layouts,
        planting_log,
        roi_segments,
    })
}

/// All videos of the cohort, in index order.
pub fn generate_cohort(spec: &SynthSpec) -> Result<Vec<SynthVideo>, SynthError> {
    spec.validate()?;
    (0..spec.n_videos).map(|i| generate_video(spec, i)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::ScoringConstants;
    use crate::pipeline::{classify_frame, connected_components, score_frames, threshold_pc_mask};
    use crate::Connectivity;

    fn small_spec() -> SynthSpec {
        SynthSpec {
            seed: 11,
            n_videos: 12,
            frame_width: 32,
            frame_height: 24,
            frames_per_video: 4,
            irrelevant_frames_per_video: 2,
            ..Default::default()
        }
    }

    #[test]
    fn same_seed_same_cohort() {
        let a = generate_cohort(&small_spec()).unwrap();
        let b = generate_cohort(&small_spec()).unwrap();
        assert_eq!(a, b);
        let other = generate_cohort(&SynthSpec {
            seed: 12,
            ..small_spec()
        })
        .unwrap();
        assert_ne!(a, other);
    }

    #[test]
    fn videos_are_independent_of_generation_order() {
        let spec = small_spec();
        let all = generate_cohort(&spec).unwrap();
        for i in (0..spec.n_videos).rev() {
            assert_eq!(generate_video(&spec, i).unwrap(), all[i]);
        }
    }

    #[test]
    fn zero_prevalence_gives_zero_fs() {
        let spec = SynthSpec {
            station_prevalence: [0.0; 6],
            ..small_spec()
        };
        for v in generate_cohort(&spec).unwrap() {
            assert_eq!(oracle_fs(&v).value(), 0);
            assert_eq!(v.ground_truth_its(), Indication::SurgeryIndicated);
            assert!(v.planting_log.is_empty());
        }
    }

    #[test]
    fn full_prevalence_zero_noise_scores_twelve() {
        let spec = SynthSpec {
            station_prevalence: [1.0; 6],
            ..small_spec()
        };
        let c = ScoringConstants::default();
        for v in generate_cohort(&spec).unwrap() {
            assert_eq!(oracle_fs(&v).value(), 12);
            let a = score_frames(&v.video_id, &v.frames, &c).unwrap();
            assert_eq!(a.fs.value(), 12);
            assert_eq!(a.its, Indication::SurgeryContraindicated);
            assert_eq!(a.frames_used, spec.frames_per_video);
        }
    }

    #[test]
    fn zero_noise_matches_oracle_exactly() {
        let spec = SynthSpec {
            frame_width: 16,
            frame_height: 16,
            ..small_spec()
        };
        let c = ScoringConstants::default();
        for v in generate_cohort(&spec).unwrap() {
            let a = score_frames(&v.video_id, &v.frames, &c).unwrap();
            assert_eq!(a.station_positive, oracle_stations(&v));
            assert_eq!(a.fs, oracle_fs(&v));
            assert_eq!(oracle_stations(&v), v.truth);
        }
    }

    #[test]
    fn planted_nodules_lie_inside_their_organ() {
        let spec = SynthSpec {
            station_prevalence: [1.0; 6],
            nodules_per_positive_station: (2, 4),
            frame_width: 16,
            frame_height: 16,
            ..small_spec()
        };
        for v in generate_cohort(&spec).unwrap() {
            for n in &v.planting_log {
                let layout = &v.layouts[n.frame_index as usize];
                let rect = layout.iter().find(|(o, _)| *o == n.organ).unwrap().1;
                let inner = rect.interior().unwrap();
                assert!(n.pixels.iter().all(|&(r, c)| inner.contains(r, c)));
                for (o, other) in layout {
                    if *o != n.organ {
                        assert!(n.pixels.iter().all(|&(r, c)| !other.contains(r, c)));
                    }
                }
            }
        }
    }

    #[test]
    fn zero_noise_nodules_partition_and_assign_cleanly() {
        let spec = SynthSpec {
            station_prevalence: [1.0; 6],
            nodules_per_positive_station: (3, 3),
            ..small_spec()
        };
        let c = ScoringConstants::default();
        for v in generate_cohort(&spec).unwrap() {
            for f in v.frames.iter().filter(|f| f.gt_roi == Some(true)) {
                let a = classify_frame(f, &c).unwrap();
                assert!(a.nodules.iter().all(|n| n.assigned_organ.is_some()));
                let mask = threshold_pc_mask(f, &c).unwrap();
                let total: usize = a.nodules.iter().map(|n| n.size()).sum();
                assert_eq!(total, mask.count());
                assert_eq!(
                    connected_components(&mask, Connectivity::Eight).len(),
                    a.nodules.len()
                );
            }
        }
    }

    #[test]
    fn total_miss_gives_all_negative() {
        let spec = SynthSpec {
            station_prevalence: [1.0; 6],
            noise: NoiseSpec {
                miss_rate: 1.0,
                ..Default::default()
            },
            ..small_spec()
        };
        let c = ScoringConstants::default();
        for v in generate_cohort(&spec).unwrap() {
            let a = score_frames(&v.video_id, &v.frames, &c).unwrap();
            assert_eq!(a.station_positive, [false; 6]);
            assert_eq!(oracle_fs(&v).value(), 12);
            assert!(v.planting_log.iter().all(|n| n.suppressed));
        }
    }

    #[test]
    fn noisy_rasters_stay_valid() {
        let spec = SynthSpec {
            noise: NoiseSpec {
                confidence_jitter: 0.3,
                boundary_morph: 3.0,
                false_blob_rate: 2.5,
                miss_rate: 0.3,
            },
            ..small_spec()
        };
        for v in generate_cohort(&spec).unwrap() {
            for f in &v.frames {
                f.validate().unwrap();
                f.organ_conf.validate().unwrap();
                f.pc_conf.validate().unwrap();
                assert!((0.0..=1.0).contains(&f.roi_score));
            }
        }
    }

    #[test]
    fn frame_times_follow_roi_segment() {
        let v = generate_video(&small_spec(), 0).unwrap();
        let times: Vec<f64> = v.frames.iter().map(|f| f.time_s).collect();
        assert_eq!(times, vec![0.0, 5.0, 10.0, 15.0, 20.0, 25.0]);
        assert_eq!(v.roi_segments, vec![(10.0, 25.0)]);
        assert_eq!(v.frames[1].gt_roi, Some(false));
        assert_eq!(v.frames[2].gt_roi, Some(true));
    }

    #[test]
    fn spec_validation() {
        let mut s = small_spec();
        s.frame_width = 15;
        assert!(s.validate().is_err());
        s = small_spec();
        s.noise.confidence_jitter = -0.1;
        assert!(s.validate().is_err());
        s = small_spec();
        s.station_prevalence[2] = 1.5;
        assert!(s.validate().is_err());
        s = small_spec();
        s.nodules_per_positive_station = (0, 2);
        assert!(s.validate().is_err());
        s = small_spec();
        s.noise.miss_rate = 1.1;
        assert!(s.validate().is_err());
        assert!(generate_video(&small_spec(), 99).is_err());
    }
}
