//! Video-level k-fold splitting stratified on ground-truth FS.
//!
//! Videos are sorted by `(fs, video_id)`, each run of equal FS is shuffled
//! with a seeded generator, and the sequence is dealt snake-wise:
//! folds `0, 1, ..., k-1, k-1, ..., 1, 0, 0, 1, ...`. Fold sizes differ by
//! at most one.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::score::FagottiScore;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SplitError {
    #[error("fold count must be at least 1")]
    ZeroFolds,
    #[error("{videos} videos cannot fill {k} folds")]
    TooFewVideos { videos: usize, k: usize },
    #[error("video `{0}` has no ground-truth FS")]
    MissingGroundTruth(String),
    #[error("duplicate video id `{0}`")]
    DuplicateVideo(String),
}

/// A video as seen by the splitter.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SplitItem<'a> {
    pub video_id: &'a str,
    pub fs: Option<FagottiScore>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FoldAssignment {
    pub k: usize,
    pub seed: u64,
    /// Video id to fold index in `0..k`.
    pub assignment: BTreeMap<String, usize>,
}

impl FoldAssignment {
    pub fn fold_of(&self, video_id: &str) -> Option<usize> {
        self.assignment.get(video_id).copied()
    }

    /// Ids in fold `fold`, sorted.
    pub fn members(&self, fold: usize) -> Vec<&str> {
        self.assignment
            .iter()
            .filter(|(_, &f)| f == fold)
            .map(|(id, _)| id.as_str())
            .collect()
    }

    pub fn fold_sizes(&self) -> Vec<usize> {
        let mut sizes = alloc::vec![0; self.k];
        for &f in self.assignment.values() {
            sizes[f] += 1;
        }
        sizes
    }

    /// Checks that folds are in range and each is nonempty.
    pub fn is_valid(&self) -> bool {
        self.k >= 1
            && self.assignment.values().all(|&f| f < self.k)
            && self.fold_sizes().iter().all(|&n| n > 0)
    }
}

/// Fold index for position `i` of the sorted sequence.
#[inline]
pub fn snake_fold(i: usize, k: usize) -> usize {
    let (round, j) = (i / k, i % k);
    if round % 2 == 0 {
        j
    } else {
        k - 1 - j
    }
}

pub fn stratified_kfold(
    videos: &[SplitItem<'_>],
    k: usize,
    seed: u64,
) -> Result<FoldAssignment, SplitError> {
    if k == 0 {
        return Err(SplitError::ZeroFolds);
    }
    if videos.len() < k {
        return Err(SplitError::TooFewVideos {
            videos: videos.len(),
            k,
        });
    }
    let mut keyed: Vec<(u32, &str)> = Vec::with_capacity(videos.len());
    for v in videos {
        let fs = v
            .fs
            .ok_or_else(|| SplitError::MissingGroundTruth(v.video_id.into()))?;
        keyed.push((fs.value(), v.video_id));
    }
    keyed.sort_unstable();
    if let Some(w) = keyed.windows(2).find(|w| w[0].1 == w[1].1) {
        return Err(SplitError::DuplicateVideo(w[0].1.into()));
    }
    // Ids are unique per FS group after the check above only if they are
    // unique overall; catch cross-group duplicates too.
    {
        let mut ids: Vec<&str> = keyed.iter().map(|(_, id)| *id).collect();
        ids.sort_unstable();
        if let Some(w) = ids.windows(2).find(|w| w[0] == w[1]) {
            return Err(SplitError::DuplicateVideo(w[0].into()));
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut start = 0;
    while start < keyed.len() {
        let fs = keyed[start].0;
        let end = start + keyed[start..].iter().take_while(|(f, _)| *f == fs).count();
        keyed[start..end].shuffle(&mut rng);
        start = end;
    }

    let assignment = keyed
        .iter()
        .enumerate()
        .map(|(i, (_, id))| (String::from(*id), snake_fold(i, k)))
        .collect();
    Ok(FoldAssignment { k, seed, assignment })
}

/// Mean ground-truth FS per fold.
pub fn fold_fs_means(assignment: &FoldAssignment, videos: &[SplitItem<'_>]) -> Vec<f64> {
    let mut sums = alloc::vec![0.0; assignment.k];
    let mut counts = alloc::vec![0usize; assignment.k];
    for v in videos {
        if let (Some(f), Some(fs)) = (assignment.fold_of(v.video_id), v.fs) {
            sums[f] += fs.value() as f64;
            counts[f] += 1;
        }
    }
    sums.iter()
        .zip(&counts)
        .map(|(s, &n)| if n == 0 { 0.0 } else { s / n as f64 })
        .collect()
}

/// Largest pairwise difference between fold FS means.
pub fn fs_mean_spread(means: &[f64]) -> f64 {
    let max = means.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = means.iter().copied().fold(f64::INFINITY, f64::min);
    if means.is_empty() {
        0.0
    } else {
        max - min
    }
}
