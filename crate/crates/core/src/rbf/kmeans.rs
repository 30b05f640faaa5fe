use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::RbfError;

/// How the first centers are chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CenterInit {
    /// `h` distinct training points drawn with the seeded RNG.
    #[default]
    Random,
    /// The first `h` training points; ignores the seed.
    Fixed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CenterPlacement {
    pub centers: Vec<Vec<f64>>,
    /// Lloyd epochs run; the last one left assignments unchanged if `converged`.
    pub epochs: usize,
    pub converged: bool,
    /// Two or more centers coincide exactly.
    pub duplicate_centers: bool,
    pub assignments: Vec<usize>,
}

pub(crate) fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn nearest(p: &[f64], centers: &[Vec<f64>]) -> usize {
    let mut best = 0;
    let mut best_d = f64::INFINITY;
    for (j, c) in centers.iter().enumerate() {
        let d = sq_dist(p, c);
        if d < best_d {
            best = j;
            best_d = d;
        }
    }
    best
}

fn assign(points: &[Vec<f64>], centers: &[Vec<f64>]) -> Vec<usize> {
    points.iter().map(|p| nearest(p, centers)).collect()
}

/// k-means center placement.
///
/// Each epoch moves every center to the mean of its members (empty clusters
/// keep their center) and reassigns points; iteration stops once an epoch
/// leaves every assignment unchanged, or after `max_epochs`.
pub fn place_centers(
    points: &[Vec<f64>],
    h: usize,
    seed: u64,
    max_epochs: usize,
    init: CenterInit,
) -> Result<CenterPlacement, RbfError> {
    let n = points.len();
    if h < 1 || h > n {
        return Err(RbfError::ClusterCount { h, n });
    }
    let dim = points[0].len();
    let mut centers: Vec<Vec<f64>> = match init {
        CenterInit::Random => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            index::sample(&mut rng, n, h)
                .into_iter()
                .map(|i| points[i].clone())
                .collect()
        }
        CenterInit::Fixed => points[..h].to_vec(),
    };
    let mut assignments = assign(points, &centers);
    let mut epochs = 0;
    let mut converged = false;
    while epochs < max_epochs {
        epochs += 1;
        let mut sums = vec![vec![0.0; dim]; h];
        let mut counts = vec![0usize; h];
        for (p, &a) in points.iter().zip(&assignments) {
            counts[a] += 1;
            for (s, v) in sums[a].iter_mut().zip(p) {
                *s += v;
            }
        }
        for (j, c) in centers.iter_mut().enumerate() {
            if counts[j] > 0 {
                for (cv, s) in c.iter_mut().zip(&sums[j]) {
                    *cv = s / counts[j] as f64;
                }
            }
        }
        let next = assign(points, &centers);
        if next == assignments {
            converged = true;
            break;
        }
        assignments = next;
    }

    let duplicate_centers = centers
        .iter()
        .enumerate()
        .any(|(i, a)| centers[i + 1..].iter().any(|b| a == b));
    if duplicate_centers {
        log::warn!("k-means produced duplicate centers (h = {h}, n = {n})");
    }
    Ok(CenterPlacement {
        centers,
        epochs,
        converged,
        duplicate_centers,
        assignments,
    })
}
