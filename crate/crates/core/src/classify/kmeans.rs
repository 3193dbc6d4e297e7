//! Lloyd's K-means over the scene descriptor, used as the unsupervised
//! baseline.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

use super::{ClassLabel, Dataset};

pub const MAX_ITERATIONS: usize = 300;

/// Which leading features to cluster on. `Three` drops the peak count.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FeatureDims {
    Three,
    Four,
}

impl FeatureDims {
    pub fn count(self) -> usize {
        match self {
            FeatureDims::Three => 3,
            FeatureDims::Four => 4,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KMeansModel<T> {
    pub k: usize,
    pub dims: FeatureDims,
    pub centroids: Vec<Vec<T>>,
    pub assignments: Vec<usize>,
    /// Total squared distance after seeding and after every iteration.
    pub distortion_history: Vec<T>,
    pub iterations: usize,
}

impl<T: Scalar> KMeansModel<T> {
    pub fn distortion(&self) -> T {
        *self.distortion_history.last().unwrap()
    }
}

fn dist2<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(&x, &y)| (x - y) * (x - y)).sum()
}

fn nearest<T: Scalar>(p: &[T], centroids: &[Vec<T>]) -> (usize, T) {
    let mut best = (0, T::infinity());
    for (i, c) in centroids.iter().enumerate() {
        let d = dist2(p, c);
        if d < best.1 {
            best = (i, d);
        }
    }
    best
}

fn total_distortion<T: Scalar>(points: &[Vec<T>], centroids: &[Vec<T>], assign: &[usize]) -> T {
    points
        .iter()
        .zip(assign)
        .map(|(p, &a)| dist2(p, &centroids[a]))
        .sum()
}

/// k-means++ seeding: first centre uniform, each next one with probability
/// proportional to the squared distance to the closest centre so far.
fn seed_centroids<T: Scalar>(points: &[Vec<T>], k: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<T>> {
    let mut centroids = vec![points[rng.gen_range(0..points.len())].clone()];
    let mut d: Vec<f64> = points.iter().map(|p| dist2(p, &centroids[0]).as_f64()).collect();
    while centroids.len() < k {
        let total: f64 = d.iter().sum();
        let pick = if total > 0.0 {
            let mut target = rng.gen::<f64>() * total;
            let mut chosen = d.len() - 1;
            for (i, &w) in d.iter().enumerate() {
                if w > 0.0 && target < w {
                    chosen = i;
                    break;
                }
                target -= w;
            }
            // guard against landing on a zero-weight tail through rounding
            if d[chosen] == 0.0 {
                chosen = d.iter().rposition(|&w| w > 0.0).unwrap();
            }
            chosen
        } else {
            rng.gen_range(0..points.len())
        };
        let c = points[pick].clone();
        for (di, p) in d.iter_mut().zip(points) {
            *di = di.min(dist2(p, &c).as_f64());
        }
        centroids.push(c);
    }
    centroids
}

/// Clusters the rows of `data` on the first `dims` features.
///
/// Lloyd iterations run until the assignment stops changing or
/// [`MAX_ITERATIONS`] is reached. An emptied cluster is moved onto the point
/// farthest from its current centre.
pub fn kmeans_cluster<T: Scalar>(
    data: &Dataset<T>,
    k: usize,
    dims: FeatureDims,
    seed: u64,
) -> Result<KMeansModel<T>> {
    if k == 0 {
        return Err(Error::invalid("k must be >= 1"));
    }
    if k > data.len() {
        return Err(Error::invalid(format!(
            "k = {k} exceeds {} data rows",
            data.len()
        )));
    }
    let d = dims.count();
    let points: Vec<Vec<T>> = data.rows().iter().map(|s| s.features[..d].to_vec()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut centroids = seed_centroids(&points, k, &mut rng);
    let mut assign: Vec<usize> = points.iter().map(|p| nearest(p, &centroids).0).collect();
    let mut history = vec![total_distortion(&points, &centroids, &assign)];

    let mut iterations = 0;
    while iterations < MAX_ITERATIONS {
        iterations += 1;
        // update step
        let mut sums = vec![vec![T::zero(); d]; k];
        let mut counts = vec![0usize; k];
        for (p, &a) in points.iter().zip(&assign) {
            counts[a] += 1;
            for (s, &v) in sums[a].iter_mut().zip(p) {
                *s += v;
            }
        }
        for (j, (s, &n)) in sums.iter().zip(&counts).enumerate() {
            if n > 0 {
                centroids[j] = s.iter().map(|&v| v / T::from_count(n)).collect();
            }
        }
        for j in 0..k {
            if counts[j] == 0 {
                let far = (0..points.len())
                    .max_by(|&a, &b| {
                        let da = dist2(&points[a], &centroids[assign[a]]);
                        let db = dist2(&points[b], &centroids[assign[b]]);
                        da.partial_cmp(&db).unwrap().then(b.cmp(&a))
                    })
                    .unwrap();
                counts[assign[far]] -= 1;
                assign[far] = j;
                counts[j] = 1;
                centroids[j] = points[far].clone();
            }
        }
        // assignment step
        let next: Vec<usize> = points.iter().map(|p| nearest(p, &centroids).0).collect();
        let changed = next != assign;
        assign = next;
        history.push(total_distortion(&points, &centroids, &assign));
        if !changed {
            break;
        }
    }
    // final centroids are the means of their members
    let mut sums = vec![vec![T::zero(); d]; k];
    let mut counts = vec![0usize; k];
    for (p, &a) in points.iter().zip(&assign) {
        counts[a] += 1;
        for (s, &v) in sums[a].iter_mut().zip(p) {
            *s += v;
        }
    }
    for j in 0..k {
        if counts[j] > 0 {
            centroids[j] = sums[j].iter().map(|&v| v / T::from_count(counts[j])).collect();
        }
    }
    let last = total_distortion(&points, &centroids, &assign);
    if last < *history.last().unwrap() {
        history.push(last);
    }
    Ok(KMeansModel {
        k,
        dims,
        centroids,
        assignments: assign,
        distortion_history: history,
        iterations,
    })
}

/// Fraction of rows whose label is the majority label of their cluster.
pub fn purity(assignments: &[usize], labels: &[ClassLabel], k: usize) -> f64 {
    assert_eq!(assignments.len(), labels.len());
    if labels.is_empty() {
        return 0.0;
    }
    let mut counts = vec![[0usize; 256]; k];
    for (&a, &l) in assignments.iter().zip(labels) {
        counts[a][l as usize] += 1;
    }
    let hits: usize = counts.iter().map(|c| *c.iter().max().unwrap()).sum();
    hits as f64 / labels.len() as f64
}
