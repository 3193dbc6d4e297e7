use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

use super::svm::{train_svm, SvmParams};
use super::Dataset;

/// `C` in `2^-1 ..= 2^7`.
pub fn default_c_grid<T: Scalar>() -> Vec<T> {
    (-1..=7).map(|e| T::lit(2f64.powi(e))).collect()
}

/// `gamma` in `2^-10 ..= 2^1`.
pub fn default_gamma_grid<T: Scalar>() -> Vec<T> {
    (-10..=1).map(|e| T::lit(2f64.powi(e))).collect()
}

/// Stratified fold index per row. Rows of each class are shuffled with a
/// seeded RNG, then dealt round-robin, continuing the deal across classes so
/// fold sizes differ by at most one.
pub fn stratified_folds<T: Scalar>(data: &Dataset<T>, folds: usize, seed: u64) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut assignment = vec![0; data.len()];
    let mut next = 0;
    for class in data.classes() {
        let mut idx: Vec<usize> = (0..data.len())
            .filter(|&i| data.rows()[i].label == class)
            .collect();
        idx.shuffle(&mut rng);
        for i in idx {
            assignment[i] = next % folds;
            next += 1;
        }
    }
    assignment
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridScore<T> {
    pub c: T,
    pub gamma: T,
    pub fold_accuracies: Vec<f64>,
    pub mean_accuracy: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CvResult<T> {
    pub best_c: T,
    pub best_gamma: T,
    /// Fold accuracies at the chosen grid point.
    pub fold_accuracies: Vec<f64>,
    pub mean_accuracy: f64,
    /// Every grid point, ordered by `C` then `gamma` as given.
    pub scores: Vec<GridScore<T>>,
}

/// Grid search over `(C, gamma)` with stratified k-fold cross-validation.
///
/// Picks the highest mean fold accuracy; ties go to the smaller `C`, then the
/// smaller `gamma`. Grid points run in parallel, the result does not depend on
/// scheduling.
pub fn cross_validate<T: Scalar>(
    data: &Dataset<T>,
    c_grid: &[T],
    gamma_grid: &[T],
    folds: usize,
    seed: u64,
    tol: T,
) -> Result<CvResult<T>> {
    if c_grid.is_empty() || gamma_grid.is_empty() {
        return Err(Error::invalid("parameter grid is empty"));
    }
    if folds < 2 || folds > data.len() {
        return Err(Error::invalid(format!(
            "folds must be in 2..={}, got {folds}",
            data.len()
        )));
    }
    let assignment = stratified_folds(data, folds, seed);
    let splits: Vec<(Dataset<T>, Dataset<T>)> = (0..folds)
        .map(|f| {
            let (test, train): (Vec<usize>, Vec<usize>) =
                (0..data.len()).partition(|&i| assignment[i] == f);
            (data.subset(&train), data.subset(&test))
        })
        .collect();

    let mut points: Vec<(T, T)> = Vec::new();
    for &c in c_grid {
        for &g in gamma_grid {
            points.push((c, g));
        }
    }

    let scores = points
        .par_iter()
        .map(|&(c, gamma)| {
            let params = SvmParams::new(c, gamma).with_tol(tol);
            let fold_accuracies = splits
                .iter()
                .map(|(train, test)| {
                    let model = train_svm(train, &params)?;
                    let hits = test
                        .rows()
                        .iter()
                        .filter(|s| model.predict_normalized(&model.normalization.apply(&s.features)) == s.label)
                        .count();
                    Ok(hits as f64 / test.len() as f64)
                })
                .collect::<Result<Vec<f64>>>()?;
            let mean_accuracy = fold_accuracies.iter().sum::<f64>() / folds as f64;
            Ok(GridScore {
                c,
                gamma,
                fold_accuracies,
                mean_accuracy,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| {
        let (sa, sb) = (&scores[a], &scores[b]);
        sb.mean_accuracy
            .partial_cmp(&sa.mean_accuracy)
            .unwrap()
            .then(sa.c.partial_cmp(&sb.c).unwrap())
            .then(sa.gamma.partial_cmp(&sb.gamma).unwrap())
    });
    let best = &scores[order[0]];
    Ok(CvResult {
        best_c: best.c,
        best_gamma: best.gamma,
        fold_accuracies: best.fold_accuracies.clone(),
        mean_accuracy: best.mean_accuracy,
        scores,
    })
}
