//! Occupancy-count estimation over [`FeatureVector`] rows: RBF-SVM training,
//! grid-search cross-validation, a K-means baseline and evaluation.

mod cv;
mod eval;
mod kmeans;
mod model_io;
mod svm;

pub use cv::{cross_validate, default_c_grid, default_gamma_grid, stratified_folds, CvResult, GridScore};
pub use eval::{evaluate, EvalReport};
pub use kmeans::{kmeans_cluster, purity, FeatureDims, KMeansModel};
pub use model_io::{load_model, save_model, MODEL_HEADER};
pub use svm::{
    rbf_kernel, solve_binary, train_svm, BinarySolution, Features, Normalization, PairModel,
    SupportVector, SvmModel, SvmParams,
};

use crate::blobs::FeatureVector;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub const FEATURE_DIM: usize = 4;
/// Scene occupancy classes.
pub const CLASSES: [ClassLabel; 4] = [1, 2, 3, 4];

/// Number of people in a scene, 1 to 4.
pub type ClassLabel = u8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample<T> {
    pub features: Features<T>,
    pub label: ClassLabel,
}

impl<T: Scalar> Sample<T> {
    pub fn from_features(fv: &FeatureVector, label: ClassLabel) -> Self {
        Sample {
            features: fv.to_array(),
            label,
        }
    }
}

/// Labelled feature rows.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Dataset<T> {
    rows: Vec<Sample<T>>,
}

fn check_label(label: ClassLabel) -> Result<()> {
    if CLASSES.contains(&label) {
        Ok(())
    } else {
        Err(Error::invalid(format!("class label {label} not in 1..=4")))
    }
}

impl<T: Scalar> Dataset<T> {
    pub fn new(rows: Vec<Sample<T>>) -> Result<Self> {
        for r in &rows {
            check_label(r.label)?;
        }
        Ok(Dataset { rows })
    }

    pub fn push(&mut self, fv: &FeatureVector, label: ClassLabel) -> Result<()> {
        check_label(label)?;
        self.rows.push(Sample::from_features(fv, label));
        Ok(())
    }

    pub fn rows(&self) -> &[Sample<T>] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Distinct labels, ascending.
    pub fn classes(&self) -> Vec<ClassLabel> {
        let mut c: Vec<ClassLabel> = self.rows.iter().map(|r| r.label).collect();
        c.sort_unstable();
        c.dedup();
        c
    }

    pub fn subset(&self, idx: &[usize]) -> Self {
        Dataset {
            rows: idx.iter().map(|&i| self.rows[i]).collect(),
        }
    }

    pub fn concat(&self, other: &Self) -> Self {
        let mut rows = self.rows.clone();
        rows.extend_from_slice(&other.rows);
        Dataset { rows }
    }

    /// Splits off the first `n` rows of every class; the remaining rows form
    /// the second set. Row order is kept in both.
    pub fn split_per_class(&self, n: usize) -> (Self, Self) {
        let mut seen = [0usize; 4];
        let (mut head, mut tail) = (Vec::new(), Vec::new());
        for r in &self.rows {
            let k = &mut seen[r.label as usize - 1];
            if *k < n {
                head.push(*r);
            } else {
                tail.push(*r);
            }
            *k += 1;
        }
        (Dataset { rows: head }, Dataset { rows: tail })
    }

    /// Label counts indexed by `label - 1`.
    pub fn class_counts(&self) -> [usize; 4] {
        let mut counts = [0; 4];
        for r in &self.rows {
            counts[r.label as usize - 1] += 1;
        }
        counts
    }
}
