use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

use super::{Dataset, SvmModel, CLASSES};

/// Accuracy and confusion on a labelled test set.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub accuracy: f64,
    /// `confusion[true - 1][predicted - 1]`.
    pub confusion: [[usize; 4]; 4],
    /// Recall per class; 0 for classes absent from the test set.
    pub per_class_recall: [f64; 4],
    pub total: usize,
}

impl EvalReport {
    pub fn from_pairs(pairs: impl IntoIterator<Item = (u8, u8)>) -> Result<Self> {
        let mut confusion = [[0usize; 4]; 4];
        let mut total = 0;
        for (truth, pred) in pairs {
            confusion[truth as usize - 1][pred as usize - 1] += 1;
            total += 1;
        }
        if total == 0 {
            return Err(Error::EmptyInput("test data"));
        }
        let hits: usize = (0..4).map(|i| confusion[i][i]).sum();
        let mut per_class_recall = [0.0; 4];
        for (i, row) in confusion.iter().enumerate() {
            let n: usize = row.iter().sum();
            if n > 0 {
                per_class_recall[i] = row[i] as f64 / n as f64;
            }
        }
        Ok(EvalReport {
            accuracy: hits as f64 / total as f64,
            confusion,
            per_class_recall,
            total,
        })
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        writeln!(s, "accuracy {:.4} ({} rows)", self.accuracy, self.total).unwrap();
        writeln!(s, "confusion (rows = true 1..4, cols = predicted 1..4)").unwrap();
        for row in &self.confusion {
            let cells: Vec<String> = row.iter().map(|v| format!("{v:>5}")).collect();
            writeln!(s, "{}", cells.join("")).unwrap();
        }
        let recall: Vec<String> = CLASSES
            .iter()
            .zip(&self.per_class_recall)
            .map(|(c, r)| format!("{c}:{r:.4}"))
            .collect();
        writeln!(s, "recall {}", recall.join(" ")).unwrap();
        s
    }

    /// Key-value lines plus a `confusion` matrix block.
    pub fn to_structured(&self) -> String {
        let mut s = String::new();
        writeln!(s, "accuracy={}", self.accuracy).unwrap();
        writeln!(s, "total={}", self.total).unwrap();
        for (c, r) in CLASSES.iter().zip(&self.per_class_recall) {
            writeln!(s, "recall_{c}={r}").unwrap();
        }
        writeln!(s, "[confusion]").unwrap();
        for row in &self.confusion {
            let cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
            writeln!(s, "{}", cells.join(",")).unwrap();
        }
        s
    }
}

pub fn evaluate<T: Scalar>(model: &SvmModel<T>, test: &Dataset<T>) -> Result<EvalReport> {
    EvalReport::from_pairs(test.rows().iter().map(|s| {
        (
            s.label,
            model.predict_normalized(&model.normalization.apply(&s.features)),
        )
    }))
}
