use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Square count matrix; rows are presented classes, columns responses.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub labels: Vec<String>,
    pub counts: Vec<Vec<u64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfusionMetrics {
    pub overall_accuracy: f64,
    /// Row-normalised diagonal; `None` for classes never presented.
    pub per_class_accuracy: Vec<Option<f64>>,
    /// Mean of the defined per-class accuracies.
    pub mean_class_accuracy: f64,
    pub chance_level: f64,
}

impl ConfusionMatrix {
    pub fn new(labels: Vec<String>) -> Self {
        let k = labels.len();
        Self {
            labels,
            counts: vec![vec![0; k]; k],
        }
    }

    pub fn k(&self) -> usize {
        self.labels.len()
    }

    pub fn record(&mut self, presented: usize, answered: usize) {
        self.counts[presented][answered] += 1;
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    pub fn merge(&mut self, other: &ConfusionMatrix) -> Result<()> {
        if self.labels != other.labels {
            return Err(Error::invalid("confusion matrices have different labels"));
        }
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            for (x, y) in a.iter_mut().zip(b) {
                *x += y;
            }
        }
        Ok(())
    }

    fn validate(&self) -> Result<()> {
        let k = self.k();
        if k == 0 || self.counts.is_empty() {
            return Err(Error::EmptyInput("confusion matrix has no classes"));
        }
        if self.counts.len() != k || self.counts.iter().any(|r| r.len() != k) {
            return Err(Error::invalid("confusion matrix must be k × k"));
        }
        Ok(())
    }
}

pub fn confusion_metrics(matrix: &ConfusionMatrix) -> Result<ConfusionMetrics> {
    matrix.validate()?;
    let total = matrix.total();
    if total == 0 {
        return Err(Error::EmptyInput("confusion matrix has no observations"));
    }
    let trace: u64 = (0..matrix.k()).map(|i| matrix.counts[i][i]).sum();
    let per_class: Vec<Option<f64>> = matrix
        .counts
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let n: u64 = row.iter().sum();
            (n > 0).then(|| row[i] as f64 / n as f64)
        })
        .collect();
    let defined: Vec<f64> = per_class.iter().flatten().copied().collect();
    Ok(ConfusionMetrics {
        overall_accuracy: trace as f64 / total as f64,
        mean_class_accuracy: defined.iter().sum::<f64>() / defined.len() as f64,
        per_class_accuracy: per_class,
        chance_level: 1.0 / matrix.k() as f64,
    })
}
