//! Softmax cross-entropy and classification accuracy.

use crate::act::Matrix;
use crate::NnError;

/// Index of the largest entry; ties resolve to the lowest index.
pub fn argmax(row: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in row.iter().enumerate().skip(1) {
        if v > row[best] {
            best = i;
        }
    }
    best
}

/// Fraction of rows whose argmax equals the label.
pub fn accuracy(logits: &Matrix, labels: &[usize]) -> f64 {
    let correct = labels
        .iter()
        .enumerate()
        .filter(|&(b, &y)| argmax(logits.row(b)) == y)
        .count();
    correct as f64 / labels.len().max(1) as f64
}

/// Mean softmax cross-entropy over the batch and its gradient with respect
/// to the logits. Stable via the usual max-shift; gradient rows are
/// `(softmax - onehot) / batch`.
pub fn softmax_cross_entropy(
    logits: &Matrix,
    labels: &[usize],
) -> Result<(f64, Matrix), NnError> {
    let batch = logits.rows();
    let classes = logits.cols();
    if batch == 0 {
        return Err(NnError::EmptyBatch);
    }
    if labels.len() != batch {
        return Err(NnError::LabelCount {
            batch,
            labels: labels.len(),
        });
    }
    if let Some(&bad) = labels.iter().find(|&&y| y >= classes) {
        return Err(NnError::LabelOutOfRange {
            label: bad,
            classes,
        });
    }

    let mut grad = Matrix::zeros(batch, classes);
    let inv_batch = 1.0 / batch as f64;
    let mut total = 0.0;
    for b in 0..batch {
        let row = logits.row(b);
        let m = row.iter().fold(f64::NEG_INFINITY, |a, &v| a.max(v));
        let mut sum = 0.0;
        let grow = grad.row_mut(b);
        for (g, &z) in grow.iter_mut().zip(row) {
            *g = (z - m).exp();
            sum += *g;
        }
        total += sum.ln() - (row[labels[b]] - m);
        for (c, g) in grow.iter_mut().enumerate() {
            *g = (*g / sum - if c == labels[b] { 1.0 } else { 0.0 }) * inv_batch;
        }
    }
    Ok((total * inv_batch, grad))
}
