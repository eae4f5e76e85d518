// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! Partition agreement: contingency tables and normalized mutual information.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::partition::Partition;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EvaluationError {
    #[error("partitions cover {left} and {right} nodes")]
    NodeSetMismatch { left: usize, right: usize },
}

/// Sparse contingency table between a reference and a candidate partition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfusionTable {
    /// `(truth block, found block) -> shared nodes`, nonzero cells only.
    pub counts: BTreeMap<(usize, usize), usize>,
    pub row_totals: Vec<usize>,
    pub col_totals: Vec<usize>,
    pub total: usize,
}

impl ConfusionTable {
    pub fn get(&self, row: usize, col: usize) -> usize {
        self.counts.get(&(row, col)).copied().unwrap_or(0)
    }
}

pub fn confusion(truth: &Partition, found: &Partition) -> Result<ConfusionTable, EvaluationError> {
    if truth.len() != found.len() {
        return Err(EvaluationError::NodeSetMismatch {
            left: truth.len(),
            right: found.len(),
        });
    }
    let mut counts = BTreeMap::new();
    for (&a, &b) in truth.labels().iter().zip(found.labels()) {
        *counts.entry((a, b)).or_insert(0) += 1;
    }
    Ok(ConfusionTable {
        counts,
        row_totals: truth.sizes(),
        col_totals: found.sizes(),
        total: truth.len(),
    })
}

/// Normalized mutual information with the arithmetic-mean normalizer:
///
/// `-2 Σ n_ij ln(n_ij n / (n_i n_j)) / (Σ n_i ln(n_i / n) + Σ n_j ln(n_j / n))`.
///
/// When both partitions are a single block the normalizer vanishes and the
/// partitions are identical, so the result is 1.
pub fn nmi(truth: &Partition, found: &Partition) -> Result<f64, EvaluationError> {
    let table = confusion(truth, found)?;
    Ok(nmi_from_table(&table))
}

/// Terms are summed in sorted order so that swapping or relabeling the
/// partitions gives a bit-identical result.
pub fn nmi_from_table(table: &ConfusionTable) -> f64 {
    let n = table.total as f64;
    if table.total == 0 {
        return 1.0;
    }
    let sorted_sum = |mut terms: Vec<f64>| -> f64 {
        terms.sort_by(f64::total_cmp);
        terms.into_iter().sum()
    };
    let entropy_term = |totals: &[usize]| -> f64 {
        sorted_sum(
            totals
                .iter()
                .filter(|&&c| c > 0)
                .map(|&c| c as f64 * (c as f64 / n).ln())
                .collect(),
        )
    };
    let denom = entropy_term(&table.row_totals) + entropy_term(&table.col_totals);
    if denom == 0.0 {
        return 1.0;
    }
    let numer = sorted_sum(
        table
            .counts
            .iter()
            .map(|(&(i, j), &c)| {
                let c = c as f64;
                let expected = table.row_totals[i] as f64 * table.col_totals[j] as f64;
                c * (c * n / expected).ln()
            })
            .collect(),
    );
    (-2.0 * numer / denom).clamp(0.0, 1.0)
}
