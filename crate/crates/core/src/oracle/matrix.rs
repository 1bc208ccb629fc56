use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{decide, Outcome, Verdict};
use crate::params::SpaceSpec;
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MatrixCell {
    Verdict(Verdict),
    Error { error: String },
}

impl MatrixCell {
    pub fn outcome(&self) -> Option<Outcome> {
        match self {
            MatrixCell::Verdict(v) => Some(v.outcome),
            MatrixCell::Error { .. } => None,
        }
    }

    pub fn symbol(&self) -> &'static str {
        match self.outcome() {
            Some(Outcome::Embeds) => "Y",
            Some(Outcome::DoesNotEmbed) => "n",
            Some(Outcome::Unknown) => "?",
            None => "E",
        }
    }
}

/// `A ↪ B` and `B ↪ C` decided, yet `A ↪ C` refuted.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransitivityViolation {
    pub a: usize,
    pub b: usize,
    pub c: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingMatrix {
    /// `cells[i][j]` is the verdict for `specs[i] ↪ specs[j]`.
    pub cells: Vec<Vec<MatrixCell>>,
    pub violations: Vec<TransitivityViolation>,
}

impl EmbeddingMatrix {
    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn outcome(&self, i: usize, j: usize) -> Option<Outcome> {
        self.cells[i][j].outcome()
    }

    /// Plain-text grid: `Y` embeds, `n` does not, `?` unknown, `E` error.
    pub fn render(&self, labels: &[String]) -> String {
        let width = labels.iter().map(|l| l.len()).max().unwrap_or(0);
        let mut out = String::new();
        out.push_str(&format!("{:width$} |", "src \\ tgt"));
        for j in 0..self.len() {
            out.push_str(&format!(" {j:>2}"));
        }
        out.push('\n');
        for (i, row) in self.cells.iter().enumerate() {
            let label = labels.get(i).map(String::as_str).unwrap_or("");
            out.push_str(&format!("{label:width$} |"));
            for cell in row {
                out.push_str(&format!("  {}", cell.symbol()));
            }
            out.push_str(&format!("   [{i}]\n"));
        }
        out.push_str(&format!(
            "transitivity audit: {} violation(s)\n",
            self.violations.len()
        ));
        out
    }
}

/// All pairwise verdicts, evaluated in parallel, plus a transitivity audit.
/// Invalid specs and mismatched dimensions become cell-level errors.
pub fn embedding_matrix<S: Scalar>(specs: &[SpaceSpec<S>]) -> EmbeddingMatrix {
    let n = specs.len();
    let cells: Vec<Vec<MatrixCell>> = (0..n)
        .into_par_iter()
        .map(|i| {
            (0..n)
                .map(|j| match decide(&specs[i], &specs[j]) {
                    Ok(v) => MatrixCell::Verdict(v),
                    Err(e) => MatrixCell::Error { error: e.to_string() },
                })
                .collect()
        })
        .collect();
    let embeds = |i: usize, j: usize| cells[i][j].outcome() == Some(Outcome::Embeds);
    let mut violations = Vec::new();
    for a in 0..n {
        for b in 0..n {
            if !embeds(a, b) {
                continue;
            }
            for c in 0..n {
                if embeds(b, c) && cells[a][c].outcome() == Some(Outcome::DoesNotEmbed) {
                    violations.push(TransitivityViolation { a, b, c });
                }
            }
        }
    }
    EmbeddingMatrix { cells, violations }
}
