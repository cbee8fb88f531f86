//! Side-by-side comparison of two Betti tables.

use serde::{Deserialize, Serialize};

use crate::chains::{BettiTable, Mismatch};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub left: BettiTable,
    pub right: BettiTable,
    /// Entries with `s ≤ window` were compared.
    pub window: usize,
    pub verdict: String,
    pub first_mismatch: Option<Mismatch>,
}

impl ComparisonReport {
    /// Compares through `s_max`, clipped to both tables' validity.
    pub fn new(left: BettiTable, right: BettiTable, s_max: usize) -> ComparisonReport {
        let window = s_max.min(left.s_valid).min(right.s_valid);
        let first_mismatch = left.first_mismatch(&right, window);
        let verdict = if first_mismatch.is_none() { "agree" } else { "disagree" }.to_string();
        ComparisonReport {
            left,
            right,
            window,
            verdict,
            first_mismatch,
        }
    }

    pub fn agrees(&self) -> bool {
        self.first_mismatch.is_none()
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn render(&self) -> String {
        let mut out = format!(
            "{} vs {} through s = {}: {}\n",
            self.left.provenance, self.right.provenance, self.window, self.verdict
        );
        if let Some(m) = &self.first_mismatch {
            out.push_str(&format!(
                "first mismatch at (s={}, t={}): {} vs {}\n",
                m.s, m.t, m.left, m.right
            ));
        }
        out.push_str(&format!(
            "\n[{}]\n{}",
            self.left.provenance,
            self.left.window(self.window).render()
        ));
        out.push_str(&format!(
            "\n[{}]\n{}",
            self.right.provenance,
            self.right.window(self.window).render()
        ));
        out
    }
}
