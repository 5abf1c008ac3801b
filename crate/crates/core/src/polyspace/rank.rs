use serde::{Deserialize, Serialize};

/// Numerical rank decision for a singular spectrum.
///
/// Values at or below `rel_tol * sigma_max` count as zero. When at least two
/// fall below the tolerance, the boundary between the numerical null space
/// and the rest is placed at the largest ratio `sigma_j / sigma_{j+1}`
/// searched from the last value above tolerance onward; exact but badly
/// conditioned instances then still report codimension 1. Values are floored
/// at `1e-3 * eps * sigma_max` before forming ratios so roundoff-level
/// entries do not manufacture spurious gaps.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RankRule {
    pub rel_tol: f64,
}

impl Default for RankRule {
    fn default() -> Self {
        Self { rel_tol: 1e-8 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RankEstimate {
    pub rank: usize,
    pub codim: usize,
    /// Number of singular values at or below the tolerance.
    pub below_tol: usize,
    /// `sigma_{last-1} / sigma_last`, floored as described on [`RankRule`].
    pub gap: f64,
}

impl RankRule {
    /// `values` must be sorted in descending order; missing trailing values
    /// (fewer rows than columns) are treated as zeros.
    pub fn estimate(&self, values: &[f64], cols: usize) -> RankEstimate {
        let padded: Vec<f64> = (0..cols).map(|j| values.get(j).copied().unwrap_or(0.0)).collect();
        let s0 = padded.first().copied().unwrap_or(0.0);
        if cols == 0 {
            return RankEstimate { rank: 0, codim: 0, below_tol: 0, gap: f64::INFINITY };
        }
        if s0 <= 0.0 {
            return RankEstimate { rank: 0, codim: cols, below_tol: cols, gap: 1.0 };
        }
        let floor = f64::EPSILON * s0 * 1e-3;
        let floored: Vec<f64> = padded.iter().map(|&s| s.max(floor)).collect();
        let gap = if cols >= 2 { floored[cols - 2] / floored[cols - 1] } else { f64::INFINITY };
        let below_tol = padded.iter().filter(|&&s| s <= self.rel_tol * s0).count();
        let codim = if below_tol <= 1 {
            below_tol
        } else {
            let start = cols - below_tol - 1;
            let (split, _) = (start..cols - 1)
                .map(|j| (j, floored[j] / floored[j + 1]))
                .fold((start, f64::NEG_INFINITY), |best, cur| if cur.1 > best.1 { cur } else { best });
            cols - split - 1
        };
        RankEstimate { rank: cols - codim, codim, below_tol, gap }
    }
}
