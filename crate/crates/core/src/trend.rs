//! Windowed trend heuristic shared by every asymptotic predicate.
//!
//! Finite data cannot decide an "exists C, for all k" statement. Instead we
//! split the valid index range into quarters and compare the windowed maxima
//! of the per-index constant over the last three quarters: `W0 = [L/4, L/2)`,
//! `W1 = [L/2, 3L/4)`, `W2 = [3L/4, L)`. A bounded-type condition *holds*
//! when the max does not rise from `W1` to `W2` by more than `tol_trend`
//! (log-domain, per index), *fails* when it rises by more than that in both
//! comparisons (`W0 -> W1` and `W1 -> W2`), and is *inconclusive* otherwise.
//! The same windows drive the decay and divergence variants.

use serde::{Deserialize, Serialize};

/// Extrapolated outcome of a finite-truncation asymptotic test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Trend {
    Holds,
    Fails,
    Inconclusive,
}

impl Trend {
    pub fn holds(self) -> bool {
        self == Trend::Holds
    }
}

/// Tolerances for the windowed tests. `tol_trend` is in log units per index.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct TrendParams {
    pub tol_trend: f64,
}

impl Default for TrendParams {
    fn default() -> Self {
        TrendParams { tol_trend: 0.05 }
    }
}

/// Three-state outcome of a single predicate at finite truncation.
///
/// `at_truncation` answers "did the inequality hold for every index we could
/// scan"; `trend` extrapolates; `log_constant` is the minimal certifying
/// constant over the scanned range (log domain); `witness` is the first
/// violating index tuple when `at_truncation` is false, or a certifying
/// tuple otherwise when one is meaningful.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub at_truncation: bool,
    pub trend: Trend,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub log_constant: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Vec<usize>>,
}

impl Verdict {
    pub fn exact(holds: bool, witness: Option<Vec<usize>>) -> Self {
        Verdict {
            at_truncation: holds,
            trend: if holds { Trend::Holds } else { Trend::Fails },
            log_constant: None,
            witness,
        }
    }

    pub fn holds(&self) -> bool {
        self.trend == Trend::Holds
    }

    /// Certifying constant in linear scale, when one was computed.
    pub fn constant(&self) -> Option<f64> {
        self.log_constant.map(f64::exp)
    }
}

/// Windowed maxima (m0, m1, m2) over the last three quarters of the finite
/// entries of `vals`. NaN entries mark undefined indices and are skipped.
pub fn window_maxima(vals: &[f64]) -> Option<(f64, f64, f64)> {
    let finite: Vec<f64> = vals.iter().copied().filter(|v| v.is_finite()).collect();
    let len = finite.len();
    if len < 8 {
        return None;
    }
    let max_of = |lo: usize, hi: usize| -> f64 {
        finite[lo..hi].iter().copied().fold(f64::NEG_INFINITY, f64::max)
    };
    Some((
        max_of(len / 4, len / 2),
        max_of(len / 2, 3 * len / 4),
        max_of(3 * len / 4, len),
    ))
}

/// Windowed minima over the same quarters.
pub fn window_minima(vals: &[f64]) -> Option<(f64, f64, f64)> {
    let negated: Vec<f64> = vals.iter().map(|v| -v).collect();
    window_maxima(&negated).map(|(a, b, c)| (-a, -b, -c))
}

/// Bounded-above test: does the per-index constant stay bounded?
pub fn bounded_trend(vals: &[f64], params: TrendParams) -> Trend {
    match window_maxima(vals) {
        None => Trend::Inconclusive,
        Some((m0, m1, m2)) => {
            let c1 = m1 - m0;
            let c2 = m2 - m1;
            if c2 <= params.tol_trend {
                Trend::Holds
            } else if c1 > params.tol_trend && c2 > params.tol_trend {
                Trend::Fails
            } else {
                Trend::Inconclusive
            }
        }
    }
}

/// Bounded-above test with a nonpositive-cap upgrade: a statistic that never
/// exceeds zero certifies its inequality with constant 1 at truncation, so
/// when its windowed maxima climb toward zero with *shrinking* increments it
/// is treated as approaching a nonpositive supremum and reported as holding.
/// Climbing with non-shrinking increments stays at the plain windowed result.
pub fn bounded_trend_capped(vals: &[f64], params: TrendParams) -> Trend {
    let base = bounded_trend(vals, params);
    if base == Trend::Holds {
        return base;
    }
    let global_max = vals
        .iter()
        .copied()
        .filter(|v| v.is_finite())
        .fold(f64::NEG_INFINITY, f64::max);
    if global_max <= 1e-9 {
        if let Some((m0, m1, m2)) = window_maxima(vals) {
            if m2 - m1 < m1 - m0 {
                return Trend::Holds;
            }
        }
    }
    base
}

/// Decay test: does the (log-domain) statistic sink below `-tol` with a
/// decreasing trend? Used for the `triangle` relation and every little-o
/// condition. A statistic that is negative but flat is *not* decaying.
pub fn decay_trend(vals: &[f64], params: TrendParams) -> Trend {
    match window_maxima(vals) {
        None => Trend::Inconclusive,
        Some((_, m1, m2)) => {
            let decreasing = m2 < m1 - params.tol_trend;
            let low = m2 <= -params.tol_trend;
            match (decreasing, low) {
                (true, true) => Trend::Holds,
                (false, _) => Trend::Fails,
                (true, false) => Trend::Inconclusive,
            }
        }
    }
}

/// Divergence test: does the windowed max keep climbing in both comparisons?
pub fn divergence_trend(vals: &[f64], params: TrendParams) -> Trend {
    match window_maxima(vals) {
        None => Trend::Inconclusive,
        Some((m0, m1, m2)) => {
            let c1 = m1 - m0;
            let c2 = m2 - m1;
            if c1 > params.tol_trend && c2 > params.tol_trend {
                Trend::Holds
            } else if c2 <= params.tol_trend && c1 <= params.tol_trend {
                Trend::Fails
            } else {
                Trend::Inconclusive
            }
        }
    }
}

/// Bounded-below test on windowed minima (for liminf-positive statements).
pub fn bounded_below_trend(vals: &[f64], params: TrendParams) -> Trend {
    let negated: Vec<f64> = vals.iter().map(|v| -v).collect();
    bounded_trend(&negated, params)
}

/// Divergence test on windowed minima (for lim = +infinity statements).
pub fn min_divergence_trend(vals: &[f64], params: TrendParams) -> Trend {
    match window_minima(vals) {
        None => Trend::Inconclusive,
        Some((m0, m1, m2)) => {
            let c1 = m1 - m0;
            let c2 = m2 - m1;
            if c1 > params.tol_trend && c2 > params.tol_trend {
                Trend::Holds
            } else if c2 <= params.tol_trend && c1 <= params.tol_trend {
                Trend::Fails
            } else {
                Trend::Inconclusive
            }
        }
    }
}
