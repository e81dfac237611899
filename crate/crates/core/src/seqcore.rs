//! Weight sequences in log domain: derived views, single-sequence regularity
//! conditions and pairwise growth relations.

use serde::{Deserialize, Serialize};

use crate::trend::{
    bounded_trend_capped, decay_trend, divergence_trend, window_maxima, Trend, TrendParams,
    Verdict,
};
use crate::{log_factorial, Error, Result};

/// Minimum admissible truncation. Trend windows need at least two points
/// each, so anything shorter is rejected at construction.
pub const MIN_TRUNCATION: usize = 8;

/// A truncated weight sequence stored as log-values `log M_k`, `k = 0..=N`.
///
/// This is the universal carrier: the same type holds `M`, the reduced view
/// `m_k = M_k / k!`, the quotient view `mu_k = M_k / M_{k-1}` and the
/// auxiliary `r`/`s` sequences of the projective-description machinery.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogSeq {
    pub label: String,
    pub log_values: Vec<f64>,
}

impl LogSeq {
    /// Build a sequence from log-values, enforcing finiteness and `N >= 8`.
    pub fn new(label: impl Into<String>, log_values: Vec<f64>) -> Result<Self> {
        let label = label.into();
        if log_values.len() < MIN_TRUNCATION + 1 {
            return Err(Error::InvalidSequence {
                label,
                reason: format!(
                    "truncation N = {} is below the minimum {MIN_TRUNCATION}",
                    log_values.len().saturating_sub(1)
                ),
            });
        }
        if let Some(k) = log_values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidSequence {
                label,
                reason: format!("non-finite log-value at index {k}"),
            });
        }
        Ok(LogSeq { label, log_values })
    }

    /// Build from a closure producing `log M_k`.
    pub fn from_fn(label: impl Into<String>, n: usize, f: impl Fn(usize) -> f64) -> Result<Self> {
        LogSeq::new(label, (0..=n).map(f).collect())
    }

    /// Truncation length `N` (the largest valid index).
    pub fn n(&self) -> usize {
        self.log_values.len() - 1
    }

    /// `log M_k`.
    pub fn log(&self, k: usize) -> f64 {
        self.log_values[k]
    }

    /// Geometric rescale `M_k -> c^k M_k`, log-domain shift by `k * log_c`.
    pub fn scale_geometric(&self, log_c: f64) -> LogSeq {
        let log_values = (0..=self.n())
            .map(|k| self.log_values[k] + k as f64 * log_c)
            .collect();
        LogSeq {
            label: format!("{}*c^k", self.label),
            log_values,
        }
    }

    /// Entrywise product in log domain.
    pub fn mul(&self, other: &LogSeq) -> Result<LogSeq> {
        ensure_shared_truncation(self, other)?;
        let log_values = (0..=self.n())
            .map(|k| self.log_values[k] + other.log_values[k])
            .collect();
        LogSeq::new(format!("{}*{}", self.label, other.label), log_values)
    }

    /// Entrywise reciprocal `1 / M_k`.
    pub fn recip(&self) -> LogSeq {
        LogSeq {
            label: format!("recip({})", self.label),
            log_values: self.log_values.iter().map(|v| -v).collect(),
        }
    }

    /// Multiply by `k!` (turn an `m`-view into an `M`-view).
    pub fn times_factorial(&self) -> LogSeq {
        LogSeq {
            label: format!("{}*k!", self.label),
            log_values: (0..=self.n())
                .map(|k| self.log_values[k] + log_factorial(k))
                .collect(),
        }
    }
}

fn ensure_shared_truncation(a: &LogSeq, b: &LogSeq) -> Result<()> {
    if a.n() != b.n() {
        return Err(Error::MismatchedTruncation {
            left: a.n(),
            right: b.n(),
        });
    }
    Ok(())
}

/// Which view of the sequence a log-convexity check runs on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ConvexityView {
    M,
    SmallM,
}

/// Outcome kind of a pairwise growth comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RelationKind {
    Preceq,
    Triangle,
    Approx,
    None,
}

/// Result of comparing two sequences through the root statistic
/// `d_p = (log M_p - log N_p) / p`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelationResult {
    pub kind: RelationKind,
    /// `sup` of `d_p` over the tail half `[N/2, N]` (log domain).
    pub sup_ratio_root: f64,
    /// Mean of `d_p` over the last quarter window.
    pub limit_estimate: f64,
}

/// Derived views `(m, mu)` with `m_k = M_k / k!` and `mu_k = M_k / M_{k-1}`,
/// `mu_0 := 1`.
pub fn derive(seq: &LogSeq) -> (LogSeq, LogSeq) {
    let n = seq.n();
    let m = LogSeq {
        label: format!("m({})", seq.label),
        log_values: (0..=n).map(|k| seq.log(k) - log_factorial(k)).collect(),
    };
    let mut mu_vals = Vec::with_capacity(n + 1);
    mu_vals.push(0.0);
    for k in 1..=n {
        mu_vals.push(seq.log(k) - seq.log(k - 1));
    }
    let mu = LogSeq {
        label: format!("mu({})", seq.label),
        log_values: mu_vals,
    };
    (m, mu)
}

/// Log-convexity `X_j^2 <= X_{j-1} X_{j+1}` for all interior `j`, on the `M`
/// view (condition `lc`) or the `m` view (strong log-convexity `slc`). This
/// predicate is exact, not asymptotic: the trend mirrors the scan.
pub fn check_lc(seq: &LogSeq, on: ConvexityView) -> Verdict {
    let view = match on {
        ConvexityView::M => seq.clone(),
        ConvexityView::SmallM => derive(seq).0,
    };
    let n = view.n();
    for j in 1..n {
        // Tolerate a whisker of float noise from the lgamma route.
        if 2.0 * view.log(j) > view.log(j - 1) + view.log(j + 1) + 1e-9 {
            return Verdict::exact(false, Some(vec![j]));
        }
    }
    Verdict::exact(true, None)
}

/// Per-index moderate-growth constants: `c_p = max_{j+k=p} (log M_p - log
/// M_j - log M_k) / p`. Index 0 and 1 are left undefined.
fn mg_per_index(seq: &LogSeq) -> Vec<f64> {
    let n = seq.n();
    let mut out = vec![f64::NAN; n + 1];
    for p in 2..=n {
        let mut best = f64::NEG_INFINITY;
        for j in 1..p {
            let v = seq.log(p) - seq.log(j) - seq.log(p - j);
            if v > best {
                best = v;
            }
        }
        out[p] = best / p as f64;
    }
    out
}

/// Moderate growth `M_{j+k} <= C^{j+k} M_j M_k`: the constant is the scan
/// maximum of the per-index constants; the trend extrapolates boundedness.
pub fn check_mg(seq: &LogSeq, params: TrendParams) -> Verdict {
    let per_index = mg_per_index(seq);
    let log_c = per_index
        .iter()
        .copied()
        .filter(|v| v.is_finite())
        .fold(f64::NEG_INFINITY, f64::max)
        .max(0.0);
    Verdict {
        at_truncation: true,
        trend: bounded_trend_capped(&per_index, params),
        log_constant: Some(log_c),
        witness: None,
    }
}

/// Derivation closedness `M_{j+1} <= C^{j+1} M_j`.
pub fn check_dc(seq: &LogSeq, params: TrendParams) -> Verdict {
    let n = seq.n();
    let mut per_index = vec![f64::NAN; n + 1];
    for j in 0..n {
        per_index[j + 1] = (seq.log(j + 1) - seq.log(j)) / (j + 1) as f64;
    }
    let log_c = per_index
        .iter()
        .copied()
        .filter(|v| v.is_finite())
        .fold(f64::NEG_INFINITY, f64::max)
        .max(0.0);
    Verdict {
        at_truncation: true,
        trend: bounded_trend_capped(&per_index, params),
        log_constant: Some(log_c),
        witness: None,
    }
}

/// Membership in the set of normalized log-convex sequences with
/// `(M_k)^{1/k} -> infinity`: normalization and log-convexity are exact,
/// the divergence of the root sequence is a windowed trend test.
pub fn check_lcset(seq: &LogSeq, params: TrendParams) -> Verdict {
    let normalized = seq.log(0).abs() < 1e-12 && seq.log(1) >= -1e-12;
    if !normalized {
        return Verdict::exact(false, Some(vec![0]));
    }
    let lc = check_lc(seq, ConvexityView::M);
    if !lc.holds() {
        return Verdict {
            at_truncation: false,
            trend: Trend::Fails,
            log_constant: None,
            witness: lc.witness,
        };
    }
    let n = seq.n();
    let mut roots = vec![f64::NAN; n + 1];
    for k in 1..=n {
        roots[k] = seq.log(k) / k as f64;
    }
    // Strictly increasing over the tail half, and diverging across windows.
    let non_increase = (n / 2..n).find(|&k| roots[k + 1] <= roots[k] - 1e-12);
    let trend = divergence_trend(&roots, params);
    let ok = non_increase.is_none() && trend == Trend::Holds;
    Verdict {
        at_truncation: ok,
        trend: if ok { Trend::Holds } else { Trend::Fails },
        log_constant: None,
        // On failure, point at the stalling index (or the truncation end
        // when the roots grow but too slowly for the window test).
        witness: if ok { None } else { Some(vec![non_increase.unwrap_or(n)]) },
    }
}

/// Pairwise growth relation via `d_p = (log A_p - log B_p) / p`.
///
/// `triangle` requires the statistic to sink with a decreasing trend,
/// `preceq` a stable windowed max, `approx` is `preceq` both ways.
pub fn relate(a: &LogSeq, b: &LogSeq, params: TrendParams) -> Result<RelationResult> {
    ensure_shared_truncation(a, b)?;
    let n = a.n();
    let mut d = vec![f64::NAN; n + 1];
    for p in 1..=n {
        d[p] = (a.log(p) - b.log(p)) / p as f64;
    }
    let forward_bounded = bounded_trend_capped(&d, params) == Trend::Holds;
    let forward_decay = decay_trend(&d, params) == Trend::Holds;
    let mut d_back = vec![f64::NAN; n + 1];
    for p in 1..=n {
        d_back[p] = -d[p];
    }
    let backward_bounded = bounded_trend_capped(&d_back, params) == Trend::Holds;

    let kind = if forward_decay {
        RelationKind::Triangle
    } else if forward_bounded && backward_bounded {
        RelationKind::Approx
    } else if forward_bounded {
        RelationKind::Preceq
    } else {
        RelationKind::None
    };

    let sup_ratio_root = (n / 2..=n)
        .map(|p| d[p])
        .filter(|v| v.is_finite())
        .fold(f64::NEG_INFINITY, f64::max);
    let last_quarter: Vec<f64> = (3 * n / 4..=n).map(|p| d[p]).filter(|v| v.is_finite()).collect();
    let limit_estimate = last_quarter.iter().sum::<f64>() / last_quarter.len() as f64;

    Ok(RelationResult {
        kind,
        sup_ratio_root,
        limit_estimate,
    })
}

/// Does the relation satisfy `preceq` semantics (`triangle` implies it)?
pub fn relation_is_preceq(kind: RelationKind) -> bool {
    matches!(
        kind,
        RelationKind::Preceq | RelationKind::Triangle | RelationKind::Approx
    )
}

/// Log of the seminorm ratio `sup_k b_k / (h^k M_k)` for a derivative-bound
/// sequence `b` against the class weight `M` at scale `h > 0`.
pub fn seminorm_ratio(b: &LogSeq, m: &LogSeq, h: f64) -> Result<f64> {
    if h <= 0.0 {
        return Err(Error::NonPositiveScale(h));
    }
    ensure_shared_truncation(b, m)?;
    let log_h = h.ln();
    Ok((0..=b.n())
        .map(|k| b.log(k) - k as f64 * log_h - m.log(k))
        .fold(f64::NEG_INFINITY, f64::max))
}

/// Membership classification of a derivative-bound sequence `b` in the
/// Roumieu class (some `h` works) and Beurling class (every `h` works)
/// generated by `M`, via the root statistic `(log b_k - log M_k) / k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Membership {
    pub roumieu: Verdict,
    pub beurling: Verdict,
    /// `exp` of the tail-window max of the root statistic: the critical `h`.
    pub h_star: f64,
}

pub fn classify_membership(b: &LogSeq, m: &LogSeq, params: TrendParams) -> Result<Membership> {
    ensure_shared_truncation(b, m)?;
    let n = b.n();
    let mut g = vec![f64::NAN; n + 1];
    for k in 1..=n {
        g[k] = (b.log(k) - m.log(k)) / k as f64;
    }
    let (_, _, m2) = window_maxima(&g).ok_or_else(|| {
        Error::Precondition("membership statistic has fewer than 8 finite entries".into())
    })?;
    let roumieu_trend = bounded_trend_capped(&g, params);
    let beurling_trend = decay_trend(&g, params);
    let roumieu = Verdict {
        at_truncation: true,
        trend: roumieu_trend,
        log_constant: Some(m2),
        witness: None,
    };
    let beurling = Verdict {
        at_truncation: true,
        trend: beurling_trend,
        log_constant: Some(m2),
        witness: None,
    };
    Ok(Membership {
        roumieu,
        beurling,
        h_star: m2.exp(),
    })
}
