//! Constructive proof objects: the characteristic-derivative series, the
//! twelve families of auxiliary sequences with their projective-description
//! block construction, and the search for moderate-growth violations.

use serde::{Deserialize, Serialize};

use crate::fdb::compose_min;
use crate::matrix::{
    check_matrix_condition, Flavor, MatrixCondition, RowOutcome, WeightMatrix,
};
use crate::seqcore::{check_lcset, derive, LogSeq};
use crate::trend::{bounded_trend_capped, decay_trend, Trend, TrendParams, Verdict};
use crate::{log_factorial, Error, Result};

/// The sequence families of the projective descriptions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Family {
    RRoumieu,
    RRoumieuSub,
    RBeurling,
    RBeurlingSub,
    SRoumieu,
    STildeRoumieu,
    STildeRoumieuSub,
    SRoumieuFdB,
    SBeurling,
    STildeBeurling,
    STildeBeurlingSub,
    SBeurlingFdB,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::RRoumieu => "R_roumieu",
            Family::RRoumieuSub => "R_roumieu_sub",
            Family::RBeurling => "R_beurling",
            Family::RBeurlingSub => "R_beurling_sub",
            Family::SRoumieu => "S_roumieu",
            Family::STildeRoumieu => "S_tilde_roumieu",
            Family::STildeRoumieuSub => "S_tilde_roumieu_sub",
            Family::SRoumieuFdB => "S_roumieu_fdb",
            Family::SBeurling => "S_beurling",
            Family::STildeBeurling => "S_tilde_beurling",
            Family::STildeBeurlingSub => "S_tilde_beurling_sub",
            Family::SBeurlingFdB => "S_beurling_fdb",
        }
    }
}

/// Membership verdict for one family, with the quantifier witness where one
/// exists (a `t` for the R-families, a row parameter for the S-families).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilyTag {
    pub family: Family,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness_param: Option<f64>,
}

/// Probe grid for the `t` quantifier in the R-families.
pub fn default_t_grid() -> Vec<f64> {
    (-10..=10).map(|i| 2.0_f64.powi(i)).collect()
}

fn fam_verdict(ok: bool, fail_idx: Option<usize>) -> Verdict {
    Verdict::exact(ok, if ok { None } else { Some(vec![fail_idx.unwrap_or(0)]) })
}

/// Does `r_k t^k -> 0` at this `t`? Decay of `log r_k + k log t`.
fn decays_at(seq: &LogSeq, t: f64, params: TrendParams) -> bool {
    let n = seq.n();
    let log_t = t.ln();
    let stat: Vec<f64> = (1..=n)
        .map(|k| seq.log(k) + k as f64 * log_t)
        .collect();
    decay_trend(&stat, params) == Trend::Holds
}

/// Exhaustive log-subadditivity `r_{j+k} <= r_j r_k` at truncation.
fn is_subadditive(seq: &LogSeq) -> bool {
    let n = seq.n();
    for j in 0..=n {
        for k in 0..=(n - j) {
            if seq.log(j + k) > seq.log(j) + seq.log(k) + 1e-9 {
                return false;
            }
        }
    }
    true
}

/// `exists D: s_{j+k} <= D^{j+k} s_j s_k` via the per-index constant.
fn is_almost_submultiplicative(seq: &LogSeq, params: TrendParams) -> bool {
    let n = seq.n();
    let mut stat = vec![f64::NAN; n + 1];
    for p in 2..=n {
        let mut best = f64::NEG_INFINITY;
        for j in 1..p {
            best = best.max(seq.log(p) - seq.log(j) - seq.log(p - j));
        }
        stat[p] = best / p as f64;
    }
    bounded_trend_capped(&stat, params) == Trend::Holds
}

/// Is `(s_k X^x_k)^{1/k}` bounded for the given row view?
fn row_compatible(s: &LogSeq, row_view: &LogSeq, params: TrendParams) -> bool {
    let n = s.n();
    let stat: Vec<f64> = (1..=n)
        .map(|k| (s.log(k) + row_view.log(k)) / k as f64)
        .collect();
    bounded_trend_capped(&stat, params) == Trend::Holds
}

/// Classify a sequence against the R-families and, when a matrix is given,
/// the S-families. Quantifiers over `t` and rows are realized on fixed
/// grids, so every verdict is grid-relative.
pub fn classify_family(
    seq: &LogSeq,
    mx: Option<&WeightMatrix>,
    params: TrendParams,
) -> Result<Vec<FamilyTag>> {
    let mut tags = Vec::new();
    let t_grid = default_t_grid();

    // R-families: "for each t" vs "for some t" over the probe grid.
    let decaying: Vec<bool> = t_grid.iter().map(|&t| decays_at(seq, t, params)).collect();
    let all_t = decaying.iter().all(|&b| b);
    let some_t = decaying.iter().position(|&b| b);
    let failing_t = decaying.iter().position(|&b| !b);
    let sub = is_subadditive(seq);
    tags.push(FamilyTag {
        family: Family::RRoumieu,
        verdict: fam_verdict(all_t, failing_t),
        witness_param: failing_t.map(|i| t_grid[i]),
    });
    tags.push(FamilyTag {
        family: Family::RRoumieuSub,
        verdict: fam_verdict(all_t && sub, failing_t),
        witness_param: failing_t.map(|i| t_grid[i]),
    });
    // For "some t": larger t is the stronger witness, so report the largest.
    let best_t = decaying.iter().rposition(|&b| b);
    tags.push(FamilyTag {
        family: Family::RBeurling,
        verdict: fam_verdict(some_t.is_some(), None),
        witness_param: best_t.map(|i| t_grid[i]),
    });
    tags.push(FamilyTag {
        family: Family::RBeurlingSub,
        verdict: fam_verdict(some_t.is_some() && sub, None),
        witness_param: best_t.map(|i| t_grid[i]),
    });

    let Some(mx) = mx else {
        return Ok(tags);
    };
    if mx.n() != seq.n() {
        return Err(Error::MismatchedTruncation {
            left: seq.n(),
            right: mx.n(),
        });
    }

    let m_views = mx.m_views();
    let m_ok: Vec<bool> = m_views
        .iter()
        .map(|m| row_compatible(seq, m, params))
        .collect();
    let big_ok: Vec<bool> = mx
        .rows
        .iter()
        .map(|r| row_compatible(seq, r, params))
        .collect();
    let almost_sub = is_almost_submultiplicative(seq, params);

    let all_m = m_ok.iter().all(|&b| b);
    let first_bad_m = m_ok.iter().position(|&b| !b);
    tags.push(FamilyTag {
        family: Family::SRoumieu,
        verdict: fam_verdict(all_m, first_bad_m),
        witness_param: first_bad_m.map(|i| mx.lambda[i]),
    });
    let all_big = big_ok.iter().all(|&b| b);
    let first_bad_big = big_ok.iter().position(|&b| !b);
    tags.push(FamilyTag {
        family: Family::STildeRoumieu,
        verdict: fam_verdict(all_big, first_bad_big),
        witness_param: first_bad_big.map(|i| mx.lambda[i]),
    });
    tags.push(FamilyTag {
        family: Family::STildeRoumieuSub,
        verdict: fam_verdict(all_big && almost_sub, first_bad_big),
        witness_param: first_bad_big.map(|i| mx.lambda[i]),
    });

    // Beurling twins: some row works; report the largest such row, since
    // membership for x passes down to every smaller row.
    let some_m = m_ok.iter().rposition(|&b| b);
    tags.push(FamilyTag {
        family: Family::SBeurling,
        verdict: fam_verdict(some_m.is_some(), None),
        witness_param: some_m.map(|i| mx.lambda[i]),
    });
    let some_big = big_ok.iter().rposition(|&b| b);
    tags.push(FamilyTag {
        family: Family::STildeBeurling,
        verdict: fam_verdict(some_big.is_some(), None),
        witness_param: some_big.map(|i| mx.lambda[i]),
    });
    tags.push(FamilyTag {
        family: Family::STildeBeurlingSub,
        verdict: fam_verdict(some_big.is_some() && almost_sub, None),
        witness_param: some_big.map(|i| mx.lambda[i]),
    });

    // FdB subfamilies: search s_hat over the row reciprocals 1/m^y. This
    // catalog-restricted search can under-approximate membership.
    let mut roum_fdb: Option<f64> = None;
    let mut beur_fdb: Option<f64> = None;
    for (i, m) in m_views.iter().enumerate() {
        let hat = m.recip();
        let hat_all = m_views.iter().all(|v| row_compatible(&hat, v, params));
        let hat_some = m_views.iter().any(|v| row_compatible(&hat, v, params));
        if !hat_all && !hat_some {
            continue;
        }
        let hat_circ = compose_min(&hat).circ;
        let n = seq.n();
        let stat: Vec<f64> = (1..=n)
            .map(|k| (seq.log(k) - hat_circ.log(k)) / k as f64)
            .collect();
        if bounded_trend_capped(&stat, params) == Trend::Holds {
            if hat_all && roum_fdb.is_none() && all_m {
                roum_fdb = Some(mx.lambda[i]);
            }
            if hat_some && beur_fdb.is_none() && some_m.is_some() {
                beur_fdb = Some(mx.lambda[i]);
            }
        }
    }
    tags.push(FamilyTag {
        family: Family::SRoumieuFdB,
        verdict: fam_verdict(roum_fdb.is_some(), None),
        witness_param: roum_fdb,
    });
    tags.push(FamilyTag {
        family: Family::SBeurlingFdB,
        verdict: fam_verdict(beur_fdb.is_some(), None),
        witness_param: beur_fdb,
    });
    Ok(tags)
}

/// Characteristic-derivative series `s_j = sum_k M_k (2 mu_k)^(j-k)`, summed
/// in log domain, truncated once terms fall 40 log-units below the running
/// maximum while decreasing. Requires the quotient sequence to diverge
/// (membership in the log-convex set with diverging roots).
pub fn characteristic_derivatives(
    seq: &LogSeq,
    j_max: usize,
    params: TrendParams,
) -> Result<LogSeq> {
    let n = seq.n();
    if j_max < 8 || j_max > n / 2 {
        return Err(Error::Precondition(format!(
            "j_max must lie in [8, N/2] = [8, {}], got {j_max}",
            n / 2
        )));
    }
    if check_lcset(seq, params).trend == Trend::Fails {
        return Err(Error::Precondition(format!(
            "`{}` is not in the log-convex diverging-roots set",
            seq.label
        )));
    }
    let (_, mu) = derive(seq);
    let ln2 = std::f64::consts::LN_2;
    let mut out = Vec::with_capacity(j_max + 1);
    for j in 0..=j_max {
        let mut terms: Vec<f64> = Vec::with_capacity(n + 1);
        let mut max_term = f64::NEG_INFINITY;
        let mut prev = f64::INFINITY;
        let mut decayed = false;
        for k in 0..=n {
            let term = seq.log(k) + (j as f64 - k as f64) * (ln2 + mu.log(k));
            terms.push(term);
            max_term = max_term.max(term);
            if k > j && term < max_term - 40.0 && term < prev {
                decayed = true;
                break;
            }
            prev = term;
        }
        if !decayed {
            return Err(Error::DivergentTail { j, n });
        }
        let sum: f64 = terms.iter().map(|t| (t - max_term).exp()).sum();
        out.push(max_term + sum.ln());
    }
    let result = LogSeq::new(format!("chderiv({})", seq.label), out)?;
    // Domination by the k = j term is structural; keep it as a hard check.
    for j in 0..=j_max {
        debug_assert!(result.log(j) >= seq.log(j) - 1e-9);
    }
    Ok(result)
}

/// Search the lexicographically smallest `(j, k)` with `j + k <= j_max` and
/// `(log M^x_{j+k} - log M^y_j - log M^y_k) / (j+k) >= log n`.
///
/// By default `y` is the smallest grid row `>= n` (the instantiation
/// `C = y = n` of the negated matrix moderate-growth condition); pass
/// `y_override` to probe a specific row, e.g. `y = x` to exhibit the failure
/// of single-row moderate growth.
pub fn find_mg_violation(
    mx: &WeightMatrix,
    x: f64,
    n_constant: f64,
    j_max: usize,
    y_override: Option<f64>,
) -> Result<Option<(usize, usize)>> {
    if n_constant < 1.0 {
        return Err(Error::Precondition(format!(
            "violation constant must be >= 1, got {n_constant}"
        )));
    }
    let xi = mx
        .position_of(x)
        .ok_or_else(|| Error::Precondition(format!("x = {x} is not in the parameter grid")))?;
    let yi = match y_override {
        Some(y) => mx
            .position_of(y)
            .ok_or_else(|| Error::Precondition(format!("y = {y} is not in the parameter grid")))?,
        // Smallest grid row >= n, clamped to the top row when none reaches n.
        None => mx
            .lambda
            .iter()
            .position(|&v| v >= n_constant)
            .unwrap_or(mx.lambda.len() - 1),
    };
    let j_max = j_max.min(mx.n());
    let (xrow, yrow) = (&mx.rows[xi], &mx.rows[yi]);
    let log_n = n_constant.ln();
    for j in 0..=j_max {
        for k in 0..=(j_max - j) {
            if j + k == 0 {
                continue;
            }
            let stat = (xrow.log(j + k) - yrow.log(j) - yrow.log(k)) / (j + k) as f64;
            if stat >= log_n {
                return Ok(Some((j, k)));
            }
        }
    }
    Ok(None)
}

/// Why the block construction stopped.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BlockTermination {
    /// The next block would start past the truncation.
    TruncationReached,
    /// The grid has no row left for the next block.
    RowsExhausted,
    /// A block could not reach the unit threshold within the truncation.
    InsufficientDivergence { block: usize },
}

/// The projective-description block witness: breakpoints `k_0 < k_1 < ...`,
/// the rate sequence `r_k = (1/n^2)^k` on block `n`, the row-reciprocal
/// sequence `s_k = 1/m^{gamma(n)}_k`, and optionally `s_hat` from the
/// Faa-di-Bruno witness map.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockWitness {
    /// `k_0 = 1` followed by each block's exclusive end.
    pub breakpoints: Vec<usize>,
    /// Row parameter used on each block.
    pub gamma: Vec<f64>,
    pub r: LogSeq,
    pub s: LogSeq,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub s_hat: Option<LogSeq>,
    pub blocks_completed: usize,
    pub termination: BlockTermination,
}

/// Build the block witness for the bound sequence `b` against the matrix.
/// Block `n` uses the grid row at position `n + alpha_offset - 1` (0-based)
/// and must accumulate `sum_k |b_k / M^gamma_k| (1/n^2)^k >= 1`.
pub fn build_block_witness(
    mx: &WeightMatrix,
    b: &LogSeq,
    alpha_offset: usize,
    params: TrendParams,
) -> Result<BlockWitness> {
    if b.n() != mx.n() {
        return Err(Error::MismatchedTruncation {
            left: b.n(),
            right: mx.n(),
        });
    }
    let n = mx.n();
    let m_views = mx.m_views();

    let mut breakpoints = vec![1usize];
    let mut gamma = Vec::new();
    let mut log_r = vec![0.0_f64; n + 1];
    let mut log_s = vec![0.0_f64; n + 1];
    let mut gamma_positions: Vec<usize> = Vec::new();
    let mut blocks_completed = 0usize;
    let termination;

    let mut cursor = 1usize;
    let mut block = 1usize;
    loop {
        if cursor > n {
            termination = BlockTermination::TruncationReached;
            break;
        }
        let row_pos = block + alpha_offset - 1;
        if row_pos >= mx.rows.len() {
            if blocks_completed == 0 {
                return Err(Error::Precondition(format!(
                    "matrix has only {} rows, not enough for alpha_offset = {alpha_offset}",
                    mx.rows.len()
                )));
            }
            // Extend the tail with the last completed block's rate and row,
            // since no further block can be opened on this grid.
            let last_rate = -2.0 * (blocks_completed as f64).ln();
            let last_row = *gamma_positions.last().unwrap();
            for k in cursor..=n {
                log_r[k] = k as f64 * last_rate;
                log_s[k] = -m_views[last_row].log(k);
            }
            termination = BlockTermination::RowsExhausted;
            break;
        }
        let row = &mx.rows[row_pos];
        let log_rate = -2.0 * (block as f64).ln();
        let mut acc = 0.0_f64;
        let mut end: Option<usize> = None;
        for k in cursor..=n {
            // The running block also stamps r and s, so the sequences stay
            // defined over the whole truncation even if it never closes.
            log_r[k] = k as f64 * log_rate;
            log_s[k] = -m_views[row_pos].log(k);
            let log_term = b.log(k) - row.log(k) + k as f64 * log_rate;
            acc += log_term.min(700.0).exp();
            if acc >= 1.0 {
                end = Some(k + 1);
                break;
            }
        }
        match end {
            None => {
                termination = BlockTermination::InsufficientDivergence { block };
                break;
            }
            Some(end) => {
                breakpoints.push(end);
                gamma.push(mx.lambda[row_pos]);
                gamma_positions.push(row_pos);
                blocks_completed += 1;
                cursor = end;
                block += 1;
            }
        }
    }

    let r = LogSeq::new(format!("r[{}]", b.label), log_r)?;
    let s = LogSeq::new(format!("s[{}]", b.label), log_s)?;

    // s_hat needs the Faa-di-Bruno witness map alpha(x) over the grid; beta is
    // its maximal left inverse and is only defined where a witness exists.
    let fdb = check_matrix_condition(mx, MatrixCondition::FdB, Flavor::Roumieu, params);
    let s_hat = if fdb.verdict.holds() {
        let alpha_map: Vec<Option<usize>> = mx
            .lambda
            .iter()
            .map(|&x| match fdb.outcome_for(&[x]) {
                Some(RowOutcome::Certified { y, .. }) => mx.position_of(*y),
                _ => None,
            })
            .collect();
        let beta = |y_pos: usize| -> Option<usize> {
            (0..mx.lambda.len())
                .filter(|&xp| alpha_map[xp].map(|ap| ap <= y_pos).unwrap_or(false))
                .max()
        };
        let mut log_s_hat = vec![0.0_f64; n + 1];
        let mut complete = true;
        let mut last_beta = None;
        for (bi, &row_pos) in gamma_positions.iter().enumerate() {
            match beta(row_pos) {
                Some(bp) => {
                    for k in breakpoints[bi]..breakpoints[bi + 1] {
                        log_s_hat[k] = -m_views[bp].log(k);
                    }
                    last_beta = Some(bp);
                }
                None => {
                    complete = false;
                    break;
                }
            }
        }
        if complete {
            if let Some(bp) = last_beta {
                for k in *breakpoints.last().unwrap()..=n {
                    log_s_hat[k] = -m_views[bp].log(k);
                }
            }
            LogSeq::new(format!("s_hat[{}]", b.label), log_s_hat).ok()
        } else {
            None
        }
    } else {
        None
    };

    Ok(BlockWitness {
        breakpoints,
        gamma,
        r,
        s,
        s_hat,
        blocks_completed,
        termination,
    })
}

impl BlockWitness {
    /// Re-evaluate the block inequality independently: every completed block
    /// must satisfy `sum_k |b_k| r_k s_k / k! >= 1`.
    pub fn verify_blocks(&self, b: &LogSeq) -> Result<()> {
        for (i, w) in self.breakpoints.windows(2).enumerate() {
            let (lo, hi) = (w[0], w[1]);
            let mut acc = 0.0_f64;
            for k in lo..hi {
                let log_term = b.log(k) + self.r.log(k) + self.s.log(k) - log_factorial(k);
                acc += log_term.min(700.0).exp();
            }
            if acc < 1.0 - 1e-9 {
                return Err(Error::Precondition(format!(
                    "block {} sums to {acc} < 1",
                    i + 1
                )));
            }
        }
        Ok(())
    }
}
