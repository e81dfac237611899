//! Composed sequences over integer compositions and the predicates built on
//! them: the max form `m°_k = max { m_j m_{a_1} ... m_{a_j} : sum a_i = k }`,
//! its min twin `(s_o)_k`, the Faa-di-Bruno inequality `m°_k <= D^k m_k` and
//! the root-comparability condition on `(m_k)^{1/k}`.
//!
//! The composition optimum is computed by iterated max-plus (min-plus)
//! convolution in O(N^3) total, with backtracked witnesses. Because the
//! product is symmetric, compositions collapse to partitions; ties are
//! broken toward the smallest outer index `j` and the smallest part.

use serde::{Deserialize, Serialize};

use crate::seqcore::{derive, LogSeq};
use crate::trend::{bounded_trend, TrendParams, Verdict};

/// Witness partitions are stored only up to this index to bound memory.
pub const WITNESS_CAP: usize = 32;

/// One optimal composition `(j; a_1..a_j)`, parts sorted ascending.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompositionWitness {
    pub outer: usize,
    pub parts: Vec<usize>,
}

/// A base sequence together with its composed optimum and witnesses.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComposedSeq {
    pub base: LogSeq,
    pub circ: LogSeq,
    pub witnesses: Vec<Option<CompositionWitness>>,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Direction {
    Max,
    Min,
}

fn compose(m: &LogSeq, direction: Direction) -> ComposedSeq {
    let n = m.n();
    let worst = match direction {
        Direction::Max => f64::NEG_INFINITY,
        Direction::Min => f64::INFINITY,
    };
    let better = |a: f64, b: f64| match direction {
        Direction::Max => a > b,
        Direction::Min => a < b,
    };

    // layer[j][k]: optimum of sum(log m_{a_i}) over compositions of k into
    // j positive parts. Row 0 is unused.
    let mut layer = vec![vec![worst; n + 1]; n + 1];
    let mut choice = vec![vec![0u32; n + 1]; n + 1];
    for k in 1..=n {
        layer[1][k] = m.log(k);
        choice[1][k] = k as u32;
    }
    for j in 2..=n {
        for k in j..=n {
            let mut best = worst;
            let mut best_i = 0u32;
            for i in 1..=(k - j + 1) {
                let v = layer[j - 1][k - i] + m.log(i);
                if best_i == 0 || better(v, best) {
                    best = v;
                    best_i = i as u32;
                }
            }
            layer[j][k] = best;
            choice[j][k] = best_i;
        }
    }

    let mut circ_vals = vec![0.0; n + 1];
    let mut best_outer = vec![0usize; n + 1];
    for k in 1..=n {
        let mut best = worst;
        let mut best_j = 0usize;
        for j in 1..=k {
            let v = m.log(j) + layer[j][k];
            if best_j == 0 || better(v, best) {
                best = v;
                best_j = j;
            }
        }
        circ_vals[k] = best;
        best_outer[k] = best_j;
    }

    let mut witnesses: Vec<Option<CompositionWitness>> = vec![None; n + 1];
    for k in 1..=n.min(WITNESS_CAP) {
        let j = best_outer[k];
        let mut parts = Vec::with_capacity(j);
        let (mut jj, mut kk) = (j, k);
        while jj >= 1 {
            let part = choice[jj][kk] as usize;
            parts.push(part);
            kk -= part;
            jj -= 1;
        }
        parts.sort_unstable();
        witnesses[k] = Some(CompositionWitness { outer: j, parts });
    }

    let tag = match direction {
        Direction::Max => "circ",
        Direction::Min => "comin",
    };
    ComposedSeq {
        base: m.clone(),
        circ: LogSeq {
            label: format!("{tag}({})", m.label),
            log_values: circ_vals,
        },
        witnesses,
    }
}

/// Max form `m°` with `m°_0 := 1` and backtracked argmax partitions.
pub fn compose_max(m: &LogSeq) -> ComposedSeq {
    compose(m, Direction::Max)
}

/// Min form `(s_o)` with `(s_o)_0 := 1` and argmin partitions.
pub fn compose_min(s: &LogSeq) -> ComposedSeq {
    compose(s, Direction::Min)
}

/// Faa-di-Bruno inequality `m°_k <= D^k m_k` on the reduced view of `seq`.
pub fn check_fdb(seq: &LogSeq, params: TrendParams) -> Verdict {
    let (m, _) = derive(seq);
    check_fdb_on_m(&m, params)
}

/// Same check when the caller already holds the `m`-view.
pub fn check_fdb_on_m(m: &LogSeq, params: TrendParams) -> Verdict {
    let composed = compose_max(m);
    let n = m.n();
    let mut per_index = vec![f64::NAN; n + 1];
    for k in 1..=n {
        per_index[k] = (composed.circ.log(k) - m.log(k)) / k as f64;
    }
    let log_d = per_index
        .iter()
        .copied()
        .filter(|v| v.is_finite())
        .fold(f64::NEG_INFINITY, f64::max)
        .max(0.0);
    Verdict {
        at_truncation: true,
        trend: bounded_trend(&per_index, params),
        log_constant: Some(log_d),
        witness: None,
    }
}

/// Root comparability `(m_j)^{1/j} <= C (m_k)^{1/k}` for `1 <= j <= k`:
/// the per-index constant is the gap between the running max of the root
/// sequence and its current value.
pub fn check_rai(seq: &LogSeq, params: TrendParams) -> Verdict {
    let (m, _) = derive(seq);
    let n = m.n();
    let mut per_index = vec![f64::NAN; n + 1];
    let mut running_max = f64::NEG_INFINITY;
    for k in 1..=n {
        let root = m.log(k) / k as f64;
        running_max = running_max.max(root);
        per_index[k] = running_max - root;
    }
    let log_c = per_index
        .iter()
        .copied()
        .filter(|v| v.is_finite())
        .fold(f64::NEG_INFINITY, f64::max)
        .max(0.0);
    Verdict {
        at_truncation: true,
        trend: bounded_trend(&per_index, params),
        log_constant: Some(log_c),
        witness: None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::trend::Trend;

    fn params() -> TrendParams {
        TrendParams::default()
    }

    /// Exhaustive composition optimum over all partitions of `k`, the
    /// independent oracle for the DP.
    fn brute_force(m: &LogSeq, k: usize, max: bool) -> f64 {
        fn partitions(k: usize, cap: usize, current: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
            if k == 0 {
                out.push(current.clone());
                return;
            }
            for part in (1..=cap.min(k)).rev() {
                current.push(part);
                partitions(k - part, part, current, out);
                current.pop();
            }
        }
        let mut all = Vec::new();
        partitions(k, k, &mut Vec::new(), &mut all);
        let vals = all.into_iter().map(|parts| {
            let j = parts.len();
            m.log(j) + parts.iter().map(|&a| m.log(a)).sum::<f64>()
        });
        if max {
            vals.fold(f64::NEG_INFINITY, f64::max)
        } else {
            vals.fold(f64::INFINITY, f64::min)
        }
    }

    #[test]
    fn compose_of_unit_sequence_is_unit() {
        let m = catalog::by_name("constant_one", 16).unwrap();
        let composed = compose_max(&m);
        for k in 0..=16 {
            assert_eq!(composed.circ.log(k), 0.0);
        }
        let composed = compose_min(&m);
        for k in 0..=16 {
            assert_eq!(composed.circ.log(k), 0.0);
        }
    }

    #[test]
    fn dp_matches_brute_force_on_factorial_m_view() {
        // M = k!^2 so m = k!.
        let (m, _) = derive(&catalog::by_name("gevrey:1", 15).unwrap());
        let composed = compose_max(&m);
        for k in 1..=15 {
            let expected = brute_force(&m, k, true);
            assert!(
                (composed.circ.log(k) - expected).abs() < 1e-12 * expected.abs().max(1.0),
                "k = {k}"
            );
        }
    }

    #[test]
    fn dp_min_matches_brute_force_on_reciprocal_factorial() {
        let s = catalog::by_name("recip:factorial", 15).unwrap();
        let composed = compose_min(&s);
        for k in 1..=15 {
            let expected = brute_force(&s, k, false);
            assert!((composed.circ.log(k) - expected).abs() < 1e-12 * expected.abs().max(1.0));
        }
    }

    #[test]
    fn spike_sequence_selects_all_ones_partition() {
        // m_1 = 4, m_k = 1 otherwise: the optimum is 4^k via j = k parts of 1.
        let vals: Vec<f64> = (0..=10)
            .map(|k| if k == 1 { 4.0_f64.ln() } else { 0.0 })
            .collect();
        let m = LogSeq::new("spike", vals).unwrap();
        let composed = compose_max(&m);
        for k in 2..=10 {
            assert!(
                (composed.circ.log(k) - k as f64 * 4.0_f64.ln()).abs() < 1e-12,
                "k = {k}"
            );
            let w = composed.witnesses[k].as_ref().unwrap();
            assert_eq!(w.outer, k);
            assert!(w.parts.iter().all(|&p| p == 1));
        }
        // Min twin: s_1 = 1/4 spike gives (s_o)_k = (1/4)^k the same way.
        let recip = m.recip();
        let composed = compose_min(&recip);
        for k in 2..=10 {
            assert!((composed.circ.log(k) + k as f64 * 4.0_f64.ln()).abs() < 1e-12);
        }
    }

    #[test]
    fn witnesses_are_valid_partitions_achieving_the_value() {
        let (m, _) = derive(&catalog::by_name("gevrey:2", 24).unwrap());
        let composed = compose_max(&m);
        for k in 1..=24 {
            let w = composed.witnesses[k].as_ref().expect("below cap");
            assert_eq!(w.parts.len(), w.outer);
            assert_eq!(w.parts.iter().sum::<usize>(), k);
            assert!(w.parts.iter().all(|&p| p >= 1));
            let value = m.log(w.outer) + w.parts.iter().map(|&a| m.log(a)).sum::<f64>();
            assert!((value - composed.circ.log(k)).abs() < 1e-9);
        }
    }

    #[test]
    fn witness_cap_is_respected() {
        let (m, _) = derive(&catalog::by_name("gevrey:1", 40).unwrap());
        let composed = compose_max(&m);
        assert!(composed.witnesses[WITNESS_CAP].is_some());
        assert!(composed.witnesses[WITNESS_CAP + 1].is_none());
    }

    #[test]
    fn min_of_reciprocal_is_negated_max() {
        let (m, _) = derive(&catalog::by_name("gevrey:1", 20).unwrap());
        let max_side = compose_max(&m);
        let min_side = compose_min(&m.recip());
        for k in 0..=20 {
            assert!((min_side.circ.log(k) + max_side.circ.log(k)).abs() < 1e-9);
        }
    }

    #[test]
    fn lower_bound_term_j_equals_one() {
        let (m, _) = derive(&catalog::by_name("exp_quadratic", 20).unwrap());
        let composed = compose_max(&m);
        for k in 1..=20 {
            assert!(composed.circ.log(k) >= m.log(1) + m.log(k) - 1e-12);
        }
    }

    #[test]
    fn fdb_factorial_holds_with_unit_constant() {
        let seq = catalog::by_name("factorial", 32).unwrap();
        let verdict = check_fdb(&seq, params());
        assert!(verdict.holds());
        assert!(verdict.constant().unwrap() <= 1.0 + 1e-12);
    }

    #[test]
    fn fdb_gevrey_trend_holds() {
        let seq = catalog::by_name("gevrey:1", 64).unwrap();
        let verdict = check_fdb(&seq, params());
        assert_eq!(verdict.trend, Trend::Holds);
    }

    #[test]
    fn fdb_alternating_m_fails() {
        // m alternating between 1 and spikes whose amplitude grows with k:
        // the composed max stacks the spikes while m itself keeps returning
        // to 1, so the per-index constant climbs without bound.
        let vals: Vec<f64> = (0..=64)
            .map(|k| if k % 2 == 1 { (k * k) as f64 } else { 0.0 })
            .collect();
        let m = LogSeq::new("alternating", vals).unwrap();
        let verdict = check_fdb_on_m(&m, params());
        assert_eq!(verdict.trend, Trend::Fails);
    }

    #[test]
    fn rai_examples() {
        // m = 1: C = 1 trivially.
        let flat = catalog::by_name("factorial", 64).unwrap();
        let verdict = check_rai(&flat, params());
        assert!(verdict.holds());
        assert!(verdict.constant().unwrap() <= 1.0 + 1e-12);

        // m = k! increasing roots: C = 1.
        let gev = catalog::by_name("gevrey:1", 64).unwrap();
        let verdict = check_rai(&gev, params());
        assert!(verdict.holds());
        assert!(verdict.constant().unwrap() <= 1.0 + 1e-12);

        // m_k = exp(k (-1)^k): root gaps scale with the amplitude.
        let vals: Vec<f64> = (0..=64)
            .map(|k| {
                let k = k as f64;
                crate::log_factorial(k as usize) + k * if (k as usize) % 2 == 0 { k } else { -k }
            })
            .collect();
        let osc = LogSeq::new("oscillating", vals).unwrap();
        let verdict = check_rai(&osc, params());
        assert_eq!(verdict.trend, Trend::Fails);
    }
}
