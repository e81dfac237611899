//! Cross-module invariants and property tests over the standing catalog.

use proptest::prelude::*;

use weightlab_core::catalog;
use weightlab_core::fdb::{check_fdb, compose_max};
use weightlab_core::matrix::{
    check_matrix_condition, make_constant, make_gevrey, Flavor, MatrixCondition, RowOutcome,
};
use weightlab_core::seqcore::{
    check_dc, check_lc, check_mg, classify_membership, derive, relate, relation_is_preceq,
    ConvexityView, LogSeq, RelationKind,
};
use weightlab_core::trend::{Trend, TrendParams};

fn params() -> TrendParams {
    TrendParams::default()
}

/// Supermultiplicativity holds exactly for normalized log-convex sequences.
#[test]
fn log_convex_normalized_is_supermultiplicative() {
    for name in ["factorial", "gevrey:1", "gevrey:2", "constant_one", "geometric:2"] {
        let seq = catalog::by_name(name, 48).unwrap();
        assert!(seq.log(0).abs() < 1e-12, "{name} normalized");
        assert!(check_lc(&seq, ConvexityView::M).holds(), "{name} lc");
        let n = seq.n();
        for j in 0..=n {
            for k in 0..=(n - j) {
                assert!(
                    seq.log(j) + seq.log(k) <= seq.log(j + k) + 1e-9,
                    "{name}: M_{j} M_{k} > M_{}",
                    j + k
                );
            }
        }
    }
}

#[test]
fn relate_is_reflexive_and_transitive_on_catalog() {
    let n = 64;
    let members = catalog::standard(n);
    for seq in &members {
        let rel = relate(seq, seq, params()).unwrap();
        assert_eq!(rel.kind, RelationKind::Approx, "{}", seq.label);
    }
    // Transitivity with additive tail constants on all ordered triples.
    for a in &members {
        for b in &members {
            for c in &members {
                let ab = relate(a, b, params()).unwrap();
                let bc = relate(b, c, params()).unwrap();
                if relation_is_preceq(ab.kind) && relation_is_preceq(bc.kind) {
                    let ac = relate(a, c, params()).unwrap();
                    assert!(
                        relation_is_preceq(ac.kind),
                        "{} -> {} -> {}",
                        a.label,
                        b.label,
                        c.label
                    );
                    assert!(
                        ac.sup_ratio_root <= ab.sup_ratio_root + bc.sup_ratio_root + 1e-9,
                        "tail constant not subadditive on {} -> {} -> {}",
                        a.label,
                        b.label,
                        c.label
                    );
                }
            }
        }
    }
}

#[test]
fn triangle_implies_preceq_on_catalog_pairs() {
    let members = catalog::standard(64);
    for a in &members {
        for b in &members {
            let rel = relate(a, b, params()).unwrap();
            if rel.kind == RelationKind::Triangle {
                assert!(relation_is_preceq(rel.kind));
            }
        }
    }
}

#[test]
fn slc_implies_lc_on_catalog() {
    for seq in catalog::standard(64) {
        if check_lc(&seq, ConvexityView::SmallM).holds() {
            assert!(
                check_lc(&seq, ConvexityView::M).holds(),
                "slc holds but lc fails on {}",
                seq.label
            );
        }
    }
}

#[test]
fn mg_implies_dc_on_catalog() {
    for seq in catalog::standard(64) {
        if check_mg(&seq, params()).holds() {
            assert!(
                check_dc(&seq, params()).holds(),
                "mg holds but dc fails on {}",
                seq.label
            );
        }
    }
}

#[test]
fn fdb_constant_certifies_at_truncation() {
    for name in ["factorial", "gevrey:1", "gevrey:2"] {
        let seq = catalog::by_name(name, 48).unwrap();
        let verdict = check_fdb(&seq, params());
        let log_d = verdict.log_constant.unwrap();
        let (m, _) = derive(&seq);
        let circ = compose_max(&m).circ;
        for k in 1..=seq.n() {
            assert!(
                circ.log(k) <= m.log(k) + k as f64 * log_d + 1e-9,
                "{name} at k = {k}"
            );
        }
    }
}

#[test]
fn compose_monotone_in_base() {
    // m <= m' entrywise implies circ <= circ' entrywise.
    let (m, _) = derive(&catalog::by_name("gevrey:1", 24).unwrap());
    let (m_big, _) = derive(&catalog::by_name("gevrey:2", 24).unwrap());
    let c = compose_max(&m).circ;
    let c_big = compose_max(&m_big).circ;
    for k in 0..=24 {
        assert!(m.log(k) <= m_big.log(k) + 1e-12);
        assert!(c.log(k) <= c_big.log(k) + 1e-9);
    }
}

#[test]
fn compose_scale_covariance_bounds() {
    // Scaling m_k by c^k scales each composition term by c^(j+k) with
    // 1 <= j <= k, so circ moves by a factor between c^(k+1) and c^(2k).
    let (m, _) = derive(&catalog::by_name("gevrey:1", 15).unwrap());
    for &log_c in &[2.0_f64.ln(), 3.0_f64.ln()] {
        let scaled = m.scale_geometric(log_c);
        let base = compose_max(&m).circ;
        let moved = compose_max(&scaled).circ;
        for k in 1..=15usize {
            let delta = moved.log(k) - base.log(k);
            assert!(delta >= (k + 1) as f64 * log_c - 1e-9, "k = {k}");
            assert!(delta <= (2 * k) as f64 * log_c + 1e-9, "k = {k}");
        }
    }
}

#[test]
fn constant_matrix_convention_violates_strict() {
    // A matrix whose rows are pairwise equivalent is "constant" and fails
    // strictness in both flavors.
    let mx = make_constant(catalog::by_name("gevrey:1", 64).unwrap()).unwrap();
    for flavor in [Flavor::Roumieu, Flavor::Beurling] {
        let mv = check_matrix_condition(&mx, MatrixCondition::Strict, flavor, params());
        assert_eq!(mv.verdict.trend, Trend::Fails);
        assert!(mv
            .per_row
            .iter()
            .all(|(_, o)| matches!(o, RowOutcome::Failed { .. })));
    }
}

#[test]
fn matrix_mg_implies_dc_on_gevrey_grid() {
    let grid: Vec<f64> = (-2..=3).map(|i| 2.0_f64.powi(i)).collect();
    let mx = make_gevrey(&grid, 64).unwrap();
    for flavor in [Flavor::Roumieu, Flavor::Beurling] {
        let mg = check_matrix_condition(&mx, MatrixCondition::Mg, flavor, params());
        let dc = check_matrix_condition(&mx, MatrixCondition::Dc, flavor, params());
        if mg.verdict.holds() {
            assert!(dc.verdict.holds(), "{flavor:?}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// Geometric rescaling must not change the Roumieu membership verdict,
    /// and must scale the critical h by exactly c.
    #[test]
    fn membership_rescale_invariance(log_c in -2.0f64..2.0) {
        let m = catalog::by_name("gevrey:1", 64).unwrap();
        let b = catalog::by_name("factorial", 64).unwrap();
        let base = classify_membership(&b, &m, params()).unwrap();
        let scaled = classify_membership(&b.scale_geometric(log_c), &m, params()).unwrap();
        prop_assert_eq!(base.roumieu.trend, scaled.roumieu.trend);
        let expected = base.h_star * log_c.exp();
        prop_assert!((scaled.h_star - expected).abs() <= 1e-9 * expected.max(1e-9));
    }

    /// relate() must be invariant under swapping: kind(A, B) preceq iff the
    /// reversed root statistic is bounded the other way for approx pairs.
    #[test]
    fn approx_is_symmetric(idx_a in 0usize..6, idx_b in 0usize..6) {
        let members = catalog::standard(64);
        let a = &members[idx_a];
        let b = &members[idx_b];
        let fwd = relate(a, b, params()).unwrap();
        let bwd = relate(b, a, params()).unwrap();
        if fwd.kind == RelationKind::Approx {
            prop_assert_eq!(bwd.kind, RelationKind::Approx);
        }
    }

    /// Seminorm ratio shifts exactly under geometric rescaling of h.
    #[test]
    fn seminorm_ratio_scale_shift(extra in 0.1f64..4.0) {
        use weightlab_core::seqcore::seminorm_ratio;
        let b = catalog::by_name("gevrey:1", 32).unwrap();
        let m = catalog::by_name("gevrey:2", 32).unwrap();
        let r1 = seminorm_ratio(&b, &m, 1.0).unwrap();
        let r2 = seminorm_ratio(&b, &m, extra).unwrap();
        // sup_k (b_k / (h^k M_k)): larger h can only decrease the ratio, and
        // the drop is at most N log h for h > 1.
        if extra >= 1.0 {
            prop_assert!(r2 <= r1 + 1e-9);
            prop_assert!(r2 >= r1 - 32.0 * extra.ln() - 1e-9);
        } else {
            prop_assert!(r2 >= r1 - 1e-9);
        }
    }

    /// Composition DP equals brute-force enumeration on random log-convex
    /// bases (independent oracle, partitions of k <= 12).
    #[test]
    fn compose_matches_enumeration_on_random_bases(seed in 0.02f64..1.5) {
        let n = 12usize;
        let m = LogSeq::from_fn("random", n, |k| {
            // log-convex ramp with curvature controlled by the seed
            seed * (k * k) as f64 / 8.0
        }).unwrap();
        let composed = compose_max(&m);

        fn partitions(k: usize, cap: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
            if k == 0 {
                out.push(cur.clone());
                return;
            }
            for part in (1..=cap.min(k)).rev() {
                cur.push(part);
                partitions(k - part, part, cur, out);
                cur.pop();
            }
        }
        for k in 1..=n {
            let mut all = Vec::new();
            partitions(k, k, &mut Vec::new(), &mut all);
            let expected = all
                .iter()
                .map(|parts| m.log(parts.len()) + parts.iter().map(|&a| m.log(a)).sum::<f64>())
                .fold(f64::NEG_INFINITY, f64::max);
            prop_assert!((composed.circ.log(k) - expected).abs() < 1e-9);
        }
    }
}
