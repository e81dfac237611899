//! Laws connecting weight functions to their matrices: the convexity-driven
//! doubling inequality of the associated matrix, row monotonicity and
//! pairwise separation of the convex-weight matrix, and the moderate-growth
//! dichotomy of the matrix built from log^2.

use weightlab_core::matrix::{
    check_matrix_condition, relate_matrices, Flavor, MatrixCondition, RelationFlavor, RowOutcome,
};
use weightlab_core::seqcore::{check_mg, relate, RelationKind};
use weightlab_core::trend::{Trend, TrendParams};
use weightlab_core::weightfn::{
    associated_matrix, phi_matrix, ConvexWeight, OmegaParams, WeightFunction,
};
use weightlab_core::witness::find_mg_violation;

fn tp() -> TrendParams {
    TrendParams::default()
}

fn op() -> OmegaParams {
    OmegaParams::default()
}

fn pow2_grid(lo: i32, hi: i32) -> Vec<f64> {
    (lo..=hi).map(|i| 2.0_f64.powi(i)).collect()
}

#[test]
fn associated_matrix_doubling_inequality_exhaustive() {
    // log Omega^l_{j+k} <= log Omega^{2l}_j + log Omega^{2l}_k whenever 2l
    // stays on the grid: a direct consequence of conjugate convexity.
    let grid = pow2_grid(-2, 3);
    for w in [
        WeightFunction::log_power(2.0, op()).unwrap(),
        WeightFunction::log_power(1.5, op()).unwrap(),
        WeightFunction::gevrey_weight(2.0, op()).unwrap(),
    ] {
        let mx = associated_matrix(&w, &grid, 32, tp(), op()).unwrap();
        let n = mx.n();
        for (i, &l) in grid.iter().enumerate() {
            let Some(i2) = mx.position_of(2.0 * l) else {
                continue;
            };
            for j in 0..=n {
                for k in 0..=(n - j) {
                    assert!(
                        mx.row(i).log(j + k) <= mx.row(i2).log(j) + mx.row(i2).log(k) + 1e-6,
                        "{}: l = {l}, (j, k) = ({j}, {k})",
                        w.name
                    );
                }
            }
        }
    }
}

#[test]
fn matsumoto_dichotomy_for_log_square_matrix() {
    // Every single row of Omega[log^2] fails moderate growth, while the
    // matrix condition holds with witness y = 2l and constant 1.
    let w = WeightFunction::log_power(2.0, op()).unwrap();
    let grid = pow2_grid(-2, 3);
    let mx = associated_matrix(&w, &grid, 64, tp(), op()).unwrap();

    for (i, &l) in grid.iter().enumerate() {
        let verdict = check_mg(mx.row(i), tp());
        assert_eq!(verdict.trend, Trend::Fails, "row l = {l} should fail mg");
    }

    let mv = check_matrix_condition(&mx, MatrixCondition::Mg, Flavor::Roumieu, tp());
    assert!(mv.verdict.holds());
    for (key, outcome) in &mv.per_row {
        let l = key[0];
        if mx.position_of(2.0 * l).is_some() {
            match outcome {
                RowOutcome::Certified { y, log_constant } => {
                    assert_eq!(*y, 2.0 * l, "witness for l = {l}");
                    assert!(*log_constant <= 1e-6, "constant for l = {l}");
                }
                other => panic!("row l = {l}: {other:?}"),
            }
        } else {
            assert!(
                matches!(outcome, RowOutcome::GridExhausted { toward_top: true, .. }),
                "top row should be grid-exhausted, got {outcome:?}"
            );
        }
    }

    // The single-row violation search: against the row itself the statistic
    // j k / (2 (j + k)) climbs past log 2 quickly.
    let hit = find_mg_violation(&mx, 1.0, 2.0, 64, Some(1.0)).unwrap();
    assert!(hit.is_some());
    let (j, k) = hit.unwrap();
    assert!(j + k <= 64);

    // Against the doubled row the convexity bound makes violations
    // impossible; the default instantiation picks y = 2 >= n and finds none.
    let none = find_mg_violation(&mx, 1.0, 2.0, 64, None).unwrap();
    assert_eq!(none, None);
}

#[test]
fn omega_matrix_passes_msc_and_l_conditions() {
    let w = WeightFunction::log_power(2.0, op()).unwrap();
    let grid = pow2_grid(-2, 3);
    let mx = associated_matrix(&w, &grid, 64, tp(), op()).unwrap();
    assert!(weightlab_core::matrix::check_msc(&mx, tp()).holds());
    for flavor in [Flavor::Roumieu, Flavor::Beurling] {
        let mv = check_matrix_condition(&mx, MatrixCondition::L, flavor, tp());
        assert!(mv.verdict.holds(), "{flavor:?}: {:?}", mv.verdict);
    }
}

#[test]
fn phi_matrix_rows_monotone_and_pairwise_separated() {
    let cw = ConvexWeight::t_log_t().unwrap();
    let grid = pow2_grid(-2, 2);
    let mx = phi_matrix(&cw, &grid, 64).unwrap();
    let n = mx.n();
    for i in 0..grid.len() - 1 {
        for p in 0..=n {
            assert!(mx.row(i).log(p) <= mx.row(i + 1).log(p) + 1e-12);
        }
        // Pairwise non-equivalence: consecutive rows relate by triangle.
        let rel = relate(mx.row(i), mx.row(i + 1), tp()).unwrap();
        assert_eq!(rel.kind, RelationKind::Triangle, "rows {i} and {}", i + 1);
    }
}

#[test]
fn phi_matrix_satisfies_strict_and_fdb() {
    let cw = ConvexWeight::t_log_t().unwrap();
    let grid = pow2_grid(-2, 2);
    let mx = phi_matrix(&cw, &grid, 64).unwrap();
    let strict = check_matrix_condition(&mx, MatrixCondition::Strict, Flavor::Roumieu, tp());
    assert!(strict.verdict.holds());
    for flavor in [Flavor::Roumieu, Flavor::Beurling] {
        let fdb = check_matrix_condition(&mx, MatrixCondition::FdB, flavor, tp());
        assert!(fdb.verdict.holds(), "{flavor:?}");
    }
}

#[test]
fn log_square_equivalent_weights_give_equivalent_matrices() {
    // Relating the associated matrix to itself across two different grids:
    // the sampled families certify each other where witnesses exist.
    let w = WeightFunction::log_power(2.0, op()).unwrap();
    let a = associated_matrix(&w, &pow2_grid(-2, 2), 64, tp(), op()).unwrap();
    let b = associated_matrix(&w, &pow2_grid(-3, 3), 64, tp(), op()).unwrap();
    let fwd = relate_matrices(&a, &b, RelationFlavor::Roumieu, tp()).unwrap();
    let bwd = relate_matrices(&b, &a, RelationFlavor::Roumieu, tp()).unwrap();
    assert!(fwd.verdict.holds());
    assert!(bwd.verdict.holds());
}
