use proptest::prelude::*;

use tchebi::approx::{ParametricFamily, ALPHA_MAX};
use tchebi::{
    orthogonality_check, parametric_matrix, scaling_diagonal, BlockTransform, InversePolicy,
    ScaledApproximation, SquareMatrix,
};

fn inverse_residual(a: &ScaledApproximation) -> f64 {
    let g = a.inverse_matrix();
    let r = g.mul(a.dense().matrix()).unwrap();
    r.sub(&SquareMatrix::identity(a.size())).unwrap().max_abs()
}

#[test]
fn scaling_diagonals() {
    let s8 = scaling_diagonal(&parametric_matrix(8, 2.0).unwrap()).unwrap();
    let want8 = [8.0, 12.0, 12.0, 20.0, 12.0, 14.0, 12.0, 10.0].map(|e: f64| 1.0 / e.sqrt());
    for (got, want) in s8.iter().zip(want8) {
        assert!((got - want).abs() < 1e-15);
    }
    let s4 = scaling_diagonal(&parametric_matrix(4, 2.0).unwrap()).unwrap();
    let want4 = [0.5, 1.0 / 10f64.sqrt(), 0.5, 1.0 / 10f64.sqrt()];
    for (got, want) in s4.iter().zip(want4) {
        assert!((got - want).abs() < 1e-15);
    }
}

#[test]
fn four_point_dense_form_is_orthogonal() {
    let a = ScaledApproximation::optimal(4).unwrap();
    let d = a.dense();
    let gram = d.matrix().mul(&d.matrix().transpose()).unwrap();
    assert!(gram.sub(&SquareMatrix::identity(4)).unwrap().inf_norm() < 1e-12);
}

#[test]
fn raw_and_reduced_forms_share_a_scaled_matrix() {
    for size in [4, 8] {
        let fam = ParametricFamily::new(size).unwrap();
        let raw = ScaledApproximation::new(fam.rounded(2.0).unwrap()).unwrap();
        let reduced = ScaledApproximation::new(fam.at(2.0).unwrap()).unwrap();
        let diff = raw.dense().matrix().sub(reduced.dense().matrix()).unwrap();
        assert!(diff.max_abs() < 1e-15);
    }
}

#[test]
fn transpose_beats_the_diagonal_correction() {
    let transpose = ScaledApproximation::optimal(8).unwrap();
    let corrected = transpose
        .clone()
        .with_inverse_policy(InversePolicy::DiagonalCorrection)
        .unwrap();
    let t = inverse_residual(&transpose);
    let c = inverse_residual(&corrected);
    assert!((t - 41.0 / 280.0).abs() < 1e-12, "{t}");
    assert!((c - 0.29418).abs() < 1e-5, "{c}");
    assert!(t < c);
}

#[test]
fn diagonal_correction_round_trip_uses_its_matrix() {
    let a = ScaledApproximation::optimal(8)
        .unwrap()
        .with_inverse_policy(InversePolicy::DiagonalCorrection)
        .unwrap();
    let b = SquareMatrix::from_fn(8, |r, c| (r + 2 * c) as f64);
    let x = a.forward_2d(&b).unwrap();
    let g = a.inverse_matrix();
    let want = g.mul(&x).unwrap().mul(&g.transpose()).unwrap();
    assert!(a.inverse_2d(&x).unwrap().sub(&want).unwrap().max_abs() < 1e-9);
}

proptest! {
    #[test]
    fn entries_stay_in_codomain(alpha in 1e-3f64..ALPHA_MAX, size in prop::sample::select(vec![4usize, 8])) {
        let raw = ParametricFamily::new(size).unwrap().rounded(alpha).unwrap();
        for r in 0..size {
            prop_assert!(raw.row(r).iter().all(|v| v.abs() <= 2));
        }
    }

    #[test]
    fn scaled_rows_are_unit_norm(alpha in 0.6f64..ALPHA_MAX) {
        let m = parametric_matrix(8, alpha).unwrap();
        prop_assume!(!m.is_degenerate());
        let a = ScaledApproximation::new(m).unwrap();
        let d = a.dense();
        for k in 0..8 {
            let norm: f64 = d.matrix().row(k).iter().map(|v| v * v).sum();
            prop_assert!((norm - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn orthogonality_check_agrees_with_gram(alpha in 0.6f64..ALPHA_MAX) {
        let m = parametric_matrix(4, alpha).unwrap();
        let g = m.gram();
        let off = (0..4).flat_map(|i| (0..4).map(move |j| (i, j))).filter(|(i, j)| i != j);
        let diagonal = off.clone().all(|(i, j)| g[(i, j)] == 0);
        prop_assert_eq!(orthogonality_check(&m), diagonal);
    }
}
