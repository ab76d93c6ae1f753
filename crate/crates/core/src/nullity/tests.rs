use std::f64::consts::PI;

use approx::assert_relative_eq;
use proptest::prelude::*;

use super::*;
use crate::immersion::{stock, AmbientSpace};
use crate::linalg::svd;

fn helical() -> Distribution<f64> {
    // T = (−y, x, 1) on flat ℝ³; its Euclidean derivative is X ↦ J X
    Distribution::from_fn(|p: &[Jet<f64>]| {
        Ok(vec![-&p[1], p[0].clone(), p[0].constant_like(1.0)])
    })
}

fn cone() -> Chart<f64> {
    Chart::new(
        "cone",
        AmbientSpace::Euclidean(3),
        vec![(0.5, 2.0), (-PI, PI)],
        |p| {
            let (s, c) = p[1].sin_cos();
            Ok(vec![&p[0] * &c, &p[0] * &s, p[0].clone()])
        },
    )
    .unwrap()
}

#[test]
fn cylinder_ruling_has_vanishing_splitting_tensor() {
    let c = stock::circular_cylinder::<f64>(1.0).unwrap();
    let d = Distribution::coordinate(&[1]).unwrap();
    let p = [0.7, 0.2];
    let st = splitting_tensor(&c, &p, &d).unwrap();
    assert_eq!(st.matrices.len(), 1);
    assert!(st.matrices[0].max_abs() < 1e-12);
    assert!(check_totally_geodesic(&c, &p, &d).unwrap().residual < 1e-9);
    let c1 = residual_c1(&c, &p, &d, 0.0).unwrap();
    assert!(c1.pass && c1.residual < 1e-8, "{c1:?}");
    let c3 = residual_codazzi_symmetry(&c, &p, &d, None).unwrap();
    assert_eq!(c3.residual, 0.0);
}

#[test]
fn coordinate_field_on_flat_space() {
    let c = stock::flat_space::<f64>().unwrap();
    let d = Distribution::coordinate(&[2]).unwrap();
    let st = splitting_tensor(&c, &[0.1, -0.3, 0.4], &d).unwrap();
    assert_eq!(st.perp_frame.len(), 2);
    assert_eq!(st.matrices[0].max_abs(), 0.0);
}

#[test]
fn helical_field_matches_euclidean_oracle() {
    let c = stock::flat_space::<f64>().unwrap();
    let p = [0.3, -0.2, 0.1];
    let st = splitting_tensor(&c, &p, &helical()).unwrap();
    let j = |x: &[f64]| vec![-x[1], x[0], 0.0];
    for a in 0..2 {
        for b in 0..2 {
            let expect = -dot(&st.perp_frame[a], &j(&st.perp_frame[b]));
            assert_relative_eq!(st.matrices[0][(a, b)], expect, epsilon = 1e-14);
        }
    }
    assert!(st.matrices[0].max_abs() > 0.1);
}

#[test]
fn christoffel_path_agrees_with_ambient_differences() {
    // c_ab = −⟨D_{X_b}(Φ_* T), X_a⟩ by central differences of the ambient field
    let chart = stock::catenoid::<f64>().unwrap();
    let d = Distribution::<f64>::coordinate(&[0]).unwrap().normalized();
    let p = [0.4, 0.9];
    let st = splitting_tensor(&chart, &p, &d).unwrap();
    let field = |q: &[f64]| {
        let t = evaluate_tower(&chart, q, 1).unwrap();
        let du = t.first_derivatives().unwrap()[0].clone();
        let l = norm(&du);
        linalg::scaled(1.0 / l, &du)
    };
    let ff = fundamental_forms(&evaluate_tower(&chart, &p, 2).unwrap(), chart.ambient()).unwrap();
    let x = &st.perp_frame[0];
    let xp = ff.frame_to_params(&ff.to_frame(x));
    let h = 1e-5;
    let shift = |s: f64| -> Vec<f64> { p.iter().zip(&xp).map(|(a, b)| a + s * h * b).collect() };
    let dfield = linalg::scaled(0.5 / h, &linalg::sub(&field(&shift(1.0)), &field(&shift(-1.0))));
    let expect = -dot(&dfield, x);
    assert_relative_eq!(st.matrices[0][(0, 0)], expect, epsilon = 1e-8);
}

#[test]
fn cone_rulings_satisfy_the_derivative_identity() {
    let c = cone();
    let d = Distribution::<f64>::coordinate(&[0]).unwrap().normalized();
    for &r in &[0.6, 1.0, 1.7] {
        let p = [r, 0.3];
        let st = splitting_tensor(&c, &p, &d).unwrap();
        // C_T = −1/(√2 r) on the unit angular direction
        assert_relative_eq!(st.matrices[0][(0, 0)], -1.0 / (2f64.sqrt() * r), epsilon = 1e-12);
        let rep = residual_c1(&c, &p, &d, 0.0).unwrap();
        assert!(rep.residual < 1e-8, "r = {r}: {rep:?}");
        assert!(residual_codazzi_symmetry(&c, &p, &d, None).unwrap().residual < 1e-14);
    }
}

#[test]
fn rotational_field_is_not_totally_geodesic() {
    let c = stock::flat_plane::<f64>().unwrap();
    let rot = Distribution::from_fn(|p: &[Jet<f64>]| Ok(vec![-&p[1], p[0].clone()]));
    let p = [0.3, 0.4];
    let r = 0.5;
    // ∇_T T = −(x, y), entirely horizontal
    let rep = check_totally_geodesic(&c, &p, &rot).unwrap();
    assert_relative_eq!(rep.residual, r / (1.0 + r), epsilon = 1e-14);
    assert!(!rep.pass);
    // unit field: geodesic curvature 1/r of the circle
    let rep = check_totally_geodesic(&c, &p, &rot.normalized()).unwrap();
    assert_relative_eq!(rep.residual, 1.0 / (1.0 + r), epsilon = 1e-14);
}

#[test]
fn hypotheses_are_checked_before_residuals() {
    let c = stock::saddle_graph::<f64>().unwrap();
    let d = Distribution::from_fn(|p: &[Jet<f64>]| {
        Ok(vec![p[0].constant_like(1.0), p[0].constant_like(0.3)])
    });
    let p = [0.2, -0.1];
    assert!(matches!(
        residual_c1(&c, &p, &d, 0.0),
        Err(GeometryError::HypothesisViolation(_))
    ));
    assert!(matches!(
        residual_codazzi_symmetry(&c, &p, &d, None),
        Err(GeometryError::HypothesisViolation(_))
    ));
}

#[test]
fn dependent_fields_are_rejected() {
    let c = stock::flat_space::<f64>().unwrap();
    let d = Distribution::coordinate(&[0]).unwrap().with_field(|p: &[Jet<f64>]| {
        Ok(vec![p[0].constant_like(2.0), p[0].zero_like(), p[0].zero_like()])
    });
    assert!(matches!(
        splitting_tensor(&c, &[0.0, 0.0, 0.0], &d),
        Err(GeometryError::DegenerateDistribution { .. })
    ));
}

#[test]
fn complex_structure_defect_of_rotation() {
    let j = Matrix::from_rows(&[vec![0.0, -1.0], vec![1.0, 0.0]]);
    assert_eq!(complex_structure_defect(&j), 0.0);
    let b = 2.0;
    let jb = Matrix::from_rows(&[vec![0.0, -1.0 / b], vec![b, 0.0]]);
    assert!(complex_structure_defect(&jb) < 1e-15);
    assert_relative_eq!(complex_structure_defect(&Matrix::<f64>::identity(2)), 2.0);
}

#[test]
fn report_pass_flag_follows_tolerance() {
    let r = IdentityResidualReport::new("x", 1e-6, 1e-5, vec![0.0]);
    assert!(r.pass);
    assert!(!r.clone().with_tolerance(1e-7).pass);
    assert!(!IdentityResidualReport::new("x", f64::NAN, 1.0, vec![]).pass);
}

proptest! {
    #[test]
    fn synthetic_symmetry_residual(
        a11 in -2.0f64..2.0, a12 in -2.0f64..2.0, a22 in -2.0f64..2.0, t in 0.0f64..(2.0 * PI),
    ) {
        let a = Matrix::from_rows(&[vec![a11, a12], vec![a12, a22]]);
        let c = Matrix::from_rows(&[vec![t.cos(), -t.sin()], vec![t.sin(), t.cos()]]);
        // M = A C; antisymmetric part has spectral norm |M01 − M10|; ‖A C‖ = ‖A‖
        let m01 = -a11 * t.sin() + a12 * t.cos();
        let m10 = a12 * t.cos() + a22 * t.sin();
        let tr = a11 + a22;
        let disc = ((a11 - a22).powi(2) + 4.0 * a12 * a12).sqrt();
        let a_norm = ((tr + disc) / 2.0).abs().max(((tr - disc) / 2.0).abs());
        let expect = (m01 - m10).abs() / (1.0 + a_norm);
        prop_assert!((symmetry_residual(&a, &c) - expect).abs() < 1e-12);
    }

    #[test]
    fn splitting_tensor_is_tensorial_in_x(
        p in (-0.8f64..0.8, -0.8f64..0.8, -0.8f64..0.8),
        angle in 0.0f64..(2.0 * PI),
    ) {
        let chart = stock::flat_space::<f64>().unwrap();
        let p = [p.0, p.1, p.2];
        let d = helical();
        let st = splitting_tensor(&chart, &p, &d).unwrap();
        let (s, c) = angle.sin_cos();
        let x0 = &st.perp_frame[0];
        let x1 = &st.perp_frame[1];
        let rotated = vec![
            linalg::add(&linalg::scaled(c, x0), &linalg::scaled(s, x1)),
            linalg::add(&linalg::scaled(-s, x0), &linalg::scaled(c, x1)),
        ];
        let r = Matrix::from_rows(&[vec![c, -s], vec![s, c]]);
        let st2 = splitting_tensor_in_frame(&chart, &p, &d, &rotated).unwrap();
        let conj = r.transpose().matmul(&st.matrices[0]).matmul(&r);
        prop_assert!(st2.matrices[0].sub(&conj).max_abs() < 1e-10);
    }

    #[test]
    fn splitting_tensor_is_linear_in_t(
        u in -0.8f64..0.8, v in -2.5f64..2.5, factor in 0.5f64..3.0,
    ) {
        let chart = stock::catenoid::<f64>().unwrap();
        let d = Distribution::from_fn(|p: &[Jet<f64>]| {
            Ok(vec![p[1].cos(), (&p[0] * &p[0]).scale(0.5) + 1.0])
        });
        let p = [u, v];
        let c1 = splitting_tensor(&chart, &p, &d).unwrap();
        let c2 = splitting_tensor(&chart, &p, &d.scaled(factor)).unwrap();
        let diff = c2.matrices[0].sub(&c1.matrices[0].scale(factor)).max_abs();
        prop_assert!(diff <= 1e-13 * (1.0 + c2.matrices[0].max_abs()));
    }

    #[test]
    fn perp_frame_is_orthonormal_and_orthogonal_to_d(u in -0.8f64..0.8, v in -2.5f64..2.5) {
        let chart = stock::catenoid::<f64>().unwrap();
        let d = Distribution::from_fn(|p: &[Jet<f64>]| Ok(vec![p[1].cos(), p[0].sin() + 2.0]));
        let st = splitting_tensor(&chart, &[u, v], &d).unwrap();
        let x = &st.perp_frame[0];
        prop_assert!((norm(x) - 1.0).abs() < 1e-12);
        prop_assert!(dot(x, &st.fields[0]).abs() < 1e-12 * norm(&st.fields[0]));
        let g = svd(&Matrix::from_columns(&[x.clone(), st.fields[0].clone()])).sigma;
        prop_assert!(g[1] > 1e-6);
    }
}

#[test]
fn membership_residual_separates_rulings_from_generic_directions() {
    let c = stock::elliptic_cylinder::<f64>(2.0, 1.0).unwrap();
    let p = [0.4, 0.3];
    let ruling = Distribution::coordinate(&[1]).unwrap();
    assert!(membership_residual(&c, &p, &ruling).unwrap().residual < 1e-14);
    let oblique = Distribution::from_fn(|p: &[Jet<f64>]| {
        Ok(vec![p[0].constant_like(1.0), p[0].constant_like(0.3)])
    });
    let rep = membership_residual(&c, &p, &oblique).unwrap();
    assert!(!rep.pass && rep.residual > 0.1, "{rep:?}");
}
