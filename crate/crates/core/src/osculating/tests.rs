use std::f64::consts::PI;

use approx::assert_relative_eq;
use proptest::prelude::*;

use super::*;
use crate::immersion::stock;
use crate::jets::Jet;

/// The complex curve `w = z²` in `ℂ² = ℝ⁴`.
fn complex_parabola() -> Chart<f64> {
    Chart::new(
        "z -> (z, z^2)",
        AmbientSpace::Euclidean(4),
        vec![(-1.0, 1.0), (-1.0, 1.0)],
        |p| {
            let (u, v) = (&p[0], &p[1]);
            Ok(vec![
                u.clone(),
                v.clone(),
                &(u * u) - &(v * v),
                (u * v).scale(2.0),
            ])
        },
    )
    .unwrap()
}

/// Unit sphere in Mercator coordinates (conformal, not minimal).
fn mercator_sphere() -> Chart<f64> {
    Chart::new(
        "mercator sphere",
        AmbientSpace::Euclidean(3),
        vec![(-1.0, 1.0), (-PI, PI)],
        |p| {
            let sech = p[0].cosh().recip()?;
            let (s, c) = p[1].sin_cos();
            let th = &p[0].sinh() * &sech;
            Ok(vec![&sech * &c, &sech * &s, th])
        },
    )
    .unwrap()
}

fn flag_of(chart: &Chart<f64>, p: &[f64], order: usize) -> (DerivativeTower<f64>, OsculatingFlag<f64>) {
    let t = evaluate_tower(chart, p, order).unwrap();
    let f = osculating_flag(&t, chart.ambient(), FLAG_REL_TOL).unwrap();
    (t, f)
}

#[test]
fn plane_has_no_normal_flag() {
    let (_, f) = flag_of(&stock::plane().unwrap(), &[0.2, 0.1], 4);
    assert_eq!(f.tau, 0);
    assert!(f.ranks.is_empty());
    assert!(f.complete);
}

#[test]
fn round_sphere_flag_and_second_form() {
    let c = stock::round_sphere::<f64>().unwrap();
    let p = [0.3, -0.7];
    let (t, f) = flag_of(&c, &p, 3);
    assert_eq!(f.ranks, vec![1]);
    assert_eq!(f.tau, 1);
    assert_eq!(f.tau_circ(), 0);
    // unit direction along the latitude parameter
    let a = higher_form(&t, &f, 2, &[1.0, 0.0]).unwrap();
    for (x, y) in a.iter().zip(t.position()) {
        assert!((x + y).abs() < 1e-12);
    }
}

#[test]
fn cylinder_third_form_is_zero() {
    let c = stock::circular_cylinder::<f64>(1.0).unwrap();
    let (t, f) = flag_of(&c, &[0.4, 0.1], 3);
    assert_eq!(f.tau, 1);
    let a3 = higher_form(&t, &f, 3, &[0.6, 0.8]).unwrap();
    assert!(a3.iter().all(|&x| x == 0.0));
    assert!(matches!(higher_form(&t, &f, 4, &[1.0, 0.0]), Err(GeometryError::InsufficientOrder { .. })));
}

#[test]
fn complex_parabola_first_ellipse_is_circle_of_radius_two() {
    let c = complex_parabola();
    let (t, f) = flag_of(&c, &[0.0, 0.0], 3);
    assert_eq!(f.ranks, vec![2]);
    assert_eq!(f.tau_circ(), 1);
    let ff = fundamental_forms(&t, c.ambient()).unwrap();
    let j = EllipticStructure::tangent_rotation(&ff).unwrap();
    let e = curvature_ellipse(&t, &f, 1, &j, ELLIPSE_SAMPLES).unwrap();
    assert_relative_eq!(e.kappa, 2.0, epsilon = 1e-12);
    assert_relative_eq!(e.mu, 2.0, epsilon = 1e-12);
    assert!(e.circle_defect < 1e-12 && e.center_norm < 1e-12);
    assert!(isotropy_defect(&t, &f, 2).unwrap() < 1e-12);
}

#[test]
fn isotropy_and_ellipse_agree_away_from_origin() {
    let c = complex_parabola();
    let (t, f) = flag_of(&c, &[0.4, -0.3], 3);
    let ff = fundamental_forms(&t, c.ambient()).unwrap();
    let j = EllipticStructure::tangent_rotation(&ff).unwrap();
    let e = curvature_ellipse(&t, &f, 1, &j, ELLIPSE_SAMPLES).unwrap();
    let iso = isotropy_defect(&t, &f, 2).unwrap();
    assert!(e.circle_defect < 1e-10, "{e:?}");
    assert!((iso - e.circle_defect).abs() < 2e-3);
}

#[test]
fn zeroth_ellipse_of_minimal_chart_is_circle() {
    let c = stock::catenoid::<f64>().unwrap();
    let (t, f) = flag_of(&c, &[0.3, 0.5], 3);
    let ff = fundamental_forms(&t, c.ambient()).unwrap();
    let j = EllipticStructure::tangent_rotation(&ff).unwrap();
    let e = curvature_ellipse(&t, &f, 0, &j, 16).unwrap();
    assert!(e.circle_defect < 1e-8);
    assert_relative_eq!(e.kappa, 1.0, epsilon = 1e-12);
}

#[test]
fn zeroth_ellipse_of_non_orthogonal_structure() {
    let c = stock::catenoid::<f64>().unwrap();
    let (t, f) = flag_of(&c, &[0.3, 0.5], 3);
    let ff = fundamental_forms(&t, c.ambient()).unwrap();
    let b = 1.7;
    let jm = Matrix::from_rows(&[vec![0.0, -1.0 / b], vec![b, 0.0]]);
    let j = EllipticStructure::new(jm, ff.tangent_frame.clone()).unwrap();
    assert_relative_eq!(j.b, b, epsilon = 1e-14);
    let e = curvature_ellipse(&t, &f, 0, &j, 24).unwrap();
    assert_relative_eq!(e.kappa, b, epsilon = 1e-12);
    assert_relative_eq!(e.mu, 1.0, epsilon = 1e-12);
    assert_relative_eq!(e.circle_defect, (b * b - 1.0) / (b * b + 1.0), epsilon = 1e-12);
}

#[test]
fn ellipse_order_beyond_tau_circ_is_rejected() {
    let c = stock::round_sphere::<f64>().unwrap();
    let (t, f) = flag_of(&c, &[0.1, 0.1], 3);
    let ff = fundamental_forms(&t, c.ambient()).unwrap();
    let j = EllipticStructure::tangent_rotation(&ff).unwrap();
    assert!(curvature_ellipse(&t, &f, 1, &j, 16).is_err());
    assert!(curvature_ellipse(&t, &f, 0, &j, 8).is_err());
}

#[test]
fn ellipticity_defect_minimal_and_umbilic() {
    let c = stock::catenoid::<f64>().unwrap();
    let ff = fundamental_forms(&evaluate_tower(&c, &[0.5, 1.0], 2).unwrap(), c.ambient()).unwrap();
    let j = EllipticStructure::tangent_rotation(&ff).unwrap();
    assert!(ellipticity_defect(&ff, &j).unwrap() < 1e-8);

    let s = stock::round_sphere::<f64>().unwrap();
    let ff = fundamental_forms(&evaluate_tower(&s, &[0.5, 1.0], 2).unwrap(), s.ambient()).unwrap();
    let j = EllipticStructure::tangent_rotation(&ff).unwrap();
    assert_relative_eq!(ellipticity_defect(&ff, &j).unwrap(), 1.0, epsilon = 1e-12);
}

#[test]
fn elliptic_structure_requires_square_minus_identity() {
    let frame = vec![vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0]];
    assert!(EllipticStructure::new(Matrix::identity(2), frame.clone()).is_err());
    assert!(EllipticStructure::rotation(frame).is_ok());
}

#[test]
fn isotropy_guards() {
    let (t, f) = flag_of(&stock::saddle_graph().unwrap(), &[0.3, 0.0], 3);
    assert!(isotropy_defect(&t, &f, 2).is_err());
    let (t, f) = flag_of(&mercator_sphere(), &[0.3, 0.2], 3);
    let err = isotropy_defect(&t, &f, 2).unwrap_err();
    assert!(err.to_string().contains("minimal"), "{err}");
}

#[test]
fn rank_drop_is_not_nicely_curved() {
    let cubic = stock::graph("cubic", vec![(-1.0, 1.0), (-1.0, 1.0)], |x: &Jet<f64>, _y: &Jet<f64>| {
        x.powi(3).unwrap()
    })
    .unwrap();
    let f = osculating_flag_at(&cubic, &[0.0, 0.0], 3, FLAG_REL_TOL).unwrap();
    assert!(!f.nicely_curved_ok);
    let f = osculating_flag_at(&complex_parabola(), &[0.2, 0.3], 3, FLAG_REL_TOL).unwrap();
    assert!(f.nicely_curved_ok);
    assert_eq!(f.ranks, vec![2]);
}

#[test]
fn circle_defect_bounds() {
    assert_eq!(circle_defect(1.0, 1.0), 0.0);
    assert_eq!(circle_defect(1.0, 0.0), 1.0);
    assert_eq!(circle_defect(0.0, 0.0), 0.0);
}

proptest! {
    #[test]
    fn sampled_ellipse_recovers_axes(
        a in 0.1f64..3.0, b in 0.1f64..3.0, phase in 0.0f64..(2.0 * PI),
        c in (-1.0f64..1.0, -1.0f64..1.0, -1.0f64..1.0), rot in 0.0f64..PI, n in 16usize..40,
    ) {
        let u = [rot.cos(), rot.sin(), 0.0];
        let v = [-rot.sin() / 2f64.sqrt(), rot.cos() / 2f64.sqrt(), 1.0 / 2f64.sqrt()];
        let samples: Vec<Vec<f64>> = (0..n)
            .map(|k| {
                let t = phase + 2.0 * PI * k as f64 / n as f64;
                (0..3).map(|i| [c.0, c.1, c.2][i] + a * t.cos() * u[i] + b * t.sin() * v[i]).collect()
            })
            .collect();
        let e = ellipse_from_samples(1, &samples);
        prop_assert!((e.kappa - a.max(b)).abs() < 1e-12);
        prop_assert!((e.mu - a.min(b)).abs() < 1e-12);
        let cn = (c.0 * c.0 + c.1 * c.1 + c.2 * c.2).sqrt();
        prop_assert!((e.center_norm - cn).abs() < 1e-12);
        prop_assert!(e.kappa >= e.mu && (0.0..=1.0).contains(&e.circle_defect));
    }

    #[test]
    fn ellipse_does_not_depend_on_start(
        u in -0.8f64..0.8, v in -0.8f64..0.8, b in 0.5f64..2.0, theta0 in 0.0f64..(2.0 * PI), ell in 0usize..2,
    ) {
        let c = complex_parabola();
        let (t, f) = flag_of(&c, &[u, v], 3);
        let ff = fundamental_forms(&t, c.ambient()).unwrap();
        let jm = Matrix::from_rows(&[vec![0.3, -(1.0 + 0.09) / b], vec![b, -0.3]]);
        let j = EllipticStructure::new(jm, ff.tangent_frame.clone()).unwrap();
        let e0 = curvature_ellipse(&t, &f, ell, &j, 32).unwrap();
        let e1 = curvature_ellipse_from(&t, &f, ell, &j, 32, theta0).unwrap();
        prop_assert!((e0.kappa - e1.kappa).abs() < 1e-8);
        prop_assert!((e0.mu - e1.mu).abs() < 1e-8);
        prop_assert!((e0.circle_defect - e1.circle_defect).abs() < 1e-8);
    }

    #[test]
    fn flag_bases_are_orthonormal_and_normal(u in -0.9f64..0.9, v in -0.9f64..0.9) {
        let c = complex_parabola();
        let (t, f) = flag_of(&c, &[u, v], 4);
        prop_assert!(f.ranks.iter().all(|&r| r <= 2));
        let jac = t.first_derivatives().unwrap();
        let all: Vec<Vec<f64>> = f.bases.iter().flatten().cloned().collect();
        for (i, x) in all.iter().enumerate() {
            prop_assert!((norm(x) - 1.0).abs() < 1e-12);
            for y in &all[..i] {
                prop_assert!(dot(x, y).abs() < 1e-12);
            }
            for d in &jac {
                prop_assert!(dot(x, d).abs() < 1e-12 * norm(d));
            }
        }
    }
}
