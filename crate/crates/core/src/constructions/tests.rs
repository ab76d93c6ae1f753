use std::f64::consts::{FRAC_PI_3, FRAC_PI_6, PI};
use std::sync::Arc;

use approx::assert_relative_eq;
use proptest::prelude::*;

use super::*;
use crate::error::GeometryError;
use crate::immersion::{
    evaluate_tower, fundamental_forms, nullity_membership_residual, relative_nullity, stock,
    AmbientSpace, Chart, FundamentalForms, NULLITY_REL_TOL,
};
use crate::jets::Jet;
use crate::linalg::{self, norm};
use crate::minimal::{
    delaunay_profile, orthogonal_sum_hat, rotational_surface, DelaunayParams, ProfileFn,
    RotationLayout, WeierstrassData,
};
use crate::nullity::{
    complex_structure_defect, residual_c1, residual_codazzi_symmetry, splitting_tensor,
    Distribution,
};

fn forms(chart: &Chart<f64>, p: &[f64]) -> FundamentalForms<f64> {
    fundamental_forms(&evaluate_tower(chart, p, 2).unwrap(), chart.ambient()).unwrap()
}

fn constant_curvature(k: f64) -> CurvatureFn {
    Arc::new(move |s: &Jet<f64>| Ok(s.constant_like(k)))
}

fn hat_bipolar(data: WeierstrassData, phi: f64) -> UnitTangentChart {
    bipolar_chart(&orthogonal_sum_hat(&data, 0.0, phi).unwrap()).unwrap()
}

fn fiber() -> Distribution<f64> {
    Distribution::coordinate(&[2]).unwrap().normalized()
}

#[test]
fn bipolar_chart_matches_its_definition() {
    let hat = orthogonal_sum_hat(&WeierstrassData::enneper(), 0.0, FRAC_PI_6).unwrap();
    let b = bipolar_chart(&hat).unwrap();
    assert!(b.singular_points.is_empty());
    assert_eq!(b.chart.ambient(), AmbientSpace::Sphere(5));
    let h = 1e-5;
    for p in [[0.1, 0.2, 0.3], [-0.6, 0.5, 4.0], [0.7, -0.7, 6.0]] {
        // tangent vectors of ĝ by central differences
        let diff = |axis: usize| {
            let mut a = [p[0], p[1]];
            let mut c = a;
            a[axis] += h;
            c[axis] -= h;
            linalg::scaled(0.5 / h, &linalg::sub(&hat.position(&a).unwrap(), &hat.position(&c).unwrap()))
        };
        let (gu, gv) = (diff(0), diff(1));
        let lambda = norm(&gu);
        let expect = linalg::scaled(
            1.0 / lambda,
            &linalg::add(&linalg::scaled(p[2].cos(), &gu), &linalg::scaled(p[2].sin(), &gv)),
        );
        let got = b.chart.position(&p).unwrap();
        for (x, y) in got.iter().zip(&expect) {
            assert_relative_eq!(x, y, epsilon = 1e-8);
        }
        assert_relative_eq!(norm(&got), 1.0, epsilon = 1e-14);
        let t = evaluate_tower(&b.chart, &p, 1).unwrap();
        assert_relative_eq!(norm(&t.first_derivatives().unwrap()[2]), 1.0, epsilon = 1e-12);
        assert_relative_eq!(b.conformal_factor(p[0], p[1]).unwrap(), lambda, max_relative = 1e-8);
    }
}

#[test]
fn bipolar_structure_of_the_hat() {
    for (data, phi) in [(WeierstrassData::enneper(), FRAC_PI_6), (WeierstrassData::catenoid(), FRAC_PI_3)] {
        let b = hat_bipolar(data, phi);
        let dom = b.chart.domain().to_vec();
        for p in [
            [dom[0].0 * 0.5, dom[1].1 * 0.3, 0.4],
            [dom[0].1 * 0.9, dom[1].0 * 0.7, 3.5],
        ] {
            let t = evaluate_tower(&b.chart, &p, 2).unwrap();
            let ff = fundamental_forms(&t, b.chart.ambient()).unwrap();
            let nu = relative_nullity(&ff, NULLITY_REL_TOL);
            assert!(nu.index >= 1);
            let dth = &t.first_derivatives().unwrap()[2];
            assert!(nullity_membership_residual(&ff, dth) < 1e-10);
            let st = splitting_tensor(&b.chart, &p, &fiber()).unwrap();
            assert!(complex_structure_defect(&st.matrices[0]) < 1e-10);
            assert!(residual_c1(&b.chart, &p, &fiber(), 1.0).unwrap().residual < 1e-8);
            assert!(residual_codazzi_symmetry(&b.chart, &p, &fiber(), None).unwrap().residual < 1e-10);
        }
    }
}

#[test]
fn bipolar_mean_curvature_is_constant_along_fibers() {
    let b = hat_bipolar(WeierstrassData::enneper(), FRAC_PI_6);
    for (u, v) in [(0.2, -0.3), (-0.5, 0.6)] {
        let hs: Vec<f64> = (0..16)
            .map(|k| forms(&b.chart, &[u, v, 2.0 * PI * k as f64 / 16.0]).mean_curvature)
            .collect();
        let max = hs.iter().cloned().fold(f64::MIN, f64::max);
        let min = hs.iter().cloned().fold(f64::MAX, f64::min);
        assert!((max - min) / max < 1e-10, "{hs:?}");
    }
    let rows = b.fiber_scan([3, 3, 4]);
    assert_eq!(rows.len(), 36);
    assert!(rows.iter().all(|r| r.nullity >= 1));
}

#[test]
fn bipolar_guards() {
    let sphere = stock::round_sphere::<f64>().unwrap();
    assert!(matches!(bipolar_chart(&sphere), Err(GeometryError::InvalidInput(_))));
    let stretched = Chart::new("stretched plane", AmbientSpace::Euclidean(4), vec![(-1.0, 1.0), (-1.0, 1.0)], |p| {
        Ok(vec![p[0].clone(), p[1].scale(2.0), p[0].zero_like(), p[0].zero_like()])
    })
    .unwrap();
    assert!(matches!(bipolar_chart(&stretched), Err(GeometryError::HypothesisViolation(_))));
    assert!(bipolar_chart(&stock::flat_space::<f64>().unwrap()).is_err());
}

#[test]
fn flat_base_gives_singular_bipolar_points() {
    // a plane in ℝ⁴: Φ does not depend on (u, v)
    let plane = Chart::new("plane in R4", AmbientSpace::Euclidean(4), vec![(-1.0, 1.0), (-1.0, 1.0)], |p| {
        Ok(vec![p[0].clone(), p[1].clone(), p[0].zero_like(), p[0].zero_like()])
    })
    .unwrap();
    let b = bipolar_chart_scanned(&plane, [3, 3, 4]).unwrap();
    assert_eq!(b.singular_points.len(), 36);
    assert!(b.is_singular(&[-1.0, -1.0, 0.0]));
    assert!(b.fiber_scan([2, 2, 2]).is_empty());
}

#[test]
fn cylinder_over_a_circle() {
    let circle = Chart::new("circle", AmbientSpace::Euclidean(2), vec![(-PI, PI)], |p| {
        let (s, c) = p[0].sin_cos();
        Ok(vec![c, s])
    })
    .unwrap();
    let cyl = cylinder_chart(&circle, 1).unwrap();
    assert_eq!(cyl.ambient(), AmbientSpace::Euclidean(3));
    let d = Distribution::coordinate(&[1]).unwrap();
    for p in [[0.3, -0.5], [2.0, 0.7]] {
        let ff = forms(&cyl, &p);
        assert_relative_eq!(ff.mean_curvature, 0.5, epsilon = 1e-12);
        assert_eq!(relative_nullity(&ff, NULLITY_REL_TOL).index, 1);
        assert!(splitting_tensor(&cyl, &p, &d).unwrap().matrices[0].max_abs() < 1e-12);
    }
}

#[test]
fn cylinder_nullity_is_additive() {
    let plane3 = cylinder_chart(&stock::plane::<f64>().unwrap(), 1).unwrap();
    assert_eq!(relative_nullity(&forms(&plane3, &[0.1, 0.2, 0.3]), NULLITY_REL_TOL).index, 3);
    let catenoid = cylinder_chart(&stock::catenoid::<f64>().unwrap(), 1).unwrap();
    let ff = forms(&catenoid, &[0.3, 0.2, 0.5]);
    assert_eq!(relative_nullity(&ff, NULLITY_REL_TOL).index, 1);
    assert!(ff.mean_curvature < 1e-12);
    assert!(cylinder_chart(&stock::flat_space::<f64>().unwrap(), 1).is_err());
    assert!(cylinder_chart(&stock::great_sphere::<f64>().unwrap(), 1).is_err());
}

#[test]
fn unit_circle_closes() {
    let c = plane_curve_from_curvature(constant_curvature(1.0), (0.0, 2.0 * PI), 201).unwrap();
    let end = *c.positions.last().unwrap();
    assert!(end[0].hypot(end[1]) < 1e-7);
    assert!(c.max_speed_drift < 1e-10);
    // centre (0, 1), radius 1
    for &s in &[0.3, 1.9, 4.4] {
        let p = c.position(s).unwrap();
        assert_relative_eq!(p[0], s.sin(), epsilon = 1e-10);
        assert_relative_eq!(p[1], 1.0 - s.cos(), epsilon = 1e-10);
    }
}

#[test]
fn zero_curvature_gives_a_line() {
    let c = plane_curve_from_curvature(constant_curvature(0.0), (-1.0, 2.0), 31).unwrap();
    for (s, p) in c.s.iter().zip(&c.positions) {
        assert_relative_eq!(p[0], s + 1.0, epsilon = 1e-12);
        assert_eq!(p[1], 0.0);
    }
}

#[test]
fn clothoid_curvature_is_recovered() {
    let k: CurvatureFn = Arc::new(|s: &Jet<f64>| Ok(s.clone()));
    let c = plane_curve_from_curvature(k, (-2.0, 2.0), 401).unwrap();
    let p = |t: f64| c.position(t).unwrap();
    let kappa_fd = |s: f64, h: f64| {
        let (a, m, b) = (p(s - h), p(s), p(s + h));
        let d1 = [(b[0] - a[0]) / (2.0 * h), (b[1] - a[1]) / (2.0 * h)];
        let d2 = [(b[0] - 2.0 * m[0] + a[0]) / (h * h), (b[1] - 2.0 * m[1] + a[1]) / (h * h)];
        (d1[0] * d2[1] - d1[1] * d2[0]) / d1[0].hypot(d1[1]).powi(3)
    };
    for &s in &[-1.5, -0.2, 0.9, 1.7] {
        // Richardson extrapolation of the O(h²) difference quotient
        let kappa = (4.0 * kappa_fd(s, 1e-3) - kappa_fd(s, 2e-3)) / 3.0;
        assert!((kappa - s).abs() < 1e-6, "s = {s}: {kappa}");
    }
}

#[test]
fn curve_jets_match_the_frame() {
    let k: CurvatureFn = Arc::new(|s: &Jet<f64>| Ok(&s.sin().scale(0.3) + 0.5));
    let c = plane_curve_from_curvature(k, (0.0, 3.0), 61).unwrap();
    for &s in &[0.37, 1.55, 2.96] {
        let j = c.position_jet(&Jet::variable(s, 0, 1, 3).unwrap()).unwrap();
        let t = c.tangent(s).unwrap();
        assert_relative_eq!(j[0].coeffs()[1], t[0], epsilon = 1e-12);
        assert_relative_eq!(j[1].coeffs()[1], t[1], epsilon = 1e-12);
        let kappa = 0.5 + 0.3 * s.sin();
        // γ'' = k N with N = (−t_y, t_x)
        assert_relative_eq!(2.0 * j[0].coeffs()[2], -kappa * t[1], epsilon = 1e-12);
        assert_relative_eq!(2.0 * j[1].coeffs()[2], kappa * t[0], epsilon = 1e-12);
    }
    assert!(matches!(c.position(3.5), Err(GeometryError::RangeViolation { .. })));
    let mut csv = Vec::new();
    c.write_csv(&mut csv).unwrap();
    assert_eq!(String::from_utf8(csv).unwrap().lines().count(), 62);
    assert!(plane_curve_from_curvature(constant_curvature(1.0), (1.0, 1.0), 5).is_err());
}

fn rotational(a: f64, b: f64) -> Chart<f64> {
    // surface of revolution about the third axis with profile r(t) = a + b cos t
    Chart::new("torus-like", AmbientSpace::Euclidean(3), vec![(-1.0, 1.0), (-PI, PI)], move |p| {
        let r = &p[0].cos().scale(b) + a;
        let (s, c) = p[1].sin_cos();
        Ok(vec![&r * &c, &r * &s, p[0].sin().scale(b)])
    })
    .unwrap()
}

#[test]
fn straight_curve_leaves_mean_curvature_unchanged() {
    let curve = Arc::new(plane_curve_from_curvature(constant_curvature(0.0), (-2.0, 2.0), 41).unwrap());
    let comp = compose_with_curve_cylinder(&stock::round_sphere().unwrap(), curve, 0).unwrap();
    assert_eq!(comp.chart.ambient(), AmbientSpace::Euclidean(4));
    for p in [[0.2, 0.3], [-0.5, 1.0]] {
        let pt = comp.evaluate(&p).unwrap();
        assert_relative_eq!(pt.mean_curvature, pt.mean_curvature_base, epsilon = 1e-10);
        assert!(pt.identity_residual < 1e-10 && pt.frame_residual < 1e-12);
    }
}

#[test]
fn normal_along_the_axis_has_no_correction() {
    // hyperplane x = 0.4: ⟨ξ, a⟩ = 1 and f stays flat
    let plane = Chart::new("hyperplane", AmbientSpace::Euclidean(3), vec![(-1.0, 1.0), (-1.0, 1.0)], |p| {
        Ok(vec![p[0].constant_like(0.4), p[0].clone(), p[1].clone()])
    })
    .unwrap();
    let curve = Arc::new(plane_curve_from_curvature(constant_curvature(1.0), (0.0, 1.0), 21).unwrap());
    let comp = compose_with_curve_cylinder(&plane, curve.clone(), 0).unwrap();
    let pt = comp.evaluate(&[0.1, -0.2]).unwrap();
    assert_relative_eq!(pt.normal_height.abs(), 1.0, epsilon = 1e-14);
    assert!(pt.mean_curvature < 1e-12);
    // cylinder ruled along a: ⟨ξ, a⟩ = 0 and the full correction k/n appears
    let cyl = cylinder_chart(
        &Chart::new("circle", AmbientSpace::Euclidean(2), vec![(-1.0, 1.0)], |p| {
            let (s, c) = p[0].sin_cos();
            Ok(vec![c, s])
        })
        .unwrap(),
        1,
    )
    .unwrap();
    let ruled = cyl.reparametrize(vec![(-1.0, 1.0), (0.1, 0.9)], |p| Ok(p.to_vec())).unwrap();
    let comp = compose_with_curve_cylinder(&ruled, curve, 2).unwrap();
    let pt = comp.evaluate(&[0.3, 0.5]).unwrap();
    assert!(pt.normal_height.abs() < 1e-14);
    assert_relative_eq!(pt.mean_curvature, (0.25f64 + 0.25).sqrt(), epsilon = 1e-10);
}

#[test]
fn composition_range_is_checked() {
    let curve = Arc::new(plane_curve_from_curvature(constant_curvature(1.0), (0.0, 0.5), 11).unwrap());
    assert!(matches!(
        compose_with_curve_cylinder(&stock::round_sphere().unwrap(), curve.clone(), 0),
        Err(GeometryError::RangeViolation { .. })
    ));
    assert!(compose_with_curve_cylinder(&stock::round_sphere().unwrap(), curve.clone(), 3).is_err());
    assert!(compose_with_curve_cylinder(&stock::great_sphere().unwrap(), curve, 0).is_err());
}

fn delaunay_composition(layout: RotationLayout) -> CompositionData {
    let params = DelaunayParams::default();
    let prof = Arc::new(delaunay_profile(params).unwrap());
    let p2 = prof.clone();
    let k: CurvatureFn = Arc::new(move |s: &Jet<f64>| p2.curvature_jet(s));
    let curve = Arc::new(plane_curve_from_curvature(k, params.x_range, 401).unwrap());
    let g = prof.chart((0.05, 0.45), (-1.0, 1.0), layout).unwrap();
    compose_with_curve_cylinder(&cylinder_chart(&g, 1).unwrap(), curve, 0).unwrap()
}

#[test]
fn delaunay_composition_has_constant_mean_curvature() {
    let comp = delaunay_composition(RotationLayout::AboutFirstAxis);
    for p in [[0.1, -0.5, 0.0], [0.3, 0.2, 0.5], [0.44, 0.9, -0.7]] {
        let pt = comp.evaluate(&p).unwrap();
        assert!((pt.mean_curvature - 0.2).abs() < 1e-8, "{pt:?}");
        assert!(pt.identity_residual < 1e-10);
    }
}

#[test]
fn height_axis_delaunay_reading_is_not_constant() {
    let comp = delaunay_composition(RotationLayout::AboutHeightAxis);
    let hs: Vec<f64> = [[0.1, -0.5, 0.0], [0.3, 0.2, 0.5], [0.44, 0.9, -0.7]]
        .iter()
        .map(|p| comp.evaluate(p).unwrap().mean_curvature)
        .collect();
    let spread = hs.iter().cloned().fold(f64::MIN, f64::max) - hs.iter().cloned().fold(f64::MAX, f64::min);
    assert!(spread > 1e-3, "{hs:?}");
}

proptest! {
    #[test]
    fn composition_identity_for_rotational_hypersurfaces(
        a in 1.5f64..2.5, b in 0.2f64..0.8, u in -0.9f64..0.9, v in -3.0f64..3.0,
    ) {
        let f = rotational(a, b);
        let curve = Arc::new(plane_curve_from_curvature(constant_curvature(1.0), (-3.5, 3.5), 141).unwrap());
        let comp = compose_with_curve_cylinder(&f, curve, 0).unwrap();
        let pt = comp.evaluate(&[u, v]).unwrap();
        prop_assert!(pt.identity_residual < 1e-8, "{:?}", pt);
        prop_assert!(pt.frame_residual < 1e-9);
    }

    #[test]
    fn unit_speed_is_preserved(c0 in -2.0f64..2.0, c1 in -1.0f64..1.0) {
        let k: CurvatureFn = Arc::new(move |s: &Jet<f64>| Ok(&s.scale(c1) + c0));
        let c = plane_curve_from_curvature(k, (0.0, 2.0), 21).unwrap();
        for t in &c.tangents {
            prop_assert!((t[0].hypot(t[1]) - 1.0).abs() < 1e-12);
        }
        prop_assert!(c.max_speed_drift < 1e-10);
    }

    #[test]
    fn bipolar_image_lies_on_the_sphere(u in -0.8f64..0.8, v in -0.8f64..0.8, th in 0.0f64..6.0) {
        let hat = orthogonal_sum_hat(&WeierstrassData::enneper(), 0.3, 0.4).unwrap();
        let b = bipolar_chart_scanned(&hat, [3, 3, 2]).unwrap();
        prop_assert!((norm(&b.chart.position(&[u, v, th]).unwrap()) - 1.0).abs() < 1e-10);
    }
}

#[test]
fn rotational_profile_helper_is_used() {
    let constant: ProfileFn = Arc::new(|x| Ok(x.constant_like(1.0)));
    let cyl = rotational_surface(constant, vec![(-1.0, 1.0), (-1.0, 1.0)], RotationLayout::AboutFirstAxis).unwrap();
    let comp = compose_with_curve_cylinder(
        &cyl,
        Arc::new(plane_curve_from_curvature(constant_curvature(0.5), (-1.0, 1.0), 21).unwrap()),
        0,
    )
    .unwrap();
    // ⟨ξ, a⟩ = 0 on the cylinder, so n H_f = √(1 + k²)
    let pt = comp.evaluate(&[0.2, 0.1]).unwrap();
    assert_relative_eq!(pt.mean_curvature, (1.0f64 + 0.25).sqrt() / 2.0, epsilon = 1e-10);
}
