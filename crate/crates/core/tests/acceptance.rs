//! Acceptance suite. Prints one line per criterion and exits non-zero if any
//! criterion fails.

use std::f64::consts::{FRAC_PI_3, FRAC_PI_6};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use nullitylab::jets::{seed_variables, JetBudget, MultiIndex};
use nullitylab::verify::{
    default_config, run_scenario, ScenarioConfig, SurfaceSpec, VerificationReport,
};
use nullitylab::Jet64;

/// Arithmetic shared by plain floats and jets, so every battery function is
/// written once and evaluated both ways.
trait Val: Clone {
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn div(&self, o: &Self) -> Self;
    fn addc(&self, c: f64) -> Self;
    fn mulc(&self, c: f64) -> Self;
    fn sin(&self) -> Self;
    fn cos(&self) -> Self;
    fn exp(&self) -> Self;
    fn ln(&self) -> Self;
    fn sqrt(&self) -> Self;
    fn atan(&self) -> Self;
    fn sinh(&self) -> Self;
    fn cosh(&self) -> Self;
    fn powf(&self, p: f64) -> Self;
}

impl Val for f64 {
    fn add(&self, o: &Self) -> Self { self + o }
    fn sub(&self, o: &Self) -> Self { self - o }
    fn mul(&self, o: &Self) -> Self { self * o }
    fn div(&self, o: &Self) -> Self { self / o }
    fn addc(&self, c: f64) -> Self { self + c }
    fn mulc(&self, c: f64) -> Self { self * c }
    fn sin(&self) -> Self { f64::sin(*self) }
    fn cos(&self) -> Self { f64::cos(*self) }
    fn exp(&self) -> Self { f64::exp(*self) }
    fn ln(&self) -> Self { f64::ln(*self) }
    fn sqrt(&self) -> Self { f64::sqrt(*self) }
    fn atan(&self) -> Self { f64::atan(*self) }
    fn sinh(&self) -> Self { f64::sinh(*self) }
    fn cosh(&self) -> Self { f64::cosh(*self) }
    fn powf(&self, p: f64) -> Self { f64::powf(*self, p) }
}

impl Val for Jet64 {
    fn add(&self, o: &Self) -> Self { self + o }
    fn sub(&self, o: &Self) -> Self { self - o }
    fn mul(&self, o: &Self) -> Self { self * o }
    fn div(&self, o: &Self) -> Self { self.try_div(o).unwrap() }
    fn addc(&self, c: f64) -> Self { self + c }
    fn mulc(&self, c: f64) -> Self { self.scale(c) }
    fn sin(&self) -> Self { Jet64::sin(self) }
    fn cos(&self) -> Self { Jet64::cos(self) }
    fn exp(&self) -> Self { Jet64::exp(self) }
    fn ln(&self) -> Self { Jet64::ln(self).unwrap() }
    fn sqrt(&self) -> Self { Jet64::sqrt(self).unwrap() }
    fn atan(&self) -> Self { Jet64::atan(self) }
    fn sinh(&self) -> Self { Jet64::sinh(self) }
    fn cosh(&self) -> Self { Jet64::cosh(self) }
    fn powf(&self, p: f64) -> Self { Jet64::powf(self, p).unwrap() }
}

type BatteryFn<V> = fn(&[V]) -> V;

struct Case {
    name: &'static str,
    point: &'static [f64],
    float: BatteryFn<f64>,
    jet: BatteryFn<Jet64>,
}

macro_rules! battery {
    ($x:ident; $( $name:literal, [$($p:expr),+], $body:expr; )+) => {{
        fn generic<V: Val>(name: &str, $x: &[V]) -> V {
            match name {
                $( $name => $body, )+
                _ => unreachable!(),
            }
        }
        vec![$(Case {
            name: $name,
            point: &[$($p),+],
            float: |x: &[f64]| generic($name, x),
            jet: |x: &[Jet64]| generic($name, x),
        }),+]
    }};
}

fn battery() -> Vec<Case> {
    battery! {
        x;
        "sin(exp x)", [0.3], x[0].exp().sin();
        "ln(1 + x^2)", [0.7], x[0].mul(&x[0]).addc(1.0).ln();
        "atan(x)/(1 + x)", [0.4], x[0].atan().div(&x[0].addc(1.0));
        "sqrt(2 + cos x)", [1.1], x[0].cos().addc(2.0).sqrt();
        "x^2.5 sinh x", [0.8], x[0].powf(2.5).mul(&x[0].sinh());
        "cosh(x)^-1", [-0.6], x[0].cosh().powf(-1.0);
        "exp(-x^2) cos 3x", [0.25], x[0].mul(&x[0]).mulc(-1.0).exp().mul(&x[0].mulc(3.0).cos());
        "x y sin(x + y)", [0.3, -0.2], x[0].mul(&x[1]).mul(&x[0].add(&x[1]).sin());
        "exp(x) / (2 + y^2)", [0.1, 0.5], x[0].exp().div(&x[1].mul(&x[1]).addc(2.0));
        "ln(x^2 + y^2 + 1)", [0.6, -0.4], x[0].mul(&x[0]).add(&x[1].mul(&x[1])).addc(1.0).ln();
        "atan(y / x)", [1.2, 0.5], x[1].div(&x[0]).atan();
        "sqrt(1 + x^2 y)", [0.5, 0.9], x[0].mul(&x[0]).mul(&x[1]).addc(1.0).sqrt();
        "cos(x) cosh(y)", [0.7, 0.3], x[0].cos().mul(&x[1].cosh());
        "sin(x y) / (1 + x)", [0.2, 1.5], x[0].mul(&x[1]).sin().div(&x[0].addc(1.0));
        "(1 + x + y)^1.5", [0.2, 0.1], x[0].add(&x[1]).addc(1.0).powf(1.5);
        "x y z", [0.5, -1.5, 2.0], x[0].mul(&x[1]).mul(&x[2]);
        "exp(x + 2y - z)", [0.1, -0.2, 0.3], x[0].add(&x[1].mulc(2.0)).sub(&x[2]).exp();
        "sin(x) cos(y) exp(z)", [0.4, 0.2, -0.3], x[0].sin().mul(&x[1].cos()).mul(&x[2].exp());
        "1 / sqrt(x^2 + y^2 + z^2)", [1.0, 0.5, 0.8], x[0].mul(&x[0]).add(&x[1].mul(&x[1])).add(&x[2].mul(&x[2])).powf(-0.5);
        "ln(2 + x y) atan(z)", [0.3, 0.6, 0.9], x[0].mul(&x[1]).addc(2.0).ln().mul(&x[2].atan());
    }
}

/// Central-difference weights of the `k`-th derivative on offsets `-m..=m`.
fn stencil(k: usize) -> &'static [f64] {
    match k {
        0 => &[1.0],
        1 => &[-0.5, 0.0, 0.5],
        2 => &[1.0, -2.0, 1.0],
        3 => &[-0.5, 1.0, 0.0, -1.0, 0.5],
        4 => &[1.0, -4.0, 6.0, -4.0, 1.0],
        _ => unreachable!(),
    }
}

/// Tensor-product central difference of `∂^α f` with step `h`; error `O(h²)`
/// with an even expansion in `h`.
fn central(f: BatteryFn<f64>, p: &[f64], alpha: &[usize], h: f64) -> f64 {
    fn rec(f: BatteryFn<f64>, p: &mut Vec<f64>, alpha: &[usize], h: f64, var: usize) -> f64 {
        if var == alpha.len() {
            return f(p);
        }
        let w = stencil(alpha[var]);
        let m = (w.len() / 2) as f64;
        let x0 = p[var];
        let mut acc = 0.0;
        for (i, &wi) in w.iter().enumerate() {
            if wi != 0.0 {
                p[var] = x0 + (i as f64 - m) * h;
                acc += wi * rec(f, p, alpha, h, var + 1);
            }
        }
        p[var] = x0;
        acc / h.powi(alpha[var] as i32)
    }
    rec(f, &mut p.to_vec(), alpha, h, 0)
}

/// Two Richardson steps on steps `h, h/2, h/4`.
fn richardson(f: BatteryFn<f64>, p: &[f64], alpha: &[usize], h: f64) -> f64 {
    let d1 = central(f, p, alpha, h);
    let d2 = central(f, p, alpha, h / 2.0);
    let d4 = central(f, p, alpha, h / 4.0);
    let r1 = (4.0 * d2 - d1) / 3.0;
    let r2 = (4.0 * d4 - d2) / 3.0;
    (16.0 * r2 - r1) / 15.0
}

fn multi_indices(dims: usize, max: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for _ in 0..dims {
        out = out
            .into_iter()
            .flat_map(|a: Vec<usize>| (0..=max).map(move |k| [a.clone(), vec![k]].concat()))
            .collect();
    }
    out.retain(|a| a.iter().sum::<usize>() <= max);
    out
}

struct Outcome {
    pass: bool,
    summary: String,
}

fn criterion_jets() -> Outcome {
    let mut worst = (0.0f64, String::new());
    let mut count = 0;
    for case in battery() {
        let dims = case.point.len();
        let seeds = seed_variables(case.point, JetBudget::new(dims, 4)).unwrap();
        let jet = (case.jet)(&seeds);
        for alpha in multi_indices(dims, 4) {
            let exact = jet.partial(&MultiIndex::new(&alpha).unwrap()).unwrap();
            let fd = richardson(case.float, case.point, &alpha, 0.06);
            let rel = (fd - exact).abs() / exact.abs().max(1.0);
            count += 1;
            if !(rel <= worst.0) {
                worst = (rel, format!("{} ∂^{alpha:?}", case.name));
            }
        }
    }
    Outcome {
        pass: worst.0 < 1e-6,
        summary: format!("{count} partials, worst relative error {:.2e} at {}", worst.0, worst.1),
    }
}

fn run(config: &ScenarioConfig) -> VerificationReport {
    run_scenario(config).unwrap_or_else(|e| panic!("{}: {e}", config.scenario))
}

fn failing(report: &VerificationReport) -> Vec<String> {
    report
        .checks
        .iter()
        .filter(|c| !c.pass)
        .map(|c| format!("{}: {} = {:.3e} vs {:.1e}", report.scenario, c.name, c.residual, c.tolerance))
        .collect()
}

fn worst(report: &VerificationReport, name: &str) -> f64 {
    report.check(name).map_or(f64::NAN, |c| c.residual)
}

fn criterion_sanity() -> Outcome {
    let r = run(&default_config("cylinder-sanity").unwrap());
    let fails = failing(&r);
    Outcome {
        pass: r.pass,
        summary: if fails.is_empty() {
            format!(
                "cylinder ν=1 |H−1/2| {:.1e}; plane ν=2; sphere ν=0 |H−1| {:.1e}",
                worst(&r, "cylinder/mean_curvature"),
                worst(&r, "sphere/mean_curvature")
            )
        } else {
            fails.join("; ")
        },
    }
}

fn minimal_config(name: &str, kind: &str, phi: f64) -> ScenarioConfig {
    let mut c = default_config(name).unwrap();
    c.surface = Some(SurfaceSpec {
        kind: kind.into(),
        params: Default::default(),
    });
    c.phi = Some(phi);
    c
}

fn criterion_prop_ricci() -> Outcome {
    let mut fails = Vec::new();
    let mut band = (f64::MAX, f64::MIN);
    let mut iso = 0.0f64;
    let mut h = 0.0f64;
    for kind in ["enneper", "catenoid"] {
        for phi in [FRAC_PI_6, FRAC_PI_3] {
            let mut c = minimal_config("prop-ricci", kind, phi);
            c.set_tolerance("first_ellipse=0.45").unwrap();
            c.set_tolerance("first_ellipse_oracle=0.05").unwrap();
            let r = run(&c);
            fails.extend(failing(&r));
            let lo = worst(&r, "first_ellipse");
            let dev = worst(&r, "first_ellipse_oracle");
            band = (band.0.min(lo), band.1.max(0.5 + dev));
            iso = iso.max(worst(&r, "second_ellipse"));
            h = h.max(worst(&r, "minimality"));
        }
    }
    Outcome {
        pass: fails.is_empty(),
        summary: if fails.is_empty() {
            format!(
                "4 runs at 21x21: H/scale ≤ {h:.1e}, first defect in [{:.6}, {:.6}], second isotropy ≤ {iso:.1e}",
                band.0, band.1
            )
        } else {
            fails.join("; ")
        },
    }
}

fn criterion_bipolar() -> Outcome {
    let mut fails = Vec::new();
    let mut parts = Vec::new();
    for (kind, phi) in [("enneper", FRAC_PI_6), ("catenoid", FRAC_PI_3)] {
        let r = run(&minimal_config("bipolar-full", kind, phi));
        fails.extend(failing(&r));
        let g = &r.grids[0];
        let max = r.checks.iter().fold(0.0f64, |m, c| m.max(c.residual));
        parts.push(format!("{kind}: {} points ({} excluded), worst residual {max:.1e}", g.evaluated, g.excluded));
    }
    Outcome {
        pass: fails.is_empty(),
        summary: if fails.is_empty() { parts.join("; ") } else { fails.join("; ") },
    }
}

fn criterion_composition() -> Outcome {
    let r = run(&default_config("composition").unwrap());
    let fails = failing(&r);
    Outcome {
        pass: r.pass,
        summary: if fails.is_empty() {
            format!(
                "9 compositions at 15x15: identity {:.1e}, gradient {:.1e}",
                worst(&r, "composition_identity"),
                worst(&r, "gradient_identity")
            )
        } else {
            fails.join("; ")
        },
    }
}

fn criterion_delaunay() -> Outcome {
    let r = run(&default_config("delaunay").unwrap());
    let fails = failing(&r);
    let height = r
        .informational
        .iter()
        .find(|m| m.name == "height_axis_reading")
        .map_or(f64::NAN, |m| m.value);
    Outcome {
        pass: r.pass && height.is_finite(),
        summary: if fails.is_empty() {
            format!(
                "ODE residual {:.1e}; first-axis reading spread {:.1e}; height-axis reading spread {height:.2e} reported",
                worst(&r, "ode_residual"),
                worst(&r, "mean_curvature_spread")
            )
        } else {
            fails.join("; ")
        },
    }
}

fn criterion_determinism() -> Outcome {
    let mut mismatched = Vec::new();
    for info in nullitylab::verify::list_scenarios() {
        let mut c = default_config(info.name).unwrap();
        c.seed = 2024;
        c.grid.jitter = Some(0.2);
        let a = run(&c).to_json();
        let b = run(&c).to_json();
        if a != b {
            mismatched.push(info.name);
        }
    }
    Outcome {
        pass: mismatched.is_empty(),
        summary: if mismatched.is_empty() {
            "all scenarios byte-identical across reruns with seed 2024 and jitter".into()
        } else {
            format!("reports differ for {}", mismatched.join(", "))
        },
    }
}

fn main() -> ExitCode {
    let criteria: [(&str, Duration, fn() -> Outcome); 7] = [
        ("1 jet engine vs Richardson differences", Duration::from_secs(10), criterion_jets),
        ("2 classical sanity", Duration::from_secs(60), criterion_sanity),
        ("3 prop-ricci", Duration::from_secs(60), criterion_prop_ricci),
        ("4 bipolar-full", Duration::from_secs(180), criterion_bipolar),
        ("5 composition", Duration::from_secs(30), criterion_composition),
        ("6 delaunay", Duration::from_secs(60), criterion_delaunay),
        ("7 determinism", Duration::from_secs(600), criterion_determinism),
    ];
    let mut all = true;
    for (name, budget, f) in criteria {
        let t = Instant::now();
        let out = f();
        let elapsed = t.elapsed();
        let pass = out.pass && elapsed <= budget;
        all &= pass;
        println!(
            "criterion {name}: {} ({:.2} s of {} s) {}",
            if pass { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64(),
            budget.as_secs(),
            out.summary
        );
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
