//! Acceptance suite: the project's verification contract, one test per
//! criterion, each printing a single pass/fail line (visible under
//! `cargo test --test acceptance -- --nocapture`).
//!
//! Tolerances are pinned here, not configurable: closed forms are exact, so
//! the only slack absorbed is floating-point entry of irrational parameters
//! and the truncation of second-order finite-difference stencils.

use isothermic::{
    audit_points, count_bubbles, eval_surface_point, export_csv_table, fd_first_fundamental,
    fd_shape_operator, identity_suite, length_probe, make_field, residual_convergence_order,
    sample_grid, sample_grid_parallel, singular_points, BaseCylinder, Coefficients, FamilyParams,
    FieldKind, GridSpec, MaskTolerances, TransformedSurface, Window,
};

fn sqrt(v: f64) -> f64 {
    v.sqrt()
}

struct Family {
    label: &'static str,
    params: FamilyParams,
}

fn fam(label: &'static str, b: f64, c: f64, coeffs: Coefficients) -> Family {
    Family {
        label,
        params: FamilyParams::new(b, c, coeffs).unwrap_or_else(|e| panic!("{label}: {e}")),
    }
}

/// The nine parameter sets behind the documented 3-D renderings: six
/// two-parameter members plus the three singular one-parameter members.
fn figure_families() -> Vec<Family> {
    vec![
        fam("c3-inside", 4.0 * sqrt(6.0), 3.0, Coefficients::Normalized { a1: 4.0, b1: 1.0 }),
        fam("c3-outside", -4.0 * sqrt(6.0), 3.0, Coefficients::Normalized { a1: 4.0, b1: 1.0 }),
        fam(
            "nested",
            12.0 * sqrt(73.0) / 125.0,
            -16.0 / 25.0,
            Coefficients::Normalized { a1: 4.0, b1: 1.0 },
        ),
        fam(
            "low-outside",
            4.0 * sqrt(5.0) / 3.0,
            -5.0,
            Coefficients::Normalized { a1: 1.0 / 9.0, b1: 0.25 },
        ),
        fam(
            "low-inside",
            -4.0 * sqrt(5.0) / 3.0,
            -5.0,
            Coefficients::Normalized { a1: 1.0 / 9.0, b1: 0.25 },
        ),
        fam("vertical", 2.0, -1.0, Coefficients::Normalized { a1: 1.0, b1: -0.75 }),
        fam("singular-c3", 0.0, 3.0, Coefficients::SingularNormalized { epsilon1: 1 }),
        fam("singular-mid", 0.0, -16.0 / 25.0, Coefficients::SingularNormalized { epsilon1: 1 }),
        fam("singular-low", 0.0, -5.0, Coefficients::SingularNormalized { epsilon1: 1 }),
    ]
}

fn report(criterion: &str, pass: bool, detail: &str) {
    println!("ACCEPTANCE {} {criterion}: {detail}", if pass { "PASS" } else { "FAIL" });
    assert!(pass, "{criterion}: {detail}");
}

const WINDOW: Window = Window { u1_min: -5.0, u1_max: 5.0, u2_min: -5.0, u2_max: 5.0 };
const TOL: MaskTolerances = MaskTolerances { domain: 1e-8, singular: 1e-8 };

/// First-integral conservation: scaled |E| at 1000 unmasked low-discrepancy
/// points per family stays below 1e-9.
#[test]
fn first_integral_suite() {
    let mut worst: f64 = 0.0;
    let mut worst_label = "";
    for family in figure_families() {
        let report = identity_suite(&family.params.profiles(), 1000, &WINDOW, TOL);
        assert_eq!(report.evaluated, 1000, "{}", family.label);
        let gap = report.check("first_integral").unwrap().max_gap;
        if gap > worst {
            worst = gap;
            worst_label = family.label;
        }
    }
    report(
        "first-integral suite",
        worst <= 1e-9,
        &format!("max scaled |E| = {worst:.3e} (worst family: {worst_label}, bound 1e-9)"),
    );
}

/// Pointwise identity suite at 1e-10: sum-of-squares vs (f+g)M, mean and
/// skew curvature versus principal curvatures, sphere congruence.
#[test]
fn identity_suite_criterion() {
    let mut worst: f64 = 0.0;
    let mut worst_detail = String::new();
    for family in figure_families() {
        let rep = identity_suite(&family.params.profiles(), 1000, &WINDOW, TOL);
        assert_eq!(rep.evaluated, 1000, "{}", family.label);
        for check in &rep.checks {
            if check.name == "first_integral" {
                continue; // covered by its own criterion at 1e-9
            }
            if check.max_gap > worst {
                worst = check.max_gap;
                worst_detail = format!("{} on {}", check.name, family.label);
            }
        }
    }
    report(
        "identity suite",
        worst <= 1e-10,
        &format!("max scaled gap = {worst:.3e} ({worst_detail}, bound 1e-10)"),
    );
}

/// Conformality of the induced metric: |E - G| / max(E, G) and |F| / E from
/// centered differences stay below 1e-4 at h = 1e-3 and the E-G gap shrinks
/// by about 4 when h halves.
#[test]
fn conformality_criterion() {
    let mut all_pass = true;
    let mut detail = String::new();
    for family in figure_families() {
        let pair = family.params.profiles();
        let surface = TransformedSurface::new(pair, TOL);
        let pts = audit_points(&pair, &WINDOW, 100, 0.3, 0.3);
        assert_eq!(pts.len(), 100, "{}", family.label);
        let max_gaps = |h: f64| {
            let mut eg: f64 = 0.0;
            let mut fe: f64 = 0.0;
            for &(u1, u2) in &pts {
                let ff = fd_first_fundamental(&surface, u1, u2, h).unwrap();
                eg = eg.max((ff.e - ff.g).abs() / ff.e.max(ff.g));
                fe = fe.max(ff.f.abs() / ff.e);
            }
            (eg, fe)
        };
        let (eg_h, fe_h) = max_gaps(1e-3);
        let (eg_h2, fe_h2) = max_gaps(5e-4);
        let ratio = eg_h / eg_h2;
        let ok = eg_h <= 1e-4 && fe_h <= 1e-4 && eg_h2 <= 1e-4 && fe_h2 <= 1e-4 && (3.0..=5.0).contains(&ratio);
        if !ok {
            all_pass = false;
            detail = format!(
                "{}: |E-G|/max = {eg_h:.2e} -> {eg_h2:.2e} (ratio {ratio:.2}), |F|/E = {fe_h:.2e}",
                family.label
            );
        }
    }
    if detail.is_empty() {
        detail = "all families within 1e-4 at h = 1e-3, gap ratio in [3, 5] at h/2".into();
    }
    report("conformality", all_pass, &detail);
}

/// Finite-difference shape operator matches the closed-form principal
/// curvatures within 1e-3 at h = 1e-3 on O(1)-curvature points, converging
/// at second order; the cylinder calibration case is exact to 1e-6.
#[test]
fn shape_operator_criterion() {
    let calib = fd_shape_operator(&BaseCylinder, 0.0, 0.0, 1e-3).unwrap();
    let calib_ok = calib.k1.abs() <= 1e-6 && (calib.k2 + 1.0).abs() <= 1e-6;

    let mut all_pass = calib_ok;
    let mut detail = format!("cylinder calibration ({:.1e}, {:.6})", calib.k1, calib.k2);
    for family in figure_families() {
        let pair = family.params.profiles();
        let surface = TransformedSurface::new(pair, TOL);
        let pts: Vec<(f64, f64)> = audit_points(&pair, &WINDOW, 400, 0.3, 0.3)
            .into_iter()
            .filter(|&(u1, u2)| {
                let p = eval_surface_point(&pair, u1, u2, TOL);
                p.lambda1.abs() <= 10.0 && p.lambda2.abs() <= 10.0
            })
            .take(100)
            .collect();
        assert!(pts.len() >= 50, "{}: only {} O(1)-curvature points", family.label, pts.len());
        let max_gap = |h: f64| {
            let mut gap: f64 = 0.0;
            for &(u1, u2) in &pts {
                let p = eval_surface_point(&pair, u1, u2, TOL);
                let est = fd_shape_operator(&surface, u1, u2, h).unwrap();
                gap = gap.max((est.k1 - p.lambda1).abs()).max((est.k2 - p.lambda2).abs());
            }
            gap
        };
        let g_h = max_gap(1e-3);
        let g_h2 = max_gap(5e-4);
        let ratio = g_h / g_h2;
        let ok = g_h <= 1e-3 && (3.0..=5.0).contains(&ratio);
        if !ok {
            all_pass = false;
            detail = format!("{}: max |k - lambda| = {g_h:.2e} at h = 1e-3, ratio {ratio:.2}", family.label);
        }
    }
    if all_pass {
        detail.push_str("; all families within 1e-3 at h = 1e-3 with order-2 decay");
    }
    report("shape operator", all_pass, &detail);
}

/// Calapso residual: both closed-form fields converge at order ~2 on a
/// documented patch for each example family; the doubled field is a
/// negative control with order <= 0.5.
#[test]
fn calapso_residual_criterion() {
    let steps = [0.04, 0.02, 0.01];
    // (family, omega patch, capital-omega patch); patches sit away from the
    // masked sets and the fields' zero lines.
    let cases: Vec<(Family, Window, Window)> = vec![
        (
            fam("c3-inside", 4.0 * sqrt(6.0), 3.0, Coefficients::Normalized { a1: 4.0, b1: 1.0 }),
            Window::new(0.5, 1.5, 0.5, 1.5),
            Window::new(1.2, 2.2, 0.5, 1.5),
        ),
        (
            fam("c3-outside", -4.0 * sqrt(6.0), 3.0, Coefficients::Normalized { a1: 4.0, b1: 1.0 }),
            Window::new(1.4, 2.4, 0.5, 1.5),
            Window::new(0.5, 1.5, 0.5, 1.5),
        ),
        (
            fam("nested", 12.0 * sqrt(73.0) / 125.0, -16.0 / 25.0, Coefficients::Normalized { a1: 4.0, b1: 1.0 }),
            Window::new(3.0, 4.0, 3.0, 4.0),
            Window::new(3.0, 4.0, 3.0, 4.0),
        ),
        (
            fam("low-outside", 4.0 * sqrt(5.0) / 3.0, -5.0, Coefficients::Normalized { a1: 1.0 / 9.0, b1: 0.25 }),
            Window::new(0.2, 1.2, 1.2, 2.2),
            Window::new(0.2, 1.2, 1.2, 2.2),
        ),
        (
            fam("vertical", 2.0, -1.0, Coefficients::Normalized { a1: 1.0, b1: -0.75 }),
            Window::new(0.2, 1.2, 0.0, 1.0),
            Window::new(0.2, 1.2, 0.0, 1.0),
        ),
        (
            fam("singular-c3", 0.0, 3.0, Coefficients::SingularNormalized { epsilon1: 1 }),
            Window::new(1.0, 2.0, 0.5, 1.5),
            Window::new(0.8, 1.8, 0.5, 1.5),
        ),
        (
            fam("singular-mid", 0.0, -16.0 / 25.0, Coefficients::SingularNormalized { epsilon1: 1 }),
            Window::new(3.0, 4.0, 3.0, 4.0),
            Window::new(3.0, 4.0, 3.0, 4.0),
        ),
        (
            fam("singular-low", 0.0, -5.0, Coefficients::SingularNormalized { epsilon1: 1 }),
            Window::new(0.2, 1.2, 1.0, 2.0),
            Window::new(0.2, 1.2, 1.0, 2.0),
        ),
    ];
    let mut all_pass = true;
    let mut detail = String::new();
    for (family, omega_patch, capital_patch) in &cases {
        let omega = make_field(&family.params, FieldKind::Omega, TOL).unwrap();
        let capital = make_field(&family.params, FieldKind::CapitalOmega, TOL).unwrap();
        let order_om = residual_convergence_order(&omega, omega_patch, &steps).unwrap();
        let order_cap = residual_convergence_order(&capital, capital_patch, &steps).unwrap();
        let control = make_field(&family.params, FieldKind::Omega, TOL).unwrap().scaled(2.0);
        let order_ctl = residual_convergence_order(&control, omega_patch, &steps).unwrap();
        let ok = (1.7..=2.3).contains(&order_om)
            && (1.7..=2.3).contains(&order_cap)
            && order_ctl <= 0.5;
        println!(
            "  calapso {}: omega order {order_om:.2} on {omega_patch:?}, capital order {order_cap:.2} on {capital_patch:?}, 2*omega control {order_ctl:.2}",
            family.label
        );
        if !ok {
            all_pass = false;
            detail = format!(
                "{}: orders omega {order_om:.2}, capital {order_cap:.2}, control {order_ctl:.2}",
                family.label
            );
        }
    }
    if detail.is_empty() {
        detail = "both fields order ~2 on documented patches, doubled field <= 0.5, all families".into();
    }
    report("calapso residual", all_pass, &detail);
}

/// Mean curvature: cmc members have H identically -1/2 (to 1e-14); the
/// reference two-bubble member has the frozen H value at the origin.
#[test]
fn mean_curvature_criterion() {
    let cmc = [
        fam("cmc-c3", 0.0, 3.0, Coefficients::Normalized { a1: 4.0, b1: 3.0 }),
        fam("cmc-low", 0.0, -5.0, Coefficients::Normalized { a1: 4.0, b1: 5.0 }),
    ];
    let mut worst: f64 = 0.0;
    for family in cmc {
        let pair = family.params.profiles();
        for (u1, u2) in isothermic::quasi::window_points(WINDOW.as_tuple(), 1000) {
            let p = eval_surface_point(&pair, u1, u2, TOL);
            if p.flags.ok {
                worst = worst.max((p.h + 0.5).abs());
            }
        }
    }
    let pair = fam("c3-inside", 4.0 * sqrt(6.0), 3.0, Coefficients::Normalized { a1: 4.0, b1: 1.0 })
        .params
        .profiles();
    let h0 = eval_surface_point(&pair, 0.0, 0.0, TOL).h;
    let expect = -(13.0 + 8.0 * sqrt(6.0)) / 10.0;
    let gap0 = (h0 - expect).abs();
    report(
        "mean curvature",
        worst <= 1e-14 && gap0 <= 1e-12,
        &format!("cmc |H + 1/2| max = {worst:.1e}; two-bubble H(0,0) gap = {gap0:.1e}"),
    );
}

/// Singular lattice and length divergence: the c = 3 lattice matches
/// (0, (4k+1) pi / 4) to 1e-12, and metric lengths toward one singular
/// point per family grow like (4 / |c|) / eps within 20%.
#[test]
fn singular_points_and_length_probes_criterion() {
    let pi = std::f64::consts::PI;
    // Lattice check for c = 3.
    let c3 = fam("singular-c3", 0.0, 3.0, Coefficients::SingularNormalized { epsilon1: 1 });
    let pts = singular_points(&c3.params, &Window::new(-1.0, 1.0, -10.0, 10.0));
    let expected: Vec<(f64, f64)> =
        (-4..=3).map(|k| (0.0, (4.0 * k as f64 + 1.0) * pi / 4.0)).filter(|p| p.1.abs() <= 10.0).collect();
    let mut lattice_ok = pts.len() == expected.len();
    if lattice_ok {
        for (a, b) in pts.iter().zip(&expected) {
            lattice_ok &= (a.0 - b.0).abs() <= 1e-12 && (a.1 - b.1).abs() <= 1e-12;
        }
    }

    // One probe per singular family: (family, p0, direction).
    let probes: Vec<(Family, (f64, f64), (f64, f64))> = vec![
        (
            fam("singular-c3", 0.0, 3.0, Coefficients::SingularNormalized { epsilon1: 1 }),
            (0.0, pi / 4.0),
            (0.0, -1.0),
        ),
        (
            fam("singular-mid", 0.0, -16.0 / 25.0, Coefficients::SingularNormalized { epsilon1: 1 }),
            (5.0 * pi / 8.0, -5.0 * pi / 6.0),
            (1.0, 0.0),
        ),
        (
            fam("singular-low", 0.0, -5.0, Coefficients::SingularNormalized { epsilon1: 1 }),
            (pi / (2.0 * sqrt(5.0)), 0.0),
            (0.0, 1.0),
        ),
        (
            fam("singular-neg1", 0.0, -1.0, Coefficients::SingularNormalized { epsilon1: 1 }),
            (pi / 2.0, 0.0),
            (0.0, 1.0),
        ),
    ];
    let mut probes_ok = true;
    let mut detail = String::new();
    for (family, p0, dir) in probes {
        let pair = family.params.profiles();
        let probe = length_probe(&pair, p0, dir, &[1e-3, 5e-4], 0.5, TOL).unwrap();
        let expect = 4.0 / family.params.c().abs();
        let consts = probe.per_epsilon_constants();
        let fitted = probe.fitted_constant();
        let ok = consts.iter().all(|c| (c - expect).abs() <= 0.2 * expect)
            && (fitted - expect).abs() <= 0.2 * expect
            && probe.lengths[1] > probe.lengths[0];
        println!(
            "  probe {}: L*eps = {:?}, fitted = {fitted:.4}, expected {expect:.4}",
            family.label, consts
        );
        if !ok {
            probes_ok = false;
            detail = format!("{}: fitted {fitted:.4} vs {expect:.4}", family.label);
        }
    }
    if detail.is_empty() {
        detail = format!(
            "c3 lattice {} points match to 1e-12; all four probes within 20% of 4/|c|",
            pts.len()
        );
    }
    report("singular points and length probes", lattice_ok && probes_ok, &detail);
}

/// Bubble counts: the Gaussian curvature has exactly one deep well per
/// bubble, so the strict-minimum count reproduces the 2-bubble structure of
/// both reference members per u2-revolution. Strict maxima genuinely
/// over-count (twin peaks straddle each bubble crest, and ridge maxima
/// flank the wells); the counts are pinned against an independent
/// finite-difference audit of the curvature landscape.
#[test]
fn bubble_count_criterion() {
    let window = Window::new(-2.0, 2.0, 0.0, std::f64::consts::TAU);
    let inside = fam("c3-inside", 4.0 * sqrt(6.0), 3.0, Coefficients::Normalized { a1: 4.0, b1: 1.0 });
    let outside = fam("c3-outside", -4.0 * sqrt(6.0), 3.0, Coefficients::Normalized { a1: 4.0, b1: 1.0 });
    let count_in = count_bubbles(&inside.params.profiles(), &window, 81, 161, TOL).unwrap();
    let count_out = count_bubbles(&outside.params.profiles(), &window, 81, 161, TOL).unwrap();
    let pass = count_in.n_min == 2 && count_out.n_min == 2 && count_in.n_max == 8 && count_out.n_max == 4;
    report(
        "bubble counts",
        pass,
        &format!(
            "n = 2 bubbles per revolution via K-minima (inside: {} minima / {} strict maxima, outside: {} / {})",
            count_in.n_min, count_in.n_max, count_out.n_min, count_out.n_max
        ),
    );
}

/// Determinism: row-parallel sampling writes byte-identical CSV to serial
/// sampling.
#[test]
fn parallel_determinism_criterion() {
    let family = fam("c3-inside", 4.0 * sqrt(6.0), 3.0, Coefficients::Normalized { a1: 4.0, b1: 1.0 });
    let pair = family.params.profiles();
    let grid = GridSpec::new(Window::new(-2.0, 2.0, 0.0, std::f64::consts::TAU), 64, 96, TOL).unwrap();
    let mut serial = Vec::new();
    export_csv_table(&sample_grid(&pair, &grid), &mut serial).unwrap();
    let mut parallel = Vec::new();
    export_csv_table(&sample_grid_parallel(&pair, &grid), &mut parallel).unwrap();
    report(
        "parallel determinism",
        serial == parallel,
        &format!("serial and parallel CSV identical ({} bytes)", serial.len()),
    );
}
