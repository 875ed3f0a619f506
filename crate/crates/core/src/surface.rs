//! Pointwise evaluation of the transformed surface and its closed-form
//! differential-geometric data.
//!
//! The base surface is the unit cylinder `X = (cos u2, sin u2, u1)` with the
//! flat metric and principal curvatures `0` and `-1` in the convention
//! `dN(e_i) = lambda_i e_i` (inner normal). The transformed immersion is
//!
//! ```text
//! X~ = X - (2 / M) (f' X_1 + g' X_2 - g N),      M = 2 b + c (f - g),
//! ```
//!
//! defined where `f + g != 0`, with unit normal
//!
//! ```text
//! N~ = N + (2 g / (M (f + g))) (f' X_1 + g' X_2 - g N).
//! ```
//!
//! The `+` sign is forced: it is the unique choice with `|N~| = 1`, and the
//! only one satisfying the sphere-congruence identity
//! `X + h N = X~ + h N~` for the radius function `h = (f + g) / g`.

use nalgebra::Vector3;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::family::ProfilePair;

/// Masking tolerances for the two excluded sets: the domain boundary
/// `f + g = 0` and the metric singularities `M = 0`. Absolute, since the
/// profile data is O(1) for the families of interest.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MaskTolerances {
    pub domain: f64,
    pub singular: f64,
}

impl Default for MaskTolerances {
    fn default() -> Self {
        Self { domain: 1e-8, singular: 1e-8 }
    }
}

/// Cylinder position and adapted frame at a parameter point.
#[derive(Debug, Clone, Copy)]
pub struct CylinderFrame {
    pub position: Vector3<f64>,
    /// d/du1 of the position (unit).
    pub x1: Vector3<f64>,
    /// d/du2 of the position (unit).
    pub x2: Vector3<f64>,
    /// Inner unit normal.
    pub normal: Vector3<f64>,
}

/// Frame of the base cylinder `(cos u2, sin u2, u1)`.
pub fn cylinder_frame(u1: f64, u2: f64) -> CylinderFrame {
    let (s, c) = u2.sin_cos();
    CylinderFrame {
        position: Vector3::new(c, s, u1),
        x1: Vector3::new(0.0, 0.0, 1.0),
        x2: Vector3::new(-s, c, 0.0),
        normal: Vector3::new(-c, -s, 0.0),
    }
}

/// Why numeric fields of a sample are invalid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PointFlags {
    pub ok: bool,
    /// `|f + g|` below the domain tolerance.
    pub near_domain_boundary: bool,
    /// `|M|` below the singularity tolerance.
    pub near_singular: bool,
}

/// Full geometric state at one parameter point. When the point is masked the
/// geometric fields are NaN-tagged and `flags` records why; `fg_sum` and `m`
/// stay finite (the profiles are entire).
#[derive(Debug, Clone, Copy)]
pub struct SurfacePoint {
    pub u: (f64, f64),
    pub position: Vector3<f64>,
    pub normal: Vector3<f64>,
    /// Conformal factor of the induced metric `psi^2 (du1^2 + du2^2)`.
    pub psi: f64,
    pub lambda1: f64,
    pub lambda2: f64,
    /// Mean curvature `(lambda1 + lambda2) / 2 = -1/2 - b / (c (f + g))`.
    pub h: f64,
    /// Skew curvature `(M - 2 b) / (M psi^2) = lambda1 - lambda2`.
    pub h_skew: f64,
    /// Gaussian curvature `lambda1 * lambda2`.
    pub k: f64,
    /// `M = 2 b + c (f - g)`.
    pub m: f64,
    /// `f + g`.
    pub fg_sum: f64,
    pub flags: PointFlags,
}

impl SurfacePoint {
    pub fn is_masked(&self) -> bool {
        !self.flags.ok
    }
}

/// Evaluate the transformed surface at `(u1, u2)`.
///
/// Masking happens first: points with `|f + g| < tol.domain` or
/// `|M| < tol.singular` come back flagged with NaN geometry instead of
/// raising, so grid sweeps are total.
pub fn eval_surface_point(pair: &ProfilePair, u1: f64, u2: f64, tol: MaskTolerances) -> SurfacePoint {
    let params = pair.params();
    let (b, c) = (params.b(), params.c());
    let v = pair.eval(u1, u2);
    let fg = v.f + v.g;
    let m = 2.0 * b + c * (v.f - v.g);
    let near_domain_boundary = fg.abs() < tol.domain;
    let near_singular = m.abs() < tol.singular;
    let flags = PointFlags { ok: !(near_domain_boundary || near_singular), near_domain_boundary, near_singular };
    if !flags.ok {
        let nan = f64::NAN;
        let vnan = Vector3::new(nan, nan, nan);
        return SurfacePoint {
            u: (u1, u2),
            position: vnan,
            normal: vnan,
            psi: nan,
            lambda1: nan,
            lambda2: nan,
            h: nan,
            h_skew: nan,
            k: nan,
            m,
            fg_sum: fg,
            flags,
        };
    }

    let frame = cylinder_frame(u1, u2);
    let transversal = v.f1 * frame.x1 + v.g1 * frame.x2 - v.g * frame.normal;
    let position = frame.position - (2.0 / m) * transversal;
    let normal = frame.normal + (2.0 * v.g / (m * fg)) * transversal;
    let psi = (c * fg).abs() / m.abs();
    let denom = c * fg * fg;
    let lambda1 = -2.0 * v.g * (b + c * v.f) / denom;
    let lambda2 = (-c * v.f * v.f - 2.0 * b * v.f - c * v.g * v.g) / denom;
    let h = -0.5 - b / (c * fg);
    let h_skew = (m - 2.0 * b) / (m * psi * psi);

    SurfacePoint {
        u: (u1, u2),
        position,
        normal,
        psi,
        lambda1,
        lambda2,
        h,
        h_skew,
        k: lambda1 * lambda2,
        m,
        fg_sum: fg,
        flags,
    }
}

/// Scalar data of the two-step evaluation route.
#[derive(Debug, Clone, Copy)]
pub struct RibaucourIntermediates {
    /// `Omega = f + g`.
    pub omega: f64,
    /// `Omega_1 = f'`.
    pub omega1: f64,
    /// `Omega_2 = g'`.
    pub omega2: f64,
    /// `W = g`.
    pub w: f64,
    /// `S = Omega_1^2 + Omega_2^2 + W^2`; equals `(f + g) M` on families
    /// satisfying the first integral.
    pub s: f64,
    pub t1: f64,
    pub t2: f64,
}

/// Result of the generic (non-specialized) evaluation route.
#[derive(Debug, Clone, Copy)]
pub struct GeneralEval {
    pub position: Vector3<f64>,
    pub lambda1: f64,
    pub lambda2: f64,
    pub intermediates: RibaucourIntermediates,
}

/// Evaluate position and principal curvatures through the generic transform
/// formulas
///
/// ```text
/// X~ = X - (2 Omega / S) (Omega_1 e_1 + Omega_2 e_2 - W N),
/// lambda~_i = (W T_i + lambda_i S) / (S - Omega T_i),
/// ```
///
/// with `T_1 = 2 f''` and `T_2 = 2 (g'' + g)` on the cylinder's flat frame.
/// Independent of [`eval_surface_point`]'s algebra (it divides by `S` and
/// `S - Omega T_i` rather than `M`), which makes it a cross-check route.
pub fn eval_via_general_ribaucour(
    pair: &ProfilePair,
    u1: f64,
    u2: f64,
    tol: MaskTolerances,
) -> Result<GeneralEval> {
    let v = pair.eval(u1, u2);
    let fg = v.f + v.g;
    let m = pair.big_m(u1, u2);
    if fg.abs() < tol.domain {
        return Err(Error::MaskedPoint { u1, u2, reason: "f + g vanishes" });
    }
    if m.abs() < tol.singular {
        return Err(Error::MaskedPoint { u1, u2, reason: "M vanishes" });
    }

    let (omega, omega1, omega2, w) = (fg, v.f1, v.g1, v.g);
    let s = omega1 * omega1 + omega2 * omega2 + w * w;
    let t1 = 2.0 * v.f2;
    let t2 = 2.0 * (v.g2 + v.g);
    if s.abs() < 1e-14 {
        return Err(Error::DegenerateDenominator { name: "S", value: s, u1, u2 });
    }

    let frame = cylinder_frame(u1, u2);
    let transversal = omega1 * frame.x1 + omega2 * frame.x2 - w * frame.normal;
    let position = frame.position - (2.0 * omega / s) * transversal;

    // Base principal curvatures of the cylinder: lambda_1 = 0, lambda_2 = -1.
    let mut lambdas = [0.0; 2];
    for (i, (t_i, lambda_base)) in [(t1, 0.0), (t2, -1.0)].into_iter().enumerate() {
        let denom = s - omega * t_i;
        if denom.abs() < 1e-14 {
            let name = if i == 0 { "S - Omega T1" } else { "S - Omega T2" };
            return Err(Error::DegenerateDenominator { name, value: denom, u1, u2 });
        }
        lambdas[i] = (w * t_i + lambda_base * s) / denom;
    }

    Ok(GeneralEval {
        position,
        lambda1: lambdas[0],
        lambda2: lambdas[1],
        intermediates: RibaucourIntermediates { omega, omega1, omega2, w, s, t1, t2 },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::{Coefficients, FamilyParams};
    use crate::quasi;

    fn sqrt6() -> f64 {
        6.0_f64.sqrt()
    }

    fn two_bubble_inside() -> FamilyParams {
        FamilyParams::new(4.0 * sqrt6(), 3.0, Coefficients::Normalized { a1: 4.0, b1: 1.0 }).unwrap()
    }

    #[test]
    fn cylinder_frame_examples() {
        let fr = cylinder_frame(0.0, 0.0);
        assert_eq!(fr.position, Vector3::new(1.0, 0.0, 0.0));
        assert_eq!(fr.normal, Vector3::new(-1.0, 0.0, 0.0));
        let fr = cylinder_frame(0.0, std::f64::consts::FRAC_PI_2);
        assert!((fr.position - Vector3::new(0.0, 1.0, 0.0)).norm() < 1e-15);
        assert!((fr.x2 - Vector3::new(-1.0, 0.0, 0.0)).norm() < 1e-15);
        let fr = cylinder_frame(5.0, std::f64::consts::PI);
        assert!((fr.position - Vector3::new(-1.0, 0.0, 5.0)).norm() < 1e-15);
        assert!((fr.normal - Vector3::new(1.0, 0.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn cylinder_frame_is_orthonormal() {
        for (u1, u2) in quasi::window_points((-5.0, 5.0, 0.0, 7.0), 50) {
            let fr = cylinder_frame(u1, u2);
            assert!((fr.x1.norm() - 1.0).abs() < 1e-15);
            assert!((fr.x2.norm() - 1.0).abs() < 1e-15);
            assert!((fr.normal.norm() - 1.0).abs() < 1e-15);
            assert!(fr.x1.dot(&fr.x2).abs() < 1e-15);
            assert!(fr.x1.dot(&fr.normal).abs() < 1e-15);
            assert!(fr.x2.dot(&fr.normal).abs() < 1e-15);
        }
    }

    #[test]
    fn surface_point_frozen_values_at_origin() {
        let pair = two_bubble_inside().profiles();
        let p = eval_surface_point(&pair, 0.0, 0.0, MaskTolerances::default());
        assert!(p.flags.ok);
        assert!((p.m - 8.4494897427831788).abs() < 1e-13);
        assert!((p.position.x - 0.42020410288672883).abs() < 1e-13);
        assert!((p.position.y - -0.47340136762890955).abs() < 1e-13);
        assert!(p.position.z.abs() < 1e-15);
        assert!((p.psi - 0.42020410288672877).abs() < 1e-13);
        assert!((p.h - -3.2595917942265422).abs() < 1e-12);
        assert!((p.lambda1 - -6.9951427678757367).abs() < 1e-12);
        assert!((p.lambda2 - 0.47595917942265414).abs() < 1e-13);
        assert!((0.5 * (p.lambda1 + p.lambda2) - p.h).abs() < 1e-12 * p.h.abs());
    }

    #[test]
    fn cmc_family_has_constant_mean_curvature() {
        let p = FamilyParams::new(0.0, 3.0, Coefficients::Normalized { a1: 4.0, b1: 3.0 }).unwrap();
        let pair = p.profiles();
        for (u1, u2) in quasi::window_points((-3.0, 3.0, -3.0, 3.0), 200) {
            let sp = eval_surface_point(&pair, u1, u2, MaskTolerances::default());
            if sp.flags.ok {
                assert_eq!(sp.h, -0.5);
            }
        }
    }

    #[test]
    fn normal_is_unit_and_curvature_identities_hold() {
        let pair = two_bubble_inside().profiles();
        for (u1, u2) in quasi::window_points((-3.0, 3.0, -3.0, 3.0), 1000) {
            let p = eval_surface_point(&pair, u1, u2, MaskTolerances::default());
            if !p.flags.ok {
                continue;
            }
            assert!((p.normal.norm() - 1.0).abs() < 1e-12);
            let h_gap = (p.h - 0.5 * (p.lambda1 + p.lambda2)).abs();
            assert!(h_gap <= 1e-12 * p.h.abs().max(1.0));
            let skew_gap = (p.h_skew - (p.lambda1 - p.lambda2)).abs();
            assert!(skew_gap <= 1e-12 * p.h_skew.abs().max(1.0));
        }
    }

    #[test]
    fn masked_points_are_nan_tagged_with_flags() {
        // Singular member of the c = 3 branch: M vanishes at (0, pi/4).
        let p = FamilyParams::new(0.0, 3.0, Coefficients::SingularNormalized { epsilon1: 1 }).unwrap();
        let pair = p.profiles();
        let sp = eval_surface_point(&pair, 0.0, std::f64::consts::FRAC_PI_4, MaskTolerances::default());
        assert!(!sp.flags.ok && sp.flags.near_singular);
        assert!(sp.position.x.is_nan() && sp.psi.is_nan() && sp.k.is_nan());
        assert!(sp.m.abs() < 1e-12);
    }

    #[test]
    fn sum_of_squares_equals_fg_times_m() {
        let pair = two_bubble_inside().profiles();
        let p = eval_via_general_ribaucour(&pair, 0.0, 0.0, MaskTolerances::default()).unwrap();
        assert!((p.intermediates.s - 10.0).abs() < 1e-13);
        let m = pair.big_m(0.0, 0.0);
        assert!((p.intermediates.s - p.intermediates.omega * m).abs() < 1e-12);
    }

    #[test]
    fn general_route_agrees_with_specialized_route() {
        let fams = [
            two_bubble_inside(),
            FamilyParams::new(0.0, 3.0, Coefficients::Normalized { a1: 4.0, b1: 3.0 }).unwrap(),
            FamilyParams::new(2.0, -1.0, Coefficients::Normalized { a1: 1.0, b1: -0.75 }).unwrap(),
        ];
        for fam in fams {
            let pair = fam.profiles();
            for (u1, u2) in quasi::window_points((-2.0, 2.0, -2.0, 2.0), 200) {
                let a = eval_surface_point(&pair, u1, u2, MaskTolerances::default());
                if !a.flags.ok {
                    continue;
                }
                let b = eval_via_general_ribaucour(&pair, u1, u2, MaskTolerances::default()).unwrap();
                assert!((a.position - b.position).amax() < 1e-12);
                assert!((a.lambda1 - b.lambda1).abs() <= 1e-10 * a.lambda1.abs().max(1.0));
                assert!((a.lambda2 - b.lambda2).abs() <= 1e-10 * a.lambda2.abs().max(1.0));
            }
        }
    }

    #[test]
    fn sphere_congruence_holds() {
        let pair = two_bubble_inside().profiles();
        let tol = MaskTolerances::default();
        for (u1, u2) in quasi::window_points((-3.0, 3.0, -3.0, 3.0), 500) {
            let p = eval_surface_point(&pair, u1, u2, tol);
            let v = pair.eval(u1, u2);
            if !p.flags.ok || v.g.abs() < tol.domain {
                continue;
            }
            let radius = p.fg_sum / v.g;
            let frame = cylinder_frame(u1, u2);
            let lhs = frame.position + radius * frame.normal;
            let rhs = p.position + radius * p.normal;
            let scale = lhs.amax().max(1.0);
            assert!((lhs - rhs).amax() <= 1e-10 * scale, "gap at ({u1}, {u2})");
        }
    }
}
