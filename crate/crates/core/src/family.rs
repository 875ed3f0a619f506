//! Surface-family parameters and the closed-form profile pair.
//!
//! A family member is determined by the transformation parameter `c != 0`,
//! the integration parameter `b`, and coefficients for the two profile
//! functions `f(u1)`, `g(u2)` solving
//!
//! ```text
//! f'' - c f = b,        g'' + (1 + c) g = b,
//! ```
//!
//! subject to the conserved first integral
//!
//! ```text
//! E = (f')^2 - c f^2 - 2 b f + (g')^2 + (1 + c) g^2 - 2 b g = 0.
//! ```
//!
//! `E` is constant in both variables whenever the profiles solve their ODEs,
//! so the pointwise condition is equivalent to one algebraic relation among
//! the coefficients; construction enforces it up to `TOL_CONSTRAINT`.

use serde::Serialize;

use crate::error::{Error, Result};

/// Relative tolerance for the coefficient relation. The relation is exact in
/// closed form; the tolerance only absorbs decimal entry of irrational
/// coefficients.
pub const TOL_CONSTRAINT: f64 = 1e-9;

/// Denominator bound for the bounded rationality test.
pub const RATIONALITY_MAX_DENOMINATOR: u64 = 64;

/// Tolerance for the bounded rationality test.
pub const RATIONALITY_TOL: f64 = 1e-9;

/// Interval of the transformation parameter `c`; exactly one tag applies to
/// any nonzero `c`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CaseTag {
    /// `c > 0`: hyperbolic `f`, trigonometric `g`.
    PosC,
    /// `-1 < c < 0`: trigonometric `f` and `g`.
    MidC,
    /// `c = -1`: trigonometric `f`, quadratic `g`.
    NegOne,
    /// `c < -1`: trigonometric `f`, hyperbolic `g`.
    LowC,
}

/// Coefficient input modes.
///
/// `General` passes the four profile constants through unchanged. `Normalized`
/// gives the squared oscillation amplitudes `A1` (for `f`) and `B1` (for `g`);
/// phases are zero. For `c = -1` the `B1` slot holds the constant term of the
/// quadratic `g` (its linear term is normalized away). `SingularNormalized`
/// selects the one-parameter profiles whose metric degenerates on a point
/// lattice; `b` is folded into the formulas and `epsilon1` picks the branch
/// where that matters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Coefficients {
    General { a1: f64, b1: f64, a2: f64, b2: f64 },
    Normalized { a1: f64, b1: f64 },
    SingularNormalized { epsilon1: i8 },
}

/// Validated parameters of one family member.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct FamilyParams {
    b: f64,
    c: f64,
    case: CaseTag,
    coeffs: Coefficients,
}

/// Classify `c` into its interval.
pub fn classify_case(c: f64) -> Result<CaseTag> {
    if !c.is_finite() {
        return Err(Error::NonFinite { name: "c", value: c });
    }
    if c == 0.0 {
        return Err(Error::DegenerateTransform);
    }
    Ok(if c > 0.0 {
        CaseTag::PosC
    } else if c == -1.0 {
        CaseTag::NegOne
    } else if c > -1.0 {
        CaseTag::MidC
    } else {
        CaseTag::LowC
    })
}

impl FamilyParams {
    /// Build and validate a family member; the coefficient relation must hold
    /// to `TOL_CONSTRAINT` (relative to its largest term).
    pub fn new(b: f64, c: f64, coeffs: Coefficients) -> Result<Self> {
        let params = Self::new_unvalidated(b, c, coeffs)?;
        let residual = params.constraint_residual();
        let scale = params.constraint_scale();
        if residual.abs() > TOL_CONSTRAINT * scale {
            return Err(Error::ConstraintViolation {
                residual: residual.abs(),
                tol: TOL_CONSTRAINT,
            });
        }
        Ok(params)
    }

    /// Build a family member without enforcing the coefficient relation.
    ///
    /// Domain checks (finite parameters, `c != 0`, amplitude positivity)
    /// still apply. This exists so the verification suite can audit a
    /// deliberately broken family: its first-integral check then reports the
    /// violation instead of construction refusing to produce anything.
    pub fn new_unvalidated(b: f64, c: f64, coeffs: Coefficients) -> Result<Self> {
        let case = classify_case(c)?;
        if !b.is_finite() {
            return Err(Error::NonFinite { name: "b", value: b });
        }
        let b = match coeffs {
            Coefficients::General { a1, b1, a2, b2 } => {
                for (name, v) in [("a1", a1), ("b1", b1), ("a2", a2), ("b2", b2)] {
                    if !v.is_finite() {
                        return Err(Error::NonFinite { name, value: v });
                    }
                }
                b
            }
            Coefficients::Normalized { a1, b1 } => {
                for (name, v) in [("A1", a1), ("B1", b1)] {
                    if !v.is_finite() {
                        return Err(Error::NonFinite { name, value: v });
                    }
                }
                match case {
                    CaseTag::PosC => {
                        if b1 <= 0.0 {
                            return Err(Error::Positivity { name: "B1", value: b1, requirement: "> 0" });
                        }
                        if a1 < 0.0 {
                            return Err(Error::Positivity { name: "A1", value: a1, requirement: ">= 0" });
                        }
                    }
                    CaseTag::MidC => {
                        if a1 <= 0.0 {
                            return Err(Error::Positivity { name: "A1", value: a1, requirement: "> 0" });
                        }
                        if b1 <= 0.0 {
                            return Err(Error::Positivity { name: "B1", value: b1, requirement: "> 0" });
                        }
                    }
                    CaseTag::LowC => {
                        if a1 <= 0.0 {
                            return Err(Error::Positivity { name: "A1", value: a1, requirement: "> 0" });
                        }
                        if b1 < 0.0 {
                            return Err(Error::Positivity { name: "B1", value: b1, requirement: ">= 0" });
                        }
                    }
                    CaseTag::NegOne => {
                        if a1 <= 0.0 {
                            return Err(Error::Positivity { name: "A1", value: a1, requirement: "> 0" });
                        }
                    }
                }
                b
            }
            Coefficients::SingularNormalized { epsilon1 } => {
                if epsilon1 != 1 && epsilon1 != -1 {
                    return Err(Error::InvalidCoefficients(format!(
                        "epsilon1 must be +1 or -1, got {epsilon1}"
                    )));
                }
                // b is pinned by the normalization, not by the caller.
                match case {
                    CaseTag::PosC => -1.0,
                    CaseTag::MidC | CaseTag::NegOne => f64::from(epsilon1),
                    CaseTag::LowC => 1.0,
                }
            }
        };
        Ok(Self { b, c, case, coeffs })
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn case(&self) -> CaseTag {
        self.case
    }

    pub fn coeffs(&self) -> Coefficients {
        self.coeffs
    }

    /// Sign attached to the closed-form Calapso fields: `+1` for `c > 0`,
    /// `-1` for `c < 0`.
    pub fn epsilon(&self) -> f64 {
        if self.c > 0.0 {
            1.0
        } else {
            -1.0
        }
    }

    /// `true` when the member has constant mean curvature `-1/2`.
    pub fn is_cmc(&self) -> bool {
        self.b == 0.0
    }

    /// Resolve the coefficient mode into the four raw profile constants.
    fn resolved(&self) -> ResolvedCoefficients {
        let c = self.c;
        match self.coeffs {
            Coefficients::General { a1, b1, a2, b2 } => ResolvedCoefficients { fa: a1, fb: b1, ga: a2, gb: b2 },
            Coefficients::Normalized { a1, b1 } => match self.case {
                CaseTag::PosC => ResolvedCoefficients { fa: a1.sqrt(), fb: 0.0, ga: 0.0, gb: b1.sqrt() },
                CaseTag::MidC => ResolvedCoefficients { fa: 0.0, fb: a1.sqrt(), ga: 0.0, gb: b1.sqrt() },
                CaseTag::LowC => ResolvedCoefficients { fa: 0.0, fb: a1.sqrt(), ga: b1.sqrt(), gb: 0.0 },
                CaseTag::NegOne => ResolvedCoefficients { fa: 0.0, fb: a1.sqrt(), ga: 0.0, gb: b1 },
            },
            // The pinned b carries the branch sign everywhere it matters:
            // the shifts are -b/c and b/(1+c), and for c = -1 the quadratic
            // g is (b/2) u2^2.
            Coefficients::SingularNormalized { .. } => match self.case {
                CaseTag::PosC => ResolvedCoefficients { fa: 1.0 / c, fb: 0.0, ga: 0.0, gb: 1.0 / (1.0 + c) },
                CaseTag::MidC => ResolvedCoefficients { fa: 0.0, fb: -1.0 / c, ga: 0.0, gb: 1.0 / (1.0 + c) },
                CaseTag::LowC => ResolvedCoefficients { fa: 0.0, fb: -1.0 / c, ga: -1.0 / (1.0 + c), gb: 0.0 },
                CaseTag::NegOne => ResolvedCoefficients { fa: 0.0, fb: 1.0, ga: 0.0, gb: 0.0 },
            },
        }
    }

    /// The constant value of the first integral `E` in closed form.
    ///
    /// For `Normalized` coefficients the amplitude squares enter directly,
    /// so exactly satisfied relations (like the cmc members') give exactly
    /// zero instead of a square-root round trip's few ulps.
    pub fn constraint_residual(&self) -> f64 {
        if let Coefficients::Normalized { a1, b1 } = self.coeffs {
            let (b, c) = (self.b, self.c);
            return match self.case {
                CaseTag::NegOne => a1 - b * b - 2.0 * b * b1,
                _ => -c * a1 + (1.0 + c) * b1 + b * b / c - b * b / (1.0 + c),
            };
        }
        let ResolvedCoefficients { fa, fb, ga, gb } = self.resolved();
        let (b, c) = (self.b, self.c);
        match self.case {
            CaseTag::PosC => {
                c * (fb * fb - fa * fa) + b * b / c + (1.0 + c) * (ga * ga + gb * gb)
                    - b * b / (1.0 + c)
            }
            CaseTag::MidC => {
                -c * (fa * fa + fb * fb) + b * b / c + (1.0 + c) * (ga * ga + gb * gb)
                    - b * b / (1.0 + c)
            }
            CaseTag::LowC => {
                -c * (fa * fa + fb * fb) + b * b / c + (1.0 + c) * (ga * ga - gb * gb)
                    - b * b / (1.0 + c)
            }
            CaseTag::NegOne => fa * fa + fb * fb - b * b + ga * ga - 2.0 * b * gb,
        }
    }

    /// Largest magnitude among the terms of the closed-form first integral,
    /// floored at 1; used to make the constraint tolerance relative.
    fn constraint_scale(&self) -> f64 {
        let ResolvedCoefficients { fa, fb, ga, gb } = self.resolved();
        let (b, c) = (self.b, self.c);
        let mut scale: f64 = 1.0;
        let amp_f = (c * (fa * fa + fb * fb)).abs();
        let amp_g = ((1.0 + c) * (ga * ga + gb * gb)).abs();
        for term in [amp_f, amp_g, (b * b / c).abs(), if self.case == CaseTag::NegOne { b * b } else { (b * b / (1.0 + c)).abs() }] {
            scale = scale.max(term);
        }
        scale
    }

    /// Closed-form profile evaluators for this member.
    pub fn profiles(&self) -> ProfilePair {
        let rc = self.resolved();
        let (b, c) = (self.b, self.c);
        let (f_freq, f_hyperbolic) = if c > 0.0 { (c.sqrt(), true) } else { ((-c).sqrt(), false) };
        let (g_freq, g_kind) = match self.case {
            CaseTag::PosC | CaseTag::MidC => ((1.0 + c).sqrt(), GKind::Trig),
            CaseTag::NegOne => (0.0, GKind::Quadratic),
            CaseTag::LowC => ((-1.0 - c).sqrt(), GKind::Hyperbolic),
        };
        let g_shift = if self.case == CaseTag::NegOne { 0.0 } else { b / (1.0 + c) };
        ProfilePair {
            params: *self,
            fa: rc.fa,
            fb: rc.fb,
            ga: rc.ga,
            gb: rc.gb,
            f_freq,
            f_hyperbolic,
            g_freq,
            g_kind,
            f_shift: -b / c,
            g_shift,
        }
    }

    /// Shape test for the one-parameter profiles whose conformal factor blows
    /// up on a point lattice. Returns the branch sign when the resolved
    /// coefficients match (to relative 1e-9).
    fn singular_profile_epsilon(&self) -> Option<i8> {
        let ResolvedCoefficients { fa, fb, ga, gb } = self.resolved();
        let (b, c) = (self.b, self.c);
        let close = |x: f64, y: f64| (x - y).abs() <= 1e-9 * x.abs().max(y.abs()).max(1.0);
        match self.case {
            CaseTag::PosC => {
                (b < 0.0 && close(fb, 0.0) && close(ga, 0.0) && close(fa, -b / c) && close(gb, -b / (1.0 + c)))
                    .then_some(1)
            }
            CaseTag::MidC => {
                if !(close(fa, 0.0) && close(ga, 0.0)) || b == 0.0 {
                    return None;
                }
                if b > 0.0 && close(fb, -b / c) && close(gb, b / (1.0 + c)) {
                    Some(1)
                } else if b < 0.0 && close(fb, b / c) && close(gb, -b / (1.0 + c)) {
                    Some(-1)
                } else {
                    None
                }
            }
            CaseTag::LowC => {
                (b > 0.0 && close(fa, 0.0) && close(gb, 0.0) && close(fb, -b / c) && close(ga, -b / (1.0 + c)))
                    .then_some(1)
            }
            CaseTag::NegOne => {
                if b != 0.0 && close(fa, 0.0) && close(ga, 0.0) && close(gb, 0.0) && close(fb, b.abs()) {
                    Some(if b > 0.0 { 1 } else { -1 })
                } else {
                    None
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct ResolvedCoefficients {
    fa: f64,
    fb: f64,
    ga: f64,
    gb: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum GKind {
    Trig,
    Quadratic,
    Hyperbolic,
}

/// The six profile values at a parameter point.
#[derive(Debug, Clone, Copy)]
pub struct ProfileValues {
    pub f: f64,
    pub f1: f64,
    pub f2: f64,
    pub g: f64,
    pub g1: f64,
    pub g2: f64,
}

/// Closed-form evaluators for `f(u1)` and `g(u2)` with first and second
/// derivatives. Entire functions; evaluation never fails.
#[derive(Debug, Clone, Copy)]
pub struct ProfilePair {
    params: FamilyParams,
    fa: f64,
    fb: f64,
    ga: f64,
    gb: f64,
    f_freq: f64,
    f_hyperbolic: bool,
    g_freq: f64,
    g_kind: GKind,
    f_shift: f64,
    g_shift: f64,
}

impl ProfilePair {
    pub fn params(&self) -> &FamilyParams {
        &self.params
    }

    /// All six closed-form values; `f'' = c f + b` and `g'' = b - (1 + c) g`
    /// hold by construction of the returned second derivatives.
    pub fn eval(&self, u1: f64, u2: f64) -> ProfileValues {
        let (f, f1, f2) = self.eval_f(u1);
        let (g, g1, g2) = self.eval_g(u2);
        ProfileValues { f, f1, f2, g, g1, g2 }
    }

    fn eval_f(&self, u1: f64) -> (f64, f64, f64) {
        let c = self.params.c;
        let r = self.f_freq;
        if self.f_hyperbolic {
            let (sh, ch) = ((r * u1).sinh(), (r * u1).cosh());
            let osc = self.fa * ch + self.fb * sh;
            (osc + self.f_shift, r * (self.fa * sh + self.fb * ch), c * osc)
        } else {
            let (s, co) = (r * u1).sin_cos();
            let osc = self.fa * co + self.fb * s;
            (osc + self.f_shift, r * (self.fb * co - self.fa * s), c * osc)
        }
    }

    fn eval_g(&self, u2: f64) -> (f64, f64, f64) {
        let (b, c) = (self.params.b, self.params.c);
        match self.g_kind {
            GKind::Trig => {
                let (s, co) = (self.g_freq * u2).sin_cos();
                let osc = self.ga * co + self.gb * s;
                (osc + self.g_shift, self.g_freq * (self.gb * co - self.ga * s), -(1.0 + c) * osc)
            }
            GKind::Hyperbolic => {
                let (sh, ch) = ((self.g_freq * u2).sinh(), (self.g_freq * u2).cosh());
                let osc = self.ga * ch + self.gb * sh;
                (osc + self.g_shift, self.g_freq * (self.ga * sh + self.gb * ch), -(1.0 + c) * osc)
            }
            GKind::Quadratic => {
                ((0.5 * b * u2 + self.ga) * u2 + self.gb, b * u2 + self.ga, b)
            }
        }
    }

    /// The conserved quantity
    /// `E = (f')^2 - c f^2 - 2 b f + (g')^2 + (1 + c) g^2 - 2 b g`.
    pub fn first_integral(&self, u1: f64, u2: f64) -> f64 {
        let v = self.eval(u1, u2);
        let (b, c) = (self.params.b, self.params.c);
        v.f1 * v.f1 - c * v.f * v.f - 2.0 * b * v.f + v.g1 * v.g1 + (1.0 + c) * v.g * v.g
            - 2.0 * b * v.g
    }

    /// `M = 2 b + c (f - g)`; the conformal factor degenerates where it
    /// vanishes.
    pub fn big_m(&self, u1: f64, u2: f64) -> f64 {
        let v = self.eval(u1, u2);
        2.0 * self.params.b + self.params.c * (v.f - v.g)
    }
}

/// Axis-aligned rectangle in the `(u1, u2)` parameter plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Window {
    pub u1_min: f64,
    pub u1_max: f64,
    pub u2_min: f64,
    pub u2_max: f64,
}

impl Window {
    pub fn new(u1_min: f64, u1_max: f64, u2_min: f64, u2_max: f64) -> Self {
        Self { u1_min, u1_max, u2_min, u2_max }
    }

    pub fn contains(&self, u1: f64, u2: f64) -> bool {
        u1 >= self.u1_min && u1 <= self.u1_max && u2 >= self.u2_min && u2 <= self.u2_max
    }

    pub fn as_tuple(&self) -> (f64, f64, f64, f64) {
        (self.u1_min, self.u1_max, self.u2_min, self.u2_max)
    }
}

/// All points of the singular lattice (`M = 0`) inside `window`, sorted by
/// `(u1, u2)`. Families whose coefficients do not take the one-parameter
/// singular shape have no such points and get an empty list.
pub fn singular_points(params: &FamilyParams, window: &Window) -> Vec<(f64, f64)> {
    let Some(eps) = params.singular_profile_epsilon() else {
        return Vec::new();
    };
    let c = params.c();
    let pi = std::f64::consts::PI;
    // Values t in [lo, hi] of the form t = (4k + sign) * step, k integer.
    let lattice_1d = |step: f64, sign: f64, lo: f64, hi: f64| -> Vec<f64> {
        let mut out = Vec::new();
        let k_lo = ((lo / step - sign) / 4.0).floor() as i64 - 1;
        let k_hi = ((hi / step - sign) / 4.0).ceil() as i64 + 1;
        for k in k_lo..=k_hi {
            let t = (4.0 * k as f64 + sign) * step;
            if t >= lo && t <= hi {
                out.push(t);
            }
        }
        out
    };
    let mut pts = Vec::new();
    match params.case() {
        CaseTag::PosC => {
            // u1 = 0, u2 = (4k + 1) pi / (2 sqrt(1 + c))
            if window.u1_min <= 0.0 && window.u1_max >= 0.0 {
                let step = pi / (2.0 * (1.0 + c).sqrt());
                for u2 in lattice_1d(step, 1.0, window.u2_min, window.u2_max) {
                    pts.push((0.0, u2));
                }
            }
        }
        CaseTag::MidC => {
            // (4k +/- 1) pi / (2 sqrt(-c)) x (4j -/+ 1) pi / (2 sqrt(1 + c))
            let step1 = pi / (2.0 * (-c).sqrt());
            let step2 = pi / (2.0 * (1.0 + c).sqrt());
            let (s1, s2) = if eps > 0 { (1.0, -1.0) } else { (-1.0, 1.0) };
            for u1 in lattice_1d(step1, s1, window.u1_min, window.u1_max) {
                for u2 in lattice_1d(step2, s2, window.u2_min, window.u2_max) {
                    pts.push((u1, u2));
                }
            }
        }
        CaseTag::LowC => {
            // u1 = (4k + 1) pi / (2 sqrt(-c)), u2 = 0
            if window.u2_min <= 0.0 && window.u2_max >= 0.0 {
                let step = pi / (2.0 * (-c).sqrt());
                for u1 in lattice_1d(step, 1.0, window.u1_min, window.u1_max) {
                    pts.push((u1, 0.0));
                }
            }
        }
        CaseTag::NegOne => {
            // u1 = (4k + eps) pi / 2, u2 = 0
            if window.u2_min <= 0.0 && window.u2_max >= 0.0 {
                for u1 in lattice_1d(pi / 2.0, f64::from(eps), window.u1_min, window.u1_max) {
                    pts.push((u1, 0.0));
                }
            }
        }
    }
    pts.sort_by(|a, b| a.partial_cmp(b).expect("lattice points are finite"));
    pts
}

/// Outcome of the bounded rationality test for a square root.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Rationality {
    /// `value` is `n / m` (reduced) to within the tolerance.
    Rational { n: u64, m: u64 },
    /// No fraction with denominator `<= max_denominator` approximates
    /// `value` to the tolerance; treated as irrational.
    Irrational,
}

/// Best bounded continued-fraction approximation test: is `x` within `tol`
/// of a fraction with denominator at most `max_den`?
pub fn rational_approx(x: f64, max_den: u64, tol: f64) -> Rationality {
    assert!(x >= 0.0 && x.is_finite());
    let (mut h_prev, mut k_prev): (u64, u64) = (1, 0);
    let (mut h, mut k): (u64, u64) = (x.floor() as u64, 1);
    let mut frac = x - x.floor();
    for _ in 0..64 {
        if (x - h as f64 / k as f64).abs() <= tol {
            return Rationality::Rational { n: h, m: k };
        }
        if frac.abs() < 1e-15 {
            break;
        }
        let inv = 1.0 / frac;
        let a = inv.floor();
        frac = inv - a;
        let a = a as u64;
        let h_next = match a.checked_mul(h).and_then(|v| v.checked_add(h_prev)) {
            Some(v) => v,
            None => break,
        };
        let k_next = match a.checked_mul(k).and_then(|v| v.checked_add(k_prev)) {
            Some(v) => v,
            None => break,
        };
        if k_next > max_den {
            break;
        }
        (h_prev, k_prev) = (h, k);
        (h, k) = (h_next, k_next);
    }
    if (x - h as f64 / k as f64).abs() <= tol {
        Rationality::Rational { n: h, m: k }
    } else {
        Rationality::Irrational
    }
}

/// Where the bubbles sit relative to the base cylinder.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum BubblePlacement {
    Inside,
    Outside,
    /// Doubly periodic: bubbles nested inside bubbles (`-1 < c < 0`).
    NestedInside,
    /// Vertical bubble columns outside the cylinder (`c = -1`).
    OutsideVertical,
    /// Constant mean curvature member (`b = 0`); no bubble side applies.
    Cmc,
}

/// Bubble/periodicity classification of a family member.
#[derive(Debug, Clone, Serialize)]
pub struct GeometryClass {
    pub case: CaseTag,
    /// Rationality of `sqrt(|1 + c|)`; `None` for `c = -1`.
    pub sqrt_one_plus_c: Option<Rationality>,
    /// Rationality of `sqrt(-c)`; `None` for `c > 0`.
    pub sqrt_neg_c: Option<Rationality>,
    /// Bubble count per period when `sqrt(|1 + c|) = n / m` is rational.
    pub bubble_count: Option<u64>,
    /// Geometric index of the ends (the `m` of `n / m`).
    pub end_index: Option<u64>,
    pub placement: BubblePlacement,
    /// Profile period in `u1` (`c < 0` only).
    pub period_u1: Option<f64>,
    /// Profile period in `u2` (`-1 < c`, `c != 0` only).
    pub period_u2: Option<f64>,
    /// `true` iff the conformal factor degenerates somewhere (`M = 0`),
    /// producing planar ends.
    pub planar_ends: bool,
}

/// Classify bubble structure, periodicity and planar ends.
pub fn classify_geometry(params: &FamilyParams) -> GeometryClass {
    let (b, c) = (params.b(), params.c());
    let case = params.case();
    let tau = std::f64::consts::TAU;
    let sqrt_one_plus_c = (case != CaseTag::NegOne)
        .then(|| rational_approx((1.0 + c).abs().sqrt(), RATIONALITY_MAX_DENOMINATOR, RATIONALITY_TOL));
    let sqrt_neg_c =
        (c < 0.0).then(|| rational_approx((-c).sqrt(), RATIONALITY_MAX_DENOMINATOR, RATIONALITY_TOL));
    let (bubble_count, end_index) = match sqrt_one_plus_c {
        Some(Rationality::Rational { n, m }) => (Some(n), Some(m)),
        _ => (None, None),
    };
    let placement = if b == 0.0 {
        BubblePlacement::Cmc
    } else {
        match case {
            CaseTag::PosC => {
                if b > 0.0 {
                    BubblePlacement::Inside
                } else {
                    BubblePlacement::Outside
                }
            }
            CaseTag::MidC => BubblePlacement::NestedInside,
            CaseTag::LowC => {
                if b > 0.0 {
                    BubblePlacement::Outside
                } else {
                    BubblePlacement::Inside
                }
            }
            CaseTag::NegOne => BubblePlacement::OutsideVertical,
        }
    };
    GeometryClass {
        case,
        sqrt_one_plus_c,
        sqrt_neg_c,
        bubble_count,
        end_index,
        placement,
        period_u1: (c < 0.0).then(|| tau / (-c).sqrt()),
        period_u2: (c > -1.0).then(|| tau / (1.0 + c).sqrt()),
        planar_ends: params.singular_profile_epsilon().is_some(),
    }
}
