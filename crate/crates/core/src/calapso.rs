//! Closed-form scalar solutions of the Calapso equation
//!
//! ```text
//! (w_{,12} / w)_{,11} + (w_{,12} / w)_{,22} + (w^2)_{,12} = 0
//! ```
//!
//! induced by each surface family, plus a finite-difference residual
//! evaluator that audits them.
//!
//! Each family yields two fields:
//!
//! * `omega  = eps * sqrt(2) (M + 2 c g) / (2 M)`
//! * `capital_omega = eps * sqrt(2) (f - g) / (2 (f + g))`
//!
//! with `eps = +1` for `c > 0` and `-1` for `c < 0`. Both equal
//! `sqrt(2) psi H` and `sqrt(2) psi (lambda1 - lambda2) / 2` up to a sign
//! that is constant on any connected unmasked patch. The half-difference
//! normalization of the second field is forced: the residual of the doubled
//! field plateaus at O(1) instead of converging, and the equation is not
//! scale invariant.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::family::{FamilyParams, ProfilePair, Window};
use crate::surface::{eval_surface_point, MaskTolerances};

/// Floor under which the inner quotient `w_{,12} / w` is considered
/// undefined and residual evaluation refuses the patch.
const FIELD_DIVISION_FLOOR: f64 = 1e-9;

/// Which scalar field a [`CalapsoField`] carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum FieldKind {
    /// `eps sqrt(2) (M + 2 c g) / (2 M)`.
    Omega,
    /// `eps sqrt(2) (f - g) / (2 (f + g))`.
    CapitalOmega,
    /// Caller-supplied scalar field (negative controls, scaled probes).
    Custom,
}

/// Which curvature the surface-derived field scales.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SurfaceFieldKind {
    /// `sqrt(2) psi H`.
    Mean,
    /// `sqrt(2) psi (lambda1 - lambda2) / 2`.
    Skew,
}

enum FieldExpr {
    Omega(ProfilePair),
    CapitalOmega(ProfilePair),
    Surface(ProfilePair, SurfaceFieldKind),
    Custom(Box<dyn Fn(f64, f64) -> Option<f64> + Send + Sync>),
}

/// A scalar field on the parameter plane, masked on its excluded set.
pub struct CalapsoField {
    kind: FieldKind,
    params: Option<FamilyParams>,
    epsilon: Option<f64>,
    tol: MaskTolerances,
    expr: FieldExpr,
}

impl CalapsoField {
    pub fn kind(&self) -> FieldKind {
        self.kind
    }

    pub fn params(&self) -> Option<&FamilyParams> {
        self.params.as_ref()
    }

    pub fn epsilon(&self) -> Option<f64> {
        self.epsilon
    }

    /// Field value, or `None` where the field is masked.
    pub fn eval(&self, u1: f64, u2: f64) -> Option<f64> {
        match &self.expr {
            FieldExpr::Omega(pair) => {
                let params = pair.params();
                let v = pair.eval(u1, u2);
                let m = 2.0 * params.b() + params.c() * (v.f - v.g);
                if m.abs() < self.tol.singular {
                    return None;
                }
                let eps = params.epsilon();
                Some(eps * std::f64::consts::SQRT_2 * (m + 2.0 * params.c() * v.g) / (2.0 * m))
            }
            FieldExpr::CapitalOmega(pair) => {
                let params = pair.params();
                let v = pair.eval(u1, u2);
                let fg = v.f + v.g;
                if fg.abs() < self.tol.domain {
                    return None;
                }
                let eps = params.epsilon();
                Some(eps * std::f64::consts::SQRT_2 * (v.f - v.g) / (2.0 * fg))
            }
            FieldExpr::Surface(pair, which) => {
                let p = eval_surface_point(pair, u1, u2, self.tol);
                if !p.flags.ok {
                    return None;
                }
                let curvature = match which {
                    SurfaceFieldKind::Mean => p.h,
                    SurfaceFieldKind::Skew => 0.5 * p.h_skew,
                };
                Some(std::f64::consts::SQRT_2 * p.psi * curvature)
            }
            FieldExpr::Custom(f) => f(u1, u2),
        }
    }

    /// Wrap an arbitrary closure as an (unmasked) custom field.
    pub fn custom(f: impl Fn(f64, f64) -> f64 + Send + Sync + 'static) -> Self {
        Self {
            kind: FieldKind::Custom,
            params: None,
            epsilon: None,
            tol: MaskTolerances::default(),
            expr: FieldExpr::Custom(Box::new(move |u1, u2| Some(f(u1, u2)))),
        }
    }

    /// The field multiplied by `factor`, preserving masking. The Calapso
    /// equation is not scale invariant, so this turns a solution into a
    /// negative control (except for `factor = +/-1`).
    pub fn scaled(self, factor: f64) -> Self {
        Self {
            kind: FieldKind::Custom,
            params: self.params,
            epsilon: self.epsilon,
            tol: self.tol,
            expr: FieldExpr::Custom(Box::new(move |u1, u2| {
                self.eval_expr_for_scale(u1, u2).map(|v| factor * v)
            })),
        }
    }

    fn eval_expr_for_scale(&self, u1: f64, u2: f64) -> Option<f64> {
        match &self.expr {
            FieldExpr::Custom(f) => f(u1, u2),
            _ => self.eval(u1, u2),
        }
    }
}

/// Build one of the two closed-form fields of a family.
pub fn make_field(params: &FamilyParams, kind: FieldKind, tol: MaskTolerances) -> Result<CalapsoField> {
    let pair = params.profiles();
    let expr = match kind {
        FieldKind::Omega => FieldExpr::Omega(pair),
        FieldKind::CapitalOmega => FieldExpr::CapitalOmega(pair),
        FieldKind::Custom => {
            return Err(Error::InvalidField(
                "custom fields are constructed with CalapsoField::custom, not make_field".into(),
            ))
        }
    };
    Ok(CalapsoField { kind, params: Some(*params), epsilon: Some(params.epsilon()), tol, expr })
}

/// The field `sqrt(2) psi H` (mean) or `sqrt(2) psi (lambda1 - lambda2) / 2`
/// (skew) of the surface itself. Agrees with the corresponding closed-form
/// field up to a sign on any connected unmasked patch.
pub fn field_from_surface(pair: &ProfilePair, which: SurfaceFieldKind, tol: MaskTolerances) -> CalapsoField {
    CalapsoField {
        kind: FieldKind::Custom,
        params: Some(*pair.params()),
        epsilon: Some(pair.params().epsilon()),
        tol,
        expr: FieldExpr::Surface(*pair, which),
    }
}

/// Finite-difference residual of the Calapso operator on a patch.
#[derive(Debug, Clone, Serialize)]
pub struct ResidualReport {
    pub patch: Window,
    pub h: f64,
    /// Report-grid dimensions (points along `u1` and `u2`).
    pub n1: usize,
    pub n2: usize,
    /// Residual values, row-major with `u1` as the major axis.
    #[serde(skip)]
    pub residual_grid: Vec<Vec<f64>>,
    pub max_abs: f64,
    /// Root-mean-square of the residual over the report grid.
    pub l2: f64,
}

/// Evaluate the Calapso residual on the `h`-lattice anchored at the patch's
/// lower corner.
///
/// Two-stage centered scheme: the inner quotient `q = w_{,12} / w` (mixed
/// derivative by the 4-point cross) is computed on a grid one cell wider
/// than the report patch, then `q_{,11} + q_{,22}` by centered second
/// differences, plus `(w^2)_{,12}` by the cross applied to `w^2`. The full
/// stencil needs the field unmasked within a `2 h` margin of the patch.
pub fn calapso_residual(field: &CalapsoField, patch: &Window, h: f64) -> Result<ResidualReport> {
    if !(h.is_finite() && h > 0.0) {
        return Err(Error::InvalidPatch(format!("step h must be positive, got {h}")));
    }
    if !(patch.u1_min < patch.u1_max && patch.u2_min < patch.u2_max) {
        return Err(Error::InvalidPatch("patch must have positive extent".into()));
    }
    let n1 = ((patch.u1_max - patch.u1_min) / h + 1e-9).floor() as usize + 1;
    let n2 = ((patch.u2_max - patch.u2_min) / h + 1e-9).floor() as usize + 1;

    // Field values on the report grid expanded by two cells on every side.
    let mut w = vec![vec![0.0; n2 + 4]; n1 + 4];
    for (i, row) in w.iter_mut().enumerate() {
        let u1 = patch.u1_min + (i as f64 - 2.0) * h;
        for (j, slot) in row.iter_mut().enumerate() {
            let u2 = patch.u2_min + (j as f64 - 2.0) * h;
            match field.eval(u1, u2) {
                Some(v) => *slot = v,
                None => return Err(Error::MaskedPoint { u1, u2, reason: "field masked inside stencil" }),
            }
        }
    }
    // A sign change between stencil neighbors means the zero set of the
    // field crosses the patch; the inner quotient is singular there no
    // matter how the grid happens to straddle it.
    for i in 0..n1 + 4 {
        for j in 0..n2 + 4 {
            let crosses = (i + 1 < n1 + 4 && w[i][j] * w[i + 1][j] < 0.0)
                || (j + 1 < n2 + 4 && w[i][j] * w[i][j + 1] < 0.0);
            if crosses {
                return Err(Error::FieldVanishes {
                    u1: patch.u1_min + (i as f64 - 2.0) * h,
                    u2: patch.u2_min + (j as f64 - 2.0) * h,
                });
            }
        }
    }

    // Inner quotient on the one-cell-expanded grid.
    let mut q = vec![vec![0.0; n2 + 2]; n1 + 2];
    for i in 0..n1 + 2 {
        for j in 0..n2 + 2 {
            let (ii, jj) = (i + 1, j + 1);
            let denom = w[ii][jj];
            if denom.abs() < FIELD_DIVISION_FLOOR {
                return Err(Error::FieldVanishes {
                    u1: patch.u1_min + (ii as f64 - 2.0) * h,
                    u2: patch.u2_min + (jj as f64 - 2.0) * h,
                });
            }
            let w12 = (w[ii + 1][jj + 1] - w[ii + 1][jj - 1] - w[ii - 1][jj + 1] + w[ii - 1][jj - 1])
                / (4.0 * h * h);
            q[i][j] = w12 / denom;
        }
    }

    let mut grid = vec![vec![0.0; n2]; n1];
    let mut max_abs = 0.0_f64;
    let mut sum_sq = 0.0_f64;
    for i in 0..n1 {
        for j in 0..n2 {
            let (qi, qj) = (i + 1, j + 1);
            let q11 = (q[qi + 1][qj] - 2.0 * q[qi][qj] + q[qi - 1][qj]) / (h * h);
            let q22 = (q[qi][qj + 1] - 2.0 * q[qi][qj] + q[qi][qj - 1]) / (h * h);
            let (ii, jj) = (i + 2, j + 2);
            let sq = |x: f64| x * x;
            let w2_12 = (sq(w[ii + 1][jj + 1]) - sq(w[ii + 1][jj - 1]) - sq(w[ii - 1][jj + 1])
                + sq(w[ii - 1][jj - 1]))
                / (4.0 * h * h);
            let r = q11 + q22 + w2_12;
            grid[i][j] = r;
            max_abs = max_abs.max(r.abs());
            sum_sq += r * r;
        }
    }
    let l2 = (sum_sq / (n1 * n2) as f64).sqrt();
    Ok(ResidualReport { patch: *patch, h, n1, n2, residual_grid: grid, max_abs, l2 })
}

/// Least-squares slope of `log(max_abs)` against `log(h)`.
///
/// Second-order stencils on an exact solution give a slope near 2; a
/// non-solution plateaus near 0. Needs at least three strictly decreasing
/// steps. Residuals at machine zero make the slope `+inf`.
pub fn residual_convergence_order(field: &CalapsoField, patch: &Window, steps: &[f64]) -> Result<f64> {
    if steps.len() < 3 {
        return Err(Error::InvalidPatch(format!(
            "need at least 3 step sizes for an order estimate, got {}",
            steps.len()
        )));
    }
    if !steps.windows(2).all(|w| w[0] > w[1]) {
        return Err(Error::InvalidPatch("step sizes must be strictly decreasing".into()));
    }
    let mut pts = Vec::with_capacity(steps.len());
    for &h in steps {
        let report = calapso_residual(field, patch, h)?;
        if report.max_abs < 1e-250 {
            return Ok(f64::INFINITY);
        }
        pts.push((h.ln(), report.max_abs.ln()));
    }
    let n = pts.len() as f64;
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    Ok((n * sxy - sx * sy) / (n * sxx - sx * sx))
}

/// Validity floors used by [`auto_patch`].
///
/// `field_abs` keeps the patch away from zeros of the field (the inner
/// quotient divides by it, and the residual's truncation constants grow like
/// inverse powers of the field there); `m_abs` and `fg_abs` keep the full
/// stencil away from the masked sets with enough margin that the field's
/// derivatives stay O(1). These are deliberately far above the masking
/// tolerances: patches that merely avoid the mask can still sit on a cliff.
#[derive(Debug, Clone, Copy)]
pub struct PatchFloors {
    pub field_abs: f64,
    pub m_abs: f64,
    pub fg_abs: f64,
}

impl Default for PatchFloors {
    fn default() -> Self {
        Self { field_abs: 0.05, m_abs: 0.1, fg_abs: 0.1 }
    }
}

/// Scan `window` on a `scan x scan` lattice and return the largest axis-
/// aligned rectangle whose points all clear the floors, shrunk by one scan
/// cell on every side as stencil margin. `None` when no interior cell
/// qualifies.
pub fn auto_patch(
    pair: &ProfilePair,
    field: &CalapsoField,
    window: &Window,
    scan: usize,
    floors: PatchFloors,
) -> Option<Window> {
    assert!(scan >= 8, "scan resolution too coarse");
    let du1 = (window.u1_max - window.u1_min) / (scan - 1) as f64;
    let du2 = (window.u2_max - window.u2_min) / (scan - 1) as f64;
    let ok: Vec<Vec<bool>> = (0..scan)
        .map(|i| {
            let u1 = window.u1_min + i as f64 * du1;
            (0..scan)
                .map(|j| {
                    let u2 = window.u2_min + j as f64 * du2;
                    let v = pair.eval(u1, u2);
                    let fg = v.f + v.g;
                    let m = pair.big_m(u1, u2);
                    fg.abs() >= floors.fg_abs
                        && m.abs() >= floors.m_abs
                        && field.eval(u1, u2).is_some_and(|w| w.abs() >= floors.field_abs)
                })
                .collect()
        })
        .collect();

    // Largest all-true rectangle via the histogram-of-heights method.
    let mut best = (0usize, 0usize, 0usize, 0usize, 0usize); // area, i0, i1, j0, j1
    let mut heights = vec![0usize; scan];
    for i in 0..scan {
        for j in 0..scan {
            heights[j] = if ok[i][j] { heights[j] + 1 } else { 0 };
        }
        // For each bar, widest rectangle of height >= heights[j] ending here.
        let mut stack: Vec<usize> = Vec::new();
        for j in 0..=scan {
            let cur = if j < scan { heights[j] } else { 0 };
            while let Some(&top) = stack.last() {
                if heights[top] < cur {
                    break;
                }
                stack.pop();
                let height = heights[top];
                let l = stack.last().map_or(0, |&p| p + 1);
                let width = j - l;
                let area = height * width;
                if area > best.0 && height >= 3 && width >= 3 {
                    best = (area, i + 1 - height, i, l, j - 1);
                }
            }
            stack.push(j);
        }
    }
    if best.0 == 0 {
        return None;
    }
    let (_, i0, i1, j0, j1) = best;
    // One-cell shrink for stencil margin.
    let (i0, i1, j0, j1) = (i0 + 1, i1 - 1, j0 + 1, j1 - 1);
    if i0 >= i1 || j0 >= j1 {
        return None;
    }
    Some(Window::new(
        window.u1_min + i0 as f64 * du1,
        window.u1_min + i1 as f64 * du1,
        window.u2_min + j0 as f64 * du2,
        window.u2_min + j1 as f64 * du2,
    ))
}
