//! Isothermic surfaces obtained from the circular cylinder by Ribaucour
//! transformations.
//!
//! The crate builds a three-parameter family of such surfaces from
//! closed-form profile pairs, evaluates their full differential-geometric
//! data (metric factor, normal, principal/mean/skew/Gaussian curvatures),
//! derives the scalar Calapso-equation solutions each member induces, and
//! ships the finite-difference and quadrature oracles that audit every
//! closed form independently.
//!
//! Modules:
//!
//! * [`family`]: parameters, case analysis, profile ODE solutions, the
//!   conserved first integral, singular lattices, bubble classification;
//! * [`surface`]: pointwise evaluation of the transformed immersion along
//!   two independent algebraic routes;
//! * [`calapso`]: closed-form Calapso fields and the residual evaluator
//!   with convergence-order estimation;
//! * [`verify`]: finite-difference fundamental forms, shape operator,
//!   metric length probes, bubble counting, the identity suite;
//! * [`grid`] / [`export`]: deterministic sampling and OBJ/CSV/manifest
//!   output.

pub mod calapso;
pub mod error;
pub mod export;
pub mod family;
pub mod grid;
pub mod quasi;
pub mod surface;
pub mod verify;

pub use calapso::{
    auto_patch, calapso_residual, field_from_surface, make_field, residual_convergence_order,
    CalapsoField, FieldKind, PatchFloors, ResidualReport, SurfaceFieldKind,
};
pub use error::{Error, Result};
pub use family::{
    classify_case, classify_geometry, rational_approx, singular_points, BubblePlacement, CaseTag,
    Coefficients, FamilyParams, GeometryClass, ProfilePair, ProfileValues, Rationality, Window,
};
pub use grid::{sample_grid, sample_grid_parallel, GridSpec, SampleTable};
pub use export::{
    export_csv_field, export_csv_table, export_obj, run_manifest, ObjStats, RunManifest,
};
pub use surface::{
    cylinder_frame, eval_surface_point, eval_via_general_ribaucour, CylinderFrame, GeneralEval,
    MaskTolerances, PointFlags, RibaucourIntermediates, SurfacePoint,
};
pub use verify::{
    adaptive_simpson, audit_points, count_bubbles, fd_first_fundamental, fd_shape_operator,
    identity_suite, length_probe, BaseCylinder, BubbleCount, FirstFundamentalForm, IdentityCheck,
    IdentityReport, LengthProbe, ShapeOperatorFd, SurfaceMap, TransformedSurface,
};
