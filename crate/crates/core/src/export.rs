//! Deterministic file exports: ASCII OBJ meshes, CSV tables and field
//! samples, and the JSON run manifest.
//!
//! All floats are written with 17 significant digits in exponent form,
//! locale-independent, so identical inputs produce byte-identical files.

use std::io::Write;

use serde::Serialize;

use crate::calapso::CalapsoField;
use crate::error::{Error, Result};
use crate::family::{classify_geometry, singular_points, CaseTag, Coefficients, FamilyParams, GeometryClass, Window};
use crate::grid::{GridSpec, SampleTable};
use crate::surface::{MaskTolerances, PointFlags};

fn fmt(v: f64) -> String {
    format!("{v:.16e}")
}

fn flags_label(flags: PointFlags) -> &'static str {
    match (flags.near_domain_boundary, flags.near_singular) {
        (false, false) => "ok",
        (true, false) => "near_domain_boundary",
        (false, true) => "near_singular",
        (true, true) => "near_domain_boundary|near_singular",
    }
}

/// Mesh statistics returned by [`export_obj`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ObjStats {
    pub vertices: usize,
    pub faces: usize,
}

/// Write an ASCII OBJ mesh: one `v` line per unmasked vertex (and a matching
/// `vn` line when `with_normals`), quad faces for cells whose four corners
/// are all unmasked. Vertex numbering follows the table's row-major order,
/// skipping masked vertices, so identical tables give identical files.
pub fn export_obj(table: &SampleTable, writer: &mut impl Write, with_normals: bool) -> Result<ObjStats> {
    let (n1, n2) = (table.grid.n1, table.grid.n2);
    let mut index = vec![0usize; n1 * n2];
    let mut vertices = 0usize;
    for (row_idx, point) in table.rows.iter().enumerate() {
        if !point.is_masked() {
            vertices += 1;
            index[row_idx] = vertices; // 1-based OBJ indexing
        }
    }
    if vertices == 0 {
        return Err(Error::EmptyMesh);
    }
    for point in table.rows.iter().filter(|p| !p.is_masked()) {
        writeln!(writer, "v {} {} {}", fmt(point.position.x), fmt(point.position.y), fmt(point.position.z))?;
    }
    if with_normals {
        for point in table.rows.iter().filter(|p| !p.is_masked()) {
            writeln!(writer, "vn {} {} {}", fmt(point.normal.x), fmt(point.normal.y), fmt(point.normal.z))?;
        }
    }
    let mut faces = 0usize;
    for i1 in 0..n1 - 1 {
        for i2 in 0..n2 - 1 {
            let corners = [
                index[i1 * n2 + i2],
                index[(i1 + 1) * n2 + i2],
                index[(i1 + 1) * n2 + i2 + 1],
                index[i1 * n2 + i2 + 1],
            ];
            if corners.iter().all(|&ix| ix != 0) {
                faces += 1;
                if with_normals {
                    writeln!(
                        writer,
                        "f {}//{} {}//{} {}//{} {}//{}",
                        corners[0], corners[0], corners[1], corners[1], corners[2], corners[2], corners[3], corners[3],
                    )?;
                } else {
                    writeln!(writer, "f {} {} {} {}", corners[0], corners[1], corners[2], corners[3])?;
                }
            }
        }
    }
    Ok(ObjStats { vertices, faces })
}

/// CSV header used by [`export_csv_table`].
pub const TABLE_CSV_HEADER: &str = "u1,u2,x,y,z,psi,lambda1,lambda2,H,Hskew,K,M,fg_sum,flags";

/// Write every vertex (masked included) as one CSV row. Masked rows keep
/// their `u1, u2` and flags but render all other numeric cells as empty
/// strings; NaN never reaches the file.
pub fn export_csv_table(table: &SampleTable, writer: &mut impl Write) -> Result<()> {
    writeln!(writer, "{TABLE_CSV_HEADER}")?;
    for p in &table.rows {
        if p.is_masked() {
            writeln!(writer, "{},{},,,,,,,,,,,,{}", fmt(p.u.0), fmt(p.u.1), flags_label(p.flags))?;
        } else {
            writeln!(
                writer,
                "{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
                fmt(p.u.0),
                fmt(p.u.1),
                fmt(p.position.x),
                fmt(p.position.y),
                fmt(p.position.z),
                fmt(p.psi),
                fmt(p.lambda1),
                fmt(p.lambda2),
                fmt(p.h),
                fmt(p.h_skew),
                fmt(p.k),
                fmt(p.m),
                fmt(p.fg_sum),
                flags_label(p.flags),
            )?;
        }
    }
    Ok(())
}

/// CSV header used by [`export_csv_field`].
pub const FIELD_CSV_HEADER: &str = "u1,u2,omega";

/// Sample a scalar field over the grid vertices and write one CSV row per
/// vertex, in the same row-major order as the table export. Masked field
/// values render as empty cells.
pub fn export_csv_field(field: &CalapsoField, grid: &GridSpec, writer: &mut impl Write) -> Result<()> {
    writeln!(writer, "{FIELD_CSV_HEADER}")?;
    for i1 in 0..grid.n1 {
        for i2 in 0..grid.n2 {
            let (u1, u2) = grid.vertex(i1, i2);
            match field.eval(u1, u2) {
                Some(v) => writeln!(writer, "{},{},{}", fmt(u1), fmt(u2), fmt(v))?,
                None => writeln!(writer, "{},{},", fmt(u1), fmt(u2))?,
            }
        }
    }
    Ok(())
}

/// Everything needed to reproduce a run's outputs: parameter echo, derived
/// constants, classification, tolerances and the hash of the run inputs.
/// No timestamps; identical inputs give identical manifests.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub tool: &'static str,
    pub version: &'static str,
    /// Hex digest of the run inputs (argv), when invoked through the CLI.
    pub inputs_hash: Option<String>,
    pub b: f64,
    pub c: f64,
    pub case: CaseTag,
    pub coefficients: Coefficients,
    /// Sign of the closed-form Calapso fields.
    pub calapso_epsilon: f64,
    pub tolerances: MaskTolerances,
    pub classification: GeometryClass,
    /// Window the singular lattice below was enumerated in.
    pub lattice_window: Window,
    pub singular_lattice: Vec<(f64, f64)>,
}

/// Assemble the manifest for one family member.
pub fn run_manifest(
    params: &FamilyParams,
    tol: MaskTolerances,
    lattice_window: Window,
    inputs_hash: Option<String>,
) -> RunManifest {
    RunManifest {
        tool: "isothermic",
        version: env!("CARGO_PKG_VERSION"),
        inputs_hash,
        b: params.b(),
        c: params.c(),
        case: params.case(),
        coefficients: params.coeffs(),
        calapso_epsilon: params.epsilon(),
        tolerances: tol,
        classification: classify_geometry(params),
        lattice_window,
        singular_lattice: singular_points(params, &lattice_window),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::{Coefficients, FamilyParams};
    use crate::grid::{sample_grid, GridSpec};

    fn two_bubble_inside() -> FamilyParams {
        FamilyParams::new(4.0 * 6.0_f64.sqrt(), 3.0, Coefficients::Normalized { a1: 4.0, b1: 1.0 }).unwrap()
    }

    fn unmasked_9x9() -> SampleTable {
        let grid = GridSpec::new(
            Window::new(-2.0, 2.0, 0.0, std::f64::consts::TAU),
            9,
            9,
            MaskTolerances::default(),
        )
        .unwrap();
        sample_grid(&two_bubble_inside().profiles(), &grid)
    }

    #[test]
    fn obj_counts_for_unmasked_grid() {
        let mut buf = Vec::new();
        let stats = export_obj(&unmasked_9x9(), &mut buf, false).unwrap();
        assert_eq!(stats, ObjStats { vertices: 81, faces: 64 });
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().filter(|l| l.starts_with("v ")).count(), 81);
        assert_eq!(text.lines().filter(|l| l.starts_with("f ")).count(), 64);
    }

    #[test]
    fn obj_drops_cells_touching_masked_vertex() {
        let p = FamilyParams::new(0.0, 3.0, Coefficients::SingularNormalized { epsilon1: 1 }).unwrap();
        let q = std::f64::consts::FRAC_PI_4;
        let grid = GridSpec::new(Window::new(-0.1, 0.1, q - 0.1, q + 0.1), 5, 5, MaskTolerances::default())
            .unwrap();
        let table = sample_grid(&p.profiles(), &grid);
        assert_eq!(table.masked_count(), 1);
        let mut buf = Vec::new();
        let stats = export_obj(&table, &mut buf, false).unwrap();
        assert_eq!(stats, ObjStats { vertices: 24, faces: 12 });
    }

    #[test]
    fn obj_with_normals_pairs_indices() {
        let mut buf = Vec::new();
        export_obj(&unmasked_9x9(), &mut buf, true).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().filter(|l| l.starts_with("vn ")).count(), 81);
        assert!(text.lines().any(|l| l.starts_with("f 1//1 ")));
    }

    #[test]
    fn fully_masked_table_is_an_error_not_an_empty_file() {
        let p = FamilyParams::new(0.0, 3.0, Coefficients::SingularNormalized { epsilon1: 1 }).unwrap();
        let q = std::f64::consts::FRAC_PI_4;
        let eps = 1e-6;
        let grid = GridSpec::new(Window::new(-eps, eps, q - eps, q + eps), 2, 2, MaskTolerances::default())
            .unwrap();
        let table = sample_grid(&p.profiles(), &grid);
        assert_eq!(table.masked_count(), 4);
        let mut buf = Vec::new();
        assert!(matches!(export_obj(&table, &mut buf, false), Err(Error::EmptyMesh)));
        assert!(buf.is_empty());
    }

    #[test]
    fn csv_table_has_header_and_one_row_per_vertex() {
        let grid = GridSpec::new(Window::new(0.0, 1.0, 0.0, 1.0), 2, 2, MaskTolerances::default()).unwrap();
        let table = sample_grid(&two_bubble_inside().profiles(), &grid);
        let mut buf = Vec::new();
        export_csv_table(&table, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines.len(), 5);
        assert_eq!(lines[0], TABLE_CSV_HEADER);
        assert!(lines[1].ends_with(",ok"));
    }

    #[test]
    fn masked_csv_rows_have_empty_numeric_cells() {
        let p = FamilyParams::new(0.0, 3.0, Coefficients::SingularNormalized { epsilon1: 1 }).unwrap();
        let q = std::f64::consts::FRAC_PI_4;
        let grid = GridSpec::new(Window::new(-0.1, 0.1, q - 0.1, q + 0.1), 5, 5, MaskTolerances::default())
            .unwrap();
        let table = sample_grid(&p.profiles(), &grid);
        let mut buf = Vec::new();
        export_csv_table(&table, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let masked: Vec<_> = text.lines().filter(|l| l.ends_with("near_singular")).collect();
        assert_eq!(masked.len(), 1);
        let cells: Vec<_> = masked[0].split(',').collect();
        assert_eq!(cells.len(), 14);
        for cell in &cells[2..13] {
            assert!(cell.is_empty(), "expected empty numeric cell, got {cell}");
        }
        assert!(!text.contains("NaN") && !text.contains("nan"));
    }

    #[test]
    fn field_csv_matches_frozen_value() {
        use crate::calapso::{make_field, FieldKind};
        let field = make_field(&two_bubble_inside(), FieldKind::Omega, MaskTolerances::default()).unwrap();
        let grid = GridSpec::new(Window::new(0.0, 1.0, 0.0, 1.0), 3, 3, MaskTolerances::default()).unwrap();
        let mut buf = Vec::new();
        export_csv_field(&field, &grid, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines.len(), 10);
        assert_eq!(lines[0], FIELD_CSV_HEADER);
        let first: f64 = lines[1].split(',').nth(2).unwrap().parse().unwrap();
        assert!((first - 1.9370396128453431).abs() < 1e-12);
    }

    #[test]
    fn exports_are_byte_deterministic() {
        let table = unmasked_9x9();
        let mut a = Vec::new();
        let mut b = Vec::new();
        export_obj(&table, &mut a, true).unwrap();
        export_obj(&table, &mut b, true).unwrap();
        assert_eq!(a, b);
        let mut a = Vec::new();
        let mut b = Vec::new();
        export_csv_table(&table, &mut a).unwrap();
        export_csv_table(&table, &mut b).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn manifest_reports_periods_and_lattice() {
        let p = FamilyParams::new(0.0, 3.0, Coefficients::SingularNormalized { epsilon1: 1 }).unwrap();
        let manifest = run_manifest(
            &p,
            MaskTolerances::default(),
            Window::new(-1.0, 1.0, 0.0, std::f64::consts::TAU),
            Some("abc123".into()),
        );
        assert_eq!(manifest.singular_lattice.len(), 2);
        assert!(manifest.classification.planar_ends);
        let json = serde_json::to_string(&manifest).unwrap();
        assert!(json.contains("\"inputs_hash\":\"abc123\""));
    }
}
