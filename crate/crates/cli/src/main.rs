//! Deterministic CLI for constructing the cylinder-derived isothermic
//! surface family, exporting meshes and field samples, and running the
//! verification suite. Identical argv produces byte-identical output files
//! and reports.
//!
//! Exit codes: 0 success, 1 validation error, 2 verification failure,
//! 3 I/O error.

mod audit;

use std::fs::File;
use std::io::{BufWriter, Write};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use sha2::{Digest, Sha256};

use audit::{run_audit, AuditConfig, CheckStatus};
use isothermic::{
    auto_patch, calapso_residual, classify_geometry, export_csv_field, export_csv_table, export_obj,
    make_field, residual_convergence_order, run_manifest, sample_grid_parallel, singular_points,
    Coefficients, FamilyParams, FieldKind, GridSpec, MaskTolerances, PatchFloors, Window,
};

#[derive(Parser)]
#[command(
    name = "isothermic",
    version,
    about = "Isothermic surfaces from Ribaucour transformations of the cylinder: construction, exports, verification"
)]
struct Cli {
    /// Emit machine-readable JSON (reports on stdout, errors as single-line
    /// JSON on stderr)
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Validate family parameters and print the run manifest
    Family(FamilyCmd),
    /// Sample the surface on a grid and write a CSV table
    Sample(SampleCmd),
    /// Sample the surface on a grid and write an ASCII OBJ mesh
    Mesh(MeshCmd),
    /// Export a Calapso field and report its finite-difference residual
    Calapso(CalapsoCmd),
    /// List the singular lattice inside a window
    Singular(SingularCmd),
    /// Print the bubble/periodicity classification record
    Classify(ClassifyCmd),
    /// Run the full verification suite (exit 2 on any failing check)
    Verify(VerifyCmd),
}

#[derive(Args)]
struct FamilyArgs {
    /// Integration parameter b
    #[arg(long, allow_hyphen_values = true)]
    b: f64,
    /// Transformation parameter c (nonzero)
    #[arg(long, allow_hyphen_values = true)]
    c: f64,
    /// Coefficients: "A1=<v>,B1=<v>" (normalized), "a1=..,b1=..,a2=..,b2=.."
    /// (general), or "singular:+1" / "singular:-1"
    #[arg(long)]
    coeffs: String,
    /// Masking tolerance for |f + g|
    #[arg(long, default_value_t = 1e-8)]
    tol_domain: f64,
    /// Masking tolerance for |M|
    #[arg(long, default_value_t = 1e-8)]
    tol_sing: f64,
}

impl FamilyArgs {
    fn tolerances(&self) -> MaskTolerances {
        MaskTolerances { domain: self.tol_domain, singular: self.tol_sing }
    }

    fn build(&self) -> Result<FamilyParams, CliError> {
        let coeffs = parse_coeffs(&self.coeffs)?;
        FamilyParams::new(self.b, self.c, coeffs).map_err(CliError::from)
    }

    /// Build without the coefficient-relation gate; the verification suite
    /// reports the violation as a failing first-integral check instead.
    fn build_unvalidated(&self) -> Result<FamilyParams, CliError> {
        let coeffs = parse_coeffs(&self.coeffs)?;
        FamilyParams::new_unvalidated(self.b, self.c, coeffs).map_err(CliError::from)
    }
}

#[derive(Args)]
struct GridArgs {
    /// u1 range as MIN:MAX
    #[arg(long, default_value = "-2:2", allow_hyphen_values = true)]
    u1: String,
    /// u2 range as MIN:MAX
    #[arg(long, default_value = "0:6.283185307179586", allow_hyphen_values = true)]
    u2: String,
    /// Grid resolution as N1xN2 (vertices per axis)
    #[arg(long, default_value = "200x200")]
    res: String,
}

impl GridArgs {
    fn window(&self) -> Result<Window, CliError> {
        let (u1_min, u1_max) = parse_range(&self.u1)?;
        let (u2_min, u2_max) = parse_range(&self.u2)?;
        Ok(Window::new(u1_min, u1_max, u2_min, u2_max))
    }

    fn grid(&self, tol: MaskTolerances) -> Result<GridSpec, CliError> {
        let (n1, n2) = parse_res(&self.res)?;
        GridSpec::new(self.window()?, n1, n2, tol).map_err(CliError::from)
    }
}

#[derive(Args)]
struct FamilyCmd {
    #[command(flatten)]
    family: FamilyArgs,
    /// Window for the singular-lattice listing in the manifest, MIN:MAX
    #[arg(long, default_value = "-6.283185307179586:6.283185307179586", allow_hyphen_values = true)]
    u1: String,
    #[arg(long, default_value = "-6.283185307179586:6.283185307179586", allow_hyphen_values = true)]
    u2: String,
}

#[derive(Args)]
struct SampleCmd {
    #[command(flatten)]
    family: FamilyArgs,
    #[command(flatten)]
    grid: GridArgs,
    /// Output CSV path
    #[arg(long)]
    out: std::path::PathBuf,
}

#[derive(Args)]
struct MeshCmd {
    #[command(flatten)]
    family: FamilyArgs,
    #[command(flatten)]
    grid: GridArgs,
    /// Output OBJ path
    #[arg(long)]
    out: std::path::PathBuf,
    /// Also write per-vertex normals (vn records)
    #[arg(long)]
    normals: bool,
}

#[derive(Args)]
struct CalapsoCmd {
    #[command(flatten)]
    family: FamilyArgs,
    #[command(flatten)]
    grid: GridArgs,
    /// Which closed-form field: "omega" or "capital-omega"
    #[arg(long, default_value = "omega")]
    kind: String,
    /// Optional CSV export path for field samples over the grid
    #[arg(long)]
    out: Option<std::path::PathBuf>,
    /// Residual patch as U1MIN:U1MAX,U2MIN:U2MAX (default: auto-selected
    /// inside the window)
    #[arg(long, allow_hyphen_values = true)]
    patch: Option<String>,
    /// Decreasing step sizes for the residual convergence estimate
    #[arg(long, default_value = "0.04,0.02,0.01")]
    h_list: String,
}

#[derive(Args)]
struct SingularCmd {
    #[command(flatten)]
    family: FamilyArgs,
    #[arg(long, default_value = "-6.283185307179586:6.283185307179586", allow_hyphen_values = true)]
    u1: String,
    #[arg(long, default_value = "-6.283185307179586:6.283185307179586", allow_hyphen_values = true)]
    u2: String,
}

#[derive(Args)]
struct ClassifyCmd {
    #[command(flatten)]
    family: FamilyArgs,
}

#[derive(Args)]
struct VerifyCmd {
    #[command(flatten)]
    family: FamilyArgs,
    /// Audit window, MIN:MAX per axis
    #[arg(long, default_value = "-5:5", allow_hyphen_values = true)]
    u1: String,
    #[arg(long, default_value = "-5:5", allow_hyphen_values = true)]
    u2: String,
    /// Low-discrepancy points for the identity suite
    #[arg(long, default_value_t = 1000)]
    points: usize,
    /// Audit points for the finite-difference checks
    #[arg(long, default_value_t = 100)]
    fd_points: usize,
}

#[derive(Debug)]
enum CliError {
    Validation(String),
    Verification(String),
    Io(String),
}

impl CliError {
    fn kind(&self) -> &'static str {
        match self {
            CliError::Validation(_) => "validation",
            CliError::Verification(_) => "verification",
            CliError::Io(_) => "io",
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Validation(m) | CliError::Verification(m) | CliError::Io(m) => m,
        }
    }

    fn exit_code(&self) -> u8 {
        match self {
            CliError::Validation(_) => 1,
            CliError::Verification(_) => 2,
            CliError::Io(_) => 3,
        }
    }
}

impl From<isothermic::Error> for CliError {
    fn from(e: isothermic::Error) -> Self {
        match e {
            isothermic::Error::Io(io) => CliError::Io(io.to_string()),
            other => CliError::Validation(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

fn parse_coeffs(spec: &str) -> Result<Coefficients, CliError> {
    if let Some(rest) = spec.strip_prefix("singular:") {
        let epsilon1 = match rest {
            "+1" | "1" => 1,
            "-1" => -1,
            other => {
                return Err(CliError::Validation(format!(
                    "singular coefficient branch must be +1 or -1, got {other:?}"
                )))
            }
        };
        return Ok(Coefficients::SingularNormalized { epsilon1 });
    }
    let mut pairs = Vec::new();
    for item in spec.split(',') {
        let Some((key, value)) = item.split_once('=') else {
            return Err(CliError::Validation(format!(
                "coefficient item {item:?} is not KEY=VALUE"
            )));
        };
        let value: f64 = value.trim().parse().map_err(|_| {
            CliError::Validation(format!("coefficient {key} has non-numeric value {value:?}"))
        })?;
        pairs.push((key.trim().to_string(), value));
    }
    let mut keys: Vec<&str> = pairs.iter().map(|(k, _)| k.as_str()).collect();
    keys.sort_unstable();
    let get = |name: &str| pairs.iter().find(|(k, _)| k == name).map(|(_, v)| *v);
    match keys.as_slice() {
        ["A1", "B1"] => Ok(Coefficients::Normalized {
            a1: get("A1").expect("key present"),
            b1: get("B1").expect("key present"),
        }),
        ["a1", "a2", "b1", "b2"] => Ok(Coefficients::General {
            a1: get("a1").expect("key present"),
            b1: get("b1").expect("key present"),
            a2: get("a2").expect("key present"),
            b2: get("b2").expect("key present"),
        }),
        _ => Err(CliError::Validation(format!(
            "coefficients must be A1,B1 or a1,b1,a2,b2 or singular:<+1|-1>; got keys {keys:?}"
        ))),
    }
}

fn parse_range(spec: &str) -> Result<(f64, f64), CliError> {
    let Some((lo, hi)) = spec.split_once(':') else {
        return Err(CliError::Validation(format!("range {spec:?} is not MIN:MAX")));
    };
    let lo: f64 = lo.trim().parse().map_err(|_| CliError::Validation(format!("bad range minimum {lo:?}")))?;
    let hi: f64 = hi.trim().parse().map_err(|_| CliError::Validation(format!("bad range maximum {hi:?}")))?;
    if !(lo < hi) {
        return Err(CliError::Validation(format!("range {spec:?} must satisfy MIN < MAX")));
    }
    Ok((lo, hi))
}

fn parse_res(spec: &str) -> Result<(usize, usize), CliError> {
    let Some((n1, n2)) = spec.split_once('x') else {
        return Err(CliError::Validation(format!("resolution {spec:?} is not N1xN2")));
    };
    let n1 = n1.trim().parse().map_err(|_| CliError::Validation(format!("bad vertex count {n1:?}")))?;
    let n2 = n2.trim().parse().map_err(|_| CliError::Validation(format!("bad vertex count {n2:?}")))?;
    Ok((n1, n2))
}

fn parse_h_list(spec: &str) -> Result<Vec<f64>, CliError> {
    let steps: Result<Vec<f64>, _> = spec.split(',').map(|s| s.trim().parse::<f64>()).collect();
    steps.map_err(|_| CliError::Validation(format!("bad step list {spec:?}")))
}

fn parse_patch(spec: &str) -> Result<Window, CliError> {
    let Some((u1, u2)) = spec.split_once(',') else {
        return Err(CliError::Validation(format!(
            "patch {spec:?} is not U1MIN:U1MAX,U2MIN:U2MAX"
        )));
    };
    let (u1_min, u1_max) = parse_range(u1)?;
    let (u2_min, u2_max) = parse_range(u2)?;
    Ok(Window::new(u1_min, u1_max, u2_min, u2_max))
}

fn argv_hash() -> String {
    let mut hasher = Sha256::new();
    for arg in std::env::args() {
        hasher.update(arg.as_bytes());
        hasher.update([0u8]);
    }
    format!("{:x}", hasher.finalize())
}

fn create_out(path: &std::path::Path) -> Result<BufWriter<File>, CliError> {
    Ok(BufWriter::new(File::create(path)?))
}

fn to_json<T: serde::Serialize>(value: &T, pretty: bool) -> String {
    if pretty {
        serde_json::to_string_pretty(value).expect("serializable report")
    } else {
        serde_json::to_string(value).expect("serializable report")
    }
}

#[derive(serde::Serialize)]
struct FileSummary<'a> {
    path: &'a str,
    rows: usize,
    masked: usize,
}

#[derive(serde::Serialize)]
struct MeshSummary<'a> {
    path: &'a str,
    vertices: usize,
    faces: usize,
}

#[derive(serde::Serialize)]
struct ResidualSummary {
    kind: &'static str,
    epsilon: f64,
    patch: Window,
    steps: Vec<f64>,
    max_abs: Vec<f64>,
    l2: Vec<f64>,
    order: f64,
}

fn run(cli: &Cli) -> Result<u8, CliError> {
    match &cli.command {
        Command::Family(cmd) => {
            let params = cmd.family.build()?;
            let (u1_min, u1_max) = parse_range(&cmd.u1)?;
            let (u2_min, u2_max) = parse_range(&cmd.u2)?;
            let manifest = run_manifest(
                &params,
                cmd.family.tolerances(),
                Window::new(u1_min, u1_max, u2_min, u2_max),
                Some(argv_hash()),
            );
            println!("{}", to_json(&manifest, !cli.json));
            Ok(0)
        }
        Command::Sample(cmd) => {
            let params = cmd.family.build()?;
            let grid = cmd.grid.grid(cmd.family.tolerances())?;
            let table = sample_grid_parallel(&params.profiles(), &grid);
            let mut out = create_out(&cmd.out)?;
            export_csv_table(&table, &mut out)?;
            out.flush()?;
            let summary = FileSummary {
                path: cmd.out.to_str().unwrap_or("<non-utf8>"),
                rows: table.rows.len(),
                masked: table.masked_count(),
            };
            println!("{}", if cli.json { to_json(&summary, false) } else { format!("wrote {}: {} rows ({} masked)", summary.path, summary.rows, summary.masked) });
            Ok(0)
        }
        Command::Mesh(cmd) => {
            let params = cmd.family.build()?;
            let grid = cmd.grid.grid(cmd.family.tolerances())?;
            let table = sample_grid_parallel(&params.profiles(), &grid);
            let mut out = create_out(&cmd.out)?;
            let stats = export_obj(&table, &mut out, cmd.normals)?;
            out.flush()?;
            let summary = MeshSummary {
                path: cmd.out.to_str().unwrap_or("<non-utf8>"),
                vertices: stats.vertices,
                faces: stats.faces,
            };
            println!("{}", if cli.json { to_json(&summary, false) } else { format!("wrote {}: {} vertices, {} quads", summary.path, summary.vertices, summary.faces) });
            Ok(0)
        }
        Command::Calapso(cmd) => {
            let params = cmd.family.build()?;
            let tol = cmd.family.tolerances();
            let kind = match cmd.kind.as_str() {
                "omega" => FieldKind::Omega,
                "capital-omega" => FieldKind::CapitalOmega,
                other => {
                    return Err(CliError::Validation(format!(
                        "field kind must be omega or capital-omega, got {other:?}"
                    )))
                }
            };
            let field = make_field(&params, kind, tol)?;
            if let Some(path) = &cmd.out {
                let grid = cmd.grid.grid(tol)?;
                let mut out = create_out(path)?;
                export_csv_field(&field, &grid, &mut out)?;
                out.flush()?;
            }
            let window = cmd.grid.window()?;
            let patch = match &cmd.patch {
                Some(spec) => parse_patch(spec)?,
                None => auto_patch(&params.profiles(), &field, &window, 81, PatchFloors::default())
                    .ok_or_else(|| {
                        CliError::Validation("no admissible residual patch inside the window".into())
                    })?,
            };
            let steps = parse_h_list(&cmd.h_list)?;
            let mut max_abs = Vec::with_capacity(steps.len());
            let mut l2 = Vec::with_capacity(steps.len());
            for &h in &steps {
                let report = calapso_residual(&field, &patch, h)?;
                max_abs.push(report.max_abs);
                l2.push(report.l2);
            }
            let order = residual_convergence_order(&field, &patch, &steps)?;
            let summary = ResidualSummary {
                kind: match kind {
                    FieldKind::Omega => "omega",
                    FieldKind::CapitalOmega => "capital-omega",
                    FieldKind::Custom => unreachable!("CLI builds closed-form fields only"),
                },
                epsilon: params.epsilon(),
                patch,
                steps,
                max_abs,
                l2,
                order,
            };
            if cli.json {
                println!("{}", to_json(&summary, false));
            } else {
                println!(
                    "field {} (epsilon {:+}): residual order {:.3} on patch [{}, {}] x [{}, {}]",
                    summary.kind,
                    summary.epsilon,
                    summary.order,
                    summary.patch.u1_min,
                    summary.patch.u1_max,
                    summary.patch.u2_min,
                    summary.patch.u2_max
                );
                for ((h, m), l) in summary.steps.iter().zip(&summary.max_abs).zip(&summary.l2) {
                    println!("  h = {h}: max |r| = {m:.6e}, rms = {l:.6e}");
                }
            }
            Ok(0)
        }
        Command::Singular(cmd) => {
            let params = cmd.family.build()?;
            let (u1_min, u1_max) = parse_range(&cmd.u1)?;
            let (u2_min, u2_max) = parse_range(&cmd.u2)?;
            let lattice = singular_points(&params, &Window::new(u1_min, u1_max, u2_min, u2_max));
            if cli.json {
                println!("{}", to_json(&lattice, false));
            } else if lattice.is_empty() {
                println!("no singular points in window");
            } else {
                for (u1, u2) in lattice {
                    println!("{u1:.16e} {u2:.16e}");
                }
            }
            Ok(0)
        }
        Command::Classify(cmd) => {
            let params = cmd.family.build()?;
            let record = classify_geometry(&params);
            println!("{}", to_json(&record, !cli.json));
            Ok(0)
        }
        Command::Verify(cmd) => {
            let params = cmd.family.build_unvalidated()?;
            let (u1_min, u1_max) = parse_range(&cmd.u1)?;
            let (u2_min, u2_max) = parse_range(&cmd.u2)?;
            let cfg = AuditConfig {
                window: Window::new(u1_min, u1_max, u2_min, u2_max),
                points: cmd.points,
                fd_points: cmd.fd_points,
                tol: cmd.family.tolerances(),
            };
            let report = run_audit(&params, &cfg);
            if cli.json {
                println!("{}", to_json(&report, false));
            } else {
                for check in &report.checks {
                    let tag = match check.status {
                        CheckStatus::Pass => "PASS",
                        CheckStatus::Fail => "FAIL",
                        CheckStatus::Skipped => "SKIP",
                    };
                    println!("{tag} {}: {}", check.name, check.detail);
                }
                println!("verification {}", if report.pass { "passed" } else { "failed" });
            }
            if report.pass {
                Ok(0)
            } else {
                let failing: Vec<&str> = report
                    .checks
                    .iter()
                    .filter(|c| c.status == CheckStatus::Fail)
                    .map(|c| c.name)
                    .collect();
                Err(CliError::Verification(format!("failing checks: {}", failing.join(", "))))
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            if cli.json {
                eprintln!(
                    "{}",
                    serde_json::json!({ "error": err.message(), "kind": err.kind() })
                );
            } else {
                eprintln!("error ({}): {}", err.kind(), err.message());
            }
            ExitCode::from(err.exit_code())
        }
    }
}
