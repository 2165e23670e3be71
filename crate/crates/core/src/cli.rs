//! Command-line front end: argument parsing, orchestration of the pipelines,
//! JSON report emission and plot-data export.
//!
//! Exit codes: `0` when every residual is within tolerance, `1` when the
//! computation ran but a check or verdict failed (the report is still
//! written), `2` when the input could not be used.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use nalgebra::{Matrix3, Vector3};
use num_complex::Complex64;
use serde::Serialize;
use serde_json::{json, Value};

use crate::analysis::{
    analyze, gauss_equation_residual, hopf_summary, read_surface, rigid_form_residual,
    write_surface, SurfaceGrid,
};
use crate::boundary::{
    antipodality_check, boundary_relations_residual, fit_plane_circle, free_boundary_residual,
    local_expansion, torsion_profile, BoundaryCurve, CircleFit, RelationResiduals, Rim,
    TorsionProfile,
};
use crate::catenoid::{catenoid_grid, solve_catenoid_params};
use crate::domain::{make_grid, AnnulusSpec};
use crate::error::{Error, Result};
use crate::spectral::{classify, estimate_weierstrass_data, Verdict};
use crate::weierstrass::{
    integrate_immersion, path_integral, periods, read_data, Base, PathOrder, WeierstrassData,
};

/// Environment variable capping the worker thread count (`0` = automatic).
pub const THREADS_ENV: &str = "MINANN_THREADS";

/// Parsed command line.
#[derive(Debug, Clone, Parser)]
#[command(
    name = "minann",
    version,
    about = "Free boundary minimal annuli toolkit"
)]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Solve for the critical catenoid constants.
    CatenoidParams {
        /// Bisection tolerance on `t`.
        #[arg(long, default_value_t = 1e-13)]
        tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run every check on the analytic critical catenoid.
    VerifyCatenoid {
        #[command(flatten)]
        grid: GridArgs,
        /// Pass threshold for every residual.
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write `<stem>.csv` and `<stem>.obj` of the sampled surface.
        #[arg(long, value_name = "STEM")]
        emit_mesh: Option<PathBuf>,
    },
    /// Integrate Weierstrass data into a surface file.
    WeierstrassIntegrate {
        #[arg(long)]
        data: PathBuf,
        /// Outer radius of the symmetric annulus `R⁻¹ ≤ |z| ≤ R`.
        #[arg(long = "R", value_name = "R")]
        outer_radius: f64,
        #[command(flatten)]
        grid: GridArgs,
        /// Destination surface file.
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_name = "STEM")]
        emit_mesh: Option<PathBuf>,
    },
    /// Conformality, harmonicity, Hopf, Gauss-equation and free-boundary residuals.
    Analyze {
        #[arg(long)]
        surface: PathBuf,
        #[arg(long, default_value_t = 1e-2)]
        tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_name = "STEM")]
        emit_mesh: Option<PathBuf>,
    },
    /// Boundary circles: torsion, circle fits, antipodality and boundary relations.
    BoundaryReport {
        #[arg(long)]
        surface: PathBuf,
        #[arg(long, default_value_t = 1e-2)]
        tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Per-θ torsion profiles of both boundary circles.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Classify a surface; exit 0 only for the critical catenoid.
    Classify {
        #[arg(long)]
        surface: PathBuf,
        #[arg(long)]
        data: Option<PathBuf>,
        /// Stage tolerance (default depends on the derivative mode).
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_name = "STEM")]
        emit_mesh: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, Args)]
pub struct GridArgs {
    /// Radial nodes.
    #[arg(long, default_value_t = 64)]
    pub nr: usize,
    /// Angular nodes.
    #[arg(long, default_value_t = 256)]
    pub ntheta: usize,
}

impl RunConfig {
    /// Check tolerances and paths before any computation.
    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::Parameter(format!(
                    "--{name} must be positive, got {v}"
                )))
            }
        };
        let input = |name: &str, p: &Path| {
            if p.is_file() {
                Ok(())
            } else {
                Err(Error::Parameter(format!(
                    "--{name}: no such file {}",
                    p.display()
                )))
            }
        };
        let output = |name: &str, p: &Path| {
            let parent = p.parent().filter(|d| !d.as_os_str().is_empty());
            match parent {
                Some(d) if !d.is_dir() => Err(Error::Parameter(format!(
                    "--{name}: directory {} does not exist",
                    d.display()
                ))),
                _ => Ok(()),
            }
        };
        let outputs = |out: &Option<PathBuf>, mesh: &Option<PathBuf>| -> Result<()> {
            if let Some(p) = out {
                output("out", p)?;
            }
            if let Some(p) = mesh {
                output("emit-mesh", p)?;
            }
            Ok(())
        };
        match &self.command {
            Command::CatenoidParams { tol, out } => {
                positive("tol", *tol)?;
                outputs(out, &None)
            }
            Command::VerifyCatenoid {
                tol,
                out,
                emit_mesh,
                ..
            } => {
                positive("tol", *tol)?;
                outputs(out, emit_mesh)
            }
            Command::WeierstrassIntegrate {
                data,
                outer_radius,
                out,
                emit_mesh,
                ..
            } => {
                input("data", data)?;
                positive("R", *outer_radius)?;
                output("out", out)?;
                outputs(&None, emit_mesh)
            }
            Command::Analyze {
                surface,
                tol,
                out,
                emit_mesh,
            } => {
                input("surface", surface)?;
                positive("tol", *tol)?;
                outputs(out, emit_mesh)
            }
            Command::BoundaryReport {
                surface,
                tol,
                out,
                csv,
            } => {
                input("surface", surface)?;
                positive("tol", *tol)?;
                outputs(out, csv)
            }
            Command::Classify {
                surface,
                data,
                tol,
                out,
                emit_mesh,
            } => {
                input("surface", surface)?;
                if let Some(d) = data {
                    input("data", d)?;
                }
                if let Some(t) = tol {
                    positive("tol", *t)?;
                }
                outputs(out, emit_mesh)
            }
        }
    }

    fn out(&self) -> Option<&Path> {
        match &self.command {
            Command::CatenoidParams { out, .. }
            | Command::VerifyCatenoid { out, .. }
            | Command::Analyze { out, .. }
            | Command::BoundaryReport { out, .. }
            | Command::Classify { out, .. } => out.as_deref(),
            Command::WeierstrassIntegrate { .. } => None,
        }
    }
}

/// Result of one command.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitStatus {
    Success = 0,
    Failed = 1,
    InputError = 2,
}

impl ExitStatus {
    pub fn code(self) -> i32 {
        self as i32
    }

    fn from_pass(pass: bool) -> Self {
        if pass {
            Self::Success
        } else {
            Self::Failed
        }
    }
}

/// Status and JSON report of a finished command.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub status: ExitStatus,
    pub report: Value,
}

/// Errors that mean "could not compute" rather than "computed and failed".
fn is_input_error(e: &Error) -> bool {
    matches!(
        e,
        Error::Parameter(_)
            | Error::Domain(_)
            | Error::Resolution(_)
            | Error::Data(_)
            | Error::Format(_)
            | Error::Io(_)
            | Error::Json(_)
    )
}

fn error_outcome(e: &Error) -> Outcome {
    let status = if is_input_error(e) {
        ExitStatus::InputError
    } else {
        ExitStatus::Failed
    };
    Outcome {
        status,
        report: json!({ "error": e.to_string() }),
    }
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("reports serialize to JSON")
}

/// Largest residual check, returned alongside the pass flag.
#[derive(Default)]
struct Checks {
    values: BTreeMap<String, f64>,
}

impl Checks {
    fn add(&mut self, name: &str, v: f64) {
        self.values.insert(name.to_string(), v);
    }

    fn passes(&self, tol: f64) -> bool {
        self.values.values().all(|v| *v < tol)
    }

    fn value(&self) -> Value {
        to_value(&self.values)
    }
}

/// Execute a validated configuration.
pub fn run(config: &RunConfig) -> Outcome {
    if let Err(e) = config.validate() {
        return error_outcome(&e);
    }
    let result = match &config.command {
        Command::CatenoidParams { tol, .. } => catenoid_params(*tol),
        Command::VerifyCatenoid {
            grid,
            tol,
            emit_mesh,
            ..
        } => verify_catenoid(*grid, *tol, emit_mesh.as_deref()),
        Command::WeierstrassIntegrate {
            data,
            outer_radius,
            grid,
            out,
            emit_mesh,
        } => weierstrass_integrate(data, *outer_radius, *grid, out, emit_mesh.as_deref()),
        Command::Analyze {
            surface,
            tol,
            emit_mesh,
            ..
        } => analyze_command(surface, *tol, emit_mesh.as_deref()),
        Command::BoundaryReport {
            surface, tol, csv, ..
        } => boundary_report(surface, *tol, csv.as_deref()),
        Command::Classify {
            surface,
            data,
            tol,
            emit_mesh,
            ..
        } => classify_command(surface, data.as_deref(), *tol, emit_mesh.as_deref()),
    };
    result.unwrap_or_else(|e| error_outcome(&e))
}

fn catenoid_params(tol: f64) -> Result<Outcome> {
    let p = solve_catenoid_params(tol)?;
    Ok(Outcome {
        status: ExitStatus::Success,
        report: to_value(&p),
    })
}

fn fit_report(c: &BoundaryCurve) -> Result<(CircleFit, TorsionProfile)> {
    Ok((fit_plane_circle(c)?, torsion_profile(c)))
}

fn verify_catenoid(grid: GridArgs, tol: f64, mesh: Option<&Path>) -> Result<Outcome> {
    let p = solve_catenoid_params(1e-13)?;
    let s = catenoid_grid(&p, grid.nr, grid.ntheta)?;
    if let Some(stem) = mesh {
        emit_plot_data(&s, stem)?;
    }
    let mut checks = Checks::default();

    let analysis = analyze(&s)?;
    checks.add("conformality", analysis.conformality);
    checks.add("harmonicity", analysis.harmonicity);
    checks.add("hopf_constancy", analysis.hopf_constancy);
    checks.add("hopf_imaginary", analysis.hopf_value[1].abs());
    checks.add(
        "hopf_value",
        (analysis.hopf_value[0] - 4.0 * p.a * p.a).abs(),
    );
    checks.add("minimality", analysis.minimality);
    checks.add("rigid_forms", rigid_form_residual(&s, p.a)?);
    checks.add("gauss_equation", gauss_equation_residual(&s, p.a)?);

    let fb = free_boundary_residual(&s)?;
    checks.add("sphere", fb.sphere_residual);
    checks.add("orthogonality", fb.orthogonality_residual);
    let (outer_fit, outer_tau) = fit_report(&BoundaryCurve::from_surface(&s, Rim::Outer)?)?;
    let (inner_fit, inner_tau) = fit_report(&BoundaryCurve::from_surface(&s, Rim::Inner)?)?;
    checks.add("torsion", outer_tau.max_abs.max(inner_tau.max_abs));
    checks.add("planarity", outer_fit.planarity.max(inner_fit.planarity));
    checks.add(
        "circularity",
        outer_fit.circularity.max(inner_fit.circularity),
    );
    checks.add("outer_radius", (outer_fit.radius - p.t.tanh()).abs());
    checks.add(
        "outer_center",
        (outer_fit.center() - Vector3::new(0.0, 0.0, p.a * p.t)).norm(),
    );
    checks.add("antipodality", antipodality_check(&s)?);

    // g = z with A = a is the catenoid turned by π about the Z axis.
    let data = WeierstrassData::monomial(Complex64::new(1.0, 0.0), 1, p.a, 0.0)?;
    let period = periods(&data, 256)?;
    checks.add("periods", period.max_real_part());
    let w = integrate_immersion(&data, *s.grid(), Base::Centered)?;
    let half_turn = Matrix3::new(-1.0, 0.0, 0.0, 0.0, -1.0, 0.0, 0.0, 0.0, 1.0);
    let roundtrip = s
        .values()
        .iter()
        .zip(w.values())
        .map(|(u, v)| (u - half_turn * v).norm())
        .fold(0.0, f64::max);
    checks.add("weierstrass_roundtrip", roundtrip);
    let (z0, z1) = (
        Complex64::new(p.annulus().inner_radius, 0.0),
        Complex64::from_polar(p.r2, 2.0),
    );
    let path = (path_integral(&data, z0, z1, PathOrder::RadialFirst)?
        - path_integral(&data, z0, z1, PathOrder::AngularFirst)?)
    .norm();
    checks.add("path_independence", path);

    let estimated = estimate_weierstrass_data(&s, None, analysis.height, tol)?;
    let expansion = local_expansion(&estimated.data, Complex64::new(p.r2.ln(), 0.0))?;
    let relations =
        boundary_relations_residual(&expansion, estimated.data.height, estimated.data.theta0);
    checks.add("res5", relations.res5);
    checks.add("res8", relations.res8);
    checks.add("res10", relations.res10);
    checks.add("res_reality", relations.res_reality);
    checks.add("implied_height", (relations.implied_height - p.a).abs());

    let classification = classify(&s, None, None)?;
    if let Some(r) = classification.stages.reconstruction {
        checks.add("reconstruction", r);
    }
    let pass = checks.passes(tol) && classification.verdict == Verdict::CriticalCatenoid;
    Ok(Outcome {
        status: ExitStatus::from_pass(pass),
        report: json!({
            "pass": pass,
            "tolerance": tol,
            "n_r": grid.nr,
            "n_theta": grid.ntheta,
            "params": p,
            "residuals": checks.value(),
            "analysis": analysis,
            "free_boundary": fb,
            "outer_fit": outer_fit,
            "inner_fit": inner_fit,
            "periods": period.periods,
            "relations": relations,
            "classification": classification,
        }),
    })
}

fn weierstrass_integrate(
    data: &Path,
    outer_radius: f64,
    grid: GridArgs,
    out: &Path,
    mesh: Option<&Path>,
) -> Result<Outcome> {
    let d = read_data(data)?;
    let spec = AnnulusSpec::symmetric(outer_radius)?;
    let grid = make_grid(spec, grid.nr, grid.ntheta)?;
    let period = periods(&d, 256)?;
    let s = integrate_immersion(&d, grid, Base::Centered)?;
    write_surface(&s, out)?;
    if let Some(stem) = mesh {
        emit_plot_data(&s, stem)?;
    }
    Ok(Outcome {
        status: ExitStatus::Success,
        report: json!({
            "R": outer_radius,
            "n_r": grid.n_r,
            "n_theta": grid.n_theta,
            "periods": period.periods,
            "max_real_period": period.max_real_part(),
            "surface": out.display().to_string(),
        }),
    })
}

fn analyze_command(path: &Path, tol: f64, mesh: Option<&Path>) -> Result<Outcome> {
    let s = read_surface(path)?;
    if let Some(stem) = mesh {
        emit_plot_data(&s, stem)?;
    }
    let report = analyze(&s)?;
    let fb = free_boundary_residual(&s)?;
    let mut checks = Checks::default();
    checks.add("conformality", report.conformality);
    checks.add("harmonicity", report.harmonicity);
    checks.add("hopf_constancy", report.hopf_constancy);
    checks.add("gauss_residual", report.gauss_residual);
    checks.add("minimality", report.minimality);
    let mut pass_flags = BTreeMap::new();
    for (k, v) in &checks.values {
        pass_flags.insert(k.clone(), *v < tol);
    }
    let free_boundary_pass = fb.sphere_residual < tol && fb.orthogonality_residual < tol;
    pass_flags.insert("free_boundary".to_string(), free_boundary_pass);
    let pass = pass_flags.values().all(|p| *p);
    let mut value = to_value(&report);
    let obj = value.as_object_mut().expect("report is an object");
    obj.insert("free_boundary".to_string(), to_value(&fb));
    obj.insert("tolerance".to_string(), json!(tol));
    obj.insert("passes".to_string(), to_value(&pass_flags));
    obj.insert("pass".to_string(), json!(pass));
    Ok(Outcome {
        status: ExitStatus::from_pass(pass),
        report: value,
    })
}

/// JSON body of `boundary-report`.
#[derive(Debug, Clone, Serialize)]
pub struct BoundaryReport {
    pub sphere_residual: f64,
    pub orthogonality_residual: f64,
    pub torsion_max_outer: f64,
    pub torsion_max_inner: f64,
    pub outer_fit: Option<CircleFit>,
    pub inner_fit: Option<CircleFit>,
    pub antipodality: f64,
    pub relations: Option<RelationResiduals>,
    pub tolerance: f64,
    pub pass: bool,
    /// Reasons a section could not be computed.
    pub notes: Vec<String>,
}

fn boundary_report(path: &Path, tol: f64, csv: Option<&Path>) -> Result<Outcome> {
    let s = read_surface(path)?;
    let fb = free_boundary_residual(&s)?;
    let outer = BoundaryCurve::from_surface(&s, Rim::Outer)?;
    let inner = BoundaryCurve::from_surface(&s, Rim::Inner)?;
    let (tau_outer, tau_inner) = (torsion_profile(&outer), torsion_profile(&inner));
    if let Some(p) = csv {
        write_torsion_csv(&tau_outer, &tau_inner, p)?;
    }
    let mut notes = Vec::new();
    let mut fit = |c: &BoundaryCurve| match fit_plane_circle(c) {
        Ok(f) => Some(f),
        Err(e) => {
            notes.push(format!("{:?} fit: {e}", c.which));
            None
        }
    };
    let (outer_fit, inner_fit) = (fit(&outer), fit(&inner));
    let antipodality = antipodality_check(&s)?;
    let relations = (|| -> Result<RelationResiduals> {
        let height = hopf_summary(&s)?.height();
        let est = estimate_weierstrass_data(&s, None, height, tol)?;
        let w0 = Complex64::new(s.grid().spec.outer_radius.ln(), 0.0);
        let e = local_expansion(&est.data, w0)?;
        Ok(boundary_relations_residual(
            &e,
            est.data.height,
            est.data.theta0,
        ))
    })();
    let relations = match relations {
        Ok(r) => Some(r),
        Err(e) => {
            notes.push(format!("relations: {e}"));
            None
        }
    };
    let fits_pass = [&outer_fit, &inner_fit].iter().all(|f| {
        f.as_ref()
            .is_some_and(|f| f.planarity < tol && f.circularity < tol)
    });
    let relations_pass = relations
        .as_ref()
        .is_some_and(|r| r.res5.max(r.res8).max(r.res10).max(r.res_reality) < tol);
    let pass = fb.sphere_residual < tol
        && fb.orthogonality_residual < tol
        && tau_outer.max_abs.max(tau_inner.max_abs) < tol
        && antipodality < tol
        && fits_pass
        && relations_pass;
    let report = BoundaryReport {
        sphere_residual: fb.sphere_residual,
        orthogonality_residual: fb.orthogonality_residual,
        torsion_max_outer: tau_outer.max_abs,
        torsion_max_inner: tau_inner.max_abs,
        outer_fit,
        inner_fit,
        antipodality,
        relations,
        tolerance: tol,
        pass,
        notes,
    };
    Ok(Outcome {
        status: ExitStatus::from_pass(pass),
        report: to_value(&report),
    })
}

fn write_torsion_csv(outer: &TorsionProfile, inner: &TorsionProfile, path: &Path) -> Result<()> {
    let cell = |t: Option<f64>| t.map_or_else(String::new, |v| v.to_string());
    let mut text = String::from("theta,tau_outer,tau_inner\n");
    for (o, i) in outer.samples.iter().zip(&inner.samples) {
        let _ = writeln!(text, "{},{},{}", o.theta, cell(o.tau), cell(i.tau));
    }
    fs::write(path, text)?;
    Ok(())
}

fn classify_command(
    surface: &Path,
    data: Option<&Path>,
    tol: Option<f64>,
    mesh: Option<&Path>,
) -> Result<Outcome> {
    let s = read_surface(surface)?;
    let data = data.map(read_data).transpose()?;
    if let Some(stem) = mesh {
        emit_plot_data(&s, stem)?;
    }
    let report = classify(&s, data.as_ref(), tol)?;
    Ok(Outcome {
        status: ExitStatus::from_pass(report.verdict == Verdict::CriticalCatenoid),
        report: to_value(&report),
    })
}

/// Paths written by [`emit_plot_data`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlotFiles {
    pub csv: PathBuf,
    pub obj: PathBuf,
}

/// Write `<stem>.csv` with columns `r, theta, x, y, z` (one row per node)
/// and `<stem>.obj`, a triangulated mesh of the grid closed in `θ`.
pub fn emit_plot_data(s: &SurfaceGrid, stem: &Path) -> Result<PlotFiles> {
    let grid = s.grid();
    let files = PlotFiles {
        csv: stem.with_extension("csv"),
        obj: stem.with_extension("obj"),
    };
    let mut csv = String::from("r,theta,x,y,z\n");
    let mut obj = format!("# {} x {} annulus grid\n", grid.n_r, grid.n_theta);
    for j in 0..grid.n_r {
        for k in 0..grid.n_theta {
            let u = s.value(j, k);
            let _ = writeln!(
                csv,
                "{},{},{},{},{}",
                grid.radius(j),
                grid.theta(k),
                u.x,
                u.y,
                u.z
            );
            let _ = writeln!(obj, "v {} {} {}", u.x, u.y, u.z);
        }
    }
    // OBJ indices are 1-based.
    for j in 0..grid.n_r - 1 {
        for k in 0..grid.n_theta {
            let k1 = (k + 1) % grid.n_theta;
            let a = grid.index(j, k) + 1;
            let b = grid.index(j, k1) + 1;
            let c = grid.index(j + 1, k1) + 1;
            let d = grid.index(j + 1, k) + 1;
            let _ = writeln!(obj, "f {a} {b} {c}");
            let _ = writeln!(obj, "f {a} {c} {d}");
        }
    }
    fs::write(&files.csv, csv)?;
    fs::write(&files.obj, obj)?;
    Ok(files)
}

/// Triangle mesh read back from an OBJ file.
#[derive(Debug, Clone, PartialEq)]
pub struct ObjMesh {
    pub vertices: Vec<Vector3<f64>>,
    /// 0-based vertex indices.
    pub triangles: Vec<[usize; 3]>,
}

/// Read the vertices and triangles of an OBJ file written by
/// [`emit_plot_data`].
pub fn read_obj(path: &Path) -> Result<ObjMesh> {
    let reader = BufReader::new(fs::File::open(path)?);
    let mut vertices = Vec::new();
    let mut faces = Vec::new();
    for (n, line) in reader.lines().enumerate() {
        let line = line?;
        let mut parts = line.split_whitespace();
        let bad = |what: &str| Error::Format(format!("line {}: malformed {what}", n + 1));
        match parts.next() {
            Some("v") => {
                let xyz: Vec<f64> = parts
                    .map(str::parse)
                    .collect::<std::result::Result<_, _>>()
                    .map_err(|_| bad("vertex"))?;
                if xyz.len() != 3 {
                    return Err(bad("vertex"));
                }
                vertices.push(Vector3::new(xyz[0], xyz[1], xyz[2]));
            }
            Some("f") => {
                let idx: Vec<usize> = parts
                    .map(|p| p.split('/').next().unwrap_or("").parse::<usize>())
                    .collect::<std::result::Result<_, _>>()
                    .map_err(|_| bad("face"))?;
                if idx.len() != 3 || idx.iter().any(|&i| i == 0 || i > vertices.len()) {
                    return Err(bad("face"));
                }
                faces.push([idx[0] - 1, idx[1] - 1, idx[2] - 1]);
            }
            _ => {}
        }
    }
    Ok(ObjMesh {
        vertices,
        triangles: faces,
    })
}

/// One-line-per-field summary of the top-level scalars of a report.
pub fn summarize(report: &Value) -> String {
    let mut out = String::new();
    if let Some(obj) = report.as_object() {
        for (k, v) in obj {
            if !(v.is_object() || v.is_array()) {
                let _ = writeln!(out, "{k}: {v}");
            }
        }
    }
    out
}

fn configure_threads() -> Result<()> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .map_err(|_| Error::Parameter(format!("{THREADS_ENV} must be a count, got {raw:?}")))?;
    if n > 0 {
        // A second initialization in the same process keeps the first pool.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global();
    }
    Ok(())
}

/// Write the report (to `--out` or standard output) and return the exit code.
pub fn execute(config: &RunConfig) -> i32 {
    let outcome = match configure_threads() {
        Ok(()) => run(config),
        Err(e) => error_outcome(&e),
    };
    let text = serde_json::to_string_pretty(&outcome.report).expect("reports serialize") + "\n";
    match config.out() {
        Some(path) => {
            if let Err(e) = fs::write(path, &text) {
                eprintln!("cannot write {}: {e}", path.display());
                let _ = std::io::stdout().write_all(text.as_bytes());
                return ExitStatus::InputError.code();
            }
            print!("{}", summarize(&outcome.report));
        }
        None => {
            let _ = std::io::stdout().write_all(text.as_bytes());
        }
    }
    if let Some(msg) = outcome.report.get("error").and_then(Value::as_str) {
        eprintln!("error: {msg}");
    }
    outcome.status.code()
}

/// Parse `args` (including the program name) and run.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match RunConfig::try_parse_from(args) {
        Ok(config) => execute(&config),
        Err(e) => {
            let _ = e.print();
            if e.use_stderr() {
                ExitStatus::InputError.code()
            } else {
                0
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn obj_topology_and_round_trip() {
        let p = solve_catenoid_params(1e-13).unwrap();
        let s = catenoid_grid(&p, 8, 32).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let files = emit_plot_data(&s, &dir.path().join("cat")).unwrap();
        let mesh = read_obj(&files.obj).unwrap();
        let (v, f) = (mesh.vertices, mesh.triangles);
        assert_eq!(v.len(), 256);
        assert_eq!(f.len(), 2 * 7 * 32);
        let dev = v
            .iter()
            .zip(s.values())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        assert!(dev < 1e-6);
        let rows = fs::read_to_string(&files.csv).unwrap().lines().count() - 1;
        assert_eq!(rows, 8 * 32);
    }

    #[test]
    fn tolerance_and_paths_are_validated() {
        let c = RunConfig::try_parse_from(["minann", "catenoid-params", "--tol=-1"]).unwrap();
        assert_eq!(run(&c).status, ExitStatus::InputError);
        let c =
            RunConfig::try_parse_from(["minann", "analyze", "--surface", "/no/such.json"]).unwrap();
        let out = run(&c);
        assert_eq!(out.status, ExitStatus::InputError);
        assert!(out.report["error"].as_str().unwrap().contains("--surface"));
    }

    #[test]
    fn catenoid_params_report_fields() {
        let c = RunConfig::try_parse_from(["minann", "catenoid-params"]).unwrap();
        let out = run(&c);
        assert_eq!(out.status, ExitStatus::Success);
        let keys: Vec<&String> = out.report.as_object().unwrap().keys().collect();
        assert_eq!(keys, ["A", "a", "r2", "residual", "t"]);
    }
}
