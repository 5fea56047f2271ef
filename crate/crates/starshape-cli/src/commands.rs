//! Subcommand implementations. Each writes deterministic artifacts into
//! the configured output directory and reports timings on stderr.

use std::path::{Path, PathBuf};

use serde::Serialize;
use starshape::pipeline::{run_study, CellOutcome, StudyContext, StudyShape};
use starshape::{
    check_brz_conditions, cross_validate_bandwidth, io, kde_fit, scale_boundary, BandwidthSchedule,
    BrzReport, DirectionalSample, Error, Result, StarBoundary,
};

use crate::config::{ArtifactFormat, EtaChoice, RunConfig};
use crate::svg::overlay_svg;
use crate::table::ConvergenceTable;

fn ensure_out_dir(cfg: &RunConfig) -> Result<()> {
    std::fs::create_dir_all(&cfg.out_dir)?;
    Ok(())
}

fn write_artifact(paths: &mut Vec<PathBuf>, dir: &Path, name: &str, content: &str) -> Result<()> {
    let path = dir.join(name);
    std::fs::write(&path, content)?;
    paths.push(path);
    Ok(())
}

fn study_context(cfg: &RunConfig) -> Result<StudyContext> {
    StudyContext::new(
        cfg.shape,
        cfg.kernel.to_kernel(),
        cfg.eta.to_rule(),
        cfg.resolution,
        cfg.fill_resolution,
    )
}

fn log_cells(shape: StudyShape, cells: &[CellOutcome]) {
    for c in cells {
        eprintln!(
            "[{}] n={} seed={} eta={:.4} dH(boundary)={:.4} dH(body)={:.4} d_n={:.4} ({} ms)",
            shape.label(),
            c.n,
            c.seed,
            c.eta,
            c.hausdorff_boundary,
            c.hausdorff_body,
            c.d_n,
            c.runtime_ms
        );
    }
}

fn format_point(p: &[f64]) -> String {
    let coords: Vec<String> = p.iter().map(|c| format!("{c:>9.4}")).collect();
    format!("({})", coords.join(","))
}

/// Fixed-column rendering of a boundary Hausdorff report with both
/// directed witnesses.
fn print_hausdorff_report(shape: StudyShape, cell: &CellOutcome) {
    let r = &cell.boundary_report;
    println!(
        "hausdorff {} n={} seed={}: distance {:.6} on {} grid points",
        shape.label(),
        cell.n,
        cell.seed,
        r.distance,
        r.grid_resolution
    );
    println!(
        "  {:<16} {:<24} {:<24} {:>10}",
        "direction", "from", "nearest", "gap"
    );
    println!(
        "  {:<16} {:<24} {:<24} {:>10.6}",
        "estimate->truth",
        format_point(&r.witness_a_to_b.from),
        format_point(&r.witness_a_to_b.nearest),
        r.witness_a_to_b.gap
    );
    println!(
        "  {:<16} {:<24} {:<24} {:>10.6}",
        "truth->estimate",
        format_point(&r.witness_b_to_a.from),
        format_point(&r.witness_b_to_a.nearest),
        r.witness_b_to_a.gap
    );
}

/// Shared pipeline for `reproduce-triangle` and `reproduce-lhalf`: runs
/// the study over the configured sample sizes, writes per-n boundary
/// artifacts and overlay figures (first seed), and the convergence table.
/// The l_{1/2} figures display the 10x-enlarged shapes.
pub fn cmd_reproduce(cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    cfg.validate()?;
    if cfg.seeds.is_empty() {
        return Err(Error::Parameter(
            "at least one seed is required".to_string(),
        ));
    }
    ensure_out_dir(cfg)?;
    let ctx = study_context(cfg)?;
    let shape = cfg.shape;
    let cells = run_study(&ctx, &cfg.sample_sizes, &cfg.seeds)?;
    log_cells(shape, &cells);

    let mut paths = Vec::new();
    let label = shape.label();
    let dir = &cfg.out_dir;

    if cfg.formats.contains(&ArtifactFormat::Csv) {
        write_artifact(
            &mut paths,
            dir,
            &format!("truth_{label}.csv"),
            &io::boundary_to_csv(&ctx.truth),
        )?;
    }
    if cfg.formats.contains(&ArtifactFormat::Json) {
        write_artifact(
            &mut paths,
            dir,
            &format!("truth_{label}.json"),
            &io::boundary_to_json(&ctx.truth),
        )?;
    }

    let display_scale = match shape {
        StudyShape::Triangle => 1.0,
        StudyShape::LHalf => 10.0,
    };
    let figure_seed = cfg.seeds[0];
    for cell in &cells {
        let stem = format!("estimate_{label}_n{}_seed{}", cell.n, cell.seed);
        if cfg.formats.contains(&ArtifactFormat::Csv) {
            write_artifact(
                &mut paths,
                dir,
                &format!("{stem}.csv"),
                &io::estimate_to_csv(&cell.estimate),
            )?;
        }
        if cfg.formats.contains(&ArtifactFormat::Json) {
            write_artifact(
                &mut paths,
                dir,
                &format!("{stem}.json"),
                &io::estimate_to_json(&cell.estimate),
            )?;
        }
        if cell.seed == figure_seed {
            print_hausdorff_report(shape, cell);
        }
        if cell.seed == figure_seed && cfg.formats.contains(&ArtifactFormat::Svg) {
            let truth_display = display_boundary(&ctx.truth, display_scale)?;
            let estimate_display = display_boundary(&cell.estimate.boundary, display_scale)?;
            let scale_note = if display_scale != 1.0 {
                format!(" (x{display_scale} display)")
            } else {
                String::new()
            };
            let svg = overlay_svg(
                &truth_display,
                &estimate_display,
                &format!("{label} shape, n = {}{scale_note}", cell.n),
            );
            write_artifact(
                &mut paths,
                dir,
                &format!("overlay_{label}_n{}.svg", cell.n),
                &svg,
            )?;
        }
    }

    let table = ConvergenceTable::from_outcomes(&cells);
    if cfg.formats.contains(&ArtifactFormat::Csv) {
        write_artifact(
            &mut paths,
            dir,
            &format!("table_{label}.csv"),
            &table.to_csv(),
        )?;
    }
    if cfg.formats.contains(&ArtifactFormat::Json) {
        write_artifact(
            &mut paths,
            dir,
            &format!("table_{label}.json"),
            &table.to_json(),
        )?;
    }
    Ok(paths)
}

fn display_boundary(b: &StarBoundary, scale: f64) -> Result<StarBoundary> {
    if scale == 1.0 {
        Ok(b.clone())
    } else {
        scale_boundary(b, scale)
    }
}

#[derive(Serialize)]
struct BrzArtifact<'a> {
    schedule: &'a str,
    note: &'a str,
    report: &'a BrzReport,
}

#[derive(Serialize)]
struct ConvergenceArtifact<'a> {
    rows: &'a ConvergenceTable,
    brz: &'a BrzArtifact<'a>,
}

/// The `convergence` subcommand: full factorial over sample sizes and
/// seeds, a condition report for the configured bandwidth schedule, and a
/// deterministic table artifact. Aborts if any cell violates the
/// Hausdorff bound (that would be an implementation bug, not noise).
pub fn cmd_convergence(cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    cfg.validate()?;
    if cfg.sample_sizes.len() < 2 {
        return Err(Error::Parameter(
            "convergence needs at least two sample sizes".to_string(),
        ));
    }
    if cfg.seeds.is_empty() {
        return Err(Error::Parameter(
            "convergence needs at least one seed".to_string(),
        ));
    }
    ensure_out_dir(cfg)?;
    let ctx = study_context(cfg)?;
    let shape = cfg.shape;
    let cells = run_study(&ctx, &cfg.sample_sizes, &cfg.seeds)?;
    log_cells(shape, &cells);

    // Condition report for the schedule the run is governed by; a fixed
    // bandwidth is a constant schedule, and cross-validation is reported
    // against the default power schedule as a reference.
    let (schedule, note) = match cfg.eta {
        EtaChoice::Fixed(v) => (
            BandwidthSchedule::constant(v),
            "fixed bandwidth treated as a constant schedule",
        ),
        EtaChoice::SchedulePower => (BandwidthSchedule::power(2), "configured schedule"),
        EtaChoice::Cv | EtaChoice::CvGrid { .. } => (
            BandwidthSchedule::power(2),
            "cross-validated bandwidths; the default power schedule is reported as reference",
        ),
    };
    let probes = [100, 1_000, 10_000, 100_000, 1_000_000];
    let report = check_brz_conditions(&ctx.kernel, &schedule, 2, &probes)?;
    for c in &report.conditions {
        eprintln!("[brz] {}: {:?} — {}", c.name, c.status, c.detail);
    }

    let mut paths = Vec::new();
    let label = shape.label();
    let table = ConvergenceTable::from_outcomes(&cells);
    let brz = BrzArtifact {
        schedule: schedule.label(),
        note,
        report: &report,
    };
    if cfg.formats.contains(&ArtifactFormat::Csv) {
        write_artifact(
            &mut paths,
            &cfg.out_dir,
            &format!("table_{label}.csv"),
            &table.to_csv(),
        )?;
    }
    if cfg.formats.contains(&ArtifactFormat::Json) {
        let combined = ConvergenceArtifact {
            rows: &table,
            brz: &brz,
        };
        write_artifact(
            &mut paths,
            &cfg.out_dir,
            &format!("table_{label}.json"),
            &serde_json::to_string_pretty(&combined).expect("artifact serialization cannot fail"),
        )?;
    }
    write_artifact(
        &mut paths,
        &cfg.out_dir,
        &format!("brz_report_{label}.json"),
        &serde_json::to_string_pretty(&brz).expect("artifact serialization cannot fail"),
    )?;
    Ok(paths)
}

/// The `estimate` subcommand: reads a sample file (CSV or JSON), fits the
/// estimator, and writes the shape estimate under the normalized-c₀
/// convention (the shape is recovered up to homothety; c₀ is not
/// identifiable from directions alone).
pub fn cmd_estimate(input: &Path, cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    if cfg.resolution < 8 {
        return Err(Error::Parameter(format!(
            "resolution must be >= 8, got {}",
            cfg.resolution
        )));
    }
    let points = io::read_points_file(input)?;
    let sample = DirectionalSample::from_points(&points)?;
    if sample.dimension() != 2 && cfg.formats.contains(&ArtifactFormat::Svg) {
        log::warn!(
            "svg output is planar only; skipping for dimension {}",
            sample.dimension()
        );
    }
    let n = sample.len();
    let kernel = cfg.kernel.to_kernel();
    let eta = match cfg.eta.to_rule() {
        starshape::EtaRule::Fixed(v) => v,
        starshape::EtaRule::PowerSchedule => {
            BandwidthSchedule::power(sample.dimension()).eta(n as u64)
        }
        starshape::EtaRule::CrossValidated => cross_validate_bandwidth(
            &sample,
            &kernel,
            &starshape::default_cv_grid(n, sample.dimension()),
        )?,
        starshape::EtaRule::CrossValidatedOn(grid) => {
            cross_validate_bandwidth(&sample, &kernel, &grid)?
        }
    };
    let model = kde_fit(&sample, &kernel, eta)?;
    let grid = starshape::make_sphere_grid(sample.dimension(), cfg.resolution)?;
    let estimate = starshape::estimate_shape(&model, &grid, 1.0)?;
    eprintln!(
        "[estimate] n={n} p={} kernel={} eta={eta:.4} (normalized convention)",
        sample.dimension(),
        kernel.label()
    );

    ensure_out_dir(cfg)?;
    let stem = input
        .file_stem()
        .map(|s| s.to_string_lossy().to_string())
        .unwrap_or_else(|| "sample".to_string());
    let mut paths = Vec::new();
    if cfg.formats.contains(&ArtifactFormat::Csv) {
        write_artifact(
            &mut paths,
            &cfg.out_dir,
            &format!("{stem}_estimate.csv"),
            &io::estimate_to_csv(&estimate),
        )?;
    }
    if cfg.formats.contains(&ArtifactFormat::Json) {
        write_artifact(
            &mut paths,
            &cfg.out_dir,
            &format!("{stem}_estimate.json"),
            &io::estimate_to_json(&estimate),
        )?;
    }
    Ok(paths)
}

/// The `gauges` subcommand text: the built-in gauges and their exact
/// constants.
pub fn gauges_listing() -> String {
    let mut out = String::new();
    out.push_str("built-in gauges:\n");
    out.push_str("  triangle   p=2    c0 = 1/9 (exact)     max{-x1, -x2, x1+x2}; triangular contour with vertices (2,-1), (-1,2), (-1,-1)\n");
    out.push_str("  lhalf      p=2    c0 = 3/4 (exact)     (|x1|^(1/2) + |x2|^(1/2))^2; l_1/2-spherical contour\n");
    out.push_str("  lq(q,p)    p>=2   c0 known for q=1/2,p=2   (sum_j |x_j|^q)^(1/q)\n");
    out.push_str("  ellipse    p>=2   c0 not built in      (x' S^-1 x)^(1/2) for a symmetric positive definite S\n");
    out
}
