//! End-to-end study cells: sample → fit → estimate → evaluate.
//!
//! One *cell* is a (sample size, seed) combination run through a full
//! pipeline for one of the two built-in simulation targets. The cell
//! records the selected bandwidth, both Hausdorff distances, the sup-norm
//! gap d_n, and whether the Hausdorff-vs-gap bounds held.

use std::time::Instant;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{
    gauge_lq_sphere, gauge_triangle, make_sphere_grid, true_boundary, RadialGauge, SphereGrid,
    StarBoundary,
};
use crate::kde::{cross_validate_bandwidth, kde_fit, BandwidthSchedule, KernelFn};
use crate::metrics::{
    hausdorff_boundaries, hausdorff_star_bodies, sup_root_gap, verify_hausdorff_bound,
    HausdorffReport,
};
use crate::sampling::{
    radial_rayleigh, sample_l_half_star, sample_triangle_boundary, DirectionalSample,
};
use crate::shape::{estimate_shape, ShapeEstimate};

/// The two built-in simulation targets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StudyShape {
    /// Triangular contour; exact c₀ = 1/9. Points drawn as ρ·z with ρ
    /// Rayleigh and z on the triangle boundary.
    Triangle,
    /// l_{1/2}-spherical contour; exact c₀ = 3/4. Points drawn with
    /// independent exp(−2|·|^{1/2}) coordinates.
    LHalf,
}

impl StudyShape {
    /// The gauge of the target shape.
    pub fn gauge(&self) -> RadialGauge {
        match self {
            StudyShape::Triangle => gauge_triangle(),
            StudyShape::LHalf => gauge_lq_sphere(0.5, 2).expect("static parameters"),
        }
    }

    /// Exact normalization constant.
    pub fn c0(&self) -> f64 {
        match self {
            StudyShape::Triangle => 1.0 / 9.0,
            StudyShape::LHalf => 0.75,
        }
    }

    /// Identifier used in artifact names.
    pub fn label(&self) -> &'static str {
        match self {
            StudyShape::Triangle => "triangle",
            StudyShape::LHalf => "lhalf",
        }
    }

    /// Draws n raw points from the target's star-shaped law.
    pub fn sample_points(&self, n: usize, seed: u64) -> Result<Vec<Vec<f64>>> {
        match self {
            StudyShape::Triangle => {
                let boundary = sample_triangle_boundary(n, seed)?;
                let radial = radial_rayleigh();
                let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(
                    seed.wrapping_add(0x5851f42d4c957f2d),
                );
                Ok(boundary
                    .into_iter()
                    .map(|z| {
                        let rho = radial.sample(&mut rng);
                        z.into_iter().map(|c| c * rho).collect()
                    })
                    .collect())
            }
            StudyShape::LHalf => sample_l_half_star(n, seed),
        }
    }
}

/// How the bandwidth for a cell is chosen.
#[derive(Debug, Clone)]
pub enum EtaRule {
    /// A fixed bandwidth for every n.
    Fixed(f64),
    /// The default power schedule η_n = n^{−1/(p+3)}.
    PowerSchedule,
    /// Leave-one-out likelihood cross-validation over [`default_cv_grid`].
    CrossValidated,
    /// Cross-validation over an explicit candidate grid.
    CrossValidatedOn(Vec<f64>),
}

/// The default cross-validation grid: 15 geometrically spaced candidates
/// spanning [0.3, 3]·n^{−1/(p+3)}.
pub fn default_cv_grid(n: usize, p: usize) -> Vec<f64> {
    let center = (n as f64).powf(-1.0 / (p as f64 + 3.0));
    let lo = 0.3 * center;
    let hi = 3.0 * center;
    let count = 15;
    (0..count)
        .map(|k| lo * (hi / lo).powf(k as f64 / (count - 1) as f64))
        .collect()
}

/// Fixed study configuration shared by all cells.
#[derive(Debug, Clone)]
pub struct StudyContext {
    /// Target shape.
    pub shape: StudyShape,
    /// Smoothing kernel.
    pub kernel: KernelFn,
    /// Bandwidth rule.
    pub eta_rule: EtaRule,
    /// Evaluation grid shared by estimates, truth, and metrics.
    pub grid: SphereGrid,
    /// The true boundary discretized on `grid`.
    pub truth: StarBoundary,
    /// Radial layers for star-body Hausdorff distances.
    pub fill_resolution: usize,
}

impl StudyContext {
    /// Builds the context, discretizing the truth once.
    pub fn new(
        shape: StudyShape,
        kernel: KernelFn,
        eta_rule: EtaRule,
        resolution: usize,
        fill_resolution: usize,
    ) -> Result<Self> {
        let grid = make_sphere_grid(2, resolution)?;
        let truth = true_boundary(&shape.gauge(), &grid)?;
        Ok(StudyContext {
            shape,
            kernel,
            eta_rule,
            grid,
            truth,
            fill_resolution,
        })
    }
}

/// Everything measured for one (n, seed) cell.
#[derive(Debug, Clone)]
pub struct CellOutcome {
    /// Sample size.
    pub n: usize,
    /// Seed.
    pub seed: u64,
    /// Bandwidth used (selected or prescribed).
    pub eta: f64,
    /// Hausdorff distance between the estimated and true boundaries.
    pub hausdorff_boundary: f64,
    /// Hausdorff distance between the estimated and true star bodies.
    pub hausdorff_body: f64,
    /// Grid sup of |(f̂/c₀)^{1/p} − (f/c₀)^{1/p}|.
    pub d_n: f64,
    /// Whether δ_H(boundaries) ≤ d_n within numerical slack.
    pub boundary_bound_ok: bool,
    /// Whether δ_H(bodies) ≤ d_n + max-radius/fill within numerical slack.
    pub body_bound_ok: bool,
    /// Full boundary-distance report, with witnesses.
    pub boundary_report: HausdorffReport,
    /// The estimate itself (for plotting and serialization).
    pub estimate: ShapeEstimate,
    /// Wall-clock time for the cell. Reported on stderr by the CLI; kept
    /// out of the deterministic artifacts.
    pub runtime_ms: u128,
}

/// Runs one cell: draw the sample, pick the bandwidth, fit, estimate,
/// and measure.
pub fn run_study_cell(ctx: &StudyContext, n: usize, seed: u64) -> Result<CellOutcome> {
    let started = Instant::now();
    let points = ctx.shape.sample_points(n, seed)?;
    let sample = DirectionalSample::from_points(&points)?;
    let eta = match &ctx.eta_rule {
        EtaRule::Fixed(e) => *e,
        EtaRule::PowerSchedule => BandwidthSchedule::power(2).eta(n as u64),
        EtaRule::CrossValidated => {
            cross_validate_bandwidth(&sample, &ctx.kernel, &default_cv_grid(n, 2))?
        }
        EtaRule::CrossValidatedOn(grid) => cross_validate_bandwidth(&sample, &ctx.kernel, grid)?,
    };
    let model = kde_fit(&sample, &ctx.kernel, eta)?;
    let estimate = estimate_shape(&model, &ctx.grid, ctx.shape.c0())?;
    let gauge = ctx.shape.gauge();
    let d_n = sup_root_gap(&model, &gauge, ctx.shape.c0(), &ctx.grid);
    let boundary_report = hausdorff_boundaries(&estimate.boundary, &ctx.truth)?;
    let body_report = hausdorff_star_bodies(&estimate.boundary, &ctx.truth, ctx.fill_resolution)?;
    let bound = verify_hausdorff_bound(&estimate, &ctx.truth, d_n)?;
    let max_radius = estimate
        .boundary
        .radii()
        .iter()
        .chain(ctx.truth.radii())
        .cloned()
        .fold(0.0, f64::max);
    let body_slack = max_radius / ctx.fill_resolution as f64 + 1e-9;
    Ok(CellOutcome {
        n,
        seed,
        eta,
        hausdorff_boundary: boundary_report.distance,
        hausdorff_body: body_report.distance,
        d_n,
        boundary_bound_ok: bound.holds,
        body_bound_ok: body_report.distance <= d_n + body_slack,
        boundary_report,
        estimate,
        runtime_ms: started.elapsed().as_millis(),
    })
}

/// Runs the full factorial of sample sizes × seeds. Cells execute
/// concurrently; the output order is (n, seed) in the given order
/// regardless of scheduling. Fails if any cell violates the Hausdorff
/// bound, which would indicate an implementation bug.
pub fn run_study(
    ctx: &StudyContext,
    sample_sizes: &[usize],
    seeds: &[u64],
) -> Result<Vec<CellOutcome>> {
    let cells: Vec<(usize, u64)> = sample_sizes
        .iter()
        .flat_map(|&n| seeds.iter().map(move |&s| (n, s)))
        .collect();
    let outcomes: Vec<Result<CellOutcome>> = cells
        .par_iter()
        .map(|&(n, seed)| run_study_cell(ctx, n, seed))
        .collect();
    let mut out = Vec::with_capacity(outcomes.len());
    for o in outcomes {
        let cell = o?;
        if !cell.boundary_bound_ok || !cell.body_bound_ok {
            return Err(Error::numerical(format!(
                "Hausdorff bound violated at n = {}, seed = {}: boundary {} / body {} vs d_n {}",
                cell.n, cell.seed, cell.hausdorff_boundary, cell.hausdorff_body, cell.d_n
            )));
        }
        out.push(cell);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kde::kernel_von_mises;

    #[test]
    fn cv_grid_spans_the_documented_range() {
        let grid = default_cv_grid(10_000, 2);
        assert_eq!(grid.len(), 15);
        let center = (10_000.0_f64).powf(-0.2);
        assert!((grid[0] - 0.3 * center).abs() < 1e-12);
        assert!((grid[14] - 3.0 * center).abs() < 1e-12);
        assert!(grid.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn study_cell_runs_and_respects_bounds() {
        for shape in [StudyShape::Triangle, StudyShape::LHalf] {
            let ctx = StudyContext::new(shape, kernel_von_mises(), EtaRule::PowerSchedule, 360, 8)
                .unwrap();
            let cell = run_study_cell(&ctx, 500, 42).unwrap();
            assert!(cell.boundary_bound_ok, "{shape:?}: {cell:?}");
            assert!(cell.body_bound_ok);
            assert!(cell.hausdorff_boundary > 0.0);
            assert!(cell.d_n >= cell.hausdorff_boundary - 1e-9);
            assert_eq!(cell.estimate.sample_size, 500);
        }
    }

    #[test]
    fn study_cells_are_deterministic() {
        let ctx = StudyContext::new(
            StudyShape::Triangle,
            kernel_von_mises(),
            EtaRule::CrossValidated,
            180,
            4,
        )
        .unwrap();
        let a = run_study_cell(&ctx, 300, 7).unwrap();
        let b = run_study_cell(&ctx, 300, 7).unwrap();
        assert_eq!(a.eta, b.eta);
        assert_eq!(a.hausdorff_boundary, b.hausdorff_boundary);
        assert_eq!(a.hausdorff_body, b.hausdorff_body);
        assert_eq!(a.d_n, b.d_n);
        assert_eq!(a.estimate.boundary.radii(), b.estimate.boundary.radii());
    }

    #[test]
    fn study_factorial_produces_ordered_cells() {
        let ctx = StudyContext::new(
            StudyShape::LHalf,
            kernel_von_mises(),
            EtaRule::Fixed(0.25),
            90,
            4,
        )
        .unwrap();
        let cells = run_study(&ctx, &[100, 200], &[1, 2]).unwrap();
        let keys: Vec<(usize, u64)> = cells.iter().map(|c| (c.n, c.seed)).collect();
        assert_eq!(keys, vec![(100, 1), (100, 2), (200, 1), (200, 2)]);
    }
}
