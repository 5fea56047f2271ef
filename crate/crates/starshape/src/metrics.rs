//! Hausdorff distances between discretized shapes and the sup-norm bound
//! linking estimation error in the density scale to set distance.
//!
//! All distances are computed between finite point sets by exact
//! max-of-min scans; they approximate the continuum Hausdorff distance of
//! the underlying sets, with accuracy controlled by the grid resolution
//! carried in the report.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{RadialGauge, SphereGrid, StarBoundary};
use crate::kde::KdeModel;
use crate::numeric::dist_sq;
use crate::shape::ShapeEstimate;

/// One directed witness: the point realizing the directed distance, its
/// nearest neighbour in the other set, and the gap between them.
#[derive(Debug, Clone, Serialize)]
pub struct Witness {
    /// Point of the source set farthest from the target set.
    pub from: Vec<f64>,
    /// Its nearest point in the target set.
    pub nearest: Vec<f64>,
    /// Euclidean gap between the two.
    pub gap: f64,
}

/// Result of a Hausdorff computation, with witnesses for both directions.
#[derive(Debug, Clone, Serialize)]
pub struct HausdorffReport {
    /// max of the two directed distances.
    pub distance: f64,
    /// Witness for the a→b direction.
    pub witness_a_to_b: Witness,
    /// Witness for the b→a direction.
    pub witness_b_to_a: Witness,
    /// Number of points in the larger of the two discretizations.
    pub grid_resolution: usize,
}

/// Directed Hausdorff scan with an exact early-exit: a row whose running
/// minimum already sits at or below the global maximum cannot raise it,
/// so the rest of the row is skipped. Returns (max-min squared distance,
/// witness indices).
fn directed_sq(a: &[f64], b: &[f64], dim: usize) -> (f64, usize, usize) {
    let mut best = -1.0_f64;
    let mut best_i = 0;
    let mut best_j = 0;
    for (i, pa) in a.chunks_exact(dim).enumerate() {
        let mut row_min = f64::INFINITY;
        let mut row_j = 0;
        for (j, pb) in b.chunks_exact(dim).enumerate() {
            let d = dist_sq(pa, pb);
            if d < row_min {
                row_min = d;
                row_j = j;
                if row_min <= best {
                    break;
                }
            }
        }
        if row_min > best {
            best = row_min;
            best_i = i;
            best_j = row_j;
        }
    }
    (best, best_i, best_j)
}

fn point_at(flat: &[f64], dim: usize, k: usize) -> Vec<f64> {
    flat[k * dim..(k + 1) * dim].to_vec()
}

/// Hausdorff distance between two finite point clouds given as flat
/// row-major arrays. Both must be nonempty.
pub(crate) fn hausdorff_points(a: &[f64], b: &[f64], dim: usize) -> HausdorffReport {
    debug_assert!(!a.is_empty() && !b.is_empty());
    let (dab_sq, ai, aj) = directed_sq(a, b, dim);
    let (dba_sq, bi, bj) = directed_sq(b, a, dim);
    let dab = dab_sq.sqrt();
    let dba = dba_sq.sqrt();
    HausdorffReport {
        distance: dab.max(dba),
        witness_a_to_b: Witness {
            from: point_at(a, dim, ai),
            nearest: point_at(b, dim, aj),
            gap: dab,
        },
        witness_b_to_a: Witness {
            from: point_at(b, dim, bi),
            nearest: point_at(a, dim, bj),
            gap: dba,
        },
        grid_resolution: (a.len() / dim).max(b.len() / dim),
    }
}

/// Hausdorff distance between two discretized boundaries.
///
/// This is the exact Hausdorff distance of the two finite point sets
/// {radii·directions}; as an approximation of the continuum distance its
/// error is controlled by the grid resolution.
pub fn hausdorff_boundaries(a: &StarBoundary, b: &StarBoundary) -> Result<HausdorffReport> {
    if a.dimension() != b.dimension() {
        return Err(Error::parameter(format!(
            "boundary dimensions differ: {} vs {}",
            a.dimension(),
            b.dimension()
        )));
    }
    Ok(hausdorff_points(
        &a.points_flat(),
        &b.points_flat(),
        a.dimension(),
    ))
}

/// Hausdorff distance between two star bodies (filled shapes).
///
/// Each body is discretized as radial layers {(k/fill_resolution)·radius·u}
/// for k = 1..=fill_resolution together with the origin, and the exact
/// point-cloud Hausdorff distance of the two clouds is returned. The layer
/// spacing contributes at most max-radius/fill_resolution of
/// discretization slack.
pub fn hausdorff_star_bodies(
    a: &StarBoundary,
    b: &StarBoundary,
    fill_resolution: usize,
) -> Result<HausdorffReport> {
    if a.dimension() != b.dimension() {
        return Err(Error::parameter(format!(
            "boundary dimensions differ: {} vs {}",
            a.dimension(),
            b.dimension()
        )));
    }
    if fill_resolution < 2 {
        return Err(Error::parameter(format!(
            "fill_resolution must be >= 2, got {fill_resolution}"
        )));
    }
    let fill = |boundary: &StarBoundary| -> Vec<f64> {
        let dim = boundary.dimension();
        let mut pts = Vec::with_capacity((boundary.len() * fill_resolution + 1) * dim);
        pts.extend(std::iter::repeat_n(0.0, dim)); // the origin
        for k in 0..boundary.len() {
            let d = boundary.direction(k);
            let r = boundary.radii()[k];
            for layer in 1..=fill_resolution {
                let c = layer as f64 / fill_resolution as f64;
                pts.extend(d.iter().map(|x| x * c * r));
            }
        }
        pts
    };
    Ok(hausdorff_points(&fill(a), &fill(b), a.dimension()))
}

/// Grid approximation of the sup-norm gap between the estimated and true
/// boundary radii: max over nodes of |(f̂(u)/c₀)^{1/p} − (f(u)/c₀)^{1/p}|,
/// where (f(u)/c₀)^{1/p} = 1/r(u). Under the normalized convention c₀ = 1
/// this is exactly the root-density sup gap; it upper-bounds the Hausdorff
/// distance between the shape estimate and the truth discretized on the
/// same grid.
pub fn sup_root_gap(model: &KdeModel, gauge: &RadialGauge, c0: f64, grid: &SphereGrid) -> f64 {
    assert_eq!(model.dimension(), gauge.dimension(), "dimension mismatch");
    assert_eq!(model.dimension(), grid.dimension(), "dimension mismatch");
    assert!(c0 > 0.0);
    let inv_p = 1.0 / model.dimension() as f64;
    let mut sup: f64 = 0.0;
    for u in grid.nodes() {
        let est = (model.evaluate(u) / c0).powf(inv_p);
        let truth = 1.0 / gauge.evaluate(u);
        sup = sup.max((est - truth).abs());
    }
    sup
}

/// Outcome of checking the Hausdorff bound δ_H ≤ d_n on a shared grid.
#[derive(Debug, Clone, Serialize)]
pub struct BoundCheck {
    /// Whether the bound holds within the slack.
    pub holds: bool,
    /// Measured Hausdorff distance between estimate and truth.
    pub hausdorff: f64,
    /// The sup-norm bound d_n it is compared against.
    pub bound: f64,
    /// Slack added to the bound (numerical only; the shared-grid pairing
    /// argument has no discretization allowance).
    pub slack: f64,
}

/// Verifies δ_H(estimate, truth) ≤ d_n + slack for an estimate and truth
/// discretized on the same grid as the supplied gap.
pub fn verify_hausdorff_bound(
    estimate: &ShapeEstimate,
    truth: &StarBoundary,
    gap_dn: f64,
) -> Result<BoundCheck> {
    if !estimate.boundary.same_grid(truth) {
        return Err(Error::parameter(
            "estimate and truth must share the direction grid used for the gap".to_string(),
        ));
    }
    let report = hausdorff_boundaries(&estimate.boundary, truth)?;
    let slack = 1e-9;
    Ok(BoundCheck {
        holds: report.distance <= gap_dn + slack,
        hausdorff: report.distance,
        bound: gap_dn,
        slack,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{gauge_lq_sphere, gauge_triangle, make_sphere_grid, true_boundary};
    use proptest::prelude::*;
    use std::f64::consts::PI;

    /// Plain quadratic-time reference without the early-exit.
    fn brute_force(a: &[f64], b: &[f64], dim: usize) -> f64 {
        let directed = |x: &[f64], y: &[f64]| {
            x.chunks_exact(dim)
                .map(|p| {
                    y.chunks_exact(dim)
                        .map(|q| dist_sq(p, q))
                        .fold(f64::INFINITY, f64::min)
                })
                .fold(-1.0_f64, f64::max)
        };
        directed(a, b).max(directed(b, a)).sqrt()
    }

    fn circle_boundary(radius: f64, resolution: usize) -> StarBoundary {
        let grid = make_sphere_grid(2, resolution).unwrap();
        StarBoundary::new(
            2,
            grid.nodes().flatten().copied().collect(),
            vec![radius; resolution],
        )
        .unwrap()
    }

    #[test]
    fn concentric_circles() {
        let a = circle_boundary(1.0, 720);
        let b = circle_boundary(2.0, 720);
        let r = hausdorff_boundaries(&a, &b).unwrap();
        assert!((r.distance - 1.0).abs() < 1e-6, "distance {}", r.distance);
        assert!((r.witness_b_to_a.gap - 1.0).abs() < 1e-6);
        assert_eq!(r.grid_resolution, 720);
    }

    #[test]
    fn identical_boundaries_are_at_distance_zero() {
        let tri = gauge_triangle();
        let grid = make_sphere_grid(2, 360).unwrap();
        let b = true_boundary(&tri, &grid).unwrap();
        let r = hausdorff_boundaries(&b, &b).unwrap();
        assert_eq!(r.distance, 0.0);
    }

    #[test]
    fn singleton_sets() {
        let a = StarBoundary::new(2, vec![1.0, 0.0], vec![1.0]).unwrap();
        let b = StarBoundary::new(2, vec![0.0, 1.0], vec![1.0]).unwrap();
        let r = hausdorff_boundaries(&a, &b).unwrap();
        assert!((r.distance - 2.0_f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        let a = circle_boundary(1.0, 16);
        let b = StarBoundary::new(3, vec![0.0, 0.0, 1.0], vec![1.0]).unwrap();
        assert!(hausdorff_boundaries(&a, &b).is_err());
        assert!(hausdorff_star_bodies(&a, &b, 4).is_err());
    }

    #[test]
    fn triangle_on_offset_grids() {
        // Same shape discretized on 720 vs 721 nodes: the distance is a
        // pure grid artifact, bounded well below the node spacing times
        // the boundary speed.
        let tri = gauge_triangle();
        let b720 = true_boundary(&tri, &make_sphere_grid(2, 720).unwrap()).unwrap();
        let b721 = true_boundary(&tri, &make_sphere_grid(2, 721).unwrap()).unwrap();
        let r = hausdorff_boundaries(&b720, &b721).unwrap();
        assert!(r.distance <= 0.02, "grid artifact {}", r.distance);
    }

    #[test]
    fn nested_disks() {
        let a = circle_boundary(1.0, 256);
        let b = circle_boundary(2.0, 256);
        let fill = 64;
        let r = hausdorff_star_bodies(&a, &b, fill).unwrap();
        let tol = 2.0 / fill as f64 + 0.05; // layer spacing + angular spacing
        assert!((r.distance - 1.0).abs() < tol, "distance {}", r.distance);
        let same = hausdorff_star_bodies(&a, &a, 8).unwrap();
        assert_eq!(same.distance, 0.0);
    }

    #[test]
    fn radial_fill_refinement_within_layer_spacing() {
        // Refining the radial fill moves points by at most one layer
        // spacing, max_radius/fill.
        let tri = gauge_triangle();
        let b = true_boundary(&tri, &make_sphere_grid(2, 180).unwrap()).unwrap();
        let fill = 16;
        let coarse = hausdorff_star_bodies(&b, &b, fill).unwrap();
        assert_eq!(coarse.distance, 0.0);
        let max_radius = b.radii().iter().cloned().fold(0.0, f64::max);
        // Compare the coarse fill against a 4x finer fill of the same body
        // by building both clouds directly.
        let cloud = |layers: usize| -> Vec<f64> {
            let mut pts = vec![0.0; 2];
            for k in 0..b.len() {
                let d = b.direction(k);
                let r = b.radii()[k];
                for layer in 1..=layers {
                    let c = layer as f64 / layers as f64;
                    pts.extend(d.iter().map(|x| x * c * r));
                }
            }
            pts
        };
        let r = hausdorff_points(&cloud(fill), &cloud(4 * fill), 2);
        assert!(
            r.distance <= max_radius / fill as f64 + 1e-12,
            "fill refinement artifact {} exceeds layer spacing {}",
            r.distance,
            max_radius / fill as f64
        );
    }

    /// Uniform kernel with η = 2 covers the whole circle, so
    /// f̂ ≡ C(2)/2 = 1/(2π) exactly. Fitted on the circle gauge this gives
    /// a synthetic estimator that equals the true density exactly.
    fn constant_density_model(n: usize) -> crate::kde::KdeModel {
        use crate::kde::{kde_fit, kernel_uniform};
        use crate::sampling::DirectionalSample;
        let dirs: Vec<f64> = (0..n)
            .flat_map(|k| {
                let t = 2.0 * PI * (k as f64 + 0.3) / n as f64;
                [t.cos(), t.sin()]
            })
            .collect();
        let sample = DirectionalSample::new(2, dirs).unwrap();
        kde_fit(&sample, &kernel_uniform(), 2.0).unwrap()
    }

    #[test]
    fn sup_root_gap_zero_for_exact_fit() {
        let circle = gauge_lq_sphere(2.0, 2).unwrap();
        let grid = make_sphere_grid(2, 128).unwrap();
        let model = constant_density_model(37);
        let gap = sup_root_gap(&model, &circle, 1.0 / (2.0 * PI), &grid);
        assert!(gap < 1e-12, "exact fit should have zero gap, got {gap}");
    }

    #[test]
    fn sup_root_gap_matches_direct_evaluation() {
        // Constant f̂ against a non-constant truth: the gap is
        // max_u |(f̂/c₀)^{1/2} − 1/r(u)|, recomputed here point by point.
        let e = crate::geometry::gauge_ellipse(&[4.0, 0.0, 0.0, 1.0], 2).unwrap();
        let grid = make_sphere_grid(2, 256).unwrap();
        let model = constant_density_model(10);
        let c0 = 0.2;
        let gap = sup_root_gap(&model, &e, c0, &grid);
        let fhat = 1.0 / (2.0 * PI);
        let mut expected: f64 = 0.0;
        for u in grid.nodes() {
            expected = expected.max(((fhat / c0).sqrt() - 1.0 / e.evaluate(u)).abs());
        }
        assert!((gap - expected).abs() < 1e-14);
        assert!(gap >= 0.0);
    }

    #[test]
    fn bound_is_tight_for_scaled_density() {
        // Synthetic f̂ = 4f on the circle: the estimate radius is
        // (4f/c₀)^{1/2} = 2, truth radius 1, so δ_H = 1 and d_n = 1.
        let resolution = 360;
        let grid = make_sphere_grid(2, resolution).unwrap();
        let est_radii: Vec<f64> = vec![4.0_f64.sqrt(); resolution];
        let directions: Vec<f64> = grid.nodes().flatten().copied().collect();
        let est = StarBoundary::new(2, directions.clone(), est_radii).unwrap();
        let truth = StarBoundary::new(2, directions, vec![1.0; resolution]).unwrap();
        let r = hausdorff_boundaries(&est, &truth).unwrap();
        let d_n = 2.0 - 1.0; // |(4f/c₀)^{1/2} − (f/c₀)^{1/2}| = 1 uniformly
        assert!((r.distance - 1.0).abs() < 1e-12);
        assert!(r.distance <= d_n + 1e-9, "bound must hold with equality");
    }

    #[test]
    fn early_exit_matches_brute_force() {
        use rand::Rng;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
        for _ in 0..100 {
            let na = rng.random_range(1..=32);
            let nb = rng.random_range(1..=32);
            let a: Vec<f64> = (0..na * 2).map(|_| rng.random_range(-3.0..3.0)).collect();
            let b: Vec<f64> = (0..nb * 2).map(|_| rng.random_range(-3.0..3.0)).collect();
            let fast = hausdorff_points(&a, &b, 2).distance;
            let slow = brute_force(&a, &b, 2);
            assert_eq!(fast, slow, "exact agreement required");
        }
    }

    proptest! {
        #[test]
        fn symmetry_triangle_inequality_and_scaling(
            seed in 0u64..1000,
            c in 0.1..10.0f64,
        ) {
            use rand::Rng;
            use rand::SeedableRng;
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let mut boundary = |n: usize| {
                let thetas: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..2.0 * PI)).collect();
                let dirs: Vec<f64> = thetas.iter().flat_map(|t| [t.cos(), t.sin()]).collect();
                let radii: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..4.0)).collect();
                StarBoundary::new(2, dirs, radii).unwrap()
            };
            let a = boundary(12);
            let b = boundary(9);
            let cset = boundary(7);
            let dab = hausdorff_boundaries(&a, &b).unwrap().distance;
            let dba = hausdorff_boundaries(&b, &a).unwrap().distance;
            prop_assert!((dab - dba).abs() <= 1e-12);
            let dac = hausdorff_boundaries(&a, &cset).unwrap().distance;
            let dbc = hausdorff_boundaries(&b, &cset).unwrap().distance;
            prop_assert!(dac <= dab + dbc + 1e-9);
            // Scaling about the origin.
            let scale = |x: &StarBoundary| {
                crate::shape::scale_boundary(x, c).unwrap()
            };
            let scaled = hausdorff_boundaries(&scale(&a), &scale(&b)).unwrap().distance;
            prop_assert!((scaled - c * dab).abs() <= 1e-9 * (1.0 + scaled.abs()));
        }
    }
}
