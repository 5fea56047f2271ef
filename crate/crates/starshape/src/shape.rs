//! Contour-shape estimation from a fitted directional density.
//!
//! The shape estimate places, in each grid direction u, a boundary point
//! at radius (f̂_n(u)/c₀)^{1/p}. Under the normalized gauge convention
//! (c₀ = 1) this is the plain root-density estimate; with a known c₀ the
//! radii are rescaled so the estimate targets the unnormalized gauge's
//! unit contour. Zero estimated density gives radius zero (the boundary
//! touches the origin there), which downstream metrics handle.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{SphereGrid, StarBoundary};
use crate::kde::KdeModel;

/// Which c₀ convention a shape estimate was produced under.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Convention {
    /// c₀ treated as 1: the estimate recovers the shape up to homothety.
    Normalized,
    /// An exact or externally supplied c₀ was used.
    KnownC0,
    /// Radii rescaled so the enclosed body has unit volume.
    UnitVolumeRescaled,
}

/// A discretized shape estimate with the metadata needed to reproduce it.
#[derive(Debug, Clone)]
pub struct ShapeEstimate {
    /// The estimated boundary on the evaluation grid.
    pub boundary: StarBoundary,
    /// The c₀ the radii were divided by.
    pub c0_used: f64,
    /// Convention under which c₀ was chosen.
    pub convention: Convention,
    /// Kernel label of the underlying model.
    pub kernel_label: String,
    /// Bandwidth of the underlying model.
    pub eta: f64,
    /// Sample size of the underlying model.
    pub sample_size: usize,
}

/// Evaluates the fitted density on the grid and converts it to boundary
/// radii (f̂_n(u)/c₀)^{1/p}.
pub fn estimate_shape(model: &KdeModel, grid: &SphereGrid, c0: f64) -> Result<ShapeEstimate> {
    if !(c0 > 0.0 && c0.is_finite()) {
        return Err(Error::parameter(format!("c0 must be positive, got {c0}")));
    }
    if grid.dimension() != model.dimension() {
        return Err(Error::parameter(format!(
            "grid dimension {} does not match model dimension {}",
            grid.dimension(),
            model.dimension()
        )));
    }
    let inv_p = 1.0 / model.dimension() as f64;
    let radii: Vec<f64> = model
        .evaluate_grid(grid)?
        .into_iter()
        .map(|f| (f / c0).powf(inv_p))
        .collect();
    let directions: Vec<f64> = grid.nodes().flatten().copied().collect();
    let boundary = StarBoundary::new(grid.dimension(), directions, radii)?;
    let convention = if c0 == 1.0 {
        Convention::Normalized
    } else {
        Convention::KnownC0
    };
    Ok(ShapeEstimate {
        boundary,
        c0_used: c0,
        convention,
        kernel_label: model.kernel().label().to_string(),
        eta: model.bandwidth(),
        sample_size: model.sample_size(),
    })
}

/// Convenience wrapper for the planar l_{1/2} target: c₀ = 3/4, so the
/// radii are (2/√3)·f̂_n(u)^{1/2}.
pub fn estimate_shape_l_half(model: &KdeModel, grid: &SphereGrid) -> Result<ShapeEstimate> {
    if model.dimension() != 2 {
        return Err(Error::parameter(format!(
            "the l_1/2 target is planar; model has dimension {}",
            model.dimension()
        )));
    }
    estimate_shape(model, grid, 0.75)
}

/// Scales a boundary about the origin: radii multiplied by c, directions
/// unchanged.
pub fn scale_boundary(boundary: &StarBoundary, c: f64) -> Result<StarBoundary> {
    if !(c >= 0.0 && c.is_finite()) {
        return Err(Error::parameter(format!(
            "scale factor must be >= 0, got {c}"
        )));
    }
    StarBoundary::new(
        boundary.dimension(),
        boundary.directions_flat().to_vec(),
        boundary.radii().iter().map(|r| r * c).collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{gauge_lq_sphere, make_sphere_grid, true_boundary};
    use crate::kde::{kde_fit, kernel_uniform, kernel_von_mises};
    use crate::metrics::hausdorff_boundaries;
    use crate::sampling::DirectionalSample;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn uniform_sample(n: usize, seed: u64) -> DirectionalSample {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let dirs: Vec<f64> = (0..n)
            .flat_map(|_| {
                let t = rng.random_range(0.0..2.0 * PI);
                [t.cos(), t.sin()]
            })
            .collect();
        DirectionalSample::new(2, dirs).unwrap()
    }

    #[test]
    fn radii_follow_the_root_density_formula() {
        let model = kde_fit(&uniform_sample(500, 1), &kernel_von_mises(), 0.3).unwrap();
        let grid = make_sphere_grid(2, 180).unwrap();
        let c0 = 0.4;
        let est = estimate_shape(&model, &grid, c0).unwrap();
        for (k, u) in grid.nodes().enumerate() {
            let expected = (model.evaluate(u) / c0).sqrt();
            assert!(
                (est.boundary.radii()[k] - expected).abs() <= 1e-12,
                "node {k}"
            );
        }
        assert_eq!(est.convention, Convention::KnownC0);
        assert_eq!(est.c0_used, c0);
        assert_eq!(est.kernel_label, "vonmises");
        assert_eq!(est.sample_size, 500);
    }

    #[test]
    fn uniform_circle_estimate_has_unit_radii() {
        let model = kde_fit(&uniform_sample(10_000, 7), &kernel_von_mises(), 0.2).unwrap();
        let grid = make_sphere_grid(2, 360).unwrap();
        let est = estimate_shape(&model, &grid, 1.0 / (2.0 * PI)).unwrap();
        for &r in est.boundary.radii() {
            assert!((r - 1.0).abs() < 0.05, "radius {r}");
        }
    }

    #[test]
    fn scaling_c0_rescales_radii_exactly() {
        // Estimates under c0 and c0/λ differ exactly by λ^{1/p}.
        let model = kde_fit(&uniform_sample(200, 3), &kernel_von_mises(), 0.25).unwrap();
        let grid = make_sphere_grid(2, 90).unwrap();
        let lambda = 5.5;
        let base = estimate_shape(&model, &grid, 0.9).unwrap();
        let scaled = estimate_shape(&model, &grid, 0.9 / lambda).unwrap();
        for k in 0..base.boundary.len() {
            let expect = base.boundary.radii()[k] * lambda.sqrt();
            assert!(
                (scaled.boundary.radii()[k] - expect).abs() <= 1e-12 * expect.max(1e-300),
                "node {k}"
            );
        }
    }

    #[test]
    fn l_half_wrapper_equals_explicit_c0() {
        let model = kde_fit(&uniform_sample(300, 9), &kernel_von_mises(), 0.3).unwrap();
        let grid = make_sphere_grid(2, 128).unwrap();
        let a = estimate_shape_l_half(&model, &grid).unwrap();
        let b = estimate_shape(&model, &grid, 0.75).unwrap();
        assert_eq!(a.boundary.radii(), b.boundary.radii());
        // The multiplier (1/0.75)^{1/2} = 2/√3.
        assert!(((1.0 / 0.75_f64).sqrt() - 2.0 / 3.0_f64.sqrt()).abs() < 1e-15);
        assert!((2.0 / 3.0_f64.sqrt() - 1.1547).abs() < 1e-4);
    }

    #[test]
    fn l_half_wrapper_requires_planar_model() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let dirs: Vec<f64> = (0..20)
            .flat_map(|_| crate::geometry::random_unit_vector(3, &mut rng))
            .collect();
        let sample = DirectionalSample::new(3, dirs).unwrap();
        let model = kde_fit(&sample, &kernel_von_mises(), 0.4).unwrap();
        let grid = make_sphere_grid(3, 64).unwrap();
        assert!(estimate_shape_l_half(&model, &grid).is_err());
    }

    #[test]
    fn single_point_model_gives_single_bump() {
        let sample = DirectionalSample::new(2, vec![1.0, 0.0]).unwrap();
        let model = kde_fit(&sample, &kernel_uniform(), 0.5).unwrap();
        let grid = make_sphere_grid(2, 256).unwrap();
        let est = estimate_shape(&model, &grid, 1.0).unwrap();
        // Antipode: compact kernel gives exactly zero density, radius 0.
        let antipode = grid
            .nodes()
            .enumerate()
            .min_by(|(_, a), (_, b)| a[0].total_cmp(&b[0]))
            .unwrap()
            .0;
        assert_eq!(est.boundary.radii()[antipode], 0.0);
        // At the sample point the radius is positive.
        assert!(est.boundary.radii()[0] > 0.0);
    }

    #[test]
    fn scale_boundary_identity_zero_and_nesting() {
        let circle = gauge_lq_sphere(2.0, 2).unwrap();
        let grid = make_sphere_grid(2, 64).unwrap();
        let b = true_boundary(&circle, &grid).unwrap();
        let same = scale_boundary(&b, 1.0).unwrap();
        assert_eq!(b.radii(), same.radii());
        let zero = scale_boundary(&b, 0.0).unwrap();
        assert!(zero.radii().iter().all(|&r| r == 0.0));
        // Star-body nesting: radii monotone in the scale factor.
        let small = scale_boundary(&b, 0.4).unwrap();
        let large = scale_boundary(&b, 1.7).unwrap();
        for k in 0..b.len() {
            assert!(small.radii()[k] <= large.radii()[k]);
        }
        assert!(scale_boundary(&b, -1.0).is_err());
        // Scaling by 10 reproduces the enlarged display copy.
        let ten = scale_boundary(&b, 10.0).unwrap();
        assert!(ten.radii().iter().all(|&r| (r - 10.0).abs() < 1e-12));
    }

    #[test]
    fn estimate_improves_with_sample_size() {
        // Cheap trend check with a fixed bandwidth schedule; the full
        // cross-validated study lives in the acceptance suite.
        let lh = gauge_lq_sphere(0.5, 2).unwrap();
        let grid = make_sphere_grid(2, 360).unwrap();
        let truth = true_boundary(&lh, &grid).unwrap();
        let mut medians = Vec::new();
        for n in [300usize, 3000] {
            let mut dists = Vec::new();
            for seed in 0..5 {
                let pts = crate::sampling::sample_l_half_star(n, 400 + seed).unwrap();
                let sample = DirectionalSample::from_points(&pts).unwrap();
                let eta = (n as f64).powf(-0.2);
                let model = kde_fit(&sample, &kernel_von_mises(), eta).unwrap();
                let est = estimate_shape_l_half(&model, &grid).unwrap();
                dists.push(
                    hausdorff_boundaries(&est.boundary, &truth)
                        .unwrap()
                        .distance,
                );
            }
            medians.push(crate::numeric::median(&dists));
        }
        assert!(
            medians[1] < medians[0],
            "median Hausdorff did not improve: {medians:?}"
        );
    }
}
