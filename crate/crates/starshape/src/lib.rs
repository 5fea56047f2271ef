//! Star-shaped distributions: sampling, directional kernel density
//! estimation, and nonparametric recovery of the contour shape.
//!
//! A star-shaped distribution on ℝ^p∖{0} has density h(r(x)) for a
//! positively homogeneous gauge r(·); all of its density contours are
//! scaled copies of the shape Z = {x : r(x) = 1}. The direction
//! u = x/‖x‖ of a draw carries the full shape information: its density is
//! f(u) = c₀·r(u)^{-p}, so a kernel estimate f̂_n of f on the unit sphere
//! turns into a boundary estimate by placing a point at radius
//! (f̂_n(u)/c₀)^{1/p} in every direction u. Estimation quality is measured
//! with the Hausdorff distance, which is bounded by the sup-norm gap
//! d_n = sup_u |f̂_n(u)^{1/p} − f(u)^{1/p}|.
//!
//! Modules:
//! - [`geometry`]: gauges, discretized boundaries, spherical quadrature;
//! - [`sampling`]: seeded samplers for star-shaped laws and their parts;
//! - [`kde`]: the directional estimator, its exact normalizer, bandwidth
//!   selection, and the uniform-consistency condition checker;
//! - [`shape`]: density-to-boundary conversion;
//! - [`metrics`]: Hausdorff distances and the d_n bound verification;
//! - [`pipeline`]: end-to-end study cells for the built-in targets;
//! - [`io`]: CSV/JSON serialization.
//!
//! All samplers take explicit seeds (ChaCha8 streams) and every
//! computation is deterministic for a fixed input, including the
//! parallelized ones.

pub mod error;
pub mod geometry;
pub mod io;
pub mod kde;
pub mod metrics;
pub mod numeric;
pub mod pipeline;
pub mod sampling;
pub mod shape;

pub use error::{Error, Result};
pub use geometry::{
    boundary_radius, direction_density, gauge_ellipse, gauge_lq_sphere, gauge_triangle,
    make_sphere_grid, make_sphere_grid_seeded, normalization_constant, true_boundary, RadialGauge,
    SphereGrid, StarBoundary,
};
pub use kde::{
    check_brz_conditions, cross_validate_bandwidth, kde_fit, kernel_uniform, kernel_von_mises,
    normalizer_c, BandwidthSchedule, BrzReport, ConditionCheck, ConditionStatus, KdeModel,
    KernelFn,
};
pub use metrics::{
    hausdorff_boundaries, hausdorff_star_bodies, sup_root_gap, verify_hausdorff_bound, BoundCheck,
    HausdorffReport, Witness,
};
pub use pipeline::{
    default_cv_grid, run_study, run_study_cell, CellOutcome, EtaRule, StudyContext, StudyShape,
};
pub use sampling::{
    radial_from_density, radial_rayleigh, sample_direction, sample_l_half_star, sample_pgnorm_half,
    sample_star, sample_triangle_boundary, DirectionalSample, RadialLaw,
};
pub use shape::{estimate_shape, estimate_shape_l_half, scale_boundary, Convention, ShapeEstimate};
