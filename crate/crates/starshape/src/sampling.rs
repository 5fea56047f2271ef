//! Seeded samplers for star-shaped distributions.
//!
//! A draw from h(r(x))dx factors as x = ρ·z with ρ following the radial
//! law with density proportional to h(r)·r^{p-1}, z on the contour shape
//! Z with the boundary law, and the two independent. The direction
//! u = x/‖x‖ = z/‖z‖ has density f(u) = c₀·r(u)^{-p} regardless of h, so
//! direction-based shape estimation never depends on the radial part.
//!
//! All samplers are deterministic functions of their seed, backed by the
//! ChaCha8 counter-based generator.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Exp1, Open01};

use crate::error::{Error, Result};
use crate::geometry::{random_unit_vector, RadialGauge, SphereGrid, UNIT_NORM_TOL};
use crate::numeric::norm;

/// Unit directions u_i = x_i/‖x_i‖ derived from raw sample points.
#[derive(Debug, Clone)]
pub struct DirectionalSample {
    dim: usize,
    directions: Vec<f64>,
}

impl DirectionalSample {
    /// Wraps pre-normalized directions (flat row-major), validating unit
    /// norms.
    pub fn new(dim: usize, directions: Vec<f64>) -> Result<Self> {
        if dim < 2 {
            return Err(Error::parameter(format!(
                "dimension must be >= 2, got {dim}"
            )));
        }
        if directions.is_empty() || !directions.len().is_multiple_of(dim) {
            return Err(Error::parameter(format!(
                "direction buffer of length {} is not a nonempty multiple of dim {dim}",
                directions.len()
            )));
        }
        for (i, d) in directions.chunks_exact(dim).enumerate() {
            let n = norm(d);
            if (n - 1.0).abs() > UNIT_NORM_TOL {
                return Err(Error::parameter(format!(
                    "direction {i} has norm {n}, expected 1 within {UNIT_NORM_TOL:e}"
                )));
            }
        }
        Ok(DirectionalSample { dim, directions })
    }

    /// Normalizes raw points to directions. A zero (or non-finite) row is
    /// rejected with its 1-based row number.
    pub fn from_points(points: &[Vec<f64>]) -> Result<Self> {
        let dim = match points.first() {
            Some(p) => p.len(),
            None => return Err(Error::parameter("point list is empty".to_string())),
        };
        if dim < 2 {
            return Err(Error::parameter(format!(
                "points must have dimension >= 2, got {dim}"
            )));
        }
        let mut directions = Vec::with_capacity(points.len() * dim);
        for (i, x) in points.iter().enumerate() {
            if x.len() != dim {
                return Err(Error::parameter(format!(
                    "row {}: expected {dim} coordinates, got {}",
                    i + 1,
                    x.len()
                )));
            }
            if x.iter().any(|v| !v.is_finite()) {
                return Err(Error::parameter(format!(
                    "row {}: non-finite coordinate",
                    i + 1
                )));
            }
            let n = norm(x);
            if n == 0.0 {
                return Err(Error::parameter(format!(
                    "row {}: zero vector has no direction",
                    i + 1
                )));
            }
            directions.extend(x.iter().map(|v| v / n));
        }
        Ok(DirectionalSample { dim, directions })
    }

    /// Ambient dimension.
    pub fn dimension(&self) -> usize {
        self.dim
    }

    /// Number of directions.
    pub fn len(&self) -> usize {
        self.directions.len() / self.dim
    }

    /// True if there are no directions (never holds for validated values).
    pub fn is_empty(&self) -> bool {
        self.directions.is_empty()
    }

    /// The i-th unit direction.
    #[inline]
    pub fn direction(&self, i: usize) -> &[f64] {
        &self.directions[i * self.dim..(i + 1) * self.dim]
    }

    /// Iterator over directions.
    pub fn directions(&self) -> impl Iterator<Item = &[f64]> {
        self.directions.chunks_exact(self.dim)
    }

    /// Flat row-major direction storage.
    pub fn directions_flat(&self) -> &[f64] {
        &self.directions
    }
}

type DensityShape = std::sync::Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Clone)]
enum RadialSampler {
    Rayleigh,
    CdfTable { radii: Vec<f64>, cdf: Vec<f64> },
}

/// A radial law: the distribution of ρ = r(x), with density proportional
/// to h(r)·r^{p-1} on (0, ∞).
#[derive(Clone)]
pub struct RadialLaw {
    label: String,
    density_shape: DensityShape,
    sampler: RadialSampler,
}

impl std::fmt::Debug for RadialLaw {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "RadialLaw({})", self.label)
    }
}

impl RadialLaw {
    /// Text identifier.
    pub fn label(&self) -> &str {
        &self.label
    }

    /// Unnormalized radial density h(r)·r^{p-1} (up to a constant factor).
    pub fn density_shape(&self, r: f64) -> f64 {
        (self.density_shape)(r)
    }

    /// Draws one radius. Strictly positive.
    pub fn sample<R: Rng>(&self, rng: &mut R) -> f64 {
        match &self.sampler {
            RadialSampler::Rayleigh => {
                let u: f64 = rng.sample(Open01);
                (-2.0 * u.ln()).sqrt()
            }
            RadialSampler::CdfTable { radii, cdf } => {
                let u: f64 = rng.sample(Open01);
                // Binary search + linear interpolation on the monotone CDF.
                let idx = cdf.partition_point(|&c| c < u);
                if idx == 0 {
                    return radii[0].max(f64::MIN_POSITIVE);
                }
                if idx >= cdf.len() {
                    return radii[cdf.len() - 1];
                }
                let (c0, c1) = (cdf[idx - 1], cdf[idx]);
                let (r0, r1) = (radii[idx - 1], radii[idx]);
                let t = if c1 > c0 { (u - c0) / (c1 - c0) } else { 0.0 };
                (r0 + t * (r1 - r0)).max(f64::MIN_POSITIVE)
            }
        }
    }
}

/// The Rayleigh radial law (ρ² chi-squared on two degrees of freedom),
/// sampled as ρ = √(−2 ln U). This is the radial part of the planar
/// standard normal.
pub fn radial_rayleigh() -> RadialLaw {
    RadialLaw {
        label: "rayleigh".to_string(),
        density_shape: std::sync::Arc::new(|r| (-r * r / 2.0).exp() * r),
        sampler: RadialSampler::Rayleigh,
    }
}

/// Builds a radial law from an unnormalized density shape on (0, r_max]
/// by inverse-CDF sampling on a cached 2048-point table with linear
/// interpolation. The shape must integrate to a finite positive value.
pub fn radial_from_density(
    label: impl Into<String>,
    shape: impl Fn(f64) -> f64 + Send + Sync + 'static,
    r_max: f64,
) -> Result<RadialLaw> {
    if !(r_max > 0.0 && r_max.is_finite()) {
        return Err(Error::parameter(format!(
            "r_max must be positive and finite, got {r_max}"
        )));
    }
    const TABLE: usize = 2048;
    let mut radii = Vec::with_capacity(TABLE + 1);
    let mut cdf = Vec::with_capacity(TABLE + 1);
    let h = r_max / TABLE as f64;
    let mut acc = 0.0;
    radii.push(0.0);
    cdf.push(0.0);
    let mut prev = shape(1e-12_f64.min(h / 2.0)).max(0.0);
    if !prev.is_finite() {
        return Err(Error::parameter(
            "density shape is not finite near zero".to_string(),
        ));
    }
    for k in 1..=TABLE {
        let r = k as f64 * h;
        let v = shape(r);
        if !(v.is_finite() && v >= 0.0) {
            return Err(Error::parameter(format!(
                "density shape must be finite and nonnegative, got {v} at r = {r}"
            )));
        }
        acc += 0.5 * (prev + v) * h;
        prev = v;
        radii.push(r);
        cdf.push(acc);
    }
    if acc <= 0.0 || acc.is_nan() {
        return Err(Error::parameter(
            "density shape integrates to zero on (0, r_max]".to_string(),
        ));
    }
    for c in &mut cdf {
        *c /= acc;
    }
    Ok(RadialLaw {
        label: label.into(),
        density_shape: std::sync::Arc::new(shape),
        sampler: RadialSampler::CdfTable { radii, cdf },
    })
}

/// Draws i.i.d. directions from f(u)du = c₀·r(u)^{-p}du by rejection from
/// the uniform law on the sphere.
///
/// The acceptance envelope is 1.05 times the grid maximum of f/uniform;
/// if a proposal exceeds the envelope (possible near gauge kinks when the
/// grid undershoots the true maximum), the envelope is enlarged and
/// sampling restarts from the seed, with a logged diagnostic.
pub fn sample_direction(
    gauge: &RadialGauge,
    c0: f64,
    grid: &SphereGrid,
    n: usize,
    seed: u64,
) -> Result<DirectionalSample> {
    sample_direction_diag(gauge, c0, grid, n, seed).map(|(s, _)| s)
}

/// As [`sample_direction`], also reporting how many envelope enlargements
/// were required.
pub(crate) fn sample_direction_diag(
    gauge: &RadialGauge,
    c0: f64,
    grid: &SphereGrid,
    n: usize,
    seed: u64,
) -> Result<(DirectionalSample, u32)> {
    if n == 0 {
        return Err(Error::parameter("sample size must be >= 1".to_string()));
    }
    if !(c0 > 0.0 && c0.is_finite()) {
        return Err(Error::parameter(format!("c0 must be positive, got {c0}")));
    }
    if gauge.dimension() != grid.dimension() {
        return Err(Error::parameter(format!(
            "gauge dimension {} does not match grid dimension {}",
            gauge.dimension(),
            grid.dimension()
        )));
    }
    let p = gauge.dimension();
    let area = crate::numeric::sphere_surface_area(p);
    // Density ratio against the uniform proposal: f(u)·area.
    let ratio = |u: &[f64]| crate::geometry::direction_density(gauge, c0, u) * area;
    let grid_max = grid.nodes().map(&ratio).fold(0.0_f64, f64::max);
    if !(grid_max.is_finite() && grid_max > 0.0) {
        return Err(Error::numerical(format!(
            "direction density envelope is degenerate (grid max {grid_max})"
        )));
    }
    let mut envelope = 1.05 * grid_max;
    let mut bumps = 0u32;
    const MAX_BUMPS: u32 = 64;
    'restart: loop {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut directions = Vec::with_capacity(n * p);
        while directions.len() < n * p {
            let u = random_unit_vector(p, &mut rng);
            let f_ratio = ratio(&u);
            if f_ratio > envelope {
                bumps += 1;
                if bumps > MAX_BUMPS {
                    return Err(Error::numerical(format!(
                        "rejection envelope underestimated {MAX_BUMPS} times \
                         (last ratio {f_ratio:.6e} vs envelope {envelope:.6e}); \
                         the direction density appears unbounded"
                    )));
                }
                log::warn!(
                    "rejection envelope violated at a proposal (ratio {f_ratio:.6e} > {envelope:.6e}); \
                     enlarging and restarting"
                );
                envelope = 1.05 * f_ratio;
                continue 'restart;
            }
            let v: f64 = rng.random();
            if v * envelope < f_ratio {
                directions.extend_from_slice(&u);
            }
        }
        let sample = DirectionalSample::new(p, directions)?;
        return Ok((sample, bumps));
    }
}

/// Draws i.i.d. points from the star-shaped law h(r(x))dx as x = ρ·z,
/// with ρ from the radial law, z = u/r(u) on the contour shape, and the
/// direction u drawn from f(u)du by rejection on an internal grid.
/// Deterministic given the seed.
pub fn sample_star(
    gauge: &RadialGauge,
    c0: f64,
    radial: &RadialLaw,
    n: usize,
    seed: u64,
) -> Result<Vec<Vec<f64>>> {
    if n == 0 {
        return Err(Error::parameter("sample size must be >= 1".to_string()));
    }
    let p = gauge.dimension();
    // Envelope grid: deterministic for p <= 3, seeded for higher
    // dimensions (derived from the caller's seed).
    let resolution = if p == 2 { 4096 } else { 8192 };
    let grid = crate::geometry::make_sphere_grid_seeded(p, resolution, seed ^ 0x9e3779b97f4a7c15)?;
    let (dirs, _) = sample_direction_diag(gauge, c0, &grid, n, seed)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(1));
    let mut points = Vec::with_capacity(n);
    for i in 0..n {
        let u = dirs.direction(i);
        let rho = radial.sample(&mut rng);
        let boundary = 1.0 / gauge.evaluate(u);
        points.push(u.iter().map(|c| c * rho * boundary).collect());
    }
    Ok(points)
}

/// Triangle boundary vertices, in order: the three corners of the unit
/// contour of the triangular gauge.
pub const TRIANGLE_VERTICES: [[f64; 2]; 3] = [[2.0, -1.0], [-1.0, 2.0], [-1.0, -1.0]];

/// Draws points on the triangle boundary with line-element density
/// 1/(9√2) on the long side and 1/9 on the two short sides.
///
/// Side masses are (density × length): (1/(9√2))·3√2 = 1/3 on the long
/// side and (1/9)·3 = 1/3 on each short side, so the side choice is
/// uniform over the three sides and the position is uniform along the
/// chosen side.
pub fn sample_triangle_boundary(n: usize, seed: u64) -> Result<Vec<Vec<f64>>> {
    if n == 0 {
        return Err(Error::parameter("sample size must be >= 1".to_string()));
    }
    let [p, q, r] = TRIANGLE_VERTICES;
    let sides = [(p, q), (q, r), (r, p)];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        let side = sides[rng.random_range(0..3)];
        let t: f64 = rng.random();
        out.push(vec![
            side.0[0] + t * (side.1[0] - side.0[0]),
            side.0[1] + t * (side.1[1] - side.0[1]),
        ]);
    }
    Ok(out)
}

/// Draws from the univariate density exp(−2|x|^{1/2}) via the transform
/// |x| = T²/4 with T gamma-distributed with shape 2 and rate 1 (the sum
/// of two unit exponentials), plus a symmetric random sign. Substituting
/// t = 2|x|^{1/2} shows the density of t is t·e^{−t}.
pub fn sample_pgnorm_half(n: usize, seed: u64) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::parameter("sample size must be >= 1".to_string()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..n).map(|_| pgnorm_half_draw(&mut rng)).collect())
}

fn pgnorm_half_draw<R: Rng>(rng: &mut R) -> f64 {
    let t: f64 = {
        let e1: f64 = rng.sample(Exp1);
        let e2: f64 = rng.sample(Exp1);
        e1 + e2
    };
    let magnitude = t * t / 4.0;
    if rng.random::<bool>() {
        magnitude
    } else {
        -magnitude
    }
}

/// Draws planar points with independent exp(−2|·|^{1/2}) coordinates —
/// the star-shaped law exp(−2·r(x)^{1/2})dx for the l_{1/2} gauge. A zero
/// vector (probability zero) is redrawn with a logged diagnostic.
pub fn sample_l_half_star(n: usize, seed: u64) -> Result<Vec<Vec<f64>>> {
    if n == 0 {
        return Err(Error::parameter("sample size must be >= 1".to_string()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let x = vec![pgnorm_half_draw(&mut rng), pgnorm_half_draw(&mut rng)];
        if x[0] == 0.0 && x[1] == 0.0 {
            log::warn!("degenerate zero draw from the coordinate sampler; redrawing");
            continue;
        }
        out.push(x);
    }
    Ok(out)
}
