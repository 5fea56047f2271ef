//! Radial gauges, discretized contour shapes, and spherical quadrature.
//!
//! A *radial gauge* is a continuous function r: ℝ^p∖{0} → ℝ₊ that is
//! equivariant under positive scaling, r(cx) = c·r(x). Its unit level set
//! Z = {x : r(x) = 1} is the common shape of the density contours of the
//! associated star-shaped distribution, and the direction u = x/‖x‖ of a
//! draw from that distribution has density f(u) = c₀·r(u)^{-p} on the unit
//! sphere, with c₀ = 1/∫ r(u)^{-p} du.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::numeric::{norm, sphere_surface_area};

/// Unit-norm tolerance used when validating direction vectors.
pub const UNIT_NORM_TOL: f64 = 1e-12;

type GaugeFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

/// A positively homogeneous radial function r(·) defining a star-shaped
/// family. Immutable after construction; cheap to clone.
#[derive(Clone)]
pub struct RadialGauge {
    dim: usize,
    label: String,
    known_c0: Option<f64>,
    eval: GaugeFn,
}

impl fmt::Debug for RadialGauge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RadialGauge")
            .field("dim", &self.dim)
            .field("label", &self.label)
            .field("known_c0", &self.known_c0)
            .finish()
    }
}

impl RadialGauge {
    /// Wraps a caller-supplied gauge function. The function must be
    /// positive, continuous, and equivariant under positive scaling on
    /// ℝ^p∖{0}; the origin must never be passed to [`Self::evaluate`].
    pub fn new(
        dim: usize,
        label: impl Into<String>,
        known_c0: Option<f64>,
        eval: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
    ) -> Result<Self> {
        if dim < 2 {
            return Err(Error::parameter(format!(
                "gauge dimension must be >= 2, got {dim}"
            )));
        }
        if let Some(c0) = known_c0 {
            if c0 <= 0.0 || c0.is_nan() {
                return Err(Error::parameter(format!(
                    "known_c0 must be positive, got {c0}"
                )));
            }
        }
        Ok(RadialGauge {
            dim,
            label: label.into(),
            known_c0,
            eval: Arc::new(eval),
        })
    }

    /// Ambient dimension p.
    pub fn dimension(&self) -> usize {
        self.dim
    }

    /// Text identifier.
    pub fn label(&self) -> &str {
        &self.label
    }

    /// Exact normalization constant, when analytically known.
    pub fn known_c0(&self) -> Option<f64> {
        self.known_c0
    }

    /// Evaluates the gauge at a nonzero point.
    #[inline]
    pub fn evaluate(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.dim, "gauge dimension mismatch");
        debug_assert!(x.iter().any(|&v| v != 0.0), "gauge evaluated at the origin");
        (self.eval)(x)
    }
}

/// The triangular gauge r(x) = max{−x₁, −x₂, x₁+x₂} on ℝ², whose unit
/// level set is the triangle with vertices (2,−1), (−1,2), (−1,−1).
/// c₀ = 1/9 exactly.
pub fn gauge_triangle() -> RadialGauge {
    RadialGauge::new(2, "triangle", Some(1.0 / 9.0), |x| {
        (-x[0]).max(-x[1]).max(x[0] + x[1])
    })
    .expect("static gauge parameters are valid")
}

/// The l_q gauge r(x) = (Σ|x_j|^q)^{1/q}. For q = 1/2 in the plane the
/// unit level set is the l_{1/2}-sphere and c₀ = 3/4 exactly; no closed
/// form is attached for other parameters.
pub fn gauge_lq_sphere(q: f64, p: usize) -> Result<RadialGauge> {
    if q <= 0.0 || q.is_nan() {
        return Err(Error::parameter(format!(
            "l_q exponent must be positive, got {q}"
        )));
    }
    if p < 2 {
        return Err(Error::parameter(format!("dimension must be >= 2, got {p}")));
    }
    let known_c0 = if q == 0.5 && p == 2 { Some(0.75) } else { None };
    let label = format!("lq(q={q})");
    RadialGauge::new(p, label, known_c0, move |x| {
        x.iter().map(|v| v.abs().powf(q)).sum::<f64>().powf(1.0 / q)
    })
}

/// The elliptical gauge r(x) = (xᵀΣ⁻¹x)^{1/2} for a symmetric positive
/// definite shape matrix Σ (row-major, p×p). Fails with a parameter error
/// if the matrix is not symmetric positive definite.
pub fn gauge_ellipse(shape_matrix: &[f64], p: usize) -> Result<RadialGauge> {
    if p < 2 || shape_matrix.len() != p * p {
        return Err(Error::parameter(format!(
            "shape matrix must be p*p with p >= 2, got {} entries for p = {p}",
            shape_matrix.len()
        )));
    }
    for i in 0..p {
        for j in (i + 1)..p {
            let a = shape_matrix[i * p + j];
            let b = shape_matrix[j * p + i];
            if (a - b).abs() > 1e-12 * a.abs().max(b.abs()).max(1.0) {
                return Err(Error::parameter(
                    "shape matrix is not symmetric".to_string(),
                ));
            }
        }
    }
    let chol = cholesky(shape_matrix, p)
        .ok_or_else(|| Error::parameter("shape matrix is not positive definite".to_string()))?;
    RadialGauge::new(p, "ellipse", None, move |x| {
        // xᵀΣ⁻¹x = ‖L⁻¹x‖² with Σ = LLᵀ; forward substitution.
        let mut y = x.to_vec();
        for i in 0..p {
            let mut s = y[i];
            for j in 0..i {
                s -= chol[i * p + j] * y[j];
            }
            y[i] = s / chol[i * p + i];
        }
        norm(&y)
    })
}

/// Lower-triangular Cholesky factor of a symmetric matrix, or `None` if
/// the matrix is not positive definite.
fn cholesky(m: &[f64], p: usize) -> Option<Vec<f64>> {
    let mut l = vec![0.0; p * p];
    for i in 0..p {
        for j in 0..=i {
            let mut s = m[i * p + j];
            for k in 0..j {
                s -= l[i * p + k] * l[j * p + k];
            }
            if i == j {
                if s <= 0.0 {
                    return None;
                }
                l[i * p + i] = s.sqrt();
            } else {
                l[i * p + j] = s / l[j * p + j];
            }
        }
    }
    Some(l)
}

/// Quadrature nodes and weights on the unit sphere S^{p-1}. Weights sum to
/// the surface measure 2π^{p/2}/Γ(p/2) by construction.
#[derive(Debug, Clone)]
pub struct SphereGrid {
    dim: usize,
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl SphereGrid {
    /// Ambient dimension p.
    pub fn dimension(&self) -> usize {
        self.dim
    }

    /// Number of nodes.
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    /// True if the grid has no nodes.
    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// The k-th unit node.
    #[inline]
    pub fn node(&self, k: usize) -> &[f64] {
        &self.nodes[k * self.dim..(k + 1) * self.dim]
    }

    /// Quadrature weights, one per node.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Iterator over nodes.
    pub fn nodes(&self) -> impl Iterator<Item = &[f64]> {
        self.nodes.chunks_exact(self.dim)
    }

    /// Quadrature of `f` over the sphere: Σ_k w_k f(u_k).
    pub fn integrate<F: Fn(&[f64]) -> f64>(&self, f: F) -> f64 {
        self.nodes().zip(&self.weights).map(|(u, w)| w * f(u)).sum()
    }
}

/// Builds a quadrature grid on S^{p-1}.
///
/// For p = 2 the nodes are `resolution` equally spaced angles with weights
/// 2π/resolution; for p = 3 a Fibonacci spiral with equal weights
/// 4π/resolution; for p ≥ 4 the nodes are Monte Carlo draws with equal
/// weights (stochastic quadrature, fixed internal seed — use
/// [`make_sphere_grid_seeded`] to control it).
pub fn make_sphere_grid(p: usize, resolution: usize) -> Result<SphereGrid> {
    make_sphere_grid_seeded(p, resolution, 0)
}

/// As [`make_sphere_grid`], with an explicit seed for the Monte Carlo
/// node set used when p ≥ 4. The seed is ignored for p = 2 and p = 3,
/// which are deterministic constructions.
pub fn make_sphere_grid_seeded(p: usize, resolution: usize, seed: u64) -> Result<SphereGrid> {
    if p < 2 {
        return Err(Error::parameter(format!(
            "sphere dimension must be >= 2, got {p}"
        )));
    }
    if resolution < 8 {
        return Err(Error::parameter(format!(
            "grid resolution must be >= 8, got {resolution}"
        )));
    }
    let area = sphere_surface_area(p);
    let w = area / resolution as f64;
    let mut nodes = Vec::with_capacity(resolution * p);
    match p {
        2 => {
            for k in 0..resolution {
                let theta = 2.0 * PI * k as f64 / resolution as f64;
                nodes.push(theta.cos());
                nodes.push(theta.sin());
            }
        }
        3 => {
            // Fibonacci spiral: z stratified, azimuth by the golden angle.
            let golden = (1.0 + 5.0_f64.sqrt()) / 2.0;
            for k in 0..resolution {
                let z = 1.0 - (2.0 * k as f64 + 1.0) / resolution as f64;
                let r = (1.0 - z * z).max(0.0).sqrt();
                let phi = 2.0 * PI * (k as f64 / golden).fract();
                nodes.push(r * phi.cos());
                nodes.push(r * phi.sin());
                nodes.push(z);
            }
        }
        _ => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for _ in 0..resolution {
                nodes.extend_from_slice(&random_unit_vector(p, &mut rng));
            }
        }
    }
    Ok(SphereGrid {
        dim: p,
        nodes,
        weights: vec![w; resolution],
    })
}

/// Draws a uniform point on S^{p-1} by normalizing a standard normal
/// vector, redrawing in the (measure zero) degenerate case.
pub(crate) fn random_unit_vector<R: Rng>(p: usize, rng: &mut R) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..p).map(|_| rng.sample(StandardNormal)).collect();
        let n = norm(&v);
        if n > 1e-100 {
            return v.iter().map(|x| x / n).collect();
        }
    }
}

/// A discretized contour shape: unit directions paired with radii. Radii
/// of zero are permitted (the boundary touches the origin there).
#[derive(Debug, Clone)]
pub struct StarBoundary {
    dim: usize,
    directions: Vec<f64>,
    radii: Vec<f64>,
}

impl StarBoundary {
    /// Builds a boundary from flat row-major directions and matching radii,
    /// validating unit norms and nonnegativity.
    pub fn new(dim: usize, directions: Vec<f64>, radii: Vec<f64>) -> Result<Self> {
        if dim < 2 {
            return Err(Error::parameter(format!(
                "boundary dimension must be >= 2, got {dim}"
            )));
        }
        if directions.len() != radii.len() * dim {
            return Err(Error::parameter(format!(
                "direction/radius length mismatch: {} directions entries for {} radii in dim {dim}",
                directions.len(),
                radii.len()
            )));
        }
        if radii.is_empty() {
            return Err(Error::parameter(
                "boundary must have at least one node".to_string(),
            ));
        }
        for (k, d) in directions.chunks_exact(dim).enumerate() {
            let n = norm(d);
            if (n - 1.0).abs() > UNIT_NORM_TOL {
                return Err(Error::parameter(format!(
                    "direction {k} has norm {n}, expected 1 within {UNIT_NORM_TOL:e}"
                )));
            }
        }
        if let Some((k, &r)) = radii
            .iter()
            .enumerate()
            .find(|(_, &r)| r < 0.0 || r.is_nan())
        {
            return Err(Error::parameter(format!(
                "radius {k} is {r}, expected >= 0"
            )));
        }
        Ok(StarBoundary {
            dim,
            directions,
            radii,
        })
    }

    /// Ambient dimension.
    pub fn dimension(&self) -> usize {
        self.dim
    }

    /// Number of nodes.
    pub fn len(&self) -> usize {
        self.radii.len()
    }

    /// True if the boundary has no nodes (never holds for validated values).
    pub fn is_empty(&self) -> bool {
        self.radii.is_empty()
    }

    /// The k-th unit direction.
    pub fn direction(&self, k: usize) -> &[f64] {
        &self.directions[k * self.dim..(k + 1) * self.dim]
    }

    /// Radii, one per direction.
    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    /// The k-th boundary point `radii[k] * direction[k]`.
    pub fn point(&self, k: usize) -> Vec<f64> {
        self.direction(k)
            .iter()
            .map(|c| c * self.radii[k])
            .collect()
    }

    /// All boundary points as a flat row-major array.
    pub fn points_flat(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.directions.len());
        for (d, &r) in self.directions.chunks_exact(self.dim).zip(&self.radii) {
            out.extend(d.iter().map(|c| c * r));
        }
        out
    }

    /// Directions as a flat row-major array.
    pub fn directions_flat(&self) -> &[f64] {
        &self.directions
    }

    /// True if both boundaries share the same direction grid within
    /// `UNIT_NORM_TOL` per coordinate.
    pub fn same_grid(&self, other: &StarBoundary) -> bool {
        self.dim == other.dim
            && self.len() == other.len()
            && self
                .directions
                .iter()
                .zip(&other.directions)
                .all(|(a, b)| (a - b).abs() <= UNIT_NORM_TOL)
    }
}

/// Radius of the shape Z in direction `u`: the point of Z along `u` is
/// u/r(u), so the radius is 1/r(u).
pub fn boundary_radius(gauge: &RadialGauge, u: &[f64]) -> f64 {
    1.0 / gauge.evaluate(u)
}

/// Discretizes the true shape Z = {x : r(x) = 1} on a grid.
pub fn true_boundary(gauge: &RadialGauge, grid: &SphereGrid) -> Result<StarBoundary> {
    if gauge.dimension() != grid.dimension() {
        return Err(Error::parameter(format!(
            "gauge dimension {} does not match grid dimension {}",
            gauge.dimension(),
            grid.dimension()
        )));
    }
    let radii: Vec<f64> = grid.nodes().map(|u| boundary_radius(gauge, u)).collect();
    StarBoundary::new(grid.dimension(), grid.nodes.clone(), radii)
}

/// Density of the direction u = x/‖x‖ on the unit sphere: c₀·r(u)^{-p}.
pub fn direction_density(gauge: &RadialGauge, c0: f64, u: &[f64]) -> f64 {
    debug_assert!(c0 > 0.0);
    c0 * gauge.evaluate(u).powi(-(gauge.dimension() as i32))
}

/// Normalization constant c₀ = 1/∫ r(u)^{-p} du by quadrature on `grid`.
///
/// If the gauge carries an exact constant, a relative disagreement beyond
/// 1e-4 is reported as a warning diagnostic (the quadrature value is still
/// returned).
pub fn normalization_constant(gauge: &RadialGauge, grid: &SphereGrid) -> Result<f64> {
    if gauge.dimension() != grid.dimension() {
        return Err(Error::parameter(format!(
            "gauge dimension {} does not match grid dimension {}",
            gauge.dimension(),
            grid.dimension()
        )));
    }
    let p = gauge.dimension() as i32;
    let integral = grid.integrate(|u| gauge.evaluate(u).powi(-p));
    if !(integral.is_finite() && integral > 0.0) {
        return Err(Error::numerical(format!(
            "quadrature of r^-p returned {integral}; gauge '{}' is not integrable on this grid",
            gauge.label()
        )));
    }
    let c0 = 1.0 / integral;
    if let Some(exact) = gauge.known_c0() {
        let rel = (c0 - exact).abs() / exact;
        if rel > 1e-4 {
            log::warn!(
                "quadrature c0 = {c0:.8e} deviates from the exact constant {exact:.8e} \
                 by {rel:.2e} relative (grid resolution {}); consider a finer grid",
                grid.len()
            );
        }
    }
    Ok(c0)
}
