//! Kernel density estimation for directions on the unit sphere.
//!
//! The estimator is
//!
//! ```text
//! f̂_n(u) = C(η)/(n·η^{p-1}) · Σ_i L((1 − uᵀu_i)/η²)
//! ```
//!
//! with a nonnegative kernel L and bandwidth η > 0. The normalizer
//!
//! ```text
//! C(η) = η^{p-1} / ∫_{S^{p-1}} L((1 − uᵀy)/η²) du
//!      = 1 / { ω_{p-1} ∫₀^{2/η²} L(s) s^{(p-3)/2} (2 − η²s)^{(p-3)/2} ds }
//! ```
//!
//! does not depend on y and makes f̂_n integrate to one exactly. It is
//! computed here through the substitution s = (2/η²)·sin²φ, which removes
//! both endpoint singularities for every p ≥ 2:
//!
//! ```text
//! C(η) = 1 / { ω_{p-1} (2/η)^{p-1} ∫₀^{φmax} L((2/η²)·sin²φ) (sinφ·cosφ)^{p-2} dφ }
//! ```

use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::SphereGrid;
use crate::numeric::{adaptive_simpson, dot, norm, omega};
use crate::sampling::DirectionalSample;

/// A smoothing kernel L: ℝ≥0 → ℝ≥0 for the directional estimator.
#[derive(Clone)]
pub enum KernelFn {
    /// L(s) = exp(−s); unbounded support.
    VonMises,
    /// L(s) = 1 for s < 1, else 0; support bound 1.
    Uniform,
    /// Caller-supplied kernel.
    Custom {
        /// Text identifier.
        label: String,
        /// Smallest S with L(s) = 0 for all s > S, when the support is compact.
        support_bound: Option<f64>,
        /// The kernel function itself.
        eval: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    },
}

impl fmt::Debug for KernelFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "KernelFn({})", self.label())
    }
}

impl KernelFn {
    /// Kernel value L(s) at s ≥ 0.
    #[inline]
    pub fn evaluate(&self, s: f64) -> f64 {
        match self {
            KernelFn::VonMises => (-s).exp(),
            KernelFn::Uniform => {
                if s < 1.0 {
                    1.0
                } else {
                    0.0
                }
            }
            KernelFn::Custom { eval, .. } => eval(s),
        }
    }

    /// Text identifier.
    pub fn label(&self) -> &str {
        match self {
            KernelFn::VonMises => "vonmises",
            KernelFn::Uniform => "uniform",
            KernelFn::Custom { label, .. } => label,
        }
    }

    /// Smallest S with L ≡ 0 beyond S, when compactly supported.
    pub fn support_bound(&self) -> Option<f64> {
        match self {
            KernelFn::VonMises => None,
            KernelFn::Uniform => Some(1.0),
            KernelFn::Custom { support_bound, .. } => *support_bound,
        }
    }
}

/// The von Mises kernel L(s) = exp(−s).
pub fn kernel_von_mises() -> KernelFn {
    KernelFn::VonMises
}

/// The uniform kernel L(s) = 1(s < 1).
pub fn kernel_uniform() -> KernelFn {
    KernelFn::Uniform
}

/// Dispatches `body` with a statically known kernel closure so the hot
/// loops compile specialized for the built-ins.
macro_rules! with_kernel {
    ($kernel:expr, $l:ident, $body:expr) => {
        match $kernel {
            KernelFn::VonMises => {
                let $l = |s: f64| (-s).exp();
                $body
            }
            KernelFn::Uniform => {
                let $l = |s: f64| if s < 1.0 { 1.0 } else { 0.0 };
                $body
            }
            KernelFn::Custom { eval, .. } => {
                let $l = |s: f64| eval(s);
                $body
            }
        }
    };
}

/// Exact normalizer C(η) for kernel `L`, bandwidth `eta`, and dimension
/// `p`, by adaptive quadrature of the closed form to relative tolerance
/// 1e-10.
pub fn normalizer_c(kernel: &KernelFn, eta: f64, p: usize) -> Result<f64> {
    if !(eta > 0.0 && eta.is_finite()) {
        return Err(Error::parameter(format!(
            "bandwidth must be positive, got {eta}"
        )));
    }
    if p < 2 {
        return Err(Error::parameter(format!("dimension must be >= 2, got {p}")));
    }
    let s_max = 2.0 / (eta * eta);
    let phi_max = match kernel.support_bound() {
        Some(s) if s < s_max => (s / s_max).sqrt().min(1.0).asin(),
        _ => std::f64::consts::FRAC_PI_2,
    };
    let pow = p as i32 - 2;
    let integral = with_kernel!(kernel, l, {
        adaptive_simpson(
            |phi| {
                let (sin, cos) = phi.sin_cos();
                l(s_max * sin * sin) * (sin * cos).powi(pow)
            },
            0.0,
            phi_max,
            1e-10,
        )?
    });
    let scaled = (2.0 / eta).powi(p as i32 - 1) * integral * omega(p);
    if !(scaled.is_finite() && scaled > 0.0) {
        return Err(Error::numerical(format!(
            "normalizer integral for kernel '{}' at eta = {eta}, p = {p} evaluated to {scaled}",
            kernel.label()
        )));
    }
    Ok(1.0 / scaled)
}

/// A fitted directional density estimator. Immutable; evaluation is pure.
#[derive(Debug, Clone)]
pub struct KdeModel {
    sample: DirectionalSample,
    kernel: KernelFn,
    bandwidth: f64,
    normalizer: f64,
}

/// Fits the estimator: precomputes C(η) and captures the sample.
pub fn kde_fit(sample: &DirectionalSample, kernel: &KernelFn, eta: f64) -> Result<KdeModel> {
    if sample.is_empty() {
        return Err(Error::parameter(
            "cannot fit a density to an empty sample".to_string(),
        ));
    }
    let normalizer = normalizer_c(kernel, eta, sample.dimension())?;
    Ok(KdeModel {
        sample: sample.clone(),
        kernel: kernel.clone(),
        bandwidth: eta,
        normalizer,
    })
}

impl KdeModel {
    /// Ambient dimension p.
    pub fn dimension(&self) -> usize {
        self.sample.dimension()
    }

    /// Number of sample directions.
    pub fn sample_size(&self) -> usize {
        self.sample.len()
    }

    /// The sample the model was fitted on.
    pub fn sample(&self) -> &DirectionalSample {
        &self.sample
    }

    /// The kernel in use.
    pub fn kernel(&self) -> &KernelFn {
        &self.kernel
    }

    /// Bandwidth η.
    pub fn bandwidth(&self) -> f64 {
        self.bandwidth
    }

    /// Precomputed normalizer C(η).
    pub fn normalizer(&self) -> f64 {
        self.normalizer
    }

    /// Evaluates f̂_n at a unit vector.
    pub fn evaluate(&self, u: &[f64]) -> f64 {
        debug_assert_eq!(u.len(), self.dimension());
        debug_assert!(
            (norm(u) - 1.0).abs() <= 1e-9,
            "evaluation point must be a unit vector"
        );
        let p = self.dimension();
        let kappa = 1.0 / (self.bandwidth * self.bandwidth);
        let sum = with_kernel!(&self.kernel, l, {
            let mut acc = 0.0;
            for d in self.sample.directions_flat().chunks_exact(p) {
                let t = (1.0 - dot(u, d)).max(0.0);
                acc += l(t * kappa);
            }
            acc
        });
        self.scale() * sum
    }

    /// Evaluates f̂_n at every grid node. Nodes are processed in parallel;
    /// each node's summation order is identical to [`Self::evaluate`], so
    /// the results match pointwise evaluation bit for bit.
    pub fn evaluate_grid(&self, grid: &SphereGrid) -> Result<Vec<f64>> {
        if grid.dimension() != self.dimension() {
            return Err(Error::parameter(format!(
                "grid dimension {} does not match model dimension {}",
                grid.dimension(),
                self.dimension()
            )));
        }
        let nodes: Vec<&[f64]> = grid.nodes().collect();
        Ok(nodes.par_iter().map(|u| self.evaluate(u)).collect())
    }

    /// C(η)/(n·η^{p-1}), the factor in front of the kernel sum.
    fn scale(&self) -> f64 {
        let p = self.dimension() as i32;
        self.normalizer / (self.sample.len() as f64 * self.bandwidth.powi(p - 1))
    }
}

/// A deterministic bandwidth sequence n ↦ η_n.
#[derive(Clone)]
pub struct BandwidthSchedule {
    label: String,
    rule: Arc<dyn Fn(u64) -> f64 + Send + Sync>,
}

impl fmt::Debug for BandwidthSchedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BandwidthSchedule({})", self.label)
    }
}

impl BandwidthSchedule {
    /// The default power schedule η_n = n^{−1/(p+3)}.
    pub fn power(p: usize) -> Self {
        let exponent = -1.0 / (p as f64 + 3.0);
        BandwidthSchedule {
            label: format!("power(n^(-1/{}))", p + 3),
            rule: Arc::new(move |n| (n as f64).powf(exponent)),
        }
    }

    /// A constant schedule η_n ≡ eta.
    pub fn constant(eta: f64) -> Self {
        BandwidthSchedule {
            label: format!("constant({eta})"),
            rule: Arc::new(move |_| eta),
        }
    }

    /// A caller-supplied schedule.
    pub fn custom(
        label: impl Into<String>,
        rule: impl Fn(u64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        BandwidthSchedule {
            label: label.into(),
            rule: Arc::new(rule),
        }
    }

    /// η_n for a given sample size.
    pub fn eta(&self, n: u64) -> f64 {
        (self.rule)(n)
    }

    /// Text identifier.
    pub fn label(&self) -> &str {
        &self.label
    }
}

/// Verdict for one uniform-consistency condition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ConditionStatus {
    /// The check passed (possibly under a documented heuristic).
    Pass,
    /// The check failed.
    Fail,
    /// The probes were inconclusive (for example, non-monotone trends).
    Indeterminate,
}

/// One named condition with its verdict and supporting detail.
#[derive(Debug, Clone, Serialize)]
pub struct ConditionCheck {
    /// Short condition name.
    pub name: String,
    /// Verdict.
    pub status: ConditionStatus,
    /// What was measured.
    pub detail: String,
}

/// Report of the five uniform-consistency conditions for a kernel and a
/// bandwidth schedule.
#[derive(Debug, Clone, Serialize)]
pub struct BrzReport {
    /// The five checks, in order: density continuity, kernel boundedness,
    /// kernel tail integrability, bandwidth decay, effective sample growth.
    pub conditions: Vec<ConditionCheck>,
}

impl BrzReport {
    /// True if every condition passed.
    pub fn all_pass(&self) -> bool {
        self.conditions
            .iter()
            .all(|c| c.status == ConditionStatus::Pass)
    }
}

/// Checks the five sufficient conditions for almost-sure uniform
/// convergence of the directional estimator against a bandwidth schedule,
/// probing the asymptotic conditions at the supplied sample sizes.
///
/// Conditions on infinite sequences cannot be machine-verified; conditions
/// 4 and 5 are assessed heuristically on the probes (strict monotone trend
/// plus a factor-of-two decay, respectively factor-of-five growth) and
/// flagged indeterminate when the trend is non-monotone.
pub fn check_brz_conditions(
    kernel: &KernelFn,
    schedule: &BandwidthSchedule,
    p: usize,
    n_probe: &[u64],
) -> Result<BrzReport> {
    if p < 2 {
        return Err(Error::parameter(format!("dimension must be >= 2, got {p}")));
    }
    if n_probe.is_empty() {
        return Err(Error::parameter("probe list must be nonempty".to_string()));
    }
    if n_probe.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::parameter(
            "probe list must be strictly increasing".to_string(),
        ));
    }
    if n_probe[0] < 2 {
        return Err(Error::parameter("probes must be >= 2".to_string()));
    }

    let mut conditions = Vec::with_capacity(5);

    // 1. Continuity of the target density: guaranteed for gauge-derived
    // direction densities, not checkable for arbitrary data.
    conditions.push(ConditionCheck {
        name: "density continuity".to_string(),
        status: ConditionStatus::Pass,
        detail: "assumed; direction densities derived from continuous gauges are continuous"
            .to_string(),
    });

    // 2. Boundedness of L: numeric scan on [0, 100].
    let mut sup: f64 = 0.0;
    let mut bad = false;
    let mut s = 0.0;
    while s <= 100.0 {
        let v = kernel.evaluate(s);
        if !v.is_finite() || v < 0.0 {
            bad = true;
            break;
        }
        sup = sup.max(v);
        s += 1e-3;
    }
    conditions.push(ConditionCheck {
        name: "kernel boundedness".to_string(),
        status: if bad {
            ConditionStatus::Fail
        } else {
            ConditionStatus::Pass
        },
        detail: if bad {
            "kernel returned a negative or non-finite value".to_string()
        } else {
            format!("max over [0, 100] at step 1e-3: {sup:.6e}")
        },
    });

    // 3. ∫ sup_{|√t−√s|<1} L(t) · s^{(p-3)/2} ds < ∞. The inner sup is
    // discretized on a t-grid of step 1e-3; the outer integral uses the
    // substitution s = v² (which removes the p = 2 endpoint singularity)
    // with composite Simpson up to s = 400, plus a tail assessment.
    let envelope = |v: f64| -> f64 {
        // sup of L over t with |√t − v| < 1.
        let lo = (v - 1.0).max(0.0);
        let hi = v + 1.0;
        let lo_t = lo * lo;
        let hi_t = (hi * hi).min(kernel.support_bound().unwrap_or(f64::INFINITY));
        if hi_t <= lo_t {
            return 0.0;
        }
        let mut best: f64 = 0.0;
        let mut t = lo_t;
        while t <= hi_t {
            best = best.max(kernel.evaluate(t));
            t += 1e-3;
        }
        best.max(kernel.evaluate(hi_t))
    };
    let v_max = 20.0; // s up to 400
    let panels = 800;
    let h = v_max / panels as f64;
    let integrand = |v: f64| 2.0 * envelope(v) * v.powi(p as i32 - 2);
    let mut integral = 0.0;
    for k in 0..panels {
        let a = k as f64 * h;
        integral += h / 6.0 * (integrand(a) + 4.0 * integrand(a + 0.5 * h) + integrand(a + h));
    }
    let tail_env = envelope(v_max);
    let (status3, detail3) = if kernel.support_bound().is_some() && tail_env == 0.0 {
        (
            ConditionStatus::Pass,
            format!("integral over [0, 400] = {integral:.6e}; compact support, tail exactly zero"),
        )
    } else {
        // Decay assessment on the envelope.
        let mid_env = envelope(v_max / 2.0);
        let tail_small = tail_env * v_max.powi(p as i32 - 1) < 1e-8 * integral.max(1e-300);
        if tail_small && tail_env <= mid_env {
            (
                ConditionStatus::Pass,
                format!(
                    "integral over [0, 400] = {integral:.6e}; envelope at s = 400 is {tail_env:.3e}, tail negligible"
                ),
            )
        } else {
            (
                ConditionStatus::Indeterminate,
                format!(
                    "integral over [0, 400] = {integral:.6e}; envelope at s = 400 is {tail_env:.3e}, decay not established"
                ),
            )
        }
    };
    conditions.push(ConditionCheck {
        name: "kernel tail integrability".to_string(),
        status: status3,
        detail: detail3,
    });

    // 4. η_n → 0: strict decrease across the probes plus at least a
    // factor-of-two total decay (documented heuristic).
    let etas: Vec<f64> = n_probe.iter().map(|&n| schedule.eta(n)).collect();
    if let Some(&bad) = etas.iter().find(|&&e| e <= 0.0 || !e.is_finite()) {
        return Err(Error::parameter(format!(
            "schedule produced a non-positive bandwidth {bad}"
        )));
    }
    let decreasing = etas.windows(2).all(|w| w[1] < w[0]);
    let increases = etas.windows(2).any(|w| w[1] > w[0]);
    let decay = etas.last().unwrap() / etas.first().unwrap();
    let (status4, detail4) = if etas.len() < 2 {
        (
            ConditionStatus::Indeterminate,
            "single probe, trend unobservable".to_string(),
        )
    } else if decreasing && decay <= 0.5 {
        (
            ConditionStatus::Pass,
            format!("eta strictly decreasing over probes, total decay factor {decay:.3e}"),
        )
    } else if increases && !decreasing {
        (
            ConditionStatus::Indeterminate,
            format!("eta trend non-monotone over probes: {etas:?}"),
        )
    } else {
        (
            ConditionStatus::Fail,
            format!(
                "eta does not decay toward zero over probes (decay factor {decay:.3e}): {etas:?}"
            ),
        )
    };
    conditions.push(ConditionCheck {
        name: "bandwidth decay".to_string(),
        status: status4,
        detail: detail4,
    });

    // 5. n·η_n^{p-1}/log n → ∞: strict increase plus at least a
    // factor-of-five total growth (documented heuristic).
    let values: Vec<f64> = n_probe
        .iter()
        .zip(&etas)
        .map(|(&n, &eta)| n as f64 * eta.powi(p as i32 - 1) / (n as f64).ln())
        .collect();
    let increasing = values.windows(2).all(|w| w[1] > w[0]);
    let decreasing5 = values.windows(2).all(|w| w[1] < w[0]);
    let growth = values.last().unwrap() / values.first().unwrap();
    let (status5, detail5) = if values.len() < 2 {
        (
            ConditionStatus::Indeterminate,
            "single probe, trend unobservable".to_string(),
        )
    } else if increasing && growth >= 5.0 {
        (
            ConditionStatus::Pass,
            format!("n·eta^(p-1)/log n strictly increasing, total growth factor {growth:.3e}"),
        )
    } else if decreasing5 {
        (
            ConditionStatus::Fail,
            format!("n·eta^(p-1)/log n decreasing over probes: {values:?}"),
        )
    } else if increasing {
        (
            ConditionStatus::Indeterminate,
            format!("increasing but growth factor {growth:.3e} < 5, too weak to call"),
        )
    } else {
        (
            ConditionStatus::Indeterminate,
            format!("trend non-monotone over probes: {values:?}"),
        )
    };
    conditions.push(ConditionCheck {
        name: "effective sample growth".to_string(),
        status: status5,
        detail: detail5,
    });

    Ok(BrzReport { conditions })
}

/// Leave-one-out log-likelihood Σ_i log f̂_{n,−i}(u_i) for each candidate
/// bandwidth, where f̂_{n,−i} is fitted on the sample with u_i removed.
///
/// All candidates are evaluated in one sweep over unordered sample pairs.
/// The sweep is parallelized over fixed index blocks and the partial sums
/// are reduced in block order, so the result is independent of the number
/// of worker threads. Candidates whose leave-one-out density vanishes at
/// some point score −∞.
pub(crate) fn loo_log_likelihoods(
    sample: &DirectionalSample,
    kernel: &KernelFn,
    etas: &[f64],
) -> Result<Vec<f64>> {
    let n = sample.len();
    let p = sample.dimension();
    let dirs = sample.directions_flat();
    let ncand = etas.len();
    let kappas: Vec<f64> = etas.iter().map(|e| 1.0 / (e * e)).collect();

    const BLOCK: usize = 512;
    let nblocks = n.div_ceil(BLOCK);
    let mut tasks = Vec::new();
    for bi in 0..nblocks {
        for bj in bi..nblocks {
            tasks.push((bi, bj));
        }
    }
    let range = |b: usize| (b * BLOCK)..(((b + 1) * BLOCK).min(n));

    struct Partial {
        bi: usize,
        bj: usize,
        // Point-major accumulators: [point][candidate].
        si: Vec<f64>,
        sj: Vec<f64>,
    }

    let partials: Vec<Partial> = tasks
        .par_iter()
        .map(|&(bi, bj)| {
            let ri = range(bi);
            let rj = range(bj);
            let mut si = vec![0.0; ri.len() * ncand];
            let mut sj = vec![0.0; rj.len() * ncand];
            with_kernel!(kernel, l, {
                for (ii, i) in ri.clone().enumerate() {
                    let ui = &dirs[i * p..(i + 1) * p];
                    let j_start = if bi == bj { i + 1 } else { rj.start };
                    for j in j_start..rj.end {
                        let uj = &dirs[j * p..(j + 1) * p];
                        let t = (1.0 - dot(ui, uj)).max(0.0);
                        let row_i = &mut si[ii * ncand..(ii + 1) * ncand];
                        for (k, &kappa) in kappas.iter().enumerate() {
                            let w = l(t * kappa);
                            row_i[k] += w;
                            sj[(j - rj.start) * ncand + k] += w;
                        }
                    }
                }
            });
            Partial { bi, bj, si, sj }
        })
        .collect();

    // Ordered reduction: tasks arrive in construction order because
    // collect on an indexed parallel iterator preserves order.
    let mut sums = vec![0.0; n * ncand];
    for part in &partials {
        let ri = range(part.bi);
        let rj = range(part.bj);
        for (ii, i) in ri.enumerate() {
            for k in 0..ncand {
                sums[i * ncand + k] += part.si[ii * ncand + k];
            }
        }
        for (jj, j) in rj.enumerate() {
            for k in 0..ncand {
                sums[j * ncand + k] += part.sj[jj * ncand + k];
            }
        }
    }

    let mut scores = Vec::with_capacity(ncand);
    for (k, &eta) in etas.iter().enumerate() {
        let c = normalizer_c(kernel, eta, p)?;
        let scale = c / ((n - 1) as f64 * eta.powi(p as i32 - 1));
        let mut total = 0.0;
        let mut dead = false;
        for i in 0..n {
            let v = scale * sums[i * ncand + k];
            if v > 0.0 {
                total += v.ln();
            } else {
                dead = true;
                break;
            }
        }
        scores.push(if dead { f64::NEG_INFINITY } else { total });
    }
    Ok(scores)
}

/// Selects the bandwidth maximizing the leave-one-out log-likelihood over
/// a candidate grid. Ties are broken toward the larger bandwidth.
pub fn cross_validate_bandwidth(
    sample: &DirectionalSample,
    kernel: &KernelFn,
    eta_grid: &[f64],
) -> Result<f64> {
    if sample.len() < 10 {
        return Err(Error::parameter(format!(
            "cross-validation requires at least 10 sample points, got {}",
            sample.len()
        )));
    }
    if eta_grid.is_empty() {
        return Err(Error::parameter(
            "bandwidth grid must be nonempty".to_string(),
        ));
    }
    if let Some(&bad) = eta_grid.iter().find(|&&e| e <= 0.0 || !e.is_finite()) {
        return Err(Error::parameter(format!(
            "bandwidth candidates must be positive, got {bad}"
        )));
    }
    let scores = loo_log_likelihoods(sample, kernel, eta_grid)?;
    let mut order: Vec<usize> = (0..eta_grid.len()).collect();
    order.sort_by(|&a, &b| eta_grid[a].total_cmp(&eta_grid[b]));
    let mut best: Option<(f64, f64)> = None; // (score, eta)
    for idx in order {
        let s = scores[idx];
        if s.is_finite() && best.is_none_or(|(bs, _)| s >= bs) {
            best = Some((s, eta_grid[idx]));
        }
    }
    match best {
        Some((_, eta)) => Ok(eta),
        None => Err(Error::Selection(
            "every candidate bandwidth produced a vanishing leave-one-out density at some \
             sample point; widen the grid toward larger bandwidths"
                .to_string(),
        )),
    }
}
