//! Van Hove rescaling of a smooth field covariance.
//!
//! For `A(t) = ∫ a(k) f(k) e^{iω(k)t} dk` the vacuum covariance is
//! `G(t) = ∫ |f(k)|² e^{iω(k)t} dk`. Under `t → t/λ²`, `A → A/λ` the covariance
//! becomes `C_λ(τ) = G(τ/λ²)/λ²`, which tends to `2π|f(0)|²/|v| · δ(τ)` for the
//! linear dispersion `ω(k) = v k`. Only this second-order statement is
//! checked here.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::exec::Execution;

/// Largest allowed `spacing · |t|` for the k-quadrature.
const PHASE_LIMIT: f64 = 0.1;
/// Minimum τ-nodes per kernel width `2λ²` (and per test-function scale).
const NODES_PER_WIDTH: f64 = 10.0;

/// `|f(k)|²` on uniform k-nodes, with dispersion `ω(k) = v k`.
#[derive(Debug, Clone, PartialEq)]
pub struct FormFactorSpec {
    k_min: f64,
    k_max: f64,
    intensity: Vec<f64>,
    dispersion_slope: f64,
}

impl FormFactorSpec {
    pub fn new(k_min: f64, k_max: f64, intensity: Vec<f64>, dispersion_slope: f64) -> Result<Self> {
        if intensity.len() < 2 {
            return Err(Error::InvalidParameter(
                "form factor needs at least 2 nodes".into(),
            ));
        }
        if !k_min.is_finite() || !k_max.is_finite() || k_max <= k_min {
            return Err(Error::InvalidParameter(format!(
                "invalid k-range [{k_min}, {k_max}]"
            )));
        }
        if let Some(bad) = intensity.iter().find(|v| !v.is_finite() || **v < 0.0) {
            return Err(Error::InvalidParameter(format!(
                "intensity must be finite and nonnegative, got {bad}"
            )));
        }
        if dispersion_slope == 0.0 || !dispersion_slope.is_finite() {
            return Err(Error::InvalidParameter(
                "dispersion slope must be nonzero".into(),
            ));
        }
        Ok(Self {
            k_min,
            k_max,
            intensity,
            dispersion_slope,
        })
    }

    /// Samples `intensity(k)` on `nodes` uniform points of `[k_min, k_max]`.
    pub fn sample(
        intensity: impl Fn(f64) -> f64,
        k_min: f64,
        k_max: f64,
        nodes: usize,
        dispersion_slope: f64,
    ) -> Result<Self> {
        if nodes < 2 {
            return Err(Error::InvalidParameter(
                "form factor needs at least 2 nodes".into(),
            ));
        }
        let h = (k_max - k_min) / (nodes - 1) as f64;
        let values = (0..nodes)
            .map(|j| intensity(k_min + j as f64 * h))
            .collect();
        Self::new(k_min, k_max, values, dispersion_slope)
    }

    pub fn spacing(&self) -> f64 {
        (self.k_max - self.k_min) / (self.intensity.len() - 1) as f64
    }

    pub fn nodes(&self) -> usize {
        self.intensity.len()
    }

    pub fn dispersion_slope(&self) -> f64 {
        self.dispersion_slope
    }

    /// Linear interpolation of `|f(k)|²`; zero outside the sampled range.
    pub fn intensity_at(&self, k: f64) -> f64 {
        if k < self.k_min || k > self.k_max {
            return 0.0;
        }
        let x = (k - self.k_min) / self.spacing();
        let j = (x.floor() as usize).min(self.nodes() - 2);
        let frac = x - j as f64;
        self.intensity[j] * (1.0 - frac) + self.intensity[j + 1] * frac
    }

    /// Weight `2π|f(0)|²/|v|` of the limiting δ-function.
    pub fn delta_weight(&self) -> f64 {
        2.0 * PI * self.intensity_at(0.0) / self.dispersion_slope.abs()
    }
}

/// Smearing function φ for distributional convergence checks.
#[derive(Clone)]
pub struct TestFunction {
    f: Arc<dyn Fn(f64) -> Complex64 + Send + Sync>,
    /// Length over which φ varies appreciably.
    pub scale: f64,
}

impl std::fmt::Debug for TestFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("TestFunction")
            .field("scale", &self.scale)
            .field("at_zero", &self.at_zero())
            .finish()
    }
}

impl TestFunction {
    pub fn new(f: impl Fn(f64) -> Complex64 + Send + Sync + 'static, scale: f64) -> Self {
        Self {
            f: Arc::new(f),
            scale,
        }
    }

    /// `e^{−τ²}`
    pub fn gaussian() -> Self {
        Self::new(|t| Complex64::new((-t * t).exp(), 0.0), 1.0)
    }

    /// `τ e^{−τ²}`, which vanishes at the origin.
    pub fn odd_gaussian() -> Self {
        Self::new(|t| Complex64::new(t * (-t * t).exp(), 0.0), 1.0)
    }

    pub fn eval(&self, tau: f64) -> Complex64 {
        (self.f)(tau)
    }

    pub fn at_zero(&self) -> Complex64 {
        self.eval(0.0)
    }
}

/// τ-quadrature layout: `nodes` uniform points on `[−λ² cutoff, λ² cutoff]`,
/// where `cutoff` bounds the unscaled times at which `G` is non-negligible.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmearingGrid {
    pub cutoff: f64,
    pub nodes: usize,
}

impl Default for SmearingGrid {
    fn default() -> Self {
        Self {
            cutoff: 12.0,
            nodes: 2401,
        }
    }
}

/// `G(t) = ∫ |f(k)|² e^{ivkt} dk` by the trapezoid rule.
pub fn field_covariance(spec: &FormFactorSpec, t: f64) -> Result<Complex64> {
    let h = spec.spacing();
    if h * t.abs() > PHASE_LIMIT {
        return Err(Error::PhaseUnderResolved { spacing: h, t });
    }
    let last = spec.nodes() - 1;
    let rate = spec.dispersion_slope * t;
    let sum: Complex64 = spec
        .intensity
        .iter()
        .enumerate()
        .map(|(j, &w)| {
            let k = spec.k_min + j as f64 * h;
            let weight = if j == 0 || j == last { 0.5 } else { 1.0 };
            Complex64::from_polar(weight * w, rate * k)
        })
        .sum();
    Ok(sum * h)
}

fn check_lambda(lambda: f64) -> Result<()> {
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "lambda must be positive, got {lambda}"
        )));
    }
    Ok(())
}

/// `C_λ(τ) = G(τ/λ²)/λ²`.
pub fn rescaled_covariance(spec: &FormFactorSpec, lambda: f64, tau: f64) -> Result<Complex64> {
    check_lambda(lambda)?;
    let l2 = lambda * lambda;
    Ok(field_covariance(spec, tau / l2)? / l2)
}

fn smear(
    spec: &FormFactorSpec,
    lambda: f64,
    phi: Option<&TestFunction>,
    grid: &SmearingGrid,
    exec: Execution,
) -> Result<Complex64> {
    check_lambda(lambda)?;
    if grid.nodes < 3 || grid.cutoff.is_nan() || grid.cutoff <= 0.0 {
        return Err(Error::KernelUnderResolved(format!(
            "smearing grid needs >= 3 nodes and a positive cutoff, got {grid:?}"
        )));
    }
    let l2 = lambda * lambda;
    let unit = 2.0 * grid.cutoff / (grid.nodes - 1) as f64;
    let h = l2 * unit;
    if h > 2.0 * l2 / NODES_PER_WIDTH {
        return Err(Error::KernelUnderResolved(format!(
            "tau spacing {h:e} coarser than kernel width 2*lambda^2 = {:e} / {NODES_PER_WIDTH}",
            2.0 * l2
        )));
    }
    if let Some(phi) = phi {
        if h > phi.scale / NODES_PER_WIDTH {
            return Err(Error::KernelUnderResolved(format!(
                "tau spacing {h:e} coarser than test-function scale {:e} / {NODES_PER_WIDTH}",
                phi.scale
            )));
        }
    }
    let last = grid.nodes - 1;
    let terms = exec.map_range(grid.nodes, |j| -> Result<Complex64> {
        let tau = l2 * (-grid.cutoff + j as f64 * unit);
        let weight = if j == 0 || j == last { 0.5 } else { 1.0 };
        let kernel = rescaled_covariance(spec, lambda, tau)?;
        let smear = phi.map_or(Complex64::new(1.0, 0.0), |p| p.eval(tau));
        Ok(kernel * smear * weight)
    });
    let sum = terms.into_iter().sum::<Result<Complex64>>()?;
    Ok(sum * h)
}

/// `∫ C_λ(τ) φ(τ) dτ`; tends to `delta_weight · φ(0)` as λ → 0.
pub fn smeared_limit(
    spec: &FormFactorSpec,
    lambda: f64,
    phi: &TestFunction,
    grid: &SmearingGrid,
    exec: Execution,
) -> Result<Complex64> {
    smear(spec, lambda, Some(phi), grid, exec)
}

/// `∫ C_λ(τ) dτ`, independent of λ.
pub fn total_mass(
    spec: &FormFactorSpec,
    lambda: f64,
    grid: &SmearingGrid,
    exec: Execution,
) -> Result<Complex64> {
    smear(spec, lambda, None, grid, exec)
}
