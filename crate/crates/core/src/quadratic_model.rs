//! Bogoliubov diagonalization of the quadratic white-noise generator
//! `ω b⁺b + g (b⁺² + b²) + c`.
//!
//! A hyperbolic rotation by angle θ with `tanh 2θ = 2g/ω` maps the generator to
//! `Ω a⁺a + κ δ(0)`. The `δ(0)` piece is cancelled by the counterterm
//! `c = −κ δ(0)`, which on a lattice of step Δ becomes `−κ/Δ`.

use crate::error::{Error, Result};
use crate::grid::TimeGrid;

/// |g/ω| closer than this to 1/2 is treated as on the boundary.
const THRESHOLD_GUARD: f64 = 1e-15;

/// Time-sampled real coefficients (ω_t, g_t).
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientPath {
    grid: TimeGrid,
    omega: Vec<f64>,
    g: Vec<f64>,
}

impl CoefficientPath {
    pub fn new(grid: TimeGrid, omega: Vec<f64>, g: Vec<f64>) -> Result<Self> {
        grid.check_len("omega", omega.len())?;
        grid.check_len("g", g.len())?;
        Ok(Self { grid, omega, g })
    }

    pub fn constant(grid: TimeGrid, omega: f64, g: f64) -> Self {
        let n = grid.len();
        Self {
            grid,
            omega: vec![omega; n],
            g: vec![g; n],
        }
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn omega(&self) -> &[f64] {
        &self.omega
    }

    pub fn g(&self) -> &[f64] {
        &self.g
    }

    /// First sample violating the Bogoliubov constraint, if any.
    pub fn check_admissible(&self) -> Result<()> {
        for (k, (&w, &g)) in self.omega.iter().zip(&self.g).enumerate() {
            check_pair(w, g).map_err(|e| with_index(e, k))?;
        }
        Ok(())
    }

    pub fn is_admissible(&self) -> bool {
        self.check_admissible().is_ok()
    }
}

/// Per-sample (θ, Ω, κ).
#[derive(Debug, Clone, PartialEq)]
pub struct BogoliubovData {
    pub theta: Vec<f64>,
    /// Ω, the frequency of the diagonal number term.
    pub renormalized_omega: Vec<f64>,
    /// κ, the coefficient of δ(0) produced by normal ordering.
    pub kappa: Vec<f64>,
}

/// Parameters of the regularized square of classical white noise:
/// `ω = 2f/ε`, `g = (f/ε)(1 − ε²/2)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CriticalFamilyParams {
    pub grid: TimeGrid,
    pub f: Vec<f64>,
    pub epsilon: f64,
}

fn check_pair(omega: f64, g: f64) -> Result<()> {
    if !omega.is_finite() || !g.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "non-finite coefficients omega = {omega}, g = {g}"
        )));
    }
    if omega == 0.0 {
        return if g == 0.0 {
            Ok(())
        } else {
            Err(Error::DegenerateFrequency { g })
        };
    }
    let ratio = (g / omega).abs();
    if ratio >= 0.5 || 0.5 - ratio <= THRESHOLD_GUARD {
        return Err(Error::ThresholdViolation {
            omega,
            g,
            index: None,
        });
    }
    Ok(())
}

fn with_index(err: Error, k: usize) -> Error {
    match err {
        Error::ThresholdViolation { omega, g, .. } => Error::ThresholdViolation {
            omega,
            g,
            index: Some(k),
        },
        other => other,
    }
}

/// Squeezing angle θ solving `sinhθ coshθ / (sinh²θ + cosh²θ) = g/ω`.
///
/// The left side equals `½ tanh 2θ`, so `θ = ½ artanh(2g/ω)`.
pub fn solve_theta(omega: f64, g: f64) -> Result<f64> {
    check_pair(omega, g)?;
    if omega == 0.0 {
        return Ok(0.0);
    }
    Ok(0.5 * (2.0 * g / omega).atanh())
}

/// Residual of the Bogoliubov condition at θ.
pub fn theta_residual(omega: f64, g: f64, theta: f64) -> f64 {
    let (s, c) = (theta.sinh(), theta.cosh());
    (s * c / (s * s + c * c) - g / omega).abs()
}

/// Ω and κ for one admissible (ω, g) pair.
pub fn diagonalize_pair(omega: f64, g: f64) -> Result<(f64, f64, f64)> {
    let theta = solve_theta(omega, g)?;
    let (s, c) = (theta.sinh(), theta.cosh());
    let denom = s * s + c * c;
    let big_omega = omega / denom;
    let kappa = -omega * s * s / denom;
    Ok((theta, big_omega, kappa))
}

pub fn diagonalize(path: &CoefficientPath) -> Result<BogoliubovData> {
    let n = path.grid.len();
    let mut data = BogoliubovData {
        theta: Vec::with_capacity(n),
        renormalized_omega: Vec::with_capacity(n),
        kappa: Vec::with_capacity(n),
    };
    for (k, (&w, &g)) in path.omega.iter().zip(&path.g).enumerate() {
        let (theta, big_omega, kappa) = diagonalize_pair(w, g).map_err(|e| with_index(e, k))?;
        data.theta.push(theta);
        data.renormalized_omega.push(big_omega);
        data.kappa.push(kappa);
    }
    Ok(data)
}

pub fn critical_family(params: &CriticalFamilyParams) -> Result<CoefficientPath> {
    let eps = params.epsilon;
    if eps.is_nan() || eps <= 0.0 || eps >= 2.0 {
        return Err(Error::EpsilonOutOfRange(eps));
    }
    let omega = params.f.iter().map(|f| 2.0 * f / eps).collect();
    let g = params
        .f
        .iter()
        .map(|f| f / eps * (1.0 - eps * eps / 2.0))
        .collect();
    CoefficientPath::new(params.grid.clone(), omega, g)
}

/// Lattice counterterm `c_k = −κ_k / Δ` (δ(0) realized as 1/Δ).
pub fn counterterm(data: &BogoliubovData, delta: f64) -> Result<Vec<f64>> {
    if delta.is_nan() || delta <= 0.0 {
        return Err(Error::NonpositiveStep(delta));
    }
    Ok(data.kappa.iter().map(|k| -k / delta).collect())
}
