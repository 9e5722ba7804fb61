//! Closed-form evolution of the squeezed gauge (number) process.
//!
//! With coinciding-time products regularized as `a_t ↦ c a_{t−ε} + (1−c) a_{t+ε}`,
//! the normal symbol of the evolution is `exp{−i ∫ σ_τ α⁺_τ α_τ dτ}` with
//! `σ = Ω/(1 + icΩ)`. The per-mode multiplier of the solved process is
//! `S = 1 − iσ`, which has unit modulus exactly when `Re c = 1/2`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::TimeGrid;

const UNITARY_TOL: f64 = 1e-12;
const POLE_TOL: f64 = 1e-14;

/// Weighting `c` between the one-sided limits at coinciding times.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegularizationScheme {
    pub c: Complex64,
}

impl RegularizationScheme {
    pub fn new(c: Complex64) -> Self {
        Self { c }
    }

    /// The symmetric choice `c = 1/2`.
    pub fn symmetric() -> Self {
        Self::new(Complex64::new(0.5, 0.0))
    }

    pub fn is_unitary(&self) -> bool {
        unitarity_region(*self)
    }
}

impl Default for RegularizationScheme {
    fn default() -> Self {
        Self::symmetric()
    }
}

/// Which per-mode factor enters the correlator exponent.
///
/// `AsPrinted` uses `(1 + iΩ/2)/(1 − iΩ/2)` (for general unitary `c`, the
/// conjugate of `1 − iσ`); `Derived` uses `1 − iσ` itself, which is what the
/// lattice brute force reproduces. The two are complex conjugates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Convention {
    #[default]
    AsPrinted,
    Derived,
}

impl Convention {
    pub fn name(self) -> &'static str {
        match self {
            Convention::AsPrinted => "paper",
            Convention::Derived => "derived",
        }
    }
}

impl std::str::FromStr for Convention {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "paper" => Ok(Convention::AsPrinted),
            "derived" => Ok(Convention::Derived),
            other => Err(Error::InvalidParameter(format!(
                "unknown convention `{other}` (expected paper|derived)"
            ))),
        }
    }
}

/// How per-sample values are integrated over a [`TimeGrid`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Quadrature {
    /// `Σ_k (t_{k+1} − t_k) v_k`: exact for the piecewise-constant model.
    #[default]
    PiecewiseConstant,
    Trapezoid,
}

pub fn integrate(grid: &TimeGrid, values: &[Complex64], rule: Quadrature) -> Result<Complex64> {
    grid.check_len("integrand", values.len())?;
    let widths = grid.widths();
    let total: Complex64 = match rule {
        Quadrature::PiecewiseConstant => widths.iter().zip(values).map(|(w, v)| v * *w).sum(),
        Quadrature::Trapezoid => widths
            .iter()
            .zip(values.windows(2))
            .map(|(w, v)| (v[0] + v[1]) * (0.5 * w))
            .sum(),
    };
    if !total.re.is_finite() || !total.im.is_finite() {
        return Err(Error::QuadratureFailure(format!(
            "non-finite integral {total}"
        )));
    }
    Ok(total)
}

/// `σ = Ω / (1 + icΩ)`.
pub fn sigma(big_omega: f64, scheme: RegularizationScheme) -> Result<Complex64> {
    let denom = Complex64::new(1.0, 0.0) + Complex64::i() * scheme.c * big_omega;
    if denom.norm() < POLE_TOL {
        return Err(Error::PoleInScheme(denom.norm()));
    }
    Ok(Complex64::from(big_omega) / denom)
}

/// Per-mode multiplier `S = 1 − iσ`.
pub fn multiplier(sigma: Complex64) -> Complex64 {
    Complex64::new(1.0, 0.0) - Complex64::i() * sigma
}

/// The printed factor `(1 + iΩ/2)/(1 − iΩ/2)`.
pub fn printed_factor(big_omega: f64) -> Complex64 {
    let h = Complex64::new(0.0, big_omega / 2.0);
    (1.0 + h) / (1.0 - h)
}

/// Factor multiplying `f1 f2` in the correlator exponent.
pub fn correlator_factor(
    big_omega: f64,
    scheme: RegularizationScheme,
    convention: Convention,
) -> Result<Complex64> {
    let s = multiplier(sigma(big_omega, scheme)?);
    Ok(match convention {
        Convention::Derived => s,
        Convention::AsPrinted => s.conj(),
    })
}

/// `Re c = 1/2` within 1e-12.
pub fn unitarity_region(scheme: RegularizationScheme) -> bool {
    (scheme.c.re - 0.5).abs() <= UNITARY_TOL
}

/// Largest `| |1 − iσ(Ω, c)| − 1 |` over the sampled Ω; an independent
/// witness for [`unitarity_region`].
pub fn unitarity_witness(scheme: RegularizationScheme, omegas: &[f64]) -> Result<f64> {
    omegas.iter().try_fold(0.0f64, |acc, &w| {
        let s = multiplier(sigma(w, scheme)?);
        Ok(acc.max((s.norm() - 1.0).abs()))
    })
}

/// Phase lost by the symmetric regularization relative to `e^{−iΩ}`:
/// `Ω − 2 arctan(Ω/2)`.
pub fn regularization_phase_gap(big_omega: f64) -> f64 {
    big_omega - 2.0 * (big_omega / 2.0).atan()
}

/// σ and the multiplier `1 − iσ` sampled along a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolKernel {
    pub grid: TimeGrid,
    pub sigma: Vec<Complex64>,
    pub multiplier: Vec<Complex64>,
}

impl SymbolKernel {
    pub fn new(grid: TimeGrid, big_omega: &[f64], scheme: RegularizationScheme) -> Result<Self> {
        grid.check_len("Omega", big_omega.len())?;
        let sigma = big_omega
            .iter()
            .map(|&w| sigma(w, scheme))
            .collect::<Result<Vec<_>>>()?;
        let multiplier = sigma.iter().map(|&s| multiplier(s)).collect();
        Ok(Self {
            grid,
            sigma,
            multiplier,
        })
    }

    /// Largest `| |S_k| − 1 |` along the path.
    pub fn max_modulus_defect(&self) -> f64 {
        self.multiplier
            .iter()
            .map(|s| (s.norm() - 1.0).abs())
            .fold(0.0, f64::max)
    }
}

/// `⟨ψ, exp{∫f1 a} U_t exp{∫f2 a⁺} ψ⟩ = exp{∫ f1 Φ(Ω) f2 dτ}`.
pub fn closed_form_correlator(
    grid: &TimeGrid,
    big_omega: &[f64],
    f1: &[Complex64],
    f2: &[Complex64],
    scheme: RegularizationScheme,
    convention: Convention,
    quadrature: Quadrature,
) -> Result<Complex64> {
    if !scheme.is_unitary() {
        return Err(Error::NonUnitaryScheme {
            re: scheme.c.re,
            im: scheme.c.im,
        });
    }
    grid.check_len("Omega", big_omega.len())?;
    grid.check_len("f1", f1.len())?;
    grid.check_len("f2", f2.len())?;
    let integrand = big_omega
        .iter()
        .zip(f1.iter().zip(f2))
        .map(|(&w, (a, b))| {
            let phi = correlator_factor(w, scheme, convention)?;
            if (phi.norm() - 1.0).abs() > UNITARY_TOL {
                return Err(Error::NonUnitaryScheme {
                    re: scheme.c.re,
                    im: scheme.c.im,
                });
            }
            Ok(a * phi * b)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(integrate(grid, &integrand, quadrature)?.exp())
}

/// Vacuum amplitude of the linear model in normal form: `exp(−c ∫ |F|² dτ)`.
pub fn linear_vacuum_amplitude(
    grid: &TimeGrid,
    f: &[Complex64],
    scheme: RegularizationScheme,
    quadrature: Quadrature,
) -> Result<Complex64> {
    grid.check_len("F", f.len())?;
    let weights: Vec<Complex64> = f.iter().map(|z| Complex64::from(z.norm_sqr())).collect();
    Ok((-scheme.c * integrate(grid, &weights, quadrature)?).exp())
}

/// Ω ≡ 2f: the number-process generator reached by the critical family as ε → 0.
pub fn poisson_generator_from_critical(f: &[f64]) -> Vec<f64> {
    f.iter().map(|x| 2.0 * x).collect()
}
