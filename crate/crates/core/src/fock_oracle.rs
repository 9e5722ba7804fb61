//! Brute-force ground truth on a truncated single-mode Fock space.
//!
//! White noise is discretized into independent lattice modes: on a step Δ,
//! `b_t ≈ b_k / √Δ` with `[b_k, b_k⁺] = 1`, and `δ(0) → 1/Δ`. Every mode lives
//! in the truncated number basis `|0⟩..|d−1⟩`, and all multi-mode quantities
//! are products of per-mode matrix elements.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::quadratic_model::solve_theta;

const HERMITIAN_TOL: f64 = 1e-12;
const NUMBER_CONSERVING_TOL: f64 = 1e-12;
const TAIL_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FockTruncation(usize);

impl FockTruncation {
    pub fn new(d: usize) -> Result<Self> {
        if d < 2 {
            return Err(Error::InvalidTruncation(d));
        }
        Ok(Self(d))
    }

    pub fn dim(self) -> usize {
        self.0
    }
}

/// Dense d×d complex matrix acting on one lattice mode.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeMatrix(DMatrix<Complex64>);

impl ModeMatrix {
    pub fn new(m: DMatrix<Complex64>) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::InvalidParameter(format!(
                "mode matrix must be square, got {}x{}",
                m.nrows(),
                m.ncols()
            )));
        }
        if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidParameter(
                "mode matrix has non-finite entries".into(),
            ));
        }
        Ok(Self(m))
    }

    pub fn identity(trunc: FockTruncation) -> Self {
        Self(DMatrix::identity(trunc.dim(), trunc.dim()))
    }

    pub fn from_diagonal(diag: &[Complex64]) -> Self {
        Self(DMatrix::from_diagonal(&DVector::from_column_slice(diag)))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.0
    }

    pub fn into_matrix(self) -> DMatrix<Complex64> {
        self.0
    }

    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    pub fn hermiticity_defect(&self) -> f64 {
        max_abs(&(&self.0 - self.0.adjoint()))
    }

    /// `max |U⁺U − I|`.
    pub fn unitarity_defect(&self) -> f64 {
        let n = self.dim();
        max_abs(&(self.0.adjoint() * &self.0 - DMatrix::<Complex64>::identity(n, n)))
    }
}

impl std::ops::Mul for &ModeMatrix {
    type Output = ModeMatrix;
    fn mul(self, rhs: &ModeMatrix) -> ModeMatrix {
        ModeMatrix(&self.0 * &rhs.0)
    }
}

impl std::ops::Sub for &ModeMatrix {
    type Output = ModeMatrix;
    fn sub(self, rhs: &ModeMatrix) -> ModeMatrix {
        ModeMatrix(&self.0 - &rhs.0)
    }
}

fn max_abs(m: &DMatrix<Complex64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Discrete realization of white noise: N independent modes of step Δ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseLattice {
    delta: f64,
    modes: usize,
    trunc: FockTruncation,
}

impl NoiseLattice {
    pub fn new(delta: f64, modes: usize, trunc: FockTruncation) -> Result<Self> {
        if !(delta.is_finite() && delta > 0.0) {
            return Err(Error::NonpositiveStep(delta));
        }
        if modes == 0 {
            return Err(Error::InvalidParameter(
                "lattice needs at least one mode".into(),
            ));
        }
        Ok(Self {
            delta,
            modes,
            trunc,
        })
    }

    /// N modes covering `[0, horizon]`.
    pub fn over_horizon(horizon: f64, modes: usize, trunc: FockTruncation) -> Result<Self> {
        if modes == 0 {
            return Err(Error::InvalidParameter(
                "lattice needs at least one mode".into(),
            ));
        }
        Self::new(horizon / modes as f64, modes, trunc)
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn trunc(&self) -> FockTruncation {
        self.trunc
    }

    pub fn horizon(&self) -> f64 {
        self.delta * self.modes as f64
    }

    /// Lattice value of δ(0).
    pub fn delta_at_zero(&self) -> f64 {
        1.0 / self.delta
    }

    fn check_len(&self, what: &'static str, got: usize) -> Result<()> {
        if got != self.modes {
            return Err(Error::LengthMismatch {
                what,
                expected: self.modes,
                got,
            });
        }
        Ok(())
    }
}

/// Annihilator `a|n⟩ = √n |n−1⟩` and its adjoint.
pub fn ladder_ops(trunc: FockTruncation) -> (ModeMatrix, ModeMatrix) {
    let d = trunc.dim();
    let mut a = DMatrix::<Complex64>::zeros(d, d);
    for n in 1..d {
        a[(n - 1, n)] = Complex64::new((n as f64).sqrt(), 0.0);
    }
    let adag = a.adjoint();
    (ModeMatrix(a), ModeMatrix(adag))
}

pub fn number_op(trunc: FockTruncation) -> ModeMatrix {
    let diag: Vec<Complex64> = (0..trunc.dim())
        .map(|n| Complex64::new(n as f64, 0.0))
        .collect();
    ModeMatrix::from_diagonal(&diag)
}

/// Per-step generator `ω a⁺a + g (a⁺² + a²) − κ I`; the `−κ` addend is what
/// remains of the counterterm `−κ/Δ` once multiplied by the step Δ.
pub fn quadratic_generator(omega: f64, g: f64, kappa: f64, trunc: FockTruncation) -> ModeMatrix {
    let (a, adag) = ladder_ops(trunc);
    let d = trunc.dim();
    let n = &adag * &a;
    let pair = &(&adag * &adag).0 + &(&a * &a).0;
    let h = n.0 * Complex64::from(omega) + pair * Complex64::from(g)
        - DMatrix::<Complex64>::identity(d, d) * Complex64::from(kappa);
    ModeMatrix(h)
}

/// The `m` lowest eigenvalues of `ω a⁺a + g(a⁺² + a²)`, ascending.
///
/// With squeezing (`g ≠ 0`) this requires `d ≥ 4m + 20` so the truncation
/// corner stays far from the low spectrum; the unsqueezed matrix is already
/// diagonal and only needs `d ≥ m`.
pub fn spectrum_check(omega: f64, g: f64, trunc: FockTruncation, m: usize) -> Result<Vec<f64>> {
    solve_theta(omega, g)?;
    let d = trunc.dim();
    let needed = if g == 0.0 { m } else { 4 * m + 20 };
    if d < needed {
        return Err(Error::TruncationTooSmall {
            d,
            reason: format!("spectrum of {m} levels needs d >= {needed}"),
        });
    }
    let mut h = DMatrix::<f64>::zeros(d, d);
    for n in 0..d {
        h[(n, n)] = omega * n as f64;
        if n + 2 < d {
            let v = g * ((n + 1) as f64 * (n + 2) as f64).sqrt();
            h[(n, n + 2)] = v;
            h[(n + 2, n)] = v;
        }
    }
    let mut evals: Vec<f64> = SymmetricEigen::new(h).eigenvalues.iter().copied().collect();
    evals.sort_by(f64::total_cmp);
    evals.truncate(m);
    Ok(evals)
}

/// `exp(−iH)` for Hermitian H, through the eigendecomposition `H = V Λ V⁺`.
pub(crate) fn expm_hermitian(h: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let eig = SymmetricEigen::new(h.clone());
    let v = &eig.eigenvectors;
    let phases = DVector::from_iterator(
        eig.eigenvalues.len(),
        eig.eigenvalues
            .iter()
            .map(|&l| Complex64::from_polar(1.0, -l)),
    );
    let mut scaled = v.clone();
    for (j, mut col) in scaled.column_iter_mut().enumerate() {
        col *= phases[j];
    }
    scaled * v.adjoint()
}

pub fn unitary_step(h: &ModeMatrix) -> Result<ModeMatrix> {
    let scale = max_abs(&h.0).max(1.0);
    let defect = h.hermiticity_defect();
    if defect > HERMITIAN_TOL * scale {
        return Err(Error::NonHermitianInput(defect));
    }
    // symmetrize away round-off before the Hermitian solver reads one triangle
    let sym = (&h.0 + h.0.adjoint()) * Complex64::from(0.5);
    Ok(ModeMatrix(expm_hermitian(&sym)))
}

/// `⟨1|U|1⟩ / ⟨0|U|0⟩` for a number-conserving step.
pub fn gauge_multiplier(u: &ModeMatrix) -> Result<Complex64> {
    let off =
        u.0.iter()
            .enumerate()
            .filter(|(idx, _)| idx % u.dim() != idx / u.dim())
            .map(|(_, z)| z.norm())
            .fold(0.0, f64::max);
    if off > NUMBER_CONSERVING_TOL {
        return Err(Error::NotNumberConserving(off));
    }
    Ok(u.0[(1, 1)] / u.0[(0, 0)])
}

/// Number-conserving step `exp(−i φ n)` with `φ = 2 arctan(Ω/2)`: it acts as
/// `Sⁿ` on `|n⟩`, where `S = (1 − iΩ/2)/(1 + iΩ/2)` is the Cayley multiplier.
pub fn cayley_step(big_omega: f64, trunc: FockTruncation) -> ModeMatrix {
    let phase = 2.0 * (big_omega / 2.0).atan();
    exponential_step(phase, trunc)
}

/// Naive step `exp(−iΩ n)`, i.e. the number generator exponentiated without
/// any coinciding-time regularization.
pub fn exponential_step(big_omega: f64, trunc: FockTruncation) -> ModeMatrix {
    let h = number_op(trunc).0 * Complex64::from(big_omega);
    ModeMatrix(expm_hermitian(&h))
}

/// Closed-form lattice correlator `exp(Σ_k f1_k f2_k Δ M_k)`.
pub fn correlator_oracle(
    lattice: &NoiseLattice,
    multipliers: &[Complex64],
    f1: &[Complex64],
    f2: &[Complex64],
) -> Result<Complex64> {
    lattice.check_len("multipliers", multipliers.len())?;
    lattice.check_len("f1", f1.len())?;
    lattice.check_len("f2", f2.len())?;
    let exponent: Complex64 = multipliers
        .iter()
        .zip(f1.iter().zip(f2))
        .map(|(m, (a, b))| a * b * lattice.delta * m)
        .sum();
    Ok(exponent.exp())
}

/// Truncated exponential vector `Σ_{n<d} wⁿ/√(n!) |n⟩`.
pub fn exponential_vector(w: Complex64, trunc: FockTruncation) -> DVector<Complex64> {
    let d = trunc.dim();
    let mut v = DVector::<Complex64>::zeros(d);
    let mut term = Complex64::from(1.0);
    for n in 0..d {
        if n > 0 {
            term *= w / (n as f64).sqrt();
        }
        v[n] = term;
    }
    v
}

/// Bound `|w|^{2d}/d!` on the squared norm dropped by truncating `e(w)`.
pub fn truncation_tail(w: f64, trunc: FockTruncation) -> f64 {
    let d = trunc.dim();
    if w == 0.0 {
        return 0.0;
    }
    let ln_fact: f64 = (1..=d).map(|k| (k as f64).ln()).sum();
    (2.0 * d as f64 * w.abs().ln() - ln_fact).exp()
}

/// Worst per-mode truncation tail over the lattice for test functions f1, f2.
pub fn correlator_tail_bound(lattice: &NoiseLattice, f1: &[Complex64], f2: &[Complex64]) -> f64 {
    let w = f1.iter().chain(f2).map(|f| f.norm()).fold(0.0, f64::max) * lattice.delta.sqrt();
    truncation_tail(w, lattice.trunc)
}

/// `Π_k ⟨e(conj(f1_k)√Δ)| U_k |e(f2_k √Δ)⟩`, evaluated mode by mode.
pub fn brute_force_correlator(
    lattice: &NoiseLattice,
    steps: &[ModeMatrix],
    f1: &[Complex64],
    f2: &[Complex64],
    exec: Execution,
) -> Result<Complex64> {
    lattice.check_len("steps", steps.len())?;
    lattice.check_len("f1", f1.len())?;
    lattice.check_len("f2", f2.len())?;
    let d = lattice.trunc.dim();
    if let Some(bad) = steps.iter().find(|u| u.dim() != d) {
        return Err(Error::LengthMismatch {
            what: "step dimension",
            expected: d,
            got: bad.dim(),
        });
    }
    let tail = correlator_tail_bound(lattice, f1, f2);
    if tail > TAIL_TOL {
        return Err(Error::TruncationTooSmall {
            d,
            reason: format!("exponential-vector tail bound {tail:e} exceeds {TAIL_TOL:e}"),
        });
    }
    let root = lattice.delta.sqrt();
    let factors = exec.map_range(lattice.modes, |k| {
        let bra = exponential_vector(f1[k].conj() * root, lattice.trunc);
        let ket = exponential_vector(f2[k] * root, lattice.trunc);
        bra.dotc(&(steps[k].matrix() * ket))
    });
    Ok(factors.into_iter().product())
}

/// Per-step unitary `exp(−i√Δ (F a⁺ + F̄ a))` of the linear white-noise model.
pub fn linear_step(f: Complex64, delta: f64, trunc: FockTruncation) -> ModeMatrix {
    let (a, adag) = ladder_ops(trunc);
    let root = delta.sqrt();
    let h = adag.0 * (f * root) + a.0 * (f.conj() * root);
    ModeMatrix(expm_hermitian(&h))
}

/// `Π_k ⟨0|W_k|0⟩` over the lattice with one F sample per mode.
pub fn linear_vacuum_product(
    lattice: &NoiseLattice,
    f: &[Complex64],
    exec: Execution,
) -> Result<Complex64> {
    lattice.check_len("F", f.len())?;
    let amps = exec.map(f, |&fk| {
        linear_step(fk, lattice.delta, lattice.trunc).0[(0, 0)]
    });
    Ok(amps.into_iter().product())
}
