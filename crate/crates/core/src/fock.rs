//! Truncated two-level ⊗ Fock space.
//!
//! Spinor index layout: `level * (n_max + 1) + n`, upper (excited) level first.
//! Ladder matrices act on the photon factor only; `a⁺` sends `|n_max⟩` to zero.
//!
//! Oscillator wavefunctions are evaluated with normalized three-term recurrences,
//! never through raw Hermite polynomials and factorials:
//!
//! * physical `ψₙ(x)`, square integrable, `a⁻ψ₀ = 0`;
//! * nonphysical `φ₋₁₋ₙ(x) := i⁻ⁿ ψₙ(ix)`, growing like `e^{x²/2}`, `a⁺φ₋₁ = 0`.
//!
//! In this real convention the ladder acts as `a⁻φ₋₁₋ₙ = √(n+1) φ₋₂₋ₙ` and
//! `a⁺φ₋₁₋ₙ = -√n φ₋ₙ`.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};

use crate::error::{JcError, Result};

/// Largest |x| accepted by [`psi_phys`].
pub const PSI_X_ENVELOPE: f64 = 30.0;
/// Largest order accepted by [`psi_phys`].
pub const PSI_N_ENVELOPE: usize = 200;
/// Largest |x| accepted by [`phi_nonphys`]; `e^{x²/2}` stays below ~1e297.
pub const PHI_X_ENVELOPE: f64 = 37.0;

pub type OperatorMatrix = DMatrix<f64>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FockTruncation {
    n_max: usize,
}

impl FockTruncation {
    pub fn new(n_max: usize) -> Result<Self> {
        if n_max < 2 {
            return Err(JcError::InvalidTruncation(n_max));
        }
        Ok(Self { n_max })
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn fock_dim(&self) -> usize {
        self.n_max + 1
    }

    pub fn dim(&self) -> usize {
        2 * (self.n_max + 1)
    }

    pub fn index(&self, level: Level, n: usize) -> Result<usize> {
        if n > self.n_max {
            return Err(JcError::IndexOutOfRange { n, n_max: self.n_max });
        }
        Ok(level.offset() * self.fock_dim() + n)
    }

    /// Inverse of [`FockTruncation::index`].
    pub fn split(&self, index: usize) -> (Level, usize) {
        let f = self.fock_dim();
        let level = if index < f { Level::Upper } else { Level::Lower };
        (level, index % f)
    }

    /// Recovers the truncation from a spinor-space matrix dimension.
    pub fn from_dim(dim: usize) -> Result<Self> {
        if !dim.is_multiple_of(2) || dim < 6 {
            return Err(JcError::DimensionMismatch(format!(
                "{dim} is not a spinor-space dimension 2(n_max+1) with n_max >= 2"
            )));
        }
        Self::new(dim / 2 - 1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Level {
    Upper,
    Lower,
}

impl Level {
    fn offset(self) -> usize {
        match self {
            Level::Upper => 0,
            Level::Lower => 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LadderOps {
    pub a_minus: DMatrix<f64>,
    pub a_plus: DMatrix<f64>,
    pub number: DMatrix<f64>,
}

pub fn make_ladder_ops(trunc: &FockTruncation) -> LadderOps {
    let d = trunc.fock_dim();
    let a_minus = DMatrix::from_fn(d, d, |i, j| if j == i + 1 { (j as f64).sqrt() } else { 0.0 });
    let a_plus = a_minus.transpose();
    let number = DMatrix::from_fn(d, d, |i, j| if i == j { i as f64 } else { 0.0 });
    LadderOps {
        a_minus,
        a_plus,
        number,
    }
}

/// `diag(0, 1, …, n_max) + offset`.
pub fn number_diag(trunc: &FockTruncation, offset: f64) -> DMatrix<f64> {
    let d = trunc.fock_dim();
    DMatrix::from_fn(d, d, |i, j| if i == j { i as f64 + offset } else { 0.0 })
}

/// Assembles `[[uu, ul], [lu, ll]]` from four photon-space blocks.
pub fn assemble_blocks(uu: &DMatrix<f64>, ul: &DMatrix<f64>, lu: &DMatrix<f64>, ll: &DMatrix<f64>) -> OperatorMatrix {
    let d = uu.nrows();
    let mut m = DMatrix::zeros(2 * d, 2 * d);
    m.view_mut((0, 0), (d, d)).copy_from(uu);
    m.view_mut((0, d), (d, d)).copy_from(ul);
    m.view_mut((d, 0), (d, d)).copy_from(lu);
    m.view_mut((d, d), (d, d)).copy_from(ll);
    m
}

/// Real coefficient vector on the truncated spinor basis.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinorFockState {
    trunc: FockTruncation,
    coeffs: DVector<f64>,
}

impl SpinorFockState {
    pub fn zeros(trunc: &FockTruncation) -> Self {
        Self {
            trunc: *trunc,
            coeffs: DVector::zeros(trunc.dim()),
        }
    }

    pub fn from_vector(trunc: &FockTruncation, coeffs: DVector<f64>) -> Result<Self> {
        if coeffs.len() != trunc.dim() {
            return Err(JcError::DimensionMismatch(format!(
                "state of length {} in a space of dimension {}",
                coeffs.len(),
                trunc.dim()
            )));
        }
        Ok(Self { trunc: *trunc, coeffs })
    }

    pub fn truncation(&self) -> &FockTruncation {
        &self.trunc
    }

    pub fn as_vector(&self) -> &DVector<f64> {
        &self.coeffs
    }

    pub fn upper(&self) -> &[f64] {
        &self.coeffs.as_slice()[..self.trunc.fock_dim()]
    }

    pub fn lower(&self) -> &[f64] {
        &self.coeffs.as_slice()[self.trunc.fock_dim()..]
    }

    pub fn get(&self, level: Level, n: usize) -> Result<f64> {
        Ok(self.coeffs[self.trunc.index(level, n)?])
    }

    pub fn set(&mut self, level: Level, n: usize, value: f64) -> Result<()> {
        let i = self.trunc.index(level, n)?;
        self.coeffs[i] = value;
        Ok(())
    }

    pub fn norm(&self) -> f64 {
        self.coeffs.norm()
    }

    pub fn apply(&self, op: &OperatorMatrix) -> Result<Self> {
        if op.ncols() != self.coeffs.len() || op.nrows() != self.coeffs.len() {
            return Err(JcError::DimensionMismatch(format!(
                "{}x{} operator on a state of length {}",
                op.nrows(),
                op.ncols(),
                self.coeffs.len()
            )));
        }
        Ok(Self {
            trunc: self.trunc,
            coeffs: op * &self.coeffs,
        })
    }
}

pub fn embed_spinor(level: Level, n: usize, trunc: &FockTruncation) -> Result<SpinorFockState> {
    let mut s = SpinorFockState::zeros(trunc);
    s.set(level, n, 1.0)?;
    Ok(s)
}

fn check_psi_envelope(n: usize, x: f64) -> Result<()> {
    if !x.is_finite() || x.abs() > PSI_X_ENVELOPE || n > PSI_N_ENVELOPE {
        return Err(JcError::OutOfEnvelope { n, x });
    }
    Ok(())
}

/// `ψ₀(x), …, ψ_{n_top}(x)` by the normalized recurrence
/// `ψₙ₊₁ = √(2/(n+1)) x ψₙ − √(n/(n+1)) ψₙ₋₁`.
pub fn hermite_functions(n_top: usize, x: f64) -> Result<Vec<f64>> {
    check_psi_envelope(n_top, x)?;
    let mut out = Vec::with_capacity(n_top + 1);
    out.push(PI.powf(-0.25) * (-0.5 * x * x).exp());
    if n_top >= 1 {
        out.push(std::f64::consts::SQRT_2 * x * out[0]);
    }
    for n in 1..n_top {
        let nf = n as f64;
        let next = (2.0 / (nf + 1.0)).sqrt() * x * out[n] - (nf / (nf + 1.0)).sqrt() * out[n - 1];
        out.push(next);
    }
    Ok(out)
}

pub fn psi_phys(n: usize, x: f64) -> Result<f64> {
    Ok(hermite_functions(n, x)?[n])
}

/// `χ₀(x), …, χ_{n_top}(x)` with `χₙ = φ₋₁₋ₙ`, via the all-plus recurrence
/// `χₙ₊₁ = √(2/(n+1)) x χₙ + √(n/(n+1)) χₙ₋₁`.
pub fn nonphysical_functions(n_top: usize, x: f64) -> Result<Vec<f64>> {
    let m = n_top + 1;
    if !x.is_finite() || x.abs() > PHI_X_ENVELOPE {
        return Err(JcError::Overflow { m, x });
    }
    let mut out = Vec::with_capacity(n_top + 1);
    out.push(PI.powf(-0.25) * (0.5 * x * x).exp());
    if n_top >= 1 {
        out.push(std::f64::consts::SQRT_2 * x * out[0]);
    }
    for n in 1..n_top {
        let nf = n as f64;
        let next = (2.0 / (nf + 1.0)).sqrt() * x * out[n] + (nf / (nf + 1.0)).sqrt() * out[n - 1];
        out.push(next);
    }
    if out.iter().any(|v| !v.is_finite()) {
        return Err(JcError::Overflow { m, x });
    }
    Ok(out)
}

/// `φ₋ₘ(x)` for `m >= 1` in the real convention.
pub fn phi_nonphys(m: usize, x: f64) -> Result<f64> {
    if m == 0 {
        return Err(JcError::InvalidArgument(
            "nonphysical oscillator functions are indexed by m >= 1".into(),
        ));
    }
    Ok(nonphysical_functions(m - 1, x)?[m - 1])
}

/// Uniform 1-D grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridAxis {
    x_min: f64,
    x_max: f64,
    points: usize,
}

impl Default for GridAxis {
    fn default() -> Self {
        Self {
            x_min: -6.0,
            x_max: 6.0,
            points: 2001,
        }
    }
}

impl GridAxis {
    pub fn new(x_min: f64, x_max: f64, points: usize) -> Result<Self> {
        if !(x_min.is_finite() && x_max.is_finite()) || x_min >= x_max {
            return Err(JcError::InvalidGrid(format!(
                "need finite x_min < x_max, got [{x_min}, {x_max}]"
            )));
        }
        if points < 3 {
            return Err(JcError::InvalidGrid(format!("need at least 3 points, got {points}")));
        }
        Ok(Self { x_min, x_max, points })
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn spacing(&self) -> f64 {
        (self.x_max - self.x_min) / (self.points - 1) as f64
    }

    pub fn x(&self, i: usize) -> f64 {
        self.x_min + i as f64 * self.spacing()
    }

    pub fn xs(&self) -> Vec<f64> {
        (0..self.points).map(|i| self.x(i)).collect()
    }

    /// Same interval, spacing halved.
    pub fn refined(&self) -> Self {
        Self {
            points: 2 * self.points - 1,
            ..*self
        }
    }

    /// Interior indices (endpoints excluded) with `|x| <= half_width`.
    pub fn window(&self, half_width: f64) -> std::ops::Range<usize> {
        let h = self.spacing();
        let tol = 1e-9 * h;
        let lo = (1..self.points - 1)
            .find(|&i| self.x(i) >= -half_width - tol)
            .unwrap_or(self.points - 1);
        let hi = (1..self.points - 1)
            .rev()
            .find(|&i| self.x(i) <= half_width + tol)
            .map(|i| i + 1)
            .unwrap_or(lo);
        lo..hi.max(lo)
    }

    pub fn interior(&self) -> std::ops::Range<usize> {
        1..self.points - 1
    }
}
