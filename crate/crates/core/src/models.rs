//! Jaynes–Cummings family Hamiltonians on the truncated spinor space.
//!
//! Everything is in ħω units with the constant `-ħω/2·σ₀` dropped:
//!
//! ```text
//! H_JC(δ, λ)  = [[a⁻a⁺ + δ, λa⁻], [λa⁺, a⁺a⁻ − δ]]
//! H_aJC(δ, λ) = [[a⁺a⁻ + δ, −λa⁺], [−λa⁻, a⁻a⁺ − δ]]
//! ```
//!
//! `a⁻a⁺` is always built as the exact `N + 1`, so `H_JC` is block diagonal in
//! the truncated basis. The only trace of the cut is the isolated state
//! `upper ⊗ |n_max⟩` at energy `n_max + 1 + δ`, see [`jc_truncation_remnant`].

use std::str::FromStr;

use nalgebra::DMatrix;

use crate::error::{JcError, Result};
use crate::fock::{assemble_blocks, make_ladder_ops, number_diag, FockTruncation, OperatorMatrix};

/// Physical frequencies. `ħ` cancels in the reduction and is carried only for
/// the intermediate `α = ħ(ω₀ − ω)` and `β = ħμ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RawParams {
    pub omega0: f64,
    pub omega: f64,
    pub mu: f64,
    pub hbar: f64,
}

impl RawParams {
    pub fn new(omega0: f64, omega: f64, mu: f64) -> Self {
        Self {
            omega0,
            omega,
            mu,
            hbar: 1.0,
        }
    }

    pub fn alpha(&self) -> f64 {
        self.hbar * (self.omega0 - self.omega)
    }

    pub fn beta(&self) -> f64 {
        self.hbar * self.mu
    }
}

/// Dimensionless detuning and coupling.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JCParams {
    pub delta: f64,
    pub lambda: f64,
}

impl JCParams {
    pub fn new(delta: f64, lambda: f64) -> Self {
        Self { delta, lambda }
    }

    pub fn require_coupling(&self) -> Result<()> {
        if self.lambda == 0.0 || !self.lambda.is_finite() {
            return Err(JcError::ZeroCoupling);
        }
        Ok(())
    }
}

pub fn reduce_params(raw: &RawParams) -> Result<JCParams> {
    if raw.omega.is_nan() || raw.omega <= 0.0 {
        return Err(JcError::NonPositiveFrequency(raw.omega));
    }
    let hw = raw.hbar * raw.omega;
    Ok(JCParams {
        delta: raw.alpha() / (2.0 * hw),
        lambda: raw.beta() / hw,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelKind {
    Jc,
    AntiJc,
    ResonantJc(usize),
    DiracHo(usize),
}

pub fn build_jc(params: &JCParams, trunc: &FockTruncation) -> OperatorMatrix {
    let ops = make_ladder_ops(trunc);
    let l = params.lambda;
    assemble_blocks(
        &number_diag(trunc, 1.0 + params.delta),
        &(&ops.a_minus * l),
        &(&ops.a_plus * l),
        &number_diag(trunc, -params.delta),
    )
}

pub fn build_ajc(params: &JCParams, trunc: &FockTruncation) -> OperatorMatrix {
    let ops = make_ladder_ops(trunc);
    let l = params.lambda;
    assemble_blocks(
        &number_diag(trunc, params.delta),
        &(&ops.a_plus * -l),
        &(&ops.a_minus * -l),
        &number_diag(trunc, 1.0 - params.delta),
    )
}

/// Energy of the isolated truncation state `upper ⊗ |n_max⟩` of `H_JC`.
pub fn jc_truncation_remnant(params: &JCParams, trunc: &FockTruncation) -> f64 {
    trunc.n_max() as f64 + 1.0 + params.delta
}

/// 2×2 unitaries on the atomic factor.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AtomicUnitary {
    SigmaZ,
    SigmaY,
}

impl FromStr for AtomicUnitary {
    type Err = JcError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "sigma_z" | "sz" | "z" | "t" => Ok(AtomicUnitary::SigmaZ),
            "sigma_y" | "sy" | "y" | "s" => Ok(AtomicUnitary::SigmaY),
            _ => Err(JcError::UnsupportedUnitary(s.to_string())),
        }
    }
}

/// `R H R⁻¹` with `R ⊗ 1_Fock`.
///
/// For `H = [[A, B], [C, D]]`: σ_z gives `[[A, −B], [−C, D]]` and σ_y gives
/// `[[D, −C], [−B, A]]`. Both results are real.
pub fn equivalence_transform(h: &OperatorMatrix, r: AtomicUnitary) -> Result<OperatorMatrix> {
    let trunc = FockTruncation::from_dim(h.nrows())?;
    if h.ncols() != h.nrows() {
        return Err(JcError::DimensionMismatch("operator must be square".into()));
    }
    let d = trunc.fock_dim();
    let a = h.view((0, 0), (d, d)).into_owned();
    let b = h.view((0, d), (d, d)).into_owned();
    let c = h.view((d, 0), (d, d)).into_owned();
    let dd = h.view((d, d), (d, d)).into_owned();
    Ok(match r {
        AtomicUnitary::SigmaZ => assemble_blocks(&a, &-b, &-c, &dd),
        AtomicUnitary::SigmaY => assemble_blocks(&dd, &-c, &-b, &a),
    })
}

/// `H_JC^k = H_JC(λ√k, λ) + k`.
pub fn build_resonant(k: usize, lambda: f64, trunc: &FockTruncation) -> OperatorMatrix {
    let params = JCParams::new(lambda * (k as f64).sqrt(), lambda);
    build_jc(&params, trunc) + DMatrix::identity(trunc.dim(), trunc.dim()) * k as f64
}

/// First-order `H_HO^k = [[√k, a⁻], [a⁺, −√k]]`.
pub fn build_dirac_ho(k: usize, trunc: &FockTruncation) -> OperatorMatrix {
    let ops = make_ladder_ops(trunc);
    let sk = (k as f64).sqrt();
    let d = trunc.fock_dim();
    let id = DMatrix::<f64>::identity(d, d);
    assemble_blocks(&(&id * sk), &ops.a_minus, &ops.a_plus, &(&id * -sk))
}

/// `N_e = diag(a⁻a⁺, a⁺a⁻)`, upper entries `n + 1`, lower entries `n`.
pub fn excitation_number(trunc: &FockTruncation) -> OperatorMatrix {
    let zero = DMatrix::zeros(trunc.fock_dim(), trunc.fock_dim());
    assemble_blocks(&number_diag(trunc, 1.0), &zero, &zero, &number_diag(trunc, 0.0))
}

pub fn build_model(kind: ModelKind, params: &JCParams, trunc: &FockTruncation) -> OperatorMatrix {
    match kind {
        ModelKind::Jc => build_jc(params, trunc),
        ModelKind::AntiJc => build_ajc(params, trunc),
        ModelKind::ResonantJc(k) => build_resonant(k, params.lambda, trunc),
        ModelKind::DiracHo(k) => build_dirac_ho(k, trunc),
    }
}

/// Which member of the 2-block family a Hamiltonian is written in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Form {
    Jc,
    AntiJc,
}

/// `H(params) + shift·1` in JC or anti-JC form. Every intertwiner source and
/// target, and every hierarchy node, is one of these.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShiftedHamiltonian {
    pub params: JCParams,
    pub shift: f64,
    pub form: Form,
}

impl ShiftedHamiltonian {
    pub fn jc(params: JCParams, shift: f64) -> Self {
        Self {
            params,
            shift,
            form: Form::Jc,
        }
    }

    pub fn anti_jc(params: JCParams, shift: f64) -> Self {
        Self {
            params,
            shift,
            form: Form::AntiJc,
        }
    }

    pub fn build(&self, trunc: &FockTruncation) -> OperatorMatrix {
        let h = match self.form {
            Form::Jc => build_jc(&self.params, trunc),
            Form::AntiJc => build_ajc(&self.params, trunc),
        };
        h + DMatrix::identity(trunc.dim(), trunc.dim()) * self.shift
    }

    /// Detuning of the JC Hamiltonian with the same spectrum (`H_aJC(δ) ≅ H_JC(−δ)`).
    pub fn jc_equivalent_delta(&self) -> f64 {
        match self.form {
            Form::Jc => self.params.delta,
            Form::AntiJc => -self.params.delta,
        }
    }

    pub fn offset(self, c: f64) -> Self {
        Self {
            shift: self.shift + c,
            ..self
        }
    }
}
