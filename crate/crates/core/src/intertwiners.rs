//! First-order intertwiners between JC-type Hamiltonians.
//!
//! Every operator here is a 2×2 matrix of photon ladder operators plus one
//! constant off-diagonal entry:
//!
//! | kind | matrix | target |
//! |------|--------|--------|
//! | L0 | `diag(−a⁺, a⁻)` | `H_aJC(δ, λ)` |
//! | L1 | `[[a⁺, K₁], [0, a⁺]]` | `H_JC(√(δ²−λ²)) − 1` |
//! | L2 | `[[a⁺, −K₂⁺], [0, a⁺]]` | `H_JC(−√(δ²−λ²)) − 1` |
//! | L3 | `[[a⁻, 0], [K₃, a⁻]]` | `H_JC(√(δ²+λ²)) + 1` |
//! | L4 | `[[a⁻, 0], [K₄, a⁻]]` | `H_JC(−√(δ²+λ²)) + 1` |
//! | Lk | `[[−a⁺, √k−√(k−1)], [0, −a⁺]]` | `H_JC^(k−1)` from `H_JC^k` |

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;

use crate::error::{JcError, Result};
use crate::fock::{assemble_blocks, make_ladder_ops, FockTruncation, OperatorMatrix};
use crate::linalg::{commutator, guarded_norm};
use crate::models::{excitation_number, Form, JCParams, ShiftedHamiltonian};
use crate::spectra::{
    canonical_pair, nonphysical_root, physical_block_energies, BlockLayout, Branch, BranchLabel, EigenPair, Physicality,
};

/// Relative threshold below which an image counts as annihilated.
pub const ANNIHILATION_REL: f64 = 1e-12;
pub const DEFAULT_GUARD: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum IntertwinerKind {
    L0,
    L1,
    L2,
    L3,
    L4,
    Resonant(usize),
}

impl IntertwinerKind {
    pub const FIXED: [IntertwinerKind; 5] = [
        IntertwinerKind::L0,
        IntertwinerKind::L1,
        IntertwinerKind::L2,
        IntertwinerKind::L3,
        IntertwinerKind::L4,
    ];

    /// Photon-block index change `n → n + shift`.
    pub fn block_shift(self) -> i32 {
        match self {
            IntertwinerKind::L0 => 0,
            IntertwinerKind::L1 | IntertwinerKind::L2 | IntertwinerKind::Resonant(_) => 1,
            IntertwinerKind::L3 | IntertwinerKind::L4 => -1,
        }
    }
}

impl fmt::Display for IntertwinerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IntertwinerKind::L0 => write!(f, "L0"),
            IntertwinerKind::L1 => write!(f, "L1"),
            IntertwinerKind::L2 => write!(f, "L2"),
            IntertwinerKind::L3 => write!(f, "L3"),
            IntertwinerKind::L4 => write!(f, "L4"),
            IntertwinerKind::Resonant(k) => write!(f, "Lk{k}"),
        }
    }
}

impl FromStr for IntertwinerKind {
    type Err = JcError;

    /// Accepts `L0`..`L4` (also `L0_antiJC`) and `Lk9`, `Lk=9`, `Lk:9`.
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim().to_ascii_lowercase();
        let kind = match t.as_str() {
            "l0" | "l0_antijc" => IntertwinerKind::L0,
            "l1" => IntertwinerKind::L1,
            "l2" => IntertwinerKind::L2,
            "l3" => IntertwinerKind::L3,
            "l4" => IntertwinerKind::L4,
            _ => {
                let k = t
                    .strip_prefix("lk")
                    .map(|r| r.trim_start_matches(['=', ':', '(']).trim_end_matches(')'))
                    .and_then(|r| r.parse::<usize>().ok())
                    .ok_or_else(|| JcError::InvalidArgument(format!("unknown intertwiner '{s}'")))?;
                IntertwinerKind::Resonant(k)
            }
        };
        Ok(kind)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KConstants {
    pub k1: f64,
    pub k2_plus: f64,
    pub k3: f64,
    pub k4: f64,
}

fn detuned_root(params: &JCParams) -> Result<f64> {
    params.require_coupling()?;
    nonphysical_root(params, 1).ok_or(JcError::RealityCondition {
        delta_sq: params.delta * params.delta,
        required: params.lambda * params.lambda,
    })
}

// The closed forms lose digits when δ and the root nearly cancel, so each
// constant switches to its conjugate form on the cancelling side.
fn k1_from(d: f64, l: f64, r: f64) -> f64 {
    if d >= 0.0 {
        -l / (d + r)
    } else {
        (r - d) / l
    }
}

fn k2_plus_from(d: f64, l: f64, r: f64) -> f64 {
    if d >= 0.0 {
        (d + r) / l
    } else {
        -l / (r - d)
    }
}

fn k3_from(d: f64, l: f64, s: f64) -> f64 {
    if d >= 0.0 {
        -l / (d + s)
    } else {
        (d - s) / l
    }
}

fn k4_from(d: f64, l: f64, s: f64) -> f64 {
    if d >= 0.0 {
        (d + s) / l
    } else {
        l / (s - d)
    }
}

/// `(K₁, K₂⁺, K₃, K₄)`; needs `λ ≠ 0` and `δ² >= λ²`.
pub fn k_constants(params: &JCParams) -> Result<KConstants> {
    let r = detuned_root(params)?;
    let (d, l) = (params.delta, params.lambda);
    let s = d.hypot(l);
    Ok(KConstants {
        k1: k1_from(d, l, r),
        k2_plus: k2_plus_from(d, l, r),
        k3: k3_from(d, l, s),
        k4: k4_from(d, l, s),
    })
}

/// `√k − √(k−1)` without cancellation.
pub fn resonant_constant(k: usize) -> Result<f64> {
    if k < 1 {
        return Err(JcError::InvalidArgument("Lk needs k >= 1".into()));
    }
    let kf = k as f64;
    Ok(1.0 / (kf.sqrt() + (kf - 1.0).sqrt()))
}

/// The constant entry of the operator matrix (`0` for L0).
pub fn k_constant(kind: IntertwinerKind, params: &JCParams) -> Result<f64> {
    let (d, l) = (params.delta, params.lambda);
    match kind {
        IntertwinerKind::L0 => Ok(0.0),
        IntertwinerKind::L1 => Ok(k1_from(d, l, detuned_root(params)?)),
        IntertwinerKind::L2 => Ok(-k2_plus_from(d, l, detuned_root(params)?)),
        IntertwinerKind::L3 => {
            params.require_coupling()?;
            Ok(k3_from(d, l, d.hypot(l)))
        }
        IntertwinerKind::L4 => {
            params.require_coupling()?;
            Ok(k4_from(d, l, d.hypot(l)))
        }
        IntertwinerKind::Resonant(k) => resonant_constant(k),
    }
}

/// One diagonal ladder entry, `c·a⁺` or `c·a⁻`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LadderTerm {
    Raise(f64),
    Lower(f64),
}

impl LadderTerm {
    /// Coefficient of `∂` in the coordinate form (`a∓ = (x ± ∂)/√2`).
    fn derivative_coeff(self) -> f64 {
        match self {
            LadderTerm::Raise(c) => -c,
            LadderTerm::Lower(c) => c,
        }
    }

    fn x_coeff(self) -> f64 {
        match self {
            LadderTerm::Raise(c) | LadderTerm::Lower(c) => c,
        }
    }
}

/// Symbolic operator `[[d₀, ul], [lu, d₁]]` with ladder diagonal and constant
/// off-diagonal; the coordinate realization is `(σ/√2)(∂ − W)` with
/// `W = −√2·P/σ`, `P` the non-derivative part.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LadderForm {
    pub diag: [LadderTerm; 2],
    pub upper_lower: f64,
    pub lower_upper: f64,
}

impl LadderForm {
    /// `σ = ±1` such that the derivative part is `(σ/√2)∂·1`.
    pub fn sign(&self) -> Result<f64> {
        let s0 = self.diag[0].derivative_coeff();
        let s1 = self.diag[1].derivative_coeff();
        if (s0 - s1).abs() > 1e-14 || (s0.abs() - 1.0).abs() > 1e-14 {
            return Err(JcError::InvalidArgument(
                "ladder form is not a first-order operator with unit derivative".into(),
            ));
        }
        Ok(s0)
    }

    /// `W(x)` as `[[w11, w12], [w21, w22]]`.
    pub fn predicted_w(&self, x: f64) -> Result<[[f64; 2]; 2]> {
        let sigma = self.sign()?;
        let f = -std::f64::consts::SQRT_2 / sigma;
        Ok([
            [-self.diag[0].x_coeff() * x / sigma, f * self.upper_lower],
            [f * self.lower_upper, -self.diag[1].x_coeff() * x / sigma],
        ])
    }

    /// Applies the operator pointwise given a spinor value and its derivative.
    pub fn apply_point(&self, x: f64, value: [f64; 2], slope: [f64; 2]) -> [f64; 2] {
        let half = std::f64::consts::FRAC_1_SQRT_2;
        let term = |t: LadderTerm, v: f64, dv: f64| match t {
            LadderTerm::Raise(c) => c * half * (x * v - dv),
            LadderTerm::Lower(c) => c * half * (x * v + dv),
        };
        [
            term(self.diag[0], value[0], slope[0]) + self.upper_lower * value[1],
            term(self.diag[1], value[1], slope[1]) + self.lower_upper * value[0],
        ]
    }

    pub fn matrix(&self, trunc: &FockTruncation) -> OperatorMatrix {
        let ops = make_ladder_ops(trunc);
        let d = trunc.fock_dim();
        let id = DMatrix::<f64>::identity(d, d);
        let block = |t: LadderTerm| match t {
            LadderTerm::Raise(c) => &ops.a_plus * c,
            LadderTerm::Lower(c) => &ops.a_minus * c,
        };
        assemble_blocks(
            &block(self.diag[0]),
            &(&id * self.upper_lower),
            &(&id * self.lower_upper),
            &block(self.diag[1]),
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Intertwiner {
    pub kind: IntertwinerKind,
    /// `K` entry of the matrix (`0` for L0).
    pub constant: f64,
    pub matrix: OperatorMatrix,
    pub source: ShiftedHamiltonian,
    pub target: ShiftedHamiltonian,
    pub block_shift: i32,
    pub trunc: FockTruncation,
}

impl Intertwiner {
    /// Adds `c` to both source and target; the matrix is unchanged.
    pub fn with_offset(mut self, c: f64) -> Self {
        self.source = self.source.offset(c);
        self.target = self.target.offset(c);
        self
    }

    pub fn ladder_form(&self) -> LadderForm {
        ladder_form(self.kind, self.constant)
    }

    pub fn source_matrix(&self) -> OperatorMatrix {
        self.source.build(&self.trunc)
    }

    pub fn target_matrix(&self) -> OperatorMatrix {
        self.target.build(&self.trunc)
    }

    /// Guarded `‖(L·H_src − H_tgt·L)P‖` against its own source and target.
    pub fn residual(&self) -> Result<f64> {
        intertwine_residual(self, &self.source_matrix(), &self.target_matrix(), DEFAULT_GUARD)
    }

    pub fn adjoint_residual(&self) -> Result<f64> {
        adjoint_residual(self, &self.source_matrix(), &self.target_matrix(), DEFAULT_GUARD)
    }
}

fn ladder_form(kind: IntertwinerKind, k: f64) -> LadderForm {
    use LadderTerm::{Lower, Raise};
    match kind {
        IntertwinerKind::L0 => LadderForm {
            diag: [Raise(-1.0), Lower(1.0)],
            upper_lower: 0.0,
            lower_upper: 0.0,
        },
        IntertwinerKind::L1 | IntertwinerKind::L2 => LadderForm {
            diag: [Raise(1.0), Raise(1.0)],
            upper_lower: k,
            lower_upper: 0.0,
        },
        IntertwinerKind::L3 | IntertwinerKind::L4 => LadderForm {
            diag: [Lower(1.0), Lower(1.0)],
            upper_lower: 0.0,
            lower_upper: k,
        },
        IntertwinerKind::Resonant(_) => LadderForm {
            diag: [Raise(-1.0), Raise(-1.0)],
            upper_lower: k,
            lower_upper: 0.0,
        },
    }
}

pub fn build_intertwiner(kind: IntertwinerKind, params: &JCParams, trunc: &FockTruncation) -> Result<Intertwiner> {
    let constant = k_constant(kind, params)?;
    let (d, l) = (params.delta, params.lambda);
    let (source, target) = match kind {
        IntertwinerKind::L0 => (
            ShiftedHamiltonian::jc(*params, 0.0),
            ShiftedHamiltonian::anti_jc(*params, 0.0),
        ),
        IntertwinerKind::L1 | IntertwinerKind::L2 => {
            let r = detuned_root(params)?;
            let dt = if kind == IntertwinerKind::L1 { r } else { -r };
            (
                ShiftedHamiltonian::jc(*params, 0.0),
                ShiftedHamiltonian::jc(JCParams::new(dt, l), -1.0),
            )
        }
        IntertwinerKind::L3 | IntertwinerKind::L4 => {
            let s = d.hypot(l);
            let dt = if kind == IntertwinerKind::L3 { s } else { -s };
            (
                ShiftedHamiltonian::jc(*params, 0.0),
                ShiftedHamiltonian::jc(JCParams::new(dt, l), 1.0),
            )
        }
        IntertwinerKind::Resonant(k) => {
            params.require_coupling()?;
            let kf = k as f64;
            (
                ShiftedHamiltonian::jc(JCParams::new(l * kf.sqrt(), l), kf),
                ShiftedHamiltonian::jc(JCParams::new(l * (kf - 1.0).sqrt(), l), kf - 1.0),
            )
        }
    };
    Ok(Intertwiner {
        kind,
        constant,
        matrix: ladder_form(kind, constant).matrix(trunc),
        source,
        target,
        block_shift: kind.block_shift(),
        trunc: *trunc,
    })
}

/// Raising step that keeps the sign of δ: L1 for `δ >= 0`, L2 otherwise.
pub fn raising_kind(params: &JCParams) -> IntertwinerKind {
    if params.delta >= 0.0 {
        IntertwinerKind::L1
    } else {
        IntertwinerKind::L2
    }
}

/// Lowering step that keeps the sign of δ: L3 for `δ >= 0`, L4 otherwise.
pub fn lowering_kind(params: &JCParams) -> IntertwinerKind {
    if params.delta >= 0.0 {
        IntertwinerKind::L3
    } else {
        IntertwinerKind::L4
    }
}

fn check_dims(l: &Intertwiner, a: &OperatorMatrix, b: &OperatorMatrix, guard: usize) -> Result<()> {
    let dim = l.trunc.dim();
    for m in [&l.matrix, a, b] {
        if m.nrows() != dim || m.ncols() != dim {
            return Err(JcError::DimensionMismatch(format!(
                "expected {dim}×{dim}, got {}×{}",
                m.nrows(),
                m.ncols()
            )));
        }
    }
    if guard < DEFAULT_GUARD {
        return Err(JcError::InvalidArgument(format!(
            "guard must be at least {DEFAULT_GUARD}, got {guard}"
        )));
    }
    Ok(())
}

/// `‖(L·H_src − H_tgt·L)·P‖₂`, `P` projecting onto photon numbers `<= n_max − guard`.
pub fn intertwine_residual(
    l: &Intertwiner,
    h_src: &OperatorMatrix,
    h_tgt: &OperatorMatrix,
    guard: usize,
) -> Result<f64> {
    check_dims(l, h_src, h_tgt, guard)?;
    let x = &l.matrix * h_src - h_tgt * &l.matrix;
    Ok(guarded_norm(&x, &l.trunc, guard))
}

/// `‖(Lᵀ·H_tgt − H_src·Lᵀ)·P‖₂`: the adjoint runs the other way.
pub fn adjoint_residual(l: &Intertwiner, h_src: &OperatorMatrix, h_tgt: &OperatorMatrix, guard: usize) -> Result<f64> {
    check_dims(l, h_src, h_tgt, guard)?;
    let lt = l.matrix.transpose();
    let x = &lt * h_tgt - h_src * &lt;
    Ok(guarded_norm(&x, &l.trunc, guard))
}

#[derive(Debug, Clone, PartialEq)]
pub enum StateImage {
    Mapped(EigenPair),
    Annihilated { residual: f64 },
}

impl StateImage {
    pub fn is_annihilated(&self) -> bool {
        matches!(self, StateImage::Annihilated { .. })
    }
}

fn target_layout(target: &ShiftedHamiltonian) -> BlockLayout {
    match target.form {
        Form::Jc => BlockLayout::Jc,
        Form::AntiJc => BlockLayout::AntiJc,
    }
}

/// Applies `L` to a physical eigenpair of its source. The image is relabelled
/// in the target block `n + block_shift`, on the branch whose target energy is
/// nearest; intertwining keeps the energy itself unchanged.
pub fn map_state(l: &Intertwiner, e: &EigenPair) -> Result<StateImage> {
    if e.label.physicality != Physicality::Physical {
        return Err(JcError::InvalidArgument(
            "only physical eigenpairs can be mapped in the Fock basis".into(),
        ));
    }
    let v = match &e.state {
        Some(s) => s.clone(),
        None => e.fock_state(&l.trunc)?,
    };
    let img = v.apply(&l.matrix)?;
    let norm = img.norm();
    if norm <= ANNIHILATION_REL * v.norm() {
        return Ok(StateImage::Annihilated { residual: norm });
    }
    let n_new = e.label.n as i64 + l.block_shift as i64;
    if n_new < 0 {
        return Err(JcError::InvalidArgument(format!(
            "image of block {} has no target block",
            e.label.n
        )));
    }
    let n_new = n_new as usize;
    let layout = target_layout(&l.target);
    let branch = if n_new == 0 {
        Branch::Single
    } else {
        let tp = l.target.params;
        let (lo, hi) = physical_block_energies(&tp, n_new);
        let (lo, hi) = (lo + l.target.shift, hi + l.target.shift);
        if (e.energy - lo).abs() <= (e.energy - hi).abs() {
            Branch::Minus
        } else {
            Branch::Plus
        }
    };
    let (first, second) = layout.slots(n_new);
    let pick = |slot: crate::spectra::Slot| -> Result<f64> {
        match slot {
            Some((lv, n)) => img.get(lv, n),
            None => Ok(0.0),
        }
    };
    let coeffs = canonical_pair(pick(first)?, pick(second)?);
    let sign = {
        let raw = (pick(first)?, pick(second)?);
        let lead = if raw.0 != 0.0 { raw.0 } else { raw.1 };
        if lead < 0.0 {
            -1.0
        } else {
            1.0
        }
    };
    let state = crate::fock::SpinorFockState::from_vector(&l.trunc, img.as_vector() * (sign / norm))?;
    Ok(StateImage::Mapped(EigenPair {
        label: BranchLabel::physical(n_new, branch),
        energy: e.energy,
        coeffs,
        layout,
        state: Some(state),
    }))
}

/// `‖L·Ψ‖` for the physical seeds of L0, L3 and L4.
pub fn seed_annihilation_check(
    kind: IntertwinerKind,
    params: &JCParams,
    trunc: &FockTruncation,
) -> Result<Vec<(BranchLabel, f64)>> {
    let seeds: Vec<BranchLabel> = match kind {
        IntertwinerKind::L0 => vec![BranchLabel::physical(0, Branch::Single)],
        IntertwinerKind::L3 => vec![
            BranchLabel::physical(0, Branch::Single),
            BranchLabel::physical(1, Branch::Plus),
        ],
        IntertwinerKind::L4 => vec![
            BranchLabel::physical(0, Branch::Single),
            BranchLabel::physical(1, Branch::Minus),
        ],
        other => return Err(JcError::DeferredToGrid(other.to_string())),
    };
    let l = build_intertwiner(kind, params, trunc)?;
    seeds
        .into_iter()
        .map(|label| {
            let e = crate::spectra::physical_eigenpair(params, label.n, label.branch);
            let v = e.fock_state(trunc)?;
            Ok((label, v.apply(&l.matrix)?.norm()))
        })
        .collect()
}

/// `S = Lᵀ·L` with `S = a·N_e + b·H + c` on the guarded interior.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetryOp {
    pub matrix: OperatorMatrix,
    pub ne_coeff: f64,
    pub h_coeff: f64,
    pub constant: f64,
    /// The Hamiltonian `S` commutes with (the source of `L`).
    pub hamiltonian: OperatorMatrix,
    trunc: FockTruncation,
}

impl SymmetryOp {
    pub fn decomposition_residual(&self) -> f64 {
        let dim = self.trunc.dim();
        let rebuilt = excitation_number(&self.trunc) * self.ne_coeff
            + &self.hamiltonian * self.h_coeff
            + DMatrix::<f64>::identity(dim, dim) * self.constant;
        guarded_norm(&(&self.matrix - rebuilt), &self.trunc, DEFAULT_GUARD)
    }

    pub fn commutator_residual(&self) -> f64 {
        guarded_norm(&commutator(&self.matrix, &self.hamiltonian), &self.trunc, DEFAULT_GUARD)
    }
}

/// `S = N_e + (K/λ)(H − shift − N_e ∓ δ)`: `−δ` for raising kinds, `+δ` for
/// lowering kinds; `S = N_e` for L0.
pub fn symmetry_from(l: &Intertwiner) -> SymmetryOp {
    let src = l.source;
    let (ne, h, c) = match l.kind {
        IntertwinerKind::L0 => (1.0, 0.0, 0.0),
        kind => {
            // Lk = −L1 at δ = λ√k, so its stored entry is −K₁
            let k = match kind {
                IntertwinerKind::Resonant(_) => -l.constant,
                _ => l.constant,
            };
            let sd = match kind {
                IntertwinerKind::L3 | IntertwinerKind::L4 => 1.0,
                _ => -1.0,
            };
            let b = k / src.params.lambda;
            (1.0 - b, b, b * (sd * src.params.delta - src.shift))
        }
    };
    SymmetryOp {
        matrix: l.matrix.transpose() * &l.matrix,
        ne_coeff: ne,
        h_coeff: h,
        constant: c,
        hamiltonian: l.source_matrix(),
        trunc: l.trunc,
    }
}
