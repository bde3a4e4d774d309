//! Closed-form JC eigen-systems and their reconciliation with truncated matrices.
//!
//! Physical block `n >= 1` lives on `(upper ⊗ |n−1⟩, lower ⊗ |n⟩)`:
//! `εₙ± = n ± √(δ² + nλ²)`, `Ψₙ± ∝ (δ ± √(δ²+nλ²), √n λ)`, plus the ground
//! `Ψ₀⁻ = lower ⊗ |0⟩` at `−δ`.
//!
//! Nonphysical block `m >= 1` lives on `(φ₋ₘ₋₁, φ₋ₘ)`. In the real convention of
//! [`crate::fock`] the JC action on that pair is the 2×2 real matrix
//! `[[δ − m, λ√m], [−λ√m, −m − δ]]`, eigenvalues `−m ± √(δ² − mλ²)`, real only
//! while `δ² >= mλ²`. The extra `Φ₀⁺ = (φ₋₁, 0)` sits at `+δ`.

use std::cmp::Ordering;

use nalgebra::SymmetricEigen;

use crate::error::{JcError, Result};
use crate::fock::{FockTruncation, Level, OperatorMatrix, SpinorFockState};
use crate::linalg::max_asymmetry;
use crate::models::{jc_truncation_remnant, JCParams};

/// `|δ² − mλ²| <= DEGENERACY_REL · max(δ², 1)` counts as a double root.
pub const DEGENERACY_REL: f64 = 1e-12;
pub const HERMITIAN_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Branch {
    Minus,
    Plus,
    /// Ground-type level with a single state (`Ψ₀⁻`, `Φ₀⁺`, partner grounds).
    Single,
    /// Merged `±` pair of a nonphysical block at the reality boundary.
    Double,
}

impl Branch {
    pub fn symbol(self) -> &'static str {
        match self {
            Branch::Minus => "-",
            Branch::Plus => "+",
            Branch::Single => "single",
            Branch::Double => "double",
        }
    }

    fn sign(self) -> f64 {
        match self {
            Branch::Minus => -1.0,
            _ => 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Physicality {
    Physical,
    Nonphysical,
}

impl Physicality {
    pub fn name(self) -> &'static str {
        match self {
            Physicality::Physical => "physical",
            Physicality::Nonphysical => "nonphysical",
        }
    }
}

/// `n` is the block index; nonphysical blocks stand for `−n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BranchLabel {
    pub n: usize,
    pub branch: Branch,
    pub physicality: Physicality,
}

impl BranchLabel {
    pub fn physical(n: usize, branch: Branch) -> Self {
        Self {
            n,
            branch: if n == 0 { Branch::Single } else { branch },
            physicality: Physicality::Physical,
        }
    }

    pub fn nonphysical(n: usize, branch: Branch) -> Self {
        Self {
            n,
            branch: if n == 0 { Branch::Single } else { branch },
            physicality: Physicality::Nonphysical,
        }
    }

    /// Signed block index as printed in tables: `n` or `−n`.
    pub fn signed_n(&self) -> i64 {
        match self.physicality {
            Physicality::Physical => self.n as i64,
            Physicality::Nonphysical => -(self.n as i64),
        }
    }
}

pub type Slot = Option<(Level, usize)>;

/// Which basis pair a physical block occupies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BlockLayout {
    /// `(upper|n−1⟩, lower|n⟩)`, ground `lower|0⟩`.
    Jc,
    /// `(upper|n⟩, lower|n−1⟩)`, ground `upper|0⟩`.
    AntiJc,
}

impl BlockLayout {
    /// Basis positions `(first, second)` of block `n`; block 0 has one slot.
    pub fn slots(self, n: usize) -> (Slot, Slot) {
        match (self, n) {
            (BlockLayout::Jc, 0) => (None, Some((Level::Lower, 0))),
            (BlockLayout::AntiJc, 0) => (Some((Level::Upper, 0)), None),
            (BlockLayout::Jc, n) => (Some((Level::Upper, n - 1)), Some((Level::Lower, n))),
            (BlockLayout::AntiJc, n) => (Some((Level::Upper, n)), Some((Level::Lower, n - 1))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EigenPair {
    pub label: BranchLabel,
    pub energy: f64,
    /// Unit-norm coefficients on the block pair, first nonzero entry positive.
    pub coeffs: (f64, f64),
    pub layout: BlockLayout,
    pub state: Option<SpinorFockState>,
}

impl EigenPair {
    /// Embeds a physical eigenpair into the truncated spinor space.
    pub fn fock_state(&self, trunc: &FockTruncation) -> Result<SpinorFockState> {
        if self.label.physicality != Physicality::Physical {
            return Err(JcError::InvalidArgument(
                "nonphysical eigenfunctions have no Fock-space representation".into(),
            ));
        }
        let mut s = SpinorFockState::zeros(trunc);
        let (first, second) = self.layout.slots(self.label.n);
        if let Some((lv, n)) = first {
            s.set(lv, n, self.coeffs.0)?;
        }
        if let Some((lv, n)) = second {
            s.set(lv, n, self.coeffs.1)?;
        }
        Ok(s)
    }

    pub fn with_state(mut self, trunc: &FockTruncation) -> Result<Self> {
        self.state = Some(self.fock_state(trunc)?);
        Ok(self)
    }
}

/// Normalizes, then flips the sign so the first nonzero entry is positive.
pub fn canonical_pair(c1: f64, c2: f64) -> (f64, f64) {
    let norm = c1.hypot(c2);
    if norm == 0.0 {
        return (0.0, 0.0);
    }
    let (a, b) = (c1 / norm, c2 / norm);
    let lead = if a != 0.0 { a } else { b };
    if lead < 0.0 {
        (-a, -b)
    } else {
        (a, b)
    }
}

/// Eigenvector of the real symmetric block `[[p, q], [q, r]]` for eigenvalue `e`.
fn symmetric_block_vector(p: f64, q: f64, r: f64, e: f64, branch: Branch) -> (f64, f64) {
    // the two rows give (q, e − p) and (e − r, q); keep the better conditioned
    let from_first = (q, e - p);
    let from_second = (e - r, q);
    let n1 = from_first.0.hypot(from_first.1);
    let n2 = from_second.0.hypot(from_second.1);
    let scale = p.abs().max(q.abs()).max(r.abs()).max(1.0);
    if n1.max(n2) <= 1e-14 * scale {
        // q = 0 and p = r: any basis works, upper for +, lower for −
        return match branch {
            Branch::Minus => (0.0, 1.0),
            _ => (1.0, 0.0),
        };
    }
    if n2 >= n1 {
        canonical_pair(from_second.0, from_second.1)
    } else {
        canonical_pair(from_first.0, from_first.1)
    }
}

/// `(ε⁻, ε⁺)` of physical block `n >= 1`.
pub fn physical_block_energies(params: &JCParams, n: usize) -> (f64, f64) {
    let nf = n as f64;
    let root = (params.delta * params.delta + nf * params.lambda * params.lambda).sqrt();
    (nf - root, nf + root)
}

fn physical_pair(params: &JCParams, n: usize, branch: Branch) -> EigenPair {
    if n == 0 {
        return EigenPair {
            label: BranchLabel::physical(0, Branch::Single),
            energy: -params.delta,
            coeffs: (0.0, 1.0),
            layout: BlockLayout::Jc,
            state: None,
        };
    }
    let nf = n as f64;
    let (lo, hi) = physical_block_energies(params, n);
    let energy = if branch == Branch::Minus { lo } else { hi };
    let q = params.lambda * nf.sqrt();
    let coeffs = symmetric_block_vector(nf + params.delta, q, nf - params.delta, energy, branch);
    EigenPair {
        label: BranchLabel::physical(n, branch),
        energy,
        coeffs,
        layout: BlockLayout::Jc,
        state: None,
    }
}

/// `Ψ₀⁻`, then `Ψₙ⁻, Ψₙ⁺` for `n = 1..=n_cut`.
pub fn analytic_physical_spectrum(params: &JCParams, n_cut: usize) -> Vec<EigenPair> {
    let mut out = Vec::with_capacity(2 * n_cut + 1);
    out.push(physical_pair(params, 0, Branch::Single));
    for n in 1..=n_cut {
        out.push(physical_pair(params, n, Branch::Minus));
        out.push(physical_pair(params, n, Branch::Plus));
    }
    out
}

/// Single physical eigenpair; `branch` is ignored for `n = 0`.
pub fn physical_eigenpair(params: &JCParams, n: usize, branch: Branch) -> EigenPair {
    physical_pair(params, n, branch)
}

/// Largest `m` with `δ² − mλ² >= 0` up to the degeneracy tolerance.
pub fn nonphysical_reality_limit(params: &JCParams) -> Result<usize> {
    params.require_coupling()?;
    let d2 = params.delta * params.delta;
    let l2 = params.lambda * params.lambda;
    let tol = DEGENERACY_REL * d2.max(1.0);
    let mut m = (d2 / l2).floor() as usize;
    while d2 - (m as f64 + 1.0) * l2 >= -tol {
        m += 1;
    }
    while m > 0 && d2 - m as f64 * l2 < -tol {
        m -= 1;
    }
    Ok(m)
}

/// `√(δ² − mλ²)`, `None` when complex, `Some(0)` at a double root.
pub fn nonphysical_root(params: &JCParams, m: usize) -> Option<f64> {
    let d2 = params.delta * params.delta;
    let disc = d2 - m as f64 * params.lambda * params.lambda;
    if disc.abs() <= DEGENERACY_REL * d2.max(1.0) {
        Some(0.0)
    } else if disc < 0.0 {
        None
    } else {
        Some(disc.sqrt())
    }
}

/// Real-convention coefficients `(c₁, c₂)` on `(φ₋ₘ₋₁, φ₋ₘ)` for block `m >= 1`.
///
/// From the first row of `[[δ − m, λ√m], [−λ√m, −m − δ]]`: `(λ√m, −δ ± r)`.
pub fn nonphysical_block_vector(params: &JCParams, m: usize, branch: Branch) -> Option<(f64, f64)> {
    let r = nonphysical_root(params, m)?;
    let q = params.lambda * (m as f64).sqrt();
    Some(canonical_pair(q, -params.delta + branch.sign() * r))
}

/// `Φ₀⁺`, then the real `Φ₋ₘ±` pairs for `m = 1..=floor(δ²/λ²)`; a block at the
/// reality boundary contributes one [`Branch::Double`] entry.
pub fn analytic_nonphysical_spectrum(params: &JCParams) -> Result<Vec<EigenPair>> {
    let limit = nonphysical_reality_limit(params)?;
    let mut out = vec![EigenPair {
        label: BranchLabel::nonphysical(0, Branch::Single),
        energy: params.delta,
        coeffs: (1.0, 0.0),
        layout: BlockLayout::Jc,
        state: None,
    }];
    for m in 1..=limit {
        let r = nonphysical_root(params, m).expect("within reality limit");
        let mf = m as f64;
        if r == 0.0 {
            out.push(EigenPair {
                label: BranchLabel::nonphysical(m, Branch::Double),
                energy: -mf,
                coeffs: nonphysical_block_vector(params, m, Branch::Double).unwrap(),
                layout: BlockLayout::Jc,
                state: None,
            });
            continue;
        }
        for branch in [Branch::Minus, Branch::Plus] {
            out.push(EigenPair {
                label: BranchLabel::nonphysical(m, branch),
                energy: -mf + branch.sign() * r,
                coeffs: nonphysical_block_vector(params, m, branch).unwrap(),
                layout: BlockLayout::Jc,
                state: None,
            });
        }
    }
    Ok(out)
}

/// All eigenvalues of a real symmetric matrix, ascending.
pub fn numeric_spectrum(h: &OperatorMatrix) -> Result<Vec<f64>> {
    if h.nrows() != h.ncols() {
        return Err(JcError::DimensionMismatch("eigenvalues need a square matrix".into()));
    }
    let asym = max_asymmetry(h);
    if asym > HERMITIAN_TOL {
        return Err(JcError::NotHermitian(asym));
    }
    let mut eig: Vec<f64> = SymmetricEigen::new(h.clone()).eigenvalues.iter().copied().collect();
    eig.sort_by(|a, b| a.partial_cmp(b).unwrap_or(Ordering::Equal));
    Ok(eig)
}

#[derive(Debug, Clone, PartialEq)]
pub struct LevelMatch {
    pub label: BranchLabel,
    pub analytic: f64,
    pub numeric_index: usize,
    pub numeric: f64,
    pub delta_abs: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumReport {
    pub matched: Vec<LevelMatch>,
    /// Numeric values attributed to the truncation edge.
    pub spurious: Vec<f64>,
    /// Analytic levels with no numeric partner within tolerance.
    pub missing: Vec<BranchLabel>,
    /// Numeric values that are neither matched nor the predicted edge state.
    pub unmatched: Vec<f64>,
    pub expected_spurious: f64,
    pub tol: f64,
}

impl SpectrumReport {
    pub fn is_consistent(&self) -> bool {
        self.missing.is_empty()
            && self.unmatched.is_empty()
            && self.spurious.len() == 1
            && (self.spurious[0] - self.expected_spurious).abs() <= self.tol
    }

    pub fn max_delta(&self) -> f64 {
        self.matched.iter().fold(0.0_f64, |a, m| a.max(m.delta_abs))
    }
}

/// Greedy nearest-neighbour pairing of analytic levels (ascending energy, ties to
/// lower `n`) against sorted numeric eigenvalues. The single leftover numeric
/// value must be the truncation remnant `n_max + 1 + δ`.
pub fn reconcile(
    analytic: &[EigenPair],
    numeric: &[f64],
    params: &JCParams,
    trunc: &FockTruncation,
    tol: f64,
) -> SpectrumReport {
    let mut order: Vec<usize> = (0..analytic.len()).collect();
    order.sort_by(|&a, &b| {
        analytic[a]
            .energy
            .partial_cmp(&analytic[b].energy)
            .unwrap_or(Ordering::Equal)
            .then(analytic[a].label.n.cmp(&analytic[b].label.n))
    });
    let mut num_order: Vec<usize> = (0..numeric.len()).collect();
    num_order.sort_by(|&a, &b| numeric[a].partial_cmp(&numeric[b]).unwrap_or(Ordering::Equal));
    let sorted: Vec<f64> = num_order.iter().map(|&i| numeric[i]).collect();
    let mut used = vec![false; sorted.len()];

    let mut matched = Vec::new();
    let mut missing = Vec::new();
    for &ai in &order {
        let e = analytic[ai].energy;
        let pos = sorted.partition_point(|v| *v < e);
        let mut best: Option<(usize, f64)> = None;
        let mut consider = |j: usize| {
            if !used[j] {
                let d = (sorted[j] - e).abs();
                if best.is_none_or(|(_, bd)| d < bd) {
                    best = Some((j, d));
                }
            }
        };
        // nearest unused on each side
        if let Some(j) = (pos..sorted.len()).find(|&j| !used[j]) {
            consider(j);
        }
        if let Some(j) = (0..pos).rev().find(|&j| !used[j]) {
            consider(j);
        }
        match best {
            Some((j, d)) if d <= tol => {
                used[j] = true;
                matched.push(LevelMatch {
                    label: analytic[ai].label,
                    analytic: e,
                    numeric_index: num_order[j],
                    numeric: sorted[j],
                    delta_abs: d,
                });
            }
            _ => missing.push(analytic[ai].label),
        }
    }

    let expected_spurious = jc_truncation_remnant(params, trunc);
    let mut spurious = Vec::new();
    let mut unmatched = Vec::new();
    for (j, v) in sorted.iter().enumerate() {
        if used[j] {
            continue;
        }
        if spurious.is_empty() && (v - expected_spurious).abs() <= tol {
            spurious.push(*v);
        } else {
            unmatched.push(*v);
        }
    }
    SpectrumReport {
        matched,
        spurious,
        missing,
        unmatched,
        expected_spurious,
        tol,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::build_jc;
    use approx::assert_abs_diff_eq;
    use nalgebra::{DMatrix, DVector};

    const BASE: JCParams = JCParams {
        delta: 3.0,
        lambda: 1.25,
    };

    #[test]
    fn fig1_ground_and_first_block() {
        let s = analytic_physical_spectrum(&BASE, 3);
        assert_eq!(s.len(), 7);
        assert_eq!(s[0].energy, -3.0);
        assert_eq!(s[0].label.branch, Branch::Single);
        let t = FockTruncation::new(3).unwrap();
        let g = s[0].fock_state(&t).unwrap();
        assert_eq!(g.lower()[0], 1.0);
        assert_eq!((s[1].energy, s[2].energy), (-2.25, 4.25));
    }

    #[test]
    fn first_block_matches_2x2_diagonalization() {
        // independent oracle: eigen-decompose [[4, 1.25], [1.25, -2]]
        let block = DMatrix::from_row_slice(2, 2, &[4.0, 1.25, 1.25, -2.0]);
        let eig = SymmetricEigen::new(block);
        let mut vals: Vec<f64> = eig.eigenvalues.iter().copied().collect();
        vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let s = analytic_physical_spectrum(&BASE, 1);
        assert_abs_diff_eq!(s[1].energy, vals[0], epsilon = 1e-13);
        assert_abs_diff_eq!(s[2].energy, vals[1], epsilon = 1e-13);
        // Ψ₁⁺ ∝ (δ + 3.25, 1.25) = (6.25, 1.25)
        let n = 6.25_f64.hypot(1.25);
        assert_abs_diff_eq!(s[2].coeffs.0, 6.25 / n, epsilon = 1e-15);
        assert_abs_diff_eq!(s[2].coeffs.1, 1.25 / n, epsilon = 1e-15);
    }

    #[test]
    fn resonant_closed_form() {
        let p = JCParams::new(0.0, 0.7);
        for e in analytic_physical_spectrum(&p, 10).iter().skip(1) {
            let n = e.label.n as f64;
            let expected = n + e.label.branch.sign() * 0.7 * n.sqrt();
            assert_abs_diff_eq!(e.energy, expected, epsilon = 1e-14);
        }
    }

    #[test]
    fn decoupled_vectors_are_well_defined() {
        for p in [
            JCParams::new(0.0, 0.0),
            JCParams::new(2.0, 0.0),
            JCParams::new(-2.0, 0.0),
        ] {
            let t = FockTruncation::new(6).unwrap();
            let h = build_jc(&p, &t);
            for e in analytic_physical_spectrum(&p, 5) {
                let v = e.fock_state(&t).unwrap();
                assert_abs_diff_eq!(v.norm(), 1.0, epsilon = 1e-14);
                let r = &h * v.as_vector() - v.as_vector() * e.energy;
                assert!(r.norm() < 1e-13, "{p:?} {:?}", e.label);
            }
        }
    }

    #[test]
    fn analytic_vectors_are_truncated_eigenvectors() {
        let t = FockTruncation::new(40).unwrap();
        let h = build_jc(&BASE, &t);
        for e in analytic_physical_spectrum(&BASE, 40) {
            let v: DVector<f64> = e.fock_state(&t).unwrap().as_vector().clone();
            let r = (&h * &v - &v * e.energy).norm();
            assert!(r <= 1e-12 * v.norm().max(1.0) * 50.0, "{:?}: {r:e}", e.label);
            let lead = if e.coeffs.0 != 0.0 { e.coeffs.0 } else { e.coeffs.1 };
            assert!(lead > 0.0);
        }
    }

    #[test]
    fn nonphysical_census() {
        let np = analytic_nonphysical_spectrum(&BASE).unwrap();
        assert_eq!(np.len(), 11);
        assert_eq!(np[0].energy, 3.0);
        let (m, p) = (np[1].energy, np[2].energy);
        assert_abs_diff_eq!(m, -3.727178028658929, epsilon = 1e-12);
        assert_abs_diff_eq!(p, 1.727178028658929, epsilon = 1e-12);
        assert!(matches!(
            analytic_nonphysical_spectrum(&JCParams::new(3.0, 0.0)),
            Err(JcError::ZeroCoupling)
        ));
    }

    #[test]
    fn nonphysical_double_root_at_boundary() {
        let np = analytic_nonphysical_spectrum(&JCParams::new(3.0, 1.0)).unwrap();
        // 1 + 2·9 − 1
        assert_eq!(np.len(), 18);
        let last = np.last().unwrap();
        assert_eq!(last.label.n, 9);
        assert_eq!(last.label.branch, Branch::Double);
        assert_eq!(last.energy, -9.0);
        // rounding of δ = √k λ
        let p = JCParams::new(7.0_f64.sqrt() * 0.3, 0.3);
        let np = analytic_nonphysical_spectrum(&p).unwrap();
        assert_eq!(np.last().unwrap().label.branch, Branch::Double);
        assert_eq!(np.len(), 1 + 2 * 7 - 1);
    }

    #[test]
    fn nonphysical_vectors_satisfy_real_block() {
        let p = JCParams::new(2.2, 0.9);
        for e in analytic_nonphysical_spectrum(&p).unwrap().iter().skip(1) {
            let m = e.label.n as f64;
            let q = p.lambda * m.sqrt();
            let (c1, c2) = e.coeffs;
            let r1 = (p.delta - m) * c1 + q * c2 - e.energy * c1;
            let r2 = -q * c1 + (-m - p.delta) * c2 - e.energy * c2;
            assert!(r1.abs() < 1e-13 && r2.abs() < 1e-13);
        }
        // m = 1 at delta = 3, lambda = 1.25: (1, K₁) for +, (1, −K₂⁺) for −
        let v = nonphysical_block_vector(&BASE, 1, Branch::Minus).unwrap();
        assert_abs_diff_eq!(v.1 / v.0, -4.581742422927143, epsilon = 1e-12);
        let v = nonphysical_block_vector(&BASE, 1, Branch::Plus).unwrap();
        assert_abs_diff_eq!(v.1 / v.0, -0.218257577072857, epsilon = 1e-12);
    }

    #[test]
    fn numeric_spectrum_examples() {
        let t = FockTruncation::new(10).unwrap();
        let e = numeric_spectrum(&build_jc(&BASE, &t)).unwrap();
        assert_eq!(e.len(), 22);
        for target in [-3.0, 4.25, -2.25, 14.0] {
            assert!(e.iter().any(|v| (v - target).abs() < 1e-10), "{target}");
        }
        let t4 = FockTruncation::new(4).unwrap();
        let e = numeric_spectrum(&build_jc(&JCParams::new(0.0, 0.0), &t4)).unwrap();
        let want = [0.0, 1.0, 1.0, 2.0, 2.0, 3.0, 3.0, 4.0, 4.0, 5.0];
        for (a, b) in e.iter().zip(want) {
            assert_abs_diff_eq!(*a, b, epsilon = 1e-14);
        }
        let mut bad = build_jc(&BASE, &t);
        bad[(0, 12)] += 1e-6;
        assert!(matches!(numeric_spectrum(&bad), Err(JcError::NotHermitian(_))));
    }

    #[test]
    fn reconcile_fig1_nmax40() {
        let t = FockTruncation::new(40).unwrap();
        let num = numeric_spectrum(&build_jc(&BASE, &t)).unwrap();
        let rep = reconcile(&analytic_physical_spectrum(&BASE, 40), &num, &BASE, &t, 1e-9);
        assert!(rep.is_consistent());
        assert_eq!(rep.matched.len(), 81);
        assert_eq!(rep.spurious.len(), 1);
        assert_abs_diff_eq!(rep.spurious[0], 44.0, epsilon = 1e-9);
    }

    #[test]
    fn reconcile_decoupled() {
        let p = JCParams::new(0.0, 0.0);
        let t = FockTruncation::new(4).unwrap();
        let num = numeric_spectrum(&build_jc(&p, &t)).unwrap();
        let rep = reconcile(&analytic_physical_spectrum(&p, 4), &num, &p, &t, 1e-9);
        assert!(rep.is_consistent());
        assert_eq!(rep.spurious, vec![5.0]);
    }

    #[test]
    fn reconcile_flags_injected_fault() {
        let t = FockTruncation::new(12).unwrap();
        let mut num = numeric_spectrum(&build_jc(&BASE, &t)).unwrap();
        num[7] += 1e-3;
        let rep = reconcile(&analytic_physical_spectrum(&BASE, 12), &num, &BASE, &t, 1e-9);
        assert!(!rep.is_consistent());
        assert_eq!(rep.missing.len(), 1);
        assert_eq!(rep.unmatched.len(), 1);
        assert_eq!(rep.spurious.len(), 1);
    }
}
