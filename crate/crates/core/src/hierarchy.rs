//! Detuned JC sequences, the resonant hierarchy and per-step spectral bookkeeping.
//!
//! Node `n` of the JC sequence is `H_JC(s·√(δ² − nλ²)) − n` for `n >= 0` and
//! `H_JC(s·√(δ² + |n|λ²)) + |n|` for `n < 0`, with `s` the sign of the starting
//! detuning. Parameters come from these closed forms; the matrix intertwiners
//! attached to each step are for verification only.

use std::cmp::Ordering;

use crate::error::{JcError, Result};
use crate::exec::Exec;
use crate::fock::FockTruncation;
use crate::intertwiners::{
    build_intertwiner, lowering_kind, raising_kind, Intertwiner, IntertwinerKind, DEFAULT_GUARD,
};
use crate::linalg::guarded_norm;
use crate::models::{build_ajc, build_dirac_ho, excitation_number, JCParams, ShiftedHamiltonian};
use crate::spectra::{nonphysical_reality_limit, nonphysical_root, numeric_spectrum, Branch};
use nalgebra::DMatrix;

pub const LEDGER_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChainKind {
    Jc,
    AntiJc,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HierarchyNode {
    pub index: i64,
    /// JC-form parameters; an anti-JC chain stores the negative detuning here.
    pub params: JCParams,
    pub shift: f64,
    pub kind: ChainKind,
}

impl HierarchyNode {
    pub fn hamiltonian(&self) -> ShiftedHamiltonian {
        ShiftedHamiltonian::jc(self.params, self.shift)
    }

    /// JC-form matrix `H_JC(δₙ) + shift`.
    pub fn matrix(&self, trunc: &FockTruncation) -> DMatrix<f64> {
        self.hamiltonian().build(trunc)
    }

    /// The block form the chain is named after: anti-JC nodes as
    /// `H_aJC(−δₙ) + shift`, which σ_y maps onto [`Self::matrix`].
    pub fn presentation(&self, trunc: &FockTruncation) -> DMatrix<f64> {
        match self.kind {
            ChainKind::Jc => self.matrix(trunc),
            ChainKind::AntiJc => {
                let p = JCParams::new(-self.params.delta, self.params.lambda);
                build_ajc(&p, trunc) + DMatrix::identity(trunc.dim(), trunc.dim()) * self.shift
            }
        }
    }

    /// Physical energies `<= ceiling`, ascending.
    pub fn levels_below(&self, ceiling: f64) -> Vec<f64> {
        let (d, l) = (self.params.delta, self.params.lambda);
        let mut out = Vec::new();
        let ground = -d + self.shift;
        if ground <= ceiling {
            out.push(ground);
        }
        let mut n = 1usize;
        loop {
            let nf = n as f64;
            let root = (d * d + nf * l * l).sqrt();
            for e in [nf - root + self.shift, nf + root + self.shift] {
                if e <= ceiling {
                    out.push(e);
                }
            }
            // n − √n|λ| grows once √n > |λ|/2; past that the minus branch only rises
            let floor = nf - d.abs() - nf.sqrt() * l.abs() + self.shift;
            if nf.sqrt() > l.abs() / 2.0 && floor > ceiling {
                break;
            }
            n += 1;
        }
        out.sort_by(|a, b| a.partial_cmp(b).unwrap_or(Ordering::Equal));
        out
    }
}

/// Adjacent pair `(from, to)` and the intertwiner that maps `from` onto `to`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HierarchyStep {
    pub from: i64,
    pub to: i64,
    pub kind: IntertwinerKind,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sequence {
    pub nodes: Vec<HierarchyNode>,
    pub steps: Vec<HierarchyStep>,
    /// First index above zero excluded by `δ² >= nλ²`, if the request reached it.
    pub boundary: Option<i64>,
}

impl Sequence {
    pub fn node(&self, index: i64) -> Option<&HierarchyNode> {
        self.nodes.iter().find(|n| n.index == index)
    }

    /// Intertwiner of one step, shifted so it maps node onto node.
    pub fn step_intertwiner(&self, step: &HierarchyStep, trunc: &FockTruncation) -> Result<Intertwiner> {
        let from = self
            .node(step.from)
            .ok_or(JcError::NonAdjacentNodes(step.from, step.to))?;
        Ok(build_intertwiner(step.kind, &from.params, trunc)?.with_offset(from.shift))
    }

    /// Guarded residual of every step against the node matrices.
    pub fn verify_steps(&self, trunc: &FockTruncation, exec: Exec) -> Result<Vec<f64>> {
        exec.map(&self.steps, |step| {
            let l = self.step_intertwiner(step, trunc)?;
            let src = self.node(step.from).unwrap().matrix(trunc);
            let tgt = self.node(step.to).unwrap().matrix(trunc);
            crate::intertwiners::intertwine_residual(&l, &src, &tgt, DEFAULT_GUARD)
        })
        .into_iter()
        .collect()
    }
}

fn node_at(params: &JCParams, kind: ChainKind, index: i64) -> HierarchyNode {
    let sign = if params.delta >= 0.0 { 1.0 } else { -1.0 };
    let sign = match kind {
        ChainKind::Jc => sign,
        ChainKind::AntiJc => -sign,
    };
    let m = index.unsigned_abs() as usize;
    let mag = if index >= 0 {
        nonphysical_root(params, m).unwrap_or(0.0)
    } else {
        (params.delta * params.delta + m as f64 * params.lambda * params.lambda).sqrt()
    };
    // keep +0.0 at the degenerate node
    let delta = if mag == 0.0 { 0.0 } else { sign * mag };
    HierarchyNode {
        index,
        params: JCParams::new(delta, params.lambda),
        shift: -(index as f64),
        kind,
    }
}

/// Nodes `−down..=min(up, floor(δ²/λ²))`; stops at the reality boundary.
pub fn build_sequence(params: &JCParams, kind: ChainKind, up: usize, down: usize) -> Result<Sequence> {
    let limit = nonphysical_reality_limit(params)?;
    let top = up.min(limit) as i64;
    let boundary = (up > limit).then_some(limit as i64 + 1);
    let nodes: Vec<HierarchyNode> = (-(down as i64)..=top).map(|i| node_at(params, kind, i)).collect();
    let steps = nodes
        .windows(2)
        .map(|w| {
            let (a, b) = (&w[0], &w[1]);
            if a.index >= 0 {
                HierarchyStep {
                    from: a.index,
                    to: b.index,
                    kind: raising_kind(&a.params),
                }
            } else {
                HierarchyStep {
                    from: b.index,
                    to: a.index,
                    kind: lowering_kind(&b.params),
                }
            }
        })
        .collect();
    Ok(Sequence { nodes, steps, boundary })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResonantHierarchy {
    /// `H_JC^k` for `k = k_max..=0`, index `k`.
    pub nodes: Vec<HierarchyNode>,
    /// `Lₖ : H^k → H^(k−1)`, in node order.
    pub intertwiners: Vec<Intertwiner>,
    pub residuals: Vec<f64>,
}

pub fn resonant_node(k: usize, lambda: f64) -> HierarchyNode {
    HierarchyNode {
        index: k as i64,
        params: JCParams::new(lambda * (k as f64).sqrt(), lambda),
        shift: k as f64,
        kind: ChainKind::Jc,
    }
}

pub fn resonant_sequence(k_max: usize, lambda: f64, trunc: &FockTruncation, exec: Exec) -> Result<ResonantHierarchy> {
    if k_max < 1 {
        return Err(JcError::InvalidArgument("resonant hierarchy needs k_max >= 1".into()));
    }
    let base = JCParams::new(0.0, lambda);
    base.require_coupling()?;
    let nodes: Vec<HierarchyNode> = (0..=k_max).rev().map(|k| resonant_node(k, lambda)).collect();
    let ks: Vec<usize> = (1..=k_max).rev().collect();
    let built: Vec<Result<(Intertwiner, f64)>> = exec.map(&ks, |&k| {
        let l = build_intertwiner(IntertwinerKind::Resonant(k), &base, trunc)?;
        let r = l.residual()?;
        Ok((l, r))
    });
    let mut intertwiners = Vec::with_capacity(k_max);
    let mut residuals = Vec::with_capacity(k_max);
    for b in built {
        let (l, r) = b?;
        intertwiners.push(l);
        residuals.push(r);
    }
    Ok(ResonantHierarchy {
        nodes,
        intertwiners,
        residuals,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralLedger {
    pub from: i64,
    pub to: i64,
    /// Levels of `to` absent from `from`.
    pub gained: Vec<f64>,
    /// Levels of `from` absent from `to`.
    pub lost: Vec<f64>,
    pub matched_count: usize,
    pub ceiling: f64,
}

/// Multiset difference of two ascending lists at tolerance `tol`.
fn diff_sorted(a: &[f64], b: &[f64], tol: f64) -> (Vec<f64>, Vec<f64>, usize) {
    let (mut i, mut j, mut matched) = (0, 0, 0);
    let (mut only_a, mut only_b) = (Vec::new(), Vec::new());
    while i < a.len() && j < b.len() {
        if (a[i] - b[j]).abs() <= tol {
            matched += 1;
            i += 1;
            j += 1;
        } else if a[i] < b[j] {
            only_a.push(a[i]);
            i += 1;
        } else {
            only_b.push(b[j]);
            j += 1;
        }
    }
    only_a.extend_from_slice(&a[i..]);
    only_b.extend_from_slice(&b[j..]);
    (only_a, only_b, matched)
}

/// Levels gained and lost between adjacent nodes, below `n_cut / 2`.
pub fn ledger(node: &HierarchyNode, next: &HierarchyNode, n_cut: usize) -> Result<SpectralLedger> {
    if (node.index - next.index).abs() != 1 || node.kind != next.kind {
        return Err(JcError::NonAdjacentNodes(node.index, next.index));
    }
    let ceiling = n_cut as f64 / 2.0;
    let a = node.levels_below(ceiling);
    let b = next.levels_below(ceiling);
    let (lost, gained, matched_count) = diff_sorted(&a, &b, LEDGER_TOL);
    Ok(SpectralLedger {
        from: node.index,
        to: next.index,
        gained,
        lost,
        matched_count,
        ceiling,
    })
}

/// Same ledger computed from diagonalized truncated matrices.
pub fn numeric_ledger(node: &HierarchyNode, next: &HierarchyNode, trunc: &FockTruncation) -> Result<SpectralLedger> {
    if (node.index - next.index).abs() != 1 || node.kind != next.kind {
        return Err(JcError::NonAdjacentNodes(node.index, next.index));
    }
    let ceiling = trunc.n_max() as f64 / 2.0;
    let below = |n: &HierarchyNode| -> Result<Vec<f64>> {
        Ok(numeric_spectrum(&n.matrix(trunc))?
            .into_iter()
            .filter(|e| *e <= ceiling)
            .collect())
    };
    let (lost, gained, matched_count) = diff_sorted(&below(node)?, &below(next)?, LEDGER_TOL);
    Ok(SpectralLedger {
        from: node.index,
        to: next.index,
        gained,
        lost,
        matched_count,
        ceiling,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct OrderingReport {
    pub checked: usize,
    /// `(block n, branch)` where `ε⁽⁻¹⁾ > ε⁽⁰⁾ > ε⁽¹⁾` fails.
    pub violations: Vec<(usize, Branch)>,
}

impl OrderingReport {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Compares nodes −1, 0, 1 level by level for blocks `0..=n_cut`.
pub fn branch_ordering_check(params: &JCParams, n_cut: usize) -> Result<OrderingReport> {
    let seq = build_sequence(params, ChainKind::Jc, 1, 1)?;
    if seq.nodes.len() != 3 {
        return Err(JcError::RealityCondition {
            delta_sq: params.delta * params.delta,
            required: params.lambda * params.lambda,
        });
    }
    let energy = |node: &HierarchyNode, n: usize, branch: Branch| -> f64 {
        let (d, l) = (node.params.delta, node.params.lambda);
        if n == 0 {
            return -d + node.shift;
        }
        let nf = n as f64;
        let root = (d * d + nf * l * l).sqrt();
        match branch {
            Branch::Minus => nf - root + node.shift,
            _ => nf + root + node.shift,
        }
    };
    let mut checked = 0;
    let mut violations = Vec::new();
    for n in 0..=n_cut {
        let branches: &[Branch] = if n == 0 {
            &[Branch::Single]
        } else {
            &[Branch::Minus, Branch::Plus]
        };
        for &b in branches {
            let e: Vec<f64> = seq.nodes.iter().map(|node| energy(node, n, b)).collect();
            checked += 1;
            // nodes are ordered −1, 0, 1
            if !(e[0] > e[1] && e[1] > e[2]) {
                violations.push((n, b));
            }
        }
    }
    Ok(OrderingReport { checked, violations })
}

/// Guarded `‖(H_HO^k)² − N_e − k‖`.
pub fn dirac_square_check(k: usize, trunc: &FockTruncation) -> f64 {
    let h = build_dirac_ho(k, trunc);
    let dim = trunc.dim();
    let x = &h * &h - excitation_number(trunc) - DMatrix::<f64>::identity(dim, dim) * k as f64;
    guarded_norm(&x, trunc, DEFAULT_GUARD)
}

/// Physical levels of node `k` missing relative to the resonant base below `ceiling`.
pub fn resonant_level_deficit(k: usize, lambda: f64, ceiling: f64) -> usize {
    let base = resonant_node(0, lambda).levels_below(ceiling).len();
    let node = resonant_node(k, lambda).levels_below(ceiling).len();
    base - node
}

/// Moves `nominal` into the gap below it when it coincides with a level.
///
/// Every resonant node draws its levels from the base node's set, so a gap
/// of the base node is a gap for the whole chain and numeric counts cannot
/// flip on rounding.
pub fn resonant_gap_ceiling(lambda: f64, nominal: f64) -> f64 {
    let gap = 1e-6 * nominal.abs().max(1.0);
    let levels = resonant_node(0, lambda).levels_below(nominal + gap);
    if levels.iter().all(|e| (e - nominal).abs() > gap) {
        return nominal;
    }
    let below = levels
        .iter()
        .copied()
        .filter(|e| *e < nominal - gap)
        .fold(f64::NEG_INFINITY, f64::max);
    if below.is_finite() {
        0.5 * (below + nominal)
    } else {
        nominal - 0.5
    }
}

/// Eigenvalue count of the truncated matrix at or below `ceiling`.
pub fn numeric_level_count(node: &HierarchyNode, trunc: &FockTruncation, ceiling: f64) -> Result<usize> {
    Ok(numeric_spectrum(&node.matrix(trunc))?
        .into_iter()
        .filter(|e| *e <= ceiling)
        .count())
}

/// `true` when σ_y relates the named block form and the stored JC form
/// entrywise and the two spectra coincide to `tol`.
pub fn anti_jc_presentation_agrees(node: &HierarchyNode, trunc: &FockTruncation, tol: f64) -> Result<bool> {
    let pres = node.presentation(trunc);
    let stored = node.matrix(trunc);
    let a = numeric_spectrum(&pres)?;
    let b = numeric_spectrum(&stored)?;
    let spectra = a.iter().zip(&b).all(|(x, y)| (x - y).abs() <= tol);
    let mapped = crate::models::equivalence_transform(&pres, crate::models::AtomicUnitary::SigmaY)?;
    Ok(spectra && (mapped - stored).abs().max() <= tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    const BASE: JCParams = JCParams {
        delta: 3.0,
        lambda: 1.25,
    };

    fn t(n: usize) -> FockTruncation {
        FockTruncation::new(n).unwrap()
    }

    #[test]
    fn sequence_stops_at_reality_boundary() {
        let s = build_sequence(&BASE, ChainKind::Jc, 10, 0).unwrap();
        let idx: Vec<i64> = s.nodes.iter().map(|n| n.index).collect();
        assert_eq!(idx, vec![0, 1, 2, 3, 4, 5]);
        assert_eq!(s.boundary, Some(6));
        assert_eq!(s.steps.len(), 5);
        assert!(s.steps.iter().all(|st| st.kind == IntertwinerKind::L1));
        assert_eq!(build_sequence(&BASE, ChainKind::Jc, 5, 0).unwrap().boundary, None);
    }

    #[test]
    fn node_parameters() {
        let s = build_sequence(&BASE, ChainKind::Jc, 2, 2).unwrap();
        let n1 = s.node(1).unwrap();
        assert_abs_diff_eq!(n1.params.delta, 7.4375_f64.sqrt(), epsilon = 1e-15);
        assert_eq!(n1.shift, -1.0);
        let m1 = s.node(-1).unwrap();
        assert_eq!((m1.params.delta, m1.shift), (3.25, 1.0));
        assert_eq!(
            s.step_intertwiner(&s.steps[0], &t(4)).unwrap().kind,
            IntertwinerKind::L3
        );
    }

    #[test]
    fn composition_matches_direct_build() {
        let tr = t(10);
        let s = build_sequence(&BASE, ChainKind::Jc, 2, 0).unwrap();
        let l01 = s.step_intertwiner(&s.steps[0], &tr).unwrap();
        let l12 = s.step_intertwiner(&s.steps[1], &tr).unwrap();
        let direct = s.node(2).unwrap();
        assert_abs_diff_eq!(l12.target.params.delta, direct.params.delta, epsilon = 1e-12);
        assert_abs_diff_eq!(l12.target.shift, direct.shift, epsilon = 1e-12);
        assert_abs_diff_eq!(l01.target.params.delta, l12.source.params.delta, epsilon = 1e-12);
    }

    #[test]
    fn exact_boundary_gives_resonant_node() {
        let s = build_sequence(&JCParams::new(3.0, 1.0), ChainKind::Jc, 20, 0).unwrap();
        let last = s.nodes.last().unwrap();
        assert_eq!(last.index, 9);
        assert_eq!(last.params.delta, 0.0);
        assert_eq!(s.boundary, Some(10));
    }

    #[test]
    fn steps_intertwine() {
        let tr = t(30);
        for kind in [ChainKind::Jc, ChainKind::AntiJc] {
            let s = build_sequence(&BASE, kind, 5, 3).unwrap();
            for (st, r) in s.steps.iter().zip(s.verify_steps(&tr, Exec::default()).unwrap()) {
                assert!(r <= 1e-10, "{kind:?} {st:?}: {r:e}");
            }
        }
    }

    #[test]
    fn anti_jc_chain_signs_and_presentation() {
        let tr = t(12);
        let s = build_sequence(&BASE, ChainKind::AntiJc, 3, 1).unwrap();
        for node in &s.nodes {
            assert!(node.params.delta < 0.0);
            assert!(anti_jc_presentation_agrees(node, &tr, 1e-10).unwrap());
        }
        assert!(s.steps.iter().any(|st| st.kind == IntertwinerKind::L2));
        assert!(s.steps.iter().any(|st| st.kind == IntertwinerKind::L4));
    }

    #[test]
    fn ledger_up_step() {
        let s = build_sequence(&BASE, ChainKind::Jc, 1, 1).unwrap();
        let up = ledger(s.node(0).unwrap(), s.node(1).unwrap(), 40).unwrap();
        assert!(up.lost.is_empty());
        assert_eq!(up.gained.len(), 2);
        assert_abs_diff_eq!(up.gained[0], -1.0 - 7.4375_f64.sqrt(), epsilon = 1e-12);
        assert_abs_diff_eq!(up.gained[1], 3.0, epsilon = 1e-12);
        let down = ledger(s.node(0).unwrap(), s.node(-1).unwrap(), 40).unwrap();
        assert!(down.gained.is_empty());
        assert_eq!(down.lost, vec![-3.0, 4.25]);
        let a = s.node(0).unwrap().levels_below(20.0).len();
        assert_eq!(down.matched_count + down.lost.len(), a);
    }

    #[test]
    fn ledger_matches_numeric() {
        let tr = t(40);
        let s = build_sequence(&BASE, ChainKind::Jc, 1, 1).unwrap();
        for (a, b) in [(0, 1), (0, -1)] {
            let an = ledger(s.node(a).unwrap(), s.node(b).unwrap(), 40).unwrap();
            let nu = numeric_ledger(s.node(a).unwrap(), s.node(b).unwrap(), &tr).unwrap();
            assert_eq!(an.matched_count, nu.matched_count);
            assert_eq!(an.gained.len(), nu.gained.len());
            assert_eq!(an.lost.len(), nu.lost.len());
        }
    }

    #[test]
    fn ledger_rejects_non_adjacent() {
        let s = build_sequence(&BASE, ChainKind::Jc, 2, 0).unwrap();
        assert_eq!(
            ledger(s.node(0).unwrap(), s.node(2).unwrap(), 40),
            Err(JcError::NonAdjacentNodes(0, 2))
        );
    }

    #[test]
    fn ordering_holds_at_fig1() {
        let rep = branch_ordering_check(&BASE, 20).unwrap();
        assert!(rep.holds(), "{:?}", rep.violations);
        assert_eq!(rep.checked, 41);
    }

    #[test]
    fn resonant_hierarchy_k9() {
        let tr = t(30);
        let h = resonant_sequence(9, 1.0, &tr, Exec::default()).unwrap();
        assert_eq!(h.nodes.len(), 10);
        assert_eq!(h.nodes.last().unwrap().params.delta, 0.0);
        for r in &h.residuals {
            assert!(*r <= 1e-12, "{r:e}");
        }
        let k1 = resonant_node(1, 0.7);
        assert_eq!((k1.params.delta, k1.shift), (0.7, 1.0));
        assert!(resonant_sequence(0, 1.0, &tr, Exec::Sequential).is_err());
    }

    #[test]
    fn resonant_nodes_lose_2k_levels() {
        let tr = t(30);
        for k in 1..=9 {
            assert_eq!(resonant_level_deficit(k, 1.0, 15.0), 2 * k);
            let base = numeric_level_count(&resonant_node(0, 1.0), &tr, 15.0).unwrap();
            let node = numeric_level_count(&resonant_node(k, 1.0), &tr, 15.0).unwrap();
            assert_eq!(base - node, 2 * k);
        }
    }

    #[test]
    fn dirac_squares() {
        assert!(dirac_square_check(9, &t(30)) <= 1e-12);
        assert!(dirac_square_check(0, &t(10)) <= 1e-12);
    }

    #[test]
    fn gap_ceiling_avoids_levels() {
        // 16 + 4 and 25 - 5 both sit on 20
        let c = resonant_gap_ceiling(1.0, 20.0);
        assert!(c < 20.0 && c > 19.0);
        let levels = resonant_node(0, 1.0).levels_below(21.0);
        assert!(levels.iter().all(|e| (e - c).abs() > 1e-3));
        assert_eq!(resonant_gap_ceiling(1.0, 19.9), 19.9);
    }

    #[test]
    fn resonant_deficits_numeric() {
        let t = FockTruncation::new(40).unwrap();
        let ceiling = resonant_gap_ceiling(1.0, 20.0);
        let base = numeric_level_count(&resonant_node(0, 1.0), &t, ceiling).unwrap();
        for k in 1..=9 {
            let nk = numeric_level_count(&resonant_node(k, 1.0), &t, ceiling).unwrap();
            assert_eq!(base - nk, 2 * k, "k = {k}");
        }
    }
}
