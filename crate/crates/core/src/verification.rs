//! The acceptance suite as library code, shared by the test target and the CLI.
//!
//! Each criterion returns named checks with the measured value and its bound.
//! Expected values are computed from closed forms for the configured
//! parameters; the literal values for the default parameters are pinned
//! separately in the acceptance test.

use std::fmt;

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::darboux::{darboux_for_kind, grid_annihilation, predicted_fit, w_error, ShapeFit, SlopeRule};
use crate::error::{JcError, Result};
use crate::exec::Exec;
use crate::fock::{FockTruncation, GridAxis};
use crate::hierarchy::{
    branch_ordering_check, build_sequence, dirac_square_check, ledger, numeric_ledger, numeric_level_count,
    resonant_gap_ceiling, resonant_level_deficit, resonant_node, resonant_sequence, ChainKind,
};
use crate::intertwiners::{build_intertwiner, k_constants, seed_annihilation_check, symmetry_from, IntertwinerKind};
use crate::linalg::{commutator, spectral_norm};
use crate::models::{build_ajc, build_jc, equivalence_transform, excitation_number, AtomicUnitary, JCParams};
use crate::spectra::{
    analytic_nonphysical_spectrum, analytic_physical_spectrum, numeric_spectrum, physical_block_energies, reconcile,
    Branch,
};

/// Pinned tolerances.
pub mod tol {
    pub const SPECTRUM: f64 = 1e-9;
    pub const INTERTWINE: f64 = 1e-10;
    pub const FOCK_ANNIHILATION: f64 = 1e-12;
    pub const GRID_ANNIHILATION: f64 = 1e-6;
    pub const SYMMETRY: f64 = 1e-12;
    pub const K_IDENTITY: f64 = 1e-12;
    pub const W_EXACT: f64 = 1e-8;
    pub const FIT: f64 = 1e-5;
    pub const RATIO: f64 = 4.0;
    pub const RATIO_BAND: f64 = 0.2;
    pub const LEDGER: f64 = 1e-9;
    pub const RESONANT: f64 = 1e-12;
    pub const TRACE_DET: f64 = 1e-10;
    pub const EQUIVALENCE: f64 = 1e-12;
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Bound {
    AtMost(f64),
    Near {
        target: f64,
        tol: f64,
    },
    /// Exact integer count.
    Count(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub label: String,
    pub value: f64,
    pub bound: Bound,
    pub passed: bool,
}

impl Check {
    pub fn at_most(label: impl Into<String>, value: f64, limit: f64) -> Self {
        Self {
            label: label.into(),
            value,
            bound: Bound::AtMost(limit),
            passed: value <= limit,
        }
    }

    pub fn near(label: impl Into<String>, value: f64, target: f64, tol: f64) -> Self {
        Self {
            label: label.into(),
            value,
            bound: Bound::Near { target, tol },
            passed: (value - target).abs() <= tol,
        }
    }

    pub fn count(label: impl Into<String>, value: usize, expected: usize) -> Self {
        Self {
            label: label.into(),
            value: value as f64,
            bound: Bound::Count(expected),
            passed: value == expected,
        }
    }

    pub fn flag(label: impl Into<String>, ok: bool) -> Self {
        Self::count(label, ok as usize, 1)
    }

    /// A step that could not be evaluated counts as failed.
    fn errored(label: impl Into<String>, err: &JcError) -> Self {
        Self {
            label: format!("{} [error: {err}]", label.into()),
            value: f64::NAN,
            bound: Bound::Count(0),
            passed: false,
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mark = if self.passed { "ok  " } else { "FAIL" };
        match self.bound {
            Bound::AtMost(l) => write!(f, "{mark} {}: {:.3e} (<= {:.0e})", self.label, self.value, l),
            Bound::Near { target, tol } => write!(
                f,
                "{mark} {}: {:.12} (target {:.12} ± {:.0e})",
                self.label, self.value, target, tol
            ),
            Bound::Count(n) => write!(f, "{mark} {}: {} (expected {n})", self.label, self.value),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CriterionOutcome {
    pub id: u8,
    pub title: &'static str,
    pub checks: Vec<Check>,
}

impl CriterionOutcome {
    pub fn passed(&self) -> bool {
        !self.checks.is_empty() && self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    /// `PASS [n] title (k checks)` or `FAIL ...`.
    pub fn summary_line(&self) -> String {
        format!(
            "{} [{}] {} ({}/{} checks)",
            if self.passed() { "PASS" } else { "FAIL" },
            self.id,
            self.title,
            self.checks.iter().filter(|c| c.passed).count(),
            self.checks.len()
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuiteConfig {
    pub params: JCParams,
    pub n_max: usize,
    pub grid: GridAxis,
    /// Half-width of the grid window used by the Darboux checks.
    pub window: f64,
    pub seed: u64,
    pub k_draws: usize,
    pub property_draws: usize,
    pub property_n_max: usize,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            params: JCParams::new(3.0, 1.25),
            n_max: 40,
            grid: GridAxis::default(),
            window: 4.0,
            seed: 0x4a43_5355_5359,
            k_draws: 1000,
            property_draws: 200,
            property_n_max: 20,
        }
    }
}

impl SuiteConfig {
    fn trunc(&self) -> Result<FockTruncation> {
        FockTruncation::new(self.n_max)
    }

    /// The intertwiner checks need the detuned partners to exist.
    pub fn validate(&self) -> Result<()> {
        self.params.require_coupling()?;
        let (d, l) = (self.params.delta, self.params.lambda);
        if d * d < l * l {
            return Err(JcError::RealityCondition {
                delta_sq: d * d,
                required: l * l,
            });
        }
        self.trunc()?;
        Ok(())
    }
}

/// Collects checks, turning evaluation errors into failed checks.
#[derive(Default)]
struct Checks(Vec<Check>);

impl Checks {
    fn push(&mut self, c: Check) {
        self.0.push(c);
    }

    fn attempt<F>(&mut self, label: &str, f: F)
    where
        F: FnOnce(&mut Vec<Check>) -> Result<()>,
    {
        let mut local = Vec::new();
        match f(&mut local) {
            Ok(()) => self.0.extend(local),
            Err(e) => {
                self.0.extend(local);
                self.0.push(Check::errored(label, &e));
            }
        }
    }

    fn done(self, id: u8, title: &'static str) -> CriterionOutcome {
        CriterionOutcome {
            id,
            title,
            checks: self.0,
        }
    }
}

pub const TITLES: [&str; 9] = [
    "spectrum equality",
    "nonphysical census",
    "intertwining residuals",
    "annihilation",
    "symmetries",
    "Darboux cross-validation",
    "hierarchy bookkeeping",
    "resonant hierarchy",
    "property suite",
];

pub fn spectrum_equality(cfg: &SuiteConfig) -> CriterionOutcome {
    let mut out = Checks::default();
    out.attempt("diagonalization", |c| {
        let p = cfg.params;
        let t = cfg.trunc()?;
        let num = numeric_spectrum(&build_jc(&p, &t))?;
        let analytic = analytic_physical_spectrum(&p, cfg.n_max);
        let rep = reconcile(&analytic, &num, &p, &t, tol::SPECTRUM);
        c.push(Check::count("matched levels", rep.matched.len(), 2 * cfg.n_max + 1));
        c.push(Check::at_most(
            "max |analytic - numeric|",
            rep.max_delta(),
            tol::SPECTRUM,
        ));
        c.push(Check::count("missing levels", rep.missing.len(), 0));
        c.push(Check::count("unexplained eigenvalues", rep.unmatched.len(), 0));
        c.push(Check::count("spurious eigenvalues", rep.spurious.len(), 1));
        if let Some(s) = rep.spurious.first() {
            c.push(Check::near("spurious value", *s, rep.expected_spurious, tol::SPECTRUM));
        }
        let (lo, hi) = physical_block_energies(&p, 1);
        for (name, e) in [("eps_1-", lo), ("eps_1+", hi)] {
            let nearest = num.iter().fold(f64::INFINITY, |a, v| a.min((v - e).abs()));
            c.push(Check::at_most(format!("{name} = {e} present"), nearest, tol::SPECTRUM));
        }
        Ok(())
    });
    out.done(1, TITLES[0])
}

/// Expected count: `Φ₀⁺` plus two per real block, one at a double root.
fn census_expected(p: &JCParams) -> Result<usize> {
    let limit = crate::spectra::nonphysical_reality_limit(p)?;
    let doubles = (1..=limit)
        .filter(|&m| crate::spectra::nonphysical_root(p, m) == Some(0.0))
        .count();
    Ok(1 + 2 * limit - doubles)
}

pub fn nonphysical_census(cfg: &SuiteConfig) -> CriterionOutcome {
    let mut out = Checks::default();
    out.attempt("census", |c| {
        let np = analytic_nonphysical_spectrum(&cfg.params)?;
        c.push(Check::count(
            "real nonphysical levels",
            np.len(),
            census_expected(&cfg.params)?,
        ));
        // real-block cross-check of every entry
        let worst = np
            .iter()
            .skip(1)
            .map(|e| {
                let m = e.label.n as f64;
                let q = cfg.params.lambda * m.sqrt();
                let d = cfg.params.delta;
                let blk = DMatrix::from_row_slice(2, 2, &[d - m, q, -q, -m - d]);
                let v = nalgebra::DVector::from_vec(vec![e.coeffs.0, e.coeffs.1]);
                (&blk * &v - &v * e.energy).norm()
            })
            .fold(0.0_f64, f64::max);
        c.push(Check::at_most("block eigen-residual", worst, 1e-12));
        Ok(())
    });
    out.attempt("boundary", |c| {
        let p = JCParams::new(3.0, 1.0);
        let np = analytic_nonphysical_spectrum(&p)?;
        let last = np.last().ok_or(JcError::InvalidArgument("empty census".into()))?;
        c.push(Check::count("(3, 1) last block index", last.label.n, 9));
        c.push(Check::flag(
            "(3, 1) n = 9 is a double root",
            last.label.branch == Branch::Double,
        ));
        c.push(Check::near("(3, 1) double root energy", last.energy, -9.0, 1e-12));
        Ok(())
    });
    out.done(2, TITLES[1])
}

pub fn intertwining_residuals(cfg: &SuiteConfig, exec: Exec) -> CriterionOutcome {
    let mut out = Checks::default();
    let kinds: Vec<(IntertwinerKind, JCParams)> = IntertwinerKind::FIXED
        .iter()
        .map(|k| (*k, cfg.params))
        .chain((1..=9).map(|k| (IntertwinerKind::Resonant(k), JCParams::new(0.0, cfg.params.lambda))))
        .collect();
    let results = exec.map(&kinds, |(kind, p)| -> Result<(f64, f64)> {
        let l = build_intertwiner(*kind, p, &cfg.trunc()?)?;
        Ok((l.residual()?, l.adjoint_residual()?))
    });
    for ((kind, _), r) in kinds.iter().zip(results) {
        match r {
            Ok((fwd, adj)) => {
                out.push(Check::at_most(format!("{kind} residual"), fwd, tol::INTERTWINE));
                out.push(Check::at_most(format!("{kind} adjoint residual"), adj, tol::INTERTWINE));
            }
            Err(e) => out.push(Check::errored(kind.to_string(), &e)),
        }
    }
    out.done(3, TITLES[2])
}

pub fn annihilation(cfg: &SuiteConfig, exec: Exec) -> CriterionOutcome {
    let mut out = Checks::default();
    for kind in [IntertwinerKind::L0, IntertwinerKind::L3, IntertwinerKind::L4] {
        out.attempt(&format!("{kind} Fock seeds"), |c| {
            for (label, r) in seed_annihilation_check(kind, &cfg.params, &cfg.trunc()?)? {
                c.push(Check::at_most(
                    format!("|{kind} psi({}{})|", label.n, label.branch.symbol()),
                    r,
                    tol::FOCK_ANNIHILATION,
                ));
            }
            Ok(())
        });
    }
    for kind in [IntertwinerKind::L1, IntertwinerKind::L2] {
        out.attempt(&format!("{kind} grid seeds"), |c| {
            let res = grid_annihilation(kind, &cfg.params, &cfg.grid, SlopeRule::Exact, cfg.window, exec)?;
            for (label, r) in res {
                c.push(Check::at_most(
                    format!("|{kind} phi(-{}{})| relative sup", label.n, label.branch.symbol()),
                    r,
                    tol::GRID_ANNIHILATION,
                ));
            }
            Ok(())
        });
    }
    out.done(4, TITLES[3])
}

/// `K₁K₂⁺ + 1` and `K₃K₄ + 1` over random draws with `δ² >= λ²`.
pub fn k_identity_sweep(draws: usize, seed: u64, exec: Exec) -> Result<(f64, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let params: Vec<JCParams> = (0..draws)
        .map(|_| {
            let l: f64 = rng.gen_range(0.1..=5.0);
            let rho: f64 = rng.gen_range(1.0..=5.0);
            let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
            JCParams::new(sign * rho * l, l)
        })
        .collect();
    let errs = exec.map(&params, |p| -> Result<(f64, f64)> {
        let k = k_constants(p)?;
        Ok(((k.k1 * k.k2_plus + 1.0).abs(), (k.k3 * k.k4 + 1.0).abs()))
    });
    errs.into_iter()
        .try_fold((0.0_f64, 0.0_f64), |(a, b), r| r.map(|(x, y)| (a.max(x), b.max(y))))
}

pub fn symmetries(cfg: &SuiteConfig, exec: Exec) -> CriterionOutcome {
    let mut out = Checks::default();
    out.attempt("excitation number", |c| {
        let t = cfg.trunc()?;
        let comm = commutator(&excitation_number(&t), &build_jc(&cfg.params, &t));
        c.push(Check::at_most("|[N_e, H_JC]|", spectral_norm(&comm), tol::SYMMETRY));
        Ok(())
    });
    for kind in IntertwinerKind::FIXED {
        out.attempt(&format!("{kind} symmetry"), |c| {
            let s = symmetry_from(&build_intertwiner(kind, &cfg.params, &cfg.trunc()?)?);
            c.push(Check::at_most(
                format!("{kind}: S - decomposition"),
                s.decomposition_residual(),
                tol::SYMMETRY,
            ));
            c.push(Check::at_most(
                format!("{kind}: [S, H]"),
                s.commutator_residual(),
                tol::SYMMETRY,
            ));
            Ok(())
        });
    }
    out.attempt("K identities", |c| {
        let (a, b) = k_identity_sweep(cfg.k_draws, cfg.seed, exec)?;
        c.push(Check::at_most(
            format!("max |K1 K2+ + 1| over {} draws", cfg.k_draws),
            a,
            tol::K_IDENTITY,
        ));
        c.push(Check::at_most(
            format!("max |K3 K4 + 1| over {} draws", cfg.k_draws),
            b,
            tol::K_IDENTITY,
        ));
        Ok(())
    });
    out.done(5, TITLES[4])
}

fn fit_error(kind: IntertwinerKind, p: &JCParams, fit: &ShapeFit, with_lambda: bool) -> Result<f64> {
    let (d, l, c) = predicted_fit(kind, p)?;
    let mut e = (fit.delta_fit - d).abs().max((fit.const_fit - c).abs());
    if with_lambda {
        e = e.max((fit.lambda_fit - l).abs());
    }
    Ok(e)
}

fn ratio_check(label: &str, coarse: f64, fine: f64) -> Check {
    Check::near(
        format!("{label} error ratio h/(h/2) ({coarse:.2e} -> {fine:.2e})"),
        coarse / fine,
        tol::RATIO,
        tol::RATIO * tol::RATIO_BAND,
    )
}

pub fn darboux_cross_validation(cfg: &SuiteConfig, exec: Exec) -> CriterionOutcome {
    let mut out = Checks::default();
    let p = cfg.params;
    let g = cfg.grid;
    let fine = g.refined();
    let hw = cfg.window;
    out.attempt("L0 seeds", |c| {
        let e = w_error(IntertwinerKind::L0, &p, &g, SlopeRule::Exact, hw, exec)?;
        c.push(Check::at_most("W - diag(x, -x) sup", e, tol::W_EXACT));
        let d = darboux_for_kind(IntertwinerKind::L0, &p, &g, SlopeRule::Exact, hw, exec)?;
        c.push(Check::at_most(
            "V~ vs anti-JC template residual",
            d.fit.residual,
            tol::FIT,
        ));
        c.push(Check::at_most(
            "anti-JC fit (delta-1, -lambda, 0)",
            fit_error(IntertwinerKind::L0, &p, &d.fit, true)?,
            tol::FIT,
        ));
        let e1 = w_error(IntertwinerKind::L0, &p, &g, SlopeRule::CentralDifference, hw, exec)?;
        let e2 = w_error(IntertwinerKind::L0, &p, &fine, SlopeRule::CentralDifference, hw, exec)?;
        c.push(ratio_check("L0 W", e1, e2));
        Ok(())
    });
    for (kind, name) in [(IntertwinerKind::L1, "L1"), (IntertwinerKind::L3, "L3")] {
        out.attempt(&format!("{name} seeds"), |c| {
            let d = darboux_for_kind(kind, &p, &g, SlopeRule::Exact, hw, exec)?;
            let (dt, _, ct) = predicted_fit(kind, &p)?;
            c.push(Check::near(
                format!("{name} fitted delta~"),
                d.fit.delta_fit,
                dt,
                tol::FIT,
            ));
            c.push(Check::near(format!("{name} fitted c"), d.fit.const_fit, ct, tol::FIT));
            c.push(Check::at_most(
                format!("{name} template residual"),
                d.fit.residual,
                tol::FIT,
            ));
            let f1 = darboux_for_kind(kind, &p, &g, SlopeRule::CentralDifference, hw, exec)?;
            let f2 = darboux_for_kind(kind, &p, &fine, SlopeRule::CentralDifference, hw, exec)?;
            c.push(ratio_check(
                &format!("{name} fit"),
                fit_error(kind, &p, &f1.fit, false)?,
                fit_error(kind, &p, &f2.fit, false)?,
            ));
            Ok(())
        });
    }
    out.done(6, TITLES[5])
}

fn sorted(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    v
}

fn set_check(label: &str, got: &[f64], want: &[f64], c: &mut Vec<Check>) {
    c.push(Check::count(format!("{label} count"), got.len(), want.len()));
    if got.len() == want.len() {
        for (g, w) in got.iter().zip(want) {
            c.push(Check::near(format!("{label} level"), *g, *w, tol::LEDGER));
        }
    }
}

pub fn hierarchy_bookkeeping(cfg: &SuiteConfig) -> CriterionOutcome {
    let mut out = Checks::default();
    let p = cfg.params;
    out.attempt("ledgers", |c| {
        let s = build_sequence(&p, ChainKind::Jc, 1, 1)?;
        let (n0, n1, m1) = (s.node(0).unwrap(), s.node(1).unwrap(), s.node(-1).unwrap());
        let up = ledger(n0, n1, cfg.n_max)?;
        let want_gained = sorted(vec![p.delta, -n1.params.delta - 1.0]);
        set_check("0->1 gained", &up.gained, &want_gained, c);
        c.push(Check::count("0->1 lost", up.lost.len(), 0));
        let down = ledger(n0, m1, cfg.n_max)?;
        let s_root = p.delta.hypot(p.lambda);
        let lost_block = if p.delta >= 0.0 { 1.0 + s_root } else { 1.0 - s_root };
        let want_lost = sorted(vec![-p.delta, lost_block]);
        set_check("0->-1 lost", &down.lost, &want_lost, c);
        c.push(Check::count("0->-1 gained", down.gained.len(), 0));
        let t = cfg.trunc()?;
        for (a, b, an) in [(n0, n1, &up), (n0, m1, &down)] {
            let nu = numeric_ledger(a, b, &t)?;
            c.push(Check::flag(
                format!("{}->{} numeric ledger agrees", a.index, b.index),
                nu.matched_count == an.matched_count
                    && nu.gained.len() == an.gained.len()
                    && nu.lost.len() == an.lost.len(),
            ));
        }
        Ok(())
    });
    out.attempt("ordering", |c| {
        let rep = branch_ordering_check(&p, 20)?;
        c.push(Check::count("ordering violations for n <= 20", rep.violations.len(), 0));
        Ok(())
    });
    out.done(7, TITLES[6])
}

pub fn resonant_hierarchy(cfg: &SuiteConfig, exec: Exec) -> CriterionOutcome {
    let mut out = Checks::default();
    let lambda = 1.0;
    let k_max = 9;
    out.attempt("chain", |c| {
        let t = cfg.trunc()?;
        let h = resonant_sequence(k_max, lambda, &t, exec)?;
        c.push(Check::count("nodes", h.nodes.len(), k_max + 1));
        for (l, r) in h.intertwiners.iter().zip(&h.residuals) {
            c.push(Check::at_most(format!("{} residual", l.kind), *r, tol::RESONANT));
        }
        let ks: Vec<usize> = (0..=k_max).collect();
        for (k, r) in ks.iter().zip(exec.map(&ks, |k| dirac_square_check(*k, &t))) {
            c.push(Check::at_most(format!("(H_HO^{k})^2 - N_e - {k}"), r, tol::RESONANT));
        }
        let ceiling = resonant_gap_ceiling(lambda, cfg.n_max as f64 / 2.0);
        let base = numeric_level_count(&resonant_node(0, lambda), &t, ceiling)?;
        for k in 1..=k_max {
            c.push(Check::count(
                format!("node {k} deficit (closed form)"),
                resonant_level_deficit(k, lambda, ceiling),
                2 * k,
            ));
            let nk = numeric_level_count(&resonant_node(k, lambda), &t, ceiling)?;
            c.push(Check::count(format!("node {k} deficit (numeric)"), base - nk, 2 * k));
        }
        Ok(())
    });
    out.done(8, TITLES[7])
}

fn sorted_eigs(m: &DMatrix<f64>) -> Vec<f64> {
    sorted(SymmetricEigen::new(m.clone()).eigenvalues.iter().copied().collect())
}

/// Worst `(trace, determinant, equivalence)` deviation for one parameter pair.
fn property_errors(p: &JCParams, t: &FockTruncation) -> Result<(f64, f64, f64, bool)> {
    let h = build_jc(p, t);
    let mut tr_err = 0.0_f64;
    let mut det_err = 0.0_f64;
    for n in 1..=t.n_max() {
        let iu = t.index(crate::fock::Level::Upper, n - 1)?;
        let il = t.index(crate::fock::Level::Lower, n)?;
        let blk = DMatrix::from_row_slice(2, 2, &[h[(iu, iu)], h[(iu, il)], h[(il, iu)], h[(il, il)]]);
        let e = sorted_eigs(&blk);
        let nf = n as f64;
        tr_err = tr_err.max((e[0] + e[1] - 2.0 * nf).abs());
        det_err = det_err.max((e[0] * e[1] - (nf * nf - p.delta * p.delta - nf * p.lambda * p.lambda)).abs());
    }
    let base = numeric_spectrum(&h)?;
    let mut eq_err = 0.0_f64;
    for r in [AtomicUnitary::SigmaZ, AtomicUnitary::SigmaY] {
        let moved = numeric_spectrum(&equivalence_transform(&h, r)?)?;
        for (a, b) in base.iter().zip(&moved) {
            eq_err = eq_err.max((a - b).abs());
        }
    }
    let mirrored = equivalence_transform(&build_ajc(p, t), AtomicUnitary::SigmaY)?;
    let entrywise = mirrored == build_jc(&JCParams::new(-p.delta, p.lambda), t);
    Ok((tr_err, det_err, eq_err, entrywise))
}

pub fn property_suite(cfg: &SuiteConfig, exec: Exec) -> CriterionOutcome {
    let mut out = Checks::default();
    out.attempt("random draws", |c| {
        let t = FockTruncation::new(cfg.property_n_max)?;
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x9e37_79b9);
        let params: Vec<JCParams> = (0..cfg.property_draws)
            .map(|_| {
                let l: f64 = rng.gen_range(0.1..=3.0);
                let d: f64 = rng.gen_range(-5.0..=5.0);
                JCParams::new(d, l)
            })
            .collect();
        let res: Result<Vec<_>> = exec.map(&params, |p| property_errors(p, &t)).into_iter().collect();
        let res = res?;
        let worst = |f: fn(&(f64, f64, f64, bool)) -> f64| res.iter().map(f).fold(0.0_f64, f64::max);
        let n = cfg.property_draws;
        c.push(Check::at_most(
            format!("trace identity over {n} draws"),
            worst(|r| r.0),
            tol::TRACE_DET,
        ));
        c.push(Check::at_most(
            format!("determinant identity over {n} draws"),
            worst(|r| r.1),
            tol::TRACE_DET,
        ));
        c.push(Check::at_most(
            format!("sigma_z/sigma_y spectra over {n} draws"),
            worst(|r| r.2),
            tol::EQUIVALENCE,
        ));
        c.push(Check::count(
            "sigma_y(aJC(delta)) == JC(-delta) entrywise",
            res.iter().filter(|r| r.3).count(),
            n,
        ));
        Ok(())
    });
    out.done(9, TITLES[8])
}

/// Runs one criterion by number (1..=9).
pub fn run_criterion(id: u8, cfg: &SuiteConfig, exec: Exec) -> Result<CriterionOutcome> {
    Ok(match id {
        1 => spectrum_equality(cfg),
        2 => nonphysical_census(cfg),
        3 => intertwining_residuals(cfg, exec),
        4 => annihilation(cfg, exec),
        5 => symmetries(cfg, exec),
        6 => darboux_cross_validation(cfg, exec),
        7 => hierarchy_bookkeeping(cfg),
        8 => resonant_hierarchy(cfg, exec),
        9 => property_suite(cfg, exec),
        _ => return Err(JcError::InvalidArgument(format!("no criterion {id}"))),
    })
}

pub fn run_suite(cfg: &SuiteConfig, exec: Exec) -> Result<Vec<CriterionOutcome>> {
    cfg.validate()?;
    (1..=9).map(|id| run_criterion(id, cfg, exec)).collect()
}
