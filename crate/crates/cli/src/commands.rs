use std::path::Path;

use jc_susy::darboux::{
    darboux_for_kind, darboux_from_seeds, grid_annihilation, predicted_fit, sample_eigenfunction_jet, source_params,
    w_error, DarbouxPartner, SlopeRule,
};
use jc_susy::hierarchy::{
    build_sequence, dirac_square_check, ledger, numeric_level_count, resonant_gap_ceiling, resonant_level_deficit,
    resonant_node, resonant_sequence, ChainKind, HierarchyNode,
};
use jc_susy::intertwiners::{build_intertwiner, seed_annihilation_check, symmetry_from, IntertwinerKind};
use jc_susy::models::{build_ajc, build_jc, Form, JCParams};
use jc_susy::spectra::{
    analytic_nonphysical_spectrum, analytic_physical_spectrum, numeric_spectrum, reconcile, Branch, BranchLabel,
    EigenPair,
};
use jc_susy::verification::{run_criterion, SuiteConfig};
use jc_susy::Exec;

use crate::config::{Format, RunConfig};
use crate::error::CliError;
use crate::output::{fmt_sig, write_text, Cell, Report};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Model {
    Jc,
    Ajc,
}

impl Model {
    fn name(self) -> &'static str {
        match self {
            Model::Jc => "jc",
            Model::Ajc => "ajc",
        }
    }
}

/// `psi0`, `psi1+`, `phi0`, `phi-1-`.
fn label_tag(l: &BranchLabel) -> String {
    let stem = match l.physicality {
        jc_susy::spectra::Physicality::Physical => "psi",
        jc_susy::spectra::Physicality::Nonphysical => "phi",
    };
    let b = match l.branch {
        Branch::Plus | Branch::Minus => l.branch.symbol(),
        _ => "",
    };
    format!("{stem}{}{b}", l.signed_n())
}

fn label_cells(l: &BranchLabel) -> [Cell; 3] {
    [
        l.signed_n().into(),
        l.branch.symbol().into(),
        l.physicality.name().into(),
    ]
}

/// Physical levels up to `n_cut` then the real nonphysical ones, all offset by `shift`.
/// `None` for the nonphysical part when `λ = 0` leaves it unbounded.
fn level_table(params: &JCParams, n_cut: usize, shift: f64) -> (Vec<EigenPair>, Option<Vec<EigenPair>>) {
    let phys = analytic_physical_spectrum(params, n_cut);
    let nonphys = analytic_nonphysical_spectrum(params).ok();
    let bump = |v: Vec<EigenPair>| {
        v.into_iter()
            .map(|mut e| {
                e.energy += shift;
                e
            })
            .collect()
    };
    (bump(phys), nonphys.map(bump))
}

pub fn spectrum(cfg: &RunConfig, model: Model, numeric: bool) -> Result<Report, CliError> {
    let p = cfg.params();
    // anti-JC levels are those of JC with the detuning reversed
    let jc_like = match model {
        Model::Jc => p,
        Model::Ajc => JCParams::new(-p.delta, p.lambda),
    };
    let (phys, nonphys) = level_table(&jc_like, cfg.n_max, 0.0);
    let mut cols = vec!["kind", "n", "branch", "physicality", "energy"];
    if numeric {
        cols.extend(["numeric", "delta_abs"]);
    }
    let mut rep = Report::new(&cols);
    let matches = if numeric {
        let t = cfg.truncation()?;
        let h = match model {
            Model::Jc => build_jc(&p, &t),
            Model::Ajc => build_ajc(&p, &t),
        };
        let num = numeric_spectrum(&h)?;
        let r = reconcile(&phys, &num, &jc_like, &t, cfg.tol_spectrum);
        rep.residual("max_delta_abs", r.max_delta(), cfg.tol_spectrum);
        for s in &r.spurious {
            rep.note(format!(
                "truncation edge eigenvalue {} (expected {})",
                fmt_sig(*s),
                fmt_sig(r.expected_spurious)
            ));
        }
        for s in &r.unmatched {
            rep.note(format!("unexplained numeric eigenvalue {}", fmt_sig(*s)));
        }
        if !r.is_consistent() {
            rep.passed = false;
            rep.note(format!("{} analytic levels unmatched", r.missing.len()));
        }
        Some(r.matched)
    } else {
        None
    };
    for e in &phys {
        let [n, b, ph] = label_cells(&e.label);
        let mut row = vec![model.name().into(), n, b, ph, e.energy.into()];
        if let Some(m) = &matches {
            match m.iter().find(|m| m.label == e.label) {
                Some(m) => row.extend([m.numeric.into(), m.delta_abs.into()]),
                None => row.extend([Cell::Empty, Cell::Empty]),
            }
        }
        rep.row(row);
    }
    match nonphys {
        Some(np) => {
            for e in &np {
                let [n, b, ph] = label_cells(&e.label);
                let mut row = vec![model.name().into(), n, b, ph, e.energy.into()];
                if numeric {
                    row.extend([Cell::Empty, Cell::Empty]);
                }
                rep.row(row);
            }
        }
        None => rep.note("lambda = 0: the nonphysical spectrum is unbounded and is omitted"),
    }
    Ok(rep)
}

pub fn partners(cfg: &RunConfig, kind: IntertwinerKind, exec: Exec) -> Result<Report, CliError> {
    let p = source_params(kind, &cfg.params());
    let t = cfg.truncation()?;
    let l = build_intertwiner(kind, &p, &t).map_err(|e| match e {
        jc_susy::JcError::RealityCondition { delta_sq, required } => CliError::Input(format!(
            "{kind} is possible if the parameters satisfy delta^2 >= lambda^2 \
             (delta^2 = {delta_sq}, lambda^2 = {required})"
        )),
        other => other.into(),
    })?;
    let mut rep = Report::new(&["quantity", "value"]);
    let form = |f: Form| match f {
        Form::Jc => "jc",
        Form::AntiJc => "ajc",
    };
    let rows: Vec<(&str, Cell)> = vec![
        ("kind", kind.to_string().into()),
        ("lambda", p.lambda.into()),
        ("source_form", form(l.source.form).into()),
        ("source_delta", l.source.params.delta.into()),
        ("source_shift", l.source.shift.into()),
        ("target_form", form(l.target.form).into()),
        ("target_delta", l.target.params.delta.into()),
        ("target_shift", l.target.shift.into()),
        ("shift", (l.target.shift - l.source.shift).into()),
        ("k_constant", l.constant.into()),
    ];
    for (q, v) in rows {
        rep.row(vec![q.into(), v]);
    }
    rep.residual("intertwining", l.residual()?, cfg.tol_residual);
    rep.residual("adjoint_intertwining", l.adjoint_residual()?, cfg.tol_residual);
    let s = symmetry_from(&l);
    rep.residual("symmetry_commutator", s.commutator_residual(), cfg.tol_residual);
    rep.residual("symmetry_decomposition", s.decomposition_residual(), cfg.tol_residual);
    match kind {
        IntertwinerKind::L0 | IntertwinerKind::L3 | IntertwinerKind::L4 => {
            for (lab, r) in seed_annihilation_check(kind, &p, &t)? {
                rep.residual(format!("annihilation_{}", label_tag(&lab)), r, cfg.tol_residual);
            }
        }
        _ => {
            let g = cfg.grid()?;
            for (lab, r) in grid_annihilation(kind, &cfg.params(), &g, SlopeRule::Exact, 4.0, exec)? {
                rep.residual(format!("grid_annihilation_{}", label_tag(&lab)), r, cfg.tol_grid);
            }
        }
    }
    Ok(rep)
}

/// Levels joined with `;` for a single CSV cell.
fn joined(v: &[f64]) -> Cell {
    Cell::Text(v.iter().map(|x| fmt_sig(*x)).collect::<Vec<_>>().join(";"))
}

pub fn hierarchy(cfg: &RunConfig, up: usize, down: usize, anti: bool, exec: Exec) -> Result<Report, CliError> {
    let kind = if anti { ChainKind::AntiJc } else { ChainKind::Jc };
    let seq = build_sequence(&cfg.params(), kind, up, down)?;
    let t = cfg.truncation()?;
    let mut rep = Report::new(&[
        "record",
        "index",
        "to",
        "delta",
        "lambda",
        "shift",
        "intertwiner",
        "residual",
        "gained",
        "lost",
    ]);
    for n in &seq.nodes {
        rep.row(vec![
            "node".into(),
            n.index.into(),
            Cell::Empty,
            n.params.delta.into(),
            n.params.lambda.into(),
            n.shift.into(),
            Cell::Empty,
            Cell::Empty,
            Cell::Empty,
            Cell::Empty,
        ]);
    }
    let residuals = seq.verify_steps(&t, exec)?;
    for (step, r) in seq.steps.iter().zip(residuals) {
        // ledgers read outward from node 0
        let (a, b) = if step.from.abs() < step.to.abs() {
            (step.from, step.to)
        } else {
            (step.to, step.from)
        };
        let led = ledger(seq.node(a).unwrap(), seq.node(b).unwrap(), cfg.n_max)?;
        rep.row(vec![
            "step".into(),
            a.into(),
            b.into(),
            Cell::Empty,
            Cell::Empty,
            Cell::Empty,
            step.kind.to_string().into(),
            r.into(),
            joined(&led.gained),
            joined(&led.lost),
        ]);
        rep.residual(format!("step_{}_{}", step.from, step.to), r, cfg.tol_residual);
    }
    if let Some(b) = seq.boundary {
        rep.note(format!(
            "sequence stops at n = {}: node {b} would need delta^2 >= {b} lambda^2",
            b - 1
        ));
    }
    Ok(rep)
}

pub fn resonant(cfg: &RunConfig, k_max: usize, exec: Exec) -> Result<Report, CliError> {
    let t = cfg.truncation()?;
    let lambda = cfg.lambda;
    let h = resonant_sequence(k_max, lambda, &t, exec)?;
    let ceiling = resonant_gap_ceiling(lambda, cfg.n_max as f64 / 2.0);
    let base = numeric_level_count(&resonant_node(0, lambda), &t, ceiling)?;
    let mut rep = Report::new(&[
        "k",
        "delta",
        "shift",
        "intertwiner",
        "residual",
        "square_residual",
        "deficit",
        "numeric_deficit",
    ]);
    let nodes: Vec<&HierarchyNode> = h.nodes.iter().rev().collect();
    for node in nodes {
        let k = node.index as usize;
        let sq = dirac_square_check(k, &t);
        rep.residual(format!("square_{k}"), sq, cfg.tol_residual);
        let (name, res) = match h
            .intertwiners
            .iter()
            .zip(&h.residuals)
            .find(|(l, _)| l.kind == IntertwinerKind::Resonant(k))
        {
            Some((l, r)) => {
                rep.residual(format!("{}", l.kind), *r, cfg.tol_residual);
                (Cell::from(l.kind.to_string()), Cell::from(*r))
            }
            None => (Cell::Empty, Cell::Empty),
        };
        let nk = numeric_level_count(node, &t, ceiling)?;
        let deficit = resonant_level_deficit(k, lambda, ceiling);
        if base - nk != deficit || deficit != 2 * k {
            rep.passed = false;
            rep.note(format!(
                "node {k}: deficit {deficit}, numeric {}, expected {}",
                base - nk,
                2 * k
            ));
        }
        rep.row(vec![
            k.into(),
            node.params.delta.into(),
            node.shift.into(),
            name,
            res,
            sq.into(),
            deficit.into(),
            (base - nk).into(),
        ]);
    }
    rep.note(format!("level counts below E = {}", fmt_sig(ceiling)));
    Ok(rep)
}

/// `psi0`, `psi1+`, `phi0`, `phi1-`; a nonphysical block without a sign is a double root.
pub fn parse_label(s: &str) -> Result<BranchLabel, CliError> {
    let t = s.trim().to_ascii_lowercase();
    let (phys, rest) = if let Some(r) = t.strip_prefix("psi") {
        (true, r)
    } else if let Some(r) = t.strip_prefix("phi") {
        (false, r)
    } else {
        return Err(CliError::Input(format!("seed '{s}' must start with psi or phi")));
    };
    let (digits, branch) = match rest.chars().last() {
        Some('+') => (&rest[..rest.len() - 1], Some(Branch::Plus)),
        Some('-') => (&rest[..rest.len() - 1], Some(Branch::Minus)),
        _ => (rest, None),
    };
    let n: usize = digits
        .trim_start_matches('-')
        .parse()
        .map_err(|_| CliError::Input(format!("seed '{s}': bad block index")))?;
    match (phys, branch) {
        (true, b) if n == 0 || b.is_some() => Ok(BranchLabel::physical(n, b.unwrap_or(Branch::Single))),
        (false, b) => Ok(BranchLabel::nonphysical(n, b.unwrap_or(Branch::Double))),
        _ => Err(CliError::Input(format!(
            "seed '{s}': physical levels n >= 1 need + or -"
        ))),
    }
}

pub enum DarbouxInput {
    Kind(IntertwinerKind),
    Seeds(BranchLabel, BranchLabel),
}

pub fn darboux(
    cfg: &RunConfig,
    input: DarbouxInput,
    rule: SlopeRule,
    window: f64,
    stride: usize,
    exec: Exec,
) -> Result<Report, CliError> {
    let g = cfg.grid()?;
    let stride = stride.max(1);
    let mut rep = Report::new(&["x", "w11", "w12", "w21", "w22", "dv11", "dv12", "dv21", "dv22"]);
    let partner: DarbouxPartner = match input {
        DarbouxInput::Kind(kind) => {
            let d = darboux_for_kind(kind, &cfg.params(), &g, rule, window, exec)?;
            let (pd, pl, pc) = predicted_fit(kind, &cfg.params())?;
            rep.residual("delta_fit_error", (d.fit.delta_fit - pd).abs(), cfg.tol_grid);
            rep.residual("lambda_fit_error", (d.fit.lambda_fit - pl).abs(), cfg.tol_grid);
            rep.residual("const_fit_error", (d.fit.const_fit - pc).abs(), cfg.tol_grid);
            rep.residual(
                "w_error",
                w_error(kind, &cfg.params(), &g, rule, window, exec)?,
                cfg.tol_grid,
            );
            rep.note(format!(
                "{kind}: predicted partner delta = {}, lambda = {}, c = {}",
                fmt_sig(pd),
                fmt_sig(pl),
                fmt_sig(pc)
            ));
            d
        }
        DarbouxInput::Seeds(a, b) => {
            let p = cfg.params();
            let s1 = sample_eigenfunction_jet(&a, &p, &g, exec)?;
            let s2 = sample_eigenfunction_jet(&b, &p, &g, exec)?;
            darboux_from_seeds(&s1, &s2, &p, rule, window, exec)?
        }
    };
    let f = partner.fit;
    rep.residual("template_residual", f.residual, cfg.tol_grid);
    rep.note(format!(
        "fit: delta = {}, lambda = {}, c = {} over {} points",
        fmt_sig(f.delta_fit),
        fmt_sig(f.lambda_fit),
        fmt_sig(f.const_fit),
        f.points
    ));
    let (w, dv) = (&partner.w, &partner.delta_v);
    for i in g.window(window).step_by(stride) {
        let mut row = vec![Cell::from(g.x(i))];
        for field in [w, dv] {
            let m = field.at(i);
            let vals = [m[0][0], m[0][1], m[1][0], m[1][1]];
            if field.mask[i] {
                row.extend(vals.iter().map(|_| Cell::Empty));
            } else {
                row.extend(vals.iter().map(|v| Cell::Num(v.re)));
            }
        }
        rep.row(row);
    }
    Ok(rep)
}

pub fn verify(cfg: &RunConfig, exec: Exec) -> Result<Report, CliError> {
    let suite = SuiteConfig {
        params: cfg.params(),
        n_max: cfg.n_max,
        grid: cfg.grid()?,
        ..SuiteConfig::default()
    };
    suite.validate()?;
    let mut rep = Report::new(&["criterion", "title", "passed", "checks", "failed"]);
    for id in 1..=9 {
        let o = run_criterion(id, &suite, exec)?;
        eprintln!("{}", o.summary_line());
        let failed: Vec<String> = o.failures().map(|c| c.to_string()).collect();
        for f in &failed {
            eprintln!("    {f}");
            rep.note(format!("[{id}] {f}"));
        }
        if !o.passed() {
            rep.passed = false;
        }
        rep.row(vec![
            (id as usize).into(),
            o.title.into(),
            o.passed().into(),
            o.checks.len().into(),
            failed.len().into(),
        ]);
    }
    Ok(rep)
}

/// Panel rows for one Hamiltonian: physical `n <= levels`, then nonphysical.
fn panel_rows(rep: &mut Report, fig: &str, panel: &str, params: &JCParams, shift: f64, levels: usize) {
    let (phys, nonphys) = level_table(params, levels, shift);
    for e in phys.iter().chain(nonphys.iter().flatten()) {
        let [n, b, ph] = label_cells(&e.label);
        rep.row(vec![fig.into(), panel.into(), n, b, ph, e.energy.into()]);
    }
}

pub const FIGURE_IDS: [u8; 4] = [1, 2, 3, 8];

pub fn figure(cfg: &RunConfig, id: u8, levels: usize) -> Result<Report, CliError> {
    let mut rep = Report::new(&["figure", "panel", "n", "branch", "physicality", "energy"]);
    let p = cfg.params();
    let tag = format!("fig{id}");
    match id {
        1 => panel_rows(&mut rep, &tag, "jc", &p, 0.0, levels),
        2 => {
            panel_rows(&mut rep, &tag, "jc", &p, 0.0, levels);
            panel_rows(&mut rep, &tag, "ajc", &JCParams::new(-p.delta, p.lambda), 0.0, levels);
        }
        3 => {
            for (chain, name) in [(ChainKind::Jc, "jc"), (ChainKind::AntiJc, "ajc")] {
                let seq = build_sequence(&p, chain, 1, 1)?;
                for node in &seq.nodes {
                    let panel = format!("{name}({})", node.index);
                    panel_rows(&mut rep, &tag, &panel, &node.params, node.shift, levels);
                }
            }
        }
        8 => panel_rows(&mut rep, &tag, "jc", &JCParams::new(3.0, 1.0), 0.0, levels),
        _ => return Err(CliError::Input(format!("no figure {id} (choose 1, 2, 3 or 8)"))),
    }
    Ok(rep)
}

/// Writes `figN.csv` / `figN.json` into `dir` and returns the paths.
pub fn figures(cfg: &RunConfig, ids: &[u8], levels: usize, dir: &Path) -> Result<Vec<std::path::PathBuf>, CliError> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
    let ext = match cfg.format {
        Format::Csv => "csv",
        Format::Json => "json",
    };
    let mut written = Vec::new();
    for &id in ids {
        let rep = figure(cfg, id, levels)?;
        let path = dir.join(format!("fig{id}.{ext}"));
        write_text(&path, &rep.render(cfg))?;
        written.push(path);
    }
    Ok(written)
}
