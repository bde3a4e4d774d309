//! Coordinate-space Darboux construction on a uniform grid.
//!
//! `H = −½∂² + V(x) + (λ/√2)γ∂` with
//! `V = [[½(x²+1)+δ, (λ/√2)x], [(λ/√2)x, ½(x²−1)−δ]]` and `γ = [[0, 1], [−1, 0]]`.
//! Two seed solutions form the columns of `M`; then `W = MₓM⁻¹`,
//! `L = (1/√2)(∂ − W)` annihilates both seeds and
//! `ΔV = −Wₓ − (λ/√2)[W, γ]` gives the partner potential.
//!
//! Seeds can carry their exact derivative ([`SpinorJet`]). [`SlopeRule`]
//! picks between that and second-order central differences for `Mₓ`; all other
//! derivatives are central differences with the endpoints excluded.

use std::ops::Range;

use num_complex::Complex;

use crate::error::{JcError, Result};
use crate::exec::Exec;
use crate::fock::{hermite_functions, nonphysical_functions, FockTruncation, GridAxis, SpinorFockState};
use crate::intertwiners::{build_intertwiner, IntertwinerKind, LadderForm};
use crate::models::JCParams;
use crate::spectra::{
    nonphysical_block_vector, nonphysical_root, physical_eigenpair, Branch, BranchLabel, Physicality,
};

pub type C64 = Complex<f64>;

const FRAC_1_SQRT_2: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// `|det M| <= SINGULAR_REL · (|m11 m22| + |m12 m21|)` marks a point singular.
pub const SINGULAR_REL: f64 = 1e-10;
pub const SINGULAR_RADIUS: usize = 2;
pub const MAX_SINGULAR_FRACTION: f64 = 0.05;
pub const SHAPE_TOL: f64 = 1e-4;
pub const MIN_FIT_POINTS: usize = 100;
/// Spacing above which `h_diff_apply` logs a coarse-grid warning.
pub const COARSE_SPACING: f64 = 0.1;

fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// Central difference; endpoints are left at zero and must be excluded.
fn central_diff(v: &[C64], h: f64, exec: Exec) -> Vec<C64> {
    let n = v.len();
    exec.map_range(n, |i| {
        if i == 0 || i + 1 == n {
            C64::new(0.0, 0.0)
        } else {
            (v[i + 1] - v[i - 1]) / (2.0 * h)
        }
    })
}

fn second_diff(v: &[C64], h: f64, exec: Exec) -> Vec<C64> {
    let n = v.len();
    exec.map_range(n, |i| {
        if i == 0 || i + 1 == n {
            C64::new(0.0, 0.0)
        } else {
            (v[i + 1] - v[i] * 2.0 + v[i - 1]) / (h * h)
        }
    })
}

/// Spinor samples `(upper, lower)` on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinorGridFn {
    pub grid: GridAxis,
    pub upper: Vec<C64>,
    pub lower: Vec<C64>,
}

impl SpinorGridFn {
    pub fn new(grid: GridAxis, upper: Vec<C64>, lower: Vec<C64>) -> Result<Self> {
        if upper.len() != grid.points() || lower.len() != grid.points() {
            return Err(JcError::DimensionMismatch(format!(
                "grid has {} points, samples have {} and {}",
                grid.points(),
                upper.len(),
                lower.len()
            )));
        }
        if upper
            .iter()
            .chain(&lower)
            .any(|v| !v.re.is_finite() || !v.im.is_finite())
        {
            return Err(JcError::InvalidArgument("non-finite spinor samples".into()));
        }
        Ok(Self { grid, upper, lower })
    }

    pub fn zeros(grid: GridAxis) -> Self {
        let z = vec![c(0.0); grid.points()];
        Self {
            grid,
            upper: z.clone(),
            lower: z,
        }
    }

    pub fn at(&self, i: usize) -> [C64; 2] {
        [self.upper[i], self.lower[i]]
    }

    /// Central-difference derivative; endpoints are zero.
    pub fn derivative(&self, exec: Exec) -> Self {
        let h = self.grid.spacing();
        Self {
            grid: self.grid,
            upper: central_diff(&self.upper, h, exec),
            lower: central_diff(&self.lower, h, exec),
        }
    }

    pub fn scaled(&self, f: C64) -> Self {
        Self {
            grid: self.grid,
            upper: self.upper.iter().map(|v| v * f).collect(),
            lower: self.lower.iter().map(|v| v * f).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        if self.grid != other.grid {
            return Err(JcError::DimensionMismatch("spinors live on different grids".into()));
        }
        Ok(Self {
            grid: self.grid,
            upper: self.upper.iter().zip(&other.upper).map(|(a, b)| a - b).collect(),
            lower: self.lower.iter().zip(&other.lower).map(|(a, b)| a - b).collect(),
        })
    }

    /// Pointwise spinor magnitude `√(|u|² + |l|²)`.
    pub fn magnitude(&self, i: usize) -> f64 {
        self.upper[i].norm().hypot(self.lower[i].norm())
    }

    /// `max |component|` over `window`.
    pub fn sup_norm(&self, window: Range<usize>) -> f64 {
        window.fold(0.0_f64, |acc, i| {
            acc.max(self.upper[i].norm()).max(self.lower[i].norm())
        })
    }

    /// `max |self(x)| / |reference(x)|` over `window`; for exponentially growing
    /// functions where an absolute norm only sees the window edges.
    pub fn relative_sup(&self, reference: &Self, window: Range<usize>) -> f64 {
        window.fold(0.0_f64, |acc, i| {
            let r = reference.magnitude(i);
            if r == 0.0 {
                acc
            } else {
                acc.max(self.magnitude(i) / r)
            }
        })
    }
}

/// Samples together with their exact first derivative.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinorJet {
    pub value: SpinorGridFn,
    pub slope: SpinorGridFn,
}

/// Eigenvalue of a labelled eigenfunction of `H_JC(δ, λ)`.
pub fn eigen_energy(label: &BranchLabel, params: &JCParams) -> Result<f64> {
    match label.physicality {
        Physicality::Physical => Ok(physical_eigenpair(params, label.n, label.branch).energy),
        Physicality::Nonphysical => {
            if label.n == 0 {
                return Ok(params.delta);
            }
            let r = nonphysical_root(params, label.n).ok_or_else(|| reality_error(params, label.n))?;
            let sign = if label.branch == Branch::Minus { -1.0 } else { 1.0 };
            Ok(-(label.n as f64) + sign * r)
        }
    }
}

fn reality_error(params: &JCParams, m: usize) -> JcError {
    JcError::RealityCondition {
        delta_sq: params.delta * params.delta,
        required: m as f64 * params.lambda * params.lambda,
    }
}

/// `(c₁, c₂)` with `c₁ = 1` for nonphysical blocks, unit norm for physical ones.
fn label_coeffs(label: &BranchLabel, params: &JCParams) -> Result<(f64, f64)> {
    match label.physicality {
        Physicality::Physical => Ok(physical_eigenpair(params, label.n, label.branch).coeffs),
        Physicality::Nonphysical => {
            if label.n == 0 {
                return Ok((1.0, 0.0));
            }
            params.require_coupling()?;
            let (a, b) = nonphysical_block_vector(params, label.n, label.branch)
                .ok_or_else(|| reality_error(params, label.n))?;
            Ok((1.0, b / a))
        }
    }
}

/// Samples an eigenfunction and its exact derivative.
///
/// Physical block `n` is `c₁ψₙ₋₁` (upper) and `c₂ψₙ` (lower); nonphysical block
/// `m` is `(χₘ, c χₘ₋₁)` in the real convention, `Φ₀⁺ = (χ₀, 0)`.
pub fn sample_eigenfunction_jet(
    label: &BranchLabel,
    params: &JCParams,
    grid: &GridAxis,
    exec: Exec,
) -> Result<SpinorJet> {
    let (c1, c2) = label_coeffs(label, params)?;
    let n = label.n;
    let pts: Vec<Result<[f64; 4]>> = match label.physicality {
        Physicality::Physical => exec.map_range(grid.points(), |i| {
            let x = grid.x(i);
            let psi = hermite_functions(n + 1, x)?;
            let d = |k: usize| {
                let down = if k > 0 { (k as f64).sqrt() * psi[k - 1] } else { 0.0 };
                (down - ((k + 1) as f64).sqrt() * psi[k + 1]) * FRAC_1_SQRT_2
            };
            let (u, du) = if n >= 1 { (psi[n - 1], d(n - 1)) } else { (0.0, 0.0) };
            Ok([c1 * u, c2 * psi[n], c1 * du, c2 * d(n)])
        }),
        Physicality::Nonphysical => exec.map_range(grid.points(), |i| {
            let x = grid.x(i);
            let chi = nonphysical_functions(n.max(1), x)?;
            let d = |k: usize| {
                let down = if k > 0 {
                    (2.0 * k as f64).sqrt() * chi[k - 1]
                } else {
                    0.0
                };
                x * chi[k] + down
            };
            if n == 0 {
                Ok([chi[0], 0.0, d(0), 0.0])
            } else {
                Ok([chi[n], c2 * chi[n - 1], d(n), c2 * d(n - 1)])
            }
        }),
    };
    let mut cols = [
        Vec::with_capacity(grid.points()),
        Vec::with_capacity(grid.points()),
        Vec::with_capacity(grid.points()),
        Vec::with_capacity(grid.points()),
    ];
    for p in pts {
        let p = p?;
        for (col, v) in cols.iter_mut().zip(p) {
            col.push(c(v));
        }
    }
    let [u, l, du, dl] = cols;
    Ok(SpinorJet {
        value: SpinorGridFn::new(*grid, u, l)?,
        slope: SpinorGridFn::new(*grid, du, dl)?,
    })
}

pub fn sample_eigenfunction(
    label: &BranchLabel,
    params: &JCParams,
    grid: &GridAxis,
    exec: Exec,
) -> Result<SpinorGridFn> {
    Ok(sample_eigenfunction_jet(label, params, grid, exec)?.value)
}

/// `Σₙ (uₙψₙ(x), lₙψₙ(x))` for a truncated Fock state.
pub fn sample_fock_state(state: &SpinorFockState, grid: &GridAxis, exec: Exec) -> Result<SpinorGridFn> {
    let n_max = state.truncation().n_max();
    let pts: Vec<Result<(f64, f64)>> = exec.map_range(grid.points(), |i| {
        let psi = hermite_functions(n_max, grid.x(i))?;
        let u = state.upper().iter().zip(&psi).map(|(a, b)| a * b).sum();
        let l = state.lower().iter().zip(&psi).map(|(a, b)| a * b).sum();
        Ok((u, l))
    });
    let mut upper = Vec::with_capacity(grid.points());
    let mut lower = Vec::with_capacity(grid.points());
    for p in pts {
        let (u, l) = p?;
        upper.push(c(u));
        lower.push(c(l));
    }
    SpinorGridFn::new(*grid, upper, lower)
}

/// `V(x)` entries `(v11, v12, v22)`; `v21 = v12`.
fn potential_at(params: &JCParams, x: f64) -> (f64, f64, f64) {
    let off = params.lambda * FRAC_1_SQRT_2 * x;
    (
        0.5 * (x * x + 1.0) + params.delta,
        off,
        0.5 * (x * x - 1.0) - params.delta,
    )
}

/// `−½ψ'' + Vψ + (λ/√2)γψ'` by central differences; endpoints are zero.
pub fn h_diff_apply(params: &JCParams, psi: &SpinorGridFn, exec: Exec) -> SpinorGridFn {
    let grid = psi.grid;
    let h = grid.spacing();
    if h > COARSE_SPACING {
        log::warn!("grid spacing {h} exceeds {COARSE_SPACING}; finite differences are unreliable");
    }
    let du = central_diff(&psi.upper, h, exec);
    let dl = central_diff(&psi.lower, h, exec);
    let d2u = second_diff(&psi.upper, h, exec);
    let d2l = second_diff(&psi.lower, h, exec);
    let g = params.lambda * FRAC_1_SQRT_2;
    let n = grid.points();
    let out: Vec<(C64, C64)> = exec.map_range(n, |i| {
        if i == 0 || i + 1 == n {
            return (c(0.0), c(0.0));
        }
        let (v11, v12, v22) = potential_at(params, grid.x(i));
        let (u, l) = (psi.upper[i], psi.lower[i]);
        let hu = -0.5 * d2u[i] + u * v11 + l * v12 + dl[i] * g;
        let hl = -0.5 * d2l[i] + u * v12 + l * v22 - du[i] * g;
        (hu, hl)
    });
    let (upper, lower) = out.into_iter().unzip();
    SpinorGridFn { grid, upper, lower }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenResidual {
    pub sup: f64,
    /// `sup / h²`.
    pub constant: f64,
    /// Residual divided pointwise by `|Ψ(x)|` (nonphysical seeds).
    pub relative: bool,
}

/// `‖H_diff Ψ − εΨ‖∞` on `|x| <= half_width`; relative for nonphysical labels.
pub fn eigen_residual(
    label: &BranchLabel,
    params: &JCParams,
    grid: &GridAxis,
    half_width: f64,
    exec: Exec,
) -> Result<EigenResidual> {
    let psi = sample_eigenfunction(label, params, grid, exec)?;
    let e = eigen_energy(label, params)?;
    let r = h_diff_apply(params, &psi, exec).sub(&psi.scaled(c(e)))?;
    let window = grid.window(half_width);
    let relative = label.physicality == Physicality::Nonphysical;
    let sup = if relative {
        r.relative_sup(&psi, window)
    } else {
        r.sup_norm(window)
    };
    let h = grid.spacing();
    Ok(EigenResidual {
        sup,
        constant: sup / (h * h),
        relative,
    })
}

/// Four complex sample arrays `[[m11, m12], [m21, m22]]` plus an exclusion mask.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixField {
    pub grid: GridAxis,
    pub m11: Vec<C64>,
    pub m12: Vec<C64>,
    pub m21: Vec<C64>,
    pub m22: Vec<C64>,
    /// `true` where the point is excluded (singular, or an endpoint).
    pub mask: Vec<bool>,
}

impl MatrixField {
    pub fn from_fn<F>(grid: GridAxis, exec: Exec, f: F) -> Self
    where
        F: Fn(usize, f64) -> [[C64; 2]; 2] + Sync + Send,
    {
        let vals = exec.map_range(grid.points(), |i| f(i, grid.x(i)));
        let mut out = Self {
            grid,
            m11: Vec::with_capacity(vals.len()),
            m12: Vec::with_capacity(vals.len()),
            m21: Vec::with_capacity(vals.len()),
            m22: Vec::with_capacity(vals.len()),
            mask: vec![false; vals.len()],
        };
        for v in vals {
            out.m11.push(v[0][0]);
            out.m12.push(v[0][1]);
            out.m21.push(v[1][0]);
            out.m22.push(v[1][1]);
        }
        out
    }

    pub fn at(&self, i: usize) -> [[C64; 2]; 2] {
        [[self.m11[i], self.m12[i]], [self.m21[i], self.m22[i]]]
    }

    /// Central-difference derivative; endpoints and neighbours of masked points
    /// are masked.
    pub fn derivative(&self, exec: Exec) -> Self {
        let h = self.grid.spacing();
        let n = self.grid.points();
        let mask = (0..n)
            .map(|i| i == 0 || i + 1 == n || self.mask[i - 1] || self.mask[i] || self.mask[i + 1])
            .collect();
        Self {
            grid: self.grid,
            m11: central_diff(&self.m11, h, exec),
            m12: central_diff(&self.m12, h, exec),
            m21: central_diff(&self.m21, h, exec),
            m22: central_diff(&self.m22, h, exec),
            mask,
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.grid != other.grid {
            return Err(JcError::DimensionMismatch("fields live on different grids".into()));
        }
        let z = |a: &[C64], b: &[C64]| a.iter().zip(b).map(|(x, y)| x + y).collect();
        Ok(Self {
            grid: self.grid,
            m11: z(&self.m11, &other.m11),
            m12: z(&self.m12, &other.m12),
            m21: z(&self.m21, &other.m21),
            m22: z(&self.m22, &other.m22),
            mask: self.mask.iter().zip(&other.mask).map(|(a, b)| *a || *b).collect(),
        })
    }

    /// Indices of `window` that are not masked.
    pub fn usable(&self, window: Range<usize>) -> Vec<usize> {
        window.filter(|&i| !self.mask[i]).collect()
    }

    /// `max |self − f(x)|` entrywise over unmasked points of `window`.
    pub fn sup_distance<F>(&self, window: Range<usize>, f: F) -> f64
    where
        F: Fn(f64) -> [[C64; 2]; 2],
    {
        self.usable(window).into_iter().fold(0.0_f64, |acc, i| {
            let a = self.at(i);
            let b = f(self.grid.x(i));
            let mut worst = acc;
            for r in 0..2 {
                for s in 0..2 {
                    worst = worst.max((a[r][s] - b[r][s]).norm());
                }
            }
            worst
        })
    }

    pub fn masked_fraction(&self) -> f64 {
        let interior = self.grid.interior();
        let total = interior.len();
        let masked = interior.filter(|&i| self.mask[i]).count();
        masked as f64 / total as f64
    }
}

/// `M = (seed₁ | seed₂)` with `det M` and, for jets, the exact `Mₓ`.
#[derive(Debug, Clone, PartialEq)]
pub struct SeedMatrix {
    pub m: MatrixField,
    pub m_x: Option<MatrixField>,
    pub det: Vec<C64>,
}

fn columns(a: &SpinorGridFn, b: &SpinorGridFn, exec: Exec) -> MatrixField {
    MatrixField::from_fn(a.grid, exec, |i, _| {
        [[a.upper[i], b.upper[i]], [a.lower[i], b.lower[i]]]
    })
}

/// Builds `M` and flags near-singular points (plus a two-point radius).
pub fn build_m(seed1: &SpinorGridFn, seed2: &SpinorGridFn, exec: Exec) -> Result<SeedMatrix> {
    if seed1.grid != seed2.grid {
        return Err(JcError::DimensionMismatch("seeds live on different grids".into()));
    }
    let mut m = columns(seed1, seed2, exec);
    let n = m.grid.points();
    let det: Vec<C64> = exec.map_range(n, |i| m.m11[i] * m.m22[i] - m.m12[i] * m.m21[i]);
    let singular: Vec<bool> = (0..n)
        .map(|i| {
            let scale = (m.m11[i] * m.m22[i]).norm() + (m.m12[i] * m.m21[i]).norm();
            det[i].norm() <= SINGULAR_REL * scale
        })
        .collect();
    if singular.iter().all(|s| *s) {
        return Err(JcError::ProportionalSeeds);
    }
    for (i, s) in singular.iter().enumerate() {
        if *s {
            let lo = i.saturating_sub(SINGULAR_RADIUS);
            let hi = (i + SINGULAR_RADIUS).min(n - 1);
            for j in lo..=hi {
                m.mask[j] = true;
            }
        }
    }
    Ok(SeedMatrix { m, m_x: None, det })
}

pub fn build_m_from_jets(seed1: &SpinorJet, seed2: &SpinorJet, exec: Exec) -> Result<SeedMatrix> {
    let mut sm = build_m(&seed1.value, &seed2.value, exec)?;
    let mut m_x = columns(&seed1.slope, &seed2.slope, exec);
    m_x.mask = sm.m.mask.clone();
    sm.m_x = Some(m_x);
    Ok(sm)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SlopeRule {
    /// Use the analytic seed derivatives carried by the jets.
    Exact,
    /// Second-order central differences of `M`.
    CentralDifference,
}

/// `W = Mₓ M⁻¹` pointwise on unmasked points.
pub fn build_w(seeds: &SeedMatrix, rule: SlopeRule, exec: Exec) -> Result<MatrixField> {
    let m = &seeds.m;
    let m_x = match rule {
        SlopeRule::Exact => seeds.m_x.clone().ok_or(JcError::MissingSlope)?,
        SlopeRule::CentralDifference => m.derivative(exec),
    };
    let mut w = MatrixField::from_fn(m.grid, exec, |i, _| {
        if m_x.mask[i] || m.mask[i] {
            return [[c(0.0); 2]; 2];
        }
        let [[a, b], [cc, d]] = m.at(i);
        let det = seeds.det[i];
        let inv = [[d / det, -b / det], [-cc / det, a / det]];
        let dx = m_x.at(i);
        let mut out = [[c(0.0); 2]; 2];
        for r in 0..2 {
            for s in 0..2 {
                out[r][s] = dx[r][0] * inv[0][s] + dx[r][1] * inv[1][s];
            }
        }
        out
    });
    w.mask = m.mask.iter().zip(&m_x.mask).map(|(a, b)| *a || *b).collect();
    // endpoints are not interior points, so the stencil mask costs nothing here
    let fraction = w.masked_fraction();
    if fraction > MAX_SINGULAR_FRACTION {
        return Err(JcError::SingularWindow {
            fraction: 100.0 * fraction,
        });
    }
    Ok(w)
}

/// `ΔV = −Wₓ − (λ/√2)[W, γ]`.
pub fn delta_v(w: &MatrixField, lambda: f64, exec: Exec) -> MatrixField {
    let wx = w.derivative(exec);
    let g = lambda * FRAC_1_SQRT_2;
    let mut out = MatrixField::from_fn(w.grid, exec, |i, _| {
        let [[a, b], [cc, d]] = w.at(i);
        // [W, γ] = [[−b − c, a − d], [a − d, b + c]]
        let comm = [[-b - cc, a - d], [a - d, b + cc]];
        let dx = wx.at(i);
        let mut v = [[c(0.0); 2]; 2];
        for r in 0..2 {
            for s in 0..2 {
                v[r][s] = -dx[r][s] - comm[r][s] * g;
            }
        }
        v
    });
    out.mask = wx.mask;
    out
}

/// `V(x)` of `H_JC(δ, λ)` sampled on the grid.
pub fn base_potential(params: &JCParams, grid: &GridAxis, exec: Exec) -> MatrixField {
    MatrixField::from_fn(*grid, exec, |_, x| {
        let (v11, v12, v22) = potential_at(params, x);
        [[c(v11), c(v12)], [c(v12), c(v22)]]
    })
}

/// Best fit of `Ṽ` to `[[½(x²+1)+δ̃+c, (λ̃/√2)x], [(λ̃/√2)x, ½(x²−1)−δ̃+c]]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShapeFit {
    pub delta_fit: f64,
    pub lambda_fit: f64,
    pub const_fit: f64,
    /// Largest entrywise deviation from the fitted template.
    pub residual: f64,
    pub points: usize,
}

/// Least-squares template fit without the shape-invariance threshold.
pub fn fit_template(v: &MatrixField, window: Range<usize>) -> Result<ShapeFit> {
    let idx = v.usable(window);
    if idx.len() < MIN_FIT_POINTS {
        return Err(JcError::TooFewPoints(idx.len()));
    }
    let nf = idx.len() as f64;
    // the template separates: diagonals fix δ̃ ± c, off-diagonals fix λ̃
    let (mut s11, mut s22, mut sxo, mut sxx) = (0.0, 0.0, 0.0, 0.0);
    for &i in &idx {
        let x = v.grid.x(i);
        s11 += v.m11[i].re - 0.5 * (x * x + 1.0);
        s22 += v.m22[i].re - 0.5 * (x * x - 1.0);
        sxo += x * (v.m12[i].re + v.m21[i].re);
        sxx += x * x;
    }
    let p = s11 / nf;
    let q = s22 / nf;
    let delta_fit = 0.5 * (p - q);
    let const_fit = 0.5 * (p + q);
    let lambda_fit = if sxx > 0.0 {
        sxo / (std::f64::consts::SQRT_2 * sxx)
    } else {
        0.0
    };
    let template = |x: f64| {
        let o = lambda_fit * FRAC_1_SQRT_2 * x;
        [
            [c(0.5 * (x * x + 1.0) + delta_fit + const_fit), c(o)],
            [c(o), c(0.5 * (x * x - 1.0) - delta_fit + const_fit)],
        ]
    };
    let residual = idx.iter().fold(0.0_f64, |acc, &i| {
        let a = v.at(i);
        let b = template(v.grid.x(i));
        let mut w = acc;
        for r in 0..2 {
            for s in 0..2 {
                w = w.max((a[r][s] - b[r][s]).norm());
            }
        }
        w
    });
    Ok(ShapeFit {
        delta_fit,
        lambda_fit,
        const_fit,
        residual,
        points: idx.len(),
    })
}

/// [`fit_template`] that rejects a residual above [`SHAPE_TOL`].
pub fn fit_shape(v: &MatrixField, window: Range<usize>) -> Result<ShapeFit> {
    let fit = fit_template(v, window)?;
    if fit.residual > SHAPE_TOL {
        return Err(JcError::NotShapeInvariant { residual: fit.residual });
    }
    Ok(fit)
}

/// `σ/√2 (ψ' − Wψ)` from values and slopes.
pub fn apply_first_order(
    w: &MatrixField,
    sigma: f64,
    value: &SpinorGridFn,
    slope: &SpinorGridFn,
    exec: Exec,
) -> SpinorGridFn {
    let f = sigma * FRAC_1_SQRT_2;
    let out: Vec<(C64, C64)> = exec.map_range(w.grid.points(), |i| {
        if w.mask[i] {
            return (c(0.0), c(0.0));
        }
        let [[a, b], [cc, d]] = w.at(i);
        let (u, l) = (value.upper[i], value.lower[i]);
        (
            (slope.upper[i] - a * u - b * l) * f,
            (slope.lower[i] - cc * u - d * l) * f,
        )
    });
    let (upper, lower) = out.into_iter().unzip();
    SpinorGridFn {
        grid: w.grid,
        upper,
        lower,
    }
}

/// Ladder operator through `a∓ = (x ± ∂)/√2`, given values and slopes.
pub fn apply_ladder(form: &LadderForm, value: &SpinorGridFn, slope: &SpinorGridFn, exec: Exec) -> SpinorGridFn {
    let grid = value.grid;
    let out: Vec<(C64, C64)> = exec.map_range(grid.points(), |i| {
        let x = grid.x(i);
        let v = value.at(i);
        let s = slope.at(i);
        let re = form.apply_point(x, [v[0].re, v[1].re], [s[0].re, s[1].re]);
        let im = form.apply_point(x, [v[0].im, v[1].im], [s[0].im, s[1].im]);
        (C64::new(re[0], im[0]), C64::new(re[1], im[1]))
    });
    let (upper, lower) = out.into_iter().unzip();
    SpinorGridFn { grid, upper, lower }
}

/// Seeds whose `M` reproduces each operator kind.
pub fn seed_pair(kind: IntertwinerKind) -> (BranchLabel, BranchLabel) {
    let psi0 = BranchLabel::physical(0, Branch::Single);
    let phi0 = BranchLabel::nonphysical(0, Branch::Single);
    match kind {
        IntertwinerKind::L0 => (psi0, phi0),
        IntertwinerKind::L1 | IntertwinerKind::Resonant(_) => (phi0, BranchLabel::nonphysical(1, Branch::Minus)),
        IntertwinerKind::L2 => (phi0, BranchLabel::nonphysical(1, Branch::Plus)),
        IntertwinerKind::L3 => (psi0, BranchLabel::physical(1, Branch::Plus)),
        IntertwinerKind::L4 => (psi0, BranchLabel::physical(1, Branch::Minus)),
    }
}

/// Source parameters for a kind: `(λ√k, λ)` for `Lk`, `params` otherwise.
pub fn source_params(kind: IntertwinerKind, params: &JCParams) -> JCParams {
    match kind {
        IntertwinerKind::Resonant(k) => JCParams::new(params.lambda * (k as f64).sqrt(), params.lambda),
        _ => *params,
    }
}

/// Closed-form partner `(δ̃, λ̃, c)` expected from each kind's seed pair.
pub fn predicted_fit(kind: IntertwinerKind, params: &JCParams) -> Result<(f64, f64, f64)> {
    let p = source_params(kind, params);
    if kind == IntertwinerKind::L0 {
        return Ok((p.delta - 1.0, -p.lambda, 0.0));
    }
    let l = build_intertwiner(kind, &p, &FockTruncation::new(2)?)?;
    // the resonant target carries the +k shift of the hierarchy, the seeds do not
    let shift = l.target.shift - l.source.shift;
    Ok((l.target.params.delta, p.lambda, shift))
}

/// `W`, `ΔV`, `Ṽ = V + ΔV` and its template fit for one seed pair.
#[derive(Debug, Clone, PartialEq)]
pub struct DarbouxPartner {
    pub w: MatrixField,
    pub delta_v: MatrixField,
    pub v_tilde: MatrixField,
    pub fit: ShapeFit,
}

pub fn darboux_from_seeds(
    seed1: &SpinorJet,
    seed2: &SpinorJet,
    params: &JCParams,
    rule: SlopeRule,
    half_width: f64,
    exec: Exec,
) -> Result<DarbouxPartner> {
    let grid = seed1.value.grid;
    let m = build_m_from_jets(seed1, seed2, exec)?;
    let w = build_w(&m, rule, exec)?;
    let dv = delta_v(&w, params.lambda, exec);
    let v_tilde = base_potential(params, &grid, exec).add(&dv)?;
    let fit = fit_template(&v_tilde, grid.window(half_width))?;
    Ok(DarbouxPartner {
        w,
        delta_v: dv,
        v_tilde,
        fit,
    })
}

/// Darboux partner from the standard seed pair of `kind`.
pub fn darboux_for_kind(
    kind: IntertwinerKind,
    params: &JCParams,
    grid: &GridAxis,
    rule: SlopeRule,
    half_width: f64,
    exec: Exec,
) -> Result<DarbouxPartner> {
    let p = source_params(kind, params);
    let (a, b) = seed_pair(kind);
    let s1 = sample_eigenfunction_jet(&a, &p, grid, exec)?;
    let s2 = sample_eigenfunction_jet(&b, &p, grid, exec)?;
    darboux_from_seeds(&s1, &s2, &p, rule, half_width, exec)
}

/// `max |W − W_pred|` on `|x| <= half_width`, `W_pred` read off the operator.
pub fn w_error(
    kind: IntertwinerKind,
    params: &JCParams,
    grid: &GridAxis,
    rule: SlopeRule,
    half_width: f64,
    exec: Exec,
) -> Result<f64> {
    let p = source_params(kind, params);
    let (a, b) = seed_pair(kind);
    let s1 = sample_eigenfunction_jet(&a, &p, grid, exec)?;
    let s2 = sample_eigenfunction_jet(&b, &p, grid, exec)?;
    let w = build_w(&build_m_from_jets(&s1, &s2, exec)?, rule, exec)?;
    let form = ladder_form_for(kind, &p)?;
    form.sign()?;
    Ok(w.sup_distance(grid.window(half_width), |x| {
        let pw = form.predicted_w(x).expect("sign checked");
        [[c(pw[0][0]), c(pw[0][1])], [c(pw[1][0]), c(pw[1][1])]]
    }))
}

fn ladder_form_for(kind: IntertwinerKind, params: &JCParams) -> Result<LadderForm> {
    Ok(build_intertwiner(kind, params, &FockTruncation::new(2)?)?.ladder_form())
}

/// Relative `‖L·seed‖∞` for both seeds of `kind`, `L` in ladder form.
pub fn grid_annihilation(
    kind: IntertwinerKind,
    params: &JCParams,
    grid: &GridAxis,
    rule: SlopeRule,
    half_width: f64,
    exec: Exec,
) -> Result<Vec<(BranchLabel, f64)>> {
    let p = source_params(kind, params);
    let form = ladder_form_for(kind, &p)?;
    let (a, b) = seed_pair(kind);
    let window = grid.window(half_width);
    [a, b]
        .into_iter()
        .map(|label| {
            let jet = sample_eigenfunction_jet(&label, &p, grid, exec)?;
            let slope = match rule {
                SlopeRule::Exact => jet.slope.clone(),
                SlopeRule::CentralDifference => jet.value.derivative(exec),
            };
            let img = apply_ladder(&form, &jet.value, &slope, exec);
            Ok((label, img.relative_sup(&jet.value, window.clone())))
        })
        .collect()
}

/// `max ‖L_W Ψ − sample(L·Ψ)‖∞` over physical `Ψₙ±`, `n <= n_top`.
///
/// `L_W = (σ/√2)(∂ − W)` with `W` from the kind's seed pair and `Ψ'` by central
/// differences; the reference is the Fock-space image sampled on the grid.
pub fn operator_agreement(
    kind: IntertwinerKind,
    params: &JCParams,
    grid: &GridAxis,
    rule: SlopeRule,
    n_top: usize,
    half_width: f64,
    exec: Exec,
) -> Result<f64> {
    let p = source_params(kind, params);
    let (a, b) = seed_pair(kind);
    let s1 = sample_eigenfunction_jet(&a, &p, grid, exec)?;
    let s2 = sample_eigenfunction_jet(&b, &p, grid, exec)?;
    let w = build_w(&build_m_from_jets(&s1, &s2, exec)?, rule, exec)?;
    let trunc = FockTruncation::new(n_top + 3)?;
    let l = build_intertwiner(kind, &p, &trunc)?;
    let sigma = l.ladder_form().sign()?;
    let window = grid.window(half_width);
    let mut worst = 0.0_f64;
    for n in 0..=n_top {
        let branches: &[Branch] = if n == 0 {
            &[Branch::Single]
        } else {
            &[Branch::Minus, Branch::Plus]
        };
        for &br in branches {
            let e = physical_eigenpair(&p, n, br);
            let v = e.fock_state(&trunc)?;
            let psi = sample_fock_state(&v, grid, exec)?;
            let grid_img = apply_first_order(&w, sigma, &psi, &psi.derivative(exec), exec);
            let fock_img = sample_fock_state(&v.apply(&l.matrix)?, grid, exec)?;
            let d = grid_img.sub(&fock_img)?;
            let usable: Vec<usize> = w.usable(window.clone());
            let err = usable
                .iter()
                .fold(0.0_f64, |acc, &i| acc.max(d.upper[i].norm()).max(d.lower[i].norm()));
            worst = worst.max(err);
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    const BASE: JCParams = JCParams {
        delta: 3.0,
        lambda: 1.25,
    };

    fn grid() -> GridAxis {
        GridAxis::default()
    }

    #[test]
    fn ground_and_phi0_samples() {
        let g = grid();
        let ex = Exec::default();
        let psi = sample_eigenfunction(&BranchLabel::physical(0, Branch::Single), &BASE, &g, ex).unwrap();
        let mid = 1000;
        assert_eq!(psi.upper[mid], c(0.0));
        assert_abs_diff_eq!(psi.lower[mid].re, std::f64::consts::PI.powf(-0.25), epsilon = 1e-15);
        let phi = sample_eigenfunction(&BranchLabel::nonphysical(0, Branch::Single), &BASE, &g, ex).unwrap();
        assert!(phi.lower.iter().all(|v| *v == c(0.0)));
        // φ₋₁(x) = π^(−1/4) e^(x²/2)
        let x = g.x(1500);
        assert_abs_diff_eq!(
            phi.upper[1500].re,
            std::f64::consts::PI.powf(-0.25) * (x * x / 2.0).exp(),
            epsilon = 1e-12
        );
    }

    #[test]
    fn phi_minus1_minus_coefficients() {
        let g = grid();
        let s = sample_eigenfunction(&BranchLabel::nonphysical(1, Branch::Minus), &BASE, &g, Exec::default()).unwrap();
        let i = 1200;
        let x = g.x(i);
        let chi = nonphysical_functions(1, x).unwrap();
        assert_abs_diff_eq!(s.upper[i].re, chi[1], epsilon = 1e-12);
        assert_abs_diff_eq!(s.lower[i].re / chi[0], -4.581742422927143, epsilon = 1e-12);
        let bad = sample_eigenfunction(&BranchLabel::nonphysical(6, Branch::Minus), &BASE, &g, Exec::default());
        assert!(matches!(bad, Err(JcError::RealityCondition { .. })));
    }

    #[test]
    fn jets_match_finite_differences() {
        let g = grid();
        for label in [
            BranchLabel::physical(3, Branch::Plus),
            BranchLabel::nonphysical(2, Branch::Plus),
        ] {
            let j = sample_eigenfunction_jet(&label, &BASE, &g, Exec::default()).unwrap();
            let fd = j.value.derivative(Exec::default());
            let err = fd.sub(&j.slope).unwrap().relative_sup(&j.value, g.window(3.0));
            assert!(err < 1e-3, "{label:?}: {err:e}");
        }
    }

    #[test]
    fn seeds_are_eigenfunctions() {
        let g = grid();
        for label in [
            BranchLabel::physical(0, Branch::Single),
            BranchLabel::physical(2, Branch::Minus),
            BranchLabel::nonphysical(0, Branch::Single),
            BranchLabel::nonphysical(1, Branch::Minus),
            BranchLabel::nonphysical(1, Branch::Plus),
        ] {
            let r = eigen_residual(&label, &BASE, &g, 4.0, Exec::default()).unwrap();
            assert!(r.constant < 50.0, "{label:?}: C = {}", r.constant);
        }
    }

    #[test]
    fn decoupled_h_diff() {
        let g = grid();
        let p = JCParams::new(0.7, 0.0);
        let ex = Exec::default();
        let psi2 = sample_fock_state(
            &crate::fock::embed_spinor(crate::fock::Level::Upper, 2, &FockTruncation::new(4).unwrap()).unwrap(),
            &g,
            ex,
        )
        .unwrap();
        let r = h_diff_apply(&p, &psi2, ex).sub(&psi2.scaled(c(3.0 + 0.7))).unwrap();
        assert!(r.sup_norm(g.window(4.0)) < 1e-4);
    }

    #[test]
    fn proportional_seeds_rejected() {
        let g = grid();
        let s = sample_eigenfunction(&BranchLabel::physical(0, Branch::Single), &BASE, &g, Exec::default()).unwrap();
        assert_eq!(
            build_m(&s, &s.scaled(c(2.0)), Exec::default()),
            Err(JcError::ProportionalSeeds)
        );
    }

    #[test]
    fn l0_det_is_constant() {
        let g = grid();
        let ex = Exec::default();
        let (a, b) = seed_pair(IntertwinerKind::L0);
        let m = build_m(
            &sample_eigenfunction(&a, &BASE, &g, ex).unwrap(),
            &sample_eigenfunction(&b, &BASE, &g, ex).unwrap(),
            ex,
        )
        .unwrap();
        let expected = -1.0 / std::f64::consts::PI.sqrt();
        for d in &m.det {
            assert!((d.re - expected).abs() < 1e-12 * expected.abs());
        }
        assert!(m.m.mask.iter().all(|v| !v));
    }

    #[test]
    fn exact_w_for_standard_pairs() {
        let g = grid();
        for kind in IntertwinerKind::FIXED {
            let e = w_error(kind, &BASE, &g, SlopeRule::Exact, 4.0, Exec::default()).unwrap();
            assert!(e <= 1e-8, "{kind}: {e:e}");
        }
        let e = w_error(
            IntertwinerKind::Resonant(4),
            &JCParams::new(0.0, 1.0),
            &g,
            SlopeRule::Exact,
            4.0,
            Exec::default(),
        )
        .unwrap();
        assert!(e <= 1e-8);
    }

    #[test]
    fn fd_w_converges_quadratically() {
        let g = grid();
        let e1 = w_error(
            IntertwinerKind::L0,
            &BASE,
            &g,
            SlopeRule::CentralDifference,
            4.0,
            Exec::default(),
        )
        .unwrap();
        let e2 = w_error(
            IntertwinerKind::L0,
            &BASE,
            &g.refined(),
            SlopeRule::CentralDifference,
            4.0,
            Exec::default(),
        )
        .unwrap();
        let ratio = e1 / e2;
        assert!((ratio - 4.0).abs() <= 0.8, "ratio {ratio}");
    }

    #[test]
    fn l0_delta_v_and_fit() {
        let g = grid();
        let d = darboux_for_kind(IntertwinerKind::L0, &BASE, &g, SlopeRule::Exact, 4.0, Exec::default()).unwrap();
        let s2 = std::f64::consts::SQRT_2;
        let err = d.delta_v.sup_distance(g.window(4.0), |x| {
            [[c(-1.0), c(-s2 * 1.25 * x)], [c(-s2 * 1.25 * x), c(1.0)]]
        });
        assert!(err < 1e-8, "{err:e}");
        assert_abs_diff_eq!(d.fit.delta_fit, 2.0, epsilon = 1e-8);
        assert_abs_diff_eq!(d.fit.lambda_fit, -1.25, epsilon = 1e-8);
        assert_abs_diff_eq!(d.fit.const_fit, 0.0, epsilon = 1e-8);
    }

    #[test]
    fn fits_match_closed_forms() {
        let g = grid();
        for kind in IntertwinerKind::FIXED {
            let d = darboux_for_kind(kind, &BASE, &g, SlopeRule::Exact, 4.0, Exec::default()).unwrap();
            let (dt, lt, ct) = predicted_fit(kind, &BASE).unwrap();
            assert!(d.fit.residual <= 1e-5, "{kind}: {:e}", d.fit.residual);
            assert_abs_diff_eq!(d.fit.delta_fit, dt, epsilon = 1e-5);
            assert_abs_diff_eq!(d.fit.lambda_fit, lt, epsilon = 1e-5);
            assert_abs_diff_eq!(d.fit.const_fit, ct, epsilon = 1e-5);
        }
    }

    #[test]
    fn identity_fit_and_threshold() {
        let g = grid();
        let v = base_potential(&BASE, &g, Exec::default());
        let f = fit_shape(&v, g.window(4.0)).unwrap();
        assert_abs_diff_eq!(f.delta_fit, 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(f.lambda_fit, 1.25, epsilon = 1e-12);
        assert!(f.residual < 1e-12);
        let bent = MatrixField::from_fn(g, Exec::default(), |_, x| [[c(x.powi(4)), c(0.0)], [c(0.0), c(0.0)]]);
        assert!(matches!(
            fit_shape(&bent, g.window(4.0)),
            Err(JcError::NotShapeInvariant { .. })
        ));
        assert!(matches!(fit_shape(&v, g.window(0.1)), Err(JcError::TooFewPoints(_))));
    }

    #[test]
    fn constant_w_gives_commutator_only() {
        let g = grid();
        let w = MatrixField::from_fn(g, Exec::default(), |_, _| [[c(1.0), c(2.0)], [c(0.5), c(-1.0)]]);
        let dv = delta_v(&w, 1.25, Exec::default());
        let f = 1.25 * FRAC_1_SQRT_2;
        let err = dv.sup_distance(g.interior(), |_| {
            [[c(2.5 * f), c(-2.0 * f)], [c(-2.0 * f), c(-2.5 * f)]]
        });
        assert!(err < 1e-12);
    }

    #[test]
    fn nonphysical_seeds_annihilated_exactly() {
        let g = grid();
        for (label, r) in
            grid_annihilation(IntertwinerKind::L1, &BASE, &g, SlopeRule::Exact, 4.0, Exec::default()).unwrap()
        {
            assert!(r <= 1e-12, "{label:?}: {r:e}");
        }
        let r = grid_annihilation(
            IntertwinerKind::L1,
            &BASE,
            &g,
            SlopeRule::CentralDifference,
            4.0,
            Exec::default(),
        )
        .unwrap();
        assert!(r.iter().all(|(_, v)| *v < 1e-3));
    }

    #[test]
    fn grid_operator_reproduces_fock_action() {
        let g = grid();
        for kind in IntertwinerKind::FIXED {
            let e0 = operator_agreement(kind, &BASE, &g, SlopeRule::Exact, 0, 4.0, Exec::default()).unwrap();
            assert!(e0 <= 1e-5, "{kind}: {e0:e}");
            // higher states carry larger third derivatives; the rate stays h²
            let e = operator_agreement(kind, &BASE, &g, SlopeRule::Exact, 4, 4.0, Exec::default()).unwrap();
            let e2 = operator_agreement(kind, &BASE, &g.refined(), SlopeRule::Exact, 4, 4.0, Exec::default()).unwrap();
            assert!((e / e2 - 4.0).abs() <= 0.8, "{kind}: {}", e / e2);
        }
    }

    #[test]
    fn modes_agree() {
        let g = grid();
        let a = darboux_for_kind(
            IntertwinerKind::L1,
            &BASE,
            &g,
            SlopeRule::CentralDifference,
            4.0,
            Exec::Sequential,
        )
        .unwrap();
        let b = darboux_for_kind(
            IntertwinerKind::L1,
            &BASE,
            &g,
            SlopeRule::CentralDifference,
            4.0,
            Exec::Parallel,
        )
        .unwrap();
        assert_eq!(a, b);
    }
}
