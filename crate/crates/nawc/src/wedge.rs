//! Admissible deformation matrices, the wedge covariance map, mass-shell
//! transforms of wedge-supported bumps and the rapidity commutator kernel.
//!
//! The displayed admissible array `D` (symmetric `λ` block) is the mixed
//! tensor `Θ_μ^ν`. The contravariant form `Θ^{μν} = ηD` is antisymmetric,
//! and `γ_Λ` acts on it. W1-preserving boosts fix it in this convention.

use std::sync::OnceLock;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::coupling::{CouplingEigen, SpectrumClass};
use crate::error::{NawcError, Result};
use crate::linalg::{c, C64};
use crate::quadrature::{gauss_legendre, trapezoid};

pub const LOCAL_TOL: f64 = 1e-6;
pub const NONLOCAL_TOL: f64 = 1e-3;
pub const TAIL_TOL: f64 = 1e-8;
pub const LORENTZ_TOL: f64 = 1e-10;

pub fn minkowski(d: usize) -> DMatrix<f64> {
    DMatrix::from_fn(d, d, |i, j| if i != j { 0.0 } else if i == 0 { 1.0 } else { -1.0 })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AdmissibleTheta {
    pub d: usize,
    pub lambda: f64,
    pub eta: f64,
}

impl AdmissibleTheta {
    pub fn new(d: usize, lambda: f64, eta: f64) -> Result<Self> {
        if d != 2 && d != 4 {
            return Err(NawcError::Invalid(format!("admissible matrices exist for d = 2 or 4, got {d}")));
        }
        if lambda < 0.0 {
            return Err(NawcError::Invalid(format!("lambda must be non-negative, got {lambda}")));
        }
        if d == 2 && eta != 0.0 {
            return Err(NawcError::Invalid("eta only exists in d = 4".into()));
        }
        Ok(Self { d, lambda, eta })
    }

    /// The displayed array.
    pub fn displayed(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.d, self.d);
        m[(0, 1)] = self.lambda;
        m[(1, 0)] = self.lambda;
        if self.d == 4 {
            m[(2, 3)] = self.eta;
            m[(3, 2)] = -self.eta;
        }
        m
    }

    pub fn contravariant(&self) -> DMatrix<f64> {
        minkowski(self.d) * self.displayed()
    }

    /// `Θ^μ_ν`, the form used by the deformation contexts.
    pub fn mixed(&self) -> DMatrix<f64> {
        self.contravariant() * minkowski(self.d)
    }
}

/// Structural match against the displayed form with `λ ≥ 0`.
pub fn is_admissible(displayed: &DMatrix<f64>) -> bool {
    let d = displayed.nrows();
    if displayed.ncols() != d || (d != 2 && d != 4) {
        return false;
    }
    let l = displayed[(0, 1)];
    let eta = if d == 4 { displayed[(2, 3)] } else { 0.0 };
    match AdmissibleTheta::new(d, l, eta) {
        Ok(t) => (t.displayed() - displayed).iter().all(|v| v.abs() < 1e-14),
        Err(_) => false,
    }
}

pub fn lorentz_residual(l: &DMatrix<f64>) -> f64 {
    let g = minkowski(l.nrows());
    (l.transpose() * &g * l - g).abs().max()
}

pub fn boost(beta: f64) -> DMatrix<f64> {
    DMatrix::from_row_slice(2, 2, &[beta.cosh(), beta.sinh(), beta.sinh(), beta.cosh()])
}

pub fn reflection(d: usize) -> DMatrix<f64> {
    -DMatrix::identity(d, d)
}

/// `γ_Λ(Θ) = ±ΛΘΛᵀ` on the contravariant form, sign by orthochronicity.
pub fn gamma_map(l: &DMatrix<f64>, theta_contra: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    if l.shape() != theta_contra.shape() {
        return Err(NawcError::Dimension("Lorentz matrix and theta differ in size".into()));
    }
    let r = lorentz_residual(l);
    if r > LORENTZ_TOL {
        return Err(NawcError::NotLorentz(r));
    }
    let conj = l * theta_contra * l.transpose();
    Ok(if l[(0, 0)] > 0.0 { conj } else { -conj })
}

fn bump(t: f64) -> f64 {
    if t.abs() >= 1.0 {
        0.0
    } else {
        (-1.0 / (1.0 - t * t)).exp()
    }
}

const BUMP_ORDER: usize = 12;
const BUMP_LEVELS: usize = 13;

/// Composite Gauss–Legendre rules on `[-1, 1]` with `2^level` panels, weights
/// premultiplied by the bump.
fn bump_rules() -> &'static Vec<(Vec<f64>, Vec<f64>)> {
    static RULES: OnceLock<Vec<(Vec<f64>, Vec<f64>)>> = OnceLock::new();
    RULES.get_or_init(|| {
        let base = gauss_legendre(BUMP_ORDER);
        (0..BUMP_LEVELS)
            .map(|lvl| {
                let panels = 1usize << lvl;
                let h = 2.0 / panels as f64;
                let mut nodes = Vec::with_capacity(panels * BUMP_ORDER);
                let mut weights = Vec::with_capacity(panels * BUMP_ORDER);
                for p in 0..panels {
                    let mid = -1.0 + (p as f64 + 0.5) * h;
                    for (&x, &w) in base.nodes.iter().zip(&base.weights) {
                        let t = mid + 0.5 * h * x;
                        nodes.push(t);
                        weights.push(0.5 * h * w * bump(t));
                    }
                }
                (nodes, weights)
            })
            .collect()
    })
}

/// `∫ b(t) e^{iκt} dt` for the standard bump `b(t) = exp(−1/(1−t²))`.
pub fn bump_transform(kappa: C64, refine: bool) -> C64 {
    let needed = 8.0 + kappa.re.abs() / 2.0;
    let mut lvl = (needed.log2().ceil() as usize).clamp(3, BUMP_LEVELS - 2);
    if refine {
        lvl += 1;
    }
    let (nodes, weights) = &bump_rules()[lvl];
    if kappa.im == 0.0 {
        let s: f64 = nodes.iter().zip(weights).map(|(t, w)| w * (kappa.re * t).cos()).sum();
        return c(s, 0.0);
    }
    nodes.iter().zip(weights).map(|(&t, &w)| (Complex64::i() * kappa * t).exp() * w).sum()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Right,
    Left,
}

/// `f(x) = φ((Λ⁻¹x − c)/s)` with `φ(y) = b(y₁−y₀) b(y₁+y₀)`, whose support is
/// the diamond `|y₀| + |y₁| < 1`.
#[derive(Clone, Debug)]
pub struct WedgeTestFunction {
    pub center: [f64; 2],
    pub scale: f64,
    pub side: Side,
    pub lorentz: Option<DMatrix<f64>>,
}

impl WedgeTestFunction {
    pub fn new(center: [f64; 2], scale: f64, side: Side) -> Result<Self> {
        let f = Self { center, scale, side, lorentz: None };
        f.validate()?;
        Ok(f)
    }

    fn corners(&self) -> Vec<[f64; 2]> {
        let raw = [[1.0, 0.0], [-1.0, 0.0], [0.0, 1.0], [0.0, -1.0]];
        raw.iter()
            .map(|y| {
                let x = [self.center[0] + self.scale * y[0], self.center[1] + self.scale * y[1]];
                match &self.lorentz {
                    Some(l) => [l[(0, 0)] * x[0] + l[(0, 1)] * x[1], l[(1, 0)] * x[0] + l[(1, 1)] * x[1]],
                    None => x,
                }
            })
            .collect()
    }

    /// Support lies inside the declared wedge (closure of the diamond's
    /// corners suffices because both regions are convex).
    pub fn validate(&self) -> Result<()> {
        if self.scale <= 0.0 {
            return Err(NawcError::Invalid(format!("bump scale must be positive, got {}", self.scale)));
        }
        let sign = if self.side == Side::Right { 1.0 } else { -1.0 };
        for x in self.corners() {
            if sign * x[1] <= x[0].abs() {
                return Err(NawcError::Invalid(format!("bump support leaves the declared wedge at ({:.3}, {:.3})", x[0], x[1])));
            }
        }
        Ok(())
    }

    /// `f ∘ Λ⁻¹` for a Lorentz matrix `Λ`; the declared side follows `Λ`.
    pub fn transformed(&self, l: &DMatrix<f64>) -> Result<Self> {
        let r = lorentz_residual(l);
        if r > LORENTZ_TOL {
            return Err(NawcError::NotLorentz(r));
        }
        let total = match &self.lorentz {
            Some(prev) => l * prev,
            None => l.clone(),
        };
        let side = if l[(0, 0)] > 0.0 { self.side } else if self.side == Side::Right { Side::Left } else { Side::Right };
        let f = Self { center: self.center, scale: self.scale, side, lorentz: Some(total) };
        f.validate()?;
        Ok(f)
    }

    pub fn translated(&self, a: [f64; 2]) -> Result<Self> {
        let shift = match &self.lorentz {
            Some(l) => {
                let inv = minkowski(2) * l.transpose() * minkowski(2);
                [inv[(0, 0)] * a[0] + inv[(0, 1)] * a[1], inv[(1, 0)] * a[0] + inv[(1, 1)] * a[1]]
            }
            None => a,
        };
        let f = Self { center: [self.center[0] + shift[0], self.center[1] + shift[1]], ..self.clone() };
        f.validate()?;
        Ok(f)
    }

    pub fn eval(&self, x: [f64; 2]) -> f64 {
        let y = match &self.lorentz {
            Some(l) => {
                let inv = minkowski(2) * l.transpose() * minkowski(2);
                [inv[(0, 0)] * x[0] + inv[(0, 1)] * x[1], inv[(1, 0)] * x[0] + inv[(1, 1)] * x[1]]
            }
            None => x,
        };
        let y0 = (y[0] - self.center[0]) / self.scale;
        let y1 = (y[1] - self.center[1]) / self.scale;
        bump(y1 - y0) * bump(y1 + y0)
    }

    /// `∫ f(x) e^{i·sign·k·x} dx` with the Minkowski product, for complex `k`.
    pub fn transform_at(&self, k: [C64; 2], sign: f64, refine: bool) -> C64 {
        let k = match &self.lorentz {
            Some(l) => {
                // k·Λy = (Λ⁻¹k)·y
                let inv = minkowski(2) * l.transpose() * minkowski(2);
                [k[0] * inv[(0, 0)] + k[1] * inv[(0, 1)], k[0] * inv[(1, 0)] + k[1] * inv[(1, 1)]]
            }
            None => k,
        };
        let s = self.scale;
        let kc = k[0] * self.center[0] - k[1] * self.center[1];
        let phase = (Complex64::i() * sign * kc).exp();
        let bu = bump_transform(-(k[0] + k[1]) * (sign * s / 2.0), refine);
        let bv = bump_transform((k[0] - k[1]) * (sign * s / 2.0), refine);
        phase * bu * bv * (s * s / 2.0)
    }
}

/// `p(θ) = m(cosh θ, sinh θ)`, valid for complex rapidity.
pub fn on_shell(mass: f64, theta: C64) -> [C64; 2] {
    [theta.cosh() * mass, theta.sinh() * mass]
}

#[derive(Clone, Debug)]
pub struct RapidityGrid {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub theta_max: f64,
}

impl RapidityGrid {
    pub fn new(theta_max: f64, points: usize) -> Result<Self> {
        if theta_max <= 0.0 || points < 3 {
            return Err(NawcError::Invalid("rapidity grid needs a positive window and at least 3 points".into()));
        }
        let r = trapezoid(-theta_max, theta_max, points);
        Ok(Self { nodes: r.nodes, weights: r.weights, theta_max })
    }
}

impl Default for RapidityGrid {
    fn default() -> Self {
        Self::new(8.0, 2000).expect("default grid")
    }
}

#[derive(Clone, Debug)]
pub struct Transforms {
    pub plus: Vec<C64>,
    pub minus: Vec<C64>,
}

pub fn mass_shell_transform(f: &WedgeTestFunction, mass: f64, grid: &RapidityGrid, refine: bool) -> Transforms {
    let mut plus = Vec::with_capacity(grid.nodes.len());
    let mut minus = Vec::with_capacity(grid.nodes.len());
    for &t in &grid.nodes {
        let p = on_shell(mass, c(t, 0.0));
        plus.push(f.transform_at(p, 1.0, refine));
        minus.push(f.transform_at(p, -1.0, refine));
    }
    Transforms { plus, minus }
}

/// Largest change of `f±` when the bump quadrature is refined.
pub fn transform_self_convergence(f: &WedgeTestFunction, mass: f64, grid: &RapidityGrid) -> f64 {
    let a = mass_shell_transform(f, mass, grid, false);
    let b = mass_shell_transform(f, mass, grid, true);
    a.plus.iter().chain(&a.minus).zip(b.plus.iter().chain(&b.minus)).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// `|f⁻(θ + iπ) − f⁺(θ)|`, worst over `thetas`.
pub fn continuation_residual(f: &WedgeTestFunction, mass: f64, thetas: &[f64]) -> f64 {
    thetas
        .iter()
        .map(|&t| {
            let shifted = on_shell(mass, c(t, std::f64::consts::PI));
            let direct = on_shell(mass, c(t, 0.0));
            (f.transform_at(shifted, -1.0, false) - f.transform_at(direct, 1.0, false)).norm()
        })
        .fold(0.0, f64::max)
}

/// `p_μ Θ^{μν} z_ν` for contravariant `p`, `z`.
pub fn theta_form(theta_contra: &DMatrix<f64>, p: [f64; 2], z: [f64; 2]) -> f64 {
    let pl = [p[0], -p[1]];
    let zl = [z[0], -z[1]];
    (0..2).map(|mu| (0..2).map(|nu| pl[mu] * theta_contra[(mu, nu)] * zl[nu]).sum::<f64>()).sum()
}

/// Forward-cone samples `t(cosh χ, sinh χ)` plus the origin.
pub fn default_z_samples() -> Vec<[f64; 2]> {
    let mut out = vec![[0.0, 0.0]];
    for t in [0.5, 1.0, 2.0, 4.0] {
        for chi in [0.0, 0.5, -0.5, 1.0, -1.0] {
            out.push([t * f64::cosh(chi), t * f64::sinh(chi)]);
        }
    }
    out
}

#[derive(Clone, Debug)]
pub struct KernelPoint {
    pub z: [f64; 2],
    /// One value per coupling cluster.
    pub values: Vec<C64>,
}

#[derive(Clone, Debug)]
pub struct KernelScan {
    pub lambdas: Vec<f64>,
    pub points: Vec<KernelPoint>,
    /// Largest integrand magnitude at the window edges.
    pub tail: f64,
    pub diagnostics: Vec<String>,
}

impl KernelScan {
    pub fn max_abs(&self) -> f64 {
        self.points.iter().flat_map(|p| p.values.iter()).map(|v| v.norm()).fold(0.0, f64::max)
    }
}

/// Kernel data shared by every sample point.
pub struct KernelInput<'a> {
    pub f: &'a Transforms,
    pub g: &'a Transforms,
    pub grid: &'a RapidityGrid,
    pub mass: f64,
    pub theta_contra: &'a DMatrix<f64>,
}

/// `∫dθ [f⁻g⁺ e^{iλ_r pΘz} − g⁻f⁺ e^{−iλ_r pΘz}]` for a single coupling value.
pub fn kernel_value(inp: &KernelInput, lambda_r: f64, z: [f64; 2]) -> (C64, f64) {
    let n = inp.grid.nodes.len();
    let mut acc = c(0.0, 0.0);
    let mut edge = 0.0_f64;
    for a in 0..n {
        let p = on_shell(inp.mass, c(inp.grid.nodes[a], 0.0));
        let ph = lambda_r * theta_form(inp.theta_contra, [p[0].re, p[1].re], z);
        let term = inp.f.minus[a] * inp.g.plus[a] * Complex64::from_polar(1.0, ph) - inp.g.minus[a] * inp.f.plus[a] * Complex64::from_polar(1.0, -ph);
        acc += term * inp.grid.weights[a];
        if a == 0 || a == n - 1 {
            edge = edge.max(term.norm());
        }
    }
    (acc, edge)
}

pub fn commutator_kernel(inp: &KernelInput, coupling: &CouplingEigen, zs: &[[f64; 2]]) -> KernelScan {
    let lambdas = coupling.lambdas();
    let mut tail = 0.0_f64;
    let points = zs
        .iter()
        .map(|&z| {
            let values = lambdas
                .iter()
                .map(|&l| {
                    let (v, e) = kernel_value(inp, l, z);
                    tail = tail.max(e);
                    v
                })
                .collect();
            KernelPoint { z, values }
        })
        .collect();
    let mut diagnostics = Vec::new();
    if tail > TAIL_TOL {
        diagnostics.push(format!("integrand {tail:.2e} at |θ| = {}: widen the rapidity window", inp.grid.theta_max));
    }
    KernelScan { lambdas, points, tail, diagnostics }
}

/// The abelian kernel at deformation `Θ` (coupling value 1).
pub fn abelian_kernel(inp: &KernelInput, z: [f64; 2]) -> C64 {
    kernel_value(inp, 1.0, z).0
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Local,
    NotLocal,
    Inconclusive,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Prediction {
    Local,
    NotLocal,
    /// No claim exists for this spectrum.
    None,
}

#[derive(Clone, Debug)]
pub struct VerdictRecord {
    pub verdict: Verdict,
    pub prediction: Prediction,
    pub class: SpectrumClass,
    pub max_kernel: f64,
    pub agrees: Option<bool>,
}

/// Pairs the measured kernel with the eigenvalue criterion. Positive spectra
/// and vanishing `λ` predict locality; mixed spectra predict its failure.
pub fn wedge_locality_verdict(scan: &KernelScan, class: SpectrumClass, lambda: f64) -> VerdictRecord {
    let max_kernel = scan.max_abs();
    let prediction = if lambda == 0.0 || class == SpectrumClass::StrictlyPositive {
        Prediction::Local
    } else if class == SpectrumClass::Mixed {
        Prediction::NotLocal
    } else {
        Prediction::None
    };
    let verdict = if max_kernel < LOCAL_TOL && prediction == Prediction::Local {
        Verdict::Local
    } else if max_kernel > NONLOCAL_TOL {
        Verdict::NotLocal
    } else {
        Verdict::Inconclusive
    };
    let agrees = match (prediction, verdict) {
        (Prediction::None, _) => None,
        (_, Verdict::Inconclusive) => None,
        (Prediction::Local, v) => Some(v == Verdict::Local),
        (Prediction::NotLocal, v) => Some(v == Verdict::NotLocal),
    };
    VerdictRecord { verdict, prediction, class, max_kernel, agrees }
}

#[derive(Clone, Debug)]
pub struct CovarianceReport {
    /// Worst integrand mismatch between the boosted configuration and the
    /// rapidity-shifted original, relative to the largest integrand.
    pub integrand: f64,
    /// Same for the deformation phase alone.
    pub phase: f64,
}

/// Compares `(f∘Λ⁻¹, g∘Λ⁻¹, γ_Λ(Θ), Λz)` at rapidity `θ` with
/// `(f, g, Θ, z)` at `θ − β` on every grid node.
pub fn covariance_kernel_check(
    f: &WedgeTestFunction,
    g: &WedgeTestFunction,
    beta: f64,
    mass: f64,
    theta: &AdmissibleTheta,
    lambda_r: f64,
    grid: &RapidityGrid,
    zs: &[[f64; 2]],
) -> Result<CovarianceReport> {
    let l = boost(beta);
    let th = theta.contravariant();
    let th_b = gamma_map(&l, &th)?;
    let (fb, gb) = (f.transformed(&l)?, g.transformed(&l)?);
    let mut worst = 0.0_f64;
    let mut phase_worst = 0.0_f64;
    let mut scale = 0.0_f64;
    for &t in &grid.nodes {
        let p = on_shell(mass, c(t, 0.0));
        let q = on_shell(mass, c(t - beta, 0.0));
        let (pr, qr) = ([p[0].re, p[1].re], [q[0].re, q[1].re]);
        let boosted = fb.transform_at(p, -1.0, false) * gb.transform_at(p, 1.0, false);
        let shifted = f.transform_at(q, -1.0, false) * g.transform_at(q, 1.0, false);
        for z in zs {
            let lz = [l[(0, 0)] * z[0] + l[(0, 1)] * z[1], l[(1, 0)] * z[0] + l[(1, 1)] * z[1]];
            let e1 = Complex64::from_polar(1.0, lambda_r * theta_form(&th_b, pr, lz));
            let e0 = Complex64::from_polar(1.0, lambda_r * theta_form(&th, qr, *z));
            phase_worst = phase_worst.max((e1 - e0).norm());
            worst = worst.max((boosted * e1 - shifted * e0).norm());
            scale = scale.max(shifted.norm());
        }
    }
    Ok(CovarianceReport { integrand: worst / scale.max(1e-300), phase: phase_worst })
}

#[cfg(test)]
mod tests;
