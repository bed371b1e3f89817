//! Quantum mechanics on a periodic 2D grid: deformed momenta as a
//! non-abelian gauge coupling, the deformed Hamiltonian, the field strength,
//! and the non-abelian Moyal–Weyl plane.
//!
//! Vectors live in `C^{N²} ⊗ C^m`, laid out as `v[(i1·N + i2)·m + a]`.
//! Spatial indices are lowered with `−δ`, so `−qA_i = (ΘZ)_k ∂_i Z^k` equals
//! `−(ΘZ)^k ∂_i Z^k` in contravariant components.

pub mod moyal;

use nalgebra::DMatrix;
use std::f64::consts::PI;

use crate::coupling::CouplingEigen;
use crate::error::{NawcError, Result};
use crate::expr::SmoothVectorField;
use crate::linalg::{c, cis, CMat, CVec, C64};
use crate::warped_core::diagonal::{DiagonalWarp, RowAccess};
use crate::warped_core::Metric;

/// Test vectors must stay this narrow relative to the box.
pub const MAX_WIDTH_FRACTION: f64 = 1.0 / 6.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Basis {
    Position,
    Momentum,
}

#[derive(Clone, Debug)]
pub struct GridRep {
    pub n: usize,
    pub big_n: usize,
    pub l: f64,
    /// Coordinates `x_j = −L + 2Lj/N`.
    pub x: Vec<f64>,
    /// Wavenumbers in DFT order, Nyquist set to zero.
    pub k: Vec<f64>,
    /// Unitary DFT, position → momentum.
    pub dft: CMat,
    /// Hermitian spectral derivative in the position basis.
    pub deriv: CMat,
    pub basis: Basis,
}

impl GridRep {
    pub fn new(big_n: usize, l: f64, basis: Basis) -> Result<Self> {
        if big_n < 4 || big_n % 2 != 0 || l <= 0.0 {
            return Err(NawcError::Invalid(format!("grid needs even N ≥ 4 and L > 0, got N={big_n}, L={l}")));
        }
        let nf = big_n as f64;
        let x: Vec<f64> = (0..big_n).map(|j| -l + 2.0 * l * j as f64 / nf).collect();
        let k: Vec<f64> = (0..big_n)
            .map(|q| {
                let s = if q < big_n / 2 { q as f64 } else if q == big_n / 2 { 0.0 } else { q as f64 - nf };
                PI * s / l
            })
            .collect();
        let dft = CMat::from_fn(big_n, big_n, |q, j| cis(-k_raw(q, big_n, l) * x[j]) / nf.sqrt());
        let diag = CMat::from_diagonal(&CVec::from_iterator(big_n, k.iter().map(|&v| c(v, 0.0))));
        let deriv = dft.adjoint() * diag * &dft;
        Ok(Self { n: 2, big_n, l, x, k, dft, deriv, basis })
    }

    pub fn points(&self) -> usize {
        self.big_n * self.big_n
    }

    pub fn coord(&self, j: usize) -> [f64; 2] {
        [self.x[j / self.big_n], self.x[j % self.big_n]]
    }

    pub fn wavevector(&self, j: usize) -> [f64; 2] {
        [self.k[j / self.big_n], self.k[j % self.big_n]]
    }

    /// `X_i` in this grid's basis.
    pub fn position(&self, axis: usize) -> GridOperator {
        let diag = CMat::from_diagonal(&CVec::from_iterator(self.big_n, self.x.iter().map(|&v| c(v, 0.0))));
        let mat = match self.basis {
            Basis::Position => diag,
            Basis::Momentum => &self.dft * diag * self.dft.adjoint(),
        };
        GridOperator::axis(self.big_n, axis, mat)
    }

    /// `P_i` in this grid's basis.
    pub fn momentum(&self, axis: usize) -> GridOperator {
        let mat = match self.basis {
            Basis::Position => self.deriv.clone(),
            Basis::Momentum => CMat::from_diagonal(&CVec::from_iterator(self.big_n, self.k.iter().map(|&v| c(v, 0.0)))),
        };
        GridOperator::axis(self.big_n, axis, mat)
    }

    pub fn laplacian(&self) -> GridOperator {
        let (p1, p2) = (self.momentum(0), self.momentum(1));
        let sq = |op: &GridOperator| &op.terms[0].1 * &op.terms[0].1;
        GridOperator { big_n: self.big_n, terms: vec![(0, sq(&p1)), (1, sq(&p2))] }
    }

    /// Centered Gaussian of width `w` modulated by `e^{ik0·x}`, tensored
    /// with `spinor`; normalized.
    pub fn gaussian(&self, w: f64, k0: [f64; 2], spinor: &[C64]) -> CVec {
        let m = spinor.len();
        let np = self.points();
        let mut pos = vec![c(0.0, 0.0); np];
        for (j, p) in pos.iter_mut().enumerate() {
            let [x1, x2] = self.coord(j);
            *p = cis(k0[0] * x1 + k0[1] * x2) * (-(x1 * x1 + x2 * x2) / (2.0 * w * w)).exp();
        }
        if self.basis == Basis::Momentum {
            pos = self.to_momentum(&pos);
        }
        let mut v = CVec::zeros(np * m);
        for j in 0..np {
            for a in 0..m {
                v[j * m + a] = pos[j] * spinor[a];
            }
        }
        let nrm = v.norm();
        v / c(nrm, 0.0)
    }

    /// 2D DFT of a scalar grid function.
    pub fn to_momentum(&self, f: &[C64]) -> Vec<C64> {
        let op0 = GridOperator::axis(self.big_n, 0, self.dft.clone());
        let op1 = GridOperator::axis(self.big_n, 1, self.dft.clone());
        op1.apply(&op0.apply(f, 1), 1)
    }
}

fn k_raw(q: usize, big_n: usize, l: f64) -> f64 {
    let s = if q < big_n / 2 { q as f64 } else { q as f64 - big_n as f64 };
    PI * s / l
}

/// Sum of one-axis operators `Σ_t 1 ⊗ M_t ⊗ 1` on `C^{N²}`.
#[derive(Clone, Debug)]
pub struct GridOperator {
    pub big_n: usize,
    pub terms: Vec<(usize, CMat)>,
}

impl GridOperator {
    pub fn axis(big_n: usize, axis: usize, mat: CMat) -> Self {
        Self { big_n, terms: vec![(axis, mat)] }
    }

    /// Action on `v` with `m` internal components per grid point.
    pub fn apply(&self, v: &[C64], m: usize) -> Vec<C64> {
        let n = self.big_n;
        let mut out = vec![c(0.0, 0.0); v.len()];
        for (axis, mat) in &self.terms {
            for i1 in 0..n {
                for i2 in 0..n {
                    let row = i1 * n + i2;
                    let line = if *axis == 0 { i1 } else { i2 };
                    for q in 0..n {
                        let e = mat[(line, q)];
                        if e == c(0.0, 0.0) {
                            continue;
                        }
                        let col = if *axis == 0 { q * n + i2 } else { i1 * n + q };
                        for a in 0..m {
                            out[row * m + a] += e * v[col * m + a];
                        }
                    }
                }
            }
        }
        out
    }
}

impl RowAccess for GridOperator {
    fn dim(&self) -> usize {
        self.big_n * self.big_n
    }

    fn visit_row(&self, j: usize, f: &mut dyn FnMut(usize, C64)) {
        let n = self.big_n;
        let (i1, i2) = (j / n, j % n);
        for (axis, mat) in &self.terms {
            for q in 0..n {
                if *axis == 0 {
                    f(q * n + i2, mat[(i1, q)]);
                } else {
                    f(i1 * n + q, mat[(i2, q)]);
                }
            }
        }
    }

    fn entry(&self, j: usize, k: usize) -> C64 {
        let n = self.big_n;
        let (j1, j2, k1, k2) = (j / n, j % n, k / n, k % n);
        let mut s = c(0.0, 0.0);
        for (axis, mat) in &self.terms {
            if *axis == 0 && j2 == k2 {
                s += mat[(j1, k1)];
            }
            if *axis == 1 && j1 == k1 {
                s += mat[(j2, k2)];
            }
        }
        s
    }
}

/// Pointwise action of `Σ_t f_t(x) ⊗ B_t`.
pub fn apply_local(fields: &[(&[f64], &CMat)], v: &[C64], m: usize) -> Vec<C64> {
    let mut out = vec![c(0.0, 0.0); v.len()];
    for (f, b) in fields {
        for (j, &fj) in f.iter().enumerate() {
            if fj == 0.0 {
                continue;
            }
            for a in 0..m {
                let mut s = c(0.0, 0.0);
                for q in 0..m {
                    s += b[(a, q)] * v[j * m + q];
                }
                out[j * m + a] += s * fj;
            }
        }
    }
    out
}

pub fn add(a: &[C64], b: &[C64]) -> Vec<C64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn sub(a: &[C64], b: &[C64]) -> Vec<C64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// `‖a − b‖ / max(‖b‖, ‖ψ‖)`, which stays meaningful when `b` vanishes.
pub fn rel_err(a: &[C64], b: &[C64], psi: &[C64]) -> f64 {
    norm(&sub(a, b)) / norm(b).max(norm(psi)).max(1e-300)
}

/// Grid, deformation and field data shared by the gauge-field checks.
#[derive(Clone, Debug)]
pub struct GaugeSetup {
    pub grid: GridRep,
    pub theta: DMatrix<f64>,
    pub field: SmoothVectorField,
    pub coupling: CouplingEigen,
}

/// `−qA_i` as a scalar function on the grid; the Lie structure is carried by
/// `ytau`.
#[derive(Clone, Debug)]
pub struct GaugeField {
    pub components: Vec<Vec<f64>>,
    pub ytau: CMat,
}

impl GaugeField {
    /// Lie-index form `−qA_{i,α}` for a basis expansion `Yτ = Σ_α y_α τ^α`.
    pub fn lie_components(&self, y: &[f64]) -> Vec<Vec<Vec<f64>>> {
        self.components.iter().map(|f| y.iter().map(|ya| f.iter().map(|v| v * ya).collect()).collect()).collect()
    }
}

impl GaugeSetup {
    pub fn new(grid: GridRep, theta: DMatrix<f64>, field: SmoothVectorField, coupling: CouplingEigen) -> Result<Self> {
        if grid.basis != Basis::Position {
            return Err(NawcError::Invalid("gauge fields need a position-diagonal grid".into()));
        }
        if field.dim() != 2 || theta.shape() != (2, 2) {
            return Err(NawcError::Dimension("gauge scenarios are two-dimensional".into()));
        }
        Ok(Self { grid, theta, field, coupling })
    }

    pub fn m(&self) -> usize {
        self.coupling.m()
    }

    fn theta_z(&self, z: &[f64]) -> [f64; 2] {
        [self.theta[(0, 0)] * z[0] + self.theta[(0, 1)] * z[1], self.theta[(1, 0)] * z[0] + self.theta[(1, 1)] * z[1]]
    }

    pub fn gauge_field(&self) -> GaugeField {
        let np = self.grid.points();
        let mut components = vec![vec![0.0; np]; 2];
        for j in 0..np {
            let x = self.grid.coord(j);
            let z = self.field.eval(&x);
            let jac = self.field.jacobian_at(&x);
            let tz = self.theta_z(&z);
            for (i, comp) in components.iter_mut().enumerate() {
                comp[j] = -(0..2).map(|k| tz[k] * jac[k][i]).sum::<f64>();
            }
        }
        GaugeField { components, ytau: self.coupling.matrix() }
    }

    /// `∂_1(−qA_2) − ∂_2(−qA_1)`; second derivatives of `Z` cancel, leaving
    /// `−Σ_{kl} Θ_{kl}(∂_1Z^l ∂_2Z^k − ∂_2Z^l ∂_1Z^k)`.
    pub fn curl(&self) -> Vec<f64> {
        (0..self.grid.points())
            .map(|j| {
                let jac = self.field.jacobian_at(&self.grid.coord(j));
                let mut s = 0.0;
                for k in 0..2 {
                    for l in 0..2 {
                        s -= self.theta[(k, l)] * (jac[l][0] * jac[k][1] - jac[l][1] * jac[k][0]);
                    }
                }
                s
            })
            .collect()
    }

    pub fn spectral_warp(&self) -> Result<DiagonalWarp> {
        let points = (0..self.grid.points()).map(|j| self.field.eval(&self.grid.coord(j))).collect();
        DiagonalWarp::new(points, &self.theta, Metric::Euclidean, self.coupling.clone())
    }

    /// `P_i ⊗ 1 − qA_i ⊗ Yτ` applied to `v`.
    pub fn momentum_closed(&self, gauge: &GaugeField, axis: usize, v: &[C64]) -> Vec<C64> {
        let m = self.m();
        let p = self.grid.momentum(axis).apply(v, m);
        add(&p, &apply_local(&[(&gauge.components[axis], &gauge.ytau)], v, m))
    }

    pub fn momentum_spectral(&self, warp: &DiagonalWarp, axis: usize, v: &[C64]) -> Vec<C64> {
        warp.apply(&self.grid.momentum(axis), v)
    }

    /// Warp of `P_1² + P_2²`.
    pub fn hamiltonian_warped(&self, warp: &DiagonalWarp, v: &[C64]) -> Vec<C64> {
        warp.apply(&self.grid.laplacian(), v)
    }

    /// `Σ_i (P_i^{Θτ})²` from the closed-form momenta.
    pub fn hamiltonian_product(&self, gauge: &GaugeField, v: &[C64]) -> Vec<C64> {
        let mut out = vec![c(0.0, 0.0); v.len()];
        for axis in 0..2 {
            let once = self.momentum_closed(gauge, axis, v);
            out = add(&out, &self.momentum_closed(gauge, axis, &once));
        }
        out
    }

    /// `Σ_i (qA_i)² ⊗ (Yτ)²` applied to `v`.
    pub fn quadratic_term(&self, gauge: &GaugeField, v: &[C64]) -> Vec<C64> {
        let y2 = &gauge.ytau * &gauge.ytau;
        let sq: Vec<f64> = (0..self.grid.points()).map(|j| gauge.components[0][j].powi(2) + gauge.components[1][j].powi(2)).collect();
        apply_local(&[(&sq, &y2)], v, self.m())
    }
}

#[derive(Clone, Debug)]
pub struct MomentumReport {
    /// Closed form vs spectral warp, worst over test vectors.
    pub closed_vs_spectral: f64,
    /// Spectral warp minus `P ⊗ 1` vs the contracted gauge field.
    pub bookkeeping: f64,
}

pub fn deformed_momentum_check(setup: &GaugeSetup, vectors: &[CVec]) -> Result<MomentumReport> {
    let gauge = setup.gauge_field();
    let warp = setup.spectral_warp()?;
    let m = setup.m();
    let (mut cvs, mut book) = (0.0_f64, 0.0_f64);
    for v in vectors {
        let v = v.as_slice();
        for axis in 0..2 {
            let closed = setup.momentum_closed(&gauge, axis, v);
            let spectral = setup.momentum_spectral(&warp, axis, v);
            cvs = cvs.max(rel_err(&spectral, &closed, v));
            let diff = sub(&spectral, &setup.grid.momentum(axis).apply(v, m));
            let contracted = apply_local(&[(&gauge.components[axis], &gauge.ytau)], v, m);
            book = book.max(rel_err(&diff, &contracted, v));
        }
    }
    Ok(MomentumReport { closed_vs_spectral: cvs, bookkeeping: book })
}

#[derive(Clone, Debug)]
pub struct HamiltonianReport {
    /// `‖(H0 − H1)ψ‖ / ‖ψ‖`, worst over test vectors.
    pub uniqueness: f64,
    /// `‖Σ(qA_i)²(Yτ)²ψ‖ / ‖ψ‖`, smallest over test vectors.
    pub quadratic_norm: f64,
}

pub fn deformed_hamiltonian_check(setup: &GaugeSetup, vectors: &[CVec]) -> Result<HamiltonianReport> {
    let gauge = setup.gauge_field();
    let warp = setup.spectral_warp()?;
    let (mut uni, mut quad) = (0.0_f64, f64::INFINITY);
    for v in vectors {
        let v = v.as_slice();
        let h0 = setup.hamiltonian_warped(&warp, v);
        let h1 = setup.hamiltonian_product(&gauge, v);
        uni = uni.max(norm(&sub(&h0, &h1)) / norm(v));
        quad = quad.min(norm(&setup.quadratic_term(&gauge, v)) / norm(v));
    }
    Ok(HamiltonianReport { uniqueness: uni, quadratic_norm: quad })
}

#[derive(Clone, Debug)]
pub struct FieldStrengthReport {
    /// Spectral-path commutator vs `−i curl ⊗ Yτ`.
    pub spectral: f64,
    /// Closed-form commutator vs the same.
    pub closed: f64,
    /// `‖[qA_1, qA_2] ⊗ (Yτ)²‖`.
    pub quadratic: f64,
}

/// `[P_1^{Θτ}, P_2^{Θτ}] = −i(∂_1(−qA_2) − ∂_2(−qA_1)) ⊗ Yτ`.
pub fn field_strength_check(setup: &GaugeSetup, vectors: &[CVec]) -> Result<FieldStrengthReport> {
    let gauge = setup.gauge_field();
    let warp = setup.spectral_warp()?;
    let curl = setup.curl();
    let m = setup.m();
    let minus_i_y = &gauge.ytau * c(0.0, -1.0);
    let (mut spec, mut closed) = (0.0_f64, 0.0_f64);
    for v in vectors {
        let v = v.as_slice();
        let want = apply_local(&[(&curl, &minus_i_y)], v, m);
        let s12 = setup.momentum_spectral(&warp, 0, &setup.momentum_spectral(&warp, 1, v));
        let s21 = setup.momentum_spectral(&warp, 1, &setup.momentum_spectral(&warp, 0, v));
        spec = spec.max(rel_err(&sub(&s12, &s21), &want, v));
        let c12 = setup.momentum_closed(&gauge, 0, &setup.momentum_closed(&gauge, 1, v));
        let c21 = setup.momentum_closed(&gauge, 1, &setup.momentum_closed(&gauge, 0, v));
        closed = closed.max(rel_err(&sub(&c12, &c21), &want, v));
    }
    let y2 = &gauge.ytau * &gauge.ytau;
    let y2n = y2.iter().fold(0.0_f64, |a, z| a.max(z.norm()));
    let quadratic = gauge.components[0].iter().zip(&gauge.components[1]).map(|(a, b)| (a * b - b * a).abs() * y2n).fold(0.0, f64::max);
    Ok(FieldStrengthReport { spectral: spec, closed, quadratic })
}

/// `max_{i,k} ‖([X_i, P_k] − iδ_{ik})ψ‖ / ‖ψ‖`.
pub fn ccr_residual(grid: &GridRep, psi: &CVec, m: usize) -> f64 {
    let v = psi.as_slice();
    let mut worst = 0.0_f64;
    for i in 0..2 {
        for k in 0..2 {
            let (x, p) = (grid.position(i), grid.momentum(k));
            let xp = x.apply(&p.apply(v, m), m);
            let px = p.apply(&x.apply(v, m), m);
            let mut r = sub(&xp, &px);
            if i == k {
                for (ri, vi) in r.iter_mut().zip(v) {
                    *ri -= c(0.0, 1.0) * vi;
                }
            }
            worst = worst.max(norm(&r) / norm(v));
        }
    }
    worst
}

/// Default test vectors: centered Gaussians of width `w` with small
/// modulations and varied internal states.
pub fn test_vectors(grid: &GridRep, w: f64, m: usize, seed: u64) -> Result<Vec<CVec>> {
    use rand::{Rng, SeedableRng};
    if w > grid.l * MAX_WIDTH_FRACTION + 1e-12 {
        return Err(NawcError::Invalid(format!("test vector width {w} exceeds L/6")));
    }
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mods = [[0.0, 0.0], [0.7, -0.4], [-0.3, 0.9]];
    Ok(mods
        .iter()
        .map(|k0| {
            let spinor: Vec<C64> = (0..m).map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
            grid.gaussian(w, *k0, &spinor)
        })
        .collect())
}
