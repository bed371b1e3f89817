//! Warped convolutions over a finite joint spectrum.
//!
//! A family of commuting hermitian generators `G_μ` on `C^N` is resolved into
//! joint eigenvalues `g_j ∈ R^d` and orthogonal projectors `E_j`. The unitary
//! group is `U(y) = Σ_j exp(i⟨y, g_j⟩) E_j`, where `⟨·,·⟩` is the pairing of
//! the declared metric. Non-abelian objects live on `C^N ⊗ C^m`, with the
//! coupling factor on the right of the Kronecker product.

pub mod diagonal;
pub mod strong_limit;

use nalgebra::DMatrix;

use crate::coupling::CouplingEigen;
use crate::error::{NawcError, Result};
use crate::linalg::{c, cis, commutator, expi_hermitian, fro, herm_eigen, kron, max_abs, random_unitary, CMat};
use rand::Rng;

pub const SPECTRUM_CLUSTER_TOL: f64 = 1e-9;
pub const COMMUTE_TOL: f64 = 1e-10;
pub const SKEW_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Metric {
    Euclidean,
    /// `diag(1, −1, …, −1)`.
    Minkowski,
}

impl Metric {
    #[inline]
    pub fn sign(&self, mu: usize) -> f64 {
        match self {
            Metric::Euclidean => 1.0,
            Metric::Minkowski => {
                if mu == 0 {
                    1.0
                } else {
                    -1.0
                }
            }
        }
    }

    #[inline]
    pub fn pair(&self, a: &[f64], b: &[f64]) -> f64 {
        a.iter().zip(b).enumerate().map(|(mu, (x, y))| self.sign(mu) * x * y).sum()
    }

    pub fn matrix(&self, d: usize) -> DMatrix<f64> {
        DMatrix::from_fn(d, d, |i, j| if i == j { self.sign(i) } else { 0.0 })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

#[derive(Clone, Debug)]
pub struct JointSpectrum {
    pub d: usize,
    pub n: usize,
    pub points: Vec<Vec<f64>>,
    pub projectors: Vec<CMat>,
}

/// Simultaneous diagonalization by successive refinement: every block of the
/// current partition is split along the eigenspaces of the next generator.
pub fn joint_spectrum(generators: &[CMat]) -> Result<JointSpectrum> {
    let d = generators.len();
    if d == 0 {
        return Err(NawcError::Invalid("at least one generator required".into()));
    }
    let n = generators[0].nrows();
    if generators.iter().any(|g| g.shape() != (n, n)) {
        return Err(NawcError::Dimension("generators must share one square shape".into()));
    }
    let mut worst = 0.0_f64;
    for a in 0..d {
        for b in (a + 1)..d {
            worst = worst.max(max_abs(&commutator(&generators[a], &generators[b])));
        }
    }
    if worst > COMMUTE_TOL {
        return Err(NawcError::NonCommuting(worst));
    }
    let mut blocks: Vec<(Vec<f64>, CMat)> = vec![(Vec::new(), CMat::identity(n, n))];
    for g in generators {
        let mut next = Vec::new();
        for (point, basis) in blocks {
            let restricted = basis.adjoint() * g * &basis;
            let e = herm_eigen(&restricted);
            let mut start = 0;
            while start < e.values.len() {
                let mut end = start + 1;
                while end < e.values.len() && e.values[end] - e.values[end - 1] <= SPECTRUM_CLUSTER_TOL {
                    end += 1;
                }
                let sub = &basis * e.vectors.columns(start, end - start);
                let value = e.values[start..end].iter().sum::<f64>() / (end - start) as f64;
                let mut p = point.clone();
                p.push(value);
                next.push((p, sub));
                start = end;
            }
        }
        blocks = next;
    }
    blocks.sort_by(|a, b| {
        a.0.iter()
            .zip(&b.0)
            .map(|(x, y)| x.total_cmp(y))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let points = blocks.iter().map(|b| b.0.clone()).collect();
    let projectors = blocks.iter().map(|b| &b.1 * b.1.adjoint()).collect();
    Ok(JointSpectrum { d, n, points, projectors })
}

impl JointSpectrum {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Spectrum of diagonal generators given by their diagonals, one row per
    /// basis vector.
    pub fn from_diagonal(rows: &[Vec<f64>]) -> Self {
        let n = rows.len();
        let d = rows.first().map_or(0, |r| r.len());
        let projectors = (0..n)
            .map(|j| {
                let mut e = CMat::zeros(n, n);
                e[(j, j)] = c(1.0, 0.0);
                e
            })
            .collect();
        Self { d, n, points: rows.to_vec(), projectors }
    }

    /// Worst defect of `Σ E_j = 1`, `E_j E_k = δ_jk E_j`, and `Σ_j g_jμ E_j = G_μ`.
    pub fn residual(&self, generators: &[CMat]) -> f64 {
        let id = CMat::identity(self.n, self.n);
        let mut sum = CMat::zeros(self.n, self.n);
        let mut worst = 0.0_f64;
        for (j, ej) in self.projectors.iter().enumerate() {
            sum += ej;
            for (k, ek) in self.projectors.iter().enumerate() {
                let want = if j == k { ej.clone() } else { CMat::zeros(self.n, self.n) };
                worst = worst.max(max_abs(&(ej * ek - want)));
            }
        }
        worst = worst.max(max_abs(&(sum - id)));
        for (mu, g) in generators.iter().enumerate() {
            let mut back = CMat::zeros(self.n, self.n);
            for (p, e) in self.points.iter().zip(&self.projectors) {
                back += e * c(p[mu], 0.0);
            }
            worst = worst.max(max_abs(&(back - g)));
        }
        worst
    }
}

/// Θ, the metric it is skew under, the joint spectrum, and the coupling.
#[derive(Clone, Debug)]
pub struct DeformationContext {
    pub theta: DMatrix<f64>,
    pub metric: Metric,
    pub spectrum: JointSpectrum,
    pub coupling: CouplingEigen,
}

/// `‖MΘ + (MΘ)ᵀ‖_max`: Θ is skew when `⟨Θa, b⟩ = −⟨a, Θb⟩`.
pub fn skew_residual(theta: &DMatrix<f64>, metric: Metric) -> f64 {
    let mt = metric.matrix(theta.nrows()) * theta;
    (&mt + mt.transpose()).amax()
}

impl DeformationContext {
    pub fn new(theta: DMatrix<f64>, metric: Metric, spectrum: JointSpectrum, coupling: CouplingEigen) -> Result<Self> {
        if theta.shape() != (spectrum.d, spectrum.d) {
            return Err(NawcError::Dimension(format!(
                "theta is {}x{}, spectrum has d = {}",
                theta.nrows(),
                theta.ncols(),
                spectrum.d
            )));
        }
        let r = skew_residual(&theta, metric);
        if r > SKEW_TOL {
            return Err(NawcError::NotSkew(r));
        }
        Ok(Self { theta, metric, spectrum, coupling })
    }

    pub fn n(&self) -> usize {
        self.spectrum.n
    }

    pub fn m(&self) -> usize {
        self.coupling.m()
    }

    pub fn with_theta(&self, theta: DMatrix<f64>) -> Result<Self> {
        Self::new(theta, self.metric, self.spectrum.clone(), self.coupling.clone())
    }

    /// `s Θ g`.
    pub fn shift(&self, s: f64, g: &[f64]) -> Vec<f64> {
        let d = self.spectrum.d;
        (0..d).map(|mu| s * (0..d).map(|nu| self.theta[(mu, nu)] * g[nu]).sum::<f64>()).collect()
    }

    pub fn unitary_u(&self, y: &[f64]) -> CMat {
        let mut u = CMat::zeros(self.n(), self.n());
        for (g, e) in self.spectrum.points.iter().zip(&self.spectrum.projectors) {
            u += e * cis(self.metric.pair(y, g));
        }
        u
    }

    /// `Σ_r U(λ_r p) ⊗ W B_r W⁻¹`.
    pub fn unitary_u_tau(&self, p: &[f64]) -> CMat {
        let mut out = CMat::zeros(self.n() * self.m(), self.n() * self.m());
        for k in &self.coupling.clusters {
            let scaled: Vec<f64> = p.iter().map(|x| k.lambda * x).collect();
            out += kron(&self.unitary_u(&scaled), &k.projector);
        }
        out
    }

    /// The generator `⟨p, G⟩ ⊗ Y^α τ_α` rebuilt from the spectrum.
    pub fn tau_generator(&self, p: &[f64]) -> CMat {
        let mut g = CMat::zeros(self.n(), self.n());
        for (pt, e) in self.spectrum.points.iter().zip(&self.spectrum.projectors) {
            g += e * c(self.metric.pair(p, pt), 0.0);
        }
        kron(&g, &self.coupling.matrix())
    }

    /// `exp(i ⟨p, G⟩ ⊗ Y^α τ_α)` evaluated from the eigendecomposition of the
    /// full generator.
    pub fn unitary_u_tau_exp(&self, p: &[f64]) -> CMat {
        expi_hermitian(&self.tau_generator(p), 1.0)
    }

    pub fn alpha(&self, y: &[f64], a: &CMat) -> CMat {
        let neg: Vec<f64> = y.iter().map(|x| -x).collect();
        self.unitary_u(y) * a * self.unitary_u(&neg)
    }

    pub fn alpha_tau(&self, p: &[f64], a: &CMat) -> CMat {
        let neg: Vec<f64> = p.iter().map(|x| -x).collect();
        self.unitary_u_tau(p) * a * self.unitary_u_tau(&neg)
    }

    /// Left form `Σ_j E_j α_{sΘg_j}(A)` or right form `Σ_j α_{sΘg_j}(A) E_j`.
    pub fn warp_abelian(&self, a: &CMat, s: f64, side: Side) -> CMat {
        let mut out = CMat::zeros(self.n(), self.n());
        for (g, e) in self.spectrum.points.iter().zip(&self.spectrum.projectors) {
            let moved = self.alpha(&self.shift(s, g), a);
            out += match side {
                Side::Left => e * moved,
                Side::Right => moved * e,
            };
        }
        out
    }

    /// `Σ_r A_{sλ_rΘ} ⊗ W B_r W⁻¹`.
    pub fn warp_nonabelian_scaled(&self, a: &CMat, s: f64) -> CMat {
        let mut out = CMat::zeros(self.n() * self.m(), self.n() * self.m());
        for k in &self.coupling.clusters {
            out += kron(&self.warp_abelian(a, s * k.lambda, Side::Left), &k.projector);
        }
        out
    }

    pub fn warp_nonabelian(&self, a: &CMat) -> CMat {
        self.warp_nonabelian_scaled(a, 1.0)
    }

    /// `Σ_j (E_j ⊗ 1) U^τ(sΘg_j) (A ⊗ 1) U^τ(−sΘg_j)` with `U^τ` taken from the
    /// full exponential.
    pub fn warp_nonabelian_direct(&self, a: &CMat, s: f64) -> CMat {
        self.warp_tau(&kron(a, &CMat::identity(self.m(), self.m())), s)
    }

    /// `Σ_j (E_j ⊗ 1) α^τ_{sΘg_j}(B)` for an operator `B` on `C^N ⊗ C^m`.
    pub fn warp_tau(&self, big: &CMat, s: f64) -> CMat {
        let m = self.m();
        let id = CMat::identity(m, m);
        let mut out = CMat::zeros(self.n() * m, self.n() * m);
        for (g, e) in self.spectrum.points.iter().zip(&self.spectrum.projectors) {
            let p = self.shift(s, g);
            let neg: Vec<f64> = p.iter().map(|x| -x).collect();
            let moved = self.unitary_u_tau_exp(&p) * big * self.unitary_u_tau_exp(&neg);
            out += kron(e, &id) * moved;
        }
        out
    }

    /// `A ×_{sΘ} F = Σ_{j,k} α_{sΘ(g_j − g_k)}(A) E_j F E_k`.
    pub fn rieffel_product(&self, a: &CMat, f: &CMat, s: f64) -> CMat {
        let sp = &self.spectrum;
        let mut out = CMat::zeros(self.n(), self.n());
        for (gj, ej) in sp.points.iter().zip(&sp.projectors) {
            let ejf = ej * f;
            for (gk, ek) in sp.points.iter().zip(&sp.projectors) {
                let diff: Vec<f64> = gj.iter().zip(gk).map(|(x, y)| x - y).collect();
                out += self.alpha(&self.shift(s, &diff), a) * &ejf * ek;
            }
        }
        out
    }

    /// `Σ_r (A ×_{λ_rΘ} F) ⊗ W B_r W⁻¹`.
    pub fn rieffel_product_nonabelian(&self, a: &CMat, f: &CMat) -> CMat {
        let mut out = CMat::zeros(self.n() * self.m(), self.n() * self.m());
        for k in &self.coupling.clusters {
            out += kron(&self.rieffel_product(a, f, k.lambda), &k.projector);
        }
        out
    }

    /// `‖(A^{Θτ})† − A^{Θτ}‖_F`.
    pub fn check_symmetry(&self, a: &CMat) -> f64 {
        let w = self.warp_nonabelian(a);
        fro(&(w.adjoint() - &w))
    }

    pub fn check_commutation_transfer(&self, a: &CMat, f: &CMat) -> TransferReport {
        let m = self.m();
        let id = CMat::identity(m, m);
        let (big_a, big_f) = (kron(a, &id), kron(f, &id));
        let pts = &self.spectrum.points;
        let moved_a: Vec<CMat> = pts.iter().map(|g| self.alpha_tau(&self.shift(1.0, g), &big_a)).collect();
        let moved_f: Vec<CMat> = pts.iter().map(|g| self.alpha_tau(&self.shift(-1.0, g), &big_f)).collect();
        let mut hypothesis = 0.0_f64;
        for x in &moved_a {
            for y in &moved_f {
                hypothesis = hypothesis.max(fro(&commutator(x, y)));
            }
        }
        let conclusion = fro(&commutator(&self.warp_nonabelian_scaled(a, 1.0), &self.warp_nonabelian_scaled(f, -1.0)));
        TransferReport { hypothesis, conclusion, asserted: hypothesis < TRANSFER_HYPOTHESIS_TOL }
    }
}

pub const TRANSFER_HYPOTHESIS_TOL: f64 = 1e-11;
pub const TRANSFER_CONCLUSION_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug)]
pub struct TransferReport {
    /// `max_{j,k} ‖[α^τ_{Θg_j}(A⊗1), α^τ_{−Θg_k}(F⊗1)]‖`.
    pub hypothesis: f64,
    /// `‖[A^{Θτ}, F^{−Θτ}]‖`.
    pub conclusion: f64,
    pub asserted: bool,
}

impl TransferReport {
    /// `None` when the hypothesis fails and nothing is claimed.
    pub fn holds(&self) -> Option<bool> {
        self.asserted.then_some(self.conclusion < TRANSFER_CONCLUSION_TOL)
    }
}

/// Cyclic shift `e_k ↦ e_{k+1 mod n}`.
pub fn cyclic_shift(n: usize) -> CMat {
    let mut s = CMat::zeros(n, n);
    for k in 0..n {
        s[((k + 1) % n, k)] = c(1.0, 0.0);
    }
    s
}

/// Two-factor example on `C^a ⊗ C^b` whose translates commute for every pair
/// of arguments: generators act one per factor, `A = S ⊗ 1` and `F = 1 ⊗ S`
/// with `S` the cyclic shift.
pub fn shift_pair_example(a: usize, b: usize) -> (Vec<CMat>, CMat, CMat) {
    let diag = |n: usize| CMat::from_fn(n, n, |i, j| if i == j { c(i as f64 / n as f64, 0.0) } else { c(0.0, 0.0) });
    let (ia, ib) = (CMat::identity(a, a), CMat::identity(b, b));
    let gens = vec![kron(&diag(a), &ib), kron(&ia, &diag(b))];
    (gens, kron(&cyclic_shift(a), &ib), kron(&ia, &cyclic_shift(b)))
}

/// Two commuting generators on `C^n` with `n ∈ [2, max_n]`: a shared random
/// unitary frame with half-integer eigenvalues in `[−1, 1]`, so that joint
/// eigenvalues repeat.
pub fn random_commuting_pair<R: Rng>(rng: &mut R, max_n: usize) -> Vec<CMat> {
    let n = rng.gen_range(2..=max_n.max(2));
    let v = random_unitary(rng, n);
    (0..2)
        .map(|_| {
            let d: Vec<_> = (0..n).map(|_| c(rng.gen_range(-2i32..=2) as f64 * 0.5, 0.0)).collect();
            &v * CMat::from_diagonal(&nalgebra::DVector::from_vec(d)) * v.adjoint()
        })
        .collect()
}

/// Random two-dimensional instance with `|Θ₁₂| < scale`, skew for `metric`.
pub fn random_instance<R: Rng>(rng: &mut R, metric: Metric, max_n: usize, scale: f64, coupling: CouplingEigen) -> Result<(DeformationContext, Vec<CMat>)> {
    let gens = random_commuting_pair(rng, max_n);
    let sp = joint_spectrum(&gens)?;
    let t = scale * rng.gen_range(-1.0..1.0);
    let theta = match metric {
        Metric::Euclidean => DMatrix::from_row_slice(2, 2, &[0.0, t, -t, 0.0]),
        Metric::Minkowski => DMatrix::from_row_slice(2, 2, &[0.0, t, t, 0.0]),
    };
    Ok((DeformationContext::new(theta, metric, sp, coupling)?, gens))
}
