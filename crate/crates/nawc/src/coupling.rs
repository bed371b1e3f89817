//! The hermitian coupling matrix `Y^α τ_α` and its spectral data.

use crate::error::{NawcError, Result};
use crate::linalg::{c, herm_eigen, max_abs, CMat, C64};
use crate::sun_algebra::LieBasis;

pub const ZERO_THRESHOLD: f64 = 1e-10;
pub const CLUSTER_TOL: f64 = 1e-9;
const HERMITIAN_TOL: f64 = 1e-12;

#[derive(Clone, Debug)]
pub enum CouplingKind {
    /// Real coefficient vector of length `m² − 1`.
    Vector(Vec<f64>),
    /// One complex `m × m` coefficient matrix per generator.
    Matrix(Vec<CMat>),
}

/// `scale · Σ_α Y^α τ_α`. Matrix coefficients multiply from the left.
#[derive(Clone, Debug)]
pub struct CouplingSpec {
    pub kind: CouplingKind,
    pub scale: f64,
}

impl CouplingSpec {
    pub fn vector(y: Vec<f64>) -> Self {
        Self { kind: CouplingKind::Vector(y), scale: 1.0 }
    }

    /// Matrix-valued coefficients contracted against the unhalved generators `2τ_α`.
    pub fn matrix(y: Vec<CMat>) -> Self {
        Self { kind: CouplingKind::Matrix(y), scale: 2.0 }
    }

    /// The two-by-two family `Y¹ = y₁·1, Y² = y₂·1, Y³ = diag(y₃, y₄)`.
    pub fn diagonal_family(y1: f64, y2: f64, y3: f64, y4: f64) -> Self {
        let id = CMat::identity(2, 2);
        let mut d = CMat::zeros(2, 2);
        d[(0, 0)] = c(y3, 0.0);
        d[(1, 1)] = c(y4, 0.0);
        Self::matrix(vec![&id * c(y1, 0.0), &id * c(y2, 0.0), d])
    }
}

/// Assembles the coupling matrix and rejects non-hermitian or singular results.
pub fn build_ytau(spec: &CouplingSpec, basis: &LieBasis) -> Result<CMat> {
    let m = basis.m;
    let mut y = CMat::zeros(m, m);
    match &spec.kind {
        CouplingKind::Vector(v) => {
            if v.len() != basis.dim() {
                return Err(NawcError::Dimension(format!(
                    "coupling vector has {} entries, su({m}) needs {}",
                    v.len(),
                    basis.dim()
                )));
            }
            y = basis.contract(v);
        }
        CouplingKind::Matrix(ms) => {
            if ms.len() != basis.dim() || ms.iter().any(|a| a.shape() != (m, m)) {
                return Err(NawcError::Dimension(format!(
                    "matrix coupling needs {} blocks of size {m}x{m}",
                    basis.dim()
                )));
            }
            for (a, t) in ms.iter().zip(&basis.generators) {
                y += a * t;
            }
        }
    }
    y *= c(spec.scale, 0.0);
    let herm = max_abs(&(&y - y.adjoint()));
    if herm > HERMITIAN_TOL {
        return Err(NawcError::InadmissibleY(herm));
    }
    let smallest = herm_eigen(&y).values.iter().fold(f64::INFINITY, |a, &l| a.min(l.abs()));
    if smallest < ZERO_THRESHOLD {
        return Err(NawcError::ZeroEigenvalue(smallest));
    }
    Ok(y)
}

#[derive(Clone, Debug)]
pub struct EigenCluster {
    pub lambda: f64,
    /// Diagonal unit matrix selecting the cluster's columns of `W`.
    pub diag_projector: CMat,
    /// `W B_r W⁻¹`.
    pub projector: CMat,
}

#[derive(Clone, Debug)]
pub struct CouplingEigen {
    /// All `m` eigenvalues, descending.
    pub eigenvalues: Vec<f64>,
    pub w: CMat,
    pub clusters: Vec<EigenCluster>,
}

impl CouplingEigen {
    pub fn m(&self) -> usize {
        self.w.nrows()
    }

    pub fn lambdas(&self) -> Vec<f64> {
        self.clusters.iter().map(|k| k.lambda).collect()
    }

    pub fn matrix(&self) -> CMat {
        let mut out = CMat::zeros(self.m(), self.m());
        for k in &self.clusters {
            out += &k.projector * c(k.lambda, 0.0);
        }
        out
    }

    /// `Σ_r f(λ_r) W B_r W⁻¹`.
    pub fn apply_fn(&self, f: impl Fn(f64) -> C64) -> CMat {
        let mut out = CMat::zeros(self.m(), self.m());
        for k in &self.clusters {
            out += &k.projector * f(k.lambda);
        }
        out
    }

    /// Worst defect of `B_r B_l = δ_rl B_l` and `Σ B_r = 1`, for both the
    /// diagonal units and their conjugates.
    pub fn projector_residual(&self) -> f64 {
        let m = self.m();
        let id = CMat::identity(m, m);
        let mut worst = 0.0_f64;
        for pick in [0, 1] {
            let p = |k: &EigenCluster| if pick == 0 { k.diag_projector.clone() } else { k.projector.clone() };
            let mut sum = CMat::zeros(m, m);
            for (r, kr) in self.clusters.iter().enumerate() {
                sum += p(kr);
                for (l, kl) in self.clusters.iter().enumerate() {
                    let prod = p(kr) * p(kl);
                    let want = if r == l { p(kl) } else { CMat::zeros(m, m) };
                    worst = worst.max(max_abs(&(prod - want)));
                }
            }
            worst = worst.max(max_abs(&(sum - &id)));
        }
        worst
    }

    pub fn reconstruction_residual(&self, ytau: &CMat) -> f64 {
        let mut diag = CMat::zeros(self.m(), self.m());
        for k in &self.clusters {
            diag += &k.diag_projector * c(k.lambda, 0.0);
        }
        let back = &self.w * diag * self.w.adjoint();
        max_abs(&(back - ytau))
    }
}

/// Eigenvalues descending, clusters at `1e-9`, first nonzero entry of each
/// eigenvector made real and positive.
pub fn eigendecompose(ytau: &CMat) -> CouplingEigen {
    let m = ytau.nrows();
    let e = herm_eigen(ytau);
    let mut w = CMat::zeros(m, m);
    let mut eigenvalues = Vec::with_capacity(m);
    for (k, idx) in (0..m).rev().enumerate() {
        let mut col = e.vectors.column(idx).into_owned();
        if let Some(z) = col.iter().find(|z| z.norm() > 1e-12).copied() {
            col *= z.conj() / z.norm();
        }
        w.set_column(k, &col);
        eigenvalues.push(e.values[idx]);
    }
    let mut clusters = Vec::new();
    let mut start = 0;
    while start < m {
        let mut end = start + 1;
        while end < m && (eigenvalues[end - 1] - eigenvalues[end]).abs() <= CLUSTER_TOL {
            end += 1;
        }
        let mut b = CMat::zeros(m, m);
        for i in start..end {
            b[(i, i)] = c(1.0, 0.0);
        }
        let lambda = eigenvalues[start..end].iter().sum::<f64>() / (end - start) as f64;
        let projector = &w * &b * w.adjoint();
        clusters.push(EigenCluster { lambda, diag_projector: b, projector });
        start = end;
    }
    CouplingEigen { eigenvalues, w, clusters }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SpectrumClass {
    StrictlyPositive,
    Mixed,
    StrictlyNegative,
}

pub fn classify_spectrum(eigen: &CouplingEigen) -> SpectrumClass {
    if eigen.eigenvalues.iter().all(|&l| l > 0.0) {
        SpectrumClass::StrictlyPositive
    } else if eigen.eigenvalues.iter().all(|&l| l < 0.0) {
        SpectrumClass::StrictlyNegative
    } else {
        SpectrumClass::Mixed
    }
}

/// Coupling matrix together with its decomposition.
#[derive(Clone, Debug)]
pub struct Coupling {
    pub ytau: CMat,
    pub eigen: CouplingEigen,
}

impl Coupling {
    pub fn new(spec: &CouplingSpec, basis: &LieBasis) -> Result<Self> {
        let ytau = build_ytau(spec, basis)?;
        let eigen = eigendecompose(&ytau);
        Ok(Self { ytau, eigen })
    }

    /// Wraps an already hermitian, nonsingular matrix.
    pub fn from_matrix(ytau: CMat) -> Result<Self> {
        let herm = max_abs(&(&ytau - ytau.adjoint()));
        if herm > HERMITIAN_TOL {
            return Err(NawcError::InadmissibleY(herm));
        }
        let eigen = eigendecompose(&ytau);
        if let Some(l) = eigen.eigenvalues.iter().map(|l| l.abs()).find(|&l| l < ZERO_THRESHOLD) {
            return Err(NawcError::ZeroEigenvalue(l));
        }
        Ok(Self { ytau, eigen })
    }

    pub fn m(&self) -> usize {
        self.ytau.nrows()
    }

    pub fn class(&self) -> SpectrumClass {
        classify_spectrum(&self.eigen)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sun_algebra::build_su_basis;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn sigma3_half() {
        let b = build_su_basis(2).unwrap();
        let y = build_ytau(&CouplingSpec::vector(vec![0.0, 0.0, 1.0]), &b).unwrap();
        assert_eq!(y[(0, 0)], c(0.5, 0.0));
        assert_eq!(y[(1, 1)], c(-0.5, 0.0));
        let e = eigendecompose(&y);
        assert_eq!(e.eigenvalues, vec![0.5, -0.5]);
        assert!(max_abs(&(&e.w - CMat::identity(2, 2))) == 0.0);
        assert!(max_abs(&(&e.clusters[0].diag_projector - &e.clusters[0].projector)) == 0.0);
    }

    #[test]
    fn zero_coupling_rejected() {
        let b = build_su_basis(2).unwrap();
        let err = build_ytau(&CouplingSpec::vector(vec![0.0; 3]), &b).unwrap_err();
        assert!(err.to_string().contains("zero eigenvalue forbidden"));
    }

    #[test]
    fn non_hermitian_matrix_coupling_rejected() {
        let b = build_su_basis(2).unwrap();
        let id = CMat::identity(2, 2);
        let spec = CouplingSpec::matrix(vec![&id * c(0.0, 1.0), id.clone(), id.clone()]);
        let err = build_ytau(&spec, &b).unwrap_err();
        assert!(err.to_string().contains("inadmissible matrix-valued Y"));
    }

    #[test]
    fn diagonal_family_matrix_form() {
        let b = build_su_basis(2).unwrap();
        let (y1, y2, y3, y4) = (0.3, -0.7, 1.9, 0.4);
        let y = build_ytau(&CouplingSpec::diagonal_family(y1, y2, y3, y4), &b).unwrap();
        let want = CMat::from_row_slice(2, 2, &[c(y3, 0.0), c(y1, -y2), c(y1, y2), c(-y4, 0.0)]);
        assert!(max_abs(&(y - want)) < 1e-15);
    }

    #[test]
    fn diagonal_family_eigenvalue_formula() {
        let b = build_su_basis(2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let y1: f64 = rng.gen_range(-2.0..2.0);
            let y2: f64 = rng.gen_range(-2.0..2.0);
            let y3: f64 = rng.gen_range(-3.0..3.0);
            let root = (y1 * y1 + y2 * y2).sqrt();
            if (y3.abs() - root).abs() < 1e-3 {
                continue;
            }
            let cp = Coupling::new(&CouplingSpec::diagonal_family(y1, y2, y3, -y3), &b).unwrap();
            assert!((cp.eigen.eigenvalues[0] - (y3 + root)).abs() < 1e-12);
            assert!((cp.eigen.eigenvalues[1] - (y3 - root)).abs() < 1e-12);
            let expect = if y3 > root {
                SpectrumClass::StrictlyPositive
            } else if y3 < -root {
                SpectrumClass::StrictlyNegative
            } else {
                SpectrumClass::Mixed
            };
            assert_eq!(cp.class(), expect);
        }
    }

    #[test]
    fn su2_vector_is_mixed() {
        let b = build_su_basis(2).unwrap();
        let y = [0.4, -1.1, 0.8];
        let cp = Coupling::new(&CouplingSpec::vector(y.to_vec()), &b).unwrap();
        let norm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
        assert!((cp.eigen.eigenvalues[0] - norm / 2.0).abs() < 1e-12);
        assert!((cp.eigen.eigenvalues[1] + norm / 2.0).abs() < 1e-12);
        assert_eq!(cp.class(), SpectrumClass::Mixed);
    }

    #[test]
    fn negative_diagonal_classified() {
        let y = CMat::from_diagonal(&nalgebra::DVector::from_vec(vec![c(-1.0, 0.0), c(-2.0, 0.0)]));
        let cp = Coupling::from_matrix(y).unwrap();
        assert_eq!(cp.class(), SpectrumClass::StrictlyNegative);
        assert_eq!(cp.eigen.eigenvalues, vec![-1.0, -2.0]);
    }

    #[test]
    fn degenerate_spectrum_single_cluster() {
        let b = build_su_basis(2).unwrap();
        let cp = Coupling::new(&CouplingSpec::diagonal_family(0.0, 0.0, 1.5, -1.5), &b).unwrap();
        assert_eq!(cp.eigen.clusters.len(), 1);
        assert!(cp.eigen.projector_residual() < 1e-12);
        assert!(cp.eigen.reconstruction_residual(&cp.ytau) < 1e-12);
    }

    #[test]
    fn phase_fixing_makes_first_entry_real_positive() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let b = build_su_basis(3).unwrap();
        let y: Vec<f64> = (0..8).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let cp = Coupling::new(&CouplingSpec::vector(y), &b).unwrap();
        for k in 0..3 {
            let first = cp.eigen.w.column(k).iter().find(|z| z.norm() > 1e-12).copied().unwrap();
            assert!(first.im.abs() < 1e-15 && first.re > 0.0);
        }
    }

    proptest! {
        #[test]
        fn decomposition_invariants(y in proptest::collection::vec(-2.0f64..2.0, 8), t in -5.0f64..5.0) {
            let b = build_su_basis(3).unwrap();
            if let Ok(cp) = Coupling::new(&CouplingSpec::vector(y), &b) {
                prop_assert!(cp.eigen.projector_residual() < 1e-12);
                prop_assert!(cp.eigen.reconstruction_residual(&cp.ytau) < 1e-12);
                prop_assert!(cp.eigen.eigenvalues.windows(2).all(|w| w[0] >= w[1]));
                let u = (&cp.ytau * c(0.0, t)).exp();
                prop_assert!(max_abs(&(&u * u.adjoint() - CMat::identity(3, 3))) < 1e-10);
            }
        }
    }
}
