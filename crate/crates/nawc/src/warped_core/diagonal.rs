//! Matrix-free non-abelian warp for generators that are diagonal in the
//! working basis.
//!
//! Each basis vector is then its own spectral point, and the warped operator
//! has entries `A_jk exp(iλ_r⟨Θg_j, g_j − g_k⟩)` in the `r`-th coupling block.
//! Operators are only visited row by row, so large grids never materialize.

use nalgebra::DMatrix;

use super::{skew_residual, Metric, SKEW_TOL};
use crate::coupling::CouplingEigen;
use crate::error::{NawcError, Result};
use crate::linalg::{cis, CMat, C64};

/// Sparse row access to an operator on `C^N`.
pub trait RowAccess {
    fn dim(&self) -> usize;
    fn visit_row(&self, j: usize, f: &mut dyn FnMut(usize, C64));
    fn entry(&self, j: usize, k: usize) -> C64;
}

impl RowAccess for CMat {
    fn dim(&self) -> usize {
        self.nrows()
    }

    fn visit_row(&self, j: usize, f: &mut dyn FnMut(usize, C64)) {
        for k in 0..self.ncols() {
            f(k, self[(j, k)]);
        }
    }

    fn entry(&self, j: usize, k: usize) -> C64 {
        self[(j, k)]
    }
}

#[derive(Clone, Debug)]
pub struct DiagonalWarp {
    pub points: Vec<Vec<f64>>,
    shifts: Vec<Vec<f64>>,
    pub metric: Metric,
    pub coupling: CouplingEigen,
}

impl DiagonalWarp {
    pub fn new(points: Vec<Vec<f64>>, theta: &DMatrix<f64>, metric: Metric, coupling: CouplingEigen) -> Result<Self> {
        let r = skew_residual(theta, metric);
        if r > SKEW_TOL {
            return Err(NawcError::NotSkew(r));
        }
        let d = theta.nrows();
        if points.iter().any(|p| p.len() != d) {
            return Err(NawcError::Dimension("spectral points must match theta".into()));
        }
        let shifts = points
            .iter()
            .map(|g| (0..d).map(|mu| (0..d).map(|nu| theta[(mu, nu)] * g[nu]).sum()).collect())
            .collect();
        Ok(Self { points, shifts, metric, coupling })
    }

    pub fn n(&self) -> usize {
        self.points.len()
    }

    pub fn m(&self) -> usize {
        self.coupling.m()
    }

    /// `⟨Θg_j, g_j − g_k⟩`.
    #[inline]
    pub fn phase(&self, j: usize, k: usize) -> f64 {
        let (gj, gk, s) = (&self.points[j], &self.points[k], &self.shifts[j]);
        (0..gj.len()).map(|mu| self.metric.sign(mu) * s[mu] * (gj[mu] - gk[mu])).sum()
    }

    /// The `m × m` block `(A^{Θτ})_{jk}`.
    pub fn block(&self, a: &dyn RowAccess, j: usize, k: usize) -> CMat {
        let ajk = a.entry(j, k);
        let ph = self.phase(j, k);
        let mut out = CMat::zeros(self.m(), self.m());
        for cl in &self.coupling.clusters {
            out += &cl.projector * (ajk * cis(cl.lambda * ph));
        }
        out
    }

    /// `A^{Θτ} v` for `v` laid out as `v[j·m + a]`.
    pub fn apply(&self, a: &dyn RowAccess, v: &[C64]) -> Vec<C64> {
        let (n, m) = (self.n(), self.m());
        assert_eq!(v.len(), n * m);
        let projected: Vec<Vec<C64>> = self
            .coupling
            .clusters
            .iter()
            .map(|cl| {
                let mut pv = vec![C64::new(0.0, 0.0); n * m];
                for k in 0..n {
                    for r in 0..m {
                        let mut s = C64::new(0.0, 0.0);
                        for q in 0..m {
                            s += cl.projector[(r, q)] * v[k * m + q];
                        }
                        pv[k * m + r] = s;
                    }
                }
                pv
            })
            .collect();
        let lambdas = self.coupling.lambdas();
        let mut out = vec![C64::new(0.0, 0.0); n * m];
        for j in 0..n {
            let mut acc = vec![C64::new(0.0, 0.0); m];
            a.visit_row(j, &mut |k, ajk| {
                let ph = self.phase(j, k);
                for (pv, &l) in projected.iter().zip(&lambdas) {
                    let w = ajk * cis(l * ph);
                    for r in 0..m {
                        acc[r] += w * pv[k * m + r];
                    }
                }
            });
            out[j * m..(j + 1) * m].copy_from_slice(&acc);
        }
        out
    }

    /// `max_{j,k} ‖(A^{Θτ})_{jk} − (A^{Θτ})_{kj}†‖` over the nonzero pattern of `A`.
    pub fn hermiticity_residual(&self, a: &dyn RowAccess) -> f64 {
        let mut worst = 0.0_f64;
        for j in 0..self.n() {
            let mut cols = Vec::new();
            a.visit_row(j, &mut |k, _| cols.push(k));
            for k in cols {
                let d = self.block(a, j, k) - self.block(a, k, j).adjoint();
                worst = worst.max(d.iter().fold(0.0_f64, |m, z| m.max(z.norm())));
            }
        }
        worst
    }
}
