//! Deformed coordinates on a momentum-diagonal grid, where the generators
//! `P_k ⊗ Yτ` have an exact joint spectrum.

use nalgebra::DMatrix;

use super::{add, apply_local, norm, rel_err, sub, Basis, GridRep};
use crate::coupling::CouplingEigen;
use crate::error::{NawcError, Result};
use crate::linalg::{c, CVec, C64};
use crate::warped_core::diagonal::DiagonalWarp;
use crate::warped_core::Metric;

#[derive(Clone, Debug)]
pub struct MoyalSetup {
    pub grid: GridRep,
    pub theta: DMatrix<f64>,
    pub coupling: CouplingEigen,
    /// `(ΘK)_i` at each momentum grid point.
    theta_k: Vec<Vec<f64>>,
}

impl MoyalSetup {
    pub fn new(grid: GridRep, theta: DMatrix<f64>, coupling: CouplingEigen) -> Result<Self> {
        if grid.basis != Basis::Momentum {
            return Err(NawcError::Invalid("deformed coordinates need a momentum-diagonal grid".into()));
        }
        if theta.shape() != (2, 2) {
            return Err(NawcError::Dimension("theta must be 2x2".into()));
        }
        let theta_k = (0..2)
            .map(|i| {
                (0..grid.points())
                    .map(|j| {
                        let k = grid.wavevector(j);
                        theta[(i, 0)] * k[0] + theta[(i, 1)] * k[1]
                    })
                    .collect()
            })
            .collect();
        Ok(Self { grid, theta, coupling, theta_k })
    }

    pub fn m(&self) -> usize {
        self.coupling.m()
    }

    pub fn spectral_warp(&self) -> Result<DiagonalWarp> {
        let points = (0..self.grid.points()).map(|j| self.grid.wavevector(j).to_vec()).collect();
        DiagonalWarp::new(points, &self.theta, Metric::Euclidean, self.coupling.clone())
    }

    /// `X^i ⊗ 1 + (ΘP)^i ⊗ Yτ` applied to `v`.
    pub fn coordinate_closed(&self, axis: usize, v: &[C64]) -> Vec<C64> {
        let m = self.m();
        let x = self.grid.position(axis).apply(v, m);
        add(&x, &apply_local(&[(&self.theta_k[axis], &self.coupling.matrix())], v, m))
    }

    pub fn coordinate_spectral(&self, warp: &DiagonalWarp, axis: usize, v: &[C64]) -> Vec<C64> {
        warp.apply(&self.grid.position(axis), v)
    }

    /// `p·X^{Θτ}` applied to `v`, closed form.
    pub fn pairing_closed(&self, p: [f64; 2], v: &[C64]) -> Vec<C64> {
        let a = self.coordinate_closed(0, v);
        let b = self.coordinate_closed(1, v);
        a.iter().zip(&b).map(|(x, y)| x * p[0] + y * p[1]).collect()
    }

    /// Crude bound on `‖p·X^{Θτ}‖` used to size exponential steps.
    fn pairing_bound(&self, p: [f64; 2]) -> f64 {
        let lam = self.coupling.lambdas().iter().fold(0.0_f64, |a, l| a.max(l.abs()));
        let kmax = self.grid.k.iter().fold(0.0_f64, |a, k| a.max(k.abs()));
        let tp = (self.theta.transpose() * nalgebra::Vector2::new(p[0], p[1])).norm();
        self.grid.l * (p[0].abs() + p[1].abs()) + tp * kmax * 2f64.sqrt() * lam
    }

    /// `exp(i p·X^{Θτ}) v` by stepped Taylor series.
    pub fn weyl(&self, p: [f64; 2], v: &[C64]) -> Vec<C64> {
        let steps = (self.pairing_bound(p) / 0.25).ceil().max(1.0) as usize;
        let h = 1.0 / steps as f64;
        let mut cur = v.to_vec();
        for _ in 0..steps {
            let mut term = cur.clone();
            let mut acc = cur.clone();
            for order in 1..60 {
                term = self.pairing_closed(p, &term).into_iter().map(|z| z * c(0.0, h / order as f64)).collect();
                acc = add(&acc, &term);
                if norm(&term) < 1e-18 * norm(&acc) {
                    break;
                }
            }
            cur = acc;
        }
        cur
    }
}

#[derive(Clone, Debug)]
pub struct MoyalReport {
    pub closed_vs_spectral: f64,
    /// `[X^1, X^2]` vs `−2iΘ^{12} ⊗ Yτ`, spectral path.
    pub commutator_spectral: f64,
    pub commutator_closed: f64,
    /// `‖[X^{Θτ}_μ, 1 ⊗ Yτ]ψ‖ / ‖ψ‖`.
    pub centrality: f64,
    pub selfadjoint: f64,
}

pub fn moyal_weyl_check(setup: &MoyalSetup, vectors: &[CVec]) -> Result<MoyalReport> {
    let warp = setup.spectral_warp()?;
    let m = setup.m();
    let y = setup.coupling.matrix();
    let ones = vec![1.0; setup.grid.points()];
    let want_op = &y * c(0.0, -2.0 * setup.theta[(0, 1)]);
    let mut rep = MoyalReport { closed_vs_spectral: 0.0, commutator_spectral: 0.0, commutator_closed: 0.0, centrality: 0.0, selfadjoint: 0.0 };
    for v in vectors {
        let v = v.as_slice();
        for axis in 0..2 {
            let cl = setup.coordinate_closed(axis, v);
            let sp = setup.coordinate_spectral(&warp, axis, v);
            rep.closed_vs_spectral = rep.closed_vs_spectral.max(rel_err(&sp, &cl, v));
            let yv = apply_local(&[(&ones, &y)], v, m);
            let xy = setup.coordinate_spectral(&warp, axis, &yv);
            let yx = apply_local(&[(&ones, &y)], &sp, m);
            rep.centrality = rep.centrality.max(norm(&sub(&xy, &yx)) / norm(v));
        }
        let want = apply_local(&[(&ones, &want_op)], v, m);
        let s12 = setup.coordinate_spectral(&warp, 0, &setup.coordinate_spectral(&warp, 1, v));
        let s21 = setup.coordinate_spectral(&warp, 1, &setup.coordinate_spectral(&warp, 0, v));
        rep.commutator_spectral = rep.commutator_spectral.max(rel_err(&sub(&s12, &s21), &want, v));
        let c12 = setup.coordinate_closed(0, &setup.coordinate_closed(1, v));
        let c21 = setup.coordinate_closed(1, &setup.coordinate_closed(0, v));
        rep.commutator_closed = rep.commutator_closed.max(rel_err(&sub(&c12, &c21), &want, v));
    }
    rep.selfadjoint = selfadjoint_residual(setup, &warp);
    Ok(rep)
}

/// Largest entry of `X^{Θτ} − (X^{Θτ})†` over both coordinates.
pub fn selfadjoint_residual(setup: &MoyalSetup, warp: &DiagonalWarp) -> f64 {
    let y = setup.coupling.matrix();
    let y_res = (&y - y.adjoint()).iter().fold(0.0_f64, |a, z| a.max(z.norm()));
    (0..2).map(|axis| warp.hermiticity_residual(&setup.grid.position(axis))).fold(y_res, f64::max)
}

#[derive(Clone, Debug)]
pub struct WeylTwistReport {
    /// `e^{ip·X}e^{ik·X}ψ` vs `e^{i(p+k)·X}e^{i(pΘk)Yτ}ψ`.
    pub residual: f64,
    /// Same comparison with the opposite sign in the central factor.
    pub opposite_sign: f64,
}

pub fn weyl_twist_check(setup: &MoyalSetup, p: [f64; 2], k: [f64; 2], psi: &CVec) -> WeylTwistReport {
    let v = psi.as_slice();
    let m = setup.m();
    let lhs = setup.weyl(p, &setup.weyl(k, v));
    let ptk: f64 = (0..2).map(|i| (0..2).map(|j| p[i] * setup.theta[(i, j)] * k[j]).sum::<f64>()).sum();
    let ones = vec![1.0; setup.grid.points()];
    let sum = [p[0] + k[0], p[1] + k[1]];
    let twisted = |sign: f64| {
        let phase = setup.coupling.apply_fn(|l| c(0.0, sign * ptk * l).exp());
        setup.weyl(sum, &apply_local(&[(&ones, &phase)], v, m))
    };
    WeylTwistReport { residual: norm(&sub(&lhs, &twisted(1.0))) / norm(v), opposite_sign: norm(&sub(&lhs, &twisted(-1.0))) / norm(v) }
}

