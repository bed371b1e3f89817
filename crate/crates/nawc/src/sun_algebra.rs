//! Generator bases of su(m) in the defining representation and their
//! structure constants.
//!
//! Generators are the generalized Gell-Mann matrices halved, so that
//! `tr(τ_α τ_β) = δ_αβ / 2`. For `m = 2` they are the halved Pauli matrices,
//! for `m = 3` the halved Gell-Mann matrices, in the customary order.

use crate::error::{NawcError, Result};
use crate::linalg::{c, commutator, herm_eigen, max_abs, CMat, C64};

pub const NORMALIZATION: f64 = 0.5;
const CLEAN: f64 = 1e-12;

#[derive(Clone, Debug)]
pub struct LieBasis {
    pub m: usize,
    pub generators: Vec<CMat>,
    pub normalization: f64,
}

impl LieBasis {
    pub fn dim(&self) -> usize {
        self.generators.len()
    }

    /// `Σ_α v_α τ_α` for real coefficients.
    pub fn contract(&self, v: &[f64]) -> CMat {
        let mut out = CMat::zeros(self.m, self.m);
        for (t, &x) in self.generators.iter().zip(v) {
            out += t * c(x, 0.0);
        }
        out
    }

    /// Gram matrix `tr(τ_α τ_β)`.
    pub fn trace_metric(&self) -> CMat {
        let n = self.dim();
        CMat::from_fn(n, n, |a, b| (&self.generators[a] * &self.generators[b]).trace())
    }
}

/// Totally antisymmetric real structure constants, stored densely.
#[derive(Clone, Debug)]
pub struct StructureConstants {
    pub dim: usize,
    data: Vec<f64>,
}

impl StructureConstants {
    #[inline]
    pub fn get(&self, a: usize, b: usize, g: usize) -> f64 {
        self.data[(a * self.dim + b) * self.dim + g]
    }

    /// Largest `|f_αβγ + f_βαγ|`.
    pub fn antisymmetry_residual(&self) -> f64 {
        let n = self.dim;
        let mut r = 0.0_f64;
        for a in 0..n {
            for b in 0..n {
                for g in 0..n {
                    r = r.max((self.get(a, b, g) + self.get(b, a, g)).abs());
                }
            }
        }
        r
    }
}

fn unit(m: usize, j: usize, k: usize) -> CMat {
    let mut e = CMat::zeros(m, m);
    e[(j, k)] = c(1.0, 0.0);
    e
}

/// Halved generalized Gell-Mann basis of su(m).
pub fn build_su_basis(m: usize) -> Result<LieBasis> {
    if m < 2 {
        return Err(NawcError::NoGenerators(m));
    }
    let half = c(0.5, 0.0);
    let mut gens = Vec::with_capacity(m * m - 1);
    for k in 1..m {
        for j in 0..k {
            gens.push((unit(m, j, k) + unit(m, k, j)) * half);
            gens.push((unit(m, j, k) * c(0.0, -1.0) + unit(m, k, j) * c(0.0, 1.0)) * half);
        }
        let l = k as f64;
        let scale = (2.0 / (l * (l + 1.0))).sqrt();
        let mut d = CMat::zeros(m, m);
        for i in 0..k {
            d[(i, i)] = c(scale, 0.0);
        }
        d[(k, k)] = c(-l * scale, 0.0);
        gens.push(d * half);
    }
    Ok(LieBasis { m, generators: gens, normalization: NORMALIZATION })
}

/// Extracts `f_αβγ` by trace pairing against the inverse trace metric, then
/// antisymmetrizes and zeroes entries below `1e-12`.
pub fn structure_constants(basis: &LieBasis) -> Result<StructureConstants> {
    let n = basis.dim();
    let metric = basis.trace_metric();
    let smallest = herm_eigen(&metric).values.first().copied().unwrap_or(0.0);
    if smallest < CLEAN {
        return Err(NawcError::DegenerateBasis(smallest));
    }
    let inv = metric.try_inverse().ok_or(NawcError::DegenerateBasis(smallest))?;
    let mut raw = vec![0.0; n * n * n];
    for a in 0..n {
        for b in 0..n {
            let comm = commutator(&basis.generators[a], &basis.generators[b]);
            let pair: Vec<C64> = (0..n).map(|g| (&comm * &basis.generators[g]).trace()).collect();
            for d in 0..n {
                let mut s = C64::new(0.0, 0.0);
                for g in 0..n {
                    s += pair[g] * inv[(g, d)];
                }
                // [τ_a, τ_b] = i f_abd τ_d
                raw[(a * n + b) * n + d] = (s * c(0.0, -1.0)).re;
            }
        }
    }
    let mut data = vec![0.0; n * n * n];
    for a in 0..n {
        for b in 0..n {
            for d in 0..n {
                let v = 0.5 * (raw[(a * n + b) * n + d] - raw[(b * n + a) * n + d]);
                data[(a * n + b) * n + d] = if v.abs() < CLEAN { 0.0 } else { v };
            }
        }
    }
    Ok(StructureConstants { dim: n, data })
}

/// `max_αβ ‖[τ_α, τ_β] − i f_αβγ τ_γ‖` entrywise.
pub fn reconstruction_residual(basis: &LieBasis, f: &StructureConstants) -> f64 {
    let n = basis.dim();
    let mut worst = 0.0_f64;
    for a in 0..n {
        for b in 0..n {
            let mut rhs = CMat::zeros(basis.m, basis.m);
            for g in 0..n {
                let v = f.get(a, b, g);
                if v != 0.0 {
                    rhs += &basis.generators[g] * c(0.0, v);
                }
            }
            let lhs = commutator(&basis.generators[a], &basis.generators[b]);
            worst = worst.max(max_abs(&(lhs - rhs)));
        }
    }
    worst
}

/// Largest entry of `[τ_a,[τ_b,τ_c]] + [τ_b,[τ_c,τ_a]] + [τ_c,[τ_a,τ_b]]`.
pub fn jacobi_residual(basis: &LieBasis) -> f64 {
    let g = &basis.generators;
    let n = basis.dim();
    let mut worst = 0.0_f64;
    for a in 0..n {
        for b in 0..n {
            let ab = commutator(&g[a], &g[b]);
            for k in 0..n {
                let s = commutator(&g[a], &commutator(&g[b], &g[k]))
                    + commutator(&g[b], &commutator(&g[k], &g[a]))
                    + commutator(&g[k], &ab);
                worst = worst.max(max_abs(&s));
            }
        }
    }
    worst
}

/// Hermiticity, tracelessness and trace-orthonormality, entrywise.
pub fn basis_residual(basis: &LieBasis) -> f64 {
    let mut worst = 0.0_f64;
    for t in &basis.generators {
        worst = worst.max(max_abs(&(t - t.adjoint())));
        worst = worst.max(t.trace().norm());
    }
    let metric = basis.trace_metric();
    let target = CMat::identity(basis.dim(), basis.dim()) * c(basis.normalization, 0.0);
    worst.max(max_abs(&(metric - target)))
}

/// Worst unitarity / unit-determinant defect of `exp(i t τ_α)` over the basis.
pub fn exponential_residual(basis: &LieBasis, t: f64) -> f64 {
    let id = CMat::identity(basis.m, basis.m);
    let mut worst = 0.0_f64;
    for g in &basis.generators {
        let u = (g * c(0.0, t)).exp();
        worst = worst.max(max_abs(&(&u * u.adjoint() - &id)));
        worst = worst.max((u.determinant() - c(1.0, 0.0)).norm());
    }
    worst
}
