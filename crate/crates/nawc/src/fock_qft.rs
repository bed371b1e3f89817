//! Truncated bosonic Fock space over a finite set of on-shell modes, with
//! deformed ladder operators and fields on `H ⊗ C^m`.
//!
//! Fock-space operators are tensored on the left: `(A ⊗ B)` acts on the
//! vector index `s·m + a` for occupation state `s` and internal index `a`.

use std::collections::HashMap;

use nalgebra::DMatrix;

use crate::coupling::CouplingEigen;
use crate::error::{NawcError, Result};
use crate::linalg::{c, cis, kron, CMat, CVec, C64};
use crate::warped_core::{skew_residual, Metric, SKEW_TOL};

#[derive(Clone, Debug)]
pub struct ModeSet {
    pub mass: f64,
    /// Spatial momenta, one component each (`d = 2`).
    pub momenta: Vec<f64>,
}

impl ModeSet {
    pub fn new(mass: f64, momenta: Vec<f64>) -> Result<Self> {
        if mass <= 0.0 {
            return Err(NawcError::Invalid(format!("mass must be positive, got {mass}")));
        }
        for (i, p) in momenta.iter().enumerate() {
            if momenta[..i].iter().any(|q| (q - p).abs() < 1e-12) {
                return Err(NawcError::Invalid(format!("duplicate mode momentum {p}")));
            }
        }
        if momenta.is_empty() {
            return Err(NawcError::Invalid("mode set is empty".into()));
        }
        Ok(Self { mass, momenta })
    }

    pub fn len(&self) -> usize {
        self.momenta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.momenta.is_empty()
    }

    pub fn energy(&self, i: usize) -> f64 {
        (self.mass * self.mass + self.momenta[i] * self.momenta[i]).sqrt()
    }

    /// On-shell `p = (ω_p, p)`.
    pub fn four_momentum(&self, i: usize) -> [f64; 2] {
        [self.energy(i), self.momenta[i]]
    }
}

#[derive(Clone, Debug)]
pub struct FockBasis {
    pub modes: ModeSet,
    pub ncut: usize,
    pub states: Vec<Vec<usize>>,
    index: HashMap<Vec<usize>, usize>,
}

impl FockBasis {
    pub fn new(modes: ModeSet, ncut: usize) -> Self {
        let k = modes.len();
        let mut states = Vec::new();
        let mut cur = vec![0; k];
        enumerate(&mut cur, 0, ncut, &mut states);
        states.sort_by_key(|s| (s.iter().sum::<usize>(), std::cmp::Reverse(s.clone())));
        let index = states.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect();
        Self { modes, ncut, states, index }
    }

    pub fn dim(&self) -> usize {
        self.states.len()
    }

    pub fn vacuum(&self) -> usize {
        self.index[&vec![0; self.modes.len()]]
    }

    pub fn index_of(&self, occ: &[usize]) -> Option<usize> {
        self.index.get(occ).copied()
    }

    pub fn number(&self, s: usize) -> usize {
        self.states[s].iter().sum()
    }

    pub fn total_momentum(&self, s: usize) -> [f64; 2] {
        let mut p = [0.0; 2];
        for (i, &n) in self.states[s].iter().enumerate() {
            let q = self.modes.four_momentum(i);
            p[0] += n as f64 * q[0];
            p[1] += n as f64 * q[1];
        }
        p
    }

    pub fn annihilator(&self, i: usize) -> CMat {
        let d = self.dim();
        let mut a = CMat::zeros(d, d);
        for (s, occ) in self.states.iter().enumerate() {
            if occ[i] == 0 {
                continue;
            }
            let mut lower = occ.clone();
            lower[i] -= 1;
            let t = self.index[&lower];
            a[(t, s)] = c((occ[i] as f64).sqrt(), 0.0);
        }
        a
    }

    pub fn creator(&self, i: usize) -> CMat {
        self.annihilator(i).adjoint()
    }

    pub fn number_operator(&self) -> CMat {
        CMat::from_diagonal(&CVec::from_iterator(self.dim(), (0..self.dim()).map(|s| c(self.number(s) as f64, 0.0))))
    }

    /// Largest deviation of `[a_i, a*_j]` from `δ_ij` on states below the cutoff.
    pub fn ccr_residual(&self) -> f64 {
        let k = self.modes.len();
        let mut worst = 0.0_f64;
        for i in 0..k {
            for j in 0..k {
                let (a, ad) = (self.annihilator(i), self.creator(j));
                let comm = &a * &ad - &ad * &a;
                for s in (0..self.dim()).filter(|&s| self.number(s) < self.ncut) {
                    for t in 0..self.dim() {
                        let want = if i == j && s == t { 1.0 } else { 0.0 };
                        worst = worst.max((comm[(t, s)] - c(want, 0.0)).norm());
                    }
                }
            }
        }
        worst
    }
}

fn enumerate(cur: &mut Vec<usize>, pos: usize, left: usize, out: &mut Vec<Vec<usize>>) {
    if pos == cur.len() {
        out.push(cur.clone());
        return;
    }
    for n in 0..=left {
        cur[pos] = n;
        enumerate(cur, pos + 1, left - n, out);
    }
    cur[pos] = 0;
}

/// Discretized transforms `f⁺, f⁻` with quadrature weights folded in.
#[derive(Clone, Debug, PartialEq)]
pub struct SmearingFunction {
    pub plus: Vec<C64>,
    pub minus: Vec<C64>,
}

impl SmearingFunction {
    /// Transforms of a real function: `f⁻ = conj(f⁺)`.
    pub fn real(plus: Vec<C64>) -> Self {
        let minus = plus.iter().map(|z| z.conj()).collect();
        Self { plus, minus }
    }

    /// Transforms of `f̄`.
    pub fn conj(&self) -> Self {
        Self { plus: self.minus.iter().map(|z| z.conj()).collect(), minus: self.plus.iter().map(|z| z.conj()).collect() }
    }

    pub fn scale(&self, s: C64) -> Self {
        Self { plus: self.plus.iter().map(|z| z * s).collect(), minus: self.minus.iter().map(|z| z * s).collect() }
    }

    pub fn add(&self, other: &Self) -> Self {
        Self { plus: self.plus.iter().zip(&other.plus).map(|(a, b)| a + b).collect(), minus: self.minus.iter().zip(&other.minus).map(|(a, b)| a + b).collect() }
    }

    /// `sqrt(‖f⁺‖² + ‖f⁻‖²)`.
    pub fn norm(&self) -> f64 {
        self.plus.iter().chain(&self.minus).map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn norm_plus(&self) -> f64 {
        self.plus.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn norm_minus(&self) -> f64 {
        self.minus.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }
}

/// Deformed ladder operators with exponent sign `sigma`:
/// `a_{Θτ}(p) = e^{iσ p·ΘP ⊗ Yτ}(a(p) ⊗ 1)`.
#[derive(Clone, Debug)]
pub struct DeformedFock {
    pub basis: FockBasis,
    pub theta: DMatrix<f64>,
    pub coupling: CouplingEigen,
    pub sigma: f64,
}

impl DeformedFock {
    pub fn new(basis: FockBasis, theta: DMatrix<f64>, coupling: CouplingEigen, sigma: f64) -> Result<Self> {
        if theta.shape() != (2, 2) {
            return Err(NawcError::Dimension("theta must be 2x2".into()));
        }
        let r = skew_residual(&theta, Metric::Minkowski);
        if r > SKEW_TOL {
            return Err(NawcError::NotSkew(r));
        }
        if sigma.abs() != 1.0 {
            return Err(NawcError::Invalid(format!("exponent sign must be ±1, got {sigma}")));
        }
        Ok(Self { basis, theta, coupling, sigma })
    }

    pub fn m(&self) -> usize {
        self.coupling.m()
    }

    pub fn dim(&self) -> usize {
        self.basis.dim() * self.m()
    }

    /// `p·Θq` with the Minkowski pairing.
    pub fn form(&self, p: [f64; 2], q: [f64; 2]) -> f64 {
        let tq = [self.theta[(0, 0)] * q[0] + self.theta[(0, 1)] * q[1], self.theta[(1, 0)] * q[0] + self.theta[(1, 1)] * q[1]];
        Metric::Minkowski.pair(&p, &tq)
    }

    fn lift(&self, a: &CMat) -> CMat {
        kron(a, &CMat::identity(self.m(), self.m()))
    }

    /// Left-multiplies by `e^{i s p·ΘP ⊗ Yτ}` with `P` read on the output state.
    fn phased(&self, a: &CMat, p: [f64; 2], s: f64) -> CMat {
        let (d, m) = (self.basis.dim(), self.m());
        let mut out = CMat::zeros(d * m, d * m);
        for t in 0..d {
            let phase = self.form(p, self.basis.total_momentum(t));
            let block = self.coupling.apply_fn(|l| cis(s * l * phase));
            for u in 0..d {
                let e = a[(t, u)];
                if e == c(0.0, 0.0) {
                    continue;
                }
                out.view_mut((t * m, u * m), (m, m)).copy_from(&(&block * e));
            }
        }
        out
    }

    pub fn annihilator(&self, i: usize) -> CMat {
        self.phased(&self.basis.annihilator(i), self.basis.modes.four_momentum(i), self.sigma)
    }

    pub fn creator(&self, i: usize) -> CMat {
        self.annihilator(i).adjoint()
    }

    /// `e^{−iσ p·ΘP ⊗ Yτ}(a*(p) ⊗ 1)`, assembled independently of the adjoint.
    pub fn creator_closed(&self, i: usize) -> CMat {
        self.phased(&self.basis.creator(i), self.basis.modes.four_momentum(i), -self.sigma)
    }

    pub fn undeformed_annihilator(&self, i: usize) -> CMat {
        self.lift(&self.basis.annihilator(i))
    }

    /// `Σ_i f⁻_i a_{Θτ}(p_i) + f⁺_i a*_{Θτ}(p_i)`.
    pub fn field(&self, f: &SmearingFunction) -> CMat {
        let mut out = CMat::zeros(self.dim(), self.dim());
        for i in 0..self.basis.modes.len() {
            let a = self.annihilator(i);
            out += &a * f.minus[i] + a.adjoint() * f.plus[i];
        }
        out
    }

    pub fn free_field(&self, f: &SmearingFunction) -> CMat {
        let mut out = CMat::zeros(self.basis.dim(), self.basis.dim());
        for i in 0..self.basis.modes.len() {
            let a = self.basis.annihilator(i);
            out += &a * f.minus[i] + a.adjoint() * f.plus[i];
        }
        self.lift(&out)
    }

    /// `Σ_r e^{iλ_r x·P} ⊗ Π_r`.
    pub fn translation(&self, x: [f64; 2]) -> CMat {
        let (d, m) = (self.basis.dim(), self.m());
        let mut out = CMat::zeros(d * m, d * m);
        for s in 0..d {
            let px = Metric::Minkowski.pair(&x, &self.basis.total_momentum(s));
            out.view_mut((s * m, s * m), (m, m)).copy_from(&self.coupling.apply_fn(|l| cis(l * px)));
        }
        out
    }

    /// `Ω ⊗ e` as a vector.
    pub fn vacuum_vector(&self, e: &[C64]) -> CVec {
        let mut v = CVec::zeros(self.dim());
        let s = self.basis.vacuum();
        for (a, &x) in e.iter().enumerate() {
            v[s * self.m() + a] = x;
        }
        v
    }

    /// `Π_{l<j} e^{i sign p_l·Θp_j ⊗ Yτ}`.
    pub fn twist_matrix(&self, momenta: &[[f64; 2]], sign: f64) -> CMat {
        let mut total = 0.0;
        for l in 0..momenta.len() {
            for j in l + 1..momenta.len() {
                total += self.form(momenta[l], momenta[j]);
            }
        }
        self.coupling.apply_fn(|lam| cis(sign * lam * total))
    }
}

#[derive(Clone, Debug)]
pub struct LadderReport {
    pub creator_adjoint_vs_closed: f64,
    pub vacuum_annihilated: f64,
    /// Largest `|‖a_{Θτ}Ψ‖ − ‖(a⊗1)Ψ‖|` over basis vectors.
    pub norm_preservation: f64,
}

pub fn ladder_check(df: &DeformedFock) -> LadderReport {
    let mut rep = LadderReport { creator_adjoint_vs_closed: 0.0, vacuum_annihilated: 0.0, norm_preservation: 0.0 };
    let e: Vec<C64> = (0..df.m()).map(|a| c(1.0 + a as f64, -0.5 * a as f64)).collect();
    let omega = df.vacuum_vector(&e);
    for i in 0..df.basis.modes.len() {
        let a = df.annihilator(i);
        let a0 = df.undeformed_annihilator(i);
        rep.creator_adjoint_vs_closed = rep.creator_adjoint_vs_closed.max(crate::linalg::max_abs(&(a.adjoint() - df.creator_closed(i))));
        rep.vacuum_annihilated = rep.vacuum_annihilated.max((&a * &omega).norm());
        for col in 0..df.dim() {
            let d = (a.column(col).norm() - a0.column(col).norm()).abs();
            rep.norm_preservation = rep.norm_preservation.max(d);
        }
    }
    rep
}

#[derive(Clone, Debug)]
pub struct FieldReport {
    /// `‖φ(f)† − φ(f̄)‖`, entrywise max.
    pub hermiticity: f64,
    /// `‖(φ_{Θτ}(f) − φ(f)⊗1)(Ω⊗e)‖`.
    pub vacuum_action: f64,
    /// Smallest slack of the single-power bound; negative means violated.
    pub bound_slack: f64,
    /// Smallest relative slack of the power bound for `l ≤ 3`.
    pub power_slack: f64,
    pub linearity: f64,
}

pub fn field_check(df: &DeformedFock, f: &SmearingFunction, g: &SmearingFunction, alpha: C64) -> FieldReport {
    let phi = df.field(f);
    let hermiticity = crate::linalg::max_abs(&(phi.adjoint() - df.field(&f.conj())));
    let m = df.m();
    let mut vacuum_action = 0.0_f64;
    for a in 0..m {
        let mut e = vec![c(0.0, 0.0); m];
        e[a] = c(1.0, 0.0);
        let om = df.vacuum_vector(&e);
        vacuum_action = vacuum_action.max(((&phi - df.free_field(f)) * &om).norm());
    }
    let n_plus_one = df.lift(&(df.basis.number_operator() + CMat::identity(df.basis.dim(), df.basis.dim())));
    let coef = f.norm_plus() + f.norm_minus();
    let mut bound_slack = f64::INFINITY;
    let mut power_slack = f64::INFINITY;
    for s in 0..df.basis.dim() {
        let k = df.basis.number(s);
        for a in 0..m {
            let mut psi = CVec::zeros(df.dim());
            psi[s * m + a] = c(1.0, 0.0);
            if k < df.basis.ncut {
                let lhs = (&phi * &psi).norm();
                let rhs = coef * (n_plus_one.map(|z| z.sqrt()) * &psi).norm();
                bound_slack = bound_slack.min(rhs - lhs);
            }
            let mut cur = psi.clone();
            for l in 1..=3usize {
                if k + l > df.basis.ncut {
                    break;
                }
                cur = &phi * &cur;
                let fact: f64 = ((k + 1)..=(k + l)).map(|x| x as f64).product();
                let rhs = 2f64.powf(l as f64 / 2.0) * fact.sqrt() * f.norm().powi(l as i32);
                power_slack = power_slack.min((rhs - cur.norm()) / rhs.max(1e-300));
            }
        }
    }
    let combo = f.add(&g.scale(alpha));
    let linearity = crate::linalg::max_abs(&(df.field(&combo) - (&phi + df.field(g) * alpha)));
    FieldReport { hermiticity, vacuum_action, bound_slack, power_slack, linearity }
}

/// `a*_{Θτ}(f_1)…a*_{Θτ}(f_k)(Ω⊗e)` applied right to left.
pub fn twisted_product_vector(df: &DeformedFock, fs: &[Vec<C64>], e: &[C64]) -> CVec {
    let mut v = df.vacuum_vector(e);
    for f in fs.iter().rev() {
        let mut op = CMat::zeros(df.dim(), df.dim());
        for (i, fi) in f.iter().enumerate() {
            op += df.creator(i) * *fi;
        }
        v = op * v;
    }
    v
}

/// `√(k!) P_k(S_k (f_1⊗…⊗f_k)) ⊗ e` mapped into the occupation basis. The
/// twist carries sign `sign` in its exponent.
pub fn symmetrized_twisted_vector(df: &DeformedFock, fs: &[Vec<C64>], e: &[C64], sign: f64) -> Result<CVec> {
    let k = fs.len();
    let nm = df.basis.modes.len();
    let m = df.m();
    if k > df.basis.ncut {
        return Err(NawcError::Invalid(format!("k = {k} exceeds the particle cutoff")));
    }
    let ev = CVec::from_column_slice(e);
    let tuples = all_tuples(nm, k);
    let mut tensor: HashMap<Vec<usize>, CVec> = HashMap::new();
    for t in &tuples {
        let coef: C64 = t.iter().enumerate().map(|(slot, &i)| fs[slot][i]).product();
        let momenta: Vec<[f64; 2]> = t.iter().map(|&i| df.basis.modes.four_momentum(i)).collect();
        tensor.insert(t.clone(), df.twist_matrix(&momenta, sign) * &ev * coef);
    }
    let perms = permutations(k);
    let norm = 1.0 / perms.len() as f64;
    let mut out = CVec::zeros(df.dim());
    for t in &tuples {
        let mut sym = CVec::zeros(m);
        for p in &perms {
            let permuted: Vec<usize> = p.iter().map(|&q| t[q]).collect();
            sym += &tensor[&permuted];
        }
        sym *= c(norm, 0.0);
        let mut occ = vec![0; nm];
        for &i in t {
            occ[i] += 1;
        }
        let s = df.basis.index_of(&occ).expect("tuple occupation within cutoff");
        // √(k!) times the overlap of |n⟩ = √(Πn!/k!) Σ_{tuples of n} e_t
        let fact = |n: usize| (1..=n).map(|x| x as f64).product::<f64>();
        let w = fact(k).sqrt() * (occ.iter().map(|&n| fact(n)).product::<f64>() / fact(k)).sqrt();
        for a in 0..m {
            out[s * m + a] += sym[a] * w;
        }
    }
    Ok(out)
}

fn all_tuples(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for _ in 0..k {
        out = out.into_iter().flat_map(|t| (0..n).map(move |i| [t.clone(), vec![i]].concat())).collect();
    }
    out
}

fn permutations(k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(k - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, k - 1);
            out.push(q);
        }
    }
    out
}

#[cfg(test)]
mod tests;
