//! Small dense complex linear-algebra helpers shared by every module.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;

pub type C64 = Complex64;
pub type CMat = DMatrix<C64>;
pub type CVec = DVector<C64>;

pub const I: C64 = C64 { re: 0.0, im: 1.0 };

#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[inline]
pub fn cis(phase: f64) -> C64 {
    C64::from_polar(1.0, phase)
}

pub fn eye(n: usize) -> CMat {
    CMat::identity(n, n)
}

pub fn dagger(a: &CMat) -> CMat {
    a.adjoint()
}

pub fn commutator(a: &CMat, b: &CMat) -> CMat {
    a * b - b * a
}

pub fn kron(a: &CMat, b: &CMat) -> CMat {
    a.kronecker(b)
}

/// Largest entry modulus.
pub fn max_abs(a: &CMat) -> f64 {
    a.iter().fold(0.0_f64, |m, z| m.max(z.norm()))
}

pub fn max_abs_vec(v: &CVec) -> f64 {
    v.iter().fold(0.0_f64, |m, z| m.max(z.norm()))
}

/// Frobenius norm.
pub fn fro(a: &CMat) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn vnorm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn vdiff(a: &[C64], b: &[C64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm_sqr())
        .sum::<f64>()
        .sqrt()
}

pub fn hermiticity_residual(a: &CMat) -> f64 {
    max_abs(&(a - a.adjoint()))
}

/// Spectral decomposition of a hermitian matrix, eigenvalues ascending.
pub struct HermEigen {
    pub values: Vec<f64>,
    pub vectors: CMat,
}

pub fn herm_eigen(a: &CMat) -> HermEigen {
    let sym = (a + a.adjoint()) * c(0.5, 0.0);
    let n = a.nrows();
    let mut v = sym.clone().symmetric_eigen().eigenvectors;
    let mut d = v.adjoint() * &sym * &v;
    jacobi_polish(&mut d, &mut v);
    let diag: Vec<f64> = (0..n).map(|k| d[(k, k)].re).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| diag[i].total_cmp(&diag[j]));
    let values = order.iter().map(|&i| diag[i]).collect();
    let mut vectors = CMat::zeros(n, n);
    for (k, &i) in order.iter().enumerate() {
        vectors.set_column(k, &v.column(i));
    }
    HermEigen { values, vectors }
}

/// Cyclic complex Jacobi sweeps on a nearly diagonal hermitian `d`, with the
/// rotations accumulated into `v`. The Householder-QR solver alone leaves
/// off-diagonal mass near `1e-12`.
fn jacobi_polish(d: &mut CMat, v: &mut CMat) {
    let n = d.nrows();
    let scale = max_abs(d).max(f64::MIN_POSITIVE);
    for _ in 0..12 {
        let mut off = 0.0_f64;
        for p in 0..n {
            for q in (p + 1)..n {
                off = off.max(d[(p, q)].norm());
            }
        }
        if off <= 1e-17 * scale {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let b = d[(p, q)];
                let mag = b.norm();
                if mag <= 1e-300 {
                    continue;
                }
                let phase = b / mag;
                let theta = (d[(q, q)].re - d[(p, p)].re) / (2.0 * mag);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let cs = 1.0 / (t * t + 1.0).sqrt();
                let sn = t * cs;
                // G = diag(1, conj(phase)) · [[c, s], [-s, c]] on the (p, q) plane
                let gpp = c(cs, 0.0);
                let gpq = c(sn, 0.0);
                let gqp = phase.conj() * (-sn);
                let gqq = phase.conj() * cs;
                for k in 0..n {
                    let (xp, xq) = (d[(k, p)], d[(k, q)]);
                    d[(k, p)] = xp * gpp + xq * gqp;
                    d[(k, q)] = xp * gpq + xq * gqq;
                    let (yp, yq) = (v[(k, p)], v[(k, q)]);
                    v[(k, p)] = yp * gpp + yq * gqp;
                    v[(k, q)] = yp * gpq + yq * gqq;
                }
                for k in 0..n {
                    let (xp, xq) = (d[(p, k)], d[(q, k)]);
                    d[(p, k)] = gpp.conj() * xp + gqp.conj() * xq;
                    d[(q, k)] = gpq.conj() * xp + gqq.conj() * xq;
                }
            }
        }
    }
}

/// `exp(i t H)` for hermitian `H`, through its eigendecomposition.
pub fn expi_hermitian(h: &CMat, t: f64) -> CMat {
    let e = herm_eigen(h);
    let n = h.nrows();
    let mut d = CMat::zeros(n, n);
    for k in 0..n {
        d[(k, k)] = cis(t * e.values[k]);
    }
    &e.vectors * d * e.vectors.adjoint()
}

pub fn random_matrix<R: Rng>(rng: &mut R, n: usize) -> CMat {
    CMat::from_fn(n, n, |_, _| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
}

pub fn random_hermitian<R: Rng>(rng: &mut R, n: usize) -> CMat {
    let a = random_matrix(rng, n);
    (&a + a.adjoint()) * c(0.5, 0.0)
}

pub fn random_vector<R: Rng>(rng: &mut R, n: usize) -> CVec {
    CVec::from_fn(n, |_, _| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
}

/// Random unitary from the eigenvectors of a random hermitian matrix.
pub fn random_unitary<R: Rng>(rng: &mut R, n: usize) -> CMat {
    herm_eigen(&random_hermitian(rng, n)).vectors
}

/// Groups sorted values into clusters whose neighbours differ by at most `tol`.
pub fn cluster_sorted(values: &[f64], tol: f64) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = Vec::new();
    for (i, &v) in values.iter().enumerate() {
        match out.last_mut() {
            Some(last) if (v - values[*last.last().unwrap()]).abs() <= tol => last.push(i),
            _ => out.push(vec![i]),
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn herm_eigen_reconstructs() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let h = random_hermitian(&mut rng, 6);
        let e = herm_eigen(&h);
        let d = CMat::from_diagonal(&CVec::from_iterator(6, e.values.iter().map(|&x| c(x, 0.0))));
        let back = &e.vectors * d * e.vectors.adjoint();
        assert!(max_abs(&(back - &h)) < 1e-12);
        assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn expi_matches_pade_exponential() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let h = random_hermitian(&mut rng, 5);
        let ours = expi_hermitian(&h, 0.7);
        let pade = (&h * c(0.0, 0.7)).exp();
        assert!(max_abs(&(ours - pade)) < 1e-12);
    }

    #[test]
    fn clusters_split_on_gap() {
        let v = [0.0, 1e-12, 0.5, 0.5 + 5e-10, 2.0];
        assert_eq!(cluster_sorted(&v, 1e-9), vec![vec![0, 1], vec![2, 3], vec![4]]);
    }
}
