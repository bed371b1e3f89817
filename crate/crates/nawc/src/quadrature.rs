//! Gauss rules and composite helpers.

use std::f64::consts::PI;

#[derive(Clone, Debug)]
pub struct Rule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Rule {
    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }
}

/// Gauss–Legendre on `[-1, 1]`, Newton iteration on the Legendre recurrence.
pub fn gauss_legendre(n: usize) -> Rule {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let k = k as f64;
                let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            if n == 1 {
                p0 = 1.0;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    Rule { nodes, weights }
}

/// Gauss–Hermite for the weight `exp(−x²)`, Newton iteration on the
/// orthonormal Hermite recurrence.
pub fn gauss_hermite(n: usize) -> Rule {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let pim4 = PI.powf(-0.25);
    let nf = n as f64;
    let m = n.div_ceil(2);
    let mut z: f64 = 0.0;
    for i in 0..m {
        z = match i {
            0 => (2.0 * nf + 1.0).sqrt() - 1.85575 * (2.0 * nf + 1.0).powf(-1.0 / 6.0),
            1 => z - 1.14 * nf.powf(0.426) / z,
            2 => 1.86 * z - 0.86 * nodes[n - 1],
            3 => 1.91 * z - 0.91 * nodes[n - 2],
            _ => 2.0 * z - nodes[n - 1 - (i - 2)],
        };
        let mut pp = 0.0;
        for _ in 0..200 {
            let (mut p1, mut p2) = (pim4, 0.0);
            for j in 1..=n {
                let p3 = p2;
                p2 = p1;
                let jf = j as f64;
                p1 = z * (2.0 / jf).sqrt() * p2 - ((jf - 1.0) / jf).sqrt() * p3;
            }
            pp = (2.0 * nf).sqrt() * p2;
            let dz = p1 / pp;
            z -= dz;
            if dz.abs() < 1e-15 * z.abs().max(1.0) {
                break;
            }
        }
        nodes[n - 1 - i] = z;
        nodes[i] = -z;
        weights[i] = 2.0 / (pp * pp);
        weights[n - 1 - i] = weights[i];
    }
    Rule { nodes, weights }
}

/// Composite Gauss–Legendre over `[a, b]` split into `panels` equal pieces.
pub fn composite_legendre(a: f64, b: f64, panels: usize, order: usize) -> Rule {
    let base = gauss_legendre(order);
    let h = (b - a) / panels as f64;
    let mut nodes = Vec::with_capacity(panels * order);
    let mut weights = Vec::with_capacity(panels * order);
    for p in 0..panels {
        let mid = a + (p as f64 + 0.5) * h;
        for (&x, &w) in base.nodes.iter().zip(&base.weights) {
            nodes.push(mid + 0.5 * h * x);
            weights.push(0.5 * h * w);
        }
    }
    Rule { nodes, weights }
}

/// Trapezoid nodes on `[a, b]` with `points` samples.
pub fn trapezoid(a: f64, b: f64, points: usize) -> Rule {
    let h = (b - a) / (points - 1) as f64;
    let nodes = (0..points).map(|i| a + i as f64 * h).collect();
    let weights = (0..points).map(|i| if i == 0 || i == points - 1 { 0.5 * h } else { h }).collect();
    Rule { nodes, weights }
}
