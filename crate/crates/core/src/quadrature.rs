//! Gauss–Legendre and Gauss–Hermite rules, and a Gaussian-envelope cubature
//! for multidimensional integrals of `polynomial × Gaussian` integrands.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};

/// Nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "gauss_legendre needs at least one node");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, z);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - z * z) * dp * dp);
        nodes[i] = -z;
        nodes[n - 1 - i] = z;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, z: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = z;
    if n == 0 {
        return (1.0, 0.0);
    }
    for j in 2..=n {
        let jf = j as f64;
        let p2 = ((2.0 * jf - 1.0) * z * p1 - (jf - 1.0) * p0) / jf;
        p0 = p1;
        p1 = p2;
    }
    let nf = n as f64;
    (p1, nf * (z * p1 - p0) / (z * z - 1.0))
}

/// Gauss–Legendre rule mapped to `[a, b]`.
pub fn gauss_legendre_on(n: usize, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
    let (x, w) = gauss_legendre(n);
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    (
        x.iter().map(|t| mid + half * t).collect(),
        w.iter().map(|t| half * t).collect(),
    )
}

/// Nodes and weights for `∫ f(x) e^{-x²} dx` over the real line.
///
/// Newton iteration on the orthonormal Hermite recurrence, with the usual
/// asymptotic initial guesses.
pub fn gauss_hermite(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "gauss_hermite needs at least one node");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    let pim4 = PI.powf(-0.25);
    let m = n.div_ceil(2);
    let mut z = 0.0f64;
    for i in 0..m {
        z = match i {
            0 => (2.0 * nf + 1.0).sqrt() - 1.85575 * (2.0 * nf + 1.0).powf(-1.0 / 6.0),
            1 => z - 1.14 * nf.powf(0.426) / z,
            2 => 1.86 * z - 0.86 * nodes[0],
            3 => 1.91 * z - 0.91 * nodes[1],
            _ => 2.0 * z - nodes[i - 2],
        };
        let mut pp = 0.0;
        for _ in 0..200 {
            let mut p1 = pim4;
            let mut p2 = 0.0;
            for j in 0..n {
                let p3 = p2;
                p2 = p1;
                let jf = j as f64;
                p1 = z * (2.0 / (jf + 1.0)).sqrt() * p2 - (jf / (jf + 1.0)).sqrt() * p3;
            }
            pp = (2.0 * nf).sqrt() * p2;
            let dz = p1 / pp;
            z -= dz;
            if dz.abs() <= 1e-15 * z.abs().max(1.0) {
                break;
            }
        }
        nodes[i] = z;
        nodes[n - 1 - i] = -z;
        weights[i] = 2.0 / (pp * pp);
        weights[n - 1 - i] = weights[i];
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    nodes.reverse();
    weights.reverse();
    (nodes, weights)
}

/// Tensor-product Gauss–Hermite cubature adapted to a Gaussian envelope
/// `exp(-(v-c)ᵀ A (v-c))` with symmetric positive-definite `A`.
///
/// Integrands are evaluated *including* their envelope; the rule divides the
/// envelope back out at each node. When the integrand is a polynomial of
/// degree `< 2·order` times exactly this envelope the result is exact up to
/// rounding.
#[derive(Debug, Clone)]
pub struct GaussianCubature {
    center: DVector<f64>,
    transform: DMatrix<f64>,
    jacobian: f64,
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussianCubature {
    pub fn new(a: &DMatrix<f64>, center: &DVector<f64>, order: usize) -> Result<Self> {
        let dim = a.nrows();
        if a.ncols() != dim || center.len() != dim || dim == 0 {
            return Err(Error::invalid("envelope", "shape mismatch"));
        }
        let sym = (a + a.transpose()) * 0.5;
        let eig = SymmetricEigen::new(sym);
        let mut transform = eig.eigenvectors.clone();
        let mut jacobian = 1.0;
        for (j, &lambda) in eig.eigenvalues.iter().enumerate() {
            if !(lambda > 0.0) || !lambda.is_finite() {
                return Err(Error::invalid(
                    "envelope",
                    format!("not positive definite (eigenvalue {lambda})"),
                ));
            }
            let s = lambda.sqrt().recip();
            jacobian *= s;
            for i in 0..dim {
                transform[(i, j)] *= s;
            }
        }
        let (nodes, weights) = gauss_hermite(order);
        Ok(GaussianCubature { center: center.clone(), transform, jacobian, nodes, weights })
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    /// `∫ f(v) dv` over `Rᵈ`.
    pub fn integrate<F>(&self, mut f: F) -> f64
    where
        F: FnMut(&[f64]) -> f64,
    {
        let dim = self.dim();
        let n = self.nodes.len();
        let mut idx = vec![0usize; dim];
        let mut s = vec![0.0; dim];
        let mut v = vec![0.0; dim];
        let mut total = 0.0;
        loop {
            let mut w = self.jacobian;
            let mut s2 = 0.0;
            for d in 0..dim {
                s[d] = self.nodes[idx[d]];
                w *= self.weights[idx[d]];
                s2 += s[d] * s[d];
            }
            for i in 0..dim {
                let mut acc = self.center[i];
                for j in 0..dim {
                    acc += self.transform[(i, j)] * s[j];
                }
                v[i] = acc;
            }
            total += w * s2.exp() * f(&v);

            let mut d = 0;
            loop {
                idx[d] += 1;
                if idx[d] < n {
                    break;
                }
                idx[d] = 0;
                d += 1;
                if d == dim {
                    return total;
                }
            }
        }
    }
}
