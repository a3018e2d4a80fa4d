//! Closed-form quadrature wavefunctions of the photon-subtracted squeezed
//! vacuum, carried exactly as `prefactor × P(x, y) × exp(Q(x, y))`.
//!
//! `Q` is fixed by `η = e^{iθ} tanh r`:
//!
//! ```text
//! Q(x, y) = [2xyη − (x² + y²)η²] / (1 − η²) − (x² + y²)/2
//! ```
//!
//! and `(x − ∂/∂x)` maps `P e^Q` to `[2(x − ηy)/(1 − η²) P − ∂P/∂x] e^Q`, so
//! the family is closed under the subtraction operator and derivatives stay
//! symbolic.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fock::SqueezeParams;
use crate::grid::{Field2, GridSpec};
use crate::quadrature::GaussianCubature;

/// Signal (`x`) and idler (`y`) position quadratures, `[x, p_x] = i`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadraturePoint {
    pub x: f64,
    pub y: f64,
}

impl QuadraturePoint {
    pub fn new(x: f64, y: f64) -> Self {
        QuadraturePoint { x, y }
    }
}

/// Bivariate complex polynomial `Σ c_ij xⁱ yʲ`, `i + j ≤ degree`.
#[derive(Debug, Clone, PartialEq)]
pub struct Poly2 {
    degree: usize,
    // c[i * (degree + 1) + j]
    coeffs: Vec<Complex64>,
}

impl Poly2 {
    pub fn constant(c: Complex64) -> Self {
        Poly2 { degree: 0, coeffs: vec![c] }
    }

    fn zeros(degree: usize) -> Self {
        Poly2 { degree, coeffs: vec![Complex64::new(0.0, 0.0); (degree + 1) * (degree + 1)] }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Coefficient of `xⁱ yʲ` (zero outside the table).
    pub fn coeff(&self, i: usize, j: usize) -> Complex64 {
        if i + j > self.degree {
            return Complex64::new(0.0, 0.0);
        }
        self.coeffs[i * (self.degree + 1) + j]
    }

    fn add_to(&mut self, i: usize, j: usize, v: Complex64) {
        let d = self.degree;
        self.coeffs[i * (d + 1) + j] += v;
    }

    pub fn eval(&self, x: f64, y: f64) -> Complex64 {
        // Horner in x over Horner-in-y columns
        let d = self.degree;
        let mut acc = Complex64::new(0.0, 0.0);
        for i in (0..=d).rev() {
            let mut col = Complex64::new(0.0, 0.0);
            for j in (0..=(d - i)).rev() {
                col = col * y + self.coeffs[i * (d + 1) + j];
            }
            acc = acc * x + col;
        }
        acc
    }

    /// `Σ |c_ij| |x|ⁱ |y|ʲ`, the natural rounding scale of `eval`.
    pub fn abs_scale(&self, x: f64, y: f64) -> f64 {
        let d = self.degree;
        let mut total = 0.0;
        for i in 0..=d {
            for j in 0..=(d - i) {
                total += self.coeffs[i * (d + 1) + j].norm() * x.abs().powi(i as i32) * y.abs().powi(j as i32);
            }
        }
        total
    }

    /// `g·P − ∂P/∂x` with `g = a x + b y`.
    fn raise(&self, a: Complex64, b: Complex64) -> Poly2 {
        let d = self.degree;
        let mut out = Poly2::zeros(d + 1);
        for i in 0..=d {
            for j in 0..=(d - i) {
                let c = self.coeff(i, j);
                if c == Complex64::new(0.0, 0.0) {
                    continue;
                }
                out.add_to(i + 1, j, a * c);
                out.add_to(i, j + 1, b * c);
                if i > 0 {
                    out.add_to(i - 1, j, -c * i as f64);
                }
            }
        }
        out
    }

    fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Poly2 {
        Poly2 { degree: self.degree, coeffs: self.coeffs.iter().map(|&c| f(c)).collect() }
    }

    /// Coefficients of the top-degree homogeneous part, indexed by the power of `x`.
    pub(crate) fn leading_form(&self) -> Vec<Complex64> {
        (0..=self.degree).map(|i| self.coeff(i, self.degree - i)).collect()
    }
}

/// `prefactor × P(x, y) × exp(Q_η(x, y))`.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyGauss {
    pub prefactor: Complex64,
    eta: Complex64,
    poly: Poly2,
}

impl PolyGauss {
    pub fn new(prefactor: Complex64, eta: Complex64, poly: Poly2) -> Result<Self> {
        if !(eta.norm() < 1.0) {
            return Err(Error::invalid("eta", format!("|η| must be < 1, got {}", eta.norm())));
        }
        Ok(PolyGauss { prefactor, eta, poly })
    }

    pub fn eta(&self) -> Complex64 {
        self.eta
    }

    pub fn poly(&self) -> &Poly2 {
        &self.poly
    }

    pub fn degree(&self) -> usize {
        self.poly.degree
    }

    pub fn exponent(&self, x: f64, y: f64) -> Complex64 {
        let eta = self.eta;
        let one = Complex64::new(1.0, 0.0);
        let q2 = x * x + y * y;
        (eta * (2.0 * x * y) - eta * eta * q2) / (one - eta * eta) - 0.5 * q2
    }

    pub fn evaluate(&self, pt: QuadraturePoint) -> Complex64 {
        self.prefactor * self.poly.eval(pt.x, pt.y) * self.exponent(pt.x, pt.y).exp()
    }

    /// `arg Ψ` computed as `arg(prefactor·P) + Im Q`, which never underflows.
    pub fn phase(&self, x: f64, y: f64) -> f64 {
        crate::fock::canonical_angle((self.prefactor * self.poly.eval(x, y)).arg() + self.exponent(x, y).im)
    }

    pub fn scaled(&self, factor: Complex64) -> PolyGauss {
        PolyGauss { prefactor: self.prefactor * factor, ..self.clone() }
    }

    /// Complex conjugate field (`η → η*`, coefficients conjugated).
    pub fn conj(&self) -> PolyGauss {
        PolyGauss {
            prefactor: self.prefactor.conj(),
            eta: self.eta.conj(),
            poly: self.poly.map(|c| c.conj()),
        }
    }

    /// `|Ψ|² = |prefactor|² |P|² exp(-vᵀAv)`; returns `A`.
    fn envelope(&self) -> DMatrix<f64> {
        let one = Complex64::new(1.0, 0.0);
        let den = one - self.eta * self.eta;
        let g = (self.eta / den).re;
        let h = (self.eta * self.eta / den).re;
        DMatrix::from_row_slice(2, 2, &[2.0 * h + 1.0, -2.0 * g, -2.0 * g, 2.0 * h + 1.0])
    }

    /// `∫|Ψ|² dx dy`, exact up to rounding (Gauss–Hermite in the
    /// envelope's principal axes, order `degree + 2`, checked against the
    /// doubled order).
    pub fn norm_sqr(&self) -> Result<f64> {
        let a = self.envelope();
        let c = DVector::zeros(2);
        let order = self.degree() + 2;
        let f = |v: &[f64]| self.evaluate(QuadraturePoint::new(v[0], v[1])).norm_sqr();
        let lo = GaussianCubature::new(&a, &c, order)?.integrate(f);
        let hi = GaussianCubature::new(&a, &c, 2 * order)?.integrate(f);
        let disagreement = ((hi - lo) / hi).abs();
        if disagreement > 1e-10 {
            return Err(Error::QuadratureNotConverged { stage: "wavefunction norm", disagreement });
        }
        Ok(hi)
    }

    /// Unit-L² copy.
    pub fn normalized(&self) -> Result<PolyGauss> {
        let n2 = self.norm_sqr()?;
        if n2 == 0.0 {
            return Err(Error::ZeroState);
        }
        Ok(self.scaled(Complex64::new(n2.sqrt().recip(), 0.0)))
    }
}

/// Two-mode squeezed vacuum wavefunction
/// `exp(Q) / √((1 − η²) π cosh² r)` (principal square root).
pub fn tmsv_wavefunction(params: SqueezeParams) -> PolyGauss {
    let eta = params.eta();
    let one = Complex64::new(1.0, 0.0);
    let c = params.r().cosh();
    let prefactor = ((one - eta * eta) * (PI * c * c)).sqrt().inv();
    PolyGauss { prefactor, eta, poly: Poly2::constant(one) }
}

/// `e^{ikθ} / (2^{k/2} cosh r) · (x − ∂/∂x)ᵏ Ψ`, unnormalized.
pub fn subtracted_wavefunction(params: SqueezeParams, k: usize) -> PolyGauss {
    let base = tmsv_wavefunction(params);
    let eta = params.eta();
    let one = Complex64::new(1.0, 0.0);
    let den = one - eta * eta;
    // x − ∂Q/∂x = 2(x − ηy)/(1 − η²)
    let a = 2.0 / den;
    let b = -2.0 * eta / den;
    let mut poly = base.poly.clone();
    for _ in 0..k {
        poly = poly.raise(a, b);
    }
    let prefactor = if k == 0 {
        base.prefactor
    } else {
        base.prefactor * Complex64::from_polar(1.0, k as f64 * params.theta())
            / (2f64.powf(0.5 * k as f64) * params.r().cosh())
    };
    PolyGauss { prefactor, eta, poly }
}

/// Pure evaluation; see [`PolyGauss::evaluate`].
pub fn evaluate(pg: &PolyGauss, pt: QuadraturePoint) -> Complex64 {
    pg.evaluate(pt)
}

/// `|Ψ|²` and `arg Ψ ∈ (−π, π]` sampled on `grid`.
pub fn intensity_phase_grid(pg: &PolyGauss, grid: GridSpec) -> Result<(Field2<f64>, Field2<f64>)> {
    grid.validate()?;
    let values = Field2::from_fn(grid, |x, y| pg.evaluate(QuadraturePoint::new(x, y)));
    let intensity = values.map(|v| v.norm_sqr());
    let phase = values.map(|v| {
        let a = v.arg();
        if a <= -PI {
            PI
        } else {
            a
        }
    });
    Ok((intensity, phase))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(r: f64, theta: f64) -> SqueezeParams {
        SqueezeParams::new(r, theta).unwrap()
    }

    #[test]
    fn tmsv_value_at_origin_is_prefactor() {
        let p = params(0.8, PI / 2.0);
        let pg = tmsv_wavefunction(p);
        let v = pg.evaluate(QuadraturePoint::new(0.0, 0.0));
        assert_eq!(v, pg.prefactor);
    }

    #[test]
    fn zero_squeezing_is_two_mode_vacuum() {
        let pg = tmsv_wavefunction(params(0.0, 0.4));
        for &(x, y) in &[(0.0, 0.0), (0.3, -1.2), (2.0, 1.0)] {
            let v = pg.evaluate(QuadraturePoint::new(x, y));
            let expect = PI.powf(-0.5) * (-(x * x + y * y) / 2.0).exp();
            assert!((v.re - expect).abs() < 1e-15 && v.im.abs() < 1e-15);
        }
        assert!((pg.evaluate(QuadraturePoint::new(0.0, 0.0)).re - 0.564_189_583_547_756_3).abs() < 1e-15);
    }

    #[test]
    fn k_zero_subtraction_is_identity() {
        let p = params(0.6, 1.0);
        assert_eq!(subtracted_wavefunction(p, 0), tmsv_wavefunction(p));
    }

    #[test]
    fn degree_equals_k() {
        for k in 0..6 {
            let pg = subtracted_wavefunction(params(0.9, 0.2), k);
            assert_eq!(pg.degree(), k);
            let lead = pg.poly().leading_form();
            assert!(lead.iter().any(|c| c.norm() > 0.0));
        }
    }

    #[test]
    fn real_eta_gives_real_field() {
        let pg = subtracted_wavefunction(params(0.7, 0.0), 3);
        for i in 0..15 {
            let x = -3.0 + 0.41 * i as f64;
            let y = 2.5 - 0.37 * i as f64;
            let v = pg.evaluate(QuadraturePoint::new(x, y));
            assert!(v.im.abs() < 1e-14, "{v}");
        }
    }

    #[test]
    fn scaling_is_linear() {
        let pg = subtracted_wavefunction(params(0.5, 0.3), 2);
        let pt = QuadraturePoint::new(0.4, -0.9);
        let a = pg.evaluate(pt);
        let b = pg.scaled(Complex64::new(2.0, 0.0)).evaluate(pt);
        assert!((b - 2.0 * a).norm() < 1e-15);
    }

    #[test]
    fn norm_matches_operator_algebra() {
        // ‖e^{ikθ}/cosh r · a†ᵏ|ξ⟩‖² = k! cosh^{2k} r / cosh² r for k ≥ 1
        for k in 0..5 {
            for &r in &[0.3, 0.8, 1.2] {
                let pg = subtracted_wavefunction(params(r, PI / 3.0), k);
                let n2 = pg.norm_sqr().unwrap();
                let fact: f64 = (1..=k).map(|j| j as f64).product();
                let expect = if k == 0 { 1.0 } else { fact * r.cosh().powi(2 * k as i32 - 2) };
                assert!(((n2 - expect) / expect).abs() < 1e-11, "k={k} r={r}: {n2} vs {expect}");
            }
        }
    }

    #[test]
    fn phase_grid_for_real_gaussian_is_flat() {
        let pg = tmsv_wavefunction(params(0.5, 0.0));
        let (int, ph) = intensity_phase_grid(&pg, GridSpec::square(2.0, 11).unwrap()).unwrap();
        assert!(ph.values().iter().all(|&p| p == 0.0));
        assert!(int.values().iter().all(|&v| v >= 0.0));
    }

    #[test]
    fn conj_conjugates_values() {
        let pg = subtracted_wavefunction(params(0.8, PI / 2.0), 3);
        let c = pg.conj();
        let pt = QuadraturePoint::new(0.7, -0.4);
        assert!((c.evaluate(pt) - pg.evaluate(pt).conj()).norm() < 1e-14);
    }
}
