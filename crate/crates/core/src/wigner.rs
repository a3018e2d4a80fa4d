//! Two-mode Wigner functions.
//!
//! Phase-space coordinates are coherent-amplitude units: `α = x − i p_x`,
//! `β = y − i p_y`, with `W` normalised over `dx dp_x dy dp_y`. In these
//! units a vacuum mode has `W = (2/π) e^{-2|α|²}`, so the position
//! coordinate here is the `[x, p] = i` quadrature of [`crate::states`]
//! divided by `√2`.
//!
//! The subtracted state `a†ᵏ|ξ⟩` is a squeezed `|k, 0⟩`, and its Wigner
//! function is the `|k, 0⟩` Wigner function evaluated at squeezed
//! coordinates `(α̃, β̃)`:
//!
//! ```text
//! W = (4/π²) (−1)ᵏ Lₖ(4|α̃|²) exp(−2(|α̃|² + |β̃|²))
//! ```

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fock::{FockState2, SqueezeParams};
use crate::grid::{Field2, GridSpec};
use crate::quadrature::{gauss_legendre_on, GaussianCubature};
use crate::specfun::{laguerre_unchecked, log_factorial};
use crate::states::QuadraturePoint;

const FOUR_OVER_PI2: f64 = 4.0 / (PI * PI);

/// Momentum quadratures of the signal and idler.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentumPair {
    pub p_x: f64,
    pub p_y: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseSpacePoint4 {
    pub q: QuadraturePoint,
    pub p: MomentumPair,
}

impl PhaseSpacePoint4 {
    pub fn new(x: f64, p_x: f64, y: f64, p_y: f64) -> Self {
        PhaseSpacePoint4 { q: QuadraturePoint { x, y }, p: MomentumPair { p_x, p_y } }
    }

    pub fn origin() -> Self {
        Self::new(0.0, 0.0, 0.0, 0.0)
    }

    /// `[x, p_x, y, p_y]`.
    pub fn from_array(z: [f64; 4]) -> Self {
        Self::new(z[0], z[1], z[2], z[3])
    }

    pub fn to_array(&self) -> [f64; 4] {
        [self.q.x, self.p.p_x, self.q.y, self.p.p_y]
    }

    /// `α = x − i p_x`.
    pub fn alpha(&self) -> Complex64 {
        Complex64::new(self.q.x, -self.p.p_x)
    }

    /// `β = y − i p_y`.
    pub fn beta(&self) -> Complex64 {
        Complex64::new(self.q.y, -self.p.p_y)
    }
}

/// Two-mode squeezing acting on phase-space points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SqueezeMap {
    pub r: f64,
    pub theta: f64,
}

impl From<SqueezeParams> for SqueezeMap {
    fn from(p: SqueezeParams) -> Self {
        SqueezeMap { r: p.r(), theta: p.theta() }
    }
}

/// `(α̃, β̃)` with
///
/// ```text
/// α̃  =  cosh r · α − sinh r · e^{−iθ} β*
/// β̃* = −sinh r · e^{iθ} α + cosh r · β*
/// ```
///
/// This is the phase-space image of `S(ξ)† a S(ξ) = a cosh r + b† e^{iθ} sinh r`
/// written in `α = x − i p_x` coordinates; it preserves
/// `|α|² − |β|²`.
pub fn squeeze_map(map: SqueezeMap, pt: &PhaseSpacePoint4) -> (Complex64, Complex64) {
    let (c, s) = (map.r.cosh(), map.r.sinh());
    let alpha = pt.alpha();
    let beta_c = pt.beta().conj();
    let alpha_t = alpha * c - Complex64::from_polar(s, -map.theta) * beta_c;
    let beta_t_c = -Complex64::from_polar(s, map.theta) * alpha + beta_c * c;
    (alpha_t, beta_t_c.conj())
}

/// Single-mode Fock Wigner function `(2/π)(−1)ⁿ Lₙ(4|α|²) e^{−2|α|²}`.
pub fn wigner_fock_single(n: usize, alpha: Complex64) -> f64 {
    let a2 = alpha.norm_sqr();
    let sign = if n.is_multiple_of(2) { 1.0 } else { -1.0 };
    2.0 / PI * sign * laguerre_unchecked(n, 0.0, 4.0 * a2) * (-2.0 * a2).exp()
}

/// Wigner function of the operator `|m⟩⟨n|` at coherent amplitude `a`
/// (the eigenvalue of the annihilation operator, `a = x + i p = α*`).
///
/// For `m ≥ n`: `(2/π)(−1)ⁿ √(n!/m!) (2a*)^{m−n} Lₙ^{(m−n)}(4|a|²) e^{−2|a|²}`;
/// the other order follows from `W_{nm} = W_{mn}*`.
pub fn wigner_fock_cross(m: usize, n: usize, a: Complex64) -> Complex64 {
    if m < n {
        return wigner_fock_cross(n, m, a).conj();
    }
    let d = m - n;
    let a2 = a.norm_sqr();
    let sign = if n.is_multiple_of(2) { 1.0 } else { -1.0 };
    let lag = laguerre_unchecked(n, d as f64, 4.0 * a2);
    if d == 0 {
        return Complex64::new(2.0 / PI * sign * lag * (-2.0 * a2).exp(), 0.0);
    }
    if a2 == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    let r = a2.sqrt();
    let log_mag =
        0.5 * (log_factorial(n) - log_factorial(m)) + d as f64 * (2.0 * r).ln() - 2.0 * a2;
    let phase = -(d as f64) * a.arg();
    Complex64::from_polar(2.0 / PI * sign * lag * log_mag.exp(), phase)
}

/// Wigner function of the normalised `a†ᵏ|ξ⟩`.
pub fn wigner_tmsv(params: SqueezeParams, k: usize, pt: &PhaseSpacePoint4) -> f64 {
    let (at, bt) = squeeze_map(params.into(), pt);
    radial_profile(k, at.norm_sqr()) * (-2.0 * bt.norm_sqr()).exp()
}

/// `(4/π²)(−1)ᵏ Lₖ(4u) e^{−2u}`.
fn radial_profile(k: usize, u: f64) -> f64 {
    let sign = if k.is_multiple_of(2) { 1.0 } else { -1.0 };
    FOUR_OVER_PI2 * sign * laguerre_unchecked(k, 0.0, 4.0 * u) * (-2.0 * u).exp()
}

/// Brute-force Wigner function of an arbitrary truncated state, summed
/// over Fock cross terms.
pub fn wigner_numeric_oracle(state: &FockState2, pt: &PhaseSpacePoint4) -> Result<f64> {
    let a = pt.alpha().conj();
    let b = pt.beta().conj();
    let support: Vec<(usize, usize, Complex64)> = state.support().collect();
    let dim = state.cutoff() + 1;
    let mut used_a = vec![false; dim];
    let mut used_b = vec![false; dim];
    for &(na, nb, _) in &support {
        used_a[na] = true;
        used_b[nb] = true;
    }
    let table = |used: &[bool], z: Complex64| {
        let mut t = vec![Complex64::new(0.0, 0.0); dim * dim];
        for m in 0..dim {
            if !used[m] {
                continue;
            }
            for n in 0..dim {
                if used[n] {
                    t[m * dim + n] = wigner_fock_cross(m, n, z);
                }
            }
        }
        t
    };
    let ta = table(&used_a, a);
    let tb = table(&used_b, b);
    let mut total = Complex64::new(0.0, 0.0);
    let mut scale = 0.0;
    for &(ma, mb, u) in &support {
        for &(na, nb, v) in &support {
            let term = u * v.conj() * ta[ma * dim + na] * tb[mb * dim + nb];
            scale += term.norm();
            total += term;
        }
    }
    let residue = total.im.abs();
    if residue > 1e-8 * scale.max(1.0) {
        return Err(Error::ImaginaryResidue { residue });
    }
    Ok(total.re)
}

/// Phase-space axes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Axis {
    X,
    Px,
    Y,
    Py,
}

impl Axis {
    fn index(self) -> usize {
        match self {
            Axis::X => 0,
            Axis::Px => 1,
            Axis::Y => 2,
            Axis::Py => 3,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Axis::X => "x",
            Axis::Px => "px",
            Axis::Y => "y",
            Axis::Py => "py",
        }
    }

    pub fn parse(s: &str) -> Option<Axis> {
        match s.to_ascii_lowercase().as_str() {
            "x" => Some(Axis::X),
            "px" | "p_x" => Some(Axis::Px),
            "y" => Some(Axis::Y),
            "py" | "p_y" => Some(Axis::Py),
            _ => None,
        }
    }
}

/// A 2D section of phase space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SlicePlane {
    XY,
    PxPy,
    XPx,
    YPy,
    XPy,
    YPx,
}

impl SlicePlane {
    pub const ALL: [SlicePlane; 6] =
        [SlicePlane::XY, SlicePlane::PxPy, SlicePlane::XPx, SlicePlane::YPy, SlicePlane::XPy, SlicePlane::YPx];

    /// Horizontal and vertical axes of the section.
    pub fn axes(self) -> (Axis, Axis) {
        match self {
            SlicePlane::XY => (Axis::X, Axis::Y),
            SlicePlane::PxPy => (Axis::Px, Axis::Py),
            SlicePlane::XPx => (Axis::X, Axis::Px),
            SlicePlane::YPy => (Axis::Y, Axis::Py),
            SlicePlane::XPy => (Axis::X, Axis::Py),
            SlicePlane::YPx => (Axis::Y, Axis::Px),
        }
    }

    /// The two axes held fixed, in `x, p_x, y, p_y` order.
    pub fn fixed_axes(self) -> (Axis, Axis) {
        let (h, v) = self.axes();
        let mut rest = [Axis::X, Axis::Px, Axis::Y, Axis::Py].into_iter().filter(|a| *a != h && *a != v);
        (rest.next().unwrap(), rest.next().unwrap())
    }

    pub fn name(self) -> &'static str {
        match self {
            SlicePlane::XY => "xy",
            SlicePlane::PxPy => "pxpy",
            SlicePlane::XPx => "xpx",
            SlicePlane::YPy => "ypy",
            SlicePlane::XPy => "xpy",
            SlicePlane::YPx => "ypx",
        }
    }

    pub fn parse(s: &str) -> Option<SlicePlane> {
        SlicePlane::ALL.into_iter().find(|p| p.name() == s.to_ascii_lowercase())
    }
}

/// Which section to sample, where the complementary axes sit, and on which
/// lattice.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WignerSliceSpec {
    pub plane: SlicePlane,
    /// Values of [`SlicePlane::fixed_axes`], in that order.
    pub fixed: [f64; 2],
    pub grid: GridSpec,
}

impl WignerSliceSpec {
    pub fn new(plane: SlicePlane, grid: GridSpec) -> Self {
        WignerSliceSpec { plane, fixed: [0.0, 0.0], grid }
    }

    pub fn point(&self, u: f64, v: f64) -> PhaseSpacePoint4 {
        let (h, w) = self.plane.axes();
        let (f1, f2) = self.plane.fixed_axes();
        let mut z = [0.0; 4];
        z[h.index()] = u;
        z[w.index()] = v;
        z[f1.index()] = self.fixed[0];
        z[f2.index()] = self.fixed[1];
        PhaseSpacePoint4::from_array(z)
    }
}

/// `wigner_tmsv` sampled over a section.
pub fn slice_field(params: SqueezeParams, k: usize, spec: &WignerSliceSpec) -> Result<Field2<f64>> {
    spec.grid.validate()?;
    Ok(Field2::from_fn(spec.grid, |u, v| wigner_tmsv(params, k, &spec.point(u, v))))
}

/// Number of 4-connected components of `{value < threshold}`.
pub fn fringe_count(field: &Field2<f64>, threshold: f64) -> usize {
    let g = field.grid();
    let (nx, ny) = (g.nx, g.ny);
    let neg: Vec<bool> = field.values().iter().map(|&v| v < threshold).collect();
    let mut seen = vec![false; nx * ny];
    let mut count = 0;
    let mut stack = Vec::new();
    for start in 0..nx * ny {
        if !neg[start] || seen[start] {
            continue;
        }
        count += 1;
        seen[start] = true;
        stack.push(start);
        while let Some(idx) = stack.pop() {
            let (i, j) = (idx % nx, idx / nx);
            let mut visit = |ni: usize, nj: usize| {
                let n = nj * nx + ni;
                if neg[n] && !seen[n] {
                    seen[n] = true;
                    stack.push(n);
                }
            };
            if i > 0 {
                visit(i - 1, j);
            }
            if i + 1 < nx {
                visit(i + 1, j);
            }
            if j > 0 {
                visit(i, j - 1);
            }
            if j + 1 < ny {
                visit(i, j + 1);
            }
        }
    }
    count
}

/// Fringe count of a section, doubling the lattice resolution until two
/// successive counts agree. Thin diagonal fringes break into fragments
/// under 4-connectivity until they span several cells.
pub fn converged_fringe_count(params: SqueezeParams, k: usize, spec: &WignerSliceSpec) -> Result<(usize, GridSpec)> {
    let mut grid = spec.grid;
    let mut prev = fringe_count(&slice_field(params, k, spec)?, FRINGE_THRESHOLD);
    for _ in 0..MAX_FRINGE_DOUBLINGS {
        let next_grid = grid.refined();
        let next = fringe_count(&slice_field(params, k, &WignerSliceSpec { grid: next_grid, ..*spec })?, FRINGE_THRESHOLD);
        if next == prev {
            return Ok((prev, grid));
        }
        grid = next_grid;
        prev = next;
    }
    Err(Error::RefinementDiverged { doublings: MAX_FRINGE_DOUBLINGS })
}

/// Maximum lattice doublings in [`converged_fringe_count`].
pub const MAX_FRINGE_DOUBLINGS: usize = 4;

/// Values below this count as negative in fringe statistics.
pub const FRINGE_THRESHOLD: f64 = -1e-9;

/// Largest accepted order-doubling disagreement in negativity volumes.
pub const NEGATIVITY_TOL: f64 = 1e-4;

/// Where to integrate the negative part of `W`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NegativityDomain {
    /// All of phase space. `radial_order` Gauss–Legendre nodes per radial
    /// panel and `angular_order` trapezoid nodes; both are doubled once to
    /// estimate the error.
    PhaseSpace { radial_order: usize, angular_order: usize },
    /// A 2D section, integrated with the trapezoid rule on its lattice and
    /// on successive halvings of the spacing.
    Slice(WignerSliceSpec),
}

impl NegativityDomain {
    pub fn phase_space() -> Self {
        NegativityDomain::PhaseSpace { radial_order: 24, angular_order: 32 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NegativityReport {
    /// `δ = ∫ (|W| − W)/2`.
    pub negative_volume: f64,
    /// `∫ |W|`.
    pub total_abs_volume: f64,
    /// Connected negative regions (for a slice: at the resolution where the
    /// count stabilises).
    pub fringe_count: usize,
    pub min_value: f64,
    pub max_value: f64,
    /// Order-doubling disagreement of `negative_volume`.
    pub error_estimate: f64,
}

/// Negativity volume and fringe statistics.
pub fn negativity_volume(
    params: SqueezeParams,
    k: usize,
    domain: NegativityDomain,
) -> Result<NegativityReport> {
    match domain {
        NegativityDomain::PhaseSpace { radial_order, angular_order } => {
            negativity_phase_space(params, k, radial_order.max(2), angular_order.max(4))
        }
        NegativityDomain::Slice(spec) => negativity_slice(params, k, &spec),
    }
}

/// Real 2×4 matrices `(Re, Im)` of `α̃` and `β̃` as linear maps of
/// `z = [x, p_x, y, p_y]`.
fn squeeze_linear_maps(map: SqueezeMap) -> (DMatrix<f64>, DMatrix<f64>) {
    let mut ma = DMatrix::zeros(2, 4);
    let mut mb = DMatrix::zeros(2, 4);
    for j in 0..4 {
        let mut z = [0.0; 4];
        z[j] = 1.0;
        let (at, bt) = squeeze_map(map, &PhaseSpacePoint4::from_array(z));
        ma[(0, j)] = at.re;
        ma[(1, j)] = at.im;
        mb[(0, j)] = bt.re;
        mb[(1, j)] = bt.im;
    }
    (ma, mb)
}

/// `A` with `2(|α̃|² + |β̃|²) = zᵀ A z`.
fn envelope_form(map: SqueezeMap) -> DMatrix<f64> {
    let (ma, mb) = squeeze_linear_maps(map);
    (ma.transpose() * &ma + mb.transpose() * &mb) * 2.0
}

/// `∫ W d⁴z`, exact for the polynomial-times-Gaussian integrand; the order
/// is doubled once and the disagreement must stay below `tol`.
pub fn normalization_integral(params: SqueezeParams, k: usize, tol: f64) -> Result<f64> {
    let a = envelope_form(params.into());
    let c = DVector::zeros(4);
    let f = |z: &[f64]| wigner_tmsv(params, k, &PhaseSpacePoint4::new(z[0], z[1], z[2], z[3]));
    let order = k + 2;
    let lo = GaussianCubature::new(&a, &c, order)?.integrate(f);
    let hi = GaussianCubature::new(&a, &c, 2 * order)?.integrate(f);
    let disagreement = (hi - lo).abs();
    if disagreement > tol {
        return Err(Error::QuadratureNotConverged { stage: "wigner normalization", disagreement });
    }
    Ok(hi)
}

/// `∫∫ W dp_x dp_y` at fixed positions `(x, y)`.
pub fn position_marginal(params: SqueezeParams, k: usize, x: f64, y: f64) -> Result<f64> {
    let a = envelope_form(params.into());
    // rows/cols 1, 3 are p_x, p_y; 0, 2 are x, y
    let app = DMatrix::from_row_slice(2, 2, &[a[(1, 1)], a[(1, 3)], a[(3, 1)], a[(3, 3)]]);
    let apq = DMatrix::from_row_slice(2, 2, &[a[(1, 0)], a[(1, 2)], a[(3, 0)], a[(3, 2)]]);
    let q = DVector::from_vec(vec![x, y]);
    let inv = app
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::invalid("params", "degenerate momentum envelope"))?;
    let center = -(inv * apq * q);
    let f = |p: &[f64]| wigner_tmsv(params, k, &PhaseSpacePoint4::new(x, p[0], y, p[1]));
    let order = k + 2;
    let lo = GaussianCubature::new(&app, &center, order)?.integrate(f);
    let hi = GaussianCubature::new(&app, &center, 2 * order)?.integrate(f);
    let disagreement = (hi - lo).abs();
    if disagreement > 1e-10 {
        return Err(Error::QuadratureNotConverged { stage: "momentum marginal", disagreement });
    }
    Ok(hi)
}

/// Positive roots of `Lₖ`, ascending.
pub fn laguerre_roots(k: usize) -> Vec<f64> {
    if k == 0 {
        return Vec::new();
    }
    // all roots lie below 4k + 2
    let upper = 4.0 * k as f64 + 4.0;
    let steps = 400 * k;
    let h = upper / steps as f64;
    let f = |x: f64| laguerre_unchecked(k, 0.0, x);
    let mut roots = Vec::with_capacity(k);
    let mut x0 = 0.0;
    let mut f0 = f(x0);
    for s in 1..=steps {
        let x1 = s as f64 * h;
        let f1 = f(x1);
        if f0 == 0.0 {
            roots.push(x0);
        } else if f0 * f1 < 0.0 {
            let (mut lo, mut hi, mut flo) = (x0, x1, f0);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                let fm = f(mid);
                if fm == 0.0 || hi - lo < 1e-15 * hi {
                    lo = mid;
                    hi = mid;
                    break;
                }
                if flo * fm < 0.0 {
                    hi = mid;
                } else {
                    lo = mid;
                    flo = fm;
                }
            }
            roots.push(0.5 * (lo + hi));
        }
        x0 = x1;
        f0 = f1;
    }
    roots
}

fn negativity_phase_space(
    params: SqueezeParams,
    k: usize,
    radial_order: usize,
    angular_order: usize,
) -> Result<NegativityReport> {
    let map: SqueezeMap = params.into();
    let (ma, _) = squeeze_linear_maps(map);
    let env = envelope_form(map);

    // whiten the envelope: z = V Λ^{-1/2} w, zᵀAz = |w|²
    let eig = SymmetricEigen::new(env);
    let mut whiten = eig.eigenvectors.clone();
    let mut jacobian = 1.0;
    for (j, &lambda) in eig.eigenvalues.iter().enumerate() {
        if !(lambda > 0.0) {
            return Err(Error::invalid("params", "degenerate phase-space envelope"));
        }
        let s = lambda.sqrt().recip();
        jacobian *= s;
        for i in 0..4 {
            whiten[(i, j)] *= s;
        }
    }
    // |α̃|² = wᵀ G w with G of rank ≤ 2
    let mw = &ma * &whiten;
    let g = mw.transpose() * mw;
    let mut mu: Vec<f64> = SymmetricEigen::new(g).eigenvalues.iter().copied().collect();
    mu.sort_by(|a, b| b.total_cmp(a));
    if mu[2].abs() > 1e-10 * mu[0].abs().max(1e-300) {
        return Err(Error::invalid("params", "squeezed amplitude is not a rank-2 projection"));
    }
    let (mu1, mu2) = (mu[0].max(0.0), mu[1].max(0.0));

    let roots = laguerre_roots(k);
    let sign = if k.is_multiple_of(2) { 1.0 } else { -1.0 };
    // the two decoupled directions contribute ∫∫ e^{-s²} = π
    let prefactor = jacobian * FOUR_OVER_PI2 * PI;

    let polar = |radial: usize, angular: usize| -> f64 {
        let (gx, gw) = gauss_legendre_on(radial, 0.0, 1.0);
        let mut total = 0.0;
        for a in 0..angular {
            let phi = 2.0 * PI * a as f64 / angular as f64;
            let m = mu1 * phi.cos().powi(2) + mu2 * phi.sin().powi(2);
            // ∫ρ dρ e^{-ρ²} neg(...) with u = ρ²: ½∫ du e^{-u} neg(±Lₖ(4 m u))
            let neg_at = |u: f64| {
                let v = sign * laguerre_unchecked(k, 0.0, 4.0 * m * u);
                0.5 * (-u).exp() * (-v).max(0.0)
            };
            let mut radial_sum = 0.0;
            if m <= 0.0 {
                // constant integrand: ½∫e^{-u} du · neg = neg_at(0)
                radial_sum = neg_at(0.0);
            } else {
                let mut lo = 0.0;
                for &x in &roots {
                    let hi = x / (4.0 * m);
                    let mid = 0.5 * (lo + hi);
                    let v = sign * laguerre_unchecked(k, 0.0, 4.0 * m * mid);
                    if v < 0.0 {
                        let width = hi - lo;
                        radial_sum += gx
                            .iter()
                            .zip(&gw)
                            .map(|(t, w)| w * width * neg_at(lo + t * width))
                            .sum::<f64>();
                    }
                    lo = hi;
                }
            }
            total += radial_sum;
        }
        total * 2.0 * PI / angular as f64
    };

    let lo = prefactor * polar(radial_order, angular_order);
    let hi = prefactor * polar(2 * radial_order, 2 * angular_order);
    let error_estimate = (hi - lo).abs();
    if error_estimate > NEGATIVITY_TOL {
        return Err(Error::QuadratureNotConverged {
            stage: "phase-space negativity",
            disagreement: error_estimate,
        });
    }

    let integral = normalization_integral(params, k, 1e-8)?;

    // each band between consecutive roots where the profile is negative is
    // one connected shell
    let mut edges = vec![0.0];
    edges.extend(roots.iter().copied());
    edges.push(f64::INFINITY);
    let fringes = edges
        .windows(2)
        .filter(|w| {
            let probe = if w[1].is_finite() { 0.5 * (w[0] + w[1]) } else { w[0] + 1.0 };
            sign * laguerre_unchecked(k, 0.0, probe) < 0.0
        })
        .count();

    // extremes lie on β̃ = 0, so scan the radial profile
    let u_max = 2.0 * (k as f64 + 5.0);
    let (mut min_value, mut max_value) = (f64::INFINITY, f64::NEG_INFINITY);
    for i in 0..=20_000 {
        let v = radial_profile(k, u_max * i as f64 / 20_000.0);
        min_value = min_value.min(v);
        max_value = max_value.max(v);
    }
    min_value = min_value.min(0.0);

    Ok(NegativityReport {
        negative_volume: hi,
        total_abs_volume: integral + 2.0 * hi,
        fringe_count: fringes,
        min_value,
        max_value,
        error_estimate,
    })
}

fn negativity_slice(params: SqueezeParams, k: usize, spec: &WignerSliceSpec) -> Result<NegativityReport> {
    let field = slice_field(params, k, spec)?;
    let (fringes, _) = converged_fringe_count(params, k, spec)?;
    let neg_of = |f: &Field2<f64>| f.map(|v| (-v).max(0.0)).trapezoid();
    let mut prev = neg_of(&field);
    let mut grid = spec.grid;
    let mut error_estimate = f64::INFINITY;
    let mut best = prev;
    let mut finest = field.clone();
    for _ in 0..3 {
        grid = grid.refined();
        let refined = WignerSliceSpec { grid, ..*spec };
        finest = slice_field(params, k, &refined)?;
        best = neg_of(&finest);
        error_estimate = (best - prev).abs();
        if error_estimate <= NEGATIVITY_TOL {
            break;
        }
        prev = best;
    }
    if error_estimate > NEGATIVITY_TOL {
        return Err(Error::QuadratureNotConverged {
            stage: "slice negativity",
            disagreement: error_estimate,
        });
    }
    Ok(NegativityReport {
        negative_volume: best,
        total_abs_volume: finest.map(f64::abs).trapezoid(),
        fringe_count: fringes,
        min_value: field.min(),
        max_value: field.max(),
        error_estimate,
    })
}
