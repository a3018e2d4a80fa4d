//! Truncated two-mode Fock space.
//!
//! Builds the two-mode squeezed vacuum, applies ladder operators and the
//! heralded beam-splitter subtraction, and reads Schmidt coefficients off a
//! photon-number band. Every closed form elsewhere in the crate is checked
//! against this engine.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::specfun::{log_factorial, oscillator_eigenfunctions};

/// Largest discarded probability `tmsv` accepts.
pub const TMSV_TAIL_LIMIT: f64 = 1e-6;

const NORM_TOL: f64 = 1e-9;

/// Squeezing magnitude `r ≥ 0` and phase `θ ∈ (-π, π]` of `ξ = r e^{iθ}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SqueezeParams {
    r: f64,
    theta: f64,
}

impl SqueezeParams {
    pub fn new(r: f64, theta: f64) -> Result<Self> {
        if !r.is_finite() || r < 0.0 {
            return Err(Error::invalid("r", format!("must be finite and ≥ 0, got {r}")));
        }
        if !theta.is_finite() {
            return Err(Error::invalid("theta", format!("must be finite, got {theta}")));
        }
        Ok(SqueezeParams { r, theta: canonical_angle(theta) })
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    /// `η = e^{iθ} tanh r`, the pair amplitude ratio of the squeezed vacuum.
    pub fn eta(&self) -> Complex64 {
        Complex64::from_polar(self.r.tanh(), self.theta)
    }

    pub fn with_r(&self, r: f64) -> Result<Self> {
        Self::new(r, self.theta)
    }
}

/// Maps an angle into `(-π, π]`.
pub fn canonical_angle(theta: f64) -> f64 {
    let t = (theta + PI).rem_euclid(2.0 * PI) - PI;
    if t <= -PI {
        PI
    } else {
        t
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// Signal.
    A,
    /// Idler.
    B,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ladder {
    Create,
    Annihilate,
}

/// Dense two-mode amplitude array over `0 ≤ n_a, n_b ≤ cutoff`.
///
/// `tail_bound` estimates the probability discarded by the truncation. It is
/// carried through every operation so oracle comparisons can state how much
/// of the ideal state they actually see.
#[derive(Debug, Clone, PartialEq)]
pub struct FockState2 {
    cutoff: usize,
    amplitudes: Vec<Complex64>,
    tail_bound: f64,
}

impl FockState2 {
    pub fn zeros(cutoff: usize) -> Self {
        let d = cutoff + 1;
        FockState2 { cutoff, amplitudes: vec![Complex64::new(0.0, 0.0); d * d], tail_bound: 0.0 }
    }

    /// `|n_a, n_b⟩` with unit amplitude.
    pub fn basis(cutoff: usize, n_a: usize, n_b: usize) -> Result<Self> {
        if n_a > cutoff || n_b > cutoff {
            return Err(Error::CutoffOverflow { cutoff });
        }
        let mut s = Self::zeros(cutoff);
        s.set(n_a, n_b, Complex64::new(1.0, 0.0));
        Ok(s)
    }

    pub fn vacuum(cutoff: usize) -> Self {
        Self::basis(cutoff, 0, 0).expect("vacuum always fits")
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn tail_bound(&self) -> f64 {
        self.tail_bound
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    #[inline]
    fn index(&self, n_a: usize, n_b: usize) -> usize {
        n_a * (self.cutoff + 1) + n_b
    }

    pub fn amplitude(&self, n_a: usize, n_b: usize) -> Complex64 {
        if n_a > self.cutoff || n_b > self.cutoff {
            return Complex64::new(0.0, 0.0);
        }
        self.amplitudes[self.index(n_a, n_b)]
    }

    pub fn set(&mut self, n_a: usize, n_b: usize, value: Complex64) {
        let idx = self.index(n_a, n_b);
        self.amplitudes[idx] = value;
    }

    /// Nonzero entries as `(n_a, n_b, amplitude)`.
    pub fn support(&self) -> impl Iterator<Item = (usize, usize, Complex64)> + '_ {
        let d = self.cutoff + 1;
        self.amplitudes
            .iter()
            .enumerate()
            .filter(|(_, a)| a.re != 0.0 || a.im != 0.0)
            .map(move |(idx, &a)| (idx / d, idx % d, a))
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.amplitudes.iter().all(|a| a.re == 0.0 && a.im == 0.0)
    }

    pub fn normalize(&self) -> Result<Self> {
        let n2 = self.norm_sqr();
        if n2 == 0.0 {
            return Err(Error::ZeroState);
        }
        let s = n2.sqrt().recip();
        Ok(FockState2 {
            cutoff: self.cutoff,
            amplitudes: self.amplitudes.iter().map(|a| a * s).collect(),
            tail_bound: self.tail_bound / n2,
        })
    }

    pub fn scaled(&self, factor: Complex64) -> Self {
        FockState2 {
            cutoff: self.cutoff,
            amplitudes: self.amplitudes.iter().map(|a| a * factor).collect(),
            tail_bound: self.tail_bound * factor.norm_sqr(),
        }
    }

    /// Same amplitudes in a larger truncated space.
    pub fn padded(&self, cutoff: usize) -> Result<Self> {
        if cutoff < self.cutoff {
            return Err(Error::invalid("cutoff", "padding cannot shrink the space"));
        }
        let mut out = Self::zeros(cutoff);
        out.tail_bound = self.tail_bound;
        for (a, b, v) in self.support() {
            out.set(a, b, v);
        }
        Ok(out)
    }

    fn check_normalized(&self) -> Result<()> {
        let n2 = self.norm_sqr();
        if (n2 - 1.0).abs() > NORM_TOL {
            return Err(Error::Unnormalized { norm_sqr: n2 });
        }
        Ok(())
    }
}

/// Two-mode squeezed vacuum `Σ e^{inθ} tanhⁿr / cosh r |n, n⟩` for `n ≤ cutoff`.
pub fn tmsv(params: SqueezeParams, cutoff: usize) -> Result<FockState2> {
    if cutoff < 1 {
        return Err(Error::invalid("cutoff", "must be ≥ 1"));
    }
    let t = params.r().tanh();
    let tail = t.powi(2 * (cutoff as i32 + 1));
    if tail > TMSV_TAIL_LIMIT {
        return Err(Error::CutoffTooSmall { cutoff, tail, tol: TMSV_TAIL_LIMIT });
    }
    let mut s = FockState2::zeros(cutoff);
    let c0 = params.r().cosh().recip();
    let mut mag = c0;
    for n in 0..=cutoff {
        s.set(n, n, Complex64::from_polar(mag, n as f64 * params.theta()));
        mag *= t;
    }
    s.tail_bound = tail;
    Ok(s)
}

/// Smallest `N` with `tanh^{2(N+1)} r · (N+k)^k < tol`.
///
/// Pad the result by `k` before applying `k` creation operators.
pub fn suggest_cutoff(r: f64, k: usize, tol: f64) -> usize {
    let t2 = r.tanh().powi(2);
    if t2 == 0.0 {
        return 1;
    }
    let mut n = 1usize;
    loop {
        let est = ((n + 1) as f64 * t2.ln() + k as f64 * ((n + k) as f64).ln()).exp();
        if est < tol || n > 10_000_000 {
            return n;
        }
        n += 1;
    }
}

/// Applies `count` creation or annihilation operators to one mode.
///
/// The result is not renormalized: its norm carries the physical weight
/// (e.g. `‖a†ᵏ|ξ⟩‖²`). Annihilating the vacuum yields the zero state, which
/// callers detect with [`FockState2::is_zero`].
pub fn apply_ladder(
    state: &FockState2,
    mode: Mode,
    kind: Ladder,
    count: usize,
) -> Result<FockState2> {
    if count < 1 {
        return Err(Error::invalid("count", "must be ≥ 1"));
    }
    let n_cut = state.cutoff;
    let mut cur = state.clone();
    for _ in 0..count {
        let mut next = FockState2::zeros(n_cut);
        for (a, b, v) in cur.support() {
            let (n, other) = match mode {
                Mode::A => (a, b),
                Mode::B => (b, a),
            };
            let (m, factor) = match kind {
                Ladder::Create => {
                    if n + 1 > n_cut {
                        return Err(Error::CutoffOverflow { cutoff: n_cut });
                    }
                    (n + 1, ((n + 1) as f64).sqrt())
                }
                Ladder::Annihilate => {
                    if n == 0 {
                        continue;
                    }
                    (n - 1, (n as f64).sqrt())
                }
            };
            let (na, nb) = match mode {
                Mode::A => (m, other),
                Mode::B => (other, m),
            };
            next.set(na, nb, v * factor);
        }
        next.tail_bound = cur.tail_bound * (n_cut + 1 + count) as f64;
        cur = next;
    }
    Ok(cur)
}

/// One beam splitter and one ideal photon-number-resolving detector per
/// subtraction stage.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeraldConfig {
    pub transmittance: f64,
    pub stages: usize,
    pub ancilla_cutoff: usize,
}

impl HeraldConfig {
    pub fn new(transmittance: f64, stages: usize, ancilla_cutoff: usize) -> Result<Self> {
        let c = HeraldConfig { transmittance, stages, ancilla_cutoff };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.transmittance > 0.0 && self.transmittance <= 1.0) {
            return Err(Error::invalid(
                "transmittance",
                format!("must lie in (0, 1], got {}", self.transmittance),
            ));
        }
        if self.stages < 1 {
            return Err(Error::invalid("stages", "must be ≥ 1"));
        }
        if self.ancilla_cutoff < 1 {
            return Err(Error::invalid("ancilla_cutoff", "must be ≥ 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Heralded {
    /// Conditioned, renormalized state; the zero state when `heralded` is false.
    pub state: FockState2,
    /// Probability that every stage clicks.
    pub success_probability: f64,
    pub heralded: bool,
}

/// Heralded subtraction from mode `a`.
///
/// Each stage mixes mode `a` with a vacuum ancilla on a beam splitter
/// (`a† → √T a† + √(1-T) c†`), projects the ancilla onto `|1⟩`, and
/// renormalizes.
pub fn herald_subtract(state: &FockState2, config: &HeraldConfig) -> Result<Heralded> {
    config.validate()?;
    state.check_normalized()?;
    let t = config.transmittance;
    let refl = 1.0 - t;
    let n_cut = state.cutoff;
    let mut cur = state.clone();
    let mut prob = 1.0;
    for _ in 0..config.stages {
        let mut next = FockState2::zeros(n_cut);
        let mut dropped = 0.0;
        for (na, nb, v) in cur.support() {
            // ancilla photons beyond its cutoff are lost from the record
            for j in (config.ancilla_cutoff + 1)..=na {
                dropped += v.norm_sqr() * binomial_weight(na, j, t, refl);
            }
            if na >= 1 && refl > 0.0 {
                let amp = (na as f64).sqrt() * t.powf(0.5 * (na - 1) as f64) * refl.sqrt();
                next.set(na - 1, nb, v * amp);
            }
        }
        let p = next.norm_sqr();
        if p == 0.0 {
            return Ok(Heralded {
                state: FockState2::zeros(n_cut),
                success_probability: 0.0,
                heralded: false,
            });
        }
        prob *= p;
        next.tail_bound = cur.tail_bound + dropped;
        cur = next.normalize()?;
    }
    Ok(Heralded { state: cur, success_probability: prob, heralded: true })
}

fn binomial_weight(n: usize, j: usize, t: f64, refl: f64) -> f64 {
    if refl == 0.0 {
        return 0.0;
    }
    let ln = log_factorial(n) - log_factorial(j) - log_factorial(n - j)
        + (n - j) as f64 * t.ln()
        + j as f64 * refl.ln();
    ln.exp()
}

/// Schmidt form of a state supported on one band `|n_a - n_b| = k`.
///
/// `coefficients[m]` is the magnitude on `|m+k, m⟩` (or `|m, m+k⟩`);
/// `phases[m]` holds the relative phase, with the global phase removed so
/// `phases[0] = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct SchmidtState {
    pub k: usize,
    pub coefficients: Vec<f64>,
    pub phases: Vec<f64>,
    pub normalized: bool,
}

impl SchmidtState {
    pub fn new(k: usize, coefficients: Vec<f64>, phases: Vec<f64>, normalized: bool) -> Self {
        SchmidtState { k, coefficients, phases, normalized }
    }

    pub fn sum_sqr(&self) -> f64 {
        self.coefficients.iter().map(|c| c * c).sum()
    }

    pub fn normalize(&self) -> Result<Self> {
        let n2 = self.sum_sqr();
        if n2 == 0.0 {
            return Err(Error::ZeroState);
        }
        let s = n2.sqrt().recip();
        Ok(SchmidtState {
            k: self.k,
            coefficients: self.coefficients.iter().map(|c| c * s).collect(),
            phases: self.phases.clone(),
            normalized: true,
        })
    }
}

/// Reads Schmidt coefficients off the occupied band.
pub fn schmidt_coefficients(state: &FockState2) -> Result<SchmidtState> {
    let total = state.norm_sqr();
    if total == 0.0 {
        return Err(Error::ZeroState);
    }
    let d = state.cutoff + 1;
    let mut band_mass = vec![0.0; 2 * d - 1];
    for (a, b, v) in state.support() {
        band_mass[a + d - 1 - b] += v.norm_sqr();
    }
    let (best, &mass) = band_mass
        .iter()
        .enumerate()
        .max_by(|x, y| x.1.total_cmp(y.1))
        .expect("non-empty");
    let off_band = (total - mass) / total;
    if off_band >= 1e-10 {
        return Err(Error::NotSingleBand { off_band });
    }
    let offset = best as isize - (d as isize - 1);
    let k = offset.unsigned_abs();
    let len = d - k;
    let mut amps = Vec::with_capacity(len);
    for m in 0..len {
        let v = if offset >= 0 { state.amplitude(m + k, m) } else { state.amplitude(m, m + k) };
        amps.push(v);
    }
    while amps.len() > 1 && amps.last().is_some_and(|a| a.norm_sqr() == 0.0) {
        amps.pop();
    }
    let global = amps.iter().find(|a| a.norm_sqr() > 0.0).map_or(0.0, |a| a.arg());
    let norm = mass.sqrt();
    let coefficients = amps.iter().map(|a| a.norm() / norm).collect();
    let phases = amps
        .iter()
        .map(|a| if a.norm_sqr() > 0.0 { canonical_angle(a.arg() - global) } else { 0.0 })
        .collect();
    Ok(SchmidtState { k, coefficients, phases, normalized: true })
}

/// `|⟨x|y⟩|²` of two normalized states.
pub fn fidelity(x: &FockState2, y: &FockState2) -> Result<f64> {
    if x.cutoff != y.cutoff {
        return Err(Error::CutoffMismatch { left: x.cutoff, right: y.cutoff });
    }
    x.check_normalized()?;
    y.check_normalized()?;
    let overlap: Complex64 =
        x.amplitudes.iter().zip(&y.amplitudes).map(|(a, b)| a.conj() * b).sum();
    Ok(overlap.norm_sqr().min(1.0))
}

/// Position-quadrature wavefunction `Σ ψ(n_a, n_b) φ_{n_a}(x) φ_{n_b}(y)`.
pub fn wavefunction_from_fock(state: &FockState2, x: f64, y: f64) -> Complex64 {
    let phi_x = oscillator_eigenfunctions(state.cutoff, x);
    let phi_y = oscillator_eigenfunctions(state.cutoff, y);
    state.support().map(|(a, b, v)| v * (phi_x[a] * phi_y[b])).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn params_validate_and_canonicalize() {
        assert!(SqueezeParams::new(-0.1, 0.0).is_err());
        assert!(SqueezeParams::new(0.5, f64::NAN).is_err());
        let p = SqueezeParams::new(0.5, 3.0 * PI).unwrap();
        assert!((p.theta() - PI).abs() < 1e-12);
        let p = SqueezeParams::new(0.5, -PI).unwrap();
        assert_eq!(p.theta(), PI);
        assert!((canonical_angle(-PI / 2.0) + PI / 2.0).abs() < 1e-15);
    }

    #[test]
    fn tmsv_at_zero_squeezing_is_vacuum() {
        let s = tmsv(SqueezeParams::new(0.0, 0.0).unwrap(), 4).unwrap();
        assert_eq!(s.amplitude(0, 0), c(1.0));
        assert_eq!(s.norm_sqr(), 1.0);
    }

    #[test]
    fn tmsv_pair_ratio_and_geometric_norm() {
        let p = SqueezeParams::new(0.5, 0.3).unwrap();
        let s = tmsv(p, 40).unwrap();
        let ratio = s.amplitude(1, 1).norm() / s.amplitude(0, 0).norm();
        assert!((ratio - 0.462_117_157_260_009_8).abs() < 1e-12);
        // Σ tanh^{2n} r / cosh² r = 1 - tanh^{2(N+1)} r
        assert!((s.norm_sqr() - (1.0 - s.tail_bound())).abs() < 1e-14);
        assert!(s.support().all(|(a, b, _)| a == b));
    }

    #[test]
    fn tmsv_rejects_short_cutoff() {
        let p = SqueezeParams::new(1.0, 0.0).unwrap();
        assert!(matches!(tmsv(p, 5), Err(Error::CutoffTooSmall { .. })));
        assert!(tmsv(p, 0).is_err());
    }

    #[test]
    fn ladder_matrix_elements() {
        let v = FockState2::vacuum(3);
        let one = apply_ladder(&v, Mode::A, Ladder::Create, 1).unwrap();
        assert_eq!(one.amplitude(1, 0), c(1.0));
        let two = apply_ladder(&one, Mode::A, Ladder::Create, 1).unwrap();
        assert!((two.amplitude(2, 0).re - 2f64.sqrt()).abs() < 1e-15);
        let gone = apply_ladder(&v, Mode::B, Ladder::Annihilate, 1).unwrap();
        assert!(gone.is_zero());
        let top = FockState2::basis(3, 3, 0).unwrap();
        assert!(matches!(
            apply_ladder(&top, Mode::A, Ladder::Create, 1),
            Err(Error::CutoffOverflow { .. })
        ));
    }

    #[test]
    fn herald_degenerate_cases() {
        let p = SqueezeParams::new(0.5, 0.0).unwrap();
        let s = tmsv(p, 40).unwrap().normalize().unwrap();
        let full = HeraldConfig::new(1.0, 1, 3).unwrap();
        let h = herald_subtract(&s, &full).unwrap();
        assert_eq!(h.success_probability, 0.0);
        assert!(!h.heralded && h.state.is_zero());

        let vac = FockState2::vacuum(5);
        let cfg = HeraldConfig::new(0.9, 2, 3).unwrap();
        let h = herald_subtract(&vac, &cfg).unwrap();
        assert_eq!(h.success_probability, 0.0);

        assert!(HeraldConfig::new(0.0, 1, 1).is_err());
        assert!(HeraldConfig::new(1.2, 1, 1).is_err());
        let unnormalized = tmsv(p, 40).unwrap().scaled(c(2.0));
        assert!(herald_subtract(&unnormalized, &cfg).is_err());
    }

    #[test]
    fn schmidt_reads_band() {
        let s = schmidt_coefficients(&FockState2::vacuum(3)).unwrap();
        assert_eq!(s.k, 0);
        assert_eq!(s.coefficients, vec![1.0]);

        let p = SqueezeParams::new(0.7, 1.1).unwrap();
        let sq = tmsv(p, 60).unwrap();
        let sc = schmidt_coefficients(&sq).unwrap();
        let t = 0.7f64.tanh();
        for m in 1..20 {
            let ratio = sc.coefficients[m] / sc.coefficients[m - 1];
            assert!((ratio - t).abs() < 1e-12);
            assert!((sc.phases[m] - canonical_angle(m as f64 * 1.1)).abs() < 1e-9);
        }

        let mut mixed = FockState2::zeros(3);
        mixed.set(1, 0, c(0.8));
        mixed.set(0, 1, c(0.6));
        assert!(matches!(schmidt_coefficients(&mixed), Err(Error::NotSingleBand { .. })));
    }

    #[test]
    fn fidelity_basics() {
        let a = FockState2::basis(2, 1, 0).unwrap();
        let b = FockState2::basis(2, 0, 1).unwrap();
        assert_eq!(fidelity(&a, &a).unwrap(), 1.0);
        assert_eq!(fidelity(&a, &b).unwrap(), 0.0);
        let c3 = FockState2::basis(3, 0, 1).unwrap();
        assert!(matches!(fidelity(&a, &c3), Err(Error::CutoffMismatch { .. })));
    }

    #[test]
    fn vacuum_wavefunction() {
        let v = FockState2::vacuum(2);
        let w = wavefunction_from_fock(&v, 0.0, 0.0);
        assert!((w.re - PI.powf(-0.5)).abs() < 1e-15);
        let one = FockState2::basis(2, 1, 0).unwrap();
        let l = wavefunction_from_fock(&one, 0.7, 0.2);
        let r = wavefunction_from_fock(&one, -0.7, 0.2);
        assert!((l + r).norm() < 1e-15);
    }

    #[test]
    fn suggest_cutoff_meets_tolerance() {
        for &(r, k) in &[(0.3, 0usize), (0.8, 2), (1.2, 4)] {
            let n = suggest_cutoff(r, k, 1e-12);
            let t2 = f64::tanh(r).powi(2);
            assert!(t2.powi(n as i32 + 1) * ((n + k) as f64).powi(k as i32) < 1e-12);
            if n > 1 {
                let m = n - 1;
                assert!(t2.powi(m as i32 + 1) * ((m + k) as f64).powi(k as i32) >= 1e-12);
            }
        }
    }
}
