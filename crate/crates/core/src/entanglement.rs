//! Entanglement measures of the Schmidt-diagonal subtracted state
//! `Σ c_m e^{imθ} |m + k, m⟩`.
//!
//! Two printed formulas do not reproduce the baselines stated next to them,
//! so both readings are exposed:
//!
//! * log negativity: the pure-state value `log₂((Σ c_m)²)` and the literal
//!   `log₂((Σ c_m²)²)`, which vanishes on normalised coefficients;
//! * entanglement of formation: the literal product
//!   `(Σ c)² · (−Σ c² log₂ c²)` on unnormalised coefficients, next to the
//!   von Neumann entropy of the reduced state.

use std::f64::consts::LOG2_E;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fock::{SchmidtState, SqueezeParams};
use crate::specfun::log_factorial;

/// Relative probability mass that coefficient truncation may discard.
pub const COEFFICIENT_TAIL_TOL: f64 = 1e-12;

/// Hard limit on series length, reached only for `tanh r` within ~1e-7 of 1.
pub const MAX_SERIES_TERMS: usize = 200_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MeasureKind {
    LogNegativity,
    LogNegativityPaperLiteral,
    NegativityRatio,
    EfPaper,
    EntropyNormalized,
}

impl MeasureKind {
    pub const ALL: [MeasureKind; 5] = [
        MeasureKind::LogNegativity,
        MeasureKind::LogNegativityPaperLiteral,
        MeasureKind::NegativityRatio,
        MeasureKind::EfPaper,
        MeasureKind::EntropyNormalized,
    ];

    pub fn name(self) -> &'static str {
        match self {
            MeasureKind::LogNegativity => "log_negativity",
            MeasureKind::LogNegativityPaperLiteral => "log_negativity_paper_literal",
            MeasureKind::NegativityRatio => "negativity_ratio",
            MeasureKind::EfPaper => "ef_paper",
            MeasureKind::EntropyNormalized => "entropy_normalized",
        }
    }

    pub fn parse(s: &str) -> Option<MeasureKind> {
        MeasureKind::ALL.into_iter().find(|m| m.name() == s)
    }
}

/// Coefficient conventions.
///
/// * `PaperLiteral`: `c_m = tanhᵐ r · √(m + k) / cosh² r`
/// * `OperatorDerived`: `c_m = tanhᵐ r · √((m + k)!/m!)`, the band amplitudes
///   of `a†ᵏ|ξ⟩` up to a constant
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CoefficientKind {
    PaperLiteral,
    OperatorDerived,
}

impl CoefficientKind {
    pub fn name(self) -> &'static str {
        match self {
            CoefficientKind::PaperLiteral => "paper_literal",
            CoefficientKind::OperatorDerived => "operator_derived",
        }
    }

    pub fn parse(s: &str) -> Option<CoefficientKind> {
        match s {
            "paper_literal" => Some(CoefficientKind::PaperLiteral),
            "operator_derived" => Some(CoefficientKind::OperatorDerived),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CoefficientSource {
    pub kind: CoefficientKind,
    pub normalize: bool,
}

impl CoefficientSource {
    pub const fn new(kind: CoefficientKind, normalize: bool) -> Self {
        CoefficientSource { kind, normalize }
    }

    pub const fn operator_normalized() -> Self {
        Self::new(CoefficientKind::OperatorDerived, true)
    }

    pub const fn paper_literal() -> Self {
        Self::new(CoefficientKind::PaperLiteral, false)
    }
}

impl Default for CoefficientSource {
    fn default() -> Self {
        Self::operator_normalized()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EntanglementCurve {
    pub r_values: Vec<f64>,
    pub values: Vec<f64>,
    pub k: usize,
    pub measure: MeasureKind,
    pub source: CoefficientSource,
}

impl EntanglementCurve {
    /// Index and `(r, value)` of the first maximum; `None` for an empty or
    /// all-NaN curve.
    pub fn argmax(&self) -> Option<(usize, f64, f64)> {
        let mut best: Option<(usize, f64, f64)> = None;
        for (i, (&r, &v)) in self.r_values.iter().zip(&self.values).enumerate() {
            if v.is_nan() {
                continue;
            }
            if best.is_none_or(|(_, _, b)| v > b) {
                best = Some((i, r, v));
            }
        }
        best
    }
}

/// `ln c_m` for the chosen convention (`−∞` for an exactly zero coefficient).
fn log_coefficient(kind: CoefficientKind, log_t: f64, log_cosh: f64, k: usize, m: usize) -> f64 {
    let mf = m as f64;
    match kind {
        CoefficientKind::PaperLiteral => {
            if m + k == 0 {
                f64::NEG_INFINITY
            } else {
                mf * log_t + 0.5 * ((m + k) as f64).ln() - 2.0 * log_cosh
            }
        }
        CoefficientKind::OperatorDerived => {
            mf * log_t + 0.5 * (log_factorial(m + k) - log_factorial(m))
        }
    }
}

/// Upper bound of `c_{m+1}² / c_m²` for every index past `m`.
fn square_ratio_bound(kind: CoefficientKind, t2: f64, k: usize, m: usize) -> f64 {
    let m1 = (m + 1) as f64;
    let kf = k as f64;
    match kind {
        CoefficientKind::PaperLiteral => t2 * (m1 + kf) / (m1 + kf - 1.0).max(1.0),
        CoefficientKind::OperatorDerived => t2 * (m1 + kf) / m1,
    }
}

fn raw_coefficients(params: SqueezeParams, k: usize, kind: CoefficientKind, cutoff: usize) -> Vec<f64> {
    let r = params.r();
    if r == 0.0 {
        let mut c = vec![0.0; cutoff + 1];
        c[0] = match kind {
            CoefficientKind::PaperLiteral => (k as f64).sqrt(),
            CoefficientKind::OperatorDerived => (log_factorial(k) * 0.5).exp(),
        };
        return c;
    }
    let log_t = r.tanh().ln();
    let log_cosh = r.cosh().ln();
    (0..=cutoff).map(|m| log_coefficient(kind, log_t, log_cosh, k, m).exp()).collect()
}

/// Bound on `Σ_{m > cutoff} c_m² / Σ_{m ≤ cutoff} c_m²`, or infinity when the
/// geometric bound is not yet available.
fn relative_square_tail(c: &[f64], t2: f64, kind: CoefficientKind, k: usize) -> f64 {
    let n = c.len() - 1;
    let kept: f64 = c.iter().map(|x| x * x).sum();
    if kept == 0.0 {
        return f64::INFINITY;
    }
    if t2 == 0.0 {
        return 0.0;
    }
    let q = square_ratio_bound(kind, t2, k, n);
    if q >= 1.0 {
        return f64::INFINITY;
    }
    let next = c[n] * c[n] * square_ratio_bound(kind, t2, k, n.saturating_sub(1)).max(q);
    next / (1.0 - q) / kept
}

/// Schmidt coefficients `c_0 ..= c_cutoff` with phases `mθ`.
pub fn coefficients(
    params: SqueezeParams,
    k: usize,
    source: CoefficientSource,
    cutoff: usize,
) -> Result<SchmidtState> {
    let t = params.r().tanh();
    let c = raw_coefficients(params, k, source.kind, cutoff);
    let tail = relative_square_tail(&c, t * t, source.kind, k);
    if !(tail < COEFFICIENT_TAIL_TOL) {
        return Err(Error::CutoffTooSmall { cutoff, tail, tol: COEFFICIENT_TAIL_TOL });
    }
    let phases = (0..=cutoff).map(|m| m as f64 * params.theta()).collect();
    let s = SchmidtState::new(k, c, phases, false);
    if source.normalize {
        s.normalize()
    } else {
        Ok(s)
    }
}

/// Smallest cutoff at which the bounded tails of both `Σ c²` and `Σ c`
/// fall below `1e-12` relative.
pub fn sufficient_cutoff(params: SqueezeParams, k: usize, kind: CoefficientKind) -> Result<usize> {
    let t = params.r().tanh();
    let t2 = t * t;
    if t2 == 0.0 {
        return Ok(0);
    }
    let log_t = t.ln();
    let log_cosh = params.r().cosh().ln();
    let (mut kept, mut kept_linear) = (0.0, 0.0);
    for m in 0..MAX_SERIES_TERMS {
        let c2 = (2.0 * log_coefficient(kind, log_t, log_cosh, k, m)).exp();
        kept += c2;
        let q = square_ratio_bound(kind, t2, k, m);
        kept_linear += c2.sqrt();
        if kept > 0.0 && q < 1.0 {
            let next = c2 * square_ratio_bound(kind, t2, k, m.saturating_sub(1)).max(q);
            let next_linear = next.sqrt();
            // summed-amplitude measures need the tail of Σ c as well
            if next / (1.0 - q) / kept < COEFFICIENT_TAIL_TOL
                && next_linear / (1.0 - q.sqrt()) / kept_linear < COEFFICIENT_TAIL_TOL
            {
                return Ok(m);
            }
        }
    }
    Err(Error::CutoffTooSmall { cutoff: MAX_SERIES_TERMS, tail: f64::NAN, tol: COEFFICIENT_TAIL_TOL })
}

/// [`coefficients`] at [`sufficient_cutoff`].
pub fn coefficients_auto(params: SqueezeParams, k: usize, source: CoefficientSource) -> Result<SchmidtState> {
    let cutoff = sufficient_cutoff(params, k, source.kind)?;
    coefficients(params, k, source, cutoff)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NegativityFormula {
    /// `log₂((Σ c_m)²)`.
    SummedAmplitude,
    /// `log₂((Σ c_m²)²)`.
    PaperLiteral,
}

fn require_normalized(s: &SchmidtState) -> Result<()> {
    let n2 = s.sum_sqr();
    if (n2 - 1.0).abs() > 1e-9 {
        return Err(Error::Unnormalized { norm_sqr: n2 });
    }
    Ok(())
}

pub fn log_negativity(s: &SchmidtState, formula: NegativityFormula) -> Result<f64> {
    if s.coefficients.is_empty() {
        return Err(Error::EmptyCoefficients);
    }
    match formula {
        NegativityFormula::SummedAmplitude => {
            require_normalized(s)?;
            let sum: f64 = s.coefficients.iter().map(|c| c.abs()).sum();
            Ok((2.0 * sum.log2()).max(0.0))
        }
        NegativityFormula::PaperLiteral => Ok(2.0 * s.sum_sqr().log2()),
    }
}

/// `S = −Σ c² log₂ c²`.
pub fn entanglement_entropy(s: &SchmidtState) -> Result<f64> {
    if s.coefficients.is_empty() {
        return Err(Error::EmptyCoefficients);
    }
    require_normalized(s)?;
    Ok(entropy_sum(&s.coefficients))
}

fn entropy_sum(c: &[f64]) -> f64 {
    c.iter()
        .map(|&x| {
            let p = x * x;
            if p == 0.0 {
                0.0
            } else {
                -p * p.log2()
            }
        })
        .sum()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatioReport {
    /// `ε_k / ε_0`, summed-amplitude log negativities on normalised
    /// coefficients.
    pub ratio: f64,
    /// `(Σ c_n e^{−r})²` with the source's coefficients.
    pub paper_closed_form: f64,
}

pub fn negativity_ratio(params: SqueezeParams, k: usize, source: CoefficientSource) -> Result<RatioReport> {
    if params.r() == 0.0 {
        return Err(Error::invalid("r", "ratio is 0/0 at r = 0"));
    }
    let normalized = CoefficientSource { normalize: true, ..source };
    let eps_k = log_negativity(&coefficients_auto(params, k, normalized)?, NegativityFormula::SummedAmplitude)?;
    let base = CoefficientSource::new(CoefficientKind::OperatorDerived, true);
    let eps_0 = log_negativity(&coefficients_auto(params, 0, base)?, NegativityFormula::SummedAmplitude)?;
    let c = coefficients_auto(params, k, source)?;
    let sum: f64 = c.coefficients.iter().sum();
    let closed = (sum * (-params.r()).exp()).powi(2);
    Ok(RatioReport { ratio: eps_k / eps_0, paper_closed_form: closed })
}

/// The printed entanglement of formation
/// `(Σ_n c_n)(Σ_m c_m)(−Σ_p c_p² log₂ c_p²)` on unnormalised paper-literal
/// coefficients.
///
/// With `cutoff = None` the series is summed until a geometric tail bound on
/// both `Σ c` and `Σ c² |log₂ c²|` falls below `1e-12` relative; with an
/// explicit cutoff the same bound must already hold there.
pub fn ef_paper(params: SqueezeParams, k: usize, cutoff: Option<usize>) -> Result<f64> {
    let r = params.r();
    if r == 0.0 {
        return Ok(ef_from_terms(&raw_coefficients(params, k, CoefficientKind::PaperLiteral, 0)));
    }
    let t = r.tanh();
    let log_t = t.ln();
    let log_cosh = r.cosh().ln();
    let limit = cutoff.map_or(MAX_SERIES_TERMS, |c| c + 1);
    let (mut sum_c, mut sum_ent, mut sum_abs_ent) = (0.0f64, 0.0f64, 0.0f64);
    for m in 0..limit {
        let lc = log_coefficient(CoefficientKind::PaperLiteral, log_t, log_cosh, k, m);
        let c = lc.exp();
        let ent = if c == 0.0 { 0.0 } else { -2.0 * lc * LOG2_E * c * c };
        sum_c += c;
        sum_ent += ent;
        sum_abs_ent += ent.abs();
        let (tail_c, tail_ent) = ef_tail_bounds(t, k, m, lc);
        let done = sum_c > 0.0
            && tail_c < COEFFICIENT_TAIL_TOL * sum_c
            && tail_ent < COEFFICIENT_TAIL_TOL * sum_abs_ent.max(f64::MIN_POSITIVE);
        if done && cutoff.is_none_or(|c| m == c) {
            return Ok(sum_c * sum_c * sum_ent);
        }
        if cutoff == Some(m) {
            return Err(Error::CutoffTooSmall { cutoff: m, tail: tail_c.max(tail_ent), tol: COEFFICIENT_TAIL_TOL });
        }
    }
    Err(Error::CutoffTooSmall { cutoff: limit, tail: f64::NAN, tol: COEFFICIENT_TAIL_TOL })
}

/// Bounds on `Σ_{j > m} c_j` and `Σ_{j > m} c_j² |log₂ c_j²|` given
/// `ln c_m`; infinite until the terms decay geometrically and `c < 1`.
fn ef_tail_bounds(t: f64, k: usize, m: usize, log_c: f64) -> (f64, f64) {
    let kf = k as f64;
    let mf = m as f64;
    // c_{j+1}/c_j = t √((j+1+k)/(j+k)), decreasing in j
    let q = t * ((mf + 1.0 + kf) / (mf + kf).max(1.0)).sqrt();
    if q >= 1.0 || log_c >= 0.0 {
        return (f64::INFINITY, f64::INFINITY);
    }
    let c = log_c.exp();
    let tail_c = c * q / (1.0 - q);
    // |log c_j²| grows at most by 2|ln t| + 1/(j+k) per step
    let l = -2.0 * log_c;
    let growth = 2.0 * (-t.ln()) + 1.0 / (mf + kf).max(1.0);
    let rho = q * q * (1.0 + growth / l);
    if rho >= 1.0 {
        return (tail_c, f64::INFINITY);
    }
    let tail_ent = c * c * q * q * (l + growth) * LOG2_E / (1.0 - rho);
    (tail_c, tail_ent)
}

fn ef_from_terms(c: &[f64]) -> f64 {
    let s: f64 = c.iter().sum();
    s * s * entropy_sum(c)
}

/// The printed formula summed over `c_0 ..= c_cutoff` with no tail check.
pub fn ef_paper_truncated(params: SqueezeParams, k: usize, cutoff: usize) -> f64 {
    ef_from_terms(&raw_coefficients(params, k, CoefficientKind::PaperLiteral, cutoff))
}

/// One measure at one squeezing strength.
pub fn evaluate(measure: MeasureKind, params: SqueezeParams, k: usize, source: CoefficientSource) -> Result<f64> {
    match measure {
        MeasureKind::LogNegativity => {
            let s = coefficients_auto(params, k, CoefficientSource { normalize: true, ..source })?;
            log_negativity(&s, NegativityFormula::SummedAmplitude)
        }
        MeasureKind::LogNegativityPaperLiteral => {
            let s = coefficients_auto(params, k, source)?;
            log_negativity(&s, NegativityFormula::PaperLiteral)
        }
        MeasureKind::NegativityRatio => Ok(negativity_ratio(params, k, source)?.ratio),
        MeasureKind::EfPaper => ef_paper(params, k, None),
        MeasureKind::EntropyNormalized => {
            let s = coefficients_auto(params, k, CoefficientSource { normalize: true, ..source })?;
            entanglement_entropy(&s)
        }
    }
}

/// `measure` over `r_grid` with the phase of `template`.
pub fn scan(
    measure: MeasureKind,
    template: SqueezeParams,
    k: usize,
    r_grid: &[f64],
    source: CoefficientSource,
) -> Result<EntanglementCurve> {
    if r_grid.is_empty() {
        return Err(Error::invalid("r_grid", "empty"));
    }
    if r_grid.iter().any(|r| !(r.is_finite() && *r > 0.0)) {
        return Err(Error::invalid("r_grid", "values must be finite and positive"));
    }
    if r_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::invalid("r_grid", "must be strictly increasing"));
    }
    let values = r_grid
        .par_iter()
        .map(|&r| {
            template
                .with_r(r)
                .and_then(|p| evaluate(measure, p, k, source))
                .map_err(|e| Error::ScanPoint { r, source: Box::new(e) })
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(EntanglementCurve { r_values: r_grid.to_vec(), values, k, measure, source })
}

/// Uniform grid `start, start + step, …` not exceeding `stop` (within
/// `step/1000`).
pub fn r_range(start: f64, stop: f64, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0 && start.is_finite() && stop.is_finite() && stop >= start) {
        return Err(Error::invalid("r_grid", "need start ≤ stop and step > 0"));
    }
    let n = ((stop - start) / step + 1e-3).floor() as usize;
    Ok((0..=n).map(|i| start + i as f64 * step).collect())
}

/// Argmax on `r_grid`, then again on a 10× finer grid spanning one coarse
/// step either side. Returns `(coarse, refined)` as `(r, value)` pairs.
pub fn refined_argmax(
    measure: MeasureKind,
    template: SqueezeParams,
    k: usize,
    r_grid: &[f64],
    source: CoefficientSource,
) -> Result<((f64, f64), (f64, f64))> {
    let coarse = scan(measure, template, k, r_grid, source)?;
    let (i, r0, v0) = coarse.argmax().ok_or_else(|| Error::invalid("r_grid", "no finite values"))?;
    let lo = r_grid[i.saturating_sub(1)];
    let hi = r_grid[(i + 1).min(r_grid.len() - 1)];
    let fine_step = if r_grid.len() > 1 { (r_grid[1] - r_grid[0]) / 10.0 } else { 0.0 };
    if fine_step == 0.0 || hi <= lo {
        return Ok(((r0, v0), (r0, v0)));
    }
    let fine_grid = r_range(lo, hi, fine_step)?;
    let fine = scan(measure, template, k, &fine_grid, source)?;
    let (_, r1, v1) = fine.argmax().ok_or_else(|| Error::invalid("r_grid", "no finite values"))?;
    Ok(((r0, v0), (r1, v1)))
}
