//! Phase singularities and topological charge of complex fields.
//!
//! Counterclockwise loops in the `(x, y)` plane count positive. A charge is
//! the sum of wrapped phase increments around a loop divided by `2π`.
//!
//! For `prefactor × P × exp(Q)` the Gaussian factor has the continuous
//! logarithm `Q`, so every winding equals that of `prefactor × P`; the
//! analytic paths use that phase and never alias on `Im Q`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::{Field2, GridSpec};
use crate::states::{PolyGauss, QuadraturePoint};

/// Fields smaller than this on a contour sample count as zero.
pub const CONTOUR_ZERO_TOL: f64 = 1e-14;

/// Maximum number of lattice doublings in [`locate_singularities`].
pub const MAX_DOUBLINGS: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Singularity {
    /// Centre of the plaquette that carries the winding.
    pub location: QuadraturePoint,
    pub charge: i32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChargeResult {
    pub singularities: Vec<Singularity>,
    /// Sum of the plaquette charges.
    pub total_charge: i32,
    /// Winding around the outer edge of the lattice.
    pub boundary_charge: i32,
    /// The zero set is a curve rather than isolated points (real `η`); no
    /// charges are reported.
    pub zero_manifold: bool,
    /// Lattice on which the reported set was found.
    pub grid: GridSpec,
}

/// Closed loop through lattice nodes `(i, j)`; the last node connects back
/// to the first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LatticeLoop {
    nodes: Vec<(usize, usize)>,
}

impl LatticeLoop {
    pub fn new(nodes: Vec<(usize, usize)>) -> Result<Self> {
        if nodes.len() < 3 {
            return Err(Error::invalid("loop", "needs at least three nodes"));
        }
        Ok(LatticeLoop { nodes })
    }

    /// Counterclockwise boundary of the node rectangle `[i0, i1] × [j0, j1]`.
    pub fn rectangle(i0: usize, j0: usize, i1: usize, j1: usize) -> Result<Self> {
        if i1 <= i0 || j1 <= j0 {
            return Err(Error::invalid("loop", "empty rectangle"));
        }
        let mut nodes = Vec::with_capacity(2 * (i1 - i0 + j1 - j0));
        nodes.extend((i0..i1).map(|i| (i, j0)));
        nodes.extend((j0..j1).map(|j| (i1, j)));
        nodes.extend((i0 + 1..=i1).rev().map(|i| (i, j1)));
        nodes.extend((j0 + 1..=j1).rev().map(|j| (i0, j)));
        Ok(LatticeLoop { nodes })
    }

    /// Outer edge of `grid`.
    pub fn boundary(grid: &GridSpec) -> Self {
        Self::rectangle(0, 0, grid.nx - 1, grid.ny - 1).expect("validated grid has ≥ 2 nodes per axis")
    }

    pub fn nodes(&self) -> &[(usize, usize)] {
        &self.nodes
    }
}

fn wrap(d: f64) -> f64 {
    let w = (d + PI).rem_euclid(2.0 * PI) - PI;
    if w == -PI {
        PI
    } else {
        w
    }
}

fn integer_winding(total: f64) -> Result<i32> {
    let w = total / (2.0 * PI);
    let n = w.round();
    if (w - n).abs() > 1e-6 {
        return Err(Error::NonIntegerWinding { value: w });
    }
    Ok(n as i32)
}

/// Winding of a sampled field around a lattice loop.
pub fn winding_number(field: &Field2<Complex64>, lattice_loop: &LatticeLoop) -> Result<i32> {
    let g = *field.grid();
    let mut phases = Vec::with_capacity(lattice_loop.nodes.len());
    for &(i, j) in &lattice_loop.nodes {
        if i >= g.nx || j >= g.ny {
            return Err(Error::invalid("loop", format!("node ({i}, {j}) outside the grid")));
        }
        let v = field.get(i, j);
        if !(v.norm() > CONTOUR_ZERO_TOL) {
            return Err(Error::ZeroOnContour { x: g.x(i), y: g.y(j) });
        }
        phases.push(v.arg());
    }
    let n = phases.len();
    let total: f64 = (0..n).map(|a| wrap(phases[(a + 1) % n] - phases[a])).sum();
    integer_winding(total)
}

/// A closed path in the `(x, y)` plane.
#[derive(Debug, Clone, PartialEq)]
pub enum Contour {
    /// Counterclockwise circle, initially sampled at `samples` points and
    /// subdivided wherever the phase turns by more than `π/4` per step.
    Circle { center: QuadraturePoint, radius: f64, samples: usize },
    /// Closed polygon through the given vertices.
    Polygon(Vec<QuadraturePoint>),
}

impl Contour {
    pub fn circle(radius: f64) -> Self {
        Contour::Circle { center: QuadraturePoint::new(0.0, 0.0), radius, samples: 256 }
    }

    fn point_at(&self, s: f64) -> (f64, f64) {
        match self {
            Contour::Circle { center, radius, .. } => {
                let a = 2.0 * PI * s;
                (center.x + radius * a.cos(), center.y + radius * a.sin())
            }
            Contour::Polygon(v) => {
                let n = v.len() as f64;
                let t = (s.rem_euclid(1.0)) * n;
                let i = (t.floor() as usize).min(v.len() - 1);
                let f = t - i as f64;
                let (a, b) = (v[i], v[(i + 1) % v.len()]);
                (a.x + f * (b.x - a.x), a.y + f * (b.y - a.y))
            }
        }
    }

    fn initial_samples(&self) -> usize {
        match self {
            Contour::Circle { samples, .. } => (*samples).max(8),
            Contour::Polygon(v) => 16 * v.len(),
        }
    }
}

/// Winding of `pg` around `contour`.
///
/// Segments are bisected until consecutive phases differ by less than
/// `π/4`; a sample where the polynomial factor is below `1e-12` of its
/// rounding scale is rejected as a zero on the contour.
pub fn winding_along(pg: &PolyGauss, contour: &Contour) -> Result<i32> {
    if let Contour::Polygon(v) = contour {
        if v.len() < 3 {
            return Err(Error::invalid("contour", "polygon needs at least three vertices"));
        }
    }
    let phase_at = |s: f64| -> Result<f64> {
        let (x, y) = contour.point_at(s);
        let p = pg.poly().eval(x, y);
        if !(p.norm() > 1e-12 * pg.poly().abs_scale(x, y)) || pg.prefactor == Complex64::new(0.0, 0.0) {
            return Err(Error::ZeroOnContour { x, y });
        }
        Ok((pg.prefactor * p).arg())
    };
    let n = contour.initial_samples();
    let mut total = 0.0;
    for a in 0..n {
        let (s0, s1) = (a as f64 / n as f64, (a + 1) as f64 / n as f64);
        total += segment_turn(&phase_at, s0, phase_at(s0)?, s1, phase_at(s1)?, 0)?;
    }
    integer_winding(total)
}

fn segment_turn(
    phase_at: &impl Fn(f64) -> Result<f64>,
    s0: f64,
    p0: f64,
    s1: f64,
    p1: f64,
    depth: usize,
) -> Result<f64> {
    let d = wrap(p1 - p0);
    if d.abs() < PI / 4.0 || depth >= 40 {
        return Ok(d);
    }
    let sm = 0.5 * (s0 + s1);
    let pm = phase_at(sm)?;
    Ok(segment_turn(phase_at, s0, p0, sm, pm, depth + 1)? + segment_turn(phase_at, sm, pm, s1, p1, depth + 1)?)
}

/// Radius beyond which the polynomial factor of `pg` cannot vanish, from
/// `|H_n| ≥ Rⁿ min_φ |H_n(cos φ, sin φ)|` against the coefficient sums of
/// the lower homogeneous parts. `None` when the top-degree form vanishes
/// in some direction (then zeros can escape to infinity).
pub fn zero_free_radius(pg: &PolyGauss) -> Option<f64> {
    let poly = pg.poly();
    let n = poly.degree();
    if n == 0 {
        return Some(0.0);
    }
    let lead = poly.leading_form();
    let lead_abs: f64 = lead.iter().map(|c| c.norm()).sum();
    let form_at = |phi: f64| -> f64 {
        let (c, sn) = (phi.cos(), phi.sin());
        lead.iter()
            .enumerate()
            .map(|(i, a)| a * c.powi(i as i32) * sn.powi((n - i) as i32))
            .sum::<Complex64>()
            .norm()
    };
    // |dH_n/dφ| ≤ n · Σ|a_i| bounds the variation between samples; densify
    // until that slack is below half the sampled minimum
    let mut samples = 1024usize;
    let m = loop {
        let min_lead = (0..samples).map(|s| form_at(PI * s as f64 / samples as f64)).fold(f64::INFINITY, f64::min);
        let slack = n as f64 * lead_abs * PI / samples as f64;
        if slack <= 0.5 * min_lead {
            break min_lead - slack;
        }
        if samples >= 1 << 22 || !(min_lead > 1e-12 * lead_abs) {
            return None;
        }
        samples *= 4;
    };
    let lower: f64 = (0..n)
        .map(|d| (0..=d).map(|i| poly.coeff(i, d - i).norm()).sum::<f64>())
        .sum();
    Some((lower / m).max(1.0) * (1.0 + 1e-9))
}

/// Total charge of `pg` on a contour enclosing every zero.
pub fn total_charge(pg: &PolyGauss, contour: &Contour) -> Result<i32> {
    if let (Some(required), Contour::Circle { center, radius, .. }) = (zero_free_radius(pg), contour) {
        let reach = radius - center.x.hypot(center.y);
        if reach < required {
            return Err(Error::ContourTooSmall { required, actual: reach });
        }
    }
    winding_along(pg, contour)
}

/// Circle just outside [`zero_free_radius`]; `None` as there.
pub fn enclosing_contour(pg: &PolyGauss) -> Option<Contour> {
    zero_free_radius(pg).map(|r| Contour::circle(1.25 * r + 0.5))
}

/// Fractional offsets tried, in cells, when a lattice node or edge lands on
/// a zero.
const SHIFTS: [(f64, f64); 4] = [(0.0, 0.0), (0.381966, 0.236068), (0.145898, 0.618034), (0.472136, 0.090170)];

struct Scan {
    singularities: Vec<Singularity>,
    boundary_charge: i32,
}

/// `None` when a zero sits on (or within rounding of) a node or edge.
fn scan_lattice(pg: &PolyGauss, grid: GridSpec) -> Result<Option<Scan>> {
    let poly = pg.poly();
    let degenerate_node = |x: f64, y: f64| {
        let p = poly.eval(x, y);
        p.norm() <= 1e-9 * poly.abs_scale(x, y)
    };
    let nodes: Vec<(f64, bool)> = (0..grid.len())
        .into_par_iter()
        .map(|idx| {
            let (x, y) = (grid.x(idx % grid.nx), grid.y(idx / grid.nx));
            ((pg.prefactor * poly.eval(x, y)).arg(), degenerate_node(x, y))
        })
        .collect();
    if nodes.iter().any(|n| n.1) {
        return Ok(None);
    }
    let (nx, ny) = (grid.nx, grid.ny);
    let phase = |i: usize, j: usize| nodes[j * nx + i].0;
    let near_pi = |d: f64| d.abs() > PI - 1e-6;
    let cells: Vec<Option<(usize, usize, i32)>> = (0..(nx - 1) * (ny - 1))
        .into_par_iter()
        .map(|c| {
            let (i, j) = (c % (nx - 1), c / (nx - 1));
            let ring = [phase(i, j), phase(i + 1, j), phase(i + 1, j + 1), phase(i, j + 1)];
            let mut total = 0.0;
            for a in 0..4 {
                let d = wrap(ring[(a + 1) % 4] - ring[a]);
                if near_pi(d) {
                    return None;
                }
                total += d;
            }
            Some((i, j, (total / (2.0 * PI)).round() as i32))
        })
        .collect();
    if cells.iter().any(Option::is_none) {
        return Ok(None);
    }
    let singularities = cells
        .into_iter()
        .flatten()
        .filter(|&(_, _, w)| w != 0)
        .map(|(i, j, w)| Singularity {
            location: QuadraturePoint::new(
                0.5 * (grid.x(i) + grid.x(i + 1)),
                0.5 * (grid.y(j) + grid.y(j + 1)),
            ),
            charge: w,
        })
        .collect();
    let ring = LatticeLoop::boundary(&grid);
    let n = ring.nodes.len();
    let total: f64 = (0..n)
        .map(|a| {
            let (i0, j0) = ring.nodes[a];
            let (i1, j1) = ring.nodes[(a + 1) % n];
            wrap(phase(i1, j1) - phase(i0, j0))
        })
        .sum();
    Ok(Some(Scan { singularities, boundary_charge: integer_winding(total)? }))
}

fn scan_with_shifts(pg: &PolyGauss, grid: GridSpec) -> Result<(Scan, GridSpec)> {
    for (fx, fy) in SHIFTS {
        let g = grid.shifted(fx * grid.dx(), fy * grid.dy());
        if let Some(s) = scan_lattice(pg, g)? {
            return Ok((s, g));
        }
    }
    Err(Error::ZeroOnContour { x: grid.x_range.0, y: grid.y_range.0 })
}

fn same_set(a: &[Singularity], b: &[Singularity], tol: f64) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let mut used = vec![false; b.len()];
    a.iter().all(|s| {
        let hit = b.iter().enumerate().position(|(i, t)| {
            !used[i]
                && t.charge == s.charge
                && (t.location.x - s.location.x).abs() <= tol
                && (t.location.y - s.location.y).abs() <= tol
        });
        if let Some(i) = hit {
            used[i] = true;
        }
        hit.is_some()
    })
}

/// Plaquette-winding scan of `pg` over `grid`, doubling the resolution until
/// two successive lattices agree on the singularity set.
///
/// A lattice whose node or edge falls on a zero is translated by a fraction
/// of a cell before use, so the reported grid may differ from `grid` by
/// less than one spacing.
pub fn locate_singularities(pg: &PolyGauss, grid: GridSpec) -> Result<ChargeResult> {
    grid.validate()?;
    if pg.degree() > 0 && pg.eta().im.abs() < 1e-12 {
        return Ok(ChargeResult {
            singularities: Vec::new(),
            total_charge: 0,
            boundary_charge: 0,
            zero_manifold: true,
            grid,
        });
    }
    let (mut prev, mut prev_grid) = scan_with_shifts(pg, grid)?;
    let mut g = grid;
    for _ in 0..MAX_DOUBLINGS {
        g = g.refined();
        let (next, next_grid) = scan_with_shifts(pg, g)?;
        let tol = 1.5 * prev_grid.dx().max(prev_grid.dy());
        if same_set(&prev.singularities, &next.singularities, tol)
            && prev.boundary_charge == next.boundary_charge
        {
            let total_charge = prev.singularities.iter().map(|s| s.charge).sum();
            return Ok(ChargeResult {
                singularities: prev.singularities,
                total_charge,
                boundary_charge: prev.boundary_charge,
                zero_manifold: false,
                grid: prev_grid,
            });
        }
        prev = next;
        prev_grid = next_grid;
    }
    Err(Error::RefinementDiverged { doublings: MAX_DOUBLINGS })
}
