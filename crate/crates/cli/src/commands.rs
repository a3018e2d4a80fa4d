//! One function per command and per figure.
//!
//! Figure settings that the paper leaves open (axis ranges, r grids) are
//! fixed here and written to the manifest.

use std::path::PathBuf;

use serde_json::{json, Map, Value};
use tmsv_core::entanglement::{
    self, coefficients_auto, log_negativity, negativity_ratio, refined_argmax, CoefficientSource, MeasureKind,
    NegativityFormula,
};
use tmsv_core::fock::{self, apply_ladder, fidelity, herald_subtract, suggest_cutoff, HeraldConfig, Ladder, Mode};
use tmsv_core::vortexmap::{enclosing_contour, locate_singularities, total_charge};
use tmsv_core::wigner::{
    self, fringe_count, negativity_volume, slice_field, NegativityDomain, PhaseSpacePoint4, SlicePlane,
    WignerSliceSpec, FRINGE_THRESHOLD,
};
use tmsv_core::{intensity_phase_grid, subtracted_wavefunction, GridSpec, SqueezeParams};

use crate::config::{Command, FigureId, RunConfig};
use crate::output::{field_table, Cell, NegativePolicy, Table, Writer};
use crate::CliError;

/// Fig. 5 squeezing grid; its first point stands in for the r → 0⁺ limit.
pub const FIG5_R_GRID: (f64, f64, f64) = (0.05, 2.5, 0.05);
/// Fig. 6 squeezing grid; the argmax is refined 10× around the coarse peak.
pub const FIG6_R_GRID: (f64, f64, f64) = (0.5, 4.0, 0.01);
/// Far-tail point reported next to the Fig. 6 maximum.
pub const FIG6_TAIL_R: f64 = 6.0;
pub const FIG7_R: [f64; 4] = [1.5, 2.1, 2.5, 3.5];
pub const FIG7_HALF_WIDTH: f64 = 4.0;
pub const FIG_ORDERS: [usize; 4] = [1, 2, 3, 4];

/// Parameters that identify the data; the output directory is left out so
/// that reruns into another directory give identical files.
pub fn manifest(cfg: &RunConfig) -> Value {
    let mut config = Map::new();
    for (k, v) in cfg.entries() {
        if k != "out" {
            config.insert(k.to_string(), Value::String(v));
        }
    }
    json!({
        "tool": "tmsv",
        "version": env!("CARGO_PKG_VERSION"),
        "config": config,
        "constants": {
            "coefficient_tail_tol": entanglement::COEFFICIENT_TAIL_TOL,
            "fringe_threshold": FRINGE_THRESHOLD,
            "max_fringe_doublings": wigner::MAX_FRINGE_DOUBLINGS,
            "negativity_tol": wigner::NEGATIVITY_TOL,
            "vortex_max_doublings": tmsv_core::vortexmap::MAX_DOUBLINGS,
            "contour_zero_tol": tmsv_core::vortexmap::CONTOUR_ZERO_TOL,
            "tmsv_tail_limit": fock::TMSV_TAIL_LIMIT,
        },
    })
}

fn grid_json(g: &GridSpec) -> Value {
    json!({ "x": [g.x_range.0, g.x_range.1, g.nx], "y": [g.y_range.0, g.y_range.1, g.ny] })
}

fn params(cfg: &RunConfig, r: f64) -> Result<SqueezeParams, CliError> {
    SqueezeParams::new(r, cfg.theta).map_err(|e| CliError::core("parameters", e))
}

fn r_values(stage: &str, (start, stop, step): (f64, f64, f64)) -> Result<Vec<f64>, CliError> {
    entanglement::r_range(start, stop, step).map_err(|e| CliError::core(stage, e))
}

/// Runs the configured command and returns every file written.
pub fn run(cfg: &RunConfig) -> Result<Vec<PathBuf>, CliError> {
    let mut w = Writer::new(&cfg.out, &cfg.formats, manifest(cfg))?;
    match cfg.command.ok_or_else(|| CliError::usage("command", "missing"))? {
        Command::Reproduce => {
            let sel = cfg.figure.ok_or_else(|| CliError::usage("figure", "missing"))?;
            for fig in sel.figures() {
                reproduce(fig, cfg, &mut w)?;
            }
        }
        Command::Wavefield => wavefield(cfg, &mut w, "wavefield", cfg.k, cfg.r)?,
        Command::Vortex => vortex(cfg, &mut w, "vortex", cfg.k, cfg.r)?,
        Command::Wigner => wigner_cmd(cfg, &mut w)?,
        Command::Scan => scan_cmd(cfg, &mut w)?,
        Command::Herald => herald_cmd(cfg, &mut w)?,
    }
    w.finish(&cfg.to_conf())
}

pub fn reproduce(fig: FigureId, cfg: &RunConfig, w: &mut Writer) -> Result<(), CliError> {
    match fig {
        FigureId::Fig2 => {
            wavefield(cfg, w, "fig2", 3, cfg.r)?;
            vortex(cfg, w, "fig2", 3, cfg.r)
        }
        FigureId::Fig3 => {
            wavefield(cfg, w, "fig3", 4, cfg.r)?;
            vortex(cfg, w, "fig3", 4, cfg.r)
        }
        FigureId::Fig4 => fig4(cfg, w),
        FigureId::Fig5 => fig5(cfg, w),
        FigureId::Fig6 => fig6(cfg, w),
        FigureId::Fig7 => fig7(cfg, w),
    }
}

fn wavefield(cfg: &RunConfig, w: &mut Writer, stem: &str, k: usize, r: f64) -> Result<(), CliError> {
    let pg = subtracted_wavefunction(params(cfg, r)?, k);
    let (intensity, phase) = intensity_phase_grid(&pg, cfg.grid).map_err(|e| CliError::core("wavefield", e))?;
    let mut t = Table::new(&["x", "y", "intensity", "phase"]);
    for ((_, _, x, y, i), (_, _, _, _, p)) in intensity.iter().zip(phase.iter()) {
        t.push(vec![x.into(), y.into(), i.into(), p.into()]);
    }
    w.setting(format!("{stem}.wavefield"), json!({ "k": k, "r": r, "grid": grid_json(&cfg.grid) }));
    w.table(&format!("{stem}_wavefield"), &t)?;
    w.heatmap(&format!("{stem}_intensity"), &intensity, NegativePolicy::Linear)?;
    w.heatmap(&format!("{stem}_phase"), &phase, NegativePolicy::Linear)
}

fn vortex(cfg: &RunConfig, w: &mut Writer, stem: &str, k: usize, r: f64) -> Result<(), CliError> {
    let pg = subtracted_wavefunction(params(cfg, r)?, k);
    let found = locate_singularities(&pg, cfg.grid).map_err(|e| CliError::core("vortex location", e))?;
    let contour_charge = match enclosing_contour(&pg) {
        Some(c) if !found.zero_manifold => {
            Some(total_charge(&pg, &c).map_err(|e| CliError::core("vortex contour charge", e))?)
        }
        _ => None,
    };
    let mut t = Table::new(&["x", "y", "charge"]);
    for s in &found.singularities {
        t.push(vec![s.location.x.into(), s.location.y.into(), s.charge.into()]);
    }
    w.table(&format!("{stem}_singularities"), &t)?;
    let mut summary =
        Table::new(&["k", "r", "count", "total_charge", "boundary_charge", "contour_charge", "zero_manifold"]);
    summary.push(vec![
        k.into(),
        r.into(),
        found.singularities.len().into(),
        found.total_charge.into(),
        found.boundary_charge.into(),
        contour_charge.map_or(Cell::S("none".into()), Cell::from),
        found.zero_manifold.into(),
    ]);
    w.table(&format!("{stem}_summary"), &summary)?;
    w.setting(
        format!("{stem}.vortex"),
        json!({ "k": k, "r": r, "requested_grid": grid_json(&cfg.grid), "lattice_used": grid_json(&found.grid) }),
    );
    Ok(())
}

fn slice_spec(plane: SlicePlane, fixed: [f64; 2], grid: GridSpec) -> WignerSliceSpec {
    let mut spec = WignerSliceSpec::new(plane, grid);
    spec.fixed = fixed;
    spec
}

fn slice_names(plane: SlicePlane) -> [&'static str; 3] {
    let (u, v) = plane.axes();
    [u.name(), v.name(), "W"]
}

fn wigner_cmd(cfg: &RunConfig, w: &mut Writer) -> Result<(), CliError> {
    let p = params(cfg, cfg.r)?;
    let spec = slice_spec(cfg.slice, cfg.fixed_values()?, cfg.grid);
    let field = slice_field(p, cfg.k, &spec).map_err(|e| CliError::core("wigner slice", e))?;
    let stem = format!("wigner_{}", cfg.slice.name());
    w.table(&stem, &field_table(&field, slice_names(cfg.slice)))?;
    w.heatmap(&stem, &field, NegativePolicy::Linear)?;
    let rep = negativity_volume(p, cfg.k, NegativityDomain::Slice(spec))
        .map_err(|e| CliError::core("slice negativity", e))?;
    let mut t = Table::new(&["negative_volume", "total_abs_volume", "fringe_count", "min", "max", "error_estimate"]);
    t.push(vec![
        rep.negative_volume.into(),
        rep.total_abs_volume.into(),
        rep.fringe_count.into(),
        rep.min_value.into(),
        rep.max_value.into(),
        rep.error_estimate.into(),
    ]);
    w.table(&format!("{stem}_summary"), &t)?;
    w.setting("wigner", json!({ "grid": grid_json(&cfg.grid), "fixed": spec.fixed }));
    Ok(())
}

fn scan_cmd(cfg: &RunConfig, w: &mut Writer) -> Result<(), CliError> {
    let rs = cfg.r_grid.values()?;
    let source = cfg.coefficient_source();
    let template = params(cfg, rs[0])?;
    let main = entanglement::scan(cfg.measure, template, cfg.k, &rs, source)
        .map_err(|e| CliError::core(cfg.measure.name(), e))?;
    let mut columns = vec!["r", cfg.measure.name()];
    let extra: Option<Vec<f64>> = match cfg.measure {
        MeasureKind::LogNegativity => {
            columns.push("log_negativity_paper_literal");
            let c = entanglement::scan(MeasureKind::LogNegativityPaperLiteral, template, cfg.k, &rs, source)
                .map_err(|e| CliError::core("log_negativity_paper_literal", e))?;
            Some(c.values)
        }
        MeasureKind::NegativityRatio => {
            columns.push("paper_closed_form");
            let v = rs
                .iter()
                .map(|&r| negativity_ratio(params(cfg, r)?, cfg.k, source).map(|x| x.paper_closed_form).map_err(|e| CliError::core("paper_closed_form", e)))
                .collect::<Result<Vec<_>, _>>()?;
            Some(v)
        }
        _ => None,
    };
    let mut t = Table::new(&columns);
    for (i, (&r, &v)) in main.r_values.iter().zip(&main.values).enumerate() {
        let mut row = vec![Cell::F(r), Cell::F(v)];
        if let Some(e) = &extra {
            row.push(Cell::F(e[i]));
        }
        t.push(row);
    }
    w.table(&format!("scan_{}_k{}", cfg.measure.name(), cfg.k), &t)?;
    let argmax = main.argmax().map(|(_, r, v)| json!([r, v]));
    w.setting("scan", json!({ "points": rs.len(), "argmax": argmax }));
    Ok(())
}

fn herald_cmd(cfg: &RunConfig, w: &mut Writer) -> Result<(), CliError> {
    if cfg.k == 0 {
        return Err(CliError::usage("k", "heralding needs k ≥ 1"));
    }
    let p = params(cfg, cfg.r)?;
    let n = cfg.cutoff.unwrap_or_else(|| suggest_cutoff(cfg.r, cfg.k, cfg.tol));
    let stage = |s: &'static str| move |e| CliError::core(s, e);
    let xi = fock::tmsv(p, n).map_err(stage("two-mode squeezed vacuum"))?;
    let hc = HeraldConfig::new(cfg.transmittance, cfg.k, n).map_err(stage("herald config"))?;
    let out = herald_subtract(&xi, &hc).map_err(stage("heralding"))?;
    let ideal = apply_ladder(&xi, Mode::A, Ladder::Annihilate, cfg.k)
        .and_then(|s| s.normalize())
        .map_err(stage("ideal subtraction"))?;
    let f = if out.heralded { fidelity(&out.state, &ideal).map_err(stage("fidelity"))? } else { 0.0 };
    let padded = xi.padded(n + cfg.k).map_err(stage("padding"))?;
    let sub_b = apply_ladder(&padded, Mode::B, Ladder::Annihilate, cfg.k).and_then(|s| s.normalize());
    let add_a = apply_ladder(&padded, Mode::A, Ladder::Create, cfg.k).and_then(|s| s.normalize());
    let f_dual = fidelity(&sub_b.map_err(stage("b subtraction"))?, &add_a.map_err(stage("a addition"))?)
        .map_err(stage("fidelity"))?;
    let mut t = Table::new(&[
        "k",
        "r",
        "transmittance",
        "cutoff",
        "tail_bound",
        "success_probability",
        "fidelity",
        "fidelity_b_sub_vs_a_add",
    ]);
    t.push(vec![
        cfg.k.into(),
        cfg.r.into(),
        cfg.transmittance.into(),
        n.into(),
        xi.tail_bound().into(),
        out.success_probability.into(),
        f.into(),
        f_dual.into(),
    ]);
    w.table("herald", &t)?;
    w.setting("herald", json!({ "cutoff": n, "tail_bound": xi.tail_bound(), "tol": cfg.tol }));
    Ok(())
}

fn fig4(cfg: &RunConfig, w: &mut Writer) -> Result<(), CliError> {
    let k = 4;
    let p = params(cfg, cfg.r)?;
    let center = wigner::wigner_tmsv(p, k, &PhaseSpacePoint4::origin());
    let mut summary = Table::new(&["plane", "center_value", "min", "max", "fringe_count"]);
    for plane in SlicePlane::ALL {
        let spec = slice_spec(plane, [0.0, 0.0], cfg.grid);
        let field = slice_field(p, k, &spec).map_err(|e| CliError::core("fig4 slice", e))?;
        let stem = format!("fig4_{}", plane.name());
        w.table(&stem, &field_table(&field, slice_names(plane)))?;
        w.heatmap(&stem, &field, NegativePolicy::Linear)?;
        summary.push(vec![
            plane.name().into(),
            center.into(),
            field.min().into(),
            field.max().into(),
            fringe_count(&field, FRINGE_THRESHOLD).into(),
        ]);
    }
    w.table("fig4_summary", &summary)?;
    w.setting("fig4", json!({ "k": k, "r": cfg.r, "grid": grid_json(&cfg.grid), "fixed": [0.0, 0.0] }));
    Ok(())
}

fn fig5(cfg: &RunConfig, w: &mut Writer) -> Result<(), CliError> {
    let rs = r_values("fig5", FIG5_R_GRID)?;
    let source = cfg.coefficient_source();
    let mut t = Table::new(&[
        "k",
        "r",
        "ratio",
        "paper_closed_form",
        "log_negativity",
        "log_negativity_paper_literal",
    ]);
    for k in FIG_ORDERS {
        for &r in &rs {
            let p = params(cfg, r)?;
            let stage = |e| CliError::core("fig5", tmsv_core::Error::ScanPoint { r, source: Box::new(e) });
            let rep = negativity_ratio(p, k, source).map_err(stage)?;
            let normalized = CoefficientSource { normalize: true, ..source };
            let summed = coefficients_auto(p, k, normalized)
                .and_then(|s| log_negativity(&s, NegativityFormula::SummedAmplitude))
                .map_err(stage)?;
            let literal = coefficients_auto(p, k, source)
                .and_then(|s| log_negativity(&s, NegativityFormula::PaperLiteral))
                .map_err(stage)?;
            t.push(vec![k.into(), r.into(), rep.ratio.into(), rep.paper_closed_form.into(), summed.into(), literal.into()]);
        }
    }
    w.table("fig5", &t)?;
    w.setting(
        "fig5",
        json!({ "r_grid": [FIG5_R_GRID.0, FIG5_R_GRID.1, FIG5_R_GRID.2], "orders": FIG_ORDERS, "cutoff": "auto" }),
    );
    Ok(())
}

fn fig6(cfg: &RunConfig, w: &mut Writer) -> Result<(), CliError> {
    let rs = r_values("fig6", FIG6_R_GRID)?;
    let source = cfg.coefficient_source();
    let template = params(cfg, rs[0])?;
    let mut curve = Table::new(&["k", "r", "ef_paper"]);
    let mut peaks = Table::new(&[
        "k",
        "argmax_r",
        "max_value",
        "refined_argmax_r",
        "refined_max_value",
        "value_at_tail_r",
        "tail_fraction",
    ]);
    for k in FIG_ORDERS {
        let c = entanglement::scan(MeasureKind::EfPaper, template, k, &rs, source)
            .map_err(|e| CliError::core("fig6 ef_paper", e))?;
        for (&r, &v) in c.r_values.iter().zip(&c.values) {
            curve.push(vec![k.into(), r.into(), v.into()]);
        }
        let ((r0, v0), (r1, v1)) = refined_argmax(MeasureKind::EfPaper, template, k, &rs, source)
            .map_err(|e| CliError::core("fig6 argmax", e))?;
        let tail = entanglement::ef_paper(params(cfg, FIG6_TAIL_R)?, k, cfg.cutoff)
            .map_err(|e| CliError::core("fig6 tail", e))?;
        peaks.push(vec![k.into(), r0.into(), v0.into(), r1.into(), v1.into(), tail.into(), (tail / v1).into()]);
    }
    w.table("fig6", &curve)?;
    w.table("fig6_argmax", &peaks)?;
    w.setting(
        "fig6",
        json!({
            "r_grid": [FIG6_R_GRID.0, FIG6_R_GRID.1, FIG6_R_GRID.2],
            "refinement": 10,
            "tail_r": FIG6_TAIL_R,
            "orders": FIG_ORDERS,
            "cutoff": cfg.cutoff.map_or(json!("auto"), |c| json!(c)),
        }),
    );
    Ok(())
}

fn fig7(cfg: &RunConfig, w: &mut Writer) -> Result<(), CliError> {
    let k = 4;
    let grid = GridSpec::square(FIG7_HALF_WIDTH, 201).map_err(|e| CliError::core("fig7", e))?;
    let mut summary =
        Table::new(&["r", "negative_volume", "total_abs_volume", "fringe_count", "min", "max", "error_estimate"]);
    for r in FIG7_R {
        let p = params(cfg, r)?;
        let spec = slice_spec(SlicePlane::XPy, [0.0, 0.0], grid);
        let field = slice_field(p, k, &spec).map_err(|e| CliError::core("fig7 slice", e))?;
        let stem = format!("fig7_r{r}");
        w.table(&stem, &field_table(&field, slice_names(SlicePlane::XPy)))?;
        w.heatmap(&stem, &field, NegativePolicy::Linear)?;
        let rep = negativity_volume(p, k, NegativityDomain::Slice(spec))
            .map_err(|e| CliError::core("fig7 slice negativity", e))?;
        summary.push(vec![
            r.into(),
            rep.negative_volume.into(),
            rep.total_abs_volume.into(),
            rep.fringe_count.into(),
            rep.min_value.into(),
            rep.max_value.into(),
            rep.error_estimate.into(),
        ]);
    }
    w.table("fig7_summary", &summary)?;
    w.setting("fig7", json!({ "k": k, "r": FIG7_R, "plane": "xpy", "grid": grid_json(&grid), "fixed": [0.0, 0.0] }));
    Ok(())
}
