//! Minimal SVG emission for PV loops and time-series panels (cosmetic).

use crate::engine::SimulationTrace;
use crate::model::{Chamber, VarId, P_LA, P_LV, P_RA, P_RV, V_LA, V_LV, V_RA, V_RV};

const W: f64 = 360.0;
const H: f64 = 280.0;
const MARGIN: f64 = 42.0;

fn polyline(xs: &[f64], ys: &[f64]) -> String {
    let (x_lo, x_hi) = bounds(xs);
    let (y_lo, y_hi) = bounds(ys);
    let sx = |x: f64| MARGIN + (x - x_lo) / (x_hi - x_lo).max(1e-12) * (W - 2.0 * MARGIN);
    let sy = |y: f64| H - MARGIN - (y - y_lo) / (y_hi - y_lo).max(1e-12) * (H - 2.0 * MARGIN);
    let pts: Vec<String> =
        xs.iter().zip(ys).map(|(x, y)| format!("{:.2},{:.2}", sx(*x), sy(*y))).collect();
    format!(
        "<polyline fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"1.2\" points=\"{}\"/>",
        pts.join(" ")
    )
}

fn bounds(v: &[f64]) -> (f64, f64) {
    let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    (lo, hi)
}

fn panel(title: &str, x_label: &str, y_label: &str, body: &str) -> String {
    format!(
        concat!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">",
            "<rect width=\"{w}\" height=\"{h}\" fill=\"white\"/>",
            "<text x=\"{tx}\" y=\"16\" text-anchor=\"middle\" font-size=\"12\" font-family=\"sans-serif\">{title}</text>",
            "<text x=\"{tx}\" y=\"{bl}\" text-anchor=\"middle\" font-size=\"10\" font-family=\"sans-serif\">{xl}</text>",
            "<text x=\"12\" y=\"{ty}\" text-anchor=\"middle\" font-size=\"10\" font-family=\"sans-serif\" transform=\"rotate(-90 12 {ty})\">{yl}</text>",
            "<rect x=\"{m}\" y=\"{m}\" width=\"{iw}\" height=\"{ih}\" fill=\"none\" stroke=\"#999\"/>",
            "{body}</svg>"
        ),
        w = W,
        h = H,
        tx = W / 2.0,
        ty = H / 2.0,
        bl = H - 8.0,
        m = MARGIN,
        iw = W - 2.0 * MARGIN,
        ih = H - 2.0 * MARGIN,
        title = title,
        xl = x_label,
        yl = y_label,
        body = body
    )
}

/// PV loop of one chamber over the trace window.
pub fn pv_loop_svg(trace: &SimulationTrace, chamber: Chamber) -> String {
    let (v_idx, p_idx) = match chamber {
        Chamber::LeftAtrium => (V_LA, P_LA),
        Chamber::LeftVentricle => (V_LV, P_LV),
        Chamber::RightAtrium => (V_RA, P_RA),
        Chamber::RightVentricle => (V_RV, P_RV),
    };
    let v = trace.series(VarId::State(v_idx));
    let p = trace.series(VarId::Algebraic(p_idx));
    panel(
        &format!("{} PV loop", chamber.label()),
        "V [mL]",
        "p [mmHg]",
        &polyline(&v, &p),
    )
}

/// One variable against time.
pub fn series_svg(trace: &SimulationTrace, var: VarId) -> String {
    let y = trace.series(var);
    panel(var.name(), "t [s]", var.name(), &polyline(&trace.time, &y))
}
