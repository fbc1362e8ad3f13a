//! SVG energy-level diagram: four levels placed by energy, the four allowed
//! lines drawn as arrows from the lower to the upper level.

use std::fmt::Write;

use crate::numfmt::fmt_sig17;
use crate::spectrum::{LineList, TransitionId};
use crate::spin_system::EigenSystem;
use crate::virtual_basis::QubitLabel;

const WIDTH: f64 = 760.0;
const HEIGHT: f64 = 520.0;
const TOP: f64 = 50.0;
const BOTTOM: f64 = 470.0;
const LEVEL_X0: f64 = 80.0;
const LEVEL_X1: f64 = 460.0;

/// Vertical position of each level (index 0 is ψ₁); higher energy is
/// drawn higher, i.e. at smaller y.
pub fn level_heights(eig: &EigenSystem) -> [f64; 4] {
    let hi = eig.energies.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lo = eig.energies.iter().copied().fold(f64::INFINITY, f64::min);
    let span = hi - lo;
    eig.energies.map(|e| {
        if span > 0.0 {
            TOP + (hi - e) / span * (BOTTOM - TOP)
        } else {
            0.5 * (TOP + BOTTOM)
        }
    })
}

pub fn render_level_diagram(eig: &EigenSystem, lines: &LineList) -> String {
    let ys = level_heights(eig);
    let mut svg = String::new();
    let _ = writeln!(svg, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(svg, "<!-- virtual-spin {} -->", env!("CARGO_PKG_VERSION"));
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(
        svg,
        r#"<defs><marker id="head" markerWidth="8" markerHeight="8" refX="8" refY="4" orient="auto"><path d="M0,0 L8,4 L0,8 z" fill="black"/></marker></defs>"#
    );

    let _ = writeln!(svg, r#"<g id="levels">"#);
    for (k, &y) in ys.iter().enumerate() {
        let index = k + 1;
        let label = QubitLabel::from_eigenindex(index).expect("four labels");
        let _ = writeln!(
            svg,
            r#"<line class="level" data-index="{index}" data-label="{label}" data-energy="{}" x1="{LEVEL_X0:.3}" y1="{y:.3}" x2="{LEVEL_X1:.3}" y2="{y:.3}" stroke="black" stroke-width="2"/>"#,
            fmt_sig17(eig.energy(index))
        );
        let _ = writeln!(
            svg,
            r#"<text x="{:.3}" y="{:.3}">ψ{index} = |{label}⟩, ε = {:.6} rad/s</text>"#,
            LEVEL_X1 + 10.0,
            y + 4.0,
            eig.energy(index)
        );
    }
    let _ = writeln!(svg, "</g>");

    let _ = writeln!(svg, r#"<g id="transitions">"#);
    for (slot, id) in TransitionId::ALL.iter().enumerate() {
        let t = lines.get(*id);
        let x = LEVEL_X0 + 60.0 + 80.0 * slot as f64;
        let (y_upper, y_lower) = (ys[t.upper() - 1], ys[t.lower() - 1]);
        let _ = writeln!(
            svg,
            r#"<line class="transition" data-upper="{}" data-lower="{}" data-frequency="{}" data-intensity="{}" x1="{x:.3}" y1="{y_lower:.3}" x2="{x:.3}" y2="{y_upper:.3}" stroke="steelblue" stroke-width="1.5" marker-end="url(#head)"/>"#,
            t.upper(),
            t.lower(),
            fmt_sig17(t.frequency),
            fmt_sig17(t.intensity)
        );
        let _ = writeln!(
            svg,
            r#"<text x="{:.3}" y="{:.3}" font-size="10" transform="rotate(-90 {:.3} {:.3})">ε{}{} = {:.4}, I = {:.4}</text>"#,
            x - 4.0,
            0.5 * (y_upper + y_lower),
            x - 4.0,
            0.5 * (y_upper + y_lower),
            t.upper(),
            t.lower(),
            t.frequency,
            t.intensity
        );
    }
    let _ = writeln!(svg, "</g>");
    let _ = writeln!(svg, "</svg>");
    svg
}
