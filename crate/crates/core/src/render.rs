//! SVG unit-circle diagrams of critical portraits.
//!
//! Output is a pure function of the portrait, so repeated renders are
//! byte-identical.

use std::f64::consts::TAU;
use std::fmt::Write as _;
use std::io;
use std::path::Path;

use num_traits::ToPrimitive;

use crate::circle::{Angle, AngleSet};
use crate::portrait::{unlinked_classes, CriticalPortrait};

const SIZE: f64 = 480.0;
const CENTER: f64 = SIZE / 2.0;
const RADIUS: f64 = 180.0;
const PALETTE: [&str; 8] = [
    "#4e79a7", "#f28e2b", "#59a14f", "#e15759", "#76b7b2", "#edc948", "#b07aa1", "#9c755f",
];

fn point(a: Angle, r: f64) -> (f64, f64) {
    let t = a.to_f64() * TAU;
    (CENTER + r * t.cos(), CENTER - r * t.sin())
}

fn block_path(block: &AngleSet) -> String {
    let mut d = String::new();
    for (i, a) in block.iter().enumerate() {
        let (x, y) = point(*a, RADIUS);
        let _ = write!(d, "{}{x:.3},{y:.3} ", if i == 0 { "M" } else { "L" });
    }
    if block.len() > 2 {
        d.push('Z');
    }
    d.trim_end().to_string()
}

pub fn render_portrait(portrait: &CriticalPortrait) -> String {
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);

    let _ = writeln!(svg, r#"<g id="classes" fill="none" stroke-width="10" stroke-opacity="0.45">"#);
    for (k, class) in unlinked_classes(portrait).iter().enumerate() {
        let colour = PALETTE[k % PALETTE.len()];
        for arc in &class.arcs {
            let (x0, y0) = point(arc.start, RADIUS);
            let (x1, y1) = point(arc.end, RADIUS);
            let large = u8::from(arc.length().to_f64().unwrap_or(0.0) > 0.5);
            let _ = writeln!(
                svg,
                r##"<path class="class-{k}" stroke="{colour}" d="M{x0:.3},{y0:.3} A{RADIUS},{RADIUS} 0 {large} 0 {x1:.3},{y1:.3}"/>"##
            );
        }
    }
    let _ = writeln!(svg, "</g>");

    let _ = writeln!(
        svg,
        r#"<circle cx="{CENTER}" cy="{CENTER}" r="{RADIUS}" fill="none" stroke="black" stroke-width="1.5"/>"#
    );

    let _ = writeln!(svg, r##"<g id="blocks" stroke="black" stroke-width="2" fill="#cccccc" fill-opacity="0.5">"##);
    for (i, block) in portrait.blocks().iter().enumerate() {
        let tag = if block.len() == 2 { "chord" } else { "hull" };
        let _ = writeln!(svg, r#"<path class="{tag}" data-block="{i}" d="{}"/>"#, block_path(block));
    }
    let _ = writeln!(svg, "</g>");

    let angles: AngleSet = portrait.blocks().iter().flat_map(|b| b.iter().copied()).collect();
    let _ = writeln!(
        svg,
        r#"<g id="ticks" stroke="black" font-family="sans-serif" font-size="12" text-anchor="middle" dominant-baseline="middle">"#
    );
    for a in &angles {
        let (x0, y0) = point(*a, RADIUS - 6.0);
        let (x1, y1) = point(*a, RADIUS + 6.0);
        let (lx, ly) = point(*a, RADIUS + 22.0);
        let _ = writeln!(svg, r#"<line x1="{x0:.3}" y1="{y0:.3}" x2="{x1:.3}" y2="{y1:.3}"/>"#);
        let _ = writeln!(svg, r#"<text x="{lx:.3}" y="{ly:.3}" stroke="none">{a}</text>"#);
    }
    let _ = writeln!(svg, "</g>");
    svg.push_str("</svg>\n");
    svg
}

pub fn write_portrait_svg(portrait: &CriticalPortrait, path: &Path) -> io::Result<()> {
    std::fs::write(path, render_portrait(portrait))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::portrait::validate_portrait;

    fn portrait(d: u64, blocks: &[&[&str]]) -> CriticalPortrait {
        validate_portrait(d, blocks.iter().map(|b| b.iter().map(|s| s.parse().unwrap()).collect()).collect()).unwrap()
    }

    #[test]
    fn chebyshev_is_one_diameter() {
        let svg = render_portrait(&portrait(2, &[&["1/4", "3/4"]]));
        assert_eq!(svg.matches(r#"class="chord""#).count(), 1);
        assert!(svg.contains(">1/4</text>") && svg.contains(">3/4</text>"));
        assert_eq!(svg.matches("class=\"class-").count(), 2);
    }

    #[test]
    fn cubic_chords_share_a_point() {
        let svg = render_portrait(&portrait(3, &[&["0", "1/3"], &["1/3", "2/3"]]));
        assert_eq!(svg.matches(r#"class="chord""#).count(), 2);
        assert_eq!(svg.matches(">1/3</text>").count(), 1);
        let (x, y) = point("1/3".parse().unwrap(), RADIUS);
        let shared = format!("{x:.3},{y:.3}");
        let chords = svg.lines().filter(|l| l.contains(r#"class="chord""#) && l.contains(&shared)).count();
        assert_eq!(chords, 2);
    }

    #[test]
    fn quintic_two_hulls() {
        let p = portrait(5, &[&["0", "1/5", "2/5"], &["1/2", "7/10", "9/10"]]);
        let svg = render_portrait(&p);
        assert_eq!(svg.matches(r#"class="hull""#).count(), 2);
        assert_eq!(svg, render_portrait(&p));
    }
}
