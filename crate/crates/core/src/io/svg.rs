use std::fmt::Write as _;

use super::{Instance, Solution};

/// Renders disks and the closed tour as an SVG 1.1 document. The view box is
/// the instance bounding box padded by 5% on every side, with y pointing up.
pub fn emit_svg(instance: &Instance, solution: &Solution) -> String {
    let (min, max) = match instance.bounding_box() {
        Some(b) => (b.min, b.max),
        None => Default::default(),
    };
    let (w, h) = (max.x - min.x, max.y - min.y);
    let size = w.max(h);
    let size = if size > 0.0 { size } else { 1.0 };
    let (pad_x, pad_y) = (0.05 * w.max(size * 1e-3), 0.05 * h.max(size * 1e-3));
    let (vx, vy) = (min.x - pad_x, -(max.y + pad_y));
    let (vw, vh) = (w + 2.0 * pad_x, h + 2.0 * pad_y);
    let stroke = size * 2e-3;

    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" viewBox=\"{vx} {vy} {vw} {vh}\">"
    )
    .unwrap();
    writeln!(out, "<title>{}</title>", escape(&instance.name)).unwrap();
    writeln!(
        out,
        "<g fill=\"#4a90d9\" fill-opacity=\"0.25\" stroke=\"#2a5d8f\" stroke-width=\"{stroke}\">"
    )
    .unwrap();
    for c in &instance.circles {
        writeln!(out, "<circle cx=\"{}\" cy=\"{}\" r=\"{}\"/>", c.center.x, -c.center.y, c.radius)
            .unwrap();
    }
    out.push_str("</g>\n");

    let mut points: Vec<String> =
        solution.tour.iter().map(|p| format!("{},{}", p.x, -p.y)).collect();
    if let Some(first) = points.first().cloned() {
        points.push(first);
    }
    writeln!(
        out,
        "<polyline fill=\"none\" stroke=\"#c0392b\" stroke-width=\"{}\" points=\"{}\"/>",
        2.0 * stroke,
        points.join(" ")
    )
    .unwrap();
    out.push_str("</svg>\n");
    out
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
