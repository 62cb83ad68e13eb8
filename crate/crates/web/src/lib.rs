//! WebAssembly bindings for the browser demo in `www/`.
//!
//! Circles cross the boundary as flat `[x0, y0, r0, x1, y1, r1, ...]` arrays
//! and results come back as JSON strings.

use serde_json::json;
use wasm_bindgen::prelude::*;

use cetsp::geometry::{alhazen_bisection, newton_refine};
use cetsp::io::{gen_random, gen_structured};
use cetsp::solver::{solve_with, SolveParams};
use cetsp::{Circle, Instance, Point2, Segment};

fn to_circles(flat: &[f64]) -> Result<Vec<Circle>, String> {
    if !flat.len().is_multiple_of(3) {
        return Err(format!("expected x, y, r triples, got {} numbers", flat.len()));
    }
    flat.chunks_exact(3)
        .map(|c| {
            if c.iter().all(|v| v.is_finite()) && c[2] >= 0.0 {
                Ok(Circle::new(Point2::new(c[0], c[1]), c[2]))
            } else {
                Err(format!("invalid circle {c:?}"))
            }
        })
        .collect()
}

fn flatten(circles: &[Circle]) -> Vec<f64> {
    circles.iter().flat_map(|c| [c.center.x, c.center.y, c.radius]).collect()
}

/// Random instances use centres in `[-limit, limit]²`; `structured` ignores `limit`.
pub fn generate_circles(kind: &str, n: usize, limit: f64, seed: u64) -> Result<Vec<f64>, String> {
    let instance = match kind {
        "random" => gen_random(n, limit, seed),
        "structured" => gen_structured(n, seed),
        other => return Err(format!("unknown instance kind `{other}`")),
    };
    Ok(flatten(&instance.circles))
}

pub fn solve_circles(flat: &[f64], seed: u64, k_cluster: usize, newton: bool) -> Result<String, String> {
    let instance = Instance::new("demo", to_circles(flat)?);
    let params = SolveParams { seed, k_cluster: k_cluster.max(1), newton, ..SolveParams::default() };
    let out = solve_with(&instance, &params, true, |_| {}).map_err(|e| e.to_string())?;
    let tour: Vec<[f64; 2]> = out.solution.tour.iter().map(|p| [p.x, p.y]).collect();
    Ok(json!({
        "length": out.solution.length,
        "tour": tour,
        "assignment": out.solution.assignment,
        "kept": out.kept,
        "stats": out.stats,
        "trace": out.trace,
    })
    .to_string())
}

/// Bisection placement of one circle on the segment `a b`, with and without
/// a Newton refinement.
pub fn place_on_segment(a: Point2, b: Point2, circle: Circle) -> [f64; 5] {
    let seg = Segment::new(a, b);
    let (p, delta) = alhazen_bisection(&seg, &circle);
    let q = newton_refine(&seg, &circle, p);
    [p.x, p.y, delta, q.x, q.y]
}

#[wasm_bindgen]
pub fn generate(kind: &str, n: u32, limit: f64, seed: u32) -> Result<Vec<f64>, JsValue> {
    generate_circles(kind, n as usize, limit, u64::from(seed)).map_err(|e| JsValue::from_str(&e))
}

/// Returns a JSON object with `length`, `tour`, `assignment`, `stats` and
/// the clustering and construction `trace`.
#[wasm_bindgen]
pub fn solve(circles: &[f64], seed: u32, k_cluster: u32, newton: bool) -> Result<String, JsValue> {
    solve_circles(circles, u64::from(seed), k_cluster as usize, newton).map_err(|e| JsValue::from_str(&e))
}

/// `[px, py, added_length, newton_x, newton_y]`.
#[wasm_bindgen]
pub fn place(ax: f64, ay: f64, bx: f64, by: f64, cx: f64, cy: f64, r: f64) -> Vec<f64> {
    place_on_segment(Point2::new(ax, ay), Point2::new(bx, by), Circle::new(Point2::new(cx, cy), r)).to_vec()
}
