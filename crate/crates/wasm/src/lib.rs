//! Browser bindings: every export takes plain numbers or JSON text and returns
//! JSON text, `{"error": ...}` on failure.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use nalgebra::{DMatrix, DVector};
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

use calmkit::io::PenaltyJson;
use calmkit::{pg_solve, ConeUnion2, Penalty, Piece, ProblemSpec, ScalarPenalty, SmoothLoss, SolverConfig};

type Out = Result<Value, String>;

fn render(r: Out) -> String {
    match r {
        Ok(v) => v.to_string(),
        Err(e) => json!({ "error": e }).to_string(),
    }
}

fn scalar_penalty(spec: &str) -> Result<ScalarPenalty, String> {
    let pj: PenaltyJson = serde_json::from_str(spec).map_err(|e| format!("penalty: {e}"))?;
    let pen = pj.build(1).map_err(|e| e.to_string())?;
    pen.scalar().copied().ok_or_else(|| "penalty must be separable".to_string())
}

/// Value curve, prox map and subdifferential graph of a scalar penalty.
#[wasm_bindgen]
pub fn penalty_curves(penalty: &str, gamma: f64, half_width: f64, samples: usize) -> String {
    render(curves(penalty, gamma, half_width, samples))
}

pub fn curves(penalty: &str, gamma: f64, half_width: f64, samples: usize) -> Out {
    let phi = scalar_penalty(penalty)?;
    if !(half_width > 0.0) || !(2..=20_000).contains(&samples) {
        return Err("need half_width > 0 and 2 <= samples <= 20000".into());
    }
    let xs: Vec<f64> = (0..samples).map(|i| -half_width + 2.0 * half_width * i as f64 / (samples - 1) as f64).collect();
    let value: Vec<[f64; 2]> = xs.iter().map(|&x| [x, phi.value(x)]).filter(|p| p[1].is_finite()).collect();
    let mut prox = Vec::new();
    for &u in &xs {
        let (set, _) = phi.prox(u, gamma).map_err(|e| e.to_string())?;
        prox.push(json!({ "u": u, "p": set }));
    }
    let graph = Penalty::separable(1, phi).graph().map_err(|e| e.to_string())?;
    Ok(json!({ "value": value, "prox": prox, "graph": graph.pieces() }))
}

/// Proximal gradient on `½(x−c)ᵀD(x−c) + Σφ(xᵢ)` in the plane, with the
/// objective sampled on a grid for contour drawing.
#[wasm_bindgen]
#[allow(clippy::too_many_arguments)]
pub fn pg_trajectory(penalty: &str, d1: f64, d2: f64, c1: f64, c2: f64, x1: f64, x2: f64, step_frac: f64, iters: usize) -> String {
    render(trajectory(penalty, [d1, d2], [c1, c2], [x1, x2], step_frac, iters))
}

pub fn trajectory(penalty: &str, d: [f64; 2], c: [f64; 2], x0: [f64; 2], step_frac: f64, iters: usize) -> Out {
    let phi = scalar_penalty(penalty)?;
    if !(d[0] > 0.0 && d[1] > 0.0) {
        return Err("curvatures must be positive".into());
    }
    if !(step_frac > 0.0 && step_frac < 1.0) {
        return Err("step fraction must lie in (0, 1) so that gamma < 1/L".into());
    }
    let q = DMatrix::from_diagonal(&DVector::from_row_slice(&d));
    let q_vec = -(&q * DVector::from_row_slice(&c));
    let prob = ProblemSpec::new(SmoothLoss::quadratic(q, q_vec), Penalty::separable(2, phi)).map_err(|e| e.to_string())?;
    let l = d[0].max(d[1]);
    let cfg = SolverConfig { gamma: step_frac / l, max_iter: iters.clamp(1, 5000), stop_tol: 1e-12, lipschitz: Some(l), theory_mode: true, ..Default::default() };
    let trace = pg_solve(&prob, &cfg, &DVector::from_row_slice(&x0)).map_err(|e| e.to_string())?;
    let points: Vec<[f64; 2]> = trace.points.iter().map(|x| [x[0], x[1]]).collect();
    let xs = points.iter().map(|p| p[0]).chain([c[0], -1.0, 1.0]);
    let ys = points.iter().map(|p| p[1]).chain([c[1], -1.0, 1.0]);
    let (lo_x, hi_x) = xs.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    let (lo_y, hi_y) = ys.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    let pad = 0.15 * (hi_x - lo_x).max(hi_y - lo_y);
    let (lo, hi) = ([lo_x - pad, lo_y - pad], [hi_x + pad, hi_y + pad]);
    const GRID: usize = 60;
    let mut grid = Vec::with_capacity(GRID * GRID);
    for j in 0..GRID {
        for i in 0..GRID {
            let x = DVector::from_row_slice(&[
                lo[0] + (hi[0] - lo[0]) * i as f64 / (GRID - 1) as f64,
                lo[1] + (hi[1] - lo[1]) * j as f64 / (GRID - 1) as f64,
            ]);
            grid.push(prob.objective(&x).unwrap_or(f64::INFINITY));
        }
    }
    let grid: Vec<Option<f64>> = grid.into_iter().map(|v| v.is_finite().then_some(v)).collect();
    Ok(json!({
        "gamma": cfg.gamma,
        "lipschitz": l,
        "points": points,
        "objective": trace.objectives,
        "residual": trace.residuals,
        "grid": { "lo": lo, "hi": hi, "size": GRID, "values": grid },
    }))
}

fn nearest(pieces: &[Piece], p: [f64; 2]) -> [f64; 2] {
    let mut best = (f64::INFINITY, p);
    for piece in pieces {
        let t = (p[0] - piece.start[0]) * piece.dir[0] + (p[1] - piece.start[1]) * piece.dir[1];
        let q = piece.at(t.clamp(0.0, piece.length.unwrap_or(f64::INFINITY)));
        let d = (q[0] - p[0]).hypot(q[1] - p[1]);
        if d < best.0 {
            best = (d, q);
        }
    }
    // land exactly on vertices so they classify as such
    let vertex = pieces.iter().flat_map(|pc| [Some(pc.start), pc.end()]).flatten().find(|v| (v[0] - best.1[0]).hypot(v[1] - best.1[1]) <= 1e-9);
    vertex.unwrap_or(best.1)
}

fn cone_json(c: &ConeUnion2) -> Value {
    json!({ "atoms": c.to_json(), "arcs": c.arcs() })
}

/// Tangent, regular, limiting and directional normal cones of `gph ∂φ` at
/// the graph point nearest to `(x, v)`.
#[wasm_bindgen]
pub fn explain_cones(penalty: &str, x: f64, v: f64, dx: f64, dy: f64) -> String {
    render(cones(penalty, [x, v], [dx, dy]))
}

pub fn cones(penalty: &str, p: [f64; 2], d: [f64; 2]) -> Out {
    let phi = scalar_penalty(penalty)?;
    let graph = Penalty::separable(1, phi).graph().map_err(|e| e.to_string())?;
    let p = nearest(graph.pieces(), p);
    let class = graph.classify_point(p).map_err(|e| e.to_string())?;
    let err = |e: calmkit::Error| e.to_string();
    Ok(json!({
        "point": class.point(),
        "class": class,
        "graph": graph.pieces(),
        "tangent": cone_json(&graph.tangent_cone(p).map_err(err)?),
        "regular": cone_json(&graph.regular_normal_cone(p).map_err(err)?),
        "limiting": cone_json(&graph.limiting_normal_cone(p).map_err(err)?),
        "direction": d,
        "directional": cone_json(&graph.directional_normal_cone(p, d).map_err(err)?),
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    const SCAD: &str = r#"{"family":"scad","lambda":1,"a":3}"#;

    #[test]
    fn curves_show_two_prox_points_for_negabs() {
        let v = curves(r#"{"family":"negabs","lambda":1}"#, 0.5, 2.0, 5).unwrap();
        let at_zero = &v["prox"][2];
        assert_eq!(at_zero["u"], json!(0.0));
        assert_eq!(at_zero["p"], json!([-0.5, 0.5]));
    }

    #[test]
    fn trajectory_descends() {
        let v = trajectory(SCAD, [1.0, 2.0], [2.0, -0.5], [-3.0, 3.0], 0.9, 200).unwrap();
        let f: Vec<f64> = serde_json::from_value(v["objective"].clone()).unwrap();
        assert!(f.windows(2).all(|w| w[1] <= w[0] + 1e-12));
        assert_eq!(v["grid"]["values"].as_array().unwrap().len(), 3600);
    }

    #[test]
    fn long_steps_are_refused() {
        assert!(trajectory(SCAD, [1.0, 1.0], [0.0, 0.0], [1.0, 1.0], 1.0, 10).is_err());
        let out = pg_trajectory(SCAD, 1.0, 1.0, 0.0, 0.0, 1.0, 1.0, 1.5, 10);
        assert!(out.contains("error"));
    }

    #[test]
    fn corner_cones() {
        let v = cones(r#"{"family":"l1","lambda":1}"#, [0.0, 1.0], [1.0, 0.0]).unwrap();
        assert_eq!(v["class"]["kind"], json!("vertex"));
        let atoms = v["directional"]["atoms"].as_array().unwrap();
        assert_eq!(atoms.len(), 1);
        assert_eq!(atoms[0]["kind"], json!("line"));
        assert!(atoms[0]["generator"][0].as_f64().unwrap().abs() < 1e-12);
        let snapped = cones(SCAD, [1.0, 1.4], [0.0, 0.0]).unwrap();
        assert_eq!(snapped["point"], json!([1.0, 1.0]));
        assert!(cones("{}", [0.0, 0.0], [0.0, 0.0]).is_err());
    }
}
