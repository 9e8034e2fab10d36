#![allow(dead_code)]

use gsx::graph::{FramedGraph, Graph, GraphStep, Outcome};
use gsx::lattice::{manhattan, Coord, GridSpec};
use gsx::oracle::{equal_up_to_global_phase, StateVector, DEFAULT_CAP};
use gsx::planners::{ExtractionRequest, Strategy};
use gsx::primitives::{Canvas, CostReport, Plan, PlanTarget};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_graph(rng: &mut impl Rng, n: u32, p: f64) -> Graph {
    let mut g = Graph::from_edges(0..n, []).unwrap();
    for a in 0..n {
        for b in a + 1..n {
            if rng.gen_bool(p) {
                g.add_edge(a, b).unwrap();
            }
        }
    }
    g
}

pub fn framed_state(fg: &FramedGraph) -> StateVector {
    let mut sv = StateVector::of_graph(&fg.graph, DEFAULT_CAP).unwrap();
    sv.apply_frame(&fg.frame).unwrap();
    sv
}

/// Applies `steps` in the graph frame with random outcomes and measures the
/// recorded observables on the dense state alongside. Outcomes the physical
/// state forbids are flipped. True if the two end states agree.
pub fn steps_match_oracle(g: &Graph, steps: &[GraphStep], rng: &mut impl Rng) -> bool {
    let mut fg = FramedGraph::new(g.clone());
    let mut physical = StateVector::of_graph(g, DEFAULT_CAP).unwrap();
    for &step in steps {
        let drawn = if rng.gen_bool(0.5) { Outcome::Minus } else { Outcome::Plus };
        let mut trial = fg.clone();
        let Some(m) = trial.apply(step, drawn).unwrap() else {
            fg = trial;
            continue;
        };
        match physical.measure_out(m.record.vertex, m.observable, drawn) {
            Ok((next, _)) => {
                physical = next;
                fg = trial;
            }
            Err(_) => {
                let flipped = if drawn.is_minus() { Outcome::Plus } else { Outcome::Minus };
                let m = fg.apply(step, flipped).unwrap().unwrap();
                physical = physical.measure_out(m.record.vertex, m.observable, flipped).unwrap().0;
            }
        }
    }
    equal_up_to_global_phase(&physical, &framed_state(&fg), 1e-9).unwrap()
}

/// Wraps the steps recorded on a canvas as a plan so the verifiers can run it.
pub fn canvas_plan(canvas: &Canvas, targets: &[(&str, Coord)], edges: &[(&str, &str)]) -> Plan {
    let at = |l: &str| targets.iter().find(|t| t.0 == l).unwrap().1;
    let coords: Vec<(Coord, Coord)> = edges.iter().map(|(a, b)| (at(a), at(b))).collect();
    Plan {
        grid: canvas.spec(),
        targets: targets.iter().map(|(l, c)| PlanTarget { label: l.to_string(), x: c.x, y: c.y }).collect(),
        edges: edges.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect(),
        strategy: "manual".into(),
        steps: canvas.steps().to_vec(),
        predicted_graph: canvas.graph().clone(),
        stats: CostReport::from_steps(canvas.steps(), canvas.spec(), &coords, 0),
    }
}

pub fn request(side: u32, targets: &[(&str, (i32, i32))], edges: &[(&str, &str)], strategy: Strategy) -> ExtractionRequest {
    let ts: Vec<(&str, Coord)> = targets.iter().map(|(l, (x, y))| (*l, Coord::new(*x, *y))).collect();
    ExtractionRequest::new(GridSpec::new(side, side).unwrap(), &ts, edges, strategy)
}

/// Six targets around a degree-5 hub with two extra edges among the leaves.
pub fn six_target_fixture(strategy: Strategy) -> ExtractionRequest {
    request(
        20,
        &[("a", (9, 9)), ("b", (4, 5)), ("c", (15, 5)), ("d", (14, 14)), ("e", (5, 14)), ("f", (9, 3))],
        &[("a", "b"), ("a", "c"), ("a", "d"), ("a", "e"), ("a", "f"), ("d", "e"), ("b", "c")],
        strategy,
    )
}

pub fn ghz5_fixture(strategy: Strategy) -> ExtractionRequest {
    request(
        20,
        &[("a", (6, 7)), ("b", (13, 6)), ("c", (7, 14)), ("d", (10, 10)), ("e", (14, 13))],
        &[("d", "a"), ("d", "b"), ("d", "c"), ("d", "e")],
        strategy,
    )
}

/// Star with a hub on the left of a 20x20 grid and `k` leaves packed
/// around a point on the right; leaves stay at least 3 apart.
pub fn clustered_ghz(seed: u64, k: usize) -> ExtractionRequest {
    let mut rng = rng(seed);
    loop {
        let hub = Coord::new(rng.gen_range(2..6), rng.gen_range(2..18));
        let c = Coord::new(rng.gen_range(13..16), rng.gen_range(4..16));
        let mut leaves: Vec<Coord> = Vec::new();
        for _ in 0..500 {
            if leaves.len() == k {
                break;
            }
            let p = Coord::new(c.x + rng.gen_range(-3..=3), c.y + rng.gen_range(-3..=3));
            if manhattan(p, c) <= 4 && leaves.iter().all(|q| manhattan(*q, p) >= 3) && p.x < 19 && p.y < 19 {
                leaves.push(p);
            }
        }
        if leaves.len() < k {
            continue;
        }
        let names: Vec<String> = (0..k).map(|i| format!("l{i}")).collect();
        let mut targets: Vec<(&str, Coord)> = vec![("h", hub)];
        targets.extend(names.iter().map(String::as_str).zip(leaves));
        let edges: Vec<(&str, &str)> = names.iter().map(|n| ("h", n.as_str())).collect();
        return ExtractionRequest::new(GridSpec::new(20, 20).unwrap(), &targets, &edges, Strategy::Lvde);
    }
}

/// Bell pair across the diagonal of an `n` x `n` grid.
pub fn bell_across(n: u32, strategy: Strategy) -> ExtractionRequest {
    let far = n as i32 - 2;
    request(n, &[("a", (1, 1)), ("b", (far, far))], &[("a", "b")], strategy)
}

/// Coefficient of determination of the least-squares line through the points.
pub fn r_squared(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let (mx, my) = (points.iter().map(|p| p.0).sum::<f64>() / n, points.iter().map(|p| p.1).sum::<f64>() / n);
    let sxy: f64 = points.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = points.iter().map(|(x, _)| (x - mx).powi(2)).sum();
    let syy: f64 = points.iter().map(|(_, y)| (y - my).powi(2)).sum();
    if syy == 0.0 {
        return 1.0;
    }
    sxy * sxy / (sxx * syy)
}
