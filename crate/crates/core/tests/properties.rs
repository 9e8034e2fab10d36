mod common;

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use common::*;
use gsx::graph::{measure, Basis, Outcome};
use gsx::lattice::{dijkstra_nearest, find_free_patches, one_turn_zipper, Coord, GridPattern, GridSpec, Role};
use gsx::oracle::{StateVector, Tableau, DEFAULT_CAP};
use gsx::primitives::{zipper_connect, Canvas};
use proptest::prelude::*;
use rand::Rng;

/// Random pattern: each cell free with probability `p_free`, otherwise X.
fn pattern(seed: u64, w: u32, h: u32, p_free: f64) -> GridPattern {
    let mut rng = rng(seed);
    let mut p = GridPattern::new(GridSpec::new(w, h).unwrap());
    for c in p.spec().coords().collect::<Vec<_>>() {
        if !rng.gen_bool(p_free) {
            p.set(c, Role::MeasX).unwrap();
        }
    }
    p
}

fn adjacent(a: Coord, b: Coord) -> bool {
    (a.x - b.x).abs() + (a.y - b.y).abs() == 1
}

/// Plain breadth-first search from one source, never stepping onto a
/// candidate. Distance to each reachable candidate.
fn bfs(p: &GridPattern, src: Coord, candidates: &BTreeSet<Coord>) -> BTreeMap<Coord, u32> {
    let mut dist = BTreeMap::from([(src, 0u32)]);
    let mut found = BTreeMap::new();
    let mut q = VecDeque::from([src]);
    while let Some(c) = q.pop_front() {
        for nb in c.around() {
            if candidates.contains(&nb) {
                found.entry(nb).or_insert(dist[&c] + 1);
            } else if p.is_free(nb) && !dist.contains_key(&nb) {
                dist.insert(nb, dist[&c] + 1);
                q.push_back(nb);
            }
        }
    }
    found
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn nearest_distance_is_the_shortest_path(seed in any::<u64>(), w in 3u32..16, h in 3u32..16) {
        let mut p = pattern(seed, w, h, 0.75);
        let mut rng = rng(seed ^ 1);
        let cells: Vec<Coord> = p.spec().coords().collect();
        let sources: BTreeSet<Coord> = cells.iter().copied().filter(|c| !p.is_free(*c) && rng.gen_bool(0.3)).collect();
        let mut candidates = BTreeSet::new();
        for c in &cells {
            if p.is_free(*c) && rng.gen_bool(0.05) {
                p.set(*c, Role::Target).unwrap();
                candidates.insert(*c);
            }
        }
        let junction_ok = |c: &Coord| c.around().iter().filter(|n| p.is_free(**n)).count() >= 2;
        let best = sources.iter().filter(|s| junction_ok(s)).flat_map(|s| bfs(&p, *s, &candidates).into_values()).min();
        match dijkstra_nearest(&p, &sources, &candidates) {
            Ok(n) => {
                prop_assert_eq!(Some(n.distance), best);
                prop_assert!(sources.contains(&n.j) && candidates.contains(&n.n));
                prop_assert_eq!(n.path.len() as u32 + 1, n.distance);
                let chain: Vec<Coord> = [n.j].into_iter().chain(n.path.iter().copied()).chain([n.n]).collect();
                prop_assert!(chain.windows(2).all(|w| adjacent(w[0], w[1])));
                prop_assert!(n.path.iter().all(|c| p.is_free(*c)));
            }
            Err(_) => prop_assert_eq!(best, None),
        }
    }

    #[test]
    fn one_turn_paths_are_simple_and_bend_once(seed in any::<u64>(), w in 4u32..20, h in 4u32..20) {
        let p = pattern(seed, w, h, 0.9);
        let mut rng = rng(seed ^ 2);
        let pick = |rng: &mut rand_chacha::ChaCha8Rng| Coord::new(rng.gen_range(0..w as i32), rng.gen_range(0..h as i32));
        let (j, n) = (pick(&mut rng), pick(&mut rng));
        prop_assume!(j != n);
        if let Ok((marked, path)) = one_turn_zipper(n, j, &p) {
            let cells: BTreeSet<Coord> = path.iter().copied().collect();
            prop_assert_eq!(cells.len(), path.len());
            prop_assert!(!cells.contains(&j) && !cells.contains(&n));
            let chain: Vec<Coord> = [j].into_iter().chain(path.iter().copied()).chain([n]).collect();
            prop_assert!(chain.windows(2).all(|w| adjacent(w[0], w[1])));
            prop_assert!(path.iter().all(|c| marked.get(*c) == Some(Role::MeasX)));
            // two monotone legs
            let monotone = |s: &[Coord]| {
                let dx: BTreeSet<i32> = s.windows(2).map(|w| w[1].x - w[0].x).filter(|d| *d != 0).collect();
                let dy: BTreeSet<i32> = s.windows(2).map(|w| w[1].y - w[0].y).filter(|d| *d != 0).collect();
                dx.len() <= 1 && dy.len() <= 1
            };
            prop_assert!((0..chain.len()).any(|k| monotone(&chain[..=k]) && monotone(&chain[k..])));
        }
    }

    #[test]
    fn free_patches_partition_the_free_cells(seed in any::<u64>(), w in 2u32..20, h in 2u32..20, p_free in 0.0f64..1.0) {
        let p = pattern(seed, w, h, p_free);
        let patches = find_free_patches(&p);
        let mut seen = BTreeSet::new();
        for patch in &patches {
            prop_assert!(!patch.is_empty());
            for c in &patch.cells {
                prop_assert!(p.is_free(*c));
                prop_assert!(seen.insert(*c));
            }
            let start = *patch.cells.first().unwrap();
            let mut reach = BTreeSet::from([start]);
            let mut q = VecDeque::from([start]);
            while let Some(c) = q.pop_front() {
                for nb in c.around() {
                    if patch.cells.contains(&nb) && reach.insert(nb) {
                        q.push_back(nb);
                    }
                }
            }
            prop_assert_eq!(reach.len(), patch.len());
        }
        prop_assert_eq!(seen.len(), p.spec().coords().filter(|c| p.is_free(*c)).count());
    }

    #[test]
    fn measured_graph_is_outcome_independent(seed in any::<u64>(), n in 2u32..10) {
        let mut rng = rng(seed);
        let g = random_graph(&mut rng, n, 0.5);
        let a = rng.gen_range(0..n);
        let basis = Basis::ALL[rng.gen_range(0..3)];
        let b0 = g.neighbors(a).unwrap().iter().next().copied().filter(|_| basis == Basis::X);
        let plus = measure(&g, a, basis, Outcome::Plus, b0).unwrap();
        let minus = measure(&g, a, basis, Outcome::Minus, b0).unwrap();
        prop_assert_eq!(plus.graph, minus.graph);
    }

    #[test]
    fn graph_states_are_normalized(seed in any::<u64>(), n in 1u32..12) {
        let g = random_graph(&mut rng(seed), n, 0.5);
        let sv = StateVector::of_graph(&g, DEFAULT_CAP).unwrap();
        prop_assert!((sv.norm_sqr() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn tableau_generators_commute(seed in any::<u64>(), n in 2u32..12, k in 0usize..6) {
        let mut rng = rng(seed);
        let g = random_graph(&mut rng, n, 0.5);
        let mut t = Tableau::of_graph(&g);
        for _ in 0..k.min(n as usize - 1) {
            let v = rng.gen_range(0..n);
            let obs = gsx::graph::SignedPauli::plus(Basis::ALL[rng.gen_range(0..3)].pauli());
            let o = Outcome::BOTH[rng.gen_range(0..2)];
            if t.probability(&[(v, obs.pauli)], false, o).unwrap() > 0.0 {
                t.measure_single(v, obs, o).unwrap();
            }
        }
        let gens = t.generators();
        prop_assert_eq!(gens.len(), n as usize);
        for (i, (a, _)) in gens.iter().enumerate() {
            for (b, _) in &gens[i + 1..] {
                let anti = a.iter().filter(|(v, p)| b.iter().any(|(u, q)| u == v && !p.commutes(*q))).count();
                prop_assert_eq!(anti % 2, 0);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn zipper_isolates_the_pair_and_counts_add_up(ax in 0i32..12, ay in 0i32..12, bx in 0i32..12, by in 0i32..12) {
        let (a, b) = (Coord::new(ax, ay), Coord::new(bx, by));
        prop_assume!(gsx::lattice::manhattan(a, b) >= 2);
        let mut c = Canvas::with_targets(GridSpec::new(12, 12).unwrap(), [a, b]).unwrap();
        let z = zipper_connect(&mut c, a, b).unwrap();
        prop_assert_eq!(c.neighbors(a), vec![b]);
        prop_assert_eq!(c.neighbors(b), vec![a]);
        let plan = canvas_plan(&c, &[("a", a), ("b", b)], &[("a", "b")]);
        prop_assert_eq!(plan.stats.total, plan.stats.n_x + plan.stats.n_y + plan.stats.n_z);
        prop_assert_eq!(plan.stats.total, plan.steps.iter().filter(|s| s.is_measurement()).count());
        prop_assert!(plan.stats.n_x >= z.path.len());
        gsx::planners::verify_tableau(&plan, Some(ax as u64)).unwrap();
    }
}
