use super::*;
use crate::approximation::BatchConfig;
use crate::space::{grid_points, Scenario, StateId};
use proptest::prelude::*;

/// Approximation whose active set is exactly `points`; the first is the
/// start and the second the goal.
fn fixed(scenario: Scenario, points: &[[f64; 2]]) -> (Approximation, Vec<StateId>) {
    let cfg = BatchConfig {
        batch_size: 0,
        ..BatchConfig::default()
    };
    let mut a = Approximation::new(scenario, cfg, 100, 0);
    let ids: Vec<StateId> = points.iter().map(|p| a.store_mut().intern(p)).collect();
    a.rewind_for_query(ids[0], &[ids[1]]).unwrap();
    a.insert_active(&ids[2..]);
    (a, ids)
}

fn validate(a: &mut Approximation, x: StateId, y: StateId) {
    let len = distance(a.store().coords(x), a.store().coords(y));
    let r = a.scenario().resolution();
    let e = a.registry_mut().get_or_insert(x, y, len, grid_points(len, r));
    a.record_edge_status(e, ValidationStatus::Valid).unwrap();
}

fn corridor() -> (Approximation, Vec<StateId>) {
    let sc = Scenario::empty(2, -1.0, 6.0, 1e-3).unwrap();
    let pts = [
        [0.0, 0.0],
        [5.0, 0.0],
        [1.0, 0.3],
        [2.0, -0.3],
        [3.0, 0.3],
        [4.0, -0.3],
        [2.5, 3.0],
        [1.5, 4.0],
        [3.5, 5.0],
        [0.5, 2.0],
        [4.5, 2.5],
    ];
    let (mut a, ids) = fixed(sc, &pts);
    let chain = [ids[0], ids[2], ids[3], ids[4], ids[5], ids[1]];
    for w in chain.windows(2) {
        validate(&mut a, w[0], w[1]);
    }
    (a, ids)
}

fn run_reverse(s: &mut Search, a: &mut Approximation) -> usize {
    let mut n = 0;
    while s.best_rev_edge_improves_sol(a) {
        s.reverse_iterate(a).unwrap();
        n += 1;
    }
    n
}

#[test]
fn reverse_search_runs_first() {
    let (mut a, _) = corridor();
    let mut s = Search::new(SearchConfig::default(), &mut a, 0, &[1]);
    assert!(!s.reverse_queue().is_empty());
    assert!(s.best_rev_edge_improves_sol(&a));
    assert_eq!(s.stats().forward_iterations, 0);
}

#[test]
fn empty_reverse_queue_never_improves() {
    let sc = Scenario::empty(2, -1.0, 6.0, 1e-3).unwrap();
    // two isolated vertices: the reverse queue drains after one edge
    let (mut a, _) = fixed(sc, &[[0.0, 0.0], [5.0, 0.0]]);
    let mut s = Search::new(SearchConfig::default(), &mut a, 0, &[1]);
    run_reverse(&mut s, &mut a);
    s.rev.clear();
    assert!(!s.best_rev_edge_improves_sol(&a));
}

#[test]
fn validated_corridor_is_reused_without_checks() {
    let (mut a, ids) = corridor();
    let sparse_before = a.sparse_checks();
    let full_before = a.full_checks();
    let mut s = Search::new(SearchConfig::default(), &mut a, 0, &[1]);
    run_reverse(&mut s, &mut a);
    assert_eq!(s.e_bar(0), 0);
    assert_eq!(a.sparse_checks(), sparse_before);

    let mut solved = None;
    for _ in 0..1000 {
        match s.step(&mut a).unwrap() {
            Step::Forward(ForwardOutcome::Improved(c)) => {
                solved = Some(c);
                break;
            }
            Step::Exhausted => break,
            _ => {}
        }
    }
    let cost = solved.expect("corridor solves the query");
    assert_eq!(a.full_checks(), full_before);
    let path: Vec<StateId> = s.path_to(1).unwrap().into_iter().map(|x| a.id_of(x)).collect();
    assert_eq!(path, vec![ids[0], ids[2], ids[3], ids[4], ids[5], ids[1]]);
    let audit: f64 = path
        .windows(2)
        .map(|w| distance(a.store().coords(w[0]), a.store().coords(w[1])))
        .sum();
    assert_eq!(cost, audit);
    assert_eq!(s.w(), 1.0);
    assert_eq!(s.mode(), Mode::Cost);
}

#[test]
fn sparse_collision_marks_edge_invalid() {
    let sc = Scenario::new(
        2,
        vec![[0.0, 1.0]; 2],
        vec![vec![[0.45, 0.55], [0.0, 1.0]]],
        1e-4,
    )
    .unwrap();
    let (mut a, ids) = fixed(sc, &[[0.1, 0.5], [0.9, 0.5]]);
    let mut s = Search::new(SearchConfig::default(), &mut a, 0, &[1]);
    run_reverse(&mut s, &mut a);
    assert_eq!(a.registry().status_of(ids[0], ids[1]), ValidationStatus::Invalid);
    let mut out = Vec::new();
    a.expand(0, &mut out);
    assert!(out.is_empty());
    assert!(!s.forward_gate(&a));
    assert_eq!(s.step(&mut a).unwrap(), Step::Exhausted);
}

#[test]
fn zero_effort_edges_win_the_effort_phase() {
    // start with two neighbours: one joined by a validated edge
    let sc = Scenario::empty(2, -1.0, 3.0, 1e-2).unwrap();
    let (mut a, ids) = fixed(sc, &[[0.0, 0.0], [2.0, 0.0], [1.0, 0.5], [1.0, -0.5]]);
    validate(&mut a, ids[0], ids[2]);
    validate(&mut a, ids[2], ids[1]);
    let mut s = Search::new(SearchConfig::default(), &mut a, 0, &[1]);
    // label both middle vertices, then force the forward choice
    while s.reverse_queue().len() > 0 {
        s.reverse_iterate(&mut a).unwrap();
    }
    assert!(s.e_bar(2) == 0 && s.e_bar(3) > 0);
    let slot = s.get_best_forward_edge(&a).unwrap();
    let e = *s.forward_queue().get(slot).unwrap();
    assert_eq!(e.dst, 2);
}

#[test]
fn bounds_of_an_empty_forward_queue_are_infinite() {
    let sc = Scenario::empty(2, -1.0, 6.0, 1e-3).unwrap();
    let (mut a, _) = fixed(sc, &[[0.0, 0.0], [5.0, 0.0]]);
    let mut s = Search::new(SearchConfig::default(), &mut a, 0, &[1]);
    s.fwd.clear();
    assert_eq!(s.lower_bound_s_hat(), f64::INFINITY);
    assert_eq!(s.estimate_s_bar(), f64::INFINITY);
    assert_eq!(s.get_best_forward_edge(&a), None);
}

#[test]
fn lower_bounds_after_labelling() {
    let (mut a, _) = corridor();
    let mut s = Search::new(SearchConfig::default(), &mut a, 0, &[1]);
    run_reverse(&mut s, &mut a);
    // oracle: brute force over the queued edges
    let mut s_hat = f64::INFINITY;
    for (_, e) in s.forward_queue().iter() {
        s_hat = s_hat.min(s.g(e.src) + e.cost + s.h_hat(e.dst));
    }
    assert_eq!(s.lower_bound_s_hat(), s_hat);
    assert!(s.estimate_s_bar() <= s.lower_bound_s_hat());
    assert_eq!(s.forward_minima(&a).cost.cost, s_hat);
}

#[test]
fn tree_costs_match_parent_chains() {
    let (mut a, _) = corridor();
    let mut s = Search::new(SearchConfig::default(), &mut a, 0, &[1]);
    for _ in 0..5000 {
        if s.step(&mut a).unwrap() == Step::Exhausted {
            break;
        }
    }
    for x in 0..a.active_len() as u32 {
        if !s.g(x).is_finite() {
            continue;
        }
        let path = s.path_to(x).unwrap();
        let mut g = 0.0;
        for w in path.windows(2) {
            let e = a.registry().find(a.id_of(w[0]), a.id_of(w[1])).unwrap();
            assert!(a.edge_status(e).is_valid());
            g += distance(a.coords_local(w[0]), a.coords_local(w[1]));
        }
        assert_eq!(g, s.g(x));
    }
}

fn random_space(seed: u64, n: usize) -> Approximation {
    let sc = Scenario::new(
        2,
        vec![[0.0, 1.0]; 2],
        vec![
            vec![[0.3, 0.4], [0.0, 0.7]],
            vec![[0.6, 0.7], [0.3, 1.0]],
        ],
        1e-3,
    )
    .unwrap();
    let cfg = BatchConfig {
        batch_size: n,
        ..BatchConfig::default()
    };
    let mut a = Approximation::new(sc, cfg, 10, seed);
    let s = a.store_mut().intern(&[0.1, 0.5]);
    let g = a.store_mut().intern(&[0.9, 0.5]);
    a.rewind_for_query(s, &[g]).unwrap();
    a
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn effort_phase_pops_are_monotone(seed in 0u64..1000, n in 5usize..60) {
        let mut a = random_space(seed, n);
        let mut s = Search::new(SearchConfig::default(), &mut a, 0, &[1]);
        s.enable_trace();
        while !s.reverse_queue().is_empty() {
            s.reverse_iterate(&mut a).unwrap();
        }
        let efforts: Vec<u64> = s.trace().iter().map(|(m, k)| {
            assert_eq!(*m, Mode::Effort);
            k.effort
        }).collect();
        prop_assert!(efforts.windows(2).all(|w| w[0] <= w[1]), "{:?}", efforts);
    }

    #[test]
    fn interleaved_effort_phase_pops_are_monotone(seed in 0u64..1000, n in 5usize..60) {
        let mut a = random_space(seed, n);
        let mut s = Search::new(SearchConfig::default(), &mut a, 0, &[1]);
        s.enable_trace();
        let mut restarts = s.stats().restarts;
        let mut last = 0;
        for _ in 0..20_000 {
            if s.mode() != Mode::Effort {
                break;
            }
            let before = s.trace().len();
            let step = s.step(&mut a).unwrap();
            if step == Step::Exhausted {
                break;
            }
            if s.stats().restarts != restarts {
                // a restart begins a fresh reverse search
                restarts = s.stats().restarts;
                last = 0;
                continue;
            }
            if s.trace().len() > before {
                let (m, k) = s.trace()[before];
                prop_assert_eq!(m, Mode::Effort);
                prop_assert!(k.effort >= last);
                last = k.effort;
            }
        }
    }

    #[test]
    fn runs_to_exhaustion_with_a_sound_tree(seed in 0u64..1000, n in 5usize..60) {
        let mut a = random_space(seed, n);
        let mut s = Search::new(SearchConfig::default(), &mut a, 0, &[1]);
        let mut costs = Vec::new();
        let mut exhausted = false;
        for _ in 0..200_000 {
            match s.step(&mut a).unwrap() {
                Step::Exhausted => {
                    exhausted = true;
                    break;
                }
                Step::Forward(ForwardOutcome::Improved(c)) => costs.push(c),
                _ => {}
            }
        }
        prop_assert!(exhausted);
        prop_assert!(costs.windows(2).all(|w| w[1] < w[0]));
        if let Some(goal) = s.best_goal() {
            let path = s.path_to(goal).unwrap();
            prop_assert_eq!(path[0], 0);
            for w in path.windows(2) {
                let e = a.registry().find(a.id_of(w[0]), a.id_of(w[1])).unwrap();
                prop_assert!(a.edge_status(e).is_valid());
            }
            prop_assert_eq!(s.c_curr(), s.g(goal));
        }
    }
}
