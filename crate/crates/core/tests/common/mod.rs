//! Independent reference computations shared by the integration tests. None
//! of these use the library's geometry, nearest-neighbour or search code.

#![allow(dead_code)]

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use eirm::Scenario;

pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// A point collides when it lies strictly inside some box.
pub fn point_collides(obstacles: &[Vec<[f64; 2]>], p: &[f64]) -> bool {
    obstacles
        .iter()
        .any(|ob| ob.iter().zip(p).all(|(iv, &x)| x > iv[0] && x < iv[1]))
}

/// Re-validates a segment on a grid of spacing at most `resolution`,
/// endpoints included.
pub fn segment_free(obstacles: &[Vec<[f64; 2]>], a: &[f64], b: &[f64], resolution: f64) -> bool {
    let n = (dist(a, b) / resolution).ceil().max(1.0) as u64;
    (0..=n).all(|i| {
        let t = i as f64 / n as f64;
        let p: Vec<f64> = a.iter().zip(b).map(|(x, y)| (1.0 - t) * x + t * y).collect();
        !point_collides(obstacles, &p)
    })
}

/// Checks the whole path; returns the audited cost.
pub fn audit_path(sc: &Scenario, path: &[Vec<f64>]) -> Result<f64, String> {
    let mut cost = 0.0;
    for (i, w) in path.windows(2).enumerate() {
        if !segment_free(sc.obstacles(), &w[0], &w[1], sc.resolution()) {
            return Err(format!("segment {i} collides"));
        }
        cost += dist(&w[0], &w[1]);
    }
    Ok(cost)
}

/// The k-nearest rule of random geometric graphs.
pub fn k_nearest(n: usize, dim: usize) -> usize {
    if n < 2 {
        return 1;
    }
    let k = (1.001 * std::f64::consts::E * (1.0 + 1.0 / dim as f64) * (n as f64).ln()).ceil() as usize;
    k.clamp(1, n - 1)
}

/// Undirected graph joining every point to its k nearest others
/// (brute force).
pub fn knn_graph(points: &[Vec<f64>], k: usize) -> Vec<Vec<usize>> {
    let n = points.len();
    let mut adj = vec![Vec::new(); n];
    for i in 0..n {
        let mut order: Vec<usize> = (0..n).filter(|&j| j != i).collect();
        order.sort_by(|&x, &y| dist(&points[i], &points[x]).total_cmp(&dist(&points[i], &points[y])));
        for &j in &order[..k.min(order.len())] {
            adj[i].push(j);
            adj[j].push(i);
        }
    }
    adj
}

/// Textbook Dijkstra; returns the distance from `source` to the nearest
/// target.
pub fn dijkstra(adj: &[Vec<usize>], points: &[Vec<f64>], source: usize, targets: &[usize]) -> f64 {
    let mut d = vec![f64::INFINITY; points.len()];
    let mut heap = BinaryHeap::new();
    d[source] = 0.0;
    // non-negative floats order like their bit patterns
    heap.push(Reverse((0f64.to_bits(), source)));
    while let Some(Reverse((bits, x))) = heap.pop() {
        let dx = f64::from_bits(bits);
        if dx > d[x] {
            continue;
        }
        if targets.contains(&x) {
            return dx;
        }
        for &y in &adj[x] {
            let c = dx + dist(&points[x], &points[y]);
            if c < d[y] {
                d[y] = c;
                heap.push(Reverse((c.to_bits(), y)));
            }
        }
    }
    f64::INFINITY
}

/// Random boxes inside the unit cube.
pub fn micro_scenario(rng: &mut ChaCha8Rng, dim: usize, obstacles: usize, resolution: f64) -> Scenario {
    let boxes = (0..obstacles)
        .map(|_| {
            (0..dim)
                .map(|_| {
                    let lo: f64 = rng.gen_range(0.0..0.8);
                    let w = rng.gen_range(0.05..0.3);
                    [lo, (lo + w).min(1.0)]
                })
                .collect()
        })
        .collect();
    Scenario::new(dim, vec![[0.0, 1.0]; dim], boxes, resolution).expect("valid boxes")
}

pub fn free_point(rng: &mut ChaCha8Rng, sc: &Scenario) -> Vec<f64> {
    loop {
        let p: Vec<f64> = sc.bounds().iter().map(|b| rng.gen_range(b[0]..b[1])).collect();
        if !point_collides(sc.obstacles(), &p) {
            return p;
        }
    }
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
