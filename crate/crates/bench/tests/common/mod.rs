//! Reference computations written independently of the planner crates.

#![allow(dead_code)]

use std::cmp::Reverse;
use std::collections::BinaryHeap;

pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// A point collides when it lies strictly inside some box.
pub fn point_collides(obstacles: &[Vec<[f64; 2]>], p: &[f64]) -> bool {
    obstacles
        .iter()
        .any(|ob| ob.iter().zip(p).all(|(iv, &x)| x > iv[0] && x < iv[1]))
}

/// Re-validates a segment on an evenly spaced grid no coarser than
/// `resolution`, endpoints included.
pub fn segment_free(obstacles: &[Vec<[f64; 2]>], a: &[f64], b: &[f64], resolution: f64) -> bool {
    let n = (dist(a, b) / resolution).ceil().max(1.0) as u64;
    (0..=n).all(|i| {
        let t = i as f64 / n as f64;
        let p: Vec<f64> = a.iter().zip(b).map(|(x, y)| (1.0 - t) * x + t * y).collect();
        !point_collides(obstacles, &p)
    })
}

/// Audits a path point by point; returns its length.
pub fn audit_path(obstacles: &[Vec<[f64; 2]>], resolution: f64, path: &[Vec<f64>]) -> Result<f64, String> {
    let mut cost = 0.0;
    for (i, w) in path.windows(2).enumerate() {
        if !segment_free(obstacles, &w[0], &w[1], resolution) {
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

/// Undirected graph joining every point to its k nearest others, by brute
/// force.
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

/// Textbook Dijkstra with Euclidean edge weights.
pub fn dijkstra(adj: &[Vec<usize>], points: &[Vec<f64>], source: usize, target: usize) -> f64 {
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
        if x == target {
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

/// Whether the segment passes through the open interior of a box
/// (parametric clipping).
pub fn segment_hits_box(a: &[f64], b: &[f64], ob: &[[f64; 2]]) -> bool {
    let (mut t0, mut t1) = (0.0f64, 1.0f64);
    for ((&p, &q), iv) in a.iter().zip(b).zip(ob) {
        let d = q - p;
        if d == 0.0 {
            if !(p > iv[0] && p < iv[1]) {
                return false;
            }
            continue;
        }
        let (mut lo, mut hi) = ((iv[0] - p) / d, (iv[1] - p) / d);
        if lo > hi {
            std::mem::swap(&mut lo, &mut hi);
        }
        t0 = t0.max(lo);
        t1 = t1.min(hi);
    }
    t0 < t1
}

/// Shortest collision-free path length among planar boxes: Dijkstra over
/// the visibility graph of the start, the goal and every box corner.
pub fn visibility_optimum(obstacles: &[Vec<[f64; 2]>], bounds: &[[f64; 2]], start: &[f64], goal: &[f64]) -> f64 {
    assert_eq!(start.len(), 2, "the visibility oracle is planar");
    let inside = |p: &[f64]| p.iter().zip(bounds).all(|(x, b)| *x >= b[0] && *x <= b[1]);
    let mut nodes = vec![start.to_vec(), goal.to_vec()];
    for ob in obstacles {
        for x in ob[0] {
            for y in ob[1] {
                let c = vec![x, y];
                if inside(&c) && !point_collides(obstacles, &c) {
                    nodes.push(c);
                }
            }
        }
    }
    let n = nodes.len();
    let mut adj = vec![Vec::new(); n];
    for i in 0..n {
        for j in i + 1..n {
            if !obstacles.iter().any(|ob| segment_hits_box(&nodes[i], &nodes[j], ob)) {
                adj[i].push(j);
                adj[j].push(i);
            }
        }
    }
    dijkstra(&adj, &nodes, 0, 1)
}
