//! Incremental kd-tree over points of a runtime dimension.
//!
//! Points are identified by their insertion index. Nearest-neighbour results
//! are ordered by `(squared distance, index)`, which makes them independent of
//! the tree shape.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

#[derive(Debug, Clone, Copy)]
struct Node {
    left: u32,
    right: u32,
}

const NONE: u32 = u32::MAX;

#[derive(Debug, Clone)]
pub struct KdTree {
    dim: usize,
    coords: Vec<f64>,
    nodes: Vec<Node>,
    root: u32,
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Candidate {
    dist2: f64,
    index: u32,
}

impl Eq for Candidate {}

impl Ord for Candidate {
    fn cmp(&self, other: &Self) -> Ordering {
        self.dist2
            .total_cmp(&other.dist2)
            .then(self.index.cmp(&other.index))
    }
}

impl PartialOrd for Candidate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl KdTree {
    pub fn new(dim: usize) -> Self {
        KdTree {
            dim,
            coords: Vec::new(),
            nodes: Vec::new(),
            root: NONE,
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn clear(&mut self) {
        self.coords.clear();
        self.nodes.clear();
        self.root = NONE;
    }

    pub fn point(&self, index: u32) -> &[f64] {
        let i = index as usize * self.dim;
        &self.coords[i..i + self.dim]
    }

    /// Inserts a point and returns its index.
    pub fn insert(&mut self, p: &[f64]) -> u32 {
        assert_eq!(p.len(), self.dim, "point dimension mismatch");
        let index = self.nodes.len() as u32;
        self.coords.extend_from_slice(p);
        self.nodes.push(Node {
            left: NONE,
            right: NONE,
        });
        if self.root == NONE {
            self.root = index;
            return index;
        }
        let mut current = self.root;
        let mut depth = 0;
        loop {
            let axis = depth % self.dim;
            let go_left = p[axis] < self.point(current)[axis];
            let node = &mut self.nodes[current as usize];
            let next = if go_left { &mut node.left } else { &mut node.right };
            if *next == NONE {
                *next = index;
                return index;
            }
            current = *next;
            depth += 1;
        }
    }

    /// The `k` nearest points to `query`, skipping `exclude`, closest first.
    pub fn nearest(&self, query: &[f64], k: usize, exclude: Option<u32>) -> Vec<(u32, f64)> {
        let mut heap = BinaryHeap::with_capacity(k + 1);
        if k > 0 && self.root != NONE {
            self.search(self.root, 0, query, k, exclude, &mut heap);
        }
        let mut out: Vec<Candidate> = heap.into_vec();
        out.sort();
        out.into_iter().map(|c| (c.index, c.dist2.sqrt())).collect()
    }

    /// Distance to the closest point other than `exclude`.
    pub fn nearest_distance(&self, query: &[f64], exclude: Option<u32>) -> Option<f64> {
        self.nearest(query, 1, exclude).first().map(|(_, d)| *d)
    }

    fn search(
        &self,
        node: u32,
        depth: usize,
        query: &[f64],
        k: usize,
        exclude: Option<u32>,
        heap: &mut BinaryHeap<Candidate>,
    ) {
        let p = self.point(node);
        if exclude != Some(node) {
            let dist2: f64 = p.iter().zip(query).map(|(a, b)| (a - b) * (a - b)).sum();
            let candidate = Candidate { dist2, index: node };
            if heap.len() < k {
                heap.push(candidate);
            } else if candidate < *heap.peek().expect("heap is full") {
                heap.pop();
                heap.push(candidate);
            }
        }
        let axis = depth % self.dim;
        let diff = query[axis] - p[axis];
        let links = self.nodes[node as usize];
        let (near, far) = if diff < 0.0 {
            (links.left, links.right)
        } else {
            (links.right, links.left)
        };
        if near != NONE {
            self.search(near, depth + 1, query, k, exclude, heap);
        }
        if far != NONE {
            let worst = heap.peek().map_or(f64::INFINITY, |c| c.dist2);
            if heap.len() < k || diff * diff <= worst {
                self.search(far, depth + 1, query, k, exclude, heap);
            }
        }
    }
}
