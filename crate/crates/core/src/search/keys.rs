use std::cmp::Ordering;

/// Which component of a key dominates the ordering.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    /// No solution yet: order by validation effort, break ties by cost.
    Effort,
    /// A solution exists: order by cost, break ties by effort.
    Cost,
}

impl Mode {
    pub fn for_inflation(w: f64) -> Mode {
        if w.is_infinite() {
            Mode::Effort
        } else {
            Mode::Cost
        }
    }
}

/// Effort and cost estimate of a solution through an edge.
///
/// Unreachable effort saturates at `u64::MAX`, unreachable cost is `+inf`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchKey {
    pub effort: u64,
    pub cost: f64,
}

impl SearchKey {
    pub const INFINITE: SearchKey = SearchKey {
        effort: u64::MAX,
        cost: f64::INFINITY,
    };

    pub fn new(effort: u64, cost: f64) -> Self {
        SearchKey { effort, cost }
    }

    /// Lexicographic comparison under `mode`.
    #[inline]
    pub fn cmp_in(&self, other: &SearchKey, mode: Mode) -> Ordering {
        match mode {
            Mode::Effort => self
                .effort
                .cmp(&other.effort)
                .then_with(|| self.cost.total_cmp(&other.cost)),
            Mode::Cost => self
                .cost
                .total_cmp(&other.cost)
                .then_with(|| self.effort.cmp(&other.effort)),
        }
    }

    #[inline]
    pub fn lt_in(&self, other: &SearchKey, mode: Mode) -> bool {
        self.cmp_in(other, mode) == Ordering::Less
    }

    /// The key as an `(effort, cost)` or `(cost, effort)` tuple.
    pub fn tuple(&self, mode: Mode) -> (f64, f64) {
        let effort = if self.effort == u64::MAX {
            f64::INFINITY
        } else {
            self.effort as f64
        };
        match mode {
            Mode::Effort => (effort, self.cost),
            Mode::Cost => (self.cost, effort),
        }
    }

    /// Smaller of two keys under `mode`.
    pub fn min_in(self, other: SearchKey, mode: Mode) -> SearchKey {
        if other.lt_in(&self, mode) {
            other
        } else {
            self
        }
    }
}
