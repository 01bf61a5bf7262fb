//! Edge queues of the reverse and forward searches.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap};

use super::keys::{Mode, SearchKey};
use crate::approximation::EdgeId;
use crate::space::StateId;

/// Reverse-queue entry.
///
/// `version` is the source's label version at insertion and `edge_effort`
/// the remaining validation effort of the edge at insertion; the key is
/// computed from both and never re-evaluated.
#[derive(Debug, Clone, Copy)]
pub struct RevEntry {
    pub key: SearchKey,
    pub mode: Mode,
    pub src: u32,
    pub dst: u32,
    pub src_id: StateId,
    pub dst_id: StateId,
    pub edge: EdgeId,
    pub edge_effort: u64,
    pub version: u32,
}

impl RevEntry {
    fn order(&self, other: &Self) -> Ordering {
        self.key
            .cmp_in(&other.key, self.mode)
            .then_with(|| (self.src_id, self.dst_id).cmp(&(other.src_id, other.dst_id)))
    }
}

impl PartialEq for RevEntry {
    fn eq(&self, other: &Self) -> bool {
        self.order(other) == Ordering::Equal
    }
}

impl Eq for RevEntry {}

// max-heap of the smallest key
impl Ord for RevEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        other.order(self)
    }
}

impl PartialOrd for RevEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Lexicographically ordered reverse edge queue with lazy deletion.
#[derive(Debug, Clone)]
pub struct ReverseQueue {
    heap: BinaryHeap<RevEntry>,
    mode: Mode,
}

impl ReverseQueue {
    pub fn new(mode: Mode) -> Self {
        ReverseQueue {
            heap: BinaryHeap::new(),
            mode,
        }
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn len(&self) -> usize {
        self.heap.len()
    }

    pub fn is_empty(&self) -> bool {
        self.heap.is_empty()
    }

    pub fn clear(&mut self) {
        self.heap.clear();
    }

    pub fn push(&mut self, mut entry: RevEntry) {
        entry.mode = self.mode;
        self.heap.push(entry);
    }

    pub fn peek(&self) -> Option<&RevEntry> {
        self.heap.peek()
    }

    pub fn pop(&mut self) -> Option<RevEntry> {
        self.heap.pop()
    }

    /// Switches the ordering; `rekey` returns the current key of an entry or
    /// `None` when the entry is stale.
    pub fn reorder(&mut self, mode: Mode, mut rekey: impl FnMut(&RevEntry) -> Option<SearchKey>) {
        let old = std::mem::take(&mut self.heap).into_vec();
        self.mode = mode;
        self.heap = old
            .into_iter()
            .filter_map(|mut e| {
                let key = rekey(&e)?;
                e.key = key;
                e.mode = mode;
                Some(e)
            })
            .collect();
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FwdEntry {
    pub src: u32,
    pub dst: u32,
    pub src_id: StateId,
    pub dst_id: StateId,
    pub edge: EdgeId,
    pub cost: f64,
}

/// Exact minima of the forward keys under both orderings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ForwardMinima {
    pub effort: SearchKey,
    pub cost: SearchKey,
}

impl ForwardMinima {
    pub const EMPTY: ForwardMinima = ForwardMinima {
        effort: SearchKey::INFINITE,
        cost: SearchKey::INFINITE,
    };

    pub fn merge(&mut self, key: SearchKey) {
        self.effort = self.effort.min_in(key, Mode::Effort);
        self.cost = self.cost.min_in(key, Mode::Cost);
    }

    pub fn get(&self, mode: Mode) -> SearchKey {
        match mode {
            Mode::Effort => self.effort,
            Mode::Cost => self.cost,
        }
    }
}

/// Forward edge queue.
///
/// Forward keys depend on labels that keep improving while the entry waits,
/// so entries are kept unkeyed in a slab and the selection rules scan them.
/// The minima needed to interleave the two searches are cached and updated
/// incrementally while keys only decrease.
#[derive(Debug, Clone, Default)]
pub struct ForwardQueue {
    slots: Vec<Option<FwdEntry>>,
    free: Vec<usize>,
    slot_of: HashMap<(u32, u32), usize>,
    by_target: Vec<Vec<usize>>,
    len: usize,
    minima: Option<ForwardMinima>,
}

impl ForwardQueue {
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn clear(&mut self) {
        self.slots.clear();
        self.free.clear();
        self.slot_of.clear();
        for t in &mut self.by_target {
            t.clear();
        }
        self.len = 0;
        self.minima = Some(ForwardMinima::EMPTY);
    }

    pub fn grow(&mut self, vertices: usize) {
        if self.by_target.len() < vertices {
            self.by_target.resize_with(vertices, Vec::new);
        }
    }

    pub fn contains(&self, src: u32, dst: u32) -> bool {
        self.slot_of.contains_key(&(src, dst))
    }

    /// Inserts unless the edge is already queued; returns the new slot.
    pub fn push(&mut self, entry: FwdEntry) -> Option<usize> {
        if self.slot_of.contains_key(&(entry.src, entry.dst)) {
            return None;
        }
        let slot = match self.free.pop() {
            Some(s) => {
                self.slots[s] = Some(entry);
                s
            }
            None => {
                self.slots.push(Some(entry));
                self.slots.len() - 1
            }
        };
        self.slot_of.insert((entry.src, entry.dst), slot);
        self.grow(entry.dst as usize + 1);
        self.by_target[entry.dst as usize].push(slot);
        self.len += 1;
        Some(slot)
    }

    pub fn remove(&mut self, slot: usize) -> Option<FwdEntry> {
        let entry = self.slots.get_mut(slot)?.take()?;
        self.slot_of.remove(&(entry.src, entry.dst));
        let list = &mut self.by_target[entry.dst as usize];
        if let Some(pos) = list.iter().position(|s| *s == slot) {
            list.swap_remove(pos);
        }
        self.free.push(slot);
        self.len -= 1;
        self.minima = None;
        Some(entry)
    }

    pub fn get(&self, slot: usize) -> Option<&FwdEntry> {
        self.slots.get(slot).and_then(Option::as_ref)
    }

    pub fn slot(&self, src: u32, dst: u32) -> Option<usize> {
        self.slot_of.get(&(src, dst)).copied()
    }

    /// Occupied slots in slot order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, &FwdEntry)> {
        self.slots
            .iter()
            .enumerate()
            .filter_map(|(i, e)| e.as_ref().map(|e| (i, e)))
    }

    pub fn targeting(&self, dst: u32) -> &[usize] {
        self.by_target.get(dst as usize).map_or(&[], Vec::as_slice)
    }

    pub fn minima(&self) -> Option<ForwardMinima> {
        self.minima
    }

    pub fn set_minima(&mut self, minima: ForwardMinima) {
        self.minima = Some(minima);
    }

    pub fn invalidate_minima(&mut self) {
        self.minima = None;
    }

    /// Folds a decreased key into the cached minima, if they are current.
    pub fn lower_minima(&mut self, key: SearchKey) {
        if let Some(m) = self.minima.as_mut() {
            m.merge(key);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn entry(effort: u64, cost: f64, src: u32, dst: u32) -> RevEntry {
        RevEntry {
            key: SearchKey::new(effort, cost),
            mode: Mode::Effort,
            src,
            dst,
            src_id: StateId(src),
            dst_id: StateId(dst),
            edge: EdgeId(0),
            edge_effort: 0,
            version: 0,
        }
    }

    #[test]
    fn reverse_queue_pops_smallest_first() {
        let mut q = ReverseQueue::new(Mode::Effort);
        q.push(entry(150, 2.0, 1, 2));
        q.push(entry(0, 9.0, 3, 4));
        q.push(entry(150, 1.0, 5, 6));
        assert_eq!(q.pop().unwrap().key.effort, 0);
        assert_eq!(q.pop().unwrap().key.cost, 1.0);
        assert_eq!(q.pop().unwrap().key.cost, 2.0);
    }

    #[test]
    fn ties_break_on_ids() {
        let mut q = ReverseQueue::new(Mode::Cost);
        q.push(entry(1, 1.0, 7, 2));
        q.push(entry(1, 1.0, 3, 9));
        assert_eq!(q.pop().unwrap().src, 3);
    }

    #[test]
    fn reorder_switches_ordering() {
        let mut q = ReverseQueue::new(Mode::Effort);
        q.push(entry(10, 5.0, 1, 2));
        q.push(entry(20, 1.0, 3, 4));
        q.reorder(Mode::Cost, |e| Some(e.key));
        assert_eq!(q.pop().unwrap().src, 3);
    }

    #[test]
    fn forward_queue_deduplicates_and_reuses_slots() {
        let mut q = ForwardQueue::default();
        let e = FwdEntry {
            src: 0,
            dst: 1,
            src_id: StateId(0),
            dst_id: StateId(1),
            edge: EdgeId(0),
            cost: 1.0,
        };
        let s = q.push(e).unwrap();
        assert!(q.push(e).is_none());
        assert_eq!(q.targeting(1), &[s]);
        assert_eq!(q.remove(s), Some(e));
        assert!(q.is_empty());
        assert!(q.targeting(1).is_empty());
        assert_eq!(q.push(e), Some(s));
    }
}
