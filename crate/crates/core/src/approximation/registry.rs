//! Persistent per-session record of every edge the planner has looked at.

use std::collections::HashMap;

use crate::error::ApproximationError;
use crate::space::{canonical, StateId, ValidationStatus};

/// Dense handle into the [`EdgeRegistry`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EdgeId(pub u32);

#[derive(Debug, Clone)]
pub struct EdgeRecord {
    pub a: StateId,
    pub b: StateId,
    pub length: f64,
    /// Full-resolution grid point count.
    pub points: u64,
    pub status: ValidationStatus,
}

#[derive(Debug, Clone, Default)]
pub struct EdgeRegistry {
    index: HashMap<(StateId, StateId), EdgeId>,
    records: Vec<EdgeRecord>,
    valid_adjacency: HashMap<StateId, Vec<StateId>>,
    valid_count: usize,
    invalid_count: usize,
}

impl EdgeRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn clear(&mut self) {
        *self = Self::default();
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn valid_count(&self) -> usize {
        self.valid_count
    }

    pub fn invalid_count(&self) -> usize {
        self.invalid_count
    }

    pub fn find(&self, x: StateId, y: StateId) -> Option<EdgeId> {
        self.index.get(&canonical(x, y)).copied()
    }

    /// Looks up the edge or registers it as `Unknown`.
    pub fn get_or_insert(
        &mut self,
        x: StateId,
        y: StateId,
        length: f64,
        points: u64,
    ) -> EdgeId {
        let (a, b) = canonical(x, y);
        let records = &mut self.records;
        *self.index.entry((a, b)).or_insert_with(|| {
            records.push(EdgeRecord {
                a,
                b,
                length,
                points,
                status: ValidationStatus::Unknown,
            });
            EdgeId(records.len() as u32 - 1)
        })
    }

    #[inline]
    pub fn get(&self, id: EdgeId) -> &EdgeRecord {
        &self.records[id.0 as usize]
    }

    #[inline]
    pub fn status(&self, id: EdgeId) -> ValidationStatus {
        self.records[id.0 as usize].status
    }

    pub fn status_of(&self, x: StateId, y: StateId) -> ValidationStatus {
        self.find(x, y).map_or(ValidationStatus::Unknown, |id| self.status(id))
    }

    /// Merges a new validation outcome into the registry.
    ///
    /// `Valid` and `Invalid` are permanent; sparse progress keeps the larger
    /// certified count. Flipping between `Valid` and `Invalid` is an error.
    pub fn record(&mut self, id: EdgeId, status: ValidationStatus) -> Result<(), ApproximationError> {
        let record = &mut self.records[id.0 as usize];
        let merged = match (record.status, status) {
            (_, ValidationStatus::Unknown) => return Ok(()),
            (ValidationStatus::Valid, ValidationStatus::Invalid)
            | (ValidationStatus::Invalid, ValidationStatus::Valid) => {
                return Err(ApproximationError::Inconsistent(record.a, record.b));
            }
            (ValidationStatus::Valid, _) | (ValidationStatus::Invalid, _) => return Ok(()),
            (ValidationStatus::SparseValid(old), ValidationStatus::SparseValid(new)) => {
                ValidationStatus::SparseValid(old.max(new))
            }
            (_, new) => new,
        };
        if merged == record.status {
            return Ok(());
        }
        record.status = merged;
        let (a, b) = (record.a, record.b);
        match merged {
            ValidationStatus::Valid => {
                self.valid_count += 1;
                self.valid_adjacency.entry(a).or_default().push(b);
                self.valid_adjacency.entry(b).or_default().push(a);
            }
            ValidationStatus::Invalid => self.invalid_count += 1,
            _ => {}
        }
        Ok(())
    }

    /// States joined to `x` by a validated edge, in validation order.
    pub fn valid_partners(&self, x: StateId) -> &[StateId] {
        self.valid_adjacency.get(&x).map_or(&[], Vec::as_slice)
    }

    pub fn edges_with(&self, status: ValidationStatus) -> Vec<(StateId, StateId)> {
        let mut out: Vec<_> = self
            .records
            .iter()
            .filter(|r| r.status == status)
            .map(|r| (r.a, r.b))
            .collect();
        out.sort();
        out
    }

    pub fn iter(&self) -> impl Iterator<Item = &EdgeRecord> {
        self.records.iter()
    }
}
