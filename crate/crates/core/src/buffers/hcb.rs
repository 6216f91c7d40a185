use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;

use super::{BufferKind, FifoBuffer, ReplayBuffer};
use crate::rng::Rng;
use crate::transition::Transition;

/// Heap key ordered by priority, then by *descending* arrival so that among
/// equal priorities the newest item is the first to go.
#[derive(Debug, Clone, Copy)]
struct RetentionKey {
    priority: f64,
    arrival: u64,
    slot: usize,
}

impl Ord for RetentionKey {
    fn cmp(&self, other: &Self) -> Ordering {
        self.priority
            .total_cmp(&other.priority)
            .then_with(|| other.arrival.cmp(&self.arrival))
    }
}

impl PartialOrd for RetentionKey {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl PartialEq for RetentionKey {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for RetentionKey {}

#[derive(Debug, Clone, PartialEq)]
pub enum Admission {
    /// Stored in a free slot.
    Stored,
    /// Stored; the previous minimum was evicted.
    Displaced(Transition),
    /// Not stored.
    Rejected(Transition),
}

/// Fixed-size store that keeps the highest-curiosity items it has been
/// offered. Priorities are frozen at insertion; an arrival whose priority
/// merely equals the current minimum loses to the incumbent.
#[derive(Debug, Clone)]
pub struct CuriousStore {
    slots: Vec<Transition>,
    heap: BinaryHeap<Reverse<RetentionKey>>,
    capacity: usize,
    arrivals: u64,
}

impl CuriousStore {
    pub fn new(capacity: usize) -> Self {
        Self {
            slots: Vec::with_capacity(capacity.min(1 << 20)),
            heap: BinaryHeap::with_capacity(capacity.min(1 << 20)),
            capacity,
            arrivals: 0,
        }
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn len(&self) -> usize {
        self.slots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slots.is_empty()
    }

    /// Lowest retained priority.
    pub fn min_priority(&self) -> Option<f64> {
        self.heap.peek().map(|Reverse(k)| k.priority)
    }

    /// Offers `tr` keyed by `tr.curiosity_at_insert`.
    pub fn offer(&mut self, tr: Transition) -> Admission {
        let arrival = self.arrivals;
        self.arrivals += 1;
        let priority = tr.curiosity_at_insert;
        if self.slots.len() < self.capacity {
            let slot = self.slots.len();
            self.slots.push(tr);
            self.heap.push(Reverse(RetentionKey {
                priority,
                arrival,
                slot,
            }));
            return Admission::Stored;
        }
        match self.heap.peek_mut() {
            Some(mut top) if priority > top.0.priority => {
                let slot = top.0.slot;
                *top = Reverse(RetentionKey {
                    priority,
                    arrival,
                    slot,
                });
                Admission::Displaced(std::mem::replace(&mut self.slots[slot], tr))
            }
            _ => Admission::Rejected(tr),
        }
    }

    pub fn get(&self, index: usize) -> &Transition {
        &self.slots[index]
    }

    pub fn items(&self) -> impl Iterator<Item = &Transition> + '_ {
        self.slots.iter()
    }
}

/// FIFO + curiosity-priority store.
#[derive(Debug, Clone)]
pub struct HcbBuffer {
    pub fifo: FifoBuffer,
    pub curious: CuriousStore,
}

impl HcbBuffer {
    pub fn new(fifo_capacity: usize, curious_capacity: usize) -> Self {
        Self {
            fifo: FifoBuffer::new(fifo_capacity),
            curious: CuriousStore::new(curious_capacity),
        }
    }

    /// Inserts into both parts. Returns the item displaced from the curious
    /// store, if the arrival displaced one.
    pub fn push(&mut self, tr: Transition) -> Option<Transition> {
        self.fifo.push(tr.clone());
        match self.curious.offer(tr) {
            Admission::Displaced(old) => Some(old),
            Admission::Stored | Admission::Rejected(_) => None,
        }
    }
}

impl ReplayBuffer for HcbBuffer {
    fn kind(&self) -> BufferKind {
        BufferKind::Hcb
    }

    fn capacity(&self) -> usize {
        self.fifo.capacity() + self.curious.capacity()
    }

    fn len(&self) -> usize {
        self.fifo.len() + self.curious.len()
    }

    fn insert(&mut self, tr: Transition, _rng: &mut Rng) {
        self.fifo.push(tr.clone());
        self.curious.offer(tr);
    }

    fn get(&self, index: usize) -> &Transition {
        let split = self.fifo.len();
        if index < split {
            self.fifo.get(index)
        } else {
            self.curious.get(index - split)
        }
    }

    fn iter(&self) -> Box<dyn Iterator<Item = &Transition> + '_> {
        Box::new(self.fifo.items().chain(self.curious.items()))
    }

    fn long_term_iter(&self) -> Box<dyn Iterator<Item = &Transition> + '_> {
        Box::new(self.curious.items())
    }
}

#[cfg(test)]
mod tests {
    use super::super::test_util::tr_c;
    use super::*;

    fn priorities(store: &CuriousStore) -> Vec<f64> {
        let mut p: Vec<f64> = store.items().map(|t| t.curiosity_at_insert).collect();
        p.sort_by(f64::total_cmp);
        p
    }

    #[test]
    fn evicts_minimum() {
        let mut store = CuriousStore::new(2);
        store.offer(tr_c(0, 0.5));
        store.offer(tr_c(1, 0.9));
        let Admission::Displaced(out) = store.offer(tr_c(2, 0.7)) else {
            panic!("expected an eviction")
        };
        assert_eq!(out.curiosity_at_insert, 0.5);
        assert_eq!(priorities(&store), vec![0.7, 0.9]);
    }

    #[test]
    fn tie_keeps_incumbent() {
        let mut store = CuriousStore::new(2);
        store.offer(tr_c(0, 0.5));
        store.offer(tr_c(1, 0.9));
        assert_eq!(store.offer(tr_c(2, 0.5)), Admission::Rejected(tr_c(2, 0.5)));
        let held: Vec<u64> = store.items().map(|t| t.timestep).collect();
        assert!(held.contains(&0) && held.contains(&1));
    }

    #[test]
    fn equal_priorities_fill_then_freeze() {
        let mut buf = HcbBuffer::new(5, 10);
        for t in 0..100 {
            buf.push(tr_c(t, 1.0));
        }
        let mut curious: Vec<u64> = buf.curious.items().map(|t| t.timestep).collect();
        curious.sort_unstable();
        assert_eq!(curious, (0..10).collect::<Vec<_>>());
        let fifo: Vec<u64> = buf.fifo.items().map(|t| t.timestep).collect();
        assert_eq!(fifo, (95..100).collect::<Vec<_>>());
    }

    #[test]
    fn push_reports_displaced_item_only() {
        let mut buf = HcbBuffer::new(1, 1);
        assert!(buf.push(tr_c(0, 0.3)).is_none());
        assert!(buf.push(tr_c(1, 0.1)).is_none());
        assert_eq!(buf.push(tr_c(2, 0.8)).unwrap().timestep, 0);
    }

    #[test]
    fn min_priority_tracks_heap() {
        let mut store = CuriousStore::new(3);
        assert_eq!(store.min_priority(), None);
        for (t, p) in [0.4, 0.2, 0.6, 0.9, 0.1].into_iter().enumerate() {
            store.offer(tr_c(t as u64, p));
        }
        assert_eq!(store.min_priority(), Some(0.4));
        assert_eq!(priorities(&store), vec![0.4, 0.6, 0.9]);
    }
}
