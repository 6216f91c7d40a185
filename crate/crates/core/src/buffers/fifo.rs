use std::collections::VecDeque;

use super::{BufferKind, ReplayBuffer};
use crate::rng::Rng;
use crate::transition::Transition;

#[derive(Debug, Clone)]
pub struct FifoBuffer {
    items: VecDeque<Transition>,
    capacity: usize,
}

impl FifoBuffer {
    pub fn new(capacity: usize) -> Self {
        Self {
            items: VecDeque::with_capacity(capacity.min(1 << 20)),
            capacity,
        }
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    /// Appends `tr` and returns the oldest item if that overflowed the
    /// buffer. A zero-capacity FIFO hands `tr` straight back.
    pub fn push(&mut self, tr: Transition) -> Option<Transition> {
        if self.capacity == 0 {
            return Some(tr);
        }
        self.items.push_back(tr);
        if self.items.len() > self.capacity {
            self.items.pop_front()
        } else {
            None
        }
    }

    /// Oldest first.
    pub fn get(&self, index: usize) -> &Transition {
        &self.items[index]
    }

    pub fn items(&self) -> impl Iterator<Item = &Transition> + '_ {
        self.items.iter()
    }
}

impl ReplayBuffer for FifoBuffer {
    fn kind(&self) -> BufferKind {
        BufferKind::Fifo
    }

    fn capacity(&self) -> usize {
        self.capacity
    }

    fn len(&self) -> usize {
        self.items.len()
    }

    fn insert(&mut self, tr: Transition, _rng: &mut Rng) {
        self.push(tr);
    }

    fn get(&self, index: usize) -> &Transition {
        &self.items[index]
    }

    fn iter(&self) -> Box<dyn Iterator<Item = &Transition> + '_> {
        Box::new(self.items.iter())
    }
}
