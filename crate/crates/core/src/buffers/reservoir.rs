use super::{BufferKind, ReplayBuffer};
use crate::rng::Rng;
use crate::transition::Transition;

/// Uniform reservoir (Vitter's Algorithm R): after `n` offers every offered
/// item is held with probability `min(1, m/n)`.
#[derive(Debug, Clone)]
pub struct ReservoirBuffer {
    slots: Vec<Transition>,
    capacity: usize,
    seen: u64,
}

impl ReservoirBuffer {
    pub fn new(capacity: usize) -> Self {
        Self {
            slots: Vec::with_capacity(capacity.min(1 << 20)),
            capacity,
            seen: 0,
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

    /// Items offered so far.
    pub fn seen(&self) -> u64 {
        self.seen
    }

    /// Returns whether `tr` was stored.
    pub fn offer(&mut self, tr: Transition, rng: &mut Rng) -> bool {
        self.seen += 1;
        if self.slots.len() < self.capacity {
            self.slots.push(tr);
            return true;
        }
        let j = rng.below_u64(self.seen);
        if j < self.capacity as u64 {
            self.slots[j as usize] = tr;
            true
        } else {
            false
        }
    }

    /// Shrinks to `capacity` by discarding uniformly chosen items. Growing
    /// only raises the limit.
    pub fn resize(&mut self, capacity: usize, rng: &mut Rng) {
        while self.slots.len() > capacity {
            let victim = rng.below(self.slots.len());
            self.slots.swap_remove(victim);
        }
        self.capacity = capacity;
    }

    pub fn get(&self, index: usize) -> &Transition {
        &self.slots[index]
    }

    pub fn items(&self) -> impl Iterator<Item = &Transition> + '_ {
        self.slots.iter()
    }
}

impl ReplayBuffer for ReservoirBuffer {
    fn kind(&self) -> BufferKind {
        BufferKind::Reservoir
    }

    fn capacity(&self) -> usize {
        self.capacity
    }

    fn len(&self) -> usize {
        self.slots.len()
    }

    fn insert(&mut self, tr: Transition, rng: &mut Rng) {
        self.offer(tr, rng);
    }

    fn get(&self, index: usize) -> &Transition {
        &self.slots[index]
    }

    fn iter(&self) -> Box<dyn Iterator<Item = &Transition> + '_> {
        Box::new(self.slots.iter())
    }
}

#[cfg(test)]
mod tests {
    use super::super::test_util::tr;
    use super::*;

    #[test]
    fn fill_phase_accepts_everything() {
        let mut rng = Rng::new(0);
        let mut buf = ReservoirBuffer::new(1000);
        for t in 0..1000 {
            assert!(buf.offer(tr(t, 0), &mut rng));
        }
        let mut held: Vec<u64> = buf.items().map(|t| t.timestep).collect();
        held.sort_unstable();
        assert_eq!(held, (0..1000).collect::<Vec<_>>());
        assert_eq!(buf.seen(), 1000);
    }

    #[test]
    fn full_reservoir_stays_full() {
        let mut rng = Rng::new(1);
        let mut buf = ReservoirBuffer::new(10);
        for t in 0..5000 {
            buf.offer(tr(t, 0), &mut rng);
            assert!(buf.len() <= 10);
        }
        assert_eq!(buf.len(), 10);
    }

    #[test]
    fn acceptance_rate_tracks_m_over_n() {
        // Acceptances after the fill phase sum to Σ m/n ≈ m·ln(N/m).
        let mut accepted = 0usize;
        let runs = 200;
        for seed in 0..runs {
            let mut rng = Rng::new(seed);
            let mut buf = ReservoirBuffer::new(10);
            for t in 0..1000 {
                if buf.offer(tr(t, 0), &mut rng) && t >= 10 {
                    accepted += 1;
                }
            }
        }
        let expected: f64 = (11..=1000).map(|n| 10.0 / n as f64).sum::<f64>() * runs as f64;
        let observed = accepted as f64;
        assert!((observed - expected).abs() < 4.0 * expected.sqrt(), "{observed} vs {expected}");
    }

    #[test]
    fn resize_removes_exact_count() {
        let mut rng = Rng::new(2);
        let mut buf = ReservoirBuffer::new(30);
        for t in 0..30 {
            buf.offer(tr(t, 0), &mut rng);
        }
        buf.resize(22, &mut rng);
        assert_eq!(buf.len(), 22);
        assert_eq!(buf.capacity(), 22);
        let mut held: Vec<u64> = buf.items().map(|t| t.timestep).collect();
        held.sort_unstable();
        held.dedup();
        assert_eq!(held.len(), 22);
    }
}
