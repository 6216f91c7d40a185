use super::{BufferKind, FifoBuffer, ReplayBuffer, ReservoirBuffer};
use crate::rng::Rng;
use crate::transition::Transition;

/// Splits `total` slots over `parts` sub-reservoirs: `⌊total/parts⌋` each,
/// with the remainder going one apiece to the lowest indices.
pub fn split_capacity(total: usize, parts: usize) -> Vec<usize> {
    let base = total / parts;
    let rem = total % parts;
    (0..parts).map(|i| base + usize::from(i < rem)).collect()
}

/// FIFO + one reservoir per hypothesised task. Each detected boundary opens a
/// fresh sub-reservoir and shrinks the existing ones, by uniform random
/// discards, so that all sub-reservoirs share the space equally.
#[derive(Debug, Clone)]
pub struct HrbtsBuffer {
    pub fifo: FifoBuffer,
    tasks: Vec<ReservoirBuffer>,
    reservoir_capacity: usize,
}

impl HrbtsBuffer {
    pub fn new(fifo_capacity: usize, reservoir_capacity: usize) -> Self {
        Self {
            fifo: FifoBuffer::new(fifo_capacity),
            tasks: vec![ReservoirBuffer::new(reservoir_capacity)],
            reservoir_capacity,
        }
    }

    pub fn task_count(&self) -> usize {
        self.tasks.len()
    }

    pub fn current_task(&self) -> usize {
        self.tasks.len() - 1
    }

    pub fn sub_reservoirs(&self) -> &[ReservoirBuffer] {
        &self.tasks
    }

    pub fn sub_capacities(&self) -> Vec<usize> {
        self.tasks.iter().map(ReservoirBuffer::capacity).collect()
    }

    /// Opens a new sub-reservoir and rebalances capacities.
    pub fn open_task(&mut self, rng: &mut Rng) {
        let caps = split_capacity(self.reservoir_capacity, self.tasks.len() + 1);
        for (sub, &cap) in self.tasks.iter_mut().zip(&caps) {
            sub.resize(cap, rng);
        }
        self.tasks.push(ReservoirBuffer::new(*caps.last().unwrap()));
    }

    pub fn push(&mut self, tr: Transition, rng: &mut Rng) {
        self.tasks
            .last_mut()
            .expect("at least one sub-reservoir")
            .offer(tr.clone(), rng);
        self.fifo.push(tr);
    }
}

impl ReplayBuffer for HrbtsBuffer {
    fn kind(&self) -> BufferKind {
        BufferKind::Hrbts
    }

    fn capacity(&self) -> usize {
        self.fifo.capacity() + self.reservoir_capacity
    }

    fn len(&self) -> usize {
        self.fifo.len() + self.tasks.iter().map(ReservoirBuffer::len).sum::<usize>()
    }

    fn insert(&mut self, tr: Transition, rng: &mut Rng) {
        self.push(tr, rng);
    }

    fn get(&self, index: usize) -> &Transition {
        if index < self.fifo.len() {
            return self.fifo.get(index);
        }
        let mut index = index - self.fifo.len();
        for sub in &self.tasks {
            if index < sub.len() {
                return sub.get(index);
            }
            index -= sub.len();
        }
        panic!("index out of range for HRBTS buffer")
    }

    fn iter(&self) -> Box<dyn Iterator<Item = &Transition> + '_> {
        Box::new(self.fifo.items().chain(self.long_term_items()))
    }

    fn long_term_iter(&self) -> Box<dyn Iterator<Item = &Transition> + '_> {
        Box::new(self.long_term_items())
    }

    fn on_task_boundary(&mut self, rng: &mut Rng) {
        self.open_task(rng);
    }
}

impl HrbtsBuffer {
    fn long_term_items(&self) -> impl Iterator<Item = &Transition> + '_ {
        self.tasks.iter().flat_map(ReservoirBuffer::items)
    }
}

#[cfg(test)]
mod tests {
    use super::super::test_util::tr;
    use super::*;

    #[test]
    fn capacity_splits() {
        assert_eq!(split_capacity(90, 2), vec![45, 45]);
        assert_eq!(split_capacity(90, 4), vec![23, 23, 22, 22]);
        assert_eq!(split_capacity(19_000, 3), vec![6334, 6333, 6333]);
    }

    #[test]
    fn boundaries_rebalance() {
        let mut rng = Rng::new(0);
        let mut buf = HrbtsBuffer::new(10, 90);
        for t in 0..500 {
            buf.push(tr(t, 0), &mut rng);
        }
        for _ in 0..3 {
            buf.open_task(&mut rng);
        }
        assert_eq!(buf.sub_capacities(), vec![23, 23, 22, 22]);
        assert_eq!(buf.sub_reservoirs()[0].len(), 23);
        assert_eq!(buf.task_count(), 4);
        for (sub, cap) in buf.sub_reservoirs().iter().zip(buf.sub_capacities()) {
            assert!(sub.len() <= cap);
        }
        let caps = buf.sub_capacities();
        assert!(caps.iter().max().unwrap() - caps.iter().min().unwrap() <= 1);
    }

    #[test]
    fn routing_after_boundary() {
        let mut rng = Rng::new(1);
        let mut buf = HrbtsBuffer::new(5, 40);
        for t in 0..100 {
            if t == 60 {
                buf.on_task_boundary(&mut rng);
            }
            buf.push(tr(t, 0), &mut rng);
        }
        assert!(buf.sub_reservoirs()[0].items().all(|t| t.timestep < 60));
        assert!(buf.sub_reservoirs()[1].items().all(|t| t.timestep >= 60));
        assert_eq!(buf.sub_reservoirs()[1].seen(), 40);
    }

    #[test]
    fn single_task_matches_hrb() {
        let mut a_rng = Rng::new(9);
        let mut b_rng = Rng::new(9);
        let mut hrbts = HrbtsBuffer::new(7, 60);
        let mut hrb = super::super::HybridReservoirBuffer::new(7, 60);
        for t in 0..3000 {
            hrbts.insert(tr(t, 0), &mut a_rng);
            hrb.insert(tr(t, 0), &mut b_rng);
        }
        let a: Vec<u64> = hrbts.iter().map(|t| t.timestep).collect();
        let b: Vec<u64> = hrb.iter().map(|t| t.timestep).collect();
        assert_eq!(a, b);
    }
}
