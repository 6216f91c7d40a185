use super::{BufferKind, FifoBuffer, ReplayBuffer};
use crate::error::{Error, Result};
use crate::rng::Rng;
use crate::transition::Transition;

/// Multi-timescale replay: a chain of FIFO sub-buffers. New items enter the
/// first; an item pushed out of sub-buffer `i` moves on to `i + 1` with
/// probability `β` and is dropped otherwise. The last sub-buffer always
/// drops. Item lifetimes end up roughly power-law distributed.
#[derive(Debug, Clone)]
pub struct MtrBuffer {
    stages: Vec<FifoBuffer>,
    promotion: f64,
    capacity: usize,
}

impl MtrBuffer {
    /// `capacity / sub_buffers` slots per stage; the remainder goes to the
    /// first stage.
    pub fn new(capacity: usize, sub_buffers: usize, promotion: f64) -> Result<Self> {
        if sub_buffers == 0 || sub_buffers > capacity {
            return Err(Error::ConfigInvalid(format!(
                "buffer.mtr.sub_buffers must be in 1..={capacity}, got {sub_buffers}"
            )));
        }
        if !(0.0..=1.0).contains(&promotion) {
            return Err(Error::ConfigInvalid(format!(
                "buffer.mtr.promotion_probability must be in [0, 1], got {promotion}"
            )));
        }
        let base = capacity / sub_buffers;
        let rem = capacity % sub_buffers;
        let stages = (0..sub_buffers)
            .map(|i| FifoBuffer::new(if i == 0 { base + rem } else { base }))
            .collect();
        Ok(Self {
            stages,
            promotion,
            capacity,
        })
    }

    pub fn stages(&self) -> &[FifoBuffer] {
        &self.stages
    }

    /// Inserts `tr` and returns the item that left the chain, if any.
    pub fn push(&mut self, tr: Transition, rng: &mut Rng) -> Option<Transition> {
        let last = self.stages.len() - 1;
        let mut carry = tr;
        for (i, stage) in self.stages.iter_mut().enumerate() {
            let evicted = stage.push(carry)?;
            if i == last || !rng.bernoulli(self.promotion) {
                return Some(evicted);
            }
            carry = evicted;
        }
        unreachable!("the last stage always returns")
    }
}

impl ReplayBuffer for MtrBuffer {
    fn kind(&self) -> BufferKind {
        BufferKind::Mtr
    }

    fn capacity(&self) -> usize {
        self.capacity
    }

    fn len(&self) -> usize {
        self.stages.iter().map(FifoBuffer::len).sum()
    }

    fn insert(&mut self, tr: Transition, rng: &mut Rng) {
        self.push(tr, rng);
    }

    fn get(&self, mut index: usize) -> &Transition {
        for stage in &self.stages {
            if index < stage.len() {
                return stage.get(index);
            }
            index -= stage.len();
        }
        panic!("index out of range for MTR buffer")
    }

    fn iter(&self) -> Box<dyn Iterator<Item = &Transition> + '_> {
        Box::new(self.stages.iter().flat_map(FifoBuffer::items))
    }
}

#[cfg(test)]
mod tests {
    use super::super::test_util::tr;
    use super::*;

    #[test]
    fn capacities_with_remainder() {
        let buf = MtrBuffer::new(23, 5, 0.5).unwrap();
        let caps: Vec<usize> = buf.stages().iter().map(FifoBuffer::capacity).collect();
        assert_eq!(caps, vec![7, 4, 4, 4, 4]);
        assert!(MtrBuffer::new(10, 0, 0.5).is_err());
        assert!(MtrBuffer::new(10, 11, 0.5).is_err());
        assert!(MtrBuffer::new(10, 2, 1.5).is_err());
    }

    #[test]
    fn single_stage_is_fifo() {
        let mut rng = Rng::new(0);
        let mut mtr = MtrBuffer::new(50, 1, 0.5).unwrap();
        let mut fifo = FifoBuffer::new(50);
        for t in 0..500 {
            let a = mtr.push(tr(t, 0), &mut rng).map(|x| x.timestep);
            let b = fifo.push(tr(t, 0)).map(|x| x.timestep);
            assert_eq!(a, b);
        }
        let got: Vec<u64> = mtr.iter().map(|t| t.timestep).collect();
        let want: Vec<u64> = fifo.items().map(|t| t.timestep).collect();
        assert_eq!(got, want);
    }

    #[test]
    fn zero_promotion_never_reaches_second_stage() {
        let mut rng = Rng::new(1);
        let mut mtr = MtrBuffer::new(50, 5, 0.0).unwrap();
        for t in 0..1000 {
            mtr.push(tr(t, 0), &mut rng);
        }
        let first: Vec<u64> = mtr.stages()[0].items().map(|t| t.timestep).collect();
        assert_eq!(first, (990..1000).collect::<Vec<_>>());
        assert!(mtr.stages()[1..].iter().all(FifoBuffer::is_empty));
    }

    #[test]
    fn full_promotion_fills_chain_in_order() {
        let mut rng = Rng::new(2);
        let mut mtr = MtrBuffer::new(20, 4, 1.0).unwrap();
        for t in 0..100 {
            mtr.push(tr(t, 0), &mut rng);
        }
        let all: Vec<u64> = mtr.iter().map(|t| t.timestep).collect();
        let mut expected: Vec<u64> = (80..100).collect();
        expected.sort_unstable_by(|a, b| b.cmp(a));
        // stage 0 holds the newest five, stage 3 the oldest five
        let mut got = all.clone();
        got.sort_unstable_by(|a, b| b.cmp(a));
        assert_eq!(got, expected);
        let oldest: Vec<u64> = mtr.stages()[3].items().map(|t| t.timestep).collect();
        assert_eq!(oldest, vec![80, 81, 82, 83, 84]);
    }
}
