//! Replay buffers behind one insert / sample / composition contract.
//!
//! | kind        | layout                                                     |
//! |-------------|------------------------------------------------------------|
//! | `fifo`      | one FIFO of capacity `N`                                   |
//! | `reservoir` | one uniform reservoir of capacity `N`                      |
//! | `hrb`       | FIFO `⌊f·N⌋` + reservoir `N − ⌊f·N⌋`                        |
//! | `mtr`       | chain of `B` FIFOs with promotion probability `β`          |
//! | `hcb`       | FIFO `⌊f·N⌋` + curiosity-priority store `N − ⌊f·N⌋`         |
//! | `hrbts`     | FIFO `⌊f·N⌋` + one reservoir per detected task              |
//!
//! In the hybrid kinds every new transition is offered to both parts
//! independently; items leaving the FIFO are dropped, not recycled.
//! Sampling is uniform with replacement over everything stored.

mod fifo;
mod hcb;
mod hrbts;
mod mtr;
mod reservoir;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use fifo::FifoBuffer;
pub use hcb::{Admission, CuriousStore, HcbBuffer};
pub use hrbts::{split_capacity, HrbtsBuffer};
pub use mtr::MtrBuffer;
pub use reservoir::ReservoirBuffer;

use crate::error::{Error, Result};
use crate::rng::Rng;
use crate::transition::Transition;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BufferKind {
    Fifo,
    Reservoir,
    Hrb,
    Mtr,
    Hcb,
    Hrbts,
}

impl BufferKind {
    pub const ALL: [BufferKind; 6] = [
        BufferKind::Fifo,
        BufferKind::Reservoir,
        BufferKind::Hrb,
        BufferKind::Mtr,
        BufferKind::Hcb,
        BufferKind::Hrbts,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            BufferKind::Fifo => "fifo",
            BufferKind::Reservoir => "reservoir",
            BufferKind::Hrb => "hrb",
            BufferKind::Mtr => "mtr",
            BufferKind::Hcb => "hcb",
            BufferKind::Hrbts => "hrbts",
        }
    }

    /// Whether the policy needs a curiosity value on every transition.
    pub fn uses_curiosity(self) -> bool {
        matches!(self, BufferKind::Hcb)
    }
}

impl fmt::Display for BufferKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for BufferKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        BufferKind::ALL
            .into_iter()
            .find(|k| k.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::ConfigInvalid(format!("unknown buffer kind `{s}`")))
    }
}

/// Count and share of one task label.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TaskShare {
    pub count: usize,
    pub ratio: f64,
}

pub type Composition = BTreeMap<u32, TaskShare>;

/// Per-label counts and ratios. This is the only consumer of the
/// ground-truth task label.
pub fn composition<'a>(items: impl Iterator<Item = &'a Transition>) -> Composition {
    let mut counts: BTreeMap<u32, usize> = BTreeMap::new();
    let mut total = 0usize;
    for tr in items {
        *counts.entry(tr.task_label()).or_default() += 1;
        total += 1;
    }
    counts
        .into_iter()
        .map(|(label, count)| {
            (
                label,
                TaskShare {
                    count,
                    ratio: count as f64 / total as f64,
                },
            )
        })
        .collect()
}

pub trait ReplayBuffer {
    fn kind(&self) -> BufferKind;

    /// Total capacity `N`.
    fn capacity(&self) -> usize;

    fn len(&self) -> usize;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn insert(&mut self, tr: Transition, rng: &mut Rng);

    /// Item `index` of the union of all parts, `0 ≤ index < len()`.
    fn get(&self, index: usize) -> &Transition;

    fn iter(&self) -> Box<dyn Iterator<Item = &Transition> + '_>;

    /// Everything outside the recent-FIFO part. For `fifo` and `mtr` this is
    /// the whole buffer.
    fn long_term_iter(&self) -> Box<dyn Iterator<Item = &Transition> + '_> {
        self.iter()
    }

    /// Notifies the buffer of a hypothesised task boundary. Only `hrbts`
    /// reacts.
    fn on_task_boundary(&mut self, _rng: &mut Rng) {}

    fn composition(&self) -> Composition {
        composition(self.iter())
    }

    fn long_term_composition(&self) -> Composition {
        composition(self.long_term_iter())
    }
}

/// Lets a caller lend a buffer to a run and inspect it afterwards.
impl<B: ReplayBuffer + ?Sized> ReplayBuffer for &mut B {
    fn kind(&self) -> BufferKind {
        (**self).kind()
    }

    fn capacity(&self) -> usize {
        (**self).capacity()
    }

    fn len(&self) -> usize {
        (**self).len()
    }

    fn insert(&mut self, tr: Transition, rng: &mut Rng) {
        (**self).insert(tr, rng)
    }

    fn get(&self, index: usize) -> &Transition {
        (**self).get(index)
    }

    fn iter(&self) -> Box<dyn Iterator<Item = &Transition> + '_> {
        (**self).iter()
    }

    fn long_term_iter(&self) -> Box<dyn Iterator<Item = &Transition> + '_> {
        (**self).long_term_iter()
    }

    fn on_task_boundary(&mut self, rng: &mut Rng) {
        (**self).on_task_boundary(rng)
    }
}

/// Uniform sampling with replacement over all stored items.
pub fn sample<'a>(buf: &'a dyn ReplayBuffer, batch_size: usize, rng: &mut Rng) -> Result<Vec<&'a Transition>> {
    if batch_size == 0 {
        return Ok(Vec::new());
    }
    let len = buf.len();
    if len == 0 {
        return Err(Error::EmptyBuffer);
    }
    Ok((0..batch_size).map(|_| buf.get(rng.below(len))).collect())
}

/// Number of slots given to the recent-FIFO part, `⌊f·N⌋`.
pub fn fifo_share(capacity: usize, fifo_fraction: f64) -> usize {
    (fifo_fraction * capacity as f64).floor() as usize
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BufferSpec {
    pub kind: BufferKind,
    pub capacity: usize,
    pub fifo_fraction: f64,
    pub mtr_sub_buffers: usize,
    pub mtr_promotion: f64,
}

impl BufferSpec {
    pub fn new(kind: BufferKind, capacity: usize) -> Self {
        Self {
            kind,
            capacity,
            fifo_fraction: 0.05,
            mtr_sub_buffers: 5,
            mtr_promotion: 0.5,
        }
    }

    pub fn build(&self) -> Result<Box<dyn ReplayBuffer>> {
        if self.capacity == 0 {
            return Err(Error::ConfigInvalid("buffer.size must be positive".into()));
        }
        if !(0.0..1.0).contains(&self.fifo_fraction) {
            return Err(Error::ConfigInvalid(format!(
                "buffer.fifo_fraction must lie in [0, 1), got {}",
                self.fifo_fraction
            )));
        }
        let fifo = fifo_share(self.capacity, self.fifo_fraction);
        let rest = self.capacity - fifo;
        Ok(match self.kind {
            BufferKind::Fifo => Box::new(FifoBuffer::new(self.capacity)),
            BufferKind::Reservoir => Box::new(ReservoirBuffer::new(self.capacity)),
            BufferKind::Hrb => Box::new(HybridReservoirBuffer::new(fifo, rest)),
            BufferKind::Mtr => Box::new(MtrBuffer::new(
                self.capacity,
                self.mtr_sub_buffers,
                self.mtr_promotion,
            )?),
            BufferKind::Hcb => Box::new(HcbBuffer::new(fifo, rest)),
            BufferKind::Hrbts => Box::new(HrbtsBuffer::new(fifo, rest)),
        })
    }
}

/// FIFO + uniform reservoir.
#[derive(Debug, Clone)]
pub struct HybridReservoirBuffer {
    pub fifo: FifoBuffer,
    pub reservoir: ReservoirBuffer,
}

impl HybridReservoirBuffer {
    pub fn new(fifo_capacity: usize, reservoir_capacity: usize) -> Self {
        Self {
            fifo: FifoBuffer::new(fifo_capacity),
            reservoir: ReservoirBuffer::new(reservoir_capacity),
        }
    }
}

impl ReplayBuffer for HybridReservoirBuffer {
    fn kind(&self) -> BufferKind {
        BufferKind::Hrb
    }

    fn capacity(&self) -> usize {
        self.fifo.capacity() + self.reservoir.capacity()
    }

    fn len(&self) -> usize {
        self.fifo.len() + self.reservoir.len()
    }

    fn insert(&mut self, tr: Transition, rng: &mut Rng) {
        self.reservoir.offer(tr.clone(), rng);
        self.fifo.push(tr);
    }

    fn get(&self, index: usize) -> &Transition {
        let split = self.fifo.len();
        if index < split {
            self.fifo.get(index)
        } else {
            self.reservoir.get(index - split)
        }
    }

    fn iter(&self) -> Box<dyn Iterator<Item = &Transition> + '_> {
        Box::new(self.fifo.items().chain(self.reservoir.items()))
    }

    fn long_term_iter(&self) -> Box<dyn Iterator<Item = &Transition> + '_> {
        Box::new(self.reservoir.items())
    }
}
