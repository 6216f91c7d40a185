//! Experience replay for continual reinforcement learning.
//!
//! The crate pairs a set of replay buffers (FIFO, reservoir, hybrid
//! reservoir, multi-timescale, curiosity-prioritised and task-split
//! reservoir) with a curiosity estimator whose output drives a task
//! boundary detector. A soft actor-critic learner on a pendulum with a
//! scheduled pole length closes the loop, and [`harness`] runs whole
//! experiments and writes their metrics as CSV.
//!
//! ```
//! use replaykit::buffers::{BufferKind, BufferSpec};
//! use replaykit::rng::Rng;
//! use replaykit::transition::Transition;
//!
//! let mut rng = Rng::new(7);
//! let mut buffer = BufferSpec::new(BufferKind::Reservoir, 100).build().unwrap();
//! for t in 0..1000 {
//!     let tr = Transition::new(vec![0.0], vec![0.0], 0.0, vec![0.0], false, t, 0);
//!     buffer.insert(tr, &mut rng);
//! }
//! assert_eq!(buffer.len(), 100);
//! ```

pub mod buffers;
pub mod config;
pub mod curiosity;
pub mod detector;
pub mod env;
pub mod error;
pub mod harness;
pub mod learner;
pub mod metrics;
pub mod nn;
pub mod rng;
pub mod transition;

pub use error::{Error, Result};
