//! Experiment orchestration and result files.
//!
//! One run writes, into its output directory:
//!
//! | file                         | columns                                          |
//! |------------------------------|--------------------------------------------------|
//! | `curiosity.csv`              | `t,c,mu,snr,candidate,boundary`                  |
//! | `composition.csv`            | `snapshot_t,buffer_kind,task_label,count,ratio`  |
//! | `composition_long_term.csv`  | same, restricted to the non-FIFO part            |
//! | `rewards.csv`                | `eval_t,task_label,mean_return,std_return,episodes` |
//! | `boundaries.csv`             | `t`                                              |
//! | `config.toml`                | the resolved configuration                       |

mod analyze;
mod io;
mod matrix;
mod run;

pub use analyze::{analyze_run, read_boundaries, read_composition, read_signal, RunReport};
pub use io::{read_rows, RowWriter};
pub use matrix::{
    run_matrix, run_metrics, AggregateRow, MatrixReport, RunFailure, AGGREGATE_FILE, AGGREGATE_HEADER, FAILURES_FILE,
    FAILURES_HEADER,
};
pub use run::{run_experiment, run_experiment_with, LoopEvent, RunHooks, RunSummary};

pub const CURIOSITY_FILE: &str = "curiosity.csv";
pub const COMPOSITION_FILE: &str = "composition.csv";
pub const LONG_TERM_COMPOSITION_FILE: &str = "composition_long_term.csv";
pub const REWARDS_FILE: &str = "rewards.csv";
pub const BOUNDARIES_FILE: &str = "boundaries.csv";
pub const CONFIG_FILE: &str = "config.toml";
