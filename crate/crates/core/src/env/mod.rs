//! Nonstationary classic-control pendulum and the task schedules that drive
//! its pole length.

mod pendulum;
mod schedule;

pub use pendulum::{reset, step, wrap_angle, EnvParams, Pendulum, PendulumState, StepOutcome, MAX_SPEED, MAX_TORQUE};
pub use schedule::{TaskSchedule, DEFAULT_ANGULAR_RATE};
