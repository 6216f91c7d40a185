use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_ANGULAR_RATE: f64 = 1e-4;

/// How the environment parameter evolves with the global step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum TaskSchedule {
    /// Holds `values[i]` from `change_steps[i]` until the next change.
    Piecewise {
        change_steps: Vec<u64>,
        values: Vec<f64>,
    },
    /// `param_min + sin(angular_rate · t) · (param_max − param_min)`,
    /// optionally clamped into `[param_min, param_max]`.
    Sinusoidal {
        param_min: f64,
        param_max: f64,
        #[serde(default = "default_rate")]
        angular_rate: f64,
        #[serde(default = "default_clamp")]
        clamp: bool,
    },
}

fn default_rate() -> f64 {
    DEFAULT_ANGULAR_RATE
}

fn default_clamp() -> bool {
    true
}

impl Default for TaskSchedule {
    fn default() -> Self {
        Self::prolonged_pendulum()
    }
}

impl TaskSchedule {
    /// Three long tasks without revisits: lengths 1.0, 1.4, 1.8 starting at
    /// steps 0, 20 000 and 120 000.
    pub fn prolonged_pendulum() -> Self {
        TaskSchedule::Piecewise {
            change_steps: vec![0, 20_000, 120_000],
            values: vec![1.0, 1.4, 1.8],
        }
    }

    /// Slow drift between lengths 1.0 and 1.8.
    pub fn drifting_pendulum() -> Self {
        TaskSchedule::Sinusoidal {
            param_min: 1.0,
            param_max: 1.8,
            angular_rate: DEFAULT_ANGULAR_RATE,
            clamp: true,
        }
    }

    /// Short, frequent revisits of three lengths.
    pub fn revisiting_pendulum() -> Self {
        TaskSchedule::Piecewise {
            change_steps: vec![
                0, 32_275, 37_275, 56_602, 61_602, 81_694, 86_694, 105_977, 110_977, 118_155, 123_155,
                141_158, 146_158,
            ],
            values: vec![1.4, 1.0, 1.4, 1.8, 1.4, 1.0, 1.4, 1.0, 1.4, 1.8, 1.4, 1.8, 1.4],
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            TaskSchedule::Piecewise {
                change_steps,
                values,
            } => {
                if change_steps.is_empty() {
                    return Err(Error::ConfigInvalid("schedule.change_steps must not be empty".into()));
                }
                if change_steps[0] != 0 {
                    return Err(Error::ConfigInvalid("schedule.change_steps must start at 0".into()));
                }
                if change_steps.windows(2).any(|w| w[0] >= w[1]) {
                    return Err(Error::ConfigInvalid(
                        "schedule.change_steps must be strictly increasing".into(),
                    ));
                }
                if values.len() != change_steps.len() {
                    return Err(Error::ConfigInvalid(format!(
                        "schedule.values has {} entries but change_steps has {}",
                        values.len(),
                        change_steps.len()
                    )));
                }
                if values.iter().any(|v| !v.is_finite()) {
                    return Err(Error::ConfigInvalid("schedule.values must be finite".into()));
                }
            }
            TaskSchedule::Sinusoidal {
                param_min,
                param_max,
                angular_rate,
                ..
            } => {
                if !(param_min < param_max) {
                    return Err(Error::ConfigInvalid(
                        "schedule.param_min must be less than schedule.param_max".into(),
                    ));
                }
                if !angular_rate.is_finite() {
                    return Err(Error::ConfigInvalid("schedule.angular_rate must be finite".into()));
                }
            }
        }
        Ok(())
    }

    /// Parameter value in force at global step `t`.
    pub fn param(&self, t: u64) -> f64 {
        match self {
            TaskSchedule::Piecewise { values, .. } => values[self.segment(t)],
            TaskSchedule::Sinusoidal {
                param_min,
                param_max,
                angular_rate,
                clamp,
            } => {
                let raw = param_min + (t as f64 * angular_rate).sin() * (param_max - param_min);
                if *clamp {
                    raw.clamp(*param_min, *param_max)
                } else {
                    raw
                }
            }
        }
    }

    /// Index of the piecewise segment active at `t`; always 0 for sinusoidal
    /// schedules.
    pub fn segment(&self, t: u64) -> usize {
        match self {
            TaskSchedule::Piecewise { change_steps, .. } => {
                change_steps.partition_point(|&s| s <= t).saturating_sub(1)
            }
            TaskSchedule::Sinusoidal { .. } => 0,
        }
    }

    /// Ground-truth task label at `t`.
    ///
    /// With `reference_values` (the evaluation tasks) the label is the index
    /// of the reference value nearest to `param(t)`, ties to the lower index.
    /// Without references a piecewise schedule labels each distinct value by
    /// its rank in ascending order, so revisited tasks share a label, and a
    /// sinusoidal schedule labels everything 0.
    pub fn true_label(&self, t: u64, reference_values: &[f64]) -> u32 {
        let p = self.param(t);
        if !reference_values.is_empty() {
            return nearest_index(reference_values, p) as u32;
        }
        match self {
            TaskSchedule::Piecewise { values, .. } => {
                let mut distinct: Vec<f64> = values.clone();
                distinct.sort_by(f64::total_cmp);
                distinct.dedup();
                nearest_index(&distinct, p) as u32
            }
            TaskSchedule::Sinusoidal { .. } => 0,
        }
    }

    /// Steps at which the active piecewise segment changes (excluding 0).
    pub fn change_points(&self) -> Vec<u64> {
        match self {
            TaskSchedule::Piecewise { change_steps, .. } => {
                change_steps.iter().copied().filter(|&s| s > 0).collect()
            }
            TaskSchedule::Sinusoidal { .. } => Vec::new(),
        }
    }
}

fn nearest_index(values: &[f64], p: f64) -> usize {
    let mut best = 0;
    for (i, v) in values.iter().enumerate() {
        if (v - p).abs() < (values[best] - p).abs() {
            best = i;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn piecewise_lookup() {
        let s = TaskSchedule::prolonged_pendulum();
        assert_eq!(s.param(50_000), 1.4);
        assert_eq!(s.param(0), 1.0);
        assert_eq!(s.param(19_999), 1.0);
        assert_eq!(s.param(20_000), 1.4);
        assert_eq!(s.param(10_000_000), 1.8);
    }

    #[test]
    fn sinusoidal_endpoints() {
        let s = TaskSchedule::drifting_pendulum();
        assert_eq!(s.param(0), 1.0);
        // 15708 · 1e-4 ≈ π/2
        assert!((s.param(15_708) - 1.8).abs() < 1e-9);
    }

    #[test]
    fn sinusoidal_clamp_and_raw() {
        let t = 40_000; // sin(4) < 0
        let clamped = TaskSchedule::drifting_pendulum();
        assert_eq!(clamped.param(t), 1.0);
        let raw = TaskSchedule::Sinusoidal {
            param_min: 1.0,
            param_max: 1.8,
            angular_rate: DEFAULT_ANGULAR_RATE,
            clamp: false,
        };
        let expected = 1.0 + 4f64.sin() * 0.8;
        assert!((raw.param(t) - expected).abs() < 1e-12);
        assert!(raw.param(t) < 1.0);
    }

    #[test]
    fn labels() {
        let s = TaskSchedule::prolonged_pendulum();
        assert_eq!(s.true_label(0, &[]), 0);
        assert_eq!(s.true_label(20_000, &[]), 1);
        assert_eq!(s.true_label(130_000, &[1.0, 1.4, 1.8]), 2);

        let revisit = TaskSchedule::revisiting_pendulum();
        assert_eq!(revisit.param(33_000), 1.0);
        assert_eq!(revisit.true_label(33_000, &[1.0, 1.4, 1.8]), 0);
        assert_eq!(revisit.true_label(33_000, &[]), 0);
        assert_eq!(revisit.true_label(0, &[]), 1);
        assert_eq!(revisit.true_label(60_000, &[]), 2);
    }

    #[test]
    fn sinusoidal_label_nearest() {
        // Find a step where l(t) ≈ 1.39 and check it buckets to 1.4.
        let s = TaskSchedule::drifting_pendulum();
        let t = ((0.39f64 / 0.8).asin() / DEFAULT_ANGULAR_RATE).round() as u64;
        assert!((s.param(t) - 1.39).abs() < 1e-3);
        assert_eq!(s.true_label(t, &[1.0, 1.4, 1.8]), 1);
        assert_eq!(s.true_label(t, &[]), 0);
    }

    #[test]
    fn right_continuous_piecewise() {
        let s = TaskSchedule::revisiting_pendulum();
        if let TaskSchedule::Piecewise {
            change_steps,
            values,
        } = &s
        {
            for (i, &c) in change_steps.iter().enumerate() {
                assert_eq!(s.param(c), values[i]);
                if c > 0 {
                    assert_eq!(s.param(c - 1), values[i - 1]);
                }
            }
        }
    }

    #[test]
    fn validation() {
        assert!(TaskSchedule::prolonged_pendulum().validate().is_ok());
        assert!(TaskSchedule::revisiting_pendulum().validate().is_ok());
        let bad = TaskSchedule::Piecewise {
            change_steps: vec![5, 10],
            values: vec![1.0, 1.4],
        };
        assert!(bad.validate().is_err());
        let bad = TaskSchedule::Piecewise {
            change_steps: vec![0, 10, 10],
            values: vec![1.0, 1.4, 1.8],
        };
        assert!(bad.validate().is_err());
        let bad = TaskSchedule::Sinusoidal {
            param_min: 1.8,
            param_max: 1.0,
            angular_rate: 1e-4,
            clamp: true,
        };
        assert!(bad.validate().is_err());
    }
}
