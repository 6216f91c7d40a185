//! Experiment configuration, loaded from TOML.
//!
//! Every key is optional; defaults reproduce the long-horizon pendulum
//! setting (three lengths, 150 000 steps, 20 000-slot buffer) with a
//! desk-scale learner. See `docs/config.md` for the full key reference.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::buffers::{BufferKind, BufferSpec};
use crate::curiosity::{CuriosityParams, CuriosityWeights};
use crate::detector::DetectorParams;
use crate::env::TaskSchedule;
use crate::error::{Error, Result};
use crate::learner::{SacParams, ScriptedPolicy};

/// Environment variable naming the default output directory.
pub const OUTPUT_DIR_ENV: &str = "REPLAYKIT_OUT";

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub env: EnvConfig,
    pub schedule: TaskSchedule,
    pub buffer: BufferConfig,
    pub detector: DetectorConfig,
    pub curiosity: CuriosityConfig,
    pub learner: LearnerConfig,
    pub harness: HarnessConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EnvConfig {
    pub max_steps_per_episode: usize,
}

impl Default for EnvConfig {
    fn default() -> Self {
        Self {
            max_steps_per_episode: 200,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BufferConfig {
    pub kind: BufferKind,
    pub size: usize,
    pub fifo_fraction: f64,
    pub mtr: MtrConfig,
}

impl Default for BufferConfig {
    fn default() -> Self {
        Self {
            kind: BufferKind::Hrbts,
            size: 20_000,
            fifo_fraction: 0.05,
            mtr: MtrConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MtrConfig {
    pub sub_buffers: usize,
    pub promotion_probability: f64,
}

impl Default for MtrConfig {
    fn default() -> Self {
        Self {
            sub_buffers: 5,
            promotion_probability: 0.5,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DetectorMode {
    /// Streaming SNR filter over the curiosity signal.
    Snr,
    /// Boundaries exactly at the schedule's change points.
    Oracle,
    /// Never fires.
    Off,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DetectorConfig {
    pub mode: DetectorMode,
    pub n: usize,
    pub k: u64,
    pub m_f: f64,
    pub delta: f64,
}

impl Default for DetectorConfig {
    fn default() -> Self {
        let p = DetectorParams::default();
        Self {
            mode: DetectorMode::Snr,
            n: p.n,
            k: p.k,
            m_f: p.m_f,
            delta: p.delta,
        }
    }
}

impl DetectorConfig {
    pub fn params(&self) -> DetectorParams {
        DetectorParams {
            n: self.n,
            k: self.k,
            m_f: self.m_f,
            delta: self.delta,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CuriosityConfig {
    pub enabled: bool,
    /// `[forward, inverse, reward]`
    pub weights: [f64; 3],
    pub ensemble_size: usize,
    pub hidden: Vec<usize>,
    pub learning_rate: f64,
    pub batch_size: usize,
    /// Defaults to 10% of the replay buffer size.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fifo_capacity: Option<usize>,
}

impl Default for CuriosityConfig {
    fn default() -> Self {
        Self {
            enabled: true,
            weights: [0.0, 1.0, 0.0],
            ensemble_size: 3,
            hidden: vec![32, 32],
            learning_rate: 3e-4,
            batch_size: 64,
            fifo_capacity: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PolicyKind {
    Sac,
    UniformRandom,
    ZeroTorque,
    EnergySwingup,
}

impl PolicyKind {
    pub fn scripted(self) -> Option<ScriptedPolicy> {
        match self {
            PolicyKind::Sac => None,
            PolicyKind::UniformRandom => Some(ScriptedPolicy::UniformRandom),
            PolicyKind::ZeroTorque => Some(ScriptedPolicy::ZeroTorque),
            PolicyKind::EnergySwingup => Some(ScriptedPolicy::EnergySwingup),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LearnerConfig {
    pub policy: PolicyKind,
    pub hidden: Vec<usize>,
    pub learning_rate: f64,
    pub batch_size: usize,
    pub gamma: f64,
    pub tau: f64,
    /// Defaults to minus the action dimension.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub entropy_target: Option<f64>,
    pub initial_alpha: f64,
    /// Random-action steps before the policy takes over and updates begin.
    pub warmup_steps: u64,
    pub updates_per_step: usize,
}

impl Default for LearnerConfig {
    fn default() -> Self {
        Self {
            policy: PolicyKind::Sac,
            hidden: vec![32, 32],
            learning_rate: 1e-3,
            batch_size: 64,
            gamma: 0.99,
            tau: 0.005,
            entropy_target: None,
            initial_alpha: 1.0,
            warmup_steps: 1000,
            updates_per_step: 1,
        }
    }
}

impl LearnerConfig {
    pub fn sac_params(&self) -> SacParams {
        SacParams {
            hidden: self.hidden.clone(),
            learning_rate: self.learning_rate,
            gamma: self.gamma,
            tau: self.tau,
            entropy_target: self.entropy_target,
            initial_alpha: self.initial_alpha,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HarnessConfig {
    pub total_steps: u64,
    pub seed: u64,
    pub eval_tasks: Vec<f64>,
    /// Evaluate every this many steps; 0 disables evaluation.
    pub eval_every: u64,
    pub eval_episodes: usize,
    /// Composition snapshots; empty means a single snapshot at the end.
    pub snapshot_steps: Vec<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
}

impl Default for HarnessConfig {
    fn default() -> Self {
        Self {
            total_steps: 150_000,
            seed: 0,
            eval_tasks: vec![1.0, 1.4, 1.8],
            eval_every: 1000,
            eval_episodes: 10,
            snapshot_steps: Vec::new(),
            output_dir: None,
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let config: ExperimentConfig = toml::from_str(text).map_err(|e| Error::ConfigParse(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml(&text).map_err(|e| match e {
            Error::ConfigParse(msg) => Error::ConfigParse(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    /// Fails only for values TOML cannot hold, such as seeds above
    /// `i64::MAX`.
    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::ConfigParse(format!("cannot serialise config: {e}")))
    }

    pub fn buffer_spec(&self) -> BufferSpec {
        BufferSpec {
            kind: self.buffer.kind,
            capacity: self.buffer.size,
            fifo_fraction: self.buffer.fifo_fraction,
            mtr_sub_buffers: self.buffer.mtr.sub_buffers,
            mtr_promotion: self.buffer.mtr.promotion_probability,
        }
    }

    pub fn curiosity_params(&self) -> CuriosityParams {
        let [forward, inverse, reward] = self.curiosity.weights;
        CuriosityParams {
            weights: CuriosityWeights::new(forward, inverse, reward),
            ensemble_size: self.curiosity.ensemble_size,
            hidden: self.curiosity.hidden.clone(),
            learning_rate: self.curiosity.learning_rate,
            batch_size: self.curiosity.batch_size,
            fifo_capacity: self.curiosity.fifo_capacity.unwrap_or(self.buffer.size / 10),
        }
    }

    /// Snapshot steps, defaulting to the final step.
    pub fn snapshot_steps(&self) -> Vec<u64> {
        if self.harness.snapshot_steps.is_empty() {
            vec![self.harness.total_steps]
        } else {
            self.harness.snapshot_steps.clone()
        }
    }

    /// `--out` beats the config file, which beats `$REPLAYKIT_OUT`; the
    /// fallback is `runs/`.
    pub fn resolve_output_dir(&self, cli_override: Option<&Path>) -> PathBuf {
        if let Some(p) = cli_override {
            return p.to_path_buf();
        }
        if let Some(p) = &self.harness.output_dir {
            return p.clone();
        }
        std::env::var_os(OUTPUT_DIR_ENV)
            .map(PathBuf::from)
            .unwrap_or_else(|| PathBuf::from("runs"))
    }

    pub fn validate(&self) -> Result<()> {
        let invalid = |msg: String| Err(Error::ConfigInvalid(msg));
        let b = &self.buffer;
        if b.size == 0 {
            return invalid("buffer.size must be positive (N > 0)".into());
        }
        if !(0.0..1.0).contains(&b.fifo_fraction) {
            return invalid(format!("buffer.fifo_fraction must satisfy 0 <= f < 1, got {}", b.fifo_fraction));
        }
        if b.mtr.sub_buffers == 0 || b.mtr.sub_buffers > b.size {
            return invalid(format!(
                "buffer.mtr.sub_buffers must be between 1 and buffer.size, got {}",
                b.mtr.sub_buffers
            ));
        }
        if !(0.0..=1.0).contains(&b.mtr.promotion_probability) {
            return invalid(format!(
                "buffer.mtr.promotion_probability must lie in [0, 1], got {}",
                b.mtr.promotion_probability
            ));
        }
        if self.env.max_steps_per_episode == 0 {
            return invalid("env.max_steps_per_episode must be positive".into());
        }
        self.schedule.validate()?;
        let param_ok = |p: f64| p > 0.0 && p.is_finite();
        match &self.schedule {
            TaskSchedule::Piecewise { values, .. } if !values.iter().all(|&v| param_ok(v)) => {
                return invalid("schedule.values must be positive pendulum lengths".into());
            }
            TaskSchedule::Sinusoidal { param_min, .. } if !param_ok(*param_min) => {
                return invalid("schedule.param_min must be a positive pendulum length".into());
            }
            _ => {}
        }
        self.detector.params().validate()?;
        if self.curiosity.enabled {
            self.curiosity_params().weights.validate()?;
            if self.curiosity.ensemble_size == 0 {
                return invalid("curiosity.ensemble_size must be at least 1".into());
            }
            if self.curiosity.hidden.contains(&0) {
                return invalid("curiosity.hidden sizes must be positive".into());
            }
            if !(self.curiosity.learning_rate > 0.0) {
                return invalid("curiosity.learning_rate must be positive".into());
            }
        } else if self.buffer.kind.uses_curiosity() {
            return invalid(format!("buffer.kind = \"{}\" needs curiosity.enabled = true", self.buffer.kind));
        } else if self.detector.mode == DetectorMode::Snr && self.buffer.kind == BufferKind::Hrbts {
            return invalid("detector.mode = \"snr\" with an hrbts buffer needs curiosity.enabled = true".into());
        }
        let l = &self.learner;
        if l.batch_size == 0 || l.batch_size > b.size {
            return invalid(format!(
                "learner.batch_size must satisfy 0 < batch <= buffer.size, got {}",
                l.batch_size
            ));
        }
        if l.hidden.contains(&0) {
            return invalid("learner.hidden sizes must be positive".into());
        }
        if !(l.learning_rate > 0.0) {
            return invalid("learner.learning_rate must be positive".into());
        }
        if !(0.0..=1.0).contains(&l.gamma) {
            return invalid(format!("learner.gamma must lie in [0, 1], got {}", l.gamma));
        }
        if !(l.tau > 0.0 && l.tau <= 1.0) {
            return invalid(format!("learner.tau must lie in (0, 1], got {}", l.tau));
        }
        if !(l.initial_alpha > 0.0) {
            return invalid("learner.initial_alpha must be positive".into());
        }
        let h = &self.harness;
        if h.total_steps == 0 {
            return invalid("harness.total_steps must be positive".into());
        }
        if h.eval_every > 0 && h.eval_episodes == 0 {
            return invalid("harness.eval_episodes must be at least 1".into());
        }
        if h.eval_tasks.iter().any(|&v| !param_ok(v)) {
            return invalid("harness.eval_tasks must be positive lengths".into());
        }
        if let Some(&s) = h.snapshot_steps.iter().find(|&&s| s > h.total_steps) {
            return invalid(format!(
                "harness.snapshot_steps entry {s} lies outside [0, total_steps = {}]",
                h.total_steps
            ));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_document_gives_defaults() {
        let c = ExperimentConfig::from_toml("").unwrap();
        assert_eq!(c, ExperimentConfig::default());
        assert_eq!(c.buffer.size, 20_000);
        assert_eq!(c.buffer.fifo_fraction, 0.05);
        assert_eq!((c.detector.n, c.detector.k, c.detector.m_f), (600, 8000, 1.5));
        assert_eq!(c.curiosity.weights, [0.0, 1.0, 0.0]);
        assert_eq!(c.curiosity.ensemble_size, 3);
        assert_eq!(c.env.max_steps_per_episode, 200);
        assert_eq!(c.harness.total_steps, 150_000);
        assert_eq!(c.schedule, TaskSchedule::prolonged_pendulum());
    }

    #[test]
    fn echoes_table_values() {
        let c = ExperimentConfig::from_toml(
            r#"
            [buffer]
            size = 20000
            fifo_fraction = 0.05
            [detector]
            n = 600
            k = 8000
            m_f = 1.5
            "#,
        )
        .unwrap();
        assert_eq!(c.buffer.size, 20_000);
        assert_eq!(c.buffer.fifo_fraction, 0.05);
        assert_eq!(c.detector.params(), DetectorParams::default());
    }

    #[test]
    fn empty_mtr_block_uses_defaults() {
        let c = ExperimentConfig::from_toml("[buffer]\nkind = \"mtr\"\n[buffer.mtr]\n").unwrap();
        assert_eq!(c.buffer.mtr, MtrConfig::default());
        assert_eq!(c.buffer.mtr.sub_buffers, 5);
        assert_eq!(c.buffer.mtr.promotion_probability, 0.5);
    }

    #[test]
    fn fifo_fraction_out_of_range() {
        let err = ExperimentConfig::from_toml("[buffer]\nfifo_fraction = 1.2\n").unwrap_err();
        assert!(matches!(err, Error::ConfigInvalid(ref m) if m.contains("fifo_fraction")), "{err}");
    }

    #[test]
    fn unknown_key_reports_location() {
        let err = ExperimentConfig::from_toml("[buffer]\nsize = 10\nsizee = 3\n").unwrap_err();
        let msg = err.to_string();
        assert!(matches!(err, Error::ConfigParse(_)));
        assert!(msg.contains("sizee") && msg.contains("line 3"), "{msg}");
    }

    #[test]
    fn type_error_reports_key() {
        let msg = ExperimentConfig::from_toml("[detector]\nn = \"many\"\n").unwrap_err().to_string();
        assert!(msg.contains("line 2"), "{msg}");
    }

    #[test]
    fn invariant_violations() {
        for doc in [
            "[buffer]\nsize = 0\n",
            "[buffer]\nsize = 32\n[learner]\nbatch_size = 64\n",
            "[harness]\ntotal_steps = 100\nsnapshot_steps = [50, 150]\n",
            "[schedule]\nkind = \"piecewise\"\nchange_steps = [0, 5, 5]\nvalues = [1.0, 1.2, 1.4]\n",
            "[schedule]\nkind = \"sinusoidal\"\nparam_min = 1.8\nparam_max = 1.0\n",
            "[curiosity]\nweights = [0.0, 0.0, 0.0]\n",
            "[detector]\nn = 1\n",
            "[buffer]\nkind = \"hcb\"\n[curiosity]\nenabled = false\n",
        ] {
            assert!(
                matches!(ExperimentConfig::from_toml(doc), Err(Error::ConfigInvalid(_))),
                "{doc}"
            );
        }
    }

    #[test]
    fn round_trip() {
        let doc = r#"
            [schedule]
            kind = "sinusoidal"
            param_min = 1.0
            param_max = 1.8
            [buffer]
            kind = "mtr"
            size = 5000
            [curiosity]
            weights = [0.0, 1.0, 0.05]
            fifo_capacity = 321
            [learner]
            policy = "uniform-random"
            entropy_target = -0.5
            [harness]
            seed = 9223372036854775807
            snapshot_steps = [0, 10, 20]
            output_dir = "out/x"
        "#;
        let c = ExperimentConfig::from_toml(doc).unwrap();
        let again = ExperimentConfig::from_toml(&c.to_toml().unwrap()).unwrap();
        assert_eq!(c, again);
        let defaults = ExperimentConfig::default();
        assert_eq!(ExperimentConfig::from_toml(&defaults.to_toml().unwrap()).unwrap(), defaults);
    }

    #[test]
    fn output_dir_precedence() {
        let mut c = ExperimentConfig::default();
        assert_eq!(c.resolve_output_dir(Some(Path::new("a"))), PathBuf::from("a"));
        c.harness.output_dir = Some(PathBuf::from("b"));
        assert_eq!(c.resolve_output_dir(None), PathBuf::from("b"));
        assert_eq!(c.resolve_output_dir(Some(Path::new("a"))), PathBuf::from("a"));
    }

    #[test]
    fn curiosity_fifo_defaults_to_tenth_of_buffer() {
        let c = ExperimentConfig::default();
        assert_eq!(c.curiosity_params().fifo_capacity, 2000);
    }
}
