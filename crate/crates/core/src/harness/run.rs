use std::collections::BTreeSet;
use std::path::Path;

use super::io::RowWriter;
use super::{BOUNDARIES_FILE, COMPOSITION_FILE, CONFIG_FILE, CURIOSITY_FILE, LONG_TERM_COMPOSITION_FILE, REWARDS_FILE};
use crate::buffers::{sample, Composition, ReplayBuffer};
use crate::config::{DetectorMode, ExperimentConfig};
use crate::curiosity::{CuriosityEstimator, Scales};
use crate::detector::DetectorState;
use crate::env::{EnvParams, Pendulum, MAX_TORQUE};
use crate::error::{Error, Result};
use crate::learner::{evaluate_policy, ActionMode, ActorCritic, Policy};
use crate::metrics::{
    BoundaryRow, CompositionRow, CuriosityRow, RewardRow, BOUNDARIES_HEADER, COMPOSITION_HEADER, CURIOSITY_HEADER,
    REWARDS_HEADER,
};
use crate::rng::Rng;
use crate::transition::Transition;

const OBS_DIM: usize = 3;
const ACTION_DIM: usize = 1;

/// What happened inside one loop iteration, in order. Emitted to
/// [`RunHooks::on_event`].
#[derive(Debug, Clone, PartialEq)]
pub enum LoopEvent {
    EnvStep { t: u64 },
    CuriosityObserved { t: u64, c: f64 },
    DetectorStepped { t: u64, boundary: bool },
    BoundaryDelivered { t: u64 },
    Inserted { t: u64 },
    LearnerUpdated { t: u64 },
}

/// Optional overrides for [`run_experiment_with`].
#[derive(Default)]
pub struct RunHooks<'a> {
    /// Replaces the buffer built from the config.
    pub buffer: Option<Box<dyn ReplayBuffer + 'a>>,
    pub on_event: Option<Box<dyn FnMut(LoopEvent) + 'a>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub final_composition: Composition,
    pub final_long_term_composition: Composition,
    pub boundaries: Vec<u64>,
    /// `(task_label, mean_return, std_return)` from the last evaluation.
    pub final_returns: Vec<(u32, f64, f64)>,
    /// Sorted timesteps of everything stored at the end.
    pub stored_timesteps: Vec<u64>,
}

pub fn run_experiment(config: &ExperimentConfig, out_dir: &Path) -> Result<RunSummary> {
    run_experiment_with(config, out_dir, RunHooks::default())
}

enum Actor {
    Learner(Box<ActorCritic>),
    Scripted(crate::learner::ScriptedPolicy),
}

impl Actor {
    fn policy(&self) -> &dyn Policy {
        match self {
            Actor::Learner(ac) => ac.as_ref(),
            Actor::Scripted(p) => p,
        }
    }
}

fn composition_rows<'a>(t: u64, kind: &str, comp: &'a Composition) -> impl Iterator<Item = CompositionRow> + 'a {
    let kind = kind.to_string();
    comp.iter().map(move |(&label, share)| CompositionRow {
        snapshot_t: t,
        buffer_kind: kind.clone(),
        task_label: label,
        count: share.count,
        ratio: share.ratio,
    })
}

/// Executes `config.harness.total_steps` environment steps. Per step:
/// schedule → env step → curiosity → detector → boundary delivery →
/// buffer insert → learner update → evaluation / snapshots.
pub fn run_experiment_with(config: &ExperimentConfig, out_dir: &Path, mut hooks: RunHooks<'_>) -> Result<RunSummary> {
    config.validate()?;
    std::fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let config_path = out_dir.join(CONFIG_FILE);
    std::fs::write(&config_path, config.to_toml()?).map_err(|e| Error::io(&config_path, e))?;

    let root = Rng::new(config.harness.seed);
    let mut env_rng = root.split("env");
    let mut policy_rng = root.split("policy");
    let mut buffer_rng = root.split("buffer");
    let mut sample_rng = root.split("sample");
    let mut learner_rng = root.split("learner");
    let mut curiosity_rng = root.split("curiosity");

    let schedule = &config.schedule;
    let eval_tasks = &config.harness.eval_tasks;
    let mut env = Pendulum::new(
        EnvParams::with_length(schedule.param(0)),
        config.env.max_steps_per_episode,
        &mut env_rng,
    );

    let mut buffer: Box<dyn ReplayBuffer + '_> = match hooks.buffer.take() {
        Some(b) => b,
        None => config.buffer_spec().build()?,
    };
    let buffer_kind = buffer.kind().to_string();

    let mut curiosity = if config.curiosity.enabled {
        Some(CuriosityEstimator::new(
            &config.curiosity_params(),
            OBS_DIM,
            ACTION_DIM,
            Scales::pendulum(),
            &mut root.split("curiosity-init"),
        )?)
    } else {
        None
    };
    let mut detector = DetectorState::new(config.detector.params())?;
    let oracle_points: BTreeSet<u64> = schedule.change_points().into_iter().collect();

    let mut actor = match config.learner.policy.scripted() {
        Some(p) => Actor::Scripted(p),
        None => Actor::Learner(Box::new(ActorCritic::new(
            Scales::pendulum().state,
            ACTION_DIM,
            MAX_TORQUE,
            &config.learner.sac_params(),
            &mut root.split("learner-init"),
        )?)),
    };

    let mut curiosity_out = RowWriter::create(&out_dir.join(CURIOSITY_FILE), CURIOSITY_HEADER)?;
    let mut composition_out = RowWriter::create(&out_dir.join(COMPOSITION_FILE), COMPOSITION_HEADER)?;
    let mut long_term_out = RowWriter::create(&out_dir.join(LONG_TERM_COMPOSITION_FILE), COMPOSITION_HEADER)?;
    let mut rewards_out = RowWriter::create(&out_dir.join(REWARDS_FILE), REWARDS_HEADER)?;
    let mut boundaries_out = RowWriter::create(&out_dir.join(BOUNDARIES_FILE), BOUNDARIES_HEADER)?;

    let mut emit = |event: LoopEvent| {
        if let Some(f) = hooks.on_event.as_mut() {
            f(event);
        }
    };

    let snapshots: BTreeSet<u64> = config.snapshot_steps().into_iter().collect();
    let mut write_snapshot = |t: u64, buffer: &dyn ReplayBuffer| -> Result<()> {
        for row in composition_rows(t, &buffer_kind, &buffer.composition()) {
            composition_out.write(&row)?;
        }
        for row in composition_rows(t, &buffer_kind, &buffer.long_term_composition()) {
            long_term_out.write(&row)?;
        }
        Ok(())
    };
    if snapshots.contains(&0) {
        write_snapshot(0, buffer.as_ref())?;
    }

    let warmup = config.learner.warmup_steps;
    let mut boundaries = Vec::new();
    let mut final_returns = Vec::new();
    let mut obs = env.observation();

    for t in 0..config.harness.total_steps {
        let length = schedule.param(t);
        env.params.length = length;
        let label = schedule.true_label(t, eval_tasks);

        let action = match &actor {
            Actor::Learner(_) if t < warmup => vec![policy_rng.uniform_range(-MAX_TORQUE, MAX_TORQUE)],
            a => a
                .policy()
                .act(&obs, ActionMode::Stochastic, &mut policy_rng)
                .map_err(|e| e.at_step(t, "policy"))?,
        };
        let (next_obs, reward, episode_over) = env.step(action[0]).map_err(|e| e.at_step(t, "env"))?;
        emit(LoopEvent::EnvStep { t });
        // Episodes end on a time limit only, never in a terminal state.
        let transition = Transition::new(obs, action, reward, next_obs.clone(), false, t, label);

        let c = match curiosity.as_mut() {
            Some(est) => est
                .observe(&transition, &mut curiosity_rng)
                .map_err(|e| e.at_step(t, "curiosity"))?,
            None => 0.0,
        };
        emit(LoopEvent::CuriosityObserved { t, c });

        let det = detector.step(c);
        let boundary = match config.detector.mode {
            DetectorMode::Snr => det.boundary,
            DetectorMode::Oracle => oracle_points.contains(&t),
            DetectorMode::Off => false,
        };
        emit(LoopEvent::DetectorStepped { t, boundary });
        curiosity_out.write(&CuriosityRow {
            t,
            c,
            mu: det.mu,
            snr: det.snr,
            candidate: det.candidate,
            boundary,
        })?;

        if boundary {
            buffer.on_task_boundary(&mut buffer_rng);
            boundaries.push(t);
            boundaries_out.write(&BoundaryRow { t })?;
            emit(LoopEvent::BoundaryDelivered { t });
        }

        buffer.insert(transition.with_curiosity(c), &mut buffer_rng);
        emit(LoopEvent::Inserted { t });

        obs = if episode_over { env.reset(&mut env_rng) } else { next_obs };

        if let Actor::Learner(ac) = &mut actor {
            if t + 1 >= warmup && buffer.len() >= config.learner.batch_size {
                for _ in 0..config.learner.updates_per_step {
                    let batch = sample(buffer.as_ref(), config.learner.batch_size, &mut sample_rng)?;
                    ac.update(&batch, &mut learner_rng)
                        .map_err(|e| e.at_step(t, "learner"))?;
                }
                emit(LoopEvent::LearnerUpdated { t });
            }
        }

        let done_steps = t + 1;
        let every = config.harness.eval_every;
        if every > 0 && done_steps % every == 0 {
            final_returns.clear();
            for (label, &length) in eval_tasks.iter().enumerate() {
                let mut eval_rng = root.split(&format!("eval/{done_steps}/{label}"));
                let (mean, std) = evaluate_policy(
                    actor.policy(),
                    EnvParams::with_length(length),
                    config.harness.eval_episodes,
                    config.env.max_steps_per_episode,
                    &mut eval_rng,
                )
                .map_err(|e| e.at_step(t, "evaluation"))?;
                rewards_out.write(&RewardRow {
                    eval_t: done_steps,
                    task_label: label as u32,
                    mean_return: mean,
                    std_return: std,
                    episodes: config.harness.eval_episodes,
                })?;
                final_returns.push((label as u32, mean, std));
            }
        }
        if snapshots.contains(&done_steps) {
            write_snapshot(done_steps, buffer.as_ref())?;
        }
    }

    curiosity_out.finish()?;
    composition_out.finish()?;
    long_term_out.finish()?;
    rewards_out.finish()?;
    boundaries_out.finish()?;

    let mut stored_timesteps: Vec<u64> = buffer.iter().map(|tr| tr.timestep).collect();
    stored_timesteps.sort_unstable();
    Ok(RunSummary {
        final_composition: buffer.composition(),
        final_long_term_composition: buffer.long_term_composition(),
        boundaries,
        final_returns,
        stored_timesteps,
    })
}
