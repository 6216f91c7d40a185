mod common;

use replaykit::buffers::BufferKind;
use replaykit::config::{DetectorMode, ExperimentConfig};
use replaykit::curiosity::Scales;
use replaykit::env::{EnvParams, TaskSchedule, MAX_TORQUE};
use replaykit::harness::run_experiment;
use replaykit::learner::{evaluate_policy, ActionMode, ActorCritic, Policy, SacParams};
use replaykit::rng::Rng;

fn stationary_fifo_config(total_steps: u64, seed: u64) -> ExperimentConfig {
    let mut cfg = ExperimentConfig::default();
    cfg.schedule = TaskSchedule::Piecewise {
        change_steps: vec![0],
        values: vec![1.0],
    };
    cfg.buffer.kind = BufferKind::Fifo;
    cfg.detector.mode = DetectorMode::Off;
    cfg.curiosity.enabled = false;
    cfg.harness.total_steps = total_steps;
    cfg.harness.eval_tasks = vec![1.0];
    cfg.harness.eval_every = total_steps;
    cfg.harness.eval_episodes = 10;
    cfg.harness.seed = seed;
    cfg
}

#[test]
fn actions_stay_bounded_for_random_parameters() {
    let mut rng = Rng::new(0);
    let mut ac = ActorCritic::new(Scales::pendulum().state, 1, MAX_TORQUE, &SacParams::default(), &mut rng).unwrap();
    for _ in 0..10_000 {
        let scale = rng.uniform_range(0.0, 20.0);
        for p in ac.policy_net_mut().params_mut() {
            *p = rng.uniform_range(-scale, scale);
        }
        let obs = [rng.uniform_range(-1.0, 1.0), rng.uniform_range(-1.0, 1.0), rng.uniform_range(-8.0, 8.0)];
        for mode in [ActionMode::Stochastic, ActionMode::Deterministic] {
            let a = ac.act(&obs, mode, &mut rng).unwrap();
            assert!(a[0].abs() <= MAX_TORQUE && a[0].is_finite(), "{a:?}");
        }
    }
}

#[test]
fn short_training_beats_untrained_policy() {
    let seeds = 5;
    let (mut trained, mut untrained) = (0.0, 0.0);
    let dir = tempfile::tempdir().unwrap();
    for seed in 0..seeds {
        let cfg = stationary_fifo_config(2000, seed);
        let summary = run_experiment(&cfg, &dir.path().join(seed.to_string())).unwrap();
        trained += summary.final_returns[0].1;

        let fresh = ActorCritic::new(
            Scales::pendulum().state,
            1,
            MAX_TORQUE,
            &cfg.learner.sac_params(),
            &mut Rng::new(seed).split("fresh"),
        )
        .unwrap();
        let (mean, _) =
            evaluate_policy(&fresh, EnvParams::with_length(1.0), 10, 200, &mut Rng::new(seed).split("eval")).unwrap();
        untrained += mean;
    }
    let (trained, untrained) = (trained / seeds as f64, untrained / seeds as f64);
    assert!(trained > untrained, "trained {trained:.1} vs untrained {untrained:.1}");
}

#[test]
fn thirty_thousand_steps_swing_up_the_pendulum() {
    let seeds = 5;
    let dir = tempfile::tempdir().unwrap();
    let returns: Vec<f64> = (0..seeds)
        .map(|seed| {
            let cfg = stationary_fifo_config(30_000, seed);
            run_experiment(&cfg, &dir.path().join(seed.to_string())).unwrap().final_returns[0].1
        })
        .collect();
    let mean = returns.iter().sum::<f64>() / seeds as f64;
    assert!(mean > -300.0, "mean {mean:.1}, per seed {returns:?}");
}
