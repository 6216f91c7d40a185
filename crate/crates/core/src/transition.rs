/// One environment step.
///
/// The ground-truth task label rides along for evaluation bookkeeping only.
/// Replay policies never read it; it is reachable solely through
/// [`Transition::task_label`], which the composition metric uses.
#[derive(Debug, Clone, PartialEq)]
pub struct Transition {
    pub state: Vec<f64>,
    pub action: Vec<f64>,
    pub reward: f64,
    pub next_state: Vec<f64>,
    pub done: bool,
    pub timestep: u64,
    /// Curiosity measured before this transition was inserted; 0 when unused.
    pub curiosity_at_insert: f64,
    true_task_label: u32,
}

impl Transition {
    pub fn new(
        state: Vec<f64>,
        action: Vec<f64>,
        reward: f64,
        next_state: Vec<f64>,
        done: bool,
        timestep: u64,
        task_label: u32,
    ) -> Self {
        debug_assert_eq!(state.len(), next_state.len());
        Self {
            state,
            action,
            reward,
            next_state,
            done,
            timestep,
            curiosity_at_insert: 0.0,
            true_task_label: task_label,
        }
    }

    /// Builder-style setter for the insertion-time curiosity.
    pub fn with_curiosity(mut self, curiosity: f64) -> Self {
        debug_assert!(curiosity >= 0.0);
        self.curiosity_at_insert = curiosity;
        self
    }

    /// Ground-truth task label. Only meant for composition metrics and
    /// evaluation; no replay policy may branch on it.
    pub fn task_label(&self) -> u32 {
        self.true_task_label
    }
}
