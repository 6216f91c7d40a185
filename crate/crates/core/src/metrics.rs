//! Metric records written by the harness. Column order matches the CSV
//! headers exactly.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CuriosityRow {
    pub t: u64,
    pub c: f64,
    pub mu: f64,
    pub snr: f64,
    #[serde(with = "flag")]
    pub candidate: bool,
    #[serde(with = "flag")]
    pub boundary: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompositionRow {
    pub snapshot_t: u64,
    pub buffer_kind: String,
    pub task_label: u32,
    pub count: usize,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RewardRow {
    pub eval_t: u64,
    pub task_label: u32,
    pub mean_return: f64,
    pub std_return: f64,
    pub episodes: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryRow {
    pub t: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum MetricsRecord {
    Curiosity(CuriosityRow),
    Composition(CompositionRow),
    Reward(RewardRow),
}

pub const CURIOSITY_HEADER: &str = "t,c,mu,snr,candidate,boundary";
pub const COMPOSITION_HEADER: &str = "snapshot_t,buffer_kind,task_label,count,ratio";
pub const REWARDS_HEADER: &str = "eval_t,task_label,mean_return,std_return,episodes";
pub const BOUNDARIES_HEADER: &str = "t";

/// Booleans are written as `0`/`1`.
mod flag {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &bool, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_u8(u8::from(*v))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<bool, D::Error> {
        match u8::deserialize(d)? {
            0 => Ok(false),
            1 => Ok(true),
            other => Err(serde::de::Error::custom(format!("flag must be 0 or 1, got {other}"))),
        }
    }
}
