use std::path::Path;

use super::io::read_rows;
use super::{BOUNDARIES_FILE, COMPOSITION_FILE, LONG_TERM_COMPOSITION_FILE, REWARDS_FILE};
use crate::error::{Error, Result};
use crate::metrics::{
    BoundaryRow, CompositionRow, RewardRow, BOUNDARIES_HEADER, COMPOSITION_HEADER, CURIOSITY_HEADER, REWARDS_HEADER,
};

/// The last snapshot and last evaluation of a finished run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub composition: Vec<CompositionRow>,
    pub long_term_composition: Vec<CompositionRow>,
    pub boundaries: Vec<u64>,
    pub final_rewards: Vec<RewardRow>,
}

impl std::fmt::Display for RunReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.composition.first() {
            Some(row) => writeln!(f, "composition at t={} ({})", row.snapshot_t, row.buffer_kind)?,
            None => writeln!(f, "composition: no snapshots")?,
        }
        writeln!(f, "{:>6} {:>8} {:>8} {:>10}", "task", "count", "ratio", "long-term")?;
        for row in &self.composition {
            let long_term = self
                .long_term_composition
                .iter()
                .find(|r| r.task_label == row.task_label)
                .map_or_else(|| "-".to_string(), |r| format!("{:.4}", r.ratio));
            writeln!(f, "{:>6} {:>8} {:>8.4} {:>10}", row.task_label, row.count, row.ratio, long_term)?;
        }
        let list: Vec<String> = self.boundaries.iter().map(u64::to_string).collect();
        writeln!(f, "boundaries ({}): {}", self.boundaries.len(), list.join(" "))?;
        if let Some(last) = self.final_rewards.first() {
            writeln!(f, "returns at t={}", last.eval_t)?;
            for r in &self.final_rewards {
                writeln!(f, "{:>6} {:>10.2} ± {:.2}", r.task_label, r.mean_return, r.std_return)?;
            }
        }
        Ok(())
    }
}

fn last_snapshot(rows: Vec<CompositionRow>) -> Vec<CompositionRow> {
    match rows.iter().map(|r| r.snapshot_t).max() {
        Some(t) => rows.into_iter().filter(|r| r.snapshot_t == t).collect(),
        None => Vec::new(),
    }
}

/// Rows of the most recent snapshot in a composition file.
pub fn read_composition(path: &Path) -> Result<Vec<CompositionRow>> {
    Ok(last_snapshot(read_rows(path, COMPOSITION_HEADER)?))
}

pub fn read_boundaries(path: &Path) -> Result<Vec<u64>> {
    let rows: Vec<BoundaryRow> = read_rows(path, BOUNDARIES_HEADER)?;
    Ok(rows.into_iter().map(|r| r.t).collect())
}

pub fn analyze_run(dir: &Path) -> Result<RunReport> {
    let composition = read_composition(&dir.join(COMPOSITION_FILE))?;
    let long_term_path = dir.join(LONG_TERM_COMPOSITION_FILE);
    let long_term_composition = if long_term_path.exists() {
        read_composition(&long_term_path)?
    } else {
        Vec::new()
    };
    let boundaries = read_boundaries(&dir.join(BOUNDARIES_FILE))?;
    let rewards: Vec<RewardRow> = read_rows(&dir.join(REWARDS_FILE), REWARDS_HEADER)?;
    let last_eval = rewards.iter().map(|r| r.eval_t).max();
    let final_rewards = rewards.into_iter().filter(|r| Some(r.eval_t) == last_eval).collect();
    Ok(RunReport {
        composition,
        long_term_composition,
        boundaries,
        final_rewards,
    })
}

/// Reads a scalar signal from either a single-column CSV (with or
/// without a header line) or a `curiosity.csv` file, in which case the
/// `c` column is used.
pub fn read_signal(path: &Path) -> Result<Vec<f64>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let bad = |line: usize, message: String| Error::Format {
        path: path.to_path_buf(),
        message: format!("line {line}: {message}"),
    };
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty()).peekable();
    let mut column = None;
    if let Some(&(_, first)) = lines.peek() {
        let first = first.trim();
        if first == CURIOSITY_HEADER {
            column = Some(1);
            lines.next();
        } else if first.parse::<f64>().is_err() && !first.contains(',') {
            lines.next();
        }
    }
    let mut out = Vec::new();
    for (i, line) in lines {
        let fields: Vec<&str> = line.trim().split(',').collect();
        let field = match column {
            Some(c) => *fields
                .get(c)
                .ok_or_else(|| bad(i + 1, format!("expected at least {} columns", c + 1)))?,
            None if fields.len() == 1 => fields[0],
            None => return Err(bad(i + 1, format!("expected one column, found {}", fields.len()))),
        };
        let value: f64 = field
            .trim()
            .parse()
            .map_err(|_| bad(i + 1, format!("{field:?} is not a number")))?;
        out.push(value);
    }
    Ok(out)
}
