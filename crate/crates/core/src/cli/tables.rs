use std::path::Path;

use crate::agents::LearningCurve;
use crate::dp::{PolicyTable, QTable, ValueTable};
use crate::env::{Action, GridSpec};
use crate::error::{Error, Result};
use crate::eval::RunMeta;

fn writer(meta: &RunMeta) -> csv::Writer<Vec<u8>> {
    csv::Writer::from_writer(meta.comment_line().into_bytes())
}

fn finish(w: csv::Writer<Vec<u8>>) -> Result<Vec<u8>> {
    w.into_inner().map_err(|e| Error::io("<buffer>", e.into_error()))
}

fn put<I, T>(w: &mut csv::Writer<Vec<u8>>, row: I) -> Result<()>
where
    I: IntoIterator<Item = T>,
    T: AsRef<[u8]>,
{
    w.write_record(row).map_err(|e| Error::csv("<buffer>", e))
}

/// One row per state-action pair: `state_x, state_y, action, value`.
pub fn state_action_csv(grid: &GridSpec, values: &[f64], meta: &RunMeta) -> Result<Vec<u8>> {
    let n_actions = Action::COUNT;
    if values.len() != grid.n_states() * n_actions {
        return Err(Error::DimensionMismatch(format!(
            "{} values for {} states x {n_actions} actions",
            values.len(),
            grid.n_states()
        )));
    }
    let mut w = writer(meta);
    put(&mut w, ["state_x", "state_y", "action", "value"])?;
    for (s, cell) in grid.cells().enumerate() {
        for a in Action::ALL {
            let v = values[s * n_actions + a.index()];
            put(
                &mut w,
                [
                    cell.x.to_string(),
                    cell.y.to_string(),
                    a.name().to_string(),
                    v.to_string(),
                ],
            )?;
        }
    }
    finish(w)
}

pub fn q_table_csv(grid: &GridSpec, q: &QTable, meta: &RunMeta) -> Result<Vec<u8>> {
    state_action_csv(grid, q.values(), meta)
}

pub fn policy_csv(grid: &GridSpec, pi: &PolicyTable, meta: &RunMeta) -> Result<Vec<u8>> {
    let probs: Vec<f64> = (0..pi.n_states()).flat_map(|s| pi.row(s).to_vec()).collect();
    state_action_csv(grid, &probs, meta)
}

/// One row per state: `state_x, state_y, value`.
pub fn value_csv(grid: &GridSpec, v: &ValueTable, meta: &RunMeta) -> Result<Vec<u8>> {
    let mut w = writer(meta);
    put(&mut w, ["state_x", "state_y", "value"])?;
    for (s, cell) in grid.cells().enumerate() {
        put(&mut w, [cell.x.to_string(), cell.y.to_string(), v.get(s).to_string()])?;
    }
    finish(w)
}

pub fn curve_csv(curve: &LearningCurve, meta: &RunMeta) -> Result<Vec<u8>> {
    let mut w = writer(meta);
    put(&mut w, ["episode", "steps", "td_error", "reached_goal"])?;
    for (i, e) in curve.episodes.iter().enumerate() {
        put(
            &mut w,
            [
                i.to_string(),
                e.steps.to_string(),
                e.td_error.to_string(),
                e.reached_terminal.to_string(),
            ],
        )?;
    }
    finish(w)
}

/// Reads a state-action table written by [`state_action_csv`]. Every pair
/// must appear exactly once.
pub fn read_state_action_csv(path: &Path, grid: &GridSpec) -> Result<Vec<f64>> {
    let malformed = |reason: String| Error::MalformedTable {
        path: path.to_path_buf(),
        reason,
    };
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_path(path)
        .map_err(|e| Error::csv(path, e))?;
    let headers = reader.headers().map_err(|e| Error::csv(path, e))?.clone();
    if headers.iter().collect::<Vec<_>>() != ["state_x", "state_y", "action", "value"] {
        return Err(malformed("expected columns state_x, state_y, action, value".into()));
    }
    let n = grid.n_states() * Action::COUNT;
    let mut values = vec![None; n];
    for (row, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Error::csv(path, e))?;
        let bad = |what: &str| malformed(format!("row {}: bad {what}", row + 1));
        let x: usize = record[0].parse().map_err(|_| bad("state_x"))?;
        let y: usize = record[1].parse().map_err(|_| bad("state_y"))?;
        let a = Action::from_name(&record[2]).ok_or_else(|| bad("action"))?;
        let v: f64 = record[3].parse().map_err(|_| bad("value"))?;
        let cell = crate::env::Cell::new(x, y);
        if !grid.contains(cell) {
            return Err(bad("cell (outside the grid)"));
        }
        let slot = &mut values[grid.index(cell) * Action::COUNT + a.index()];
        if slot.replace(v).is_some() {
            return Err(malformed(format!("row {}: duplicate entry for {cell} {a}", row + 1)));
        }
    }
    values
        .into_iter()
        .enumerate()
        .map(|(i, v)| {
            v.ok_or_else(|| {
                let cell = grid.cell(i / Action::COUNT);
                malformed(format!("missing entry for {cell} {}", Action::ALL[i % Action::COUNT]))
            })
        })
        .collect()
}

pub fn read_q_table(path: &Path, grid: &GridSpec) -> Result<QTable> {
    QTable::from_values(grid.n_states(), Action::COUNT, read_state_action_csv(path, grid)?)
}
