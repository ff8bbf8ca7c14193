use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::{PathStats, RunStats};
use crate::error::{Error, Result};

pub const PATHS_FILE: &str = "paths.csv";
pub const SUMMARY_FILE: &str = "summary.json";

/// Provenance stamped into every output file.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunMeta {
    pub seed: u64,
    pub config_digest: String,
    /// The configuration that produced the run, echoed into the summary.
    pub config: serde_json::Value,
}

impl RunMeta {
    pub fn new(seed: u64, config_digest: impl Into<String>) -> Self {
        Self {
            seed,
            config_digest: config_digest.into(),
            config: serde_json::Value::Null,
        }
    }

    /// First line of every CSV this crate writes.
    pub fn comment_line(&self) -> String {
        format!("# config_digest={},seed={}\n", self.config_digest, self.seed)
    }
}

#[derive(Serialize)]
struct Summary<'a> {
    n_paths: usize,
    mean_visits: &'a [f64],
    median_visits: Vec<f64>,
    mean_cost: f64,
    median_cost: f64,
    goal_rate: f64,
    seed: u64,
    config_digest: &'a str,
    config: &'a serde_json::Value,
}

/// Serializes per-path rows as CSV with a leading provenance comment.
pub fn paths_csv(stats: &RunStats, meta: &RunMeta) -> Result<Vec<u8>> {
    let k = stats.mean_visits.len();
    let mut buf = meta.comment_line().into_bytes();
    {
        let mut w = csv::Writer::from_writer(&mut buf);
        let mut header = vec!["path_id".to_string()];
        header.extend((1..=k).map(|z| format!("visits_obs_{z}")));
        header.push("total_cost".into());
        w.write_record(&header).map_err(|e| Error::csv("<buffer>", e))?;
        for (i, p) in stats.per_path.iter().enumerate() {
            let mut row = vec![i.to_string()];
            row.extend(p.visits.iter().map(u32::to_string));
            row.push(p.total_cost.to_string());
            w.write_record(&row).map_err(|e| Error::csv("<buffer>", e))?;
        }
        w.flush().map_err(|e| Error::io("<buffer>", e))?;
    }
    Ok(buf)
}

pub fn summary_json(stats: &RunStats, meta: &RunMeta) -> Result<Vec<u8>> {
    let summary = Summary {
        n_paths: stats.n_paths(),
        mean_visits: &stats.mean_visits,
        median_visits: stats.median_visits(),
        mean_cost: stats.mean_cost,
        median_cost: stats.median_cost(),
        goal_rate: stats.goal_rate(),
        seed: meta.seed,
        config_digest: &meta.config_digest,
        config: &meta.config,
    };
    let mut out = serde_json::to_vec_pretty(&summary)?;
    out.push(b'\n');
    Ok(out)
}

/// Writes `paths.csv` and `summary.json` into `dir`, creating it if needed.
pub fn write_stats(stats: &RunStats, meta: &RunMeta, dir: &Path) -> Result<(PathBuf, PathBuf)> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let csv_path = dir.join(PATHS_FILE);
    let json_path = dir.join(SUMMARY_FILE);
    fs::write(&csv_path, paths_csv(stats, meta)?).map_err(|e| Error::io(&csv_path, e))?;
    fs::write(&json_path, summary_json(stats, meta)?).map_err(|e| Error::io(&json_path, e))?;
    Ok((csv_path, json_path))
}

/// Reads a per-path CSV written by [`write_stats`]. Step counts and goal
/// flags are not stored, so they come back as 0 and `false`.
pub fn read_paths_csv(path: &Path) -> Result<Vec<PathStats>> {
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_path(path)
        .map_err(|e| Error::csv(path, e))?;
    let malformed = |reason: String| Error::MalformedTable {
        path: path.to_path_buf(),
        reason,
    };
    let headers = reader.headers().map_err(|e| Error::csv(path, e))?.clone();
    let n = headers.len();
    if n < 2 || &headers[0] != "path_id" || &headers[n - 1] != "total_cost" {
        return Err(malformed("expected path_id, visits_obs_*, total_cost columns".into()));
    }
    let mut out = Vec::new();
    for (row_no, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Error::csv(path, e))?;
        let visits = (1..n - 1)
            .map(|j| record[j].parse::<u32>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| malformed(format!("row {row_no}: {e}")))?;
        let total_cost = record[n - 1]
            .parse::<f64>()
            .map_err(|e| malformed(format!("row {row_no}: {e}")))?;
        out.push(PathStats {
            visits,
            total_cost,
            steps: 0,
            reached_goal: false,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_paths() -> RunStats {
        let per_path = vec![
            PathStats {
                visits: vec![2, 0],
                total_cost: 17.5,
                steps: 9,
                reached_goal: true,
            },
            PathStats {
                visits: vec![0, 1],
                total_cost: 0.1 + 0.2,
                steps: 4,
                reached_goal: true,
            },
        ];
        RunStats::from_paths(2, per_path)
    }

    #[test]
    fn csv_has_comment_header_and_rows() {
        let bytes = paths_csv(&two_paths(), &RunMeta::new(7, "abc")).unwrap();
        let text = String::from_utf8(bytes).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "# config_digest=abc,seed=7");
        assert_eq!(lines[1], "path_id,visits_obs_1,visits_obs_2,total_cost");
        assert_eq!(lines.len(), 4);
        assert_eq!(lines[2], "0,2,0,17.5");
    }

    #[test]
    fn round_trip_preserves_rows() {
        let dir = tempfile::tempdir().unwrap();
        let stats = two_paths();
        let (csv_path, json_path) = write_stats(&stats, &RunMeta::new(1, "d"), dir.path()).unwrap();
        let back = read_paths_csv(&csv_path).unwrap();
        assert_eq!(back.len(), 2);
        for (a, b) in stats.per_path.iter().zip(&back) {
            assert_eq!(a.visits, b.visits);
            assert_eq!(a.total_cost.to_bits(), b.total_cost.to_bits());
        }
        let summary: serde_json::Value = serde_json::from_slice(&fs::read(json_path).unwrap()).unwrap();
        assert_eq!(summary["n_paths"], 2);
        assert_eq!(summary["seed"], 1);
        assert_eq!(summary["mean_visits"][0], 1.0);
    }

    #[test]
    fn missing_file_names_the_path() {
        let err = read_paths_csv(Path::new("/nonexistent/paths.csv")).unwrap_err();
        assert!(err.to_string().contains("/nonexistent/paths.csv"));
    }
}
