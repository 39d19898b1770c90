//! `solution.json` and `baseline.csv`.

use crate::assignment::{Assignment, Triple};
use crate::error::{Error, ParseError, Result};
use crate::objective::ObjectiveBreakdown;
use crate::solver::SolveStats;
use crate::sweep::reported_seconds;
use serde::{Deserialize, Serialize};
use std::path::Path;

pub const BASELINE_HEADER: &str = "discipline,timeslot,room";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BreakdownRecord {
    pub fo: f64,
    pub obj1: u64,
    pub obj2: u64,
    pub w1: f64,
    pub w2: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatsRecord {
    pub nodes: u64,
    pub seconds: f64,
    pub proven_optimal: bool,
    pub bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionFile {
    pub alpha: f64,
    pub triples: Vec<Triple>,
    pub breakdown: BreakdownRecord,
    pub stats: StatsRecord,
}

impl SolutionFile {
    pub fn new(assignment: &Assignment, breakdown: &ObjectiveBreakdown, stats: &SolveStats) -> Self {
        SolutionFile {
            alpha: breakdown.alpha,
            triples: assignment.triples.clone(),
            breakdown: BreakdownRecord {
                fo: breakdown.fo,
                obj1: breakdown.obj1,
                obj2: breakdown.obj2,
                w1: breakdown.w1,
                w2: breakdown.w2,
            },
            stats: StatsRecord {
                nodes: stats.nodes_explored,
                seconds: reported_seconds(stats.elapsed),
                proven_optimal: stats.proven_optimal,
                bound: stats.best_bound,
            },
        }
    }

    pub fn assignment(&self) -> Assignment {
        Assignment::new(self.triples.clone(), "solution")
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("solution serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Format(format!("solution file: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_json(&text).map_err(|e| Error::Format(format!("{}: {e}", path.display())))
    }
}

/// Reads a `discipline,timeslot,room` table, one meeting per row.
pub fn parse_baseline(text: &str, file: &str) -> Result<Assignment> {
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let headers = reader
        .headers()
        .map_err(|e| ParseError::new(file, None, e.to_string()))?
        .clone();
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| ParseError::new(file, Some(1), format!("missing column '{name}'")))
    };
    let (d, t, s) = (col("discipline")?, col("timeslot")?, col("room")?);
    let mut triples = Vec::new();
    for rec in reader.records() {
        let rec = rec.map_err(|e| {
            let line = e.position().map(|p| p.line());
            ParseError::new(file, line, e.to_string())
        })?;
        let line = rec.position().map(|p| p.line());
        let field = |i: usize| {
            rec.get(i)
                .filter(|v| !v.is_empty())
                .map(str::to_string)
                .ok_or_else(|| ParseError::new(file, line, "empty field"))
        };
        triples.push(Triple {
            discipline: field(d)?,
            timeslot: field(t)?,
            room: field(s)?,
        });
    }
    Ok(Assignment::new(triples, "baseline"))
}

pub fn load_baseline(path: &Path) -> Result<Assignment> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    let name = path.file_name().map_or_else(|| path.display().to_string(), |n| n.to_string_lossy().into_owned());
    parse_baseline(&text, &name)
}

pub fn baseline_csv(a: &Assignment) -> String {
    let mut s = format!("{BASELINE_HEADER}\n");
    for t in &a.triples {
        s.push_str(&format!("{},{},{}\n", t.discipline, t.timeslot, t.room));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::objective::Alpha;

    #[test]
    fn field_names_are_exact() {
        let a = Assignment::new(vec![Triple::new("d", "t", "r")], "x");
        let b = ObjectiveBreakdown::new(Alpha::HALF, 1, 2);
        let stats = SolveStats {
            nodes_explored: 3,
            elapsed: 0.0123,
            best_bound: 1.5,
            incumbent_fo: 1.5,
            proven_optimal: true,
            gap: 0.0,
            rooms_open: 1,
        };
        let f = SolutionFile::new(&a, &b, &stats);
        let v: serde_json::Value = serde_json::from_str(&f.to_json()).unwrap();
        // Value keeps keys sorted
        let keys = |v: &serde_json::Value| v.as_object().unwrap().keys().cloned().collect::<Vec<_>>();
        assert_eq!(keys(&v), ["alpha", "breakdown", "stats", "triples"]);
        assert_eq!(keys(&v["triples"][0]), ["discipline", "room", "timeslot"]);
        assert_eq!(keys(&v["breakdown"]), ["fo", "obj1", "obj2", "w1", "w2"]);
        assert_eq!(keys(&v["stats"]), ["bound", "nodes", "proven_optimal", "seconds"]);
        let text = f.to_json();
        let at = |k: &str| text.find(&format!("\"{k}\"")).unwrap();
        assert!(at("alpha") < at("triples") && at("triples") < at("breakdown") && at("breakdown") < at("stats"));
        assert_eq!(v["stats"]["seconds"], 0.01);
        assert_eq!(SolutionFile::from_json(&f.to_json()).unwrap(), f);
    }

    #[test]
    fn baseline_round_trip() {
        let a = Assignment::new(vec![Triple::new("d1", "mon-1", "101"), Triple::new("d1", "tue-1", "101")], "baseline");
        let back = parse_baseline(&baseline_csv(&a), "baseline.csv").unwrap();
        assert_eq!(back, a);
    }

    #[test]
    fn baseline_missing_column() {
        let err = parse_baseline("discipline,room\nd,r\n", "baseline.csv").unwrap_err();
        assert!(err.to_string().contains("missing column 'timeslot'"), "{err}");
    }
}
