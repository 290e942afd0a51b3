//! Instance text format and solution records.
//!
//! Instance files:
//!
//! ```text
//! # comment
//! n d W
//! s_1 m_1 k_1 ... k_m      (one line per item, 1-based scenario indices)
//! ```
//!
//! Solution records are JSON objects; item indices in `bins` are 1-based.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::instance::{
    check_feasible, val_bpps_unchecked, val_vbpp, InfeasibleSolution, Instance, InstanceError,
    Item, Solution,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("line {line}: scenario index {index} outside 1..={num_scenarios}")]
    ScenarioOutOfRange {
        line: usize,
        index: usize,
        num_scenarios: usize,
    },
    #[error("line {line}: empty scenario set")]
    EmptyScenarioSet { line: usize },
    #[error("line {line}: {source}")]
    Invalid { line: usize, source: InstanceError },
    #[error("expected {expected} item lines, found {found}")]
    MissingItems { expected: usize, found: usize },
    #[error("missing header line")]
    MissingHeader,
}

fn malformed(line: usize, message: impl Into<String>) -> ParseError {
    ParseError::Malformed {
        line,
        message: message.into(),
    }
}

fn parse_num<T: std::str::FromStr>(tok: &str, line: usize, what: &str) -> Result<T, ParseError> {
    tok.parse()
        .map_err(|_| malformed(line, format!("invalid {what} `{tok}`")))
}

pub fn parse_instance(text: &str) -> Result<Instance, ParseError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    let (hline, header) = lines.next().ok_or(ParseError::MissingHeader)?;
    let toks: Vec<&str> = header.split_whitespace().collect();
    if toks.len() != 3 {
        return Err(malformed(hline, "header must be `n d W`"));
    }
    let n: usize = parse_num(toks[0], hline, "item count")?;
    let d: usize = parse_num(toks[1], hline, "scenario count")?;
    let w: u32 = parse_num(toks[2], hline, "capacity")?;
    if d == 0 {
        return Err(ParseError::Invalid {
            line: hline,
            source: InstanceError::NoScenarios,
        });
    }
    if w == 0 {
        return Err(ParseError::Invalid {
            line: hline,
            source: InstanceError::ZeroCapacity,
        });
    }

    let mut items = Vec::with_capacity(n);
    for (line, l) in lines {
        if items.len() == n {
            return Err(malformed(line, "more item lines than declared"));
        }
        let toks: Vec<&str> = l.split_whitespace().collect();
        if toks.len() < 2 {
            return Err(malformed(line, "item line must be `size m k_1 .. k_m`"));
        }
        let size: u32 = parse_num(toks[0], line, "size")?;
        let m: usize = parse_num(toks[1], line, "scenario count")?;
        if m == 0 {
            return Err(ParseError::EmptyScenarioSet { line });
        }
        if toks.len() != 2 + m {
            return Err(malformed(
                line,
                format!("expected {m} scenario indices, found {}", toks.len() - 2),
            ));
        }
        let mut scenarios = Vec::with_capacity(m);
        for t in &toks[2..] {
            let k: usize = parse_num(t, line, "scenario index")?;
            if k == 0 || k > d {
                return Err(ParseError::ScenarioOutOfRange {
                    line,
                    index: k,
                    num_scenarios: d,
                });
            }
            scenarios.push(k - 1);
        }
        let item_idx = items.len();
        // validate per line so errors carry a line number
        let probe = Item::new(size, scenarios);
        Instance::new(d, w, vec![probe.clone()]).map_err(|e| ParseError::Invalid {
            line,
            source: reindex(e, item_idx),
        })?;
        items.push(probe);
    }
    if items.len() != n {
        return Err(ParseError::MissingItems {
            expected: n,
            found: items.len(),
        });
    }
    Instance::new(d, w, items).map_err(|e| ParseError::Invalid {
        line: hline,
        source: e,
    })
}

fn reindex(e: InstanceError, item_idx: usize) -> InstanceError {
    match e {
        InstanceError::SizeOutOfRange { size, capacity, .. } => InstanceError::SizeOutOfRange {
            item: item_idx,
            size,
            capacity,
        },
        InstanceError::EmptyScenarioSet { .. } => {
            InstanceError::EmptyScenarioSet { item: item_idx }
        }
        InstanceError::ScenarioOutOfRange {
            scenario,
            num_scenarios,
            ..
        } => InstanceError::ScenarioOutOfRange {
            item: item_idx,
            scenario,
            num_scenarios,
        },
        InstanceError::DuplicateScenario { scenario, .. } => InstanceError::DuplicateScenario {
            item: item_idx,
            scenario,
        },
        other => other,
    }
}

pub fn serialize_instance(instance: &Instance) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{} {} {}",
        instance.num_items(),
        instance.num_scenarios(),
        instance.capacity()
    );
    for item in instance.items() {
        let _ = write!(out, "{} {}", item.size, item.scenarios.len());
        for k in &item.scenarios {
            let _ = write!(out, " {}", k + 1);
        }
        out.push('\n');
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProofStatus {
    Optimal,
    Gap,
}

impl std::fmt::Display for ProofStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ProofStatus::Optimal => "optimal",
            ProofStatus::Gap => "gap",
        })
    }
}

/// Run metadata attached to a solution record.
#[derive(Debug, Clone, PartialEq)]
pub struct RunMetadata {
    pub algorithm: String,
    pub time_s: f64,
    pub status: ProofStatus,
    pub lower_bound: Option<usize>,
    pub nodes: Option<u64>,
    pub columns: Option<u64>,
}

impl RunMetadata {
    pub fn new(algorithm: impl Into<String>, time_s: f64, status: ProofStatus) -> Self {
        RunMetadata {
            algorithm: algorithm.into(),
            time_s,
            status,
            lower_bound: None,
            nodes: None,
            columns: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionRecord {
    pub algorithm: String,
    pub status: ProofStatus,
    pub val_bpps: usize,
    pub val_vbpp: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lower_bound: Option<usize>,
    pub time_s: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nodes: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub columns: Option<u64>,
    pub bins: Vec<Vec<usize>>,
}

impl SolutionRecord {
    pub fn build(
        instance: &Instance,
        solution: &Solution,
        meta: &RunMetadata,
    ) -> Result<Self, InfeasibleSolution> {
        let report = check_feasible(instance, solution);
        if !report.is_ok() {
            return Err(InfeasibleSolution(report));
        }
        Ok(SolutionRecord {
            algorithm: meta.algorithm.clone(),
            status: meta.status,
            val_bpps: val_bpps_unchecked(instance, solution),
            val_vbpp: val_vbpp(solution),
            lower_bound: meta.lower_bound,
            time_s: meta.time_s,
            nodes: meta.nodes,
            columns: meta.columns,
            bins: solution
                .bins()
                .iter()
                .map(|b| b.iter().map(|i| i + 1).collect())
                .collect(),
        })
    }

    /// The packed bins with 0-based item indices.
    pub fn solution(&self) -> Solution {
        Solution::new(
            self.bins
                .iter()
                .map(|b| b.iter().map(|i| i.saturating_sub(1)).collect())
                .collect(),
        )
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("record serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}

/// Builds the JSON record for a feasible solution.
pub fn serialize_solution(
    instance: &Instance,
    solution: &Solution,
    meta: &RunMetadata,
) -> Result<String, InfeasibleSolution> {
    SolutionRecord::build(instance, solution, meta).map(|r| r.to_json())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_header_and_items() {
        let text = "# toy\n3 2 100\n50 2 1 2\n\n30 1 1\n20 1 2\n";
        let inst = parse_instance(text).unwrap();
        assert_eq!(inst.num_items(), 3);
        assert_eq!(inst.num_scenarios(), 2);
        assert_eq!(inst.capacity(), 100);
        assert_eq!(inst.size(0), 50);
        assert_eq!(inst.scenarios_of(0), &[0, 1]);
        assert_eq!(parse_instance(&serialize_instance(&inst)).unwrap(), inst);
    }

    #[test]
    fn scenario_out_of_range_names_line() {
        let err = parse_instance("1 2 100\n50 1 3\n").unwrap_err();
        assert_eq!(
            err,
            ParseError::ScenarioOutOfRange {
                line: 2,
                index: 3,
                num_scenarios: 2
            }
        );
        assert!(err.to_string().starts_with("line 2"));
    }

    #[test]
    fn malformed_lines() {
        assert!(matches!(
            parse_instance("1 1 100\n50 0\n"),
            Err(ParseError::EmptyScenarioSet { line: 2 })
        ));
        assert!(matches!(
            parse_instance("1 1 100\n50 2 1\n"),
            Err(ParseError::Malformed { line: 2, .. })
        ));
        assert!(matches!(
            parse_instance("1 1 100\nfoo 1 1\n"),
            Err(ParseError::Malformed { line: 2, .. })
        ));
        assert!(matches!(
            parse_instance("2 1 100\n50 1 1\n"),
            Err(ParseError::MissingItems { expected: 2, found: 1 })
        ));
        assert!(matches!(
            parse_instance("1 1 100\n150 1 1\n"),
            Err(ParseError::Invalid { line: 2, .. })
        ));
        assert!(matches!(parse_instance("# nothing\n"), Err(ParseError::MissingHeader)));
    }

    #[test]
    fn solution_record_round_trip() {
        let inst = parse_instance("1 1 100\n40 1 1\n").unwrap();
        let sol = Solution::new(vec![vec![0]]);
        let mut meta = RunMetadata::new("bp", 0.125, ProofStatus::Optimal);
        meta.lower_bound = Some(1);
        let text = serialize_solution(&inst, &sol, &meta).unwrap();
        let rec = SolutionRecord::from_json(&text).unwrap();
        assert_eq!(rec.val_bpps, 1);
        assert_eq!(rec.bins, vec![vec![1]]);
        assert_eq!(rec.lower_bound, Some(1));
        assert_eq!(rec.solution(), sol);
        assert_eq!(rec.to_json(), text);
    }

    #[test]
    fn infeasible_solution_is_rejected() {
        let inst = parse_instance("2 1 100\n60 1 1\n60 1 1\n").unwrap();
        let meta = RunMetadata::new("x", 0.0, ProofStatus::Gap);
        assert!(serialize_solution(&inst, &Solution::new(vec![vec![0, 1]]), &meta).is_err());
    }
}
