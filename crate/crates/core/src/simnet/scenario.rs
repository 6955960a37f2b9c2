//! Line-oriented scenario files.
//!
//! ```text
//! # comment
//! N=25 SEED=<64 hex digits>
//! STORE redundant 3 6 reading.txt
//! FAIL 4
//! CAPTURE 4
//! CAPTURE_KEY 0
//! COLLECT 0
//! ```
//!
//! Groups are referred to by the ordinal of their STORE line, from 0. Data
//! paths are relative to the scenario's directory. Without any COLLECT line
//! every stored group is reported once at the end.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use thiserror::Error;

use super::{Network, SimError, SimReport};
use crate::addressing::PlacementSeed;
use crate::codec::Scheme;
use crate::partition::GroupId;
use crate::pipeline::{SplitPlan, SplitScheme};
use crate::redundancy::ExpansionMode;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScenarioError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("line {line}: cannot read {}: {message}", .path.display())]
    Io {
        line: usize,
        path: PathBuf,
        message: String,
    },
    #[error("line {line}: {source}")]
    Sim { line: usize, source: SimError },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StoreKind {
    RootK,
    Redundant,
    Composite,
}

impl StoreKind {
    fn parse(s: &str) -> Option<Self> {
        match s {
            "root_k" => Some(StoreKind::RootK),
            "redundant" => Some(StoreKind::Redundant),
            "composite" => Some(StoreKind::Composite),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Event {
    Fail(u64),
    Capture(u64),
    CaptureKey(usize),
    Store {
        kind: StoreKind,
        k: usize,
        n: u16,
        file: PathBuf,
    },
    Collect(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Scenario {
    pub size: u64,
    pub seed: PlacementSeed,
    /// Events with their 1-based line numbers.
    pub events: Vec<(usize, Event)>,
}

fn parse_err(line: usize, message: impl Into<String>) -> ScenarioError {
    ScenarioError::Parse {
        line,
        message: message.into(),
    }
}

fn parse_header(line: usize, text: &str) -> Result<(u64, PlacementSeed), ScenarioError> {
    let mut size = None;
    let mut seed = None;
    for token in text.split_whitespace() {
        match token.split_once('=') {
            Some(("N", v)) => {
                let n: u64 = v
                    .parse()
                    .map_err(|_| parse_err(line, format!("bad node count `{v}`")))?;
                if n == 0 {
                    return Err(parse_err(line, "N must be at least 1"));
                }
                size = Some(n);
            }
            Some(("SEED", v)) => {
                seed = Some(PlacementSeed::from_hex(v).ok_or_else(|| parse_err(line, "SEED must be 64 hex digits"))?);
            }
            _ => return Err(parse_err(line, format!("unexpected header token `{token}`"))),
        }
    }
    match (size, seed) {
        (Some(n), Some(s)) => Ok((n, s)),
        _ => Err(parse_err(line, "header needs N=<int> SEED=<hex>")),
    }
}

pub fn parse_scenario(text: &str) -> Result<Scenario, ScenarioError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());
    let (first, header) = lines.next().ok_or_else(|| parse_err(1, "empty scenario"))?;
    let (size, seed) = parse_header(first, header)?;

    let mut stores = 0usize;
    let mut events = Vec::new();
    for (line, text) in lines {
        let words: Vec<&str> = text.split_whitespace().collect();
        let number = |s: &str, what: &str| -> Result<u64, ScenarioError> {
            s.parse().map_err(|_| parse_err(line, format!("bad {what} `{s}`")))
        };
        let node = |s: &str| -> Result<u64, ScenarioError> {
            let id = number(s, "node id")?;
            if id >= size {
                return Err(parse_err(line, format!("node {id} outside 0..{size}")));
            }
            Ok(id)
        };
        let group = |s: &str| -> Result<usize, ScenarioError> {
            let g = number(s, "group")? as usize;
            if g >= stores {
                return Err(parse_err(line, format!("group {g} has not been stored yet")));
            }
            Ok(g)
        };
        let event = match words.as_slice() {
            ["FAIL", id] => Event::Fail(node(id)?),
            ["CAPTURE", id] => Event::Capture(node(id)?),
            ["CAPTURE_KEY", g] => Event::CaptureKey(group(g)?),
            ["COLLECT", g] => Event::Collect(group(g)?),
            ["STORE", kind, k, n, file] => {
                let kind = StoreKind::parse(kind).ok_or_else(|| {
                    parse_err(line, format!("unknown scheme `{kind}` (root_k, redundant, composite)"))
                })?;
                let k = number(k, "k")?;
                let n = number(n, "n")?;
                if k < 2 {
                    return Err(parse_err(line, "k must be at least 2"));
                }
                let ok = match kind {
                    StoreKind::Redundant => n >= k && n <= u64::from(u16::MAX),
                    _ => n == k,
                };
                if !ok {
                    return Err(parse_err(line, format!("n={n} does not fit scheme with k={k}")));
                }
                stores += 1;
                Event::Store {
                    kind,
                    k: k as usize,
                    n: n as u16,
                    file: PathBuf::from(file),
                }
            }
            _ => return Err(parse_err(line, format!("unrecognised event `{text}`"))),
        };
        events.push((line, event));
    }
    Ok(Scenario { size, seed, events })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CollectReport {
    pub ordinal: usize,
    pub group_id: GroupId,
    pub scheme: Scheme,
    pub placement: Vec<u64>,
    pub report: SimReport,
    /// Why collection failed, when it did.
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScenarioOutcome {
    pub size: u64,
    pub reports: Vec<CollectReport>,
    pub max_node_load: usize,
    pub fingerprint: [u8; 32],
}

impl ScenarioOutcome {
    pub fn all_retrievable(&self) -> bool {
        self.reports.iter().all(|r| r.report.retrievable)
    }

    /// One `key=value` per line.
    pub fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "nodes={}", self.size);
        for r in &self.reports {
            let placement: Vec<String> = r.placement.iter().map(u64::to_string).collect();
            let s = &r.report;
            let _ = writeln!(out, "collect={}", r.ordinal);
            let _ = writeln!(out, "group_id={}", r.group_id);
            let _ = writeln!(out, "scheme={}", r.scheme.name());
            let _ = writeln!(out, "placement={}", placement.join(","));
            let _ = writeln!(out, "stored={}", s.stored);
            let _ = writeln!(out, "retrievable={}", s.retrievable);
            let _ = writeln!(out, "shares_available={}", s.shares_available);
            let _ = writeln!(out, "shares_needed={}", s.shares_needed);
            let _ = writeln!(out, "adversary_shares={}", s.adversary_shares);
            let _ = writeln!(out, "adversary_learns_data={}", s.adversary_learns_data);
            if let Some(e) = &r.error {
                let _ = writeln!(out, "error={e}");
            }
        }
        let _ = writeln!(out, "max_node_load={}", self.max_node_load);
        let _ = writeln!(out, "fingerprint={}", hex::encode(self.fingerprint));
        out
    }
}

/// Replays the events in order against a fresh network.
pub fn run_scenario(scenario: &Scenario, base_dir: &Path) -> Result<ScenarioOutcome, ScenarioError> {
    let sim = |line: usize| move |source: SimError| ScenarioError::Sim { line, source };
    let mut net = Network::new(scenario.size, scenario.seed).map_err(sim(0))?;
    let mut groups: Vec<GroupId> = Vec::new();
    let mut reports = Vec::new();

    let collect =
        |net: &Network, ordinal: usize, group: GroupId, line: usize| -> Result<CollectReport, ScenarioError> {
            let report = net.adversary_report(group).map_err(sim(line))?;
            let error = net.collect_and_reconstruct(group).err().map(|e| e.to_string());
            Ok(CollectReport {
                ordinal,
                group_id: group,
                scheme: net.group_scheme(group).map_err(sim(line))?,
                placement: net.placement(group).map_err(sim(line))?.to_vec(),
                report,
                error,
            })
        };

    for (line, event) in &scenario.events {
        let line = *line;
        match event {
            Event::Fail(id) => net.fail_node(*id).map_err(sim(line))?,
            Event::Capture(id) => net.capture_node(*id).map_err(sim(line))?,
            Event::CaptureKey(g) => net.capture_key(groups[*g]).map_err(sim(line))?,
            Event::Collect(g) => reports.push(collect(&net, *g, groups[*g], line)?),
            Event::Store { kind, k, n, file } => {
                let path = base_dir.join(file);
                let data = std::fs::read(&path).map_err(|e| ScenarioError::Io {
                    line,
                    path: path.clone(),
                    message: e.to_string(),
                })?;
                let scheme = match kind {
                    StoreKind::RootK => SplitScheme::RootK,
                    StoreKind::Redundant => SplitScheme::Redundant {
                        n: *n,
                        mode: ExpansionMode::Structured,
                    },
                    StoreKind::Composite => SplitScheme::Composite(net.generate_key().map_err(sim(line))?),
                };
                let group = net.store_data(&data, &SplitPlan::new(*k, scheme)).map_err(sim(line))?;
                groups.push(group);
            }
        }
    }
    if !scenario.events.iter().any(|(_, e)| matches!(e, Event::Collect(_))) {
        let end = scenario.events.last().map_or(1, |(l, _)| *l);
        for (ordinal, group) in groups.iter().enumerate() {
            reports.push(collect(&net, ordinal, *group, end)?);
        }
    }
    Ok(ScenarioOutcome {
        size: net.size(),
        reports,
        max_node_load: net.share_counts().into_iter().max().unwrap_or(0),
        fingerprint: net.fingerprint(),
    })
}
