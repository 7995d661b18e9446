//! Report records and their text and JSON-lines renderings.

use std::time::Instant;

use serde::Serialize;
use serde_json::Value;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Text,
    Machine,
}

/// How a command ended; the worst status wins.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Status {
    Pass = 0,
    Fail = 1,
    Violation = 2,
}

#[derive(Clone, Debug, Serialize)]
pub struct Record {
    pub id: String,
    pub anchor: String,
    pub verdict: String,
    pub witness: Value,
    /// Seconds, only with `--timings`, so that default reports are byte-stable.
    pub duration: Option<f64>,
    pub subject: String,
    pub seed: u64,
}

pub struct Report {
    pub seed: u64,
    pub timings: bool,
    pub records: Vec<Record>,
    /// Extra human-readable lines, text format only.
    pub notes: Vec<String>,
    pub status: Status,
}

impl Report {
    pub fn new(seed: u64, timings: bool) -> Self {
        Report { seed, timings, records: Vec::new(), notes: Vec::new(), status: Status::Pass }
    }

    pub fn push(&mut self, subject: &str, id: &str, anchor: &str, verdict: impl Serialize, witness: impl Serialize, started: Instant) {
        let verdict = match serde_json::to_value(verdict).expect("verdicts serialize") {
            Value::String(s) => s,
            other => other.to_string(),
        };
        self.records.push(Record {
            id: id.to_string(),
            anchor: anchor.to_string(),
            verdict,
            witness: serde_json::to_value(witness).expect("witnesses serialize"),
            duration: self.timings.then(|| started.elapsed().as_secs_f64()),
            subject: subject.to_string(),
            seed: self.seed,
        });
    }

    pub fn note(&mut self, line: impl Into<String>) {
        self.notes.push(line.into());
    }

    pub fn raise(&mut self, s: Status) {
        self.status = self.status.max(s);
    }

    pub fn render(&self, format: Format) -> String {
        let mut out = String::new();
        match format {
            Format::Machine => {
                for r in &self.records {
                    out.push_str(&serde_json::to_string(r).expect("records serialize"));
                    out.push('\n');
                }
            }
            Format::Text => {
                for n in &self.notes {
                    out.push_str(n);
                    out.push('\n');
                }
                for r in &self.records {
                    out.push_str(&format!("{:<9} {} {}  [{}]", r.verdict, r.subject, r.id, r.anchor));
                    if let Some(d) = r.duration {
                        out.push_str(&format!("  ({d:.3}s)"));
                    }
                    out.push('\n');
                    if !r.witness.is_null() {
                        out.push_str(&format!("          witness: {}\n", r.witness));
                    }
                }
                out.push_str(&format!("seed {}\n", self.seed));
            }
        }
        out
    }
}
