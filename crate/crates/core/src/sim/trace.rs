use serde::{Deserialize, Serialize};
use std::fmt::Write;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoundRecord {
    pub round: usize,
    pub max_bits: u64,
    pub messages: u64,
    pub total_bits: u64,
    pub nodes_output: usize,
}

/// One simulator run (or centralized step) inside a composed algorithm.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PhaseRecord {
    pub label: String,
    pub first_round: usize,
    pub rounds: usize,
    pub nodes: usize,
    pub max_bits: u64,
    /// Per-message bound the phase was run under, if any.
    pub bound: Option<u64>,
    /// True when the phase was computed centrally rather than by message passing.
    pub centralized: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoundTrace {
    pub rounds_elapsed: usize,
    pub records: Vec<RoundRecord>,
    pub phases: Vec<PhaseRecord>,
    pub notes: Vec<String>,
}

impl RoundTrace {
    /// Per-round maximum message size.
    pub fn max_message_bits(&self) -> Vec<u64> {
        self.records.iter().map(|r| r.max_bits).collect()
    }

    pub fn overall_max_bits(&self) -> u64 {
        self.records.iter().map(|r| r.max_bits).max().unwrap_or(0)
    }

    /// Appends `other` after the rounds of `self`, renumbering its rounds.
    /// `other`'s phases are prefixed with `label`.
    pub fn append(&mut self, label: &str, other: RoundTrace) {
        let offset = self.rounds_elapsed;
        self.records.extend(other.records.into_iter().map(|mut r| {
            r.round += offset;
            r
        }));
        self.phases.extend(other.phases.into_iter().map(|mut p| {
            p.first_round += offset;
            p.label = if label.is_empty() { p.label } else { format!("{label}/{}", p.label) };
            p
        }));
        self.notes.extend(other.notes);
        self.rounds_elapsed += other.rounds_elapsed;
    }

    /// Runs several traces side by side on disjoint node sets: round `r` of
    /// the result aggregates round `r` of every part.
    pub fn parallel(label: &str, parts: Vec<RoundTrace>) -> RoundTrace {
        let rounds = parts.iter().map(|t| t.rounds_elapsed).max().unwrap_or(0);
        let mut records: Vec<RoundRecord> = (1..=rounds)
            .map(|round| RoundRecord { round, max_bits: 0, messages: 0, total_bits: 0, nodes_output: 0 })
            .collect();
        let mut out = RoundTrace { rounds_elapsed: rounds, ..Default::default() };
        for (i, part) in parts.into_iter().enumerate() {
            let mut last_output = 0;
            let mut it = part.records.iter().peekable();
            for rec in records.iter_mut() {
                if let Some(r) = it.next_if(|r| r.round == rec.round) {
                    rec.max_bits = rec.max_bits.max(r.max_bits);
                    rec.messages += r.messages;
                    rec.total_bits += r.total_bits;
                    last_output = r.nodes_output;
                }
                rec.nodes_output += last_output;
            }
            out.phases.extend(part.phases.into_iter().map(|mut p| {
                p.label = format!("{label}[{i}]/{}", p.label);
                p
            }));
            out.notes.extend(part.notes);
        }
        out.records = records;
        out
    }

    pub fn note(&mut self, text: impl Into<String>) {
        self.notes.push(text.into());
    }

    /// Records a centralized step that takes no rounds.
    pub fn centralized(&mut self, label: &str, nodes: usize) {
        self.phases.push(PhaseRecord {
            label: label.to_string(),
            first_round: self.rounds_elapsed,
            rounds: 0,
            nodes,
            max_bits: 0,
            bound: None,
            centralized: true,
        });
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("round,max_bits,nodes_output_so_far\n");
        for r in &self.records {
            writeln!(s, "{},{},{}", r.round, r.max_bits, r.nodes_output).expect("string write");
        }
        s
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }
}
