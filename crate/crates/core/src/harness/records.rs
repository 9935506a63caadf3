//! Experiment records and their CSV/JSON serialization.
//!
//! The CSV schema is fixed: one header row, comma separators, string
//! fields quoted. A leading `# generated_unix=...` comment line carries
//! the only nondeterministic content; byte-identical reruns are
//! compared with that line stripped. The JSON mirror carries the same
//! fields record for record.

use serde::{Deserialize, Serialize};
use std::io::Write;

pub const CSV_COLUMNS: &str = "trial_index,code_seed,q,n,r,d,object_kind,object_id,count_in_ball,total_points,contained_bigball,ca_decision,planner_threshold,verdict";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial_index: u64,
    pub code_seed: u64,
    pub q: u64,
    pub n: usize,
    pub r: usize,
    /// exact minimum distance, "inf" for the zero code, "na" if not
    /// computed within budget
    pub d: String,
    pub object_kind: String,
    pub object_id: String,
    pub count_in_ball: u64,
    pub total_points: u64,
    pub contained_bigball: bool,
    pub ca_decision: Option<bool>,
    pub planner_threshold: Option<String>,
    pub verdict: String,
}

fn quoted(s: &str) -> String {
    format!("\"{}\"", s.replace('"', "\"\""))
}

impl TrialRecord {
    pub fn csv_line(&self) -> String {
        let ca = match self.ca_decision {
            Some(true) => "true",
            Some(false) => "false",
            None => "",
        };
        let pk = self
            .planner_threshold
            .as_deref()
            .map(quoted)
            .unwrap_or_default();
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            self.trial_index,
            self.code_seed,
            self.q,
            self.n,
            self.r,
            quoted(&self.d),
            quoted(&self.object_kind),
            quoted(&self.object_id),
            self.count_in_ball,
            self.total_points,
            self.contained_bigball,
            ca,
            pk,
            quoted(&self.verdict),
        )
    }
}

/// Records plus the run summary, as produced by the runners.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub mode: String,
    pub trials: u64,
    pub objects_checked: u64,
    pub records_emitted: u64,
    /// largest member count among objects not contained in H_{E+}
    pub max_count_noncontained: u64,
    /// member-count histogram over all checked objects
    pub histogram: std::collections::BTreeMap<u64, u64>,
    pub planner_k: Option<u64>,
    /// objects with count ≥ K+1 that are not contained (line-gap runs)
    pub violations_at_k: u64,
    pub ca_true: u64,
    pub ca_false: u64,
    /// ranks of witnesses assembled from stored preimages
    pub witness_rank_histogram: std::collections::BTreeMap<usize, u64>,
    /// threshold-check counterexamples; any nonzero count is a bug
    pub counterexamples: u64,
    pub wall_time_ms: u128,
}

impl Summary {
    pub fn new(mode: &str) -> Summary {
        Summary {
            mode: mode.to_string(),
            trials: 0,
            objects_checked: 0,
            records_emitted: 0,
            max_count_noncontained: 0,
            histogram: Default::default(),
            planner_k: None,
            violations_at_k: 0,
            ca_true: 0,
            ca_false: 0,
            witness_rank_histogram: Default::default(),
            counterexamples: 0,
            wall_time_ms: 0,
        }
    }

    /// Merges per-trial summaries (records are concatenated separately).
    pub fn absorb(&mut self, other: &Summary) {
        self.trials += other.trials;
        self.objects_checked += other.objects_checked;
        self.records_emitted += other.records_emitted;
        self.max_count_noncontained = self.max_count_noncontained.max(other.max_count_noncontained);
        for (k, v) in &other.histogram {
            *self.histogram.entry(*k).or_insert(0) += v;
        }
        self.violations_at_k += other.violations_at_k;
        self.ca_true += other.ca_true;
        self.ca_false += other.ca_false;
        for (k, v) in &other.witness_rank_histogram {
            *self.witness_rank_histogram.entry(*k).or_insert(0) += v;
        }
        self.counterexamples += other.counterexamples;
    }
}

pub fn unix_now() -> u64 {
    std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

/// CSV: timestamp comment, header, then one line per record.
pub fn write_csv(records: &[TrialRecord], mut w: impl Write) -> std::io::Result<()> {
    writeln!(w, "# generated_unix={}", unix_now())?;
    writeln!(w, "{CSV_COLUMNS}")?;
    for rec in records {
        writeln!(w, "{}", rec.csv_line())?;
    }
    Ok(())
}

#[derive(Serialize)]
struct JsonEnvelope<'a> {
    generated_unix: u64,
    records: &'a [TrialRecord],
}

/// JSON mirror of the CSV: same fields, plus the timestamp at the top
/// level (excluded from determinism comparisons).
pub fn write_json(records: &[TrialRecord], w: impl Write) -> std::io::Result<()> {
    let env = JsonEnvelope {
        generated_unix: unix_now(),
        records,
    };
    serde_json::to_writer_pretty(w, &env).map_err(std::io::Error::other)
}

/// Drops the timestamp line/field so reruns can be compared bytewise.
pub fn strip_timestamp(text: &str) -> String {
    text.lines()
        .filter(|l| !l.contains("generated_unix"))
        .collect::<Vec<_>>()
        .join("\n")
}
