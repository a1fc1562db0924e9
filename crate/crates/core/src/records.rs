//! Trajectory records and their stable CSV schema.
//!
//! One schema serves the circuit and Hamiltonian experiments; untracked
//! observables stay empty. The header carries a schema version line so
//! consumers can detect drift. Floats are written with Rust's shortest
//! round-trip formatting, which is deterministic for equal values.

use std::fmt::Write as _;

use thiserror::Error;

/// Version line embedded as the first CSV comment.
pub const CSV_SCHEMA: &str = "camps-trajectory-v1";

/// Column list of the trajectory schema.
pub const CSV_COLUMNS: &str =
    "instance,step,time,max_ee_mps,max_ee_state,sre_density,max_bond,sweeps,backprop_ee";

#[derive(Debug, Error, PartialEq)]
pub enum RecordError {
    #[error("line {line}: expected {expected} fields, got {got}")]
    FieldCount {
        line: usize,
        expected: usize,
        got: usize,
    },

    #[error("line {line}: cannot parse field {field:?}: {value:?}")]
    Parse {
        line: usize,
        field: &'static str,
        value: String,
    },

    #[error("schema mismatch: expected {expected:?}, found {found:?}")]
    SchemaMismatch { expected: String, found: String },
}

/// One observation row of a simulated trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryRecord {
    pub instance: usize,
    pub step: usize,
    /// Physical time for Hamiltonian runs; empty for circuit steps.
    pub time: Option<f64>,
    /// Largest cut entropy of the tensor-network factor, in bits.
    pub max_ee_mps: f64,
    /// Largest cut entropy of the reference (fully evolved) state, if a
    /// reference branch was tracked.
    pub max_ee_state: Option<f64>,
    /// Stabilizer 2-Rényi entropy per site, when an evaluation path exists.
    pub sre_density: Option<f64>,
    pub max_bond: usize,
    /// Disentangler passes used at this step.
    pub sweeps: Option<usize>,
    /// Entropy after matchgate back-propagation, when tracked.
    pub backprop_ee: Option<f64>,
}

impl TrajectoryRecord {
    fn to_csv_row(&self) -> String {
        let mut row = String::new();
        let _ = write!(
            row,
            "{},{},{},{},{},{},{},{},{}",
            self.instance,
            self.step,
            opt(self.time),
            self.max_ee_mps,
            opt(self.max_ee_state),
            opt(self.sre_density),
            self.max_bond,
            opt_usize(self.sweeps),
            opt(self.backprop_ee),
        );
        row
    }

    fn from_csv_row(line_no: usize, row: &str) -> Result<Self, RecordError> {
        let fields: Vec<&str> = row.split(',').collect();
        if fields.len() != 9 {
            return Err(RecordError::FieldCount {
                line: line_no,
                expected: 9,
                got: fields.len(),
            });
        }
        Ok(Self {
            instance: parse(line_no, "instance", fields[0])?,
            step: parse(line_no, "step", fields[1])?,
            time: parse_opt(line_no, "time", fields[2])?,
            max_ee_mps: parse(line_no, "max_ee_mps", fields[3])?,
            max_ee_state: parse_opt(line_no, "max_ee_state", fields[4])?,
            sre_density: parse_opt(line_no, "sre_density", fields[5])?,
            max_bond: parse(line_no, "max_bond", fields[6])?,
            sweeps: parse_opt(line_no, "sweeps", fields[7])?,
            backprop_ee: parse_opt(line_no, "backprop_ee", fields[8])?,
        })
    }
}

fn opt(x: Option<f64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

fn opt_usize(x: Option<usize>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

fn parse<T: std::str::FromStr>(
    line: usize,
    field: &'static str,
    value: &str,
) -> Result<T, RecordError> {
    value.parse().map_err(|_| RecordError::Parse {
        line,
        field,
        value: value.to_string(),
    })
}

fn parse_opt<T: std::str::FromStr>(
    line: usize,
    field: &'static str,
    value: &str,
) -> Result<Option<T>, RecordError> {
    if value.is_empty() {
        return Ok(None);
    }
    parse(line, field, value).map(Some)
}

/// Serializes records, sorted by `(instance, step)`, with the schema header.
pub fn to_csv(records: &[TrajectoryRecord]) -> String {
    let mut sorted: Vec<&TrajectoryRecord> = records.iter().collect();
    sorted.sort_by_key(|r| (r.instance, r.step));
    let mut out = format!("# schema: {CSV_SCHEMA}\n{CSV_COLUMNS}\n");
    for r in sorted {
        out.push_str(&r.to_csv_row());
        out.push('\n');
    }
    out
}

/// Parses a CSV produced by [`to_csv`], verifying the schema line.
pub fn from_csv(text: &str) -> Result<Vec<TrajectoryRecord>, RecordError> {
    let mut records = Vec::new();
    let mut saw_schema = false;
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        if let Some(comment) = line.strip_prefix('#') {
            let comment = comment.trim();
            if let Some(found) = comment.strip_prefix("schema:") {
                let found = found.trim();
                if found != CSV_SCHEMA {
                    return Err(RecordError::SchemaMismatch {
                        expected: CSV_SCHEMA.to_string(),
                        found: found.to_string(),
                    });
                }
                saw_schema = true;
            }
            continue;
        }
        if line.is_empty() || line == CSV_COLUMNS {
            continue;
        }
        records.push(TrajectoryRecord::from_csv_row(line_no, line)?);
    }
    if !saw_schema {
        return Err(RecordError::SchemaMismatch {
            expected: CSV_SCHEMA.to_string(),
            found: "<missing>".to_string(),
        });
    }
    Ok(records)
}

/// Per-step aggregate over instances.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub step: usize,
    pub time: Option<f64>,
    pub count: usize,
    pub mean_max_ee_mps: f64,
    pub std_max_ee_mps: f64,
    pub mean_max_ee_state: Option<f64>,
    pub std_max_ee_state: Option<f64>,
    pub mean_sre_density: Option<f64>,
    pub std_sre_density: Option<f64>,
    pub mean_max_bond: f64,
    pub std_max_bond: f64,
    pub mean_backprop_ee: Option<f64>,
    pub std_backprop_ee: Option<f64>,
}

/// Population mean and standard deviation.
fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    (mean, var.sqrt())
}

fn mean_std_opt(values: &[Option<f64>]) -> (Option<f64>, Option<f64>) {
    let present: Vec<f64> = values.iter().flatten().copied().collect();
    if present.len() != values.len() || present.is_empty() {
        return (None, None);
    }
    let (m, s) = mean_std(&present);
    (Some(m), Some(s))
}

/// Aggregates records per step (population convention for the deviation).
pub fn summarize(records: &[TrajectoryRecord]) -> Vec<SummaryRow> {
    let mut steps: Vec<usize> = records.iter().map(|r| r.step).collect();
    steps.sort_unstable();
    steps.dedup();
    steps
        .into_iter()
        .map(|step| {
            let group: Vec<&TrajectoryRecord> = records.iter().filter(|r| r.step == step).collect();
            let (mean_ee, std_ee) =
                mean_std(&group.iter().map(|r| r.max_ee_mps).collect::<Vec<_>>());
            let (mean_state, std_state) =
                mean_std_opt(&group.iter().map(|r| r.max_ee_state).collect::<Vec<_>>());
            let (mean_sre, std_sre) =
                mean_std_opt(&group.iter().map(|r| r.sre_density).collect::<Vec<_>>());
            let (mean_bond, std_bond) =
                mean_std(&group.iter().map(|r| r.max_bond as f64).collect::<Vec<_>>());
            let (mean_bp, std_bp) =
                mean_std_opt(&group.iter().map(|r| r.backprop_ee).collect::<Vec<_>>());
            SummaryRow {
                step,
                time: group[0].time,
                count: group.len(),
                mean_max_ee_mps: mean_ee,
                std_max_ee_mps: std_ee,
                mean_max_ee_state: mean_state,
                std_max_ee_state: std_state,
                mean_sre_density: mean_sre,
                std_sre_density: std_sre,
                mean_max_bond: mean_bond,
                std_max_bond: std_bond,
                mean_backprop_ee: mean_bp,
                std_backprop_ee: std_bp,
            }
        })
        .collect()
}

/// CSV form of a summary table.
pub fn summary_to_csv(rows: &[SummaryRow]) -> String {
    let mut out = String::from("# schema: camps-summary-v1\n");
    out.push_str(
        "step,time,count,max_ee_mps_mean,max_ee_mps_std,max_ee_state_mean,max_ee_state_std,\
         sre_density_mean,sre_density_std,max_bond_mean,max_bond_std,\
         backprop_ee_mean,backprop_ee_std\n",
    );
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{},{}",
            r.step,
            opt(r.time),
            r.count,
            r.mean_max_ee_mps,
            r.std_max_ee_mps,
            opt(r.mean_max_ee_state),
            opt(r.std_max_ee_state),
            opt(r.mean_sre_density),
            opt(r.std_sre_density),
            r.mean_max_bond,
            r.std_max_bond,
            opt(r.mean_backprop_ee),
            opt(r.std_backprop_ee),
        );
    }
    out
}
