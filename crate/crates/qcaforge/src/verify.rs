//! Output decoding, truth-table checking, and comparison-table generation.
//!
//! The pipeline: the engine produces a [`Trace`], [`decode_output`] turns it
//! into one bit (or an undecodable marker) per input vector, and
//! [`check_truth_table`] drives a circuit through the expanded stimuli of a
//! [`TruthTable`] and scores every row. [`comparison_report`] regenerates the
//! size/latency comparison against reference designs from the literature.

use std::fmt;

use thiserror::Error;

use crate::engine::{EngineError, InputVector, SimConfig, Simulator, Trace};
use crate::model::{metrics_report, Layout, MetricsError};
use crate::stdcells::CircuitHandle;

/// Decision threshold for reading a bit off a polarization.
pub const DECODE_THRESHOLD: f64 = 0.5;

/// Read one polarization as a logic level: above `+threshold` is 1, below
/// `-threshold` is 0, anything in the dead band is undecodable (`None`).
pub fn decode_polarization(p: f64, threshold: f64) -> Option<bool> {
    if p > threshold {
        Some(true)
    } else if p < -threshold {
        Some(false)
    } else {
        None
    }
}

/// Decode the bit stream an output cell produced: one entry per input vector,
/// read at the final sample of the cell's hold quarter within that vector's
/// cycle (cells hold their resolved value only while their zone's barrier is
/// high, so that is the only honest place to look).
pub fn decode_output(
    trace: &Trace,
    label: &str,
    layout: &Layout,
) -> Result<Vec<Option<bool>>, VerifyError> {
    let cell = layout
        .output_cell(label)
        .ok_or_else(|| VerifyError::UnknownOutput(label.to_string()))?;
    let zone = layout.cells[cell].zone as usize;
    let spc = trace.samples_per_cycle;
    let quarter = spc / 4;
    // Zone z switches during quarter z and holds during quarter (z+1) mod 4.
    let hold_quarter = (zone + 1) % 4;
    let mut bits = Vec::with_capacity(trace.vector_count);
    for v in 0..trace.vector_count {
        let sample = v * spc + (hold_quarter + 1) * quarter - 1;
        let p = trace.rows[sample].polarizations[cell];
        bits.push(decode_polarization(p, DECODE_THRESHOLD));
    }
    Ok(bits)
}

/// Boolean three-input majority.
pub fn majority(a: bool, b: bool, c: bool) -> bool {
    (a && b) || (b && c) || (a && c)
}

/// Software reference for a transparent-high D latch driven with one
/// `(select, d)` pair per clock cycle. State starts at logic 0.
pub fn latch_model(stream: &[(bool, bool)]) -> Vec<bool> {
    let mut q = false;
    stream
        .iter()
        .map(|&(select, d)| {
            if select {
                q = d;
            }
            q
        })
        .collect()
}

/// Software reference for an edge-triggered D flip-flop driven with one
/// `(clock, d)` pair per cycle: captures `d` when the clock crosses in the
/// chosen direction between consecutive vectors. State starts at logic 0 and
/// the first vector can never be an edge (there is no predecessor).
pub fn dff_model(stream: &[(bool, bool)], rising: bool) -> Vec<bool> {
    let mut q = false;
    let mut prev: Option<bool> = None;
    stream
        .iter()
        .map(|&(clock, d)| {
            if let Some(before) = prev {
                if before != clock && clock == rising {
                    q = d;
                }
            }
            prev = Some(clock);
            q
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Truth tables
// ---------------------------------------------------------------------------

/// First line of every truth-table file.
pub const TABLE_MAGIC: &str = "qcaforge-table v1";

/// One input entry of a table row.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CellValue {
    Zero,
    One,
    /// `x`: expands to both levels.
    Any,
    /// `01`: a 0→1 transition between consecutive cycles (clock column only).
    Rise,
    /// `10`: a 1→0 transition between consecutive cycles (clock column only).
    Fall,
}

impl CellValue {
    fn parse(token: &str) -> Option<CellValue> {
        match token {
            "0" => Some(CellValue::Zero),
            "1" => Some(CellValue::One),
            "x" => Some(CellValue::Any),
            "01" => Some(CellValue::Rise),
            "10" => Some(CellValue::Fall),
            _ => None,
        }
    }

    fn token(self) -> &'static str {
        match self {
            CellValue::Zero => "0",
            CellValue::One => "1",
            CellValue::Any => "x",
            CellValue::Rise => "01",
            CellValue::Fall => "10",
        }
    }
}

/// What a table row claims the output becomes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Expected {
    Zero,
    One,
    /// Output keeps its previous decoded value (sequential rows only).
    Hold,
}

impl Expected {
    fn token(self) -> &'static str {
        match self {
            Expected::Zero => "0",
            Expected::One => "1",
            Expected::Hold => "hold",
        }
    }
}

/// One row of a truth table: an entry per input column plus the expectation.
#[derive(Debug, Clone, PartialEq)]
pub struct TableRow {
    pub values: Vec<CellValue>,
    pub expected: Expected,
}

/// A behavioural contract: input columns (one of which may be designated the
/// clock and may then carry transition entries) and expected outputs.
#[derive(Debug, Clone, PartialEq)]
pub struct TruthTable {
    /// All input columns, in file order — including the clock column.
    pub input_labels: Vec<String>,
    /// Which input column (if any) is driven with transitions.
    pub clock_column: Option<String>,
    pub output_label: String,
    pub rows: Vec<TableRow>,
}

/// Most `x` entries allowed in one row (caps the expansion blow-up).
const MAX_WILDCARDS_PER_ROW: usize = 16;

impl TruthTable {
    /// Structural sanity: widths match, transition entries only in the clock
    /// column, `hold` only meaningful when a clock column exists.
    pub fn validate(&self) -> Result<(), String> {
        if self.input_labels.is_empty() {
            return Err("table has no input columns".into());
        }
        for (i, a) in self.input_labels.iter().enumerate() {
            if self.input_labels[..i].contains(a) {
                return Err(format!("duplicate input column {a:?}"));
            }
        }
        if self.output_label.is_empty() {
            return Err("table has no output column".into());
        }
        if self.input_labels.contains(&self.output_label) {
            return Err(format!(
                "output {:?} is also an input column",
                self.output_label
            ));
        }
        let clock_index = match &self.clock_column {
            Some(label) => Some(
                self.input_labels
                    .iter()
                    .position(|l| l == label)
                    .ok_or_else(|| format!("clock column {label:?} is not an input column"))?,
            ),
            None => None,
        };
        for (r, row) in self.rows.iter().enumerate() {
            if row.values.len() != self.input_labels.len() {
                return Err(format!(
                    "row {} has {} entries, expected {}",
                    r + 1,
                    row.values.len(),
                    self.input_labels.len()
                ));
            }
            let wildcards = row
                .values
                .iter()
                .filter(|v| **v == CellValue::Any)
                .count();
            if wildcards > MAX_WILDCARDS_PER_ROW {
                return Err(format!("row {} has more than 16 `x` entries", r + 1));
            }
            for (c, value) in row.values.iter().enumerate() {
                let is_transition = matches!(value, CellValue::Rise | CellValue::Fall);
                if is_transition && clock_index != Some(c) {
                    return Err(format!(
                        "row {}: transition entry in non-clock column {:?}",
                        r + 1,
                        self.input_labels[c]
                    ));
                }
            }
            if row.expected == Expected::Hold && clock_index.is_none() {
                return Err(format!(
                    "row {}: `hold` needs a clock column",
                    r + 1
                ));
            }
        }
        Ok(())
    }
}

/// Truth-table file syntax error with its 1-based line number.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("table line {line}: {message}")]
pub struct TableParseError {
    pub line: usize,
    pub message: String,
}

fn table_err(line: usize, message: impl Into<String>) -> TableParseError {
    TableParseError {
        line,
        message: message.into(),
    }
}

/// Parse the `qcaforge-table v1` plain-text format.
///
/// ```text
/// qcaforge-table v1
/// inputs P S clock D
/// clock clock
/// output out
/// 0 0 x x -> 0
/// 1 0 01 1 -> 1
/// 0 1 10 x -> hold
/// ```
///
/// Directives must appear in order (`inputs`, optional `clock`, `output`),
/// rows follow; `#` starts a comment.
pub fn parse_table(text: &str) -> Result<TruthTable, TableParseError> {
    let mut saw_magic = false;
    let mut input_labels: Option<Vec<String>> = None;
    let mut clock_column: Option<String> = None;
    let mut output_label: Option<String> = None;
    let mut rows: Vec<TableRow> = Vec::new();
    let mut last_line = 0;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        last_line = line_no;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if !saw_magic {
            if line != TABLE_MAGIC {
                return Err(table_err(
                    line_no,
                    format!("expected `{TABLE_MAGIC}`, found {line:?}"),
                ));
            }
            saw_magic = true;
            continue;
        }
        let tokens: Vec<&str> = line.split_whitespace().collect();
        match tokens[0] {
            "inputs" => {
                if input_labels.is_some() {
                    return Err(table_err(line_no, "duplicate `inputs` line"));
                }
                if output_label.is_some() || !rows.is_empty() {
                    return Err(table_err(line_no, "`inputs` must come first"));
                }
                let labels: Vec<String> = tokens[1..].iter().map(|t| t.to_string()).collect();
                if labels.is_empty() {
                    return Err(table_err(line_no, "`inputs` needs at least one label"));
                }
                for (i, l) in labels.iter().enumerate() {
                    if labels[..i].contains(l) {
                        return Err(table_err(line_no, format!("duplicate input column {l:?}")));
                    }
                }
                input_labels = Some(labels);
            }
            "clock" => {
                if clock_column.is_some() {
                    return Err(table_err(line_no, "duplicate `clock` line"));
                }
                if tokens.len() != 2 {
                    return Err(table_err(line_no, "`clock` takes exactly one label"));
                }
                let inputs = input_labels
                    .as_ref()
                    .ok_or_else(|| table_err(line_no, "`clock` before `inputs`"))?;
                if !inputs.iter().any(|l| l == tokens[1]) {
                    return Err(table_err(
                        line_no,
                        format!("clock column {:?} is not an input column", tokens[1]),
                    ));
                }
                if !rows.is_empty() || output_label.is_some() {
                    return Err(table_err(line_no, "`clock` must come before `output`"));
                }
                clock_column = Some(tokens[1].to_string());
            }
            "output" => {
                if output_label.is_some() {
                    return Err(table_err(line_no, "duplicate `output` line"));
                }
                if tokens.len() != 2 {
                    return Err(table_err(line_no, "`output` takes exactly one label"));
                }
                let inputs = input_labels
                    .as_ref()
                    .ok_or_else(|| table_err(line_no, "`output` before `inputs`"))?;
                if inputs.iter().any(|l| l == tokens[1]) {
                    return Err(table_err(
                        line_no,
                        format!("output {:?} is also an input column", tokens[1]),
                    ));
                }
                output_label = Some(tokens[1].to_string());
            }
            _ => {
                let inputs = input_labels
                    .as_ref()
                    .ok_or_else(|| table_err(line_no, "row before `inputs` line"))?;
                if output_label.is_none() {
                    return Err(table_err(line_no, "row before `output` line"));
                }
                if tokens.len() != inputs.len() + 2 || tokens[inputs.len()] != "->" {
                    return Err(table_err(
                        line_no,
                        format!(
                            "expected {} values, `->`, and an expectation",
                            inputs.len()
                        ),
                    ));
                }
                let clock_index = clock_column
                    .as_ref()
                    .and_then(|c| inputs.iter().position(|l| l == c));
                let mut values = Vec::with_capacity(inputs.len());
                for (c, token) in tokens[..inputs.len()].iter().enumerate() {
                    let value = CellValue::parse(token)
                        .ok_or_else(|| table_err(line_no, format!("bad value {token:?}")))?;
                    let is_transition = matches!(value, CellValue::Rise | CellValue::Fall);
                    if is_transition && clock_index != Some(c) {
                        return Err(table_err(
                            line_no,
                            format!("transition entry in non-clock column {:?}", inputs[c]),
                        ));
                    }
                    values.push(value);
                }
                if values.iter().filter(|v| **v == CellValue::Any).count()
                    > MAX_WILDCARDS_PER_ROW
                {
                    return Err(table_err(line_no, "more than 16 `x` entries in one row"));
                }
                let expected = match tokens[inputs.len() + 1] {
                    "0" => Expected::Zero,
                    "1" => Expected::One,
                    "hold" => {
                        if clock_column.is_none() {
                            return Err(table_err(line_no, "`hold` needs a clock column"));
                        }
                        Expected::Hold
                    }
                    other => {
                        return Err(table_err(line_no, format!("bad expectation {other:?}")))
                    }
                };
                rows.push(TableRow { values, expected });
            }
        }
    }

    if !saw_magic {
        return Err(table_err(1, format!("expected `{TABLE_MAGIC}`")));
    }
    let input_labels =
        input_labels.ok_or_else(|| table_err(last_line.max(1), "missing `inputs` line"))?;
    let output_label =
        output_label.ok_or_else(|| table_err(last_line.max(1), "missing `output` line"))?;
    Ok(TruthTable {
        input_labels,
        clock_column,
        output_label,
        rows,
    })
}

/// Serialize a table in the canonical `qcaforge-table v1` form ([`parse_table`]
/// of the result reproduces the table exactly).
pub fn write_table(table: &TruthTable) -> String {
    let mut out = String::new();
    out.push_str(TABLE_MAGIC);
    out.push('\n');
    out.push_str("inputs ");
    out.push_str(&table.input_labels.join(" "));
    out.push('\n');
    if let Some(clock) = &table.clock_column {
        out.push_str("clock ");
        out.push_str(clock);
        out.push('\n');
    }
    out.push_str("output ");
    out.push_str(&table.output_label);
    out.push('\n');
    for row in &table.rows {
        let tokens: Vec<&str> = row.values.iter().map(|v| v.token()).collect();
        out.push_str(&tokens.join(" "));
        out.push_str(" -> ");
        out.push_str(row.expected.token());
        out.push('\n');
    }
    out
}

// ---------------------------------------------------------------------------
// Row expansion
// ---------------------------------------------------------------------------

/// One concrete, simulatable realization of a table row: either a single
/// static assignment or a `(pre, post)` cycle pair realizing a clock
/// transition.
#[derive(Debug, Clone, PartialEq)]
pub enum Stimulus {
    Static {
        inputs: InputVector,
        expected: Expected,
        row: usize,
    },
    Transition {
        pre: InputVector,
        post: InputVector,
        expected: Expected,
        row: usize,
    },
}

impl Stimulus {
    pub fn expected(&self) -> Expected {
        match self {
            Stimulus::Static { expected, .. } | Stimulus::Transition { expected, .. } => *expected,
        }
    }

    /// Index of the table row this stimulus came from.
    pub fn row(&self) -> usize {
        match self {
            Stimulus::Static { row, .. } | Stimulus::Transition { row, .. } => *row,
        }
    }
}

/// Expand every row into concrete stimuli: each `x` becomes both levels
/// (leftmost column varying slowest), `01`/`10` become a pre/post vector
/// pair, an `x` in the clock column expands to both static levels.
///
/// The table must already be [`TruthTable::validate`]d.
pub fn expand_rows(table: &TruthTable) -> Vec<Stimulus> {
    let clock_index = table
        .clock_column
        .as_ref()
        .and_then(|c| table.input_labels.iter().position(|l| l == c));
    let mut out = Vec::new();
    for (row_idx, row) in table.rows.iter().enumerate() {
        let wild: Vec<usize> = (0..row.values.len())
            .filter(|&i| row.values[i] == CellValue::Any)
            .collect();
        for combo in 0..(1u32 << wild.len()) {
            let mut concrete = row.values.clone();
            for (bit, &col) in wild.iter().enumerate() {
                let shift = wild.len() - 1 - bit;
                concrete[col] = if (combo >> shift) & 1 == 1 {
                    CellValue::One
                } else {
                    CellValue::Zero
                };
            }
            let transition = clock_index.and_then(|ci| match concrete[ci] {
                CellValue::Rise => Some((false, true)),
                CellValue::Fall => Some((true, false)),
                _ => None,
            });
            match transition {
                None => {
                    let mut inputs = InputVector::new();
                    for (i, label) in table.input_labels.iter().enumerate() {
                        inputs.insert(label.clone(), concrete[i] == CellValue::One);
                    }
                    out.push(Stimulus::Static {
                        inputs,
                        expected: row.expected,
                        row: row_idx,
                    });
                }
                Some((from, to)) => {
                    let ci = clock_index.expect("transition implies a clock column");
                    let mut pre = InputVector::new();
                    let mut post = InputVector::new();
                    for (i, label) in table.input_labels.iter().enumerate() {
                        if i == ci {
                            pre.insert(label.clone(), from);
                            post.insert(label.clone(), to);
                        } else {
                            let level = concrete[i] == CellValue::One;
                            pre.insert(label.clone(), level);
                            post.insert(label.clone(), level);
                        }
                    }
                    out.push(Stimulus::Transition {
                        pre,
                        post,
                        expected: row.expected,
                        row: row_idx,
                    });
                }
            }
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Truth-table checking
// ---------------------------------------------------------------------------

/// Verdict for one concrete stimulus.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowOutcome {
    Pass,
    Fail {
        expected: bool,
        got: bool,
    },
    /// Either the output sat in the dead band at the decision sample, or a
    /// `hold` expectation had no previous decoded value to compare against.
    Undecodable {
        expected: Option<bool>,
    },
}

/// Result for one concrete stimulus, tagged with its source row.
#[derive(Debug, Clone, PartialEq)]
pub struct RowResult {
    /// 0-based index into [`TruthTable::rows`].
    pub row: usize,
    /// Human-readable rendering of the stimulus, e.g. `P=0 S=1 clock=01 D=1`.
    pub stimulus: String,
    /// Expectation as written in the table.
    pub expected: Expected,
    pub outcome: RowOutcome,
}

/// Everything [`check_truth_table`] learned about one circuit.
#[derive(Debug, Clone, PartialEq)]
pub struct VerificationReport {
    pub circuit: String,
    pub output_label: String,
    pub rows: Vec<RowResult>,
    /// Measured input→output alignment, in clock phases (whole cycles × 4).
    pub latency_phases: u32,
    /// Samples across all verification runs that missed the relax tolerance.
    pub convergence_warnings: usize,
    /// True iff every row passed (an undecodable row fails the verdict).
    pub passed: bool,
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "circuit: {}", self.circuit)?;
        writeln!(f, "output: {}", self.output_label)?;
        for r in &self.rows {
            let verdict = match r.outcome {
                RowOutcome::Pass => "pass".to_string(),
                RowOutcome::Fail { expected, got } => format!(
                    "FAIL (expected {}, got {})",
                    u8::from(expected),
                    u8::from(got)
                ),
                RowOutcome::Undecodable { .. } => "UNDECODABLE".to_string(),
            };
            writeln!(
                f,
                "row {:>2}  [{}] -> {:<4}  {}",
                r.row + 1,
                r.stimulus,
                r.expected.token(),
                verdict
            )?;
        }
        writeln!(f, "latency: {} clock phases", self.latency_phases)?;
        writeln!(f, "convergence warnings: {}", self.convergence_warnings)?;
        write!(f, "verdict: {}", if self.passed { "PASS" } else { "FAIL" })
    }
}

impl VerificationReport {
    /// CSV rendering: one line per concrete stimulus.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("row,stimulus,expected,outcome,got\n");
        for r in &self.rows {
            let (outcome, got) = match r.outcome {
                RowOutcome::Pass => ("pass", String::new()),
                RowOutcome::Fail { got, .. } => ("fail", u8::from(got).to_string()),
                RowOutcome::Undecodable { .. } => ("undecodable", String::new()),
            };
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                r.row + 1,
                r.stimulus,
                r.expected.token(),
                outcome,
                got
            ));
        }
        out
    }
}

/// Where a `hold` expectation finds its reference value.
enum HoldRef {
    /// Decoded value of the previous stimulus at its decision cycle.
    PreviousDecision,
    /// Decoded value at a specific cycle (the last pre-transition cycle).
    Cycle(usize),
}

fn describe_stimulus(table: &TruthTable, stim: &Stimulus) -> String {
    let mut parts = Vec::with_capacity(table.input_labels.len());
    for label in &table.input_labels {
        match stim {
            Stimulus::Static { inputs, .. } => {
                parts.push(format!("{label}={}", u8::from(inputs[label])));
            }
            Stimulus::Transition { pre, post, .. } => {
                let (a, b) = (pre[label], post[label]);
                if a == b {
                    parts.push(format!("{label}={}", u8::from(b)));
                } else {
                    parts.push(format!("{label}={}{}", u8::from(a), u8::from(b)));
                }
            }
        }
    }
    parts.join(" ")
}

fn push_probe(vectors: &mut Vec<InputVector>, stim: &Stimulus) {
    match stim {
        Stimulus::Static { inputs, .. } => {
            for _ in 0..4 {
                vectors.push(inputs.clone());
            }
        }
        Stimulus::Transition { pre, post, .. } => {
            for _ in 0..3 {
                vectors.push(pre.clone());
            }
            for _ in 0..4 {
                vectors.push(post.clone());
            }
        }
    }
}

/// Measure the circuit's vector alignment: drive two stimuli with definite,
/// opposite expectations and count how many cycles pass between applying the
/// second one and its value appearing at the output. Returns the alignment
/// (clamped to 0..=3 cycles, 0 if it cannot be measured) plus any
/// non-converged sample count from the probe run.
fn measure_alignment(
    sim: &Simulator,
    layout: &Layout,
    output: &str,
    stimuli: &[Stimulus],
) -> Result<(usize, usize), VerifyError> {
    let Some(first) = stimuli.iter().find(|s| s.expected() != Expected::Hold) else {
        return Ok((0, 0));
    };
    let want = match first.expected() {
        Expected::Zero => Expected::One,
        _ => Expected::Zero,
    };
    let Some(second) = stimuli.iter().find(|s| s.expected() == want) else {
        return Ok((0, 0));
    };

    let mut vectors = Vec::new();
    push_probe(&mut vectors, first);
    let boundary = vectors.len();
    push_probe(&mut vectors, second);
    let trigger = boundary
        + match second {
            Stimulus::Transition { .. } => 3,
            Stimulus::Static { .. } => 0,
        };

    let trace = sim.simulate(layout, &vectors)?;
    let decoded = decode_output(&trace, output, layout)?;
    let target = want == Expected::One;
    let k = (trigger..vectors.len())
        .find(|&i| decoded[i] == Some(target))
        .map_or(0, |i| (i - trigger).min(3));
    Ok((k, trace.non_converged_samples()))
}

/// Drive `circuit` through every expanded row of `table` and score each one.
///
/// The stimuli run as one continuous simulation (sequential rows need the
/// state built up by their predecessors). Each static stimulus is held for
/// `3 + k` cycles and scored at the last; each transition stimulus holds its
/// pre-vector for 3 cycles, then the post-vector for `1 + k`, where `k` is
/// the measured alignment. `hold` rows compare against the decoded value
/// just before the transition (or the previous stimulus's decision for
/// static rows); a `hold` as the very first stimulus is undecodable.
pub fn check_truth_table(
    circuit: &CircuitHandle,
    table: &TruthTable,
    config: &SimConfig,
) -> Result<VerificationReport, VerifyError> {
    table.validate().map_err(VerifyError::BadTable)?;
    let layout = &circuit.layout;
    for label in &table.input_labels {
        if layout.input_cell(label).is_none() {
            return Err(VerifyError::UnknownInput(label.clone()));
        }
    }
    for label in &layout.inputs {
        if !table.input_labels.iter().any(|l| l == label) {
            return Err(VerifyError::UndrivenInput(label.clone()));
        }
    }
    if layout.output_cell(&table.output_label).is_none() {
        return Err(VerifyError::UnknownOutput(table.output_label.clone()));
    }

    let stimuli = expand_rows(table);
    if stimuli.is_empty() {
        return Ok(VerificationReport {
            circuit: layout.name.clone(),
            output_label: table.output_label.clone(),
            rows: Vec::new(),
            latency_phases: 0,
            convergence_warnings: 0,
            passed: true,
        });
    }

    let sim = Simulator::new(config.clone())?;
    let (k, probe_warnings) = measure_alignment(&sim, layout, &table.output_label, &stimuli)?;

    let mut vectors: Vec<InputVector> = Vec::new();
    let mut decision = Vec::with_capacity(stimuli.len());
    let mut hold_ref = Vec::with_capacity(stimuli.len());
    for stim in &stimuli {
        let start = vectors.len();
        match stim {
            Stimulus::Static { inputs, .. } => {
                for _ in 0..3 + k {
                    vectors.push(inputs.clone());
                }
                decision.push(start + 2 + k);
                hold_ref.push(HoldRef::PreviousDecision);
            }
            Stimulus::Transition { pre, post, .. } => {
                for _ in 0..3 {
                    vectors.push(pre.clone());
                }
                for _ in 0..1 + k {
                    vectors.push(post.clone());
                }
                decision.push(start + 3 + k);
                hold_ref.push(HoldRef::Cycle(start + 2));
            }
        }
    }

    let trace = sim.simulate(layout, &vectors)?;
    let decoded = decode_output(&trace, &table.output_label, layout)?;

    let mut rows = Vec::with_capacity(stimuli.len());
    let mut passed = true;
    for (i, stim) in stimuli.iter().enumerate() {
        let got = decoded[decision[i]];
        let expected = match stim.expected() {
            Expected::Zero => Some(false),
            Expected::One => Some(true),
            Expected::Hold => match hold_ref[i] {
                HoldRef::Cycle(c) => decoded[c],
                HoldRef::PreviousDecision => {
                    if i == 0 {
                        None
                    } else {
                        decoded[decision[i - 1]]
                    }
                }
            },
        };
        let outcome = match (expected, got) {
            (Some(e), Some(g)) if e == g => RowOutcome::Pass,
            (Some(e), Some(g)) => RowOutcome::Fail {
                expected: e,
                got: g,
            },
            (expected, _) => RowOutcome::Undecodable { expected },
        };
        if outcome != RowOutcome::Pass {
            passed = false;
        }
        rows.push(RowResult {
            row: stim.row(),
            stimulus: describe_stimulus(table, stim),
            expected: stim.expected(),
            outcome,
        });
    }

    Ok(VerificationReport {
        circuit: layout.name.clone(),
        output_label: table.output_label.clone(),
        rows,
        latency_phases: (4 * k) as u32,
        convergence_warnings: probe_warnings + trace.non_converged_samples(),
        passed,
    })
}

// ---------------------------------------------------------------------------
// Comparison tables
// ---------------------------------------------------------------------------

/// One comparison-table row: a design from the literature (keyed by its
/// citation) or the proposed design.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReferenceRow {
    pub design: &'static str,
    pub area_um2: f64,
    pub cell_count: usize,
    pub clock_phases: u32,
    /// Set/reset ability — only tracked for the flip-flop table.
    pub set_reset: Option<bool>,
}

/// Published D-latch designs the proposed latch is compared against.
pub const LATCH_REFERENCES: &[ReferenceRow] = &[
    ReferenceRow {
        design: "[26]",
        area_um2: 0.05,
        cell_count: 48,
        clock_phases: 4,
        set_reset: None,
    },
    ReferenceRow {
        design: "[27]",
        area_um2: 0.06,
        cell_count: 43,
        clock_phases: 4,
        set_reset: None,
    },
    ReferenceRow {
        design: "[28]",
        area_um2: 0.02,
        cell_count: 28,
        clock_phases: 2,
        set_reset: None,
    },
    ReferenceRow {
        design: "[21]",
        area_um2: 0.02,
        cell_count: 19,
        clock_phases: 3,
        set_reset: None,
    },
];

/// Published D flip-flop designs the proposed flip-flop is compared against.
pub const FLIPFLOP_REFERENCES: &[ReferenceRow] = &[
    ReferenceRow {
        design: "[29]",
        area_um2: 0.11,
        cell_count: 84,
        clock_phases: 11,
        set_reset: Some(false),
    },
    ReferenceRow {
        design: "[30]",
        area_um2: 0.06,
        cell_count: 56,
        clock_phases: 10,
        set_reset: Some(false),
    },
    ReferenceRow {
        design: "[21]",
        area_um2: 0.04,
        cell_count: 53,
        clock_phases: 9,
        set_reset: Some(true),
    },
    ReferenceRow {
        design: "[22]",
        area_um2: 0.07,
        cell_count: 47,
        clock_phases: 7,
        set_reset: Some(false),
    },
];

/// `round(100 × (best − proposed) / best)` as the published tables compute it.
pub fn improvement_percent(best_reference: usize, proposed: usize) -> i64 {
    (100.0 * (best_reference as f64 - proposed as f64) / best_reference as f64).round() as i64
}

fn area_improvement_percent(best_reference: f64, proposed: f64) -> i64 {
    (100.0 * (best_reference - proposed) / best_reference).round() as i64
}

/// One regenerated comparison table plus its headline improvement numbers
/// (both measured against the reference with the fewest cells).
#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonTable {
    /// Layout name of the proposed design ("d_latch", "d_flipflop_sr").
    pub key: String,
    pub title: &'static str,
    /// Reference rows followed by the proposed design's computed row.
    pub rows: Vec<ReferenceRow>,
    pub best_reference: ReferenceRow,
    pub cells_improvement_percent: i64,
    pub area_improvement_percent: i64,
}

/// The regenerated latch and flip-flop comparison tables, plus any deviations
/// between computed metrics and the published figures.
#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonReport {
    pub latch: ComparisonTable,
    pub flip_flop: ComparisonTable,
    /// Empty when the computed tables reproduce the published ones exactly.
    pub deviations: Vec<String>,
}

impl ComparisonReport {
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for table in [&self.latch, &self.flip_flop] {
            out.push_str(table.title);
            out.push('\n');
            let with_sr = table.rows.iter().any(|r| r.set_reset.is_some());
            if with_sr {
                out.push_str(&format!(
                    "  {:<10} {:>11} {:>6} {:>13} {:>10}\n",
                    "design", "area (um^2)", "cells", "clock phases", "set/reset"
                ));
            } else {
                out.push_str(&format!(
                    "  {:<10} {:>11} {:>6} {:>13}\n",
                    "design", "area (um^2)", "cells", "clock phases"
                ));
            }
            for row in &table.rows {
                if with_sr {
                    out.push_str(&format!(
                        "  {:<10} {:>11.2} {:>6} {:>13} {:>10}\n",
                        row.design,
                        row.area_um2,
                        row.cell_count,
                        row.clock_phases,
                        match row.set_reset {
                            Some(true) => "yes",
                            Some(false) => "no",
                            None => "-",
                        }
                    ));
                } else {
                    out.push_str(&format!(
                        "  {:<10} {:>11.2} {:>6} {:>13}\n",
                        row.design, row.area_um2, row.cell_count, row.clock_phases
                    ));
                }
            }
            out.push_str(&format!(
                "  cell-count improvement over best reference ({}, {} cells): {}%\n",
                table.best_reference.design,
                table.best_reference.cell_count,
                table.cells_improvement_percent
            ));
            out.push_str(&format!(
                "  area improvement over that design: {}%\n\n",
                table.area_improvement_percent
            ));
        }
        if self.deviations.is_empty() {
            out.push_str("deviations: none\n");
        } else {
            out.push_str("deviations:\n");
            for d in &self.deviations {
                out.push_str(&format!("  - {d}\n"));
            }
        }
        out
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "table,design,area_um2,cell_count,clock_phases,set_reset,\
             cells_improvement_percent,area_improvement_percent\n",
        );
        for table in [&self.latch, &self.flip_flop] {
            for row in &table.rows {
                let sr = match row.set_reset {
                    Some(true) => "yes",
                    Some(false) => "no",
                    None => "",
                };
                let (ci, ai) = if row.design == "proposed" {
                    (
                        table.cells_improvement_percent.to_string(),
                        table.area_improvement_percent.to_string(),
                    )
                } else {
                    (String::new(), String::new())
                };
                out.push_str(&format!(
                    "{},{},{:.2},{},{},{},{},{}\n",
                    table.key,
                    row.design,
                    row.area_um2,
                    row.cell_count,
                    row.clock_phases,
                    sr,
                    ci,
                    ai
                ));
            }
        }
        out
    }
}

fn build_comparison_table(
    key_title: (&'static str, &'static str),
    references: &[ReferenceRow],
    circuit: &CircuitHandle,
    with_sr: bool,
    deviations: &mut Vec<String>,
) -> Result<ComparisonTable, VerifyError> {
    let metrics = metrics_report(&circuit.layout)?;
    let proposed = ReferenceRow {
        design: "proposed",
        area_um2: metrics.area_um2_rounded,
        cell_count: metrics.cell_count,
        clock_phases: metrics.summary_phases(),
        set_reset: if with_sr {
            Some(metrics.has_set_reset)
        } else {
            None
        },
    };

    match &circuit.reported_metrics {
        Some(reported) => {
            if reported.cell_count != proposed.cell_count {
                deviations.push(format!(
                    "{}: computed cell count {} differs from published {}",
                    metrics.circuit, proposed.cell_count, reported.cell_count
                ));
            }
            if (reported.area_um2_rounded - proposed.area_um2).abs() > 1e-9 {
                deviations.push(format!(
                    "{}: computed area {:.2} um^2 differs from published {:.2}",
                    metrics.circuit, proposed.area_um2, reported.area_um2_rounded
                ));
            }
            let reported_phases = reported.summary_phases();
            if reported_phases != proposed.clock_phases {
                deviations.push(format!(
                    "{}: computed latency {} phases differs from published {}",
                    metrics.circuit, proposed.clock_phases, reported_phases
                ));
            }
            if with_sr && reported.has_set_reset != metrics.has_set_reset {
                deviations.push(format!(
                    "{}: computed set/reset ability {} differs from published {}",
                    metrics.circuit, metrics.has_set_reset, reported.has_set_reset
                ));
            }
        }
        None => deviations.push(format!(
            "{}: no published metrics attached to the circuit",
            metrics.circuit
        )),
    }

    let best = *references
        .iter()
        .min_by_key(|r| r.cell_count)
        .expect("reference tables are non-empty");
    let mut rows = references.to_vec();
    rows.push(proposed);
    Ok(ComparisonTable {
        key: metrics.circuit,
        title: key_title.1,
        rows,
        best_reference: best,
        cells_improvement_percent: improvement_percent(best.cell_count, proposed.cell_count),
        area_improvement_percent: area_improvement_percent(best.area_um2, proposed.area_um2),
    })
}

/// Regenerate both comparison tables from the proposed designs' computed
/// metrics. Deviations list every disagreement with the published figures,
/// including the headline cell-count improvements (32% latch, 26% flip-flop).
pub fn comparison_report(
    latch: &CircuitHandle,
    flip_flop: &CircuitHandle,
) -> Result<ComparisonReport, VerifyError> {
    let mut deviations = Vec::new();
    let latch_table = build_comparison_table(
        ("d_latch", "D latch comparison"),
        LATCH_REFERENCES,
        latch,
        false,
        &mut deviations,
    )?;
    let ff_table = build_comparison_table(
        ("d_flipflop_sr", "D flip-flop comparison"),
        FLIPFLOP_REFERENCES,
        flip_flop,
        true,
        &mut deviations,
    )?;
    if latch_table.cells_improvement_percent != 32 {
        deviations.push(format!(
            "d_latch: computed cell-count improvement {}% differs from published 32%",
            latch_table.cells_improvement_percent
        ));
    }
    if ff_table.cells_improvement_percent != 26 {
        deviations.push(format!(
            "d_flipflop_sr: computed cell-count improvement {}% differs from published 26%",
            ff_table.cells_improvement_percent
        ));
    }
    Ok(ComparisonReport {
        latch: latch_table,
        flip_flop: ff_table,
        deviations,
    })
}

/// Errors from decoding, table checking, or comparison-report generation.
#[derive(Debug, Error)]
pub enum VerifyError {
    #[error("`{0}` is not an output of the layout")]
    UnknownOutput(String),
    #[error("table input `{0}` is not an input of the layout")]
    UnknownInput(String),
    #[error("layout input `{0}` is not driven by the table")]
    UndrivenInput(String),
    #[error("malformed table: {0}")]
    BadTable(String),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Cell;

    // -- decoding ----------------------------------------------------------

    #[test]
    fn decode_polarization_applies_the_dead_band() {
        assert_eq!(decode_polarization(0.95, 0.5), Some(true));
        assert_eq!(decode_polarization(-0.95, 0.5), Some(false));
        assert_eq!(decode_polarization(0.2, 0.5), None);
        assert_eq!(decode_polarization(0.5, 0.5), None, "threshold is strict");
        assert_eq!(decode_polarization(-0.5, 0.5), None);
    }

    /// Fabricated trace: checks the exact sample each zone is decoded at.
    #[test]
    fn decode_output_reads_the_end_of_the_hold_quarter() {
        let layout = Layout::new(
            "probe",
            vec![
                Cell::input(0, 0, 0, "in"),
                Cell::output(20, 0, 0, "a"), // zone 0 holds quarter 1
                Cell::output(40, 0, 3, "b"), // zone 3 holds quarter 0
            ],
        );
        let spc = 8; // quarter = 2; zone 0 decodes at v*8+3, zone 3 at v*8+1
        let mut rows = Vec::new();
        for sample in 0..2 * spc {
            let a = match sample {
                3 => 0.9,
                11 => -0.9,
                _ => 0.0,
            };
            let b = match sample {
                1 => 0.2,
                9 => -0.8,
                _ => 0.0,
            };
            rows.push(crate::engine::TraceRow {
                sample,
                vector: sample / spc,
                gammas: [0.0; 4],
                polarizations: vec![1.0, a, b],
                converged: true,
            });
        }
        let trace = Trace {
            samples_per_cycle: spc,
            vector_count: 2,
            rows,
        };
        assert_eq!(
            decode_output(&trace, "a", &layout).unwrap(),
            vec![Some(true), Some(false)]
        );
        assert_eq!(
            decode_output(&trace, "b", &layout).unwrap(),
            vec![None, Some(false)]
        );
        assert!(matches!(
            decode_output(&trace, "zzz", &layout),
            Err(VerifyError::UnknownOutput(_))
        ));
        assert!(
            matches!(
                decode_output(&trace, "in", &layout),
                Err(VerifyError::UnknownOutput(_))
            ),
            "inputs are not decodable outputs"
        );
    }

    // -- software models ----------------------------------------------------

    #[test]
    fn latch_model_is_transparent_high_and_holds_low() {
        let stream = [(true, false), (true, true), (false, false), (false, true)];
        assert_eq!(latch_model(&stream), vec![false, true, true, true]);
        assert_eq!(latch_model(&[]), Vec::<bool>::new());
    }

    #[test]
    fn dff_model_captures_only_on_the_chosen_edge() {
        // (clock, d) pairs; rising edges at indices 1 and 4.
        let stream = [
            (false, true),
            (true, true),
            (true, false),
            (false, false),
            (true, false),
        ];
        assert_eq!(
            dff_model(&stream, true),
            vec![false, true, true, true, false]
        );
        // Falling edge at index 3 captures d=false; index 1/4 rising ignored.
        assert_eq!(
            dff_model(&stream, false),
            vec![false, false, false, false, false]
        );
        // A high clock on the very first vector is not an edge.
        assert_eq!(dff_model(&[(true, true), (true, false)], true), vec![false, false]);
        // Falling-edge capture observed.
        assert_eq!(dff_model(&[(true, true), (false, true)], false), vec![false, true]);
    }

    #[test]
    fn majority_matches_the_boolean_definition() {
        for bits in 0..8u8 {
            let a = bits & 1 != 0;
            let b = bits & 2 != 0;
            let c = bits & 4 != 0;
            let expected = (a as u8 + b as u8 + c as u8) >= 2;
            assert_eq!(majority(a, b, c), expected, "MAJ({a},{b},{c})");
        }
    }

    // -- table parsing ------------------------------------------------------

    const FF_SR_TABLE: &str = "\
qcaforge-table v1
inputs P S clock D
clock clock
output out
0 0 x x -> 0
1 1 x x -> 1
0 1 01 0 -> 0
1 0 01 1 -> 1
0 1 10 x -> hold
1 0 10 x -> hold
";

    #[test]
    fn parse_table_reads_the_documented_format() {
        let table = parse_table(FF_SR_TABLE).unwrap();
        assert_eq!(table.input_labels, vec!["P", "S", "clock", "D"]);
        assert_eq!(table.clock_column.as_deref(), Some("clock"));
        assert_eq!(table.output_label, "out");
        assert_eq!(table.rows.len(), 6);
        assert_eq!(
            table.rows[2].values,
            vec![
                CellValue::Zero,
                CellValue::One,
                CellValue::Rise,
                CellValue::Zero
            ]
        );
        assert_eq!(table.rows[4].expected, Expected::Hold);
        table.validate().unwrap();
    }

    #[test]
    fn write_table_round_trips_byte_identically() {
        let table = parse_table(FF_SR_TABLE).unwrap();
        let text = write_table(&table);
        assert_eq!(text, FF_SR_TABLE);
        assert_eq!(parse_table(&text).unwrap(), table);
    }

    #[test]
    fn parse_table_normalizes_comments_and_spacing() {
        let messy = "\n# a comment\nqcaforge-table v1\n\ninputs  a   b\noutput   out\n 1  1   ->  1\n";
        let table = parse_table(messy).unwrap();
        assert_eq!(write_table(&table), "qcaforge-table v1\ninputs a b\noutput out\n1 1 -> 1\n");
    }

    #[test]
    fn parse_table_reports_errors_with_line_numbers() {
        let cases: &[(&str, usize, &str)] = &[
            ("qcaforge-layout v1\n", 1, "expected"),
            ("", 1, "expected"),
            ("qcaforge-table v1\noutput out\n", 2, "before `inputs`"),
            ("qcaforge-table v1\ninputs a\ninputs b\noutput o\n", 3, "duplicate"),
            ("qcaforge-table v1\ninputs a a\noutput o\n", 2, "duplicate input column"),
            ("qcaforge-table v1\ninputs a\noutput a\n", 3, "also an input"),
            ("qcaforge-table v1\ninputs a\nclock b\noutput o\n", 3, "not an input column"),
            ("qcaforge-table v1\ninputs a\noutput o\n1 -> 2\n", 4, "bad expectation"),
            ("qcaforge-table v1\ninputs a\noutput o\nq -> 1\n", 4, "bad value"),
            ("qcaforge-table v1\ninputs a b\noutput o\n1 -> 1\n", 4, "expected 2 values"),
            ("qcaforge-table v1\ninputs a\noutput o\n1 -> hold\n", 4, "needs a clock column"),
            ("qcaforge-table v1\ninputs a b\nclock a\noutput o\n1 01 -> 1\n", 5, "non-clock column"),
            ("qcaforge-table v1\ninputs a\n", 2, "missing `output`"),
            ("qcaforge-table v1\n1 -> 1\n", 2, "before `inputs`"),
        ];
        for (text, line, needle) in cases {
            let err = parse_table(text).expect_err(text);
            assert_eq!(err.line, *line, "line for {text:?} ({err})");
            assert!(
                err.message.contains(needle),
                "expected {needle:?} in {err:?} for {text:?}"
            );
        }
    }

    #[test]
    fn table_without_rows_is_valid_and_expands_to_nothing() {
        let table = parse_table("qcaforge-table v1\ninputs a\noutput o\n").unwrap();
        assert!(expand_rows(&table).is_empty());
    }

    // -- expansion -----------------------------------------------------------

    #[test]
    fn expand_rows_counts_and_orders_the_sequential_table() {
        let table = parse_table(FF_SR_TABLE).unwrap();
        let stimuli = expand_rows(&table);
        assert_eq!(stimuli.len(), 14, "4 reset + 4 set + 2 capture + 4 hold");

        let statics = stimuli
            .iter()
            .filter(|s| matches!(s, Stimulus::Static { .. }))
            .count();
        assert_eq!(statics, 8);

        // Reset row expands leftmost-first over (clock, D): 00, 01, 10, 11.
        let resets: Vec<(bool, bool)> = stimuli[..4]
            .iter()
            .map(|s| match s {
                Stimulus::Static { inputs, .. } => (inputs["clock"], inputs["D"]),
                _ => panic!("reset stimuli are static"),
            })
            .collect();
        assert_eq!(
            resets,
            vec![(false, false), (false, true), (true, false), (true, true)]
        );
        for s in &stimuli[..4] {
            assert_eq!(s.expected(), Expected::Zero);
            assert_eq!(s.row(), 0);
        }

        // Capture rows become one pre/post pair each.
        match &stimuli[9] {
            Stimulus::Transition { pre, post, expected, row } => {
                assert_eq!(*row, 3);
                assert_eq!(*expected, Expected::One);
                assert_eq!(pre["clock"], false);
                assert_eq!(post["clock"], true);
                assert_eq!(pre["D"], true);
                assert_eq!(post["D"], true);
                assert_eq!(pre["P"], true);
                assert_eq!(pre["S"], false);
            }
            other => panic!("expected a transition stimulus, got {other:?}"),
        }

        // Hold rows expand D across both transitions.
        assert!(stimuli[10..]
            .iter()
            .all(|s| matches!(s, Stimulus::Transition { .. })
                && s.expected() == Expected::Hold));
    }

    #[test]
    fn expand_rows_handles_a_combinational_table() {
        let table = parse_table(
            "qcaforge-table v1\ninputs a b c\noutput out\nx x x -> 1\n",
        )
        .unwrap();
        let stimuli = expand_rows(&table);
        assert_eq!(stimuli.len(), 8);
        // Leftmost column is the most significant counter bit.
        let levels: Vec<(bool, bool, bool)> = stimuli
            .iter()
            .map(|s| match s {
                Stimulus::Static { inputs, .. } => (inputs["a"], inputs["b"], inputs["c"]),
                _ => panic!(),
            })
            .collect();
        assert_eq!(levels[0], (false, false, false));
        assert_eq!(levels[1], (false, false, true));
        assert_eq!(levels[4], (true, false, false));
        assert_eq!(levels[7], (true, true, true));
    }

    // -- truth-table checking on real simulations ----------------------------

    fn two_cell_wire() -> CircuitHandle {
        CircuitHandle::new(Layout::new(
            "wire2",
            vec![Cell::input(0, 0, 0, "in"), Cell::output(20, 0, 0, "out")],
        ))
    }

    #[test]
    fn check_truth_table_passes_a_wire() {
        let table =
            parse_table("qcaforge-table v1\ninputs in\noutput out\n0 -> 0\n1 -> 1\n").unwrap();
        let report =
            check_truth_table(&two_cell_wire(), &table, &SimConfig::default()).unwrap();
        assert!(report.passed, "{report}");
        assert_eq!(report.latency_phases, 0);
        assert_eq!(report.rows.len(), 2);
        assert!(report.rows.iter().all(|r| r.outcome == RowOutcome::Pass));
        assert_eq!(report.convergence_warnings, 0);
    }

    #[test]
    fn check_truth_table_reports_a_deliberate_mismatch() {
        let table =
            parse_table("qcaforge-table v1\ninputs in\noutput out\n0 -> 1\n1 -> 1\n").unwrap();
        let report =
            check_truth_table(&two_cell_wire(), &table, &SimConfig::default()).unwrap();
        assert!(!report.passed);
        assert_eq!(
            report.rows[0].outcome,
            RowOutcome::Fail {
                expected: true,
                got: false
            },
            "{report}"
        );
        assert_eq!(report.rows[1].outcome, RowOutcome::Pass);
        let csv = report.to_csv();
        assert!(csv.starts_with("row,stimulus,expected,outcome,got\n"));
        assert!(csv.contains("1,in=0,1,fail,0"), "{csv}");
    }

    /// A lone diagonal neighbor anti-aligns: the minimal inverter.
    #[test]
    fn check_truth_table_verifies_a_diagonal_inverter() {
        let circuit = CircuitHandle::new(Layout::new(
            "diag_not",
            vec![Cell::input(0, 0, 0, "in"), Cell::output(20, 20, 0, "out")],
        ));
        let table =
            parse_table("qcaforge-table v1\ninputs in\noutput out\n0 -> 1\n1 -> 0\n").unwrap();
        let report = check_truth_table(&circuit, &table, &SimConfig::default()).unwrap();
        assert!(report.passed, "{report}");
    }

    /// Note the doubled tail: a lone last cell would lose its value during
    /// its own hold quarter (its upstream zone is releasing by then), so the
    /// output cell needs a same-zone partner to stay latched while decoded.
    #[test]
    fn check_truth_table_measures_a_pipelined_wire() {
        let circuit = CircuitHandle::new(Layout::new(
            "wire4z",
            vec![
                Cell::input(0, 0, 0, "in"),
                Cell::normal(20, 0, 1),
                Cell::normal(40, 0, 2),
                Cell::normal(60, 0, 3),
                Cell::output(80, 0, 3, "out"),
            ],
        ));
        let table =
            parse_table("qcaforge-table v1\ninputs in\noutput out\n0 -> 0\n1 -> 1\n").unwrap();
        let report = check_truth_table(&circuit, &table, &SimConfig::default()).unwrap();
        assert!(report.passed, "{report}");
        assert_eq!(
            report.latency_phases, 4,
            "a zone-3 output lags its input by one full cycle"
        );
    }

    #[test]
    fn check_truth_table_resolves_hold_references() {
        // Abusing a wire as a "sequential" device: transitions pass, a static
        // hold row compares against the previous stimulus's decision.
        let table = parse_table(
            "qcaforge-table v1\ninputs in\nclock in\noutput out\n01 -> 1\n10 -> 0\nx -> hold\n",
        )
        .unwrap();
        let report =
            check_truth_table(&two_cell_wire(), &table, &SimConfig::default()).unwrap();
        assert_eq!(report.rows.len(), 4);
        assert_eq!(report.rows[0].outcome, RowOutcome::Pass);
        assert_eq!(report.rows[1].outcome, RowOutcome::Pass);
        // x -> hold expands to in=0 (reference: previous decision = 0, wire
        // gives 0: pass) and in=1 (reference 0, wire gives 1: fail).
        assert_eq!(report.rows[2].outcome, RowOutcome::Pass);
        assert_eq!(
            report.rows[3].outcome,
            RowOutcome::Fail {
                expected: false,
                got: true
            }
        );
        assert!(!report.passed);
    }

    #[test]
    fn check_truth_table_marks_a_leading_hold_undecodable() {
        let table = parse_table(
            "qcaforge-table v1\ninputs in\nclock in\noutput out\nx -> hold\n",
        )
        .unwrap();
        let report =
            check_truth_table(&two_cell_wire(), &table, &SimConfig::default()).unwrap();
        assert_eq!(
            report.rows[0].outcome,
            RowOutcome::Undecodable { expected: None },
            "first stimulus has no previous value to hold"
        );
        assert!(!report.passed);
        assert!(format!("{report}").contains("UNDECODABLE"));
    }

    #[test]
    fn check_truth_table_rejects_label_mismatches() {
        let circuit = two_cell_wire();
        let config = SimConfig::default();
        let bad_in =
            parse_table("qcaforge-table v1\ninputs a\noutput out\n1 -> 1\n").unwrap();
        assert!(matches!(
            check_truth_table(&circuit, &bad_in, &config),
            Err(VerifyError::UnknownInput(l)) if l == "a"
        ));
        let bad_out =
            parse_table("qcaforge-table v1\ninputs in\noutput q\n1 -> 1\n").unwrap();
        assert!(matches!(
            check_truth_table(&circuit, &bad_out, &config),
            Err(VerifyError::UnknownOutput(l)) if l == "q"
        ));
        let missing = parse_table("qcaforge-table v1\ninputs in extra\noutput out\n1 1 -> 1\n")
            .unwrap();
        assert!(matches!(
            check_truth_table(&circuit, &missing, &config),
            Err(VerifyError::UnknownInput(l)) if l == "extra"
        ));
    }

    #[test]
    fn check_truth_table_requires_every_layout_input_driven() {
        let circuit = CircuitHandle::new(Layout::new(
            "two_in",
            vec![
                Cell::input(0, 0, 0, "a"),
                Cell::input(0, 40, 0, "b"),
                Cell::output(20, 0, 0, "out"),
            ],
        ));
        let table = parse_table("qcaforge-table v1\ninputs a\noutput out\n1 -> 1\n").unwrap();
        assert!(matches!(
            check_truth_table(&circuit, &table, &SimConfig::default()),
            Err(VerifyError::UndrivenInput(l)) if l == "b"
        ));
    }

    // -- comparison ----------------------------------------------------------

    #[test]
    fn improvement_percentages_round_like_the_published_claims() {
        assert_eq!(improvement_percent(19, 13), 32);
        assert_eq!(improvement_percent(47, 35), 26);
        assert_eq!(improvement_percent(13, 13), 0);
        assert_eq!(area_improvement_percent(0.02, 0.01), 50);
        assert_eq!(area_improvement_percent(0.07, 0.03), 57);
    }

    #[test]
    fn reference_tables_hold_the_published_rows() {
        assert_eq!(LATCH_REFERENCES.len(), 4);
        assert_eq!(FLIPFLOP_REFERENCES.len(), 4);
        let best_latch = LATCH_REFERENCES.iter().min_by_key(|r| r.cell_count).unwrap();
        assert_eq!((best_latch.design, best_latch.cell_count), ("[21]", 19));
        let best_ff = FLIPFLOP_REFERENCES.iter().min_by_key(|r| r.cell_count).unwrap();
        assert_eq!((best_ff.design, best_ff.cell_count), ("[22]", 47));
        assert!(LATCH_REFERENCES.iter().all(|r| r.set_reset.is_none()));
        assert!(FLIPFLOP_REFERENCES.iter().all(|r| r.set_reset.is_some()));
    }

}
