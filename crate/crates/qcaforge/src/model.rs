//! Layout data model: cells on a 20 nm grid, clock zones, validation,
//! geometric metrics, and the `qcaforge-layout v1` file format.
//!
//! A cell is an 18 nm × 18 nm square with four quantum dots at
//! (±4.5 nm, ±4.5 nm) from its center. Cell centers sit on integer multiples
//! of the 20 nm grid pitch, so adjacent cells have 2 nm of clearance. Each
//! cell belongs to one of four clock zones (0–3) and has one function:
//! `normal`, `fixed:±1` (a permanently polarized driver), `input:<label>`,
//! or `output:<label>`.

use std::collections::{HashMap, VecDeque};
use std::fmt;

use thiserror::Error;

/// Side length of a cell, in nanometers.
pub const CELL_SIZE_NM: f64 = 18.0;

/// Grid pitch between adjacent cell centers, in nanometers.
pub const GRID_PITCH_NM: i32 = 20;

/// Offset of each quantum dot from the cell center along both axes, in
/// nanometers. Dots sit at (±4.5, ±4.5) relative to the center.
pub const DOT_OFFSET_NM: f64 = 4.5;

/// Squared center distance (nm²) below which two cells count as neighbors
/// for the clock-phase latency metric: (20·√2)² = 800, which captures the
/// four orthogonal and four diagonal grid neighbors.
pub const NEIGHBOR_DISTANCE_SQ_NM2: i64 = 800;

/// What a cell does in the circuit.
#[derive(Debug, Clone, PartialEq)]
pub enum CellFunction {
    /// Free cell; its polarization is determined by relaxation.
    Normal,
    /// Driver cell pinned at the given polarization (+1.0 or -1.0).
    Fixed(f64),
    /// Stimulus cell pinned per input vector, identified by label.
    Input(String),
    /// Free cell whose polarization is decoded as a circuit output.
    Output(String),
}

/// One QCA cell: grid position (nm), clock zone (0–3), function, and its
/// current polarization in [-1, +1]. Polarization is simulation state; a
/// freshly built cell carries 0.0 (unpolarized) unless it is `Fixed`.
#[derive(Debug, Clone, PartialEq)]
pub struct Cell {
    pub x: i32,
    pub y: i32,
    pub zone: u8,
    pub function: CellFunction,
    pub polarization: f64,
}

impl Cell {
    pub fn new(x: i32, y: i32, zone: u8, function: CellFunction) -> Self {
        let polarization = match function {
            CellFunction::Fixed(p) => p,
            _ => 0.0,
        };
        Cell {
            x,
            y,
            zone,
            function,
            polarization,
        }
    }

    pub fn normal(x: i32, y: i32, zone: u8) -> Self {
        Cell::new(x, y, zone, CellFunction::Normal)
    }

    pub fn fixed(x: i32, y: i32, zone: u8, polarization: f64) -> Self {
        Cell::new(x, y, zone, CellFunction::Fixed(polarization))
    }

    pub fn input(x: i32, y: i32, zone: u8, label: &str) -> Self {
        Cell::new(x, y, zone, CellFunction::Input(label.to_string()))
    }

    pub fn output(x: i32, y: i32, zone: u8, label: &str) -> Self {
        Cell::new(x, y, zone, CellFunction::Output(label.to_string()))
    }

    /// The cell's input or output label, if it has one.
    pub fn label(&self) -> Option<&str> {
        match &self.function {
            CellFunction::Input(l) | CellFunction::Output(l) => Some(l),
            _ => None,
        }
    }

    /// Squared center-to-center distance to another cell, in nm².
    pub fn distance_sq_nm2(&self, other: &Cell) -> i64 {
        let dx = i64::from(self.x) - i64::from(other.x);
        let dy = i64::from(self.y) - i64::from(other.y);
        dx * dx + dy * dy
    }
}

/// A named collection of cells with derived input/output label lists.
///
/// `inputs` and `outputs` follow cell order, so the order of cells in a
/// layout fixes the column order of every downstream report and trace.
#[derive(Debug, Clone, PartialEq)]
pub struct Layout {
    pub name: String,
    pub cells: Vec<Cell>,
    pub inputs: Vec<String>,
    pub outputs: Vec<String>,
}

impl Layout {
    pub fn new(name: &str, cells: Vec<Cell>) -> Self {
        let mut inputs = Vec::new();
        let mut outputs = Vec::new();
        for cell in &cells {
            match &cell.function {
                CellFunction::Input(l) => inputs.push(l.clone()),
                CellFunction::Output(l) => outputs.push(l.clone()),
                _ => {}
            }
        }
        Layout {
            name: name.to_string(),
            cells,
            inputs,
            outputs,
        }
    }

    /// Index of the input cell carrying `label`.
    pub fn input_cell(&self, label: &str) -> Option<usize> {
        self.cells
            .iter()
            .position(|c| matches!(&c.function, CellFunction::Input(l) if l == label))
    }

    /// Index of the output cell carrying `label`.
    pub fn output_cell(&self, label: &str) -> Option<usize> {
        self.cells
            .iter()
            .position(|c| matches!(&c.function, CellFunction::Output(l) if l == label))
    }
}

/// A single structural rule violation found by [`validate_layout`].
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Violation {
    #[error("cell {index} at ({x}, {y}) is off the {pitch} nm grid")]
    OffGrid { index: usize, x: i32, y: i32, pitch: i32 },
    #[error("cells {first} and {second} both sit at ({x}, {y})")]
    Overlap {
        first: usize,
        second: usize,
        x: i32,
        y: i32,
    },
    #[error("cell {index} has clock zone {zone}, expected 0..=3")]
    BadZone { index: usize, zone: u8 },
    #[error("cell {index} fixed polarization {value} is not +1 or -1")]
    BadFixedPolarization { index: usize, value: f64 },
    #[error("cell {index} label {label:?} is empty or contains whitespace/commas")]
    BadLabel { index: usize, label: String },
    #[error("label {label:?} is carried by more than one cell")]
    DuplicateLabel { label: String },
    #[error("layout lists {kind} {label:?} but no cell carries it")]
    UnmatchedLabel { kind: &'static str, label: String },
}

/// Check every structural invariant of a layout and report all violations:
/// cells on the 20 nm grid, no two cells at the same position, zones in
/// 0..=3, fixed polarizations exactly ±1, labels well formed and unique, and
/// the layout's input/output lists in one-to-one correspondence with the
/// labeled cells.
pub fn validate_layout(layout: &Layout) -> Result<(), Vec<Violation>> {
    let mut violations = Vec::new();

    let mut seen_pos: HashMap<(i32, i32), usize> = HashMap::new();
    let mut seen_labels: HashMap<&str, usize> = HashMap::new();
    for (index, cell) in layout.cells.iter().enumerate() {
        if cell.x % GRID_PITCH_NM != 0 || cell.y % GRID_PITCH_NM != 0 {
            violations.push(Violation::OffGrid {
                index,
                x: cell.x,
                y: cell.y,
                pitch: GRID_PITCH_NM,
            });
        }
        if let Some(&first) = seen_pos.get(&(cell.x, cell.y)) {
            violations.push(Violation::Overlap {
                first,
                second: index,
                x: cell.x,
                y: cell.y,
            });
        } else {
            seen_pos.insert((cell.x, cell.y), index);
        }
        if cell.zone > 3 {
            violations.push(Violation::BadZone {
                index,
                zone: cell.zone,
            });
        }
        if let CellFunction::Fixed(p) = cell.function {
            if p != 1.0 && p != -1.0 {
                violations.push(Violation::BadFixedPolarization { index, value: p });
            }
        }
        if let Some(label) = cell.label() {
            if label.is_empty()
                || label.contains(',')
                || label.chars().any(|c| c.is_whitespace())
            {
                violations.push(Violation::BadLabel {
                    index,
                    label: label.to_string(),
                });
            }
            if seen_labels.insert(label, index).is_some() {
                violations.push(Violation::DuplicateLabel {
                    label: label.to_string(),
                });
            }
        }
    }

    // The derived lists must match the labeled cells exactly.
    for (kind, listed, function_matches) in [
        (
            "input",
            &layout.inputs,
            Box::new(|c: &Cell, l: &str| matches!(&c.function, CellFunction::Input(x) if x == l))
                as Box<dyn Fn(&Cell, &str) -> bool>,
        ),
        (
            "output",
            &layout.outputs,
            Box::new(|c: &Cell, l: &str| matches!(&c.function, CellFunction::Output(x) if x == l)),
        ),
    ] {
        for label in listed {
            if !layout.cells.iter().any(|c| function_matches(c, label)) {
                violations.push(Violation::UnmatchedLabel {
                    kind,
                    label: label.clone(),
                });
            }
        }
    }

    if violations.is_empty() {
        Ok(())
    } else {
        Err(violations)
    }
}

/// Errors from the geometric/topological metrics.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum MetricsError {
    #[error("layout has no cells")]
    EmptyLayout,
    #[error("no input cell labeled {0:?}")]
    UnknownInput(String),
    #[error("no output cell labeled {0:?}")]
    UnknownOutput(String),
    #[error("no clock-ordered path from input {input:?} to output {output:?}: disconnected")]
    Disconnected { input: String, output: String },
}

/// Number of cells in the layout (all functions count).
pub fn cell_count(layout: &Layout) -> usize {
    layout.cells.len()
}

/// Bounding-box area in µm²: the axis-aligned box around all cell squares,
/// i.e. (Δx + 18 nm) × (Δy + 18 nm) over cell centers, divided by 10⁶.
pub fn bounding_area_um2(layout: &Layout) -> Result<f64, MetricsError> {
    let first = layout.cells.first().ok_or(MetricsError::EmptyLayout)?;
    let (mut min_x, mut max_x) = (first.x, first.x);
    let (mut min_y, mut max_y) = (first.y, first.y);
    for cell in &layout.cells {
        min_x = min_x.min(cell.x);
        max_x = max_x.max(cell.x);
        min_y = min_y.min(cell.y);
        max_y = max_y.max(cell.y);
    }
    let width_nm = f64::from(max_x - min_x) + CELL_SIZE_NM;
    let height_nm = f64::from(max_y - min_y) + CELL_SIZE_NM;
    Ok(width_nm * height_nm / 1.0e6)
}

/// Round an area in µm² to the 2-decimal reporting convention
/// (ties round away from zero, e.g. 0.125 → 0.13).
pub fn round_area(area_um2: f64) -> f64 {
    (area_um2 * 100.0).round() / 100.0
}

/// Clock-phase latency from an input cell to an output cell.
///
/// Cells are adjacent when their centers are within 20·√2 nm (orthogonal or
/// diagonal grid neighbors). A signal hop from zone z may only stay in z or
/// advance to (z+1) mod 4 — backward hops are not valid signal flow — and
/// the latency is 1 plus the minimum number of zone *transitions* along any
/// such path (0-1 BFS).
pub fn clock_phase_latency(
    layout: &Layout,
    input: &str,
    output: &str,
) -> Result<u32, MetricsError> {
    let start = layout
        .input_cell(input)
        .ok_or_else(|| MetricsError::UnknownInput(input.to_string()))?;
    let goal = layout
        .output_cell(output)
        .ok_or_else(|| MetricsError::UnknownOutput(output.to_string()))?;

    let n = layout.cells.len();
    let mut dist = vec![u32::MAX; n];
    let mut deque = VecDeque::new();
    dist[start] = 0;
    deque.push_back(start);
    while let Some(u) = deque.pop_front() {
        if u == goal {
            break;
        }
        let cu = &layout.cells[u];
        for v in 0..n {
            if v == u {
                continue;
            }
            let cv = &layout.cells[v];
            if cu.distance_sq_nm2(cv) > NEIGHBOR_DISTANCE_SQ_NM2 {
                continue;
            }
            let weight = if cv.zone == cu.zone {
                0
            } else if cv.zone == (cu.zone + 1) % 4 {
                1
            } else {
                continue;
            };
            let nd = dist[u].saturating_add(weight);
            if nd < dist[v] {
                dist[v] = nd;
                if weight == 0 {
                    deque.push_front(v);
                } else {
                    deque.push_back(v);
                }
            }
        }
    }

    if dist[goal] == u32::MAX {
        return Err(MetricsError::Disconnected {
            input: input.to_string(),
            output: output.to_string(),
        });
    }
    Ok(1 + dist[goal])
}

/// Latency of one input→output pair, as reported by [`MetricsReport`].
#[derive(Debug, Clone, PartialEq)]
pub struct PathLatency {
    pub input: String,
    pub output: String,
    pub phases: u32,
}

/// Summary metrics for a layout: size, area (raw and 2-decimal rounded),
/// clock-phase latency for every input→output pair, and whether the circuit
/// exposes set/reset inputs (labels `P` and `S`).
#[derive(Debug, Clone, PartialEq)]
pub struct MetricsReport {
    pub circuit: String,
    pub cell_count: usize,
    pub area_um2: f64,
    pub area_um2_rounded: f64,
    pub latencies: Vec<PathLatency>,
    pub has_set_reset: bool,
}

pub fn metrics_report(layout: &Layout) -> Result<MetricsReport, MetricsError> {
    let area = bounding_area_um2(layout)?;
    let mut latencies = Vec::new();
    for input in &layout.inputs {
        for output in &layout.outputs {
            latencies.push(PathLatency {
                input: input.clone(),
                output: output.clone(),
                phases: clock_phase_latency(layout, input, output)?,
            });
        }
    }
    let has_set_reset =
        layout.inputs.iter().any(|l| l == "P") && layout.inputs.iter().any(|l| l == "S");
    Ok(MetricsReport {
        circuit: layout.name.clone(),
        cell_count: cell_count(layout),
        area_um2: area,
        area_um2_rounded: round_area(area),
        latencies,
        has_set_reset,
    })
}

impl MetricsReport {
    /// The single "clock phases" figure a circuit is summarized by: the
    /// data path (input `D`) to the output when the circuit has one,
    /// otherwise the slowest input→output pair.
    pub fn summary_phases(&self) -> u32 {
        let data_path = self
            .latencies
            .iter()
            .filter(|l| l.input == "D")
            .map(|l| l.phases)
            .max();
        data_path.unwrap_or_else(|| self.latencies.iter().map(|l| l.phases).max().unwrap_or(0))
    }
}

impl fmt::Display for MetricsReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "circuit: {}", self.circuit)?;
        writeln!(f, "cells: {}", self.cell_count)?;
        writeln!(
            f,
            "area: {:.6} um^2 (rounded: {:.2})",
            self.area_um2, self.area_um2_rounded
        )?;
        for lat in &self.latencies {
            writeln!(
                f,
                "latency {} -> {}: {} clock phases",
                lat.input, lat.output, lat.phases
            )?;
        }
        write!(
            f,
            "set/reset: {}",
            if self.has_set_reset { "yes" } else { "no" }
        )
    }
}

/// First line of every layout file.
pub const LAYOUT_MAGIC: &str = "qcaforge-layout v1";

/// Layout file syntax error with its 1-based line number.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("layout line {line}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

fn parse_err(line: usize, message: impl Into<String>) -> ParseError {
    ParseError {
        line,
        message: message.into(),
    }
}

/// Parse the `qcaforge-layout v1` plain-text format.
///
/// ```text
/// qcaforge-layout v1
/// name half_adder
/// # comments run to end of line
/// cell 0 0 0 input:a
/// cell 20 0 0 normal
/// cell 40 0 1 fixed:+1
/// cell 60 0 1 output:sum
/// ```
///
/// Syntax errors (bad magic, unknown keyword, malformed cell) are reported
/// with line numbers; structural rule violations are the business of
/// [`validate_layout`], not the parser.
pub fn parse_layout(text: &str) -> Result<Layout, ParseError> {
    let mut name: Option<String> = None;
    let mut cells = Vec::new();
    let mut saw_magic = false;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }

        if !saw_magic {
            if line != LAYOUT_MAGIC {
                return Err(parse_err(
                    line_no,
                    format!("expected magic line {LAYOUT_MAGIC:?}, found {line:?}"),
                ));
            }
            saw_magic = true;
            continue;
        }

        let (keyword, rest) = match line.split_once(char::is_whitespace) {
            Some((k, r)) => (k, r.trim()),
            None => (line, ""),
        };
        match keyword {
            "name" => {
                if name.is_some() {
                    return Err(parse_err(line_no, "duplicate name line"));
                }
                if rest.is_empty() {
                    return Err(parse_err(line_no, "name must not be empty"));
                }
                name = Some(rest.to_string());
            }
            "cell" => {
                let tokens: Vec<&str> = rest.split_whitespace().collect();
                if tokens.len() != 4 {
                    return Err(parse_err(
                        line_no,
                        format!(
                            "cell takes 4 fields (x y zone kind), found {}",
                            tokens.len()
                        ),
                    ));
                }
                let x: i32 = tokens[0]
                    .parse()
                    .map_err(|_| parse_err(line_no, format!("bad x coordinate {:?}", tokens[0])))?;
                let y: i32 = tokens[1]
                    .parse()
                    .map_err(|_| parse_err(line_no, format!("bad y coordinate {:?}", tokens[1])))?;
                let zone: u8 = tokens[2]
                    .parse()
                    .ok()
                    .filter(|z| *z <= 3)
                    .ok_or_else(|| {
                        parse_err(line_no, format!("bad clock zone {:?} (0..=3)", tokens[2]))
                    })?;
                let function = match tokens[3] {
                    "normal" => CellFunction::Normal,
                    "fixed:+1" => CellFunction::Fixed(1.0),
                    "fixed:-1" => CellFunction::Fixed(-1.0),
                    kind => {
                        if let Some(label) = kind.strip_prefix("input:") {
                            if label.is_empty() {
                                return Err(parse_err(line_no, "input label must not be empty"));
                            }
                            CellFunction::Input(label.to_string())
                        } else if let Some(label) = kind.strip_prefix("output:") {
                            if label.is_empty() {
                                return Err(parse_err(line_no, "output label must not be empty"));
                            }
                            CellFunction::Output(label.to_string())
                        } else {
                            return Err(parse_err(
                                line_no,
                                format!(
                                    "unknown cell kind {kind:?} (normal, fixed:+1, fixed:-1, \
                                     input:<label>, output:<label>)"
                                ),
                            ));
                        }
                    }
                };
                cells.push(Cell::new(x, y, zone, function));
            }
            other => {
                return Err(parse_err(
                    line_no,
                    format!("unknown keyword {other:?} (expected name or cell)"),
                ));
            }
        }
    }

    if !saw_magic {
        return Err(parse_err(1, format!("missing magic line {LAYOUT_MAGIC:?}")));
    }
    let name = name.ok_or_else(|| parse_err(1, "missing name line"))?;
    Ok(Layout::new(&name, cells))
}

/// Serialize a layout to the canonical `qcaforge-layout v1` text form.
/// `parse_layout(&write_layout(l))` reproduces `l` exactly.
pub fn write_layout(layout: &Layout) -> String {
    let mut out = String::new();
    out.push_str(LAYOUT_MAGIC);
    out.push('\n');
    out.push_str(&format!("name {}\n", layout.name));
    for cell in &layout.cells {
        let kind = match &cell.function {
            CellFunction::Normal => "normal".to_string(),
            CellFunction::Fixed(p) => {
                if *p >= 0.0 {
                    "fixed:+1".to_string()
                } else {
                    "fixed:-1".to_string()
                }
            }
            CellFunction::Input(l) => format!("input:{l}"),
            CellFunction::Output(l) => format!("output:{l}"),
        };
        out.push_str(&format!("cell {} {} {} {}\n", cell.x, cell.y, cell.zone, kind));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn straight_wire() -> Layout {
        Layout::new(
            "wire4",
            vec![
                Cell::input(0, 0, 0, "in"),
                Cell::normal(20, 0, 0),
                Cell::normal(40, 0, 1),
                Cell::output(60, 0, 1, "out"),
            ],
        )
    }

    #[test]
    fn valid_layout_passes_validation() {
        assert_eq!(validate_layout(&straight_wire()), Ok(()));
    }

    #[test]
    fn off_grid_cell_is_flagged() {
        let layout = Layout::new("bad", vec![Cell::normal(10, 0, 0)]);
        let violations = validate_layout(&layout).unwrap_err();
        assert!(
            matches!(violations[0], Violation::OffGrid { index: 0, x: 10, .. }),
            "unexpected violations: {violations:?}"
        );
    }

    #[test]
    fn overlapping_cells_are_flagged() {
        let layout = Layout::new(
            "bad",
            vec![Cell::normal(0, 0, 0), Cell::normal(0, 0, 1)],
        );
        let violations = validate_layout(&layout).unwrap_err();
        assert_eq!(
            violations,
            vec![Violation::Overlap {
                first: 0,
                second: 1,
                x: 0,
                y: 0
            }]
        );
    }

    #[test]
    fn zone_fixed_value_and_labels_are_checked() {
        let layout = Layout::new(
            "bad",
            vec![
                Cell::normal(0, 0, 4),
                Cell::fixed(20, 0, 0, 0.5),
                Cell::input(40, 0, 0, "a b"),
                Cell::input(60, 0, 0, "x"),
                Cell::output(80, 0, 0, "x"),
            ],
        );
        let violations = validate_layout(&layout).unwrap_err();
        assert!(violations.contains(&Violation::BadZone { index: 0, zone: 4 }));
        assert!(violations.contains(&Violation::BadFixedPolarization {
            index: 1,
            value: 0.5
        }));
        assert!(violations.contains(&Violation::BadLabel {
            index: 2,
            label: "a b".to_string()
        }));
        assert!(violations.contains(&Violation::DuplicateLabel {
            label: "x".to_string()
        }));
    }

    #[test]
    fn unmatched_listed_label_is_flagged() {
        let mut layout = straight_wire();
        layout.inputs.push("ghost".to_string());
        let violations = validate_layout(&layout).unwrap_err();
        assert_eq!(
            violations,
            vec![Violation::UnmatchedLabel {
                kind: "input",
                label: "ghost".to_string()
            }]
        );
    }

    #[test]
    fn bounding_area_includes_cell_extent() {
        // Single cell: the box is one 18 nm square.
        let single = Layout::new("one", vec![Cell::normal(0, 0, 0)]);
        assert_relative_eq!(bounding_area_um2(&single).unwrap(), 324.0e-6);

        // Centers span 80 × 40 nm, so the box is 98 × 58 nm.
        let layout = Layout::new(
            "two",
            vec![Cell::normal(0, 0, 0), Cell::normal(80, 40, 0)],
        );
        assert_relative_eq!(bounding_area_um2(&layout).unwrap(), 5684.0e-6);
        assert_eq!(bounding_area_um2(&Layout::new("empty", vec![])), Err(MetricsError::EmptyLayout));
    }

    #[test]
    fn area_rounding_uses_two_decimals_ties_away_from_zero() {
        assert_eq!(round_area(0.125), 0.13); // 0.125 is exact in binary
        assert_eq!(round_area(0.875), 0.88);
        assert_eq!(round_area(0.028124), 0.03);
        assert_eq!(round_area(0.0049), 0.0);
    }

    #[test]
    fn latency_counts_zone_transitions_plus_one() {
        assert_eq!(clock_phase_latency(&straight_wire(), "in", "out"), Ok(2));

        // Same-zone path: one phase regardless of length.
        let flat = Layout::new(
            "flat",
            vec![
                Cell::input(0, 0, 2, "in"),
                Cell::normal(20, 20, 2), // diagonal hop
                Cell::output(40, 40, 2, "out"),
            ],
        );
        assert_eq!(clock_phase_latency(&flat, "in", "out"), Ok(1));

        // Zone wrap 3 -> 0 is a legal forward transition.
        let wrap = Layout::new(
            "wrap",
            vec![Cell::input(0, 0, 3, "in"), Cell::output(20, 0, 0, "out")],
        );
        assert_eq!(clock_phase_latency(&wrap, "in", "out"), Ok(2));
    }

    #[test]
    fn latency_rejects_backward_zone_hops_and_gaps() {
        let backward = Layout::new(
            "backward",
            vec![Cell::input(0, 0, 2, "in"), Cell::output(20, 0, 1, "out")],
        );
        assert_eq!(
            clock_phase_latency(&backward, "in", "out"),
            Err(MetricsError::Disconnected {
                input: "in".to_string(),
                output: "out".to_string()
            })
        );

        let gap = Layout::new(
            "gap",
            vec![Cell::input(0, 0, 0, "in"), Cell::output(60, 0, 0, "out")],
        );
        assert!(matches!(
            clock_phase_latency(&gap, "in", "out"),
            Err(MetricsError::Disconnected { .. })
        ));
        assert_eq!(
            clock_phase_latency(&gap, "nope", "out"),
            Err(MetricsError::UnknownInput("nope".to_string()))
        );
    }

    #[test]
    fn latency_prefers_fewer_transitions_over_fewer_hops() {
        // Direct 2-transition route vs. a longer same-zone detour: the
        // detour wins because only transitions cost.
        let layout = Layout::new(
            "detour",
            vec![
                Cell::input(0, 0, 0, "in"),
                Cell::normal(20, 0, 1),
                Cell::normal(40, 0, 2),
                Cell::normal(0, 20, 0),
                Cell::normal(20, 20, 0),
                Cell::normal(40, 20, 0),
                Cell::normal(60, 20, 2),
                Cell::output(60, 0, 2, "out"),
            ],
        );
        // Path in -> (0,20) -> (20,20) -> (40,20) stays in zone 0 but has no
        // legal hop into zone 2, so the best route is the 0→1→2 chain.
        assert_eq!(clock_phase_latency(&layout, "in", "out"), Ok(3));
    }

    #[test]
    fn metrics_report_covers_all_pairs_and_set_reset() {
        let report = metrics_report(&straight_wire()).unwrap();
        assert_eq!(report.cell_count, 4);
        assert_eq!(
            report.latencies,
            vec![PathLatency {
                input: "in".to_string(),
                output: "out".to_string(),
                phases: 2
            }]
        );
        assert!(!report.has_set_reset);

        let sr = Layout::new(
            "sr",
            vec![
                Cell::input(0, 0, 0, "P"),
                Cell::input(0, 20, 0, "S"),
                Cell::output(20, 0, 0, "out"),
            ],
        );
        assert!(metrics_report(&sr).unwrap().has_set_reset);
    }

    #[test]
    fn layout_round_trips_through_text() {
        let layout = Layout::new(
            "rt",
            vec![
                Cell::input(0, 0, 0, "a"),
                Cell::fixed(20, 0, 1, -1.0),
                Cell::fixed(40, 0, 2, 1.0),
                Cell::normal(-20, -40, 3),
                Cell::output(60, 0, 3, "q"),
            ],
        );
        let text = write_layout(&layout);
        let parsed = parse_layout(&text).unwrap();
        assert_eq!(parsed, layout, "round trip changed the layout:\n{text}");
    }

    #[test]
    fn parser_accepts_comments_and_blank_lines() {
        let text = "\n# header comment\nqcaforge-layout v1\nname t  \n\
                    cell 0 0 0 input:a # trailing comment\ncell 20 0 0 normal\n";
        let layout = parse_layout(text).unwrap();
        assert_eq!(layout.name, "t");
        assert_eq!(layout.cells.len(), 2);
        assert_eq!(layout.inputs, vec!["a".to_string()]);
    }

    #[test]
    fn parser_reports_line_numbers_for_errors() {
        let cases = [
            ("qca-layout v9\n", 1, "magic"),
            ("qcaforge-layout v1\ncell 0 0 0 normal\n", 1, "name"),
            ("qcaforge-layout v1\nname t\ncell 0 0 normal\n", 3, "4 fields"),
            ("qcaforge-layout v1\nname t\ncell 0 0 7 normal\n", 3, "zone"),
            ("qcaforge-layout v1\nname t\ncell 0 0 0 fixed:0.5\n", 3, "kind"),
            ("qcaforge-layout v1\nname t\ncell 0 0 0 input:\n", 3, "label"),
            ("qcaforge-layout v1\nname t\nwire 0 0\n", 3, "keyword"),
            ("qcaforge-layout v1\nname a\nname b\n", 3, "duplicate"),
        ];
        for (text, line, needle) in cases {
            let err = parse_layout(text).expect_err(text);
            assert_eq!(err.line, line, "wrong line for {text:?}: {err}");
            assert!(
                err.message.contains(needle),
                "error {err:?} should mention {needle:?}"
            );
        }
    }
}
