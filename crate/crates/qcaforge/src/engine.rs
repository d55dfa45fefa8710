//! Bistable-approximation simulation engine.
//!
//! Each cell i carries a polarization P_i ∈ [-1, +1]. For one clock sample,
//! free cells are relaxed by synchronous (Jacobi) sweeps of
//!
//! ```text
//! P_i' = f( Σ_j E_k(i,j) · P_j / (2·γ_zone(i)) ),    f(x) = x / √(1 + x²)
//! ```
//!
//! where E_k(i,j) is the Coulomb kink energy between cells i and j (the
//! energy cost of opposite vs. aligned polarization, a 16-term sum over the
//! two cells' dot charges) and γ is the clock-controlled tunneling energy of
//! the cell's zone. Sweeps stop when the largest polarization change falls
//! below the configured tolerance, or after `max_iterations` sweeps (the
//! sample is then recorded as non-converged — a warning, not an error).
//!
//! The four-phase clock gives zone z the zone-0 waveform delayed by z
//! quarter-cycles: switch (γ_high → γ_low, linear), hold (γ_low), release
//! (γ_low → γ_high, linear), relax (γ_high). Low γ locks a zone's cells to
//! their neighbors' influence; high γ erases them toward P ≈ 0.
//!
//! Determinism: cell update order and per-cell neighbor summation order are
//! fixed at coupling-map construction, and parallel sweeps only distribute
//! the per-cell updates of one synchronous sweep, so traces are bit-identical
//! across runs and across worker-thread counts.

use std::collections::BTreeMap;
use std::io::Write;

use rayon::prelude::*;
use thiserror::Error;

use crate::model::{validate_layout, Cell, CellFunction, Layout, Violation, DOT_OFFSET_NM};

/// Elementary charge, C.
pub const ELEMENTARY_CHARGE_C: f64 = 1.602176634e-19;

/// Vacuum permittivity, F/m.
pub const VACUUM_PERMITTIVITY_F_PER_M: f64 = 8.8541878128e-12;

/// Simulation parameters. [`SimConfig::default`] gives the reference values;
/// [`SimConfig::validate`] enforces the invariants listed per field.
#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    /// Relative permittivity of the substrate (> 0).
    pub epsilon_r: f64,
    /// Tunneling energy in fully relaxed zones, J (> gamma_low).
    pub gamma_high_j: f64,
    /// Tunneling energy in holding zones, J (> 0).
    pub gamma_low_j: f64,
    /// Only cell pairs with center distance ≤ this couple, nm (> 0).
    pub radius_of_effect_nm: f64,
    /// Clock samples per full four-phase cycle (≥ 8, divisible by 4).
    pub samples_per_cycle: usize,
    /// Relaxation stops when max |ΔP| per sweep drops below this (> 0).
    pub tolerance: f64,
    /// Sweep cap per sample (≥ 1); hitting it flags non-convergence.
    pub max_iterations: usize,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            epsilon_r: 12.9,
            gamma_high_j: 9.8e-22,
            gamma_low_j: 3.8e-23,
            radius_of_effect_nm: 65.0,
            samples_per_cycle: 128,
            tolerance: 1.0e-3,
            max_iterations: 100,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<(), EngineError> {
        let fail = |msg: String| Err(EngineError::InvalidConfig(msg));
        if !(self.epsilon_r > 0.0) {
            return fail(format!("epsilon_r must be positive, got {}", self.epsilon_r));
        }
        if !(self.gamma_low_j > 0.0) {
            return fail(format!("gamma_low must be positive, got {}", self.gamma_low_j));
        }
        if !(self.gamma_high_j > self.gamma_low_j) {
            return fail(format!(
                "gamma_high ({}) must exceed gamma_low ({})",
                self.gamma_high_j, self.gamma_low_j
            ));
        }
        if !(self.radius_of_effect_nm > 0.0) {
            return fail(format!(
                "radius_of_effect must be positive, got {}",
                self.radius_of_effect_nm
            ));
        }
        if self.samples_per_cycle < 8 || self.samples_per_cycle % 4 != 0 {
            return fail(format!(
                "samples_per_cycle must be >= 8 and divisible by 4, got {}",
                self.samples_per_cycle
            ));
        }
        if !(self.tolerance > 0.0) {
            return fail(format!("tolerance must be positive, got {}", self.tolerance));
        }
        if self.max_iterations == 0 {
            return fail("max_iterations must be at least 1".to_string());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EngineError {
    #[error("layout failed validation: {}", violations_text(.0))]
    InvalidLayout(Vec<Violation>),
    #[error("invalid simulation config: {0}")]
    InvalidConfig(String),
    #[error("cells at ({x}, {y}) coincide; kink energy is undefined")]
    CoincidentCells { x: i32, y: i32 },
    #[error("input vector {vector}: {message}")]
    BadVector { vector: usize, message: String },
    #[error("no input vectors supplied")]
    NoVectors,
}

fn violations_text(violations: &[Violation]) -> String {
    violations
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}

/// The four-phase clock: samples per cycle plus the γ extremes.
#[derive(Debug, Clone, PartialEq)]
pub struct ClockSchedule {
    pub samples_per_cycle: usize,
    pub gamma_high_j: f64,
    pub gamma_low_j: f64,
}

impl ClockSchedule {
    pub fn from_config(config: &SimConfig) -> Self {
        ClockSchedule {
            samples_per_cycle: config.samples_per_cycle,
            gamma_high_j: config.gamma_high_j,
            gamma_low_j: config.gamma_low_j,
        }
    }
}

/// Tunneling energy γ of `zone` at global sample index `sample`.
///
/// Zone 0 runs switch, hold, release, relax across the four quarter-cycles;
/// zone z sees the same waveform delayed by z quarter-cycles. The linear
/// ramps start exactly at the previous plateau value and reach the next
/// plateau at the first sample of the following quarter, so the midpoint of
/// a ramp quarter is exactly (γ_high + γ_low)/2 when the quarter length is
/// even.
pub fn clock_gamma(zone: u8, sample: usize, schedule: &ClockSchedule) -> f64 {
    debug_assert!(zone <= 3, "clock zone {zone} out of range");
    let spc = schedule.samples_per_cycle;
    let quarter_len = spc / 4;
    let delayed = (sample + spc - usize::from(zone) * quarter_len) % spc;
    let quarter = delayed / quarter_len;
    let frac = (delayed % quarter_len) as f64 / quarter_len as f64;
    let (gh, gl) = (schedule.gamma_high_j, schedule.gamma_low_j);
    match quarter {
        0 => gh + (gl - gh) * frac, // switch
        1 => gl,                    // hold
        2 => gl + (gh - gl) * frac, // release
        _ => gh,                    // relax
    }
}

/// Nonlinear cell response f(x) = x / √(1 + x²), the bistable transfer
/// function mapping the normalized neighbor drive to a polarization.
pub fn response(x: f64) -> f64 {
    x / (1.0 + x * x).sqrt()
}

/// Coulomb kink energy between two cells, in joules: the electrostatic cost
/// of opposite polarization relative to aligned polarization,
/// E_k = U(P_a = +1, P_b = −1) − U(P_a = +1, P_b = +1), each U a 16-term sum
/// over the cells' dot charges (occupied dots −e/2, empty dots +e/2 after
/// the neutralizing background). Positive for side-by-side neighbors
/// (alignment preferred), negative for diagonal ones.
pub fn kink_energy(a: &Cell, b: &Cell, config: &SimConfig) -> Result<f64, EngineError> {
    if a.x == b.x && a.y == b.y {
        return Err(EngineError::CoincidentCells { x: a.x, y: a.y });
    }
    // Work in the cells' relative frame so translated layouts produce
    // bit-identical energies.
    let dx_nm = (i64::from(a.x) - i64::from(b.x)) as f64;
    let dy_nm = (i64::from(a.y) - i64::from(b.y)) as f64;

    let d = DOT_OFFSET_NM;
    // Dot order: (+,+), (−,+), (−,−), (+,−). P = +1 occupies the (+,+)/(−,−)
    // diagonal with electrons; P = −1 the other.
    let dots = [(d, d), (-d, d), (-d, -d), (d, -d)];
    let charges = |polarization: f64| -> [f64; 4] {
        let half = ELEMENTARY_CHARGE_C / 2.0;
        if polarization > 0.0 {
            [half - ELEMENTARY_CHARGE_C, half, half - ELEMENTARY_CHARGE_C, half]
        } else {
            [half, half - ELEMENTARY_CHARGE_C, half, half - ELEMENTARY_CHARGE_C]
        }
    };

    let k = 1.0 / (4.0 * std::f64::consts::PI * VACUUM_PERMITTIVITY_F_PER_M * config.epsilon_r);
    let pair_energy = |qa: &[f64; 4], qb: &[f64; 4]| -> f64 {
        let mut total = 0.0;
        for (i, (ax, ay)) in dots.iter().enumerate() {
            for (j, (bx, by)) in dots.iter().enumerate() {
                let rx = (dx_nm + ax - bx) * 1.0e-9;
                let ry = (dy_nm + ay - by) * 1.0e-9;
                let r = (rx * rx + ry * ry).sqrt();
                total += k * qa[i] * qb[j] / r;
            }
        }
        total
    };

    let plus = charges(1.0);
    let minus = charges(-1.0);
    Ok(pair_energy(&plus, &minus) - pair_energy(&plus, &plus))
}

/// Precomputed neighbor lists: for each cell, the (index, kink energy) pairs
/// of every other cell within the radius of effect, in ascending cell-index
/// order so summation order is deterministic.
#[derive(Debug, Clone)]
pub struct CouplingMap {
    neighbors: Vec<Vec<(usize, f64)>>,
}

impl CouplingMap {
    pub fn build(layout: &Layout, config: &SimConfig) -> Result<Self, EngineError> {
        let n = layout.cells.len();
        let radius_sq = config.radius_of_effect_nm * config.radius_of_effect_nm;
        let mut neighbors = vec![Vec::new(); n];
        for i in 0..n {
            for j in (i + 1)..n {
                let dist_sq = layout.cells[i].distance_sq_nm2(&layout.cells[j]) as f64;
                if dist_sq <= radius_sq {
                    let e = kink_energy(&layout.cells[i], &layout.cells[j], config)?;
                    neighbors[i].push((j, e));
                    neighbors[j].push((i, e));
                }
            }
        }
        for list in &mut neighbors {
            list.sort_unstable_by_key(|&(j, _)| j);
        }
        Ok(CouplingMap { neighbors })
    }

    pub fn neighbors_of(&self, cell: usize) -> &[(usize, f64)] {
        &self.neighbors[cell]
    }
}

/// Result of relaxing one clock sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RelaxOutcome {
    /// Sweeps performed.
    pub iterations: usize,
    /// Whether max |ΔP| dropped below tolerance within the sweep cap.
    pub converged: bool,
}

#[derive(Clone, Copy, PartialEq)]
enum CellKind {
    /// Input or fixed cell: held at its current state during relaxation.
    Pinned,
    /// Normal or output cell: updated by the response function.
    Free,
}

fn cell_kinds(layout: &Layout) -> Vec<CellKind> {
    layout
        .cells
        .iter()
        .map(|c| match c.function {
            CellFunction::Input(_) | CellFunction::Fixed(_) => CellKind::Pinned,
            CellFunction::Normal | CellFunction::Output(_) => CellKind::Free,
        })
        .collect()
}

/// One synchronous sweep: compute every cell's next polarization from the
/// previous state. Pinned cells pass through unchanged.
fn sweep(
    old: &[f64],
    kinds: &[CellKind],
    zones: &[u8],
    map: &CouplingMap,
    gamma_by_zone: &[f64; 4],
    pool: Option<&rayon::ThreadPool>,
) -> Vec<f64> {
    let update = |i: usize| -> f64 {
        match kinds[i] {
            CellKind::Pinned => old[i],
            CellKind::Free => {
                let mut drive = 0.0;
                for &(j, e) in map.neighbors_of(i) {
                    drive += e * old[j];
                }
                response(drive / (2.0 * gamma_by_zone[usize::from(zones[i])]))
            }
        }
    };
    match pool {
        Some(pool) => pool.install(|| (0..old.len()).into_par_iter().map(update).collect()),
        None => (0..old.len()).map(update).collect(),
    }
}

fn relax_with(
    map: &CouplingMap,
    kinds: &[CellKind],
    zones: &[u8],
    state: &mut Vec<f64>,
    gamma_by_zone: &[f64; 4],
    config: &SimConfig,
    pool: Option<&rayon::ThreadPool>,
) -> RelaxOutcome {
    let mut iterations = 0;
    while iterations < config.max_iterations {
        let next = sweep(state, kinds, zones, map, gamma_by_zone, pool);
        iterations += 1;
        let max_delta = state
            .iter()
            .zip(&next)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0_f64, f64::max);
        *state = next;
        if max_delta < config.tolerance {
            return RelaxOutcome {
                iterations,
                converged: true,
            };
        }
    }
    RelaxOutcome {
        iterations,
        converged: false,
    }
}

/// Relax one clock sample in place. `state[i]` is cell i's polarization;
/// input cells are pinned at whatever the caller put there, fixed cells are
/// forced to their fixed value, and free cells are updated by synchronous
/// sweeps under the given per-zone tunneling energies.
pub fn relax_sample(
    layout: &Layout,
    state: &mut Vec<f64>,
    gamma_by_zone: &[f64; 4],
    config: &SimConfig,
) -> Result<RelaxOutcome, EngineError> {
    config.validate()?;
    if state.len() != layout.cells.len() {
        return Err(EngineError::BadVector {
            vector: 0,
            message: format!(
                "state has {} entries for {} cells",
                state.len(),
                layout.cells.len()
            ),
        });
    }
    let map = CouplingMap::build(layout, config)?;
    let kinds = cell_kinds(layout);
    let zones: Vec<u8> = layout.cells.iter().map(|c| c.zone).collect();
    for (i, cell) in layout.cells.iter().enumerate() {
        if let CellFunction::Fixed(p) = cell.function {
            state[i] = p;
        }
    }
    Ok(relax_with(&map, &kinds, &zones, state, gamma_by_zone, config, pool_none()))
}

fn pool_none() -> Option<&'static rayon::ThreadPool> {
    None
}

/// One input assignment: label → logic level (true = P +1, false = P −1).
pub type InputVector = BTreeMap<String, bool>;

/// Polarization snapshot after relaxing one clock sample.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRow {
    /// Global sample index (vector · samples_per_cycle + offset).
    pub sample: usize,
    /// Which input vector was applied during this sample.
    pub vector: usize,
    /// γ per zone at this sample, J.
    pub gammas: [f64; 4],
    /// Polarization of every cell, in layout cell order.
    pub polarizations: Vec<f64>,
    /// Whether relaxation converged within the sweep cap.
    pub converged: bool,
}

/// Full simulation record: one row per clock sample.
#[derive(Debug, Clone, PartialEq)]
pub struct Trace {
    pub samples_per_cycle: usize,
    pub vector_count: usize,
    pub rows: Vec<TraceRow>,
}

impl Trace {
    /// Number of samples whose relaxation did not converge.
    pub fn non_converged_samples(&self) -> usize {
        self.rows.iter().filter(|r| !r.converged).count()
    }
}

/// The simulation driver. Construct once, then [`Simulator::simulate`] any
/// number of layouts/vector sequences with the same configuration.
pub struct Simulator {
    config: SimConfig,
    pool: Option<rayon::ThreadPool>,
}

impl Simulator {
    /// Sequential simulator (bit-identical to any worker count).
    pub fn new(config: SimConfig) -> Result<Self, EngineError> {
        config.validate()?;
        Ok(Simulator { config, pool: None })
    }

    /// Simulator distributing each sweep over `threads` workers; 0 keeps the
    /// sequential path. Traces are bit-identical regardless of `threads`.
    pub fn with_threads(config: SimConfig, threads: usize) -> Result<Self, EngineError> {
        config.validate()?;
        let pool = if threads == 0 {
            None
        } else {
            Some(
                rayon::ThreadPoolBuilder::new()
                    .num_threads(threads)
                    .build()
                    .map_err(|e| EngineError::InvalidConfig(format!("thread pool: {e}")))?,
            )
        };
        Ok(Simulator { config, pool })
    }

    pub fn config(&self) -> &SimConfig {
        &self.config
    }

    /// Drive `vectors` through `layout`, one full clock cycle per vector,
    /// carrying cell state across cycles. Inputs are pinned at ±1 for their
    /// whole cycle; fixed cells are pinned always; free cells start at 0.
    pub fn simulate(&self, layout: &Layout, vectors: &[InputVector]) -> Result<Trace, EngineError> {
        validate_layout(layout).map_err(EngineError::InvalidLayout)?;
        if vectors.is_empty() {
            return Err(EngineError::NoVectors);
        }
        for (v, vector) in vectors.iter().enumerate() {
            for key in vector.keys() {
                if !layout.inputs.iter().any(|l| l == key) {
                    return Err(EngineError::BadVector {
                        vector: v,
                        message: format!("unknown input {key:?}"),
                    });
                }
            }
            for label in &layout.inputs {
                if !vector.contains_key(label) {
                    return Err(EngineError::BadVector {
                        vector: v,
                        message: format!("missing input {label:?}"),
                    });
                }
            }
        }

        let map = CouplingMap::build(layout, &self.config)?;
        let kinds = cell_kinds(layout);
        let zones: Vec<u8> = layout.cells.iter().map(|c| c.zone).collect();
        let schedule = ClockSchedule::from_config(&self.config);
        let spc = self.config.samples_per_cycle;

        let mut state: Vec<f64> = layout.cells.iter().map(|c| c.polarization).collect();
        for (i, cell) in layout.cells.iter().enumerate() {
            if let CellFunction::Fixed(p) = cell.function {
                state[i] = p;
            }
        }

        let mut rows = Vec::with_capacity(vectors.len() * spc);
        for (v, vector) in vectors.iter().enumerate() {
            for (i, cell) in layout.cells.iter().enumerate() {
                if let CellFunction::Input(label) = &cell.function {
                    state[i] = if vector[label] { 1.0 } else { -1.0 };
                }
            }
            for offset in 0..spc {
                let sample = v * spc + offset;
                let gammas = [
                    clock_gamma(0, sample, &schedule),
                    clock_gamma(1, sample, &schedule),
                    clock_gamma(2, sample, &schedule),
                    clock_gamma(3, sample, &schedule),
                ];
                let outcome = relax_with(
                    &map,
                    &kinds,
                    &zones,
                    &mut state,
                    &gammas,
                    &self.config,
                    self.pool.as_ref(),
                );
                rows.push(TraceRow {
                    sample,
                    vector: v,
                    gammas,
                    polarizations: state.clone(),
                    converged: outcome.converged,
                });
            }
        }
        Ok(Trace {
            samples_per_cycle: spc,
            vector_count: vectors.len(),
            rows,
        })
    }
}

/// Convenience wrapper: sequential simulation with `config`.
pub fn simulate(
    layout: &Layout,
    vectors: &[InputVector],
    config: &SimConfig,
) -> Result<Trace, EngineError> {
    Simulator::new(config.clone())?.simulate(layout, vectors)
}

/// Column headers for a trace CSV: sample, vector, the four zone clocks,
/// then one column per cell in layout order — the cell's label if it has
/// one, else `c<x>_<y>`.
pub fn trace_columns(layout: &Layout) -> Vec<String> {
    let mut columns = vec![
        "sample".to_string(),
        "vector".to_string(),
        "clock0".to_string(),
        "clock1".to_string(),
        "clock2".to_string(),
        "clock3".to_string(),
    ];
    for cell in &layout.cells {
        columns.push(match cell.label() {
            Some(l) => l.to_string(),
            None => format!("c{}_{}", cell.x, cell.y),
        });
    }
    columns
}

/// Stream a trace as CSV. Floating-point fields use 6 significant digits
/// (`9.80000e-22`).
pub fn write_trace_csv<W: Write>(
    trace: &Trace,
    layout: &Layout,
    writer: &mut W,
) -> std::io::Result<()> {
    writeln!(writer, "{}", trace_columns(layout).join(","))?;
    for row in &trace.rows {
        write!(writer, "{},{}", row.sample, row.vector)?;
        for gamma in &row.gammas {
            write!(writer, ",{gamma:.5e}")?;
        }
        for p in &row.polarizations {
            write!(writer, ",{p:.5e}")?;
        }
        writeln!(writer)?;
    }
    Ok(())
}

/// [`write_trace_csv`] into a `String`.
pub fn trace_to_csv(trace: &Trace, layout: &Layout) -> String {
    let mut buf = Vec::new();
    write_trace_csv(trace, layout, &mut buf).expect("writing to a Vec cannot fail");
    String::from_utf8(buf).expect("CSV output is ASCII")
}
