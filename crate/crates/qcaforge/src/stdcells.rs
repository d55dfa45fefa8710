//! Standard-cell library: generated layouts with their truth tables.

use crate::model::{Layout, MetricsReport};
use crate::verify::TruthTable;

/// A generated circuit: layout plus (where meaningful) its truth table and
/// the metrics the design is published with.
#[derive(Debug, Clone)]
pub struct CircuitHandle {
    pub layout: Layout,
    /// Behavioural contract, when the circuit has a canonical table.
    pub expected_table: Option<TruthTable>,
    /// Published size/latency figures the layout is required to reproduce.
    pub reported_metrics: Option<MetricsReport>,
}

impl CircuitHandle {
    pub fn new(layout: Layout) -> Self {
        CircuitHandle {
            layout,
            expected_table: None,
            reported_metrics: None,
        }
    }
}
