//! qcaforge — a cell-level simulator and verification toolkit for
//! quantum-dot cellular automata (QCA) circuits.
//!
//! The crate is organized in four layers:
//!
//! * [`model`] — layouts, cells, clock zones, validation, geometric metrics,
//!   and the plain-text layout file format.
//! * [`engine`] — the bistable-approximation simulation engine: Coulomb kink
//!   energies between cells, the four-phase adiabatic clock, and iterative
//!   relaxation of cell polarizations sample by sample.
//! * [`stdcells`] — generators for a small standard-cell library (wires,
//!   inverters, majority/AND/OR gates, a 2:1 mux, a D latch, and D flip-flops
//!   with and without set/reset), each bundled with its truth table.
//! * [`verify`] — truth-table driven functional verification on top of the
//!   engine, plus the comparison report against published reference designs.
//!
//! Polarization is dimensionless in [-1, +1]; energies are joules; positions
//! are integer nanometers on a 20 nm grid.

pub mod engine;
pub mod model;
pub mod stdcells;
pub mod verify;
