//! Command-line harness for the macroscopic-coherence library: sweep
//! commands producing CSV data and a decoherence equivalence check.
//!
//! The binary lives in `main.rs`; everything testable (spec parsing, sweep
//! execution, CSV assembly) is here.

pub mod output;
pub mod specs;
pub mod sweep;
