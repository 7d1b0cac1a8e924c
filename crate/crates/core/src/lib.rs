//! Regular expression synthesis from natural language and examples.
//!
//! A description is parsed into a set of ranked sketches (partial regexes with
//! constrained holes), and each sketch is completed by an enumerative search
//! that is checked against positive and negative example strings.

pub mod automata;
pub mod examplegen;
pub mod grammar;
pub mod learning;
pub mod pipeline;
pub mod regex;
pub mod synth;
