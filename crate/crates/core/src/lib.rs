//! Toolkit for studying restructured hardware kernels.
//!
//! Two kernels are covered end to end: Huffman tree creation (an irregular
//! kernel) and 3x3 streaming convolution (a regular kernel). For each one the
//! crate provides a plain software implementation and a restructured
//! implementation shaped like the streaming hardware design, with functional
//! equivalence between the pair. On top of the simulators sit a calibrated
//! clock-cycle model, an HLS-C template generator, a bounded-FIFO dataflow
//! composer, and an exhaustive design-space explorer.
//!
//! The `restruct` binary in this package exposes everything as batch
//! subcommands over CSV/PGM/JSON files.

pub mod codegen;
pub mod cycle_model;
pub mod dataflow;
pub mod dse;
pub mod huffman;
pub mod pgm;
pub mod stencil;
