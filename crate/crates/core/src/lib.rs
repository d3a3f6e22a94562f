//! Measuring information loss in computation.
//!
//! The crate quantifies how much information logical gates, fixed-width
//! arithmetic, memory erasure and Turing machine runs destroy, using the
//! Shannon measure of information (SMI). It also provides a history-keeping
//! simulator that can run any machine backwards, oracle machines whose
//! answers are accounted as external bits, and a bounded halting census over
//! small machine classes.
//!
//! Halting is undecidable in general. The census reports bounded evidence
//! only: a machine is `halted`, `freeze`, `loop_proven`, or `step_limit`
//! (unknown at that bound). Semantic program properties such as "terminates
//! on every input" are never decided here.
//!
//! | module | contents |
//! |--------|----------|
//! | [`smi`] | entropy, surprisal, `-p log p` curves, binary question trees |
//! | [`gate`] | truth tables, preimages, equivocation, NAND synthesis, circuits |
//! | [`ledger`] | loss events, erasure entropy, Landauer energy |
//! | [`arith`] | arithmetic preimage enumeration and operand reconstruction |
//! | [`machine`] | Turing machine simulation, loop detection, history and retrace |
//! | [`oracle`] | ASK instruction and census-backed halting oracles |
//! | [`census`] | machine enumeration and bounded halting census |
//! | [`cli`] | the `infoloss` command line |

pub mod arith;
pub mod census;
pub mod cli;
mod error;
pub mod gate;
pub mod ledger;
pub mod machine;
pub mod oracle;
pub mod smi;

pub use error::{Error, Result};
pub use smi::Bits;
