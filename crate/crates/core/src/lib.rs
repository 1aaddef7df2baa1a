//! Stabilizer-circuit simulation and synthesis.
//!
//! The [`tableau`] module holds the destabilizer/stabilizer simulator;
//! [`mixed`] extends it to mixed states, [`synth`] turns tableaus back into
//! circuits, [`overlap`] computes inner products and [`beyond`] handles
//! non-stabilizer inputs and gates. [`oracle`] is a small dense simulator
//! used to cross-check everything else. [`program`] parses the CHP assembly
//! language and [`run`] executes it; [`bench`] and [`census`] back the
//! benchmark and state-counting commands.

pub mod bench;
pub mod beyond;
pub mod bits;
pub mod census;
pub mod error;
pub mod gate;
pub mod gf2;
pub mod mixed;
pub mod oracle;
pub mod overlap;
pub mod pauli;
pub mod program;
pub mod run;
pub mod synth;
pub mod tableau;

pub use error::{Error, Result};
pub use gate::Gate;
pub use gf2::BinaryMatrix;
pub use mixed::MixedTableau;
pub use overlap::{inner_product, OverlapResult};
pub use pauli::{Letter, PauliOperator};
pub use program::{parse, CircuitProgram, Instruction};
pub use run::{run, run_seeded, Engine, RunOptions, Transcript};
pub use synth::CanonicalCircuit;
pub use tableau::{MeasurementRecord, Tableau};
