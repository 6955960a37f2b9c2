//! Keyless data partitioning into the roots of a polynomial over a finite field.
//!
//! A datum d is split into k roots whose product is d modulo a prime. Any
//! k−1 roots are uniformly distributed regardless of d. The [`redundancy`]
//! module lifts k roots to n self-describing shares so that any k of them
//! suffice, and [`composite`] runs the same construction on d^y modulo n = p·q.
//! [`codec`], [`addressing`] and [`simnet`] turn this into files, share
//! placements and a simulated sensor network.

pub mod addressing;
pub mod codec;
pub mod composite;
pub mod field;
pub mod partition;
pub mod pipeline;
pub mod redundancy;
pub mod simnet;

pub use composite::{CompositeError, CompositeKey, CompositeShare};
pub use field::{FieldElement, FieldError, Modulus, ModulusKind};
pub use partition::{CoefficientSet, Datum, GroupId, PartitionError, RootShare};
pub use pipeline::{join_envelopes, split_bytes, split_datum, JoinOutput, PipelineError, SplitPlan, SplitScheme};
pub use redundancy::{ExpansionMatrix, ExpansionMode, RedundancyError, RedundantShare};
