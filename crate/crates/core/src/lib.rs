//! Exact scheduling of precedence-constrained projects that share an
//! energy-intensive machine with proc/idle/off states under a time-of-use
//! electricity tariff.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod budget;
pub mod instance;
pub mod lbbd;
mod lp;
pub mod machine;
pub mod master;
pub mod oracle;
pub mod precedence;
pub mod random;
pub mod solution;
pub mod spaces;
pub mod subproblem;

pub use instance::{Instance, InstanceError, Task, ENERGY_RESOURCE};
pub use lbbd::{run_lbbd, LbbdConfig, RunResult, RunStatus};
pub use machine::{MachineState, Step, TransitionError, TransitionSystem};
pub use solution::{Solution, ObjectiveWeights};
pub use spaces::{SpacesError, SpacesTable};
