//! The five experiment studies, each mapping a configuration to one CSV
//! artifact.

pub mod convergence;
pub mod missprob;
pub mod nmse;
pub mod se;
pub mod stopping;
