//! Model checking and repair of upper time-bounded Until requirements on
//! state-labelled continuous-time Markov chains.
//!
//! The usual flow is: parse a chain ([`model::parse_model`]) and a
//! requirement ([`csl::parse`]), check it ([`csl::check`]), and if some
//! states violate it, synthesize rate-reduction factors with
//! [`repair::repair`].
//!
//! ```
//! use smc_repair::{csl, model, repair};
//!
//! let smc = model::parse_model(
//!     "states 2\n0 1 1.0\nlabels\n0: up\n1: repair\n",
//!     model::ParseOptions::default(),
//! )
//! .unwrap();
//! let req = csl::parse(r#"P<=0.2 [ "up" U<=5 "repair" ]"#).unwrap();
//! let out = repair::repair(&smc, &req, &repair::RepairConfig::default()).unwrap();
//! assert_eq!(out.status, repair::RepairStatus::Repaired);
//! assert!(out.after[0] <= 0.2);
//! ```

pub mod analysis;
pub mod csl;
pub mod model;
pub mod oracle;
pub mod partition;
pub mod random;
pub mod repair;
mod stateset;
pub mod sweep;

pub use model::{Smc, Transition, TransitionId};
pub use partition::{FactorName, Factors, Partition, ReducedSmc, StateClass};
pub use stateset::StateSet;
