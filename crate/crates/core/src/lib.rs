//! Secrecy distributed through a private channel, reproduced end to end.
//!
//! * [`dist`]: exact joint distributions with party ownership.
//! * [`info`]: entropy, mutual and conditional mutual information.
//! * [`intrinsic`]: witness channels, exact zero certification and a
//!   numerical search for intrinsic information.
//! * [`protocol`]: legality-checked LOPC steps, the four-variable protocol
//!   and the untrusted courier demonstration.
//! * [`quantum`]: the density-matrix analog with CNOTs, partial transposes
//!   and computational-basis measurement.
//! * [`report`]: JSON reports behind the `lopc` command line tool.

pub mod dist;
pub mod error;
pub mod info;
pub mod intrinsic;
pub mod linalg;
pub mod protocol;
pub mod quantum;
pub mod report;

pub use dist::{paper_distribution, rational, JointDistribution, Party, Rational, Stage, Variable};
pub use error::{Error, Result};
