//! Extract Method recommendation from Java change history.
//!
//! The crate is organised as a pipeline:
//!
//! * [`java`] parses single compilation units into a [`java::CodeModel`];
//! * [`metrics`] turns classes and methods into the 61-feature vector;
//! * [`detect`] finds Extract Method refactorings between two file versions;
//! * [`miner`] walks Git history and labels methods;
//! * [`dataset`], [`learners`] and [`evaluation`] train and assess models;
//! * [`bundle`] persists a trained model for [`pipeline`] and the CLI.

pub mod java;
pub mod metrics;
pub mod detect;
pub mod rng;
pub mod dataset;
pub mod miner;
pub mod evaluation;
pub mod learners;
pub mod bundle;
pub mod pipeline;
