//! Test fixtures and independent reference implementations.
pub mod cohesion;
pub mod expect;
pub mod gitrepo;
pub mod javagen;
pub mod oracle;
pub mod overlap;
pub mod synthetic;
