//! Command-line pipeline and HTTP session service for the lexdrill
//! spelling trainer.

pub mod server;
pub mod store;
