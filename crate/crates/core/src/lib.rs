//! Spelling-error analysis and exercise generation for dyslexia trainers.
//!
//! The pipeline runs corpus pairs of misspelled and corrected text through
//! [`analysis`] (alignment and error classification), aggregates the errors
//! into reusable [`patterns`], and applies those patterns to frequent
//! lexicon words in [`exercise`] to build difficulty-graded exercise banks.
//! [`metrics`] scores dictation and reading transcripts, [`stats`] runs the
//! paired pre/post analysis, and [`progress`] holds the event-sourced player
//! state used by the session service.

pub mod text;
pub mod analysis;
pub mod patterns;
pub mod exercise;
pub mod metrics;
pub mod stats;
pub mod progress;
