//! Experiment drivers and report rendering for the `overlap` command.

pub mod experiments;
pub mod output;
pub mod report;
