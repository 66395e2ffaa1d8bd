//! Command-line harness around `subspec-core`: JSON experiment configs in,
//! CSV/JSON/SVG artifacts and suite reports out.
//!
//! Exit codes: `0` success, `1` failed check or inadmissible input, `2`
//! configuration error.

pub mod commands;
pub mod config;
pub mod output;
pub mod suites;
