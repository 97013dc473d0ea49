//! Front end for `isochron`: system specs in, JSON reports and CSV period tables out.

pub mod grid;
pub mod report;
pub mod run;
pub mod spec;

pub use run::{run, Command, Options, Theorem};
pub use spec::{Field, SystemSpec};
