pub mod delay;
pub mod jsa;
pub mod optimize;
pub mod reproduce;

pub use delay::{cmd_delay, compute_delay, DelayCurves};
pub use jsa::{cmd_jsa, JsaMeta};
pub use optimize::{cmd_optimize, run_sweep, SweepRow};
pub use reproduce::{cmd_reproduce, Report};
