//! Geometry files, expressions, reports and the `akdq` command line.

pub mod commands;
pub mod expr;
pub mod report;
pub mod spec;

pub use commands::{evaluate, execute, run_command, Cli, Command, Format, Query};
pub use expr::{parse_expression, parse_jet, parse_scalar, Expr};
pub use report::{Entry, ErrorInfo, Report, Section};
pub use spec::GeometrySpec;
