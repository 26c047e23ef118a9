//! Library side of the `qha` command line: typed result tables, verification
//! reports, and the verification suites themselves. The binary is a thin
//! argument-parsing shell over these; integration tests call them directly.

pub mod report;
pub mod verify;
