//! File formats, DOT export and the command-line front end for
//! `confsect-core`.

pub mod cli;
pub mod dot;
pub mod io;
pub mod report;
