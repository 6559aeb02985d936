pub mod error;
pub mod matrix;
pub mod jordan;
pub mod uniform;
pub mod report;
pub mod constructors;
pub mod classify;
pub mod search;
pub mod io;
pub mod cli;
