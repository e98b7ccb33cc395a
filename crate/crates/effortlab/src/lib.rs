//! Dataset files, report rendering and the command-line front end for
//! [`effortlab_core`].

pub mod cli;
mod error;
pub mod io;
pub mod report;

pub use error::DataError;
pub use io::{load_dataset, parse_dataset, parse_str, serialize, DataFormat, LoadedDataset};
