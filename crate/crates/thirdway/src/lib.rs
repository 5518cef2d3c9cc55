//! File formats, data ingestion and the command-line front end for
//! [`thirdway_core`].

pub mod cli;
pub mod config;
pub mod error;
pub mod fingerprint;
pub mod grid;
pub mod io;
pub mod model_file;
pub mod output;

pub use error::{Error, Result};
pub use fingerprint::Fingerprint;
pub use io::{load_dataset, load_dataset_file, write_dataset, Delimiter, SchemaMap, TextFormat};
pub use model_file::Model;
