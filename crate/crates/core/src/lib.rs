pub mod bench;
pub mod datagen;
pub mod error;
pub mod ingest;
pub mod linalg;
pub mod pipeline;
pub mod selection;

pub use error::{Error, Result};
