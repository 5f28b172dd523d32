pub mod analytics;
pub mod avatar;
pub mod ergo;
pub mod error;
pub mod geometry;
pub mod reshaper;
pub mod shape;

pub use error::{Error, Result};
