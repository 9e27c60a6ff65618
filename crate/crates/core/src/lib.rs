//! Arithmetic for Z_p-towers of curves over finite fields.

pub mod analysis;
pub mod cartier;
pub mod error;
pub mod gf;
pub mod linalg;
pub mod poly;
pub mod standard_form;
pub mod tower;
pub mod witt;

pub use error::{Error, Result};
