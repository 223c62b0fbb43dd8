//! Construction and finite-horizon verification of monomial algebras whose
//! growth follows a prescribed function.

pub mod error;
pub mod growth;
pub mod locnil;
pub mod par;
pub mod prime;
pub mod report;
pub mod primitive;
pub mod words;

pub use error::{Error, Result};
