//! Multiple reference line intra coding with residue compensation.

pub mod analysis;
pub mod bits;
pub mod canvas;
pub mod compensate;
pub mod corpus;
pub mod cu;
pub mod decoder;
pub mod encoder;
pub mod error;
pub mod frame;
pub mod par;
pub mod pipeline;
pub mod predict;
pub mod reference;
pub mod syntax;
pub mod transform;

pub use error::{Error, Result};
