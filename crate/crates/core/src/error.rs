use std::io;

use thiserror::Error;

/// Errors produced by the codec, the bitstream layer and the analysis suite.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("truncated input: needed {needed} bytes for frame {frame}, file holds {available}")]
    Truncated {
        frame: usize,
        needed: u64,
        available: u64,
    },

    #[error("region {x},{y} size {size} exceeds plane bounds {width}x{height}")]
    OutOfBounds {
        x: usize,
        y: usize,
        size: usize,
        width: usize,
        height: usize,
    },

    #[error("mismatched blocks: {0}")]
    Mismatch(String),

    #[error("invalid intra mode {0}")]
    InvalidMode(u8),

    #[error("reference line {line} is not part of the {alphabet} alphabet")]
    LineOutOfAlphabet { line: usize, alphabet: String },

    #[error("bitstream error at bit {bit}: {reason}")]
    Bitstream { bit: u64, reason: String },

    #[error("malformed stream in frame {frame}, CU at ({x},{y}) size {size}: {source}")]
    Parse {
        frame: usize,
        x: usize,
        y: usize,
        size: usize,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
