//! MSB-first bit I/O, exp-Golomb codes and a counting sink for RD costs.

use crate::error::{Error, Result};

/// Destination for bits. Writers and counters share every syntax
/// routine, so counted rates equal written rates.
pub trait BitSink {
    fn put_bit(&mut self, bit: bool);

    fn put_bits(&mut self, value: u64, count: u32) {
        for i in (0..count).rev() {
            self.put_bit((value >> i) & 1 == 1);
        }
    }

    fn bits_written(&self) -> u64;

    /// Order-k exp-Golomb code of `value`.
    fn put_exp_golomb(&mut self, value: u32, k: u32) {
        let x = value as u64 + (1u64 << k);
        let len = 64 - x.leading_zeros();
        self.put_bits(0, len - 1 - k);
        self.put_bits(x, len);
    }
}

#[derive(Debug, Default, Clone)]
pub struct BitWriter {
    bytes: Vec<u8>,
    acc: u8,
    filled: u32,
    total: u64,
}

impl BitWriter {
    pub fn new() -> Self {
        Self::default()
    }

    /// Pad with zero bits to the next byte boundary.
    pub fn align(&mut self) {
        while self.filled != 0 {
            self.put_bit(false);
        }
    }

    pub fn finish(mut self) -> Vec<u8> {
        self.align();
        self.bytes
    }
}

impl BitSink for BitWriter {
    fn put_bit(&mut self, bit: bool) {
        self.acc = (self.acc << 1) | bit as u8;
        self.filled += 1;
        self.total += 1;
        if self.filled == 8 {
            self.bytes.push(self.acc);
            self.acc = 0;
            self.filled = 0;
        }
    }

    fn bits_written(&self) -> u64 {
        self.total
    }
}

#[derive(Debug, Default, Clone, Copy)]
pub struct BitCounter {
    pub bits: u64,
}

impl BitSink for BitCounter {
    fn put_bit(&mut self, _bit: bool) {
        self.bits += 1;
    }

    fn put_bits(&mut self, _value: u64, count: u32) {
        self.bits += count as u64;
    }

    fn bits_written(&self) -> u64 {
        self.bits
    }
}

/// Bit count of the exp-Golomb code without writing it.
pub fn exp_golomb_len(value: u32, k: u32) -> u32 {
    let x = value as u64 + (1u64 << k);
    2 * (64 - x.leading_zeros()) - 1 - k
}

#[derive(Debug, Clone)]
pub struct BitReader<'a> {
    data: &'a [u8],
    pos: u64,
}

impl<'a> BitReader<'a> {
    pub fn new(data: &'a [u8]) -> Self {
        BitReader { data, pos: 0 }
    }

    pub fn position(&self) -> u64 {
        self.pos
    }

    pub fn error(&self, reason: impl Into<String>) -> Error {
        Error::Bitstream {
            bit: self.pos,
            reason: reason.into(),
        }
    }

    pub fn read_bit(&mut self) -> Result<bool> {
        let byte = (self.pos / 8) as usize;
        let Some(b) = self.data.get(byte) else {
            return Err(self.error("unexpected end of stream"));
        };
        let bit = (b >> (7 - self.pos % 8)) & 1 == 1;
        self.pos += 1;
        Ok(bit)
    }

    pub fn read_bits(&mut self, count: u32) -> Result<u64> {
        let mut v = 0u64;
        for _ in 0..count {
            v = (v << 1) | self.read_bit()? as u64;
        }
        Ok(v)
    }

    pub fn read_exp_golomb(&mut self, k: u32) -> Result<u32> {
        let mut zeros = 0;
        while !self.read_bit()? {
            zeros += 1;
            if zeros > 31 {
                return Err(self.error("exp-Golomb prefix too long"));
            }
        }
        let rest = self.read_bits(zeros + k)?;
        let x = (1u64 << (zeros + k)) | rest;
        u32::try_from(x - (1u64 << k)).map_err(|_| self.error("exp-Golomb value overflow"))
    }

    pub fn align(&mut self) {
        self.pos = self.pos.div_ceil(8) * 8;
    }

    /// Byte offset of the cursor; the cursor must be aligned.
    pub fn byte_position(&self) -> usize {
        (self.pos / 8) as usize
    }
}
