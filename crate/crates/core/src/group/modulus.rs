use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The ring Z_p = Z/pZ for an integer p ≥ 2 (not necessarily prime).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Modulus(u32);

impl Modulus {
    pub fn new(p: u64) -> Result<Self> {
        if p < 2 {
            return Err(Error::InvalidArgument(format!("modulus must be >= 2, got {p}")));
        }
        let p = u32::try_from(p)
            .map_err(|_| Error::InvalidArgument(format!("modulus {p} does not fit in 32 bits")))?;
        Ok(Modulus(p))
    }

    #[inline]
    pub fn get(self) -> u32 {
        self.0
    }

    /// Reduce any signed integer into `[0, p)`.
    #[inline]
    pub fn reduce(self, x: i64) -> u32 {
        x.rem_euclid(self.0 as i64) as u32
    }

    #[inline]
    pub fn add(self, a: u32, b: u32) -> u32 {
        let s = a as u64 + b as u64;
        let p = self.0 as u64;
        (if s >= p { s - p } else { s }) as u32
    }

    #[inline]
    pub fn neg(self, a: u32) -> u32 {
        if a == 0 {
            0
        } else {
            self.0 - a
        }
    }

    #[inline]
    pub fn mul(self, a: u32, b: u32) -> u32 {
        ((a as u64 * b as u64) % self.0 as u64) as u32
    }

    /// Accumulator for sums of products that reduces lazily.
    #[inline]
    pub(crate) fn dot(self) -> DotAcc {
        let p = self.0 as u64;
        DotAcc {
            acc: 0,
            p,
            ceiling: u64::MAX - (p - 1) * (p - 1),
        }
    }
}

pub(crate) struct DotAcc {
    acc: u64,
    p: u64,
    ceiling: u64,
}

impl DotAcc {
    #[inline]
    pub fn add_product(&mut self, a: u32, b: u32) {
        if self.acc > self.ceiling {
            self.acc %= self.p;
        }
        self.acc += a as u64 * b as u64;
    }

    #[inline]
    pub fn add(&mut self, a: u32) {
        self.add_product(a, 1);
    }

    #[inline]
    pub fn finish(self) -> u32 {
        (self.acc % self.p) as u32
    }
}
