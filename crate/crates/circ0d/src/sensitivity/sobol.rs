//! Deterministic Sobol low-discrepancy sequence.
//!
//! Gray-code generator over the standard Joe-Kuo direction numbers,
//! matching the reference sequence: each coordinate starts 0, 0.5, 0.75,
//! 0.25, ... and all values lie in [0, 1).

use crate::error::{Error, Result};

use super::sobol_table::JOE_KUO;

/// Highest supported dimension.
pub const MAX_DIM: usize = 64;

const BITS: u32 = 32;

/// Expands the direction numbers v_1..v_BITS of one dimension.
fn direction_numbers(dim_index: usize) -> [u32; BITS as usize] {
    let mut v = [0u32; BITS as usize];
    if dim_index == 0 {
        // van der Corput: v_k = 2^(BITS - k)
        for (k, slot) in v.iter_mut().enumerate() {
            *slot = 1 << (BITS - 1 - k as u32);
        }
        return v;
    }
    let (poly, m_init) = JOE_KUO[dim_index - 1];
    let s = (32 - poly.leading_zeros() - 1) as usize;
    for k in 0..BITS as usize {
        if k < s {
            debug_assert!(m_init[k] % 2 == 1);
            v[k] = m_init[k] << (BITS - 1 - k as u32);
        } else {
            let mut value = v[k - s] ^ (v[k - s] >> s);
            for i in 1..s {
                if (poly >> (s - i)) & 1 == 1 {
                    value ^= v[k - i];
                }
            }
            v[k] = value;
        }
    }
    v
}

/// Streaming Sobol point generator.
pub struct SobolSequence {
    directions: Vec<[u32; BITS as usize]>,
    state: Vec<u32>,
    index: u64,
}

impl SobolSequence {
    pub fn new(dim: usize) -> Result<Self> {
        if dim == 0 || dim > MAX_DIM {
            return Err(Error::Domain(format!(
                "Sobol dimension {dim} outside 1..={MAX_DIM}"
            )));
        }
        Ok(SobolSequence {
            directions: (0..dim).map(direction_numbers).collect(),
            state: vec![0; dim],
            index: 0,
        })
    }

    pub fn dim(&self) -> usize {
        self.state.len()
    }

    /// Next point of the sequence; the first is the origin.
    pub fn next_point(&mut self) -> Vec<f64> {
        let point: Vec<f64> =
            self.state.iter().map(|&x| x as f64 / (1u64 << BITS) as f64).collect();
        // advance to the next index in Gray-code order
        let bit = self.index.trailing_ones() as usize;
        debug_assert!(bit < BITS as usize, "sequence length exceeds 2^32");
        for (d, x) in self.state.iter_mut().enumerate() {
            *x ^= self.directions[d][bit];
        }
        self.index += 1;
        point
    }
}

/// First `count` points of the `dim`-dimensional Sobol sequence.
pub fn sobol_sequence(dim: usize, count: usize) -> Result<Vec<Vec<f64>>> {
    let mut seq = SobolSequence::new(dim)?;
    Ok((0..count).map(|_| seq.next_point()).collect())
}
