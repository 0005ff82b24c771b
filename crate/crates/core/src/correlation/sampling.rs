//! Seeded random partitions of the test set into observation units.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Random stream domains. Each (seed, domain, index) triple names an
/// independent ChaCha stream so parallel and serial runs draw identical numbers.
pub mod domain {
    pub const ASSIGNMENT: u64 = 0x6173_7369_676e; // "assign"
    pub const BOOTSTRAP: u64 = 0x626f_6f74_7374; // "bootst"
}

pub fn stream_rng(seed: u64, domain: u64, index: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&domain.to_le_bytes());
    let mut rng = ChaCha8Rng::from_seed(key);
    rng.set_stream(index);
    rng
}

/// One partition of the segment indices into disjoint units of equal size.
/// Segments left over after the last full unit are unused.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Assignment {
    /// Each unit's segment indices, ascending.
    pub units: Vec<Vec<usize>>,
}

impl Assignment {
    pub fn unit_size(&self) -> usize {
        self.units.first().map_or(0, Vec::len)
    }
}

/// Draws `count` assignments of `segment_count` segments into units of
/// `unit_size`. Assignment `k` depends only on `seed` and `k`.
pub fn sample_assignments(segment_count: usize, unit_size: usize, count: usize, seed: u64) -> Result<Vec<Assignment>> {
    if unit_size == 0 || unit_size > segment_count {
        return Err(Error::InvalidUnitSize {
            unit_size,
            segments: segment_count,
        });
    }
    Ok((0..count)
        .map(|k| sample_one(segment_count, unit_size, seed, k as u64))
        .collect())
}

fn sample_one(segment_count: usize, unit_size: usize, seed: u64, index: u64) -> Assignment {
    let mut rng = stream_rng(seed, domain::ASSIGNMENT, index);
    let mut perm: Vec<usize> = (0..segment_count).collect();
    perm.shuffle(&mut rng);
    let units = perm
        .chunks_exact(unit_size)
        .map(|chunk| {
            let mut unit = chunk.to_vec();
            unit.sort_unstable();
            unit
        })
        .collect();
    Assignment { units }
}
