//! Secret, reproducible choice of which sensors hold a group's shares.
//!
//! The seed is the SHA-256 of the original data and stays with the data
//! owner. Candidate i is the first 8 bytes (big-endian) of
//! SHA-256(seed ∥ i as u64 BE) reduced mod N; repeats are skipped. Growing
//! `count` therefore only appends to the sequence.

use std::collections::HashSet;

use sha2::{Digest, Sha256};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AddressingError {
    #[error("cannot pick {count} distinct nodes from a network of {network_size}")]
    CountExceedsNetwork { count: usize, network_size: u64 },
}

#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct PlacementSeed(pub [u8; 32]);

impl PlacementSeed {
    pub fn to_hex(&self) -> String {
        hex::encode(self.0)
    }

    pub fn from_hex(s: &str) -> Option<Self> {
        Some(PlacementSeed(hex::decode(s).ok()?.try_into().ok()?))
    }
}

impl std::fmt::Debug for PlacementSeed {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        // only a prefix, the seed is secret
        write!(f, "PlacementSeed({}…)", &self.to_hex()[..8])
    }
}

pub fn derive_seed(data: &[u8]) -> PlacementSeed {
    PlacementSeed(Sha256::digest(data).into())
}

fn candidate(seed: &PlacementSeed, counter: u64, network_size: u64) -> u64 {
    let mut h = Sha256::new();
    h.update(seed.0);
    h.update(counter.to_be_bytes());
    let digest = h.finalize();
    let head: [u8; 8] = digest[..8].try_into().expect("sha256 is 32 bytes");
    u64::from_be_bytes(head) % network_size
}

/// First `count` distinct node ids in the seed's candidate stream.
pub fn sensor_sequence(seed: &PlacementSeed, count: usize, network_size: u64) -> Result<Vec<u64>, AddressingError> {
    if count as u64 > network_size {
        return Err(AddressingError::CountExceedsNetwork { count, network_size });
    }
    let mut seen = HashSet::with_capacity(count);
    let mut out = Vec::with_capacity(count);
    let mut counter = 0u64;
    while out.len() < count {
        let id = candidate(seed, counter, network_size);
        if seen.insert(id) {
            out.push(id);
        }
        counter += 1;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_digest() {
        assert_eq!(
            derive_seed(b"").to_hex(),
            "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855"
        );
        assert_eq!(derive_seed(b"abc"), derive_seed(b"abc"));
    }

    #[test]
    fn bit_flips_change_seed() {
        let data = b"temperature=21.5C humidity=40%".to_vec();
        let base = derive_seed(&data);
        for byte in 0..data.len() {
            for bit in 0..8 {
                let mut flipped = data.clone();
                flipped[byte] ^= 1 << bit;
                assert_ne!(derive_seed(&flipped), base);
            }
        }
    }

    #[test]
    fn full_count_is_permutation() {
        let seq = sensor_sequence(&derive_seed(b"x"), 50, 50).unwrap();
        let mut sorted = seq.clone();
        sorted.sort_unstable();
        assert_eq!(sorted, (0..50).collect::<Vec<_>>());
    }

    #[test]
    fn too_many() {
        assert_eq!(
            sensor_sequence(&derive_seed(b"x"), 11, 10),
            Err(AddressingError::CountExceedsNetwork {
                count: 11,
                network_size: 10
            })
        );
    }

    #[test]
    fn prefix_stable_and_distinct() {
        let seed = derive_seed(b"prefix");
        let long = sensor_sequence(&seed, 40, 64).unwrap();
        for count in 0..40 {
            assert_eq!(sensor_sequence(&seed, count, 64).unwrap(), long[..count]);
        }
        let unique: HashSet<_> = long.iter().collect();
        assert_eq!(unique.len(), long.len());
    }

    #[test]
    fn different_seeds_differ() {
        let a = sensor_sequence(&derive_seed(b"a"), 10, 100).unwrap();
        let b = sensor_sequence(&derive_seed(b"b"), 10, 100).unwrap();
        assert_ne!(a, b);
    }

    /// First draw over N = 16 for 10^4 seeds; chi-square critical value for
    /// 15 degrees of freedom at alpha = 0.001 is 37.697.
    #[test]
    fn first_draw_is_uniform() {
        let mut counts = [0u32; 16];
        for i in 0u32..10_000 {
            let seed = derive_seed(&i.to_be_bytes());
            counts[sensor_sequence(&seed, 1, 16).unwrap()[0] as usize] += 1;
        }
        let expected = 10_000.0 / 16.0;
        let chi2: f64 = counts
            .iter()
            .map(|&c| (f64::from(c) - expected).powi(2) / expected)
            .sum();
        assert!(chi2 < 37.697, "chi2 = {chi2}");
    }
}
