//! Whole-payload split and join: bytes in, share envelopes out, and back.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use rand::RngCore;
use thiserror::Error;

use crate::codec::{self, ChunkedPayload, CodecError, Scheme, ShareEnvelope};
use crate::composite::{self, CompositeError, CompositeKey};
use crate::field::{FieldElement, Modulus};
use crate::partition::{self, Datum, GroupId, PartitionError};
use crate::redundancy::{self, ExpansionMode, RedundancyError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PipelineError {
    #[error("unrecoverable: {available} distinct shares available, {needed} needed (short by {})", .needed - .available)]
    Unrecoverable { available: usize, needed: usize },
    #[error("no shares given")]
    NoShares,
    #[error("shares disagree on {0}")]
    Incompatible(&'static str),
    #[error("two different shares claim index {0}")]
    ConflictingIndex(u16),
    #[error("n must be in [k, 65535]")]
    BadShareCount,
    #[error(transparent)]
    Codec(#[from] CodecError),
    #[error(transparent)]
    Partition(#[from] PartitionError),
    #[error(transparent)]
    Redundancy(#[from] RedundancyError),
    #[error(transparent)]
    Composite(#[from] CompositeError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SplitScheme {
    /// All k root shares are needed.
    RootK,
    /// n self-describing shares, any k of which rebuild the roots.
    Redundant { n: u16, mode: ExpansionMode },
    /// Roots of d^y modulo the key's composite modulus.
    Composite(CompositeKey),
}

#[derive(Debug, Clone)]
pub struct SplitPlan {
    pub k: usize,
    pub scheme: SplitScheme,
    /// Prime used by the root and redundant schemes. The composite scheme
    /// uses the key's modulus instead.
    pub modulus: Modulus,
}

impl SplitPlan {
    pub fn new(k: usize, scheme: SplitScheme) -> Self {
        SplitPlan {
            k,
            scheme,
            modulus: Modulus::curve25519_prime(),
        }
    }

    pub fn with_modulus(mut self, modulus: Modulus) -> Self {
        self.modulus = modulus;
        self
    }

    fn working_modulus(&self) -> Modulus {
        match &self.scheme {
            SplitScheme::Composite(key) => key.modulus(),
            _ => self.modulus.clone(),
        }
    }
}

/// Splits byte data chunk by chunk; every returned envelope is one share
/// index across all chunks.
pub fn split_bytes<R: RngCore + ?Sized>(
    data: &[u8],
    plan: &SplitPlan,
    rng: &mut R,
) -> Result<(GroupId, Vec<ShareEnvelope>), PipelineError> {
    let payload = codec::chunk_bytes(data, &plan.working_modulus())?;
    let chunks: Vec<FieldElement> = payload.chunks().iter().map(|d| d.element().clone()).collect();
    split_elements(&chunks, payload.original_length(), plan, rng)
}

/// Splits one raw residue, for demos with small primes where no byte fits.
pub fn split_datum<R: RngCore + ?Sized>(
    datum: &BigUint,
    plan: &SplitPlan,
    rng: &mut R,
) -> Result<(GroupId, Vec<ShareEnvelope>), PipelineError> {
    let modulus = plan.working_modulus();
    let element = modulus.element(datum.clone()).map_err(CodecError::from)?;
    Datum::new(element.clone())?;
    split_elements(&[element], 0, plan, rng)
}

fn split_elements<R: RngCore + ?Sized>(
    chunks: &[FieldElement],
    original_length: u64,
    plan: &SplitPlan,
    rng: &mut R,
) -> Result<(GroupId, Vec<ShareEnvelope>), PipelineError> {
    let k = plan.k;
    let group = GroupId::random(rng);
    if let SplitScheme::Composite(key) = &plan.scheme {
        // per share index, one value per chunk
        let mut columns: Vec<Vec<_>> = vec![Vec::with_capacity(chunks.len()); k];
        for chunk in chunks {
            let shares = composite::split_composite_in_group(chunk.value(), k, key, group, rng)?;
            for (col, share) in columns.iter_mut().zip(shares) {
                col.push(share);
            }
        }
        return Ok((
            group,
            envelopes(
                k,
                chunks.is_empty(),
                group,
                Scheme::Composite,
                &plan.working_modulus(),
                |i| ShareEnvelope::from_composite_shares(&columns[i], original_length),
            )?,
        ));
    }

    let modulus = plan.working_modulus();
    partition::check_k(k, &modulus)?;
    let roots_per_chunk = chunks
        .iter()
        .map(|c| partition::split_k_in_group(&Datum::new(c.clone())?, k, group, rng))
        .collect::<Result<Vec<_>, _>>()?;

    match &plan.scheme {
        SplitScheme::RootK => {
            let columns: Vec<Vec<_>> = (0..k)
                .map(|i| roots_per_chunk.iter().map(|roots| roots[i].clone()).collect())
                .collect();
            let envs = envelopes(k, chunks.is_empty(), group, Scheme::RootK, &modulus, |i| {
                ShareEnvelope::from_root_shares(&columns[i], original_length)
            })?;
            Ok((group, envs))
        }
        SplitScheme::Redundant { n, mode } => {
            let n = usize::from(*n);
            if n < k {
                return Err(PipelineError::BadShareCount);
            }
            let matrix = redundancy::make_expansion_matrix(n, k, *mode, &modulus, rng)?;
            let expanded = roots_per_chunk
                .iter()
                .map(|roots| redundancy::expand(roots, &matrix))
                .collect::<Result<Vec<_>, _>>()?;
            let columns: Vec<Vec<_>> = (0..n)
                .map(|i| expanded.iter().map(|shares| shares[i].clone()).collect())
                .collect();
            if chunks.is_empty() {
                let envs = (0..n)
                    .map(|i| empty_envelope(Scheme::Redundant, &modulus, k, n, group, i))
                    .collect();
                return Ok((group, envs));
            }
            let envs = columns
                .iter()
                .map(|col| ShareEnvelope::from_redundant_shares(n as u16, col, original_length))
                .collect::<Result<Vec<_>, _>>()?;
            Ok((group, envs))
        }
        SplitScheme::Composite(_) => unreachable!("handled above"),
    }
}

fn envelopes<F>(
    k: usize,
    empty: bool,
    group: GroupId,
    scheme: Scheme,
    modulus: &Modulus,
    mut build: F,
) -> Result<Vec<ShareEnvelope>, CodecError>
where
    F: FnMut(usize) -> Result<ShareEnvelope, CodecError>,
{
    (0..k)
        .map(|i| {
            if empty {
                Ok(empty_envelope(scheme, modulus, k, 0, group, i))
            } else {
                build(i)
            }
        })
        .collect()
}

/// Share file for zero-length data: header only, no chunks.
fn empty_envelope(scheme: Scheme, modulus: &Modulus, k: usize, n: usize, group: GroupId, i: usize) -> ShareEnvelope {
    ShareEnvelope {
        scheme,
        modulus: modulus.value().clone(),
        k: k as u16,
        n: n as u16,
        group_id: group,
        share_index: i as u16 + 1,
        original_length: 0,
        payload: match scheme {
            Scheme::Redundant => codec::SharePayload::Rows(Vec::new()),
            _ => codec::SharePayload::Values(Vec::new()),
        },
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum JoinOutput {
    Data(Vec<u8>),
    /// A single residue split with [`split_datum`].
    Datum(BigUint),
    /// Composite shares joined without the key: c = d^y mod n per chunk.
    Ciphertext(Vec<BigUint>),
}

/// Header summary shared by a compatible set of envelopes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupHeader {
    pub scheme: Scheme,
    pub group_id: GroupId,
    pub k: usize,
    pub n: usize,
    pub distinct_shares: usize,
}

/// Checks the envelopes belong together and drops exact duplicates.
pub fn inspect(envelopes: &[ShareEnvelope]) -> Result<(GroupHeader, Vec<ShareEnvelope>), PipelineError> {
    let first = envelopes.first().ok_or(PipelineError::NoShares)?;
    let mut by_index: BTreeMap<u16, &ShareEnvelope> = BTreeMap::new();
    for env in envelopes {
        let field = if env.scheme != first.scheme {
            Some("scheme")
        } else if env.group_id != first.group_id {
            Some("group")
        } else if env.modulus != first.modulus {
            Some("modulus")
        } else if env.k != first.k || env.n != first.n {
            Some("k/n")
        } else if env.original_length != first.original_length || env.chunk_count() != first.chunk_count() {
            Some("length")
        } else {
            None
        };
        if let Some(field) = field {
            return Err(PipelineError::Incompatible(field));
        }
        if let Some(prev) = by_index.insert(env.share_index, env) {
            if prev != env {
                return Err(PipelineError::ConflictingIndex(env.share_index));
            }
        }
    }
    let header = GroupHeader {
        scheme: first.scheme,
        group_id: first.group_id,
        k: first.k.into(),
        n: first.n.into(),
        distinct_shares: by_index.len(),
    };
    Ok((header, by_index.into_values().cloned().collect()))
}

/// Reassembles the data. The scheme comes from the envelope headers.
pub fn join_envelopes(envelopes: &[ShareEnvelope], key: Option<&CompositeKey>) -> Result<JoinOutput, PipelineError> {
    let (header, unique) = inspect(envelopes)?;
    let first = &unique[0];
    let needed = header.k;
    if unique.len() < needed || (header.scheme != Scheme::Redundant && unique.len() != needed) {
        return Err(PipelineError::Unrecoverable {
            available: unique.len(),
            needed,
        });
    }
    let modulus = first.modulus()?;
    let chunk_count = first.chunk_count();

    let chunks: Vec<FieldElement> = match header.scheme {
        Scheme::RootK => {
            let per_share = unique
                .iter()
                .map(|e| e.to_root_shares(&modulus))
                .collect::<Result<Vec<_>, _>>()?;
            (0..chunk_count)
                .map(|c| {
                    let shares: Vec<_> = per_share.iter().map(|s| s[c].clone()).collect();
                    Ok(partition::combine_k(&shares)?.into_element())
                })
                .collect::<Result<_, PipelineError>>()?
        }
        Scheme::Redundant => {
            let per_share = unique
                .iter()
                .map(|e| e.to_redundant_shares(&modulus))
                .collect::<Result<Vec<_>, _>>()?;
            (0..chunk_count)
                .map(|c| {
                    let shares: Vec<_> = per_share.iter().map(|s| s[c].clone()).collect();
                    let roots = redundancy::reconstruct_from_available(&shares)?;
                    Ok(partition::combine_k(&roots)?.into_element())
                })
                .collect::<Result<_, PipelineError>>()?
        }
        Scheme::Composite => {
            let per_share = unique
                .iter()
                .map(|e| e.to_composite_shares(&modulus))
                .collect::<Result<Vec<_>, _>>()?;
            let ciphertexts = (0..chunk_count)
                .map(|c| {
                    let shares: Vec<_> = per_share.iter().map(|s| s[c].clone()).collect();
                    composite::combine_to_ciphertext(&shares)
                })
                .collect::<Result<Vec<_>, _>>()?;
            let Some(key) = key else {
                return Ok(JoinOutput::Ciphertext(
                    ciphertexts.into_iter().map(FieldElement::into_value).collect(),
                ));
            };
            if !key.matches(&modulus) {
                return Err(CompositeError::KeyMismatch.into());
            }
            ciphertexts
                .iter()
                .map(|c| modulus.reduce(&composite::decrypt(c, key)))
                .collect()
        }
    };

    if first.is_raw_datum() {
        return Ok(JoinOutput::Datum(chunks[0].value().clone()));
    }
    let data = chunks
        .into_iter()
        .map(|c| Datum::new(c).map_err(PipelineError::from))
        .collect::<Result<Vec<_>, _>>()?;
    let payload = ChunkedPayload::new(data, first.original_length, modulus)?;
    Ok(JoinOutput::Data(codec::unchunk(&payload)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    const DATA: &[u8] = b"soil moisture 31%, station 7, 2024-05-01T06:00Z; \
                          enough text to span several 31-byte chunks of the default prime";

    fn rng() -> ChaCha20Rng {
        ChaCha20Rng::seed_from_u64(2024)
    }

    #[test]
    fn root_k_round_trip() {
        let mut rng = rng();
        let (_, envs) = split_bytes(DATA, &SplitPlan::new(4, SplitScheme::RootK), &mut rng).unwrap();
        assert_eq!(envs.len(), 4);
        assert_eq!(join_envelopes(&envs, None).unwrap(), JoinOutput::Data(DATA.to_vec()));
        assert_eq!(
            join_envelopes(&envs[1..], None),
            Err(PipelineError::Unrecoverable {
                available: 3,
                needed: 4
            })
        );
    }

    #[test]
    fn redundant_any_k() {
        let mut rng = rng();
        let plan = SplitPlan::new(
            3,
            SplitScheme::Redundant {
                n: 5,
                mode: ExpansionMode::Structured,
            },
        );
        let (_, envs) = split_bytes(DATA, &plan, &mut rng).unwrap();
        assert_eq!(envs.len(), 5);
        for skip in 0..5 {
            for skip2 in skip + 1..5 {
                let subset: Vec<_> = envs
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| *i != skip && *i != skip2)
                    .map(|(_, e)| e.clone())
                    .collect();
                assert_eq!(join_envelopes(&subset, None).unwrap(), JoinOutput::Data(DATA.to_vec()));
            }
        }
        assert_eq!(
            join_envelopes(&envs[..2], None),
            Err(PipelineError::Unrecoverable {
                available: 2,
                needed: 3
            })
        );
        // duplicates do not count twice
        let dup = vec![envs[0].clone(), envs[0].clone(), envs[1].clone()];
        assert_eq!(
            join_envelopes(&dup, None),
            Err(PipelineError::Unrecoverable {
                available: 2,
                needed: 3
            })
        );
    }

    #[test]
    fn composite_with_and_without_key() {
        let mut rng = rng();
        let key = composite::keygen(64, &BigUint::from(65537u32), &mut rng).unwrap();
        let plan = SplitPlan::new(3, SplitScheme::Composite(key.clone()));
        let (_, envs) = split_bytes(DATA, &plan, &mut rng).unwrap();
        assert_eq!(
            join_envelopes(&envs, Some(&key)).unwrap(),
            JoinOutput::Data(DATA.to_vec())
        );
        match join_envelopes(&envs, None).unwrap() {
            JoinOutput::Ciphertext(cs) => assert_eq!(cs.len(), envs[0].chunk_count()),
            other => panic!("expected ciphertext, got {other:?}"),
        }
        let other = composite::keygen(64, &BigUint::from(65537u32), &mut rng).unwrap();
        assert_eq!(
            join_envelopes(&envs, Some(&other)),
            Err(PipelineError::Composite(CompositeError::KeyMismatch))
        );
    }

    #[test]
    fn raw_datum_demo() {
        let mut rng = rng();
        let plan = SplitPlan::new(3, SplitScheme::RootK).with_modulus(Modulus::prime_u64(31).unwrap());
        let (_, envs) = split_datum(&BigUint::from(10u32), &plan, &mut rng).unwrap();
        assert!(envs.iter().all(ShareEnvelope::is_raw_datum));
        assert_eq!(join_envelopes(&envs, None).unwrap(), JoinOutput::Datum(10u32.into()));
        assert!(split_datum(&BigUint::from(0u32), &plan, &mut rng).is_err());
        assert!(split_datum(&BigUint::from(31u32), &plan, &mut rng).is_err());
    }

    #[test]
    fn empty_data() {
        let mut rng = rng();
        for scheme in [
            SplitScheme::RootK,
            SplitScheme::Redundant {
                n: 4,
                mode: ExpansionMode::Random,
            },
        ] {
            let (_, envs) = split_bytes(b"", &SplitPlan::new(2, scheme), &mut rng).unwrap();
            assert_eq!(join_envelopes(&envs, None).unwrap(), JoinOutput::Data(Vec::new()));
        }
    }

    #[test]
    fn mixing_groups_rejected() {
        let mut rng = rng();
        let plan = SplitPlan::new(2, SplitScheme::RootK);
        let (_, a) = split_bytes(b"a", &plan, &mut rng).unwrap();
        let (_, b) = split_bytes(b"a", &plan, &mut rng).unwrap();
        assert_eq!(
            join_envelopes(&[a[0].clone(), b[1].clone()], None),
            Err(PipelineError::Incompatible("group"))
        );
    }
}
