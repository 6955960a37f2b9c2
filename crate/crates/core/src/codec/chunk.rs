use num_bigint::BigUint;
use num_traits::One;

use super::CodecError;
use crate::field::Modulus;
use crate::partition::Datum;

/// Bytes per chunk: the largest m with 2^{8m} < modulus, so every offset
/// value in [1, 2^{8m}] is a nonzero residue.
pub fn chunk_width(modulus: &Modulus) -> usize {
    let bits = (modulus.value() - BigUint::one()).bits();
    ((bits - 1) / 8) as usize
}

/// Data as a sequence of nonzero residues, one per m-byte group.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChunkedPayload {
    chunks: Vec<Datum>,
    original_length: u64,
    chunk_bytes: usize,
    modulus: Modulus,
}

impl ChunkedPayload {
    /// Reassembles a payload from recovered chunks, checking the chunk count
    /// against the recorded byte length.
    pub fn new(chunks: Vec<Datum>, original_length: u64, modulus: Modulus) -> Result<Self, CodecError> {
        let chunk_bytes = chunk_width(&modulus);
        if chunk_bytes == 0 {
            return Err(CodecError::ModulusTooSmall);
        }
        if chunks.len() as u64 != original_length.div_ceil(chunk_bytes as u64) {
            return Err(CodecError::FieldOutOfRange("chunk_count"));
        }
        if chunks.iter().any(|c| c.element().modulus() != &modulus) {
            return Err(CodecError::FieldOutOfRange("chunk modulus"));
        }
        Ok(ChunkedPayload {
            chunks,
            original_length,
            chunk_bytes,
            modulus,
        })
    }

    pub fn chunks(&self) -> &[Datum] {
        &self.chunks
    }

    pub fn original_length(&self) -> u64 {
        self.original_length
    }

    pub fn chunk_bytes(&self) -> usize {
        self.chunk_bytes
    }

    pub fn modulus(&self) -> &Modulus {
        &self.modulus
    }
}

/// Splits data into big-endian m-byte groups, zero-padding the last one, and
/// maps each group value v to the datum v + 1.
pub fn chunk_bytes(data: &[u8], modulus: &Modulus) -> Result<ChunkedPayload, CodecError> {
    let m = chunk_width(modulus);
    if m == 0 {
        return Err(CodecError::ModulusTooSmall);
    }
    let chunks = data
        .chunks(m)
        .map(|group| {
            let mut padded = group.to_vec();
            padded.resize(m, 0);
            let v = BigUint::from_bytes_be(&padded) + BigUint::one();
            Datum::new(modulus.element(v)?).map_err(CodecError::from)
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(ChunkedPayload {
        chunks,
        original_length: data.len() as u64,
        chunk_bytes: m,
        modulus: modulus.clone(),
    })
}

pub fn unchunk(payload: &ChunkedPayload) -> Result<Vec<u8>, CodecError> {
    let m = payload.chunk_bytes;
    let max = BigUint::one() << (8 * m);
    let mut out = Vec::with_capacity(payload.chunks.len() * m);
    for chunk in &payload.chunks {
        let v = chunk.value();
        if v > &max || v == &BigUint::ZERO {
            return Err(CodecError::ChunkOutOfRange);
        }
        let bytes = (v - BigUint::one()).to_bytes_be();
        let group: &[u8] = if bytes == [0] { &[] } else { &bytes };
        out.resize(out.len() + m - group.len(), 0);
        out.extend_from_slice(group);
    }
    out.truncate(payload.original_length as usize);
    Ok(out)
}
