//! Byte data to residues and back, plus the on-disk share and key formats.

mod chunk;
mod envelope;

pub use chunk::{chunk_bytes, chunk_width, unchunk, ChunkedPayload};
pub use envelope::{
    decode_share_file, encode_share_file, RowValue, Scheme, ShareEnvelope, SharePayload, FORMAT_VERSION, KEY_MAGIC,
    SHARE_MAGIC,
};

use thiserror::Error;

use crate::composite::{CompositeError, CompositeKey};
use crate::field::FieldError;
use crate::partition::PartitionError;
use crate::redundancy::RedundancyError;
use envelope::{put_int, Reader};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CodecError {
    #[error("not a share file (bad magic)")]
    BadMagic,
    #[error("unsupported format version {0}")]
    BadVersion(u8),
    #[error("file is truncated")]
    TruncatedFile,
    #[error("field `{0}` is out of range")]
    FieldOutOfRange(&'static str),
    #[error("{0} unexpected bytes after the payload")]
    TrailingBytes(usize),
    #[error("modulus too small to hold a single byte per chunk (need p > 256)")]
    ModulusTooSmall,
    #[error("chunk value outside the offset-encoded range")]
    ChunkOutOfRange,
    #[error("shares in one envelope must agree on group, index, k and modulus")]
    MixedShares,
    #[error("envelope holds a {} share", .0.name())]
    WrongScheme(Scheme),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Partition(#[from] PartitionError),
    #[error(transparent)]
    Redundancy(#[from] RedundancyError),
    #[error(transparent)]
    Composite(#[from] CompositeError),
}

/// Key file: "RSK1", version, then p, q, n, y, y⁻¹, λ(n) as length-prefixed
/// integers. The derived fields are recomputed and checked on load.
pub fn encode_key_file(key: &CompositeKey) -> Vec<u8> {
    let mut out = KEY_MAGIC.to_vec();
    out.push(FORMAT_VERSION);
    for v in [key.p(), key.q(), key.n(), key.y(), key.y_inv(), key.lambda_n()] {
        put_int(&mut out, v);
    }
    out
}

pub fn decode_key_file(bytes: &[u8]) -> Result<CompositeKey, CodecError> {
    let mut r = Reader::new(bytes);
    if r.take(4)? != KEY_MAGIC {
        return Err(CodecError::BadMagic);
    }
    let version = r.u8()?;
    if version != FORMAT_VERSION {
        return Err(CodecError::BadVersion(version));
    }
    let p = r.int("p")?;
    let q = r.int("q")?;
    let n = r.int("n")?;
    let y = r.int("y")?;
    let y_inv = r.int("y_inv")?;
    let lambda_n = r.int("lambda_n")?;
    r.finish()?;
    let key = CompositeKey::from_primes(p, q, y)?;
    if key.n() != &n || key.y_inv() != &y_inv || key.lambda_n() != &lambda_n {
        return Err(CompositeError::CorruptKey.into());
    }
    Ok(key)
}
