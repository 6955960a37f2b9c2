//! Share file layout (all integers big-endian):
//!
//! ```text
//! magic            4   "RSH1"
//! version          1   0x01
//! scheme           1   1 = root_k, 2 = redundant, 3 = composite
//! modulus          4 + L
//! k                2
//! n                2   0 unless scheme = redundant
//! group_id         16
//! share_index      2
//! chunk_count      4
//! original_length  8
//! payload              chunk_count × value          (root_k, composite)
//!                      chunk_count × (k × a, c)     (redundant)
//! ```
//!
//! Every big integer is a 4-byte length L followed by L bytes of minimal
//! big-endian magnitude; zero is L = 0. A file with `original_length` 0 and a
//! single chunk carries one raw residue rather than byte data.

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::{chunk_width, CodecError};
use crate::composite::CompositeShare;
use crate::field::Modulus;
use crate::partition::{GroupId, RootShare};
use crate::redundancy::RedundantShare;

pub const SHARE_MAGIC: [u8; 4] = *b"RSH1";
pub const KEY_MAGIC: [u8; 4] = *b"RSK1";
pub const FORMAT_VERSION: u8 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheme {
    RootK = 1,
    Redundant = 2,
    Composite = 3,
}

impl Scheme {
    fn from_byte(b: u8) -> Option<Self> {
        match b {
            1 => Some(Scheme::RootK),
            2 => Some(Scheme::Redundant),
            3 => Some(Scheme::Composite),
            _ => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Scheme::RootK => "root_k",
            Scheme::Redundant => "redundant",
            Scheme::Composite => "composite",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RowValue {
    pub row: Vec<BigUint>,
    pub combined: BigUint,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SharePayload {
    /// One root per chunk.
    Values(Vec<BigUint>),
    /// One coefficient row and combined value per chunk.
    Rows(Vec<RowValue>),
}

impl SharePayload {
    pub fn chunk_count(&self) -> usize {
        match self {
            SharePayload::Values(v) => v.len(),
            SharePayload::Rows(r) => r.len(),
        }
    }
}

/// One share file: a single share index, carrying one value per chunk.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShareEnvelope {
    pub scheme: Scheme,
    pub modulus: BigUint,
    pub k: u16,
    pub n: u16,
    pub group_id: GroupId,
    pub share_index: u16,
    pub original_length: u64,
    pub payload: SharePayload,
}

impl ShareEnvelope {
    pub fn chunk_count(&self) -> usize {
        self.payload.chunk_count()
    }

    /// True when the file carries a single raw residue instead of byte data.
    pub fn is_raw_datum(&self) -> bool {
        self.original_length == 0 && self.chunk_count() == 1
    }

    /// Packs the shares with one index across all chunks.
    pub fn from_root_shares(per_chunk: &[RootShare], original_length: u64) -> Result<Self, CodecError> {
        let first = per_chunk.first().ok_or(CodecError::FieldOutOfRange("chunk_count"))?;
        if per_chunk.iter().any(|s| {
            s.index() != first.index()
                || s.group_id() != first.group_id()
                || s.k() != first.k()
                || s.modulus() != first.modulus()
        }) {
            return Err(CodecError::MixedShares);
        }
        let env = ShareEnvelope {
            scheme: Scheme::RootK,
            modulus: first.modulus().value().clone(),
            k: first.k(),
            n: 0,
            group_id: first.group_id(),
            share_index: first.index(),
            original_length,
            payload: SharePayload::Values(per_chunk.iter().map(|s| s.value().value().clone()).collect()),
        };
        env.validate()?;
        Ok(env)
    }

    pub fn from_composite_shares(per_chunk: &[CompositeShare], original_length: u64) -> Result<Self, CodecError> {
        let first = per_chunk.first().ok_or(CodecError::FieldOutOfRange("chunk_count"))?;
        if per_chunk.iter().any(|s| {
            s.index() != first.index()
                || s.group_id() != first.group_id()
                || s.k() != first.k()
                || s.modulus() != first.modulus()
        }) {
            return Err(CodecError::MixedShares);
        }
        let env = ShareEnvelope {
            scheme: Scheme::Composite,
            modulus: first.modulus().value().clone(),
            k: first.k(),
            n: 0,
            group_id: first.group_id(),
            share_index: first.index(),
            original_length,
            payload: SharePayload::Values(per_chunk.iter().map(|s| s.value().value().clone()).collect()),
        };
        env.validate()?;
        Ok(env)
    }

    pub fn from_redundant_shares(
        n: u16,
        per_chunk: &[RedundantShare],
        original_length: u64,
    ) -> Result<Self, CodecError> {
        let first = per_chunk.first().ok_or(CodecError::FieldOutOfRange("chunk_count"))?;
        if per_chunk.iter().any(|s| {
            s.row_index() != first.row_index()
                || s.group_id() != first.group_id()
                || s.k() != first.k()
                || s.modulus() != first.modulus()
        }) {
            return Err(CodecError::MixedShares);
        }
        let rows = per_chunk
            .iter()
            .map(|s| RowValue {
                row: s.coeff_row().iter().map(|a| a.value().clone()).collect(),
                combined: s.combined().value().clone(),
            })
            .collect();
        let env = ShareEnvelope {
            scheme: Scheme::Redundant,
            modulus: first.modulus().value().clone(),
            k: u16::try_from(first.k()).map_err(|_| CodecError::FieldOutOfRange("k"))?,
            n,
            group_id: first.group_id(),
            share_index: first.row_index(),
            original_length,
            payload: SharePayload::Rows(rows),
        };
        env.validate()?;
        Ok(env)
    }

    /// Root shares, one per chunk. Checks that the modulus is prime.
    pub fn to_root_shares(&self, modulus: &Modulus) -> Result<Vec<RootShare>, CodecError> {
        self.expect(Scheme::RootK, modulus)?;
        let SharePayload::Values(values) = &self.payload else {
            return Err(CodecError::FieldOutOfRange("payload"));
        };
        values
            .iter()
            .map(|v| {
                Ok(RootShare::new(
                    self.group_id,
                    self.share_index,
                    self.k,
                    modulus.element(v.clone())?,
                )?)
            })
            .collect()
    }

    pub fn to_composite_shares(&self, modulus: &Modulus) -> Result<Vec<CompositeShare>, CodecError> {
        self.expect(Scheme::Composite, modulus)?;
        let SharePayload::Values(values) = &self.payload else {
            return Err(CodecError::FieldOutOfRange("payload"));
        };
        values
            .iter()
            .map(|v| {
                Ok(CompositeShare::new(
                    self.group_id,
                    self.share_index,
                    self.k,
                    modulus.element(v.clone())?,
                )?)
            })
            .collect()
    }

    pub fn to_redundant_shares(&self, modulus: &Modulus) -> Result<Vec<RedundantShare>, CodecError> {
        self.expect(Scheme::Redundant, modulus)?;
        let SharePayload::Rows(rows) = &self.payload else {
            return Err(CodecError::FieldOutOfRange("payload"));
        };
        rows.iter()
            .map(|r| {
                let row = r
                    .row
                    .iter()
                    .map(|a| modulus.element(a.clone()))
                    .collect::<Result<Vec<_>, _>>()?;
                Ok(RedundantShare::new(
                    self.group_id,
                    self.share_index,
                    row,
                    modulus.element(r.combined.clone())?,
                )?)
            })
            .collect()
    }

    /// The typed modulus this envelope's values live in. Prime schemes are
    /// primality-checked here.
    pub fn modulus(&self) -> Result<Modulus, CodecError> {
        Ok(match self.scheme {
            Scheme::RootK | Scheme::Redundant => Modulus::prime(self.modulus.clone())?,
            Scheme::Composite => Modulus::composite(self.modulus.clone())?,
        })
    }

    fn expect(&self, scheme: Scheme, modulus: &Modulus) -> Result<(), CodecError> {
        if self.scheme != scheme {
            return Err(CodecError::WrongScheme(self.scheme));
        }
        if modulus.value() != &self.modulus {
            return Err(CodecError::FieldOutOfRange("modulus"));
        }
        Ok(())
    }

    /// Structural checks shared by encoding and decoding.
    pub fn validate(&self) -> Result<(), CodecError> {
        let m = &self.modulus;
        if m < &BigUint::from(3u32) || m.is_even() {
            return Err(CodecError::FieldOutOfRange("modulus"));
        }
        if self.k < 2 {
            return Err(CodecError::FieldOutOfRange("k"));
        }
        match self.scheme {
            Scheme::RootK | Scheme::Composite => {
                if self.n != 0 {
                    return Err(CodecError::FieldOutOfRange("n"));
                }
                if self.share_index == 0 || self.share_index > self.k {
                    return Err(CodecError::FieldOutOfRange("share_index"));
                }
            }
            Scheme::Redundant => {
                if self.n < self.k {
                    return Err(CodecError::FieldOutOfRange("n"));
                }
                if self.share_index == 0 {
                    return Err(CodecError::FieldOutOfRange("share_index"));
                }
            }
        }

        let chunks = self.chunk_count() as u64;
        if chunks > u64::from(u32::MAX) {
            return Err(CodecError::FieldOutOfRange("chunk_count"));
        }
        if self.original_length == 0 {
            if chunks > 1 {
                return Err(CodecError::FieldOutOfRange("chunk_count"));
            }
        } else {
            let width = chunk_width(&Modulus::composite(m.clone())?) as u64;
            if width == 0 || chunks != self.original_length.div_ceil(width) {
                return Err(CodecError::FieldOutOfRange("chunk_count"));
            }
        }

        match (&self.payload, self.scheme) {
            (SharePayload::Values(values), Scheme::RootK | Scheme::Composite) => {
                if values.iter().any(|v| v.is_zero() || v >= m) {
                    return Err(CodecError::FieldOutOfRange("share value"));
                }
                if self.scheme == Scheme::Composite && values.iter().any(|v| !v.gcd(m).is_one()) {
                    return Err(CodecError::FieldOutOfRange("share value"));
                }
            }
            (SharePayload::Rows(rows), Scheme::Redundant) => {
                for r in rows {
                    if r.row.len() != usize::from(self.k) || r.row.iter().all(Zero::is_zero) {
                        return Err(CodecError::FieldOutOfRange("coefficient row"));
                    }
                    if r.row.iter().chain(std::iter::once(&r.combined)).any(|v| v >= m) {
                        return Err(CodecError::FieldOutOfRange("share value"));
                    }
                }
            }
            _ => return Err(CodecError::FieldOutOfRange("payload")),
        }
        Ok(())
    }
}

pub(crate) fn put_int(out: &mut Vec<u8>, v: &BigUint) {
    let bytes = if v.is_zero() { Vec::new() } else { v.to_bytes_be() };
    out.extend_from_slice(&(bytes.len() as u32).to_be_bytes());
    out.extend_from_slice(&bytes);
}

pub fn encode_share_file(env: &ShareEnvelope) -> Result<Vec<u8>, CodecError> {
    env.validate()?;
    let mut out = Vec::new();
    out.extend_from_slice(&SHARE_MAGIC);
    out.push(FORMAT_VERSION);
    out.push(env.scheme as u8);
    put_int(&mut out, &env.modulus);
    out.extend_from_slice(&env.k.to_be_bytes());
    out.extend_from_slice(&env.n.to_be_bytes());
    out.extend_from_slice(&env.group_id.0);
    out.extend_from_slice(&env.share_index.to_be_bytes());
    out.extend_from_slice(&(env.chunk_count() as u32).to_be_bytes());
    out.extend_from_slice(&env.original_length.to_be_bytes());
    match &env.payload {
        SharePayload::Values(values) => values.iter().for_each(|v| put_int(&mut out, v)),
        SharePayload::Rows(rows) => {
            for r in rows {
                r.row.iter().for_each(|a| put_int(&mut out, a));
                put_int(&mut out, &r.combined);
            }
        }
    }
    Ok(out)
}

pub(crate) struct Reader<'a> {
    buf: &'a [u8],
}

impl<'a> Reader<'a> {
    pub(crate) fn new(buf: &'a [u8]) -> Self {
        Reader { buf }
    }

    pub(crate) fn take(&mut self, n: usize) -> Result<&'a [u8], CodecError> {
        if self.buf.len() < n {
            return Err(CodecError::TruncatedFile);
        }
        let (head, tail) = self.buf.split_at(n);
        self.buf = tail;
        Ok(head)
    }

    fn array<const N: usize>(&mut self) -> Result<[u8; N], CodecError> {
        Ok(self.take(N)?.try_into().expect("length checked"))
    }

    pub(crate) fn u8(&mut self) -> Result<u8, CodecError> {
        Ok(self.take(1)?[0])
    }

    pub(crate) fn u16(&mut self) -> Result<u16, CodecError> {
        Ok(u16::from_be_bytes(self.array()?))
    }

    pub(crate) fn u32(&mut self) -> Result<u32, CodecError> {
        Ok(u32::from_be_bytes(self.array()?))
    }

    pub(crate) fn u64(&mut self) -> Result<u64, CodecError> {
        Ok(u64::from_be_bytes(self.array()?))
    }

    /// Length-prefixed integer; leading zero bytes are rejected so each value
    /// has exactly one encoding.
    pub(crate) fn int(&mut self, field: &'static str) -> Result<BigUint, CodecError> {
        let len = self.u32()? as usize;
        let bytes = self.take(len)?;
        if bytes.first() == Some(&0) {
            return Err(CodecError::FieldOutOfRange(field));
        }
        Ok(BigUint::from_bytes_be(bytes))
    }

    pub(crate) fn finish(self) -> Result<(), CodecError> {
        if self.buf.is_empty() {
            Ok(())
        } else {
            Err(CodecError::TrailingBytes(self.buf.len()))
        }
    }
}

pub fn decode_share_file(bytes: &[u8]) -> Result<ShareEnvelope, CodecError> {
    let mut r = Reader::new(bytes);
    if r.take(4)? != SHARE_MAGIC {
        return Err(CodecError::BadMagic);
    }
    let version = r.u8()?;
    if version != FORMAT_VERSION {
        return Err(CodecError::BadVersion(version));
    }
    let scheme = Scheme::from_byte(r.u8()?).ok_or(CodecError::FieldOutOfRange("scheme"))?;
    let modulus = r.int("modulus")?;
    let k = r.u16()?;
    let n = r.u16()?;
    let group_id = GroupId(r.array()?);
    let share_index = r.u16()?;
    let chunk_count = r.u32()? as usize;
    let original_length = r.u64()?;

    // every chunk needs at least 4 bytes, so a lying count fails fast
    if chunk_count > bytes.len() / 4 {
        return Err(CodecError::TruncatedFile);
    }
    let payload = match scheme {
        Scheme::RootK | Scheme::Composite => SharePayload::Values(
            (0..chunk_count)
                .map(|_| r.int("share value"))
                .collect::<Result<_, _>>()?,
        ),
        Scheme::Redundant => SharePayload::Rows(
            (0..chunk_count)
                .map(|_| {
                    let row = (0..k).map(|_| r.int("coefficient row")).collect::<Result<_, _>>()?;
                    let combined = r.int("share value")?;
                    Ok(RowValue { row, combined })
                })
                .collect::<Result<_, CodecError>>()?,
        ),
    };
    r.finish()?;

    let env = ShareEnvelope {
        scheme,
        modulus,
        k,
        n,
        group_id,
        share_index,
        original_length,
        payload,
    };
    env.validate()?;
    Ok(env)
}
