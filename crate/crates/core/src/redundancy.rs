//! Lifting k root shares to n redundant shares, any k of which rebuild the roots.
//!
//! Share i holds a coefficient row (a_{i1}..a_{ik}) and the combination
//! cᵢ = Σⱼ a_{ij}·rⱼ mod p. Gathering k shares gives a k×k system that is
//! solved by Gaussian elimination.
//!
//! Structured matrices use the rows (1, i, i², …, i^{k−1}) for share index i,
//! so every k-subset is a Vandermonde system on distinct points and is always
//! invertible. Random matrices draw every entry uniformly; a k-subset of them
//! can be singular.

use std::collections::HashSet;

use num_bigint::BigUint;
use rand::RngCore;
use thiserror::Error;

use crate::field::{FieldElement, FieldError, Modulus};
use crate::partition::{check_k, GroupId, PartitionError, RootShare};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RedundancyError {
    #[error("structured rows need n < p (n = {n})")]
    TooManyRows { n: usize },
    #[error("need n >= k >= 2 (n = {n}, k = {k})")]
    BadShape { n: usize, k: usize },
    #[error("matrix has {cols} columns but there are {roots} roots")]
    DimensionMismatch { cols: usize, roots: usize },
    #[error("the chosen rows are linearly dependent")]
    SingularSubset,
    #[error("expected exactly {expected} shares, got {got}")]
    WrongShareCount { expected: usize, got: usize },
    #[error("only {available} shares available, {needed} needed")]
    NotEnoughShares { available: usize, needed: usize },
    #[error("shares belong to different groups or moduli")]
    MixedGroups,
    #[error("row index {0} appears more than once")]
    DuplicateRow(u16),
    #[error("row index must be at least 1")]
    ZeroRowIndex,
    #[error("coefficient row is all zero")]
    ZeroRow,
    #[error("shares are inconsistent: a reconstructed root is zero")]
    Inconsistent,
    #[error(transparent)]
    Partition(#[from] PartitionError),
    #[error(transparent)]
    Field(#[from] FieldError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ExpansionMode {
    #[default]
    Structured,
    Random,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExpansionMatrix {
    rows: Vec<Vec<FieldElement>>,
    mode: ExpansionMode,
}

impl ExpansionMatrix {
    pub fn rows(&self) -> &[Vec<FieldElement>] {
        &self.rows
    }

    pub fn n(&self) -> usize {
        self.rows.len()
    }

    pub fn k(&self) -> usize {
        self.rows.first().map_or(0, Vec::len)
    }

    pub fn mode(&self) -> ExpansionMode {
        self.mode
    }

    /// Identity matrix; its shares carry the roots unchanged.
    pub fn identity(modulus: &Modulus, k: usize) -> Self {
        let rows = (0..k)
            .map(|i| {
                (0..k)
                    .map(|j| if i == j { modulus.one() } else { modulus.zero() })
                    .collect()
            })
            .collect();
        ExpansionMatrix {
            rows,
            mode: ExpansionMode::Random,
        }
    }

    /// Wraps caller-supplied rows, e.g. for tests with hand-picked entries.
    pub fn from_rows(rows: Vec<Vec<FieldElement>>) -> Result<Self, RedundancyError> {
        let k = rows.first().map_or(0, Vec::len);
        if k < 2 || rows.len() < k {
            return Err(RedundancyError::BadShape { n: rows.len(), k });
        }
        if rows.iter().any(|r| r.len() != k) {
            return Err(RedundancyError::DimensionMismatch { cols: k, roots: k });
        }
        if rows.iter().any(|r| r.iter().all(FieldElement::is_zero)) {
            return Err(RedundancyError::ZeroRow);
        }
        Ok(ExpansionMatrix {
            rows,
            mode: ExpansionMode::Random,
        })
    }
}

/// A redundant share {a_{i1}..a_{ik}, cᵢ}. It carries its own row, so no
/// shared matrix is needed to reconstruct.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RedundantShare {
    group_id: GroupId,
    row_index: u16,
    coeff_row: Vec<FieldElement>,
    combined: FieldElement,
}

impl RedundantShare {
    pub fn new(
        group_id: GroupId,
        row_index: u16,
        coeff_row: Vec<FieldElement>,
        combined: FieldElement,
    ) -> Result<Self, RedundancyError> {
        if row_index == 0 {
            return Err(RedundancyError::ZeroRowIndex);
        }
        if coeff_row.len() < 2 {
            return Err(RedundancyError::BadShape {
                n: 1,
                k: coeff_row.len(),
            });
        }
        if coeff_row.iter().all(FieldElement::is_zero) {
            return Err(RedundancyError::ZeroRow);
        }
        if coeff_row.iter().any(|a| a.modulus() != combined.modulus()) {
            return Err(FieldError::ModulusMismatch.into());
        }
        Ok(RedundantShare {
            group_id,
            row_index,
            coeff_row,
            combined,
        })
    }

    pub fn group_id(&self) -> GroupId {
        self.group_id
    }

    pub fn row_index(&self) -> u16 {
        self.row_index
    }

    pub fn k(&self) -> usize {
        self.coeff_row.len()
    }

    pub fn coeff_row(&self) -> &[FieldElement] {
        &self.coeff_row
    }

    pub fn combined(&self) -> &FieldElement {
        &self.combined
    }

    pub fn modulus(&self) -> &Modulus {
        self.combined.modulus()
    }
}

/// (1, b, b², …, b^{k−1}) with b = row_index.
pub fn structured_row(modulus: &Modulus, row_index: u16, k: usize) -> Vec<FieldElement> {
    let point = modulus.element_u64(row_index.into());
    let mut row = Vec::with_capacity(k);
    let mut acc = modulus.one();
    for _ in 0..k {
        row.push(acc.clone());
        acc = acc.checked_mul(&point).expect("same modulus");
    }
    row
}

fn random_row<R: RngCore + ?Sized>(modulus: &Modulus, k: usize, rng: &mut R) -> Vec<FieldElement> {
    loop {
        let row: Vec<_> = (0..k).map(|_| modulus.sample(rng)).collect();
        if row.iter().any(|a| !a.is_zero()) {
            return row;
        }
    }
}

pub fn make_expansion_matrix<R: RngCore + ?Sized>(
    n: usize,
    k: usize,
    mode: ExpansionMode,
    modulus: &Modulus,
    rng: &mut R,
) -> Result<ExpansionMatrix, RedundancyError> {
    if k < 2 || n < k || n > usize::from(u16::MAX) {
        return Err(RedundancyError::BadShape { n, k });
    }
    match mode {
        ExpansionMode::Structured => {
            if &BigUint::from(n) >= modulus.value() {
                return Err(RedundancyError::TooManyRows { n });
            }
            let rows = (1..=n as u16).map(|i| structured_row(modulus, i, k)).collect();
            Ok(ExpansionMatrix { rows, mode })
        }
        ExpansionMode::Random => loop {
            // Redraw until the n equations have full column rank k.
            let rows: Vec<_> = (0..n).map(|_| random_row(modulus, k, rng)).collect();
            if rank(&rows)? == k {
                return Ok(ExpansionMatrix { rows, mode });
            }
        },
    }
}

/// cᵢ = Σⱼ a_{ij}·rⱼ for every row of the matrix.
pub fn expand(roots: &[RootShare], matrix: &ExpansionMatrix) -> Result<Vec<RedundantShare>, RedundancyError> {
    if roots.len() != matrix.k() {
        return Err(RedundancyError::DimensionMismatch {
            cols: matrix.k(),
            roots: roots.len(),
        });
    }
    let group = roots[0].group_id();
    matrix
        .rows
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let combined = dot(row, roots)?;
            RedundantShare::new(group, i as u16 + 1, row.clone(), combined)
        })
        .collect()
}

fn dot(row: &[FieldElement], roots: &[RootShare]) -> Result<FieldElement, FieldError> {
    let mut acc = roots[0].modulus().zero();
    for (a, r) in row.iter().zip(roots) {
        acc = acc.checked_add(&a.checked_mul(r.value())?)?;
    }
    Ok(acc)
}

/// Creates one more share for an existing split without touching the others.
pub fn add_share<R: RngCore + ?Sized>(
    roots: &[RootShare],
    row_index: u16,
    mode: ExpansionMode,
    rng: &mut R,
) -> Result<RedundantShare, RedundancyError> {
    let Some(first) = roots.first() else {
        return Err(RedundancyError::BadShape { n: 1, k: 0 });
    };
    let modulus = first.modulus();
    let k = roots.len();
    check_k(k, modulus)?;
    let row = match mode {
        ExpansionMode::Structured => {
            if &BigUint::from(row_index) >= modulus.value() {
                return Err(RedundancyError::TooManyRows { n: row_index.into() });
            }
            structured_row(modulus, row_index, k)
        }
        ExpansionMode::Random => random_row(modulus, k, rng),
    };
    let combined = dot(&row, roots)?;
    RedundantShare::new(first.group_id(), row_index, row, combined)
}

/// Solves the k×k system formed by exactly k shares and returns the roots in
/// column order.
pub fn reconstruct_roots(shares: &[RedundantShare]) -> Result<Vec<RootShare>, RedundancyError> {
    let Some(first) = shares.first() else {
        return Err(RedundancyError::WrongShareCount { expected: 2, got: 0 });
    };
    let k = first.k();
    if shares.len() != k {
        return Err(RedundancyError::WrongShareCount {
            expected: k,
            got: shares.len(),
        });
    }
    check_compatible(shares)?;

    let matrix: Vec<Vec<FieldElement>> = shares.iter().map(|s| s.coeff_row.clone()).collect();
    let rhs: Vec<FieldElement> = shares.iter().map(|s| s.combined.clone()).collect();
    let solution = solve(matrix, rhs)?.ok_or(RedundancyError::SingularSubset)?;

    let k16 = k as u16;
    solution
        .into_iter()
        .enumerate()
        .map(|(j, value)| {
            if value.is_zero() {
                return Err(RedundancyError::Inconsistent);
            }
            Ok(RootShare::new(first.group_id, j as u16 + 1, k16, value)?)
        })
        .collect()
}

/// Tries k-subsets of the available shares in lexicographic order until one
/// is invertible.
pub fn reconstruct_from_available(shares: &[RedundantShare]) -> Result<Vec<RootShare>, RedundancyError> {
    let Some(first) = shares.first() else {
        return Err(RedundancyError::NotEnoughShares {
            available: 0,
            needed: 2,
        });
    };
    let k = first.k();
    check_compatible(shares)?;
    if shares.len() < k {
        return Err(RedundancyError::NotEnoughShares {
            available: shares.len(),
            needed: k,
        });
    }
    let mut picks: Vec<usize> = (0..k).collect();
    loop {
        let subset: Vec<_> = picks.iter().map(|&i| shares[i].clone()).collect();
        match reconstruct_roots(&subset) {
            Err(RedundancyError::SingularSubset) => {}
            other => return other,
        }
        // next combination
        let mut i = k;
        loop {
            if i == 0 {
                return Err(RedundancyError::SingularSubset);
            }
            i -= 1;
            if picks[i] < shares.len() - k + i {
                break;
            }
        }
        picks[i] += 1;
        for j in i + 1..k {
            picks[j] = picks[j - 1] + 1;
        }
    }
}

fn check_compatible(shares: &[RedundantShare]) -> Result<(), RedundancyError> {
    let first = &shares[0];
    let mut seen = HashSet::new();
    for s in shares {
        if s.group_id != first.group_id || s.k() != first.k() || s.modulus() != first.modulus() {
            return Err(RedundancyError::MixedGroups);
        }
        if !seen.insert(s.row_index) {
            return Err(RedundancyError::DuplicateRow(s.row_index));
        }
    }
    Ok(())
}

/// Row-echelon matrix, transformed right-hand side, rank.
type Echelon = (Vec<Vec<FieldElement>>, Vec<FieldElement>, usize);

/// Forward elimination on the first nonzero pivot of each column.
fn eliminate(mut m: Vec<Vec<FieldElement>>, mut rhs: Vec<FieldElement>) -> Result<Echelon, FieldError> {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..cols {
        let Some(pivot) = (rank..rows).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(rank, pivot);
        rhs.swap(rank, pivot);
        let pivot_inv = m[rank][col].inverse()?;
        for r in rank + 1..rows {
            if m[r][col].is_zero() {
                continue;
            }
            let factor = m[r][col].checked_mul(&pivot_inv)?;
            let (upper, lower) = m.split_at_mut(r);
            for (target, source) in lower[0][col..].iter_mut().zip(&upper[rank][col..]) {
                *target = target.checked_sub(&factor.checked_mul(source)?)?;
            }
            let delta = factor.checked_mul(&rhs[rank])?;
            rhs[r] = rhs[r].checked_sub(&delta)?;
        }
        rank += 1;
    }
    Ok((m, rhs, rank))
}

fn rank(rows: &[Vec<FieldElement>]) -> Result<usize, FieldError> {
    let modulus = rows[0][0].modulus();
    let rhs = vec![modulus.zero(); rows.len()];
    Ok(eliminate(rows.to_vec(), rhs)?.2)
}

/// Solves a square system mod p; `None` when the matrix is singular.
fn solve(m: Vec<Vec<FieldElement>>, rhs: Vec<FieldElement>) -> Result<Option<Vec<FieldElement>>, FieldError> {
    let k = m.len();
    let (m, rhs, rank) = eliminate(m, rhs)?;
    if rank < k {
        return Ok(None);
    }
    let mut x: Vec<FieldElement> = vec![rhs[0].modulus().zero(); k];
    for i in (0..k).rev() {
        let mut acc = rhs[i].clone();
        for j in i + 1..k {
            acc = acc.checked_sub(&m[i][j].checked_mul(&x[j])?)?;
        }
        x[i] = acc.checked_mul(&m[i][i].inverse()?)?;
    }
    Ok(Some(x))
}
