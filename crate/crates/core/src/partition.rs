//! k-of-k partitioning of a datum into polynomial roots.
//!
//! A datum d ∈ [1, p−1] is split into roots r₁..r_k with ∏rᵢ ≡ d (mod p).
//! The first k−1 roots are uniform on [1, p−1] and the last one is forced,
//! r_k = d·(r₁···r_{k−1})⁻¹, so any k−1 of them are independent of d.
//!
//! The monic polynomial ∏(x − rᵢ) can also be materialized as a
//! [`CoefficientSet`]. Its constant term is (−1)^k·d, so one root plus the
//! coefficients recovers d as well.

use std::collections::HashSet;
use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};
use rand::RngCore;
use thiserror::Error;

use crate::field::{FieldElement, FieldError, Modulus};

/// Attempts made by [`split_with_coefficients`] before giving up on drawing a
/// polynomial whose non-constant coefficients are not all zero.
pub const MAX_SPLIT_ATTEMPTS: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PartitionError {
    #[error("k = {k} is out of range (need 2 <= k < p)")]
    InvalidK { k: usize },
    #[error("datum must be nonzero")]
    ZeroDatum,
    #[error("root shares must be nonzero")]
    ZeroRoot,
    #[error("expected {expected} shares, got {got}")]
    WrongShareCount { expected: usize, got: usize },
    #[error("shares belong to different groups or moduli")]
    MixedGroups,
    #[error("share index {0} appears more than once")]
    DuplicateIndex(u16),
    #[error("share index {index} is outside [1, {k}]")]
    IndexOutOfRange { index: u16, k: u16 },
    #[error("all non-constant coefficients vanished")]
    AllZeroCoefficients,
    #[error("root splitting needs a prime modulus")]
    CompositeModulus,
    #[error("gave up after {0} attempts to draw a non-degenerate polynomial")]
    RetriesExhausted(usize),
    #[error("brute-force enumeration limited to primes p <= 13 and k <= 4")]
    TooLarge,
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// Opaque 16-byte identifier tying together the shares of one split.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct GroupId(pub [u8; 16]);

impl GroupId {
    pub fn random<R: RngCore + ?Sized>(rng: &mut R) -> Self {
        let mut bytes = [0u8; 16];
        rng.fill_bytes(&mut bytes);
        GroupId(bytes)
    }

    pub fn to_hex(&self) -> String {
        hex::encode(self.0)
    }

    pub fn from_hex(s: &str) -> Option<Self> {
        let bytes = hex::decode(s).ok()?;
        Some(GroupId(bytes.try_into().ok()?))
    }
}

impl fmt::Display for GroupId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex())
    }
}

impl fmt::Debug for GroupId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GroupId({})", self.to_hex())
    }
}

/// A nonzero residue to be partitioned.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Datum(FieldElement);

impl Datum {
    pub fn new(value: FieldElement) -> Result<Self, PartitionError> {
        if value.is_zero() {
            return Err(PartitionError::ZeroDatum);
        }
        Ok(Datum(value))
    }

    pub fn element(&self) -> &FieldElement {
        &self.0
    }

    pub fn value(&self) -> &BigUint {
        self.0.value()
    }

    pub fn into_element(self) -> FieldElement {
        self.0
    }
}

/// One root rᵢ of the split polynomial.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RootShare {
    group_id: GroupId,
    index: u16,
    k: u16,
    value: FieldElement,
}

impl RootShare {
    pub fn new(group_id: GroupId, index: u16, k: u16, value: FieldElement) -> Result<Self, PartitionError> {
        if k < 2 {
            return Err(PartitionError::InvalidK { k: k.into() });
        }
        if index == 0 || index > k {
            return Err(PartitionError::IndexOutOfRange { index, k });
        }
        if value.is_zero() {
            return Err(PartitionError::ZeroRoot);
        }
        Ok(RootShare {
            group_id,
            index,
            k,
            value,
        })
    }

    pub fn group_id(&self) -> GroupId {
        self.group_id
    }

    pub fn index(&self) -> u16 {
        self.index
    }

    pub fn k(&self) -> u16 {
        self.k
    }

    pub fn value(&self) -> &FieldElement {
        &self.value
    }

    pub fn modulus(&self) -> &Modulus {
        self.value.modulus()
    }
}

/// Coefficients of the monic degree-k polynomial x^k + a_{k−1}x^{k−1} + … + a₁x + a₀.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoefficientSet {
    /// `a[i - 1]` is the coefficient of x^i for i in 1..k.
    a: Vec<FieldElement>,
    constant_term: FieldElement,
}

impl CoefficientSet {
    /// Rejects the prohibited case where a₁..a_{k−1} are all zero.
    pub fn new(a: Vec<FieldElement>, constant_term: FieldElement) -> Result<Self, PartitionError> {
        if a.is_empty() {
            return Err(PartitionError::InvalidK { k: 1 });
        }
        let m = constant_term.modulus();
        if a.iter().any(|c| c.modulus() != m) {
            return Err(FieldError::ModulusMismatch.into());
        }
        if a.iter().all(FieldElement::is_zero) {
            return Err(PartitionError::AllZeroCoefficients);
        }
        Ok(CoefficientSet { a, constant_term })
    }

    pub fn k(&self) -> usize {
        self.a.len() + 1
    }

    /// Coefficient of x^i for i in 0..k; i = 0 is the constant term.
    pub fn coefficient(&self, i: usize) -> &FieldElement {
        if i == 0 {
            &self.constant_term
        } else {
            &self.a[i - 1]
        }
    }

    pub fn non_constant(&self) -> &[FieldElement] {
        &self.a
    }

    pub fn constant_term(&self) -> &FieldElement {
        &self.constant_term
    }

    pub fn modulus(&self) -> &Modulus {
        self.constant_term.modulus()
    }

    /// Value of the full polynomial at x.
    pub fn evaluate(&self, x: &FieldElement) -> Result<FieldElement, FieldError> {
        let partial = self.evaluate_without_constant(x)?;
        partial.checked_add(&self.constant_term)
    }

    /// x^k + Σ aᵢxⁱ for i in 1..k, by Horner's rule.
    fn evaluate_without_constant(&self, x: &FieldElement) -> Result<FieldElement, FieldError> {
        let mut acc = x.modulus().one();
        for c in self.a.iter().rev() {
            acc = acc.checked_mul(x)?.checked_add(c)?;
        }
        acc.checked_mul(x)
    }
}

/// Coefficients of ∏(x − rᵢ), lowest degree first, leading 1 included.
pub(crate) fn polynomial_from_roots(roots: &[FieldElement]) -> Result<Vec<FieldElement>, FieldError> {
    let m = roots[0].modulus();
    let mut poly = vec![m.one()];
    for r in roots {
        let neg_r = r.neg();
        let mut next = vec![m.zero(); poly.len() + 1];
        for (j, c) in poly.iter().enumerate() {
            next[j + 1] = next[j + 1].checked_add(c)?;
            next[j] = next[j].checked_add(&c.checked_mul(&neg_r)?)?;
        }
        poly = next;
    }
    Ok(poly)
}

pub(crate) fn coefficients_from_roots(roots: &[FieldElement]) -> Result<CoefficientSet, PartitionError> {
    if roots.len() < 2 {
        return Err(PartitionError::InvalidK { k: roots.len() });
    }
    let mut poly = polynomial_from_roots(roots)?;
    poly.pop(); // leading 1
    let constant = poly.remove(0);
    CoefficientSet::new(poly, constant)
}

/// (−1)^k · x
pub(crate) fn signed_by_degree(x: FieldElement, k: usize) -> FieldElement {
    if k.is_multiple_of(2) {
        x
    } else {
        x.neg()
    }
}

/// Evaluates a₀ = −(root^k + Σ aᵢ·rootⁱ) and returns (−1)^k·a₀.
pub(crate) fn recover_constant(root: &FieldElement, coeffs: &CoefficientSet) -> Result<FieldElement, FieldError> {
    let a0 = coeffs.evaluate_without_constant(root)?.neg();
    Ok(signed_by_degree(a0, coeffs.k()))
}

pub(crate) fn check_k(k: usize, modulus: &Modulus) -> Result<(), PartitionError> {
    if k < 2 || &BigUint::from(k) >= modulus.value() || k > usize::from(u16::MAX) {
        return Err(PartitionError::InvalidK { k });
    }
    Ok(())
}

/// Verifies a share set is complete: k shares with one group, modulus and
/// k, and indices 1..=k each appearing once.
pub(crate) fn check_share_set<'a, I>(shares: I) -> Result<(), PartitionError>
where
    I: IntoIterator<Item = (GroupId, u16, u16, &'a FieldElement)>,
{
    let shares: Vec<_> = shares.into_iter().collect();
    let Some(&(group, _, k, first)) = shares.first() else {
        return Err(PartitionError::WrongShareCount { expected: 2, got: 0 });
    };
    if k < 2 {
        return Err(PartitionError::InvalidK { k: k.into() });
    }
    if shares.len() != usize::from(k) {
        return Err(PartitionError::WrongShareCount {
            expected: k.into(),
            got: shares.len(),
        });
    }
    let mut seen = HashSet::new();
    for &(g, index, share_k, value) in &shares {
        if g != group || share_k != k || value.modulus() != first.modulus() {
            return Err(PartitionError::MixedGroups);
        }
        if index == 0 || index > k {
            return Err(PartitionError::IndexOutOfRange { index, k });
        }
        if !seen.insert(index) {
            return Err(PartitionError::DuplicateIndex(index));
        }
    }
    Ok(())
}

/// Splits `d` into `k` root shares under a fresh random group id.
///
/// The k−1 free roots are drawn uniformly from [1, p−1]. No draw is ever
/// rejected, so the free roots carry no information about `d`.
pub fn split_k<R: RngCore + ?Sized>(d: &Datum, k: usize, rng: &mut R) -> Result<Vec<RootShare>, PartitionError> {
    let modulus = d.element().modulus();
    if !modulus.is_prime() {
        return Err(PartitionError::CompositeModulus);
    }
    check_k(k, modulus)?;
    let group = GroupId::random(rng);
    split_k_in_group(d, k, group, rng)
}

/// [`split_k`] under a caller-chosen group id, for splitting many chunks of
/// one payload.
pub fn split_k_in_group<R: RngCore + ?Sized>(
    d: &Datum,
    k: usize,
    group: GroupId,
    rng: &mut R,
) -> Result<Vec<RootShare>, PartitionError> {
    let modulus = d.element().modulus();
    if !modulus.is_prime() {
        return Err(PartitionError::CompositeModulus);
    }
    check_k(k, modulus)?;
    let free: Vec<_> = (1..k).map(|_| modulus.sample_nonzero(rng)).collect();
    split_k_with_roots(d, group, &free)
}

/// Completes the split from caller-chosen free roots r₁..r_{k−1}:
/// r_k = d·(r₁···r_{k−1})⁻¹ mod p.
pub fn split_k_with_roots(
    d: &Datum,
    group: GroupId,
    free_roots: &[FieldElement],
) -> Result<Vec<RootShare>, PartitionError> {
    let modulus = d.element().modulus();
    let k = free_roots.len() + 1;
    check_k(k, modulus)?;
    let mut product = modulus.one();
    for r in free_roots {
        if r.is_zero() {
            return Err(PartitionError::ZeroRoot);
        }
        product = product.checked_mul(r)?;
    }
    let last = d.element().checked_mul(&product.inverse()?)?;
    let k16 = k as u16;
    free_roots
        .iter()
        .cloned()
        .chain(std::iter::once(last))
        .enumerate()
        .map(|(i, value)| RootShare::new(group, i as u16 + 1, k16, value))
        .collect()
}

/// Multiplies the k roots back together.
pub fn combine_k(shares: &[RootShare]) -> Result<Datum, PartitionError> {
    check_share_set(shares.iter().map(|s| (s.group_id, s.index, s.k, &s.value)))?;
    let mut product = shares[0].value.modulus().one();
    for s in shares {
        product = product.checked_mul(&s.value)?;
    }
    Datum::new(product)
}

/// Expands ∏(x − rᵢ) into its coefficients.
///
/// Fails with [`PartitionError::AllZeroCoefficients`] when a₁..a_{k−1} all
/// vanish; the caller has to split again.
pub fn expand_coefficients(roots: &[RootShare]) -> Result<CoefficientSet, PartitionError> {
    let Some(first) = roots.first() else {
        return Err(PartitionError::InvalidK { k: 0 });
    };
    if roots.iter().any(|r| r.modulus() != first.modulus()) {
        return Err(FieldError::ModulusMismatch.into());
    }
    let values: Vec<_> = roots.iter().map(|r| r.value.clone()).collect();
    coefficients_from_roots(&values)
}

/// Recovers d from any single root and the non-constant coefficients.
pub fn recover_from_root_and_coeffs(root: &RootShare, coeffs: &CoefficientSet) -> Result<Datum, PartitionError> {
    Datum::new(recover_constant(&root.value, coeffs)?)
}

/// True iff the candidate is a root of the stored polynomial.
pub fn verify_share(candidate: &RootShare, coeffs: &CoefficientSet) -> bool {
    coeffs.evaluate(&candidate.value).map(|v| v.is_zero()).unwrap_or(false)
}

/// Splits and expands in one go, redrawing the free roots whenever the
/// expansion lands on the prohibited all-zero coefficients.
///
/// Unlike [`split_k`], the redraw conditions the roots on the polynomial
/// being non-degenerate, which depends on d.
pub fn split_with_coefficients<R: RngCore + ?Sized>(
    d: &Datum,
    k: usize,
    rng: &mut R,
) -> Result<(Vec<RootShare>, CoefficientSet), PartitionError> {
    for _ in 0..MAX_SPLIT_ATTEMPTS {
        let roots = split_k(d, k, rng)?;
        match expand_coefficients(&roots) {
            Ok(coeffs) => return Ok((roots, coeffs)),
            Err(PartitionError::AllZeroCoefficients) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(PartitionError::RetriesExhausted(MAX_SPLIT_ATTEMPTS))
}

/// Size of the coefficient search space for a degree-k polynomial mod p.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchSpace {
    /// ⌈p^{k−1} / (k−1)!⌉
    pub lower_bound: BigUint,
    /// C(p+k−2, k−1): (k−1)-multisets drawn from {0, …, p−1}.
    pub multiset_count: BigUint,
}

pub fn coefficient_space_lower_bound(p: &BigUint, k: u32) -> SearchSpace {
    assert!(k >= 2, "degree must be at least 2");
    let r = k - 1;
    let factorial: BigUint = (1..=r).map(BigUint::from).product();
    let power = num_traits::pow::pow(p.clone(), r as usize);
    let lower_bound = (&power + &factorial - BigUint::one()) / &factorial;
    // C(p+r−1, r) = (p+r−1)(p+r−2)…p / r!
    let rising: BigUint = (0..r).map(|i| p + BigUint::from(i)).product();
    SearchSpace {
        lower_bound,
        multiset_count: rising / factorial,
    }
}

/// Exhaustive counts over every choice of free roots for a tiny field.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BruteForceCount {
    /// (p−1)^{k−1} ordered choices of r₁..r_{k−1}.
    pub tuples: u64,
    /// Distinct multisets {r₁..r_{k−1}} of free roots drawn from [1, p−1].
    pub free_root_multisets: u64,
    /// Distinct multisets of all k roots.
    pub root_multisets: u64,
    /// Distinct vectors (a₁..a_{k−1}), the all-zero vector included if it occurs.
    pub coefficient_vectors: u64,
    /// Tuples whose polynomial has the prohibited all-zero coefficients.
    pub all_zero_tuples: u64,
}

pub fn brute_force_root_multiset_count(p: u64, k: usize, d: u64) -> Result<BruteForceCount, PartitionError> {
    if p > 13 || !(2..=4).contains(&k) {
        return Err(PartitionError::TooLarge);
    }
    let modulus = Modulus::prime_u64(p)?;
    check_k(k, &modulus)?;
    let datum = Datum::new(modulus.element(BigUint::from(d))?)?;

    let mut free_sets = HashSet::new();
    let mut root_sets = HashSet::new();
    let mut coefficient_vectors = HashSet::new();
    let mut tuples = 0u64;
    let mut all_zero_tuples = 0u64;

    let mut free = vec![1u64; k - 1];
    loop {
        let elems: Vec<_> = free.iter().map(|&r| modulus.element_u64(r)).collect();
        let shares = split_k_with_roots(&datum, GroupId::default(), &elems)?;
        let mut roots: Vec<u64> = shares.iter().map(|s| to_u64(s.value())).collect();
        let poly = polynomial_from_roots(&elems_of(&shares))?;
        let a: Vec<u64> = poly[1..k].iter().map(to_u64).collect();
        if a.iter().all(|&c| c == 0) {
            all_zero_tuples += 1;
        }
        coefficient_vectors.insert(a);

        let mut sorted_free = free.clone();
        sorted_free.sort_unstable();
        free_sets.insert(sorted_free);
        roots.sort_unstable();
        root_sets.insert(roots);
        tuples += 1;

        // odometer over [1, p−1]^{k−1}
        let mut pos = 0;
        loop {
            if pos == free.len() {
                return Ok(BruteForceCount {
                    tuples,
                    free_root_multisets: free_sets.len() as u64,
                    root_multisets: root_sets.len() as u64,
                    coefficient_vectors: coefficient_vectors.len() as u64,
                    all_zero_tuples,
                });
            }
            free[pos] += 1;
            if free[pos] < p {
                break;
            }
            free[pos] = 1;
            pos += 1;
        }
    }
}

fn elems_of(shares: &[RootShare]) -> Vec<FieldElement> {
    shares.iter().map(|s| s.value.clone()).collect()
}

fn to_u64(x: &FieldElement) -> u64 {
    x.value().to_u64().unwrap_or_else(|| {
        debug_assert!(false, "small-field value overflowed u64");
        0
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    fn p31() -> Modulus {
        Modulus::prime_u64(31).unwrap()
    }

    fn datum(m: &Modulus, v: u64) -> Datum {
        Datum::new(m.element_u64(v)).unwrap()
    }

    fn forced(m: &Modulus, d: u64, free: &[u64]) -> Vec<RootShare> {
        let free: Vec<_> = free.iter().map(|&r| m.element_u64(r)).collect();
        split_k_with_roots(&datum(m, d), GroupId::default(), &free).unwrap()
    }

    fn values(shares: &[RootShare]) -> Vec<u64> {
        shares.iter().map(|s| to_u64(s.value())).collect()
    }

    #[test]
    fn forced_splits() {
        let m = p31();
        assert_eq!(values(&forced(&m, 10, &[19, 22])), vec![19, 22, 11]);
        assert_eq!(values(&forced(&m, 1, &[1])), vec![1, 1]);
        assert_eq!(values(&forced(&m, 10, &[1, 1])), vec![1, 1, 10]);
    }

    #[test]
    fn split_preconditions() {
        let m = p31();
        let mut rng = ChaCha20Rng::seed_from_u64(1);
        let d = datum(&m, 10);
        assert_eq!(split_k(&d, 1, &mut rng), Err(PartitionError::InvalidK { k: 1 }));
        assert_eq!(split_k(&d, 31, &mut rng), Err(PartitionError::InvalidK { k: 31 }));
        assert!(split_k(&d, 30, &mut rng).is_ok());
        assert_eq!(Datum::new(m.zero()), Err(PartitionError::ZeroDatum));
        let n55 = Modulus::composite(BigUint::from(55u32)).unwrap();
        assert_eq!(
            split_k(&datum(&n55, 2), 2, &mut rng),
            Err(PartitionError::CompositeModulus)
        );
        assert_eq!(
            split_k_with_roots(&d, GroupId::default(), &[m.element_u64(3), m.zero()]),
            Err(PartitionError::ZeroRoot)
        );
    }

    #[test]
    fn combine_checks_share_set() {
        let m = p31();
        let shares = forced(&m, 10, &[19, 22]);
        assert_eq!(to_u64(combine_k(&shares).unwrap().element()), 10);

        assert_eq!(
            combine_k(&shares[..2]),
            Err(PartitionError::WrongShareCount { expected: 3, got: 2 })
        );
        let mut dup = shares.clone();
        dup[2] = dup[1].clone();
        assert_eq!(combine_k(&dup), Err(PartitionError::DuplicateIndex(2)));

        let mut mixed = shares.clone();
        mixed[0].group_id = GroupId([1; 16]);
        assert_eq!(combine_k(&mixed), Err(PartitionError::MixedGroups));

        assert_eq!(
            RootShare::new(GroupId::default(), 1, 1, m.one()),
            Err(PartitionError::InvalidK { k: 1 })
        );
        assert_eq!(
            combine_k(&[]),
            Err(PartitionError::WrongShareCount { expected: 2, got: 0 })
        );
    }

    #[test]
    fn example_polynomial() {
        let m = p31();
        let roots = forced(&m, 10, &[19, 22]);
        let coeffs = expand_coefficients(&roots).unwrap();
        assert_eq!(coeffs.k(), 3);
        assert_eq!(to_u64(coeffs.coefficient(2)), 10); // −21
        assert_eq!(to_u64(coeffs.coefficient(1)), 1);
        assert_eq!(to_u64(coeffs.constant_term()), 21); // −10
        for r in &roots {
            assert_eq!(to_u64(recover_from_root_and_coeffs(r, &coeffs).unwrap().element()), 10);
            assert!(verify_share(r, &coeffs));
        }
        let bogus = RootShare::new(GroupId::default(), 1, 3, m.element_u64(20)).unwrap();
        assert!(!verify_share(&bogus, &coeffs));
        // 20³ − 21·20² + 20 − 10 = 8000 − 8400 + 10 = −390 ≡ 13 (mod 31)
        assert_eq!(to_u64(&coeffs.evaluate(bogus.value()).unwrap()), 13);
    }

    #[test]
    fn repeated_root_expansion() {
        let m = p31();
        let coeffs = expand_coefficients(&forced(&m, 1, &[1])).unwrap();
        assert_eq!(to_u64(coeffs.coefficient(1)), 29);
        assert_eq!(to_u64(coeffs.constant_term()), 1);
    }

    #[test]
    fn all_zero_coefficients_rejected() {
        // x² + 1 has roots 2 and 3 mod 5: (x − 2)(x − 3) = x² − 5x + 6 ≡ x² + 1
        let m = Modulus::prime_u64(5).unwrap();
        let roots = forced(&m, 1, &[2]);
        assert_eq!(values(&roots), vec![2, 3]);
        assert_eq!(expand_coefficients(&roots), Err(PartitionError::AllZeroCoefficients));
    }

    #[test]
    fn split_with_coefficients_avoids_degenerate_polynomials() {
        let m = Modulus::prime_u64(5).unwrap();
        let mut rng = ChaCha20Rng::seed_from_u64(3);
        for _ in 0..200 {
            let (roots, coeffs) = split_with_coefficients(&datum(&m, 1), 2, &mut rng).unwrap();
            assert!(coeffs.non_constant().iter().any(|c| !c.is_zero()));
            assert!(roots.iter().all(|r| verify_share(r, &coeffs)));
        }
    }

    #[test]
    fn search_space() {
        let s = coefficient_space_lower_bound(&BigUint::from(31u32), 3);
        assert_eq!(s.lower_bound, BigUint::from(481u32));
        assert_eq!(s.multiset_count, BigUint::from(496u32));
        let s = coefficient_space_lower_bound(&BigUint::from(31u32), 2);
        assert_eq!(s.lower_bound, BigUint::from(31u32));
        assert_eq!(s.multiset_count, BigUint::from(31u32));
        let s = coefficient_space_lower_bound(&BigUint::from(5u32), 3);
        assert_eq!(s.multiset_count, BigUint::from(15u32));
    }

    #[test]
    fn brute_force_small_cases() {
        let c = brute_force_root_multiset_count(7, 2, 1).unwrap();
        assert_eq!(c.tuples, 6);
        for d in 1..7 {
            let c = brute_force_root_multiset_count(7, 2, d).unwrap();
            assert_eq!(c.coefficient_vectors, c.root_multisets);
        }
        let c = brute_force_root_multiset_count(7, 3, 1).unwrap();
        assert!(c.coefficient_vectors <= 28);
        assert_eq!(brute_force_root_multiset_count(17, 2, 1), Err(PartitionError::TooLarge));
        assert_eq!(brute_force_root_multiset_count(7, 5, 1), Err(PartitionError::TooLarge));
        assert!(brute_force_root_multiset_count(9, 2, 1).is_err());
    }

    #[test]
    fn group_id_hex() {
        let g = GroupId([0xab; 16]);
        assert_eq!(GroupId::from_hex(&g.to_hex()), Some(g));
        assert_eq!(GroupId::from_hex("abcd"), None);
    }
}
