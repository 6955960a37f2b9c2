//! Root splitting of d^y modulo a secret-factor composite n = p·q.
//!
//! The roots multiply to the ciphertext c = d^y mod n, so even a complete set
//! of shares only yields c. Turning c back into d takes y⁻¹ mod λ(n), which
//! requires the factors of n.

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::One;
use rand::RngCore;
use thiserror::Error;

use crate::field::{inverse_mod, is_probable_prime, sample_uniform, FieldElement, FieldError, Modulus, PRIME_ROUNDS};
use crate::partition::{check_share_set, coefficients_from_roots, CoefficientSet, GroupId, PartitionError};

/// Smallest key size accepted by [`keygen`]. Anything this small is for tests.
pub const MIN_KEY_BITS: u64 = 16;
/// Keys below this size are flagged by [`CompositeKey::is_toy`].
pub const RECOMMENDED_KEY_BITS: u64 = 2048;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CompositeError {
    #[error("exponent {y} is not invertible modulo lambda(n) or shares a factor with n")]
    BadExponent { y: BigUint },
    #[error("key size must be at least {MIN_KEY_BITS} bits, got {0}")]
    KeyTooSmall(u64),
    #[error("{0} is not prime")]
    NotPrime(BigUint),
    #[error("the two primes must be distinct odd primes")]
    BadPrimePair,
    /// The gcd is a factor of n: the value must never be used.
    #[error("value shares the factor {gcd} with the modulus")]
    NotAUnit { gcd: BigUint },
    #[error("value must lie in [1, n−1]")]
    OutOfRange,
    #[error("shares were not produced under this key")]
    KeyMismatch,
    #[error("stored key fields are inconsistent")]
    CorruptKey,
    #[error(transparent)]
    Partition(#[from] PartitionError),
    #[error(transparent)]
    Field(#[from] FieldError),
}

#[derive(Clone, PartialEq, Eq)]
pub struct CompositeKey {
    p: BigUint,
    q: BigUint,
    n: BigUint,
    y: BigUint,
    y_inv: BigUint,
    lambda_n: BigUint,
}

impl std::fmt::Debug for CompositeKey {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CompositeKey")
            .field("n", &self.n)
            .field("y", &self.y)
            .finish_non_exhaustive()
    }
}

impl CompositeKey {
    /// Builds a key from explicit primes, deriving λ(n) = lcm(p−1, q−1) and
    /// y⁻¹ mod λ(n). Requires gcd(y, λ(n)) = 1 and gcd(y, n) = 1.
    pub fn from_primes(p: BigUint, q: BigUint, y: BigUint) -> Result<Self, CompositeError> {
        let three = BigUint::from(3u32);
        for f in [&p, &q] {
            if f < &three || f.is_even() || !is_probable_prime(f, PRIME_ROUNDS)? {
                return Err(CompositeError::NotPrime(f.clone()));
            }
        }
        if p == q {
            return Err(CompositeError::BadPrimePair);
        }
        let n = &p * &q;
        let lambda_n = (&p - 1u32).lcm(&(&q - 1u32));
        if y < three || !y.gcd(&lambda_n).is_one() || !y.gcd(&n).is_one() {
            return Err(CompositeError::BadExponent { y });
        }
        let y_inv = inverse_mod(&y, &lambda_n).map_err(|_| CompositeError::BadExponent { y: y.clone() })?;
        Ok(CompositeKey {
            p,
            q,
            n,
            y,
            y_inv,
            lambda_n,
        })
    }

    pub fn p(&self) -> &BigUint {
        &self.p
    }

    pub fn q(&self) -> &BigUint {
        &self.q
    }

    pub fn n(&self) -> &BigUint {
        &self.n
    }

    pub fn y(&self) -> &BigUint {
        &self.y
    }

    pub fn y_inv(&self) -> &BigUint {
        &self.y_inv
    }

    pub fn lambda_n(&self) -> &BigUint {
        &self.lambda_n
    }

    pub fn modulus(&self) -> Modulus {
        Modulus::composite(self.n.clone()).expect("product of odd primes is odd")
    }

    pub fn bits(&self) -> u64 {
        self.n.bits()
    }

    pub fn is_toy(&self) -> bool {
        self.bits() < RECOMMENDED_KEY_BITS
    }

    /// Whether this key is the one the shares were split under.
    pub fn matches(&self, modulus: &Modulus) -> bool {
        modulus.value() == &self.n
    }
}

/// Generates a key whose modulus has exactly `bits` bits.
///
/// Primes with gcd(y, prime − 1) ≠ 1 are redrawn, so any odd y >= 3 works.
/// Even y can never be inverted mod λ(n) and is rejected up front.
pub fn keygen<R: RngCore + ?Sized>(bits: u64, y: &BigUint, rng: &mut R) -> Result<CompositeKey, CompositeError> {
    if bits < MIN_KEY_BITS {
        return Err(CompositeError::KeyTooSmall(bits));
    }
    if y < &BigUint::from(3u32) || y.is_even() {
        return Err(CompositeError::BadExponent { y: y.clone() });
    }
    let p_bits = bits / 2;
    let q_bits = bits - p_bits;
    loop {
        let p = random_prime(p_bits, y, rng);
        let q = random_prime(q_bits, y, rng);
        if p == q || (&p * &q).bits() != bits {
            continue;
        }
        match CompositeKey::from_primes(p, q, y.clone()) {
            Ok(key) => return Ok(key),
            Err(CompositeError::BadExponent { .. }) => continue,
            Err(e) => return Err(e),
        }
    }
}

/// A random prime of exactly `bits` bits with the top two bits set, so that
/// the product of two such primes has full length.
fn random_prime<R: RngCore + ?Sized>(bits: u64, y: &BigUint, rng: &mut R) -> BigUint {
    let lo = BigUint::from(3u32) << (bits - 2);
    let hi = (BigUint::one() << bits) - 1u32;
    loop {
        let candidate = sample_uniform(&lo, &hi, rng) | BigUint::one();
        if is_probable_prime(&candidate, PRIME_ROUNDS).unwrap_or(false) && y.gcd(&(&candidate - 1u32)).is_one() {
            return candidate;
        }
    }
}

/// One root of the composite-modulus polynomial; always a unit mod n.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompositeShare {
    group_id: GroupId,
    index: u16,
    k: u16,
    value: FieldElement,
}

impl CompositeShare {
    pub fn new(group_id: GroupId, index: u16, k: u16, value: FieldElement) -> Result<Self, CompositeError> {
        if k < 2 {
            return Err(PartitionError::InvalidK { k: k.into() }.into());
        }
        if index == 0 || index > k {
            return Err(PartitionError::IndexOutOfRange { index, k }.into());
        }
        let gcd = value.value().gcd(value.modulus().value());
        if !gcd.is_one() {
            return Err(CompositeError::NotAUnit { gcd });
        }
        Ok(CompositeShare {
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

fn unit_datum(d: &BigUint, key: &CompositeKey) -> Result<FieldElement, CompositeError> {
    let modulus = key.modulus();
    if d == &BigUint::ZERO || d >= key.n() {
        return Err(CompositeError::OutOfRange);
    }
    let gcd = d.gcd(key.n());
    if !gcd.is_one() {
        return Err(CompositeError::NotAUnit { gcd });
    }
    Ok(modulus.reduce(d))
}

/// Splits c = d^y mod n into k unit roots under a fresh group id.
pub fn split_composite<R: RngCore + ?Sized>(
    d: &BigUint,
    k: usize,
    key: &CompositeKey,
    rng: &mut R,
) -> Result<Vec<CompositeShare>, CompositeError> {
    unit_datum(d, key)?;
    check_composite_k(k)?;
    let group = GroupId::random(rng);
    split_composite_in_group(d, k, key, group, rng)
}

/// [`split_composite`] under a caller-chosen group id.
pub fn split_composite_in_group<R: RngCore + ?Sized>(
    d: &BigUint,
    k: usize,
    key: &CompositeKey,
    group: GroupId,
    rng: &mut R,
) -> Result<Vec<CompositeShare>, CompositeError> {
    let datum = unit_datum(d, key)?;
    check_composite_k(k)?;
    let modulus = datum.modulus().clone();
    let free: Vec<_> = (1..k)
        .map(|_| loop {
            let r = modulus.sample_nonzero(rng);
            if r.value().gcd(modulus.value()).is_one() {
                break r;
            }
        })
        .collect();
    split_composite_with_roots(d, key, group, &free)
}

/// Completes a composite split from caller-chosen free roots.
pub fn split_composite_with_roots(
    d: &BigUint,
    key: &CompositeKey,
    group: GroupId,
    free_roots: &[FieldElement],
) -> Result<Vec<CompositeShare>, CompositeError> {
    let datum = unit_datum(d, key)?;
    let k = free_roots.len() + 1;
    check_composite_k(k)?;
    let ciphertext = datum.pow(key.y());
    let mut product = datum.modulus().one();
    for r in free_roots {
        if !key.matches(r.modulus()) {
            return Err(CompositeError::KeyMismatch);
        }
        product = product.checked_mul(r)?;
    }
    let inv = product.inverse().map_err(|e| match e {
        FieldError::NotInvertible { gcd, .. } => CompositeError::NotAUnit { gcd },
        other => other.into(),
    })?;
    let last = ciphertext.checked_mul(&inv)?;
    free_roots
        .iter()
        .cloned()
        .chain(std::iter::once(last))
        .enumerate()
        .map(|(i, value)| CompositeShare::new(group, i as u16 + 1, k as u16, value))
        .collect()
}

fn check_composite_k(k: usize) -> Result<(), CompositeError> {
    if k < 2 || k > usize::from(u16::MAX) {
        return Err(PartitionError::InvalidK { k }.into());
    }
    Ok(())
}

/// Product of all shares: c = d^y mod n, the most a holder of every share learns.
pub fn combine_to_ciphertext(shares: &[CompositeShare]) -> Result<FieldElement, CompositeError> {
    check_share_set(shares.iter().map(|s| (s.group_id, s.index, s.k, &s.value)))?;
    let mut product = shares[0].modulus().one();
    for s in shares {
        product = product.checked_mul(&s.value)?;
    }
    Ok(product)
}

/// (∏rᵢ)^{y⁻¹} mod n.
pub fn recover_composite(shares: &[CompositeShare], key: &CompositeKey) -> Result<BigUint, CompositeError> {
    if shares.iter().any(|s| !key.matches(s.modulus())) {
        return Err(CompositeError::KeyMismatch);
    }
    let ciphertext = combine_to_ciphertext(shares)?;
    Ok(decrypt(&ciphertext, key))
}

/// c^{y⁻¹} mod n.
pub fn decrypt(ciphertext: &FieldElement, key: &CompositeKey) -> BigUint {
    ciphertext.pow(key.y_inv()).into_value()
}

pub fn expand_coefficients_composite(shares: &[CompositeShare]) -> Result<CoefficientSet, CompositeError> {
    let Some(first) = shares.first() else {
        return Err(PartitionError::InvalidK { k: 0 }.into());
    };
    if shares.iter().any(|s| s.modulus() != first.modulus()) {
        return Err(FieldError::ModulusMismatch.into());
    }
    let values: Vec<_> = shares.iter().map(|s| s.value.clone()).collect();
    Ok(coefficients_from_roots(&values)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partition::{recover_constant, Datum};
    use num_traits::ToPrimitive;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    fn toy_key() -> CompositeKey {
        CompositeKey::from_primes(5u32.into(), 11u32.into(), 3u32.into()).unwrap()
    }

    fn u(x: &FieldElement) -> u64 {
        x.value().to_u64().unwrap()
    }

    #[test]
    fn toy_key_derivation() {
        let key = toy_key();
        assert_eq!(key.n(), &BigUint::from(55u32));
        assert_eq!(key.lambda_n(), &BigUint::from(20u32));
        assert_eq!(key.y_inv(), &BigUint::from(7u32));
        assert!(key.is_toy());
    }

    #[test]
    fn bad_exponents() {
        assert!(matches!(
            CompositeKey::from_primes(5u32.into(), 11u32.into(), 4u32.into()),
            Err(CompositeError::BadExponent { .. })
        ));
        // gcd(5, λ = 20) = 5
        assert!(matches!(
            CompositeKey::from_primes(5u32.into(), 11u32.into(), 5u32.into()),
            Err(CompositeError::BadExponent { .. })
        ));
        let mut rng = ChaCha20Rng::seed_from_u64(0);
        assert!(matches!(
            keygen(32, &BigUint::from(4u32), &mut rng),
            Err(CompositeError::BadExponent { .. })
        ));
        assert_eq!(
            keygen(8, &BigUint::from(3u32), &mut rng),
            Err(CompositeError::KeyTooSmall(8))
        );
        assert!(matches!(
            CompositeKey::from_primes(9u32.into(), 11u32.into(), 3u32.into()),
            Err(CompositeError::NotPrime(_))
        ));
        assert_eq!(
            CompositeKey::from_primes(11u32.into(), 11u32.into(), 3u32.into()),
            Err(CompositeError::BadPrimePair)
        );
    }

    #[test]
    fn generated_keys_are_sound() {
        let mut rng = ChaCha20Rng::seed_from_u64(42);
        for bits in [16, 17, 32, 64, 128] {
            let key = keygen(bits, &BigUint::from(3u32), &mut rng).unwrap();
            assert_eq!(key.bits(), bits);
            assert!(is_probable_prime(key.p(), PRIME_ROUNDS).unwrap());
            assert!(is_probable_prime(key.q(), PRIME_ROUNDS).unwrap());
            assert_ne!(key.p(), key.q());
            assert!(((key.y() * key.y_inv()) % key.lambda_n()).is_one());
        }
    }

    #[test]
    fn toy_split_and_recover() {
        let key = toy_key();
        let m = key.modulus();
        let shares = split_composite_with_roots(&2u32.into(), &key, GroupId::default(), &[m.element_u64(3)]).unwrap();
        assert_eq!(shares.iter().map(|s| u(s.value())).collect::<Vec<_>>(), vec![3, 21]);
        assert_eq!(u(&combine_to_ciphertext(&shares).unwrap()), 8);
        assert_eq!(recover_composite(&shares, &key).unwrap(), BigUint::from(2u32));

        let ones = split_composite_with_roots(&1u32.into(), &key, GroupId::default(), &[m.one(), m.one()]).unwrap();
        assert!(ones.iter().all(|s| s.value().is_one()));
        assert!(combine_to_ciphertext(&ones).unwrap().is_one());
        assert!(recover_composite(&ones, &key).unwrap().is_one());
    }

    #[test]
    fn non_units_rejected() {
        let key = toy_key();
        let mut rng = ChaCha20Rng::seed_from_u64(5);
        assert_eq!(
            split_composite(&BigUint::from(10u32), 2, &key, &mut rng),
            Err(CompositeError::NotAUnit { gcd: 5u32.into() })
        );
        assert_eq!(
            split_composite(&BigUint::from(55u32), 2, &key, &mut rng),
            Err(CompositeError::OutOfRange)
        );
        let m = key.modulus();
        assert_eq!(
            CompositeShare::new(GroupId::default(), 1, 2, m.element_u64(22)),
            Err(CompositeError::NotAUnit { gcd: 11u32.into() })
        );
    }

    #[test]
    fn key_mismatch() {
        let key = toy_key();
        let other = CompositeKey::from_primes(7u32.into(), 13u32.into(), 5u32.into()).unwrap();
        let mut rng = ChaCha20Rng::seed_from_u64(9);
        let shares = split_composite(&BigUint::from(2u32), 3, &key, &mut rng).unwrap();
        assert_eq!(recover_composite(&shares, &other), Err(CompositeError::KeyMismatch));
    }

    #[test]
    fn composite_expansion() {
        let key = toy_key();
        let m = key.modulus();
        let shares = split_composite_with_roots(&2u32.into(), &key, GroupId::default(), &[m.element_u64(3)]).unwrap();
        let coeffs = expand_coefficients_composite(&shares).unwrap();
        assert_eq!(u(coeffs.coefficient(1)), 31);
        assert_eq!(u(coeffs.constant_term()), 8);
        for s in &shares {
            assert!(coeffs.evaluate(s.value()).unwrap().is_zero());
            assert_eq!(u(&recover_constant(s.value(), &coeffs).unwrap()), 8);
        }
        let repeated = split_composite_with_roots(
            &1u32.into(),
            &key,
            GroupId::default(),
            &[m.element_u64(2), m.element_u64(2)],
        )
        .unwrap();
        let coeffs = expand_coefficients_composite(&repeated).unwrap();
        assert!(repeated.iter().all(|s| coeffs.evaluate(s.value()).unwrap().is_zero()));
        // Datum wrapper accepts the ciphertext since it is a unit
        assert!(Datum::new(combine_to_ciphertext(&shares).unwrap()).is_ok());
    }

    #[test]
    fn random_round_trips_and_units() {
        let mut rng = ChaCha20Rng::seed_from_u64(77);
        let key = keygen(64, &BigUint::from(65537u32), &mut rng).unwrap();
        for _ in 0..200 {
            let d = sample_uniform(&BigUint::one(), &(key.n() - 1u32), &mut rng);
            let k = 2 + (rng.next_u32() % 4) as usize;
            let shares = split_composite(&d, k, &key, &mut rng).unwrap();
            assert!(shares.iter().all(|s| s.value().value().gcd(key.n()).is_one()));
            let c = combine_to_ciphertext(&shares).unwrap();
            assert_eq!(c.value(), &d.modpow(key.y(), key.n()));
            assert_eq!(recover_composite(&shares, &key).unwrap(), d);
        }
    }
}
