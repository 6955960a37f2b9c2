//! Exact modular arithmetic on unbounded integers.
//!
//! Every value in the crate lives in Z_m for some odd modulus m: a large prime
//! for the root and redundant schemes, a product of two primes for the
//! composite scheme. A [`FieldElement`] always carries its [`Modulus`], and
//! binary operations refuse to mix moduli.

use std::fmt;
use std::sync::Arc;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Zero};
use rand::RngCore;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use thiserror::Error;

/// Miller–Rabin rounds required before a value is accepted as a prime modulus.
pub const PRIME_ROUNDS: usize = 64;

/// Witnesses that make Miller–Rabin deterministic for every n < 2^64.
const SMALL_WITNESSES: [u32; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("operands use different moduli")]
    ModulusMismatch,
    /// `gcd` is a nontrivial factor of the modulus whenever it is neither 1 nor the modulus.
    #[error("{value} is not invertible modulo {modulus} (gcd = {gcd})")]
    NotInvertible {
        value: BigUint,
        modulus: BigUint,
        gcd: BigUint,
    },
    #[error("modulus must be odd and at least 3, got {0}")]
    BadModulus(BigUint),
    #[error("{0} failed the primality test")]
    NotPrime(BigUint),
    #[error("primality is only defined for values >= 2, got {0}")]
    BelowTwo(BigUint),
    #[error("value {value} is not reduced modulo {modulus}")]
    OutOfRange { value: BigUint, modulus: BigUint },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ModulusKind {
    Prime,
    Composite,
}

#[derive(Debug, PartialEq, Eq, Hash)]
struct ModulusInner {
    value: BigUint,
    kind: ModulusKind,
}

/// An odd modulus >= 3, tagged prime or composite. Cheap to clone.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Modulus(Arc<ModulusInner>);

impl Modulus {
    /// Accepts `value` only if it passes [`PRIME_ROUNDS`] rounds of Miller–Rabin.
    pub fn prime(value: BigUint) -> Result<Self, FieldError> {
        check_odd(&value)?;
        if !is_probable_prime(&value, PRIME_ROUNDS)? {
            return Err(FieldError::NotPrime(value));
        }
        Ok(Self::new_unchecked(value, ModulusKind::Prime))
    }

    /// A composite modulus such as n = p·q. Only oddness is checked here.
    pub fn composite(value: BigUint) -> Result<Self, FieldError> {
        check_odd(&value)?;
        Ok(Self::new_unchecked(value, ModulusKind::Composite))
    }

    pub fn prime_u64(value: u64) -> Result<Self, FieldError> {
        Self::prime(BigUint::from(value))
    }

    /// The prime 2^255 − 19, used as the default modulus for byte data.
    pub fn curve25519_prime() -> Self {
        let p = (BigUint::one() << 255u32) - BigUint::from(19u32);
        Self::new_unchecked(p, ModulusKind::Prime)
    }

    fn new_unchecked(value: BigUint, kind: ModulusKind) -> Self {
        Modulus(Arc::new(ModulusInner { value, kind }))
    }

    pub fn value(&self) -> &BigUint {
        &self.0.value
    }

    pub fn kind(&self) -> ModulusKind {
        self.0.kind
    }

    pub fn is_prime(&self) -> bool {
        self.0.kind == ModulusKind::Prime
    }

    /// Reduces an arbitrary integer into this modulus.
    pub fn reduce(&self, value: &BigUint) -> FieldElement {
        FieldElement {
            value: value % self.value(),
            modulus: self.clone(),
        }
    }

    /// Wraps an already-reduced value, rejecting anything >= the modulus.
    pub fn element(&self, value: BigUint) -> Result<FieldElement, FieldError> {
        if &value >= self.value() {
            return Err(FieldError::OutOfRange {
                value,
                modulus: self.value().clone(),
            });
        }
        Ok(FieldElement {
            value,
            modulus: self.clone(),
        })
    }

    pub fn element_u64(&self, value: u64) -> FieldElement {
        self.reduce(&BigUint::from(value))
    }

    pub fn zero(&self) -> FieldElement {
        self.element_u64(0)
    }

    pub fn one(&self) -> FieldElement {
        self.element_u64(1)
    }

    /// Uniform element of [1, m−1].
    pub fn sample_nonzero<R: RngCore + ?Sized>(&self, rng: &mut R) -> FieldElement {
        let hi = self.value() - BigUint::one();
        FieldElement {
            value: sample_uniform(&BigUint::one(), &hi, rng),
            modulus: self.clone(),
        }
    }

    /// Uniform element of [0, m−1].
    pub fn sample<R: RngCore + ?Sized>(&self, rng: &mut R) -> FieldElement {
        let hi = self.value() - BigUint::one();
        FieldElement {
            value: sample_uniform(&BigUint::zero(), &hi, rng),
            modulus: self.clone(),
        }
    }
}

impl fmt::Debug for Modulus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Modulus({:?}, {})", self.0.kind, self.0.value)
    }
}

fn check_odd(value: &BigUint) -> Result<(), FieldError> {
    if value < &BigUint::from(3u32) || value.is_even() {
        return Err(FieldError::BadModulus(value.clone()));
    }
    Ok(())
}

/// A residue 0 <= value < modulus.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FieldElement {
    value: BigUint,
    modulus: Modulus,
}

impl FieldElement {
    pub fn value(&self) -> &BigUint {
        &self.value
    }

    pub fn modulus(&self) -> &Modulus {
        &self.modulus
    }

    pub fn into_value(self) -> BigUint {
        self.value
    }

    pub fn is_zero(&self) -> bool {
        self.value.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.value.is_one()
    }

    fn same_modulus(&self, other: &Self) -> Result<(), FieldError> {
        if Arc::ptr_eq(&self.modulus.0, &other.modulus.0) || self.modulus == other.modulus {
            Ok(())
        } else {
            Err(FieldError::ModulusMismatch)
        }
    }

    fn with_value(&self, value: BigUint) -> Self {
        FieldElement {
            value,
            modulus: self.modulus.clone(),
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, FieldError> {
        self.same_modulus(other)?;
        Ok(self.with_value((&self.value + &other.value) % self.modulus.value()))
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self, FieldError> {
        self.same_modulus(other)?;
        let m = self.modulus.value();
        Ok(self.with_value((&self.value + m - &other.value) % m))
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self, FieldError> {
        self.same_modulus(other)?;
        Ok(self.with_value((&self.value * &other.value) % self.modulus.value()))
    }

    pub fn neg(&self) -> Self {
        if self.value.is_zero() {
            self.clone()
        } else {
            self.with_value(self.modulus.value() - &self.value)
        }
    }

    /// Multiplicative inverse by the extended Euclidean algorithm.
    ///
    /// Fails with [`FieldError::NotInvertible`] carrying gcd(value, m). On a
    /// composite modulus a gcd other than 1 or m is a factor of m.
    pub fn inverse(&self) -> Result<Self, FieldError> {
        let m = self.modulus.value();
        let (gcd, x) = ext_gcd(&self.value, m);
        if !gcd.is_one() {
            return Err(FieldError::NotInvertible {
                value: self.value.clone(),
                modulus: m.clone(),
                gcd,
            });
        }
        Ok(self.with_value(x))
    }

    pub fn pow(&self, exp: &BigUint) -> Self {
        self.with_value(self.value.modpow(exp, self.modulus.value()))
    }

    pub fn pow_u64(&self, exp: u64) -> Self {
        self.pow(&BigUint::from(exp))
    }
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (mod {})", self.value, self.modulus.value())
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.value, f)
    }
}

/// a⁻¹ mod m for any m >= 2, including the even moduli that [`Modulus`]
/// does not admit (such as λ(n) for exponent inversion).
pub fn inverse_mod(a: &BigUint, m: &BigUint) -> Result<BigUint, FieldError> {
    let (gcd, x) = ext_gcd(a, m);
    if !gcd.is_one() {
        return Err(FieldError::NotInvertible {
            value: a.clone(),
            modulus: m.clone(),
            gcd,
        });
    }
    Ok(x)
}

/// Returns (gcd(a, m), a⁻¹ mod m); the second value is meaningful only when gcd = 1.
fn ext_gcd(a: &BigUint, m: &BigUint) -> (BigUint, BigUint) {
    let modulus = BigInt::from_biguint(Sign::Plus, m.clone());
    let (mut old_r, mut r) = (BigInt::from_biguint(Sign::Plus, a % m), modulus.clone());
    let (mut old_s, mut s) = (BigInt::one(), BigInt::zero());
    while !r.is_zero() {
        let q = &old_r / &r;
        let next_r = &old_r - &q * &r;
        old_r = std::mem::replace(&mut r, next_r);
        let next_s = &old_s - &q * &s;
        old_s = std::mem::replace(&mut s, next_s);
    }
    // old_r = gcd(a, m) and old_s·a ≡ old_r (mod m)
    let inv = old_s.mod_floor(&modulus);
    let gcd = old_r.magnitude().clone();
    if gcd.is_zero() {
        // a ≡ 0: gcd(0, m) = m
        return (m.clone(), BigUint::zero());
    }
    (gcd, inv.to_biguint().unwrap_or_default())
}

/// Miller–Rabin primality test.
///
/// Below 2^64 the fixed witness set makes the verdict exact; above it,
/// `rounds` pseudo-random witnesses are drawn from a generator seeded by the
/// candidate itself, so the answer is reproducible.
pub fn is_probable_prime(v: &BigUint, rounds: usize) -> Result<bool, FieldError> {
    let two = BigUint::from(2u32);
    if v < &two {
        return Err(FieldError::BelowTwo(v.clone()));
    }
    for &p in &SMALL_WITNESSES {
        let p = BigUint::from(p);
        if v == &p {
            return Ok(true);
        }
        if (v % &p).is_zero() {
            return Ok(false);
        }
    }

    let n_minus_one = v - BigUint::one();
    let twos = n_minus_one.trailing_zeros().unwrap_or(0);
    let odd = &n_minus_one >> twos;

    let passes = |a: &BigUint| -> bool {
        let mut x = a.modpow(&odd, v);
        if x.is_one() || x == n_minus_one {
            return true;
        }
        for _ in 1..twos {
            x = (&x * &x) % v;
            if x == n_minus_one {
                return true;
            }
            if x.is_one() {
                return false;
            }
        }
        false
    };

    if v.bits() <= 64 {
        return Ok(SMALL_WITNESSES.iter().all(|&a| passes(&BigUint::from(a))));
    }

    let digest_seed = v.iter_u64_digits().fold(0u64, |acc, d| acc.rotate_left(17) ^ d);
    let mut rng = ChaCha20Rng::seed_from_u64(digest_seed);
    let hi = v - &two;
    for _ in 0..rounds {
        let a = sample_uniform(&two, &hi, &mut rng);
        if !passes(&a) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Uniform draw from [lo, hi] by rejection sampling on the smallest covering
/// bit width, so every value has exactly the same probability.
///
/// # Panics
///
/// Panics if `lo > hi`.
pub fn sample_uniform<R: RngCore + ?Sized>(lo: &BigUint, hi: &BigUint, rng: &mut R) -> BigUint {
    assert!(lo <= hi, "sample_uniform: empty range");
    let span_minus_one = hi - lo;
    if span_minus_one.is_zero() {
        return lo.clone();
    }
    let bits = span_minus_one.bits();
    let len = bits.div_ceil(8) as usize;
    let top_mask = 0xffu8 >> (len as u64 * 8 - bits);
    let mut buf = vec![0u8; len];
    loop {
        rng.fill_bytes(&mut buf);
        buf[0] &= top_mask;
        let candidate = BigUint::from_bytes_be(&buf);
        if candidate <= span_minus_one {
            return lo + candidate;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p31() -> Modulus {
        Modulus::prime_u64(31).unwrap()
    }

    #[test]
    fn addition_wraps() {
        let m = p31();
        let sum = m.element_u64(30).checked_add(&m.element_u64(2)).unwrap();
        assert_eq!(sum.value(), &BigUint::from(1u32));
        let sum = m.element_u64(19).checked_add(&m.element_u64(22)).unwrap();
        assert_eq!(sum.value(), &BigUint::from(10u32));
        let x = m.element_u64(17);
        assert_eq!(m.zero().checked_add(&x).unwrap(), x);
    }

    #[test]
    fn multiplication() {
        let m = p31();
        let prod = m.element_u64(19).checked_mul(&m.element_u64(22)).unwrap();
        assert_eq!(prod.value(), &BigUint::from(15u32));
        let prod = m.element_u64(15).checked_mul(&m.element_u64(11)).unwrap();
        assert_eq!(prod.value(), &BigUint::from(10u32));
        let x = m.element_u64(23);
        assert_eq!(m.one().checked_mul(&x).unwrap(), x);
    }

    #[test]
    fn mixed_moduli_rejected() {
        let a = p31().element_u64(3);
        let b = Modulus::prime_u64(37).unwrap().element_u64(3);
        assert_eq!(a.checked_add(&b), Err(FieldError::ModulusMismatch));
        assert_eq!(a.checked_mul(&b), Err(FieldError::ModulusMismatch));
    }

    #[test]
    fn inverse() {
        let m = p31();
        assert_eq!(m.element_u64(15).inverse().unwrap().value(), &BigUint::from(29u32));
        assert!(m.one().inverse().unwrap().is_one());
        assert!(matches!(m.zero().inverse(), Err(FieldError::NotInvertible { .. })));

        let fifteen = Modulus::composite(BigUint::from(15u32)).unwrap();
        match fifteen.element_u64(6).inverse() {
            Err(FieldError::NotInvertible { gcd, .. }) => assert_eq!(gcd, BigUint::from(3u32)),
            other => panic!("expected NotInvertible, got {other:?}"),
        }
    }

    #[test]
    fn powers() {
        let m = p31();
        assert!(m.element_u64(2).pow_u64(5).is_one());
        let x = m.element_u64(12);
        assert!(x.pow_u64(0).is_one());
        assert_eq!(x.pow_u64(1), x);
    }

    #[test]
    fn primality() {
        let check = |v: u64| is_probable_prime(&BigUint::from(v), PRIME_ROUNDS).unwrap();
        assert!(check(31));
        assert!(check(2));
        assert!(check(65537));
        assert!(!check(561));
        assert!(!check(1105));
        assert!(!check(3215031751));
        assert!(check(18446744073709551557)); // largest prime below 2^64
        assert!(matches!(
            is_probable_prime(&BigUint::one(), PRIME_ROUNDS),
            Err(FieldError::BelowTwo(_))
        ));
        let p = Modulus::curve25519_prime();
        assert!(is_probable_prime(p.value(), PRIME_ROUNDS).unwrap());
        // 2^255 − 21 is odd and composite (divisible by 3)
        let q = (BigUint::one() << 255u32) - BigUint::from(21u32);
        assert!(!is_probable_prime(&q, PRIME_ROUNDS).unwrap());
    }

    #[test]
    fn primality_matches_trial_division() {
        fn trial(n: u64) -> bool {
            n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| !n.is_multiple_of(d))
        }
        for n in 2..5000u64 {
            assert_eq!(
                is_probable_prime(&BigUint::from(n), PRIME_ROUNDS).unwrap(),
                trial(n),
                "{n}"
            );
        }
    }

    #[test]
    fn modulus_validation() {
        assert!(matches!(Modulus::prime_u64(1), Err(FieldError::BadModulus(_))));
        assert!(matches!(Modulus::prime_u64(2), Err(FieldError::BadModulus(_))));
        assert!(matches!(Modulus::prime_u64(33), Err(FieldError::NotPrime(_))));
        assert!(Modulus::composite(BigUint::from(55u32)).is_ok());
        assert!(matches!(
            Modulus::composite(BigUint::from(54u32)),
            Err(FieldError::BadModulus(_))
        ));
        assert!(p31().element(BigUint::from(31u32)).is_err());
    }

    #[test]
    fn sampling_edges() {
        let mut rng = ChaCha20Rng::seed_from_u64(7);
        let five = BigUint::from(5u32);
        assert_eq!(sample_uniform(&five, &five, &mut rng), five);
        let m = p31();
        for _ in 0..2000 {
            assert!(!m.sample_nonzero(&mut rng).is_zero());
        }
    }

    /// Chi-square over [0, 7] with 10^6 draws. Critical value for 7 degrees
    /// of freedom at alpha = 0.001 is 24.322.
    #[test]
    fn sampling_is_uniform() {
        let mut rng = ChaCha20Rng::seed_from_u64(0x5eed);
        let (lo, hi) = (BigUint::zero(), BigUint::from(7u32));
        let draws = 1_000_000u32;
        let mut counts = [0u64; 8];
        for _ in 0..draws {
            let v = sample_uniform(&lo, &hi, &mut rng);
            counts[v.iter_u32_digits().next().unwrap_or(0) as usize] += 1;
        }
        let expected = f64::from(draws) / 8.0;
        let chi2: f64 = counts.iter().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
        assert!(chi2 < 24.322, "chi2 = {chi2}");
    }

    proptest! {
        #[test]
        fn inverse_round_trip(a in 1u64..u64::MAX) {
            let m = Modulus::prime_u64(18446744073709551557).unwrap();
            let x = m.element_u64(a);
            prop_assume!(!x.is_zero());
            prop_assert!(x.checked_mul(&x.inverse().unwrap()).unwrap().is_one());
        }

        #[test]
        fn composite_inverse_when_coprime(a in 1u64..3233) {
            let m = Modulus::composite(BigUint::from(3233u32)).unwrap(); // 61·53
            let x = m.element_u64(a);
            match x.inverse() {
                Ok(inv) => prop_assert!(x.checked_mul(&inv).unwrap().is_one()),
                Err(FieldError::NotInvertible { gcd, .. }) => {
                    prop_assert!(gcd == BigUint::from(61u32) || gcd == BigUint::from(53u32));
                }
                Err(e) => prop_assert!(false, "unexpected {e}"),
            }
        }

        #[test]
        fn pow_matches_iterated_mul(base in 0u64..1_000_000, exp in 0u64..=64) {
            let m = Modulus::prime_u64(1_000_003).unwrap();
            let b = m.element_u64(base);
            let mut acc = m.one();
            for _ in 0..exp {
                acc = acc.checked_mul(&b).unwrap();
            }
            prop_assert_eq!(b.pow_u64(exp), acc);
        }

        #[test]
        fn sub_inverts_add(a in 0u64..31, b in 0u64..31) {
            let m = p31();
            let (x, y) = (m.element_u64(a), m.element_u64(b));
            prop_assert_eq!(x.checked_add(&y).unwrap().checked_sub(&y).unwrap(), x.clone());
            prop_assert!(x.checked_add(&x.neg()).unwrap().is_zero());
        }
    }
}
