//! Exact scalar fields: the rationals and prime fields `F_p`.
//!
//! Every higher module is generic over [`Field`]; there is no floating point
//! anywhere in the crate.

use std::fmt::{self, Debug, Display};
use std::hash::Hash;

use num::{BigInt, BigRational, One, Signed, Zero};

/// Arbitrary-precision rational, always in lowest terms with positive denominator.
pub type Rational = BigRational;

/// An exact field with value semantics.
pub trait Field: Clone + Eq + Ord + Hash + Debug + Display + Send + Sync + 'static {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    /// Multiplicative inverse, `None` for zero.
    fn inv(&self) -> Option<Self>;
    fn from_i64(n: i64) -> Self;
    /// Image of a rational number, `None` when the denominator vanishes in the field.
    fn from_rational(q: &Rational) -> Option<Self>;
    /// 0 for the rationals.
    fn characteristic() -> u64;
    /// All elements, for finite fields.
    fn elements() -> Option<Vec<Self>>;

    fn is_one(&self) -> bool {
        *self == Self::one()
    }

    fn div(&self, other: &Self) -> Option<Self> {
        other.inv().map(|i| self.mul(&i))
    }

    fn is_finite() -> bool {
        Self::characteristic() != 0
    }
}

impl Field for Rational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn neg(&self) -> Self {
        -self
    }
    fn inv(&self) -> Option<Self> {
        if Zero::is_zero(self) {
            None
        } else {
            Some(self.recip())
        }
    }
    fn from_i64(n: i64) -> Self {
        BigRational::from_integer(BigInt::from(n))
    }
    fn from_rational(q: &Rational) -> Option<Self> {
        Some(q.clone())
    }
    fn characteristic() -> u64 {
        0
    }
    fn elements() -> Option<Vec<Self>> {
        None
    }
}

/// Element of the prime field `Z/PZ`, stored as its representative in `[0, P)`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Fp<const P: u32>(u32);

pub type F2 = Fp<2>;
pub type F3 = Fp<3>;
pub type F5 = Fp<5>;
pub type F7 = Fp<7>;

impl<const P: u32> Fp<P> {
    pub fn new(v: i64) -> Self {
        debug_assert!(is_prime(P as u64), "Fp modulus {P} is not prime");
        Fp(v.rem_euclid(P as i64) as u32)
    }

    pub fn value(self) -> u32 {
        self.0
    }

    fn pow(self, mut e: u64) -> Self {
        let mut base = self.0 as u64;
        let mut acc = 1u64;
        let p = P as u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base % p;
            }
            base = base * base % p;
            e >>= 1;
        }
        Fp(acc as u32)
    }
}

impl<const P: u32> Debug for Fp<P> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl<const P: u32> Display for Fp<P> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl<const P: u32> Field for Fp<P> {
    fn zero() -> Self {
        Fp(0)
    }
    fn one() -> Self {
        Fp(1 % P)
    }
    fn is_zero(&self) -> bool {
        self.0 == 0
    }
    fn add(&self, other: &Self) -> Self {
        Fp(((self.0 as u64 + other.0 as u64) % P as u64) as u32)
    }
    fn sub(&self, other: &Self) -> Self {
        Fp(((self.0 as u64 + P as u64 - other.0 as u64) % P as u64) as u32)
    }
    fn mul(&self, other: &Self) -> Self {
        Fp(((self.0 as u64 * other.0 as u64) % P as u64) as u32)
    }
    fn neg(&self) -> Self {
        Fp((P - self.0) % P)
    }
    fn inv(&self) -> Option<Self> {
        if self.0 == 0 {
            None
        } else {
            // Fermat: a^(p-2)
            Some(self.pow(P as u64 - 2))
        }
    }
    fn from_i64(n: i64) -> Self {
        Fp::new(n)
    }
    fn from_rational(q: &Rational) -> Option<Self> {
        let p = BigInt::from(P);
        let num = residue(q.numer(), &p);
        let den = residue(q.denom(), &p);
        Fp::<P>(den).inv().map(|d| Fp::<P>(num).mul(&d))
    }
    fn characteristic() -> u64 {
        P as u64
    }
    fn elements() -> Option<Vec<Self>> {
        Some((0..P).map(Fp).collect())
    }
}

fn residue(n: &BigInt, p: &BigInt) -> u32 {
    let mut r = n % p;
    if r.is_negative() {
        r += p;
    }
    u32::try_from(r).expect("residue below modulus")
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// `n` as a rational.
pub fn rat(n: i64) -> Rational {
    Rational::from_i64(n)
}

/// `n / d` as a rational. Panics on `d == 0`.
pub fn ratio(n: i64, d: i64) -> Rational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn is_integral(q: &Rational) -> bool {
    q.is_integer()
}

/// Parses `"7"`, `"-3/4"` style strings.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().ok()?;
            let d: BigInt = d.trim().parse().ok()?;
            if d.is_zero() {
                None
            } else {
                Some(BigRational::new(n, d))
            }
        }
        None => s.parse::<BigInt>().ok().map(BigRational::from_integer),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rationals_are_reduced() {
        let q = ratio(6, -4);
        assert_eq!(q.numer(), &BigInt::from(-3));
        assert_eq!(q.denom(), &BigInt::from(2));
    }

    #[test]
    fn prime_field_arithmetic() {
        let a = F5::new(3);
        let b = F5::new(4);
        assert_eq!(a.add(&b), F5::new(2));
        assert_eq!(a.sub(&b), F5::new(4));
        assert_eq!(a.mul(&b), F5::new(2));
        assert_eq!(a.inv().unwrap().mul(&a), F5::one());
        assert_eq!(F5::new(-1).value(), 4);
        assert!(F5::zero().inv().is_none());
        for x in F7::elements().unwrap().into_iter().skip(1) {
            assert!(x.mul(&x.inv().unwrap()).is_one());
        }
    }

    #[test]
    fn rational_into_prime_field() {
        assert_eq!(F3::from_rational(&ratio(1, 2)), Some(F3::new(2)));
        assert_eq!(F3::from_rational(&ratio(1, 3)), None);
        assert_eq!(F5::from_rational(&ratio(-7, 1)), Some(F5::new(3)));
    }

    #[test]
    fn parse_rationals() {
        assert_eq!(parse_rational("-3/6"), Some(ratio(-1, 2)));
        assert_eq!(parse_rational("12"), Some(rat(12)));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(parse_rational("x"), None);
    }
}
