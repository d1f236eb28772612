//! Scalar domains the cluster transformations are evaluated in.
//!
//! Every A- and X-transformation is a ratio of subtraction-free
//! polynomials, so one implementation written against [`Semifield`] serves
//! exact rationals, binary64, log-domain reals, residues modulo a prime, and
//! the max-plus (tropical) semifield alike.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Num, Signed, ToPrimitive, Zero};

/// A commutative semifield: addition, multiplication and division, no
/// subtraction.
pub trait Semifield: Clone + PartialEq + fmt::Debug + Send + Sync {
    fn one() -> Self;
    fn plus(&self, rhs: &Self) -> Self;
    fn times(&self, rhs: &Self) -> Self;
    fn over(&self, rhs: &Self) -> Self;
    fn powi(&self, e: i64) -> Self;
    /// Whether the value is a legal coordinate (positive, finite, defined).
    fn is_admissible(&self) -> bool;

    fn recip(&self) -> Self {
        Self::one().over(self)
    }
}

/// Ordered fields whose positive cone is used as a semifield.
pub trait PositiveField: Num + Clone + PartialOrd + fmt::Debug + Send + Sync {
    fn is_finite_value(&self) -> bool;
}

impl PositiveField for BigRational {
    fn is_finite_value(&self) -> bool {
        true
    }
}

impl PositiveField for f64 {
    fn is_finite_value(&self) -> bool {
        self.is_finite()
    }
}

impl PositiveField for f32 {
    fn is_finite_value(&self) -> bool {
        self.is_finite()
    }
}

impl<T: PositiveField> Semifield for T {
    fn one() -> Self {
        T::one()
    }

    fn plus(&self, rhs: &Self) -> Self {
        self.clone() + rhs.clone()
    }

    fn times(&self, rhs: &Self) -> Self {
        self.clone() * rhs.clone()
    }

    fn over(&self, rhs: &Self) -> Self {
        self.clone() / rhs.clone()
    }

    fn powi(&self, e: i64) -> Self {
        let base = if e < 0 { T::one() / self.clone() } else { self.clone() };
        num_traits::pow::pow(base, e.unsigned_abs() as usize)
    }

    fn is_admissible(&self) -> bool {
        self.is_finite_value() && *self > T::zero()
    }
}

/// A positive real stored by its natural logarithm.
///
/// Orbits of infinite-order classes leave the range of binary64 quickly;
/// in log form they only grow linearly or geometrically in magnitude.
#[derive(Clone, Copy, PartialEq, PartialOrd)]
pub struct LogReal(pub f64);

impl LogReal {
    pub fn from_value(x: f64) -> Self {
        LogReal(x.ln())
    }

    pub fn ln(self) -> f64 {
        self.0
    }

    pub fn value(self) -> f64 {
        self.0.exp()
    }
}

impl fmt::Debug for LogReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "exp({})", self.0)
    }
}

impl Semifield for LogReal {
    fn one() -> Self {
        LogReal(0.0)
    }

    fn plus(&self, rhs: &Self) -> Self {
        let (hi, lo) = if self.0 >= rhs.0 { (self.0, rhs.0) } else { (rhs.0, self.0) };
        LogReal(hi + (lo - hi).exp().ln_1p())
    }

    fn times(&self, rhs: &Self) -> Self {
        LogReal(self.0 + rhs.0)
    }

    fn over(&self, rhs: &Self) -> Self {
        LogReal(self.0 - rhs.0)
    }

    fn powi(&self, e: i64) -> Self {
        LogReal(self.0 * e as f64)
    }

    fn is_admissible(&self) -> bool {
        self.0.is_finite()
    }
}

/// The Mersenne prime 2^61 - 1.
pub const M61: u64 = (1 << 61) - 1;
/// A second 61-bit prime used alongside [`M61`].
pub const P61B: u64 = 2_305_843_009_213_693_921;

/// Residue modulo the prime `P`. Division by zero poisons the value, and the
/// poison propagates through every later operation.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct ModP<const P: u64>(u64);

impl<const P: u64> ModP<P> {
    const POISON: u64 = u64::MAX;

    pub fn new(v: u64) -> Self {
        ModP(v % P)
    }

    pub fn poisoned() -> Self {
        ModP(Self::POISON)
    }

    pub fn is_poisoned(self) -> bool {
        self.0 == Self::POISON
    }

    pub fn residue(self) -> Option<u64> {
        (!self.is_poisoned()).then_some(self.0)
    }

    pub fn from_bigint(n: &BigInt) -> Self {
        let p = BigInt::from(P);
        let r = n.mod_floor(&p);
        ModP(r.to_u64().expect("residue below modulus"))
    }

    /// Reduction of a rational; poisoned when `P` divides the denominator.
    pub fn from_rational(q: &BigRational) -> Self {
        let num = Self::from_bigint(q.numer());
        let den = Self::from_bigint(q.denom());
        num.over(&den)
    }

    fn mul_raw(a: u64, b: u64) -> u64 {
        ((a as u128 * b as u128) % P as u128) as u64
    }

    fn pow_raw(mut b: u64, mut e: u64) -> u64 {
        let mut acc = 1u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = Self::mul_raw(acc, b);
            }
            b = Self::mul_raw(b, b);
            e >>= 1;
        }
        acc
    }

    fn inv_raw(a: u64) -> Option<u64> {
        (a != 0).then(|| Self::pow_raw(a, P - 2))
    }
}

impl<const P: u64> fmt::Debug for ModP<P> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.residue() {
            Some(r) => write!(f, "{r} mod {P}"),
            None => write!(f, "poison mod {P}"),
        }
    }
}

impl<const P: u64> Semifield for ModP<P> {
    fn one() -> Self {
        ModP(1)
    }

    fn plus(&self, rhs: &Self) -> Self {
        if self.is_poisoned() || rhs.is_poisoned() {
            return Self::poisoned();
        }
        ModP(((self.0 as u128 + rhs.0 as u128) % P as u128) as u64)
    }

    fn times(&self, rhs: &Self) -> Self {
        if self.is_poisoned() || rhs.is_poisoned() {
            return Self::poisoned();
        }
        ModP(Self::mul_raw(self.0, rhs.0))
    }

    fn over(&self, rhs: &Self) -> Self {
        if self.is_poisoned() || rhs.is_poisoned() {
            return Self::poisoned();
        }
        match Self::inv_raw(rhs.0) {
            Some(inv) => ModP(Self::mul_raw(self.0, inv)),
            None => Self::poisoned(),
        }
    }

    fn powi(&self, e: i64) -> Self {
        if self.is_poisoned() {
            return *self;
        }
        let base = if e < 0 {
            match Self::inv_raw(self.0) {
                Some(inv) => inv,
                None => return Self::poisoned(),
            }
        } else {
            self.0
        };
        ModP(Self::pow_raw(base, e.unsigned_abs()))
    }

    fn is_admissible(&self) -> bool {
        !self.is_poisoned() && self.0 != 0
    }
}

/// Ordered fields that carry tropical coordinates.
pub trait TropicalScalar:
    Num + Clone + PartialOrd + Signed + FromPrimitive + fmt::Debug + Send + Sync
{
    fn to_f64_lossy(&self) -> f64;

    /// Tolerance used when testing signs of values of size `scale`: zero
    /// for exact scalars.
    fn sign_slack(scale: &Self) -> Self;
}

impl TropicalScalar for BigRational {
    fn to_f64_lossy(&self) -> f64 {
        if let Some(v) = self.to_f64() {
            if v.is_finite() {
                return v;
            }
        }
        let (n, d) = (self.numer(), self.denom());
        let sign = if self.is_negative() { -1.0 } else { 1.0 };
        sign * (ln_bigint(n) - ln_bigint(d)).exp()
    }

    fn sign_slack(_: &Self) -> Self {
        BigRational::zero()
    }
}

impl TropicalScalar for f64 {
    fn to_f64_lossy(&self) -> f64 {
        *self
    }

    fn sign_slack(scale: &Self) -> Self {
        1e-12 * scale.abs()
    }
}

/// Natural logarithm of a positive coordinate, computed without leaving
/// the range of binary64.
pub trait LogMagnitude {
    fn ln_value(&self) -> f64;
}

impl LogMagnitude for BigRational {
    fn ln_value(&self) -> f64 {
        ln_bigint(self.numer()) - ln_bigint(self.denom())
    }
}

impl LogMagnitude for f64 {
    fn ln_value(&self) -> f64 {
        self.ln()
    }
}

impl LogMagnitude for f32 {
    fn ln_value(&self) -> f64 {
        (*self as f64).ln()
    }
}

impl LogMagnitude for LogReal {
    fn ln_value(&self) -> f64 {
        self.0
    }
}

/// `ln |n|`, accurate for integers far beyond the range of binary64.
pub fn ln_bigint(n: &BigInt) -> f64 {
    let bits = n.bits();
    if bits <= 1000 {
        return n.abs().to_f64().unwrap_or(f64::NAN).ln();
    }
    let shift = bits - 64;
    let top = (n.abs() >> shift).to_f64().unwrap_or(f64::NAN);
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

/// An element of the max-plus semifield: `plus` is max, `times` is +.
///
/// Running a subtraction-free formula over `Tropical<T>` computes its
/// tropical limit exactly.
#[derive(Clone, PartialEq)]
pub struct Tropical<T>(pub T);

impl<T: fmt::Debug> fmt::Debug for Tropical<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "t{:?}", self.0)
    }
}

impl<T: TropicalScalar> Semifield for Tropical<T> {
    fn one() -> Self {
        Tropical(T::zero())
    }

    fn plus(&self, rhs: &Self) -> Self {
        match self.0.partial_cmp(&rhs.0) {
            Some(Ordering::Less) => rhs.clone(),
            _ => self.clone(),
        }
    }

    fn times(&self, rhs: &Self) -> Self {
        Tropical(self.0.clone() + rhs.0.clone())
    }

    fn over(&self, rhs: &Self) -> Self {
        Tropical(self.0.clone() - rhs.0.clone())
    }

    fn powi(&self, e: i64) -> Self {
        let k = T::from_i64(e).expect("exponent representable");
        Tropical(self.0.clone() * k)
    }

    fn is_admissible(&self) -> bool {
        self.0.to_f64_lossy().is_finite()
    }
}

/// Parses `"p/q"` or `"p"` into an exact rational.
pub fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let num: BigInt = num.parse().ok()?;
    let den: BigInt = den.parse().ok()?;
    if den.is_zero() {
        return None;
    }
    Some(BigRational::new(num, den))
}

/// Formats a rational as `"p/q"`, or `"p"` when integral.
pub fn format_rational(q: &BigRational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

pub fn rational(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn integer(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Bit length of the larger of numerator and denominator.
pub fn height_bits(q: &BigRational) -> u64 {
    q.numer().bits().max(q.denom().bits())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log_real_matches_float_arithmetic() {
        let a = LogReal::from_value(3.0);
        let b = LogReal::from_value(5.0);
        assert!((a.plus(&b).value() - 8.0).abs() < 1e-12);
        assert!((a.times(&b).value() - 15.0).abs() < 1e-12);
        assert!((a.powi(-2).value() - 1.0 / 9.0).abs() < 1e-12);
    }

    #[test]
    fn mod_p_division_by_zero_poisons() {
        let z = ModP::<M61>::new(0);
        let one = ModP::<M61>::one();
        let q = one.over(&z);
        assert!(q.is_poisoned());
        assert!(q.plus(&one).is_poisoned());
        assert_eq!(ModP::<M61>::new(3).over(&ModP::new(3)), one);
    }

    #[test]
    fn mod_p_reduces_rationals() {
        let q = rational(2, 3);
        let r = ModP::<M61>::from_rational(&q);
        assert_eq!(r.times(&ModP::new(3)), ModP::new(2));
        let neg = ModP::<M61>::from_rational(&rational(-1, 1));
        assert_eq!(neg.plus(&ModP::one()), ModP::new(0));
    }

    #[test]
    fn tropical_is_max_plus() {
        let a = Tropical(integer(2));
        let b = Tropical(integer(-5));
        assert_eq!(a.plus(&b), a);
        assert_eq!(a.times(&b), Tropical(integer(-3)));
        assert_eq!(b.powi(-2), Tropical(integer(10)));
        assert_eq!(<Tropical<BigRational> as Semifield>::one(), Tropical(integer(0)));
    }

    #[test]
    fn logs_of_huge_rationals() {
        let big = BigRational::from_integer(BigInt::from(3).pow(2000));
        assert!((big.ln_value() - 2000.0 * 3f64.ln()).abs() < 1e-9);
        assert!((rational(1, 8).ln_value() + 3.0 * 2f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn rational_text_round_trip() {
        assert_eq!(parse_rational("-3/6"), Some(rational(-1, 2)));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(parse_rational("x"), None);
        assert_eq!(format_rational(&rational(4, 2)), "2");
        assert_eq!(format_rational(&rational(-1, 2)), "-1/2");
    }
}
