use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::{self, SeqAccess, Visitor};
use serde::ser::SerializeSeq;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

pub type Rational = BigRational;

/// Gaussian rational: an element of Q(i) stored as exact real and imaginary
/// rational parts. The coefficient field for every exact computation here.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ExactComplex {
    pub re: Rational,
    pub im: Rational,
}

impl ExactComplex {
    pub fn new(re: Rational, im: Rational) -> Self {
        ExactComplex { re, im }
    }

    pub fn zero() -> Self {
        ExactComplex { re: Rational::zero(), im: Rational::zero() }
    }

    pub fn one() -> Self {
        ExactComplex { re: Rational::one(), im: Rational::zero() }
    }

    pub fn i() -> Self {
        ExactComplex { re: Rational::zero(), im: Rational::one() }
    }

    pub fn from_int(v: i64) -> Self {
        ExactComplex { re: Rational::from_integer(BigInt::from(v)), im: Rational::zero() }
    }

    pub fn from_ratio(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        ExactComplex {
            re: Rational::new(BigInt::from(num), BigInt::from(den)),
            im: Rational::zero(),
        }
    }

    pub fn from_parts(re_num: i64, re_den: i64, im_num: i64, im_den: i64) -> Self {
        assert!(re_den != 0 && im_den != 0, "zero denominator");
        ExactComplex {
            re: Rational::new(BigInt::from(re_num), BigInt::from(re_den)),
            im: Rational::new(BigInt::from(im_num), BigInt::from(im_den)),
        }
    }

    pub fn from_real(re: Rational) -> Self {
        ExactComplex { re, im: Rational::zero() }
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        ExactComplex { re: self.re.clone(), im: -self.im.clone() }
    }

    /// |z|^2 as an exact non-negative rational.
    pub fn norm_sqr(&self) -> Rational {
        &self.re * &self.re + &self.im * &self.im
    }

    /// Exact multiplicative inverse. Panics on zero; callers guard.
    pub fn inv(&self) -> Self {
        let n = self.norm_sqr();
        assert!(!n.is_zero(), "division by zero Gaussian rational");
        ExactComplex { re: &self.re / &n, im: -&self.im / &n }
    }

    pub fn scale(&self, r: &Rational) -> Self {
        ExactComplex { re: &self.re * r, im: &self.im * r }
    }

    pub fn to_f64(&self) -> Complex64 {
        Complex64::new(rational_to_f64(&self.re), rational_to_f64(&self.im))
    }
}

/// Lossy but overflow-safe conversion for the numeric oracles.
pub fn rational_to_f64(r: &Rational) -> f64 {
    if let Some(v) = r.to_f64() {
        if v.is_finite() {
            return v;
        }
    }
    // Fallback for operands outside f64 range: scale both parts down.
    let num = r.numer();
    let den = r.denom();
    let shift = (num.bits().max(den.bits()) as i64 - 900).max(0) as u64;
    let num = num >> shift;
    let den = den >> shift;
    let n = num.to_f64().unwrap_or(if num.is_negative() { f64::MIN } else { f64::MAX });
    let d = den.to_f64().unwrap_or(f64::MAX);
    n / d
}

impl Add for &ExactComplex {
    type Output = ExactComplex;
    fn add(self, rhs: &ExactComplex) -> ExactComplex {
        ExactComplex { re: &self.re + &rhs.re, im: &self.im + &rhs.im }
    }
}

impl Sub for &ExactComplex {
    type Output = ExactComplex;
    fn sub(self, rhs: &ExactComplex) -> ExactComplex {
        ExactComplex { re: &self.re - &rhs.re, im: &self.im - &rhs.im }
    }
}

impl Mul for &ExactComplex {
    type Output = ExactComplex;
    fn mul(self, rhs: &ExactComplex) -> ExactComplex {
        ExactComplex {
            re: &self.re * &rhs.re - &self.im * &rhs.im,
            im: &self.re * &rhs.im + &self.im * &rhs.re,
        }
    }
}

impl Div for &ExactComplex {
    type Output = ExactComplex;
    fn div(self, rhs: &ExactComplex) -> ExactComplex {
        self * &rhs.inv()
    }
}

impl Neg for &ExactComplex {
    type Output = ExactComplex;
    fn neg(self) -> ExactComplex {
        ExactComplex { re: -self.re.clone(), im: -self.im.clone() }
    }
}

macro_rules! forward_owned {
    ($trait:ident, $method:ident) => {
        impl $trait for ExactComplex {
            type Output = ExactComplex;
            fn $method(self, rhs: ExactComplex) -> ExactComplex {
                (&self).$method(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);

impl Neg for ExactComplex {
    type Output = ExactComplex;
    fn neg(self) -> ExactComplex {
        -&self
    }
}

impl AddAssign<&ExactComplex> for ExactComplex {
    fn add_assign(&mut self, rhs: &ExactComplex) {
        self.re += &rhs.re;
        self.im += &rhs.im;
    }
}

impl SubAssign<&ExactComplex> for ExactComplex {
    fn sub_assign(&mut self, rhs: &ExactComplex) {
        self.re -= &rhs.re;
        self.im -= &rhs.im;
    }
}

impl MulAssign<&ExactComplex> for ExactComplex {
    fn mul_assign(&mut self, rhs: &ExactComplex) {
        *self = (&*self) * rhs;
    }
}

impl fmt::Debug for ExactComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for ExactComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            write!(f, "{}", self.re)
        } else if self.re.is_zero() {
            write!(f, "{}i", self.im)
        } else if self.im.is_negative() {
            write!(f, "{}{}i", self.re, self.im)
        } else {
            write!(f, "{}+{}i", self.re, self.im)
        }
    }
}

fn bigint_wire_ser<S: Serializer>(v: &BigInt, seq: &mut S::SerializeSeq) -> Result<(), S::Error> {
    // Integers that fit i64 travel as JSON numbers, larger ones as strings.
    if let Some(small) = v.to_i64() {
        seq.serialize_element(&small)
    } else {
        seq.serialize_element(&v.to_string())
    }
}

/// Wire format: `[re_num, re_den, im_num, im_den]`, each entry an integer or
/// a decimal string when outside i64 range.
impl Serialize for ExactComplex {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(4))?;
        bigint_wire_ser::<S>(self.re.numer(), &mut seq)?;
        bigint_wire_ser::<S>(self.re.denom(), &mut seq)?;
        bigint_wire_ser::<S>(self.im.numer(), &mut seq)?;
        bigint_wire_ser::<S>(self.im.denom(), &mut seq)?;
        seq.end()
    }
}

struct WireInt(BigInt);

impl<'de> Deserialize<'de> for WireInt {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct V;
        impl<'de> Visitor<'de> for V {
            type Value = WireInt;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("an integer or a decimal string")
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> Result<WireInt, E> {
                Ok(WireInt(BigInt::from(v)))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> Result<WireInt, E> {
                Ok(WireInt(BigInt::from(v)))
            }
            fn visit_str<E: de::Error>(self, v: &str) -> Result<WireInt, E> {
                v.parse::<BigInt>().map(WireInt).map_err(|_| E::custom("bad integer string"))
            }
        }
        deserializer.deserialize_any(V)
    }
}

impl<'de> Deserialize<'de> for ExactComplex {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct V;
        impl<'de> Visitor<'de> for V {
            type Value = ExactComplex;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a [re_num, re_den, im_num, im_den] quadruple")
            }
            fn visit_seq<A: SeqAccess<'de>>(self, mut seq: A) -> Result<ExactComplex, A::Error> {
                let mut next = |what: &str| -> Result<BigInt, A::Error> {
                    seq.next_element::<WireInt>()?
                        .map(|w| w.0)
                        .ok_or_else(|| de::Error::custom(format!("missing {what}")))
                };
                let re_num = next("re_num")?;
                let re_den = next("re_den")?;
                let im_num = next("im_num")?;
                let im_den = next("im_den")?;
                if re_den.is_zero() || im_den.is_zero() {
                    return Err(de::Error::custom("zero denominator"));
                }
                if seq.next_element::<serde_ignored_any::Any>()?.is_some() {
                    return Err(de::Error::custom("quadruple has more than four entries"));
                }
                Ok(ExactComplex::new(
                    Rational::new(re_num, re_den),
                    Rational::new(im_num, im_den),
                ))
            }
        }
        deserializer.deserialize_seq(V)
    }
}

mod serde_ignored_any {
    use serde::{Deserialize, Deserializer};

    pub struct Any;
    impl<'de> Deserialize<'de> for Any {
        fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
            serde::de::IgnoredAny::deserialize(d).map(|_| Any)
        }
    }
}

/// Wire format for plain rationals: `[num, den]`.
pub fn serialize_rational<S: Serializer>(r: &Rational, serializer: S) -> Result<S::Ok, S::Error> {
    let mut seq = serializer.serialize_seq(Some(2))?;
    bigint_wire_ser::<S>(r.numer(), &mut seq)?;
    bigint_wire_ser::<S>(r.denom(), &mut seq)?;
    seq.end()
}

pub fn deserialize_rational<'de, D: Deserializer<'de>>(deserializer: D) -> Result<Rational, D::Error> {
    struct V;
    impl<'de> Visitor<'de> for V {
        type Value = Rational;
        fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
            f.write_str("a [num, den] pair")
        }
        fn visit_seq<A: SeqAccess<'de>>(self, mut seq: A) -> Result<Rational, A::Error> {
            let num = seq
                .next_element::<WireInt>()?
                .ok_or_else(|| de::Error::custom("missing numerator"))?
                .0;
            let den = seq
                .next_element::<WireInt>()?
                .ok_or_else(|| de::Error::custom("missing denominator"))?
                .0;
            if den.is_zero() {
                return Err(de::Error::custom("zero denominator"));
            }
            Ok(Rational::new(num, den))
        }
    }
    deserializer.deserialize_seq(V)
}

struct RationalWireRef<'a>(&'a Rational);

impl Serialize for RationalWireRef<'_> {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serialize_rational(self.0, serializer)
    }
}

struct RationalWire(Rational);

impl<'de> Deserialize<'de> for RationalWire {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        deserialize_rational(deserializer).map(RationalWire)
    }
}

/// Wire format for rational sequences: array of `[num, den]` pairs.
pub fn serialize_rational_vec<S: Serializer>(
    v: &[Rational],
    serializer: S,
) -> Result<S::Ok, S::Error> {
    let mut seq = serializer.serialize_seq(Some(v.len()))?;
    for r in v {
        seq.serialize_element(&RationalWireRef(r))?;
    }
    seq.end()
}

pub fn deserialize_rational_vec<'de, D: Deserializer<'de>>(
    deserializer: D,
) -> Result<Vec<Rational>, D::Error> {
    Vec::<RationalWire>::deserialize(deserializer).map(|v| v.into_iter().map(|w| w.0).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(a: i64, b: i64) -> ExactComplex {
        ExactComplex::from_parts(a, 1, b, 1)
    }

    #[test]
    fn field_arithmetic() {
        let x = ExactComplex::from_parts(1, 2, -1, 3);
        let y = c(2, 5);
        let prod = &x * &y;
        let back = &prod / &y;
        assert_eq!(back, x);
        assert_eq!(&x - &x, ExactComplex::zero());
        assert_eq!(&x * &x.inv(), ExactComplex::one());
    }

    #[test]
    fn conjugation_and_norm() {
        let x = c(3, 4);
        assert_eq!(x.norm_sqr(), Rational::from_integer(25.into()));
        assert_eq!(&x * &x.conj(), ExactComplex::from_int(25));
    }

    #[test]
    fn quadruple_round_trip() {
        let x = ExactComplex::from_parts(-7, 3, 22, 5);
        let json = serde_json::to_string(&x).unwrap();
        assert_eq!(json, "[-7,3,22,5]");
        let y: ExactComplex = serde_json::from_str(&json).unwrap();
        assert_eq!(x, y);
        // Oversized integers fall back to strings and still parse.
        let big = ExactComplex::new(
            Rational::new("123456789012345678901234567890".parse().unwrap(), 1.into()),
            Rational::zero(),
        );
        let json = serde_json::to_string(&big).unwrap();
        let z: ExactComplex = serde_json::from_str(&json).unwrap();
        assert_eq!(big, z);
    }
}
