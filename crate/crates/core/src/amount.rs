//! Integer amount helpers: exact-to-float conversion and the string-encoded
//! integer serde format used by every input and output file.

use num_bigint::{BigInt, BigUint, Sign};
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

/// Token amounts are kept in base units with arbitrary precision.
pub type Amount = BigUint;

/// Converts `num / den` to the nearest-ish `f64` without going through
/// lossy intermediate floats. The result is within one ulp.
pub fn ratio_to_f64(num: &BigUint, den: &BigUint) -> f64 {
    assert!(!den.is_zero(), "zero denominator");
    if num.is_zero() {
        return 0.0;
    }
    // Scale so the integer quotient carries ~64 significant bits.
    let shift = den.bits() as i64 - num.bits() as i64 + 64;
    let q = if shift >= 0 {
        (num << shift as u64) / den
    } else {
        num / (den << (-shift) as u64)
    };
    let q = q.to_f64().unwrap_or(f64::INFINITY);
    scale_pow2(q, -shift)
}

pub fn bigrational_to_f64(value: &BigRational) -> f64 {
    let (sign, num) = to_unsigned(value.numer());
    let (_, den) = to_unsigned(value.denom());
    let magnitude = ratio_to_f64(&num, &den);
    if sign == Sign::Minus {
        -magnitude
    } else {
        magnitude
    }
}

fn to_unsigned(v: &BigInt) -> (Sign, BigUint) {
    (v.sign(), v.magnitude().clone())
}

fn scale_pow2(x: f64, exp: i64) -> f64 {
    // powi saturates outside [-1074, 1023]; split the exponent to stay in range.
    let mut x = x;
    let mut e = exp;
    while e > 1000 {
        x *= 2f64.powi(1000);
        e -= 1000;
    }
    while e < -1000 {
        x *= 2f64.powi(-1000);
        e += 1000;
    }
    x * 2f64.powi(e as i32)
}

/// Converts an amount in base units into whole tokens.
pub fn to_whole_units(amount: &BigUint, decimals: u8) -> f64 {
    ratio_to_f64(amount, &BigUint::from(10u32).pow(decimals as u32))
}

/// Converts a signed amount in base units into whole tokens.
pub fn signed_to_whole_units(amount: &BigInt, decimals: u8) -> f64 {
    let whole = to_whole_units(amount.magnitude(), decimals);
    if amount.sign() == Sign::Minus {
        -whole
    } else {
        whole
    }
}

/// Serde adapters for integers written as decimal strings. Deserialization
/// also accepts plain JSON numbers.
pub mod dec_str {
    use serde::de::{self, Visitor};
    use serde::{Deserializer, Serializer};
    use std::fmt;
    use std::str::FromStr;

    pub fn serialize<T: fmt::Display, S: Serializer>(v: &T, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(v)
    }

    pub fn deserialize<'de, T, D>(d: D) -> Result<T, D::Error>
    where
        T: FromStr + From<u64>,
        D: Deserializer<'de>,
    {
        struct V<T>(std::marker::PhantomData<T>);
        impl<T: FromStr + From<u64>> Visitor<'_> for V<T> {
            type Value = T;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a non-negative integer or a decimal string")
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> Result<T, E> {
                Ok(T::from(v))
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> Result<T, E> {
                u64::try_from(v)
                    .map(T::from)
                    .map_err(|_| E::custom(format!("negative integer {v}")))
            }
            fn visit_str<E: de::Error>(self, v: &str) -> Result<T, E> {
                if v.is_empty() || !v.bytes().all(|b| b.is_ascii_digit()) {
                    return Err(E::custom(format!("invalid decimal integer {v:?}")));
                }
                T::from_str(v).map_err(|_| E::custom(format!("integer out of range {v:?}")))
            }
        }
        d.deserialize_any(V(std::marker::PhantomData))
    }
}

/// Signed variant of [`dec_str`] for gains that may be negative.
pub mod signed_dec_str {
    use num_bigint::BigInt;
    use serde::{Deserialize, Deserializer, Serializer};
    use std::str::FromStr;

    pub fn serialize<S: Serializer>(v: &BigInt, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(v)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigInt, D::Error> {
        let s = String::deserialize(d)?;
        BigInt::from_str(&s).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ratio_conversion_is_accurate() {
        let n = BigUint::from(1u32);
        let d = BigUint::from(3u32);
        assert_eq!(ratio_to_f64(&n, &d), 1.0 / 3.0);
        let big = BigUint::from(10u32).pow(40);
        let r = ratio_to_f64(&big, &BigUint::from(7u32));
        assert!((r / (1e40 / 7.0) - 1.0).abs() < 1e-15);
        let tiny = ratio_to_f64(&BigUint::from(1u32), &BigUint::from(10u32).pow(330));
        assert!(tiny == 0.0 || tiny < 1e-320);
    }

    #[test]
    fn whole_units() {
        let one_eth = BigUint::from(10u64).pow(18);
        assert_eq!(to_whole_units(&one_eth, 18), 1.0);
        assert_eq!(to_whole_units(&BigUint::from(1_500_000u64), 6), 1.5);
    }
}
