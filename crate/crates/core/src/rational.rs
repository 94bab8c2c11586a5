//! Exact rational helpers shared by every module.

use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Rat = BigRational;

pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

pub fn from_big(n: &BigInt) -> Rat {
    Rat::from_integer(n.clone())
}

pub fn minus_one() -> Rat {
    -Rat::one()
}

pub fn big_pow(base: u64, exp: u64) -> BigInt {
    num_traits::pow(BigInt::from(base), exp as usize)
}

/// Returns the integer value of `x` if it has denominator one.
pub fn as_integer(x: &Rat) -> Option<BigInt> {
    x.is_integer().then(|| x.to_integer())
}

/// Writes `x` as `numerator/denominator`, always with an explicit denominator.
pub fn format_rational(x: &Rat) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

/// Parses `a/b` or a bare integer `a`.
pub fn parse_rational(s: &str) -> Result<Rat, String> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let num = BigInt::from_str(num).map_err(|_| format!("bad numerator in {s:?}"))?;
    let den = BigInt::from_str(den).map_err(|_| format!("bad denominator in {s:?}"))?;
    if den.is_zero() {
        return Err(format!("zero denominator in {s:?}"));
    }
    Ok(Rat::new(num, den))
}

pub fn parse_integer(s: &str) -> Result<BigInt, String> {
    BigInt::from_str(s.trim()).map_err(|_| format!("bad integer {s:?}"))
}

/// `Some(k)` when `value == base^k` with `k >= 0`.
pub fn exact_log(value: &BigInt, base: u64) -> Option<u32> {
    if !value.is_positive() || base < 2 {
        return None;
    }
    let base = BigInt::from(base);
    let mut v = value.clone();
    let mut k = 0;
    while !v.is_one() {
        let (q, r) = v.div_rem(&base);
        if !r.is_zero() {
            return None;
        }
        v = q;
        k += 1;
    }
    Some(k)
}

/// Largest `k` with `base^k | value` (value nonzero).
pub fn valuation(value: &BigInt, base: u64) -> u32 {
    let base = BigInt::from(base);
    let mut v = value.clone();
    let mut k = 0;
    while !v.is_zero() && (&v % &base).is_zero() {
        v /= &base;
        k += 1;
    }
    k
}

pub fn ceil_to_i64(x: &Rat) -> i64 {
    i64::try_from(x.ceil().to_integer()).expect("level index fits in i64")
}

pub fn floor_to_i64(x: &Rat) -> i64 {
    i64::try_from(x.floor().to_integer()).expect("level index fits in i64")
}

pub fn is_prime(p: u64) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| !p.is_multiple_of(d))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format() {
        assert_eq!(parse_rational("3/6").unwrap(), rat(1, 2));
        assert_eq!(parse_rational("-4").unwrap(), int(-4));
        assert_eq!(format_rational(&int(3)), "3/1");
        assert!(parse_rational("3/0").unwrap_err().contains("zero denominator"));
        assert!(parse_rational("x/2").is_err());
    }

    #[test]
    fn logs_and_valuations() {
        assert_eq!(exact_log(&BigInt::from(81), 3), Some(4));
        assert_eq!(exact_log(&BigInt::from(1), 5), Some(0));
        assert_eq!(exact_log(&BigInt::from(18), 3), None);
        assert_eq!(valuation(&BigInt::from(18), 3), 2);
        assert!(is_prime(7) && !is_prime(9) && !is_prime(1));
    }
}
