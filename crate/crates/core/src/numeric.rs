//! Exact rational helpers.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

pub fn rat(num: i128, den: i128) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(v: usize) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

/// `H(j) = 1 + 1/2 + ... + 1/j`, with `H(0) = 0`.
pub fn harmonic(j: usize) -> BigRational {
    (1..=j).fold(BigRational::zero(), |acc, i| acc + rat(1, i as i128))
}

pub fn lcm_upto(k: usize) -> Option<i128> {
    let mut acc: i128 = 1;
    for i in 1..=k as i128 {
        acc = (acc / acc.gcd(&i)).checked_mul(i)?;
    }
    Some(acc)
}

/// `"p/q"`, or just `"p"` for integers.
pub fn fmt_ratio(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn parse_ratio(s: &str) -> Option<BigRational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((p, q)) => {
            let q: BigInt = q.trim().parse().ok()?;
            if q.is_zero() {
                return None;
            }
            Some(BigRational::new(p.trim().parse().ok()?, q))
        }
        None => Some(BigRational::from_integer(s.parse().ok()?)),
    }
}

pub fn to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Decimal rendering with 15 significant digits.
pub fn fmt_decimal(r: &BigRational) -> String {
    let x = to_f64(r);
    let s = format!("{:.*e}", 14, x);
    let v: f64 = s.parse().unwrap_or(x);
    format!("{v}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_values() {
        assert_eq!(harmonic(0), rat(0, 1));
        assert_eq!(harmonic(4), rat(25, 12));
    }

    #[test]
    fn lcm_values() {
        assert_eq!(lcm_upto(4), Some(12));
        assert_eq!(lcm_upto(10), Some(2520));
        assert_eq!(lcm_upto(0), Some(1));
    }

    #[test]
    fn ratio_text() {
        assert_eq!(fmt_ratio(&rat(10, 4)), "5/2");
        assert_eq!(fmt_ratio(&rat(4, 2)), "2");
        assert_eq!(parse_ratio("5/2"), Some(rat(5, 2)));
        assert_eq!(parse_ratio("3"), Some(rat(3, 1)));
        assert_eq!(parse_ratio("1/0"), None);
        assert_eq!(fmt_decimal(&rat(1, 3)), "0.333333333333333");
        assert_eq!(fmt_decimal(&rat(1, 2)), "0.5");
    }
}
