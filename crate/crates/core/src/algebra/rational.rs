//! Exact rational helpers on top of [`BigRational`].

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::AlgebraError;

pub type Rational = BigRational;

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Nearest `f64`; values beyond the `f64` range saturate to infinity.
pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or_else(|| if r.is_negative() { f64::NEG_INFINITY } else { f64::INFINITY })
}

/// Exact rational value of a finite double.
pub fn from_f64(x: f64) -> Option<Rational> {
    Rational::from_float(x)
}

/// Serializes as `num/den`, always with an explicit denominator.
pub fn format_rational(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Parses `num/den`, an integer, or an exact decimal such as `-1.25e-3`.
pub fn parse_rational(text: &str) -> Result<Rational, AlgebraError> {
    let s = text.trim();
    let invalid = || AlgebraError::InvalidRational(text.to_string());
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| invalid())?;
        let d: BigInt = d.trim().parse().map_err(|_| invalid())?;
        if d.is_zero() {
            return Err(invalid());
        }
        return Ok(Rational::new(n, d));
    }
    parse_decimal(s).ok_or_else(invalid)
}

/// Exact conversion of a decimal literal: `d` fractional digits become a
/// denominator of `10^d`, and an exponent scales by a power of ten.
pub fn parse_decimal(s: &str) -> Option<Rational> {
    let (negative, body) = match s.as_bytes().first()? {
        b'-' => (true, &s[1..]),
        b'+' => (false, &s[1..]),
        _ => (false, s),
    };
    let (mantissa, exponent) = match body.find(['e', 'E']) {
        Some(pos) => (&body[..pos], body[pos + 1..].parse::<i32>().ok()?),
        None => (body, 0),
    };
    let (int_part, frac_part) = match mantissa.split_once('.') {
        Some((i, f)) => (i, f),
        None => (mantissa, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.bytes().chain(frac_part.bytes()).all(|b| b.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    let numer: BigInt = if digits.is_empty() { BigInt::zero() } else { digits.parse().ok()? };
    let scale = exponent - frac_part.len() as i32;
    let ten = BigInt::from(10u32);
    let mut value = if scale >= 0 {
        Rational::from_integer(numer * num_traits::pow(ten, scale as usize))
    } else {
        Rational::new(numer, num_traits::pow(ten, (-scale) as usize))
    };
    if negative {
        value = -value;
    }
    Some(value)
}

/// Whether `r` has a terminating decimal expansion (denominator `2^a 5^b`).
pub fn is_terminating(r: &Rational) -> bool {
    let mut d = r.denom().clone();
    let two = BigInt::from(2u32);
    let five = BigInt::from(5u32);
    while (&d % &two).is_zero() {
        d /= &two;
    }
    while (&d % &five).is_zero() {
        d /= &five;
    }
    d.is_one()
}

/// Exact decimal text of a terminating rational (`None` otherwise).
pub fn to_decimal_string(r: &Rational) -> Option<String> {
    if !is_terminating(r) {
        return None;
    }
    if r.is_integer() {
        return Some(r.numer().to_string());
    }
    let mut places = 0usize;
    let ten = BigInt::from(10u32);
    let mut scaled = r.abs();
    while !scaled.is_integer() {
        scaled *= Rational::from_integer(ten.clone());
        places += 1;
    }
    let digits = scaled.to_integer().to_string();
    let digits =
        if digits.len() <= places { format!("{}{}", "0".repeat(places - digits.len() + 1), digits) } else { digits };
    let split = digits.len() - places;
    let sign = if r.is_negative() { "-" } else { "" };
    Some(format!("{sign}{}.{}", &digits[..split], &digits[split..]))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decimals_are_exact() {
        assert_eq!(parse_rational("0.25").unwrap(), ratio(1, 4));
        assert_eq!(parse_rational("-1.5").unwrap(), ratio(-3, 2));
        assert_eq!(parse_rational("1e-6").unwrap(), ratio(1, 1_000_000));
        assert_eq!(parse_rational(".5").unwrap(), ratio(1, 2));
        assert_eq!(parse_rational("12").unwrap(), int(12));
        assert_eq!(parse_rational("2.5E2").unwrap(), int(250));
        // 0.1 is exactly one tenth, not the nearest double.
        assert_eq!(parse_rational("0.1").unwrap(), ratio(1, 10));
    }

    #[test]
    fn fraction_syntax() {
        assert_eq!(parse_rational("6/4").unwrap(), ratio(3, 2));
        assert_eq!(parse_rational("-1/3").unwrap(), ratio(-1, 3));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational("").is_err());
        assert!(parse_rational("1.2.3").is_err());
    }

    #[test]
    fn format_round_trip() {
        for r in [ratio(-7, 3), int(0), int(5), ratio(1, 1_000_000)] {
            assert_eq!(parse_rational(&format_rational(&r)).unwrap(), r);
        }
        assert_eq!(format_rational(&int(4)), "4/1");
    }

    #[test]
    fn decimal_rendering() {
        assert_eq!(to_decimal_string(&ratio(1, 4)).unwrap(), "0.25");
        assert_eq!(to_decimal_string(&ratio(-3, 2)).unwrap(), "-1.5");
        assert_eq!(to_decimal_string(&ratio(1, 1_000_000)).unwrap(), "0.000001");
        assert_eq!(to_decimal_string(&int(-3)).unwrap(), "-3");
        assert_eq!(to_decimal_string(&ratio(1, 3)), None);
    }
}
