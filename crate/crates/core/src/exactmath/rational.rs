//! Exact rational scalars and their text forms.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::MathError;

/// Exact rational scalar, always kept in lowest terms with a positive denominator.
pub type Rational = BigRational;

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Parses `p/q`, a plain integer, or a terminating decimal such as `0.25`.
pub fn parse_rational(s: &str) -> Result<Rational, MathError> {
    let s = s.trim();
    let bad = || MathError::Parse(s.to_string());
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| bad())?;
        let q: BigInt = q.trim().parse().map_err(|_| bad())?;
        if q.is_zero() {
            return Err(bad());
        }
        return Ok(Rational::new(p, q));
    }
    if let Some((whole, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.chars().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let neg = whole.starts_with('-');
        let whole_digits = whole.trim_start_matches(['-', '+']);
        let digits = format!("{}{}", if whole_digits.is_empty() { "0" } else { whole_digits }, frac);
        let num: BigInt = digits.parse().map_err(|_| bad())?;
        let den = num_traits::pow(BigInt::from(10), frac.len());
        let r = Rational::new(num, den);
        return Ok(if neg { -r } else { r });
    }
    let p: BigInt = s.parse().map_err(|_| bad())?;
    Ok(Rational::from_integer(p))
}

/// Parses a comma-separated vector of rationals.
pub fn parse_vector(s: &str) -> Result<Vec<Rational>, MathError> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',').map(parse_rational).collect()
}

/// `p/q`, or just `p` when the value is an integer.
pub fn fmt_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Always `p/q`, used by the canonical polynomial serialization.
pub fn fmt_rational_pq(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

pub fn fmt_vector(v: &[Rational]) -> String {
    v.iter().map(fmt_rational).collect::<Vec<_>>().join(",")
}

/// Nearest `f64`, correctly rounded for moderate sizes.
pub fn to_f64(r: &Rational) -> f64 {
    if let (Some(n), Some(d)) = (r.numer().to_i64(), r.denom().to_i64()) {
        if n.unsigned_abs() < (1 << 53) && d < (1 << 53) {
            return n as f64 / d as f64;
        }
    }
    // Scale so the quotient keeps 64 significant bits before rounding.
    let num = r.numer().abs();
    let den = r.denom().clone();
    let shift = num.bits() as i64 - den.bits() as i64 - 64;
    let q = if shift >= 0 { &num / (&den << shift as usize) } else { (&num << (-shift) as usize) / &den };
    let v = q.to_f64().unwrap_or(f64::INFINITY) * 2f64.powi(shift as i32);
    if r.is_negative() {
        -v
    } else {
        v
    }
}

pub fn factorial(n: u32) -> BigInt {
    (1..=n as u64).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

pub fn rational_factorial(n: u32) -> Rational {
    Rational::from_integer(factorial(n))
}

/// `(2k-1)!!` with the convention `(-1)!! = 1`.
pub fn double_factorial_odd(k: i64) -> BigInt {
    let mut acc = BigInt::one();
    let mut m = 2 * k - 1;
    while m > 1 {
        acc *= BigInt::from(m);
        m -= 2;
    }
    acc
}

pub fn min_rational<'a>(a: &'a Rational, b: &'a Rational) -> &'a Rational {
    if a <= b {
        a
    } else {
        b
    }
}

pub fn max_rational<'a>(a: &'a Rational, b: &'a Rational) -> &'a Rational {
    if a >= b {
        a
    } else {
        b
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_common_forms() {
        assert_eq!(parse_rational("3/2").unwrap(), rat(3, 2));
        assert_eq!(parse_rational("-4/8").unwrap(), rat(-1, 2));
        assert_eq!(parse_rational("7").unwrap(), int(7));
        assert_eq!(parse_rational("0.25").unwrap(), rat(1, 4));
        assert_eq!(parse_rational("-1.5").unwrap(), rat(-3, 2));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
        assert_eq!(parse_vector("0,0,0,3/2").unwrap().len(), 4);
    }

    #[test]
    fn formats() {
        assert_eq!(fmt_rational(&rat(-1, 4)), "-1/4");
        assert_eq!(fmt_rational(&int(3)), "3");
        assert_eq!(fmt_rational_pq(&int(3)), "3/1");
    }

    #[test]
    fn float_conversion() {
        assert_eq!(to_f64(&rat(3, 8)), 0.375);
        let big = Rational::new(BigInt::from(10).pow(40) + 1, BigInt::from(10).pow(40));
        assert!((to_f64(&big) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn double_factorials() {
        assert_eq!(double_factorial_odd(0), BigInt::from(1));
        assert_eq!(double_factorial_odd(3), BigInt::from(15));
    }
}
