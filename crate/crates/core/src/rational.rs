//! Exact rational helpers shared by the matrix engine and the symbolic forms.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Exact rational number.
pub type Q = BigRational;

pub fn q(num: i64, den: i64) -> Q {
    Q::new(BigInt::from(num), BigInt::from(den))
}

pub fn qi(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn zero() -> Q {
    Q::zero()
}

pub fn one() -> Q {
    Q::one()
}

/// Parses `p`, `p/q` or a finite decimal such as `-0.25`.
pub fn parse_q(s: &str) -> Result<Q> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational number: {s:?}"));
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(Q::new(n, d));
    }
    if let Some((int, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let neg = int.trim_start().starts_with('-');
        let int_val: BigInt = if int.is_empty() || int == "-" || int == "+" {
            BigInt::zero()
        } else {
            int.parse().map_err(|_| bad())?
        };
        let frac_val: BigInt = frac.parse().map_err(|_| bad())?;
        let scale = num_traits::pow(BigInt::from(10), frac.len());
        let mag = int_val.abs() * &scale + frac_val;
        let num = if neg { -mag } else { mag };
        return Ok(Q::new(num, scale));
    }
    let n: BigInt = s.parse().map_err(|_| bad())?;
    Ok(Q::from_integer(n))
}

/// Formats as `p/q` (or `p` for integers).
pub fn fmt_q(x: &Q) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn to_f64(x: &Q) -> f64 {
    match (x.numer().to_f64(), x.denom().to_f64()) {
        (Some(n), Some(d)) if n.is_finite() && d.is_finite() => n / d,
        _ => {
            // Shift both sides down to keep the quotient representable.
            let bits = x.numer().bits().max(x.denom().bits()) as i64 - 1000;
            let shift = bits.max(0) as usize;
            let n = (x.numer() >> shift).to_f64().unwrap_or(f64::NAN);
            let d = (x.denom() >> shift).to_f64().unwrap_or(f64::NAN);
            n / d
        }
    }
}

/// Best rational approximation of `x` with denominator at most `max_den`,
/// via continued-fraction convergents.
pub fn convergents(x: f64, max_den: i64) -> Vec<Q> {
    let mut out = Vec::new();
    if !x.is_finite() {
        return out;
    }
    let (mut h0, mut h1) = (BigInt::zero(), BigInt::one());
    let (mut k0, mut k1) = (BigInt::one(), BigInt::zero());
    let mut r = x;
    for _ in 0..64 {
        let a = r.floor();
        let ai = BigInt::from(a as i64);
        let h2 = &ai * &h1 + &h0;
        let k2 = &ai * &k1 + &k0;
        if k2 > BigInt::from(max_den) {
            break;
        }
        out.push(Q::new(h2.clone(), k2.clone()));
        h0 = std::mem::replace(&mut h1, h2);
        k0 = std::mem::replace(&mut k1, k2);
        let frac = r - a;
        if frac.abs() < 1e-15 {
            break;
        }
        r = 1.0 / frac;
        if !r.is_finite() || r.abs() > 1e15 {
            break;
        }
    }
    out
}

/// Least common multiple of the denominators.
pub fn common_denominator<'a>(xs: impl IntoIterator<Item = &'a Q>) -> BigInt {
    use num_integer::Integer;
    xs.into_iter()
        .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_forms() {
        assert_eq!(parse_q("3").unwrap(), qi(3));
        assert_eq!(parse_q("-6/4").unwrap(), q(-3, 2));
        assert_eq!(parse_q("-0.25").unwrap(), q(-1, 4));
        assert_eq!(parse_q("1.5").unwrap(), q(3, 2));
        assert!(parse_q("1/0").is_err());
        assert!(parse_q("x").is_err());
    }

    #[test]
    fn convergents_recover_fraction() {
        let c = convergents(355.0 / 113.0, 1000);
        assert!(c.contains(&q(355, 113)));
        let c = convergents(-7.0 / 12.0, 100);
        assert_eq!(c.last().unwrap(), &q(-7, 12));
    }

    #[test]
    fn format_roundtrip() {
        for x in [q(1, 2), q(-7, 3), qi(0), qi(-4)] {
            assert_eq!(parse_q(&fmt_q(&x)).unwrap(), x);
        }
    }
}
