//! Rational scalars and a few integer sequences used across the crate.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Q = BigRational;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn q_frac(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

/// (2k-1)!! with the convention (-1)!! = 1.
pub fn double_factorial_odd(k: u32) -> BigInt {
    let mut acc = BigInt::one();
    let mut j = 1u64;
    for _ in 0..k {
        acc *= BigInt::from(j);
        j += 2;
    }
    acc
}

pub fn factorial(n: u32) -> BigInt {
    (1..=n as u64).fold(BigInt::one(), |acc, j| acc * BigInt::from(j))
}

/// `3/2`, `-1`, `0`.
pub fn render_q(x: &Q) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Coefficient as it appears in element text: negatives are parenthesised.
pub fn render_coeff(x: &Q) -> String {
    if x.is_negative() {
        format!("({})", render_q(x))
    } else {
        render_q(x)
    }
}

pub fn parse_q(s: &str) -> Option<Q> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        Some(Q::new(n, d))
    } else {
        let n: BigInt = s.parse().ok()?;
        Some(Q::from_integer(n))
    }
}

pub fn sign_q(negative: bool) -> Q {
    if negative {
        -Q::one()
    } else {
        Q::one()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn double_factorials() {
        let v: Vec<i64> = (0..7)
            .map(|k| double_factorial_odd(k).try_into().unwrap())
            .collect();
        assert_eq!(v, vec![1, 1, 3, 15, 105, 945, 10395]);
    }

    #[test]
    fn rational_text() {
        assert_eq!(render_q(&q_frac(3, 2)), "3/2");
        assert_eq!(render_coeff(&q(-1)), "(-1)");
        assert_eq!(parse_q(" 6/4 "), Some(q_frac(3, 2)));
        assert_eq!(parse_q("1/0"), None);
    }
}
