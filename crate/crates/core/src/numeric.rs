//! Exact rationals and the base-2 logarithm conventions shared by every module.

use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{ToPrimitive, Zero};

/// Exact rational used for densities, degrees and skew parameters.
pub type Rational = Ratio<i64>;

/// `log2 n`, floored at 2.
pub fn log2_n(n: usize) -> f64 {
    (n.max(1) as f64).log2().max(2.0)
}

/// Integer version of [`log2_n`], rounded up. Used wherever the value feeds an
/// integral capacity.
pub fn log2_n_ceil(n: usize) -> u32 {
    let mut bits = 0u32;
    while bits < 64 && (1u128 << bits) < n as u128 {
        bits += 1;
    }
    bits.max(2)
}

/// `log2 log2 n`, floored at 1.
pub fn log2_log2_n(n: usize) -> f64 {
    log2_n(n).log2().max(1.0)
}

pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

pub fn ceil_to_i64(r: &Rational) -> i64 {
    r.ceil().to_integer()
}

/// Ceiling of a float that is known to be a rounded rational. Values within
/// `1e-9` of an integer snap to it.
pub fn ceil_snapped(x: f64) -> i64 {
    let r = x.round();
    if (x - r).abs() < 1e-9 {
        r as i64
    } else {
        x.ceil() as i64
    }
}

/// Rounds a float to the nearest multiple of `1e-9` and returns it exactly.
pub fn rational_from_f64(x: f64) -> Rational {
    const SCALE: i64 = 1_000_000_000;
    Rational::new((x * SCALE as f64).round() as i64, SCALE)
}

/// `p/q` or plain integer rendering, the format used in every text file.
pub struct RationalText<'a>(pub &'a Rational);

impl fmt::Display for RationalText<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if *self.0.denom() == 1 {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
#[error("cannot parse rational from {0:?}")]
pub struct ParseRationalError(pub String);

/// Parses `7`, `7/3` or a finite decimal such as `1.25`.
pub fn parse_rational(s: &str) -> Result<Rational, ParseRationalError> {
    let err = || ParseRationalError(s.to_string());
    let s = s.trim();
    if let Some((p, q)) = s.split_once('/') {
        let p = i64::from_str(p.trim()).map_err(|_| err())?;
        let q = i64::from_str(q.trim()).map_err(|_| err())?;
        if q.is_zero() {
            return Err(err());
        }
        return Ok(Rational::new(p, q));
    }
    if let Some((whole, frac)) = s.split_once('.') {
        if frac.len() > 12 || !frac.chars().all(|c| c.is_ascii_digit()) {
            return Err(err());
        }
        let neg = whole.starts_with('-');
        let w = if whole.is_empty() || whole == "-" {
            0
        } else {
            i64::from_str(whole).map_err(|_| err())?
        };
        let den = 10i64.pow(frac.len() as u32);
        let f = if frac.is_empty() {
            0
        } else {
            i64::from_str(frac).map_err(|_| err())?
        };
        let num = w.abs() * den + f;
        return Ok(Rational::new(if neg { -num } else { num }, den));
    }
    i64::from_str(s)
        .map(Rational::from_integer)
        .map_err(|_| err())
}

/// Smallest integer `>= r` for a nonnegative rational, as `u64`.
pub fn ceil_u64(r: &Rational) -> u64 {
    let (q, rem) = r.numer().div_rem(r.denom());
    (q + i64::from(rem > 0)) as u64
}
