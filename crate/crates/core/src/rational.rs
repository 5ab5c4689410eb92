//! Exact rational arithmetic for edge parameters and distances.

use alloc::string::String;
use core::str::FromStr;

use num_rational::Ratio;
use num_traits::{One, Zero};

/// Exact rational number. Edge parameters, distances and builder outputs are
/// all carried in this type.
pub type Q = Ratio<i128>;

pub fn q(num: i128, den: i128) -> Q {
    Ratio::new(num, den)
}

pub fn int(n: i128) -> Q {
    Ratio::from_integer(n)
}

pub fn zero() -> Q {
    Q::zero()
}

pub fn one() -> Q {
    Q::one()
}

pub fn half() -> Q {
    q(1, 2)
}

/// Parses `"3/4"`, `"2"` or a finite decimal such as `"0.25"`.
pub fn parse(s: &str) -> Option<Q> {
    let s = s.trim();
    if let Some((int_part, frac_part)) = s.split_once('.') {
        if frac_part.is_empty() || frac_part.len() > 30 || !frac_part.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        let neg = int_part.starts_with('-');
        let whole = if int_part.is_empty() || int_part == "-" {
            0
        } else {
            i128::from_str(int_part).ok()?
        };
        let den = 10i128.checked_pow(frac_part.len() as u32)?;
        let frac = i128::from_str(frac_part).ok()?;
        let mag = whole.checked_abs()?.checked_mul(den)?.checked_add(frac)?;
        return Some(Ratio::new(if neg { -mag } else { mag }, den));
    }
    Q::from_str(s).ok()
}

pub fn format(x: &Q) -> String {
    alloc::format!("{}", x)
}

pub fn to_f64(x: &Q) -> f64 {
    *x.numer() as f64 / *x.denom() as f64
}

pub fn min(a: Q, b: Q) -> Q {
    if a <= b {
        a
    } else {
        b
    }
}

pub fn max(a: Q, b: Q) -> Q {
    if a >= b {
        a
    } else {
        b
    }
}

pub fn abs(a: Q) -> Q {
    if a < zero() {
        -a
    } else {
        a
    }
}

/// Largest integer not above `x`.
pub fn floor(x: &Q) -> i128 {
    x.floor().to_integer()
}
