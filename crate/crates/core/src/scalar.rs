//! Scalar abstraction for accuracy arithmetic.
//!
//! Votes and reachability are small integers, so every accuracy is a
//! rational number. The qualification code is written once over
//! [`Scalar`] and can run on `f32`, `f64` or an exact [`Rational`].

use std::fmt;

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{FromPrimitive, Num, Signed, ToPrimitive, Zero};

/// Exact rational used for thresholds and accuracies in reports.
pub type Rational = Ratio<i64>;

/// Numeric type the qualification stage can compute in.
pub trait Scalar: Num + Clone + PartialOrd + FromPrimitive + ToPrimitive + fmt::Debug {
    /// Builds a scalar from an integer count.
    fn from_count(n: u64) -> Self {
        Self::from_u64(n).expect("count representable in scalar type")
    }

    /// Lossy view for display.
    fn to_f64_lossy(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl<T> Scalar for T where T: Num + Clone + PartialOrd + FromPrimitive + ToPrimitive + fmt::Debug {}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid decimal number {0:?}")]
pub struct DecimalError(pub String);

/// Parses plain decimal text ("75", "33.33", "-0.5") into an exact rational.
pub fn parse_decimal(text: &str) -> Result<Rational, DecimalError> {
    let err = || DecimalError(text.to_string());
    let s = text.trim();
    let (negative, digits) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let (int_part, frac_part) = match digits.split_once('.') {
        Some((i, f)) => (i, f),
        None => (digits, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(err());
    }
    if !int_part
        .bytes()
        .chain(frac_part.bytes())
        .all(|b| b.is_ascii_digit())
    {
        return Err(err());
    }
    // 18 digits keeps numerator and denominator inside i64.
    if int_part.len() + frac_part.len() > 18 {
        return Err(err());
    }
    let mut numer: i64 = 0;
    for b in int_part.bytes().chain(frac_part.bytes()) {
        numer = numer * 10 + i64::from(b - b'0');
    }
    let denom = 10i64.pow(frac_part.len() as u32);
    let value = Ratio::new(numer, denom);
    Ok(if negative { -value } else { value })
}

/// Formats an exact rational the way Python 2 prints a float: twelve
/// significant digits, trailing zeros stripped, always with a decimal point
/// ("100.0", "33.3333333333", "66.6666666667").
pub fn format_significant(value: &Rational) -> String {
    format_rounded(value, significant_decimals(value, 12), true)
}

/// Fixed number of decimals, half-up rounding ("33.33").
pub fn format_fixed(value: &Rational, decimals: u32) -> String {
    format_rounded(value, decimals, false)
}

/// Shortest exact decimal text ("75", "33.33") when the rational has a terminating
/// expansion (denominator of the form 2^a·5^b), else `None`.
pub fn exact_decimal(value: &Rational) -> Option<String> {
    let mut d = *value.denom();
    let mut decimals = 0u32;
    while d % 10 == 0 {
        d /= 10;
        decimals += 1;
    }
    while d % 2 == 0 || d % 5 == 0 {
        if d % 2 == 0 {
            d /= 2;
        } else {
            d /= 5;
        }
        decimals += 1;
    }
    if d != 1 {
        return None;
    }
    Some(format_rounded(value, decimals, true))
}

fn significant_decimals(value: &Rational, digits: u32) -> u32 {
    let abs = value.abs();
    if abs.is_zero() {
        return 1;
    }
    let mut int_digits: i32 = 0;
    let mut scaled = abs;
    let ten = Rational::from_integer(10);
    let one = Rational::from_integer(1);
    while scaled >= ten {
        scaled /= ten;
        int_digits += 1;
    }
    while scaled < one {
        scaled *= ten;
        int_digits -= 1;
    }
    (digits as i32 - 1 - int_digits).max(0) as u32
}

fn format_rounded(value: &Rational, decimals: u32, strip: bool) -> String {
    let negative = value.is_negative();
    let abs = value.abs();
    let scale = 10i128.pow(decimals);
    let numer = i128::from(*abs.numer()) * scale;
    let denom = i128::from(*abs.denom());
    let (q, r) = numer.div_rem(&denom);
    let rounded = if 2 * r >= denom { q + 1 } else { q };
    let int_part = rounded / scale;
    let mut frac = if decimals == 0 {
        String::new()
    } else {
        format!("{:0width$}", rounded % scale, width = decimals as usize)
    };
    if strip && decimals > 0 {
        while frac.len() > 1 && frac.ends_with('0') {
            frac.pop();
        }
        if frac.is_empty() {
            frac.push('0');
        }
    }
    let sign = if negative && rounded != 0 { "-" } else { "" };
    if frac.is_empty() {
        format!("{sign}{int_part}")
    } else {
        format!("{sign}{int_part}.{frac}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_decimals_exactly() {
        assert_eq!(parse_decimal("75").unwrap(), Rational::from_integer(75));
        assert_eq!(parse_decimal("33.33").unwrap(), Rational::new(3333, 100));
        assert_eq!(parse_decimal(".5").unwrap(), Rational::new(1, 2));
        assert_eq!(parse_decimal("-2.50").unwrap(), Rational::new(-5, 2));
        assert!(parse_decimal("").is_err());
        assert!(parse_decimal("1e3").is_err());
        assert!(parse_decimal("7.").is_ok());
        assert!(parse_decimal("abc").is_err());
    }

    #[test]
    fn python_style_percentages() {
        assert_eq!(format_significant(&Rational::from_integer(100)), "100.0");
        assert_eq!(format_significant(&Rational::new(100, 3)), "33.3333333333");
        assert_eq!(format_significant(&Rational::new(200, 3)), "66.6666666667");
        assert_eq!(format_significant(&Rational::from_integer(0)), "0.0");
        assert_eq!(format_significant(&Rational::new(1, 3)), "0.333333333333");
        assert_eq!(format_significant(&Rational::from_integer(50)), "50.0");
    }

    #[test]
    fn fixed_decimals() {
        assert_eq!(format_fixed(&Rational::new(100, 3), 2), "33.33");
        assert_eq!(format_fixed(&Rational::new(200, 3), 2), "66.67");
        assert_eq!(format_fixed(&Rational::from_integer(100), 2), "100.00");
        assert_eq!(format_fixed(&Rational::new(1, 2), 0), "1");
    }

    #[test]
    fn exact_decimal_only_for_terminating_expansions() {
        assert_eq!(
            exact_decimal(&Rational::new(3333, 100)).as_deref(),
            Some("33.33")
        );
        assert_eq!(
            exact_decimal(&Rational::from_integer(75)).as_deref(),
            Some("75")
        );
        assert_eq!(
            exact_decimal(&Rational::new(1, 8)).as_deref(),
            Some("0.125")
        );
        assert_eq!(exact_decimal(&Rational::new(1, 3)), None);
    }

    #[test]
    fn scalar_covers_floats_and_rationals() {
        fn ratio_of<T: Scalar>(a: u64, b: u64) -> T {
            T::from_count(a) / T::from_count(b)
        }
        assert_eq!(ratio_of::<Rational>(1, 4), Rational::new(1, 4));
        assert_eq!(ratio_of::<f64>(1, 4), 0.25);
        assert_eq!(ratio_of::<f32>(1, 4), 0.25f32);
    }
}
