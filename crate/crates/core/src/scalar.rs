//! Exact scalar fields the geometry and the simplex are generic over.
//!
//! Everything in this crate is written against [`Scalar`], an ordered field
//! with exact arithmetic. The blanket implementation covers
//! [`num_rational::Ratio`] over any signed machine or big integer, so
//! `Ratio<BigInt>` (the default [`crate::Rational`]) and the fixed-width
//! `Ratio<i64>`/`Ratio<i128>` all work. Floating point types are deliberately
//! not admitted: degenerate pivots and adjacency tests need exact zero checks.

use std::fmt::{Debug, Display};
use std::hash::Hash;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::{BigRational, Ratio};
use num_traits::{Num, One, Signed, Zero};

pub trait Scalar:
    Clone + Debug + Display + Ord + Hash + Num + Signed + Send + Sync + 'static
{
    /// Parses `"p/q"` or `"p"`. Decimal literals, exponents, whitespace and
    /// zero denominators are rejected.
    fn parse_exact(text: &str) -> Option<Self>;

    fn from_int(value: i64) -> Self;

    fn from_frac(numer: i64, denom: i64) -> Self {
        Self::from_int(numer) / Self::from_int(denom)
    }

    fn to_big(&self) -> BigRational;

    /// Converts back from a big rational; `None` when it does not fit.
    fn from_big(value: &BigRational) -> Option<Self>;

    /// Positive rescaling of `v` to a primitive integer vector (cleared
    /// denominators, gcd of the entries equal to one). The zero vector is
    /// returned unchanged.
    fn primitive_direction(v: &[Self]) -> Vec<Self>;
}

impl<I> Scalar for Ratio<I>
where
    I: Integer
        + Signed
        + Clone
        + Debug
        + Display
        + Hash
        + std::str::FromStr
        + Into<BigInt>
        + From<i64>
        + TryFrom<BigInt>
        + Send
        + Sync
        + 'static,
{
    fn parse_exact(text: &str) -> Option<Self> {
        let valid = |part: &str| {
            let digits = part.strip_prefix('-').unwrap_or(part);
            !digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit())
        };
        let (numer, denom) = match text.split_once('/') {
            Some((n, d)) => (n, d),
            None => (text, "1"),
        };
        if !valid(numer) || !valid(denom) || denom.starts_with('-') {
            return None;
        }
        let numer = numer.parse::<I>().ok()?;
        let denom = denom.parse::<I>().ok()?;
        if denom.is_zero() {
            return None;
        }
        Some(Ratio::new(numer, denom))
    }

    fn from_int(value: i64) -> Self {
        Ratio::from_integer(I::from(value))
    }

    fn to_big(&self) -> BigRational {
        BigRational::new(self.numer().clone().into(), self.denom().clone().into())
    }

    fn from_big(value: &BigRational) -> Option<Self> {
        let numer = I::try_from(value.numer().clone()).ok()?;
        let denom = I::try_from(value.denom().clone()).ok()?;
        Some(Ratio::new(numer, denom))
    }

    fn primitive_direction(v: &[Self]) -> Vec<Self> {
        if v.iter().all(Zero::is_zero) {
            return v.to_vec();
        }
        let lcm = v
            .iter()
            .fold(I::one(), |acc, x| acc.lcm(x.denom()));
        let ints: Vec<I> = v
            .iter()
            .map(|x| x.numer().clone() * (lcm.clone() / x.denom().clone()))
            .collect();
        let gcd = ints
            .iter()
            .filter(|x| !x.is_zero())
            .fold(I::zero(), |acc, x| acc.gcd(x));
        ints.into_iter()
            .map(|x| Ratio::from_integer(x / gcd.clone()))
            .collect()
    }
}

/// A value of the extended real line restricted to exact scalars. Used for
/// optimal values of linear programs that may be infeasible (`+inf` for a
/// minimization) or unbounded.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Extended<F> {
    NegInf,
    Finite(F),
    PosInf,
}

impl<F: Scalar> Extended<F> {
    pub fn finite(&self) -> Option<&F> {
        match self {
            Extended::Finite(v) => Some(v),
            _ => None,
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Extended::Finite(_))
    }

    pub fn neg(&self) -> Self {
        match self {
            Extended::NegInf => Extended::PosInf,
            Extended::PosInf => Extended::NegInf,
            Extended::Finite(v) => Extended::Finite(-v.clone()),
        }
    }
}

impl<F: Scalar> PartialOrd for Extended<F> {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl<F: Scalar> Ord for Extended<F> {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        use std::cmp::Ordering::*;
        use Extended::*;
        match (self, other) {
            (NegInf, NegInf) | (PosInf, PosInf) => Equal,
            (NegInf, _) | (_, PosInf) => Less,
            (_, NegInf) | (PosInf, _) => Greater,
            (Finite(a), Finite(b)) => a.cmp(b),
        }
    }
}

impl<F: Scalar> Display for Extended<F> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Extended::NegInf => write!(f, "-inf"),
            Extended::PosInf => write!(f, "inf"),
            Extended::Finite(v) => write!(f, "{v}"),
        }
    }
}

/// Renders `value` with `digits` significant decimal digits, rounding half
/// away from zero.
pub fn approx_decimal(value: &BigRational, digits: usize) -> String {
    if value.is_zero() {
        return "0".to_string();
    }
    let negative = value.is_negative();
    let abs = value.abs();
    let ten = BigInt::from(10);
    // exponent e with 10^e <= abs < 10^(e+1)
    let mut exp: i64 = {
        let approx = abs.numer().bits() as i64 - abs.denom().bits() as i64;
        (approx as f64 * std::f64::consts::LOG10_2).floor() as i64
    };
    let pow = |e: i64| -> BigRational {
        if e >= 0 {
            BigRational::from_integer(num_traits::pow(ten.clone(), e as usize))
        } else {
            BigRational::new(BigInt::one(), num_traits::pow(ten.clone(), (-e) as usize))
        }
    };
    while pow(exp) > abs {
        exp -= 1;
    }
    while pow(exp + 1) <= abs {
        exp += 1;
    }
    let shift = digits as i64 - 1 - exp;
    let scaled = &abs * pow(shift);
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    let mut mantissa = (scaled + half).floor().to_integer();
    let mut shift = shift;
    if mantissa.to_string().len() > digits {
        mantissa /= &ten;
        shift -= 1;
    }
    let text = mantissa.to_string();
    let point = text.len() as i64 - shift;
    let mut out = String::new();
    if negative {
        out.push('-');
    }
    if point <= 0 {
        out.push_str("0.");
        out.push_str(&"0".repeat((-point) as usize));
        out.push_str(&text);
    } else if point as usize >= text.len() {
        out.push_str(&text);
        out.push_str(&"0".repeat(point as usize - text.len()));
    } else {
        out.push_str(&text[..point as usize]);
        out.push('.');
        out.push_str(&text[point as usize..]);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rational;

    #[test]
    fn parses_fractions_and_integers() {
        assert_eq!(Rational::parse_exact("7/3"), Some(Rational::from_frac(7, 3)));
        assert_eq!(Rational::parse_exact("-4"), Some(Rational::from_int(-4)));
        assert_eq!(Rational::parse_exact("6/4"), Some(Rational::from_frac(3, 2)));
    }

    #[test]
    fn rejects_decimals_and_garbage() {
        for bad in ["0.5", "1e3", "1/0", " 1", "1/-2", "", "/3", "3/", "+2", "--1"] {
            assert_eq!(Rational::parse_exact(bad), None, "{bad:?}");
        }
    }

    #[test]
    fn primitive_direction_clears_denominators() {
        let v = [Rational::from_frac(1, 2), Rational::from_frac(-3, 4), Rational::zero()];
        let p = Rational::primitive_direction(&v);
        assert_eq!(p, vec![Rational::from_int(2), Rational::from_int(-3), Rational::zero()]);
        let w = [Rational::from_int(4), Rational::from_int(6)];
        assert_eq!(
            Rational::primitive_direction(&w),
            vec![Rational::from_int(2), Rational::from_int(3)]
        );
    }

    #[test]
    fn fixed_width_ratio_is_a_scalar() {
        type Small = Ratio<i64>;
        let x = Small::parse_exact("5/10").unwrap();
        assert_eq!(x, Small::new(1, 2));
        assert_eq!(x.to_big(), Rational::from_frac(1, 2));
        assert_eq!(Small::from_big(&Rational::from_frac(3, 7)), Some(Small::new(3, 7)));
    }

    #[test]
    fn decimal_rendering() {
        assert_eq!(approx_decimal(&Rational::from_frac(7, 3), 20), "2.3333333333333333333");
        assert_eq!(approx_decimal(&Rational::from_frac(2, 3), 20), "0.66666666666666666667");
        assert_eq!(approx_decimal(&Rational::from_int(-12), 20), "-12.000000000000000000");
        assert_eq!(approx_decimal(&Rational::from_frac(1, 1000), 3), "0.00100");
        assert_eq!(approx_decimal(&Rational::from_frac(999, 1000), 2), "1.0");
        assert_eq!(approx_decimal(&Rational::zero(), 20), "0");
    }

    #[test]
    fn extended_order() {
        let a: Extended<Rational> = Extended::Finite(Rational::from_int(3));
        assert!(Extended::NegInf < a && a < Extended::PosInf);
        assert_eq!(a.neg(), Extended::Finite(Rational::from_int(-3)));
        assert_eq!(Extended::<Rational>::PosInf.to_string(), "inf");
    }
}
