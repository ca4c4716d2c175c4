//! The coefficient field Q(i): Gaussian rationals with exact arithmetic.
//!
//! A scalar is a pair of arbitrary-precision rationals (real and imaginary
//! part). The text form is canonical, so printing and re-parsing any scalar
//! is the identity: `2`, `-1/2`, `3*i`, `-1/2+3*i`, `1-2/7*i`.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Scalar {
    re: BigRational,
    im: BigRational,
}

impl Scalar {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        Scalar { re, im }
    }

    pub fn zero() -> Self {
        Scalar {
            re: BigRational::zero(),
            im: BigRational::zero(),
        }
    }

    pub fn one() -> Self {
        Scalar {
            re: BigRational::one(),
            im: BigRational::zero(),
        }
    }

    /// The imaginary unit.
    pub fn i() -> Self {
        Scalar {
            re: BigRational::zero(),
            im: BigRational::one(),
        }
    }

    pub fn from_int(n: i64) -> Self {
        Scalar {
            re: BigRational::from_integer(BigInt::from(n)),
            im: BigRational::zero(),
        }
    }

    /// `num / den` as a real scalar. Panics when `den == 0`.
    pub fn from_ratio(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        Scalar {
            re: BigRational::new(BigInt::from(num), BigInt::from(den)),
            im: BigRational::zero(),
        }
    }

    /// `(a + b*i)` from integer parts.
    pub fn from_parts(a: i64, b: i64) -> Self {
        Scalar {
            re: BigRational::from_integer(BigInt::from(a)),
            im: BigRational::from_integer(BigInt::from(b)),
        }
    }

    pub fn re(&self) -> &BigRational {
        &self.re
    }

    pub fn im(&self) -> &BigRational {
        &self.im
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.re.is_one() && self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        Scalar {
            re: self.re.clone(),
            im: -self.im.clone(),
        }
    }

    /// `re^2 + im^2`, a rational; zero exactly when the scalar is zero.
    pub fn norm_sq(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let n = self.norm_sq();
        Some(Scalar {
            re: &self.re / &n,
            im: -&self.im / &n,
        })
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            return write!(f, "{}", self.re);
        }
        if self.re.is_zero() {
            return write!(f, "{}*i", self.im);
        }
        if self.im.is_negative() {
            write!(f, "{}-{}*i", self.re, -&self.im)
        } else {
            write!(f, "{}+{}*i", self.re, self.im)
        }
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScalarParseError {
    pub message: String,
}

impl fmt::Display for ScalarParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "bad scalar: {}", self.message)
    }
}

impl std::error::Error for ScalarParseError {}

fn err(message: impl Into<String>) -> ScalarParseError {
    ScalarParseError {
        message: message.into(),
    }
}

/// One signed term of the text form: a rational, an imaginary rational, or
/// a bare `i` with an implicit coefficient of one.
struct Term {
    value: BigRational,
    imaginary: bool,
}

fn parse_rational(s: &str) -> Result<BigRational, ScalarParseError> {
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n, Some(d)),
        None => (s, None),
    };
    let num: BigInt = num
        .parse()
        .map_err(|_| err(format!("bad integer {num:?}")))?;
    let den: BigInt = match den {
        Some(d) => d.parse().map_err(|_| err(format!("bad integer {d:?}")))?,
        None => BigInt::one(),
    };
    if den.is_zero() {
        return Err(err("zero denominator"));
    }
    Ok(BigRational::new(num, den))
}

fn parse_term(s: &str) -> Result<Term, ScalarParseError> {
    if s.is_empty() {
        return Err(err("empty term"));
    }
    // the caller already consumed the sign; another one is a doubled sign
    if s.starts_with('+') || s.starts_with('-') {
        return Err(err("doubled sign"));
    }
    if s == "i" {
        return Ok(Term {
            value: BigRational::one(),
            imaginary: true,
        });
    }
    let (body, imaginary) = match s.strip_suffix('i') {
        Some(rest) => match rest.strip_suffix('*') {
            Some("") => return Err(err("missing coefficient before *i")),
            Some(before) => (before, true),
            None => (rest, true),
        },
        None => (s, false),
    };
    if imaginary && body.is_empty() {
        return Ok(Term {
            value: BigRational::one(),
            imaginary: true,
        });
    }
    Ok(Term {
        value: parse_rational(body)?,
        imaginary,
    })
}

impl FromStr for Scalar {
    type Err = ScalarParseError;

    /// Accepts sums of signed rational and imaginary terms; the imaginary
    /// marker may be written `3*i`, `3i`, or a bare `i` / `-i`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(err("empty input"));
        }
        let mut re = BigRational::zero();
        let mut im = BigRational::zero();
        let mut rest = compact.as_str();
        let mut first = true;
        while !rest.is_empty() {
            let (sign, after_sign) = match rest.as_bytes()[0] {
                b'+' => (false, &rest[1..]),
                b'-' => (true, &rest[1..]),
                _ if first => (false, rest),
                other => {
                    return Err(err(format!(
                        "expected + or - before term, found {:?}",
                        other as char
                    )))
                }
            };
            first = false;
            let split = after_sign
                .char_indices()
                .skip(1)
                .find(|&(_, c)| c == '+' || c == '-')
                .map(|(idx, _)| idx)
                .unwrap_or(after_sign.len());
            let (term_text, tail) = after_sign.split_at(split);
            let term = parse_term(term_text)?;
            let value = if sign { -term.value } else { term.value };
            if term.imaginary {
                im += value;
            } else {
                re += value;
            }
            rest = tail;
        }
        Ok(Scalar { re, im })
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident) => {
        impl $trait for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                (&self).$method(rhs)
            }
        }
        impl $trait<Scalar> for &Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                self.$method(&rhs)
            }
        }
    };
}

impl Add<&Scalar> for &Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        Scalar {
            re: &self.re + &rhs.re,
            im: &self.im + &rhs.im,
        }
    }
}
forward_binop!(Add, add);

impl Sub<&Scalar> for &Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        Scalar {
            re: &self.re - &rhs.re,
            im: &self.im - &rhs.im,
        }
    }
}
forward_binop!(Sub, sub);

impl Mul<&Scalar> for &Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        Scalar {
            re: &self.re * &rhs.re - &self.im * &rhs.im,
            im: &self.re * &rhs.im + &self.im * &rhs.re,
        }
    }
}
forward_binop!(Mul, mul);

impl Div<&Scalar> for &Scalar {
    type Output = Scalar;
    fn div(self, rhs: &Scalar) -> Scalar {
        let inv = rhs.inv().expect("division by zero scalar");
        self * &inv
    }
}
forward_binop!(Div, div);

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar {
            re: -&self.re,
            im: -&self.im,
        }
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

impl AddAssign<&Scalar> for Scalar {
    fn add_assign(&mut self, rhs: &Scalar) {
        self.re += &rhs.re;
        self.im += &rhs.im;
    }
}

impl SubAssign<&Scalar> for Scalar {
    fn sub_assign(&mut self, rhs: &Scalar) {
        self.re -= &rhs.re;
        self.im -= &rhs.im;
    }
}

impl MulAssign<&Scalar> for Scalar {
    fn mul_assign(&mut self, rhs: &Scalar) {
        *self = (&*self) * rhs;
    }
}

impl Zero for Scalar {
    fn zero() -> Self {
        Scalar::zero()
    }
    fn is_zero(&self) -> bool {
        Scalar::is_zero(self)
    }
}

impl One for Scalar {
    fn one() -> Self {
        Scalar::one()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(text: &str) -> Scalar {
        text.parse().unwrap()
    }

    #[test]
    fn arithmetic_is_exact() {
        let third = Scalar::from_ratio(1, 3);
        let sum = &third + &third + third;
        assert!(sum.is_one());

        // (1 + i)(1 - i) = 2
        let z = Scalar::from_parts(1, 1);
        assert_eq!(&z * &z.conj(), Scalar::from_int(2));

        // i^2 = -1
        assert_eq!(&Scalar::i() * &Scalar::i(), Scalar::from_int(-1));
    }

    #[test]
    fn inverse_of_gaussian_unit() {
        let z = Scalar::from_parts(0, 1);
        assert_eq!(z.inv().unwrap(), Scalar::from_parts(0, -1));
        assert_eq!(Scalar::zero().inv(), None);

        let w = s("-1/2+3*i");
        assert!((&w * &w.inv().unwrap()).is_one());
    }

    #[test]
    fn parses_documented_forms() {
        assert_eq!(s("2"), Scalar::from_int(2));
        assert_eq!(s("-1/2"), Scalar::from_ratio(-1, 2));
        assert_eq!(s("3*i"), Scalar::from_parts(0, 3));
        assert_eq!(
            s("-1/2+3*i"),
            Scalar::from_ratio(-1, 2) + Scalar::from_parts(0, 3)
        );
        assert_eq!(s("i"), Scalar::i());
        assert_eq!(s("-i"), -Scalar::i());
        assert_eq!(s("3i"), s("3*i"));
        assert_eq!(s("1 - 2/7 * i"), s("1-2/7*i"));
    }

    #[test]
    fn rejects_malformed_input() {
        for bad in ["", "1/0", "++1", "2x", "1+*i", "/3", "3/", "1..2"] {
            assert!(bad.parse::<Scalar>().is_err(), "accepted {bad:?}");
        }
    }

    #[test]
    fn display_examples() {
        assert_eq!(Scalar::from_ratio(-1, 2).to_string(), "-1/2");
        assert_eq!(s("0+3*i").to_string(), "3*i");
        assert_eq!(s("1-1*i").to_string(), "1-1*i");
        assert_eq!(Scalar::zero().to_string(), "0");
    }

    proptest::proptest! {
        #[test]
        fn print_parse_round_trip(a in -40i64..40, b in 1i64..20, c in -40i64..40, d in 1i64..20) {
            let z = Scalar::new(
                BigRational::new(a.into(), b.into()),
                BigRational::new(c.into(), d.into()),
            );
            let back: Scalar = z.to_string().parse().unwrap();
            proptest::prop_assert_eq!(back, z);
        }

        #[test]
        fn field_laws(a in -9i64..9, b in -9i64..9, c in -9i64..9, d in -9i64..9) {
            let z = Scalar::from_parts(a, b);
            let w = Scalar::from_parts(c, d);
            proptest::prop_assert_eq!(&z * &w, &w * &z);
            proptest::prop_assert_eq!(&z + &w, &w + &z);
            if !w.is_zero() {
                let q = &z / &w;
                proptest::prop_assert_eq!(&q * &w, z);
            }
        }
    }
}
