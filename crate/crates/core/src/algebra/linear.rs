//! Linear forms in the equivariant parameters `s1, s2, s3, m`.
//!
//! The Calabi-Yau relation is applied at construction time: `s4` always
//! means `-s1 - s2 - s3`, so the forms live in an honest polynomial ring.

use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::modp;

/// Variable order shared by [`LinearForm`] and [`super::Poly`].
pub const VAR_NAMES: [&str; 4] = ["s1", "s2", "s3", "m"];

/// `c[0] s1 + c[1] s2 + c[2] s3 + c[3] m` with exact rational coefficients.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LinearForm {
    c: [BigRational; 4],
}

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

impl LinearForm {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn new(s: [BigRational; 3], m: BigRational) -> Self {
        let [a, b, c] = s;
        LinearForm { c: [a, b, c, m] }
    }

    pub fn from_coeffs(c: [BigRational; 4]) -> Self {
        LinearForm { c }
    }

    /// Integer coefficients in the order `s1, s2, s3, m`.
    pub fn from_ints(c: [i64; 4]) -> Self {
        LinearForm { c: c.map(rat) }
    }

    /// `s_i` for `i` in `1..=4`, with `s4 = -s1 - s2 - s3`.
    pub fn s(i: usize) -> Self {
        match i {
            1 => Self::from_ints([1, 0, 0, 0]),
            2 => Self::from_ints([0, 1, 0, 0]),
            3 => Self::from_ints([0, 0, 1, 0]),
            4 => Self::from_ints([-1, -1, -1, 0]),
            _ => panic!("equivariant parameter index {i} out of range"),
        }
    }

    pub fn m() -> Self {
        Self::from_ints([0, 0, 0, 1])
    }

    pub fn coeffs(&self) -> &[BigRational; 4] {
        &self.c
    }

    pub fn s_coeffs(&self) -> [&BigRational; 3] {
        [&self.c[0], &self.c[1], &self.c[2]]
    }

    pub fn m_coeff(&self) -> &BigRational {
        &self.c[3]
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(Zero::is_zero)
    }

    pub fn scale(&self, k: &BigRational) -> Self {
        LinearForm { c: self.c.clone().map(|x| x * k) }
    }

    pub fn scale_int(&self, k: i64) -> Self {
        self.scale(&rat(k))
    }

    /// Split `self = scalar * primitive` where `primitive` has coprime
    /// integer coefficients and a positive first nonzero coefficient.
    /// Returns `None` for the zero form.
    pub fn primitive(&self) -> Option<(BigRational, LinearForm)> {
        let first = self.c.iter().find(|x| !x.is_zero())?;
        let lcm = self.c.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
        let ints: Vec<BigInt> = self.c.iter().map(|x| (x * &lcm).to_integer()).collect();
        let mut g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
        if first.is_negative() {
            g = -g;
        }
        let prim = LinearForm {
            c: [0, 1, 2, 3].map(|i| BigRational::from_integer(&ints[i] / &g)),
        };
        let scalar = BigRational::new(g, lcm);
        Some((scalar, prim))
    }

    pub fn is_primitive(&self) -> bool {
        match self.primitive() {
            Some((s, _)) => s.is_one(),
            None => false,
        }
    }

    /// Index of the first variable with a nonzero coefficient.
    pub fn pivot(&self) -> Option<usize> {
        self.c.iter().position(|x| !x.is_zero())
    }

    pub fn eval_rational(&self, point: &[BigRational; 4]) -> BigRational {
        self.c.iter().zip(point).fold(BigRational::zero(), |acc, (c, x)| acc + c * x)
    }

    /// Value at a point of the prime field. Coefficients with denominators
    /// divisible by `p` yield `None`.
    pub fn eval_mod(&self, point: &[u64; 4], p: u64) -> Option<u64> {
        let mut acc = 0;
        for (c, &x) in self.c.iter().zip(point) {
            if c.is_zero() {
                continue;
            }
            let c = modp::rational_mod(c, p)?;
            acc = modp::add_mod(acc, modp::mul_mod(c, x, p), p);
        }
        Some(acc)
    }

    /// Replace `m` by `with` (a form without `m`).
    pub fn substitute_m(&self, with: &LinearForm) -> LinearForm {
        let mut c = self.c.clone();
        c[3] = BigRational::zero();
        let base = LinearForm { c };
        &base + &with.scale(&self.c[3])
    }

    pub fn sum(forms: &[LinearForm]) -> LinearForm {
        forms.iter().fold(LinearForm::zero(), |acc, f| &acc + f)
    }
}

impl Add for &LinearForm {
    type Output = LinearForm;
    fn add(self, rhs: &LinearForm) -> LinearForm {
        LinearForm { c: [0, 1, 2, 3].map(|i| &self.c[i] + &rhs.c[i]) }
    }
}

impl Sub for &LinearForm {
    type Output = LinearForm;
    fn sub(self, rhs: &LinearForm) -> LinearForm {
        LinearForm { c: [0, 1, 2, 3].map(|i| &self.c[i] - &rhs.c[i]) }
    }
}

impl Neg for &LinearForm {
    type Output = LinearForm;
    fn neg(self) -> LinearForm {
        LinearForm { c: self.c.clone().map(|x| -x) }
    }
}

impl Add for LinearForm {
    type Output = LinearForm;
    fn add(self, rhs: LinearForm) -> LinearForm {
        &self + &rhs
    }
}

impl Sub for LinearForm {
    type Output = LinearForm;
    fn sub(self, rhs: LinearForm) -> LinearForm {
        &self - &rhs
    }
}

pub(crate) fn fmt_coeff_term(
    f: &mut fmt::Formatter<'_>,
    first: bool,
    c: &BigRational,
    body: &str,
) -> fmt::Result {
    let neg = c.is_negative();
    let a = c.abs();
    if first {
        if neg {
            write!(f, "-")?;
        }
    } else if neg {
        write!(f, "-")?;
    } else {
        write!(f, "+")?;
    }
    if body.is_empty() {
        write!(f, "{a}")
    } else if a.is_one() {
        write!(f, "{body}")
    } else {
        write!(f, "{a}*{body}")
    }
}

impl fmt::Display for LinearForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (c, name) in self.c.iter().zip(VAR_NAMES) {
            if c.is_zero() {
                continue;
            }
            fmt_coeff_term(f, first, c, name)?;
            first = false;
        }
        Ok(())
    }
}
