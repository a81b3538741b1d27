//! Laurent polynomials in the torus characters `t1..t4` and the insertion
//! character `y`, with integer coefficients. These are the K-theory classes
//! the vertex formalism manipulates.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

/// Exponent data of `t1^a1 t2^a2 t3^a3 t4^a4 y^b`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial {
    pub t: [i32; 4],
    pub y: i32,
}

impl Monomial {
    pub const ONE: Monomial = Monomial { t: [0; 4], y: 0 };

    pub fn new(t: [i32; 4], y: i32) -> Self {
        Monomial { t, y }
    }

    pub fn t(t: [i32; 4]) -> Self {
        Monomial { t, y: 0 }
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut t = self.t;
        for (a, b) in t.iter_mut().zip(other.t) {
            *a += b;
        }
        Monomial { t, y: self.y + other.y }
    }

    /// `t_i -> t_i^{-1}`, leaving `y` alone.
    pub fn dual_t(&self) -> Monomial {
        Monomial { t: self.t.map(|a| -a), y: self.y }
    }

    pub fn is_one(&self) -> bool {
        *self == Self::ONE
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_one() {
            return write!(f, "1");
        }
        let mut parts = Vec::new();
        for (i, &a) in self.t.iter().enumerate() {
            match a {
                0 => {}
                1 => parts.push(format!("t{}", i + 1)),
                _ => parts.push(format!("t{}^{}", i + 1, a)),
            }
        }
        match self.y {
            0 => {}
            1 => parts.push("y".to_string()),
            b => parts.push(format!("y^{b}")),
        }
        write!(f, "{}", parts.join("*"))
    }
}

/// Integer combination of monomials. Zero coefficients are never stored.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct EquivariantClass {
    terms: BTreeMap<Monomial, i64>,
}

impl EquivariantClass {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::monomial(Monomial::ONE, 1)
    }

    pub fn monomial(m: Monomial, c: i64) -> Self {
        let mut out = Self::zero();
        out.add_term(m, c);
        out
    }

    /// `y`, the character of the insertion torus.
    pub fn y() -> Self {
        Self::monomial(Monomial::new([0; 4], 1), 1)
    }

    /// `t_i` for `i` in `1..=4`.
    pub fn t(i: usize) -> Self {
        let mut t = [0; 4];
        t[i - 1] = 1;
        Self::monomial(Monomial::t(t), 1)
    }

    pub fn from_terms<I: IntoIterator<Item = (Monomial, i64)>>(terms: I) -> Self {
        let mut out = Self::zero();
        for (m, c) in terms {
            out.add_term(m, c);
        }
        out
    }

    pub fn add_term(&mut self, m: Monomial, c: i64) {
        if c == 0 {
            return;
        }
        let entry = self.terms.entry(m).or_insert(0);
        *entry += c;
        if *entry == 0 {
            self.terms.remove(&m);
        }
    }

    pub fn coeff(&self, m: &Monomial) -> i64 {
        self.terms.get(m).copied().unwrap_or(0)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &i64)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.is_zero()
    }

    /// Virtual rank: the sum of all coefficients.
    pub fn rank(&self) -> i64 {
        self.terms.values().sum()
    }

    pub fn scale(&self, c: i64) -> Self {
        if c == 0 {
            return Self::zero();
        }
        Self { terms: self.terms.iter().map(|(m, v)| (*m, v * c)).collect() }
    }

    pub fn shift(&self, by: &Monomial) -> Self {
        Self { terms: self.terms.iter().map(|(m, v)| (m.mul(by), *v)).collect() }
    }

    /// The bar involution `f(t1^{-1}, ..., t4^{-1})`; `y` is untouched.
    pub fn dual_t(&self) -> Self {
        Self { terms: self.terms.iter().map(|(m, v)| (m.dual_t(), *v)).collect() }
    }

    pub fn filter<P: Fn(&Monomial) -> bool>(&self, keep: P) -> Self {
        Self {
            terms: self.terms.iter().filter(|(m, _)| keep(m)).map(|(m, v)| (*m, *v)).collect(),
        }
    }

    /// Substitute every monomial through `map` and collect.
    pub fn map_monomials<F: Fn(&Monomial) -> Monomial>(&self, map: F) -> Self {
        Self::from_terms(self.terms.iter().map(|(m, v)| (map(m), *v)))
    }
}

impl Add for &EquivariantClass {
    type Output = EquivariantClass;
    fn add(self, rhs: &EquivariantClass) -> EquivariantClass {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(*m, *c);
        }
        out
    }
}

impl Sub for &EquivariantClass {
    type Output = EquivariantClass;
    fn sub(self, rhs: &EquivariantClass) -> EquivariantClass {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(*m, -*c);
        }
        out
    }
}

impl Neg for &EquivariantClass {
    type Output = EquivariantClass;
    fn neg(self) -> EquivariantClass {
        self.scale(-1)
    }
}

impl Mul for &EquivariantClass {
    type Output = EquivariantClass;
    fn mul(self, rhs: &EquivariantClass) -> EquivariantClass {
        let mut out = EquivariantClass::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }
}

macro_rules! forward_owned {
    ($tr:ident, $f:ident) => {
        impl $tr for EquivariantClass {
            type Output = EquivariantClass;
            fn $f(self, rhs: EquivariantClass) -> EquivariantClass {
                (&self).$f(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl fmt::Display for EquivariantClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        // y-terms first, then by descending t-degree so that leading terms read naturally
        let mut terms: Vec<_> = self.terms.iter().collect();
        terms.sort_by(|(a, _), (b, _)| {
            let da: i32 = a.t.iter().sum();
            let db: i32 = b.t.iter().sum();
            b.y.cmp(&a.y).then(db.cmp(&da)).then(b.t.cmp(&a.t))
        });
        for (idx, (m, &c)) in terms.into_iter().enumerate() {
            let sign = if c < 0 { "-" } else { "+" };
            if idx == 0 {
                if c < 0 {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            let a = c.abs();
            if m.is_one() {
                write!(f, "{a}")?;
            } else if a == 1 {
                write!(f, "{m}")?;
            } else {
                write!(f, "{a}*{m}")?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(a: [i32; 4]) -> EquivariantClass {
        EquivariantClass::monomial(Monomial::t(a), 1)
    }

    #[test]
    fn dual_examples() {
        assert_eq!(EquivariantClass::one().dual_t(), EquivariantClass::one());
        let f = &EquivariantClass::one() + &t([1, 0, 0, 0]);
        assert_eq!(f.dual_t(), &EquivariantClass::one() + &t([-1, 0, 0, 0]));
        let g = EquivariantClass::monomial(Monomial::new([0, 0, 1, 0], 1), 1);
        assert_eq!(g.dual_t(), EquivariantClass::monomial(Monomial::new([0, 0, -1, 0], 1), 1));
    }

    #[test]
    fn cancellation_drops_terms() {
        let f = &t([1, 0, 0, 0]) - &t([1, 0, 0, 0]);
        assert!(f.is_zero());
        assert_eq!(f.len(), 0);
    }

    #[test]
    fn display() {
        let f = &(&EquivariantClass::y() - &t([-1, -1, 0, 0])) + &t([0, 0, -1, 0]).scale(2);
        assert_eq!(f.to_string(), "y + 2*t3^-1 - t1^-1*t2^-1");
    }
}
