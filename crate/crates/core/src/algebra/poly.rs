//! Sparse multivariate polynomials in `(s1, s2, s3, m)` over the rationals.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::linear::{fmt_coeff_term, LinearForm, VAR_NAMES};
use super::modp;

pub type Exps = [u16; 4];

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Poly {
    terms: BTreeMap<Exps, BigRational>,
}

fn unit(i: usize) -> Exps {
    let mut e = [0; 4];
    e[i] = 1;
    e
}

fn add_exps(a: &Exps, b: &Exps) -> Exps {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2], a[3] + b[3]]
}

fn degree(e: &Exps) -> u32 {
    e.iter().map(|&x| x as u32).sum()
}

impl Poly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(BigRational::one())
    }

    pub fn constant(c: BigRational) -> Self {
        let mut p = Self::zero();
        p.add_term([0; 4], c);
        p
    }

    pub fn int(c: i64) -> Self {
        Self::constant(BigRational::from_integer(BigInt::from(c)))
    }

    pub fn var(i: usize) -> Self {
        let mut p = Self::zero();
        p.add_term(unit(i), BigRational::one());
        p
    }

    pub fn from_linear(f: &LinearForm) -> Self {
        let mut p = Self::zero();
        for (i, c) in f.coeffs().iter().enumerate() {
            p.add_term(unit(i), c.clone());
        }
        p
    }

    pub fn add_term(&mut self, e: Exps, c: BigRational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(e) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exps, &BigRational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms.get(&[0; 4]).is_some_and(One::is_one)
    }

    /// The constant value, if the polynomial has no other terms.
    pub fn as_constant(&self) -> Option<BigRational> {
        match self.terms.len() {
            0 => Some(BigRational::zero()),
            1 => self.terms.get(&[0; 4]).cloned(),
            _ => None,
        }
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(degree).max()
    }

    /// The common degree of all terms, or `None` if mixed (or zero).
    pub fn homogeneous_degree(&self) -> Option<u32> {
        let mut degs = self.terms.keys().map(degree);
        let d = degs.next()?;
        degs.all(|x| x == d).then_some(d)
    }

    pub fn scale(&self, k: &BigRational) -> Poly {
        if k.is_zero() {
            return Poly::zero();
        }
        Poly { terms: self.terms.iter().map(|(e, c)| (*e, c * k)).collect() }
    }

    pub fn mul_linear(&self, f: &LinearForm) -> Poly {
        let mut acc: HashMap<Exps, BigRational> = HashMap::with_capacity(self.terms.len() * 2);
        for (i, fc) in f.coeffs().iter().enumerate() {
            if fc.is_zero() {
                continue;
            }
            for (e, c) in &self.terms {
                let mut e2 = *e;
                e2[i] += 1;
                *acc.entry(e2).or_insert_with(BigRational::zero) += c * fc;
            }
        }
        Poly { terms: acc.into_iter().filter(|(_, c)| !c.is_zero()).collect() }
    }

    pub fn mul_linear_pow(&self, f: &LinearForm, k: u32) -> Poly {
        (0..k).fold(self.clone(), |acc, _| acc.mul_linear(f))
    }

    /// Exact quotient by a nonzero linear form, or `None` if it does not divide.
    pub fn div_linear(&self, f: &LinearForm) -> Option<Poly> {
        let v = f.pivot().expect("division by the zero form");
        if self.is_zero() {
            return Some(Poly::zero());
        }
        let lead = f.coeffs()[v].clone();
        let lead_inv = lead.recip();
        let mut rest_c = f.coeffs().clone();
        rest_c[v] = BigRational::zero();
        let rest = LinearForm::from_coeffs(rest_c);

        // coefficients of x_v^d, each with x_v stripped
        let top = self.terms.keys().map(|e| e[v]).max().unwrap_or(0) as usize;
        let mut layers: Vec<Poly> = vec![Poly::zero(); top + 1];
        for (e, c) in &self.terms {
            let mut e2 = *e;
            let d = e2[v] as usize;
            e2[v] = 0;
            layers[d].terms.insert(e2, c.clone());
        }
        let mut quotient = Poly::zero();
        for d in (1..=top).rev() {
            let layer = std::mem::take(&mut layers[d]);
            if layer.is_zero() {
                continue;
            }
            let q = layer.scale(&lead_inv);
            let sub = q.mul_linear(&rest);
            layers[d - 1] = &layers[d - 1] - &sub;
            for (e, c) in q.terms {
                let mut e2 = e;
                e2[v] = (d - 1) as u16;
                quotient.terms.insert(e2, c);
            }
        }
        layers[0].is_zero().then_some(quotient)
    }

    pub fn eval_mod(&self, point: &[u64; 4], p: u64) -> Option<u64> {
        let mut acc = 0;
        for (e, c) in &self.terms {
            let mut t = modp::rational_mod(c, p)?;
            for (i, &k) in e.iter().enumerate() {
                if k > 0 {
                    t = modp::mul_mod(t, modp::pow_mod(point[i], k as u64, p), p);
                }
            }
            acc = modp::add_mod(acc, t, p);
        }
        Some(acc)
    }

    pub fn eval_rational(&self, point: &[BigRational; 4]) -> BigRational {
        let mut acc = BigRational::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (i, &k) in e.iter().enumerate() {
                for _ in 0..k {
                    t *= &point[i];
                }
            }
            acc += t;
        }
        acc
    }

    /// Replace the variable `m` by a linear form.
    pub fn substitute_m(&self, with: &LinearForm) -> Poly {
        let mut by_power: BTreeMap<u16, Poly> = BTreeMap::new();
        for (e, c) in &self.terms {
            let mut e2 = *e;
            let k = e2[3];
            e2[3] = 0;
            by_power.entry(k).or_default().add_term(e2, c.clone());
        }
        // Horner in m
        let mut acc = Poly::zero();
        let top = by_power.keys().next_back().copied().unwrap_or(0);
        for k in (0..=top).rev() {
            acc = acc.mul_linear(with);
            if let Some(layer) = by_power.get(&k) {
                acc = &acc + layer;
            }
        }
        acc
    }

    /// Terms sorted by descending total degree, then descending lexicographic
    /// order in `(s1, s2, s3, m)`.
    fn display_order(&self) -> Vec<(&Exps, &BigRational)> {
        let mut v: Vec<_> = self.terms.iter().collect();
        v.sort_by(|(a, _), (b, _)| degree(b).cmp(&degree(a)).then(b.cmp(a)));
        v
    }

    /// True if printing needs parentheses when used as a factor.
    pub(crate) fn is_compound(&self) -> bool {
        self.terms.len() > 1
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let (big, small) = if self.terms.len() >= rhs.terms.len() { (self, rhs) } else { (rhs, self) };
        let mut out = big.clone();
        for (e, c) in &small.terms {
            out.add_term(*e, c.clone());
        }
        out
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(*e, -c);
        }
        out
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly { terms: self.terms.iter().map(|(e, c)| (*e, -c)).collect() }
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        let mut acc: HashMap<Exps, BigRational> = HashMap::new();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                *acc.entry(add_exps(ea, eb)).or_insert_with(BigRational::zero) += ca * cb;
            }
        }
        Poly { terms: acc.into_iter().filter(|(_, c)| !c.is_zero()).collect() }
    }
}

impl Add for Poly {
    type Output = Poly;
    fn add(self, rhs: Poly) -> Poly {
        &self + &rhs
    }
}

impl Sub for Poly {
    type Output = Poly;
    fn sub(self, rhs: Poly) -> Poly {
        &self - &rhs
    }
}

impl Mul for Poly {
    type Output = Poly;
    fn mul(self, rhs: Poly) -> Poly {
        &self * &rhs
    }
}

fn monomial_body(e: &Exps) -> String {
    let mut parts = Vec::new();
    for (i, &k) in e.iter().enumerate() {
        match k {
            0 => {}
            1 => parts.push(VAR_NAMES[i].to_string()),
            _ => parts.push(format!("{}^{}", VAR_NAMES[i], k)),
        }
    }
    parts.join("*")
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (idx, (e, c)) in self.display_order().into_iter().enumerate() {
            fmt_coeff_term(f, idx == 0, c, &monomial_body(e))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(i: usize) -> Poly {
        Poly::var(i)
    }

    #[test]
    fn exact_division() {
        // s1^2 + s1 s2 = s1 (s1 + s2)
        let p = &(&s(0) * &s(0)) + &(&s(0) * &s(1));
        let q = p.div_linear(&LinearForm::from_ints([1, 1, 0, 0])).unwrap();
        assert_eq!(q, s(0));
        assert!(q.div_linear(&LinearForm::from_ints([0, 1, 0, 0])).is_none());
        // division by a form with a non-unit pivot coefficient
        let f = LinearForm::from_ints([0, 2, -3, 1]);
        let g = &Poly::from_linear(&f) * &(&s(2) + &Poly::int(5));
        assert_eq!(g.div_linear(&f).unwrap(), &s(2) + &Poly::int(5));
    }

    #[test]
    fn substitution_of_m() {
        // m^2 + m s1 at m = -s1-s2-s3
        let m = s(3);
        let p = &(&m * &m) + &(&m * &s(0));
        let sub = p.substitute_m(&LinearForm::s(4));
        let expect = {
            let s4 = Poly::from_linear(&LinearForm::s(4));
            &(&s4 * &s4) + &(&s4 * &s(0))
        };
        assert_eq!(sub, expect);
    }

    #[test]
    fn display_order() {
        let p = &(&s(3) * &s(0)) - &Poly::int(2);
        assert_eq!(p.to_string(), "s1*m-2");
    }
}
