//! Truncated multivariate power series over a [`Field`], MacMahon factors,
//! and the closed-form generating functions.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde::Serialize;

use crate::algebra::{FactoredRational, Field, LinearForm, Poly};
use crate::error::{Error, Result};
use crate::vertex::Geometry;

pub type Exponents = Vec<u32>;

/// Power series in `vars`, truncated at total degree `cutoff`. Zero
/// coefficients are never stored.
#[derive(Clone, Debug, PartialEq)]
pub struct TruncatedSeries<T> {
    vars: Vec<String>,
    cutoff: u32,
    coeffs: BTreeMap<Exponents, T>,
}

fn degree(e: &[u32]) -> u32 {
    e.iter().sum()
}

pub fn toric_vars() -> Vec<String> {
    vec!["q".to_string()]
}

pub fn orbifold_vars(r: u32) -> Vec<String> {
    (0..r).map(|i| format!("q{i}")).collect()
}

impl<T: Clone + PartialEq + std::fmt::Debug> TruncatedSeries<T> {
    pub fn zero(vars: Vec<String>, cutoff: u32) -> Self {
        TruncatedSeries { vars, cutoff, coeffs: BTreeMap::new() }
    }

    pub fn one<F: Field<Elem = T>>(vars: Vec<String>, cutoff: u32, f: &F) -> Self {
        let mut s = Self::zero(vars, cutoff);
        let n = s.vars.len();
        s.coeffs.insert(vec![0; n], f.one());
        s
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn cutoff(&self) -> u32 {
        self.cutoff
    }

    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    pub fn coeff(&self, e: &[u32]) -> Option<&T> {
        self.coeffs.get(e)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponents, &T)> {
        self.coeffs.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.coeffs.len()
    }

    /// Add `c * x^e`, ignoring terms beyond the cutoff.
    pub fn add_term<F: Field<Elem = T>>(&mut self, e: Exponents, c: &T, f: &F) {
        assert_eq!(e.len(), self.vars.len(), "exponent vector length");
        if degree(&e) > self.cutoff || f.is_zero(c) {
            return;
        }
        match self.coeffs.get_mut(&e) {
            Some(old) => {
                let s = f.add(old, c);
                if f.is_zero(&s) {
                    self.coeffs.remove(&e);
                } else {
                    *old = s;
                }
            }
            None => {
                self.coeffs.insert(e, c.clone());
            }
        }
    }

    fn check_compatible(&self, other: &Self) {
        assert_eq!(self.vars, other.vars, "series in different variables");
    }

    /// Common truncation of both operands.
    fn joint_cutoff(&self, other: &Self) -> u32 {
        self.cutoff.min(other.cutoff)
    }

    pub fn add<F: Field<Elem = T>>(&self, other: &Self, f: &F) -> Self {
        self.check_compatible(other);
        let mut out = Self::zero(self.vars.clone(), self.joint_cutoff(other));
        for (e, c) in self.coeffs.iter().chain(other.coeffs.iter()) {
            out.add_term(e.clone(), c, f);
        }
        out
    }

    pub fn neg<F: Field<Elem = T>>(&self, f: &F) -> Self {
        let coeffs = self.coeffs.iter().map(|(e, c)| (e.clone(), f.neg(c))).collect();
        TruncatedSeries { vars: self.vars.clone(), cutoff: self.cutoff, coeffs }
    }

    pub fn sub<F: Field<Elem = T>>(&self, other: &Self, f: &F) -> Self {
        self.add(&other.neg(f), f)
    }

    pub fn scale<F: Field<Elem = T>>(&self, k: &T, f: &F) -> Self {
        let mut out = Self::zero(self.vars.clone(), self.cutoff);
        for (e, c) in &self.coeffs {
            out.add_term(e.clone(), &f.mul(c, k), f);
        }
        out
    }

    pub fn mul<F: Field<Elem = T>>(&self, other: &Self, f: &F) -> Self {
        self.check_compatible(other);
        let cutoff = self.joint_cutoff(other);
        let mut out = Self::zero(self.vars.clone(), cutoff);
        for (ea, ca) in &self.coeffs {
            let da = degree(ea);
            if da > cutoff {
                continue;
            }
            for (eb, cb) in &other.coeffs {
                if da + degree(eb) > cutoff {
                    continue;
                }
                let e: Exponents = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
                out.add_term(e, &f.mul(ca, cb), f);
            }
        }
        out
    }

    /// Homogeneous components by total degree, index `n` holding degree `n`.
    fn graded(&self) -> Vec<Self> {
        let mut parts: Vec<Self> = (0..=self.cutoff).map(|_| Self::zero(self.vars.clone(), self.cutoff)).collect();
        for (e, c) in &self.coeffs {
            parts[degree(e) as usize].coeffs.insert(e.clone(), c.clone());
        }
        parts
    }

    fn constant_term<F: Field<Elem = T>>(&self, f: &F) -> T {
        self.coeffs.get(&vec![0; self.nvars()]).cloned().unwrap_or_else(|| f.zero())
    }

    fn from_graded(vars: Vec<String>, cutoff: u32, parts: Vec<Self>) -> Self {
        let mut out = Self::zero(vars, cutoff);
        for p in parts {
            out.coeffs.extend(p.coeffs);
        }
        out
    }

    /// Logarithm of a series with constant term 1, via the degree
    /// derivation: `n g_n = n f_n - sum_{k<n} k g_k f_{n-k}`.
    pub fn log<F: Field<Elem = T>>(&self, f: &F) -> Result<Self> {
        if !f.is_zero(&f.sub(&self.constant_term(f), &f.one())) {
            return Err(Error::NonUnitConstantTerm { op: "log", expected: 1 });
        }
        let fp = self.graded();
        let d = self.cutoff as usize;
        let mut g: Vec<Self> = vec![Self::zero(self.vars.clone(), self.cutoff)];
        for n in 1..=d {
            let mut acc = Self::zero(self.vars.clone(), self.cutoff);
            for k in 1..n {
                let term = g[k].mul(&fp[n - k], f).scale(&f.from_rational(&ratio(k as i64, n as i64)), f);
                acc = acc.add(&term, f);
            }
            g.push(fp[n].sub(&acc, f));
        }
        Ok(Self::from_graded(self.vars.clone(), self.cutoff, g))
    }

    /// Exponential of a series with constant term 0:
    /// `n h_n = sum_{k=1..n} k g_k h_{n-k}`.
    pub fn exp<F: Field<Elem = T>>(&self, f: &F) -> Result<Self> {
        if !f.is_zero(&self.constant_term(f)) {
            return Err(Error::NonUnitConstantTerm { op: "exp", expected: 0 });
        }
        let gp = self.graded();
        let d = self.cutoff as usize;
        let mut h: Vec<Self> = vec![Self::one(self.vars.clone(), self.cutoff, f)];
        for n in 1..=d {
            let mut acc = Self::zero(self.vars.clone(), self.cutoff);
            for k in 1..=n {
                let term = gp[k].mul(&h[n - k], f).scale(&f.from_rational(&ratio(k as i64, n as i64)), f);
                acc = acc.add(&term, f);
            }
            h.push(acc);
        }
        Ok(Self::from_graded(self.vars.clone(), self.cutoff, h))
    }

    /// `s^E = exp(E log s)`.
    pub fn pow_scalar<F: Field<Elem = T>>(&self, e: &T, f: &F) -> Result<Self> {
        self.log(f)?.scale(e, f).exp(f)
    }

    /// Same series with coefficients moved to another field.
    pub fn map_coeffs<U, G>(&self, g: &G, mut lift: impl FnMut(&T) -> Result<U>) -> Result<TruncatedSeries<U>>
    where
        U: Clone + PartialEq + std::fmt::Debug,
        G: Field<Elem = U>,
    {
        let mut out = TruncatedSeries::zero(self.vars.clone(), self.cutoff);
        for (e, c) in &self.coeffs {
            out.add_term(e.clone(), &lift(c)?, g);
        }
        Ok(out)
    }

    /// Truncate further.
    pub fn truncate(&self, cutoff: u32) -> Self {
        let coeffs = self.coeffs.iter().filter(|(e, _)| degree(e) <= cutoff).map(|(e, c)| (e.clone(), c.clone())).collect();
        TruncatedSeries { vars: self.vars.clone(), cutoff: cutoff.min(self.cutoff), coeffs }
    }

    /// Sorted `[{"exponents": [...], "coeff": "..."}]`.
    pub fn to_json<F: Field<Elem = T>>(&self, f: &F) -> serde_json::Value {
        #[derive(Serialize)]
        struct Entry<'a> {
            exponents: &'a [u32],
            coeff: String,
        }
        let entries: Vec<Entry> =
            self.coeffs.iter().map(|(e, c)| Entry { exponents: e, coeff: f.render(c) }).collect();
        serde_json::to_value(entries).expect("series entries serialize")
    }
}

fn ratio(a: i64, b: i64) -> BigRational {
    BigRational::new(BigInt::from(a), BigInt::from(b))
}

/// A monomial `sign * x^exps` with possibly negative exponents.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignedMonomial {
    pub sign: i8,
    pub exps: Vec<i64>,
}

impl SignedMonomial {
    pub fn new(sign: i8, exps: Vec<i64>) -> Self {
        assert!(sign == 1 || sign == -1);
        SignedMonomial { sign, exps }
    }

    pub fn one(n: usize) -> Self {
        Self::new(1, vec![0; n])
    }

    pub fn inverse(&self) -> Self {
        Self::new(self.sign, self.exps.iter().map(|x| -x).collect())
    }

    fn mul_pow(&self, other: &Self, k: i64) -> Self {
        let sign = if other.sign < 0 && k % 2 != 0 { -self.sign } else { self.sign };
        Self::new(sign, self.exps.iter().zip(&other.exps).map(|(a, b)| a + k * b).collect())
    }

    fn pow(&self, k: i64) -> Self {
        Self::one(self.exps.len()).mul_pow(self, k)
    }

    fn degree(&self) -> i64 {
        self.exps.iter().sum()
    }
}

/// `log M(a, b) = sum_{n,k >= 1} (n/k) (a b^n)^k` truncated at total degree
/// `cutoff`, as rational coefficients. `b` must have positive degree.
pub fn log_macmahon(a: &SignedMonomial, b: &SignedMonomial, cutoff: u32) -> Result<BTreeMap<Exponents, BigRational>> {
    assert!(b.degree() > 0 && b.exps.iter().all(|&x| x >= 0), "b must be a nonconstant monomial");
    let mut out: BTreeMap<Exponents, BigRational> = BTreeMap::new();
    let first = a.mul_pow(b, 1);
    if first.exps.iter().any(|&x| x < 0) {
        return Err(Error::NegativeExponent(format!("{:?}", first.exps)));
    }
    let mut n = 1i64;
    loop {
        let base = a.mul_pow(b, n);
        if base.degree() > cutoff as i64 {
            break;
        }
        if base.exps.iter().any(|&x| x < 0) {
            return Err(Error::NegativeExponent(format!("{:?}", base.exps)));
        }
        if base.degree() == 0 {
            // a b^n = +-1 would make the constant term of log infinite
            return Err(Error::NegativeExponent(format!("degree-zero factor {:?}", base.exps)));
        }
        let mut k = 1i64;
        loop {
            let term = base.pow(k);
            if term.degree() > cutoff as i64 {
                break;
            }
            let e: Exponents = term.exps.iter().map(|&x| x as u32).collect();
            let c = ratio(n * term.sign as i64, k);
            let slot = out.entry(e).or_insert_with(BigRational::zero);
            *slot += c;
            k += 1;
        }
        n += 1;
    }
    out.retain(|_, c| !c.is_zero());
    Ok(out)
}

fn lift_log<F: Field>(vars: Vec<String>, cutoff: u32, log: &BTreeMap<Exponents, BigRational>, f: &F) -> TruncatedSeries<F::Elem> {
    let mut s = TruncatedSeries::zero(vars, cutoff);
    for (e, c) in log {
        s.add_term(e.clone(), &f.from_rational(c), f);
    }
    s
}

/// `M(-q) = prod (1 - (-q)^n)^{-n}` in the single variable `q`.
pub fn macmahon_neg<F: Field>(cutoff: u32, f: &F) -> TruncatedSeries<F::Elem> {
    let log = log_macmahon(&SignedMonomial::one(1), &SignedMonomial::new(-1, vec![1]), cutoff)
        .expect("positive base");
    lift_log(toric_vars(), cutoff, &log, f).exp(f).expect("log has no constant term")
}

/// `M(q) = prod (1 - q^n)^{-n}`.
pub fn macmahon<F: Field>(cutoff: u32, f: &F) -> TruncatedSeries<F::Elem> {
    let log = log_macmahon(&SignedMonomial::one(1), &SignedMonomial::new(1, vec![1]), cutoff)
        .expect("positive base");
    lift_log(toric_vars(), cutoff, &log, f).exp(f).expect("log has no constant term")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MacKind {
    Plain,
    Inverse,
}

/// `q_[i,j] = q_i ... q_j`.
pub fn q_interval(i: u32, j: u32, r: u32) -> SignedMonomial {
    SignedMonomial::new(1, (0..r).map(|l| i64::from(l >= i && l <= j)).collect())
}

/// `-Q` with `Q = q_0 ... q_{r-1}`.
pub fn minus_q(r: u32) -> SignedMonomial {
    SignedMonomial::new(-1, vec![1; r as usize])
}

fn check_interval(i: u32, j: u32, r: u32) -> Result<()> {
    if j >= r || i > j {
        return Err(Error::Config(format!("need i <= j < r, got i = {i}, j = {j}, r = {r}")));
    }
    Ok(())
}

/// `log M(q_[i,j]^{+-1}, -Q)` as rationals.
pub fn log_mac_refined(kind: MacKind, i: u32, j: u32, r: u32, cutoff: u32) -> Result<BTreeMap<Exponents, BigRational>> {
    check_interval(i, j, r)?;
    let a = q_interval(i, j, r);
    let a = match kind {
        MacKind::Plain => a,
        MacKind::Inverse => a.inverse(),
    };
    log_macmahon(&a, &minus_q(r), cutoff)
}

pub fn mac_refined<F: Field>(kind: MacKind, i: u32, j: u32, r: u32, cutoff: u32, f: &F) -> Result<TruncatedSeries<F::Elem>> {
    let log = log_mac_refined(kind, i, j, r, cutoff)?;
    lift_log(orbifold_vars(r), cutoff, &log, f).exp(f)
}

fn log_tilde_m(i: u32, j: u32, r: u32, cutoff: u32) -> Result<BTreeMap<Exponents, BigRational>> {
    let mut log = log_mac_refined(MacKind::Plain, i, j, r, cutoff)?;
    for (e, c) in log_mac_refined(MacKind::Inverse, i, j, r, cutoff)? {
        *log.entry(e).or_insert_with(BigRational::zero) += c;
    }
    log.retain(|_, c| !c.is_zero());
    Ok(log)
}

/// `tilde M(a, b) = M(a, b) M(a^{-1}, b)` at `a = q_[i,j]`, `b = -Q`.
pub fn tilde_m<F: Field>(i: u32, j: u32, r: u32, cutoff: u32, f: &F) -> Result<TruncatedSeries<F::Elem>> {
    let log = log_tilde_m(i, j, r, cutoff)?;
    lift_log(orbifold_vars(r), cutoff, &log, f).exp(f)
}

fn s(i: usize) -> LinearForm {
    LinearForm::s(i)
}

fn poly_of(forms: &[LinearForm]) -> Poly {
    forms.iter().fold(Poly::one(), |p, l| p.mul_linear(l))
}

/// `sum_charts (m - lweight) e3(w)/e4(w)`, i.e. `(m - lweight) sum_i 1/w_i`.
pub fn exponent_toric(geom: &Geometry) -> Result<FactoredRational> {
    let charts = match geom {
        Geometry::Toric { charts, .. } => charts,
        Geometry::Orbifold { .. } => {
            return Err(Error::Config("toric exponent requested for an orbifold".into()));
        }
    };
    let mut total = FactoredRational::zero();
    for chart in charts {
        let mut inv = FactoredRational::zero();
        for w in &chart.weights {
            inv = &inv + &FactoredRational::inverse_form(w)?;
        }
        let yw = &LinearForm::m() - &chart.lweight();
        total = &total + &(&FactoredRational::form(&yw) * &inv);
    }
    Ok(total)
}

/// `-(m/s4)(r(s1+s2)/s3 + (s1+s2)(s1+s2+s3)/(r s1 s2))`, the closed form of
/// the exponent for the resolved `A_{r-1}` singularity times `C^2`.
pub fn exponent_a_series_printed(r: u32) -> FactoredRational {
    let r = r as i64;
    let s12 = &s(1) + &s(2);
    let s123 = &s12 + &s(3);
    let first = FactoredRational::new(poly_of(&[LinearForm::m(), s12.clone()]).scale(&ratio(-r, 1)), &[(s(4), 1), (s(3), 1)]);
    let second = FactoredRational::new(
        poly_of(&[LinearForm::m(), s12, s123]).scale(&ratio(-1, r)),
        &[(s(4), 1), (s(1), 1), (s(2), 1)],
    );
    &first.expect("nonzero forms") + &second.expect("nonzero forms")
}

/// `-m (s1+s2)/(s3 s4)`.
pub fn exponent_orbifold_tilde() -> FactoredRational {
    FactoredRational::new(poly_of(&[LinearForm::m(), &s(1) + &s(2)]).scale(&ratio(-1, 1)), &[(s(3), 1), (s(4), 1)])
        .expect("nonzero forms")
}

/// Exponents of `M(1,-Q)` and of each `tilde M` in the three-dimensional
/// formula, `-r(s1+s2)/s3 - (s1+s2)(s1+s2+s3)/(r s1 s2)` and `-(s1+s2)/s3`.
pub fn exponents_orbifold_3d(r: u32) -> (FactoredRational, FactoredRational) {
    let ri = r as i64;
    let s12 = &s(1) + &s(2);
    let s123 = &s12 + &s(3);
    let a = FactoredRational::new(Poly::from_linear(&s12).scale(&ratio(-ri, 1)), &[(s(3), 1)]).expect("nonzero");
    let b = FactoredRational::new(poly_of(&[s12.clone(), s123]).scale(&ratio(-1, ri)), &[(s(1), 1), (s(2), 1)])
        .expect("nonzero");
    let e2 = FactoredRational::new(Poly::from_linear(&s12).scale(&ratio(-1, 1)), &[(s(3), 1)]).expect("nonzero");
    (&a + &b, e2)
}

/// `M(-q)^E` with `E` the toric exponent of `geom`.
pub fn rhs_toric<F: Field>(geom: &Geometry, cutoff: u32, f: &F) -> Result<TruncatedSeries<F::Elem>> {
    let e = f.lift(&exponent_toric(geom)?)?;
    macmahon_neg(cutoff, f).pow_scalar(&e, f)
}

/// `exp(E1 log M(1,-Q) + E2 sum_{0<i<=j<r} log tilde M(q_[i,j], -Q))`.
fn rhs_orbifold_with<F: Field>(r: u32, cutoff: u32, e1: &FactoredRational, e2: &FactoredRational, f: &F) -> Result<TruncatedSeries<F::Elem>> {
    assert!(r >= 1);
    let vars = orbifold_vars(r);
    let log_m = log_macmahon(&SignedMonomial::one(r as usize), &minus_q(r), cutoff)?;
    let mut log = lift_log(vars.clone(), cutoff, &log_m, f).scale(&f.lift(e1)?, f);
    let mut tilde: BTreeMap<Exponents, BigRational> = BTreeMap::new();
    for i in 1..r {
        for j in i..r {
            for (e, c) in log_tilde_m(i, j, r, cutoff)? {
                *tilde.entry(e).or_insert_with(BigRational::zero) += c;
            }
        }
    }
    log = log.add(&lift_log(vars, cutoff, &tilde, f).scale(&f.lift(e2)?, f), f);
    log.exp(f)
}

pub fn rhs_orbifold<F: Field>(r: u32, cutoff: u32, f: &F) -> Result<TruncatedSeries<F::Elem>> {
    rhs_orbifold_with(r, cutoff, &exponent_a_series_printed(r), &exponent_orbifold_tilde(), f)
}

pub fn rhs_orbifold_3d<F: Field>(r: u32, cutoff: u32, f: &F) -> Result<TruncatedSeries<F::Elem>> {
    let (e1, e2) = exponents_orbifold_3d(r);
    rhs_orbifold_with(r, cutoff, &e1, &e2, f)
}

/// Exact rational series, for the generic identities that need no variables.
pub fn rational_series(vars: Vec<String>, cutoff: u32, terms: &[(Exponents, i64)]) -> TruncatedSeries<FactoredRational> {
    let f = crate::algebra::ExactRF;
    let mut out = TruncatedSeries::zero(vars, cutoff);
    for (e, c) in terms {
        out.add_term(e.clone(), &FactoredRational::int(*c), &f);
    }
    out
}
