//! Weights of characters and equivariant Euler classes of virtual
//! representations.

use std::collections::BTreeMap;


use super::class::{EquivariantClass, Monomial};
use super::linear::LinearForm;
use super::rational::{FactoredRational, FormProduct};
use crate::error::{Error, Result};

/// Assigns a linear form to each character of `T x C*_m`.
pub trait WeightMap {
    /// Weights of `t1..t4`; must sum to the zero form.
    fn tangent_weights(&self) -> &[LinearForm; 4];

    /// Weight of the character `y`. Plain `m` unless overridden.
    fn y_weight(&self) -> LinearForm {
        LinearForm::m()
    }

    fn weight(&self, mono: &Monomial) -> LinearForm {
        let w = self.tangent_weights();
        let mut acc = self.y_weight().scale_int(mono.y as i64);
        for (a, wi) in mono.t.iter().zip(w) {
            if *a != 0 {
                acc = &acc + &wi.scale_int(*a as i64);
            }
        }
        acc
    }
}

/// The standard chart of `C^4`: `t_i` has weight `s_i`, `s4 = -s1-s2-s3`.
#[derive(Clone, Debug)]
pub struct StandardWeights {
    w: [LinearForm; 4],
}

impl Default for StandardWeights {
    fn default() -> Self {
        StandardWeights { w: [1, 2, 3, 4].map(LinearForm::s) }
    }
}

impl WeightMap for StandardWeights {
    fn tangent_weights(&self) -> &[LinearForm; 4] {
        &self.w
    }
}

pub fn weight_map(mono: &Monomial, chart: &impl WeightMap) -> LinearForm {
    chart.weight(mono)
}

/// Net multiplicity of each weight in `f`, grouped by exact form.
pub fn weight_multiplicities(f: &EquivariantClass, chart: &impl WeightMap) -> BTreeMap<LinearForm, i64> {
    let mut net: BTreeMap<LinearForm, i64> = BTreeMap::new();
    for (mono, &c) in f.terms() {
        *net.entry(chart.weight(mono)).or_insert(0) += c;
    }
    net.retain(|_, k| *k != 0);
    net
}

/// `e(f) = prod weight^multiplicity`, kept factored.
pub fn euler_factors(f: &EquivariantClass, chart: &impl WeightMap) -> Result<FormProduct> {
    let net = weight_multiplicities(f, chart);
    let mut out = FormProduct::one();
    for (form, k) in &net {
        if form.is_zero() {
            return Err(Error::ZeroForm(*k));
        }
        out.push(form, *k)?;
    }
    Ok(out)
}

pub fn euler_class(f: &EquivariantClass, chart: &impl WeightMap) -> Result<FactoredRational> {
    euler_factors(f, chart).map(|p| p.to_rational())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Poly;

    fn mono(t: [i32; 4], y: i32) -> EquivariantClass {
        EquivariantClass::monomial(Monomial::new(t, y), 1)
    }

    #[test]
    fn weight_examples() {
        let c = StandardWeights::default();
        assert_eq!(weight_map(&Monomial::t([1, 0, 0, 0]), &c), LinearForm::s(1));
        assert!(weight_map(&Monomial::t([1, 1, 1, 1]), &c).is_zero());
        assert_eq!(
            weight_map(&Monomial::new([-1, -1, 0, 0], 1), &c),
            LinearForm::from_ints([-1, -1, 0, 1])
        );
    }

    #[test]
    fn euler_of_y() {
        let e = euler_class(&EquivariantClass::y(), &StandardWeights::default()).unwrap();
        assert_eq!(e, FactoredRational::form(&LinearForm::m()));
    }

    #[test]
    fn single_box_orbifold_class() {
        // y + (t1t2)^{-1} - t3^{-1} - (t1t2t3)^{-1}
        let f = &(&(&mono([0; 4], 1) + &mono([-1, -1, 0, 0], 0)) - &mono([0, 0, -1, 0], 0))
            - &mono([-1, -1, -1, 0], 0);
        let e = euler_class(&f, &StandardWeights::default()).unwrap();
        let expect = FactoredRational::new(
            Poly::from_linear(&LinearForm::m()).mul_linear(&(&LinearForm::s(1) + &LinearForm::s(2))),
            &[(LinearForm::s(3), 1), (LinearForm::s(4), 1)],
        )
        .unwrap();
        assert_eq!(e, expect);
    }

    #[test]
    fn zero_form_is_rejected() {
        let f = mono([1, 1, 1, 1], 0);
        assert_eq!(euler_class(&f, &StandardWeights::default()), Err(Error::ZeroForm(1)));
        // cancelling zero weights are fine
        let g = &(&f - &mono([2, 2, 2, 2], 0)) + &mono([0, 0, 0, 0], 1);
        assert!(euler_class(&g, &StandardWeights::default()).is_ok());
    }
}
