//! K-theoretic vertices of solid partitions and their signed localized
//! contributions.
//!
//! Conventions: `Z` is the character of the structure sheaf of the fixed
//! subscheme, the bar involution inverts `t1..t4`, and the Euler class of a
//! character `t^a y^b` is the linear form `sum a_i w_i + b m` with `w` the
//! tangent weights of the chart.

use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::algebra::{
    euler_factors, weight_multiplicities, EquivariantClass, FactoredRational, FormProduct, LinearForm, Monomial,
    StandardWeights, WeightMap,
};
use crate::error::{Error, Result};
use crate::partitions::SolidPartition;

/// A torus-fixed affine chart: four tangent weights summing to zero and the
/// character of the line bundle `L` at the fixed point, in chart coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Chart {
    pub weights: [LinearForm; 4],
    pub line: [i32; 4],
}

/// A coefficient in a chart file: an integer or a rational such as `"1/2"`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Coeff {
    Int(i64),
    Text(String),
}

impl Coeff {
    fn value(&self) -> Result<BigRational> {
        match self {
            Coeff::Int(n) => Ok(BigRational::from_integer((*n).into())),
            Coeff::Text(t) => {
                t.trim().parse().map_err(|_| Error::Config(format!("bad coefficient `{t}`")))
            }
        }
    }
}

/// File form of a chart: each weight as coefficients of `(s1, s2, s3)` or
/// `(s1, s2, s3, m)`, plus the line bundle character (default trivial).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChartSpec {
    pub weights: Vec<Vec<Coeff>>,
    #[serde(default)]
    pub line: [i32; 4],
}

impl TryFrom<&ChartSpec> for Chart {
    type Error = Error;
    fn try_from(spec: &ChartSpec) -> Result<Chart> {
        if spec.weights.len() != 4 {
            return Err(Error::Config(format!("a chart needs 4 weights, got {}", spec.weights.len())));
        }
        let mut forms = Vec::with_capacity(4);
        for row in &spec.weights {
            let mut c: Vec<BigRational> = row.iter().map(Coeff::value).collect::<Result<_>>()?;
            match c.len() {
                3 => c.push(BigRational::zero()),
                4 => {}
                n => return Err(Error::Config(format!("a weight needs 3 or 4 coefficients, got {n}"))),
            }
            let c: [BigRational; 4] = c.try_into().expect("length checked");
            forms.push(LinearForm::from_coeffs(c));
        }
        Chart::new(forms.try_into().expect("length checked"), spec.line)
    }
}

/// A custom toric geometry as read from a chart file.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeometrySpec {
    #[serde(default = "custom_name")]
    pub name: String,
    pub charts: Vec<ChartSpec>,
}

fn custom_name() -> String {
    "custom".into()
}

impl TryFrom<&GeometrySpec> for Geometry {
    type Error = Error;
    fn try_from(spec: &GeometrySpec) -> Result<Geometry> {
        let charts = spec.charts.iter().map(Chart::try_from).collect::<Result<Vec<_>>>()?;
        Geometry::custom(&spec.name, charts)
    }
}

impl Chart {
    pub fn new(weights: [LinearForm; 4], line: [i32; 4]) -> Result<Self> {
        if !LinearForm::sum(&weights).is_zero() {
            return Err(Error::Config(format!(
                "chart weights {} do not sum to zero",
                weights.iter().map(|w| w.to_string()).collect::<Vec<_>>().join(", ")
            )));
        }
        if weights.iter().any(LinearForm::is_zero) {
            return Err(Error::Config("chart has a zero tangent weight".into()));
        }
        Ok(Chart { weights, line })
    }

    /// `(s1, s2, s3, s4)` with `L = O`.
    pub fn standard() -> Self {
        Chart { weights: [1, 2, 3, 4].map(LinearForm::s), line: [0; 4] }
    }

    /// Equivariant weight of `L` at this fixed point.
    pub fn lweight(&self) -> LinearForm {
        self.weights
            .iter()
            .zip(self.line)
            .fold(LinearForm::zero(), |acc, (w, c)| &acc + &w.scale_int(c as i64))
    }

    /// Stable text used for cache keys.
    pub fn describe(&self) -> String {
        let w: Vec<String> = self.weights.iter().map(|w| w.to_string()).collect();
        format!("[{}|L={:?}]", w.join(","), self.line)
    }
}

impl WeightMap for Chart {
    fn tangent_weights(&self) -> &[LinearForm; 4] {
        &self.weights
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Geometry {
    Toric { name: String, charts: Vec<Chart> },
    Orbifold { r: u32 },
}

impl Geometry {
    pub fn c4() -> Self {
        Geometry::Toric { name: "c4".into(), charts: vec![Chart::standard()] }
    }

    /// `C^4` with `L` of character `t^c` at the origin.
    pub fn c4_with_line(c: [i32; 4]) -> Self {
        let mut chart = Chart::standard();
        chart.line = c;
        Geometry::Toric { name: format!("c4(L=t^{c:?})"), charts: vec![chart] }
    }

    /// The minimal resolution of `C^2/Z_r` times `C^2`: `r` charts, chart `a`
    /// having weights `((a+1-r)s1 + (a+1)s2, (r-a)s1 - a s2, s3, s4)`.
    pub fn a_series(r: u32) -> Self {
        assert!(r >= 1);
        let r_ = r as i64;
        let charts = (0..r_)
            .map(|a| Chart {
                weights: [
                    LinearForm::from_ints([a + 1 - r_, a + 1, 0, 0]),
                    LinearForm::from_ints([r_ - a, -a, 0, 0]),
                    LinearForm::s(3),
                    LinearForm::s(4),
                ],
                line: [0; 4],
            })
            .collect();
        Geometry::Toric { name: format!("a{}xc2", r - 1), charts }
    }

    pub fn orbifold(r: u32) -> Self {
        Geometry::Orbifold { r }
    }

    pub fn custom(name: &str, charts: Vec<Chart>) -> Result<Self> {
        if charts.is_empty() {
            return Err(Error::Config("a toric geometry needs at least one chart".into()));
        }
        let charts = charts.into_iter().map(|c| Chart::new(c.weights, c.line)).collect::<Result<_>>()?;
        Ok(Geometry::Toric { name: name.into(), charts })
    }

    /// Named geometries: `c4`, `a{k}xc2` (k >= 0), `orbifold-zr` (needs `r`).
    pub fn from_name(name: &str, r: Option<u32>) -> Result<Self> {
        let lower = name.to_ascii_lowercase();
        if lower == "c4" {
            return Ok(Self::c4());
        }
        if lower == "orbifold-zr" || lower == "orbifold" {
            let r = r.ok_or_else(|| Error::Config("orbifold geometry needs --r".into()))?;
            if r == 0 {
                return Err(Error::Config("r must be at least 1".into()));
            }
            return Ok(Self::orbifold(r));
        }
        if let Some(k) = lower.strip_prefix('a').and_then(|s| s.strip_suffix("xc2")) {
            let k: u32 = k.parse().map_err(|_| Error::Config(format!("unknown geometry `{name}`")))?;
            return Ok(Self::a_series(k + 1));
        }
        Err(Error::Config(format!("unknown geometry `{name}`")))
    }

    pub fn name(&self) -> String {
        match self {
            Geometry::Toric { name, .. } => name.clone(),
            Geometry::Orbifold { r } => format!("orbifold-z{r}"),
        }
    }

    pub fn charts(&self) -> Vec<Chart> {
        match self {
            Geometry::Toric { charts, .. } => charts.clone(),
            Geometry::Orbifold { .. } => vec![Chart::standard()],
        }
    }

    pub fn describe(&self) -> String {
        match self {
            Geometry::Toric { charts, .. } => {
                charts.iter().map(Chart::describe).collect::<Vec<_>>().join(";")
            }
            Geometry::Orbifold { r } => format!("orbifold[{r}]"),
        }
    }
}

fn mono(t: [i32; 4], y: i32) -> EquivariantClass {
    EquivariantClass::monomial(Monomial::new(t, y), 1)
}

/// `prod_{i in axes} (1 - t_i)`.
fn p_axes(axes: &[usize]) -> EquivariantClass {
    axes.iter().fold(EquivariantClass::one(), |acc, &i| &acc * &(&EquivariantClass::one() - &EquivariantClass::t(i)))
}

/// `v^{DT,axis} = Z - bar(P_{jkl}) Z bar(Z)` where `{j,k,l}` omit `axis`.
/// Axis 4 gives the usual square root with `P_123`.
pub fn v_dt(pi: &SolidPartition, axis: usize) -> EquivariantClass {
    assert!((1..=4).contains(&axis), "axis must be in 1..=4");
    let others: Vec<usize> = (1..=4).filter(|&i| i != axis).collect();
    let z = pi.character();
    let zz = &z * &z.dual_t();
    &z - &(&p_axes(&others).dual_t() * &zz)
}

/// `V = Z + bar(Z) - P_1234 Z bar(Z)`.
pub fn big_v(pi: &SolidPartition) -> EquivariantClass {
    let z = pi.character();
    let zb = z.dual_t();
    &(&z + &zb) - &(&p_axes(&[1, 2, 3, 4]) * &(&z * &zb))
}

fn check_fixed(f: &EquivariantClass, chart: &impl WeightMap) -> Result<()> {
    let net = weight_multiplicities(f, chart);
    match net.get(&LinearForm::zero()) {
        Some(&k) => Err(Error::FixedTerm(k)),
        None => Ok(()),
    }
}

/// `v - y bar(t^c Z)` where `t^c` is the character of `L` on the chart.
pub fn v_tilde_axis(pi: &SolidPartition, chart: &Chart, axis: usize) -> Result<EquivariantClass> {
    let shift = Monomial::new(chart.line.map(|c| -c), 1);
    let tail = pi.character().dual_t().shift(&shift);
    let out = &v_dt(pi, axis) - &tail;
    check_fixed(&out, chart)?;
    Ok(out)
}

pub fn v_tilde(pi: &SolidPartition, chart: &Chart) -> Result<EquivariantClass> {
    v_tilde_axis(pi, chart, 4)
}

/// Keep monomials with `a1 - a2 = 0 mod r`.
pub fn zr_fix(f: &EquivariantClass, r: u32) -> EquivariantClass {
    assert!(r >= 1);
    f.filter(|m| (m.t[0] as i64 - m.t[1] as i64).rem_euclid(r as i64) == 0)
}

/// Sum of `Z^(l) bar(Z^(k))` over color pairs with `l - k = shift mod r`.
fn color_pair_sum(parts: &[EquivariantClass], r: u32, shift: i64) -> EquivariantClass {
    let mut acc = EquivariantClass::zero();
    for (l, zl) in parts.iter().enumerate() {
        for (k, zk) in parts.iter().enumerate() {
            if (l as i64 - k as i64 - shift).rem_euclid(r as i64) == 0 {
                acc = &acc + &(zl * &zk.dual_t());
            }
        }
    }
    acc
}

/// The `Z_r`-fixed square root, assembled from the colored characters.
pub fn v_dt_zr(pi: &SolidPartition, r: u32) -> EquivariantClass {
    assert!(r >= 1, "r must be positive");
    let parts: Vec<EquivariantClass> = (0..r).map(|l| pi.colored_character(r, l)).collect();
    let same = color_pair_sum(&parts, r, 0);
    let plus = color_pair_sum(&parts, r, 1);
    let minus = color_pair_sum(&parts, r, -1);
    let one = EquivariantClass::one();
    let bracket = &(&(&(&one + &mono([-1, -1, 0, 0], 0)) * &same) - &(&mono([-1, 0, 0, 0], 0) * &plus))
        - &(&mono([0, -1, 0, 0], 0) * &minus);
    let lead = &one - &mono([0, 0, -1, 0], 0);
    &parts[0] - &(&lead * &bracket)
}

/// `v^{Z_r} - y bar(Z^(0))`.
pub fn v_tilde_zr(pi: &SolidPartition, r: u32) -> Result<EquivariantClass> {
    let z0 = pi.colored_character(r, 0);
    let out = &v_dt_zr(pi, r) - &(&EquivariantClass::y() * &z0.dual_t());
    check_fixed(&out, &StandardWeights::default())?;
    Ok(out)
}

fn signed(mut e: FormProduct, odd: bool) -> FormProduct {
    if odd {
        e.negate();
    }
    e
}

/// `(-1)^mu e(-v~)` on a chart, kept factored.
pub fn contribution_factors(pi: &SolidPartition, chart: &Chart) -> Result<FormProduct> {
    let vt = v_tilde(pi, chart)?;
    let e = euler_factors(&-&vt, chart)?;
    Ok(signed(e, pi.mu() % 2 == 1))
}

pub fn contribution(pi: &SolidPartition, chart: &Chart) -> Result<FactoredRational> {
    contribution_factors(pi, chart).map(|p| p.to_rational())
}

/// `(-1)^mu e(-v~^{Z_r})` on the standard chart.
pub fn contribution_orbifold_factors(pi: &SolidPartition, r: u32) -> Result<FormProduct> {
    let vt = v_tilde_zr(pi, r)?;
    let e = euler_factors(&-&vt, &Chart::standard())?;
    Ok(signed(e, pi.mu() % 2 == 1))
}

pub fn contribution_orbifold(pi: &SolidPartition, r: u32) -> Result<FactoredRational> {
    contribution_orbifold_factors(pi, r).map(|p| p.to_rational())
}

/// `(-1)^{mu^i} e(-v~^{DT,i})` on the standard chart with `L = O`.
pub fn axis_contribution(pi: &SolidPartition, axis: usize) -> Result<FormProduct> {
    let chart = Chart::standard();
    let vt = v_tilde_axis(pi, &chart, axis)?;
    let e = euler_factors(&-&vt, &chart)?;
    Ok(signed(e, pi.mu_axis(axis) % 2 == 1))
}

/// Rewrite in the ring where `t1 t2 t3 t4 = 1`, eliminating `t4`. Classes
/// that agree there have the same Euler class on every Calabi-Yau chart.
pub fn cy_reduce(f: &EquivariantClass) -> EquivariantClass {
    f.map_monomials(|m| Monomial::new([m.t[0] - m.t[3], m.t[1] - m.t[3], m.t[2] - m.t[3], 0], m.y))
}

/// Both sides of the alternative sign rule for `[C^4/Z_r]`:
/// `(-1)^mu e(-(v - y bar(Z^(0))))` and
/// `(-1)^{|pi|_0 + mu} e(-(v - y^{-1} Z^(0)))`.
pub fn alt_sign_sides(pi: &SolidPartition, r: u32) -> Result<(FormProduct, FormProduct)> {
    let chart = Chart::standard();
    let v = v_dt_zr(pi, r);
    let z0 = pi.colored_character(r, 0);
    let lhs_class = &v - &(&EquivariantClass::y() * &z0.dual_t());
    let rhs_class = &v - &(&mono([0; 4], -1) * &z0);
    let n0 = pi.color_vector(r)[0];
    let lhs = signed(euler_factors(&-&lhs_class, &chart)?, pi.mu() % 2 == 1);
    let rhs = signed(euler_factors(&-&rhs_class, &chart)?, (pi.mu() + n0) % 2 == 1);
    Ok((lhs, rhs))
}

/// Constant term of `v~^{Z_r}` after `t1 = x, t2 = x^{-1}, t4 = t3^{-1}`.
pub fn reduced_constant_term(vt: &EquivariantClass) -> i64 {
    vt.terms()
        .filter(|(m, _)| m.y == 0 && m.t[0] == m.t[1] && m.t[2] == m.t[3])
        .map(|(_, c)| *c)
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Poly;
    use crate::partitions::enumerate_up_to;

    fn p(s: &str) -> SolidPartition {
        s.parse().unwrap()
    }

    fn single_box_v() -> EquivariantClass {
        let terms = [
            ([-1, 0, 0, 0], 1),
            ([0, -1, 0, 0], 1),
            ([0, 0, -1, 0], 1),
            ([-1, -1, 0, 0], -1),
            ([-1, 0, -1, 0], -1),
            ([0, -1, -1, 0], -1),
            ([-1, -1, -1, 0], 1),
        ];
        EquivariantClass::from_terms(terms.into_iter().map(|(t, c)| (Monomial::t(t), c)))
    }

    #[test]
    fn single_box_vertex() {
        let one = p("0,0,0,0");
        assert_eq!(v_dt(&one, 4), single_box_v());
        assert!(v_dt(&SolidPartition::empty(), 4).is_zero());
        assert_eq!(cy_reduce(&(&v_dt(&one, 4) + &v_dt(&one, 4).dual_t())), cy_reduce(&big_v(&one)));
        assert_eq!(big_v(&one), &EquivariantClass::one().scale(2) - &p_axes(&[1, 2, 3, 4]));
        assert_eq!(v_tilde(&one, &Chart::standard()).unwrap(), &single_box_v() - &EquivariantClass::y());
        assert!(v_tilde(&SolidPartition::empty(), &Chart::standard()).unwrap().is_zero());
    }

    #[test]
    fn single_box_orbifold_vertex() {
        let one = p("0,0,0,0");
        let expect_v = &EquivariantClass::one()
            - &(&(&EquivariantClass::one() - &mono([0, 0, -1, 0], 0))
                * &(&EquivariantClass::one() + &mono([-1, -1, 0, 0], 0)));
        assert_eq!(v_dt_zr(&one, 2), expect_v);
        let expect_vt = &(&(&mono([0, 0, -1, 0], 0) + &mono([-1, -1, -1, 0], 0)) - &mono([-1, -1, 0, 0], 0))
            - &EquivariantClass::y();
        assert_eq!(v_tilde_zr(&one, 2).unwrap(), expect_vt);
        assert!(v_tilde_zr(&SolidPartition::empty(), 3).unwrap().is_zero());
    }

    #[test]
    fn single_box_contributions() {
        let one = p("0,0,0,0");
        let s = LinearForm::s;
        let c4 = contribution(&one, &Chart::standard()).unwrap();
        let num = Poly::from_linear(&LinearForm::m())
            .mul_linear(&(&s(1) + &s(2)))
            .mul_linear(&(&s(1) + &s(3)))
            .mul_linear(&(&s(2) + &s(3)));
        let expect = FactoredRational::new(num, &[(s(1), 1), (s(2), 1), (s(3), 1), (s(4), 1)]).unwrap();
        assert_eq!(c4, expect);

        let orb = contribution_orbifold(&one, 2).unwrap();
        let num = Poly::from_linear(&LinearForm::m()).mul_linear(&(&s(1) + &s(2)));
        assert_eq!(orb, FactoredRational::new(num, &[(s(3), 1), (s(4), 1)]).unwrap());
    }

    #[test]
    fn sign_of_mu_one() {
        let pi = p("0,0,0,0;0,0,0,1");
        assert_eq!(pi.mu(), 1);
        let with_sign = contribution_factors(&pi, &Chart::standard()).unwrap();
        let vt = v_tilde(&pi, &Chart::standard()).unwrap();
        let mut bare = euler_factors(&-&vt, &Chart::standard()).unwrap();
        bare.negate();
        assert_eq!(with_sign, bare);
    }

    #[test]
    fn zr_fix_examples() {
        let f = &(&EquivariantClass::t(1) + &mono([1, 1, 0, 0], 0)) + &mono([2, 0, 0, 0], 0);
        assert_eq!(zr_fix(&f, 2), &mono([1, 1, 0, 0], 0) + &mono([2, 0, 0, 0], 0));
        assert_eq!(zr_fix(&f, 1), f);
    }

    #[test]
    fn orbifold_r1_is_plain_vertex() {
        for pi in enumerate_up_to(4) {
            assert_eq!(v_dt_zr(&pi, 1), v_dt(&pi, 4), "{pi}");
        }
    }

    #[test]
    fn line_bundle_shifts_m() {
        let c = [1, 0, 2, 0];
        let geom = Geometry::c4_with_line(c);
        let chart = &geom.charts()[0];
        let lw = chart.lweight();
        for pi in enumerate_up_to(3) {
            let twisted = v_tilde(&pi, chart).unwrap();
            let plain = v_tilde(&pi, &Chart::standard()).unwrap();
            let shift = Monomial::new(c.map(|x| -x), 0);
            let expect = &v_dt(&pi, 4)
                + &plain.filter(|m| m.y != 0).map_monomials(|m| m.mul(&shift));
            assert_eq!(twisted, expect);
            let e_twisted = contribution(&pi, chart).unwrap();
            let e_plain = contribution(&pi, &Chart::standard()).unwrap();
            // m -> m - lweight, compared at random points
            let p = crate::algebra::modp::prime_below_2_62(0);
            for trial in 0..3 {
                let s = crate::algebra::PrimeSample::random(p, 11, trial, 0).unwrap();
                let lw_val = lw.eval_mod(&s.point, p).unwrap();
                let mut shifted = s.point;
                shifted[3] = crate::algebra::modp::sub_mod(s.point[3], lw_val, p);
                assert_eq!(
                    e_twisted.eval_mod(&s.point, p).unwrap(),
                    e_plain.eval_mod(&shifted, p).unwrap()
                );
            }
        }
    }

    #[test]
    fn geometry_names() {
        assert_eq!(Geometry::from_name("c4", None).unwrap(), Geometry::c4());
        assert_eq!(Geometry::from_name("a1xc2", None).unwrap(), Geometry::a_series(2));
        assert_eq!(Geometry::from_name("orbifold-zr", Some(3)).unwrap(), Geometry::orbifold(3));
        assert!(Geometry::from_name("orbifold-zr", Some(0)).is_err());
        assert!(Geometry::from_name("p4", None).is_err());
        let a0 = Geometry::a_series(1).charts();
        assert_eq!(a0[0].weights, [LinearForm::s(2), LinearForm::s(1), LinearForm::s(3), LinearForm::s(4)]);
    }

    #[test]
    fn chart_files() {
        let text = r#"{"name": "c4-swapped", "charts": [{"weights": [[0,1,0],[1,0,0],[0,0,1],[-1,-1,-1,0]]}]}"#;
        let spec: GeometrySpec = serde_json::from_str(text).unwrap();
        let g = Geometry::try_from(&spec).unwrap();
        assert_eq!(g.charts()[0].weights, Geometry::a_series(1).charts()[0].weights);
        let half = r#"{"charts": [{"weights": [["1/2",0,0],["-1/2",0,0],[0,0,1],[0,0,-1]], "line": [1,0,0,0]}]}"#;
        let g = Geometry::try_from(&serde_json::from_str::<GeometrySpec>(half).unwrap()).unwrap();
        assert_eq!(g.name(), "custom");
        assert_eq!(g.charts()[0].line, [1, 0, 0, 0]);
        let bad = r#"{"charts": [{"weights": [[1,0,0],[0,1,0],[0,0,1]]}]}"#;
        assert!(Geometry::try_from(&serde_json::from_str::<GeometrySpec>(bad).unwrap()).is_err());
    }

    #[test]
    fn charts_are_calabi_yau() {
        for r in 1..=5 {
            for c in Geometry::a_series(r).charts() {
                assert!(Chart::new(c.weights.clone(), c.line).is_ok());
            }
        }
        let bad = [LinearForm::s(1), LinearForm::s(1), LinearForm::s(3), LinearForm::s(4)];
        assert!(Chart::new(bad, [0; 4]).is_err());
    }
}
