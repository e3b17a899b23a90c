//! Sparse real polynomials in three variables and truncated power series in
//! an auxiliary variable `t` with polynomial coefficients.

use std::collections::BTreeMap;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::lie_so3::{Mat3, Vec3};

pub type Exponents = [u32; 3];

/// Sparse polynomial in `(p₁, p₂, p₃)`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PolyR3 {
    terms: BTreeMap<Exponents, f64>,
}

impl PolyR3 {
    pub fn zero() -> Self {
        PolyR3::default()
    }

    pub fn constant(c: f64) -> Self {
        let mut p = PolyR3::zero();
        p.add_term([0, 0, 0], c);
        p
    }

    /// The coordinate function `pᵢ`.
    pub fn variable(i: usize) -> Self {
        let mut e = [0; 3];
        e[i] = 1;
        let mut p = PolyR3::zero();
        p.add_term(e, 1.0);
        p
    }

    pub fn add_term(&mut self, exponents: Exponents, coeff: f64) {
        if coeff == 0.0 {
            return;
        }
        let entry = self.terms.entry(exponents).or_insert(0.0);
        *entry += coeff;
        if *entry == 0.0 {
            self.terms.remove(&exponents);
        }
    }

    pub fn coeff(&self, exponents: Exponents) -> f64 {
        self.terms.get(&exponents).copied().unwrap_or(0.0)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponents, &f64)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|e| e[0] + e[1] + e[2]).max().unwrap_or(0)
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.terms.values().fold(0.0, |m, c| m.max(c.abs()))
    }

    pub fn scale(&self, s: f64) -> PolyR3 {
        if s == 0.0 {
            return PolyR3::zero();
        }
        PolyR3 {
            terms: self.terms.iter().map(|(e, c)| (*e, c * s)).collect(),
        }
    }

    pub fn add(&self, other: &PolyR3) -> PolyR3 {
        let mut out = self.clone();
        out.add_assign(other);
        out
    }

    pub fn add_assign(&mut self, other: &PolyR3) {
        for (e, c) in &other.terms {
            self.add_term(*e, *c);
        }
    }

    pub fn add_scaled(&mut self, other: &PolyR3, s: f64) {
        for (e, c) in &other.terms {
            self.add_term(*e, c * s);
        }
    }

    pub fn sub(&self, other: &PolyR3) -> PolyR3 {
        let mut out = self.clone();
        out.add_scaled(other, -1.0);
        out
    }

    pub fn mul(&self, other: &PolyR3) -> PolyR3 {
        let mut out = PolyR3::zero();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                out.add_term([ea[0] + eb[0], ea[1] + eb[1], ea[2] + eb[2]], ca * cb);
            }
        }
        out
    }

    /// `∂/∂pᵢ`.
    pub fn derivative(&self, i: usize) -> PolyR3 {
        let mut out = PolyR3::zero();
        for (e, c) in &self.terms {
            if e[i] > 0 {
                let mut d = *e;
                d[i] -= 1;
                out.add_term(d, c * e[i] as f64);
            }
        }
        out
    }

    pub fn gradient(&self) -> [PolyR3; 3] {
        [self.derivative(0), self.derivative(1), self.derivative(2)]
    }

    pub fn eval(&self, p: &Vec3) -> f64 {
        let deg = self.degree() as usize;
        let powers = power_table(p, deg);
        self.eval_with(&powers)
    }

    fn eval_with(&self, powers: &[[f64; 3]]) -> f64 {
        // Terms are visited in a fixed order, so evaluation is deterministic.
        self.terms
            .iter()
            .map(|(e, c)| c * powers[e[0] as usize][0] * powers[e[1] as usize][1] * powers[e[2] as usize][2])
            .sum()
    }

    /// Substitutes three truncated series for `(p₁, p₂, p₃)`.
    pub fn compose(&self, args: &[TSeries; 3]) -> TSeries {
        let order = args.iter().map(|a| a.order()).min().unwrap_or(0);
        let deg = self.degree() as usize;
        let mut powers: Vec<[TSeries; 3]> = Vec::with_capacity(deg + 1);
        powers.push(std::array::from_fn(|_| TSeries::constant(PolyR3::constant(1.0), order)));
        for k in 1..=deg {
            let next = std::array::from_fn(|i| powers[k - 1][i].mul(&args[i]));
            powers.push(next);
        }
        let mut out = TSeries::zero(order);
        for (e, c) in &self.terms {
            let term = powers[e[0] as usize][0]
                .mul(&powers[e[1] as usize][1])
                .mul(&powers[e[2] as usize][2]);
            out.add_scaled(&term, *c);
        }
        out
    }
}

fn power_table(p: &Vec3, deg: usize) -> Vec<[f64; 3]> {
    let mut table = Vec::with_capacity(deg + 1);
    table.push([1.0; 3]);
    for k in 1..=deg {
        let prev = table[k - 1];
        table.push([prev[0] * p.x, prev[1] * p.y, prev[2] * p.z]);
    }
    table
}

impl Serialize for PolyR3 {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let map: BTreeMap<String, f64> = self
            .terms
            .iter()
            .map(|(e, c)| (format!("{},{},{}", e[0], e[1], e[2]), *c))
            .collect();
        map.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for PolyR3 {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let map = BTreeMap::<String, f64>::deserialize(deserializer)?;
        let mut p = PolyR3::zero();
        for (key, c) in map {
            let parts: Vec<u32> = key
                .split(',')
                .map(|s| s.trim().parse::<u32>())
                .collect::<Result<_, _>>()
                .map_err(serde::de::Error::custom)?;
            if parts.len() != 3 {
                return Err(serde::de::Error::custom(format!("bad exponent triple '{key}'")));
            }
            p.add_term([parts[0], parts[1], parts[2]], c);
        }
        Ok(p)
    }
}

/// Power series `Σ_{k=0..order} tᵏ cₖ(p)` truncated after `t^order`.
#[derive(Debug, Clone, PartialEq)]
pub struct TSeries {
    coeffs: Vec<PolyR3>,
}

impl TSeries {
    pub fn zero(order: usize) -> Self {
        TSeries {
            coeffs: vec![PolyR3::zero(); order + 1],
        }
    }

    pub fn constant(c: PolyR3, order: usize) -> Self {
        let mut s = TSeries::zero(order);
        s.coeffs[0] = c;
        s
    }

    pub fn from_coeffs(mut coeffs: Vec<PolyR3>, order: usize) -> Self {
        coeffs.resize(order + 1, PolyR3::zero());
        TSeries { coeffs }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, k: usize) -> &PolyR3 {
        &self.coeffs[k]
    }

    pub fn add(&self, other: &TSeries) -> TSeries {
        let mut out = self.truncate(self.order().min(other.order()));
        out.add_scaled(other, 1.0);
        out
    }

    pub fn sub(&self, other: &TSeries) -> TSeries {
        let mut out = self.truncate(self.order().min(other.order()));
        out.add_scaled(other, -1.0);
        out
    }

    pub fn add_scaled(&mut self, other: &TSeries, s: f64) {
        for (a, b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            a.add_scaled(b, s);
        }
    }

    pub fn scale(&self, s: f64) -> TSeries {
        TSeries {
            coeffs: self.coeffs.iter().map(|c| c.scale(s)).collect(),
        }
    }

    pub fn mul(&self, other: &TSeries) -> TSeries {
        let order = self.order().min(other.order());
        let mut out = TSeries::zero(order);
        for (i, a) in self.coeffs.iter().enumerate().take(order + 1) {
            if a.is_empty() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate().take(order + 1 - i) {
                if b.is_empty() {
                    continue;
                }
                out.coeffs[i + j].add_assign(&a.mul(b));
            }
        }
        out
    }

    pub fn truncate(&self, order: usize) -> TSeries {
        TSeries::from_coeffs(self.coeffs.iter().take(order + 1).cloned().collect(), order)
    }
}

/// Cross product of two series-valued 3-vectors.
pub fn series_cross(a: &[TSeries; 3], b: &[TSeries; 3]) -> [TSeries; 3] {
    [
        a[1].mul(&b[2]).sub(&a[2].mul(&b[1])),
        a[2].mul(&b[0]).sub(&a[0].mul(&b[2])),
        a[0].mul(&b[1]).sub(&a[1].mul(&b[0])),
    ]
}

pub fn series_dot(a: &[TSeries; 3], b: &[TSeries; 3]) -> TSeries {
    a[0].mul(&b[0]).add(&a[1].mul(&b[1])).add(&a[2].mul(&b[2]))
}

/// A polynomial together with its gradient and Hessian, prepared for
/// repeated numeric evaluation.
#[derive(Debug, Clone)]
pub struct PolyWithDerivatives {
    value: PolyR3,
    gradient: [PolyR3; 3],
    hessian: [[PolyR3; 3]; 3],
    degree: usize,
}

impl PolyWithDerivatives {
    pub fn new(value: PolyR3) -> Self {
        let gradient = value.gradient();
        let hessian = std::array::from_fn(|i| std::array::from_fn(|j| gradient[i].derivative(j)));
        let degree = value.degree() as usize;
        PolyWithDerivatives {
            value,
            gradient,
            hessian,
            degree,
        }
    }

    pub fn value_poly(&self) -> &PolyR3 {
        &self.value
    }

    pub fn value(&self, p: &Vec3) -> f64 {
        self.value.eval(p)
    }

    pub fn gradient(&self, p: &Vec3) -> Vec3 {
        let powers = power_table(p, self.degree);
        Vec3::new(
            self.gradient[0].eval_with(&powers),
            self.gradient[1].eval_with(&powers),
            self.gradient[2].eval_with(&powers),
        )
    }

    pub fn hessian(&self, p: &Vec3) -> Mat3 {
        let powers = power_table(p, self.degree);
        Mat3::from_fn(|i, j| self.hessian[i][j].eval_with(&powers))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn sample_poly() -> PolyR3 {
        // 3 p₁²p₂ − 2 p₃ + 0.5 p₁p₂p₃² + 1
        let mut p = PolyR3::zero();
        p.add_term([2, 1, 0], 3.0);
        p.add_term([0, 0, 1], -2.0);
        p.add_term([1, 1, 2], 0.5);
        p.add_term([0, 0, 0], 1.0);
        p
    }

    #[test]
    fn evaluation_and_derivatives() {
        let p = sample_poly();
        let x = Vec3::new(1.5, -0.5, 2.0);
        let expected = 3.0 * 2.25 * -0.5 - 4.0 + 0.5 * 1.5 * -0.5 * 4.0 + 1.0;
        assert_relative_eq!(p.eval(&x), expected, epsilon = 1e-14);
        let d1 = p.derivative(0).eval(&x);
        assert_relative_eq!(d1, 6.0 * 1.5 * -0.5 + 0.5 * -0.5 * 4.0, epsilon = 1e-14);
        assert_eq!(p.degree(), 4);
    }

    #[test]
    fn gradient_and_hessian_match_finite_differences() {
        let p = PolyWithDerivatives::new(sample_poly());
        let x = Vec3::new(0.7, -1.1, 0.4);
        let h = 1e-6;
        let g = p.gradient(&x);
        let hess = p.hessian(&x);
        for i in 0..3 {
            let e = Vec3::ith(i, h);
            let fd = (p.value(&(x + e)) - p.value(&(x - e))) / (2.0 * h);
            assert!((g[i] - fd).abs() <= 1e-5 * fd.abs().max(1.0));
            let fdg = (p.gradient(&(x + e)) - p.gradient(&(x - e))) / (2.0 * h);
            for j in 0..3 {
                assert!((hess[(j, i)] - fdg[j]).abs() <= 1e-5 * fdg[j].abs().max(1.0));
            }
        }
    }

    #[test]
    fn cancellation_removes_terms() {
        let p = sample_poly();
        assert!(p.sub(&p).is_empty());
    }

    #[test]
    fn series_product_truncates() {
        // (1 + t p₁)² = 1 + 2t p₁ + t² p₁², truncated at order 1.
        let one = PolyR3::constant(1.0);
        let s = TSeries::from_coeffs(vec![one, PolyR3::variable(0)], 1);
        let sq = s.mul(&s);
        assert_eq!(sq.order(), 1);
        assert_eq!(sq.coeff(1).coeff([1, 0, 0]), 2.0);
        let s2 = TSeries::from_coeffs(vec![PolyR3::constant(1.0), PolyR3::variable(0)], 2);
        assert_eq!(s2.mul(&s2).coeff(2).coeff([2, 0, 0]), 1.0);
    }

    #[test]
    fn composition_matches_pointwise_evaluation() {
        let p = sample_poly();
        // Substitute pᵢ ↦ pᵢ + t·(i+1)·p₁: a series whose numeric value at
        // (t, x) is x + t·(1,2,3)·x₁.
        let args: [TSeries; 3] = std::array::from_fn(|i| {
            TSeries::from_coeffs(vec![PolyR3::variable(i), PolyR3::variable(0).scale((i + 1) as f64)], 6)
        });
        let composed = p.compose(&args);
        let x = Vec3::new(0.3, -0.8, 1.2);
        let t: f64 = 0.37;
        let direct = p.eval(&(x + t * Vec3::new(1.0, 2.0, 3.0) * x.x));
        let series: f64 = (0..=6).map(|k| t.powi(k as i32) * composed.coeff(k).eval(&x)).sum();
        assert_relative_eq!(series, direct, epsilon = 1e-12);
    }

    #[test]
    fn json_round_trip() {
        let p = sample_poly();
        let s = serde_json::to_string(&p).unwrap();
        assert!(s.contains("\"2,1,0\":3.0"));
        let back: PolyR3 = serde_json::from_str(&s).unwrap();
        assert_eq!(back, p);
    }

    proptest! {
        #[test]
        fn product_evaluates_pointwise(
            ca in proptest::collection::vec(-2.0f64..2.0, 4),
            cb in proptest::collection::vec(-2.0f64..2.0, 4),
            x in -1.5f64..1.5, y in -1.5f64..1.5, z in -1.5f64..1.5,
        ) {
            let exps = [[0, 0, 0], [1, 0, 0], [0, 2, 1], [1, 1, 1]];
            let mut a = PolyR3::zero();
            let mut b = PolyR3::zero();
            for k in 0..4 {
                a.add_term(exps[k], ca[k]);
                b.add_term(exps[(k + 1) % 4], cb[k]);
            }
            let v = Vec3::new(x, y, z);
            let lhs = a.mul(&b).eval(&v);
            let rhs = a.eval(&v) * b.eval(&v);
            prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + rhs.abs()));
        }
    }
}
