//! Exact one-step simulation and induced window maps.

use super::config::PatternConfig;
use super::lattice::{sumset, Point};
use super::rule::LocalRule;
use super::spec::NucaSpec;
use crate::algebra::Mat;
use crate::error::Result;
use std::collections::BTreeSet;

/// `σ_s(x)`, exact.
pub fn apply_step(spec: &NucaSpec, x: &PatternConfig) -> Result<PatternConfig> {
    let mut out = PatternConfig::zero(spec.field(), spec.k(), spec.d());
    let support: Vec<Point> = x.support().cloned().collect();
    let neg_mem: Vec<Point> = spec.memory().iter().map(|m| -m).collect();
    for g in sumset(&support, &neg_mem) {
        let rule = spec.local_rule_at(&g)?;
        let window: Vec<Point> = rule.memory().iter().map(|m| &g + m).collect();
        let v = rule.evaluate(&x.restrict(&window));
        out.set(g, v);
    }
    Ok(out)
}

/// `σ_s^n(x)`.
pub fn apply_steps(spec: &NucaSpec, x: &PatternConfig, n: u64) -> Result<PatternConfig> {
    let mut cur = x.clone();
    for _ in 0..n {
        if cur.is_zero() {
            break;
        }
        cur = apply_step(spec, &cur)?;
    }
    Ok(cur)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum InducedBody {
    Linear(Mat),
    /// Per-codomain-site rules, evaluated on demand.
    Table(Vec<LocalRule>),
}

/// `f⁺_E : V^{E+M} → V^E`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InducedMap {
    pub domain_sites: Vec<Point>,
    pub codomain_sites: Vec<Point>,
    pub body: InducedBody,
    k: usize,
}

impl InducedMap {
    pub fn evaluate(&self, u: &[u32]) -> Vec<u32> {
        assert_eq!(u.len(), self.k * self.domain_sites.len());
        match &self.body {
            InducedBody::Linear(m) => m.mul_vec(u),
            InducedBody::Table(rules) => {
                let mut out = Vec::with_capacity(self.k * self.codomain_sites.len());
                for (g, rule) in self.codomain_sites.iter().zip(rules) {
                    let mut input = Vec::with_capacity(self.k * rule.memory().len());
                    for m in rule.memory() {
                        let i = self.domain_sites.binary_search(&(g + m)).expect("window covers E+M");
                        input.extend_from_slice(&u[i * self.k..(i + 1) * self.k]);
                    }
                    out.extend(rule.evaluate(&input));
                }
                out
            }
        }
    }

    pub fn matrix(&self) -> Option<&Mat> {
        match &self.body {
            InducedBody::Linear(m) => Some(m),
            InducedBody::Table(_) => None,
        }
    }
}

/// `E + M`, sorted.
pub fn window_domain(spec: &NucaSpec, sites: &[Point]) -> Vec<Point> {
    sumset(sites, spec.memory())
}

/// Induced map over the (deduplicated, sorted) site list.
pub fn induced_map(spec: &NucaSpec, sites: &[Point]) -> Result<InducedMap> {
    let codomain: Vec<Point> = sites.iter().cloned().collect::<BTreeSet<_>>().into_iter().collect();
    let domain = window_domain(spec, &codomain);
    let rules: Vec<LocalRule> =
        codomain.iter().map(|g| spec.local_rule_at(g).cloned()).collect::<Result<_>>()?;
    let body = if rules.iter().all(LocalRule::is_linear) {
        InducedBody::Linear(window_matrix(spec, &codomain, &domain)?)
    } else {
        InducedBody::Table(rules)
    };
    Ok(InducedMap { domain_sites: domain, codomain_sites: codomain, body, k: spec.k() })
}

/// Matrix of `u ↦ σ_s(ũ)|_out`, where `ũ` extends `u ∈ V^inp` by zero.
/// Requires linear rules on `out`.
pub fn window_matrix(spec: &NucaSpec, out: &[Point], inp: &[Point]) -> Result<Mat> {
    let k = spec.k();
    let f = spec.field();
    let mut body = Mat::zeros(f, k * out.len(), k * inp.len());
    let index: std::collections::HashMap<&Point, usize> = inp.iter().enumerate().map(|(i, p)| (p, i)).collect();
    for (r, g) in out.iter().enumerate() {
        let rule = spec.local_rule_at(g)?;
        for m in rule.memory() {
            let Some(&c) = index.get(&(g + m)) else { continue };
            let a = rule.matrix_at(m).ok_or_else(|| {
                crate::NucaError::Unsupported(format!("table rule at {g} in a linear window"))
            })?;
            for i in 0..k {
                for j in 0..k {
                    let cur = body.get(r * k + i, c * k + j);
                    body.set(r * k + i, c * k + j, f.add(cur, a.get(i, j)));
                }
            }
        }
    }
    Ok(body)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Fp;

    fn rule90() -> NucaSpec {
        let f = Fp::new(2).unwrap();
        let one = Mat::identity(f, 1);
        NucaSpec::linear_ca(f, 1, 1, vec![(Point::new([-1]), one.clone()), (Point::new([1]), one)]).unwrap()
    }

    #[test]
    fn rule90_impulse() {
        let s = rule90();
        let f = s.field();
        let x = PatternConfig::delta(f, 1, Point::new([0]), vec![1]);
        let y = apply_step(&s, &x).unwrap();
        let supp: Vec<_> = y.support().cloned().collect();
        assert_eq!(supp, vec![Point::new([-1]), Point::new([1])]);
    }

    #[test]
    fn zero_base_with_reader() {
        let f = Fp::new(2).unwrap();
        let zero = NucaSpec::linear_ca(f, 1, 1, vec![(Point::new([0]), Mat::zeros(f, 1, 1))]).unwrap();
        let r = LocalRule::linear(f, 1, vec![Point::new([1])], vec![Mat::identity(f, 1)]).unwrap();
        let s = zero.with_perturbations(vec![(Point::new([0]), r)]).unwrap();
        let d0 = PatternConfig::delta(f, 1, Point::new([0]), vec![1]);
        let d1 = PatternConfig::delta(f, 1, Point::new([1]), vec![1]);
        assert!(apply_step(&s, &d0).unwrap().is_zero());
        assert_eq!(apply_step(&s, &d1).unwrap(), d0);
    }

    #[test]
    fn identity_is_identity() {
        let f = Fp::new(5).unwrap();
        let s = NucaSpec::identity(f, 2, 2);
        let mut x = PatternConfig::zero(f, 2, 2);
        x.set(Point::new([1, -2]), vec![3, 4]);
        x.set(Point::new([0, 0]), vec![0, 1]);
        assert_eq!(apply_step(&s, &x).unwrap(), x);
    }

    #[test]
    fn induced_identity_and_zero() {
        let f = Fp::new(3).unwrap();
        let one = Mat::identity(f, 1);
        let s = NucaSpec::linear_ca(f, 1, 1, vec![(Point::new([0]), one), (Point::new([1]), Mat::zeros(f, 1, 1))])
            .unwrap();
        let m = induced_map(&s, &[Point::new([0])]).unwrap();
        assert_eq!(m.domain_sites.len(), 3);
        assert_eq!(m.matrix().unwrap().to_rows(), vec![vec![0, 1, 0]]);
        let z = NucaSpec::linear_ca(f, 1, 1, vec![(Point::new([0]), Mat::zeros(f, 1, 1))]).unwrap();
        assert!(induced_map(&z, &[Point::new([0])]).unwrap().matrix().unwrap().is_zero());
    }

    #[test]
    fn induced_rule90_matches_step() {
        let s = rule90();
        let f = s.field();
        let e = [Point::new([0]), Point::new([1])];
        let m = induced_map(&s, &e).unwrap();
        assert_eq!(m.domain_sites.len(), 4);
        for idx in 0..16usize {
            let u: Vec<u32> = (0..4).map(|b| ((idx >> b) & 1) as u32).collect();
            let x = PatternConfig::from_window(f, 1, 1, &m.domain_sites, &u);
            let y = apply_step(&s, &x).unwrap();
            assert_eq!(m.evaluate(&u), y.restrict(&e));
        }
    }
}
