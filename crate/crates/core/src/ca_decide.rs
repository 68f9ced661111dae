//! Verdicts for constant linear CA from their symbol matrices.

use crate::algebra::{Exponent, SymbolMatrix};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Property {
    Nilpotent,
    Periodic,
    EventuallyPeriodic,
    Invertible,
    CayleyHamilton,
    Injective,
    PostSurjective,
}

impl Property {
    pub const ALL: [Property; 7] = [
        Property::Nilpotent,
        Property::Periodic,
        Property::EventuallyPeriodic,
        Property::Invertible,
        Property::CayleyHamilton,
        Property::Injective,
        Property::PostSurjective,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Property::Nilpotent => "nilpotent",
            Property::Periodic => "periodic",
            Property::EventuallyPeriodic => "eventually-periodic",
            Property::Invertible => "invertible",
            Property::CayleyHamilton => "cayley-hamilton",
            Property::Injective => "injective",
            Property::PostSurjective => "post-surjective",
        }
    }

    pub fn parse(s: &str) -> Option<Property> {
        Property::ALL.into_iter().find(|p| p.name() == s)
    }
}

impl fmt::Display for Property {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CaCertificate {
    /// `m^{n0} = 0`.
    Nilpotent { n0: u64 },
    /// `m^period = I`, least.
    Periodic { period: u64 },
    /// `m^{preperiod + period} = m^{preperiod}`, both least.
    Eventual { preperiod: u64, period: u64 },
    /// Inverse symbol and its exponent support `N′`.
    Inverse { inverse: SymbolMatrix, memory: Vec<Exponent> },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CaVerdict {
    pub property: Property,
    pub verdict: bool,
    pub certificate: Option<CaCertificate>,
}

impl CaVerdict {
    fn no(property: Property) -> Self {
        CaVerdict { property, verdict: false, certificate: None }
    }
    fn yes(property: Property, c: CaCertificate) -> Self {
        CaVerdict { property, verdict: true, certificate: Some(c) }
    }
}

/// First repetition `m^s = m^t`, `s < t`, in the power sequence.
/// Terminates whenever all char-poly coefficients are constant.
fn first_repeat(m: &SymbolMatrix) -> (u64, u64) {
    let mut seen: HashMap<SymbolMatrix, u64> = HashMap::new();
    let mut cur = SymbolMatrix::identity(m.field(), m.dims(), m.k());
    let mut t = 0u64;
    loop {
        if let Some(&s) = seen.get(&cur) {
            return (s, t);
        }
        let next = cur.mul(m);
        seen.insert(cur, t);
        cur = next;
        t += 1;
    }
}

pub fn ca_nilpotent(m: &SymbolMatrix) -> CaVerdict {
    if !m.char_poly().is_pure_power() {
        return CaVerdict::no(Property::Nilpotent);
    }
    let n0 = m.k() as u64;
    assert!(m.pow(n0).is_zero(), "Cayley-Hamilton certificate failed");
    CaVerdict::yes(Property::Nilpotent, CaCertificate::Nilpotent { n0 })
}

pub fn ca_periodic(m: &SymbolMatrix) -> CaVerdict {
    if !m.char_poly().all_constant() {
        return CaVerdict::no(Property::Periodic);
    }
    let (s, t) = first_repeat(m);
    if s != 0 {
        return CaVerdict::no(Property::Periodic);
    }
    assert!(m.pow(t).is_identity());
    CaVerdict::yes(Property::Periodic, CaCertificate::Periodic { period: t })
}

pub fn ca_eventually_periodic(m: &SymbolMatrix) -> CaVerdict {
    // char poly = z^j·g(z); g has constant coefficients iff every c_i does
    if !m.char_poly().all_constant() {
        return CaVerdict::no(Property::EventuallyPeriodic);
    }
    let (s, t) = first_repeat(m);
    assert_eq!(m.pow(t), m.pow(s));
    CaVerdict::yes(Property::EventuallyPeriodic, CaCertificate::Eventual { preperiod: s, period: t - s })
}

pub fn ca_invertible(m: &SymbolMatrix) -> CaVerdict {
    let Some(inv) = m.inverse() else {
        return CaVerdict::no(Property::Invertible);
    };
    assert!(m.mul(&inv).is_identity() && inv.mul(m).is_identity());
    let memory = inv.support();
    CaVerdict::yes(Property::Invertible, CaCertificate::Inverse { inverse: inv, memory })
}

/// Dispatch for the four CA-level properties.
pub fn ca_decide(m: &SymbolMatrix, property: Property) -> Option<CaVerdict> {
    match property {
        Property::Nilpotent => Some(ca_nilpotent(m)),
        Property::Periodic => Some(ca_periodic(m)),
        Property::EventuallyPeriodic => Some(ca_eventually_periodic(m)),
        Property::Invertible => Some(ca_invertible(m)),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{Fp, LaurentPoly};

    fn f(p: u64) -> Fp {
        Fp::new(p).unwrap()
    }

    fn sym(p: u64, k: usize, entries: Vec<Vec<(i64, i64)>>) -> SymbolMatrix {
        let fp = f(p);
        let e = entries
            .into_iter()
            .map(|t| LaurentPoly::from_terms(fp, 1, t.into_iter().map(|(e, c)| (vec![e], c))))
            .collect();
        SymbolMatrix::from_entries(fp, 1, k, e)
    }

    #[test]
    fn nilpotent_examples() {
        let z = SymbolMatrix::zero(f(2), 1, 2);
        assert_eq!(ca_nilpotent(&z).certificate, Some(CaCertificate::Nilpotent { n0: 2 }));
        let t = sym(2, 2, vec![vec![], vec![(1, 1)], vec![], vec![]]);
        assert!(ca_nilpotent(&t).verdict);
        let r90 = sym(2, 1, vec![vec![(-1, 1), (1, 1)]]);
        assert!(!ca_nilpotent(&r90).verdict);
    }

    #[test]
    fn periodic_examples() {
        let id = SymbolMatrix::identity(f(2), 1, 1);
        assert_eq!(ca_periodic(&id).certificate, Some(CaCertificate::Periodic { period: 1 }));
        let two = sym(3, 1, vec![vec![(0, 2)]]);
        assert_eq!(ca_periodic(&two).certificate, Some(CaCertificate::Periodic { period: 2 }));
        let shift = sym(2, 1, vec![vec![(1, 1)]]);
        assert!(!ca_periodic(&shift).verdict);
    }

    #[test]
    fn eventual_examples() {
        let t = sym(2, 2, vec![vec![], vec![(1, 1)], vec![], vec![]]);
        assert_eq!(
            ca_eventually_periodic(&t).certificate,
            Some(CaCertificate::Eventual { preperiod: 2, period: 1 })
        );
        let id = SymbolMatrix::identity(f(5), 1, 2);
        assert_eq!(
            ca_eventually_periodic(&id).certificate,
            Some(CaCertificate::Eventual { preperiod: 0, period: 1 })
        );
        let r90 = sym(2, 1, vec![vec![(-1, 1), (1, 1)]]);
        assert!(!ca_eventually_periodic(&r90).verdict);
        // idempotent projection: not periodic, eventually periodic
        let proj = sym(3, 2, vec![vec![(0, 1)], vec![], vec![], vec![]]);
        assert!(!ca_periodic(&proj).verdict);
        assert_eq!(
            ca_eventually_periodic(&proj).certificate,
            Some(CaCertificate::Eventual { preperiod: 1, period: 1 })
        );
    }

    #[test]
    fn invertible_examples() {
        let x = sym(2, 1, vec![vec![(1, 1)]]);
        let v = ca_invertible(&x);
        assert_eq!(
            v.certificate,
            Some(CaCertificate::Inverse { inverse: sym(2, 1, vec![vec![(-1, 1)]]), memory: vec![vec![-1]] })
        );
        assert!(!ca_invertible(&sym(2, 1, vec![vec![(0, 1), (1, 1)]])).verdict);
        let u = sym(3, 2, vec![vec![(0, 1)], vec![(1, 1)], vec![], vec![(0, 1)]]);
        let Some(CaCertificate::Inverse { inverse, .. }) = ca_invertible(&u).certificate else { panic!() };
        assert_eq!(inverse, sym(3, 2, vec![vec![(0, 1)], vec![(1, 2)], vec![], vec![(0, 1)]]));
    }
}
