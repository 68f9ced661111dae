//! Endomorphisms of finite carriers and their dynamical classification.

use super::mat::{Mat, Subspace};
use crate::error::{NucaError, Result};
use std::collections::HashMap;

/// An endomorphism `φ` of a finite carrier.
///
/// Linear mode: the carrier is a subspace `W ⊆ GF(p)^n` and `φ` is given by
/// an `n×n` matrix with `φ(W) ⊆ W`. Table mode: the carrier is an explicit
/// list of patterns and `φ` an index map.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FiniteEndo {
    Linear { carrier: Subspace, map: Mat },
    Table { states: Vec<Vec<u32>>, map: Vec<usize> },
}

/// Result of [`FiniteEndo::classify`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EndoClass {
    pub nilpotent_to_zero: bool,
    /// Least `q` with `φ^q ≡ 0` on the carrier, when nilpotent.
    pub nilpotency_index: Option<usize>,
    pub bijective: bool,
    pub preperiod: usize,
    /// Least `n ≥ 1` with `φ^{m+n} = φ^m`; `None` when the search hit its cap.
    pub period: Option<u64>,
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

impl FiniteEndo {
    pub fn linear(carrier: Subspace, map: Mat) -> Result<Self> {
        let n = carrier.ambient_dim();
        if map.rows() != n || map.cols() != n {
            return Err(NucaError::Dimension(format!(
                "endomorphism matrix {}x{} on ambient {n}",
                map.rows(),
                map.cols()
            )));
        }
        for b in carrier.basis_vectors() {
            if !carrier.contains(&map.mul_vec(&b))? {
                return Err(NucaError::ReductionPrecondition(
                    "map image escapes the carrier".into(),
                ));
            }
        }
        Ok(FiniteEndo::Linear { carrier, map })
    }

    pub fn table(states: Vec<Vec<u32>>, map: Vec<usize>) -> Result<Self> {
        if states.len() != map.len() || map.iter().any(|&i| i >= states.len()) {
            return Err(NucaError::ReductionPrecondition(
                "table map image escapes the carrier".into(),
            ));
        }
        Ok(FiniteEndo::Table { states, map })
    }

    /// Number of carrier elements, saturating.
    pub fn carrier_size(&self) -> u128 {
        match self {
            FiniteEndo::Linear { carrier, .. } => {
                (carrier.field().modulus() as u128).saturating_pow(carrier.dim() as u32)
            }
            FiniteEndo::Table { states, .. } => states.len() as u128,
        }
    }

    /// The map in carrier coordinates: `A·coords(w) = coords(φ(w))`.
    pub fn restricted_matrix(&self) -> Option<Mat> {
        let FiniteEndo::Linear { carrier, map } = self else {
            return None;
        };
        let r = carrier.dim();
        let mut a = Mat::zeros(carrier.field(), r, r);
        for (i, b) in carrier.basis_vectors().iter().enumerate() {
            let c = carrier
                .coordinates(&map.mul_vec(b))
                .ok()
                .flatten()
                .expect("closure checked at construction");
            for (j, v) in c.into_iter().enumerate() {
                a.set(j, i, v);
            }
        }
        Some(a)
    }

    /// Applies `φ` to an element of the carrier (linear mode: ambient vector).
    pub fn apply(&self, w: &[u32]) -> Vec<u32> {
        match self {
            FiniteEndo::Linear { map, .. } => map.mul_vec(w),
            FiniteEndo::Table { states, map } => {
                let i = states.iter().position(|s| s == w).expect("pattern in carrier");
                states[map[i]].clone()
            }
        }
    }

    pub fn classify(&self, period_cap: u64) -> EndoClass {
        match self {
            FiniteEndo::Linear { .. } => classify_linear(&self.restricted_matrix().unwrap(), period_cap),
            FiniteEndo::Table { states, map } => classify_table(states, map),
        }
    }
}

fn classify_linear(a: &Mat, period_cap: u64) -> EndoClass {
    let r = a.rows();
    let field = a.field();
    let mut ranks = vec![r];
    let mut power = Mat::identity(field, r);
    let mut nilpotency_index = if r == 0 { Some(0) } else { None };
    // rank sequence is non-increasing and stabilizes within r steps
    let preperiod = loop {
        power = power.mul(a);
        let rk = power.rank();
        if rk == 0 && nilpotency_index.is_none() {
            nilpotency_index = Some(ranks.len());
        }
        let prev = *ranks.last().unwrap();
        if rk == prev {
            break ranks.len() - 1;
        }
        ranks.push(rk);
    };
    let bijective = a.rank() == r;
    // order of φ on its eventual image im(φ^m), where it acts bijectively
    let eventual = a.pow(preperiod as u64);
    let img = eventual.image();
    let period = if img.dim() == 0 {
        Some(1)
    } else {
        let restricted = FiniteEndo::Linear {
            carrier: img.clone(),
            map: a.clone(),
        }
        .restricted_matrix()
        .unwrap();
        let id = Mat::identity(field, img.dim());
        let mut cur = restricted.clone();
        let mut n = 1u64;
        loop {
            if cur == id {
                break Some(n);
            }
            if n >= period_cap {
                break None;
            }
            cur = cur.mul(&restricted);
            n += 1;
        }
    };
    EndoClass {
        nilpotent_to_zero: nilpotency_index.is_some(),
        nilpotency_index,
        bijective,
        preperiod,
        period,
    }
}

fn classify_table(states: &[Vec<u32>], map: &[usize]) -> EndoClass {
    let n = states.len();
    let zero = states.iter().position(|s| s.iter().all(|&v| v == 0));
    // tail length and cycle length of every state
    let mut tail = vec![usize::MAX; n];
    let mut cycle = vec![0u64; n];
    for start in 0..n {
        if tail[start] != usize::MAX {
            continue;
        }
        let mut path = Vec::new();
        let mut pos: HashMap<usize, usize> = HashMap::new();
        let mut cur = start;
        while tail[cur] == usize::MAX && !pos.contains_key(&cur) {
            pos.insert(cur, path.len());
            path.push(cur);
            cur = map[cur];
        }
        let (mut t, c) = if let Some(&i) = pos.get(&cur) {
            let len = (path.len() - i) as u64;
            for &s in &path[i..] {
                tail[s] = 0;
                cycle[s] = len;
            }
            path.truncate(i);
            (0usize, len)
        } else {
            (tail[cur], cycle[cur])
        };
        for &s in path.iter().rev() {
            t += 1;
            tail[s] = t;
            cycle[s] = c;
        }
    }
    let preperiod = tail.iter().copied().max().unwrap_or(0);
    let period = cycle.iter().fold(1u64, |acc, &c| acc / gcd(acc, c) * c);
    let mut seen = vec![false; n];
    let bijective = map.iter().all(|&j| !std::mem::replace(&mut seen[j], true));
    let nilpotent = match zero {
        Some(z) => map[z] == z && (0..n).all(|s| cycle[s] == 1 && reaches(map, s, z, n)),
        None => n == 0,
    };
    let nilpotency_index = nilpotent.then_some(preperiod);
    EndoClass {
        nilpotent_to_zero: nilpotent,
        nilpotency_index,
        bijective,
        preperiod,
        period: Some(period),
    }
}

fn reaches(map: &[usize], mut s: usize, target: usize, steps: usize) -> bool {
    for _ in 0..=steps {
        if s == target {
            return true;
        }
        s = map[s];
    }
    s == target
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::field::Fp;

    fn gf(p: u64) -> Fp {
        Fp::new(p).unwrap()
    }

    #[test]
    fn zero_map() {
        let f = gf(2);
        let e = FiniteEndo::linear(Subspace::full(f, 3), Mat::zeros(f, 3, 3)).unwrap();
        let c = e.classify(1000);
        assert!(c.nilpotent_to_zero);
        assert!(!c.bijective);
        assert_eq!((c.preperiod, c.period), (1, Some(1)));
    }

    #[test]
    fn identity_map() {
        let f = gf(3);
        let e = FiniteEndo::linear(Subspace::full(f, 2), Mat::identity(f, 2)).unwrap();
        let c = e.classify(1000);
        assert!(!c.nilpotent_to_zero);
        assert!(c.bijective);
        assert_eq!((c.preperiod, c.period), (0, Some(1)));
    }

    #[test]
    fn jordan_block() {
        let f = gf(2);
        let m = Mat::from_rows(f, &[vec![0, 1], vec![0, 0]]).unwrap();
        let c = FiniteEndo::linear(Subspace::full(f, 2), m).unwrap().classify(1000);
        assert!(c.nilpotent_to_zero);
        assert_eq!(c.nilpotency_index, Some(2));
        assert_eq!((c.preperiod, c.period), (2, Some(1)));
    }

    #[test]
    fn closure_violation_is_an_error() {
        let f = gf(2);
        let carrier = Subspace::span(f, 2, vec![vec![1, 0]]);
        let swap = Mat::from_rows(f, &[vec![0, 1], vec![1, 0]]).unwrap();
        assert!(matches!(
            FiniteEndo::linear(carrier, swap),
            Err(NucaError::ReductionPrecondition(_))
        ));
    }

    #[test]
    fn table_mode() {
        // 0 -> 0, 1 -> 2, 2 -> 1, 3 -> 1 : preperiod 1, period 2
        let states = vec![vec![0], vec![1], vec![2], vec![3]];
        let c = FiniteEndo::table(states, vec![0, 2, 1, 1]).unwrap().classify(10);
        assert!(!c.nilpotent_to_zero);
        assert!(!c.bijective);
        assert_eq!((c.preperiod, c.period), (1, Some(2)));
        let states = vec![vec![0], vec![1], vec![2]];
        let c = FiniteEndo::table(states, vec![0, 0, 1]).unwrap().classify(10);
        assert!(c.nilpotent_to_zero);
        assert_eq!(c.nilpotency_index, Some(2));
    }
}
