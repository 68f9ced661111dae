//! Composition, powers and duals of specs.

use super::lattice::{sumset, Point};
use super::rule::{pattern_from_index, table_size, LocalRule, TABLE_CAP};
use super::spec::{NucaSpec, MEMORY_CAP};
use crate::algebra::Mat;
use crate::error::{NucaError, Result};
use std::collections::{BTreeMap, BTreeSet};

fn finite_only(spec: &NucaSpec, op: &str) -> Result<()> {
    if spec.is_sparse() {
        return Err(NucaError::Unsupported(format!("{op} on sparse specs")));
    }
    Ok(())
}

/// `t` with `σ_t = σ_outer ∘ σ_inner`.
pub fn compose(outer: &NucaSpec, inner: &NucaSpec) -> Result<NucaSpec> {
    finite_only(outer, "compose")?;
    finite_only(inner, "compose")?;
    let (outer, inner) = (&outer.compact()?, &inner.compact()?);
    if (outer.field(), outer.k(), outer.d()) != (inner.field(), inner.k(), inner.d()) {
        return Err(NucaError::InvalidSpec("compose: field, k or d differ".into()));
    }
    let (f, k, d) = (outer.field(), outer.k(), outer.d());
    let memory = sumset(outer.memory(), inner.memory());
    if memory.len() > MEMORY_CAP {
        return Err(NucaError::MemoryCap { size: memory.len(), cap: MEMORY_CAP });
    }
    let symbol = outer.base_symbol().mul(&inner.base_symbol());
    let base = LocalRule::from_symbol(&symbol, memory.clone())?;

    let mut cells: BTreeSet<Point> = outer.perturbations().keys().cloned().collect();
    for e in inner.perturbations().keys() {
        for m in outer.memory() {
            cells.insert(e - m);
        }
    }
    let mut perts = Vec::with_capacity(cells.len());
    for g in cells {
        let orule = outer.local_rule_at(&g)?;
        let irules: Vec<&LocalRule> =
            orule.memory().iter().map(|m| inner.local_rule_at(&(&g + m))).collect::<Result<_>>()?;
        let rule = if orule.is_linear() && irules.iter().all(|r| r.is_linear()) {
            let mut acc: BTreeMap<Point, Mat> = BTreeMap::new();
            for (m, ir) in orule.memory().iter().zip(&irules) {
                let a = orule.matrix_at(m).unwrap();
                if a.is_zero() {
                    continue;
                }
                for m2 in ir.memory() {
                    let b = ir.matrix_at(m2).unwrap();
                    if b.is_zero() {
                        continue;
                    }
                    let e = acc.entry(m + m2).or_insert_with(|| Mat::zeros(f, k, k));
                    *e = e.add(&a.mul(&b));
                }
            }
            let (mem, mats): (Vec<Point>, Vec<Mat>) = acc.into_iter().unzip();
            LocalRule::linear(f, k, mem, mats)?
        } else {
            compose_table(&memory, orule, &irules)?
        };
        perts.push((g, rule));
    }
    NucaSpec::new(f, k, d, memory, base, perts, None)?.compact()
}

fn compose_table(memory: &[Point], orule: &LocalRule, irules: &[&LocalRule]) -> Result<LocalRule> {
    let (f, k) = (orule.field(), orule.k());
    let p = f.modulus();
    let len = k * memory.len();
    let size = table_size(p, len);
    if size > TABLE_CAP {
        return Err(NucaError::TableTooLarge { size, cap: TABLE_CAP });
    }
    // positions of each inner window inside the composite memory
    let windows: Vec<Vec<usize>> = orule
        .memory()
        .iter()
        .zip(irules)
        .map(|(m, ir)| ir.memory().iter().map(|m2| memory.binary_search(&(m + m2)).unwrap()).collect())
        .collect();
    let mut out = Vec::with_capacity(size as usize * k);
    for idx in 0..size as usize {
        let x = pattern_from_index(p, len, idx);
        let mut mid = Vec::with_capacity(k * irules.len());
        for (ir, win) in irules.iter().zip(&windows) {
            let input: Vec<u32> = win.iter().flat_map(|&j| x[j * k..(j + 1) * k].iter().copied()).collect();
            mid.extend(ir.evaluate(&input));
        }
        out.extend(orule.evaluate(&mid));
    }
    LocalRule::table(f, k, memory.to_vec(), out)
}

/// `t` with `σ_t = σ_s^n`, `n ≥ 1`.
pub fn power_spec(spec: &NucaSpec, n: u64) -> Result<NucaSpec> {
    if n == 0 {
        return Err(NucaError::Precondition("power_spec needs n >= 1".into()));
    }
    finite_only(spec, "power_spec")?;
    let mut result: Option<NucaSpec> = None;
    let mut square = spec.clone();
    let mut e = n;
    loop {
        if e & 1 == 1 {
            result = Some(match result {
                None => square.clone(),
                Some(r) => compose(&square, &r)?,
            });
        }
        e >>= 1;
        if e == 0 {
            break;
        }
        square = compose(&square, &square)?;
    }
    Ok(result.unwrap())
}

/// The dual NUCA: `⟨σ_s(x), y⟩ = ⟨x, σ_s^*(y)⟩`.
pub fn dual_spec(spec: &NucaSpec) -> Result<NucaSpec> {
    finite_only(spec, "dual_spec")?;
    if !spec.is_linear() {
        return Err(NucaError::Unsupported("dual of a spec with table rules".into()));
    }
    let base = spec
        .base()
        .map_matrices(|m, a| (-m, a.transpose()))
        .expect("linear base");
    let mut cells = BTreeSet::new();
    for e in spec.perturbations().keys() {
        for m in spec.memory() {
            cells.insert(e + m);
        }
    }
    let mut perts = vec![];
    for h in cells {
        let mut mem = vec![];
        let mut mats = vec![];
        for m in spec.memory() {
            // offset m′ = m at h reads the transpose of A_{h+m, −m}
            let src = spec.local_rule_at(&(&h + m))?;
            mem.push(m.clone());
            mats.push(src.matrix_at(&-m).unwrap().transpose());
        }
        perts.push((h, LocalRule::linear(spec.field(), spec.k(), mem, mats)?));
    }
    NucaSpec::new(spec.field(), spec.k(), spec.d(), spec.memory().to_vec(), base, perts, None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Fp;
    use crate::nuca::config::{pairing, PatternConfig};
    use crate::nuca::step::{apply_step, apply_steps};

    fn gf(p: u64) -> Fp {
        Fp::new(p).unwrap()
    }

    #[test]
    fn power_one_unchanged() {
        let f = gf(3);
        let s = NucaSpec::linear_ca(f, 1, 1, vec![(Point::new([1]), Mat::identity(f, 1))]).unwrap();
        assert_eq!(power_spec(&s, 1).unwrap(), s);
    }

    #[test]
    fn idempotent_reader() {
        let f = gf(2);
        let zero = NucaSpec::linear_ca(f, 1, 1, vec![(Point::new([0]), Mat::zeros(f, 1, 1))]).unwrap();
        let s = zero
            .with_perturbations(vec![(Point::new([0]), LocalRule::projection(f, 1, vec![Point::new([0])]))])
            .unwrap();
        assert!(power_spec(&s, 2).unwrap().equivalent(&s));
    }

    #[test]
    fn rule90_squared() {
        let f = gf(2);
        let one = Mat::identity(f, 1);
        let s = NucaSpec::linear_ca(f, 1, 1, vec![(Point::new([-1]), one.clone()), (Point::new([1]), one)]).unwrap();
        let t = power_spec(&s, 2).unwrap();
        assert_eq!(t.base().effective_offsets(), vec![Point::new([-2]), Point::new([2])]);
    }

    #[test]
    fn table_power_matches_steps() {
        let f = gf(2);
        let id = NucaSpec::identity(f, 1, 1);
        // x(0) AND x(1)
        let t = LocalRule::table(f, 1, vec![Point::new([0]), Point::new([1])], vec![0, 0, 0, 1]).unwrap();
        let s = id.with_perturbations(vec![(Point::new([0]), t)]).unwrap();
        let s3 = power_spec(&s, 3).unwrap();
        for idx in 0..32usize {
            let sites: Vec<Point> = (-2..=2).map(|i| Point::new([i])).collect();
            let u: Vec<u32> = (0..5).map(|b| ((idx >> b) & 1) as u32).collect();
            let x = PatternConfig::from_window(f, 1, 1, &sites, &u);
            assert_eq!(apply_step(&s3, &x).unwrap(), apply_steps(&s, &x, 3).unwrap());
        }
    }

    #[test]
    fn dual_of_left_shift_is_right_shift() {
        let f = gf(5);
        let s = NucaSpec::linear_ca(f, 1, 1, vec![(Point::new([1]), Mat::identity(f, 1))]).unwrap();
        let ds = dual_spec(&s).unwrap();
        assert_eq!(ds.base().effective_offsets(), vec![Point::new([-1])]);
        let y = PatternConfig::delta(f, 1, Point::new([3]), vec![2]);
        assert_eq!(apply_step(&ds, &y).unwrap(), y.shift(&Point::new([1])));
    }

    #[test]
    fn dual_pairing_with_perturbation() {
        let f = gf(3);
        let a = Mat::from_rows(f, &[vec![1, 2], vec![0, 1]]).unwrap();
        let b = Mat::from_rows(f, &[vec![0, 1], vec![1, 1]]).unwrap();
        let s = NucaSpec::linear_ca(f, 2, 1, vec![(Point::new([0]), a.clone()), (Point::new([1]), b.clone())]).unwrap();
        let r = LocalRule::linear(f, 2, vec![Point::new([-1]), Point::new([0])], vec![b, a]).unwrap();
        let s = s.with_perturbations(vec![(Point::new([2]), r)]).unwrap();
        let ds = dual_spec(&s).unwrap();
        let sites: Vec<Point> = (-1..=4).map(|i| Point::new([i])).collect();
        for seed in 0..40u32 {
            let u: Vec<u32> = (0..12).map(|i| (seed * 7 + i * i * 3 + i) % 3).collect();
            let v: Vec<u32> = (0..12).map(|i| (seed * 5 + i * 11 + 1) % 3).collect();
            let x = PatternConfig::from_window(f, 2, 1, &sites, &u);
            let y = PatternConfig::from_window(f, 2, 1, &sites, &v);
            assert_eq!(
                pairing(&apply_step(&s, &x).unwrap(), &y),
                pairing(&x, &apply_step(&ds, &y).unwrap())
            );
        }
    }
}
