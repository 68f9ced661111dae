//! Independent, simulation-based checks for the decision procedures.
//!
//! Nothing here uses the characteristic polynomial or the φ reduction: the
//! base CA is probed through impulse responses, trapped windows are built by
//! simulating `apply_step`, and injectivity in `d = 1` goes through tail
//! subspaces of the background kernel.

use crate::algebra::{Mat, Subspace};
use crate::ca_decide::Property;
use crate::decide::verify::{random_config, sample_configs};
use crate::error::{NucaError, Result};
use crate::nuca::rule::pattern_from_index;
use crate::nuca::{
    apply_step, apply_steps, cube, dual_spec, power_spec, sumset, LocalRule, NucaSpec, PatternConfig, Placement,
    Point,
};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::HashMap;

/// Largest trapped carrier enumerated pattern by pattern.
pub const CARRIER_CAP: u128 = 4096;
/// Largest trapped window (in scalar coordinates) for the linear route.
pub const WINDOW_CAP: usize = 4096;

fn base_only(spec: &NucaSpec) -> Result<NucaSpec> {
    NucaSpec::new(spec.field(), spec.k(), spec.d(), spec.memory().to_vec(), spec.base().clone(), vec![], None)
}

fn impulses(spec: &NucaSpec) -> Vec<PatternConfig> {
    (0..spec.k())
        .map(|c| {
            let mut v = vec![0; spec.k()];
            v[c] = 1;
            PatternConfig::delta(spec.field(), spec.k(), Point::origin(spec.d()), v)
        })
        .collect()
}

fn step_all(spec: &NucaSpec, xs: &[PatternConfig]) -> Result<Vec<PatternConfig>> {
    xs.iter().map(|x| apply_step(spec, x)).collect()
}

/// Steps after which the base impulse responses must have repeated if they ever do.
fn base_bound(spec: &NucaSpec) -> u64 {
    let pk = (spec.field().modulus() as u64).saturating_pow(spec.k() as u32);
    spec.k() as u64 + 2 * pk + 2
}

/// Least `n` with `σ_c^n = 0`, from impulse responses.
pub fn base_nilpotency(spec: &NucaSpec) -> Result<Option<u64>> {
    let c = base_only(spec)?;
    let mut r = impulses(&c);
    for n in 1..=spec.k() as u64 {
        r = step_all(&c, &r)?;
        if r.iter().all(PatternConfig::is_zero) {
            return Ok(Some(n));
        }
    }
    Ok(None)
}

/// Least `(m, n)` with `σ_c^{m+n} = σ_c^m`, from impulse responses.
pub fn base_eventual(spec: &NucaSpec) -> Result<Option<(u64, u64)>> {
    let c = base_only(spec)?;
    let mut seen: HashMap<Vec<PatternConfig>, u64> = HashMap::new();
    let mut r = impulses(&c);
    for t in 0..=base_bound(spec) {
        if let Some(&s) = seen.get(&r) {
            return Ok(Some((s, t - s)));
        }
        let next = step_all(&c, &r)?;
        seen.insert(r, t);
        r = next;
    }
    Ok(None)
}

/// Least `n ≥ 1` with `σ_c^n = Id`.
pub fn base_period(spec: &NucaSpec) -> Result<Option<u64>> {
    Ok(base_eventual(spec)?.and_then(|(m, n)| (m == 0).then_some(n)))
}

fn sumset_pow(m: &[Point], n: u64, d: usize) -> Vec<Point> {
    let mut acc = vec![Point::origin(d)];
    for _ in 0..n {
        acc = sumset(&acc, m);
    }
    acc
}

/// Matrix of `w ↦ σ_s^n(w̃)|_sites` built column by column from impulses.
/// Fails if some response leaves `sites`.
fn trapped_matrix(spec: &NucaSpec, sites: &[Point], n: u64, keep_outside: bool) -> Result<Mat> {
    let (f, k) = (spec.field(), spec.k());
    if k * sites.len() > WINDOW_CAP {
        return Err(NucaError::ResourceLimit(format!("trapped window of {} sites", sites.len())));
    }
    let mut m = Mat::zeros(f, k * sites.len(), k * sites.len());
    for (j, s) in sites.iter().enumerate() {
        for c in 0..k {
            let mut v = vec![0; k];
            v[c] = 1;
            let y = apply_steps(spec, &PatternConfig::delta(f, k, s.clone(), v), n)?;
            if !keep_outside && y.support().any(|p| sites.binary_search(p).is_err()) {
                return Err(NucaError::ReductionPrecondition("impulse response escapes the trapped window".into()));
            }
            for (i, val) in y.restrict(sites).into_iter().enumerate() {
                m.set(i, j * k + c, val);
            }
        }
    }
    Ok(m)
}

fn enumerate_window(spec: &NucaSpec, sites: &[Point]) -> Result<Vec<PatternConfig>> {
    let (f, k) = (spec.field(), spec.k());
    let len = k * sites.len();
    let size = (f.modulus() as u128).checked_pow(len as u32).unwrap_or(u128::MAX);
    if size > CARRIER_CAP {
        return Err(NucaError::ResourceLimit(format!("carrier of {size} patterns exceeds {CARRIER_CAP}")));
    }
    Ok((0..size as usize)
        .map(|i| PatternConfig::from_window(f, k, spec.d(), sites, &pattern_from_index(f.modulus(), len, i)))
        .collect())
}

/// Trapped-window verdict for nilpotency, periodicity or eventual periodicity.
///
/// Nilpotent: with `n0` the base nilpotency index, `τ = σ^{n0}` maps every
/// configuration into `V^F`, `F = E + M^{n0−1}`; `σ` is nilpotent iff every
/// orbit of `τ` on `V^F` dies. Periodic: with `n` the base period, `τ = σ^n`
/// is the identity off `F = E + M^{n−1}` and `τ` is bijective iff its
/// restriction to `V^{F + M^n}` is.
pub fn oracle_trapped_enumeration(spec: &NucaSpec, property: Property) -> Result<bool> {
    let spec = &truncate_sparse(spec)?;
    let d = spec.d();
    match property {
        Property::Nilpotent => {
            let Some(n0) = base_nilpotency(spec)? else { return Ok(false) };
            if spec.support().is_empty() {
                return Ok(true);
            }
            let sites = sumset(&spec.support(), &sumset_pow(spec.memory(), n0 - 1, d));
            if spec.is_linear() {
                let m = trapped_matrix(spec, &sites, n0, false)?;
                return Ok(m.pow(m.rows() as u64).is_zero());
            }
            let carrier = enumerate_window(spec, &sites)?;
            let limit = carrier.len() as u64 + 1;
            for w in carrier {
                let y = apply_steps(spec, &w, n0 * limit)?;
                if !y.is_zero() {
                    return Ok(false);
                }
            }
            Ok(true)
        }
        Property::Periodic => {
            let Some(n) = base_period(spec)? else { return Ok(false) };
            if spec.support().is_empty() {
                return Ok(true);
            }
            let inner = sumset(&spec.support(), &sumset_pow(spec.memory(), n - 1, d));
            let sites = sumset(&inner, &sumset_pow(spec.memory(), n, d));
            if spec.is_linear() {
                let m = trapped_matrix(spec, &sites, n, true)?;
                return Ok(m.rank() == m.rows());
            }
            let mut images = std::collections::HashSet::new();
            for w in enumerate_window(spec, &sites)? {
                let y = apply_steps(spec, &w, n)?;
                if !images.insert(y.restrict(&sites)) {
                    return Ok(false);
                }
            }
            Ok(true)
        }
        Property::EventuallyPeriodic | Property::CayleyHamilton => Ok(base_eventual(spec)?.is_some()),
        _ => Err(NucaError::Unsupported(format!("trapped enumeration for {property}"))),
    }
}

/// A nonzero `x` supported in `[-R, R]^d` with `σ_s(x) = 0`, if any.
pub fn finite_support_kernel(spec: &NucaSpec, radius: i64) -> Result<Option<PatternConfig>> {
    let (f, k, d) = (spec.field(), spec.k(), spec.d());
    let sites = cube(d, radius);
    if k * sites.len() > WINDOW_CAP {
        return Err(NucaError::ResourceLimit(format!("kernel box of {} sites", sites.len())));
    }
    let rows = sumset(&sites, spec.memory());
    // equations σ(x)(h) = 0 assembled from impulse responses
    let mut m = Mat::zeros(f, k * rows.len(), k * sites.len());
    for (j, s) in sites.iter().enumerate() {
        for c in 0..k {
            let mut v = vec![0; k];
            v[c] = 1;
            let y = apply_step(spec, &PatternConfig::delta(f, k, s.clone(), v))?;
            for (i, val) in y.restrict(&rows).into_iter().enumerate() {
                m.set(i, j * k + c, val);
            }
        }
    }
    let Some(v) = m.kernel().basis_vectors().into_iter().next() else {
        return Ok(None);
    };
    let x = PatternConfig::from_window(f, k, d, &sites, &v);
    debug_assert!(apply_step(spec, &x)?.is_zero());
    Ok(Some(x))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// Restrictions to the `w` boundary sites of one-sided kernel configurations
/// of a `d = 1` linear rule. Sites are in increasing order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TailSubspace {
    pub side: Side,
    pub width: usize,
    pub space: Subspace,
}

/// Right tail: configurations on `[a, ∞)` satisfying every equation whose
/// window lies in the half-line; the space holds their values on `[a, a+w)`.
fn right_tail(rule: &LocalRule, w: usize) -> Subspace {
    let (f, k) = (rule.field(), rule.k());
    let offs = rule.effective_offsets();
    if offs.is_empty() {
        return Subspace::full(f, k * w);
    }
    let lo = offs.iter().map(|p| p.0[0]).min().unwrap();
    let hi = offs.iter().map(|p| p.0[0]).max().unwrap();
    let width = w.max((hi - lo + 1) as usize);
    // one equation on sites 0..=hi-lo of a (width+1)-site window
    let mut eq = Mat::zeros(f, k, k * (width + 1));
    for m in &offs {
        let a = rule.matrix_at(m).unwrap();
        let col = (m.0[0] - lo) as usize;
        for i in 0..k {
            for j in 0..k {
                eq.set(i, col * k + j, a.get(i, j));
            }
        }
    }
    let head: Vec<usize> = (0..k * width).collect();
    let tail: Vec<usize> = (k..k * (width + 1)).collect();
    let mut l = Subspace::full(f, k * width);
    loop {
        // u ∈ V^{width+1}: equation at the left end, u shifted by one lies in L
        let ann = l.annihilator();
        let mut shifted = Mat::zeros(f, ann.rows(), k * (width + 1));
        for r in 0..ann.rows() {
            for (c, &tc) in tail.iter().enumerate() {
                shifted.set(r, tc, ann.get(r, c));
            }
        }
        let next = eq.vstack(&shifted).kernel().project(&head);
        if next == l {
            break;
        }
        l = next;
    }
    let keep: Vec<usize> = (0..k * w).collect();
    l.project(&keep)
}

/// Tail subspace of width `w` for a `d = 1` linear base rule.
pub fn tail_subspace(base: &LocalRule, side: Side, w: usize) -> Result<TailSubspace> {
    if base.memory().iter().any(|m| m.dim() != 1) || !base.is_linear() {
        return Err(NucaError::Unsupported("tail subspaces need a linear d = 1 rule".into()));
    }
    let k = base.k();
    let space = match side {
        Side::Right => right_tail(base, w),
        Side::Left => {
            // mirror x'(g) = x(−g), compute the right tail, reverse the sites
            let mirrored = base.map_matrices(|m, a| (-m, a.clone())).unwrap();
            let t = right_tail(&mirrored, w);
            let perm: Vec<usize> = (0..w).rev().flat_map(|s| (0..k).map(move |c| s * k + c)).collect();
            Subspace::span(
                base.field(),
                k * w,
                t.basis_vectors().into_iter().map(|v| perm.iter().map(|&i| v[i]).collect()).collect(),
            )
        }
    };
    Ok(TailSubspace { side, width: w, space })
}

/// `(Ker σ_s)|_Z` for the window `Z = [e_lo − ρ − w − r, e_hi + ρ + w + r]`.
pub fn kernel_window_d1(spec: &NucaSpec, r: i64) -> Result<(Vec<Point>, Subspace)> {
    if spec.d() != 1 || !spec.is_linear() {
        return Err(NucaError::Unsupported("kernel_window_d1 needs a linear d = 1 spec".into()));
    }
    let spec = &truncate_sparse(spec)?;
    let (f, k) = (spec.field(), spec.k());
    let rho = spec.radius();
    let w = (2 * rho).max(1) as usize;
    let e = spec.support();
    let e_lo = e.iter().map(|p| p.0[0]).min().unwrap_or(0);
    let e_hi = e.iter().map(|p| p.0[0]).max().unwrap_or(0);
    let zl = e_lo - rho - w as i64 - r;
    let zr = e_hi + rho + w as i64 + r;
    let sites: Vec<Point> = (zl..=zr).map(|i| Point::new([i])).collect();
    let n = k * sites.len();
    let mut rows: Vec<Vec<u32>> = vec![];
    // interior equations
    for g in zl + rho..=zr - rho {
        let rule = spec.local_rule_at(&Point::new([g]))?;
        for i in 0..k {
            let mut row = vec![0u32; n];
            for m in rule.memory() {
                let a = rule.matrix_at(m).unwrap();
                let col = (g + m.0[0] - zl) as usize;
                for j in 0..k {
                    row[col * k + j] = f.add(row[col * k + j], a.get(i, j));
                }
            }
            rows.push(row);
        }
    }
    for (side, start) in [(Side::Left, 0usize), (Side::Right, sites.len() - w)] {
        let tail = tail_subspace(spec.base(), side, w)?;
        let ann = tail.space.annihilator();
        for a in 0..ann.rows() {
            let mut row = vec![0u32; n];
            for c in 0..k * w {
                row[start * k + c] = ann.get(a, c);
            }
            rows.push(row);
        }
    }
    let sys = Mat::from_data(f, rows.len(), n, rows.concat());
    Ok((sites, sys.kernel()))
}

/// Independent verdict with a short description of the method.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleVerdict {
    pub property: Property,
    pub verdict: bool,
    pub method: &'static str,
}

/// Default `r` for [`kernel_window_d1`] verdicts.
pub const KERNEL_WINDOW_R: i64 = 4;

pub fn oracle_verdict(spec: &NucaSpec, property: Property, radius: i64) -> Result<OracleVerdict> {
    let (verdict, method) = match property {
        Property::Nilpotent | Property::Periodic | Property::EventuallyPeriodic => {
            (oracle_trapped_enumeration(spec, property)?, "trapped-window enumeration")
        }
        Property::CayleyHamilton => {
            if !spec.is_linear() {
                return Err(NucaError::Unsupported("cayley-hamilton needs a linear spec".into()));
            }
            (oracle_trapped_enumeration(spec, property)?, "base impulse responses")
        }
        Property::Injective | Property::Invertible => injective_oracle(spec, radius)?,
        Property::PostSurjective => injective_oracle(&dual_spec(&finite_linear(spec)?)?, radius)?,
    };
    Ok(OracleVerdict { property, verdict, method })
}

fn finite_linear(spec: &NucaSpec) -> Result<NucaSpec> {
    match spec.finite_equivalent()? {
        Some(s) if s.is_linear() => Ok(s),
        _ => Err(NucaError::Unsupported("injectivity oracle needs a finite linear spec".into())),
    }
}

fn injective_oracle(spec: &NucaSpec, radius: i64) -> Result<(bool, &'static str)> {
    let spec = &finite_linear(spec)?;
    if spec.d() == 1 {
        let (_, ker) = kernel_window_d1(spec, radius)?;
        Ok((ker.dim() == 0, "tail-subspace kernel window"))
    } else {
        let reach = spec.support().iter().map(Point::norm_inf).max().unwrap_or(0) + radius;
        Ok((finite_support_kernel(spec, reach)?.is_none(), "finite-support kernel search (incomplete)"))
    }
}

/// `σ^n` against `claimed` on random configurations.
pub fn oracle_power_matches(spec: &NucaSpec, claimed: &NucaSpec, n: u64, trials: usize, seed: u64) -> Result<bool> {
    for x in sample_configs(spec, trials, seed) {
        if apply_steps(spec, &x, n)? != apply_step(claimed, &x)? {
            return Ok(false);
        }
    }
    Ok(true)
}

pub fn oracle_power_agreement(spec: &NucaSpec, n: u64, trials: usize, seed: u64) -> Result<bool> {
    oracle_power_matches(spec, &power_spec(spec, n)?, n, trials, seed)
}

/// `σ_t ∘ σ_s = σ_s ∘ σ_t = Id` on random configurations.
pub fn oracle_inverse_check(spec: &NucaSpec, inverse: &NucaSpec, trials: usize, seed: u64) -> Result<bool> {
    let mut configs = sample_configs(spec, trials, seed);
    configs.extend(sample_configs(inverse, trials, seed ^ 0x5eed));
    for x in configs {
        if apply_step(inverse, &apply_step(spec, &x)?)? != x || apply_step(spec, &apply_step(inverse, &x)?)? != x {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `P(σ_s)(x) = Σ c_i σ_s^i(x) = 0` on random configurations.
pub fn oracle_annihilator(spec: &NucaSpec, coeffs: &[u32], trials: usize, seed: u64) -> Result<bool> {
    let spec = &truncate_sparse(spec)?;
    let f = spec.field();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sites = crate::decide::verify::probe_sites(spec);
    for _ in 0..trials {
        let x = random_config(&mut rng, spec, &sites);
        let mut acc = PatternConfig::zero(f, spec.k(), spec.d());
        let mut cur = x;
        for (i, &c) in coeffs.iter().enumerate() {
            if c % f.modulus() != 0 {
                acc = acc.add(&cur.scale(c));
            }
            if i + 1 < coeffs.len() {
                cur = apply_step(spec, &cur)?;
            }
        }
        if !acc.is_zero() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Coefficients of `z^m (z^n − 1)` over `GF(p)`.
pub fn annihilator_coeffs(p: u32, m: u64, n: u64) -> Vec<u32> {
    let mut c = vec![0u32; (m + n + 1) as usize];
    c[m as usize] = p - 1;
    c[(m + n) as usize] = 1;
    c
}

/// A finite spec standing in for a sparse one: every placed copy near the
/// origin plus two far copies of each promise-placed type.
pub fn truncate_sparse(spec: &NucaSpec) -> Result<NucaSpec> {
    let Some(sp) = spec.sparse() else { return Ok(spec.clone()) };
    let mut cells: Vec<(Point, crate::nuca::LocalRule)> =
        spec.perturbations().iter().map(|(c, r)| (c.clone(), r.clone())).collect();
    let extent = sp
        .clusters
        .iter()
        .flat_map(|c| c.cells.keys().map(Point::norm_inf))
        .max()
        .unwrap_or(0)
        + 4 * spec.radius()
        + 4;
    let mut far = 40 * extent;
    for c in &sp.clusters {
        let anchors: Vec<Point> = match &c.placement {
            Placement::Promise => (0..2)
                .map(|_| {
                    far += 20 * extent;
                    let mut v = vec![0; spec.d()];
                    v[0] = far;
                    Point(v)
                })
                .collect(),
            other => other.anchors_within(30 * extent),
        };
        for a in anchors {
            for (o, r) in &c.cells {
                let g = &a + o;
                if cells.iter().any(|(h, _)| h == &g) {
                    return Err(NucaError::Disjointness(format!("clusters collide at {g}")));
                }
                cells.push((g, r.clone()));
            }
        }
    }
    spec.with_sparse(None)?.with_perturbations(cells)
}
