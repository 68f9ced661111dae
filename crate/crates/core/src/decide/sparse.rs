//! Decisions for sparse global perturbations: finitely many cluster types,
//! copies of which sit ever further apart.

use super::phi::{base_exponent, reduce_phi_with, ReductionMode};
use super::verify::{verify_power_identity, PowerRhs};
use super::{Certificate, DecideOptions, DecisionReport, Witness};
use crate::ca_decide::Property;
use crate::error::{NucaError, Result};
use crate::nuca::{LocalRule, NucaSpec, Placement, Point};

/// Extra copies per generated family checked against other families.
const LOOKAHEAD: u64 = 64;

#[derive(Clone, Debug)]
struct Copy {
    cells: Vec<(Point, LocalRule)>,
    lo: Vec<i64>,
    hi: Vec<i64>,
    explicit: bool,
    /// Cluster type index; `None` for the finite perturbation set.
    kind: Option<usize>,
}

impl Copy {
    fn new(cells: Vec<(Point, LocalRule)>, margin: i64, explicit: bool, kind: Option<usize>) -> Self {
        let d = cells[0].0.dim();
        let lo = (0..d).map(|i| cells.iter().map(|c| c.0 .0[i]).min().unwrap() - margin).collect();
        let hi = (0..d).map(|i| cells.iter().map(|c| c.0 .0[i]).max().unwrap() + margin).collect();
        Copy { cells, lo, hi, explicit, kind }
    }

    fn overlaps(&self, o: &Copy) -> bool {
        self.lo.iter().zip(&self.hi).zip(o.lo.iter().zip(&o.hi)).all(|((a0, a1), (b0, b1))| a0 <= b1 && b0 <= a1)
    }
}

fn find(parent: &mut [usize], mut i: usize) -> usize {
    while parent[i] != i {
        parent[i] = parent[parent[i]];
        i = parent[i];
    }
    i
}

fn mode_of(property: Property) -> Result<ReductionMode> {
    Ok(match property {
        Property::Nilpotent => ReductionMode::Nilpotent,
        Property::Periodic => ReductionMode::Periodic,
        Property::EventuallyPeriodic | Property::CayleyHamilton => ReductionMode::Eventual,
        _ => return Err(NucaError::Unsupported(format!("{property} on sparse specs"))),
    })
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// A finite spec: the base plus the given cells.
fn finite_part(spec: &NucaSpec, cells: Vec<(Point, LocalRule)>) -> Result<NucaSpec> {
    spec.with_sparse(None)?.with_perturbations(cells)
}

/// Placed copies: explicit anchors plus generated ones up to a cutoff past
/// which every copy is isolated. Returns the copies and the "core" cutoff
/// index per generated family.
fn placed_copies(spec: &NucaSpec, margin: i64) -> Result<Vec<Copy>> {
    let sp = spec.sparse().expect("sparse spec");
    let mut copies = vec![];
    let finite: Vec<(Point, LocalRule)> = spec.perturbations().iter().map(|(c, r)| (c.clone(), r.clone())).collect();
    if !finite.is_empty() {
        copies.push(Copy::new(finite, margin, true, None));
    }
    let place = |anchor: &Point, i: usize| -> Vec<(Point, LocalRule)> {
        sp.clusters[i].cells.iter().map(|(o, r)| (anchor + o, r.clone())).collect()
    };
    for (i, c) in sp.clusters.iter().enumerate() {
        if let Placement::Explicit(anchors) = &c.placement {
            for a in anchors {
                copies.push(Copy::new(place(a, i), margin, true, Some(i)));
            }
        }
    }
    let bound = copies
        .iter()
        .flat_map(|c| c.lo.iter().chain(&c.hi))
        .map(|v| v.abs())
        .max()
        .unwrap_or(0);
    for (i, c) in sp.clusters.iter().enumerate() {
        if !matches!(c.placement, Placement::Polynomial { .. } | Placement::Exponential { .. }) {
            continue;
        }
        let extent = c.cells.keys().map(Point::norm_inf).max().unwrap_or(0) + margin;
        let start = c.placement.monotone_from();
        // past `cut`, consecutive copies and the finite part are out of reach
        let mut n = 0u64;
        let mut cut = None;
        let mut prev: Option<Point> = None;
        loop {
            let Some(a) = c.placement.generated_anchor(n) else {
                return Err(NucaError::ResourceLimit("generator overflow before copies separate".into()));
            };
            copies.push(Copy::new(place(&a, i), margin, false, Some(i)));
            let far = prev.as_ref().is_some_and(|p| (&a - p).norm_inf() > 2 * extent)
                && a.norm_inf() > bound + 2 * extent;
            if cut.is_none() && n > start && far {
                cut = Some(n);
            }
            if let Some(k) = cut {
                if n >= k + LOOKAHEAD {
                    break;
                }
            }
            prev = Some(a);
            n += 1;
        }
    }
    Ok(copies)
}

/// Verdict for a sparse spec from the base test, the merged core clusters
/// and every cluster type.
pub fn decide_sparse(spec: &NucaSpec, property: Property, opts: &DecideOptions) -> Result<DecisionReport> {
    let mode = mode_of(property)?;
    if property == Property::CayleyHamilton {
        super::require_linear(spec, property)?;
    }
    let Some(sp) = spec.sparse() else {
        return super::decide(spec, property, opts);
    };
    let mut report = DecisionReport::new(property, false);
    let Some(n0) = base_exponent(spec, mode) else {
        report.witness = Some(Witness::BaseFails);
        return Ok(report);
    };
    report.diagnostics.n0 = Some(n0);
    // margin: N³ with N = M^{n0}
    let margin = 3 * n0 as i64 * spec.radius();
    let copies = placed_copies(spec, margin)?;

    let mut parent: Vec<usize> = (0..copies.len()).collect();
    for i in 0..copies.len() {
        for j in i + 1..copies.len() {
            if copies[i].overlaps(&copies[j]) {
                if copies[i].explicit && copies[j].explicit {
                    return Err(NucaError::Disjointness(format!(
                        "explicit clusters overlap within margin {margin}"
                    )));
                }
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                parent[a] = b;
            }
        }
    }
    let mut components: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for i in 0..copies.len() {
        let r = find(&mut parent, i);
        components.entry(r).or_default().push(i);
    }

    // finite clusters to test: merged components plus one copy of every type
    let mut tests: Vec<(Option<usize>, Vec<(Point, LocalRule)>)> = vec![];
    for members in components.values() {
        if members.len() > 1 || copies[members[0]].kind.is_none() {
            let cells: Vec<_> = members.iter().flat_map(|&i| copies[i].cells.clone()).collect();
            let kind = if members.len() == 1 { copies[members[0]].kind } else { None };
            tests.push((kind, cells));
        }
    }
    for (i, c) in sp.clusters.iter().enumerate() {
        tests.push((Some(i), c.cells.iter().map(|(o, r)| (o.clone(), r.clone())).collect()));
    }

    let (mut exponent, mut lcm, mut pre) = (1u64, 1u64, 0u64);
    let mut all_known = true;
    for (kind, cells) in &tests {
        let finite = finite_part(spec, cells.clone())?;
        let red = reduce_phi_with(&finite, mode, n0)?;
        let class = red.phi.classify(opts.period_cap);
        let ok = match mode {
            ReductionMode::Nilpotent => class.nilpotent_to_zero,
            ReductionMode::Periodic => class.bijective,
            ReductionMode::Eventual => true,
        };
        if !ok {
            report.witness = Some(kind.map(Witness::Cluster).unwrap_or(Witness::Phi));
            report.diagnostics.notes.push(format!("cluster with {} cells fails the φ test", cells.len()));
            return Ok(report);
        }
        if let Some(q) = class.nilpotency_index {
            exponent = exponent.max(n0 * (q as u64 + 1));
        }
        pre = pre.max(class.preperiod as u64);
        match class.period {
            Some(p) => lcm = lcm / gcd(lcm, p) * p,
            None => all_known = false,
        }
    }
    report.verdict = true;
    report.diagnostics.notes.push(format!("{} finite clusters tested", tests.len()));
    report.certificate = match mode {
        ReductionMode::Nilpotent => Some(Certificate::Nilpotent { exponent: exponent.max(n0) }),
        _ if !all_known => None,
        ReductionMode::Periodic => Some(Certificate::Periodic { period: n0 * lcm }),
        ReductionMode::Eventual if property == Property::CayleyHamilton => {
            Some(Certificate::Annihilator { preperiod: n0 * (1 + pre), period: n0 * lcm })
        }
        ReductionMode::Eventual => Some(Certificate::EventuallyPeriodic { preperiod: n0 * (1 + pre), period: n0 * lcm }),
    };
    // re-verify on a truncation: every tested cluster, spread far apart
    if let Some(cert) = &report.certificate {
        let truncated = truncation(spec, &tests, margin)?;
        let (a, rhs) = match *cert {
            Certificate::Nilpotent { exponent } => (exponent, PowerRhs::Zero),
            Certificate::Periodic { period } => (period, PowerRhs::Power(0)),
            Certificate::EventuallyPeriodic { preperiod, period } | Certificate::Annihilator { preperiod, period } => {
                (preperiod + period, PowerRhs::Power(preperiod))
            }
            _ => unreachable!(),
        };
        report.diagnostics.verification = Some(verify_power_identity(&truncated, a, rhs, opts.samples, opts.seed)?);
    }
    Ok(report)
}

/// All tested clusters placed side by side with gaps wider than the margin.
fn truncation(spec: &NucaSpec, tests: &[(Option<usize>, Vec<(Point, LocalRule)>)], margin: i64) -> Result<NucaSpec> {
    let d = spec.d();
    let mut cells = vec![];
    let mut offset = 0i64;
    for (_, cs) in tests {
        let lo = cs.iter().map(|c| c.0 .0[0]).min().unwrap();
        let hi = cs.iter().map(|c| c.0 .0[0]).max().unwrap();
        let mut shift = vec![0; d];
        shift[0] = offset - lo;
        let shift = Point(shift);
        cells.extend(cs.iter().map(|(p, r)| (p + &shift, r.clone())));
        offset += hi - lo + 2 * margin + 2 * spec.radius() + 1;
    }
    finite_part(spec, cells)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{Fp, Mat};
    use crate::nuca::{ClusterType, SparseSpec};

    fn zero_base(f: Fp) -> NucaSpec {
        NucaSpec::linear_ca(f, 1, 1, vec![(Point::new([0]), Mat::zeros(f, 1, 1))]).unwrap()
    }

    fn reader(f: Fp, off: i64) -> LocalRule {
        LocalRule::linear(f, 1, vec![Point::new([off])], vec![Mat::identity(f, 1)]).unwrap()
    }

    fn cluster(rule: LocalRule, placement: Placement) -> ClusterType {
        ClusterType { cells: [(Point::new([0]), rule)].into_iter().collect(), placement }
    }

    #[test]
    fn promise_copies_of_nilpotent_cluster() {
        let f = Fp::new(2).unwrap();
        let s = zero_base(f)
            .with_sparse(Some(SparseSpec { clusters: vec![cluster(reader(f, 1), Placement::Promise)] }))
            .unwrap();
        let r = decide_sparse(&s, Property::Nilpotent, &DecideOptions::default()).unwrap();
        assert!(r.verdict);
    }

    #[test]
    fn offending_cluster_detected() {
        let f = Fp::new(2).unwrap();
        let quad = Placement::Polynomial { offset: Point::new([0]), direction: Point::new([1]), coeffs: vec![0, 0, 4] };
        let s = zero_base(f)
            .with_sparse(Some(SparseSpec {
                clusters: vec![
                    cluster(reader(f, 1), quad),
                    cluster(reader(f, 0), Placement::Explicit(vec![Point::new([-50])])),
                ],
            }))
            .unwrap();
        let r = decide_sparse(&s, Property::Nilpotent, &DecideOptions::default()).unwrap();
        assert!(!r.verdict);
        assert_eq!(r.witness, Some(Witness::Cluster(1)));
    }

    #[test]
    fn explicit_overlap_rejected() {
        let f = Fp::new(2).unwrap();
        let one = Mat::identity(f, 1);
        let base =
            NucaSpec::linear_ca(f, 1, 1, vec![(Point::new([0]), Mat::zeros(f, 1, 1)), (Point::new([1]), Mat::zeros(f, 1, 1))])
                .unwrap();
        let r = LocalRule::linear(f, 1, vec![Point::new([1])], vec![one]).unwrap();
        let s = base
            .with_sparse(Some(SparseSpec {
                clusters: vec![cluster(r, Placement::Explicit(vec![Point::new([0]), Point::new([2])]))],
            }))
            .unwrap();
        assert!(matches!(
            decide_sparse(&s, Property::Nilpotent, &DecideOptions::default()),
            Err(NucaError::Disjointness(_))
        ));
    }
}
