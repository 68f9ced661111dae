//! Curated small specs with hand-derived verdicts, and a seeded generator of
//! random small specs. Shared by tests, benches and the CLI test-suite.

use crate::algebra::{Fp, Mat};
use crate::ca_decide::Property;
use crate::nuca::{ClusterType, LocalRule, NucaSpec, Placement, Point, SparseSpec};
use rand::Rng;

/// The six properties decided for NUCA, in report order.
pub const SIX: [Property; 6] = [
    Property::Nilpotent,
    Property::Periodic,
    Property::EventuallyPeriodic,
    Property::CayleyHamilton,
    Property::Injective,
    Property::PostSurjective,
];

/// Expected verdicts in [`SIX`] order; `None` marks an unsupported combination.
pub type Expect = [Option<bool>; 6];

#[derive(Clone, Debug)]
pub struct SuiteCase {
    pub name: &'static str,
    pub spec: NucaSpec,
    pub expect: Expect,
}

const T: Option<bool> = Some(true);
const F: Option<bool> = Some(false);
const U: Option<bool> = None;

fn gf(p: u64) -> Fp {
    Fp::new(p).unwrap()
}

fn pt(c: &[i64]) -> Point {
    Point::new(c.to_vec())
}

fn scalar(f: Fp, v: i64) -> Mat {
    Mat::from_rows(f, &[vec![v]]).unwrap()
}

/// `k = 1` linear rule from `(offset, coefficient)` pairs.
pub fn scalar_rule(f: Fp, terms: &[(&[i64], i64)]) -> LocalRule {
    let (mem, mats) = terms.iter().map(|(o, c)| (pt(o), scalar(f, *c))).unzip();
    LocalRule::linear(f, 1, mem, mats).unwrap()
}

/// `k = 1` constant CA from `(offset, coefficient)` pairs.
pub fn scalar_ca(f: Fp, d: usize, terms: &[(&[i64], i64)]) -> NucaSpec {
    NucaSpec::linear_ca(f, 1, d, terms.iter().map(|(o, c)| (pt(o), scalar(f, *c))).collect()).unwrap()
}

fn with(spec: NucaSpec, cells: Vec<(&[i64], LocalRule)>) -> NucaSpec {
    spec.with_perturbations(cells.into_iter().map(|(c, r)| (pt(c), r)).collect()).unwrap()
}

fn sparse(spec: NucaSpec, clusters: Vec<(LocalRule, Placement)>) -> NucaSpec {
    let clusters = clusters
        .into_iter()
        .map(|(r, placement)| ClusterType { cells: [(Point::origin(spec.d()), r)].into_iter().collect(), placement })
        .collect();
    spec.with_sparse(Some(SparseSpec { clusters })).unwrap()
}

pub fn curated_suite() -> Vec<SuiteCase> {
    let f2 = gf(2);
    let f3 = gf(3);
    let zero1 = || scalar_ca(f2, 1, &[(&[0], 0)]);
    let id1 = || scalar_ca(f2, 1, &[(&[0], 1)]);
    let own = || scalar_rule(f2, &[(&[0], 1)]);
    let read1 = || scalar_rule(f2, &[(&[1], 1)]);
    let quad = Placement::Polynomial { offset: pt(&[0]), direction: pt(&[1]), coeffs: vec![0, 0, 6] };
    let and = LocalRule::table(f2, 1, vec![pt(&[0]), pt(&[1])], vec![0, 0, 0, 1]).unwrap();
    let swap = Mat::from_rows(f3, &[vec![0, 1], vec![1, 0]]).unwrap();
    let upper = Mat::from_rows(f2, &[vec![0, 1], vec![0, 0]]).unwrap();

    let case = |name, spec, expect| SuiteCase { name, spec, expect };
    vec![
        case("zero", zero1(), [T, F, T, T, F, F]),
        case("identity", id1(), [F, T, T, T, T, T]),
        case("shift", scalar_ca(f2, 1, &[(&[1], 1)]), [F, F, F, F, T, T]),
        case("rule90-sym", scalar_ca(f2, 1, &[(&[-1], 1), (&[1], 1)]), [F, F, F, F, F, F]),
        case("one-plus-x", scalar_ca(f2, 1, &[(&[0], 1), (&[1], 1)]), [F, F, F, F, F, F]),
        case("zero-own-identity", with(zero1(), vec![(&[0], own())]), [F, F, T, T, F, F]),
        case("zero-read-offset-1", with(zero1(), vec![(&[0], read1())]), [T, F, T, T, F, F]),
        case("identity-zero-at-0", with(id1(), vec![(&[0], scalar_rule(f2, &[(&[0], 0)]))]), [F, F, T, T, F, F]),
        case(
            "identity-xor01-at-0",
            with(id1(), vec![(&[0], scalar_rule(f2, &[(&[0], 1), (&[1], 1)]))]),
            [F, T, T, T, T, T],
        ),
        case(
            "strict-triangular",
            NucaSpec::linear_ca(f2, 2, 1, vec![(pt(&[1]), upper)]).unwrap(),
            [T, F, T, T, F, F],
        ),
        case("scalar-2-gf3", scalar_ca(f3, 1, &[(&[0], 2)]), [F, T, T, T, T, T]),
        case("swap-gf3", NucaSpec::linear_ca(f3, 2, 1, vec![(pt(&[0]), swap)]).unwrap(), [F, T, T, T, T, T]),
        case(
            "shift-zero-at-0-gf3",
            with(scalar_ca(f3, 1, &[(&[1], 1)]), vec![(&[0], scalar_rule(f3, &[(&[0], 0)]))]),
            [F, F, F, F, F, F],
        ),
        case(
            "planar-identity-shear-gf3",
            with(scalar_ca(f3, 2, &[(&[0, 0], 1)]), vec![(&[0, 0], scalar_rule(f3, &[(&[0, 0], 1), (&[1, 0], 1)]))]),
            [F, T, T, T, T, T],
        ),
        case(
            "planar-zero-read-up",
            with(scalar_ca(f2, 2, &[(&[0, 0], 0)]), vec![(&[0, 0], scalar_rule(f2, &[(&[0, 1], 1)]))]),
            [T, F, T, T, F, F],
        ),
        case("identity-and-table", with(id1(), vec![(&[0], and)]), [F, F, T, U, U, U]),
        case("sparse-read-offset-1", sparse(zero1(), vec![(read1(), quad.clone())]), [T, F, T, T, U, U]),
        case(
            "sparse-explicit-read-offset-1",
            sparse(zero1(), vec![(read1(), Placement::Explicit(vec![pt(&[0]), pt(&[10])]))]),
            [T, F, T, T, F, F],
        ),
        case(
            "sparse-one-own-identity",
            sparse(zero1(), vec![(read1(), quad), (own(), Placement::Explicit(vec![pt(&[-40])]))]),
            [F, F, T, T, U, U],
        ),
    ]
}

/// A random finite spec with `p ≤ 3`, `k ≤ 2`, `d = 1`, `|M| ≤ 3`, `|E| ≤ 2`.
pub fn random_spec(rng: &mut impl Rng) -> NucaSpec {
    let p = if rng.gen_bool(0.5) { 2 } else { 3 };
    let f = gf(p);
    let k = rng.gen_range(1..=2);
    let all = [pt(&[-1]), pt(&[0]), pt(&[1])];
    let mut mem: Vec<Point> = all.iter().filter(|_| rng.gen_bool(0.6)).cloned().collect();
    if mem.is_empty() {
        mem.push(all[rng.gen_range(0..3)].clone());
    }
    // sparse matrices keep a fair share of nilpotent and periodic bases
    let random_mat = |rng: &mut dyn rand::RngCore, density: f64| {
        let data = (0..k * k)
            .map(|_| if rng.gen_bool(density) { rng.gen_range(1..p as u32) } else { 0 })
            .collect();
        Mat::from_data(f, k, k, data)
    };
    let density = [0.2, 0.4, 0.7][rng.gen_range(0..3)];
    let base_mats: Vec<Mat> = mem.iter().map(|_| random_mat(rng, density)).collect();
    let base = LocalRule::linear(f, k, mem.clone(), base_mats).unwrap();
    let ne = rng.gen_range(0..=2);
    let mut perts = vec![];
    let mut used = vec![];
    for _ in 0..ne {
        let c = rng.gen_range(-2..=2i64);
        if used.contains(&c) {
            continue;
        }
        used.push(c);
        let mats: Vec<Mat> = mem.iter().map(|_| random_mat(rng, 0.5)).collect();
        perts.push((pt(&[c]), LocalRule::linear(f, k, mem.clone(), mats).unwrap()));
    }
    NucaSpec::new(f, k, 1, mem, base, perts, None).unwrap()
}
