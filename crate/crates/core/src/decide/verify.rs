//! Certificate re-verification.

use crate::error::{NucaError, Result};
use crate::nuca::{apply_steps, cube, power_spec, sumset, NucaSpec, PatternConfig, Point};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Longest simulation used for sampled verification.
pub const SAMPLE_STEP_CAP: u64 = 1 << 14;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verification {
    /// Compared the composed specs exactly.
    Exact,
    /// Compared simulations on random and impulse configurations.
    Sampled { samples: usize },
    /// Exponent beyond the simulation cap.
    Skipped { reason: String },
}

/// Right-hand side of a power identity.
#[derive(Clone, Copy, Debug)]
pub enum PowerRhs {
    Zero,
    Power(u64),
}

/// A random configuration supported on `sites`.
pub fn random_config(rng: &mut impl Rng, spec: &NucaSpec, sites: &[Point]) -> PatternConfig {
    let (f, k) = (spec.field(), spec.k());
    let mut x = PatternConfig::zero(f, k, spec.d());
    for s in sites {
        if rng.gen_bool(0.6) {
            x.set(s.clone(), (0..k).map(|_| rng.gen_range(0..f.modulus())).collect());
        }
    }
    x
}

/// Sites near the perturbation (or near the origin when there is none).
pub fn probe_sites(spec: &NucaSpec) -> Vec<Point> {
    let r = spec.radius().max(1);
    let mut e = spec.support();
    if e.is_empty() {
        e.push(Point::origin(spec.d()));
    }
    let reach = if spec.d() == 1 { 2 * r + 1 } else { r + 1 };
    sumset(&e, &cube(spec.d(), reach))
}

/// Sampled configurations: every impulse on the probe window plus random fills.
pub fn sample_configs(spec: &NucaSpec, samples: usize, seed: u64) -> Vec<PatternConfig> {
    let sites = probe_sites(spec);
    let mut out = vec![];
    for s in &sites {
        for c in 0..spec.k() {
            let mut v = vec![0; spec.k()];
            v[c] = 1;
            out.push(PatternConfig::delta(spec.field(), spec.k(), s.clone(), v));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..samples {
        out.push(random_config(&mut rng, spec, &sites));
    }
    out
}

fn exact(spec: &NucaSpec, a: u64, rhs: PowerRhs) -> Result<bool> {
    let lhs = if a == 0 { NucaSpec::identity(spec.field(), spec.k(), spec.d()) } else { power_spec(spec, a)? };
    Ok(match rhs {
        PowerRhs::Zero => {
            lhs.base_symbol().is_zero() && lhs.perturbations().values().all(|r| r.is_zero_map())
        }
        PowerRhs::Power(0) => lhs.equivalent(&NucaSpec::identity(spec.field(), spec.k(), spec.d())),
        PowerRhs::Power(b) => lhs.equivalent(&power_spec(spec, b)?),
    })
}

/// Checks `σ^a = rhs`, exactly when the composed specs fit the caps,
/// otherwise by simulation. A failed check is an internal error.
pub fn verify_power_identity(
    spec: &NucaSpec,
    a: u64,
    rhs: PowerRhs,
    samples: usize,
    seed: u64,
) -> Result<Verification> {
    let fail = || NucaError::ReductionPrecondition(format!("certificate σ^{a} = {rhs:?} failed re-verification"));
    if !spec.is_sparse() {
        match exact(spec, a, rhs) {
            Ok(true) => return Ok(Verification::Exact),
            Ok(false) => return Err(fail()),
            Err(e) if e.is_resource_limit() => {}
            Err(e) => return Err(e),
        }
    }
    if a > SAMPLE_STEP_CAP {
        return Ok(Verification::Skipped { reason: format!("exponent {a} exceeds {SAMPLE_STEP_CAP}") });
    }
    let configs = sample_configs(spec, samples, seed);
    for x in &configs {
        let y = apply_steps(spec, x, a)?;
        let ok = match rhs {
            PowerRhs::Zero => y.is_zero(),
            PowerRhs::Power(b) => y == apply_steps(spec, x, b)?,
        };
        if !ok {
            return Err(fail());
        }
    }
    Ok(Verification::Sampled { samples: configs.len() })
}
