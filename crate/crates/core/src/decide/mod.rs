//! Decision procedures for perturbed linear NUCA.

pub mod dynamics;
pub mod inverse;
pub mod phi;
pub mod sparse;
pub mod verify;

use crate::algebra::LaurentPoly;
use crate::ca_decide::Property;
use crate::error::{NucaError, Result};
use crate::nuca::{NucaSpec, PatternConfig};
use std::time::Instant;

pub use dynamics::{decide_cayley_hamilton, decide_eventually_periodic, decide_nilpotent, decide_periodic};
pub use inverse::{construct_inverse, decide_injective, decide_invertible, decide_post_surjective};
pub use phi::{reduce_phi, reduce_phi_with, PhiReduction, ReductionMode};
pub use sparse::decide_sparse;
pub use verify::Verification;

#[derive(Clone, Debug)]
pub struct DecideOptions {
    /// Random configurations per sampled verification.
    pub samples: usize,
    pub seed: u64,
    /// Largest perturbation radius tried by [`construct_inverse`].
    pub max_radius: usize,
    /// Cap on the φ-order search; affects certificates only.
    pub period_cap: u64,
}

impl Default for DecideOptions {
    fn default() -> Self {
        DecideOptions { samples: 50, seed: 0, max_radius: 6, period_cap: 1 << 16 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Certificate {
    /// `σ^exponent = 0`.
    Nilpotent { exponent: u64 },
    /// `σ^period = Id`.
    Periodic { period: u64 },
    /// `σ^{preperiod + period} = σ^preperiod`.
    EventuallyPeriodic { preperiod: u64, period: u64 },
    /// `P(σ) = 0` for `P(z) = z^preperiod (z^period − 1)`.
    Annihilator { preperiod: u64, period: u64 },
    /// Only the zero configuration on the support bound `D` solves `σ(x) = 0`;
    /// `inverse` is present when [`construct_inverse`] succeeded.
    Injective { kernel_window: usize, inverse: Option<Box<NucaSpec>> },
    /// The dual is injective (see the embedded dual report).
    DualInjective,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Witness {
    /// The base CA already fails the property.
    BaseFails,
    /// A nonzero finitely supported kernel element.
    Kernel(PatternConfig),
    /// `det` of the base symbol is not a Laurent unit; the kernel has no
    /// finitely supported witness on the searched windows.
    NonUnitDeterminant(LaurentPoly),
    /// A sparse cluster type whose `φ` fails the test.
    Cluster(usize),
    /// The reduced endomorphism fails the test.
    Phi,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Diagnostics {
    pub n0: Option<u64>,
    pub window_sites: Option<usize>,
    pub carrier_size: Option<u128>,
    pub phi_preperiod: Option<u64>,
    pub phi_period: Option<u64>,
    pub verification: Option<Verification>,
    pub notes: Vec<String>,
    pub elapsed_us: u128,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecisionReport {
    pub property: Property,
    pub verdict: bool,
    pub certificate: Option<Certificate>,
    pub witness: Option<Witness>,
    pub diagnostics: Diagnostics,
    pub dual: Option<Box<DecisionReport>>,
}

impl DecisionReport {
    pub(crate) fn new(property: Property, verdict: bool) -> Self {
        DecisionReport {
            property,
            verdict,
            certificate: None,
            witness: None,
            diagnostics: Diagnostics::default(),
            dual: None,
        }
    }
}

/// Records the phi reduction in the diagnostics.
pub(crate) fn note_phi(d: &mut Diagnostics, r: &PhiReduction, class: &crate::algebra::EndoClass) {
    d.n0 = Some(r.n0);
    d.window_sites = Some(r.sites.len());
    d.carrier_size = Some(r.phi.carrier_size());
    d.phi_preperiod = Some(class.preperiod as u64);
    d.phi_period = class.period;
}

pub(crate) fn require_linear(spec: &NucaSpec, property: Property) -> Result<()> {
    if !spec.is_linear() {
        return Err(NucaError::Unsupported(format!("{property} requires a fully linear spec")));
    }
    Ok(())
}

/// Dispatches on `property` and stamps the elapsed time.
pub fn decide(spec: &NucaSpec, property: Property, opts: &DecideOptions) -> Result<DecisionReport> {
    let start = Instant::now();
    let mut report = match property {
        Property::Nilpotent => decide_nilpotent(spec, opts),
        Property::Periodic => decide_periodic(spec, opts),
        Property::EventuallyPeriodic => decide_eventually_periodic(spec, opts),
        Property::CayleyHamilton => decide_cayley_hamilton(spec, opts),
        Property::Injective => decide_injective(spec, opts),
        Property::Invertible => decide_invertible(spec, opts),
        Property::PostSurjective => decide_post_surjective(spec, opts),
    }?;
    report.diagnostics.elapsed_us = start.elapsed().as_micros();
    Ok(report)
}
