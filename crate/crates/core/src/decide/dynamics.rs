//! Nilpotency, periodicity, eventual periodicity and Cayley–Hamilton.

use super::phi::{base_exponent, reduce_phi_with, ReductionMode};
use super::verify::{verify_power_identity, PowerRhs};
use super::{note_phi, require_linear, Certificate, DecideOptions, DecisionReport, Witness};
use crate::ca_decide::Property;
use crate::error::Result;
use crate::nuca::NucaSpec;

fn base_failed(property: Property) -> DecisionReport {
    let mut r = DecisionReport::new(property, false);
    r.witness = Some(Witness::BaseFails);
    r.diagnostics.notes.push("the constant background CA fails the test".into());
    r
}

pub fn decide_nilpotent(spec: &NucaSpec, opts: &DecideOptions) -> Result<DecisionReport> {
    if spec.is_sparse() {
        return super::decide_sparse(spec, Property::Nilpotent, opts);
    }
    let Some(n0) = base_exponent(spec, ReductionMode::Nilpotent) else {
        return Ok(base_failed(Property::Nilpotent));
    };
    let red = reduce_phi_with(spec, ReductionMode::Nilpotent, n0)?;
    let class = red.phi.classify(opts.period_cap);
    let mut r = DecisionReport::new(Property::Nilpotent, class.nilpotent_to_zero);
    note_phi(&mut r.diagnostics, &red, &class);
    match class.nilpotency_index {
        Some(q) => {
            let exponent = n0 * (q as u64 + 1);
            r.diagnostics.verification =
                Some(verify_power_identity(spec, exponent, PowerRhs::Zero, opts.samples, opts.seed)?);
            r.certificate = Some(Certificate::Nilpotent { exponent });
        }
        None => r.witness = Some(Witness::Phi),
    }
    Ok(r)
}

pub fn decide_periodic(spec: &NucaSpec, opts: &DecideOptions) -> Result<DecisionReport> {
    if spec.is_sparse() {
        return super::decide_sparse(spec, Property::Periodic, opts);
    }
    let Some(n0) = base_exponent(spec, ReductionMode::Periodic) else {
        return Ok(base_failed(Property::Periodic));
    };
    let red = reduce_phi_with(spec, ReductionMode::Periodic, n0)?;
    let class = red.phi.classify(opts.period_cap);
    let mut r = DecisionReport::new(Property::Periodic, class.bijective);
    note_phi(&mut r.diagnostics, &red, &class);
    if !class.bijective {
        r.witness = Some(Witness::Phi);
        return Ok(r);
    }
    match class.period {
        Some(np) => {
            let period = n0 * np;
            r.diagnostics.verification =
                Some(verify_power_identity(spec, period, PowerRhs::Power(0), opts.samples, opts.seed)?);
            r.certificate = Some(Certificate::Periodic { period });
        }
        None => r.diagnostics.notes.push("φ-order search hit its cap; verdict holds without a period".into()),
    }
    Ok(r)
}

/// `(m, n)` with `σ^{m+n} = σ^m`, or `None` when the φ-order search hit its cap.
fn eventual_pair(spec: &NucaSpec, opts: &DecideOptions, property: Property) -> Result<DecisionReport> {
    let Some(n0) = base_exponent(spec, ReductionMode::Eventual) else {
        return Ok(base_failed(property));
    };
    let red = reduce_phi_with(spec, ReductionMode::Eventual, n0)?;
    let class = red.phi.classify(opts.period_cap);
    let mut r = DecisionReport::new(property, true);
    note_phi(&mut r.diagnostics, &red, &class);
    match class.period {
        Some(np) => {
            let m = n0 * (1 + class.preperiod as u64);
            let n = n0 * np;
            r.diagnostics.verification =
                Some(verify_power_identity(spec, m + n, PowerRhs::Power(m), opts.samples, opts.seed)?);
            r.certificate = Some(if property == Property::CayleyHamilton {
                Certificate::Annihilator { preperiod: m, period: n }
            } else {
                Certificate::EventuallyPeriodic { preperiod: m, period: n }
            });
        }
        None => r.diagnostics.notes.push("φ-order search hit its cap; verdict holds without (m, n)".into()),
    }
    Ok(r)
}

pub fn decide_eventually_periodic(spec: &NucaSpec, opts: &DecideOptions) -> Result<DecisionReport> {
    if spec.is_sparse() {
        return super::decide_sparse(spec, Property::EventuallyPeriodic, opts);
    }
    eventual_pair(spec, opts, Property::EventuallyPeriodic)
}

/// Same verdict as eventual periodicity; the certificate is an annihilating
/// polynomial `z^m (z^n − 1)`.
pub fn decide_cayley_hamilton(spec: &NucaSpec, opts: &DecideOptions) -> Result<DecisionReport> {
    require_linear(spec, Property::CayleyHamilton)?;
    if spec.is_sparse() {
        return super::decide_sparse(spec, Property::CayleyHamilton, opts);
    }
    eventual_pair(spec, opts, Property::CayleyHamilton)
}
