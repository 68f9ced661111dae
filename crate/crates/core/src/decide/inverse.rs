//! Injectivity, inverse construction and post-surjectivity.

use super::{require_linear, Certificate, DecideOptions, DecisionReport, Witness};
use crate::algebra::{Mat, SymbolMatrix};
use crate::ca_decide::Property;
use crate::error::{NucaError, Result};
use crate::nuca::{
    apply_step, compose, cube, dual_spec, sumset, symmetrize, window_matrix, LocalRule, NucaSpec, PatternConfig,
    Point,
};

/// The finite form of `spec`; sparse specs qualify only with explicit placements.
fn linear_finite(spec: &NucaSpec, property: Property) -> Result<NucaSpec> {
    require_linear(spec, property)?;
    spec.finite_equivalent()?
        .ok_or_else(|| NucaError::Unsupported(format!("{property} on sparse specs with infinite placements")))
}

/// Symmetrized exponent support of the inverse symbol.
fn inverse_memory(inv: &SymbolMatrix) -> Vec<Point> {
    let pts: Vec<Point> = inv.support().into_iter().map(Point).collect();
    symmetrize(&pts, inv.dims())
}

/// Kernel of `σ_s` restricted to configurations supported on `sites`.
fn window_kernel(spec: &NucaSpec, sites: &[Point]) -> Result<Option<PatternConfig>> {
    if sites.is_empty() {
        return Ok(None);
    }
    let rows = sumset(sites, spec.memory());
    let ker = window_matrix(spec, &rows, sites)?.kernel();
    let Some(v) = ker.basis_vectors().into_iter().next() else {
        return Ok(None);
    };
    let x = PatternConfig::from_window(spec.field(), spec.k(), spec.d(), sites, &v);
    if !apply_step(spec, &x)?.is_zero() {
        return Err(NucaError::ReductionPrecondition("kernel witness does not vanish".into()));
    }
    Ok(Some(x))
}

/// Injective iff the base symbol is invertible and `σ_s(x) = 0` has only the
/// zero solution among configurations supported on `D = E − N′`, where `N′`
/// is the inverse CA's memory: every kernel element lives on `D`.
pub fn decide_injective(spec: &NucaSpec, opts: &DecideOptions) -> Result<DecisionReport> {
    let spec = &linear_finite(spec, Property::Injective)?;
    let _ = opts;
    let m = spec.base_symbol();
    let Some(inv) = m.inverse() else {
        let mut r = DecisionReport::new(Property::Injective, false);
        let reach = spec.support().iter().map(Point::norm_inf).max().unwrap_or(0) + 2 * spec.radius();
        let witness = crate::oracle::finite_support_kernel(spec, reach.min(6))?;
        r.witness = Some(match witness {
            Some(x) => Witness::Kernel(x),
            None => Witness::NonUnitDeterminant(m.det()),
        });
        r.diagnostics.notes.push(format!("det of the base symbol is {}, not a unit", m.det()));
        return Ok(r);
    };
    let nprime = inverse_memory(&inv);
    let neg: Vec<Point> = nprime.iter().map(|n| -n).collect();
    let d_sites = sumset(&spec.support(), &neg);
    let witness = window_kernel(spec, &d_sites)?;
    let mut r = DecisionReport::new(Property::Injective, witness.is_none());
    r.diagnostics.window_sites = Some(d_sites.len());
    match witness {
        Some(x) => r.witness = Some(Witness::Kernel(x)),
        None => r.certificate = Some(Certificate::Injective { kernel_window: d_sites.len(), inverse: None }),
    }
    Ok(r)
}

/// Injectivity plus an explicit inverse when one is found within `max_radius`.
pub fn decide_invertible(spec: &NucaSpec, opts: &DecideOptions) -> Result<DecisionReport> {
    let mut r = decide_injective(spec, opts)?;
    r.property = Property::Invertible;
    if r.verdict {
        match inverse_search(&linear_finite(spec, Property::Invertible)?, opts.max_radius) {
            Ok(t) => {
                if let Some(Certificate::Injective { inverse, .. }) = &mut r.certificate {
                    *inverse = Some(Box::new(t));
                }
            }
            Err(NucaError::RadiusExhausted(m)) => {
                r.diagnostics.notes.push(format!("no inverse found within radius {m}"));
            }
            Err(e) => return Err(e),
        }
    }
    Ok(r)
}

/// An LNUCA `t` with `σ_t ∘ σ_s = σ_s ∘ σ_t = Id`.
pub fn construct_inverse(spec: &NucaSpec, max_radius: usize) -> Result<NucaSpec> {
    let verdict = decide_injective(spec, &DecideOptions::default())?;
    if !verdict.verdict {
        return Err(NucaError::Precondition("construct_inverse needs an injective spec".into()));
    }
    inverse_search(&linear_finite(spec, Property::Invertible)?, max_radius)
}

fn inverse_search(spec: &NucaSpec, max_radius: usize) -> Result<NucaSpec> {
    let (f, k, d) = (spec.field(), spec.k(), spec.d());
    let inv = spec
        .base_symbol()
        .inverse()
        .ok_or_else(|| NucaError::Precondition("base symbol is not invertible".into()))?;
    let nprime = inverse_memory(&inv);
    let identity = NucaSpec::identity(f, k, d);
    for r in 0..=max_radius as i64 {
        let mut mem = nprime.clone();
        mem.extend(cube(d, r));
        let nmem = symmetrize(&mem, d);
        let cbase = LocalRule::from_symbol(&inv, nmem.clone())?;
        let cblock = cbase.row_block().unwrap();
        let neg: Vec<Point> = nmem.iter().map(|n| -n).collect();
        let cells = sumset(&spec.support(), &neg);
        let mut perts = vec![];
        let mut solved = true;
        for g in &cells {
            let out: Vec<Point> = nmem.iter().map(|n| g + n).collect();
            let inp = sumset(&out, spec.memory());
            let fg = window_matrix(spec, &out, &inp)?;
            let gi = inp.binary_search(g).unwrap();
            let mut proj = Mat::zeros(f, k, k * inp.len());
            for c in 0..k {
                proj.set(c, gi * k + c, 1);
            }
            if cblock.mul(&fg) == proj {
                continue;
            }
            // X·F = Proj, row by row through Fᵀ
            let ft = fg.transpose();
            let mut x = Mat::zeros(f, k, k * out.len());
            for c in 0..k {
                let Some(row) = ft.solve(proj.row(c)) else {
                    solved = false;
                    break;
                };
                for (j, v) in row.into_iter().enumerate() {
                    x.set(c, j, v);
                }
            }
            if !solved {
                break;
            }
            let mats: Vec<Mat> = (0..nmem.len())
                .map(|j| x.select_cols(&(j * k..(j + 1) * k).collect::<Vec<_>>()))
                .collect();
            perts.push((g.clone(), LocalRule::linear(f, k, nmem.clone(), mats)?));
        }
        if !solved {
            continue;
        }
        let t = NucaSpec::new(f, k, d, nmem.clone(), cbase, perts, None)?;
        if compose(&t, spec)?.equivalent(&identity) && compose(spec, &t)?.equivalent(&identity) {
            return Ok(t.compact()?);
        }
    }
    Err(NucaError::RadiusExhausted(max_radius))
}

/// Post-surjective iff the dual NUCA is injective.
pub fn decide_post_surjective(spec: &NucaSpec, opts: &DecideOptions) -> Result<DecisionReport> {
    let spec = &linear_finite(spec, Property::PostSurjective)?;
    let dual = decide_injective(&dual_spec(spec)?, opts)?;
    let mut r = DecisionReport::new(Property::PostSurjective, dual.verdict);
    if dual.verdict {
        r.certificate = Some(Certificate::DualInjective);
    }
    r.diagnostics.notes.push("decided through injectivity of the dual".into());
    r.dual = Some(Box::new(dual));
    Ok(r)
}
