//! Reduction of a perturbed NUCA to an endomorphism of a finite window space.

use crate::algebra::{FiniteEndo, Mat, Subspace};
use crate::ca_decide::{ca_eventually_periodic, ca_nilpotent, ca_periodic, CaCertificate};
use crate::error::{NucaError, Result};
use crate::nuca::rule::{pattern_from_index, table_size, LocalRule};
use crate::nuca::{power_spec, sumset, window_matrix, NucaSpec, Point};
use std::collections::HashMap;

/// Largest window pattern count enumerated for table-rule reductions.
pub const ENUM_CAP: u128 = 1 << 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReductionMode {
    Nilpotent,
    Periodic,
    Eventual,
}

/// `φ` for `σ_t = σ_s^{n0}` on the window around the perturbed cells of `t`.
///
/// With `E_t` the perturbed cells of `t`, `N` its memory and `F = E_t + N`:
/// nilpotent mode acts on `im f⁺_F ⊆ V^F`; periodic mode on all of
/// `V^{F+N}`; eventual mode on `im f⁺_{F+N} ⊆ V^{F+N}`.
#[derive(Clone, Debug)]
pub struct PhiReduction {
    pub mode: ReductionMode,
    pub n0: u64,
    pub power: NucaSpec,
    /// Sites of the carrier's ambient space, sorted.
    pub sites: Vec<Point>,
    /// `F = E_t + N`.
    pub window: Vec<Point>,
    pub phi: FiniteEndo,
    pub far_rules_checked: bool,
}

/// `n0` from the base verdict, or `None` when the base already fails.
pub fn base_exponent(spec: &NucaSpec, mode: ReductionMode) -> Option<u64> {
    let m = spec.base_symbol();
    match mode {
        ReductionMode::Nilpotent => match ca_nilpotent(&m).certificate? {
            CaCertificate::Nilpotent { n0 } => Some(n0),
            _ => None,
        },
        ReductionMode::Periodic => match ca_periodic(&m).certificate? {
            CaCertificate::Periodic { period } => Some(period),
            _ => None,
        },
        ReductionMode::Eventual => match ca_eventually_periodic(&m).certificate? {
            CaCertificate::Eventual { preperiod, period } => Some(period * preperiod.max(1).div_ceil(period)),
            _ => None,
        },
    }
}

pub fn reduce_phi(spec: &NucaSpec, mode: ReductionMode) -> Result<PhiReduction> {
    let n0 = base_exponent(spec, mode).ok_or_else(|| {
        NucaError::ReductionPrecondition(format!("base CA fails the {mode:?} test"))
    })?;
    reduce_phi_with(spec, mode, n0)
}

/// Evaluates `σ_t(ũ)|_out` for `u ∈ V^inp` extended by zero.
struct WindowEval<'a> {
    k: usize,
    cells: Vec<(&'a LocalRule, Vec<Option<usize>>)>,
}

impl<'a> WindowEval<'a> {
    fn new(t: &'a NucaSpec, out: &[Point], inp: &[Point]) -> Result<Self> {
        let index: HashMap<&Point, usize> = inp.iter().enumerate().map(|(i, p)| (p, i)).collect();
        let mut cells = vec![];
        for g in out {
            let rule = t.local_rule_at(g)?;
            let pos = rule.memory().iter().map(|m| index.get(&(g + m)).copied()).collect();
            cells.push((rule, pos));
        }
        Ok(WindowEval { k: t.k(), cells })
    }

    fn eval(&self, u: &[u32]) -> Vec<u32> {
        let k = self.k;
        let mut out = Vec::with_capacity(k * self.cells.len());
        let mut input = vec![];
        for (rule, pos) in &self.cells {
            input.clear();
            for p in pos {
                match p {
                    Some(i) => input.extend_from_slice(&u[i * k..(i + 1) * k]),
                    None => input.extend(std::iter::repeat_n(0, k)),
                }
            }
            out.extend(rule.evaluate(&input));
        }
        out
    }
}

fn enumerate(p: u32, len: usize) -> Result<impl Iterator<Item = Vec<u32>>> {
    let size = table_size(p, len);
    if size > ENUM_CAP {
        return Err(NucaError::ResourceLimit(format!(
            "table reduction needs {size} window patterns (cap {ENUM_CAP})"
        )));
    }
    Ok((0..size as usize).map(move |i| pattern_from_index(p, len, i)))
}

/// Same as [`reduce_phi`] with an explicit exponent satisfying the mode's
/// base identity (`c^{n0} = 0`, `c^{n0} = I` or `c^{2n0} = c^{n0}`).
pub fn reduce_phi_with(spec: &NucaSpec, mode: ReductionMode, n0: u64) -> Result<PhiReduction> {
    let t = power_spec(spec, n0)?;
    let f = t.field();
    let k = t.k();
    let nmem = t.memory().to_vec();
    let et = t.support();

    let base_sym = t.base_symbol();
    let far_ok = match mode {
        ReductionMode::Nilpotent => base_sym.is_zero(),
        ReductionMode::Periodic => base_sym.is_identity(),
        ReductionMode::Eventual => base_sym.mul(&base_sym) == base_sym,
    };
    if !far_ok {
        return Err(NucaError::ReductionPrecondition(format!(
            "far rules of the {n0}-th power do not have the expected form"
        )));
    }

    let window = if et.is_empty() { vec![] } else { sumset(&et, &nmem) };
    let outer = if window.is_empty() { vec![] } else { sumset(&window, &nmem) };
    let sites = match mode {
        ReductionMode::Nilpotent => window.clone(),
        _ => outer.clone(),
    };
    let in_window: Vec<bool> = sites.iter().map(|s| window.binary_search(s).is_ok()).collect();

    let phi = if t.is_linear() {
        let n = k * sites.len();
        let mut map = Mat::zeros(f, n, n);
        let fw = window_matrix(&t, &window, &sites)?;
        let mut row_f = 0;
        for (i, &inside) in in_window.iter().enumerate() {
            for c in 0..k {
                if inside {
                    for j in 0..n {
                        map.set(i * k + c, j, fw.get(row_f, j));
                    }
                    row_f += 1;
                } else {
                    map.set(i * k + c, i * k + c, 1);
                }
            }
        }
        let carrier = match mode {
            ReductionMode::Nilpotent => window_matrix(&t, &window, &outer)?.image(),
            ReductionMode::Periodic => Subspace::full(f, n),
            ReductionMode::Eventual => {
                let wider = sumset(&outer, &nmem);
                window_matrix(&t, &outer, &wider)?.image()
            }
        };
        FiniteEndo::linear(carrier, map)?
    } else {
        let p = f.modulus();
        let step = WindowEval::new(&t, &window, &sites)?;
        let apply = |w: &[u32]| -> Vec<u32> {
            let fw = step.eval(w);
            let mut out = Vec::with_capacity(w.len());
            let mut r = 0;
            for (i, &inside) in in_window.iter().enumerate() {
                if inside {
                    out.extend_from_slice(&fw[r * k..(r + 1) * k]);
                    r += 1;
                } else {
                    out.extend_from_slice(&w[i * k..(i + 1) * k]);
                }
            }
            out
        };
        let mut states: Vec<Vec<u32>> = match mode {
            ReductionMode::Periodic => enumerate(p, k * sites.len())?.collect(),
            ReductionMode::Nilpotent => {
                let img = WindowEval::new(&t, &window, &outer)?;
                enumerate(p, k * outer.len())?.map(|u| img.eval(&u)).collect()
            }
            ReductionMode::Eventual => {
                let wider = sumset(&outer, &nmem);
                let img = WindowEval::new(&t, &outer, &wider)?;
                enumerate(p, k * wider.len())?.map(|u| img.eval(&u)).collect()
            }
        };
        states.sort();
        states.dedup();
        let index: HashMap<&[u32], usize> = states.iter().enumerate().map(|(i, s)| (s.as_slice(), i)).collect();
        let mut map = Vec::with_capacity(states.len());
        for s in &states {
            let img = apply(s);
            let j = index.get(img.as_slice()).copied().ok_or_else(|| {
                NucaError::ReductionPrecondition("table map image escapes the carrier".into())
            })?;
            map.push(j);
        }
        FiniteEndo::table(states, map)?
    };
    Ok(PhiReduction { mode, n0, power: t, sites, window, phi, far_rules_checked: true })
}
