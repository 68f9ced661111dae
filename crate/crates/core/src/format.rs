//! JSON interchange: spec files, configuration files and reports.
//!
//! Offsets are written as strings `"(i)"` / `"(i,j)"` when they key a map and
//! as integer lists elsewhere. Matrices are row-major. Emitted specs are
//! normalized, so parsing an emitted spec reproduces it exactly.

use crate::algebra::{Fp, Mat};
use crate::ca_decide::Property;
use crate::decide::{Certificate, DecisionReport, Diagnostics, Witness};
use crate::error::{NucaError, Result};
use crate::nuca::rule::{pattern_from_index, RuleKind};
use crate::nuca::{ClusterType, LocalRule, NucaSpec, PatternConfig, Placement, Point, SparseSpec};
use serde::de::{MapAccess, Visitor};
use serde::ser::SerializeMap;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::{json, Value};
use std::fmt;

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

fn perr(e: impl fmt::Display) -> NucaError {
    NucaError::Parse(e.to_string())
}

/// Parses `"(i)"` or `"(i,j)"`.
pub fn parse_offset(s: &str) -> Result<Point> {
    let inner = s
        .trim()
        .strip_prefix('(')
        .and_then(|r| r.strip_suffix(')'))
        .ok_or_else(|| perr(format!("offset {s:?} must look like (i) or (i,j)")))?;
    let coords = inner
        .split(',')
        .map(|c| c.trim().parse::<i64>().map_err(|_| perr(format!("bad offset coordinate in {s:?}"))))
        .collect::<Result<Vec<_>>>()?;
    Ok(Point(coords))
}

/// `offset → matrix`, serialized as a JSON object in offset order.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct CoeffMap(pub Vec<(String, Vec<Vec<i64>>)>);

impl Serialize for CoeffMap {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut m = s.serialize_map(Some(self.0.len()))?;
        for (k, v) in &self.0 {
            m.serialize_entry(k, v)?;
        }
        m.end()
    }
}

impl<'de> Deserialize<'de> for CoeffMap {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct V;
        impl<'de> Visitor<'de> for V {
            type Value = CoeffMap;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a map from offset strings to matrices")
            }
            fn visit_map<A: MapAccess<'de>>(self, mut a: A) -> std::result::Result<CoeffMap, A::Error> {
                let mut out = vec![];
                while let Some((k, v)) = a.next_entry::<String, Vec<Vec<i64>>>()? {
                    if out.iter().any(|(o, _): &(String, _)| o == &k) {
                        return Err(serde::de::Error::custom(format!("duplicate offset {k}")));
                    }
                    out.push((k, v));
                }
                Ok(CoeffMap(out))
            }
        }
        d.deserialize_map(V)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum RuleFile {
    Linear {
        coeffs: CoeffMap,
    },
    /// `outputs[i]` is the value on the input pattern with index `i`; the
    /// first memory site's first component is the most significant digit.
    Table {
        memory: Vec<Vec<i64>>,
        outputs: Vec<Vec<i64>>,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CellRule {
    pub cell: Vec<i64>,
    pub rule: RuleFile,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", deny_unknown_fields)]
pub enum PlacementFile {
    Promise,
    Explicit(Vec<Vec<i64>>),
    Polynomial { offset: Vec<i64>, direction: Vec<i64>, coeffs: Vec<i64> },
    Exponential { offset: Vec<i64>, direction: Vec<i64>, scale: i64, base: i64 },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClusterFile {
    /// `cell` is relative to the cluster anchor.
    pub cells: Vec<CellRule>,
    pub placement: PlacementFile,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SparseFile {
    pub clusters: Vec<ClusterFile>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecFile {
    pub p: u64,
    pub k: usize,
    pub d: usize,
    #[serde(default)]
    pub memory: Vec<Vec<i64>>,
    pub base: RuleFile,
    #[serde(default)]
    pub perturbations: Vec<CellRule>,
    #[serde(default)]
    pub sparse: Option<SparseFile>,
}

fn mat_from(f: Fp, k: usize, rows: &[Vec<i64>]) -> Result<Mat> {
    if rows.len() != k || rows.iter().any(|r| r.len() != k) {
        return Err(NucaError::InvalidSpec(format!("coefficient matrices must be {k}x{k}")));
    }
    Mat::from_rows(f, rows)
}

fn mat_to(m: &Mat) -> Vec<Vec<i64>> {
    m.to_rows().into_iter().map(|r| r.into_iter().map(i64::from).collect()).collect()
}

fn point_of(v: &[i64], d: usize) -> Result<Point> {
    if v.len() != d {
        return Err(NucaError::InvalidSpec(format!("point {v:?} is not {d}-dimensional")));
    }
    Ok(Point(v.to_vec()))
}

impl RuleFile {
    fn to_rule(&self, f: Fp, k: usize, d: usize) -> Result<LocalRule> {
        match self {
            RuleFile::Linear { coeffs } => {
                let mut mem = vec![];
                let mut mats = vec![];
                for (o, m) in &coeffs.0 {
                    let p = parse_offset(o)?;
                    if p.dim() != d {
                        return Err(NucaError::InvalidSpec(format!("offset {o} is not {d}-dimensional")));
                    }
                    mem.push(p);
                    mats.push(mat_from(f, k, m)?);
                }
                if mem.is_empty() {
                    mem.push(Point::origin(d));
                    mats.push(Mat::zeros(f, k, k));
                }
                LocalRule::linear(f, k, mem, mats)
            }
            RuleFile::Table { memory, outputs } => {
                let mem = memory.iter().map(|m| point_of(m, d)).collect::<Result<Vec<_>>>()?;
                if outputs.iter().any(|o| o.len() != k) {
                    return Err(NucaError::InvalidSpec(format!("table outputs must have length {k}")));
                }
                let flat = outputs.iter().flatten().map(|&v| f.reduce(v)).collect();
                LocalRule::table(f, k, mem, flat)
            }
        }
    }

    fn from_rule(r: &LocalRule) -> Self {
        match r.kind() {
            RuleKind::Linear(mats) => RuleFile::Linear {
                coeffs: CoeffMap(
                    r.memory()
                        .iter()
                        .zip(mats)
                        .filter(|(_, m)| !m.is_zero())
                        .map(|(o, m)| (o.to_string(), mat_to(m)))
                        .collect(),
                ),
            },
            RuleKind::Table(t) => RuleFile::Table {
                memory: r.memory().iter().map(|p| p.0.clone()).collect(),
                outputs: t.chunks(r.k()).map(|c| c.iter().map(|&v| i64::from(v)).collect()).collect(),
            },
        }
    }
}

impl PlacementFile {
    fn to_placement(&self, d: usize) -> Result<Placement> {
        Ok(match self {
            PlacementFile::Promise => Placement::Promise,
            PlacementFile::Explicit(a) => {
                Placement::Explicit(a.iter().map(|p| point_of(p, d)).collect::<Result<_>>()?)
            }
            PlacementFile::Polynomial { offset, direction, coeffs } => Placement::Polynomial {
                offset: point_of(offset, d)?,
                direction: point_of(direction, d)?,
                coeffs: coeffs.clone(),
            },
            PlacementFile::Exponential { offset, direction, scale, base } => Placement::Exponential {
                offset: point_of(offset, d)?,
                direction: point_of(direction, d)?,
                scale: *scale,
                base: *base,
            },
        })
    }

    fn from_placement(p: &Placement) -> Self {
        match p {
            Placement::Promise => PlacementFile::Promise,
            Placement::Explicit(a) => PlacementFile::Explicit(a.iter().map(|p| p.0.clone()).collect()),
            Placement::Polynomial { offset, direction, coeffs } => PlacementFile::Polynomial {
                offset: offset.0.clone(),
                direction: direction.0.clone(),
                coeffs: coeffs.clone(),
            },
            Placement::Exponential { offset, direction, scale, base } => PlacementFile::Exponential {
                offset: offset.0.clone(),
                direction: direction.0.clone(),
                scale: *scale,
                base: *base,
            },
        }
    }
}

impl SpecFile {
    pub fn to_spec(&self) -> Result<NucaSpec> {
        let f = Fp::new(self.p)?;
        let (k, d) = (self.k, self.d);
        if k == 0 || d == 0 {
            return Err(NucaError::InvalidSpec("k and d must be positive".into()));
        }
        let memory = self.memory.iter().map(|m| point_of(m, d)).collect::<Result<Vec<_>>>()?;
        let base = self.base.to_rule(f, k, d)?;
        let perts = self
            .perturbations
            .iter()
            .map(|c| Ok((point_of(&c.cell, d)?, c.rule.to_rule(f, k, d)?)))
            .collect::<Result<Vec<_>>>()?;
        let sparse = match &self.sparse {
            None => None,
            Some(sf) => {
                let mut clusters = vec![];
                for c in &sf.clusters {
                    let mut cells = std::collections::BTreeMap::new();
                    for cr in &c.cells {
                        let at = point_of(&cr.cell, d)?;
                        if cells.insert(at.clone(), cr.rule.to_rule(f, k, d)?).is_some() {
                            return Err(NucaError::InvalidSpec(format!("duplicate cluster cell {at}")));
                        }
                    }
                    clusters.push(ClusterType { cells, placement: c.placement.to_placement(d)? });
                }
                Some(SparseSpec { clusters })
            }
        };
        NucaSpec::new(f, k, d, memory, base, perts, sparse)
    }

    pub fn from_spec(s: &NucaSpec) -> Self {
        let cell_rules = |m: &std::collections::BTreeMap<Point, LocalRule>| -> Vec<CellRule> {
            m.iter().map(|(c, r)| CellRule { cell: c.0.clone(), rule: RuleFile::from_rule(r) }).collect()
        };
        SpecFile {
            p: u64::from(s.field().modulus()),
            k: s.k(),
            d: s.d(),
            memory: s.memory().iter().map(|p| p.0.clone()).collect(),
            base: RuleFile::from_rule(s.base()),
            perturbations: cell_rules(s.perturbations()),
            sparse: s.sparse().map(|sp| SparseFile {
                clusters: sp
                    .clusters
                    .iter()
                    .map(|c| ClusterFile {
                        cells: cell_rules(&c.cells),
                        placement: PlacementFile::from_placement(&c.placement),
                    })
                    .collect(),
            }),
        }
    }
}

pub fn parse_spec(text: &str) -> Result<NucaSpec> {
    let file: SpecFile = serde_json::from_str(text).map_err(perr)?;
    file.to_spec()
}

pub fn spec_to_value(s: &NucaSpec) -> Value {
    serde_json::to_value(SpecFile::from_spec(s)).expect("spec files serialize")
}

pub fn spec_to_json(s: &NucaSpec) -> String {
    serde_json::to_string_pretty(&SpecFile::from_spec(s)).expect("spec files serialize")
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigCell {
    pub cell: Vec<i64>,
    pub value: Vec<i64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub support: Vec<ConfigCell>,
}

impl ConfigFile {
    pub fn to_config(&self, field: Fp, k: usize, d: usize) -> Result<PatternConfig> {
        let mut x = PatternConfig::zero(field, k, d);
        for c in &self.support {
            let at = point_of(&c.cell, d)?;
            if c.value.len() != k {
                return Err(NucaError::InvalidSpec(format!("cell {at} needs {k} components")));
            }
            if x.get(&at).is_some() {
                return Err(NucaError::InvalidSpec(format!("cell {at} listed twice")));
            }
            x.set(at, c.value.iter().map(|&v| field.reduce(v)).collect());
        }
        Ok(x)
    }

    pub fn from_config(x: &PatternConfig) -> Self {
        ConfigFile {
            support: x
                .iter()
                .map(|(p, v)| ConfigCell { cell: p.0.clone(), value: v.iter().map(|&a| i64::from(a)).collect() })
                .collect(),
        }
    }
}

pub fn parse_config(text: &str, spec: &NucaSpec) -> Result<PatternConfig> {
    let file: ConfigFile = serde_json::from_str(text).map_err(perr)?;
    file.to_config(spec.field(), spec.k(), spec.d())
}

pub fn config_to_value(x: &PatternConfig) -> Value {
    serde_json::to_value(ConfigFile::from_config(x)).expect("configs serialize")
}

fn certificate_value(c: &Certificate) -> Value {
    match c {
        Certificate::Nilpotent { exponent } => json!({"kind": "nilpotent", "exponent": exponent}),
        Certificate::Periodic { period } => json!({"kind": "periodic", "period": period}),
        Certificate::EventuallyPeriodic { preperiod, period } => {
            json!({"kind": "eventually-periodic", "preperiod": preperiod, "period": period})
        }
        Certificate::Annihilator { preperiod, period } => json!({
            "kind": "annihilator",
            "preperiod": preperiod,
            "period": period,
            "polynomial": format!("z^{preperiod}*(z^{period} - 1)"),
        }),
        Certificate::Injective { kernel_window, inverse } => json!({
            "kind": "injective",
            "kernel_window": kernel_window,
            "inverse": inverse.as_ref().map(|t| spec_to_value(t)),
        }),
        Certificate::DualInjective => json!({"kind": "dual-injective"}),
    }
}

fn witness_value(w: &Witness) -> Value {
    match w {
        Witness::BaseFails => json!({"kind": "base-fails"}),
        Witness::Kernel(x) => json!({"kind": "kernel", "config": config_to_value(x)}),
        Witness::NonUnitDeterminant(det) => json!({"kind": "non-unit-determinant", "det": det.to_string()}),
        Witness::Cluster(i) => json!({"kind": "cluster", "index": i}),
        Witness::Phi => json!({"kind": "phi"}),
    }
}

fn diagnostics_value(d: &Diagnostics, timings: bool) -> serde_json::Map<String, Value> {
    let mut m = serde_json::Map::new();
    m.insert("n0".into(), json!(d.n0));
    m.insert("window_sites".into(), json!(d.window_sites));
    m.insert("carrier_size".into(), json!(d.carrier_size.map(|c| u64::try_from(c).unwrap_or(u64::MAX))));
    m.insert("phi_preperiod".into(), json!(d.phi_preperiod));
    m.insert("phi_period".into(), json!(d.phi_period));
    m.insert("verification".into(), json!(d.verification));
    m.insert("notes".into(), json!(d.notes));
    if timings {
        m.insert("elapsed_us".into(), json!(u64::try_from(d.elapsed_us).unwrap_or(u64::MAX)));
    }
    m
}

/// The report as a JSON object with keys
/// `property, verdict, certificate, diagnostics, tool_version`.
/// Elapsed time is included only with `timings`, keeping reports reproducible.
pub fn report_to_value(r: &DecisionReport, timings: bool) -> Value {
    let mut diag = diagnostics_value(&r.diagnostics, timings);
    diag.insert("witness".into(), r.witness.as_ref().map(witness_value).unwrap_or(Value::Null));
    diag.insert("dual".into(), r.dual.as_ref().map(|d| report_to_value(d, timings)).unwrap_or(Value::Null));
    json!({
        "property": r.property.name(),
        "verdict": r.verdict,
        "certificate": r.certificate.as_ref().map(certificate_value).unwrap_or(Value::Null),
        "diagnostics": Value::Object(diag),
        "tool_version": TOOL_VERSION,
    })
}

/// Oracle report: the independent verdict and its agreement with `decide`.
pub fn oracle_report_value(property: Property, verdict: bool, method: &str, decided: Option<bool>) -> Value {
    json!({
        "property": property.name(),
        "verdict": verdict,
        "certificate": Value::Null,
        "diagnostics": {
            "method": method,
            "decide_verdict": decided,
            "agree": decided.map(|d| d == verdict),
        },
        "tool_version": TOOL_VERSION,
    })
}

/// All input patterns of a table rule, for documentation and tooling.
pub fn table_inputs(rule: &LocalRule) -> Vec<Vec<u32>> {
    let p = rule.field().modulus();
    let len = rule.k() * rule.memory().len();
    let n = (p as usize).pow(len as u32);
    (0..n).map(|i| pattern_from_index(p, len, i)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::suite::curated_suite;

    #[test]
    fn offsets_parse() {
        assert_eq!(parse_offset("(1)").unwrap(), Point::new([1]));
        assert_eq!(parse_offset("( -2 , 3 )").unwrap(), Point::new([-2, 3]));
        assert!(parse_offset("1,2").is_err());
    }

    #[test]
    fn suite_round_trips() {
        for case in curated_suite() {
            let text = spec_to_json(&case.spec);
            let back = parse_spec(&text).unwrap();
            assert_eq!(back, case.spec, "{}", case.name);
            assert_eq!(spec_to_json(&back), text);
        }
    }

    #[test]
    fn unknown_keys_rejected() {
        let text = r#"{"p":2,"k":1,"d":1,"base":{"kind":"linear","coeffs":{"(0)":[[1]]}},"extra":1}"#;
        assert!(matches!(parse_spec(text), Err(NucaError::Parse(_))));
        let text = r#"{"p":2,"k":1,"d":1,"base":{"kind":"linear","coeffs":{"(0)":[[1]]},"x":0}}"#;
        assert!(matches!(parse_spec(text), Err(NucaError::Parse(_))));
    }

    #[test]
    fn values_reduced_mod_p() {
        let text = r#"{"p":3,"k":1,"d":1,"base":{"kind":"linear","coeffs":{"(1)":[[4]],"(0)":[[-1]]}}}"#;
        let s = parse_spec(text).unwrap();
        assert_eq!(s.base().matrix_at(&Point::new([1])).unwrap().get(0, 0), 1);
        assert_eq!(s.base().matrix_at(&Point::new([0])).unwrap().get(0, 0), 2);
        assert!(matches!(
            parse_spec(r#"{"p":4,"k":1,"d":1,"base":{"kind":"linear","coeffs":{}}}"#),
            Err(NucaError::NonPrime(4))
        ));
    }

    #[test]
    fn config_round_trip() {
        let s = &curated_suite()[0].spec;
        let x = parse_config(r#"{"support":[{"cell":[3],"value":[5]},{"cell":[-1],"value":[2]}]}"#, s).unwrap();
        assert_eq!(x.value(&Point::new([3])), vec![1]);
        assert_eq!(x.support_len(), 1);
        let v = config_to_value(&x);
        assert_eq!(parse_config(&v.to_string(), s).unwrap(), x);
    }
}
