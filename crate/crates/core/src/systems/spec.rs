//! The system spec document: a JSON object tagged by `kind`.
//!
//! ```json
//! {"kind": "finite", "n": 3, "metric": "discrete", "generators": [[1, 2, 0]]}
//! {"kind": "sft", "vertices": 2, "edges": [[0, 0], [0, 1], [1, 0]]}
//! {"kind": "map1d", "family": "logistic", "params": [4.0]}
//! {"kind": "commuting_circle", "a": 2, "b": 3}
//! ```
//!
//! A finite `metric` is either `"discrete"` or a row-major matrix, given flat
//! (`n²` entries) or as `n` rows. Entries are integers or `"p/q"` strings.

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use super::{FiniteMetric, FiniteSemiflow, MapFamily, NumericCascade, SftSystem, System};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SystemSpec {
    Finite { n: usize, metric: MetricSpec, generators: Vec<Vec<usize>> },
    Sft { vertices: usize, edges: Vec<[usize; 2]> },
    Map1d { family: String, #[serde(default)] params: Vec<f64> },
    CommutingCircle { a: u32, b: u32 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MetricSpec {
    Keyword(String),
    Flat(Vec<Entry>),
    Rows(Vec<Vec<Entry>>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Entry {
    Int(u64),
    Text(String),
}

impl Entry {
    fn to_ratio(&self) -> Result<Ratio<u64>> {
        match self {
            Entry::Int(v) => Ok(Ratio::from_integer(*v)),
            Entry::Text(s) => {
                let bad = || Error::spec("metric", format!("`{s}` is not a non-negative rational"));
                let (n, d) = match s.split_once('/') {
                    Some((n, d)) => (n.trim(), d.trim()),
                    None => (s.trim(), "1"),
                };
                let n: u64 = n.parse().map_err(|_| bad())?;
                let d: u64 = d.parse().map_err(|_| bad())?;
                if d == 0 {
                    return Err(bad());
                }
                Ok(Ratio::new(n, d))
            }
        }
    }

    fn from_ratio(r: &Ratio<u64>) -> Entry {
        if *r.denom() == 1 {
            Entry::Int(*r.numer())
        } else {
            Entry::Text(format!("{}/{}", r.numer(), r.denom()))
        }
    }
}

impl SystemSpec {
    pub fn parse(text: &str) -> Result<SystemSpec> {
        serde_json::from_str(text).map_err(|e| Error::spec("document", e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("spec serializes")
    }

    pub fn build(&self) -> Result<System> {
        match self {
            SystemSpec::Finite { n, metric, generators } => {
                let metric = match metric {
                    MetricSpec::Keyword(k) if k == "discrete" => FiniteMetric::Discrete,
                    MetricSpec::Keyword(k) => return Err(Error::spec("metric", format!("unknown metric `{k}`"))),
                    MetricSpec::Flat(v) => FiniteMetric::Matrix(v.iter().map(Entry::to_ratio).collect::<Result<_>>()?),
                    MetricSpec::Rows(rows) => {
                        if rows.iter().any(|r| r.len() != *n) {
                            return Err(Error::spec("metric", format!("every row must have {n} entries")));
                        }
                        FiniteMetric::Matrix(rows.iter().flatten().map(Entry::to_ratio).collect::<Result<_>>()?)
                    }
                };
                FiniteSemiflow::new(*n, metric, generators.clone())
                    .map(System::Finite)
                    .map_err(|e| Error::spec("generators", e.to_string()))
            }
            SystemSpec::Sft { vertices, edges } => {
                SftSystem::new(*vertices, edges.iter().map(|e| (e[0], e[1])))
                    .map(System::Sft)
                    .map_err(|e| Error::spec("edges", e.to_string()))
            }
            SystemSpec::Map1d { family, params } => {
                let want = |k: usize| {
                    if params.len() == k {
                        Ok(())
                    } else {
                        Err(Error::spec("params", format!("`{family}` takes {k} parameter(s), got {}", params.len())))
                    }
                };
                let fam = match family.as_str() {
                    "doubling" => want(0).map(|_| MapFamily::Doubling)?,
                    "tent" => want(1).map(|_| MapFamily::Tent { slope: params[0] })?,
                    "logistic" => want(1).map(|_| MapFamily::Logistic { r: params[0] })?,
                    "rotation" => want(1).map(|_| MapFamily::Rotation { alpha: params[0] })?,
                    other => return Err(Error::spec("family", format!("unknown family `{other}`"))),
                };
                NumericCascade::new(fam).map(System::Numeric).map_err(|e| Error::spec("params", e.to_string()))
            }
            SystemSpec::CommutingCircle { a, b } => NumericCascade::commuting_mult(*a, *b)
                .map(System::Numeric)
                .map_err(|e| Error::spec("a", e.to_string())),
        }
    }

    pub fn from_system(system: &System) -> SystemSpec {
        match system {
            System::Finite(s) => SystemSpec::Finite {
                n: s.len(),
                metric: match s.metric() {
                    FiniteMetric::Discrete => MetricSpec::Keyword("discrete".into()),
                    FiniteMetric::Matrix(m) => MetricSpec::Flat(m.iter().map(Entry::from_ratio).collect()),
                },
                generators: s.generators().to_vec(),
            },
            System::Sft(s) => SystemSpec::Sft {
                vertices: s.alphabet_size(),
                edges: s.edges().iter().map(|&(a, b)| [a, b]).collect(),
            },
            System::Numeric(s) => match s.family() {
                MapFamily::Doubling => SystemSpec::Map1d { family: "doubling".into(), params: vec![] },
                MapFamily::Tent { slope } => SystemSpec::Map1d { family: "tent".into(), params: vec![slope] },
                MapFamily::Logistic { r } => SystemSpec::Map1d { family: "logistic".into(), params: vec![r] },
                MapFamily::Rotation { alpha } => SystemSpec::Map1d { family: "rotation".into(), params: vec![alpha] },
                MapFamily::CommutingMult { a, b } => SystemSpec::CommutingCircle { a, b },
            },
        }
    }
}

/// Parses and validates a spec document in one step.
pub fn load_system(text: &str) -> Result<System> {
    SystemSpec::parse(text)?.build()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_every_kind() {
        let f = load_system(r#"{"kind":"finite","n":3,"metric":"discrete","generators":[[1,2,0]]}"#).unwrap();
        assert_eq!(f.rank(), 1);
        let s = load_system(r#"{"kind":"sft","vertices":2,"edges":[[0,0],[0,1],[1,0],[1,1]]}"#).unwrap();
        assert_eq!(s.kind(), "sft");
        let m = load_system(r#"{"kind":"map1d","family":"logistic","params":[4.0]}"#).unwrap();
        assert_eq!(m.kind(), "map1d");
        let c = load_system(r#"{"kind":"commuting_circle","a":2,"b":3}"#).unwrap();
        assert_eq!(c.rank(), 2);
    }

    #[test]
    fn rational_metrics_flat_and_rows() {
        let flat = r#"{"kind":"finite","n":2,"metric":[0,"1/2","1/2",0],"generators":[[1,0]]}"#;
        let rows = r#"{"kind":"finite","n":2,"metric":[[0,"1/2"],["1/2",0]],"generators":[[1,0]]}"#;
        assert_eq!(load_system(flat).unwrap(), load_system(rows).unwrap());
        let sys = load_system(flat).unwrap();
        let back = SystemSpec::from_system(&sys);
        assert_eq!(back.build().unwrap(), sys);
    }

    #[test]
    fn diagnostics_name_the_field() {
        let missing = SystemSpec::parse(r#"{"n":3}"#).unwrap_err().to_string();
        assert!(missing.contains("kind"), "{missing}");
        let bad = load_system(r#"{"kind":"map1d","family":"tent","params":[]}"#).unwrap_err();
        assert!(matches!(bad, Error::Spec { ref field, .. } if field == "params"));
        let empty = load_system(r#"{"kind":"sft","vertices":2,"edges":[[0,1]]}"#).unwrap_err();
        assert!(matches!(empty, Error::Spec { ref field, .. } if field == "edges"));
        let noncommuting = r#"{"kind":"finite","n":3,"metric":"discrete","generators":[[1,0,2],[0,2,1]]}"#;
        assert!(load_system(noncommuting).is_err());
    }
}
