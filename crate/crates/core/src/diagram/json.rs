//! JSON interchange format for diagrams and diagram vectors.
//!
//! Components and colors are numbered from 1 in JSON and from 0 in memory.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::{Diagram, Leg, Skeleton};
use crate::error::{Error, Result};
use crate::vector::DiagramVector;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiagramJson {
    pub skeleton: SkeletonJson,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub colors: Option<usize>,
    pub trivalent: usize,
    pub legs: Vec<LegJson>,
    pub edges: Vec<[usize; 2]>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SkeletonJson {
    pub kind: SkeletonKind,
    pub count: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SkeletonKind {
    Empty,
    Circles,
    Intervals,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LegJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub component: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub position: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub color: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermJson {
    pub diagram: DiagramJson,
    pub num: String,
    pub den: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VectorJson {
    pub terms: Vec<TermJson>,
}

fn schema(path: impl Into<String>, message: impl Into<String>) -> Error {
    Error::Schema { path: path.into(), message: message.into() }
}

impl DiagramJson {
    pub fn from_diagram(d: &Diagram) -> DiagramJson {
        let (kind, count, colors) = match d.skeleton() {
            Skeleton::Empty => (SkeletonKind::Empty, 0, None),
            Skeleton::Circles(m) => (SkeletonKind::Circles, m, None),
            Skeleton::Intervals(m) => (SkeletonKind::Intervals, m, None),
            Skeleton::Colors(m) => (SkeletonKind::Empty, 0, Some(m)),
        };
        let legs = d
            .legs()
            .iter()
            .map(|l| {
                if colors.is_some() {
                    LegJson { component: None, position: None, color: Some(l.component + 1) }
                } else {
                    LegJson { component: Some(l.component + 1), position: Some(l.position), color: None }
                }
            })
            .collect();
        DiagramJson {
            skeleton: SkeletonJson { kind, count },
            colors,
            trivalent: d.trivalent(),
            legs,
            edges: d.edges().into_iter().map(|(a, b)| [a, b]).collect(),
        }
    }

    /// Semantic validation; `at` is the JSON path of this object.
    pub fn to_diagram(&self, at: &str) -> Result<Diagram> {
        let skeleton = match (self.skeleton.kind, self.colors) {
            (SkeletonKind::Empty, None) => {
                if self.skeleton.count != 0 {
                    return Err(schema(format!("{at}.skeleton.count"), "must be 0 for the empty skeleton"));
                }
                Skeleton::Empty
            }
            (SkeletonKind::Empty, Some(m)) => {
                if self.skeleton.count != 0 {
                    return Err(schema(format!("{at}.skeleton.count"), "must be 0 for the empty skeleton"));
                }
                if m == 0 {
                    return Err(schema(format!("{at}.colors"), "must be at least 1"));
                }
                Skeleton::Colors(m)
            }
            (kind, Some(_)) => {
                return Err(schema(
                    format!("{at}.colors"),
                    format!("only allowed with the empty skeleton, found kind {kind:?}"),
                ))
            }
            (kind, None) => {
                let m = self.skeleton.count;
                if m == 0 {
                    return Err(schema(format!("{at}.skeleton.count"), "must be at least 1"));
                }
                if kind == SkeletonKind::Circles {
                    Skeleton::Circles(m)
                } else {
                    Skeleton::Intervals(m)
                }
            }
        };
        let m = skeleton.components();
        let mut legs = Vec::with_capacity(self.legs.len());
        for (j, l) in self.legs.iter().enumerate() {
            let path = format!("{at}.legs[{j}]");
            let leg = match (skeleton, l.component, l.position, l.color) {
                (Skeleton::Colors(_), None, None, Some(c)) => {
                    if c == 0 || c > m {
                        return Err(schema(format!("{path}.color"), format!("must be in 1..={m}")));
                    }
                    Leg::color(c - 1)
                }
                (Skeleton::Circles(_) | Skeleton::Intervals(_), Some(c), Some(p), None) => {
                    if c == 0 || c > m {
                        return Err(schema(format!("{path}.component"), format!("must be in 1..={m}")));
                    }
                    Leg::on(c - 1, p)
                }
                (Skeleton::Empty, ..) => return Err(schema(path, "legs are not allowed on the empty skeleton")),
                (Skeleton::Colors(_), ..) => return Err(schema(path, "open diagram legs need exactly {\"color\"}")),
                _ => return Err(schema(path, "legs need exactly {\"component\", \"position\"}")),
            };
            legs.push(leg);
        }
        let edges: Vec<(usize, usize)> = self.edges.iter().map(|e| (e[0], e[1])).collect();
        Diagram::new(skeleton, self.trivalent, legs, &edges).map_err(|e| match e {
            Error::InvalidDiagram(msg) => schema(at.to_string(), msg),
            other => other,
        })
    }
}

impl VectorJson {
    pub fn from_vector(v: &DiagramVector) -> VectorJson {
        VectorJson {
            terms: v
                .iter()
                .map(|(c, x)| TermJson {
                    diagram: DiagramJson::from_diagram(c.diagram()),
                    num: x.numer().to_string(),
                    den: x.denom().to_string(),
                })
                .collect(),
        }
    }

    pub fn to_vector(&self, at: &str) -> Result<DiagramVector> {
        let mut v = DiagramVector::zero();
        for (i, t) in self.terms.iter().enumerate() {
            let path = format!("{at}.terms[{i}]");
            let d = t.diagram.to_diagram(&format!("{path}.diagram"))?;
            let x = parse_fraction(&t.num, &t.den, &path)?;
            v.add_diagram(&d, &x);
        }
        Ok(v)
    }
}

pub(crate) fn parse_fraction(num: &str, den: &str, at: &str) -> Result<BigRational> {
    let n: BigInt = num.parse().map_err(|_| schema(format!("{at}.num"), format!("not an integer: {num:?}")))?;
    let d: BigInt = den.parse().map_err(|_| schema(format!("{at}.den"), format!("not an integer: {den:?}")))?;
    if d.is_zero() {
        return Err(schema(format!("{at}.den"), "zero denominator"));
    }
    Ok(BigRational::new(n, d))
}

/// Deserializes with the JSON path of the first structural error.
pub fn from_json_str<T: serde::de::DeserializeOwned>(s: &str) -> Result<T> {
    let de = &mut serde_json::Deserializer::from_str(s);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        schema(if path == "." { "$".to_string() } else { format!("$.{path}") }, e.into_inner().to_string())
    })
}

pub fn parse_diagram(s: &str) -> Result<Diagram> {
    from_json_str::<DiagramJson>(s)?.to_diagram("$")
}

pub fn parse_vector(s: &str) -> Result<DiagramVector> {
    from_json_str::<VectorJson>(s)?.to_vector("$")
}

pub fn diagram_to_string(d: &Diagram) -> String {
    serde_json::to_string(&DiagramJson::from_diagram(d)).expect("serializable")
}

pub fn vector_to_string(v: &DiagramVector) -> String {
    serde_json::to_string(&VectorJson::from_vector(v)).expect("serializable")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn theta_round_trips() {
        let s = r#"{"skeleton":{"kind":"empty","count":0},"trivalent":2,"legs":[],"edges":[[0,3],[1,5],[2,4]]}"#;
        let d = parse_diagram(s).unwrap();
        assert_eq!(diagram_to_string(&d), s);
    }

    #[test]
    fn open_diagram_uses_colors() {
        let s = r#"{"skeleton":{"kind":"empty","count":0},"colors":3,"trivalent":1,"legs":[{"color":1},{"color":2},{"color":3}],"edges":[[0,3],[1,4],[2,5]]}"#;
        let d = parse_diagram(s).unwrap();
        assert_eq!(d.skeleton(), Skeleton::Colors(3));
        assert_eq!(diagram_to_string(&d), s);
    }

    #[test]
    fn structural_errors_carry_a_path() {
        let s = r#"{"skeleton":{"kind":"circles","count":1},"trivalent":0,"legs":[{"component":1,"position":"x"}],"edges":[]}"#;
        let err = parse_diagram(s).unwrap_err().to_string();
        assert!(err.contains("legs[0].position"), "{err}");
    }

    #[test]
    fn semantic_errors_carry_a_path() {
        let s = r#"{"skeleton":{"kind":"circles","count":1},"trivalent":0,"legs":[{"component":1,"position":0},{"component":2,"position":0}],"edges":[[0,1]]}"#;
        let err = parse_diagram(s).unwrap_err().to_string();
        assert!(err.contains("$.legs[1].component"), "{err}");
        let s = r#"{"skeleton":{"kind":"circles","count":1},"colors":2,"trivalent":0,"legs":[],"edges":[]}"#;
        let err = parse_diagram(s).unwrap_err().to_string();
        assert!(err.contains("$.colors"), "{err}");
    }

    #[test]
    fn unknown_fields_are_rejected() {
        let s = r#"{"skeleton":{"kind":"empty","count":0},"trivalent":0,"legs":[],"edges":[],"extra":1}"#;
        assert!(parse_diagram(s).is_err());
    }

    #[test]
    fn vector_terms_combine() {
        let d = r#"{"skeleton":{"kind":"circles","count":2},"trivalent":0,"legs":[{"component":1,"position":0},{"component":2,"position":0}],"edges":[[0,1]]}"#;
        let s = format!(r#"{{"terms":[{{"diagram":{d},"num":"1","den":"2"}},{{"diagram":{d},"num":"1","den":"2"}}]}}"#);
        let v = parse_vector(&s).unwrap();
        assert_eq!(v.len(), 1);
        assert_eq!(v.iter().next().unwrap().1, &crate::vector::q(1));
        assert_eq!(parse_vector(&vector_to_string(&v)).unwrap(), v);
    }
}
