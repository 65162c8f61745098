//! File formats: graphs, certificates, witnesses and pipeline outcomes.
//!
//! Output is canonical: object keys sorted, vertex lists ascending and the
//! edge list in lexicographic order, so identical inputs give identical
//! bytes.

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::decomp::QuasiBoundCertificate;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::pipeline::{AuditEntry, Outcome};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphDoc {
    pub n: usize,
    pub edges: Vec<[usize; 2]>,
}

impl From<&Graph> for GraphDoc {
    fn from(g: &Graph) -> Self {
        GraphDoc {
            n: g.n(),
            edges: g.edges().iter().map(|&(u, v)| [u, v]).collect(),
        }
    }
}

impl TryFrom<GraphDoc> for Graph {
    type Error = Error;

    fn try_from(doc: GraphDoc) -> Result<Graph> {
        let pairs: Vec<(usize, usize)> = doc.edges.iter().map(|e| (e[0], e[1])).collect();
        Graph::from_edge_list(doc.n, &pairs)
    }
}

fn format_err(e: serde_json::Error) -> Error {
    Error::Format(e.to_string())
}

/// Serializes through `Value`, whose maps keep keys sorted.
pub fn to_canonical<T: Serialize>(value: &T) -> Result<String> {
    let v = serde_json::to_value(value).map_err(format_err)?;
    let mut s = serde_json::to_string(&v).map_err(format_err)?;
    s.push('\n');
    Ok(s)
}

pub fn from_json<T: DeserializeOwned>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(format_err)
}

pub fn graph_to_json(g: &Graph) -> Result<String> {
    to_canonical(&GraphDoc::from(g))
}

/// Parses a graph; edges may come in any order or orientation and
/// duplicates collapse.
pub fn graph_from_json(text: &str) -> Result<Graph> {
    from_json::<GraphDoc>(text)?.try_into()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutcomeDoc {
    pub outcome: String,
    pub payload: Value,
    #[serde(default)]
    pub audit: Vec<AuditEntry>,
}

pub fn outcome_to_json(outcome: &Outcome, audit: &[AuditEntry]) -> Result<String> {
    let (kind, payload) = match outcome {
        Outcome::Certificate(c) => ("certificate", serde_json::to_value(c)),
        Outcome::Witness(m) => ("witness", serde_json::to_value(m)),
    };
    to_canonical(&OutcomeDoc {
        outcome: kind.into(),
        payload: payload.map_err(format_err)?,
        audit: audit.to_vec(),
    })
}

pub fn outcome_from_json(text: &str) -> Result<(Outcome, Vec<AuditEntry>)> {
    let doc: OutcomeDoc = from_json(text)?;
    let outcome = match doc.outcome.as_str() {
        "certificate" => Outcome::Certificate(serde_json::from_value(doc.payload).map_err(format_err)?),
        "witness" => Outcome::Witness(serde_json::from_value(doc.payload).map_err(format_err)?),
        other => return Err(Error::Format(format!("unknown outcome {other:?}"))),
    };
    Ok((outcome, doc.audit))
}

/// Reads a certificate either bare or wrapped in an outcome document.
pub fn certificate_from_json(text: &str) -> Result<QuasiBoundCertificate> {
    let v: Value = from_json(text)?;
    let inner = match v.get("outcome") {
        Some(_) => v.get("payload").cloned().unwrap_or(Value::Null),
        None => v,
    };
    serde_json::from_value(inner).map_err(format_err)
}
