//! JSON form of certificates. Polynomials are stored in canonical text form:
//! `{"type": "cond1"|"s"|"t", "edge"?: .., "coeffs": {id: poly}, "B"?: poly, "C"?: poly}`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use symanzik::conditions::{Certificate, Cond1Certificate, SCertificate, TCertificate};
use symanzik::poly::{PolyError, Polynomial};
use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CertificateKind {
    Cond1,
    S,
    T,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CertificateDocument {
    #[serde(rename = "type")]
    pub kind: CertificateKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub edge: Option<String>,
    pub coeffs: BTreeMap<String, String>,
    #[serde(rename = "B", default, skip_serializing_if = "Option::is_none")]
    pub b: Option<String>,
    #[serde(rename = "C", default, skip_serializing_if = "Option::is_none")]
    pub c: Option<String>,
}

#[derive(Debug, Error)]
pub enum CertificateError {
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("coefficient `{slot}`: {source}")]
    Polynomial { slot: String, source: PolyError },
    #[error("missing field `{0}`")]
    Missing(&'static str),
}

fn render(map: &BTreeMap<String, Polynomial>) -> BTreeMap<String, String> {
    map.iter().map(|(k, v)| (k.clone(), v.to_string())).collect()
}

fn parse_poly(slot: &str, text: &str) -> Result<Polynomial, CertificateError> {
    text.parse().map_err(|source| CertificateError::Polynomial { slot: slot.to_string(), source })
}

impl CertificateDocument {
    pub fn from_certificate(cert: &Certificate) -> CertificateDocument {
        match cert {
            Certificate::Cond1(c) => CertificateDocument {
                kind: CertificateKind::Cond1,
                edge: Some(c.edge.clone()),
                coeffs: render(&c.coeffs),
                b: None,
                c: None,
            },
            Certificate::S(c) => CertificateDocument {
                kind: CertificateKind::S,
                edge: Some(c.edge.clone()),
                coeffs: render(&c.a),
                b: Some(c.b.to_string()),
                c: Some(c.c.to_string()),
            },
            Certificate::T(c) => CertificateDocument {
                kind: CertificateKind::T,
                edge: None,
                coeffs: render(&c.a),
                b: None,
                c: Some(c.c.to_string()),
            },
        }
    }

    pub fn certificate(&self) -> Result<Certificate, CertificateError> {
        let coeffs = self
            .coeffs
            .iter()
            .map(|(k, v)| Ok((k.clone(), parse_poly(k, v)?)))
            .collect::<Result<BTreeMap<_, _>, CertificateError>>()?;
        let edge = || self.edge.clone().ok_or(CertificateError::Missing("edge"));
        let c = || parse_poly("C", self.c.as_deref().ok_or(CertificateError::Missing("C"))?);
        Ok(match self.kind {
            CertificateKind::Cond1 => Certificate::Cond1(Cond1Certificate { edge: edge()?, coeffs }),
            CertificateKind::S => Certificate::S(SCertificate {
                edge: edge()?,
                a: coeffs,
                b: parse_poly("B", self.b.as_deref().unwrap_or("0"))?,
                c: c()?,
            }),
            CertificateKind::T => Certificate::T(TCertificate { a: coeffs, c: c()? }),
        })
    }

    pub fn parse(text: &str) -> Result<CertificateDocument, CertificateError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("documents always serialize")
    }
}
