use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{Chart, MultiIndex, PolyExpr};
use crate::error::{Error, Result};
use crate::Poly;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TermJson {
    pub exps: Vec<u32>,
    pub re: f64,
    pub im: f64,
}

/// Wire form `{chart, modes, terms: [{exps, re, im}]}`. `modes` may be
/// omitted on input and is then inferred from the exponent length.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolyJson {
    pub chart: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modes: Option<usize>,
    pub terms: Vec<TermJson>,
}

impl From<&Poly> for PolyJson {
    fn from(p: &Poly) -> Self {
        PolyJson {
            chart: p.chart.name().to_string(),
            modes: Some(p.modes),
            terms: p
                .terms()
                .map(|(k, c)| TermJson {
                    exps: k.as_slice().to_vec(),
                    re: c.re,
                    im: c.im,
                })
                .collect(),
        }
    }
}

impl TryFrom<PolyJson> for Poly {
    type Error = Error;

    fn try_from(j: PolyJson) -> Result<Poly> {
        let chart = match j.chart.as_str() {
            "phi_pi" => Chart::PhiPi,
            "zy" => Chart::Zy,
            other => {
                return Err(Error::Serialization(format!("unknown chart `{other}`")));
            }
        };
        let width = j.terms.first().map(|t| t.exps.len());
        let modes = match (j.modes, width) {
            (Some(m), _) => m,
            (None, Some(w)) => w / 2,
            (None, None) => 1,
        };
        if modes == 0 {
            return Err(Error::Serialization("mode count must be positive".into()));
        }
        let mut terms = Vec::with_capacity(j.terms.len());
        for t in j.terms {
            if t.exps.len() != 2 * modes {
                return Err(Error::Serialization(format!(
                    "term exponent length {} does not match 2 * {modes}",
                    t.exps.len()
                )));
            }
            terms.push((MultiIndex::from(t.exps), Complex64::new(t.re, t.im)));
        }
        Ok(PolyExpr::from_terms(chart, modes, terms))
    }
}

impl Poly {
    pub fn to_json(&self) -> String {
        serde_json::to_string(&PolyJson::from(self)).expect("polynomial JSON is always encodable")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let j: PolyJson = serde_json::from_str(text)?;
        Poly::try_from(j)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{parse_poly, Bindings};

    #[test]
    fn json_round_trip() {
        let p = parse_poly("0.5*pi1^2 - 3*phi1*phi2", &Bindings::new()).unwrap();
        let text = p.to_json();
        assert!(text.starts_with("{\"chart\":\"phi_pi\""));
        assert_eq!(Poly::from_json(&text).unwrap(), p);
    }

    #[test]
    fn rejects_ragged_terms() {
        let text = r#"{"chart":"phi_pi","terms":[{"exps":[1,0],"re":1,"im":0},{"exps":[1],"re":1,"im":0}]}"#;
        assert!(matches!(Poly::from_json(text), Err(Error::Serialization(_))));
    }
}
