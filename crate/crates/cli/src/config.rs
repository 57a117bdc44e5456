//! Experiment configuration: one JSON document per run.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Experiment {
    Verify,
    Discrepancy,
    Evolve,
    Reify,
    Project,
    Iee,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::Verify => "verify",
            Experiment::Discrepancy => "discrepancy",
            Experiment::Evolve => "evolve",
            Experiment::Reify => "reify",
            Experiment::Project => "project",
            Experiment::Iee => "iee",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GeneratorKind {
    Liouville,
    Master,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateSpec {
    pub phi: Vec<f64>,
    pub pi: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "lowercase")]
pub enum EnsembleSpec {
    /// `points` equally weighted states on a circle of radius `radius` in
    /// the `(φ, π)` plane.
    Circle { points: usize, radius: f64 },
    Members(Vec<MemberSpec>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MemberSpec {
    pub phi: Vec<f64>,
    pub pi: Vec<f64>,
    pub w: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sweep {
    pub parameter: String,
    pub values: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub suite: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hamiltonian: Option<String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub bindings: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub observables: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub state: Option<StateSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ensemble: Option<EnsembleSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cutoff: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generator: Option<GeneratorKind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<Sweep>,
    /// Expression in the bindings giving the expected discrepancy.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub order_cap: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha_points: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pole_margin: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cutoffs: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threshold: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub deltas: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
}

const OSCILLATOR: &str = "0.5*pi1^2 + 0.5*m*phi1^2";

fn single(phi: f64, pi: f64) -> Option<StateSpec> {
    Some(StateSpec {
        phi: vec![phi],
        pi: vec![pi],
    })
}

impl ExperimentConfig {
    fn empty(experiment: Experiment) -> Self {
        ExperimentConfig {
            experiment,
            suite: None,
            hamiltonian: None,
            bindings: BTreeMap::new(),
            observables: Vec::new(),
            state: None,
            ensemble: None,
            cutoff: None,
            dt: None,
            t: None,
            generator: None,
            sweep: None,
            reference: None,
            tolerance: None,
            order_cap: None,
            alpha_points: None,
            pole_margin: None,
            cutoffs: None,
            threshold: None,
            eps: None,
            deltas: None,
            seed: None,
            output: None,
        }
    }

    /// The configuration used when no `--config` is given.
    pub fn defaults(experiment: Experiment) -> Self {
        let mut c = Self::empty(experiment);
        let m1: BTreeMap<String, f64> = [("m".to_string(), 1.0)].into_iter().collect();
        match experiment {
            Experiment::Verify => {
                c.seed = Some(0);
            }
            Experiment::Discrepancy => {
                c.hamiltonian = Some(OSCILLATOR.into());
                c.bindings = m1;
                c.observables = vec!["phi1*pi1".into()];
                c.state = single(1.0, 0.0);
                c.sweep = Some(Sweep {
                    parameter: "m".into(),
                    values: vec![0.5, 1.0, 2.0],
                });
                c.reference = Some("-(m - 1)/2".into());
                c.cutoff = Some(32);
                c.tolerance = Some(1e-8);
                c.order_cap = Some(3);
            }
            Experiment::Evolve => {
                c.hamiltonian = Some(OSCILLATOR.into());
                c.bindings = m1;
                c.observables = vec!["phi1".into(), "pi1".into()];
                c.state = single(1.0, 0.0);
                c.generator = Some(GeneratorKind::Master);
                c.cutoff = Some(24);
                c.t = Some(1.0);
                c.dt = Some(0.01);
                c.tolerance = Some(1e-8);
            }
            Experiment::Reify => {
                c.state = single(0.0, std::f64::consts::SQRT_2);
                c.alpha_points = Some(20);
                c.pole_margin = Some(1e-3);
                c.cutoffs = Some(vec![32, 64]);
                c.threshold = Some(1e6);
                c.eps = Some(vec![0.3, 0.1, 0.03, 0.01, 0.003, 0.001]);
            }
            Experiment::Project => {
                c.hamiltonian = Some("0.5*phi1^2 + 0.5*pi1^2".into());
                c.state = single(1.0, 0.0);
                c.cutoff = Some(32);
                c.deltas = Some(vec![50.0, 100.0, 200.0]);
            }
            Experiment::Iee => {
                c.hamiltonian = Some(OSCILLATOR.into());
                c.bindings = m1;
                c.observables = vec!["phi1*pi1".into(), "phi1^2 - pi1^2".into()];
                c.ensemble = Some(EnsembleSpec::Circle {
                    points: 64,
                    radius: 1.0,
                });
                c.cutoff = Some(32);
                c.tolerance = Some(1e-7);
            }
        }
        c
    }

    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    /// Canonical serialization, hashed into the manifest.
    pub fn canonical_json(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |field: &str, why: &str| Err(CliError::Config(format!("{field}: {why}")));
        let positive = |field: &str, v: Option<f64>| -> Result<(), CliError> {
            match v {
                Some(x) if !(x > 0.0 && x.is_finite()) => bad(field, "must be positive and finite"),
                _ => Ok(()),
            }
        };
        positive("dt", self.dt)?;
        positive("t", self.t)?;
        positive("tolerance", self.tolerance)?;
        positive("pole_margin", self.pole_margin)?;
        positive("threshold", self.threshold)?;
        if matches!(self.cutoff, Some(0)) {
            return bad("cutoff", "must be positive");
        }
        if let Some(cs) = &self.cutoffs {
            if cs.is_empty() || cs.iter().any(|&c| c < 4) {
                return bad("cutoffs", "must be a nonempty list of values >= 4");
            }
        }
        for (field, list) in [("deltas", &self.deltas), ("eps", &self.eps)] {
            if let Some(v) = list {
                if v.is_empty() || v.iter().any(|x| !(*x > 0.0 && x.is_finite())) {
                    return bad(field, "must be a nonempty list of positive values");
                }
            }
        }
        if matches!(self.alpha_points, Some(n) if n < 2) {
            return bad("alpha_points", "must be at least 2");
        }
        if let Some(s) = &self.state {
            if s.phi.len() != s.pi.len() || s.phi.is_empty() {
                return bad("state", "phi and pi must be nonempty and of equal length");
            }
        }
        if let Some(sw) = &self.sweep {
            if sw.values.is_empty() {
                return bad("sweep.values", "must be nonempty");
            }
        }
        let needs = |field: &str, present: bool| -> Result<(), CliError> {
            if present {
                Ok(())
            } else {
                bad(field, &format!("required for {}", self.experiment.name()))
            }
        };
        match self.experiment {
            Experiment::Verify => needs("seed", self.seed.is_some()),
            Experiment::Discrepancy | Experiment::Iee => {
                needs("hamiltonian", self.hamiltonian.is_some())?;
                needs("observables", !self.observables.is_empty())?;
                needs("cutoff", self.cutoff.is_some())?;
                if self.experiment == Experiment::Iee {
                    needs("ensemble", self.ensemble.is_some())
                } else {
                    needs("state", self.state.is_some() || self.ensemble.is_some())
                }
            }
            Experiment::Evolve => {
                needs("hamiltonian", self.hamiltonian.is_some())?;
                needs("state", self.state.is_some() || self.ensemble.is_some())?;
                needs("cutoff", self.cutoff.is_some())?;
                needs("t", self.t.is_some())?;
                needs("dt", self.dt.is_some())
            }
            Experiment::Reify => {
                needs("state", self.state.is_some())?;
                needs("cutoffs", self.cutoffs.is_some())?;
                needs("alpha_points", self.alpha_points.is_some())
            }
            Experiment::Project => {
                needs("hamiltonian", self.hamiltonian.is_some())?;
                needs("state", self.state.is_some() || self.ensemble.is_some())?;
                needs("cutoff", self.cutoff.is_some())?;
                needs("deltas", self.deltas.is_some())
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate_and_round_trip() {
        for e in [
            Experiment::Verify,
            Experiment::Discrepancy,
            Experiment::Evolve,
            Experiment::Reify,
            Experiment::Project,
            Experiment::Iee,
        ] {
            let c = ExperimentConfig::defaults(e);
            c.validate().unwrap();
            assert_eq!(ExperimentConfig::from_json(&c.canonical_json()).unwrap(), c);
        }
    }

    #[test]
    fn field_named_in_errors() {
        let e = ExperimentConfig::from_json(r#"{"experiment":"evolve","bogus":1}"#).unwrap_err();
        assert!(e.to_string().contains("bogus"));
        let mut c = ExperimentConfig::defaults(Experiment::Evolve);
        c.dt = Some(-1.0);
        assert!(c.validate().unwrap_err().to_string().contains("dt"));
        let mut c = ExperimentConfig::defaults(Experiment::Iee);
        c.observables.clear();
        assert!(c.validate().unwrap_err().to_string().contains("observables"));
        let mut c = ExperimentConfig::defaults(Experiment::Verify);
        c.seed = None;
        assert!(c.validate().unwrap_err().to_string().contains("seed"));
    }
}
