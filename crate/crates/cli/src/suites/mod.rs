//! Named acceptance suites. Each runs its sub-checks in parallel and
//! assembles the report in a fixed order.

use std::time::{Duration, Instant};

use crate::report::Report;

mod appendix;
mod dynamics;
mod flux;
mod identities;

#[derive(Clone, Copy, Debug)]
pub struct SuiteContext {
    pub seed: u64,
    /// Overrides the suite's default cutoff where one applies.
    pub cutoff: Option<usize>,
}

impl SuiteContext {
    pub fn new(seed: u64) -> Self {
        SuiteContext { seed, cutoff: None }
    }

    pub(crate) fn cutoff_or(&self, default: usize) -> usize {
        self.cutoff.unwrap_or(default)
    }
}

type SuiteFn = fn(&SuiteContext) -> fockflux::Result<Report>;

pub struct Suite {
    pub name: &'static str,
    pub title: &'static str,
    pub budget: Duration,
    /// Part of the default `verify` run.
    pub identity: bool,
    run: SuiteFn,
}

impl Suite {
    pub fn run(&self, ctx: &SuiteContext) -> fockflux::Result<Report> {
        let start = Instant::now();
        let mut r = (self.run)(ctx)?;
        r.name = self.name.into();
        r.elapsed = start.elapsed();
        Ok(r)
    }
}

const fn secs(s: u64) -> Duration {
    Duration::from_secs(s)
}

pub static SUITES: &[Suite] = &[
    Suite {
        name: "coherent-eigen",
        title: "annihilators act diagonally on pseudo-wavefunctions",
        budget: secs(5),
        identity: true,
        run: identities::coherent_eigen,
    },
    Suite {
        name: "expectation-identity",
        title: "Tr(rho g_n) reproduces g at the classical point",
        budget: secs(30),
        identity: true,
        run: identities::expectation_identity,
    },
    Suite {
        name: "master-equation",
        title: "trajectory finite differences converge to the master generator",
        budget: secs(120),
        identity: false,
        run: dynamics::master_equation,
    },
    Suite {
        name: "trace-conservation",
        title: "master generator is traceless on Hermitian matrices",
        budget: secs(10),
        identity: true,
        run: identities::trace_conservation,
    },
    Suite {
        name: "commutator-lemmas",
        title: "ladder-power commutator expansions",
        budget: secs(60),
        identity: true,
        run: identities::commutator_lemmas,
    },
    Suite {
        name: "discrepancy-closed-form",
        title: "direct flux discrepancy matches the derivative series",
        budget: secs(180),
        identity: false,
        run: flux::closed_form,
    },
    Suite {
        name: "oscillator-discrepancy",
        title: "harmonic oscillator discrepancy -(m-1)/2",
        budget: secs(30),
        identity: false,
        run: flux::oscillator,
    },
    Suite {
        name: "field-scaling",
        title: "field rescaling removes the oscillator discrepancy",
        budget: secs(10),
        identity: false,
        run: flux::field_scaling,
    },
    Suite {
        name: "projection-decay",
        title: "time-average projection coherences decay like C/delta",
        budget: secs(60),
        identity: false,
        run: dynamics::projection_decay,
    },
    Suite {
        name: "reification-divergence",
        title: "S(alpha) recoding diverges toward pi/4",
        budget: secs(60),
        identity: false,
        run: appendix::divergence,
    },
    Suite {
        name: "two-mode-escape",
        title: "doubled-space M(pi/4) stays bounded under cutoff doubling",
        budget: secs(120),
        identity: false,
        run: appendix::two_mode_escape,
    },
    Suite {
        name: "iee-condition",
        title: "equilibrium flux condition on the phase circle",
        budget: secs(30),
        identity: false,
        run: flux::iee_condition,
    },
];

pub fn find(name: &str) -> Option<&'static Suite> {
    SUITES.iter().find(|s| s.name == name)
}

pub fn names() -> Vec<&'static str> {
    SUITES.iter().map(|s| s.name).collect()
}

/// Least-squares slope of `log y` against `log x`.
pub(crate) fn log_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let (lx, ly): (Vec<f64>, Vec<f64>) = points.iter().map(|(x, y)| (x.ln(), y.ln())).unzip();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_are_unique() {
        let mut n = names();
        n.sort();
        n.dedup();
        assert_eq!(n.len(), SUITES.len());
        assert!(find("iee-condition").is_some());
        assert!(find("nope").is_none());
    }

    #[test]
    fn slope_of_power_law() {
        let pts: Vec<(f64, f64)> = [1e-2, 1e-3, 1e-4].iter().map(|&x: &f64| (x, 3.0 * x * x)).collect();
        assert!((log_slope(&pts) - 2.0).abs() < 1e-12);
    }
}
