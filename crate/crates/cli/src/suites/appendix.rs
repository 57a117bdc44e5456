use std::f64::consts::{FRAC_PI_4, FRAC_PI_6};

use fockflux::ensemble::ClassicalState;
use fockflux::reification::{alpha_grid, flow_coeffs, m_escape_norm, rho_z, rho_z_trace, POLE_MARGIN};
use fockflux::{Error, Result};
use rayon::prelude::*;

use super::SuiteContext;
use crate::random;
use crate::report::{Check, Report, Table};

pub fn divergence(ctx: &SuiteContext) -> Result<Report> {
    let mut rep = Report::new("reification-divergence");
    let (c, d) = flow_coeffs(FRAC_PI_6)?;
    rep.checks.push(Check::at_most("|c(pi/6) - 4|", "reification-flow-coefficients", (c - 4.0).abs(), 1e-12));
    rep.checks.push(Check::at_most(
        "|d(pi/6) + 4 sqrt 3|",
        "reification-flow-coefficients",
        (d + 4.0 * 3f64.sqrt()).abs(),
        1e-12,
    ));
    rep.checks.push(Check::flag(
        "pole reported at pi/4",
        "reification-flow-coefficients",
        matches!(flow_coeffs(FRAC_PI_4), Err(Error::Pole { .. })),
    ));

    let top = ctx.cutoff_or(64);
    let grid = alpha_grid(20, POLE_MARGIN);
    let threshold = 1e6;
    // z = i: phi = 0, pi = sqrt 2.
    let main = ClassicalState::single(0.0, 2f64.sqrt());
    let runs: Vec<(&str, ClassicalState, usize)> = vec![
        ("z=i", main.clone(), top / 2),
        ("z=i", main, top),
        ("z=1/sqrt2", ClassicalState::single(1.0, 0.0), top / 2),
        ("z=1/sqrt2", ClassicalState::single(1.0, 0.0), top),
    ];
    let traces = runs
        .par_iter()
        .map(|(_, s, d)| rho_z_trace(s, &grid, *d, threshold))
        .collect::<Result<Vec<_>>>()?;
    let mut t = Table::new(&["state", "alpha", "norm", "cutoff", "residual_A7", "residual_A8", "c", "d"]);
    for ((label, _, _), tr) in runs.iter().zip(&traces) {
        for k in 0..tr.alphas.len() {
            t.push(vec![
                (*label).into(),
                tr.alphas[k].into(),
                tr.norms[k].into(),
                tr.cutoff.into(),
                tr.residual_a7[k].into(),
                tr.residual_a8[k].into(),
                tr.c[k].into(),
                tr.d[k].into(),
            ]);
        }
    }
    let (low, high) = (&traces[0], &traces[1]);
    rep.checks.push(Check::flag("norm monotone on the grid", "reification-divergence", high.is_monotone()));
    rep.checks.push(
        Check::at_least(
            "norm at pi/4 - 1e-3",
            "reification-divergence",
            *high.norms.last().unwrap(),
            threshold,
        )
        .with_detail(format!(
            "cutoff {top}; threshold first crossed at alpha = {:?}",
            high.threshold_alpha
        )),
    );
    rep.checks.push(
        Check::at_least(
            "growth steepens with cutoff",
            "reification-divergence",
            high.norms.last().unwrap() / low.norms.last().unwrap(),
            1.0,
        )
        .with_detail(format!("cutoff {} vs {top}", top / 2)),
    );
    rep.tables.push(("reification_trace".into(), t));
    Ok(rep)
}

pub fn two_mode_escape(ctx: &SuiteContext) -> Result<Report> {
    let (d1, d2) = (16, 32);
    let mut states = vec![ClassicalState::single(0.5, 0.3), ClassicalState::single(0.0, 0.0)];
    states.extend((0..6u64).map(|i| random::state(&mut random::stream(ctx.seed, i), 1, 0.7)));
    let rows: Vec<(f64, f64, f64, f64)> = states
        .par_iter()
        .map(|s| -> Result<_> {
            let m1 = m_escape_norm(s, FRAC_PI_4, d1)?;
            let m2 = m_escape_norm(s, FRAC_PI_4, d2)?;
            let alpha = FRAC_PI_4 - 1e-3;
            let s1 = rho_z(s, alpha, d1)?.operator_norm();
            let s2 = rho_z(s, alpha, d2)?.operator_norm();
            Ok((m1, m2, s1, s2))
        })
        .collect::<Result<_>>()?;
    let mut t = Table::new(&["phi", "pi", "m_norm_16", "m_norm_32", "m_change", "s_norm_16", "s_norm_32", "s_ratio"]);
    let mut worst_m = 0.0f64;
    let mut worst_s = f64::INFINITY;
    for (s, (m1, m2, s1, s2)) in states.iter().zip(&rows) {
        let change = (m2 / m1 - 1.0).abs();
        worst_m = worst_m.max(change);
        worst_s = worst_s.min(s2 / s1);
        t.push(vec![
            s.phi[0].into(),
            s.pi[0].into(),
            (*m1).into(),
            (*m2).into(),
            change.into(),
            (*s1).into(),
            (*s2).into(),
            (s2 / s1).into(),
        ]);
    }
    let mut rep = Report::new("two-mode-escape");
    rep.checks.push(Check::at_most(
        "max relative change of |M(pi/4) w| under 16 -> 32",
        "two-mode-reification",
        worst_m,
        0.1,
    ));
    rep.checks.push(Check::at_least(
        "min growth of the single-mode norm under 16 -> 32",
        "two-mode-reification",
        worst_s,
        2.0,
    ));
    rep.tables.push(("two_mode_escape".into(), t));
    Ok(rep)
}
