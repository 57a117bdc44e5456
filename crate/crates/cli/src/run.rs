//! Experiment execution for each subcommand.

use std::path::{Path, PathBuf};

use fockflux::discrepancy::{discrepancy_report, iee_check};
use fockflux::ensemble::{ensemble_density, pure_density, ClassicalState, DensityMatrix, Ensemble, HamiltonianFlow};
use fockflux::evolution::{evolve_observed, inverse_fit, master_spectrum, projection_decay, Generator};
use fockflux::operator::FockSpace;
use fockflux::poly::{parse_poly, Bindings};
use fockflux::reification::{alpha_grid, norm_flow_residual, paradox_demo, rho_z_trace};
use fockflux::{Complex64, NormalForm, Poly};
use log::info;
use rayon::prelude::*;

use crate::config::{EnsembleSpec, Experiment, ExperimentConfig, GeneratorKind};
use crate::error::{CliError, EXIT_CHECK_FAILED, EXIT_PASS};
use crate::report::{emit_report, Check, Report, Table};
use crate::suites::{self, SuiteContext};

pub struct Outcome {
    pub report: Report,
    pub files: Vec<PathBuf>,
    pub exit_code: i32,
}

fn core(field: &str) -> impl Fn(fockflux::Error) -> CliError + '_ {
    move |e| CliError::from_core(field, e)
}

fn parse(field: &str, text: &str, b: &Bindings) -> Result<Poly, CliError> {
    parse_poly(text, b).map_err(|e| CliError::Config(format!("{field}: {e}")))
}

fn state(cfg: &ExperimentConfig) -> Result<Option<ClassicalState>, CliError> {
    cfg.state
        .as_ref()
        .map(|s| ClassicalState::new(s.phi.clone(), s.pi.clone()).map_err(core("state")))
        .transpose()
}

fn ensemble(cfg: &ExperimentConfig) -> Result<Option<Ensemble>, CliError> {
    let Some(spec) = &cfg.ensemble else {
        return Ok(None);
    };
    let e = match spec {
        EnsembleSpec::Circle { points, radius } => Ensemble::uniform_circle(*points, *radius),
        EnsembleSpec::Members(ms) => ms
            .iter()
            .map(|m| Ok((ClassicalState::new(m.phi.clone(), m.pi.clone())?, m.w)))
            .collect::<fockflux::Result<Vec<_>>>()
            .and_then(Ensemble::new),
    };
    e.map(Some).map_err(core("ensemble"))
}

/// Member list: the ensemble if given, otherwise the single state.
fn members(cfg: &ExperimentConfig) -> Result<Vec<(ClassicalState, f64)>, CliError> {
    if let Some(e) = ensemble(cfg)? {
        return Ok(e.members().to_vec());
    }
    let s = state(cfg)?.ok_or_else(|| CliError::Config("state: missing".into()))?;
    Ok(vec![(s, 1.0)])
}

fn density(cfg: &ExperimentConfig, space: &FockSpace) -> Result<DensityMatrix, CliError> {
    match (ensemble(cfg)?, state(cfg)?) {
        (Some(e), _) => ensemble_density(&e, space).map_err(core("ensemble")),
        (None, Some(s)) => pure_density(&s, space).map_err(core("state")),
        (None, None) => Err(CliError::Config("state: missing".into())),
    }
}

fn modes_of(ms: &[(ClassicalState, f64)]) -> usize {
    ms.first().map_or(1, |(s, _)| s.modes())
}

fn space_for(cfg: &ExperimentConfig, modes: usize, polys: &[&Poly]) -> Result<FockSpace, CliError> {
    if let Some(p) = polys.iter().find(|p| p.modes() > modes) {
        return Err(CliError::Config(format!(
            "state: {} mode(s) given but the polynomials use {}",
            modes,
            p.modes()
        )));
    }
    let cutoff = cfg.cutoff.ok_or_else(|| CliError::Config("cutoff: missing".into()))?;
    FockSpace::new(modes, cutoff).map_err(core("cutoff"))
}

pub fn run(cfg: &ExperimentConfig, out: &Path) -> Result<Outcome, CliError> {
    cfg.validate()?;
    info!("running {} into {}", cfg.experiment.name(), out.display());
    let report = match cfg.experiment {
        Experiment::Verify => verify(cfg)?,
        Experiment::Discrepancy => discrepancy(cfg)?,
        Experiment::Evolve => evolve(cfg)?,
        Experiment::Reify => reify(cfg)?,
        Experiment::Project => project(cfg)?,
        Experiment::Iee => iee(cfg)?,
    };
    let files = emit_report(&report, out, cfg.experiment.name(), &cfg.canonical_json(), cfg.seed)?;
    let exit_code = if report.passed() { EXIT_PASS } else { EXIT_CHECK_FAILED };
    Ok(Outcome {
        report,
        files,
        exit_code,
    })
}

pub fn selected_suites(cfg: &ExperimentConfig) -> Result<Vec<&'static suites::Suite>, CliError> {
    match cfg.suite.as_deref() {
        None => Ok(suites::SUITES.iter().filter(|s| s.identity).collect()),
        Some("all") => Ok(suites::SUITES.iter().collect()),
        Some(name) => suites::find(name).map(|s| vec![s]).ok_or_else(|| {
            CliError::Config(format!(
                "suite: unknown suite `{name}`; expected one of all, {}",
                suites::names().join(", ")
            ))
        }),
    }
}

fn verify(cfg: &ExperimentConfig) -> Result<Report, CliError> {
    let seed = cfg.seed.ok_or_else(|| CliError::Config("seed: required".into()))?;
    let ctx = SuiteContext {
        seed,
        cutoff: cfg.cutoff,
    };
    let mut report = Report::new("verify");
    let mut summary = Table::new(&["suite", "check", "tag", "passed", "value", "bound", "seconds"]);
    for suite in selected_suites(cfg)? {
        let mut r = suite
            .run(&ctx)
            .map_err(|e| CliError::Numerical(format!("{}: {e}", suite.name)))?;
        for c in &mut r.checks {
            summary.push(vec![
                suite.name.into(),
                c.name.clone().into(),
                c.tag.clone().into(),
                c.passed.into(),
                c.value.into(),
                c.bound.into(),
                r.elapsed.as_secs_f64().into(),
            ]);
            c.name = format!("{}: {}", suite.name, c.name);
        }
        report.merge(r);
    }
    report.tables.insert(0, ("verify".into(), summary));
    Ok(report)
}

fn discrepancy(cfg: &ExperimentConfig) -> Result<Report, CliError> {
    let tol = cfg.tolerance.unwrap_or(1e-8);
    let cap = cfg.order_cap.unwrap_or(3);
    let ms = members(cfg)?;
    let values: Vec<(String, Option<f64>)> = match &cfg.sweep {
        Some(sw) => sw.values.iter().map(|v| (sw.parameter.clone(), Some(*v))).collect(),
        None => vec![(String::new(), None)],
    };
    let mut t = Table::new(&[
        "parameter",
        "value",
        "observable",
        "state",
        "g_hat_re",
        "g_hat_im",
        "g_dot_re",
        "g_dot_im",
        "direct_re",
        "direct_im",
        "closed_form_re",
        "closed_form_im",
        "residual",
        "applicable",
        "reference",
    ]);
    let mut worst_residual = 0.0f64;
    let mut worst_reference: Option<f64> = None;
    let mut inapplicable = 0usize;
    for (param, value) in &values {
        let mut b = cfg.bindings.clone();
        if let Some(v) = value {
            b.insert(param.clone(), *v);
        }
        let h = parse("hamiltonian", cfg.hamiltonian.as_deref().unwrap_or_default(), &b)?;
        let gs = cfg
            .observables
            .iter()
            .enumerate()
            .map(|(i, g)| parse(&format!("observables[{i}]"), g, &b))
            .collect::<Result<Vec<_>, _>>()?;
        let reference = match &cfg.reference {
            Some(r) => Some(
                parse("reference", r, &b)?
                    .as_constant()
                    .ok_or_else(|| CliError::Config("reference: must evaluate to a constant".into()))?,
            ),
            None => None,
        };
        let mut polys: Vec<&Poly> = gs.iter().collect();
        polys.push(&h);
        let space = space_for(cfg, modes_of(&ms), &polys)?;
        for (gi, g) in gs.iter().enumerate() {
            let reports = ms
                .par_iter()
                .map(|(s, _)| discrepancy_report(s, g, &h, &space, cap))
                .collect::<fockflux::Result<Vec<_>>>()
                .map_err(core("state"))?;
            for (si, r) in reports.into_iter().enumerate() {
                let cf = r.closed_form.unwrap_or(Complex64::new(f64::NAN, f64::NAN));
                worst_residual = worst_residual.max(r.residual.unwrap_or(f64::INFINITY));
                if !r.applicable {
                    inapplicable += 1;
                }
                if let Some(rf) = reference {
                    let d = (cf - rf).norm().max((r.direct - rf).norm());
                    worst_reference = Some(worst_reference.unwrap_or(0.0).max(d));
                }
                t.push(vec![
                    param.clone().into(),
                    value.unwrap_or(f64::NAN).into(),
                    cfg.observables[gi].clone().into(),
                    si.into(),
                    r.g_hat.re.into(),
                    r.g_hat.im.into(),
                    r.g_dot.re.into(),
                    r.g_dot.im.into(),
                    r.direct.re.into(),
                    r.direct.im.into(),
                    cf.re.into(),
                    cf.im.into(),
                    r.residual.unwrap_or(f64::NAN).into(),
                    r.applicable.into(),
                    reference.map_or(f64::NAN, |c| c.re).into(),
                ]);
            }
        }
    }
    let mut rep = Report::new("discrepancy");
    rep.checks.push(Check::at_most(
        "max |direct - closed form|",
        "discrepancy-closed-form",
        worst_residual,
        tol,
    ));
    rep.checks.push(
        Check::flag("closed form exact at order cap", "discrepancy-closed-form", inapplicable == 0)
            .with_detail(format!("{inapplicable} row(s) exceed order cap {cap}")),
    );
    if let Some(w) = worst_reference {
        rep.checks.push(Check::at_most("max |discrepancy - reference|", "discrepancy-reference", w, tol));
    }
    rep.tables.push(("discrepancy".into(), t));
    Ok(rep)
}

fn evolve(cfg: &ExperimentConfig) -> Result<Report, CliError> {
    let tol = cfg.tolerance.unwrap_or(1e-8);
    let b = cfg.bindings.clone();
    let h = parse("hamiltonian", cfg.hamiltonian.as_deref().unwrap_or_default(), &b)?;
    let gs = cfg
        .observables
        .iter()
        .enumerate()
        .map(|(i, g)| parse(&format!("observables[{i}]"), g, &b))
        .collect::<Result<Vec<_>, _>>()?;
    let ms = members(cfg)?;
    let mut polys: Vec<&Poly> = gs.iter().collect();
    polys.push(&h);
    let space = space_for(cfg, modes_of(&ms), &polys)?;
    let gs: Vec<Poly> = gs.iter().map(|g| g.embed(space.modes())).collect();
    let rho0 = density(cfg, &space)?;
    let hn = NormalForm::from_poly(&h).map_err(core("hamiltonian"))?;
    let gen = match cfg.generator.unwrap_or(GeneratorKind::Master) {
        GeneratorKind::Liouville => Generator::liouville(&hn, &space),
        GeneratorKind::Master => Generator::master(&hn, &space),
    }
    .map_err(core("hamiltonian"))?;
    let gms = gs
        .iter()
        .map(|g| NormalForm::from_poly(g).and_then(|n| n.embed(space.modes()).realize(&space)))
        .collect::<fockflux::Result<Vec<_>>>()
        .map_err(core("observables"))?;

    let (t_end, dt) = (cfg.t.unwrap_or(1.0), cfg.dt.unwrap_or(0.01));
    let flow = HamiltonianFlow::new(&h).map_err(core("hamiltonian"))?;
    let hm = hn.embed(space.modes()).realize(&space).map_err(core("hamiltonian"))?;
    let mut headers = vec!["step".to_string(), "t".into(), "trace_re".into(), "energy_re".into()];
    for i in 1..=gs.len() {
        headers.push(format!("quantum_{i}"));
        headers.push(format!("classical_{i}"));
    }
    let mut t = Table {
        headers,
        rows: Vec::new(),
    };
    let mut classical = ms.clone();
    let mut worst_gap = 0.0f64;
    let mut energy0 = None;
    let mut energy_drift = 0.0f64;
    let mut failure: Option<CliError> = None;
    let evo = evolve_observed(&rho0, &gen, t_end, dt, |step, time, rho| {
        if failure.is_some() {
            return;
        }
        if step > 0 {
            for (s, _) in classical.iter_mut() {
                match flow.rk4_step(s, dt) {
                    Ok(n) => *s = n,
                    Err(e) => failure = Some(CliError::from_core("state", e)),
                }
            }
        }
        let energy = rho.trace_product(&hm);
        let e0 = *energy0.get_or_insert(energy);
        energy_drift = energy_drift.max((energy - e0).norm());
        let mut row = vec![step.into(), time.into(), rho.trace().re.into(), energy.re.into()];
        for (g, gm) in gs.iter().zip(&gms) {
            let q = rho.trace_product(gm);
            let c: Complex64 = classical
                .iter()
                .map(|(s, w)| g.eval(&s.phipi_point()).unwrap_or(Complex64::new(f64::NAN, 0.0)) * *w)
                .sum();
            worst_gap = worst_gap.max((q - c).norm());
            row.push(q.re.into());
            row.push(c.re.into());
        }
        t.rows.push(row);
    })
    .map_err(core("evolution"))?;
    if let Some(e) = failure {
        return Err(e);
    }
    let mut rep = Report::new("evolve");
    rep.checks.push(
        Check::at_most("max trace drift", "trace-conservation", evo.max_trace_drift, tol).with_detail(format!(
            "{} generator, {} steps; max |<g>_rho - <g>_classical| = {worst_gap:.3e}; \
             max energy drift {energy_drift:.3e}; max asymmetry {:.3e}",
            gen.name(),
            evo.steps,
            evo.max_asymmetry
        )),
    );
    rep.tables.push(("evolve".into(), t));
    if let (Generator::Master(terms), true) = (&gen, space.dim() <= 12) {
        let mut sp = Table::new(&["re", "im"]);
        for l in master_spectrum(terms).map_err(core("cutoff"))? {
            sp.push(vec![l.re.into(), l.im.into()]);
        }
        rep.tables.push(("master_spectrum".into(), sp));
    }
    Ok(rep)
}

fn reify(cfg: &ExperimentConfig) -> Result<Report, CliError> {
    let s = state(cfg)?.ok_or_else(|| CliError::Config("state: missing".into()))?;
    if s.modes() != 1 {
        return Err(CliError::Config("state: reification traces need a single mode".into()));
    }
    let margin = cfg.pole_margin.unwrap_or(fockflux::reification::POLE_MARGIN);
    let grid = alpha_grid(cfg.alpha_points.unwrap_or(20), margin);
    let threshold = cfg.threshold.unwrap_or(1e6);
    let mut cutoffs = cfg.cutoffs.clone().unwrap_or_else(|| vec![32, 64]);
    cutoffs.sort_unstable();
    cutoffs.dedup();
    let traces = cutoffs
        .par_iter()
        .map(|&d| rho_z_trace(&s, &grid, d, threshold))
        .collect::<fockflux::Result<Vec<_>>>()
        .map_err(core("cutoffs"))?;

    let mut t = Table::new(&["alpha", "norm", "cutoff", "residual_A7", "residual_A8", "c", "d"]);
    let mut rep = Report::new("reify");
    for tr in &traces {
        for k in 0..tr.alphas.len() {
            t.push(vec![
                tr.alphas[k].into(),
                tr.norms[k].into(),
                tr.cutoff.into(),
                tr.residual_a7[k].into(),
                tr.residual_a8[k].into(),
                tr.c[k].into(),
                tr.d[k].into(),
            ]);
        }
        rep.checks.push(Check::flag(
            &format!("norm monotone at cutoff {}", tr.cutoff),
            "reification-divergence",
            tr.is_monotone(),
        ));
    }
    let top = traces.last().expect("cutoffs validated nonempty");
    rep.checks.push(
        Check::at_least(
            &format!("final norm at cutoff {}", top.cutoff),
            "reification-divergence",
            *top.norms.last().unwrap(),
            threshold,
        )
        .with_detail(format!("threshold first crossed at alpha = {:?}", top.threshold_alpha)),
    );
    if traces.len() > 1 {
        let finals: Vec<f64> = traces.iter().map(|t| *t.norms.last().unwrap()).collect();
        rep.checks.push(Check::flag(
            "final norm grows with cutoff",
            "reification-divergence",
            finals.windows(2).all(|w| w[1] > w[0]),
        ));
    }
    rep.tables.push(("reify_trace".into(), t));

    let mut f = Table::new(&["alpha", "cutoff", "trace_drift_rate"]);
    for &a in &grid {
        let r = norm_flow_residual(&s, a, top.cutoff).map_err(core("alpha_points"))?;
        f.push(vec![a.into(), top.cutoff.into(), r.into()]);
    }
    rep.tables.push(("norm_flow".into(), f));

    if let Some(eps) = &cfg.eps {
        let rows = paradox_demo(&s, eps, &cutoffs).map_err(core("eps"))?;
        let mut p = Table::new(&["eps", "cutoff", "norm", "residual_A7", "residual_A8"]);
        for r in rows {
            p.push(vec![r.eps.into(), r.cutoff.into(), r.norm.into(), r.residual_a7.into(), r.residual_a8.into()]);
        }
        rep.tables.push(("paradox".into(), p));
    }
    Ok(rep)
}

fn project(cfg: &ExperimentConfig) -> Result<Report, CliError> {
    let h = parse("hamiltonian", cfg.hamiltonian.as_deref().unwrap_or_default(), &cfg.bindings)?;
    let ms = members(cfg)?;
    let space = space_for(cfg, modes_of(&ms), &[&h])?;
    let rho = density(cfg, &space)?;
    let hn = NormalForm::from_poly(&h)
        .and_then(|n| n.embed(space.modes()).realize(&space))
        .map_err(core("hamiltonian"))?;
    let deltas = cfg.deltas.clone().unwrap_or_else(|| vec![50.0, 100.0, 200.0]);
    let points = projection_decay(rho.matrix(), &hn, &deltas, 64).map_err(core("state"))?;
    let env: Vec<(f64, f64)> = points.iter().map(|p| (p.delta, p.envelope)).collect();
    let (c, worst) = inverse_fit(&env);
    let mut t = Table::new(&["delta", "pointwise", "envelope", "fit_c_over_delta"]);
    for p in &points {
        t.push(vec![p.delta.into(), p.pointwise.into(), p.envelope.into(), (c / p.delta).into()]);
    }
    let mut rep = Report::new("project");
    rep.checks.push(
        Check::at_most("envelope ratio to C/delta", "time-average-projection", worst, 2.0)
            .with_detail(format!("C = {c:.6}")),
    );
    rep.tables.push(("project".into(), t));
    Ok(rep)
}

fn iee(cfg: &ExperimentConfig) -> Result<Report, CliError> {
    let tol = cfg.tolerance.unwrap_or(1e-7);
    let b = &cfg.bindings;
    let h = parse("hamiltonian", cfg.hamiltonian.as_deref().unwrap_or_default(), b)?;
    let gs = cfg
        .observables
        .iter()
        .enumerate()
        .map(|(i, g)| parse(&format!("observables[{i}]"), g, b))
        .collect::<Result<Vec<_>, _>>()?;
    let e = ensemble(cfg)?.ok_or_else(|| CliError::Config("ensemble: missing".into()))?;
    let mut polys: Vec<&Poly> = gs.iter().collect();
    polys.push(&h);
    let space = space_for(cfg, e.modes(), &polys)?;
    let r = iee_check(&e, &h, &gs, &space, tol).map_err(core("ensemble"))?;
    let mut t = Table::new(&[
        "observable",
        "mean_g_hat_re",
        "mean_g_hat_im",
        "mean_g_dot_re",
        "mean_g_dot_im",
        "mean_discrepancy_re",
        "mean_discrepancy_im",
    ]);
    for (g, x) in cfg.observables.iter().zip(&r.entries) {
        t.push(vec![
            g.clone().into(),
            x.g_hat.re.into(),
            x.g_hat.im.into(),
            x.g_dot.re.into(),
            x.g_dot.im.into(),
            x.discrepancy.re.into(),
            x.discrepancy.im.into(),
        ]);
    }
    let worst = r
        .entries
        .iter()
        .map(|x| x.g_hat.norm().max(x.g_dot.norm()))
        .fold(0.0, f64::max);
    let mut rep = Report::new("iee");
    rep.checks.push(Check::at_most(
        "max |<g_hat>|, |<g_dot>|",
        "equilibrium-flux-condition",
        worst,
        tol,
    ));
    rep.tables.push(("iee".into(), t));
    Ok(rep)
}
