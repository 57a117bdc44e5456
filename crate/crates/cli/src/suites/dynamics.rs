use fockflux::ensemble::{pure_density, ClassicalState, HamiltonianFlow};
use fockflux::evolution::{inverse_fit, master_rhs, projection_decay as decay, MasterTerms};
use fockflux::operator::FockSpace;
use fockflux::poly::{parse_poly, Bindings};
use fockflux::{Complex64, NormalForm, Result};
use rayon::prelude::*;

use super::{log_slope, SuiteContext};
use crate::random;
use crate::report::{Check, Report, Table};

const STEPS: [f64; 3] = [1e-2, 1e-3, 1e-4];

struct FdRow {
    h: usize,
    errors: [f64; 3],
    order: f64,
}

fn fd_errors(h: &fockflux::Poly, s: &ClassicalState, space: &FockSpace) -> Result<[f64; 3]> {
    let terms = MasterTerms::new(&NormalForm::from_poly(h)?, space)?;
    let flow = HamiltonianFlow::new(h)?;
    let rhs = master_rhs(pure_density(s, space)?.matrix(), &terms)?;
    let mut out = [0.0; 3];
    for (k, &dt) in STEPS.iter().enumerate() {
        let fwd = pure_density(&flow.integrate(s, dt, dt / 8.0)?, space)?;
        let bwd = pure_density(&flow.integrate(s, -dt, dt / 8.0)?, space)?;
        let fd = (fwd.matrix() - bwd.matrix()).scale(Complex64::new(0.5 / dt, 0.0));
        out[k] = fd.interior_max_diff(&rhs, 6);
    }
    Ok(out)
}

pub fn master_equation(ctx: &SuiteContext) -> Result<Report> {
    let space = FockSpace::new(1, ctx.cutoff_or(32))?;
    let rows: Vec<FdRow> = (0..10u64)
        .into_par_iter()
        .map(|i| -> Result<_> {
            let mut rng = random::stream(ctx.seed, i);
            let h = random::real_poly_of_degree(&mut rng, 1, 3, 0.8);
            let s = random::state(&mut rng, 1, 1.0);
            let errors = fd_errors(&h, &s, &space)?;
            let pts: Vec<(f64, f64)> = STEPS.iter().cloned().zip(errors).collect();
            Ok(FdRow {
                h: i as usize,
                errors,
                order: log_slope(&pts),
            })
        })
        .collect::<Result<_>>()?;
    let mut t = Table::new(&["hamiltonian", "err_dt_1e-2", "err_dt_1e-3", "err_dt_1e-4", "order"]);
    let mut worst = f64::INFINITY;
    for r in &rows {
        worst = worst.min(r.order);
        t.push(vec![r.h.into(), r.errors[0].into(), r.errors[1].into(), r.errors[2].into(), r.order.into()]);
    }
    let mut rep = Report::new("master-equation");
    rep.checks.push(Check::at_least(
        "min observed convergence order",
        "free-space-master-equation",
        worst,
        1.9,
    ));
    rep.tables.push(("master_equation".into(), t));
    Ok(rep)
}

pub fn projection_decay(ctx: &SuiteContext) -> Result<Report> {
    let space = FockSpace::new(1, ctx.cutoff_or(32))?;
    let h = parse_poly("0.5*phi1^2 + 0.5*pi1^2", &Bindings::new())?;
    let hn = NormalForm::from_poly(&h)?.realize(&space)?;
    let rho = pure_density(&ClassicalState::single(1.0, 0.0), &space)?;
    let deltas = [50.0, 100.0, 200.0];
    let points = decay(rho.matrix(), &hn, &deltas, 64)?;
    let env: Vec<(f64, f64)> = points.iter().map(|p| (p.delta, p.envelope)).collect();
    let pw: Vec<(f64, f64)> = points.iter().map(|p| (p.delta, p.pointwise)).collect();
    let (c, worst) = inverse_fit(&env);
    let (cp, worst_p) = inverse_fit(&pw);
    let mut t = Table::new(&["delta", "pointwise", "envelope", "fit_c_over_delta"]);
    for p in &points {
        t.push(vec![p.delta.into(), p.pointwise.into(), p.envelope.into(), (c / p.delta).into()]);
    }
    let mut rep = Report::new("projection-decay");
    rep.checks.push(
        Check::at_most("envelope ratio to C/delta", "time-average-projection", worst, 2.0)
            .with_detail(format!("C = {c:.6}; pointwise fit C = {cp:.6}, worst ratio {worst_p:.4}")),
    );
    rep.tables.push(("projection_decay".into(), t));
    Ok(rep)
}
