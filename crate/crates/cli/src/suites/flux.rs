use fockflux::discrepancy::{
    discrepancy_report, discrepancy_series, iee_check, rescale_field, scaling_condition_constant,
    scaling_condition_residual,
};
use fockflux::ensemble::{ClassicalState, Ensemble};
use fockflux::operator::FockSpace;
use fockflux::poly::{parse_poly, Bindings, Chart, MultiIndex};
use fockflux::scalar::Coefficient;
use fockflux::{Complex64, ExactComplex, ExactPoly, Poly, Result};
use rayon::prelude::*;

use super::SuiteContext;
use crate::random;
use crate::report::{Check, Report, Table};

pub(crate) fn oscillator_hamiltonian(m: f64) -> Result<Poly> {
    let b: Bindings = [("m".to_string(), m)].into_iter().collect();
    parse_poly("0.5*pi1^2 + 0.5*m*phi1^2", &b)
}

fn seeded_states(ctx: &SuiteContext, count: u64, radius: f64) -> Vec<ClassicalState> {
    let mut out = vec![ClassicalState::single(1.0, 0.0)];
    out.extend((0..count).map(|i| random::state(&mut random::stream(ctx.seed, i), 1, radius)));
    out
}

pub fn closed_form(ctx: &SuiteContext) -> Result<Report> {
    let cutoff = ctx.cutoff_or(32);
    let rows: Vec<(usize, usize, f64, f64, bool)> = (0..200u64)
        .into_par_iter()
        .map(|i| -> Result<_> {
            let mut rng = random::stream(ctx.seed, i);
            let modes = 1 + (i as usize % 2);
            let (dh, dg) = if modes == 1 { (0.7, 0.6) } else { (0.4, 0.3) };
            let h = random::real_poly_of_degree(&mut rng, modes, 3, dh);
            let g = random::real_poly(&mut rng, modes, 4, dg);
            let s = random::state(&mut rng, modes, 1.0);
            let space = FockSpace::new(modes, cutoff)?;
            let r = discrepancy_report(&s, &g, &h, &space, 3)?;
            Ok((i as usize, modes, r.direct.norm(), r.residual.unwrap_or(f64::INFINITY), r.applicable))
        })
        .collect::<Result<_>>()?;
    let mut t = Table::new(&["triple", "modes", "abs_direct", "abs_direct_minus_closed", "applicable"]);
    let mut worst = 0.0f64;
    let mut inapplicable = 0usize;
    for (i, n, d, r, a) in rows {
        worst = worst.max(r);
        if !a {
            inapplicable += 1;
        }
        t.push(vec![i.into(), n.into(), d.into(), r.into(), a.into()]);
    }
    let mut rep = Report::new("discrepancy-closed-form");
    rep.checks.push(Check::at_most(
        "max |direct - closed form|",
        "discrepancy-closed-form",
        worst,
        1e-8,
    ));
    rep.checks.push(Check::at_most(
        "triples outside the exact order",
        "discrepancy-closed-form",
        inapplicable as f64,
        0.0,
    ));
    rep.tables.push(("discrepancy_closed_form".into(), t));
    Ok(rep)
}

fn max_coeff(p: &Poly) -> f64 {
    p.terms().map(|(_, c)| c.norm()).fold(0.0, f64::max)
}

pub fn oscillator(ctx: &SuiteContext) -> Result<Report> {
    let space = FockSpace::new(1, ctx.cutoff_or(32))?;
    let states = seeded_states(ctx, 5, 1.0);
    let g = parse_poly("phi1*pi1", &Bindings::new())?;
    let mut t = Table::new(&["m", "state", "phi", "pi", "direct_re", "direct_im", "closed_form_re", "expected"]);
    let mut worst = 0.0f64;
    for m in [0.5, 1.0, 2.0, 4.0] {
        let h = oscillator_hamiltonian(m)?;
        let expected = -(m - 1.0) / 2.0;
        let reports: Vec<_> = states
            .par_iter()
            .map(|s| discrepancy_report(s, &g, &h, &space, 3))
            .collect::<Result<_>>()?;
        for (k, (s, r)) in states.iter().zip(reports).enumerate() {
            let cf = r.closed_form.unwrap_or(Complex64::new(f64::NAN, 0.0));
            worst = worst
                .max((r.direct - expected).norm())
                .max((cf - expected).norm());
            t.push(vec![
                m.into(),
                k.into(),
                s.phi[0].into(),
                s.pi[0].into(),
                r.direct.re.into(),
                r.direct.im.into(),
                cf.re.into(),
                expected.into(),
            ]);
        }
    }

    // m = 1: the series vanishes for every monomial of degree ≤ 4.
    let h1 = oscillator_hamiltonian(1.0)?.to_zy()?;
    let monomials = MultiIndex::enumerate(2, 0, 4);
    let mut worst_series = 0.0f64;
    let mut worst_direct = 0.0f64;
    let mut z = Table::new(&["g_phi_exp", "g_pi_exp", "max_series_coeff", "max_abs_direct"]);
    for k in &monomials {
        let g = Poly::monomial(Chart::PhiPi, 1, k.clone(), Complex64::new(1.0, 0.0));
        let series = discrepancy_series(&g.to_zy()?, &h1, 4);
        let sc = max_coeff(&series);
        let mut direct = 0.0f64;
        for s in &states {
            let r = discrepancy_report(s, &g, &oscillator_hamiltonian(1.0)?, &space, 3)?;
            direct = direct.max(r.direct.norm());
        }
        worst_series = worst_series.max(sc);
        worst_direct = worst_direct.max(direct);
        z.push(vec![(k.get(0) as usize).into(), (k.get(1) as usize).into(), sc.into(), direct.into()]);
    }

    let mut rep = Report::new("oscillator-discrepancy");
    rep.checks.push(Check::at_most(
        "max |discrepancy + (m-1)/2|",
        "oscillator-discrepancy",
        worst,
        1e-8,
    ));
    rep.checks.push(Check::at_most(
        "m=1 series coefficients, degree <= 4",
        "oscillator-zero-discrepancy",
        worst_series,
        1e-12,
    ));
    rep.checks.push(Check::at_most(
        "m=1 direct discrepancy, degree <= 4",
        "oscillator-zero-discrepancy",
        worst_direct,
        1e-8,
    ));
    rep.tables.push(("oscillator_discrepancy".into(), t));
    rep.tables.push(("oscillator_unit_mass".into(), z));
    Ok(rep)
}

fn exact_oscillator(num: i64, den: i64) -> ExactPoly {
    let half = ExactComplex::from_ratio(1, 2);
    ExactPoly::from_terms(
        Chart::PhiPi,
        1,
        [
            (MultiIndex::from_vec(vec![0, 2]), half),
            (MultiIndex::from_vec(vec![2, 0]), ExactComplex::from_ratio(num, 2 * den)),
        ],
    )
}

pub fn field_scaling(ctx: &SuiteContext) -> Result<Report> {
    let space = FockSpace::new(1, ctx.cutoff_or(32))?;
    let states = seeded_states(ctx, 5, 1.0);
    let g = parse_poly("phi1*pi1", &Bindings::new())?;
    let mut rep = Report::new("field-scaling");

    // Masses whose fourth roots are rational: exact arithmetic throughout.
    let mut exact = Table::new(&["m", "s", "curvature_difference"]);
    let mut nonzero = 0usize;
    for (mn, md, sn, sd) in [(16, 1, 1, 2), (1, 16, 2, 1), (81, 1, 1, 3)] {
        let h = exact_oscillator(mn, md);
        let (hp, _) = rescale_field(&h, &[ExactComplex::from_ratio(sn, sd)])?;
        let r = scaling_condition_constant(&hp)?.remove(0);
        if r != ExactComplex::from_int(0) {
            nonzero += 1;
        }
        exact.push(vec![
            format!("{mn}/{md}").into(),
            format!("{sn}/{sd}").into(),
            format!("{}", r.re).into(),
        ]);
    }
    rep.checks.push(Check::at_most(
        "exact curvature difference after rescaling",
        "field-scaling",
        nonzero as f64,
        0.0,
    ));

    let mut t = Table::new(&["m", "s", "scaling_residual", "unscaled_discrepancy", "scaled_discrepancy"]);
    let mut worst_res = 0.0f64;
    let mut worst_ratio = 0.0f64;
    let mut worst_disc = 0.0f64;
    let members: Vec<(ClassicalState, f64)> = states.iter().map(|s| (s.clone(), 1.0)).collect();
    for m in [0.5f64, 1.0, 2.0, 4.0] {
        let s: f64 = m.powf(-0.25);
        let h = oscillator_hamiltonian(m)?;
        let (hp, map) = rescale_field(&h, &[Complex64::new(s, 0.0)])?;
        let primed: Vec<(ClassicalState, f64)> = members.iter().map(|(x, w)| (map.to_primed(x), *w)).collect();
        let res = scaling_condition_residual(&hp, &Ensemble::normalized(primed.clone())?)?[0].norm();
        let bound = 8.0 * f64::EPSILON * m.max(1.0);
        worst_res = worst_res.max(res);
        worst_ratio = worst_ratio.max(res / bound);
        let mut scaled = 0.0f64;
        for (x, _) in &primed {
            let r = discrepancy_report(x, &g, &hp, &space, 3)?;
            scaled = scaled.max(r.direct.norm()).max(r.closed_form.map_or(f64::INFINITY, |c| c.norm()));
        }
        worst_disc = worst_disc.max(scaled);
        t.push(vec![m.into(), s.into(), res.into(), (-(m - 1.0) / 2.0).into(), scaled.into()]);
    }
    rep.checks.push(
        Check::at_most("binary64 curvature residual / 8 ulp", "field-scaling", worst_ratio, 1.0)
            .with_detail(format!("largest residual {worst_res:.3e}")),
    );
    rep.checks.push(Check::at_most(
        "scaled discrepancy for g = phi pi",
        "field-scaling",
        worst_disc,
        1e-8,
    ));
    rep.tables.push(("field_scaling_exact".into(), exact));
    rep.tables.push(("field_scaling".into(), t));
    Ok(rep)
}

pub fn iee_condition(ctx: &SuiteContext) -> Result<Report> {
    let space = FockSpace::new(1, ctx.cutoff_or(32))?;
    let e = Ensemble::uniform_circle(64, 1.0)?;
    let gs = [
        parse_poly("phi1*pi1", &Bindings::new())?,
        parse_poly("phi1^2 - pi1^2", &Bindings::new())?,
    ];
    let labels = ["phi1*pi1", "phi1^2 - pi1^2"];
    let tol = 1e-7;
    let mut t = Table::new(&["m", "observable", "mean_g_hat_re", "mean_g_dot_re", "mean_discrepancy_re", "mean_discrepancy_im"]);
    let mut rep = Report::new("iee-condition");
    let mut reports = Vec::new();
    for m in [1.0, 2.0] {
        let r = iee_check(&e, &oscillator_hamiltonian(m)?, &gs, &space, tol)?;
        for (label, x) in labels.iter().zip(&r.entries) {
            t.push(vec![
                m.into(),
                (*label).into(),
                x.g_hat.re.into(),
                x.g_dot.re.into(),
                x.discrepancy.re.into(),
                x.discrepancy.im.into(),
            ]);
        }
        reports.push(r);
    }
    let unit = &reports[0];
    let worst = unit
        .entries
        .iter()
        .map(|x| x.g_hat.norm().max(x.g_dot.norm()))
        .fold(0.0, f64::max);
    rep.checks.push(Check::at_most("m=1 max |<g_hat>|, |<g_dot>|", "equilibrium-flux-condition", worst, tol));
    rep.checks.push(Check::flag("m=2 violates the condition", "equilibrium-flux-condition", !reports[1].holds));
    let d = reports[1].entries[0].discrepancy;
    rep.checks.push(Check::at_most(
        "m=2 |<g_hat - g_dot> + 0.5| for g = phi pi",
        "equilibrium-flux-condition",
        (d + 0.5).norm(),
        tol,
    ));
    rep.tables.push(("iee_condition".into(), t));
    Ok(rep)
}
