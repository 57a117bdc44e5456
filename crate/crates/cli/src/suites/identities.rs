use fockflux::ensemble::{ensemble_density, expectation, pseudo_wavefunction, pure_density, Ensemble};
use fockflux::evolution::{master_rhs, MasterTerms};
use fockflux::operator::{lemmas, FockSpace, FockVector};
use fockflux::poly::MultiIndex;
use fockflux::scalar::Coefficient;
use fockflux::{Complex64, ExactNormalForm, NormalForm, Result};
use rayon::prelude::*;

use super::SuiteContext;
use crate::random;
use crate::report::{Check, Report, Table};

pub fn coherent_eigen(ctx: &SuiteContext) -> Result<Report> {
    let cutoff = ctx.cutoff_or(32);
    let rows: Vec<(usize, usize, usize, f64, f64)> = (0..50u64)
        .into_par_iter()
        .map(|i| -> Result<Vec<_>> {
            let mut rng = random::stream(ctx.seed, i);
            let modes = 1 + (i as usize % 2);
            let s = random::state(&mut rng, modes, 1.0);
            let space = FockSpace::new(modes, cutoff)?;
            let w = pseudo_wavefunction(&s, &space)?;
            let z = s.z();
            Ok((0..modes)
                .map(|j| {
                    let aw = space.annihilator(j).apply(&w);
                    let r = (&aw - &w.scale(z[j])).norm();
                    (i as usize, modes, j + 1, z[j].norm(), r)
                })
                .collect())
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    let mut t = Table::new(&["state", "modes", "mode", "abs_z", "residual"]);
    let mut worst = 0.0f64;
    for (i, n, j, az, r) in rows {
        worst = worst.max(r);
        t.push(vec![i.into(), n.into(), j.into(), az.into(), r.into()]);
    }
    let mut rep = Report::new("coherent-eigen");
    rep.checks.push(Check::at_most("max |a_j w - z_j w|", "coherent-eigenrelation", worst, 1e-8));
    rep.tables.push(("coherent_eigen".into(), t));
    Ok(rep)
}

pub fn expectation_identity(ctx: &SuiteContext) -> Result<Report> {
    let cutoff = ctx.cutoff_or(32);
    let rows: Vec<(usize, usize, u32, f64)> = (0..100u64)
        .into_par_iter()
        .map(|i| -> Result<_> {
            let mut rng = random::stream(ctx.seed, i);
            let modes = 1 + (i as usize % 2);
            let density = if modes == 1 { 0.6 } else { 0.25 };
            let g = random::real_poly(&mut rng, modes, 6, density);
            let s = random::state(&mut rng, modes, 1.0);
            let space = FockSpace::new(modes, cutoff)?;
            let rho = pure_density(&s, &space)?;
            let q = expectation(&rho, &g)?;
            let c = g.eval(&s.phipi_point())?;
            Ok((i as usize, modes, g.degree(), (q - c).norm()))
        })
        .collect::<Result<_>>()?;
    let mut t = Table::new(&["poly", "modes", "degree", "abs_error"]);
    let mut worst = 0.0f64;
    for (i, n, d, e) in rows {
        worst = worst.max(e);
        t.push(vec![i.into(), n.into(), (d as usize).into(), e.into()]);
    }
    let mut rep = Report::new("expectation-identity");
    rep.checks.push(Check::at_most("max |Tr(rho g_n) - g|", "expectation-identity", worst, 1e-8));
    rep.tables.push(("expectation_identity".into(), t));
    Ok(rep)
}

pub fn trace_conservation(ctx: &SuiteContext) -> Result<Report> {
    let cutoff = ctx.cutoff_or(24);
    let space = FockSpace::new(1, cutoff)?;
    let rows: Vec<(usize, bool, f64, f64)> = (0..50u64)
        .into_par_iter()
        .map(|i| -> Result<_> {
            let mut rng = random::stream(ctx.seed, i);
            let h = random::real_poly_of_degree(&mut rng, 1, 3, 0.7);
            let terms = MasterTerms::new(&NormalForm::from_poly(&h)?, &space)?;
            let rho = if i % 2 == 0 {
                let members = (0..3)
                    .map(|_| (random::state(&mut rng, 1, 1.0), rand::Rng::random_range(&mut rng, 0.1..1.0)))
                    .collect();
                ensemble_density(&Ensemble::normalized(members)?, &space)?.into_matrix()
            } else {
                random::hermitian(&mut rng, &space).scale(Complex64::new(1.0 / cutoff as f64, 0.0))
            };
            let pr = i % 2 == 0;
            let min_eig = fockflux::ensemble::DensityMatrix::from_matrix(rho.clone()).min_eigenvalue();
            let tr = master_rhs(&rho, &terms)?.trace().norm();
            Ok((i as usize, pr, min_eig, tr))
        })
        .collect::<Result<_>>()?;
    let mut t = Table::new(&["matrix", "realizable", "min_eigenvalue", "abs_trace_rhs"]);
    let mut worst = 0.0f64;
    let mut indefinite = 0usize;
    for (i, pr, me, tr) in rows {
        worst = worst.max(tr);
        if me < -1e-12 {
            indefinite += 1;
        }
        t.push(vec![i.into(), pr.into(), me.into(), tr.into()]);
    }
    let mut rep = Report::new("trace-conservation");
    rep.checks.push(Check::at_most("max |Tr master_rhs(rho)|", "master-trace-conservation", worst, 1e-10));
    rep.checks.push(
        Check::at_least("indefinite matrices sampled", "master-trace-conservation", indefinite as f64, 1.0)
            .with_detail(format!("{indefinite} of 50 have a negative eigenvalue")),
    );
    rep.tables.push(("trace_conservation".into(), t));
    Ok(rep)
}

struct LemmaRow {
    h: usize,
    lemma: &'static str,
    n: u32,
    m: u32,
    mode: usize,
    symbolic_zero: bool,
    matrix_diff: Option<f64>,
}

fn ladder_word(modes: usize, j: usize, create: u32, annih: u32) -> ExactNormalForm {
    let mut p = MultiIndex::zeros(modes);
    let mut q = MultiIndex::zeros(modes);
    p.set(j, create);
    q.set(j, annih);
    ExactNormalForm::word(modes, Coefficient::from_int(1), p, q)
}

fn to_float(op: &ExactNormalForm) -> NormalForm {
    op.map_coeffs(|c| c.to_complex64())
}

/// Interior difference between the truncated-matrix commutator `[x, h]` and
/// the realization of the symbolic one, taken column by column on interior
/// basis vectors.
fn matrix_cross_check(x: &ExactNormalForm, h: &ExactNormalForm, space: &FockSpace) -> Result<f64> {
    let (xf, hf) = (to_float(x), to_float(h));
    let symbolic = to_float(&x.commutator(h));
    let mut worst = 0.0f64;
    for c in (0..space.dim()).filter(|&c| space.is_interior(c, 8)) {
        let e = FockVector::basis(space, &space.occupations(c));
        let dense = &xf.apply(&hf.apply(&e)?)? - &hf.apply(&xf.apply(&e)?)?;
        let d = &dense - &symbolic.apply(&e)?;
        worst = worst.max(d.interior_max_abs(8));
    }
    Ok(worst)
}

fn lemma_rows(ctx: &SuiteContext, i: u64, space: &FockSpace) -> Result<Vec<LemmaRow>> {
    let mut rng = random::stream(ctx.seed, i);
    let modes = 2;
    let h = random::exact_operator(&mut rng, modes, 3, 6);
    let hi = i as usize;
    let mut rows = Vec::new();
    let row = |lemma, n, m, mode, zero| LemmaRow {
        h: hi,
        lemma,
        n,
        m,
        mode,
        symbolic_zero: zero,
        matrix_diff: None,
    };
    for j in 0..modes {
        for n in 1..=5 {
            rows.push(row("annihilator-power", n, 0, j + 1, lemmas::annihilator_power(&h, j, n).is_zero()));
            rows.push(row("creator-power", 0, n, j + 1, lemmas::creator_power(&h, j, n).is_zero()));
            for m in 1..=5 {
                rows.push(row("word", n, m, j + 1, lemmas::word_commutator(&h, j, m, n).is_zero()));
            }
        }
    }
    for n in 1..=5 {
        for m in 1..=5 {
            rows.push(row("two-mode-split", n, m, 0, lemmas::two_mode_split(&h, 0, 1, n, m).is_zero()));
            rows.push(row("two-mode-cross", n, m, 0, lemmas::two_mode_cross(&h, 0, 1, n, m).is_zero()));
        }
    }
    // Matrix cross-check of the left-hand sides at one power per lemma.
    let n = 1 + (i % 5) as u32;
    let m = 1 + ((i + 2) % 5) as u32;
    let split = &ladder_word(modes, 0, 0, n) * &ladder_word(modes, 1, 0, m);
    for (lemma, x, nn, mm) in [
        ("annihilator-power", ladder_word(modes, 0, 0, n), n, 0),
        ("creator-power", ladder_word(modes, 1, m, 0), 0, m),
        ("word", ladder_word(modes, 0, 1 + (i % 3) as u32, 1 + ((i + 1) % 3) as u32), 0, 0),
        ("two-mode-split", split, n, m),
    ] {
        let mut r = row(lemma, nn, mm, 0, true);
        r.matrix_diff = Some(matrix_cross_check(&x, &h, space)?);
        rows.push(r);
    }
    Ok(rows)
}

pub fn commutator_lemmas(ctx: &SuiteContext) -> Result<Report> {
    let space = FockSpace::new(2, ctx.cutoff_or(16))?;
    let rows: Vec<LemmaRow> = (0..100u64)
        .into_par_iter()
        .map(|i| lemma_rows(ctx, i, &space))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    let mut t = Table::new(&["hamiltonian", "lemma", "n", "m", "mode", "symbolic_zero", "matrix_interior_diff"]);
    let mut nonzero = 0usize;
    let mut symbolic = 0usize;
    let mut worst = 0.0f64;
    for r in &rows {
        match r.matrix_diff {
            Some(d) => worst = worst.max(d),
            None => {
                symbolic += 1;
                if !r.symbolic_zero {
                    nonzero += 1;
                }
            }
        }
        t.push(vec![
            r.h.into(),
            r.lemma.into(),
            (r.n as usize).into(),
            (r.m as usize).into(),
            r.mode.into(),
            r.symbolic_zero.into(),
            r.matrix_diff.map_or("".into(), |d| crate::report::fmt_f64(d).into()),
        ]);
    }
    let mut rep = Report::new("commutator-lemmas");
    rep.checks.push(
        Check::at_most("nonzero symbolic residuals", "ladder-commutator-lemmas", nonzero as f64, 0.0)
            .with_detail(format!("{symbolic} exact residuals checked")),
    );
    rep.checks.push(Check::at_most(
        "max interior |matrix - symbolic|",
        "ladder-commutator-lemmas",
        worst,
        1e-9,
    ));
    rep.tables.push(("commutator_lemmas".into(), t));
    Ok(rep)
}
