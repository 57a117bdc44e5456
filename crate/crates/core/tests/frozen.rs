//! Discrepancies frozen from an independent dense-matrix computation
//! (coherent expectations of normal-ordered commutators at cutoff 90 for one
//! mode, 40 per mode for two).

use fockflux::discrepancy::discrepancy_report;
use fockflux::ensemble::ClassicalState;
use fockflux::operator::FockSpace;
use fockflux::poly::{parse_poly, Bindings};

struct Case {
    h: &'static str,
    g: &'static str,
    phi: &'static [f64],
    pi: &'static [f64],
    g_hat: f64,
    g_dot: f64,
    discrepancy: f64,
}

const CASES: &[Case] = &[
    Case {
        h: "0.5*pi1^2 + 0.25*phi1^4",
        g: "phi1^2",
        phi: &[0.3],
        pi: &[-0.2],
        g_hat: -0.12,
        g_dot: -0.12,
        discrepancy: 0.0,
    },
    Case {
        h: "0.5*pi1^2 + 0.5*phi1^2 + phi1^3",
        g: "phi1^3*pi1",
        phi: &[-0.4],
        pi: &[0.6],
        g_hat: 2.553920000000001,
        g_dot: 0.1779200000000001,
        discrepancy: 2.376000000000001,
    },
    Case {
        h: "0.5*pi1^2 + 0.5*pi2^2 + phi1^2*phi2",
        g: "phi1*pi2",
        phi: &[0.2, -0.3],
        pi: &[0.4, 0.1],
        g_hat: -0.1680000000000001,
        g_dot: 0.03200000000000001,
        discrepancy: -0.2000000000000001,
    },
    Case {
        h: "0.5*pi1^2 + 0.5*pi2^2 + phi1*phi2^2 + phi2^3/3",
        g: "phi1^2*pi2^2",
        phi: &[0.1, 0.3],
        pi: &[-0.2, 0.25],
        g_hat: -0.03324999999999999,
        g_dot: -0.003250000000000001,
        discrepancy: -0.02999999999999999,
    },
];

#[test]
fn discrepancies_match_frozen_values() {
    let b = Bindings::new();
    for case in CASES {
        let n = case.phi.len();
        let h = parse_poly(case.h, &b).unwrap();
        let g = parse_poly(case.g, &b).unwrap();
        let s = ClassicalState::new(case.phi.to_vec(), case.pi.to_vec()).unwrap();
        let space = FockSpace::new(n, if n == 1 { 32 } else { 20 }).unwrap();
        let r = discrepancy_report(&s, &g, &h, &space, 4).unwrap();
        let cf = r.closed_form.expect("polynomial inputs have a closed form");
        let label = format!("{} / {}", case.h, case.g);
        assert!((r.g_hat.re - case.g_hat).abs() < 1e-9 && r.g_hat.im.abs() < 1e-9, "{label}: {}", r.g_hat);
        assert!((r.g_dot.re - case.g_dot).abs() < 1e-12, "{label}: {}", r.g_dot);
        assert!((r.direct.re - case.discrepancy).abs() < 1e-9, "{label}: {}", r.direct);
        assert!((cf - case.discrepancy).norm() < 1e-12, "{label}: {cf}");
    }
}
