use direktor::devices::{make_device, reference_curves, DeviceParams};
use direktor::directionality::{dpa_sqrt_gain, isolation, numeric_match, CouplingParameters, MatchOptions, ObjectiveTerm};
use direktor::langevin::{adiabatic_eliminate, scattering_matrix, Basis, ChannelComponent};
use direktor::noise::{added_noise, AmplifierMode, Quadrature};

use ChannelComponent::{Annihilation as A, Creation as Cr, P, X};

fn matched(p: &DeviceParams) -> direktor::network::LinearNetwork {
    make_device(p, true).unwrap()
}

#[test]
fn dpa_squeezing_circulator_uses_the_exact_gain() {
    // the 6×6 pattern holds with √G_φ = C̄ + √(C̄² − 1) and α = 1/G_φ
    for cbar in [1.0, 1.5, 2.0, 10.0, 40.0] {
        let g = (cbar + (cbar * cbar - 1.0f64).sqrt()).powi(2);
        assert!((dpa_sqrt_gain(cbar).powi(2) - g).abs() <= 1e-12 * g);
        let s = scattering_matrix(&matched(&DeviceParams::dpa_aux(cbar, 1.0, 100.0)), 0.0, Basis::Quadrature).unwrap();
        let comps = [X(0), P(0), X(1), P(1), X(2), P(2)];
        let mut expect = [[0.0f64; 6]; 6];
        expect[0][5] = -1.0;
        expect[1][4] = 1.0;
        expect[2][0] = 1.0 / g.sqrt();
        expect[3][1] = g.sqrt();
        expect[4][3] = -1.0 / g.sqrt();
        expect[5][2] = g.sqrt();
        for r in 0..6 {
            for col in 0..6 {
                let z = s.element(comps[r], comps[col]).unwrap();
                assert!((z - expect[r][col]).norm() <= 1e-9 * g.sqrt(), "C̄={cbar} ({r},{col}) {z}");
            }
        }
    }
}

#[test]
fn unmatched_devices_are_reciprocal_in_power() {
    let cases = [
        DeviceParams::IsolatorReduced { gamma: None, kappa: 1.0 },
        DeviceParams::IsolatorThreeMode {
            j_prime: None,
            kappa: 1.0,
            kappa_aux: 50.0,
        },
    ];
    for p in cases {
        let net = make_device(&p, false).unwrap();
        for w in [0.0, 0.4, 1.3] {
            let m = isolation(&net, w, 0, 1, Basis::Doubled).unwrap();
            assert!((m.forward - m.reverse).abs() < 1e-12, "{p:?} at {w}");
        }
    }
}

#[test]
fn isolation_metrics_of_matched_isolator() {
    let m = isolation(&matched(&DeviceParams::IsolatorReduced { gamma: None, kappa: 1.0 }), 0.0, 0, 1, Basis::Doubled).unwrap();
    assert!((m.forward - 1.0).abs() < 1e-12);
    assert!(m.reverse < 1e-24 && m.reflect_a < 1e-24 && m.reflect_b < 1e-24);
    assert!(m.isolation_db > 200.0);
}

#[test]
fn three_mode_devices_approach_reduced_models() {
    let pairs = [
        (
            DeviceParams::IsolatorThreeMode {
                j_prime: None,
                kappa: 1.0,
                kappa_aux: 1e6,
            },
            DeviceParams::IsolatorReduced { gamma: None, kappa: 1.0 },
            (A(1), A(0)),
        ),
        (DeviceParams::ndpa_three_mode(0.9, 1.0, 1e6), DeviceParams::ndpa(0.9, 1.0), (Cr(1), A(0))),
    ];
    for (full, reduced, (out, inp)) in pairs {
        let (f, r) = (matched(&full), matched(&reduced));
        for w in [0.0, 0.2, 1.0] {
            let a = scattering_matrix(&f, w, Basis::Doubled).unwrap().element(out, inp).unwrap();
            let b = scattering_matrix(&r, w, Basis::Doubled).unwrap().element(out, inp).unwrap();
            assert!((a.norm_sqr() - b.norm_sqr()).abs() <= 1e-4 * b.norm_sqr().max(1.0), "{full:?} at {w}");
        }
    }
}

#[test]
fn eliminating_the_auxiliary_mode_recovers_the_reduced_isolator() {
    let full = matched(&DeviceParams::IsolatorThreeMode {
        j_prime: None,
        kappa: 1.0,
        kappa_aux: 1e4,
    });
    let reduced = adiabatic_eliminate(&full, 2).unwrap();
    assert!(reduced.warning.is_none());
    let r = matched(&DeviceParams::IsolatorReduced { gamma: None, kappa: 1.0 });
    for w in [0.0, 0.5, 2.0] {
        let a = scattering_matrix(&reduced.network, w, Basis::Doubled).unwrap();
        let b = scattering_matrix(&r, w, Basis::Doubled).unwrap();
        for (out, inp) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
            let (x, y) = (a.element(A(out), A(inp)).unwrap(), b.element(A(out), A(inp)).unwrap());
            assert!((x.norm() - y.norm()).abs() < 1e-12, "{w} {out}{inp}");
        }
    }
}

#[test]
fn numeric_match_recovers_the_analytic_ndpa_squeezing() {
    let device = DeviceParams::ndpa(0.8, 1.0);
    let unmatched = make_device(&device, false).unwrap();
    let family = CouplingParameters::from_names(unmatched, &["L[d1,d2]"]).unwrap();
    let objective = [
        ObjectiveTerm::zero(A(0), Cr(1), 0.0),
        ObjectiveTerm::zero(A(0), Cr(1), 0.7),
    ];
    let sol = numeric_match(&family, &objective, &MatchOptions::default()).unwrap();
    assert!(sol.converged);
    let analytic = matched(&device).coupling().squeezing[(0, 1)];
    assert!((sol.parameter_values[0].1 - analytic).norm() < 1e-6, "{:?} vs {analytic}", sol.parameter_values);
}

#[test]
fn ndpa_added_noise_tends_to_the_quantum_limit() {
    let mut prev = f64::INFINITY;
    for c in [0.7, 0.9, 0.99] {
        let n = added_noise(&matched(&DeviceParams::ndpa(c, 1.0)), 0.0, 0, 1, AmplifierMode::PhasePreserving).unwrap();
        assert!(n >= 0.5 && n < prev);
        prev = n;
    }
    assert!(prev - 0.5 < 1e-3);
}

#[test]
fn dpa_reference_curves_track_the_markovian_auxiliary_device() {
    let p = DeviceParams::dpa_aux(5.0, 1.0, 1e7);
    let net = matched(&p);
    let r = reference_curves(&p).unwrap();
    let mode = AmplifierMode::PhaseSensitive {
        input: Quadrature::P,
        output: Quadrature::P,
    };
    for w in [0.0, 0.3, 1.0, 3.0] {
        let s = scattering_matrix(&net, w, Basis::Quadrature).unwrap();
        let g = s.element(P(1), P(0)).unwrap().norm_sqr();
        assert!((g - r.forward_gain(w)).abs() <= 1e-5 * r.forward_gain(0.0));
        let n = added_noise(&net, w, 0, 1, mode).unwrap();
        assert!((n - r.added_noise(w, 0.0, 0.0).unwrap()).abs() < 1e-5);
    }
}
