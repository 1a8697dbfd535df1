#![allow(dead_code)]

use direktor::langevin::{bogoliubov_metric, drift_matrix, stability, swap_halves, Basis, DriftSystem};
use direktor::network::{c, CoherentCoupling, CollectiveDissipator, LinearNetwork, Mode, Port, C64};
use direktor::noise::output_spectrum;
use nalgebra::DMatrix;
use proptest::prelude::*;
use proptest::strategy::ValueTree;
use proptest::test_runner::TestRunner;

pub const PROBE_FREQUENCIES: [f64; 5] = [-2.0, -0.5, 0.0, 0.7, 3.0];

fn complex(scale: f64) -> impl Strategy<Value = C64> {
    (-scale..scale, -scale..scale).prop_map(|(re, im)| c(re, im))
}

fn network_of(
    n: usize,
    detunings: Vec<f64>,
    hops: Vec<C64>,
    squeezes: Vec<C64>,
    dissipators: Vec<(f64, Vec<C64>, Vec<C64>)>,
    ports: Vec<(f64, f64)>,
) -> LinearNetwork {
    let mut coupling = CoherentCoupling::zeros(n);
    let mut k = 0;
    for a in 0..n {
        coupling.set_beam_splitter(a, a, c(detunings[a], 0.0));
        for b in a..n {
            if a != b {
                coupling.set_beam_splitter(a, b, hops[k]);
            }
            coupling.set_squeezing(a, b, squeezes[k]);
            k += 1;
        }
    }
    let modes = (0..n)
        .map(|index| Mode {
            label: format!("d{}", index + 1),
            index,
        })
        .collect();
    let dissipators = dissipators
        .into_iter()
        .map(|(rate, u, v)| CollectiveDissipator::new(rate, u, v))
        .collect();
    let ports = ports
        .into_iter()
        .enumerate()
        .map(|(m, (kappa, occ))| Port::thermal(m, kappa, occ))
        .collect();
    LinearNetwork::new(modes, coupling, dissipators, ports).expect("generated network is valid")
}

/// Random 2–3 mode networks with hopping, weak squeezing, up to two collective dissipators
/// and a thermal port on every mode. Not necessarily stable.
pub fn any_network() -> impl Strategy<Value = LinearNetwork> {
    (2usize..=3)
        .prop_flat_map(|n| {
            let pairs = n * (n + 1) / 2;
            (
                Just(n),
                prop::collection::vec(-1.0..1.0f64, n),
                prop::collection::vec(complex(1.0), pairs),
                prop::collection::vec(complex(0.3), pairs),
                prop::collection::vec(
                    (
                        0.0..1.0f64,
                        prop::collection::vec(complex(1.0), n),
                        prop::collection::vec(complex(0.5), n),
                    ),
                    0..=2,
                ),
                prop::collection::vec((0.5..2.0f64, 0.0..2.0f64), n),
            )
        })
        .prop_map(|(n, det, hops, sq, diss, ports)| network_of(n, det, hops, sq, diss, ports))
}

pub fn stable_network() -> impl Strategy<Value = LinearNetwork> {
    any_network().prop_filter("stable", |net| stability(net).stable)
}

/// Deterministic sample of `count` stable networks.
pub fn sample_stable_networks(count: usize) -> Vec<LinearNetwork> {
    let mut runner = TestRunner::deterministic();
    let strategy = stable_network();
    (0..count)
        .map(|_| strategy.new_tree(&mut runner).expect("sampling").current())
        .collect()
}

pub fn sample_phases(count: usize, n: usize) -> Vec<Vec<f64>> {
    let mut runner = TestRunner::deterministic();
    let strategy = prop::collection::vec(-std::f64::consts::PI..std::f64::consts::PI, n);
    (0..count)
        .map(|_| strategy.new_tree(&mut runner).expect("sampling").current())
        .collect()
}

fn max_abs(m: &DMatrix<C64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Largest violation of `|s_ij|` invariance under a gauge change, scaled by `max(1, |s_ij|)`.
pub fn gauge_violation(net: &LinearNetwork, phases: &[f64]) -> f64 {
    let gauged = net.gauge_transform(phases).expect("gauge");
    let (a, b) = (drift_matrix(net), drift_matrix(&gauged));
    let mut worst: f64 = 0.0;
    for w in PROBE_FREQUENCIES {
        let s = a.scattering(w, Basis::Doubled).expect("scattering");
        let t = b.scattering(w, Basis::Doubled).expect("scattering");
        for (x, y) in s.matrix.iter().zip(t.matrix.iter()) {
            worst = worst.max((x.norm() - y.norm()).abs() / x.norm().max(1.0));
        }
    }
    worst
}

/// Largest entry of `s Σ_z s† − Σ_z` over the probe frequencies.
pub fn metric_violation(net: &LinearNetwork) -> f64 {
    let sys = drift_matrix(net);
    let mut worst: f64 = 0.0;
    for w in PROBE_FREQUENCIES {
        let s = sys.scattering(w, Basis::Doubled).expect("scattering").matrix;
        let g = bogoliubov_metric(s.nrows());
        worst = worst.max(max_abs(&(&s * &g * s.adjoint() - &g)) / max_abs(&s).powi(2).max(1.0));
    }
    worst
}

/// Largest violation of `M = Σ conj(M) Σ` for the drift and the input/output couplings.
pub fn particle_hole_violation(sys: &DriftSystem) -> f64 {
    let check = |m: &DMatrix<C64>| {
        let (l, r) = (swap_halves(m.nrows()), swap_halves(m.ncols()));
        max_abs(&(m - &l * m.map(|z| z.conj()) * &r))
    };
    check(&sys.drift).max(check(&sys.input)).max(check(&sys.output))
}

/// How far the smallest output spectrum falls below the vacuum level 1/2 (0 if it does not).
pub fn vacuum_floor_violation(net: &LinearNetwork) -> f64 {
    let mut worst: f64 = 0.0;
    for w in PROBE_FREQUENCIES {
        for ch in 0..net.num_channels() {
            let s = output_spectrum(net, w, ch, None).expect("spectrum");
            worst = worst.max(0.5 - s);
        }
    }
    worst
}
