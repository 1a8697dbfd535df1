mod common;

use direktor::langevin::{drift_matrix, stability};
use direktor::network::C64;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn scattering_magnitudes_are_gauge_invariant(
        net in common::stable_network(),
        phases in prop::collection::vec(-3.2..3.2f64, 3),
    ) {
        let v = common::gauge_violation(&net, &phases[..net.num_modes()]);
        prop_assert!(v <= 1e-12, "violation {v:e}");
    }

    #[test]
    fn scattering_preserves_bogoliubov_metric(net in common::stable_network()) {
        let v = common::metric_violation(&net);
        prop_assert!(v <= 1e-10, "violation {v:e}");
    }

    #[test]
    fn drift_is_particle_hole_symmetric(net in common::any_network()) {
        prop_assert_eq!(common::particle_hole_violation(&drift_matrix(&net)), 0.0);
    }

    #[test]
    fn drift_eigenvalues_come_in_conjugate_pairs(net in common::any_network()) {
        let eig = stability(&net).eigenvalues;
        let scale = eig.iter().map(|z| z.norm()).fold(1.0, f64::max);
        for e in &eig {
            let partner = eig.iter().map(|f| (f - e.conj()).norm()).fold(f64::INFINITY, f64::min);
            prop_assert!(partner <= 1e-8 * scale, "{e} has no partner");
        }
    }

    #[test]
    fn output_spectra_never_fall_below_vacuum(net in common::stable_network()) {
        let v = common::vacuum_floor_violation(&net);
        prop_assert!(v <= 1e-12, "spectrum below 1/2 by {v:e}");
    }

    #[test]
    fn gauge_transform_round_trips(
        net in common::any_network(),
        phases in prop::collection::vec(-3.2..3.2f64, 3),
    ) {
        let n = net.num_modes();
        let there = net.gauge_transform(&phases[..n]).unwrap();
        let back: Vec<f64> = phases[..n].iter().map(|p| -p).collect();
        let again = there.gauge_transform(&back).unwrap();
        let diff = (&again.coupling().beam_splitter - &net.coupling().beam_splitter)
            .iter()
            .chain((&again.coupling().squeezing - &net.coupling().squeezing).iter())
            .map(|z: &C64| z.norm())
            .fold(0.0, f64::max);
        prop_assert!(diff <= 1e-12);
    }
}
