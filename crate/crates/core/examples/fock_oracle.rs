//! Cross-checks the linear moment equations against a truncated Fock-space master equation,
//! then runs the nonlinear directionality check with a squared operator.

use std::f64::consts::FRAC_PI_2;

use direktor::devices::{make_device, DeviceParams};
use direktor::fock::{factorized_directionality_check, DensityMatrix, DirectionalityProbe, EvolveOptions, HilbertSpec, MasterEquation, OperatorExpr};
use direktor::langevin::{coherent_moments, drift_matrix, evolve_moments};
use direktor::network::c;
use direktor::ode::OdeOptions;

fn main() -> direktor::Result<()> {
    let net = make_device(&DeviceParams::IsolatorReduced { gamma: None, kappa: 1.0 }, true)?;
    let alpha = [c(0.4, 0.0), c(0.0, 0.2)];
    let times = [0.0, 1.0, 2.0, 4.0];
    let spec = HilbertSpec::uniform(2, 7)?;
    let traj = MasterEquation::from_network(&net).evolve(&DensityMatrix::coherent(&spec, &alpha)?, &times, &EvolveOptions::default())?;
    let linear = evolve_moments(&drift_matrix(&net), &coherent_moments(&alpha), &times, &OdeOptions::default())?;
    for ((t, f), l) in times.iter().zip(traj.moments()?).zip(&linear) {
        println!("t = {t}: <d2> fock {:.6}  linear {:.6}", f.mean[1], l.mean[1]);
    }

    let mut probe = DirectionalityProbe::new(vec![8, 8], 1.0);
    probe.times = vec![0.0, 1.0, 2.0];
    probe.perturbations = vec![c(0.4, 0.0)];
    let o1 = OperatorExpr::annihilation(0).pow(2);
    let o2 = OperatorExpr::annihilation(1);
    for phi in [FRAC_PI_2, -FRAC_PI_2] {
        let r = factorized_directionality_check(&o1, &o2, 0.1, 0.1, phi, &probe)?;
        println!(
            "phi = {phi:+.4}: subsystem {} shielded, deviation {:.2e}, driven response {:.2e}",
            r.shielded,
            r.shielded_deviation(),
            r.driven_deviation()
        );
    }
    Ok(())
}
