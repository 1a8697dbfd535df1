//! Gain and added noise of the nondegenerate parametric amplifier as the cooperativity
//! approaches the instability at C = 1.

use direktor::devices::{make_device, reference_curves, with_port_occupation, DeviceParams};
use direktor::langevin::stability;
use direktor::noise::{noise_report, AmplifierMode};

fn main() -> direktor::Result<()> {
    println!("{:>6} {:>12} {:>10} {:>10}", "C", "gain", "n_add", "reference");
    for coop in [0.6, 0.8, 0.9, 0.95, 0.99] {
        let params = DeviceParams::ndpa(coop, 1.0);
        let net = make_device(&params, true)?;
        let r = noise_report(&net, 0.0, 0, 1, AmplifierMode::PhasePreserving)?;
        let reference = reference_curves(&params)?.added_noise(0.0, 0.0, 0.0);
        println!(
            "{coop:>6.2} {:>12.3} {:>10.5} {:>10}",
            r.gain,
            r.added_noise,
            reference.map_or("-".into(), |x| format!("{x:.5}"))
        );
    }

    // a hot idler port raises the noise floor
    let net = make_device(&DeviceParams::ndpa(0.9, 1.0), true)?;
    for n_th in [0.0, 0.5, 2.0] {
        let hot = with_port_occupation(&net, 1, n_th)?;
        let r = noise_report(&hot, 0.0, 0, 1, AmplifierMode::PhasePreserving)?;
        println!("idler occupation {n_th}: n_add = {:.4}", r.added_noise);
    }

    let unstable = make_device(&DeviceParams::ndpa(1.2, 1.0), true)?;
    let s = stability(&unstable);
    println!("C = 1.2 stable: {} (margin {:.3})", s.stable, s.margin);
    Ok(())
}
