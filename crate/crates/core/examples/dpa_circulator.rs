//! The phase-sensitive QND amplifier built with an auxiliary mode: quadrature scattering at
//! zero frequency and the phase-sensitive added noise.

use direktor::devices::{make_device, DeviceParams};
use direktor::directionality::dpa_sqrt_gain;
use direktor::langevin::{scattering_matrix, Basis, ChannelComponent::*};
use direktor::noise::{added_noise, AmplifierMode, Quadrature};

fn main() -> direktor::Result<()> {
    let cbar = 3.0;
    let net = make_device(&DeviceParams::dpa_aux(cbar, 1.0, 100.0), true)?;
    let s = scattering_matrix(&net, 0.0, Basis::Quadrature)?;
    println!("C̄ = {cbar}, √G = {:.6}", dpa_sqrt_gain(cbar));

    let comps = [X(0), P(0), X(1), P(1), X(2), P(2)];
    let names = ["X1", "P1", "X2", "P2", "Xc", "Pc"];
    print!("{:>4}", "");
    for n in names {
        print!("{n:>9}");
    }
    println!();
    for (out, name) in comps.iter().zip(names) {
        print!("{name:>4}");
        for inp in comps {
            print!("{:>9.4}", s.element(*out, inp)?.re);
        }
        println!();
    }

    let mode = AmplifierMode::PhaseSensitive {
        input: Quadrature::P,
        output: Quadrature::P,
    };
    for w in [0.0, 0.5, 2.0] {
        println!("omega {w}: n_add(P1 -> P2) = {:.3e}", added_noise(&net, w, 0, 1, mode)?);
    }
    Ok(())
}
