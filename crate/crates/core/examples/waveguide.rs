//! Two cavities on a waveguide: the exact delayed scattering against the Markovian network,
//! and the induced couplings recovered from the exact response.

use direktor::devices::{fit_induced_couplings, induced_couplings, make_device, waveguide_scattering, DeviceParams};
use direktor::langevin::{scattering_matrix, Basis, ChannelComponent::Annihilation as A};

fn main() -> direktor::Result<()> {
    for tau in [0.0, 0.05, 0.5] {
        let params = DeviceParams::WaveguidePair {
            gamma: 1.0,
            k0l: std::f64::consts::FRAC_PI_4,
            kappa: 1.0,
            tau,
        };
        let markov = make_device(&params, true)?;
        let mut worst: f64 = 0.0;
        for k in -10..=10 {
            let w = 0.2 * k as f64;
            let exact = waveguide_scattering(&params, w)?;
            let approx = scattering_matrix(&markov, w, Basis::Doubled)?;
            let (x, y) = (exact.element(A(1), A(0))?, approx.element(A(1), A(0))?);
            worst = worst.max((x - y).norm());
        }
        let (j, g) = induced_couplings(&params)?;
        let (jf, gf) = fit_induced_couplings(&params, &[0.0, 0.1, 0.2])?;
        println!("tau {tau:<5} max |Δs21| {worst:.3e}  J_ind {j:.4} (fit {jf:.4})  Γ_ind {g:.4} (fit {gf:.4})");
    }
    Ok(())
}
