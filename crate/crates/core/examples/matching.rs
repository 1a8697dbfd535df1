//! Recovering the impedance-matching squeezing of the NDPA by numerical optimisation.

use direktor::devices::{make_device, DeviceParams};
use direktor::directionality::{numeric_match, CouplingParameters, MatchOptions, ObjectiveTerm};
use direktor::langevin::ChannelComponent::{Annihilation, Creation};

fn main() -> direktor::Result<()> {
    let device = DeviceParams::ndpa(0.8, 1.0);
    let family = CouplingParameters::from_names(make_device(&device, false)?, &["L[d1,d2]"])?;
    // kill the reverse path at two frequencies
    let objective = [
        ObjectiveTerm::zero(Annihilation(0), Creation(1), 0.0),
        ObjectiveTerm::zero(Annihilation(0), Creation(1), 0.7),
    ];
    let sol = numeric_match(&family, &objective, &MatchOptions::default())?;
    println!("converged: {} after {} iterations, residual {:.2e}", sol.converged, sol.iterations, sol.residual);
    for (name, value) in &sol.parameter_values {
        println!("{name} = {value:.8}");
    }
    let analytic = make_device(&device, true)?.coupling().squeezing[(0, 1)];
    println!("analytic = {analytic:.8}");
    Ok(())
}
