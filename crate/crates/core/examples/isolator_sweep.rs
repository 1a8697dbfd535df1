//! Transmission of the impedance-matched two-cavity isolator across frequency.

use direktor::devices::{make_device, reference_curves, DeviceParams};
use direktor::directionality::isolation;
use direktor::langevin::Basis;

fn main() -> direktor::Result<()> {
    let params = DeviceParams::IsolatorReduced { gamma: None, kappa: 1.0 };
    let net = make_device(&params, true)?;
    let reference = reference_curves(&params)?;

    println!("{:>6} {:>12} {:>12} {:>12} {:>10}", "omega", "forward", "reference", "reverse", "iso[dB]");
    for k in -8..=8 {
        let w = 0.25 * k as f64;
        let m = isolation(&net, w, 0, 1, Basis::Doubled)?;
        println!(
            "{w:>6.2} {:>12.6} {:>12.6} {:>12.3e} {:>10.1}",
            m.forward,
            reference.forward_gain(w),
            m.reverse,
            m.isolation_db
        );
    }

    // without the coherent hopping the same dissipator is reciprocal
    let bare = make_device(&params, false)?;
    let m = isolation(&bare, 0.0, 0, 1, Basis::Doubled)?;
    println!("unmatched at omega=0: forward {:.4}, reverse {:.4}", m.forward, m.reverse);
    Ok(())
}
