//! Builds a network by hand, writes it as TOML and reads it back.

use direktor::cli::{load_network, NetworkConfig};
use direktor::network::{c, CollectiveDissipator, LinearNetwork};

fn main() -> direktor::Result<()> {
    let net = LinearNetwork::builder()
        .modes(["a", "b"])
        .beam_splitter(0, 1, c(0.0, 0.5))
        .dissipator(CollectiveDissipator::lowering(1.0, vec![c(1.0, 0.0), c(1.0, 0.0)]))
        .port(0, 1.0)
        .thermal_port(1, 1.0, 0.25)
        .build()?;
    let text = NetworkConfig::from_network(&net).to_toml()?;
    print!("{text}");
    let back = load_network(&text)?;
    println!("# roundtrip equal: {}", back == net);

    match load_network("modes = [\"a\"]\n\n[[ports]]\nmode = \"z\"\nkappa = 1.0\n") {
        Ok(_) => println!("unexpectedly accepted"),
        Err(e) => println!("# rejected: {e}"),
    }
    Ok(())
}
