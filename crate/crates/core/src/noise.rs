//! Symmetrized output noise spectra, added noise and output occupancies.
//!
//! Channels are addressed by their index in the drift system: ports first (in port order),
//! then dissipators. All input fields are thermal with the channel's occupation, so every
//! input component carries symmetrized noise `n + 1/2`.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::langevin::{drift_matrix, stability, Basis, ChannelComponent, DriftSystem, ScatteringResult};
use crate::network::LinearNetwork;

/// Gains below this are treated as zero when referring noise to the input.
const MIN_GAIN: f64 = 1e-24;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quadrature {
    X,
    P,
}

impl Quadrature {
    pub fn component(self, channel: usize) -> ChannelComponent {
        match self {
            Quadrature::X => ChannelComponent::X(channel),
            Quadrature::P => ChannelComponent::P(channel),
        }
    }
}

impl fmt::Display for Quadrature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Quadrature::X => "X",
            Quadrature::P => "P",
        })
    }
}

impl FromStr for Quadrature {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "X" | "x" => Ok(Quadrature::X),
            "P" | "p" => Ok(Quadrature::P),
            other => Err(Error::InvalidValue {
                what: "quadrature".into(),
                reason: format!("`{other}` is not X or P"),
            }),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AmplifierMode {
    PhasePreserving,
    PhaseSensitive { input: Quadrature, output: Quadrature },
}

#[derive(Debug, Clone, PartialEq)]
pub struct NoiseReport {
    pub omega: f64,
    /// Symmetrized spectrum of every output channel (annihilation component).
    pub output_spectra: Vec<f64>,
    /// Spectrum of the chosen output quadrature, for phase-sensitive reports.
    pub quadrature_spectrum: Option<f64>,
    pub gain: f64,
    pub added_noise: f64,
    /// `S − 1/2` for every output channel.
    pub output_occupancy: Vec<f64>,
}

fn occupation_of(s: &ScatteringResult, column: usize) -> f64 {
    let m = s.num_channels();
    let ch = ChannelComponent::from_index(s.basis, column, m).channel();
    s.channels[ch].occupation
}

/// `Σ_c |s_rc|² (n_c + 1/2)` over every input component of `s`, optionally treating one
/// channel as vacuum.
fn spectrum_row(s: &ScatteringResult, output: ChannelComponent, vacuum_channel: Option<usize>) -> Result<f64> {
    let m = s.num_channels();
    if output.channel() >= m {
        return Err(Error::IndexOutOfRange {
            what: "channel".into(),
            index: output.channel(),
            len: m,
        });
    }
    let row = output.index(m);
    let mut total = 0.0;
    for col in 0..2 * m {
        let ch = ChannelComponent::from_index(s.basis, col, m).channel();
        let n = if Some(ch) == vacuum_channel { 0.0 } else { occupation_of(s, col) };
        total += s.matrix[(row, col)].norm_sqr() * (n + 0.5);
    }
    Ok(total)
}

/// Symmetrized spectrum of one output component from a precomputed scattering matrix.
pub fn spectrum_from(s: &ScatteringResult, output: ChannelComponent) -> Result<f64> {
    let s = s.to_basis(output.basis());
    spectrum_row(&s, output, None)
}

/// Gain and added noise from a precomputed scattering matrix (doubled basis or either).
pub fn added_noise_from(s: &ScatteringResult, signal: usize, output: usize, mode: AmplifierMode) -> Result<(f64, f64)> {
    let m = s.num_channels();
    for ch in [signal, output] {
        if ch >= m {
            return Err(Error::IndexOutOfRange {
                what: "channel".into(),
                index: ch,
                len: m,
            });
        }
    }
    let (s, row, gain) = match mode {
        AmplifierMode::PhasePreserving => {
            let s = s.to_basis(Basis::Doubled);
            let row = ChannelComponent::Annihilation(output);
            let gain = s.element(row, ChannelComponent::Annihilation(signal))?.norm_sqr()
                + s.element(row, ChannelComponent::Creation(signal))?.norm_sqr();
            (s, row, gain)
        }
        AmplifierMode::PhaseSensitive { input, output: out_q } => {
            let s = s.to_basis(Basis::Quadrature);
            let row = out_q.component(output);
            let gain = s.element(row, input.component(signal))?.norm_sqr();
            (s, row, gain)
        }
    };
    if !(gain > MIN_GAIN) {
        return Err(Error::ZeroGain);
    }
    let total = spectrum_row(&s, row, Some(signal))?;
    Ok((gain, (total - gain / 2.0) / gain))
}

fn stable_system(network: &LinearNetwork) -> Result<DriftSystem> {
    let report = stability(network);
    if !report.stable {
        return Err(Error::UnstableNetwork { margin: report.margin });
    }
    Ok(drift_matrix(network))
}

/// Symmetrized output spectrum `S[ω]` of a channel, in quanta. With `quadrature` the
/// spectrum of that output quadrature is returned instead of the annihilation component.
pub fn output_spectrum(network: &LinearNetwork, omega: f64, channel: usize, quadrature: Option<Quadrature>) -> Result<f64> {
    let sys = stable_system(network)?;
    let basis = if quadrature.is_some() { Basis::Quadrature } else { Basis::Doubled };
    let s = sys.scattering(omega, basis)?;
    let comp = match quadrature {
        Some(q) => q.component(channel),
        None => ChannelComponent::Annihilation(channel),
    };
    spectrum_row(&s, comp, None)
}

/// Noise added by an amplifier from `signal` to `output`, referred to the input in quanta.
pub fn added_noise(network: &LinearNetwork, omega: f64, signal: usize, output: usize, mode: AmplifierMode) -> Result<f64> {
    let sys = stable_system(network)?;
    let s = sys.scattering(omega, Basis::Doubled)?;
    added_noise_from(&s, signal, output, mode).map(|(_, n)| n)
}

/// Effective thermal occupancy `S − 1/2` of an output channel.
pub fn output_occupancy(network: &LinearNetwork, omega: f64, channel: usize, quadrature: Option<Quadrature>) -> Result<f64> {
    output_spectrum(network, omega, channel, quadrature).map(|s| s - 0.5)
}

/// Full report at one frequency.
pub fn noise_report(network: &LinearNetwork, omega: f64, signal: usize, output: usize, mode: AmplifierMode) -> Result<NoiseReport> {
    let sys = stable_system(network)?;
    report_from_system(&sys, omega, signal, output, mode)
}

pub(crate) fn report_from_system(
    sys: &DriftSystem,
    omega: f64,
    signal: usize,
    output: usize,
    mode: AmplifierMode,
) -> Result<NoiseReport> {
    let s = sys.scattering(omega, Basis::Doubled)?;
    let m = s.num_channels();
    let output_spectra = (0..m)
        .map(|c| spectrum_row(&s, ChannelComponent::Annihilation(c), None))
        .collect::<Result<Vec<_>>>()?;
    let quadrature_spectrum = match mode {
        AmplifierMode::PhasePreserving => None,
        AmplifierMode::PhaseSensitive { output: q, .. } => Some(spectrum_from(&s, q.component(output))?),
    };
    let (gain, added) = added_noise_from(&s, signal, output, mode)?;
    Ok(NoiseReport {
        omega,
        output_occupancy: output_spectra.iter().map(|x| x - 0.5).collect(),
        output_spectra,
        quadrature_spectrum,
        gain,
        added_noise: added,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::{c, CollectiveDissipator};

    #[test]
    fn bare_cavity_vacuum_floor() {
        let net = LinearNetwork::builder().mode("a").port(0, 1.0).build().unwrap();
        for w in [-2.0, 0.0, 0.3] {
            assert!((output_spectrum(&net, w, 0, None).unwrap() - 0.5).abs() < 1e-14);
            assert!((output_spectrum(&net, w, 0, Some(Quadrature::P)).unwrap() - 0.5).abs() < 1e-14);
            assert!(output_occupancy(&net, w, 0, None).unwrap().abs() < 1e-14);
        }
    }

    #[test]
    fn thermal_port_reflects_its_occupation() {
        let net = LinearNetwork::builder().mode("a").thermal_port(0, 1.0, 4.0).build().unwrap();
        assert!((output_occupancy(&net, 0.2, 0, None).unwrap() - 4.0).abs() < 1e-12);
    }

    #[test]
    fn unstable_network_is_rejected() {
        let net = LinearNetwork::builder()
            .modes(["a", "b"])
            .squeezing(0, 1, c(1.0, 0.0))
            .port(0, 1.0)
            .port(1, 1.0)
            .build()
            .unwrap();
        assert!(matches!(output_spectrum(&net, 0.0, 0, None), Err(Error::UnstableNetwork { .. })));
    }

    #[test]
    fn zero_gain_is_an_error() {
        let net = LinearNetwork::builder()
            .modes(["a", "b"])
            .port(0, 1.0)
            .port(1, 1.0)
            .build()
            .unwrap();
        assert_eq!(
            added_noise(&net, 0.0, 0, 1, AmplifierMode::PhasePreserving).unwrap_err(),
            Error::ZeroGain
        );
    }

    #[test]
    fn passive_attenuator_adds_noise() {
        // isolator with Γ = 3κ transmits 3/4 in amplitude; the loss shows up as added noise
        let net = LinearNetwork::builder()
            .modes(["d1", "d2"])
            .beam_splitter(0, 1, c(0.0, 1.5))
            .dissipator(CollectiveDissipator::lowering(3.0, vec![c(1.0, 0.0), c(1.0, 0.0)]))
            .port(0, 1.0)
            .port(1, 1.0)
            .build()
            .unwrap();
        let g: f64 = 0.75f64.powi(2);
        let n = added_noise(&net, 0.0, 0, 1, AmplifierMode::PhasePreserving).unwrap();
        assert!((n - 0.5 * (1.0 - g) / g).abs() < 1e-12);
    }
}
