//! Closed-form gain, reverse-gain and added-noise curves of the matched devices.

use super::{dpa_angles, DeviceParams};
use crate::directionality::{dpa_sqrt_gain, ndpa_gain};
use crate::error::{Error, Result};

/// Reference curves of an impedance-matched, directional device. `kappa_aux = ∞` for the
/// reduced (Markovian) models.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ReferenceCurves {
    Isolator {
        kappa: f64,
        kappa_aux: f64,
    },
    Ndpa {
        cooperativity: f64,
        kappa: f64,
        kappa_aux: f64,
    },
    /// QND amplifier with a Markovian reservoir: both cavities keep linewidth `κ`.
    DpaReduced {
        sqrt_gain: f64,
        kappa: f64,
    },
    Dpa {
        /// Zero-frequency amplitude gain `√G_φ`.
        sqrt_gain: f64,
        alpha: f64,
        kappa: f64,
        kappa_aux: f64,
    },
}

pub fn reference_curves(params: &DeviceParams) -> Result<ReferenceCurves> {
    let inf = f64::INFINITY;
    Ok(match *params {
        DeviceParams::IsolatorReduced { kappa, .. } => ReferenceCurves::Isolator { kappa, kappa_aux: inf },
        DeviceParams::IsolatorThreeMode { kappa, kappa_aux, .. } => ReferenceCurves::Isolator { kappa, kappa_aux },
        DeviceParams::NdpaReduced { gamma, kappa, .. } => ReferenceCurves::Ndpa {
            cooperativity: gamma / kappa,
            kappa,
            kappa_aux: inf,
        },
        DeviceParams::NdpaThreeMode {
            lambda_prime,
            kappa,
            kappa_aux,
            ..
        } => ReferenceCurves::Ndpa {
            cooperativity: 4.0 * lambda_prime * lambda_prime / (kappa * kappa_aux),
            kappa,
            kappa_aux,
        },
        DeviceParams::DpaReduced { lambda_qnd, kappa } => ReferenceCurves::DpaReduced {
            sqrt_gain: 8.0 * lambda_qnd / kappa,
            kappa,
        },
        DeviceParams::DpaAux {
            cbar,
            alpha,
            theta,
            kappa,
            kappa_aux,
        } => {
            let (_, alpha) = dpa_angles(cbar, alpha, theta)?;
            ReferenceCurves::Dpa {
                sqrt_gain: dpa_sqrt_gain(cbar),
                alpha,
                kappa,
                kappa_aux,
            }
        }
        DeviceParams::WaveguidePair { .. } => {
            return Err(Error::InvalidValue {
                what: "device".into(),
                reason: "no closed-form reference curves for the waveguide pair".into(),
            })
        }
    })
}

/// Denominator shared by the auxiliary-mode isolator and QND amplifier curves.
fn aux_denominator(w: f64, kappa: f64, kappa_aux: f64) -> f64 {
    let x = w / kappa;
    let y2 = if kappa_aux.is_finite() { (w / kappa_aux).powi(2) } else { 0.0 };
    let cross = if kappa_aux.is_finite() {
        4.0 * w.powi(4) / (kappa.powi(3) * kappa_aux)
    } else {
        0.0
    };
    (1.0 + x * x).powi(2) + y2 * (1.0 + 4.0 * x.powi(4)) - cross
}

fn ratio_sq(w: f64, kappa_aux: f64) -> f64 {
    if kappa_aux.is_finite() {
        (w / kappa_aux).powi(2)
    } else {
        0.0
    }
}

impl ReferenceCurves {
    /// Forward power transmission: `|s₂₁|²` (isolator), `G[ω]` (NDPA) or `G_φ[ω]` (QND amplifier).
    pub fn forward_gain(&self, w: f64) -> f64 {
        match *self {
            ReferenceCurves::Isolator { kappa, kappa_aux } => {
                (1.0 + ratio_sq(w, kappa_aux)) / aux_denominator(w, kappa, kappa_aux)
            }
            ReferenceCurves::Ndpa { cooperativity: c, kappa, .. } => {
                let x2 = (w / kappa).powi(2);
                (2.0 * c - 1.0) / ((x2 + 1.0) * ((c - 1.0).powi(2) + x2))
            }
            ReferenceCurves::DpaReduced { sqrt_gain, kappa } => {
                sqrt_gain.powi(2) / (1.0 + (2.0 * w / kappa).powi(2)).powi(2)
            }
            ReferenceCurves::Dpa {
                sqrt_gain,
                kappa,
                kappa_aux,
                ..
            } => sqrt_gain.powi(2) * (1.0 + ratio_sq(w, kappa_aux)) / aux_denominator(w, kappa, kappa_aux),
        }
    }

    /// Reverse power transmission: `|s₁₂|²`, `Ḡ[ω] ≈ G[ω] ω²/κ′²`, or `Ḡ_φ[ω]`.
    pub fn reverse_gain(&self, w: f64) -> f64 {
        match *self {
            ReferenceCurves::Isolator { kappa, kappa_aux } => ratio_sq(w, kappa_aux) / aux_denominator(w, kappa, kappa_aux),
            ReferenceCurves::Ndpa { kappa_aux, .. } => self.forward_gain(w) * ratio_sq(w, kappa_aux),
            ReferenceCurves::DpaReduced { .. } => 0.0,
            ReferenceCurves::Dpa {
                sqrt_gain,
                kappa,
                kappa_aux,
                ..
            } => sqrt_gain.powi(2) * ratio_sq(w, kappa_aux) / aux_denominator(w, kappa, kappa_aux),
        }
    }

    /// Added noise in quanta, given the occupation of the second cavity's input (`n2`) and of
    /// the reservoir (`nc`). The NDPA formula is only available at `ω = 0`; the QND
    /// amplifier formula is its Markovian-limit expression.
    pub fn added_noise(&self, w: f64, n2: f64, nc: f64) -> Option<f64> {
        match *self {
            ReferenceCurves::Isolator { .. } | ReferenceCurves::DpaReduced { .. } => None,
            ReferenceCurves::Ndpa { cooperativity, .. } => {
                (w == 0.0).then(|| (0.5 + n2) * (1.0 + 1.0 / ndpa_gain(cooperativity)))
            }
            ReferenceCurves::Dpa {
                sqrt_gain,
                alpha,
                kappa,
                ..
            } => {
                let g = sqrt_gain.powi(2);
                let x2 = (w / kappa).powi(2);
                Some(x2 * ((nc + 0.5) / (g * alpha).sqrt() + (1.0 + x2) * (n2 + 0.5) / g))
            }
        }
    }

    /// Zero-frequency forward gain.
    pub fn zero_frequency_gain(&self) -> f64 {
        self.forward_gain(0.0)
    }
}
