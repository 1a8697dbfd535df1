//! Parameterized constructors for the isolator and amplifier designs, their closed-form
//! reference curves, and the waveguide-mediated reservoir.

mod reference;
mod waveguide;

pub use reference::{reference_curves, ReferenceCurves};
pub use waveguide::{fit_induced_couplings, induced_couplings, waveguide_network, waveguide_scattering};

use std::f64::consts::FRAC_1_SQRT_2;

use crate::directionality::{dpa_sqrt_gain, impedance_conditions, ImpedanceConditions, ImpedanceDevice};
use crate::error::{Error, Result};
use crate::network::{c, CoherentCoupling, CollectiveDissipator, LinearNetwork, Mode, Port, C64};
use crate::noise::Quadrature;

/// Device parameters. Rates are in units of the principal-cavity `κ` by convention but
/// any consistent unit works. Optional fields default to their impedance-matching values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DeviceParams {
    /// Two cavities with `Γ L[d₁ + d₂]`; `gamma = None` means `Γ = κ`.
    IsolatorReduced { gamma: Option<f64>, kappa: f64 },
    /// Two cavities coupled to an auxiliary mode `c` by `J′ c†(d₁ + d₂) + h.c.`, so that
    /// `Γ = 4J′²/κ′`; `j_prime = None` means `Γ = κ`.
    IsolatorThreeMode { j_prime: Option<f64>, kappa: f64, kappa_aux: f64 },
    /// Two cavities with `Γ L[√2(cos θ d₁ + sin θ d₂†)]`; `theta = None` means
    /// `cos²θ = 1/(2C)`.
    NdpaReduced { theta: Option<f64>, gamma: f64, kappa: f64 },
    /// Auxiliary-mode version with `√2 λ′ c†(cos θ d₁ + sin θ d₂†) + h.c.`, `Γ = 4λ′²/κ′`.
    NdpaThreeMode { lambda_prime: f64, theta: Option<f64>, kappa: f64, kappa_aux: f64 },
    /// QND amplifier: `λ P₁X₂` balanced by `Γ L[X₂ + iP₁]` with `Γ = λ`.
    DpaReduced { lambda_qnd: f64, kappa: f64 },
    /// Auxiliary-mode QND amplifier at cooperativity `C̄` and asymmetry `α`; `theta = None`
    /// means `sin 2θ = 1/C̄`, `alpha = None` means `α = 1/G_φ`.
    DpaAux { cbar: f64, alpha: Option<f64>, theta: Option<f64>, kappa: f64, kappa_aux: f64 },
    /// Two cavities side-coupled to a waveguide at separation phase `k₀l` and delay `τ`.
    /// As a [`LinearNetwork`] this is the Markovian limit; see [`waveguide_scattering`].
    WaveguidePair { gamma: f64, k0l: f64, kappa: f64, tau: f64 },
}

impl DeviceParams {
    pub fn name(&self) -> &'static str {
        match self {
            DeviceParams::IsolatorReduced { .. } => "isolator",
            DeviceParams::IsolatorThreeMode { .. } => "isolator-3mode",
            DeviceParams::NdpaReduced { .. } => "ndpa",
            DeviceParams::NdpaThreeMode { .. } => "ndpa-3mode",
            DeviceParams::DpaReduced { .. } => "dpa",
            DeviceParams::DpaAux { .. } => "dpa-aux",
            DeviceParams::WaveguidePair { .. } => "waveguide",
        }
    }

    /// Impedance-matched reduced NDPA at cooperativity `C = Γ/κ`.
    pub fn ndpa(cooperativity: f64, kappa: f64) -> Self {
        DeviceParams::NdpaReduced {
            theta: None,
            gamma: cooperativity * kappa,
            kappa,
        }
    }

    /// Impedance-matched three-mode NDPA at cooperativity `C = 4λ′²/(κκ′)`.
    pub fn ndpa_three_mode(cooperativity: f64, kappa: f64, kappa_aux: f64) -> Self {
        DeviceParams::NdpaThreeMode {
            lambda_prime: (cooperativity * kappa * kappa_aux).sqrt() / 2.0,
            theta: None,
            kappa,
            kappa_aux,
        }
    }

    /// Impedance-matched, noise-nulled auxiliary-mode QND amplifier.
    pub fn dpa_aux(cbar: f64, kappa: f64, kappa_aux: f64) -> Self {
        DeviceParams::DpaAux {
            cbar,
            alpha: None,
            theta: None,
            kappa,
            kappa_aux,
        }
    }

    fn validate(&self) -> Result<()> {
        let positive = |what: &str, x: f64| {
            if x > 0.0 && x.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidValue {
                    what: what.into(),
                    reason: format!("{x} is not a positive rate"),
                })
            }
        };
        let angle = |t: Option<f64>| match t {
            Some(t) if !(0.0..=std::f64::consts::FRAC_PI_2).contains(&t) => Err(Error::InvalidValue {
                what: "theta".into(),
                reason: format!("{t} is outside [0, π/2]"),
            }),
            _ => Ok(()),
        };
        match *self {
            DeviceParams::IsolatorReduced { gamma, kappa } => {
                positive("kappa", kappa)?;
                if let Some(g) = gamma {
                    positive("gamma", g)?;
                }
            }
            DeviceParams::IsolatorThreeMode { j_prime, kappa, kappa_aux } => {
                positive("kappa", kappa)?;
                positive("kappa_aux", kappa_aux)?;
                if let Some(j) = j_prime {
                    positive("j_prime", j)?;
                }
            }
            DeviceParams::NdpaReduced { theta, gamma, kappa } => {
                positive("kappa", kappa)?;
                positive("gamma", gamma)?;
                angle(theta)?;
            }
            DeviceParams::NdpaThreeMode {
                lambda_prime,
                theta,
                kappa,
                kappa_aux,
            } => {
                positive("kappa", kappa)?;
                positive("kappa_aux", kappa_aux)?;
                positive("lambda_prime", lambda_prime)?;
                angle(theta)?;
            }
            DeviceParams::DpaReduced { lambda_qnd, kappa } => {
                positive("kappa", kappa)?;
                positive("lambda_qnd", lambda_qnd)?;
            }
            DeviceParams::DpaAux {
                cbar,
                alpha,
                theta,
                kappa,
                kappa_aux,
            } => {
                positive("kappa", kappa)?;
                positive("kappa_aux", kappa_aux)?;
                positive("cbar", cbar)?;
                if let Some(a) = alpha {
                    positive("alpha", a)?;
                }
                angle(theta)?;
            }
            DeviceParams::WaveguidePair { gamma, k0l, kappa, tau } => {
                positive("kappa", kappa)?;
                if !(gamma >= 0.0) || !gamma.is_finite() {
                    return Err(Error::InvalidValue {
                        what: "gamma".into(),
                        reason: format!("{gamma} is negative"),
                    });
                }
                if !(tau >= 0.0) || !tau.is_finite() || !k0l.is_finite() {
                    return Err(Error::InvalidValue {
                        what: "tau".into(),
                        reason: format!("{tau} must be a finite non-negative delay"),
                    });
                }
            }
        }
        Ok(())
    }
}

/// Angle `θ` of the NDPA jump operator, from the impedance condition when not given.
pub(crate) fn ndpa_theta(theta: Option<f64>, cooperativity: f64) -> Result<f64> {
    match theta {
        Some(t) => Ok(t),
        None => match impedance_conditions(ImpedanceDevice::Ndpa { cooperativity })? {
            ImpedanceConditions::Ndpa { theta, .. } => Ok(theta),
            _ => unreachable!(),
        },
    }
}

/// Resolved `(θ, α, √G_φ)` of the auxiliary-mode QND amplifier.
pub(crate) fn dpa_angles(cbar: f64, alpha: Option<f64>, theta: Option<f64>) -> Result<(f64, f64)> {
    let theta = match theta {
        Some(t) => t,
        None => match impedance_conditions(ImpedanceDevice::Dpa { cooperativity: cbar })? {
            ImpedanceConditions::Dpa { theta, .. } => theta,
            _ => unreachable!(),
        },
    };
    let alpha = alpha.unwrap_or_else(|| 1.0 / dpa_sqrt_gain(cbar).powi(2));
    Ok((theta, alpha))
}

/// Adds `coef · q_a q_b` (`a != b`) to the coupling matrices, where `q` is the `X` or `P`
/// quadrature of a mode.
pub fn add_quadrature_coupling(
    coupling: &mut CoherentCoupling,
    coef: f64,
    a: (usize, Quadrature),
    b: (usize, Quadrature),
) {
    assert_ne!(a.0, b.0, "quadrature products on the same mode are not bilinear couplings");
    // q = α d + β d†
    let ab = |q: Quadrature| match q {
        Quadrature::X => (c(FRAC_1_SQRT_2, 0.0), c(FRAC_1_SQRT_2, 0.0)),
        Quadrature::P => (c(0.0, -FRAC_1_SQRT_2), c(0.0, FRAC_1_SQRT_2)),
    };
    let (alpha_a, beta_a) = ab(a.1);
    let (alpha_b, beta_b) = ab(b.1);
    let (i, j) = (a.0, b.0);
    coupling.beam_splitter[(i, j)] += coef * beta_a * alpha_b;
    coupling.beam_splitter[(j, i)] += coef * alpha_a * beta_b;
    let l = coef * beta_a * beta_b;
    coupling.squeezing[(i, j)] += l;
    coupling.squeezing[(j, i)] += l;
}

fn modes(labels: &[&str]) -> Vec<Mode> {
    labels
        .iter()
        .enumerate()
        .map(|(index, l)| Mode {
            label: l.to_string(),
            index,
        })
        .collect()
}

fn zero() -> C64 {
    c(0.0, 0.0)
}

/// Builds the device network. With `matched`, the coherent couplings that balance the
/// engineered dissipation are included (the directionality condition); without it only the
/// dissipative part is present, which is reciprocal.
pub fn make_device(params: &DeviceParams, matched: bool) -> Result<LinearNetwork> {
    params.validate()?;
    let i = c(0.0, 1.0);
    let net = match *params {
        DeviceParams::IsolatorReduced { gamma, kappa } => {
            let gamma = gamma.unwrap_or(kappa);
            let mut coupling = CoherentCoupling::zeros(2);
            if matched {
                coupling.set_beam_splitter(0, 1, i * gamma / 2.0);
            }
            LinearNetwork::new(
                modes(&["d1", "d2"]),
                coupling,
                vec![CollectiveDissipator::lowering(gamma, vec![c(1.0, 0.0), c(1.0, 0.0)])],
                vec![Port::new(0, kappa), Port::new(1, kappa)],
            )?
        }
        DeviceParams::IsolatorThreeMode { j_prime, kappa, kappa_aux } => {
            let jp = j_prime.unwrap_or_else(|| (kappa * kappa_aux).sqrt() / 2.0);
            let gamma = 4.0 * jp * jp / kappa_aux;
            let mut coupling = CoherentCoupling::zeros(3);
            coupling.set_beam_splitter(2, 0, c(jp, 0.0));
            coupling.set_beam_splitter(2, 1, c(jp, 0.0));
            if matched {
                coupling.set_beam_splitter(0, 1, i * gamma / 2.0);
            }
            LinearNetwork::new(
                modes(&["d1", "d2", "c"]),
                coupling,
                vec![],
                vec![Port::new(0, kappa), Port::new(1, kappa), Port::new(2, kappa_aux)],
            )?
        }
        DeviceParams::NdpaReduced { theta, gamma, kappa } => {
            let theta = ndpa_theta(theta, gamma / kappa)?;
            let r2 = 2f64.sqrt();
            let mut coupling = CoherentCoupling::zeros(2);
            if matched {
                coupling.set_squeezing(0, 1, i * gamma * (2.0 * theta).sin() / 2.0);
            }
            LinearNetwork::new(
                modes(&["d1", "d2"]),
                coupling,
                vec![CollectiveDissipator::new(
                    gamma,
                    vec![c(r2 * theta.cos(), 0.0), zero()],
                    vec![zero(), c(r2 * theta.sin(), 0.0)],
                )],
                vec![Port::new(0, kappa), Port::new(1, kappa)],
            )?
        }
        DeviceParams::NdpaThreeMode {
            lambda_prime,
            theta,
            kappa,
            kappa_aux,
        } => {
            let gamma = 4.0 * lambda_prime * lambda_prime / kappa_aux;
            let theta = ndpa_theta(theta, gamma / kappa)?;
            let g = 2f64.sqrt() * lambda_prime;
            let mut coupling = CoherentCoupling::zeros(3);
            coupling.set_beam_splitter(2, 0, c(g * theta.cos(), 0.0));
            coupling.set_squeezing(2, 1, c(g * theta.sin(), 0.0));
            if matched {
                coupling.set_squeezing(0, 1, i * gamma * (2.0 * theta).sin() / 2.0);
            }
            LinearNetwork::new(
                modes(&["d1", "d2", "c"]),
                coupling,
                vec![],
                vec![Port::new(0, kappa), Port::new(1, kappa), Port::new(2, kappa_aux)],
            )?
        }
        DeviceParams::DpaReduced { lambda_qnd, kappa } => {
            let mut coupling = CoherentCoupling::zeros(2);
            if matched {
                add_quadrature_coupling(&mut coupling, lambda_qnd, (0, Quadrature::P), (1, Quadrature::X));
            }
            // z = X₂ + iP₁
            let h = FRAC_1_SQRT_2;
            LinearNetwork::new(
                modes(&["d1", "d2"]),
                coupling,
                vec![CollectiveDissipator::new(
                    lambda_qnd,
                    vec![c(h, 0.0), c(h, 0.0)],
                    vec![c(-h, 0.0), c(h, 0.0)],
                )],
                vec![Port::new(0, kappa), Port::new(1, kappa)],
            )?
        }
        DeviceParams::DpaAux {
            cbar,
            alpha,
            theta,
            kappa,
            kappa_aux,
        } => {
            let (theta, alpha) = dpa_angles(cbar, alpha, theta)?;
            let lu = (cbar * kappa * kappa_aux / (4.0 * alpha.sqrt())).sqrt();
            let lv = lu * alpha.sqrt();
            let r2 = 2f64.sqrt();
            let (s, co) = theta.sin_cos();
            let mut coupling = CoherentCoupling::zeros(3);
            let (x, p) = (Quadrature::X, Quadrature::P);
            add_quadrature_coupling(&mut coupling, r2 * lu * s, (2, x), (0, x));
            add_quadrature_coupling(&mut coupling, r2 * lu * co, (2, x), (1, x));
            add_quadrature_coupling(&mut coupling, r2 * lv * co, (2, p), (0, p));
            add_quadrature_coupling(&mut coupling, r2 * lv * s, (2, p), (1, p));
            if matched {
                add_quadrature_coupling(&mut coupling, kappa * cbar * co * co, (0, p), (1, x));
                add_quadrature_coupling(&mut coupling, -kappa * cbar * s * s, (1, p), (0, x));
            }
            LinearNetwork::new(
                modes(&["d1", "d2", "c"]),
                coupling,
                vec![],
                vec![Port::new(0, kappa), Port::new(1, kappa), Port::new(2, kappa_aux)],
            )?
        }
        DeviceParams::WaveguidePair { gamma, k0l, kappa, tau } => {
            let _ = tau;
            waveguide_network(gamma, k0l, kappa, matched)?
        }
    };
    Ok(net)
}

/// Copy of `network` with the occupation of one port replaced.
pub fn with_port_occupation(network: &LinearNetwork, port: usize, occupation: f64) -> Result<LinearNetwork> {
    let mut ports = network.ports().to_vec();
    let len = ports.len();
    let p = ports.get_mut(port).ok_or(Error::IndexOutOfRange {
        what: "port".into(),
        index: port,
        len,
    })?;
    p.occupation = occupation;
    network.with_ports(ports)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::langevin::{scattering_matrix, stability, Basis};

    fn close(a: C64, b: C64, tol: f64) -> bool {
        (a - b).norm() < tol
    }

    #[test]
    fn quadrature_products_match_hand_expansion() {
        let mut cc = CoherentCoupling::zeros(2);
        add_quadrature_coupling(&mut cc, 2.0, (0, Quadrature::P), (1, Quadrature::X));
        assert!(close(cc.beam_splitter[(0, 1)], c(0.0, 1.0), 1e-15));
        assert!(close(cc.beam_splitter[(1, 0)], c(0.0, -1.0), 1e-15));
        assert!(close(cc.squeezing[(0, 1)], c(0.0, 1.0), 1e-15));

        let mut cc = CoherentCoupling::zeros(2);
        add_quadrature_coupling(&mut cc, 1.0, (1, Quadrature::P), (0, Quadrature::X));
        assert!(close(cc.beam_splitter[(0, 1)], c(0.0, -0.5), 1e-15));
        assert!(close(cc.squeezing[(0, 1)], c(0.0, 0.5), 1e-15));
    }

    #[test]
    fn matched_isolator_device() {
        let net = make_device(&DeviceParams::IsolatorReduced { gamma: None, kappa: 1.0 }, true).unwrap();
        let s = scattering_matrix(&net, 0.0, Basis::Doubled).unwrap().block(&[0, 1]);
        assert!(close(s[(1, 0)], c(1.0, 0.0), 1e-12));
        assert!(s[(0, 1)].norm() < 1e-12 && s[(0, 0)].norm() < 1e-12 && s[(1, 1)].norm() < 1e-12);
    }

    #[test]
    fn ndpa_gain_at_095() {
        let net = make_device(&DeviceParams::ndpa(0.95, 1.0), true).unwrap();
        let s = scattering_matrix(&net, 0.0, Basis::Doubled).unwrap();
        // amplification runs d1 → d2†
        let g = s.matrix[(s.num_channels() + 1, 0)].norm_sqr();
        assert!((g - 360.0).abs() < 360.0 * 1e-10);
        assert!(stability(&net).stable);
    }

    #[test]
    fn dpa_reduced_gain() {
        let net = make_device(&DeviceParams::DpaReduced { lambda_qnd: 0.5, kappa: 1.0 }, true).unwrap();
        let s = scattering_matrix(&net, 0.0, Basis::Quadrature).unwrap();
        assert!(close(s.matrix[(3, 1)], c(4.0, 0.0), 1e-12));
        for j in 0..4 {
            assert!(close(s.matrix[(j, j)], c(-1.0, 0.0), 1e-12));
        }
        let r = reference_curves(&DeviceParams::DpaReduced { lambda_qnd: 0.5, kappa: 1.0 }).unwrap();
        for w in [0.3, 1.0, 2.5] {
            let s = scattering_matrix(&net, w, Basis::Quadrature).unwrap();
            assert!((s.matrix[(3, 1)].norm_sqr() - r.forward_gain(w)).abs() < 1e-12);
        }
    }

    #[test]
    fn infeasible_and_invalid_parameters() {
        assert!(matches!(
            make_device(&DeviceParams::ndpa(0.4, 1.0), true),
            Err(Error::InfeasibleCooperativity { .. })
        ));
        assert!(matches!(
            make_device(&DeviceParams::dpa_aux(0.5, 1.0, 100.0), true),
            Err(Error::InfeasibleCooperativity { .. })
        ));
        assert!(make_device(&DeviceParams::IsolatorReduced { gamma: Some(-1.0), kappa: 1.0 }, true).is_err());
    }
}
