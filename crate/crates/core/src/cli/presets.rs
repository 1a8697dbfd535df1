//! Named device presets and `--param` handling.
//!
//! Every rate is in units of the principal cavity damping `κ = 1`.

use std::f64::consts::PI;

use crate::devices::{make_device, reference_curves, DeviceParams, ReferenceCurves};
use crate::directionality::FreeParameter;
use crate::error::{Error, Result};
use crate::langevin::ChannelComponent;
use crate::network::{CoherentCoupling, LinearNetwork, C64};
use crate::noise::{AmplifierMode, Quadrature};

/// `NAME=VALUE` with a real (`1.5`) or complex (`0.5,-1`) value.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamAssignment {
    pub name: String,
    pub value: C64,
}

impl std::str::FromStr for ParamAssignment {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = |reason: &str| Error::InvalidValue {
            what: format!("--param `{s}`"),
            reason: reason.into(),
        };
        let (name, value) = s.split_once('=').ok_or_else(|| bad("expected NAME=VALUE"))?;
        let num = |x: &str| x.trim().parse::<f64>().map_err(|_| bad("value is not a number"));
        let value = match value.split_once(',') {
            Some((re, im)) => C64::new(num(re)?, num(im)?),
            None => C64::new(num(value)?, 0.0),
        };
        Ok(ParamAssignment {
            name: name.trim().to_string(),
            value,
        })
    }
}

/// Parameter names, defaults and descriptions of one preset. `None` defaults are derived
/// from the matching conditions.
pub struct PresetInfo {
    pub name: &'static str,
    pub description: &'static str,
    pub params: &'static [(&'static str, Option<f64>, &'static str)],
}

pub const PRESETS: &[PresetInfo] = &[
    PresetInfo {
        name: "isolator",
        description: "two cavities, collective loss d1 + d2 balanced by hopping J = iΓ/2",
        params: &[("gamma", Some(1.0), "engineered dissipation rate Γ")],
    },
    PresetInfo {
        name: "isolator-3mode",
        description: "isolator whose dissipation is mediated by a damped auxiliary mode c",
        params: &[
            ("kappa_aux", Some(100.0), "auxiliary damping κ′"),
            ("j_prime", None, "auxiliary hopping J′ (default √(κκ′)/2, i.e. Γ = κ)"),
        ],
    },
    PresetInfo {
        name: "ndpa",
        description: "non-degenerate parametric amplifier, dissipator √2(cosθ d1 + sinθ d2†)",
        params: &[
            ("C", Some(0.95), "cooperativity Γ/κ"),
            ("theta", None, "mixing angle (default from cos²θ = 1/(2C))"),
        ],
    },
    PresetInfo {
        name: "ndpa-3mode",
        description: "NDPA with the dissipator mediated by an auxiliary mode",
        params: &[
            ("C", Some(0.95), "cooperativity 4λ′²/(κκ′)"),
            ("kappa_aux", Some(100.0), "auxiliary damping κ′"),
            ("theta", None, "mixing angle (default from cos²θ = 1/(2C))"),
        ],
    },
    PresetInfo {
        name: "dpa",
        description: "QND phase-sensitive amplifier, dissipator X2 + iP1",
        params: &[("lambda_qnd", Some(0.5), "QND coupling λ_QND")],
    },
    PresetInfo {
        name: "dpa-aux",
        description: "QND amplifier built from an auxiliary mode with asymmetric couplings",
        params: &[
            ("cbar", Some(2.0), "cooperativity 4Λ_UΛ_V/(κκ′)"),
            ("kappa_aux", Some(100.0), "auxiliary damping κ′"),
            ("alpha", None, "asymmetry (Λ_V/Λ_U)² (default nulls the added noise)"),
            ("theta", None, "angle (default from sin2θ = 1/C̄)"),
        ],
    },
    PresetInfo {
        name: "waveguide",
        description: "two cavities side-coupled to a waveguide, Markovian network for everything but sweeps",
        params: &[
            ("gamma", Some(1.0), "waveguide coupling Γ"),
            ("k0l", Some(2.0 * PI), "propagation phase k₀l in radians"),
            ("tau", Some(1e-4), "propagation delay τ"),
        ],
    },
];

/// A resolved preset: device parameters, the built network and the parameter values used.
#[derive(Debug, Clone)]
pub struct Preset {
    pub device: DeviceParams,
    pub matched: bool,
    pub network: LinearNetwork,
    pub values: Vec<(String, f64)>,
    /// Assignments not consumed by the preset, applied to the network afterwards.
    pub extra: Vec<ParamAssignment>,
}

fn info(name: &str) -> Result<&'static PresetInfo> {
    PRESETS.iter().find(|p| p.name == name).ok_or_else(|| Error::InvalidValue {
        what: "preset".into(),
        reason: format!(
            "unknown preset `{name}` (available: {})",
            PRESETS.iter().map(|p| p.name).collect::<Vec<_>>().join(", ")
        ),
    })
}

impl Preset {
    pub fn new(name: &str, assignments: &[ParamAssignment]) -> Result<Self> {
        let info = info(name)?;
        let mut values: Vec<(String, Option<f64>)> = info.params.iter().map(|&(n, d, _)| (n.to_string(), d)).collect();
        let mut matched = true;
        let mut extra = Vec::new();
        for a in assignments {
            if a.name == "matched" {
                matched = a.value.re != 0.0;
            } else if let Some(slot) = values.iter_mut().find(|(n, _)| *n == a.name) {
                if a.value.im != 0.0 {
                    return Err(Error::InvalidValue {
                        what: a.name.clone(),
                        reason: "preset parameters are real".into(),
                    });
                }
                slot.1 = Some(a.value.re);
            } else {
                extra.push(a.clone());
            }
        }
        let get = |n: &str| values.iter().find(|(k, _)| k == n).and_then(|(_, v)| *v);
        let req = |n: &str| get(n).expect("preset parameter with a default");
        let device = match name {
            "isolator" => DeviceParams::IsolatorReduced {
                gamma: get("gamma"),
                kappa: 1.0,
            },
            "isolator-3mode" => DeviceParams::IsolatorThreeMode {
                j_prime: get("j_prime"),
                kappa: 1.0,
                kappa_aux: req("kappa_aux"),
            },
            "ndpa" => DeviceParams::NdpaReduced {
                theta: get("theta"),
                gamma: req("C"),
                kappa: 1.0,
            },
            "ndpa-3mode" => {
                let kappa_aux = req("kappa_aux");
                DeviceParams::NdpaThreeMode {
                    lambda_prime: (req("C") * kappa_aux).sqrt() / 2.0,
                    theta: get("theta"),
                    kappa: 1.0,
                    kappa_aux,
                }
            }
            "dpa" => DeviceParams::DpaReduced {
                lambda_qnd: req("lambda_qnd"),
                kappa: 1.0,
            },
            "dpa-aux" => DeviceParams::DpaAux {
                cbar: req("cbar"),
                alpha: get("alpha"),
                theta: get("theta"),
                kappa: 1.0,
                kappa_aux: req("kappa_aux"),
            },
            "waveguide" => DeviceParams::WaveguidePair {
                gamma: req("gamma"),
                k0l: req("k0l"),
                kappa: 1.0,
                tau: req("tau"),
            },
            _ => unreachable!("checked by info()"),
        };
        let network = make_device(&device, matched)?;
        Ok(Preset {
            device,
            matched,
            network,
            values: values.into_iter().filter_map(|(n, v)| v.map(|v| (n, v))).collect(),
            extra,
        })
    }

    pub fn name(&self) -> &'static str {
        self.device.name()
    }

    pub fn reference(&self) -> Option<ReferenceCurves> {
        if self.matched {
            reference_curves(&self.device).ok()
        } else {
            None
        }
    }

    /// Forward and reverse elements that the reference curves describe.
    pub fn reference_elements(&self) -> Option<(Selector, Selector)> {
        use ChannelComponent::*;
        let doubled = |o, i| Selector { output: o, input: i };
        match self.device {
            DeviceParams::IsolatorReduced { .. } | DeviceParams::IsolatorThreeMode { .. } => {
                Some((doubled(Annihilation(1), Annihilation(0)), doubled(Annihilation(0), Annihilation(1))))
            }
            DeviceParams::NdpaReduced { .. } | DeviceParams::NdpaThreeMode { .. } => {
                Some((doubled(Creation(1), Annihilation(0)), doubled(Annihilation(0), Creation(1))))
            }
            DeviceParams::DpaReduced { .. } | DeviceParams::DpaAux { .. } => Some((doubled(P(1), P(0)), doubled(X(0), X(1)))),
            DeviceParams::WaveguidePair { .. } => None,
        }
    }

    /// Default amplifier configuration for `noise`: signal channel, output channel, mode.
    pub fn noise_defaults(&self) -> (usize, usize, AmplifierMode) {
        match self.device {
            DeviceParams::DpaReduced { .. } | DeviceParams::DpaAux { .. } => (
                0,
                1,
                AmplifierMode::PhaseSensitive {
                    input: Quadrature::P,
                    output: Quadrature::P,
                },
            ),
            _ => (0, 1, AmplifierMode::PhasePreserving),
        }
    }
}

/// One `OUT:IN` scattering element.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Selector {
    pub output: ChannelComponent,
    pub input: ChannelComponent,
}

/// Applies `NAME=VALUE` overrides to a network. Names are matcher parameter names
/// (`J[a,b]`, `L[a,b]`, `PX[a,b]`, `rate[k]`, `kappa[a]`, ...) or `n[a]` for the
/// occupation of the port on mode `a`.
pub fn apply_assignments(network: &LinearNetwork, assignments: &[ParamAssignment]) -> Result<LinearNetwork> {
    let mut net = network.clone();
    for a in assignments {
        if let Some(label) = a.name.strip_prefix("n[").and_then(|r| r.strip_suffix(']')) {
            let mode = net
                .mode_index(label.trim())
                .or_else(|| label.trim().parse().ok())
                .ok_or_else(|| Error::UnknownParameter {
                    name: a.name.clone(),
                    available: net.modes().iter().map(|m| format!("n[{}]", m.label)).collect::<Vec<_>>().join(", "),
                })?;
            let port = net.port_on_mode(mode).ok_or(Error::NoPortOnMode { mode })?;
            net = crate::devices::with_port_occupation(&net, port, a.value.re)?;
            continue;
        }
        let p = FreeParameter::parse(&a.name, &net)?;
        let family = crate::directionality::CouplingParameters::new(net.clone(), vec![p]);
        net = crate::directionality::Parameterization::build(&family, &[a.value])?;
    }
    Ok(net)
}

/// Names of the coherent couplings a matched preset adds on top of the dissipative part.
pub fn matching_conditions(preset: &Preset) -> Vec<String> {
    if !preset.matched {
        return Vec::new();
    }
    let Ok(unmatched) = make_device(&preset.device, false) else {
        return Vec::new();
    };
    let (a, b): (&CoherentCoupling, &CoherentCoupling) = (preset.network.coupling(), unmatched.coupling());
    let n = preset.network.num_modes();
    let label = |j: usize| preset.network.modes()[j].label.clone();
    let tiny = 1e-12 * preset.network.rate_scale();
    let mut out = Vec::new();
    for x in 0..n {
        for y in x..n {
            let dj = a.beam_splitter[(x, y)] - b.beam_splitter[(x, y)];
            if dj.norm() > tiny {
                out.push(format!("J[{},{}] = {}{:+}i", label(x), label(y), dj.re, dj.im));
            }
            let dl = a.squeezing[(x, y)] - b.squeezing[(x, y)];
            if dl.norm() > tiny {
                out.push(format!("L[{},{}] = {}{:+}i", label(x), label(y), dl.re, dl.im));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_assignments() {
        let a: ParamAssignment = "J[d1,d2]=0.5,-1".parse().unwrap();
        assert_eq!(a.name, "J[d1,d2]");
        assert_eq!(a.value, C64::new(0.5, -1.0));
        assert!("gamma".parse::<ParamAssignment>().is_err());
        assert!("gamma=fast".parse::<ParamAssignment>().is_err());
    }

    #[test]
    fn presets_build_and_accept_overrides() {
        for p in PRESETS {
            Preset::new(p.name, &[]).unwrap();
        }
        let p = Preset::new("ndpa", &["C=0.8".parse().unwrap(), "n[d2]=2".parse().unwrap()]).unwrap();
        assert_eq!(p.values[0], ("C".to_string(), 0.8));
        let net = apply_assignments(&p.network, &p.extra).unwrap();
        assert_eq!(net.ports()[1].occupation, 2.0);
        assert!(Preset::new("laser", &[]).is_err());
        assert!(matching_conditions(&Preset::new("isolator", &[]).unwrap())[0].starts_with("J[d1,d2] = 0+0.5i"));
    }
}
