//! Isolation metrics, the analytic balancing conditions between coherent and dissipative
//! couplings, impedance-matching conditions, and a numerical matcher.

mod matcher;

pub use matcher::{
    numeric_match, CouplingParameters, FreeParameter, MatchOptions, MatchSolution, ObjectiveTerm, ParamSpec,
    Parameterization,
};

use crate::error::{Error, Result};
use crate::langevin::{scattering_matrix, Basis, ReducedCouplings, ScatteringResult};
use crate::network::{CollectiveDissipator, LinearNetwork, C64};

#[derive(Debug, Clone, PartialEq)]
pub struct IsolationMetrics {
    pub omega: f64,
    /// Power transmitted from port A to port B.
    pub forward: f64,
    /// Power transmitted from port B to port A.
    pub reverse: f64,
    pub reflect_a: f64,
    pub reflect_b: f64,
    /// `10 log10(forward / reverse)`; `+∞` when nothing leaks back.
    pub isolation_db: f64,
}

/// Squared spectral norm of a 2×2 block: the largest power gain between the two channels,
/// whichever component (or quadrature) carries it.
fn block_power(s: &ScatteringResult, out: usize, inp: usize) -> f64 {
    let m = s.num_channels();
    let (ro, ri) = match s.basis {
        Basis::Doubled => ([out, m + out], [inp, m + inp]),
        Basis::Quadrature => ([2 * out, 2 * out + 1], [2 * inp, 2 * inp + 1]),
    };
    let a = s.matrix[(ro[0], ri[0])];
    let b = s.matrix[(ro[0], ri[1])];
    let c = s.matrix[(ro[1], ri[0])];
    let d = s.matrix[(ro[1], ri[1])];
    // eigenvalues of B†B for B = [[a, b], [c, d]]
    let p = a.norm_sqr() + c.norm_sqr();
    let q = b.norm_sqr() + d.norm_sqr();
    let r = a.conj() * b + c.conj() * d;
    let tr = p + q;
    let disc = ((p - q).powi(2) / 4.0 + r.norm_sqr()).sqrt();
    tr / 2.0 + disc
}

pub fn isolation_from(s: &ScatteringResult, port_a: usize, port_b: usize) -> Result<IsolationMetrics> {
    let m = s.num_channels();
    for p in [port_a, port_b] {
        if p >= m {
            return Err(Error::IndexOutOfRange {
                what: "channel".into(),
                index: p,
                len: m,
            });
        }
    }
    let forward = block_power(s, port_b, port_a);
    let reverse = block_power(s, port_a, port_b);
    let isolation_db = if reverse == 0.0 {
        f64::INFINITY
    } else {
        10.0 * (forward / reverse).log10()
    };
    Ok(IsolationMetrics {
        omega: s.omega,
        forward,
        reverse,
        reflect_a: block_power(s, port_a, port_a),
        reflect_b: block_power(s, port_b, port_b),
        isolation_db,
    })
}

/// Transmission and reflection powers between two ports (channel indices).
pub fn isolation(network: &LinearNetwork, omega: f64, port_a: usize, port_b: usize, basis: Basis) -> Result<IsolationMetrics> {
    if port_a >= network.ports().len() || port_b >= network.ports().len() {
        return Err(Error::IndexOutOfRange {
            what: "port".into(),
            index: port_a.max(port_b),
            len: network.ports().len(),
        });
    }
    let s = scattering_matrix(network, omega, basis)?;
    isolation_from(&s, port_a, port_b)
}

/// Coherent couplings that cancel the dissipative drive of mode A by mode B.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplingTargets {
    /// `J_ab = −iμΓ/2`
    pub beam_splitter: C64,
    /// `Λ_ab = −iνΓ/2`
    pub squeezing: C64,
}

pub fn analytic_match(dissipator: &CollectiveDissipator, mode_a: usize, mode_b: usize) -> Result<CouplingTargets> {
    let r = ReducedCouplings::from_dissipator(dissipator, mode_a, mode_b)?;
    let touches = |j: usize| dissipator.u[j].norm() + dissipator.v[j].norm() > 0.0;
    if dissipator.rate == 0.0 || !touches(mode_a) || !touches(mode_b) {
        return Err(Error::NullDissipator);
    }
    Ok(CouplingTargets {
        beam_splitter: r.beam_splitter_target(),
        squeezing: r.squeezing_target(),
    })
}

/// Returns a copy of `network` whose `J_ab`, `Λ_ab` are set to the analytic targets of one
/// of its dissipators, so that mode A becomes insensitive to mode B.
pub fn apply_analytic_match(network: &LinearNetwork, dissipator: usize, mode_a: usize, mode_b: usize) -> Result<LinearNetwork> {
    let d = network.dissipators().get(dissipator).ok_or(Error::IndexOutOfRange {
        what: "dissipator".into(),
        index: dissipator,
        len: network.dissipators().len(),
    })?;
    let t = analytic_match(d, mode_a, mode_b)?;
    let mut coupling = network.coupling().clone();
    coupling.set_beam_splitter(mode_a, mode_b, t.beam_splitter);
    coupling.set_squeezing(mode_a, mode_b, t.squeezing);
    network.with_coupling(coupling)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ImpedanceDevice {
    /// Reduced isolator with port rate `kappa`.
    Isolator { kappa: f64 },
    /// Reduced NDPA at cooperativity `C = Γ/κ`.
    Ndpa { cooperativity: f64 },
    /// QND-based phase-sensitive amplifier at generalized cooperativity `C̄`.
    Dpa { cooperativity: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ImpedanceConditions {
    Isolator {
        gamma: f64,
    },
    Ndpa {
        cos2_theta: f64,
        theta: f64,
        /// Zero-frequency power gain `(2C − 1)/(C − 1)²`.
        gain: f64,
    },
    Dpa {
        /// Root of `sin 2θ = 1/C̄` in `[0, π/4]`.
        theta: f64,
        /// Zero-frequency amplitude gain `C̄ + √(C̄² − 1)`.
        sqrt_gain: f64,
        /// Asymmetry `α = 1/G_φ` that nulls the noise leaking into the amplified output.
        alpha: f64,
    },
}

/// Zero-frequency amplitude gain of the impedance-matched QND amplifier.
pub fn dpa_sqrt_gain(cbar: f64) -> f64 {
    cbar + (cbar * cbar - 1.0).max(0.0).sqrt()
}

pub fn ndpa_gain(cooperativity: f64) -> f64 {
    (2.0 * cooperativity - 1.0) / (cooperativity - 1.0).powi(2)
}

pub fn impedance_conditions(device: ImpedanceDevice) -> Result<ImpedanceConditions> {
    match device {
        ImpedanceDevice::Isolator { kappa } => {
            if !(kappa > 0.0) {
                return Err(Error::InvalidValue {
                    what: "kappa".into(),
                    reason: "must be positive".into(),
                });
            }
            Ok(ImpedanceConditions::Isolator { gamma: kappa })
        }
        ImpedanceDevice::Ndpa { cooperativity: c } => {
            if !(c > 0.5) || !c.is_finite() {
                return Err(Error::InfeasibleCooperativity {
                    value: c,
                    reason: "cos²θ = 1/(2C) needs C > 1/2".into(),
                });
            }
            let cos2 = 1.0 / (2.0 * c);
            Ok(ImpedanceConditions::Ndpa {
                cos2_theta: cos2,
                theta: cos2.sqrt().acos(),
                gain: ndpa_gain(c),
            })
        }
        ImpedanceDevice::Dpa { cooperativity: c } => {
            if !(c >= 1.0) || !c.is_finite() {
                return Err(Error::InfeasibleCooperativity {
                    value: c,
                    reason: "sin 2θ = 1/C̄ needs C̄ ≥ 1".into(),
                });
            }
            let g = dpa_sqrt_gain(c);
            Ok(ImpedanceConditions::Dpa {
                theta: 0.5 * (1.0 / c).asin(),
                sqrt_gain: g,
                alpha: 1.0 / (g * g),
            })
        }
    }
}
