//! Heisenberg–Langevin description of a [`LinearNetwork`] in the doubled basis
//! `x = (d_1 … d_N, d_1† … d_N†)`.
//!
//! Noise channels are ordered as all ports (in port order) followed by all dissipators;
//! the doubled channel vector is `(ξ_1 … ξ_M, ξ_1† … ξ_M†)`.

mod elimination;
mod moments;
mod scattering;
mod stability;

pub use elimination::{adiabatic_eliminate, Elimination};
pub use moments::{coherent_moments, evolve_moments, vacuum_moments, Moments};
pub use scattering::{quadrature_transform, scattering_matrix, Basis, ChannelComponent, ScatteringResult};
pub use stability::{stability, StabilityReport};

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::network::{CollectiveDissipator, LinearNetwork, C64};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChannelKind {
    /// Input-output port attached to the given mode.
    Port { mode: usize },
    /// Reservoir noise entering through the given collective dissipator.
    Dissipator { index: usize },
    /// Propagating reservoir field outside the Lindblad description (e.g. a waveguide).
    Field { index: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChannelInfo {
    pub kind: ChannelKind,
    pub label: String,
    pub occupation: f64,
}

/// Compiled linear dynamics `ẋ = A x + K_in ξ_in`, `ξ_out = ξ_in + K_out x`.
#[derive(Debug, Clone, PartialEq)]
pub struct DriftSystem {
    pub modes: usize,
    pub drift: DMatrix<C64>,
    pub input: DMatrix<C64>,
    pub output: DMatrix<C64>,
    pub channels: Vec<ChannelInfo>,
}

impl DriftSystem {
    pub fn dimension(&self) -> usize {
        2 * self.modes
    }

    pub fn num_channels(&self) -> usize {
        self.channels.len()
    }

    pub fn channel_index(&self, label: &str) -> Option<usize> {
        self.channels.iter().position(|c| c.label == label)
    }
}

/// Compiles a network into its doubled-basis drift and coupling matrices.
pub fn drift_matrix(network: &LinearNetwork) -> DriftSystem {
    let n = network.num_modes();
    let m = network.num_channels();
    let i = C64::new(0.0, 1.0);
    let coupling = network.coupling();

    // upper blocks: a acts on d, b acts on d†
    let mut a = DMatrix::<C64>::zeros(n, n);
    let mut b = DMatrix::<C64>::zeros(n, n);
    for j in 0..n {
        for k in 0..n {
            a[(j, k)] = -i * coupling.beam_splitter[(j, k)];
            b[(j, k)] = -i * coupling.squeezing[(j, k)];
        }
    }
    for d in network.dissipators() {
        let g = d.rate / 2.0;
        for j in 0..n {
            for k in 0..n {
                a[(j, k)] += g * (d.v[j] * d.v[k].conj() - d.u[j].conj() * d.u[k]);
                b[(j, k)] += g * (d.v[j] * d.u[k].conj() - d.u[j].conj() * d.v[k]);
            }
        }
    }
    for p in network.ports() {
        a[(p.mode, p.mode)] -= C64::new(p.kappa / 2.0, 0.0);
    }

    let mut drift = DMatrix::<C64>::zeros(2 * n, 2 * n);
    for j in 0..n {
        for k in 0..n {
            drift[(j, k)] = a[(j, k)];
            drift[(j, n + k)] = b[(j, k)];
            drift[(n + j, n + k)] = a[(j, k)].conj();
            drift[(n + j, k)] = b[(j, k)].conj();
        }
    }

    let mut output = DMatrix::<C64>::zeros(2 * m, 2 * n);
    let mut channels = Vec::with_capacity(m);
    for (c, p) in network.ports().iter().enumerate() {
        let s = C64::new(p.kappa.sqrt(), 0.0);
        output[(c, p.mode)] = s;
        output[(m + c, n + p.mode)] = s;
        channels.push(ChannelInfo {
            kind: ChannelKind::Port { mode: p.mode },
            label: network.modes()[p.mode].label.clone(),
            occupation: p.occupation,
        });
    }
    let np = network.ports().len();
    for (k, d) in network.dissipators().iter().enumerate() {
        let c = np + k;
        let s = d.rate.sqrt();
        for j in 0..n {
            output[(c, j)] = s * d.u[j];
            output[(c, n + j)] = s * d.v[j];
            output[(m + c, j)] = s * d.v[j].conj();
            output[(m + c, n + j)] = s * d.u[j].conj();
        }
        channels.push(ChannelInfo {
            kind: ChannelKind::Dissipator { index: k },
            label: format!("z{k}"),
            occupation: 0.0,
        });
    }

    // K_in = -Σ_z K_out† Σ_c keeps the output fields canonical
    let mut input = output.adjoint();
    for r in 0..2 * n {
        let sr = if r < n { -1.0 } else { 1.0 };
        for c in 0..2 * m {
            let sc = if c < m { 1.0 } else { -1.0 };
            input[(r, c)] *= sr * sc;
        }
    }

    DriftSystem {
        modes: n,
        drift,
        input,
        output,
        channels,
    }
}

/// Local damping rates and nonlocal coefficients `μ`, `ν` of one dissipator between
/// two modes.
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedCouplings {
    pub rate: f64,
    /// `Γ_n = Γ(|u_n|² − |v_n|²)` for every mode.
    pub gamma_local: Vec<f64>,
    /// `μ = v_a v_b* − u_b u_a*`
    pub mu: C64,
    /// `ν = v_a u_b* − v_b u_a*`
    pub nu: C64,
}

impl ReducedCouplings {
    pub fn from_dissipator(d: &CollectiveDissipator, mode_a: usize, mode_b: usize) -> Result<Self> {
        let n = d.u.len().min(d.v.len());
        for idx in [mode_a, mode_b] {
            if idx >= n {
                return Err(Error::IndexOutOfRange {
                    what: "mode".into(),
                    index: idx,
                    len: n,
                });
            }
        }
        if mode_a == mode_b {
            return Err(Error::InvalidValue {
                what: "mode pair".into(),
                reason: "modes must be distinct".into(),
            });
        }
        let (ua, ub, va, vb) = (d.u[mode_a], d.u[mode_b], d.v[mode_a], d.v[mode_b]);
        Ok(Self {
            rate: d.rate,
            gamma_local: (0..n).map(|j| d.rate * (d.u[j].norm_sqr() - d.v[j].norm_sqr())).collect(),
            mu: va * vb.conj() - ub * ua.conj(),
            nu: va * ub.conj() - vb * ua.conj(),
        })
    }

    /// Beam-splitter coupling `J_ab = −iμΓ/2` that cancels the dissipative drive of `a` by `b`.
    pub fn beam_splitter_target(&self) -> C64 {
        C64::new(0.0, -1.0) * self.mu * self.rate / 2.0
    }

    /// Squeezing coupling `Λ_ab = −iνΓ/2` that cancels the dissipative drive of `a` by `b†`.
    pub fn squeezing_target(&self) -> C64 {
        C64::new(0.0, -1.0) * self.nu * self.rate / 2.0
    }
}

pub fn reduced_coupling_constants(
    network: &LinearNetwork,
    mode_a: usize,
    mode_b: usize,
    dissipator: usize,
) -> Result<ReducedCouplings> {
    let d = network.dissipators().get(dissipator).ok_or(Error::IndexOutOfRange {
        what: "dissipator".into(),
        index: dissipator,
        len: network.dissipators().len(),
    })?;
    ReducedCouplings::from_dissipator(d, mode_a, mode_b)
}

/// Swaps the annihilation and creation halves of a doubled vector space.
pub fn swap_halves(dim: usize) -> DMatrix<C64> {
    let h = dim / 2;
    let mut s = DMatrix::zeros(dim, dim);
    for j in 0..h {
        s[(j, h + j)] = C64::new(1.0, 0.0);
        s[(h + j, j)] = C64::new(1.0, 0.0);
    }
    s
}

/// `diag(+1, …, −1, …)` over a doubled space.
pub fn bogoliubov_metric(dim: usize) -> DMatrix<C64> {
    let h = dim / 2;
    DMatrix::from_fn(dim, dim, |r, c| {
        if r != c {
            C64::new(0.0, 0.0)
        } else if r < h {
            C64::new(1.0, 0.0)
        } else {
            C64::new(-1.0, 0.0)
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::c;

    fn isolator(gamma: f64, j: C64) -> LinearNetwork {
        LinearNetwork::builder()
            .modes(["d1", "d2"])
            .beam_splitter(0, 1, j)
            .dissipator(CollectiveDissipator::lowering(gamma, vec![c(1.0, 0.0), c(1.0, 0.0)]))
            .port(0, 1.0)
            .port(1, 1.0)
            .build()
            .unwrap()
    }

    #[test]
    fn isolator_drift_is_one_way() {
        let gamma = 0.8;
        let sys = drift_matrix(&isolator(gamma, c(0.0, gamma / 2.0)));
        let a = &sys.drift;
        assert!((a[(0, 0)] - c(-(1.0 + gamma) / 2.0, 0.0)).norm() < 1e-15);
        assert!(a[(0, 1)].norm() < 1e-15);
        assert!((a[(1, 0)] - c(-gamma, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn bare_cavity_drift() {
        let net = LinearNetwork::builder().mode("a").port(0, 2.0).build().unwrap();
        let sys = drift_matrix(&net);
        assert_eq!(sys.drift[(0, 0)], c(-1.0, 0.0));
        assert_eq!(sys.drift[(1, 1)], c(-1.0, 0.0));
        assert_eq!(sys.input[(0, 0)], c(-2f64.sqrt(), 0.0));
    }

    #[test]
    fn ndpa_drift_matches_amplifier_equations() {
        let (theta, gamma, kappa) = (0.6f64, 0.9, 1.0);
        let lambda = c(0.0, gamma * (2.0 * theta).sin() / 2.0);
        let r2 = 2f64.sqrt();
        let net = LinearNetwork::builder()
            .modes(["d1", "d2"])
            .squeezing(0, 1, lambda)
            .dissipator(CollectiveDissipator::new(
                gamma,
                vec![c(r2 * theta.cos(), 0.0), c(0.0, 0.0)],
                vec![c(0.0, 0.0), c(r2 * theta.sin(), 0.0)],
            ))
            .port(0, kappa)
            .port(1, kappa)
            .build()
            .unwrap();
        let a = drift_matrix(&net).drift;
        let i = c(0.0, 1.0);
        let s2t = (2.0 * theta).sin();
        assert!((a[(0, 0)] - c(-(kappa + 2.0 * gamma * theta.cos().powi(2)) / 2.0, 0.0)).norm() < 1e-14);
        assert!((a[(0, 3)] - (-(gamma * s2t / 2.0 + i * lambda))).norm() < 1e-14);
        assert!((a[(3, 3)] - c(-(kappa - 2.0 * gamma * theta.sin().powi(2)) / 2.0, 0.0)).norm() < 1e-14);
        assert!((a[(3, 0)] - (gamma * s2t / 2.0 + i * lambda.conj())).norm() < 1e-14);
        // matched: d1 no longer driven by d2†
        assert!(a[(0, 3)].norm() < 1e-14);
    }

    #[test]
    fn reduced_constants_for_reference_jump_operators() {
        let hop = CollectiveDissipator::lowering(2.0, vec![c(1.0, 0.0), c(1.0, 0.0)]);
        let r = ReducedCouplings::from_dissipator(&hop, 0, 1).unwrap();
        assert_eq!(r.mu, c(-1.0, 0.0));
        assert_eq!(r.nu, c(0.0, 0.0));
        assert!((r.beam_splitter_target() - c(0.0, 1.0)).norm() < 1e-15);
        assert_eq!(r.gamma_local, vec![2.0, 2.0]);

        let theta = 0.3f64;
        let r2 = 2f64.sqrt();
        let pa = CollectiveDissipator::new(
            1.0,
            vec![c(r2 * theta.cos(), 0.0), c(0.0, 0.0)],
            vec![c(0.0, 0.0), c(r2 * theta.sin(), 0.0)],
        );
        let r = ReducedCouplings::from_dissipator(&pa, 0, 1).unwrap();
        assert!(r.mu.norm() < 1e-15);
        assert!((r.nu - c(-(2.0 * theta).sin(), 0.0)).norm() < 1e-15);
        assert!((r.squeezing_target() - c(0.0, (2.0 * theta).sin() / 2.0)).norm() < 1e-15);

        let null = CollectiveDissipator::lowering(1.0, vec![c(0.0, 0.0); 2]);
        let r = ReducedCouplings::from_dissipator(&null, 0, 1).unwrap();
        assert_eq!((r.mu, r.nu), (c(0.0, 0.0), c(0.0, 0.0)));
        assert_eq!(r.gamma_local, vec![0.0, 0.0]);
    }

    #[test]
    fn reduced_constants_reject_bad_indices() {
        let net = isolator(1.0, c(0.0, 0.5));
        assert!(matches!(
            reduced_coupling_constants(&net, 0, 1, 3),
            Err(Error::IndexOutOfRange { index: 3, .. })
        ));
        assert!(matches!(
            reduced_coupling_constants(&net, 0, 5, 0),
            Err(Error::IndexOutOfRange { index: 5, .. })
        ));
    }

    #[test]
    fn particle_hole_symmetry() {
        let net = LinearNetwork::builder()
            .modes(["a", "b"])
            .beam_splitter(0, 1, c(0.3, -0.2))
            .squeezing(0, 1, c(0.1, 0.4))
            .squeezing(0, 0, c(-0.2, 0.1))
            .dissipator(CollectiveDissipator::new(0.7, vec![c(1.0, 0.2), c(0.0, 1.0)], vec![c(0.3, 0.0), c(0.1, -0.5)]))
            .port(0, 1.0)
            .thermal_port(1, 0.5, 2.0)
            .build()
            .unwrap();
        let sys = drift_matrix(&net);
        let sx = swap_halves(4);
        let sc = swap_halves(2 * sys.num_channels());
        assert!((&sx * sys.drift.map(|z| z.conj()) * &sx - &sys.drift).norm() < 1e-14);
        assert!((&sx * sys.input.map(|z| z.conj()) * &sc - &sys.input).norm() < 1e-14);
        assert!((&sc * sys.output.map(|z| z.conj()) * &sx - &sys.output).norm() < 1e-14);
    }
}
