//! Two cavities side-coupled to a bidirectional waveguide.
//!
//! The cavities sit at `x₁ < x₂`, separated by `l`. A field travelling between them picks
//! up the phase `φ(ω) = k₀l + ωτ`, `τ = l/v_G`. Channels are the two cavity ports, the
//! right-moving field incident at `x₁` and the left-moving field incident at `x₂`.

use nalgebra::{DMatrix, Matrix2};

use crate::error::{Error, Result};
use crate::langevin::{Basis, ChannelInfo, ChannelKind, ScatteringResult};
use crate::network::{c, CoherentCoupling, CollectiveDissipator, LinearNetwork, Mode, Port, C64};

use super::DeviceParams;

fn unpack(params: &DeviceParams) -> Result<(f64, f64, f64, f64)> {
    match *params {
        DeviceParams::WaveguidePair { gamma, k0l, kappa, tau } => {
            params.validate()?;
            Ok((gamma, k0l, kappa, tau))
        }
        _ => Err(Error::InvalidValue {
            what: "device".into(),
            reason: format!("expected a waveguide pair, got {}", params.name()),
        }),
    }
}

/// 4×4 scattering over `(d₁, d₂, R, L)` for the annihilation sector at frequency `w`.
fn annihilation_block(gamma: f64, k0l: f64, kappa: f64, tau: f64, w: f64) -> Result<DMatrix<C64>> {
    let i = c(0.0, 1.0);
    let e = C64::from_polar(1.0, k0l + w * tau);
    let g = (gamma / 2.0).sqrt();
    let sk = kappa.sqrt();
    let diag = -i * w + (kappa + gamma) / 2.0;
    let m = Matrix2::new(diag, gamma / 2.0 * e, gamma / 2.0 * e, diag);
    let minv = m.try_inverse().ok_or(Error::SingularAtFrequency { omega: w })?;
    // cavity drive from inputs (d1in, d2in, Rin, Lin)
    let mut b = DMatrix::<C64>::zeros(2, 4);
    b[(0, 0)] = c(-sk, 0.0);
    b[(1, 1)] = c(-sk, 0.0);
    b[(0, 2)] = i * g;
    b[(0, 3)] = i * g * e;
    b[(1, 2)] = i * g * e;
    b[(1, 3)] = i * g;
    let minv = DMatrix::from_fn(2, 2, |r, col| minv[(r, col)]);
    let d = &minv * &b;

    let mut s = DMatrix::<C64>::zeros(4, 4);
    // ports: d_out = d_in + √κ d
    for col in 0..4 {
        s[(0, col)] = sk * d[(0, col)];
        s[(1, col)] = sk * d[(1, col)];
        // R_out = e(R_in + i g d1) + i g d2 ;  L_out = e(L_in + i g d2) + i g d1
        s[(2, col)] = e * i * g * d[(0, col)] + i * g * d[(1, col)];
        s[(3, col)] = e * i * g * d[(1, col)] + i * g * d[(0, col)];
    }
    s[(0, 0)] += 1.0;
    s[(1, 1)] += 1.0;
    s[(2, 2)] += e;
    s[(3, 3)] += e;
    Ok(s)
}

/// Exact frequency-domain scattering of the waveguide pair, including the propagation
/// delay between the cavities.
pub fn waveguide_scattering(params: &DeviceParams, omega: f64) -> Result<ScatteringResult> {
    let (gamma, k0l, kappa, tau) = unpack(params)?;
    let plus = annihilation_block(gamma, k0l, kappa, tau, omega)?;
    let minus = annihilation_block(gamma, k0l, kappa, tau, -omega)?;
    let mut matrix = DMatrix::<C64>::zeros(8, 8);
    for r in 0..4 {
        for col in 0..4 {
            matrix[(r, col)] = plus[(r, col)];
            matrix[(4 + r, 4 + col)] = minus[(r, col)].conj();
        }
    }
    let channel = |kind, label: &str| ChannelInfo {
        kind,
        label: label.into(),
        occupation: 0.0,
    };
    Ok(ScatteringResult {
        omega,
        matrix,
        basis: Basis::Doubled,
        channels: vec![
            channel(ChannelKind::Port { mode: 0 }, "d1"),
            channel(ChannelKind::Port { mode: 1 }, "d2"),
            channel(ChannelKind::Field { index: 0 }, "R"),
            channel(ChannelKind::Field { index: 1 }, "L"),
        ],
    })
}

/// Markovian couplings `(J_ind, Γ_ind) = (Γ sin(k₀l)/2, Γ cos(k₀l))` mediated by the waveguide.
pub fn induced_couplings(params: &DeviceParams) -> Result<(f64, f64)> {
    let (gamma, k0l, _, _) = unpack(params)?;
    Ok((gamma * k0l.sin() / 2.0, gamma * k0l.cos()))
}

/// Extracts `(J_ind, Γ_ind)` from the exact scattering matrix by inverting the port block
/// of a two-mode reduced model, `κ (1 − s_ports)⁻¹ = −iω − A`, and averaging the
/// off-diagonal entry `Γ_ind/2 + iJ_ind` over the sample frequencies.
pub fn fit_induced_couplings(params: &DeviceParams, omegas: &[f64]) -> Result<(f64, f64)> {
    let (_, _, kappa, _) = unpack(params)?;
    if omegas.is_empty() {
        return Err(Error::InvalidValue {
            what: "fit frequencies".into(),
            reason: "need at least one".into(),
        });
    }
    let mut acc = c(0.0, 0.0);
    for &w in omegas {
        let s = waveguide_scattering(params, w)?;
        let one_minus = Matrix2::new(
            1.0 - s.matrix[(0, 0)],
            -s.matrix[(0, 1)],
            -s.matrix[(1, 0)],
            1.0 - s.matrix[(1, 1)],
        );
        let m = one_minus.try_inverse().ok_or(Error::SingularAtFrequency { omega: w })? * c(kappa, 0.0);
        acc += (m[(0, 1)] + m[(1, 0)]) / 2.0;
    }
    let avg = acc / omegas.len() as f64;
    Ok((avg.im, 2.0 * avg.re))
}

/// Markovian limit of the waveguide pair: local damping `Γ` on each cavity, dissipative
/// coupling `Γ cos φ` and coherent hopping `Γ sin φ / 2`, written as
/// `a L[d₁ + d₂] + b L[d₁ − d₂]` with `a − b = Γ cos φ`. Without `coherent` the induced
/// hopping is dropped.
pub fn waveguide_network(gamma: f64, k0l: f64, kappa: f64, coherent: bool) -> Result<LinearNetwork> {
    let a = gamma * (1.0 + k0l.cos()) / 2.0;
    let b = gamma * (1.0 - k0l.cos()) / 2.0;
    let mut coupling = CoherentCoupling::zeros(2);
    if coherent {
        coupling.set_beam_splitter(0, 1, c(gamma * k0l.sin() / 2.0, 0.0));
    }
    let mut dissipators = Vec::new();
    if a > 0.0 {
        dissipators.push(CollectiveDissipator::lowering(a, vec![c(1.0, 0.0), c(1.0, 0.0)]));
    }
    if b > 0.0 {
        dissipators.push(CollectiveDissipator::lowering(b, vec![c(1.0, 0.0), c(-1.0, 0.0)]));
    }
    LinearNetwork::new(
        vec![
            Mode {
                label: "d1".into(),
                index: 0,
            },
            Mode {
                label: "d2".into(),
                index: 1,
            },
        ],
        coupling,
        dissipators,
        vec![Port::new(0, kappa), Port::new(1, kappa)],
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::langevin::{bogoliubov_metric, scattering_matrix};

    fn pair(gamma: f64, k0l: f64, tau: f64) -> DeviceParams {
        DeviceParams::WaveguidePair {
            gamma,
            k0l,
            kappa: 1.0,
            tau,
        }
    }

    #[test]
    fn unitary_and_canonical() {
        let s = waveguide_scattering(&pair(0.8, 1.1, 0.3), 0.7).unwrap();
        let u = s.matrix.view((0, 0), (4, 4)).into_owned();
        assert!((&u * u.adjoint() - DMatrix::<C64>::identity(4, 4)).norm() < 1e-12);
        let g = bogoliubov_metric(8);
        assert!((&s.matrix * &g * s.matrix.adjoint() - &g).norm() < 1e-12);
    }

    #[test]
    fn zero_coupling_gives_bare_cavities() {
        let s = waveguide_scattering(&pair(0.0, 0.3, 1.0), 0.4).unwrap();
        let bare = (c(-0.5, -0.4)) / c(0.5, -0.4);
        assert!((s.matrix[(0, 0)] - bare).norm() < 1e-14);
        assert!(s.matrix[(0, 1)].norm() < 1e-15 && s.matrix[(1, 0)].norm() < 1e-15);
        assert_eq!(induced_couplings(&pair(0.0, 0.3, 1.0)).unwrap(), (0.0, 0.0));
    }

    #[test]
    fn markovian_limit_matches_reduced_dissipator() {
        for (k0l, sign) in [(2.0 * std::f64::consts::PI, 1.0), (std::f64::consts::PI, -1.0)] {
            let reduced = LinearNetwork::builder()
                .modes(["d1", "d2"])
                .dissipator(CollectiveDissipator::lowering(1.0, vec![c(1.0, 0.0), c(sign, 0.0)]))
                .port(0, 1.0)
                .port(1, 1.0)
                .build()
                .unwrap();
            for w in [0.0, 0.5, 1.0] {
                let exact = waveguide_scattering(&pair(1.0, k0l, 1e-7), w).unwrap();
                let red = scattering_matrix(&reduced, w, Basis::Doubled).unwrap();
                for r in 0..2 {
                    for col in 0..2 {
                        assert!((exact.matrix[(r, col)] - red.matrix[(r, col)]).norm() < 1e-6);
                    }
                }
            }
        }
    }

    #[test]
    fn induced_coupling_formulas() {
        let (j, g) = induced_couplings(&pair(2.0, std::f64::consts::FRAC_PI_2, 0.0)).unwrap();
        assert!((j - 1.0).abs() < 1e-15 && g.abs() < 1e-15);
        let (j, g) = induced_couplings(&pair(2.0, 2.0 * std::f64::consts::PI, 0.0)).unwrap();
        assert!(j.abs() < 1e-15 && (g - 2.0).abs() < 1e-15);
    }

    #[test]
    fn fitted_couplings_recover_formulas() {
        let p = pair(1.0, std::f64::consts::FRAC_PI_2, 1e-4);
        let (j, g) = fit_induced_couplings(&p, &[-0.1, 0.0, 0.1]).unwrap();
        assert!((j - 0.5).abs() < 5e-4 && g.abs() < 5e-4, "{j} {g}");
    }

    #[test]
    fn markovian_network_matches_exact_scattering_at_any_phase() {
        for k0l in [0.3, 1.2, 2.5] {
            let net = waveguide_network(0.7, k0l, 1.0, true).unwrap();
            let exact = waveguide_scattering(&pair(0.7, k0l, 0.0), 0.3).unwrap();
            let red = scattering_matrix(&net, 0.3, Basis::Doubled).unwrap();
            for r in 0..2 {
                for col in 0..2 {
                    assert!((exact.matrix[(r, col)] - red.matrix[(r, col)]).norm() < 1e-12);
                }
            }
        }
    }
}
