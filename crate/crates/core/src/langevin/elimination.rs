use crate::error::{Error, Result};
use crate::network::{CoherentCoupling, CollectiveDissipator, LinearNetwork, Mode, Port, C64};

/// Below this ratio of κ′ to the next largest rate the elimination is reported as inaccurate.
const WEAK_DAMPING_RATIO: f64 = 10.0;

#[derive(Debug, Clone, PartialEq)]
pub struct Elimination {
    pub network: LinearNetwork,
    /// Index of the dissipator that replaces the eliminated mode; `None` when the mode
    /// was decoupled from the rest of the network.
    pub dissipator: Option<usize>,
    /// Set when κ′ is less than ten times the largest remaining rate.
    pub warning: Option<String>,
}

/// Replaces a strongly damped mode `c` by the dissipator and coherent shift it mediates.
///
/// With `H ⊃ Δ c†c + (c† B + B† c)` and `B = Σ_k (J_ck d_k + Λ_ck d_k†)`, the reduced network
/// gets `Γ L[B]` with `Γ = κ′ / (κ′²/4 + Δ²)` and `H_eff = −Δ/(κ′²/4 + Δ²) B†B`. Its drift is
/// the zero-frequency Schur complement of the full drift. The jump operator is rescaled so
/// its largest coefficient has unit modulus.
pub fn adiabatic_eliminate(network: &LinearNetwork, mode: usize) -> Result<Elimination> {
    let n = network.num_modes();
    if mode >= n {
        return Err(Error::IndexOutOfRange {
            what: "mode".into(),
            index: mode,
            len: n,
        });
    }
    let port_idx = network.port_on_mode(mode).ok_or(Error::NoPortOnMode { mode })?;
    let port = &network.ports()[port_idx];
    if port.occupation != 0.0 {
        return Err(Error::EliminationUnsupported {
            mode,
            reason: "thermal port occupation cannot be folded into a zero-temperature dissipator".into(),
        });
    }
    let coupling = network.coupling();
    if coupling.squeezing[(mode, mode)].norm() != 0.0 {
        return Err(Error::EliminationUnsupported {
            mode,
            reason: "self-squeezing on the eliminated mode".into(),
        });
    }
    if network
        .dissipators()
        .iter()
        .any(|d| d.u[mode].norm() != 0.0 || d.v[mode].norm() != 0.0)
    {
        return Err(Error::EliminationUnsupported {
            mode,
            reason: "a collective dissipator acts on the eliminated mode".into(),
        });
    }

    let kappa = port.kappa;
    let mut other: f64 = 0.0;
    for p in network.ports().iter().filter(|p| p.mode != mode) {
        other = other.max(p.kappa);
    }
    for j in 0..n {
        for k in 0..n {
            if j == mode && k == mode {
                continue;
            }
            other = other.max(coupling.beam_splitter[(j, k)].norm());
            other = other.max(coupling.squeezing[(j, k)].norm());
        }
    }
    for d in network.dissipators() {
        let w: f64 = d.u.iter().chain(&d.v).map(|z| z.norm_sqr()).sum();
        other = other.max(d.rate * w);
    }
    if kappa <= other {
        return Err(Error::WeakDamping { mode, kappa, other });
    }
    let warning = (kappa < WEAK_DAMPING_RATIO * other).then(|| {
        let msg = format!(
            "eliminating mode {mode}: κ' = {kappa} is only {:.2}× the largest other rate {other}",
            kappa / other
        );
        log::warn!("{msg}");
        msg
    });

    let keep: Vec<usize> = (0..n).filter(|&j| j != mode).collect();
    let nr = keep.len();
    let delta = coupling.beam_splitter[(mode, mode)].re;
    let denom = kappa * kappa / 4.0 + delta * delta;
    let h = -delta / denom;

    let bj: Vec<C64> = keep.iter().map(|&k| coupling.beam_splitter[(mode, k)]).collect();
    let bl: Vec<C64> = keep.iter().map(|&k| coupling.squeezing[(mode, k)]).collect();

    let mut reduced = CoherentCoupling::zeros(nr);
    for (r, &j) in keep.iter().enumerate() {
        for (s, &k) in keep.iter().enumerate() {
            reduced.beam_splitter[(r, s)] = coupling.beam_splitter[(j, k)]
                + h * (bj[r].conj() * bj[s] + bl[s].conj() * bl[r]);
            reduced.squeezing[(r, s)] =
                coupling.squeezing[(j, k)] + h * (bj[r].conj() * bl[s] + bj[s].conj() * bl[r]);
        }
    }

    let mut dissipators: Vec<CollectiveDissipator> = network
        .dissipators()
        .iter()
        .map(|d| CollectiveDissipator {
            rate: d.rate,
            u: keep.iter().map(|&k| d.u[k]).collect(),
            v: keep.iter().map(|&k| d.v[k]).collect(),
        })
        .collect();
    let scale = bj.iter().chain(&bl).map(|z| z.norm()).fold(0.0, f64::max);
    let dissipator = (scale > 0.0).then(|| {
        dissipators.push(CollectiveDissipator {
            rate: kappa * scale * scale / denom,
            u: bj.iter().map(|z| z / scale).collect(),
            v: bl.iter().map(|z| z / scale).collect(),
        });
        dissipators.len() - 1
    });

    let new_index = |j: usize| if j > mode { j - 1 } else { j };
    let modes = keep
        .iter()
        .map(|&j| Mode {
            label: network.modes()[j].label.clone(),
            index: new_index(j),
        })
        .collect();
    let ports = network
        .ports()
        .iter()
        .filter(|p| p.mode != mode)
        .map(|p| Port {
            mode: new_index(p.mode),
            ..p.clone()
        })
        .collect();

    // round-off in the products can leave J a few ulps from Hermitian
    reduced.beam_splitter = (&reduced.beam_splitter + reduced.beam_splitter.adjoint()) * C64::new(0.5, 0.0);
    let reduced_net = LinearNetwork::new(modes, reduced, dissipators, ports)?
        .with_reference_rate_name(network.reference_rate_name());
    Ok(Elimination {
        network: reduced_net,
        dissipator,
        warning,
    })
}
