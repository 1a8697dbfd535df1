//! Directionality of an arbitrary factorizable interaction balanced against a collective
//! dissipator: `H = (λ/2)(ô₁ô₂ + h.c.)`, `ẑ = ô₁ + e^{iφ} ô₂†` at rate `Γ`.
//!
//! For `Γ = λ`, `φ = π/2` subsystem 2 evolves independently of subsystem 1; `φ = −π/2`
//! reverses the direction. The check evolves the full master equation, local terms included.

use std::collections::BTreeSet;
use std::f64::consts::FRAC_PI_2;

use super::{evolve, DensityMatrix, EvolveOptions, HilbertSpec, OperatorExpr, SparseOp};
use crate::error::{Error, Result};
use crate::network::C64;

/// Initial-state family and integration settings for the check.
#[derive(Debug, Clone)]
pub struct DirectionalityProbe {
    pub cutoffs: Vec<usize>,
    /// Extra `κ L[d_m]` damping on every mode, keeping amplifying terms bounded.
    pub local_damping: f64,
    /// Coherent amplitudes of the reference initial state, one per mode.
    pub reference: Vec<C64>,
    /// Alternative amplitudes given to every mode of the perturbed subsystem.
    pub perturbations: Vec<C64>,
    pub times: Vec<f64>,
    pub options: EvolveOptions,
}

impl DirectionalityProbe {
    pub fn new(cutoffs: Vec<usize>, local_damping: f64) -> Self {
        let n = cutoffs.len();
        DirectionalityProbe {
            cutoffs,
            local_damping,
            reference: vec![C64::new(0.2, 0.0); n],
            perturbations: vec![C64::new(0.5, 0.0), C64::new(0.0, -0.4), C64::new(0.0, 0.0)],
            times: (0..=10).map(|k| 0.4 * k as f64).collect(),
            options: EvolveOptions::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DirectionalityReport {
    pub subsystem_1: Vec<usize>,
    pub subsystem_2: Vec<usize>,
    /// Largest change of a subsystem-2 observable when only subsystem 1 is perturbed.
    pub deviation_2_from_1: f64,
    /// Largest change of a subsystem-1 observable when only subsystem 2 is perturbed.
    pub deviation_1_from_2: f64,
    /// 2 when subsystem 2 should be unaffected (`φ = π/2`), 1 for `φ = −π/2`.
    pub shielded: u8,
    pub max_leak: f64,
}

impl DirectionalityReport {
    /// Deviation of the subsystem that should not see the other.
    pub fn shielded_deviation(&self) -> f64 {
        if self.shielded == 2 {
            self.deviation_2_from_1
        } else {
            self.deviation_1_from_2
        }
    }

    /// Deviation in the driven direction.
    pub fn driven_deviation(&self) -> f64 {
        if self.shielded == 2 {
            self.deviation_1_from_2
        } else {
            self.deviation_2_from_1
        }
    }

    pub fn passes(&self, tol: f64) -> bool {
        self.shielded_deviation() <= tol && self.driven_deviation() > tol
    }
}

fn observables(modes: &[usize]) -> Vec<OperatorExpr> {
    modes
        .iter()
        .flat_map(|&m| {
            [
                OperatorExpr::annihilation(m),
                OperatorExpr::number(m),
                OperatorExpr::annihilation(m).pow(2),
            ]
        })
        .collect()
}

fn max_norm(a: &nalgebra::DMatrix<C64>) -> f64 {
    a.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Runs the directionality check for `ô₁`, `ô₂` acting on disjoint sets of modes.
pub fn factorized_directionality_check(
    o1: &OperatorExpr,
    o2: &OperatorExpr,
    lambda: f64,
    gamma: f64,
    phi: f64,
    probe: &DirectionalityProbe,
) -> Result<DirectionalityReport> {
    let s1: BTreeSet<usize> = o1.modes();
    let s2: BTreeSet<usize> = o2.modes();
    if s1.is_empty() || s2.is_empty() || !s1.is_disjoint(&s2) {
        return Err(Error::NotFactorizable(format!("ô₁ acts on modes {s1:?}, ô₂ on {s2:?}")));
    }
    let shielded = if (phi - FRAC_PI_2).abs() < 1e-12 {
        2
    } else if (phi + FRAC_PI_2).abs() < 1e-12 {
        1
    } else {
        return Err(Error::InvalidValue {
            what: "phi".into(),
            reason: format!("{phi} is not ±π/2"),
        });
    };
    let spec = HilbertSpec::new(probe.cutoffs.clone())?;
    if probe.reference.len() != spec.num_modes() {
        return Err(Error::DimensionMismatch {
            expected: spec.num_modes(),
            found: probe.reference.len(),
        });
    }
    let m1 = SparseOp::compile(o1, &spec)?;
    let m2 = SparseOp::compile(o2, &spec)?;
    for b in [&m2, &m2.adjoint()] {
        let comm = m1.matmul(b).add(&b.matmul(&m1).scale(C64::new(-1.0, 0.0)));
        let err = max_norm(&comm.to_dense());
        if err > 1e-12 {
            return Err(Error::NotFactorizable(format!("commutator norm {err:.3e}")));
        }
    }

    let prod = o1 * o2;
    let h = (&prod + prod.adjoint()) * (lambda / 2.0);
    let z = o1 + o2.adjoint() * C64::from_polar(1.0, phi);
    let mut jumps = vec![(gamma, z)];
    if probe.local_damping > 0.0 {
        for m in 0..spec.num_modes() {
            jumps.push((probe.local_damping, OperatorExpr::annihilation(m)));
        }
    }

    let run = |alpha: &[C64]| -> Result<(Vec<Vec<C64>>, Vec<Vec<C64>>, f64)> {
        let rho0 = DensityMatrix::coherent(&spec, alpha)?;
        let traj = evolve(&h, &jumps, &rho0, &probe.times, &probe.options)?;
        let a: Vec<usize> = s1.iter().copied().collect();
        let b: Vec<usize> = s2.iter().copied().collect();
        let obs1 = observables(&a).iter().map(|o| traj.expectation(o)).collect::<Result<_>>()?;
        let obs2 = observables(&b).iter().map(|o| traj.expectation(o)).collect::<Result<_>>()?;
        Ok((obs1, obs2, traj.max_leak))
    };
    let deviation = |x: &[Vec<C64>], y: &[Vec<C64>]| {
        x.iter()
            .zip(y)
            .flat_map(|(p, q)| p.iter().zip(q).map(|(u, v)| (u - v).norm()))
            .fold(0.0, f64::max)
    };

    let (ref1, ref2, mut max_leak) = run(&probe.reference)?;
    let mut dev_2_from_1: f64 = 0.0;
    let mut dev_1_from_2: f64 = 0.0;
    for &p in &probe.perturbations {
        let mut alpha = probe.reference.clone();
        for &m in &s1 {
            alpha[m] = p;
        }
        let (_, obs2, leak) = run(&alpha)?;
        dev_2_from_1 = dev_2_from_1.max(deviation(&obs2, &ref2));
        max_leak = max_leak.max(leak);

        let mut alpha = probe.reference.clone();
        for &m in &s2 {
            alpha[m] = p;
        }
        let (obs1, _, leak) = run(&alpha)?;
        dev_1_from_2 = dev_1_from_2.max(deviation(&obs1, &ref1));
        max_leak = max_leak.max(leak);
    }
    Ok(DirectionalityReport {
        subsystem_1: s1.into_iter().collect(),
        subsystem_2: s2.into_iter().collect(),
        deviation_2_from_1: dev_2_from_1,
        deviation_1_from_2: dev_1_from_2,
        shielded,
        max_leak,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn probe() -> DirectionalityProbe {
        let mut p = DirectionalityProbe::new(vec![8, 8], 1.0);
        p.times = vec![0.0, 1.0, 2.0];
        p.perturbations = vec![C64::new(0.4, 0.0)];
        p
    }

    #[test]
    fn linear_pair_is_directional_both_ways() {
        let d1 = OperatorExpr::annihilation(0);
        let d2 = OperatorExpr::annihilation(1);
        let fwd = factorized_directionality_check(&d1, &d2, 0.1, 0.1, FRAC_PI_2, &probe()).unwrap();
        assert!(fwd.passes(1e-8), "{fwd:?}");
        let rev = factorized_directionality_check(&d1, &d2, 0.1, 0.1, -FRAC_PI_2, &probe()).unwrap();
        assert_eq!(rev.shielded, 1);
        assert!(rev.passes(1e-8), "{rev:?}");
    }

    #[test]
    fn rejects_overlapping_operators_and_bad_phase() {
        let d1 = OperatorExpr::annihilation(0);
        let mixed = OperatorExpr::annihilation(1) + OperatorExpr::creation(0);
        assert!(matches!(
            factorized_directionality_check(&d1, &mixed, 1.0, 1.0, FRAC_PI_2, &probe()),
            Err(Error::NotFactorizable(_))
        ));
        let d2 = OperatorExpr::annihilation(1);
        assert!(factorized_directionality_check(&d1, &d2, 1.0, 1.0, 0.3, &probe()).is_err());
    }
}
