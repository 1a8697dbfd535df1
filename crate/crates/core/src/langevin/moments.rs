//! First and second moments of the linear dynamics, integrated in time.
//!
//! These are the reference solution the Fock-space oracle is compared against.

use nalgebra::{DMatrix, DVector};

use super::DriftSystem;
use crate::error::Result;
use crate::network::C64;
use crate::ode::{integrate, OdeOptions};

/// Means `⟨x_i⟩` and ordered second moments `⟨x_i x_j⟩` over the doubled basis.
#[derive(Debug, Clone, PartialEq)]
pub struct Moments {
    pub mean: DVector<C64>,
    pub second: DMatrix<C64>,
}

impl Moments {
    /// `⟨d_j⟩`
    pub fn amplitude(&self, mode: usize) -> C64 {
        self.mean[mode]
    }

    /// `⟨d_j† d_k⟩`
    pub fn normal(&self, j: usize, k: usize) -> C64 {
        let n = self.mean.len() / 2;
        self.second[(n + j, k)]
    }

    /// `⟨d_j d_k⟩`
    pub fn anomalous(&self, j: usize, k: usize) -> C64 {
        self.second[(j, k)]
    }
}

pub fn vacuum_moments(modes: usize) -> Moments {
    coherent_moments(&vec![C64::new(0.0, 0.0); modes])
}

/// Moments of a product of coherent states with the given amplitudes.
pub fn coherent_moments(alpha: &[C64]) -> Moments {
    let n = alpha.len();
    let mut mean = DVector::zeros(2 * n);
    for (j, a) in alpha.iter().enumerate() {
        mean[j] = *a;
        mean[n + j] = a.conj();
    }
    let mut second = &mean * mean.transpose();
    for j in 0..n {
        second[(j, n + j)] += C64::new(1.0, 0.0);
    }
    Moments { mean, second }
}

/// Evolves moments under `ẋ = A x + K_in ξ` with thermal white-noise inputs.
///
/// `⟨ξ_a ξ_b†⟩ = (n_a + 1) δ_ab`, `⟨ξ_a† ξ_b⟩ = n_a δ_ab`, so the ordered second moments obey
/// `Ċ = A C + C Aᵀ + K_in N K_inᵀ`.
pub fn evolve_moments(sys: &DriftSystem, initial: &Moments, times: &[f64], opts: &OdeOptions) -> Result<Vec<Moments>> {
    let dim = sys.dimension();
    let m = sys.num_channels();
    let mut noise = DMatrix::<C64>::zeros(2 * m, 2 * m);
    for (a, ch) in sys.channels.iter().enumerate() {
        noise[(a, m + a)] = C64::new(ch.occupation + 1.0, 0.0);
        noise[(m + a, a)] = C64::new(ch.occupation, 0.0);
    }
    let diffusion = &sys.input * noise * sys.input.transpose();
    let a = &sys.drift;
    let at = a.transpose();

    let mut y0 = Vec::with_capacity(dim + dim * dim);
    y0.extend(initial.mean.iter().copied());
    y0.extend(initial.second.iter().copied());

    let rhs = |_t: f64, y: &[C64], dy: &mut [C64]| {
        let mean = DVector::from_column_slice(&y[..dim]);
        let c = DMatrix::from_column_slice(dim, dim, &y[dim..]);
        let dm = a * mean;
        let dc = a * &c + &c * &at + &diffusion;
        dy[..dim].copy_from_slice(dm.as_slice());
        dy[dim..].copy_from_slice(dc.as_slice());
    };
    let out = integrate(rhs, 0.0, &y0, times, opts, |_, _| Ok(()))?;
    Ok(out
        .into_iter()
        .map(|y| Moments {
            mean: DVector::from_column_slice(&y[..dim]),
            second: DMatrix::from_column_slice(dim, dim, &y[dim..]),
        })
        .collect())
}
