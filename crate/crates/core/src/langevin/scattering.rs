use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;

use super::{drift_matrix, ChannelInfo, DriftSystem};
use crate::error::{Error, Result};
use crate::network::{LinearNetwork, C64};

/// Condition number above which `−iω − A` is treated as singular.
const SINGULAR_COND: f64 = 1e12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Basis {
    /// `(ξ_1 … ξ_M, ξ_1† … ξ_M†)`
    #[default]
    Doubled,
    /// `(X_1, P_1, X_2, P_2, …)` with `X = (ξ + ξ†)/√2`, `P = −i(ξ − ξ†)/√2`.
    Quadrature,
}

impl fmt::Display for Basis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Basis::Doubled => "doubled",
            Basis::Quadrature => "quadrature",
        })
    }
}

impl FromStr for Basis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "doubled" | "annihilation" => Ok(Basis::Doubled),
            "quadrature" | "quad" => Ok(Basis::Quadrature),
            other => Err(Error::InvalidValue {
                what: "basis".into(),
                reason: format!("`{other}` is not one of doubled, quadrature"),
            }),
        }
    }
}

/// One component of a channel in either basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChannelComponent {
    Annihilation(usize),
    Creation(usize),
    X(usize),
    P(usize),
}

impl ChannelComponent {
    pub fn channel(&self) -> usize {
        match *self {
            Self::Annihilation(c) | Self::Creation(c) | Self::X(c) | Self::P(c) => c,
        }
    }

    pub fn basis(&self) -> Basis {
        match self {
            Self::Annihilation(_) | Self::Creation(_) => Basis::Doubled,
            Self::X(_) | Self::P(_) => Basis::Quadrature,
        }
    }

    /// Row/column index of this component in a matrix over `channels` channels.
    pub fn index(&self, channels: usize) -> usize {
        match *self {
            Self::Annihilation(c) => c,
            Self::Creation(c) => channels + c,
            Self::X(c) => 2 * c,
            Self::P(c) => 2 * c + 1,
        }
    }

    pub fn from_index(basis: Basis, index: usize, channels: usize) -> Self {
        match basis {
            Basis::Doubled if index < channels => Self::Annihilation(index),
            Basis::Doubled => Self::Creation(index - channels),
            Basis::Quadrature if index.is_multiple_of(2) => Self::X(index / 2),
            Basis::Quadrature => Self::P(index / 2),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScatteringResult {
    pub omega: f64,
    pub matrix: DMatrix<C64>,
    pub basis: Basis,
    pub channels: Vec<ChannelInfo>,
}

impl ScatteringResult {
    pub fn num_channels(&self) -> usize {
        self.channels.len()
    }

    /// Amplitude from input component `input` to output component `output`.
    pub fn element(&self, output: ChannelComponent, input: ChannelComponent) -> Result<C64> {
        let m = self.num_channels();
        for comp in [output, input] {
            if comp.basis() != self.basis {
                return Err(Error::InvalidValue {
                    what: "channel component".into(),
                    reason: format!("{comp:?} does not belong to the {} basis", self.basis),
                });
            }
            if comp.channel() >= m {
                return Err(Error::IndexOutOfRange {
                    what: "channel".into(),
                    index: comp.channel(),
                    len: m,
                });
            }
        }
        Ok(self.matrix[(output.index(m), input.index(m))])
    }

    /// Submatrix over the given channels (both components of each, in basis order).
    pub fn block(&self, channels: &[usize]) -> DMatrix<C64> {
        let m = self.num_channels();
        let idx: Vec<usize> = match self.basis {
            Basis::Doubled => channels.iter().copied().chain(channels.iter().map(|c| m + c)).collect(),
            Basis::Quadrature => channels.iter().flat_map(|&c| [2 * c, 2 * c + 1]).collect(),
        };
        DMatrix::from_fn(idx.len(), idx.len(), |r, c| self.matrix[(idx[r], idx[c])])
    }

    /// `M × M` block of annihilation-to-annihilation amplitudes (doubled basis only).
    pub fn annihilation_block(&self) -> Option<DMatrix<C64>> {
        (self.basis == Basis::Doubled).then(|| {
            let m = self.num_channels();
            self.matrix.view((0, 0), (m, m)).into_owned()
        })
    }

    pub fn to_basis(&self, basis: Basis) -> ScatteringResult {
        if basis == self.basis {
            return self.clone();
        }
        let t = quadrature_transform(self.num_channels());
        let matrix = match basis {
            Basis::Quadrature => &t * &self.matrix * t.adjoint(),
            Basis::Doubled => t.adjoint() * &self.matrix * &t,
        };
        ScatteringResult {
            omega: self.omega,
            matrix,
            basis,
            channels: self.channels.clone(),
        }
    }
}

/// Unitary mapping doubled channel vectors to quadrature vectors.
pub fn quadrature_transform(channels: usize) -> DMatrix<C64> {
    let m = channels;
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let mut t = DMatrix::zeros(2 * m, 2 * m);
    for j in 0..m {
        t[(2 * j, j)] = C64::new(r, 0.0);
        t[(2 * j, m + j)] = C64::new(r, 0.0);
        t[(2 * j + 1, j)] = C64::new(0.0, -r);
        t[(2 * j + 1, m + j)] = C64::new(0.0, r);
    }
    t
}

impl DriftSystem {
    /// Resolvent `(−iω − A)^{-1}`, rejecting near-singular frequencies.
    pub fn resolvent(&self, omega: f64) -> Result<DMatrix<C64>> {
        let dim = self.dimension();
        let mut m = -&self.drift;
        for j in 0..dim {
            m[(j, j)] -= C64::new(0.0, omega);
        }
        let norm = one_norm(&m);
        let inv = m.try_inverse().ok_or(Error::SingularAtFrequency { omega })?;
        if norm * one_norm(&inv) > SINGULAR_COND || inv.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::SingularAtFrequency { omega });
        }
        Ok(inv)
    }

    /// `s[ω] = I + K_out (−iω − A)^{-1} K_in`.
    pub fn scattering(&self, omega: f64, basis: Basis) -> Result<ScatteringResult> {
        let g = self.resolvent(omega)?;
        let dim = 2 * self.num_channels();
        let mut s = &self.output * g * &self.input;
        for j in 0..dim {
            s[(j, j)] += C64::new(1.0, 0.0);
        }
        let result = ScatteringResult {
            omega,
            matrix: s,
            basis: Basis::Doubled,
            channels: self.channels.clone(),
        };
        Ok(result.to_basis(basis))
    }
}

fn one_norm(m: &DMatrix<C64>) -> f64 {
    (0..m.ncols())
        .map(|c| m.column(c).iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

pub fn scattering_matrix(network: &LinearNetwork, omega: f64, basis: Basis) -> Result<ScatteringResult> {
    drift_matrix(network).scattering(omega, basis)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::langevin::bogoliubov_metric;
    use crate::network::{c, CollectiveDissipator};

    fn isolator(gamma: f64) -> LinearNetwork {
        LinearNetwork::builder()
            .modes(["d1", "d2"])
            .beam_splitter(0, 1, c(0.0, gamma / 2.0))
            .dissipator(CollectiveDissipator::lowering(gamma, vec![c(1.0, 0.0), c(1.0, 0.0)]))
            .port(0, 1.0)
            .port(1, 1.0)
            .build()
            .unwrap()
    }

    fn assert_close(a: C64, b: C64, tol: f64) {
        assert!((a - b).norm() < tol, "{a} vs {b}");
    }

    #[test]
    fn ideal_isolator_port_block() {
        let s = scattering_matrix(&isolator(1.0), 0.0, Basis::Doubled).unwrap();
        let p = s.block(&[0, 1]);
        assert_close(p[(0, 0)], c(0.0, 0.0), 1e-12);
        assert_close(p[(0, 1)], c(0.0, 0.0), 1e-12);
        assert_close(p[(1, 0)], c(1.0, 0.0), 1e-12);
        assert_close(p[(1, 1)], c(0.0, 0.0), 1e-12);
    }

    #[test]
    fn strongly_damped_isolator() {
        let s = scattering_matrix(&isolator(3.0), 0.0, Basis::Doubled).unwrap();
        let a = ChannelComponent::Annihilation;
        assert_close(s.element(a(0), a(0)).unwrap(), c(0.5, 0.0), 1e-12);
        assert_close(s.element(a(1), a(1)).unwrap(), c(0.5, 0.0), 1e-12);
        assert_close(s.element(a(1), a(0)).unwrap(), c(0.75, 0.0), 1e-12);
        assert_close(s.element(a(0), a(1)).unwrap(), c(0.0, 0.0), 1e-12);
    }

    #[test]
    fn isolator_transmission_is_lorentzian_squared() {
        let s = scattering_matrix(&isolator(1.0), 0.7, Basis::Doubled).unwrap();
        let expected = C64::new(1.0, 0.0) / (C64::new(1.0, -0.7) * C64::new(1.0, -0.7));
        assert_close(s.matrix[(1, 0)], expected, 1e-12);
    }

    #[test]
    fn bare_cavity_reflection() {
        let net = LinearNetwork::builder().mode("a").port(0, 1.0).build().unwrap();
        let s = scattering_matrix(&net, 0.0, Basis::Doubled).unwrap();
        assert_close(s.matrix[(0, 0)], c(-1.0, 0.0), 1e-15);
        let s = scattering_matrix(&net, 0.5, Basis::Doubled).unwrap();
        assert_close(s.matrix[(0, 0)], c(-0.5, -0.5) / c(0.5, -0.5), 1e-14);
    }

    #[test]
    fn quadrature_basis_is_real_and_consistent() {
        let net = LinearNetwork::builder()
            .modes(["a", "b"])
            .squeezing(0, 1, c(0.1, 0.2))
            .beam_splitter(0, 1, c(0.2, 0.1))
            .port(0, 1.0)
            .port(1, 1.3)
            .build()
            .unwrap();
        let s0 = scattering_matrix(&net, 0.0, Basis::Quadrature).unwrap();
        assert!(s0.matrix.iter().all(|z| z.im.abs() < 1e-14));
        let s = scattering_matrix(&net, 0.3, Basis::Quadrature).unwrap();
        let back = s.to_basis(Basis::Doubled);
        let direct = scattering_matrix(&net, 0.3, Basis::Doubled).unwrap();
        assert!((back.matrix - direct.matrix).norm() < 1e-13);
        assert!(s.element(ChannelComponent::Annihilation(0), ChannelComponent::X(0)).is_err());
    }

    #[test]
    fn metric_preserved_with_squeezing() {
        let net = LinearNetwork::builder()
            .modes(["a", "b"])
            .squeezing(0, 1, c(0.0, 0.3))
            .dissipator(CollectiveDissipator::new(0.4, vec![c(1.0, 0.0), c(0.0, 0.0)], vec![c(0.0, 0.0), c(0.5, 0.0)]))
            .port(0, 1.0)
            .port(1, 1.0)
            .build()
            .unwrap();
        let s = scattering_matrix(&net, 0.2, Basis::Doubled).unwrap();
        let g = bogoliubov_metric(s.matrix.nrows());
        assert!((&s.matrix * &g * s.matrix.adjoint() - &g).norm() < 1e-12);
    }

    #[test]
    fn singular_at_undamped_resonance() {
        let net = LinearNetwork::builder()
            .modes(["a", "b"])
            .detuning(1, 0.5)
            .port(0, 1.0)
            .build()
            .unwrap();
        // mode b has no damping: pole at ω = Δ = 0.5 (d) and −0.5 (d†)
        assert_eq!(
            scattering_matrix(&net, 0.5, Basis::Doubled).unwrap_err(),
            Error::SingularAtFrequency { omega: 0.5 }
        );
        assert!(scattering_matrix(&net, 0.1, Basis::Doubled).is_ok());
    }
}
