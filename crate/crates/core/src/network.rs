//! Declarative description of a linear photonic network.
//!
//! A network is a set of bosonic modes `d_j` with
//!
//! * a coherent quadratic Hamiltonian
//!   `H = Σ_jk J_jk d_j† d_k + ½ Σ_jk (Λ_jk d_j† d_k† + h.c.)`,
//!   with `J` Hermitian and `Λ` symmetric,
//! * zero-temperature collective dissipators `Γ L[z]` with linear jump operators
//!   `z = Σ_j (u_j d_j + v_j d_j†)`,
//! * input-output ports `κ L[d_j]` fed by thermal fields of occupation `n`.
//!
//! All rates are dimensionless, measured in units of a reference rate whose name is
//! carried along for reporting only.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

const HERMITIAN_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct Mode {
    pub label: String,
    pub index: usize,
}

/// Beam-splitter (`J`) and squeezing (`Λ`) coefficient matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct CoherentCoupling {
    pub beam_splitter: DMatrix<C64>,
    pub squeezing: DMatrix<C64>,
}

impl CoherentCoupling {
    pub fn zeros(n: usize) -> Self {
        Self {
            beam_splitter: DMatrix::zeros(n, n),
            squeezing: DMatrix::zeros(n, n),
        }
    }

    pub fn dim(&self) -> usize {
        self.beam_splitter.nrows()
    }

    /// Sets `J_ab` and its Hermitian mirror `J_ba = conj(J_ab)`.
    /// On the diagonal only the real part (a detuning) is kept.
    pub fn set_beam_splitter(&mut self, a: usize, b: usize, value: C64) {
        if a == b {
            self.beam_splitter[(a, a)] = C64::new(value.re, 0.0);
        } else {
            self.beam_splitter[(a, b)] = value;
            self.beam_splitter[(b, a)] = value.conj();
        }
    }

    /// Sets `Λ_ab = Λ_ba`.
    pub fn set_squeezing(&mut self, a: usize, b: usize, value: C64) {
        self.squeezing[(a, b)] = value;
        self.squeezing[(b, a)] = value;
    }

    pub fn is_passive(&self) -> bool {
        self.squeezing.iter().all(|z| z.norm() == 0.0)
    }

    fn validate(&self) -> Result<()> {
        let n = self.dim();
        if self.squeezing.nrows() != n || self.squeezing.ncols() != n || self.beam_splitter.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: self.squeezing.nrows(),
            });
        }
        for r in 0..n {
            for c in r..n {
                let j = self.beam_splitter[(r, c)];
                let jm = self.beam_splitter[(c, r)];
                if !j.re.is_finite() || !j.im.is_finite() {
                    return Err(Error::InvalidValue {
                        what: format!("J[{r},{c}]"),
                        reason: "not finite".into(),
                    });
                }
                if (j - jm.conj()).norm() > HERMITIAN_TOL * j.norm().max(1.0) {
                    return Err(Error::NonHermitianCoupling {
                        row: r,
                        col: c,
                        value: format!("{j}"),
                        mirror: format!("{jm}"),
                    });
                }
                let l = self.squeezing[(r, c)];
                let lm = self.squeezing[(c, r)];
                if !l.re.is_finite() || !l.im.is_finite() {
                    return Err(Error::InvalidValue {
                        what: format!("Λ[{r},{c}]"),
                        reason: "not finite".into(),
                    });
                }
                if (l - lm).norm() > HERMITIAN_TOL * l.norm().max(1.0) {
                    return Err(Error::AsymmetricSqueezing {
                        row: r,
                        col: c,
                        value: format!("{l}"),
                        mirror: format!("{lm}"),
                    });
                }
            }
        }
        Ok(())
    }
}

/// Collective dissipator `Γ L[z]`, `z = Σ_j (u_j d_j + v_j d_j†)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CollectiveDissipator {
    pub rate: f64,
    pub u: Vec<C64>,
    pub v: Vec<C64>,
}

impl CollectiveDissipator {
    pub fn new(rate: f64, u: Vec<C64>, v: Vec<C64>) -> Self {
        Self { rate, u, v }
    }

    /// Jump operator acting only through annihilation operators.
    pub fn lowering(rate: f64, u: Vec<C64>) -> Self {
        let n = u.len();
        Self::new(rate, u, vec![C64::new(0.0, 0.0); n])
    }

    pub fn is_null(&self) -> bool {
        self.u.iter().chain(&self.v).all(|z| z.norm() == 0.0)
    }

    pub fn is_passive(&self) -> bool {
        self.v.iter().all(|z| z.norm() == 0.0)
    }

    /// Rate `Γ'` such that `Γ L[z] = Γ' L[z_ref]`, provided `z = s·z_ref` for some
    /// complex scale `s`. Returns `None` when the two jump operators are not parallel.
    pub fn rate_relative_to(&self, u_ref: &[C64], v_ref: &[C64]) -> Option<f64> {
        let own: Vec<C64> = self.u.iter().chain(&self.v).copied().collect();
        let reference: Vec<C64> = u_ref.iter().chain(v_ref).copied().collect();
        if own.len() != reference.len() {
            return None;
        }
        let norm_ref: f64 = reference.iter().map(|z| z.norm_sqr()).sum();
        if norm_ref == 0.0 {
            return None;
        }
        // least-squares scale, then check that the residual vanishes
        let s: C64 = reference
            .iter()
            .zip(&own)
            .map(|(r, o)| r.conj() * o)
            .sum::<C64>()
            / norm_ref;
        let resid: f64 = reference
            .iter()
            .zip(&own)
            .map(|(r, o)| (o - s * r).norm_sqr())
            .sum();
        let norm_own: f64 = own.iter().map(|z| z.norm_sqr()).sum();
        if resid > 1e-20 * norm_own.max(1.0) {
            return None;
        }
        Some(self.rate * s.norm_sqr())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Port {
    pub mode: usize,
    pub kappa: f64,
    pub occupation: f64,
}

impl Port {
    pub fn new(mode: usize, kappa: f64) -> Self {
        Self {
            mode,
            kappa,
            occupation: 0.0,
        }
    }

    pub fn thermal(mode: usize, kappa: f64, occupation: f64) -> Self {
        Self {
            mode,
            kappa,
            occupation,
        }
    }
}

/// A validated linear network. Immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearNetwork {
    modes: Vec<Mode>,
    coupling: CoherentCoupling,
    dissipators: Vec<CollectiveDissipator>,
    ports: Vec<Port>,
    reference_rate_name: String,
}

impl LinearNetwork {
    /// Validates and assembles a network.
    pub fn new(
        modes: Vec<Mode>,
        coupling: CoherentCoupling,
        dissipators: Vec<CollectiveDissipator>,
        ports: Vec<Port>,
    ) -> Result<Self> {
        let n = modes.len();
        for (i, m) in modes.iter().enumerate() {
            if m.index != i {
                return Err(Error::InvalidValue {
                    what: format!("mode `{}`", m.label),
                    reason: format!("index {} but position {i}", m.index),
                });
            }
            if modes[..i].iter().any(|o| o.label == m.label) {
                return Err(Error::DuplicateLabel(m.label.clone()));
            }
        }
        if coupling.dim() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: coupling.dim(),
            });
        }
        coupling.validate()?;
        for (k, d) in dissipators.iter().enumerate() {
            if d.u.len() != n || d.v.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: d.u.len().max(d.v.len()),
                });
            }
            if !(d.rate >= 0.0) || !d.rate.is_finite() {
                return Err(Error::InvalidValue {
                    what: format!("dissipator {k} rate"),
                    reason: format!("{} is not a finite non-negative rate", d.rate),
                });
            }
            if d.is_null() {
                return Err(Error::InvalidValue {
                    what: format!("dissipator {k}"),
                    reason: "u and v are both zero".into(),
                });
            }
            if d.u.iter().chain(&d.v).any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                return Err(Error::InvalidValue {
                    what: format!("dissipator {k}"),
                    reason: "non-finite coefficient".into(),
                });
            }
        }
        for (p, port) in ports.iter().enumerate() {
            if port.mode >= n {
                return Err(Error::DanglingIndex {
                    what: format!("port {p}"),
                    index: port.mode,
                    modes: n,
                });
            }
            if ports[..p].iter().any(|o| o.mode == port.mode) {
                return Err(Error::DuplicatePort { mode: port.mode });
            }
            if !(port.kappa > 0.0) || !port.kappa.is_finite() {
                return Err(Error::InvalidValue {
                    what: format!("port {p} kappa"),
                    reason: format!("{} is not strictly positive", port.kappa),
                });
            }
            if !(port.occupation >= 0.0) || !port.occupation.is_finite() {
                return Err(Error::InvalidValue {
                    what: format!("port {p} occupation"),
                    reason: format!("{} is negative", port.occupation),
                });
            }
        }
        Ok(Self {
            modes,
            coupling,
            dissipators,
            ports,
            reference_rate_name: "kappa".into(),
        })
    }

    pub fn with_reference_rate_name(mut self, name: impl Into<String>) -> Self {
        self.reference_rate_name = name.into();
        self
    }

    pub fn builder() -> NetworkBuilder {
        NetworkBuilder::default()
    }

    pub fn num_modes(&self) -> usize {
        self.modes.len()
    }

    pub fn modes(&self) -> &[Mode] {
        &self.modes
    }

    pub fn coupling(&self) -> &CoherentCoupling {
        &self.coupling
    }

    pub fn dissipators(&self) -> &[CollectiveDissipator] {
        &self.dissipators
    }

    pub fn ports(&self) -> &[Port] {
        &self.ports
    }

    pub fn reference_rate_name(&self) -> &str {
        &self.reference_rate_name
    }

    pub fn mode_index(&self, label: &str) -> Option<usize> {
        self.modes.iter().position(|m| m.label == label)
    }

    pub fn port_on_mode(&self, mode: usize) -> Option<usize> {
        self.ports.iter().position(|p| p.mode == mode)
    }

    /// Number of noise channels: every port, then every dissipator.
    pub fn num_channels(&self) -> usize {
        self.ports.len() + self.dissipators.len()
    }

    /// True when no element can create quanta (no squeezing, no `v` in any jump operator).
    pub fn is_passive(&self) -> bool {
        self.coupling.is_passive() && self.dissipators.iter().all(|d| d.is_passive())
    }

    /// Largest rate appearing anywhere in the network, used to scale tolerances.
    pub fn rate_scale(&self) -> f64 {
        let mut s: f64 = 1.0;
        for p in &self.ports {
            s = s.max(p.kappa);
        }
        for d in &self.dissipators {
            let w: f64 = d.u.iter().chain(&d.v).map(|z| z.norm_sqr()).sum();
            s = s.max(d.rate * w);
        }
        for z in self.coupling.beam_splitter.iter().chain(self.coupling.squeezing.iter()) {
            s = s.max(z.norm());
        }
        s
    }

    /// Returns a copy with the coupling matrices replaced (and revalidated).
    pub fn with_coupling(&self, coupling: CoherentCoupling) -> Result<Self> {
        let mut out = Self::new(
            self.modes.clone(),
            coupling,
            self.dissipators.clone(),
            self.ports.clone(),
        )?;
        out.reference_rate_name = self.reference_rate_name.clone();
        Ok(out)
    }

    pub fn with_dissipators(&self, dissipators: Vec<CollectiveDissipator>) -> Result<Self> {
        let mut out = Self::new(
            self.modes.clone(),
            self.coupling.clone(),
            dissipators,
            self.ports.clone(),
        )?;
        out.reference_rate_name = self.reference_rate_name.clone();
        Ok(out)
    }

    pub fn with_ports(&self, ports: Vec<Port>) -> Result<Self> {
        let mut out = Self::new(
            self.modes.clone(),
            self.coupling.clone(),
            self.dissipators.clone(),
            ports,
        )?;
        out.reference_rate_name = self.reference_rate_name.clone();
        Ok(out)
    }

    /// Applies the mode rephasing `d_j → e^{iφ_j} d_j` to every coupling and jump operator.
    ///
    /// Ports are untouched: their input and output fields are rephased along with the
    /// mode, so scattering magnitudes and drift eigenvalues are unchanged.
    pub fn gauge_transform(&self, phases: &[f64]) -> Result<Self> {
        let n = self.num_modes();
        if phases.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: phases.len(),
            });
        }
        let ph: Vec<C64> = phases.iter().map(|&p| C64::from_polar(1.0, p)).collect();
        let mut coupling = self.coupling.clone();
        for j in 0..n {
            for k in 0..n {
                coupling.beam_splitter[(j, k)] *= ph[j].conj() * ph[k];
                coupling.squeezing[(j, k)] *= ph[j].conj() * ph[k].conj();
            }
        }
        let dissipators = self
            .dissipators
            .iter()
            .map(|d| CollectiveDissipator {
                rate: d.rate,
                u: d.u.iter().zip(&ph).map(|(u, p)| u * p).collect(),
                v: d.v.iter().zip(&ph).map(|(v, p)| v * p.conj()).collect(),
            })
            .collect();
        let mut out = Self {
            modes: self.modes.clone(),
            coupling,
            dissipators,
            ports: self.ports.clone(),
            reference_rate_name: self.reference_rate_name.clone(),
        };
        // rounding can leave the mirrored entries a few ulps apart
        out.coupling.beam_splitter = hermitian_part(&out.coupling.beam_splitter);
        out.coupling.squeezing = (&out.coupling.squeezing + out.coupling.squeezing.transpose()) * C64::new(0.5, 0.0);
        Ok(out)
    }
}

fn hermitian_part(m: &DMatrix<C64>) -> DMatrix<C64> {
    (m + m.adjoint()) * C64::new(0.5, 0.0)
}

/// Incremental constructor for [`LinearNetwork`].
#[derive(Debug, Clone, Default)]
pub struct NetworkBuilder {
    labels: Vec<String>,
    beam_splitter: Vec<(usize, usize, C64)>,
    squeezing: Vec<(usize, usize, C64)>,
    dissipators: Vec<CollectiveDissipator>,
    ports: Vec<Port>,
    reference_rate_name: Option<String>,
}

impl NetworkBuilder {
    pub fn mode(mut self, label: impl Into<String>) -> Self {
        self.labels.push(label.into());
        self
    }

    pub fn modes<S: Into<String>>(mut self, labels: impl IntoIterator<Item = S>) -> Self {
        self.labels.extend(labels.into_iter().map(Into::into));
        self
    }

    /// `J_ab d_a† d_b + h.c.` (a detuning when `a == b`).
    pub fn beam_splitter(mut self, a: usize, b: usize, value: C64) -> Self {
        self.beam_splitter.push((a, b, value));
        self
    }

    pub fn detuning(self, a: usize, delta: f64) -> Self {
        self.beam_splitter(a, a, C64::new(delta, 0.0))
    }

    /// `Λ_ab d_a† d_b† + h.c.` for `a != b`; `½ Λ_aa d_a†² + h.c.` on the diagonal.
    pub fn squeezing(mut self, a: usize, b: usize, value: C64) -> Self {
        self.squeezing.push((a, b, value));
        self
    }

    pub fn dissipator(mut self, d: CollectiveDissipator) -> Self {
        self.dissipators.push(d);
        self
    }

    pub fn port(mut self, mode: usize, kappa: f64) -> Self {
        self.ports.push(Port::new(mode, kappa));
        self
    }

    pub fn thermal_port(mut self, mode: usize, kappa: f64, occupation: f64) -> Self {
        self.ports.push(Port::thermal(mode, kappa, occupation));
        self
    }

    pub fn reference_rate_name(mut self, name: impl Into<String>) -> Self {
        self.reference_rate_name = Some(name.into());
        self
    }

    pub fn build(self) -> Result<LinearNetwork> {
        let n = self.labels.len();
        let mut coupling = CoherentCoupling::zeros(n);
        for &(a, b, v) in &self.beam_splitter {
            check_index("beam-splitter coupling", a.max(b), n)?;
            coupling.set_beam_splitter(a, b, v);
        }
        for &(a, b, v) in &self.squeezing {
            check_index("squeezing coupling", a.max(b), n)?;
            coupling.set_squeezing(a, b, v);
        }
        let modes = self
            .labels
            .into_iter()
            .enumerate()
            .map(|(index, label)| Mode { label, index })
            .collect();
        let net = LinearNetwork::new(modes, coupling, self.dissipators, self.ports)?;
        Ok(match self.reference_rate_name {
            Some(name) => net.with_reference_rate_name(name),
            None => net,
        })
    }
}

fn check_index(what: &str, index: usize, modes: usize) -> Result<()> {
    if index >= modes {
        Err(Error::DanglingIndex {
            what: what.into(),
            index,
            modes,
        })
    } else {
        Ok(())
    }
}

/// Shorthand for building complex numbers in device definitions.
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}
