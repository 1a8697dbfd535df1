//! Brute-force Lindblad integration on a truncated Fock space.
//!
//! Used to cross-check the linear engine, and to test directionality with nonlinear jump
//! operators that have no Gaussian description.

mod appendix;
mod operator;

pub use appendix::{factorized_directionality_check, DirectionalityProbe, DirectionalityReport};
pub use operator::{Monomial, OperatorExpr, SparseOp};

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::langevin::Moments;
use crate::network::{LinearNetwork, C64};
use crate::ode::{integrate, OdeOptions};

pub const DEFAULT_DIMENSION_CAP: usize = 4096;
pub const LEAK_THRESHOLD: f64 = 1e-6;

/// Per-mode Fock cutoffs `n_max`; mode 0 is the slowest-varying index of the product basis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HilbertSpec {
    cutoffs: Vec<usize>,
    strides: Vec<usize>,
    dim: usize,
}

impl HilbertSpec {
    pub fn new(cutoffs: Vec<usize>) -> Result<Self> {
        Self::with_cap(cutoffs, DEFAULT_DIMENSION_CAP)
    }

    pub fn with_cap(cutoffs: Vec<usize>, cap: usize) -> Result<Self> {
        if cutoffs.is_empty() {
            return Err(Error::InvalidValue {
                what: "cutoffs".into(),
                reason: "need at least one mode".into(),
            });
        }
        if let Some(&n) = cutoffs.iter().find(|&&n| n < 2) {
            return Err(Error::InvalidValue {
                what: "cutoff".into(),
                reason: format!("{n} < 2"),
            });
        }
        let mut dim: usize = 1;
        for &n in &cutoffs {
            dim = dim.saturating_mul(n + 1);
        }
        if dim > cap {
            return Err(Error::HilbertSpaceTooLarge { dim, cap });
        }
        let mut strides = vec![1; cutoffs.len()];
        for m in (0..cutoffs.len().saturating_sub(1)).rev() {
            strides[m] = strides[m + 1] * (cutoffs[m + 1] + 1);
        }
        Ok(HilbertSpec { cutoffs, strides, dim })
    }

    pub fn uniform(modes: usize, cutoff: usize) -> Result<Self> {
        Self::new(vec![cutoff; modes])
    }

    pub fn num_modes(&self) -> usize {
        self.cutoffs.len()
    }

    pub fn dimension(&self) -> usize {
        self.dim
    }

    pub fn cutoff(&self, mode: usize) -> usize {
        self.cutoffs[mode]
    }

    pub fn cutoffs(&self) -> &[usize] {
        &self.cutoffs
    }

    pub(crate) fn stride(&self, mode: usize) -> usize {
        self.strides[mode]
    }

    pub fn encode(&self, occupations: &[usize]) -> usize {
        occupations.iter().zip(&self.strides).map(|(n, s)| n * s).sum()
    }

    pub fn decode(&self, index: usize, out: &mut [usize]) {
        let mut rest = index;
        for m in 0..self.cutoffs.len() {
            out[m] = rest / self.strides[m];
            rest %= self.strides[m];
        }
    }
}

/// Density matrix on a truncated Fock space.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    spec: HilbertSpec,
    matrix: DMatrix<C64>,
}

impl DensityMatrix {
    pub fn from_matrix(spec: &HilbertSpec, matrix: DMatrix<C64>) -> Result<Self> {
        if matrix.nrows() != spec.dimension() || matrix.ncols() != spec.dimension() {
            return Err(Error::DimensionMismatch {
                expected: spec.dimension(),
                found: matrix.nrows(),
            });
        }
        Ok(DensityMatrix {
            spec: spec.clone(),
            matrix,
        })
    }

    pub fn pure(spec: &HilbertSpec, psi: &DVector<C64>) -> Result<Self> {
        Self::from_matrix(spec, psi * psi.adjoint())
    }

    pub fn vacuum(spec: &HilbertSpec) -> Self {
        Self::fock(spec, &vec![0; spec.num_modes()]).expect("vacuum fits any cutoff")
    }

    pub fn fock(spec: &HilbertSpec, occupations: &[usize]) -> Result<Self> {
        if occupations.len() != spec.num_modes() {
            return Err(Error::DimensionMismatch {
                expected: spec.num_modes(),
                found: occupations.len(),
            });
        }
        for (m, &n) in occupations.iter().enumerate() {
            if n > spec.cutoff(m) {
                return Err(Error::IndexOutOfRange {
                    what: format!("occupation of mode {m}"),
                    index: n,
                    len: spec.cutoff(m) + 1,
                });
            }
        }
        let mut psi = DVector::zeros(spec.dimension());
        psi[spec.encode(occupations)] = C64::new(1.0, 0.0);
        Self::pure(spec, &psi)
    }

    /// Product of coherent states, each truncated at its cutoff and renormalized.
    pub fn coherent(spec: &HilbertSpec, alpha: &[C64]) -> Result<Self> {
        if alpha.len() != spec.num_modes() {
            return Err(Error::DimensionMismatch {
                expected: spec.num_modes(),
                found: alpha.len(),
            });
        }
        let locals: Vec<Vec<C64>> = alpha
            .iter()
            .enumerate()
            .map(|(m, &a)| {
                let mut v = Vec::with_capacity(spec.cutoff(m) + 1);
                let mut c = C64::new(1.0, 0.0);
                for n in 0..=spec.cutoff(m) {
                    if n > 0 {
                        c *= a / (n as f64).sqrt();
                    }
                    v.push(c);
                }
                let norm = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
                v.iter().map(|x| x / norm).collect()
            })
            .collect();
        let mut occ = vec![0; spec.num_modes()];
        let psi = DVector::from_fn(spec.dimension(), |i, _| {
            spec.decode(i, &mut occ);
            occ.iter().enumerate().map(|(m, &n)| locals[m][n]).product()
        });
        Self::pure(spec, &psi)
    }

    pub fn spec(&self) -> &HilbertSpec {
        &self.spec
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn trace(&self) -> C64 {
        self.matrix.trace()
    }

    pub fn hermiticity_error(&self) -> f64 {
        (&self.matrix - self.matrix.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        let h = (&self.matrix + self.matrix.adjoint()) * C64::new(0.5, 0.0);
        h.symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Checks Hermiticity, unit trace and positivity.
    pub fn validate(&self) -> Result<()> {
        let herm = self.hermiticity_error();
        let tr = (self.trace() - 1.0).norm();
        let min = self.min_eigenvalue();
        if herm > 1e-10 || tr > 1e-9 || min < -1e-9 {
            return Err(Error::InvalidValue {
                what: "density matrix".into(),
                reason: format!("hermiticity error {herm:.2e}, trace error {tr:.2e}, min eigenvalue {min:.2e}"),
            });
        }
        Ok(())
    }

    /// Population of the top Fock level of `mode`.
    pub fn top_level_population(&self, mode: usize) -> f64 {
        let mut occ = vec![0; self.spec.num_modes()];
        (0..self.spec.dimension())
            .filter(|&i| {
                self.spec.decode(i, &mut occ);
                occ[mode] == self.spec.cutoff(mode)
            })
            .map(|i| self.matrix[(i, i)].re)
            .sum()
    }

    /// Largest top-level population over all modes, with the mode it occurs on.
    pub fn max_leak(&self) -> (usize, f64) {
        (0..self.spec.num_modes())
            .map(|m| (m, self.top_level_population(m)))
            .fold((0, f64::NEG_INFINITY), |acc, x| if x.1 > acc.1 { x } else { acc })
    }
}

/// Compiled generator `ρ ↦ −i(H_eff ρ − ρ H_eff†) + Σ Γ_k L_k ρ L_k†`,
/// `H_eff = H − (i/2) Σ Γ_k L_k† L_k`.
#[derive(Debug, Clone)]
pub struct Liouvillian {
    spec: HilbertSpec,
    h_eff: SparseOp,
    h_eff_dag: SparseOp,
    jumps: Vec<(f64, SparseOp, SparseOp)>,
}

impl Liouvillian {
    pub fn new(spec: &HilbertSpec, hamiltonian: &OperatorExpr, jumps: &[(f64, OperatorExpr)]) -> Result<Self> {
        let mut h_eff = SparseOp::compile(hamiltonian, spec)?;
        let mut compiled = Vec::with_capacity(jumps.len());
        for (rate, op) in jumps {
            if !(rate.is_finite() && *rate >= 0.0) {
                return Err(Error::InvalidValue {
                    what: "jump rate".into(),
                    reason: format!("{rate}"),
                });
            }
            let l = SparseOp::compile(op, spec)?;
            let ld = l.adjoint();
            // the truncated product keeps the generator exactly trace preserving
            h_eff = h_eff.add(&ld.matmul(&l).scale(C64::new(0.0, -0.5 * rate)));
            compiled.push((*rate, l, ld));
        }
        Ok(Liouvillian {
            spec: spec.clone(),
            h_eff_dag: h_eff.adjoint(),
            h_eff,
            jumps: compiled,
        })
    }

    pub fn spec(&self) -> &HilbertSpec {
        &self.spec
    }

    pub fn apply(&self, rho: &DMatrix<C64>) -> DMatrix<C64> {
        let dim = self.spec.dimension();
        let mut out = DMatrix::zeros(dim, dim);
        let i = C64::new(0.0, 1.0);
        self.h_eff.left_mul_into(rho, -i, &mut out);
        self.h_eff_dag.right_mul_into(rho, i, &mut out);
        let mut tmp = DMatrix::zeros(dim, dim);
        for (rate, l, ld) in &self.jumps {
            tmp.fill(C64::new(0.0, 0.0));
            ld.right_mul_into(rho, C64::new(1.0, 0.0), &mut tmp);
            l.left_mul_into(&tmp, C64::new(*rate, 0.0), &mut out);
        }
        out
    }
}

/// `dρ/dt` of the master equation with Hamiltonian `h` and jumps `(Γ_k, ẑ_k)`.
pub fn lindblad_rhs(h: &OperatorExpr, jumps: &[(f64, OperatorExpr)], rho: &DensityMatrix) -> Result<DMatrix<C64>> {
    Ok(Liouvillian::new(rho.spec(), h, jumps)?.apply(rho.matrix()))
}

/// `Tr(op ρ)`
pub fn expectation(op: &OperatorExpr, rho: &DensityMatrix) -> Result<C64> {
    Ok(SparseOp::compile(op, rho.spec())?.trace_with(rho.matrix()))
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvolveOptions {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
    /// Abort with `TruncationLeak` when a top Fock level exceeds this population.
    pub leak_threshold: f64,
    /// Compute the smallest eigenvalue at every sample (costly for large spaces).
    pub monitor_positivity: bool,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        EvolveOptions {
            rtol: 1e-10,
            atol: 1e-12,
            max_steps: 2_000_000,
            leak_threshold: LEAK_THRESHOLD,
            monitor_positivity: false,
        }
    }
}

/// Sampled density matrices and diagnostics. The trace is not renormalized; its drift is
/// reported instead.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<DensityMatrix>,
    pub max_trace_drift: f64,
    pub max_hermiticity_error: f64,
    pub max_leak: f64,
    /// Smallest eigenvalue seen, when positivity was monitored.
    pub min_eigenvalue: Option<f64>,
}

impl Trajectory {
    pub fn expectation(&self, op: &OperatorExpr) -> Result<Vec<C64>> {
        let Some(first) = self.states.first() else {
            return Ok(Vec::new());
        };
        let sparse = SparseOp::compile(op, first.spec())?;
        Ok(self.states.iter().map(|s| sparse.trace_with(s.matrix())).collect())
    }

    pub fn moments(&self) -> Result<Vec<Moments>> {
        self.states.iter().map(moments).collect()
    }
}

/// Evolves `rho0` and samples it at `times` (sorted, starting at or after 0).
pub fn evolve(
    h: &OperatorExpr,
    jumps: &[(f64, OperatorExpr)],
    rho0: &DensityMatrix,
    times: &[f64],
    opts: &EvolveOptions,
) -> Result<Trajectory> {
    let spec = rho0.spec().clone();
    let liouvillian = Liouvillian::new(&spec, h, jumps)?;
    let dim = spec.dimension();
    let ode = OdeOptions {
        rtol: opts.rtol,
        atol: opts.atol,
        max_steps: opts.max_steps,
        ..OdeOptions::default()
    };
    let rhs = |_t: f64, y: &[C64], dy: &mut [C64]| {
        let rho = DMatrix::from_column_slice(dim, dim, y);
        dy.copy_from_slice(liouvillian.apply(&rho).as_slice());
    };
    let mut max_leak: f64 = 0.0;
    let observe = |t: f64, y: &[C64]| {
        let rho = DensityMatrix {
            spec: spec.clone(),
            matrix: DMatrix::from_column_slice(dim, dim, y),
        };
        let (mode, population) = rho.max_leak();
        max_leak = max_leak.max(population);
        if population > opts.leak_threshold {
            return Err(Error::TruncationLeak { mode, population, t });
        }
        Ok(())
    };
    let samples = integrate(rhs, 0.0, rho0.matrix().as_slice(), times, &ode, observe)?;
    let states: Vec<DensityMatrix> = samples
        .into_iter()
        .map(|y| DensityMatrix {
            spec: spec.clone(),
            matrix: DMatrix::from_column_slice(dim, dim, &y),
        })
        .collect();
    let max_trace_drift = states.iter().map(|s| (s.trace() - 1.0).norm()).fold(0.0, f64::max);
    let max_hermiticity_error = states.iter().map(|s| s.hermiticity_error()).fold(0.0, f64::max);
    let min_eigenvalue = opts
        .monitor_positivity
        .then(|| states.iter().map(|s| s.min_eigenvalue()).fold(f64::INFINITY, f64::min));
    if let Some(min) = min_eigenvalue {
        if min < -1e-9 {
            log::warn!("density matrix lost positivity: smallest eigenvalue {min:.3e}");
        }
    }
    Ok(Trajectory {
        times: times.to_vec(),
        states,
        max_trace_drift,
        max_hermiticity_error,
        max_leak,
        min_eigenvalue,
    })
}

/// Hamiltonian and jump operators of a [`LinearNetwork`]'s master equation. A thermal port
/// with occupation `n` contributes `κ(n+1) L[d] + κn L[d†]`.
#[derive(Debug, Clone, PartialEq)]
pub struct MasterEquation {
    pub hamiltonian: OperatorExpr,
    pub jumps: Vec<(f64, OperatorExpr)>,
}

impl MasterEquation {
    pub fn from_network(net: &LinearNetwork) -> Self {
        let n = net.num_modes();
        let j = &net.coupling().beam_splitter;
        let l = &net.coupling().squeezing;
        let mut h = OperatorExpr::zero();
        for a in 0..n {
            for b in 0..n {
                if j[(a, b)] != C64::new(0.0, 0.0) {
                    h = h + OperatorExpr::monomial(j[(a, b)], &[(a, 1, 0), (b, 0, 1)]);
                }
                if l[(a, b)] != C64::new(0.0, 0.0) {
                    let pair = OperatorExpr::creation(a) * OperatorExpr::creation(b) * (l[(a, b)] * 0.5);
                    h = h + &pair + pair.adjoint();
                }
            }
        }
        let mut jumps = Vec::new();
        for p in net.ports() {
            jumps.push((p.kappa * (p.occupation + 1.0), OperatorExpr::annihilation(p.mode)));
            if p.occupation > 0.0 {
                jumps.push((p.kappa * p.occupation, OperatorExpr::creation(p.mode)));
            }
        }
        for d in net.dissipators() {
            let mut z = OperatorExpr::zero();
            for m in 0..n {
                z = z + OperatorExpr::annihilation(m) * d.u[m] + OperatorExpr::creation(m) * d.v[m];
            }
            jumps.push((d.rate, z));
        }
        MasterEquation { hamiltonian: h, jumps }
    }

    pub fn liouvillian(&self, spec: &HilbertSpec) -> Result<Liouvillian> {
        Liouvillian::new(spec, &self.hamiltonian, &self.jumps)
    }

    pub fn rhs(&self, rho: &DensityMatrix) -> Result<DMatrix<C64>> {
        lindblad_rhs(&self.hamiltonian, &self.jumps, rho)
    }

    pub fn evolve(&self, rho0: &DensityMatrix, times: &[f64], opts: &EvolveOptions) -> Result<Trajectory> {
        evolve(&self.hamiltonian, &self.jumps, rho0, times, opts)
    }
}

/// Doubled-basis first and ordered second moments of a Fock-space state, in the layout of
/// the linear engine's [`Moments`].
pub fn moments(rho: &DensityMatrix) -> Result<Moments> {
    let n = rho.spec().num_modes();
    let ops: Vec<OperatorExpr> = (0..n)
        .map(OperatorExpr::annihilation)
        .chain((0..n).map(OperatorExpr::creation))
        .collect();
    let mut mean = DVector::zeros(2 * n);
    let mut second = DMatrix::zeros(2 * n, 2 * n);
    for (a, oa) in ops.iter().enumerate() {
        mean[a] = expectation(oa, rho)?;
        for (b, ob) in ops.iter().enumerate() {
            second[(a, b)] = expectation(&(oa * ob), rho)?;
        }
    }
    Ok(Moments { mean, second })
}
