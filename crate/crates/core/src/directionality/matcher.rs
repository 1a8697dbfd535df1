//! Levenberg–Marquardt search over named network parameters.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::langevin::{drift_matrix, stability, ChannelComponent};
use crate::devices::add_quadrature_coupling;
use crate::network::{LinearNetwork, C64};
use crate::noise::Quadrature;

#[derive(Debug, Clone, PartialEq)]
pub struct ParamSpec {
    pub name: String,
    /// Real parameters use one search coordinate, complex ones two.
    pub real: bool,
}

/// A family of networks indexed by named parameter values.
pub trait Parameterization {
    fn parameters(&self) -> Vec<ParamSpec>;
    fn start(&self) -> Vec<C64>;
    fn build(&self, values: &[C64]) -> Result<LinearNetwork>;
}

/// One independent entry of a network that the search may vary.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FreeParameter {
    /// `J_ab` for `a != b` (its mirror follows), or the detuning `J_aa`.
    BeamSplitter(usize, usize),
    /// `Λ_ab = Λ_ba`.
    Squeezing(usize, usize),
    DissipatorRate(usize),
    PortKappa(usize),
    /// Real coefficient `c` of a cross-mode quadrature product `c q_a q_b`, written e.g.
    /// `PX[d1,d2]` for `P₁X₂`. Other couplings between the two modes are left untouched.
    QuadratureProduct(usize, Quadrature, usize, Quadrature),
}

/// Coefficients `(c_XX, c_XP, c_PX, c_PP)` of `q_a q_b` (`a < b`) equivalent to the given
/// `J_ab`, `Λ_ab`.
fn quadrature_coefficients(j: C64, l: C64) -> [f64; 4] {
    [j.re + l.re, l.im - j.im, j.im + l.im, j.re - l.re]
}

impl FreeParameter {
    pub fn is_real(&self) -> bool {
        match *self {
            FreeParameter::BeamSplitter(a, b) => a == b,
            FreeParameter::Squeezing(..) => false,
            FreeParameter::DissipatorRate(_) | FreeParameter::PortKappa(_) => true,
            FreeParameter::QuadratureProduct(..) => true,
        }
    }

    pub fn name(&self, network: &LinearNetwork) -> String {
        let label = |j: usize| network.modes()[j].label.clone();
        match *self {
            FreeParameter::BeamSplitter(a, b) => format!("J[{},{}]", label(a), label(b)),
            FreeParameter::Squeezing(a, b) => format!("L[{},{}]", label(a), label(b)),
            FreeParameter::DissipatorRate(k) => format!("rate[{k}]"),
            FreeParameter::PortKappa(p) => format!("kappa[{}]", label(network.ports()[p].mode)),
            FreeParameter::QuadratureProduct(a, qa, b, qb) => format!("{qa}{qb}[{},{}]", label(a), label(b)),
        }
    }

    /// Every parameter name the network exposes.
    pub fn all(network: &LinearNetwork) -> Vec<FreeParameter> {
        let n = network.num_modes();
        let mut out = Vec::new();
        for a in 0..n {
            for b in a..n {
                out.push(FreeParameter::BeamSplitter(a, b));
            }
        }
        for a in 0..n {
            for b in a..n {
                out.push(FreeParameter::Squeezing(a, b));
            }
        }
        for a in 0..n {
            for b in a + 1..n {
                for qa in [Quadrature::X, Quadrature::P] {
                    for qb in [Quadrature::X, Quadrature::P] {
                        out.push(FreeParameter::QuadratureProduct(a, qa, b, qb));
                    }
                }
            }
        }
        out.extend((0..network.dissipators().len()).map(FreeParameter::DissipatorRate));
        out.extend((0..network.ports().len()).map(FreeParameter::PortKappa));
        out
    }

    /// Parses `J[a,b]`, `L[a,b]`, `XX[a,b]`, `XP[a,b]`, `PX[a,b]`, `PP[a,b]`, `rate[k]` or
    /// `kappa[a]`, where modes are given by label or 0-based index.
    pub fn parse(name: &str, network: &LinearNetwork) -> Result<FreeParameter> {
        let unknown = || Error::UnknownParameter {
            name: name.to_string(),
            available: FreeParameter::all(network)
                .iter()
                .map(|p| p.name(network))
                .collect::<Vec<_>>()
                .join(", "),
        };
        let trimmed = name.trim();
        let open = trimmed.find('[').ok_or_else(unknown)?;
        if !trimmed.ends_with(']') {
            return Err(unknown());
        }
        let head = &trimmed[..open];
        let args: Vec<&str> = trimmed[open + 1..trimmed.len() - 1].split(',').map(str::trim).collect();
        let mode = |s: &str| -> Option<usize> {
            network
                .mode_index(s)
                .or_else(|| s.parse::<usize>().ok().filter(|&i| i < network.num_modes()))
        };
        let p = match (head, args.as_slice()) {
            ("J", [a, b]) => {
                let (a, b) = (mode(a).ok_or_else(unknown)?, mode(b).ok_or_else(unknown)?);
                FreeParameter::BeamSplitter(a, b)
            }
            ("L", [a, b]) => {
                let (a, b) = (mode(a).ok_or_else(unknown)?, mode(b).ok_or_else(unknown)?);
                FreeParameter::Squeezing(a.min(b), a.max(b))
            }
            (q @ ("XX" | "XP" | "PX" | "PP"), [a, b]) => {
                let (a, b) = (mode(a).ok_or_else(unknown)?, mode(b).ok_or_else(unknown)?);
                if a == b {
                    return Err(unknown());
                }
                let quad = |ch: char| if ch == 'X' { Quadrature::X } else { Quadrature::P };
                let mut chars = q.chars();
                let (qa, qb) = (quad(chars.next().unwrap()), quad(chars.next().unwrap()));
                FreeParameter::QuadratureProduct(a, qa, b, qb)
            }
            ("rate", [k]) => {
                let k: usize = k.parse().map_err(|_| unknown())?;
                if k >= network.dissipators().len() {
                    return Err(unknown());
                }
                FreeParameter::DissipatorRate(k)
            }
            ("kappa", [a]) => {
                let m = mode(a).ok_or_else(unknown)?;
                FreeParameter::PortKappa(network.port_on_mode(m).ok_or_else(unknown)?)
            }
            _ => return Err(unknown()),
        };
        Ok(p)
    }

    /// Current value of this entry in `network`.
    pub fn get(&self, network: &LinearNetwork) -> C64 {
        match *self {
            FreeParameter::BeamSplitter(a, b) => network.coupling().beam_splitter[(a, b)],
            FreeParameter::Squeezing(a, b) => network.coupling().squeezing[(a, b)],
            FreeParameter::DissipatorRate(k) => C64::new(network.dissipators()[k].rate, 0.0),
            FreeParameter::PortKappa(p) => C64::new(network.ports()[p].kappa, 0.0),
            FreeParameter::QuadratureProduct(a, qa, b, qb) => {
                let (lo, hi, qlo, qhi) = if a < b { (a, b, qa, qb) } else { (b, a, qb, qa) };
                let c = network.coupling();
                let coef = quadrature_coefficients(c.beam_splitter[(lo, hi)], c.squeezing[(lo, hi)]);
                let k = match (qlo, qhi) {
                    (Quadrature::X, Quadrature::X) => 0,
                    (Quadrature::X, Quadrature::P) => 1,
                    (Quadrature::P, Quadrature::X) => 2,
                    (Quadrature::P, Quadrature::P) => 3,
                };
                C64::new(coef[k], 0.0)
            }
        }
    }
}

/// Free entries of an existing network, started from their current values.
#[derive(Debug, Clone)]
pub struct CouplingParameters {
    pub base: LinearNetwork,
    pub free: Vec<FreeParameter>,
}

impl CouplingParameters {
    pub fn new(base: LinearNetwork, free: Vec<FreeParameter>) -> Self {
        Self { base, free }
    }

    pub fn from_names<S: AsRef<str>>(base: LinearNetwork, names: &[S]) -> Result<Self> {
        let free = names
            .iter()
            .map(|n| FreeParameter::parse(n.as_ref(), &base))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { base, free })
    }
}

impl Parameterization for CouplingParameters {
    fn parameters(&self) -> Vec<ParamSpec> {
        self.free
            .iter()
            .map(|p| ParamSpec {
                name: p.name(&self.base),
                real: p.is_real(),
            })
            .collect()
    }

    fn start(&self) -> Vec<C64> {
        self.free.iter().map(|p| p.get(&self.base)).collect()
    }

    fn build(&self, values: &[C64]) -> Result<LinearNetwork> {
        let mut coupling = self.base.coupling().clone();
        let mut dissipators = self.base.dissipators().to_vec();
        let mut ports = self.base.ports().to_vec();
        for (p, &v) in self.free.iter().zip(values) {
            match *p {
                FreeParameter::BeamSplitter(a, b) => coupling.set_beam_splitter(a, b, v),
                FreeParameter::Squeezing(a, b) => coupling.set_squeezing(a, b, v),
                FreeParameter::DissipatorRate(k) => dissipators[k].rate = v.re,
                FreeParameter::PortKappa(i) => ports[i].kappa = v.re,
                FreeParameter::QuadratureProduct(a, qa, b, qb) => {
                    let delta = v.re - p.get(&self.base).re;
                    add_quadrature_coupling(&mut coupling, delta, (a, qa), (b, qb));
                }
            }
        }
        LinearNetwork::new(self.base.modes().to_vec(), coupling, dissipators, ports)
            .map(|n| n.with_reference_rate_name(self.base.reference_rate_name()))
    }
}

/// Weighted target on one scattering element `s_{output,input}[ω]`.
///
/// A zero target constrains the complex amplitude itself; a nonzero target constrains the
/// power `|s|²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObjectiveTerm {
    pub output: ChannelComponent,
    pub input: ChannelComponent,
    pub omega: f64,
    pub target: f64,
    pub weight: f64,
}

impl ObjectiveTerm {
    pub fn zero(output: ChannelComponent, input: ChannelComponent, omega: f64) -> Self {
        Self {
            output,
            input,
            omega,
            target: 0.0,
            weight: 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct MatchOptions {
    /// Converged once the objective drops below this.
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl Default for MatchOptions {
    fn default() -> Self {
        Self {
            tolerance: 1e-10,
            max_iterations: 500,
        }
    }
}

#[derive(Debug, Clone)]
pub struct MatchSolution {
    pub parameter_values: Vec<(String, C64)>,
    /// Final objective `Σ_k w_k r_k²`.
    pub residual: f64,
    pub converged: bool,
    pub iterations: usize,
    pub network: LinearNetwork,
}

struct Search<'a, P: Parameterization + ?Sized> {
    family: &'a P,
    specs: Vec<ParamSpec>,
    objective: &'a [ObjectiveTerm],
}

impl<P: Parameterization + ?Sized> Search<'_, P> {
    fn unpack(&self, x: &[f64]) -> Vec<C64> {
        let mut out = Vec::with_capacity(self.specs.len());
        let mut i = 0;
        for s in &self.specs {
            if s.real {
                out.push(C64::new(x[i], 0.0));
                i += 1;
            } else {
                out.push(C64::new(x[i], x[i + 1]));
                i += 2;
            }
        }
        out
    }

    fn pack(&self, values: &[C64]) -> Vec<f64> {
        let mut x = Vec::new();
        for (s, v) in self.specs.iter().zip(values) {
            x.push(v.re);
            if !s.real {
                x.push(v.im);
            }
        }
        x
    }

    /// Residual vector, or `None` when the network is invalid, unstable or singular.
    fn residuals(&self, x: &[f64]) -> Option<Vec<f64>> {
        let net = self.family.build(&self.unpack(x)).ok()?;
        if !stability(&net).stable {
            return None;
        }
        let sys = drift_matrix(&net);
        let mut r = Vec::with_capacity(2 * self.objective.len());
        for term in self.objective {
            let basis = term.output.basis();
            let s = sys.scattering(term.omega, basis).ok()?;
            let z = s.element(term.output, term.input).ok()?;
            let w = term.weight.sqrt();
            if term.target == 0.0 {
                r.push(w * z.re);
                r.push(w * z.im);
            } else {
                r.push(w * (z.norm_sqr() - term.target));
            }
        }
        Some(r)
    }

    fn jacobian(&self, x: &[f64]) -> Option<DMatrix<f64>> {
        let r0 = self.residuals(x)?;
        let mut jac = DMatrix::zeros(r0.len(), x.len());
        let mut xp = x.to_vec();
        for k in 0..x.len() {
            let h = 1e-7 * x[k].abs().max(1.0);
            xp[k] = x[k] + h;
            let rp = self.residuals(&xp);
            xp[k] = x[k] - h;
            let rm = self.residuals(&xp);
            xp[k] = x[k];
            match (rp, rm) {
                (Some(rp), Some(rm)) => {
                    for i in 0..r0.len() {
                        jac[(i, k)] = (rp[i] - rm[i]) / (2.0 * h);
                    }
                }
                (Some(rp), None) => {
                    for i in 0..r0.len() {
                        jac[(i, k)] = (rp[i] - r0[i]) / h;
                    }
                }
                (None, Some(rm)) => {
                    for i in 0..r0.len() {
                        jac[(i, k)] = (r0[i] - rm[i]) / h;
                    }
                }
                (None, None) => return None,
            }
        }
        Some(jac)
    }
}

fn cost(r: &[f64]) -> f64 {
    r.iter().map(|x| x * x).sum()
}

/// Minimizes the weighted objective over the free parameters of `family`, starting from
/// `family.start()`. Returns the local optimum nearest the start.
pub fn numeric_match<P: Parameterization + ?Sized>(
    family: &P,
    objective: &[ObjectiveTerm],
    options: &MatchOptions,
) -> Result<MatchSolution> {
    let specs = family.parameters();
    if specs.is_empty() {
        return Err(Error::NoFreeParameters);
    }
    if objective.is_empty() {
        return Err(Error::InvalidValue {
            what: "objective".into(),
            reason: "no terms".into(),
        });
    }
    let search = Search {
        family,
        specs,
        objective,
    };
    let mut x = search.pack(&family.start());
    let mut r = search.residuals(&x).ok_or(Error::UnstableDuringSearch)?;
    let mut f = cost(&r);
    let mut mu = 1e-3;
    let mut iterations = 0;

    while iterations < options.max_iterations {
        // keep polishing past the tolerance so that the parameters, not just the
        // objective, are accurate
        if f < options.tolerance * 1e-20 || f == 0.0 {
            break;
        }
        iterations += 1;
        let jac = match search.jacobian(&x) {
            Some(j) => j,
            None => return Err(Error::UnstableDuringSearch),
        };
        let jt = jac.transpose();
        let jtj = &jt * &jac;
        let g = &jt * DVector::from_column_slice(&r);
        let mut improved = false;
        while mu < 1e16 {
            let mut lhs = jtj.clone();
            for k in 0..lhs.nrows() {
                lhs[(k, k)] += mu * (jtj[(k, k)] + 1e-12);
            }
            let step = match lhs.lu().solve(&(-&g)) {
                Some(s) => s,
                None => {
                    mu *= 10.0;
                    continue;
                }
            };
            let trial: Vec<f64> = x.iter().zip(step.iter()).map(|(a, b)| a + b).collect();
            match search.residuals(&trial) {
                Some(rt) if cost(&rt) < f => {
                    let small_step = step.norm() <= 1e-15 * (1.0 + DVector::from_column_slice(&x).norm());
                    x = trial;
                    r = rt;
                    f = cost(&r);
                    mu = (mu / 10.0).max(1e-12);
                    improved = !small_step;
                    break;
                }
                _ => mu *= 10.0,
            }
        }
        if !improved {
            break;
        }
    }

    let values = search.unpack(&x);
    if f > options.tolerance {
        return Err(Error::NotConverged {
            residual: f,
            iterations,
        });
    }
    let network = family.build(&values)?;
    Ok(MatchSolution {
        parameter_values: search.specs.iter().map(|s| s.name.clone()).zip(values).collect(),
        residual: f,
        converged: true,
        iterations,
        network,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::{c, CollectiveDissipator};

    fn isolator(j: C64) -> LinearNetwork {
        LinearNetwork::builder()
            .modes(["d1", "d2"])
            .beam_splitter(0, 1, j)
            .dissipator(CollectiveDissipator::lowering(1.0, vec![c(1.0, 0.0), c(1.0, 0.0)]))
            .port(0, 1.0)
            .port(1, 1.0)
            .build()
            .unwrap()
    }

    #[test]
    fn finds_isolator_hopping() {
        let family = CouplingParameters::from_names(isolator(c(0.05, 0.45)), &["J[d1,d2]"]).unwrap();
        let obj = [ObjectiveTerm::zero(
            ChannelComponent::Annihilation(0),
            ChannelComponent::Annihilation(1),
            0.0,
        )];
        let sol = numeric_match(&family, &obj, &MatchOptions::default()).unwrap();
        assert!(sol.converged);
        assert!((sol.parameter_values[0].1 - c(0.0, 0.5)).norm() < 1e-8, "{:?}", sol.parameter_values);
    }

    #[test]
    fn quadrature_product_parameters_read_back() {
        let mut coupling = crate::network::CoherentCoupling::zeros(2);
        add_quadrature_coupling(&mut coupling, 0.7, (0, Quadrature::P), (1, Quadrature::X));
        add_quadrature_coupling(&mut coupling, -0.3, (1, Quadrature::P), (0, Quadrature::X));
        let net = isolator(c(0.0, 0.0)).with_coupling(coupling).unwrap();
        let l1 = FreeParameter::parse("PX[d1,d2]", &net).unwrap();
        let l2 = FreeParameter::parse("PX[d2,d1]", &net).unwrap();
        assert!((l1.get(&net).re - 0.7).abs() < 1e-15 && (l2.get(&net).re + 0.3).abs() < 1e-15);
        assert_eq!(l2.name(&net), "PX[d2,d1]");
        let family = CouplingParameters::new(net.clone(), vec![l1]);
        let rebuilt = family.build(&[c(0.2, 0.0)]).unwrap();
        assert!((l1.get(&rebuilt).re - 0.2).abs() < 1e-15 && (l2.get(&rebuilt).re + 0.3).abs() < 1e-15);
        assert!(FreeParameter::parse("XX[d1,d1]", &net).is_err());
    }

    #[test]
    fn zero_free_parameters() {
        let family = CouplingParameters::new(isolator(c(0.0, 0.5)), vec![]);
        let obj = [ObjectiveTerm::zero(
            ChannelComponent::Annihilation(0),
            ChannelComponent::Annihilation(1),
            0.0,
        )];
        assert_eq!(
            numeric_match(&family, &obj, &MatchOptions::default()).unwrap_err(),
            Error::NoFreeParameters
        );
    }

    #[test]
    fn unknown_names_list_alternatives() {
        let err = FreeParameter::parse("J[d1,d9]", &isolator(c(0.0, 0.5))).unwrap_err();
        match err {
            Error::UnknownParameter { available, .. } => {
                assert!(available.contains("J[d1,d2]"));
                assert!(available.contains("rate[0]"));
            }
            other => panic!("{other:?}"),
        }
        assert_eq!(
            FreeParameter::parse("L[1,0]", &isolator(c(0.0, 0.5))).unwrap(),
            FreeParameter::Squeezing(0, 1)
        );
        assert_eq!(
            FreeParameter::parse("kappa[d2]", &isolator(c(0.0, 0.5))).unwrap(),
            FreeParameter::PortKappa(1)
        );
    }

    #[test]
    fn power_target_on_transmission() {
        // tune Γ so that |s21|² = (3/4)² as for Γ = 3κ
        let net = LinearNetwork::builder()
            .modes(["d1", "d2"])
            .beam_splitter(0, 1, c(0.0, 1.0))
            .dissipator(CollectiveDissipator::lowering(2.5, vec![c(1.0, 0.0), c(1.0, 0.0)]))
            .port(0, 1.0)
            .port(1, 1.0)
            .build()
            .unwrap();
        let family = CouplingParameters::from_names(net, &["rate[0]", "J[d1,d2]"]).unwrap();
        let a = ChannelComponent::Annihilation;
        let obj = [
            ObjectiveTerm {
                output: a(1),
                input: a(0),
                omega: 0.0,
                target: 0.5625,
                weight: 1.0,
            },
            ObjectiveTerm::zero(a(0), a(1), 0.0),
        ];
        let sol = numeric_match(&family, &obj, &MatchOptions::default()).unwrap();
        assert!((sol.parameter_values[0].1.re - 3.0).abs() < 1e-5);
    }
}
