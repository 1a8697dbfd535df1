//! TOML network description.
//!
//! ```toml
//! modes = ["d1", "d2"]
//!
//! [units]
//! reference_rate_name = "kappa"
//!
//! [[couplings]]
//! from = "d1"
//! to = "d2"
//! kind = "beamsplitter"   # or "squeezing"
//! re = 0.0
//! im = 0.5
//!
//! [[dissipators]]
//! rate = 1.0
//! u = [[1.0, 0.0], [1.0, 0.0]]   # (re, im) per mode
//! v = [[0.0, 0.0], [0.0, 0.0]]
//!
//! [[ports]]
//! mode = "d1"
//! kappa = 1.0
//! occupation = 0.0
//! ```
//!
//! A beam-splitter entry sets `J_ab` and its mirror `J_ba = J_ab*`; `from = to` is a
//! detuning and must be real. A squeezing entry sets `Λ_ab = Λ_ba`.

use std::ops::Range;

use serde::{Deserialize, Serialize};
use toml::Spanned;

use crate::error::{Error, Result};
use crate::network::{c, CoherentCoupling, CollectiveDissipator, LinearNetwork, Mode, Port, C64};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CouplingKind {
    Beamsplitter,
    Squeezing,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CouplingEntry {
    pub from: String,
    pub to: String,
    pub kind: CouplingKind,
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DissipatorEntry {
    pub rate: f64,
    pub u: Vec<[f64; 2]>,
    #[serde(default)]
    pub v: Vec<[f64; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PortEntry {
    pub mode: String,
    pub kappa: f64,
    #[serde(default)]
    pub occupation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Units {
    pub reference_rate_name: String,
}

impl Default for Units {
    fn default() -> Self {
        Units {
            reference_rate_name: "kappa".into(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkConfig {
    pub modes: Vec<String>,
    #[serde(default)]
    pub units: Units,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub couplings: Vec<Spanned<CouplingEntry>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub dissipators: Vec<Spanned<DissipatorEntry>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub ports: Vec<Spanned<PortEntry>>,
    #[serde(skip)]
    source: Option<String>,
}

/// 1-based `(line, column)` of a byte offset.
fn line_col(src: &str, offset: usize) -> (usize, usize) {
    let before = &src[..offset.min(src.len())];
    let line = before.matches('\n').count() + 1;
    let col = before.rfind('\n').map_or(before.len(), |p| before.len() - p - 1) + 1;
    (line, col)
}

fn unspanned<T>(x: T) -> Spanned<T> {
    Spanned::new(0..0, x)
}

fn pair(z: C64) -> [f64; 2] {
    [z.re, z.im]
}

impl NetworkConfig {
    pub fn parse(src: &str) -> Result<Self> {
        let mut cfg: NetworkConfig = toml::from_str(src).map_err(|e| {
            let msg = e.message().trim().to_string();
            match e.span() {
                Some(span) => {
                    let (line, col) = line_col(src, span.start);
                    Error::Config(format!("line {line}, column {col}: {msg}"))
                }
                None => Error::Config(msg),
            }
        })?;
        cfg.source = Some(src.to_string());
        Ok(cfg)
    }

    pub fn from_network(net: &LinearNetwork) -> Self {
        let n = net.num_modes();
        let label = |j: usize| net.modes()[j].label.clone();
        let zero = C64::new(0.0, 0.0);
        let mut couplings = Vec::new();
        let cp = net.coupling();
        for (kind, m) in [
            (CouplingKind::Beamsplitter, &cp.beam_splitter),
            (CouplingKind::Squeezing, &cp.squeezing),
        ] {
            for a in 0..n {
                for b in a..n {
                    if m[(a, b)] != zero {
                        couplings.push(unspanned(CouplingEntry {
                            from: label(a),
                            to: label(b),
                            kind,
                            re: m[(a, b)].re,
                            im: m[(a, b)].im,
                        }));
                    }
                }
            }
        }
        NetworkConfig {
            modes: (0..n).map(label).collect(),
            units: Units {
                reference_rate_name: net.reference_rate_name().to_string(),
            },
            couplings,
            dissipators: net
                .dissipators()
                .iter()
                .map(|d| {
                    unspanned(DissipatorEntry {
                        rate: d.rate,
                        u: d.u.iter().copied().map(pair).collect(),
                        v: d.v.iter().copied().map(pair).collect(),
                    })
                })
                .collect(),
            ports: net
                .ports()
                .iter()
                .map(|p| {
                    unspanned(PortEntry {
                        mode: label(p.mode),
                        kappa: p.kappa,
                        occupation: p.occupation,
                    })
                })
                .collect(),
            source: None,
        }
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    fn locate(&self, what: &str, span: Range<usize>, msg: impl std::fmt::Display) -> Error {
        match &self.source {
            Some(src) if span.end > span.start => {
                let (line, col) = line_col(src, span.start);
                Error::Config(format!("line {line}, column {col}: {what}: {msg}"))
            }
            _ => Error::Config(format!("{what}: {msg}")),
        }
    }

    pub fn to_network(&self) -> Result<LinearNetwork> {
        let n = self.modes.len();
        let modes: Vec<Mode> = self
            .modes
            .iter()
            .enumerate()
            .map(|(index, l)| Mode {
                label: l.clone(),
                index,
            })
            .collect();
        let index = |what: &str, span: Range<usize>, label: &str| {
            self.modes
                .iter()
                .position(|m| m == label)
                .ok_or_else(|| self.locate(what, span, format!("unknown mode `{label}` (modes: {})", self.modes.join(", "))))
        };

        let mut coupling = CoherentCoupling::zeros(n);
        let mut seen = std::collections::HashSet::new();
        for (k, entry) in self.couplings.iter().enumerate() {
            let what = format!("couplings[{k}]");
            let (span, e) = (entry.span(), entry.get_ref());
            let a = index(&what, span.clone(), &e.from)?;
            let b = index(&what, span.clone(), &e.to)?;
            if !seen.insert((e.kind, a.min(b), a.max(b))) {
                return Err(self.locate(&what, span, "duplicate coupling between these modes"));
            }
            let value = c(e.re, e.im);
            match e.kind {
                CouplingKind::Beamsplitter => {
                    if a == b && e.im != 0.0 {
                        return Err(self.locate(&what, span, "a detuning must be real"));
                    }
                    coupling.set_beam_splitter(a, b, value);
                }
                CouplingKind::Squeezing => coupling.set_squeezing(a, b, value),
            }
        }

        let mut dissipators = Vec::new();
        for (k, entry) in self.dissipators.iter().enumerate() {
            let what = format!("dissipators[{k}]");
            let (span, e) = (entry.span(), entry.get_ref());
            let vec_of = |name: &str, xs: &[[f64; 2]]| -> Result<Vec<C64>> {
                match xs.len() {
                    0 => Ok(vec![C64::new(0.0, 0.0); n]),
                    len if len == n => Ok(xs.iter().map(|p| c(p[0], p[1])).collect()),
                    len => Err(self.locate(&what, span.clone(), format!("`{name}` has {len} entries for {n} modes"))),
                }
            };
            let u = vec_of("u", &e.u)?;
            let v = vec_of("v", &e.v)?;
            dissipators.push(CollectiveDissipator::new(e.rate, u, v));
        }

        let mut ports = Vec::new();
        for (k, entry) in self.ports.iter().enumerate() {
            let what = format!("ports[{k}]");
            let (span, e) = (entry.span(), entry.get_ref());
            let m = index(&what, span, &e.mode)?;
            ports.push(Port::thermal(m, e.kappa, e.occupation));
        }

        LinearNetwork::new(modes, coupling, dissipators, ports)
            .map(|net| net.with_reference_rate_name(self.units.reference_rate_name.clone()))
            .map_err(|e| match e {
                Error::Config(_) => e,
                other => Error::Config(other.to_string()),
            })
    }
}

/// Parses a config document straight into a network.
pub fn load_network(src: &str) -> Result<LinearNetwork> {
    NetworkConfig::parse(src)?.to_network()
}

#[cfg(test)]
mod tests {
    use super::*;

    const ISOLATOR: &str = r#"
modes = ["d1", "d2"]

[[couplings]]
from = "d1"
to = "d2"
kind = "beamsplitter"
re = 0.0
im = 0.5

[[dissipators]]
rate = 1.0
u = [[1.0, 0.0], [1.0, 0.0]]

[[ports]]
mode = "d1"
kappa = 1.0

[[ports]]
mode = "d2"
kappa = 1.0
occupation = 0.25
"#;

    #[test]
    fn parses_and_round_trips() {
        let net = load_network(ISOLATOR).unwrap();
        assert_eq!(net.coupling().beam_splitter[(1, 0)], c(0.0, -0.5));
        assert_eq!(net.ports()[1].occupation, 0.25);
        assert_eq!(net.reference_rate_name(), "kappa");
        let text = NetworkConfig::from_network(&net).to_toml().unwrap();
        assert_eq!(load_network(&text).unwrap(), net);
    }

    #[test]
    fn errors_carry_line_and_column() {
        let bad = ISOLATOR.replace("to = \"d2\"", "to = \"d3\"");
        let err = load_network(&bad).unwrap_err().to_string();
        assert!(err.contains("line 4, column 1") && err.contains("unknown mode `d3`"), "{err}");

        let bad = ISOLATOR.replace("rate = 1.0", "rate = \"fast\"");
        let err = load_network(&bad).unwrap_err().to_string();
        assert!(err.contains("line 12"), "{err}");

        let bad = ISOLATOR.replace("kappa = 1.0\n\n", "kappa = 1.0\nextra = 2\n\n");
        assert!(load_network(&bad).is_err());
    }

    #[test]
    fn rejects_complex_detuning_and_duplicates() {
        let bad = ISOLATOR.replace("to = \"d2\"", "to = \"d1\"");
        assert!(load_network(&bad).unwrap_err().to_string().contains("detuning"));
        let dup = format!("{ISOLATOR}\n[[couplings]]\nfrom = \"d2\"\nto = \"d1\"\nkind = \"beamsplitter\"\nre = 1.0\n");
        assert!(load_network(&dup).unwrap_err().to_string().contains("duplicate"));
    }
}
