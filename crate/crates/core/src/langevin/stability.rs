use nalgebra::DMatrix;

use super::drift_matrix;
use crate::network::{LinearNetwork, C64};

/// Real-part threshold (in units of the reference rate) below which a pole counts as damped.
pub const STABILITY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct StabilityReport {
    /// Drift eigenvalues sorted by decreasing real part.
    pub eigenvalues: Vec<C64>,
    pub stable: bool,
    /// Largest real part.
    pub margin: f64,
}

pub fn stability(network: &LinearNetwork) -> StabilityReport {
    let sys = drift_matrix(network);
    report_for(&sys.drift)
}

pub(crate) fn eigenvalues(m: &DMatrix<C64>) -> Vec<C64> {
    if m.nrows() == 0 {
        return Vec::new();
    }
    let schur = m.clone().schur();
    let (_, t) = schur.unpack();
    (0..t.nrows()).map(|j| t[(j, j)]).collect()
}

pub(crate) fn report_for(drift: &DMatrix<C64>) -> StabilityReport {
    let mut eigenvalues = eigenvalues(drift);
    eigenvalues.sort_by(|a, b| b.re.total_cmp(&a.re).then(a.im.total_cmp(&b.im)));
    let margin = eigenvalues.first().map_or(f64::NEG_INFINITY, |z| z.re);
    StabilityReport {
        stable: margin < -STABILITY_TOL,
        margin,
        eigenvalues,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::c;

    #[test]
    fn bare_cavity_margin() {
        let net = LinearNetwork::builder().mode("a").port(0, 1.0).build().unwrap();
        let r = stability(&net);
        assert!(r.stable);
        assert!((r.margin + 0.5).abs() < 1e-14);
        assert_eq!(r.eigenvalues.len(), 2);
    }

    #[test]
    fn two_mode_squeezing_instability() {
        // thresholds at |Λ| = κ/2
        let build = |l: f64| {
            LinearNetwork::builder()
                .modes(["a", "b"])
                .squeezing(0, 1, c(l, 0.0))
                .port(0, 1.0)
                .port(1, 1.0)
                .build()
                .unwrap()
        };
        assert!(stability(&build(0.4)).stable);
        let r = stability(&build(0.6));
        assert!(!r.stable);
        assert!((r.margin - 0.1).abs() < 1e-12);
    }

    #[test]
    fn eigenvalues_come_in_conjugate_pairs() {
        let net = LinearNetwork::builder()
            .modes(["a", "b"])
            .beam_splitter(0, 1, c(0.3, 0.7))
            .detuning(0, 0.4)
            .squeezing(0, 1, c(0.1, 0.05))
            .port(0, 1.0)
            .port(1, 0.5)
            .build()
            .unwrap();
        let r = stability(&net);
        for z in &r.eigenvalues {
            assert!(r.eigenvalues.iter().any(|w| (w - z.conj()).norm() < 1e-10));
        }
    }
}
