//! Adaptive Dormand–Prince 5(4) integrator over flat complex state vectors.

use num_complex::Complex64;

use crate::error::{Error, Result};

type C64 = Complex64;

#[derive(Debug, Clone, Copy)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    /// Initial step; chosen automatically when `None`.
    pub first_step: Option<f64>,
    pub min_step: f64,
    pub max_steps: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        Self {
            rtol: 1e-8,
            atol: 1e-10,
            first_step: None,
            min_step: 1e-14,
            max_steps: 1_000_000,
        }
    }
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// fifth minus fourth order weights
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

/// Integrates `y' = f(t, y)` from `t0` and records the state at each of `times`
/// (which must be sorted and `>= t0`). `observe` is called at each recorded time and may
/// abort the integration by returning an error.
pub fn integrate<F, O>(
    mut f: F,
    t0: f64,
    y0: &[C64],
    times: &[f64],
    opts: &OdeOptions,
    mut observe: O,
) -> Result<Vec<Vec<C64>>>
where
    F: FnMut(f64, &[C64], &mut [C64]),
    O: FnMut(f64, &[C64]) -> Result<()>,
{
    let n = y0.len();
    let mut y = y0.to_vec();
    let mut t = t0;
    let mut out = Vec::with_capacity(times.len());
    let mut k: Vec<Vec<C64>> = (0..7).map(|_| vec![C64::new(0.0, 0.0); n]).collect();
    let mut tmp = vec![C64::new(0.0, 0.0); n];
    let mut ynew = vec![C64::new(0.0, 0.0); n];

    f(t, &y, &mut k[0]);
    let mut h = opts.first_step.unwrap_or_else(|| initial_step(&y, &k[0], opts));
    let mut steps = 0usize;

    for &target in times {
        if target < t {
            return Err(Error::InvalidValue {
                what: "sample times".into(),
                reason: "must be sorted and not precede the start time".into(),
            });
        }
        while t < target {
            if steps >= opts.max_steps {
                return Err(Error::StepSizeUnderflow { t });
            }
            steps += 1;
            let remaining = target - t;
            let last = h >= remaining;
            let hs = if last { remaining } else { h };

            stage(&y, &k, &[A21], hs, &mut tmp);
            f(t + C2 * hs, &tmp, &mut k[1]);
            stage(&y, &k, &[A31, A32], hs, &mut tmp);
            f(t + C3 * hs, &tmp, &mut k[2]);
            stage(&y, &k, &[A41, A42, A43], hs, &mut tmp);
            f(t + C4 * hs, &tmp, &mut k[3]);
            stage(&y, &k, &[A51, A52, A53, A54], hs, &mut tmp);
            f(t + C5 * hs, &tmp, &mut k[4]);
            stage(&y, &k, &[A61, A62, A63, A64, A65], hs, &mut tmp);
            f(t + hs, &tmp, &mut k[5]);
            stage(&y, &k, &[B1, 0.0, B3, B4, B5, B6], hs, &mut ynew);
            f(t + hs, &ynew, &mut k[6]);

            let mut err = 0.0;
            for i in 0..n {
                let e = hs
                    * (E1 * k[0][i] + E3 * k[2][i] + E4 * k[3][i] + E5 * k[4][i] + E6 * k[5][i] + E7 * k[6][i]);
                let sc = opts.atol + opts.rtol * y[i].norm().max(ynew[i].norm());
                err += (e.norm() / sc).powi(2);
            }
            let err = if n > 0 { (err / n as f64).sqrt() } else { 0.0 };

            if err <= 1.0 {
                t = if last { target } else { t + hs };
                std::mem::swap(&mut y, &mut ynew);
                k.swap(0, 6);
            }
            let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
            if err <= 1.0 && last {
                // keep the pre-clipping step size for the next interval
                h = h.max(hs * factor);
            } else {
                h = hs * factor;
            }
            if h < opts.min_step {
                return Err(Error::StepSizeUnderflow { t });
            }
        }
        observe(t, &y)?;
        out.push(y.clone());
    }
    Ok(out)
}

fn stage(y: &[C64], k: &[Vec<C64>], a: &[f64], h: f64, out: &mut [C64]) {
    out.copy_from_slice(y);
    for (j, &aj) in a.iter().enumerate() {
        if aj == 0.0 {
            continue;
        }
        let s = h * aj;
        for (o, kj) in out.iter_mut().zip(&k[j]) {
            *o += s * kj;
        }
    }
}

fn initial_step(y: &[C64], dy: &[C64], opts: &OdeOptions) -> f64 {
    let mut d0: f64 = 0.0;
    let mut d1: f64 = 0.0;
    for (yi, di) in y.iter().zip(dy) {
        let sc = opts.atol + opts.rtol * yi.norm();
        d0 = d0.max(yi.norm() / sc);
        d1 = d1.max(di.norm() / sc);
    }
    let h = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    h.clamp(1e-8, 1.0)
}
