//! Normal-ordered polynomial operators and their sparse truncated-Fock matrices.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use super::HilbertSpec;
use crate::error::{Error, Result};
use crate::network::C64;

/// `∏_m (d_m†)^{a_m} (d_m)^{b_m}` stored as sorted `(mode, a_m, b_m)` with no `(0, 0)` factors.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial(Vec<(usize, u32, u32)>);

impl Monomial {
    pub fn identity() -> Self {
        Monomial(Vec::new())
    }

    /// Builds a monomial from `(mode, creation power, annihilation power)` factors; repeated
    /// modes are multiplied together in the given order, which is only valid when the later
    /// factor carries no creation power after an annihilation power (use [`OperatorExpr`]
    /// multiplication otherwise).
    fn from_factors(factors: &[(usize, u32, u32)]) -> Self {
        let mut map: BTreeMap<usize, (u32, u32)> = BTreeMap::new();
        for &(m, a, b) in factors {
            let e = map.entry(m).or_insert((0, 0));
            e.0 += a;
            e.1 += b;
        }
        Monomial(map.into_iter().filter(|(_, (a, b))| a + b > 0).map(|(m, (a, b))| (m, a, b)).collect())
    }

    pub fn factors(&self) -> &[(usize, u32, u32)] {
        &self.0
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&(_, a, b)| a + b).sum()
    }

    fn adjoint(&self) -> Self {
        Monomial(self.0.iter().map(|&(m, a, b)| (m, b, a)).collect())
    }
}

fn binomial(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn factorial(n: u32) -> f64 {
    (1..=n).fold(1.0, |acc, i| acc * i as f64)
}

/// Normal-orders `d†^a1 d^b1 d†^a2 d^b2` into `Σ_k c_k d†^(a1+a2−k) d^(b1+b2−k)`.
fn reorder(a1: u32, b1: u32, a2: u32, b2: u32) -> Vec<(f64, u32, u32)> {
    (0..=b1.min(a2))
        .map(|k| (binomial(b1, k) * binomial(a2, k) * factorial(k), a1 + a2 - k, b1 + b2 - k))
        .collect()
}

fn multiply_monomials(x: &Monomial, y: &Monomial) -> Vec<(f64, Monomial)> {
    let modes: BTreeSet<usize> = x.0.iter().chain(y.0.iter()).map(|f| f.0).collect();
    let lookup = |m: &Monomial, mode: usize| {
        m.0.iter()
            .find(|f| f.0 == mode)
            .map(|&(_, a, b)| (a, b))
            .unwrap_or((0, 0))
    };
    let mut acc: Vec<(f64, Vec<(usize, u32, u32)>)> = vec![(1.0, Vec::new())];
    for mode in modes {
        let (a1, b1) = lookup(x, mode);
        let (a2, b2) = lookup(y, mode);
        let options = reorder(a1, b1, a2, b2);
        let mut next = Vec::with_capacity(acc.len() * options.len());
        for (coef, factors) in &acc {
            for &(c, a, b) in &options {
                let mut f = factors.clone();
                if a + b > 0 {
                    f.push((mode, a, b));
                }
                next.push((coef * c, f));
            }
        }
        acc = next;
    }
    acc.into_iter().map(|(c, f)| (c, Monomial(f))).collect()
}

/// A polynomial in mode creation and annihilation operators, kept in normal-ordered
/// canonical form.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct OperatorExpr {
    terms: BTreeMap<Monomial, C64>,
}

impl OperatorExpr {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn identity() -> Self {
        Self::scalar(C64::new(1.0, 0.0))
    }

    pub fn scalar(c: C64) -> Self {
        Self::monomial(c, &[])
    }

    /// `c ∏ d_m†^a d_m^b` over `(mode, a, b)` factors on distinct modes.
    pub fn monomial(c: C64, factors: &[(usize, u32, u32)]) -> Self {
        let mut e = Self::zero();
        e.push(Monomial::from_factors(factors), c);
        e
    }

    pub fn annihilation(mode: usize) -> Self {
        Self::monomial(C64::new(1.0, 0.0), &[(mode, 0, 1)])
    }

    pub fn creation(mode: usize) -> Self {
        Self::monomial(C64::new(1.0, 0.0), &[(mode, 1, 0)])
    }

    pub fn number(mode: usize) -> Self {
        Self::monomial(C64::new(1.0, 0.0), &[(mode, 1, 1)])
    }

    /// `X = (d + d†)/√2`
    pub fn x_quadrature(mode: usize) -> Self {
        (Self::annihilation(mode) + Self::creation(mode)) * std::f64::consts::FRAC_1_SQRT_2
    }

    /// `P = −i(d − d†)/√2`
    pub fn p_quadrature(mode: usize) -> Self {
        (Self::annihilation(mode) - Self::creation(mode)) * C64::new(0.0, -std::f64::consts::FRAC_1_SQRT_2)
    }

    fn push(&mut self, m: Monomial, c: C64) {
        if c == C64::new(0.0, 0.0) {
            return;
        }
        let entry = self.terms.entry(m.clone()).or_insert(C64::new(0.0, 0.0));
        *entry += c;
        if *entry == C64::new(0.0, 0.0) {
            self.terms.remove(&m);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &C64)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Modes the expression acts on (identity terms excluded).
    pub fn modes(&self) -> BTreeSet<usize> {
        self.terms.keys().flat_map(|m| m.0.iter().map(|f| f.0)).collect()
    }

    pub fn adjoint(&self) -> Self {
        let mut e = Self::zero();
        for (m, c) in &self.terms {
            e.push(m.adjoint(), c.conj());
        }
        e
    }

    pub fn pow(&self, n: u32) -> Self {
        (0..n).fold(Self::identity(), |acc, _| &acc * self)
    }

    pub fn commutator(&self, other: &Self) -> Self {
        self * other - other * self
    }

    /// Largest absolute deviation from Hermiticity among the coefficients.
    pub fn hermiticity_error(&self) -> f64 {
        (self - &self.adjoint()).terms.values().map(|c| c.norm()).fold(0.0, f64::max)
    }
}

impl fmt::Display for OperatorExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (m, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({}{:+}i)", c.re, c.im)?;
            for &(mode, a, b) in &m.0 {
                match a {
                    0 => {}
                    1 => write!(f, " a{mode}†")?,
                    _ => write!(f, " a{mode}†^{a}")?,
                }
                match b {
                    0 => {}
                    1 => write!(f, " a{mode}")?,
                    _ => write!(f, " a{mode}^{b}")?,
                }
            }
        }
        Ok(())
    }
}

impl Add<&OperatorExpr> for &OperatorExpr {
    type Output = OperatorExpr;
    fn add(self, rhs: &OperatorExpr) -> OperatorExpr {
        let mut e = self.clone();
        for (m, c) in &rhs.terms {
            e.push(m.clone(), *c);
        }
        e
    }
}

impl Sub<&OperatorExpr> for &OperatorExpr {
    type Output = OperatorExpr;
    fn sub(self, rhs: &OperatorExpr) -> OperatorExpr {
        self + &(-rhs)
    }
}

impl Mul<&OperatorExpr> for &OperatorExpr {
    type Output = OperatorExpr;
    fn mul(self, rhs: &OperatorExpr) -> OperatorExpr {
        let mut e = OperatorExpr::zero();
        for (mx, cx) in &self.terms {
            for (my, cy) in &rhs.terms {
                for (k, m) in multiply_monomials(mx, my) {
                    e.push(m, cx * cy * k);
                }
            }
        }
        e
    }
}

impl Neg for &OperatorExpr {
    type Output = OperatorExpr;
    fn neg(self) -> OperatorExpr {
        self * C64::new(-1.0, 0.0)
    }
}

impl Mul<C64> for &OperatorExpr {
    type Output = OperatorExpr;
    fn mul(self, rhs: C64) -> OperatorExpr {
        let mut e = OperatorExpr::zero();
        for (m, c) in &self.terms {
            e.push(m.clone(), c * rhs);
        }
        e
    }
}

macro_rules! forward_owned {
    ($($tr:ident $f:ident),*) => {$(
        impl $tr<OperatorExpr> for OperatorExpr {
            type Output = OperatorExpr;
            fn $f(self, rhs: OperatorExpr) -> OperatorExpr { (&self).$f(&rhs) }
        }
        impl $tr<&OperatorExpr> for OperatorExpr {
            type Output = OperatorExpr;
            fn $f(self, rhs: &OperatorExpr) -> OperatorExpr { (&self).$f(rhs) }
        }
        impl $tr<OperatorExpr> for &OperatorExpr {
            type Output = OperatorExpr;
            fn $f(self, rhs: OperatorExpr) -> OperatorExpr { self.$f(&rhs) }
        }
    )*};
}
forward_owned!(Add add, Sub sub, Mul mul);

impl Neg for OperatorExpr {
    type Output = OperatorExpr;
    fn neg(self) -> OperatorExpr {
        -&self
    }
}

impl Mul<C64> for OperatorExpr {
    type Output = OperatorExpr;
    fn mul(self, rhs: C64) -> OperatorExpr {
        &self * rhs
    }
}

impl Mul<f64> for OperatorExpr {
    type Output = OperatorExpr;
    fn mul(self, rhs: f64) -> OperatorExpr {
        &self * C64::new(rhs, 0.0)
    }
}

impl Mul<f64> for &OperatorExpr {
    type Output = OperatorExpr;
    fn mul(self, rhs: f64) -> OperatorExpr {
        self * C64::new(rhs, 0.0)
    }
}

/// Operator matrix on a truncated Fock space in row-sorted coordinate form.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseOp {
    dim: usize,
    entries: Vec<(usize, usize, C64)>,
}

impl SparseOp {
    fn from_entries(dim: usize, mut raw: Vec<(usize, usize, C64)>) -> Self {
        raw.sort_by_key(|e| (e.0, e.1));
        let mut entries: Vec<(usize, usize, C64)> = Vec::with_capacity(raw.len());
        for (r, c, v) in raw {
            match entries.last_mut() {
                Some(last) if last.0 == r && last.1 == c => last.2 += v,
                _ => entries.push((r, c, v)),
            }
        }
        entries.retain(|e| e.2 != C64::new(0.0, 0.0));
        SparseOp { dim, entries }
    }

    /// Matrix of `op` on the truncated space; creation operators annihilate the top level.
    pub fn compile(op: &OperatorExpr, spec: &HilbertSpec) -> Result<Self> {
        let modes = spec.num_modes();
        if let Some(&m) = op.modes().iter().next_back() {
            if m >= modes {
                return Err(Error::DimensionMismatch {
                    expected: modes,
                    found: m + 1,
                });
            }
        }
        let dim = spec.dimension();
        let mut raw = Vec::new();
        let mut occ = vec![0usize; modes];
        for col in 0..dim {
            spec.decode(col, &mut occ);
            'term: for (mono, coef) in op.terms() {
                let mut amp = *coef;
                let mut row = col;
                for &(m, a, b) in mono.factors() {
                    let n = occ[m];
                    if (b as usize) > n {
                        continue 'term;
                    }
                    let mid = n - b as usize;
                    let out = mid + a as usize;
                    if out > spec.cutoff(m) {
                        continue 'term;
                    }
                    let ratio = (mid + 1..=n).map(|k| k as f64).product::<f64>()
                        * (mid + 1..=out).map(|k| k as f64).product::<f64>();
                    amp *= ratio.sqrt();
                    row = row + out * spec.stride(m) - n * spec.stride(m);
                }
                raw.push((row, col, amp));
            }
        }
        Ok(Self::from_entries(dim, raw))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[(usize, usize, C64)] {
        &self.entries
    }

    pub fn adjoint(&self) -> Self {
        Self::from_entries(self.dim, self.entries.iter().map(|&(r, c, v)| (c, r, v.conj())).collect())
    }

    pub fn scale(&self, s: C64) -> Self {
        Self::from_entries(self.dim, self.entries.iter().map(|&(r, c, v)| (r, c, v * s)).collect())
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut raw = self.entries.clone();
        raw.extend_from_slice(&other.entries);
        Self::from_entries(self.dim, raw)
    }

    /// Product of the truncated matrices `self · other`.
    pub fn matmul(&self, other: &Self) -> Self {
        let mut by_row: Vec<Vec<(usize, C64)>> = vec![Vec::new(); self.dim];
        for &(r, c, v) in &other.entries {
            by_row[r].push((c, v));
        }
        let mut raw = Vec::new();
        for &(r, k, v) in &self.entries {
            for &(c, w) in &by_row[k] {
                raw.push((r, c, v * w));
            }
        }
        Self::from_entries(self.dim, raw)
    }

    pub fn to_dense(&self) -> nalgebra::DMatrix<C64> {
        let mut m = nalgebra::DMatrix::zeros(self.dim, self.dim);
        for &(r, c, v) in &self.entries {
            m[(r, c)] += v;
        }
        m
    }

    /// `out += s · (self · x)`
    pub fn left_mul_into(&self, x: &nalgebra::DMatrix<C64>, s: C64, out: &mut nalgebra::DMatrix<C64>) {
        for j in 0..x.ncols() {
            let xc = x.column(j);
            let mut oc = out.column_mut(j);
            for &(r, c, v) in &self.entries {
                oc[r] += s * v * xc[c];
            }
        }
    }

    /// `out += s · (x · self)`
    pub fn right_mul_into(&self, x: &nalgebra::DMatrix<C64>, s: C64, out: &mut nalgebra::DMatrix<C64>) {
        for &(r, c, v) in &self.entries {
            let sv = s * v;
            let (src, mut dst) = (x.column(r), out.column_mut(c));
            for i in 0..x.nrows() {
                dst[i] += sv * src[i];
            }
        }
    }

    /// `Tr(self · x)`
    pub fn trace_with(&self, x: &nalgebra::DMatrix<C64>) -> C64 {
        self.entries.iter().map(|&(r, c, v)| v * x[(c, r)]).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::c;

    #[test]
    fn canonical_commutation() {
        let d = OperatorExpr::annihilation(0);
        let dd = OperatorExpr::creation(0);
        assert_eq!(d.commutator(&dd), OperatorExpr::identity());
        // d² d†² = d†² d² + 4 d†d + 2
        let lhs = d.pow(2) * dd.pow(2);
        let rhs = OperatorExpr::monomial(c(1.0, 0.0), &[(0, 2, 2)])
            + OperatorExpr::number(0) * 4.0
            + OperatorExpr::identity() * 2.0;
        assert_eq!(lhs, rhs);
        // distinct modes commute
        let e = OperatorExpr::annihilation(1);
        assert!(d.commutator(&e).is_zero() && dd.commutator(&e).is_zero());
    }

    #[test]
    fn canonical_form_is_unique() {
        let x = OperatorExpr::x_quadrature(0);
        let p = OperatorExpr::p_quadrature(0);
        let comm = x.commutator(&p) - OperatorExpr::scalar(c(0.0, 1.0));
        assert!(comm.terms().all(|(_, c)| c.norm() < 1e-15));
        let a = &x * &x + &p * &p;
        let b = OperatorExpr::number(0) * 2.0 + OperatorExpr::identity();
        assert!((a - b).terms().all(|(_, c)| c.norm() < 1e-15));
        assert_eq!(x.hermiticity_error(), 0.0);
    }

    #[test]
    fn compiled_matrices() {
        let spec = HilbertSpec::new(vec![3, 2]).unwrap();
        let d0 = SparseOp::compile(&OperatorExpr::annihilation(0), &spec).unwrap();
        let d1 = SparseOp::compile(&OperatorExpr::annihilation(1), &spec).unwrap();
        assert_eq!(d0.nnz(), 3 * 3);
        // |n0=2, n1=1> → √2 |1,1>
        let col = spec.encode(&[2, 1]);
        let row = spec.encode(&[1, 1]);
        assert!((d0.to_dense()[(row, col)] - c(2f64.sqrt(), 0.0)).norm() < 1e-15);
        let comm = d0.matmul(&d1).add(&d1.matmul(&d0).scale(c(-1.0, 0.0)));
        assert_eq!(comm.nnz(), 0);
        let n = SparseOp::compile(&OperatorExpr::number(0), &spec).unwrap();
        assert!((d0.adjoint().matmul(&d0).to_dense() - n.to_dense()).norm() < 1e-14);
        assert!(SparseOp::compile(&OperatorExpr::annihilation(2), &spec).is_err());
    }
}
