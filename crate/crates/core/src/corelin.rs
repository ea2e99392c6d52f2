//! Small dense complex linear algebra.
//!
//! Everything here works on owned `Vec<Complex64>` buffers. Dimensions in
//! this crate never exceed a few dozen, so there is no attempt at blocking or
//! sparsity.

use num_complex::Complex64;
use std::ops::Index;

use crate::error::{Error, Result};
use crate::tol;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// A pure-state vector (possibly unnormalized).
#[derive(Debug, Clone, PartialEq)]
pub struct StateVec {
    amps: Vec<Complex64>,
}

impl StateVec {
    pub fn new(amps: Vec<Complex64>) -> Self {
        assert!(!amps.is_empty(), "state vector must have positive dimension");
        Self { amps }
    }

    pub fn from_real(values: &[f64]) -> Self {
        Self::new(values.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn zeros(dim: usize) -> Self {
        Self::new(vec![ZERO; dim])
    }

    /// Standard basis vector `|index⟩`.
    pub fn basis(dim: usize, index: usize) -> Self {
        let mut v = Self::zeros(dim);
        v.amps[index] = ONE;
        v
    }

    /// Normalized qubit `α|0⟩ + β|1⟩`.
    pub fn qubit(alpha: Complex64, beta: Complex64) -> Result<Self> {
        let v = Self::new(vec![alpha, beta]);
        v.check_normalized()?;
        Ok(v)
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amps(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amps_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }

    pub fn into_amps(self) -> Vec<Complex64> {
        self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm_sqr() - 1.0).abs() <= tol::NORM
    }

    pub fn check_normalized(&self) -> Result<()> {
        if self.is_normalized() {
            Ok(())
        } else {
            Err(Error::NotNormalized(self.norm_sqr()))
        }
    }

    /// Returns `self / ‖self‖`, or `None` for the zero vector.
    pub fn normalized(&self) -> Option<Self> {
        let n = self.norm();
        if n == 0.0 || !n.is_finite() {
            return None;
        }
        Some(self.scaled(Complex64::new(1.0 / n, 0.0)))
    }

    pub fn scaled(&self, k: Complex64) -> Self {
        Self::new(self.amps.iter().map(|&a| a * k).collect())
    }

    /// `self += k · other`
    pub fn add_scaled(&mut self, k: Complex64, other: &Self) {
        debug_assert_eq!(self.dim(), other.dim());
        for (a, b) in self.amps.iter_mut().zip(&other.amps) {
            *a += k * b;
        }
    }

    /// `⟨self|other⟩`, antilinear in `self`.
    pub fn inner(&self, other: &Self) -> Result<Complex64> {
        same_dim(self.dim(), other.dim())?;
        Ok(self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum())
    }

    /// Zero-padded copy in a larger space.
    pub fn embed(&self, dim: usize) -> Self {
        assert!(dim >= self.dim());
        let mut amps = self.amps.clone();
        amps.resize(dim, ZERO);
        Self::new(amps)
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

impl Index<usize> for StateVec {
    type Output = Complex64;

    fn index(&self, i: usize) -> &Complex64 {
        &self.amps[i]
    }
}

/// Square complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Operator {
    dim: usize,
    entries: Vec<Complex64>,
}

impl Operator {
    pub fn from_entries(dim: usize, entries: Vec<Complex64>) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                found: entries.len(),
            });
        }
        Ok(Self { dim, entries })
    }

    pub fn identity(dim: usize) -> Self {
        let mut entries = vec![ZERO; dim * dim];
        for i in 0..dim {
            entries[i * dim + i] = ONE;
        }
        Self { dim, entries }
    }

    /// The operator `Σ_k |k⟩⟨frame_k|`, mapping each frame vector onto the
    /// corresponding standard basis vector.
    pub fn from_frame(frame: &[StateVec]) -> Result<Self> {
        let dim = frame.len();
        let mut entries = Vec::with_capacity(dim * dim);
        for v in frame {
            same_dim(dim, v.dim())?;
            entries.extend(v.amps().iter().map(|a| a.conj()));
        }
        Ok(Self { dim, entries })
    }

    /// `|v⟩⟨v|`
    pub fn outer(v: &StateVec) -> Self {
        let dim = v.dim();
        let mut entries = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                entries.push(v[i] * v[j].conj());
            }
        }
        Self { dim, entries }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row * self.dim + col]
    }

    pub fn set(&mut self, row: usize, col: usize, value: Complex64) {
        self.entries[row * self.dim + col] = value;
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn apply(&self, v: &StateVec) -> Result<StateVec> {
        same_dim(self.dim, v.dim())?;
        let out = (0..self.dim)
            .map(|i| {
                self.entries[i * self.dim..(i + 1) * self.dim]
                    .iter()
                    .zip(v.amps())
                    .map(|(m, a)| m * a)
                    .sum()
            })
            .collect();
        Ok(StateVec::new(out))
    }

    pub fn adjoint(&self) -> Self {
        let n = self.dim;
        let mut entries = vec![ZERO; n * n];
        for i in 0..n {
            for j in 0..n {
                entries[j * n + i] = self.entries[i * n + j].conj();
            }
        }
        Self { dim: n, entries }
    }

    pub fn matmul(&self, rhs: &Self) -> Result<Self> {
        same_dim(self.dim, rhs.dim)?;
        let n = self.dim;
        let mut entries = vec![ZERO; n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.entries[i * n + k];
                if a == ZERO {
                    continue;
                }
                for j in 0..n {
                    entries[i * n + j] += a * rhs.entries[k * n + j];
                }
            }
        }
        Ok(Self { dim: n, entries })
    }

    /// `U ρ U†`
    pub fn conjugated_by(&self, u: &Self) -> Result<Self> {
        u.matmul(self)?.matmul(&u.adjoint())
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    /// `⟨v|self|v⟩`
    pub fn expectation(&self, v: &StateVec) -> Result<Complex64> {
        v.inner(&self.apply(v)?)
    }

    /// `max |U†U − I|` over entries.
    pub fn unitarity_deviation(&self) -> f64 {
        let prod = self.adjoint().matmul(self).expect("adjoint has matching dimension");
        max_deviation_from_identity(&prod)
    }

    pub fn is_unitary(&self) -> bool {
        self.unitarity_deviation() <= tol::ORTHO
    }

    pub fn hermiticity_deviation(&self) -> f64 {
        let n = self.dim;
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                worst = worst.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        worst
    }
}

fn max_deviation_from_identity(m: &Operator) -> f64 {
    let n = m.dim;
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            let target = if i == j { ONE } else { ZERO };
            worst = worst.max((m.get(i, j) - target).norm());
        }
    }
    worst
}

fn same_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}

/// Kronecker product; the first factor is the most significant index.
pub fn tensor(a: &StateVec, b: &StateVec) -> StateVec {
    let mut out = Vec::with_capacity(a.dim() * b.dim());
    for x in a.amps() {
        for y in b.amps() {
            out.push(x * y);
        }
    }
    StateVec::new(out)
}

/// Partial inner product `₁₂⟨bra|psi⟩₁₂₃`, leaving an unnormalized vector on
/// the last `dim3` levels. Its squared norm is the outcome probability.
pub fn project_sender(bra: &StateVec, psi: &StateVec, dim3: usize) -> Result<StateVec> {
    if dim3 == 0 || bra.dim() * dim3 != psi.dim() {
        return Err(Error::DimensionMismatch {
            expected: bra.dim() * dim3,
            found: psi.dim(),
        });
    }
    bra.check_normalized()?;
    let mut out = vec![ZERO; dim3];
    for (row, b) in bra.amps().iter().enumerate() {
        if *b == ZERO {
            continue;
        }
        let bc = b.conj();
        for (o, p) in out.iter_mut().zip(&psi.amps()[row * dim3..(row + 1) * dim3]) {
            *o += bc * p;
        }
    }
    Ok(StateVec::new(out))
}

/// Squared overlap `|⟨a|b⟩|²` of two normalized states.
pub fn fidelity(a: &StateVec, b: &StateVec) -> Result<f64> {
    same_dim(a.dim(), b.dim())?;
    a.check_normalized()?;
    b.check_normalized()?;
    Ok(a.inner(b)?.norm_sqr().min(1.0))
}

/// `max |G − I|` for the Gram matrix of `vectors`.
pub fn gram_deviation(vectors: &[StateVec]) -> f64 {
    let mut worst: f64 = 0.0;
    for (i, u) in vectors.iter().enumerate() {
        for (j, v) in vectors.iter().enumerate().skip(i) {
            let g = u.inner(v).expect("gram vectors share a dimension");
            let target = if i == j { ONE } else { ZERO };
            worst = worst.max((g - target).norm());
        }
    }
    worst
}

/// Extends mutually orthonormal `seeds` to an orthonormal basis of a
/// `dim`-dimensional space by Gram-Schmidt over `|0⟩, |1⟩, …` in order.
pub fn complete_orthonormal(seeds: &[StateVec], dim: usize) -> Result<Vec<StateVec>> {
    for s in seeds {
        same_dim(dim, s.dim())?;
    }
    let dev = gram_deviation(seeds);
    if dev > tol::ORTHO {
        return Err(Error::NotOrthonormal(dev));
    }
    if seeds.len() > dim {
        return Err(Error::NotOrthonormal(f64::INFINITY));
    }
    let mut out: Vec<StateVec> = seeds.to_vec();
    for k in 0..dim {
        if out.len() == dim {
            break;
        }
        let mut r = StateVec::basis(dim, k);
        // two passes keep the residual orthogonal to machine precision
        for _ in 0..2 {
            for q in &out {
                let c = q.inner(&r)?;
                r.add_scaled(-c, q);
            }
        }
        if r.norm() < tol::GS_RESIDUAL {
            continue;
        }
        out.push(r.normalized().expect("residual norm is positive"));
    }
    Ok(out)
}
