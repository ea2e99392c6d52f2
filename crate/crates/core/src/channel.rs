//! Two-qudit channels `Σ_i a_i |i⟩₂|i⟩₃` with ascending Schmidt coefficients
//! and equal top two.

use rand_distr::{Distribution, Exp1};
use serde::Deserialize;

use crate::corelin::StateVec;
use crate::error::{check_range, Error, Result};
use crate::mc::{self, Rng};
use crate::metrics::shannon_bits;
use crate::{fmt17, tol};

#[derive(Debug, Clone, PartialEq)]
pub struct SchmidtChannel {
    coeffs: Vec<f64>,
}

impl SchmidtChannel {
    /// Validates `coeffs` (a₀ ≤ … ≤ a_{n−1} = a_n, Σa² = 1).
    ///
    /// Inputs whose squared norm is within `1e-6` of one are renormalized;
    /// deviations at the `1e-12` level in ordering and top-two equality are
    /// snapped away.
    pub fn new(coeffs: &[f64]) -> Result<Self> {
        let invalid = |msg: String| Err(Error::InvalidChannel(msg));
        if coeffs.len() < 3 {
            return invalid(format!("need at least 3 coefficients (n >= 2), got {}", coeffs.len()));
        }
        if let Some((i, a)) = coeffs.iter().enumerate().find(|(_, a)| !a.is_finite() || **a < 0.0) {
            return invalid(format!("negative or non-finite coefficient a_{i} = {a}"));
        }
        if let Some(i) = (0..coeffs.len() - 1).find(|&i| coeffs[i] > coeffs[i + 1] + tol::NORM) {
            return invalid(format!(
                "not ascending: a_{i} = {} > a_{} = {}",
                coeffs[i],
                i + 1,
                coeffs[i + 1]
            ));
        }
        let n = coeffs.len() - 1;
        if (coeffs[n - 1] - coeffs[n]).abs() > tol::NORM {
            return invalid(format!(
                "two largest coefficients differ: a_{} = {} vs a_{n} = {}",
                n - 1,
                coeffs[n - 1],
                coeffs[n]
            ));
        }
        if coeffs[n] <= 0.0 {
            return invalid("largest coefficient is zero".into());
        }
        let norm_sqr: f64 = coeffs.iter().map(|a| a * a).sum();
        if (norm_sqr - 1.0).abs() > tol::RENORMALIZE {
            return invalid(format!("not normalized: sum of squares is {norm_sqr}"));
        }

        let mut a = coeffs.to_vec();
        let top = 0.5 * (a[n - 1] + a[n]);
        a[n - 1] = top;
        a[n] = top;
        for i in (0..n - 1).rev() {
            a[i] = a[i].min(a[i + 1]);
        }
        let snapped: f64 = a.iter().map(|x| x * x).sum();
        if (snapped - 1.0).abs() > 4.0 * f64::EPSILON {
            let scale = 1.0 / snapped.sqrt();
            a.iter_mut().for_each(|x| *x *= scale);
        }
        Ok(Self { coeffs: a })
    }

    /// Vertex state: first `tau` coefficients zero, the rest `1/√(n+1−τ)`.
    pub fn vertex(n: usize, tau: usize) -> Result<Self> {
        check_n(n, 2)?;
        if tau >= n {
            return Err(Error::OutOfRange {
                name: "tau",
                value: tau as f64,
                range: "[0, n-1]",
            });
        }
        let v = 1.0 / ((n + 1 - tau) as f64).sqrt();
        let coeffs: Vec<f64> = (0..=n).map(|i| if i < tau { 0.0 } else { v }).collect();
        Self::new(&coeffs)
    }

    /// Case I: `a₀ = … = a_{n−2} = x·a_n`.
    pub fn case1(n: usize, x: f64) -> Result<Self> {
        check_n(n, 2)?;
        check_range("x", x, 0.0, 1.0, "[0, 1]")?;
        let top = 1.0 / (2.0 + (n as f64 - 1.0) * x * x).sqrt();
        let mut coeffs = vec![x * top; n - 1];
        coeffs.extend([top, top]);
        Self::new(&coeffs)
    }

    /// Case II: `a₀ = … = a_{n−3} = 0`, `a_{n−2} = y·a_n`.
    pub fn case2(n: usize, y: f64) -> Result<Self> {
        check_n(n, 3)?;
        check_range("y", y, 0.0, 1.0, "[0, 1]")?;
        let top = 1.0 / (2.0 + y * y).sqrt();
        let mut coeffs = vec![0.0; n - 2];
        coeffs.extend([y * top, top, top]);
        Self::new(&coeffs)
    }

    /// Qutrit channel `(a₀, a₁, a₁)` with `a₁ = √((1 − a₀²)/2)`.
    pub fn qutrit(a0: f64) -> Result<Self> {
        check_range("a0", a0, 0.0, (1.0f64 / 3.0).sqrt() + tol::NORM, "[0, 1/sqrt(3)]")?;
        let a1 = ((1.0 - a0 * a0) / 2.0).sqrt();
        Self::new(&[a0.min(a1), a1, a1])
    }

    /// Random channel from a fixed seed. See [`SchmidtChannel::sample_with`].
    pub fn sample_random(n: usize, seed: u64) -> Result<Self> {
        Self::sample_with(&mut mc::rng_from_seed(seed), n)
    }

    /// Squared coefficients from the flat Dirichlet on the simplex, sorted
    /// ascending, with the top two replaced by their mean.
    pub fn sample_with(rng: &mut Rng, n: usize) -> Result<Self> {
        check_n(n, 2)?;
        let mut w: Vec<f64> = (0..=n).map(|_| Exp1.sample(rng)).collect();
        let total: f64 = w.iter().sum();
        w.iter_mut().for_each(|x| *x /= total);
        w.sort_by(f64::total_cmp);
        let top = 0.5 * (w[n - 1] + w[n]);
        w[n - 1] = top;
        w[n] = top;
        let coeffs: Vec<f64> = w.iter().map(|p| p.sqrt()).collect();
        Self::new(&coeffs)
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Largest level index; the qudit dimension is `n + 1`.
    pub fn n(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    pub fn a(&self, i: usize) -> f64 {
        self.coeffs[i]
    }

    /// Channel state on qudits 2⊗3.
    pub fn state(&self) -> StateVec {
        let d = self.dim();
        let mut amps = vec![0.0; d * d];
        for (i, a) in self.coeffs.iter().enumerate() {
            amps[i * d + i] = *a;
        }
        StateVec::from_real(&amps)
    }

    /// Entanglement entropy in bits.
    pub fn entropy(&self) -> f64 {
        shannon_bits(self.coeffs.iter().map(|a| a * a))
    }

    pub fn to_json(&self) -> String {
        let coeffs: Vec<String> = self.coeffs.iter().map(|&a| fmt17(a)).collect();
        format!("{{\"n\":{},\"coeffs\":[{}]}}", self.n(), coeffs.join(","))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        #[derive(Deserialize)]
        struct Raw {
            n: usize,
            coeffs: Vec<f64>,
        }
        let raw: Raw =
            serde_json::from_str(text).map_err(|e| Error::InvalidChannel(format!("malformed channel JSON: {e}")))?;
        if raw.coeffs.len() != raw.n + 1 {
            return Err(Error::InvalidChannel(format!(
                "n = {} but {} coefficients given",
                raw.n,
                raw.coeffs.len()
            )));
        }
        Self::new(&raw.coeffs)
    }
}

pub fn channel_entropy(ch: &SchmidtChannel) -> f64 {
    ch.entropy()
}

fn check_n(n: usize, min: usize) -> Result<()> {
    if n >= min {
        Ok(())
    } else {
        Err(Error::OutOfRange {
            name: "n",
            value: n as f64,
            range: if min == 2 { "n >= 2" } else { "n >= 3" },
        })
    }
}
