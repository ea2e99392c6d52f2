//! Qutrit-level extensions for `n = 2` channels: teleporting a qutrit with the
//! ω-phase basis (imperfect in general), and inhomogeneous phase noise on the
//! receiver qutrit.
//!
//! Qutrit teleportation uses outcome index `3m + j` for `ψ_{mj}`, with
//! `ω = e^{2πi/3}`:
//!
//! ```text
//! ψ_{0j} = |00⟩ + ω^j (c|11⟩ − s|02⟩) + ω^{2j} |22⟩
//! ψ_{1j} = |10⟩ + ω^j |21⟩ + ω^{2j} (c|02⟩ + s|11⟩)
//! ψ_{2j} = |20⟩ + ω^j |01⟩ + ω^{2j} |12⟩
//! ```
//!
//! each scaled by `1/√3`.

use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::PI;

use crate::channel::SchmidtChannel;
use crate::corelin::{complete_orthonormal, project_sender, tensor, Operator, StateVec, ZERO};
use crate::error::{check_range, Error, Result};
use crate::mc::{self, McEstimate};
use crate::protocol::{cascade_params, run_teleportation, standard_bell_teleport, TeleportOutcome};
use crate::tol;

fn require_qutrit(ch: &SchmidtChannel) -> Result<()> {
    if ch.n() != 2 {
        return Err(Error::InvalidChannel(format!(
            "qutrit channel required (n = 2), got n = {}",
            ch.n()
        )));
    }
    Ok(())
}

/// Per-ket dephasing strengths, `⟨e^{iθ_j}⟩ = 1 − q_j`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NoiseSpec {
    q: [f64; 3],
}

impl NoiseSpec {
    pub fn new(q: [f64; 3]) -> Result<Self> {
        for &v in &q {
            check_range("q", v, 0.0, 1.0, "[0, 1]")?;
        }
        Ok(Self { q })
    }

    pub fn none() -> Self {
        Self { q: [0.0; 3] }
    }

    /// Noise of strength `q` on ket `j` only.
    pub fn single(j: usize, q: f64) -> Result<Self> {
        check_ket(j)?;
        let mut v = [0.0; 3];
        v[j] = q;
        Self::new(v)
    }

    pub fn q(&self) -> [f64; 3] {
        self.q
    }
}

fn check_ket(j: usize) -> Result<()> {
    if j > 2 {
        return Err(Error::OutOfRange {
            name: "ket",
            value: j as f64,
            range: "0, 1 or 2",
        });
    }
    Ok(())
}

/// Normalized qutrit `α|0⟩ + β|1⟩ + γ|2⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct QutritInput {
    state: StateVec,
}

impl QutritInput {
    pub fn new(alpha: Complex64, beta: Complex64, gamma: Complex64) -> Result<Self> {
        let state = StateVec::new(vec![alpha, beta, gamma]);
        state.check_normalized()?;
        Ok(Self { state })
    }

    pub fn from_state(state: StateVec) -> Result<Self> {
        if state.dim() != 3 {
            return Err(Error::DimensionMismatch {
                expected: 3,
                found: state.dim(),
            });
        }
        state.check_normalized()?;
        Ok(Self { state })
    }

    pub fn state(&self) -> &StateVec {
        &self.state
    }
}

fn omega_pow(k: usize) -> Complex64 {
    Complex64::from_polar(1.0, 2.0 * PI * (k % 3) as f64 / 3.0)
}

/// The nine ω-phase vectors on qutrit 1 ⊗ qutrit 2, index `3m + j`.
pub fn imperfect_basis(ch: &SchmidtChannel) -> Result<Vec<StateVec>> {
    require_qutrit(ch)?;
    let p = cascade_params(ch);
    let (c, s) = (p.c[0], p.s[0]);
    let norm = 1.0 / 3f64.sqrt();
    let ket = |a: usize, b: usize| 3 * a + b;
    let mut out = Vec::with_capacity(9);
    for m in 0..3 {
        for j in 0..3 {
            let (w1, w2) = (omega_pow(j), omega_pow(2 * j));
            let mut v = vec![ZERO; 9];
            match m {
                0 => {
                    v[ket(0, 0)] += 1.0;
                    v[ket(1, 1)] += w1 * c;
                    v[ket(0, 2)] -= w1 * s;
                    v[ket(2, 2)] += w2;
                }
                1 => {
                    v[ket(1, 0)] += 1.0;
                    v[ket(2, 1)] += w1;
                    v[ket(0, 2)] += w2 * c;
                    v[ket(1, 1)] += w2 * s;
                }
                _ => {
                    v[ket(2, 0)] += 1.0;
                    v[ket(0, 1)] += w1;
                    v[ket(1, 2)] += w2;
                }
            }
            out.push(StateVec::new(v).scaled(norm.into()));
        }
    }
    Ok(out)
}

/// Receiver images of `|0⟩`, `|1⟩`, `|2⟩` for each outcome (unnormalized).
fn qutrit_probe_images(ch: &SchmidtChannel, basis: &[StateVec]) -> Result<Vec<[StateVec; 3]>> {
    let channel = ch.state();
    let probes: Vec<StateVec> = (0..3).map(|k| tensor(&StateVec::basis(3, k), &channel)).collect();
    basis
        .iter()
        .map(|b| {
            Ok([
                project_sender(b, &probes[0], 3)?,
                project_sender(b, &probes[1], 3)?,
                project_sender(b, &probes[2], 3)?,
            ])
        })
        .collect()
}

/// Channel-only corrections for the qutrit scheme, one per outcome.
///
/// The `|0⟩`, `|1⟩` images are mapped exactly; the `|2⟩` image is
/// orthogonalized against them and mapped to `|2⟩` when it survives.
pub fn imperfect_corrections(ch: &SchmidtChannel) -> Result<Vec<Operator>> {
    let basis = imperfect_basis(ch)?;
    qutrit_probe_images(ch, &basis)?
        .iter()
        .map(|[z, o, g]| {
            let (Some(e0), Some(e1)) = (z.normalized(), o.normalized()) else {
                return Ok(Operator::identity(3));
            };
            if z.norm_sqr() <= tol::VANISHED || o.norm_sqr() <= tol::VANISHED {
                return Ok(Operator::identity(3));
            }
            let mut r = g.clone();
            for e in [&e0, &e1] {
                let k = e.inner(&r)?;
                r.add_scaled(-k, e);
            }
            let frame = if r.norm() > tol::GS_RESIDUAL {
                vec![e0, e1, r.normalized().expect("residual checked")]
            } else {
                complete_orthonormal(&[e0, e1], 3)?
            };
            Operator::from_frame(&frame)
        })
        .collect()
}

/// Reference Haar average fidelity `7/3 + (5/2)a₁² + a₀a₁ − 5/(3(1 − a₁²))`.
///
/// Only its endpoints agree with [`imperfect_teleport_mc`]; the simulated
/// average at `a₀ = 0` is `7/12`, not `1/4`.
pub fn imperfect_average_fidelity_closed(ch: &SchmidtChannel) -> Result<f64> {
    require_qutrit(ch)?;
    let (a0, a1) = (ch.a(0), ch.a(1));
    let u = a1 * a1;
    Ok(7.0 / 3.0 + 2.5 * u + a0 * a1 - 5.0 / (3.0 * (1.0 - u)))
}

/// Outcome-averaged fidelity for one qutrit input, by full projection.
pub fn imperfect_teleport(ch: &SchmidtChannel, input: &QutritInput) -> Result<f64> {
    let basis = imperfect_basis(ch)?;
    let corrections = imperfect_corrections(ch)?;
    let psi = tensor(input.state(), &ch.state());
    let mut total = 0.0;
    for (b, u) in basis.iter().zip(&corrections) {
        let phi = project_sender(b, &psi, 3)?;
        if phi.norm_sqr() <= tol::VANISHED {
            continue;
        }
        // P · |⟨in|U φ̂⟩|² = |⟨in|U φ⟩|²
        total += input.state().inner(&u.apply(&phi)?)?.norm_sqr();
    }
    Ok(total)
}

/// Per-outcome 3×3 maps `in ↦ U_k φ_k(in)`, column `k` = image of `|k⟩`.
struct CorrectedMaps(Vec<[StateVec; 3]>);

impl CorrectedMaps {
    fn new(ch: &SchmidtChannel) -> Result<Self> {
        let basis = imperfect_basis(ch)?;
        let images = qutrit_probe_images(ch, &basis)?;
        let corrections = imperfect_corrections(ch)?;
        let maps = images
            .iter()
            .zip(&corrections)
            .map(|(imgs, u)| -> Result<[StateVec; 3]> {
                Ok([u.apply(&imgs[0])?, u.apply(&imgs[1])?, u.apply(&imgs[2])?])
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self(maps))
    }

    fn fidelity(&self, input: &StateVec) -> f64 {
        let x = input.amps();
        self.0
            .iter()
            .map(|cols| {
                let mut out = StateVec::zeros(3);
                for (k, col) in cols.iter().enumerate() {
                    out.add_scaled(x[k], col);
                }
                input.inner(&out).expect("dimension 3").norm_sqr()
            })
            .sum()
    }
}

/// Haar Monte Carlo estimate of the average qutrit fidelity.
pub fn imperfect_teleport_mc(ch: &SchmidtChannel, samples: usize, seed: u64) -> Result<McEstimate> {
    check_samples(samples)?;
    let maps = CorrectedMaps::new(ch)?;
    Ok(mc::estimate(samples, seed, |rng| {
        maps.fidelity(&mc::haar_state(rng, 3))
    }))
}

fn check_samples(samples: usize) -> Result<()> {
    if samples == 0 {
        return Err(Error::OutOfRange {
            name: "samples",
            value: 0.0,
            range: ">= 1",
        });
    }
    Ok(())
}

/// Averages independent per-ket random phases: coherence `(j, k)` is scaled
/// by `(1 − q_j)(1 − q_k)`.
pub fn apply_phase_noise(rho: &Operator, noise: &NoiseSpec) -> Result<Operator> {
    if rho.dim() != 3 {
        return Err(Error::MalformedDensity(format!("expected 3x3, got {0}x{0}", rho.dim())));
    }
    if rho.hermiticity_deviation() > tol::ORTHO {
        return Err(Error::MalformedDensity("not hermitian".into()));
    }
    if (rho.trace() - 1.0).norm() > tol::ORTHO {
        return Err(Error::MalformedDensity("trace differs from 1".into()));
    }
    let keep = noise.q.map(|q| 1.0 - q);
    let mut out = rho.clone();
    for r in 0..3 {
        for c in 0..3 {
            if r != c {
                out.set(r, c, rho.get(r, c) * (keep[r] * keep[c]));
            }
        }
    }
    Ok(out)
}

pub fn apply_phase_noise_to_state(state: &StateVec, noise: &NoiseSpec) -> Result<Operator> {
    state.check_normalized()?;
    apply_phase_noise(&Operator::outer(state), noise)
}

/// Reference linear responses: `f₀ = (1+2a₀²−7a₀⁴)/(3(1+a₀²))`,
/// `f₁ = f₂ = 2a₀²(3−5a₀²)/(3(1+a₀²))`.
///
/// Dephasing the physical ket `|0⟩` actually produces the `f₁` expression and
/// dephasing `|1⟩` or `|2⟩` the `f₀` expression; see [`fit_noise_response`].
pub fn noise_response(ch: &SchmidtChannel, j: usize) -> Result<f64> {
    require_qutrit(ch)?;
    check_ket(j)?;
    let t = ch.a(0).powi(2);
    Ok(if j == 0 {
        (1.0 + 2.0 * t - 7.0 * t * t) / (3.0 * (1.0 + t))
    } else {
        2.0 * t * (3.0 - 5.0 * t) / (3.0 * (1.0 + t))
    })
}

pub fn standard_noise_response(j: usize) -> Result<f64> {
    check_ket(j)?;
    Ok(if j == 2 { 0.0 } else { 1.0 / 3.0 })
}

/// Which qubit-teleportation scheme delivers to the noisy receiver qutrit.
#[derive(Debug, Clone, PartialEq)]
pub enum Scheme {
    Perfect(SchmidtChannel),
    StandardBell,
}

impl Scheme {
    fn validate(&self) -> Result<()> {
        match self {
            Scheme::Perfect(ch) => require_qutrit(ch),
            Scheme::StandardBell => Ok(()),
        }
    }

    fn outcomes(&self, input: &StateVec) -> Result<Vec<TeleportOutcome>> {
        match self {
            Scheme::Perfect(ch) => run_teleportation(ch, input[0], input[1]),
            Scheme::StandardBell => standard_bell_teleport(input[0], input[1]),
        }
    }

    /// `Σ_k P_k ⟨in| U_k N(ρ_k) U_k† |in⟩` with the noise `N` acting on
    /// the receiver qutrit before the correction.
    pub fn noisy_fidelity(&self, input: &StateVec, noise: &NoiseSpec) -> Result<f64> {
        self.validate()?;
        let target = input.embed(3);
        let mut total = 0.0;
        for o in self.outcomes(input)?.iter().filter(|o| !o.vanished) {
            let rho = apply_phase_noise_to_state(&o.collapsed, noise)?;
            let fixed = rho.conjugated_by(&o.correction)?;
            total += o.probability * fixed.expectation(&target)?.re;
        }
        Ok(total)
    }
}

/// Haar-averaged fidelity of the perfect qubit protocol under receiver noise.
pub fn noise_fidelity_mc(ch: &SchmidtChannel, noise: &NoiseSpec, samples: usize, seed: u64) -> Result<McEstimate> {
    scheme_fidelity_mc(&Scheme::Perfect(ch.clone()), noise, samples, seed)
}

pub fn standard_noise_fidelity_mc(noise: &NoiseSpec, samples: usize, seed: u64) -> Result<McEstimate> {
    scheme_fidelity_mc(&Scheme::StandardBell, noise, samples, seed)
}

/// Per-outcome receiver images of `|0⟩`, `|1⟩` and `U_k†`, so that a noisy
/// fidelity costs a few 3×3 sums per outcome.
struct PreparedScheme {
    outcomes: Vec<(StateVec, StateVec, Operator)>,
}

impl PreparedScheme {
    fn new(scheme: &Scheme) -> Result<Self> {
        scheme.validate()?;
        let zeros = scheme.outcomes(&StateVec::basis(2, 0))?;
        let ones = scheme.outcomes(&StateVec::basis(2, 1))?;
        let outcomes = zeros
            .into_iter()
            .zip(ones)
            .filter(|(z, _)| !z.vanished)
            .map(|(z, o)| {
                let zi = z.collapsed.scaled(z.probability.sqrt().into());
                let oi = o.collapsed.scaled(o.probability.sqrt().into());
                (zi, oi, z.correction.adjoint())
            })
            .collect();
        Ok(Self { outcomes })
    }

    fn noisy_fidelity(&self, input: &StateVec, noise: &NoiseSpec) -> f64 {
        let keep = noise.q.map(|q| 1.0 - q);
        let target = input.embed(3);
        let mut total = 0.0;
        for (z, o, u_adj) in &self.outcomes {
            let mut phi = z.scaled(input[0]);
            phi.add_scaled(input[1], o);
            let w = u_adj.apply(&target).expect("dimension 3");
            // Σ_ab w̄_a φ_a φ̄_b w_b m_ab with m_aa = 1
            let g: Vec<Complex64> = w.amps().iter().zip(phi.amps()).map(|(w, p)| w.conj() * p).collect();
            let mut acc = 0.0;
            for a in 0..3 {
                for b in 0..3 {
                    let m = if a == b { 1.0 } else { keep[a] * keep[b] };
                    acc += m * (g[a] * g[b].conj()).re;
                }
            }
            total += acc;
        }
        total
    }
}

pub fn scheme_fidelity_mc(scheme: &Scheme, noise: &NoiseSpec, samples: usize, seed: u64) -> Result<McEstimate> {
    check_samples(samples)?;
    let prepared = PreparedScheme::new(scheme)?;
    Ok(mc::estimate(samples, seed, |rng| {
        prepared.noisy_fidelity(&mc::haar_state(rng, 2), noise)
    }))
}

/// Fits `f_j` in `⟨F⟩ = 1 − q f_j` from single-ket noise of strength `q`
/// on physical ket `j`. Each sample contributes `(1 − F)/q`.
pub fn fit_noise_response(scheme: &Scheme, j: usize, q: f64, samples: usize, seed: u64) -> Result<McEstimate> {
    check_samples(samples)?;
    if q <= 0.0 {
        return Err(Error::OutOfRange {
            name: "q",
            value: q,
            range: "(0, 1]",
        });
    }
    let noise = NoiseSpec::single(j, q)?;
    let prepared = PreparedScheme::new(scheme)?;
    Ok(mc::estimate(samples, seed, |rng| {
        (1.0 - prepared.noisy_fidelity(&mc::haar_state(rng, 2), &noise)) / q
    }))
}
