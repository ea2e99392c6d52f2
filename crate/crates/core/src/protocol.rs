//! Alice's joint measurement, Bob's corrections and the end-to-end run.
//!
//! The measurement acts on qubit 1 ⊗ qudit 2 (dimension `2(n+1)`), indexed
//! `q·(n+1) + i` for `|q, i⟩`. Outcomes are labelled `(j, ±)` with
//! `j ∈ 0..=n`; [`Label::index`] gives the position `2j` / `2j + 1` used by
//! every list returned from this module.
//!
//! Two independent constructions of the basis are provided: the rotation
//! cascade `u_{n−2} ⋯ u_0` applied to the translation-strategy basis, and the
//! expanded closed form. [`oracle_teleport`] recomputes everything from
//! partial projections only.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::FRAC_1_SQRT_2;

use crate::channel::SchmidtChannel;
use crate::corelin::{self, complete_orthonormal, project_sender, tensor, Operator, StateVec, ONE, ZERO};
use crate::error::{Error, Result};
use crate::tol;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sign {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

impl Sign {
    pub fn factor(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Label {
    pub j: usize,
    pub sign: Sign,
}

impl Label {
    pub fn new(j: usize, sign: Sign) -> Self {
        Self { j, sign }
    }

    pub fn index(self) -> usize {
        2 * self.j + usize::from(self.sign == Sign::Minus)
    }

    /// `(0,+), (0,−), (1,+), …, (n,−)`
    pub fn all(n: usize) -> impl Iterator<Item = Label> {
        (0..=n).flat_map(|j| [Label::new(j, Sign::Plus), Label::new(j, Sign::Minus)])
    }
}

impl std::fmt::Display for Label {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = if self.sign == Sign::Plus { '+' } else { '-' };
        write!(f, "{}{}", self.j, s)
    }
}

/// Rotation parameters `(c_k, s_k)`, `k = 0..n`.
#[derive(Debug, Clone, PartialEq)]
pub struct CascadeParams {
    pub c: Vec<f64>,
    pub s: Vec<f64>,
}

impl CascadeParams {
    /// `Π_{k ∈ range} c_k`; empty ranges give 1.
    pub fn prod_c(&self, range: std::ops::Range<usize>) -> f64 {
        if range.start >= range.end {
            return 1.0;
        }
        self.c[range].iter().product()
    }
}

pub fn cascade_params(ch: &SchmidtChannel) -> CascadeParams {
    let n = ch.n();
    let mut c = Vec::with_capacity(n);
    let mut s = Vec::with_capacity(n);
    for k in 0..n {
        let next = ch.a(k + 1);
        if k == n - 1 || next == 0.0 {
            c.push(1.0);
            s.push(0.0);
        } else {
            let r = (ch.a(k) / next).powi(2).min(1.0);
            c.push((0.5 * (1.0 + r)).sqrt());
            s.push((0.5 * (1.0 - r)).sqrt());
        }
    }
    CascadeParams { c, s }
}

/// The `2(n+1)` measurement vectors, stored in [`Label::index`] order.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementBasis {
    n: usize,
    vectors: Vec<StateVec>,
}

impl MeasurementBasis {
    /// Wraps `2(n+1)` vectors of dimension `2(n+1)`.
    pub fn from_vectors(n: usize, vectors: Vec<StateVec>) -> Result<Self> {
        let dim = 2 * (n + 1);
        if vectors.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: vectors.len(),
            });
        }
        if let Some(v) = vectors.iter().find(|v| v.dim() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: v.dim(),
            });
        }
        Ok(Self { n, vectors })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn vectors(&self) -> &[StateVec] {
        &self.vectors
    }

    pub fn vector(&self, label: Label) -> &StateVec {
        &self.vectors[label.index()]
    }

    pub fn labels(&self) -> impl Iterator<Item = Label> {
        Label::all(self.n)
    }

    pub fn gram_deviation(&self) -> f64 {
        corelin::gram_deviation(&self.vectors)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.vectors
            .iter()
            .zip(&other.vectors)
            .map(|(a, b)| a.max_abs_diff(b))
            .fold(0.0, f64::max)
    }
}

/// Sparse builder for real vectors on qubit ⊗ qudit.
struct KetBuilder {
    d: usize,
    amps: Vec<f64>,
}

impl KetBuilder {
    fn new(d: usize) -> Self {
        Self {
            d,
            amps: vec![0.0; 2 * d],
        }
    }

    fn add(&mut self, qubit: usize, level: usize, value: f64) -> &mut Self {
        self.amps[qubit * self.d + level] += value;
        self
    }

    fn finish(&self) -> StateVec {
        StateVec::from_real(&self.amps)
    }
}

/// Translation-strategy basis for the vertex channel `Φ^(τ)`: Bell-like pairs
/// for `j ≥ τ` and the product kets `|0k⟩` (`+`) and `|1k⟩` (`−`) for `k < τ`.
pub fn extreme_basis(n: usize, tau: usize) -> Result<MeasurementBasis> {
    if n < 2 || tau >= n {
        return Err(Error::OutOfRange {
            name: "tau",
            value: tau as f64,
            range: "[0, n-1] with n >= 2",
        });
    }
    let d = n + 1;
    let h = FRAC_1_SQRT_2;
    let mut vectors = Vec::with_capacity(2 * d);
    for label in Label::all(n) {
        let mut b = KetBuilder::new(d);
        let j = label.j;
        if j < tau {
            let qubit = usize::from(label.sign == Sign::Minus);
            b.add(qubit, j, 1.0);
        } else if j < n {
            b.add(0, j, h).add(1, j + 1, label.sign.factor() * h);
        } else {
            b.add(0, n, h).add(1, tau, label.sign.factor() * h);
        }
        vectors.push(b.finish());
    }
    MeasurementBasis::from_vectors(n, vectors)
}

/// Applies `u_k` (rotation of `|0n⟩`, `|1,k+1⟩` by `(c_k, s_k)`) in place.
fn apply_rotation(v: &mut StateVec, n: usize, k: usize, c: f64, s: f64) {
    let d = n + 1;
    let (i0, i1) = (n, d + k + 1);
    let amps = v.amps_mut();
    let (x, y) = (amps[i0], amps[i1]);
    amps[i0] = x * c - y * s;
    amps[i1] = x * s + y * c;
}

pub fn build_basis_cascade(ch: &SchmidtChannel) -> MeasurementBasis {
    let n = ch.n();
    let params = cascade_params(ch);
    let mut basis = extreme_basis(n, 0).expect("tau = 0 is always valid");
    for v in &mut basis.vectors {
        for k in 0..n - 1 {
            apply_rotation(v, n, k, params.c[k], params.s[k]);
        }
    }
    basis
}

pub fn build_basis_closed_form(ch: &SchmidtChannel) -> MeasurementBasis {
    let n = ch.n();
    let d = n + 1;
    let p = cascade_params(ch);
    let h = FRAC_1_SQRT_2;
    let mut vectors = Vec::with_capacity(2 * d);
    for label in Label::all(n) {
        let pm = label.sign.factor();
        let j = label.j;
        let mut b = KetBuilder::new(d);
        if j < n {
            b.add(0, j, h).add(1, j + 1, pm * h * p.c[j]);
            b.add(0, n, -pm * h * p.s[j] * p.prod_c(j + 1..n - 1));
            for l in j + 1..n - 1 {
                b.add(1, l + 1, -pm * h * p.s[j] * p.prod_c(j + 1..l) * p.s[l]);
            }
        } else {
            b.add(0, n, h * p.prod_c(0..n - 1));
            for l in 0..n - 1 {
                b.add(1, l + 1, h * p.prod_c(0..l) * p.s[l]);
            }
            b.add(1, 0, pm * h);
        }
        vectors.push(b.finish());
    }
    MeasurementBasis { n, vectors }
}

/// Unnormalized receiver states `|φ_{j±}⟩₃` from the closed form, in
/// [`Label::index`] order.
pub fn collapsed_states(ch: &SchmidtChannel, alpha: Complex64, beta: Complex64) -> Result<Vec<StateVec>> {
    StateVec::qubit(alpha, beta)?;
    let n = ch.n();
    let d = n + 1;
    let p = cascade_params(ch);
    let a = |i: usize| ch.a(i);
    let h = FRAC_1_SQRT_2;
    let mut out = Vec::with_capacity(2 * d);
    for label in Label::all(n) {
        let pm = label.sign.factor();
        let j = label.j;
        let mut amps = vec![ZERO; d];
        if j < n {
            amps[j] += alpha * (h * a(j));
            amps[n] += alpha * (-pm * h * p.s[j] * p.prod_c(j + 1..n - 1) * a(n));
            amps[j + 1] += beta * (pm * h * p.c[j] * a(j + 1));
            for l in j + 1..n - 1 {
                amps[l + 1] += beta * (-pm * h * p.s[j] * p.prod_c(j + 1..l) * p.s[l] * a(l + 1));
            }
        } else {
            amps[n] += alpha * (h * p.prod_c(0..n - 1) * a(n));
            for l in 0..n - 1 {
                amps[l + 1] += beta * (h * p.prod_c(0..l) * p.s[l] * a(l + 1));
            }
            amps[0] += beta * (pm * h * a(0));
        }
        out.push(StateVec::new(amps));
    }
    Ok(out)
}

/// Outcome probabilities `P_{j±}`; independent of the teleported qubit.
pub fn outcome_probabilities(ch: &SchmidtChannel) -> Vec<f64> {
    let n = ch.n();
    let p = cascade_params(ch);
    let an2 = ch.a(n).powi(2);
    Label::all(n)
        .map(|label| {
            let j = label.j;
            if j < n {
                let tail = p.s[j].powi(2) * p.prod_c(j + 1..n - 1).powi(2) * an2;
                0.5 * (ch.a(j).powi(2) + tail)
            } else {
                0.5 * p.prod_c(0..n - 1).powi(2) * an2
            }
        })
        .collect()
}

/// Bob's unitary for one outcome.
#[derive(Debug, Clone, PartialEq)]
pub struct BobCorrection {
    pub operator: Operator,
    /// The outcome never occurs; `operator` is the identity.
    pub vanished: bool,
}

/// Builds the correction mapping the normalized probe states `|0̃⟩`, `|1̃⟩`
/// onto `|0⟩`, `|1⟩`, completed to a unitary on the receiver space.
fn correction_from_probes(zero: &StateVec, one: &StateVec) -> Result<BobCorrection> {
    let dim = zero.dim();
    if zero.norm_sqr() <= tol::VANISHED || one.norm_sqr() <= tol::VANISHED {
        return Ok(BobCorrection {
            operator: Operator::identity(dim),
            vanished: true,
        });
    }
    let seeds = [
        zero.normalized().expect("non-vanished"),
        one.normalized().expect("non-vanished"),
    ];
    let frame = complete_orthonormal(&seeds, dim)?;
    Ok(BobCorrection {
        operator: Operator::from_frame(&frame)?,
        vanished: false,
    })
}

/// Corrections for every outcome, built from the channel alone.
pub fn bob_corrections(ch: &SchmidtChannel) -> Result<Vec<BobCorrection>> {
    let zeros = collapsed_states(ch, ONE, ZERO)?;
    let ones = collapsed_states(ch, ZERO, ONE)?;
    zeros
        .iter()
        .zip(&ones)
        .map(|(z, o)| correction_from_probes(z, o))
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct TeleportOutcome {
    pub label: Label,
    pub probability: f64,
    /// Normalized receiver state before correction; zero when vanished.
    pub collapsed: StateVec,
    pub correction: Operator,
    /// Squared overlap of the corrected state with the input qubit; 0 when
    /// vanished.
    pub fidelity: f64,
    pub vanished: bool,
}

/// Flat serialisable view of an outcome.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutcomeRecord {
    pub j: usize,
    pub sign: Sign,
    pub p: f64,
    pub fidelity: f64,
    pub vanished: bool,
}

impl TeleportOutcome {
    pub fn record(&self) -> OutcomeRecord {
        OutcomeRecord {
            j: self.label.j,
            sign: self.label.sign,
            p: self.probability,
            fidelity: self.fidelity,
            vanished: self.vanished,
        }
    }
}

pub fn outcomes_to_json(outcomes: &[TeleportOutcome]) -> String {
    let records: Vec<OutcomeRecord> = outcomes.iter().map(TeleportOutcome::record).collect();
    serde_json::to_string(&records).expect("outcome records serialise")
}

fn assemble(
    input: &StateVec,
    labels: impl Iterator<Item = Label>,
    collapsed: Vec<StateVec>,
    corrections: Vec<BobCorrection>,
) -> Result<Vec<TeleportOutcome>> {
    labels
        .zip(collapsed)
        .zip(corrections)
        .map(|((label, phi), corr)| {
            let probability = phi.norm_sqr();
            let dim = phi.dim();
            if corr.vanished || probability <= tol::VANISHED {
                return Ok(TeleportOutcome {
                    label,
                    probability,
                    collapsed: StateVec::zeros(dim),
                    correction: Operator::identity(dim),
                    fidelity: 0.0,
                    vanished: true,
                });
            }
            let collapsed = phi.normalized().expect("non-vanished");
            let fixed = corr.operator.apply(&collapsed)?;
            let fidelity = corelin::fidelity(&input.embed(dim), &fixed)?;
            Ok(TeleportOutcome {
                label,
                probability,
                collapsed,
                correction: corr.operator,
                fidelity,
                vanished: false,
            })
        })
        .collect()
}

/// Full protocol through the closed forms.
pub fn run_teleportation(ch: &SchmidtChannel, alpha: Complex64, beta: Complex64) -> Result<Vec<TeleportOutcome>> {
    let input = StateVec::qubit(alpha, beta)?;
    let collapsed = collapsed_states(ch, alpha, beta)?;
    let corrections = bob_corrections(ch)?;
    assemble(&input, Label::all(ch.n()), collapsed, corrections)
}

/// Teleports `input` by projecting `input ⊗ channel_state` onto each sender
/// vector. Corrections are probed the same way with `|0⟩` and `|1⟩`.
fn teleport_by_projection(
    input: &StateVec,
    channel_state: &StateVec,
    receiver_dim: usize,
    labels: impl Iterator<Item = Label>,
    sender_basis: &[StateVec],
) -> Result<Vec<TeleportOutcome>> {
    let psi = tensor(input, channel_state);
    let probe0 = tensor(&StateVec::basis(2, 0), channel_state);
    let probe1 = tensor(&StateVec::basis(2, 1), channel_state);
    let mut collapsed = Vec::with_capacity(sender_basis.len());
    let mut corrections = Vec::with_capacity(sender_basis.len());
    for b in sender_basis {
        collapsed.push(project_sender(b, &psi, receiver_dim)?);
        let z = project_sender(b, &probe0, receiver_dim)?;
        let o = project_sender(b, &probe1, receiver_dim)?;
        corrections.push(correction_from_probes(&z, &o)?);
    }
    assemble(input, labels, collapsed, corrections)
}

/// Brute-force reference: tensor, partial projection and squared overlap
/// only, for an arbitrary sender basis.
pub fn oracle_teleport(
    ch: &SchmidtChannel,
    alpha: Complex64,
    beta: Complex64,
    basis: &MeasurementBasis,
) -> Result<Vec<TeleportOutcome>> {
    let input = StateVec::qubit(alpha, beta)?;
    if basis.n() != ch.n() {
        return Err(Error::DimensionMismatch {
            expected: 2 * ch.dim(),
            found: 2 * (basis.n() + 1),
        });
    }
    teleport_by_projection(&input, &ch.state(), ch.dim(), basis.labels(), basis.vectors())
}

/// Original Bell-state scheme with Bob holding a qutrit (levels 0 and 1
/// used). Labels `(0,±)` are `|00⟩ ± |11⟩`, `(1,±)` are `|01⟩ ± |10⟩`.
pub fn standard_bell_teleport(alpha: Complex64, beta: Complex64) -> Result<Vec<TeleportOutcome>> {
    let input = StateVec::qubit(alpha, beta)?;
    let h = FRAC_1_SQRT_2;
    // qubit 2 ⊗ qutrit 3
    let mut channel = vec![0.0; 6];
    channel[0] = h;
    channel[4] = h;
    let bell = |a: usize, b: usize, sign: f64| {
        let mut v = [0.0; 4];
        v[a] = h;
        v[b] = sign * h;
        StateVec::from_real(&v)
    };
    let basis = [bell(0, 3, 1.0), bell(0, 3, -1.0), bell(1, 2, 1.0), bell(1, 2, -1.0)];
    teleport_by_projection(&input, &StateVec::from_real(&channel), 3, Label::all(1), &basis)
}
