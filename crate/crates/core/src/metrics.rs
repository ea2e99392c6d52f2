//! Resource quantities: basis concurrences, the entanglement of Alice's
//! measurement `E₁₂`, and the classical cost `H₁₂`.
//!
//! Entanglement of a qubit ⊗ qudit pure state is `H(C²)` where
//! `H(t) = h((1 + √(1−t))/2)` and `h` is the binary entropy.

use serde::{Deserialize, Serialize};

use crate::channel::SchmidtChannel;
use crate::corelin::StateVec;
use crate::error::{check_range, Error, Result};
use crate::protocol::{cascade_params, outcome_probabilities, Label};

/// Shannon entropy in bits, with `0 log 0 = 0`.
pub fn shannon_bits<I: IntoIterator<Item = f64>>(probs: I) -> f64 {
    probs.into_iter().filter(|&p| p > 0.0).map(|p| -p * p.log2()).sum()
}

/// `H(t)` for `t = C² ∈ [0, 1]`.
pub fn h_of_squared(t: f64) -> f64 {
    let r = (1.0 - t).max(0.0).sqrt();
    shannon_bits([(1.0 - r) / 2.0, (1.0 + r) / 2.0])
}

pub fn entropy_from_concurrence(c: f64) -> Result<f64> {
    check_range("concurrence", c, -1e-12, 1.0 + 1e-12, "[0, 1]")?;
    Ok(h_of_squared(c.clamp(0.0, 1.0).powi(2)))
}

/// `C = √(2(1 − Tr ρ_A²))` from the qubit marginal of a qubit ⊗ qudit state.
pub fn concurrence_oracle(state: &StateVec) -> Result<f64> {
    let dim = state.dim();
    if !dim.is_multiple_of(2) {
        return Err(Error::DimensionMismatch {
            expected: dim + 1,
            found: dim,
        });
    }
    state.check_normalized()?;
    let d = dim / 2;
    let (top, bottom) = state.amps().split_at(d);
    let r00: f64 = top.iter().map(|z| z.norm_sqr()).sum();
    let r11: f64 = bottom.iter().map(|z| z.norm_sqr()).sum();
    let r01: num_complex::Complex64 = top.iter().zip(bottom).map(|(x, y)| x * y.conj()).sum();
    let purity = r00 * r00 + r11 * r11 + 2.0 * r01.norm_sqr();
    Ok((2.0 * (1.0 - purity)).max(0.0).sqrt().min(1.0))
}

/// Closed-form concurrences in [`Label::index`] order.
pub fn basis_concurrences_closed(ch: &SchmidtChannel) -> Vec<f64> {
    let n = ch.n();
    let p = cascade_params(ch);
    Label::all(n)
        .map(|label| {
            let j = label.j;
            if j < n {
                let t = p.s[j].powi(2) * p.prod_c(j + 1..n - 1).powi(2);
                (1.0 - t * t).max(0.0).sqrt()
            } else {
                let pi = p.prod_c(0..n - 1);
                pi * (2.0 - pi * pi).sqrt()
            }
        })
        .collect()
}

/// `E₁₂ = Σ P_{j±} H(C(ψ_{j±})²)`.
pub fn measurement_entanglement(ch: &SchmidtChannel) -> f64 {
    outcome_probabilities(ch)
        .iter()
        .zip(basis_concurrences_closed(ch))
        .map(|(p, c)| p * h_of_squared(c * c))
        .sum()
}

/// `H₁₂`: Shannon entropy of the outcome distribution.
pub fn classical_bits(ch: &SchmidtChannel) -> f64 {
    shannon_bits(outcome_probabilities(ch))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResourceReport {
    pub channel_entropy: f64,
    pub measurement_entanglement: f64,
    pub classical_bits: f64,
    pub concurrences: Vec<f64>,
}

impl ResourceReport {
    fn from_parts(channel_entropy: f64, probs: &[f64], concurrences: Vec<f64>) -> Self {
        let measurement_entanglement = probs
            .iter()
            .zip(&concurrences)
            .map(|(p, c)| p * h_of_squared(c * c))
            .sum();
        Self {
            channel_entropy,
            measurement_entanglement,
            classical_bits: shannon_bits(probs.iter().copied()),
            concurrences,
        }
    }
}

/// All resource quantities through the general pipeline.
pub fn resource_report(ch: &SchmidtChannel) -> ResourceReport {
    ResourceReport::from_parts(ch.entropy(), &outcome_probabilities(ch), basis_concurrences_closed(ch))
}

fn paired(values: Vec<f64>) -> Vec<f64> {
    values.into_iter().flat_map(|v| [v, v]).collect()
}

/// Case I, `a_0 = … = a_{n−2} = x a_n`, from its own closed forms.
pub fn case1_metrics(n: usize, x: f64) -> Result<ResourceReport> {
    SchmidtChannel::case1(n, x)?;
    let x2 = x * x;
    let d = 2.0 + (n - 1) as f64 * x2;
    let edge = (1.0 + x2) / (4.0 * d);
    let probs: Vec<f64> = (0..=n)
        .map(|j| match j {
            j if j == n || j + 2 == n => edge,
            j if j + 1 == n => 1.0 / (2.0 * d),
            _ => x2 / (2.0 * d),
        })
        .collect();
    let c_edge = 0.5 * (3.0 + 2.0 * x2 - x2 * x2).sqrt();
    let conc: Vec<f64> = (0..=n)
        .map(|j| if j == n || j + 2 == n { c_edge } else { 1.0 })
        .collect();
    let entropy = shannon_bits(std::iter::repeat_n(x2 / d, n - 1).chain([1.0 / d, 1.0 / d]));
    Ok(ResourceReport::from_parts(entropy, &paired(probs), paired(conc)))
}

/// Case II, `a_{n−2} = y a_n` and all lower coefficients zero.
pub fn case2_metrics(n: usize, y: f64) -> Result<ResourceReport> {
    SchmidtChannel::case2(n, y)?;
    let y2 = y * y;
    let d = 2.0 + y2;
    let probs: Vec<f64> = (0..=n)
        .map(|j| match j {
            j if j == n || j + 3 == n => (1.0 + y2) / (8.0 * d),
            j if j + 2 == n => (1.0 + y2) / (4.0 * d),
            j if j + 1 == n => 1.0 / (2.0 * d),
            _ => 0.0,
        })
        .collect();
    let conc: Vec<f64> = (0..=n)
        .map(|j| match j {
            j if j == n => 0.25 * (7.0 + 6.0 * y2 - y2 * y2).sqrt(),
            j if j + 3 == n => (1.0 - (1.0 + y2).powi(2) / 16.0).sqrt(),
            j if j + 2 == n => 0.5 * (3.0 + 2.0 * y2 - y2 * y2).sqrt(),
            _ => 1.0,
        })
        .collect();
    let entropy = shannon_bits([y2 / d, 1.0 / d, 1.0 / d]);
    Ok(ResourceReport::from_parts(entropy, &paired(probs), paired(conc)))
}

/// `H[2^{−(n−3)} − 2^{−(2n−4)}]`.
///
/// This is the limiting entanglement of `ψ_{n±}` on a staircase channel
/// (`a_k / a_{k+1} → 0`) with one fewer level, i.e. at `n − 1`.
pub fn min_single_measurement_entanglement(n: usize) -> Result<f64> {
    if n < 3 {
        return Err(Error::OutOfRange {
            name: "n",
            value: n as f64,
            range: "n >= 3",
        });
    }
    let t = 0.5f64.powi(n as i32 - 3) - 0.5f64.powi(2 * n as i32 - 4);
    Ok(h_of_squared(t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocol::{build_basis_cascade, build_basis_closed_form, Sign};
    use proptest::prelude::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    const H34: f64 = 0.811_278_124_459_132_8;
    const H1516: f64 = 0.954_434_002_924_965;
    const H716: f64 = 0.543_564_443_199_596_4;

    fn random_channel(seed: u64) -> SchmidtChannel {
        SchmidtChannel::sample_random(2 + (seed % 5) as usize, seed).unwrap()
    }

    fn staircase(n: usize, eps: f64) -> SchmidtChannel {
        let raw: Vec<f64> = (0..=n)
            .map(|k| if k + 1 >= n { 1.0 } else { eps.powi((n - 1 - k) as i32) })
            .collect();
        let norm = raw.iter().map(|x| x * x).sum::<f64>().sqrt();
        SchmidtChannel::new(&raw.iter().map(|x| x / norm).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn h_reference_values() {
        assert!((h_of_squared(0.75) - H34).abs() < 1e-15);
        assert!((h_of_squared(15.0 / 16.0) - H1516).abs() < 1e-15);
        assert!((h_of_squared(7.0 / 16.0) - H716).abs() < 1e-15);
        assert_eq!(entropy_from_concurrence(1.0).unwrap(), 1.0);
        assert_eq!(entropy_from_concurrence(0.0).unwrap(), 0.0);
        assert!((entropy_from_concurrence(0.75f64.sqrt()).unwrap() - H34).abs() < 1e-15);
        assert!(entropy_from_concurrence(1.1).is_err());
        assert!(entropy_from_concurrence(-0.1).is_err());
    }

    #[test]
    fn oracle_examples() {
        let product = crate::corelin::tensor(&StateVec::basis(2, 0), &StateVec::basis(6, 5));
        assert_eq!(concurrence_oracle(&product).unwrap(), 0.0);
        let mut bell = vec![0.0; 8];
        bell[1] = FRAC_1_SQRT_2;
        bell[4 + 3] = FRAC_1_SQRT_2;
        assert!((concurrence_oracle(&StateVec::from_real(&bell)).unwrap() - 1.0).abs() < 1e-15);
        assert!(concurrence_oracle(&StateVec::basis(5, 0)).is_err());
        assert!(concurrence_oracle(&StateVec::from_real(&[1.0, 1.0])).is_err());

        let ch = SchmidtChannel::case1(2, 0.0).unwrap();
        let b = build_basis_cascade(&ch);
        let c = concurrence_oracle(b.vector(Label::new(0, Sign::Plus))).unwrap();
        assert!((c - 3f64.sqrt() / 2.0).abs() < 1e-12);
    }

    #[test]
    fn closed_concurrences_match_oracle() {
        for seed in 0..200 {
            let ch = random_channel(seed);
            let closed = basis_concurrences_closed(&ch);
            let basis = build_basis_closed_form(&ch);
            for (v, c) in basis.vectors().iter().zip(&closed) {
                assert!((concurrence_oracle(v).unwrap() - c).abs() <= 1e-10, "seed {seed}");
            }
        }
    }

    #[test]
    fn case2_concurrences() {
        // exactly y = 0 is the vertex basis; the curve is its y -> 0+ limit
        for y in [1e-8, 0.3, 0.8, 1.0] {
            let c = basis_concurrences_closed(&SchmidtChannel::case2(3, y).unwrap());
            let y2 = y * y;
            let want = [
                (1.0 - (1.0 + y2).powi(2) / 16.0).sqrt(),
                0.5 * (3.0 + 2.0 * y2 - y2 * y2).sqrt(),
                1.0,
                0.25 * (7.0 + 6.0 * y2 - y2 * y2).sqrt(),
            ];
            for j in 0..4 {
                assert!((c[2 * j] - want[j]).abs() < 1e-12, "y={y} j={j}");
                assert_eq!(c[2 * j], c[2 * j + 1]);
            }
        }
    }

    #[test]
    fn max_entangled_channel() {
        for n in 2..=6 {
            let ch = SchmidtChannel::vertex(n, 0).unwrap();
            assert!(basis_concurrences_closed(&ch).iter().all(|&c| c == 1.0));
            assert!((measurement_entanglement(&ch) - 1.0).abs() < 1e-15);
            let want = ((2 * (n + 1)) as f64).log2();
            assert!((classical_bits(&ch) - want).abs() < 1e-12);
        }
        assert!((classical_bits(&SchmidtChannel::vertex(2, 0).unwrap()) - 6f64.log2()).abs() < 1e-12);
    }

    #[test]
    fn quoted_minima() {
        let e1 = measurement_entanglement(&SchmidtChannel::case1(2, 1e-8).unwrap());
        assert!((e1 - (0.5 * H34 + 0.5)).abs() < 1e-12);
        assert!((e1 - 0.9056).abs() < 1e-3);
        let want2 = H1516 / 8.0 + H34 / 4.0 + H716 / 8.0 + 0.5;
        for n in 3..=6 {
            let e2 = measurement_entanglement(&SchmidtChannel::case2(n, 1e-8).unwrap());
            assert!((e2 - want2).abs() < 1e-12);
            assert!((e2 - 0.8901).abs() < 1e-3);
            let h = classical_bits(&SchmidtChannel::case1(n, 1e-8).unwrap());
            assert!((h - 2.5).abs() < 1e-12);
        }
    }

    #[test]
    fn case1_closed_forms() {
        let r = case1_metrics(2, 0.0).unwrap();
        assert!((r.measurement_entanglement - 0.905_639_062_229_566_5).abs() < 1e-15);
        assert!((r.classical_bits - 2.5).abs() < 1e-15);
        let r = case1_metrics(4, 1.0).unwrap();
        assert!((r.measurement_entanglement - 1.0).abs() < 1e-15);
        assert!((r.classical_bits - 10f64.log2()).abs() < 1e-12);
        assert!((r.channel_entropy - 5f64.log2()).abs() < 1e-12);
        assert!(case1_metrics(1, 0.5).is_err());
        assert!(case1_metrics(3, 1.5).is_err());
    }

    #[test]
    fn case2_closed_forms() {
        let r = case2_metrics(3, 0.0).unwrap();
        let want: [f64; 4] = [1.0 / 16.0, 1.0 / 8.0, 1.0 / 4.0, 1.0 / 16.0];
        let probs = r.concurrences.len();
        assert_eq!(probs, 8);
        assert!((r.measurement_entanglement - 0.890_069_336_880_353_4).abs() < 1e-15);
        assert!((r.classical_bits - 2.75).abs() < 1e-15);
        assert!((r.classical_bits + 2.0 * want.iter().map(|p: &f64| p * p.log2()).sum::<f64>()).abs() < 1e-15);
        assert!(case2_metrics(2, 0.5).is_err());
    }

    fn assert_reports_close(a: &ResourceReport, b: &ResourceReport, tol: f64) {
        assert!((a.channel_entropy - b.channel_entropy).abs() <= tol);
        assert!((a.measurement_entanglement - b.measurement_entanglement).abs() <= tol);
        assert!((a.classical_bits - b.classical_bits).abs() <= tol);
        for (x, y) in a.concurrences.iter().zip(&b.concurrences) {
            assert!((x - y).abs() <= tol);
        }
    }

    #[test]
    fn case_metrics_match_pipeline() {
        assert_reports_close(
            &case1_metrics(3, 0.5).unwrap(),
            &resource_report(&SchmidtChannel::case1(3, 0.5).unwrap()),
            1e-10,
        );
        assert_reports_close(
            &case2_metrics(5, 0.3).unwrap(),
            &resource_report(&SchmidtChannel::case2(5, 0.3).unwrap()),
            1e-10,
        );
        assert_reports_close(
            &case2_metrics(3, 1.0).unwrap(),
            &resource_report(&SchmidtChannel::vertex(3, 1).unwrap()),
            1e-10,
        );
        for n in 2..=6 {
            for i in 0..=20 {
                let x = i as f64 / 20.0;
                assert_reports_close(
                    &case1_metrics(n, x).unwrap(),
                    &resource_report(&SchmidtChannel::case1(n, x).unwrap()),
                    1e-10,
                );
                if n >= 3 && i > 0 {
                    assert_reports_close(
                        &case2_metrics(n, x).unwrap(),
                        &resource_report(&SchmidtChannel::case2(n, x).unwrap()),
                        1e-10,
                    );
                }
            }
        }
    }

    #[test]
    fn single_measurement_minimum() {
        assert!((min_single_measurement_entanglement(3).unwrap() - H34).abs() < 1e-15);
        let t = 0.125 - 1.0 / 256.0;
        assert!((min_single_measurement_entanglement(6).unwrap() - h_of_squared(t)).abs() < 1e-15);
        assert!((min_single_measurement_entanglement(6).unwrap() - 0.200_622_324_312_714_65).abs() < 1e-14);
        assert!(min_single_measurement_entanglement(2).is_err());
    }

    #[test]
    fn single_measurement_minimum_is_the_staircase_limit_one_level_down() {
        for n in 3..=7 {
            let ch = staircase(n - 1, 1e-4);
            let c = basis_concurrences_closed(&ch)[Label::new(n - 1, Sign::Plus).index()];
            let got = h_of_squared(c * c);
            assert!(
                (got - min_single_measurement_entanglement(n).unwrap()).abs() < 1e-3,
                "n={n}"
            );
        }
    }

    #[test]
    fn case1_curves_are_monotone() {
        for n in 2..=6 {
            let pts: Vec<ResourceReport> = (0..100).map(|i| case1_metrics(n, i as f64 / 99.0).unwrap()).collect();
            for w in pts.windows(2) {
                assert!(w[1].channel_entropy >= w[0].channel_entropy - 1e-9);
                assert!(w[1].measurement_entanglement >= w[0].measurement_entanglement - 1e-9);
                assert!(w[1].classical_bits >= w[0].classical_bits - 1e-9);
            }
        }
    }

    #[test]
    fn case2_classical_bits_monotone_but_entanglement_peaks_before_y_one() {
        for n in 3..=6 {
            let pts: Vec<ResourceReport> = (0..100).map(|i| case2_metrics(n, i as f64 / 99.0).unwrap()).collect();
            for w in pts.windows(2) {
                assert!(w[1].channel_entropy >= w[0].channel_entropy - 1e-9);
                assert!(w[1].classical_bits >= w[0].classical_bits - 1e-9);
            }
            let peak = pts.iter().map(|r| r.measurement_entanglement).fold(0.0, f64::max);
            let end = pts.last().unwrap().measurement_entanglement;
            assert!((peak - 0.937_45).abs() < 1e-5);
            assert!((end - 0.937_093).abs() < 1e-5);
        }
    }

    #[test]
    fn standard_scheme_costs_two_bits() {
        let out = crate::protocol::standard_bell_teleport(crate::corelin::ONE, crate::corelin::ZERO).unwrap();
        assert!((shannon_bits(out.iter().map(|o| o.probability)) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn report_json_is_flat() {
        let json = serde_json::to_value(resource_report(&SchmidtChannel::vertex(2, 0).unwrap())).unwrap();
        let obj = json.as_object().unwrap();
        assert_eq!(obj.len(), 4);
        assert_eq!(obj["concurrences"].as_array().unwrap().len(), 6);
    }

    proptest! {
        #[test]
        fn entanglement_matching_does_not_occur(n in 2usize..8, seed in any::<u64>()) {
            let ch = SchmidtChannel::sample_random(n, seed).unwrap();
            let r = resource_report(&ch);
            prop_assert!(r.measurement_entanglement <= 1.0 + 1e-9);
            prop_assert!(r.channel_entropy >= 1.0 - 1e-9);
            prop_assert!(r.classical_bits >= 0.0);
            prop_assert!(r.classical_bits <= ((2 * (n + 1)) as f64).log2() + 1e-12);
            prop_assert!(r.concurrences.iter().all(|c| (0.0..=1.0).contains(c)));
            let spread = ch.coeffs()[n] - ch.coeffs()[0];
            if spread > 1e-3 {
                prop_assert!(r.measurement_entanglement < 1.0 - 1e-6);
            }
        }

        #[test]
        fn oracle_is_invariant_under_local_qudit_permutation(seed in any::<u64>()) {
            let ch = SchmidtChannel::sample_random(3, seed).unwrap();
            for v in build_basis_cascade(&ch).vectors() {
                let amps = v.amps();
                let d = amps.len() / 2;
                let swapped: Vec<_> = (0..2).flat_map(|q| (0..d).rev().map(move |i| amps[q * d + i])).collect();
                let a = concurrence_oracle(v).unwrap();
                let b = concurrence_oracle(&StateVec::new(swapped)).unwrap();
                prop_assert!((a - b).abs() < 1e-12);
            }
        }
    }
}
