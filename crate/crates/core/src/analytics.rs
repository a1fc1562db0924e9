//! Closed-form statistics of the doped-circuit experiment: the success
//! probability for absorbing one more non-Clifford phase gate into a logical
//! magic state, the distribution of the last fully disentanglable step, its
//! large-system limit in terms of q-Pochhammer symbols, and a small
//! chi-squared goodness-of-fit helper used to bridge the formulas to the
//! simulated histograms.
//!
//! The probability formulas involve `4^N`-sized integers with near
//! cancellations, so they are evaluated in exact big-integer rationals and
//! only converted to floating point at the boundary.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use thiserror::Error;

use crate::scalar::Real;

#[derive(Debug, Error, PartialEq)]
pub enum AnalyticsError {
    #[error("prior logical count {k} exceeds system size {n}")]
    KExceedsN { k: usize, n: usize },

    #[error("infinite q-Pochhammer product requires |q| < 1, got |q| = {q_abs}")]
    DivergentProduct { q_abs: f64 },

    #[error("chi-squared inputs disagree in length: {observed} vs {expected}")]
    LengthMismatch { observed: usize, expected: usize },

    #[error("chi-squared test needs at least two pooled bins and one sample")]
    NotEnoughData,
}

/// Probability distribution of the last step up to which the doped circuit
/// stays fully disentanglable, for a finite system of `n` qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct DisentanglableDistribution {
    pub n: usize,
    /// `probs[t]` for `t` in `0..=n`.
    pub probs: Vec<f64>,
}

fn pow_bigint(base: u32, exp: usize) -> BigInt {
    BigInt::from(base).pow(exp as u32)
}

/// Exact success probability `p_{k+1}` for absorbing the `(k+1)`-th
/// non-Clifford gate into a fresh logical magic state, given `k` prior ones:
/// `1 - (4^k - 1)·2^{n-k} / (4^n - 1)`.
pub fn encode_success_prob_exact(k: usize, n: usize) -> Result<BigRational, AnalyticsError> {
    if k > n {
        return Err(AnalyticsError::KExceedsN { k, n });
    }
    let numerator = (pow_bigint(4, k) - BigInt::one()) * pow_bigint(2, n - k);
    let denominator = pow_bigint(4, n) - BigInt::one();
    Ok(BigRational::one() - BigRational::new(numerator, denominator))
}

/// Floating-point view of [`encode_success_prob_exact`].
pub fn encode_success_prob(k: usize, n: usize) -> Result<f64, AnalyticsError> {
    Ok(encode_success_prob_exact(k, n)?
        .to_f64()
        .expect("probability fits f64"))
}

/// Distribution `Pr(t) = (1 - p_{t+1}) ∏_{k=1}^{t} p_k` over `t = 0..=n`.
pub fn disentanglable_dist(n: usize) -> DisentanglableDistribution {
    let mut probs = Vec::with_capacity(n + 1);
    let mut cumulative = BigRational::one();
    for t in 0..=n {
        let p_next = encode_success_prob_exact(t, n).expect("t <= n");
        let pr = (BigRational::one() - p_next.clone()) * cumulative.clone();
        probs.push(pr.to_f64().expect("probability fits f64"));
        cumulative *= p_next;
    }
    DisentanglableDistribution { n, probs }
}

/// Order of a q-Pochhammer product.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PochhammerOrder {
    Finite(usize),
    Infinite,
}

/// `(a; q)_n = ∏_{k=0}^{n-1} (1 - a q^k)`; the infinite product truncates
/// once the running factor is within machine precision of 1.
pub fn q_pochhammer<T: Real>(a: T, q: T, order: PochhammerOrder) -> Result<T, AnalyticsError> {
    match order {
        PochhammerOrder::Finite(n) => {
            let mut product = T::one();
            let mut aq = a;
            for _ in 0..n {
                product *= T::one() - aq;
                aq *= q;
            }
            Ok(product)
        }
        PochhammerOrder::Infinite => {
            if q.abs() >= T::one() {
                return Err(AnalyticsError::DivergentProduct {
                    q_abs: q.abs().to_f64_lossy(),
                });
            }
            let tol = T::of(1e-16);
            let mut product = T::one();
            let mut aq = a;
            // Geometric decay of |a q^k| bounds the truncated tail below the
            // last retained factor.
            while aq.abs() >= tol {
                product *= T::one() - aq;
                aq *= q;
            }
            Ok(product)
        }
    }
}

/// Large-system limit `Pr(n - j) ≈ (½;½)_∞ · 2^{-j} / (½;½)_j` of the
/// disentanglable-step distribution, indexed by the shortfall `j = n - t`.
pub fn asymptotic_pr(j: usize) -> f64 {
    let limit = q_pochhammer(0.5f64, 0.5, PochhammerOrder::Infinite).expect("|q| < 1");
    let denom = q_pochhammer(0.5f64, 0.5, PochhammerOrder::Finite(j)).expect("finite");
    limit * 0.5f64.powi(j as i32) / denom
}

/// Mean and standard deviation of the shortfall `n - t` in the large-system
/// limit, obtained by summing [`asymptotic_pr`] to convergence.
pub fn asymptotic_moments() -> (f64, f64) {
    let mut m0 = 0.0;
    let mut m1 = 0.0;
    let mut m2 = 0.0;
    for j in 0..512 {
        let pr = asymptotic_pr(j);
        m0 += pr;
        m1 += j as f64 * pr;
        m2 += (j * j) as f64 * pr;
        if pr < 1e-18 && j > 2 {
            break;
        }
    }
    debug_assert!((m0 - 1.0).abs() < 1e-9);
    (m1, (m2 - m1 * m1).sqrt())
}

/// Result of a chi-squared goodness-of-fit test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChiSquaredOutcome {
    pub statistic: f64,
    pub degrees_of_freedom: usize,
    pub p_value: f64,
}

/// Pearson chi-squared test of observed counts against expected
/// probabilities. Adjacent bins are pooled until each expected count reaches
/// 5, the usual validity rule for the asymptotic distribution.
pub fn chi_squared_test(
    observed: &[u64],
    expected_probs: &[f64],
) -> Result<ChiSquaredOutcome, AnalyticsError> {
    if observed.len() != expected_probs.len() {
        return Err(AnalyticsError::LengthMismatch {
            observed: observed.len(),
            expected: expected_probs.len(),
        });
    }
    let total: u64 = observed.iter().sum();
    if total == 0 {
        return Err(AnalyticsError::NotEnoughData);
    }

    let mut pooled: Vec<(f64, f64)> = Vec::new();
    let mut acc_obs = 0.0;
    let mut acc_exp = 0.0;
    for (o, p) in observed.iter().zip(expected_probs) {
        acc_obs += *o as f64;
        acc_exp += p * total as f64;
        if acc_exp >= 5.0 {
            pooled.push((acc_obs, acc_exp));
            acc_obs = 0.0;
            acc_exp = 0.0;
        }
    }
    if acc_exp > 0.0 || acc_obs > 0.0 {
        if let Some(last) = pooled.last_mut() {
            last.0 += acc_obs;
            last.1 += acc_exp;
        } else {
            pooled.push((acc_obs, acc_exp));
        }
    }
    if pooled.len() < 2 {
        return Err(AnalyticsError::NotEnoughData);
    }

    let statistic: f64 = pooled.iter().map(|(o, e)| (o - e) * (o - e) / e).sum();
    let dof = pooled.len() - 1;
    let p_value = chi_squared_survival(statistic, dof as f64);
    Ok(ChiSquaredOutcome {
        statistic,
        degrees_of_freedom: dof,
        p_value,
    })
}

/// Survival function `P(X > x)` of the chi-squared distribution with `k`
/// degrees of freedom: the regularized upper incomplete gamma `Q(k/2, x/2)`.
pub fn chi_squared_survival(x: f64, k: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    regularized_gamma_q(0.5 * k, 0.5 * x)
}

// Lanczos approximation, g = 7, n = 9.
fn ln_gamma(x: f64) -> f64 {
    const COEFFS: [f64; 8] = [
        676.5203681218851,
        -1259.1392167224028,
        771.323_428_777_653_1,
        -176.615_029_162_140_6,
        12.507343278686905,
        -0.13857109526572012,
        9.984_369_578_019_572e-6,
        1.5056327351493116e-7,
    ];
    if x < 0.5 {
        // Reflection formula.
        return std::f64::consts::PI.ln()
            - (std::f64::consts::PI * x).sin().ln()
            - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut acc = 0.999_999_999_999_809_9;
    for (i, c) in COEFFS.iter().enumerate() {
        acc += c / (x + (i + 1) as f64);
    }
    let t = x + 7.5;
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + acc.ln()
}

/// Regularized upper incomplete gamma `Q(a, x)`, series/continued-fraction
/// split at `x = a + 1`.
fn regularized_gamma_q(a: f64, x: f64) -> f64 {
    if x < a + 1.0 {
        1.0 - lower_gamma_series(a, x)
    } else {
        upper_gamma_continued_fraction(a, x)
    }
}

fn lower_gamma_series(a: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    let mut ap = a;
    let mut sum = 1.0 / a;
    let mut term = sum;
    for _ in 0..500 {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if term.abs() < sum.abs() * 1e-15 {
            break;
        }
    }
    sum * (-x + a * x.ln() - ln_gamma(a)).exp()
}

fn upper_gamma_continued_fraction(a: f64, x: f64) -> f64 {
    const TINY: f64 = 1e-300;
    let mut b = x + 1.0 - a;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..500 {
        let an = -(i as f64) * (i as f64 - a);
        b += 2.0;
        d = an * d + b;
        if d.abs() < TINY {
            d = TINY;
        }
        c = b + an / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let delta = d * c;
        h *= delta;
        if (delta - 1.0).abs() < 1e-15 {
            break;
        }
    }
    h * (-x + a * x.ln() - ln_gamma(a)).exp()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_gate_always_succeeds() {
        for n in 1..=40 {
            assert_eq!(encode_success_prob(0, n).unwrap(), 1.0);
        }
    }

    #[test]
    fn small_system_success_probabilities() {
        // Direct evaluation of the formula at n = 2.
        assert!((encode_success_prob(1, 2).unwrap() - 0.6).abs() < 1e-15);
        assert_eq!(encode_success_prob(2, 2).unwrap(), 0.0);
        assert!(matches!(
            encode_success_prob(3, 2),
            Err(AnalyticsError::KExceedsN { .. })
        ));
    }

    #[test]
    fn distribution_for_two_qubits() {
        let dist = disentanglable_dist(2);
        assert_eq!(dist.probs.len(), 3);
        assert!((dist.probs[0] - 0.0).abs() < 1e-15);
        assert!((dist.probs[1] - 0.4).abs() < 1e-15);
        assert!((dist.probs[2] - 0.6).abs() < 1e-15);
    }

    #[test]
    fn distribution_for_one_qubit() {
        let dist = disentanglable_dist(1);
        assert_eq!(dist.probs, vec![0.0, 1.0]);
    }

    #[test]
    fn distributions_are_normalized() {
        for n in [1, 2, 3, 8, 16, 40, 64] {
            let dist = disentanglable_dist(n);
            let sum: f64 = dist.probs.iter().sum();
            assert!((sum - 1.0).abs() < 1e-12, "n = {n}: sum = {sum}");
            assert!(dist.probs.iter().all(|p| (0.0..=1.0).contains(p)));
        }
    }

    #[test]
    fn pochhammer_small_orders() {
        let half = 0.5f64;
        assert!(
            (q_pochhammer(half, half, PochhammerOrder::Finite(1)).unwrap() - 0.5).abs() < 1e-15
        );
        assert!(
            (q_pochhammer(half, half, PochhammerOrder::Finite(2)).unwrap() - 0.375).abs() < 1e-15
        );
        // Converged infinite product, cross-checked against a long partial
        // product.
        let inf = q_pochhammer(half, half, PochhammerOrder::Infinite).unwrap();
        let partial = q_pochhammer(half, half, PochhammerOrder::Finite(200)).unwrap();
        assert!((inf - partial).abs() < 1e-14);
        assert!((inf - 0.2887880951).abs() < 1e-9);
    }

    #[test]
    fn pochhammer_rejects_divergent_q() {
        assert!(matches!(
            q_pochhammer(0.5f64, 1.0, PochhammerOrder::Infinite),
            Err(AnalyticsError::DivergentProduct { .. })
        ));
    }

    #[test]
    fn asymptotic_distribution_head_and_normalization() {
        assert!((asymptotic_pr(0) - 0.2887880951).abs() < 1e-9);
        // Euler identity: Σ_j 2^{-j}/(½;½)_j = 1/(½;½)_∞, checked numerically.
        let sum: f64 = (0..200).map(asymptotic_pr).sum();
        assert!((sum - 1.0).abs() < 1e-9);
    }

    #[test]
    fn asymptotic_moments_match_known_values() {
        let (mean, std) = asymptotic_moments();
        assert!((mean - 1.607).abs() < 1e-3, "mean = {mean}");
        assert!((std - 1.6565).abs() < 1e-3, "std = {std}");
    }

    #[test]
    fn finite_distribution_converges_to_asymptotic() {
        let n = 40;
        let dist = disentanglable_dist(n);
        let max_gap = (0..=n)
            .map(|j| (dist.probs[n - j] - asymptotic_pr(j)).abs())
            .fold(0.0f64, f64::max);
        assert!(max_gap < 1e-3, "max gap = {max_gap}");
    }

    #[test]
    fn chi_squared_survival_reference_values() {
        // Q(x; k) checked against standard tables.
        assert!((chi_squared_survival(3.841, 1.0) - 0.05).abs() < 1e-3);
        assert!((chi_squared_survival(18.307, 10.0) - 0.05).abs() < 1e-3);
        assert!((chi_squared_survival(0.0, 5.0) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn chi_squared_accepts_exact_samples() {
        // Counts exactly proportional to the expectation give statistic 0.
        let expected = [0.25, 0.25, 0.5];
        let observed = [25u64, 25, 50];
        let outcome = chi_squared_test(&observed, &expected).unwrap();
        assert!(outcome.statistic < 1e-12);
        assert!(outcome.p_value > 0.999);
    }

    #[test]
    fn chi_squared_rejects_gross_mismatch() {
        let expected = [0.5, 0.5];
        let observed = [95u64, 5];
        let outcome = chi_squared_test(&observed, &expected).unwrap();
        assert!(outcome.p_value < 1e-6);
    }

    #[test]
    fn chi_squared_pools_sparse_bins() {
        // Leading bins with tiny expectation must not blow up the statistic.
        let expected = [1e-6, 1e-6, 0.5 - 1e-6, 0.5 - 1e-6];
        let observed = [0u64, 0, 51, 49];
        let outcome = chi_squared_test(&observed, &expected).unwrap();
        assert_eq!(outcome.degrees_of_freedom, 1);
        assert!(outcome.p_value > 0.5);
    }
}
