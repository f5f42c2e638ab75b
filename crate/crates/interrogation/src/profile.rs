//! Amplitude profiles over Hamming-weight shells and their analytics.
//!
//! The interrogation pipeline prepares a state whose amplitude depends on a
//! basis state only through its Hamming weight: shell `j` carries total
//! squared weight `alpha_j^2`, split evenly over its `C(n, j)` basis states.
//! A profile is the vector `(alpha_0, ..., alpha_m)`; the budget it spends is
//! the highest shell it touches, because the phase oracle answers one shell
//! per query round.
//!
//! For any profile the expected number of correctly recovered bits has the
//! closed form `n/2 + sum_j alpha_j alpha_{j+1} sqrt(j+1) sqrt(n-j)`,
//! independent of the hidden string. The constructors here build the standard
//! families: uniform (exact-recovery optimal), one-query, and the step family
//! that concentrates weight on the `sqrt(k)` shells just below the budget.

use crate::combinatorics::{
    self, classical_success_probability, success_probability, ExactCount, Probability,
};
use crate::error::{Error, Result};
use crate::sums::pairwise_sum;

/// Tolerance on the squared norm of a profile.
pub const NORM_TOLERANCE: f64 = 1e-9;

/// Shells with amplitude at or below this magnitude are not counted as
/// queried.
pub const QUERY_COST_CUTOFF: f64 = 1e-12;

/// Shell amplitudes `(alpha_0, ..., alpha_m)` for an `n`-qubit register.
#[derive(Debug, Clone, PartialEq)]
pub struct AmplitudeProfile {
    n: usize,
    alphas: Vec<f64>,
}

impl AmplitudeProfile {
    /// Validates and wraps raw shell amplitudes: at least one entry, at most
    /// `n + 1`, all finite, squared norm within [`NORM_TOLERANCE`] of 1.
    pub fn new(n: usize, alphas: Vec<f64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyRegister);
        }
        if alphas.is_empty() {
            return Err(Error::EmptyProfile);
        }
        if alphas.len() - 1 > n {
            return Err(Error::ProfileTooWide {
                max_shell: alphas.len() - 1,
                n,
            });
        }
        for (shell, a) in alphas.iter().enumerate() {
            if !a.is_finite() {
                return Err(Error::NonFiniteAmplitude { shell });
            }
        }
        let squares: Vec<f64> = alphas.iter().map(|a| a * a).collect();
        let norm_sqr = pairwise_sum(&squares);
        if (norm_sqr - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::UnnormalizedProfile {
                norm_sqr,
                tolerance: NORM_TOLERANCE,
            });
        }
        Ok(AmplitudeProfile { n, alphas })
    }

    /// The profile that maximizes the exact-recovery probability for budget
    /// `k`: `alpha_j = sqrt(C(n, j) / M_k)`, i.e. every basis state of weight
    /// at most `k` equally likely.
    pub fn uniform(n: usize, k: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyRegister);
        }
        if k > n {
            return Err(Error::BudgetTooLarge { k, n });
        }
        let m = combinatorics::cumulative_weight(n as u64, k as u64);
        let mut term = ExactCount::from(1u8);
        let mut alphas = Vec::with_capacity(k + 1);
        for j in 0..=k as u64 {
            if j > 0 {
                term *= n as u64 - j + 1;
                term /= j;
            }
            alphas.push(combinatorics::ratio_to_f64(&term, &m).sqrt());
        }
        AmplitudeProfile::new(n, alphas)
    }

    /// The two-shell profile `(1/sqrt(2), 1/sqrt(2))`: a single oracle query,
    /// expected to recover `n/2 + sqrt(n)/2` bits.
    pub fn one_query(n: usize) -> Result<Self> {
        let a = std::f64::consts::FRAC_1_SQRT_2;
        AmplitudeProfile::new(n, vec![a, a])
    }

    /// The near-optimal step family for budgets up to `n/2`: equal squared
    /// weight `1/sqrt(k)` on every shell within `sqrt(k)` of the budget, with
    /// the remainder of the unit norm placed on the boundary shell below the
    /// window so the profile is exactly normalized. For perfect-square `k`
    /// the boundary remainder equals the interior weight and the profile is
    /// flat over the top `sqrt(k)` shells.
    pub fn step(n: usize, k: usize) -> Result<Self> {
        if k < 1 || 2 * k > n {
            return Err(Error::StepWindowOutOfRange { k, n });
        }
        // Full-weight shells are those j with (k - j)^2 < k.
        let depth = ((k - 1) as u64).isqrt() as usize;
        let interior = 1.0 / (k as f64).sqrt();
        let leftover = 1.0 - depth as f64 * interior;
        let mut alphas = vec![0.0; k + 1];
        for a in alphas.iter_mut().take(k + 1).skip(k - depth + 1) {
            *a = interior.sqrt();
        }
        alphas[k - depth] = leftover.sqrt();
        AmplitudeProfile::new(n, alphas)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn alphas(&self) -> &[f64] {
        &self.alphas
    }

    /// Highest shell the profile stores, populated or not.
    pub fn max_shell(&self) -> usize {
        self.alphas.len() - 1
    }

    /// Number of oracle queries the profile spends: the highest shell whose
    /// amplitude exceeds [`QUERY_COST_CUTOFF`] in magnitude.
    pub fn query_cost(&self) -> usize {
        self.alphas
            .iter()
            .rposition(|a| a.abs() > QUERY_COST_CUTOFF)
            .unwrap_or(0)
    }

    pub fn norm_sqr(&self) -> f64 {
        let squares: Vec<f64> = self.alphas.iter().map(|a| a * a).collect();
        pairwise_sum(&squares)
    }
}

/// Expected number of correctly recovered bits for a profile on `n` qubits:
/// `n/2 + sum_j alpha_j alpha_{j+1} sqrt(j+1) sqrt(n-j)`. Holds for any
/// hidden string; summed pairwise so wide profiles lose no precision.
pub fn expected_correct_quantum(profile: &AmplitudeProfile) -> f64 {
    let n = profile.n();
    let terms: Vec<f64> = profile
        .alphas()
        .windows(2)
        .enumerate()
        .map(|(j, w)| w[0] * w[1] * ((j + 1) as f64).sqrt() * ((n - j) as f64).sqrt())
        .collect();
    n as f64 / 2.0 + pairwise_sum(&terms)
}

/// Expected number of correct bits after `k` classical queries and random
/// guesses for the rest: `n/2 + k/2`.
pub fn expected_correct_classical(n: u64, k: u64) -> f64 {
    (n + k.min(n)) as f64 / 2.0
}

/// Probability that the pipeline returns the hidden string exactly:
/// `(sum_j alpha_j sqrt(C(n, j)))^2 / 2^n`. For the uniform profile this
/// reduces to `M_k / 2^n`.
pub fn exact_match_probability(profile: &AmplitudeProfile) -> f64 {
    let n = profile.n() as u64;
    let one = ExactCount::from(1u8);
    let mut term = ExactCount::from(1u8);
    let amps: Vec<f64> = profile
        .alphas()
        .iter()
        .enumerate()
        .map(|(j, &a)| {
            if j > 0 {
                term *= n - j as u64 + 1;
                term /= j as u64;
            }
            a * combinatorics::ratio_to_f64(&term, &one).sqrt()
        })
        .collect();
    let s = pairwise_sum(&amps);
    libm::ldexp(s * s, -(profile.n() as i32))
}

/// Asymptotic fraction of bits recovered with a budget of `fraction * n`
/// queries: `1/2 + sqrt(f (1 - f))`, saturating at 1 for `f > 1/2`.
pub fn quantum_ratio(fraction: f64) -> f64 {
    assert!(
        (0.0..=1.0).contains(&fraction),
        "query fraction must lie in [0, 1]"
    );
    if fraction > 0.5 {
        1.0
    } else {
        0.5 + (fraction * (1.0 - fraction)).sqrt()
    }
}

/// Classical counterpart of [`quantum_ratio`]: `1/2 + f/2`.
pub fn classical_ratio(fraction: f64) -> f64 {
    assert!(
        (0.0..=1.0).contains(&fraction),
        "query fraction must lie in [0, 1]"
    );
    0.5 + fraction / 2.0
}

/// Number of classical queries that reach the same expected correct-bit
/// ratio: `n (2 ratio - 1)`.
pub fn classical_equivalent_queries(ratio: f64, n: u64) -> f64 {
    assert!(
        (0.5..=1.0).contains(&ratio),
        "correct-bit ratio must lie in [0.5, 1]"
    );
    2.0 * (ratio * n as f64) - n as f64
}

/// A quantum interrogation run, fully specified: the profile to prepare plus
/// its analytic predictions.
#[derive(Debug, Clone)]
pub struct InterrogationPlan {
    pub n: usize,
    pub query_cost: usize,
    pub expected_correct: f64,
    pub exact_match: Probability,
    pub profile: AmplitudeProfile,
}

impl InterrogationPlan {
    /// Plan for the uniform profile; the exact-match probability is kept as
    /// the exact rational `M_k / 2^n`.
    pub fn uniform(n: usize, k: usize) -> Result<Self> {
        let profile = AmplitudeProfile::uniform(n, k)?;
        Ok(InterrogationPlan {
            n,
            query_cost: profile.query_cost(),
            expected_correct: expected_correct_quantum(&profile),
            exact_match: success_probability(n as u64, k as u64),
            profile,
        })
    }

    /// Plan for an arbitrary profile; predictions come from the closed forms.
    pub fn for_profile(profile: AmplitudeProfile) -> Self {
        InterrogationPlan {
            n: profile.n(),
            query_cost: profile.query_cost(),
            expected_correct: expected_correct_quantum(&profile),
            exact_match: Probability::from_f64(exact_match_probability(&profile).min(1.0)),
            profile,
        }
    }
}

/// The classical baseline for the same budget.
#[derive(Debug, Clone)]
pub struct ClassicalPlan {
    pub n: usize,
    pub queries: usize,
    pub expected_correct: f64,
    pub exact_match: Probability,
}

impl ClassicalPlan {
    pub fn new(n: usize, k: usize) -> Self {
        let k = k.min(n);
        ClassicalPlan {
            n,
            queries: k,
            expected_correct: expected_correct_classical(n as u64, k as u64),
            exact_match: classical_success_probability(n as u64, k as u64),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn uniform_profile_small_example() {
        let p = AmplitudeProfile::uniform(2, 1).unwrap();
        assert!((p.alphas()[0] - (1.0f64 / 3.0).sqrt()).abs() < 1e-15);
        assert!((p.alphas()[1] - (2.0f64 / 3.0).sqrt()).abs() < 1e-15);
        assert!((p.norm_sqr() - 1.0).abs() < 1e-12);
        assert_eq!(p.query_cost(), 1);
    }

    #[test]
    fn uniform_profile_rejects_oversized_budget() {
        assert!(matches!(
            AmplitudeProfile::uniform(4, 5),
            Err(Error::BudgetTooLarge { .. })
        ));
    }

    #[test]
    fn one_query_expected_bits() {
        let p = AmplitudeProfile::one_query(9).unwrap();
        assert!((expected_correct_quantum(&p) - 6.0).abs() < 1e-12);
        assert_eq!(p.query_cost(), 1);
        // n/2 + sqrt(n)/2 in general.
        for n in [1usize, 4, 25, 100, 10_000] {
            let p = AmplitudeProfile::one_query(n).unwrap();
            let expected = n as f64 / 2.0 + (n as f64).sqrt() / 2.0;
            assert!((expected_correct_quantum(&p) - expected).abs() < 1e-9);
        }
    }

    #[test]
    fn step_profile_examples() {
        let p = AmplitudeProfile::step(4, 1).unwrap();
        assert_eq!(p.alphas(), &[0.0, 1.0]);

        let p = AmplitudeProfile::step(8, 4).unwrap();
        assert!((p.alphas()[4] - 0.5f64.sqrt()).abs() < 1e-15);
        assert!((p.alphas()[3] - 0.5f64.sqrt()).abs() < 1e-15);
        assert_eq!(&p.alphas()[..3], &[0.0, 0.0, 0.0]);

        let p = AmplitudeProfile::step(18, 9).unwrap();
        for j in 7..=9 {
            assert!((p.alphas()[j].powi(2) - 1.0 / 3.0).abs() < 1e-15);
        }
        assert_eq!(p.alphas()[6], 0.0);
    }

    #[test]
    fn step_profile_boundary_shell_balances_norm() {
        let p = AmplitudeProfile::step(10_000, 1_000).unwrap();
        assert!((p.norm_sqr() - 1.0).abs() < 1e-12);
        // Window depth: largest d with d^2 < 1000 is 31.
        assert_eq!(p.alphas()[968], 0.0);
        assert!(p.alphas()[969] > 0.0);
        let interior = 1.0 / 1000f64.sqrt();
        for j in 970..=1000 {
            assert!((p.alphas()[j].powi(2) - interior).abs() < 1e-15);
        }
        assert!(p.alphas()[969].powi(2) < interior);
    }

    #[test]
    fn step_profile_rejects_bad_windows() {
        assert!(matches!(
            AmplitudeProfile::step(8, 0),
            Err(Error::StepWindowOutOfRange { .. })
        ));
        assert!(matches!(
            AmplitudeProfile::step(8, 5),
            Err(Error::StepWindowOutOfRange { .. })
        ));
    }

    #[test]
    fn profile_validation() {
        assert!(matches!(
            AmplitudeProfile::new(3, vec![]),
            Err(Error::EmptyProfile)
        ));
        assert!(matches!(
            AmplitudeProfile::new(2, vec![0.5, 0.5, 0.5, 0.5, 0.0]),
            Err(Error::ProfileTooWide { .. })
        ));
        assert!(matches!(
            AmplitudeProfile::new(3, vec![0.9, 0.1]),
            Err(Error::UnnormalizedProfile { .. })
        ));
        assert!(matches!(
            AmplitudeProfile::new(3, vec![f64::NAN, 1.0]),
            Err(Error::NonFiniteAmplitude { shell: 0 })
        ));
        assert!(AmplitudeProfile::new(3, vec![0.6, 0.8]).is_ok());
    }

    #[test]
    fn query_cost_ignores_negligible_shells() {
        let p = AmplitudeProfile::new(6, vec![0.6, 0.8, 1e-13, 1e-14]).unwrap();
        assert_eq!(p.max_shell(), 3);
        assert_eq!(p.query_cost(), 1);
    }

    #[test]
    fn ratios() {
        assert_eq!(quantum_ratio(0.0), 0.5);
        assert_eq!(quantum_ratio(0.5), 1.0);
        assert_eq!(quantum_ratio(0.7), 1.0);
        assert!((quantum_ratio(0.1) - 0.8).abs() < 1e-12);
        assert!((quantum_ratio(0.25) - (0.5 + (3.0f64 / 16.0).sqrt())).abs() < 1e-15);
        assert_eq!(classical_ratio(0.1), 0.55);
        assert_eq!(classical_equivalent_queries(0.8, 10), 6.0);
        assert_eq!(classical_equivalent_queries(0.5, 1234), 0.0);
        assert_eq!(classical_equivalent_queries(1.0, 50), 50.0);
    }

    #[test]
    fn exact_match_probability_matches_exact_count_for_uniform() {
        for (n, k) in [(4, 2), (10, 8), (9, 7), (6, 0)] {
            let p = AmplitudeProfile::uniform(n, k).unwrap();
            let analytic = exact_match_probability(&p);
            let exact = success_probability(n as u64, k as u64).value();
            assert!((analytic - exact).abs() < 1e-12, "n={n} k={k}");
        }
    }

    #[test]
    fn plans_carry_consistent_predictions() {
        let plan = InterrogationPlan::uniform(10, 8).unwrap();
        assert_eq!(plan.query_cost, 8);
        assert_eq!(plan.exact_match.exact_string().unwrap(), "1013/1024");
        let again = InterrogationPlan::for_profile(plan.profile.clone());
        assert!((again.exact_match.value() - plan.exact_match.value()).abs() < 1e-12);
        assert_eq!(again.expected_correct, plan.expected_correct);

        let classical = ClassicalPlan::new(16, 12);
        assert_eq!(classical.expected_correct, 14.0);
        assert_eq!(classical.exact_match.exact_string().unwrap(), "1/16");
    }

    proptest! {
        #[test]
        fn expected_correct_stays_in_range(n in 1usize..40, seed in 0u64..1000) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let len = rng.random_range(1..=n + 1);
            let mut alphas: Vec<f64> = (0..len).map(|_| rng.random::<f64>() * 2.0 - 1.0).collect();
            let norm = alphas.iter().map(|a| a * a).sum::<f64>().sqrt();
            prop_assume!(norm > 1e-6);
            for a in &mut alphas {
                *a /= norm;
            }
            let p = AmplitudeProfile::new(n, alphas).unwrap();
            let c = expected_correct_quantum(&p);
            prop_assert!((0.0..=n as f64 + 1e-9).contains(&c));
        }

        #[test]
        fn step_profiles_are_normalized(n in 2usize..400, k in 1usize..200) {
            prop_assume!(2 * k <= n);
            let p = AmplitudeProfile::step(n, k).unwrap();
            prop_assert!((p.norm_sqr() - 1.0).abs() < 1e-12);
            prop_assert_eq!(p.query_cost(), k);
        }

        #[test]
        fn uniform_profiles_are_normalized(n in 1usize..60, k in 0usize..60) {
            let k = k.min(n);
            let p = AmplitudeProfile::uniform(n, k).unwrap();
            prop_assert!((p.norm_sqr() - 1.0).abs() < 1e-12);
        }
    }
}
