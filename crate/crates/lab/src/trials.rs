//! Monte Carlo trial runner.
//!
//! Trial `i` owns an independent ChaCha8 generator seeded with
//! `splitmix64(master + (i + 1) * GOLDEN)`, so runs are reproducible from the
//! master seed alone, records are independent of thread count and schedule,
//! and any single trial can be replayed from the seed stored in its record.

use oracle_interrogation::profile::AmplitudeProfile;
use oracle_interrogation::statevector::{
    correct_bits_distribution, run_interrogation, OracleString,
};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The golden-gamma increment of the splitmix64 sequence.
pub const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

/// splitmix64 finalizer.
pub fn splitmix64(mut z: u64) -> u64 {
    z ^= z >> 30;
    z = z.wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z ^= z >> 27;
    z = z.wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Per-trial seed derivation.
pub fn derived_seed(master: u64, trial: u64) -> u64 {
    splitmix64(master.wrapping_add(trial.wrapping_add(1).wrapping_mul(GOLDEN)))
}

/// One simulated interrogation, replayable from `seed`.
#[derive(Debug, Clone)]
pub struct TrialRecord {
    pub trial: u64,
    pub seed: u64,
    pub omega: OracleString,
    pub guess: OracleString,
    pub correct_bits: usize,
    pub exact_match: bool,
}

/// Runs `trials` independent interrogations. When `omega` is `None` each
/// trial draws its own hidden string from its generator before simulating.
pub fn run_trials(
    profile: &AmplitudeProfile,
    omega: Option<&OracleString>,
    trials: u64,
    master_seed: u64,
) -> oracle_interrogation::Result<Vec<TrialRecord>> {
    let run_one = |i: u64| -> oracle_interrogation::Result<TrialRecord> {
        let seed = derived_seed(master_seed, i);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let omega_i = match omega {
            Some(w) => w.clone(),
            None => OracleString::random(profile.n(), &mut rng)?,
        };
        let outcome = run_interrogation(profile, &omega_i, &mut rng)?;
        Ok(TrialRecord {
            trial: i,
            seed,
            omega: omega_i,
            guess: outcome.guess,
            correct_bits: outcome.correct_bits,
            exact_match: outcome.exact_match,
        })
    };

    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..trials).into_par_iter().map(run_one).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..trials).map(run_one).collect()
    }
}

/// Analytic moments the tripwire tests against. Both sigmas are per trial;
/// the null-hypothesis sigma of an empirical mean over `T` trials is
/// `sigma / sqrt(T)`.
#[derive(Debug, Clone, Copy)]
pub struct NullModel {
    pub expected_correct: f64,
    pub sigma_correct: f64,
    pub match_probability: f64,
}

impl NullModel {
    /// Derives the moments from a profile's exact correct-bits distribution.
    pub fn for_profile(
        profile: &AmplitudeProfile,
        match_probability: f64,
    ) -> oracle_interrogation::Result<Self> {
        let dist = correct_bits_distribution(profile)?;
        let mean: f64 = dist.iter().enumerate().map(|(c, p)| c as f64 * p).sum();
        let second: f64 = dist
            .iter()
            .enumerate()
            .map(|(c, p)| (c * c) as f64 * p)
            .sum();
        Ok(NullModel {
            expected_correct: mean,
            sigma_correct: (second - mean * mean).max(0.0).sqrt(),
            match_probability,
        })
    }
}

/// Empirical statistics versus the analytic predictions, with a four-sigma
/// consistency tripwire.
#[derive(Debug, Clone)]
pub struct Summary {
    pub trials: u64,
    pub mean_correct: f64,
    /// Empirical standard error of the mean (reported, not tested against).
    pub se_correct: f64,
    /// Null-hypothesis sigma of the mean: analytic per-trial sigma / sqrt(T).
    pub sigma_mean_correct: f64,
    pub match_rate: f64,
    pub sigma_match: f64,
    pub analytic_expected: f64,
    pub analytic_match: f64,
    pub deviation_sigma_correct: f64,
    pub deviation_sigma_match: f64,
    pub tripped: bool,
}

/// Slack added to the four-sigma windows so exact cases (zero variance, zero
/// deviation up to rounding) never trip.
const TRIP_ABS_FLOOR: f64 = 1e-9;

pub fn summarize(records: &[TrialRecord], null: &NullModel) -> Summary {
    let t = records.len() as f64;
    let mean_correct = records.iter().map(|r| r.correct_bits as f64).sum::<f64>() / t;
    let var = if records.len() > 1 {
        records
            .iter()
            .map(|r| (r.correct_bits as f64 - mean_correct).powi(2))
            .sum::<f64>()
            / (t - 1.0)
    } else {
        0.0
    };
    let se_correct = (var / t).sqrt();
    let sigma_mean_correct = null.sigma_correct / t.sqrt();
    let matches = records.iter().filter(|r| r.exact_match).count() as f64;
    let match_rate = matches / t;
    // Binomial sigma under the analytic null hypothesis.
    let p = null.match_probability;
    let sigma_match = (p * (1.0 - p) / t).sqrt();

    let diff_correct = (mean_correct - null.expected_correct).abs();
    let diff_match = (match_rate - p).abs();
    let deviation_sigma_correct = deviation(diff_correct, sigma_mean_correct);
    let deviation_sigma_match = deviation(diff_match, sigma_match);
    let tripped = diff_correct > 4.0 * sigma_mean_correct + TRIP_ABS_FLOOR
        || diff_match > 4.0 * sigma_match + TRIP_ABS_FLOOR;

    Summary {
        trials: records.len() as u64,
        mean_correct,
        se_correct,
        sigma_mean_correct,
        match_rate,
        sigma_match,
        analytic_expected: null.expected_correct,
        analytic_match: p,
        deviation_sigma_correct,
        deviation_sigma_match,
        tripped,
    }
}

fn deviation(diff: f64, sigma: f64) -> f64 {
    if diff <= TRIP_ABS_FLOOR {
        0.0
    } else if sigma == 0.0 {
        f64::INFINITY
    } else {
        diff / sigma
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn splitmix_reference_vector() {
        // First three outputs of the splitmix64 sequence seeded with 0.
        assert_eq!(splitmix64(GOLDEN), 0xE220_A839_7B1D_CDAF);
        assert_eq!(splitmix64(GOLDEN.wrapping_mul(2)), 0x6E78_9E6A_A1B9_65F4);
        assert_eq!(splitmix64(GOLDEN.wrapping_mul(3)), 0x06C4_5D18_8009_454F);
        assert_eq!(derived_seed(0, 0), 0xE220_A839_7B1D_CDAF);
        assert_eq!(derived_seed(0, 1), 0x6E78_9E6A_A1B9_65F4);
    }

    #[test]
    fn trials_are_reproducible_and_ordered() {
        let profile = AmplitudeProfile::uniform(6, 4).unwrap();
        let a = run_trials(&profile, None, 40, 11).unwrap();
        let b = run_trials(&profile, None, 40, 11).unwrap();
        assert_eq!(a.len(), 40);
        for (i, (x, y)) in a.iter().zip(&b).enumerate() {
            assert_eq!(x.trial, i as u64);
            assert_eq!(x.seed, y.seed);
            assert_eq!(x.omega, y.omega);
            assert_eq!(x.guess, y.guess);
            assert_eq!(x.correct_bits, y.correct_bits);
        }
        let c = run_trials(&profile, None, 40, 12).unwrap();
        assert!(a.iter().zip(&c).any(|(x, y)| x.omega != y.omega));
    }

    #[test]
    fn fixed_omega_is_used_for_every_trial() {
        let profile = AmplitudeProfile::uniform(5, 3).unwrap();
        let omega = OracleString::from_hex(5, "0b").unwrap();
        let records = run_trials(&profile, Some(&omega), 16, 0).unwrap();
        assert!(records.iter().all(|r| r.omega == omega));
    }

    fn fake_record(correct_bits: usize, exact_match: bool) -> TrialRecord {
        let w = OracleString::zero(8).unwrap();
        TrialRecord {
            trial: 0,
            seed: 0,
            omega: w.clone(),
            guess: w,
            correct_bits,
            exact_match,
        }
    }

    fn null(expected: f64, sigma: f64, p: f64) -> NullModel {
        NullModel {
            expected_correct: expected,
            sigma_correct: sigma,
            match_probability: p,
        }
    }

    #[test]
    fn tripwire_fires_only_on_large_deviations() {
        // 100 trials all matching, analytic match probability 0.99: fine.
        let records: Vec<TrialRecord> = (0..100).map(|_| fake_record(8, true)).collect();
        let s = summarize(&records, &null(8.0, 0.5, 0.99));
        assert!(!s.tripped);
        assert_eq!(s.match_rate, 1.0);

        // Same records against an analytic match probability of 0.5: a
        // fifty-sigma deviation must trip.
        let s = summarize(&records, &null(8.0, 0.5, 0.5));
        assert!(s.tripped);
        assert!(s.deviation_sigma_match > 4.0);

        // Zero-variance records agreeing exactly with the analytics: fine.
        let s = summarize(&records, &null(8.0, 0.5, 1.0));
        assert!(!s.tripped);
        assert_eq!(s.deviation_sigma_correct, 0.0);
        assert_eq!(s.se_correct, 0.0);
        assert!((s.sigma_mean_correct - 0.05).abs() < 1e-15);

        // Disagreeing with a certain (zero-sigma) prediction: trip.
        let s = summarize(&records, &null(7.5, 0.0, 1.0));
        assert!(s.tripped);
        assert!(s.deviation_sigma_correct.is_infinite());
    }

    #[test]
    fn null_model_moments_match_the_distribution() {
        // Single query on 4 bits: mean correct count is n/2 + sqrt(n)/2 = 3.
        let profile = AmplitudeProfile::one_query(4).unwrap();
        let plan = oracle_interrogation::profile::InterrogationPlan::for_profile(profile);
        let m = NullModel::for_profile(&plan.profile, plan.exact_match.value()).unwrap();
        assert!((m.expected_correct - 3.0).abs() < 1e-12);
        assert!(m.sigma_correct > 0.0);
    }
}
