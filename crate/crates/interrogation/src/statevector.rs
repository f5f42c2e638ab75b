//! Dense statevector simulation of the interrogation pipeline.
//!
//! The pipeline is four steps: prepare the weighted superposition described by
//! an [`AmplitudeProfile`], flip the sign of every queried basis state whose
//! overlap with the hidden string is odd, apply a Hadamard to every qubit, and
//! measure. All amplitudes stay real throughout, so states are arrays of
//! `2^n` doubles.
//!
//! Every operation is deterministic and produces bit-identical results with
//! and without the `parallel` feature: elementwise passes perform the same
//! arithmetic per element, reductions use fixed chunk boundaries, and the
//! Walsh-Hadamard transform executes the same butterfly graph in both builds.

use rand::Rng;

use crate::combinatorics::{self, ExactCount};
use crate::error::{Error, Result};
use crate::profile::AmplitudeProfile;
use crate::sums;
use crate::walsh;

/// Default cap on the register size for dense simulation (2^24 amplitudes,
/// 128 MiB per state).
pub const DEFAULT_QUBIT_CAP: usize = 24;

/// Computational-basis index of an `n`-qubit register. Qubit 1 is the most
/// significant of the `n` index bits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BasisIndex(pub u64);

impl BasisIndex {
    /// Hamming weight of the index.
    pub fn weight(self) -> u32 {
        self.0.count_ones()
    }

    /// `<x, y> mod 2`: parity of the AND with `mask`.
    pub fn overlap_parity(self, mask: u64) -> u32 {
        (self.0 & mask).count_ones() & 1
    }
}

/// A hidden `n`-bit string; bit 1 is the most significant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleString {
    n: usize,
    mask: u64,
}

impl OracleString {
    pub fn new(n: usize, mask: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyRegister);
        }
        if n > 64 {
            return Err(Error::OracleTooLong(n));
        }
        if n < 64 && mask >> n != 0 {
            return Err(Error::OracleOutOfRange { mask, n });
        }
        Ok(OracleString { n, mask })
    }

    pub fn zero(n: usize) -> Result<Self> {
        OracleString::new(n, 0)
    }

    /// Uniformly random string, consuming one `u64` from the generator.
    pub fn random(n: usize, rng: &mut impl Rng) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyRegister);
        }
        if n > 64 {
            return Err(Error::OracleTooLong(n));
        }
        let raw = rng.random::<u64>();
        let mask = if n == 64 { raw } else { raw & ((1 << n) - 1) };
        OracleString::new(n, mask)
    }

    /// Parses a lowercase or uppercase hex encoding, most significant bit
    /// first. Any value that fits in `n` bits is accepted.
    pub fn from_hex(n: usize, text: &str) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyRegister);
        }
        if n > 64 {
            return Err(Error::OracleTooLong(n));
        }
        let invalid = || Error::InvalidOracleHex {
            text: text.to_string(),
            n,
        };
        if text.is_empty() || text.len() > 16 {
            return Err(invalid());
        }
        let mask = u64::from_str_radix(text, 16).map_err(|_| invalid())?;
        if n < 64 && mask >> n != 0 {
            return Err(invalid());
        }
        OracleString::new(n, mask)
    }

    /// Lowercase hex, most significant bit first, `ceil(n/4)` digits.
    pub fn to_hex(&self) -> String {
        format!("{:0width$x}", self.mask, width = self.n.div_ceil(4))
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn mask(&self) -> u64 {
        self.mask
    }

    /// Bit `i` counted from 0 at the most significant position.
    pub fn bit(&self, i: usize) -> u8 {
        assert!(i < self.n, "bit index out of range");
        ((self.mask >> (self.n - 1 - i)) & 1) as u8
    }

    pub fn to_index(&self) -> BasisIndex {
        BasisIndex(self.mask)
    }

    /// Number of positions where the two strings agree.
    pub fn matching_bits(&self, other: &OracleString) -> usize {
        assert_eq!(self.n, other.n, "strings must have equal length");
        self.n - (self.mask ^ other.mask).count_ones() as usize
    }
}

/// Real-amplitude state of an `n`-qubit register.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n: usize,
    amps: Vec<f64>,
}

impl StateVector {
    /// The weighted superposition of an amplitude profile: a basis state of
    /// Hamming weight `j` receives amplitude `alpha_j / sqrt(C(n, j))`.
    pub fn prepare_weighted(profile: &AmplitudeProfile) -> Result<Self> {
        Self::prepare_weighted_with_cap(profile, DEFAULT_QUBIT_CAP)
    }

    /// As [`StateVector::prepare_weighted`] with an explicit size cap.
    pub fn prepare_weighted_with_cap(profile: &AmplitudeProfile, cap: usize) -> Result<Self> {
        let n = profile.n();
        check_cap(n, cap)?;
        let one = ExactCount::from(1u8);
        let mut term = ExactCount::from(1u8);
        let shell_amp: Vec<f64> = profile
            .alphas()
            .iter()
            .enumerate()
            .map(|(j, &a)| {
                if j > 0 {
                    term *= n as u64 - j as u64 + 1;
                    term /= j as u64;
                }
                a / combinatorics::ratio_to_f64(&term, &one).sqrt()
            })
            .collect();
        let mut amps = vec![0.0; 1 << n];
        for_each_indexed(&mut amps, |x, a| {
            if let Some(&s) = shell_amp.get(x.count_ones() as usize) {
                *a = s;
            }
        });
        Ok(StateVector { n, amps })
    }

    /// The basis state `|index>`.
    pub fn basis_state(n: usize, index: BasisIndex) -> Result<Self> {
        check_cap(n, DEFAULT_QUBIT_CAP)?;
        if n < 64 && index.0 >> n != 0 {
            return Err(Error::OracleOutOfRange { mask: index.0, n });
        }
        let mut amps = vec![0.0; 1 << n];
        amps[index.0 as usize] = 1.0;
        Ok(StateVector { n, amps })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[f64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        sums::chunked_sum_indexed(&self.amps, |_, a| a * a)
    }

    /// One round of phase queries: every basis state of Hamming weight at
    /// most `budget` whose overlap with the hidden string is odd has its
    /// amplitude negated. Exact (only sign bits change).
    pub fn apply_phase_oracle(&mut self, omega: &OracleString, budget: usize) -> Result<()> {
        if omega.len() != self.n {
            return Err(Error::DimensionMismatch {
                state_qubits: self.n,
                oracle_bits: omega.len(),
            });
        }
        let mask = omega.mask();
        let budget = budget as u32;
        for_each_indexed(&mut self.amps, |x, a| {
            let x = BasisIndex(x as u64);
            if x.weight() <= budget && x.overlap_parity(mask) == 1 {
                *a = -*a;
            }
        });
        Ok(())
    }

    /// Hadamard on every qubit: the Walsh-Hadamard transform scaled by
    /// `2^(-n/2)`. Applying it twice restores the state.
    pub fn hadamard_all(&mut self) {
        walsh::fwht(&mut self.amps);
        let scale = 1.0 / (self.amps.len() as f64).sqrt();
        for_each_indexed(&mut self.amps, |_, a| *a *= scale);
    }

    /// Measurement distribution over basis indices.
    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a * a).collect()
    }

    /// Samples one measurement outcome by inverse-CDF over the basis order.
    pub fn sample(&self, rng: &mut impl Rng) -> BasisIndex {
        let u = rng.random::<f64>();
        let mut cum = 0.0;
        let mut last_support = 0usize;
        for (x, a) in self.amps.iter().enumerate() {
            let p = a * a;
            if p > 0.0 {
                last_support = x;
            }
            cum += p;
            if u < cum {
                return BasisIndex(x as u64);
            }
        }
        BasisIndex(last_support as u64)
    }
}

fn check_cap(n: usize, cap: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::EmptyRegister);
    }
    let cap = cap.min(usize::BITS as usize - 2);
    if n > cap {
        return Err(Error::QubitCapExceeded { n, cap });
    }
    Ok(())
}

/// Elementwise pass with the global index, parallel when the feature is on.
/// The per-element arithmetic is identical in both builds.
#[cfg(feature = "parallel")]
fn for_each_indexed<F>(xs: &mut [f64], f: F)
where
    F: Fn(usize, &mut f64) + Sync,
{
    use rayon::prelude::*;

    xs.par_chunks_mut(sums::SUM_CHUNK)
        .enumerate()
        .for_each(|(c, chunk)| {
            let base = c * sums::SUM_CHUNK;
            for (i, a) in chunk.iter_mut().enumerate() {
                f(base + i, a);
            }
        });
}

#[cfg(not(feature = "parallel"))]
fn for_each_indexed<F>(xs: &mut [f64], f: F)
where
    F: Fn(usize, &mut f64),
{
    for (i, a) in xs.iter_mut().enumerate() {
        f(i, a);
    }
}

/// Result of one simulated interrogation.
#[derive(Debug, Clone)]
pub struct InterrogationOutcome {
    pub guess: OracleString,
    pub correct_bits: usize,
    pub exact_match: bool,
    pub query_cost: usize,
}

/// Runs the full pipeline once: prepare, phase oracle, Hadamard layer,
/// measure. The budget charged (and applied) is the profile's query cost.
pub fn run_interrogation(
    profile: &AmplitudeProfile,
    omega: &OracleString,
    rng: &mut impl Rng,
) -> Result<InterrogationOutcome> {
    if omega.len() != profile.n() {
        return Err(Error::DimensionMismatch {
            state_qubits: profile.n(),
            oracle_bits: omega.len(),
        });
    }
    let query_cost = profile.query_cost();
    let mut state = StateVector::prepare_weighted(profile)?;
    state.apply_phase_oracle(omega, query_cost)?;
    state.hadamard_all();
    let y = state.sample(rng);
    let guess = OracleString::new(omega.len(), y.0)?;
    let correct_bits = guess.matching_bits(omega);
    Ok(InterrogationOutcome {
        correct_bits,
        exact_match: correct_bits == omega.len(),
        guess,
        query_cost,
    })
}

/// Distribution of the number of correctly recovered bits: entry `c` is the
/// probability that the guess agrees with the hidden string in exactly `c`
/// positions. Measurement probabilities satisfy `P_omega(y) = P_0(y XOR
/// omega)`, so the distribution does not depend on the hidden string and is
/// computed from a single pipeline run.
pub fn correct_bits_distribution(profile: &AmplitudeProfile) -> Result<Vec<f64>> {
    let n = profile.n();
    let mut state = StateVector::prepare_weighted(profile)?;
    state.apply_phase_oracle(&OracleString::zero(n)?, profile.query_cost())?;
    state.hadamard_all();
    let mut buckets = vec![0.0; n + 1];
    for (y, a) in state.amplitudes().iter().enumerate() {
        buckets[n - y.count_ones() as usize] += a * a;
    }
    Ok(buckets)
}

/// Expected number of correct bits computed directly from the final
/// distribution: `sum_y P(y) * (n - |y XOR omega|)`. Quadratic-cost ground
/// truth for the closed form in [`crate::profile::expected_correct_quantum`].
pub fn brute_force_expected_correct(
    profile: &AmplitudeProfile,
    omega: &OracleString,
) -> Result<f64> {
    if omega.len() != profile.n() {
        return Err(Error::DimensionMismatch {
            state_qubits: profile.n(),
            oracle_bits: omega.len(),
        });
    }
    let n = profile.n();
    let mut state = StateVector::prepare_weighted(profile)?;
    state.apply_phase_oracle(omega, profile.query_cost())?;
    state.hadamard_all();
    let mask = omega.mask();
    Ok(sums::chunked_sum_indexed(state.amplitudes(), |y, a| {
        let wrong = (y as u64 ^ mask).count_ones() as usize;
        a * a * (n - wrong) as f64
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profile::{exact_match_probability, expected_correct_quantum};
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn uniform_state(n: usize, k: usize) -> StateVector {
        StateVector::prepare_weighted(&AmplitudeProfile::uniform(n, k).unwrap()).unwrap()
    }

    #[test]
    fn oracle_string_encoding() {
        let w = OracleString::from_hex(10, "2ff").unwrap();
        assert_eq!(w.mask(), 0x2ff);
        assert_eq!(w.to_hex(), "2ff");
        assert_eq!(w.len(), 10);
        assert_eq!(w.bit(0), 1);
        assert_eq!(w.bit(1), 0);
        assert_eq!(w.bit(9), 1);

        assert_eq!(OracleString::new(9, 1).unwrap().to_hex(), "001");
        assert_eq!(OracleString::from_hex(9, "001").unwrap().mask(), 1);
        assert!(OracleString::from_hex(4, "1f").is_err());
        assert!(OracleString::from_hex(4, "").is_err());
        assert!(OracleString::from_hex(4, "xy").is_err());
        assert!(OracleString::new(4, 16).is_err());
        assert!(OracleString::new(0, 0).is_err());
        assert!(OracleString::new(65, 0).is_err());
    }

    #[test]
    fn matching_bits_counts_agreement() {
        let a = OracleString::new(6, 0b101010).unwrap();
        let b = OracleString::new(6, 0b101010).unwrap();
        let c = OracleString::new(6, 0b010101).unwrap();
        assert_eq!(a.matching_bits(&b), 6);
        assert_eq!(a.matching_bits(&c), 0);
    }

    #[test]
    fn prepared_state_spreads_shell_weight() {
        // alpha = (sqrt(1/3), sqrt(2/3)) on 2 qubits: all three populated
        // basis states end up with amplitude 1/sqrt(3).
        let s = uniform_state(2, 1);
        let a = (1.0f64 / 3.0).sqrt();
        for x in 0..3 {
            assert!((s.amplitudes()[x] - a).abs() < 1e-15);
        }
        assert_eq!(s.amplitudes()[3], 0.0);
        assert!((s.norm_sqr() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn zero_oracle_is_identity() {
        let mut s = uniform_state(4, 2);
        let before = s.clone();
        s.apply_phase_oracle(&OracleString::zero(4).unwrap(), 4)
            .unwrap();
        assert_eq!(s, before);
    }

    #[test]
    fn phase_oracle_flips_odd_overlaps_within_budget() {
        let mut s = uniform_state(2, 2);
        let w = OracleString::new(2, 0b11).unwrap();
        s.apply_phase_oracle(&w, 2).unwrap();
        let a = s.amplitudes();
        assert!(a[0] > 0.0);
        assert!(a[1] < 0.0);
        assert!(a[2] < 0.0);
        assert!(a[3] > 0.0);

        // With budget 1 the weight-2 state |11> is outside the queried set.
        let mut s = uniform_state(2, 2);
        s.apply_phase_oracle(&w, 1).unwrap();
        assert!(s.amplitudes()[3] > 0.0);
    }

    #[test]
    fn hadamard_of_all_zero_state_is_uniform() {
        let mut s = StateVector::basis_state(3, BasisIndex(0)).unwrap();
        s.hadamard_all();
        for a in s.amplitudes() {
            assert!((a - 8.0f64.sqrt().recip()).abs() < 1e-15);
        }
    }

    #[test]
    fn pipeline_recovers_omega_with_known_probability() {
        // Uniform profile, n = 4, k = 2: P(measure omega) = M_2 / 2^4 = 11/16.
        for omega_mask in [0b0000u64, 0b1010, 0b1111, 0b0001] {
            let omega = OracleString::new(4, omega_mask).unwrap();
            let p = AmplitudeProfile::uniform(4, 2).unwrap();
            let mut s = StateVector::prepare_weighted(&p).unwrap();
            s.apply_phase_oracle(&omega, 2).unwrap();
            s.hadamard_all();
            let dist = s.probabilities();
            assert!((dist[omega_mask as usize] - 11.0 / 16.0).abs() < 1e-12);
        }
    }

    #[test]
    fn sampling_is_deterministic_per_seed() {
        let p = AmplitudeProfile::uniform(6, 3).unwrap();
        let omega = OracleString::new(6, 0b110100).unwrap();
        let mut r1 = ChaCha8Rng::seed_from_u64(123);
        let mut r2 = ChaCha8Rng::seed_from_u64(123);
        let a = run_interrogation(&p, &omega, &mut r1).unwrap();
        let b = run_interrogation(&p, &omega, &mut r2).unwrap();
        assert_eq!(a.guess, b.guess);
        assert_eq!(a.correct_bits, b.correct_bits);
        assert_eq!(a.query_cost, 3);
    }

    #[test]
    fn sample_respects_point_mass() {
        let mut s = StateVector::basis_state(3, BasisIndex(5)).unwrap();
        s.hadamard_all();
        s.hadamard_all();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for _ in 0..32 {
            assert_eq!(s.sample(&mut rng), BasisIndex(5));
        }
    }

    #[test]
    fn cap_is_enforced_and_named() {
        let p = AmplitudeProfile::uniform(25, 3).unwrap();
        let err = StateVector::prepare_weighted(&p).unwrap_err();
        assert_eq!(err, Error::QubitCapExceeded { n: 25, cap: 24 });
        assert!(err.to_string().contains("24"));
        assert!(StateVector::prepare_weighted_with_cap(&p, 25).is_ok());
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        let p = AmplitudeProfile::uniform(4, 2).unwrap();
        let omega = OracleString::zero(5).unwrap();
        assert!(matches!(
            run_interrogation(&p, &omega, &mut ChaCha8Rng::seed_from_u64(0)),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn correct_bits_distribution_is_consistent() {
        let mut rng = ChaCha8Rng::seed_from_u64(44);
        for n in 1..=8usize {
            let p = random_profile(n, &mut rng);
            let dist = correct_bits_distribution(&p).unwrap();
            assert_eq!(dist.len(), n + 1);
            let total: f64 = dist.iter().sum();
            assert!((total - 1.0).abs() < 1e-12);
            let mean: f64 = dist.iter().enumerate().map(|(c, p)| c as f64 * p).sum();
            assert!((mean - expected_correct_quantum(&p)).abs() < 1e-10, "n={n}");

            // Hidden-string independence: bucketing the distribution for a
            // random hidden string gives the same histogram.
            let omega = OracleString::random(n, &mut rng).unwrap();
            let mut s = StateVector::prepare_weighted(&p).unwrap();
            s.apply_phase_oracle(&omega, p.query_cost()).unwrap();
            s.hadamard_all();
            let mut buckets = vec![0.0; n + 1];
            for (y, q) in s.probabilities().iter().enumerate() {
                let correct = n - (y as u64 ^ omega.mask()).count_ones() as usize;
                buckets[correct] += q;
            }
            for (a, b) in dist.iter().zip(&buckets) {
                assert!((a - b).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn brute_force_matches_closed_form_spot_checks() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for n in 1..=8usize {
            let omega = OracleString::random(n, &mut rng).unwrap();
            for k in 0..=n {
                let p = AmplitudeProfile::uniform(n, k).unwrap();
                let direct = brute_force_expected_correct(&p, &omega).unwrap();
                let closed = expected_correct_quantum(&p);
                assert!((direct - closed).abs() < 1e-12, "n={n} k={k}");
            }
        }
    }

    #[test]
    fn exact_match_probability_matches_distribution() {
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        for n in 2..=7usize {
            let omega = OracleString::random(n, &mut rng).unwrap();
            let p = AmplitudeProfile::one_query(n).unwrap();
            let mut s = StateVector::prepare_weighted(&p).unwrap();
            s.apply_phase_oracle(&omega, p.query_cost()).unwrap();
            s.hadamard_all();
            let dist = s.probabilities();
            assert!((dist[omega.mask() as usize] - exact_match_probability(&p)).abs() < 1e-12);
        }
    }

    fn random_profile(n: usize, rng: &mut ChaCha8Rng) -> AmplitudeProfile {
        let len = rng.random_range(1..=n + 1);
        let mut alphas: Vec<f64> = (0..len).map(|_| rng.random::<f64>() * 2.0 - 1.0).collect();
        let norm = alphas.iter().map(|a| a * a).sum::<f64>().sqrt();
        if norm < 1e-6 {
            return AmplitudeProfile::uniform(n, 0).unwrap();
        }
        for a in &mut alphas {
            *a /= norm;
        }
        AmplitudeProfile::new(n, alphas).unwrap()
    }

    proptest! {
        #[test]
        fn hadamard_is_an_involution(n in 1usize..9, seed in 0u64..500) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let p = random_profile(n, &mut rng);
            let s = StateVector::prepare_weighted(&p).unwrap();
            let mut t = s.clone();
            t.hadamard_all();
            prop_assert!((t.norm_sqr() - 1.0).abs() < 1e-12);
            t.hadamard_all();
            for (a, b) in t.amplitudes().iter().zip(s.amplitudes()) {
                prop_assert!((a - b).abs() < 1e-12);
            }
        }

        #[test]
        fn phase_oracle_is_an_exact_involution(n in 1usize..9, seed in 0u64..500) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let p = random_profile(n, &mut rng);
            let omega = OracleString::random(n, &mut rng).unwrap();
            let s = StateVector::prepare_weighted(&p).unwrap();
            let mut t = s.clone();
            t.apply_phase_oracle(&omega, n).unwrap();
            t.apply_phase_oracle(&omega, n).unwrap();
            prop_assert_eq!(s, t);
        }

        #[test]
        fn measurement_shift_covariance(n in 1usize..9, seed in 0u64..500) {
            // P_omega(y) = P_0(y XOR omega) for the full pipeline.
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let p = random_profile(n, &mut rng);
            let omega = OracleString::random(n, &mut rng).unwrap();
            let budget = p.max_shell();

            let mut with_omega = StateVector::prepare_weighted(&p).unwrap();
            with_omega.apply_phase_oracle(&omega, budget).unwrap();
            with_omega.hadamard_all();

            let mut base = StateVector::prepare_weighted(&p).unwrap();
            base.apply_phase_oracle(&OracleString::zero(n).unwrap(), budget).unwrap();
            base.hadamard_all();

            let d1 = with_omega.probabilities();
            let d0 = base.probabilities();
            for y in 0..d1.len() {
                let shifted = y ^ omega.mask() as usize;
                prop_assert!((d1[y] - d0[shifted]).abs() < 1e-12);
            }
        }
    }
}
