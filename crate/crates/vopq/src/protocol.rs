//! Seeded Monte-Carlo engines for BB84 and generalized B92, with an
//! optional intercept-resend eavesdropper and per-signal transcripts.
//!
//! # Determinism
//!
//! Signals are simulated in fixed-size batches. Batch `i` owns stream `i`
//! of a ChaCha8 generator seeded from the run seed, so the transcript is
//! bit-identical no matter how batches are scheduled across threads; the
//! parallel and sequential paths produce the same bytes. Within a signal
//! the draw order is fixed:
//!
//! 1. Alice's bit (B92) or alphabet index (BB84);
//! 2. photon-presence sample, vacuum-one-photon encoding only;
//! 3. Eve's measurement outcome, when she is present;
//! 4. channel arrival for signals still travelling, polarization-like
//!    encoding with loss only;
//! 5. Bob's projector choice (projective B92) or basis choice (BB84),
//!    every slot;
//! 6. Bob's measurement outcome, delivered signals only.
//!
//! # Loss and arrivals
//!
//! Vacuum-one-photon signals always reach Bob; loss acts as amplitude
//! damping on the state itself, which is what turns loss into
//! misidentification errors. Polarization-like signals are lost outright
//! with probability `gamma` and arrive undamaged otherwise. Eve blocks
//! every signal she cannot identify, and her resends traverse the channel.
//! The only sources of non-arrival are therefore Eve's blocking and
//! polarization-like channel loss; eavesdropper detection compares the
//! observed non-arrival rate against the losses Alice and Bob budget for.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::analysis::DetectionStrategy;
use crate::channel::{amplitude_damp, LossModel};
use crate::error::{Error, Result};
use crate::hilbert::{DensityMatrix, PureState};
use crate::measurement::{
    outcome_distribution, pvm_for_choice, sample_outcome, unambiguous_povm_or_limit,
    Outcome, OutcomeDistribution,
};
use crate::stats;
use crate::tol;
use crate::{map_indexed, Parallelism};

/// Signals per deterministic RNG stream.
const BATCH_SIZE: u64 = 16_384;

/// Photon-number accounting mode.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Encoding {
    /// Abstract one-photon-per-qubit carriers; channel loss removes the
    /// photon and the signal with it.
    PolarizationLike,
    /// Vacuum-one-photon superpositions; channel loss damps the state.
    Vopq,
}

/// Eavesdropper model.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EveMode {
    Absent,
    /// Eve measures every signal with the unambiguous-discrimination
    /// measurement, resends a fresh copy of whatever she identifies, and
    /// blocks the rest.
    InterceptResend,
}

/// Protocol selector with the B92-only parameters attached to the B92 arm.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ProtocolKind {
    Bb84,
    B92 {
        psi0: PureState,
        psi1: PureState,
        detection: DetectionStrategy,
    },
}

/// Full description of one protocol run.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProtocolConfig {
    pub protocol: ProtocolKind,
    pub encoding: Encoding,
    pub loss: LossModel,
    pub eve: EveMode,
    pub n_signals: u64,
    pub seed: u64,
}

impl ProtocolConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_signals == 0 {
            return Err(Error::InvalidConfig("n_signals must be at least 1".into()));
        }
        match &self.protocol {
            ProtocolKind::Bb84 => {
                if self.eve == EveMode::InterceptResend {
                    return Err(Error::InvalidConfig(
                        "intercept-resend eavesdropping is modelled for B92 only".into(),
                    ));
                }
            }
            ProtocolKind::B92 { psi0, psi1, .. } => {
                let s = psi0.overlap(psi1).norm();
                if s >= 1.0 - tol::ALGEBRAIC {
                    return Err(Error::IdenticalStates);
                }
            }
        }
        Ok(())
    }
}

/// Bob's apparatus setting for one time slot.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BobSetting {
    PvmChoice0,
    PvmChoice1,
    Povm,
    BasisZ,
    BasisX,
}

/// Per-signal ledger entry.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SignalRecord {
    pub alice_bit: u8,
    pub alice_state: PureState,
    pub eve_outcome: Option<Outcome>,
    /// False when Eve blocked the slot or a polarization-like photon was
    /// lost in the channel.
    pub delivered: bool,
    pub bob_setting: BobSetting,
    /// `Inconclusive` for slots that never reached Bob.
    pub bob_outcome: Outcome,
    pub sifted: bool,
    pub bob_bit: Option<u8>,
    pub error: bool,
}

/// Aggregated outcome of a run.
#[derive(Clone, Debug, PartialEq)]
pub struct ProtocolTranscript {
    pub records: Vec<SignalRecord>,
    /// Qubits sent.
    pub n_q: u64,
    /// Expected photons sent: the summed mean photon number of Alice's
    /// states (one per qubit for polarization-like encoding).
    pub n_p_expected: f64,
    /// Photons sent under per-signal Bernoulli photon-presence sampling.
    pub n_p_sampled: u64,
    /// Sifted-key length, wrong conclusive bits included.
    pub n_b: u64,
    /// Sifted bits that disagree with Alice's.
    pub n_err: u64,
    /// Slots Bob registered.
    pub n_delivered: u64,
    /// `n_delivered / n_q`.
    pub observed_arrival_rate: f64,
}

/// Effectiveness estimates read from a transcript.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EffectivenessReport {
    /// Sifted bits per qubit sent.
    pub h: f64,
    /// Sifted bits per expected photon sent.
    pub k_expected: f64,
    /// Sifted bits per sampled photon sent.
    pub k_sampled: f64,
}

/// Verdict of the loss-rate eavesdropping check.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EveVerdict {
    Clean,
    Suspect,
}

/// Eve's precomputed measurement statistics.
///
/// Her unambiguous measurement of a pure input never misidentifies it,
/// so every state she forwards is an exact copy of one of Alice's two
/// signal states, indexed by her conclusive outcome.
#[derive(Clone, Debug)]
pub struct EveModel {
    dists: [OutcomeDistribution; 2],
}

impl EveModel {
    pub fn new(psi0: &PureState, psi1: &PureState) -> Result<Self> {
        let povm = unambiguous_povm_or_limit(psi0, psi1)?;
        Ok(Self {
            dists: [
                outcome_distribution(&povm, &psi0.density())?,
                outcome_distribution(&povm, &psi1.density())?,
            ],
        })
    }
}

/// Applies the intercept-resend step to an in-progress record: samples
/// Eve's outcome on Alice's pre-loss state, blocks on inconclusive, and
/// returns the index of the state she forwards otherwise.
pub fn apply_eve<R: Rng + ?Sized>(
    record: &mut SignalRecord,
    eve: &EveModel,
    rng: &mut R,
) -> Option<u8> {
    let outcome = sample_outcome(&eve.dists[record.alice_bit as usize], rng);
    record.eve_outcome = Some(outcome);
    match outcome.concluded_bit() {
        Some(bit) => Some(bit),
        None => {
            record.delivered = false;
            None
        }
    }
}

enum Detector {
    /// Outcome distributions indexed by [Bob's projector choice][state].
    B92Pvm(Box<[[OutcomeDistribution; 2]; 2]>),
    /// Outcome distributions indexed by [state].
    B92Povm(Box<[OutcomeDistribution; 2]>),
    /// Probability of the bit-0 outcome indexed by [alphabet state][basis].
    Bb84(Box<[[f64; 2]; 4]>),
}

struct RunContext {
    encoding: Encoding,
    gamma: f64,
    n_signals: u64,
    seed: u64,
    /// Alice's alphabet (two states for B92, four for BB84).
    alphabet: Vec<PureState>,
    /// Mean photon number per alphabet state under the active encoding.
    photon_mean: Vec<f64>,
    detector: Detector,
    eve: Option<EveModel>,
}

fn effective_density(state: &PureState, encoding: Encoding, gamma: f64) -> Result<DensityMatrix> {
    match encoding {
        // Polarization-like loss is all-or-nothing: survivors arrive pure.
        Encoding::PolarizationLike => Ok(state.density()),
        Encoding::Vopq => amplitude_damp(&state.density(), gamma),
    }
}

impl RunContext {
    fn build(config: &ProtocolConfig) -> Result<Self> {
        config.validate()?;
        let gamma = config.loss.gamma();
        let encoding = config.encoding;
        match &config.protocol {
            ProtocolKind::B92 {
                psi0,
                psi1,
                detection,
            } => {
                let alphabet = vec![*psi0, *psi1];
                let photon_mean = photon_means(&alphabet, encoding);
                let damped = [
                    effective_density(psi0, encoding, gamma)?,
                    effective_density(psi1, encoding, gamma)?,
                ];
                let detector = match detection {
                    DetectionStrategy::Pvm => {
                        let set0 = pvm_for_choice(psi0, psi1, 0)?;
                        let set1 = pvm_for_choice(psi0, psi1, 1)?;
                        Detector::B92Pvm(Box::new([
                            [
                                outcome_distribution(&set0, &damped[0])?,
                                outcome_distribution(&set0, &damped[1])?,
                            ],
                            [
                                outcome_distribution(&set1, &damped[0])?,
                                outcome_distribution(&set1, &damped[1])?,
                            ],
                        ]))
                    }
                    DetectionStrategy::Povm => {
                        let povm = unambiguous_povm_or_limit(psi0, psi1)?;
                        Detector::B92Povm(Box::new([
                            outcome_distribution(&povm, &damped[0])?,
                            outcome_distribution(&povm, &damped[1])?,
                        ]))
                    }
                };
                let eve = match config.eve {
                    EveMode::Absent => None,
                    EveMode::InterceptResend => Some(EveModel::new(psi0, psi1)?),
                };
                Ok(Self {
                    encoding,
                    gamma,
                    n_signals: config.n_signals,
                    seed: config.seed,
                    alphabet,
                    photon_mean,
                    detector,
                    eve,
                })
            }
            ProtocolKind::Bb84 => {
                let alphabet = vec![
                    PureState::vacuum(),
                    PureState::one_photon(),
                    PureState::plus(),
                    PureState::minus(),
                ];
                let photon_mean = photon_means(&alphabet, encoding);
                let basis_zero = [PureState::vacuum(), PureState::plus()];
                let mut p_zero = [[0.0; 2]; 4];
                for (state_idx, state) in alphabet.iter().enumerate() {
                    let rho = effective_density(state, encoding, gamma)?;
                    for (basis_idx, anchor) in basis_zero.iter().enumerate() {
                        p_zero[state_idx][basis_idx] =
                            rho.expectation(anchor).clamp(0.0, 1.0);
                    }
                }
                Ok(Self {
                    encoding,
                    gamma,
                    n_signals: config.n_signals,
                    seed: config.seed,
                    alphabet,
                    photon_mean,
                    detector: Detector::Bb84(Box::new(p_zero)),
                    eve: None,
                })
            }
        }
    }
}

fn photon_means(alphabet: &[PureState], encoding: Encoding) -> Vec<f64> {
    alphabet
        .iter()
        .map(|s| match encoding {
            Encoding::PolarizationLike => 1.0,
            Encoding::Vopq => s.mean_photon_number(),
        })
        .collect()
}

#[derive(Default)]
struct BatchTally {
    records: Vec<SignalRecord>,
    n_p_expected: f64,
    n_p_sampled: u64,
    n_b: u64,
    n_err: u64,
    n_delivered: u64,
}

fn simulate_batch(ctx: &RunContext, batch_index: u64) -> BatchTally {
    let start = batch_index * BATCH_SIZE;
    let end = (start + BATCH_SIZE).min(ctx.n_signals);
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed);
    rng.set_stream(batch_index);

    let mut tally = BatchTally {
        records: Vec::with_capacity((end - start) as usize),
        ..BatchTally::default()
    };
    for _ in start..end {
        let record = match &ctx.detector {
            Detector::Bb84(p_zero) => simulate_bb84_signal(ctx, p_zero, &mut rng, &mut tally),
            _ => simulate_b92_signal(ctx, &mut rng, &mut tally),
        };
        if record.delivered {
            tally.n_delivered += 1;
        }
        if record.sifted {
            tally.n_b += 1;
            if record.error {
                tally.n_err += 1;
            }
        }
        tally.records.push(record);
    }
    tally
}

fn sample_photon_presence<R: Rng + ?Sized>(
    ctx: &RunContext,
    state_idx: usize,
    rng: &mut R,
    tally: &mut BatchTally,
) {
    tally.n_p_expected += ctx.photon_mean[state_idx];
    match ctx.encoding {
        Encoding::PolarizationLike => tally.n_p_sampled += 1,
        Encoding::Vopq => {
            let u: f64 = rng.random();
            if u < ctx.alphabet[state_idx].mean_photon_number() {
                tally.n_p_sampled += 1;
            }
        }
    }
}

fn simulate_b92_signal<R: Rng + ?Sized>(
    ctx: &RunContext,
    rng: &mut R,
    tally: &mut BatchTally,
) -> SignalRecord {
    let alice_bit = rng.random_range(0..2u8);
    let mut record = SignalRecord {
        alice_bit,
        alice_state: ctx.alphabet[alice_bit as usize],
        eve_outcome: None,
        delivered: true,
        bob_setting: BobSetting::Povm,
        bob_outcome: Outcome::Inconclusive,
        sifted: false,
        bob_bit: None,
        error: false,
    };
    sample_photon_presence(ctx, alice_bit as usize, rng, tally);

    // Index of the state actually travelling to Bob; Eve may substitute
    // her own exact copy, or block the slot.
    let mut travelling = alice_bit;
    if let Some(eve) = &ctx.eve {
        if let Some(forwarded) = apply_eve(&mut record, eve, rng) {
            travelling = forwarded;
        }
    }

    if record.delivered && ctx.encoding == Encoding::PolarizationLike && ctx.gamma > 0.0 {
        let u: f64 = rng.random();
        if u < ctx.gamma {
            record.delivered = false;
        }
    }

    // Bob sets his apparatus before knowing whether anything arrives.
    match &ctx.detector {
        Detector::B92Pvm(dists) => {
            let choice = rng.random_range(0..2u8);
            record.bob_setting = if choice == 0 {
                BobSetting::PvmChoice0
            } else {
                BobSetting::PvmChoice1
            };
            if record.delivered {
                record.bob_outcome =
                    sample_outcome(&dists[choice as usize][travelling as usize], rng);
            }
        }
        Detector::B92Povm(dists) => {
            record.bob_setting = BobSetting::Povm;
            if record.delivered {
                record.bob_outcome = sample_outcome(&dists[travelling as usize], rng);
            }
        }
        Detector::Bb84(_) => unreachable!("B92 context carries a B92 detector"),
    }

    if let Some(bit) = record.bob_outcome.concluded_bit() {
        record.sifted = true;
        record.bob_bit = Some(bit);
        record.error = bit != record.alice_bit;
    }
    record
}

fn simulate_bb84_signal<R: Rng + ?Sized>(
    ctx: &RunContext,
    p_zero: &[[f64; 2]; 4],
    rng: &mut R,
    tally: &mut BatchTally,
) -> SignalRecord {
    let state_idx = rng.random_range(0..4u8);
    let alice_bit = state_idx % 2;
    let alice_basis = state_idx / 2;
    let mut record = SignalRecord {
        alice_bit,
        alice_state: ctx.alphabet[state_idx as usize],
        eve_outcome: None,
        delivered: true,
        bob_setting: BobSetting::BasisZ,
        bob_outcome: Outcome::Inconclusive,
        sifted: false,
        bob_bit: None,
        error: false,
    };
    sample_photon_presence(ctx, state_idx as usize, rng, tally);

    if ctx.encoding == Encoding::PolarizationLike && ctx.gamma > 0.0 {
        let u: f64 = rng.random();
        if u < ctx.gamma {
            record.delivered = false;
        }
    }

    let bob_basis = rng.random_range(0..2u8);
    record.bob_setting = if bob_basis == 0 {
        BobSetting::BasisZ
    } else {
        BobSetting::BasisX
    };
    if !record.delivered {
        return record;
    }

    let u: f64 = rng.random();
    let bit = if u < p_zero[state_idx as usize][bob_basis as usize] {
        0u8
    } else {
        1u8
    };
    record.bob_outcome = if bit == 0 {
        Outcome::ConcludeState0
    } else {
        Outcome::ConcludeState1
    };
    if bob_basis == alice_basis {
        record.sifted = true;
        record.bob_bit = Some(bit);
        record.error = bit != alice_bit;
    }
    record
}

fn run_context(ctx: &RunContext, parallelism: Parallelism) -> ProtocolTranscript {
    let n_batches = ctx.n_signals.div_ceil(BATCH_SIZE);
    let batches = map_indexed(n_batches as usize, parallelism, |i| {
        simulate_batch(ctx, i as u64)
    });

    let mut records = Vec::with_capacity(ctx.n_signals as usize);
    let mut n_p_expected = 0.0;
    let mut n_p_sampled = 0;
    let mut n_b = 0;
    let mut n_err = 0;
    let mut n_delivered = 0;
    for batch in batches {
        records.extend(batch.records);
        n_p_expected += batch.n_p_expected;
        n_p_sampled += batch.n_p_sampled;
        n_b += batch.n_b;
        n_err += batch.n_err;
        n_delivered += batch.n_delivered;
    }
    let n_q = records.len() as u64;
    debug_assert_eq!(n_q, ctx.n_signals);
    debug_assert!(n_b <= n_q);
    ProtocolTranscript {
        records,
        n_q,
        n_p_expected,
        n_p_sampled,
        n_b,
        n_err,
        n_delivered,
        observed_arrival_rate: n_delivered as f64 / n_q as f64,
    }
}

/// Runs any configured protocol, parallel when the `parallel` feature is
/// active.
pub fn run(config: &ProtocolConfig) -> Result<ProtocolTranscript> {
    run_with(config, Parallelism::Auto)
}

/// Runs with an explicit execution mode; `Sequential` always produces the
/// same transcript as `Auto`.
pub fn run_with(config: &ProtocolConfig, parallelism: Parallelism) -> Result<ProtocolTranscript> {
    let ctx = RunContext::build(config)?;
    Ok(run_context(&ctx, parallelism))
}

/// Runs a generalized B92 session; the configuration must select B92.
pub fn run_b92(config: &ProtocolConfig) -> Result<ProtocolTranscript> {
    match config.protocol {
        ProtocolKind::B92 { .. } => run(config),
        ProtocolKind::Bb84 => Err(Error::InvalidConfig(
            "run_b92 called with a BB84 configuration".into(),
        )),
    }
}

/// Runs a BB84 session; the configuration must select BB84.
pub fn run_bb84(config: &ProtocolConfig) -> Result<ProtocolTranscript> {
    match config.protocol {
        ProtocolKind::Bb84 => run(config),
        ProtocolKind::B92 { .. } => Err(Error::InvalidConfig(
            "run_bb84 called with a B92 configuration".into(),
        )),
    }
}

/// Reads the effectiveness parameters off a transcript: sifted bits per
/// qubit and per photon, the latter under both photon-accounting modes.
pub fn effectiveness_report(transcript: &ProtocolTranscript) -> Result<EffectivenessReport> {
    if transcript.n_q == 0 {
        return Err(Error::EmptyTranscript);
    }
    if transcript.n_p_expected <= 0.0 {
        return Err(Error::DegenerateAlphabet);
    }
    let h = transcript.n_b as f64 / transcript.n_q as f64;
    debug_assert!(h <= 1.0);
    Ok(EffectivenessReport {
        h,
        k_expected: transcript.n_b as f64 / transcript.n_p_expected,
        k_sampled: transcript.n_b as f64 / transcript.n_p_sampled.max(1) as f64,
    })
}

/// One-sided exact binomial p-value for the observed non-arrival count
/// against the loss rate Alice and Bob expect.
pub fn non_arrival_p_value(transcript: &ProtocolTranscript, expected_gamma: f64) -> Result<f64> {
    if transcript.n_q == 0 {
        return Err(Error::EmptyTranscript);
    }
    if !expected_gamma.is_finite() || !(0.0..=1.0).contains(&expected_gamma) {
        return Err(Error::OutOfRange {
            name: "expected_gamma",
            value: expected_gamma,
            lo: 0.0,
            hi: 1.0,
        });
    }
    let missing = transcript.n_q - transcript.n_delivered;
    Ok(stats::binomial_sf_at_least(
        transcript.n_q,
        missing,
        expected_gamma,
    ))
}

/// Flags a session as suspect when signals go missing significantly more
/// often than the expected loss rate allows (one-sided exact binomial
/// test).
pub fn detect_eavesdropper(
    transcript: &ProtocolTranscript,
    expected_gamma: f64,
    significance: f64,
) -> Result<EveVerdict> {
    if !significance.is_finite() || significance <= 0.0 || significance >= 1.0 {
        return Err(Error::OutOfRange {
            name: "significance",
            value: significance,
            lo: 0.0,
            hi: 1.0,
        });
    }
    let p_value = non_arrival_p_value(transcript, expected_gamma)?;
    Ok(if p_value < significance {
        EveVerdict::Suspect
    } else {
        EveVerdict::Clean
    })
}
