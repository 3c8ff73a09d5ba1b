//! Closed-form effectiveness parameters, loss limits, and eavesdropping
//! conditions for the generalized B92 scheme.
//!
//! Per qubit sent, the sifted-key yield H is bounded by one; per photon
//! sent, the yield K can reach two with vacuum-one-photon encoding. The
//! conclusive-outcome probability for the state pair
//! `cos(t_j)|0> + e^{i p_j} sin(t_j)|1>` is `(1 - s^2)/2` for projective
//! detection and `1 - s` for unambiguous discrimination, with
//! `s = |<psi0|psi1>|`. Dividing by the mean photon number per qubit,
//! `(sin^2 t0 + sin^2 t1)/2`, turns conclusive rates into per-photon
//! yields.
//!
//! Numerator terms are evaluated through half-angle identities
//! (`1 - cos x = 2 sin^2(x/2)` and friends) so the almost-parallel and
//! almost-vacuum corners do not lose precision to cancellation; the raw
//! textbook expressions appear in the tests as oracles.

use crate::channel::{self, damp_matrix};
use crate::error::{Error, Result};
use crate::hilbert::{Matrix2, PureState};
use crate::protocol::Encoding;
use crate::solver;
use crate::{map_indexed, Parallelism};

/// Which detection law applies: projective pairs or the three-outcome
/// unambiguous-discrimination measurement.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DetectionStrategy {
    Pvm,
    Povm,
}

/// Loss ceiling for a state pair: the largest tolerable loss probability
/// and, when finite, the matching fiber length.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LossLimits {
    pub gamma_max: f64,
    /// `None` when `gamma_max = 1`, which has no finite fiber length.
    pub l_max_km: Option<f64>,
}

/// Squared conclusive amplitude `1 - |<psi0|psi1>|^2`, computed without
/// cancellation as `sin^2(t1 - t0) + sin(2 t0) sin(2 t1) sin^2(dphi / 2)`.
fn conclusive_numerator(theta0: f64, theta1: f64, phi0: f64, phi1: f64) -> f64 {
    let diff = (theta1 - theta0).sin();
    let half_phase = 0.5 * (phi0 - phi1);
    let s = half_phase.sin();
    let q = diff * diff + (2.0 * theta0).sin() * (2.0 * theta1).sin() * s * s;
    q.clamp(0.0, 1.0)
}

/// Overlap magnitude `|cos t0 cos t1 + e^{-i(p0 - p1)} sin t0 sin t1|`.
fn overlap_magnitude(theta0: f64, theta1: f64, phi0: f64, phi1: f64) -> f64 {
    let cc = theta0.cos() * theta1.cos();
    let ss = theta0.sin() * theta1.sin();
    let dphi = phi0 - phi1;
    let re = cc + ss * dphi.cos();
    let im = ss * dphi.sin();
    re.hypot(im).min(1.0)
}

/// Sifted-key bits per qubit for the generalized scheme:
/// `(1 - s^2)/2` under projective detection, `1 - s` under unambiguous
/// discrimination.
pub fn h_b92(psi0: &PureState, psi1: &PureState, strategy: DetectionStrategy) -> f64 {
    let q = conclusive_numerator(psi0.theta(), psi1.theta(), psi0.phi(), psi1.phi());
    match strategy {
        DetectionStrategy::Pvm => 0.5 * q,
        DetectionStrategy::Povm => {
            let s = overlap_magnitude(psi0.theta(), psi1.theta(), psi0.phi(), psi1.phi());
            q / (1.0 + s)
        }
    }
}

/// Sifted-key bits per photon: the conclusive probability divided by the
/// mean photon number per qubit `(sin^2 t0 + sin^2 t1)/2`.
///
/// The origin `t0 = t1 = 0` is a 0/0 point and is rejected; the limit
/// along `t0 = -t1 -> 0` is 2.
pub fn k_b92(
    theta0: f64,
    theta1: f64,
    phi0: f64,
    phi1: f64,
    strategy: DetectionStrategy,
) -> Result<f64> {
    let s0 = theta0.sin();
    let s1 = theta1.sin();
    let denominator = s0 * s0 + s1 * s1;
    if denominator == 0.0 {
        return Err(Error::DegenerateStatePair);
    }
    let q = conclusive_numerator(theta0, theta1, phi0, phi1);
    let value = match strategy {
        DetectionStrategy::Pvm => q / denominator,
        DetectionStrategy::Povm => {
            let s = overlap_magnitude(theta0, theta1, phi0, phi1);
            2.0 * (q / (1.0 + s)) / denominator
        }
    };
    Ok(value)
}

/// Reduces an arbitrary angle to `[0, pi/2]` preserving `|sin|` and `|cos|`.
fn fold_angle(theta: f64) -> f64 {
    let mut r = theta.abs() % std::f64::consts::PI;
    if r > std::f64::consts::FRAC_PI_2 {
        r = std::f64::consts::PI - r;
    }
    r
}

/// Best-phase per-photon yield surface over the angle plane.
///
/// With the phase difference chosen optimally the overlap magnitude drops
/// to `| |cos t0 cos t1| - |sin t0 sin t1| | = |cos(t0' + t1')|` for the
/// folded angles, giving
/// `sin^2(t0' + t1') / (sin^2 t0 + sin^2 t1)` projective and
/// `4 min(sin^2, cos^2)((t0' + t1')/2) / (sin^2 t0 + sin^2 t1)` for
/// unambiguous discrimination.
pub fn kmax_surface(theta0: f64, theta1: f64, strategy: DetectionStrategy) -> Result<f64> {
    let s0 = theta0.sin();
    let s1 = theta1.sin();
    let denominator = s0 * s0 + s1 * s1;
    if denominator == 0.0 {
        return Err(Error::DegenerateStatePair);
    }
    let sum = fold_angle(theta0) + fold_angle(theta1);
    let half = 0.5 * sum;
    let sin_half_sq = half.sin().powi(2);
    let cos_half_sq = half.cos().powi(2);
    let low = sin_half_sq.min(cos_half_sq);
    let high = sin_half_sq.max(cos_half_sq);
    // The projective value is the unambiguous value scaled by the larger
    // half-angle factor, so the dominance ordering survives rounding.
    let povm_numerator = 4.0 * low;
    let value = match strategy {
        DetectionStrategy::Pvm => povm_numerator * high / denominator,
        DetectionStrategy::Povm => povm_numerator / denominator,
    };
    Ok(value)
}

/// Phase difference `phi0 - phi1` maximizing K for fixed angles: zero when
/// `cos t0 cos t1` and `sin t0 sin t1` have opposite signs, `pi` when they
/// share a sign. Either sign of pi is equivalent; this returns `+pi`.
pub fn optimal_phase_check(theta0: f64, theta1: f64) -> f64 {
    let product =
        theta0.cos() * theta1.cos() * theta0.sin() * theta1.sin();
    if product > 0.0 {
        std::f64::consts::PI
    } else {
        0.0
    }
}

/// Identification margin under loss: the smaller correct-identification
/// probability minus the larger misidentification probability, both read
/// from damped signal states. Positive means the scheme still identifies
/// signals correctly more often than not.
pub fn identification_margin(
    psi0: &PureState,
    psi1: &PureState,
    gamma: f64,
    strategy: DetectionStrategy,
) -> Result<f64> {
    if !gamma.is_finite() || !(0.0..=1.0).contains(&gamma) {
        return Err(Error::OutOfRange {
            name: "gamma",
            value: gamma,
            lo: 0.0,
            hi: 1.0,
        });
    }
    let ctx = MarginContext::new(psi0, psi1, strategy);
    Ok(ctx.margin(gamma))
}

/// Precomputed operators for repeated margin evaluations at many loss
/// values.
struct MarginContext {
    pure: [Matrix2; 2],
    complement_projector: [Matrix2; 2],
    scale: f64,
}

impl MarginContext {
    fn new(psi0: &PureState, psi1: &PureState, strategy: DetectionStrategy) -> Self {
        let scale = match strategy {
            DetectionStrategy::Pvm => 1.0,
            DetectionStrategy::Povm => {
                1.0 / (1.0 + psi0.overlap(psi1).norm())
            }
        };
        Self {
            pure: [*psi0.density().matrix(), *psi1.density().matrix()],
            complement_projector: [
                *psi0.orthogonal_complement().density().matrix(),
                *psi1.orthogonal_complement().density().matrix(),
            ],
            scale,
        }
    }

    fn margin(&self, gamma: f64) -> f64 {
        let damped = [
            damp_matrix(&self.pure[0], gamma),
            damp_matrix(&self.pure[1], gamma),
        ];
        // Clicking the complement of the other state identifies the signal;
        // clicking the complement of the signal's own state misidentifies it.
        let correct0 = damped[0].product_trace_re(&self.complement_projector[1]);
        let correct1 = damped[1].product_trace_re(&self.complement_projector[0]);
        let incorrect0 = damped[0].product_trace_re(&self.complement_projector[0]);
        let incorrect1 = damped[1].product_trace_re(&self.complement_projector[1]);
        self.scale * (correct0.min(correct1) - incorrect0.max(incorrect1))
    }
}

const GAMMA_SCAN_STEPS: usize = 1000;
const GAMMA_BISECTION_TOL: f64 = 1e-9;

/// Largest loss probability at which correct identification still
/// dominates, found by bisection on the identification margin.
///
/// A coarse scan first confirms the margin crosses zero at most once on
/// `[0, 1]`; no crossing means loss never breaks identification and 1 is
/// returned.
pub fn gamma_max(
    psi0: &PureState,
    psi1: &PureState,
    strategy: DetectionStrategy,
) -> Result<f64> {
    let ctx = MarginContext::new(psi0, psi1, strategy);
    if ctx.margin(0.0) <= 0.0 {
        return Err(Error::NoUsableRegime);
    }
    let f = |gamma: f64| ctx.margin(gamma);
    let scan = solver::scan_decreasing_crossing(&f, 0.0, 1.0, GAMMA_SCAN_STEPS);
    match (scan.crossings, scan.bracket) {
        (0, _) => Ok(1.0),
        (1, Some((lo, hi))) => Ok(solver::bisect_decreasing(
            &f,
            lo,
            hi,
            GAMMA_BISECTION_TOL,
            80,
        )),
        _ => Err(Error::MultipleCrossings),
    }
}

/// Loss ceiling together with the matching fiber length at attenuation
/// `alpha` dB/km.
pub fn loss_limits(
    psi0: &PureState,
    psi1: &PureState,
    alpha_db_per_km: f64,
    strategy: DetectionStrategy,
) -> Result<LossLimits> {
    let gamma = gamma_max(psi0, psi1, strategy)?;
    let l_max_km = if gamma >= 1.0 {
        None
    } else {
        Some(channel::length_of_gamma(alpha_db_per_km, gamma)?)
    };
    Ok(LossLimits {
        gamma_max: gamma,
        l_max_km,
    })
}

/// Maximum key-transfer distance in km; errors when the loss ceiling is 1
/// and the distance is unbounded.
pub fn l_max(
    psi0: &PureState,
    psi1: &PureState,
    alpha_db_per_km: f64,
    strategy: DetectionStrategy,
) -> Result<f64> {
    loss_limits(psi0, psi1, alpha_db_per_km, strategy)?
        .l_max_km
        .ok_or(Error::InfiniteLength)
}

/// Loss probability at which the per-photon yield drops to one under the
/// `(1 - gamma)` key-rate scaling: `1 - 1/K` when the lossless K exceeds
/// one, zero otherwise.
pub fn gamma_zero(
    psi0: &PureState,
    psi1: &PureState,
    strategy: DetectionStrategy,
) -> Result<f64> {
    let k_ideal = k_b92(
        psi0.theta(),
        psi1.theta(),
        psi0.phi(),
        psi1.phi(),
        strategy,
    )?;
    if k_ideal <= 0.0 {
        return Err(Error::DegenerateStatePair);
    }
    if k_ideal > 1.0 {
        Ok(1.0 - 1.0 / k_ideal)
    } else {
        Ok(0.0)
    }
}

/// Eve's inconclusive probability `|2 cos^2 theta - 1|` when she applies
/// unambiguous discrimination to the symmetric pair
/// `cos(theta)|0> +/- sin(theta)|1>`.
pub fn eve_inconclusive_prob(theta: f64) -> f64 {
    (2.0 * theta.cos().powi(2) - 1.0).abs()
}

/// Whether an intercept-resend attack on the symmetric pair is detectable
/// through excess losses: true exactly when `gamma < P_?` (strict).
pub fn eve_detectability(theta: f64, gamma: f64) -> bool {
    gamma < eve_inconclusive_prob(theta)
}

/// Sifted-key rate `r sin^2(2 theta) / 2` for the symmetric pair at raw
/// qubit rate `r`; equals `r` times the projective per-qubit yield.
pub fn key_rate(raw_qubit_rate: f64, theta: f64) -> f64 {
    let s = (2.0 * theta).sin();
    raw_qubit_rate * s * s / 2.0
}

/// Lossless BB84 effectiveness pair `(H, K)` by encoding: polarization
/// carries one photon per qubit, vacuum-one-photon encoding averages half
/// a photon per qubit and doubles K.
pub fn bb84_effectiveness(encoding: Encoding) -> (f64, f64) {
    match encoding {
        Encoding::PolarizationLike => (0.5, 0.5),
        Encoding::Vopq => (0.5, 1.0),
    }
}

/// A sampled best-phase yield surface over `sin(theta)` in `[0, 1]^2`.
#[derive(Clone, Debug)]
pub struct KmaxGrid {
    /// Common axis of `sin(theta)` samples, length `resolution`.
    pub axis: Vec<f64>,
    /// Row-major values; `None` marks the degenerate origin.
    pub values: Vec<Option<f64>>,
    pub resolution: usize,
}

impl KmaxGrid {
    pub fn value(&self, i: usize, j: usize) -> Option<f64> {
        self.values[i * self.resolution + j]
    }
}

/// Samples [`kmax_surface`] on a `resolution x resolution` grid of
/// `sin(theta0), sin(theta1)` pairs covering `[0, 1]^2`.
pub fn kmax_grid(resolution: usize, strategy: DetectionStrategy) -> Result<KmaxGrid> {
    kmax_grid_with(resolution, strategy, Parallelism::Auto)
}

pub fn kmax_grid_with(
    resolution: usize,
    strategy: DetectionStrategy,
    parallelism: Parallelism,
) -> Result<KmaxGrid> {
    if resolution < 2 {
        return Err(Error::InvalidConfig(format!(
            "grid resolution must be at least 2, got {resolution}"
        )));
    }
    let axis: Vec<f64> = (0..resolution)
        .map(|i| i as f64 / (resolution - 1) as f64)
        .collect();
    let thetas: Vec<f64> = axis.iter().map(|x| x.asin()).collect();
    let values = map_indexed(resolution * resolution, parallelism, |idx| {
        let i = idx / resolution;
        let j = idx % resolution;
        kmax_surface(thetas[i], thetas[j], strategy).ok()
    });
    Ok(KmaxGrid {
        axis,
        values,
        resolution,
    })
}

/// The loss-analysis state family: `cos(t0)|0> + sin(t0)|1>` against
/// `cos(t1)|0> - sin(t1)|1>`, parametrized by the squared vacuum weights.
pub fn loss_family_pair(cos2_theta0: f64, cos2_theta1: f64) -> Result<(PureState, PureState)> {
    for (name, c) in [("cos2_theta0", cos2_theta0), ("cos2_theta1", cos2_theta1)] {
        if !c.is_finite() || !(0.0..=1.0).contains(&c) {
            return Err(Error::OutOfRange {
                name,
                value: c,
                lo: 0.0,
                hi: 1.0,
            });
        }
    }
    let theta0 = cos2_theta0.sqrt().acos();
    let theta1 = cos2_theta1.sqrt().acos();
    Ok((PureState::new(theta0, 0.0)?, PureState::new(-theta1, 0.0)?))
}

/// One point of the loss-limit curve.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LossLimitPoint {
    pub cos2_theta1: f64,
    pub gamma_max: f64,
    pub l_max_km: Option<f64>,
}

/// One point of the K = 1 loss-threshold curve, for both detection laws.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GammaZeroPoint {
    pub cos2_theta1: f64,
    pub gamma0_pvm: f64,
    pub gamma0_povm: f64,
}

fn open_interval_samples(range: (f64, f64), resolution: usize) -> Result<Vec<f64>> {
    let (lo, hi) = range;
    if !(lo.is_finite() && hi.is_finite()) || lo >= hi {
        return Err(Error::InvalidConfig(format!(
            "invalid sweep range ({lo}, {hi})"
        )));
    }
    if resolution < 2 {
        return Err(Error::InvalidConfig(format!(
            "curve resolution must be at least 2, got {resolution}"
        )));
    }
    let step = (hi - lo) / (resolution as f64 + 1.0);
    Ok((0..resolution).map(|i| lo + step * (i as f64 + 1.0)).collect())
}

/// Loss-limit curve over `cos^2(theta1)` in the open `range`, with
/// `cos^2(theta0)` held fixed.
pub fn loss_limit_curve(
    cos2_theta0: f64,
    alpha_db_per_km: f64,
    resolution: usize,
    range: (f64, f64),
    strategy: DetectionStrategy,
) -> Result<Vec<LossLimitPoint>> {
    loss_limit_curve_with(
        cos2_theta0,
        alpha_db_per_km,
        resolution,
        range,
        strategy,
        Parallelism::Auto,
    )
}

pub fn loss_limit_curve_with(
    cos2_theta0: f64,
    alpha_db_per_km: f64,
    resolution: usize,
    range: (f64, f64),
    strategy: DetectionStrategy,
    parallelism: Parallelism,
) -> Result<Vec<LossLimitPoint>> {
    let samples = open_interval_samples(range, resolution)?;
    let points = map_indexed(samples.len(), parallelism, |i| {
        let cos2_theta1 = samples[i];
        let (psi0, psi1) = loss_family_pair(cos2_theta0, cos2_theta1)?;
        let limits = loss_limits(&psi0, &psi1, alpha_db_per_km, strategy)?;
        Ok(LossLimitPoint {
            cos2_theta1,
            gamma_max: limits.gamma_max,
            l_max_km: limits.l_max_km,
        })
    });
    points.into_iter().collect()
}

/// K = 1 loss-threshold curve over `cos^2(theta1)` in the open `range`.
pub fn gamma0_curve(
    cos2_theta0: f64,
    resolution: usize,
    range: (f64, f64),
) -> Result<Vec<GammaZeroPoint>> {
    gamma0_curve_with(cos2_theta0, resolution, range, Parallelism::Auto)
}

pub fn gamma0_curve_with(
    cos2_theta0: f64,
    resolution: usize,
    range: (f64, f64),
    parallelism: Parallelism,
) -> Result<Vec<GammaZeroPoint>> {
    let samples = open_interval_samples(range, resolution)?;
    let points = map_indexed(samples.len(), parallelism, |i| {
        let cos2_theta1 = samples[i];
        let (psi0, psi1) = loss_family_pair(cos2_theta0, cos2_theta1)?;
        Ok(GammaZeroPoint {
            cos2_theta1,
            gamma0_pvm: gamma_zero(&psi0, &psi1, DetectionStrategy::Pvm)?,
            gamma0_povm: gamma_zero(&psi0, &psi1, DetectionStrategy::Povm)?,
        })
    });
    points.into_iter().collect()
}
