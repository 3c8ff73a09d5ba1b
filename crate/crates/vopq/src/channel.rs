//! Amplitude-damping photon loss and its fiber-length parametrization.
//!
//! Losing a photon with probability `gamma` maps a density matrix
//! entrywise: the vacuum population gains `gamma` times the one-photon
//! population, coherences shrink by `sqrt(1 - gamma)`, and the one-photon
//! population shrinks by `1 - gamma`. For fiber transmission the loss
//! probability is `gamma = 1 - 10^(-alpha l / 10)` with `alpha` in dB/km
//! and `l` in km. Only transmission losses are modelled; detector
//! inefficiency and dark counts are out of scope.

use crate::error::{Error, Result};
use crate::hilbert::{DensityMatrix, Matrix2};

/// Loss description: a bare probability, optionally derived from a fiber
/// attenuation coefficient and length.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LossModel {
    gamma: f64,
    fiber: Option<Fiber>,
}

/// Fiber parameters behind a derived loss probability.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Fiber {
    pub alpha_db_per_km: f64,
    pub length_km: f64,
}

impl LossModel {
    /// A direct loss probability in `[0, 1]`.
    pub fn from_gamma(gamma: f64) -> Result<Self> {
        check_probability("gamma", gamma)?;
        Ok(Self { gamma, fiber: None })
    }

    /// Loss derived from fiber attenuation and length.
    pub fn from_fiber(alpha_db_per_km: f64, length_km: f64) -> Result<Self> {
        let gamma = gamma_of_length(alpha_db_per_km, length_km)?;
        Ok(Self {
            gamma,
            fiber: Some(Fiber {
                alpha_db_per_km,
                length_km,
            }),
        })
    }

    /// The identity channel.
    pub fn lossless() -> Self {
        Self {
            gamma: 0.0,
            fiber: None,
        }
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn fiber(&self) -> Option<Fiber> {
        self.fiber
    }
}

fn check_probability(name: &'static str, value: f64) -> Result<()> {
    if !value.is_finite() {
        return Err(Error::NonFinite { name, value });
    }
    if !(0.0..=1.0).contains(&value) {
        return Err(Error::OutOfRange {
            name,
            value,
            lo: 0.0,
            hi: 1.0,
        });
    }
    Ok(())
}

/// Entrywise amplitude-damping map on a raw matrix; no validation.
pub(crate) fn damp_matrix(m: &Matrix2, gamma: f64) -> Matrix2 {
    let keep = 1.0 - gamma;
    let coherence = keep.sqrt();
    Matrix2::new([
        [
            m.entry(0, 0) + m.entry(1, 1) * gamma,
            m.entry(0, 1) * coherence,
        ],
        [m.entry(1, 0) * coherence, m.entry(1, 1) * keep],
    ])
}

/// Applies amplitude damping with loss probability `gamma` to `rho`.
pub fn amplitude_damp(rho: &DensityMatrix, gamma: f64) -> Result<DensityMatrix> {
    check_probability("gamma", gamma)?;
    DensityMatrix::new(damp_matrix(rho.matrix(), gamma))
}

/// Loss probability after `length` km of fiber with attenuation `alpha`
/// dB/km: `1 - 10^(-alpha * length / 10)`.
pub fn gamma_of_length(alpha_db_per_km: f64, length_km: f64) -> Result<f64> {
    if !alpha_db_per_km.is_finite() || alpha_db_per_km < 0.0 {
        return Err(Error::OutOfRange {
            name: "alpha",
            value: alpha_db_per_km,
            lo: 0.0,
            hi: f64::INFINITY,
        });
    }
    if !length_km.is_finite() || length_km < 0.0 {
        return Err(Error::OutOfRange {
            name: "length",
            value: length_km,
            lo: 0.0,
            hi: f64::INFINITY,
        });
    }
    Ok(1.0 - 10f64.powf(-alpha_db_per_km * length_km / 10.0))
}

/// Fiber length producing loss probability `gamma` at attenuation `alpha`
/// dB/km; the exact inverse of [`gamma_of_length`].
///
/// `gamma = 1` has no finite preimage and `alpha = 0` never loses a
/// photon, so both are rejected.
pub fn length_of_gamma(alpha_db_per_km: f64, gamma: f64) -> Result<f64> {
    if !alpha_db_per_km.is_finite() || alpha_db_per_km <= 0.0 {
        return Err(Error::OutOfRange {
            name: "alpha",
            value: alpha_db_per_km,
            lo: f64::MIN_POSITIVE,
            hi: f64::INFINITY,
        });
    }
    check_probability("gamma", gamma)?;
    if gamma >= 1.0 {
        return Err(Error::InfiniteLength);
    }
    Ok(-(10.0 / alpha_db_per_km) * (1.0 - gamma).log10())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::PureState;
    use crate::tol;
    use proptest::prelude::*;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn zero_damping_is_identity() {
        let rho = PureState::new(0.6, 1.2).unwrap().density();
        let out = amplitude_damp(&rho, 0.0).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                assert!((out.entry(i, j) - rho.entry(i, j)).norm() < tol::ALGEBRAIC);
            }
        }
    }

    #[test]
    fn total_damping_collapses_to_vacuum() {
        let rho = PureState::new(1.1, -0.4).unwrap().density();
        let out = amplitude_damp(&rho, 1.0).unwrap();
        assert!((out.entry(0, 0).re - 1.0).abs() < tol::ALGEBRAIC);
        assert!(out.entry(0, 1).norm() < tol::ALGEBRAIC);
        assert!(out.entry(1, 1).norm() < tol::ALGEBRAIC);
    }

    #[test]
    fn half_damped_plus_state() {
        let rho = PureState::plus().density();
        let out = amplitude_damp(&rho, 0.5).unwrap();
        let expected_offdiag = 0.25 * 2f64.sqrt();
        assert!((out.entry(0, 0).re - 0.75).abs() < tol::ALGEBRAIC);
        assert!((out.entry(0, 1).re - expected_offdiag).abs() < tol::ALGEBRAIC);
        assert!((out.entry(1, 0).re - expected_offdiag).abs() < tol::ALGEBRAIC);
        assert!((out.entry(1, 1).re - 0.25).abs() < tol::ALGEBRAIC);
    }

    #[test]
    fn gamma_outside_unit_interval_rejected() {
        let rho = PureState::plus().density();
        assert!(amplitude_damp(&rho, -0.1).is_err());
        assert!(amplitude_damp(&rho, 1.1).is_err());
        assert!(amplitude_damp(&rho, f64::NAN).is_err());
    }

    #[test]
    fn fiber_loss_round_numbers() {
        assert_eq!(gamma_of_length(0.2, 0.0).unwrap(), 0.0);
        assert!((gamma_of_length(0.2, 50.0).unwrap() - 0.9).abs() < 1e-15);
        assert_eq!(length_of_gamma(0.2, 0.0).unwrap(), 0.0);
        assert!((length_of_gamma(0.2, 0.9).unwrap() - 50.0).abs() < 1e-9);
    }

    #[test]
    fn fiber_loss_rejects_bad_arguments() {
        assert!(gamma_of_length(-0.1, 10.0).is_err());
        assert!(gamma_of_length(0.2, -1.0).is_err());
        assert!(matches!(
            length_of_gamma(0.2, 1.0),
            Err(Error::InfiniteLength)
        ));
        assert!(length_of_gamma(0.0, 0.5).is_err());
    }

    #[test]
    fn loss_model_constructors() {
        let direct = LossModel::from_gamma(0.3).unwrap();
        assert_eq!(direct.gamma(), 0.3);
        assert!(direct.fiber().is_none());

        let fiber = LossModel::from_fiber(0.2, 50.0).unwrap();
        assert!((fiber.gamma() - 0.9).abs() < 1e-12);
        assert_eq!(fiber.fiber().unwrap().length_km, 50.0);

        assert!(LossModel::from_gamma(1.5).is_err());
    }

    #[test]
    fn one_photon_population_monotone_in_gamma() {
        let rho = PureState::new(0.9, 0.0).unwrap().density();
        let mut previous = f64::INFINITY;
        for step in 0..=20 {
            let gamma = step as f64 / 20.0;
            let out = amplitude_damp(&rho, gamma).unwrap();
            let population = out.entry(1, 1).re;
            assert!(population <= previous + tol::ALGEBRAIC);
            previous = population;
        }
    }

    proptest! {
        #[test]
        fn trace_preserved_and_output_positive(
            theta in -1.5f64..1.5, phi in -3.0f64..3.0,
            mix in 0.0f64..1.0, gamma in 0.0f64..1.0,
        ) {
            let a = PureState::new(theta, phi).unwrap().density();
            let b = PureState::new(theta * 0.5 + 0.2, -phi).unwrap().density();
            let blended = a.matrix().scale(mix).add(&b.matrix().scale(1.0 - mix));
            let rho = DensityMatrix::new(blended).unwrap();

            let out = amplitude_damp(&rho, gamma).unwrap();
            prop_assert!((out.trace().re - 1.0).abs() < tol::ALGEBRAIC);
            let (low, _) = out.eigenvalues();
            prop_assert!(low >= -tol::EIGENVALUE);
        }

        #[test]
        fn damping_composes(
            theta in -1.5f64..1.5, phi in -3.0f64..3.0,
            g1 in 0.0f64..1.0, g2 in 0.0f64..1.0,
        ) {
            let rho = PureState::new(theta, phi).unwrap().density();
            let two_step = amplitude_damp(&amplitude_damp(&rho, g1).unwrap(), g2).unwrap();
            let combined = 1.0 - (1.0 - g1) * (1.0 - g2);
            let one_step = amplitude_damp(&rho, combined).unwrap();
            for i in 0..2 {
                for j in 0..2 {
                    prop_assert!(
                        (two_step.entry(i, j) - one_step.entry(i, j)).norm() < tol::ALGEBRAIC
                    );
                }
            }
        }
    }

    #[test]
    fn length_gamma_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..1000 {
            let alpha: f64 = rng.random_range(0.01..2.0);
            // Above ~80 dB total attenuation, gamma sits so close to 1
            // that f64 granularity of 1 - gamma caps the recoverable
            // precision below 1e-9 relative; stay inside that range.
            let length = rng.random_range(0.0..(80.0 / alpha).min(400.0));
            let gamma = gamma_of_length(alpha, length).unwrap();
            let back = length_of_gamma(alpha, gamma).unwrap();
            let scale = length.max(1.0);
            assert!(
                (back - length).abs() / scale < 1e-9,
                "alpha {alpha} length {length} back {back}"
            );
        }
    }

    #[test]
    fn gamma_strictly_increasing_in_length_and_alpha() {
        let mut previous = -1.0;
        for step in 0..=40 {
            let l = step as f64 * 10.0;
            let g = gamma_of_length(0.2, l).unwrap();
            assert!(g > previous || l == 0.0);
            previous = g;
        }
        let mut previous = -1.0;
        for step in 1..=40 {
            let alpha = step as f64 * 0.05;
            let g = gamma_of_length(alpha, 25.0).unwrap();
            assert!(g > previous);
            previous = g;
        }
    }
}
