//! Two-level Hilbert-space algebra for vacuum-one-photon qubits.
//!
//! Basis convention is fixed throughout the crate: index 0 is the vacuum
//! state `|0>`, index 1 is the one-photon state `|1>`. A pure state is
//! parametrized by two angles as `cos(theta)|0> + e^{i phi} sin(theta)|1>`,
//! so its mean photon number is `sin^2(theta)`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::tol;

/// A normalized two-level pure state `cos(theta)|0> + e^{i phi} sin(theta)|1>`.
///
/// Angles are stored in radians and are unrestricted; `theta` may be
/// negative, which flips the sign of the one-photon amplitude.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PureState {
    theta: f64,
    phi: f64,
}

impl PureState {
    /// Builds the state `cos(theta)|0> + e^{i phi} sin(theta)|1>`.
    ///
    /// Rejects non-finite angles; the result is normalized by construction.
    pub fn new(theta: f64, phi: f64) -> Result<Self> {
        if !theta.is_finite() {
            return Err(Error::NonFinite {
                name: "theta",
                value: theta,
            });
        }
        if !phi.is_finite() {
            return Err(Error::NonFinite {
                name: "phi",
                value: phi,
            });
        }
        Ok(Self { theta, phi })
    }

    /// The vacuum state `|0>`.
    pub fn vacuum() -> Self {
        Self { theta: 0.0, phi: 0.0 }
    }

    /// The one-photon state `|1>`.
    pub fn one_photon() -> Self {
        Self {
            theta: std::f64::consts::FRAC_PI_2,
            phi: 0.0,
        }
    }

    /// The symmetric superposition `(|0> + |1>)/sqrt(2)`.
    pub fn plus() -> Self {
        Self {
            theta: std::f64::consts::FRAC_PI_4,
            phi: 0.0,
        }
    }

    /// The antisymmetric superposition `(|0> - |1>)/sqrt(2)`.
    pub fn minus() -> Self {
        Self {
            theta: -std::f64::consts::FRAC_PI_4,
            phi: 0.0,
        }
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    /// Amplitude pair `(a0, a1)` with `a0 = cos(theta)` and
    /// `a1 = e^{i phi} sin(theta)`.
    pub fn amplitudes(&self) -> (Complex64, Complex64) {
        let a0 = Complex64::new(self.theta.cos(), 0.0);
        let a1 = Complex64::from_polar(self.theta.sin(), self.phi);
        (a0, a1)
    }

    /// Inner product `<self|other>`.
    pub fn overlap(&self, other: &PureState) -> Complex64 {
        let (a0, a1) = self.amplitudes();
        let (b0, b1) = other.amplitudes();
        a0.conj() * b0 + a1.conj() * b1
    }

    /// The rank-1 projector `|self><self|` as a density matrix.
    pub fn density(&self) -> DensityMatrix {
        let (a0, a1) = self.amplitudes();
        DensityMatrix::new_unchecked(Matrix2::outer((a0, a1), (a0, a1)))
    }

    /// The state orthogonal to `self`, unique up to a global phase.
    ///
    /// In amplitude terms the complement of `(a0, a1)` is `(a1*, -a0*)`;
    /// folded back into angle form this is `(pi/2 - theta, phi + pi)`,
    /// which differs from the amplitude pair only by a global phase.
    pub fn orthogonal_complement(&self) -> PureState {
        PureState {
            theta: std::f64::consts::FRAC_PI_2 - self.theta,
            phi: self.phi + std::f64::consts::PI,
        }
    }

    /// Mean photon number `sin^2(theta)`, the expectation of the photon
    /// number operator in this state.
    pub fn mean_photon_number(&self) -> f64 {
        let s = self.theta.sin();
        s * s
    }
}

/// A raw 2x2 complex matrix.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Matrix2 {
    e: [[Complex64; 2]; 2],
}

impl Matrix2 {
    pub fn new(e: [[Complex64; 2]; 2]) -> Self {
        Self { e }
    }

    pub fn zero() -> Self {
        Self {
            e: [[Complex64::ZERO; 2]; 2],
        }
    }

    pub fn identity() -> Self {
        Self {
            e: [
                [Complex64::ONE, Complex64::ZERO],
                [Complex64::ZERO, Complex64::ONE],
            ],
        }
    }

    /// Outer product `|ket><bra|`: entry `(i, j)` is `ket_i * conj(bra_j)`.
    pub fn outer(ket: (Complex64, Complex64), bra: (Complex64, Complex64)) -> Self {
        let k = [ket.0, ket.1];
        let b = [bra.0.conj(), bra.1.conj()];
        Self {
            e: [[k[0] * b[0], k[0] * b[1]], [k[1] * b[0], k[1] * b[1]]],
        }
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.e[row][col]
    }

    pub fn add(&self, other: &Matrix2) -> Matrix2 {
        let mut out = Matrix2::zero();
        for i in 0..2 {
            for j in 0..2 {
                out.e[i][j] = self.e[i][j] + other.e[i][j];
            }
        }
        out
    }

    pub fn sub(&self, other: &Matrix2) -> Matrix2 {
        let mut out = Matrix2::zero();
        for i in 0..2 {
            for j in 0..2 {
                out.e[i][j] = self.e[i][j] - other.e[i][j];
            }
        }
        out
    }

    pub fn scale(&self, factor: f64) -> Matrix2 {
        let mut out = *self;
        for i in 0..2 {
            for j in 0..2 {
                out.e[i][j] *= factor;
            }
        }
        out
    }

    pub fn mul(&self, other: &Matrix2) -> Matrix2 {
        let mut out = Matrix2::zero();
        for i in 0..2 {
            for j in 0..2 {
                out.e[i][j] =
                    self.e[i][0] * other.e[0][j] + self.e[i][1] * other.e[1][j];
            }
        }
        out
    }

    pub fn adjoint(&self) -> Matrix2 {
        Matrix2::new([
            [self.e[0][0].conj(), self.e[1][0].conj()],
            [self.e[0][1].conj(), self.e[1][1].conj()],
        ])
    }

    pub fn trace(&self) -> Complex64 {
        self.e[0][0] + self.e[1][1]
    }

    /// Real part of `Tr(self * other)` without forming the product.
    pub fn product_trace_re(&self, other: &Matrix2) -> f64 {
        let mut acc = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                acc += (self.e[i][j] * other.e[j][i]).re;
            }
        }
        acc
    }

    /// Largest entrywise deviation from Hermitian symmetry.
    pub fn hermiticity_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                worst = worst.max((self.e[i][j] - self.e[j][i].conj()).norm());
            }
        }
        worst
    }

    /// Eigenvalues `(low, high)` of a Hermitian matrix, in closed form.
    ///
    /// Only the Hermitian part of the input participates; callers are
    /// expected to check `hermiticity_defect` separately when it matters.
    pub fn hermitian_eigenvalues(&self) -> (f64, f64) {
        let a = self.e[0][0].re;
        let d = self.e[1][1].re;
        let mid = 0.5 * (a + d);
        let half_gap = 0.5 * (a - d);
        let radius = (half_gap * half_gap + self.e[0][1].norm_sqr()).sqrt();
        (mid - radius, mid + radius)
    }

    /// Real part of the quadratic form `<s|M|s>`.
    pub fn expectation(&self, s: &PureState) -> f64 {
        let (a0, a1) = s.amplitudes();
        let amps = [a0, a1];
        let mut acc = Complex64::ZERO;
        for i in 0..2 {
            for j in 0..2 {
                acc += amps[i].conj() * self.e[i][j] * amps[j];
            }
        }
        acc.re
    }
}

/// A validated 2x2 density matrix: Hermitian, unit trace, positive
/// semidefinite within the crate tolerances.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DensityMatrix {
    m: Matrix2,
}

impl DensityMatrix {
    /// Validates and wraps a raw matrix.
    pub fn new(m: Matrix2) -> Result<Self> {
        let defect = m.hermiticity_defect();
        if defect > tol::ALGEBRAIC {
            return Err(Error::InvalidDensityMatrix(format!(
                "hermiticity defect {defect:.3e}"
            )));
        }
        let trace = m.trace();
        if (trace.re - 1.0).abs() > tol::ALGEBRAIC || trace.im.abs() > tol::ALGEBRAIC {
            return Err(Error::InvalidDensityMatrix(format!(
                "trace {} + {}i",
                trace.re, trace.im
            )));
        }
        let (low, _) = m.hermitian_eigenvalues();
        if low < -tol::ALGEBRAIC {
            return Err(Error::InvalidDensityMatrix(format!(
                "negative eigenvalue {low:.3e}"
            )));
        }
        Ok(Self { m })
    }

    /// Wraps a matrix known to be a valid density operator by construction.
    pub(crate) fn new_unchecked(m: Matrix2) -> Self {
        debug_assert!(DensityMatrix::new(m).is_ok());
        Self { m }
    }

    pub fn matrix(&self) -> &Matrix2 {
        &self.m
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.m.entry(row, col)
    }

    pub fn trace(&self) -> Complex64 {
        self.m.trace()
    }

    pub fn eigenvalues(&self) -> (f64, f64) {
        self.m.hermitian_eigenvalues()
    }

    /// Real part of `<s|rho|s>`, the Born-rule probability of projecting
    /// onto `|s>`.
    pub fn expectation(&self, s: &PureState) -> f64 {
        self.m.expectation(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, FRAC_PI_6, PI};

    fn approx(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn endpoint_states() {
        let vac = PureState::new(0.0, 0.0).unwrap();
        let (a0, a1) = vac.amplitudes();
        assert_eq!(a0, Complex64::ONE);
        assert_eq!(a1, Complex64::ZERO);

        let one = PureState::new(FRAC_PI_2, 0.0).unwrap();
        let (b0, b1) = one.amplitudes();
        assert!(b0.norm() < tol::ALGEBRAIC);
        assert!(approx(b1.re, 1.0, tol::ALGEBRAIC));
    }

    #[test]
    fn plus_state_amplitudes() {
        let plus = PureState::new(FRAC_PI_4, 0.0).unwrap();
        let (a0, a1) = plus.amplitudes();
        let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
        assert!(approx(a0.re, inv_sqrt2, tol::ALGEBRAIC));
        assert!(approx(a1.re, inv_sqrt2, tol::ALGEBRAIC));
    }

    #[test]
    fn non_finite_angles_rejected() {
        assert!(PureState::new(f64::NAN, 0.0).is_err());
        assert!(PureState::new(0.0, f64::INFINITY).is_err());
    }

    #[test]
    fn overlap_vacuum_plus() {
        let z = PureState::vacuum().overlap(&PureState::plus());
        assert!(approx(z.re, std::f64::consts::FRAC_1_SQRT_2, tol::ALGEBRAIC));
        assert!(z.im.abs() < tol::ALGEBRAIC);
    }

    #[test]
    fn overlap_self_is_one() {
        let s = PureState::new(0.3, 1.1).unwrap();
        let z = s.overlap(&s);
        assert!(approx(z.re, 1.0, tol::ALGEBRAIC));
        assert!(z.im.abs() < tol::ALGEBRAIC);
    }

    #[test]
    fn overlap_opposed_pi_sixths() {
        // cos^2(pi/6) - sin^2(pi/6) = 1/2, evaluated from the expanded
        // inner product.
        let a = PureState::new(FRAC_PI_6, 0.0).unwrap();
        let b = PureState::new(-FRAC_PI_6, 0.0).unwrap();
        let z = a.overlap(&b);
        assert!(approx(z.re, 0.5, tol::ALGEBRAIC));
        assert!(z.im.abs() < tol::ALGEBRAIC);
    }

    #[test]
    fn density_of_vacuum_and_plus() {
        let rho0 = PureState::vacuum().density();
        assert!(approx(rho0.entry(0, 0).re, 1.0, tol::ALGEBRAIC));
        assert!(rho0.entry(1, 1).norm() < tol::ALGEBRAIC);

        let rho_plus = PureState::plus().density();
        for i in 0..2 {
            for j in 0..2 {
                assert!(approx(rho_plus.entry(i, j).re, 0.5, tol::ALGEBRAIC));
                assert!(rho_plus.entry(i, j).im.abs() < tol::ALGEBRAIC);
            }
        }
    }

    #[test]
    fn density_with_phase_checked_against_manual_outer_product() {
        // theta = pi/6, phi = pi/2 gives amplitudes (sqrt(3)/2, i/2); the
        // expected matrix is computed by an independent entrywise routine.
        let s = PureState::new(FRAC_PI_6, FRAC_PI_2).unwrap();
        let rho = s.density();

        let amps = [
            Complex64::new(FRAC_PI_6.cos(), 0.0),
            Complex64::new(0.0, FRAC_PI_6.sin()),
        ];
        for i in 0..2 {
            for j in 0..2 {
                let expected = amps[i] * amps[j].conj();
                assert!((rho.entry(i, j) - expected).norm() < tol::ALGEBRAIC);
            }
        }
        let root3_over_4 = 3f64.sqrt() / 4.0;
        assert!(approx(rho.entry(0, 0).re, 0.75, tol::ALGEBRAIC));
        assert!(approx(rho.entry(0, 1).im, -root3_over_4, tol::ALGEBRAIC));
        assert!(approx(rho.entry(1, 0).im, root3_over_4, tol::ALGEBRAIC));
        assert!(approx(rho.entry(1, 1).re, 0.25, tol::ALGEBRAIC));
    }

    #[test]
    fn orthogonal_complement_of_computational_states() {
        let vac_perp = PureState::vacuum().orthogonal_complement();
        assert!(vac_perp.mean_photon_number() > 1.0 - tol::ALGEBRAIC);

        let plus_perp = PureState::plus().orthogonal_complement();
        let z = plus_perp.overlap(&PureState::minus());
        assert!(approx(z.norm(), 1.0, tol::ALGEBRAIC));
    }

    #[test]
    fn mean_photon_endpoints_and_alphabet_average() {
        assert_eq!(PureState::vacuum().mean_photon_number(), 0.0);
        assert!(approx(
            PureState::one_photon().mean_photon_number(),
            1.0,
            tol::ALGEBRAIC
        ));

        let alphabet = [
            PureState::vacuum(),
            PureState::one_photon(),
            PureState::plus(),
            PureState::minus(),
        ];
        let mean: f64 =
            alphabet.iter().map(|s| s.mean_photon_number()).sum::<f64>() / 4.0;
        assert!(approx(mean, 0.5, tol::ALGEBRAIC));
    }

    #[test]
    fn density_matrix_validation_rejects_bad_matrices() {
        let not_trace_one = Matrix2::new([
            [Complex64::new(0.9, 0.0), Complex64::ZERO],
            [Complex64::ZERO, Complex64::new(0.2, 0.0)],
        ]);
        assert!(DensityMatrix::new(not_trace_one).is_err());

        let not_hermitian = Matrix2::new([
            [Complex64::new(0.5, 0.0), Complex64::new(0.1, 0.2)],
            [Complex64::new(0.1, 0.2), Complex64::new(0.5, 0.0)],
        ]);
        assert!(DensityMatrix::new(not_hermitian).is_err());

        let not_psd = Matrix2::new([
            [Complex64::new(1.2, 0.0), Complex64::ZERO],
            [Complex64::ZERO, Complex64::new(-0.2, 0.0)],
        ]);
        assert!(DensityMatrix::new(not_psd).is_err());
    }

    #[test]
    fn expectation_matches_entry_for_basis_states() {
        let s = PureState::new(0.7, 0.4).unwrap();
        let rho = s.density();
        assert!(approx(
            rho.expectation(&PureState::one_photon()),
            rho.entry(1, 1).re,
            tol::ALGEBRAIC
        ));
    }

    proptest! {
        #[test]
        fn normalization_holds(theta in -PI..PI, phi in -PI..PI) {
            let s = PureState::new(theta, phi).unwrap();
            let (a0, a1) = s.amplitudes();
            let norm = a0.norm_sqr() + a1.norm_sqr();
            prop_assert!((norm - 1.0).abs() < tol::ALGEBRAIC);
        }

        #[test]
        fn cauchy_schwarz(
            t0 in -PI..PI, p0 in -PI..PI,
            t1 in -PI..PI, p1 in -PI..PI,
        ) {
            let a = PureState::new(t0, p0).unwrap();
            let b = PureState::new(t1, p1).unwrap();
            prop_assert!(a.overlap(&b).norm() <= 1.0 + tol::ALGEBRAIC);
        }

        #[test]
        fn complement_is_orthogonal(theta in -PI..PI, phi in -PI..PI) {
            let s = PureState::new(theta, phi).unwrap();
            let t = s.orthogonal_complement();
            prop_assert!(s.overlap(&t).norm() < tol::ALGEBRAIC);
        }

        #[test]
        fn pure_density_invariants(theta in -PI..PI, phi in -PI..PI) {
            let s = PureState::new(theta, phi).unwrap();
            let rho = s.density();
            let (low, high) = rho.eigenvalues();
            prop_assert!((rho.trace().re - 1.0).abs() < tol::ALGEBRAIC);
            prop_assert!(low.abs() < tol::EIGENVALUE);
            prop_assert!((high - 1.0).abs() < tol::EIGENVALUE);
            prop_assert!(
                (s.mean_photon_number() - rho.entry(1, 1).re).abs() < tol::ALGEBRAIC
            );
        }
    }
}
