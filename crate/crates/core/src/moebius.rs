//! Automorphisms of the unit disk in SU(1,1) form.
//!
//! A map is stored as the coefficient pair (a, b) of
//! `m(z) = (a z + b) / (conj(b) z + conj(a))` with |a|^2 - |b|^2 = 1.
//! The pair (-a, -b) describes the same map.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Default algebraic tolerance for coefficient checks.
pub const TOL_ALG: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum MoebiusError {
    #[error("coefficients violate |a|^2 - |b|^2 = 1 (defect {defect:.3e})")]
    InvalidMap { defect: f64 },
    #[error("evaluation point {point} hits the pole of the map")]
    PoleAtInput { point: Complex64 },
}

/// Conjugacy class of a disk automorphism, decided by the trace 2 Re(a).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MapClass {
    Identity,
    Elliptic,
    Parabolic,
    Hyperbolic,
}

/// Disk automorphism `z -> (a z + b) / (conj(b) z + conj(a))`.
///
/// Invariant: |a|^2 - |b|^2 = 1.
#[derive(Debug, Clone, Copy)]
pub struct MoebiusMap {
    a: Complex64,
    b: Complex64,
}

impl MoebiusMap {
    /// Builds a map from SU(1,1) coefficients.
    ///
    /// The pair is rescaled by the exact determinant, so callers may pass
    /// coefficients that are correct only up to `tol` in |a|^2 - |b|^2.
    pub fn new(a: Complex64, b: Complex64) -> Result<Self, MoebiusError> {
        let det = a.norm_sqr() - b.norm_sqr();
        if (det - 1.0).abs() > 1e-6 || !det.is_finite() {
            return Err(MoebiusError::InvalidMap {
                defect: (det - 1.0).abs(),
            });
        }
        let scale = det.sqrt();
        Ok(MoebiusMap {
            a: a / scale,
            b: b / scale,
        })
    }

    pub fn identity() -> Self {
        MoebiusMap {
            a: Complex64::new(1.0, 0.0),
            b: Complex64::new(0.0, 0.0),
        }
    }

    /// Hyperbolic map `z -> (z + s) / (s z + 1)` fixing -1 and 1.
    ///
    /// Requires -1 < s < 1; s = 0 gives the identity.
    pub fn axis_hyperbolic(s: f64) -> Self {
        assert!(s.abs() < 1.0, "axis multiplier must satisfy |s| < 1");
        let scale = (1.0 - s * s).sqrt();
        MoebiusMap {
            a: Complex64::new(1.0 / scale, 0.0),
            b: Complex64::new(s / scale, 0.0),
        }
    }

    /// Rotation `z -> e^{i phase} z`, elliptic for phase not a multiple of 2 pi.
    pub fn rotation(phase: f64) -> Self {
        MoebiusMap {
            a: Complex64::from_polar(1.0, phase / 2.0),
            b: Complex64::new(0.0, 0.0),
        }
    }

    pub fn coefficients(&self) -> (Complex64, Complex64) {
        (self.a, self.b)
    }

    /// | |a|^2 - |b|^2 - 1 | relative to the coefficient scale.
    ///
    /// The relative form is the one that stays near machine epsilon for
    /// long words, whose coefficients grow without bound.
    pub fn normalization_defect(&self) -> f64 {
        let scale = self.a.norm_sqr() + self.b.norm_sqr();
        (self.a.norm_sqr() - self.b.norm_sqr() - 1.0).abs() / scale.max(1.0)
    }

    /// Evaluates the map. Fails when z lies on the pole -conj(a)/conj(b),
    /// which sits outside the closed disk for a valid map.
    pub fn apply(&self, z: Complex64) -> Result<Complex64, MoebiusError> {
        let den = self.b.conj() * z + self.a.conj();
        if den.norm() <= TOL_ALG {
            return Err(MoebiusError::PoleAtInput { point: z });
        }
        Ok((self.a * z + self.b) / den)
    }

    /// m'(z) = 1 / (conj(b) z + conj(a))^2.
    pub fn derivative(&self, z: Complex64) -> Result<Complex64, MoebiusError> {
        let den = self.b.conj() * z + self.a.conj();
        if den.norm() <= TOL_ALG {
            return Err(MoebiusError::PoleAtInput { point: z });
        }
        Ok((den * den).finv())
    }

    /// Group operation: (self . other)(z) = self(other(z)).
    ///
    /// The product is renormalized by its determinant so long composition
    /// chains keep the SU(1,1) invariant at working precision.
    pub fn compose(&self, other: &MoebiusMap) -> MoebiusMap {
        let a = self.a * other.a + self.b * other.b.conj();
        let b = self.a * other.b + self.b * other.a.conj();
        let det = a.norm_sqr() - b.norm_sqr();
        let scale = det.sqrt();
        MoebiusMap {
            a: a / scale,
            b: b / scale,
        }
    }

    /// Inverse map, with coefficient pair (conj(a), -b).
    pub fn inverse(&self) -> MoebiusMap {
        MoebiusMap {
            a: self.a.conj(),
            b: -self.b,
        }
    }

    /// Classifies by the trace 2 Re(a): identity needs b = 0 and a = +-1,
    /// |trace| > 2 is hyperbolic, = 2 parabolic, < 2 elliptic.
    pub fn classify(&self, tol: f64) -> MapClass {
        if self.b.norm() <= tol
            && ((self.a - 1.0).norm() <= tol || (self.a + 1.0).norm() <= tol)
        {
            return MapClass::Identity;
        }
        let trace = 2.0 * self.a.re.abs();
        if trace > 2.0 + tol {
            MapClass::Hyperbolic
        } else if trace < 2.0 - tol {
            MapClass::Elliptic
        } else {
            MapClass::Parabolic
        }
    }

    /// Equality of maps, modulo the (a, b) ~ (-a, -b) sign ambiguity.
    pub fn approx_eq(&self, other: &MoebiusMap, tol: f64) -> bool {
        let plus = (self.a - other.a).norm() + (self.b - other.b).norm();
        let minus = (self.a + other.a).norm() + (self.b + other.b).norm();
        plus.min(minus) <= tol
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_map(rng: &mut ChaCha8Rng) -> MoebiusMap {
        let rho: f64 = rng.gen_range(0.0..2.5);
        let t1: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
        let t2: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
        MoebiusMap::new(
            Complex64::from_polar(rho.cosh(), t1),
            Complex64::from_polar(rho.sinh(), t2),
        )
        .unwrap()
    }

    #[test]
    fn axis_map_half_values() {
        let m = MoebiusMap::axis_hyperbolic(0.5);
        let (a, b) = m.coefficients();
        assert_relative_eq!(a.re, 1.1547005383792517, max_relative = 1e-15);
        assert_relative_eq!(b.re, 0.5773502691896258, max_relative = 1e-15);
        assert!((m.apply(c(0.0, 0.0)).unwrap() - c(0.5, 0.0)).norm() < 1e-15);
        assert!((m.apply(c(1.0, 0.0)).unwrap() - c(1.0, 0.0)).norm() < 1e-15);
        assert!((m.apply(c(-1.0, 0.0)).unwrap() - c(-1.0, 0.0)).norm() < 1e-15);
        // m(i) = (i + 1/2) / (i/2 + 1) = 0.8 + 0.6 i.
        assert!((m.apply(c(0.0, 1.0)).unwrap() - c(0.8, 0.6)).norm() < 1e-15);
        assert!((m.derivative(c(0.0, 0.0)).unwrap() - c(0.75, 0.0)).norm() < 1e-15);
        assert_eq!(m.classify(1e-9), MapClass::Hyperbolic);
    }

    #[test]
    fn classification_covers_all_classes() {
        assert_eq!(MoebiusMap::identity().classify(1e-9), MapClass::Identity);
        assert_eq!(
            MoebiusMap::rotation(std::f64::consts::FRAC_PI_2).classify(1e-9),
            MapClass::Elliptic
        );
        let parabolic = MoebiusMap::new(c(1.0, 1.0), c(1.0, 0.0)).unwrap();
        assert_eq!(parabolic.classify(1e-9), MapClass::Parabolic);
        let minus_id = MoebiusMap::new(c(-1.0, 0.0), c(0.0, 0.0)).unwrap();
        assert_eq!(minus_id.classify(1e-9), MapClass::Identity);
    }

    #[test]
    fn invalid_coefficients_are_rejected() {
        assert!(matches!(
            MoebiusMap::new(c(1.0, 0.0), c(1.0, 0.0)),
            Err(MoebiusError::InvalidMap { .. })
        ));
    }

    #[test]
    fn pole_is_reported_outside_disk() {
        let m = MoebiusMap::axis_hyperbolic(0.5);
        let (a, b) = m.coefficients();
        let pole = -a.conj() / b.conj();
        assert!(pole.norm() > 1.0);
        assert!(matches!(
            m.apply(pole),
            Err(MoebiusError::PoleAtInput { .. })
        ));
        assert!(matches!(
            m.derivative(pole),
            Err(MoebiusError::PoleAtInput { .. })
        ));
    }

    #[test]
    fn squared_axis_map_matches_multiplier_composition() {
        let m = MoebiusMap::axis_hyperbolic(0.5);
        let m2 = m.compose(&m);
        // Multipliers at the fixed point -1 multiply: s2 = (9-1)/(9+1).
        assert!((m2.apply(c(0.0, 0.0)).unwrap() - c(0.8, 0.0)).norm() < 1e-15);
        assert!(m2.approx_eq(&MoebiusMap::axis_hyperbolic(0.8), 1e-12));
    }

    #[test]
    fn inverse_round_trips() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let m = random_map(&mut rng);
            assert!(m
                .compose(&m.inverse())
                .approx_eq(&MoebiusMap::identity(), 1e-10));
            let z = c(rng.gen_range(-0.7..0.7), rng.gen_range(-0.7..0.7));
            let w = m.apply(z).unwrap();
            assert!((m.inverse().apply(w).unwrap() - z).norm() < 1e-10);
        }
    }

    #[test]
    fn derivative_matches_central_difference() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let h = 1e-6;
        for _ in 0..50 {
            let m = random_map(&mut rng);
            let z = c(rng.gen_range(-0.6..0.6), rng.gen_range(-0.6..0.6));
            let fd = (m.apply(z + h).unwrap() - m.apply(z - h).unwrap()) / (2.0 * h);
            let d = m.derivative(z).unwrap();
            assert!((fd - d).norm() < 1e-7 * d.norm().max(1.0));
        }
    }

    #[test]
    fn chain_rule_holds_for_compositions() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..50 {
            let m1 = random_map(&mut rng);
            let m2 = random_map(&mut rng);
            let z = c(rng.gen_range(-0.6..0.6), rng.gen_range(-0.6..0.6));
            let lhs = m1.compose(&m2).derivative(z).unwrap();
            let rhs = m1.derivative(m2.apply(z).unwrap()).unwrap() * m2.derivative(z).unwrap();
            assert!((lhs - rhs).norm() <= 1e-11 * rhs.norm().max(1.0));
        }
    }

    #[test]
    fn boundary_transport_identity() {
        // (1 - |m(z)|^2) / |t - m(z)|^2 = (1 - |z|^2) / |m^{-1}(t) - z|^2
        //                                 * |(m^{-1})'(t)|  for |t| = 1, |z| < 1.
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..200 {
            let m = random_map(&mut rng);
            let z = Complex64::from_polar(
                rng.gen_range(0.0..0.95),
                rng.gen_range(0.0..std::f64::consts::TAU),
            );
            let t = Complex64::from_polar(1.0, rng.gen_range(0.0..std::f64::consts::TAU));
            let mz = m.apply(z).unwrap();
            let lhs = (1.0 - mz.norm_sqr()) / (t - mz).norm_sqr();
            let inv = m.inverse();
            let rhs = (1.0 - z.norm_sqr()) / (inv.apply(t).unwrap() - z).norm_sqr()
                * inv.derivative(t).unwrap().norm();
            assert!(
                (lhs - rhs).abs() <= 1e-10 * rhs.abs().max(1.0),
                "transport identity violated: {lhs} vs {rhs}"
            );
        }
    }

    #[test]
    fn composition_keeps_normalization() {
        let mut rng = ChaCha8Rng::seed_from_u64(19);
        // Word lengths up to 14 cover the enumeration regime this crate
        // targets; coefficients stay well below the 1/sqrt(eps) scale where
        // the determinant of a product loses all significant digits.
        for _ in 0..40 {
            let mut m = MoebiusMap::identity();
            for _ in 0..14 {
                let step = {
                    let rho: f64 = rng.gen_range(0.0..1.2);
                    let t1: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
                    let t2: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
                    MoebiusMap::new(
                        Complex64::from_polar(rho.cosh(), t1),
                        Complex64::from_polar(rho.sinh(), t2),
                    )
                    .unwrap()
                };
                m = m.compose(&step);
                assert!(m.normalization_defect() <= 1e-13);
            }
        }
    }
}
