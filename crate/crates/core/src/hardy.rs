//! Outer functions and the factored boundary derivative.
//!
//! The truncated derivative m' has double poles at the orbit points. Its
//! unimodular normalization Delta = phi m' carries the base-point pole in
//! closed form through the factor (1 - conj(t0) z)^2, while a discrete
//! outer function supplies the rest of the modulus from boundary data
//! p(t) = s(t) |t0 - t|^2. The identity term makes p >= 1 everywhere and
//! smooth at t0, so the outer data has bounded range; the outer grid
//! oversamples the quadrature grid (keeping its nodes as a subset), so
//! |Delta| = 1 holds to rounding on the quadrature nodes and to the
//! resolved orbit depth elsewhere on the boundary.

use crate::caratheodory::{derivative_from_samples, limit_from_samples, CaratheodoryError, NtSequence};
use crate::group::{Character, GroupPresentation};
use crate::moebius::MoebiusError;
use crate::orbit::{self, OrbitData, OrbitError};
use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::Serialize;
use thiserror::Error;

const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Error)]
pub enum HardyError {
    #[error("grid size {n} is not a power of two at least 8")]
    InvalidGridSize { n: usize },
    #[error("expected {expected} boundary samples, got {got}")]
    SampleCountMismatch { expected: usize, got: usize },
    #[error("character ratio dispersion {spread:.3e} exceeds {tol:.1e}; truncation too short")]
    DispersionTooLarge { spread: f64, tol: f64 },
    #[error(transparent)]
    Orbit(#[from] OrbitError),
    #[error(transparent)]
    Map(#[from] MoebiusError),
    #[error(transparent)]
    Limit(#[from] CaratheodoryError),
}

/// Uniform circle grid t_j = exp(i (2 pi j / n + offset)) with a power of
/// two size, the sampling set for discrete outer functions.
#[derive(Debug, Clone)]
pub struct BoundaryGrid {
    offset: f64,
    points: Vec<Complex64>,
}

impl BoundaryGrid {
    pub fn new(n: usize, offset: f64) -> Result<Self, HardyError> {
        if n < 8 || !n.is_power_of_two() {
            return Err(HardyError::InvalidGridSize { n });
        }
        let points = (0..n)
            .map(|j| Complex64::from_polar(1.0, std::f64::consts::TAU * j as f64 / n as f64 + offset))
            .collect();
        Ok(BoundaryGrid { offset, points })
    }

    /// Grid whose offset is tuned to keep all nodes clear of `avoid`.
    pub fn avoiding(n: usize, avoid: &[Complex64]) -> Result<Self, HardyError> {
        if n < 8 || !n.is_power_of_two() {
            return Err(HardyError::InvalidGridSize { n });
        }
        Self::new(n, orbit::clearance_offset(n, avoid))
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn points(&self) -> &[Complex64] {
        &self.points
    }

    /// Grid mean, the discrete normalized arc-length integral.
    pub fn mean<F: Fn(Complex64) -> f64>(&self, f: F) -> f64 {
        self.points.iter().map(|&t| f(t)).sum::<f64>() / self.len() as f64
    }
}

/// Mean of |v_j|^2 over boundary samples, the squared discrete H2 norm.
pub fn h2_norm_sqr_from_samples(values: &[Complex64]) -> f64 {
    values.iter().map(|v| v.norm_sqr()).sum::<f64>() / values.len() as f64
}

/// Deterministic interior sample cloud on a golden-angle spiral.
pub fn interior_samples(count: usize) -> Vec<Complex64> {
    (0..count)
        .map(|k| {
            let r = 0.2 + 0.5 * k as f64 / count.max(1) as f64;
            Complex64::from_polar(r, 2.399_963_229_728_65 * k as f64)
        })
        .collect()
}

/// Componentwise median, a robust center for near-constant complex data.
fn median_complex(values: &[Complex64]) -> Complex64 {
    let med = |mut xs: Vec<f64>| -> f64 {
        xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let n = xs.len();
        if n % 2 == 1 {
            xs[n / 2]
        } else {
            0.5 * (xs[n / 2 - 1] + xs[n / 2])
        }
    };
    Complex64::new(
        med(values.iter().map(|v| v.re).collect()),
        med(values.iter().map(|v| v.im).collect()),
    )
}

/// Polynomial sum c_k z^k, dense in H2 and exact under grid quadrature
/// up to half the grid frequency.
#[derive(Debug, Clone)]
pub struct DiskPolynomial {
    pub coeffs: Vec<Complex64>,
}

impl DiskPolynomial {
    pub fn eval(&self, z: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for &c in self.coeffs.iter().rev() {
            acc = acc * z + c;
        }
        acc
    }

    /// Squared H2 norm, sum |c_k|^2.
    pub fn h2_norm_sqr(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn boundary_samples(&self, grid: &BoundaryGrid) -> Vec<Complex64> {
        grid.points().iter().map(|&t| self.eval(t)).collect()
    }
}

/// Analytic function with prescribed boundary log-modulus on a grid.
///
/// With A_k = (1/n) sum_j f_j t_j^{-k}, the series
/// log O = A_0 + 2 sum_{0<k<n/2} A_k z^k + A_{n/2} z^{n/2}
/// satisfies Re log O(t_j) = f_j exactly on the nodes, and O(0) > 0.
#[derive(Debug, Clone)]
pub struct OuterFunction {
    coeffs: Vec<Complex64>,
}

impl OuterFunction {
    pub fn from_log_modulus(grid: &BoundaryGrid, logmod: &[f64]) -> Result<Self, HardyError> {
        let n = grid.len();
        if logmod.len() != n {
            return Err(HardyError::SampleCountMismatch {
                expected: n,
                got: logmod.len(),
            });
        }
        let mut buf: Vec<Complex64> = logmod.iter().map(|&f| Complex64::new(f, 0.0)).collect();
        FftPlanner::new().plan_fft_forward(n).process(&mut buf);
        // buf[k] = sum_j f_j e^{-2 pi i jk/n}; A_k needs the grid phase.
        let phase = |k: usize| Complex64::from_polar(1.0, -(k as f64) * grid.offset());
        let mut coeffs = Vec::with_capacity(n / 2 + 1);
        coeffs.push(Complex64::new(buf[0].re / n as f64, 0.0));
        for k in 1..n / 2 {
            coeffs.push(2.0 / n as f64 * buf[k] * phase(k));
        }
        coeffs.push(buf[n / 2] * phase(n / 2) / n as f64);
        Ok(OuterFunction { coeffs })
    }

    pub fn log_eval(&self, z: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for &c in self.coeffs.iter().rev() {
            acc = acc * z + c;
        }
        acc
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.log_eval(z).exp()
    }

    /// Value at the origin, exp of the mean log-modulus.
    pub fn value_at_zero(&self) -> f64 {
        self.coeffs[0].re.exp()
    }

    pub fn coefficients(&self) -> &[Complex64] {
        &self.coeffs
    }
}

/// The normalized boundary derivative Delta = phi m' in factored form:
/// phi = (1 - conj(t0) z)^2 O, with O outer for 1/p,
/// p(t) = s(t) |t0 - t|^2 >= 1.
#[derive(Debug, Clone)]
pub struct FactoredDerivative {
    od: OrbitData,
    outer: OuterFunction,
}

/// Per-generator multiplier of Delta under the group action, estimated
/// from Delta(g z) / Delta(z) at interior sample points.
#[derive(Debug, Clone, Serialize)]
pub struct DeltaCharacter {
    #[serde(serialize_with = "crate::report::complex_pair_vec")]
    pub values: Vec<Complex64>,
    pub max_modulus_defect: f64,
    pub max_spread: f64,
}

impl DeltaCharacter {
    /// The estimated values projected to exact unimodularity.
    pub fn character(&self, names: &[String]) -> Result<Character, crate::group::GroupError> {
        let projected: Vec<Complex64> = self.values.iter().map(|v| v / v.norm()).collect();
        Character::new(projected, names, 1e-12)
    }
}

/// Radial normalization data of phi at the base point.
#[derive(Debug, Clone, Serialize)]
pub struct PhiLimitReport {
    /// Limit of phi(z) i t0 conj(Delta(t0)) / (z - t0)^2, equal to 1 when
    /// the factorization is normalized correctly.
    #[serde(serialize_with = "crate::report::complex_pair")]
    pub ratio_limit: Complex64,
    pub ratio_error: f64,
    /// Radial boundary value of Delta at t0.
    #[serde(serialize_with = "crate::report::complex_pair")]
    pub delta_boundary: Complex64,
    /// t0 Delta'(t0) / Delta(t0), the nonnegative boundary log-derivative.
    #[serde(serialize_with = "crate::report::complex_pair")]
    pub delta_log_derivative: Complex64,
}

/// Builds the factored derivative for quadrature on the given grid. The
/// grid must keep clear of the orbit points; `BoundaryGrid::avoiding`
/// does that. The outer data is sampled on a finer grid with the same
/// offset, a superset of the quadrature nodes, so that the boundary
/// modulus near the orbit's accumulation points is resolved well past
/// the quadrature spacing.
pub fn factor_martin_derivative(
    od: &OrbitData,
    grid: &BoundaryGrid,
) -> Result<FactoredDerivative, HardyError> {
    let fine_n = (grid.len() * 32).min(32768).max(grid.len());
    let fine = BoundaryGrid::new(fine_n, grid.offset())?;
    let t0 = od.t0();
    let mut logmod = Vec::with_capacity(fine_n);
    for &t in fine.points() {
        // p = sum |gamma'(t0)| |t0 - t|^2 / |gamma(t0) - t|^2; rows with
        // image t0 contribute their weight exactly, which keeps p smooth
        // through t0, and the identity row makes p >= 1.
        let d0 = (t0 - t).norm_sqr();
        let mut p = 0.0;
        for r in od.rows() {
            if r.image == t0 {
                p += r.absderiv;
                continue;
            }
            let d = (r.image - t).norm_sqr();
            if d <= 1e-28 {
                return Err(HardyError::Orbit(OrbitError::OrbitPointCollision {
                    point: r.image,
                }));
            }
            p += r.absderiv * d0 / d;
        }
        logmod.push(-p.ln());
    }
    let outer = OuterFunction::from_log_modulus(&fine, &logmod)?;
    Ok(FactoredDerivative {
        od: od.clone(),
        outer,
    })
}

impl FactoredDerivative {
    pub fn orbit(&self) -> &OrbitData {
        &self.od
    }

    pub fn outer(&self) -> &OuterFunction {
        &self.outer
    }

    pub fn t0(&self) -> Complex64 {
        self.od.t0()
    }

    /// The analytic factor phi(z) = (1 - conj(t0) z)^2 O(z) with
    /// |phi| = 1/s on the outer grid.
    pub fn phi(&self, z: Complex64) -> Complex64 {
        let f = Complex64::new(1.0, 0.0) - self.od.t0().conj() * z;
        f * f * self.outer.eval(z)
    }

    /// Delta(z) = phi(z) m'(z); unimodular on the construction grid.
    pub fn delta(&self, z: Complex64) -> Result<Complex64, HardyError> {
        Ok(self.phi(z) * self.od.martin_derivative_at_base(z)?)
    }

    /// Max deviation of |Delta| from 1 over the grid nodes.
    pub fn unimodularity_defect(&self, grid: &BoundaryGrid) -> Result<f64, HardyError> {
        let mut worst = 0.0_f64;
        for &t in grid.points() {
            worst = worst.max((self.delta(t)?.norm() - 1.0).abs());
        }
        Ok(worst)
    }

    /// Estimates the character of Delta: for each generator g the ratio
    /// Delta(g z) / Delta(z) is constant in z up to the truncation tail,
    /// and its value is the character at g.
    pub fn delta_character(
        &self,
        presentation: &GroupPresentation,
        samples: &[Complex64],
        tol_char: f64,
    ) -> Result<DeltaCharacter, HardyError> {
        let mut values = Vec::with_capacity(presentation.rank());
        let mut max_modulus_defect = 0.0_f64;
        let mut max_spread = 0.0_f64;
        for g in presentation.generators() {
            let mut ratios = Vec::with_capacity(samples.len());
            for &z in samples {
                let gz = g.map.apply(z)?;
                ratios.push(self.delta(gz)? / self.delta(z)?);
            }
            let value = median_complex(&ratios);
            for r in &ratios {
                max_spread = max_spread.max((r - value).norm());
                max_modulus_defect = max_modulus_defect.max((r.norm() - 1.0).abs());
            }
            values.push(value);
        }
        if max_spread > tol_char {
            return Err(HardyError::DispersionTooLarge {
                spread: max_spread,
                tol: tol_char,
            });
        }
        Ok(DeltaCharacter {
            values,
            max_modulus_defect,
            max_spread,
        })
    }

    /// Checks the second-order vanishing of phi at the base point: the
    /// ratio phi(z) i t0 conj(Delta(t0)) / (z - t0)^2 tends to 1 radially,
    /// because the identity term i t0 / (t0 - z)^2 dominates m' at t0.
    pub fn phi_limit_check(&self) -> Result<PhiLimitReport, HardyError> {
        let t0 = self.t0();
        let seq = NtSequence::radial(t0, 4, 10)?;
        let delta_samples: Vec<Complex64> = seq
            .points()
            .iter()
            .map(|&z| self.delta(z))
            .collect::<Result<_, _>>()?;
        let delta_boundary = limit_from_samples(&delta_samples, 2e-11)?.value;
        let ratio_samples: Vec<Complex64> = seq
            .points()
            .iter()
            .map(|&z| {
                let d = z - t0;
                self.phi(z) * I * t0 * delta_boundary.conj() / (d * d)
            })
            .collect();
        let ratio = limit_from_samples(&ratio_samples, 2e-11)?;
        let derivative = derivative_from_samples(&seq, &delta_samples)?.value;
        Ok(PhiLimitReport {
            ratio_limit: ratio.value,
            ratio_error: ratio.error_bar,
            delta_boundary,
            delta_log_derivative: t0 * derivative * delta_boundary.conj(),
        })
    }
}

/// Pointwise slack of the subharmonicity bound for the interior weight:
/// log s_int(z) <= Poisson[log s](z), evaluated with the log singularities
/// extended harmonically in closed form.
#[derive(Debug, Clone, Serialize)]
pub struct SubharmonicityReport {
    pub violations: Vec<f64>,
    pub max_violation: f64,
}

pub fn subharmonicity_check(
    od: &OrbitData,
    grid: &BoundaryGrid,
    points: &[Complex64],
) -> Result<SubharmonicityReport, HardyError> {
    let n = grid.len();
    let mut smooth_log = Vec::with_capacity(n);
    for &t in grid.points() {
        let s = od.boundary_sum(t, 1e-12)?;
        let mut log_poles = 0.0;
        for r in od.rows() {
            log_poles += (r.image - t).norm_sqr().ln();
        }
        smooth_log.push(s.ln() + log_poles);
    }
    let mut violations = Vec::with_capacity(points.len());
    let mut max_violation = f64::NEG_INFINITY;
    for &z in points {
        let lhs = od.interior_weight(z)?.ln();
        let mut rhs = 0.0;
        for (j, &t) in grid.points().iter().enumerate() {
            rhs += smooth_log[j] * (1.0 - z.norm_sqr()) / (t - z).norm_sqr();
        }
        rhs /= n as f64;
        // Each log |gamma(t0) - t|^2 extends harmonically to
        // log |gamma(t0) - z|^2, bypassing the quadrature.
        for r in od.rows() {
            rhs -= (r.image - z).norm_sqr().ln();
        }
        let v = lhs - rhs;
        violations.push(v);
        max_violation = max_violation.max(v);
    }
    Ok(SubharmonicityReport {
        violations,
        max_violation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{enumerate, Generator};
    use crate::moebius::MoebiusMap;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn trivial_orbit(t0: Complex64) -> OrbitData {
        let p = GroupPresentation::new(vec![], true).unwrap();
        let t = enumerate(&p, 0, 1e-9).unwrap();
        orbit::orbit_data(&t, t0, 1e-9).unwrap()
    }

    fn cyclic_setup(max_len: usize) -> (GroupPresentation, OrbitData) {
        let p = GroupPresentation::new(
            vec![Generator {
                name: "g1".into(),
                map: MoebiusMap::axis_hyperbolic(0.5),
            }],
            true,
        )
        .unwrap();
        let t = enumerate(&p, max_len, 1e-9).unwrap();
        let od = orbit::orbit_data(&t, c(0.0, 1.0), 1e-9).unwrap();
        (p, od)
    }

    fn orbit_grid(od: &OrbitData, n: usize) -> BoundaryGrid {
        let images: Vec<Complex64> = od.rows().iter().map(|r| r.image).collect();
        BoundaryGrid::avoiding(n, &images).unwrap()
    }

    #[test]
    fn grid_rejects_bad_sizes_and_avoids_points() {
        assert!(matches!(
            BoundaryGrid::new(100, 0.0),
            Err(HardyError::InvalidGridSize { n: 100 })
        ));
        assert!(matches!(
            BoundaryGrid::new(4, 0.0),
            Err(HardyError::InvalidGridSize { .. })
        ));
        let avoid = [c(1.0, 0.0), c(0.0, 1.0)];
        let g = BoundaryGrid::avoiding(64, &avoid).unwrap();
        let min_d = g
            .points()
            .iter()
            .flat_map(|t| avoid.iter().map(move |w| (t - w).norm()))
            .fold(f64::INFINITY, f64::min);
        assert!(min_d > 0.3 * std::f64::consts::TAU / 64.0);
    }

    #[test]
    fn outer_matches_boundary_modulus_exactly_on_grid() {
        let grid = BoundaryGrid::new(128, 0.4).unwrap();
        let f = |t: Complex64| 0.3 * t.re - 0.1 * (t * t).im + 0.05;
        let logmod: Vec<f64> = grid.points().iter().map(|&t| f(t)).collect();
        let outer = OuterFunction::from_log_modulus(&grid, &logmod).unwrap();
        for (j, &t) in grid.points().iter().enumerate() {
            assert!((outer.log_eval(t).re - logmod[j]).abs() < 1e-13);
        }
        assert!(outer.value_at_zero() > 0.0);
        assert!((outer.value_at_zero() - (0.05_f64).exp()).abs() < 1e-13);
    }

    #[test]
    fn outer_interior_values_match_analytic_extension() {
        // Boundary data Re(a t) extends to log O = a z for real a.
        let grid = BoundaryGrid::new(64, 0.15).unwrap();
        let logmod: Vec<f64> = grid.points().iter().map(|t| 0.3 * t.re).collect();
        let outer = OuterFunction::from_log_modulus(&grid, &logmod).unwrap();
        for &z in &[c(0.0, 0.0), c(0.4, 0.1), c(-0.2, 0.6)] {
            assert!((outer.log_eval(z) - 0.3 * z).norm() < 1e-13);
        }
    }

    #[test]
    fn parseval_holds_on_grid() {
        let grid = BoundaryGrid::new(64, 0.7).unwrap();
        let p = DiskPolynomial {
            coeffs: vec![c(1.0, 0.5), c(0.0, -2.0), c(0.3, 0.0), c(0.0, 0.0), c(0.1, 0.1)],
        };
        let grid_norm = h2_norm_sqr_from_samples(&p.boundary_samples(&grid));
        assert!((grid_norm - p.h2_norm_sqr()).abs() < 1e-13);
    }

    #[test]
    fn trivial_factorization_is_constant_delta() {
        let t0 = c(0.6, 0.8);
        let od = trivial_orbit(t0);
        let grid = orbit_grid(&od, 64);
        let fd = factor_martin_derivative(&od, &grid).unwrap();
        let expect = I * t0.conj();
        for &z in &[c(0.0, 0.0), c(0.3, -0.4), c(-0.7, 0.1), c(0.2, 0.9)] {
            assert!((fd.delta(z).unwrap() - expect).norm() < 1e-12);
            let phi_expect = (Complex64::new(1.0, 0.0) - t0.conj() * z).powi(2);
            assert!((fd.phi(z) - phi_expect).norm() < 1e-12);
        }
        assert!(fd.unimodularity_defect(&grid).unwrap() < 1e-13);
    }

    #[test]
    fn cyclic_delta_is_unimodular_and_contractive() {
        let (_, od) = cyclic_setup(8);
        let grid = orbit_grid(&od, 1024);
        let fd = factor_martin_derivative(&od, &grid).unwrap();
        assert!(fd.unimodularity_defect(&grid).unwrap() < 1e-11);
        // Off-grid boundary points stay near the unit circle, and interior
        // points stay inside it up to the truncation tail.
        for k in 0..40 {
            let z = Complex64::from_polar(0.9 * (k as f64 + 1.0) / 41.0, 1.7 * k as f64);
            assert!(fd.delta(z).unwrap().norm() <= 1.0 + 1e-6);
        }
        // Off-node boundary values carry the interpolation error of the
        // outer data near the orbit's accumulation points.
        for &ang in &[0.123, 2.0, -1.2] {
            let t = Complex64::from_polar(1.0, ang);
            assert!((fd.delta(t).unwrap().norm() - 1.0).abs() < 3e-3);
        }
    }

    #[test]
    fn delta_character_is_unimodular_and_constant() {
        let (p, od) = cyclic_setup(10);
        let grid = orbit_grid(&od, 1024);
        let fd = factor_martin_derivative(&od, &grid).unwrap();
        let dc = fd.delta_character(&p, &interior_samples(8), 1e-3).unwrap();
        assert_eq!(dc.values.len(), 1);
        assert!(dc.max_modulus_defect < 1e-3, "defect {}", dc.max_modulus_defect);
        assert!(dc.max_spread < 1e-3, "spread {}", dc.max_spread);
        let chi = dc.character(&["g1".into()]).unwrap();
        assert!((chi.values()[0].norm() - 1.0).abs() < 1e-15);

        let trivial = trivial_orbit(c(0.6, 0.8));
        let tg = orbit_grid(&trivial, 64);
        let tfd = factor_martin_derivative(&trivial, &tg).unwrap();
        let none = tfd
            .delta_character(
                &GroupPresentation::new(vec![], true).unwrap(),
                &interior_samples(8),
                1e-3,
            )
            .unwrap();
        assert!(none.values.is_empty());
    }

    #[test]
    fn delta_character_rejects_short_truncation() {
        let (p, od) = cyclic_setup(2);
        let grid = orbit_grid(&od, 512);
        let fd = factor_martin_derivative(&od, &grid).unwrap();
        assert!(matches!(
            fd.delta_character(&p, &interior_samples(8), 1e-3),
            Err(HardyError::DispersionTooLarge { .. })
        ));
    }

    #[test]
    fn phi_limit_is_one_for_trivial_group() {
        let t0 = c(0.6, 0.8);
        let od = trivial_orbit(t0);
        let grid = orbit_grid(&od, 64);
        let fd = factor_martin_derivative(&od, &grid).unwrap();
        let rep = fd.phi_limit_check().unwrap();
        assert!((rep.ratio_limit - c(1.0, 0.0)).norm() < 1e-9);
        assert!((rep.delta_boundary - I * t0.conj()).norm() < 1e-11);
        // The true value is 0; difference quotients of a constant carry
        // rounding noise of order eps / h^2.
        assert!(rep.delta_log_derivative.norm() < 1e-6);
    }

    #[test]
    fn phi_limit_is_one_for_cyclic_group() {
        let (_, od) = cyclic_setup(10);
        let grid = orbit_grid(&od, 1024);
        let fd = factor_martin_derivative(&od, &grid).unwrap();
        let rep = fd.phi_limit_check().unwrap();
        assert!(
            (rep.ratio_limit - c(1.0, 0.0)).norm() < 1e-2,
            "ratio limit {}",
            rep.ratio_limit
        );
        // The boundary log-derivative of an inner-type function is real
        // and nonnegative; the radial-quotient estimate carries the outer
        // interpolation wiggle amplified by 1/h, so it is coarse.
        assert!(rep.delta_log_derivative.im.abs() < 0.1);
        assert!(rep.delta_log_derivative.re > 0.0);
    }

    #[test]
    fn subharmonicity_holds_with_equality_for_trivial_group() {
        let t0 = c(0.6, 0.8);
        let od = trivial_orbit(t0);
        let grid = orbit_grid(&od, 128);
        let points = [c(0.0, 0.0), c(0.5, 0.2), c(-0.3, -0.6)];
        let rep = subharmonicity_check(&od, &grid, &points).unwrap();
        for v in &rep.violations {
            assert!(v.abs() < 1e-12, "violation {v}");
        }

        let (_, cyc) = cyclic_setup(8);
        let cgrid = orbit_grid(&cyc, 1024);
        let interior: Vec<Complex64> = (0..30)
            .map(|k| Complex64::from_polar(0.85 * (k as f64 + 1.0) / 31.0, 0.77 * k as f64))
            .collect();
        let crep = subharmonicity_check(&cyc, &cgrid, &interior).unwrap();
        assert!(crep.max_violation <= 1e-8, "violation {}", crep.max_violation);
    }
}
