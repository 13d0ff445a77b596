//! Orbit sums at a boundary base point.
//!
//! Everything here is a finite truncation of a series over group elements:
//! the harmonic kernel sum m(z), its derivative m'(z), the boundary weight
//! sum, Green-type Blaschke products over an orbit, and the scalar series
//! used by the small-oh and log-integrability diagnostics.

use crate::group::{Truncation, Word};
use crate::moebius::MoebiusError;
use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Error)]
pub enum OrbitError {
    #[error("point {point} is not on the unit circle")]
    NotUnimodular { point: Complex64 },
    #[error("base point is fixed by truncation element {word}; its orbit series degenerates")]
    BoundaryFixedPoint { word: Word },
    #[error("evaluation point {point} collides with an orbit image")]
    OrbitPointCollision { point: Complex64 },
    #[error("derivative form at the evaluation point needs an inverse-closed truncation")]
    NotInverseClosed,
    #[error("zero {zero} lies on or outside the unit circle")]
    ZeroOnBoundary { zero: Complex64 },
    #[error("evaluation point {point} collides with a measure atom")]
    AtomCollision { point: Complex64 },
    #[error(transparent)]
    Map(#[from] MoebiusError),
}

/// Scalar series or quadrature result with a convergence verdict.
#[derive(Debug, Clone, Serialize)]
pub struct SeriesReport {
    pub value: f64,
    pub partial_sums: Vec<f64>,
    pub converged: bool,
    pub tail_estimate: f64,
}

/// Data of one orbit point gamma(t0): word length, image, derivative
/// gamma'(t0) and |gamma'(t0)|.
#[derive(Debug, Clone, Serialize)]
pub struct OrbitRow {
    pub word_len: usize,
    #[serde(serialize_with = "crate::report::complex_pair")]
    pub image: Complex64,
    #[serde(serialize_with = "crate::report::complex_pair")]
    pub deriv: Complex64,
    pub absderiv: f64,
}

/// Orbit of a boundary point under a truncation, with per-row derivative
/// weights. Rows are parallel to the truncation's element order; row 0 is
/// the identity.
#[derive(Debug, Clone)]
pub struct OrbitData {
    t0: Complex64,
    rows: Vec<OrbitRow>,
    tail_estimate: f64,
}

/// Which variable carries the derivative exponent in m'.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DerivativeForm {
    /// i sum gamma(t0) |gamma'(t0)| / (gamma(t0) - z)^2.
    AtBase,
    /// i t0 sum gamma'(z) / (gamma(z) - t0)^2; equal to `AtBase` term for
    /// term under the element <-> inverse bijection.
    AtPoint,
}

fn check_unimodular(point: Complex64) -> Result<(), OrbitError> {
    if (point.norm() - 1.0).abs() > 1e-12 {
        return Err(OrbitError::NotUnimodular { point });
    }
    Ok(())
}

/// Geometric tail bound from the last two word-length shells.
fn geometric_tail(shells: &[f64]) -> f64 {
    if shells.len() < 2 {
        return 0.0;
    }
    let last = shells[shells.len() - 1];
    let prev = shells[shells.len() - 2];
    if prev <= 0.0 {
        return 0.0;
    }
    let q = last / prev;
    if q < 1.0 {
        last * q / (1.0 - q)
    } else {
        f64::INFINITY
    }
}

/// Evaluates all orbit rows of `trunc` at the boundary point `t0`.
///
/// Fails when t0 is off the circle or within `tol_map` of a fixed point of
/// a non-identity truncation element.
pub fn orbit_data(
    trunc: &Truncation,
    t0: Complex64,
    tol_map: f64,
) -> Result<OrbitData, OrbitError> {
    check_unimodular(t0)?;
    let mut rows = Vec::with_capacity(trunc.len());
    let mut shells: Vec<f64> = Vec::new();
    for e in trunc.elements() {
        let image = e.map.apply(t0)?;
        let deriv = e.map.derivative(t0)?;
        let len = e.word.len();
        if len > 0 && (image - t0).norm() <= tol_map {
            return Err(OrbitError::BoundaryFixedPoint {
                word: e.word.clone(),
            });
        }
        let absderiv = deriv.norm();
        if shells.len() <= len {
            shells.resize(len + 1, 0.0);
        }
        shells[len] += absderiv;
        rows.push(OrbitRow {
            word_len: len,
            image,
            deriv,
            absderiv,
        });
    }
    Ok(OrbitData {
        t0,
        rows,
        tail_estimate: geometric_tail(&shells),
    })
}

impl OrbitData {
    /// Builds orbit data from explicit rows; used for synthetic series.
    pub fn from_rows(t0: Complex64, rows: Vec<OrbitRow>) -> Self {
        OrbitData {
            t0,
            rows,
            tail_estimate: 0.0,
        }
    }

    pub fn t0(&self) -> Complex64 {
        self.t0
    }

    pub fn rows(&self) -> &[OrbitRow] {
        &self.rows
    }

    /// Tail bound for sum |gamma'(t0)| beyond the truncation, extrapolated
    /// geometrically from the last two word-length shells.
    pub fn tail_estimate(&self) -> f64 {
        self.tail_estimate
    }

    /// m(z) = (i/2) sum (gamma(t0) + z) / (gamma(t0) - z) |gamma'(t0)|.
    pub fn martin(&self, z: Complex64) -> Result<Complex64, OrbitError> {
        let mut acc = Complex64::new(0.0, 0.0);
        for r in &self.rows {
            let den = r.image - z;
            if den.norm() <= 1e-14 {
                return Err(OrbitError::OrbitPointCollision { point: z });
            }
            acc += (r.image + z) / den * r.absderiv;
        }
        Ok(0.5 * I * acc)
    }

    /// m'(z) = i sum gamma(t0) |gamma'(t0)| / (gamma(t0) - z)^2.
    pub fn martin_derivative_at_base(&self, z: Complex64) -> Result<Complex64, OrbitError> {
        let mut acc = Complex64::new(0.0, 0.0);
        for r in &self.rows {
            let den = r.image - z;
            if den.norm() <= 1e-14 {
                return Err(OrbitError::OrbitPointCollision { point: z });
            }
            acc += r.image * r.absderiv / (den * den);
        }
        Ok(I * acc)
    }

    /// Interior continuation sum |gamma'(t0)| / |gamma(t0) - z|^2 of the
    /// boundary weight; dominates |m'(z)| everywhere in the disk.
    pub fn interior_weight(&self, z: Complex64) -> Result<f64, OrbitError> {
        let mut acc = 0.0;
        for r in &self.rows {
            let d = (r.image - z).norm_sqr();
            if d <= 1e-28 {
                return Err(OrbitError::OrbitPointCollision { point: z });
            }
            acc += r.absderiv / d;
        }
        Ok(acc)
    }

    /// Boundary weight sum s(t) = sum |gamma'(t0)| / |gamma(t0) - t|^2,
    /// which equals i t m'(t) on the circle.
    pub fn boundary_sum(&self, t: Complex64, tol_map: f64) -> Result<f64, OrbitError> {
        check_unimodular(t)?;
        let mut acc = 0.0;
        for r in &self.rows {
            let d = (r.image - t).norm_sqr();
            if d.sqrt() <= tol_map {
                return Err(OrbitError::OrbitPointCollision { point: t });
            }
            acc += r.absderiv / d;
        }
        Ok(acc)
    }

    /// Ratio diagnostic |t0 - z_r| sum_{gamma != e} |gamma'(t0)| /
    /// |gamma(t0) - z_r|^2 along z_r = r t0. The truncated assumption
    /// holds when the ratio falls below `tol_smalloh` at the last radius.
    pub fn smalloh_check(&self, radii: &[f64], tol_smalloh: f64) -> SeriesReport {
        let mut qs = Vec::with_capacity(radii.len());
        for &r in radii {
            let z = self.t0 * r;
            let mut acc = 0.0;
            for row in &self.rows {
                if row.word_len == 0 {
                    continue;
                }
                acc += row.absderiv / (row.image - z).norm_sqr();
            }
            qs.push((self.t0 - z).norm() * acc);
        }
        let value = qs.last().copied().unwrap_or(0.0);
        SeriesReport {
            value,
            partial_sums: qs,
            converged: value <= tol_smalloh,
            tail_estimate: value,
        }
    }
}

/// m'(z) in either form. The `AtPoint` form revisits every element map at
/// z and is only valid for inverse-closed truncations.
pub fn martin_derivative(
    od: &OrbitData,
    trunc: &Truncation,
    z: Complex64,
    form: DerivativeForm,
) -> Result<Complex64, OrbitError> {
    match form {
        DerivativeForm::AtBase => od.martin_derivative_at_base(z),
        DerivativeForm::AtPoint => {
            if !trunc.inverse_closed() {
                return Err(OrbitError::NotInverseClosed);
            }
            let t0 = od.t0();
            let mut acc = Complex64::new(0.0, 0.0);
            for e in trunc.elements() {
                let gz = e.map.apply(z)?;
                let den = gz - t0;
                if den.norm() <= 1e-14 {
                    return Err(OrbitError::OrbitPointCollision { point: z });
                }
                acc += e.map.derivative(z)? / (den * den);
            }
            Ok(I * t0 * acc)
        }
    }
}

/// Blaschke factor with zero w, normalized positive at 0; the factor for
/// w = 0 is z itself.
fn blaschke_factor(w: Complex64, z: Complex64) -> Complex64 {
    if w.norm() <= 1e-14 {
        return z;
    }
    (w - z) / (Complex64::new(1.0, 0.0) - w.conj() * z) * w.conj() / w.norm()
}

/// Product of positively normalized Blaschke factors over the orbit of an
/// interior point z0, a finite section of the Green's function product.
pub fn green_blaschke(
    trunc: &Truncation,
    z0: Complex64,
    z: Complex64,
) -> Result<Complex64, OrbitError> {
    let mut acc = Complex64::new(1.0, 0.0);
    for e in trunc.elements() {
        acc *= blaschke_factor(e.map.apply(z0)?, z);
    }
    Ok(acc)
}

/// Uniform circle grid of size n with phase `offset`.
fn uniform_circle(n: usize, offset: f64) -> Vec<Complex64> {
    (0..n)
        .map(|j| Complex64::from_polar(1.0, std::f64::consts::TAU * j as f64 / n as f64 + offset))
        .collect()
}

/// Picks a grid offset keeping all nodes away from the given points.
pub(crate) fn clearance_offset(n: usize, avoid: &[Complex64]) -> f64 {
    let spacing = std::f64::consts::TAU / n as f64;
    let mut best = (f64::NEG_INFINITY, 0.5 * spacing);
    for k in 0..16 {
        // Irrational multiples of the spacing, so that no refinement of
        // the grid lands a node exactly on a lattice-aligned avoid point.
        let frac = (0.5 + k as f64 * 0.618_033_988_749_894_9).fract();
        let offset = spacing * frac;
        let grid = uniform_circle(n, offset);
        let mut min_d = f64::INFINITY;
        for w in avoid {
            for t in &grid {
                min_d = min_d.min((t - w).norm());
            }
        }
        if min_d > best.0 {
            best = (min_d, offset);
        }
    }
    best.1
}

/// Quadrature of the mean of log s(t) over the circle.
///
/// The integrand has logarithmic spikes at the orbit images, so the mean
/// is taken in the split form log s(t) + sum log|gamma(t0) - t|^2, whose
/// second part has exact circle mean zero for unimodular images. The
/// remaining factor is smooth and the grid mean converges spectrally.
pub fn widom_log_integral(od: &OrbitData, grid_size: usize, tol_series: f64) -> SeriesReport {
    let images: Vec<Complex64> = od.rows().iter().map(|r| r.image).collect();
    // One offset for both grids, cleared against the finer node set, so the
    // refined grid nests the coarse one and the delta measures convergence
    // of the smooth part rather than re-randomized spike sampling.
    let offset = clearance_offset(2 * grid_size, &images);
    let quad = |n: usize| -> f64 {
        let grid = uniform_circle(n, offset);
        let mut mean = 0.0;
        for t in &grid {
            let mut s = 0.0;
            let mut log_poles = 0.0;
            for r in od.rows() {
                let d2 = (r.image - t).norm_sqr();
                s += r.absderiv / d2;
                log_poles += d2.ln();
            }
            mean += s.ln() + log_poles;
        }
        mean / n as f64
    };
    let coarse = quad(grid_size);
    let fine = quad(2 * grid_size);
    let delta = (fine - coarse).abs();
    SeriesReport {
        value: fine,
        partial_sums: vec![coarse, fine],
        converged: delta <= tol_series,
        tail_estimate: delta,
    }
}

/// Frostman data of the finite Blaschke product with the given zeros.
#[derive(Debug, Clone, Serialize)]
pub struct FrostmanReport {
    pub sum: f64,
    #[serde(serialize_with = "crate::report::complex_pair")]
    pub boundary_value: Complex64,
    pub angular_derivative_abs: f64,
}

/// sum (1 - |z_k|^2) / |t - z_k|^2 together with the boundary value of
/// the product; the sum is |B'(t)| for the finite product.
pub fn frostman_blaschke(zeros: &[Complex64], t: Complex64) -> Result<FrostmanReport, OrbitError> {
    check_unimodular(t)?;
    let mut sum = 0.0;
    let mut boundary_value = Complex64::new(1.0, 0.0);
    for &z in zeros {
        if z.norm() >= 1.0 {
            return Err(OrbitError::ZeroOnBoundary { zero: z });
        }
        sum += (1.0 - z.norm_sqr()) / (t - z).norm_sqr();
        boundary_value *= blaschke_factor(z, t);
    }
    Ok(FrostmanReport {
        sum,
        boundary_value,
        angular_derivative_abs: sum,
    })
}

/// Purely atomic positive measure on the circle: atoms (t_k, c_k).
#[derive(Debug, Clone)]
pub struct HerglotzAtoms {
    pub atoms: Vec<(Complex64, f64)>,
}

#[derive(Debug, Clone, Serialize)]
pub struct HerglotzBoundary {
    #[serde(serialize_with = "crate::report::complex_pair")]
    pub value: Complex64,
    #[serde(serialize_with = "crate::report::complex_pair")]
    pub derivative: Complex64,
}

impl HerglotzAtoms {
    pub fn new(atoms: Vec<(Complex64, f64)>) -> Result<Self, OrbitError> {
        for &(t, c) in &atoms {
            check_unimodular(t)?;
            assert!(c > 0.0, "atom masses must be positive");
        }
        Ok(HerglotzAtoms { atoms })
    }

    /// u(z) = i sum (t_k + z) / (t_k - z) c_k.
    pub fn eval(&self, z: Complex64) -> Result<Complex64, OrbitError> {
        let mut acc = Complex64::new(0.0, 0.0);
        for &(t, c) in &self.atoms {
            let den = t - z;
            if den.norm() <= 1e-14 {
                return Err(OrbitError::AtomCollision { point: z });
            }
            acc += (t + z) / den * c;
        }
        Ok(I * acc)
    }

    /// Boundary value and derivative at a circle point away from the
    /// atoms: u'(t) = -2 i conj(t) sum c_k / |t_k - t|^2.
    pub fn boundary(&self, t: Complex64, tol_map: f64) -> Result<HerglotzBoundary, OrbitError> {
        check_unimodular(t)?;
        let mut weight = 0.0;
        for &(tk, c) in &self.atoms {
            if (tk - t).norm() <= tol_map {
                return Err(OrbitError::AtomCollision { point: t });
            }
            weight += c / (tk - t).norm_sqr();
        }
        Ok(HerglotzBoundary {
            value: self.eval(t)?,
            derivative: -2.0 * I * t.conj() * weight,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{enumerate, Generator, GroupPresentation};
    use crate::moebius::MoebiusMap;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn trivial_truncation() -> Truncation {
        let p = GroupPresentation::new(vec![], true).unwrap();
        enumerate(&p, 0, 1e-9).unwrap()
    }

    fn cyclic_truncation(max_len: usize) -> Truncation {
        let p = GroupPresentation::new(
            vec![Generator {
                name: "g1".into(),
                map: MoebiusMap::axis_hyperbolic(0.5),
            }],
            true,
        )
        .unwrap();
        enumerate(&p, max_len, 1e-9).unwrap()
    }

    #[test]
    fn trivial_group_closed_forms() {
        let t0 = c(0.6, 0.8);
        let od = orbit_data(&trivial_truncation(), t0, 1e-9).unwrap();
        assert_eq!(od.rows().len(), 1);
        assert!((od.martin(c(0.0, 0.0)).unwrap() - c(0.0, 0.5)).norm() < 1e-15);
        // m(t0/2) = (i/2)(3/2)/(1/2) = 1.5 i.
        assert!((od.martin(t0 * 0.5).unwrap() - c(0.0, 1.5)).norm() < 1e-14);
        let expect = I * t0.conj();
        assert!(
            (od.martin_derivative_at_base(c(0.0, 0.0)).unwrap() - expect).norm() < 1e-15
        );
        assert!((od.boundary_sum(-t0, 1e-9).unwrap() - 0.25).abs() < 1e-15);
        assert_eq!(od.tail_estimate(), 0.0);
    }

    #[test]
    fn base_point_at_generator_fixed_point_is_rejected() {
        let t = cyclic_truncation(2);
        assert!(matches!(
            orbit_data(&t, c(1.0, 0.0), 1e-9),
            Err(OrbitError::BoundaryFixedPoint { .. })
        ));
        assert!(matches!(
            orbit_data(&t, c(0.5, 0.5), 1e-9),
            Err(OrbitError::NotUnimodular { .. })
        ));
    }

    #[test]
    fn absderiv_matches_boundary_derivative_identity() {
        // |gamma'(t0)| = t0 gamma'(t0) / gamma(t0) for unimodular t0.
        let od = orbit_data(&cyclic_truncation(8), c(0.0, 1.0), 1e-9).unwrap();
        for r in od.rows() {
            let v = od.t0() * r.deriv / r.image;
            assert!(v.im.abs() < 1e-13);
            assert!((v.re - r.absderiv).abs() < 1e-13 * r.absderiv.max(1e-30));
        }
    }

    #[test]
    fn derivative_forms_agree_on_inverse_closed_truncation() {
        let t = cyclic_truncation(10);
        let od = orbit_data(&t, c(0.0, 1.0), 1e-9).unwrap();
        for k in 0..50 {
            let z = Complex64::from_polar(0.02 * k as f64, 0.37 * k as f64);
            let a = martin_derivative(&od, &t, z, DerivativeForm::AtBase).unwrap();
            let b = martin_derivative(&od, &t, z, DerivativeForm::AtPoint).unwrap();
            assert!(
                (a - b).norm() <= 1e-12 * a.norm().max(1.0),
                "forms disagree at {z}: {a} vs {b}"
            );
        }
    }

    #[test]
    fn martin_derivative_matches_difference_quotient() {
        let t = cyclic_truncation(6);
        let od = orbit_data(&t, c(0.0, 1.0), 1e-9).unwrap();
        let h = 1e-6;
        for &z in &[c(0.0, 0.0), c(0.3, -0.2), c(-0.5, 0.1)] {
            let fd = (od.martin(z + h).unwrap() - od.martin(z - h).unwrap()) / (2.0 * h);
            let d = od.martin_derivative_at_base(z).unwrap();
            assert!((fd - d).norm() < 1e-7 * d.norm().max(1.0));
        }
    }

    #[test]
    fn boundary_sum_equals_rotated_derivative_on_circle() {
        let t = cyclic_truncation(8);
        let od = orbit_data(&t, c(0.0, 1.0), 1e-9).unwrap();
        for k in 0..40 {
            let tau = Complex64::from_polar(1.0, 0.1 + 0.15 * k as f64);
            let s = od.boundary_sum(tau, 1e-9).unwrap();
            let m = I * tau * od.martin_derivative_at_base(tau).unwrap();
            assert!(m.im.abs() < 1e-10 * s);
            assert!((m.re - s).abs() < 1e-12 * s);
        }
    }

    #[test]
    fn at_point_form_requires_inverse_closure() {
        let t = cyclic_truncation(4);
        let od = orbit_data(&t, c(0.0, 1.0), 1e-9).unwrap();
        // Elements {e, g1} lack g1^-1, so the truncation is not closed.
        let open = Truncation::from_elements(t.elements()[..2].to_vec(), 1, 1e-9);
        assert!(!open.inverse_closed());
        assert!(matches!(
            martin_derivative(&od, &open, c(0.2, 0.2), DerivativeForm::AtPoint),
            Err(OrbitError::NotInverseClosed)
        ));
    }

    #[test]
    fn green_blaschke_trivial_group_is_z() {
        let t = trivial_truncation();
        let z = c(0.3, 0.2);
        assert!((green_blaschke(&t, c(0.0, 0.0), z).unwrap() - z).norm() < 1e-15);
    }

    #[test]
    fn green_blaschke_vanishes_on_orbit_and_is_contractive() {
        let t = cyclic_truncation(5);
        let z0 = c(0.25, -0.1);
        for e in t.elements() {
            let w = e.map.apply(z0).unwrap();
            assert!(green_blaschke(&t, z0, w).unwrap().norm() < 1e-12);
        }
        for k in 0..25 {
            let z = Complex64::from_polar(0.035 * k as f64, 0.9 * k as f64);
            assert!(green_blaschke(&t, z0, z).unwrap().norm() <= 1.0 + 1e-12);
        }
        // Positive at the origin by the factor normalization.
        let g0 = green_blaschke(&t, z0, c(0.0, 0.0)).unwrap();
        assert!(g0.im.abs() < 1e-14 && g0.re > 0.0);
    }

    #[test]
    fn widom_integral_trivial_cases() {
        let t0 = c(0.6, 0.8);
        let od = orbit_data(&trivial_truncation(), t0, 1e-9).unwrap();
        let rep = widom_log_integral(&od, 256, 1e-8);
        assert!(rep.value.abs() < 1e-13, "mean of -log|t - t0|^2 is 0");
        assert!(rep.converged);

        // Doubling the weight shifts the mean by exactly log 2.
        let doubled = OrbitData::from_rows(
            t0,
            vec![OrbitRow {
                word_len: 0,
                image: t0,
                deriv: c(1.0, 0.0),
                absderiv: 2.0,
            }],
        );
        let rep2 = widom_log_integral(&doubled, 256, 1e-8);
        assert!((rep2.value - std::f64::consts::LN_2).abs() < 1e-13);
    }

    #[test]
    fn widom_integral_cyclic_is_refinement_stable() {
        let od = orbit_data(&cyclic_truncation(10), c(0.0, 1.0), 1e-9).unwrap();
        let rep = widom_log_integral(&od, 1024, 1e-8);
        assert!(rep.value.is_finite());
        assert!(rep.tail_estimate <= 1e-6, "delta {}", rep.tail_estimate);
        assert!(rep.converged);
    }

    #[test]
    fn tail_estimate_brackets_true_remainder() {
        let t0 = c(0.0, 1.0);
        let coarse = orbit_data(&cyclic_truncation(10), t0, 1e-9).unwrap();
        let fine = orbit_data(&cyclic_truncation(24), t0, 1e-9).unwrap();
        let sum = |od: &OrbitData| -> f64 { od.rows().iter().map(|r| r.absderiv).sum() };
        let remainder = sum(&fine) - sum(&coarse);
        assert!(remainder > 0.0);
        assert!(coarse.tail_estimate() >= 0.5 * remainder);
        assert!(coarse.tail_estimate() <= 4.0 * remainder);
        assert!(fine.tail_estimate() < coarse.tail_estimate());
    }

    #[test]
    fn frostman_sums_match_closed_forms() {
        let t = c(1.0, 0.0);
        let r1 = frostman_blaschke(&[c(0.5, 0.0)], t).unwrap();
        assert!((r1.sum - 3.0).abs() < 1e-15);
        let r2 = frostman_blaschke(&[c(0.5, 0.0), c(-0.5, 0.0)], t).unwrap();
        assert!((r2.sum - 10.0 / 3.0).abs() < 1e-15);
        let r3 = frostman_blaschke(&[c(0.0, 0.0)], t).unwrap();
        assert!((r3.sum - 1.0).abs() < 1e-15);
        assert!((r2.boundary_value.norm() - 1.0).abs() < 1e-14);
        assert!(matches!(
            frostman_blaschke(&[c(1.0, 0.0)], t),
            Err(OrbitError::ZeroOnBoundary { .. })
        ));
    }

    #[test]
    fn herglotz_boundary_closed_forms() {
        let u = HerglotzAtoms::new(vec![(c(-1.0, 0.0), 1.0)]).unwrap();
        let b = u.boundary(c(1.0, 0.0), 1e-9).unwrap();
        assert!(b.value.norm() < 1e-15);
        assert!((b.derivative - c(0.0, -0.5)).norm() < 1e-15);

        let v = HerglotzAtoms::new(vec![(c(0.0, 1.0), 2.0)]).unwrap();
        let bv = v.boundary(c(1.0, 0.0), 1e-9).unwrap();
        assert!((bv.value - c(2.0, 0.0)).norm() < 1e-15);
        assert!((bv.derivative - c(0.0, -2.0)).norm() < 1e-15);

        assert!(matches!(
            u.boundary(c(-1.0, 0.0), 1e-9),
            Err(OrbitError::AtomCollision { .. })
        ));
    }

    #[test]
    fn smalloh_synthetic_antipodal_row() {
        let t0 = c(0.0, 1.0);
        let od = OrbitData::from_rows(
            t0,
            vec![
                OrbitRow {
                    word_len: 0,
                    image: t0,
                    deriv: c(1.0, 0.0),
                    absderiv: 1.0,
                },
                OrbitRow {
                    word_len: 1,
                    image: -t0,
                    deriv: c(1.0, 0.0),
                    absderiv: 1.0,
                },
            ],
        );
        let radii: Vec<f64> = (2..=12).map(|k| 1.0 - 0.5_f64.powi(k)).collect();
        let rep = od.smalloh_check(&radii, 1e-3);
        for (q, &r) in rep.partial_sums.iter().zip(&radii) {
            let expect = (1.0 - r) / (1.0 + r).powi(2);
            assert!((q - expect).abs() < 1e-14);
        }
        assert!(rep.converged);
    }

    #[test]
    fn smalloh_cyclic_truncation_converges() {
        let od = orbit_data(&cyclic_truncation(10), c(0.0, 1.0), 1e-9).unwrap();
        let radii: Vec<f64> = (2..=12).map(|k| 1.0 - 0.5_f64.powi(k)).collect();
        let rep = od.smalloh_check(&radii, 1e-3);
        assert!(rep.converged, "q at last radius {}", rep.value);
    }
}
