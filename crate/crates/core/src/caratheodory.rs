//! Boundary derivatives of Schur functions.
//!
//! Radial and nontangential limits are estimated from samples along rays
//! z = t (1 - h e^{i sigma}) with geometrically halving h, accelerated by
//! a Richardson table. On top of that sit the four classical expressions
//! for the angular derivative of a Schur function and the quadrature
//! identity tying the boundary derivative to two circle integrals. The
//! last two operations feed those limits into the constrained kernel
//! solver: a slack sweep of the shift inequality and a comparison of the
//! inner-factor derivative bound against its attained supremum.

use crate::group::{Character, GroupPresentation, Truncation};
use crate::hardy::{interior_samples, BoundaryGrid, FactoredDerivative};
use crate::kernels::{
    character_key, dct_test, kernel_upper_bound_check, BoundaryKernelEngine, CharacterLattice,
    KernelError, KernelProblem,
};
use crate::orbit::{self, OrbitError};
use crate::theta::ThetaError;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CaratheodoryError {
    #[error("sample sequence does not converge (differences {first:.3e} -> {last:.3e})")]
    Divergent { first: f64, last: f64 },
    #[error("sample {index} is not finite")]
    NonFiniteSample { index: usize },
    #[error("need at least {need} samples, got {got}")]
    TooFewSamples { need: usize, got: usize },
    #[error("function exceeds the Schur bound at {point}: |w| = {modulus}")]
    NotSchur { point: Complex64, modulus: f64 },
    #[error("point {point} is not on the unit circle")]
    NotUnimodular { point: Complex64 },
    #[error(transparent)]
    Orbit(#[from] OrbitError),
}

/// Extrapolated limit with a two-diagonal error estimate.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct LimitEstimate {
    #[serde(serialize_with = "crate::report::complex_pair")]
    pub value: Complex64,
    pub error_bar: f64,
}

/// Approach sequence z_k = t (1 - h_k e^{i sigma}) with h_k = 2^{-k}.
#[derive(Debug, Clone)]
pub struct NtSequence {
    t: Complex64,
    toward: Complex64,
    offsets: Vec<f64>,
    points: Vec<Complex64>,
}

impl NtSequence {
    fn new(t: Complex64, sigma: f64, k0: u32, count: usize) -> Result<Self, CaratheodoryError> {
        if (t.norm() - 1.0).abs() > 1e-12 {
            return Err(CaratheodoryError::NotUnimodular { point: t });
        }
        assert!(
            sigma.abs() < std::f64::consts::FRAC_PI_2,
            "approach direction must enter the disk"
        );
        let toward = t * Complex64::from_polar(1.0, sigma);
        let offsets: Vec<f64> = (0..count).map(|k| 0.5_f64.powi(k0 as i32 + k as i32)).collect();
        let points = offsets.iter().map(|&h| t - toward * h).collect();
        Ok(NtSequence {
            t,
            toward,
            offsets,
            points,
        })
    }

    /// Radial approach, sigma = 0.
    pub fn radial(t: Complex64, k0: u32, count: usize) -> Result<Self, CaratheodoryError> {
        Self::new(t, 0.0, k0, count)
    }

    /// Ray tilted by `sigma` against the inward radius; |sigma| below
    /// pi/2 keeps the ray in a Stolz angle.
    pub fn stolz_ray(
        t: Complex64,
        sigma: f64,
        k0: u32,
        count: usize,
    ) -> Result<Self, CaratheodoryError> {
        Self::new(t, sigma, k0, count)
    }

    pub fn target(&self) -> Complex64 {
        self.t
    }

    /// Unit vector from the points toward the target.
    pub fn toward(&self) -> Complex64 {
        self.toward
    }

    pub fn offsets(&self) -> &[f64] {
        &self.offsets
    }

    pub fn points(&self) -> &[Complex64] {
        &self.points
    }

    pub fn evaluate<F: Fn(Complex64) -> Complex64>(&self, f: F) -> Vec<Complex64> {
        self.points.iter().map(|&z| f(z)).collect()
    }
}

/// Richardson limit of samples v_k = L + c_1 h_k + c_2 h_k^2 + ... taken
/// at geometrically halving offsets h_k.
///
/// `noise_floor` is the absolute size of fluctuations to treat as
/// rounding noise rather than divergence; boundary evaluations carry
/// noise of order eps / h, difference quotients eps / h^2.
pub fn limit_from_samples(
    values: &[Complex64],
    noise_floor: f64,
) -> Result<LimitEstimate, CaratheodoryError> {
    let n = values.len();
    if n < 3 {
        return Err(CaratheodoryError::TooFewSamples { need: 3, got: n });
    }
    for (index, v) in values.iter().enumerate() {
        if !v.re.is_finite() || !v.im.is_finite() {
            return Err(CaratheodoryError::NonFiniteSample { index });
        }
    }
    let scale = values.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let floor = noise_floor.max(2e-11 * scale).max(1e-300);
    let diffs: Vec<f64> = values.windows(2).map(|w| (w[1] - w[0]).norm()).collect();
    let first = diffs[0];
    let last = diffs[diffs.len() - 1];
    if last <= floor {
        let tail_mean = (values[n - 3] + values[n - 2] + values[n - 1]) / 3.0;
        return Ok(LimitEstimate {
            value: tail_mean,
            error_bar: last + floor,
        });
    }
    if last > 0.75 * first.max(floor) {
        return Err(CaratheodoryError::Divergent { first, last });
    }

    let mut row: Vec<Complex64> = values.to_vec();
    let mut prev_diag = row[row.len() - 1];
    let mut diag = prev_diag;
    for m in 1..n {
        let factor = 2.0_f64.powi(m as i32);
        let mut next = Vec::with_capacity(row.len() - 1);
        for k in 0..row.len() - 1 {
            next.push((factor * row[k + 1] - row[k]) / (factor - 1.0));
        }
        prev_diag = diag;
        diag = next[next.len() - 1];
        row = next;
    }
    Ok(LimitEstimate {
        value: diag,
        error_bar: (diag - prev_diag).norm() + 1e-15 * scale,
    })
}

/// f'(t) from samples along an approach sequence, as the Richardson limit
/// of difference quotients.
pub fn derivative_from_samples(
    seq: &NtSequence,
    values: &[Complex64],
) -> Result<LimitEstimate, CaratheodoryError> {
    let n = values.len();
    if n < 4 {
        return Err(CaratheodoryError::TooFewSamples { need: 4, got: n });
    }
    let h = seq.offsets();
    let mut quotients = Vec::with_capacity(n - 1);
    let mut gap_min = f64::INFINITY;
    for k in 0..n - 1 {
        let gap = h[k] - h[k + 1];
        gap_min = gap_min.min(gap);
        quotients.push((values[k + 1] - values[k]) / gap);
    }
    // Evaluation noise in f is amplified by 1/gap in the quotients, so the
    // deepest quotients can fluctuate even when the limit exists. Take the
    // deepest prefix whose extrapolation still converges; only a sequence
    // divergent from the start is an error.
    let vmax = values.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let noise = 16.0 * f64::EPSILON * vmax / (h[n - 1] * gap_min);
    let mut best: Option<LimitEstimate> = None;
    let mut last_err = None;
    for end in 3..=quotients.len() {
        match limit_from_samples(&quotients[..end], noise) {
            Ok(est) => best = Some(est),
            Err(e @ CaratheodoryError::Divergent { .. }) => {
                last_err = Some(e);
                break;
            }
            Err(e) => return Err(e),
        }
    }
    let lim = match best {
        Some(est) => est,
        None => return Err(last_err.expect("divergent before any prefix converged")),
    };
    // The quotient limit is t e^{i sigma} f'(t).
    Ok(LimitEstimate {
        value: lim.value * seq.toward().conj(),
        error_bar: lim.error_bar,
    })
}

/// Nontangential limit of `f` at `t`: the radial estimate together with
/// the spread across a fan of Stolz rays.
#[derive(Debug, Clone, Serialize)]
pub struct AngularLimit {
    #[serde(serialize_with = "crate::report::complex_pair")]
    pub value: Complex64,
    pub error_bar: f64,
    pub ray_values: Vec<LimitEstimate>,
    pub ray_spread: f64,
}

pub fn angular_limits<F: Fn(Complex64) -> Complex64>(
    f: F,
    t: Complex64,
    aperture: f64,
    k0: u32,
    count: usize,
) -> Result<AngularLimit, CaratheodoryError> {
    let sigmas = [0.0, -0.5 * aperture, 0.5 * aperture, -0.95 * aperture, 0.95 * aperture];
    let mut ray_values = Vec::with_capacity(sigmas.len());
    for &sigma in &sigmas {
        let seq = NtSequence::stolz_ray(t, sigma, k0, count)?;
        ray_values.push(limit_from_samples(&seq.evaluate(&f), 2e-11)?);
    }
    let mut ray_spread = 0.0_f64;
    for a in &ray_values {
        for b in &ray_values {
            ray_spread = ray_spread.max((a.value - b.value).norm());
        }
    }
    Ok(AngularLimit {
        value: ray_values[0].value,
        error_bar: ray_values[0].error_bar,
        ray_values,
        ray_spread,
    })
}

/// The four angular-derivative expressions for a Schur function at a
/// boundary point, plus the circle-quadrature identity residual.
#[derive(Debug, Clone, Serialize)]
pub struct CjReport {
    /// Worst (smallest) ray limit of (1 - |w|^2) / (1 - |z|^2) over a
    /// Stolz fan.
    pub d1: f64,
    /// Radial limit of the same ratio.
    pub d2: f64,
    /// Radial limit of (1 - w conj(w_t)) / (1 - z conj(t)).
    #[serde(serialize_with = "crate::report::complex_pair")]
    pub d3: Complex64,
    /// Radial limit of the invariant difference quotient ratio.
    pub d4: f64,
    /// t w'(t) conj(w_t) from extrapolated difference quotients.
    #[serde(serialize_with = "crate::report::complex_pair")]
    pub derivative: Complex64,
    #[serde(serialize_with = "crate::report::complex_pair")]
    pub boundary_value: Complex64,
    /// Max excess of the invariant quotient over d4 on an interior grid;
    /// stays at roundoff level for a Schur function.
    pub julia_excess: f64,
    /// |i1 + i2 - Re derivative|.
    pub identity_residual: f64,
    pub i1: f64,
    pub i2: f64,
}

fn schur_guard(
    w: Complex64,
    z: Complex64,
    tol_schur: f64,
) -> Result<Complex64, CaratheodoryError> {
    let modulus = w.norm();
    if modulus > 1.0 + tol_schur {
        return Err(CaratheodoryError::NotSchur { point: z, modulus });
    }
    Ok(w)
}

/// Invariant quotient |w - w_t|^2 (1 - |z|^2) / (|z - t|^2 (1 - |w|^2));
/// bounded by the angular derivative for Schur w. Both factors vanish for
/// unimodular constant w, which counts as quotient zero.
fn julia_quotient(w: Complex64, z: Complex64, w_t: Complex64, t: Complex64) -> f64 {
    let num = (w - w_t).norm_sqr() / (z - t).norm_sqr();
    let den = (1.0 - w.norm_sqr()) / (1.0 - z.norm_sqr());
    if den <= 0.0 {
        return if num == 0.0 { 0.0 } else { f64::INFINITY };
    }
    num / den
}

/// Computes the four derivative expressions of the Schur function `w` at
/// the boundary point `t` plus the quadrature identity terms.
///
/// `w_t` is the boundary value; when absent it is extrapolated radially.
pub fn cj_quantities<F: Fn(Complex64) -> Complex64>(
    w: F,
    t: Complex64,
    w_t: Option<Complex64>,
    grid_size: usize,
    tol_schur: f64,
) -> Result<CjReport, CaratheodoryError> {
    let count = 10;
    let radial = NtSequence::radial(t, 4, count)?;
    let radial_w: Vec<Complex64> = radial
        .points()
        .iter()
        .map(|&z| schur_guard(w(z), z, tol_schur))
        .collect::<Result<_, _>>()?;
    let boundary_value = match w_t {
        Some(v) => v,
        None => limit_from_samples(&radial_w, 2e-11)?.value,
    };

    let ratio = |z: Complex64, wz: Complex64| {
        Complex64::new((1.0 - wz.norm_sqr()) / (1.0 - z.norm_sqr()), 0.0)
    };

    // d1: worst ray of the Stolz fan.
    let aperture = std::f64::consts::FRAC_PI_4;
    let mut d1 = f64::INFINITY;
    for sigma in [0.0, -0.5 * aperture, 0.5 * aperture, -0.9 * aperture, 0.9 * aperture] {
        let seq = NtSequence::stolz_ray(t, sigma, 4, count)?;
        let samples: Vec<Complex64> = seq
            .points()
            .iter()
            .map(|&z| schur_guard(w(z), z, tol_schur).map(|wz| ratio(z, wz)))
            .collect::<Result<_, _>>()?;
        d1 = d1.min(limit_from_samples(&samples, 2e-11)?.value.re);
    }

    // d2: radial limit of the same ratio.
    let d2_samples: Vec<Complex64> = radial
        .points()
        .iter()
        .zip(&radial_w)
        .map(|(&z, &wz)| ratio(z, wz))
        .collect();
    let d2 = limit_from_samples(&d2_samples, 2e-11)?.value.re;

    // d3: radial limit of (1 - w conj(w_t)) / (1 - z conj(t)).
    let d3_samples: Vec<Complex64> = radial
        .points()
        .iter()
        .zip(&radial_w)
        .map(|(&z, &wz)| {
            (Complex64::new(1.0, 0.0) - wz * boundary_value.conj())
                / (Complex64::new(1.0, 0.0) - z * t.conj())
        })
        .collect();
    let d3 = limit_from_samples(&d3_samples, 2e-11)?.value;

    // d4: radial limit of the invariant quotient, plus a grid scan for
    // violations of its global bound.
    let d4_samples: Vec<Complex64> = radial
        .points()
        .iter()
        .zip(&radial_w)
        .map(|(&z, &wz)| Complex64::new(julia_quotient(wz, z, boundary_value, t), 0.0))
        .collect();
    let d4 = limit_from_samples(&d4_samples, 2e-11)?.value.re;
    let mut julia_excess = f64::NEG_INFINITY;
    for i in 0..60 {
        let r = 0.15 + 0.8 * (i as f64) / 59.0;
        let z = Complex64::from_polar(r, 2.39996322972865 * i as f64);
        let wz = schur_guard(w(z), z, tol_schur)?;
        julia_excess = julia_excess.max(julia_quotient(wz, z, boundary_value, t) - d4);
    }

    let derivative =
        derivative_from_samples(&radial, &radial_w)?.value * t * boundary_value.conj();

    // Circle quadrature of the two identity integrals on a grid avoiding t.
    let offset = orbit::clearance_offset(grid_size, &[t]);
    let mut i1 = 0.0;
    let mut i2 = 0.0;
    for j in 0..grid_size {
        let tj = Complex64::from_polar(
            1.0,
            std::f64::consts::TAU * j as f64 / grid_size as f64 + offset,
        );
        let wj = schur_guard(w(tj), tj, tol_schur)?;
        let d2j = (tj - t).norm_sqr();
        i1 += ((wj - boundary_value) / (tj - t)).norm_sqr();
        i2 += (1.0 - wj.norm_sqr()).max(0.0) / d2j;
    }
    i1 /= grid_size as f64;
    i2 /= grid_size as f64;
    let identity_residual = (i1 + i2 - derivative.re).abs();

    Ok(CjReport {
        d1,
        d2,
        d3,
        d4,
        derivative,
        boundary_value,
        julia_excess,
        identity_residual,
        i1,
        i2,
    })
}

/// Partial angular-derivative sums of a growing Blaschke product.
#[derive(Debug, Clone, Serialize)]
pub struct FrostmanMonotone {
    pub partial_sums: Vec<f64>,
    pub monotone: bool,
    pub final_value: f64,
}

/// Evaluates the Frostman sum for each prefix of `zeros`; the sums must
/// be strictly increasing since every term is positive.
pub fn frostman_monotone_check(
    zeros: &[Complex64],
    t: Complex64,
) -> Result<FrostmanMonotone, CaratheodoryError> {
    let mut partial_sums = Vec::with_capacity(zeros.len());
    for n in 1..=zeros.len() {
        partial_sums.push(orbit::frostman_blaschke(&zeros[..n], t)?.sum);
    }
    let monotone = partial_sums.windows(2).all(|w| w[1] > w[0]);
    Ok(FrostmanMonotone {
        final_value: partial_sums.last().copied().unwrap_or(0.0),
        partial_sums,
        monotone,
    })
}

#[derive(Debug, Error)]
pub enum MainInequalityError {
    #[error("function is not automorphic for the shift character: residual {residual:.3e} exceeds {tol:.1e}")]
    NotAutomorphic { residual: f64, tol: f64 },
    #[error("boundary value has modulus {modulus}, expected 1")]
    NotUnimodularBoundary { modulus: f64 },
    #[error(transparent)]
    Evaluation(#[from] ThetaError),
    #[error(transparent)]
    Limit(#[from] CaratheodoryError),
    #[error(transparent)]
    Kernel(#[from] KernelError),
}

/// One character of the shift-inequality sweep.
#[derive(Debug, Clone, Serialize)]
pub struct MainInequalityRow {
    #[serde(serialize_with = "crate::report::complex_pair_vec")]
    pub character: Vec<Complex64>,
    pub objective_shifted: f64,
    pub objective: f64,
    /// Re(t0 w'(t0)/w(t0)) - (objective_shifted - objective).
    pub slack: f64,
    /// Quadrature of |h_shifted - w conj(w0) h - conj(w0)(w - w0)/(t - t0)|^2,
    /// the sign-definite form bounded by the slack.
    pub lhs_form: f64,
    /// Quadrature of (1 - |w|^2) |k|^2 / |t - t0|^2, the mass the slack
    /// carries beyond the form; zero exactly when w is inner.
    pub defect_form: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct MainInequalityReport {
    /// t0 w'(t0) conj(w(t0)) from extrapolated difference quotients.
    #[serde(serialize_with = "crate::report::complex_pair")]
    pub ratio: Complex64,
    #[serde(serialize_with = "crate::report::complex_pair")]
    pub boundary_value: Complex64,
    pub min_slack: f64,
    pub min_lhs_form: f64,
    /// Worst |slack - lhs_form - defect_form| across the sweep, a
    /// discretization gauge for the identity behind the inequality.
    pub identity_gap: f64,
    pub pass: bool,
    pub rows: Vec<MainInequalityRow>,
}

/// Checks the shift inequality: for a beta-automorphic Schur function w
/// with a finite boundary derivative at t0, every character alpha obeys
/// Re(t0 w'(t0)/w(t0)) >= objective(alpha beta) - objective(alpha).
///
/// Automorphy of `w` is screened on interior samples, the boundary value
/// and derivative come from radial extrapolation, and each lattice
/// character contributes a slack row together with the divided-difference
/// quadrature of the sign-definite form behind the inequality. `pass`
/// requires every slack and form value to clear -tol_slack. The radial
/// data is extrapolated directly rather than through `cj_quantities`:
/// averaged functions carry an evaluation floor from the sampled inner
/// factor, and the squared-modulus ratios amplify it by 1/h into false
/// divergence, while the value and quotient limits stay clean.
#[allow(clippy::too_many_arguments)]
pub fn main_inequality_check<W>(
    w: W,
    presentation: &GroupPresentation,
    beta: &Character,
    t0: Complex64,
    grid: &BoundaryGrid,
    coeff_count: usize,
    character_samples: usize,
    tol_map: f64,
    tol_auto: f64,
    tol_limit: f64,
    tol_slack: f64,
) -> Result<MainInequalityReport, MainInequalityError>
where
    W: Fn(Complex64) -> Result<Complex64, ThetaError> + Sync,
{
    if beta.rank() != presentation.rank() {
        return Err(MainInequalityError::Kernel(
            KernelError::CharacterRankMismatch {
                expected: presentation.rank(),
                got: beta.rank(),
            },
        ));
    }
    let samples = interior_samples(16);
    let mut residual = 0.0_f64;
    for (g, &bv) in presentation.generators().iter().zip(beta.values()) {
        for &z in &samples {
            let moved = g.map.apply(z).map_err(ThetaError::from)?;
            residual = residual.max((w(moved)? - bv * w(z)?).norm());
        }
    }
    if residual > tol_auto {
        return Err(MainInequalityError::NotAutomorphic {
            residual,
            tol: tol_auto,
        });
    }

    let radial = NtSequence::radial(t0, 4, 10)?;
    let radial_w: Vec<Complex64> = radial
        .points()
        .iter()
        .map(|&z| w(z))
        .collect::<Result<_, _>>()?;
    let w0 = limit_from_samples(&radial_w, 2e-11)?.value;
    let modulus = w0.norm();
    if (modulus - 1.0).abs() > tol_limit {
        return Err(MainInequalityError::NotUnimodularBoundary { modulus });
    }
    let ratio = derivative_from_samples(&radial, &radial_w)?.value * t0 * w0.conj();

    // One solve per distinct character among the lattice and its shifts.
    let lattice = CharacterLattice::new(presentation, character_samples)?;
    let problem = KernelProblem::new(
        presentation.clone(),
        Character::identity(presentation.rank()),
        t0,
        grid.clone(),
        coeff_count,
        tol_map,
        tol_auto,
    )?;
    let engine = BoundaryKernelEngine::new(&problem)?;
    let mut wanted: BTreeMap<Vec<(u64, u64)>, Character> = BTreeMap::new();
    for alpha in lattice.characters() {
        wanted
            .entry(character_key(alpha))
            .or_insert_with(|| alpha.clone());
        let shifted = beta.product(alpha);
        wanted.entry(character_key(&shifted)).or_insert(shifted);
    }
    let solved = wanted
        .par_iter()
        .map(|(key, alpha)| engine.solve(alpha, tol_auto).map(|sol| (key.clone(), sol)))
        .collect::<Result<BTreeMap<_, _>, KernelError>>()?;

    let nodes = grid.points();
    let w_vals: Vec<Complex64> = nodes
        .iter()
        .map(|&tj| w(tj))
        .collect::<Result<_, _>>()?;
    for (&tj, wv) in nodes.iter().zip(&w_vals) {
        if wv.norm() > 1.0 + tol_limit {
            return Err(CaratheodoryError::NotSchur {
                point: tj,
                modulus: wv.norm(),
            }
            .into());
        }
    }
    let mut rows = Vec::with_capacity(lattice.len());
    for alpha in lattice.characters() {
        let shifted = beta.product(alpha);
        let sol = &solved[&character_key(alpha)];
        let sol_shifted = &solved[&character_key(&shifted)];
        let mut acc = 0.0;
        let mut defect = 0.0;
        for (j, &tj) in nodes.iter().enumerate() {
            let dw = (w_vals[j] - w0) / (tj - t0);
            let ha = sol.h.eval(tj);
            let term = sol_shifted.h.eval(tj) - w_vals[j] * w0.conj() * ha - w0.conj() * dw;
            acc += term.norm_sqr();
            let k = Complex64::new(1.0, 0.0) + (tj - t0) * ha;
            defect += (1.0 - w_vals[j].norm_sqr()) * k.norm_sqr() / (tj - t0).norm_sqr();
        }
        rows.push(MainInequalityRow {
            character: alpha.values().to_vec(),
            objective_shifted: sol_shifted.objective,
            objective: sol.objective,
            slack: ratio.re - (sol_shifted.objective - sol.objective),
            lhs_form: acc / nodes.len() as f64,
            defect_form: defect / nodes.len() as f64,
        });
    }
    let min_slack = rows.iter().map(|r| r.slack).fold(f64::INFINITY, f64::min);
    let min_lhs_form = rows
        .iter()
        .map(|r| r.lhs_form)
        .fold(f64::INFINITY, f64::min);
    let identity_gap = rows
        .iter()
        .map(|r| (r.slack - r.lhs_form - r.defect_form).abs())
        .fold(0.0_f64, f64::max);
    Ok(MainInequalityReport {
        ratio,
        boundary_value: w0,
        min_slack,
        min_lhs_form,
        identity_gap,
        pass: min_slack >= -tol_slack && min_lhs_form >= -tol_slack,
        rows,
    })
}

/// Side-by-side of the attainable objective supremum and two estimates of
/// the boundary log-derivative of the inner factor.
#[derive(Debug, Clone, Serialize)]
pub struct BoundComparisonReport {
    /// Largest solved objective over the lattice and the measured
    /// inner-factor character.
    pub sup_objective: f64,
    /// Radial extrapolation of t0 Delta'(t0)/Delta(t0).
    pub bound_radial: f64,
    pub bound_radial_error_bar: f64,
    /// Circle quadrature of |(Delta conj(d0) - 1)/(t - t0)|^2, the same
    /// derivative through the boundary identity; shares the grid and the
    /// truncation with the solver, so it carries no extrapolation bias.
    pub bound_quadrature: f64,
    /// bound_quadrature - sup_objective.
    pub gap: f64,
    pub dct_pass: bool,
    /// Vacuous when the density test fails; otherwise |gap| <= tol_id.
    pub pass: bool,
}

/// Tabulates sup over characters of the kernel objective next to the
/// boundary log-derivative of the inner factor, estimated radially and by
/// circle quadrature. Under a passing density test the supremum is
/// attained and the quadrature gap closes to discretization error.
#[allow(clippy::too_many_arguments)]
pub fn bound_comparison(
    presentation: &GroupPresentation,
    trunc: &Truncation,
    fact: &FactoredDerivative,
    grid: &BoundaryGrid,
    coeff_count: usize,
    character_samples: usize,
    probes: usize,
    tol_map: f64,
    tol_auto: f64,
    tol_char: f64,
    tol_dct: f64,
    tol_id: f64,
) -> Result<BoundComparisonReport, KernelError> {
    let chain = kernel_upper_bound_check(
        presentation,
        trunc,
        fact,
        grid,
        coeff_count,
        character_samples,
        tol_map,
        tol_auto,
        tol_id,
    )?;
    let dct = dct_test(
        presentation,
        fact,
        grid,
        coeff_count,
        probes,
        tol_map,
        tol_auto,
        tol_char,
        tol_dct,
    )?;
    let sup_objective = chain.sup_objective.max(dct.objective);
    let gap = dct.candidate_objective - sup_objective;
    Ok(BoundComparisonReport {
        sup_objective,
        bound_radial: chain.bound,
        bound_radial_error_bar: chain.bound_error_bar,
        bound_quadrature: dct.candidate_objective,
        gap,
        dct_pass: dct.pass,
        pass: !dct.pass || gap.abs() <= tol_id,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn richardson_recovers_polynomial_limits() {
        // v(h) = 3 - 2h + 5h^2 at h = 2^-k.
        let samples: Vec<Complex64> = (4..12)
            .map(|k| {
                let h = 0.5_f64.powi(k);
                c(3.0 - 2.0 * h + 5.0 * h * h, 0.0)
            })
            .collect();
        let lim = limit_from_samples(&samples, 2e-11).unwrap();
        assert!((lim.value - c(3.0, 0.0)).norm() < 1e-13);
        assert!(lim.error_bar < 1e-10);
    }

    #[test]
    fn richardson_flags_divergence_and_nan() {
        let log_div: Vec<Complex64> = (1..10).map(|k| c(k as f64, 0.0)).collect();
        assert!(matches!(
            limit_from_samples(&log_div, 2e-11),
            Err(CaratheodoryError::Divergent { .. })
        ));
        let with_nan = vec![c(1.0, 0.0), c(f64::NAN, 0.0), c(1.0, 0.0)];
        assert!(matches!(
            limit_from_samples(&with_nan, 2e-11),
            Err(CaratheodoryError::NonFiniteSample { index: 1 })
        ));
        let constant = vec![c(2.0, -1.0); 6];
        let lim = limit_from_samples(&constant, 2e-11).unwrap();
        assert_eq!(lim.value, c(2.0, -1.0));
    }

    #[test]
    fn radial_derivative_matches_cubic() {
        let t = Complex64::from_polar(1.0, 0.7);
        let seq = NtSequence::radial(t, 4, 10).unwrap();
        let values = seq.evaluate(|z| z * z * z);
        let d = derivative_from_samples(&seq, &values).unwrap();
        assert!((d.value - 3.0 * t * t).norm() < 1e-9);
    }

    #[test]
    fn angular_limit_of_rational_function() {
        let t = c(0.0, 1.0);
        let f = |z: Complex64| (1.0 + z) / (1.0 - 0.5 * z);
        let lim = angular_limits(f, t, std::f64::consts::FRAC_PI_4, 4, 10).unwrap();
        let expect = (1.0 + t) / (1.0 - 0.5 * t);
        assert!((lim.value - expect).norm() < 1e-10);
        assert!(lim.ray_spread < 1e-9);

        // A pole at the target diverges along every ray.
        let pole = |z: Complex64| 1.0 / (1.0 - z * t.conj());
        assert!(matches!(
            angular_limits(pole, t, std::f64::consts::FRAC_PI_4, 4, 10),
            Err(CaratheodoryError::Divergent { .. })
        ));
    }

    #[test]
    fn cj_identity_map_is_exactly_one() {
        let t = Complex64::from_polar(1.0, 0.3);
        let r = cj_quantities(|z| z, t, Some(t), 512, 1e-9).unwrap();
        assert!((r.d1 - 1.0).abs() < 1e-9);
        assert!((r.d2 - 1.0).abs() < 1e-9);
        assert!((r.d3 - c(1.0, 0.0)).norm() < 1e-9);
        assert!((r.d4 - 1.0).abs() < 1e-9);
        assert!((r.derivative - c(1.0, 0.0)).norm() < 1e-9);
        assert!((r.i1 - 1.0).abs() < 1e-13);
        assert!(r.i2.abs() < 1e-13);
        assert!(r.identity_residual < 1e-9);
        assert!(r.julia_excess < 1e-9);
    }

    #[test]
    fn cj_unimodular_constant_is_zero() {
        let t = c(1.0, 0.0);
        let w0 = Complex64::from_polar(1.0, 1.1);
        let r = cj_quantities(|_| w0, t, Some(w0), 256, 1e-9).unwrap();
        // The ratio samples are rounding noise of size eps / (1 - r^2).
        assert!(r.d1.abs() < 1e-11);
        assert!(r.d2.abs() < 1e-11);
        assert!(r.d3.norm() < 1e-11);
        assert!(r.d4.abs() < 1e-15);
        assert!(r.derivative.norm() < 1e-15);
        assert!(r.identity_residual < 1e-13);
    }

    #[test]
    fn cj_powers_and_blaschke_match_closed_forms() {
        let t = Complex64::from_polar(1.0, -0.4);
        let r2 = cj_quantities(|z| z * z, t, Some(t * t), 1024, 1e-9).unwrap();
        for v in [r2.d1, r2.d2, r2.d3.re, r2.d4, r2.derivative.re, r2.i1 + r2.i2] {
            assert!((v - 2.0).abs() < 1e-7, "expected 2, got {v}");
        }

        // Single Blaschke factor with zero 0.5: derivative 3 at t = 1.
        let b = |z: Complex64| (0.5 - z) / (1.0 - 0.5 * z);
        let t1 = c(1.0, 0.0);
        let r = cj_quantities(b, t1, Some(b(t1)), 1024, 1e-9).unwrap();
        assert!((r.d2 - 3.0).abs() < 1e-7);
        assert!((r.derivative.re - 3.0).abs() < 1e-7);
        assert!((r.d1 - r.d2).abs() < 1e-8);
        assert!((r.d3.re - r.d2).abs() < 1e-8);
        assert!((r.d4 - r.d2).abs() < 1e-8);
        assert!(r.identity_residual < 1e-7);
    }

    #[test]
    fn cj_rejects_non_schur_functions() {
        let t = c(1.0, 0.0);
        assert!(matches!(
            cj_quantities(|z| 1.1 * z, t, None, 128, 1e-9),
            Err(CaratheodoryError::NotSchur { .. })
        ));
    }

    #[test]
    fn frostman_prefix_sums_are_monotone() {
        let zeros = [c(0.5, 0.0), c(-0.5, 0.0)];
        let r = frostman_monotone_check(&zeros, c(1.0, 0.0)).unwrap();
        assert!(r.monotone);
        assert!((r.partial_sums[0] - 3.0).abs() < 1e-14);
        assert!((r.final_value - 10.0 / 3.0).abs() < 1e-14);
    }
}
