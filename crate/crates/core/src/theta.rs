//! Character-twisted orbit averaging.
//!
//! The operator P^alpha averages a function over the group with character
//! weights and the kernel gamma'(t0) / (gamma(t0) - z)^2, whose plain sum
//! is m' up to the factor i t0. The average of any bounded analytic f is
//! alpha-automorphic; the average of Delta stays a Schur function, keeps
//! the boundary expansion of Delta at t0, and satisfies the two-integral
//! boundary identity checked by `theta_schur_report`. The interpolant
//! constructor multiplies Delta by a calibrated disk automorphism before
//! averaging, which shifts the boundary log-derivative by any requested
//! nonnegative amount.

use crate::caratheodory::{
    derivative_from_samples, limit_from_samples, CaratheodoryError, NtSequence,
};
use crate::group::{Character, GroupError, Truncation, Word};
use crate::hardy::{BoundaryGrid, FactoredDerivative, HardyError};
use crate::moebius::{MoebiusError, MoebiusMap};
use crate::orbit::{self, OrbitData, OrbitError, SeriesReport};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

/// Relative cancellation level at which the averaged denominator counts
/// as vanished.
const DENOM_GUARD: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum ThetaError {
    #[error("theta denominator vanishes at {point}")]
    DenominatorVanishes { point: Complex64 },
    #[error("small-oh diagnostic value {value:.3e} exceeds {tol:.1e}; expansion hypothesis unsupported")]
    AssumptionFailed { value: f64, tol: f64 },
    #[error("datum value has modulus {modulus}, expected 1")]
    DatumNotUnimodular { modulus: f64 },
    #[error("datum log-derivative has imaginary part {imag:.3e}")]
    DatumRatioNotReal { imag: f64 },
    #[error("datum log-derivative {ratio:.3e} is negative")]
    DatumRatioNegative { ratio: f64 },
    #[error("datum ratio {ratio} lies below the boundary log-derivative bound {bound}")]
    InfeasibleDatum { ratio: f64, bound: f64 },
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Orbit(#[from] OrbitError),
    #[error(transparent)]
    Map(#[from] MoebiusError),
    #[error(transparent)]
    Hardy(#[from] HardyError),
    #[error(transparent)]
    Limit(#[from] CaratheodoryError),
}

/// Which side of the change-of-index identity evaluates the average.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ThetaForm {
    /// sum conj(alpha(g)) f(g z) g'(z) / (g z - t0)^2, normalized.
    Pullback,
    /// sum alpha(g) f(g^-1 z) g'(t0) / (g(t0) - z)^2, normalized; equal
    /// to `Pullback` term for term on inverse-closed truncations.
    Pushforward,
}

#[derive(Debug, Clone)]
struct ThetaTerm {
    word: Word,
    map: MoebiusMap,
    inv: MoebiusMap,
    image: Complex64,
    deriv: Complex64,
    chi: Complex64,
}

/// A truncation with its orbit data at t0 and a character, precomputed
/// for repeated averaging.
#[derive(Debug, Clone)]
pub struct ThetaContext {
    terms: Vec<ThetaTerm>,
    od: OrbitData,
    alpha: Character,
    inverse_closed: bool,
}

impl ThetaContext {
    pub fn new(
        trunc: &Truncation,
        t0: Complex64,
        alpha: &Character,
        tol_map: f64,
    ) -> Result<Self, ThetaError> {
        let od = orbit::orbit_data(trunc, t0, tol_map)?;
        let mut terms = Vec::with_capacity(trunc.len());
        for (e, row) in trunc.elements().iter().zip(od.rows()) {
            terms.push(ThetaTerm {
                word: e.word.clone(),
                inv: e.map.inverse(),
                map: e.map.clone(),
                image: row.image,
                deriv: row.deriv,
                chi: alpha.eval(&e.word)?,
            });
        }
        Ok(ThetaContext {
            terms,
            od,
            alpha: alpha.clone(),
            inverse_closed: trunc.inverse_closed(),
        })
    }

    pub fn t0(&self) -> Complex64 {
        self.od.t0()
    }

    pub fn orbit(&self) -> &OrbitData {
        &self.od
    }

    pub fn character(&self) -> &Character {
        &self.alpha
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn inverse_closed(&self) -> bool {
        self.inverse_closed
    }

    /// The character-weighted average of `f` at z.
    pub fn theta<F>(&self, f: F, z: Complex64, form: ThetaForm) -> Result<Complex64, ThetaError>
    where
        F: Fn(Complex64) -> Result<Complex64, ThetaError>,
    {
        let t0 = self.t0();
        let mut num = Complex64::new(0.0, 0.0);
        let mut den = Complex64::new(0.0, 0.0);
        let mut gross = 0.0;
        for term in &self.terms {
            let (coeff, arg, chi) = match form {
                ThetaForm::Pullback => {
                    let gz = term.map.apply(z)?;
                    let d = gz - t0;
                    if d.norm() <= 1e-14 {
                        return Err(OrbitError::OrbitPointCollision { point: gz }.into());
                    }
                    (term.map.derivative(z)? / (d * d), gz, term.chi.conj())
                }
                ThetaForm::Pushforward => {
                    let d = term.image - z;
                    if d.norm() <= 1e-14 {
                        return Err(OrbitError::OrbitPointCollision { point: z }.into());
                    }
                    (term.deriv / (d * d), term.inv.apply(z)?, term.chi)
                }
            };
            num += chi * f(arg)? * coeff;
            den += coeff;
            gross += coeff.norm();
        }
        if den.norm() <= DENOM_GUARD * gross {
            return Err(ThetaError::DenominatorVanishes { point: z });
        }
        Ok(num / den)
    }

    /// The average of the factored boundary derivative.
    pub fn theta_delta(
        &self,
        fact: &FactoredDerivative,
        z: Complex64,
        form: ThetaForm,
    ) -> Result<Complex64, ThetaError> {
        self.theta(|u| fact.delta(u).map_err(ThetaError::from), z, form)
    }

    /// Median multiplier of z -> theta(f) under each generator, measured
    /// at interior sample points; the automorphy character of the average.
    pub fn measured_character<F>(
        &self,
        f: F,
        samples: &[Complex64],
    ) -> Result<Vec<Complex64>, ThetaError>
    where
        F: Fn(Complex64) -> Result<Complex64, ThetaError>,
    {
        let rank = self.alpha.rank();
        let mut out = Vec::with_capacity(rank);
        for k in 0..rank {
            let gen = self
                .terms
                .iter()
                .find(|t| t.word.0.as_slice() == [k as i32 + 1])
                .map(|t| t.map.clone());
            let Some(gen) = gen else {
                out.push(Complex64::new(f64::NAN, f64::NAN));
                continue;
            };
            let mut ratios = Vec::with_capacity(samples.len());
            for &z in samples {
                let gz = gen.apply(z)?;
                ratios.push(self.theta(&f, gz, ThetaForm::Pushforward)?
                    / self.theta(&f, z, ThetaForm::Pushforward)?);
            }
            out.push(median_complex(&ratios));
        }
        Ok(out)
    }
}

/// Componentwise median of complex samples.
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

/// Tolerances of the boundary-identity report.
#[derive(Debug, Clone, Serialize)]
pub struct ThetaTolerances {
    /// Allowed excess of sup |theta| over 1.
    pub fact: f64,
    /// Allowed mismatch of the radial expansions of f and theta(f).
    pub limit: f64,
    /// Allowed residual of the two-integral identity.
    pub id: f64,
    /// Convergence level of the small-oh diagnostic.
    pub smalloh: f64,
}

impl Default for ThetaTolerances {
    fn default() -> Self {
        ThetaTolerances {
            fact: 1e-3,
            limit: 1e-2,
            id: 1e-2,
            smalloh: 1e-3,
        }
    }
}

/// Radii 1 - 2^-k used by the radial diagnostics.
pub fn default_radii() -> Vec<f64> {
    (2..=12).map(|k| 1.0 - 0.5_f64.powi(k)).collect()
}

/// Boundary-identity report for the average of a Schur function: sup of
/// the modulus, radial expansion data, and the two-integral identity
/// whose sum must equal the boundary log-derivative.
#[derive(Debug, Clone, Serialize)]
pub struct ThetaSchurReport {
    pub sup_abs: f64,
    /// Radial boundary value of the input function at t0.
    #[serde(serialize_with = "crate::report::complex_pair")]
    pub delta_t0: Complex64,
    pub delta_t0_error: f64,
    /// Radial derivative of the input function at t0.
    #[serde(serialize_with = "crate::report::complex_pair")]
    pub delta_prime: Complex64,
    pub delta_prime_error: f64,
    /// Radial boundary value of the average at t0.
    #[serde(serialize_with = "crate::report::complex_pair")]
    pub theta_t0: Complex64,
    /// Radial derivative of the average at t0.
    #[serde(serialize_with = "crate::report::complex_pair")]
    pub theta_prime: Complex64,
    /// Mean of |theta(f)(t) - delta_t0|^2 / |t - t0|^2, the squared H2
    /// norm of the divided difference.
    pub integral1: f64,
    /// Mean of (1 - |theta(f)(t)|^2)^+ / |t - t0|^2.
    pub integral2: f64,
    /// The same two integrals for f itself, whose sum is the reference
    /// value t0 f'(t0) / f(t0) of the identity.
    pub log_derivative: f64,
    /// Radial estimate of Re t0 f'(t0) / f(t0), coarser than the
    /// quadrature value because the difference quotients amplify the
    /// boundary interpolation error of f.
    pub radial_log_derivative: f64,
    pub radial_log_derivative_error: f64,
    /// integral1 + integral2, the quadrature side of the identity.
    pub quadrature_log_derivative: f64,
    pub identity_residual: f64,
    /// Measured multiplier of the average under each generator.
    #[serde(serialize_with = "crate::report::complex_pair_vec")]
    pub effective_character: Vec<Complex64>,
    pub smalloh: SeriesReport,
    pub sup_pass: bool,
    pub expansion_pass: bool,
    pub identity_pass: bool,
}

/// Runs the boundary-identity checks for the average of an arbitrary
/// Schur-class function with radial CJ data at t0.
pub fn theta_schur_report<F>(
    ctx: &ThetaContext,
    f: F,
    radii: &[f64],
    grid: &BoundaryGrid,
    samples: &[Complex64],
    tol: &ThetaTolerances,
) -> Result<ThetaSchurReport, ThetaError>
where
    F: Fn(Complex64) -> Result<Complex64, ThetaError> + Sync,
{
    let smalloh = ctx.orbit().smalloh_check(radii, tol.smalloh);
    if !smalloh.converged {
        return Err(ThetaError::AssumptionFailed {
            value: smalloh.value,
            tol: tol.smalloh,
        });
    }
    let t0 = ctx.t0();

    // Radial expansion data of f and of its average.
    let seq = NtSequence::radial(t0, 4, 10)?;
    let f_samples: Vec<Complex64> = seq
        .points()
        .iter()
        .map(|&z| f(z))
        .collect::<Result<_, _>>()?;
    let th_samples: Vec<Complex64> = seq
        .points()
        .iter()
        .map(|&z| ctx.theta(&f, z, ThetaForm::Pushforward))
        .collect::<Result<_, _>>()?;
    let delta_t0 = limit_from_samples(&f_samples, 2e-11)?;
    let delta_prime = derivative_from_samples(&seq, &f_samples)?;
    let theta_t0 = limit_from_samples(&th_samples, 2e-11)?;
    let theta_prime = derivative_from_samples(&seq, &th_samples)?;
    let expansion_pass = (theta_t0.value - delta_t0.value).norm() <= tol.limit
        && (theta_prime.value - delta_prime.value).norm() <= tol.limit;

    // Grid quadrature of the identity, recast through divided differences,
    // for the average and for f itself; the f quadrature is the classical
    // CJ identity and serves as the reference value of t0 f'(t0) / f(t0).
    // Nodes are evaluated in parallel and summed in index order.
    let node_terms: Vec<[f64; 4]> = grid
        .points()
        .par_iter()
        .map(|&tj| -> Result<[f64; 4], ThetaError> {
            let p = ctx.theta(&f, tj, ThetaForm::Pushforward)?;
            let fj = f(tj)?;
            let dd = (tj - t0).norm_sqr();
            Ok([
                ((p - delta_t0.value) / (tj - t0)).norm_sqr(),
                (1.0 - p.norm_sqr()).max(0.0) / dd,
                ((fj - delta_t0.value) / (tj - t0)).norm_sqr(),
                (1.0 - fj.norm_sqr()).max(0.0) / dd,
            ])
        })
        .collect::<Result<_, _>>()?;
    let quad = |k: usize| node_terms.iter().map(|v| v[k]).sum::<f64>() / grid.len() as f64;
    let integral1 = quad(0);
    let integral2 = quad(1);
    let quadrature_log_derivative = integral1 + integral2;
    let log_derivative = quad(2) + quad(3);
    let radial = t0 * delta_prime.value / delta_t0.value;
    let identity_residual = (quadrature_log_derivative - log_derivative).abs();

    let sup_terms: Vec<f64> = samples
        .par_iter()
        .map(|&z| ctx.theta(&f, z, ThetaForm::Pushforward).map(|v| v.norm()))
        .collect::<Result<_, _>>()?;
    let sup_abs = sup_terms.iter().fold(0.0_f64, |a, &b| a.max(b));

    let probe = &samples[..samples.len().min(8)];
    let effective_character = ctx.measured_character(&f, probe)?;

    Ok(ThetaSchurReport {
        sup_abs,
        delta_t0: delta_t0.value,
        delta_t0_error: delta_t0.error_bar,
        delta_prime: delta_prime.value,
        delta_prime_error: delta_prime.error_bar,
        theta_t0: theta_t0.value,
        theta_prime: theta_prime.value,
        integral1,
        integral2,
        log_derivative,
        radial_log_derivative: radial.re,
        radial_log_derivative_error: delta_prime.error_bar / delta_t0.value.norm().max(1e-300),
        quadrature_log_derivative,
        identity_residual,
        effective_character,
        smalloh,
        sup_pass: sup_abs <= 1.0 + tol.fact,
        expansion_pass,
        identity_pass: identity_residual <= tol.id,
    })
}

/// The report for the factored boundary derivative itself.
pub fn theta_delta_report(
    ctx: &ThetaContext,
    fact: &FactoredDerivative,
    radii: &[f64],
    grid: &BoundaryGrid,
    samples: &[Complex64],
    tol: &ThetaTolerances,
) -> Result<ThetaSchurReport, ThetaError> {
    theta_schur_report(
        ctx,
        |u| fact.delta(u).map_err(ThetaError::from),
        radii,
        grid,
        samples,
        tol,
    )
}

/// Boundary interpolation datum: unimodular value w0, derivative value
/// w0p, and the real log-derivative ratio Re t0 w0p conj(w0).
#[derive(Debug, Clone, Serialize)]
pub struct BoundaryDatum {
    #[serde(serialize_with = "crate::report::complex_pair")]
    pub w0: Complex64,
    #[serde(serialize_with = "crate::report::complex_pair")]
    pub w0p: Complex64,
    pub ratio: f64,
}

impl BoundaryDatum {
    /// Validates the CJ structure: |w0| = 1 and t0 w0p conj(w0) real
    /// nonnegative, both within `tol_alg`.
    pub fn new(
        w0: Complex64,
        w0p: Complex64,
        t0: Complex64,
        tol_alg: f64,
    ) -> Result<Self, ThetaError> {
        let modulus = w0.norm();
        if (modulus - 1.0).abs() > tol_alg {
            return Err(ThetaError::DatumNotUnimodular { modulus });
        }
        let q = t0 * w0p * w0.conj();
        if q.im.abs() > tol_alg {
            return Err(ThetaError::DatumRatioNotReal { imag: q.im });
        }
        if q.re < -tol_alg {
            return Err(ThetaError::DatumRatioNegative { ratio: q.re });
        }
        Ok(BoundaryDatum {
            w0,
            w0p,
            ratio: q.re.max(0.0),
        })
    }
}

/// Schur interpolant w = theta(Delta f) with prescribed boundary value
/// and log-derivative at t0; f is a rotated axis automorphism whose
/// multiplier s gives t0 f'(t0) / f(t0) = (1 - s) / (1 + s).
#[derive(Debug, Clone)]
pub struct Interpolant {
    ctx: ThetaContext,
    fact: FactoredDerivative,
    f0: Complex64,
    multiplier: f64,
    rho: f64,
    bound: f64,
}

/// Builds the interpolant for `datum` on top of the boundary
/// log-derivative `bound` of Delta and its radial value `delta_t0`.
/// The datum must satisfy ratio >= bound - tol_limit; the excess
/// rho = ratio - bound goes into the classical factor.
pub fn construct_interpolant(
    ctx: &ThetaContext,
    fact: &FactoredDerivative,
    datum: &BoundaryDatum,
    delta_t0: Complex64,
    bound: f64,
    tol_limit: f64,
) -> Result<Interpolant, ThetaError> {
    if datum.ratio < bound - tol_limit {
        return Err(ThetaError::InfeasibleDatum {
            ratio: datum.ratio,
            bound,
        });
    }
    let rho = (datum.ratio - bound).max(0.0);
    Ok(Interpolant {
        ctx: ctx.clone(),
        fact: fact.clone(),
        f0: datum.w0 * delta_t0.conj() / delta_t0.norm(),
        multiplier: (1.0 - rho) / (1.0 + rho),
        rho,
        bound,
    })
}

impl Interpolant {
    /// The classical Schur factor f, constant when rho = 0.
    pub fn classical_factor(&self, z: Complex64) -> Complex64 {
        if self.rho == 0.0 {
            return self.f0;
        }
        let u = self.ctx.t0().conj() * z;
        let s = self.multiplier;
        self.f0 * (u + s) / (s * u + 1.0)
    }

    pub fn eval(&self, z: Complex64) -> Result<Complex64, ThetaError> {
        self.ctx.theta(
            |u| Ok(self.fact.delta(u)? * self.classical_factor(u)),
            z,
            ThetaForm::Pushforward,
        )
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn bound(&self) -> f64 {
        self.bound
    }

    pub fn multiplier(&self) -> f64 {
        self.multiplier
    }

    pub fn context(&self) -> &ThetaContext {
        &self.ctx
    }
}
