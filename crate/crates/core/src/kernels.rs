//! Extremal boundary kernels by sampled-constraint least squares,
//! interior reproducing kernels by projection, and the bound chain that
//! compares them across the character torus.
//!
//! The boundary kernel of a character is g = 1 + (t - t0) h with h a
//! polynomial of minimal H2 norm among g satisfying the sampled
//! automorphy g(gamma t_j) = alpha(gamma) g(t_j) at the generators.
//! Constraint rows are windowed: a row is kept only when the node and
//! its image both clear the circle projections of the generator poles,
//! where the pullback |gamma'| degenerates and sampled rows otherwise
//! drown the interior behaviour in boundary-layer error. The normal
//! equations assemble from character-independent Gram blocks, so a
//! lattice sweep pays one spectral solve per character.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use std::collections::BTreeMap;
use thiserror::Error;

use crate::caratheodory::{
    derivative_from_samples, limit_from_samples, CaratheodoryError, NtSequence,
};
use crate::group::{enumerate, Character, GroupError, GroupPresentation, Truncation, Word};
use crate::hardy::{
    factor_martin_derivative, BoundaryGrid, DiskPolynomial, FactoredDerivative, HardyError,
};
use crate::moebius::MoebiusError;
use crate::orbit::{orbit_data, OrbitError};
use crate::theta::ThetaError;

/// Relative eigenvalue cut of the assembled normal matrix. Directions
/// below it are noise of the squared conditioning and are dropped, which
/// the minimum-norm reading of the solve prefers anyway.
const GRAM_RANK_CUT: f64 = 1e-12;

/// Clearance kept between a constraint row and the circle projections of
/// the generator poles. Inside it |gamma'| degenerates and the sampled
/// row is boundary-layer noise, not an automorphy constraint.
const EXCLUSION_RADIUS: f64 = 0.1;

/// Relative eigenvalue cut under which a constraint-matrix direction
/// counts as automorphic for the interior projection.
const NULL_RANK_CUT: f64 = 1e-8;

/// Element budget and depth cap for the probe truncation used by the
/// orthogonality checks.
const PROBE_BUDGET: usize = 12_000;
const PROBE_MAX_LEN: usize = 14;

/// Monomial degrees probed by the orthogonality residual of a solve.
const DEFAULT_PROBES: usize = 8;

/// Product lattice ceiling over the whole character torus.
const LATTICE_CAP: u64 = 4096;

#[derive(Debug, Error)]
pub enum KernelError {
    #[error("coefficient count {count} must lie in 1..{max} for grid size {n}")]
    CoefficientCountOutOfRange { count: usize, max: usize, n: usize },
    #[error("base point must be unimodular, |t0| = {modulus}")]
    NotUnimodularBase { modulus: f64 },
    #[error("interior point must satisfy |z| < 1, got |z| = {modulus}")]
    NotInterior { modulus: f64 },
    #[error("character rank {got} does not match generator count {expected}")]
    CharacterRankMismatch { expected: usize, got: usize },
    #[error("node order must be a permutation of 0..{n}")]
    InvalidNodeOrder { n: usize },
    #[error("eigensolver did not converge on a {size} x {size} matrix")]
    NoConvergence { size: usize },
    #[error("constraints inconsistent at tolerance {tol}: automorphy residual {residual:.3e}")]
    InconsistentConstraints { residual: f64, tol: f64 },
    #[error("interior kernel mass {value:.3e} is too small to divide by")]
    InsufficientKernelMass { value: f64 },
    #[error(
        "upper bound violated at lattice character {index}: {lhs} > {rhs} + {tol}"
    )]
    BoundViolated {
        index: usize,
        lhs: f64,
        rhs: f64,
        tol: f64,
    },
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Orbit(#[from] OrbitError),
    #[error(transparent)]
    Map(#[from] MoebiusError),
    #[error(transparent)]
    Hardy(#[from] HardyError),
    #[error(transparent)]
    Theta(#[from] ThetaError),
    #[error(transparent)]
    Limit(#[from] CaratheodoryError),
}

/// Deterministic lattice on the character torus: per generator the
/// values e^{2 pi i k / K}, with K lowered until the product stays
/// within the global cap. The identity character comes first.
#[derive(Debug, Clone)]
pub struct CharacterLattice {
    characters: Vec<Character>,
    per_generator: usize,
}

impl CharacterLattice {
    pub fn new(
        presentation: &GroupPresentation,
        per_generator: usize,
    ) -> Result<Self, KernelError> {
        let rank = presentation.rank();
        if rank == 0 {
            return Ok(CharacterLattice {
                characters: vec![Character::identity(0)],
                per_generator: 1,
            });
        }
        let mut k = per_generator.max(1) as u64;
        while k > 1
            && k.checked_pow(rank as u32)
                .map(|total| total > LATTICE_CAP)
                .unwrap_or(true)
        {
            k -= 1;
        }
        let k = k as usize;
        let names: Vec<String> = presentation
            .generators()
            .iter()
            .map(|g| g.name.clone())
            .collect();
        let mut characters = Vec::with_capacity(k.pow(rank as u32));
        let mut digits = vec![0usize; rank];
        loop {
            let values: Vec<Complex64> = digits
                .iter()
                .map(|&d| {
                    Complex64::from_polar(1.0, std::f64::consts::TAU * d as f64 / k as f64)
                })
                .collect();
            characters.push(Character::new(values, &names, 1e-9)?);
            let mut pos = rank;
            loop {
                if pos == 0 {
                    return Ok(CharacterLattice {
                        characters,
                        per_generator: k,
                    });
                }
                pos -= 1;
                digits[pos] += 1;
                if digits[pos] < k {
                    break;
                }
                digits[pos] = 0;
            }
        }
    }

    pub fn characters(&self) -> &[Character] {
        &self.characters
    }

    pub fn per_generator(&self) -> usize {
        self.per_generator
    }

    pub fn len(&self) -> usize {
        self.characters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.characters.is_empty()
    }
}

/// Minimization domain of a boundary kernel solve: coefficients of h in
/// g = 1 + (t - t0) h, constrained by sampled generator automorphy on
/// the grid. `node_order` fixes the assembly order of the constraint
/// rows; reorderings change the result only through rounding.
#[derive(Debug, Clone)]
pub struct KernelProblem {
    presentation: GroupPresentation,
    alpha: Character,
    t0: Complex64,
    grid: BoundaryGrid,
    coeff_count: usize,
    tol_map: f64,
    tol_auto: f64,
    node_order: Vec<usize>,
}

impl KernelProblem {
    pub fn new(
        presentation: GroupPresentation,
        alpha: Character,
        t0: Complex64,
        grid: BoundaryGrid,
        coeff_count: usize,
        tol_map: f64,
        tol_auto: f64,
    ) -> Result<Self, KernelError> {
        if (t0.norm() - 1.0).abs() > 1e-12 {
            return Err(KernelError::NotUnimodularBase { modulus: t0.norm() });
        }
        let n = grid.len();
        if coeff_count == 0 || 2 * coeff_count >= n {
            return Err(KernelError::CoefficientCountOutOfRange {
                count: coeff_count,
                max: n / 2,
                n,
            });
        }
        if alpha.rank() != presentation.rank() {
            return Err(KernelError::CharacterRankMismatch {
                expected: presentation.rank(),
                got: alpha.rank(),
            });
        }
        let node_order = (0..n).collect();
        Ok(KernelProblem {
            presentation,
            alpha,
            t0,
            grid,
            coeff_count,
            tol_map,
            tol_auto,
            node_order,
        })
    }

    /// Replaces the constraint assembly order, for probing the rounding
    /// sensitivity of the solve.
    pub fn with_node_order(mut self, order: Vec<usize>) -> Result<Self, KernelError> {
        let n = self.grid.len();
        let mut seen = vec![false; n];
        if order.len() != n || order.iter().any(|&j| j >= n || std::mem::replace(&mut seen[j], true)) {
            return Err(KernelError::InvalidNodeOrder { n });
        }
        self.node_order = order;
        Ok(self)
    }

    pub fn alpha(&self) -> &Character {
        &self.alpha
    }

    pub fn t0(&self) -> Complex64 {
        self.t0
    }

    pub fn grid(&self) -> &BoundaryGrid {
        &self.grid
    }

    pub fn coeff_count(&self) -> usize {
        self.coeff_count
    }

    pub fn presentation(&self) -> &GroupPresentation {
        &self.presentation
    }
}

/// Solved boundary kernel: the divided difference h, its exact
/// coefficient-space objective, and the residuals of the two defining
/// properties.
#[derive(Debug, Clone)]
pub struct KernelSolution {
    pub h: DiskPolynomial,
    pub objective: f64,
    pub automorphy_residual: f64,
    pub orthogonality_residual: f64,
}

/// Character-independent Gram blocks of one generator's constraint rows
/// u_jk - alpha v_jk: the normal matrix assembles as
/// Guu + Gvv - conj(alpha) Gvu - alpha Gvu^H and the right side as
/// (alpha - 1) (su - conj(alpha) sv).
struct GramBlocks {
    guu: DMatrix<Complex64>,
    gvv: DMatrix<Complex64>,
    gvu: DMatrix<Complex64>,
    su: DVector<Complex64>,
    sv: DVector<Complex64>,
}

fn power_matrix(points: &[Complex64], weights: &[Complex64], m: usize) -> DMatrix<Complex64> {
    DMatrix::from_fn(points.len(), m, |j, k| weights[j] * points[j].powi(k as i32))
}

fn gram_blocks(
    nodes: &[Complex64],
    images: &[Complex64],
    weight_base: Option<Complex64>,
    m: usize,
) -> GramBlocks {
    let one = Complex64::new(1.0, 0.0);
    let (wu, wv): (Vec<Complex64>, Vec<Complex64>) = match weight_base {
        Some(t0) => (
            images.iter().map(|&g| g - t0).collect(),
            nodes.iter().map(|&t| t - t0).collect(),
        ),
        None => (vec![one; images.len()], vec![one; nodes.len()]),
    };
    let u = power_matrix(images, &wu, m);
    let v = power_matrix(nodes, &wv, m);
    let ones = DVector::from_element(nodes.len(), one);
    GramBlocks {
        guu: u.ad_mul(&u),
        gvv: v.ad_mul(&v),
        gvu: v.ad_mul(&u),
        su: u.ad_mul(&ones),
        sv: v.ad_mul(&ones),
    }
}

/// Hermitian normal matrix and right side for one character.
fn assemble_normal(
    blocks: &[GramBlocks],
    chi: &[Complex64],
    m: usize,
) -> (DMatrix<Complex64>, DVector<Complex64>) {
    let one = Complex64::new(1.0, 0.0);
    let mut h = DMatrix::<Complex64>::zeros(m, m);
    let mut rhs = DVector::<Complex64>::zeros(m);
    for (b, &a) in blocks.iter().zip(chi) {
        h += &b.guu;
        h += &b.gvv;
        h -= &b.gvu * a.conj();
        h -= b.gvu.adjoint() * a;
        rhs += (&b.su - &b.sv * a.conj()) * (a - one);
    }
    let herm = (&h + h.adjoint()) * Complex64::new(0.5, 0.0);
    (herm, rhs)
}

/// Minimum-norm least-squares solve of the normal equations through the
/// eigendecomposition, dropping directions below the relative cut.
fn pseudo_solve(
    h: DMatrix<Complex64>,
    rhs: &DVector<Complex64>,
    rel_cut: f64,
) -> Result<DVector<Complex64>, KernelError> {
    let m = h.nrows();
    let eig = nalgebra::SymmetricEigen::try_new(h, f64::EPSILON, 100_000)
        .ok_or(KernelError::NoConvergence { size: m })?;
    let lambda_max = eig.eigenvalues.iter().fold(0.0_f64, |acc, &l| acc.max(l));
    let mut c = DVector::<Complex64>::zeros(m);
    if lambda_max <= 0.0 {
        return Ok(c);
    }
    let cut = rel_cut * lambda_max;
    let proj = eig.eigenvectors.ad_mul(rhs);
    for (i, &l) in eig.eigenvalues.iter().enumerate() {
        if l > cut {
            c.axpy(proj[i] / l, &eig.eigenvectors.column(i), Complex64::new(1.0, 0.0));
        }
    }
    Ok(c)
}

fn probe_depth(rank: usize) -> usize {
    if rank == 0 {
        return 0;
    }
    let mut len = 1usize;
    let mut ball = (1 + 2 * rank) as u64;
    loop {
        let shell = (2 * rank) as u64 * ((2 * rank - 1) as u64).pow(len as u32);
        if len >= PROBE_MAX_LEN || ball + shell > PROBE_BUDGET as u64 {
            return len;
        }
        ball += shell;
        len += 1;
    }
}

/// Circle projections p/|p| of the poles of every generator map and its
/// inverse. These are the points the constraint windows must clear.
fn pole_projections(presentation: &GroupPresentation) -> Vec<Complex64> {
    let mut out = Vec::new();
    for g in presentation.generators() {
        for map in [g.map.clone(), g.map.inverse()] {
            let (a, b) = map.coefficients();
            if b.norm() > 1e-12 {
                let pole = -a.conj() / b.conj();
                out.push(pole / pole.norm());
            }
        }
    }
    out
}

fn clears_windows(z: Complex64, poles: &[Complex64]) -> bool {
    poles.iter().all(|&p| (z - p).norm() >= EXCLUSION_RADIUS)
}

/// Character-independent pushforward table for the orthogonality probes
/// f_m(t) = sum_g chi_g D(g^-1 t) (g^-1 t - t0) (g^-1 t)^m w_g(t) / den(t)
/// with w_g the pushforward weight and D the factored derivative. The
/// denominator carries no character, so f_m transforms exactly like the
/// numerator; the D factor keeps f_m analytic across the zeros shared
/// with den. Everything but chi is cached per (element, node).
struct ProbeTable {
    words: Vec<Word>,
    preimages: Vec<Vec<Complex64>>,
    deltas: Vec<Vec<Complex64>>,
    weights: Vec<Vec<Complex64>>,
    den: Vec<Complex64>,
}

fn build_probe_table(
    presentation: &GroupPresentation,
    t0: Complex64,
    grid: &BoundaryGrid,
    tol_map: f64,
) -> Result<ProbeTable, KernelError> {
    let trunc = enumerate(presentation, probe_depth(presentation.rank()), tol_map)?;
    let od = orbit_data(&trunc, t0, tol_map)?;
    let fact = factor_martin_derivative(&od, grid)?;
    let nodes = grid.points();
    let per_element: Vec<(Word, Vec<Complex64>, Vec<Complex64>, Vec<Complex64>)> = trunc
        .elements()
        .par_iter()
        .zip(od.rows().par_iter())
        .map(|(e, row)| -> Result<_, KernelError> {
            let inv = e.map.inverse();
            let mut pre = Vec::with_capacity(nodes.len());
            let mut dv = Vec::with_capacity(nodes.len());
            let mut w = Vec::with_capacity(nodes.len());
            for &tj in nodes {
                let d = row.image - tj;
                if d.norm() <= 1e-14 {
                    return Err(KernelError::Theta(ThetaError::DenominatorVanishes {
                        point: tj,
                    }));
                }
                let u = inv.apply(tj)?;
                pre.push(u);
                dv.push(fact.delta(u)?);
                w.push(row.deriv / (d * d));
            }
            Ok((e.word.clone(), pre, dv, w))
        })
        .collect::<Result<_, _>>()?;
    let mut words = Vec::with_capacity(per_element.len());
    let mut preimages = Vec::with_capacity(per_element.len());
    let mut deltas = Vec::with_capacity(per_element.len());
    let mut weights = Vec::with_capacity(per_element.len());
    for (word, pre, dv, w) in per_element {
        words.push(word);
        preimages.push(pre);
        deltas.push(dv);
        weights.push(w);
    }
    let mut den = vec![Complex64::new(0.0, 0.0); nodes.len()];
    for w in &weights {
        for (d, &wj) in den.iter_mut().zip(w) {
            *d += wj;
        }
    }
    for (j, d) in den.iter().enumerate() {
        let gross: f64 = weights.iter().map(|w| w[j].norm()).sum();
        if d.norm() <= 1e-12 * gross {
            return Err(KernelError::Theta(ThetaError::DenominatorVanishes {
                point: nodes[j],
            }));
        }
    }
    Ok(ProbeTable {
        words,
        preimages,
        deltas,
        weights,
        den,
    })
}

/// Shared data of boundary solves at one base point: windowed Gram
/// blocks and constraint rows per generator, and the cached probe table.
/// One engine serves every character of the group.
pub struct BoundaryKernelEngine {
    presentation: GroupPresentation,
    t0: Complex64,
    grid: BoundaryGrid,
    coeff_count: usize,
    constraint_sets: Vec<Vec<(Complex64, Complex64)>>,
    blocks: Vec<GramBlocks>,
    probe: ProbeTable,
}

impl BoundaryKernelEngine {
    pub fn new(p: &KernelProblem) -> Result<Self, KernelError> {
        let nodes: Vec<Complex64> = p
            .node_order
            .iter()
            .map(|&j| p.grid.points()[j])
            .collect();
        let poles = pole_projections(&p.presentation);
        let mut constraint_sets = Vec::with_capacity(p.presentation.rank());
        let mut blocks = Vec::with_capacity(p.presentation.rank());
        for g in p.presentation.generators() {
            let mut kept = Vec::new();
            for &t in &nodes {
                let image = g.map.apply(t)?;
                if clears_windows(t, &poles) && clears_windows(image, &poles) {
                    kept.push((t, image));
                }
            }
            let kept_nodes: Vec<Complex64> = kept.iter().map(|&(t, _)| t).collect();
            let kept_images: Vec<Complex64> = kept.iter().map(|&(_, i)| i).collect();
            blocks.push(gram_blocks(
                &kept_nodes,
                &kept_images,
                Some(p.t0),
                p.coeff_count,
            ));
            constraint_sets.push(kept);
        }
        let probe = build_probe_table(&p.presentation, p.t0, &p.grid, p.tol_map)?;
        Ok(BoundaryKernelEngine {
            presentation: p.presentation.clone(),
            t0: p.t0,
            grid: p.grid.clone(),
            coeff_count: p.coeff_count,
            constraint_sets,
            blocks,
            probe,
        })
    }

    /// Solves for one character and checks both defining residuals. The
    /// automorphy residual covers exactly the windowed constraint rows.
    pub fn solve(
        &self,
        alpha: &Character,
        tol_auto: f64,
    ) -> Result<KernelSolution, KernelError> {
        if alpha.rank() != self.presentation.rank() {
            return Err(KernelError::CharacterRankMismatch {
                expected: self.presentation.rank(),
                got: alpha.rank(),
            });
        }
        let chi = alpha.values();
        let (normal, rhs) = assemble_normal(&self.blocks, chi, self.coeff_count);
        let c = pseudo_solve(normal, &rhs, GRAM_RANK_CUT)?;
        let h = DiskPolynomial {
            coeffs: c.iter().copied().collect(),
        };
        let objective = h.h2_norm_sqr();
        let mut automorphy_residual = 0.0_f64;
        for (rows, &a) in self.constraint_sets.iter().zip(chi) {
            for &(tj, gj) in rows {
                let lhs = Complex64::new(1.0, 0.0) + (gj - self.t0) * h.eval(gj);
                let rhsv = a * (Complex64::new(1.0, 0.0) + (tj - self.t0) * h.eval(tj));
                automorphy_residual = automorphy_residual.max((lhs - rhsv).norm());
            }
        }
        if automorphy_residual > tol_auto {
            return Err(KernelError::InconsistentConstraints {
                residual: automorphy_residual,
                tol: tol_auto,
            });
        }
        let orthogonality_residual =
            self.orthogonality_residual(&h, alpha, DEFAULT_PROBES)?;
        Ok(KernelSolution {
            h,
            objective,
            automorphy_residual,
            orthogonality_residual,
        })
    }

    /// Max over probe degrees of the H2 pairing of h against the
    /// automorphized probe built from the seed D(z) (z - t0) z^m, in
    /// divided-difference form. A true minimizer annihilates every
    /// admissible probe.
    fn orthogonality_residual(
        &self,
        h: &DiskPolynomial,
        alpha: &Character,
        probes: usize,
    ) -> Result<f64, KernelError> {
        let pts = self.grid.points();
        let h_vals: Vec<Complex64> = pts.iter().map(|&t| h.eval(t)).collect();
        self.orthogonality_residual_samples(&h_vals, alpha, probes)
    }

    /// Same pairing against boundary samples of h on the engine grid.
    fn orthogonality_residual_samples(
        &self,
        h_vals: &[Complex64],
        alpha: &Character,
        probes: usize,
    ) -> Result<f64, KernelError> {
        if probes == 0 {
            return Ok(0.0);
        }
        let chi: Vec<Complex64> = self
            .probe
            .words
            .iter()
            .map(|w| alpha.eval(w))
            .collect::<Result<_, _>>()?;
        let t0 = self.t0;
        let pts = self.grid.points();
        let n = pts.len() as f64;
        let mut worst = 0.0_f64;
        for deg in 0..probes {
            let mut acc = Complex64::new(0.0, 0.0);
            for (j, (&tj, hj)) in pts.iter().zip(h_vals).enumerate() {
                let mut num = Complex64::new(0.0, 0.0);
                for (g, &cg) in chi.iter().enumerate() {
                    let u = self.probe.preimages[g][j];
                    num += cg
                        * self.probe.deltas[g][j]
                        * (u - t0)
                        * u.powi(deg as i32)
                        * self.probe.weights[g][j];
                }
                acc += num / self.probe.den[j] / (tj - t0) * hj.conj();
            }
            worst = worst.max((acc / n).norm());
        }
        Ok(worst)
    }
}

/// Minimum-norm least-squares kernel for the problem's character.
pub fn solve_boundary_kernel(p: &KernelProblem) -> Result<KernelSolution, KernelError> {
    BoundaryKernelEngine::new(p)?.solve(&p.alpha, p.tol_auto)
}

/// Recomputes the orthogonality residual of a solution with the given
/// number of probe degrees.
pub fn verify_orthogonality(
    sol: &KernelSolution,
    p: &KernelProblem,
    probes: usize,
) -> Result<f64, KernelError> {
    let engine = BoundaryKernelEngine::new(p)?;
    engine.orthogonality_residual(&sol.h, &p.alpha, probes)
}

/// Shared interior-projection data: plain power Gram blocks over the
/// windowed constraint rows, reused for every character and interior
/// point.
struct InteriorEngine {
    blocks: Vec<GramBlocks>,
    coeff_count: usize,
}

fn interior_engine(
    presentation: &GroupPresentation,
    grid: &BoundaryGrid,
    coeff_count: usize,
) -> Result<InteriorEngine, KernelError> {
    let nodes = grid.points();
    let poles = pole_projections(presentation);
    let mut blocks = Vec::with_capacity(presentation.rank());
    for g in presentation.generators() {
        let mut kept_nodes = Vec::new();
        let mut kept_images = Vec::new();
        for &t in nodes {
            let image = g.map.apply(t)?;
            if clears_windows(t, &poles) && clears_windows(image, &poles) {
                kept_nodes.push(t);
                kept_images.push(image);
            }
        }
        blocks.push(gram_blocks(&kept_nodes, &kept_images, None, coeff_count));
    }
    Ok(InteriorEngine {
        blocks,
        coeff_count,
    })
}

fn szego_coefficients(zeta0: Complex64, m: usize) -> DVector<Complex64> {
    let mut acc = Complex64::new(1.0, 0.0);
    DVector::from_iterator(
        m,
        (0..m).map(|_| {
            let out = acc;
            acc *= zeta0.conj();
            out
        }),
    )
}

impl InteriorEngine {
    /// Squared norm of the projection of the reproducing kernel of
    /// `zeta0` onto the sampled-automorphy null space.
    fn value(&self, chi: &[Complex64], zeta0: Complex64) -> Result<f64, KernelError> {
        let s = szego_coefficients(zeta0, self.coeff_count);
        if self.blocks.is_empty() {
            return Ok(s.iter().map(|c| c.norm_sqr()).sum());
        }
        let (normal, _) = assemble_normal(&self.blocks, chi, self.coeff_count);
        let m = normal.nrows();
        let eig = nalgebra::SymmetricEigen::try_new(normal, f64::EPSILON, 100_000)
            .ok_or(KernelError::NoConvergence { size: m })?;
        let lambda_max = eig.eigenvalues.iter().fold(0.0_f64, |acc, &l| acc.max(l));
        let cut = NULL_RANK_CUT * lambda_max;
        let proj = eig.eigenvectors.ad_mul(&s);
        let mut value = 0.0;
        for (i, &l) in eig.eigenvalues.iter().enumerate() {
            if l <= cut {
                value += proj[i].norm_sqr();
            }
        }
        Ok(value)
    }
}

/// Value at `zeta0` of the projection of the interior reproducing kernel
/// onto the sampled-automorphy coefficient space. For a trivial group
/// this is the truncated unconstrained kernel, 1 / (1 - |zeta0|^2) up to
/// the geometric tail.
pub fn interior_kernel_value(
    presentation: &GroupPresentation,
    alpha: &Character,
    zeta0: Complex64,
    coeff_count: usize,
    grid: &BoundaryGrid,
) -> Result<f64, KernelError> {
    if zeta0.norm() >= 1.0 {
        return Err(KernelError::NotInterior {
            modulus: zeta0.norm(),
        });
    }
    if alpha.rank() != presentation.rank() {
        return Err(KernelError::CharacterRankMismatch {
            expected: presentation.rank(),
            got: alpha.rank(),
        });
    }
    let engine = interior_engine(presentation, grid, coeff_count)?;
    engine.value(alpha.values(), zeta0)
}

/// Feasibility bound for prescribing a beta-automorphic value at
/// `zeta0`: the infimum over the character lattice of the kernel-mass
/// ratio between the beta-shifted and unshifted characters. Equals 1
/// exactly for the identity shift.
pub fn np_bound(
    presentation: &GroupPresentation,
    beta: &Character,
    zeta0: Complex64,
    character_samples: usize,
    coeff_count: usize,
    grid: &BoundaryGrid,
) -> Result<f64, KernelError> {
    if zeta0.norm() >= 1.0 {
        return Err(KernelError::NotInterior {
            modulus: zeta0.norm(),
        });
    }
    if beta.rank() != presentation.rank() {
        return Err(KernelError::CharacterRankMismatch {
            expected: presentation.rank(),
            got: beta.rank(),
        });
    }
    if beta
        .values()
        .iter()
        .all(|v| v.re == 1.0 && v.im == 0.0)
    {
        return Ok(1.0);
    }
    let engine = interior_engine(presentation, grid, coeff_count)?;
    let lattice = CharacterLattice::new(presentation, character_samples)?;
    let floor = 1e-12 * szego_coefficients(zeta0, coeff_count)
        .iter()
        .map(|c| c.norm_sqr())
        .sum::<f64>();
    let ratios: Vec<f64> = lattice
        .characters()
        .par_iter()
        .map(|alpha| -> Result<f64, KernelError> {
            let shifted = beta.product(alpha);
            let base = engine.value(alpha.values(), zeta0)?;
            if base <= floor {
                return Err(KernelError::InsufficientKernelMass { value: base });
            }
            Ok(engine.value(shifted.values(), zeta0)? / base)
        })
        .collect::<Result<_, _>>()?;
    Ok(ratios.into_iter().fold(f64::INFINITY, f64::min))
}

#[derive(Debug, Clone, Serialize)]
pub struct CjLowerBoundRow {
    #[serde(serialize_with = "crate::report::complex_pair_vec")]
    pub character: Vec<Complex64>,
    /// Objective of the beta-shifted character.
    pub objective_shifted: f64,
    pub objective: f64,
    pub difference: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct CjLowerBoundReport {
    /// Sup over the lattice of objective(alpha beta) - objective(alpha).
    pub bound: f64,
    /// Sup over the lattice of objective(alpha).
    pub sup_objective: f64,
    pub rows: Vec<CjLowerBoundRow>,
}

pub(crate) fn character_key(alpha: &Character) -> Vec<(u64, u64)> {
    alpha
        .values()
        .iter()
        .map(|v| (v.re.to_bits(), v.im.to_bits()))
        .collect()
}

/// Lattice sweep of the objective differences that bound the boundary
/// log-derivative of any beta-automorphic Schur function from below.
pub fn cj_lower_bound(
    presentation: &GroupPresentation,
    t0: Complex64,
    beta: &Character,
    character_samples: usize,
    grid: &BoundaryGrid,
    coeff_count: usize,
    tol_map: f64,
    tol_auto: f64,
) -> Result<CjLowerBoundReport, KernelError> {
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

    // Dedup the needed characters, solve each once in parallel, then
    // assemble the rows in lattice order.
    let mut index: BTreeMap<Vec<(u64, u64)>, usize> = BTreeMap::new();
    let mut unique: Vec<Character> = Vec::new();
    let mut row_keys = Vec::with_capacity(lattice.len());
    for alpha in lattice.characters() {
        let shifted = beta.product(alpha);
        let mut key_of = |ch: &Character| {
            let key = character_key(ch);
            *index.entry(key).or_insert_with(|| {
                unique.push(ch.clone());
                unique.len() - 1
            })
        };
        row_keys.push((key_of(alpha), key_of(&shifted)));
    }
    let objectives: Vec<f64> = unique
        .par_iter()
        .map(|alpha| engine.solve(alpha, tol_auto).map(|sol| sol.objective))
        .collect::<Result<_, _>>()?;

    let mut rows = Vec::with_capacity(lattice.len());
    let mut bound = f64::NEG_INFINITY;
    let mut sup_objective = f64::NEG_INFINITY;
    for (alpha, &(ka, kab)) in lattice.characters().iter().zip(&row_keys) {
        let objective = objectives[ka];
        let objective_shifted = objectives[kab];
        let difference = objective_shifted - objective;
        bound = bound.max(difference);
        sup_objective = sup_objective.max(objective);
        rows.push(CjLowerBoundRow {
            character: alpha.values().to_vec(),
            objective_shifted,
            objective,
            difference,
        });
    }
    Ok(CjLowerBoundReport {
        bound,
        sup_objective,
        rows,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct KernelBoundRow {
    #[serde(serialize_with = "crate::report::complex_pair_vec")]
    pub character: Vec<Complex64>,
    pub objective: f64,
    /// Quadrature objective of the averaged-derivative candidate.
    pub candidate_objective: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct KernelBoundReport {
    /// Radial estimate of the boundary log-derivative of Delta, the
    /// common upper bound of every objective.
    pub bound: f64,
    pub bound_error_bar: f64,
    pub sup_objective: f64,
    pub sup_candidate: f64,
    pub rows: Vec<KernelBoundRow>,
}

/// Checks objective(alpha) <= candidate objective <= bound across the
/// lattice, where the candidate is the character average of the
/// normalized derivative and the bound is the radial estimate of its
/// boundary log-derivative.
pub fn kernel_upper_bound_check(
    presentation: &GroupPresentation,
    trunc: &Truncation,
    fact: &FactoredDerivative,
    grid: &BoundaryGrid,
    coeff_count: usize,
    character_samples: usize,
    tol_map: f64,
    tol_auto: f64,
    tol_id: f64,
) -> Result<KernelBoundReport, KernelError> {
    let t0 = fact.t0();
    let seq = NtSequence::radial(t0, 4, 10)?;
    let vals: Vec<Complex64> = seq
        .points()
        .iter()
        .map(|&z| fact.delta(z))
        .collect::<Result<_, _>>()?;
    let d0 = limit_from_samples(&vals, 2e-11)?;
    let d1 = derivative_from_samples(&seq, &vals)?;
    let bound = (t0 * d1.value / d0.value).re;
    let bound_error_bar = (d1.error_bar + d1.value.norm() * d0.error_bar) / d0.value.norm();

    // Character-independent pushforward tables: per element the pulled
    // back Delta value and the derivative weight at every node.
    let od = orbit_data(trunc, t0, tol_map)?;
    let nodes = grid.points();
    let elements = trunc.elements();
    let tables: Vec<(Vec<Complex64>, Vec<Complex64>)> = elements
        .par_iter()
        .zip(od.rows().par_iter())
        .map(|(e, row)| -> Result<(Vec<Complex64>, Vec<Complex64>), KernelError> {
            let inv = e.map.inverse();
            let mut pulled = Vec::with_capacity(nodes.len());
            let mut coeff = Vec::with_capacity(nodes.len());
            for &tj in nodes {
                let d = row.image - tj;
                if d.norm() <= 1e-14 {
                    return Err(OrbitError::OrbitPointCollision { point: tj }.into());
                }
                let w = row.deriv / (d * d);
                pulled.push(fact.delta(inv.apply(tj)?)? * w);
                coeff.push(w);
            }
            Ok((pulled, coeff))
        })
        .collect::<Result<_, _>>()?;
    let mut den = vec![Complex64::new(0.0, 0.0); nodes.len()];
    let mut gross = vec![0.0_f64; nodes.len()];
    for (_, coeff) in &tables {
        for (j, &w) in coeff.iter().enumerate() {
            den[j] += w;
            gross[j] += w.norm();
        }
    }

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

    let rows: Vec<KernelBoundRow> = lattice
        .characters()
        .par_iter()
        .map(|alpha| -> Result<KernelBoundRow, KernelError> {
            let chi: Vec<Complex64> = elements
                .iter()
                .map(|e| alpha.eval(&e.word))
                .collect::<Result<_, _>>()?;
            let mut candidate = 0.0_f64;
            for (j, &tj) in nodes.iter().enumerate() {
                if den[j].norm() <= 1e-12 * gross[j] {
                    return Err(ThetaError::DenominatorVanishes { point: tj }.into());
                }
                let mut num = Complex64::new(0.0, 0.0);
                for ((pulled, _), &x) in tables.iter().zip(&chi) {
                    num += x * pulled[j];
                }
                let p = num / den[j];
                candidate += (p - d0.value).norm_sqr() / (tj - t0).norm_sqr();
            }
            candidate /= nodes.len() as f64;
            let objective = engine.solve(alpha, tol_auto)?.objective;
            Ok(KernelBoundRow {
                character: alpha.values().to_vec(),
                objective,
                candidate_objective: candidate,
            })
        })
        .collect::<Result<_, _>>()?;

    let mut sup_objective = 0.0_f64;
    let mut sup_candidate = 0.0_f64;
    for (index, row) in rows.iter().enumerate() {
        if row.objective > row.candidate_objective + tol_id {
            return Err(KernelError::BoundViolated {
                index,
                lhs: row.objective,
                rhs: row.candidate_objective,
                tol: tol_id,
            });
        }
        if row.candidate_objective > bound + tol_id {
            return Err(KernelError::BoundViolated {
                index,
                lhs: row.candidate_objective,
                rhs: bound,
                tol: tol_id,
            });
        }
        sup_objective = sup_objective.max(row.objective);
        sup_candidate = sup_candidate.max(row.candidate_objective);
    }
    Ok(KernelBoundReport {
        bound,
        bound_error_bar,
        sup_objective,
        sup_candidate,
        rows,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct DctReport {
    /// Max probe pairing against the candidate's divided difference.
    pub orthogonality_residual: f64,
    /// Objective of the solved kernel at the derivative's character.
    pub objective: f64,
    /// Quadrature objective of the candidate Delta conj(Delta(t0)).
    pub candidate_objective: f64,
    pub objective_gap: f64,
    pub pass: bool,
}

/// Tests whether the normalized derivative itself solves the extremal
/// problem at its own character: probe orthogonality of its divided
/// difference, and the objective distance to the solved kernel. Both
/// numbers are reported; the group either has the property or does not.
pub fn dct_test(
    presentation: &GroupPresentation,
    fact: &FactoredDerivative,
    grid: &BoundaryGrid,
    coeff_count: usize,
    probes: usize,
    tol_map: f64,
    tol_auto: f64,
    tol_char: f64,
    tol_dct: f64,
) -> Result<DctReport, KernelError> {
    let t0 = fact.t0();
    let names: Vec<String> = presentation
        .generators()
        .iter()
        .map(|g| g.name.clone())
        .collect();
    let samples = crate::hardy::interior_samples(16);
    let delta_char = fact
        .delta_character(presentation, &samples, tol_char)?
        .character(&names)?;

    let seq = NtSequence::radial(t0, 4, 10)?;
    let vals: Vec<Complex64> = seq
        .points()
        .iter()
        .map(|&z| fact.delta(z))
        .collect::<Result<_, _>>()?;
    let d0 = limit_from_samples(&vals, 2e-11)?.value;

    let nodes = grid.points();
    let h_cand: Vec<Complex64> = nodes
        .iter()
        .map(|&tj| -> Result<Complex64, KernelError> {
            Ok((fact.delta(tj)? * d0.conj() - Complex64::new(1.0, 0.0)) / (tj - t0))
        })
        .collect::<Result<_, _>>()?;
    let candidate_objective =
        h_cand.iter().map(|h| h.norm_sqr()).sum::<f64>() / nodes.len() as f64;

    let problem = KernelProblem::new(
        presentation.clone(),
        delta_char.clone(),
        t0,
        grid.clone(),
        coeff_count,
        tol_map,
        tol_auto,
    )?;
    let engine = BoundaryKernelEngine::new(&problem)?;
    let orthogonality_residual =
        engine.orthogonality_residual_samples(&h_cand, &delta_char, probes)?;
    let objective = engine.solve(&delta_char, tol_auto)?.objective;
    let objective_gap = (objective - candidate_objective).abs();
    Ok(DctReport {
        orthogonality_residual,
        objective,
        candidate_objective,
        objective_gap,
        pass: orthogonality_residual <= tol_dct && objective_gap <= tol_dct,
    })
}
