//! Predictor-corrector tracking of the linear homotopy
//! `H(x, t) = gamma (1 - t)^k Q(x) + t^k P(x)` from a start system `Q` with
//! known roots to a target system `P` of the same shape.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::TAU;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use num_traits::Float;
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::poly::PolySystem;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Predictor {
    /// First-order step along the solution of `H_x dx/dt = -H_t`.
    #[default]
    Tangent,
    /// Extrapolation through the last two accepted points.
    Secant,
}

/// Tracking parameters. Tolerances are relative: a residual vector `r` is
/// accepted when `|r_e| <= tol * (1 + m_e)` for every equation `e`, where
/// `m_e` sums the magnitudes of the equation's terms at the current point.
#[derive(Debug, Clone, PartialEq)]
pub struct HomotopyConfig {
    pub gamma: Complex64,
    pub gamma_seed: u64,
    pub power: u32,
    pub initial_step: f64,
    pub min_step: f64,
    pub max_step: f64,
    pub tolerance: f64,
    pub end_tolerance: f64,
    pub max_corrector_iterations: usize,
    pub growth_after: usize,
    pub divergence_bound: f64,
    /// Past this `t` steps are capped at a tenth of `max_step`.
    pub endgame_threshold: f64,
    pub predictor: Predictor,
}

/// Unit-modulus constant drawn from `seed`.
pub fn gamma_from_seed(seed: u64) -> Complex64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let u = (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64;
    Complex64::from_polar(1.0, TAU * u)
}

impl HomotopyConfig {
    pub const DEFAULT_SEED: u64 = 0x5eed;

    pub fn with_seed(seed: u64) -> Self {
        Self {
            gamma: gamma_from_seed(seed),
            gamma_seed: seed,
            power: 2,
            initial_step: 0.05,
            min_step: 1e-8,
            max_step: 0.1,
            tolerance: 1e-9,
            end_tolerance: 1e-11,
            max_corrector_iterations: 3,
            growth_after: 5,
            divergence_bound: 1e8,
            endgame_threshold: 0.9,
            predictor: Predictor::Tangent,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = 0.0 < self.min_step
            && self.min_step <= self.initial_step
            && self.initial_step <= self.max_step
            && self.max_step < 1.0
            && self.tolerance > 0.0
            && self.end_tolerance > 0.0
            && self.power >= 1
            && self.max_corrector_iterations >= 1
            && self.growth_after >= 1
            && self.divergence_bound > 0.0
            && (self.gamma.norm() - 1.0).abs() < 1e-12;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidConfig)
        }
    }
}

impl Default for HomotopyConfig {
    fn default() -> Self {
        Self::with_seed(Self::DEFAULT_SEED)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StallReason {
    /// The step size fell below the minimum before reaching `t = 1`.
    StepUnderflow,
    /// Newton's method at `t = 1` met a singular Jacobian without reaching
    /// the end tolerance.
    SingularEndgame,
    /// The caller's hook cancelled the path.
    Abandoned,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PathStatus {
    Converged,
    Diverged,
    Stalled(StallReason),
}

#[derive(Debug, Clone, PartialEq)]
pub struct PathResult {
    pub status: PathStatus,
    pub endpoint: Vec<Complex64>,
    pub t_reached: f64,
    /// Max-norm of the target system at the endpoint.
    pub residual: f64,
    /// Norm of the last Newton correction at `t = 1`.
    pub err: f64,
    /// Inverse condition number estimate of the target Jacobian.
    pub rco: f64,
    pub corrector_iterations: usize,
    pub accepted_steps: usize,
    pub rejected_steps: usize,
    pub arc_length: f64,
    /// Largest relative residual of `H` after any accepted correction.
    pub worst_step_residual: f64,
}

impl PathResult {
    pub fn is_converged(&self) -> bool {
        self.status == PathStatus::Converged
    }
}

/// `gamma (1 - t)^k Q + t^k P` over two systems of the same shape.
#[derive(Debug, Clone, Copy)]
pub struct Homotopy<'a> {
    start: &'a PolySystem<Complex64>,
    target: &'a PolySystem<Complex64>,
    gamma: Complex64,
    power: i32,
}

impl<'a> Homotopy<'a> {
    pub fn new(start: &'a PolySystem<Complex64>, target: &'a PolySystem<Complex64>, config: &HomotopyConfig) -> Result<Self> {
        if start.len() != target.len() || start.nvars() != target.nvars() || !target.is_square() {
            return Err(Error::ShapeMismatch);
        }
        Ok(Self {
            start,
            target,
            gamma: config.gamma,
            power: config.power as i32,
        })
    }

    fn weights(&self, t: f64) -> (Complex64, f64) {
        (self.gamma * powi(1.0 - t, self.power), powi(t, self.power))
    }

    pub fn eval(&self, x: &[Complex64], t: f64) -> Result<Vec<Complex64>> {
        let (a, b) = self.weights(t);
        let q = self.start.evaluate(x)?;
        let p = self.target.evaluate(x)?;
        Ok(q.iter().zip(&p).map(|(q, p)| a * q + p * b).collect())
    }

    /// Per-equation term magnitudes at `(x, t)`.
    fn magnitude(&self, x: &[Complex64], t: f64) -> Vec<f64> {
        let (a, b) = self.weights(t);
        let q = self.start.magnitude(x);
        let p = self.target.magnitude(x);
        q.iter().zip(&p).map(|(q, p)| a.norm() * q + b * p).collect()
    }

    fn relative_residual(&self, x: &[Complex64], t: f64) -> Result<f64> {
        let h = self.eval(x, t)?;
        Ok(scaled_max(&h, &self.magnitude(x, t)))
    }

    fn jacobian(&self, x: &[Complex64], t: f64) -> Result<DMatrix<Complex64>> {
        let (a, b) = self.weights(t);
        let jq = self.start.jacobian(x)?;
        let jp = self.target.jacobian(x)?;
        let n = x.len();
        Ok(DMatrix::from_fn(n, n, |r, c| a * jq[r][c] + jp[r][c] * b))
    }

    /// `dH/dt` at `(x, t)`.
    fn dt(&self, x: &[Complex64], t: f64) -> Result<Vec<Complex64>> {
        let k = f64::from(self.power);
        let da = -self.gamma * k * powi(1.0 - t, self.power - 1);
        let db = k * powi(t, self.power - 1);
        let q = self.start.evaluate(x)?;
        let p = self.target.evaluate(x)?;
        Ok(q.iter().zip(&p).map(|(q, p)| da * q + p * db).collect())
    }

    fn tangent(&self, x: &[Complex64], t: f64) -> Result<Option<Vec<Complex64>>> {
        let j = self.jacobian(x, t)?;
        let rhs = DVector::from_iterator(x.len(), self.dt(x, t)?.into_iter().map(|v| -v));
        Ok(j.lu().solve(&rhs).map(|d| d.iter().copied().collect()))
    }

    /// One Newton correction at fixed `t`; `None` on a singular Jacobian.
    fn newton(&self, x: &[Complex64], t: f64) -> Result<Option<(Vec<Complex64>, f64)>> {
        let j = self.jacobian(x, t)?;
        let rhs = DVector::from_vec(self.eval(x, t)?);
        let Some(d) = j.lu().solve(&rhs) else {
            return Ok(None);
        };
        let next: Vec<Complex64> = x.iter().zip(d.iter()).map(|(x, d)| x - d).collect();
        Ok(Some((next, max_norm(d.as_slice()))))
    }
}

fn powi(x: f64, n: i32) -> f64 {
    Float::powi(x, n)
}

fn max_norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn scaled_max(r: &[Complex64], magnitude: &[f64]) -> f64 {
    r.iter()
        .zip(magnitude)
        .map(|(r, m)| r.norm() / (1.0 + m))
        .fold(0.0, f64::max)
}

fn is_finite(x: &[Complex64]) -> bool {
    x.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

/// `1 / (|J|_inf |J^-1|_inf)`, zero when singular.
pub fn condition_estimate(j: &DMatrix<Complex64>) -> f64 {
    if j.nrows() == 0 {
        return 1.0;
    }
    let norm = |m: &DMatrix<Complex64>| {
        m.row_iter()
            .map(|r| r.iter().map(|z| z.norm()).sum::<f64>())
            .fold(0.0, f64::max)
    };
    match j.clone().lu().try_inverse() {
        Some(inv) => {
            let p = norm(j) * norm(&inv);
            if p.is_finite() && p > 0.0 { 1.0 / p } else { 0.0 }
        }
        None => 0.0,
    }
}

pub fn track_path(
    start: &PolySystem<Complex64>,
    target: &PolySystem<Complex64>,
    root: &[Complex64],
    config: &HomotopyConfig,
) -> Result<PathResult> {
    track_path_with(start, target, root, config, &mut |_, _| false)
}

/// Tracks `root` from `t = 0` to `t = 1`. The `abandon` hook is consulted
/// after every accepted step and cancels the path when it returns true.
pub fn track_path_with(
    start: &PolySystem<Complex64>,
    target: &PolySystem<Complex64>,
    root: &[Complex64],
    config: &HomotopyConfig,
    abandon: &mut dyn FnMut(&[Complex64], f64) -> bool,
) -> Result<PathResult> {
    config.validate()?;
    let h = Homotopy::new(start, target, config)?;
    let start_residual = scaled_max(&start.evaluate(root)?, &start.magnitude(root));
    if start_residual.is_nan() || start_residual > config.tolerance {
        return Err(Error::NotAStartRoot(start_residual));
    }

    let mut x = root.to_vec();
    if x.is_empty() {
        return Ok(PathResult {
            status: PathStatus::Converged,
            endpoint: x,
            t_reached: 1.0,
            residual: 0.0,
            err: 0.0,
            rco: 1.0,
            corrector_iterations: 0,
            accepted_steps: 0,
            rejected_steps: 0,
            arc_length: 0.0,
            worst_step_residual: 0.0,
        });
    }
    let mut previous: Option<(Vec<Complex64>, f64)> = None;
    let mut t = 0.0;
    let mut step = config.initial_step;
    let mut streak = 0;
    let mut result = PathResult {
        status: PathStatus::Converged,
        endpoint: Vec::new(),
        t_reached: 0.0,
        residual: f64::INFINITY,
        err: f64::INFINITY,
        rco: 0.0,
        corrector_iterations: 0,
        accepted_steps: 0,
        rejected_steps: 0,
        arc_length: 0.0,
        worst_step_residual: 0.0,
    };

    while t < 1.0 {
        let cap = if t >= config.endgame_threshold { config.max_step / 10.0 } else { config.max_step };
        step = step.min(cap).min(1.0 - t);
        let t_next = if 1.0 - t - step < config.min_step { 1.0 } else { t + step };
        let dt = t_next - t;

        let direction = match (config.predictor, &previous) {
            (Predictor::Secant, Some((xp, tp))) => Some(x.iter().zip(xp).map(|(a, b)| (a - b) / (t - tp)).collect()),
            _ => h.tangent(&x, t)?,
        };
        let mut candidate: Vec<Complex64> = match &direction {
            Some(d) => x.iter().zip(d).map(|(x, d)| x + d * dt).collect::<Vec<_>>(),
            None => x.clone(),
        };

        let mut accepted = false;
        let mut last_update = f64::INFINITY;
        for _ in 0..config.max_corrector_iterations {
            result.corrector_iterations += 1;
            let Some((next, update)) = h.newton(&candidate, t_next)? else {
                break;
            };
            // Newton must contract; otherwise the step is too long
            if update > 0.1 * last_update || !is_finite(&next) {
                break;
            }
            last_update = update;
            candidate = next;
            let rel = h.relative_residual(&candidate, t_next)?;
            if rel <= config.tolerance && update <= 1e-6 * (1.0 + max_norm(&candidate)) {
                result.worst_step_residual = result.worst_step_residual.max(rel);
                accepted = true;
                break;
            }
        }

        if accepted {
            let moved: Vec<Complex64> = candidate.iter().zip(&x).map(|(a, b)| a - b).collect();
            result.arc_length += moved.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            previous = Some((core::mem::replace(&mut x, candidate), t));
            t = t_next;
            result.accepted_steps += 1;
            streak += 1;
            if streak >= config.growth_after {
                step = (step * 2.0).min(config.max_step);
                streak = 0;
            }
            if max_norm(&x) > config.divergence_bound {
                result.status = PathStatus::Diverged;
                break;
            }
            if t < 1.0 && abandon(&x, t) {
                result.status = PathStatus::Stalled(StallReason::Abandoned);
                break;
            }
        } else {
            result.rejected_steps += 1;
            streak = 0;
            step /= 2.0;
            if step < config.min_step {
                result.status = PathStatus::Stalled(StallReason::StepUnderflow);
                break;
            }
        }
    }
    result.t_reached = t;

    if result.status == PathStatus::Converged {
        endgame(target, &mut x, config, &mut result)?;
    } else {
        result.residual = max_norm(&h.eval(&x, t)?);
    }
    result.endpoint = x;
    Ok(result)
}

/// Newton refinement on the target system at `t = 1`.
fn endgame(target: &PolySystem<Complex64>, x: &mut Vec<Complex64>, config: &HomotopyConfig, result: &mut PathResult) -> Result<()> {
    const MAX_ITERATIONS: usize = 8;
    let n = x.len();
    let mut singular = false;
    for _ in 0..MAX_ITERATIONS {
        let jac = target.jacobian(x)?;
        let j = DMatrix::from_fn(n, n, |r, c| jac[r][c]);
        let rhs = DVector::from_vec(target.evaluate(x)?);
        let Some(d) = j.lu().solve(&rhs) else {
            singular = true;
            break;
        };
        let update = max_norm(d.as_slice());
        if !matches!(update.partial_cmp(&result.err), Some(core::cmp::Ordering::Less)) && !result.err.is_infinite() {
            break;
        }
        let next: Vec<Complex64> = x.iter().zip(d.iter()).map(|(x, d)| x - d).collect();
        if !is_finite(&next) {
            break;
        }
        *x = next;
        result.err = update;
        if update <= 4.0 * f64::EPSILON * (1.0 + max_norm(x)) {
            break;
        }
    }
    let values = target.evaluate(x)?;
    result.residual = max_norm(&values);
    let jac = target.jacobian(x)?;
    result.rco = condition_estimate(&DMatrix::from_fn(n, n, |r, c| jac[r][c]));
    if result.err.is_infinite() {
        result.err = 0.0;
    }
    let rel = scaled_max(&values, &target.magnitude(x));
    if max_norm(x) > config.divergence_bound {
        result.status = PathStatus::Diverged;
    } else if rel > config.end_tolerance {
        result.status = PathStatus::Stalled(if singular {
            StallReason::SingularEndgame
        } else {
            StallReason::StepUnderflow
        });
    }
    Ok(())
}

/// Tracks every root in order; a failing path does not stop the others.
/// Colliding endpoints are re-tracked as in [`retrack_collisions`].
pub fn track_all(
    start: &PolySystem<Complex64>,
    target: &PolySystem<Complex64>,
    roots: &[Vec<Complex64>],
    config: &HomotopyConfig,
) -> Vec<Result<PathResult>> {
    let mut results: Vec<_> = roots
        .iter()
        .map(|r| track_path(start, target, r, config))
        .collect();
    retrack_collisions(start, target, roots, &mut results, config);
    results
}

/// Relative max-norm distance under which two converged endpoints count as
/// one root. Distinct roots of a generic target lie far apart.
pub const COLLISION_RADIUS: f64 = 1e-6;

/// Re-tracking rounds; each divides the step sizes by four.
const RETRACK_ROUNDS: usize = 3;

/// Paths from distinct start roots never meet, so coinciding endpoints mean
/// some path jumped onto another. Every path in such a cluster is tracked
/// again with shorter steps, and a converged retrack replaces the original.
/// Stops once no endpoints collide or the rounds run out.
pub fn retrack_collisions(
    start: &PolySystem<Complex64>,
    target: &PolySystem<Complex64>,
    roots: &[Vec<Complex64>],
    results: &mut [Result<PathResult>],
    config: &HomotopyConfig,
) {
    let mut config = config.clone();
    for _ in 0..RETRACK_ROUNDS {
        let clustered = colliding(results);
        if clustered.is_empty() {
            return;
        }
        config.initial_step /= 4.0;
        config.max_step /= 4.0;
        config.min_step = config.min_step.min(config.initial_step);
        for i in clustered {
            if let Ok(r) = track_path(start, target, &roots[i], &config) {
                if r.is_converged() {
                    results[i] = Ok(r);
                }
            }
        }
    }
}

/// Indices of converged paths whose endpoint lies within
/// [`COLLISION_RADIUS`] of another converged endpoint.
fn colliding(results: &[Result<PathResult>]) -> Vec<usize> {
    let ends: Vec<(usize, &[Complex64])> = results
        .iter()
        .enumerate()
        .filter_map(|(i, r)| r.as_ref().ok().filter(|r| r.is_converged()).map(|r| (i, r.endpoint.as_slice())))
        .collect();
    let mut hit = vec![false; results.len()];
    for (k, &(i, a)) in ends.iter().enumerate() {
        for &(j, b) in &ends[..k] {
            let close = a.iter().zip(b).all(|(u, v)| (u - v).norm() <= COLLISION_RADIUS * (1.0 + v.norm()));
            if close {
                hit[i] = true;
                hit[j] = true;
            }
        }
    }
    (0..results.len()).filter(|&i| hit[i]).collect()
}

/// Whether `z` passes as real: `|Im| <= tol * max(1, |Re|)` in every
/// component.
pub fn is_real(z: &[Complex64], tol: f64) -> bool {
    z.iter().all(|c| c.im.abs() <= tol * c.re.abs().max(1.0))
}

/// Residual-free comparison of endpoint multisets: every point of `a` has a
/// distinct partner in `b` within `tol` in the max norm.
pub fn same_multiset(a: &[Vec<Complex64>], b: &[Vec<Complex64>], tol: f64) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let mut used = vec![false; b.len()];
    a.iter().all(|p| {
        let hit = b.iter().enumerate().find(|(i, q)| {
            !used[*i] && p.len() == q.len() && p.iter().zip(q.iter()).all(|(u, v)| (u - v).norm() <= tol)
        });
        match hit {
            Some((i, _)) => {
                used[i] = true;
                true
            }
            None => false,
        }
    })
}
