//! Equilibrium enumeration: every support is solved for its roots of the
//! indifference system, and each root is classified by the signs of its
//! probabilities and of its complementary slacks.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::game::{Game, GameFormat, MixedProfile, Outcomes};
use crate::homotopy::{is_real, track_all, HomotopyConfig, PathResult, PathStatus, StallReason};
use crate::poly::{build_system_e, PolySystem, Support};
use crate::startsys::{build_start_system, FactoredStartSystem, Injection, TNMatrix};

pub const SLACK_TOLERANCE: f64 = 1e-7;
pub const REAL_TOLERANCE: f64 = 1e-6;
pub const DEDUP_RADIUS: f64 = 1e-6;
/// Relative residual a root must keep after its imaginary parts are
/// dropped.
pub const REAL_RESIDUAL_TOLERANCE: f64 = 1e-8;

/// `v_ij = u_i(sigma) - u_i(s_ij, sigma_-i)` for every player and strategy.
#[derive(Debug, Clone, PartialEq)]
pub struct SlackVector {
    values: Vec<Vec<f64>>,
}

impl SlackVector {
    pub fn get(&self, player: usize, strategy: usize) -> f64 {
        self.values[player][strategy]
    }

    pub fn values(&self) -> &[Vec<f64>] {
        &self.values
    }

    pub fn min(&self) -> f64 {
        self.values.iter().flatten().copied().fold(f64::INFINITY, f64::min)
    }
}

pub fn slack(game: &Game, profile: &MixedProfile) -> Result<SlackVector> {
    let format = game.format();
    let mut values = Vec::with_capacity(format.players());
    for i in 0..format.players() {
        let own = game.expected_payoff(i, profile)?;
        let row = (0..format.strategies(i))
            .map(|j| game.payoff_against(i, j, profile).map(|u| own - u))
            .collect::<Result<Vec<_>>>()?;
        values.push(row);
    }
    Ok(SlackVector { values })
}

/// Nash test with tolerance `tol`: probabilities nonnegative and summing to
/// one, slacks nonnegative, and `sigma_ij * v_ij` vanishing.
pub fn check_equilibrium(game: &Game, profile: &MixedProfile, tol: f64) -> Result<(bool, SlackVector)> {
    let v = slack(game, profile)?;
    let ok = profile.is_normalized(tol)
        && profile.strategies().iter().flatten().all(|&p| p >= -tol)
        && v.min() >= -tol
        && profile
            .strategies()
            .iter()
            .zip(v.values())
            .all(|(p, s)| p.iter().zip(s).all(|(p, s)| (p * s).abs() <= tol));
    Ok((ok, v))
}

/// Pure profiles in which every player's strategy is the unique best reply.
pub fn find_pure_strict(game: &Game) -> Vec<Vec<usize>> {
    let format = game.format();
    format
        .outcomes()
        .filter(|s| {
            (0..format.players()).all(|i| {
                let chosen = game.payoff_at(i, s);
                let mut other = s.clone();
                (0..format.strategies(i)).filter(|&l| l != s[i]).all(|l| {
                    other[i] = l;
                    game.payoff_at(i, &other) < chosen
                })
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SupportMode {
    /// Every support.
    #[default]
    All,
    /// Skips supports in which exactly one player mixes; generic games have
    /// no equilibria there.
    Generic,
    /// Only the full support.
    TotallyMixed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SupportOptions {
    pub mode: SupportMode,
    /// Bounds on the number of strategies any single player may support.
    pub min_size: Option<usize>,
    pub max_size: Option<usize>,
}

impl SupportOptions {
    pub fn mode(mode: SupportMode) -> Self {
        Self {
            mode,
            ..Self::default()
        }
    }

    pub fn admits(&self, format: &GameFormat, support: &Support) -> bool {
        let sizes = (0..support.players()).map(|i| support.strategies(i).len());
        let sized = sizes.clone().all(|s| {
            self.min_size.is_none_or(|m| s >= m) && self.max_size.is_none_or(|m| s <= m)
        });
        sized
            && match self.mode {
                SupportMode::All => true,
                SupportMode::Generic => support.mixing_players() != 1,
                SupportMode::TotallyMixed => support.is_full(format),
            }
    }
}

/// Stream of supports in a fixed order: player 0's subset varies fastest,
/// each subset encoded as a nonzero bit mask over the player's strategies.
#[derive(Debug, Clone)]
pub struct Supports {
    format: GameFormat,
    masks: Outcomes,
    options: SupportOptions,
    full_pending: bool,
}

pub fn enumerate_supports(format: &GameFormat, options: &SupportOptions) -> Supports {
    let sizes = (0..format.players())
        .map(|i| (1usize << format.strategies(i)) - 1)
        .collect();
    Supports {
        format: format.clone(),
        masks: Outcomes::new(sizes),
        options: *options,
        full_pending: true,
    }
}

impl Iterator for Supports {
    type Item = Support;

    fn next(&mut self) -> Option<Support> {
        if self.options.mode == SupportMode::TotallyMixed {
            if !core::mem::take(&mut self.full_pending) {
                return None;
            }
            let full = Support::full(&self.format);
            return self.options.admits(&self.format, &full).then_some(full);
        }
        for masks in self.masks.by_ref() {
            let sets = masks
                .iter()
                .enumerate()
                .map(|(i, &m)| (0..self.format.strategies(i)).filter(|&s| (m + 1) >> s & 1 == 1).collect())
                .collect();
            let support = Support::new(&self.format, sets).expect("masks are nonzero");
            if self.options.admits(&self.format, &support) {
                return Some(support);
            }
        }
        None
    }
}

/// Start system restricted to one support, ready for tracking.
#[derive(Debug, Clone, PartialEq)]
pub struct PreparedStart {
    pub system: PolySystem<Complex64>,
    pub roots: Vec<Vec<Complex64>>,
}

impl PreparedStart {
    pub fn from_factored(start: &FactoredStartSystem) -> Result<Self> {
        Ok(Self {
            system: start.expanded(),
            roots: start.complex_roots()?,
        })
    }
}

/// Start systems of one format, restricted to the supports that have been
/// prepared. Shared read-only while solving.
#[derive(Debug, Clone)]
pub struct StartLibrary {
    full: FactoredStartSystem,
    matrix: TNMatrix,
    prepared: BTreeMap<Support, PreparedStart>,
}

impl StartLibrary {
    pub fn new(format: &GameFormat, injection: Injection) -> Result<Self> {
        Self::from_matrix(format, TNMatrix::for_format(format, injection))
    }

    pub fn from_matrix(format: &GameFormat, matrix: TNMatrix) -> Result<Self> {
        Ok(Self {
            full: build_start_system(format, &matrix)?,
            matrix,
            prepared: BTreeMap::new(),
        })
    }

    pub fn format(&self) -> &GameFormat {
        self.full.format()
    }

    pub fn matrix(&self) -> &TNMatrix {
        &self.matrix
    }

    pub fn full(&self) -> &FactoredStartSystem {
        &self.full
    }

    pub fn restricted(&self, support: &Support) -> Result<FactoredStartSystem> {
        self.full.restrict(support)
    }

    pub fn prepare(&mut self, support: &Support) -> Result<&PreparedStart> {
        if !self.prepared.contains_key(support) {
            let start = PreparedStart::from_factored(&self.full.restrict(support)?)?;
            self.prepared.insert(support.clone(), start);
        }
        Ok(&self.prepared[support])
    }

    /// Prepares every support that needs path tracking.
    pub fn prepare_all(&mut self, supports: impl IntoIterator<Item = Support>) -> Result<()> {
        for s in supports {
            if s.mixing_players() >= 2 {
                self.prepare(&s)?;
            }
        }
        Ok(())
    }

    pub fn insert(&mut self, support: Support, start: PreparedStart) {
        self.prepared.insert(support, start);
    }

    pub fn get(&self, support: &Support) -> Option<&PreparedStart> {
        self.prepared.get(support)
    }

    pub fn len(&self) -> usize {
        self.prepared.len()
    }

    pub fn is_empty(&self) -> bool {
        self.prepared.is_empty()
    }

    pub fn supports(&self) -> impl Iterator<Item = (&Support, &PreparedStart)> {
        self.prepared.iter()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SolveMethod {
    /// Track from the library's restricted start system.
    #[default]
    StartLibrary,
    /// Solve linear systems exactly when at most two players mix; track
    /// from a start system built on the spot otherwise.
    Direct,
}

/// Runs a batch of paths. Implementations may run them concurrently but
/// must return results in input order, with colliding endpoints re-tracked
/// as in [`crate::homotopy::retrack_collisions`].
pub trait PathTracker: Sync {
    fn track(
        &self,
        start: &PolySystem<Complex64>,
        target: &PolySystem<Complex64>,
        roots: &[Vec<Complex64>],
        config: &HomotopyConfig,
    ) -> Vec<Result<PathResult>>;
}

/// Tracks paths one after another.
#[derive(Debug, Clone, Copy, Default)]
pub struct Sequential;

impl PathTracker for Sequential {
    fn track(
        &self,
        start: &PolySystem<Complex64>,
        target: &PolySystem<Complex64>,
        roots: &[Vec<Complex64>],
        config: &HomotopyConfig,
    ) -> Vec<Result<PathResult>> {
        track_all(start, target, roots, config)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveOptions {
    pub supports: SupportOptions,
    pub method: SolveMethod,
    pub homotopy: HomotopyConfig,
    pub slack_tolerance: f64,
    pub real_tolerance: f64,
    pub dedup_radius: f64,
    /// Keep quasi, complex and rejected candidates in the report.
    pub keep_all_candidates: bool,
    /// Build start systems missing from a supplied library instead of
    /// failing.
    pub build_missing: bool,
    pub injection: Injection,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            supports: SupportOptions::default(),
            method: SolveMethod::default(),
            homotopy: HomotopyConfig::default(),
            slack_tolerance: SLACK_TOLERANCE,
            real_tolerance: REAL_TOLERANCE,
            dedup_radius: DEDUP_RADIUS,
            keep_all_candidates: false,
            build_missing: true,
            injection: Injection::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Classification {
    Nash,
    /// Root with a negative probability but nonnegative slacks.
    Quasi,
    Complex,
    /// Probabilities are valid but some strategy does strictly better.
    RejectedSlack,
    /// Negative probabilities and negative slacks.
    RejectedNegative,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EquilibriumCandidate {
    pub profile: MixedProfile,
    pub support: Support,
    /// Absent for complex roots.
    pub slack: Option<SlackVector>,
    pub classification: Classification,
    /// Index of the tracked path within its support, if any.
    pub path: Option<usize>,
    /// Root of the reduced system, in support variable order.
    pub root: Vec<Complex64>,
}

impl EquilibriumCandidate {
    pub fn is_nash(&self) -> bool {
        self.classification == Classification::Nash
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum WarningKind {
    PathStalled(StallReason),
    PathDiverged,
    PathFailed(Error),
    /// The support's system has no isolated roots: either a singular linear
    /// system or a single mixing player with constant-zero equations.
    PositiveDimensional,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Warning {
    pub support: Support,
    pub path: Option<usize>,
    pub kind: WarningKind,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SupportOutcome {
    pub candidates: Vec<EquilibriumCandidate>,
    pub warnings: Vec<Warning>,
    pub paths: usize,
}

/// Real profile from a reduced root: active coordinates, base probability
/// one minus the rest, zeros elsewhere.
pub fn reconstitute(format: &GameFormat, support: &Support, coords: &[f64]) -> MixedProfile {
    let mut strategies: Vec<Vec<f64>> = (0..format.players()).map(|i| vec![0.0; format.strategies(i)]).collect();
    let mut it = coords.iter();
    for (i, probs) in strategies.iter_mut().enumerate() {
        let mut rest = 1.0;
        for &j in support.active(i) {
            let v = *it.next().expect("one coordinate per active strategy");
            probs[j] = v;
            rest -= v;
        }
        probs[support.base(i)] = rest;
    }
    MixedProfile::new(strategies)
}

/// Classifies a real profile by the signs of probabilities and slacks.
pub fn classify(game: &Game, profile: &MixedProfile, tol: f64) -> Result<(Classification, SlackVector)> {
    let (nash, v) = check_equilibrium(game, profile, tol)?;
    let probs_ok = profile.strategies().iter().flatten().all(|&p| p >= -tol);
    let slack_ok = v.min() >= -tol;
    let class = match (probs_ok, slack_ok) {
        (true, true) if nash => Classification::Nash,
        (true, _) => Classification::RejectedSlack,
        (false, true) => Classification::Quasi,
        (false, false) => Classification::RejectedNegative,
    };
    Ok((class, v))
}

fn candidate_from_root(
    game: &Game,
    support: &Support,
    target: &PolySystem<Complex64>,
    root: Vec<Complex64>,
    path: Option<usize>,
    options: &SolveOptions,
) -> Result<EquilibriumCandidate> {
    let format = game.format();
    let real: Vec<f64> = root.iter().map(|z| z.re).collect();
    let truncated: Vec<Complex64> = real.iter().map(|&r| Complex64::new(r, 0.0)).collect();
    let residual = target
        .evaluate(&truncated)?
        .iter()
        .zip(target.magnitude(&truncated))
        .map(|(r, m)| r.norm() / (1.0 + m))
        .fold(0.0, f64::max);
    let profile = reconstitute(format, support, &real);
    if !is_real(&root, options.real_tolerance) || residual > REAL_RESIDUAL_TOLERANCE {
        return Ok(EquilibriumCandidate {
            profile,
            support: support.clone(),
            slack: None,
            classification: Classification::Complex,
            path,
            root,
        });
    }
    let (classification, v) = classify(game, &profile, options.slack_tolerance)?;
    Ok(EquilibriumCandidate {
        profile,
        support: support.clone(),
        slack: Some(v),
        classification,
        path,
        root,
    })
}

fn is_linear(system: &PolySystem<Complex64>) -> bool {
    system
        .equations()
        .iter()
        .all(|p| p.terms().iter().all(|(_, m)| m.degree() <= 1))
}

/// Roots of a system of affine equations, or `None` when it is singular.
fn solve_linear(system: &PolySystem<Complex64>) -> Option<Vec<Complex64>> {
    let n = system.nvars();
    let zero = vec![Complex64::new(0.0, 0.0); n];
    let jac = system.jacobian(&zero).ok()?;
    let a = DMatrix::from_fn(n, n, |r, c| jac[r][c]);
    let b = DVector::from_iterator(n, system.evaluate(&zero).ok()?.into_iter().map(|v| -v));
    let lu = a.lu();
    if !lu.is_invertible() {
        return None;
    }
    lu.solve(&b).map(|x| x.iter().copied().collect())
}

/// Candidates for a single support.
pub fn solve_support(
    game: &Game,
    support: &Support,
    library: Option<&StartLibrary>,
    tracker: &dyn PathTracker,
    options: &SolveOptions,
) -> Result<SupportOutcome> {
    let target = build_system_e(game, support)?;
    let mut outcome = SupportOutcome::default();
    let warn = |path, kind| Warning {
        support: support.clone(),
        path,
        kind,
    };

    if target.nvars() == 0 {
        outcome
            .candidates
            .push(candidate_from_root(game, support, &target, Vec::new(), None, options)?);
        return Ok(outcome);
    }
    if support.mixing_players() == 1 {
        // equations are constants: no isolated roots either way
        let constants = target.evaluate(&vec![Complex64::new(0.0, 0.0); target.nvars()])?;
        if constants.iter().all(|c| c.norm() <= options.slack_tolerance) {
            outcome.warnings.push(warn(None, WarningKind::PositiveDimensional));
        }
        return Ok(outcome);
    }
    if options.method == SolveMethod::Direct && is_linear(&target) {
        match solve_linear(&target) {
            Some(root) => outcome
                .candidates
                .push(candidate_from_root(game, support, &target, root, None, options)?),
            None => {
                let consistent = target.evaluate(&vec![Complex64::new(0.0, 0.0); target.nvars()])?;
                if consistent.iter().all(|c| c.norm() <= options.slack_tolerance) {
                    outcome.warnings.push(warn(None, WarningKind::PositiveDimensional));
                }
            }
        }
        return Ok(outcome);
    }

    let local;
    let start = match (options.method, library.and_then(|l| l.get(support))) {
        (SolveMethod::StartLibrary, Some(prepared)) => prepared,
        (SolveMethod::StartLibrary, None) if library.is_some() && !options.build_missing => {
            return Err(Error::MissingStartSystem);
        }
        _ => {
            let full = match library {
                Some(l) => l.full().clone(),
                None => build_start_system(
                    game.format(),
                    &TNMatrix::for_format(game.format(), options.injection),
                )?,
            };
            local = PreparedStart::from_factored(&full.restrict(support)?)?;
            &local
        }
    };

    let results = tracker.track(&start.system, &target, &start.roots, &options.homotopy);
    outcome.paths = results.len();
    for (n, result) in results.into_iter().enumerate() {
        match result {
            Ok(r) => match r.status {
                PathStatus::Converged => outcome
                    .candidates
                    .push(candidate_from_root(game, support, &target, r.endpoint, Some(n), options)?),
                PathStatus::Diverged => outcome.warnings.push(warn(Some(n), WarningKind::PathDiverged)),
                PathStatus::Stalled(reason) => outcome.warnings.push(warn(Some(n), WarningKind::PathStalled(reason))),
            },
            Err(e) => outcome.warnings.push(warn(Some(n), WarningKind::PathFailed(e))),
        }
    }
    Ok(outcome)
}

/// Outcome of a closed-form coordinate in a two-player, two-strategy game.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Reduced {
    Value(f64),
    /// The opponent strictly prefers one strategy whatever this player does.
    NoSolution,
    /// The opponent is indifferent whatever this player does.
    Indeterminate,
}

fn ratio(num: f64, den: f64) -> Reduced {
    if den != 0.0 {
        Reduced::Value(num / den)
    } else if num != 0.0 {
        Reduced::NoSolution
    } else {
        Reduced::Indeterminate
    }
}

/// Closed-form mixed equilibrium of a 2x2 game. `u1[a][b]` and `u2[a][b]`
/// are the payoffs when player 1 plays `a` and player 2 plays `b`. Returns
/// `(sigma_11, sigma_21)`: the probability of strategy 1 for each player.
pub fn solve_2x2_reduced(u1: [[f64; 2]; 2], u2: [[f64; 2]; 2]) -> (Reduced, Reduced) {
    let sigma21 = ratio(u1[0][0] - u1[1][0], u1[1][1] - u1[1][0] - u1[0][1] + u1[0][0]);
    let sigma11 = ratio(u2[0][0] - u2[0][1], u2[1][1] - u2[1][0] - u2[0][1] + u2[0][0]);
    (sigma11, sigma21)
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct NashReport {
    pub equilibria: Vec<EquilibriumCandidate>,
    pub candidates: Vec<EquilibriumCandidate>,
    pub warnings: Vec<Warning>,
    pub pure_strict: Vec<Vec<usize>>,
    pub supports: usize,
    pub paths: usize,
}

/// Library holding every support `options` will visit.
pub fn prepare_library(format: &GameFormat, options: &SolveOptions) -> Result<StartLibrary> {
    let mut lib = StartLibrary::new(format, options.injection)?;
    lib.prepare_all(enumerate_supports(format, &options.supports))?;
    Ok(lib)
}

/// Folds per-support outcomes, in support order, into a report: pure strict
/// equilibria on admitted supports first, then Nash candidates not within the dedup radius of
/// one already kept.
pub fn merge_outcomes(game: &Game, outcomes: Vec<SupportOutcome>, options: &SolveOptions) -> Result<NashReport> {
    let mut report = NashReport {
        pure_strict: find_pure_strict(game),
        supports: outcomes.len(),
        ..NashReport::default()
    };
    for profile in report.pure_strict.clone() {
        let support = Support::pure(&profile);
        if !options.supports.admits(game.format(), &support) {
            continue;
        }
        let mixed = MixedProfile::pure(game.format(), &profile);
        let (classification, v) = classify(game, &mixed, options.slack_tolerance)?;
        report.equilibria.push(EquilibriumCandidate {
            profile: mixed,
            support,
            slack: Some(v),
            classification,
            path: None,
            root: Vec::new(),
        });
    }
    for outcome in outcomes {
        report.paths += outcome.paths;
        report.warnings.extend(outcome.warnings);
        for c in outcome.candidates {
            if c.is_nash()
                && !report
                    .equilibria
                    .iter()
                    .any(|e| e.profile.max_distance(&c.profile) <= options.dedup_radius)
            {
                report.equilibria.push(c.clone());
            }
            if options.keep_all_candidates {
                report.candidates.push(c);
            }
        }
    }
    Ok(report)
}

/// All Nash equilibria found over the supports selected by `options`.
pub fn find_all_nash(game: &Game, options: &SolveOptions, library: Option<&StartLibrary>) -> Result<NashReport> {
    find_all_nash_with(game, options, library, &Sequential)
}

pub fn find_all_nash_with(
    game: &Game,
    options: &SolveOptions,
    library: Option<&StartLibrary>,
    tracker: &dyn PathTracker,
) -> Result<NashReport> {
    let owned;
    let library = match (library, options.method) {
        (None, SolveMethod::StartLibrary) => {
            owned = prepare_library(game.format(), options)?;
            Some(&owned)
        }
        (lib, _) => lib,
    };
    let outcomes = enumerate_supports(game.format(), &options.supports)
        .map(|s| solve_support(game, &s, library, tracker, options))
        .collect::<Result<Vec<_>>>()?;
    merge_outcomes(game, outcomes, options)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact;
    use crate::startsys::{build_tn_matrix, factorizable_game};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};

    fn fmt(dims: &[usize]) -> GameFormat {
        GameFormat::new(dims.to_vec()).unwrap()
    }

    fn bimatrix(u1: [[f64; 2]; 2], u2: [[f64; 2]; 2]) -> Game {
        Game::from_fn(fmt(&[1, 1]), |i, s| if i == 0 { u1[s[0]][s[1]] } else { u2[s[0]][s[1]] }).unwrap()
    }

    fn coordination() -> Game {
        bimatrix([[2.0, 0.0], [0.0, 1.0]], [[2.0, 0.0], [0.0, 1.0]])
    }

    fn pennies() -> Game {
        bimatrix([[1.0, -1.0], [-1.0, 1.0]], [[-1.0, 1.0], [1.0, -1.0]])
    }

    fn factorizable_333() -> Game {
        factorizable_game(&fmt(&[2, 2, 2]), &build_tn_matrix(6, Injection::PowersOfTwo)).unwrap()
    }

    fn reduced_profile(values: [(i64, i64); 6]) -> MixedProfile {
        let coords: Vec<f64> = values.iter().map(|&(n, d)| n as f64 / d as f64).collect();
        MixedProfile::from_reduced(&fmt(&[2, 2, 2]), &coords).unwrap()
    }

    #[test]
    fn start_game_equilibria_and_quasi_roots() {
        let g = factorizable_333();
        let (ok, v) = check_equilibrium(&g, &reduced_profile([(3, 64), (1, 512), (3, 4), (1, 8), (3, 16), (1, 64)]), 1e-9).unwrap();
        assert!(ok);
        assert!(v.min().abs() < 1e-12);
        let p = reduced_profile([(7, 32), (3, 128), (21, 16), (-5, 32), (5, 12), (-1, 24)]);
        assert!(!check_equilibrium(&g, &p, 1e-7).unwrap().0);
        assert_eq!(classify(&g, &p, 1e-7).unwrap().0, Classification::Quasi);
    }

    #[test]
    fn strictly_better_response_rejects_candidate() {
        let g = factorizable_333();
        let p = reduced_profile([(17, 96), (7, 384), (3, 4), (1, 8), (0, 1), (1, 32)]);
        let (class, v) = classify(&g, &p, SLACK_TOLERANCE).unwrap();
        assert_eq!(class, Classification::RejectedSlack);
        assert!((v.get(2, 1) + 112.5).abs() < 1e-9);
    }

    #[test]
    fn pure_strict_examples() {
        assert_eq!(find_pure_strict(&coordination()), vec![vec![0, 0], vec![1, 1]]);
        assert!(find_pure_strict(&pennies()).is_empty());
        // strictly dominant strategy 1 for both players
        let g = bimatrix([[0.0, 0.0], [1.0, 1.0]], [[0.0, 1.0], [0.0, 1.0]]);
        assert_eq!(find_pure_strict(&g), vec![vec![1, 1]]);
    }

    #[test]
    fn support_counts() {
        let f = fmt(&[1, 1]);
        assert_eq!(enumerate_supports(&f, &SupportOptions::default()).count(), 9);
        assert_eq!(enumerate_supports(&f, &SupportOptions::mode(SupportMode::Generic)).count(), 5);
        let full: Vec<Support> = enumerate_supports(&f, &SupportOptions::mode(SupportMode::TotallyMixed)).collect();
        assert_eq!(full, vec![Support::full(&f)]);
        let bounded = SupportOptions {
            max_size: Some(1),
            ..SupportOptions::default()
        };
        assert_eq!(enumerate_supports(&f, &bounded).count(), 4);
        let f = fmt(&[2, 1, 1]);
        assert_eq!(enumerate_supports(&f, &SupportOptions::default()).count(), 7 * 3 * 3);
    }

    #[test]
    fn closed_form_two_by_two() {
        let (s11, s21) = solve_2x2_reduced([[1.0, -1.0], [-1.0, 1.0]], [[-1.0, 1.0], [1.0, -1.0]]);
        assert_eq!((s11, s21), (Reduced::Value(0.5), Reduced::Value(0.5)));
        let (_, s21) = solve_2x2_reduced([[3.0, 1.0], [3.0, 2.0]], [[0.0; 2]; 2]);
        assert_eq!(s21, Reduced::Value(0.0));
        let (s11, s21) = solve_2x2_reduced([[0.0; 2]; 2], [[1.0, 0.0], [1.0, 0.0]]);
        assert_eq!(s21, Reduced::Indeterminate);
        assert_eq!(s11, Reduced::NoSolution);
    }

    #[test]
    fn coordination_has_three_equilibria() {
        for method in [SolveMethod::StartLibrary, SolveMethod::Direct] {
            let options = SolveOptions { method, ..SolveOptions::default() };
            let r = find_all_nash(&coordination(), &options, None).unwrap();
            assert_eq!(r.equilibria.len(), 3);
            let mixed = r.equilibria.iter().find(|e| e.support.mixing_players() == 2).unwrap();
            assert!((mixed.profile.prob(0, 0) - 1.0 / 3.0).abs() < 1e-10);
            assert!((mixed.profile.prob(1, 0) - 1.0 / 3.0).abs() < 1e-10);
        }
    }

    #[test]
    fn pennies_has_uniform_equilibrium() {
        let r = find_all_nash(&pennies(), &SolveOptions::default(), None).unwrap();
        assert_eq!(r.equilibria.len(), 1);
        assert!(r.equilibria[0].profile.max_distance(&MixedProfile::uniform(&fmt(&[1, 1]))) < 1e-10);
    }

    #[test]
    fn pure_support_candidate() {
        let g = coordination();
        let out = solve_support(&g, &Support::pure(&[1, 1]), None, &Sequential, &SolveOptions::default()).unwrap();
        assert_eq!(out.candidates.len(), 1);
        assert!(out.candidates[0].is_nash());
    }

    #[test]
    fn factorizable_game_full_support() {
        let g = factorizable_333();
        let options = SolveOptions {
            supports: SupportOptions::mode(SupportMode::TotallyMixed),
            keep_all_candidates: true,
            ..SolveOptions::default()
        };
        let out = solve_support(&g, &Support::full(g.format()), None, &Sequential, &options).unwrap();
        assert_eq!(out.candidates.len(), 10);
        assert_eq!(out.candidates.iter().filter(|c| c.is_nash()).count(), 2);
        let r = find_all_nash(&g, &options, None).unwrap();
        assert_eq!(r.equilibria.len(), 2);
        let expected = [
            reduced_profile([(3, 64), (1, 512), (3, 4), (1, 8), (3, 16), (1, 64)]),
            reduced_profile([(3, 16), (1, 64), (3, 64), (1, 512), (3, 4), (1, 8)]),
        ];
        for e in &expected {
            assert!(r.equilibria.iter().any(|c| c.profile.max_distance(e) < 1e-9));
        }
    }

    #[test]
    fn library_must_hold_support_unless_building() {
        let g = pennies();
        let lib = StartLibrary::new(g.format(), Injection::PowersOfTwo).unwrap();
        let strict = SolveOptions {
            build_missing: false,
            ..SolveOptions::default()
        };
        let full = Support::full(g.format());
        assert_eq!(
            solve_support(&g, &full, Some(&lib), &Sequential, &strict),
            Err(Error::MissingStartSystem)
        );
        let mut lib = lib;
        lib.prepare(&full).unwrap();
        assert_eq!(lib.get(&full).unwrap().roots.len(), 1);
        assert!(solve_support(&g, &full, Some(&lib), &Sequential, &strict).is_ok());
    }

    #[test]
    fn degenerate_single_mixer_is_reported() {
        // player 1 indifferent everywhere
        let g = bimatrix([[0.0, 0.0], [0.0, 0.0]], [[1.0, 0.0], [1.0, 0.0]]);
        let sup = Support::new(g.format(), vec![vec![0, 1], vec![0]]).unwrap();
        let out = solve_support(&g, &sup, None, &Sequential, &SolveOptions::default()).unwrap();
        assert_eq!(out.warnings.len(), 1);
        assert_eq!(out.warnings[0].kind, WarningKind::PositiveDimensional);
    }

    #[test]
    fn reconstitution_uses_support_base() {
        let f = fmt(&[2, 1]);
        let sup = Support::new(&f, vec![vec![1, 2], vec![0]]).unwrap();
        let p = reconstitute(&f, &sup, &[0.25]);
        assert_eq!(p.player(0), &[0.0, 0.75, 0.25]);
        assert_eq!(p.player(1), &[1.0, 0.0]);
    }

    fn oracle_2x2(u1: [[f64; 2]; 2], u2: [[f64; 2]; 2]) -> Vec<[f64; 2]> {
        let mut out = Vec::new();
        for a in 0..2 {
            for b in 0..2 {
                if u1[a][b] >= u1[1 - a][b] && u2[a][b] >= u2[a][1 - b] {
                    out.push([if a == 1 { 1.0 } else { 0.0 }, if b == 1 { 1.0 } else { 0.0 }]);
                }
            }
        }
        if let (Reduced::Value(p), Reduced::Value(q)) = solve_2x2_reduced(u1, u2) {
            if p > 0.0 && p < 1.0 && q > 0.0 && q < 1.0 {
                out.push([p, q]);
            }
        }
        out
    }

    #[test]
    fn random_bimatrix_games_match_oracle() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(11);
        for _ in 0..60 {
            let mut draw = || [[rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)], [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)]];
            let (u1, u2) = (draw(), draw());
            let expected = oracle_2x2(u1, u2);
            let r = find_all_nash(&bimatrix(u1, u2), &SolveOptions::default(), None).unwrap();
            assert_eq!(r.equilibria.len(), expected.len());
            for e in &expected {
                assert!(r
                    .equilibria
                    .iter()
                    .any(|c| (c.profile.prob(0, 1) - e[0]).abs() < 1e-8 && (c.profile.prob(1, 1) - e[1]).abs() < 1e-8));
            }
        }
    }

    fn random_game(dims: &[usize], seed: u64) -> Game {
        let mut rng = rand::rngs::StdRng::seed_from_u64(seed);
        Game::from_fn(fmt(dims), |_, _| rng.random_range(-1.0..1.0)).unwrap()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn reported_equilibria_are_sound(seed in any::<u64>(), three in any::<bool>()) {
            let dims: &[usize] = if three { &[1, 1, 1] } else { &[2, 1] };
            let g = random_game(dims, seed);
            let r = find_all_nash(&g, &SolveOptions::default(), None).unwrap();
            for e in &r.equilibria {
                let (ok, v) = check_equilibrium(&g, &e.profile, 1e-7).unwrap();
                prop_assert!(ok);
                for (p, s) in e.profile.strategies().iter().zip(v.values()) {
                    for (p, s) in p.iter().zip(s) {
                        prop_assert!((p * s).abs() <= 1e-7);
                    }
                }
                for i in 0..g.format().players() {
                    for j in 0..g.format().strategies(i) {
                        if !e.support.contains(i, j) {
                            prop_assert!(e.profile.prob(i, j).abs() <= 1e-7);
                        }
                    }
                }
            }
        }

        #[test]
        fn single_mixer_supports_yield_nothing(seed in any::<u64>()) {
            let g = random_game(&[1, 1, 1], seed);
            for s in enumerate_supports(g.format(), &SupportOptions::default()).filter(|s| s.mixing_players() == 1) {
                let out = solve_support(&g, &s, None, &Sequential, &SolveOptions::default()).unwrap();
                prop_assert!(out.candidates.is_empty());
                prop_assert!(out.warnings.is_empty());
            }
        }

        #[test]
        fn methods_agree(seed in any::<u64>()) {
            let g = random_game(&[1, 1, 1], seed);
            let a = find_all_nash(&g, &SolveOptions::default(), None).unwrap();
            let b = find_all_nash(&g, &SolveOptions { method: SolveMethod::Direct, ..SolveOptions::default() }, None).unwrap();
            prop_assert_eq!(a.equilibria.len(), b.equilibria.len());
            for e in &a.equilibria {
                prop_assert!(b.equilibria.iter().any(|f| f.profile.max_distance(&e.profile) < 1e-8));
            }
        }
    }

    #[test]
    fn exact_roots_of_start_game_are_candidates() {
        let g = factorizable_333();
        let s = build_start_system(g.format(), &build_tn_matrix(6, Injection::PowersOfTwo)).unwrap();
        let target = build_system_e(&g, &Support::full(g.format())).unwrap();
        for root in s.roots().unwrap() {
            let c = candidate_from_root(&g, &Support::full(g.format()), &target, exact::to_complex(&root), None, &SolveOptions::default()).unwrap();
            assert_ne!(c.classification, Classification::Complex);
        }
    }
}
