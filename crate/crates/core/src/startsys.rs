//! Factorizable start systems built from totally nonsingular matrices, and
//! the exact enumeration of their roots.
//!
//! Equation `E_ij` of the start system is the product over opponents `k` of
//! the affine factors `sum_l m[n(i,j)][l] * sigma_kl - 1`. Choosing for
//! every equation one factor to vanish, so that each opponent block `k`
//! receives exactly `d_k` equations, leaves one square linear system per
//! block. Total nonsingularity of `m` makes each of them uniquely solvable
//! and keeps the resulting roots distinct.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::{BigInt, BigUint};
use num_complex::Complex64;
use num_traits::{One, Signed, Zero};
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::exact::{self, integer, Rational};
use crate::game::{Game, GameFormat};
use crate::poly::{variable_name, Monomial, PolySystem, Polynomial, Support};

/// Injective map from the positive integers to positive rationals that
/// seeds the candidate entries of a totally nonsingular matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub enum Injection {
    /// `f(k) = 2^(k-1)`.
    #[default]
    PowersOfTwo,
    /// `f(k) = k + 1`; entries stay small at the cost of more retries.
    Successor,
}

impl Injection {
    /// Value at `k >= 1`.
    pub fn value(self, k: usize) -> Rational {
        match self {
            Injection::PowersOfTwo => Rational::from_integer(BigInt::one() << (k - 1)),
            Injection::Successor => integer(k as i64 + 1),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Injection::PowersOfTwo => "pow2",
            Injection::Successor => "succ",
        }
    }
}

/// Rational matrix in which every square submatrix is nonsingular.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TNMatrix {
    entries: Vec<Vec<Rational>>,
    injection: Option<Injection>,
}

/// Builds the symmetric `n x n` totally nonsingular matrix for `f`.
pub fn build_tn_matrix(n: usize, f: Injection) -> TNMatrix {
    TNMatrix::build(n, n, f)
}

impl TNMatrix {
    /// Fills the leading `rows x cols` block of the symmetric matrix.
    ///
    /// Entries are chosen row by row, left to right up to the diagonal, and
    /// mirrored. Entry `(i, j)` tries `f(i+j+1)`, then its negation, then
    /// `f(i+j+2)` and so on, until every square submatrix whose bottom-right
    /// corner is `(i, j)` is nonsingular. The values do not depend on how
    /// many rows or columns are requested.
    pub fn build(rows: usize, cols: usize, f: Injection) -> Self {
        let mut m = vec![vec![Rational::zero(); cols]; rows];
        for i in 0..rows {
            for j in 0..cols.min(i + 1) {
                let mut k = i + j + 1;
                let mut value = f.value(k);
                loop {
                    m[i][j] = value.clone();
                    if i < cols {
                        m[j][i] = value.clone();
                    }
                    if corner_minors_nonzero(&m, i, j) {
                        break;
                    }
                    if value.is_negative() {
                        k += 1;
                        value = f.value(k);
                    } else {
                        value = -value;
                    }
                }
            }
        }
        Self {
            entries: m,
            injection: Some(f),
        }
    }

    /// Smallest matrix serving `format`: one row per equation and one
    /// column per strategy of the largest player.
    pub fn for_format(format: &GameFormat, f: Injection) -> Self {
        Self::build(format.total_dim(), max_dim(format), f)
    }

    /// Random nonzero integer entries. Total nonsingularity holds with
    /// probability one in exact arithmetic; it is verified and re-drawn
    /// whenever the matrix has at most `VERIFY_LIMIT` square submatrices,
    /// and assumed beyond that.
    pub fn random(rows: usize, cols: usize, seed: u64) -> Self {
        const VERIFY_LIMIT: u64 = 100_000;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let verify = minor_count(rows, cols) <= VERIFY_LIMIT;
        loop {
            let entries: Vec<Vec<Rational>> = (0..rows)
                .map(|_| {
                    (0..cols)
                        .map(|_| loop {
                            let v = (rng.next_u32() % 2049) as i64 - 1024;
                            if v != 0 {
                                break integer(v);
                            }
                        })
                        .collect()
                })
                .collect();
            if !verify || is_totally_nonsingular(&entries) {
                return Self {
                    entries,
                    injection: None,
                };
            }
        }
    }

    /// Wraps explicit entries after checking total nonsingularity.
    pub fn from_entries(entries: Vec<Vec<Rational>>) -> Result<Self> {
        let cols = entries.first().map_or(0, Vec::len);
        if entries.iter().any(|r| r.len() != cols) {
            return Err(Error::ShapeMismatch);
        }
        if !is_totally_nonsingular(&entries) {
            return Err(Error::NotTotallyNonsingular);
        }
        Ok(Self {
            entries,
            injection: None,
        })
    }

    pub fn rows(&self) -> usize {
        self.entries.len()
    }

    pub fn cols(&self) -> usize {
        self.entries.first().map_or(0, Vec::len)
    }

    pub fn get(&self, row: usize, col: usize) -> &Rational {
        &self.entries[row][col]
    }

    pub fn entries(&self) -> &[Vec<Rational>] {
        &self.entries
    }

    pub fn injection(&self) -> Option<Injection> {
        self.injection
    }

    fn check_fits(&self, format: &GameFormat) -> Result<()> {
        let (need_rows, need_cols) = (format.total_dim(), max_dim(format));
        if self.rows() < need_rows || self.cols() < need_cols {
            return Err(Error::MatrixTooSmall {
                rows: self.rows(),
                cols: self.cols(),
                need_rows,
                need_cols,
            });
        }
        Ok(())
    }
}

fn max_dim(format: &GameFormat) -> usize {
    format.dims().iter().copied().max().unwrap_or(0)
}

fn minor_count(rows: usize, cols: usize) -> u64 {
    (1..=rows.min(cols) as u64)
        .map(|k| binomial(rows as u64, k).saturating_mul(binomial(cols as u64, k)))
        .fold(0u64, u64::saturating_add)
}

fn binomial(n: u64, k: u64) -> u64 {
    (0..k).fold(1u64, |acc, i| acc.saturating_mul(n - i) / (i + 1))
}

/// All `k`-subsets of `0..n` in lexicographic order.
fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    let mut c: Vec<usize> = (0..k).collect();
    loop {
        out.push(c.clone());
        let Some(pos) = (0..k).rev().find(|&p| c[p] < n - k + p) else {
            return out;
        };
        c[pos] += 1;
        for q in pos + 1..k {
            c[q] = c[q - 1] + 1;
        }
    }
}

fn submatrix(m: &[Vec<Rational>], rows: &[usize], cols: &[usize]) -> Vec<Vec<Rational>> {
    rows.iter()
        .map(|&r| cols.iter().map(|&c| m[r][c].clone()).collect())
        .collect()
}

fn corner_minors_nonzero(m: &[Vec<Rational>], i: usize, j: usize) -> bool {
    for extra in 0..=i.min(j) {
        for mut rows in combinations(i, extra) {
            rows.push(i);
            for mut cols in combinations(j, extra) {
                cols.push(j);
                if exact::determinant(&submatrix(m, &rows, &cols)).is_zero() {
                    return false;
                }
            }
        }
    }
    true
}

/// True iff every square submatrix has a nonzero determinant.
pub fn is_totally_nonsingular(m: &[Vec<Rational>]) -> bool {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    for k in 1..=rows.min(cols) {
        for r in combinations(rows, k) {
            for c in combinations(cols, k) {
                if exact::determinant(&submatrix(m, &r, &c)).is_zero() {
                    return false;
                }
            }
        }
    }
    true
}

/// `P[a][b] = 1` iff equation `a` and variable `b` belong to different
/// players, for the flat indices of `format`.
pub fn incidence_matrix(format: &GameFormat) -> Vec<Vec<u8>> {
    incidence_of_blocks(&owners_of(format.dims()))
}

fn owners_of(dims: &[usize]) -> Vec<usize> {
    dims.iter()
        .enumerate()
        .flat_map(|(i, &d)| core::iter::repeat_n(i, d))
        .collect()
}

fn incidence_of_blocks(owners: &[usize]) -> Vec<Vec<u8>> {
    owners
        .iter()
        .map(|&a| owners.iter().map(|&b| u8::from(a != b)).collect())
        .collect()
}

/// Permanent of a 0/1 matrix by Ryser's inclusion-exclusion formula.
pub fn permanent(m: &[Vec<u8>]) -> BigUint {
    let n = m.len();
    if n == 0 {
        return BigUint::one();
    }
    let mut total = BigInt::zero();
    let mut row_sums = vec![0u64; n];
    // Gray-code walk over column subsets
    let mut subset: u64 = 0;
    for step in 1u64..(1u64 << n) {
        let col = step.trailing_zeros() as usize;
        let adding = subset & (1 << col) == 0;
        subset ^= 1 << col;
        for (r, s) in row_sums.iter_mut().enumerate() {
            let v = u64::from(m[r][col]);
            if adding {
                *s += v;
            } else {
                *s -= v;
            }
        }
        let product = row_sums
            .iter()
            .fold(BigInt::one(), |acc, &s| acc * BigInt::from(s));
        if (n - subset.count_ones() as usize).is_multiple_of(2) {
            total += product;
        } else {
            total -= product;
        }
    }
    total.to_biguint().expect("permanent of a 0/1 matrix is nonnegative")
}

fn factorial(n: usize) -> BigUint {
    (1..=n as u64).fold(BigUint::one(), |acc, k| acc * k)
}

/// Generic number of isolated complex roots of systems with the shape of
/// `format`: `perm(P) / prod d_i!`.
pub fn bernstein_number(format: &GameFormat) -> BigUint {
    bernstein_of_blocks(format.dims())
}

/// Same count for block sizes that may include empty blocks.
pub fn bernstein_of_blocks(dims: &[usize]) -> BigUint {
    let perm = permanent(&incidence_of_blocks(&owners_of(dims)));
    let quotient = dims.iter().fold(BigUint::one(), |acc, &d| acc * factorial(d));
    perm / quotient
}

/// For every equation, the player whose linear factor is set to zero.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BlockAssignment {
    receivers: Vec<usize>,
}

impl BlockAssignment {
    /// Checks the receivers against the owners of the equations and the
    /// block capacities.
    pub fn new(receivers: Vec<usize>, owners: &[usize], capacities: &[usize]) -> Result<Self> {
        if receivers.len() != owners.len() {
            return Err(Error::InvalidAssignment);
        }
        let mut load = vec![0usize; capacities.len()];
        for (&r, &o) in receivers.iter().zip(owners) {
            if r == o || r >= capacities.len() {
                return Err(Error::InvalidAssignment);
            }
            load[r] += 1;
        }
        if load != capacities {
            return Err(Error::InvalidAssignment);
        }
        Ok(Self { receivers })
    }

    /// Quotient class of a permutation `tau` (equation `n` uses variable
    /// `tau[n]`, zero-based) with nonzero permanent contribution.
    pub fn from_permutation(format: &GameFormat, tau: &[usize]) -> Result<Self> {
        let d = format.total_dim();
        let mut seen = vec![false; d];
        if tau.len() != d {
            return Err(Error::InvalidAssignment);
        }
        for &c in tau {
            if c >= d || core::mem::replace(&mut seen[c], true) {
                return Err(Error::InvalidAssignment);
            }
        }
        let owners = owners_of(format.dims());
        Self::new(tau.iter().map(|&c| owners[c]).collect(), &owners, format.dims())
    }

    /// Canonical permutation of the class: within each receiving block the
    /// columns go to the assigned equations in increasing row order.
    pub fn to_permutation(&self, format: &GameFormat) -> Vec<usize> {
        let mut next: Vec<usize> = (0..format.players())
            .map(|k| format.flat_index(k, 1).unwrap())
            .collect();
        self.receivers
            .iter()
            .map(|&k| {
                next[k] += 1;
                next[k] - 1
            })
            .collect()
    }

    pub fn receivers(&self) -> &[usize] {
        &self.receivers
    }
}

/// Depth-first stream of every [`BlockAssignment`] for the given equation
/// owners and block capacities.
#[derive(Debug, Clone)]
pub struct Assignments {
    owners: Vec<usize>,
    remaining: Vec<usize>,
    stack: Vec<usize>,
    descending: bool,
    done: bool,
}

impl Assignments {
    pub fn new(owners: Vec<usize>, capacities: Vec<usize>) -> Self {
        let done = owners.len() != capacities.iter().sum::<usize>();
        Self {
            owners,
            remaining: capacities,
            stack: Vec::new(),
            descending: true,
            done,
        }
    }

    fn first_open(&self, from: usize) -> Option<usize> {
        let owner = self.owners[self.stack.len()];
        (from..self.remaining.len()).find(|&k| k != owner && self.remaining[k] > 0)
    }

    fn push(&mut self, k: usize) {
        self.remaining[k] -= 1;
        self.stack.push(k);
    }
}

impl Iterator for Assignments {
    type Item = BlockAssignment;

    fn next(&mut self) -> Option<BlockAssignment> {
        if self.done {
            return None;
        }
        loop {
            if self.descending {
                if self.stack.len() == self.owners.len() {
                    self.descending = false;
                    return Some(BlockAssignment {
                        receivers: self.stack.clone(),
                    });
                }
                match self.first_open(0) {
                    Some(k) => self.push(k),
                    None => self.descending = false,
                }
            } else {
                let Some(k) = self.stack.pop() else {
                    self.done = true;
                    return None;
                };
                self.remaining[k] += 1;
                if let Some(next) = self.first_open(k + 1) {
                    self.push(next);
                    self.descending = true;
                }
            }
        }
    }
}

/// All assignments for the full format.
pub fn enumerate_assignments(format: &GameFormat) -> Assignments {
    Assignments::new(owners_of(format.dims()), format.dims().to_vec())
}

/// One equation of a start system: the row of the matrix it draws its
/// coefficients from, indexed by strategy minus one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StartEquation {
    pub player: usize,
    pub strategy: usize,
    pub lambda: Vec<Rational>,
}

/// Start system for a game format, possibly restricted to a support.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactoredStartSystem {
    format: GameFormat,
    support: Support,
    variables: Vec<(usize, usize)>,
    equations: Vec<StartEquation>,
}

/// Start system of `format` built from the leading rows of `m`.
pub fn build_start_system(format: &GameFormat, m: &TNMatrix) -> Result<FactoredStartSystem> {
    m.check_fits(format)?;
    let cols = max_dim(format);
    let support = Support::full(format);
    let variables = support.variables();
    let equations = variables
        .iter()
        .map(|&(player, strategy)| {
            let row = format.flat_index(player, strategy).unwrap();
            StartEquation {
                player,
                strategy,
                lambda: m.entries()[row][..cols].to_vec(),
            }
        })
        .collect();
    Ok(FactoredStartSystem {
        format: format.clone(),
        support,
        variables,
        equations,
    })
}

impl FactoredStartSystem {
    pub fn format(&self) -> &GameFormat {
        &self.format
    }

    pub fn support(&self) -> &Support {
        &self.support
    }

    pub fn equations(&self) -> &[StartEquation] {
        &self.equations
    }

    /// `(player, strategy)` of each unknown, in system order.
    pub fn variables(&self) -> &[(usize, usize)] {
        &self.variables
    }

    fn owners(&self) -> Vec<usize> {
        self.equations.iter().map(|e| e.player).collect()
    }

    fn capacities(&self) -> Vec<usize> {
        self.support.reduced_dims()
    }

    /// Coefficients of the factor of equation `eq` belonging to opponent
    /// `k`, one per active strategy of `k`.
    pub fn factor_coefficients(&self, eq: usize, k: usize) -> Vec<Rational> {
        let lambda = &self.equations[eq].lambda;
        self.support
            .active(k)
            .iter()
            .map(|&l| lambda[l - 1].clone())
            .collect()
    }

    /// The factor `sum_l lambda_l * sigma_kl - 1` as a polynomial in the
    /// system's unknowns.
    pub fn factor(&self, eq: usize, k: usize) -> Polynomial<Rational> {
        let coeffs = self.factor_coefficients(eq, k);
        let mut terms: Vec<(Rational, Monomial)> = self
            .support
            .active(k)
            .iter()
            .zip(coeffs)
            .map(|(&l, c)| (c, Monomial::var(self.variable_index(k, l))))
            .collect();
        terms.push((-Rational::one(), Monomial::one()));
        Polynomial::from_terms(terms)
    }

    fn variable_index(&self, player: usize, strategy: usize) -> usize {
        self.variables
            .iter()
            .position(|&v| v == (player, strategy))
            .unwrap()
    }

    /// Equations with every factor multiplied out, in exact arithmetic.
    pub fn expanded_exact(&self) -> PolySystem<Rational> {
        let equations = self
            .equations
            .iter()
            .enumerate()
            .map(|(e, eq)| {
                (0..self.format.players())
                    .filter(|&k| k != eq.player)
                    .fold(Polynomial::constant(Rational::one()), |acc, k| &acc * &self.factor(e, k))
            })
            .collect();
        PolySystem::new(self.names(), equations).expect("start system variables are consistent")
    }

    pub fn expanded(&self) -> PolySystem<Complex64> {
        self.expanded_exact()
            .map_coefficients(|q| Complex64::new(exact::to_f64(q), 0.0))
    }

    pub fn names(&self) -> Vec<alloc::string::String> {
        self.variables
            .iter()
            .map(|&(i, j)| variable_name(i, j))
            .collect()
    }

    /// Every root-producing assignment, each once.
    pub fn assignments(&self) -> Assignments {
        Assignments::new(self.owners(), self.capacities())
    }

    pub fn bernstein_number(&self) -> BigUint {
        bernstein_of_blocks(&self.capacities())
    }

    /// Unique root in which every equation vanishes through the factor of
    /// its receiving block.
    pub fn solve_root(&self, assignment: &BlockAssignment) -> Result<Vec<Rational>> {
        let assignment = BlockAssignment::new(assignment.receivers.clone(), &self.owners(), &self.capacities())?;
        let mut root = vec![Rational::zero(); self.variables.len()];
        for k in 0..self.format.players() {
            let active = self.support.active(k);
            if active.is_empty() {
                continue;
            }
            let a: Vec<Vec<Rational>> = assignment
                .receivers
                .iter()
                .enumerate()
                .filter(|&(_, &r)| r == k)
                .map(|(e, _)| self.factor_coefficients(e, k))
                .collect();
            let ones = vec![Rational::one(); active.len()];
            let x = exact::solve(&a, &ones).ok_or(Error::SingularStartBlock(k))?;
            for (&l, v) in active.iter().zip(x) {
                root[self.variable_index(k, l)] = v;
            }
        }
        Ok(root)
    }

    /// All roots in assignment order. Fails if two coincide, in which case
    /// the matrix must be perturbed.
    pub fn roots(&self) -> Result<Vec<Vec<Rational>>> {
        let mut seen: BTreeMap<Vec<Rational>, usize> = BTreeMap::new();
        let mut roots = Vec::new();
        for (n, a) in self.assignments().enumerate() {
            let root = self.solve_root(&a)?;
            if let Some(&first) = seen.get(&root) {
                return Err(Error::DuplicateStartRoot(first, n));
            }
            seen.insert(root.clone(), n);
            roots.push(root);
        }
        Ok(roots)
    }

    pub fn complex_roots(&self) -> Result<Vec<Vec<Complex64>>> {
        Ok(self.roots()?.iter().map(|r| exact::to_complex(r)).collect())
    }

    /// Start system of the game restricted to `support`: excluded variables
    /// vanish from every factor and their equations are dropped. The
    /// surviving coefficients are the columns of the matrix belonging to the
    /// supported strategies.
    pub fn restrict(&self, support: &Support) -> Result<Self> {
        if !self.support.is_full(&self.format) {
            return Err(Error::AlreadyRestricted);
        }
        if support.players() != self.format.players() {
            return Err(Error::DimensionMismatch {
                expected: self.format.players(),
                got: support.players(),
            });
        }
        let variables = support.variables();
        let equations = variables
            .iter()
            .map(|&(i, j)| {
                let row = self.format.flat_index(i, j)?;
                Ok(self.equations[row].clone())
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            format: self.format.clone(),
            support: support.clone(),
            variables,
            equations,
        })
    }
}

/// The game whose equilibrium system for the full support is exactly the
/// start system built from `m`.
///
/// `u_i(s) = 0` when player `i` plays strategy 0; otherwise it is the
/// product over opponents `k` of `-1` if `s_k = 0` and of
/// `m[n(i,s_i)][s_k] - 1` else.
pub fn factorizable_game(format: &GameFormat, m: &TNMatrix) -> Result<Game> {
    m.check_fits(format)?;
    Game::from_fn(format.clone(), |i, s| {
        if s[i] == 0 {
            return 0.0;
        }
        let row = format.flat_index(i, s[i]).unwrap();
        (0..format.players())
            .filter(|&k| k != i)
            .map(|k| {
                if s[k] == 0 {
                    -1.0
                } else {
                    exact::to_f64(m.get(row, s[k] - 1)) - 1.0
                }
            })
            .product()
    })
}
