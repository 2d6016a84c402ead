//! Sparse multivariate polynomials and the equilibrium systems built from
//! games.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt::Debug;
use core::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::game::{Game, GameFormat, Outcomes};

/// Arithmetic needed from polynomial coefficients.
pub trait Coefficient:
    Clone + Debug + PartialEq + Zero + One + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Neg<Output = Self>
{
}

impl<T> Coefficient for T where
    T: Clone + Debug + PartialEq + Zero + One + Add<Output = T> + Sub<Output = T> + Mul<Output = T> + Neg<Output = T>
{
}

/// A product of variables, stored as `(variable, exponent)` pairs sorted by
/// variable with no zero exponents.
///
/// Monomials are ordered by total degree first and then lexicographically
/// by their sorted sequence of variable indices, so `x0 < x1 < x0*x0 <
/// x0*x1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Monomial(Vec<(usize, u32)>);

impl Monomial {
    pub fn one() -> Self {
        Self(Vec::new())
    }

    pub fn var(index: usize) -> Self {
        Self(vec![(index, 1)])
    }

    pub fn from_exponents(pairs: impl IntoIterator<Item = (usize, u32)>) -> Self {
        let mut map: BTreeMap<usize, u32> = BTreeMap::new();
        for (v, e) in pairs {
            *map.entry(v).or_insert(0) += e;
        }
        Self(map.into_iter().filter(|&(_, e)| e > 0).collect())
    }

    pub fn exponents(&self) -> &[(usize, u32)] {
        &self.0
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&(_, e)| e).sum()
    }

    pub fn degree_in(&self, var: usize) -> u32 {
        self.0
            .iter()
            .find(|&&(v, _)| v == var)
            .map_or(0, |&(_, e)| e)
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn max_var(&self) -> Option<usize> {
        self.0.last().map(|&(v, _)| v)
    }

    fn expanded(&self) -> impl Iterator<Item = usize> + '_ {
        self.0
            .iter()
            .flat_map(|&(v, e)| core::iter::repeat_n(v, e as usize))
    }

    pub fn eval<C: Coefficient>(&self, point: &[C]) -> C {
        let mut acc = C::one();
        for &(v, e) in &self.0 {
            for _ in 0..e {
                acc = acc * point[v].clone();
            }
        }
        acc
    }
}

impl Mul for &Monomial {
    type Output = Monomial;

    fn mul(self, rhs: &Monomial) -> Monomial {
        Monomial::from_exponents(self.0.iter().chain(&rhs.0).copied())
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.expanded().cmp(other.expanded()))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Sum of `coefficient * monomial` terms, sorted ascending by monomial with
/// no duplicate monomials and no zero coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial<C> {
    terms: Vec<(C, Monomial)>,
}

impl<C: Coefficient> Polynomial<C> {
    pub fn zero() -> Self {
        Self { terms: Vec::new() }
    }

    pub fn constant(c: C) -> Self {
        Self::from_terms([(c, Monomial::one())])
    }

    pub fn var(index: usize) -> Self {
        Self::from_terms([(C::one(), Monomial::var(index))])
    }

    /// Normalises arbitrary terms: merges duplicates and drops zeros.
    pub fn from_terms(terms: impl IntoIterator<Item = (C, Monomial)>) -> Self {
        let mut map: BTreeMap<Monomial, C> = BTreeMap::new();
        for (c, m) in terms {
            match map.get_mut(&m) {
                Some(acc) => *acc = acc.clone() + c,
                None => {
                    map.insert(m, c);
                }
            }
        }
        Self {
            terms: map
                .into_iter()
                .filter(|(_, c)| !c.is_zero())
                .map(|(m, c)| (c, m))
                .collect(),
        }
    }

    pub fn terms(&self) -> &[(C, Monomial)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn constant_term(&self) -> C {
        self.coefficient(&Monomial::one())
    }

    pub fn coefficient(&self, m: &Monomial) -> C {
        self.terms
            .binary_search_by(|(_, t)| t.cmp(m))
            .map_or_else(|_| C::zero(), |i| self.terms[i].0.clone())
    }

    pub fn degree_in(&self, var: usize) -> u32 {
        self.terms
            .iter()
            .map(|(_, m)| m.degree_in(var))
            .max()
            .unwrap_or(0)
    }

    pub fn max_var(&self) -> Option<usize> {
        self.terms.iter().filter_map(|(_, m)| m.max_var()).max()
    }

    pub fn variables(&self) -> Vec<usize> {
        let mut vars: Vec<usize> = self
            .terms
            .iter()
            .flat_map(|(_, m)| m.exponents().iter().map(|&(v, _)| v))
            .collect();
        vars.sort_unstable();
        vars.dedup();
        vars
    }

    pub fn scale(&self, c: &C) -> Self {
        Self::from_terms(self.terms.iter().map(|(k, m)| (k.clone() * c.clone(), m.clone())))
    }

    pub fn pow(&self, exp: u32) -> Self {
        let mut acc = Self::constant(C::one());
        for _ in 0..exp {
            acc = &acc * self;
        }
        acc
    }

    pub fn map_coefficients<D: Coefficient>(&self, f: impl Fn(&C) -> D) -> Polynomial<D> {
        Polynomial::from_terms(self.terms.iter().map(|(c, m)| (f(c), m.clone())))
    }

    /// Renumbers variables through `map`.
    pub fn remap_variables(&self, map: &[usize]) -> Self {
        Self::from_terms(self.terms.iter().map(|(c, m)| {
            (
                c.clone(),
                Monomial::from_exponents(m.exponents().iter().map(|&(v, e)| (map[v], e))),
            )
        }))
    }

    pub fn eval(&self, point: &[C]) -> C {
        self.terms
            .iter()
            .fold(C::zero(), |acc, (c, m)| acc + c.clone() * m.eval(point))
    }

    /// Adds the gradient of this polynomial at `point` into `out`.
    pub fn add_gradient(&self, point: &[C], out: &mut [C]) {
        for (c, m) in &self.terms {
            let ex = m.exponents();
            for (pos, &(v, e)) in ex.iter().enumerate() {
                let mut d = c.clone();
                for _ in 1..e {
                    d = d * point[v].clone();
                }
                let mut k = C::zero();
                for _ in 0..e {
                    k = k + C::one();
                }
                d = d * k;
                for (other, &(w, f)) in ex.iter().enumerate() {
                    if other != pos {
                        for _ in 0..f {
                            d = d * point[w].clone();
                        }
                    }
                }
                out[v] = out[v].clone() + d;
            }
        }
    }
}

impl<C: Coefficient> Add for &Polynomial<C> {
    type Output = Polynomial<C>;

    fn add(self, rhs: &Polynomial<C>) -> Polynomial<C> {
        Polynomial::from_terms(self.terms.iter().chain(&rhs.terms).cloned())
    }
}

impl<C: Coefficient> Sub for &Polynomial<C> {
    type Output = Polynomial<C>;

    fn sub(self, rhs: &Polynomial<C>) -> Polynomial<C> {
        Polynomial::from_terms(
            self.terms
                .iter()
                .cloned()
                .chain(rhs.terms.iter().map(|(c, m)| (-c.clone(), m.clone()))),
        )
    }
}

impl<C: Coefficient> Neg for &Polynomial<C> {
    type Output = Polynomial<C>;

    fn neg(self) -> Polynomial<C> {
        Polynomial {
            terms: self.terms.iter().map(|(c, m)| (-c.clone(), m.clone())).collect(),
        }
    }
}

impl<C: Coefficient> Mul for &Polynomial<C> {
    type Output = Polynomial<C>;

    fn mul(self, rhs: &Polynomial<C>) -> Polynomial<C> {
        let mut terms = Vec::with_capacity(self.terms.len() * rhs.terms.len());
        for (a, m) in &self.terms {
            for (b, n) in &rhs.terms {
                terms.push((a.clone() * b.clone(), m * n));
            }
        }
        Polynomial::from_terms(terms)
    }
}

/// A list of polynomial equations `p = 0` over named variables.
#[derive(Debug, Clone, PartialEq)]
pub struct PolySystem<C = Complex64> {
    names: Vec<String>,
    equations: Vec<Polynomial<C>>,
}

impl<C: Coefficient> PolySystem<C> {
    /// Variable names must be unique and every variable index used by the
    /// equations must be declared.
    pub fn new(names: Vec<String>, equations: Vec<Polynomial<C>>) -> Result<Self> {
        for (i, n) in names.iter().enumerate() {
            if names[..i].contains(n) {
                return Err(Error::DuplicateVariable(n.clone()));
            }
        }
        for eq in &equations {
            if let Some(v) = eq.max_var() {
                if v >= names.len() {
                    return Err(Error::UnknownVariable {
                        index: v,
                        nvars: names.len(),
                    });
                }
            }
        }
        Ok(Self { names, equations })
    }

    pub fn empty() -> Self {
        Self {
            names: Vec::new(),
            equations: Vec::new(),
        }
    }

    pub fn nvars(&self) -> usize {
        self.names.len()
    }

    pub fn len(&self) -> usize {
        self.equations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.equations.is_empty()
    }

    pub fn is_square(&self) -> bool {
        self.equations.len() == self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn equations(&self) -> &[Polynomial<C>] {
        &self.equations
    }

    pub fn map_coefficients<D: Coefficient>(&self, f: impl Fn(&C) -> D) -> PolySystem<D> {
        PolySystem {
            names: self.names.clone(),
            equations: self.equations.iter().map(|p| p.map_coefficients(&f)).collect(),
        }
    }

    /// Same equations with the variables renamed and reordered to `names`,
    /// matching by name. Fails when the name sets differ.
    pub fn reorder_variables(&self, names: &[String]) -> Result<Self> {
        if names.len() != self.names.len() {
            return Err(Error::DimensionMismatch {
                expected: names.len(),
                got: self.names.len(),
            });
        }
        let mut map = Vec::with_capacity(self.names.len());
        for n in &self.names {
            match names.iter().position(|m| m == n) {
                Some(p) => map.push(p),
                None => return Err(Error::ShapeMismatch),
            }
        }
        Ok(Self {
            names: names.to_vec(),
            equations: self.equations.iter().map(|p| p.remap_variables(&map)).collect(),
        })
    }

    fn check_point(&self, point: &[C]) -> Result<()> {
        if point.len() != self.nvars() {
            Err(Error::DimensionMismatch {
                expected: self.nvars(),
                got: point.len(),
            })
        } else {
            Ok(())
        }
    }

    pub fn evaluate(&self, point: &[C]) -> Result<Vec<C>> {
        self.check_point(point)?;
        Ok(self.equations.iter().map(|p| p.eval(point)).collect())
    }

    /// Row-major matrix of partial derivatives at `point`.
    pub fn jacobian(&self, point: &[C]) -> Result<Vec<Vec<C>>> {
        if !self.is_square() {
            return Err(Error::NotSquare {
                equations: self.len(),
                variables: self.nvars(),
            });
        }
        self.check_point(point)?;
        Ok(self
            .equations
            .iter()
            .map(|p| {
                let mut row = vec![C::zero(); self.nvars()];
                p.add_gradient(point, &mut row);
                row
            })
            .collect())
    }
}

impl PolySystem<Complex64> {
    /// Per-equation sum of term magnitudes at `point`; the scale against
    /// which rounding errors in [`evaluate`](Self::evaluate) are measured.
    pub fn magnitude(&self, point: &[Complex64]) -> Vec<f64> {
        self.equations
            .iter()
            .map(|p| {
                p.terms()
                    .iter()
                    .map(|(c, m)| c.norm() * m.eval(point).norm())
                    .sum()
            })
            .collect()
    }
}

/// Name used for the probability of `strategy` of `player` (both
/// zero-based players, strategies counted from 0) in written systems.
pub fn variable_name(player: usize, strategy: usize) -> String {
    if player < 9 && strategy < 10 {
        format!("s{}{}", player + 1, strategy)
    } else {
        format!("s{}_{}", player + 1, strategy)
    }
}

/// Strategies each player may use with positive probability.
///
/// The smallest strategy in each player's set acts as that player's base:
/// its probability is one minus the others.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Support {
    sets: Vec<Vec<usize>>,
}

impl Support {
    pub fn new(format: &GameFormat, mut sets: Vec<Vec<usize>>) -> Result<Self> {
        if sets.len() != format.players() {
            return Err(Error::DimensionMismatch {
                expected: format.players(),
                got: sets.len(),
            });
        }
        for (player, set) in sets.iter_mut().enumerate() {
            set.sort_unstable();
            set.dedup();
            if set.is_empty() {
                return Err(Error::EmptySupport(player));
            }
            if let Some(&s) = set.iter().find(|&&s| s > format.dim(player)) {
                return Err(Error::StrategyOutOfRange { player, strategy: s });
            }
        }
        Ok(Self { sets })
    }

    pub fn full(format: &GameFormat) -> Self {
        Self {
            sets: (0..format.players())
                .map(|i| (0..format.strategies(i)).collect())
                .collect(),
        }
    }

    pub fn pure(profile: &[usize]) -> Self {
        Self {
            sets: profile.iter().map(|&s| vec![s]).collect(),
        }
    }

    pub fn players(&self) -> usize {
        self.sets.len()
    }

    pub fn strategies(&self, player: usize) -> &[usize] {
        &self.sets[player]
    }

    pub fn contains(&self, player: usize, strategy: usize) -> bool {
        self.sets[player].binary_search(&strategy).is_ok()
    }

    pub fn base(&self, player: usize) -> usize {
        self.sets[player][0]
    }

    /// Supported strategies other than the base: those that get unknowns.
    pub fn active(&self, player: usize) -> &[usize] {
        &self.sets[player][1..]
    }

    pub fn reduced_dims(&self) -> Vec<usize> {
        self.sets.iter().map(|s| s.len() - 1).collect()
    }

    /// Number of players with more than one supported strategy.
    pub fn mixing_players(&self) -> usize {
        self.sets.iter().filter(|s| s.len() > 1).count()
    }

    pub fn is_full(&self, format: &GameFormat) -> bool {
        self.sets
            .iter()
            .enumerate()
            .all(|(i, s)| s.len() == format.strategies(i))
    }

    /// `(player, strategy)` of every unknown of the reduced system.
    pub fn variables(&self) -> Vec<(usize, usize)> {
        self.sets
            .iter()
            .enumerate()
            .flat_map(|(i, s)| s[1..].iter().map(move |&j| (i, j)))
            .collect()
    }
}

/// The equilibrium system of `game` restricted to `support`.
///
/// For every player `i` and active strategy `j` the equation states
/// `u_i(s_ij, sigma_-i) = u_i(s_ib, sigma_-i)` with `b` the base of `i`;
/// the base probabilities are eliminated with
/// `sigma_ib = 1 - sum_j sigma_ij`, leaving a square system in the active
/// probabilities.
pub fn build_system_e(game: &Game, support: &Support) -> Result<PolySystem<Complex64>> {
    let format = game.format();
    if support.players() != format.players() {
        return Err(Error::DimensionMismatch {
            expected: format.players(),
            got: support.players(),
        });
    }
    let variables = support.variables();
    let index_of = |player: usize, strategy: usize| variables.iter().position(|&v| v == (player, strategy));

    // sigma_{k s} as a polynomial in the unknowns
    let prob = |k: usize, s: usize| -> Polynomial<f64> {
        if s == support.base(k) {
            let mut p = Polynomial::constant(1.0);
            for &l in support.active(k) {
                p = &p - &Polynomial::var(index_of(k, l).unwrap());
            }
            p
        } else {
            Polynomial::var(index_of(k, s).unwrap())
        }
    };
    let probs: Vec<Vec<(usize, Polynomial<f64>)>> = (0..format.players())
        .map(|k| support.strategies(k).iter().map(|&s| (s, prob(k, s))).collect())
        .collect();

    let mut equations = Vec::with_capacity(variables.len());
    for &(i, j) in &variables {
        let base = support.base(i);
        let sizes: Vec<usize> = (0..format.players())
            .map(|k| if k == i { 1 } else { probs[k].len() })
            .collect();
        let mut eq = Polynomial::zero();
        let mut profile = vec![0; format.players()];
        for choice in Outcomes::new(sizes) {
            let mut term = Polynomial::constant(1.0);
            for k in 0..format.players() {
                if k != i {
                    let (s, p) = &probs[k][choice[k]];
                    profile[k] = *s;
                    term = &term * p;
                }
            }
            profile[i] = j;
            let here = game.payoff_at(i, &profile);
            profile[i] = base;
            let there = game.payoff_at(i, &profile);
            eq = &eq + &term.scale(&(here - there));
        }
        equations.push(eq.map_coefficients(|&c| Complex64::new(c, 0.0)));
    }
    let names = variables.iter().map(|&(i, j)| variable_name(i, j)).collect();
    PolySystem::new(names, equations)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::MixedProfile;
    use alloc::string::ToString;
    use proptest::prelude::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn monomial_order_is_graded() {
        let x0 = Monomial::var(0);
        let x1 = Monomial::var(1);
        let x0x1 = &x0 * &x1;
        let x0x0 = &x0 * &x0;
        assert!(Monomial::one() < x0);
        assert!(x0 < x1);
        assert!(x1 < x0x0);
        assert!(x0x0 < x0x1);
        assert_eq!(x0x1.degree(), 2);
        assert_eq!(x0x0.degree_in(0), 2);
    }

    #[test]
    fn normalisation_merges_and_drops_zeros() {
        let p = Polynomial::from_terms([
            (2.0, Monomial::var(1)),
            (3.0, Monomial::one()),
            (-2.0, Monomial::var(1)),
            (1.0, Monomial::var(0)),
        ]);
        assert_eq!(p.terms().len(), 2);
        assert_eq!(p.constant_term(), 3.0);
        assert_eq!(p.coefficient(&Monomial::var(1)), 0.0);
    }

    #[test]
    fn product_expands() {
        // (x0 - 1)(x1 - 1) = x0 x1 - x0 - x1 + 1
        let a = &Polynomial::<f64>::var(0) - &Polynomial::constant(1.0);
        let b = &Polynomial::<f64>::var(1) - &Polynomial::constant(1.0);
        let p = &a * &b;
        assert_eq!(p.terms().len(), 4);
        assert_eq!(p.coefficient(&(&Monomial::var(0) * &Monomial::var(1))), 1.0);
        assert_eq!(p.coefficient(&Monomial::var(0)), -1.0);
        assert_eq!(p.constant_term(), 1.0);
        assert_eq!(p.pow(2).degree_in(0), 2);
    }

    #[test]
    fn evaluate_at_origin_gives_constants() {
        let p = &(&Polynomial::var(0) * &Polynomial::var(1)) + &Polynomial::constant(c(4.0));
        let q = &Polynomial::var(1) - &Polynomial::constant(c(-2.5));
        let sys = PolySystem::new(vec!["a".into(), "b".into()], vec![p, q]).unwrap();
        assert_eq!(sys.evaluate(&[c(0.0), c(0.0)]).unwrap(), vec![c(4.0), c(2.5)]);
        assert!(matches!(sys.evaluate(&[c(0.0)]), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn evaluate_factored_payoff() {
        // (16 a + 128 b - 1)(16 c + 128 d - 1) at the reduced candidate
        let lin = |x: usize, y: usize| {
            Polynomial::from_terms([(16.0, Monomial::var(x)), (128.0, Monomial::var(y)), (-1.0, Monomial::one())])
        };
        let p = &lin(0, 1) * &lin(2, 3);
        let v: f64 = p.eval(&[17.0 / 96.0, 7.0 / 384.0, 0.75, 0.125]);
        assert!((v - 112.5).abs() < 1e-12);
    }

    #[test]
    fn jacobian_of_linear_and_bilinear() {
        let p = &(&Polynomial::var(0) * &Polynomial::var(1)) - &Polynomial::constant(c(1.0));
        let sys = PolySystem::new(vec!["x".into(), "y".into()], vec![p.clone(), p]).unwrap();
        let j = sys.jacobian(&[c(1.0), c(1.0)]).unwrap();
        assert_eq!(j[0], vec![c(1.0), c(1.0)]);

        let lin = Polynomial::from_terms([(c(3.0), Monomial::var(0)), (c(-2.0), Monomial::var(1)), (c(5.0), Monomial::one())]);
        let lin2 = Polynomial::from_terms([(c(7.0), Monomial::var(1))]);
        let sys = PolySystem::new(vec!["x".into(), "y".into()], vec![lin, lin2]).unwrap();
        for pt in [[c(0.0), c(0.0)], [c(2.0), Complex64::new(1.0, -3.0)]] {
            assert_eq!(sys.jacobian(&pt).unwrap(), vec![vec![c(3.0), c(-2.0)], vec![c(0.0), c(7.0)]]);
        }
    }

    #[test]
    fn jacobian_requires_square() {
        let sys = PolySystem::new(vec!["x".into(), "y".into()], vec![Polynomial::var(0)]).unwrap();
        assert!(matches!(sys.jacobian(&[c(0.0), c(0.0)]), Err(Error::NotSquare { .. })));
    }

    #[test]
    fn system_rejects_bad_names() {
        assert!(matches!(
            PolySystem::<f64>::new(vec!["a".into(), "a".into()], vec![]),
            Err(Error::DuplicateVariable(_))
        ));
        assert!(matches!(
            PolySystem::<f64>::new(vec!["a".into()], vec![Polynomial::var(3)]),
            Err(Error::UnknownVariable { .. })
        ));
    }

    #[test]
    fn variable_names() {
        assert_eq!(variable_name(0, 1), "s11");
        assert_eq!(variable_name(2, 2), "s32");
        assert_eq!(variable_name(0, 12), "s1_12");
    }

    #[test]
    fn support_validation() {
        let f = GameFormat::new(vec![2, 1]).unwrap();
        assert_eq!(Support::new(&f, vec![vec![], vec![0]]), Err(Error::EmptySupport(0)));
        assert!(matches!(Support::new(&f, vec![vec![0], vec![2]]), Err(Error::StrategyOutOfRange { .. })));
        let s = Support::new(&f, vec![vec![2, 1], vec![0, 1]]).unwrap();
        assert_eq!(s.base(0), 1);
        assert_eq!(s.active(0), &[2]);
        assert_eq!(s.reduced_dims(), vec![1, 1]);
        assert_eq!(s.variables(), vec![(0, 2), (1, 1)]);
        assert!(Support::full(&f).is_full(&f));
    }

    #[test]
    fn all_pure_support_gives_empty_system() {
        let f = GameFormat::new(vec![2, 2, 2]).unwrap();
        let g = Game::from_fn(f, |i, s| (i + s[0] + 2 * s[1] + 3 * s[2]) as f64).unwrap();
        let sys = build_system_e(&g, &Support::pure(&[1, 0, 2])).unwrap();
        assert_eq!(sys.len(), 0);
        assert_eq!(sys.nvars(), 0);
    }

    #[test]
    fn two_by_two_system_is_linear() {
        // matching pennies
        let f = GameFormat::new(vec![1, 1]).unwrap();
        let g = Game::from_fn(f.clone(), |i, s| {
            let same = s[0] == s[1];
            if (i == 0) == same { 1.0 } else { -1.0 }
        })
        .unwrap();
        let sys = build_system_e(&g, &Support::full(&f)).unwrap();
        assert_eq!(sys.names(), &["s11".to_string(), "s21".to_string()]);
        // player 1: u(s11) - u(s10) = (2 s21 - 1) - (1 - 2 s21) = 4 s21 - 2
        let e1 = &sys.equations()[0];
        assert_eq!(e1.constant_term(), c(-2.0));
        assert_eq!(e1.coefficient(&Monomial::var(1)), c(4.0));
        assert_eq!(e1.degree_in(0), 0);
        let r = sys.evaluate(&[c(0.5), c(0.5)]).unwrap();
        assert!(r.iter().all(|v| v.norm() < 1e-15));
    }

    fn random_game() -> impl Strategy<Value = Game> {
        prop::collection::vec(1usize..=2, 2..=3).prop_flat_map(|dims| {
            let f = GameFormat::new(dims).unwrap();
            let n = f.players() * f.outcome_count();
            prop::collection::vec(-5.0f64..5.0, n).prop_map(move |p| Game::new(f.clone(), p).unwrap())
        })
    }

    proptest! {
        #[test]
        fn equations_are_multilinear_in_opponents(g in random_game()) {
            let f = g.format().clone();
            let sys = build_system_e(&g, &Support::full(&f)).unwrap();
            prop_assert!(sys.is_square());
            for (e, eq) in sys.equations().iter().enumerate() {
                let (owner, _) = f.unflatten(e).unwrap();
                for v in 0..sys.nvars() {
                    prop_assert!(eq.degree_in(v) <= 1);
                }
                for v in eq.variables() {
                    prop_assert_ne!(f.block_of(v).unwrap(), owner);
                }
                for (_, m) in eq.terms() {
                    let mut blocks: Vec<usize> = m.exponents().iter().map(|&(v, _)| f.block_of(v).unwrap()).collect();
                    let n = blocks.len();
                    blocks.dedup();
                    prop_assert_eq!(blocks.len(), n);
                }
            }
        }

        #[test]
        fn roots_mean_indifference(g in random_game(), seed in prop::collection::vec(0.05f64..1.0, 12)) {
            let f = g.format().clone();
            let sys = build_system_e(&g, &Support::full(&f)).unwrap();
            let mut probs = Vec::new();
            let mut it = seed.iter();
            for i in 0..f.players() {
                let raw: Vec<f64> = (0..f.strategies(i)).map(|_| *it.next().unwrap()).collect();
                let s: f64 = raw.iter().sum();
                probs.push(raw.iter().map(|x| x / s).collect::<Vec<_>>());
            }
            let profile = MixedProfile::new(probs);
            let point: Vec<Complex64> = (0..f.total_dim())
                .map(|n| { let (i, j) = f.unflatten(n).unwrap(); c(profile.prob(i, j)) })
                .collect();
            let vals = sys.evaluate(&point).unwrap();
            for (n, v) in vals.iter().enumerate() {
                let (i, j) = f.unflatten(n).unwrap();
                let diff = g.payoff_against(i, j, &profile).unwrap() - g.payoff_against(i, 0, &profile).unwrap();
                prop_assert!((v.re - diff).abs() < 1e-9);
                prop_assert!(v.im == 0.0);
            }
        }

        #[test]
        fn jacobian_matches_central_differences(
            g in random_game(),
            pts in prop::collection::vec((-2.0f64..2.0, -2.0f64..2.0), 6)
        ) {
            let f = g.format().clone();
            let sys = build_system_e(&g, &Support::full(&f)).unwrap();
            let x: Vec<Complex64> = pts.iter().take(sys.nvars()).map(|&(a, b)| Complex64::new(a, b)).collect();
            let jac = sys.jacobian(&x).unwrap();
            let h = 1e-6;
            for v in 0..sys.nvars() {
                let mut plus = x.clone();
                let mut minus = x.clone();
                plus[v] += h;
                minus[v] -= h;
                let fp = sys.evaluate(&plus).unwrap();
                let fm = sys.evaluate(&minus).unwrap();
                for e in 0..sys.len() {
                    let fd = (fp[e] - fm[e]) / (2.0 * h);
                    let scale = jac[e][v].norm().max(1.0);
                    prop_assert!((fd - jac[e][v]).norm() <= 1e-5 * scale);
                }
            }
        }
    }
}
