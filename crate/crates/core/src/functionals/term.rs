//! A closed term language for functionals on `C(X)`.

use std::collections::HashMap;

use num_traits::{One, Signed};
use rand::seq::SliceRandom;
use rand::Rng;

use super::PointFunction;
use crate::rational::{int, ratio};
use crate::setkit::{GroundSet, PointMap, SetFamily, Subset};
use crate::superext::{enumerate_mls, MaxLinkedSystem};
use crate::{Error, Rational, Result};

/// Largest ground on which [`Term::support`] runs its grid scan.
pub const SUPPORT_MAX_N: usize = 8;

/// A functional on `C(X)`.
///
/// Every term is a Choquet integral against the capacity
/// `v(A) = t(1_A)`, so all terms are monotone and weakly additive, and
/// homogeneous for `k ≥ 0`. Homogeneity for negative `k` holds exactly
/// when the capacity is self-dual, see [`Term::is_self_dual`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Term {
    /// `f ↦ f(x)`.
    Dirac(usize),
    /// `φ_η`.
    MaxMin(MaxLinkedSystem),
    /// `f ↦ min f|F`.
    MinOver(Subset),
    /// `f ↦ max f|F`.
    MaxOver(Subset),
    /// `f ↦ Σ w_x f(x)`; the weight vector fixes the ground set.
    Linear(Vec<Rational>),
    /// `f ↦ Σ w_i t_i(f)`.
    Convex(Vec<(Rational, Term)>),
    /// `Precompose(m, t)` with `m: A → B` and `t` on `A` is the term on
    /// `B` given by `h ↦ t(h ∘ m)`. It also reads functions on any ground
    /// containing `B`.
    Precompose(PointMap, Box<Term>),
}

/// Which ground sizes a term accepts.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Arity {
    min: usize,
    exact: Option<usize>,
}

impl Arity {
    fn at_least(min: usize) -> Self {
        Arity { min, exact: None }
    }

    fn exactly(n: usize) -> Self {
        Arity { min: n, exact: Some(n) }
    }

    fn fits(self, n: usize) -> bool {
        n >= self.min && self.exact.is_none_or(|e| e == n)
    }

    fn join(self, other: Arity) -> Option<Arity> {
        let exact = match (self.exact, other.exact) {
            (Some(a), Some(b)) if a != b => return None,
            (a, b) => a.or(b),
        };
        let arity = Arity { min: self.min.max(other.min), exact };
        exact.is_none_or(|e| e >= arity.min).then_some(arity)
    }
}

fn highest_point(s: Subset) -> usize {
    32 - s.0.leading_zeros() as usize
}

impl Term {
    pub fn dirac(x: usize) -> Term {
        Term::Dirac(x)
    }

    pub fn maxmin(eta: MaxLinkedSystem) -> Term {
        Term::MaxMin(eta)
    }

    pub fn min_over(set: Subset) -> Result<Term> {
        let t = Term::MinOver(set);
        t.validate()?;
        Ok(t)
    }

    pub fn max_over(set: Subset) -> Result<Term> {
        let t = Term::MaxOver(set);
        t.validate()?;
        Ok(t)
    }

    pub fn linear(weights: Vec<Rational>) -> Result<Term> {
        let t = Term::Linear(weights);
        t.validate()?;
        Ok(t)
    }

    /// The uniform measure on `n` points.
    pub fn uniform(n: usize) -> Result<Term> {
        Term::linear(vec![ratio(1, n.max(1) as i64); n])
    }

    pub fn convex(parts: Vec<(Rational, Term)>) -> Result<Term> {
        let t = Term::Convex(parts);
        t.validate()?;
        Ok(t)
    }

    pub fn precompose(map: PointMap, inner: Term) -> Result<Term> {
        let t = Term::Precompose(map, Box::new(inner));
        t.validate()?;
        Ok(t)
    }

    /// `½·max f|F + ½·min f|F`.
    pub fn midrange(set: Subset) -> Result<Term> {
        Term::convex(vec![(ratio(1, 2), Term::max_over(set)?), (ratio(1, 2), Term::min_over(set)?)])
    }

    /// Checks the structural invariants: nonempty `MinOver`/`MaxOver`
    /// sets, weights that are nonnegative (linear) or positive (convex)
    /// and sum to one, and consistent ground sizes throughout.
    pub fn validate(&self) -> Result<()> {
        self.check_structure()?;
        self.arity().map(|_| ())
    }

    fn check_structure(&self) -> Result<()> {
        match self {
            Term::Dirac(_) | Term::MaxMin(_) => Ok(()),
            Term::MinOver(s) | Term::MaxOver(s) => {
                if s.is_empty() {
                    return Err(Error::InvalidTerm("min/max over the empty set".into()));
                }
                Ok(())
            }
            Term::Linear(w) => {
                if w.is_empty() || w.iter().any(Signed::is_negative) {
                    return Err(Error::InvalidTerm("linear weights must be nonnegative".into()));
                }
                if w.iter().sum::<Rational>() != Rational::one() {
                    return Err(Error::InvalidTerm("linear weights must sum to 1".into()));
                }
                Ok(())
            }
            Term::Convex(parts) => {
                if parts.is_empty() || parts.iter().any(|(w, _)| !w.is_positive()) {
                    return Err(Error::InvalidTerm("convex weights must be positive".into()));
                }
                if parts.iter().map(|(w, _)| w).sum::<Rational>() != Rational::one() {
                    return Err(Error::InvalidTerm("convex weights must sum to 1".into()));
                }
                parts.iter().try_for_each(|(_, t)| t.check_structure())
            }
            Term::Precompose(map, inner) => {
                inner.check_structure()?;
                if !inner.arity()?.fits(map.domain().len()) {
                    return Err(Error::InvalidTerm(format!(
                        "inner term does not live on the {} points of the map's domain",
                        map.domain().len()
                    )));
                }
                Ok(())
            }
        }
    }

    fn arity(&self) -> Result<Arity> {
        Ok(match self {
            Term::Dirac(x) => Arity::at_least(x + 1),
            Term::MaxMin(eta) => Arity::at_least(eta.ground().len()),
            Term::MinOver(s) | Term::MaxOver(s) => Arity::at_least(highest_point(*s)),
            Term::Linear(w) => Arity::exactly(w.len()),
            Term::Convex(parts) => {
                let mut arity = Arity::at_least(1);
                for (_, t) in parts {
                    arity = arity
                        .join(t.arity()?)
                        .ok_or_else(|| Error::InvalidTerm("convex parts live on different grounds".into()))?;
                }
                arity
            }
            Term::Precompose(map, _) => Arity::at_least(map.codomain().len()),
        })
    }

    /// The smallest ground size the term can be evaluated on.
    pub fn min_ground(&self) -> Result<usize> {
        Ok(self.arity()?.min.max(1))
    }

    /// Whether the term can be evaluated on functions over `n` points.
    pub fn fits(&self, n: usize) -> bool {
        self.arity().is_ok_and(|a| a.fits(n))
    }

    /// Exact value on `f`.
    pub fn evaluate(&self, f: &PointFunction) -> Result<Rational> {
        self.evaluate_values(f.values())
    }

    pub fn evaluate_values(&self, f: &[Rational]) -> Result<Rational> {
        let arity = self.arity()?;
        if !arity.fits(f.len()) {
            return Err(Error::GroundMismatch { expected: arity.exact.unwrap_or(arity.min), found: f.len() });
        }
        Ok(self.eval(f))
    }

    /// Evaluation without the ground check.
    pub(crate) fn eval(&self, f: &[Rational]) -> Rational {
        match self {
            Term::Dirac(x) => f[*x].clone(),
            Term::MaxMin(eta) => eta
                .minimal()
                .iter()
                .map(|s| s.points().map(|x| &f[x]).min().expect("nonempty member"))
                .max()
                .expect("nonempty system")
                .clone(),
            Term::MinOver(s) => s.points().map(|x| &f[x]).min().expect("nonempty").clone(),
            Term::MaxOver(s) => s.points().map(|x| &f[x]).max().expect("nonempty").clone(),
            Term::Linear(w) => w.iter().zip(f).map(|(w, v)| w * v).sum(),
            Term::Convex(parts) => parts.iter().map(|(w, t)| w * t.eval(f)).sum(),
            Term::Precompose(map, inner) => {
                let pulled: Vec<Rational> = map.images().iter().map(|&y| f[y].clone()).collect();
                inner.eval(&pulled)
            }
        }
    }

    /// The term for the dual capacity, `f ↦ −t(−f)`.
    pub fn dual(&self) -> Term {
        match self {
            Term::MinOver(s) => Term::MaxOver(*s),
            Term::MaxOver(s) => Term::MinOver(*s),
            Term::Convex(parts) => Term::Convex(parts.iter().map(|(w, t)| (w.clone(), t.dual())).collect()),
            Term::Precompose(map, inner) => Term::Precompose(map.clone(), Box::new(inner.dual())),
            Term::Dirac(_) | Term::MaxMin(_) | Term::Linear(_) => self.clone(),
        }
    }

    /// `v(A) = t(1_A)`, indexed by subset mask.
    pub fn capacity(&self, ground: GroundSet) -> Result<Vec<Rational>> {
        ground.subsets().map(|a| self.evaluate(&PointFunction::indicator(ground, a))).collect()
    }

    /// `v(A) + v(Aᶜ) = 1` for every `A`: the condition for `t(k·f) = k·t(f)`
    /// at negative `k`.
    pub fn is_self_dual(&self, ground: GroundSet) -> Result<bool> {
        let v = self.capacity(ground)?;
        Ok(ground.subsets().all(|a| &v[a.0 as usize] + &v[ground.complement(a).0 as usize] == Rational::one()))
    }

    /// The smallest `H` (in canonical subset order) such that the value
    /// depends only on `f|H`, found by scanning every function with values
    /// in `{0, 1, 2}`.
    pub fn support(&self, ground: GroundSet) -> Result<Subset> {
        if ground.len() > SUPPORT_MAX_N {
            return Err(Error::TooLarge { what: "support scan ground", size: ground.len(), limit: SUPPORT_MAX_N });
        }
        if !self.fits(ground.len()) {
            return Err(Error::GroundMismatch { expected: self.min_ground()?, found: ground.len() });
        }
        let n = ground.len();
        let cells = 3usize.pow(n as u32);
        let digits = |code: usize, x: usize| (code / 3usize.pow(x as u32)) % 3;
        let values: Vec<Rational> = (0..cells)
            .map(|code| {
                let f: Vec<Rational> = (0..n).map(|x| int(digits(code, x) as i64)).collect();
                self.eval(&f)
            })
            .collect();
        let mut candidates: Vec<Subset> = ground.subsets().collect();
        candidates.sort_unstable();
        for h in candidates {
            let mut seen: HashMap<usize, &Rational> = HashMap::new();
            let factors = (0..cells).all(|code| {
                let key = h.points().map(|x| digits(code, x) * 3usize.pow(x as u32)).sum();
                *seen.entry(key).or_insert(&values[code]) == &values[code]
            });
            if factors {
                return Ok(h);
            }
        }
        unreachable!("the full set always factors")
    }
}

/// `S(f)(μ)`: the term on `Y` given by `h ↦ μ(h ∘ f)`.
pub fn s_map(f: &PointMap, mu: Term) -> Result<Term> {
    Term::precompose(f.clone(), mu)
}

/// A preimage of `ν` under `S(f)` for surjective `f: X → Y`: `ν`
/// precomposed with the section sending `y` to its least preimage.
pub fn s_preimage(f: &PointMap, nu: Term) -> Result<Term> {
    let section = f
        .codomain()
        .points()
        .map(|y| f.images().iter().position(|&image| image == y).ok_or(Error::NotSurjective(y)))
        .collect::<Result<Vec<_>>>()?;
    Term::precompose(PointMap::new(f.codomain(), f.domain(), section)?, nu)
}

/// A random maximal linked system: pairs are visited in random order and
/// each takes a random side among those meeting every chosen set. Some
/// side always qualifies, and the result is up-closed.
pub fn random_mls<R: Rng>(rng: &mut R, ground: GroundSet) -> MaxLinkedSystem {
    let mut pairs = ground.complementary_pairs();
    pairs.shuffle(rng);
    let mut chosen: Vec<Subset> = Vec::with_capacity(pairs.len());
    for (a, b) in pairs {
        let ok = |s: Subset| !s.is_empty() && chosen.iter().all(|c| c.intersects(s));
        let side = match (ok(a), ok(b)) {
            (true, true) => {
                if rng.gen() {
                    a
                } else {
                    b
                }
            }
            (true, false) => a,
            (false, true) => b,
            (false, false) => unreachable!("a linked family always admits one side"),
        };
        chosen.push(side);
    }
    MaxLinkedSystem::from_family(&SetFamily::from_unsorted(ground, chosen)).expect("maximal by construction")
}

fn random_weights<R: Rng>(rng: &mut R, len: usize, allow_zero: bool) -> Vec<Rational> {
    let low = if allow_zero { 0 } else { 1 };
    let mut raw: Vec<i64> = (0..len).map(|_| rng.gen_range(low..=4)).collect();
    if raw.iter().all(|&w| w == 0) {
        raw[rng.gen_range(0..len)] = 1;
    }
    let total: i64 = raw.iter().sum();
    raw.into_iter().map(|w| ratio(w, total)).collect()
}

fn random_nonempty<R: Rng>(rng: &mut R, ground: GroundSet) -> Subset {
    Subset(rng.gen_range(1..ground.subset_count() as u32))
}

/// A random self-dual term on `ground`, nested at most `depth` levels.
pub fn sample_term<R: Rng>(rng: &mut R, ground: GroundSet, depth: usize) -> Term {
    let n = ground.len();
    let kinds = if depth == 0 { 4 } else { 6 };
    match rng.gen_range(0..kinds) {
        0 => Term::Dirac(rng.gen_range(0..n)),
        1 => Term::MaxMin(random_mls(rng, ground)),
        2 => Term::Linear(random_weights(rng, n, true)),
        3 => Term::midrange(random_nonempty(rng, ground)).expect("nonempty set"),
        4 => {
            let count = rng.gen_range(2..=3);
            let weights = random_weights(rng, count, false);
            let parts = weights.into_iter().map(|w| (w, sample_term(rng, ground, depth - 1))).collect();
            Term::Convex(parts)
        }
        _ => {
            let domain = GroundSet::new(rng.gen_range(1..=n)).expect("at most the ground size");
            let images = (0..domain.len()).map(|_| rng.gen_range(0..n)).collect();
            let map = PointMap::new(domain, ground, images).expect("images in range");
            Term::Precompose(map, Box::new(sample_term(rng, domain, depth - 1)))
        }
    }
}

/// A fixed catalogue of self-dual terms on `ground`: every point mass,
/// every `φ_η`, two measures, every midrange, and a few composites.
pub fn constructible_terms(ground: GroundSet) -> Result<Vec<Term>> {
    let n = ground.len();
    let lambda = enumerate_mls(ground)?;
    let mut terms: Vec<Term> = ground.points().map(Term::Dirac).collect();
    terms.extend(lambda.systems().iter().cloned().map(Term::MaxMin));
    terms.push(Term::uniform(n)?);
    let total = (n * (n + 1) / 2) as i64;
    terms.push(Term::linear((1..=n as i64).map(|i| ratio(i, total)).collect())?);
    let mut sets: Vec<Subset> = ground.subsets().filter(|s| !s.is_empty()).collect();
    sets.sort_unstable();
    for s in sets {
        terms.push(Term::midrange(s)?);
    }
    let last = lambda.systems().last().expect("λX is nonempty").clone();
    terms.push(Term::convex(vec![(ratio(1, 3), Term::Dirac(0)), (ratio(2, 3), Term::MaxMin(last.clone()))])?);
    let shift = PointMap::new(ground, ground, ground.points().map(|x| (x + 1) % n).collect())?;
    terms.push(Term::precompose(shift, Term::MaxMin(last))?);
    if n >= 2 {
        let collapse = PointMap::new(ground, GroundSet::new(n - 1)?, (0..n).map(|x| x.saturating_sub(1)).collect())?;
        terms.push(s_preimage(&collapse, Term::uniform(n - 1)?)?);
        terms.push(s_map(&collapse, Term::midrange(ground.full())?)?.pad_to(ground)?);
    }
    Ok(terms)
}

impl Term {
    /// The same functional read on a larger ground set, via the inclusion
    /// of the smaller ground as its first points.
    pub fn pad_to(self, ground: GroundSet) -> Result<Term> {
        if self.fits(ground.len()) {
            return Ok(self);
        }
        let inner_n = self.min_ground()?;
        let inclusion = PointMap::new(GroundSet::new(inner_n)?, ground, (0..inner_n).collect())?;
        Term::precompose(inclusion, self)
    }
}
