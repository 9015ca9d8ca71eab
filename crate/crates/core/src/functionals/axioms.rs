//! Seeded randomized checking of monotonicity, homogeneity and weak
//! additivity for arbitrary functionals.

use std::fmt;
use std::panic::{catch_unwind, AssertUnwindSafe};

use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::Term;
use crate::rational::{int, ratio, to_text};
use crate::setkit::GroundSet;
use crate::{Error, Rational, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Axiom {
    /// `f ≤ g ⇒ u(f) ≤ u(g)`.
    Monotonicity,
    /// `u(k·f) = k·u(f)`.
    Homogeneity,
    /// `u(f + c) = u(f) + c`.
    WeakAdditivity,
    /// `u(1) = 1`, checked in place of homogeneity in normalized mode.
    Normalization,
    /// The functional panicked on the recorded input.
    Panicked,
}

impl Axiom {
    pub fn name(self) -> &'static str {
        match self {
            Axiom::Monotonicity => "monotonicity",
            Axiom::Homogeneity => "homogeneity",
            Axiom::WeakAdditivity => "weak-additivity",
            Axiom::Normalization => "normalization",
            Axiom::Panicked => "panicked",
        }
    }
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// The inputs of a failed check. `expected` is what the axiom demands
/// and `actual` what the functional returned; for monotonicity they are
/// `u(f)` and `u(g)` with `u(f) > u(g)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Counterexample {
    pub trial: usize,
    pub axiom: Axiom,
    pub f: Vec<Rational>,
    pub g: Option<Vec<Rational>>,
    pub scalar: Option<Rational>,
    pub expected: Option<Rational>,
    pub actual: Option<Rational>,
}

impl fmt::Display for Counterexample {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list = |v: &[Rational]| v.iter().map(to_text).collect::<Vec<_>>().join(",");
        write!(out, "trial {}: {} fails at f=({})", self.trial, self.axiom, list(&self.f))?;
        if let Some(g) = &self.g {
            write!(out, " g=({})", list(g))?;
        }
        if let Some(k) = &self.scalar {
            write!(out, " k={}", to_text(k))?;
        }
        if let (Some(e), Some(a)) = (&self.expected, &self.actual) {
            write!(out, " expected {} got {}", to_text(e), to_text(a))?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AxiomOutcome {
    Pass { trials: usize },
    Counterexample(Box<Counterexample>),
}

impl AxiomOutcome {
    pub fn is_pass(&self) -> bool {
        matches!(self, AxiomOutcome::Pass { .. })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AxiomConfig {
    pub trials: usize,
    pub seed: u64,
    pub normalized: bool,
}

impl Default for AxiomConfig {
    fn default() -> Self {
        AxiomConfig { trials: 500, seed: 0, normalized: false }
    }
}

struct Sample {
    f: Vec<Rational>,
    g: Vec<Rational>,
    k: Rational,
    c: Rational,
}

fn random_rational(rng: &mut ChaCha8Rng, bound: i64) -> Rational {
    let d = rng.gen_range(1..=16i64);
    ratio(rng.gen_range(-bound * d..=bound * d), d)
}

/// Trial `t` draws from its own stream of the seeded generator, so the
/// samples do not depend on how trials are spread over threads. The
/// scalar cycles through `2, −1, 0` before random values in `[−4, 4]`.
fn sample(n: usize, seed: u64, trial: usize) -> Sample {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial as u64);
    let d = rng.gen_range(1..=16i64);
    let f: Vec<Rational> = (0..n).map(|_| ratio(rng.gen_range(-3 * d..=3 * d), d)).collect();
    let g =
        f.iter().map(|v| if rng.gen_bool(0.3) { v.clone() } else { v + ratio(rng.gen_range(0..=2 * d), d) }).collect();
    let k = match trial % 5 {
        0 => int(2),
        1 => int(-1),
        2 => int(0),
        _ => random_rational(&mut rng, 4),
    };
    let c = random_rational(&mut rng, 4);
    Sample { f, g, k, c }
}

fn check_trial<F>(u: &F, n: usize, config: &AxiomConfig, trial: usize) -> Option<Counterexample>
where
    F: Fn(&[Rational]) -> Rational + Sync,
{
    let Sample { f, g, k, c } = sample(n, config.seed, trial);
    let base = Counterexample {
        trial,
        axiom: Axiom::Panicked,
        f: f.clone(),
        g: None,
        scalar: None,
        expected: None,
        actual: None,
    };
    let call = |input: &[Rational]| catch_unwind(AssertUnwindSafe(|| u(input)));
    let panicked = |input: &[Rational]| Counterexample { f: input.to_vec(), ..base.clone() };

    let Ok(uf) = call(&f) else { return Some(panicked(&f)) };

    if config.normalized {
        let ones = vec![Rational::one(); n];
        let Ok(u1) = call(&ones) else { return Some(panicked(&ones)) };
        if !u1.is_one() {
            return Some(Counterexample {
                axiom: Axiom::Normalization,
                f: ones,
                expected: Some(Rational::one()),
                actual: Some(u1),
                ..base
            });
        }
    } else {
        let kf: Vec<Rational> = f.iter().map(|v| &k * v).collect();
        let Ok(ukf) = call(&kf) else { return Some(panicked(&kf)) };
        let expected = &k * &uf;
        if ukf != expected {
            return Some(Counterexample {
                axiom: Axiom::Homogeneity,
                scalar: Some(k),
                expected: Some(expected),
                actual: Some(ukf),
                ..base
            });
        }
    }

    let shifted: Vec<Rational> = f.iter().map(|v| v + &c).collect();
    let Ok(ushift) = call(&shifted) else { return Some(panicked(&shifted)) };
    let expected = &uf + &c;
    if ushift != expected {
        return Some(Counterexample {
            axiom: Axiom::WeakAdditivity,
            scalar: Some(c),
            expected: Some(expected),
            actual: Some(ushift),
            ..base
        });
    }

    let Ok(ug) = call(&g) else { return Some(panicked(&g)) };
    if uf > ug {
        return Some(Counterexample {
            axiom: Axiom::Monotonicity,
            g: Some(g),
            expected: Some(uf),
            actual: Some(ug),
            ..base
        });
    }
    None
}

/// Runs `config.trials` seeded trials against `u` on functions over
/// `ground`. Each trial checks homogeneity (or `u(1) = 1` when
/// normalized), then weak additivity, then monotonicity. The reported
/// counterexample is the one from the lowest failing trial, whatever the
/// thread count of the current rayon pool.
pub fn axiom_check<F>(u: F, ground: GroundSet, config: &AxiomConfig) -> AxiomOutcome
where
    F: Fn(&[Rational]) -> Rational + Sync,
{
    let n = ground.len();
    let found = (0..config.trials).into_par_iter().find_map_first(|trial| check_trial(&u, n, config, trial));
    match found {
        Some(cx) => AxiomOutcome::Counterexample(Box::new(cx)),
        None => AxiomOutcome::Pass { trials: config.trials },
    }
}

/// [`axiom_check`] for a term, after checking that it lives on `ground`.
pub fn axiom_check_term(term: &Term, ground: GroundSet, config: &AxiomConfig) -> Result<AxiomOutcome> {
    term.validate()?;
    if !term.fits(ground.len()) {
        return Err(Error::GroundMismatch { expected: term.min_ground()?, found: ground.len() });
    }
    Ok(axiom_check(|f: &[Rational]| term.eval(f), ground, config))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::setkit::Subset;

    fn g(n: usize) -> GroundSet {
        GroundSet::new(n).unwrap()
    }

    #[test]
    fn midrange_passes() {
        let t = Term::midrange(g(3).full()).unwrap();
        assert!(axiom_check_term(&t, g(3), &AxiomConfig::default()).unwrap().is_pass());
    }

    #[test]
    fn max_plus_min_breaks_weak_additivity() {
        let u = |f: &[Rational]| f.iter().max().unwrap() + f.iter().min().unwrap();
        match axiom_check(u, g(3), &AxiomConfig::default()) {
            AxiomOutcome::Counterexample(cx) => assert_eq!(cx.axiom, Axiom::WeakAdditivity),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn square_breaks_homogeneity() {
        let u = |f: &[Rational]| &f[0] * &f[0];
        match axiom_check(u, g(3), &AxiomConfig::default()) {
            AxiomOutcome::Counterexample(cx) => assert_eq!(cx.axiom, Axiom::Homogeneity),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn bare_max_fails_negative_scalars() {
        let t = Term::MaxOver(g(2).full());
        match axiom_check_term(&t, g(2), &AxiomConfig::default()).unwrap() {
            AxiomOutcome::Counterexample(cx) => {
                assert_eq!(cx.axiom, Axiom::Homogeneity);
                assert!(cx.scalar.unwrap() < int(0));
            }
            other => panic!("{other:?}"),
        }
        assert!(axiom_check_term(&Term::MaxOver(Subset::singleton(1)), g(2), &AxiomConfig::default())
            .unwrap()
            .is_pass());
    }

    #[test]
    fn normalized_mode() {
        let config = AxiomConfig { normalized: true, ..AxiomConfig::default() };
        // max is in O(X) though not homogeneous for k < 0
        assert!(axiom_check_term(&Term::MaxOver(g(3).full()), g(3), &config).unwrap().is_pass());
        let double = |f: &[Rational]| int(2) * f.iter().max().unwrap();
        match axiom_check(double, g(3), &config) {
            AxiomOutcome::Counterexample(cx) => assert_eq!(cx.axiom, Axiom::Normalization),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn panics_are_counterexamples() {
        let boom = |f: &[Rational]| -> Rational {
            if f[0] > int(1) {
                panic!("boom")
            }
            f[0].clone()
        };
        let prev = std::panic::take_hook();
        std::panic::set_hook(Box::new(|_| {}));
        let outcome = axiom_check(boom, g(2), &AxiomConfig::default());
        std::panic::set_hook(prev);
        match outcome {
            AxiomOutcome::Counterexample(cx) => assert_eq!(cx.axiom, Axiom::Panicked),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn deterministic_across_pools() {
        let u = |f: &[Rational]| f.iter().max().unwrap() + f.iter().min().unwrap();
        let run = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| axiom_check(u, g(4), &AxiomConfig { trials: 200, seed: 9, normalized: false }))
        };
        let one = run(1);
        assert_eq!(one, run(2));
        assert_eq!(one, run(8));
    }
}
