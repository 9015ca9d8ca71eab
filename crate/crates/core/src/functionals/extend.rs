//! One-step extension of a partial functional from a generated subspace.
//!
//! A generated subspace is given by finitely many functions `b` with
//! assigned values `v_b`; it consists of the functions `k·b + c` (and the
//! constants, with `c ↦ c`). Adding a new function `φ₀` with value `p`
//! keeps the partial functional monotone exactly when `p` lies between
//! the lower envelope `sup{k·v_b + c : k·b + c ≤ φ₀}` and the upper
//! envelope `inf{k·v_b + c : k·b + c ≥ φ₀}`.

use std::fmt;

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::axioms::{Axiom, Counterexample};
use super::PointFunction;
use crate::rational::{int, ratio, to_text};
use crate::setkit::GroundSet;
use crate::{Error, Rational, Result};

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Generator {
    pub b: Vec<Rational>,
    pub v: Rational,
}

impl Generator {
    pub fn new(b: Vec<Rational>, v: Rational) -> Self {
        Generator { b, v }
    }
}

/// The admissible values for a new generator.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Interval {
    pub lower: Rational,
    pub upper: Rational,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Default)]
pub enum ExtensionChoice {
    Lower,
    #[default]
    Midpoint,
    Upper,
}

impl Interval {
    pub fn choose(&self, choice: ExtensionChoice) -> Rational {
        match choice {
            ExtensionChoice::Lower => self.lower.clone(),
            ExtensionChoice::Midpoint => (&self.lower + &self.upper) * ratio(1, 2),
            ExtensionChoice::Upper => self.upper.clone(),
        }
    }

    pub fn contains(&self, p: &Rational) -> bool {
        &self.lower <= p && p <= &self.upper
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", to_text(&self.lower), to_text(&self.upper))
    }
}

/// Finitely many generators with assigned values, validated to induce a
/// single-valued monotone partial functional.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct GeneratedSubspace {
    ground: GroundSet,
    generators: Vec<Generator>,
}

type Point = (Rational, Rational);

fn cross(o: &Point, a: &Point, b: &Point) -> Rational {
    (&a.0 - &o.0) * (&b.1 - &o.1) - (&a.1 - &o.1) * (&b.0 - &o.0)
}

fn on_segment(p: &Point, a: &Point, b: &Point) -> bool {
    cross(a, b, p).is_zero()
        && a.0.clone().min(b.0.clone()) <= p.0
        && p.0 <= a.0.clone().max(b.0.clone())
        && a.1.clone().min(b.1.clone()) <= p.1
        && p.1 <= a.1.clone().max(b.1.clone())
}

fn in_triangle(p: &Point, a: &Point, b: &Point, c: &Point) -> bool {
    let signs = [cross(a, b, p), cross(b, c, p), cross(c, a, p)];
    signs.iter().all(|s| s >= &Rational::zero()) || signs.iter().all(|s| s <= &Rational::zero())
}

/// Exact membership of `p` in the convex hull of `points`: in the plane
/// the hull is covered by the segments and triangles on its points.
fn in_hull(p: &Point, points: &[Point]) -> bool {
    let mut pts = points.to_vec();
    pts.sort();
    pts.dedup();
    let m = pts.len();
    for i in 0..m {
        if &pts[i] == p {
            return true;
        }
        for j in i + 1..m {
            if on_segment(p, &pts[i], &pts[j]) {
                return true;
            }
            for k in j + 1..m {
                if !cross(&pts[i], &pts[j], &pts[k]).is_zero() && in_triangle(p, &pts[i], &pts[j], &pts[k]) {
                    return true;
                }
            }
        }
    }
    false
}

impl GeneratedSubspace {
    /// Checks that `k·b_i + c ≤ k′·b_j + c′` always forces
    /// `k·v_i + c ≤ k′·v_j + c′`, over every pair of generators including
    /// the constant `1 ↦ 1`. For one pair this says that `(v_i, v_j)`
    /// lies in the convex hull of the points `(b_i(x), b_j(x))`.
    pub fn new(ground: GroundSet, generators: Vec<Generator>) -> Result<Self> {
        if let Some(bad) = generators.iter().find(|g| g.b.len() != ground.len()) {
            return Err(Error::GroundMismatch { expected: ground.len(), found: bad.b.len() });
        }
        let space = GeneratedSubspace { ground, generators };
        let all = space.with_constant();
        for (i, gi) in all.iter().enumerate() {
            for (j, gj) in all.iter().enumerate().skip(i) {
                let points: Vec<Point> = gi.b.iter().cloned().zip(gj.b.iter().cloned()).collect();
                if !in_hull(&(gi.v.clone(), gj.v.clone()), &points) {
                    return Err(Error::Inconsistent(format!(
                        "values of generators {} and {} admit no monotone functional",
                        label(i, all.len()),
                        label(j, all.len())
                    )));
                }
            }
        }
        Ok(space)
    }

    /// Only the implicit constant generator.
    pub fn constants(ground: GroundSet) -> Self {
        GeneratedSubspace { ground, generators: Vec::new() }
    }

    pub fn ground(&self) -> GroundSet {
        self.ground
    }

    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    fn with_constant(&self) -> Vec<Generator> {
        let mut all = self.generators.clone();
        all.push(Generator::new(vec![Rational::one(); self.ground.len()], Rational::one()));
        all
    }

    /// The value of the partial functional at `f`, when `f` has the form
    /// `k·b + c` for some generator `b` or is constant.
    pub fn value_of(&self, f: &[Rational]) -> Option<Rational> {
        self.with_constant().iter().find_map(|g| {
            let (k, c) = affine_fit(&g.b, f)?;
            Some(k * &g.v + c)
        })
    }

    /// The admissible interval for the value of `φ₀`.
    ///
    /// For each generator `b` the lower envelope
    /// `L_b(k) = k·v_b + min_x(φ₀(x) − k·b(x))` is concave and piecewise
    /// linear in `k`, with breakpoints where the minimizing point changes.
    /// Its supremum is attained at `k = 0` or at one of the `k` solving
    /// `φ₀(x) − k·b(x) = φ₀(x′) − k·b(x′)`. The upper envelope is
    /// symmetric. The interval is the intersection over all generators,
    /// the constant one included.
    pub fn extend_one(&self, phi0: &PointFunction) -> Result<Interval> {
        if phi0.ground() != self.ground {
            return Err(Error::GroundMismatch { expected: self.ground.len(), found: phi0.ground().len() });
        }
        let phi = phi0.values();
        let all = self.with_constant();
        if all.iter().any(|g| g.b == phi) {
            return Err(Error::InSubspace);
        }
        let mut lower: Option<Rational> = None;
        let mut upper: Option<Rational> = None;
        for g in &all {
            let ks = breakpoints(&g.b, phi);
            let best_low = ks.iter().map(|k| envelope(g, phi, k, false)).max().expect("k = 0 is a candidate");
            let best_high = ks.iter().map(|k| envelope(g, phi, k, true)).min().expect("k = 0 is a candidate");
            lower = Some(lower.map_or(best_low.clone(), |l| l.max(best_low)));
            upper = Some(upper.map_or(best_high.clone(), |u| u.min(best_high)));
        }
        let (lower, upper) = (lower.expect("constant generator"), upper.expect("constant generator"));
        if lower > upper {
            return Err(Error::Inconsistent(format!("empty interval [{}, {}]", to_text(&lower), to_text(&upper))));
        }
        Ok(Interval { lower, upper })
    }

    /// Adds `φ₀` with the chosen admissible value.
    pub fn extend(&self, phi0: &PointFunction, choice: ExtensionChoice) -> Result<(GeneratedSubspace, Rational)> {
        let p = self.extend_one(phi0)?.choose(choice);
        let mut generators = self.generators.clone();
        generators.push(Generator::new(phi0.values().to_vec(), p.clone()));
        Ok((GeneratedSubspace::new(self.ground, generators)?, p))
    }

    /// Sampled monotonicity check on elements of the subspace: each trial
    /// draws `f = k·b + c`, then `g = k′·b′ + c′` with `c′` large enough
    /// that `f ≤ g`, and compares the assigned values.
    pub fn sample_check(&self, trials: usize, seed: u64) -> Option<Counterexample> {
        let all = self.with_constant();
        (0..trials).find_map(|trial| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(trial as u64);
            let draw = |rng: &mut ChaCha8Rng| {
                let g = &all[rng.gen_range(0..all.len())];
                let d = rng.gen_range(1..=16i64);
                let k = ratio(rng.gen_range(-4 * d..=4 * d), d);
                (g, k)
            };
            let (gf, k) = draw(&mut rng);
            let c = ratio(rng.gen_range(-32..=32), 8);
            let f: Vec<Rational> = gf.b.iter().map(|b| &k * b + &c).collect();
            let (gg, k2) = draw(&mut rng);
            let slack = if rng.gen_bool(0.5) { int(0) } else { ratio(rng.gen_range(0..=16), 8) };
            let c2 = f.iter().zip(&gg.b).map(|(fx, b)| fx - &k2 * b).max().expect("nonempty ground") + slack;
            let g: Vec<Rational> = gg.b.iter().map(|b| &k2 * b + &c2).collect();
            let uf = &k * &gf.v + &c;
            let ug = &k2 * &gg.v + &c2;
            (uf > ug).then_some(()).map(|()| Counterexample {
                trial,
                axiom: Axiom::Monotonicity,
                f,
                g: Some(g),
                scalar: None,
                expected: Some(uf),
                actual: Some(ug),
            })
        })
    }
}

fn label(i: usize, len: usize) -> String {
    if i + 1 == len {
        "constant".into()
    } else {
        i.to_string()
    }
}

/// `(k, c)` with `f = k·b + c`, if any.
fn affine_fit(b: &[Rational], f: &[Rational]) -> Option<(Rational, Rational)> {
    let pivot = (1..b.len()).find(|&x| b[x] != b[0]);
    let (k, c) = match pivot {
        Some(x) => {
            let k = (&f[x] - &f[0]) / (&b[x] - &b[0]);
            let c = &f[0] - &k * &b[0];
            (k, c)
        }
        None => {
            // b is constant: only constants are reachable, as c
            if f.windows(2).any(|w| w[0] != w[1]) {
                return None;
            }
            (Rational::zero(), f[0].clone())
        }
    };
    b.iter().zip(f).all(|(bx, fx)| &k * bx + &c == *fx).then_some((k, c))
}

/// `k = 0` and every `k` where two points tie in `φ₀(x) − k·b(x)`.
fn breakpoints(b: &[Rational], phi: &[Rational]) -> Vec<Rational> {
    let mut ks = vec![Rational::zero()];
    for x in 0..b.len() {
        for y in x + 1..b.len() {
            if b[x] != b[y] {
                ks.push((&phi[x] - &phi[y]) / (&b[x] - &b[y]));
            }
        }
    }
    ks.sort();
    ks.dedup();
    ks
}

/// `k·v_b + min_x(φ₀(x) − k·b(x))`, or the max version for the upper
/// envelope.
fn envelope(g: &Generator, phi: &[Rational], k: &Rational, upper: bool) -> Rational {
    let shifted = phi.iter().zip(&g.b).map(|(p, b)| p - k * b);
    let c = if upper { shifted.max() } else { shifted.min() }.expect("nonempty ground");
    k * &g.v + c
}
