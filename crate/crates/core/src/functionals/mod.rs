//! Functionals on `C(X)` for finite discrete `X`: the max-min functional
//! `φ_η`, a small term language for monotone homogeneous weakly additive
//! functionals, axiom checking, and the extension procedure for
//! generated subspaces.

mod axioms;
mod extend;
mod term;

use std::fmt;

use num_traits::{One, Zero};

use crate::setkit::{GroundSet, PointMap, SetFamily, Subset};
use crate::superext::{MaxLinkedSystem, Superextension};
use crate::{Error, Rational, Result};

pub use axioms::{axiom_check, axiom_check_term, Axiom, AxiomConfig, AxiomOutcome, Counterexample};
pub use extend::{ExtensionChoice, GeneratedSubspace, Generator, Interval};
pub use term::{constructible_terms, random_mls, s_map, s_preimage, sample_term, Term, SUPPORT_MAX_N};

/// A real function on a finite discrete ground set, with exact values.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PointFunction {
    ground: GroundSet,
    values: Vec<Rational>,
}

impl PointFunction {
    pub fn new(ground: GroundSet, values: Vec<Rational>) -> Result<Self> {
        if values.len() != ground.len() {
            return Err(Error::GroundMismatch { expected: ground.len(), found: values.len() });
        }
        Ok(PointFunction { ground, values })
    }

    /// The ground set is taken from the length.
    pub fn from_values(values: Vec<Rational>) -> Result<Self> {
        let ground = GroundSet::new(values.len())?;
        Ok(PointFunction { ground, values })
    }

    pub fn from_ints(values: &[i64]) -> Result<Self> {
        PointFunction::from_values(values.iter().map(|&v| Rational::from_integer(v.into())).collect())
    }

    pub fn constant(ground: GroundSet, c: Rational) -> Self {
        PointFunction { ground, values: vec![c; ground.len()] }
    }

    /// `1_A`.
    pub fn indicator(ground: GroundSet, set: Subset) -> Self {
        let values =
            ground.points().map(|x| if set.contains(x) { Rational::one() } else { Rational::zero() }).collect();
        PointFunction { ground, values }
    }

    pub fn ground(&self) -> GroundSet {
        self.ground
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Rational> {
        self.values
    }

    pub fn get(&self, x: usize) -> &Rational {
        &self.values[x]
    }

    /// `self ∘ f`, for `self` defined on the codomain of `f`.
    pub fn compose(&self, f: &PointMap) -> Result<PointFunction> {
        if f.codomain() != self.ground {
            return Err(Error::GroundMismatch { expected: self.ground.len(), found: f.codomain().len() });
        }
        let values = f.images().iter().map(|&y| self.values[y].clone()).collect();
        Ok(PointFunction { ground: f.domain(), values })
    }

    /// Minimum over a nonempty set.
    pub fn min_on(&self, set: Subset) -> &Rational {
        set.points().map(|x| &self.values[x]).min().expect("nonempty set")
    }

    pub fn max_on(&self, set: Subset) -> &Rational {
        set.points().map(|x| &self.values[x]).max().expect("nonempty set")
    }
}

impl fmt::Debug for PointFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.values.iter().map(|v| v.to_string()).collect();
        write!(f, "({})", parts.join(", "))
    }
}

/// Every function with values in `levels`, the first point varying
/// fastest.
pub fn grid(ground: GroundSet, levels: &[i64]) -> Vec<PointFunction> {
    let n = ground.len();
    let total = levels.len().pow(n as u32);
    (0..total)
        .map(|mut index| {
            let values = (0..n)
                .map(|_| {
                    let v = levels[index % levels.len()];
                    index /= levels.len();
                    Rational::from_integer(v.into())
                })
                .collect();
            PointFunction { ground, values }
        })
        .collect()
}

/// The grid used for exhaustive checks.
pub const CHECK_LEVELS: [i64; 4] = [-1, 0, 1, 2];

fn check_ground(expected: GroundSet, found: GroundSet) -> Result<()> {
    if expected != found {
        return Err(Error::GroundMismatch { expected: expected.len(), found: found.len() });
    }
    Ok(())
}

/// `φ_η(f)`: the largest minimum of `f` over a member of `η`.
pub fn phi(eta: &MaxLinkedSystem, f: &PointFunction) -> Result<Rational> {
    check_ground(eta.ground(), f.ground())?;
    Ok(max_min(eta.minimal(), f))
}

fn max_min(family: &SetFamily, f: &PointFunction) -> Rational {
    family.iter().map(|s| f.min_on(s)).max().expect("nonempty family").clone()
}

fn min_max(family: &SetFamily, f: &PointFunction) -> Rational {
    family.iter().map(|s| f.max_on(s)).min().expect("nonempty family").clone()
}

/// Both sides of the max-min = min-max identity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Eq1 {
    pub max_min: Rational,
    pub min_max: Rational,
    pub equal: bool,
}

pub fn check_eq1(eta: &MaxLinkedSystem, f: &PointFunction) -> Result<Eq1> {
    check_eq1_family(eta.minimal(), f)
}

/// The same comparison for an arbitrary nonempty family of nonempty
/// sets; only the minimal members matter on either side.
pub fn check_eq1_family(family: &SetFamily, f: &PointFunction) -> Result<Eq1> {
    check_ground(family.ground(), f.ground())?;
    if family.is_empty() || family.contains(Subset::EMPTY) {
        return Err(Error::EmptySet);
    }
    let minimal = family.minimal_members();
    let max_min = max_min(&minimal, f);
    let min_max = min_max(&minimal, f);
    let equal = max_min == min_max;
    Ok(Eq1 { max_min, min_max, equal })
}

/// A 0/1 function with `φ_η = 1` and `φ_ξ = 0`: the indicator of the
/// side of the first complementary pair on which the two systems
/// disagree that belongs to `η`. Swapping the arguments gives `1 − f`.
pub fn separating_function(eta: &MaxLinkedSystem, xi: &MaxLinkedSystem) -> Result<PointFunction> {
    check_ground(eta.ground(), xi.ground())?;
    let ground = eta.ground();
    for (a, b) in ground.complementary_pairs() {
        if eta.contains(a) != xi.contains(a) {
            let side = if eta.contains(a) { a } else { b };
            return Ok(PointFunction::indicator(ground, side));
        }
    }
    Err(Error::EqualSystems)
}

/// `η ↦ φ_η(f)` over all of `λX`, in the order of `lambda`.
pub fn extender_to_lambda(lambda: &Superextension, f: &PointFunction) -> Result<Vec<Rational>> {
    check_ground(lambda.ground(), f.ground())?;
    Ok(lambda.systems().iter().map(|eta| max_min(eta.minimal(), f)).collect())
}

/// A map `C(X) → C(Y)` for `X` embedded in a finite `Y`.
pub trait Extender: Sync {
    fn domain(&self) -> GroundSet;
    fn target_len(&self) -> usize;
    /// Position of each point of `X` in `Y`.
    fn inject(&self) -> &[usize];
    fn extend(&self, f: &PointFunction) -> Vec<Rational>;
}

/// `f ↦ (η ↦ φ_η(f))` with `X` sitting in `λX` as the principal systems.
#[derive(Clone, Debug)]
pub struct LambdaExtender {
    lambda: Superextension,
    inject: Vec<usize>,
}

impl LambdaExtender {
    pub fn new(lambda: Superextension) -> Result<Self> {
        let inject = lambda.ground().points().map(|x| lambda.principal_index(x)).collect::<Result<_>>()?;
        Ok(LambdaExtender { lambda, inject })
    }

    pub fn lambda(&self) -> &Superextension {
        &self.lambda
    }
}

impl Extender for LambdaExtender {
    fn domain(&self) -> GroundSet {
        self.lambda.ground()
    }

    fn target_len(&self) -> usize {
        self.lambda.len()
    }

    fn inject(&self) -> &[usize] {
        &self.inject
    }

    fn extend(&self, f: &PointFunction) -> Vec<Rational> {
        extender_to_lambda(&self.lambda, f).expect("ground checked by caller")
    }
}

/// `X = Y`, `u(f) = f`.
#[derive(Clone, Debug)]
pub struct IdentityExtender {
    ground: GroundSet,
    inject: Vec<usize>,
}

impl IdentityExtender {
    pub fn new(ground: GroundSet) -> Self {
        IdentityExtender { ground, inject: ground.points().collect() }
    }
}

impl Extender for IdentityExtender {
    fn domain(&self) -> GroundSet {
        self.ground
    }

    fn target_len(&self) -> usize {
        self.ground.len()
    }

    fn inject(&self) -> &[usize] {
        &self.inject
    }

    fn extend(&self, f: &PointFunction) -> Vec<Rational> {
        f.values().to_vec()
    }
}

/// `r(y)(f) = u(f)(y)`, one functional on `C(X)` per point of `Y`.
pub struct Retraction<'a, E: Extender + ?Sized> {
    u: &'a E,
}

impl<'a, E: Extender + ?Sized> Retraction<'a, E> {
    pub fn len(&self) -> usize {
        self.u.target_len()
    }

    pub fn is_empty(&self) -> bool {
        self.u.target_len() == 0
    }

    pub fn ground(&self) -> GroundSet {
        self.u.domain()
    }

    pub fn evaluate(&self, y: usize, f: &PointFunction) -> Result<Rational> {
        check_ground(self.u.domain(), f.ground())?;
        Ok(self.u.extend(f).swap_remove(y))
    }

    /// `r(y)` as a plain function on value vectors, for [`axiom_check`].
    pub fn functional(&self, y: usize) -> impl Fn(&[Rational]) -> Rational + Sync + '_ {
        let ground = self.u.domain();
        move |values: &[Rational]| {
            let f = PointFunction::new(ground, values.to_vec()).expect("sampled on the ground set");
            self.u.extend(&f).swap_remove(y)
        }
    }
}

/// Largest ground on which the extender contract is checked over the
/// full grid.
pub const EXTENDER_GRID_MAX_N: usize = 6;

/// Checks that `u(f)` restricts to `f` on `X` for every grid function and
/// wraps `u` as a retraction.
pub fn retraction_from_extender<E: Extender + ?Sized>(u: &E) -> Result<Retraction<'_, E>> {
    let ground = u.domain();
    if ground.len() > EXTENDER_GRID_MAX_N {
        return Err(Error::TooLarge { what: "extender domain", size: ground.len(), limit: EXTENDER_GRID_MAX_N });
    }
    for f in grid(ground, &CHECK_LEVELS) {
        let extended = u.extend(&f);
        if extended.len() != u.target_len() {
            return Err(Error::CarrierMismatch(format!(
                "extender produced {} values for {} points",
                extended.len(),
                u.target_len()
            )));
        }
        if let Some(point) = ground.points().find(|&x| extended[u.inject()[x]] != f.values[x]) {
            return Err(Error::NotAnExtender { point });
        }
    }
    Ok(Retraction { u })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;
    use crate::superext::{enumerate_mls, eta_point};

    fn g(n: usize) -> GroundSet {
        GroundSet::new(n).unwrap()
    }

    fn triangle() -> MaxLinkedSystem {
        let fam = SetFamily::from_points(g(3), &[&[0, 1], &[0, 2], &[1, 2]]).unwrap();
        MaxLinkedSystem::from_family(&fam.up_closure()).unwrap()
    }

    #[test]
    fn phi_examples() {
        let f = PointFunction::from_ints(&[5, 7, 9]).unwrap();
        assert_eq!(phi(&eta_point(g(3), 1).unwrap(), &f).unwrap(), int(7));
        let f = PointFunction::from_ints(&[0, 1, 2]).unwrap();
        assert_eq!(phi(&triangle(), &f).unwrap(), int(1));
        for eta in enumerate_mls(g(3)).unwrap().systems() {
            assert_eq!(phi(eta, &PointFunction::constant(g(3), int(4))).unwrap(), int(4));
        }
        assert!(matches!(
            phi(&triangle(), &PointFunction::from_ints(&[1, 2]).unwrap()),
            Err(Error::GroundMismatch { .. })
        ));
    }

    #[test]
    fn eq1_examples() {
        let f = PointFunction::from_ints(&[0, 1, 2]).unwrap();
        let r = check_eq1(&triangle(), &f).unwrap();
        assert_eq!((r.max_min, r.min_max, r.equal), (int(1), int(1), true));

        let top = SetFamily::from_points(g(3), &[&[0, 1, 2]]).unwrap();
        let r = check_eq1_family(&top, &f).unwrap();
        assert_eq!((r.max_min, r.min_max, r.equal), (int(0), int(2), false));
    }

    #[test]
    fn separating_examples() {
        let (e0, e1) = (eta_point(g(2), 0).unwrap(), eta_point(g(2), 1).unwrap());
        let f = separating_function(&e0, &e1).unwrap();
        assert_eq!(f, PointFunction::from_ints(&[1, 0]).unwrap());
        assert_eq!(separating_function(&e1, &e0).unwrap(), PointFunction::from_ints(&[0, 1]).unwrap());
        assert_eq!(separating_function(&e0, &e0), Err(Error::EqualSystems));

        let e0 = eta_point(g(3), 0).unwrap();
        let f = separating_function(&e0, &triangle()).unwrap();
        assert_eq!(f, PointFunction::from_ints(&[1, 0, 0]).unwrap());
        assert_eq!(phi(&e0, &f).unwrap(), int(1));
        assert_eq!(phi(&triangle(), &f).unwrap(), int(0));
    }

    #[test]
    fn extender_examples() {
        let lambda = enumerate_mls(g(3)).unwrap();
        let f = PointFunction::from_ints(&[5, 7, 9]).unwrap();
        let values = extender_to_lambda(&lambda, &f).unwrap();
        assert_eq!(values[lambda.principal_index(1).unwrap()], int(7));
        let c = extender_to_lambda(&lambda, &PointFunction::constant(g(3), int(3))).unwrap();
        assert!(c.iter().all(|v| *v == int(3)));
        let f = PointFunction::from_ints(&[0, 1, 2]).unwrap();
        let t = lambda.index_of(&triangle()).unwrap();
        assert_eq!(extender_to_lambda(&lambda, &f).unwrap()[t], int(1));
    }

    #[test]
    fn retractions() {
        let lambda = enumerate_mls(g(3)).unwrap();
        let t = lambda.index_of(&triangle()).unwrap();
        let u = LambdaExtender::new(lambda.clone()).unwrap();
        let r = retraction_from_extender(&u).unwrap();
        for f in grid(g(3), &CHECK_LEVELS) {
            for x in 0..3 {
                assert_eq!(r.evaluate(lambda.principal_index(x).unwrap(), &f).unwrap(), f.values()[x]);
            }
            assert_eq!(r.evaluate(t, &f).unwrap(), phi(&triangle(), &f).unwrap());
        }
        let id = IdentityExtender::new(g(2));
        let r = retraction_from_extender(&id).unwrap();
        let f = PointFunction::from_ints(&[3, -1]).unwrap();
        assert_eq!(r.evaluate(1, &f).unwrap(), int(-1));
    }

    struct Shifted;
    impl Extender for Shifted {
        fn domain(&self) -> GroundSet {
            GroundSet::new(2).unwrap()
        }
        fn target_len(&self) -> usize {
            2
        }
        fn inject(&self) -> &[usize] {
            &[0, 1]
        }
        fn extend(&self, f: &PointFunction) -> Vec<Rational> {
            vec![f.values()[0].clone(), f.values()[0].clone()]
        }
    }

    #[test]
    fn rejects_non_extender() {
        assert!(matches!(retraction_from_extender(&Shifted), Err(Error::NotAnExtender { point: 1 })));
    }

    #[test]
    fn grid_order() {
        let fs = grid(g(2), &[0, 1]);
        let vals: Vec<_> = fs.iter().map(|f| f.values().to_vec()).collect();
        assert_eq!(vals, vec![vec![int(0), int(0)], vec![int(1), int(0)], vec![int(0), int(1)], vec![int(1), int(1)],]);
    }
}
