mod common;

use common::{q, qi, Q};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use supext_core::functionals::{sample_term, ExtensionChoice, GeneratedSubspace, Generator, PointFunction};
use supext_core::{Error, GroundSet};

fn g(n: usize) -> GroundSet {
    GroundSet::new(n).unwrap()
}

fn ints(v: &[i64]) -> Vec<Q> {
    v.iter().map(|&x| qi(x)).collect()
}

fn space(n: usize, gens: &[(Vec<Q>, Q)]) -> GeneratedSubspace {
    GeneratedSubspace::new(g(n), gens.iter().map(|(b, v)| Generator::new(b.clone(), v.clone())).collect()).unwrap()
}

type Instance = (usize, Vec<(Vec<Q>, Q)>, Vec<Q>, (Q, Q));

/// Hand-worked instances whose envelope breakpoints sit on the 1/100 grid.
fn documented() -> Vec<Instance> {
    vec![
        (2, vec![], ints(&[0, 1]), (qi(0), qi(1))),
        (2, vec![(ints(&[0, 1]), qi(1))], ints(&[0, 2]), (qi(2), qi(2))),
        (3, vec![(ints(&[0, 1, 2]), qi(1))], ints(&[0, 0, 1]), (qi(0), q(1, 2))),
        (3, vec![(ints(&[1, 0, 0]), q(1, 3))], ints(&[0, 1, 1]), (q(2, 3), q(2, 3))),
        (3, vec![(ints(&[1, 0, 0]), q(1, 3)), (ints(&[0, 1, 0]), q(1, 3))], ints(&[0, 0, 3]), (qi(0), qi(2))),
        (2, vec![(ints(&[0, 1]), q(1, 4))], ints(&[-1, 3]), (qi(0), qi(0))),
    ]
}

#[test]
fn documented_intervals_match_grid_oracle_exactly() {
    for (n, gens, phi0, (lo, hi)) in documented() {
        let interval = space(n, &gens).extend_one(&PointFunction::from_values(phi0.clone()).unwrap()).unwrap();
        assert_eq!((interval.lower.clone(), interval.upper.clone()), (lo.clone(), hi.clone()), "{phi0:?}");
        assert_eq!(common::grid_interval(&gens, &phi0), (lo, hi), "{phi0:?}");
    }
}

#[test]
fn default_choice_is_the_midpoint() {
    let s = GeneratedSubspace::constants(g(2));
    let (extended, p) = s.extend(&PointFunction::from_ints(&[0, 1]).unwrap(), ExtensionChoice::default()).unwrap();
    assert_eq!(p, q(1, 2));
    assert_eq!(extended.generators().len(), 1);
    assert!(extended.sample_check(200, 0).is_none());
}

#[test]
fn generator_itself_is_rejected() {
    let s = space(2, &[(ints(&[0, 1]), qi(1))]);
    assert!(matches!(s.extend_one(&PointFunction::from_ints(&[0, 1]).unwrap()), Err(Error::InSubspace)));
}

#[test]
fn inconsistent_values_are_rejected() {
    // b ≤ 1 pointwise but assigned a value above 1
    let r = GeneratedSubspace::new(g(2), vec![Generator::new(ints(&[0, 1]), qi(2))]);
    assert!(matches!(r, Err(Error::Inconsistent(_))));
}

fn random_values(rng: &mut ChaCha8Rng, n: usize) -> Vec<Q> {
    (0..n).map(|_| q(rng.gen_range(-12..=12), rng.gen_range(1..=3))).collect()
}

#[test]
fn seeded_instances_from_actual_terms() {
    for seed in 0..100u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.gen_range(2..=4);
        let term = sample_term(&mut rng, g(n), 2);
        let count = rng.gen_range(1..=3);
        let gens: Vec<(Vec<Q>, Q)> = (0..count)
            .map(|_| {
                let b = random_values(&mut rng, n);
                let v = term.evaluate_values(&b).unwrap();
                (b, v)
            })
            .collect();
        let s = space(n, &gens);
        let phi0 = random_values(&mut rng, n);
        let interval = match s.extend_one(&PointFunction::from_values(phi0.clone()).unwrap()) {
            Err(Error::InSubspace) => continue,
            other => other.unwrap(),
        };
        assert!(interval.lower <= interval.upper, "seed {seed}");
        let actual = term.evaluate_values(&phi0).unwrap();
        assert!(interval.contains(&actual), "seed {seed}: {actual} outside {interval}");

        // the grid search can only see part of each envelope
        let (grid_lo, grid_hi) = common::grid_interval(&gens, &phi0);
        assert!(grid_lo <= interval.lower && interval.upper <= grid_hi, "seed {seed}");

        let (extended, p) = s.extend(&PointFunction::from_values(phi0).unwrap(), ExtensionChoice::Midpoint).unwrap();
        assert!(interval.contains(&p));
        assert!(extended.sample_check(100, seed).is_none(), "seed {seed}");
    }
}

#[test]
fn grid_oracle_converges_when_breakpoints_are_on_grid() {
    // integer data whose generator differences divide 100 puts every
    // breakpoint on the 1/100 grid
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut checked = 0;
    while checked < 50 {
        let n = 3;
        let term = sample_term(&mut rng, g(n), 2);
        let b: Vec<Q> = (0..n).map(|_| qi([0i64, 1, 2, 4][rng.gen_range(0..4)])).collect();
        let v = term.evaluate_values(&b).unwrap();
        let phi0: Vec<Q> = (0..n).map(|_| qi(rng.gen_range(-3..=3))).collect();
        let gens = vec![(b, v)];
        let Ok(interval) = space(n, &gens).extend_one(&PointFunction::from_values(phi0.clone()).unwrap()) else {
            continue;
        };
        let diffs: Vec<i64> = (0..n)
            .flat_map(|x| (0..n).map(move |y| (x, y)))
            .filter_map(|(x, y)| {
                let d = &gens[0].0[x] - &gens[0].0[y];
                (d > qi(0)).then(|| d.to_integer().try_into().unwrap())
            })
            .collect();
        if diffs.iter().any(|d| 100 % d != 0) {
            continue;
        }
        let (lo, hi) = common::grid_interval(&gens, &phi0);
        assert_eq!((lo, hi), (interval.lower, interval.upper), "{gens:?} {phi0:?}");
        checked += 1;
    }
}
