//! Independent oracles shared by the integration tests and the acceptance
//! harness. Nothing here calls into the library's own search code.

#![allow(dead_code)]

use std::collections::BTreeSet;

use num_rational::{BigRational, Rational64};
use num_traits::{One, Zero};

pub type Q = BigRational;

pub fn q(n: i64, d: i64) -> Q {
    BigRational::new(n.into(), d.into())
}

pub fn qi(n: i64) -> Q {
    q(n, 1)
}

/// Every maximal linked family of nonempty subsets of an `n`-point set,
/// found by scanning all families and testing maximality directly. Each
/// family is returned as its sorted member masks. Feasible for `n <= 4`.
pub fn mls_by_family_scan(n: usize) -> BTreeSet<Vec<u32>> {
    assert!(n <= 4);
    let sets: Vec<u32> = (1..1u32 << n).collect();
    let m = sets.len();
    let mut found = BTreeSet::new();
    for choice in 0u64..1 << m {
        let members: Vec<u32> = (0..m).filter(|i| choice >> i & 1 == 1).map(|i| sets[i]).collect();
        if members.is_empty() {
            continue;
        }
        let linked = |fam: &[u32], s: u32| fam.iter().all(|&t| t & s != 0);
        if !members.iter().all(|&s| linked(&members, s)) {
            continue;
        }
        let maximal = sets.iter().filter(|s| !members.contains(s)).all(|&s| !linked(&members, s));
        if maximal {
            found.insert(members);
        }
    }
    found
}

/// Number of maximal cliques of the intersection graph on the nonempty
/// subsets of an `n`-point set (Bron–Kerbosch with pivoting on `u128`
/// vertex sets). These cliques are exactly the maximal linked families.
pub fn mls_count_by_cliques(n: usize) -> u64 {
    assert!((1..=7).contains(&n));
    let m = (1usize << n) - 1;
    // vertex v stands for the subset with mask v + 1
    let adj: Vec<u128> = (0..m)
        .map(|v| (0..m).filter(|&w| w != v && (v + 1) & (w + 1) != 0).fold(0u128, |acc, w| acc | 1 << w))
        .collect();

    fn bk(adj: &[u128], p: u128, mut x: u128, count: &mut u64) {
        if p == 0 {
            if x == 0 {
                *count += 1;
            }
            return;
        }
        let pivot_pool = p | x;
        let mut pivot = pivot_pool.trailing_zeros() as usize;
        let mut best = 0;
        let mut rest = pivot_pool;
        while rest != 0 {
            let u = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            let c = (p & adj[u]).count_ones();
            if c >= best {
                best = c;
                pivot = u;
            }
        }
        let mut cand = p & !adj[pivot];
        let mut p = p;
        while cand != 0 {
            let v = cand.trailing_zeros() as usize;
            cand &= cand - 1;
            bk(adj, p & adj[v], x & adj[v], count);
            p &= !(1 << v);
            x |= 1 << v;
        }
    }

    let all = if m == 128 { u128::MAX } else { (1u128 << m) - 1 };
    let mut count = 0;
    bk(&adj, all, 0, &mut count);
    count
}

/// Every inclusion hyperspace (nonempty up-closed family of nonempty
/// sets) as its full member list, by scanning all families. `n <= 4`.
pub fn ih_by_scan(n: usize) -> BTreeSet<Vec<u32>> {
    assert!(n <= 4);
    let sets: Vec<u32> = (1..1u32 << n).collect();
    let mut out = BTreeSet::new();
    for choice in 1u64..1 << sets.len() {
        let members: Vec<u32> = (0..sets.len()).filter(|i| choice >> i & 1 == 1).map(|i| sets[i]).collect();
        let up = members.iter().all(|&a| sets.iter().filter(|&&b| a & b == a).all(|b| members.contains(b)));
        if up {
            out.insert(members);
        }
    }
    out
}

/// Whether a full up-closed member list is self-dual: for each nonempty
/// proper subset, exactly one of it and its complement is a member.
pub fn is_self_dual(n: usize, members: &[u32]) -> bool {
    let full = (1u32 << n) - 1;
    (1..full).all(|s| members.contains(&s) != members.contains(&(full ^ s))) && members.contains(&full)
}

/// `max over members F of min f on F`, straight from the member list.
pub fn maxmin(members: &[u32], f: &[Q]) -> Q {
    members
        .iter()
        .map(|&s| (0..f.len()).filter(|x| s >> x & 1 == 1).map(|x| f[x].clone()).min().unwrap())
        .max()
        .unwrap()
}

/// `min over members F of max f on F`.
pub fn minmax(members: &[u32], f: &[Q]) -> Q {
    members
        .iter()
        .map(|&s| (0..f.len()).filter(|x| s >> x & 1 == 1).map(|x| f[x].clone()).max().unwrap())
        .min()
        .unwrap()
}

/// All functions `n -> levels`.
pub fn grid(n: usize, levels: &[i64]) -> Vec<Vec<Q>> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|f| {
                levels.iter().map(move |&l| {
                    let mut g = f.clone();
                    g.push(qi(l));
                    g
                })
            })
            .collect();
    }
    out
}

/// Open sets of the finite space with minimal neighbourhoods `nbhd`: the
/// subsets closed upward under `x -> y` whenever `y` is in `nbhd[x]`.
pub fn opens_by_scan(nbhd: &[u64]) -> Vec<u64> {
    let k = nbhd.len();
    (0..1u64 << k).filter(|&w| (0..k).filter(|x| w >> x & 1 == 1).all(|x| nbhd[x] & !w == 0)).collect()
}

/// Grid-search estimate of the admissible extension interval. For each
/// generator `(b, v)`, plus the constant generator, scans
/// `k in [-10, 10]` with step `1/100` and takes the best
/// `k·v + min(phi0 − k·b)` (lower) and `k·v + max(phi0 − k·b)` (upper).
pub fn grid_interval(generators: &[(Vec<Q>, Q)], phi0: &[Q]) -> (Q, Q) {
    let small = |x: &Q| Rational64::new(x.numer().try_into().unwrap(), x.denom().try_into().unwrap());
    let big = |x: Rational64| q(*x.numer(), *x.denom());
    let n = phi0.len();
    let phi: Vec<Rational64> = phi0.iter().map(small).collect();
    let mut gens: Vec<(Vec<Rational64>, Rational64)> = vec![(vec![Rational64::one(); n], Rational64::one())];
    gens.extend(generators.iter().map(|(b, v)| (b.iter().map(small).collect(), small(v))));
    let mut lower: Option<Rational64> = None;
    let mut upper: Option<Rational64> = None;
    for (b, v) in &gens {
        for step in -1000i64..=1000 {
            let k = Rational64::new(step, 100);
            let shifted = (0..n).map(|x| phi[x] - k * b[x]);
            let lo = k * v + shifted.clone().min().unwrap();
            let hi = k * v + shifted.max().unwrap();
            lower = Some(lower.map_or(lo, |l| l.max(lo)));
            upper = Some(upper.map_or(hi, |u| u.min(hi)));
        }
    }
    (big(lower.unwrap()), big(upper.unwrap()))
}

pub fn abs(x: &Q) -> Q {
    if *x < Q::zero() {
        -x.clone()
    } else {
        x.clone()
    }
}
