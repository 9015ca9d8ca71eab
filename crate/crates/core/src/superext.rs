//! Maximal linked systems and the superextension `λX` of a finite
//! discrete space.
//!
//! A maximal linked system is stored as its antichain of minimal members;
//! the full system is the up-closure. On a finite discrete space a family
//! is a maximal linked system iff it is up-closed, omits the empty set and
//! holds exactly one set of every complementary pair.

use std::ops::ControlFlow;

use fixedbitset::FixedBitSet;
use rayon::prelude::*;

use crate::clique;
use crate::setkit::{GroundSet, PointMap, SetFamily, Subset};
use crate::subbase::Subbase;
use crate::{Error, Result};

/// Hard limit of the enumeration kernel: the families of a 7-point set
/// fit one `u128`.
pub const KERNEL_MAX_N: usize = 7;

/// Environment variable that lowers (or restores) the enumeration cap.
pub const MAX_N_ENV: &str = "SUPEXT_MAX_N";

/// The enumeration cap: `SUPEXT_MAX_N` if set, else 7, never above the
/// kernel limit.
pub fn enumeration_cap() -> usize {
    std::env::var(MAX_N_ENV).ok().and_then(|v| v.trim().parse::<usize>().ok()).unwrap_or(KERNEL_MAX_N).min(KERNEL_MAX_N)
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MaxLinkedSystem {
    minimal: SetFamily,
}

impl MaxLinkedSystem {
    /// The system generated (by up-closure) by `family`, if that is a
    /// maximal linked system.
    pub fn from_family(family: &SetFamily) -> Result<Self> {
        let minimal = family.minimal_members();
        if !minimal.up_closure().is_self_dual_upclosed() {
            return Err(Error::NotMaximalLinked);
        }
        Ok(MaxLinkedSystem { minimal })
    }

    pub(crate) fn from_minimal_unchecked(minimal: SetFamily) -> Self {
        MaxLinkedSystem { minimal }
    }

    pub fn ground(&self) -> GroundSet {
        self.minimal.ground()
    }

    pub fn minimal(&self) -> &SetFamily {
        &self.minimal
    }

    /// The full up-closed family.
    pub fn members(&self) -> SetFamily {
        self.minimal.up_closure()
    }

    pub fn contains(&self, s: Subset) -> bool {
        self.minimal.iter().any(|m| m.is_subset_of(s))
    }

    /// `Some(x)` when this is `η_x`.
    pub fn principal_point(&self) -> Option<usize> {
        match self.minimal.members() {
            [s] if s.len() == 1 => s.points().next(),
            _ => None,
        }
    }

    /// The same system over a larger ground set. The minimal members do
    /// not change: an antichain that is self-dual on the first `n` points
    /// stays self-dual once more points are added.
    pub fn lift(&self, ground: GroundSet) -> Result<Self> {
        Ok(MaxLinkedSystem { minimal: self.minimal.lift(ground)? })
    }
}

impl std::fmt::Debug for MaxLinkedSystem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "MLS{:?}", self.minimal)
    }
}

/// The principal system `η_x` of all sets containing `x`.
pub fn eta_point(ground: GroundSet, x: usize) -> Result<MaxLinkedSystem> {
    ground.check_point(x)?;
    Ok(MaxLinkedSystem::from_minimal_unchecked(SetFamily::from_unsorted(ground, vec![Subset::singleton(x)])))
}

/// All maximal linked systems of a ground set, canonically ordered.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Superextension {
    ground: GroundSet,
    systems: Vec<MaxLinkedSystem>,
}

impl Superextension {
    pub fn ground(&self) -> GroundSet {
        self.ground
    }

    pub fn systems(&self) -> &[MaxLinkedSystem] {
        &self.systems
    }

    pub fn len(&self) -> usize {
        self.systems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.systems.is_empty()
    }

    pub fn get(&self, i: usize) -> &MaxLinkedSystem {
        &self.systems[i]
    }

    pub fn index_of(&self, eta: &MaxLinkedSystem) -> Option<usize> {
        self.systems.binary_search(eta).ok()
    }

    /// Index of `η_x`.
    pub fn principal_index(&self, x: usize) -> Result<usize> {
        let eta = eta_point(self.ground, x)?;
        Ok(self.index_of(&eta).expect("principal systems are always enumerated"))
    }
}

/// Backtracking over complementary pairs on one `u128` per family: bit
/// `m` is set when the subset with mask `m` is a member.
struct PairKernel {
    full: u32,
    supersets: Vec<u128>,
    subsets: Vec<u128>,
    pairs: Vec<(u32, u32)>,
}

impl PairKernel {
    fn new(ground: GroundSet) -> Self {
        let count = ground.subset_count();
        let mut supersets = vec![0u128; count];
        let mut subsets = vec![0u128; count];
        #[allow(clippy::needless_range_loop)]
        for a in 0..count {
            for b in 0..count {
                if a & !b == 0 {
                    supersets[a] |= 1 << b;
                    subsets[b] |= 1 << a;
                }
            }
        }
        let pairs = ground.complementary_pairs().into_iter().map(|(a, b)| (a.0, b.0)).collect();
        PairKernel { full: ground.full().0, supersets, subsets, pairs }
    }

    /// `a` may join an up-closed linked family iff it is nonempty and no
    /// member lies inside its complement.
    fn can_take(&self, chosen: u128, a: u32) -> bool {
        a != 0 && chosen & self.subsets[(self.full ^ a) as usize] == 0
    }

    fn next_open(&self, mut idx: usize, chosen: u128) -> usize {
        while let Some(&(a, b)) = self.pairs.get(idx) {
            if chosen >> a & 1 == 0 && chosen >> b & 1 == 0 {
                break;
            }
            idx += 1;
        }
        idx
    }

    fn children(&self, idx: usize, chosen: u128) -> impl Iterator<Item = u128> + '_ {
        let (a, b) = self.pairs[idx];
        [a, b]
            .into_iter()
            .filter(move |&side| self.can_take(chosen, side))
            .map(move |side| chosen | self.supersets[side as usize])
    }

    // A linked up-closed family always extends by one side of any open
    // pair (if both sides were blocked, two members would be disjoint),
    // so every leaf is a maximal linked system and none is reached twice.
    fn walk(&self, idx: usize, chosen: u128, visit: &mut impl FnMut(u128)) {
        let idx = self.next_open(idx, chosen);
        if idx == self.pairs.len() {
            visit(chosen);
            return;
        }
        for child in self.children(idx, chosen) {
            self.walk(idx + 1, child, visit);
        }
    }

    /// Subtree roots after `depth` branching decisions.
    fn frontier(&self, depth: usize) -> Vec<(usize, u128)> {
        let mut level = vec![(0usize, 0u128)];
        for _ in 0..depth {
            let mut next = Vec::new();
            for (idx, chosen) in level {
                let idx = self.next_open(idx, chosen);
                if idx == self.pairs.len() {
                    next.push((idx, chosen));
                } else {
                    next.extend(self.children(idx, chosen).map(|c| (idx + 1, c)));
                }
            }
            level = next;
        }
        level
    }

    fn minimal_of(&self, chosen: u128) -> Vec<Subset> {
        let mut out = Vec::new();
        let mut rest = chosen;
        while rest != 0 {
            let s = rest.trailing_zeros();
            rest &= rest - 1;
            let mut bits = s;
            let mut minimal = true;
            while bits != 0 {
                let low = bits & bits.wrapping_neg();
                if chosen >> (s ^ low) & 1 == 1 {
                    minimal = false;
                    break;
                }
                bits ^= low;
            }
            if minimal {
                out.push(Subset(s));
            }
        }
        out
    }
}

const SPLIT_DEPTH: usize = 2;

fn check_cap(ground: GroundSet) -> Result<()> {
    let cap = enumeration_cap();
    if ground.len() > cap {
        return Err(Error::GroundTooLarge { n: ground.len(), cap });
    }
    Ok(())
}

/// Every maximal linked system of `ground`, deduplicated and canonically
/// ordered. Subtrees below depth two run in parallel on the current rayon
/// pool; the result does not depend on scheduling.
pub fn enumerate_mls(ground: GroundSet) -> Result<Superextension> {
    check_cap(ground)?;
    let kernel = PairKernel::new(ground);
    let roots = kernel.frontier(SPLIT_DEPTH);
    let mut systems: Vec<MaxLinkedSystem> = roots
        .par_iter()
        .flat_map_iter(|&(idx, chosen)| {
            let mut leaves = Vec::new();
            kernel.walk(idx, chosen, &mut |leaf| leaves.push(leaf));
            leaves.into_iter().map(|leaf| {
                MaxLinkedSystem::from_minimal_unchecked(SetFamily::from_unsorted(ground, kernel.minimal_of(leaf)))
            })
        })
        .collect();
    systems.par_sort_unstable();
    systems.dedup();
    Ok(Superextension { ground, systems })
}

/// `|λX|` without materializing the systems.
pub fn count_mls(ground: GroundSet) -> Result<u64> {
    check_cap(ground)?;
    let kernel = PairKernel::new(ground);
    Ok(kernel
        .frontier(SPLIT_DEPTH)
        .par_iter()
        .map(|&(idx, chosen)| {
            let mut count = 0u64;
            kernel.walk(idx, chosen, &mut |_| count += 1);
            count
        })
        .sum())
}

/// `|λX|` counted a second, independent way: maximal linked families are
/// the maximal cliques of the intersection graph on nonempty subsets.
pub fn count_mls_by_cliques(ground: GroundSet) -> Result<u64> {
    check_cap(ground)?;
    let vertices: Vec<Subset> = ground.subsets().filter(|s| !s.is_empty()).collect();
    let adj = clique::adjacency(vertices.len(), |i, j| vertices[i].intersects(vertices[j]));
    let mut count = 0u64;
    let _ = clique::maximal_cliques(&adj, |_| {
        count += 1;
        ControlFlow::Continue(())
    });
    Ok(count)
}

/// Extends a linked family to a maximal linked system. Pairs are visited
/// in canonical order; an open pair takes the side compatible with the
/// family, the numerically smaller mask when both are.
pub fn complete_linked(family: &SetFamily) -> Result<MaxLinkedSystem> {
    if !family.is_linked() {
        return Err(Error::NotLinked);
    }
    let ground = family.ground();
    let mut table = family.up_closure().table();
    let compatible = |table: &FixedBitSet, a: Subset| {
        !a.is_empty() && !ground.complement(a).subsets().any(|s| table.contains(s.0 as usize))
    };
    for (a, b) in ground.complementary_pairs() {
        if table.contains(a.0 as usize) || table.contains(b.0 as usize) {
            continue;
        }
        let side = if compatible(&table, a) { a } else { b };
        debug_assert!(compatible(&table, side));
        for s in side.supersets(ground) {
            table.insert(s.0 as usize);
        }
    }
    let members = table.ones().map(|m| Subset(m as u32)).collect();
    MaxLinkedSystem::from_family(&SetFamily::from_unsorted(ground, members))
}

fn check_domain(f: &PointMap, ground: GroundSet) -> Result<()> {
    if f.domain() != ground {
        return Err(Error::GroundMismatch { expected: f.domain().len(), found: ground.len() });
    }
    Ok(())
}

/// `λ(f)(η) = {B ⊆ Y : f⁻¹(B) ∈ η}`.
pub fn lambda_map(f: &PointMap, eta: &MaxLinkedSystem) -> Result<MaxLinkedSystem> {
    check_domain(f, eta.ground())?;
    let codomain = f.codomain();
    let members = codomain.subsets().filter(|&b| eta.contains(f.preimage(b))).collect();
    MaxLinkedSystem::from_family(&SetFamily::from_unsorted(codomain, members))
}

/// The image form: up-closure of `{f(F) : F ∈ η}`.
pub fn lambda_map_by_image(f: &PointMap, eta: &MaxLinkedSystem) -> Result<MaxLinkedSystem> {
    check_domain(f, eta.ground())?;
    let images = eta.minimal().iter().map(|s| f.image(s)).collect();
    MaxLinkedSystem::from_family(&SetFamily::from_unsorted(f.codomain(), images))
}

/// Indices of the systems in `lambda` that contain `set` (the subbase
/// element `set⁺`).
pub fn plus_set(set: Subset, lambda: &Superextension) -> Result<Vec<usize>> {
    if set.is_empty() {
        return Err(Error::EmptySet);
    }
    lambda.ground().check_subset(set)?;
    Ok(lambda.systems().iter().enumerate().filter(|(_, eta)| eta.contains(set)).map(|(i, _)| i).collect())
}

/// The closed subbase `{F⁺ : F nonempty}` of `λX`, members listed in
/// canonical subset order.
pub fn plus_subbase(lambda: &Superextension) -> Result<Subbase> {
    let ground = lambda.ground();
    let mut sets: Vec<Subset> = ground.subsets().filter(|s| !s.is_empty()).collect();
    sets.sort_unstable();
    let members = sets
        .into_iter()
        .map(|f| {
            let mut bits = FixedBitSet::with_capacity(lambda.len());
            bits.extend(plus_set(f, lambda)?);
            Ok(bits)
        })
        .collect::<Result<Vec<_>>>()?;
    Subbase::new(lambda.len(), members)
}
