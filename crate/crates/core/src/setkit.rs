//! Bit-encoded subsets of a small ground set, and families of them.
//!
//! Point `i` of a ground set is bit `i` of a [`Subset`] mask. A
//! [`SetFamily`] keeps its members duplicate-free in the canonical order
//! `(popcount, mask)`, so two families are equal exactly when their member
//! lists are.

use std::cmp::Ordering;
use std::fmt;

use fixedbitset::FixedBitSet;

use crate::{Error, Result};

/// Largest ground set accepted by the family operations.
pub const MAX_GROUND: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroundSet {
    n: u8,
}

impl GroundSet {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 || n > MAX_GROUND {
            return Err(Error::InvalidGround(n));
        }
        Ok(GroundSet { n: n as u8 })
    }

    #[allow(clippy::len_without_is_empty)] // never empty
    pub fn len(self) -> usize {
        self.n as usize
    }

    /// Number of subsets, `2^n`.
    pub fn subset_count(self) -> usize {
        1usize << self.n
    }

    pub fn full(self) -> Subset {
        Subset(((1u64 << self.n) - 1) as u32)
    }

    pub fn complement(self, s: Subset) -> Subset {
        Subset(self.full().0 & !s.0)
    }

    pub fn contains(self, s: Subset) -> bool {
        s.0 & !self.full().0 == 0
    }

    pub fn check_point(self, x: usize) -> Result<()> {
        if x >= self.len() {
            return Err(Error::PointOutOfRange { point: x, n: self.len() });
        }
        Ok(())
    }

    pub fn check_subset(self, s: Subset) -> Result<()> {
        if !self.contains(s) {
            return Err(Error::SubsetOutOfRange { mask: s.0 as u64, n: self.len() });
        }
        Ok(())
    }

    /// All subsets in numeric mask order.
    pub fn subsets(self) -> impl Iterator<Item = Subset> {
        (0..self.subset_count() as u32).map(Subset)
    }

    pub fn points(self) -> std::ops::Range<usize> {
        0..self.len()
    }

    /// Complementary pairs `{A, Aᶜ}` as `(A, Aᶜ)` with `A < Aᶜ` numerically,
    /// ordered by `(min(|A|, |Aᶜ|), A)`.
    pub fn complementary_pairs(self) -> Vec<(Subset, Subset)> {
        let mut pairs: Vec<(Subset, Subset)> = self
            .subsets()
            .filter_map(|a| {
                let b = self.complement(a);
                (a.0 < b.0).then_some((a, b))
            })
            .collect();
        pairs.sort_by_key(|(a, b)| (a.len().min(b.len()), a.0));
        pairs
    }
}

/// A subset of a ground set, one bit per point.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Subset(pub u32);

impl Subset {
    pub const EMPTY: Subset = Subset(0);

    pub fn singleton(x: usize) -> Subset {
        Subset(1 << x)
    }

    pub fn from_points<I: IntoIterator<Item = usize>>(points: I) -> Subset {
        Subset(points.into_iter().fold(0, |m, x| m | (1 << x)))
    }

    pub fn mask(self) -> u32 {
        self.0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn contains(self, x: usize) -> bool {
        x < 32 && self.0 >> x & 1 == 1
    }

    pub fn is_subset_of(self, other: Subset) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn intersects(self, other: Subset) -> bool {
        self.0 & other.0 != 0
    }

    pub fn union(self, other: Subset) -> Subset {
        Subset(self.0 | other.0)
    }

    pub fn intersection(self, other: Subset) -> Subset {
        Subset(self.0 & other.0)
    }

    pub fn points(self) -> impl Iterator<Item = usize> {
        let mut m = self.0;
        std::iter::from_fn(move || {
            if m == 0 {
                return None;
            }
            let x = m.trailing_zeros() as usize;
            m &= m - 1;
            Some(x)
        })
    }

    /// Every superset of `self` inside `ground`.
    pub fn supersets(self, ground: GroundSet) -> impl Iterator<Item = Subset> {
        let base = self.0;
        submasks(ground.complement(self).0).map(move |s| Subset(base | s))
    }

    /// Every subset of `self`.
    pub fn subsets(self) -> impl Iterator<Item = Subset> {
        submasks(self.0).map(Subset)
    }

    /// Lowercase hex, no leading zeros.
    pub fn to_hex(self) -> String {
        format!("{:x}", self.0)
    }

    pub fn from_hex(s: &str) -> Result<Subset> {
        let v = parse_hex_u64(s)?;
        u32::try_from(v).map(Subset).map_err(|_| Error::Parse(format!("mask `{s}` is wider than 32 bits")))
    }
}

pub(crate) fn parse_hex_u64(s: &str) -> Result<u64> {
    let canonical = !s.is_empty()
        && s.bytes().all(|b| b.is_ascii_digit() || (b'a'..=b'f').contains(&b))
        && (s == "0" || !s.starts_with('0'));
    if !canonical {
        return Err(Error::Parse(format!("`{s}` is not a lowercase hex mask without leading zeros")));
    }
    u64::from_str_radix(s, 16).map_err(|e| Error::Parse(format!("`{s}`: {e}")))
}

/// All submasks of `mask`, starting with `mask` itself and ending with 0.
fn submasks(mask: u32) -> impl Iterator<Item = u32> {
    let mut next = Some(mask);
    std::iter::from_fn(move || {
        let cur = next?;
        next = (cur != 0).then(|| (cur - 1) & mask);
        Some(cur)
    })
}

impl Ord for Subset {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.len(), self.0).cmp(&(other.len(), other.0))
    }
}

impl PartialOrd for Subset {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.points()).finish()
    }
}

/// A duplicate-free, canonically ordered family of subsets.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct SetFamily {
    ground: GroundSet,
    members: Vec<Subset>,
}

impl SetFamily {
    pub fn new<I: IntoIterator<Item = Subset>>(ground: GroundSet, members: I) -> Result<Self> {
        let mut members: Vec<Subset> = members.into_iter().collect();
        for &s in &members {
            ground.check_subset(s)?;
        }
        members.sort_unstable();
        members.dedup();
        Ok(SetFamily { ground, members })
    }

    /// Builds a family from members already known to fit the ground set.
    pub(crate) fn from_unsorted(ground: GroundSet, mut members: Vec<Subset>) -> Self {
        members.sort_unstable();
        members.dedup();
        SetFamily { ground, members }
    }

    pub fn empty(ground: GroundSet) -> Self {
        SetFamily { ground, members: Vec::new() }
    }

    pub fn from_points(ground: GroundSet, sets: &[&[usize]]) -> Result<Self> {
        for set in sets {
            for &x in *set {
                ground.check_point(x)?;
            }
        }
        SetFamily::new(ground, sets.iter().map(|s| Subset::from_points(s.iter().copied())))
    }

    pub fn ground(&self) -> GroundSet {
        self.ground
    }

    pub fn members(&self) -> &[Subset] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = Subset> + '_ {
        self.members.iter().copied()
    }

    pub fn contains(&self, s: Subset) -> bool {
        self.members.binary_search(&s).is_ok()
    }

    /// Same members viewed over a larger ground set.
    pub fn lift(&self, ground: GroundSet) -> Result<SetFamily> {
        if ground.len() < self.ground.len() {
            return Err(Error::GroundMismatch { expected: self.ground.len(), found: ground.len() });
        }
        Ok(SetFamily { ground, members: self.members.clone() })
    }

    /// Membership table indexed by mask.
    pub(crate) fn table(&self) -> FixedBitSet {
        let mut t = FixedBitSet::with_capacity(self.ground.subset_count());
        for s in &self.members {
            t.insert(s.0 as usize);
        }
        t
    }

    /// Every pair of members meets. The empty set meets nothing, itself
    /// included.
    pub fn is_linked(&self) -> bool {
        self.members
            .iter()
            .enumerate()
            .all(|(i, a)| !a.is_empty() && self.members[i + 1..].iter().all(|b| a.intersects(*b)))
    }

    pub fn up_closure(&self) -> SetFamily {
        let mut table = FixedBitSet::with_capacity(self.ground.subset_count());
        for a in self.minimal_members().iter() {
            for s in a.supersets(self.ground) {
                table.insert(s.0 as usize);
            }
        }
        let members = table.ones().map(|m| Subset(m as u32)).collect();
        SetFamily::from_unsorted(self.ground, members)
    }

    pub fn is_up_closed(&self) -> bool {
        let table = self.table();
        let n = self.ground.len();
        self.members.iter().all(|a| (0..n).filter(|&x| !a.contains(x)).all(|x| table.contains((a.0 | 1 << x) as usize)))
    }

    /// Inclusion-minimal members.
    pub fn minimal_members(&self) -> SetFamily {
        // Canonical order lists smaller sets first, so a member is minimal
        // iff no previously kept member is contained in it.
        let mut kept: Vec<Subset> = Vec::new();
        for &a in &self.members {
            if !kept.iter().any(|k| k.is_subset_of(a)) {
                kept.push(a);
            }
        }
        SetFamily { ground: self.ground, members: kept }
    }

    pub fn is_antichain(&self) -> bool {
        self.members
            .iter()
            .enumerate()
            .all(|(i, a)| self.members.iter().enumerate().all(|(j, b)| i == j || !a.is_subset_of(*b)))
    }

    /// Up-closed, free of the empty set, and containing exactly one of
    /// every complementary pair. On a finite discrete space these are
    /// exactly the maximal linked systems.
    pub fn is_self_dual_upclosed(&self) -> bool {
        let table = self.table();
        if table.contains(0) || !self.is_up_closed() {
            return false;
        }
        self.ground.subsets().all(|a| {
            let b = self.ground.complement(a);
            table.contains(a.0 as usize) != table.contains(b.0 as usize)
        })
    }
}

impl Ord for SetFamily {
    fn cmp(&self, other: &Self) -> Ordering {
        self.ground.cmp(&other.ground).then_with(|| self.members.cmp(&other.members))
    }
}

impl PartialOrd for SetFamily {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for SetFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n={} ", self.ground.len())?;
        f.debug_list().entries(&self.members).finish()
    }
}

/// A total map between two ground sets.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PointMap {
    domain: GroundSet,
    codomain: GroundSet,
    images: Vec<usize>,
}

impl PointMap {
    pub fn new(domain: GroundSet, codomain: GroundSet, images: Vec<usize>) -> Result<Self> {
        if images.len() != domain.len() {
            return Err(Error::GroundMismatch { expected: domain.len(), found: images.len() });
        }
        for &y in &images {
            codomain.check_point(y)?;
        }
        Ok(PointMap { domain, codomain, images })
    }

    pub fn identity(ground: GroundSet) -> Self {
        PointMap { domain: ground, codomain: ground, images: ground.points().collect() }
    }

    pub fn constant(domain: GroundSet, codomain: GroundSet, y: usize) -> Result<Self> {
        PointMap::new(domain, codomain, vec![y; domain.len()])
    }

    pub fn domain(&self) -> GroundSet {
        self.domain
    }

    pub fn codomain(&self) -> GroundSet {
        self.codomain
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    pub fn apply(&self, x: usize) -> usize {
        self.images[x]
    }

    pub fn image(&self, s: Subset) -> Subset {
        Subset::from_points(s.points().map(|x| self.images[x]))
    }

    pub fn preimage(&self, s: Subset) -> Subset {
        Subset::from_points(self.domain.points().filter(|&x| s.contains(self.images[x])))
    }

    pub fn is_surjective(&self) -> bool {
        self.image(self.domain.full()) == self.codomain.full()
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &PointMap) -> Result<PointMap> {
        if other.domain != self.codomain {
            return Err(Error::GroundMismatch { expected: self.codomain.len(), found: other.domain.len() });
        }
        Ok(PointMap {
            domain: self.domain,
            codomain: other.codomain,
            images: self.images.iter().map(|&y| other.images[y]).collect(),
        })
    }

    /// Every map from `domain` to `codomain`, in lexicographic order of
    /// the image vector (point 0 varies slowest).
    pub fn all(domain: GroundSet, codomain: GroundSet) -> impl Iterator<Item = PointMap> {
        let (n, m) = (domain.len(), codomain.len());
        let total = m.pow(n as u32);
        (0..total).map(move |mut code| {
            let mut images = vec![0; n];
            for slot in images.iter_mut().rev() {
                *slot = code % m;
                code /= m;
            }
            PointMap { domain, codomain, images }
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(n: usize) -> GroundSet {
        GroundSet::new(n).unwrap()
    }

    // Points in these tests are 0-indexed: {1,2} in 1-indexed prose is [0, 1].
    fn fam(n: usize, sets: &[&[usize]]) -> SetFamily {
        SetFamily::from_points(g(n), sets).unwrap()
    }

    #[test]
    fn ground_bounds() {
        assert_eq!(GroundSet::new(0), Err(Error::InvalidGround(0)));
        assert!(GroundSet::new(16).is_ok());
        assert_eq!(GroundSet::new(17), Err(Error::InvalidGround(17)));
        assert!(matches!(SetFamily::new(g(2), [Subset(0b100)]), Err(Error::SubsetOutOfRange { .. })));
    }

    #[test]
    fn canonical_order() {
        let f = fam(3, &[&[0, 1, 2], &[2], &[0, 1], &[0], &[2]]);
        assert_eq!(f.members(), &[Subset(0b001), Subset(0b100), Subset(0b011), Subset(0b111)]);
    }

    #[test]
    fn linked_examples() {
        assert!(fam(2, &[&[0], &[0, 1]]).is_linked());
        assert!(!fam(2, &[&[0], &[1]]).is_linked());
        assert!(fam(3, &[&[0, 1], &[1, 2], &[0, 2]]).is_linked());
        assert!(SetFamily::empty(g(3)).is_linked());
        assert!(fam(3, &[&[1]]).is_linked());
        assert!(!fam(3, &[&[]]).is_linked());
        assert!(!fam(3, &[&[], &[0]]).is_linked());
    }

    #[test]
    fn up_closure_examples() {
        assert_eq!(fam(2, &[&[0]]).up_closure(), fam(2, &[&[0], &[0, 1]]));
        assert!(SetFamily::empty(g(2)).up_closure().is_empty());
        assert_eq!(fam(3, &[&[0, 1], &[2]]).up_closure(), fam(3, &[&[0, 1], &[2], &[0, 1, 2], &[0, 2], &[1, 2]]));
    }

    #[test]
    fn minimal_examples() {
        assert_eq!(fam(2, &[&[0], &[0, 1]]).minimal_members(), fam(2, &[&[0]]));
        let anti = fam(3, &[&[0, 1], &[1, 2], &[0, 2]]);
        assert_eq!(anti.minimal_members(), anti);
        assert_eq!(fam(3, &[&[0, 1], &[1, 2], &[0, 1, 2]]).minimal_members(), fam(3, &[&[0, 1], &[1, 2]]));
    }

    #[test]
    fn self_dual_examples() {
        assert!(fam(2, &[&[0]]).up_closure().is_self_dual_upclosed());
        assert!(fam(3, &[&[0, 1], &[1, 2], &[0, 2]]).up_closure().is_self_dual_upclosed());
        assert!(!fam(2, &[&[0, 1]]).is_self_dual_upclosed());
        // Self-dual on pairs but not up-closed: {0} without {0,1}.
        assert!(!fam(2, &[&[0]]).is_self_dual_upclosed());
    }

    #[test]
    fn complementary_pair_order() {
        let pairs = g(3).complementary_pairs();
        assert_eq!(pairs.len(), 4);
        assert_eq!(pairs[0], (Subset(0), Subset(7)));
        assert_eq!(pairs[1], (Subset(1), Subset(6)));
        assert_eq!(pairs[3], (Subset(3), Subset(4)));
    }

    #[test]
    fn hex_is_strict() {
        assert_eq!(Subset(0xa5).to_hex(), "a5");
        assert_eq!(Subset(0).to_hex(), "0");
        assert_eq!(Subset::from_hex("a5").unwrap(), Subset(0xa5));
        assert!(Subset::from_hex("A5").is_err());
        assert!(Subset::from_hex("05").is_err());
        assert!(Subset::from_hex("").is_err());
    }

    #[test]
    fn point_maps() {
        let f = PointMap::new(g(3), g(2), vec![0, 0, 1]).unwrap();
        assert!(f.is_surjective());
        assert_eq!(f.preimage(Subset(0b01)), Subset(0b011));
        assert_eq!(f.image(Subset(0b101)), Subset(0b11));
        assert_eq!(PointMap::all(g(2), g(3)).count(), 9);
        let id = PointMap::identity(g(3));
        assert_eq!(id.then(&f).unwrap(), f);
        assert!(PointMap::new(g(2), g(2), vec![0, 2]).is_err());
    }
}
