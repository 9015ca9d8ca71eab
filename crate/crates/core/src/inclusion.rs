//! Inclusion hyperspaces: nonempty up-closed families of nonempty
//! subsets, the functor `G` on maps, and a candidate closed subbase of
//! `GX` for the binarity checker.

use fixedbitset::FixedBitSet;

use crate::setkit::{GroundSet, PointMap, SetFamily, Subset};
use crate::subbase::Subbase;
use crate::superext::MaxLinkedSystem;
use crate::{Error, Result};

/// Largest ground for [`enumerate_ih`].
pub const IH_MAX_N: usize = 5;
/// Largest ground for [`candidate_subbase_gx`].
pub const GX_SUBBASE_MAX_N: usize = 4;

/// An inclusion hyperspace, stored by its minimal members.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct InclusionHyperspace {
    minimal: SetFamily,
}

impl InclusionHyperspace {
    /// The up-closure of `family`, which must be nonempty and avoid the
    /// empty set.
    pub fn new(family: &SetFamily) -> Result<Self> {
        if family.is_empty() {
            return Err(Error::NotInclusionHyperspace("the family is empty"));
        }
        if family.contains(Subset::EMPTY) {
            return Err(Error::NotInclusionHyperspace("the family contains the empty set"));
        }
        Ok(InclusionHyperspace { minimal: family.minimal_members() })
    }

    pub fn from_mls(eta: &MaxLinkedSystem) -> Self {
        InclusionHyperspace { minimal: eta.minimal().clone() }
    }

    pub fn ground(&self) -> GroundSet {
        self.minimal.ground()
    }

    pub fn minimal(&self) -> &SetFamily {
        &self.minimal
    }

    pub fn members(&self) -> SetFamily {
        self.minimal.up_closure()
    }

    pub fn contains(&self, s: Subset) -> bool {
        self.minimal.iter().any(|m| m.is_subset_of(s))
    }

    /// Whether this hyperspace is a maximal linked system.
    pub fn is_mls(&self) -> bool {
        self.members().is_self_dual_upclosed()
    }
}

impl std::fmt::Debug for InclusionHyperspace {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "G{:?}", self.minimal)
    }
}

/// Every inclusion hyperspace of `ground`, canonically ordered. Nonempty
/// antichains of nonempty subsets are built by adding sets in canonical
/// order, so a new set only has to avoid containing an earlier one.
pub fn enumerate_ih(ground: GroundSet) -> Result<Vec<InclusionHyperspace>> {
    if ground.len() > IH_MAX_N {
        return Err(Error::TooLarge { what: "inclusion hyperspace ground", size: ground.len(), limit: IH_MAX_N });
    }
    let mut sets: Vec<Subset> = ground.subsets().filter(|s| !s.is_empty()).collect();
    sets.sort_unstable();

    fn walk(sets: &[Subset], start: usize, chosen: &mut Vec<Subset>, out: &mut Vec<Vec<Subset>>) {
        if !chosen.is_empty() {
            out.push(chosen.clone());
        }
        for i in start..sets.len() {
            let s = sets[i];
            if chosen.iter().all(|c| !c.is_subset_of(s)) {
                chosen.push(s);
                walk(sets, i + 1, chosen, out);
                chosen.pop();
            }
        }
    }
    let mut antichains = Vec::new();
    walk(&sets, 0, &mut Vec::new(), &mut antichains);
    let mut out: Vec<InclusionHyperspace> =
        antichains.into_iter().map(|a| InclusionHyperspace { minimal: SetFamily::from_unsorted(ground, a) }).collect();
    out.sort_unstable();
    Ok(out)
}

fn check_domain(f: &PointMap, ground: GroundSet) -> Result<()> {
    if f.domain() != ground {
        return Err(Error::GroundMismatch { expected: f.domain().len(), found: ground.len() });
    }
    Ok(())
}

/// `G(f)(𝒜) = {B ⊆ Y : f⁻¹(B) ∈ 𝒜}`.
pub fn g_map(f: &PointMap, a: &InclusionHyperspace) -> Result<InclusionHyperspace> {
    check_domain(f, a.ground())?;
    let codomain = f.codomain();
    let members = codomain.subsets().filter(|&b| a.contains(f.preimage(b))).collect();
    InclusionHyperspace::new(&SetFamily::from_unsorted(codomain, members))
}

/// The image form: up-closure of `{f(A) : A ∈ 𝒜}`.
pub fn g_map_by_image(f: &PointMap, a: &InclusionHyperspace) -> Result<InclusionHyperspace> {
    check_domain(f, a.ground())?;
    let images = a.minimal().iter().map(|s| f.image(s)).collect();
    InclusionHyperspace::new(&SetFamily::from_unsorted(f.codomain(), images))
}

/// The candidate subbase on the carrier `enumerate_ih(ground)`: first
/// `⟨F⟩ = {𝒜 : F ∈ 𝒜}` for every nonempty `F`, then
/// `⟨U⟩* = {𝒜 : every member of 𝒜 meets U}` for every nonempty `U`, both
/// in canonical subset order.
pub fn candidate_subbase_gx(ground: GroundSet) -> Result<(Vec<InclusionHyperspace>, Subbase)> {
    if ground.len() > GX_SUBBASE_MAX_N {
        return Err(Error::TooLarge { what: "GX subbase ground", size: ground.len(), limit: GX_SUBBASE_MAX_N });
    }
    let carrier = enumerate_ih(ground)?;
    let mut sets: Vec<Subset> = ground.subsets().filter(|s| !s.is_empty()).collect();
    sets.sort_unstable();
    let member = |test: &dyn Fn(&InclusionHyperspace) -> bool| {
        let mut bits = FixedBitSet::with_capacity(carrier.len());
        bits.extend(carrier.iter().enumerate().filter(|(_, a)| test(a)).map(|(i, _)| i));
        bits
    };
    let mut members: Vec<FixedBitSet> = sets.iter().map(|&f| member(&|a| a.contains(f))).collect();
    members.extend(sets.iter().map(|&u| member(&|a| a.minimal().iter().all(|m| m.intersects(u)))));
    let subbase = Subbase::new(carrier.len(), members)?;
    Ok((carrier, subbase))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::subbase::BinaryVerdict;
    use crate::superext::enumerate_mls;

    fn g(n: usize) -> GroundSet {
        GroundSet::new(n).unwrap()
    }

    fn ih(n: usize, sets: &[&[usize]]) -> InclusionHyperspace {
        InclusionHyperspace::new(&SetFamily::from_points(g(n), sets).unwrap()).unwrap()
    }

    #[test]
    fn counts() {
        let expected = [1, 4, 18, 166, 7579];
        for (n, &count) in (1..=5).zip(&expected) {
            assert_eq!(enumerate_ih(g(n)).unwrap().len(), count, "n = {n}");
        }
        assert!(enumerate_ih(g(6)).is_err());
    }

    #[test]
    fn n2_listing() {
        let all = enumerate_ih(g(2)).unwrap();
        let expected = vec![ih(2, &[&[0]]), ih(2, &[&[1]]), ih(2, &[&[0], &[1]]), ih(2, &[&[0, 1]])];
        let mut sorted = expected.clone();
        sorted.sort();
        assert_eq!(all, sorted);
    }

    #[test]
    fn mls_are_hyperspaces() {
        for n in 1..=4 {
            let all = enumerate_ih(g(n)).unwrap();
            for eta in enumerate_mls(g(n)).unwrap().systems() {
                let a = InclusionHyperspace::from_mls(eta);
                assert!(all.binary_search(&a).is_ok());
                assert!(a.is_mls());
            }
        }
    }

    #[test]
    fn g_map_examples() {
        let a = ih(3, &[&[0], &[2]]);
        let id = PointMap::identity(g(3));
        assert_eq!(g_map(&id, &a).unwrap(), a);
        let c = PointMap::constant(g(3), g(2), 1).unwrap();
        assert_eq!(g_map(&c, &a).unwrap(), ih(2, &[&[1]]));
        let f = PointMap::new(g(3), g(2), vec![0, 0, 1]).unwrap();
        assert_eq!(g_map(&f, &a).unwrap(), ih(2, &[&[0], &[1]]));
        assert_eq!(g_map_by_image(&f, &a).unwrap(), ih(2, &[&[0], &[1]]));
    }

    #[test]
    fn candidate_subbase_n2() {
        let (carrier, sb) = candidate_subbase_gx(g(2)).unwrap();
        assert_eq!(carrier.len(), 4);
        // ⟨{0}⟩ is the first member
        assert_eq!(sb.members()[0].count_ones(..), 2);
        // ⟨X⟩ is the third
        assert_eq!(sb.members()[2].count_ones(..), 4);
        assert_eq!(sb.is_binary().unwrap(), BinaryVerdict::Binary);
    }

    #[test]
    fn rejects_bad_families() {
        assert!(InclusionHyperspace::new(&SetFamily::empty(g(2))).is_err());
        assert!(InclusionHyperspace::new(&SetFamily::from_points(g(2), &[&[]]).unwrap()).is_err());
    }
}
