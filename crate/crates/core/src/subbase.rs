//! Closed subbases over an abstract finite carrier: binarity, normality,
//! hulls `I_S` and `S`-convexity, and the set-valued retraction built from
//! a regular operator and a subbase.

use std::ops::ControlFlow;

use fixedbitset::FixedBitSet;

use crate::clique;
use crate::embed::{Multimap, RegularOperator};
use crate::{Error, Result};

/// Largest carrier accepted.
pub const MAX_CARRIER: usize = 1 << 16;
/// Largest member count the subfamily checks will take on.
pub const MAX_MEMBERS: usize = 4096;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subbase {
    carrier: usize,
    members: Vec<FixedBitSet>,
}

/// Outcome of [`Subbase::is_binary`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BinaryVerdict {
    Binary,
    /// A linked subfamily (member indices) with empty intersection.
    NotBinary {
        witness: Vec<usize>,
    },
}

/// Outcome of [`Subbase::is_normal`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NormalVerdict {
    Normal,
    /// Disjoint members with no separating pair `T₀, T₁`.
    NotNormal {
        first: usize,
        second: usize,
    },
}

impl Subbase {
    pub fn new(carrier: usize, members: Vec<FixedBitSet>) -> Result<Self> {
        if carrier == 0 || carrier > MAX_CARRIER {
            return Err(Error::TooLarge { what: "subbase carrier", size: carrier, limit: MAX_CARRIER });
        }
        let members = members
            .into_iter()
            .enumerate()
            .map(|(i, mut m)| {
                if m.len() > carrier && m.ones().any(|p| p >= carrier) {
                    return Err(Error::InvalidSubbase(format!("member {i} leaves the carrier")));
                }
                if m.is_clear() {
                    return Err(Error::InvalidSubbase(format!("member {i} is empty")));
                }
                m.grow(carrier);
                let mut exact = FixedBitSet::with_capacity(carrier);
                exact.extend(m.ones());
                Ok(exact)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Subbase { carrier, members })
    }

    /// Convenience constructor from point lists.
    pub fn from_points(carrier: usize, members: &[&[usize]]) -> Result<Self> {
        let sets = members
            .iter()
            .map(|pts| {
                let mut b = FixedBitSet::with_capacity(carrier);
                for &p in *pts {
                    if p >= carrier {
                        return Err(Error::InvalidSubbase(format!("point {p} leaves the carrier")));
                    }
                    b.insert(p);
                }
                Ok(b)
            })
            .collect::<Result<Vec<_>>>()?;
        Subbase::new(carrier, sets)
    }

    pub fn carrier(&self) -> usize {
        self.carrier
    }

    pub fn members(&self) -> &[FixedBitSet] {
        &self.members
    }

    pub fn full(&self) -> FixedBitSet {
        let mut b = FixedBitSet::with_capacity(self.carrier);
        b.insert_range(..);
        b
    }

    pub fn set(&self, points: impl IntoIterator<Item = usize>) -> FixedBitSet {
        let mut b = FixedBitSet::with_capacity(self.carrier);
        b.extend(points);
        b
    }

    fn check_size(&self) -> Result<()> {
        if self.members.len() > MAX_MEMBERS {
            return Err(Error::TooLarge { what: "subbase member list", size: self.members.len(), limit: MAX_MEMBERS });
        }
        Ok(())
    }

    /// Every linked subfamily has a common point. Only inclusion-maximal
    /// linked subfamilies are inspected: they have the smallest
    /// intersections. The witness is the first failing one in
    /// enumeration order.
    pub fn is_binary(&self) -> Result<BinaryVerdict> {
        self.check_size()?;
        let adj = clique::adjacency(self.members.len(), |i, j| !self.members[i].is_disjoint(&self.members[j]));
        let mut witness = None;
        let _ = clique::maximal_cliques(&adj, |family| {
            let mut common = self.full();
            for &i in family {
                common.intersect_with(&self.members[i]);
            }
            if common.is_clear() {
                witness = Some(family.to_vec());
                return ControlFlow::Break(());
            }
            ControlFlow::Continue(())
        });
        Ok(match witness {
            Some(witness) => BinaryVerdict::NotBinary { witness },
            None => BinaryVerdict::Binary,
        })
    }

    /// For disjoint `S₀, S₁` there are members `T₀, T₁` with
    /// `S₀ ∩ T₁ = ∅ = T₀ ∩ S₁` and `T₀ ∪ T₁` the whole carrier.
    pub fn is_normal(&self) -> Result<NormalVerdict> {
        self.check_size()?;
        let m = &self.members;
        for i in 0..m.len() {
            for j in i + 1..m.len() {
                if !m[i].is_disjoint(&m[j]) {
                    continue;
                }
                let separated = m
                    .iter()
                    .filter(|t0| t0.is_disjoint(&m[j]))
                    .any(|t0| m.iter().filter(|t1| t1.is_disjoint(&m[i])).any(|t1| t0.union_count(t1) == self.carrier));
                if !separated {
                    return Ok(NormalVerdict::NotNormal { first: i, second: j });
                }
            }
        }
        Ok(NormalVerdict::Normal)
    }

    /// `I_S(A)`: intersection of the members containing `a`, the whole
    /// carrier when no member does.
    pub fn s_hull(&self, a: &FixedBitSet) -> FixedBitSet {
        let mut hull = self.full();
        for m in self.members.iter().filter(|m| a.is_subset(m)) {
            hull.intersect_with(m);
        }
        hull
    }

    /// `I_S(x, y) ⊆ A` for all `x, y ∈ A`.
    pub fn is_s_convex(&self, a: &FixedBitSet) -> bool {
        let points: Vec<usize> = a.ones().collect();
        points
            .iter()
            .enumerate()
            .all(|(i, &x)| points[i..].iter().all(|&y| self.s_hull(&self.set([x, y])).is_subset(a)))
    }

    /// Every pair of distinct points is told apart by some member
    /// containing the first but not the second. For a discrete carrier
    /// this is what a closed subbase needs.
    pub fn separates_points(&self) -> bool {
        (0..self.carrier).all(|x| {
            (0..self.carrier).filter(|&y| y != x).all(|y| self.members.iter().any(|m| m.contains(x) && !m.contains(y)))
        })
    }
}

/// `r(y) = ⋂{I_S(cl U) : y ∈ e(U)}`, and `r(y) = X` when `y` lies in no
/// `e(U)`. The closure is taken in `X`.
///
/// `sb` must be a subbase on the points of `X` that separates them;
/// values are checked to be nonempty, which holds whenever `sb` is binary.
pub fn sconvex_retraction(e: &RegularOperator, sb: &Subbase) -> Result<Multimap> {
    e.validate().map_err(|v| Error::InvalidOperator(v.to_string()))?;
    let x = e.domain();
    if sb.carrier() != x.len() {
        return Err(Error::CarrierMismatch(format!(
            "subbase carrier {} vs domain of {} points",
            sb.carrier(),
            x.len()
        )));
    }
    if !sb.separates_points() {
        return Err(Error::InvalidSubbase("does not separate the points of X".into()));
    }
    let hulls: Vec<(u64, FixedBitSet)> = e
        .table()
        .iter()
        .map(|(&u, &image)| {
            let closure = x.closure(u);
            (image, sb.s_hull(&sb.set(bits(closure))))
        })
        .collect();
    let values = (0..e.codomain().len())
        .map(|y| {
            let mut value = sb.full();
            for (image, hull) in &hulls {
                if image >> y & 1 == 1 {
                    value.intersect_with(hull);
                }
            }
            if value.is_clear() {
                return Err(Error::InvalidSubbase(format!("value at point {y} is empty; the subbase is not binary")));
            }
            Ok(value)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Multimap::new(sb.carrier(), values))
}

fn bits(mask: u64) -> impl Iterator<Item = usize> {
    (0..64).filter(move |i| mask >> i & 1 == 1)
}
