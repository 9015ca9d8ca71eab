//! Finite topological spaces, regular operators between their open-set
//! lattices, and the two conversions between regular operators and usco
//! maps into `λX`.
//!
//! A finite space is given by the minimal open neighbourhood of each
//! point; open sets are exactly the unions of those. Points are bits of a
//! `u64`, so spaces have at most 64 points, and operator tables (keyed by
//! the opens of the domain) need a domain of at most 16 points.

use std::collections::BTreeMap;
use std::fmt;

use fixedbitset::FixedBitSet;

use crate::setkit::{GroundSet, Subset};
use crate::superext::{enumerate_mls, plus_set, Superextension};
use crate::{Error, Result};

pub const MAX_POINTS: usize = 64;
/// Largest space whose opens are enumerated.
pub const MAX_OPENS_POINTS: usize = 16;
/// Largest codomain for the brute-force operator search.
pub const MAX_SEARCH_POINTS: usize = 6;

fn full_mask(n: usize) -> u64 {
    if n == 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

fn points_of(mask: u64) -> impl Iterator<Item = usize> {
    let mut m = mask;
    std::iter::from_fn(move || {
        if m == 0 {
            return None;
        }
        let x = m.trailing_zeros() as usize;
        m &= m - 1;
        Some(x)
    })
}

fn canonical_key(mask: u64) -> (u32, u64) {
    (mask.count_ones(), mask)
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FiniteTopSpace {
    min_nbhd: Vec<u64>,
}

impl FiniteTopSpace {
    pub fn new(min_nbhd: Vec<u64>) -> Result<Self> {
        let n = min_nbhd.len();
        if n == 0 || n > MAX_POINTS {
            return Err(Error::InvalidSpace(format!("{n} points; expected 1..={MAX_POINTS}")));
        }
        let full = full_mask(n);
        for (x, &u) in min_nbhd.iter().enumerate() {
            if u & !full != 0 {
                return Err(Error::InvalidSpace(format!("neighbourhood of {x} leaves the space")));
            }
            if u >> x & 1 == 0 {
                return Err(Error::InvalidSpace(format!("point {x} is not in its neighbourhood")));
            }
            if let Some(y) = points_of(u).find(|&y| min_nbhd[y] & !u != 0) {
                return Err(Error::InvalidSpace(format!(
                    "neighbourhood of {y} is not inside the neighbourhood of {x}"
                )));
            }
        }
        Ok(FiniteTopSpace { min_nbhd })
    }

    pub fn discrete(n: usize) -> Result<Self> {
        FiniteTopSpace::new((0..n.min(MAX_POINTS + 1)).map(|x| 1u64 << (x % 64)).collect())
    }

    pub fn len(&self) -> usize {
        self.min_nbhd.len()
    }

    pub fn is_empty(&self) -> bool {
        self.min_nbhd.is_empty()
    }

    pub fn full(&self) -> u64 {
        full_mask(self.len())
    }

    pub fn min_nbhd(&self, x: usize) -> u64 {
        self.min_nbhd[x]
    }

    pub fn min_nbhds(&self) -> &[u64] {
        &self.min_nbhd
    }

    pub fn is_discrete(&self) -> bool {
        self.min_nbhd.iter().enumerate().all(|(x, &u)| u == 1 << x)
    }

    pub fn is_open(&self, w: u64) -> bool {
        w & !self.full() == 0 && points_of(w).all(|y| self.min_nbhd[y] & !w == 0)
    }

    /// All open sets, ordered by `(popcount, mask)`.
    pub fn opens(&self) -> Result<Vec<u64>> {
        if self.len() > MAX_OPENS_POINTS {
            return Err(Error::TooLarge {
                what: "space for open-set enumeration",
                size: self.len(),
                limit: MAX_OPENS_POINTS,
            });
        }
        let mut opens: Vec<u64> = (0..=self.full()).filter(|&w| self.is_open(w)).collect();
        opens.sort_by_key(|&w| canonical_key(w));
        Ok(opens)
    }

    /// Closure: the points whose every neighbourhood meets `a`.
    pub fn closure(&self, a: u64) -> u64 {
        self.min_nbhd.iter().enumerate().filter(|(_, &u)| u & a != 0).fold(0, |acc, (x, _)| acc | 1 << x)
    }

    /// The subspace topology on the points `inject[0], inject[1], ...`.
    pub fn subspace(&self, inject: &[usize]) -> Result<FiniteTopSpace> {
        let trace =
            |w: u64| inject.iter().enumerate().filter(|(_, &p)| w >> p & 1 == 1).fold(0u64, |acc, (i, _)| acc | 1 << i);
        FiniteTopSpace::new(inject.iter().map(|&p| trace(self.min_nbhd[p])).collect())
    }

    /// Product space. Point `(i₀, i₁, …)` has index `i₀ + n₀·(i₁ + n₁·(…))`.
    pub fn product(factors: &[FiniteTopSpace]) -> Result<FiniteTopSpace> {
        let sizes: Vec<usize> = factors.iter().map(FiniteTopSpace::len).collect();
        let total = checked_product(&sizes)?;
        let nbhds = (0..total)
            .map(|p| {
                let coords = decompose(p, &sizes);
                boxes_to_mask(&factors.iter().zip(&coords).map(|(f, &c)| f.min_nbhd[c]).collect::<Vec<_>>(), &sizes)
            })
            .collect();
        FiniteTopSpace::new(nbhds)
    }
}

fn checked_product(sizes: &[usize]) -> Result<usize> {
    let total = sizes.iter().try_fold(1usize, |acc, &s| acc.checked_mul(s));
    match total {
        Some(t) if t <= MAX_POINTS && !sizes.is_empty() => Ok(t),
        _ => Err(Error::TooLarge { what: "product carrier", size: total.unwrap_or(usize::MAX), limit: MAX_POINTS }),
    }
}

fn decompose(mut p: usize, sizes: &[usize]) -> Vec<usize> {
    sizes
        .iter()
        .map(|&s| {
            let c = p % s;
            p /= s;
            c
        })
        .collect()
}

/// The box `∏ sets[α]` as a mask of the product.
fn boxes_to_mask(sets: &[u64], sizes: &[usize]) -> u64 {
    let mut points = vec![0usize];
    let mut stride = 1;
    for (&set, &size) in sets.iter().zip(sizes) {
        points = points.iter().flat_map(|&base| points_of(set).map(move |c| base + c * stride)).collect();
        stride *= size;
    }
    points.into_iter().fold(0, |acc, p| acc | 1 << p)
}

/// Why an operator fails to be regular.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    /// `X` does not carry the subspace topology of its image in `Y`.
    NotSubspace {
        point: usize,
    },
    /// A key of the table is not open in `X`.
    KeyNotOpen {
        set: u64,
    },
    MissingOpen {
        open: u64,
    },
    ImageNotOpen {
        open: u64,
        image: u64,
    },
    /// `e(∅) ≠ ∅`.
    EmptyImage {
        image: u64,
    },
    /// `e(U) ∩ X ≠ U`.
    Trace {
        open: u64,
        image: u64,
    },
    /// Disjoint `U, V` with intersecting images.
    Overlap {
        first: u64,
        second: u64,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NotSubspace { point } => {
                write!(f, "X is not a subspace of Y at point {point}")
            }
            Violation::KeyNotOpen { set } => write!(f, "table key {set:x} is not open in X"),
            Violation::MissingOpen { open } => write!(f, "no image for open set {open:x}"),
            Violation::ImageNotOpen { open, image } => {
                write!(f, "e({open:x}) = {image:x} is not open in Y")
            }
            Violation::EmptyImage { image } => write!(f, "e(0) = {image:x} is not empty"),
            Violation::Trace { open, image } => {
                write!(f, "e({open:x}) = {image:x} does not trace back to {open:x}")
            }
            Violation::Overlap { first, second } => {
                write!(f, "disjoint opens {first:x} and {second:x} have intersecting images")
            }
        }
    }
}

/// An open-set operator `e: T_X → T_Y` for `X` embedded in `Y`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RegularOperator {
    x: FiniteTopSpace,
    y: FiniteTopSpace,
    inject: Vec<usize>,
    table: BTreeMap<u64, u64>,
}

impl RegularOperator {
    /// Checks shapes only; see [`RegularOperator::validate`] for the
    /// operator axioms.
    pub fn new(
        x: FiniteTopSpace,
        y: FiniteTopSpace,
        inject: Vec<usize>,
        table: impl IntoIterator<Item = (u64, u64)>,
    ) -> Result<Self> {
        if x.len() > MAX_OPENS_POINTS {
            return Err(Error::TooLarge { what: "operator domain", size: x.len(), limit: MAX_OPENS_POINTS });
        }
        if inject.len() != x.len() {
            return Err(Error::CarrierMismatch(format!(
                "injection has {} entries for {} points",
                inject.len(),
                x.len()
            )));
        }
        let mut seen = 0u64;
        for &p in &inject {
            if p >= y.len() || seen >> p & 1 == 1 {
                return Err(Error::CarrierMismatch(format!("injection entry {p} is out of range or repeated")));
            }
            seen |= 1 << p;
        }
        let mut map = BTreeMap::new();
        for (u, eu) in table {
            if u & !x.full() != 0 || eu & !y.full() != 0 {
                return Err(Error::CarrierMismatch(format!("table entry {u:x} -> {eu:x}")));
            }
            if map.insert(u, eu).is_some() {
                return Err(Error::InvalidOperator(format!("duplicate table key {u:x}")));
            }
        }
        Ok(RegularOperator { x, y, inject, table: map })
    }

    /// `X = Y`, `e(U) = U`.
    pub fn identity(space: &FiniteTopSpace) -> Result<Self> {
        let opens = space.opens()?;
        RegularOperator::new(
            space.clone(),
            space.clone(),
            (0..space.len()).collect(),
            opens.into_iter().map(|u| (u, u)),
        )
    }

    pub fn domain(&self) -> &FiniteTopSpace {
        &self.x
    }

    pub fn codomain(&self) -> &FiniteTopSpace {
        &self.y
    }

    pub fn inject(&self) -> &[usize] {
        &self.inject
    }

    pub fn table(&self) -> &BTreeMap<u64, u64> {
        &self.table
    }

    pub fn apply(&self, u: u64) -> Option<u64> {
        self.table.get(&u).copied()
    }

    /// Image of a subset of `X` under the injection.
    pub fn embed_set(&self, u: u64) -> u64 {
        points_of(u).fold(0, |acc, i| acc | 1 << self.inject[i])
    }

    /// `w ∩ X`, as a subset of `X`.
    pub fn trace(&self, w: u64) -> u64 {
        self.inject.iter().enumerate().filter(|(_, &p)| w >> p & 1 == 1).fold(0, |acc, (i, _)| acc | 1 << i)
    }

    /// Table entries in canonical order of the open set.
    pub fn entries(&self) -> Vec<(u64, u64)> {
        let mut v: Vec<(u64, u64)> = self.table.iter().map(|(&u, &e)| (u, e)).collect();
        v.sort_by_key(|&(u, _)| canonical_key(u));
        v
    }

    /// Checks `e(∅) = ∅`, `e(U) ∩ X = U` and disjointness over all pairs
    /// of opens, together with the shape requirements (subspace topology,
    /// table keyed by exactly the opens of `X`, open images). Reports the
    /// first violation found.
    pub fn validate(&self) -> std::result::Result<(), Violation> {
        let trace_space = self.y.subspace(&self.inject).expect("injection was checked at construction");
        if let Some(point) = (0..self.x.len()).find(|&i| trace_space.min_nbhd(i) != self.x.min_nbhd(i)) {
            return Err(Violation::NotSubspace { point });
        }
        if let Some(&set) = self.table.keys().find(|&&u| !self.x.is_open(u)) {
            return Err(Violation::KeyNotOpen { set });
        }
        let opens = self.x.opens().expect("domain size was checked at construction");
        if let Some(&open) = opens.iter().find(|u| !self.table.contains_key(u)) {
            return Err(Violation::MissingOpen { open });
        }
        let image = self.table[&0];
        if image != 0 {
            return Err(Violation::EmptyImage { image });
        }
        for &open in &opens {
            let image = self.table[&open];
            if !self.y.is_open(image) {
                return Err(Violation::ImageNotOpen { open, image });
            }
            if self.trace(image) != open {
                return Err(Violation::Trace { open, image });
            }
        }
        for (i, &u) in opens.iter().enumerate() {
            for &v in &opens[i + 1..] {
                if u & v == 0 && self.table[&u] & self.table[&v] != 0 {
                    return Err(Violation::Overlap { first: u, second: v });
                }
            }
        }
        Ok(())
    }

    fn require_valid(&self) -> Result<()> {
        self.validate().map_err(|v| Error::InvalidOperator(v.to_string()))
    }
}

/// Product of regular operators: on a box `V = ∏ U_α`,
/// `θ₁(V) = ∏ e_α(U_α)`, and `θ(G)` is the union of `θ₁(V)` over boxes
/// `V ⊆ G`.
pub fn product_operator(parts: &[RegularOperator]) -> Result<RegularOperator> {
    if parts.is_empty() {
        return Err(Error::InvalidOperator("empty product".into()));
    }
    for p in parts {
        p.require_valid()?;
    }
    let xs: Vec<FiniteTopSpace> = parts.iter().map(|p| p.x.clone()).collect();
    let ys: Vec<FiniteTopSpace> = parts.iter().map(|p| p.y.clone()).collect();
    let x_sizes: Vec<usize> = xs.iter().map(FiniteTopSpace::len).collect();
    let y_sizes: Vec<usize> = ys.iter().map(FiniteTopSpace::len).collect();
    let x = FiniteTopSpace::product(&xs)?;
    let y = FiniteTopSpace::product(&ys)?;
    if x.len() > MAX_OPENS_POINTS {
        return Err(Error::TooLarge { what: "product domain", size: x.len(), limit: MAX_OPENS_POINTS });
    }
    let inject = (0..x.len())
        .map(|p| {
            let coords = decompose(p, &x_sizes);
            let mut index = 0;
            let mut stride = 1;
            for ((c, part), size) in coords.iter().zip(parts).zip(&y_sizes) {
                index += part.inject[*c] * stride;
                stride *= size;
            }
            index
        })
        .collect();

    // Every basic box with nonempty sides, with its θ₁ image.
    let factor_opens: Vec<Vec<u64>> =
        parts.iter().map(|p| p.table.keys().copied().filter(|&u| u != 0).collect()).collect();
    let mut boxes: Vec<(u64, u64)> = Vec::new();
    let mut choice = vec![0usize; parts.len()];
    'outer: loop {
        let sides: Vec<u64> = choice.iter().zip(&factor_opens).map(|(&i, o)| o[i]).collect();
        let images: Vec<u64> = sides.iter().zip(parts).map(|(&u, p)| p.table[&u]).collect();
        boxes.push((boxes_to_mask(&sides, &x_sizes), boxes_to_mask(&images, &y_sizes)));
        for (slot, opens) in choice.iter_mut().zip(&factor_opens) {
            *slot += 1;
            if *slot < opens.len() {
                continue 'outer;
            }
            *slot = 0;
        }
        break;
    }
    let table: Vec<(u64, u64)> = x
        .opens()?
        .into_iter()
        .map(|g| {
            let image = boxes.iter().filter(|(v, _)| v & !g == 0).fold(0, |acc, (_, t)| acc | t);
            (g, image)
        })
        .collect();
    RegularOperator::new(x, y, inject, table)
}

/// `W ↦ outer(inner(W))` for `X ⊆ X′` (inner) and `X′ ⊆ Z` (outer).
pub fn compose_operators(outer: &RegularOperator, inner: &RegularOperator) -> Result<RegularOperator> {
    if inner.y != outer.x {
        return Err(Error::CarrierMismatch("inner codomain differs from outer domain".into()));
    }
    outer.require_valid()?;
    inner.require_valid()?;
    let inject = inner.inject.iter().map(|&p| outer.inject[p]).collect();
    let table = inner
        .table
        .iter()
        .map(|(&w, &mid)| {
            outer
                .apply(mid)
                .map(|image| (w, image))
                .ok_or_else(|| Error::InvalidOperator(format!("{mid:x} is not open in X′")))
        })
        .collect::<Result<Vec<_>>>()?;
    RegularOperator::new(inner.x.clone(), outer.y.clone(), inject, table)
}

/// Every regular operator for `X` embedded in `Y` by `inject`, in
/// canonical order of the image lists. `Y` has at most six points.
pub fn regular_operators(x: &FiniteTopSpace, y: &FiniteTopSpace, inject: &[usize]) -> Result<Vec<RegularOperator>> {
    let mut found = Vec::new();
    search_operators(x, y, inject, &mut |op| {
        found.push(op);
        true
    })?;
    Ok(found)
}

/// The first regular operator found by [`regular_operators`], if any.
pub fn find_regular_operator(
    x: &FiniteTopSpace,
    y: &FiniteTopSpace,
    inject: &[usize],
) -> Result<Option<RegularOperator>> {
    let mut found = None;
    search_operators(x, y, inject, &mut |op| {
        found = Some(op);
        false
    })?;
    Ok(found)
}

fn search_operators(
    x: &FiniteTopSpace,
    y: &FiniteTopSpace,
    inject: &[usize],
    emit: &mut dyn FnMut(RegularOperator) -> bool,
) -> Result<()> {
    if y.len() > MAX_SEARCH_POINTS {
        return Err(Error::TooLarge { what: "codomain for operator search", size: y.len(), limit: MAX_SEARCH_POINTS });
    }
    let shell = RegularOperator::new(x.clone(), y.clone(), inject.to_vec(), [])?;
    if y.subspace(inject)? != *x {
        return Ok(());
    }
    let x_opens = x.opens()?;
    let y_opens = y.opens()?;
    let candidates: Vec<Vec<u64>> =
        x_opens.iter().map(|&u| y_opens.iter().copied().filter(|&w| shell.trace(w) == u).collect()).collect();

    struct Search<'a> {
        x_opens: &'a [u64],
        candidates: &'a [Vec<u64>],
        chosen: Vec<u64>,
    }
    fn walk(s: &mut Search<'_>, shell: &RegularOperator, emit: &mut dyn FnMut(RegularOperator) -> bool) -> bool {
        let i = s.chosen.len();
        if i == s.x_opens.len() {
            let table = s.x_opens.iter().copied().zip(s.chosen.iter().copied());
            let op = RegularOperator { table: table.collect(), ..shell.clone() };
            return emit(op);
        }
        let u = s.x_opens[i];
        for k in 0..s.candidates[i].len() {
            let w = s.candidates[i][k];
            if u == 0 && w != 0 {
                continue;
            }
            let clash = s.chosen.iter().zip(s.x_opens).any(|(&img, &v)| v & u == 0 && img & w != 0);
            if clash {
                continue;
            }
            s.chosen.push(w);
            let more = walk(s, shell, emit);
            s.chosen.pop();
            if !more {
                return false;
            }
        }
        true
    }
    let mut search = Search { x_opens: &x_opens, candidates: &candidates, chosen: Vec::new() };
    walk(&mut search, &shell, emit);
    Ok(())
}

/// A set-valued map from the points of a space to subsets of a finite
/// target, one explicit value per point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Multimap {
    target: usize,
    values: Vec<FixedBitSet>,
}

impl Multimap {
    pub fn new(target: usize, values: Vec<FixedBitSet>) -> Self {
        Multimap { target, values }
    }

    pub fn target(&self) -> usize {
        self.target
    }

    pub fn values(&self) -> &[FixedBitSet] {
        &self.values
    }

    pub fn value(&self, y: usize) -> &FixedBitSet {
        &self.values[y]
    }

    pub fn value_list(&self, y: usize) -> Vec<usize> {
        self.values[y].ones().collect()
    }

    /// First point with an empty value.
    pub fn first_empty(&self) -> Option<usize> {
        self.values.iter().position(FixedBitSet::is_clear)
    }

    /// Upper semicontinuity into a discrete target: every point of the
    /// minimal neighbourhood of `y` has its value inside `r(y)`. Returns
    /// the first offending `(y, y′)`.
    pub fn usc_violation(&self, space: &FiniteTopSpace) -> Option<(usize, usize)> {
        (0..self.values.len()).find_map(|y| {
            points_of(space.min_nbhd(y)).find(|&z| !self.values[z].is_subset(&self.values[y])).map(|z| (y, z))
        })
    }
}

/// A set-valued map `r: Y → λX` with `X` discrete and embedded in `Y`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Usco {
    x: GroundSet,
    y: FiniteTopSpace,
    inject: Vec<usize>,
    lambda: Superextension,
    map: Multimap,
}

impl Usco {
    /// Wraps explicit values (indices into `enumerate_mls(x)`). Shapes
    /// are checked here; [`Usco::check`] tests the usco and point-fixing
    /// conditions.
    pub fn new(x: GroundSet, y: FiniteTopSpace, inject: Vec<usize>, values: Vec<Vec<usize>>) -> Result<Self> {
        let lambda = enumerate_mls(x)?;
        if inject.len() != x.len() || values.len() != y.len() {
            return Err(Error::CarrierMismatch("usco shape does not match X and Y".into()));
        }
        if inject.iter().any(|&p| p >= y.len()) {
            return Err(Error::CarrierMismatch("injection leaves Y".into()));
        }
        let values = values
            .into_iter()
            .map(|v| {
                if let Some(&bad) = v.iter().find(|&&i| i >= lambda.len()) {
                    return Err(Error::CarrierMismatch(format!("no system with index {bad}")));
                }
                let mut b = FixedBitSet::with_capacity(lambda.len());
                b.extend(v);
                Ok(b)
            })
            .collect::<Result<Vec<_>>>()?;
        let map = Multimap::new(lambda.len(), values);
        Ok(Usco { x, y, inject, lambda, map })
    }

    pub fn ground(&self) -> GroundSet {
        self.x
    }

    pub fn space(&self) -> &FiniteTopSpace {
        &self.y
    }

    pub fn inject(&self) -> &[usize] {
        &self.inject
    }

    pub fn lambda(&self) -> &Superextension {
        &self.lambda
    }

    pub fn map(&self) -> &Multimap {
        &self.map
    }

    /// Nonempty values, upper semicontinuity, and `r(x) = {η_x}` on `X`.
    pub fn check(&self) -> Result<()> {
        if let Some(y) = self.map.first_empty() {
            return Err(Error::NotUsco(format!("empty value at {y}")));
        }
        if let Some((y, z)) = self.map.usc_violation(&self.y) {
            return Err(Error::NotUsco(format!("r({z}) is not inside r({y})")));
        }
        for (x, &p) in self.inject.iter().enumerate() {
            let principal = self.lambda.principal_index(x)?;
            if self.map.value_list(p) != [principal] {
                return Err(Error::NotPointFixed(x));
            }
        }
        Ok(())
    }
}

fn plus_bits(u: Subset, lambda: &Superextension) -> Result<FixedBitSet> {
    let mut b = FixedBitSet::with_capacity(lambda.len());
    if !u.is_empty() {
        b.extend(plus_set(u, lambda)?);
    }
    Ok(b)
}

/// `r(y) = ⋂{(cl U)⁺ : y ∈ e(U)}`, and `r(y) = λX` when `y` lies in no
/// `e(U)`. `X` must be discrete.
pub fn usco_from_regular(e: &RegularOperator) -> Result<Usco> {
    e.require_valid()?;
    if !e.x.is_discrete() {
        return Err(Error::NotDiscrete);
    }
    let ground = GroundSet::new(e.x.len())?;
    let lambda = enumerate_mls(ground)?;
    let pluses = e
        .table
        .iter()
        .filter(|(&u, _)| u != 0)
        .map(|(&u, &image)| Ok((image, plus_bits(Subset(e.x.closure(u) as u32), &lambda)?)))
        .collect::<Result<Vec<_>>>()?;
    let values = (0..e.y.len())
        .map(|y| {
            let mut value = FixedBitSet::with_capacity(lambda.len());
            value.insert_range(..);
            for (image, plus) in &pluses {
                if image >> y & 1 == 1 {
                    value.intersect_with(plus);
                }
            }
            value
        })
        .collect();
    let map = Multimap::new(lambda.len(), values);
    Ok(Usco { x: ground, y: e.y.clone(), inject: e.inject.clone(), lambda, map })
}

/// `e(U) = {y : r(y) ⊆ U⁺}` for every `U ⊆ X`.
pub fn regular_from_usco(r: &Usco) -> Result<RegularOperator> {
    r.check()?;
    let x = FiniteTopSpace::discrete(r.x.len())?;
    let table = r
        .x
        .subsets()
        .map(|u| {
            let plus = plus_bits(u, &r.lambda)?;
            let image = (0..r.y.len()).filter(|&y| r.map.value(y).is_subset(&plus)).fold(0u64, |acc, y| acc | 1 << y);
            Ok((u.0 as u64, image))
        })
        .collect::<Result<Vec<_>>>()?;
    RegularOperator::new(x, r.y.clone(), r.inject.clone(), table)
}

/// The three-point example: discrete `X = {0, 1}` inside
/// `Y = {0, 1, 2}` whose opens are generated by `{0}`, `{1}` and `Y`,
/// with `e({0}) = {0}`, `e({1}) = {1}`, `e(X) = Y`.
pub fn three_point_example() -> RegularOperator {
    let x = FiniteTopSpace::discrete(2).expect("two points");
    let y = FiniteTopSpace::new(vec![0b001, 0b010, 0b111]).expect("valid space");
    RegularOperator::new(x, y, vec![0, 1], [(0, 0), (0b01, 0b001), (0b10, 0b010), (0b11, 0b111)]).expect("valid shape")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn opens_examples() {
        let d2 = FiniteTopSpace::discrete(2).unwrap();
        assert_eq!(d2.opens().unwrap(), vec![0, 0b01, 0b10, 0b11]);
        let sierpinski = FiniteTopSpace::new(vec![0b01, 0b11]).unwrap();
        assert_eq!(sierpinski.opens().unwrap(), vec![0, 0b01, 0b11]);
    }

    #[test]
    fn space_validation() {
        assert!(FiniteTopSpace::new(vec![0b10, 0b10]).is_err());
        // 1 ∈ U(0) but U(1) ⊄ U(0)
        assert!(FiniteTopSpace::new(vec![0b011, 0b110, 0b100]).is_err());
        assert!(FiniteTopSpace::new(vec![]).is_err());
    }

    #[test]
    fn closure_in_sierpinski() {
        let s = FiniteTopSpace::new(vec![0b01, 0b11]).unwrap();
        assert_eq!(s.closure(0b01), 0b11);
        assert_eq!(s.closure(0b10), 0b10);
    }

    #[test]
    fn validate_examples() {
        let d3 = FiniteTopSpace::discrete(3).unwrap();
        assert_eq!(RegularOperator::identity(&d3).unwrap().validate(), Ok(()));
        assert_eq!(three_point_example().validate(), Ok(()));

        let e = three_point_example();
        let mut table = e.table().clone();
        table.insert(0b01, 0b111);
        let bad = RegularOperator::new(e.domain().clone(), e.codomain().clone(), vec![0, 1], table).unwrap();
        assert_eq!(bad.validate(), Err(Violation::Trace { open: 0b01, image: 0b111 }));
    }

    #[test]
    fn validate_catches_overlap_and_missing() {
        let e = three_point_example();
        let x = e.domain().clone();
        let y = FiniteTopSpace::discrete(3).unwrap();
        let overlap = RegularOperator::new(
            x.clone(),
            y.clone(),
            vec![0, 1],
            [(0, 0), (0b01, 0b101), (0b10, 0b110), (0b11, 0b111)],
        )
        .unwrap();
        assert_eq!(overlap.validate(), Err(Violation::Overlap { first: 0b01, second: 0b10 }));
        let missing = RegularOperator::new(x, y, vec![0, 1], [(0, 0), (0b01, 0b001)]).unwrap();
        assert_eq!(missing.validate(), Err(Violation::MissingOpen { open: 0b10 }));
    }

    #[test]
    fn product_of_identities_is_identity() {
        let d2 = FiniteTopSpace::discrete(2).unwrap();
        let id = RegularOperator::identity(&d2).unwrap();
        let p = product_operator(&[id.clone(), id]).unwrap();
        assert_eq!(p.validate(), Ok(()));
        assert!(p.table().iter().all(|(u, e)| u == e));
        assert_eq!(p.inject(), &[0, 1, 2, 3]);
    }

    #[test]
    fn product_of_three_point_examples() {
        let e = three_point_example();
        let p = product_operator(&[e.clone(), e.clone()]).unwrap();
        assert_eq!(p.codomain().len(), 9);
        assert_eq!(p.validate(), Ok(()));
        assert_eq!(product_operator(std::slice::from_ref(&e)).unwrap(), e);
    }

    #[test]
    fn composition_with_identity() {
        let e = three_point_example();
        let id_x = RegularOperator::identity(e.domain()).unwrap();
        let id_y = RegularOperator::identity(e.codomain()).unwrap();
        assert_eq!(compose_operators(&e, &id_x).unwrap(), e);
        assert_eq!(compose_operators(&id_y, &e).unwrap(), e);
        assert!(matches!(compose_operators(&e, &e), Err(Error::CarrierMismatch(_))));
    }

    #[test]
    fn usco_from_identity() {
        let d3 = FiniteTopSpace::discrete(3).unwrap();
        let r = usco_from_regular(&RegularOperator::identity(&d3).unwrap()).unwrap();
        for x in 0..3 {
            assert_eq!(r.map().value_list(x), vec![r.lambda().principal_index(x).unwrap()]);
        }
        assert_eq!(r.check(), Ok(()));
    }

    #[test]
    fn usco_from_three_point_example() {
        let r = usco_from_regular(&three_point_example()).unwrap();
        assert_eq!(r.lambda().len(), 2);
        assert_eq!(r.map().value_list(2), vec![0, 1]);
        assert_eq!(r.map().value_list(0), vec![0]);
        assert_eq!(r.map().value_list(1), vec![1]);
        assert_eq!(r.check(), Ok(()));
        let back = regular_from_usco(&r).unwrap();
        assert_eq!(back.validate(), Ok(()));
        assert_eq!(back.apply(0b01), Some(0b001));
        assert_eq!(back.apply(0b11), Some(0b111));
    }

    #[test]
    fn fallback_branch() {
        // e(X) = X leaves the extra point outside every image.
        let e = three_point_example();
        let mut table = e.table().clone();
        table.insert(0b11, 0b011);
        let narrowed = RegularOperator::new(e.domain().clone(), e.codomain().clone(), vec![0, 1], table).unwrap();
        assert_eq!(narrowed.validate(), Ok(()));
        let r = usco_from_regular(&narrowed).unwrap();
        assert_eq!(r.map().value_list(2), vec![0, 1]);
    }

    #[test]
    fn regular_from_constant_usco() {
        let y = three_point_example().codomain().clone();
        let g2 = GroundSet::new(2).unwrap();
        let r = Usco::new(g2, y, vec![0, 1], vec![vec![0], vec![1], vec![0, 1]]).unwrap();
        let e = regular_from_usco(&r).unwrap();
        assert_eq!(e.validate(), Ok(()));
        assert_eq!(e.apply(0b01), Some(0b001));
        assert_eq!(e.apply(0b10), Some(0b010));
        assert_eq!(e.apply(0b11), Some(0b111));
    }

    #[test]
    fn regular_from_usco_rejects_bad_maps() {
        let y = three_point_example().codomain().clone();
        let g2 = GroundSet::new(2).unwrap();
        let swapped = Usco::new(g2, y.clone(), vec![0, 1], vec![vec![1], vec![0], vec![0, 1]]).unwrap();
        assert_eq!(regular_from_usco(&swapped), Err(Error::NotPointFixed(0)));
        // r(2) = {η_0} but 0 ∈ U(2) has r(0) ⊆ r(2), 1 ∈ U(2) has r(1) ⊄ r(2)
        let not_usc = Usco::new(g2, y, vec![0, 1], vec![vec![0], vec![1], vec![0]]).unwrap();
        assert!(matches!(regular_from_usco(&not_usc), Err(Error::NotUsco(_))));
    }

    #[test]
    fn operator_search() {
        let e = three_point_example();
        let all = regular_operators(e.domain(), e.codomain(), e.inject()).unwrap();
        assert!(all.contains(&e));
        assert!(all.iter().all(|op| op.validate().is_ok()));
        // e(X) may be {0,1} or Y, the singletons are forced.
        assert_eq!(all.len(), 2);
        let first = find_regular_operator(e.domain(), e.codomain(), e.inject()).unwrap();
        assert_eq!(first.as_ref(), all.first());
    }
}
