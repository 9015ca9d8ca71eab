//! JSON file formats.
//!
//! Subsets are lowercase hex masks without leading zeros (point `i` is
//! bit `i`), rationals are `"p/q"` strings, points are 0-indexed.

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};

use crate::embed::{FiniteTopSpace, RegularOperator, Usco};
use crate::functionals::{GeneratedSubspace, Generator, Term};
use crate::inclusion::InclusionHyperspace;
use crate::rational::{text, text_vec, Rational};
use crate::setkit::{parse_hex_u64, GroundSet, PointMap, SetFamily, Subset};
use crate::subbase::Subbase;
use crate::superext::{MaxLinkedSystem, Superextension};
use crate::{Error, Result};

fn parse_err(e: serde_json::Error) -> Error {
    Error::Parse(e.to_string())
}

/// Pretty JSON with a trailing newline.
pub fn to_pretty<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

fn hex_list(family: &SetFamily) -> Vec<String> {
    family.iter().map(Subset::to_hex).collect()
}

fn subsets_from_hex(ground: GroundSet, hex: &[String]) -> Result<Vec<Subset>> {
    hex.iter()
        .map(|h| {
            let s = Subset::from_hex(h)?;
            ground.check_subset(s)?;
            Ok(s)
        })
        .collect()
}

/// Hex of an arbitrary-width bit set.
pub fn bits_to_hex(bits: &FixedBitSet) -> String {
    let nibbles = bits.len().div_ceil(4);
    let digits: String = (0..nibbles)
        .rev()
        .map(|i| {
            let v = (0..4).filter(|b| bits.contains(4 * i + b)).fold(0, |acc, b| acc | 1 << b);
            char::from_digit(v, 16).expect("nibble")
        })
        .skip_while(|&c| c == '0')
        .collect();
    if digits.is_empty() {
        "0".into()
    } else {
        digits
    }
}

/// Parses a hex bit set of at most `len` bits.
pub fn hex_to_bits(s: &str, len: usize) -> Result<FixedBitSet> {
    let canonical = !s.is_empty()
        && s.bytes().all(|b| b.is_ascii_digit() || (b'a'..=b'f').contains(&b))
        && (s == "0" || !s.starts_with('0'));
    if !canonical {
        return Err(Error::Parse(format!("`{s}` is not a lowercase hex mask without leading zeros")));
    }
    let mut bits = FixedBitSet::with_capacity(len);
    for (i, c) in s.bytes().rev().enumerate() {
        let v = (c as char).to_digit(16).expect("checked");
        for b in 0..4 {
            if v >> b & 1 == 1 {
                let p = 4 * i + b;
                if p >= len {
                    return Err(Error::Parse(format!("mask `{s}` has bit {p} beyond {len} points")));
                }
                bits.insert(p);
            }
        }
    }
    Ok(bits)
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilyJson {
    pub n: usize,
    pub sets: Vec<String>,
}

pub fn family_to_json(family: &SetFamily) -> FamilyJson {
    FamilyJson { n: family.ground().len(), sets: hex_list(family) }
}

pub fn family_from_str(s: &str) -> Result<SetFamily> {
    let j: FamilyJson = serde_json::from_str(s).map_err(parse_err)?;
    let ground = GroundSet::new(j.n)?;
    SetFamily::new(ground, subsets_from_hex(ground, &j.sets)?)
}

/// Output of `enumerate` and `ghyper`: each system by its minimal sets.
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnumerationJson {
    pub n: usize,
    pub count: u64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub systems: Option<Vec<Vec<String>>>,
}

pub fn lambda_to_json(lambda: &Superextension) -> EnumerationJson {
    EnumerationJson {
        n: lambda.ground().len(),
        count: lambda.len() as u64,
        systems: Some(lambda.systems().iter().map(|eta| hex_list(eta.minimal())).collect()),
    }
}

pub fn ih_to_json(ground: GroundSet, all: &[InclusionHyperspace]) -> EnumerationJson {
    EnumerationJson {
        n: ground.len(),
        count: all.len() as u64,
        systems: Some(all.iter().map(|a| hex_list(a.minimal())).collect()),
    }
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "t", rename_all = "lowercase")]
pub enum TermJson {
    Dirac {
        x: usize,
    },
    Maxmin {
        minimal: Vec<String>,
    },
    Min {
        #[serde(rename = "F")]
        set: String,
    },
    Max {
        #[serde(rename = "F")]
        set: String,
    },
    Linear {
        #[serde(with = "text_vec")]
        w: Vec<Rational>,
    },
    Convex {
        #[serde(with = "text_vec")]
        w: Vec<Rational>,
        parts: Vec<TermJson>,
    },
    Precompose {
        map: Vec<usize>,
        inner: Box<TermJson>,
    },
}

pub fn term_to_json(term: &Term) -> TermJson {
    match term {
        Term::Dirac(x) => TermJson::Dirac { x: *x },
        Term::MaxMin(eta) => TermJson::Maxmin { minimal: hex_list(eta.minimal()) },
        Term::MinOver(s) => TermJson::Min { set: s.to_hex() },
        Term::MaxOver(s) => TermJson::Max { set: s.to_hex() },
        Term::Linear(w) => TermJson::Linear { w: w.clone() },
        Term::Convex(parts) => TermJson::Convex {
            w: parts.iter().map(|(w, _)| w.clone()).collect(),
            parts: parts.iter().map(|(_, t)| term_to_json(t)).collect(),
        },
        Term::Precompose(map, inner) => {
            TermJson::Precompose { map: map.images().to_vec(), inner: Box::new(term_to_json(inner)) }
        }
    }
}

fn mask_ground(masks: impl Iterator<Item = Subset>) -> Result<GroundSet> {
    let top = masks.map(|s| 32 - s.0.leading_zeros() as usize).max().unwrap_or(0);
    GroundSet::new(top.max(1))
}

/// Ground sets are inferred: a max-min term lives on the points its
/// minimal sets use, a map's codomain ends at its largest image.
pub fn term_from_json(j: &TermJson) -> Result<Term> {
    let term = match j {
        TermJson::Dirac { x } => Term::Dirac(*x),
        TermJson::Maxmin { minimal } => {
            let sets = minimal.iter().map(|h| Subset::from_hex(h)).collect::<Result<Vec<_>>>()?;
            let ground = mask_ground(sets.iter().copied())?;
            Term::MaxMin(MaxLinkedSystem::from_family(&SetFamily::new(ground, sets)?)?)
        }
        TermJson::Min { set } => Term::MinOver(Subset::from_hex(set)?),
        TermJson::Max { set } => Term::MaxOver(Subset::from_hex(set)?),
        TermJson::Linear { w } => Term::Linear(w.clone()),
        TermJson::Convex { w, parts } => {
            if w.len() != parts.len() {
                return Err(Error::InvalidTerm(format!("{} weights for {} parts", w.len(), parts.len())));
            }
            let parts = parts.iter().map(term_from_json).collect::<Result<Vec<_>>>()?;
            Term::Convex(w.iter().cloned().zip(parts).collect())
        }
        TermJson::Precompose { map, inner } => {
            let domain = GroundSet::new(map.len())?;
            let codomain = GroundSet::new(map.iter().max().map_or(1, |m| m + 1))?;
            Term::Precompose(PointMap::new(domain, codomain, map.clone())?, Box::new(term_from_json(inner)?))
        }
    };
    term.validate()?;
    Ok(term)
}

/// The term format read as a plain struct. An internally tagged enum is
/// buffered before it is matched, which loses error positions; a struct
/// streams, so type errors keep their line and column.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTerm {
    t: String,
    x: Option<usize>,
    minimal: Option<Vec<String>>,
    #[serde(rename = "F")]
    set: Option<String>,
    w: Option<Vec<RawRational>>,
    parts: Option<Vec<RawTerm>>,
    map: Option<Vec<usize>>,
    inner: Option<Box<RawTerm>>,
}

#[derive(Deserialize)]
struct RawRational(#[serde(with = "text")] Rational);

impl RawTerm {
    fn into_json(self) -> Result<TermJson> {
        fn need<T>(v: Option<T>, tag: &str, field: &str) -> Result<T> {
            v.ok_or_else(|| Error::InvalidTerm(format!("\"{tag}\" node needs field \"{field}\"")))
        }
        let t = self.t.as_str();
        let weights = |w: Option<Vec<RawRational>>| Ok::<_, Error>(need(w, t, "w")?.into_iter().map(|r| r.0).collect());
        Ok(match t {
            "dirac" => TermJson::Dirac { x: need(self.x, t, "x")? },
            "maxmin" => TermJson::Maxmin { minimal: need(self.minimal, t, "minimal")? },
            "min" => TermJson::Min { set: need(self.set, t, "F")? },
            "max" => TermJson::Max { set: need(self.set, t, "F")? },
            "linear" => TermJson::Linear { w: weights(self.w)? },
            "convex" => TermJson::Convex {
                w: weights(self.w)?,
                parts: need(self.parts, t, "parts")?.into_iter().map(RawTerm::into_json).collect::<Result<_>>()?,
            },
            "precompose" => TermJson::Precompose {
                map: need(self.map, t, "map")?,
                inner: Box::new(need(self.inner, t, "inner")?.into_json()?),
            },
            other => return Err(Error::InvalidTerm(format!("unknown node type \"{other}\""))),
        })
    }
}

pub fn term_from_str(s: &str) -> Result<Term> {
    let raw: RawTerm = serde_json::from_str(s).map_err(parse_err)?;
    term_from_json(&raw.into_json()?)
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SubbaseJson {
    pub carrier: usize,
    pub members: Vec<String>,
}

pub fn subbase_to_json(sb: &Subbase) -> SubbaseJson {
    SubbaseJson { carrier: sb.carrier(), members: sb.members().iter().map(bits_to_hex).collect() }
}

pub fn subbase_from_str(s: &str) -> Result<Subbase> {
    let j: SubbaseJson = serde_json::from_str(s).map_err(parse_err)?;
    let members = j.members.iter().map(|h| hex_to_bits(h, j.carrier)).collect::<Result<Vec<_>>>()?;
    Subbase::new(j.carrier, members)
}

#[derive(Serialize, Deserialize, Clone)]
#[serde(deny_unknown_fields)]
pub struct SpaceJson {
    pub n: usize,
    pub min_nbhd: Vec<String>,
}

pub fn space_to_json(space: &FiniteTopSpace) -> SpaceJson {
    SpaceJson { n: space.len(), min_nbhd: space.min_nbhds().iter().map(|m| format!("{m:x}")).collect() }
}

pub fn space_from_json(j: &SpaceJson) -> Result<FiniteTopSpace> {
    if j.min_nbhd.len() != j.n {
        return Err(Error::InvalidSpace(format!("{} neighbourhoods for {} points", j.min_nbhd.len(), j.n)));
    }
    FiniteTopSpace::new(j.min_nbhd.iter().map(|h| parse_hex_u64(h)).collect::<Result<_>>()?)
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperatorJson {
    #[serde(rename = "X")]
    pub x: SpaceJson,
    #[serde(rename = "Y")]
    pub y: SpaceJson,
    pub inject: Vec<usize>,
    pub table: Vec<(String, String)>,
}

/// Table rows are listed in canonical order of the open set.
pub fn operator_to_json(e: &RegularOperator) -> OperatorJson {
    OperatorJson {
        x: space_to_json(e.domain()),
        y: space_to_json(e.codomain()),
        inject: e.inject().to_vec(),
        table: e.entries().into_iter().map(|(u, eu)| (format!("{u:x}"), format!("{eu:x}"))).collect(),
    }
}

pub fn operator_from_str(s: &str) -> Result<RegularOperator> {
    let j: OperatorJson = serde_json::from_str(s).map_err(parse_err)?;
    let table =
        j.table.iter().map(|(u, eu)| Ok((parse_hex_u64(u)?, parse_hex_u64(eu)?))).collect::<Result<Vec<_>>>()?;
    RegularOperator::new(space_from_json(&j.x)?, space_from_json(&j.y)?, j.inject, table)
}

/// A usco map `Y → λX`: the systems of `λX` in canonical order and, for
/// each point of `Y`, the indices of the systems in its value.
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UscoJson {
    pub n: usize,
    #[serde(rename = "Y")]
    pub y: SpaceJson,
    pub inject: Vec<usize>,
    pub systems: Vec<Vec<String>>,
    pub values: Vec<Vec<usize>>,
}

pub fn usco_to_json(r: &Usco) -> UscoJson {
    UscoJson {
        n: r.ground().len(),
        y: space_to_json(r.space()),
        inject: r.inject().to_vec(),
        systems: r.lambda().systems().iter().map(|eta| hex_list(eta.minimal())).collect(),
        values: (0..r.space().len()).map(|y| r.map().value_list(y)).collect(),
    }
}

/// The `systems` listing must match `λX` in canonical order.
pub fn usco_from_str(s: &str) -> Result<Usco> {
    let j: UscoJson = serde_json::from_str(s).map_err(parse_err)?;
    let ground = GroundSet::new(j.n)?;
    let usco = Usco::new(ground, space_from_json(&j.y)?, j.inject, j.values)?;
    let listed = j
        .systems
        .iter()
        .map(|sets| SetFamily::new(ground, subsets_from_hex(ground, sets)?))
        .collect::<Result<Vec<_>>>()?;
    let canonical: Vec<&SetFamily> = usco.lambda().systems().iter().map(|eta| eta.minimal()).collect();
    if listed.iter().collect::<Vec<_>>() != canonical {
        return Err(Error::CarrierMismatch("systems differ from the canonical listing of λX".into()));
    }
    Ok(usco)
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorJson {
    #[serde(with = "text_vec")]
    pub b: Vec<Rational>,
    #[serde(with = "text")]
    pub v: Rational,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorsJson {
    pub n: usize,
    pub generators: Vec<GeneratorJson>,
}

pub fn generators_to_json(space: &GeneratedSubspace) -> GeneratorsJson {
    GeneratorsJson {
        n: space.ground().len(),
        generators: space.generators().iter().map(|g| GeneratorJson { b: g.b.clone(), v: g.v.clone() }).collect(),
    }
}

pub fn generators_from_str(s: &str) -> Result<GeneratedSubspace> {
    let j: GeneratorsJson = serde_json::from_str(s).map_err(parse_err)?;
    let ground = GroundSet::new(j.n)?;
    GeneratedSubspace::new(ground, j.generators.into_iter().map(|g| Generator::new(g.b, g.v)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embed::three_point_example;
    use crate::rational::ratio;

    #[test]
    fn bit_hex() {
        let mut b = FixedBitSet::with_capacity(70);
        assert_eq!(bits_to_hex(&b), "0");
        b.insert(0);
        b.insert(69);
        let h = bits_to_hex(&b);
        assert_eq!(h, "200000000000000001");
        assert_eq!(hex_to_bits(&h, 70).unwrap(), b);
        assert!(hex_to_bits(&h, 60).is_err());
        assert!(hex_to_bits("0f", 8).is_err());
        assert!(hex_to_bits("F", 8).is_err());
        assert!(hex_to_bits("", 8).is_err());
    }

    #[test]
    fn term_round_trip() {
        let text = r#"{"t":"convex","w":["1/2","1/2"],"parts":[{"t":"max","F":"7"},{"t":"min","F":"7"}]}"#;
        let t = term_from_str(text).unwrap();
        assert_eq!(t, Term::midrange(Subset(7)).unwrap());
        assert_eq!(serde_json::to_string(&term_to_json(&t)).unwrap(), text);

        let maxmin = term_from_str(r#"{"t":"maxmin","minimal":["3","5","6"]}"#).unwrap();
        assert!(maxmin.fits(3) && maxmin.fits(5) && !maxmin.fits(2));
        assert!(term_from_str(r#"{"t":"maxmin","minimal":["1","2"]}"#).is_err());
        assert!(term_from_str(r#"{"t":"linear","w":["1/2","1/3"]}"#).is_err());
        let pre = term_from_str(r#"{"t":"precompose","map":[1,0],"inner":{"t":"dirac","x":0}}"#).unwrap();
        assert_eq!(pre.evaluate_values(&[ratio(3, 1), ratio(4, 1)]).unwrap(), ratio(4, 1));
    }

    #[test]
    fn parse_errors_carry_positions() {
        let err = term_from_str("{\n  \"t\": \"dirac\",\n  \"x\": }").unwrap_err();
        assert!(err.to_string().contains("line 3"), "{err}");
    }

    #[test]
    fn operator_round_trip() {
        let e = three_point_example();
        let text = to_pretty(&operator_to_json(&e));
        assert_eq!(operator_from_str(&text).unwrap(), e);
    }

    #[test]
    fn generators_round_trip() {
        let text = r#"{"n":2,"generators":[{"b":["0/1","1/1"],"v":"1/1"}]}"#;
        let space = generators_from_str(text).unwrap();
        assert_eq!(serde_json::to_string(&generators_to_json(&space)).unwrap(), text);
    }

    #[test]
    fn family_round_trip() {
        let fam = family_from_str(r#"{"n":3,"sets":["6","1"]}"#).unwrap();
        assert_eq!(family_to_json(&fam).sets, vec!["1", "6"]);
        assert!(family_from_str(r#"{"n":2,"sets":["4"]}"#).is_err());
    }
}
