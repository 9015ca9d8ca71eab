mod common;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use supext_core::embed::{product_operator, three_point_example, usco_from_regular};
use supext_core::functionals::{sample_term, GeneratedSubspace, Generator};
use supext_core::io;
use supext_core::superext::{enumerate_mls, plus_subbase};
use supext_core::{Error, GroundSet, SetFamily, Subset};

fn g(n: usize) -> GroundSet {
    GroundSet::new(n).unwrap()
}

fn text<T: serde::Serialize>(v: &T) -> String {
    io::to_pretty(v)
}

proptest! {
    #[test]
    fn terms_round_trip(seed in any::<u64>(), n in 1usize..=4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t = sample_term(&mut rng, g(n), 3);
        let s = text(&io::term_to_json(&t));
        let back = io::term_from_str(&s).unwrap();
        prop_assert_eq!(text(&io::term_to_json(&back)), s);
        for f in common::grid(n, &[-1, 0, 2]) {
            prop_assert_eq!(back.evaluate_values(&f).unwrap(), t.evaluate_values(&f).unwrap());
        }
    }

    #[test]
    fn families_round_trip(masks in prop::collection::vec(0u32..16, 0..8)) {
        let fam = SetFamily::new(g(4), masks.into_iter().map(|m| Subset::from_points((0..4).filter(|x| m >> x & 1 == 1)))).unwrap();
        let s = text(&io::family_to_json(&fam));
        prop_assert_eq!(io::family_from_str(&s).unwrap(), fam);
    }
}

#[test]
fn hex_is_lowercase_without_padding() {
    let lambda = enumerate_mls(g(4)).unwrap();
    let json = text(&io::lambda_to_json(&lambda));
    assert!(json.contains("\"count\": 12"));
    assert!(!json.contains("\"0"), "no leading zeros");
    let sb = plus_subbase(&lambda).unwrap();
    let s = text(&io::subbase_to_json(&sb));
    assert_eq!(io::subbase_from_str(&s).unwrap(), sb);
    assert_eq!(s.to_lowercase(), s);
}

#[test]
fn operators_and_uscos_round_trip() {
    let e = three_point_example();
    for op in [e.clone(), product_operator(&[e.clone(), e]).unwrap()] {
        let s = text(&io::operator_to_json(&op));
        let back = io::operator_from_str(&s).unwrap();
        assert_eq!(back.entries(), op.entries());
        let r = usco_from_regular(&op).unwrap();
        let s = text(&io::usco_to_json(&r));
        assert_eq!(io::usco_from_str(&s).unwrap(), r);
    }
}

#[test]
fn generators_round_trip() {
    let s = GeneratedSubspace::new(g(2), vec![Generator::new(vec![common::qi(0), common::qi(1)], common::q(1, 2))])
        .unwrap();
    let text = text(&io::generators_to_json(&s));
    assert!(text.contains("\"1/2\""));
    let back = io::generators_from_str(&text).unwrap();
    assert_eq!(back.generators(), s.generators());
}

#[test]
fn parse_errors_carry_positions() {
    let err = io::term_from_str("{\n  \"t\": \"dirac\",\n  \"x\": \"one\"\n}").unwrap_err();
    assert!(matches!(err, Error::Parse(_)), "{err:?}");
    assert!(err.to_string().contains("line 3"), "{err}");
    assert!(io::term_from_str(r#"{"t":"linear","w":["1/2","1/3"]}"#).is_err());
    assert!(io::family_from_str(r#"{"n":2,"sets":["G"]}"#).is_err());
}
