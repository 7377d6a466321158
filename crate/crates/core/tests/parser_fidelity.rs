mod common;

use common::astgen::*;
use common::*;
use graphrule::parser::*;
use proptest::prelude::*;

#[test]
fn every_listing_parses_and_round_trips() {
    for name in LISTINGS {
        let q = listing(name);
        let text = render_query(&q);
        assert_eq!(parse_query(&text).unwrap(), q, "{name}\n{text}");
        assert_eq!(render_query(&parse_query(&text).unwrap()), text);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn generated_ast_round_trips(q in query()) {
        let text = render_query(&q);
        let back = parse_unchecked(&text);
        prop_assert!(back.is_ok(), "{}\n{:?}", text, back);
        prop_assert_eq!(back.unwrap(), q);
    }
}

#[test]
fn malformed_inputs_never_panic() {
    let sources: Vec<String> = LISTINGS.iter().map(|n| listing_text(n)).collect();
    let rejected = fuzz_parser(&sources, 10_000, 2024);
    assert!(rejected > 5_000, "{rejected}");
}

#[test]
fn errors_carry_locations() {
    let err = parse_query(
        "MINE GRAPH RULE R GROUPING ON (p:Person)\nDEFINING BODY AS (p)-[:BUY]-(X:Item",
    )
    .unwrap_err();
    match err {
        QueryError::Syntax { line, .. } => assert_eq!(line, 2),
        other => panic!("{other:?}"),
    }
    let err = parse_query("MINE GRAPH RULE R GROUPING ON (p:Person) DEFINING BODY AS (p)-[:BUY]-(X:Item) HEAD AS (p)-[:BUY]-(Y:Item) EXTRACTING RULES WITH SUPPORT > 1.5 AND CONFIDENCE > 0").unwrap_err();
    assert!(matches!(err, QueryError::Semantic(_)));
}
