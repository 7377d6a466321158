mod common;

use std::time::Instant;

use common::tables::*;
use common::*;
use graphrule::miner::{mine, MineOptions};

#[test]
fn all_tables_reproduce() {
    let g = fixture();
    let start = Instant::now();
    for (name, rows) in TABLES {
        let (rules, _) = mine(&g, &listing(name), &MineOptions::default()).unwrap();
        check(name, &rules, rows);
    }
    assert!(start.elapsed().as_secs_f64() < 1.0, "{:?}", start.elapsed());
}

#[test]
fn grouping_predicate_on_other_city() {
    let g = fixture();
    let (rules, _) = mine(&g, &listing("conditioned2"), &MineOptions::default()).unwrap();
    check("conditioned2", &rules, &T1[..6]);
}

#[test]
fn tables_without_pruning_are_identical() {
    let g = fixture();
    let opts = MineOptions {
        prune: false,
        ..MineOptions::default()
    };
    for (name, rows) in TABLES {
        let (rules, _) = mine(&g, &listing(name), &opts).unwrap();
        check(name, &rules, rows);
    }
}
