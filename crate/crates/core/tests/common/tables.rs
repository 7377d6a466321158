use graphrule::rules::{AssociationRule, ConjunctItems};

pub const TOL: f64 = 0.005;

pub type Row = (&'static str, &'static str, f64, f64);

pub fn side(s: &[ConjunctItems]) -> String {
    s.iter()
        .map(|c| {
            c.iter()
                .map(|t| t.join(","))
                .collect::<Vec<_>>()
                .join(" + ")
        })
        .collect::<Vec<_>>()
        .join(" ; ")
}

pub fn check(name: &str, rules: &[AssociationRule], expected: &[Row]) {
    let got: Vec<(String, String, f64, f64)> = rules
        .iter()
        .map(|r| (side(&r.body), side(&r.head), r.support, r.confidence))
        .collect();
    assert_eq!(got.len(), expected.len(), "{name}: {got:#?}");
    for (g, e) in got.iter().zip(expected) {
        assert_eq!((g.0.as_str(), g.1.as_str()), (e.0, e.1), "{name}");
        assert!((g.2 - e.2).abs() <= TOL, "{name} support {g:?} vs {e:?}");
        assert!((g.3 - e.3).abs() <= TOL, "{name} confidence {g:?} vs {e:?}");
    }
}

pub const T1: &[Row] = &[
    ("Dress", "Jeans", 0.25, 0.5),
    ("Dress", "Shoes", 0.5, 1.0),
    ("Jeans", "Dress", 0.25, 0.5),
    ("Jeans", "Shoes", 0.25, 0.5),
    ("Shoes", "Dress", 0.5, 1.0),
    ("Shoes", "Jeans", 0.25, 0.5),
    ("Shorts", "T-shirt", 0.25, 1.0),
    ("T-shirt", "Shorts", 0.25, 1.0),
];

// Dress + Shoes -> Jeans has confidence 0.5 (one of the two Dress and Shoes
// buyers also buys Jeans).
pub const T2: &[Row] = &[
    ("Dress", "Jeans", 0.25, 0.5),
    ("Dress", "Shoes", 0.5, 1.0),
    ("Dress + Jeans", "Shoes", 0.25, 1.0),
    ("Dress + Shoes", "Jeans", 0.25, 0.5),
    ("Jeans", "Dress", 0.25, 0.5),
    ("Jeans", "Shoes", 0.25, 0.5),
    ("Jeans + Shoes", "Dress", 0.25, 1.0),
    ("Shoes", "Dress", 0.5, 1.0),
    ("Shoes", "Jeans", 0.25, 0.5),
    ("Shorts", "T-shirt", 0.25, 1.0),
    ("T-shirt", "Shorts", 0.25, 1.0),
];

const THIRD: f64 = 1.0 / 3.0;
const TWO_THIRDS: f64 = 2.0 / 3.0;

pub const T3: &[Row] = &[
    ("Dress", "Jeans", THIRD, 0.5),
    ("Dress", "Shoes", TWO_THIRDS, 1.0),
    ("Jeans", "Dress", THIRD, 1.0),
    ("Jeans", "Shoes", THIRD, 1.0),
    ("Shoes", "Dress", TWO_THIRDS, 1.0),
    ("Shoes", "Jeans", THIRD, 0.5),
    ("Shorts", "T-shirt", THIRD, 1.0),
    ("T-shirt", "Shorts", THIRD, 1.0),
];

pub const T4: &[Row] = &[
    ("Dress", "Jeans", 0.25, 1.0),
    ("Dress", "Shoes", 0.25, 1.0),
    ("Shorts", "T-shirt", 0.25, 1.0),
];

pub const T5: &[Row] = &[
    ("Dress", "Jeans", 0.25, 0.5),
    ("Dress", "Shoes", 0.5, 1.0),
    ("Jeans", "Dress", 0.5, TWO_THIRDS),
    ("Jeans", "Shoes", 0.5, TWO_THIRDS),
    ("Shoes", "Dress", 0.5, TWO_THIRDS),
    ("Shoes", "Jeans", 0.5, TWO_THIRDS),
    ("Shorts", "Jeans", 0.25, 0.5),
    ("Shorts", "T-shirt", 0.25, 0.5),
    ("T-shirt", "Shorts", 0.25, 1.0),
];

// Includes Shoes,Sportswear -> Jeans, which follows from Shoes belonging to
// both categories.
pub const T6: &[Row] = &[
    ("Dress,Casual", "Jeans", 0.25, 0.5),
    ("Dress,Casual", "Shoes", 0.5, 1.0),
    ("Jeans,Casual", "Dress", 0.25, 0.5),
    ("Jeans,Casual", "Shoes", 0.25, 0.5),
    ("Shoes,Casual", "Dress", 0.5, 1.0),
    ("Shoes,Casual", "Jeans", 0.25, 0.5),
    ("Shoes,Sportswear", "Dress", 0.5, 1.0),
    ("Shoes,Sportswear", "Jeans", 0.25, 0.5),
    ("Shorts,Sportswear", "T-shirt", 0.25, 1.0),
    ("T-shirt,Sportswear", "Shorts", 0.25, 1.0),
];

pub const T7: &[Row] = &[
    ("Dress,Casual", "Shoes,Sportswear", 0.5, 1.0),
    ("Jeans,Casual", "Shoes,Sportswear", 0.25, 0.5),
    ("Shoes,Sportswear", "Dress,Casual", 0.5, 1.0),
    ("Shoes,Sportswear", "Jeans,Casual", 0.25, 0.5),
];

pub const T8: &[Row] = &[
    ("Casual", "Sportswear", 0.5, TWO_THIRDS),
    ("Sportswear", "Casual", 0.5, TWO_THIRDS),
];

pub const T9: &[Row] = &[
    ("Chiara ; Dress", "Jeans", 0.25, 1.0),
    ("Chiara ; Dress", "Shoes", 0.25, 1.0),
    ("Chiara ; Jeans", "Dress", 0.25, 1.0),
    ("Chiara ; Jeans", "Shoes", 0.25, 1.0),
    ("Chiara ; Shoes", "Dress", 0.25, 1.0),
    ("Chiara ; Shoes", "Jeans", 0.25, 1.0),
    ("Chiara ; Shorts", "T-shirt", 0.25, 1.0),
    ("Chiara ; T-shirt", "Shorts", 0.25, 1.0),
    ("Fabio ; Shorts", "T-shirt", 0.25, 1.0),
    ("Fabio ; T-shirt", "Shorts", 0.25, 1.0),
    ("Sofia ; Dress", "Shoes", 0.25, 1.0),
    ("Sofia ; Shoes", "Dress", 0.25, 1.0),
    ("Sofia ; Shorts", "T-shirt", 0.25, 1.0),
    ("Sofia ; T-shirt", "Shorts", 0.25, 1.0),
];

pub const T10: &[Row] = &[
    ("Casual ; Sportswear", "Shorts", 0.25, 1.0),
    ("Casual ; Sportswear", "T-shirt", 0.25, 1.0),
    ("Sportswear ; Sportswear", "Shorts", 0.25, 1.0),
    ("Sportswear ; Sportswear", "T-shirt", 0.25, 1.0),
];

pub const T11: &[Row] = &[
    ("Casual", "Dress,Casual", THIRD, 0.5),
    ("Casual", "Jeans,Casual", THIRD, 0.5),
    ("Casual", "Shoes,Casual", THIRD, 0.5),
    ("Sportswear", "Shoes,Sportswear", THIRD, 0.5),
    ("Sportswear", "Shorts,Sportswear", THIRD, 0.5),
    ("Sportswear", "T-shirt,Sportswear", THIRD, 0.5),
];

pub const TABLES: &[(&str, &[Row])] = &[
    ("simple", T1),
    ("many_items", T2),
    ("conditioned1", T3),
    ("count_items", T4),
    ("any_path", T5),
    ("path1", T6),
    ("path2", T7),
    ("ignore", T8),
    ("complex_body", T9),
    ("more_complex_body", T10),
    ("influencer_rome", T11),
];
