//! Rule and complex files shipped with the crate, addressable by name.

pub const RULES: &[(&str, &str)] = &[
    ("fibonacci", include_str!("../data/rules/fibonacci.json")),
    ("thue-morse", include_str!("../data/rules/thue-morse.json")),
    (
        "period-doubling",
        include_str!("../data/rules/period-doubling.json"),
    ),
    ("periodic", include_str!("../data/rules/periodic.json")),
    (
        "periodic-2d",
        include_str!("../data/rules/periodic-2d.json"),
    ),
    (
        "chair-block",
        include_str!("../data/rules/chair-block.json"),
    ),
];

pub const COMPLEXES: &[(&str, &str)] = &[
    ("torus", include_str!("../data/complexes/torus.cw")),
    ("klein", include_str!("../data/complexes/klein.cw")),
    (
        "projective-plane",
        include_str!("../data/complexes/projective-plane.cw"),
    ),
    ("wedge", include_str!("../data/complexes/wedge.cw")),
];

pub fn rule_text(name: &str) -> Option<&'static str> {
    RULES.iter().find(|(n, _)| *n == name).map(|(_, t)| *t)
}

pub fn complex_text(name: &str) -> Option<&'static str> {
    COMPLEXES.iter().find(|(n, _)| *n == name).map(|(_, t)| *t)
}

pub fn rule(name: &str) -> Option<crate::SubstitutionRule> {
    rule_text(name).map(|t| crate::parse_rule(t).expect("bundled rule parses"))
}

pub fn complex(name: &str) -> Option<crate::CellComplex> {
    complex_text(name).map(|t| crate::parse_complex(t).expect("bundled complex parses"))
}
