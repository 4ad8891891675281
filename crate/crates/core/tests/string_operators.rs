use stringforge_core::motzkin::modified_string_poly;
use stringforge_core::stringpoly::{apply, generate_table, golden_table, reduce_mod_i, Variant};

#[test]
fn weight_three_table_matches_reference_rows() {
    let table = generate_table(3).unwrap();
    let mut mismatches = Vec::new();
    for (lambda, eta, a, b) in golden_table() {
        for (variant, expected) in [(Variant::A, a), (Variant::B, b)] {
            let got = table.get(&lambda, &eta, variant).unwrap();
            if *got != expected {
                mismatches.push(format!("({lambda}, {eta}, {variant}): got {got}, table {expected}"));
            }
        }
    }
    assert!(mismatches.is_empty(), "{}", mismatches.join("\n"));
}

#[test]
fn operators_reproduce_path_sums() {
    let table = generate_table(3).unwrap();
    for e in &table.entries {
        assert!(e.op.max_dr() <= 1);
        assert_eq!(reduce_mod_i(&e.op), e.op);
        for j in 1..=12 {
            let mut expected = modified_string_poly(&e.lambda, &e.eta, j, e.variant).unwrap();
            if e.variant == Variant::B && e.lambda.is_empty() && e.eta.is_empty() {
                expected = expected.sub(&stringforge_core::stringpoly::identities::monic_power(j - 1).coeff(-1));
            }
            assert_eq!(apply(&e.op, j), expected, "({}, {}, {}) J={j}", e.lambda, e.eta, e.variant);
        }
    }
}
