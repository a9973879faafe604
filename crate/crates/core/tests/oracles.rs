mod common;

use common::{implication_transitive, sign_matrix_from_bits};
use frustration::analysis::{classify_reaction, Reaction, StateClass};
use frustration::hierarchy::{parity_survey, superposition_check, superposition_is_identity};
use frustration::relations::{is_transitive_triple, plaquette_phi, Plaquette, Sign};

#[test]
fn triangle_transitivity_matches_implication_oracle() {
    for bits in 0..8u64 {
        let sm = sign_matrix_from_bits(3, bits);
        let got = is_transitive_triple(&sm, Plaquette::new(0, 1, 2).unwrap()).unwrap();
        let want = implication_transitive(|a, b| sm.pair_sign(a, b).unwrap());
        assert_eq!(got, want, "assignment {bits:03b}");
    }
}

#[test]
fn faces_of_a_tetrahedron_multiply_to_plus() {
    let faces = [[0, 1, 2], [0, 1, 3], [0, 2, 3], [1, 2, 3]];
    for bits in 0..64u64 {
        let sm = sign_matrix_from_bits(4, bits);
        let product = Sign::product(faces.iter().map(|&[a, b, c]| plaquette_phi(&sm, Plaquette::new(a, b, c).unwrap()).unwrap()));
        assert_eq!(product, Sign::Plus, "assignment {bits:06b}");
        // the level-3 rule is the same statement, with any point as X0
        for x0 in 0..4 {
            let points: Vec<usize> = std::iter::once(x0).chain((0..4).filter(|&p| p != x0)).collect();
            assert!(superposition_check(&sm, &points, 3).unwrap().holds);
        }
    }
}

/// Direct count: every edge from X0 appears n-1 times on the left, every
/// other edge n-2 times, so the rule reduces to a parity condition.
fn superposition_by_edge_count(bits: u64, n: usize) -> bool {
    let edges = common::edges(n + 1);
    let mut lhs_neg = 0;
    let mut rhs_neg = 0;
    for (k, &(i, _)) in edges.iter().enumerate() {
        if bits >> k & 1 == 1 {
            let times = if i == 0 { n - 1 } else { n - 2 };
            lhs_neg += times;
            if i != 0 {
                rhs_neg += 1;
            }
        }
    }
    lhs_neg % 2 == rhs_neg % 2
}

#[test]
fn parity_survey_against_edge_counting() {
    for n in 2..=5 {
        let survey = parity_survey(n).unwrap();
        let total = 1usize << common::edges(n + 1).len();
        let holds = (0..total as u64).filter(|&b| superposition_by_edge_count(b, n)).count();
        assert_eq!(survey.assignments, total);
        assert_eq!(survey.holds, holds, "level {n}");
        assert_eq!(survey.holds == total, superposition_is_identity(n));
        assert_eq!(survey.counterexample.is_some(), n % 2 == 0);
    }
}

#[test]
fn level_two_is_the_plaquette_test() {
    for bits in 0..8u64 {
        let sm = sign_matrix_from_bits(3, bits);
        let holds = superposition_check(&sm, &[0, 1, 2], 2).unwrap().holds;
        assert_eq!(holds, is_transitive_triple(&sm, Plaquette::new(0, 1, 2).unwrap()).unwrap());
    }
}

#[test]
fn reaction_grid() {
    use StateClass::*;
    let expected = [
        (Transitive, Transitive, "Invariant", "No active"),
        (Frustrated, Frustrated, "Invariant", "No active"),
        (Zero, Zero, "Invariant", "No active"),
        (Frustrated, Transitive, "F->T", "Frustration's generator"),
        (Transitive, Frustrated, "T->F", "Transitivity's generator"),
        (Frustrated, Zero, "F->0", "Frustration's generator"),
        (Transitive, Zero, "T->0", "Transitivity's generator"),
        (Zero, Frustrated, "0->F", "Frustration's annihilator"),
        (Zero, Transitive, "0->T", "Transitivity's annihilator"),
    ];
    let mut seen = std::collections::BTreeSet::new();
    for (before, after, label, meaning) in expected {
        let r = classify_reaction(before, after);
        assert_eq!(r.label(), label);
        assert_eq!(r.interpretation(), meaning);
        assert_eq!(Reaction::ALL.iter().filter(|&&x| x == r).count(), 1);
        seen.insert(r);
    }
    assert_eq!(seen.len(), 7);
}
