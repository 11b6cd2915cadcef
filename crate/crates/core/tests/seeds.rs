mod common;

use common::{arb_quiver, arb_quiver_and_sequence};
use num_bigint::BigInt;
use proptest::prelude::*;
use quiverkit_core::laurent::LaurentPoly;
use quiverkit_core::seed::*;
use quiverkit_core::{Error, Framing, VertexColor};

fn arb_poly(rank: usize) -> impl Strategy<Value = LaurentPoly> {
    proptest::collection::vec((proptest::collection::vec(-2i32..=2, 2 * rank), -3i64..=3), 1..6).prop_map(
        move |terms| LaurentPoly::from_terms(rank, terms.into_iter().map(|(e, c)| (e, BigInt::from(c)))).unwrap(),
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn exact_division_inverts_multiplication(a in arb_poly(2), b in arb_poly(2)) {
        prop_assume!(!b.is_zero());
        let prod = a.mul(&b).unwrap();
        prop_assert_eq!(prod.div_exact(&b).unwrap(), a.clone());
        // Adding a term outside the product's support breaks divisibility
        // whenever b is not a unit monomial.
        if b.len() > 1 {
            let shifted = prod.add(&LaurentPoly::monomial(2, vec![9, 0, 0, 0], BigInt::from(1)));
            prop_assert!(matches!(shifted.div_exact(&b), Err(Error::InexactDivision(_))));
        }
    }

    #[test]
    fn c_vectors_agree_with_framed_quiver((q, s) in arb_quiver_and_sequence(4, 2, 8)) {
        let mut coeffs = seed_initial(&q).unwrap().coeffs;
        let mut cur = q.clone();
        let mut framed = q.frame(Framing::Framed).unwrap();
        for k in s {
            coeffs = mutate_coefficients(&coeffs, &cur, k).unwrap();
            cur = cur.mutate(k).unwrap();
            framed = framed.mutate(k).unwrap();
            let c = c_matrix(&coeffs).unwrap();
            prop_assert_eq!(&c, &frozen_pattern_i64(&framed).unwrap());
            for j in 1..=q.n_mutable() {
                let green = framed.vertex_status(j).unwrap() == VertexColor::Green;
                let coherent = c.iter().all(|row| (green && row[j - 1] >= 0) || (!green && row[j - 1] <= 0));
                prop_assert!(coherent);
            }
        }
    }

    #[test]
    fn seed_mutation_is_an_involution((q, s) in arb_quiver_and_sequence(3, 1, 4), k in 1usize..=3) {
        let k = (k - 1) % q.n_mutable() + 1;
        let seed = seed_apply(&seed_initial(&q).unwrap(), &s).unwrap();
        prop_assert_eq!(seed_mutate(&seed_mutate(&seed, k).unwrap(), k).unwrap(), seed);
    }

    #[test]
    fn cluster_variables_stay_positive((q, s) in arb_quiver_and_sequence(3, 1, 6)) {
        let mut seed = seed_initial(&q).unwrap();
        for k in s {
            seed = seed_mutate(&seed, k).unwrap();
            prop_assert!(laurent_positivity_check(&seed));
            prop_assert_eq!(c_vectors(&seed).unwrap(), c_matrix(&seed.coeffs).unwrap());
        }
    }

    #[test]
    fn initial_c_matrix_is_identity(q in arb_quiver(1, 6, 2)) {
        let c = c_vectors(&seed_initial(&q).unwrap()).unwrap();
        for (r, row) in c.iter().enumerate() {
            for (j, &x) in row.iter().enumerate() {
                prop_assert_eq!(x, i64::from(r == j));
            }
        }
    }
}
