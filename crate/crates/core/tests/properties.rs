use proptest::prelude::*;

use signflow::circuits::{is_flow_admissible, Method};
use signflow::error::TheoremError;
use signflow::flows::verify_int_flow;
use signflow::generators::{generate, Family, FamilySpec};
use signflow::graph::{Edge, Sign, SignedGraph, VertexId};
use signflow::oracle::{z2z2_nz_flow_search, SearchBudget};
use signflow::sgf::{parse_sgf, write_sgf};
use signflow::theorem8::eight_flow;

fn small_graph(max_n: usize, max_m: usize) -> impl Strategy<Value = SignedGraph> {
    (1..=max_n).prop_flat_map(move |n| {
        prop::collection::vec((0..n, 0..n, any::<bool>()), 0..=max_m).prop_map(move |es| {
            let edges = es.into_iter().enumerate().map(|(i, (a, b, neg))| {
                Edge::new(i, a, b, if neg { Sign::Negative } else { Sign::Positive })
            });
            SignedGraph::new(n, edges).unwrap()
        })
    })
}

fn switching_set(g: &SignedGraph, mask: u64) -> Vec<VertexId> {
    g.vertices().filter(|v| mask >> (v.0 % 64) & 1 == 1).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn admissibility_is_switching_invariant(g in small_graph(6, 9), mask in any::<u64>()) {
        let h = g.switch_set(&switching_set(&g, mask)).unwrap();
        prop_assert_eq!(
            is_flow_admissible(&g, Method::CrossCheck).unwrap(),
            is_flow_admissible(&h, Method::CrossCheck).unwrap()
        );
    }

    #[test]
    fn sgf_round_trips(g in small_graph(8, 14)) {
        let text = write_sgf(&g);
        let back = parse_sgf(&text).unwrap();
        prop_assert_eq!(&back, &g);
        prop_assert_eq!(write_sgf(&back), text);
    }

    #[test]
    fn eight_flow_output_verifies(g in small_graph(6, 10)) {
        match eight_flow(&g) {
            Ok((f, _)) => prop_assert!(verify_int_flow(&g, &f, 8, true).unwrap()),
            Err(TheoremError::NotFlowAdmissible) => {
                prop_assert!(!is_flow_admissible(&g, Method::CrossCheck).unwrap())
            }
            Err(TheoremError::NoFourFlow) => {
                prop_assert!(z2z2_nz_flow_search(&g, &SearchBudget::default()).unwrap().is_absent())
            }
            Err(e) => prop_assert!(false, "unexpected error {e}"),
        }
    }

    #[test]
    fn switched_eight_flow_verifies(g in small_graph(6, 10), mask in any::<u64>()) {
        let h = g.switch_set(&switching_set(&g, mask)).unwrap();
        prop_assert_eq!(eight_flow(&g).is_ok(), eight_flow(&h).is_ok());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn generators_are_deterministic(
        family in prop::sample::select(vec![Family::Cubic3ec, Family::Hamiltonian, Family::PlanarBridgeless]),
        half in 3usize..8,
        p in 0.0f64..=1.0,
        seed in any::<u64>(),
    ) {
        let spec = FamilySpec::new(family, 2 * half, p, seed);
        let g = generate(&spec).unwrap();
        prop_assert_eq!(&g, &generate(&spec).unwrap());
        prop_assert_eq!(g.vertex_count(), 2 * half);
        if family == Family::Cubic3ec {
            prop_assert!(g.is_cubic());
        }
    }
}
