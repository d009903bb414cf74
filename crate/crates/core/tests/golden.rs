use dqs::algorithms::{
    deterministic_search_circuit, grover_circuit, odd_prefix_search_circuit, SearchSpec,
};
use dqs::circuit::dump::{parse_dump, to_dump};
use dqs::circuit::CouplingMap;
use dqs::statevector::StateVector;
use dqs::transpiler::{default_layout, lower_circuit, route, DecompositionStrategy};

const SEARCH_N4: &str = include_str!("data/search_n4_x13.dump");
const SEARCH_N2_LOWERED: &str = include_str!("data/search_n2_x1_lowered.dump");
const GROVER_N3_GRID: &str = include_str!("data/grover_n3_x5_grid.dump");
const ODD_PREFIX_N5: &str = include_str!("data/odd_prefix_n5_x19_k3.dump");

fn strip_comments(text: &str) -> String {
    text.lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| format!("{l}\n"))
        .collect()
}

#[test]
fn search_dump_matches_builder() {
    let built = deterministic_search_circuit(&SearchSpec::new(4, 13).unwrap()).unwrap();
    assert_eq!(to_dump(&built), SEARCH_N4);
    let parsed = parse_dump(SEARCH_N4).unwrap();
    assert_eq!(parsed, built);
    let out = parsed.simulate(&StateVector::uniform(4).unwrap()).unwrap();
    assert!((out.probability(13).unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn lowered_dump_matches_builder() {
    let built = deterministic_search_circuit(&SearchSpec::new(2, 1).unwrap()).unwrap();
    let lowered = lower_circuit(&built, DecompositionStrategy::AncillaChain).unwrap();
    assert_eq!(to_dump(&lowered), SEARCH_N2_LOWERED);
    assert_eq!(
        parse_dump(SEARCH_N2_LOWERED).unwrap().two_qubit_count(),
        Ok(2)
    );
}

#[test]
fn routed_dump_matches_router() {
    let lowered = lower_circuit(
        &grover_circuit(3, 5, 1).unwrap(),
        DecompositionStrategy::AncillaChain,
    )
    .unwrap();
    let map = CouplingMap::grid_for(lowered.width()).unwrap();
    let routed = route(&lowered, &map, &default_layout(&map)).unwrap();
    assert_eq!(to_dump(&routed.circuit), strip_comments(GROVER_N3_GRID));
    assert!(GROVER_N3_GRID.contains(&format!("# swaps {}\n", routed.swap_count)));
    let parsed = parse_dump(GROVER_N3_GRID).unwrap();
    for g in parsed.gates() {
        let q = g.qubits();
        if q.len() == 2 {
            assert!(map.is_adjacent(q[0], q[1]), "{g}");
        }
    }
}

#[test]
fn odd_prefix_dump_matches_builder() {
    let built = odd_prefix_search_circuit(5, 19, 3).unwrap();
    assert_eq!(to_dump(&built), ODD_PREFIX_N5);
    assert_eq!(parse_dump(ODD_PREFIX_N5).unwrap(), built);
}
