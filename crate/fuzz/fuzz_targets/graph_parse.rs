#![no_main]

use libfuzzer_sys::fuzz_target;
use stratalab::levelgraphs::{automorphism_order, parse_graph, validate, MAX_BRUTE_FORCE_VERTICES};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(graph) = parse_graph(text) else {
        return;
    };
    let _ = validate(&graph);
    assert_eq!(parse_graph(&graph.to_string()).as_ref(), Ok(&graph));
    if graph.vertices().len() <= MAX_BRUTE_FORCE_VERTICES.min(6) {
        let _ = automorphism_order(&graph);
    }
});
