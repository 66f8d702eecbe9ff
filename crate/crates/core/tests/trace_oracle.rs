//! The search engine and the classifier against brute-force enumeration.

mod common;

use std::collections::BTreeSet;

use trace_forge::decide::table_specs;
use trace_forge::families::{bowtie, complete, connected_graphs_between, cycle, path, star};
use trace_forge::search::enumerate_traces_with;
use trace_forge::{
    classify_trace, enumerate_traces, find_trace, validate_double_trace, Direction, DirectionReq,
    Execution, Graph, SearchOutcome, TraceKind, TraceSpec,
};

fn small_graphs(max_edges: usize) -> Vec<Graph> {
    connected_graphs_between(2, 5)
        .into_iter()
        .filter(|g| g.edge_count() <= max_edges)
        .collect()
}

fn naive_satisfies(g: &Graph, seq: &[u32], spec: &TraceSpec) -> bool {
    let direction_ok = match spec.direction {
        DirectionReq::Any => true,
        DirectionReq::Parallel => common::all_parallel(seq) == Some(true),
        DirectionReq::Antiparallel => common::all_parallel(seq) == Some(false),
    };
    let kind_ok = match spec.kind {
        TraceKind::Double => true,
        TraceKind::Stable(d) => g.min_degree() > d && common::stability_order(g, seq) >= d,
        TraceKind::Strong => common::is_strong(g, seq),
    };
    direction_ok && kind_ok
}

#[test]
fn classification_matches_definitions() {
    for g in small_graphs(6) {
        for seq in common::all_double_traces(&g) {
            let w = validate_double_trace(&g, &seq).unwrap();
            let class = classify_trace(&w);
            assert_eq!(
                class.stability_order,
                common::stability_order(&g, &seq),
                "{seq:?}"
            );
            assert_eq!(class.strong, common::is_strong(&g, &seq), "{seq:?}");
            let expected = match common::all_parallel(&seq) {
                Some(true) => Direction::Parallel,
                Some(false) => Direction::Antiparallel,
                None => Direction::Mixed,
            };
            assert_eq!(class.direction, expected, "{seq:?}");
        }
    }
}

#[test]
fn existence_matches_enumeration() {
    for g in small_graphs(7) {
        let all = common::all_double_traces(&g);
        assert!(
            !all.is_empty(),
            "every connected graph with an edge has a double trace"
        );
        for spec in table_specs(&[1, 2, 3]).unwrap() {
            let expected = all.iter().any(|seq| naive_satisfies(&g, seq, &spec));
            let found = find_trace(&g, &spec, None).unwrap();
            match &found {
                SearchOutcome::Found(w) => assert!(classify_trace(w).satisfies(&spec)),
                SearchOutcome::NotFound => {}
                SearchOutcome::BudgetExhausted => panic!("unbudgeted search gave up"),
            }
            assert_eq!(found.trace().is_some(), expected, "{spec} on {g:?}");
        }
    }
}

#[test]
fn enumeration_is_complete() {
    for g in small_graphs(5) {
        let all = common::all_double_traces(&g);
        for spec in table_specs(&[1]).unwrap() {
            let expected: BTreeSet<Vec<u32>> = all
                .iter()
                .filter(|seq| naive_satisfies(&g, seq, &spec))
                .cloned()
                .collect();
            for exec in [Execution::Sequential, Execution::Parallel] {
                let got: BTreeSet<Vec<u32>> = enumerate_traces_with(&g, &spec, usize::MAX, exec)
                    .unwrap()
                    .into_iter()
                    .map(|w| w.sequence().to_vec())
                    .collect();
                assert_eq!(got, expected, "{spec} on {g:?}");
            }
        }
    }
}

#[test]
fn enumeration_cap_and_order() {
    let g = complete(4);
    let spec = TraceSpec::new(TraceKind::Double, DirectionReq::Any).unwrap();
    let all = enumerate_traces(&g, &spec, usize::MAX).unwrap();
    assert_eq!(all.len(), common::all_double_traces(&g).len());
    let seqs: Vec<&[u32]> = all.iter().map(|w| w.sequence()).collect();
    assert!(seqs.windows(2).all(|p| p[0] < p[1]));
    let capped = enumerate_traces(&g, &spec, 5).unwrap();
    assert_eq!(capped.len(), 5);
}

#[test]
fn parallel_and_sequential_search_agree() {
    for g in [complete(5), bowtie(), cycle(6), star(4), path(5)] {
        for spec in table_specs(&[1, 2]).unwrap() {
            let run = |exec| {
                trace_forge::search::find_trace_with(
                    &g,
                    &spec,
                    trace_forge::SearchOptions {
                        budget: None,
                        execution: exec,
                    },
                )
                .unwrap()
            };
            assert_eq!(
                run(Execution::Sequential),
                run(Execution::Parallel),
                "{spec}"
            );
        }
    }
}
