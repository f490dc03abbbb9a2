use std::time::Instant;

use fairdel_core::graph::Graph;
use fairdel_core::reductions::{reduce_eq3col_to_fair_vertex, reverse_spot_check, SearchLimits};

fn main() {
    let mut e = Vec::new();
    for u in 0..4 {
        for v in (u + 1)..4 {
            e.push((u, v));
        }
    }
    let k4 = Graph::new(4, &e).unwrap();
    let inst = reduce_eq3col_to_fair_vertex(&k4);
    println!("instance: n={} m={}", inst.graph.vertex_count(), inst.graph.edge_count());
    let t0 = Instant::now();
    let (witness, stats) = reverse_spot_check(&inst, &SearchLimits::default()).unwrap();
    println!(
        "witness: {:?}  nodes={} evals={}  elapsed={:?}",
        witness.map(|w| w.len()),
        stats.nodes,
        stats.evals,
        t0.elapsed()
    );
}
