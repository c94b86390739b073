use std::time::Instant;
use unitals_core::canon::{automorphism_chain, automorphism_group, CanonConfig};
use unitals_core::geometry::{build_pg2, hermitian_unital};
use unitals_core::graph::{incidence_graph, GraphColoring};

fn main() {
    let s = build_pg2(16).unwrap();

    let t = Instant::now();
    let u = hermitian_unital(4).unwrap();
    let gm = incidence_graph(&s, Some(&u), GraphColoring::PointBlock).unwrap();
    let aut = automorphism_group(&gm).unwrap();
    println!(
        "hermitian stabilizer: order={} gens={} nodes={} in {:?}",
        aut.order, aut.generators.len(), aut.nodes, t.elapsed()
    );

    let t = Instant::now();
    let g2 = incidence_graph(&s, None, GraphColoring::PointBlock).unwrap();
    let aut2 = automorphism_group(&g2).unwrap();
    println!("point-block PG(2,16): order={} nodes={} in {:?}", aut2.order, aut2.nodes, t.elapsed());

    // Small-case oracle equivalence: PG(2,4) Hermitian 9-set stabilizer via
    // the chain oracle vs the marked-graph group.
    let t = Instant::now();
    let s4 = build_pg2(4).unwrap();
    let u4 = hermitian_unital(2).unwrap();
    let g4 = incidence_graph(&s4, None, GraphColoring::SelfDual).unwrap();
    let chain = automorphism_chain(&g4, &CanonConfig::default()).unwrap();
    println!("pg2_4 chain order={}", chain.order());
    let set = unitals_core::incidence::PointSet::new(u4.as_slice().to_vec(), 42).unwrap();
    let oracle = chain.setwise_stabilizer_order(&set).unwrap();
    let gm4 = incidence_graph(&s4, Some(&u4), GraphColoring::PointBlock).unwrap();
    let canon4 = automorphism_group(&gm4).unwrap();
    println!(
        "pg2_4 hermitian: oracle={} canon={} in {:?}",
        oracle, canon4.order, t.elapsed()
    );
}
