//! Transitive and cyclic parts of edge flows on small graphs.
//!
//! ```bash
//! cargo run --example hodge_decomposition
//! ```

use flowcorr::graphflow::{
    generate_graph, hhd_decompose, parse_edge_list, signed_edge_adjacency, EdgeFlow, GraphModel,
};
use flowcorr::numerics::RngStream;
use rand::Rng;
use rand_distr::StandardNormal;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // A ranking 0 > 1 > 2 plus one unit of circulation around the triangle
    let list = parse_edge_list("0 1 2\n1 2 2\n0 2 2\n")?;
    let f = list.flow.expect("flows given");
    let h = hhd_decompose(&list.graph, &f)?;
    println!("triangle potential {:.4?}", h.potential);
    println!(
        "transitive {:.4?}, cyclic {:.4?}",
        h.transitive.values, h.cyclic.values
    );

    let mut rng = RngStream::new(7, 0).rng();
    let g = generate_graph(
        &GraphModel::ErdosRenyi {
            vertices: 12,
            p: 0.4,
        },
        &mut rng,
    )?
    .graph;
    let f = EdgeFlow::new(
        (0..g.edge_count())
            .map(|_| rng.sample(StandardNormal))
            .collect(),
    );
    let h = hhd_decompose(&g, &f)?;
    println!(
        "\nER(12, 0.4): V = {}, E = {}, cycle rank {}",
        g.vertex_count(),
        g.edge_count(),
        g.cycle_rank()
    );
    println!(
        "|F|^2 = {:.4} = |F_t|^2 {:.4} + |F_c|^2 {:.4}; <F_t, F_c> = {:.1e}",
        f.norm2(),
        h.transitive_norm2,
        h.cyclic_norm2,
        h.transitive.dot(&h.cyclic)
    );
    let div = h
        .cyclic
        .divergence(&g)
        .iter()
        .fold(0.0f64, |m, d| m.max(d.abs()));
    println!("largest vertex divergence of F_c: {div:.1e}");
    let a = signed_edge_adjacency(&g);
    println!(
        "signed edge adjacency has {} nonzero pairs",
        a.entries().len()
    );
    Ok(())
}
