//! Expected transitive and cyclic sizes of random flows on random graphs,
//! predicted from rho and checked by sampling.
//!
//! ```bash
//! cargo run --release --example trait_performance
//! ```

use flowcorr::graphflow::{generate_graph, validate_trait_performance, GraphModel};
use flowcorr::kernels::IsotropicKernel;
use flowcorr::montecarlo::{TraitDistribution, TraitModel};
use flowcorr::numerics::RngStream;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let g = generate_graph(
        &GraphModel::ErdosRenyi {
            vertices: 15,
            p: 0.5,
        },
        &mut RngStream::new(1, 0).rng(),
    )?
    .graph;
    println!(
        "ER(15, 0.5): V = {}, E = {}, cycle rank {}",
        g.vertex_count(),
        g.edge_count(),
        g.cycle_rank()
    );
    println!(
        "{:>6} {:>8} {:>26} {:>26}",
        "l", "rho", "|F_t|^2 mean +- se / pred", "|F_c|^2 mean +- se / pred"
    );
    let traits = TraitModel::new(TraitDistribution::Gaussian { sigma_x: 1.0 });
    for (k, l) in [0.1, 1.0, 10.0].into_iter().enumerate() {
        let kernel = IsotropicKernel::squared_exponential(l)?;
        let rep = validate_trait_performance(
            &g,
            &kernel,
            &traits,
            2,
            1000,
            RngStream::new(42, k as u64),
        )?;
        println!(
            "{l:>6} {:>8.4} {:>9.4} +- {:<6.4} / {:<7.4} {:>9.4} +- {:<6.4} / {:<7.4}",
            rep.rho,
            rep.mean_transitive,
            rep.stderr_transitive,
            rep.predicted_transitive,
            rep.mean_cyclic,
            rep.stderr_cyclic,
            rep.predicted_cyclic
        );
    }
    Ok(())
}
