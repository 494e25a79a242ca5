//! Heavy-tailed traits and kernels as scale mixtures of the squared
//! exponential model.
//!
//! ```bash
//! cargo run --example scale_mixtures
//! ```

use flowcorr::correlation::{model_correlation, rho_mixture};
use flowcorr::kernels::{mixture_rep, IsotropicKernel, ScaleMixture};
use flowcorr::montecarlo::{TraitDistribution, TraitModel};
use flowcorr::numerics::{Density, QuadratureSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let spec = QuadratureSpec::default();
    let se = IsotropicKernel::squared_exponential(1.0)?;
    let laws = [
        ("gaussian", TraitDistribution::Gaussian { sigma_x: 1.0 }),
        ("laplace", TraitDistribution::Laplace { scale: 1.0 }),
        (
            "student t, df 3",
            TraitDistribution::StudentT {
                df: 3.0,
                scale: 1.0,
            },
        ),
    ];
    println!("squared exponential kernel, T = 2");
    for (name, law) in laws {
        let mixture = mixture_rep(&law, &se)?;
        let c = model_correlation(&se, &TraitModel::new(law), 2, &spec)?;
        println!(
            "{name:>16}: rho {:.6}, sigma2 {:.6}, roughness law {:?}",
            c.rho,
            c.sigma2,
            mixture.roughness_law()
        );
    }

    // Any positive law over r^2 gives a valid model
    for law in [
        Density::Gamma {
            shape: 2.0,
            rate: 2.0,
        },
        Density::InverseGamma {
            shape: 3.0,
            scale: 2.0,
        },
        Density::HalfCauchy { scale: 1.0 },
    ] {
        let c = rho_mixture(&ScaleMixture::over_roughness(law), 3, &spec)?;
        println!("T = 3, r^2 ~ {law:?}: rho {:.6}", c.rho);
    }
    Ok(())
}
