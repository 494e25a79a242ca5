//! Matern kernels: the exact mixture route, the lower bound and the
//! chi-squared route, across orders that straddle the regime boundaries.
//!
//! ```bash
//! cargo run --example matern_correlation
//! ```

use flowcorr::asymptotics::RegimeTag;
use flowcorr::correlation::{rho_matern, rho_matern_lower_bound, rho_sigma_chi2};
use flowcorr::kernels::IsotropicKernel;
use flowcorr::numerics::QuadratureSpec;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let spec = QuadratureSpec::default();
    let t = 3;
    println!("T = {t}: exact rho and lower bound by order and roughness");
    println!(
        "{:>5} {:>10} {:>8} {:>12} {:>12}",
        "nu", "regime", "r", "rho", "lower bound"
    );
    for nu in [0.2, 0.5, 1.0, 1.5, 3.0] {
        let regime = RegimeTag::classify(nu)?;
        for r in [1e-3, 0.5, 5.0] {
            let exact = rho_matern(nu, r, t, &spec)?;
            let lb = rho_matern_lower_bound(nu, r, t, &spec)?;
            println!(
                "{nu:>5} {:>10} {r:>8} {:>12.6} {:>12.6}",
                format!("{regime:?}"),
                exact.rho,
                lb.rho
            );
        }
    }

    // Rough orders do not reach 1/2 as r -> 0
    let limit = rho_matern(0.2, 1e-6, t, &spec)?.rho;
    println!("\nnu = 0.2, r = 1e-6: rho = {limit:.4}");

    // The chi-squared route integrates the kernel profile over trait distance
    let kernel = IsotropicKernel::matern(1.5, 2.0)?;
    let chi2 = rho_sigma_chi2(&kernel, 1.0, t, &spec)?;
    let mix = rho_matern(1.5, 0.5, t, &spec)?;
    println!(
        "nu = 1.5, sigma_x / l = 0.5: chi2 route {:.10}, mixture route {:.10}",
        chi2.rho, mix.rho
    );
    Ok(())
}
