//! Smoothness and roughness limits and two-point Pade approximants against
//! quadrature.
//!
//! ```bash
//! cargo run --example asymptotics_and_pade
//! ```

use flowcorr::asymptotics::{
    limit_matern, limit_se_isotropic, pade, LimitBranch, PadeConvention, PadeModel,
    RoughCoefficient,
};
use flowcorr::correlation::{rho_matern, rho_se_isotropic};
use flowcorr::numerics::QuadratureSpec;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let t = 3;
    println!("squared exponential, T = {t}");
    println!("{:>8} {:>12} {:>12} {:>12}", "r", "exact", "limit", "pade");
    for r in [1e-3, 1e-2, 1.0, 1e2, 1e3] {
        let branch = if r < 1.0 {
            LimitBranch::Smooth
        } else {
            LimitBranch::Rough
        };
        let limit =
            limit_se_isotropic(r, t, branch).map_or("-".to_string(), |v| format!("{v:.6e}"));
        let p = pade(&PadeModel::SquaredExponential, r, t)?;
        println!(
            "{r:>8} {:>12.6e} {limit:>12} {p:>12.6e}",
            rho_se_isotropic(r, t)?.rho
        );
    }

    let spec = QuadratureSpec::default();
    for nu in [2.5, 3.5] {
        let model = PadeModel::Matern {
            nu,
            coefficient: PadeConvention::Matched,
        };
        let worst = (0..=60)
            .map(|i| 10f64.powf(-4.0 + 0.1 * i as f64))
            .map(|r| Ok((pade(&model, r, t)? - rho_matern(nu, r, t, &spec)?.rho).abs()))
            .collect::<Result<Vec<f64>, Box<dyn std::error::Error>>>()?
            .into_iter()
            .fold(0.0, f64::max);
        let rough = limit_matern(1e3, nu, t, LimitBranch::Rough, RoughCoefficient::Exact)?;
        println!("Matern nu = {nu}: max |pade - quadrature| on [1e-4, 1e2] = {worst:.3}, rough limit at r = 1e3 = {rough:.4e}");
    }
    Ok(())
}
