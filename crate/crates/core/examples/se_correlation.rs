//! Closed forms for the squared exponential kernel with Gaussian traits.
//!
//! ```bash
//! cargo run --example se_correlation
//! ```

use flowcorr::correlation::{
    half_minus_rho_se, rho_se_anisotropic, rho_se_isotropic, rho_sigma_chi2,
};
use flowcorr::kernels::{roughness_coefficients, IsotropicKernel, RoughnessSpec};
use flowcorr::numerics::QuadratureSpec;
use nalgebra::DMatrix;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    println!("rho(r) for the isotropic model; rho falls from 1/2 to 0 as traits get rough");
    println!("{:>8} {:>12} {:>12} {:>12}", "r", "T=1", "T=2", "T=5");
    for r in [1e-3, 0.1, 0.3, 1.0, 3.0, 10.0] {
        let row: Vec<String> = [1, 2, 5]
            .iter()
            .map(|&t| rho_se_isotropic(r, t).map(|c| format!("{:>12.6e}", c.rho)))
            .collect::<Result<_, _>>()?;
        println!("{r:>8} {}", row.join(" "));
    }

    // 1/2 - rho is formed without cancellation, so tiny gaps keep their digits
    println!(
        "\n1/2 - rho at r = 1e-5, T = 3: {:.6e}",
        half_minus_rho_se(1e-5, 3)?
    );

    // The chi-squared quadrature route reproduces the closed form
    let kernel = IsotropicKernel::squared_exponential(1.0)?;
    let quad = rho_sigma_chi2(&kernel, 1.0, 3, &QuadratureSpec::default())?;
    let closed = rho_se_isotropic(1.0, 3)?;
    println!(
        "r = 1, T = 3: closed {:.12}, quadrature {:.12}, sigma2 {:.6}",
        closed.rho, quad.rho, closed.sigma2
    );

    // Correlated traits: roughness coefficients from the generalized eigenproblem
    let trait_cov = DMatrix::from_row_slice(2, 2, &[1.0, 0.6, 0.6, 0.5]);
    let kernel_cov = DMatrix::identity(2, 2) * 0.25;
    let r = roughness_coefficients(&RoughnessSpec::new(trait_cov, kernel_cov)?)?;
    let aniso = rho_se_anisotropic(&r)?;
    println!(
        "\nanisotropic traits: roughness {:.4?}, rho {:.6}",
        r, aniso.rho
    );
    Ok(())
}
