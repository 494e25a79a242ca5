//! Base kernels, the antisymmetric flow kernel and real-order Bessel K.
//!
//! ```bash
//! cargo run --example kernels_and_bessel
//! ```

use flowcorr::kernels::{flow_kernel, IsotropicKernel, ProductKernel};
use flowcorr::numerics::{bessel_k, ln_bessel_k};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    println!("Matern h(d) for several orders, l = 1");
    println!(
        "{:>6} {:>10} {:>10} {:>10} {:>10}",
        "d", "nu=0.5", "nu=1.5", "nu=2.5", "SE"
    );
    let kernels = [
        IsotropicKernel::matern(0.5, 1.0)?,
        IsotropicKernel::matern(1.5, 1.0)?,
        IsotropicKernel::matern(2.5, 1.0)?,
        IsotropicKernel::squared_exponential(1.0)?,
    ];
    for d in [0.0, 0.1, 0.5, 1.0, 2.0, 4.0] {
        let h: Vec<String> = kernels
            .iter()
            .map(|k| k.eval_h(d).map(|v| format!("{v:>10.6}")))
            .collect::<Result<_, _>>()?;
        println!("{d:>6.1} {}", h.join(" "));
    }

    // k_f((x, y), (v, w)) flips sign when either pair is reversed
    let k = ProductKernel::isotropic(IsotropicKernel::squared_exponential(1.0)?);
    let (x, y, w) = ([0.0, 0.0], [1.0, 0.5], [-0.5, 0.2]);
    let shared = flow_kernel(&k, &x, &y, &x, &w)?;
    let reversed = flow_kernel(&k, &y, &x, &x, &w)?;
    println!("\nflow kernel on edges sharing x: {shared:.6}, with (x, y) reversed: {reversed:.6}");

    println!("\nK_nu(x) across the small and large argument branches");
    for (nu, x) in [(0.2, 1e-3), (1.0 / 3.0, 1.9), (1.0 / 3.0, 2.1), (7.5, 30.0)] {
        println!("K_{nu:.4}({x}) = {:.12e}", bessel_k(nu, x)?);
    }
    println!(
        "ln K_2(2000) = {:.6} (the value itself underflows)",
        ln_bessel_k(2.0, 2000.0)?
    );
    Ok(())
}
