//! One Matern sample path per order, viewed at nested zoom levels.
//!
//! ```bash
//! cargo run --example matern_paths
//! ```

use flowcorr::montecarlo::{sample_matern_zoom, ZoomSpec};
use flowcorr::numerics::RngStream;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let zoom = ZoomSpec::new(0.0, 9.0, 200, 3);
    // The same stream for every order, so the paths share their normal draws
    let stream = RngStream::new(11, 0);
    for nu in [0.7, 1.0, 1.3] {
        let levels = sample_matern_zoom(nu, 1.0, &zoom, stream)?;
        for (k, level) in levels.iter().enumerate() {
            let incr: Vec<f64> = level
                .values
                .windows(2)
                .map(|w| (w[1] - w[0]).abs())
                .collect();
            let mean_incr = incr.iter().sum::<f64>() / incr.len() as f64;
            println!(
                "nu {nu}, zoom {k}: x in [{:.3}, {:.3}], mean |increment| {mean_incr:.4}",
                level.grid[0],
                level.grid[level.grid.len() - 1]
            );
        }
    }
    Ok(())
}
