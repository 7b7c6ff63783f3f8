//! How much the cyclic max filter moves when a signal is slightly warped.

use maxfilt::analysis::{band_limited_signal, diffeo_stability_experiment, gaussian_bump, stability_sweep, WarpSpec};
use maxfilt::linalg::{norm, scale};

fn main() -> maxfilt::Result<()> {
    let grid = 256;
    let h = gaussian_bump(grid, 4.0);
    let h = scale(&h, 1.0 / norm(&h));
    let f = band_limited_signal(grid, 6, 4);

    // a pure translation leaves the filter unchanged
    let t = diffeo_stability_experiment(&h, &f, &WarpSpec::translation(17.0))?;
    println!("translation by 17 cells: gap {:.2e}", t.filter_gap);

    let jac = [0.01, 0.05, 0.1, 0.2, 0.4];
    for r in stability_sweep(&h, &f, &jac, 3, 5)? {
        println!("max |tau'| = {:.2}: gap {:.4}, gap / (|f| |tau'|) = {:.4}", r.distortion_size, r.filter_gap, r.ratio);
    }
    Ok(())
}
