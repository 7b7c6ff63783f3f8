//! Directional derivatives and subgradients of the max filter in the
//! template, where it is convex.

use maxfilt::calculus::{directional_derivative, subdifferential, subgradient, witness_set, Selection};
use maxfilt::linalg::dot;
use maxfilt::{max_filter, GroupAction};

fn main() -> maxfilt::Result<()> {
    let g: GroupAction = "cyclic:4".parse()?;
    // x is fixed by a half turn, so two shifts attain the maximum
    let x = [1.0, 0.0, 1.0, 0.0];
    let y = [2.0, 1.0, 0.0, 0.0];
    println!("value {}, maximizers {:?}", max_filter(&g, &x, &y)?.value, witness_set(&g, &x, &y, None)?);
    for gen in subdifferential(&g, &x, &y)?.generators {
        println!("  subdifferential generator {gen:?}");
    }
    let s = subgradient(&g, &x, &y, Selection::First)?;
    for v in [[1.0, 0.0, 0.0, 0.0], [0.0, 1.0, 0.0, 0.0], [0.0, -1.0, 0.0, 0.0]] {
        let dd = directional_derivative(&g, &x, &y, &v)?;
        let xt: Vec<f64> = x.iter().zip(&v).map(|(a, b)| a + 1e-6 * b).collect();
        let fd = (max_filter(&g, &xt, &y)?.value - max_filter(&g, &x, &y)?.value) / 1e-6;
        println!("v = {v:?}: derivative {dd:.4}, finite difference {fd:.4}, <s, v> = {:.4}", dot(&s, &v));
    }
    Ok(())
}
