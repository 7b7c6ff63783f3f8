//! Matrices modulo column relabeling (point clouds, via optimal assignment)
//! and modulo left rotation (shapes, via the nuclear norm of z x^T).

use maxfilt::groups::orthogonal::mf_left_orthogonal;
use maxfilt::groups::{mf_column_permutation, MatrixSignal};
use maxfilt::{quotient_distance, rng, GroupAction};

fn main() -> maxfilt::Result<()> {
    let (k, n) = (2, 6);
    let mut r = rng::seeded(4);
    let cloud = rng::gaussian_vec(&mut r, k * n);
    let template = rng::gaussian_vec(&mut r, k * n);
    // the same cloud with its points listed in another order
    let order = [3, 0, 5, 1, 4, 2];
    let relabeled: Vec<f64> = (0..k * n).map(|idx| cloud[idx / n * n + order[idx % n]]).collect();

    let z = MatrixSignal::new(k, n, template.clone())?;
    let a = mf_column_permutation(&z, &MatrixSignal::new(k, n, cloud.clone())?)?;
    let b = mf_column_permutation(&z, &MatrixSignal::new(k, n, relabeled.clone())?)?;
    println!("column permutation: {:.6} vs relabeled {:.6}", a.value, b.value);
    let g = GroupAction::ColumnPermutation { k, n };
    println!("quotient distance to relabeled copy {:.2e}", quotient_distance(&g, &cloud, &relabeled)?);

    // rotate every point by 40 degrees
    let (s, c) = 0.7f64.sin_cos();
    let rot = [[c, -s], [s, c]];
    let rotated: Vec<f64> = (0..k * n).map(|idx| {
        let (i, j) = (idx / n, idx % n);
        (0..k).map(|l| rot[i][l] * cloud[l * n + j]).sum()
    }).collect();
    let a = mf_left_orthogonal(&z, &MatrixSignal::new(k, n, cloud.clone())?)?;
    let b = mf_left_orthogonal(&z, &MatrixSignal::new(k, n, rotated.clone())?)?;
    println!("left orthogonal:    {:.6} vs rotated   {:.6}", a.value, b.value);
    Ok(())
}
