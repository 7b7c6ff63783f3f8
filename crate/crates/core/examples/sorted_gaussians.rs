//! Sorted Gaussian vectors: their covariance acts like an integral operator
//! whose eigenvectors are Hermite templates with eigenvalues 1/(n + 1).

use maxfilt::analysis::sorted_gaussian_components;
use maxfilt::linalg::{dot, norm};
use maxfilt::templates::{hermite_template, sorted_gaussian_kernel_apply, HermiteSpec};

fn main() -> maxfilt::Result<()> {
    let m = 1000;
    for n in 0..5 {
        let h = hermite_template(HermiteSpec { degree: n, length: m })?.vector;
        let kh = sorted_gaussian_kernel_apply(&h);
        println!("degree {n}: <Kh, h> / <h, h> = {:.4} (expected {:.4})", dot(&kh, &h) / dot(&h, &h), 1.0 / (n + 1) as f64);
    }
    let d = 200;
    let pca = sorted_gaussian_components(2000, d, 4, 1)?;
    for (n, b) in pca.basis.iter().enumerate() {
        let h = hermite_template(HermiteSpec { degree: n, length: d })?.vector;
        println!(
            "component {n}: |cos| with Hermite template {:.3}, variance ratio {:.3}",
            (dot(b, &h) / (norm(b) * norm(&h))).abs(),
            pca.variances[n] / pca.variances[0]
        );
    }
    Ok(())
}
