//! Signals known only up to a global phase, and closed curves known only up
//! to rotation, reflection and choice of starting point.

use maxfilt::groups::complex::shift_conjugate_apply;
use maxfilt::groups::{mf_phase, mf_shift_conjugate, ComplexVector};
use maxfilt::rng;
use num_complex::Complex64;

fn random_complex(n: usize, seed: u64) -> ComplexVector {
    let mut r = rng::seeded(seed);
    ComplexVector::new((0..n).map(|_| Complex64::new(rng::gaussian(&mut r), rng::gaussian(&mut r))).collect())
}

fn main() -> maxfilt::Result<()> {
    let n = 8;
    let x = random_complex(n, 1);
    let z = random_complex(n, 2);
    let turned = ComplexVector::new(x.0.iter().map(|v| v * Complex64::from_polar(1.0, 2.1)).collect());
    println!("phase: |<z, x>| = {:.6}, after a global phase {:.6}", mf_phase(&z, &x)?.value, mf_phase(&z, &turned)?.value);

    let moved = shift_conjugate_apply(&x, 3, true, Complex64::from_polar(1.0, -0.4));
    let a = mf_shift_conjugate(&z, &x)?;
    let b = mf_shift_conjugate(&z, &moved)?;
    println!("shift and conjugate: {:.6} vs moved copy {:.6}", a.value, b.value);
    println!("witness {:?}", b.witnesses[0]);
    Ok(())
}
