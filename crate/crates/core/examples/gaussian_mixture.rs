//! Telling two stationary Gaussian processes apart with one shift-invariant
//! template and a threshold.

use maxfilt::rng;
use maxfilt::templates::{circulant_from_taps, gmm_classifier, sample_circulant, MixtureClass};

fn main() -> maxfilt::Result<()> {
    let n = 256;
    let a_taps = [1.0, 0.5];
    let b_taps = [6.0, 4.8, 2.4, 1.2];
    let clf = gmm_classifier(&circulant_from_taps(&a_taps, n)?, &circulant_from_taps(&b_taps, n)?, 3.0)?;
    println!(
        "Thompson distance {:.2}, bandwidth {}, threshold {:.3} in [{:.3}, {:.3}]",
        clf.thompson, clf.bandwidth, clf.threshold, clf.theta1, clf.theta2
    );
    let draws = 2000;
    for (taps, class) in [(&a_taps[..], MixtureClass::A), (&b_taps[..], MixtureClass::B)] {
        let mut r = rng::seeded(class as u64 + 7);
        let hits = (0..draws).filter(|_| clf.predict(&sample_circulant(taps, n, &mut r)).ok() == Some(class)).count();
        println!("class {class:?}: {hits} of {draws} correct");
    }
    Ok(())
}
