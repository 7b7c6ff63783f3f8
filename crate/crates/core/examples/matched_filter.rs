//! Cyclic max filtering as a matched filter: locate a pulse hidden at an
//! unknown offset in noise with one FFT correlation.

use maxfilt::groups::cyclic::mf_cyclic;
use maxfilt::rng;
use maxfilt::Witness;

fn main() -> maxfilt::Result<()> {
    let n = 1024;
    let pulse: Vec<f64> = (0..n).map(|i| if i < 16 { (i as f64 * 0.4).sin() } else { 0.0 }).collect();
    let offset = 700;
    let mut r = rng::seeded(9);
    let signal: Vec<f64> = (0..n)
        .map(|i| 3.0 * pulse[(i + n - offset) % n] + 0.3 * rng::gaussian(&mut r))
        .collect();
    let res = mf_cyclic(&pulse, &signal, true)?;
    // the witness shifts the signal back onto the template
    for w in &res.witnesses {
        if let Witness::Shift(s) = w {
            println!("score {:.3}, recovered offset {} (true {offset})", res.value, (n - s) % n);
        }
    }
    Ok(())
}
