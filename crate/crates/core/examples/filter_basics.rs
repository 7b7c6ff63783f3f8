//! Max filtering under a few groups: value, witnesses, the quotient
//! distance, and a cross-check against brute-force enumeration.

use maxfilt::{brute_force_max_filter, max_filter, quotient_distance, GroupAction};

fn main() -> maxfilt::Result<()> {
    let cases: [(&str, Vec<f64>, Vec<f64>); 4] = [
        ("cyclic:4", vec![1.0, 0.0, 0.0, 0.0], vec![0.0, 0.0, 5.0, 0.0]),
        ("perm:3", vec![1.0, 1.0, 0.0], vec![2.0, -1.0, 3.0]),
        ("signedperm:3", vec![3.0, 1.0, 0.0], vec![0.5, -4.0, 2.0]),
        ("orth:2", vec![1.0, 0.0], vec![3.0, 4.0]),
    ];
    for (spec, z, x) in cases {
        let g: GroupAction = spec.parse()?;
        let r = max_filter(&g, &z, &x)?;
        let oracle = brute_force_max_filter(&g, &z, &x)?;
        println!(
            "{spec:>13}: <<[z],[x]>> = {:.6} (oracle {:.6}), witness {:?}",
            r.value, oracle.value, r.witnesses[0]
        );
        println!("{:>13}  d([z],[x]) = {:.6}", "", quotient_distance(&g, &z, &x)?);
    }
    Ok(())
}
