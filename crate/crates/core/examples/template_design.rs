//! Template constructions: bank-size parameters for random templates,
//! projective uniformity, Hermite templates and indicator-set templates.

use maxfilt::groups::cyclic::mf_cyclic;
use maxfilt::templates::{
    bilipschitz_parameters, hermite_template, indicator_templates, projective_uniformity_estimate,
    random_sphere_templates, HermiteSpec,
};

fn main() -> maxfilt::Result<()> {
    let (n_min, delta) = bilipschitz_parameters(2, 3)?;
    println!("group of order 2 on R^3: n >= {n_min} random templates, delta = {delta:.3e}");

    let bank: Vec<Vec<f64>> = random_sphere_templates(64, 3, 1)?.into_iter().map(|t| t.vector).collect();
    println!("projective uniformity of 64 random templates (k = 2): {:.4}", projective_uniformity_estimate(&bank, 2, 20_000, 2)?);

    for n in 0..4 {
        let t = hermite_template(HermiteSpec { degree: n, length: 7 })?;
        let v: Vec<String> = t.vector.iter().map(|x| format!("{x:+.3}")).collect();
        println!("hermite degree {n}: [{}]", v.join(" "));
    }

    let sets = vec![vec![0, 1, 2], vec![0, 2, 4], vec![31, 0, 3]];
    let ts = indicator_templates(&sets, 32)?;
    for (i, t) in ts.iter().enumerate() {
        let scores: Vec<f64> = sets
            .iter()
            .map(|s| {
                let mut x = vec![0.0; 32];
                s.iter().for_each(|&j| x[j] = 1.0);
                mf_cyclic(&t.vector, &x, false).map(|r| r.value)
            })
            .collect::<maxfilt::Result<_>>()?;
        println!("indicator template {i}: scores against the sets {scores:?}");
    }
    Ok(())
}
