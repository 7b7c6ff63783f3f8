use maxfilt::analysis::{sorted_gaussian_components, sorted_gaussian_draws};
use maxfilt::linalg::{dot, norm, sub};
use maxfilt::templates::{
    hermite_poly, hermite_template, normal_quantile, random_sphere_templates, sorted_gaussian_kernel_apply,
    HermiteSpec,
};
use statrs::distribution::{Beta, ChiSquared, ContinuousCDF};

fn hermite(n: usize, d: usize) -> Vec<f64> {
    hermite_template(HermiteSpec { degree: n, length: d }).unwrap().vector
}

#[test]
fn hermite_recurrence_low_degrees() {
    for x in [-2.5, -0.3, 0.0, 1.7] {
        assert_eq!(hermite_poly(0, x), 1.0);
        assert_eq!(hermite_poly(1, x), x);
        assert!((hermite_poly(2, x) - (x * x - 1.0)).abs() < 1e-12);
        assert!((hermite_poly(3, x) - (x * x * x - 3.0 * x)).abs() < 1e-12);
        assert!((hermite_poly(4, x) - (x.powi(4) - 6.0 * x * x + 3.0)).abs() < 1e-12);
    }
}

#[test]
fn templates_are_nearly_orthogonal_with_factorial_norms() {
    // (1/d) sum_i p_n(Q(p_i)) p_m(Q(p_i)) -> E[p_n(g) p_m(g)] = n! [n = m];
    // the grid truncates the tails, so higher degrees converge slowly
    let d = 20_000;
    let ts: Vec<Vec<f64>> = (0..=4).map(|n| hermite(n, d)).collect();
    let mut fact = 1.0;
    for n in 0..=4 {
        if n > 0 {
            fact *= n as f64;
        }
        let sq = dot(&ts[n], &ts[n]) / d as f64;
        assert!((sq / fact - 1.0).abs() < 0.15, "degree {n}: mean square {sq}, expected {fact}");
        for m in 0..n {
            let c = dot(&ts[n], &ts[m]) / (norm(&ts[n]) * norm(&ts[m]));
            assert!(c.abs() < 0.05, "degrees {n}, {m}: cosine {c}");
        }
    }
}

#[test]
fn kernel_operator_has_eigenvalues_one_over_n_plus_one() {
    let m = 2000;
    for n in 0..=5 {
        let f = hermite(n, m);
        let lf = sorted_gaussian_kernel_apply(&f);
        let target: Vec<f64> = f.iter().map(|v| v / (n + 1) as f64).collect();
        let res = norm(&sub(&lf, &target)) / norm(&f);
        assert!(res <= 0.02, "degree {n}: residual {res}");
    }
    // not an eigenvector: a bump is moved well away from its own span
    let bump: Vec<f64> = (0..m).map(|i| if (900..1100).contains(&i) { 1.0 } else { 0.0 }).collect();
    let lb = sorted_gaussian_kernel_apply(&bump);
    let c = dot(&lb, &bump) / (norm(&lb) * norm(&bump));
    assert!(c < 0.9);
}

#[test]
fn sorted_gaussian_means_follow_quantiles_away_from_the_edges() {
    let d = 1000;
    let draws = sorted_gaussian_draws(10_000, d, 21);
    let mut mean = vec![0.0; d];
    for v in &draws {
        for (m, x) in mean.iter_mut().zip(v) {
            *m += x / draws.len() as f64;
        }
    }
    let dev = |i: usize| (mean[i] - normal_quantile((i + 1) as f64 / (d + 1) as f64)).abs();
    let central = (d / 10..d - d / 10).map(dev).fold(0.0, f64::max);
    assert!(central <= 5.0 / d as f64, "central deviation {central}");
    // the extreme order statistics sit well beyond Q(1/(d+1))
    assert!(dev(0) > 0.05);
}

#[test]
fn leading_principal_components_are_hermite_shaped() {
    let d = 400;
    let pca = sorted_gaussian_components(4000, d, 4, 5).unwrap();
    for n in 0..4 {
        let h = hermite(n, d);
        let c = (dot(&pca.basis[n], &h) / norm(&h)).abs();
        assert!(c >= 0.95, "degree {n}: |cos| {c}");
    }
    // the variances decay like 1/(n + 1)
    for n in 0..4 {
        let ratio = pca.variances[n] / pca.variances[0];
        assert!((ratio - 1.0 / (n + 1) as f64).abs() < 0.05, "degree {n}: ratio {ratio}");
    }
}

#[test]
fn sphere_templates_look_rotation_invariant() {
    // <z, u> for uniform z on S^{d-1}: (1 + t) / 2 ~ Beta((d-1)/2, (d-1)/2)
    let d = 5;
    let n = 5000;
    let zs = random_sphere_templates(n, d, 17).unwrap();
    let beta = Beta::new((d as f64 - 1.0) / 2.0, (d as f64 - 1.0) / 2.0).unwrap();
    let s = std::f64::consts::FRAC_1_SQRT_2;
    for u in [vec![1.0, 0.0, 0.0, 0.0, 0.0], vec![0.0, s, -s, 0.0, 0.0]] {
        let bins = 10;
        let mut counts = vec![0usize; bins];
        for z in &zs {
            let p = beta.cdf((1.0 + dot(&z.vector, &u)) / 2.0);
            counts[((p * bins as f64) as usize).min(bins - 1)] += 1;
        }
        let e = n as f64 / bins as f64;
        let stat: f64 = counts.iter().map(|&c| (c as f64 - e).powi(2) / e).sum();
        let p = 1.0 - ChiSquared::new((bins - 1) as f64).unwrap().cdf(stat);
        assert!(p > 0.001, "chi-square p = {p}");
    }
}
