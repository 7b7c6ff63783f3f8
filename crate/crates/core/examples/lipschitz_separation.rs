//! Empirical Lipschitz bounds and orbit separation for a random filter bank.

use maxfilt::analysis::{estimate_lipschitz, separation_test, unit_bank, SamplerSpec, SeparationPairs};
use maxfilt::GroupAction;

fn main() -> maxfilt::Result<()> {
    for spec in ["cyclic:6", "perm:5", "signflips:4"] {
        let g: GroupAction = spec.parse()?;
        let bank = unit_bank(4 * g.dim(), g.dim(), 1);
        let sampler = SamplerSpec { samples: 5000, ..SamplerSpec::default() };
        let lip = estimate_lipschitz(&g, &bank, &sampler, 2)?;
        let sep = separation_test(&g, &bank, &SeparationPairs::Random { trials: 5000, sampler }, 3)?;
        println!(
            "{spec:>11}: ratios in [{:.3}, {:.3}] (ceiling {:.3}), {} of {} pairs unseparated, min gap {:.2e}",
            lip.lower_est, lip.upper_est, lip.theory_upper, sep.violations, sep.checked, sep.min_gap
        );
    }
    Ok(())
}
