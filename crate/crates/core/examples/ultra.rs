//! The Ornstein-Uhlenbeck kernel bound on a log grid.

use freehaag::spectral::{kernel_profile, semigroup_level_bound, verify_ultracontractivity, LevelDecomposition, TGrid};

fn main() -> freehaag::Result<()> {
    let grid: TGrid = "log:1e-8:20:400".parse()?;
    let r = verify_ultracontractivity(1.5, &grid)?;
    println!("sup t/(2 sinh t) = {:.9} at t = {:.2e}; verdict {}", r.sup_profile_float, r.argsup_float, r.verdict);
    for t in [0.01, 0.1, 1.0, 5.0] {
        println!("  t={t}: profile {:.6}", kernel_profile(t));
    }

    let h = LevelDecomposition::new(vec![(1, 1.0), (2, 0.5), (3, 0.25), (6, 0.1)])?;
    for t in [0.05, 0.5, 2.0] {
        let b = semigroup_level_bound(&h, t, 1.5)?;
        println!("  t={t}: level sum {:.4} <= {:.4}: {}", b.level_sum_float, b.closed_form_float, b.holds);
    }
    Ok(())
}
