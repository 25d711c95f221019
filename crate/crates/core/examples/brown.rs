//! Brown-measure ratios `‖zⁿ‖_∞/‖zⁿ‖₂` for radial densities.

use freehaag::spectral::{brown_ratio, sqrt_n_fit, RadialDensity};

fn main() -> freehaag::Result<()> {
    let disc = RadialDensity::uniform_disc(1.0)?;
    for n in [1, 4, 9, 16] {
        println!("disc n={n}: {:.6} (sqrt(n+1) = {:.6})", brown_ratio(&disc, n)?, f64::from(n + 1).sqrt());
    }
    let ring = RadialDensity::annulus(0.5, 1.0)?;
    let fit = sqrt_n_fit(&ring, 5, 40)?;
    println!(
        "annulus [0.5,1]: ratio/sqrt(n) in [{:.4}, {:.4}], spread {:.3}",
        fit.c_min_float, fit.c_max_float, fit.spread_float
    );
    let samples: Vec<(f64, f64)> = (0..=50).map(|i| {
        let r = f64::from(i) / 50.0;
        (r, (1.0 + r) / (3.0 * std::f64::consts::PI))
    }).collect();
    let custom = RadialDensity::from_samples(samples)?;
    println!("tabulated density, n=10: {:.6}", brown_ratio(&custom, 10)?);
    Ok(())
}
