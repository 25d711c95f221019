//! `‖u₁+…+u_k‖₂ₘ` for free Haar unitaries against `2√(k−1)`.

use freehaag::haagerup::sharpness_haar;
use freehaag::models::haar_unitary;
use freehaag::Limits;

fn main() -> freehaag::Result<()> {
    let haar = haar_unitary(12);
    for k in 2..=5 {
        let r = sharpness_haar(&haar, k, 3, &Limits::default())?;
        let norms: Vec<String> = r.rows.iter().map(|row| format!("{:.4}", row.norm_float)).collect();
        println!(
            "k={k}: norms {} target {:.4}, ratio {:.4} > sqrt(e): {}",
            norms.join(" "),
            r.target_float,
            r.ratio_target_float,
            r.ratio_exceeds_sqrt_e
        );
    }
    Ok(())
}
