//! Main-lemma and strong Haagerup checks on a seeded tensor corpus.

use freehaag::cumulants::ParticleTensor;
use freehaag::haagerup::{haagerup_constant, verify_main_lemma_with, verify_strong_haagerup_with, MomentEngine};
use freehaag::models;
use freehaag::Limits;

fn main() -> freehaag::Result<()> {
    let limits = Limits::default();
    let corpus = ParticleTensor::corpus(2024, 8, 3)?;
    for model in [models::circular(12), models::haar_unitary(12)] {
        let engine = MomentEngine::new(&model, limits);
        let c = haagerup_constant(&model)?;
        println!("{}: C_a = {:.4} ({:?})", model.name, c.value_float, c.regime);
        for t in &corpus {
            let main = verify_main_lemma_with(&engine, t, 3)?;
            let strong = verify_strong_haagerup_with(&engine, t, 3)?;
            let last = strong.rows.last().expect("m_max >= 1");
            println!(
                "  n={} support={}: main lemma {}, strong {} (slack {:.3})",
                t.n(),
                t.support_size(),
                main.verdict,
                strong.verdict,
                last.slack_float
            );
        }
    }
    print!("{}", verify_main_lemma_with(&MomentEngine::new(&models::circular(12), limits), &corpus[0], 3)?.to_csv()?);
    Ok(())
}
