//! Moments from R-diagonal cumulants and back.

use freehaag::cumulants::{
    cumulants_from_moments, kappa_block, mixed_moment, moment_from_cumulants, SequenceMoments,
    StarWord,
};
use freehaag::models;
use freehaag::patterns::PatternWord;
use freehaag::{Limits, Partition};

fn main() -> freehaag::Result<()> {
    let limits = Limits::default();
    let circ = models::circular(16);
    let haar = models::haar_unitary(16);

    for (n, m) in [(1, 4), (2, 3), (3, 2), (4, 2)] {
        let c = moment_from_cumulants(&circ.seq, n, m, &limits)?;
        let h = moment_from_cumulants(&haar.seq, n, m, &limits)?;
        println!("n={n} m={m}: circular {c}, haar {h}");
    }

    // invert the moment-cumulant formula on one block
    let flags = PatternWord::new(1, 3)?.star_flags();
    let moments = SequenceMoments {
        seq: &haar.seq,
        limits,
    };
    let top = Partition::top(flags.len());
    let k = cumulants_from_moments(&moments, &flags, &top, &limits)?;
    println!("kappa_6(u,u*,...) recovered = {k}, stored = {}", kappa_block(&haar.seq, &flags)?);

    let family = vec![haar.seq.clone(); 2];
    for w in ["1 2 1* 2*", "1 1* 2 2*", "1 2 2* 1*"] {
        let word: StarWord = w.parse()?;
        println!("phi({word}) = {}", mixed_moment(&family, &word, &limits)?);
    }
    Ok(())
}
