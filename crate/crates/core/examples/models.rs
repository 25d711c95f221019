//! Built-in R-diagonal models, the dominating model and the oracles.

use freehaag::cumulants::StarWord;
use freehaag::models::{
    b_model, chebyshev_moment_oracle, cumulant_growth_bound, dominating_model,
    free_group_moment_oracle, haar_unitary,
};
use freehaag::patterns::enumerate_no_intrablock_pairings;
use freehaag::{Limits, Rational};

fn main() -> freehaag::Result<()> {
    let limits = Limits::default();
    let haar = haar_unitary(12);
    println!("{}", haar.to_json());

    let b = b_model(&Rational::from_integer(1.into()), &Rational::from_integer(1.into()), 12)?;
    println!("b(1,1): alpha = {:?}", b.seq.alphas().iter().map(|a| a.to_string()).collect::<Vec<_>>());

    let dom = dominating_model(&haar)?;
    let growth = cumulant_growth_bound(&dom, 10)?;
    println!("dominating model {}: growth verdict {}", dom.name, growth.verdict);

    let w: StarWord = "1 2 1* 2* 2 1 2* 1*".parse()?;
    println!("free group oracle phi({w}) = {}", free_group_moment_oracle(&w));

    for (n, m) in [(1, 3), (2, 2), (2, 3), (3, 2)] {
        let t = enumerate_no_intrablock_pairings(n, m, &limits)?.count();
        println!("n={n} m={m}: |T| = {t}, chebyshev = {}", chebyshev_moment_oracle(n, m));
    }
    Ok(())
}
