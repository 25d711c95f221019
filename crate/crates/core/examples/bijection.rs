//! Non-crossing ∗-pairings of the pattern word and their multichains.

use freehaag::bijection::{connectedness, phi_map, q_map};
use freehaag::patterns::{enumerate_star_pairings, PatternWord};
use freehaag::Limits;

fn main() -> freehaag::Result<()> {
    let limits = Limits::default();
    let word = PatternWord::new(2, 2)?;
    println!("pattern word (n=2, m=2): {word}");

    for pi in enumerate_star_pairings(2, 2, &limits)? {
        let chain = phi_map(&pi)?;
        let back = q_map(&chain)?;
        println!("{pi}  ->  {chain}  ->  {}", back.partition());
        assert_eq!(back, pi);
        for j in 1..=2 {
            let groups = connectedness(&pi, j, 1, false)?;
            println!("  Con(pi, {j}, 1) = {groups:?}");
        }
    }

    let count = enumerate_star_pairings(3, 4, &limits)?.count();
    println!("|NC2*(3,4)| = {count}");
    Ok(())
}
