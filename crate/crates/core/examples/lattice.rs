//! Walks NC(n): Catalan counts, the Möbius function and multichains.

use freehaag::partitions::{
    catalan, enumerate_multichains, enumerate_nc, fuss_catalan, mobius, Partition,
};
use freehaag::Limits;

fn main() -> freehaag::Result<()> {
    let limits = Limits::default();
    for n in 1..=8 {
        let count = enumerate_nc(n, &limits)?.count();
        println!("|NC({n})| = {count}  (Catalan {})", catalan(n as u64));
    }

    let bottom = Partition::bottom(4);
    for pi in enumerate_nc(4, &limits)?.filter(|p| p.num_blocks() <= 2) {
        println!("mu({bottom}, {pi}) = {}", mobius(&bottom, &pi)?);
    }

    for chain in enumerate_multichains(2, 3, &limits)?.take(4) {
        println!("{chain}");
    }
    for (n, m) in [(2, 3), (3, 3), (2, 4)] {
        let count = enumerate_multichains(n, m, &limits)?.count();
        println!("multichains n={n} m={m}: {count} = C^({n})_{m} = {}", fuss_catalan(n as u64, m as u64));
    }
    Ok(())
}
