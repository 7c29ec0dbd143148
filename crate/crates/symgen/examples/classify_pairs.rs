//! What does a pair of permutations generate? Orbits decide
//! transitivity, block systems decide primitivity, a stabilizer chain
//! delivers the exact order, and together they pin one of five verdicts.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use symgen::analysis::{classify_with_order, primitivity, Primitivity};
use symgen::perm::Permutation;

fn main() -> symgen::Result<()> {
    let named = [
        ("(1 2)", "(1 2 3 4 5)", 5),
        ("(1 2 3 4)", "(1 3)", 4),
        ("(1 2)(3 4)", "(1 3)(2 4)", 4),
        ("(1 2 3)", "(3 4 5)", 5),
        ("(1 2 3 4 5)", "()", 5),
    ];
    for (a, b, n) in named {
        let x = Permutation::parse_with_degree(a, n)?;
        let y = Permutation::parse_with_degree(b, n)?;
        let c = classify_with_order(&x, &y)?;
        let order = c.order.as_ref().expect("order requested").to_string();
        println!("<{a}, {b}> at degree {n}: {} (order {order})", c.verdict);
        if c.transitive {
            if let Primitivity::Imprimitive(sys) = primitivity(n, &[x, y])? {
                println!("  blocks: {sys}");
            }
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..4 {
        let x = Permutation::uniform_random(30, &mut rng);
        let y = Permutation::uniform_random(30, &mut rng);
        let c = classify_with_order(&x, &y)?;
        println!(
            "random pair at degree 30: {} (order {})",
            c.verdict,
            c.order.as_ref().expect("order requested")
        );
    }
    Ok(())
}
