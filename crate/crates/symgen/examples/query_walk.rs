//! The lazy-exposure model. Nothing about the random pair exists until
//! a walk asks for an image: known images replay verbatim (forced),
//! unknown ones are drawn uniformly from what bijectivity still allows
//! (free), and a draw landing on territory some partial map already
//! touches is flagged as a coincidence. Finalizing fills in the rest,
//! and the finished pair is exactly uniform.

use symgen::query::{ChoiceKind, Exposure};
use symgen::words::UnimodalWord;

fn main() -> symgen::Result<()> {
    let n = 12;
    let word = UnimodalWord::parse("xy", "yx")?;
    let mut exposure = Exposure::new(n, 42)?;

    println!("walking {} over {n} points", word);
    for start in [0usize, 1, 2] {
        let log = exposure.walk_trajectory(word.reduced(), start)?;
        println!("  from {}:", start + 1);
        for step in &log.steps {
            let kind = match step.result.kind {
                ChoiceKind::Free => "free",
                ChoiceKind::Forced => "forced",
            };
            let flag = if step.result.coincidence { ", coincidence" } else { "" };
            println!(
                "    {} sends {:>2} to {:>2}  ({kind}{flag})",
                step.letter.to_char(),
                step.from + 1,
                step.result.value + 1
            );
        }
        let closed = if log.end() == start { "returned to its start" } else { "stayed away" };
        println!("    trajectory {closed}: {} -> {}", start + 1, log.end() + 1);
    }

    println!(
        "exposed so far: {} of {n} images of x, {} of {n} images of y, {} queries",
        exposure.x_partial().known_pairs(),
        exposure.y_partial().known_pairs(),
        exposure.queries()
    );
    let (x, y) = exposure.finalize();
    println!("finalized x = {x}");
    println!("finalized y = {y}");
    Ok(())
}
