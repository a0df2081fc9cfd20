//! G_k(X) by direct scan.

use gapchain::maier::gk_direct;

fn main() -> gapchain::Result<()> {
    for x in [100, 10_000, 1_000_000] {
        let row: Vec<String> = (1..=4).map(|k| gk_direct(x, k).map(|g| g.to_string())).collect::<Result<_, _>>()?;
        println!("X = {x:>9}: G_1..G_4 = {}", row.join(", "));
    }
    Ok(())
}
