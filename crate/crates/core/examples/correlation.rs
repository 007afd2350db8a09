//! Pearson correlation with its t-distribution p-value, checked against a
//! brute-force permutation count.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::StandardNormal;

use conndist::inference::{pearson_correlation, pearson_r};
use conndist::seed;

fn main() -> conndist::Result<()> {
    let mut rng = seed::rng(21);
    let x: Vec<f64> = (0..20).map(|_| rng.sample(StandardNormal)).collect();
    let y: Vec<f64> = x.iter().map(|v| 0.5 * v + rng.sample::<f64, _>(StandardNormal)).collect();

    let c = pearson_correlation(&x, &y)?;
    println!("r = {:.4}, p = {:.4} {}, n = {}", c.r, c.p, c.stars, c.n);

    let draws = 50_000;
    let mut shuffled = y.clone();
    let mut extreme = 0;
    for _ in 0..draws {
        shuffled.shuffle(&mut rng);
        if pearson_r(&x, &shuffled)?.abs() >= c.r.abs() {
            extreme += 1;
        }
    }
    println!("permutation p over {draws} shuffles = {:.4}", extreme as f64 / draws as f64);
    Ok(())
}
