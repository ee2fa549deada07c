//! How the bootstrap rate changes a sample: size, fraction of distinct
//! training rows, and the largest multiplicity of a single row.
//!
//! cargo run --release --example bootstrap_rate_uniqueness

use brforest::forest::bootstrap_sample;
use brforest::rng;

fn main() -> brforest::Result<()> {
    let n = 10_000;
    println!("{:>5} {:>8} {:>10} {:>10} {:>8}", "BR", "size", "unique", "1-e^-BR", "max mult");
    for (i, br) in [0.2, 0.5, 1.0, 1.2, 2.0, 3.0, 5.0, 10.0].into_iter().enumerate() {
        let mut r = rng::stream(7, &[i as u64]);
        let sample = bootstrap_sample(n, br, &mut r)?;
        let mut mult = vec![0u32; n];
        sample.iter().for_each(|&j| mult[j] += 1);
        let unique = mult.iter().filter(|&&m| m > 0).count() as f64 / n as f64;
        println!(
            "{br:>5} {:>8} {unique:>10.4} {:>10.4} {:>8}",
            sample.len(),
            1.0 - (-br).exp(),
            mult.iter().max().unwrap()
        );
    }
    Ok(())
}
