//! Compares the sampled mean of H with the exact mean over every Latin square
//! of a small order.
//!
//! cargo run --release --example uniformity -- 5 200000

use latin_canon::oracle::all_latin_squares;
use latin_canon::sampler::h_statistics;
use latin_canon::hamiltonian_count;

fn main() {
    let mut args = std::env::args().skip(1).map(|a| a.parse::<u64>().expect("integer"));
    let n = args.next().unwrap_or(5) as usize;
    let samples = args.next().unwrap_or(100_000);
    let all = all_latin_squares(n).expect("order up to 5");
    let exact = all.iter().map(|l| hamiltonian_count(l) as f64).sum::<f64>() / all.len() as f64;
    let sampled = h_statistics(n, samples, 1).expect("order >= 2");
    println!("order={n} squares={} exact_mean={exact:.5} sampled_mean={:.5} samples={samples}", all.len(), sampled.mean);
}
