//! Median canonical-labelling time for sampled squares at several orders.
//!
//! cargo run --release --example scaling -- 32 64 128

use std::time::Instant;

use latin_canon::canonical_labelling;
use latin_canon::sampler::JmChain;

fn main() {
    let orders: Vec<usize> = std::env::args().skip(1).map(|a| a.parse().expect("order")).collect();
    let orders = if orders.is_empty() { vec![16, 32, 64] } else { orders };
    println!("order samples median_ms max_depth leaves_mean");
    for n in orders {
        let samples = 20;
        let mut times = Vec::new();
        let mut depth = 0;
        let mut leaves = 0;
        for l in JmChain::new(n, 1).expect("order >= 2").take(samples) {
            let t = Instant::now();
            let res = canonical_labelling(&l);
            times.push(t.elapsed().as_secs_f64() * 1e3);
            depth = depth.max(res.stats.max_leaf_depth);
            leaves += res.stats.leaves;
        }
        times.sort_by(f64::total_cmp);
        println!("{n} {samples} {:.3} {depth} {:.1}", times[samples / 2], leaves as f64 / samples as f64);
    }
}
