//! Canonical labelling of elementary abelian 2-group tables, the slowest
//! known inputs for the search.
//!
//! cargo run --release --example worst_case -- 3 4

use std::time::Instant;

use latin_canon::{canonical_labelling, LatinSquare};

fn main() {
    let ks: Vec<u32> = std::env::args().skip(1).map(|a| a.parse().expect("exponent")).collect();
    let ks = if ks.is_empty() { vec![2, 3, 4] } else { ks };
    println!("order seconds leaves branch_nodes max_depth");
    for k in ks {
        let l = LatinSquare::elementary_abelian(k);
        let t = Instant::now();
        let res = canonical_labelling(&l);
        let s = &res.stats;
        println!("{} {:.3} {} {} {}", l.order(), t.elapsed().as_secs_f64(), s.leaves, s.branch_nodes, s.max_leaf_depth);
    }
}
