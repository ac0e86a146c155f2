//! Writes a synthetic labeled track CSV.
//!
//! `cargo run -p trackmix-core --example gen_surrogate -- <rows> <seed> <out.csv>`

use trackmix_core::{data::save_dataset, synthetic::surrogate_dataset};

fn main() {
    let mut args = std::env::args().skip(1);
    let rows: usize = args.next().and_then(|s| s.parse().ok()).unwrap_or(500);
    let seed: u64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(0);
    let out = args.next().unwrap_or_else(|| "surrogate.csv".to_string());
    let ds = surrogate_dataset(rows, seed);
    if let Err(e) = save_dataset(&ds, &out) {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
    let (liked, disliked) = ds.class_counts();
    println!("wrote {out}: {rows} rows ({liked} liked, {disliked} disliked)");
}
