//! Regenerates `data/alpha_lookup.txt`.
//!
//!     cargo run --release -p hhtalpha-core --example build_lookup -- data/alpha_lookup.txt

use hhtalpha::stable::build_lookup;

const GRID_STEP: f64 = 0.05;
const PER_POINT_N: usize = 500_000;
const TRIALS: usize = 64;
const SEED: u64 = 0x5EED_A1FA;
const VERSION: u32 = 1;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let out = std::env::args()
        .nth(1)
        .unwrap_or_else(|| "data/alpha_lookup.txt".to_string());
    let grid: Vec<f64> = (0..=30)
        .map(|i| 0.5 + GRID_STEP * i as f64)
        .map(|a| (a * 100.0_f64).round() / 100.0)
        .collect();
    let table = build_lookup(&grid, PER_POINT_N, TRIALS, SEED)?.with_note(format!(
        "version={VERSION} symmetric beta=0 grid_step={GRID_STEP} per_point_n={PER_POINT_N} trials={TRIALS} seed={SEED:#x}"
    ));
    table.save(&out)?;
    println!("wrote {} entries to {out}", table.entries().len());
    Ok(())
}
