//! Prints the empirical constants of the calibration suite.
//!
//! Usage: `cargo run --release --example calibrate -- [n_modes] [seeds]`

use chi_mhd::verification::calibration::calibrate;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let n: usize = args.next().map(|s| s.parse()).transpose()?.unwrap_or(32);
    let seeds: u64 = args.next().map(|s| s.parse()).transpose()?.unwrap_or(100);
    let frozen = calibrate(n, 0..seeds)?;
    for (name, value) in frozen.entries() {
        println!("{name} = {value:e}");
    }
    Ok(())
}
