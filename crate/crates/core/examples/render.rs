//! SVG pictures: a cutting sequence on the unit square and a chain of circles.
//!
//!     cargo run --example render -- /tmp

use std::path::PathBuf;

use halo::io::{chain_from_radii, circle_chain_svg, cutting_sequence_svg};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| ".".into()));
    let cut = cutting_sequence_svg(std::f64::consts::SQRT_2, 0.5, 40)?;
    std::fs::write(dir.join("cutting.svg"), cut)?;
    let radii: Vec<f64> = (0..12).map(|i| 0.8f64.powi(i)).collect();
    std::fs::write(dir.join("chain.svg"), circle_chain_svg(&chain_from_radii(&radii))?)?;
    println!("wrote cutting.svg and chain.svg to {}", dir.display());
    Ok(())
}
