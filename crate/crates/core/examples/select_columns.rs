//! LED columns that steer light to each eye of a tracked viewer.
//!
//! `cargo run --example select_columns -- 0.05 1.2` puts the viewer's centre
//! at x = 5 cm, 1.2 m from the screen.

use tdm3d::optics::{forbidden_columns, select_columns};
use tdm3d::geometry::DEFAULT_IPD;
use tdm3d::{DisplayGeometry, Viewer};

fn main() -> tdm3d::Result<()> {
    let mut args = std::env::args().skip(1).map(|a| a.parse::<f64>().expect("numeric argument"));
    let x = args.next().unwrap_or(0.0);
    let z = args.next().unwrap_or(1.0);
    let g = DisplayGeometry::prototype_27in();
    let viewer = Viewer::centered(0, x, z, DEFAULT_IPD);
    for eye in viewer.eyes() {
        let mask = select_columns(&g, &eye)?;
        let lit: Vec<String> = mask.lit_columns().map(|c| c.to_string()).collect();
        println!("{:5} eye at {:+.4} m: {} [{}]", eye.side, eye.x, mask.to_hex(), lit.join(" "));
    }
    let keep_dark = forbidden_columns(&g, &[viewer.right], g.led_pitch)?;
    println!("dark while serving the left eye: {} columns", keep_dark.count_lit());
    Ok(())
}
