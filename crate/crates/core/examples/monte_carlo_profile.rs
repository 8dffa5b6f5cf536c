//! Closed-form illumination profile next to a seeded ray-traced histogram.

use tdm3d::montecarlo::traced_profile;
use tdm3d::optics::{illumination_profile, select_columns, uniform_grid};
use tdm3d::{DisplayGeometry, Eye, Side};

fn main() -> tdm3d::Result<()> {
    let g = DisplayGeometry::prototype_27in();
    let eye = Eye::new(-0.0315, 1.0, Side::Left, 0);
    let mask = select_columns(&g, &eye)?;
    let xs = uniform_grid(-0.1, 0.1, 2e-3);
    let exact = illumination_profile(&g, &mask, 1.0, &xs)?;
    let traced = traced_profile(&g, &mask, 1.0, &xs, 200_000, 7)?;
    println!("x_m,closed_form,traced");
    for i in (0..xs.len()).step_by(5) {
        println!("{:+.3},{:.4},{:.4}", xs[i], exact.values()[i], traced.values()[i]);
    }
    eprintln!("energy on the line: {:.4} closed form, {:.4} traced", exact.total(), traced.total());
    Ok(())
}
