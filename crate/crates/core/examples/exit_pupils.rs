//! Where one LED column's light lands on the viewing plane: the primary exit
//! pupil, its conjugates through neighbouring lenses, and the sampled profile.

use tdm3d::optics::{conjugate_pupils, illumination_profile, uniform_grid};
use tdm3d::{DisplayGeometry, LedMask};

fn main() -> tdm3d::Result<()> {
    let g = DisplayGeometry::prototype_27in();
    let column = 40;
    let z = 1.0;
    let u = g.led_center(column);
    println!("column {column} at {:+.4} m, pupil period {:.1} mm", u, g.pupil_period(z) * 1e3);
    for p in conjugate_pupils(&g, u, z, 3)? {
        println!("  lens {:2}  pupil {:+.4} m  acceptance {:.4}", p.lens, p.pupil_x, p.acceptance);
    }

    let xs = uniform_grid(-0.4, 0.4, 5e-4);
    let profile = illumination_profile(&g, &LedMask::from_columns(96, [column]), z, &xs)?;
    let (i, peak) = profile.peak();
    println!("peak {peak:.3} /m at {:+.4} m, FWHM {:.1} mm", profile.xs()[i], profile.fwhm_at(i) * 1e3);
    Ok(())
}
