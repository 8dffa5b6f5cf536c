//! What each eye sees over one frame when the left field shows white and the
//! right field black.

use tdm3d::interleave::{replicate, ViewImage};
use tdm3d::optics::select_columns;
use tdm3d::schedule::{build_schedule, Mode};
use tdm3d::viewsim::{render_perceived, PanelFrame};
use tdm3d::{DisplayGeometry, Side, Viewer};

fn main() -> tdm3d::Result<()> {
    let g = DisplayGeometry::prototype_27in();
    let v = Viewer::centered(0, 0.02, 1.0, 0.063);
    let masks = [select_columns(&g, &v.left)?, select_columns(&g, &v.right)?];
    let s = build_schedule(Mode::PerEye, &masks, g.panel_field_rate, 0.25)?;
    let w = g.subpixel_columns() / 2;
    let frames = [
        PanelFrame::uniform(replicate(&ViewImage::filled(w, 1, 1.0)?), Side::Left),
        PanelFrame::uniform(replicate(&ViewImage::filled(w, 1, 0.0)?), Side::Right),
    ];
    for eye in v.eyes() {
        let img = render_perceived(&g, &s, &frames, &eye)?;
        let lit = img.values.iter().filter(|&&x| x > 1e-3 * img.values.iter().cloned().fold(0.0, f64::max)).count();
        println!("{:5} eye: energy {:.4e}, {lit} of {} columns visibly lit", eye.side, img.total(), img.width);
    }
    Ok(())
}
