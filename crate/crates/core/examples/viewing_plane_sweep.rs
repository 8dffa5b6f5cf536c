//! Walks a test eye across the viewing plane of the bundled scenario and
//! lists the view bands it passes through.

use tdm3d::scenario::Scenario;
use tdm3d::viewsim::sweep_viewing_plane;

fn main() -> tdm3d::Result<()> {
    let sc = Scenario::bundled();
    let plan = sc.schedule_plan()?;
    let frames = sc.panel_frames()?;
    let report = sweep_viewing_plane(&sc.geometry, &plan.schedule, &frames, &sc.sweep)?;
    for b in &report.bands {
        println!(
            "{:>6}  {:+.3} .. {:+.3} m  ({:.0} mm)",
            b.class.as_str(),
            b.x_start,
            b.x_end,
            b.width(report.step) * 1e3
        );
    }
    Ok(())
}
