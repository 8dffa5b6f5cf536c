//! Crosstalk when the whole LED array is split into two view zones, with 0,
//! 1 and 2 columns switched off around each zone boundary.

use tdm3d::scenario::{MaskPolicy, Scenario};
use tdm3d::viewsim::crosstalk_report;

fn main() -> tdm3d::Result<()> {
    let mut sc = Scenario::bundled();
    sc.schedule.masks = MaskPolicy::Zones;
    for guard in 0..=2 {
        sc.schedule.guard = guard;
        let plan = sc.schedule_plan()?;
        let lit: usize = plan.schedule.illuminate_phases().map(|(_, p)| p.mask.count_lit()).sum();
        let report = crosstalk_report(&sc.geometry, &plan.schedule, &sc.viewers)?;
        let xt: Vec<String> = report.iter().map(|e| format!("{} {:.2e}", e.side, e.crosstalk)).collect();
        println!("guard {guard}: {lit:2} columns lit, crosstalk {}", xt.join(", "));
    }
    Ok(())
}
