//! Two viewers served in alternate fields. Each viewer's field keeps the
//! columns aimed at the other viewer dark; lighting them anyway shows how
//! much light would leak.

use std::path::Path;

use tdm3d::scenario::Scenario;
use tdm3d::schedule::build_schedule;
use tdm3d::viewsim::phase_energies;

const SCENARIO: &str = include_str!("../scenarios/two_viewers.scenario");

fn main() -> tdm3d::Result<()> {
    let sc = Scenario::parse(SCENARIO, Path::new("."))?;
    let g = &sc.geometry;
    let plan = sc.schedule_plan()?;
    let frames = sc.panel_frames()?;
    println!("violations: {}", plan.schedule.validate(&plan.forbidden).len());

    let lit_anyway: Vec<_> = plan
        .schedule
        .illuminate_phases()
        .zip(&plan.forbidden)
        .map(|((_, p), (_, f))| p.mask.union(f))
        .collect();
    let dirty = build_schedule(plan.schedule.mode(), &lit_anyway, g.panel_field_rate, sc.schedule.refresh_fraction)?;

    for (view, v) in sc.viewers.iter().enumerate() {
        for eye in v.eyes() {
            let clean = phase_energies(g, &plan.schedule, &frames, &eye)?;
            let leaky = phase_energies(g, &dirty, &frames, &eye)?;
            let other = 1 - view;
            println!(
                "viewer {} {:5}: other field / own field = {:.1e} clean, {:.2} with forbidden columns lit",
                v.id,
                eye.side,
                clean[other] / clean[view],
                leaky[other] / leaky[view]
            );
        }
    }
    Ok(())
}
