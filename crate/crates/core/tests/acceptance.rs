//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any
//! criterion fails.

mod common;

use std::path::Path;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::ray_oracle::{acceptance_fraction, lenses_of, trace_bundle, Lens};
use tdm3d::interleave::{deinterleave, interleave, InterleavePattern, Rational, ViewImage};
use tdm3d::optics::{conjugate_pupils, image_point};
use tdm3d::run::{run, RunOptions, Subcommand};
use tdm3d::scenario::{MaskPolicy, Scenario};
use tdm3d::schedule::{build_schedule, Mode, Phase, Violation};
use tdm3d::viewsim::{crosstalk_report, phase_energies, sweep_viewing_plane, ViewClass};
use tdm3d::{DisplayGeometry, LedMask, Side, Viewer};

const TWO_VIEWERS: &str = include_str!("../scenarios/two_viewers.scenario");

struct Outcome {
    pass: bool,
    detail: String,
}

type Criterion = (&'static str, Duration, fn() -> Outcome);

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn rate_reproduction() -> Outcome {
    let masks = [LedMask::all_on(96), LedMask::all_on(96)];
    let s = build_schedule(Mode::PerEye, &masks, 240.0, 0.25).expect("schedule");
    let rate = s.effective_view_rate();
    let phases = s.phases().len();
    outcome(rate == 120.0 && phases == 4, format!("view rate {rate} Hz, {phases} phases per frame"))
}

fn band_structure() -> Outcome {
    let sc = Scenario::bundled();
    let plan = sc.schedule_plan().expect("plan");
    let frames = sc.panel_frames().expect("frames");
    let report = sweep_viewing_plane(&sc.geometry, &plan.schedule, &frames, &sc.sweep).expect("sweep");
    let central: Vec<_> = report.bands.iter().filter(|b| b.center().abs() <= 0.1).collect();
    let mut problems = Vec::new();
    for w in central.windows(2) {
        let gap_pair = (w[0].class == ViewClass::Gap) != (w[1].class == ViewClass::Gap);
        if !gap_pair {
            problems.push(format!("{} next to {}", w[0].class.as_str(), w[1].class.as_str()));
        }
    }
    if let Some(b) = central.iter().find(|b| b.class == ViewClass::Mixed) {
        problems.push(format!("mixed band at {:.3} m", b.center()));
    }
    let mut triples = 0;
    let mut worst = 0.0f64;
    for w in report.bands.windows(3) {
        let views = [w[0].class, w[2].class];
        if w[1].class != ViewClass::Gap || w[1].center().abs() > 0.1 {
            continue;
        }
        if !(views.contains(&ViewClass::LeftView) && views.contains(&ViewClass::RightView)) {
            problems.push(format!("gap at {:.3} m does not separate opposite views", w[1].center()));
            continue;
        }
        triples += 1;
        let widths: Vec<f64> = w.iter().map(|b| b.width(report.step)).collect();
        let mean = widths.iter().sum::<f64>() / 3.0;
        for width in &widths {
            worst = worst.max((width / mean - 1.0).abs());
        }
    }
    if triples == 0 {
        problems.push("no view/gap/view triple in the central region".into());
    }
    let pass = problems.is_empty() && worst <= 0.25;
    let seq: Vec<&str> = central.iter().map(|b| b.class.as_str()).collect();
    outcome(
        pass,
        format!("{triples} triples, worst width deviation {:.1}% [{}] {}", worst * 100.0, seq.join(" "), problems.join("; ")),
    )
}

fn random_mask(rng: &mut impl Rng, n: usize) -> LedMask {
    let p: f64 = rng.gen();
    LedMask::from_bits((0..n).map(|_| rng.gen_bool(p)).collect())
}

fn darkness_during_refresh() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (mut clean_failures, mut missed, mut injections) = (0, 0, 0usize);
    for _ in 0..1000 {
        let n = rng.gen_range(2..=128);
        let (mode, views) = if rng.gen_bool(0.5) { (Mode::PerEye, 2) } else { (Mode::PerViewer, rng.gen_range(1..=6)) };
        let masks: Vec<LedMask> = (0..views).map(|_| random_mask(&mut rng, n)).collect();
        let rate = rng.gen_range(30.0..480.0);
        let fraction = rng.gen_range(0.01..0.99);
        let s = build_schedule(mode, &masks, rate, fraction).expect("schedule");
        if !s.validate(&[]).is_empty() {
            clean_failures += 1;
        }
        for (i, phase) in s.phases().iter().enumerate() {
            if !phase.kind.is_refresh() {
                continue;
            }
            for column in 0..n {
                let mut phases: Vec<Phase> = s.phases().to_vec();
                phases[i].mask.set(column, true);
                let bad = tdm3d::schedule::FrameSchedule::from_parts(mode, views, phases, s.frame_period());
                injections += 1;
                if !bad.validate(&[]).contains(&Violation::BacklightDuringRefresh { phase: i }) {
                    missed += 1;
                }
            }
        }
    }
    outcome(
        clean_failures == 0 && missed == 0,
        format!("{clean_failures} clean schedules flagged, {missed}/{injections} injected bits missed"),
    )
}

fn with_viewers(base: &Scenario, a: f64, b: f64) -> Scenario {
    let mut sc = base.clone();
    sc.viewers = vec![Viewer::centered(0, a, 1.0, 0.063), Viewer::centered(1, b, 1.0, 0.063)];
    sc
}

fn region_x_inhibition() -> Outcome {
    let base = Scenario::parse(TWO_VIEWERS, Path::new(".")).expect("two-viewer scenario");
    let g = &base.geometry;
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let (mut worst_clean, mut least_dirty) = (0.0f64, f64::INFINITY);
    let mut failures = Vec::new();
    let cases = 200;
    for case in 0..cases {
        let a = rng.gen_range(-0.15..=0.15);
        let sep = rng.gen_range(0.115..=0.175);
        let b = if rng.gen_bool(0.5) { a + sep } else { a - sep };
        let sc = with_viewers(&base, a, b);
        let plan = sc.schedule_plan().expect("plan");
        let frames = sc.panel_frames().expect("frames");
        if !plan.schedule.validate(&plan.forbidden).is_empty() {
            failures.push(format!("case {case}: clean schedule has region-X violations"));
            continue;
        }
        let masks: Vec<LedMask> = plan.schedule.illuminate_phases().map(|(_, p)| p.mask.clone()).collect();
        for (view, viewer) in sc.viewers.iter().enumerate() {
            let other = 1 - view;
            let mut dirty_masks = masks.clone();
            dirty_masks[other] = dirty_masks[other].union(&plan.forbidden[other].1);
            let dirty = build_schedule(Mode::PerViewer, &dirty_masks, g.panel_field_rate, sc.schedule.refresh_fraction)
                .expect("dirty schedule");
            for eye in viewer.eyes() {
                let clean = phase_energies(g, &plan.schedule, &frames, &eye).expect("energies");
                let lit = phase_energies(g, &dirty, &frames, &eye).expect("energies");
                if clean[view].is_nan() || clean[view] <= 0.0 {
                    failures.push(format!("case {case}: viewer {view} {} eye unserved", eye.side));
                    continue;
                }
                let rc = clean[other] / clean[view];
                let rd = lit[other] / lit[view];
                worst_clean = worst_clean.max(rc);
                least_dirty = least_dirty.min(rd);
                if rc > 1e-3 {
                    failures.push(format!("case {case}: clean ratio {rc:e}"));
                }
                if rd.is_nan() || rd < 1e-2 || rd <= rc {
                    failures.push(format!("case {case}: forbidden-lit ratio {rd:e}"));
                }
            }
        }
    }
    failures.truncate(3);
    outcome(
        failures.is_empty(),
        format!(
            "{cases} viewer pairs, worst clean ratio {worst_clean:.2e}, least forbidden-lit ratio {least_dirty:.2e} {}",
            failures.join("; ")
        ),
    )
}

fn oracle_equivalence() -> Outcome {
    let g = DisplayGeometry::prototype_27in();
    let lenses = lenses_of(&g);
    let tol = f64::max(1e-6, 0.01 * g.led_pitch);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (mut worst, mut acc_fail, mut compared) = (0.0f64, 0, 0);
    let half_span = g.led_pitch * g.led_column_count as f64 / 2.0;
    for _ in 0..100 {
        let source = rng.gen_range(-half_span..half_span);
        let z = rng.gen_range(0.3..3.0);
        let k = rng.gen_range(0..g.lens_count);
        let lens = lenses[k];
        let analytic = image_point(&g, source, lens.center, z).expect("image point");
        let traced = trace_bundle(&mut rng, lens, source, g.led_lens_gap, z, 100_000).center();
        worst = worst.max((analytic - traced).abs());
        compared += 1;
        for p in conjugate_pupils(&g, source, z, 5).expect("pupils") {
            let l: Lens = lenses[p.lens];
            let traced = trace_bundle(&mut rng, l, source, g.led_lens_gap, z, 100_000).center();
            worst = worst.max((p.pupil_x - traced).abs());
            compared += 1;
            let (frac, _) = acceptance_fraction(&mut rng, l, source, g.led_lens_gap, 100_000);
            let sd = (p.acceptance * (1.0 - p.acceptance) / 1e5).sqrt();
            if (frac - p.acceptance).abs() > 5.0 * sd + 1e-12 {
                acc_fail += 1;
            }
        }
    }
    outcome(
        worst <= tol && acc_fail == 0,
        format!("{compared} pupils, worst offset {worst:.2e} m (tolerance {tol:.2e}), {acc_fail} acceptance outliers"),
    )
}

fn guard_monotonicity() -> Outcome {
    let base = Scenario::bundled();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut viewers = vec![base.viewers[0]];
    for i in 0..4 {
        viewers.push(Viewer::centered(i + 1, rng.gen_range(-0.05..0.05), 1.0, rng.gen_range(0.058..0.068)));
    }
    let mut failures = Vec::new();
    let mut default_series = String::new();
    for viewer in &viewers {
        let mut series: Vec<[f64; 2]> = Vec::new();
        for guard in 0..=2 {
            let mut sc = base.clone();
            sc.viewers = vec![*viewer];
            sc.schedule.masks = MaskPolicy::Zones;
            sc.schedule.guard = guard;
            let plan = sc.schedule_plan().expect("plan");
            let report = crosstalk_report(&sc.geometry, &plan.schedule, &sc.viewers).expect("crosstalk");
            let get = |side| report.iter().find(|e| e.side == side).unwrap().crosstalk;
            series.push([get(Side::Left), get(Side::Right)]);
        }
        for eye in 0..2 {
            if series.windows(2).any(|w| w[1][eye] > w[0][eye]) {
                failures.push(format!("viewer at {:.3} m eye {eye}: {:?}", 0.5 * (viewer.left.x + viewer.right.x), series));
            }
        }
        if default_series.is_empty() {
            default_series = series.iter().map(|s| format!("{:.1e}/{:.1e}", s[0], s[1])).collect::<Vec<_>>().join(" -> ");
        }
    }
    outcome(
        failures.is_empty(),
        format!("{} viewers, default L/R {default_series} {}", viewers.len(), failures.join("; ")),
    )
}

fn interleaver_round_trip() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (mut trip_fail, mut shift_fail) = (0, 0);
    for _ in 0..100 {
        let (w, h) = (rng.gen_range(1..48), rng.gen_range(1..24));
        let pattern = InterleavePattern {
            columns_per_lens: rng.gen_range(1..=4),
            slant: Rational::new(rng.gen_range(-3..=3), rng.gen_range(1..=4)).unwrap(),
            field_shift: rng.gen_range(-4..=4),
        };
        let mut image = || {
            let samples = (0..w * h).map(|_| rng.gen_range(0..=255) as f32 / 255.0).collect();
            ViewImage::new(w, h, samples).unwrap()
        };
        let (left, right) = (image(), image());
        for field in 0..2 {
            let frame = interleave(&left, &right, &pattern, field).unwrap();
            let (l, r) = deinterleave(&frame, &pattern, field).unwrap();
            // every panel pixel must carry its source pixel back to the same
            // place; source pixels no panel pixel sampled are not checked
            for row in 0..h {
                for col in 0..2 * w {
                    let (want, got) = match pattern.side_at(row, col, field) {
                        Side::Left => (left.get(row, col / 2), l.get(row, col / 2)),
                        Side::Right => (right.get(row, col / 2), r.get(row, col / 2)),
                    };
                    if want.to_bits() != got.to_bits() {
                        trip_fail += 1;
                    }
                }
            }
        }
        let ones = ViewImage::filled(w, h, 1.0).unwrap();
        let zeros = ViewImage::filled(w, h, 0.0).unwrap();
        let f0 = interleave(&ones, &zeros, &pattern, 0).unwrap();
        let f1 = interleave(&ones, &zeros, &pattern, 1).unwrap();
        // the field-1 assignment is field 0 moved right by field_shift columns
        for row in 0..h {
            for col in 0..2 * w {
                let from = col as i64 - pattern.field_shift;
                if (0..2 * w as i64).contains(&from) && f1.get(row, col) != f0.get(row, from as usize) {
                    shift_fail += 1;
                }
            }
        }
    }
    outcome(trip_fail == 0 && shift_fail == 0, format!("{trip_fail} round-trip mismatches, {shift_fail} shift-law mismatches"))
}

fn determinism() -> Outcome {
    let sc = Scenario::bundled();
    let dirs = [tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap()];
    let mut names = Vec::new();
    for dir in &dirs {
        let opts = RunOptions { out_dir: Some(dir.path().to_path_buf()), seed: Some(11) };
        let mut these = Vec::new();
        for cmd in Subcommand::ALL {
            let out = run(cmd, &sc, &opts).expect("run");
            these.extend(out.artifacts.iter().map(|p| p.file_name().unwrap().to_owned()));
        }
        names.push(these);
    }
    let mut differing = Vec::new();
    for name in &names[0] {
        let a = std::fs::read(dirs[0].path().join(name)).unwrap();
        let b = std::fs::read(dirs[1].path().join(name)).ok();
        if Some(a) != b {
            differing.push(name.to_string_lossy().into_owned());
        }
    }
    let kinds = ["csv", "ppm", "vcd"];
    let covered = kinds.iter().all(|k| names[0].iter().any(|n| n.to_string_lossy().ends_with(k)));
    outcome(
        names[0] == names[1] && differing.is_empty() && covered,
        format!("{} artifacts compared, {} differ {}", names[0].len(), differing.len(), differing.join(" ")),
    )
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("rate reproduction", Duration::from_millis(1), rate_reproduction),
        ("band structure", Duration::from_secs(10), band_structure),
        ("darkness during refresh", Duration::from_secs(5), darkness_during_refresh),
        ("region-X inhibition", Duration::from_secs(10), region_x_inhibition),
        ("optics oracle equivalence", Duration::from_secs(30), oracle_equivalence),
        ("guard-band monotonicity", Duration::from_secs(10), guard_monotonicity),
        ("interleaver round trip", Duration::from_secs(5), interleaver_round_trip),
        ("determinism", Duration::from_secs(20), determinism),
    ];
    let mut failed = 0;
    for (i, (name, limit, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = check();
        let elapsed = start.elapsed();
        let pass = result.pass && elapsed < *limit;
        if !pass {
            failed += 1;
        }
        println!(
            "criterion {} {:<26} {}  ({:.3} s, limit {:.3} s) {}",
            i + 1,
            name,
            if pass { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64(),
            limit.as_secs_f64(),
            result.detail
        );
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
