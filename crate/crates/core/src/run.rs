//! Subcommand pipelines. Every artifact is named
//! `<subcommand>[-detail]-<scenario digest>.<ext>` and written atomically.

use std::fmt::{self, Write as _};
use std::fs;
use std::path::{Path, PathBuf};

use crate::error::Result;
use crate::optics::{illumination_profile, select_columns, uniform_grid};
use crate::montecarlo::traced_profile;
use crate::pnm::write_pgm;
use crate::scenario::Scenario;
use crate::schedule::Violation;
use crate::trace::{export_trace, TraceFormat};
use crate::viewsim::{crosstalk_csv, crosstalk_report, render_perceived, sweep_viewing_plane};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Subcommand {
    Select,
    Profile,
    Schedule,
    Interleave,
    Render,
    Sweep,
    Crosstalk,
}

impl Subcommand {
    pub const ALL: [Subcommand; 7] = [
        Subcommand::Select,
        Subcommand::Profile,
        Subcommand::Schedule,
        Subcommand::Interleave,
        Subcommand::Render,
        Subcommand::Sweep,
        Subcommand::Crosstalk,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Subcommand::Select => "select",
            Subcommand::Profile => "profile",
            Subcommand::Schedule => "schedule",
            Subcommand::Interleave => "interleave",
            Subcommand::Render => "render",
            Subcommand::Sweep => "sweep",
            Subcommand::Crosstalk => "crosstalk",
        }
    }
}

impl fmt::Display for Subcommand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct RunOptions {
    /// Overrides the scenario's output directory.
    pub out_dir: Option<PathBuf>,
    /// Enables the Monte-Carlo histogram of `profile`.
    pub seed: Option<u64>,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct RunOutcome {
    pub artifacts: Vec<PathBuf>,
    pub violations: Vec<Violation>,
}

impl RunOutcome {
    pub fn exit_code(&self) -> i32 {
        if self.violations.is_empty() {
            0
        } else {
            1
        }
    }
}

struct Writer<'a> {
    dir: PathBuf,
    subcommand: Subcommand,
    tag: &'a str,
    written: Vec<PathBuf>,
}

impl Writer<'_> {
    fn put(&mut self, detail: Option<&str>, ext: &str, bytes: &[u8]) -> Result<()> {
        let name = match detail {
            Some(d) => format!("{}-{d}-{}.{ext}", self.subcommand, self.tag),
            None => format!("{}-{}.{ext}", self.subcommand, self.tag),
        };
        let path = self.dir.join(&name);
        write_atomic(&path, bytes)?;
        self.written.push(path);
        Ok(())
    }
}

fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().unwrap_or(Path::new("."));
    let file = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    let tmp = dir.join(format!(".{file}.{}.tmp", std::process::id()));
    fs::write(&tmp, bytes)?;
    fs::rename(&tmp, path).inspect_err(|_| {
        let _ = fs::remove_file(&tmp);
    })?;
    Ok(())
}

fn eye_detail(viewer: u32, side: impl fmt::Display) -> String {
    format!("v{viewer}-{side}")
}

/// Runs one subcommand on a loaded scenario.
pub fn run(subcommand: Subcommand, scenario: &Scenario, options: &RunOptions) -> Result<RunOutcome> {
    let dir = options.out_dir.clone().unwrap_or_else(|| scenario.output_dir.clone());
    fs::create_dir_all(&dir)?;
    let mut out = Writer { dir, subcommand, tag: scenario.tag(), written: Vec::new() };
    let g = &scenario.geometry;
    let mut violations = Vec::new();

    match subcommand {
        Subcommand::Select => {
            let mut csv = String::from("viewer,eye,x_m,z_m,mask_hex,lit_columns\n");
            for v in &scenario.viewers {
                for eye in v.eyes() {
                    let mask = select_columns(g, &eye)?;
                    let lit: Vec<String> = mask.lit_columns().map(|c| c.to_string()).collect();
                    let _ = writeln!(
                        csv,
                        "{},{},{},{},{},{}",
                        v.id,
                        eye.side,
                        crate::format::sci9(eye.x),
                        crate::format::sci9(eye.z),
                        mask.to_hex(),
                        lit.join(" ")
                    );
                }
            }
            out.put(None, "csv", csv.as_bytes())?;
        }
        Subcommand::Profile => {
            let p = &scenario.profile;
            let xs = uniform_grid(p.x_min, p.x_max, p.step);
            for v in &scenario.viewers {
                for eye in v.eyes() {
                    let mask = select_columns(g, &eye)?;
                    let detail = eye_detail(v.id, eye.side);
                    let profile = illumination_profile(g, &mask, p.z, &xs)?;
                    out.put(Some(&detail), "csv", profile.to_csv().as_bytes())?;
                    if let Some(seed) = options.seed {
                        let traced = traced_profile(g, &mask, p.z, &xs, p.rays_per_column, seed)?;
                        out.put(Some(&format!("mc-{detail}")), "csv", traced.to_csv().as_bytes())?;
                    }
                }
            }
        }
        Subcommand::Schedule => {
            let plan = scenario.schedule_plan()?;
            violations = plan.schedule.validate(&plan.forbidden);
            let cycles = scenario.schedule.cycles;
            out.put(None, "vcd", &export_trace(&plan.schedule, cycles, TraceFormat::Vcd))?;
            out.put(None, "csv", &export_trace(&plan.schedule, cycles, TraceFormat::Csv))?;
        }
        Subcommand::Interleave => {
            for (field, frame) in scenario.panel_frames()?.iter().enumerate() {
                out.put(Some(&format!("field{field}")), "pgm", &write_pgm(&frame.image))?;
            }
        }
        Subcommand::Render => {
            let plan = scenario.schedule_plan()?;
            let frames = scenario.panel_frames()?;
            for v in &scenario.viewers {
                for eye in v.eyes() {
                    let image = render_perceived(g, &plan.schedule, &frames, &eye)?;
                    out.put(Some(&eye_detail(v.id, eye.side)), "pgm", &image.to_pgm())?;
                }
            }
        }
        Subcommand::Sweep => {
            let plan = scenario.schedule_plan()?;
            let frames = scenario.panel_frames()?;
            let report = sweep_viewing_plane(g, &plan.schedule, &frames, &scenario.sweep)?;
            out.put(None, "csv", report.to_csv().as_bytes())?;
            out.put(None, "ppm", &report.to_ppm(scenario.strip_height))?;
        }
        Subcommand::Crosstalk => {
            let plan = scenario.schedule_plan()?;
            let report = crosstalk_report(g, &plan.schedule, &scenario.viewers)?;
            out.put(None, "csv", crosstalk_csv(&report).as_bytes())?;
        }
    }
    Ok(RunOutcome { artifacts: out.written, violations })
}
