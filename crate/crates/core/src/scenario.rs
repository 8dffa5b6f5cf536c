//! Scenario files: TOML tables describing the display, the viewers and every
//! pipeline setting. Absent keys take the prototype defaults.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Deserialize;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::geometry::{focal_for, DisplayGeometry, LedMask, Side, Viewer, DEFAULT_IPD};
use crate::interleave::{interleave, replicate, InterleavePattern, Rational, ViewImage};
use crate::optics::{forbidden_columns, select_columns, view_zones};
use crate::pnm;
use crate::schedule::{build_schedule, FrameSchedule, Mode, DEFAULT_REFRESH_FRACTION};
use crate::viewsim::{FrameSource, PanelFrame, SweepSettings, DEFAULT_GAP_THRESHOLD, DEFAULT_MIX_THRESHOLD};

/// The scenario shipped with the crate.
pub const DEFAULT_SCENARIO: &str = include_str!("../scenarios/default.scenario");

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct GeometryFile {
    screen_diagonal_in: Option<f64>,
    screen_width: Option<f64>,
    screen_height: Option<f64>,
    panel_cols: Option<usize>,
    panel_rows: Option<usize>,
    subpixels_per_pixel: Option<usize>,
    led_column_count: Option<usize>,
    led_pitch: Option<f64>,
    led_strip_width: Option<f64>,
    lens_pitch: Option<f64>,
    lens_count: Option<usize>,
    lens_aperture: Option<f64>,
    focal_length: Option<f64>,
    led_lens_gap: Option<f64>,
    diffuser_sigma: Option<f64>,
    design_distance: Option<f64>,
    panel_field_rate: Option<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ViewerFile {
    id: u32,
    x: f64,
    z: Option<f64>,
    ipd: Option<f64>,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct ScheduleFile {
    mode: Option<String>,
    refresh_fraction: Option<f64>,
    masks: Option<String>,
    guard: Option<usize>,
    forbidden_margin: Option<f64>,
    ignore_region_x: Option<bool>,
    cycles: Option<usize>,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct InterleaveFile {
    columns_per_lens: Option<usize>,
    slant: Option<String>,
    field_shift: Option<i64>,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct SweepFile {
    z: Option<f64>,
    x_min: Option<f64>,
    x_max: Option<f64>,
    step: Option<f64>,
    gap_threshold: Option<f64>,
    mix_threshold: Option<f64>,
    strip_height: Option<usize>,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct ProfileFile {
    z: Option<f64>,
    x_min: Option<f64>,
    x_max: Option<f64>,
    step: Option<f64>,
    rays: Option<usize>,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct ImagesFile {
    rows: Option<usize>,
    left: Option<PathBuf>,
    right: Option<PathBuf>,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct OutputFile {
    dir: Option<PathBuf>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioFile {
    geometry: Option<GeometryFile>,
    #[serde(default)]
    viewer: Vec<ViewerFile>,
    #[serde(default)]
    schedule: ScheduleFile,
    #[serde(default)]
    interleave: InterleaveFile,
    #[serde(default)]
    sweep: SweepFile,
    #[serde(default)]
    profile: ProfileFile,
    #[serde(default)]
    images: ImagesFile,
    #[serde(default)]
    output: OutputFile,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MaskPolicy {
    /// One column per lens aimed at each eye.
    Select,
    /// The whole array split between the two eyes, minus `guard` columns
    /// around each zone boundary.
    Zones,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScheduleSettings {
    pub mode: Mode,
    pub refresh_fraction: f64,
    pub masks: MaskPolicy,
    pub guard: usize,
    pub forbidden_margin: f64,
    /// Keep forbidden columns lit instead of clearing them.
    pub ignore_region_x: bool,
    pub cycles: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProfileSettings {
    pub z: f64,
    pub x_min: f64,
    pub x_max: f64,
    pub step: f64,
    pub rays_per_column: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ImageSettings {
    pub rows: usize,
    pub left: Option<PathBuf>,
    pub right: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Scenario {
    pub geometry: DisplayGeometry,
    pub viewers: Vec<Viewer>,
    pub schedule: ScheduleSettings,
    pub pattern: InterleavePattern,
    pub sweep: SweepSettings,
    pub strip_height: usize,
    pub profile: ProfileSettings,
    pub images: ImageSettings,
    pub output_dir: PathBuf,
    /// Hex SHA-256 of the scenario text.
    pub digest: String,
}

/// A built schedule together with the columns each view must keep dark.
#[derive(Clone, Debug, PartialEq)]
pub struct SchedulePlan {
    pub schedule: FrameSchedule,
    pub forbidden: Vec<(usize, LedMask)>,
}

fn invalid(field: impl Into<String>, reason: impl Into<String>) -> Error {
    Error::Validation { field: field.into(), reason: reason.into() }
}

fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].bytes().filter(|&b| b == b'\n').count() + 1
}

pub fn load_scenario(path: impl AsRef<Path>) -> Result<Scenario> {
    let path = path.as_ref();
    let text = fs::read_to_string(path)?;
    let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
    Scenario::parse(&text, &base)
}

impl Scenario {
    /// The bundled prototype scenario.
    pub fn bundled() -> Self {
        Self::parse(DEFAULT_SCENARIO, Path::new(".")).expect("bundled scenario is valid")
    }

    /// Parses scenario text; relative image paths resolve against `base`.
    pub fn parse(text: &str, base: &Path) -> Result<Self> {
        let file: ScenarioFile = toml::from_str(text).map_err(|e| Error::Parse {
            line: e.span().map_or(1, |s| line_of(text, s.start)),
            message: e.message().to_string(),
        })?;
        let digest: String = Sha256::digest(text.as_bytes()).iter().map(|b| format!("{b:02x}")).collect();

        let geometry = build_geometry(file.geometry.ok_or_else(|| invalid("geometry", "section is required"))?)?;
        let d = geometry.design_distance;

        let mut viewers = Vec::with_capacity(file.viewer.len());
        for (i, v) in file.viewer.iter().enumerate() {
            let z = v.z.unwrap_or(d);
            let ipd = v.ipd.unwrap_or(DEFAULT_IPD);
            if !(z > 0.0) {
                return Err(invalid(format!("viewer[{i}].z"), "must be positive"));
            }
            if !(ipd > 0.0) {
                return Err(invalid(format!("viewer[{i}].ipd"), "must be positive"));
            }
            if viewers.iter().any(|w: &Viewer| w.id == v.id) {
                return Err(invalid(format!("viewer[{i}].id"), format!("duplicate id {}", v.id)));
            }
            viewers.push(Viewer::centered(v.id, v.x, z, ipd));
        }
        if viewers.is_empty() {
            viewers.push(Viewer::centered(0, 0.0, d, DEFAULT_IPD));
        }

        let s = file.schedule;
        let mode = match s.mode.as_deref().unwrap_or("per-eye") {
            "per-eye" => Mode::PerEye,
            "per-viewer" => Mode::PerViewer,
            other => return Err(invalid("schedule.mode", format!("{other:?} is not per-eye or per-viewer"))),
        };
        if mode == Mode::PerEye && viewers.len() != 1 {
            return Err(invalid("schedule.mode", "per-eye mode serves exactly one viewer"));
        }
        let masks = match s.masks.as_deref().unwrap_or("select") {
            "select" => MaskPolicy::Select,
            "zones" => MaskPolicy::Zones,
            other => return Err(invalid("schedule.masks", format!("{other:?} is not select or zones"))),
        };
        if masks == MaskPolicy::Zones && mode != Mode::PerEye {
            return Err(invalid("schedule.masks", "zones need per-eye mode"));
        }
        let refresh_fraction = s.refresh_fraction.unwrap_or(DEFAULT_REFRESH_FRACTION);
        if !(refresh_fraction > 0.0 && refresh_fraction < 1.0) {
            return Err(invalid("schedule.refresh_fraction", "must lie strictly between 0 and 1"));
        }
        let forbidden_margin = s.forbidden_margin.unwrap_or(geometry.led_pitch);
        if !(forbidden_margin >= 0.0) {
            return Err(invalid("schedule.forbidden_margin", "must not be negative"));
        }
        let cycles = s.cycles.unwrap_or(1);
        if cycles == 0 {
            return Err(invalid("schedule.cycles", "must be at least 1"));
        }
        let schedule = ScheduleSettings {
            mode,
            refresh_fraction,
            masks,
            guard: s.guard.unwrap_or(0),
            forbidden_margin,
            ignore_region_x: s.ignore_region_x.unwrap_or(false),
            cycles,
        };

        let il = file.interleave;
        let pattern = InterleavePattern {
            columns_per_lens: il.columns_per_lens.unwrap_or(2),
            slant: match il.slant {
                Some(text) => parse_rational(&text)?,
                None => Rational::ZERO,
            },
            field_shift: il.field_shift.unwrap_or(0),
        };
        pattern.validate().map_err(|_| invalid("interleave.columns_per_lens", "must be at least 1"))?;

        let sw = file.sweep;
        let defaults = SweepSettings { z: d, ..SweepSettings::default() };
        let sweep = SweepSettings {
            z: sw.z.unwrap_or(defaults.z),
            x_min: sw.x_min.unwrap_or(defaults.x_min),
            x_max: sw.x_max.unwrap_or(defaults.x_max),
            step: sw.step.unwrap_or(defaults.step),
            gap_threshold: sw.gap_threshold.unwrap_or(DEFAULT_GAP_THRESHOLD),
            mix_threshold: sw.mix_threshold.unwrap_or(DEFAULT_MIX_THRESHOLD),
        };
        check_range("sweep", sweep.z, sweep.x_min, sweep.x_max, sweep.step)?;
        if !(sweep.gap_threshold > 0.0 && sweep.gap_threshold < sweep.mix_threshold && sweep.mix_threshold <= 1.0) {
            return Err(invalid("sweep.gap_threshold", "need 0 < gap_threshold < mix_threshold <= 1"));
        }
        let strip_height = sw.strip_height.unwrap_or(32);
        if strip_height == 0 {
            return Err(invalid("sweep.strip_height", "must be at least 1"));
        }

        let pf = file.profile;
        let profile = ProfileSettings {
            z: pf.z.unwrap_or(d),
            x_min: pf.x_min.unwrap_or(-0.2),
            x_max: pf.x_max.unwrap_or(0.2),
            step: pf.step.unwrap_or(0.0005),
            rays_per_column: pf.rays.unwrap_or(100_000),
        };
        check_range("profile", profile.z, profile.x_min, profile.x_max, profile.step)?;

        let im = file.images;
        let images = ImageSettings {
            rows: im.rows.unwrap_or(4),
            left: im.left.map(|p| base.join(p)),
            right: im.right.map(|p| base.join(p)),
        };
        if images.rows == 0 {
            return Err(invalid("images.rows", "must be at least 1"));
        }
        for (field, p) in [("images.left", &images.left), ("images.right", &images.right)] {
            if let Some(p) = p {
                if !p.is_file() {
                    return Err(invalid(field, format!("{} does not exist", p.display())));
                }
            }
        }
        if geometry.subpixel_columns() % 2 != 0 {
            return Err(invalid("geometry.panel_cols", "sub-pixel column count must be even"));
        }

        Ok(Scenario {
            geometry,
            viewers,
            schedule,
            pattern,
            sweep,
            strip_height,
            profile,
            images,
            output_dir: file.output.dir.unwrap_or_else(|| PathBuf::from("out")),
            digest,
        })
    }

    /// Short digest used in artifact names.
    pub fn tag(&self) -> &str {
        &self.digest[..12]
    }

    /// Backlight mask and region-X mask for every view, in view order.
    pub fn schedule_plan(&self) -> Result<SchedulePlan> {
        let g = &self.geometry;
        let s = &self.schedule;
        let (masks, forbidden): (Vec<LedMask>, Vec<LedMask>) = match s.mode {
            Mode::PerEye => {
                let v = &self.viewers[0];
                let (l, r) = match s.masks {
                    MaskPolicy::Select => (select_columns(g, &v.left)?, select_columns(g, &v.right)?),
                    MaskPolicy::Zones => view_zones(g, &v.left, &v.right, s.guard)?,
                };
                // a zone split lights the array right up to the other eye's
                // columns, so only those columns themselves are off limits
                let margin = match s.masks {
                    MaskPolicy::Select => s.forbidden_margin,
                    MaskPolicy::Zones => 0.0,
                };
                let fl = forbidden_columns(g, &[v.right], margin)?;
                let fr = forbidden_columns(g, &[v.left], margin)?;
                (vec![l, r], vec![fl, fr])
            }
            Mode::PerViewer => {
                let mut masks = Vec::new();
                let mut forbidden = Vec::new();
                for (i, v) in self.viewers.iter().enumerate() {
                    masks.push(select_columns(g, &v.left)?.union(&select_columns(g, &v.right)?));
                    let others: Vec<_> = self
                        .viewers
                        .iter()
                        .enumerate()
                        .filter(|(j, _)| *j != i)
                        .flat_map(|(_, o)| o.eyes())
                        .collect();
                    forbidden.push(forbidden_columns(g, &others, s.forbidden_margin)?);
                }
                (masks, forbidden)
            }
        };
        let masks: Vec<LedMask> = if s.ignore_region_x {
            masks
        } else {
            masks.iter().zip(&forbidden).map(|(m, f)| m.difference(f)).collect()
        };
        let schedule = build_schedule(s.mode, &masks, g.panel_field_rate, s.refresh_fraction)?;
        Ok(SchedulePlan { schedule, forbidden: forbidden.into_iter().enumerate().collect() })
    }

    /// Left and right source images, from the configured files or white.
    pub fn source_images(&self) -> Result<(ViewImage, ViewImage)> {
        let width = self.geometry.subpixel_columns() / 2;
        let load = |p: &Option<PathBuf>, field: &str| -> Result<ViewImage> {
            match p {
                Some(p) => {
                    let img = pnm::read_pgm(&fs::read(p)?)?;
                    if img.width() != width {
                        return Err(invalid(field, format!("image is {} wide, need {width}", img.width())));
                    }
                    Ok(img)
                }
                None => ViewImage::filled(width, self.images.rows, 1.0),
            }
        };
        let left = load(&self.images.left, "images.left")?;
        let right = load(&self.images.right, "images.right")?;
        if left.height() != right.height() {
            return Err(invalid("images", "left and right images differ in height"));
        }
        Ok((left, right))
    }

    /// One panel frame per illuminate phase: the eye's view on the whole
    /// panel in per-eye mode, an interleaved pair per field otherwise.
    pub fn panel_frames(&self) -> Result<Vec<PanelFrame>> {
        let (left, right) = self.source_images()?;
        Ok(match self.schedule.mode {
            Mode::PerEye => vec![
                PanelFrame::uniform(replicate(&left), Side::Left),
                PanelFrame::uniform(replicate(&right), Side::Right),
            ],
            Mode::PerViewer => (0..self.viewers.len())
                .map(|field| {
                    let image = interleave(&left, &right, &self.pattern, field)?;
                    Ok(PanelFrame { image, source: FrameSource::Interleaved { pattern: self.pattern, field } })
                })
                .collect::<Result<_>>()?,
        })
    }
}

fn check_range(section: &str, z: f64, lo: f64, hi: f64, step: f64) -> Result<()> {
    if !(z > 0.0) {
        return Err(invalid(format!("{section}.z"), "must be positive"));
    }
    if !(step > 0.0) {
        return Err(invalid(format!("{section}.step"), "must be positive"));
    }
    if !(hi >= lo) {
        return Err(invalid(format!("{section}.x_max"), "must not be below x_min"));
    }
    Ok(())
}

fn parse_rational(text: &str) -> Result<Rational> {
    let bad = || invalid("interleave.slant", format!("{text:?} is not an integer or num/den"));
    let (num, den) = match text.split_once('/') {
        Some((n, d)) => (n.trim().parse().map_err(|_| bad())?, d.trim().parse().map_err(|_| bad())?),
        None => (text.trim().parse().map_err(|_| bad())?, 1),
    };
    Rational::new(num, den).map_err(|_| bad())
}

fn build_geometry(f: GeometryFile) -> Result<DisplayGeometry> {
    let proto = DisplayGeometry::prototype_27in();
    let (screen_width, screen_height) = match f.screen_diagonal_in {
        Some(diag) => {
            let hyp = (16.0f64 * 16.0 + 9.0 * 9.0).sqrt();
            let d = diag * 0.0254;
            (d * 16.0 / hyp, d * 9.0 / hyp)
        }
        None => (proto.screen_width, proto.screen_height),
    };
    let screen_width = f.screen_width.unwrap_or(screen_width);
    let screen_height = f.screen_height.unwrap_or(screen_height);
    let led_column_count = f.led_column_count.unwrap_or(proto.led_column_count);
    let lens_count = f.lens_count.unwrap_or(proto.lens_count);
    let led_pitch = f.led_pitch.unwrap_or(screen_width / led_column_count.max(1) as f64);
    let lens_pitch = f.lens_pitch.unwrap_or(screen_width / lens_count.max(1) as f64);
    let led_lens_gap = f.led_lens_gap.unwrap_or(proto.led_lens_gap);
    let design_distance = f.design_distance.unwrap_or(proto.design_distance);
    let geometry = DisplayGeometry {
        screen_width,
        screen_height,
        panel_cols: f.panel_cols.unwrap_or(proto.panel_cols),
        panel_rows: f.panel_rows.unwrap_or(proto.panel_rows),
        subpixels_per_pixel: f.subpixels_per_pixel.unwrap_or(proto.subpixels_per_pixel),
        led_column_count,
        led_pitch,
        led_strip_width: f.led_strip_width.unwrap_or(0.4 * led_pitch),
        lens_pitch,
        lens_count,
        lens_aperture: f.lens_aperture.unwrap_or(lens_pitch),
        focal_length: f.focal_length.unwrap_or(focal_for(led_lens_gap, design_distance)),
        led_lens_gap,
        diffuser_sigma: f.diffuser_sigma.unwrap_or(0.15 * led_pitch),
        design_distance,
        panel_field_rate: f.panel_field_rate.unwrap_or(proto.panel_field_rate),
    };
    geometry.validate().map_err(|e| match e {
        Error::InvalidGeometry { field, reason } => invalid(format!("geometry.{field}"), reason),
        other => other,
    })?;
    Ok(geometry)
}
