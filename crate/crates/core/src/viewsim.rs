//! What an eye sees over a frame cycle: per-column backlight weights,
//! perceived images, viewing-plane sweeps and crosstalk.

use std::fmt::Write as _;

use crate::blur::strip_density;
use crate::error::{Error, Result};
use crate::format::sci9;
use crate::geometry::{DisplayGeometry, Eye, LedMask, Side, Viewer};
use crate::interleave::{InterleavePattern, ViewImage};
use crate::optics::{crosstalk_ratio, uniform_grid, IntensityProfile};
use crate::pnm;
use crate::schedule::{FrameSchedule, Mode};

pub const DEFAULT_GAP_THRESHOLD: f64 = 0.1;
pub const DEFAULT_MIX_THRESHOLD: f64 = 0.5;

/// Samples per crosstalk window.
const WINDOW_SAMPLES: usize = 64;

/// Which view each pixel of a panel frame belongs to.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum FrameSource {
    Uniform(Side),
    Interleaved { pattern: InterleavePattern, field: usize },
}

/// One panel image together with the view labels of its pixels.
#[derive(Clone, Debug, PartialEq)]
pub struct PanelFrame {
    pub image: ViewImage,
    pub source: FrameSource,
}

impl PanelFrame {
    pub fn uniform(image: ViewImage, side: Side) -> Self {
        PanelFrame { image, source: FrameSource::Uniform(side) }
    }

    pub fn side_at(&self, row: usize, col: usize) -> Side {
        match self.source {
            FrameSource::Uniform(side) => side,
            FrameSource::Interleaved { pattern, field } => pattern.side_at(row, col, field),
        }
    }

    /// Per-column sums of the samples labelled left and right.
    fn column_sums(&self) -> (Vec<f64>, Vec<f64>) {
        let w = self.image.width();
        let mut left = vec![0.0; w];
        let mut right = vec![0.0; w];
        for r in 0..self.image.height() {
            for (c, &v) in self.image.row(r).iter().enumerate() {
                match self.side_at(r, c) {
                    Side::Left => left[c] += v as f64,
                    Side::Right => right[c] += v as f64,
                }
            }
        }
        (left, right)
    }
}

/// Lateral centre of each panel sub-pixel column.
pub fn panel_column_centers(geometry: &DisplayGeometry) -> Vec<f64> {
    let n = geometry.subpixel_columns();
    let w = geometry.screen_width;
    (0..n).map(|c| (c as f64 + 0.5) * w / n as f64 - w / 2.0).collect()
}

/// Backlight weight behind every panel sub-pixel column as seen from `eye`.
///
/// The ray from the eye through a column is followed back through the lens
/// covering that column to the LED plane; the weight is the diffused emission
/// density of the lit columns at the landing point. Columns outside every
/// lens aperture get zero.
pub fn perceived_weights(geometry: &DisplayGeometry, eye: &Eye, mask: &LedMask) -> Result<Vec<f64>> {
    if !(eye.z > 0.0) {
        return Err(Error::NonPositiveDistance { what: "eye.z", value: eye.z });
    }
    if !(geometry.led_lens_gap > 0.0) {
        return Err(Error::NonPositiveDistance { what: "led_lens_gap", value: geometry.led_lens_gap });
    }
    let xs = panel_column_centers(geometry);
    let mut weights = vec![0.0; xs.len()];
    if mask.is_dark() {
        return Ok(weights);
    }
    let (g, f) = (geometry.led_lens_gap, geometry.focal_length);
    let (strip, sigma) = (geometry.led_strip_width, geometry.diffuser_sigma);
    let reach = strip / 2.0 + 12.0 * sigma;
    let n = geometry.led_column_count;
    let half = (n as f64 - 1.0) / 2.0;
    let pitch = geometry.led_pitch;

    for (w, &x) in weights.iter_mut().zip(&xs) {
        let Some(lens) = geometry.covering_lens(x) else { continue };
        let lens_x = geometry.lens_center(lens);
        let toward_eye = (eye.x - x) / eye.z;
        let before_lens = toward_eye + (x - lens_x) / f;
        let u = x - before_lens * g;
        let lo = ((u - reach) / pitch + half).ceil().max(0.0) as usize;
        let hi = ((u + reach) / pitch + half).floor();
        if hi < 0.0 {
            continue;
        }
        let hi = (hi as usize).min(n - 1);
        for c in lo..=hi {
            if mask.get(c) {
                *w += strip_density(u - geometry.led_center(c), strip, sigma);
            }
        }
    }
    Ok(weights)
}

/// Perceived image in energy units (seconds times weight times sample).
#[derive(Clone, Debug, PartialEq)]
pub struct PerceivedImage {
    pub width: usize,
    pub height: usize,
    pub values: Vec<f64>,
}

impl PerceivedImage {
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.values[row * self.width + col]
    }

    pub fn total(&self) -> f64 {
        self.values.iter().sum()
    }

    /// Grey PGM scaled so the brightest value is white.
    pub fn to_pgm(&self) -> Vec<u8> {
        pnm::write_pgm_normalized(self.width, self.height, &self.values)
    }
}

fn check_frames(geometry: &DisplayGeometry, schedule: &FrameSchedule, frames: &[PanelFrame]) -> Result<()> {
    let expected = schedule.illuminate_phases().count();
    if frames.len() != expected {
        return Err(Error::FrameCountMismatch { expected, found: frames.len() });
    }
    let columns = geometry.subpixel_columns();
    if let Some(f) = frames.iter().find(|f| f.image.width() != columns) {
        return Err(Error::DimensionMismatch(format!(
            "panel frame is {} columns wide, the panel has {columns}",
            f.image.width()
        )));
    }
    Ok(())
}

/// Time-weighted sum over illuminate phases of weights times panel image.
/// `frames` holds one panel image per illuminate phase, in schedule order.
pub fn render_perceived(
    geometry: &DisplayGeometry,
    schedule: &FrameSchedule,
    frames: &[PanelFrame],
    eye: &Eye,
) -> Result<PerceivedImage> {
    check_frames(geometry, schedule, frames)?;
    let width = geometry.subpixel_columns();
    let height = frames.first().map_or(0, |f| f.image.height());
    let mut values = vec![0.0; width * height];
    for ((_, phase), frame) in schedule.illuminate_phases().zip(frames) {
        if frame.image.height() != height {
            return Err(Error::DimensionMismatch("panel frames differ in height".into()));
        }
        let weights = perceived_weights(geometry, eye, &phase.mask)?;
        for r in 0..height {
            let row = frame.image.row(r);
            for c in 0..width {
                values[r * width + c] += phase.duration * weights[c] * row[c] as f64;
            }
        }
    }
    Ok(PerceivedImage { width, height, values })
}

/// Energy an eye receives during each illuminate phase, in schedule order.
/// The entries sum to the total of [`render_perceived`].
pub fn phase_energies(
    geometry: &DisplayGeometry,
    schedule: &FrameSchedule,
    frames: &[PanelFrame],
    eye: &Eye,
) -> Result<Vec<f64>> {
    check_frames(geometry, schedule, frames)?;
    schedule
        .illuminate_phases()
        .zip(frames)
        .map(|((_, phase), frame)| {
            let weights = perceived_weights(geometry, eye, &phase.mask)?;
            let mut e = 0.0;
            for r in 0..frame.image.height() {
                for (w, &v) in weights.iter().zip(frame.image.row(r)) {
                    e += w * v as f64;
                }
            }
            Ok(phase.duration * e)
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ViewClass {
    LeftView,
    RightView,
    Gap,
    Mixed,
}

impl ViewClass {
    pub fn as_str(self) -> &'static str {
        match self {
            ViewClass::LeftView => "left",
            ViewClass::RightView => "right",
            ViewClass::Gap => "gap",
            ViewClass::Mixed => "mixed",
        }
    }

    pub fn color(self) -> [u8; 3] {
        match self {
            ViewClass::LeftView => [0, 255, 0],
            ViewClass::RightView => [255, 0, 0],
            ViewClass::Gap => [0, 0, 0],
            ViewClass::Mixed => [255, 255, 0],
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SweepEntry {
    pub x: f64,
    pub class: ViewClass,
    pub left_signal: f64,
    pub right_signal: f64,
}

/// Run of consecutive entries sharing a class; `first..=last` index entries.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Band {
    pub class: ViewClass,
    pub first: usize,
    pub last: usize,
    pub x_start: f64,
    pub x_end: f64,
}

impl Band {
    /// Width covered by the band's samples, counting one step per sample.
    pub fn width(&self, step: f64) -> f64 {
        (self.last - self.first + 1) as f64 * step
    }

    pub fn center(&self) -> f64 {
        0.5 * (self.x_start + self.x_end)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepReport {
    pub z: f64,
    pub step: f64,
    pub entries: Vec<SweepEntry>,
    pub bands: Vec<Band>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SweepSettings {
    pub z: f64,
    pub x_min: f64,
    pub x_max: f64,
    pub step: f64,
    pub gap_threshold: f64,
    pub mix_threshold: f64,
}

impl Default for SweepSettings {
    fn default() -> Self {
        SweepSettings {
            z: 1.0,
            x_min: -0.2,
            x_max: 0.2,
            step: 0.001,
            gap_threshold: DEFAULT_GAP_THRESHOLD,
            mix_threshold: DEFAULT_MIX_THRESHOLD,
        }
    }
}

/// Left- and right-labelled energy reaching an eye at `(x, z)`.
fn view_signals(
    geometry: &DisplayGeometry,
    schedule: &FrameSchedule,
    sums: &[(Vec<f64>, Vec<f64>)],
    x: f64,
    z: f64,
) -> Result<(f64, f64)> {
    let eye = Eye::new(x, z, Side::Left, 0);
    let (mut left, mut right) = (0.0, 0.0);
    for ((_, phase), (ls, rs)) in schedule.illuminate_phases().zip(sums) {
        if phase.mask.is_dark() {
            continue;
        }
        let w = perceived_weights(geometry, &eye, &phase.mask)?;
        let (mut l, mut r) = (0.0, 0.0);
        for c in 0..w.len() {
            l += w[c] * ls[c];
            r += w[c] * rs[c];
        }
        left += phase.duration * l;
        right += phase.duration * r;
    }
    Ok((left, right))
}

/// Classifies every position of the viewing line at depth `settings.z`.
pub fn sweep_viewing_plane(
    geometry: &DisplayGeometry,
    schedule: &FrameSchedule,
    frames: &[PanelFrame],
    settings: &SweepSettings,
) -> Result<SweepReport> {
    check_frames(geometry, schedule, frames)?;
    if !(settings.step > 0.0) || !(settings.x_max >= settings.x_min) {
        return Err(Error::EmptyRange);
    }
    if !(settings.gap_threshold > 0.0
        && settings.gap_threshold < settings.mix_threshold
        && settings.mix_threshold <= 1.0)
    {
        return Err(Error::Validation {
            field: "sweep thresholds".into(),
            reason: "need 0 < gap_threshold < mix_threshold <= 1".into(),
        });
    }
    let xs = uniform_grid(settings.x_min, settings.x_max, settings.step);
    if xs.is_empty() {
        return Err(Error::EmptyRange);
    }
    let rows = frames.first().map_or(1, |f| f.image.height().max(1)) as f64;
    let sums: Vec<(Vec<f64>, Vec<f64>)> = frames
        .iter()
        .map(|f| {
            let (l, r) = f.column_sums();
            (l.into_iter().map(|v| v / rows).collect(), r.into_iter().map(|v| v / rows).collect())
        })
        .collect();
    let signals = xs
        .iter()
        .map(|&x| view_signals(geometry, schedule, &sums, x, settings.z))
        .collect::<Result<Vec<_>>>()?;
    let peak = signals.iter().map(|(l, r)| l.max(*r)).fold(0.0, f64::max);

    let entries: Vec<SweepEntry> = xs
        .iter()
        .zip(&signals)
        .map(|(&x, &(l, r))| {
            let hi = l.max(r);
            let lo = l.min(r);
            let class = if !(hi >= settings.gap_threshold * peak) || hi == 0.0 {
                ViewClass::Gap
            } else if lo / hi > settings.mix_threshold {
                ViewClass::Mixed
            } else if l > r {
                ViewClass::LeftView
            } else {
                ViewClass::RightView
            };
            SweepEntry { x, class, left_signal: l, right_signal: r }
        })
        .collect();
    let bands = group_bands(&entries);
    Ok(SweepReport { z: settings.z, step: settings.step, entries, bands })
}

fn group_bands(entries: &[SweepEntry]) -> Vec<Band> {
    let mut bands: Vec<Band> = Vec::new();
    for (i, e) in entries.iter().enumerate() {
        match bands.last_mut() {
            Some(b) if b.class == e.class => {
                b.last = i;
                b.x_end = e.x;
            }
            _ => bands.push(Band { class: e.class, first: i, last: i, x_start: e.x, x_end: e.x }),
        }
    }
    bands
}

impl SweepReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("x_m,class,left,right\n");
        for e in &self.entries {
            let _ = writeln!(
                out,
                "{},{},{},{}",
                sci9(e.x),
                e.class.as_str(),
                sci9(e.left_signal),
                sci9(e.right_signal)
            );
        }
        out
    }

    /// One pixel column per entry, painted in its class colour.
    pub fn to_ppm(&self, height: usize) -> Vec<u8> {
        let row: Vec<[u8; 3]> = self.entries.iter().map(|e| e.class.color()).collect();
        let pixels: Vec<[u8; 3]> = (0..height).flat_map(|_| row.iter().copied()).collect();
        pnm::write_ppm(row.len(), height, &pixels).expect("pixel count matches by construction")
    }

    /// Sequence of band classes, for quick structural checks.
    pub fn classes(&self) -> Vec<ViewClass> {
        self.bands.iter().map(|b| b.class).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EyeCrosstalk {
    pub viewer_id: u32,
    pub side: Side,
    pub x: f64,
    pub z: f64,
    pub crosstalk: f64,
}

/// Views of `schedule` that are meant for `eye` of the viewer at `index`.
fn intended_view(schedule: &FrameSchedule, viewer_index: usize, side: Side) -> usize {
    match schedule.mode() {
        Mode::PerEye => match side {
            Side::Left => 0,
            Side::Right => 1,
        },
        Mode::PerViewer => viewer_index,
    }
}

/// Energy perceived from the phases selected by `keep`, with full-white
/// panel frames, sampled across `xs` at depth `z`.
fn phase_energy(
    geometry: &DisplayGeometry,
    schedule: &FrameSchedule,
    xs: &[f64],
    z: f64,
    keep: impl Fn(usize) -> bool,
) -> Result<IntensityProfile> {
    let mut values = vec![0.0; xs.len()];
    for (_, phase) in schedule.illuminate_phases().filter(|(_, p)| keep(p.kind.view())) {
        if phase.mask.is_dark() {
            continue;
        }
        for (v, &x) in values.iter_mut().zip(xs) {
            let w = perceived_weights(geometry, &Eye::new(x, z, Side::Left, 0), &phase.mask)?;
            *v += phase.duration * w.iter().sum::<f64>();
        }
    }
    IntensityProfile::new(z, xs.to_vec(), values)
}

/// For each eye, light from other views' fields over light from its own,
/// integrated over a window of half the viewer's interpupillary distance.
pub fn crosstalk_report(
    geometry: &DisplayGeometry,
    schedule: &FrameSchedule,
    viewers: &[Viewer],
) -> Result<Vec<EyeCrosstalk>> {
    if viewers.is_empty() {
        return Err(Error::NoViewers);
    }
    let mut out = Vec::new();
    for (index, viewer) in viewers.iter().enumerate() {
        let window = 0.5 * (viewer.right.x - viewer.left.x).abs();
        for eye in viewer.eyes() {
            let own = intended_view(schedule, index, eye.side);
            let step = window / WINDOW_SAMPLES as f64;
            let xs: Vec<f64> = (0..=WINDOW_SAMPLES).map(|i| eye.x - window / 2.0 + i as f64 * step).collect();
            let intended = phase_energy(geometry, schedule, &xs, eye.z, |v| v == own)?;
            let unintended = phase_energy(geometry, schedule, &xs, eye.z, |v| v != own)?;
            let crosstalk = crosstalk_ratio(&intended, &unintended, eye.x, window)?;
            out.push(EyeCrosstalk { viewer_id: viewer.id, side: eye.side, x: eye.x, z: eye.z, crosstalk });
        }
    }
    Ok(out)
}

pub fn crosstalk_csv(report: &[EyeCrosstalk]) -> String {
    let mut out = String::from("viewer,eye,x_m,z_m,crosstalk\n");
    for e in report {
        let _ = writeln!(out, "{},{},{},{},{}", e.viewer_id, e.side, sci9(e.x), sci9(e.z), sci9(e.crosstalk));
    }
    out
}
