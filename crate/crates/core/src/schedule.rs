//! Field-sequential timing: each view gets an LCD refresh with the backlight
//! dark, then an illumination interval with its column mask lit.

use std::fmt;

use crate::error::{Error, Result};
use crate::geometry::LedMask;

/// Default share of each field spent refreshing the LCD.
pub const DEFAULT_REFRESH_FRACTION: f64 = 0.25;

/// Relative tolerance on the phase-duration sum.
const PERIOD_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Mode {
    /// Two views, the left and right eye of a single viewer.
    PerEye,
    /// One view per viewer; both eyes are lit in the same field.
    PerViewer,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::PerEye => "per-eye",
            Mode::PerViewer => "per-viewer",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PhaseKind {
    Refresh(usize),
    Illuminate(usize),
}

impl PhaseKind {
    pub fn view(self) -> usize {
        match self {
            PhaseKind::Refresh(v) | PhaseKind::Illuminate(v) => v,
        }
    }

    pub fn is_refresh(self) -> bool {
        matches!(self, PhaseKind::Refresh(_))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum LcdState {
    Refreshing(usize),
    Holding(usize),
}

impl LcdState {
    pub fn view(self) -> usize {
        match self {
            LcdState::Refreshing(v) | LcdState::Holding(v) => v,
        }
    }

    /// `2 * view + hold`, the value written to waveform dumps.
    pub fn code(self) -> u64 {
        match self {
            LcdState::Refreshing(v) => 2 * v as u64,
            LcdState::Holding(v) => 2 * v as u64 + 1,
        }
    }
}

impl fmt::Display for LcdState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LcdState::Refreshing(v) => write!(f, "refresh:{v}"),
            LcdState::Holding(v) => write!(f, "hold:{v}"),
        }
    }
}

impl From<PhaseKind> for LcdState {
    fn from(kind: PhaseKind) -> Self {
        match kind {
            PhaseKind::Refresh(v) => LcdState::Refreshing(v),
            PhaseKind::Illuminate(v) => LcdState::Holding(v),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Phase {
    pub kind: PhaseKind,
    /// Seconds.
    pub duration: f64,
    pub mask: LedMask,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FrameSchedule {
    mode: Mode,
    view_count: usize,
    phases: Vec<Phase>,
    frame_period: f64,
    field_rate: f64,
    starts: Vec<f64>,
}

/// Builds the standard `Refresh(k), Illuminate(k)` sequence, one field per
/// mask, at `panel_field_rate` fields per second.
pub fn build_schedule(
    mode: Mode,
    masks: &[LedMask],
    panel_field_rate: f64,
    refresh_fraction: f64,
) -> Result<FrameSchedule> {
    let n = masks.len();
    if n == 0 {
        return Err(Error::EmptyMaskList);
    }
    if mode == Mode::PerEye && n != 2 {
        return Err(Error::BadViewCount(n));
    }
    let width = masks[0].len();
    if let Some(bad) = masks.iter().find(|m| m.len() != width) {
        return Err(Error::MaskLengthMismatch { expected: width, found: bad.len() });
    }
    if !(refresh_fraction > 0.0 && refresh_fraction < 1.0) {
        return Err(Error::BadFraction("refresh_fraction"));
    }
    if !(panel_field_rate > 0.0 && panel_field_rate.is_finite()) {
        return Err(Error::BadRate(panel_field_rate));
    }
    let refresh = refresh_fraction / panel_field_rate;
    let illuminate = (1.0 - refresh_fraction) / panel_field_rate;
    let mut phases = Vec::with_capacity(2 * n);
    for (view, mask) in masks.iter().enumerate() {
        phases.push(Phase { kind: PhaseKind::Refresh(view), duration: refresh, mask: LedMask::all_off(width) });
        phases.push(Phase { kind: PhaseKind::Illuminate(view), duration: illuminate, mask: mask.clone() });
    }
    let frame_period = n as f64 / panel_field_rate;
    Ok(FrameSchedule::assemble(mode, n, phases, frame_period, panel_field_rate))
}

impl FrameSchedule {
    /// Wraps arbitrary phases without checking them; use [`validate`] to find
    /// out what is wrong with a hand-built schedule.
    pub fn from_parts(mode: Mode, view_count: usize, phases: Vec<Phase>, frame_period: f64) -> Self {
        let field_rate = view_count as f64 / frame_period;
        Self::assemble(mode, view_count, phases, frame_period, field_rate)
    }

    fn assemble(mode: Mode, view_count: usize, phases: Vec<Phase>, frame_period: f64, field_rate: f64) -> Self {
        let mut starts = Vec::with_capacity(phases.len());
        let mut t = 0.0;
        for p in &phases {
            starts.push(t);
            t += p.duration;
        }
        FrameSchedule { mode, view_count, phases, frame_period, field_rate, starts }
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn view_count(&self) -> usize {
        self.view_count
    }

    pub fn phases(&self) -> &[Phase] {
        &self.phases
    }

    pub fn frame_period(&self) -> f64 {
        self.frame_period
    }

    /// Start time of each phase within the frame.
    pub fn phase_starts(&self) -> &[f64] {
        &self.starts
    }

    pub fn panel_field_rate(&self) -> f64 {
        self.field_rate
    }

    /// Content update rate seen by each view.
    pub fn effective_view_rate(&self) -> f64 {
        self.field_rate / self.view_count as f64
    }

    /// Illuminate phases in schedule order, paired with their phase index.
    pub fn illuminate_phases(&self) -> impl Iterator<Item = (usize, &Phase)> {
        self.phases.iter().enumerate().filter(|(_, p)| !p.kind.is_refresh())
    }

    /// Phase active at `t` (taken modulo the frame period). A boundary instant
    /// belongs to the phase that starts there.
    pub fn state_at(&self, t: f64) -> State<'_> {
        let local = t.rem_euclid(self.frame_period);
        let index = self.starts.partition_point(|&s| s <= local).saturating_sub(1);
        let phase = &self.phases[index];
        State { phase_index: index, mask: &phase.mask, lcd_state: phase.kind.into() }
    }

    pub fn validate(&self, forbidden: &[(usize, LedMask)]) -> Vec<Violation> {
        validate(self, forbidden)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct State<'a> {
    pub phase_index: usize,
    pub mask: &'a LedMask,
    pub lcd_state: LcdState,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Violation {
    BacklightDuringRefresh { phase: usize },
    NonPositiveDuration { phase: usize },
    PeriodMismatch { sum: f64, frame_period: f64 },
    RegionXLit { view: usize, column: usize },
    Coverage { view: usize, refreshes: usize, illuminations: usize },
    OutOfOrder { phase: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::BacklightDuringRefresh { phase } => {
                write!(f, "phase {phase}: backlight lit during LCD refresh")
            }
            Violation::NonPositiveDuration { phase } => write!(f, "phase {phase}: duration is not positive"),
            Violation::PeriodMismatch { sum, frame_period } => {
                write!(f, "phase durations sum to {sum:e} s, frame period is {frame_period:e} s")
            }
            Violation::RegionXLit { view, column } => {
                write!(f, "view {view}: forbidden column {column} lit")
            }
            Violation::Coverage { view, refreshes, illuminations } => write!(
                f,
                "view {view}: refreshed {refreshes} times and illuminated {illuminations} times per frame"
            ),
            Violation::OutOfOrder { phase } => write!(f, "phase {phase}: out of refresh/illuminate order"),
        }
    }
}

/// Every rule a schedule must satisfy. `forbidden` pairs a view with the
/// columns that must stay dark while that view is illuminated.
pub fn validate(schedule: &FrameSchedule, forbidden: &[(usize, LedMask)]) -> Vec<Violation> {
    let mut out = Vec::new();
    let n = schedule.view_count;
    let mut refreshes = vec![0usize; n];
    let mut illuminations = vec![0usize; n];
    let mut sum = 0.0;

    for (i, phase) in schedule.phases.iter().enumerate() {
        if phase.kind.is_refresh() && !phase.mask.is_dark() {
            out.push(Violation::BacklightDuringRefresh { phase: i });
        }
        if !(phase.duration > 0.0) {
            out.push(Violation::NonPositiveDuration { phase: i });
        }
        sum += phase.duration;
        let expected = if i % 2 == 0 { PhaseKind::Refresh(i / 2) } else { PhaseKind::Illuminate(i / 2) };
        if phase.kind != expected {
            out.push(Violation::OutOfOrder { phase: i });
        }
        let view = phase.kind.view();
        let counter = if phase.kind.is_refresh() { &mut refreshes } else { &mut illuminations };
        match counter.get_mut(view) {
            Some(c) => *c += 1,
            None => out.push(Violation::Coverage {
                view,
                refreshes: phase.kind.is_refresh() as usize,
                illuminations: !phase.kind.is_refresh() as usize,
            }),
        }
    }

    if !((sum - schedule.frame_period).abs() <= PERIOD_TOLERANCE * schedule.frame_period.abs()) {
        out.push(Violation::PeriodMismatch { sum, frame_period: schedule.frame_period });
    }
    for view in 0..n {
        if refreshes[view] != 1 || illuminations[view] != 1 {
            out.push(Violation::Coverage { view, refreshes: refreshes[view], illuminations: illuminations[view] });
        }
    }
    for (view, mask) in forbidden {
        for phase in &schedule.phases {
            if phase.kind == PhaseKind::Illuminate(*view) {
                for column in phase.mask.intersection(mask).lit_columns() {
                    out.push(Violation::RegionXLit { view: *view, column });
                }
            }
        }
    }
    out
}
