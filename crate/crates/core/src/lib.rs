//! Simulation and scheduling for a time-multiplexed directional-backlight
//! autostereoscopic display.
//!
//! LED columns behind a linear lens array form exit pupils on the viewing
//! plane. [`optics`] picks the columns that aim those pupils at each eye,
//! [`schedule`] interleaves LCD refreshes with per-view illumination,
//! [`interleave`] lays the views out on panel sub-pixel columns and
//! [`viewsim`] renders what each eye ends up seeing.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod blur;
pub mod error;
pub mod format;
pub mod geometry;
pub mod interleave;
pub mod montecarlo;
pub mod optics;
pub mod pnm;
pub mod run;
pub mod scenario;
pub mod schedule;
pub mod trace;
pub mod viewsim;

pub use error::{Error, Result};
pub use geometry::{DisplayGeometry, Eye, LedMask, Side, Viewer};
pub use optics::IntensityProfile;
pub use scenario::{load_scenario, Scenario};
pub use schedule::{build_schedule, FrameSchedule, Mode};
