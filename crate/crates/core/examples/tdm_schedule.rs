//! Per-eye field sequence for one viewer, checked and dumped as a VCD trace
//! on stdout (pipe it into a waveform viewer).

use std::io::Write;

use tdm3d::optics::select_columns;
use tdm3d::schedule::{build_schedule, Mode, DEFAULT_REFRESH_FRACTION};
use tdm3d::trace::{export_trace, TraceFormat};
use tdm3d::{DisplayGeometry, Viewer};

fn main() -> tdm3d::Result<()> {
    let g = DisplayGeometry::prototype_27in();
    let v = Viewer::centered(0, 0.0, 1.0, 0.063);
    let masks = [select_columns(&g, &v.left)?, select_columns(&g, &v.right)?];
    let s = build_schedule(Mode::PerEye, &masks, g.panel_field_rate, DEFAULT_REFRESH_FRACTION)?;
    eprintln!(
        "{} phases, frame {:.3} ms, {} Hz per eye, violations: {}",
        s.phases().len(),
        s.frame_period() * 1e3,
        s.effective_view_rate(),
        s.validate(&[]).len()
    );
    std::io::stdout().write_all(&export_trace(&s, 2, TraceFormat::Vcd))?;
    Ok(())
}
