//! Change-event traces of a running schedule, exported as CSV or as a
//! value-change dump for waveform viewers.

use std::fmt::Write as _;

use crate::format::sci9;
use crate::geometry::LedMask;
use crate::schedule::{FrameSchedule, LcdState};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TraceFormat {
    Csv,
    Vcd,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TraceEvent {
    pub time: f64,
    pub mask: LedMask,
    pub lcd_state: LcdState,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScheduleTrace {
    pub events: Vec<TraceEvent>,
    /// Time at which the last cycle ends.
    pub end: f64,
}

impl ScheduleTrace {
    /// One event per phase start over `cycles` frames.
    pub fn new(schedule: &FrameSchedule, cycles: usize) -> Self {
        let period = schedule.frame_period();
        let mut events = Vec::with_capacity(cycles * schedule.phases().len());
        for cycle in 0..cycles {
            let offset = cycle as f64 * period;
            for (phase, start) in schedule.phases().iter().zip(schedule.phase_starts()) {
                events.push(TraceEvent { time: offset + start, mask: phase.mask.clone(), lcd_state: phase.kind.into() });
            }
        }
        ScheduleTrace { events, end: cycles as f64 * period }
    }
}

/// Serializes `cycles` frames of `schedule`. Output depends only on the
/// schedule, so equal inputs give identical bytes.
pub fn export_trace(schedule: &FrameSchedule, cycles: usize, format: TraceFormat) -> Vec<u8> {
    let trace = ScheduleTrace::new(schedule, cycles.max(1));
    match format {
        TraceFormat::Csv => to_csv(&trace).into_bytes(),
        TraceFormat::Vcd => to_vcd(schedule, &trace).into_bytes(),
    }
}

fn to_csv(trace: &ScheduleTrace) -> String {
    let mut out = String::from("t_s,lcd_state,mask_hex\n");
    for e in &trace.events {
        let _ = writeln!(out, "{},{},{}", sci9(e.time), e.lcd_state, e.mask.to_hex());
    }
    out
}

fn micros(t: f64) -> u64 {
    (t * 1e6).round() as u64
}

fn to_vcd(schedule: &FrameSchedule, trace: &ScheduleTrace) -> String {
    let columns = schedule.phases().first().map_or(0, |p| p.mask.len());
    let states = 2 * schedule.view_count() as u64;
    let width = (u64::BITS - (states - 1).max(1).leading_zeros()) as usize;

    let mut out = String::new();
    let _ = writeln!(out, "$comment frame_period {} s $end", sci9(schedule.frame_period()));
    let _ = writeln!(out, "$comment lcd = 2*view + hold (0 refreshing, 1 holding) $end");
    out.push_str("$timescale 1us $end\n$scope module backlight $end\n");
    for c in 0..columns {
        let _ = writeln!(out, "$var wire 1 led{c} led{c} $end");
    }
    let _ = writeln!(out, "$var reg {width} lcd lcd_state $end");
    out.push_str("$upscope $end\n$enddefinitions $end\n");

    let Some(first) = trace.events.first() else {
        return out;
    };
    out.push_str("#0\n$dumpvars\n");
    for c in 0..columns {
        let _ = writeln!(out, "{}led{c}", first.mask.get(c) as u8);
    }
    let _ = writeln!(out, "b{:b} lcd", first.lcd_state.code());
    out.push_str("$end\n");

    let mut mask = first.mask.clone();
    let mut lcd = first.lcd_state.code();
    let mut i = 1;
    while i < trace.events.len() {
        let stamp = micros(trace.events[i].time);
        // events that round onto the same microsecond collapse to the last one
        let mut j = i;
        while j + 1 < trace.events.len() && micros(trace.events[j + 1].time) == stamp {
            j += 1;
        }
        let e = &trace.events[j];
        let mut body = String::new();
        for c in 0..columns {
            if e.mask.get(c) != mask.get(c) {
                let _ = writeln!(body, "{}led{c}", e.mask.get(c) as u8);
            }
        }
        if e.lcd_state.code() != lcd {
            let _ = writeln!(body, "b{:b} lcd", e.lcd_state.code());
        }
        if !body.is_empty() {
            let _ = writeln!(out, "#{stamp}");
            out.push_str(&body);
        }
        mask = e.mask.clone();
        lcd = e.lcd_state.code();
        i = j + 1;
    }
    let _ = writeln!(out, "#{}", micros(trace.end));
    out
}
