//! Plain-text recording, trial and average formats.
//!
//! Continuous recording:
//! ```text
//! rate_hz,256
//! channels,Fp1,AF7,...
//! 1.25,-0.5,...        one row per sample, one column per channel
//! ```
//! Events: rows `sample_index,condition,correct(0|1)`, optional header line.
//!
//! Trial and average files: a one-line JSON header followed by one row of
//! comma-separated values per channel.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::types::{ClassLabel, ContinuousRecording, Epoch, ErpAverage, Event, SamplingMeta};
use crate::error::{Error, Result};

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

pub(crate) fn write_file(path: &Path, contents: &[u8]) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
        }
    }
    fs::write(path, contents).map_err(|e| Error::io(path, e))
}

fn parse_f64(path: &Path, line: usize, s: &str) -> Result<f64> {
    let t = s.trim();
    if t.eq_ignore_ascii_case("nan") {
        return Ok(f64::NAN);
    }
    t.parse::<f64>()
        .map_err(|_| Error::parse(path, line, format!("not a number: '{t}'")))
}

fn parse_row(path: &Path, line: usize, s: &str) -> Result<Vec<f64>> {
    s.split(',').map(|v| parse_f64(path, line, v)).collect()
}

fn push_row(out: &mut String, row: &[f64]) {
    for (i, v) in row.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        write!(out, "{v}").unwrap();
    }
    out.push('\n');
}

/// Parses a continuous recording; events are attached separately.
pub fn parse_recording(path: &Path, text: &str) -> Result<ContinuousRecording> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (_, first) = lines
        .next()
        .ok_or_else(|| Error::parse(path, 1, "empty recording file"))?;
    let rate_hz = match first.split_once(',') {
        Some(("rate_hz", v)) => parse_f64(path, 1, v)?,
        _ => return Err(Error::parse(path, 1, "expected 'rate_hz,<value>'")),
    };
    let (ln, second) = lines
        .next()
        .ok_or_else(|| Error::parse(path, 2, "missing channels line"))?;
    let channels: Vec<String> = match second.split_once(',') {
        Some(("channels", rest)) => rest.split(',').map(|s| s.trim().to_string()).collect(),
        _ => return Err(Error::parse(path, ln + 1, "expected 'channels,<labels>'")),
    };
    let mut samples = vec![Vec::new(); channels.len()];
    for (ln, line) in lines {
        let mut n = 0;
        for (ch, v) in samples.iter_mut().zip(line.split(',')) {
            ch.push(parse_f64(path, ln + 1, v)?);
            n += 1;
        }
        if n != channels.len() || line.split(',').count() != channels.len() {
            return Err(Error::parse(
                path,
                ln + 1,
                format!("expected {} values per row", channels.len()),
            ));
        }
    }
    ContinuousRecording::new(channels, samples, rate_hz, Vec::new())
}

pub fn format_recording(rec: &ContinuousRecording, decimals: Option<usize>) -> String {
    let mut out = String::with_capacity(rec.len() * rec.channels.len() * 8);
    writeln!(out, "rate_hz,{}", rec.rate_hz).unwrap();
    writeln!(out, "channels,{}", rec.channels.join(",")).unwrap();
    for i in 0..rec.len() {
        for (c, ch) in rec.samples.iter().enumerate() {
            if c > 0 {
                out.push(',');
            }
            match decimals {
                Some(d) => write!(out, "{:.*}", d, ch[i]).unwrap(),
                None => write!(out, "{}", ch[i]).unwrap(),
            }
        }
        out.push('\n');
    }
    out
}

pub fn parse_events(path: &Path, text: &str) -> Result<Vec<Event>> {
    let mut events = Vec::new();
    for (ln, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != 3 {
            return Err(Error::parse(path, ln + 1, "expected sample_index,condition,correct"));
        }
        let Ok(sample_index) = fields[0].parse::<usize>() else {
            if ln == 0 {
                continue; // header
            }
            return Err(Error::parse(path, ln + 1, format!("bad sample index '{}'", fields[0])));
        };
        let behavioral_correct = match fields[2] {
            "1" => true,
            "0" => false,
            other => {
                return Err(Error::parse(
                    path,
                    ln + 1,
                    format!("correct must be 0 or 1, got '{other}'"),
                ))
            }
        };
        events.push(Event {
            sample_index,
            condition: fields[1].to_string(),
            behavioral_correct,
        });
    }
    Ok(events)
}

pub fn format_events(events: &[Event]) -> String {
    let mut out = String::from("sample_index,condition,correct\n");
    for e in events {
        writeln!(
            out,
            "{},{},{}",
            e.sample_index,
            e.condition,
            u8::from(e.behavioral_correct)
        )
        .unwrap();
    }
    out
}

/// Loads `<stem>.csv` and `<stem>.events.csv`.
pub fn load_recording(recording: &Path, events: &Path) -> Result<ContinuousRecording> {
    let mut rec = parse_recording(recording, &read(recording)?)?;
    rec.events = parse_events(events, &read(events)?)?;
    rec.validate()?;
    Ok(rec)
}

pub fn save_recording(
    rec: &ContinuousRecording,
    recording: &Path,
    events: &Path,
    decimals: Option<usize>,
) -> Result<()> {
    write_file(recording, format_recording(rec, decimals).as_bytes())?;
    write_file(events, format_events(&rec.events).as_bytes())
}

#[derive(Debug, Serialize, Deserialize)]
struct TrialHeader {
    rate_hz: f64,
    pre_stimulus_samples: usize,
    post_stimulus_samples: usize,
    condition: String,
    correct: bool,
    channels: Vec<String>,
}

#[derive(Debug, Serialize, Deserialize)]
struct AverageHeader {
    subject_id: String,
    class_label: Option<ClassLabel>,
    n_trials: usize,
    rate_hz: f64,
    pre_stimulus_samples: usize,
    post_stimulus_samples: usize,
    channels: Vec<String>,
}

fn split_header<'a>(path: &Path, text: &'a str) -> Result<(&'a str, Vec<(usize, &'a str)>)> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (_, header) = lines.next().ok_or_else(|| Error::parse(path, 1, "empty file"))?;
    Ok((header, lines.collect()))
}

fn parse_matrix(path: &Path, rows: &[(usize, &str)], channels: usize, width: usize) -> Result<Vec<Vec<f64>>> {
    if rows.len() != channels {
        return Err(Error::parse(
            path,
            1,
            format!("expected {channels} channel rows, found {}", rows.len()),
        ));
    }
    rows.iter()
        .map(|&(ln, l)| {
            let row = parse_row(path, ln + 1, l)?;
            if row.len() != width {
                return Err(Error::parse(
                    path,
                    ln + 1,
                    format!("expected {width} samples, found {}", row.len()),
                ));
            }
            Ok(row)
        })
        .collect()
}

pub fn parse_trial(path: &Path, text: &str) -> Result<Epoch> {
    let (header, rows) = split_header(path, text)?;
    let h: TrialHeader =
        serde_json::from_str(header).map_err(|e| Error::parse(path, 1, format!("bad trial header: {e}")))?;
    let meta = SamplingMeta::new(h.rate_hz, h.pre_stimulus_samples, h.post_stimulus_samples)?;
    let values = parse_matrix(path, &rows, h.channels.len(), meta.epoch_len())?;
    Epoch::new(h.channels, values, meta, h.condition, h.correct)
}

pub fn format_trial(epoch: &Epoch) -> String {
    let header = TrialHeader {
        rate_hz: epoch.meta.rate_hz,
        pre_stimulus_samples: epoch.meta.pre_stimulus_samples,
        post_stimulus_samples: epoch.meta.post_stimulus_samples,
        condition: epoch.condition_tag.clone(),
        correct: epoch.behavioral_correct,
        channels: epoch.channels.clone(),
    };
    let mut out = serde_json::to_string(&header).expect("header serialises");
    out.push('\n');
    for row in &epoch.channel_values {
        push_row(&mut out, row);
    }
    out
}

/// Loads every `*.csv` trial file in `dir`, in file-name order.
pub fn load_trial_dir(dir: &Path) -> Result<Vec<Epoch>> {
    let mut paths: Vec<_> = fs::read_dir(dir)
        .map_err(|e| Error::io(dir, e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "csv"))
        .collect();
    paths.sort();
    paths.iter().map(|p| parse_trial(p, &read(p)?)).collect()
}

pub fn parse_average(path: &Path, text: &str) -> Result<ErpAverage> {
    let (header, rows) = split_header(path, text)?;
    let h: AverageHeader =
        serde_json::from_str(header).map_err(|e| Error::parse(path, 1, format!("bad average header: {e}")))?;
    let meta = SamplingMeta::new(h.rate_hz, h.pre_stimulus_samples, h.post_stimulus_samples)?;
    let values = parse_matrix(path, &rows, h.channels.len(), meta.epoch_len())?;
    Ok(ErpAverage {
        channels: h.channels,
        channel_values: values,
        meta,
        n_trials: h.n_trials,
        subject_id: h.subject_id,
        class_label: h.class_label,
    })
}

pub fn format_average(erp: &ErpAverage) -> String {
    let header = AverageHeader {
        subject_id: erp.subject_id.clone(),
        class_label: erp.class_label,
        n_trials: erp.n_trials,
        rate_hz: erp.meta.rate_hz,
        pre_stimulus_samples: erp.meta.pre_stimulus_samples,
        post_stimulus_samples: erp.meta.post_stimulus_samples,
        channels: erp.channels.clone(),
    };
    let mut out = serde_json::to_string(&header).expect("header serialises");
    out.push('\n');
    for row in &erp.channel_values {
        push_row(&mut out, row);
    }
    out
}

pub fn load_average(path: &Path) -> Result<ErpAverage> {
    parse_average(path, &read(path)?)
}
