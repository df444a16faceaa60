//! CSV and JSON artifacts. Floats are written with Rust's shortest
//! round-trip formatting, so equal inputs give byte-identical files.

use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use oscilla_core::criteria::CriterionReport;
use oscilla_core::gaps::GapRecord;
use oscilla_core::spectral::{IndexCount, SpectralEstimate};
use oscilla_core::volterra::SolutionTrack;
use serde::Serialize;

pub const TRACK_HEADER: [&str; 5] = ["t", "z", "flux", "y", "is_near_zero"];
pub const ZEROS_HEADER: [&str; 4] = ["index", "location", "bracket_width", "ratio"];
pub const CRITICAL_HEADER: [&str; 5] = ["t", "chi", "chi_f", "chi_tilde_f", "tail_integral"];
pub const CRITERIA_SERIES_HEADER: [&str; 3] = ["id", "t", "value"];
pub const GAPS_HEADER: [&str; 11] = [
    "tau", "T1", "T2", "ratio", "g3", "g1", "g2", "g3p", "g1p", "g2p", "bound",
];
pub const SPECTRAL_HEADER: [&str; 6] = ["R", "lower", "upper", "fd", "constant", "c_star"];
pub const INDEX_HEADER: [&str; 4] = ["r", "count", "rate", "predicted_rate"];
pub const VERIFY_HEADER: [&str; 4] = ["criterion", "name", "status", "detail"];

pub fn num(x: f64) -> String {
    format!("{x}")
}

pub fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

pub fn write_csv<I>(path: &Path, header: &[&str], rows: I) -> Result<()>
where
    I: IntoIterator<Item = Vec<String>>,
{
    let mut w = csv::Writer::from_path(path).with_context(|| format!("cannot create {}", path.display()))?;
    w.write_record(header)?;
    for r in rows {
        debug_assert_eq!(r.len(), header.len());
        w.write_record(&r)?;
    }
    w.flush().with_context(|| format!("cannot write {}", path.display()))?;
    Ok(())
}

/// Track rows. `track` must carry Riccati values.
pub fn track_rows(track: &SolutionTrack, stride: usize) -> Vec<Vec<String>> {
    let n = track.len();
    let mut idx: Vec<usize> = (0..n).step_by(stride.max(1)).collect();
    if n > 0 && idx.last() != Some(&(n - 1)) {
        idx.push(n - 1);
    }
    idx.into_iter()
        .map(|i| {
            vec![
                num(track.t(i)),
                num(track.z(i)),
                num(track.flux(i)),
                opt(track.riccati.get(i).copied().flatten()),
                track.near_zero.get(i).copied().unwrap_or(false).to_string(),
            ]
        })
        .collect()
}

/// Zero rows; `ratio` is the quotient of consecutive locations.
pub fn zero_rows(track: &SolutionTrack) -> Vec<Vec<String>> {
    let mut prev: Option<f64> = None;
    track
        .zeros
        .iter()
        .enumerate()
        .map(|(k, z)| {
            let r = prev.map(|p| z.location / p);
            prev = Some(z.location);
            vec![(k + 1).to_string(), num(z.location), num(z.bracket_width()), opt(r)]
        })
        .collect()
}

pub fn gap_rows(records: &[GapRecord], bound: Option<f64>) -> Vec<Vec<String>> {
    records
        .iter()
        .map(|r| {
            let mut row = vec![num(r.tau), num(r.t1), num(r.t2), num(r.ratio())];
            row.extend(r.lengths.iter().map(|x| num(*x)));
            row.push(opt(bound));
            row
        })
        .collect()
}

pub fn spectral_row(e: &SpectralEstimate) -> Vec<String> {
    vec![
        num(e.r),
        opt(e.model_lower_bound),
        opt(e.upper_bound),
        opt(e.fd_oracle_value),
        opt(e.asymptotic_constant),
        opt(e.params.c_star),
    ]
}

pub fn index_rows(counts: &[IndexCount]) -> Vec<Vec<String>> {
    counts
        .iter()
        .map(|c| vec![num(c.r), c.count.to_string(), num(c.rate), num(c.predicted_rate)])
        .collect()
}

pub fn series_rows(reports: &[CriterionReport]) -> Vec<Vec<String>> {
    reports
        .iter()
        .flat_map(|r| {
            r.series
                .iter()
                .map(move |(t, x)| vec![r.id.to_string(), num(*t), num(*x)])
        })
        .collect()
}

/// JSON mirror of a criterion report. Non-finite numbers become strings.
#[derive(Serialize)]
struct ReportJson<'a> {
    id: &'a str,
    verdict: &'a str,
    branch: &'a str,
    lhs: serde_json::Value,
    rhs: serde_json::Value,
    error_bar: serde_json::Value,
    t_start: serde_json::Value,
    t_end: serde_json::Value,
    horizon: serde_json::Value,
    r_bar: serde_json::Value,
    c: serde_json::Value,
    notes: &'a [String],
}

fn json_num(x: f64) -> serde_json::Value {
    serde_json::Number::from_f64(x)
        .map(serde_json::Value::Number)
        .unwrap_or_else(|| serde_json::Value::String(num(x)))
}

fn json_opt(x: Option<f64>) -> serde_json::Value {
    x.map(json_num).unwrap_or(serde_json::Value::Null)
}

pub fn write_criteria_json(path: &Path, reports: &[CriterionReport]) -> Result<()> {
    let items: Vec<ReportJson> = reports
        .iter()
        .map(|r| ReportJson {
            id: r.id,
            verdict: r.verdict.as_str(),
            branch: r.branch.as_str(),
            lhs: json_num(r.lhs),
            rhs: json_num(r.rhs),
            error_bar: json_num(r.error_bar),
            t_start: json_num(r.params.t_start),
            t_end: json_num(r.params.t_end),
            horizon: json_num(r.params.horizon),
            r_bar: json_opt(r.params.r_bar),
            c: json_opt(r.params.c),
            notes: &r.notes,
        })
        .collect();
    let mut text = serde_json::to_string_pretty(&items)?;
    text.push('\n');
    fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
}
