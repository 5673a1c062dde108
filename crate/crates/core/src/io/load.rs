//! `datetime,load_kw` and `datetime,capacity_factor` CSV ingestion.

use chrono::{DateTime, NaiveDateTime};

use crate::error::{Error, Result};
use crate::model::LoadProfile;
use crate::simulator::WindSeries;

const FORMATS: [&str; 4] = [
    "%Y-%m-%dT%H:%M:%S%.f",
    "%Y-%m-%d %H:%M:%S%.f",
    "%Y-%m-%dT%H:%M",
    "%Y-%m-%d %H:%M",
];

/// Parses an ISO 8601 date-time. Offsets are accepted and dropped, keeping
/// the local wall-clock time.
pub fn parse_timestamp(text: &str) -> Option<NaiveDateTime> {
    let text = text.trim();
    FORMATS
        .iter()
        .find_map(|f| NaiveDateTime::parse_from_str(text, f).ok())
        .or_else(|| DateTime::parse_from_rfc3339(text).ok().map(|t| t.naive_local()))
}

/// Reads two-column CSV rows after checking the header. Returns
/// `(line, timestamp, value)` triples.
fn read_series(text: &str, value_column: &str) -> Result<Vec<(usize, NaiveDateTime, f64)>> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let headers = reader.headers().map_err(|e| Error::parse(1, e.to_string()))?.clone();
    let expected = ["datetime", value_column];
    if headers.len() != 2 || headers.iter().zip(expected).any(|(h, e)| h != e) {
        return Err(Error::parse(
            1,
            format!("expected header `datetime,{value_column}`, found `{}`", headers.iter().collect::<Vec<_>>().join(",")),
        ));
    }
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map(|p| p.line() as usize).unwrap_or(0);
            Error::parse(line, e.to_string())
        })?;
        let line = record.position().map(|p| p.line() as usize).unwrap_or(0);
        if record.len() != 2 {
            return Err(Error::parse(line, format!("expected 2 fields, found {}", record.len())));
        }
        let time = parse_timestamp(&record[0])
            .ok_or_else(|| Error::parse(line, format!("invalid timestamp {:?}", &record[0])))?;
        let value: f64 = record[1]
            .parse()
            .map_err(|_| Error::parse(line, format!("invalid number {:?}", &record[1])))?;
        if !value.is_finite() {
            return Err(Error::parse(line, format!("non-finite value {value}")));
        }
        if let Some((_, prev, _)) = rows.last() {
            if time <= *prev {
                return Err(Error::parse(line, format!("timestamp {time} is not after {prev}")));
            }
        }
        rows.push((line, time, value));
    }
    Ok(rows)
}

/// Each interval lasts until the next timestamp; the last one repeats the
/// preceding duration.
pub fn parse_load_profile(text: &str) -> Result<LoadProfile> {
    let rows = read_series(text, "load_kw")?;
    if rows.len() < 2 {
        return Err(Error::parse(
            rows.last().map(|r| r.0).unwrap_or(1),
            "load profile needs at least two rows",
        ));
    }
    if let Some((line, _, v)) = rows.iter().find(|r| r.2 < 0.0) {
        return Err(Error::parse(*line, format!("negative load {v}")));
    }
    let times: Vec<NaiveDateTime> = rows.iter().map(|r| r.1).collect();
    let mut durations: Vec<f64> = times
        .windows(2)
        .map(|w| (w[1] - w[0]).num_milliseconds() as f64 / 1000.0)
        .collect();
    durations.push(durations[durations.len() - 1]);
    LoadProfile::new(times, durations, rows.iter().map(|r| r.2).collect())
}

pub fn parse_wind_series(text: &str) -> Result<WindSeries> {
    let rows = read_series(text, "capacity_factor")?;
    if rows.is_empty() {
        return Err(Error::parse(1, "wind series has no rows"));
    }
    if let Some((line, _, v)) = rows.iter().find(|r| !(0.0..=1.0).contains(&r.2)) {
        return Err(Error::parse(*line, format!("capacity factor {v} outside [0, 1]")));
    }
    WindSeries::new(rows.iter().map(|r| r.1).collect(), rows.iter().map(|r| r.2).collect())
}

/// Serializes a load profile in the `datetime,load_kw` format.
pub fn load_profile_csv(load: &LoadProfile) -> String {
    let mut out = String::from("datetime,load_kw\n");
    for (t, p) in load.times().iter().zip(load.demand()) {
        out.push_str(&format!("{},{}\n", t.format("%Y-%m-%dT%H:%M:%S"), p));
    }
    out
}
