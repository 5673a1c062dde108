//! Result tables: CSV and JSON export, CSV import for re-filtering.

use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::dominance::lexicographic;
use crate::error::{Error, Result};
use crate::model::{DesignSpace, EvaluatedDesign, MicrogridDesign};
use crate::search::{SearchReport, StageReport};

pub const DEFICIT_COLUMN: &str = "sizing_grid_deficit_ratio";
const UNUSED_SUFFIX: &str = "_unused_ratio";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(Error::invalid(format!("unknown format {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub capacities: Vec<f64>,
    pub deficit_ratio: f64,
    pub unused_ratios: Vec<f64>,
}

impl From<&EvaluatedDesign> for ResultRow {
    fn from(e: &EvaluatedDesign) -> Self {
        ResultRow {
            capacities: e.capacities().to_vec(),
            deficit_ratio: e.deficit_ratio,
            unused_ratios: e.unused_ratios.clone(),
        }
    }
}

impl From<ResultRow> for EvaluatedDesign {
    fn from(row: ResultRow) -> Self {
        EvaluatedDesign {
            design: MicrogridDesign::new(row.capacities),
            deficit_ratio: row.deficit_ratio,
            unused_ratios: row.unused_ratios,
        }
    }
}

/// Column labels: one capacity and one unused-ratio column per DER.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultColumns {
    pub capacity: Vec<String>,
    pub unused: Vec<String>,
}

fn slug(name: &str) -> String {
    name.trim()
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() { c.to_ascii_lowercase() } else { '_' })
        .collect()
}

impl ResultColumns {
    pub fn for_space(space: &DesignSpace) -> Self {
        ResultColumns {
            capacity: space
                .ders()
                .iter()
                .map(|d| format!("{}_{}", slug(&d.name), d.kind.unit()))
                .collect(),
            unused: space
                .ders()
                .iter()
                .map(|d| format!("{}{UNUSED_SUFFIX}", slug(&d.name)))
                .collect(),
        }
    }

    pub fn header(&self) -> Vec<String> {
        let mut h = self.capacity.clone();
        h.push(DEFICIT_COLUMN.to_string());
        h.extend(self.unused.iter().cloned());
        h
    }
}

/// Up to four decimals, trailing zeros dropped.
pub fn format_capacity(value: f64) -> String {
    let s = format!("{value:.4}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".to_string()
    } else {
        s.to_string()
    }
}

pub fn format_ratio(value: f64) -> String {
    // Adding zero clears the sign of a negative zero.
    format!("{:.4}", value + 0.0)
}

fn sorted_rows(designs: &[EvaluatedDesign]) -> Vec<ResultRow> {
    let mut sorted: Vec<&EvaluatedDesign> = designs.iter().collect();
    sorted.sort_by(|a, b| lexicographic(a, b));
    sorted.into_iter().map(ResultRow::from).collect()
}

pub fn render_csv(columns: &ResultColumns, designs: &[EvaluatedDesign]) -> Result<String> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer.write_record(columns.header())?;
    for row in sorted_rows(designs) {
        let mut record: Vec<String> = row.capacities.iter().map(|&c| format_capacity(c)).collect();
        record.push(format_ratio(row.deficit_ratio));
        record.extend(row.unused_ratios.iter().map(|&r| format_ratio(r)));
        writer.write_record(&record)?;
    }
    let bytes = writer.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

/// Parses a results CSV produced by [`render_csv`].
pub fn parse_results_csv(text: &str) -> Result<(ResultColumns, Vec<ResultRow>)> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
    let header: Vec<String> = reader
        .headers()
        .map_err(|e| Error::parse(1, e.to_string()))?
        .iter()
        .map(str::to_string)
        .collect();
    let split = header
        .iter()
        .position(|h| h == DEFICIT_COLUMN)
        .ok_or_else(|| Error::parse(1, format!("missing {DEFICIT_COLUMN} column")))?;
    let columns = ResultColumns {
        capacity: header[..split].to_vec(),
        unused: header[split + 1..].to_vec(),
    };
    if columns.capacity.is_empty() || columns.capacity.len() != columns.unused.len() {
        return Err(Error::parse(1, "expected one capacity and one unused-ratio column per DER"));
    }
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| {
            Error::parse(e.position().map(|p| p.line() as usize).unwrap_or(0), e.to_string())
        })?;
        let line = record.position().map(|p| p.line() as usize).unwrap_or(0);
        let values = record
            .iter()
            .map(|f| f.parse::<f64>().map_err(|_| Error::parse(line, format!("invalid number {f:?}"))))
            .collect::<Result<Vec<_>>>()?;
        rows.push(ResultRow {
            capacities: values[..split].to_vec(),
            deficit_ratio: values[split],
            unused_ratios: values[split + 1..].to_vec(),
        });
    }
    Ok((columns, rows))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JsonDer {
    pub name: String,
    pub kind: String,
    pub capacity_column: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JsonReport {
    pub ders: Vec<JsonDer>,
    pub rows: Vec<ResultRow>,
    pub total_simulations: usize,
    pub per_stage_counts: Vec<StageReport>,
    pub seed: u64,
    pub elapsed_seconds: f64,
}

pub fn render_json(space: &DesignSpace, report: &SearchReport) -> Result<String> {
    let columns = ResultColumns::for_space(space);
    let doc = JsonReport {
        ders: space
            .ders()
            .iter()
            .zip(&columns.capacity)
            .map(|(d, c)| JsonDer {
                name: d.name.clone(),
                kind: d.kind.to_string(),
                capacity_column: c.clone(),
            })
            .collect(),
        rows: sorted_rows(&report.final_designs),
        total_simulations: report.all_simulated,
        per_stage_counts: report.stages.clone(),
        seed: report.seed,
        elapsed_seconds: report.elapsed.as_secs_f64(),
    };
    let mut text = serde_json::to_string_pretty(&doc)?;
    text.push('\n');
    Ok(text)
}

pub fn render(space: &DesignSpace, report: &SearchReport, format: Format) -> Result<String> {
    match format {
        Format::Csv => render_csv(&ResultColumns::for_space(space), &report.final_designs),
        Format::Json => render_json(space, report),
    }
}

/// Writes through a temporary file in the target directory and renames it
/// into place, so readers never see a partial file.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents.as_bytes())?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}

pub fn write_report(space: &DesignSpace, report: &SearchReport, format: Format, path: &Path) -> Result<()> {
    if report.final_designs.is_empty() {
        log::warn!("no designs passed the final filter; writing an empty table");
    }
    write_atomic(path, &render(space, report, format)?)
}
