//! Result records and their JSON / CSV / text renderings.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::table::render_text_table;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Json,
    Csv,
    Table,
}

/// One evaluated or simulated policy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub policy: String,
    #[serde(rename = "T")]
    pub t: usize,
    #[serde(rename = "N")]
    pub n: Option<usize>,
    pub exact_value: Option<f64>,
    pub mc_estimate: Option<f64>,
    pub mc_stderr: Option<f64>,
    pub trials: Option<usize>,
    pub seed: Option<u64>,
}

/// Naive and optimal success with `T = N`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeedbackGainRow {
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "T")]
    pub t: usize,
    pub naive: f64,
    pub optimal: f64,
}

/// Optimal success for set size `T` and horizon `N`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SetSizeRow {
    #[serde(rename = "T")]
    pub t: usize,
    #[serde(rename = "N")]
    pub n: usize,
    pub optimal: f64,
}

/// Minimal expected arrival time for set size `T`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArrivalRow {
    #[serde(rename = "T")]
    pub t: usize,
    pub expected_arrival: f64,
}

pub fn to_csv<R: Serialize>(records: &[R]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in records {
        w.serialize(r)?;
    }
    let bytes = w.into_inner().map_err(|e| std::io::Error::other(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

/// Renders records as pretty JSON, CSV with a header, or an aligned text table.
pub fn render_records<R: Serialize>(records: &[R], format: OutputFormat) -> Result<String> {
    match format {
        OutputFormat::Json => Ok(serde_json::to_string_pretty(records)? + "\n"),
        OutputFormat::Csv => to_csv(records),
        OutputFormat::Table => {
            let csv_text = to_csv(records)?;
            let mut reader = csv::ReaderBuilder::new()
                .has_headers(false)
                .from_reader(csv_text.as_bytes());
            let mut lines = reader
                .records()
                .map(|r| r.map(|r| r.iter().map(String::from).collect::<Vec<_>>()))
                .collect::<Result<Vec<_>, _>>()?;
            if lines.is_empty() {
                return Ok(String::new());
            }
            let header = lines.remove(0);
            Ok(render_text_table(&header, &lines))
        }
    }
}
