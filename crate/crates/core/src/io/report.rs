//! Experiment records as CSV rows or JSON objects.

use std::io::Write;

use serde::Serialize;

use crate::bipoint::BiPoint;
use crate::error::Result;
use crate::rounding::PseudoSolution;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Exact,
    Bipoint,
    Pseudo,
    Pipeline,
}

/// One CSV row; field order is the column order.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ExperimentRecord {
    pub instance_name: String,
    #[serde(rename = "nF")]
    pub n_f: usize,
    #[serde(rename = "nC")]
    pub n_c: usize,
    pub k: usize,
    pub method: Method,
    pub cost: f64,
    pub opened: usize,
    pub ratio_vs_opt: Option<f64>,
    pub seed: u64,
    pub time_ms: Option<u64>,
}

pub const CSV_COLUMNS: [&str; 10] = [
    "instanceName",
    "nF",
    "nC",
    "k",
    "method",
    "cost",
    "opened",
    "ratioVsOpt",
    "seed",
    "timeMs",
];

/// Bi-point and dispatch details kept alongside a record.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Audit {
    pub regime: Option<&'static str>,
    pub a: f64,
    pub b: f64,
    pub d1: f64,
    pub d2: f64,
    pub lambda1: f64,
    pub lambda2: f64,
    pub additive_budget: Option<usize>,
    pub t_full: Option<usize>,
    pub t_enum: Option<usize>,
    pub heuristic_t: Option<bool>,
    pub open: Vec<usize>,
}

impl Audit {
    pub fn from_bipoint(bp: &BiPoint, open: Vec<usize>) -> Self {
        Audit {
            regime: None,
            a: bp.a,
            b: bp.b,
            d1: bp.d1,
            d2: bp.d2,
            lambda1: bp.lambda1,
            lambda2: bp.lambda2,
            additive_budget: None,
            t_full: None,
            t_enum: None,
            heuristic_t: None,
            open,
        }
    }

    pub fn from_pseudo(p: &PseudoSolution, open: Vec<usize>) -> Self {
        Audit {
            regime: Some(p.outcome.regime.as_str()),
            additive_budget: Some(p.outcome.additive_budget),
            ..Audit::from_bipoint(&p.bipoint, open)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Row {
    #[serde(flatten)]
    pub record: ExperimentRecord,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub audit: Option<Audit>,
}

/// `cost / opt`; a zero optimum gives 1 for a zero cost and infinity otherwise.
pub fn ratio(cost: f64, opt: f64) -> f64 {
    if opt > 0.0 {
        cost / opt
    } else if cost <= 0.0 {
        1.0
    } else {
        f64::INFINITY
    }
}

pub fn write_csv(rows: &[Row], out: &mut dyn Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    if rows.is_empty() {
        w.write_record(CSV_COLUMNS).map_err(csv_error)?;
    }
    for row in rows {
        w.serialize(&row.record).map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_json(rows: &[Row], out: &mut dyn Write) -> Result<()> {
    serde_json::to_writer_pretty(&mut *out, rows).map_err(std::io::Error::from)?;
    writeln!(out)?;
    Ok(())
}

fn csv_error(e: csv::Error) -> std::io::Error {
    std::io::Error::other(e)
}
