//! Serialized shapes of reports. Floats go through serde_json / `Display`,
//! both of which print the shortest string that reads back to the same bits.

use serde::Serialize;

use pccsens::datagen::{BenchCell, BenchReport};
use pccsens::oracle::OracleReport;
use pccsens::{PWitness, Record, Report};

#[derive(Debug, Serialize)]
pub struct WitnessR {
    pub x: f64,
    pub y: f64,
    pub label: &'static str,
    pub r_aug: f64,
}

#[derive(Debug, Serialize)]
pub struct WitnessP {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub y: Option<f64>,
    pub label: &'static str,
    pub p_aug: f64,
}

#[derive(Debug, Serialize)]
pub struct CandidateOut {
    pub x: f64,
    pub y: f64,
    pub label: &'static str,
    pub r_aug: f64,
    pub p_aug: f64,
}

#[derive(Debug, Serialize)]
pub struct ReportOut {
    pub r: f64,
    pub p: f64,
    pub delta_r: f64,
    pub delta_p: f64,
    pub straddle: bool,
    pub witness_r: WitnessR,
    pub witness_p: WitnessP,
    pub candidates: Vec<CandidateOut>,
}

impl From<&Report> for ReportOut {
    fn from(rep: &Report) -> Self {
        let witness_p = match rep.witness_p {
            PWitness::Candidate { point, label, p_aug } => WitnessP {
                x: Some(point.x),
                y: Some(point.y),
                label: label.as_str(),
                p_aug,
            },
            PWitness::Stationary => WitnessP {
                x: None,
                y: None,
                label: "stationary",
                p_aug: 1.0,
            },
        };
        ReportOut {
            r: rep.r_current,
            p: rep.p_current,
            delta_r: rep.delta_r,
            delta_p: rep.delta_p,
            straddle: rep.straddle,
            witness_r: WitnessR {
                x: rep.witness_r.point.x,
                y: rep.witness_r.point.y,
                label: rep.witness_r.label.as_str(),
                r_aug: rep.witness_r.r_aug,
            },
            witness_p,
            candidates: rep
                .candidates
                .iter()
                .map(|c| CandidateOut {
                    x: c.point.x,
                    y: c.point.y,
                    label: c.label.as_str(),
                    r_aug: c.r_aug,
                    p_aug: c.p_aug,
                })
                .collect(),
        }
    }
}

/// One NDJSON line of `stream`. Rows that arrive before a report can be
/// formed carry `report_before: null` and a `status` saying why.
#[derive(Debug, Serialize)]
pub struct StreamOut {
    pub index: u64,
    pub x: f64,
    pub y: f64,
    pub status: &'static str,
    pub report_before: Option<ReportOut>,
    pub observed_delta_r: Option<f64>,
    pub within_prediction: Option<bool>,
    pub point_in_region: bool,
}

impl From<&Record> for StreamOut {
    fn from(rec: &Record) -> Self {
        StreamOut {
            index: rec.index,
            x: rec.point.x,
            y: rec.point.y,
            status: "ok",
            report_before: Some(ReportOut::from(&rec.report_before)),
            observed_delta_r: Some(rec.observed_delta_r),
            within_prediction: Some(rec.within_prediction),
            point_in_region: rec.point_in_region,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct PointOut {
    pub x: f64,
    pub y: f64,
}

#[derive(Debug, Serialize)]
pub struct OracleOut {
    pub grid_resolution: usize,
    pub grid_delta_r: f64,
    pub grid_delta_p: f64,
    pub grid_witness: PointOut,
    pub grid_min_abs_r: f64,
    pub grid_straddle: bool,
    pub engine_delta_r: f64,
    pub engine_delta_p: f64,
    pub agree_within: f64,
}

impl From<&OracleReport> for OracleOut {
    fn from(o: &OracleReport) -> Self {
        OracleOut {
            grid_resolution: o.grid_resolution,
            grid_delta_r: o.grid_delta_r,
            grid_delta_p: o.grid_delta_p,
            grid_witness: PointOut {
                x: o.grid_witness.x,
                y: o.grid_witness.y,
            },
            grid_min_abs_r: o.grid_min_abs_r,
            grid_straddle: o.grid_straddle,
            engine_delta_r: o.engine_delta_r,
            engine_delta_p: o.engine_delta_p,
            agree_within: o.agree_within,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct CellOut {
    pub kind: &'static str,
    pub size: usize,
    pub trials: usize,
    pub agree: usize,
    pub agreement_rate: f64,
    pub max_rel_gap: f64,
    pub resamples: usize,
}

impl From<&BenchCell> for CellOut {
    fn from(c: &BenchCell) -> Self {
        CellOut {
            kind: c.kind.as_str(),
            size: c.size,
            trials: c.trials,
            agree: c.agree_count,
            agreement_rate: c.agreement_rate,
            max_rel_gap: c.max_rel_gap,
            resamples: c.resamples,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct BenchOut {
    pub seed: u64,
    pub grid_resolution: usize,
    pub rel_tol: f64,
    pub trials: usize,
    pub agree: usize,
    pub agreement_rate: f64,
    pub resamples: usize,
    pub cells: Vec<CellOut>,
}

impl From<&BenchReport> for BenchOut {
    fn from(b: &BenchReport) -> Self {
        BenchOut {
            seed: b.config.seed,
            grid_resolution: b.config.grid_resolution,
            rel_tol: b.config.rel_tol,
            trials: b.total_trials(),
            agree: b.total_agree(),
            agreement_rate: b.overall_agreement(),
            resamples: b.total_resamples(),
            cells: b.cells.iter().map(CellOut::from).collect(),
        }
    }
}
