use std::cmp::Ordering;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::inversion::SolverKind;
use crate::{Error, Result};

pub const CSV_HEADER: &str = "solver,n,k,r,sigma,trial,rel_error,success,stop_degree,alpha,wall_ms,seed";

/// One solver run on one trial. `rel_error` and `alpha` are NaN when the
/// solver returned no estimate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub solver: SolverKind,
    pub n: usize,
    pub k: usize,
    pub r: usize,
    pub sigma: f64,
    pub trial: usize,
    pub rel_error: f64,
    pub success: bool,
    pub stop_degree: Option<usize>,
    pub alpha: f64,
    pub wall_ms: Option<f64>,
    pub seed: u64,
}

impl ResultRow {
    fn canonical_cmp(&self, other: &Self) -> Ordering {
        (self.solver, self.n, self.k, self.r)
            .cmp(&(other.solver, other.n, other.k, other.r))
            .then(self.sigma.total_cmp(&other.sigma))
            .then(self.trial.cmp(&other.trial))
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ResultTable {
    pub rows: Vec<ResultRow>,
}

impl ResultTable {
    /// Sorts into (solver, n, k, r, sigma, trial) order.
    pub fn new(mut rows: Vec<ResultRow>) -> Self {
        rows.sort_by(ResultRow::canonical_cmp);
        Self { rows }
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn write_csv<W: std::io::Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        for row in &self.rows {
            out.serialize(row)?;
        }
        if self.rows.is_empty() {
            out.write_record(CSV_HEADER.split(','))?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        String::from_utf8(buf).map_err(|e| Error::Schema(e.to_string()))
    }

    pub fn read_csv<R: std::io::Read>(r: R) -> Result<Self> {
        let mut rdr = csv::Reader::from_reader(r);
        let header: Vec<String> = rdr.headers()?.iter().map(str::to_owned).collect();
        if header.join(",") != CSV_HEADER {
            return Err(Error::Schema(format!("unexpected CSV header {:?}", header.join(","))));
        }
        let rows = rdr.deserialize().collect::<std::result::Result<Vec<ResultRow>, _>>()?;
        Ok(Self::new(rows))
    }

    pub fn from_csv_path(path: &Path) -> Result<Self> {
        Self::read_csv(std::fs::File::open(path)?)
    }
}

/// Per-(solver, k, sigma) view. Quartiles use linear interpolation between
/// order statistics (`h = (m-1)p`, the "type 7" rule) with failed solves
/// counted as `+inf`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CellSummary {
    pub solver: SolverKind,
    pub n: usize,
    pub k: usize,
    pub r: usize,
    pub sigma: f64,
    pub trials: usize,
    pub successes: usize,
    pub success_rate: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Summary {
    pub cells: Vec<CellSummary>,
}

impl Summary {
    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn solvers(&self) -> Vec<SolverKind> {
        let mut v: Vec<SolverKind> = self.cells.iter().map(|c| c.solver).collect();
        v.sort();
        v.dedup();
        v
    }

    pub fn sigmas(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self.cells.iter().map(|c| c.sigma).collect();
        v.sort_by(f64::total_cmp);
        v.dedup();
        v
    }

    pub fn cell(&self, solver: SolverKind, k: usize, sigma: f64) -> Option<&CellSummary> {
        self.cells.iter().find(|c| c.solver == solver && c.k == k && c.sigma == sigma)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Type-7 quantile of an ascending slice.
pub fn quantile(sorted: &[f64], p: f64) -> f64 {
    match sorted.len() {
        0 => f64::NAN,
        1 => sorted[0],
        m => {
            let h = (m - 1) as f64 * p;
            let lo = h.floor() as usize;
            let frac = h - lo as f64;
            if frac == 0.0 || lo + 1 >= m {
                sorted[lo]
            } else {
                let (a, b) = (sorted[lo], sorted[lo + 1]);
                if b.is_infinite() {
                    b
                } else {
                    a + frac * (b - a)
                }
            }
        }
    }
}

pub fn aggregate(table: &ResultTable) -> Result<Summary> {
    if table.is_empty() {
        return Err(Error::InvalidArgument("empty result table".into()));
    }
    let mut rows: Vec<&ResultRow> = table.rows.iter().collect();
    rows.sort_by(|a, b| a.canonical_cmp(b));
    let same_cell =
        |a: &ResultRow, b: &ResultRow| (a.solver, a.n, a.k, a.r) == (b.solver, b.n, b.k, b.r) && a.sigma == b.sigma;
    let cells = rows
        .chunk_by(|a, b| same_cell(a, b))
        .map(|chunk| {
            let first = chunk[0];
            let successes = chunk.iter().filter(|r| r.success).count();
            let mut errs: Vec<f64> =
                chunk.iter().map(|r| if r.rel_error.is_nan() { f64::INFINITY } else { r.rel_error }).collect();
            errs.sort_by(f64::total_cmp);
            CellSummary {
                solver: first.solver,
                n: first.n,
                k: first.k,
                r: first.r,
                sigma: first.sigma,
                trials: chunk.len(),
                successes,
                success_rate: successes as f64 / chunk.len() as f64,
                q1: quantile(&errs, 0.25),
                median: quantile(&errs, 0.5),
                q3: quantile(&errs, 0.75),
            }
        })
        .collect();
    Ok(Summary { cells })
}
