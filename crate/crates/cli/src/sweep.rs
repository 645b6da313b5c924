//! Cross-product sweeps summarized as CSV.

use crate::algo::{execute, Algorithm, Params};
use listdefect::generate::{generate_graph, generate_lists, Family, ListModel};
use listdefect::{Flavor, Result};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Every combination of the listed values becomes one row. An empty list
/// anywhere gives an empty sweep.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct Matrix {
    pub families: Vec<Family>,
    pub n: Vec<usize>,
    pub delta: Vec<usize>,
    pub algorithms: Vec<Algorithm>,
    /// Message presets; only the space reduction reads them.
    pub r: Vec<u32>,
    pub seeds: Vec<u64>,
    pub list_model: ListModel,
    pub space: u64,
    pub params: Params,
}

impl Default for Matrix {
    fn default() -> Self {
        Matrix {
            families: vec![],
            n: vec![],
            delta: vec![],
            algorithms: vec![],
            r: vec![1],
            seeds: vec![0],
            list_model: ListModel::DegreePlusOne,
            space: 64,
            params: Params::default(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Row {
    pub family: String,
    pub n: usize,
    pub delta: usize,
    pub algorithm: String,
    pub r: u32,
    pub seed: u64,
    pub rounds: usize,
    pub max_bits: u64,
    pub valid: bool,
    /// Error kind, empty for valid rows.
    pub failure: String,
}

pub const HEADER: [&str; 10] = ["family", "n", "delta", "algorithm", "r", "seed", "rounds", "max_bits", "valid", "failure"];

pub fn run_matrix(m: &Matrix) -> Vec<Row> {
    let mut cells = Vec::new();
    for &family in &m.families {
        for &n in &m.n {
            for &delta in &m.delta {
                for &algo in &m.algorithms {
                    for &r in &m.r {
                        for &seed in &m.seeds {
                            cells.push((family, n, delta, algo, r, seed));
                        }
                    }
                }
            }
        }
    }
    cells.into_par_iter().map(|(family, n, delta, algo, r, seed)| row(m, family, n, delta, algo, r, seed)).collect()
}

fn row(m: &Matrix, family: Family, n: usize, delta: usize, algo: Algorithm, r: u32, seed: u64) -> Row {
    let params = Params { r, ..m.params.clone() };
    let result: Result<_> = generate_graph(family, n, delta, seed)
        .and_then(|g| generate_lists(&g, m.list_model, m.space, Flavor::Defective, seed).map(|inst| (g, inst)))
        .and_then(|(g, inst)| execute(algo, &g, &inst, &params));
    let family = serde_json::to_value(family).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default();
    let base = Row { family, n, delta, algorithm: algo.name(), r, seed, rounds: 0, max_bits: 0, valid: false, failure: String::new() };
    match result {
        Ok(out) => Row {
            rounds: out.trace.rounds_elapsed,
            max_bits: out.trace.overall_max_bits(),
            valid: out.output.is_some() || out.verdict.is_some(),
            ..base
        },
        Err(e) => Row { failure: e.kind().to_string(), ..base },
    }
}

pub fn to_csv(rows: &[Row]) -> std::result::Result<String, csv::Error> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    w.write_record(HEADER)?;
    for r in rows {
        w.serialize(r)?;
    }
    let bytes = w.into_inner().map_err(|e| e.into_error())?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}
