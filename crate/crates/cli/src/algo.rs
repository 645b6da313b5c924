//! Algorithm dispatch shared by `run` and `sweep`.

use clap::ValueEnum;
use listdefect::linial::linial_coloring;
use listdefect::oldc::{main_oldc, multi_defect_oldc, OldcConfig};
use listdefect::oracle::{exhaustive_solve, sequential_arbdefective, sequential_ldc, DEFAULT_CAP};
use listdefect::reductions::{
    congest_pipeline, degree_halving_framework, preset_message, space_reduced_oldc, Basic, FrameworkConfig, Main,
    PipelineConfig, StageRow,
};
use listdefect::sim::{Budget, RoundTrace};
use listdefect::{validate_ldc, ColoredGraph, ColoringOutput, Error, Flavor, LdcInstance, Result};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    Seq,
    SeqArb,
    Oracle,
    Linial,
    OldcBasic,
    OldcMain,
    SpaceReduced,
    Framework,
    CongestPipeline,
}

impl Algorithm {
    pub fn name(self) -> String {
        self.to_possible_value().expect("no skipped variants").get_name().to_string()
    }

    /// The flavor the algorithm's output is checked against. The oracle
    /// keeps the instance's own flavor.
    pub fn flavor(self, given: Flavor) -> Flavor {
        match self {
            Algorithm::Seq | Algorithm::Linial => Flavor::Defective,
            Algorithm::SeqArb | Algorithm::Framework | Algorithm::CongestPipeline => Flavor::Arbdefective,
            Algorithm::OldcBasic | Algorithm::OldcMain | Algorithm::SpaceReduced => Flavor::Oriented,
            Algorithm::Oracle => given,
        }
    }
}

/// Parameters common to every algorithm. Defaults are the small scaled
/// thresholds under which the OLDC algorithms run at desk scale.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct Params {
    pub alpha: f64,
    pub tau: u64,
    pub taubar: Option<u64>,
    /// Branching factor of the space reduction; derived from `r` when unset.
    pub p: Option<u64>,
    pub r: u32,
    pub bits: Option<u64>,
    pub max_rounds: usize,
}

impl Default for Params {
    fn default() -> Self {
        Params { alpha: 1.0, tau: 2, taubar: None, p: None, r: 1, bits: None, max_rounds: 10_000 }
    }
}

impl Params {
    fn oldc(&self) -> OldcConfig<f64> {
        OldcConfig {
            alpha: self.alpha,
            taubar_override: self.taubar,
            budget: self.budget(),
            ..OldcConfig::scaled(self.tau)
        }
    }

    fn budget(&self) -> Budget {
        match self.bits {
            Some(b) => Budget::congest(self.max_rounds, b),
            None => Budget::local(self.max_rounds),
        }
    }
}

/// What a run produced. `output` is only set for validated colorings.
#[derive(Debug, Clone, Default)]
pub struct Outcome {
    pub output: Option<ColoringOutput>,
    pub trace: RoundTrace,
    pub stages: Vec<StageRow>,
    /// `SAT`/`UNSAT` for the oracle.
    pub verdict: Option<String>,
    pub violations: Vec<usize>,
}

impl Outcome {
    fn colored(output: ColoringOutput, trace: RoundTrace) -> Self {
        Outcome { output: Some(output), trace, ..Default::default() }
    }
}

/// Runs `algo` and validates whatever coloring it returns. A coloring that
/// fails validation is reported as an invariant violation, never returned.
pub fn execute(algo: Algorithm, graph: &ColoredGraph, inst: &LdcInstance, params: &Params) -> Result<Outcome> {
    let flavor = algo.flavor(inst.flavor());
    let inst = inst.clone().with_flavor(flavor);
    let oriented = || if graph.is_oriented() { graph.clone() } else { graph.clone().oriented_by(|u, v| u < v) };
    let mut out = match algo {
        Algorithm::Seq => Outcome::colored(sequential_ldc(graph, &inst)?.output, centralized("sequential", graph.n())),
        Algorithm::SeqArb => {
            Outcome::colored(sequential_arbdefective(graph, &inst)?, centralized("sequential arbdefective", graph.n()))
        }
        Algorithm::Oracle => {
            let trace = centralized("exhaustive", graph.n());
            let graph = if flavor == Flavor::Oriented { oriented() } else { graph.clone() };
            return match exhaustive_solve(&graph, &inst, DEFAULT_CAP)? {
                Some(output) => {
                    let report = validate_ldc(&graph, &inst, &output)?;
                    check(report.valid, &report.violations)?;
                    Ok(Outcome { verdict: Some("SAT".into()), ..Outcome::colored(output, trace) })
                }
                None => Ok(Outcome { verdict: Some("UNSAT".into()), trace, ..Default::default() }),
            };
        }
        Algorithm::Linial => {
            let run = linial_coloring(&graph.clone().without_orientation(), params.budget())?;
            let proper = graph.edges().all(|(u, v)| run.output.colors[u] != run.output.colors[v]);
            check(proper, &[])?;
            // Lists play no part; the coloring is checked for properness only.
            return Ok(Outcome::colored(run.output, run.trace));
        }
        Algorithm::OldcBasic => {
            let run = multi_defect_oldc(&oriented(), &inst, &params.oldc())?;
            Outcome::colored(run.output, run.trace)
        }
        Algorithm::OldcMain => {
            let run = main_oldc(&oriented(), &inst, &params.oldc())?;
            Outcome::colored(run.output, run.trace)
        }
        Algorithm::SpaceReduced => {
            let p = params.p.unwrap_or_else(|| preset_message(inst.color_space().len() as u64, params.r));
            let inner = Basic { cfg: params.oldc(), kappa: 1.0 };
            let run = space_reduced_oldc(&oriented(), &inst, p, &inner, params.budget())?;
            Outcome::colored(run.output, run.trace)
        }
        Algorithm::Framework => {
            let solver = Main { cfg: params.oldc(), kappa: 1.0 };
            let cfg = FrameworkConfig { budget: params.budget(), ..FrameworkConfig::default() };
            let run = degree_halving_framework(&graph.clone().without_orientation(), &inst, &solver, &cfg)?;
            Outcome { stages: run.rows, ..Outcome::colored(run.output, run.trace) }
        }
        Algorithm::CongestPipeline => {
            let cfg = PipelineConfig {
                oldc: params.oldc(),
                bits: params.bits,
                max_rounds: params.max_rounds,
                ..PipelineConfig::default()
            };
            let run = congest_pipeline(graph, &inst, &cfg)?;
            Outcome { stages: run.rows, ..Outcome::colored(run.output, run.trace) }
        }
    };
    let checked_on = if flavor == Flavor::Oriented { oriented() } else { graph.clone() };
    let report = validate_ldc(&checked_on, &inst, out.output.as_ref().expect("colored outcome"))?;
    out.violations = report.violations.clone();
    check(report.valid, &report.violations)?;
    Ok(out)
}

fn check(valid: bool, violations: &[usize]) -> Result<()> {
    if valid {
        Ok(())
    } else {
        Err(Error::InvariantViolated(format!("output fails validation at nodes {violations:?}")))
    }
}

fn centralized(label: &str, n: usize) -> RoundTrace {
    let mut t = RoundTrace::default();
    t.centralized(label, n);
    t
}
