//! Reductions built on top of an OLDC solver.
//!
//! [`space_reduced_oldc`] solves an instance over a large color space by
//! repeatedly choosing one of `p` subspaces with a small OLDC instance.
//! [`degree_halving_framework`] turns any OLDC solver into a list
//! arbdefective coloring algorithm by coloring, stage by stage, the nodes
//! that still have many uncolored neighbors. [`congest_pipeline`] composes
//! both into a (degree+1)-list coloring algorithm under a message budget.

mod arbdef;
mod framework;
mod pipeline;
mod space;

pub use arbdef::{arbdefective_subroutine, ArbStrategy};
pub use framework::{
    degree_halving_framework, stage_split, stages_csv, FrameworkConfig, FrameworkRun, PartialColoring, StageRow,
};
pub use pipeline::{congest_pipeline, default_bits, PipelineConfig, PipelineRun};
pub use space::{depth, preset_message, preset_time, space_reduced_oldc, subspace_defect, SpaceReduced};

use crate::error::Result;
use crate::graph::{ColoredGraph, ColoringOutput, Flavor, LdcInstance};
use crate::oldc::{main_oldc, multi_defect_oldc, OldcConfig};
use crate::oracle::sequential_ldc;
use crate::scalar::Scalar;
use crate::sim::{Budget, RoundTrace};

/// A coloring together with the rounds spent computing it.
#[derive(Debug, Clone)]
pub struct Solved {
    pub output: ColoringOutput,
    pub trace: RoundTrace,
}

/// An algorithm for oriented list defective coloring that succeeds whenever
/// `Σ_{x∈L_v}(d_v(x)+1)^{1+ν} ≥ β_v^{1+ν}·κ` at every node.
pub trait OldcSolver: Sync {
    type Scalar: Scalar;

    fn name(&self) -> String;
    fn nu(&self) -> u32;
    /// `κ` for instances over `space` colors.
    fn kappa(&self, space: u64) -> Self::Scalar;
    /// Solves `inst` on the orientation of `graph`. Every simulator run
    /// stays within `budget`.
    fn solve(&self, graph: &ColoredGraph, inst: &LdcInstance, budget: Budget) -> Result<Solved>;
}

/// [`multi_defect_oldc`] with a fixed `κ`.
#[derive(Debug, Clone)]
pub struct Basic<S: Scalar> {
    pub cfg: OldcConfig<S>,
    pub kappa: S,
}

impl<S: Scalar> OldcSolver for Basic<S> {
    type Scalar = S;

    fn name(&self) -> String {
        "oldc-basic".into()
    }
    fn nu(&self) -> u32 {
        1
    }
    fn kappa(&self, _space: u64) -> S {
        self.kappa.clone()
    }
    fn solve(&self, graph: &ColoredGraph, inst: &LdcInstance, budget: Budget) -> Result<Solved> {
        let cfg = OldcConfig { budget, ..self.cfg.clone() };
        let run = multi_defect_oldc(graph, inst, &cfg)?;
        Ok(Solved { output: run.output, trace: run.trace })
    }
}

/// [`main_oldc`] with a fixed `κ`.
#[derive(Debug, Clone)]
pub struct Main<S: Scalar> {
    pub cfg: OldcConfig<S>,
    pub kappa: S,
}

impl<S: Scalar> OldcSolver for Main<S> {
    type Scalar = S;

    fn name(&self) -> String {
        "oldc-main".into()
    }
    fn nu(&self) -> u32 {
        1
    }
    fn kappa(&self, _space: u64) -> S {
        self.kappa.clone()
    }
    fn solve(&self, graph: &ColoredGraph, inst: &LdcInstance, budget: Budget) -> Result<Solved> {
        let cfg = OldcConfig { budget, ..self.cfg.clone() };
        let run = main_oldc(graph, inst, &cfg)?;
        Ok(Solved { output: run.output, trace: run.trace })
    }
}

/// The centralized recoloring algorithm on the undirected graph. Its
/// output is defective, hence valid for every orientation. Needs
/// `Σ(d+1) > deg`, which is stronger than its nominal `ν = 0, κ = 1`
/// condition on graphs where the degree exceeds the out-degree.
#[derive(Debug, Clone, Copy, Default)]
pub struct Sequential;

impl OldcSolver for Sequential {
    type Scalar = f64;

    fn name(&self) -> String {
        "seq".into()
    }
    fn nu(&self) -> u32 {
        0
    }
    fn kappa(&self, _space: u64) -> f64 {
        1.0
    }
    fn solve(&self, graph: &ColoredGraph, inst: &LdcInstance, _budget: Budget) -> Result<Solved> {
        let plain = inst.clone().with_flavor(Flavor::Defective);
        let run = sequential_ldc(graph, &plain)?;
        let mut trace = RoundTrace::default();
        trace.centralized("sequential", graph.n());
        Ok(Solved { output: run.output, trace })
    }
}

/// `(d+1)^{1+ν}` summed over a list.
pub(crate) fn energy<S: Scalar>(list: &[(crate::graph::Color, u64)], nu: u32) -> S {
    list.iter().fold(<S as num_traits::Zero>::zero(), |acc, &(_, d)| acc + S::from_u64(d + 1).powu(1 + nu))
}

pub(crate) fn out_degree(graph: &ColoredGraph, v: usize) -> usize {
    graph.out_neighbors(v).map_or(0, <[usize]>::len)
}
