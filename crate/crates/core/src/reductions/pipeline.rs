use super::{degree_halving_framework, preset_message, ArbStrategy, FrameworkConfig, Main, SpaceReduced, StageRow};
use crate::error::{ensure, Error, Result};
use crate::graph::{ColoredGraph, ColoringOutput, LdcInstance};
use crate::linial::linial_coloring;
use crate::oldc::OldcConfig;
use crate::scalar::Scalar;
use crate::sim::{cost, Budget, RoundTrace};

#[derive(Debug, Clone)]
pub struct PipelineConfig<S: Scalar> {
    pub oldc: OldcConfig<S>,
    /// `κ` of the main OLDC algorithm under `oldc`.
    pub kappa: S,
    /// `e` with `|C| ≤ Δ^e`; the smallest such `e` when `None`.
    pub exponent: Option<u32>,
    /// Per-message bit budget; [`default_bits`] when `None`.
    pub bits: Option<u64>,
    pub max_rounds: usize,
    pub strategy: ArbStrategy,
}

impl<S: Scalar> Default for PipelineConfig<S> {
    fn default() -> Self {
        PipelineConfig {
            oldc: OldcConfig { alpha: S::one(), ..OldcConfig::scaled(2) },
            kappa: S::one(),
            exponent: None,
            bits: None,
            max_rounds: 10_000,
            strategy: ArbStrategy::default(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct PipelineRun {
    pub output: ColoringOutput,
    pub trace: RoundTrace,
    pub rows: Vec<StageRow>,
    pub stages: usize,
    pub degrees: Vec<usize>,
    pub fallbacks: usize,
    /// Branching factor of the space reduction.
    pub p: u64,
    pub bits: u64,
    /// Palette of the initial Linial coloring.
    pub palette: u64,
}

/// One 64-bit word plus `4⌈log₂ n⌉` bits.
pub fn default_bits(n: usize) -> u64 {
    64 + 4 * cost::ceil_log2(n as u64).max(1)
}

/// (degree+1)-list coloring, or more generally list arbdefective coloring
/// with `Σ(d+1) > deg`, under a per-message bit budget: a Linial coloring
/// supplies initial colors, then [`degree_halving_framework`] runs with
/// [`main_oldc`](crate::oldc::main_oldc) reduced to `p = ⌈|C|^{1/2e}⌉`
/// colors per message.
pub fn congest_pipeline<S: Scalar>(
    graph: &ColoredGraph,
    inst: &LdcInstance,
    cfg: &PipelineConfig<S>,
) -> Result<PipelineRun> {
    let n = graph.n();
    let bits = cfg.bits.unwrap_or_else(|| default_bits(n));
    let budget = Budget::congest(cfg.max_rounds, bits);
    let plain = graph.clone().without_orientation();
    let size = inst.color_space().len() as u64;
    let delta = plain.max_degree() as u64;
    let exponent = match cfg.exponent {
        Some(e) => {
            if delta >= 2 && (delta as u128).pow(e) < size as u128 {
                return Err(Error::InfeasibleParams(format!("{size} colors exceed Δ^{e} = {delta}^{e}")));
            }
            e.max(1)
        }
        None => smallest_exponent(size, delta),
    };
    let p = preset_message(size, 2 * exponent);

    let mut trace = RoundTrace::default();
    trace.note(format!("pipeline: {bits} bits per message, p = {p} (|C| = {size}, e = {exponent})"));
    let lin = linial_coloring(&plain, budget)?;
    let colored = plain.with_init_colors(lin.output.total().expect("total coloring"), lin.palette)?;
    trace.append("linial", lin.trace);

    let inner = SpaceReduced { inner: Main { cfg: cfg.oldc.clone(), kappa: cfg.kappa.clone() }, p };
    let fw_cfg = FrameworkConfig { strategy: cfg.strategy, fallback: true, budget };
    let fw = degree_halving_framework(&colored, inst, &inner, &fw_cfg)?;
    trace.append("", fw.trace);
    if let Some(over) = trace.records.iter().find(|r| r.max_bits > bits) {
        return Err(Error::InvariantViolated(format!("round {} carried {} bits", over.round, over.max_bits)));
    }
    if inst.lists().iter().all(|l| l.iter().all(|&(_, d)| d == 0)) {
        let clash = colored.edges().find(|&(u, v)| fw.output.colors[u] == fw.output.colors[v]);
        ensure(clash.is_none(), || format!("edge {clash:?} is monochromatic"))?;
    }
    Ok(PipelineRun {
        output: fw.output,
        trace,
        rows: fw.rows,
        stages: fw.stages,
        degrees: fw.degrees,
        fallbacks: fw.fallbacks,
        p,
        bits,
        palette: lin.palette,
    })
}

/// Smallest `e ≥ 1` with `Δ^e ≥ size`; 1 when `Δ ≤ 1`.
fn smallest_exponent(size: u64, delta: u64) -> u32 {
    if delta <= 1 {
        return 1;
    }
    let mut e = 1;
    let mut reach = delta as u128;
    while reach < size as u128 {
        reach *= delta as u128;
        e += 1;
    }
    e
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::{generate_graph, Family};
    use crate::graph::{validate_ldc, Flavor};

    fn proper(graph: &ColoredGraph, out: &ColoringOutput) -> bool {
        graph.edges().all(|(u, v)| out.colors[u] != out.colors[v])
    }

    #[test]
    fn exponents_cover_the_space() {
        assert_eq!(smallest_exponent(64, 8), 2);
        assert_eq!(smallest_exponent(64, 16), 2);
        assert_eq!(smallest_exponent(16, 16), 1);
        assert_eq!(smallest_exponent(5, 1), 1);
    }

    #[test]
    fn matching_gets_two_colors() {
        let g = ColoredGraph::new(6, &[(0, 1), (2, 3), (4, 5)]).unwrap();
        let inst = LdcInstance::uniform(6, &[0, 1], 0, Flavor::Arbdefective).unwrap();
        let run = congest_pipeline(&g, &inst, &PipelineConfig::<f64>::default()).unwrap();
        assert!(proper(&g, &run.output));
        assert!(run.stages <= 1);
    }

    #[test]
    fn ring_with_three_colors_respects_the_budget() {
        let g = generate_graph(Family::Ring, 32, 2, 0).unwrap();
        let inst = LdcInstance::uniform(32, &[0, 1, 2], 0, Flavor::Arbdefective).unwrap();
        let run = congest_pipeline(&g, &inst, &PipelineConfig::<f64>::default()).unwrap();
        assert!(proper(&g, &run.output));
        assert!(validate_ldc(&g, &inst, &run.output).unwrap().valid);
        assert!(run.trace.overall_max_bits() <= run.bits);
        assert!(run.trace.phases.iter().all(|ph| ph.bound.is_none_or(|b| b <= run.bits)));
    }

    #[test]
    fn tight_budget_is_reported() {
        let g = generate_graph(Family::Ring, 32, 2, 0).unwrap();
        let inst = LdcInstance::uniform(32, &[0, 1, 2], 0, Flavor::Arbdefective).unwrap();
        let cfg = PipelineConfig::<f64> { bits: Some(2), ..Default::default() };
        let err = congest_pipeline(&g, &inst, &cfg).unwrap_err();
        assert!(matches!(err, Error::BudgetViolation { .. }), "{err}");
    }
}
