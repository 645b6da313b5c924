use super::Solved;
use crate::error::{ensure, Error, Result};
use crate::graph::{validate_ldc, Color, ColoredGraph, ColoringOutput, Flavor, LdcInstance};
use crate::linial::defective_linial;
use crate::oracle::{sequential_arbdefective, sequential_ldc};
use crate::sim::{Budget, RoundTrace};
use serde::{Deserialize, Serialize};

/// How [`arbdefective_subroutine`] produces its decomposition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ArbStrategy {
    /// Centralized `δ`-defective coloring with `q` colors; any orientation
    /// then has arbdefect `δ`. Needs `q(δ+1) > Δ`.
    #[default]
    Defective,
    /// Centralized `2δ`-defective coloring, oriented along Euler tours of
    /// every color class. Needs only `q(2δ+1) > Δ`.
    DoubledDefect,
    /// Distributed defective Linial coloring on the orientation (lower id
    /// toward higher id when the graph has none). Fails when its palette
    /// exceeds `q`.
    DefectiveLinial,
}

/// A `q`-coloring with an orientation in which every node has at most `δ`
/// out-neighbors of its own color. Requires `q(δ+1) > Δ`, or only
/// `q(2δ+1) > Δ` for [`ArbStrategy::DoubledDefect`].
pub fn arbdefective_subroutine(
    graph: &ColoredGraph,
    q: u64,
    delta: u64,
    strategy: ArbStrategy,
    budget: Budget,
) -> Result<Solved> {
    let n = graph.n();
    let max_degree = graph.max_degree() as u64;
    let per_class = if strategy == ArbStrategy::DoubledDefect { 2 * delta + 1 } else { delta + 1 };
    if q.saturating_mul(per_class) <= max_degree {
        let node = (0..n).max_by_key(|&v| graph.degree(v)).unwrap_or(0);
        return Err(Error::ConditionViolated {
            node,
            detail: format!("{q} classes of weight {per_class} do not exceed Δ = {max_degree}"),
        });
    }
    // More than Δ+1 colors are never needed.
    let palette: Vec<Color> = (0..q.min(max_degree + 1)).collect();
    let inst = LdcInstance::uniform(n, &palette, delta, Flavor::Arbdefective)?;
    let mut trace = RoundTrace::default();
    let output = match strategy {
        ArbStrategy::Defective => {
            let run = sequential_ldc(graph, &inst.clone().with_flavor(Flavor::Defective))?;
            trace.centralized("defective decomposition", n);
            ColoringOutput { orientation_out: Some(by_id(graph)), ..run.output }
        }
        ArbStrategy::DoubledDefect => {
            let out = sequential_arbdefective(graph, &inst)?;
            trace.centralized("euler decomposition", n);
            out
        }
        ArbStrategy::DefectiveLinial => {
            let oriented = if graph.is_oriented() { graph.clone() } else { graph.clone().oriented_by(|u, v| u < v) };
            let run = defective_linial(&oriented, delta, budget)?;
            if run.palette > q {
                let node = (0..n).max_by_key(|&v| oriented.beta(v)).unwrap_or(0);
                return Err(Error::ConditionViolated {
                    node,
                    detail: format!("defective Linial needs {} colors, only {q} allowed", run.palette),
                });
            }
            trace.append("defective linial", run.trace);
            ColoringOutput { orientation_out: Some(oriented.arcs()), ..run.output }
        }
    };
    let report = validate_ldc(graph, &inst, &output)?;
    ensure(report.valid, || format!("decomposition exceeds arbdefect {delta} at {:?}", report.violations))?;
    Ok(Solved { output, trace })
}

fn by_id(graph: &ColoredGraph) -> Vec<(usize, usize)> {
    graph.edges().map(|(u, v)| (u.min(v), u.max(v))).collect()
}
