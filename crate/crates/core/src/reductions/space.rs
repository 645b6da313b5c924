use super::{out_degree, OldcSolver, Solved};
use crate::error::{ensure, Error, Result};
use crate::graph::{validate_ldc, Color, ColoredGraph, ColoringOutput, Flavor, LdcInstance};
use crate::scalar::{ceil_root, floor_root, Scalar};
use crate::sim::{cost, Budget, RoundTrace};
use num_traits::Zero;
use std::collections::BTreeMap;

/// Wire size of the fixed-width fields (class tags, table indices) that
/// accompany a color list in the inner solvers' messages.
const WORD_BITS: u64 = 64;

/// Number of levels `k = ⌈log_p size⌉`, at least 1.
pub fn depth(size: u64, p: u64) -> Result<u32> {
    if size <= 1 {
        return Ok(1);
    }
    if p < 2 {
        return Err(Error::InfeasibleParams(format!("branching factor {p} below 2")));
    }
    let mut k = 1;
    let mut reach = p as u128;
    while reach < size as u128 {
        reach *= p as u128;
        k += 1;
    }
    Ok(k)
}

/// `(λ, β_i)` for a subspace whose colors carry `energy = Σ(d+1)^{1+ν}`,
/// at a node with out-degree `beta` and `k` remaining levels. `λ` is
/// `None` for `beta = 0`. `β_i` is the defect the node may use for the
/// subspace: any `β_i` out-neighbors in it still leave the next level's
/// condition satisfied.
pub fn subspace_defect<S: Scalar>(energy: &S, beta: u64, kappa: &S, nu: u32, k: u32) -> (Option<S>, u64) {
    let rest = kappa.powu(k.saturating_sub(1));
    let lambda = (beta > 0)
        .then(|| energy.clone() / (S::from_u64(beta).powu(1 + nu) * kappa.powu(k)));
    (lambda, floor_root(&(energy.clone() / rest), 1 + nu))
}

/// `p = ⌈|C|^{1/r}⌉`: messages carry lists over at most `p` colors.
pub fn preset_message(size: u64, r: u32) -> u64 {
    if size <= 2 || r == 0 {
        return size.max(2);
    }
    ceil_root(&(size as f64), r).max(2)
}

/// `p = 2^{⌈√(log β · log κ(Λ))⌉}`, clamped to `[2, |C|]`.
pub fn preset_time<A: OldcSolver>(graph: &ColoredGraph, inst: &LdcInstance, inner: &A) -> u64 {
    let beta = (graph.max_beta() as f64).max(1.0);
    let kappa = inner.kappa(inst.max_list_len() as u64).to_f64().max(1.0);
    let e = (beta.log2() * kappa.log2()).sqrt().ceil().min(62.0) as u32;
    (1u64 << e).clamp(2, (inst.color_space().len() as u64).max(2))
}

/// An OLDC solver over any color space built from one over `p` colors.
#[derive(Debug, Clone)]
pub struct SpaceReduced<A> {
    pub inner: A,
    pub p: u64,
}

impl<A: OldcSolver> OldcSolver for SpaceReduced<A> {
    type Scalar = A::Scalar;

    fn name(&self) -> String {
        format!("space-reduced({}, p={})", self.inner.name(), self.p)
    }
    fn nu(&self) -> u32 {
        self.inner.nu()
    }
    fn kappa(&self, space: u64) -> A::Scalar {
        self.inner.kappa(self.p).powu(depth(space, self.p).unwrap_or(1))
    }
    fn solve(&self, graph: &ColoredGraph, inst: &LdcInstance, budget: Budget) -> Result<Solved> {
        space_reduced_oldc(graph, inst, self.p, &self.inner, budget)
    }
}

/// Per-message bound for a run of an inner solver on `inst`: one color
/// list over the instance's space, an initial color and one word.
fn message_bound(inst: &LdcInstance, m: u64) -> u64 {
    cost::color_list(inst.max_list_len(), inst.color_space().len() as u64) + cost::init_color(m) + WORD_BITS
}

fn run_inner<A: OldcSolver>(graph: &ColoredGraph, inst: &LdcInstance, inner: &A, budget: Budget) -> Result<Solved> {
    let bound = message_bound(inst, graph.m());
    let mut run = inner.solve(graph, inst, budget.tightened(Some(bound)))?;
    let report = validate_ldc(graph, inst, &run.output)?;
    ensure(report.valid, || format!("{} returned an invalid coloring at {:?}", inner.name(), report.violations))?;
    run.trace.note(format!("message bound {bound} bits"));
    Ok(run)
}

/// Solves `inst` on the orientation of `graph` with `k = ⌈log_p|C|⌉`
/// levels. The sorted color space is cut into `p` contiguous chunks, padded
/// with unused indices to `p^k`. On each of the first `k−1` levels every
/// node picks a chunk of its current range through a `p`-color instance
/// solved by `inner`; nodes in different chunks never conflict again, so
/// edges between them are dropped. The last level colors within chunks of
/// `p` colors. Requires `Σ(d+1)^{1+ν} ≥ β^{1+ν}·κ(p)^k`.
pub fn space_reduced_oldc<A: OldcSolver>(
    graph: &ColoredGraph,
    inst: &LdcInstance,
    p: u64,
    inner: &A,
    budget: Budget,
) -> Result<Solved> {
    if graph.n() != inst.n() {
        return Err(Error::InvalidInstance("instance and graph sizes differ".into()));
    }
    if inst.g() != 0 {
        return Err(Error::InvalidInstance("space reduction needs g = 0".into()));
    }
    if !graph.is_oriented() {
        return Err(Error::MissingOrientation("space reduction needs an orientation".into()));
    }
    let n = graph.n();
    let space = inst.color_space();
    let k = depth(space.len() as u64, p)?;
    let mut trace = RoundTrace::default();
    trace.note(format!("space reduction: p = {p}, {k} levels"));
    if k == 1 {
        let run = run_inner(graph, inst, inner, budget)?;
        trace.append("level 1", run.trace);
        return Ok(Solved { output: run.output, trace });
    }
    let nu = inner.nu();
    let kappa = inner.kappa(p);
    if kappa <= A::Scalar::zero() {
        return Err(Error::InfeasibleParams("inner solver has κ ≤ 0".into()));
    }
    let lists: Vec<Vec<(u64, u64)>> = inst
        .lists()
        .iter()
        .map(|l| l.iter().map(|&(x, d)| (space.binary_search(&x).expect("listed color") as u64, d)).collect())
        .collect();
    if let Some(v) = lists.iter().position(Vec::is_empty) {
        return Err(Error::EmptyList { node: v });
    }
    let everyone: Vec<usize> = (0..n).collect();
    let mut base = vec![0u64; n];
    let mut path: Vec<Vec<u64>> = vec![Vec::with_capacity(k as usize - 1); n];

    for level in 0..k - 1 {
        let remaining = k - level;
        let width = p.pow(remaining - 1);
        let span = width.saturating_mul(p);
        let sub_graph = graph.subgraph(&everyone, |u, v| base[u] == base[v]);
        let mut sub_lists = Vec::with_capacity(n);
        for v in 0..n {
            let mut parts: BTreeMap<u64, A::Scalar> = BTreeMap::new();
            for &(i, d) in &lists[v] {
                if i >= base[v] && i - base[v] < span {
                    let e = parts.entry((i - base[v]) / width).or_insert_with(A::Scalar::zero);
                    *e = e.clone() + A::Scalar::from_u64(d + 1).powu(1 + nu);
                }
            }
            let beta = out_degree(&sub_graph, v) as u64;
            let total = parts.values().fold(A::Scalar::zero(), |a, e| a + e.clone());
            let need = A::Scalar::from_u64(beta).powu(1 + nu) * kappa.powu(remaining);
            if total < need {
                let detail = format!("level {}: Σ(d+1)^{} = {:.3} below {:.3}", level + 1, 1 + nu, total.to_f64(), need.to_f64());
                return Err(if level == 0 {
                    Error::ConditionViolated { node: v, detail }
                } else {
                    Error::InvariantViolated(format!("node {v}, {detail}"))
                });
            }
            sub_lists.push(
                parts.iter().map(|(&i, e)| (i, subspace_defect(e, beta, &kappa, nu, remaining).1)).collect(),
            );
        }
        let sub_inst = LdcInstance::new((0..p).collect(), sub_lists, Flavor::Oriented, 0)?;
        let run = run_inner(&sub_graph, &sub_inst, inner, budget)?;
        for v in 0..n {
            let i = run.output.color(v).expect("validated");
            path[v].push(i);
            base[v] += i * width;
        }
        trace.append(&format!("level {}", level + 1), run.trace);
    }

    let sub_graph = graph.subgraph(&everyone, |u, v| base[u] == base[v]);
    let sub_lists: Vec<Vec<(Color, u64)>> = (0..n)
        .map(|v| {
            lists[v].iter().filter(|&&(i, _)| i >= base[v] && i - base[v] < p).map(|&(i, d)| (i - base[v], d)).collect()
        })
        .collect();
    let sub_inst = LdcInstance::new((0..p).collect(), sub_lists, Flavor::Oriented, 0)?;
    let run = run_inner(&sub_graph, &sub_inst, inner, budget)?;
    trace.append(&format!("level {k}"), run.trace);

    let mut colors = Vec::with_capacity(n);
    for v in 0..n {
        let i = base[v] + run.output.color(v).expect("validated");
        for (level, &chosen) in path[v].iter().enumerate() {
            let width = p.pow(k - 1 - level as u32);
            ensure((i / width) % p == chosen, || format!("node {v} left the subspace chosen on level {}", level + 1))?;
        }
        colors.push(space[i as usize]);
    }
    let output = ColoringOutput::from_colors(colors);
    let report = validate_ldc(graph, inst, &output)?;
    ensure(report.valid, || format!("space reduction produced violations at {:?}", report.violations))?;
    Ok(Solved { output, trace })
}
