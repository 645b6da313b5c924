use super::{arbdefective_subroutine, energy, ArbStrategy, OldcSolver, Sequential, Solved};
use crate::error::{ensure, Error, Result};
use crate::graph::{validate_ldc, Color, ColoredGraph, ColoringOutput, Flavor, LdcInstance};
use crate::scalar::{floor_root, Scalar};
use crate::sim::{Budget, RoundTrace};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

#[derive(Debug, Clone, Copy)]
pub struct FrameworkConfig {
    pub strategy: ArbStrategy,
    /// Retry a class with the sequential solver when the inner solver fails
    /// fast for any reason other than the message budget.
    pub fallback: bool,
    pub budget: Budget,
}

impl Default for FrameworkConfig {
    fn default() -> Self {
        FrameworkConfig { strategy: ArbStrategy::default(), fallback: true, budget: Budget::default() }
    }
}

/// One inner-solver call: class `class` of stage `stage`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageRow {
    pub stage: usize,
    pub class: u64,
    pub colored_count: usize,
    /// Maximum degree of the uncolored subgraph after this class.
    pub max_uncolored_degree: usize,
    pub rounds: usize,
    pub max_bits: u64,
}

#[derive(Debug, Clone)]
pub struct FrameworkRun {
    pub output: ColoringOutput,
    pub trace: RoundTrace,
    pub rows: Vec<StageRow>,
    /// Stages started with a positive uncolored maximum degree.
    pub stages: usize,
    /// Maximum uncolored degree before the first stage and after each one.
    pub degrees: Vec<usize>,
    /// Classes solved by the sequential fallback.
    pub fallbacks: usize,
}

impl FrameworkRun {
    pub fn rows_csv(&self) -> String {
        stages_csv(&self.rows)
    }
}

/// One CSV line per inner-solver call, with a header.
pub fn stages_csv(rows: &[StageRow]) -> String {
    let mut s = String::from("stage,class,colored_count,max_uncolored_degree,rounds,max_bits\n");
    for r in rows {
        s.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.stage, r.class, r.colored_count, r.max_uncolored_degree, r.rounds, r.max_bits
        ));
    }
    s
}

/// Colors committed so far, the orientation among colored nodes, and per
/// node the number `a_v(x)` of colored neighbors holding each color `x`.
/// Newly colored nodes point at every previously colored neighbor, so a
/// node's same-colored out-degree is fixed once it is colored.
#[derive(Debug, Clone)]
pub struct PartialColoring {
    colors: Vec<Option<Color>>,
    seen: Vec<BTreeMap<Color, u64>>,
    arcs: Vec<(usize, usize)>,
    same_out: Vec<u64>,
    /// Current lists with the original defects; only ever shrink.
    lists: Vec<Vec<(Color, u64)>>,
}

impl PartialColoring {
    pub fn new(inst: &LdcInstance) -> Self {
        let n = inst.n();
        PartialColoring {
            colors: vec![None; n],
            seen: vec![BTreeMap::new(); n],
            arcs: Vec::new(),
            same_out: vec![0; n],
            lists: inst.lists().to_vec(),
        }
    }

    pub fn color(&self, v: usize) -> Option<Color> {
        self.colors[v]
    }

    pub fn seen(&self, v: usize, x: Color) -> u64 {
        self.seen[v].get(&x).copied().unwrap_or(0)
    }

    pub fn uncolored(&self) -> Vec<usize> {
        (0..self.colors.len()).filter(|&v| self.colors[v].is_none()).collect()
    }

    pub fn uncolored_degree(&self, graph: &ColoredGraph, v: usize) -> usize {
        graph.neighbors(v).iter().filter(|&&u| self.colors[u].is_none()).count()
    }

    pub fn max_uncolored_degree(&self, graph: &ColoredGraph) -> usize {
        self.uncolored().into_iter().map(|v| self.uncolored_degree(graph, v)).max().unwrap_or(0)
    }

    /// `L_v′` with `d_v′(x) = d_v(x) − a_v(x)`, dropping colors with `a_v(x) > d_v(x)`.
    pub fn residual(&self, v: usize) -> Vec<(Color, u64)> {
        self.lists[v].iter().filter_map(|&(x, d)| d.checked_sub(self.seen(v, x)).map(|r| (x, r))).collect()
    }

    /// `Σ_{x∈L_v′}(d_v′(x)+1)`.
    pub fn residual_weight(&self, v: usize) -> u64 {
        self.residual(v).iter().map(|&(_, d)| d + 1).sum()
    }

    /// Cuts the list of an uncolored node to the shortest prefix of its
    /// residual list whose weight still exceeds the uncolored degree.
    pub fn shrink(&mut self, graph: &ColoredGraph, v: usize) {
        let need = self.uncolored_degree(graph, v) as u64;
        let mut weight = 0;
        let mut keep = Vec::new();
        for &(x, d) in &self.lists[v] {
            if let Some(r) = d.checked_sub(self.seen(v, x)) {
                keep.push((x, d));
                weight += r + 1;
                if weight > need {
                    break;
                }
            }
        }
        self.lists[v] = keep;
    }

    /// Colors every uncolored node that has a residual color whose defect
    /// covers all of its uncolored neighbors, orienting edges among them by
    /// id. Such a node stays within its defect whatever its neighbors do.
    /// Returns the number of nodes colored.
    pub fn settle(&mut self, graph: &ColoredGraph) -> usize {
        let batch: Vec<(usize, Color)> = self
            .uncolored()
            .into_iter()
            .filter_map(|v| {
                let deg = self.uncolored_degree(graph, v) as u64;
                self.residual(v).into_iter().find(|&(_, d)| d >= deg).map(|(x, _)| (v, x))
            })
            .collect();
        let mut fresh = vec![false; self.colors.len()];
        for &(v, _) in &batch {
            fresh[v] = true;
        }
        let arcs: Vec<(usize, usize)> = batch
            .iter()
            .flat_map(|&(v, _)| graph.neighbors(v).iter().filter(move |&&u| u > v).map(move |&u| (v, u)))
            .filter(|&(_, u)| fresh[u])
            .collect();
        self.commit(graph, &batch, &arcs).expect("settled nodes have room");
        batch.len()
    }

    /// Colors `batch` at once. Edges to earlier colored nodes point away
    /// from the batch; edges inside the batch follow `inner_arcs`.
    pub fn commit(&mut self, graph: &ColoredGraph, batch: &[(usize, Color)], inner_arcs: &[(usize, usize)]) -> Result<()> {
        let mut fresh = vec![false; self.colors.len()];
        for &(v, x) in batch {
            ensure(self.colors[v].is_none(), || format!("node {v} colored twice"))?;
            ensure(self.residual(v).iter().any(|e| e.0 == x), || format!("color {x} not in residual list of node {v}"))?;
            fresh[v] = true;
        }
        for &(v, x) in batch {
            self.colors[v] = Some(x);
        }
        for &(v, x) in batch {
            for &u in graph.neighbors(v) {
                if self.colors[u].is_some() && !fresh[u] {
                    self.arcs.push((v, u));
                    self.same_out[v] += u64::from(self.colors[u] == Some(x));
                }
            }
        }
        for &(v, u) in inner_arcs {
            ensure(fresh[v] && fresh[u] && graph.has_edge(v, u), || format!("arc ({v},{u}) outside the batch"))?;
            self.arcs.push((v, u));
            self.same_out[v] += u64::from(self.colors[u] == self.colors[v]);
        }
        for &(v, x) in batch {
            let d = self.lists[v].iter().find(|e| e.0 == x).map_or(0, |e| e.1);
            ensure(self.same_out[v] <= d, || format!("node {v} has {} out-neighbors of color {x}, defect {d}", self.same_out[v]))?;
            for &u in graph.neighbors(v) {
                *self.seen[u].entry(x).or_insert(0) += 1;
            }
        }
        Ok(())
    }

    /// Recounts `a_v(x)` and same-colored out-degrees from scratch.
    pub fn check(&self, graph: &ColoredGraph, inst: &LdcInstance) -> Result<()> {
        let mut same_out = vec![0u64; self.colors.len()];
        for &(u, v) in &self.arcs {
            same_out[u] += u64::from(self.colors[u].is_some() && self.colors[u] == self.colors[v]);
        }
        for v in 0..self.colors.len() {
            let mut seen: BTreeMap<Color, u64> = BTreeMap::new();
            for &u in graph.neighbors(v) {
                if let Some(x) = self.colors[u] {
                    *seen.entry(x).or_insert(0) += 1;
                }
            }
            ensure(seen == self.seen[v], || format!("colored-neighbor counts of node {v} drifted"))?;
            ensure(same_out[v] == self.same_out[v], || format!("out-degree count of node {v} drifted"))?;
            if let Some(x) = self.colors[v] {
                let d = inst.defect(v, x).unwrap_or(0);
                ensure(same_out[v] <= d, || format!("node {v} exceeds its defect {d}"))?;
            }
        }
        Ok(())
    }

    pub fn into_output(self) -> ColoringOutput {
        let mut arcs = self.arcs;
        arcs.sort_unstable();
        ColoringOutput { colors: self.colors, orientation_out: Some(arcs) }
    }
}

/// Arbdefect `δ` and class count `q` for a stage with uncolored maximum
/// degree `delta` and lists of at most `lambda` colors: the largest `δ` with
/// `δ^{1+ν}·κ·Λ^ν ≤ (Δ/2)^{1+ν}`, and `q = ⌊Δ/(δ+1)⌋ + 1`.
pub fn stage_split<S: Scalar>(delta: u64, lambda: u64, nu: u32, kappa: &S) -> (u64, u64) {
    let num = S::from_u64(delta).powu(1 + nu);
    let den = S::from_u64(2).powu(1 + nu) * kappa.clone() * S::from_u64(lambda.max(1)).powu(nu);
    let d = floor_root(&(num / den), 1 + nu);
    (d, delta / (d + 1) + 1)
}

/// List arbdefective coloring from an OLDC solver. Each stage decomposes
/// the uncolored subgraph into `q` classes of arbdefect `δ` and walks the
/// classes; in class `i` the nodes that still have at least `⌈Δ_s/2⌉`
/// uncolored neighbors are colored by `solver` on their residual lists, so
/// the uncolored maximum degree at least halves per stage. Nodes whose
/// residual list has a color with defect at least their uncolored degree
/// are colored at the start of every stage without communication. Requires
/// `Σ(d+1) > deg` at every node.
pub fn degree_halving_framework<A: OldcSolver>(
    graph: &ColoredGraph,
    inst: &LdcInstance,
    solver: &A,
    cfg: &FrameworkConfig,
) -> Result<FrameworkRun> {
    if graph.n() != inst.n() {
        return Err(Error::InvalidInstance("instance and graph sizes differ".into()));
    }
    if inst.g() != 0 {
        return Err(Error::InvalidInstance("the framework needs g = 0".into()));
    }
    if let Some(v) = inst.lists().iter().position(Vec::is_empty) {
        return Err(Error::EmptyList { node: v });
    }
    for v in 0..graph.n() {
        let weight: u64 = inst.list(v).iter().map(|&(_, d)| d + 1).sum();
        if weight <= graph.degree(v) as u64 {
            return Err(Error::ConditionViolated { node: v, detail: "sum of (d+1) does not exceed degree".into() });
        }
    }
    let undirected = graph.clone().without_orientation();
    let nu = solver.nu();
    let kappa = solver.kappa(inst.color_space().len() as u64);
    let mut part = PartialColoring::new(inst);
    let mut trace = RoundTrace::default();
    let mut rows = Vec::new();
    let mut degrees = vec![part.max_uncolored_degree(&undirected)];
    let mut fallbacks = 0;
    let mut stage = 0;
    trace.note(format!("framework: inner {}, ν = {nu}, κ = {:.3}", solver.name(), kappa.to_f64()));

    loop {
        let uncolored = part.uncolored();
        if uncolored.is_empty() {
            break;
        }
        let delta_s = *degrees.last().expect("seeded");
        if delta_s > 0 {
            stage += 1;
        }
        let settled = part.settle(&undirected);
        if settled > 0 {
            trace.centralized(&format!("stage {stage}/settled"), settled);
        }
        let uncolored = part.uncolored();
        if uncolored.is_empty() {
            if delta_s > 0 {
                degrees.push(0);
            }
            break;
        }
        for &v in &uncolored {
            part.shrink(&undirected, v);
        }
        let lambda = uncolored.iter().map(|&v| part.residual(v).len()).max().unwrap_or(0) as u64;
        let (delta, q) = stage_split(delta_s as u64, lambda, nu, &kappa);
        trace.note(format!("stage {stage}: Δ = {delta_s}, Λ = {lambda}, δ = {delta}, q = {q}"));
        let residual_graph = undirected.subgraph(&uncolored, |_, _| true);
        let dec = arbdefective_subroutine(&residual_graph, q, delta, cfg.strategy, cfg.budget)?;
        let classes = dec.output.total().expect("decomposition is total");
        let oriented = residual_graph.with_orientation(dec.output.orientation_out.as_deref().expect("oriented"))?;
        trace.append(&format!("stage {stage}/decomposition"), dec.trace);
        let threshold = delta_s.div_ceil(2);
        let class_count = classes.iter().max().map_or(0, |&c| c + 1);

        for class in 0..class_count {
            let members: Vec<usize> = (0..uncolored.len())
                .filter(|&i| classes[i] == class && part.uncolored_degree(&undirected, uncolored[i]) >= threshold)
                .collect();
            if members.is_empty() {
                continue;
            }
            let mut lists = Vec::with_capacity(members.len());
            for &i in &members {
                let v = uncolored[i];
                let res = part.residual(v);
                let weight: u64 = res.iter().map(|&(_, d)| d + 1).sum();
                let deg = part.uncolored_degree(&undirected, v) as u64;
                ensure(weight > deg, || format!("node {v}: residual weight {weight} not above uncolored degree {deg}"))?;
                let need = A::Scalar::from_u64(delta).powu(1 + nu) * kappa.clone();
                ensure(energy::<A::Scalar>(&res, nu) >= need, || format!("node {v}: residual energy below δ^(1+ν)·κ"))?;
                lists.push(res);
            }
            let class_graph = oriented.subgraph(&members, |_, _| true);
            let sub = LdcInstance::new(inst.color_space().to_vec(), lists, Flavor::Oriented, 0)?;
            let solved = match solver.solve(&class_graph, &sub, cfg.budget) {
                Ok(run) => run,
                Err(e) if cfg.fallback && e.is_fail_fast() && !matches!(e, Error::BudgetViolation { .. }) => {
                    fallbacks += 1;
                    let mut run: Solved = Sequential.solve(&class_graph, &sub, cfg.budget)?;
                    run.trace.note(format!("stage {stage} class {class}: {} failed ({}), sequential fallback", solver.name(), e.kind()));
                    run
                }
                Err(e) => return Err(e),
            };
            let report = validate_ldc(&class_graph, &sub, &solved.output)?;
            ensure(report.valid, || format!("stage {stage} class {class}: inner coloring invalid at {:?}", report.violations))?;
            let batch: Vec<(usize, Color)> = members
                .iter()
                .enumerate()
                .map(|(j, &i)| (uncolored[i], solved.output.color(j).expect("validated")))
                .collect();
            let arcs: Vec<(usize, usize)> =
                class_graph.arcs().into_iter().map(|(a, b)| (uncolored[members[a]], uncolored[members[b]])).collect();
            part.commit(&undirected, &batch, &arcs)?;
            rows.push(StageRow {
                stage,
                class,
                colored_count: batch.len(),
                max_uncolored_degree: part.max_uncolored_degree(&undirected),
                rounds: solved.trace.rounds_elapsed,
                max_bits: solved.trace.overall_max_bits(),
            });
            trace.append(&format!("stage {stage}/class {class}"), solved.trace);
        }

        let after = part.max_uncolored_degree(&undirected);
        ensure(after <= delta_s / 2, || format!("stage {stage}: uncolored degree {after} above {}", delta_s / 2))?;
        for v in part.uncolored() {
            let weight = part.residual_weight(v);
            let deg = part.uncolored_degree(&undirected, v) as u64;
            ensure(weight > deg, || format!("after stage {stage}: node {v} residual weight {weight}, degree {deg}"))?;
        }
        part.check(&undirected, inst)?;
        degrees.push(after);
    }

    part.check(&undirected, inst)?;
    let output = part.into_output();
    let report = validate_ldc(&undirected, &inst.clone().with_flavor(Flavor::Arbdefective), &output)?;
    ensure(report.valid, || format!("framework output violates defects at {:?}", report.violations))?;
    Ok(FrameworkRun { output, trace, rows, stages: stage, degrees, fallbacks })
}
