use super::{out_neighbors, round_defect, validated, NodeDiag, OldcConfig, OldcRun};
use crate::conflict::{build_cached, Order, mu_g, residue_restrict, tau_g_conflict, ConflictParams, NodeType, Shape, TypeTable};
use crate::error::{ensure, Error, Result};
use crate::graph::{Color, ColoredGraph, Flavor, LdcInstance};
use crate::scalar::{ceil_u64, Scalar};
use crate::sim::{self, cost, Inbox, NodeProgram, NodeView, Outbox, Payload, Step};
use std::collections::BTreeMap;
use std::sync::Arc;

/// One defect per node.
#[derive(Debug, Clone, Copy)]
pub struct SingleDefectInput<'a> {
    pub lists: &'a [Vec<Color>],
    pub defects: &'a [u64],
    pub g: u64,
    /// Size of the color space, for `τ` and message costs.
    pub space: u64,
}

/// Smallest `i ≥ 1` with `2^i ≥ 2β/(d+1)`.
pub fn class_of(beta: u64, d: u64) -> u32 {
    let mut i = 1;
    while (1u128 << i) * (d as u128 + 1) < 2 * beta as u128 {
        i += 1;
    }
    i
}

#[derive(Debug, Clone)]
enum Prep {
    /// Defect covers every out-neighbor.
    Trivial(Color),
    Active { ty: Arc<NodeType>, d: u64 },
}

/// `α·(β/(d+1))²·τ` in the scalar type.
fn list_need<S: Scalar>(alpha: &S, beta: u64, d: u64, tau: u64) -> S {
    alpha.clone() * S::from_ratio(beta * beta, (d + 1) * (d + 1)) * S::from_u64(tau)
}

fn prepare<S: Scalar>(
    graph: &ColoredGraph,
    input: &SingleDefectInput<'_>,
    cfg: &OldcConfig<S>,
) -> Result<(Vec<Prep>, ConflictParams)> {
    let n = graph.n();
    if input.lists.len() != n || input.defects.len() != n {
        return Err(Error::InvalidInstance("lists and defects must cover every node".into()));
    }
    let mut lists = Vec::with_capacity(n);
    let mut classes = vec![None; n];
    for v in 0..n {
        let mut l = input.lists[v].clone();
        l.sort_unstable();
        l.dedup();
        if l.is_empty() {
            return Err(Error::EmptyList { node: v });
        }
        let beta = out_neighbors(graph, v).len() as u64;
        if input.defects[v] < beta {
            classes[v] = Some(class_of(beta, input.defects[v]));
        }
        lists.push(l);
    }
    let top = classes.iter().flatten().copied().max().unwrap_or(1);
    let h = match cfg.h_override {
        Some(h) if h < top => {
            return Err(Error::InfeasibleParams(format!("h = {h} is below the largest class {top}")));
        }
        Some(h) => h,
        None => top,
    };
    let params = cfg.conflict_params(h, input.space, graph.m(), input.g)?;
    let spread = S::from_u64(2 * input.g + 1);
    let mut prep = Vec::with_capacity(n);
    for (v, l) in lists.into_iter().enumerate() {
        let Some(class) = classes[v] else {
            prep.push(Prep::Trivial(l[0]));
            continue;
        };
        let (beta, d) = (out_neighbors(graph, v).len() as u64, input.defects[v]);
        let need = list_need(&cfg.alpha, beta, d, params.tau);
        let need_full = need.clone() * spread.clone();
        if S::from_u64(l.len() as u64) < need_full {
            return Err(Error::ListTooSmall { node: v, have: l.len().to_string(), need: format!("{:.2}", need_full.to_f64()) });
        }
        let k = params.subset_size(class);
        let (_, mut restricted) = residue_restrict(&l, input.g);
        if (restricted.len() as u64) < k {
            return Err(Error::ListTooSmall { node: v, have: restricted.len().to_string(), need: k.to_string() });
        }
        // A list of exactly k colors has a single k-subset; 2k leaves room for a family.
        let keep = ceil_u64(&need).unwrap_or(u64::MAX).max(2 * k);
        restricted.truncate(keep.min(restricted.len() as u64) as usize);
        let ty = NodeType { init_color: graph.init_color(v), list: restricted, class };
        prep.push(Prep::Active { ty: Arc::new(ty), d });
    }
    Ok((prep, params))
}

#[derive(Debug, Clone)]
enum Msg {
    Descriptor(Arc<NodeType>, u64),
    Choice(usize, u64),
    Color(Color, u64),
}

impl Payload for Msg {
    fn bits(&self) -> u64 {
        match self {
            Msg::Descriptor(_, b) | Msg::Choice(_, b) | Msg::Color(_, b) => *b,
        }
    }
}

enum Nbr {
    Decided(Color),
    Active { class: u32, family: usize, choice: Option<usize> },
}

struct State {
    out: Vec<usize>,
    nbrs: BTreeMap<usize, Nbr>,
    chosen: Option<usize>,
    diag: NodeDiag,
    done: bool,
}

struct Program<'a> {
    prep: &'a [Prep],
    table: &'a TypeTable,
    h: u32,
    g: u64,
    tau: u64,
    tau_prime: u64,
    space: u64,
    m: u64,
    graph: &'a ColoredGraph,
}

impl Program<'_> {
    fn color_msg(&self, x: Color) -> Msg {
        Msg::Color(x, cost::color(self.space))
    }

    fn family(&self, v: usize) -> &[Vec<Color>] {
        match &self.prep[v] {
            Prep::Active { ty, .. } => &self.table.families()[self.table.index_of(ty).expect("type in table")],
            Prep::Trivial(_) => &[],
        }
    }

    fn choose_candidates(&self, v: usize, s: &mut State) -> Result<Msg> {
        let Prep::Active { ty, d } = &self.prep[v] else { unreachable!("only active nodes choose") };
        let mine = self.family(v);
        let rivals: Vec<&[Vec<Color>]> = s
            .nbrs
            .values()
            .filter_map(|n| match n {
                Nbr::Active { class, family, .. } if *class <= ty.class => Some(self.table.families()[*family].as_slice()),
                _ => None,
            })
            .collect();
        let counts: Vec<u64> = mine
            .iter()
            .map(|c| rivals.iter().filter(|k| k.iter().any(|c2| tau_g_conflict(c, c2, self.tau, self.g))).count() as u64)
            .collect();
        let total: u64 = counts.iter().sum();
        ensure(total <= rivals.len() as u64 * (self.tau_prime - 1), || {
            format!("node {v}: candidate families conflict more than the table allows")
        })?;
        let (idx, &best) = counts.iter().enumerate().min_by_key(|&(i, &c)| (c, i)).expect("nonempty family");
        ensure(2 * best <= *d, || format!("node {v}: best candidate set has {best} conflicts for defect {d}"))?;
        s.chosen = Some(idx);
        s.diag.conflicting = best;
        Ok(Msg::Choice(idx, cost::table_index(mine.len() as u64)))
    }

    fn decide(&self, v: usize, s: &mut State) -> Result<Color> {
        let Prep::Active { ty, d } = &self.prep[v] else { unreachable!("only active nodes decide") };
        let c_v = &self.family(v)[s.chosen.expect("chosen before deciding")];
        let mut sets: Vec<&[Color]> = Vec::new();
        let mut decided: Vec<Color> = Vec::new();
        for (&u, nbr) in &s.nbrs {
            match nbr {
                Nbr::Decided(x) => decided.push(*x),
                Nbr::Active { class, family, choice } => {
                    ensure(*class <= ty.class, || format!("node {v}: higher-class neighbor {u} undecided"))?;
                    let c = choice.ok_or_else(|| Error::InvariantViolated(format!("node {v}: no candidate set from {u}")))?;
                    sets.push(&self.table.families()[*family][c]);
                }
            }
        }
        let freq = |x: Color| -> u64 {
            sets.iter().map(|c| mu_g(x, c, self.g)).sum::<u64>()
                + decided.iter().filter(|&&y| y.abs_diff(x) <= self.g).count() as u64
        };
        let (x, f) = c_v.iter().map(|&x| (x, freq(x))).min_by_key(|&(x, f)| (f, x)).expect("nonempty candidate set");
        ensure(f <= *d, || format!("node {v}: least contended color has frequency {f} > defect {d}"))?;
        s.diag.frequency = f;
        Ok(x)
    }
}

impl NodeProgram for Program<'_> {
    type State = State;
    type Msg = Msg;
    type Output = (Color, NodeDiag);

    fn label(&self) -> &str {
        "oldc-basic"
    }

    fn init(&self, view: &NodeView<'_>) -> Result<Step<State, Msg, (Color, NodeDiag)>> {
        let mut out = out_neighbors(self.graph, view.id).to_vec();
        out.sort_unstable();
        let mut s = State { out, nbrs: BTreeMap::new(), chosen: None, diag: NodeDiag::default(), done: false };
        Ok(match &self.prep[view.id] {
            Prep::Trivial(x) => {
                s.done = true;
                Step::send(s, self.color_msg(*x)).with_output((*x, NodeDiag::default()))
            }
            Prep::Active { ty, d } => {
                s.diag.class = Some(ty.class);
                s.diag.defect = *d;
                let bits = cost::color_list(ty.list.len(), self.space)
                    + cost::ceil_log2(self.h as u64 + 1).max(1)
                    + cost::init_color(self.m);
                Step::send(s, Msg::Descriptor(ty.clone(), bits))
            }
        })
    }

    fn step(&self, view: &NodeView<'_>, mut s: State, inbox: &Inbox<Msg>, round: usize) -> Result<Step<State, Msg, (Color, NodeDiag)>> {
        for (u, msg) in inbox {
            if s.out.binary_search(u).is_err() {
                continue;
            }
            match msg {
                Msg::Descriptor(t, _) => {
                    let family = self.table.index_of(t).ok_or_else(|| view.fail(round, "neighbor type missing from table"))?;
                    s.nbrs.insert(*u, Nbr::Active { class: t.class, family, choice: None });
                }
                Msg::Choice(i, _) => {
                    if let Some(Nbr::Active { choice, .. }) = s.nbrs.get_mut(u) {
                        *choice = Some(*i);
                    }
                }
                Msg::Color(x, _) => {
                    s.nbrs.insert(*u, Nbr::Decided(*x));
                }
            }
        }
        if s.done {
            return Ok(Step::quiet(s));
        }
        let Prep::Active { ty, .. } = &self.prep[view.id] else { unreachable!("trivial nodes are done") };
        if round == 1 {
            let msg = self.choose_candidates(view.id, &mut s)?;
            return Ok(Step::send(s, msg));
        }
        if round == 2 + (self.h - ty.class) as usize {
            let x = self.decide(view.id, &mut s)?;
            s.done = true;
            let diag = s.diag.clone();
            return Ok(Step::send(s, self.color_msg(x)).with_output((x, diag)));
        }
        Ok(Step { state: s, outbox: Outbox::Silent, output: None })
    }
}

fn instance_for(graph: &ColoredGraph, lists: Vec<Vec<(Color, u64)>>, g: u64) -> Result<LdcInstance> {
    let mut space: Vec<Color> = lists.iter().flatten().map(|&(x, _)| x).collect();
    space.sort_unstable();
    space.dedup();
    let flavor = if graph.is_oriented() { Flavor::Oriented } else { Flavor::Defective };
    LdcInstance::new(space, lists, flavor, g)
}

/// Single-defect OLDC. Each node ends with at most `d_v` out-neighbors
/// within distance `g` of its color; on an unoriented graph every neighbor
/// counts as an out-neighbor.
///
/// Rounds: one for type descriptors, one for candidate-set indices, then one
/// per class from the top class down.
pub fn single_defect_oldc<S: Scalar>(graph: &ColoredGraph, input: &SingleDefectInput<'_>, cfg: &OldcConfig<S>) -> Result<OldcRun> {
    let (prep, params) = prepare(graph, input, cfg)?;
    let types: Vec<NodeType> = prep
        .iter()
        .filter_map(|p| match p {
            Prep::Active { ty, .. } => Some((**ty).clone()),
            Prep::Trivial(_) => None,
        })
        .collect();
    let subset = |i: u32| params.subset_size(i);
    let family = |_: u32| params.family_size();
    let table = build_cached(&params, &types, &Shape { subset_size: &subset, family_size: &family, order: Order::default() }, cfg.table_cap)?;
    let program = Program {
        prep: &prep,
        table: &table,
        h: params.h,
        g: input.g,
        tau: params.tau,
        tau_prime: params.tau_prime,
        space: input.space,
        m: graph.m(),
        graph,
    };
    let mut result = sim::run(graph, &program, cfg.budget)?;
    result.trace.centralized("type table", table.len());
    let (colors, diagnostics): (Vec<Color>, Vec<NodeDiag>) = result.outputs.into_iter().unzip();
    let lists = (0..graph.n()).map(|v| input.lists[v].iter().map(|&x| (x, input.defects[v])).collect()).collect();
    let output = validated(graph, &instance_for(graph, lists, input.g)?, colors)?;
    Ok(OldcRun { output, trace: result.trace, diagnostics, params, h: params.h })
}

/// Per-node choice of a defect bucket: the restricted list and its rounded defect.
fn bucket_choice(list: &[(Color, u64)], beta: u64) -> (Vec<Color>, u64) {
    if let Some(&(x, d)) = list.iter().find(|&&(_, d)| d >= beta) {
        return (vec![x], d);
    }
    let mut buckets: BTreeMap<u64, Vec<Color>> = BTreeMap::new();
    for &(x, d) in list {
        buckets.entry(round_defect(d)).or_default().push(x);
    }
    let (d, l) = buckets
        .into_iter()
        .max_by(|(da, la), (db, lb)| {
            let ea = la.len() as u128 * (*da as u128 + 1).pow(2);
            let eb = lb.len() as u128 * (*db as u128 + 1).pow(2);
            ea.cmp(&eb).then(db.cmp(da))
        })
        .expect("nonempty list");
    (l, d)
}

/// General OLDC through the single-defect algorithm: defects are rounded
/// down so `d+1` is a power of two, colors are bucketed by defect, and each
/// node keeps the bucket with the largest `|L_i|·(d_i+1)²`.
///
/// Requires `Σ(d′+1)² ≥ α·β̂²·τ·h·(2g+1)` with the rounded defects `d′`,
/// `β̂` the out-degree rounded up to a power of two and `h` the number of
/// defect buckets; checked before any communication.
pub fn multi_defect_oldc<S: Scalar>(graph: &ColoredGraph, inst: &LdcInstance, cfg: &OldcConfig<S>) -> Result<OldcRun> {
    inst.check_graph(graph)?;
    let n = graph.n();
    let g = inst.g();
    let mut lists = Vec::with_capacity(n);
    let mut defects = Vec::with_capacity(n);
    let mut buckets = 1u64;
    let mut top_class = 1;
    for v in 0..n {
        if inst.list(v).is_empty() {
            return Err(Error::EmptyList { node: v });
        }
        let beta = out_neighbors(graph, v).len() as u64;
        let (l, d) = bucket_choice(inst.list(v), beta);
        if d < beta {
            let beta_hat = beta.next_power_of_two();
            let lowest = inst.list(v).iter().map(|&(_, d)| round_defect(d)).min().expect("nonempty");
            buckets = buckets.max(cost::ceil_log2(beta_hat / (lowest + 1)) + 1);
            top_class = top_class.max(class_of(beta, d));
        }
        lists.push(l);
        defects.push(d);
    }
    let h = cfg.h_override.unwrap_or(top_class).max(top_class);
    let tau = cfg.conflict_params(h, inst.color_space().len() as u64, graph.m(), g)?.tau;
    for v in 0..n {
        let beta = out_neighbors(graph, v).len() as u64;
        if defects[v] >= beta {
            continue;
        }
        let beta_hat = beta.next_power_of_two();
        let energy: u128 = inst.list(v).iter().map(|&(_, d)| (round_defect(d) as u128 + 1).pow(2)).sum();
        let need = cfg.alpha.clone()
            * S::from_u64(beta_hat * beta_hat)
            * S::from_u64(tau)
            * S::from_u64(buckets)
            * S::from_u64(2 * g + 1);
        if S::from_u128(energy) < need {
            return Err(Error::ListTooSmall { node: v, have: energy.to_string(), need: format!("{:.2}", need.to_f64()) });
        }
    }
    let sub_cfg = OldcConfig { h_override: Some(h), ..cfg.clone() };
    let input = SingleDefectInput { lists: &lists, defects: &defects, g, space: inst.color_space().len() as u64 };
    let mut run = single_defect_oldc(graph, &input, &sub_cfg)?;
    run.output = validated(graph, inst, run.output.total().expect("all colored"))?;
    run.trace.note(format!("defect buckets: {buckets}"));
    Ok(run)
}
