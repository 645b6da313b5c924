use super::{out_neighbors, validated, NodeDiag, OldcConfig, OldcRun};
use crate::conflict::{build_cached, ConflictParams, NodeType, Order, Shape, TypeTable};
use crate::error::{ensure, Error, Result};
use crate::graph::{Color, ColoredGraph, Flavor, LdcInstance};
use crate::scalar::{ceil_u64, Scalar};
use crate::sim::{self, cost, Inbox, NodeProgram, NodeView, Payload, RoundTrace, Step};
use std::collections::BTreeMap;
use std::sync::Arc;

const MIN_KEEP_FACTOR: u64 = 16;

/// Class assignment for [`two_phase_oldc`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassBudget {
    pub classes: Vec<u32>,
    /// Proximity window: classes more than `⌊log₂ q⌋` below a node's own
    /// may hold up to `β_v/q` of its out-neighbors in total.
    pub q: u64,
}

impl ClassBudget {
    /// Out-neighbors of `v` per class.
    pub fn class_degrees(&self, graph: &ColoredGraph, v: usize) -> BTreeMap<u32, u64> {
        let mut m = BTreeMap::new();
        for &u in out_neighbors(graph, v) {
            *m.entry(self.classes[u]).or_insert(0) += 1;
        }
        m
    }

    /// Whether `4·max{β_{v,i_v}, β_v/q} ≤ 2^{i_v}·(d_v+1)`.
    pub fn holds_at(&self, graph: &ColoredGraph, v: usize, d: u64) -> bool {
        let i = self.classes[v];
        let beta = out_neighbors(graph, v).len() as u128;
        let same = self.class_degrees(graph, v).get(&i).copied().unwrap_or(0) as u128;
        let room = (1u128 << i.min(100)) * (d as u128 + 1);
        4 * same <= room && 4 * beta <= room * self.q as u128
    }
}

/// What a node learned in earlier rounds.
#[derive(Debug, Clone, Default)]
struct Knowledge {
    /// Candidate sets of out-neighbors, with their class.
    sets: BTreeMap<usize, (u32, Arc<Vec<Color>>)>,
    own: Option<Arc<Vec<Color>>>,
    conflicting: u64,
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

fn intersection(a: &[Color], b: &[Color]) -> u64 {
    let (mut i, mut j, mut n) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                n += 1;
                i += 1;
                j += 1;
            }
        }
    }
    n
}

/// One Phase I iteration: class `class` nodes exchange descriptors, pick a
/// candidate set and announce its index. Every node reports the candidate
/// sets it heard from out-neighbors.
struct PhaseOne<'a> {
    graph: &'a ColoredGraph,
    class: u32,
    types: &'a [Option<Arc<NodeType>>],
    defects: &'a [u64],
    table: &'a TypeTable,
    tau: u64,
    tau_prime: u64,
    space: u64,
    m: u64,
}

struct OneState {
    out: Vec<usize>,
    families: BTreeMap<usize, usize>,
    heard: Vec<(usize, Arc<Vec<Color>>)>,
    own: Option<(Arc<Vec<Color>>, u64)>,
}

type OneOutput = (Vec<(usize, Arc<Vec<Color>>)>, Option<(Arc<Vec<Color>>, u64)>);

impl PhaseOne<'_> {
    fn choose(&self, v: usize, s: &OneState) -> Result<(usize, u64)> {
        let ty = self.types[v].as_ref().expect("active node has a type");
        let mine = &self.table.families()[self.table.index_of(ty).expect("type in table")];
        let rivals: Vec<&[Vec<Color>]> = s.families.values().map(|&f| self.table.families()[f].as_slice()).collect();
        let counts: Vec<u64> = mine
            .iter()
            .map(|c| rivals.iter().filter(|k| k.iter().any(|c2| intersection(c, c2) >= self.tau)).count() as u64)
            .collect();
        let total: u64 = counts.iter().sum();
        ensure(total <= rivals.len() as u64 * (self.tau_prime - 1), || {
            format!("node {v}: candidate families conflict more than the table allows")
        })?;
        let (idx, &best) = counts.iter().enumerate().min_by_key(|&(i, &c)| (c, i)).expect("nonempty family");
        let d = self.defects[v];
        ensure(4 * best <= d, || format!("node {v}: best candidate set has {best} same-class conflicts for defect {d}"))?;
        Ok((idx, best))
    }
}

impl NodeProgram for PhaseOne<'_> {
    type State = OneState;
    type Msg = Msg;
    type Output = OneOutput;

    fn label(&self) -> &str {
        "two-phase: candidates"
    }

    fn init(&self, view: &NodeView<'_>) -> Result<Step<OneState, Msg, OneOutput>> {
        let mut out = out_neighbors(self.graph, view.id).to_vec();
        out.sort_unstable();
        let s = OneState { out, families: BTreeMap::new(), heard: Vec::new(), own: None };
        Ok(match &self.types[view.id] {
            Some(t) if t.class == self.class => {
                let bits = cost::color_list(t.list.len(), self.space) + cost::init_color(self.m);
                Step::send(s, Msg::Descriptor(t.clone(), bits))
            }
            _ => Step::quiet(s),
        })
    }

    fn step(&self, view: &NodeView<'_>, mut s: OneState, inbox: &Inbox<Msg>, round: usize) -> Result<Step<OneState, Msg, OneOutput>> {
        for (u, msg) in inbox {
            if s.out.binary_search(u).is_err() {
                continue;
            }
            match msg {
                Msg::Descriptor(t, _) => {
                    let f = self.table.index_of(t).ok_or_else(|| view.fail(round, "neighbor type missing from table"))?;
                    s.families.insert(*u, f);
                }
                Msg::Choice(i, _) => {
                    let f = s.families.get(u).ok_or_else(|| view.fail(round, "choice without descriptor"))?;
                    s.heard.push((*u, Arc::new(self.table.families()[*f][*i].clone())));
                }
                Msg::Color(..) => {}
            }
        }
        let active = matches!(&self.types[view.id], Some(t) if t.class == self.class);
        match round {
            1 if active => {
                let (idx, best) = self.choose(view.id, &s)?;
                let ty = self.types[view.id].as_ref().expect("active");
                let family = &self.table.families()[self.table.index_of(ty).expect("type in table")];
                s.own = Some((Arc::new(family[idx].clone()), best));
                Ok(Step::send(s, Msg::Choice(idx, cost::table_index(family.len() as u64))))
            }
            1 => Ok(Step::quiet(s)),
            _ => {
                let out = (std::mem::take(&mut s.heard), s.own.take());
                Ok(Step::quiet(s).with_output(out))
            }
        }
    }
}

/// Phase II: classes pick colors from top to bottom.
struct PhaseTwo<'a> {
    graph: &'a ColoredGraph,
    knowledge: &'a [Knowledge],
    classes: &'a [Option<u32>],
    trivial: &'a [Option<Color>],
    defects: &'a [u64],
    h: u32,
    tau: u64,
    space: u64,
}

struct TwoState {
    out: Vec<usize>,
    decided: Vec<Color>,
    done: bool,
}

impl PhaseTwo<'_> {
    fn decide(&self, v: usize, s: &TwoState) -> Result<(Color, NodeDiag)> {
        let k = &self.knowledge[v];
        let class = self.classes[v].expect("active");
        let c_v = k.own.as_ref().expect("candidate set from phase one");
        let d = self.defects[v];
        let mut counts: BTreeMap<Color, u64> = c_v.iter().map(|&x| (x, 0)).collect();
        let mut ignored = 0;
        for (c_u_class, c_u) in k.sets.values() {
            if *c_u_class != class {
                continue;
            }
            if intersection(c_u, c_v) >= self.tau {
                ignored += 1;
                continue;
            }
            for x in c_u.iter() {
                if let Some(n) = counts.get_mut(x) {
                    *n += 1;
                }
            }
        }
        ensure(4 * ignored <= d, || format!("node {v}: {ignored} ignored same-class neighbors exceed d/4"))?;
        for x in &s.decided {
            if let Some(n) = counts.get_mut(x) {
                *n += 1;
            }
        }
        let total: u64 = counts.values().sum();
        ensure((2 * total as u128) < (1u128 << class) * (d as u128 + 1) * self.tau as u128, || {
            format!("node {v}: candidate multiset of size {total} is too large")
        })?;
        let (&x, &f) = counts.iter().min_by_key(|&(x, f)| (*f, *x)).expect("nonempty candidate set");
        ensure(2 * f <= d, || format!("node {v}: least contended color has frequency {f} > d/2"))?;
        let diag = NodeDiag { class: Some(class), conflicting: k.conflicting, ignored, frequency: f, defect: d };
        Ok((x, diag))
    }
}

impl NodeProgram for PhaseTwo<'_> {
    type State = TwoState;
    type Msg = Msg;
    type Output = (Color, NodeDiag);

    fn label(&self) -> &str {
        "two-phase: colors"
    }

    fn init(&self, view: &NodeView<'_>) -> Result<Step<TwoState, Msg, (Color, NodeDiag)>> {
        let mut out = out_neighbors(self.graph, view.id).to_vec();
        out.sort_unstable();
        let s = TwoState { out, decided: Vec::new(), done: false };
        Ok(match self.trivial[view.id] {
            Some(x) => {
                let diag = NodeDiag { defect: self.defects[view.id], ..NodeDiag::default() };
                Step::send(TwoState { done: true, ..s }, Msg::Color(x, cost::color(self.space))).with_output((x, diag))
            }
            None => Step::quiet(s),
        })
    }

    fn step(&self, view: &NodeView<'_>, mut s: TwoState, inbox: &Inbox<Msg>, round: usize) -> Result<Step<TwoState, Msg, (Color, NodeDiag)>> {
        for (u, msg) in inbox {
            if let Msg::Color(x, _) = msg {
                if s.out.binary_search(u).is_ok() {
                    s.decided.push(*x);
                }
            }
        }
        if s.done {
            return Ok(Step::quiet(s));
        }
        let class = self.classes[view.id].expect("undecided nodes are active");
        if round == 1 + (self.h - class) as usize {
            let (x, diag) = self.decide(view.id, &s)?;
            s.done = true;
            return Ok(Step::send(s, Msg::Color(x, cost::color(self.space))).with_output((x, diag)));
        }
        Ok(Step::quiet(s))
    }
}

/// Colors that more than `d/4` lower-class out-neighbors hold in their
/// candidate sets.
fn bad_colors(list: &[Color], k: &Knowledge, class: u32, d: u64) -> Vec<Color> {
    let mut counts: BTreeMap<Color, u64> = BTreeMap::new();
    for (c_class, c) in k.sets.values() {
        if *c_class < class {
            for &x in c.iter() {
                *counts.entry(x).or_insert(0) += 1;
            }
        }
    }
    list.iter().copied().filter(|x| 4 * counts.get(x).copied().unwrap_or(0) > d).collect()
}

/// Two-phase OLDC with preassigned classes and one defect per node (`g = 0`).
///
/// Phase I visits classes in ascending order. A node drops colors that
/// more than `d/4` lower-class out-neighbors hold as candidates, then picks
/// a candidate set from a table built over its own class only, with at
/// most `d/4` conflicting same-class out-neighbors; those are ignored
/// afterwards. Phase II visits classes in descending order and each node
/// takes a color that at most `d/2` higher-class colors and non-ignored
/// same-class candidate sets contain.
///
/// Requires the class budget and
/// `|L_v| ≥ [α·4^i + (4/(d+1))·Σ_{j=i−⌊log₂q⌋}^{i−1} β_{v,j}·2^j]·τ`.
/// Nodes whose defect covers their out-degree take their first color.
pub fn two_phase_oldc<S: Scalar>(
    graph: &ColoredGraph,
    lists: &[Vec<Color>],
    defects: &[u64],
    budget: &ClassBudget,
    space: u64,
    cfg: &OldcConfig<S>,
) -> Result<OldcRun> {
    let n = graph.n();
    if lists.len() != n || defects.len() != n || budget.classes.len() != n {
        return Err(Error::InvalidInstance("lists, defects and classes must cover every node".into()));
    }
    let mut sorted = Vec::with_capacity(n);
    let mut classes = vec![None; n];
    let mut trivial = vec![None; n];
    for v in 0..n {
        let mut l = lists[v].clone();
        l.sort_unstable();
        l.dedup();
        if l.is_empty() {
            return Err(Error::EmptyList { node: v });
        }
        if defects[v] >= out_neighbors(graph, v).len() as u64 {
            trivial[v] = Some(l[0]);
        } else {
            if budget.classes[v] == 0 {
                return Err(Error::InvalidInstance(format!("node {v} has class 0")));
            }
            classes[v] = Some(budget.classes[v]);
        }
        sorted.push(l);
    }
    let top = classes.iter().flatten().copied().max().unwrap_or(1);
    let h = cfg.h_override.unwrap_or(top);
    if h < top {
        return Err(Error::InfeasibleParams(format!("h = {h} is below the largest class {top}")));
    }
    let params: ConflictParams = cfg.conflict_params(h, space, graph.m(), 0)?;
    let (tau, tau_prime) = (params.tau, params.tau_prime);
    if budget.q == 0 || budget.q > tau {
        return Err(Error::InfeasibleParams(format!("q = {} must lie in [1, tau = {tau}]", budget.q)));
    }
    let window = cost::ceil_log2(budget.q + 1).saturating_sub(1) as u32;
    for v in 0..n {
        let Some(i) = classes[v] else { continue };
        let d = defects[v];
        if !budget.holds_at(graph, v, d) {
            return Err(Error::ConditionViolated { node: v, detail: format!("class {i} too small for its out-degrees") });
        }
        let per_class = budget.class_degrees(graph, v);
        let near: u128 = (i.saturating_sub(window)..i).map(|j| *per_class.get(&j).unwrap_or(&0) as u128 * (1u128 << j)).sum();
        let need = (cfg.alpha.clone() * S::from_u128(1u128 << (2 * i)) + S::from_u128(4 * near) / S::from_u64(d + 1))
            * S::from_u64(tau);
        if S::from_u64(sorted[v].len() as u64) < need {
            return Err(Error::ListTooSmall { node: v, have: sorted[v].len().to_string(), need: format!("{:.2}", need.to_f64()) });
        }
    }

    let m = graph.m();
    let mut knowledge = vec![Knowledge::default(); n];
    let mut trace = RoundTrace::default();
    // Random candidate sets drawn from c·4^i·τ colors overlap in τ/c colors on average.
    let keep_factor = if cfg.alpha > S::from_u64(MIN_KEEP_FACTOR + 2) {
        cfg.alpha.clone() - S::from_u64(2)
    } else {
        S::from_u64(MIN_KEEP_FACTOR)
    };
    for class in 1..=h {
        let mut types: Vec<Option<Arc<NodeType>>> = vec![None; n];
        for v in 0..n {
            if classes[v] != Some(class) {
                continue;
            }
            let d = defects[v];
            let bad = bad_colors(&sorted[v], &knowledge[v], class, d);
            let lower: u64 = knowledge[v].sets.values().filter(|(c, _)| *c < class).map(|(_, s)| s.len() as u64).sum();
            ensure((bad.len() as u64) * (d + 1) <= 4 * lower, || format!("node {v}: {} bad colors exceed 4D/(d+1)", bad.len()))?;
            let mut rest: Vec<Color> = sorted[v].iter().copied().filter(|x| bad.binary_search(x).is_err()).collect();
            let k = params.subset_size(class);
            if (rest.len() as u64) < k {
                return Err(Error::ListTooSmall { node: v, have: rest.len().to_string(), need: k.to_string() });
            }
            let keep = ceil_u64(&(keep_factor.clone() * S::from_u128(1u128 << (2 * class)) * S::from_u64(tau)))
                .unwrap_or(u64::MAX)
                .max(k);
            rest.truncate(keep.min(rest.len() as u64) as usize);
            types[v] = Some(Arc::new(NodeType { init_color: graph.init_color(v), list: rest, class }));
        }
        if types.iter().all(Option::is_none) {
            continue;
        }
        let present: Vec<NodeType> = types.iter().flatten().map(|t| (**t).clone()).collect();
        let subset = |i: u32| params.subset_size(i);
        let family = |i: u32| params.class_family_size(i);
        let shape = Shape { subset_size: &subset, family_size: &family, order: Order::default() };
        let table = build_cached(&params, &present, &shape, cfg.table_cap)?;
        let program = PhaseOne { graph, class, types: &types, defects, table: &table, tau, tau_prime, space, m };
        let result = sim::run(graph, &program, cfg.budget)?;
        for (v, (heard, own)) in result.outputs.into_iter().enumerate() {
            for (u, c) in heard {
                knowledge[v].sets.insert(u, (class, c));
            }
            if let Some((c, conflicting)) = own {
                knowledge[v].own = Some(c);
                knowledge[v].conflicting = conflicting;
            }
        }
        let mut part = result.trace;
        part.centralized(&format!("type table, class {class}"), table.len());
        trace.append(&format!("phase 1, class {class}"), part);
    }

    let program = PhaseTwo { graph, knowledge: &knowledge, classes: &classes, trivial: &trivial, defects, h, tau, space };
    let result = sim::run(graph, &program, cfg.budget)?;
    trace.append("phase 2", result.trace);
    let (colors, diagnostics): (Vec<Color>, Vec<NodeDiag>) = result.outputs.into_iter().unzip();
    let ignored: u64 = diagnostics.iter().map(|d| d.ignored).sum();
    trace.note(format!("ignored same-class out-neighbors: {ignored}"));
    let flavor = if graph.is_oriented() { Flavor::Oriented } else { Flavor::Defective };
    let inst_lists = (0..n).map(|v| sorted[v].iter().map(|&x| (x, defects[v])).collect()).collect();
    let mut space_colors: Vec<Color> = sorted.iter().flatten().copied().collect();
    space_colors.sort_unstable();
    space_colors.dedup();
    let output = validated(graph, &LdcInstance::new(space_colors, inst_lists, flavor, 0)?, colors)?;
    Ok(OldcRun { output, trace, diagnostics, params, h })
}
