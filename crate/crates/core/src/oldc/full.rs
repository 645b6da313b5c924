use super::{multi_defect_oldc, out_neighbors, round_defect, two_phase_oldc, validated, ClassBudget, OldcConfig, OldcRun};
use crate::conflict::tau_formula;
use crate::error::{Error, Result};
use crate::graph::{Color, ColoredGraph, Flavor, LdcInstance};
use crate::scalar::{floor_log4, Scalar};
use crate::sim::{cost, RoundTrace};
use std::collections::BTreeMap;

/// One entry of a node's class list: taking class `class` means coloring
/// from defect class `mu` while tolerating `delta` nearby out-neighbors.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ClassChoice {
    pub class: u32,
    pub mu: u32,
    pub delta: u64,
}

/// How a node's list splits into defect classes.
///
/// Every color has rounded defect `d` with `(d+1)² = R/4^μ`, where
/// `R = 4^{r_exp}`. The weight of defect class `μ` is `4^{−r}` with
/// `r = lambda[μ−1]`, or zero when `lambda[μ−1]` is `None`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodeProfile {
    pub beta_hat: u64,
    pub r_exp: u32,
    /// Colors of each defect class, keyed by `μ`.
    pub buckets: BTreeMap<u32, Vec<Color>>,
    /// `Σ(d+1)²` per defect class, index `μ−1`.
    pub energies: Vec<u128>,
    pub total: u128,
    pub lambda: Vec<Option<u32>>,
    /// Some class carries at least a quarter of the energy.
    pub dominant: bool,
    /// Distinct classes on offer, ascending.
    pub choices: Vec<ClassChoice>,
}

impl NodeProfile {
    /// Rounded defect of the colors in defect class `mu`.
    pub fn defect_of(&self, mu: u32) -> u64 {
        pow2_sat(self.r_exp - mu) - 1
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LambdaProfile {
    /// Number of defect classes.
    pub h: u32,
    /// `None` for nodes holding a color whose defect covers their out-degree;
    /// `trivial` has that color.
    pub nodes: Vec<Option<NodeProfile>>,
    pub trivial: Vec<Option<Color>>,
}

fn pow2_sat(e: u32) -> u64 {
    if e >= 64 {
        u64::MAX
    } else {
        1u64 << e
    }
}

/// Smallest power of four that is at least `x`.
fn pow4_ceil(x: u64) -> u64 {
    let mut p = 1u64;
    while p < x {
        p = p.saturating_mul(4);
    }
    p
}

fn log4_exact(p: u64) -> u32 {
    debug_assert!(p.is_power_of_two() && p.trailing_zeros().is_multiple_of(2));
    p.trailing_zeros() / 2
}

/// Smallest power of four at least `log₂(8h)`.
pub fn class_window(h: u32) -> u64 {
    let target = 8u128 * h as u128;
    let mut p = 1u64;
    while p < 128 && (1u128 << p) < target {
        p *= 4;
    }
    p
}

/// `r` with weight `4^{−r} = 4^{⌊log₄(part/total)⌋}`, or `None` when
/// `part/total < 1/(2h)`.
pub fn lambda_exponent(part: u128, total: u128, h: u32) -> Option<u32> {
    if total == 0 || 2 * h as u128 * part < total {
        return None;
    }
    let mut r = 0;
    let mut scaled = part;
    while scaled < total {
        scaled = scaled.saturating_mul(4);
        r += 1;
    }
    Some(r)
}

/// Exponent of `α` rounded up to a power of four.
fn alpha_exponent<S: Scalar>(alpha: &S) -> Result<u32> {
    if *alpha < S::one() {
        return Err(Error::InfeasibleParams(format!("alpha = {} must be at least 1", alpha.to_f64())));
    }
    let e = floor_log4(alpha) as u32;
    Ok(if S::from_u64(4).powu(e) == *alpha { e } else { e + 1 })
}

/// Splits every list into defect classes and derives the class lists.
///
/// `R_v = α·β̂_v²·τ̄·h′²` with `α` rounded up to a power of four and `τ̄`,
/// `h′` powers of four. Defects are rounded down so `(d+1)²` is a power of
/// four. `h` is a lower bound on the number of defect classes.
pub fn lambda_profile<S: Scalar>(
    graph: &ColoredGraph,
    inst: &LdcInstance,
    alpha: &S,
    taubar: u64,
    h_prime: u64,
    h: u32,
) -> Result<LambdaProfile> {
    inst.check_graph(graph)?;
    let n = graph.n();
    let base = alpha_exponent(alpha)? + log4_exact(pow4_ceil(taubar)) + 2 * log4_exact(pow4_ceil(h_prime));
    let mut trivial = vec![None; n];
    let mut raw = Vec::with_capacity(n);
    let mut classes = h.max(1);
    for v in 0..n {
        let list = inst.list(v);
        if list.is_empty() {
            return Err(Error::EmptyList { node: v });
        }
        let beta = out_neighbors(graph, v).len() as u64;
        if let Some(&(x, _)) = list.iter().find(|&&(_, d)| d >= beta) {
            trivial[v] = Some(x);
            raw.push(None);
            continue;
        }
        let beta_hat = beta.next_power_of_two();
        let r_exp = base + beta_hat.trailing_zeros();
        let mut buckets: BTreeMap<u32, Vec<Color>> = BTreeMap::new();
        for &(x, d) in list {
            let mu = r_exp - (round_defect(d) + 1).trailing_zeros();
            debug_assert!(mu >= 1);
            buckets.entry(mu).or_default().push(x);
        }
        classes = classes.max(*buckets.keys().last().expect("nonempty"));
        raw.push(Some((beta_hat, r_exp, buckets)));
    }
    let nodes = raw
        .into_iter()
        .map(|entry| entry.map(|(beta_hat, r_exp, buckets)| profile_node(beta_hat, r_exp, buckets, classes)))
        .collect();
    Ok(LambdaProfile { h: classes, nodes, trivial })
}

fn profile_node(beta_hat: u64, r_exp: u32, buckets: BTreeMap<u32, Vec<Color>>, h: u32) -> NodeProfile {
    let mut energies = vec![0u128; h as usize];
    for (&mu, colors) in &buckets {
        let side = pow2_sat(r_exp - mu) as u128;
        energies[mu as usize - 1] = side.saturating_mul(side).saturating_mul(colors.len() as u128);
    }
    let total: u128 = energies.iter().fold(0u128, |a, &e| a.saturating_add(e));
    let lambda: Vec<Option<u32>> = energies.iter().map(|&e| lambda_exponent(e, total, h)).collect();
    let heaviest = lambda
        .iter()
        .enumerate()
        .filter_map(|(i, r)| r.map(|r| (r, i as u32 + 1)))
        .min();
    let dominant = matches!(heaviest, Some((r, _)) if r <= 1);
    let choices = match heaviest {
        Some((r, mu)) if r <= 1 => {
            vec![ClassChoice { class: mu, mu, delta: pow2_sat(r_exp) >> 2 }]
        }
        _ => {
            let mut seen = BTreeMap::new();
            for (idx, r) in lambda.iter().enumerate() {
                let Some(r) = *r else { continue };
                let mu = idx as u32 + 1;
                let class = mu as i64 - r as i64 + 2;
                if class >= 1 {
                    let delta = if r_exp >= r { pow2_sat(r_exp - r) } else { 0 };
                    seen.entry(class as u32).or_insert(ClassChoice { class: class as u32, mu, delta });
                }
            }
            seen.into_values().collect()
        }
    };
    NodeProfile { beta_hat, r_exp, buckets, energies, total, lambda, dominant, choices }
}

/// OLDC for lists with arbitrary defects in two stages.
///
/// Stage 1 assigns every node a class by solving a small OLDC instance
/// over class indices with proximity window `⌊log₂ h⌋`, where `h` is the
/// number of defect classes. Stage 2 runs [`two_phase_oldc`] on the chosen
/// classes, each node restricted to the colors of the matching defect class.
///
/// Requires `Σ(d+1)² ≥ α²·β̂²·τ·τ̄·h′²` per node in the regime where the
/// bounds are proven; at scaled thresholds the stages check their own
/// preconditions and fail fast.
pub fn main_oldc<S: Scalar>(graph: &ColoredGraph, inst: &LdcInstance, cfg: &OldcConfig<S>) -> Result<OldcRun> {
    inst.check_graph(graph)?;
    if inst.g() != 0 {
        return Err(Error::InvalidInstance("the two-stage algorithm needs proximity 0".into()));
    }
    let n = graph.n();
    let m = graph.m();
    let space = inst.color_space().len() as u64;
    let beta_hat = (0..n).map(|v| out_neighbors(graph, v).len() as u64).max().unwrap_or(0).next_power_of_two();
    let h_base = (beta_hat.trailing_zeros()).max(1);
    let h_prime = class_window(h_base);
    let taubar = pow4_ceil(cfg.taubar_override.unwrap_or_else(|| tau_formula(h_prime as u32, h_base as u64, m)));
    let profile = lambda_profile(graph, inst, &cfg.alpha, taubar, h_prime, h_base)?;
    let h = profile.h;
    let g = cost::ceil_log2(h as u64 + 1).saturating_sub(1);
    let parked = h as u64 + g + 1;

    let mut class_lists = Vec::with_capacity(n);
    for v in 0..n {
        let beta = out_neighbors(graph, v).len() as u64;
        class_lists.push(match &profile.nodes[v] {
            None => vec![(parked, beta)],
            Some(p) => p.choices.iter().map(|c| (c.class as u64, c.delta)).collect(),
        });
    }
    let flavor = if graph.is_oriented() { Flavor::Oriented } else { Flavor::Defective };
    let class_inst = LdcInstance::new((1..=parked).collect(), class_lists, flavor, g)?;
    let alpha4 = S::from_u64(4).powu(alpha_exponent(&cfg.alpha)?);
    let stage_one_cfg = OldcConfig {
        alpha: alpha4.clone() / S::from_u64(40),
        tau_override: Some(taubar),
        tau_prime_override: None,
        h_override: None,
        ..cfg.clone()
    };
    let assigned = multi_defect_oldc(graph, &class_inst, &stage_one_cfg)?;
    let classes: Vec<u32> = assigned.output.total().expect("validated").into_iter().map(|c| c as u32).collect();

    let tau = cfg.tau_override.unwrap_or_else(|| pow4_ceil(tau_formula(h, space, m)));
    let budget = ClassBudget { classes: classes.clone(), q: cfg.q.unwrap_or(h as u64).min(tau) };
    let mut lists = Vec::with_capacity(n);
    let mut defects = Vec::with_capacity(n);
    for v in 0..n {
        match (&profile.nodes[v], profile.trivial[v]) {
            (None, Some(x)) => {
                lists.push(vec![x]);
                defects.push(inst.defect(v, x).expect("listed"));
            }
            (Some(p), _) => {
                let choice = p.choices.iter().find(|c| c.class == classes[v]).ok_or_else(|| {
                    Error::InvariantViolated(format!("node {v} got class {} outside its class list", classes[v]))
                })?;
                lists.push(p.buckets[&choice.mu].clone());
                defects.push(p.defect_of(choice.mu));
            }
            (None, None) => unreachable!("every node is profiled or trivial"),
        }
    }
    for v in 0..n {
        if profile.nodes[v].is_some() && !budget.holds_at(graph, v, defects[v]) {
            return Err(Error::ConditionViolated {
                node: v,
                detail: format!("class {} from the class assignment is too small for its out-degrees", classes[v]),
            });
        }
    }
    let alpha_two = if alpha4 > S::from_u64(16) { alpha4.clone() / S::from_u64(16) - S::one() } else { S::zero() };
    let stage_two_cfg = OldcConfig { alpha: alpha_two, tau_override: Some(tau), h_override: Some(h), ..cfg.clone() };
    let colored = two_phase_oldc(graph, &lists, &defects, &budget, space, &stage_two_cfg)?;

    let output = validated(graph, inst, colored.output.total().expect("validated"))?;
    let mut combined = RoundTrace::default();
    combined.note(format!(
        "alpha = {}, tau = {tau}, taubar = {taubar}, window = {h_prime}, defect classes = {h}",
        alpha4.to_f64()
    ));
    combined.append("class assignment", assigned.trace);
    combined.append("coloring", colored.trace);
    Ok(OldcRun { output, trace: combined, diagnostics: colored.diagnostics, params: colored.params, h })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::{generate_graph, Family};
    use crate::oldc::class_of;
    use proptest::prelude::*;

    #[test]
    fn weights_follow_the_threshold_and_floor() {
        assert_eq!(lambda_exponent(10, 10, 1), Some(0));
        assert_eq!(lambda_exponent(3, 10, 1), None);
        assert_eq!(lambda_exponent(6, 10, 1), Some(1));
        assert_eq!(lambda_exponent(1, 16, 8), Some(2));
        assert_eq!(lambda_exponent(1, 17, 8), None);
    }

    #[test]
    fn window_is_a_power_of_four_covering_log_8h() {
        assert_eq!(class_window(1), 4);
        assert_eq!(class_window(2), 4);
        assert_eq!(class_window(3), 16);
        assert_eq!(class_window(8192), 16);
        assert_eq!(class_window(8193), 64);
    }

    #[test]
    fn single_defect_class_dominates() {
        let g = ColoredGraph::new(2, &[(0, 1)]).unwrap().oriented_by(|u, _| u == 0);
        let inst = LdcInstance::new((0..8).collect(), vec![(0..8).map(|x| (x, 0)).collect(); 2], Flavor::Oriented, 0).unwrap();
        let p = lambda_profile(&g, &inst, &16.0f64, 4, 4, 1).unwrap();
        assert!(p.nodes[1].is_none());
        assert_eq!(p.trivial[1], Some(0));
        let node = p.nodes[0].as_ref().unwrap();
        // R = 16·1·4·16 = 4^5, defect 0 sits in class 5.
        assert_eq!(node.r_exp, 5);
        assert!(node.dominant);
        assert_eq!(node.choices, vec![ClassChoice { class: 5, mu: 5, delta: 8 }]);
        assert_eq!(node.lambda[4], Some(0));
    }

    #[test]
    fn spread_lists_keep_distinct_classes() {
        // Four defect classes with equal energy each: weight 1/4 is dominant.
        let p = profile_node(1, 6, (1..=4).map(|mu| (mu, vec![mu as Color; 1 << (2 * mu)])).collect(), 4);
        assert!(p.dominant);
        // Eight equal classes: weights 1/16, classes μ−2+2 = μ, all distinct.
        let p = profile_node(1, 10, (1..=8).map(|mu| (mu, vec![0; 1 << (2 * mu)])).collect(), 8);
        assert!(!p.dominant);
        assert_eq!(p.choices.iter().map(|c| c.class).collect::<Vec<_>>(), (1..=8).collect::<Vec<_>>());
        assert!(p.choices.iter().all(|c| c.delta == 1 << 8));
    }

    #[test]
    fn class_for_four_out_neighbors_and_defect_one() {
        assert_eq!(class_of(4, 1), 2);
    }

    #[test]
    fn dominant_nodes_run_end_to_end() {
        let g = ColoredGraph::new(4, &[(0, 1), (0, 2), (1, 2), (2, 3)]).unwrap().oriented_by(|u, v| u < v);
        let inst = LdcInstance::new((0..400).collect(), vec![(0..400).map(|x| (x, 1)).collect(); 4], Flavor::Oriented, 0).unwrap();
        let cfg = OldcConfig { alpha: 1.0, taubar_override: Some(1), ..OldcConfig::<f64>::scaled(2) };
        match main_oldc(&g, &inst, &cfg) {
            Ok(run) => assert!(run.output.total().is_some()),
            Err(e) => assert!(e.is_fail_fast(), "{e}"),
        }
    }

    #[test]
    fn random_graphs_are_valid_or_fail_fast() {
        let mut ok = 0;
        for seed in 0..20 {
            let g = generate_graph(Family::RandomDag, 16, 4, seed).unwrap();
            let inst = LdcInstance::new((0..600).collect(), vec![(0..600).map(|x| (x, 3)).collect(); 16], Flavor::Oriented, 0).unwrap();
            let cfg = OldcConfig { alpha: 1.0, taubar_override: Some(1), ..OldcConfig::<f64>::scaled(2) };
            match main_oldc(&g, &inst, &cfg) {
                Ok(run) => {
                    ok += 1;
                    assert!(run.diagnostics.iter().all(|d| 2 * d.frequency <= d.defect));
                }
                Err(e) => assert!(e.is_fail_fast(), "{e}"),
            }
        }
        assert!(ok >= 10, "only {ok} of 20 runs succeeded");
    }

    proptest! {
        #[test]
        fn kept_weight_is_at_least_a_twentieth(counts in proptest::collection::vec(0usize..40, 1..8)) {
            prop_assume!(counts.iter().any(|&c| c > 0));
            let h = counts.len() as u32;
            let r_exp = h + 2;
            let buckets = counts.iter().enumerate().filter(|(_, &c)| c > 0).map(|(i, &c)| (i as u32 + 1, vec![0; c])).collect();
            let p = profile_node(1, r_exp, buckets, h);
            if !p.dominant {
                let top = p.lambda.iter().flatten().copied().max().unwrap_or(0);
                let kept: u128 = p.choices.iter().map(|c| 1u128 << (2 * (top - p.lambda[c.mu as usize - 1].unwrap()))).sum();
                prop_assert!(20 * kept >= 1u128 << (2 * top), "{:?}", p);
            }
            let classes: Vec<u32> = p.choices.iter().map(|c| c.class).collect();
            prop_assert!(classes.windows(2).all(|w| w[0] < w[1]));
            prop_assert!(classes.iter().all(|&c| c >= 1 && c <= h));
        }
    }
}
