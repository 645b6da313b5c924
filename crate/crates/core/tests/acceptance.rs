//! End-to-end acceptance checks. Runs as a plain binary so the verdict
//! lines appear in `cargo test` output; exits non-zero when a criterion
//! outside `KNOWN_UNATTAINABLE` fails.

use listdefect::conflict::{build_type_table, residue_restrict, ConflictParams, NodeType, Order, Shape, TypeTable};
use listdefect::generate::{connected_graphs, generate_graph, generate_lists, rng, Family, ListModel, Target};
use listdefect::linial::{defective_linial, linial_coloring};
use listdefect::oldc::{main_oldc, multi_defect_oldc, OldcConfig, OldcRun};
use listdefect::oracle::{exhaustive_solve, sequential_arbdefective, sequential_ldc, sequential_ldc_checked, DEFAULT_CAP};
use listdefect::reductions::{
    congest_pipeline, degree_halving_framework, preset_message, space_reduced_oldc, Basic, FrameworkConfig, Main,
    PipelineConfig,
};
use listdefect::sim::{Budget, RoundTrace};
use listdefect::{validate_ldc, Color, ColoredGraph, ColoringOutput, Error, Flavor, LdcInstance};
use rand::seq::SliceRandom;
use rand::Rng;
use std::time::Instant;

/// Criteria that cannot hold as stated; they still run and report FAIL.
/// Criterion 5 asks for 2 distinct 2-subsets of a 2-element list.
const KNOWN_UNATTAINABLE: &[usize] = &[5];

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict { pass, detail: detail.into() }
}

fn main() {
    let criteria: Vec<(usize, fn() -> Verdict)> = vec![
        (1, sequential_recoloring),
        (2, tightness),
        (3, euler_orientation),
        (4, family_conflict_brute_force),
        (5, zero_round_tables),
        (6, fail_fast_contract),
        (7, message_accounting),
        (8, degree_halving),
        (9, linial_shape),
        (10, determinism),
    ];
    let handles: Vec<_> = criteria
        .into_iter()
        .map(|(id, f)| {
            (
                id,
                std::thread::spawn(move || {
                    let t = Instant::now();
                    let v = f();
                    (v, t.elapsed())
                }),
            )
        })
        .collect();
    let mut unexpected = Vec::new();
    for (id, h) in handles {
        let (v, took) = match h.join() {
            Ok(r) => r,
            Err(_) => (verdict(false, "panicked"), Default::default()),
        };
        let tag = if v.pass { "PASS" } else { "FAIL" };
        println!("criterion {id}: {tag} ({:.1}s) {}", took.as_secs_f64(), v.detail);
        if !v.pass && !KNOWN_UNATTAINABLE.contains(&id) {
            unexpected.push(id);
        }
    }
    if !unexpected.is_empty() {
        eprintln!("unexpected failures: {unexpected:?}");
        std::process::exit(1);
    }
}

fn same_color_out_degrees(out: &ColoringOutput, n: usize) -> Vec<usize> {
    let mut deg = vec![0; n];
    for &(u, v) in out.orientation_out.as_ref().expect("orientation") {
        if out.colors[u] == out.colors[v] {
            deg[u] += 1;
        }
    }
    deg
}

/// Every connected graph on up to 7 nodes with 50 defect-budget instances.
fn small_instances(target: Target, flavor: Flavor) -> impl Iterator<Item = (ColoredGraph, LdcInstance)> {
    (1..=7).flat_map(move |n| {
        connected_graphs(n).into_iter().enumerate().flat_map(move |(gi, edges)| {
            let g = ColoredGraph::new(n, &edges).expect("enumerated graph");
            (0..50u64).map(move |s| {
                let seed = (n as u64) << 40 | (gi as u64) << 8 | s;
                let inst = generate_lists(&g, ListModel::DefectBudget { target }, 6, flavor, seed).expect("lists");
                (g.clone(), inst)
            })
        })
    })
}

fn sequential_recoloring() -> Verdict {
    let (mut runs, mut bad) = (0, Vec::new());
    for (g, inst) in small_instances(Target::Eq1, Flavor::Defective) {
        runs += 1;
        let ok = match sequential_ldc_checked(&g, &inst) {
            Ok(run) => {
                let valid = validate_ldc(&g, &inst, &run.output).is_ok_and(|r| r.valid);
                let decreasing = run.potential.windows(2).all(|w| w[1] < w[0]);
                valid && decreasing && run.recolorings <= 3 * g.edge_count() && run.recolorings + 1 == run.potential.len()
            }
            Err(_) => false,
        };
        if !ok && bad.len() < 5 {
            bad.push(runs);
        }
    }
    verdict(bad.is_empty(), format!("{runs} instances, failing runs {bad:?}"))
}

/// Multisets of defects `d+1` summing to `total`, as partitions.
fn partitions(total: u64, max_part: u64) -> Vec<Vec<u64>> {
    if total == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for part in (1..=max_part.min(total)).rev() {
        for mut rest in partitions(total - part, part) {
            rest.insert(0, part);
            out.push(rest);
        }
    }
    out
}

fn tightness() -> Verdict {
    let mut checked = 0;
    let mut bad = Vec::new();
    for delta in 2..=4usize {
        let g = generate_graph(Family::Clique, delta + 1, 0, 0).expect("clique");
        for (total, expect_sat) in [(delta as u64, false), (delta as u64 + 1, true)] {
            for parts in partitions(total, total) {
                let list: Vec<(Color, u64)> = parts.iter().enumerate().map(|(x, &p)| (x as Color, p - 1)).collect();
                let space: Vec<Color> = (0..list.len() as Color).collect();
                let inst = LdcInstance::new(space, vec![list; delta + 1], Flavor::Defective, 0).expect("instance");
                checked += 1;
                let ok = match exhaustive_solve(&g, &inst, DEFAULT_CAP) {
                    Ok(None) => !expect_sat,
                    Ok(Some(out)) => expect_sat && validate_ldc(&g, &inst, &out).is_ok_and(|r| r.valid),
                    Err(_) => false,
                };
                if !ok {
                    bad.push((delta, parts));
                }
            }
        }
    }
    verdict(bad.is_empty(), format!("{checked} clique instances, mismatches {bad:?}"))
}

fn euler_orientation() -> Verdict {
    let (mut runs, mut bad) = (0, Vec::new());
    for (g, inst) in small_instances(Target::Eq2, Flavor::Arbdefective) {
        runs += 1;
        let ok = sequential_arbdefective(&g, &inst).is_ok_and(|out| {
            let deg = same_color_out_degrees(&out, g.n());
            (0..g.n()).all(|v| {
                let x = out.colors[v].expect("total");
                inst.defect(v, x).is_some_and(|d| deg[v] as u64 <= d)
            })
        });
        if !ok && bad.len() < 5 {
            bad.push(runs);
        }
    }
    verdict(bad.is_empty(), format!("{runs} instances, failing runs {bad:?}"))
}

/// Pairs within distance `g`, counted by a double loop.
fn brute_conflict(a: &[Color], b: &[Color], tau: u64, g: u64) -> bool {
    let pairs = a.iter().map(|&x| b.iter().filter(|&&y| x.abs_diff(y) <= g).count() as u64).sum::<u64>();
    pairs >= tau
}

/// Some `τ′` distinct members of `k1` each conflict with a member of `k2`.
fn brute_psi(k1: &[Vec<Color>], k2: &[Vec<Color>], tau_prime: u64, tau: u64, g: u64) -> bool {
    (0u32..1 << k1.len()).filter(|mask| mask.count_ones() as u64 == tau_prime).any(|mask| {
        (0..k1.len()).filter(|i| mask >> i & 1 == 1).all(|i| k2.iter().any(|c| brute_conflict(&k1[i], c, tau, g)))
    })
}

fn family_conflict_brute_force() -> Verdict {
    let mut r = rng(4);
    let family = |r: &mut rand_chacha::ChaCha8Rng| -> Vec<Vec<Color>> {
        let size = r.gen_range(1..=6);
        (0..size)
            .map(|_| {
                let k = r.gen_range(1..=5);
                let mut c: Vec<Color> = (0..16).collect::<Vec<_>>().choose_multiple(r, k).copied().collect();
                c.sort_unstable();
                c
            })
            .collect()
    };
    let mut mismatches = 0;
    let mut positives = 0;
    for _ in 0..1000 {
        let k1 = family(&mut r);
        let k2 = family(&mut r);
        let tau = r.gen_range(1..=4);
        let tau_prime = r.gen_range(1..=k1.len() as u64);
        let g = r.gen_range(0..=2);
        let fast = listdefect::conflict::psi_g_member(&k1, &k2, tau_prime, tau, g);
        let slow = brute_psi(&k1, &k2, tau_prime, tau, g);
        positives += slow as usize;
        mismatches += (fast != slow) as usize;
    }
    verdict(mismatches == 0, format!("1000 cases, {positives} conflicting, {mismatches} mismatches"))
}

fn table_shape(order: Order) -> Shape<'static> {
    Shape { subset_size: &|_| 2, family_size: &|_| 2, order }
}

/// All multisets of at most `max` items from `universe`, as index lists.
fn multisets(universe: usize, max: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(start: usize, universe: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if !cur.is_empty() {
            out.push(cur.clone());
        }
        if cur.len() == max {
            return;
        }
        for i in start..universe {
            cur.push(i);
            rec(i, universe, max, cur, out);
            cur.pop();
        }
    }
    rec(0, universe, max, &mut cur, &mut out);
    out
}

/// Types over `0..space` with residue-restricted lists of `len` colors.
fn residue_types(space: u64, m: u64, g: u64, len: usize) -> Vec<NodeType> {
    let colors: Vec<Color> = (0..space).collect();
    let mut lists = Vec::new();
    let mut idx: Vec<usize> = (0..len).collect();
    loop {
        let l: Vec<Color> = idx.iter().map(|&i| colors[i]).collect();
        let (_, restricted) = residue_restrict(&l, g);
        if restricted.len() == len {
            lists.push(restricted);
        }
        if !listdefect::conflict::colex_next(&mut idx, colors.len()) {
            break;
        }
    }
    (0..m).flat_map(|c| lists.iter().map(move |l| NodeType { init_color: c, list: l.clone(), class: 1 })).collect()
}

fn pairwise_clean(table: &TypeTable) -> bool {
    let f = table.families();
    table.violations().is_empty()
        && (0..f.len()).all(|i| (0..f.len()).all(|j| i == j || !brute_psi(&f[i], &f[j], table.tau_prime, table.tau, table.g)))
}

fn zero_round_tables() -> Verdict {
    // As stated: 2-element lists. A 2-element list has one 2-subset, so no
    // family of 2 distinct members exists and every build must stop at its
    // first type.
    let mut literal_builds = 0;
    let mut literal_ok = 0;
    let mut literal_other = Vec::new();
    for g in [0, 1] {
        let params = ConflictParams::scaled(1, 4, 2, g, 2, 2).expect("params");
        let universe = residue_types(4, 2, g, 2);
        for ms in multisets(universe.len(), 6) {
            let types: Vec<NodeType> = ms.iter().map(|&i| universe[i].clone()).collect();
            literal_builds += 1;
            match build_type_table(&params, &types, &table_shape(Order::Colex), 1_000_000) {
                Ok(_) => literal_ok += 1,
                Err(Error::GreedyExhausted { type_index: 0 }) => {}
                Err(e) => literal_other.push(e.kind()),
            }
        }
    }
    literal_other.dedup();

    // The same parameters with 4-element residue-restricted lists, where
    // families of 2 members exist.
    let mut sub_builds = 0;
    let mut sub_failures = Vec::new();
    let mut r = rng(5);
    for (space, m, g) in [(8, 2, 0), (10, 4, 0), (10, 4, 1)] {
        let params = ConflictParams::scaled(1, space, m, g, 2, 2).expect("params");
        let universe = residue_types(space, m, g, 4);
        let mut cases: Vec<Vec<usize>> = (0..universe.len()).flat_map(|i| (i..universe.len()).map(move |j| vec![i, j])).collect();
        cases.extend((0..300).map(|_| (0..r.gen_range(3..=6)).map(|_| r.gen_range(0..universe.len())).collect()));
        for ms in cases {
            let types: Vec<NodeType> = ms.iter().map(|&i| universe[i].clone()).collect();
            sub_builds += 1;
            let built = build_type_table(&params, &types, &table_shape(Order::Colex), 10_000_000);
            let rebuilt = build_type_table(&params, &types, &table_shape(Order::Colex), 10_000_000);
            let ok = match (built, rebuilt) {
                (Ok(a), Ok(b)) => pairwise_clean(&a) && a.to_bytes() == b.to_bytes(),
                _ => false,
            };
            if !ok && sub_failures.len() < 5 {
                sub_failures.push((space, g, ms));
            }
        }
    }
    let literal_pass = literal_ok == literal_builds && literal_other.is_empty();
    let detail = format!(
        "2-element lists: {literal_ok}/{literal_builds} builds succeed (others stop at type 0 with no 2 distinct 2-subsets, \
         unexpected errors {literal_other:?}); 4-element lists: {sub_builds} builds, failures {sub_failures:?}"
    );
    // The failure must be exactly the documented one and the substitute must hold.
    let explained = literal_ok == 0 && literal_other.is_empty() && sub_failures.is_empty();
    verdict(literal_pass, if literal_pass || explained { detail } else { format!("UNEXPLAINED {detail}") })
}

/// A random oriented instance with out-degree at most 4.
fn random_oriented(seed: u64) -> (ColoredGraph, LdcInstance) {
    let mut r = rng(600 + seed);
    let n = r.gen_range(2..=32);
    let beta = r.gen_range(1..=4);
    let g = generate_graph(Family::RandomDag, n, beta, seed).expect("graph");
    let space: Vec<Color> = (0..*[64u64, 128, 256].choose(&mut r).expect("nonempty")).collect();
    let lists = (0..n)
        .map(|_| {
            let len = r.gen_range(4..=space.len().min(96));
            space.choose_multiple(&mut r, len).map(|&x| (x, r.gen_range(0..=3))).collect()
        })
        .collect();
    (g, LdcInstance::new(space, lists, Flavor::Oriented, 0).expect("instance"))
}

fn frequency_within_defect(run: &OldcRun) -> bool {
    run.diagnostics.iter().all(|d| d.class.is_none() || d.frequency < d.defect + 1)
}

fn fail_fast_contract() -> Verdict {
    let basic = OldcConfig { alpha: 1.0, ..OldcConfig::<f64>::scaled(2) };
    let main = OldcConfig { alpha: 1.0, taubar_override: Some(1), ..OldcConfig::<f64>::scaled(2) };
    let (mut valid, mut failed, mut invalid) = ([0; 2], [0; 2], Vec::new());
    for seed in 0..250u64 {
        let (g, inst) = random_oriented(seed);
        for (j, res) in [multi_defect_oldc(&g, &inst, &basic), main_oldc(&g, &inst, &main)].into_iter().enumerate() {
            match res {
                Ok(run) => {
                    let ok = validate_ldc(&g, &inst, &run.output).is_ok_and(|r| r.valid) && frequency_within_defect(&run);
                    if ok {
                        valid[j] += 1;
                    } else {
                        invalid.push((seed, j, "invalid output".to_string()));
                    }
                }
                Err(e) if e.is_fail_fast() => failed[j] += 1,
                Err(e) => invalid.push((seed, j, e.to_string())),
            }
        }
    }
    invalid.truncate(5);
    verdict(
        invalid.is_empty(),
        format!(
            "500 runs: basic {} valid / {} fail-fast, main {} valid / {} fail-fast, bad {invalid:?}",
            valid[0], failed[0], valid[1], failed[1]
        ),
    )
}

fn ceil_log2(x: u64) -> u64 {
    if x <= 1 {
        0
    } else {
        64 - (x - 1).leading_zeros() as u64
    }
}

/// Color list of at most `min(Λ, p)` colors out of `space`, the initial
/// color and one word of bookkeeping.
fn shaped_bound(lambda: u64, space: u64, m: u64) -> u64 {
    (lambda * ceil_log2(space)).min(space) + ceil_log2(m) + 64
}

fn phases_within(trace: &RoundTrace, lambda: u64, p: u64, m: u64) -> bool {
    let shaped = shaped_bound(lambda.min(p), p, m);
    trace
        .phases
        .iter()
        .filter(|ph| !ph.centralized)
        .all(|ph| ph.bound.is_some_and(|b| b <= shaped && ph.max_bits <= b))
}

fn message_accounting() -> Verdict {
    let inner = Basic { cfg: OldcConfig { alpha: 1.0, ..OldcConfig::<f64>::scaled(2) }, kappa: 1.0 };
    let colors: Vec<Color> = (0..256).collect();
    let (mut conforming, mut bad) = (0, Vec::new());
    let mut fail_fast = [0; 2];
    for seed in 0..40u64 {
        let g = generate_graph(Family::RandomDag, 24, 4, seed).expect("graph");
        let mut r = rng(seed);
        let lists = (0..24).map(|_| colors.choose_multiple(&mut r, 32).map(|&x| (x, r.gen_range(1..4))).collect()).collect();
        let inst = LdcInstance::new(colors.clone(), lists, Flavor::Oriented, 0).expect("instance");
        let lambda = inst.max_list_len() as u64;
        let mut traces = Vec::new();
        for (j, rr) in [1u32, 4].into_iter().enumerate() {
            let p = preset_message(256, rr);
            match space_reduced_oldc(&g, &inst, p, &inner, Budget::default()) {
                Ok(run) => {
                    if !phases_within(&run.trace, lambda, p, g.m()) {
                        bad.push((seed, rr, "phase over shaped bound"));
                    }
                    traces.push(run.trace);
                }
                Err(e) if e.is_fail_fast() => fail_fast[j] += 1,
                Err(_) => bad.push((seed, rr, "hard error")),
            }
        }
        if let [one, four] = &traces[..] {
            conforming += 1;
            if four.max_message_bits().iter().any(|&b| b > one.overall_max_bits()) {
                bad.push((seed, 4, "r = 4 round above r = 1 maximum"));
            }
        }
    }
    verdict(
        bad.is_empty() && conforming > 0,
        format!("40 seeds, {conforming} conforming, fail-fast r=1 {} r=4 {}, violations {bad:?}", fail_fast[0], fail_fast[1]),
    )
}

fn degree_plus_one_instance(seed: u64) -> (ColoredGraph, LdcInstance) {
    let mut r = rng(1000 + seed);
    let n = r.gen_range(20..=200);
    let delta = r.gen_range(2..=16);
    let family = [Family::RandomGnp, Family::PowerLaw, Family::Ring][seed as usize % 3];
    let g = generate_graph(family, n, delta, seed).expect("graph");
    let colors: Vec<Color> = (0..64).collect();
    let lists = (0..n).map(|v| colors.choose_multiple(&mut r, g.degree(v) + 1).map(|&x| (x, 0)).collect()).collect();
    (g, LdcInstance::new(colors, lists, Flavor::Arbdefective, 0).expect("instance"))
}

fn degree_halving() -> Verdict {
    let (mut fallbacks, mut classes, mut bad) = (0, 0, Vec::new());
    for seed in 0..100u64 {
        let (g, inst) = degree_plus_one_instance(seed);
        match congest_pipeline(&g, &inst, &PipelineConfig::<f64>::default()) {
            Ok(run) => {
                fallbacks += run.fallbacks;
                classes += run.rows.len();
                let proper = g.edges().all(|(u, v)| run.output.colors[u] != run.output.colors[v]);
                let in_lists = (0..g.n()).all(|v| run.output.colors[v].is_some_and(|x| inst.defect(v, x).is_some()));
                let stage_cap = ceil_log2(g.max_degree() as u64) as usize + 1;
                let halves = run.degrees.windows(2).all(|w| w[1] <= w[0] / 2);
                if !(proper && in_lists && run.stages <= stage_cap && halves) {
                    bad.push((seed, "property".to_string()));
                }
            }
            Err(e) => bad.push((seed, e.to_string())),
        }
    }
    bad.truncate(5);
    verdict(bad.is_empty(), format!("100 instances, {fallbacks}/{classes} classes fell back, failures {bad:?}"))
}

fn linial_shape() -> Verdict {
    let (mut runs, mut worst_rounds, mut worst_ratio, mut bad) = (0, 0, 0.0f64, Vec::new());
    let cases = [(Family::Ring, vec![2]), (Family::RandomGnp, vec![3, 5, 8, 16, 32]), (Family::PowerLaw, vec![4, 8, 16])];
    for (family, deltas) in cases {
        for n in [2usize, 16, 64, 200, 512] {
            for &delta in &deltas {
                for seed in 0..3 {
                    let g = generate_graph(family, n, delta, seed).expect("graph");
                    runs += 1;
                    let Ok(run) = linial_coloring(&g, Budget::default()) else {
                        bad.push((family, n, seed));
                        continue;
                    };
                    let d = g.max_degree().max(1) as f64;
                    let ratio = run.palette as f64 / (d * d);
                    let proper = g.edges().all(|(u, v)| run.output.colors[u] != run.output.colors[v]);
                    let in_palette = run.output.colors.iter().all(|c| c.is_some_and(|c| c < run.palette));
                    worst_rounds = worst_rounds.max(run.trace.rounds_elapsed);
                    worst_ratio = worst_ratio.max(ratio);
                    if !(proper && in_palette && run.trace.rounds_elapsed <= 6 && ratio <= 8.0) {
                        bad.push((family, n, seed));
                    }
                }
            }
        }
    }
    verdict(bad.is_empty(), format!("{runs} runs, worst rounds {worst_rounds}, worst palette/Δ² {worst_ratio:.2}, failures {bad:?}"))
}

fn line(name: &str, o: &ColoringOutput, t: Option<&RoundTrace>) -> String {
    format!(
        "{name}:{}:{}:{}",
        serde_json::to_string(o).expect("json"),
        t.map(RoundTrace::to_json).unwrap_or_default(),
        t.map(RoundTrace::to_csv).unwrap_or_default()
    )
}

fn traced(name: &str, r: listdefect::Result<(ColoringOutput, RoundTrace)>) -> String {
    match r {
        Ok((o, t)) => line(name, &o, Some(&t)),
        Err(e) => format!("{name}:{e}"),
    }
}

/// Serialized output and trace of every algorithm on one seed.
fn fingerprint(seed: u64) -> Vec<String> {
    let (g, inst) = random_oriented(seed);
    let basic = OldcConfig { alpha: 1.0, ..OldcConfig::<f64>::scaled(2) };
    let main = OldcConfig { alpha: 1.0, taubar_override: Some(1), ..OldcConfig::<f64>::scaled(2) };
    let inner = Basic { cfg: basic.clone(), kappa: 1.0 };
    let p = preset_message(inst.color_space().len() as u64, 2);
    let (pg, pinst) = degree_plus_one_instance(seed);
    let solver = Main { cfg: main.clone(), kappa: 1.0 };
    let greedy = listdefect::generate::greedy_init(pg.clone());
    vec![
        match sequential_ldc(&g, &inst.clone().with_flavor(Flavor::Defective)) {
            Ok(r) => line("seq", &r.output, None),
            Err(e) => format!("seq:{e}"),
        },
        match sequential_arbdefective(&g, &inst.clone().with_flavor(Flavor::Arbdefective)) {
            Ok(o) => line("seq-arb", &o, None),
            Err(e) => format!("seq-arb:{e}"),
        },
        traced("linial", linial_coloring(&g, Budget::default()).map(|r| (r.output, r.trace))),
        traced("defective-linial", defective_linial(&g, 1, Budget::default()).map(|r| (r.output, r.trace))),
        traced("oldc-basic", multi_defect_oldc(&g, &inst, &basic).map(|r| (r.output, r.trace))),
        traced("oldc-main", main_oldc(&g, &inst, &main).map(|r| (r.output, r.trace))),
        traced("space-reduced", space_reduced_oldc(&g, &inst, p, &inner, Budget::default()).map(|r| (r.output, r.trace))),
        traced(
            "framework",
            degree_halving_framework(&greedy, &pinst, &solver, &FrameworkConfig::default()).map(|r| (r.output, r.trace)),
        ),
        traced("pipeline", congest_pipeline(&pg, &pinst, &PipelineConfig::<f64>::default()).map(|r| (r.output, r.trace))),
    ]
}

fn determinism() -> Verdict {
    let mut compared = 0;
    let mut differing = Vec::new();
    for seed in 0..10 {
        let a = fingerprint(seed);
        let b = fingerprint(seed);
        compared += a.len();
        if a != b {
            differing.push(seed);
        }
    }
    verdict(differing.is_empty(), format!("{compared} algorithm runs repeated, differing seeds {differing:?}"))
}
